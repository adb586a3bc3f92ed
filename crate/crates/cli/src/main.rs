use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mslink::harness::{
    gap_db, receive_file, run_ber_sweep, run_sweep, transmit_file, write_ber_csv, write_constellation_csv,
    BerRecord, ExperimentConfig, Link,
};
use mslink::rxchain::sync_metrics;
use mslink::txchain::build_sync_sequence;
use mslink::{Error, Execution};

#[derive(Parser)]
#[command(name = "mslink", version, about = "Metasurface QPSK link simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// conventional or metasurface.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated Es/N0 list in dB.
    #[arg(long)]
    snr: Option<String>,
    #[arg(long)]
    frames: Option<usize>,
    /// full, left-half, right-half or a row-major bit string.
    #[arg(long)]
    mask: Option<String>,
    /// Run jobs on a single thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// BER against SNR as CSV.
    BerSweep {
        #[command(flatten)]
        common: Common,
        /// Output CSV; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Conventional against metasurface sweep and their SNR gap.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Directory for conventional.csv, metasurface.csv and gap.txt.
        #[arg(long)]
        out: PathBuf,
    },
    /// Encodes a file into an IQ stream plus header.
    Transmit {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decodes an IQ stream back into a file.
    Receive {
        iq: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reflection coefficient against bias voltage as CSV.
    GammaCurve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Equalized data symbols of one frame at the first SNR as CSV.
    Constellation {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sync detection rate and peak metric per SNR point.
    SyncCheck {
        #[command(flatten)]
        common: Common,
    },
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        self.load_as(self.mode.as_deref(), true)
    }

    /// Config file plus command-line overrides. Appending `mode` after the
    /// file keeps the file's settings on top of that mode's defaults.
    fn load_as(&self, mode: Option<&str>, with_mask: bool) -> Result<ExperimentConfig> {
        let mut text = match &self.config {
            Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
            None => String::new(),
        };
        text.push('\n');
        if let Some(m) = mode {
            text += &format!("mode = {m}\n");
        }
        let mut cfg: ExperimentConfig = text.parse().context("invalid configuration")?;
        let overrides = [
            ("snr_db", self.snr.clone()),
            ("base_seed", self.seed.map(|s| s.to_string())),
            ("frames_per_point", self.frames.map(|f| f.to_string())),
            ("mask", self.mask.clone().filter(|_| with_mask)),
        ];
        for (k, v) in overrides {
            if let Some(v) = v {
                cfg.set(k, &v).with_context(|| format!("--{}", flag_name(k)))?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }
}

fn flag_name(key: &str) -> &str {
    match key {
        "snr_db" => "snr",
        "base_seed" => "seed",
        "frames_per_point" => "frames",
        k => k,
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn warn_sync_failures(label: &str, records: &[BerRecord]) {
    for r in records.iter().filter(|r| r.sync_failures > 0) {
        eprintln!(
            "warning: {label}{} of the frames at {} dB failed to synchronize and were counted as fully errored",
            r.sync_failures, r.snr_db
        );
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Command::BerSweep { common, out } => {
            let cfg = common.load()?;
            let points = run_sweep(&cfg, common.exec())?;
            let records: Vec<BerRecord> = points.iter().map(|p| p.record.clone()).collect();
            warn_sync_failures("", &records);
            let mut w = output(out.as_deref())?;
            write_ber_csv(&mut w, &records)?;
            w.flush()?;
        }
        Command::Compare { common, out } => {
            let reference = common.load_as(Some("conventional"), false)?;
            let test = common.load_as(Some("metasurface"), true)?;
            let exec = common.exec();
            let r = run_ber_sweep(&reference, exec)?;
            let t = run_ber_sweep(&test, exec)?;
            warn_sync_failures("conventional: ", &r);
            warn_sync_failures("metasurface: ", &t);
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            for (name, recs) in [("conventional.csv", &r), ("metasurface.csv", &t)] {
                let mut w = output(Some(&out.join(name)))?;
                write_ber_csv(&mut w, recs)?;
                w.flush()?;
            }
            let gap = gap_db(&r, &t, reference.target_ber).context("BER curves written, gap not measurable")?;
            let line = format!("gap_db = {gap:.4} at ber {:e}\n", reference.target_ber);
            fs::write(out.join("gap.txt"), &line)?;
            print!("{line}");
        }
        Command::Transmit { input, common, out } => {
            let cfg = common.load()?;
            let h = transmit_file(&input, &out, &cfg)?;
            eprintln!(
                "{} frames, {} payload bits, {} pad bits at {} Hz",
                h.frames, h.payload_bits, h.pad_bits, h.sample_rate_hz
            );
        }
        Command::Receive { iq, common, out } => {
            let cfg = common.load()?;
            match receive_file(&iq, &out, &cfg) {
                Ok(h) => eprintln!("{} frames, {} bits recovered", h.frames, h.payload_bits),
                Err(Error::PartialOutput { frame, recovered_bits, source }) => bail!(
                    "frame {frame} could not be decoded ({source}); {} bits written to {}",
                    recovered_bits.len(),
                    out.display()
                ),
                Err(e) => return Err(e.into()),
            }
        }
        Command::GammaCurve { common, out } => {
            let cfg = common.load()?;
            let lut = cfg.gamma_lut()?;
            eprintln!("phase span {:.2} deg", lut.phase_span_deg());
            let mut w = output(out.as_deref())?;
            lut.write_csv(&mut w)?;
            w.flush()?;
        }
        Command::Constellation { common, out } => {
            let cfg = common.load()?;
            let link = Link::new(&cfg)?;
            let run = link.run_frame(cfg.snr_db[0], cfg.base_seed)?;
            let (_, diag) = run.result?;
            eprintln!("evm {:.2}%, snr estimate {:.2} dB", diag.evm_percent, diag.snr_estimate_db);
            let mut w = output(out.as_deref())?;
            write_constellation_csv(&mut w, &diag.equalized_symbols)?;
            w.flush()?;
        }
        Command::SyncCheck { common } => {
            let cfg = common.load()?;
            let link = Link::new(&cfg)?;
            let chips = build_sync_sequence();
            println!("snr_db,frames,detected,mean_peak,mean_offpeak");
            for (p, &snr) in cfg.snr_db.iter().enumerate() {
                let (mut hits, mut peak, mut off) = (0usize, 0.0, 0.0);
                for f in 0..cfg.frames_per_point {
                    let seed = mslink::harness::run_seed(cfg.base_seed, p, f);
                    let run = link.run_frame(snr, seed)?;
                    if let Ok((_, d)) = &run.result {
                        hits += usize::from(d.sync.frame_start == cfg.channel.timing_offset);
                        peak += d.sync.peak_metric;
                    }
                    off += offpeak_metric(&link, &cfg, snr, seed, &chips)?;
                }
                let n = cfg.frames_per_point as f64;
                println!("{snr},{},{hits},{:.4},{:.4}", cfg.frames_per_point, peak / n, off / n);
            }
        }
    }
    Ok(())
}

/// Largest sync metric away from the true start, as a false-alarm margin.
fn offpeak_metric(link: &Link, cfg: &ExperimentConfig, snr: f64, seed: u64, chips: &[i8]) -> Result<f64> {
    let signal = link.received(snr, seed)?;
    let t0 = cfg.channel.timing_offset;
    let guard = cfg.sps;
    let m = sync_metrics(&signal.samples, chips, cfg.sps, 0..t0 + 64 * cfg.sps + 1);
    Ok(m.iter()
        .enumerate()
        .filter(|(i, _)| i.abs_diff(t0) > guard)
        .map(|(_, v)| *v)
        .fold(0.0, f64::max))
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
