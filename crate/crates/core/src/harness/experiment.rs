//! Monte-Carlo BER campaigns.

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::ExperimentConfig;
use crate::channel::{apply_channel, ChannelConfig};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::rxchain::{Receiver, RxDiagnostics};
use crate::txchain::{build_frame, BasebandSignal, synthesize_baseband, Constellation, Frame, FrameLayout, SymbolIndex};

/// One SNR point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct BerRecord {
    pub snr_db: f64,
    pub bits_simulated: u64,
    pub bit_errors: u64,
    pub ber: f64,
    /// Frames lost to sync failure, each counted as fully errored.
    pub sync_failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub record: BerRecord,
    /// SNR of the equalized data symbols around their per-symbol cluster
    /// means, pooled over every synchronized frame.
    pub measured_snr_db: f64,
}

/// Seed of frame `frame` at SNR point `point`.
pub fn run_seed(base_seed: u64, point: usize, frame: usize) -> u64 {
    base_seed
        .wrapping_add((point as u64) << 20)
        .wrapping_add(frame as u64)
}

/// Pseudo-random payload drawn from a run seed.
pub fn random_payload(seed: u64, bits: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(bits);
    while out.len() < bits {
        let w = rng.next_u32();
        out.extend((0..32).map(|i| ((w >> (31 - i)) & 1) as u8).take(bits - out.len()));
    }
    out
}

/// Transmitter, channel template and receiver of one configuration.
pub struct Link {
    layout: FrameLayout,
    constellation: Constellation,
    sps: usize,
    symbol_rate: f64,
    pilot_seed: u64,
    channel: ChannelConfig,
    receiver: Receiver,
}

pub struct FrameRun {
    pub frame: Frame,
    pub result: Result<(Vec<u8>, RxDiagnostics)>,
}

impl Link {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Link {
            layout: cfg.layout(),
            constellation: cfg.transmit_constellation()?,
            sps: cfg.sps,
            symbol_rate: cfg.symbol_rate_hz,
            pilot_seed: cfg.pilot_seed,
            channel: cfg.channel.clone(),
            receiver: Receiver::new(cfg.rx_config())?,
        })
    }

    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    /// Sends one random frame through the channel at `snr_db`.
    pub fn run_frame(&self, snr_db: f64, seed: u64) -> Result<FrameRun> {
        let (frame, rx) = self.transmit(snr_db, seed)?;
        let offset = self.channel.timing_offset;
        let lo = offset.saturating_sub(8 * self.sps);
        let hi = offset + 64 * self.sps + 1;
        let result = self.receiver.receive_in(&rx, lo..hi);
        Ok(FrameRun { frame, result })
    }

    /// Channel output for the frame of run `seed`.
    pub fn received(&self, snr_db: f64, seed: u64) -> Result<BasebandSignal> {
        Ok(self.transmit(snr_db, seed)?.1)
    }

    fn transmit(&self, snr_db: f64, seed: u64) -> Result<(Frame, BasebandSignal)> {
        let payload = random_payload(seed, self.layout.payload_bits());
        let frame = build_frame(&payload, &self.layout, self.pilot_seed)?;
        let tx = synthesize_baseband(&frame, &self.layout, &self.constellation, self.sps, self.symbol_rate)?;
        let ch = ChannelConfig {
            snr_db,
            seed,
            ..self.channel.clone()
        };
        Ok((frame, apply_channel(&tx, &ch)?))
    }
}

/// Data symbol indices of a frame in transmission order.
pub fn data_indices(frame: &Frame) -> Vec<SymbolIndex> {
    frame.data.iter().flatten().copied().collect()
}

/// Signal and error energy of equalized symbols around the mean of each
/// transmitted symbol's cluster.
pub fn cluster_energies(eq: &[Complex64], refs: &[SymbolIndex]) -> (f64, f64) {
    let mut sum = [Complex64::new(0.0, 0.0); 4];
    let mut count = [0usize; 4];
    for (&z, &i) in eq.iter().zip(refs) {
        sum[i as usize] += z;
        count[i as usize] += 1;
    }
    let means: Vec<Complex64> = (0..4)
        .map(|i| if count[i] > 0 { sum[i] / count[i] as f64 } else { sum[i] })
        .collect();
    eq.iter().zip(refs).fold((0.0, 0.0), |(s, e), (&z, &i)| {
        let m = means[i as usize];
        (s + m.norm_sqr(), e + (z - m).norm_sqr())
    })
}

struct FrameTally {
    errors: u64,
    sync_failed: bool,
    signal: f64,
    noise: f64,
}

/// Runs every SNR point of `cfg`; frames are independent jobs.
pub fn run_sweep(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<PointSummary>> {
    let link = Link::new(cfg)?;
    let bits = link.layout.payload_bits() as u64;
    let jobs: Vec<(usize, usize)> = (0..cfg.snr_db.len())
        .flat_map(|p| (0..cfg.frames_per_point).map(move |f| (p, f)))
        .collect();
    let tallies = exec.map(jobs, |(p, f)| -> Result<FrameTally> {
        let run = link.run_frame(cfg.snr_db[p], run_seed(cfg.base_seed, p, f))?;
        Ok(match run.result {
            Ok((out, diag)) => {
                let errors = out.iter().zip(&run.frame.payload_bits).filter(|(a, b)| a != b).count() as u64;
                let (signal, noise) = cluster_energies(&diag.equalized_symbols, &data_indices(&run.frame));
                FrameTally { errors, sync_failed: false, signal, noise }
            }
            Err(Error::SyncNotFound { .. }) | Err(Error::Framing(_)) => FrameTally {
                errors: bits,
                sync_failed: true,
                signal: 0.0,
                noise: 0.0,
            },
            Err(e) => return Err(e),
        })
    });
    let tallies = tallies.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(tallies
        .chunks(cfg.frames_per_point)
        .zip(&cfg.snr_db)
        .map(|(chunk, &snr_db)| {
            let bit_errors: u64 = chunk.iter().map(|t| t.errors).sum();
            let bits_simulated = bits * chunk.len() as u64;
            let signal: f64 = chunk.iter().map(|t| t.signal).sum();
            let noise: f64 = chunk.iter().map(|t| t.noise).sum();
            PointSummary {
                record: BerRecord {
                    snr_db,
                    bits_simulated,
                    bit_errors,
                    ber: bit_errors as f64 / bits_simulated as f64,
                    sync_failures: chunk.iter().filter(|t| t.sync_failed).count(),
                },
                measured_snr_db: if noise > 0.0 { 10.0 * (signal / noise).log10() } else { f64::INFINITY },
            }
        })
        .collect())
}

pub fn run_ber_sweep(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<BerRecord>> {
    Ok(run_sweep(cfg, exec)?.into_iter().map(|p| p.record).collect())
}

/// SNR at which a BER curve crosses `target`, by linear interpolation of
/// `log10(BER)` between the bracketing points. Points without errors count
/// half an error.
pub fn snr_at_ber(records: &[BerRecord], target: f64) -> Result<f64> {
    let mut pts: Vec<(f64, f64)> = records
        .iter()
        .map(|r| (r.snr_db, r.ber.max(0.5 / r.bits_simulated as f64).log10()))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let t = target.log10();
    for w in pts.windows(2) {
        let ((s0, b0), (s1, b1)) = (w[0], w[1]);
        if b0 >= t && b1 <= t && b0 > b1 {
            return Ok(s0 + (b0 - t) / (b0 - b1) * (s1 - s0));
        }
    }
    Err(Error::Interpolation(format!(
        "BER curve over {:?} dB never crosses {target:e}",
        pts.iter().map(|p| p.0).collect::<Vec<_>>()
    )))
}

/// Extra SNR the `test` curve needs over `reference` to reach `target`.
pub fn gap_db(reference: &[BerRecord], test: &[BerRecord], target: f64) -> Result<f64> {
    Ok(snr_at_ber(test, target)? - snr_at_ber(reference, target)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub reference: Vec<BerRecord>,
    pub test: Vec<BerRecord>,
    pub gap_db: f64,
}

/// Runs both sweeps and measures the gap of `test` relative to `reference`
/// at the reference config's target BER.
pub fn compare_architectures(
    reference: &ExperimentConfig,
    test: &ExperimentConfig,
    exec: Execution,
) -> Result<Comparison> {
    if reference.snr_db != test.snr_db {
        return Err(Error::domain("compared sweeps must share the SNR grid"));
    }
    let r = run_ber_sweep(reference, exec)?;
    let t = run_ber_sweep(test, exec)?;
    let gap = gap_db(&r, &t, reference.target_ber)?;
    Ok(Comparison {
        reference: r,
        test: t,
        gap_db: gap,
    })
}
