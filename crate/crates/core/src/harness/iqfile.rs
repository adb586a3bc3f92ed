//! Bit files to IQ streams and back.
//!
//! IQ samples are little-endian `f32` I,Q pairs. Each stream has a text
//! header beside it (`<iq>.hdr`) with one `key = value` per line.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;

use super::config::ExperimentConfig;
use crate::channel::{apply_channel, ChannelConfig};
use crate::error::{Error, Result};
use crate::rxchain::{Receiver, RxDiagnostics};
use crate::txchain::{build_frame, synthesize_baseband, BasebandSignal};

#[derive(Debug, Clone, PartialEq)]
pub struct StreamHeader {
    pub sample_rate_hz: f64,
    pub samples_per_symbol: usize,
    pub frames: usize,
    pub pad_bits: usize,
    pub pilot_seed: u64,
    /// Bits of the original file, excluding padding.
    pub payload_bits: usize,
}

impl fmt::Display for StreamHeader {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sample_rate_hz = {}", self.sample_rate_hz)?;
        writeln!(f, "samples_per_symbol = {}", self.samples_per_symbol)?;
        writeln!(f, "frames = {}", self.frames)?;
        writeln!(f, "pad_bits = {}", self.pad_bits)?;
        writeln!(f, "pilot_seed = {}", self.pilot_seed)?;
        writeln!(f, "payload_bits = {}", self.payload_bits)
    }
}

impl FromStr for StreamHeader {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let get = |key: &str| -> Result<String> {
            text.lines()
                .filter_map(|l| l.split_once('='))
                .find(|(k, _)| k.trim() == key)
                .map(|(_, v)| v.trim().to_string())
                .ok_or_else(|| Error::Header(format!("missing {key}")))
        };
        fn num<T: FromStr>(key: &str, v: String) -> Result<T> {
            v.parse().map_err(|_| Error::Header(format!("bad {key} value {v:?}")))
        }
        let h = StreamHeader {
            sample_rate_hz: num("sample_rate_hz", get("sample_rate_hz")?)?,
            samples_per_symbol: num("samples_per_symbol", get("samples_per_symbol")?)?,
            frames: num("frames", get("frames")?)?,
            pad_bits: num("pad_bits", get("pad_bits")?)?,
            pilot_seed: num("pilot_seed", get("pilot_seed")?)?,
            payload_bits: num("payload_bits", get("payload_bits")?)?,
        };
        if h.samples_per_symbol == 0 || !(h.sample_rate_hz > 0.0) {
            return Err(Error::Header("sample rate and samples per symbol must be positive".into()));
        }
        Ok(h)
    }
}

/// Path of the header written beside an IQ file.
pub fn header_path(iq: &Path) -> PathBuf {
    let mut s = iq.as_os_str().to_owned();
    s.push(".hdr");
    PathBuf::from(s)
}

pub fn bytes_to_bits(bytes: &[u8]) -> Vec<u8> {
    bytes.iter().flat_map(|&b| (0..8).map(move |i| (b >> (7 - i)) & 1)).collect()
}

/// Packs bits MSB-first; a short tail byte is zero-filled.
pub fn bits_to_bytes(bits: &[u8]) -> Vec<u8> {
    bits.chunks(8)
        .map(|c| c.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | (b << (7 - i))))
        .collect()
}

pub fn write_iq(path: &Path, samples: &[Complex64]) -> Result<()> {
    let mut buf = Vec::with_capacity(samples.len() * 8);
    for s in samples {
        buf.extend_from_slice(&(s.re as f32).to_le_bytes());
        buf.extend_from_slice(&(s.im as f32).to_le_bytes());
    }
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn read_iq(path: &Path) -> Result<Vec<Complex64>> {
    let buf = fs::read(path).map_err(|e| Error::io(path, e))?;
    if buf.len() % 8 != 0 {
        return Err(Error::Header(format!("{}: {} bytes is not a whole number of I/Q pairs", path.display(), buf.len())));
    }
    Ok(buf
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
            Complex64::new(re as f64, im as f64)
        })
        .collect())
}

/// Frames `bits`, synthesizes the stream and applies `cfg`'s channel at
/// `cfg.link_snr_db`.
pub fn transmit_bits(bits: &[u8], cfg: &ExperimentConfig) -> Result<(BasebandSignal, StreamHeader)> {
    cfg.validate()?;
    let layout = cfg.layout();
    let per_frame = layout.payload_bits();
    let frames = bits.len().div_ceil(per_frame);
    let pad_bits = frames * per_frame - bits.len();
    let constellation = cfg.transmit_constellation()?;
    let mut samples = Vec::with_capacity(frames * layout.total_symbols() * cfg.sps);
    for f in 0..frames {
        let mut chunk = bits[f * per_frame..bits.len().min((f + 1) * per_frame)].to_vec();
        chunk.resize(per_frame, 0);
        let frame = build_frame(&chunk, &layout, cfg.pilot_seed)?;
        samples.extend(synthesize_baseband(&frame, &layout, &constellation, cfg.sps, cfg.symbol_rate_hz)?.samples);
    }
    let clean = BasebandSignal {
        samples,
        sample_rate: cfg.symbol_rate_hz * cfg.sps as f64,
        samples_per_symbol: cfg.sps,
    };
    let signal = if frames == 0 {
        clean
    } else {
        let ch = ChannelConfig {
            snr_db: cfg.link_snr_db,
            seed: cfg.base_seed,
            ..cfg.channel.clone()
        };
        apply_channel(&clean, &ch)?
    };
    let header = StreamHeader {
        sample_rate_hz: signal.sample_rate,
        samples_per_symbol: cfg.sps,
        frames,
        pad_bits,
        pilot_seed: cfg.pilot_seed,
        payload_bits: bits.len(),
    };
    Ok((signal, header))
}

/// Reads `input`, writes the IQ stream to `iq` and its header beside it.
pub fn transmit_file(input: &Path, iq: &Path, cfg: &ExperimentConfig) -> Result<StreamHeader> {
    let bytes = fs::read(input).map_err(|e| Error::io(input, e))?;
    let (signal, header) = transmit_bits(&bytes_to_bits(&bytes), cfg)?;
    write_iq(iq, &signal.samples)?;
    let hdr = header_path(iq);
    fs::write(&hdr, header.to_string()).map_err(|e| Error::io(hdr, e))?;
    Ok(header)
}

/// Receives every frame of a stream; the first frame is searched over one
/// frame length, later ones around the expected position.
pub fn receive_bits(
    signal: &BasebandSignal,
    header: &StreamHeader,
    cfg: &ExperimentConfig,
) -> Result<(Vec<u8>, Vec<RxDiagnostics>)> {
    let layout = cfg.layout();
    let sps = header.samples_per_symbol;
    let frame_len = layout.total_symbols() * sps;
    if header.payload_bits + header.pad_bits != header.frames * layout.payload_bits() {
        return Err(Error::Header(format!(
            "{} payload + {} pad bits do not fill {} frames",
            header.payload_bits, header.pad_bits, header.frames
        )));
    }
    if signal.samples.len() < header.frames * frame_len {
        return Err(Error::Header(format!(
            "{} frames need at least {} samples, stream has {}",
            header.frames,
            header.frames * frame_len,
            signal.samples.len()
        )));
    }
    let receiver = Receiver::new(crate::rxchain::RxConfig {
        pilot_seed: header.pilot_seed,
        ..cfg.rx_config()
    })?;
    let mut bits = Vec::with_capacity(header.frames * layout.payload_bits());
    let mut diags = Vec::with_capacity(header.frames);
    let slack = 32 * sps;
    let mut window = 0..frame_len.min(signal.samples.len());
    for f in 0..header.frames {
        match receiver.receive_in(signal, window.clone()) {
            Ok((b, d)) => {
                let next = d.sync.frame_start + frame_len;
                window = next.saturating_sub(slack)..next + slack + 1;
                bits.extend(b);
                diags.push(d);
            }
            Err(e) => {
                bits.truncate(header.payload_bits);
                return Err(Error::PartialOutput {
                    frame: f,
                    recovered_bits: bits,
                    source: Box::new(e),
                });
            }
        }
    }
    bits.truncate(header.payload_bits);
    Ok((bits, diags))
}

/// Decodes `iq` (with its header) and writes the recovered bytes to `out`.
pub fn receive_file(iq: &Path, out: &Path, cfg: &ExperimentConfig) -> Result<StreamHeader> {
    let hdr = header_path(iq);
    let header: StreamHeader = fs::read_to_string(&hdr).map_err(|e| Error::io(&hdr, e))?.parse()?;
    let signal = BasebandSignal {
        samples: read_iq(iq)?,
        sample_rate: header.sample_rate_hz,
        samples_per_symbol: header.samples_per_symbol,
    };
    let (bits, _) = match receive_bits(&signal, &header, cfg) {
        Ok(r) => r,
        Err(Error::PartialOutput { frame, recovered_bits, source }) => {
            fs::write(out, bits_to_bytes(&recovered_bits)).map_err(|e| Error::io(out, e))?;
            return Err(Error::PartialOutput { frame, recovered_bits, source });
        }
        Err(e) => return Err(e),
    };
    fs::write(out, bits_to_bytes(&bits)).map_err(|e| Error::io(out, e))?;
    Ok(header)
}
