use std::ops::Range;

use num_complex::Complex64;

use super::cfo::{correct_cfo, estimate_cfo_cp};
use super::demod::{decide, demodulate};
use super::equalize::{ls_channel_estimate, refine_channel_estimate, zf_equalize, ChannelEstimate};
use super::sync::{frame_sync, SyncResult, DEFAULT_SYNC_THRESHOLD};
use crate::dsp::{self, Dft};
use crate::error::{Error, Result};
use crate::txchain::{build_pilot_sequence, build_sync_sequence, BasebandSignal, Constellation, FrameLayout, SymbolIndex};

#[derive(Debug, Clone, PartialEq)]
pub struct RxConfig {
    pub layout: FrameLayout,
    pub pilot_seed: u64,
    pub sync_threshold: f64,
    /// Candidate frame starts in samples; `None` searches the whole signal.
    pub search_window: Option<Range<usize>>,
    /// Fit a short impulse response to the LS estimate instead of using the
    /// raw per-bin ratio, and remove the constant received offset.
    pub refine_channel: bool,
    /// Tap power over noise floor needed to keep a delay tap.
    pub tap_threshold: f64,
    /// Delay taps before zero allowed in the fit.
    pub early_taps: usize,
    /// Decision-directed common phase correction per data block.
    pub phase_tracking: bool,
}

impl Default for RxConfig {
    fn default() -> Self {
        RxConfig {
            layout: FrameLayout::default(),
            pilot_seed: crate::txchain::DEFAULT_PILOT_SEED,
            sync_threshold: DEFAULT_SYNC_THRESHOLD,
            search_window: None,
            refine_channel: true,
            tap_threshold: 12.0,
            early_taps: 40,
            phase_tracking: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RxDiagnostics {
    pub sync: SyncResult,
    pub cfo_estimate: f64,
    pub evm_percent: f64,
    pub snr_estimate_db: f64,
    /// Equalized data symbols in transmission order.
    pub equalized_symbols: Vec<Complex64>,
    pub channel: ChannelEstimate,
    pub dc_offset: Complex64,
}

/// Frame receiver with the pilot spectrum and DFT plans prepared once.
pub struct Receiver {
    cfg: RxConfig,
    dft: Dft,
    chips: Vec<i8>,
    pilot_freq: Vec<Complex64>,
}

impl Receiver {
    pub fn new(cfg: RxConfig) -> Result<Self> {
        let dft = Dft::new(cfg.layout.fft_len);
        let ideal = Constellation::ideal();
        let pilot: Vec<Complex64> = build_pilot_sequence(cfg.pilot_seed, cfg.layout.fft_len)
            .iter()
            .map(|&i| ideal.point(i))
            .collect();
        let pilot_freq = dft.forward(&pilot);
        let mean = pilot_freq.iter().map(|v| v.norm()).sum::<f64>() / pilot_freq.len() as f64;
        if let Some(k) = pilot_freq.iter().position(|v| v.norm() < 1e-9 * mean) {
            return Err(Error::DegeneratePilot(k));
        }
        Ok(Receiver {
            cfg,
            dft,
            chips: build_sync_sequence(),
            pilot_freq,
        })
    }

    pub fn config(&self) -> &RxConfig {
        &self.cfg
    }

    /// Receives the first frame found in the configured search window.
    pub fn receive(&self, rx: &BasebandSignal) -> Result<(Vec<u8>, RxDiagnostics)> {
        let window = self.cfg.search_window.clone().unwrap_or(0..rx.samples.len());
        self.receive_in(rx, window)
    }

    /// Receives one frame whose start lies in `window` (samples).
    pub fn receive_in(&self, rx: &BasebandSignal, window: Range<usize>) -> Result<(Vec<u8>, RxDiagnostics)> {
        let sps = rx.samples_per_symbol.max(1);
        let sync = frame_sync(&rx.samples, &self.chips, sps, window, self.cfg.sync_threshold)?;
        self.demodulate_at(&rx.samples, sps, sync)
    }

    /// Demodulates the frame starting at `sync.frame_start`.
    pub fn demodulate_at(&self, samples: &[Complex64], sps: usize, sync: SyncResult) -> Result<(Vec<u8>, RxDiagnostics)> {
        let layout = &self.cfg.layout;
        let n = layout.fft_len;
        let start = sync.frame_start;
        let end = start + layout.total_symbols() * sps;
        if end > samples.len() {
            return Err(Error::Framing(format!(
                "frame at sample {start} needs {end} samples, signal has {}",
                samples.len()
            )));
        }
        let symbols = dsp::integrate_and_dump(&samples[start..end], sps);
        let cfo_estimate = estimate_cfo_cp(&symbols, layout);
        let symbols = correct_cfo(&symbols, cfo_estimate);

        let body = |b: usize| &symbols[layout.body_start(b)..layout.body_start(b) + n];
        let y_pilot = self.dft.forward(body(0));
        let (channel, dc_offset) = if self.cfg.refine_channel {
            let r = refine_channel_estimate(
                &self.dft,
                &y_pilot,
                &self.pilot_freq,
                layout.cp_len,
                self.cfg.early_taps,
                self.cfg.tap_threshold,
            )?;
            (r.estimate, r.dc_offset)
        } else {
            (ls_channel_estimate(&y_pilot, &self.pilot_freq)?, Complex64::new(0.0, 0.0))
        };

        let ideal = Constellation::ideal();
        let mut equalized = Vec::with_capacity(layout.data_subframes * n);
        for b in 1..layout.blocks() {
            let y: Vec<Complex64> = body(b).iter().map(|v| v - dc_offset).collect();
            let mut z = zf_equalize(&self.dft, &y, &channel)?;
            if self.cfg.phase_tracking {
                track_common_phase(&mut z, &ideal);
            }
            equalized.extend(z);
        }

        let bits = demodulate(&equalized);
        let err = equalized
            .iter()
            .map(|&v| (v - ideal.point(decide(v))).norm_sqr())
            .sum::<f64>()
            / equalized.len() as f64;
        let diag = RxDiagnostics {
            sync,
            cfo_estimate,
            evm_percent: 100.0 * err.sqrt(),
            snr_estimate_db: -10.0 * err.log10(),
            equalized_symbols: equalized,
            channel,
            dc_offset,
        };
        Ok((bits, diag))
    }
}

/// Decision-directed removal of the common phase of a block. Decisions made
/// before de-rotation pull a one-shot estimate toward zero at low SNR, so the
/// estimate is repeated on the rotated block until it settles.
fn track_common_phase(z: &mut [Complex64], ideal: &Constellation) {
    for _ in 0..8 {
        let c: Complex64 = z.iter().map(|&v| v * ideal.point(decide(v)).conj()).sum();
        if c.norm() == 0.0 {
            return;
        }
        let rot = (c / c.norm()).conj();
        z.iter_mut().for_each(|v| *v *= rot);
        if rot.im.abs() < 1e-6 {
            return;
        }
    }
}

/// Receives one frame with the default receiver settings.
pub fn receive_frame(rx: &BasebandSignal, layout: &FrameLayout, pilot_seed: u64) -> Result<(Vec<u8>, RxDiagnostics)> {
    Receiver::new(RxConfig {
        layout: *layout,
        pilot_seed,
        ..Default::default()
    })?
    .receive(rx)
}

/// SNR of equalized symbols against the points they should land on;
/// `+inf` when they match exactly.
pub fn measure_snr(equalized: &[Complex64], reference: &[SymbolIndex], constellation: &Constellation) -> Result<f64> {
    if equalized.is_empty() {
        return Err(Error::domain("no symbols to measure"));
    }
    if equalized.len() != reference.len() {
        return Err(Error::domain(format!(
            "{} equalized symbols against {} references",
            equalized.len(),
            reference.len()
        )));
    }
    let (sig, err) = equalized
        .iter()
        .zip(reference)
        .fold((0.0, 0.0), |(s, e), (&z, &i)| {
            let p = constellation.point(i);
            (s + p.norm_sqr(), e + (z - p).norm_sqr())
        });
    if err == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (sig / err).log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{apply_channel, complex_noise, ChannelConfig};
    use crate::txchain::{build_frame, synthesize_baseband, DEFAULT_PILOT_SEED, DEFAULT_SYMBOL_RATE};
    use rand::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn payload(seed: u64) -> Vec<u8> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..36864).map(|_| (rng.next_u32() & 1) as u8).collect()
    }

    fn tx(bits: &[u8], sps: usize) -> BasebandSignal {
        let l = FrameLayout::default();
        let f = build_frame(bits, &l, DEFAULT_PILOT_SEED).unwrap();
        synthesize_baseband(&f, &l, &Constellation::ideal(), sps, DEFAULT_SYMBOL_RATE).unwrap()
    }

    #[test]
    fn clean_loopback() {
        let bits = payload(1);
        let (out, d) = receive_frame(&tx(&bits, 1), &FrameLayout::default(), DEFAULT_PILOT_SEED).unwrap();
        assert_eq!(out, bits);
        assert!(d.evm_percent < 0.01);
        assert_eq!(d.sync.frame_start, 0);
    }

    #[test]
    fn gain_and_rotation_absorbed() {
        let bits = payload(2);
        let cfg = ChannelConfig {
            complex_gain: Complex64::from_polar(0.5, std::f64::consts::FRAC_PI_4),
            timing_offset: 137,
            ..Default::default()
        };
        let y = apply_channel(&tx(&bits, 1), &cfg).unwrap();
        let (out, d) = receive_frame(&y, &FrameLayout::default(), DEFAULT_PILOT_SEED).unwrap();
        assert_eq!(d.sync.frame_start, 137);
        assert_eq!(out, bits);
    }

    #[test]
    fn impaired_noiseless_oversampled() {
        let bits = payload(3);
        let cfg = ChannelConfig {
            cfo_normalized: -0.37,
            timing_offset: 61,
            fir_taps: vec![Complex64::new(1.0, 0.0), Complex64::new(0.3, 0.3), Complex64::new(0.0, -0.2)],
            ..Default::default()
        };
        let y = apply_channel(&tx(&bits, 4), &cfg).unwrap();
        let (out, d) = receive_frame(&y, &FrameLayout::default(), DEFAULT_PILOT_SEED).unwrap();
        assert_eq!(out, bits);
        // ISI from the sync tail into the first CP biases the estimate slightly.
        assert!((d.cfo_estimate + 0.37).abs() < 1e-4, "{}", d.cfo_estimate);
    }

    #[test]
    fn static_offset_is_removed() {
        let bits = payload(4);
        let mut x = tx(&bits, 1);
        let dc = Complex64::new(0.4, 0.2);
        x.samples.iter_mut().for_each(|v| *v = *v * 0.5 + dc);
        let (out, d) = receive_frame(&x, &FrameLayout::default(), DEFAULT_PILOT_SEED).unwrap();
        assert_eq!(out, bits);
        assert!(d.evm_percent < 1e-6);
    }

    #[test]
    fn raw_ls_still_works_noiseless() {
        let bits = payload(5);
        let rx = Receiver::new(RxConfig { refine_channel: false, phase_tracking: false, ..Default::default() }).unwrap();
        let (out, _) = rx.receive(&tx(&bits, 1)).unwrap();
        assert_eq!(out, bits);
    }

    #[test]
    fn short_signal_is_a_framing_error() {
        let bits = payload(6);
        let x = tx(&bits, 1);
        let cut = BasebandSignal { samples: x.samples[..20000].to_vec(), ..x };
        assert!(matches!(receive_frame(&cut, &FrameLayout::default(), 0), Err(Error::Framing(_))));
    }

    #[test]
    fn measure_snr_examples() {
        let c = Constellation::ideal();
        let refs: Vec<SymbolIndex> = (0..100_000).map(|i| ((i * 7 + i / 13) % 4) as u8).collect();
        let exact: Vec<Complex64> = refs.iter().map(|&i| c.point(i)).collect();
        assert_eq!(measure_snr(&exact, &refs, &c).unwrap(), f64::INFINITY);
        let noisy: Vec<Complex64> = exact.iter().zip(complex_noise(refs.len(), 0.1, 5)).map(|(a, b)| a + b).collect();
        assert!((measure_snr(&noisy, &refs, &c).unwrap() - 10.0).abs() < 0.2);
        assert!(measure_snr(&[], &[], &c).is_err());
    }
}
