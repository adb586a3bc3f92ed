//! Link impairments applied to a baseband reflection sequence.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::txchain::BasebandSignal;

/// Block length over which `cfo_normalized` is expressed.
pub const CFO_BLOCK_LEN: usize = 2048;

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    /// Es/N0 in dB at one sample per symbol; `f64::INFINITY` disables noise.
    pub snr_db: f64,
    /// Carrier offset in cycles per 2048-symbol block.
    pub cfo_normalized: f64,
    pub timing_offset: usize,
    pub complex_gain: Complex64,
    pub fir_taps: Vec<Complex64>,
    pub seed: u64,
    /// Symbol power the SNR refers to. The fully activated surface with a
    /// normalized constellation transmits unit power.
    pub reference_power: f64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            snr_db: f64::INFINITY,
            cfo_normalized: 0.0,
            timing_offset: 0,
            complex_gain: Complex64::new(1.0, 0.0),
            fir_taps: vec![Complex64::new(1.0, 0.0)],
            seed: 0,
            reference_power: 1.0,
        }
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfo_normalized.abs() < 0.5) {
            return Err(Error::domain(format!("|cfo| must be < 0.5, got {}", self.cfo_normalized)));
        }
        if self.fir_taps.is_empty() {
            return Err(Error::domain("FIR channel needs at least one tap"));
        }
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return Err(Error::domain(format!("invalid SNR {}", self.snr_db)));
        }
        if !(self.reference_power > 0.0) {
            return Err(Error::domain("reference power must be positive"));
        }
        Ok(())
    }
}

/// Noise power for a given SNR; zero at `+inf`.
pub fn noise_variance(snr_db: f64, signal_power: f64) -> f64 {
    if snr_db == f64::INFINITY {
        return 0.0;
    }
    signal_power / 10f64.powf(snr_db / 10.0)
}

/// Draws `len` circularly symmetric Gaussian samples of total variance `var`.
pub fn complex_noise(len: usize, var: f64, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Keep noise independent of any payload stream drawn from the same seed.
    rng.set_stream(1);
    let sigma = (var / 2.0).sqrt();
    (0..len)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im) * sigma
        })
        .collect()
}

/// Gain, FIR, timing offset, CFO and AWGN in that order. The output holds
/// `timing_offset` noise-only leading samples followed by the full
/// convolution tail.
pub fn apply_channel(sig: &BasebandSignal, cfg: &ChannelConfig) -> Result<BasebandSignal> {
    cfg.validate()?;
    let sps = sig.samples_per_symbol.max(1);
    let x = &sig.samples;
    let taps = &cfg.fir_taps;
    let conv_len = if x.is_empty() { 0 } else { x.len() + taps.len() - 1 };
    let total = cfg.timing_offset + conv_len;

    let step = 2.0 * PI * cfg.cfo_normalized / (CFO_BLOCK_LEN * sps) as f64;
    let mut y = vec![Complex64::new(0.0, 0.0); total];
    for (m, out) in y[cfg.timing_offset..].iter_mut().enumerate() {
        let lo = m.saturating_sub(x.len() - 1);
        let hi = m.min(taps.len() - 1);
        let acc: Complex64 = (lo..=hi).map(|k| taps[k] * x[m - k]).sum();
        *out = acc * cfg.complex_gain * Complex64::from_polar(1.0, step * m as f64);
    }

    let var = noise_variance(cfg.snr_db, cfg.reference_power) * sps as f64;
    if var > 0.0 {
        for (v, w) in y.iter_mut().zip(complex_noise(total, var, cfg.seed)) {
            *v += w;
        }
    }
    Ok(BasebandSignal {
        samples: y,
        sample_rate: sig.sample_rate,
        samples_per_symbol: sig.samples_per_symbol,
    })
}
