use std::f64::consts::PI;

use num_complex::Complex64;

use super::constellation::{Constellation, SymbolIndex};
use super::frame::{Frame, FrameLayout};
use crate::error::{Error, Result};

/// Symbol (control-signal update) rate of the reference system.
pub const DEFAULT_SYMBOL_RATE: f64 = 1.25e6;

#[derive(Debug, Clone, PartialEq)]
pub struct BasebandSignal {
    pub samples: Vec<Complex64>,
    pub sample_rate: f64,
    pub samples_per_symbol: usize,
}

impl BasebandSignal {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Holds each symbol's constellation point for `sps` samples.
pub fn synthesize_symbols(
    indices: &[SymbolIndex],
    constellation: &Constellation,
    sps: usize,
    symbol_rate: f64,
) -> BasebandSignal {
    let mut samples = Vec::with_capacity(indices.len() * sps);
    for &i in indices {
        let p = constellation.point(i);
        samples.extend(std::iter::repeat_n(p, sps));
    }
    BasebandSignal {
        samples,
        sample_rate: symbol_rate * sps as f64,
        samples_per_symbol: sps,
    }
}

/// Reflection sequence of one frame with a rectangular hold of `sps`
/// samples per symbol.
pub fn synthesize_baseband(
    frame: &Frame,
    layout: &FrameLayout,
    constellation: &Constellation,
    sps: usize,
    symbol_rate: f64,
) -> Result<BasebandSignal> {
    if sps == 0 {
        return Err(Error::domain("samples per symbol must be >= 1"));
    }
    Ok(synthesize_symbols(&frame.serialize(layout), constellation, sps, symbol_rate))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassbandConfig {
    pub carrier_hz: f64,
    pub sample_rate_hz: f64,
    pub samples_per_symbol: usize,
    pub amplitude: f64,
    pub phase0: f64,
}

impl Default for PassbandConfig {
    fn default() -> Self {
        // Desk-scale carrier: 50 kHz sampled at 1 MHz.
        PassbandConfig {
            carrier_hz: 50e3,
            sample_rate_hz: 1e6,
            samples_per_symbol: 8,
            amplitude: 1.0,
            phase0: 0.0,
        }
    }
}

/// Reflected field `Re{Γ(t) · A·e^{j(2π f_c t + φ0)}}` for a sampled
/// reflection sequence.
pub fn modulate_carrier(gamma: &BasebandSignal, carrier_hz: f64, amplitude: f64, phase0: f64) -> Result<Vec<f64>> {
    if !(gamma.sample_rate > 4.0 * carrier_hz) {
        return Err(Error::domain(format!(
            "carrier {carrier_hz} Hz aliases at sample rate {} Hz (needs > 4x)",
            gamma.sample_rate
        )));
    }
    let step = 2.0 * PI * carrier_hz / gamma.sample_rate;
    Ok(gamma
        .samples
        .iter()
        .enumerate()
        .map(|(n, g)| {
            let c = Complex64::from_polar(amplitude, step * n as f64 + phase0);
            (g * c).re
        })
        .collect())
}

pub fn synthesize_passband(
    frame: &Frame,
    layout: &FrameLayout,
    constellation: &Constellation,
    cfg: &PassbandConfig,
) -> Result<Vec<f64>> {
    let symbol_rate = cfg.sample_rate_hz / cfg.samples_per_symbol as f64;
    let bb = synthesize_baseband(frame, layout, constellation, cfg.samples_per_symbol, symbol_rate)?;
    modulate_carrier(&bb, cfg.carrier_hz, cfg.amplitude, cfg.phase0)
}
