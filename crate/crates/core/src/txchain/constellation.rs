use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use crate::circuit::GammaLut;
use crate::error::{Error, Result};

/// Index of a constellation point: 0..=3 for P1..P4.
pub type SymbolIndex = u8;

/// Gray labels of P1..P4: 00, 01, 11, 10.
const LABELS: [[u8; 2]; 4] = [[0, 0], [0, 1], [1, 1], [1, 0]];

pub fn bits_for_index(idx: SymbolIndex) -> [u8; 2] {
    LABELS[idx as usize]
}

pub fn index_for_bits(b0: u8, b1: u8) -> SymbolIndex {
    match (b0, b1) {
        (0, 0) => 0,
        (0, 1) => 1,
        (1, 1) => 2,
        _ => 3,
    }
}

/// Maps consecutive bit pairs to P1..P4 indices.
pub fn map_bits_to_symbols(bits: &[u8]) -> Result<Vec<SymbolIndex>> {
    if bits.len() % 2 != 0 {
        return Err(Error::Framing(format!("odd bit count {}", bits.len())));
    }
    if let Some(pos) = bits.iter().position(|&b| b > 1) {
        return Err(Error::Framing(format!("value {} at position {pos} is not a bit", bits[pos])));
    }
    Ok(bits.chunks_exact(2).map(|p| index_for_bits(p[0], p[1])).collect())
}

pub fn symbols_to_bits(indices: &[SymbolIndex]) -> Vec<u8> {
    indices.iter().flat_map(|&i| bits_for_index(i)).collect()
}

/// Four complex reflection states P1..P4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constellation {
    points: [Complex64; 4],
}

impl Constellation {
    pub fn new(points: [Complex64; 4]) -> Result<Self> {
        for i in 0..4 {
            if !points[i].re.is_finite() || !points[i].im.is_finite() {
                return Err(Error::domain("constellation point is not finite"));
            }
            for j in i + 1..4 {
                if points[i] == points[j] {
                    return Err(Error::domain(format!("constellation points P{} and P{} coincide", i + 1, j + 1)));
                }
            }
        }
        Ok(Constellation { points })
    }

    /// Unit-magnitude QPSK with P1 at 45° and 90° steps.
    pub fn ideal() -> Self {
        let points = [0, 1, 2, 3].map(|k| Complex64::from_polar(1.0, FRAC_PI_4 * (2 * k + 1) as f64));
        Constellation { points }
    }

    pub fn points(&self) -> &[Complex64; 4] {
        &self.points
    }

    pub fn point(&self, idx: SymbolIndex) -> Complex64 {
        self.points[idx as usize]
    }

    pub fn mean_power(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / 4.0
    }

    /// Scale factor that brings the mean power to one.
    pub fn normalization_scale(&self) -> f64 {
        1.0 / self.mean_power().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let s = self.normalization_scale();
        Constellation {
            points: self.points.map(|p| p * s),
        }
    }

    /// Applies `f` to every point.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        Constellation::new(self.points.map(f))
    }

    pub fn mean(&self) -> Complex64 {
        self.points.iter().sum::<Complex64>() / 4.0
    }
}

/// Constellation of the metasurface when driven at the four `voltages`,
/// normalised to unit mean power.
pub fn metasurface_constellation(lut: &GammaLut, voltages: [f64; 4]) -> Result<Constellation> {
    let mut points = [Complex64::new(0.0, 0.0); 4];
    for (p, &v) in points.iter_mut().zip(&voltages) {
        *p = lut.gamma_at(v)?;
    }
    Ok(Constellation::new(points)?.normalized())
}
