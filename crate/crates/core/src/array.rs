//! Whole-surface response from per-cell reflections.
//!
//! Reception is at boresight, so every cell contributes with the same
//! steering phase and the surface reduces to a weighted sum of the modulated
//! and the statically biased cells.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_ROWS: usize = 8;
pub const DEFAULT_COLS: usize = 16;

/// Activation pattern in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    rows: usize,
    cols: usize,
    cells: Vec<bool>,
}

impl Mask {
    pub fn new(rows: usize, cols: usize, cells: Vec<bool>) -> Result<Self> {
        if rows * cols != cells.len() {
            return Err(Error::domain(format!(
                "mask has {} cells, expected {rows}x{cols}",
                cells.len()
            )));
        }
        Ok(Mask { rows, cols, cells })
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        Mask {
            rows,
            cols,
            cells: vec![true; rows * cols],
        }
    }

    pub fn left_half(rows: usize, cols: usize) -> Self {
        Self::columns(rows, cols, |c| c < cols / 2)
    }

    pub fn right_half(rows: usize, cols: usize) -> Self {
        Self::columns(rows, cols, |c| c >= cols - cols / 2)
    }

    fn columns(rows: usize, cols: usize, on: impl Fn(usize) -> bool) -> Self {
        let cells = (0..rows * cols).map(|i| on(i % cols)).collect();
        Mask { rows, cols, cells }
    }

    /// Parses `full`, `left-half`, `right-half` or a row-major bit string.
    pub fn parse(literal: &str, rows: usize, cols: usize) -> Result<Self> {
        match literal.trim() {
            "full" => Ok(Self::full(rows, cols)),
            "left-half" => Ok(Self::left_half(rows, cols)),
            "right-half" => Ok(Self::right_half(rows, cols)),
            bits => {
                let cells = bits
                    .chars()
                    .map(|c| match c {
                        '1' => Ok(true),
                        '0' => Ok(false),
                        other => Err(Error::domain(format!("invalid mask character {other:?}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Mask::new(rows, cols, cells)
            }
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn active(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn total(&self) -> usize {
        self.cells.len()
    }
}

impl fmt::Display for Mask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &c in &self.cells {
            f.write_str(if c { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// The fully activated surface has unit gain.
    #[default]
    FullArrayUnity,
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "full-array-unity" => Ok(Normalization::FullArrayUnity),
            other => Err(Error::domain(format!("unknown normalization {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrayConfig {
    pub mask: Mask,
    /// Reflection of the cells that keep a frozen bias.
    pub gamma_static: Complex64,
    pub normalization: Normalization,
}

impl Default for ArrayConfig {
    fn default() -> Self {
        ArrayConfig {
            mask: Mask::full(DEFAULT_ROWS, DEFAULT_COLS),
            gamma_static: Complex64::new(0.0, 0.0),
            normalization: Normalization::FullArrayUnity,
        }
    }
}

impl ArrayConfig {
    pub fn with_mask(mask: Mask, gamma_static: Complex64) -> Self {
        ArrayConfig {
            mask,
            gamma_static,
            normalization: Normalization::FullArrayUnity,
        }
    }

    pub fn rows(&self) -> usize {
        self.mask.rows()
    }

    pub fn cols(&self) -> usize {
        self.mask.cols()
    }
}

/// Boresight response of the surface when the active cells reflect
/// `gamma_mod`.
pub fn aggregate_reflection(gamma_mod: Complex64, cfg: &ArrayConfig) -> Complex64 {
    let total = cfg.mask.total() as f64;
    let active = cfg.mask.active() as f64;
    match cfg.normalization {
        Normalization::FullArrayUnity => {
            (gamma_mod * active + cfg.gamma_static * (total - active)) / total
        }
    }
}

/// Power ratio in dB of the modulated component of `cfg_a` over `cfg_b`.
pub fn modulated_power_ratio_db(cfg_a: &ArrayConfig, cfg_b: &ArrayConfig) -> Result<f64> {
    if cfg_a.rows() != cfg_b.rows() || cfg_a.cols() != cfg_b.cols() {
        return Err(Error::domain("array configurations differ in dimensions"));
    }
    let b = cfg_b.mask.active();
    if b == 0 {
        return Err(Error::domain("reference configuration has no active cells"));
    }
    Ok(20.0 * (cfg_a.mask.active() as f64 / b as f64).log10())
}
