use num_complex::Complex64;

use crate::txchain::{bits_for_index, SymbolIndex};

/// Nearest ideal QPSK point (45°, 135°, 225°, 315°); ties go to the lower
/// index.
pub fn decide(z: Complex64) -> SymbolIndex {
    if z.im >= 0.0 {
        if z.re >= 0.0 { 0 } else { 1 }
    } else if z.re > 0.0 {
        3
    } else {
        2
    }
}

pub fn demodulate(symbols: &[Complex64]) -> Vec<u8> {
    symbols.iter().flat_map(|&z| bits_for_index(decide(z))).collect()
}
