use std::f64::consts::PI;

use num_complex::Complex64;

use crate::channel::CFO_BLOCK_LEN;
use crate::txchain::FrameLayout;

/// CP-based ML estimate of the normalized carrier offset. `frame` starts at
/// the first sync symbol and is sampled at the symbol rate. The correlation
/// of each CP with the tail of its block is accumulated over every block
/// present in `frame`.
pub fn estimate_cfo_cp(frame: &[Complex64], layout: &FrameLayout) -> f64 {
    let n = layout.fft_len;
    let mut acc = Complex64::new(0.0, 0.0);
    for b in 0..layout.blocks() {
        let cp = layout.cp_start(b);
        if cp + layout.cp_len + n > frame.len() {
            break;
        }
        acc += (cp..cp + layout.cp_len)
            .map(|i| frame[i].conj() * frame[i + n])
            .sum::<Complex64>();
    }
    acc.arg() / (2.0 * PI)
}

/// Removes a carrier offset: sample `n` is rotated by `-2π·eps·n/2048`.
pub fn correct_cfo(samples: &[Complex64], eps: f64) -> Vec<Complex64> {
    let step = -2.0 * PI * eps / CFO_BLOCK_LEN as f64;
    samples
        .iter()
        .enumerate()
        .map(|(n, &s)| s * Complex64::from_polar(1.0, step * n as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{apply_channel, ChannelConfig};
    use crate::txchain::{build_frame, synthesize_baseband, Constellation, DEFAULT_PILOT_SEED, DEFAULT_SYMBOL_RATE};

    fn tx() -> crate::txchain::BasebandSignal {
        let l = FrameLayout::default();
        let payload: Vec<u8> = (0..l.payload_bits()).map(|i| ((i / 3 + i / 11) % 2) as u8).collect();
        let f = build_frame(&payload, &l, DEFAULT_PILOT_SEED).unwrap();
        synthesize_baseband(&f, &l, &Constellation::ideal(), 1, DEFAULT_SYMBOL_RATE).unwrap()
    }

    #[test]
    fn noiseless_estimates() {
        let x = tx();
        let l = FrameLayout::default();
        assert!(estimate_cfo_cp(&x.samples, &l).abs() < 1e-12);
        for eps in [0.05, -0.3, 0.45] {
            let y = apply_channel(&x, &ChannelConfig { cfo_normalized: eps, ..Default::default() }).unwrap();
            assert!((estimate_cfo_cp(&y.samples, &l) - eps).abs() < 1e-9);
        }
    }

    #[test]
    fn correction_inverts_channel() {
        let x = tx();
        let y = apply_channel(&x, &ChannelConfig { cfo_normalized: 0.17, ..Default::default() }).unwrap();
        let z = correct_cfo(&y.samples, 0.17);
        let dev = x.samples.iter().zip(&z).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(dev < 1e-12);
        assert_eq!(correct_cfo(&x.samples, 0.0), x.samples);
        let twice = correct_cfo(&correct_cfo(&y.samples, 0.1), 0.1);
        let once = correct_cfo(&y.samples, 0.2);
        assert!(twice.iter().zip(&once).all(|(a, b)| (a - b).norm() < 1e-12));
    }
}
