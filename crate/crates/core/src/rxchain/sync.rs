use std::ops::Range;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_SYNC_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncResult {
    pub frame_start: usize,
    pub peak_metric: f64,
    pub threshold_passed: bool,
}

/// Normalized replica correlation for every lag in `window`.
///
/// Each chip spans `sps` samples. The received window is mean-removed before
/// correlating, so a constant offset (static reflection, non-antipodal sync
/// states) does not bias the metric, which lies in `[0, 1]` and reaches 1 for
/// a noiseless, undistorted replica.
pub fn sync_metrics(samples: &[Complex64], chips: &[i8], sps: usize, window: Range<usize>) -> Vec<f64> {
    let span = chips.len() * sps;
    if samples.len() < span {
        return Vec::new();
    }
    let last = samples.len() - span;
    let window = window.start..window.end.min(last + 1);
    if window.is_empty() {
        return Vec::new();
    }

    let mut prefix = Vec::with_capacity(samples.len() + 1);
    prefix.push(Complex64::new(0.0, 0.0));
    let mut acc = Complex64::new(0.0, 0.0);
    for &s in samples {
        acc += s;
        prefix.push(acc);
    }

    let m = chips.len() as f64;
    let chip_mean = chips.iter().map(|&c| c as f64).sum::<f64>() / m;
    let chip_energy: f64 = chips.iter().map(|&c| (c as f64 - chip_mean).powi(2)).sum();

    window
        .map(|d| {
            let mean_chip = (prefix[d + span] - prefix[d]) / m;
            let mut corr = Complex64::new(0.0, 0.0);
            let mut energy = 0.0;
            for (k, &c) in chips.iter().enumerate() {
                let s = prefix[d + (k + 1) * sps] - prefix[d + k * sps] - mean_chip;
                corr += s * c as f64;
                energy += s.norm_sqr();
            }
            let den = (chip_energy * energy).sqrt();
            if den > 0.0 { corr.norm() / den } else { 0.0 }
        })
        .collect()
}

/// Locates the frame start as the first lag of maximum replica correlation.
pub fn frame_sync(
    samples: &[Complex64],
    chips: &[i8],
    sps: usize,
    window: Range<usize>,
    threshold: f64,
) -> Result<SyncResult> {
    let metrics = sync_metrics(samples, chips, sps, window.clone());
    let Some((best, peak)) = metrics
        .iter()
        .enumerate()
        .fold(None, |acc: Option<(usize, f64)>, (i, &v)| match acc {
            Some((_, b)) if b >= v => acc,
            _ => Some((i, v)),
        })
    else {
        return Err(Error::Framing(format!(
            "search window {window:?} too short for a {}-chip sync at {sps} samples per chip",
            chips.len()
        )));
    };
    if peak < threshold {
        return Err(Error::SyncNotFound {
            best_metric: peak,
            threshold,
        });
    }
    Ok(SyncResult {
        frame_start: window.start + best,
        peak_metric: peak,
        threshold_passed: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::txchain::build_sync_sequence;

    fn chips_signal(offset: usize, sps: usize, tail: usize, rot: Complex64, dc: Complex64) -> Vec<Complex64> {
        let chips = build_sync_sequence();
        let mut x = vec![dc; offset];
        for &c in &chips {
            for _ in 0..sps {
                x.push(rot * c as f64 + dc);
            }
        }
        x.extend(std::iter::repeat_n(dc, tail));
        x
    }

    #[test]
    fn finds_offset_noiseless() {
        let chips = build_sync_sequence();
        for (offset, sps) in [(0, 1), (137, 1), (61, 8)] {
            let x = chips_signal(offset, sps, 300, Complex64::new(0.0, 0.5), Complex64::new(0.0, 0.0));
            let r = frame_sync(&x, &chips, sps, 0..x.len(), 0.5).unwrap();
            assert_eq!(r.frame_start, offset);
            assert!((r.peak_metric - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn insensitive_to_dc() {
        let chips = build_sync_sequence();
        let x = chips_signal(40, 1, 100, Complex64::new(0.7, 0.1), Complex64::new(3.0, -2.0));
        let r = frame_sync(&x, &chips, 1, 0..200, 0.5).unwrap();
        assert_eq!(r.frame_start, 40);
        assert!(r.peak_metric > 0.999);
    }

    #[test]
    fn metric_bounded() {
        let chips = build_sync_sequence();
        let x = chips_signal(10, 2, 200, Complex64::new(1.0, 1.0), Complex64::new(0.2, 0.0));
        let m = sync_metrics(&x, &chips, 2, 0..x.len());
        assert!(m.iter().all(|&v| (0.0..=1.0 + 1e-12).contains(&v)));
    }

    #[test]
    fn errors() {
        let chips = build_sync_sequence();
        let zeros = vec![Complex64::new(0.0, 0.0); 1000];
        assert!(matches!(frame_sync(&zeros, &chips, 1, 0..500, 0.5), Err(Error::SyncNotFound { .. })));
        assert!(matches!(frame_sync(&zeros[..100], &chips, 1, 0..100, 0.5), Err(Error::Framing(_))));
    }
}
