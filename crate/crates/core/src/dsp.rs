//! Small signal-processing helpers shared by the transmitter and receiver.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward/inverse DFT pair of a fixed length. The inverse is normalised by
/// `1/N` so that `inverse(forward(x)) == x`.
#[derive(Clone)]
pub struct Dft {
    len: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Dft {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Dft {
            len,
            fwd: planner.plan_fft_forward(len),
            inv: planner.plan_fft_inverse(len),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn forward(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.len, "DFT length mismatch");
        let mut buf = x.to_vec();
        self.fwd.process(&mut buf);
        buf
    }

    pub fn inverse(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.len, "DFT length mismatch");
        let mut buf = x.to_vec();
        self.inv.process(&mut buf);
        let scale = 1.0 / self.len as f64;
        buf.iter_mut().for_each(|v| *v *= scale);
        buf
    }
}

/// One-shot forward DFT.
pub fn fft(x: &[Complex64]) -> Vec<Complex64> {
    Dft::new(x.len()).forward(x)
}

/// One-shot normalised inverse DFT.
pub fn ifft(x: &[Complex64]) -> Vec<Complex64> {
    Dft::new(x.len()).inverse(x)
}

pub fn mean_power(x: &[Complex64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().map(|v| v.norm_sqr()).sum::<f64>() / x.len() as f64
}

/// Integrate-and-dump: averages each run of `sps` samples into one symbol.
pub fn integrate_and_dump(samples: &[Complex64], sps: usize) -> Vec<Complex64> {
    assert!(sps >= 1);
    let scale = 1.0 / sps as f64;
    samples
        .chunks_exact(sps)
        .map(|c| c.iter().sum::<Complex64>() * scale)
        .collect()
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
