use num_complex::Complex64;

use crate::dsp::Dft;
use crate::error::{Error, Result};

/// Per-bin channel frequency response.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    pub h: Vec<Complex64>,
}

/// Least-squares estimate `h[k] = y[k] / x[k]`.
pub fn ls_channel_estimate(y_freq: &[Complex64], x_freq: &[Complex64]) -> Result<ChannelEstimate> {
    if y_freq.len() != x_freq.len() {
        return Err(Error::domain("pilot and received spectra differ in length"));
    }
    if let Some(k) = x_freq.iter().position(|x| x.norm() == 0.0) {
        return Err(Error::DegeneratePilot(k));
    }
    Ok(ChannelEstimate {
        h: y_freq.iter().zip(x_freq).map(|(y, x)| y / x).collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinedEstimate {
    pub estimate: ChannelEstimate,
    /// Delay taps kept in the fit, ascending modulo the block length.
    pub taps: Vec<usize>,
    /// Constant added to every received symbol (static reflection and
    /// constellation mean passed through the channel).
    pub dc_offset: Complex64,
}

/// Fits a short impulse response to the LS estimate.
///
/// Bin 0 is excluded because a constant received offset lands there. The
/// impulse response of the remaining bins is thresholded against the noise
/// floor measured outside the delay region `[0, cp_len)` and the `guard`
/// taps before zero (early timing). The kept taps are then fitted by least
/// squares to the received pilot over bins `1..N`, and the offset is
/// whatever of `y[0]` the fitted channel does not explain.
pub fn refine_channel_estimate(
    dft: &Dft,
    y_freq: &[Complex64],
    x_freq: &[Complex64],
    cp_len: usize,
    guard: usize,
    threshold: f64,
) -> Result<RefinedEstimate> {
    let n = dft.len();
    let ls = ls_channel_estimate(y_freq, x_freq)?;
    let mut h = ls.h.clone();
    h[0] = Complex64::new(0.0, 0.0);
    let t = dft.inverse(&h);

    let in_region = |l: usize| l < cp_len || l >= n - guard;
    let outside: Vec<f64> = (0..n).filter(|&l| !in_region(l)).map(|l| t[l].norm_sqr()).collect();
    let floor = if outside.is_empty() { 0.0 } else { outside.iter().sum::<f64>() / outside.len() as f64 };

    let candidates: Vec<usize> = (0..n).filter(|&l| in_region(l)).collect();
    let strongest = candidates
        .iter()
        .copied()
        .max_by(|&a, &b| t[a].norm_sqr().total_cmp(&t[b].norm_sqr()))
        .unwrap_or(0);
    let taps: Vec<usize> = candidates
        .into_iter()
        .filter(|&l| l == strongest || t[l].norm_sqr() > threshold * floor)
        .collect();

    // Least squares over bins 1..N of |y[k] - x[k]·G[k]|², G restricted to
    // the kept taps. The Gram matrix is the circular autocorrelation of the
    // pilot with bin 0 removed.
    let mut px: Vec<Complex64> = x_freq.iter().map(|x| Complex64::new(x.norm_sqr(), 0.0)).collect();
    let mut xy: Vec<Complex64> = x_freq.iter().zip(y_freq).map(|(x, y)| x.conj() * y).collect();
    px[0] = Complex64::new(0.0, 0.0);
    xy[0] = Complex64::new(0.0, 0.0);
    let acf = dft.inverse(&px);
    let xcf = dft.inverse(&xy);
    let gram: Vec<Vec<Complex64>> = taps
        .iter()
        .map(|&l| taps.iter().map(|&m| acf[(l + n - m) % n]).collect())
        .collect();
    let rhs: Vec<Complex64> = taps.iter().map(|&l| xcf[l]).collect();
    let sol = cholesky_solve(gram, rhs).ok_or(Error::SingularChannel(0))?;
    let mut g = vec![Complex64::new(0.0, 0.0); n];
    for (&l, &v) in taps.iter().zip(&sol) {
        g[l] = v;
    }
    let fitted = dft.forward(&g);
    let dc_offset = (y_freq[0] - fitted[0] * x_freq[0]) / n as f64;
    Ok(RefinedEstimate {
        estimate: ChannelEstimate { h: fitted },
        taps,
        dc_offset,
    })
}

/// Solves `A·x = b` for Hermitian positive definite `A`.
fn cholesky_solve(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = b.len();
    for j in 0..n {
        let d = a[j][j].re - (0..j).map(|k| a[j][k].norm_sqr()).sum::<f64>();
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        a[j][j] = Complex64::new(d, 0.0);
        for i in j + 1..n {
            let s: Complex64 = (0..j).map(|k| a[i][k] * a[j][k].conj()).sum();
            a[i][j] = (a[i][j] - s) / d;
        }
    }
    for i in 0..n {
        let s: Complex64 = (0..i).map(|k| a[i][k] * b[k]).sum();
        b[i] = (b[i] - s) / a[i][i];
    }
    for i in (0..n).rev() {
        let s: Complex64 = (i + 1..n).map(|k| a[k][i].conj() * b[k]).sum();
        b[i] = (b[i] - s) / a[i][i];
    }
    Some(b)
}

/// Single-carrier frequency-domain zero-forcing equalization of one
/// CP-stripped block.
pub fn zf_equalize(dft: &Dft, y_block: &[Complex64], h: &ChannelEstimate) -> Result<Vec<Complex64>> {
    if let Some(k) = h.h.iter().position(|v| v.norm() < 1e-12) {
        return Err(Error::SingularChannel(k));
    }
    let y = dft.forward(y_block);
    let eq: Vec<Complex64> = y.iter().zip(&h.h).map(|(y, h)| y / h).collect();
    Ok(dft.inverse(&eq))
}
