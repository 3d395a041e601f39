//! Least-squares fits of `log|s[n]|` for large-`n` behavior.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seq::LogMagnitude;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square deviation of the data from the fitted line.
    pub rms_residual: f64,
    pub points: usize,
}

/// Ordinary least squares `y = slope x + intercept`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch { expected: xs.len(), got: ys.len() });
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::TooShort { min: 2, got: n });
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    Ok(LineFit { slope, intercept, rms_residual: (ss / n as f64).sqrt(), points: n })
}

/// Fit `log|s[n]| = slope log n + c` over `n_min..=n_max`.
///
/// The window must span at least a factor of two and every entry in it must
/// be nonzero.
pub fn asymptotic_exponent<S: LogMagnitude + ?Sized>(s: &S, n_min: usize, n_max: usize) -> Result<LineFit> {
    fit_window(s, n_min, n_max, None)
}

/// [`asymptotic_exponent`] restricted to indices `n ≡ parity (mod 2)`, for
/// sequences on a step-2 lattice.
pub fn parity_exponent<S: LogMagnitude + ?Sized>(s: &S, parity: usize, n_min: usize, n_max: usize) -> Result<LineFit> {
    fit_window(s, n_min, n_max, Some(parity % 2))
}

fn fit_window<S: LogMagnitude + ?Sized>(s: &S, n_min: usize, n_max: usize, parity: Option<usize>) -> Result<LineFit> {
    if n_min == 0 || n_max <= 2 * n_min {
        return Err(Error::InvalidArgument(format!(
            "fit window [{n_min}, {n_max}] must satisfy 1 <= n_min and n_max > 2 n_min"
        )));
    }
    if n_max >= s.seq_len() {
        return Err(Error::TooShort { min: n_max + 1, got: s.seq_len() });
    }
    let mut xs = Vec::with_capacity(n_max - n_min + 1);
    let mut ys = Vec::with_capacity(n_max - n_min + 1);
    for n in (n_min..=n_max).filter(|n| parity.is_none_or(|p| n % 2 == p)) {
        let l = s.ln_abs(n);
        if !l.is_finite() {
            return Err(Error::ZeroEntry { index: n });
        }
        xs.push((n as f64).ln());
        ys.push(l);
    }
    fit_line(&xs, &ys)
}
