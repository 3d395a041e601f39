//! Hermite-type solutions of the oscillator-basis free particle.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::seq::{ScaledSeq, Seq, SeqKind};

/// Nodeless seed at `λ < 0` on the step-2 lattice, `ξ[n] = iⁿ u[n]` with
///
/// ```text
/// u[n+1] = y sqrt(2/(n+1)) u[n] + sqrt(n/(n+1)) u[n-1],   y = sqrt(2|λ|),  u[0] = 1
/// ```
///
/// Magnitudes are accumulated from the ratios `u[n+1]/u[n]`, which are all
/// positive, and the phase `iⁿ` is taken from `n mod 4`.
pub fn hermite_seed(lambda: f64, n_sites: usize) -> Result<ScaledSeq> {
    if !(lambda < 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("seed energy must be negative, got {lambda}")));
    }
    if n_sites == 0 {
        return Err(Error::TooShort { min: 1, got: 0 });
    }
    let y = (2.0 * lambda.abs()).sqrt();
    let mut log_abs = Vec::with_capacity(n_sites);
    log_abs.push(0.0);
    let mut t = y * 2f64.sqrt();
    for n in 0..n_sites - 1 {
        if n > 0 {
            let k = n as f64;
            t = y * (2.0 / (k + 1.0)).sqrt() + (k / (k + 1.0)).sqrt() / t;
        }
        let prev = log_abs[n];
        log_abs.push(prev + t.ln());
    }
    let phase = (0..n_sites).map(i_pow).collect();
    Ok(ScaledSeq::from_log_polar(log_abs, phase, lambda, SeqKind::Seed))
}

fn i_pow(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `(-i)ⁿ`
pub(crate) fn minus_i_pow(n: usize) -> Complex64 {
    i_pow(n).conj()
}

/// Oscillator-basis coefficients of the free particle at `E > 0`,
///
/// ```text
/// ψ[n] = 2 (n! 2ⁿ sqrt(2π))^(-1/2) e^(-E) Hₙ(sqrt(2E))
/// ```
///
/// evaluated with the normalized Hermite recurrence.
pub fn free_particle_coeffs(energy: f64, n_sites: usize) -> Result<Seq> {
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(Error::InvalidArgument(format!("energy must be positive, got {energy}")));
    }
    let x = (2.0 * energy).sqrt();
    let pref = 2.0 * (2.0 * PI).powf(-0.25) * (-energy).exp();
    let v = normalized_hermite(x, n_sites);
    Ok(Seq::from_real(
        &v.iter().map(|h| pref * h).collect::<Vec<_>>(),
        energy,
        SeqKind::Eigen,
    ))
}

/// `Hₙ(x) / sqrt(n! 2ⁿ)` for `n < len`.
fn normalized_hermite(x: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let (mut prev, mut cur) = (0.0, 1.0);
    for n in 0..len {
        out.push(cur);
        let k = n as f64;
        let next = x * (2.0 / (k + 1.0)).sqrt() * cur - (k / (k + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    out
}

/// Real part `φₙ(x)` of the oscillator basis functions
/// `⟨x|n⟩ = (-i)ⁿ φₙ(x)`, `φₙ(x) = (n! 2ⁿ sqrt(2π))^(-1/2) e^(-x²/4) Hₙ(x/√2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisValues {
    pub n: usize,
    pub values: Vec<f64>,
    /// `n mod 4`; the full basis function carries the phase `(-i)^phase_power`.
    pub phase_power: u8,
}

pub fn basis_function_grid(n: usize, xs: &[f64]) -> BasisValues {
    let values = xs
        .iter()
        .map(|&x| {
            let h = normalized_hermite(x / 2f64.sqrt(), n + 1);
            (2.0 * PI).powf(-0.25) * (-x * x / 4.0).exp() * h[n]
        })
        .collect();
    BasisValues { n, values, phase_power: (n % 4) as u8 }
}

/// `ψ(x) = sum_n c[n] ⟨x|n⟩` on a grid.
pub fn synthesize(coeffs: &Seq, xs: &[f64]) -> Vec<Complex64> {
    let len = coeffs.len();
    xs.iter()
        .map(|&x| {
            let gauss = (2.0 * PI).powf(-0.25) * (-x * x / 4.0).exp();
            normalized_hermite(x / 2f64.sqrt(), len)
                .iter()
                .enumerate()
                .map(|(n, h)| coeffs.values[n] * minus_i_pow(n) * (gauss * h))
                .sum()
        })
        .collect()
}
