//! Worked lattice models.
//!
//! The free particle `h0 = p²` in the harmonic-oscillator basis acts as a
//! step-2 three-term relation
//!
//! ```text
//! a[n] ψ[n-2] + a[n+2] ψ[n+2] + q[n] ψ[n] = E ψ[n],   a[n] = ¼ sqrt(n(n-1)),  q[n] = n/2 + ¼
//! ```
//!
//! which decouples into an even and an odd Jacobi chain. Each chain is
//! transformed with the Hermite seed at `λ < 0`; the result is a non-local
//! potential `V = h1 - h0` that is tridiagonal (step 2) in the basis.

mod asymptotics;
mod hermite;
mod potential;

pub use asymptotics::{asymptotic_exponent, fit_line, parity_exponent, LineFit};
pub use hermite::{basis_function_grid, free_particle_coeffs, hermite_seed, synthesize, BasisValues};
pub use potential::{nonlocal_potential, ChainTransform, FreeParticleModel, NonlocalPotential, PADDING};

use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi::JacobiOperator;
use crate::seq::{ScaledSeq, Seq, SeqKind};

/// Discrete Laplacian chain: `a[n >= 1] = 1`, `q = 0`.
pub fn laplacian(n_sites: usize) -> JacobiOperator {
    let mut a = vec![1.0; n_sites];
    if let Some(first) = a.first_mut() {
        *first = 0.0;
    }
    JacobiOperator::new("laplacian", a, vec![0.0; n_sites]).expect("laplacian is valid")
}

/// Operator coupling `n` to `n ± 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step2Operator {
    pub label: String,
    a2: Vec<f64>,
    q2: Vec<f64>,
}

impl Step2Operator {
    pub fn new(label: impl Into<String>, a2: Vec<f64>, q2: Vec<f64>) -> Result<Self> {
        if a2.len() != q2.len() {
            return Err(Error::LengthMismatch { expected: a2.len(), got: q2.len() });
        }
        if a2.len() < 2 {
            return Err(Error::TooShort { min: 2, got: a2.len() });
        }
        if a2[0] != 0.0 || a2[1] != 0.0 {
            return Err(Error::InvalidOperator("step-2 operator needs a[0] = a[1] = 0".into()));
        }
        if a2.iter().chain(&q2).any(|v| !v.is_finite()) {
            return Err(Error::InvalidOperator("non-finite coefficient".into()));
        }
        Ok(Self { label: label.into(), a2, q2 })
    }

    pub fn n_sites(&self) -> usize {
        self.a2.len()
    }

    pub fn a2(&self) -> &[f64] {
        &self.a2
    }

    pub fn q2(&self) -> &[f64] {
        &self.q2
    }

    /// `(h s)[n] = a[n] s[n-2] + a[n+2] s[n+2] + q[n] s[n]`, with `a[n] = 0` past the edge.
    pub fn apply(&self, s: &Seq) -> Result<Seq> {
        s.check_len(self.n_sites())?;
        let n_sites = self.n_sites();
        let v = &s.values;
        let out = (0..n_sites)
            .map(|n| {
                let mut acc = v[n] * self.q2[n];
                if n >= 2 {
                    acc += v[n - 2] * self.a2[n];
                }
                if n + 2 < n_sites {
                    acc += v[n + 2] * self.a2[n + 2];
                }
                acc
            })
            .collect();
        Ok(Seq::new(out, s.energy, SeqKind::Generic))
    }

    /// Scale-free residual of a nodeless scaled sequence against the step-2
    /// relation at energy `E`, over `rows` (each row needs `n + 2 < N`).
    pub fn scaled_residual(&self, s: &ScaledSeq, energy: f64, rows: Range<usize>) -> Result<f64> {
        if s.len() != self.n_sites() {
            return Err(Error::LengthMismatch { expected: self.n_sites(), got: s.len() });
        }
        let shift = |from: usize, to: usize| -> Complex64 {
            s.phase(to) * s.phase(from).conj() * (s.log_abs(to) - s.log_abs(from)).exp()
        };
        let mut worst: f64 = 0.0;
        for n in rows.filter(|&n| n + 2 < s.len()) {
            let back = if n >= 2 { shift(n, n - 2) * self.a2[n] } else { Complex64::new(0.0, 0.0) };
            let fwd = shift(n, n + 2) * self.a2[n + 2];
            let scale = back.norm() + fwd.norm() + self.q2[n].abs() + energy.abs();
            worst = worst.max((back + fwd + self.q2[n] - energy).norm() / scale);
        }
        Ok(worst)
    }
}

/// Free particle in the oscillator basis.
pub fn oscillator_model(n_sites: usize) -> Result<Step2Operator> {
    if n_sites < 4 {
        return Err(Error::TooShort { min: 4, got: n_sites });
    }
    let a2 = (0..n_sites).map(kinetic_offdiag).collect();
    let q2 = (0..n_sites).map(kinetic_diag).collect();
    Step2Operator::new("oscillator", a2, q2)
}

pub(crate) fn kinetic_offdiag(n: usize) -> f64 {
    let n = n as f64;
    0.25 * (n * (n - 1.0)).max(0.0).sqrt()
}

pub(crate) fn kinetic_diag(n: usize) -> f64 {
    n as f64 / 2.0 + 0.25
}

/// Even chain (`m -> 2m`) and odd chain (`m -> 2m + 1`).
pub fn split_even_odd(op2: &Step2Operator) -> Result<(JacobiOperator, JacobiOperator)> {
    let pick = |v: &[f64], parity: usize| -> Vec<f64> { v.iter().skip(parity).step_by(2).copied().collect() };
    let even = JacobiOperator::new(format!("{} (even)", op2.label), pick(&op2.a2, 0), pick(&op2.q2, 0))?;
    let odd = JacobiOperator::new(format!("{} (odd)", op2.label), pick(&op2.a2, 1), pick(&op2.q2, 1))?;
    Ok((even, odd))
}

/// Interleave two chain sequences back onto the step-2 lattice.
pub fn merge_even_odd(even: &[Complex64], odd: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(even.len() + odd.len());
    for m in 0..even.len().max(odd.len()) {
        if let Some(v) = even.get(m) {
            out.push(*v);
        }
        if let Some(v) = odd.get(m) {
            out.push(*v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oscillator_coefficients() {
        let op = oscillator_model(8).unwrap();
        assert!((op.a2()[2] - 2f64.sqrt() / 4.0).abs() < 1e-15);
        assert_eq!(op.q2()[0], 0.25);
        assert_eq!(op.a2()[1], 0.0);
        assert!(oscillator_model(3).is_err());
    }

    #[test]
    fn split_into_chains() {
        let op = oscillator_model(8).unwrap();
        let (even, odd) = split_even_odd(&op).unwrap();
        let expect_a = [0.0, 2f64.sqrt() / 4.0, 12f64.sqrt() / 4.0, 30f64.sqrt() / 4.0];
        for (x, e) in even.a().iter().zip(expect_a) {
            assert!((x - e).abs() < 1e-15);
        }
        assert_eq!(even.q(), &[0.25, 1.25, 2.25, 3.25]);
        assert_eq!(odd.q()[0], 0.75);
        assert_eq!(odd.a()[0], 0.0);
    }

    #[test]
    fn diagonal_step2_operator_splits_into_diagonal_chains() {
        let op = Step2Operator::new("diag", vec![0.0; 6], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let (even, odd) = split_even_odd(&op).unwrap();
        assert!(even.a().iter().chain(odd.a()).all(|&v| v == 0.0));
        assert_eq!(odd.q(), &[2.0, 4.0, 6.0]);
    }

    #[test]
    fn merge_round_trip() {
        let e: Vec<Complex64> = (0..3).map(|k| Complex64::new(2.0 * k as f64, 0.0)).collect();
        let o: Vec<Complex64> = (0..2).map(|k| Complex64::new(2.0 * k as f64 + 1.0, 0.0)).collect();
        let m = merge_even_odd(&e, &o);
        assert_eq!(m.iter().map(|v| v.re).collect::<Vec<_>>(), vec![0.0, 1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn step2_validation() {
        assert!(Step2Operator::new("x", vec![0.0, 0.1, 1.0], vec![0.0; 3]).is_err());
    }
}
