//! Darboux partner of the free particle and its non-local potential.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{hermite_seed, kinetic_diag, kinetic_offdiag, merge_even_odd, oscillator_model, split_even_odd, Step2Operator};
use crate::darboux::{
    apply_transform, build_transform_scaled, missing_states_scaled, Direction, ScaledMissingStates, Transform,
    TransformOptions,
};
use crate::error::{Error, Result};
use crate::jacobi::JacobiOperator;
use crate::models::free_particle_coeffs;
use crate::seq::{ScaledSeq, Seq, SeqKind};

/// `V = h1 - h0` on the step-2 lattice:
/// `⟨k|V|n⟩ = d[n] δ(k, n-2) + d[n+2] δ(k, n+2) + r[n] δ(k, n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlocalPotential {
    pub d: Vec<f64>,
    pub r: Vec<f64>,
    pub lambda: f64,
}

impl NonlocalPotential {
    pub fn n_sites(&self) -> usize {
        self.d.len()
    }

    pub fn matrix_element(&self, k: usize, n: usize) -> f64 {
        let len = self.n_sites();
        if k >= len || n >= len {
            0.0
        } else if k == n {
            self.r[n]
        } else if k + 2 == n {
            self.d[n]
        } else if n + 2 == k {
            self.d[k]
        } else {
            0.0
        }
    }

    /// `h0 + V` as a step-2 operator.
    pub fn hamiltonian(&self) -> Result<Step2Operator> {
        let a2 = self.d.iter().enumerate().map(|(n, d)| kinetic_offdiag(n) + d).collect();
        let q2 = self.r.iter().enumerate().map(|(n, r)| kinetic_diag(n) + r).collect();
        Step2Operator::new(format!("free particle partner (lambda = {})", self.lambda), a2, q2)
    }
}

/// Merge the transformed even and odd chains and subtract the free kinetic
/// coefficients. Off-diagonals enter as `|ã|`, i.e. in the positive gauge.
pub fn nonlocal_potential(h1_even: &JacobiOperator, h1_odd: &JacobiOperator, lambda: f64) -> Result<NonlocalPotential> {
    let (ne, no) = (h1_even.n_sites(), h1_odd.n_sites());
    if ne != no && ne != no + 1 {
        return Err(Error::LengthMismatch { expected: ne, got: no });
    }
    let len = ne + no;
    let mut d = Vec::with_capacity(len);
    let mut r = Vec::with_capacity(len);
    for n in 0..len {
        let chain = if n % 2 == 0 { h1_even } else { h1_odd };
        let m = n / 2;
        d.push(chain.a()[m].abs() - kinetic_offdiag(n));
        r.push(chain.q()[m] - kinetic_diag(n));
    }
    Ok(NonlocalPotential { d, r, lambda })
}

/// One parity chain of the model, built with [`PADDING`] extra sites so the
/// reported coefficients are unaffected by truncation.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainTransform {
    pub h0: JacobiOperator,
    pub seed: ScaledSeq,
    /// Positive gauge.
    pub transform: Transform,
    pub n_sites: usize,
}

pub const PADDING: usize = 2;

impl ChainTransform {
    fn build(h0_padded: JacobiOperator, seed: ScaledSeq, n_sites: usize, opts: &TransformOptions) -> Result<Self> {
        let transform = build_transform_scaled(&h0_padded, &seed, opts)?.into_positive_gauge()?;
        Ok(Self { h0: h0_padded, seed, transform, n_sites })
    }

    pub fn h0(&self) -> Result<JacobiOperator> {
        self.h0.truncated(self.n_sites)
    }

    pub fn h1(&self) -> Result<JacobiOperator> {
        self.transform.transformed.truncated(self.n_sites)
    }

    pub fn missing_states(&self, w0: f64) -> Result<ScaledMissingStates> {
        let ms = missing_states_scaled(&self.h0, &self.transform.darboux, Complex64::new(0.0, 0.0), w0)?;
        Ok(ScaledMissingStates { eta: ms.eta.truncated(self.n_sites), eta_hat: ms.eta_hat.truncated(self.n_sites) })
    }
}

/// Free particle `p²` in the oscillator basis, transformed chain by chain
/// with the Hermite seed at `λ < 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeParticleModel {
    pub lambda: f64,
    pub n_sites: usize,
    pub lattice: Step2Operator,
    pub even: ChainTransform,
    pub odd: ChainTransform,
    pub potential: NonlocalPotential,
}

impl FreeParticleModel {
    pub fn build(lambda: f64, n_sites: usize, opts: &TransformOptions) -> Result<Self> {
        if n_sites < 4 {
            return Err(Error::TooShort { min: 4, got: n_sites });
        }
        let padded = n_sites + 2 * PADDING;
        let (even_h0, odd_h0) = split_even_odd(&oscillator_model(padded)?)?;
        let seed = hermite_seed(lambda, padded)?;
        let even = ChainTransform::build(even_h0, seed.restrict_parity(0), n_sites.div_ceil(2), opts)?;
        let odd = ChainTransform::build(odd_h0, seed.restrict_parity(1), n_sites / 2, opts)?;
        let potential = nonlocal_potential(&even.h1()?, &odd.h1()?, lambda)?;
        Ok(Self { lambda, n_sites, lattice: oscillator_model(n_sites)?, even, odd, potential })
    }

    pub fn hamiltonian(&self) -> Result<Step2Operator> {
        self.potential.hamiltonian()
    }

    /// Missing states `(η, η̂)` of both chains on the step-2 lattice
    /// (`η̂` with `η̂0/η0 = 0`).
    pub fn missing_states(&self, w0: f64) -> Result<(ScaledSeq, ScaledSeq)> {
        let e = self.even.missing_states(w0)?;
        let o = self.odd.missing_states(w0)?;
        Ok((merge_scaled(&e.eta, &o.eta), merge_scaled(&e.eta_hat, &o.eta_hat)))
    }

    /// `L ψ(E)` for the free-particle solution at `E > 0`, on the step-2 lattice.
    pub fn transformed_free_particle(&self, energy: f64) -> Result<Seq> {
        let psi = free_particle_coeffs(energy, self.n_sites + 2 * PADDING)?;
        let mut parts = Vec::with_capacity(2);
        for (parity, chain) in [(0, &self.even), (1, &self.odd)] {
            let sub: Vec<Complex64> = psi.values.iter().skip(parity).step_by(2).copied().collect();
            let mapped = apply_transform(&chain.transform.darboux, &Seq::new(sub, energy, SeqKind::Eigen), Direction::Forward)?;
            parts.push(mapped.values[..chain.n_sites].to_vec());
        }
        Ok(Seq::new(merge_even_odd(&parts[0], &parts[1]), energy, SeqKind::Eigen))
    }
}

fn merge_scaled(even: &ScaledSeq, odd: &ScaledSeq) -> ScaledSeq {
    let len = even.len() + odd.len();
    let pick = |n: usize| if n % 2 == 0 { (even, n / 2) } else { (odd, n / 2) };
    let log_abs = (0..len).map(|n| { let (s, m) = pick(n); s.log_abs(m) }).collect();
    let phase = (0..len).map(|n| { let (s, m) = pick(n); s.phase(m) }).collect();
    ScaledSeq::from_log_polar(log_abs, phase, even.energy, even.kind)
}
