//! Discrete Darboux transformation of a Jacobi operator.
//!
//! Given a nodeless seed `ξ` solving `h0 ξ = λ ξ`, the first-order
//! difference operator
//!
//! ```text
//! (L s)[n] = A[n+1] s[n+1] + B[n] s[n]
//!          = c[n] (ξ[n] s[n+1] - ξ[n+1] s[n]),   c[n]^2 = -A a[n+1] / (ξ[n] ξ[n+1])
//! ```
//!
//! intertwines `h0` with a new Jacobi operator `h1` (`L h0 = h1 L`), and
//! `L⁺L = |A| (h0 - λ)`, `L L⁺ = |A| (h1 - λ)` hold for any sequence when
//! consecutive `a[n] ξ[n-1] / ξ[n]` are negative (seed below the spectrum).
//!
//! `c[n]` is the principal root; the resulting branch of `A[n]` and `B[n]`
//! relative to the principal roots of their squares is kept in
//! [`DarbouxOperator::branch_a`] / [`DarbouxOperator::branch_b`].
//!
//! Truncation: `A[N]` and `ã[N-1]` need `ξ[N]`, which a length-`N` seed does
//! not have. They are taken with `a[N] = 0`, so rows `N-2` and `N-1` of every
//! transformed-side quantity are boundary rows; see [`interior_rows`].

use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi::{apply_jacobi, scaled_eigen_residual, JacobiOperator};
use crate::seq::{principal_sqrt, ScaledSeq, Seq, SeqKind};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformOptions {
    /// Integration constant `A`; must be negative.
    pub const_a: f64,
    /// Largest accepted scale-free seed residual.
    pub seed_tolerance: f64,
    /// Largest accepted relative discrepancy between the two q̃ expressions.
    pub crosscheck_tolerance: f64,
    /// Largest accepted `|Im|` of ã, q̃ relative to `max(1, |value|)`.
    pub realness_tolerance: f64,
}

impl Default for TransformOptions {
    fn default() -> Self {
        Self {
            const_a: -1.0,
            seed_tolerance: 1e-10,
            crosscheck_tolerance: 1e-8,
            realness_tolerance: 1e-10,
        }
    }
}

/// The intertwiner `L` built from a seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DarbouxOperator {
    a_coef: Vec<Complex64>,
    b_coef: Vec<Complex64>,
    const_a: f64,
    lambda: f64,
    branch_a: Vec<i8>,
    branch_b: Vec<i8>,
    seed: ScaledSeq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Adjoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformReport {
    pub seed_residual: f64,
    /// Largest relative discrepancy between the two q̃ expressions.
    pub q_tilde_crosscheck: f64,
    pub realness_defect: f64,
    pub boundary_rows: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transform {
    pub darboux: DarbouxOperator,
    pub transformed: JacobiOperator,
    pub report: TransformReport,
}

impl Transform {
    /// Re-gauge so that every `ã[n] >= 0`; `L` is adjusted row by row so the
    /// intertwining and factorization identities are unchanged.
    pub fn into_positive_gauge(self) -> Result<Self> {
        let signs = self.transformed.positive_gauge_signs();
        Ok(Self {
            transformed: self.transformed.gauge(&signs)?,
            darboux: self.darboux.regauge(&signs)?,
            report: self.report,
        })
    }
}

/// Rows on which every transformed-side identity is free of truncation effects.
pub fn interior_rows(n_sites: usize) -> Range<usize> {
    0..n_sites.saturating_sub(2)
}

impl DarbouxOperator {
    pub fn n_sites(&self) -> usize {
        self.a_coef.len()
    }

    /// `A[n]`; entry 0 is zero (`a[0] = 0`).
    pub fn a_coef(&self) -> &[Complex64] {
        &self.a_coef
    }

    /// `B[n]`; the last entry is zero (truncation).
    pub fn b_coef(&self) -> &[Complex64] {
        &self.b_coef
    }

    pub fn const_a(&self) -> f64 {
        self.const_a
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn seed(&self) -> &ScaledSeq {
        &self.seed
    }

    /// `A[n] = branch_a[n] * principal_sqrt(-A a[n] ξ[n-1] / ξ[n])`.
    pub fn branch_a(&self) -> &[i8] {
        &self.branch_a
    }

    /// `B[n] = -branch_b[n] * principal_sqrt(-A a[n+1] ξ[n+1] / ξ[n])`.
    pub fn branch_b(&self) -> &[i8] {
        &self.branch_b
    }

    /// Multiply row `n` of `L` by `signs[n]`.
    pub fn regauge(&self, signs: &[f64]) -> Result<Self> {
        let n_sites = self.n_sites();
        if signs.len() != n_sites {
            return Err(Error::LengthMismatch { expected: n_sites, got: signs.len() });
        }
        let mut out = self.clone();
        for n in 0..n_sites {
            out.b_coef[n] *= signs[n];
            if n + 1 < n_sites {
                out.a_coef[n + 1] *= signs[n];
            }
            if signs[n] < 0.0 {
                out.branch_b[n] = -out.branch_b[n];
                if n + 1 < n_sites {
                    out.branch_a[n + 1] = -out.branch_a[n + 1];
                }
            }
        }
        Ok(out)
    }

    /// Entries of [`apply_transform`] output that are truncation-affected.
    pub fn boundary_rows(&self, direction: Direction) -> Vec<usize> {
        let n = self.n_sites();
        match direction {
            Direction::Forward => vec![n - 1],
            Direction::Adjoint => vec![0, n - 1],
        }
    }
}

/// Build `L` and the transformed operator from `op` and a seed at energy
/// `seed.energy`.
pub fn build_transform(op: &JacobiOperator, seed: &Seq, opts: &TransformOptions) -> Result<Transform> {
    seed.check_len(op.n_sites())?;
    if let Some(index) = seed.first_zero() {
        return Err(Error::SeedHasNode { index });
    }
    build_transform_scaled(op, &ScaledSeq::from_seq(seed), opts)
}

/// Same as [`build_transform`] for a seed in log-magnitude form; only seed
/// ratios enter the coefficients, so arbitrarily large seeds are fine.
pub fn build_transform_scaled(
    op: &JacobiOperator,
    seed: &ScaledSeq,
    opts: &TransformOptions,
) -> Result<Transform> {
    let n_sites = op.n_sites();
    if n_sites < 3 {
        return Err(Error::TooShort { min: 3, got: n_sites });
    }
    if seed.len() != n_sites {
        return Err(Error::LengthMismatch { expected: n_sites, got: seed.len() });
    }
    if !(opts.const_a < 0.0 && opts.const_a.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "const_A must be a negative real, got {}",
            opts.const_a
        )));
    }
    if let Some(index) = seed.first_zero() {
        return Err(Error::SeedHasNode { index });
    }
    if let Some(k) = (1..n_sites).find(|&k| op.a()[k] == 0.0) {
        return Err(Error::RecursionBreakdown { index: k });
    }
    let lambda = seed.energy;
    let seed_residual = scaled_eigen_residual(op, seed, lambda, 0..n_sites - 1)?;
    if !(seed_residual <= opts.seed_tolerance) {
        return Err(Error::SeedResidual { residual: seed_residual, tolerance: opts.seed_tolerance });
    }

    let a = op.a();
    let q = op.q();
    let const_a = opts.const_a;
    let mut a_coef = vec![ZERO; n_sites];
    let mut b_coef = vec![ZERO; n_sites];
    for n in 0..n_sites - 1 {
        let coupling = -const_a * a[n + 1];
        let phase_pair = seed.phase(n) * seed.phase(n + 1);
        let u = phase_pair.conj() * coupling.signum();
        let w = principal_sqrt(u);
        let half_log_ratio = 0.5 * (seed.log_abs(n + 1) - seed.log_abs(n));
        let root = coupling.abs().sqrt();
        a_coef[n + 1] = w * seed.phase(n) * (root * (-half_log_ratio).exp());
        b_coef[n] = -w * seed.phase(n + 1) * (root * half_log_ratio.exp());
    }

    let mut branch_a = vec![1i8; n_sites];
    let mut branch_b = vec![1i8; n_sites];
    for n in 1..n_sites {
        // -A a[n] ξ[n-1]/ξ[n]
        let sq = seed.ratio(n - 1).inv() * (-const_a * a[n]);
        branch_a[n] = branch_sign(a_coef[n], principal_sqrt(sq));
    }
    for n in 0..n_sites - 1 {
        let sq = seed.ratio(n) * (-const_a * a[n + 1]);
        branch_b[n] = branch_sign(-b_coef[n], principal_sqrt(sq));
    }

    let mut a_tilde = vec![ZERO; n_sites];
    for n in 1..n_sites - 1 {
        a_tilde[n] = a_coef[n] * a[n + 1] / a_coef[n + 1];
    }

    let mut q_tilde = vec![ZERO; n_sites];
    let mut crosscheck: f64 = 0.0;
    for n in 0..n_sites {
        let back = if n > 0 { seed.ratio(n - 1).inv() * a[n] } else { ZERO };
        let fwd = if n + 1 < n_sites { seed.ratio(n).inv() * op.a_at(n + 1) } else { ZERO };
        q_tilde[n] = back - fwd + q[n];
        if n + 2 < n_sites {
            let t1 = seed.ratio(n) * a[n + 1];
            let t2 = seed.ratio(n + 1) * a[n + 2];
            let alt = -t1 + t2 + q[n + 1];
            let scale = q[n].abs() + back.norm() + fwd.norm() + q[n + 1].abs() + t1.norm() + t2.norm();
            if scale > 0.0 {
                crosscheck = crosscheck.max((q_tilde[n] - alt).norm() / scale);
            }
        }
    }
    if !(crosscheck <= opts.crosscheck_tolerance) {
        return Err(Error::CrossCheck { discrepancy: crosscheck, tolerance: opts.crosscheck_tolerance });
    }

    let realness_defect = a_tilde
        .iter()
        .chain(&q_tilde)
        .map(|v| v.im.abs() / v.norm().max(1.0))
        .fold(0.0, f64::max);
    if !(realness_defect <= opts.realness_tolerance) {
        return Err(Error::NotReal { defect: realness_defect, tolerance: opts.realness_tolerance });
    }

    let transformed = JacobiOperator::new(
        format!("{} (Darboux, lambda = {lambda})", op.label),
        a_tilde.iter().map(|v| v.re).collect(),
        q_tilde.iter().map(|v| v.re).collect(),
    )?;
    let darboux = DarbouxOperator {
        a_coef,
        b_coef,
        const_a,
        lambda,
        branch_a,
        branch_b,
        seed: seed.clone(),
    };
    Ok(Transform {
        darboux,
        transformed,
        report: TransformReport {
            seed_residual,
            q_tilde_crosscheck: crosscheck,
            realness_defect,
            boundary_rows: vec![n_sites - 2, n_sites - 1],
        },
    })
}

fn branch_sign(value: Complex64, principal: Complex64) -> i8 {
    if (value * principal.conj()).re >= 0.0 {
        1
    } else {
        -1
    }
}

/// Apply `L` (forward) or `L⁺` (adjoint).
pub fn apply_transform(l: &DarbouxOperator, s: &Seq, direction: Direction) -> Result<Seq> {
    s.check_len(l.n_sites())?;
    let n_sites = l.n_sites();
    let v = &s.values;
    let out = match direction {
        Direction::Forward => (0..n_sites)
            .map(|n| {
                let next = if n + 1 < n_sites { l.a_coef[n + 1] * v[n + 1] } else { ZERO };
                next + l.b_coef[n] * v[n]
            })
            .collect(),
        Direction::Adjoint => (0..n_sites)
            .map(|n| {
                let prev = if n > 0 { l.a_coef[n].conj() * v[n - 1] } else { ZERO };
                prev + l.b_coef[n].conj() * v[n]
            })
            .collect(),
    };
    Ok(Seq::new(out, s.energy, SeqKind::Generic))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MissingStatePair {
    pub eta: Seq,
    pub eta_hat: Seq,
    pub lambda: f64,
    pub w0: f64,
    pub eta_hat0_over_eta0: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScaledMissingStates {
    pub eta: ScaledSeq,
    pub eta_hat: ScaledSeq,
}

/// The two transformed solutions at `E = λ` that are not images of `L`.
///
/// `η[n] = -A[n+1] / (sqrt(-A) a[n+1] ξ[n])`, i.e. `[a[n+1] ξ[n] ξ[n+1]]^(-1/2)`
/// on the branch fixed by `L`, and `η̂[n] = η[n] (η̂0/η0 + w0 sum_{k=1..n} ξ[k]^2)`.
/// With this normalization `L⁺η = 0` and `L⁺η̂ = -sqrt(-A) w0 ξ` off row 0.
/// The last entry of both needs `ξ[N]` and is left at zero.
pub fn missing_states(
    op: &JacobiOperator,
    l: &DarbouxOperator,
    eta_hat0_over_eta0: Complex64,
    w0: f64,
) -> Result<MissingStatePair> {
    let scaled = missing_states_scaled(op, l, eta_hat0_over_eta0, w0)?;
    let eta = scaled.eta.to_seq()?;
    let eta_hat = scaled.eta_hat.to_seq()?;
    Ok(MissingStatePair { eta, eta_hat, lambda: l.lambda, w0, eta_hat0_over_eta0 })
}

/// Log-magnitude variant of [`missing_states`], usable far beyond the range
/// where `ξ[k]^2` overflows.
pub fn missing_states_scaled(
    op: &JacobiOperator,
    l: &DarbouxOperator,
    eta_hat0_over_eta0: Complex64,
    w0: f64,
) -> Result<ScaledMissingStates> {
    let n_sites = l.n_sites();
    if op.n_sites() != n_sites {
        return Err(Error::LengthMismatch { expected: n_sites, got: op.n_sites() });
    }
    let seed = &l.seed;
    if let Some(index) = seed.first_zero() {
        return Err(Error::SeedHasNode { index });
    }
    if let Some(k) = (1..n_sites).find(|&k| op.a()[k] == 0.0) {
        return Err(Error::ZeroEntry { index: k });
    }
    let half_log_a = 0.5 * l.const_a.abs().ln();

    let mut eta_log = vec![f64::NEG_INFINITY; n_sites];
    let mut eta_phase = vec![Complex64::new(1.0, 0.0); n_sites];
    for n in 0..n_sites - 1 {
        let a_next = l.a_coef[n + 1];
        let a_op = op.a()[n + 1];
        eta_log[n] = a_next.norm().ln() - half_log_a - a_op.abs().ln() - seed.log_abs(n);
        eta_phase[n] = -(a_next / a_next.norm()) * seed.phase(n).conj() * a_op.signum();
    }

    // S[n] = K + w0 sum_{k=1..n} ξ[k]^2 carried as T[n] = S[n] / ξ[n]^2.
    let mut hat_log = vec![f64::NEG_INFINITY; n_sites];
    let mut hat_phase = vec![Complex64::new(1.0, 0.0); n_sites];
    let xi0 = seed.phase(0) * seed.log_abs(0).exp();
    let mut t = eta_hat0_over_eta0 / (xi0 * xi0);
    for n in 0..n_sites - 1 {
        if n > 0 {
            let r = seed.ratio(n - 1);
            t = t / (r * r) + w0;
        }
        let t_abs = t.norm();
        if t_abs > 0.0 && eta_log[n].is_finite() {
            hat_log[n] = eta_log[n] + t_abs.ln() + 2.0 * seed.log_abs(n);
            hat_phase[n] = eta_phase[n] * (t / t_abs) * seed.phase(n) * seed.phase(n);
        }
    }
    Ok(ScaledMissingStates {
        eta: ScaledSeq::from_log_polar(eta_log, eta_phase, l.lambda, SeqKind::MissingState),
        eta_hat: ScaledSeq::from_log_polar(hat_log, hat_phase, l.lambda, SeqKind::MissingState),
    })
}

/// Residuals of the defining identities, each normalized by `max|s|` of the
/// probe and maximized over probes and [`interior_rows`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    /// `L h0 - h1 L`
    pub r_int: f64,
    /// `L⁺L - |A| (h0 - λ)`
    pub r_fac0: f64,
    /// `L L⁺ - |A| (h1 - λ)`
    pub r_fac1: f64,
    pub probes: usize,
    pub boundary_rows_excluded: Vec<usize>,
}

impl VerifyReport {
    /// Combine reports from disjoint probe batches.
    pub fn merge(mut self, other: &VerifyReport) -> Self {
        self.r_int = self.r_int.max(other.r_int);
        self.r_fac0 = self.r_fac0.max(other.r_fac0);
        self.r_fac1 = self.r_fac1.max(other.r_fac1);
        self.probes += other.probes;
        for r in &other.boundary_rows_excluded {
            if !self.boundary_rows_excluded.contains(r) {
                self.boundary_rows_excluded.push(*r);
            }
        }
        self.boundary_rows_excluded.sort_unstable();
        self
    }
}

pub fn verify_transform(
    h0: &JacobiOperator,
    h1: &JacobiOperator,
    l: &DarbouxOperator,
    probes: &[Seq],
) -> Result<VerifyReport> {
    let n_sites = l.n_sites();
    for op in [h0, h1] {
        if op.n_sites() != n_sites {
            return Err(Error::LengthMismatch { expected: n_sites, got: op.n_sites() });
        }
    }
    let rows = interior_rows(n_sites);
    let abs_a = l.const_a.abs();
    let lambda = l.lambda;
    let mut report = VerifyReport {
        probes: probes.len(),
        boundary_rows_excluded: (rows.end..n_sites).collect(),
        ..Default::default()
    };
    for s in probes {
        let scale = s.max_abs();
        if scale == 0.0 {
            continue;
        }
        let ls = apply_transform(l, s, Direction::Forward)?;
        let lh0 = apply_transform(l, &apply_jacobi(h0, s)?, Direction::Forward)?;
        let h1l = apply_jacobi(h1, &ls)?;
        let ldl = apply_transform(l, &ls, Direction::Adjoint)?;
        let h0s = apply_jacobi(h0, s)?;
        let lds = apply_transform(l, s, Direction::Adjoint)?;
        let lld = apply_transform(l, &lds, Direction::Forward)?;
        let h1s = apply_jacobi(h1, s)?;
        for n in rows.clone() {
            let v = s.values[n];
            report.r_int = report.r_int.max((lh0.values[n] - h1l.values[n]).norm() / scale);
            let rhs0 = (h0s.values[n] - v * lambda) * abs_a;
            report.r_fac0 = report.r_fac0.max((ldl.values[n] - rhs0).norm() / scale);
            let rhs1 = (h1s.values[n] - v * lambda) * abs_a;
            report.r_fac1 = report.r_fac1.max((lld.values[n] - rhs1).norm() / scale);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::{eigen_residual, solve_recurrence, RecurrenceMode};
    use crate::models::laplacian;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn laplacian_transform(n: usize) -> (JacobiOperator, Seq, Transform) {
        let op = laplacian(n);
        let seed = solve_recurrence(&op, -2.5, c(1.0), RecurrenceMode::Physical)
            .unwrap()
            .with_energy(-2.5, SeqKind::Seed);
        let t = build_transform(&op, &seed, &TransformOptions::default()).unwrap();
        (op, seed, t)
    }

    #[test]
    fn laplacian_hand_values() {
        let (_, _, t) = laplacian_transform(16);
        let h1 = &t.transformed;
        assert!((h1.q()[0] - 0.4).abs() < 1e-14);
        assert!((h1.q()[1] - (-0.4 + 2.5 / 5.25)).abs() < 1e-14);
        assert!((h1.a()[1].abs() - 5.25f64.sqrt() / 2.5).abs() < 1e-14);
        assert_eq!(h1.a()[0], 0.0);
        assert!(t.report.q_tilde_crosscheck < 1e-14);
    }

    #[test]
    fn coefficient_squares_match() {
        let (op, seed, t) = laplacian_transform(12);
        let l = &t.darboux;
        let xi = &seed.values;
        for n in 1..11 {
            let a2 = xi[n - 1] / xi[n] * op.a()[n];
            assert!((l.a_coef()[n] * l.a_coef()[n] - a2).norm() < 1e-13 * a2.norm());
        }
        for n in 0..11 {
            let b2 = xi[n + 1] / xi[n] * op.a()[n + 1];
            assert!((l.b_coef()[n] * l.b_coef()[n] - b2).norm() < 1e-13 * b2.norm());
        }
    }

    #[test]
    fn constant_ratio_seed_gives_uniform_coefficients() {
        // On a chain with a[n>=1] = 1, q = 0, ξ[n] = r^n solves rows n >= 1 at λ = r + 1/r;
        // row 0 needs q[0] = 1/r.
        let r = -0.5;
        let n = 10;
        let mut q = vec![0.0; n];
        q[0] = 1.0 / r;
        let mut a = vec![1.0; n];
        a[0] = 0.0;
        let op = JacobiOperator::new("shifted", a, q).unwrap();
        let seed: Vec<f64> = (0..n).map(|k| 3.0 * r.powi(k as i32)).collect();
        let seed = Seq::from_real(&seed, r + 1.0 / r, SeqKind::Seed);
        let t = build_transform(&op, &seed, &TransformOptions::default()).unwrap();
        let l = &t.darboux;
        for k in 2..n - 1 {
            assert!((l.a_coef()[k].norm() - l.a_coef()[1].norm()).abs() < 1e-14);
            assert!((l.b_coef()[k].norm() - l.b_coef()[0].norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn seed_is_annihilated() {
        let (_, seed, t) = laplacian_transform(32);
        let out = apply_transform(&t.darboux, &seed, Direction::Forward).unwrap();
        let scale = seed.max_abs();
        for n in 0..31 {
            assert!(out.values[n].norm() < 1e-12 * scale);
        }
    }

    #[test]
    fn kernel_is_one_dimensional() {
        let (_, seed, t) = laplacian_transform(20);
        let mut norms = Vec::new();
        for eps in [1e-3, 2e-3, 4e-3] {
            let mut s = seed.clone();
            s.values[7] += c(eps);
            let out = apply_transform(&t.darboux, &s, Direction::Forward).unwrap();
            let v: f64 = out.values[..19].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            norms.push(v);
        }
        assert!(norms[0] > 0.0);
        assert!((norms[1] / norms[0] - 2.0).abs() < 1e-6);
        assert!((norms[2] / norms[0] - 4.0).abs() < 1e-6);
    }

    #[test]
    fn identities_hold_on_unit_probes() {
        let (op, _, t) = laplacian_transform(64);
        let probes: Vec<Seq> = (0..64).map(|k| Seq::unit(64, k)).collect();
        let rep = verify_transform(&op, &t.transformed, &t.darboux, &probes).unwrap();
        assert!(rep.r_int < 1e-10, "{rep:?}");
        assert!(rep.r_fac0 < 1e-10, "{rep:?}");
        assert!(rep.r_fac1 < 1e-10, "{rep:?}");
        assert_eq!(rep.boundary_rows_excluded, vec![62, 63]);
    }

    #[test]
    fn seed_probe_both_sides_vanish() {
        let (op, seed, t) = laplacian_transform(24);
        let rep = verify_transform(&op, &t.transformed, &t.darboux, &[seed]).unwrap();
        assert!(rep.r_fac0 < 1e-12);
    }

    #[test]
    fn positive_gauge_preserves_identities() {
        let (op, _, t) = laplacian_transform(30);
        let g = t.into_positive_gauge().unwrap();
        assert!(g.transformed.a().iter().all(|&v| v >= 0.0));
        let probes: Vec<Seq> = (0..30).map(|k| Seq::unit(30, k)).collect();
        let rep = verify_transform(&op, &g.transformed, &g.darboux, &probes).unwrap();
        assert!(rep.r_int < 1e-10 && rep.r_fac0 < 1e-10 && rep.r_fac1 < 1e-10);
    }

    #[test]
    fn missing_states_kernel_pairings() {
        let (op, seed, t) = laplacian_transform(40);
        let ms = missing_states(&op, &t.darboux, c(0.3), 1.0).unwrap();
        let eta0 = ms.eta.values[0];
        assert!((eta0.norm() - 1.0 / 2.5f64.sqrt()).abs() < 1e-14);
        let rows = 1..38;
        assert!(eigen_residual(&t.transformed, &ms.eta, -2.5, rows.clone()).unwrap() < 1e-10);
        assert!(eigen_residual(&t.transformed, &ms.eta_hat, -2.5, rows).unwrap() < 1e-10);

        let ld_eta = apply_transform(&t.darboux, &ms.eta, Direction::Adjoint).unwrap();
        let ld_hat = apply_transform(&t.darboux, &ms.eta_hat, Direction::Adjoint).unwrap();
        for n in 1..39 {
            assert!(ld_eta.values[n].norm() < 1e-12, "n = {n}");
            let rel = (ld_hat.values[n] + seed.values[n]).norm() / seed.values[n].norm();
            assert!(rel < 1e-10, "n = {n}: {rel}");
        }
    }

    #[test]
    fn missing_state_without_wronskian_is_multiple_of_eta() {
        let (op, _, t) = laplacian_transform(20);
        let k = Complex64::new(0.7, -0.2);
        let ms = missing_states(&op, &t.darboux, k, 0.0).unwrap();
        for n in 0..19 {
            assert!((ms.eta_hat.values[n] - ms.eta.values[n] * k).norm() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_seeds() {
        let op = laplacian(8);
        let opts = TransformOptions::default();
        let mut seed = solve_recurrence(&op, -2.5, c(1.0), RecurrenceMode::Physical)
            .unwrap()
            .with_energy(-2.5, SeqKind::Seed);
        let good = seed.clone();
        seed.values[3] = c(0.0);
        assert_eq!(build_transform(&op, &seed, &opts).unwrap_err(), Error::SeedHasNode { index: 3 });
        let wrong_energy = good.clone().with_energy(-2.4, SeqKind::Seed);
        assert!(matches!(build_transform(&op, &wrong_energy, &opts), Err(Error::SeedResidual { .. })));
        let positive_a = TransformOptions { const_a: 1.0, ..opts };
        assert!(matches!(build_transform(&op, &good, &positive_a), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn general_negative_constant() {
        let op = laplacian(24);
        let seed = solve_recurrence(&op, -2.5, c(1.0), RecurrenceMode::Physical)
            .unwrap()
            .with_energy(-2.5, SeqKind::Seed);
        let opts = TransformOptions { const_a: -3.0, ..Default::default() };
        let t = build_transform(&op, &seed, &opts).unwrap();
        let probes: Vec<Seq> = (0..24).map(|k| Seq::unit(24, k)).collect();
        let rep = verify_transform(&op, &t.transformed, &t.darboux, &probes).unwrap();
        assert!(rep.r_int < 1e-10 && rep.r_fac0 < 1e-10 && rep.r_fac1 < 1e-10, "{rep:?}");
        let ms = missing_states(&op, &t.darboux, c(0.0), 1.0).unwrap();
        let ld_hat = apply_transform(&t.darboux, &ms.eta_hat, Direction::Adjoint).unwrap();
        for n in 1..22 {
            let expect = -seed.values[n] * 3f64.sqrt();
            assert!((ld_hat.values[n] - expect).norm() < 1e-10 * expect.norm());
        }
    }

    #[test]
    fn report_merge_is_max() {
        let a = VerifyReport { r_int: 1.0, r_fac0: 0.0, r_fac1: 3.0, probes: 2, boundary_rows_excluded: vec![4] };
        let b = VerifyReport { r_int: 2.0, r_fac0: 1.0, r_fac1: 0.0, probes: 1, boundary_rows_excluded: vec![3, 4] };
        let m = a.merge(&b);
        assert_eq!((m.r_int, m.r_fac0, m.r_fac1, m.probes), (2.0, 1.0, 3.0, 3));
        assert_eq!(m.boundary_rows_excluded, vec![3, 4]);
    }
}
