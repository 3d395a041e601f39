//! Truncated semi-infinite Jacobi operators and their three-term recurrences.
//!
//! The operator acts as
//!
//! ```text
//! (h s)[n] = a[n] s[n-1] + a[n+1] s[n+1] + q[n] s[n]
//! ```
//!
//! with `a[0] = 0` (semi-infinite lattice) and the implicit `a[N] = 0` at
//! the truncation edge. Row `N-1` is therefore truncation-affected and is
//! never part of a residual check.

use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seq::{ScaledSeq, Seq, SeqKind, MAGNITUDE_CAP};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiOperator {
    pub label: String,
    a: Vec<f64>,
    q: Vec<f64>,
}

impl JacobiOperator {
    pub fn new(label: impl Into<String>, a: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::TooShort { min: 1, got: 0 });
        }
        if a.len() != q.len() {
            return Err(Error::LengthMismatch { expected: a.len(), got: q.len() });
        }
        if a[0] != 0.0 {
            return Err(Error::InvalidOperator(format!("a[0] must be 0, got {}", a[0])));
        }
        if let Some(n) = a.iter().chain(&q).position(|v| !v.is_finite()) {
            return Err(Error::InvalidOperator(format!("non-finite coefficient at position {n}")));
        }
        Ok(Self { label: label.into(), a, q })
    }

    pub fn n_sites(&self) -> usize {
        self.a.len()
    }

    /// Off-diagonal coefficients; `a()[0] == 0`.
    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// `a[n]` with the truncation convention `a[N] = 0`.
    pub fn a_at(&self, n: usize) -> f64 {
        self.a.get(n).copied().unwrap_or(0.0)
    }

    /// The single truncation-affected row.
    pub fn boundary_row(&self) -> usize {
        self.n_sites() - 1
    }

    pub fn truncated(&self, len: usize) -> Result<Self> {
        if len == 0 || len > self.n_sites() {
            return Err(Error::InvalidArgument(format!(
                "cannot truncate {} sites to {len}",
                self.n_sites()
            )));
        }
        Self::new(self.label.clone(), self.a[..len].to_vec(), self.q[..len].to_vec())
    }

    /// Conjugation by `diag(signs)` with `signs[n] = ±1`.
    pub fn gauge(&self, signs: &[f64]) -> Result<Self> {
        if signs.len() != self.n_sites() {
            return Err(Error::LengthMismatch { expected: self.n_sites(), got: signs.len() });
        }
        let mut a = self.a.clone();
        for n in 1..a.len() {
            a[n] *= signs[n - 1] * signs[n];
        }
        Self::new(self.label.clone(), a, self.q.clone())
    }

    /// Gauge signs that make every off-diagonal non-negative.
    pub fn positive_gauge_signs(&self) -> Vec<f64> {
        let mut signs = vec![1.0; self.n_sites()];
        for n in 1..signs.len() {
            signs[n] = if self.a[n] < 0.0 { -signs[n - 1] } else { signs[n - 1] };
        }
        signs
    }

    pub fn positive_gauge(&self) -> Self {
        let a = self.a.iter().map(|v| v.abs()).collect();
        Self { label: self.label.clone(), a, q: self.q.clone() }
    }
}

/// Apply the operator; row `N-1` uses `a[N] = 0`.
pub fn apply_jacobi(op: &JacobiOperator, s: &Seq) -> Result<Seq> {
    s.check_len(op.n_sites())?;
    let n_sites = op.n_sites();
    let v = &s.values;
    let out = (0..n_sites)
        .map(|n| {
            let mut acc = v[n] * op.q[n];
            if n > 0 {
                acc += v[n - 1] * op.a[n];
            }
            if n + 1 < n_sites {
                acc += v[n + 1] * op.a[n + 1];
            }
            acc
        })
        .collect();
    Ok(Seq::new(out, s.energy, SeqKind::Generic))
}

/// `max_{n in rows} |(h s)[n] - E s[n]| / max|s|`.
pub fn eigen_residual(op: &JacobiOperator, s: &Seq, energy: f64, rows: Range<usize>) -> Result<f64> {
    let hs = apply_jacobi(op, s)?;
    let scale = s.max_abs();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let worst = rows
        .filter(|&n| n < s.len())
        .map(|n| (hs.values[n] - s.values[n] * energy).norm())
        .fold(0.0, f64::max);
    Ok(worst / scale)
}

/// Scale-free per-row residual of a nodeless scaled sequence:
/// `|a[n]/r[n-1] + a[n+1] r[n] + q[n] - E|` divided by the sum of the
/// magnitudes of its terms, with `r[n] = s[n+1]/s[n]`.
pub fn scaled_eigen_residual(
    op: &JacobiOperator,
    s: &ScaledSeq,
    energy: f64,
    rows: Range<usize>,
) -> Result<f64> {
    if s.len() != op.n_sites() {
        return Err(Error::LengthMismatch { expected: op.n_sites(), got: s.len() });
    }
    if let Some(index) = s.first_zero() {
        return Err(Error::ZeroEntry { index });
    }
    let mut worst: f64 = 0.0;
    for n in rows.filter(|&n| n + 1 < s.len()) {
        let back = if n > 0 { op.a[n] / s.ratio(n - 1) } else { Complex64::new(0.0, 0.0) };
        let fwd = s.ratio(n) * op.a[n + 1];
        let diag = op.q[n] - energy;
        let scale = back.norm() + fwd.norm() + op.q[n].abs() + energy.abs();
        if scale > 0.0 {
            worst = worst.max((back + fwd + diag).norm() / scale);
        }
    }
    Ok(worst)
}

/// How the first two values of a recurrence solution are fixed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RecurrenceMode {
    /// Row 0 (where `a[0] = 0`) fixes `s[1]`.
    Physical,
    /// Caller supplies `s[1]`; row 0 is generally violated.
    General(Complex64),
}

/// Forward three-term recursion at energy `E` with `s[0] = psi0`.
///
/// Fails with [`Error::Overflow`] once `|s[n]|` passes [`MAGNITUDE_CAP`];
/// use [`solve_recurrence_scaled`] for such solutions.
pub fn solve_recurrence(
    op: &JacobiOperator,
    energy: f64,
    psi0: Complex64,
    mode: RecurrenceMode,
) -> Result<Seq> {
    let n_sites = op.n_sites();
    let mut s = Vec::with_capacity(n_sites);
    s.push(psi0);
    if n_sites > 1 {
        let s1 = match mode {
            RecurrenceMode::Physical => {
                if op.a[1] == 0.0 {
                    return Err(Error::RecursionBreakdown { index: 1 });
                }
                psi0 * (energy - op.q[0]) / op.a[1]
            }
            RecurrenceMode::General(psi1) => psi1,
        };
        s.push(s1);
    }
    for n in 1..n_sites.saturating_sub(1) {
        if op.a[n + 1] == 0.0 {
            return Err(Error::RecursionBreakdown { index: n + 1 });
        }
        let next = (s[n] * (energy - op.q[n]) - s[n - 1] * op.a[n]) / op.a[n + 1];
        if next.norm() > MAGNITUDE_CAP {
            return Err(Error::Overflow { index: n + 1, cap: MAGNITUDE_CAP });
        }
        s.push(next);
    }
    Ok(Seq::new(s, energy, SeqKind::Generic))
}

/// Ratio-mode recursion: propagates `r[n] = s[n+1]/s[n]` and returns the
/// solution in log-magnitude form. The solution must be nodeless.
pub fn solve_recurrence_scaled(
    op: &JacobiOperator,
    energy: f64,
    psi0: Complex64,
    mode: RecurrenceMode,
) -> Result<ScaledSeq> {
    let n_sites = op.n_sites();
    if psi0 == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroEntry { index: 0 });
    }
    let mut ratios = Vec::with_capacity(n_sites.saturating_sub(1));
    if n_sites > 1 {
        let r0 = match mode {
            RecurrenceMode::Physical => {
                if op.a[1] == 0.0 {
                    return Err(Error::RecursionBreakdown { index: 1 });
                }
                Complex64::new((energy - op.q[0]) / op.a[1], 0.0)
            }
            RecurrenceMode::General(psi1) => psi1 / psi0,
        };
        ratios.push(r0);
    }
    for n in 1..n_sites.saturating_sub(1) {
        if op.a[n + 1] == 0.0 {
            return Err(Error::RecursionBreakdown { index: n + 1 });
        }
        let prev = ratios[n - 1];
        if prev == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroEntry { index: n });
        }
        ratios.push(((energy - op.q[n]) - op.a[n] / prev) / op.a[n + 1]);
    }
    if let Some(n) = ratios.iter().position(|r| r.norm() == 0.0) {
        return Err(Error::ZeroEntry { index: n + 1 });
    }
    Ok(ScaledSeq::from_ratios(psi0, &ratios, energy, SeqKind::Generic))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SecondSolution {
    pub seq: Seq,
    /// Set when `w0 = 0`: the result is just a multiple of `psi`.
    pub degenerate: bool,
}

/// Second solution at the energy of `psi` with Wronskian `W(result, psi) = w0`.
pub fn second_solution(
    op: &JacobiOperator,
    psi: &Seq,
    w0: f64,
    psi_hat0: Complex64,
) -> Result<SecondSolution> {
    psi.check_len(op.n_sites())?;
    if let Some(index) = psi.first_zero() {
        return Err(Error::ZeroEntry { index });
    }
    if let Some(k) = (1..op.n_sites()).find(|&k| op.a[k] == 0.0) {
        return Err(Error::RecursionBreakdown { index: k });
    }
    let p = &psi.values;
    let lead = psi_hat0 / p[0];
    let mut acc = Complex64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(p.len());
    out.push(lead * p[0]);
    for n in 1..p.len() {
        acc += w0 / (p[n] * p[n - 1] * op.a[n]);
        out.push(p[n] * (lead + acc));
    }
    Ok(SecondSolution {
        seq: Seq::new(out, psi.energy, SeqKind::Generic),
        degenerate: w0 == 0.0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WronskianReport {
    /// `W[n] = a[n] (f[n] g[n-1] - f[n-1] g[n])`; entry `i` holds `n = i + 1`.
    pub values: Vec<Complex64>,
    /// Same energy: `max_n |W[n] - W[1]| / max|W|`.
    pub constancy_defect: Option<f64>,
    /// Different energies: `max_n |W[n+1] - W[1] - (E_f - E_g) sum_{k=1..n} f[k] g[k]|`
    /// relative to the largest term involved.
    pub recursion_defect: Option<f64>,
}

impl WronskianReport {
    pub fn at(&self, n: usize) -> Complex64 {
        self.values[n - 1]
    }
}

pub fn wronskians(op: &JacobiOperator, f: &Seq, g: &Seq) -> Result<WronskianReport> {
    f.check_len(op.n_sites())?;
    g.check_len(op.n_sites())?;
    let (fv, gv) = (&f.values, &g.values);
    let values: Vec<Complex64> = (1..op.n_sites())
        .map(|n| (fv[n] * gv[n - 1] - fv[n - 1] * gv[n]) * op.a[n])
        .collect();
    let w_scale = values.iter().map(|w| w.norm()).fold(0.0, f64::max);
    let mut report = WronskianReport { values, constancy_defect: None, recursion_defect: None };
    if report.values.is_empty() {
        return Ok(report);
    }
    let w1 = report.values[0];
    if f.energy == g.energy {
        let defect = report.values.iter().map(|w| (w - w1).norm()).fold(0.0, f64::max);
        report.constancy_defect = Some(if w_scale > 0.0 { defect / w_scale } else { 0.0 });
    } else {
        let de = f.energy - g.energy;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut sum_abs = 0.0;
        let mut defect: f64 = 0.0;
        // W[n+1] is stored at index n
        for n in 1..report.values.len() {
            sum += fv[n] * gv[n];
            sum_abs += (fv[n] * gv[n]).norm();
            defect = defect.max((report.values[n] - w1 - sum * de).norm());
        }
        let scale = w_scale.max(de.abs() * sum_abs);
        report.recursion_defect = Some(if scale > 0.0 { defect / scale } else { 0.0 });
    }
    Ok(report)
}
