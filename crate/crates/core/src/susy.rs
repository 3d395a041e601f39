//! Block superhamiltonian `H = diag(h0, h1)` with nilpotent supercharges
//!
//! ```text
//! Q = [[0, 0], [L, 0]]      Q⁺ = [[0, L⁺], [0, 0]]
//! ```
//!
//! satisfying `Q² = (Q⁺)² = 0`, `[Q, H] = [Q⁺, H] = 0` and
//! `{Q, Q⁺} = |A| (H - λ)`.

use serde::{Deserialize, Serialize};

use crate::darboux::{apply_transform, interior_rows, DarbouxOperator, Direction, Transform};
use crate::error::{Error, Result};
use crate::jacobi::{apply_jacobi, JacobiOperator};
use crate::seq::Seq;

#[derive(Clone, Debug, PartialEq)]
pub struct SuperSystem {
    pub h0: JacobiOperator,
    pub h1: JacobiOperator,
    pub l: DarbouxOperator,
    pub lambda: f64,
}

/// Two-component vector `(upper, lower)` living on `h0 ⊕ h1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperVec {
    pub upper: Seq,
    pub lower: Seq,
}

impl SuperVec {
    pub fn new(upper: Seq, lower: Seq) -> Result<Self> {
        if upper.len() != lower.len() {
            return Err(Error::LengthMismatch { expected: upper.len(), got: lower.len() });
        }
        Ok(Self { upper, lower })
    }

    pub fn zeros(len: usize) -> Self {
        Self { upper: Seq::zeros(len), lower: Seq::zeros(len) }
    }

    pub fn len(&self) -> usize {
        self.upper.len()
    }

    pub fn is_empty(&self) -> bool {
        self.upper.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.upper.max_abs().max(self.lower.max_abs())
    }

    /// All `2N` block unit vectors.
    pub fn block_units(len: usize) -> Vec<SuperVec> {
        let mut out = Vec::with_capacity(2 * len);
        for k in 0..len {
            out.push(Self { upper: Seq::unit(len, k), lower: Seq::zeros(len) });
        }
        for k in 0..len {
            out.push(Self { upper: Seq::zeros(len), lower: Seq::unit(len, k) });
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Charge {
    Q,
    QDag,
}

impl SuperSystem {
    pub fn new(h0: JacobiOperator, transform: Transform) -> Result<Self> {
        if h0.n_sites() != transform.transformed.n_sites() {
            return Err(Error::LengthMismatch {
                expected: h0.n_sites(),
                got: transform.transformed.n_sites(),
            });
        }
        let lambda = transform.darboux.lambda();
        Ok(Self { h0, h1: transform.transformed, l: transform.darboux, lambda })
    }

    pub fn n_sites(&self) -> usize {
        self.h0.n_sites()
    }

    pub fn apply_hamiltonian(&self, v: &SuperVec) -> Result<SuperVec> {
        Ok(SuperVec {
            upper: apply_jacobi(&self.h0, &v.upper)?,
            lower: apply_jacobi(&self.h1, &v.lower)?,
        })
    }
}

pub fn apply_supercharge(sys: &SuperSystem, v: &SuperVec, which: Charge) -> Result<SuperVec> {
    let n = v.len();
    match which {
        Charge::Q => Ok(SuperVec {
            upper: Seq::zeros(n),
            lower: apply_transform(&sys.l, &v.upper, Direction::Forward)?,
        }),
        Charge::QDag => Ok(SuperVec {
            upper: apply_transform(&sys.l, &v.lower, Direction::Adjoint)?,
            lower: Seq::zeros(n),
        }),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuperReport {
    /// `max(|[Q, H] v|, |[Q⁺, H] v|)`
    pub r_comm: f64,
    /// `max(|Q² v|, |(Q⁺)² v|)`; structurally zero
    pub r_nilp: f64,
    /// `|{Q, Q⁺} v - |A| (H - λ) v|`
    pub r_anti: f64,
    pub probes: usize,
    pub boundary_rows_excluded: Vec<usize>,
}

impl SuperReport {
    pub fn merge(mut self, other: &SuperReport) -> Self {
        self.r_comm = self.r_comm.max(other.r_comm);
        self.r_nilp = self.r_nilp.max(other.r_nilp);
        self.r_anti = self.r_anti.max(other.r_anti);
        self.probes += other.probes;
        self
    }
}

/// Interior-row residuals of the superalgebra, normalized by probe magnitude.
pub fn superalgebra_check(sys: &SuperSystem, probes: &[SuperVec]) -> Result<SuperReport> {
    let n_sites = sys.n_sites();
    let rows = interior_rows(n_sites);
    let abs_a = sys.l.const_a().abs();
    let mut report = SuperReport {
        probes: probes.len(),
        boundary_rows_excluded: (rows.end..n_sites).collect(),
        ..Default::default()
    };
    let block_max = |a: &SuperVec, b: Option<&SuperVec>, rows: &std::ops::Range<usize>| -> f64 {
        let mut m: f64 = 0.0;
        for n in rows.clone() {
            let (du, dl) = match b {
                Some(b) => (a.upper.values[n] - b.upper.values[n], a.lower.values[n] - b.lower.values[n]),
                None => (a.upper.values[n], a.lower.values[n]),
            };
            m = m.max(du.norm()).max(dl.norm());
        }
        m
    };
    for v in probes {
        if v.len() != n_sites {
            return Err(Error::LengthMismatch { expected: n_sites, got: v.len() });
        }
        let scale = v.max_abs();
        if scale == 0.0 {
            continue;
        }
        let qv = apply_supercharge(sys, v, Charge::Q)?;
        let qdv = apply_supercharge(sys, v, Charge::QDag)?;
        let qqv = apply_supercharge(sys, &qv, Charge::Q)?;
        let qdqdv = apply_supercharge(sys, &qdv, Charge::QDag)?;
        // nilpotency is checked on every row, boundary included
        let all = 0..n_sites;
        report.r_nilp = report
            .r_nilp
            .max(block_max(&qqv, None, &all) / scale)
            .max(block_max(&qdqdv, None, &all) / scale);

        let hv = sys.apply_hamiltonian(v)?;
        let qhv = apply_supercharge(sys, &hv, Charge::Q)?;
        let hqv = sys.apply_hamiltonian(&qv)?;
        let qdhv = apply_supercharge(sys, &hv, Charge::QDag)?;
        let hqdv = sys.apply_hamiltonian(&qdv)?;
        report.r_comm = report
            .r_comm
            .max(block_max(&qhv, Some(&hqv), &rows) / scale)
            .max(block_max(&qdhv, Some(&hqdv), &rows) / scale);

        let a1 = apply_supercharge(sys, &qdv, Charge::Q)?;
        let a2 = apply_supercharge(sys, &qv, Charge::QDag)?;
        let anti = SuperVec {
            upper: Seq::new(
                a1.upper.values.iter().zip(&a2.upper.values).map(|(x, y)| x + y).collect(),
                0.0,
                Default::default(),
            ),
            lower: Seq::new(
                a1.lower.values.iter().zip(&a2.lower.values).map(|(x, y)| x + y).collect(),
                0.0,
                Default::default(),
            ),
        };
        let shifted = SuperVec {
            upper: Seq::new(
                hv.upper.values.iter().zip(&v.upper.values).map(|(h, x)| (h - x * sys.lambda) * abs_a).collect(),
                0.0,
                Default::default(),
            ),
            lower: Seq::new(
                hv.lower.values.iter().zip(&v.lower.values).map(|(h, x)| (h - x * sys.lambda) * abs_a).collect(),
                0.0,
                Default::default(),
            ),
        };
        report.r_anti = report.r_anti.max(block_max(&anti, Some(&shifted), &rows) / scale);
    }
    Ok(report)
}
