//! Finite complex sequences on the lattice `n = 0..N-1`.
//!
//! [`Seq`] stores values directly. [`ScaledSeq`] stores each entry as a
//! log-magnitude plus a unit phase, which is what seeds and missing states
//! need once they grow past the range of `f64`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What a sequence represents. Only used for bookkeeping and reporting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SeqKind {
    #[default]
    Generic,
    Eigen,
    Seed,
    MissingState,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Seq {
    pub values: Vec<Complex64>,
    pub energy: f64,
    pub kind: SeqKind,
}

impl Seq {
    pub fn new(values: Vec<Complex64>, energy: f64, kind: SeqKind) -> Self {
        Self { values, energy, kind }
    }

    pub fn from_real(values: &[f64], energy: f64, kind: SeqKind) -> Self {
        Self::new(
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            energy,
            kind,
        )
    }

    pub fn zeros(len: usize) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0); len], 0.0, SeqKind::Generic)
    }

    /// Canonical unit vector `e_k`.
    pub fn unit(len: usize, k: usize) -> Self {
        let mut s = Self::zeros(len);
        s.values[k] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Index of the first exactly-zero entry, if any.
    pub fn first_zero(&self) -> Option<usize> {
        self.values.iter().position(|v| v.re == 0.0 && v.im == 0.0)
    }

    /// Largest `|Im s[n]|` relative to `max|s|`.
    pub fn realness_defect(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max) / scale
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self::new(
            self.values.iter().map(|v| v * factor).collect(),
            self.energy,
            self.kind,
        )
    }

    pub fn with_energy(mut self, energy: f64, kind: SeqKind) -> Self {
        self.energy = energy;
        self.kind = kind;
        self
    }

    pub(crate) fn check_len(&self, expected: usize) -> Result<()> {
        if self.len() != expected {
            return Err(Error::LengthMismatch { expected, got: self.len() });
        }
        Ok(())
    }
}

/// `sum_n conj(f[n]) g[n]`.
pub fn l2_inner(f: &Seq, g: &Seq) -> Result<Complex64> {
    g.check_len(f.len())?;
    Ok(f.values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Sequence stored as `s[n] = phase[n] * exp(log_abs[n])`.
///
/// A zero entry has `log_abs = -inf` and phase `1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledSeq {
    log_abs: Vec<f64>,
    phase: Vec<Complex64>,
    pub energy: f64,
    pub kind: SeqKind,
}

/// Magnitude cap above which direct storage is abandoned.
pub const MAGNITUDE_CAP: f64 = 1e150;

impl ScaledSeq {
    pub fn from_log_polar(log_abs: Vec<f64>, phase: Vec<Complex64>, energy: f64, kind: SeqKind) -> Self {
        assert_eq!(log_abs.len(), phase.len());
        Self { log_abs, phase, energy, kind }
    }

    pub fn from_seq(s: &Seq) -> Self {
        let (log_abs, phase) = s.values.iter().map(|&v| polar_split(v)).unzip();
        Self { log_abs, phase, energy: s.energy, kind: s.kind }
    }

    /// Build from `s[0] = head` and `s[n+1] = ratios[n] * s[n]`.
    pub fn from_ratios(head: Complex64, ratios: &[Complex64], energy: f64, kind: SeqKind) -> Self {
        let mut log_abs = Vec::with_capacity(ratios.len() + 1);
        let mut phase = Vec::with_capacity(ratios.len() + 1);
        let (l0, p0) = polar_split(head);
        log_abs.push(l0);
        phase.push(p0);
        for r in ratios {
            let (lr, pr) = polar_split(*r);
            let l = *log_abs.last().unwrap() + lr;
            let p = unit(*phase.last().unwrap() * pr);
            log_abs.push(l);
            phase.push(p);
        }
        Self { log_abs, phase, energy, kind }
    }

    pub fn len(&self) -> usize {
        self.log_abs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_abs.is_empty()
    }

    pub fn log_abs(&self, n: usize) -> f64 {
        self.log_abs[n]
    }

    pub fn phase(&self, n: usize) -> Complex64 {
        self.phase[n]
    }

    /// Direct value; may be `inf` when the entry exceeds the `f64` range.
    pub fn value(&self, n: usize) -> Complex64 {
        self.phase[n] * self.log_abs[n].exp()
    }

    /// `s[n+1] / s[n]`.
    pub fn ratio(&self, n: usize) -> Complex64 {
        self.phase[n + 1] * self.phase[n].conj() * (self.log_abs[n + 1] - self.log_abs[n]).exp()
    }

    pub fn first_zero(&self) -> Option<usize> {
        self.log_abs.iter().position(|l| *l == f64::NEG_INFINITY)
    }

    /// Convert to direct storage, failing if any entry exceeds [`MAGNITUDE_CAP`].
    pub fn to_seq(&self) -> Result<Seq> {
        let cap = MAGNITUDE_CAP.ln();
        if let Some(index) = self.log_abs.iter().position(|l| *l > cap) {
            return Err(Error::Overflow { index, cap: MAGNITUDE_CAP });
        }
        Ok(Seq::new(
            (0..self.len()).map(|n| self.value(n)).collect(),
            self.energy,
            self.kind,
        ))
    }

    /// Sub-lattice `m -> 2m + parity`.
    pub fn restrict_parity(&self, parity: usize) -> Self {
        let idx = (parity..self.len()).step_by(2);
        Self {
            log_abs: idx.clone().map(|n| self.log_abs[n]).collect(),
            phase: idx.map(|n| self.phase[n]).collect(),
            energy: self.energy,
            kind: self.kind,
        }
    }

    pub fn truncated(&self, len: usize) -> Self {
        Self {
            log_abs: self.log_abs[..len].to_vec(),
            phase: self.phase[..len].to_vec(),
            energy: self.energy,
            kind: self.kind,
        }
    }
}

/// Read access to `ln|s[n]|`, shared by direct and scaled sequences.
pub trait LogMagnitude {
    fn seq_len(&self) -> usize;
    fn ln_abs(&self, n: usize) -> f64;
}

impl LogMagnitude for Seq {
    fn seq_len(&self) -> usize {
        self.len()
    }
    fn ln_abs(&self, n: usize) -> f64 {
        self.values[n].norm().ln()
    }
}

impl LogMagnitude for ScaledSeq {
    fn seq_len(&self) -> usize {
        self.len()
    }
    fn ln_abs(&self, n: usize) -> f64 {
        self.log_abs[n]
    }
}

fn polar_split(v: Complex64) -> (f64, Complex64) {
    let r = v.norm();
    if r == 0.0 {
        (f64::NEG_INFINITY, Complex64::new(1.0, 0.0))
    } else {
        (r.ln(), canonical(v / r))
    }
}

fn unit(z: Complex64) -> Complex64 {
    canonical(z / z.norm())
}

/// Replace signed zeros by `+0.0` so branch cuts are taken deterministically.
pub(crate) fn canonical(z: Complex64) -> Complex64 {
    Complex64::new(z.re + 0.0, z.im + 0.0)
}

/// Principal square root with `-x ± 0i` always mapped to `+i sqrt(x)`.
pub(crate) fn principal_sqrt(z: Complex64) -> Complex64 {
    canonical(z).sqrt()
}
