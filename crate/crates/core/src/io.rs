//! File formats: operator JSON, run configuration, sequence CSV, run report.

use std::fs::File;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::darboux::{TransformOptions, VerifyReport};
use crate::error::{Error, Result};
use crate::jacobi::JacobiOperator;
use crate::models::Step2Operator;
use crate::seq::{ScaledSeq, Seq, SeqKind};
use crate::susy::SuperReport;

pub const SCHEMA_VERSION: u32 = 1;

/// Operator coefficients on disk. `step = 1` is a Jacobi chain, `step = 2`
/// couples `n` to `n ± 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorFile {
    pub schema_version: u32,
    pub label: String,
    pub n_sites: usize,
    pub a: Vec<f64>,
    pub q: Vec<f64>,
    #[serde(default = "default_step")]
    pub step: u8,
}

fn default_step() -> u8 {
    1
}

impl OperatorFile {
    pub fn from_jacobi(op: &JacobiOperator) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            label: op.label.clone(),
            n_sites: op.n_sites(),
            a: op.a().to_vec(),
            q: op.q().to_vec(),
            step: 1,
        }
    }

    pub fn from_step2(op: &Step2Operator) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            label: op.label.clone(),
            n_sites: op.n_sites(),
            a: op.a2().to_vec(),
            q: op.q2().to_vec(),
            step: 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.a.len() != self.n_sites || self.q.len() != self.n_sites {
            return Err(Error::Schema(format!(
                "n_sites = {} but a has {} and q has {} entries",
                self.n_sites,
                self.a.len(),
                self.q.len()
            )));
        }
        match self.step {
            1 => JacobiOperator::new(self.label.clone(), self.a.clone(), self.q.clone()).map(|_| ()),
            2 => Step2Operator::new(self.label.clone(), self.a.clone(), self.q.clone()).map(|_| ()),
            s => Err(Error::Schema(format!("step must be 1 or 2, got {s}"))),
        }
    }

    pub fn to_jacobi(&self) -> Result<JacobiOperator> {
        self.validate()?;
        if self.step != 1 {
            return Err(Error::Schema("expected a step-1 operator".into()));
        }
        JacobiOperator::new(self.label.clone(), self.a.clone(), self.q.clone())
    }

    pub fn to_step2(&self) -> Result<Step2Operator> {
        self.validate()?;
        if self.step != 2 {
            return Err(Error::Schema("expected a step-2 operator".into()));
        }
        Step2Operator::new(self.label.clone(), self.a.clone(), self.q.clone())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file: Self = serde_json::from_reader(File::open(path)?)?;
        file.validate()?;
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.validate()?;
        serde_json::to_writer_pretty(File::create(path)?, self)?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub seed_residual: f64,
    pub realness: f64,
    pub verify: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { seed_residual: 1e-10, realness: 1e-10, verify: 1e-10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub lambda: f64,
    pub const_a: f64,
    pub tolerances: Tolerances,
    pub n_sites: usize,
    pub probe_count: usize,
    pub rng_seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { lambda: -1.0, const_a: -1.0, tolerances: Tolerances::default(), n_sites: 64, probe_count: 8, rng_seed: 0 }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let cfg: Self = serde_json::from_reader(File::open(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        if [t.seed_residual, t.realness, t.verify].iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Schema("tolerances must be positive".into()));
        }
        Ok(())
    }

    pub fn transform_options(&self) -> TransformOptions {
        TransformOptions {
            const_a: self.const_a,
            seed_tolerance: self.tolerances.seed_residual,
            realness_tolerance: self.tolerances.realness,
            ..TransformOptions::default()
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ComplexRow {
    n: usize,
    re: f64,
    im: f64,
}

/// Write `n,re,im` rows. `f64` display is the shortest round-trip form.
pub fn write_seq_csv(path: &Path, s: &Seq) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for (n, v) in s.values.iter().enumerate() {
        w.serialize(ComplexRow { n, re: v.re, im: v.im })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_seq_csv(path: &Path) -> Result<Seq> {
    let mut r = csv::Reader::from_path(path)?;
    let mut values = Vec::new();
    for row in r.deserialize() {
        let row: ComplexRow = row?;
        if row.n != values.len() {
            return Err(Error::Schema(format!("expected row n = {}, found {}", values.len(), row.n)));
        }
        values.push(Complex64::new(row.re, row.im));
    }
    Ok(Seq::new(values, 0.0, SeqKind::Generic))
}

#[derive(Serialize)]
struct ScaledRow {
    n: usize,
    log_abs: f64,
    phase_re: f64,
    phase_im: f64,
}

/// Write `n,log_abs,phase_re,phase_im` rows for sequences beyond `f64` range.
pub fn write_scaled_csv(path: &Path, s: &ScaledSeq) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for n in 0..s.len() {
        let p = s.phase(n);
        w.serialize(ScaledRow { n, log_abs: s.log_abs(n), phase_re: p.re, phase_im: p.im })?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct RealRow {
    n: usize,
    value: f64,
}

/// Write `n,value` rows.
pub fn write_real_csv(path: &Path, values: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for (n, &value) in values.iter().enumerate() {
        w.serialize(RealRow { n, value })?;
    }
    w.flush()?;
    Ok(())
}

/// Machine-readable result of a run. Residuals not computed by a command are omitted.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub n_sites: usize,
    pub lambda: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_int: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_fac0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_fac1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_comm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_nilp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_anti: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_tilde_crosscheck: Option<f64>,
    pub boundary_rows_excluded: Vec<usize>,
}

impl RunReport {
    pub fn with_verify(mut self, v: &VerifyReport) -> Self {
        self.r_int = Some(v.r_int);
        self.r_fac0 = Some(v.r_fac0);
        self.r_fac1 = Some(v.r_fac1);
        self.boundary_rows_excluded = v.boundary_rows_excluded.clone();
        self
    }

    pub fn with_super(mut self, s: &SuperReport) -> Self {
        self.r_comm = Some(s.r_comm);
        self.r_nilp = Some(s.r_nilp);
        self.r_anti = Some(s.r_anti);
        for r in &s.boundary_rows_excluded {
            if !self.boundary_rows_excluded.contains(r) {
                self.boundary_rows_excluded.push(*r);
            }
        }
        self.boundary_rows_excluded.sort_unstable();
        self
    }

    /// Largest residual present.
    pub fn worst(&self) -> f64 {
        [self.r_int, self.r_fac0, self.r_fac1, self.r_comm, self.r_nilp, self.r_anti]
            .into_iter()
            .flatten()
            .fold(0.0, f64::max)
    }

    /// Set `passed` from [`Self::worst`] against `tolerance`.
    pub fn judge(mut self) -> Self {
        self.passed = self.worst() <= self.tolerance;
        self
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        serde_json::to_writer_pretty(File::create(path)?, self)?;
        Ok(())
    }
}
