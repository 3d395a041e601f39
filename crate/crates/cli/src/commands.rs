use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use darboux_core::io::{read_seq_csv, write_scaled_csv, write_seq_csv, OperatorFile, RunConfig, RunReport};
use darboux_core::models::{fit_line, hermite_seed, laplacian, parity_exponent, split_even_odd, FreeParticleModel, LineFit, Step2Operator};
use darboux_core::probes::{standard_probes, standard_super_probes};
use darboux_core::{
    build_transform_scaled, solve_recurrence_scaled, superalgebra_check, verify_transform, DarbouxOperator, Error,
    JacobiOperator, LogMagnitude, RecurrenceMode, ScaledSeq, Seq, SeqKind, SuperReport, SuperSystem, Transform,
    VerifyReport,
};
use num_complex::Complex64;
use serde::Serialize;

use crate::{AsymptoticsArgs, Common, ExportArgs, Format, Outcome, TransformArgs};

type Result<T> = anyhow::Result<T>;

/// One Jacobi chain and its seed. A step-2 operator yields two (even, odd).
struct Chain {
    h0: JacobiOperator,
    seed: ScaledSeq,
}

struct Problem {
    step: u8,
    chains: Vec<Chain>,
}

fn load_problem(args: &TransformArgs, cfg: &RunConfig) -> Result<Problem> {
    let file = match &args.input {
        Some(p) => OperatorFile::load(p).with_context(|| format!("loading {}", p.display()))?,
        None => OperatorFile::from_jacobi(&laplacian(cfg.n_sites)),
    };
    let chains = match file.step {
        1 => {
            let h0 = file.to_jacobi()?;
            let seed = match &args.seed {
                Some(p) => {
                    let s = read_seq_csv(p).with_context(|| format!("reading {}", p.display()))?;
                    if s.len() != h0.n_sites() {
                        return Err(Error::LengthMismatch { expected: h0.n_sites(), got: s.len() }.into());
                    }
                    if let Some(index) = s.first_zero() {
                        return Err(Error::SeedHasNode { index }.into());
                    }
                    ScaledSeq::from_seq(&s.with_energy(cfg.lambda, SeqKind::Seed))
                }
                None => solve_recurrence_scaled(&h0, cfg.lambda, Complex64::new(1.0, 0.0), RecurrenceMode::Physical)?,
            };
            vec![Chain { h0, seed }]
        }
        _ => {
            if args.seed.is_some() {
                bail!("--seed applies to step-1 operators; step-2 operators use the Hermite seed");
            }
            let op2 = file.to_step2()?;
            let (even, odd) = split_even_odd(&op2)?;
            let seed = hermite_seed(cfg.lambda, op2.n_sites())?;
            vec![Chain { h0: even, seed: seed.restrict_parity(0) }, Chain { h0: odd, seed: seed.restrict_parity(1) }]
        }
    };
    Ok(Problem { step: file.step, chains })
}

fn build_all(problem: &Problem, cfg: &RunConfig) -> Result<Vec<Transform>> {
    let opts = cfg.transform_options();
    problem
        .chains
        .iter()
        .map(|c| build_transform_scaled(&c.h0, &c.seed, &opts).map_err(Into::into))
        .collect()
}

fn verify_all(chains: &[(&JacobiOperator, &Transform)], cfg: &RunConfig) -> Result<VerifyReport> {
    let mut merged: Option<VerifyReport> = None;
    for (h0, t) in chains {
        let probes = standard_probes(h0.n_sites(), cfg.probe_count, cfg.rng_seed);
        let rep = verify_transform(h0, &t.transformed, &t.darboux, &probes)?;
        merged = Some(match merged {
            Some(m) => m.merge(&rep),
            None => rep,
        });
    }
    merged.context("no chains to verify")
}

fn base_report(command: &str, cfg: &RunConfig, n_sites: usize) -> RunReport {
    RunReport {
        command: command.into(),
        n_sites,
        lambda: cfg.lambda,
        tolerance: cfg.tolerances.verify,
        ..RunReport::default()
    }
}

fn finish(report: RunReport, dir: &Path, name: &str) -> Result<Outcome> {
    let report = report.judge();
    report.save(&dir.join(name))?;
    Ok(if report.passed {
        Outcome::Passed
    } else {
        Outcome::Failed { worst: report.worst(), tolerance: report.tolerance }
    })
}

fn output_dir(dir: &PathBuf) -> Result<&Path> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir.as_path())
}

fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    serde_json::to_writer_pretty(f, value)?;
    Ok(())
}

fn write_seq(dir: &Path, name: &str, s: &Seq, format: Format) -> Result<()> {
    match format {
        Format::Csv => write_seq_csv(&dir.join(format!("{name}.csv")), s)?,
        Format::Json => save_json(&dir.join(format!("{name}.json")), s)?,
    }
    Ok(())
}

/// Plain values when they fit in `f64`, log-magnitude form (`<name>_scaled`) otherwise.
fn write_scaled(dir: &Path, name: &str, s: &ScaledSeq, format: Format) -> Result<()> {
    match s.to_seq() {
        Ok(plain) => write_seq(dir, name, &plain, format),
        Err(_) => match format {
            Format::Csv => Ok(write_scaled_csv(&dir.join(format!("{name}_scaled.csv")), s)?),
            Format::Json => save_json(&dir.join(format!("{name}_scaled.json")), s),
        },
    }
}

fn real_seq(values: &[f64]) -> Seq {
    Seq::from_real(values, 0.0, SeqKind::Generic)
}

/// Interleave the transformed chains back into a step-2 operator.
fn merge_chains(even: &JacobiOperator, odd: &JacobiOperator, label: String) -> Result<Step2Operator> {
    let len = even.n_sites() + odd.n_sites();
    let pick = |n: usize| if n % 2 == 0 { (even, n / 2) } else { (odd, n / 2) };
    let a = (0..len).map(|n| { let (c, m) = pick(n); c.a()[m] }).collect();
    let q = (0..len).map(|n| { let (c, m) = pick(n); c.q()[m] }).collect();
    Ok(Step2Operator::new(label, a, q)?)
}

pub fn transform(args: &TransformArgs) -> Result<Outcome> {
    let cfg = args.common.run_config()?;
    let dir = output_dir(&args.common.output_dir)?;
    let problem = load_problem(args, &cfg)?;
    let transforms = build_all(&problem, &cfg)?;

    let out_file = if problem.step == 1 {
        save_json(&dir.join("darboux.json"), &transforms[0].darboux)?;
        OperatorFile::from_jacobi(&transforms[0].transformed)
    } else {
        save_json(&dir.join("darboux_even.json"), &transforms[0].darboux)?;
        save_json(&dir.join("darboux_odd.json"), &transforms[1].darboux)?;
        let label = format!("transformed (lambda = {})", cfg.lambda);
        OperatorFile::from_step2(&merge_chains(&transforms[0].transformed, &transforms[1].transformed, label)?)
    };
    out_file.save(&dir.join("transformed.json"))?;

    let pairs: Vec<_> = problem.chains.iter().map(|c| &c.h0).zip(&transforms).collect();
    let verify = verify_all(&pairs, &cfg)?;
    let mut report = base_report("transform", &cfg, out_file.n_sites).with_verify(&verify);
    report.q_tilde_crosscheck = Some(transforms.iter().map(|t| t.report.q_tilde_crosscheck).fold(0.0, f64::max));
    finish(report, dir, "report.json")
}

pub fn verify(args: &TransformArgs) -> Result<Outcome> {
    let cfg = args.common.run_config()?;
    let dir = output_dir(&args.common.output_dir)?;
    let problem = load_problem(args, &cfg)?;
    let transforms = build_all(&problem, &cfg)?;
    let pairs: Vec<_> = problem.chains.iter().map(|c| &c.h0).zip(&transforms).collect();
    let verify = verify_all(&pairs, &cfg)?;
    let n_sites = problem.chains.iter().map(|c| c.h0.n_sites()).sum();
    let mut report = base_report("verify", &cfg, n_sites).with_verify(&verify);
    report.q_tilde_crosscheck = Some(transforms.iter().map(|t| t.report.q_tilde_crosscheck).fold(0.0, f64::max));
    finish(report, dir, "verify.json")
}

pub fn susy_check(args: &TransformArgs) -> Result<Outcome> {
    let cfg = args.common.run_config()?;
    let dir = output_dir(&args.common.output_dir)?;
    let problem = load_problem(args, &cfg)?;
    let transforms = build_all(&problem, &cfg)?;
    let mut merged: Option<SuperReport> = None;
    let mut n_sites = 0;
    for (chain, t) in problem.chains.into_iter().zip(transforms) {
        let n = chain.h0.n_sites();
        n_sites += n;
        let sys = SuperSystem::new(chain.h0, t)?;
        let rep = superalgebra_check(&sys, &standard_super_probes(n, cfg.probe_count, cfg.rng_seed))?;
        merged = Some(match merged {
            Some(m) => m.merge(&rep),
            None => rep,
        });
    }
    let rep = merged.context("no chains to check")?;
    finish(base_report("susy-check", &cfg, n_sites).with_super(&rep), dir, "susy.json")
}

pub fn model_free_particle(common: &Common) -> Result<Outcome> {
    let cfg = common.run_config()?;
    let dir = output_dir(&common.output_dir)?;
    let model = FreeParticleModel::build(cfg.lambda, cfg.n_sites, &cfg.transform_options())?;

    let (h1_even, h1_odd) = (model.even.h1()?, model.odd.h1()?);
    let h1 = merge_chains(&h1_even, &h1_odd, "h1".into())?;
    let fmt = common.format;
    write_seq(dir, "a_tilde", &real_seq(h1.a2()), fmt)?;
    write_seq(dir, "q_tilde", &real_seq(h1.q2()), fmt)?;
    write_seq(dir, "d", &real_seq(&model.potential.d), fmt)?;
    write_seq(dir, "r", &real_seq(&model.potential.r), fmt)?;
    let (eta, eta_hat) = model.missing_states(1.0)?;
    write_scaled(dir, "eta", &eta, fmt)?;
    write_scaled(dir, "eta_hat", &eta_hat, fmt)?;
    OperatorFile::from_step2(&model.hamiltonian()?).save(&dir.join("model.json"))?;

    let pairs = [(&model.even.h0, &model.even.transform), (&model.odd.h0, &model.odd.transform)];
    let verify = verify_all(&pairs, &cfg)?;
    let mut report = base_report("model-free-particle", &cfg, cfg.n_sites).with_verify(&verify);
    report.q_tilde_crosscheck =
        Some(model.even.transform.report.q_tilde_crosscheck.max(model.odd.transform.report.q_tilde_crosscheck));
    finish(report, dir, "report.json")
}

#[derive(Serialize)]
struct ParityFits {
    even: LineFit,
    odd: LineFit,
}

#[derive(Serialize)]
struct StateFits {
    /// `log|s| = slope log n + c`
    power_law: ParityFits,
    /// `log|s| = slope sqrt(n) + c`
    stretched: ParityFits,
}

#[derive(Serialize)]
struct AsymptoticsReport {
    command: &'static str,
    n_sites: usize,
    lambda: f64,
    fit_min: usize,
    fit_max: usize,
    eta: StateFits,
    eta_hat: StateFits,
}

fn stretched_fit(s: &ScaledSeq, parity: usize, n_min: usize, n_max: usize) -> Result<LineFit> {
    let idx: Vec<usize> = (n_min..=n_max).filter(|n| n % 2 == parity).collect();
    let xs: Vec<f64> = idx.iter().map(|&n| (n as f64).sqrt()).collect();
    let ys: Vec<f64> = idx.iter().map(|&n| s.ln_abs(n)).collect();
    Ok(fit_line(&xs, &ys)?)
}

fn state_fits(s: &ScaledSeq, n_min: usize, n_max: usize) -> Result<StateFits> {
    Ok(StateFits {
        power_law: ParityFits { even: parity_exponent(s, 0, n_min, n_max)?, odd: parity_exponent(s, 1, n_min, n_max)? },
        stretched: ParityFits { even: stretched_fit(s, 0, n_min, n_max)?, odd: stretched_fit(s, 1, n_min, n_max)? },
    })
}

/// Measurements only: there is no residual to judge, so a completed fit passes.
pub fn asymptotics(args: &AsymptoticsArgs) -> Result<Outcome> {
    let cfg = args.common.run_config()?;
    let dir = output_dir(&args.common.output_dir)?;
    let n = cfg.n_sites;
    let fit_min = args.fit_min.unwrap_or((n / 5).max(1));
    let fit_max = args.fit_max.unwrap_or(n.saturating_sub(1));
    let model = FreeParticleModel::build(cfg.lambda, n, &cfg.transform_options())?;
    let (eta, eta_hat) = model.missing_states(1.0)?;
    let report = AsymptoticsReport {
        command: "asymptotics",
        n_sites: n,
        lambda: cfg.lambda,
        fit_min,
        fit_max,
        eta: state_fits(&eta, fit_min, fit_max)?,
        eta_hat: state_fits(&eta_hat, fit_min, fit_max)?,
    };
    save_json(&dir.join("asymptotics.json"), &report)?;
    Ok(Outcome::Passed)
}

pub fn export(args: &ExportArgs) -> Result<Outcome> {
    let dir = output_dir(&args.output_dir)?;
    let text = fs::read_to_string(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("schema_version").is_some() {
        let file: OperatorFile = serde_json::from_value(value)?;
        file.validate()?;
        write_seq_csv(&dir.join("a.csv"), &real_seq(&file.a))?;
        write_seq_csv(&dir.join("q.csv"), &real_seq(&file.q))?;
    } else if value.get("a_coef").is_some() {
        let l: DarbouxOperator = serde_json::from_value(value)?;
        write_seq_csv(&dir.join("a_coef.csv"), &Seq::new(l.a_coef().to_vec(), l.lambda(), SeqKind::Generic))?;
        write_seq_csv(&dir.join("b_coef.csv"), &Seq::new(l.b_coef().to_vec(), l.lambda(), SeqKind::Generic))?;
        write_scaled(dir, "seed", l.seed(), Format::Csv)?;
    } else if value.get("values").is_some() {
        let s: Seq = serde_json::from_value(value)?;
        let stem = args.input.file_stem().and_then(|s| s.to_str()).unwrap_or("seq");
        write_seq_csv(&dir.join(format!("{stem}.csv")), &s)?;
    } else if value.get("log_abs").is_some() {
        let s: ScaledSeq = serde_json::from_value(value)?;
        let stem = args.input.file_stem().and_then(|s| s.to_str()).unwrap_or("seq");
        write_scaled(dir, stem, &s, Format::Csv)?;
    } else {
        bail!("unrecognized file: expected an operator, a Darboux operator or a sequence");
    }
    Ok(Outcome::Passed)
}
