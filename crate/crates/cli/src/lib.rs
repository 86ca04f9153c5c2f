//! Pipelines behind the `pcps` binary.
//!
//! All randomness derives from `RunConfig::seed`: generated matrices use
//! sub-stream 0, sampling plans and trials sub-stream 1, test subspaces
//! sub-stream 2.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use serde::Serialize;

use pcp_sketch::experiments::{kmeans_demo, KmeansTrial, SchemeSetup, TrialRecord};
use pcp_sketch::generate::GeneratorSpec;
use pcp_sketch::io::{read_matrix, read_plan, write_csv_rows, write_json, write_json_lines, write_matrix, write_probabilities};
use pcp_sketch::linalg::{thin_svd, DenseMatrix};
use pcp_sketch::seed::derive_seed;
use pcp_sketch::sketching::{
    apply_sketch, build_sampling_plan, leverage_mixed_probs_from_svd, ridge_leverage_probs_from_svd,
    sample_size_for, uniform_probs_for, PlanRecord, ProbabilityVector, SamplingPlan, Scheme,
};
use pcp_sketch::verifier::{sigma_tilde_leverage, sigma_tilde_ridge, ConditionEvaluator, ConditionReport, SigmaTilde};
use pcp_sketch::{Error, Result};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}

const MATRIX_STREAM: u64 = 0;
const PLAN_STREAM: u64 = 1;
const SUBSPACE_STREAM: u64 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Sketch,
    Verify,
    Experiment,
    KmeansDemo,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Input {
    Path(PathBuf),
    Generate(GeneratorSpec),
}

impl std::fmt::Display for Input {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Input::Path(p) => write!(f, "{}", p.display()),
            Input::Generate(g) => write!(f, "{g}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input: Input,
    pub k: usize,
    pub eps: f64,
    pub delta: f64,
    pub scheme: Scheme,
    /// Sample-size overrides; empty means the scheme's formula. `experiment`
    /// runs once per entry, the other commands use the first.
    pub s: Vec<usize>,
    pub trials: usize,
    pub x_samples: usize,
    pub seed: u64,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Format,
    /// `verify`: check this plan instead of drawing one.
    pub plan: Option<PathBuf>,
    /// `sketch`: also write `WA` here.
    pub sketch_output: Option<PathBuf>,
    /// `kmeans-demo`: random and Lloyd-refined partitions per trial.
    pub assignments: usize,
    pub refined: usize,
    pub lloyd_iters: usize,
}

impl RunConfig {
    pub fn new(command: Command, input: Input) -> Self {
        Self {
            command,
            input,
            k: 5,
            eps: 0.5,
            delta: 0.2,
            scheme: Scheme::LeverageMixed,
            s: Vec::new(),
            trials: 100,
            x_samples: 50,
            seed: 0,
            threads: None,
            output: None,
            format: Format::Json,
            plan: None,
            sketch_output: None,
            assignments: 50,
            refined: 5,
            lloyd_iters: 3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::Parameter(format!("--eps {} outside (0, 1]", self.eps)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Parameter(format!("--delta {} outside (0, 1)", self.delta)));
        }
        if self.k < 1 {
            return Err(Error::Parameter("--k must be >= 1".into()));
        }
        if self.trials < 1 {
            return Err(Error::Parameter("--trials must be >= 1".into()));
        }
        if self.s.contains(&0) {
            return Err(Error::Parameter("--s entries must be >= 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Parameter("--threads must be >= 1".into()));
        }
        if self.scheme == Scheme::Custom {
            return Err(Error::Parameter("--scheme must be uniform, leverage or ridge".into()));
        }
        Ok(())
    }
}

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    /// A certificate check failed.
    GuaranteeFailed,
    /// Bad input or parameters.
    InputError,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::GuaranteeFailed => 1,
            ExitStatus::InputError => 2,
        }
    }
}

/// Runs `config`, writing the report to `--output` (or stdout) and
/// diagnostics to stderr.
pub fn run(config: &RunConfig) -> ExitStatus {
    let stderr = io::stderr();
    let mut diag = stderr.lock();
    let result = match &config.output {
        Some(path) => File::create(path)
            .map_err(Error::from)
            .and_then(|f| {
                let mut w = BufWriter::new(f);
                let holds = execute(config, &mut w, &mut diag)?;
                w.flush()?;
                Ok(holds)
            }),
        None => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            execute(config, &mut out, &mut diag)
        }
    };
    match result {
        Ok(true) => ExitStatus::Success,
        Ok(false) => ExitStatus::GuaranteeFailed,
        Err(e) => {
            let _ = writeln!(diag, "error: {e}");
            ExitStatus::InputError
        }
    }
}

/// Runs the pipeline; returns whether every certificate check held.
pub fn execute(config: &RunConfig, out: &mut dyn Write, diag: &mut dyn Write) -> Result<bool> {
    config.validate()?;
    let (mut body, mut notes) = (Vec::new(), Vec::new());
    let holds = match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?
            .install(|| dispatch(config, &mut body, &mut notes)),
        None => dispatch(config, &mut body, &mut notes),
    };
    diag.write_all(&notes)?;
    let holds = holds?;
    out.write_all(&body)?;
    Ok(holds)
}

fn dispatch(config: &RunConfig, out: &mut Vec<u8>, diag: &mut Vec<u8>) -> Result<bool> {
    let a = load(config)?;
    match config.command {
        Command::Sketch => sketch(config, &a, out, diag),
        Command::Verify => verify(config, &a, out, diag),
        Command::Experiment => experiment(config, &a, out, diag),
        Command::KmeansDemo => kmeans(config, &a, out, diag),
    }
}

fn load(config: &RunConfig) -> Result<DenseMatrix> {
    match &config.input {
        Input::Path(p) => read_matrix(p),
        Input::Generate(spec) => spec.generate(derive_seed(config.seed, MATRIX_STREAM)),
    }
}

struct Prepared {
    probs: ProbabilityVector,
    evaluator: ConditionEvaluator,
    s: usize,
}

fn prepare(config: &RunConfig, a: &DenseMatrix) -> Result<Prepared> {
    let svd = thin_svd(a, None)?;
    let k = config.k;
    let (probs, st): (ProbabilityVector, SigmaTilde) = match config.scheme {
        Scheme::Ridge => {
            let (p, ctx) = ridge_leverage_probs_from_svd(&svd, k)?;
            (p, sigma_tilde_ridge(&ctx)?)
        }
        Scheme::Uniform => (uniform_probs_for(a, k)?, sigma_tilde_leverage(&svd, k)?),
        _ => (leverage_mixed_probs_from_svd(&svd, k)?, sigma_tilde_leverage(&svd, k)?),
    };
    let s = match config.s.first() {
        Some(&s) => s,
        None => sample_size_for(config.scheme, k, config.eps, config.delta)?,
    };
    let evaluator = ConditionEvaluator::with_svd(a, svd, st, k)?;
    Ok(Prepared { probs, evaluator, s })
}

fn sketch(config: &RunConfig, a: &DenseMatrix, out: &mut dyn Write, diag: &mut dyn Write) -> Result<bool> {
    let prep = prepare(config, a)?;
    let plan = build_sampling_plan(&prep.probs, prep.s, derive_seed(config.seed, PLAN_STREAM))?;
    if let Some(path) = &config.sketch_output {
        write_matrix(path, &apply_sketch(&plan, a)?)?;
    }
    match config.format {
        Format::Json => write_json(out, &PlanRecord::from(plan.clone()))?,
        Format::Csv => write_probabilities(out, &prep.probs)?,
    }
    writeln!(diag, "{} plan: s = {} draws over n = {} rows ({} distinct)", config.scheme, plan.s(), a.rows(), plan.merged().s())?;
    Ok(true)
}

/// JSON report of `verify`.
#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub input: String,
    pub scheme: Scheme,
    pub k: usize,
    pub eps: f64,
    pub delta: f64,
    pub s: usize,
    pub seed: u64,
    pub x_samples: usize,
    pub report: ConditionReport,
    pub max_observed: f64,
    pub adversarial_error: f64,
    pub worst_case_error: f64,
    pub holds: bool,
}

/// Flat CSV row of `verify`.
#[derive(Debug, Serialize)]
struct VerifyRow {
    scheme: Scheme,
    k: usize,
    s: usize,
    seed: u64,
    lhs1: f64,
    lhs2: f64,
    lhs3: f64,
    lhs4: f64,
    eps_effective: f64,
    bound_constant: f64,
    certified_error: f64,
    max_observed: f64,
    holds: bool,
}

fn verify(config: &RunConfig, a: &DenseMatrix, out: &mut dyn Write, diag: &mut dyn Write) -> Result<bool> {
    let prep = prepare(config, a)?;
    let plan: SamplingPlan = match &config.plan {
        Some(path) => read_plan(File::open(path)?)?,
        None => build_sampling_plan(&prep.probs, prep.s, derive_seed(config.seed, PLAN_STREAM))?,
    };
    let check = prep
        .evaluator
        .verify(&plan, config.x_samples, derive_seed(config.seed, SUBSPACE_STREAM))?;
    let report = VerifyReport {
        input: config.input.to_string(),
        scheme: config.scheme,
        k: config.k,
        eps: config.eps,
        delta: config.delta,
        s: plan.s(),
        seed: config.seed,
        x_samples: config.x_samples,
        worst_case_error: prep.evaluator.worst_case_error(&plan)?,
        max_observed: check.max_observed,
        adversarial_error: check.adversarial_error,
        holds: check.holds,
        report: check.report,
    };
    match config.format {
        Format::Json => write_json(out, &report)?,
        Format::Csv => {
            let r = &report.report;
            write_csv_rows(
                out,
                &[VerifyRow {
                    scheme: report.scheme,
                    k: report.k,
                    s: report.s,
                    seed: report.seed,
                    lhs1: r.lhs1,
                    lhs2: r.lhs2,
                    lhs3: r.lhs3,
                    lhs4: r.lhs4,
                    eps_effective: r.eps_effective,
                    bound_constant: r.bound_constant,
                    certified_error: r.certified_error,
                    max_observed: report.max_observed,
                    holds: report.holds,
                }],
            )?
        }
    }
    write_table(diag, &report, config.eps)?;
    Ok(report.holds)
}

fn write_table(w: &mut dyn Write, v: &VerifyReport, eps: f64) -> Result<()> {
    let r = &v.report;
    let norm = r.normalized();
    writeln!(w, "{:<16} {:>12} {:>12} {:>8}", "condition", "value", "normalized", "target")?;
    for (i, (value, n)) in [r.lhs1, r.lhs2, r.lhs3, r.lhs4].into_iter().zip(norm).enumerate() {
        writeln!(w, "{:<16} {:>12.4e} {:>12.4e} {:>8}", format!("lhs{}", i + 1), value, n, eps)?;
    }
    writeln!(w, "{:<16} {:>12.4e}", "eps_effective", r.eps_effective)?;
    writeln!(w, "{:<16} {:>12.4}", "bound_constant", r.bound_constant)?;
    writeln!(w, "{:<16} {:>12.4e}", "certified_error", r.certified_error)?;
    writeln!(w, "{:<16} {:>12.4e}", "max_observed", v.max_observed)?;
    writeln!(w, "{:<16} {:>12.4e}", "worst_case", v.worst_case_error)?;
    writeln!(w, "holds: {}", v.holds)?;
    Ok(())
}

fn experiment(config: &RunConfig, a: &DenseMatrix, out: &mut dyn Write, diag: &mut dyn Write) -> Result<bool> {
    let setup = SchemeSetup::new(a, config.k, config.scheme, config.eps, config.delta)?;
    let sizes = if config.s.is_empty() { vec![setup.s] } else { config.s.clone() };
    let mut rows = Vec::new();
    let mut records: Vec<TrialRecord> = Vec::new();
    let mut holds = true;
    for (i, &s) in sizes.iter().enumerate() {
        let run = setup
            .clone()
            .with_sample_size(s)?
            .run(config.eps, config.trials, config.x_samples, derive_seed(config.seed, PLAN_STREAM + i as u64))?;
        holds &= run.records.iter().all(|r| {
            r.max_pcp_error
                .is_none_or(|m| m <= r.certified_error + pcp_sketch::verifier::THEOREM_SLACK)
        });
        let row = run.aggregate();
        writeln!(
            diag,
            "{} s={:<6} mean eps_eff {:.4e}  rate(eps_eff > {}) {:.3}{}",
            row.scheme,
            row.s,
            row.mean_eps_effective,
            config.eps,
            row.condition_failure_rate,
            row.pcp_failure_rate
                .map(|r| format!("  rate(pcp > C·eps) {r:.3}"))
                .unwrap_or_default()
        )?;
        rows.push(row);
        records.extend(run.records);
    }
    match config.format {
        Format::Json => write_json_lines(out, &records)?,
        Format::Csv => write_csv_rows(out, &rows)?,
    }
    Ok(holds)
}

fn kmeans(config: &RunConfig, a: &DenseMatrix, out: &mut dyn Write, diag: &mut dyn Write) -> Result<bool> {
    let demo = kmeans_demo(
        a,
        config.k,
        config.eps,
        config.delta,
        config.trials,
        config.assignments,
        config.refined,
        config.lloyd_iters,
        derive_seed(config.seed, PLAN_STREAM),
    )?;
    match config.format {
        Format::Json => write_json(out, &demo)?,
        Format::Csv => write_csv_rows::<_, KmeansTrial>(out, &demo.trials)?,
    }
    writeln!(
        diag,
        "k-means: s = {}, max gap {:.4e} (threshold {}), {} of {} trials above threshold",
        demo.s, demo.gaps.max, demo.threshold, demo.gaps.failures, demo.gaps.trials
    )?;
    Ok(demo.certificate_violations == 0)
}
