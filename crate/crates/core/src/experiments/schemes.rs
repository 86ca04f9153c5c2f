//! Failure-rate estimation for the leverage and ridge sampling schemes.

use serde::Serialize;

use super::{run_trials, TrialStats};
use crate::error::{Error, Result};
use crate::linalg::{thin_svd, DenseMatrix};
use crate::sketching::{
    build_sampling_plan, leverage_mixed_probs_from_svd, ridge_leverage_probs_from_svd,
    sample_size_for, uniform_probs_for, ProbabilityVector, SamplingPlan, Scheme,
};
use crate::verifier::{sigma_tilde_leverage, sigma_tilde_ridge, ConditionEvaluator};

/// Worst-case bound constant of a scheme: 5 for binary `Σ̃`, `4 + 2√2` for ridge.
pub fn guarantee_constant(scheme: Scheme) -> f64 {
    match scheme {
        Scheme::Ridge => 4.0 + 2.0 * std::f64::consts::SQRT_2,
        _ => 5.0,
    }
}

/// Everything about `(A, k, scheme)` that does not change between trials.
#[derive(Clone, Debug)]
pub struct SchemeSetup {
    pub scheme: Scheme,
    pub k: usize,
    pub s: usize,
    pub probs: ProbabilityVector,
    pub evaluator: ConditionEvaluator,
}

impl SchemeSetup {
    /// Probabilities, `Σ̃` and the prescribed sample size for `scheme`.
    /// Uniform sampling borrows the binary `Σ̃` and the leverage sample size.
    pub fn new(a: &DenseMatrix, k: usize, scheme: Scheme, eps: f64, delta: f64) -> Result<Self> {
        let svd = thin_svd(a, None)?;
        let (probs, st) = match scheme {
            Scheme::LeverageMixed => (
                leverage_mixed_probs_from_svd(&svd, k)?,
                sigma_tilde_leverage(&svd, k)?,
            ),
            Scheme::Uniform => (uniform_probs_for(a, k)?, sigma_tilde_leverage(&svd, k)?),
            Scheme::Ridge => {
                let (p, ctx) = ridge_leverage_probs_from_svd(&svd, k)?;
                (p, sigma_tilde_ridge(&ctx)?)
            }
            Scheme::Custom => {
                return Err(Error::Parameter("custom probabilities have no sampling scheme".into()))
            }
        };
        let s = sample_size_for(scheme, k, eps, delta)?;
        let evaluator = ConditionEvaluator::with_svd(a, svd, st, k)?;
        Ok(Self {
            scheme,
            k,
            s,
            probs,
            evaluator,
        })
    }

    /// Overrides the prescribed sample size.
    pub fn with_sample_size(mut self, s: usize) -> Result<Self> {
        if s == 0 {
            return Err(Error::Parameter("sample count s must be >= 1".into()));
        }
        self.s = s;
        Ok(self)
    }

    /// Trials with plans drawn from the scheme's probabilities.
    pub fn run(&self, eps: f64, trials: usize, x_samples: usize, seed: u64) -> Result<SchemeRun> {
        self.run_with(eps, trials, x_samples, seed, |ts| {
            build_sampling_plan(&self.probs, self.s, ts)
        })
    }

    /// Trials with plans from `plan_for(trial_seed)`, e.g. a fixed plan.
    ///
    /// Each trial evaluates the structural conditions and, if `x_samples > 0`,
    /// the largest projection-cost error over that many Haar subspaces plus
    /// the adversarial one.
    pub fn run_with<P>(
        &self,
        eps: f64,
        trials: usize,
        x_samples: usize,
        seed: u64,
        plan_for: P,
    ) -> Result<SchemeRun>
    where
        P: Fn(u64) -> Result<SamplingPlan> + Sync,
    {
        let records = run_trials(trials, seed, |trial, ts| {
            let plan = plan_for(ts)?;
            let (report, max_pcp_error) = if x_samples > 0 {
                let check = self.evaluator.verify(&plan, x_samples, ts)?;
                (check.report, Some(check.max_observed))
            } else {
                (self.evaluator.evaluate(&plan)?, None)
            };
            Ok(TrialRecord {
                trial,
                seed: ts,
                scheme: self.scheme,
                s: plan.s(),
                lhs1: report.lhs1,
                lhs2: report.lhs2,
                lhs3: report.lhs3,
                lhs4: report.lhs4,
                eps_effective: report.eps_effective,
                certified_error: report.certified_error,
                max_pcp_error,
            })
        })?;
        let eff: Vec<f64> = records.iter().map(|r| r.eps_effective).collect();
        let conditions = TrialStats::from_values(&eff, eps)?;
        let pcp = if x_samples > 0 {
            let v: Vec<f64> = records.iter().filter_map(|r| r.max_pcp_error).collect();
            Some(TrialStats::from_values(&v, guarantee_constant(self.scheme) * eps)?)
        } else {
            None
        };
        Ok(SchemeRun {
            scheme: self.scheme,
            k: self.k,
            s: self.s,
            eps,
            bound_constant: self.evaluator.sigma_tilde().bound_constant(),
            records,
            conditions,
            pcp,
        })
    }
}

/// One line of the per-trial JSON-lines log.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub scheme: Scheme,
    pub s: usize,
    pub lhs1: f64,
    pub lhs2: f64,
    pub lhs3: f64,
    pub lhs4: f64,
    pub eps_effective: f64,
    pub certified_error: f64,
    pub max_pcp_error: Option<f64>,
}

/// Result of a batch of scheme trials.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchemeRun {
    pub scheme: Scheme,
    pub k: usize,
    pub s: usize,
    pub eps: f64,
    pub bound_constant: f64,
    pub records: Vec<TrialRecord>,
    /// `eps_effective` per trial; failures are trials above `eps`.
    pub conditions: TrialStats,
    /// Largest observed error per trial; failures are trials above the
    /// scheme's guarantee constant times `eps`.
    pub pcp: Option<TrialStats>,
}

/// One row of the aggregate CSV (error against sample size).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateRow {
    pub scheme: Scheme,
    pub k: usize,
    pub s: usize,
    pub eps: f64,
    pub trials: usize,
    pub mean_eps_effective: f64,
    pub max_eps_effective: f64,
    pub condition_failure_rate: f64,
    pub mean_pcp_error: Option<f64>,
    pub max_pcp_error: Option<f64>,
    pub pcp_failure_rate: Option<f64>,
}

impl SchemeRun {
    pub fn aggregate(&self) -> AggregateRow {
        AggregateRow {
            scheme: self.scheme,
            k: self.k,
            s: self.s,
            eps: self.eps,
            trials: self.conditions.trials,
            mean_eps_effective: self.conditions.mean,
            max_eps_effective: self.conditions.max,
            condition_failure_rate: self.conditions.failure_rate(),
            mean_pcp_error: self.pcp.as_ref().map(|p| p.mean),
            max_pcp_error: self.pcp.as_ref().map(|p| p.max),
            pcp_failure_rate: self.pcp.as_ref().map(|p| p.failure_rate()),
        }
    }
}

/// Fraction of `trials` plans at the prescribed sample size whose measured
/// accuracy `eps_effective` exceeds `eps`.
pub fn scheme_failure_rate(
    a: &DenseMatrix,
    k: usize,
    scheme: Scheme,
    eps: f64,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<TrialStats> {
    let setup = SchemeSetup::new(a, k, scheme, eps, delta)?;
    Ok(setup.run(eps, trials, 0, seed)?.conditions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::power_law;

    #[test]
    fn isometric_plans_never_fail() {
        let a = power_law(60, 12, 1.0, 3).unwrap();
        for scheme in [Scheme::LeverageMixed, Scheme::Ridge] {
            let setup = SchemeSetup::new(&a, 3, scheme, 0.5, 0.2).unwrap();
            let run = setup
                .run_with(0.5, 5, 5, 1, |_| SamplingPlan::isometry(60))
                .unwrap();
            assert_eq!(run.conditions.failures, 0);
            assert!(run.conditions.max < 1e-12);
            assert!(run.pcp.unwrap().max < 1e-12);
            assert!(run.records.iter().all(|r| r.s == 60));
        }
    }

    #[test]
    fn custom_scheme_rejected() {
        let a = power_law(20, 5, 1.0, 1).unwrap();
        assert!(SchemeSetup::new(&a, 2, Scheme::Custom, 0.5, 0.2).is_err());
    }

    #[test]
    fn constants() {
        assert_eq!(guarantee_constant(Scheme::LeverageMixed), 5.0);
        assert!((guarantee_constant(Scheme::Ridge) - 6.828_427_124_746_19).abs() < 1e-12);
    }

    #[test]
    fn small_run_is_reproducible_and_aggregates() {
        let a = power_law(80, 15, 1.0, 5).unwrap();
        let setup = SchemeSetup::new(&a, 3, Scheme::LeverageMixed, 0.5, 0.2)
            .unwrap()
            .with_sample_size(40)
            .unwrap();
        let r1 = setup.run(0.5, 8, 4, 9).unwrap();
        let r2 = setup.run(0.5, 8, 4, 9).unwrap();
        assert_eq!(r1, r2);
        let row = r1.aggregate();
        assert_eq!((row.s, row.trials), (40, 8));
        assert!(row.max_pcp_error.unwrap() <= r1.records.iter().map(|r| r.certified_error).fold(0.0, f64::max) + 1e-9);
    }
}
