//! Monte-Carlo harnesses and exact-expectation oracles.
//!
//! Every harness takes a master seed; trial `i` uses
//! [`derive_seed`](crate::seed::derive_seed)`(seed, i)`. Trials run in
//! parallel but results are collected in trial order and reduced with a
//! fixed pairwise summation tree, so statistics do not depend on the number
//! of threads.

mod kmeans;
mod matmul;
mod schemes;

pub use kmeans::{
    centroids, clustering_cost, clustering_cost_by_centroids, kmeans_demo, kmeans_membership,
    lloyd_step, random_assignment, sketched_clustering_gap, ClusterAssignment, KmeansDemo,
    KmeansTrial,
};
pub use matmul::{
    column_beta, enumerate_outcomes, exact_expectation, matmul_beta_bound, matmul_error_bound,
    matmul_error_exact, matmul_error_trials, matmul_expected_error, matmul_sketch_error,
    spectral_concentration_trials, spectral_sketch_error, trace_error_bound, trace_error_exact,
    trace_error_trials, trace_expected_error, trace_sketch_error, EXHAUSTIVE_LIMIT,
};
pub use schemes::{
    guarantee_constant, scheme_failure_rate, AggregateRow, SchemeRun, SchemeSetup, TrialRecord,
};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::seed::derive_seed;

/// Summary of a batch of scalar trial outcomes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialStats {
    pub trials: usize,
    pub mean: f64,
    /// Unbiased sample variance; zero for a single trial.
    pub variance: f64,
    pub max: f64,
    /// Number of outcomes strictly above `threshold`.
    pub failures: usize,
    pub threshold: f64,
}

impl TrialStats {
    pub fn from_values(values: &[f64], threshold: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Parameter("at least one trial is required".into()));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Numerical("NaN trial outcome".into()));
        }
        let n = values.len();
        let mean = pairwise_sum(values) / n as f64;
        let variance = if n > 1 {
            let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
            pairwise_sum(&dev) / (n - 1) as f64
        } else {
            0.0
        };
        Ok(Self {
            trials: n,
            mean,
            variance,
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            failures: values.iter().filter(|v| **v > threshold).count(),
            threshold,
        })
    }

    pub fn failure_rate(&self) -> f64 {
        self.failures as f64 / self.trials as f64
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        (self.variance / self.trials as f64).sqrt()
    }
}

/// Upper edge of a `z`-sigma binomial band around rate `p` for `trials` draws.
pub fn binomial_band(p: f64, trials: usize, z: f64) -> f64 {
    p + z * (p * (1.0 - p) / trials as f64).sqrt()
}

/// Sum with a balanced binary tree; the result depends only on the order of `v`.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        v.iter().sum()
    } else {
        let (l, r) = v.split_at(v.len() / 2);
        pairwise_sum(l) + pairwise_sum(r)
    }
}

/// Runs `f(trial, derive_seed(seed, trial))` for every trial in parallel and
/// returns the outcomes in trial order.
pub fn run_trials<T, F>(trials: usize, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, u64) -> Result<T> + Sync,
{
    if trials == 0 {
        return Err(Error::Parameter("trials must be >= 1".into()));
    }
    (0..trials)
        .into_par_iter()
        .map(|i| f(i, derive_seed(seed, i as u64)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_small() {
        let s = TrialStats::from_values(&[1.0, 2.0, 3.0, 6.0], 2.5).unwrap();
        assert_eq!(s.trials, 4);
        assert_eq!(s.mean, 3.0);
        assert!((s.variance - 14.0 / 3.0).abs() < 1e-15);
        assert_eq!((s.max, s.failures), (6.0, 2));
        assert_eq!(s.failure_rate(), 0.5);
        let one = TrialStats::from_values(&[4.0], 0.0).unwrap();
        assert_eq!((one.variance, one.failures), (0.0, 1));
        assert!(TrialStats::from_values(&[], 0.0).is_err());
    }

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let v: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 500_500.0);
    }

    #[test]
    fn trials_are_ordered_and_seeded() {
        let out = run_trials(50, 3, |i, s| Ok((i, s))).unwrap();
        for (i, (j, s)) in out.into_iter().enumerate() {
            assert_eq!((i, s), (j, derive_seed(3, i as u64)));
        }
        assert!(run_trials(0, 3, |_, _| Ok(())).is_err());
    }

    #[test]
    fn band() {
        assert!((binomial_band(0.1, 200, 3.0) - (0.1 + 3.0 * (0.09f64 / 200.0).sqrt())).abs() < 1e-15);
    }
}
