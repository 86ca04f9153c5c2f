//! Approximate matrix multiplication by sampling the inner dimension.
//!
//! For `A ∈ R^{m×n}`, `B ∈ R^{n×p}` and a plan `W ∈ R^{s×n}`, the estimator
//! `AWᵀWB` is unbiased for `AB`, with
//!
//! ```text
//! E‖AWᵀWB − AB‖_F²      = (Σ_i ‖A_{*i}‖²‖B_{i*}‖²/p_i − ‖AB‖_F²) / s
//! E(tr(AWᵀWB − AB))²    = (Σ_i (BA)_ii²/p_i − tr(AB)²) / s
//! ```
//!
//! whenever `p_i > 0` on every column that contributes. Dropping the
//! subtracted term gives the usual upper bounds.

use nalgebra::DMatrix;

use super::{run_trials, TrialStats};
use crate::error::{Error, Result};
use crate::linalg::{symmetric_spectral_norm, DenseMatrix};
use crate::sketching::{apply_sketch_raw, build_sampling_plan, ProbabilityVector, SamplingPlan};

/// Largest number of outcome sequences `nˢ` enumerated exactly.
pub const EXHAUSTIVE_LIMIT: usize = 64;

/// Slack on `‖A‖₂ ≤ 1` for the spectral concentration harness.
const SPECTRAL_PRECONDITION_TOL: f64 = 1e-10;

fn check_inner(a: &DenseMatrix, b: &DenseMatrix, p: &ProbabilityVector) -> Result<()> {
    if a.cols() != b.rows() {
        return Err(Error::Dimension(format!(
            "A is {}x{} but B is {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    if p.len() != a.cols() {
        return Err(Error::Dimension(format!(
            "{} probabilities for inner dimension {}",
            p.len(),
            a.cols()
        )));
    }
    Ok(())
}

fn check_square_product(a: &DenseMatrix, b: &DenseMatrix) -> Result<()> {
    if a.rows() != b.cols() {
        return Err(Error::Dimension(format!(
            "AB is {}x{}, not square",
            a.rows(),
            b.cols()
        )));
    }
    Ok(())
}

/// `Σ_i c_i / (s·p_i)`; infinite (with a warning) if some `c_i > 0` has `p_i = 0`.
fn weighted_sum(c: &[f64], p: &[f64], s: usize, what: &str) -> f64 {
    let mut total = 0.0;
    for (i, (&ci, &pi)) in c.iter().zip(p).enumerate() {
        if ci == 0.0 {
            continue;
        }
        if pi == 0.0 {
            log::warn!("{what}: column {i} contributes but has zero probability; bound is infinite");
            return f64::INFINITY;
        }
        total += ci / pi;
    }
    total / s as f64
}

fn frobenius_terms(a: &DenseMatrix, b: &DenseMatrix) -> Vec<f64> {
    (0..a.cols())
        .map(|i| a.column(i).norm_squared() * b.row(i).norm_squared())
        .collect()
}

fn trace_terms(a: &DenseMatrix, b: &DenseMatrix) -> Vec<f64> {
    (0..a.cols())
        .map(|i| {
            let ba_ii = b.row(i).transpose().dot(&a.column(i));
            ba_ii * ba_ii
        })
        .collect()
}

/// `Σ_i ‖A_{*i}‖²‖B_{i*}‖² / (s·p_i)`.
pub fn matmul_error_bound(
    a: &DenseMatrix,
    b: &DenseMatrix,
    p: &ProbabilityVector,
    s: usize,
) -> Result<f64> {
    check_inner(a, b, p)?;
    Ok(weighted_sum(&frobenius_terms(a, b), p.probs(), s, "matmul bound"))
}

/// Exact `E‖AWᵀWB − AB‖_F²`.
pub fn matmul_expected_error(
    a: &DenseMatrix,
    b: &DenseMatrix,
    p: &ProbabilityVector,
    s: usize,
) -> Result<f64> {
    let bound = matmul_error_bound(a, b, p, s)?;
    let ab = (a.as_matrix() * b.as_matrix()).norm_squared();
    Ok(bound - ab / s as f64)
}

/// `Σ_i (BA)_ii² / (s·p_i)`.
pub fn trace_error_bound(
    a: &DenseMatrix,
    b: &DenseMatrix,
    p: &ProbabilityVector,
    s: usize,
) -> Result<f64> {
    check_inner(a, b, p)?;
    check_square_product(a, b)?;
    Ok(weighted_sum(&trace_terms(a, b), p.probs(), s, "trace bound"))
}

/// Exact `E(tr(AWᵀWB − AB))²`.
pub fn trace_expected_error(
    a: &DenseMatrix,
    b: &DenseMatrix,
    p: &ProbabilityVector,
    s: usize,
) -> Result<f64> {
    let bound = trace_error_bound(a, b, p, s)?;
    let tr = (a.as_matrix() * b.as_matrix()).trace();
    Ok(bound - tr * tr / s as f64)
}

/// Largest `β ≤ 1` with `p_i ≥ β‖A_{*i}‖²/‖A‖_F²` for all `i`.
pub fn column_beta(a: &DenseMatrix, p: &ProbabilityVector) -> Result<f64> {
    if p.len() != a.cols() {
        return Err(Error::Dimension(format!(
            "{} probabilities for {} columns",
            p.len(),
            a.cols()
        )));
    }
    let total = a.norm_squared();
    let mut beta: f64 = 1.0;
    for (i, &pi) in p.probs().iter().enumerate() {
        let c = a.column(i).norm_squared();
        if c > 0.0 {
            beta = beta.min(pi * total / c);
        }
    }
    Ok(beta)
}

/// `‖A‖_F²‖B‖_F² / (β·s)` with `β = column_beta(A, p)`.
pub fn matmul_beta_bound(
    a: &DenseMatrix,
    b: &DenseMatrix,
    p: &ProbabilityVector,
    s: usize,
) -> Result<f64> {
    check_inner(a, b, p)?;
    let beta = column_beta(a, p)?;
    if beta <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(a.norm_squared() * b.norm_squared() / (beta * s as f64))
}

/// `‖AWᵀWB − AB‖_F²` for one plan.
pub fn matmul_sketch_error(a: &DenseMatrix, b: &DenseMatrix, plan: &SamplingPlan) -> Result<f64> {
    let ab = a.as_matrix() * b.as_matrix();
    Ok((sketched_product(a, b, plan)? - ab).norm_squared())
}

/// `(tr(AWᵀWB − AB))²` for one plan.
pub fn trace_sketch_error(a: &DenseMatrix, b: &DenseMatrix, plan: &SamplingPlan) -> Result<f64> {
    check_square_product(a, b)?;
    let ab = a.as_matrix() * b.as_matrix();
    let e = (sketched_product(a, b, plan)? - ab).trace();
    Ok(e * e)
}

fn sketched_product(a: &DenseMatrix, b: &DenseMatrix, plan: &SamplingPlan) -> Result<DMatrix<f64>> {
    if a.cols() != b.rows() {
        return Err(Error::Dimension("inner dimensions differ".into()));
    }
    let wat = apply_sketch_raw(plan, &a.transpose())?;
    let wb = apply_sketch_raw(plan, b.as_matrix())?;
    Ok(wat.transpose() * wb)
}

/// `‖AWᵀWAᵀ − AAᵀ‖₂` for one plan sampling the columns of `A`.
pub fn spectral_sketch_error(a: &DenseMatrix, plan: &SamplingPlan) -> Result<f64> {
    let wat = apply_sketch_raw(plan, &a.transpose())?;
    let e = wat.transpose() * &wat - a.as_matrix() * a.transpose();
    Ok(symmetric_spectral_norm(&e))
}

/// All outcome sequences of `s` draws from `p` with their probabilities,
/// in lexicographic order. Sequences of zero probability are skipped.
pub fn enumerate_outcomes(p: &ProbabilityVector, s: usize) -> Result<Vec<(f64, Vec<usize>)>> {
    let n = p.len();
    let total = u32::try_from(s)
        .ok()
        .and_then(|e| n.checked_pow(e))
        .filter(|t| *t <= EXHAUSTIVE_LIMIT);
    let Some(total) = total else {
        return Err(Error::Parameter(format!(
            "{n}^{s} outcome sequences exceed the enumeration limit {EXHAUSTIVE_LIMIT}"
        )));
    };
    if s == 0 {
        return Err(Error::Parameter("sample count s must be >= 1".into()));
    }
    let mut out = Vec::new();
    for code in 0..total {
        let mut rest = code;
        let mut seq = vec![0; s];
        for slot in seq.iter_mut().rev() {
            *slot = rest % n;
            rest /= n;
        }
        let w: f64 = seq.iter().map(|&j| p.probs()[j]).product();
        if w > 0.0 {
            out.push((w, seq));
        }
    }
    Ok(out)
}

/// `E f(W)` over every outcome sequence of `s` draws from `p`.
pub fn exact_expectation<F>(p: &ProbabilityVector, s: usize, f: F) -> Result<f64>
where
    F: Fn(&SamplingPlan) -> Result<f64>,
{
    let mut total = 0.0;
    for (w, seq) in enumerate_outcomes(p, s)? {
        total += w * f(&SamplingPlan::from_draws(p, seq, 0)?)?;
    }
    Ok(total)
}

/// Exact mean of `‖AWᵀWB − AB‖_F²` by enumeration.
pub fn matmul_error_exact(
    a: &DenseMatrix,
    b: &DenseMatrix,
    p: &ProbabilityVector,
    s: usize,
) -> Result<f64> {
    check_inner(a, b, p)?;
    exact_expectation(p, s, |plan| matmul_sketch_error(a, b, plan))
}

/// Exact mean of `(tr(AWᵀWB − AB))²` by enumeration.
pub fn trace_error_exact(
    a: &DenseMatrix,
    b: &DenseMatrix,
    p: &ProbabilityVector,
    s: usize,
) -> Result<f64> {
    check_inner(a, b, p)?;
    check_square_product(a, b)?;
    exact_expectation(p, s, |plan| trace_sketch_error(a, b, plan))
}

/// Samples `‖AWᵀWB − AB‖_F²` over `trials` plans. The threshold is the
/// expectation bound, so `failures` counts trials above it.
pub fn matmul_error_trials(
    a: &DenseMatrix,
    b: &DenseMatrix,
    p: &ProbabilityVector,
    s: usize,
    trials: usize,
    seed: u64,
) -> Result<TrialStats> {
    let bound = matmul_error_bound(a, b, p, s)?;
    let values = run_trials(trials, seed, |_, ts| {
        matmul_sketch_error(a, b, &build_sampling_plan(p, s, ts)?)
    })?;
    TrialStats::from_values(&values, bound)
}

/// Samples `(tr(AWᵀWB − AB))²` over `trials` plans; threshold as above.
pub fn trace_error_trials(
    a: &DenseMatrix,
    b: &DenseMatrix,
    p: &ProbabilityVector,
    s: usize,
    trials: usize,
    seed: u64,
) -> Result<TrialStats> {
    let bound = trace_error_bound(a, b, p, s)?;
    let values = run_trials(trials, seed, |_, ts| {
        trace_sketch_error(a, b, &build_sampling_plan(p, s, ts)?)
    })?;
    TrialStats::from_values(&values, bound)
}

/// Samples `‖AWᵀWAᵀ − AAᵀ‖₂` for `A` with `‖A‖₂ ≤ 1`; failures are trials above `eps`.
pub fn spectral_concentration_trials(
    a: &DenseMatrix,
    p: &ProbabilityVector,
    s: usize,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<TrialStats> {
    let norm = a.spectral_norm();
    if norm > 1.0 + SPECTRAL_PRECONDITION_TOL {
        return Err(Error::Precondition(format!(
            "spectral norm {norm} exceeds 1; rescale A first"
        )));
    }
    if p.len() != a.cols() {
        return Err(Error::Dimension(format!(
            "{} probabilities for {} columns",
            p.len(),
            a.cols()
        )));
    }
    let values = run_trials(trials, seed, |_, ts| {
        spectral_sketch_error(a, &build_sampling_plan(p, s, ts)?)
    })?;
    TrialStats::from_values(&values, eps)
}
