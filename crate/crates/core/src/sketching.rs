//! Row-sampling sketches: probability constructions, the sampling-and-rescaling
//! plan, sketch application and sample-size bounds.
//!
//! A sketch `W ∈ R^{s×n}` has one nonzero per row, `W[t, j_t] = (s·p_{j_t})^{-1/2}`,
//! with the `j_t` drawn i.i.d. with replacement. It is stored as a
//! [`SamplingPlan`] (indices and scales) and never materialized densely on the
//! hot path.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{row_norms_sq, scale_columns, thin_svd, DenseMatrix, ThinSvd};

/// Largest tolerated deviation of `Σ p_i` from one before renormalization.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Sampling scheme tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Uniform,
    LeverageMixed,
    Ridge,
    /// Probabilities supplied by the caller (experiments, file input).
    Custom,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Uniform => "uniform",
            Scheme::LeverageMixed => "leverage_mixed",
            Scheme::Ridge => "ridge",
            Scheme::Custom => "custom",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Scheme::Uniform),
            "leverage" | "leverage_mixed" => Ok(Scheme::LeverageMixed),
            "ridge" => Ok(Scheme::Ridge),
            "custom" => Ok(Scheme::Custom),
            other => Err(Error::Parse(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Row sampling probabilities together with the floor constant `β`.
///
/// `β` is the guaranteed ratio between `p` and the canonical scores of the
/// scheme: `½` for mixed leverage probabilities, `1` for ridge leverage.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityVector {
    p: Vec<f64>,
    beta: f64,
    scheme: Scheme,
}

impl ProbabilityVector {
    /// Validates and renormalizes `p`. The sum must already be within
    /// [`NORMALIZATION_TOL`] of one.
    pub fn new(p: Vec<f64>, beta: f64, scheme: Scheme) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::Parameter("empty probability vector".into()));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::Parameter(format!("beta {beta} outside (0, 1]")));
        }
        if let Some(i) = p.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Parameter(format!("invalid probability p[{i}] = {}", p[i])));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Numerical(format!(
                "probabilities sum to {total:.17}, renormalization factor too far from 1"
            )));
        }
        let p = p.into_iter().map(|v| v / total).collect();
        Ok(Self { p, beta, scheme })
    }

    /// Normalizes arbitrary non-negative weights into probabilities (`β = 1`).
    pub fn from_weights(weights: &[f64], scheme: Scheme) -> Result<Self> {
        if let Some(i) = weights.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Parameter(format!("invalid weight w[{i}] = {}", weights[i])));
        }
        let total: f64 = weights.iter().sum();
        if total.is_nan() || total <= 0.0 {
            return Err(Error::Parameter("weights sum to zero".into()));
        }
        let p: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let s: f64 = p.iter().sum();
        Self::new(p.into_iter().map(|v| v / s).collect(), 1.0, scheme)
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }
}

/// `p_i = 1/n`, `β = 1`.
pub fn uniform_probs(n: usize) -> Result<ProbabilityVector> {
    if n == 0 {
        return Err(Error::Parameter("n must be >= 1".into()));
    }
    ProbabilityVector::new(vec![1.0 / n as f64; n], 1.0, Scheme::Uniform)
}

/// Uniform probabilities over the rows of `a`, with `β` measured against the
/// mixed-leverage canonical scores for target rank `k`.
pub fn uniform_probs_for(a: &DenseMatrix, k: usize) -> Result<ProbabilityVector> {
    let svd = thin_svd(a, None)?;
    let scores = CanonicalScores::from_svd(&svd, k)?;
    let n = a.rows();
    let p = 1.0 / n as f64;
    let mut beta: f64 = 1.0;
    for i in 0..n {
        for c in [scores.leverage[i], scores.residual.as_ref().map_or(0.0, |r| r[i])] {
            if c > 0.0 {
                beta = beta.min(p / c);
            }
        }
    }
    ProbabilityVector::new(vec![p; n], beta, Scheme::Uniform)
}

/// Normalized leverage and residual scores for rank `k`:
/// `‖(U_k)_{i*}‖²/k` and `‖(A_{k,⊥})_{i*}‖²/‖A_{k,⊥}‖_F²`.
#[derive(Clone, Debug)]
pub struct CanonicalScores {
    pub leverage: Vec<f64>,
    /// `None` when `A_{k,⊥}` vanishes.
    pub residual: Option<Vec<f64>>,
}

impl CanonicalScores {
    pub fn from_svd(svd: &ThinSvd, k: usize) -> Result<Self> {
        let r = svd.rank();
        if k < 1 {
            return Err(Error::Parameter("target rank k must be >= 1".into()));
        }
        if k > r {
            return Err(Error::Parameter(format!("target rank k = {k} exceeds rank {r}")));
        }
        let u = svd.u.as_matrix();
        let leverage: Vec<f64> = row_norms_sq(&u.columns(0, k).into_owned())
            .into_iter()
            .map(|l| l / k as f64)
            .collect();
        let residual = if k == r {
            None
        } else {
            // rows of A_{k,⊥} = U_{k:} Σ_{k:} V_{k:}ᵀ have the norms of U_{k:} Σ_{k:}
            let tail = scale_columns(&u.columns(k, r - k).into_owned(), &svd.sigma[k..]);
            let norms = row_norms_sq(&tail);
            let total: f64 = norms.iter().sum();
            if total > 0.0 {
                Some(norms.into_iter().map(|v| v / total).collect())
            } else {
                None
            }
        };
        Ok(Self { leverage, residual })
    }
}

/// Mixed leverage probabilities
/// `p_i = ½‖(U_k)_{i*}‖²/k + ½‖(A_{k,⊥})_{i*}‖²/‖A_{k,⊥}‖_F²`, `β = ½`.
///
/// When `A_{k,⊥} = 0` the residual term is undefined and the pure leverage
/// term `‖(U_k)_{i*}‖²/k` is returned with `β = 1`.
pub fn leverage_mixed_probs(a: &DenseMatrix, k: usize) -> Result<ProbabilityVector> {
    let svd = thin_svd(a, None)?;
    leverage_mixed_probs_from_svd(&svd, k)
}

pub fn leverage_mixed_probs_from_svd(svd: &ThinSvd, k: usize) -> Result<ProbabilityVector> {
    let scores = CanonicalScores::from_svd(svd, k)?;
    match scores.residual {
        Some(res) => {
            let p = scores
                .leverage
                .iter()
                .zip(&res)
                .map(|(l, r)| 0.5 * l + 0.5 * r)
                .collect();
            ProbabilityVector::new(p, 0.5, Scheme::LeverageMixed)
        }
        None => ProbabilityVector::new(scores.leverage, 1.0, Scheme::LeverageMixed),
    }
}

/// Ridge leverage quantities at `λ = ‖A_{k,⊥}‖_F²/k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RidgeContext {
    pub k: usize,
    pub lambda: f64,
    /// Row ridge leverage scores `τ_i = ‖(U Σ_λ)_{i*}‖²`.
    pub tau: Vec<f64>,
    /// `Σ τ_i = ‖Σ_λ‖_F²`.
    pub d_lambda: f64,
    /// Largest index with `σ_m² ≥ λ ≥ σ_{m+1}²` (1-based, `σ_{r+1} = 0`).
    pub m: usize,
    /// Diagonal of `Σ_λ`: `σ_i/√(σ_i²+λ)`.
    pub sigma_lambda: Vec<f64>,
    /// Singular values of the source matrix.
    pub sigma: Vec<f64>,
}

impl RidgeContext {
    /// `d_m = σ_m/√(σ_m²+λ)`.
    pub fn d_m(&self) -> f64 {
        self.sigma_lambda[self.m - 1]
    }
}

/// Ridge leverage probabilities `p_i = τ_i^λ/d_λ` with `λ = ‖A_{k,⊥}‖_F²/k`, `β = 1`.
pub fn ridge_leverage_probs(
    a: &DenseMatrix,
    k: usize,
) -> Result<(ProbabilityVector, RidgeContext)> {
    let svd = thin_svd(a, None)?;
    ridge_leverage_probs_from_svd(&svd, k)
}

pub fn ridge_leverage_probs_from_svd(
    svd: &ThinSvd,
    k: usize,
) -> Result<(ProbabilityVector, RidgeContext)> {
    let r = svd.rank();
    if k < 1 {
        return Err(Error::Parameter("target rank k must be >= 1".into()));
    }
    if k >= r {
        return Err(Error::DegenerateLambda { k });
    }
    let tail = svd.tail_energy(k);
    if tail.is_nan() || tail <= 0.0 {
        return Err(Error::DegenerateLambda { k });
    }
    let lambda = tail / k as f64;
    let sigma_lambda: Vec<f64> = svd
        .sigma
        .iter()
        .map(|s| s / (s * s + lambda).sqrt())
        .collect();
    let d_lambda: f64 = sigma_lambda.iter().map(|v| v * v).sum();

    // σ is sorted, so the largest valid m is the count of σ_i² ≥ λ
    let m = svd.sigma.iter().take_while(|s| *s * *s >= lambda).count();
    if m == 0 {
        return Err(Error::NoValidM {
            lambda,
            sigma1_sq: svd.sigma[0] * svd.sigma[0],
            k,
        });
    }

    let us = scale_columns(svd.u.as_matrix(), &sigma_lambda);
    let tau = row_norms_sq(&us);
    let p = tau.iter().map(|t| t / d_lambda).collect();
    let probs = ProbabilityVector::new(p, 1.0, Scheme::Ridge)?;
    let ctx = RidgeContext {
        k,
        lambda,
        tau,
        d_lambda,
        m,
        sigma_lambda,
        sigma: svd.sigma.clone(),
    };
    Ok((probs, ctx))
}

/// Sparse encoding of a sampling-and-rescaling matrix `W ∈ R^{s×n}`.
///
/// Row `t` of `W` has the single nonzero `scales[t]` in column `indices[t]`
/// (0-based). Repeated indices are kept: draws are i.i.d. with replacement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "PlanRecord", try_from = "PlanRecord")]
pub struct SamplingPlan {
    seed: u64,
    scheme: Scheme,
    indices: Vec<usize>,
    scales: Vec<f64>,
}

impl SamplingPlan {
    /// Builds a plan from explicit draws, setting `scale_t = (s·p_{j_t})^{-1/2}`.
    pub fn from_draws(probs: &ProbabilityVector, indices: Vec<usize>, seed: u64) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Parameter("sample count s must be >= 1".into()));
        }
        let s = indices.len() as f64;
        let p = probs.probs();
        let mut scales = Vec::with_capacity(indices.len());
        for &j in &indices {
            let pj = *p.get(j).ok_or(Error::Index {
                index: j + 1,
                max: p.len(),
            })?;
            if pj <= 0.0 {
                return Err(Error::Parameter(format!("row {j} has zero sampling probability")));
            }
            scales.push(1.0 / (s * pj).sqrt());
        }
        Ok(Self {
            seed,
            scheme: probs.scheme(),
            indices,
            scales,
        })
    }

    /// Plan with explicit indices and scales, e.g. reloaded from disk.
    pub fn from_parts(
        indices: Vec<usize>,
        scales: Vec<f64>,
        seed: u64,
        scheme: Scheme,
    ) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Parameter("sample count s must be >= 1".into()));
        }
        if indices.len() != scales.len() {
            return Err(Error::Dimension(format!(
                "{} indices but {} scales",
                indices.len(),
                scales.len()
            )));
        }
        if let Some(t) = scales.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Parameter(format!("scale {t} is not a positive finite value")));
        }
        Ok(Self {
            seed,
            scheme,
            indices,
            scales,
        })
    }

    /// Samples every one of `n` rows once under uniform probabilities, so
    /// that `WᵀW = I` up to rounding of the unit scales.
    pub fn isometry(n: usize) -> Result<Self> {
        let probs = uniform_probs(n)?;
        Self::from_draws(&probs, (0..n).collect(), 0)
    }

    pub fn s(&self) -> usize {
        self.indices.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    /// Plan with one row per distinct index and scale `(Σ_t scale_t²)^{1/2}`
    /// over its draws. `WᵀW` is diagonal, so the merged plan has the same
    /// `WᵀW` and hence the same `‖WAX‖_F` for every `X`, with at most `n` rows.
    pub fn merged(&self) -> SamplingPlan {
        let mut acc = std::collections::BTreeMap::new();
        for (&j, &c) in self.indices.iter().zip(&self.scales) {
            *acc.entry(j).or_insert(0.0) += c * c;
        }
        let (indices, scales) = acc.into_iter().map(|(j, w2): (usize, f64)| (j, w2.sqrt())).unzip();
        SamplingPlan {
            seed: self.seed,
            scheme: self.scheme,
            indices,
            scales,
        }
    }

    /// Dense `s × n` matrix `W`. Only used to cross-check [`apply_sketch`].
    pub fn to_dense(&self, n: usize) -> Result<DenseMatrix> {
        self.check_rows(n)?;
        let mut w = DMatrix::zeros(self.s(), n);
        for (t, (&j, &c)) in self.indices.iter().zip(&self.scales).enumerate() {
            w[(t, j)] = c;
        }
        Ok(DenseMatrix::wrap(w))
    }

    fn check_rows(&self, n: usize) -> Result<()> {
        match self.indices.iter().max() {
            Some(&j) if j >= n => Err(Error::Dimension(format!(
                "plan samples row {j} but the matrix has {n} rows"
            ))),
            _ => Ok(()),
        }
    }
}

/// JSON wire format of a plan: `{s, seed, scheme, indices[], scales[]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlanRecord {
    pub s: usize,
    pub seed: u64,
    pub scheme: Scheme,
    pub indices: Vec<usize>,
    pub scales: Vec<f64>,
}

impl From<SamplingPlan> for PlanRecord {
    fn from(p: SamplingPlan) -> Self {
        PlanRecord {
            s: p.indices.len(),
            seed: p.seed,
            scheme: p.scheme,
            indices: p.indices,
            scales: p.scales,
        }
    }
}

impl TryFrom<PlanRecord> for SamplingPlan {
    type Error = Error;

    fn try_from(r: PlanRecord) -> Result<Self> {
        if r.s != r.indices.len() {
            return Err(Error::Dimension(format!(
                "s = {} but {} indices",
                r.s,
                r.indices.len()
            )));
        }
        SamplingPlan::from_parts(r.indices, r.scales, r.seed, r.scheme)
    }
}

/// Draws `s` row indices i.i.d. from `probs` with a ChaCha8 stream seeded by `seed`.
pub fn build_sampling_plan(probs: &ProbabilityVector, s: usize, seed: u64) -> Result<SamplingPlan> {
    if s == 0 {
        return Err(Error::Parameter("sample count s must be >= 1".into()));
    }
    let dist = WeightedIndex::new(probs.probs())
        .map_err(|e| Error::Parameter(format!("invalid probabilities: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let indices: Vec<usize> = (0..s).map(|_| dist.sample(&mut rng)).collect();
    SamplingPlan::from_draws(probs, indices, seed)
}

/// `W·A` without forming `W`: row `t` is `scales[t] · A[indices[t], :]`.
pub fn apply_sketch(plan: &SamplingPlan, a: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(DenseMatrix::wrap(apply_sketch_raw(plan, a.as_matrix())?))
}

pub(crate) fn apply_sketch_raw(plan: &SamplingPlan, a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    plan.check_rows(a.nrows())?;
    let mut out = DMatrix::zeros(plan.s(), a.ncols());
    for (t, (&j, &c)) in plan.indices.iter().zip(&plan.scales).enumerate() {
        for col in 0..a.ncols() {
            out[(t, col)] = c * a[(j, col)];
        }
    }
    Ok(out)
}

fn check_accuracy(eps: f64, delta: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Parameter(format!("eps = {eps} outside (0, 1]")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!("delta = {delta} outside (0, 1)")));
    }
    Ok(())
}

// Rounding in terms like 8k/(δε²) can land a hair above an exact integer;
// values within a relative 1e-12 of an integer are taken to be it.
fn ceil_count(x: f64) -> usize {
    (x * (1.0 - 1e-12)).ceil() as usize
}

/// Rows needed by mixed leverage sampling:
/// `⌈max{(1+ε/3)·4k·ln(16(1+k)/δ)/ε², 8k/(δε²)}⌉`.
pub fn sample_size_leverage(k: usize, eps: f64, delta: f64) -> Result<usize> {
    check_accuracy(eps, delta)?;
    if k < 1 {
        return Err(Error::Parameter("target rank k must be >= 1".into()));
    }
    let k = k as f64;
    let spectral = (1.0 + eps / 3.0) * 4.0 * k * (16.0 * (1.0 + k) / delta).ln() / (eps * eps);
    let markov = 8.0 * k / (delta * eps * eps);
    Ok(ceil_count(spectral.max(markov)))
}

/// Rows needed by ridge leverage sampling:
/// `⌈max{(1+ε/3)·4k·ln(16(1+2k)/δ)/ε², 32k/(δε²)}⌉`.
pub fn sample_size_ridge(k: usize, eps: f64, delta: f64) -> Result<usize> {
    check_accuracy(eps, delta)?;
    if k < 1 {
        return Err(Error::Parameter("target rank k must be >= 1".into()));
    }
    let k = k as f64;
    let spectral =
        (1.0 + eps / 3.0) * 4.0 * k * (16.0 * (1.0 + 2.0 * k) / delta).ln() / (eps * eps);
    let markov = 32.0 * k / (delta * eps * eps);
    Ok(ceil_count(spectral.max(markov)))
}

/// Samples that make `‖A WᵀW Aᵀ − AAᵀ‖₂ ≤ ε` hold with probability `1 − δ` for
/// `‖A‖₂ ≤ 1`, sampling probabilities with floor `β` and `‖A‖_F² = frob_sq`:
/// `⌈2(1+ε/3)·‖A‖_F²/(βε²)·ln(4(1+‖A‖_F²)/δ)⌉`.
pub fn sample_size_spectral(frob_sq: f64, beta: f64, eps: f64, delta: f64) -> Result<usize> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::Parameter(format!("eps = {eps} must be > 0")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!("delta = {delta} outside (0, 1)")));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Parameter(format!("beta = {beta} outside (0, 1]")));
    }
    if !(frob_sq >= 0.0 && frob_sq.is_finite()) {
        return Err(Error::Parameter(format!("invalid squared norm {frob_sq}")));
    }
    let s = 2.0 * (1.0 + eps / 3.0) * frob_sq / (beta * eps * eps)
        * (4.0 * (1.0 + frob_sq) / delta).ln();
    Ok(ceil_count(s).max(1))
}

/// Sample count prescribed for a scheme; uniform sampling reuses the
/// leverage bound.
pub fn sample_size_for(scheme: Scheme, k: usize, eps: f64, delta: f64) -> Result<usize> {
    match scheme {
        Scheme::Ridge => sample_size_ridge(k, eps, delta),
        _ => sample_size_leverage(k, eps, delta),
    }
}
