//! Numerical certificates for projection-cost preservation.
//!
//! Given `A`, a sampling plan `W` and a diagonal weighting `Σ̃`, the four
//! structural quantities
//!
//! ```text
//! lhs1 = ‖Σ̃Uᵀ WᵀW UΣ̃ − Σ̃²‖₂
//! lhs2 = ‖Σ̃Uᵀ WᵀW A_{m,⊥} − Σ̃Uᵀ A_{m,⊥}‖_F
//! lhs3 = ‖A_{m,⊥}ᵀ WᵀW A_{m,⊥} − A_{m,⊥}ᵀ A_{m,⊥}‖_F
//! lhs4 = |‖W A_{m,⊥}‖_F² − ‖A_{m,⊥}‖_F²|
//! ```
//!
//! are measured and folded into one accuracy
//! `ε = max{lhs1, lhs2/ρ, √k·lhs3/ρ², lhs4/ρ²}` with `ρ = ‖A_{k,⊥}‖_F`.
//! Since `ρ ≤ ‖AX‖_F` for every orthonormal `X ∈ R^{d×(d−k)}`, the sketch is
//! then a rank-`k` projection-cost preserving sketch with error at most
//! `(d_m⁻² + 2d_m⁻¹ + 2)·ε`. Nothing here is assumed: the certificate holds
//! for every plan, including adversarial ones.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    complement_basis, haar_orthonormal, rank_split, scale_columns, symmetric_spectral_norm,
    thin_svd, DenseMatrix, OrthonormalBasis, ThinSvd,
};
use crate::seed::derive_seed;
use crate::sketching::{apply_sketch_raw, RidgeContext, SamplingPlan};

/// Absolute slack on theorem checks, for rounding across Gram products.
pub const THEOREM_SLACK: f64 = 1e-9;

/// Relative size below which `‖AX‖_F` is treated as zero.
pub const DEGENERATE_REL_TOL: f64 = 1e-12;

/// Diagonal weighting `Σ̃ = diag(d₁, …, d_q, 0, …, 0)` with split index `m`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaTilde {
    d: Vec<f64>,
    q: usize,
    m: usize,
}

impl SigmaTilde {
    /// Requires `d` non-increasing with exactly `q ≥ 1` leading positive
    /// entries and zeros after, and `1 ≤ m ≤ q`.
    pub fn new(d: Vec<f64>, m: usize) -> Result<Self> {
        if d.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Parameter("Σ̃ entries must be finite and >= 0".into()));
        }
        if d.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Parameter("Σ̃ entries must be non-increasing".into()));
        }
        let q = d.iter().take_while(|v| **v > 0.0).count();
        if q == 0 {
            return Err(Error::Parameter("Σ̃ needs at least one positive entry".into()));
        }
        if m < 1 || m > q {
            return Err(Error::Index { index: m, max: q });
        }
        Ok(Self { d, q, m })
    }

    pub fn diag(&self) -> &[f64] {
        &self.d
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rank(&self) -> usize {
        self.d.len()
    }

    pub fn d_m(&self) -> f64 {
        self.d[self.m - 1]
    }

    /// `d_m⁻² + 2d_m⁻¹ + 2`.
    pub fn bound_constant(&self) -> f64 {
        let inv = 1.0 / self.d_m();
        inv * inv + 2.0 * inv + 2.0
    }
}

/// Binary weighting `diag(1, …, 1, 0, …, 0)` with `q = m = k`; its bound
/// constant is exactly 5.
pub fn sigma_tilde_leverage(svd: &ThinSvd, k: usize) -> Result<SigmaTilde> {
    let r = svd.rank();
    if k < 1 || k > r {
        return Err(Error::Parameter(format!("target rank k = {k} outside 1..={r}")));
    }
    let d = (0..r).map(|i| if i < k { 1.0 } else { 0.0 }).collect();
    SigmaTilde::new(d, k)
}

/// `Σ̃ = Σ_λ` with `q = r` and the split index of the ridge context.
pub fn sigma_tilde_ridge(ctx: &RidgeContext) -> Result<SigmaTilde> {
    SigmaTilde::new(ctx.sigma_lambda.clone(), ctx.m)
}

/// Measured structural quantities and the resulting certificate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub lhs1: f64,
    pub lhs2: f64,
    pub lhs3: f64,
    pub lhs4: f64,
    pub eps_effective: f64,
    pub bound_constant: f64,
    pub certified_error: f64,
    pub m: usize,
    pub k: usize,
    /// `‖A_{k,⊥}‖_F`, the normalizer of conditions 2–4.
    pub rho: f64,
}

impl ConditionReport {
    /// `[lhs1, lhs2/ρ, √k·lhs3/ρ², lhs4/ρ²]`; the last three are zero when `ρ = 0`.
    pub fn normalized(&self) -> [f64; 4] {
        normalize(self.lhs1, self.lhs2, self.lhs3, self.lhs4, self.rho, self.k)
    }
}

fn normalize(lhs1: f64, lhs2: f64, lhs3: f64, lhs4: f64, rho: f64, k: usize) -> [f64; 4] {
    if rho > 0.0 {
        let rho2 = rho * rho;
        [lhs1, lhs2 / rho, (k as f64).sqrt() * lhs3 / rho2, lhs4 / rho2]
    } else {
        [lhs1, 0.0, 0.0, 0.0]
    }
}

/// Result of [`verify_theorem`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremCheck {
    pub report: ConditionReport,
    /// Largest relative projection-cost error over all tested subspaces.
    pub max_observed: f64,
    /// Error on the bottom `d − k` right singular subspace.
    pub adversarial_error: f64,
    pub x_samples: usize,
    pub holds: bool,
}

/// Precomputed spectral data of `A` for evaluating many plans against one `Σ̃`.
#[derive(Clone, Debug)]
pub struct ConditionEvaluator {
    a: DenseMatrix,
    svd: ThinSvd,
    sigma_tilde: SigmaTilde,
    k: usize,
    rho: f64,
    /// `U Σ̃`
    u_st: DMatrix<f64>,
    a_m_perp: DMatrix<f64>,
    /// `Σ̃ Uᵀ A_{m,⊥}`
    st_ut_amp: DMatrix<f64>,
    /// `A_{m,⊥}ᵀ A_{m,⊥}`
    amp_gram: DMatrix<f64>,
    amp_frob_sq: f64,
    st_sq: Vec<f64>,
}

impl ConditionEvaluator {
    pub fn new(a: &DenseMatrix, sigma_tilde: SigmaTilde, k: usize) -> Result<Self> {
        let svd = thin_svd(a, None)?;
        Self::with_svd(a, svd, sigma_tilde, k)
    }

    pub fn with_svd(
        a: &DenseMatrix,
        svd: ThinSvd,
        sigma_tilde: SigmaTilde,
        k: usize,
    ) -> Result<Self> {
        let (n, d) = (a.rows(), a.cols());
        if svd.nrows() != n || svd.ncols() != d {
            return Err(Error::Dimension("SVD does not match the matrix".into()));
        }
        if k < 1 || k >= d {
            return Err(Error::Parameter(format!("target rank k = {k} outside 1..{d}")));
        }
        if sigma_tilde.rank() != svd.rank() {
            return Err(Error::Dimension(format!(
                "Σ̃ has {} entries but rank is {}",
                sigma_tilde.rank(),
                svd.rank()
            )));
        }
        let split = rank_split(&svd, sigma_tilde.m())?;
        let rho = svd.tail_energy(k).sqrt();
        let u_st = scale_columns(svd.u.as_matrix(), sigma_tilde.diag());
        let a_m_perp = split.a_m_perp.into_matrix();
        let st_ut_amp = u_st.transpose() * &a_m_perp;
        let amp_gram = a_m_perp.transpose() * &a_m_perp;
        let amp_frob_sq = a_m_perp.norm_squared();
        let st_sq = sigma_tilde.diag().iter().map(|v| v * v).collect();
        Ok(Self {
            a: a.clone(),
            svd,
            sigma_tilde,
            k,
            rho,
            u_st,
            a_m_perp,
            st_ut_amp,
            amp_gram,
            amp_frob_sq,
            st_sq,
        })
    }

    pub fn svd(&self) -> &ThinSvd {
        &self.svd
    }

    pub fn sigma_tilde(&self) -> &SigmaTilde {
        &self.sigma_tilde
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn a_m_perp(&self) -> &DMatrix<f64> {
        &self.a_m_perp
    }

    pub fn evaluate(&self, plan: &SamplingPlan) -> Result<ConditionReport> {
        let w_ust = apply_sketch_raw(plan, &self.u_st)?;
        let mut e1 = w_ust.transpose() * &w_ust;
        for (i, v) in self.st_sq.iter().enumerate() {
            e1[(i, i)] -= v;
        }
        let lhs1 = symmetric_spectral_norm(&e1);

        let w_amp = apply_sketch_raw(plan, &self.a_m_perp)?;
        let lhs2 = (w_ust.transpose() * &w_amp - &self.st_ut_amp).norm();
        let lhs3 = (w_amp.transpose() * &w_amp - &self.amp_gram).norm();
        let lhs4 = (w_amp.norm_squared() - self.amp_frob_sq).abs();

        Ok(self.report(lhs1, lhs2, lhs3, lhs4))
    }

    fn report(&self, lhs1: f64, lhs2: f64, lhs3: f64, lhs4: f64) -> ConditionReport {
        let (lhs2, lhs3, lhs4) = if self.rho > 0.0 {
            (lhs2, lhs3, lhs4)
        } else {
            (0.0, 0.0, 0.0)
        };
        let eps_effective = normalize(lhs1, lhs2, lhs3, lhs4, self.rho, self.k)
            .into_iter()
            .fold(0.0, f64::max);
        let bound_constant = self.sigma_tilde.bound_constant();
        ConditionReport {
            lhs1,
            lhs2,
            lhs3,
            lhs4,
            eps_effective,
            bound_constant,
            certified_error: bound_constant * eps_effective,
            m: self.sigma_tilde.m(),
            k: self.k,
            rho: self.rho,
        }
    }

    /// `‖Uᵀ(WᵀW − I)U‖₂`, the supremum of the relative error over all directions.
    pub fn worst_case_error(&self, plan: &SamplingPlan) -> Result<f64> {
        worst_case_from_svd(&self.svd, plan)
    }

    /// Bottom `d − k` right singular subspace, the minimizer of `‖AX‖_F`.
    pub fn adversarial_basis(&self) -> Result<OrthonormalBasis> {
        let d = self.a.cols();
        let top = self.k.min(self.svd.rank());
        let vk = self.svd.v.columns(0, top).into_owned();
        let comp = complement_basis(&OrthonormalBasis::new(DenseMatrix::wrap(vk))?)?;
        let x = comp.matrix().columns(0, d - self.k).into_owned();
        Ok(OrthonormalBasis::new_unchecked(DenseMatrix::wrap(x)))
    }

    /// Evaluates the conditions and checks the certificate against
    /// `x_samples` Haar subspaces plus the adversarial one.
    pub fn verify(&self, plan: &SamplingPlan, x_samples: usize, seed: u64) -> Result<TheoremCheck> {
        let report = self.evaluate(plan)?;
        // same WᵀW, at most n rows
        let wa = DenseMatrix::wrap(apply_sketch_raw(&plan.merged(), self.a.as_matrix())?);
        let d = self.a.cols();
        let codim = d - self.k;

        let errors: Vec<f64> = (0..x_samples as u64)
            .into_par_iter()
            .map(|i| {
                let x = haar_orthonormal(d, codim, derive_seed(seed, i))?;
                pcp_error(&self.a, &wa, &x)
            })
            .collect::<Result<_>>()?;
        let adversarial_error = pcp_error(&self.a, &wa, &self.adversarial_basis()?)?;
        let max_observed = errors.into_iter().fold(adversarial_error, f64::max);
        let holds = max_observed <= report.certified_error + THEOREM_SLACK;
        Ok(TheoremCheck {
            report,
            max_observed,
            adversarial_error,
            x_samples,
            holds,
        })
    }
}

/// Evaluates the four structural conditions of `plan` on `a`.
pub fn evaluate_conditions(
    a: &DenseMatrix,
    plan: &SamplingPlan,
    sigma_tilde: &SigmaTilde,
    k: usize,
) -> Result<ConditionReport> {
    ConditionEvaluator::new(a, sigma_tilde.clone(), k)?.evaluate(plan)
}

/// Relative projection-cost error `|‖WAX‖_F² − ‖AX‖_F²| / ‖AX‖_F²`.
///
/// When `‖AX‖_F` vanishes (relative to `‖A‖_F`) the error is zero if `‖WAX‖_F`
/// vanishes too, and a degenerate-denominator error otherwise.
pub fn pcp_error(a: &DenseMatrix, wa: &DenseMatrix, x: &OrthonormalBasis) -> Result<f64> {
    if a.cols() != x.dim() || wa.cols() != x.dim() {
        return Err(Error::Dimension(format!(
            "A has {} columns, WA has {}, X has {} rows",
            a.cols(),
            wa.cols(),
            x.dim()
        )));
    }
    let xm = x.matrix().as_matrix();
    let ax = (a.as_matrix() * xm).norm_squared();
    let wax = (wa.as_matrix() * xm).norm_squared();
    let floor = DEGENERATE_REL_TOL * a.frobenius_norm();
    if ax.sqrt() <= floor {
        let wfloor = DEGENERATE_REL_TOL * a.frobenius_norm().max(wa.frobenius_norm());
        return if wax.sqrt() <= wfloor {
            Ok(0.0)
        } else {
            Err(Error::DegenerateDenominator(wax.sqrt()))
        };
    }
    Ok((wax - ax).abs() / ax)
}

/// `‖Uᵀ(WᵀW − I)U‖₂` computed from the `s × r` sketch of `U`. Upper-bounds
/// [`pcp_error`] for every `k` and `X`.
pub fn worst_case_error(a: &DenseMatrix, plan: &SamplingPlan) -> Result<f64> {
    worst_case_from_svd(&thin_svd(a, None)?, plan)
}

fn worst_case_from_svd(svd: &ThinSvd, plan: &SamplingPlan) -> Result<f64> {
    let wu = apply_sketch_raw(plan, svd.u.as_matrix())?;
    let r = svd.rank();
    let e = wu.transpose() * &wu - DMatrix::<f64>::identity(r, r);
    Ok(symmetric_spectral_norm(&e))
}

/// Evaluates the conditions and compares the certified error with observed
/// errors on `x_samples` Haar subspaces (seeded from `seed`) plus the bottom
/// right singular subspace.
pub fn verify_theorem(
    a: &DenseMatrix,
    plan: &SamplingPlan,
    sigma_tilde: &SigmaTilde,
    k: usize,
    x_samples: usize,
    seed: u64,
) -> Result<TheoremCheck> {
    ConditionEvaluator::new(a, sigma_tilde.clone(), k)?.verify(plan, x_samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sketching::{
        build_sampling_plan, leverage_mixed_probs, ridge_leverage_probs, Scheme,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn diag21() -> DenseMatrix {
        DenseMatrix::from_diagonal(&[2.0, 1.0]).unwrap()
    }

    fn gaussian(n: usize, d: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::new(DMatrix::from_fn(n, d, |_, _| StandardNormal.sample(&mut rng))).unwrap()
    }

    fn first_row_plan() -> SamplingPlan {
        // single draw of row 1 under p = (½, ½): scale (1·½)^{-1/2} = √2
        SamplingPlan::from_parts(vec![0], vec![2f64.sqrt()], 0, Scheme::Custom).unwrap()
    }

    /// Same quantities through a dense `WᵀW`.
    fn dense_route(a: &DenseMatrix, plan: &SamplingPlan, st: &SigmaTilde, k: usize) -> [f64; 4] {
        let svd = thin_svd(a, None).unwrap();
        let w = plan.to_dense(a.rows()).unwrap();
        let wtw = w.transpose() * w.as_matrix();
        let st_m = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(st.diag()));
        let u = svd.u.as_matrix();
        let amp = rank_split(&svd, st.m()).unwrap().a_m_perp.into_matrix();
        let lhs1 = symmetric_spectral_norm(&(&st_m * u.transpose() * &wtw * u * &st_m - &st_m * &st_m));
        let lhs2 = (&st_m * u.transpose() * &wtw * &amp - &st_m * u.transpose() * &amp).norm();
        let lhs3 = (amp.transpose() * &wtw * &amp - amp.transpose() * &amp).norm();
        let lhs4 = ((w.as_matrix() * &amp).norm_squared() - amp.norm_squared()).abs();
        let _ = k;
        [lhs1, lhs2, lhs3, lhs4]
    }

    #[test]
    fn leverage_sigma_tilde() {
        let a = gaussian(10, 4, 1);
        let svd = thin_svd(&a, None).unwrap();
        let st = sigma_tilde_leverage(&svd, 2).unwrap();
        assert_eq!(st.diag(), &[1.0, 1.0, 0.0, 0.0]);
        assert_eq!((st.m(), st.q(), st.d_m()), (2, 2, 1.0));
        assert_eq!(st.bound_constant(), 5.0);
        let full = sigma_tilde_leverage(&svd, 4).unwrap();
        assert_eq!(full.diag(), &[1.0; 4]);
        assert!(sigma_tilde_leverage(&svd, 5).is_err());
        assert!(sigma_tilde_leverage(&svd, 0).is_err());
    }

    #[test]
    fn ridge_sigma_tilde_on_diag21() {
        let (_, ctx) = ridge_leverage_probs(&diag21(), 1).unwrap();
        let st = sigma_tilde_ridge(&ctx).unwrap();
        assert!((st.diag()[0] - 2.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!((st.diag()[1] - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!((st.q(), st.m()), (2, 2));
        let c = st.bound_constant();
        assert!((c - (4.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
        assert!(c <= 4.0 + 2.0 * 2f64.sqrt() + 1e-12);
    }

    #[test]
    fn sigma_tilde_validation() {
        assert!(SigmaTilde::new(vec![1.0, 2.0], 1).is_err());
        assert!(SigmaTilde::new(vec![0.0, 0.0], 1).is_err());
        assert!(SigmaTilde::new(vec![1.0, 0.0], 2).is_err());
        assert!(SigmaTilde::new(vec![1.0, 0.5, 0.0], 2).is_ok());
    }

    #[test]
    fn isometry_gives_zero_conditions() {
        let a = gaussian(12, 5, 2);
        let svd = thin_svd(&a, None).unwrap();
        let st = sigma_tilde_leverage(&svd, 2).unwrap();
        let rep = evaluate_conditions(&a, &SamplingPlan::isometry(12).unwrap(), &st, 2).unwrap();
        for v in [rep.lhs1, rep.lhs2, rep.lhs3, rep.lhs4, rep.certified_error] {
            assert!(v < 1e-13, "{rep:?}");
        }
    }

    #[test]
    fn hand_example_conditions() {
        let a = diag21();
        let svd = thin_svd(&a, None).unwrap();
        let st = sigma_tilde_leverage(&svd, 1).unwrap();
        let rep = evaluate_conditions(&a, &first_row_plan(), &st, 1).unwrap();
        assert!((rep.lhs1 - 1.0).abs() < 1e-14);
        assert!((rep.lhs4 - 1.0).abs() < 1e-14);
        assert!((rep.rho - 1.0).abs() < 1e-15);
        assert_eq!(rep.bound_constant, 5.0);
        assert_eq!(rep.certified_error, rep.bound_constant * rep.eps_effective);
        assert!(rep.certified_error >= 5.0);
    }

    #[test]
    fn hand_example_pcp_and_worst_case() {
        let a = diag21();
        let plan = first_row_plan();
        let wa = crate::sketching::apply_sketch(&plan, &a).unwrap();
        let e2 = OrthonormalBasis::new(DenseMatrix::from_row_major(2, 1, vec![0.0, 1.0]).unwrap())
            .unwrap();
        assert!((pcp_error(&a, &wa, &e2).unwrap() - 1.0).abs() < 1e-14);
        assert!((worst_case_error(&a, &plan).unwrap() - 1.0).abs() < 1e-14);

        let st = sigma_tilde_leverage(&thin_svd(&a, None).unwrap(), 1).unwrap();
        let check = verify_theorem(&a, &plan, &st, 1, 10, 3).unwrap();
        assert!(check.holds);
        assert!(check.max_observed <= 1.0 + 1e-12);
        assert!(check.report.certified_error >= 5.0);
    }

    #[test]
    fn identity_sketch_has_zero_pcp_error() {
        let a = gaussian(50, 10, 3);
        for i in 0..20 {
            let x = haar_orthonormal(10, 7, 500 + i).unwrap();
            assert!(pcp_error(&a, &a, &x).unwrap() < 1e-12);
        }
    }

    #[test]
    fn pcp_degenerate_denominator() {
        let a = DenseMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let e2 = OrthonormalBasis::new(DenseMatrix::from_row_major(2, 1, vec![0.0, 1.0]).unwrap())
            .unwrap();
        assert_eq!(pcp_error(&a, &a, &e2).unwrap(), 0.0);
        let wa = DenseMatrix::from_row_major(1, 2, vec![0.0, 1.0]).unwrap();
        assert!(matches!(pcp_error(&a, &wa, &e2), Err(Error::DegenerateDenominator(_))));
    }

    #[test]
    fn worst_case_dominates_random_subspaces() {
        let a = gaussian(40, 8, 4);
        let probs = leverage_mixed_probs(&a, 2).unwrap();
        let plan = build_sampling_plan(&probs, 15, 5).unwrap();
        let wa = crate::sketching::apply_sketch(&plan, &a).unwrap();
        let wc = worst_case_error(&a, &plan).unwrap();
        for i in 0..500 {
            let x = haar_orthonormal(8, 7, 10_000 + i).unwrap();
            assert!(pcp_error(&a, &wa, &x).unwrap() <= wc + 1e-10);
        }
    }

    #[test]
    fn sparse_and_dense_routes_agree() {
        let a = gaussian(30, 6, 6);
        let svd = thin_svd(&a, None).unwrap();
        let (probs, ctx) = match ridge_leverage_probs(&a, 4) {
            Ok(v) => v,
            Err(e) => panic!("{e}"),
        };
        let ridge = sigma_tilde_ridge(&ctx).unwrap();
        let lev = sigma_tilde_leverage(&svd, 2).unwrap();
        for (st, k) in [(ridge, 4), (lev, 2)] {
            let plan = build_sampling_plan(&probs, 9, 7).unwrap();
            let rep = evaluate_conditions(&a, &plan, &st, k).unwrap();
            let dense = dense_route(&a, &plan, &st, k);
            for (got, want) in [rep.lhs1, rep.lhs2, rep.lhs3, rep.lhs4].iter().zip(dense) {
                assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "{got} vs {want}");
            }
        }
    }

    #[test]
    fn theorem_holds_on_random_plans() {
        let a = gaussian(60, 12, 8);
        let svd = thin_svd(&a, None).unwrap();
        let st = sigma_tilde_leverage(&svd, 3).unwrap();
        let probs = leverage_mixed_probs(&a, 3).unwrap();
        for (t, s) in [1usize, 3, 10, 40, 200].into_iter().enumerate() {
            let plan = build_sampling_plan(&probs, s, t as u64).unwrap();
            let check = verify_theorem(&a, &plan, &st, 3, 50, 100 + t as u64).unwrap();
            assert!(check.holds, "{check:?}");
        }
    }

    #[test]
    fn adversarial_basis_attains_rho() {
        let a = gaussian(25, 9, 9);
        let svd = thin_svd(&a, None).unwrap();
        let st = sigma_tilde_leverage(&svd, 3).unwrap();
        let ev = ConditionEvaluator::new(&a, st, 3).unwrap();
        let x = ev.adversarial_basis().unwrap();
        assert_eq!(x.codim(), 6);
        let ax = (a.as_matrix() * x.matrix().as_matrix()).norm();
        assert!((ax - ev.rho()).abs() < 1e-10 * ev.rho());
    }

    #[test]
    fn verify_is_thread_count_independent() {
        let a = gaussian(30, 8, 10);
        let svd = thin_svd(&a, None).unwrap();
        let st = sigma_tilde_leverage(&svd, 2).unwrap();
        let probs = leverage_mixed_probs(&a, 2).unwrap();
        let plan = build_sampling_plan(&probs, 12, 1).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| verify_theorem(&a, &plan, &st, 2, 40, 77).unwrap())
        };
        assert_eq!(run(1), run(4));
    }
}
