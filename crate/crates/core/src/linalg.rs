//! Dense real linear algebra: the matrix carrier, thin SVD, spectral splits,
//! orthonormal bases and projectors.
//!
//! Factorizations are delegated to `nalgebra`. Everything here is a pure
//! function of its inputs; random bases take an explicit seed.

use std::fmt;
use std::ops::Deref;

use nalgebra::{DMatrix, SymmetricEigen, QR, SVD};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};

/// Orthogonality tolerance used by the invariant checks of this module.
pub const ORTHO_TOL: f64 = 1e-10;

/// A real matrix with finite double-precision entries.
///
/// Storage is delegated to [`nalgebra::DMatrix`]; the public constructors
/// reject NaN and infinities. Row-major layout is used at the I/O boundary
/// ([`DenseMatrix::from_row_major`], [`DenseMatrix::to_row_major`]).
#[derive(Clone, PartialEq)]
pub struct DenseMatrix(DMatrix<f64>);

impl DenseMatrix {
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(rows, cols, &entries))
    }

    /// Wraps an nalgebra matrix after checking that every entry is finite.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                if !m[(i, j)].is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self(m))
    }

    /// Internal constructor for results of arithmetic on finite matrices.
    pub(crate) fn wrap(m: DMatrix<f64>) -> Self {
        debug_assert!(m.iter().all(|v| v.is_finite()));
        Self(m)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        Self::new(m)
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn transposed(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols() != rhs.rows() {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            )));
        }
        Ok(Self(&self.0 * &rhs.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn spectral_norm(&self) -> f64 {
        spectral_norm(&self.0)
    }

    pub fn trace(&self) -> Result<f64> {
        if self.rows() != self.cols() {
            return Err(Error::Dimension(format!(
                "trace of non-square {}x{} matrix",
                self.rows(),
                self.cols()
            )));
        }
        Ok(self.0.trace())
    }
}

impl Deref for DenseMatrix {
    type Target = DMatrix<f64>;

    fn deref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DenseMatrix({}x{}) {}", self.rows(), self.cols(), self.0)
    }
}

/// Thin SVD `A = U diag(sigma) Vᵀ` truncated at the numerical rank.
#[derive(Clone, Debug)]
pub struct ThinSvd {
    pub u: DenseMatrix,
    /// Strictly positive, non-increasing.
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

impl ThinSvd {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// Number of rows of the factored matrix.
    pub fn nrows(&self) -> usize {
        self.u.rows()
    }

    /// Number of columns of the factored matrix.
    pub fn ncols(&self) -> usize {
        self.v.rows()
    }

    /// `U diag(sigma) Vᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        DenseMatrix::wrap(scale_columns(self.u.as_matrix(), &self.sigma) * self.v.transpose())
    }

    /// Squared Frobenius norm of the residual beyond rank `m`, i.e. `Σ_{i>m} σ_i²`.
    pub fn tail_energy(&self, m: usize) -> f64 {
        self.sigma.iter().skip(m).map(|s| s * s).sum()
    }
}

/// Computes the thin SVD of `a`, keeping singular values above
/// `rank_tol × σ₁`. The default tolerance is `max(rows, cols) × f64::EPSILON`.
pub fn thin_svd(a: &DenseMatrix, rank_tol: Option<f64>) -> Result<ThinSvd> {
    let (n, d) = (a.rows(), a.cols());
    if n == 0 || d == 0 {
        return Err(Error::Dimension(format!("empty {n}x{d} matrix")));
    }
    let tol = rank_tol.unwrap_or(n.max(d) as f64 * f64::EPSILON);
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::Parameter(format!("rank tolerance {tol} must be >= 0")));
    }

    let svd = SVD::new(a.as_matrix().clone(), true, true);
    let u_full = svd.u.expect("u requested");
    let vt_full = svd.v_t.expect("v_t requested");
    let sv = svd.singular_values;

    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]).then(i.cmp(&j)));

    let sigma1 = sv[order[0]];
    if sigma1 <= 0.0 {
        return Err(Error::ZeroRank);
    }
    let keep: Vec<usize> = order
        .into_iter()
        .take_while(|&i| sv[i] > tol * sigma1)
        .collect();
    let r = keep.len();

    let mut u = DMatrix::zeros(n, r);
    let mut v = DMatrix::zeros(d, r);
    let mut sigma = Vec::with_capacity(r);
    for (c, &i) in keep.iter().enumerate() {
        u.set_column(c, &u_full.column(i));
        v.set_column(c, &vt_full.row(i).transpose());
        sigma.push(sv[i]);
    }
    Ok(ThinSvd {
        u: DenseMatrix::wrap(u),
        sigma,
        v: DenseMatrix::wrap(v),
    })
}

/// Split of a matrix into its best rank-`m` part and the residual.
#[derive(Clone, Debug)]
pub struct RankSplit {
    pub m: usize,
    pub a_m: DenseMatrix,
    pub a_m_perp: DenseMatrix,
    /// `(σ₁, …, σ_m, 0, …, 0)`.
    pub sigma_m: Vec<f64>,
    /// `(0, …, 0, σ_{m+1}, …, σ_r)`.
    pub sigma_m_perp: Vec<f64>,
}

/// Builds `A_m = U Σ_m Vᵀ` and `A_{m,⊥} = U Σ_{m,⊥} Vᵀ` from disjoint
/// spectral parts, so `A_{m,⊥}` is exactly zero when `m = r`.
pub fn rank_split(svd: &ThinSvd, m: usize) -> Result<RankSplit> {
    let r = svd.rank();
    if m < 1 || m > r {
        return Err(Error::Index { index: m, max: r });
    }
    let sigma_m: Vec<f64> = (0..r).map(|i| if i < m { svd.sigma[i] } else { 0.0 }).collect();
    let sigma_m_perp: Vec<f64> = (0..r).map(|i| if i < m { 0.0 } else { svd.sigma[i] }).collect();

    let u = svd.u.as_matrix();
    let v = svd.v.as_matrix();
    let a_m = scale_columns(&u.columns(0, m).into_owned(), &svd.sigma[..m])
        * v.columns(0, m).transpose();
    let a_m_perp = if m == r {
        DMatrix::zeros(u.nrows(), v.nrows())
    } else {
        scale_columns(&u.columns(m, r - m).into_owned(), &svd.sigma[m..])
            * v.columns(m, r - m).transpose()
    };
    Ok(RankSplit {
        m,
        a_m: DenseMatrix::wrap(a_m),
        a_m_perp: DenseMatrix::wrap(a_m_perp),
        sigma_m,
        sigma_m_perp,
    })
}

/// A `d × c` matrix with orthonormal columns.
#[derive(Clone, Debug)]
pub struct OrthonormalBasis {
    matrix: DenseMatrix,
}

impl OrthonormalBasis {
    /// Validates `XᵀX = I` to [`ORTHO_TOL`] in spectral norm.
    pub fn new(matrix: DenseMatrix) -> Result<Self> {
        if matrix.cols() == 0 || matrix.cols() > matrix.rows() {
            return Err(Error::Dimension(format!(
                "orthonormal basis must be d x c with 1 <= c <= d, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let defect = orthonormality_defect(matrix.as_matrix());
        if defect > ORTHO_TOL {
            return Err(Error::Numerical(format!(
                "columns are not orthonormal: |XᵀX - I|_2 = {defect:e}"
            )));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn new_unchecked(matrix: DenseMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn codim(&self) -> usize {
        self.matrix.cols()
    }
}

/// `‖XᵀX − I‖₂`.
pub fn orthonormality_defect(x: &DMatrix<f64>) -> f64 {
    let c = x.ncols();
    let gram = x.transpose() * x - DMatrix::<f64>::identity(c, c);
    symmetric_spectral_norm(&gram)
}

/// Haar-distributed `d × c` orthonormal basis: Householder QR of a standard
/// Gaussian matrix with the signs fixed so that `diag(R) > 0`.
pub fn haar_orthonormal(d: usize, c: usize, seed: u64) -> Result<OrthonormalBasis> {
    if c < 1 || c > d {
        return Err(Error::Dimension(format!("need 1 <= c <= d, got d={d}, c={c}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = DMatrix::<f64>::zeros(d, c);
    for i in 0..d {
        for j in 0..c {
            g[(i, j)] = StandardNormal.sample(&mut rng);
        }
    }
    let qr = QR::new(g);
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..c {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Ok(OrthonormalBasis::new_unchecked(DenseMatrix::wrap(q)))
}

/// Orthonormal basis `X_⊥` of the orthogonal complement of `span(X)`, so that
/// `X Xᵀ + X_⊥ X_⊥ᵀ = I_d`.
pub fn complement_basis(x: &OrthonormalBasis) -> Result<OrthonormalBasis> {
    let (d, c) = (x.dim(), x.codim());
    if c == d {
        return Err(Error::EmptyComplement(d));
    }
    // The Householder reflectors of a d×c QR generate a full orthogonal Q;
    // its trailing d−c columns span the complement.
    let qr = QR::new(x.matrix().as_matrix().clone());
    let mut qt = DMatrix::<f64>::identity(d, d);
    qr.q_tr_mul(&mut qt);
    let comp = qt.rows(c, d - c).transpose();
    Ok(OrthonormalBasis::new_unchecked(DenseMatrix::wrap(comp)))
}

/// `P = I_d − X Xᵀ`, the rank-`(d − codim)` projector whose null space is `span(X)`.
pub fn projector_from_complement(x: &OrthonormalBasis) -> DenseMatrix {
    let xm = x.matrix().as_matrix();
    let d = x.dim();
    DenseMatrix::wrap(DMatrix::identity(d, d) - xm * xm.transpose())
}

/// Frobenius norm, spectral norm and (for square input) trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MatrixNorms {
    pub frobenius: f64,
    pub spectral: f64,
    pub trace: Option<f64>,
}

pub fn norms(a: &DenseMatrix) -> MatrixNorms {
    MatrixNorms {
        frobenius: a.frobenius_norm(),
        spectral: a.spectral_norm(),
        trace: a.trace().ok(),
    }
}

/// Largest singular value; zero for empty matrices.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Spectral norm of a symmetric matrix, via its eigenvalues.
pub fn symmetric_spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let sym = (m + m.transpose()) * 0.5;
    SymmetricEigen::new(sym).eigenvalues.amax()
}

/// Squared Euclidean norm of every row.
pub fn row_norms_sq(m: &DMatrix<f64>) -> Vec<f64> {
    (0..m.nrows()).map(|i| m.row(i).norm_squared()).collect()
}

/// `M diag(scales)` for `scales.len() == M.ncols()`.
pub(crate) fn scale_columns(m: &DMatrix<f64>, scales: &[f64]) -> DMatrix<f64> {
    let mut out = m.clone();
    for (j, &s) in scales.iter().enumerate() {
        out.column_mut(j).scale_mut(s);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(n: usize, d: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = DMatrix::from_fn(n, d, |_, _| StandardNormal.sample(&mut rng));
        DenseMatrix::new(m).unwrap()
    }

    #[test]
    fn diagonal_is_its_own_svd() {
        let a = DenseMatrix::from_diagonal(&[2.0, 1.0]).unwrap();
        let svd = thin_svd(&a, None).unwrap();
        assert_eq!(svd.sigma, vec![2.0, 1.0]);
        let prod = svd.u.as_matrix() * svd.v.transpose();
        assert!((prod - DMatrix::identity(2, 2)).norm() < 1e-14);
        assert!((svd.u.abs() - DMatrix::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn identity_svd() {
        let svd = thin_svd(&DenseMatrix::identity(3), None).unwrap();
        assert_eq!(svd.rank(), 3);
        for s in &svd.sigma {
            assert!((s - 1.0).abs() < 1e-15);
        }
        let uvt = svd.u.as_matrix() * svd.v.transpose();
        assert!((uvt - DMatrix::identity(3, 3)).norm() < 1e-14);
    }

    #[test]
    fn gaussian_reconstruction() {
        let g = gaussian(20, 8, 1);
        let svd = thin_svd(&g, None).unwrap();
        // independent triple product, entry by entry
        let mut err = 0.0;
        for i in 0..20 {
            for j in 0..8 {
                let mut acc = 0.0;
                for t in 0..svd.rank() {
                    acc += svd.u[(i, t)] * svd.sigma[t] * svd.v[(j, t)];
                }
                err += (acc - g[(i, j)]).powi(2);
            }
        }
        assert!(err.sqrt() / g.frobenius_norm() < 1e-10);
        assert!(orthonormality_defect(svd.u.as_matrix()) < ORTHO_TOL);
        assert!(orthonormality_defect(svd.v.as_matrix()) < ORTHO_TOL);
        assert!(svd.sigma.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn svd_errors() {
        let empty = DenseMatrix::from_row_major(0, 3, vec![]).unwrap();
        assert!(matches!(thin_svd(&empty, None), Err(Error::Dimension(_))));
        assert!(matches!(thin_svd(&DenseMatrix::zeros(3, 2), None), Err(Error::ZeroRank)));
    }

    #[test]
    fn rank_deficient_input_is_truncated() {
        // rank one outer product
        let a = DenseMatrix::from_row_major(3, 2, vec![1.0, 2.0, 2.0, 4.0, 3.0, 6.0]).unwrap();
        let svd = thin_svd(&a, None).unwrap();
        assert_eq!(svd.rank(), 1);
    }

    #[test]
    fn non_finite_rejected() {
        let e = DenseMatrix::from_row_major(1, 2, vec![1.0, f64::NAN]).unwrap_err();
        assert!(matches!(e, Error::NonFinite { row: 0, col: 1 }));
        assert!(DenseMatrix::from_row_major(2, 2, vec![1.0]).is_err());
    }

    #[test]
    fn split_full_rank_leaves_zero() {
        let a = DenseMatrix::from_diagonal(&[3.0, 2.0, 1.0]).unwrap();
        let svd = thin_svd(&a, None).unwrap();
        let split = rank_split(&svd, 3).unwrap();
        assert_eq!(split.a_m_perp.frobenius_norm(), 0.0);
    }

    #[test]
    fn split_of_diagonal() {
        let a = DenseMatrix::from_diagonal(&[3.0, 2.0, 1.0]).unwrap();
        let svd = thin_svd(&a, None).unwrap();
        let split = rank_split(&svd, 1).unwrap();
        let want_m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 0.0, 0.0]));
        let want_perp = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.0, 2.0, 1.0]));
        assert!((split.a_m.as_matrix() - want_m).norm() < 1e-14);
        assert!((split.a_m_perp.as_matrix() - want_perp).norm() < 1e-14);
        assert_eq!(split.sigma_m, vec![3.0, 0.0, 0.0]);
        assert_eq!(split.sigma_m_perp, vec![0.0, 2.0, 1.0]);
    }

    #[test]
    fn split_tail_energy_and_orthogonality() {
        let a = gaussian(10, 6, 2);
        let svd = thin_svd(&a, None).unwrap();
        let split = rank_split(&svd, 2).unwrap();
        let tail: f64 = svd.sigma[2..].iter().map(|s| s * s).sum();
        let got = split.a_m_perp.norm_squared();
        assert!((got - tail).abs() / tail < 1e-12);
        let cross = split.a_m.transpose() * split.a_m_perp.as_matrix();
        assert!(cross.norm() / a.norm_squared() < 1e-10);
        let sum = split.a_m.as_matrix() + split.a_m_perp.as_matrix();
        assert!((sum - a.as_matrix()).norm() / a.frobenius_norm() < 1e-12);
        for i in 0..svd.rank() {
            assert_eq!(split.sigma_m[i] + split.sigma_m_perp[i], svd.sigma[i]);
        }
    }

    #[test]
    fn split_index_out_of_range() {
        let svd = thin_svd(&DenseMatrix::identity(2), None).unwrap();
        assert!(matches!(rank_split(&svd, 0), Err(Error::Index { .. })));
        assert!(matches!(rank_split(&svd, 3), Err(Error::Index { index: 3, max: 2 })));
    }

    #[test]
    fn haar_square_is_orthogonal() {
        let x = haar_orthonormal(5, 5, 9).unwrap();
        let m = x.matrix().as_matrix();
        assert!((m.transpose() * m - DMatrix::identity(5, 5)).norm() < 1e-12);
        assert!((m * m.transpose() - DMatrix::identity(5, 5)).norm() < 1e-12);
    }

    #[test]
    fn haar_is_deterministic() {
        let a = haar_orthonormal(4, 2, 42).unwrap();
        let b = haar_orthonormal(4, 2, 42).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        let c = haar_orthonormal(4, 2, 43).unwrap();
        assert_ne!(a.matrix(), c.matrix());
        assert!(haar_orthonormal(3, 4, 0).is_err());
        assert!(haar_orthonormal(3, 0, 0).is_err());
    }

    #[test]
    fn haar_first_row_mass_matches_c_over_d() {
        // E‖first row‖² = c/d for a rotation-invariant basis
        let (d, c, draws) = (50, 10, 1000);
        let vals: Vec<f64> = (0..draws)
            .map(|t| haar_orthonormal(d, c, 1000 + t).unwrap().matrix().row(0).norm_squared())
            .collect();
        let mean = vals.iter().sum::<f64>() / draws as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (draws as f64 - 1.0);
        let se = (var / draws as f64).sqrt();
        assert!((mean - 0.2).abs() <= 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn complement_of_e1() {
        let x = OrthonormalBasis::new(DenseMatrix::from_row_major(2, 1, vec![1.0, 0.0]).unwrap())
            .unwrap();
        let comp = complement_basis(&x).unwrap();
        assert_eq!(comp.codim(), 1);
        assert!((comp.matrix()[(0, 0)]).abs() < 1e-15);
        assert!((comp.matrix()[(1, 0)].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn complement_completes_identity() {
        let x = haar_orthonormal(6, 2, 5).unwrap();
        let comp = complement_basis(&x).unwrap();
        let xm = x.matrix().as_matrix();
        let cm = comp.matrix().as_matrix();
        assert!((xm.transpose() * cm).norm() < 1e-10);
        let full = xm * xm.transpose() + cm * cm.transpose();
        assert!((full - DMatrix::identity(6, 6)).norm() < 1e-10);
        assert!(orthonormality_defect(cm) < ORTHO_TOL);
    }

    #[test]
    fn complement_of_full_basis_is_error() {
        let x = haar_orthonormal(3, 3, 1).unwrap();
        assert!(matches!(complement_basis(&x), Err(Error::EmptyComplement(3))));
    }

    #[test]
    fn projector_properties() {
        let x = OrthonormalBasis::new(DenseMatrix::from_row_major(2, 1, vec![0.0, 1.0]).unwrap())
            .unwrap();
        let p = projector_from_complement(&x);
        assert_eq!(p.to_row_major(), vec![1.0, 0.0, 0.0, 0.0]);

        let x = haar_orthonormal(7, 4, 3).unwrap();
        let p = projector_from_complement(&x);
        assert!((p.trace().unwrap() - 3.0).abs() < 1e-12);
        assert!((p.as_matrix() * p.as_matrix() - p.as_matrix()).norm() < 1e-10);
        assert!((p.as_matrix() * x.matrix().as_matrix()).norm() < 1e-10);
        assert!((p.as_matrix() - p.transposed().as_matrix()).norm() < 1e-15);
    }

    #[test]
    fn norms_of_diagonal() {
        let n = norms(&DenseMatrix::from_diagonal(&[3.0, 4.0]).unwrap());
        assert!((n.frobenius - 5.0).abs() < 1e-15);
        assert!((n.spectral - 4.0).abs() < 1e-14);
        assert_eq!(n.trace, Some(7.0));
        let z = norms(&DenseMatrix::zeros(3, 3));
        assert_eq!((z.frobenius, z.spectral, z.trace), (0.0, 0.0, Some(0.0)));
        assert!(DenseMatrix::zeros(2, 3).trace().is_err());
    }

    #[test]
    fn strong_submultiplicativity() {
        for seed in 0..10 {
            let a = gaussian(7, 5, 100 + seed);
            let b = gaussian(5, 6, 200 + seed);
            let ab = a.matmul(&b).unwrap();
            assert!(ab.frobenius_norm() <= a.spectral_norm() * b.frobenius_norm() + 1e-12);
            assert!(ab.frobenius_norm() <= a.frobenius_norm() * b.spectral_norm() + 1e-12);
        }
    }

    #[test]
    fn singular_values_match_gram_eigenvalues() {
        let a = gaussian(30, 7, 11);
        let svd = thin_svd(&a, None).unwrap();
        let gram = a.transpose() * a.as_matrix();
        let mut eig: Vec<f64> = SymmetricEigen::new(gram).eigenvalues.iter().copied().collect();
        eig.sort_by(|x, y| y.total_cmp(x));
        for (s, l) in svd.sigma.iter().zip(&eig) {
            assert!((s - l.sqrt()).abs() / s < 1e-7);
        }
    }
}
