//! k-means costs as projection costs.
//!
//! The `d` columns of `A ∈ R^{n×d}` are the points. A partition into `k`
//! clusters defines `X ∈ R^{d×k}` with `X_ij = 1/√s_j` on members of cluster
//! `j`, and the k-means cost equals `‖A − AXXᵀ‖_F²`. Sampling rows of `A`
//! (features) therefore preserves every clustering cost whenever the sketch
//! preserves projection costs.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{run_trials, TrialStats};
use crate::error::{Error, Result};
use crate::linalg::{thin_svd, DenseMatrix, OrthonormalBasis};
use crate::seed::derive_seed;
use crate::sketching::{
    apply_sketch_raw, build_sampling_plan, leverage_mixed_probs_from_svd, sample_size_leverage,
};
use crate::verifier::{sigma_tilde_leverage, ConditionEvaluator, DEGENERATE_REL_TOL};

/// Partition of `d` points into `k` non-empty clusters, labels `0..k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClusterAssignment {
    labels: Vec<usize>,
    sizes: Vec<usize>,
}

impl ClusterAssignment {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Parameter("k must be >= 1".into()));
        }
        let mut sizes = vec![0; k];
        for &l in &labels {
            if l >= k {
                return Err(Error::Index { index: l, max: k - 1 });
            }
            sizes[l] += 1;
        }
        if let Some(j) = sizes.iter().position(|&c| c == 0) {
            return Err(Error::EmptyCluster(j));
        }
        Ok(Self { labels, sizes })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Balanced random partition: labels `i mod k`, shuffled.
pub fn random_assignment(d: usize, k: usize, seed: u64) -> Result<ClusterAssignment> {
    if k == 0 || d < k {
        return Err(Error::Parameter(format!("cannot split {d} points into {k} clusters")));
    }
    let mut labels: Vec<usize> = (0..d).map(|i| i % k).collect();
    labels.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    ClusterAssignment::new(labels, k)
}

/// Normalized membership matrix; its columns are orthonormal by construction.
pub fn kmeans_membership(assign: &ClusterAssignment) -> OrthonormalBasis {
    let mut x = DMatrix::zeros(assign.len(), assign.k());
    for (i, &l) in assign.labels.iter().enumerate() {
        x[(i, l)] = 1.0 / (assign.sizes[l] as f64).sqrt();
    }
    OrthonormalBasis::new_unchecked(DenseMatrix::wrap(x))
}

fn check_points(a: &DMatrix<f64>, assign: &ClusterAssignment) -> Result<()> {
    if a.ncols() != assign.len() {
        return Err(Error::Dimension(format!(
            "{} points but {} labels",
            a.ncols(),
            assign.len()
        )));
    }
    Ok(())
}

fn projection_cost(a: &DMatrix<f64>, assign: &ClusterAssignment) -> Result<f64> {
    check_points(a, assign)?;
    let x = kmeans_membership(assign);
    let ax = a * x.matrix().as_matrix();
    Ok((a - &ax * x.matrix().transpose()).norm_squared())
}

/// `‖A − AXXᵀ‖_F²` for the membership matrix `X` of `assign`.
pub fn clustering_cost(a: &DenseMatrix, assign: &ClusterAssignment) -> Result<f64> {
    projection_cost(a.as_matrix(), assign)
}

/// Cluster means as columns of an `n × k` matrix.
pub fn centroids(a: &DenseMatrix, assign: &ClusterAssignment) -> Result<DMatrix<f64>> {
    check_points(a.as_matrix(), assign)?;
    let mut c = DMatrix::zeros(a.rows(), assign.k());
    for (i, &l) in assign.labels.iter().enumerate() {
        let mut col = c.column_mut(l);
        col += a.column(i);
    }
    for (j, &size) in assign.sizes.iter().enumerate() {
        c.column_mut(j).unscale_mut(size as f64);
    }
    Ok(c)
}

/// Sum of squared distances from each point to its cluster mean.
pub fn clustering_cost_by_centroids(a: &DenseMatrix, assign: &ClusterAssignment) -> Result<f64> {
    let c = centroids(a, assign)?;
    Ok(assign
        .labels
        .iter()
        .enumerate()
        .map(|(i, &l)| (a.column(i) - c.column(l)).norm_squared())
        .sum())
}

/// `|cost(WA) − cost(A)| / cost(A)` for one partition. A cost below
/// rounding level relative to `‖A‖_F²` is reported as [`Error::ZeroCost`].
pub fn sketched_clustering_gap(
    a: &DenseMatrix,
    wa: &DenseMatrix,
    assign: &ClusterAssignment,
) -> Result<f64> {
    let base = clustering_cost(a, assign)?;
    if base.sqrt() <= DEGENERATE_REL_TOL * a.frobenius_norm() {
        return Err(Error::ZeroCost);
    }
    let sketched = clustering_cost(wa, assign)?;
    Ok((sketched - base).abs() / base)
}

/// Moves every point to its nearest centroid (lowest index on ties). A
/// cluster left empty takes the point farthest from its new centroid among
/// clusters with more than one member; neither move raises the cost.
pub fn lloyd_step(a: &DenseMatrix, assign: &ClusterAssignment) -> Result<ClusterAssignment> {
    let c = centroids(a, assign)?;
    let k = assign.k();
    let mut labels = Vec::with_capacity(assign.len());
    let mut dist = Vec::with_capacity(assign.len());
    for i in 0..assign.len() {
        let p = a.column(i);
        let (best, dbest) = (0..k)
            .map(|j| (j, (p - c.column(j)).norm_squared()))
            .fold((0, f64::INFINITY), |acc, (j, dj)| if dj < acc.1 { (j, dj) } else { acc });
        labels.push(best);
        dist.push(dbest);
    }
    let mut sizes = vec![0usize; k];
    for &l in &labels {
        sizes[l] += 1;
    }
    for j in 0..k {
        if sizes[j] > 0 {
            continue;
        }
        let donor = (0..labels.len())
            .filter(|&i| sizes[labels[i]] > 1)
            .fold(None, |acc: Option<usize>, i| match acc {
                Some(b) if dist[b] >= dist[i] => Some(b),
                _ => Some(i),
            })
            .ok_or(Error::EmptyCluster(j))?;
        sizes[labels[donor]] -= 1;
        sizes[j] = 1;
        labels[donor] = j;
        dist[donor] = 0.0;
    }
    ClusterAssignment::new(labels, k)
}

/// Largest sketch gaps seen in one trial of [`kmeans_demo`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KmeansTrial {
    pub seed: u64,
    pub max_random_gap: f64,
    pub max_refined_gap: f64,
    pub certified_error: f64,
}

/// Cost preservation of a leverage-sampled sketch over many partitions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KmeansDemo {
    pub k: usize,
    pub s: usize,
    pub eps: f64,
    /// `5ε`, the leverage scheme's guarantee.
    pub threshold: f64,
    pub random_assignments: usize,
    pub refined_assignments: usize,
    pub trials: Vec<KmeansTrial>,
    /// Per trial, the larger of the two maxima; failures exceed `threshold`.
    pub gaps: TrialStats,
    /// Trials where some gap exceeded the certified error.
    pub certificate_violations: usize,
}

const ASSIGNMENT_STREAM: u64 = 0x6b6d_6561_6e73;

/// Samples `trials` leverage sketches of `A` and, for each, measures the cost
/// gap on `random` fixed random partitions and on `refined` partitions
/// improved by `lloyd_iters` Lloyd steps on the full data.
#[allow(clippy::too_many_arguments)]
pub fn kmeans_demo(
    a: &DenseMatrix,
    k: usize,
    eps: f64,
    delta: f64,
    trials: usize,
    random: usize,
    refined: usize,
    lloyd_iters: usize,
    seed: u64,
) -> Result<KmeansDemo> {
    let d = a.cols();
    let base_seed = seed ^ ASSIGNMENT_STREAM;
    let random_parts = (0..random)
        .map(|j| random_assignment(d, k, derive_seed(base_seed, j as u64)))
        .collect::<Result<Vec<_>>>()?;
    let refined_parts = (0..refined)
        .map(|j| {
            let mut p = random_assignment(d, k, derive_seed(base_seed, (random + j) as u64))?;
            for _ in 0..lloyd_iters {
                p = lloyd_step(a, &p)?;
            }
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;

    let svd = thin_svd(a, None)?;
    let probs = leverage_mixed_probs_from_svd(&svd, k)?;
    let st = sigma_tilde_leverage(&svd, k)?;
    let evaluator = ConditionEvaluator::with_svd(a, svd, st, k)?;
    let s = sample_size_leverage(k, eps, delta)?;

    let max_gap = |wa: &DenseMatrix, parts: &[ClusterAssignment]| -> Result<f64> {
        parts
            .iter()
            .map(|p| sketched_clustering_gap(a, wa, p))
            .try_fold(0.0, |m, g| Ok(f64::max(m, g?)))
    };
    let records = run_trials(trials, seed, |_, ts| {
        let plan = build_sampling_plan(&probs, s, ts)?;
        let certified_error = evaluator.evaluate(&plan)?.certified_error;
        let wa = DenseMatrix::wrap(apply_sketch_raw(&plan.merged(), a.as_matrix())?);
        Ok(KmeansTrial {
            seed: ts,
            max_random_gap: max_gap(&wa, &random_parts)?,
            max_refined_gap: max_gap(&wa, &refined_parts)?,
            certified_error,
        })
    })?;
    let threshold = 5.0 * eps;
    let worst: Vec<f64> = records
        .iter()
        .map(|r| r.max_random_gap.max(r.max_refined_gap))
        .collect();
    let certificate_violations = records
        .iter()
        .zip(&worst)
        .filter(|(r, g)| **g > r.certified_error + crate::verifier::THEOREM_SLACK)
        .count();
    Ok(KmeansDemo {
        k,
        s,
        eps,
        threshold,
        random_assignments: random,
        refined_assignments: refined,
        gaps: TrialStats::from_values(&worst, threshold)?,
        trials: records,
        certificate_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::complement_basis;
    use crate::sketching::{apply_sketch, leverage_mixed_probs, SamplingPlan};
    use crate::verifier::pcp_error;
    use rand_distr::{Distribution, StandardNormal};

    fn row(v: &[f64]) -> DenseMatrix {
        DenseMatrix::from_row_major(1, v.len(), v.to_vec()).unwrap()
    }

    fn gaussian(n: usize, d: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::new(DMatrix::from_fn(n, d, |_, _| StandardNormal.sample(&mut rng))).unwrap()
    }

    #[test]
    fn membership_hand_example() {
        let asg = ClusterAssignment::new(vec![0, 0, 1], 2).unwrap();
        let x = kmeans_membership(&asg);
        let h = 0.5f64.sqrt();
        let want = DMatrix::from_row_slice(3, 2, &[h, 0.0, h, 0.0, 0.0, 1.0]);
        assert!((x.matrix().as_matrix() - want).norm() < 1e-15);
        let g = x.matrix().transpose() * x.matrix().as_matrix();
        assert!((g - DMatrix::<f64>::identity(2, 2)).norm() < 1e-15);
    }

    #[test]
    fn singletons_give_permutation() {
        let asg = ClusterAssignment::new(vec![2, 0, 1], 3).unwrap();
        let x = kmeans_membership(&asg);
        for (i, &l) in asg.labels().iter().enumerate() {
            assert_eq!(x.matrix()[(i, l)], 1.0);
        }
        assert_eq!(x.matrix().sum(), 3.0);
    }

    #[test]
    fn invalid_assignments() {
        assert!(matches!(ClusterAssignment::new(vec![0, 0], 2), Err(Error::EmptyCluster(1))));
        assert!(ClusterAssignment::new(vec![0, 3], 2).is_err());
        assert!(random_assignment(2, 3, 0).is_err());
    }

    #[test]
    fn cost_hand_examples() {
        let a = row(&[1.0, 1.0, 3.0]);
        let tight = ClusterAssignment::new(vec![0, 0, 1], 2).unwrap();
        assert!(clustering_cost(&a, &tight).unwrap() < 1e-15);
        let loose = ClusterAssignment::new(vec![0, 1, 0], 2).unwrap();
        assert!((clustering_cost(&a, &loose).unwrap() - 2.0).abs() < 1e-14);
        assert!((clustering_cost_by_centroids(&a, &loose).unwrap() - 2.0).abs() < 1e-14);
        let x = kmeans_membership(&loose);
        let axx = a.as_matrix() * x.matrix().as_matrix() * x.matrix().transpose();
        let want = DMatrix::from_row_slice(1, 3, &[2.0, 1.0, 2.0]);
        assert!((axx - want).norm() < 1e-14);
    }

    #[test]
    fn cost_formulas_agree() {
        for t in 0..10 {
            let a = gaussian(6, 30, t);
            let asg = random_assignment(30, 4, 100 + t).unwrap();
            let p = clustering_cost(&a, &asg).unwrap();
            let c = clustering_cost_by_centroids(&a, &asg).unwrap();
            assert!((p - c).abs() <= 1e-10 * c);
        }
    }

    #[test]
    fn lloyd_never_increases_cost() {
        for t in 0..10 {
            let a = gaussian(4, 25, 50 + t);
            let mut asg = random_assignment(25, 5, t).unwrap();
            for _ in 0..4 {
                let next = lloyd_step(&a, &asg).unwrap();
                let (c0, c1) = (
                    clustering_cost_by_centroids(&a, &asg).unwrap(),
                    clustering_cost_by_centroids(&a, &next).unwrap(),
                );
                assert!(c1 <= c0 * (1.0 + 1e-12), "{c1} > {c0}");
                asg = next;
            }
        }
    }

    #[test]
    fn lloyd_fills_empty_cluster() {
        // both centroids sit at 10, so every point ties into cluster 0
        let a = row(&[0.0, 10.0, 20.0]);
        let asg = ClusterAssignment::new(vec![0, 1, 0], 2).unwrap();
        let next = lloyd_step(&a, &asg).unwrap();
        assert_eq!(next.labels(), &[1, 0, 0]);
    }

    #[test]
    fn gap_is_a_projection_cost_error() {
        let a = gaussian(20, 15, 9);
        let probs = leverage_mixed_probs(&a, 3).unwrap();
        let plan = build_sampling_plan(&probs, 12, 4).unwrap();
        let wa = apply_sketch(&plan, &a).unwrap();
        for t in 0..5 {
            let asg = random_assignment(15, 3, t).unwrap();
            let gap = sketched_clustering_gap(&a, &wa, &asg).unwrap();
            let y = complement_basis(&kmeans_membership(&asg)).unwrap();
            assert!((gap - pcp_error(&a, &wa, &y).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn isometric_sketch_has_no_gap() {
        let a = gaussian(5, 12, 2);
        let wa = apply_sketch(&SamplingPlan::isometry(5).unwrap(), &a).unwrap();
        let asg = random_assignment(12, 3, 1).unwrap();
        assert!(sketched_clustering_gap(&a, &wa, &asg).unwrap() < 1e-14);
    }

    #[test]
    fn zero_cost_flagged() {
        let a = row(&[1.0, 1.0, 3.0]);
        let asg = ClusterAssignment::new(vec![0, 0, 1], 2).unwrap();
        assert!(matches!(sketched_clustering_gap(&a, &a, &asg), Err(Error::ZeroCost)));
    }

    #[test]
    fn demo_small() {
        let a = gaussian(10, 40, 3);
        let demo = kmeans_demo(&a, 2, 0.5, 0.2, 3, 4, 2, 2, 8).unwrap();
        assert_eq!(demo.trials.len(), 3);
        assert_eq!(demo.certificate_violations, 0);
        assert_eq!(demo, kmeans_demo(&a, 2, 0.5, 0.2, 3, 4, 2, 2, 8).unwrap());
    }
}
