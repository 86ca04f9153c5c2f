//! Seeded synthetic matrix families.
//!
//! Inline specs name a family, its shape and optional `key=value` options:
//!
//! ```text
//! gaussian:100x20
//! powerlaw:300x40:alpha=1.0
//! lowrank:200x50:r=5:noise=0.01
//! mixture:50x400:clusters=3:spread=1.0
//! ```
//!
//! For `mixture` the shape is `features x points`, so points are columns.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{haar_orthonormal, scale_columns, DenseMatrix};
use crate::seed::derive_seed;

/// Distance scale between mixture centers relative to unit spread.
const MIXTURE_SEPARATION: f64 = 4.0;

fn gaussian_raw(n: usize, d: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // row-major fill so the stream layout matches the CSV layout
    DMatrix::from_row_iterator(n, d, (0..n * d).map(|_| StandardNormal.sample(&mut rng)))
}

fn check_shape(n: usize, d: usize) -> Result<()> {
    if n == 0 || d == 0 {
        return Err(Error::Parameter(format!("empty shape {n}x{d}")));
    }
    Ok(())
}

/// I.i.d. standard normal entries.
pub fn gaussian(n: usize, d: usize, seed: u64) -> Result<DenseMatrix> {
    check_shape(n, d)?;
    Ok(DenseMatrix::wrap(gaussian_raw(n, d, seed)))
}

/// `U·diag(σ)·Vᵀ` with Haar `U ∈ R^{n×r}`, `V ∈ R^{d×r}`, `r = σ.len()`.
pub fn with_spectrum(n: usize, d: usize, sigma: &[f64], seed: u64) -> Result<DenseMatrix> {
    check_shape(n, d)?;
    let r = sigma.len();
    if r == 0 || r > n.min(d) {
        return Err(Error::Parameter(format!("rank {r} impossible for {n}x{d}")));
    }
    let u = haar_orthonormal(n, r, derive_seed(seed, 0))?;
    let v = haar_orthonormal(d, r, derive_seed(seed, 1))?;
    let us = scale_columns(u.matrix().as_matrix(), sigma);
    DenseMatrix::new(us * v.matrix().transpose())
}

/// Singular values `σ_i = i^{−α}`, `i = 1..min(n, d)`, with Haar factors.
pub fn power_law(n: usize, d: usize, alpha: f64, seed: u64) -> Result<DenseMatrix> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::Parameter(format!("alpha = {alpha} must be >= 0")));
    }
    let sigma: Vec<f64> = (1..=n.min(d)).map(|i| (i as f64).powf(-alpha)).collect();
    with_spectrum(n, d, &sigma, seed)
}

/// Rank-`r` signal with unit singular values plus `noise` times a Gaussian matrix.
pub fn low_rank_noise(n: usize, d: usize, r: usize, noise: f64, seed: u64) -> Result<DenseMatrix> {
    if !(noise.is_finite() && noise >= 0.0) {
        return Err(Error::Parameter(format!("noise = {noise} must be >= 0")));
    }
    let signal = with_spectrum(n, d, &vec![1.0; r], seed)?;
    let g = gaussian_raw(n, d, derive_seed(seed, 2));
    DenseMatrix::new(signal.into_matrix() + g * noise)
}

/// `points` columns in `R^features` drawn around `clusters` Gaussian centers;
/// point `i` belongs to cluster `i mod clusters`.
pub fn gaussian_mixture(
    features: usize,
    points: usize,
    clusters: usize,
    spread: f64,
    seed: u64,
) -> Result<(DenseMatrix, Vec<usize>)> {
    check_shape(features, points)?;
    if clusters == 0 || clusters > points {
        return Err(Error::Parameter(format!("cannot form {clusters} clusters from {points} points")));
    }
    if !(spread.is_finite() && spread >= 0.0) {
        return Err(Error::Parameter(format!("spread = {spread} must be >= 0")));
    }
    let centers = gaussian_raw(features, clusters, derive_seed(seed, 0)) * MIXTURE_SEPARATION;
    let noise = gaussian_raw(features, points, derive_seed(seed, 1));
    let labels: Vec<usize> = (0..points).map(|i| i % clusters).collect();
    let a = DMatrix::from_fn(features, points, |r, c| {
        centers[(r, labels[c])] + spread * noise[(r, c)]
    });
    Ok((DenseMatrix::new(a)?, labels))
}

/// Parsed inline generator spec.
#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorSpec {
    Gaussian { n: usize, d: usize },
    PowerLaw { n: usize, d: usize, alpha: f64 },
    LowRank { n: usize, d: usize, r: usize, noise: f64 },
    Mixture { features: usize, points: usize, clusters: usize, spread: f64 },
}

impl GeneratorSpec {
    pub fn shape(&self) -> (usize, usize) {
        match *self {
            Self::Gaussian { n, d } | Self::PowerLaw { n, d, .. } | Self::LowRank { n, d, .. } => {
                (n, d)
            }
            Self::Mixture { features, points, .. } => (features, points),
        }
    }

    pub fn generate(&self, seed: u64) -> Result<DenseMatrix> {
        match *self {
            Self::Gaussian { n, d } => gaussian(n, d, seed),
            Self::PowerLaw { n, d, alpha } => power_law(n, d, alpha, seed),
            Self::LowRank { n, d, r, noise } => low_rank_noise(n, d, r, noise, seed),
            Self::Mixture { features, points, clusters, spread } => {
                Ok(gaussian_mixture(features, points, clusters, spread, seed)?.0)
            }
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Gaussian { n, d } => write!(f, "gaussian:{n}x{d}"),
            Self::PowerLaw { n, d, alpha } => write!(f, "powerlaw:{n}x{d}:alpha={alpha}"),
            Self::LowRank { n, d, r, noise } => write!(f, "lowrank:{n}x{d}:r={r}:noise={noise}"),
            Self::Mixture { features, points, clusters, spread } => {
                write!(f, "mixture:{features}x{points}:clusters={clusters}:spread={spread}")
            }
        }
    }
}

fn parse_shape(s: &str) -> Result<(usize, usize)> {
    let (n, d) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| Error::Parse(format!("shape `{s}` is not NxD")))?;
    let dim = |v: &str| {
        v.trim()
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad dimension `{v}` in `{s}`")))
    };
    let shape = (dim(n)?, dim(d)?);
    check_shape(shape.0, shape.1)?;
    Ok(shape)
}

struct Options<'a>(Vec<(&'a str, &'a str)>);

impl<'a> Options<'a> {
    fn parse(parts: &[&'a str], allowed: &[&str]) -> Result<Self> {
        let mut kv = Vec::new();
        for p in parts {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("option `{p}` is not key=value")))?;
            if !allowed.contains(&k) {
                return Err(Error::Parse(format!("unknown option `{k}`")));
            }
            kv.push((k, v));
        }
        Ok(Self(kv))
    }

    fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.0.iter().rev().find(|(k, _)| *k == key) {
            Some((_, v)) => v
                .parse()
                .map_err(|_| Error::Parse(format!("bad value `{v}` for `{key}`"))),
            None => Ok(default),
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let (family, rest) = parts
            .split_first()
            .ok_or_else(|| Error::Parse("empty generator spec".into()))?;
        let (shape, opts) = rest
            .split_first()
            .ok_or_else(|| Error::Parse(format!("generator `{s}` needs a shape")))?;
        let (n, d) = parse_shape(shape)?;
        match family.to_ascii_lowercase().as_str() {
            "gaussian" => {
                Options::parse(opts, &[])?;
                Ok(Self::Gaussian { n, d })
            }
            "powerlaw" => {
                let o = Options::parse(opts, &["alpha"])?;
                Ok(Self::PowerLaw { n, d, alpha: o.get("alpha", 1.0)? })
            }
            "lowrank" => {
                let o = Options::parse(opts, &["r", "noise"])?;
                Ok(Self::LowRank { n, d, r: o.get("r", 5)?, noise: o.get("noise", 0.01)? })
            }
            "mixture" => {
                let o = Options::parse(opts, &["clusters", "spread"])?;
                Ok(Self::Mixture {
                    features: n,
                    points: d,
                    clusters: o.get("clusters", 3)?,
                    spread: o.get("spread", 1.0)?,
                })
            }
            other => Err(Error::Parse(format!("unknown generator family `{other}`"))),
        }
    }
}
