//! Row-sampling sketches that preserve projection costs, with numerical
//! certificates.
//!
//! The crate builds sampling-and-rescaling sketches `WA` of a dense matrix
//! `A` from leverage-type probabilities and checks, plan by plan, that
//! `‖WAX‖_F² ≈ ‖AX‖_F²` uniformly over all `d × (d − k)` orthonormal `X`.
//!
//! ```
//! use pcp_sketch::generate::power_law;
//! use pcp_sketch::linalg::thin_svd;
//! use pcp_sketch::sketching::{build_sampling_plan, leverage_mixed_probs};
//! use pcp_sketch::verifier::{sigma_tilde_leverage, verify_theorem};
//!
//! let a = power_law(200, 30, 1.0, 1)?;
//! let k = 4;
//! let probs = leverage_mixed_probs(&a, k)?;
//! let plan = build_sampling_plan(&probs, 120, 7)?;
//! let st = sigma_tilde_leverage(&thin_svd(&a, None)?, k)?;
//! let check = verify_theorem(&a, &plan, &st, k, 20, 7)?;
//! assert!(check.holds);
//! assert!(check.max_observed <= check.report.certified_error + 1e-9);
//! # Ok::<(), pcp_sketch::Error>(())
//! ```

pub mod error;
pub mod experiments;
pub mod generate;
pub mod io;
pub mod linalg;
pub mod seed;
pub mod sketching;
pub mod verifier;

pub use error::{Error, Result};

// Book chapters, so `cargo test --doc` keeps their snippets compiling.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    mod certificates {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/kmeans.md")]
    mod kmeans {}
}
