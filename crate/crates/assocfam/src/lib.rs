#![allow(clippy::needless_range_loop)]
#![allow(clippy::type_complexity)]

//! Numerical verification engine for isometric immersions of surfaces into
//! homogeneous 3-manifolds `E(kappa, tau)` and semi-Riemannian warped products
//! `I x_a M^2_k(c)`.
//!
//! The engine extracts the full geometric data of a parametrized surface
//! (first fundamental form, shape operator, structure field `T`, normal
//! component `f`, Gauss curvature and all intrinsic covariant derivatives)
//! using truncated Taylor jets, so every derivative is exact to machine
//! precision. On top of that it evaluates the four compatibility equations of
//! the relevant fundamental theorem as pointwise residuals, rotates the data
//! through generalized associate-family laws, and classifies whether such a
//! family can exist.

pub mod ambient;
pub mod catalog;
pub mod classify;
pub mod compat;
pub mod error;
pub mod expr;
pub mod family;
pub mod jet;
pub mod linalg;
pub mod report;
pub mod scalar;
pub mod surface;

pub use ambient::{AmbientPoint, AmbientSpace, HomogeneousSpace, WarpFn, WarpedProduct};
pub use classify::{CaseTag, ClassifyTolerances, Outcome, Verdict};
pub use compat::{EquationStat, ResidualReport, ResidualSet};
pub use error::{Error, Result};
pub use family::{FThetaMode, FamilyLaw, RotatedData};
pub use jet::{Elementary, Jet1, Jet2};
pub use surface::{GridSpec, Immersion, Rect, SurfaceData};

/// Maximum number of worker threads for grid evaluation, from the
/// `ASSOCFAM_THREADS` environment variable (default 1). Results are
/// reduced in grid order regardless, so reports do not depend on it.
pub fn thread_limit() -> usize {
    std::env::var("ASSOCFAM_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}
