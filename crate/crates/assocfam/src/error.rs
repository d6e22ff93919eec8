//! Error taxonomy shared by the whole engine.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// Input outside the admissible domain (chart boundary, log of a
    /// non-positive jet value, division by a zero-valued jet, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A condition that the construction invariants should have made
    /// impossible (degenerate ambient metric, non-finite intermediate).
    #[error("internal error: {0}")]
    Internal(String),

    /// The differential of the parametrization drops rank at a sampled point.
    #[error("degenerate immersion at (u, v) = ({0}, {1})")]
    DegenerateImmersion(f64, f64),

    /// The induced metric is not positive definite (surface not spacelike).
    #[error("induced metric not positive definite at (u, v) = ({0}, {1})")]
    Signature(f64, f64),

    /// The orthogonal complement of the tangent plane is degenerate.
    #[error("lightlike normal direction at (u, v) = ({0}, {1})")]
    LightlikeNormal(f64, f64),

    /// The rotated normal component f_theta has no real value for this law.
    #[error("no real f_theta: radicand {0} < 0")]
    NoRealSolution(f64),

    /// An operation gated on a case assumption (f != 0, T != 0) was called
    /// outside its case.
    #[error("case violation: {0}")]
    CaseViolation(String),

    /// The point is umbilical, so the (alpha, beta) system is singular and
    /// the caller must route to the umbilical branch.
    #[error("umbilical point: |W| = {0}")]
    UmbilicalPoint(f64),

    /// Catalog lookup failure.
    #[error("unknown catalog entry: {0}")]
    UnknownEntry(String),

    /// Parameter rejected by a catalog entry schema.
    #[error("parameter error: {0}")]
    ParamOutOfRange(String),

    /// Space or law descriptor string failed to parse.
    #[error("parse error: {0}")]
    Parse(String),

    /// Invalid space construction (kappa == 4 tau^2, bad (c, eps0) pair, ...).
    #[error("invalid space: {0}")]
    InvalidSpace(String),

    /// A family law violates its initial conditions.
    #[error("invalid family law: {0}")]
    InvalidLaw(String),
}
