use num_complex::Complex64;
use thiserror::Error;

/// Failures surfaced by the operator toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {0} lies outside the open unit disc")]
    OutsideDisc(Complex64),

    #[error("map is not a self-map of the disc: max |phi| = {max_modulus} on the sampling grid")]
    NotSelfMap { max_modulus: f64 },

    #[error("length mismatch for {what}: need at least {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("pointwise iterate modulus {0:e} exceeds the divergence guard")]
    Divergence(f64),

    #[error("elliptic automorphisms have no Denjoy-Wolff point")]
    EllipticAutomorphism,

    #[error("point is not fixed by the map: |phi(a) - a| = {0:e}")]
    NotFixedPoint(f64),

    #[error("damped Newton inversion failed for target {0}")]
    NewtonFailure(Complex64),

    #[error("square-root branch is discontinuous near {0}")]
    BranchDiscontinuity(Complex64),

    #[error("quadrature exact to degree {available} but the integrand needs {needed}")]
    QuadratureDegree { needed: usize, available: usize },

    #[error("symmetry check failed: max |phi(psi(z)) - phi(z)| = {0:e}")]
    SymmetryViolation(f64),

    #[error("not inner: {0}")]
    NotInner(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NotSelfMap { .. }
                | Error::Divergence(_)
                | Error::NewtonFailure(_)
                | Error::BranchDiscontinuity(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
