//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A loop was evaluated at a point off the unit circle.
    #[error("evaluation point off the unit circle: |lambda| = {modulus}")]
    OffCircle { modulus: f64 },

    /// A loop is (numerically) singular somewhere on the circle.
    #[error("loop nearly singular on the circle: min |det| = {min_det:.3e}")]
    NearSingularLoop { min_det: f64 },

    /// An iterative factorization did not reach its tolerance.
    #[error("factorization did not converge: residuals {trace:?} (target {target:.3e})")]
    NoConvergence { trace: Vec<f64>, target: f64 },

    /// Birkhoff splitting failed: the point is not in the big cell.
    #[error("loop not in the big cell (smallest singular value {sigma_min:.3e})")]
    NotInBigCell { sigma_min: f64 },

    /// A loop violated an expected algebraic structure beyond tolerance.
    #[error("structure violation: {what} (defect {defect:.3e}, tol {tol:.3e})")]
    StructureViolation {
        what: String,
        defect: f64,
        tol: f64,
    },

    /// Evaluation outside the domain of an analytic function.
    #[error("argument {z} outside the analytic domain: {what}")]
    OutOfDomain { z: num_complex::Complex64, what: String },

    /// Taylor expansion requested at a singular point.
    #[error("expansion center {x} lies in the singular set")]
    SingularCenter { x: f64 },

    /// The curve fails the regularity requirement |f0'| > 0.
    #[error("curve not regular: |f0'({x})| = {speed:.3e}")]
    NonRegularCurve { x: f64, speed: f64 },

    /// The tangent field is not orthogonal to the curve tangent.
    #[error("tangent field not orthogonal to the curve at x = {x}: <v, f0'> = {defect:.3e}")]
    NonOrthogonalData { x: f64, defect: f64 },

    /// Consecutive SU(2) lifts differ too much; the curve is under-sampled.
    #[error("frame lift discontinuity near x = {x} (jump {jump:.3e})")]
    FrameDiscontinuity { x: f64, jump: f64 },

    /// The potential's lambda^{-1} upper-right entry vanishes on the domain.
    #[error("regularity loss: {what}")]
    RegularityLoss { what: String },

    /// A frame fed to the Sym formula is not unitary at the evaluation point.
    #[error("frame not unitary at lambda0 (defect {defect:.3e})")]
    NonUnitaryFrame { defect: f64 },

    /// The frame ODE ran out of step halvings.
    #[error("frame integration step control failed at z = {z} (error {err:.3e})")]
    StepFailure { z: num_complex::Complex64, err: f64 },

    /// Finite-difference geometry is unreliable at this grid spacing.
    #[error("grid too coarse for finite-difference geometry: {what}")]
    GridTooCoarse { what: String },

    /// A requested gallery example does not exist.
    #[error("unknown example '{name}'")]
    UnknownExample { name: String },

    /// Domain grid construction or lookup failed.
    #[error("invalid grid: {what}")]
    InvalidGrid { what: String },

    /// Configuration or expression parsing failed.
    #[error("configuration error: {0}")]
    Config(String),

    /// An error from a pipeline stage, annotated with the grid node.
    #[error("{stage} failed at node ({ix}, {iy}): {source}")]
    AtNode {
        stage: &'static str,
        ix: usize,
        iy: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at_node(stage: &'static str, ix: usize, iy: usize) -> impl FnOnce(Error) -> Error {
        move |e| Error::AtNode {
            stage,
            ix,
            iy,
            source: Box::new(e),
        }
    }

    /// Process exit code for the CLI: 2 config, 3 numerics, 4 verification.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::UnknownExample { .. } | Error::Json(_) => 2,
            Error::Io(_) => 2,
            Error::GridTooCoarse { .. } => 4,
            _ => 3,
        }
    }
}
