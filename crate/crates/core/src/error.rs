use thiserror::Error;

/// Crate-wide error type. Variants are grouped by the module that raises
/// them; all carry enough context to report the failure without a debugger.
#[derive(Debug, Error)]
pub enum Error {
    // -- integer linear algebra ------------------------------------------------
    #[error("matrix shape mismatch: {0}")]
    Shape(String),

    #[error("no integer solution: {0}")]
    NoIntegerSolution(String),

    // -- chain complexes -------------------------------------------------------
    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("invalid chain map: {0}")]
    InvalidChainMap(String),

    #[error("sequence is not short exact: {0}")]
    NotExact(String),

    #[error("invalid coefficient modulus {0}: need m >= 2")]
    BadModulus(i64),

    #[error("internal consistency failure: {0}")]
    Internal(String),

    // -- cubical ---------------------------------------------------------------
    #[error("invalid cube: {0}")]
    InvalidCube(String),

    #[error("cut level {level} on axis {axis} is non-generic: {reason}")]
    NonGenericCut {
        axis: usize,
        level: String,
        reason: String,
    },

    #[error("chain has dimension 0: no coordinate to crease")]
    CreaseDimensionZero,

    // -- equivariant -----------------------------------------------------------
    #[error("invalid rotation data: {0}")]
    InvalidRotation(String),

    #[error("invalid degree window: {0}")]
    BadWindow(String),

    // -- morse -----------------------------------------------------------------
    #[error("expression parse error: {0}")]
    ExprParse(String),

    #[error("expression cannot be differentiated: {0}")]
    ExprDerivative(String),

    #[error("invalid surface: {0}")]
    InvalidSurface(String),

    #[error("degenerate critical point at {position:?}: tangent Hessian eigenvalue {eigenvalue:.3e} within margin {margin:.1e} of zero")]
    DegenerateCriticalPoint {
        position: [f64; 3],
        eigenvalue: f64,
        margin: f64,
    },

    #[error("flow trajectory failed: {0}")]
    FlowFailed(String),

    #[error("incidence count ({from_point} -> {to_point}) unresolved: {reason}")]
    UnresolvedIncidence {
        from_point: usize,
        to_point: usize,
        reason: String,
    },

    #[error("boundary of boundary is nonzero over {ring} in degree {degree}")]
    BoundarySquareNonzero { ring: String, degree: i64 },

    #[error("chain in degree {degree} is not a cycle")]
    NotACycle { degree: i64 },
}
