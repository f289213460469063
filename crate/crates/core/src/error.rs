use thiserror::Error;

pub type Result<T, E = DunklError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DunklError {
    #[error("unknown root system family `{0}` (expected z2n, a2, b2 or i2m)")]
    UnknownFamily(String),

    #[error("invalid family parameter: {0}")]
    InvalidFamilyParameter(String),

    #[error("family {family} has {expected} root orbit(s) but {got} multiplicities were given")]
    MultiplicityCount {
        family: String,
        expected: usize,
        got: usize,
    },

    #[error("multiplicity {value} for orbit `{orbit}` is negative or not finite")]
    NegativeMultiplicity { orbit: String, value: f64 },

    #[error("cannot reflect across the zero vector")]
    ZeroVector,

    #[error("group closure exceeded {cap} elements")]
    GroupTooLarge { cap: usize },

    #[error("basis is singular (|det| = {det:e})")]
    SingularBasis { det: f64 },

    #[error("vector {0:?} is not a root of the system")]
    NotARoot(Vec<f64>),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("series did not converge within {max_terms} terms at |z| = {modulus}")]
    NonConvergence { max_terms: usize, modulus: f64 },

    #[error("series at |z| = {modulus} loses too much precision (estimated relative error {estimate:e})")]
    PrecisionLoss { modulus: f64, estimate: f64 },

    #[error("ODE step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("ODE exceeded {max_steps} steps before reaching t = {target} (stopped at {t})")]
    TooManySteps { max_steps: usize, t: f64, target: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("point lies on a reflecting hyperplane (w_k = 0)")]
    OnHyperplane,

    #[error("the truncated cone C_delta is empty for delta = {delta}")]
    EmptyCone { delta: f64 },

    #[error("no covering polytope certified up to p = {p_max}")]
    CoveringNotFound { p_max: usize },

    #[error("ratio is unbounded: {0}")]
    UnboundedRatio(String),

    #[error("curve leaves the cone: {0}")]
    InadmissibleCurve(String),

    #[error("sample {index} ({input}): {source}")]
    Sample {
        index: usize,
        input: String,
        source: Box<DunklError>,
    },
}

impl DunklError {
    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        if let DunklError::Sample { source, .. } = self {
            return source.is_numeric();
        }
        matches!(
            self,
            DunklError::NonConvergence { .. }
                | DunklError::PrecisionLoss { .. }
                | DunklError::StepUnderflow { .. }
                | DunklError::TooManySteps { .. }
                | DunklError::NonFinite(_)
                | DunklError::OnHyperplane
                | DunklError::CoveringNotFound { .. }
                | DunklError::UnboundedRatio(_)
                | DunklError::SingularBasis { .. }
        )
    }
}
