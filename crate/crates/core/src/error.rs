use thiserror::Error;

/// Errors raised anywhere in the analysis pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PadeError {
    #[error("invalid length: {0}")]
    InvalidLength(String),

    #[error("invalid damping {value} for component {index}: must be > 0")]
    InvalidDamping { index: usize, value: f64 },

    #[error("non-finite value at sample {index}")]
    NonFinite { index: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("leading sample s_{index} is numerically zero")]
    LeadingSampleZero { index: usize },

    #[error("order breakdown at level {level}: signal is representable at lower order")]
    OrderBreakdown { level: isize },

    #[error("exact breakdown at level {level}: division by exact zero")]
    ExactBreakdown { level: isize },

    #[error("order too large: need r_{needed}, table holds r_1..r_{available}")]
    OrderTooLarge { needed: usize, available: usize },

    #[error("eigenvalue iteration did not converge (active block {lo}..={hi})")]
    Convergence { lo: usize, hi: usize },

    #[error("pencil is numerically singular: {0}")]
    NearSingularPencil(String),

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("pole {index} is zero")]
    ZeroPole { index: usize },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("ambiguous spectrum matching for pole {index}")]
    Matching { index: usize },

    #[error("overflow in reconstruction at pole {index}")]
    Overflow { index: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl PadeError {
    /// Stable machine-readable tag used in reports and CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            PadeError::InvalidLength(_) => "invalid_length",
            PadeError::InvalidDamping { .. } => "invalid_damping",
            PadeError::NonFinite { .. } => "non_finite",
            PadeError::Parse { .. } => "parse",
            PadeError::Io(_) => "io",
            PadeError::LeadingSampleZero { .. } => "leading_sample_zero",
            PadeError::OrderBreakdown { .. } => "order_breakdown",
            PadeError::ExactBreakdown { .. } => "exact_breakdown",
            PadeError::OrderTooLarge { .. } => "order_too_large",
            PadeError::Convergence { .. } => "convergence",
            PadeError::NearSingularPencil(_) => "near_singular_pencil",
            PadeError::DegenerateSpectrum(_) => "degenerate_spectrum",
            PadeError::ZeroPole { .. } => "zero_pole",
            PadeError::Numeric(_) => "numeric",
            PadeError::Matching { .. } => "matching",
            PadeError::Overflow { .. } => "overflow",
            PadeError::Unsupported(_) => "unsupported",
            PadeError::InvalidParameter(_) => "invalid_parameter",
        }
    }
}

impl From<std::io::Error> for PadeError {
    fn from(e: std::io::Error) -> Self {
        PadeError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, PadeError>;
