use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("singular system: pivot {pivot:e} at row {row}")]
    SingularPivot { row: usize, pivot: f64 },

    #[error("direct solve residual {residual:e} exceeds bound {bound:e}")]
    ResidualTooLarge { residual: f64, bound: f64 },

    #[error("solution does not live on the requested mesh")]
    MeshMismatch,

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// True for errors caused by caller-supplied values rather than numerical breakdown.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::DimensionMismatch { .. }
                | Error::MeshMismatch
                | Error::InsufficientData(_)
        )
    }
}
