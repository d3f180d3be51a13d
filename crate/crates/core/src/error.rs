use thiserror::Error;

/// Errors raised by the beamforming and partitioning routines.
///
/// Outage (a set or reduced channel failing the polygon inequality inside
/// SPZF) is not an error; it is reported through [`crate::spzf::SpzfOutcome`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpzfError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("set violates the polygon inequality (polygon distance {distance:.6e})")]
    InfeasibleSet { distance: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

pub type Result<T, E = SpzfError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> SpzfError {
    SpzfError::InvalidArgument(msg.into())
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(SpzfError::DimensionMismatch { expected, found })
    }
}
