//! Error taxonomy shared by every module.
//!
//! * [`Error::Domain`] — mathematically invalid input (non-symmetric matrix,
//!   negative occupation, infeasible witness parameter). The message names
//!   the violated constraint.
//! * [`Error::Usage`] — structurally invalid call (mismatched dimensions,
//!   incompatible channel/task pairing, out-of-range knob).
//! * [`Error::Truncation`] — the requested computation does not fit in the
//!   given Fock truncation; carries the measured deficit and the budget it
//!   exceeded.
//! * [`Error::Internal`] — a numeric routine failed to converge. Should not
//!   happen for inputs that pass validation.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("truncation error: {context}: deficit {deficit:.3e} exceeds budget {budget:.3e}")]
    Truncation {
        context: String,
        deficit: f64,
        budget: f64,
    },

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

pub(crate) fn truncation<T: num_traits::ToPrimitive>(
    context: impl Into<String>,
    deficit: T,
    budget: T,
) -> Error {
    Error::Truncation {
        context: context.into(),
        deficit: deficit.to_f64().unwrap_or(f64::NAN),
        budget: budget.to_f64().unwrap_or(f64::NAN),
    }
}
