use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cannot realize operation: {0}")]
    CannotRealize(String),

    /// The two spectra disagree on the correlation coefficient c3.
    #[error("inconsistent readout: c3 from target = {target_c3}, from ancilla = {ancilla_c3}")]
    InconsistentReadout { target_c3: f64, ancilla_c3: f64 },

    #[error("visibility undefined for an all-zero curve")]
    UndefinedVisibility,

    #[error("{} sweep point(s) failed", .0.len())]
    Sweep(Vec<PointFailure>),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

/// A failed grid point, with its coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFailure {
    pub alpha: Option<f64>,
    pub phi: f64,
    pub error: Box<Error>,
}
