//! Error taxonomy shared across the crate.

use alloc::string::String;
use core::fmt;

/// Errors surfaced by exact computations.
///
/// `DegenerateParams` marks parameter coincidences (vanishing Gram–Schmidt
/// pivots, pole collisions, coincident anchor points) that a re-run at
/// different rational parameters avoids. `UndecidableContour` means no
/// contour family consistent with the requested radius/enclosure
/// constraints exists, or a pole classification is ambiguous.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Invalid argument (violated precondition), with a description.
    InvalidInput(String),
    /// Parameter degeneracy: a denominator or pivot that is generically
    /// nonzero vanished for this (q,t,a,ρ) choice.
    DegenerateParams(String),
    /// The requested contour scheme is infeasible or a pole cannot be
    /// classified as inside/outside.
    UndecidableContour(String),
    /// A higher-order pole survived factor cancellation.
    HigherOrderPole(String),
    /// A certified bound could not be driven below the requested size
    /// within the allotted budget.
    BoundBudgetExceeded(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(m) => write!(f, "invalid input: {m}"),
            Error::DegenerateParams(m) => write!(f, "degenerate parameters: {m}"),
            Error::UndecidableContour(m) => write!(f, "undecidable contour: {m}"),
            Error::HigherOrderPole(m) => write!(f, "higher-order pole: {m}"),
            Error::BoundBudgetExceeded(m) => write!(f, "bound budget exceeded: {m}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
