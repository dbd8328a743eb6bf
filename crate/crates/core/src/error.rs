//! Crate-wide error type.
//!
//! Every fallible operation in the engine returns [`Error`]. Precision
//! failures are deliberately separate from domain failures: a
//! [`Error::Precision`] means the declared guard intervals are too coarse to
//! decide an ordering, and the caller may retry with tighter guards, while
//! domain errors are unrecoverable misuse.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A basis symbol occurs twice in a context declaration.
    DuplicateSymbol(String),
    /// A guard interval has `lo > hi`, or the unit symbol carries a guard
    /// other than `[1,1]`.
    InvalidGuard(String),
    /// Two values built over different scalar contexts were combined.
    ContextMismatch,
    /// Guard intervals are too coarse to separate two distinct values.
    Precision(String),
    /// `pt_interval` was asked for `[a,b)` with `a >= b`.
    EmptyInterval,
    /// De-bracketing applied to an element with nonzero augmentation.
    NotInKernel,
    /// An interval or transformation length is not strictly positive.
    NonpositiveLength,
    /// A rotation amount lies outside `[0, L)`.
    OutOfRange,
    /// Two transformations of different total length were combined.
    LengthMismatch,
    /// A point lies outside the domain `[0, L)`.
    OutOfDomain,
    /// A rescaling factor is not strictly positive.
    NonpositiveFactor,
    /// A square-completion input is not composable, or the requested
    /// completion does not exist for the given data.
    IncompatibleShapes(String),
    /// Two covers or a cover and a refinement target disagree.
    TargetMismatch,
    /// Two spans claimed to represent the same groupoid morphism do not;
    /// the payload holds a witness description.
    NotSameMorphism(String),
    /// A chain expected to be a bar cycle has nonzero differential.
    NotACycle,
    /// Rectangle exchange dimensions disagree.
    DimensionMismatch,
    /// A deserialized value violates a structural invariant.
    InvalidElement(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DuplicateSymbol(s) => write!(f, "duplicate basis symbol `{s}`"),
            Error::InvalidGuard(s) => write!(f, "invalid guard interval: {s}"),
            Error::ContextMismatch => write!(f, "values come from different scalar contexts"),
            Error::Precision(s) => write!(f, "guards too coarse to decide ordering: {s}"),
            Error::EmptyInterval => write!(f, "interval endpoints do not satisfy lo < hi"),
            Error::NotInKernel => write!(f, "element has nonzero augmentation"),
            Error::NonpositiveLength => write!(f, "length must be strictly positive"),
            Error::OutOfRange => write!(f, "rotation amount outside [0, L)"),
            Error::LengthMismatch => write!(f, "total lengths differ"),
            Error::OutOfDomain => write!(f, "point outside the domain [0, L)"),
            Error::NonpositiveFactor => write!(f, "rescaling factor must be strictly positive"),
            Error::IncompatibleShapes(s) => write!(f, "square completion impossible: {s}"),
            Error::TargetMismatch => write!(f, "cover targets disagree"),
            Error::NotSameMorphism(s) => write!(f, "spans represent different morphisms: {s}"),
            Error::NotACycle => write!(f, "chain is not a cycle"),
            Error::DimensionMismatch => write!(f, "dimensions disagree"),
            Error::InvalidElement(s) => write!(f, "invalid element: {s}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
