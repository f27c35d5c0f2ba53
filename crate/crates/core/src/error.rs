//! Error type shared by all modules.

use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A precondition on an argument failed; the message names it.
    InvalidArgument(String),
    /// An integer quantity (e.g. `n^p`) does not fit the platform range.
    SizeOverflow(String),
    /// A matrix that claims to be unitary is not, within tolerance.
    UnitarityViolation { defect: f64, tolerance: f64 },
    /// The event space is larger than the caller-supplied cap.
    /// `count` is `None` when it does not even fit in 128 bits.
    CapExceeded { count: Option<u128>, cap: u64 },
    /// Matrix order exceeds what the permanent kernel accepts.
    PermanentSizeCap { order: usize, max: usize },
    /// Particle counts of an input configuration and an event disagree.
    ParticleCountMismatch { input: usize, event: usize },
    /// An operation requires indistinguishable particles but the input
    /// carries distinct internal labels.
    DistinguishableInput,
    /// A mode index lies outside `1..=m`.
    ModeOutOfRange { mode: u64, modes: u64 },
    /// A probability row that must be normalized is not.
    RowNotNormalized { row: usize, norm: f64 },
    /// An overlap matrix is not positive semidefinite.
    NotPositiveSemidefinite { row: usize },
    /// A batch operation received no events.
    EmptyBatch,
    /// The forbidden-event set is empty (degenerate `n = 1`).
    NoForbiddenEvents,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::SizeOverflow(msg) => write!(f, "size overflow: {msg}"),
            Error::UnitarityViolation { defect, tolerance } => write!(
                f,
                "matrix is not unitary: defect {defect:.3e} exceeds tolerance {tolerance:.1e}"
            ),
            Error::CapExceeded { count, cap } => match count {
                Some(c) => write!(f, "event space holds {c} events, above the cap of {cap}"),
                None => write!(f, "event count overflows 128 bits, above the cap of {cap}"),
            },
            Error::PermanentSizeCap { order, max } => {
                write!(f, "permanent of order {order} exceeds the cap of {max}")
            }
            Error::ParticleCountMismatch { input, event } => write!(
                f,
                "input configures {input} particles but the event holds {event}"
            ),
            Error::DistinguishableInput => {
                write!(f, "operation requires indistinguishable particles")
            }
            Error::ModeOutOfRange { mode, modes } => {
                write!(f, "mode index {mode} outside 1..={modes}")
            }
            Error::RowNotNormalized { row, norm } => {
                write!(f, "row {row} has squared norm {norm}, expected 1")
            }
            Error::NotPositiveSemidefinite { row } => {
                write!(f, "overlap matrix is not positive semidefinite (row {row})")
            }
            Error::EmptyBatch => write!(f, "batch contains no events"),
            Error::NoForbiddenEvents => write!(f, "no forbidden events exist for this setup"),
        }
    }
}

impl core::error::Error for Error {}
