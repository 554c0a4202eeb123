use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Coarse classification used for process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Resource,
    Numeric,
    Internal,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Two operands belong to different group models.
    ModelMismatch { expected: u64, found: u64 },
    /// Invalid input: bad parameters, malformed words, unmet preconditions.
    Usage(String),
    /// An enumeration or convolution outgrew its budget. `achieved` is the
    /// last complete radius or convolution order.
    Budget {
        what: &'static str,
        limit: usize,
        achieved: usize,
    },
    /// Element coordinates left the representable range.
    Overflow(&'static str),
    /// The transience gate refused the model.
    ExcludedModel(String),
    /// Partial sums of return probabilities diverge.
    RecurrentWalk { partial_sum: f64, rho: f64 },
    /// Green data is missing or zero for a requested pair.
    InsufficientTruncation(String),
    /// A linear system that should be regular was singular.
    Singular,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::ModelMismatch { .. } | Error::Usage(_) | Error::ExcludedModel(_) => {
                ErrorKind::Usage
            }
            Error::Budget { .. } | Error::Overflow(_) => ErrorKind::Resource,
            Error::RecurrentWalk { .. } | Error::InsufficientTruncation(_) => ErrorKind::Numeric,
            Error::Singular => ErrorKind::Internal,
        }
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ModelMismatch { expected, found } => write!(
                f,
                "element belongs to model {found:016x}, expected {expected:016x}"
            ),
            Error::Usage(msg) => write!(f, "{msg}"),
            Error::Budget {
                what,
                limit,
                achieved,
            } => write!(
                f,
                "{what} budget of {limit} exceeded (completed up to {achieved})"
            ),
            Error::Overflow(what) => write!(f, "coordinate overflow in {what}"),
            Error::ExcludedModel(kind) => write!(
                f,
                "random walks on {kind} are recurrent; Green functions diverge (override to force)"
            ),
            Error::RecurrentWalk { partial_sum, rho } => write!(
                f,
                "walk looks recurrent: partial sum at identity {partial_sum:.4} with spectral estimate {rho:.6}"
            ),
            Error::InsufficientTruncation(msg) => write!(f, "insufficient truncation: {msg}"),
            Error::Singular => write!(f, "singular linear system"),
        }
    }
}

impl core::error::Error for Error {}
