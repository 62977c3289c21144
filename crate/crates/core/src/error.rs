use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vector is not in the span of the basis")]
    NotInSpan,

    #[error("interval refinement could not reach {requested_bits} bits within the {cap_bits}-bit working cap")]
    EvalDepthExceeded { requested_bits: u32, cap_bits: u32 },

    #[error("magnitudes of `{left}` and `{right}` still overlap at {max_bits} bits")]
    Undecidable {
        left: String,
        right: String,
        max_bits: u32,
    },

    #[error("a nonzero vector is required, got θ")]
    NonzeroRequired,

    #[error("basis has {available} vectors but {needed} are required")]
    InsufficientBasis { needed: usize, available: usize },

    #[error("the first basis vector must be a rational multiple of `one`")]
    RationalFirstRequired,

    #[error("index {index} out of range for a frame of {len} vectors")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("vectors are linearly dependent over Q")]
    Dependent,

    #[error("{images} images given for {basis} domain basis vectors")]
    LengthMismatch { basis: usize, images: usize },

    #[error("symbol `{0}` is declared twice")]
    DuplicateSymbol(String),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("invalid rational `{0}`")]
    InvalidRational(String),

    #[error("invalid value expression `{input}`: {reason}")]
    InvalidExpr { input: String, reason: String },

    #[error("symbol `one` must have value 1")]
    BadOne,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
