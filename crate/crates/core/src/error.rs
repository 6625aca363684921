use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("bit stream length {len} is not a multiple of {bits_per_symbol} bits per symbol")]
    NonMultipleLength { len: usize, bits_per_symbol: usize },
    #[error("invalid bit value {value} at position {index}")]
    InvalidBit { index: usize, value: u8 },
    #[error("expected length {expected}, got {actual}")]
    BadLength { expected: usize, actual: usize },
    #[error("transform length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("cyclic prefix length {cp_len} out of range 1..={n}")]
    BadPrefixLen { cp_len: usize, n: usize },
    #[error("symbol is in {actual} domain, expected {expected}")]
    WrongDomain {
        expected: &'static str,
        actual: &'static str,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("tap delay {delay} exceeds cyclic prefix length {cp_len}")]
    TapExceedsCp { delay: usize, cp_len: usize },
    #[error("pilot on tone {tone} is zero")]
    ZeroPilot { tone: usize },
    #[error("forgetting factor {0} outside (0, 1]")]
    InvalidLambda(f64),
    #[error("channel estimator has not received a pilot block")]
    NotInitialized,
    #[error("data symbol {symbol} precedes the first pilot block")]
    NoPilotBeforeData { symbol: usize },
    #[error("bit streams differ in length: {tx} vs {rx}")]
    LengthMismatch { tx: usize, rx: usize },
    #[error("empty bit stream")]
    EmptyStream,
    #[error("image has no pixels")]
    EmptyImage,
    #[error("not a binary PGM file (magic must be P5)")]
    BadMagic,
    #[error("malformed PGM header: {0}")]
    BadHeader(String),
    #[error("PGM pixel data truncated: expected {expected} bytes, got {actual}")]
    TruncatedData { expected: usize, actual: usize },
    #[error("unsupported PGM maxval {0} (only 255 is supported)")]
    UnsupportedMaxval(u32),
}
