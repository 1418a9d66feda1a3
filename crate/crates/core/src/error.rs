use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid binary digit {found:?} at position {position}")]
    InvalidDigit { found: char, position: usize },

    #[error("binary string must contain at least one bit")]
    EmptyBitString,

    #[error("pattern longer than text: pattern has {pattern} bits, text has {text}")]
    PatternLongerThanText { pattern: usize, text: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("oracle-only width exceeded: {len} bits (max {max})")]
    OracleWidthExceeded { len: usize, max: usize },

    #[error("prime sieve of {requested} entries exceeds capacity cap {cap}")]
    Capacity { requested: u64, cap: u64 },

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("fingerprint width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("amplitude pair violates normalization: {norm}")]
    NormViolation { norm: f64 },

    #[error("degenerate marked count t={t} for n={n}")]
    DegenerateMarkedCount { t: usize, n: usize },

    #[error("qubit budget exceeded: {requested} qubits requested, max {max}")]
    QubitBudgetExceeded { requested: usize, max: usize },

    #[error("contract violation: pattern occurs {occurrences} times (exactly one required)")]
    ContractViolation { occurrences: usize },

    #[error("could not plant a uniquely occurring pattern after {attempts} attempts")]
    PlantingFailed { attempts: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
