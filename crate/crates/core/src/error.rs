use thiserror::Error;

/// Errors raised while building or reading capacities.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("criterion set must contain at least one criterion")]
    EmptyCriteria,
    #[error("criterion set exceeds the dense limit of {max} criteria (got {got}); use a 2-additive capacity")]
    TooManyCriteria { got: usize, max: usize },
    #[error("invalid criterion name {0:?}")]
    InvalidName(String),
    #[error("duplicate criterion name {0:?}")]
    DuplicateName(String),
    #[error("unknown criterion {0:?}")]
    UnknownCriterion(String),
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("weight {index} is negative ({value})")]
    NegativeWeight { index: usize, value: f64 },
    #[error("weight {index} is not finite")]
    NonFiniteWeight { index: usize },
    #[error("weights sum to {sum}, expected 1")]
    WeightSum { sum: f64 },
    #[error("expected {expected} subset values, got {got}")]
    ValueCount { expected: usize, got: usize },
    #[error("capacity value for subset {mask:#b} is not finite")]
    NonFiniteValue { mask: usize },
    #[error("mu({which}) must be {expected}, got {value}")]
    Boundary {
        which: &'static str,
        expected: f64,
        value: f64,
    },
    #[error("2-additive coefficients sum to zero on the full set; cannot normalize")]
    Degenerate,
    #[error("criterion sets differ")]
    CriteriaMismatch,
}

/// Errors raised by the aggregation operators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum AggregateError {
    #[error("vector has {got} scores but the criterion set has {expected}")]
    Arity { expected: usize, got: usize },
    #[error("score {index} is not finite")]
    NonFinite { index: usize },
    #[error("score {index} is outside [0, 1] ({value})")]
    OutOfRange { index: usize, value: f64 },
    #[error("document {doc:?}: {source}")]
    Document {
        doc: String,
        #[source]
        source: Box<AggregateError>,
    },
    #[error("priority order is not a permutation of the criteria")]
    InvalidPermutation,
    #[error("ranking input mixes query ids {first:?} and {other:?}")]
    MixedQueries { first: String, other: String },
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Errors raised by the importance and correlation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum IndexError {
    #[error("interaction needs two distinct criteria")]
    SameCriterion,
    #[error("criterion index {0} out of range")]
    OutOfRange(usize),
    #[error("sequences differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 observations, got {0}")]
    TooShort(usize),
    #[error("rank variance is zero; correlation undefined")]
    ZeroVariance,
}

/// Errors raised by the evaluation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("cutoff k must be at least 1")]
    InvalidCutoff,
    #[error("invalid metric {0:?} (expected P@k with k >= 1, or MAP)")]
    InvalidMetric(String),
    #[error("no queries to evaluate")]
    NoQueries,
    #[error("need at least 2 paired observations, got {0}")]
    TooFewPairs(usize),
    #[error("paired samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("query sets are not aligned: {0}")]
    Misaligned(String),
    #[error("differences have zero variance and nonzero mean; t is unbounded")]
    ZeroVariance,
}

/// A malformed line in one of the text formats.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

/// Errors raised by the data module (parsing, normalization, generation).
#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("non-finite score for ({query}, {doc})")]
    NonFinite { query: String, doc: String },
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Errors raised by the training pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrainingError {
    #[error("step {step} is invalid for {n} criteria")]
    InvalidStep { step: f64, n: usize },
    #[error("tuning grid is empty")]
    EmptyGrid,
    #[error("dataset has no evaluable queries (no judged relevant documents)")]
    NoJudgedQueries,
    #[error("no training samples")]
    NoSamples,
    #[error("top-K must be at least 1")]
    InvalidTopK,
    #[error("ridge must be finite and nonnegative")]
    InvalidRidge,
    #[error("least-squares system is rank deficient ({rank} of {unknowns} coordinates identified) and ridge is 0")]
    RankDeficient { rank: usize, unknowns: usize },
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Aggregate(#[from] AggregateError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}
