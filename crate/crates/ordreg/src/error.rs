//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by validation, evaluation and the benchmark harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("decision vector must have at least one component")]
    EmptyDecisionVector,
    #[error("decision vector not monotone: values[{index}] = {left} > values[{next}] = {right}", next = index + 1)]
    NotMonotone { index: usize, left: f64, right: f64 },
    #[error("non-finite value at position {index}")]
    NonFinite { index: usize },
    #[error("non-finite scalar input to {context}")]
    NonFiniteInput { context: &'static str },
    #[error("class count k = {k} is too small, need k >= 2")]
    BadClassCount { k: usize },
    #[error("simplex entries must be nonnegative: p[{index}] = {value}")]
    NegativeProbability { index: usize, value: f64 },
    #[error("simplex entries sum to {sum}, expected 1 within {tolerance}")]
    SimplexSum { sum: f64, tolerance: f64 },
    #[error("cannot normalize a vector with sum {sum}")]
    UnnormalizableSimplex { sum: f64 },
    #[error("label {label} outside 1..={k}")]
    LabelOutOfRange { label: usize, k: usize },
    #[error("{context}: expected dimension {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("loss increments must be nonnegative: c_{index} = {value}")]
    NotAdmissible { index: usize, value: f64 },
    #[error("g(0) must be 0, got {value}")]
    NonzeroOrigin { value: f64 },
    #[error("cumulative link likelihood for class {label} is below the {floor} floor")]
    CumulativeLinkDomain { label: usize, floor: f64 },
    #[error("cumulative probability u_{index} = {value} is at the boundary")]
    BoundaryCumulative { index: usize, value: f64 },
    #[error("{context} supports only the built-in phi losses")]
    UnsupportedPhi { context: &'static str },
    #[error("{context} is not defined for this surrogate family")]
    UnsupportedFamily { context: &'static str },
    #[error("non-finite gradient at iteration {iteration}")]
    NonFiniteGradient { iteration: usize },
    #[error("weights must be nonnegative and sum to 1, got sum {sum}")]
    BadWeights { sum: f64 },
    #[error("grid sweep guard: k = {k} exceeds the exhaustive-sweep limit {limit}")]
    GridGuard { k: usize, limit: usize },
    #[error("invalid optimizer configuration: {reason}")]
    BadOptimConfig { reason: &'static str },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("dataset file {path} is empty")]
    EmptyFile { path: String },
    #[error("row {row}: expected {expected} columns, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, column {col}: cannot parse {token:?} as a number")]
    NonNumericCell {
        row: usize,
        col: usize,
        token: String,
    },
    #[error("row {row}, column {col}: non-finite value")]
    NonFiniteCell { row: usize, col: usize },
    #[error("need at least {k} distinct target values for {k} bins, found {distinct}")]
    TooFewDistinct { k: usize, distinct: usize },
    #[error("equal-frequency binning left bin {bin} empty")]
    EmptyBin { bin: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {min} samples, got {n}")]
    TooFewSamples { n: usize, min: usize },
    #[error("fold count {folds} is invalid for {n} samples")]
    BadFoldCount { folds: usize, n: usize },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
