//! Error types, one enum per pipeline stage.

use thiserror::Error;

/// Errors raised while loading or validating expression and covariate tables.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at row {row}, column {col}: {msg}")]
    Parse { row: usize, col: usize, msg: String },
    #[error("negative value {value} at row {row}, column {col}")]
    NegativeValue { row: usize, col: usize, value: f64 },
    #[error("duplicate identifier {id:?}")]
    DuplicateId { id: String },
    #[error("matrix is empty or too small: {rows} rows x {cols} columns (need at least 2x2)")]
    EmptyMatrix { rows: usize, cols: usize },
    #[error("missing column {name:?}")]
    MissingColumn { name: String },
    #[error("non-numeric value {value:?} in column {name:?} (row {row})")]
    NonNumericColumn {
        name: String,
        row: usize,
        value: String,
    },
    #[error("group column {name:?} has {levels} distinct levels, expected exactly 2")]
    NonBinaryGroup { name: String, levels: usize },
    #[error("group level {level:?} has only {count} sample(s), need at least 2")]
    SingletonGroup { level: String, count: usize },
    #[error("sample ids do not align: {msg}")]
    SampleMismatch { msg: String },
}

/// Errors raised by mutual-information network estimation.
#[derive(Debug, Error)]
pub enum MinetError {
    #[error("need at least 3 samples for kernel density estimation, got {n}")]
    TooFewSamples { n: usize },
    #[error("need at least 2 genes, got {p}")]
    TooFewGenes { p: usize },
    #[error("all gene columns are constant; no association structure to estimate")]
    AllConstant,
}

/// Errors raised during jackknife pseudo-value computation.
#[derive(Debug, Error)]
pub enum PseudoError {
    #[error("group {group} has {n} samples; leave-one-out needs at least 4")]
    GroupTooSmall { group: u8, n: usize },
    #[error("dimension mismatch: {msg}")]
    DimensionMismatch { msg: String },
    #[error("gene order differs between the two per-group results")]
    GeneOrderMismatch,
    #[error(transparent)]
    Minet(#[from] MinetError),
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Errors raised by the robust regression stage.
#[derive(Debug, Error)]
pub enum FitError {
    #[error("design matrix is rank deficient")]
    RankDeficient,
    #[error("too few rows: {n} rows for {cols} columns")]
    TooFewRows { n: usize, cols: usize },
    #[error("non-finite response value at row {row}")]
    NonFinite { row: usize },
    #[error("pseudo-values and covariates do not align: {msg}")]
    Alignment { msg: String },
    #[error("gene {gene_id:?}: {source}")]
    Gene {
        gene_id: String,
        #[source]
        source: Box<FitError>,
    },
}

/// Errors raised by p-value adjustment.
#[derive(Debug, Error)]
pub enum FdrError {
    #[error("p-value {value} at index {index} is outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },
}

/// Errors raised by the simulation generator.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("positive-definiteness repair failed after {attempts} shrinkage attempts")]
    PdRepairFailure { attempts: usize },
    #[error("reference distribution has {have} gene columns, need at least {need}")]
    RefTooSmall { have: usize, need: usize },
    #[error("invalid scenario: {msg}")]
    BadScenario { msg: String },
    #[error("reference column {col} is invalid: {msg}")]
    BadReference { col: usize, msg: String },
}

/// Errors raised by the benchmark harness.
#[derive(Debug, Error)]
pub enum BenchError {
    #[error("calls and truth have different lengths ({calls} vs {truth})")]
    LengthMismatch { calls: usize, truth: usize },
    #[error("replicate {index}: {source}")]
    Replicate {
        index: usize,
        #[source]
        source: Box<PranaError>,
    },
}

/// Top-level error type unifying all pipeline stages.
#[derive(Debug, Error)]
pub enum PranaError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Minet(#[from] MinetError),
    #[error(transparent)]
    Pseudo(#[from] PseudoError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Fdr(#[from] FdrError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Bench(#[from] BenchError),
}
