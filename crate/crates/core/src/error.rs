use thiserror::Error;

use crate::checker::Status;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("need at least {min} points, got {got}")]
    TooSmall { min: usize, got: usize },
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("non-finite entry at ({i}, {j})")]
    NonFinite { i: usize, j: usize },
    #[error("matrix is not symmetric at ({i}, {j}): {a} vs {b}")]
    AsymmetricMatrix { i: usize, j: usize, a: f64, b: f64 },
    #[error("nonzero diagonal entry {value} at index {i}")]
    NonzeroDiagonal { i: usize, value: f64 },
    #[error("off-diagonal distance at ({i}, {j}) must be positive, got {value}")]
    NonpositiveOffDiagonal { i: usize, j: usize, value: f64 },
    #[error("exponent must be nonnegative, got {0}")]
    NegativeExponent(f64),
    #[error("scale factor must be positive, got {0}")]
    NonpositiveScale(f64),
    #[error("edge list is not a tree: {0}")]
    NotATree(String),
    #[error("edge ({u}, {v}) has nonpositive weight {weight}")]
    NonpositiveWeight { u: usize, v: usize, weight: f64 },
    #[error("tree must have unit edge weights")]
    NotUnitWeights,
    #[error("block size {n} violates (1 - 1/n)^(1/p) >= 1/2 for target exponent {target}")]
    BlockSizeTooSmall { n: usize, target: f64 },
    #[error("block exponents must be strictly decreasing and exceed the target {target}")]
    ExponentsNotDecreasing { target: f64 },
    #[error("duplicate angle {0} (points must be distinct)")]
    DuplicateAngle(f64),
    #[error("invalid distance range [{min}, {max}]")]
    BadRange { min: f64, max: f64 },
    #[error("invalid tolerance configuration: {0}")]
    BadTolerance(String),
    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    EigensolverFailure { sweeps: usize },
    #[error(
        "interval anomaly: {first:?} at q = {q_first} followed by {second:?} at q = {q_second}"
    )]
    IntervalAnomaly {
        q_first: f64,
        first: Status,
        q_second: f64,
        second: Status,
    },
    #[error("grid must be nonempty, nonnegative and strictly increasing")]
    BadGrid,
    #[error("no boundary witness: {0}")]
    NoBoundaryWitness(String),
    #[error("invalid simplex: {0}")]
    InvalidSimplex(String),
    #[error("load vector must have positive part and negative part each summing to 1")]
    BadNormalization,
    #[error(
        "exhaustive gap search is limited to {max} points, got {got}; use the sampling oracle"
    )]
    TooManyPoints { max: usize, got: usize },
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("gap must be nonnegative, got {0}")]
    NegativeGap(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
