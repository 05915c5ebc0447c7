use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised across the library. Every variant maps onto one CLI exit
/// code through [`Error::exit_code`]. Index fields are 0-based; messages
/// print them 1-based.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: row {} has {len} entries, expected {n}", .row + 1)]
    NotSquare { row: usize, len: usize, n: usize },

    #[error("matrix is not symmetric at ({}, {}): {a} vs {b}", .i + 1, .j + 1)]
    AsymmetricInput { i: usize, j: usize, a: f64, b: f64 },

    #[error("non-finite entry at ({}, {})", .i + 1, .j + 1)]
    NonFiniteEntry { i: usize, j: usize },

    #[error("negative distance {value} at ({}, {})", .i + 1, .j + 1)]
    NegativeDistance { i: usize, j: usize, value: f64 },

    #[error("nonzero diagonal entry {value} at point {}", .i + 1)]
    NonzeroDiagonal { i: usize, value: f64 },

    #[error("triangle inequality violated: d({0}, {1}) = {dij} > d({0}, {2}) + d({2}, {1}) = {via}", .i + 1, .j + 1, .k + 1)]
    TriangleViolation {
        i: usize,
        j: usize,
        k: usize,
        dij: f64,
        via: f64,
    },

    #[error("exponent p must be finite and nonnegative, got {0}")]
    InvalidExponent(f64),

    #[error("invalid edge ({}, {}, {w}): {reason}", .i + 1, .j + 1)]
    InvalidEdge {
        i: usize,
        j: usize,
        w: f64,
        reason: &'static str,
    },

    #[error("graph is disconnected: vertex {} is unreachable from vertex 1", .0 + 1)]
    DisconnectedGraph(usize),

    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("not a tree: {0}")]
    NotATree(String),

    #[error("closed-form cycle inverse requires an odd cycle, got n = {0}")]
    EvenCycle(usize),

    #[error("linear system is singular")]
    SingularSystem,

    #[error("functional vector u is zero")]
    ZeroFunctional,

    #[error("matrix has no positive direction on the whole space (largest eigenvalue {0})")]
    PositiveDirectionMissing(f64),

    #[error("matrix is not of strict negative type on F")]
    NotStrict,

    #[error("n = {n} exceeds the enumeration limit {max_n}")]
    TooLarge { n: usize, max_n: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Parse(_)
            | Error::Schema(_)
            | Error::NotSquare { .. }
            | Error::DimensionMismatch { .. } => 2,
            Error::AsymmetricInput { .. }
            | Error::NonFiniteEntry { .. }
            | Error::NegativeDistance { .. }
            | Error::NonzeroDiagonal { .. }
            | Error::TriangleViolation { .. }
            | Error::InvalidEdge { .. }
            | Error::DisconnectedGraph(_)
            | Error::NotATree(_) => 3,
            Error::PositiveDirectionMissing(_) => 4,
            Error::TooLarge { .. } => 5,
            Error::OracleMismatch(_) => 6,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
