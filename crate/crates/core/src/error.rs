use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid neighborhood: {0}")]
    InvalidNeighborhood(String),
    /// Two offsets of one axis coincide modulo `n`. `b == 0` means the offset
    /// lands on the central cell.
    #[error("offsets {a} and {b} coincide modulo {n}")]
    OffsetCollision { a: usize, b: usize, n: usize },
    #[error("cell ({i},{j}) is outside the {n}x{n} grid")]
    CellOutOfRange { i: usize, j: usize, n: usize },
    #[error("expected one north and one east offset, got {north} and {east}")]
    WrongNeighborhoodArity { north: usize, east: usize },
    #[error("grid side {n} exceeds the matrix predictor cap of {cap}")]
    InstanceTooLarge { n: usize, cap: usize },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("grid sizes differ: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("family out of range: {0}")]
    FamilyOutOfRange(String),
    #[error("gadget construction failed: {0}")]
    GadgetConstructionFailed(String),
    #[error("layout needs a {needed}x{needed} grid, limit is {limit}")]
    LayoutOverflow { needed: usize, limit: usize },
}

pub(crate) fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}
