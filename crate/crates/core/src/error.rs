use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    InvalidArgument(&'static str),
    /// A frame or store does not match the memory's frame geometry.
    Geometry {
        expected: (usize, usize),
        found: (usize, usize),
    },
    OutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },
    /// The dependency graph contains a cycle through `task`.
    Cycle { task: usize },
    /// A golden store or pattern was built for a different memory shape.
    ShapeMismatch(&'static str),
    Parse(&'static str),
    /// An internal invariant failed during simulation.
    Invariant(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Geometry { expected, found } => write!(
                f,
                "frame geometry mismatch: expected {}x{}, found {}x{}",
                expected.0, expected.1, found.0, found.1
            ),
            Error::OutOfRange { what, index, len } => {
                write!(f, "{what} {index} out of range (limit {len})")
            }
            Error::Cycle { task } => write!(f, "dependency graph has a cycle through task {task}"),
            Error::ShapeMismatch(msg) => write!(f, "shape mismatch: {msg}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::Invariant(name) => write!(f, "invariant violated: {name}"),
        }
    }
}

impl core::error::Error for Error {}
