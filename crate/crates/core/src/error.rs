use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("missing derivative of order {0}")]
    MissingDerivative(usize),

    #[error("degenerate face: {0}")]
    DegenerateFace(String),

    #[error("face is not flat: vertex {vertex} lies {distance:e} from the fitted flat")]
    NotFlat { vertex: usize, distance: f64 },

    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),

    #[error("polynomial is not homogeneous about the given center (degrees {0} and {1})")]
    NotHomogeneous(u32, u32),

    #[error("failed to parse polynomial: {0}")]
    Parse(String),

    #[error("oracle does not support this input: {0}")]
    UnsupportedOracle(String),

    #[error("rejection sampling acceptance rate {0:e} is below 1e-3")]
    Inefficient(f64),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Validation problems (bad input) as opposed to numerical breakdowns.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Numerical(_) | Error::Inefficient(_))
    }
}
