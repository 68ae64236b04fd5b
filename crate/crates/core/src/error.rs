use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("pole error: F({t}) = {value:e} is below the pole threshold")]
    Pole { t: f64, value: f64 },

    #[error("quadrature did not reach relative tolerance {tol:e} on [{a}, {b}] (last change {change:e})")]
    Quadrature { a: f64, b: f64, tol: f64, change: f64 },

    #[error("singular mass matrix: diagonal entry {index} = {value:e}")]
    SingularMass { index: usize, value: f64 },

    #[error("eigenvalue bracket failure: {0}")]
    Bracket(String),

    #[error("Rayleigh quotient has a zero denominator")]
    ZeroDenominator,

    #[error("degree p = {p} is outside 0 <= p <= m - 2 for m = {m}")]
    Degree { m: usize, p: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
