use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Both the real and imaginary parts of the Bogoliubov phase vanish; only
    /// happens where the gap closes.
    #[error("Bogoliubov angle undefined at k = {k} (gap closes)")]
    DegenerateAngle { k: f64 },

    #[error("matrix is not skew-symmetric (max |A + A^T| = {asymmetry:e})")]
    NotSkew { asymmetry: f64 },

    #[error("matrix dimension {0} is not even")]
    OddDimension(usize),

    #[error("adaptive quadrature did not converge at t = {t} (error estimate {error:e})")]
    QuadratureNonConvergence { t: f64, error: f64 },

    #[error("crossing existence is not monotone in beta over the bracket: {pattern:?}")]
    NonMonotoneBracket { betas: Vec<f64>, pattern: Vec<bool> },

    #[error("assembled correlator row does not match the template at column {column}")]
    PatternMismatch { column: usize },

    #[error("configuration: {0}")]
    Config(String),

    #[error("at {point}: {source}")]
    AtPoint { point: String, source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors that stem from the numerics rather than from the input
    /// or the environment.
    pub fn is_numerical(&self) -> bool {
        if let Error::AtPoint { source, .. } = self {
            return source.is_numerical();
        }
        matches!(
            self,
            Error::DegenerateAngle { .. }
                | Error::NotSkew { .. }
                | Error::QuadratureNonConvergence { .. }
                | Error::NonMonotoneBracket { .. }
                | Error::PatternMismatch { .. }
        )
    }
}
