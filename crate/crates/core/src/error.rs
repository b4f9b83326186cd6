use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is numerically rank deficient (smallest singular value {smallest:e}, largest {largest:e})")]
    RankDeficient { smallest: f64, largest: f64 },

    #[error("ambient dimensions differ: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },

    #[error("target dimension n = {n} must be smaller than source dimension N = {ambient}")]
    DimensionOrder { n: usize, ambient: usize },

    #[error("projected basis collapsed in rank (smallest singular value {smallest:e}, largest {largest:e})")]
    RankCollapse { smallest: f64, largest: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("tight bound requires the principal-angle cosines")]
    MissingCosines,

    #[error("could not scale a uniform spectrum into [0, 1] after {retries} draws")]
    SpectrumInfeasible { retries: usize },

    #[error("infeasible construction: {0}")]
    Infeasible(String),

    #[error("invalid experiment config: {0}")]
    Config(String),

    #[error("trial {index}: {source}")]
    Trial {
        index: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Strips any trial context.
    pub fn root(&self) -> &Error {
        match self {
            Error::Trial { source, .. } => source.root(),
            other => other,
        }
    }
}
