use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {name} = {value}: expected {expected}")]
    InvalidParameter {
        name: &'static str,
        value: String,
        expected: String,
    },

    #[error("dimension mismatch in {what}: {left} vs {right}")]
    DimensionMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("stream too short: {len} samples, at least {min} required")]
    StreamTooShort { len: usize, min: usize },

    #[error("singular channel at frequency bin {bin} (omega = {omega:.6} rad, condition number {condition:.3e})")]
    SingularChannel { bin: usize, omega: f64, condition: f64 },

    #[error("rank-deficient least-squares system ({rows}x{cols})")]
    RankDeficient { rows: usize, cols: usize },

    #[error("negative noise variance {0}")]
    NegativeVariance(f64),

    #[error("unknown power-delay profile '{0}'")]
    UnknownProfile(String),

    #[error("malformed power-delay profile at line {line}: {reason}")]
    MalformedProfile { line: usize, reason: String },

    #[error("degenerate power-delay profile: |tau| = {magnitude:.3e} at frequency offset {offset}")]
    DegenerateProfile { magnitude: f64, offset: usize },

    #[error("subcarrier {subcarrier}: {source}")]
    AtSubcarrier {
        subcarrier: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn invalid(name: &'static str, value: impl ToString, expected: impl ToString) -> Self {
        Error::InvalidParameter {
            name,
            value: value.to_string(),
            expected: expected.to_string(),
        }
    }

    pub fn at_subcarrier(self, subcarrier: usize) -> Self {
        Error::AtSubcarrier {
            subcarrier,
            source: Box::new(self),
        }
    }

    /// True when the root cause is a singular channel.
    pub fn is_singular(&self) -> bool {
        match self {
            Error::SingularChannel { .. } | Error::RankDeficient { .. } => true,
            Error::AtSubcarrier { source, .. } => source.is_singular(),
            _ => false,
        }
    }
}
