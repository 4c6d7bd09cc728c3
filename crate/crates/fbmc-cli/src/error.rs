//! CLI error kinds and their process exit codes.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{key}: {message}")]
    Config { key: String, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Numerical(fbmc_core::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 0 is success; configuration, usage and I/O failures give 2, numerical failures 3.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(_) => 3,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config { .. } => "config",
            CliError::Io { .. } => "io",
            CliError::Usage(_) => "usage",
            CliError::Numerical(_) => "numerical",
        }
    }

    /// Single-line `key=value` record for standard error.
    pub fn machine_line(&self) -> String {
        let message = self.to_string().replace(['\n', '\r'], " ");
        let mut line = format!("error kind={} exit={}", self.kind(), self.exit_code());
        if let CliError::Config { key, .. } = self {
            line.push_str(&format!(" key={key}"));
        }
        line.push_str(&format!(" message={message:?}"));
        line
    }
}

impl From<fbmc_core::Error> for CliError {
    fn from(e: fbmc_core::Error) -> Self {
        if is_numerical(&e) {
            return CliError::Numerical(e);
        }
        let key = match &e {
            fbmc_core::Error::InvalidParameter { name, .. } => (*name).to_string(),
            _ => "simulation".to_string(),
        };
        CliError::config(key, e.to_string())
    }
}

fn is_numerical(e: &fbmc_core::Error) -> bool {
    match e {
        fbmc_core::Error::DegenerateProfile { .. } => true,
        fbmc_core::Error::AtSubcarrier { source, .. } => is_numerical(source),
        other => other.is_singular(),
    }
}
