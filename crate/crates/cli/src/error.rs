// Copyright 2026 qsl-open Contributors
// SPDX-License-Identifier: Apache-2.0

use qsl_core::QslError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    Quality(QslError),

    #[error("{0}")]
    Core(QslError),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl From<QslError> for CliError {
    fn from(e: QslError) -> Self {
        match e {
            QslError::IntegrationQuality { .. } => CliError::Quality(e),
            QslError::InvalidArgument(_)
            | QslError::NotHermitian(_)
            | QslError::NotNormalized(_)
            | QslError::InvalidMatrix(_)
            | QslError::DimensionMismatch { .. }
            | QslError::ResourceLimit { .. } => CliError::Config(e.to_string()),
            other => CliError::Core(other),
        }
    }
}

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const QUALITY: i32 = 2;
    pub const VIOLATION: i32 = 3;
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Quality(_) => exit::QUALITY,
            CliError::Config(_) | CliError::Core(_) | CliError::Io { .. } => exit::CONFIG,
        }
    }
}
