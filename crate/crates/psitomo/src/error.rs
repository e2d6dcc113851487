// Copyright 2026 The psitomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::path::PathBuf;

use psitomo_core::TomoError;

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Runtime failures (IO and similar).
pub const EXIT_RUNTIME: i32 = 1;
/// Invalid configuration, arguments or input files.
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_WEAK_REFERENCE: i32 = 3;
pub const EXIT_DEGENERATE_FRINGE: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Tomo(#[from] TomoError),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => EXIT_RUNTIME,
            Error::Parse { .. } | Error::Config(_) => EXIT_CONFIG,
            Error::Tomo(e) => match e {
                TomoError::WeakReference { .. } => EXIT_WEAK_REFERENCE,
                TomoError::DegenerateFringe { .. } => EXIT_DEGENERATE_FRINGE,
                TomoError::Unattainable { .. } => EXIT_RUNTIME,
                _ => EXIT_CONFIG,
            },
        }
    }
}

pub(crate) fn read(path: &std::path::Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write(path: &std::path::Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
