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

//! File formats, parallel batches and the command-line tool for
//! [`psitomo_core`].
//!
//! * [`formats`]: state, outcome and report JSON.
//! * [`pgm`], [`frames_io`]: 16-bit frames with JSON sidecars.
//! * [`config`]: TOML/JSON experiment files.
//! * [`results`]: per-trial CSV and summary JSON.
//! * [`svg`]: Bloch-sphere and histogram figures.
//! * [`parallel`]: rayon batches and calibration.

pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod frames_io;
pub mod parallel;
pub mod pgm;
pub mod results;
pub mod svg;

pub use error::{Error, Result};

/// Environment variable that sets the default output directory.
pub const OUT_DIR_ENV: &str = "PSITOMO_OUT_DIR";
