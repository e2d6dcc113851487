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

use alloc::string::String;

/// Errors raised by state construction, simulation and reconstruction.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TomoError {
    #[error("all amplitudes vanish")]
    ZeroVector,
    #[error("dimension {0} is too small, need at least 2")]
    DimensionTooSmall(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("bad index {index} for dimension {dim}")]
    BadIndex { index: usize, dim: usize },
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("configuration provides {rois} ROIs for a {dim}-dimensional state")]
    ConfigMismatch { rois: usize, dim: usize },
    #[error("fringe modulation vanishes on slit {slit}")]
    DegenerateFringe { slit: usize },
    #[error("reference intensity must be positive")]
    NonpositiveReference,
    #[error("phasor resultant vanishes")]
    ZeroResultant,
    #[error("reference population {population:e} is below threshold {threshold:e}")]
    WeakReference { population: f64, threshold: f64 },
    #[error("all populations vanish")]
    AllZero,
    #[error("target fidelity {target} is not bracketed by the photon budget range")]
    Unattainable { target: f64 },
}

pub type Result<T> = core::result::Result<T, TomoError>;
