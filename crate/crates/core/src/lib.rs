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

//! Pure-state tomography of spatial qudits by three-step phase-shifting
//! interferometry.
//!
//! A qudit is encoded as the complex transmission of `d` slits. Its state is
//! recovered from `4d - 3` projector outcomes (or from four camera frames of a
//! Mach-Zehnder interferometer in which one slit, Fourier transformed, acts
//! as a common phase reference):
//!
//! * the `d` slit populations `|c_k|^2`, and
//! * for every non-reference slit, three interference outcomes taken at
//!   reference phase shifts of `pi/4`, `3pi/4` and `5pi/4`.
//!
//! The crate is `no_std` and only needs an allocator. File formats, the
//! parallel batch runner and the command-line tool live in the `psitomo`
//! crate.
//!
//! Module map:
//!
//! * [`state`]: pure states, density matrices, random states, fidelity.
//! * [`projector`]: projector outcomes, shot noise, measurement budgets.
//! * [`optics`]: slit geometry, noise model and the interferogram renderer.
//! * [`psi`]: the three-step phase and visibility estimators.
//! * [`reconstruct`]: state assembly and purity certification.
//! * [`harness`]: seeded Monte Carlo trials, batches and noise calibration.

#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod harness;
pub mod optics;
pub mod projector;
pub mod psi;
pub mod reconstruct;
pub mod seed;
pub mod state;

pub use num_complex::Complex64;

pub use error::{Result, TomoError};
pub use harness::{
    acquire_frames, acquire_outcomes, calibrate_noise, calibrate_noise_with, execute_trial,
    run_batch, run_trial, summarize, Calibration, ExperimentSpec, Histogram, Pipeline,
    ReferenceMode, StateSource, SummaryStats, TrialResult,
};
pub use optics::{
    render_frames, Envelope, FrameKind, FrameSet, Interferogram, NoiseModel, OpticalConfig, Roi,
};
pub use projector::{
    exact_outcomes, exact_outcomes_mixed, measurement_plan, projector_state, sample_counts,
    MeasurementMode, MeasurementPlan, ProjectorOutcomes, ProjectorSpec,
};
pub use psi::{circular_mean, psi_phase, psi_visibility};
pub use reconstruct::{
    certify_purity, certify_purity_with_errors, choose_reference, reconstruct_extra_reference,
    reconstruct_frames_with, reconstruct_from_frames, reconstruct_from_outcomes,
    reconstruct_outcomes_with, PurityVerdict, ReconstructOptions, ReconstructionReport,
    RoiMeasurement, SlitCheck,
};
pub use state::{
    bloch_grid, fidelity, fidelity_mixed, haar_random, purity, DensityMatrix, PureState,
};
