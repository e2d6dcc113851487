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

//! Rayon-parallel batches. Every trial draws from its own seed, so results
//! do not depend on thread count or scheduling.

use psitomo_core::harness::trial_seed;
use psitomo_core::{
    calibrate_noise_with, execute_trial, summarize, Calibration, ExperimentSpec, SummaryStats,
    TrialResult,
};
use rayon::prelude::*;

use crate::error::{Error, Result};

fn trials(spec: &ExperimentSpec) -> psitomo_core::Result<Vec<TrialResult>> {
    let states = spec.states()?;
    Ok(states
        .par_iter()
        .enumerate()
        .map(|(i, psi)| execute_trial(psi, spec, i, trial_seed(spec.root_seed, i)))
        .collect())
}

/// Parallel counterpart of [`psitomo_core::run_batch`]; identical output.
pub fn run_batch(spec: &ExperimentSpec) -> Result<SummaryStats> {
    Ok(summarize(trials(spec)?, spec.histogram_bins))
}

/// [`run_batch`] on a dedicated pool of `threads` workers.
pub fn run_batch_with_threads(spec: &ExperimentSpec, threads: usize) -> Result<SummaryStats> {
    pool(threads)?.install(|| run_batch(spec))
}

pub fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Noise calibration with parallel batches.
pub fn calibrate_noise(target: f64, dim: usize, template: &ExperimentSpec) -> Result<Calibration> {
    Ok(calibrate_noise_with(target, dim, template, |spec| {
        trials(spec).map(|t| summarize(t, spec.histogram_bins).mean_fidelity)
    })?)
}
