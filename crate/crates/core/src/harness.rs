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

//! Seeded Monte Carlo experiments: single trials, batches, summary
//! statistics and photon-budget calibration.
//!
//! Trial `i` of a batch draws everything from
//! `derive(derive(root_seed, STREAM_TRIAL), i)`, so results do not depend on
//! how many trials run or in which order.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Result, TomoError};
use crate::optics::{render_frames, Envelope, FrameSet, NoiseModel, OpticalConfig};
use crate::projector::{
    exact_outcomes_with_steps, poisson, sample_counts, ProjectorOutcomes, ProjectorSpec,
    STEP_PHASES,
};
use crate::reconstruct::{
    blocked_intensities, choose_reference, reconstruct_extra_reference, reconstruct_frames_with,
    reconstruct_outcomes_with, ReconstructOptions, ReconstructionReport, DEFAULT_TAU_PURITY,
};
use crate::seed;
use crate::state::{bloch_grid, fidelity, haar_random, PureState};

/// Default number of histogram bins.
pub const DEFAULT_BINS: usize = 20;
/// Trials per calibration evaluation.
pub const CALIBRATION_TRIALS: usize = 200;
/// Calibration stops once the batch mean is this close to the target.
pub const CALIBRATION_TOLERANCE: f64 = 0.002;
/// Photon budget search range (log10).
pub const CALIBRATION_LOG10_RANGE: (f64, f64) = (2.0, 10.0);

#[derive(Debug, Clone, PartialEq)]
pub enum StateSource {
    /// `n` states from the unitarily invariant measure.
    Haar(usize),
    /// `n` qubits on a Fibonacci lattice of the Bloch sphere.
    BlochGrid(usize),
    Explicit(Vec<PureState>),
}

impl StateSource {
    pub fn len(&self) -> usize {
        match self {
            StateSource::Haar(n) | StateSource::BlochGrid(n) => *n,
            StateSource::Explicit(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Which data the reconstruction sees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pipeline {
    /// Projector outcome probabilities or counts.
    Outcomes,
    /// Rendered camera frames.
    Frames {
        envelope: Envelope,
        calibration_frame: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceMode {
    /// Always use this state slit as reference.
    Fixed(usize),
    /// Measure populations first, then reference the brightest slit.
    Adaptive,
    /// Add a fully transmitting slit outside the state.
    ExtraSlit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub dim: usize,
    pub source: StateSource,
    pub pipeline: Pipeline,
    pub noise: NoiseModel,
    pub root_seed: u64,
    pub reference_mode: ReferenceMode,
    pub tau_purity: f64,
    pub histogram_bins: usize,
}

impl ExperimentSpec {
    /// Noiseless outcome-pipeline experiment referenced to slit 0.
    pub fn new(dim: usize, source: StateSource, root_seed: u64) -> Self {
        Self {
            dim,
            source,
            pipeline: Pipeline::Outcomes,
            noise: NoiseModel::ideal(),
            root_seed,
            reference_mode: ReferenceMode::Fixed(0),
            tau_purity: DEFAULT_TAU_PURITY,
            histogram_bins: DEFAULT_BINS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(TomoError::DimensionTooSmall(self.dim));
        }
        if self.source.is_empty() {
            return Err(TomoError::InvalidConfig(
                "experiment needs at least one state".into(),
            ));
        }
        match &self.source {
            StateSource::BlochGrid(_) if self.dim != 2 => {
                return Err(TomoError::InvalidConfig(
                    "bloch grid requires dim = 2".into(),
                ));
            }
            StateSource::Explicit(states) => {
                if let Some(s) = states.iter().find(|s| s.dim() != self.dim) {
                    return Err(TomoError::DimensionMismatch {
                        expected: self.dim,
                        found: s.dim(),
                    });
                }
            }
            _ => {}
        }
        if let ReferenceMode::Fixed(r) = self.reference_mode {
            if r >= self.dim {
                return Err(TomoError::BadIndex {
                    index: r,
                    dim: self.dim,
                });
            }
        }
        if self.histogram_bins == 0 {
            return Err(TomoError::InvalidConfig(
                "histogram needs at least one bin".into(),
            ));
        }
        if !(self.tau_purity >= 0.0) {
            return Err(TomoError::InvalidConfig("tau_purity must be >= 0".into()));
        }
        self.noise.validate()
    }

    /// The prepared states, in trial order.
    pub fn states(&self) -> Result<Vec<PureState>> {
        self.validate()?;
        Ok(match &self.source {
            StateSource::Haar(n) => {
                let root = seed::derive(self.root_seed, seed::STREAM_STATE);
                (0..*n)
                    .map(|i| haar_random(self.dim, seed::derive(root, i as u64)))
                    .collect::<Result<Vec<_>>>()?
            }
            StateSource::BlochGrid(n) => bloch_grid(*n),
            StateSource::Explicit(states) => states.clone(),
        })
    }

    fn options(&self) -> ReconstructOptions {
        ReconstructOptions {
            tau_purity: self.tau_purity,
            ..ReconstructOptions::default()
        }
    }
}

/// Seed of trial `index` under `root_seed`.
pub fn trial_seed(root_seed: u64, index: usize) -> u64 {
    seed::derive(seed::derive(root_seed, seed::STREAM_TRIAL), index as u64)
}

/// Outcome of one simulated reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub index: usize,
    pub dim: usize,
    pub truth: PureState,
    pub estimate: Option<PureState>,
    /// Zero for failed trials.
    pub fidelity: f64,
    /// Purity verdict, `None` for failed trials.
    pub pure: Option<bool>,
    pub reference_used: Option<usize>,
    pub outcome_budget: usize,
    pub seed: u64,
    pub failure: Option<TomoError>,
}

/// Simulate, reconstruct and score one state.
pub fn run_trial(psi: &PureState, spec: &ExperimentSpec, trial_seed: u64) -> Result<TrialResult> {
    if psi.dim() != spec.dim {
        return Err(TomoError::DimensionMismatch {
            expected: spec.dim,
            found: psi.dim(),
        });
    }
    let report = match spec.pipeline {
        Pipeline::Outcomes => outcome_trial(psi, spec, trial_seed)?,
        Pipeline::Frames {
            envelope,
            calibration_frame,
        } => frame_trial(psi, spec, envelope, calibration_frame, trial_seed)?,
    };
    Ok(TrialResult {
        index: 0,
        dim: spec.dim,
        truth: psi.clone(),
        fidelity: fidelity(psi, &report.state)?,
        pure: Some(report.purity.pure),
        reference_used: Some(report.reference_used),
        outcome_budget: report.outcome_budget,
        estimate: Some(report.state),
        seed: trial_seed,
        failure: None,
    })
}

/// [`run_trial`] that records failures instead of returning them.
pub fn execute_trial(
    psi: &PureState,
    spec: &ExperimentSpec,
    index: usize,
    trial_seed: u64,
) -> TrialResult {
    match run_trial(psi, spec, trial_seed) {
        Ok(mut t) => {
            t.index = index;
            t
        }
        Err(e) => TrialResult {
            index,
            dim: spec.dim,
            truth: psi.clone(),
            estimate: None,
            fidelity: 0.0,
            pure: None,
            reference_used: None,
            outcome_budget: 0,
            seed: trial_seed,
            failure: Some(e),
        },
    }
}

fn jittered_steps(noise: &NoiseModel, trial_seed: u64) -> [f64; 3] {
    if noise.phase_step_jitter_sd == 0.0 {
        return STEP_PHASES;
    }
    let mut rng = seed::rng(seed::derive(trial_seed, seed::STREAM_JITTER));
    STEP_PHASES.map(|theta| {
        let z: f64 = StandardNormal.sample(&mut rng);
        theta + z * noise.phase_step_jitter_sd
    })
}

fn measure(
    psi: &PureState,
    spec: &ProjectorSpec,
    noise: &NoiseModel,
    steps: &[f64; 3],
    trial_seed: u64,
) -> Result<ProjectorOutcomes> {
    let exact = exact_outcomes_with_steps(psi, spec, steps)?;
    if noise.has_shot_noise() {
        sample_counts(&exact, noise, seed::derive(trial_seed, seed::STREAM_SHOT))
    } else {
        Ok(exact)
    }
}

fn outcome_trial(
    psi: &PureState,
    spec: &ExperimentSpec,
    trial_seed: u64,
) -> Result<ReconstructionReport> {
    let out = acquire_outcomes(psi, spec.reference_mode, &spec.noise, trial_seed)?;
    let opts = spec.options();
    match spec.reference_mode {
        ReferenceMode::ExtraSlit => reconstruct_extra_reference(&out, &opts),
        _ => reconstruct_outcomes_with(&out, &out.spec()?, &opts),
    }
}

/// Measure the projector outcomes of one run under a reference strategy.
///
/// In adaptive mode the canonical basis is measured before the reference is
/// chosen and those counts are reused. With an extra slit the outcomes cover
/// the `d + 1` slits of `(c, 1)` normalized, reference last.
pub fn acquire_outcomes(
    psi: &PureState,
    mode: ReferenceMode,
    noise: &NoiseModel,
    seed: u64,
) -> Result<ProjectorOutcomes> {
    noise.validate()?;
    let dim = psi.dim();
    let steps = jittered_steps(noise, seed);
    match mode {
        ReferenceMode::Fixed(r) => measure(psi, &ProjectorSpec::new(dim, r)?, noise, &steps, seed),
        ReferenceMode::Adaptive => {
            let mut pops = psi.populations();
            if noise.has_shot_noise() {
                let mut rng = seed::rng(seed::derive(seed, seed::STREAM_POPULATIONS));
                for p in pops.iter_mut() {
                    *p = poisson(&mut rng, *p * noise.photons_per_frame);
                }
            }
            let r = choose_reference(&pops)?;
            let mut out = measure(psi, &ProjectorSpec::new(dim, r)?, noise, &steps, seed)?;
            out.populations = pops;
            Ok(out)
        }
        ReferenceMode::ExtraSlit => {
            let mut amps = psi.amps().to_vec();
            amps.push(Complex64::new(1.0, 0.0));
            let extended = PureState::normalize(&amps)?;
            let pspec = ProjectorSpec::new(dim + 1, dim)?;
            measure(&extended, &pspec, noise, &steps, seed)
        }
    }
}

fn frame_trial(
    psi: &PureState,
    spec: &ExperimentSpec,
    envelope: Envelope,
    calibration_frame: bool,
    trial_seed: u64,
) -> Result<ReconstructionReport> {
    let set = acquire_frames(
        psi,
        spec.reference_mode,
        envelope,
        calibration_frame,
        &spec.noise,
        trial_seed,
    )?;
    reconstruct_frames_with(&set, &spec.options())
}

/// Render the frames of one acquisition under a reference strategy. In
/// adaptive mode the blocked frame is read first and the filter is moved to
/// the brightest slit before the interference frames are taken.
pub fn acquire_frames(
    psi: &PureState,
    mode: ReferenceMode,
    envelope: Envelope,
    calibration_frame: bool,
    noise: &NoiseModel,
    seed: u64,
) -> Result<FrameSet> {
    let dim = psi.dim();
    let configure = |mut c: OpticalConfig| {
        c.calibration_frame = calibration_frame;
        c
    };
    let config = match mode {
        ReferenceMode::Fixed(r) => configure(OpticalConfig::with_reference(dim, r, envelope)?),
        ReferenceMode::ExtraSlit => configure(OpticalConfig::with_extra_reference(dim, envelope)?),
        ReferenceMode::Adaptive => {
            let first = configure(OpticalConfig::with_reference(dim, 0, envelope)?);
            let set = render_frames(psi, &first, noise, seed)?;
            let r = choose_reference(&blocked_intensities(&set.frames[0], &first))?;
            if r == 0 {
                return Ok(set);
            }
            configure(OpticalConfig::with_reference(dim, r, envelope)?)
        }
    };
    render_frames(psi, &config, noise, seed)
}

/// Fidelity histogram over `[min F, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn build(values: &[f64], bins: usize) -> Histogram {
        let bins = bins.max(1);
        let hi = 1.0f64;
        let mut lo = values.iter().cloned().fold(hi, f64::min);
        if hi - lo < 1e-12 {
            lo = hi - 1e-12;
        }
        let width = (hi - lo) / bins as f64;
        let edges = (0..=bins)
            .map(|i| if i == bins { hi } else { lo + width * i as f64 })
            .collect();
        let mut counts = vec![0usize; bins];
        for &v in values {
            let i = ((v - lo) / width) as usize;
            counts[i.min(bins - 1)] += 1;
        }
        Histogram { edges, counts }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStats {
    pub n: usize,
    pub mean_fidelity: f64,
    /// Sample standard deviation.
    pub std_fidelity: f64,
    pub median_fidelity: f64,
    pub histogram: Histogram,
    pub trials: Vec<TrialResult>,
    pub failures: usize,
    /// Successful trials of pure inputs judged not pure.
    pub purity_false_negatives: usize,
}

/// Aggregate trials, which are sorted by index first so the result does
/// not depend on execution order.
pub fn summarize(mut trials: Vec<TrialResult>, bins: usize) -> SummaryStats {
    trials.sort_by_key(|t| t.index);
    let n = trials.len();
    let fids: Vec<f64> = trials.iter().map(|t| t.fidelity).collect();
    let mean = if n == 0 {
        0.0
    } else {
        fids.iter().sum::<f64>() / n as f64
    };
    let std = if n < 2 {
        0.0
    } else {
        libm::sqrt(fids.iter().map(|f| (f - mean) * (f - mean)).sum::<f64>() / (n - 1) as f64)
    };
    SummaryStats {
        n,
        mean_fidelity: mean,
        std_fidelity: std,
        median_fidelity: median(&fids),
        histogram: Histogram::build(&fids, bins),
        failures: trials.iter().filter(|t| t.failure.is_some()).count(),
        purity_false_negatives: trials.iter().filter(|t| t.pure == Some(false)).count(),
        trials,
    }
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Run every trial of `spec` serially.
pub fn run_batch(spec: &ExperimentSpec) -> Result<SummaryStats> {
    let states = spec.states()?;
    let trials = states
        .iter()
        .enumerate()
        .map(|(i, psi)| execute_trial(psi, spec, i, trial_seed(spec.root_seed, i)))
        .collect();
    Ok(summarize(trials, spec.histogram_bins))
}

/// Calibrated noise model and the batch mean it produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub noise: NoiseModel,
    pub achieved_mean: f64,
    /// `(photons_per_frame, mean fidelity)` for every evaluation, in order.
    pub evaluations: Vec<(f64, f64)>,
}

/// Calibrate with serial batches.
pub fn calibrate_noise(target: f64, dim: usize, template: &ExperimentSpec) -> Result<Calibration> {
    calibrate_noise_with(target, dim, template, |spec| {
        run_batch(spec).map(|s| s.mean_fidelity)
    })
}

/// Bisect `photons_per_frame` (log scale, other noise fields as in the
/// template) until the mean fidelity of a [`CALIBRATION_TRIALS`]-state batch
/// is within [`CALIBRATION_TOLERANCE`] of `target`.
///
/// `evaluate` returns the mean fidelity of a batch; it lets callers supply
/// a parallel runner.
pub fn calibrate_noise_with<F>(
    target: f64,
    dim: usize,
    template: &ExperimentSpec,
    mut evaluate: F,
) -> Result<Calibration>
where
    F: FnMut(&ExperimentSpec) -> Result<f64>,
{
    if !(target > 0.9 && target < 1.0) {
        return Err(TomoError::InvalidConfig(alloc::format!(
            "calibration target {target} outside (0.9, 1)"
        )));
    }
    let mut probe = template.clone();
    probe.dim = dim;
    let states = probe.states()?;
    let n = states.len().min(CALIBRATION_TRIALS);
    let picked: Vec<PureState> = (0..n)
        .map(|i| states[i * states.len() / n].clone())
        .collect();
    probe.source = StateSource::Explicit(picked);

    let mut evaluations = Vec::new();
    let mut eval_at = |log_photons: f64, evaluations: &mut Vec<(f64, f64)>| -> Result<f64> {
        let mut spec = probe.clone();
        spec.noise.photons_per_frame = libm::pow(10.0, log_photons);
        let f = evaluate(&spec)?;
        evaluations.push((spec.noise.photons_per_frame, f));
        Ok(f)
    };

    let (mut lo, mut hi) = CALIBRATION_LOG10_RANGE;
    let f_lo = eval_at(lo, &mut evaluations)?;
    let f_hi = eval_at(hi, &mut evaluations)?;
    if target > f_hi + CALIBRATION_TOLERANCE || target < f_lo - CALIBRATION_TOLERANCE {
        return Err(TomoError::Unattainable { target });
    }
    let finish = |log_photons: f64, achieved: f64, evaluations: Vec<(f64, f64)>| {
        let mut noise = template.noise;
        noise.photons_per_frame = libm::pow(10.0, log_photons);
        Calibration {
            noise,
            achieved_mean: achieved,
            evaluations,
        }
    };
    if (f_lo - target).abs() <= CALIBRATION_TOLERANCE {
        return Ok(finish(lo, f_lo, evaluations));
    }
    if (f_hi - target).abs() <= CALIBRATION_TOLERANCE && f_hi < target {
        return Ok(finish(hi, f_hi, evaluations));
    }

    let mut best = (hi, f_hi);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let f = eval_at(mid, &mut evaluations)?;
        if (f - target).abs() < (best.1 - target).abs() {
            best = (mid, f);
        }
        // Keep narrowing well inside the tolerance band; the answer must
        // only be within it, but a centered value survives re-sampling.
        if (f - target).abs() <= 0.25 * CALIBRATION_TOLERANCE || hi - lo < 1e-3 {
            break;
        }
        if f < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (best.1 - target).abs() > CALIBRATION_TOLERANCE {
        return Err(TomoError::Unattainable { target });
    }
    Ok(finish(best.0, best.1, evaluations))
}
