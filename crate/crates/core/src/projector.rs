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

//! Projector-level forward model.
//!
//! For every slit `k` other than the reference `r`, three projectors onto
//! `(|r> + e^{i theta_l} |k>) / sqrt(2)` with `theta_l = pi/2 (l - 1/2)`
//! reproduce the three phase steps of the interferometer. Together with the
//! `d` canonical populations they make up the `4d - 3` outcomes the
//! reconstruction consumes.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand_distr::{Distribution, Poisson};

use crate::error::{Result, TomoError};
use crate::optics::NoiseModel;
use crate::seed;
use crate::state::{DensityMatrix, PureState};

/// Reference phase of each step, `pi/2 (l - 1/2)` for `l = 1, 2, 3`.
pub const STEP_PHASES: [f64; 3] = [PI / 4.0, 3.0 * PI / 4.0, 5.0 * PI / 4.0];

/// Which slit serves as reference in a `dim`-dimensional measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjectorSpec {
    dim: usize,
    ref_index: usize,
}

impl ProjectorSpec {
    pub fn new(dim: usize, ref_index: usize) -> Result<Self> {
        if dim < 2 {
            return Err(TomoError::DimensionTooSmall(dim));
        }
        if ref_index >= dim {
            return Err(TomoError::BadIndex {
                index: ref_index,
                dim,
            });
        }
        Ok(Self { dim, ref_index })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn ref_index(&self) -> usize {
        self.ref_index
    }

    #[inline]
    pub fn step_phases(&self) -> [f64; 3] {
        STEP_PHASES
    }

    /// Non-reference slits in ascending order.
    pub fn slits(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim).filter(move |&k| k != self.ref_index)
    }
}

/// `(|ref> + e^{i theta_l} |k>) / sqrt(2)` for step `l` in `1..=3`.
pub fn projector_state(spec: &ProjectorSpec, k: usize, step: usize) -> Result<PureState> {
    if k >= spec.dim || k == spec.ref_index {
        return Err(TomoError::BadIndex {
            index: k,
            dim: spec.dim,
        });
    }
    if !(1..=3).contains(&step) {
        return Err(TomoError::BadIndex {
            index: step,
            dim: 4,
        });
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); spec.dim];
    amps[spec.ref_index] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[k] = Complex64::from_polar(FRAC_1_SQRT_2, STEP_PHASES[step - 1]);
    PureState::from_normalized(amps)
}

/// The `d` populations and `3(d - 1)` interference outcomes of one
/// measurement run, either as probabilities or as raw counts.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorOutcomes {
    pub dim: usize,
    pub ref_index: usize,
    /// `p_k = |<k|psi>|^2`.
    pub populations: Vec<f64>,
    /// `[p_1, p_2, p_3]` for each non-reference slit, ascending slit order.
    pub interference: Vec<[f64; 3]>,
    /// Entries are detector counts rather than probabilities.
    pub counted: bool,
}

impl ProjectorOutcomes {
    pub fn spec(&self) -> Result<ProjectorSpec> {
        ProjectorSpec::new(self.dim, self.ref_index)
    }

    /// Interference triple of slit `k`, `None` for the reference or out of range.
    pub fn interference_for(&self, k: usize) -> Option<&[f64; 3]> {
        if k == self.ref_index || k >= self.dim {
            return None;
        }
        let i = if k < self.ref_index { k } else { k - 1 };
        self.interference.get(i)
    }

    /// Number of stored outcomes, `d + 3(d - 1)`.
    pub fn count(&self) -> usize {
        self.populations.len() + 3 * self.interference.len()
    }

    /// Divide every entry by the total population count.
    pub fn normalized(&self) -> ProjectorOutcomes {
        let total: f64 = self.populations.iter().sum();
        if total <= 0.0 {
            return self.clone();
        }
        ProjectorOutcomes {
            dim: self.dim,
            ref_index: self.ref_index,
            populations: self.populations.iter().map(|p| p / total).collect(),
            interference: self
                .interference
                .iter()
                .map(|t| [t[0] / total, t[1] / total, t[2] / total])
                .collect(),
            counted: false,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        self.spec()?;
        if self.populations.len() != self.dim {
            return Err(TomoError::DimensionMismatch {
                expected: self.dim,
                found: self.populations.len(),
            });
        }
        if self.interference.len() != self.dim - 1 {
            return Err(TomoError::DimensionMismatch {
                expected: self.dim - 1,
                found: self.interference.len(),
            });
        }
        let finite_nonneg = |x: &f64| x.is_finite() && *x >= 0.0;
        if !self.populations.iter().all(finite_nonneg)
            || !self.interference.iter().flatten().all(finite_nonneg)
        {
            return Err(TomoError::InvalidConfig(
                "outcomes must be finite and nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Exact outcome probabilities of a pure state.
pub fn exact_outcomes(psi: &PureState, spec: &ProjectorSpec) -> Result<ProjectorOutcomes> {
    exact_outcomes_with_steps(psi, spec, &STEP_PHASES)
}

/// [`exact_outcomes`] with the three reference phases replaced by `steps`,
/// e.g. to model an imperfect phase shifter.
pub fn exact_outcomes_with_steps(
    psi: &PureState,
    spec: &ProjectorSpec,
    steps: &[f64; 3],
) -> Result<ProjectorOutcomes> {
    if psi.dim() != spec.dim {
        return Err(TomoError::DimensionMismatch {
            expected: spec.dim,
            found: psi.dim(),
        });
    }
    let c = psi.amps();
    let r = spec.ref_index;
    let cross = |k: usize| c[r] * c[k].conj();
    Ok(assemble(spec, psi.populations(), cross, steps))
}

/// Exact outcome probabilities of a mixed state, `Tr(rho P)`.
pub fn exact_outcomes_mixed(
    rho: &DensityMatrix,
    spec: &ProjectorSpec,
) -> Result<ProjectorOutcomes> {
    if rho.dim() != spec.dim {
        return Err(TomoError::DimensionMismatch {
            expected: spec.dim,
            found: rho.dim(),
        });
    }
    let r = spec.ref_index;
    let cross = |k: usize| rho.get(r, k);
    Ok(assemble(spec, rho.populations(), cross, &STEP_PHASES))
}

fn assemble(
    spec: &ProjectorSpec,
    populations: Vec<f64>,
    cross: impl Fn(usize) -> Complex64,
    steps: &[f64; 3],
) -> ProjectorOutcomes {
    let r = spec.ref_index;
    let interference = spec
        .slits()
        .map(|k| {
            let base = 0.5 * (populations[r] + populations[k]);
            let coh = cross(k);
            steps.map(|theta| {
                let p = base + (coh * Complex64::from_polar(1.0, theta)).re;
                p.clamp(0.0, 1.0)
            })
        })
        .collect();
    ProjectorOutcomes {
        dim: spec.dim,
        ref_index: r,
        populations,
        interference,
        counted: false,
    }
}

/// Replace every probability by a Poisson count with mean
/// `p * photons_per_frame`.
pub fn sample_counts(
    outcomes: &ProjectorOutcomes,
    noise: &NoiseModel,
    seed: u64,
) -> Result<ProjectorOutcomes> {
    if !(noise.photons_per_frame > 0.0) {
        return Err(TomoError::InvalidConfig(
            "shot-noise sampling needs photons_per_frame > 0".into(),
        ));
    }
    let n = noise.photons_per_frame;
    let mut rng = seed::rng(seed);
    let mut draw = |p: f64| poisson(&mut rng, p * n);
    let populations = outcomes.populations.iter().map(|&p| draw(p)).collect();
    let interference = outcomes
        .interference
        .iter()
        .map(|t| [draw(t[0]), draw(t[1]), draw(t[2])])
        .collect();
    Ok(ProjectorOutcomes {
        dim: outcomes.dim,
        ref_index: outcomes.ref_index,
        populations,
        interference,
        counted: true,
    })
}

/// One Poisson draw; zero for a nonpositive mean.
pub(crate) fn poisson<R: rand::Rng + ?Sized>(rng: &mut R, mean: f64) -> f64 {
    if !(mean > 0.0) {
        return 0.0;
    }
    match Poisson::new(mean) {
        Ok(dist) => dist.sample(rng),
        // Beyond the sampler's range the relative fluctuation is < 1e-9.
        Err(_) => libm::round(mean),
    }
}

/// How the measurement is carried out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementMode {
    /// Populations first, then the reference is chosen and only `3(d - 1)`
    /// interference projectors are measured.
    Adaptive,
    /// Four fixed settings of `d` outcomes each.
    Fixed,
    /// Four camera frames, each recording all `d` slits at once.
    Image,
}

/// One measured quantity of a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measurement {
    Population(usize),
    Interference { slit: usize, step: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementPlan {
    pub mode: MeasurementMode,
    pub dim: usize,
    /// Number of outcome probabilities (or ROI readings) recorded.
    pub outcomes: usize,
    /// Number of measurement settings (camera frames in image mode).
    pub settings: usize,
    pub measurements: Vec<Measurement>,
}

impl MeasurementPlan {
    /// Camera frames needed, only meaningful in image mode.
    pub fn frames(&self) -> Option<usize> {
        match self.mode {
            MeasurementMode::Image => Some(self.settings),
            _ => None,
        }
    }
}

/// Outcome and setting counts of each measurement mode. The adaptive plan
/// lists reference slit 0; the actual reference is chosen at run time.
pub fn measurement_plan(dim: usize, mode: MeasurementMode) -> Result<MeasurementPlan> {
    if dim < 2 {
        return Err(TomoError::DimensionTooSmall(dim));
    }
    let mut measurements: Vec<Measurement> = (0..dim).map(Measurement::Population).collect();
    let first_slit = match mode {
        MeasurementMode::Adaptive => 1,
        MeasurementMode::Fixed | MeasurementMode::Image => 0,
    };
    for step in 1..=3 {
        for slit in first_slit..dim {
            measurements.push(Measurement::Interference { slit, step });
        }
    }
    let settings = match mode {
        MeasurementMode::Adaptive => 1 + 3 * (dim - 1),
        MeasurementMode::Fixed | MeasurementMode::Image => 4,
    };
    Ok(MeasurementPlan {
        mode,
        dim,
        outcomes: measurements.len(),
        settings,
        measurements,
    })
}
