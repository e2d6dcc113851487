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

//! State reconstruction and purity certification.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::error::{Result, TomoError};
use crate::optics::{FrameKind, FrameSet, Interferogram, OpticalConfig};
use crate::projector::{ProjectorOutcomes, ProjectorSpec};
use crate::psi::{circular_mean, psi_phase_with_threshold, psi_visibility, DEGENERACY_RATIO};
use crate::state::PureState;

/// Default visibility slack of the purity test.
pub const DEFAULT_TAU_PURITY: f64 = 0.02;
/// A reference population below this fraction of the largest population
/// cannot anchor the phases.
pub const WEAK_REFERENCE_RATIO: f64 = 1e-4;

/// Tunables shared by both reconstruction routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructOptions {
    pub tau_purity: f64,
    pub weak_reference_ratio: f64,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        Self {
            tau_purity: DEFAULT_TAU_PURITY,
            weak_reference_ratio: WEAK_REFERENCE_RATIO,
        }
    }
}

/// ROI averages of one slit.
#[derive(Debug, Clone, PartialEq)]
pub struct RoiMeasurement {
    pub slit: usize,
    /// Background-corrected mean of the blocked-reference frame.
    pub mean_intensity_blocked: f64,
    /// Means of the three interference frames.
    pub step_means: [f64; 3],
    /// Background-corrected reference intensity inside the ROI.
    pub reference_intensity: f64,
    /// Per-pixel fringe phases; degenerate pixels are left out.
    pub phase_map: Option<Vec<f64>>,
    /// Squared standard errors of `[blocked, reference, I_1, I_2, I_3]`
    /// from the pixel scatter inside the ROI.
    pub variances: [f64; 5],
}

/// Visibility test of one slit against the reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitCheck {
    pub slit: usize,
    pub gamma: f64,
    pub gamma_pure: f64,
    /// `gamma - gamma_pure`; `None` when the slit is too dim to test.
    pub margin: Option<f64>,
    /// Standard error of the margin, zero for exact data.
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PurityVerdict {
    pub pure: bool,
    pub tau: f64,
    /// Smallest margin over the tested slits, `+inf` if none was testable.
    pub min_margin: f64,
    pub checks: Vec<SlitCheck>,
    pub unverifiable: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionReport {
    /// Canonical-phase estimate.
    pub state: PureState,
    /// Measured visibility per state slit; 1 for the reference itself when
    /// it was not measured.
    pub per_slit_visibility: Vec<f64>,
    /// Visibility a pure state would show, per state slit.
    pub expected_visibility: Vec<f64>,
    pub purity: PurityVerdict,
    /// Physical slit used as reference (`d` for the extra reference slit).
    pub reference_used: usize,
    pub extra_reference: bool,
    pub outcome_budget: usize,
    /// State slits whose phase could not be measured.
    pub degenerate_slits: Vec<usize>,
}

/// Pure-state visibility bound `2 sqrt(a b) / (a + b)`.
pub fn pure_visibility(a: f64, b: f64) -> f64 {
    if a + b <= 0.0 {
        return 0.0;
    }
    2.0 * libm::sqrt((a * b).max(0.0)) / (a + b)
}

/// How the fringe offset `I_0` relates to the two beam intensities.
#[derive(Debug, Clone, Copy)]
enum OffsetModel {
    /// Projector outcomes: `I_0 = (p + r) / 2`.
    Outcomes,
    /// Camera intensities: `I_0 = p + r`.
    Frames,
}

/// Standard error of `gamma - gamma_pure` by first-order propagation.
///
/// `values` are `[p, r, I_1, I_2, I_3]`, `variances` their variances.
fn margin_sigma(model: OffsetModel, values: [f64; 5], variances: [f64; 5]) -> f64 {
    let margin = |v: &[f64; 5]| {
        let i0 = match model {
            OffsetModel::Outcomes => 0.5 * (v[0] + v[1]),
            OffsetModel::Frames => v[0] + v[1],
        };
        if i0 <= 0.0 {
            return 0.0;
        }
        libm::hypot(v[2] - v[3], v[4] - v[3]) / (SQRT_2 * i0) - pure_visibility(v[0], v[1])
    };
    let scale = values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut var = 0.0;
    for i in 0..5 {
        if variances[i] <= 0.0 {
            continue;
        }
        let h = 1e-6 * scale;
        let mut up = values;
        let mut down = values;
        up[i] += h;
        down[i] = (down[i] - h).max(0.0);
        let slope = (margin(&up) - margin(&down)) / (up[i] - down[i]);
        var += slope * slope * variances[i];
    }
    libm::sqrt(var)
}

/// Compare each slit's visibility with the pure-state bound.
///
/// `populations[k]` and `reference_intensity[k]` are the two beam
/// intensities interfering at slit `k`; the slit `skip` (the reference, when
/// it belongs to the state) is not tested. The verdict is pure iff every
/// testable slit satisfies `gamma >= gamma_pure - tau`.
pub fn certify_purity(
    populations: &[f64],
    visibilities: &[f64],
    reference_intensity: &[f64],
    skip: Option<usize>,
    tau: f64,
) -> Result<PurityVerdict> {
    let zeros = vec![0.0; populations.len()];
    certify_purity_with_errors(
        populations,
        visibilities,
        reference_intensity,
        &zeros,
        skip,
        tau,
    )
}

/// [`certify_purity`] for noisy data: slit `k` passes when its margin is
/// at least `-(tau + 3 sigma_k)`.
pub fn certify_purity_with_errors(
    populations: &[f64],
    visibilities: &[f64],
    reference_intensity: &[f64],
    sigmas: &[f64],
    skip: Option<usize>,
    tau: f64,
) -> Result<PurityVerdict> {
    let d = populations.len();
    for len in [visibilities.len(), reference_intensity.len(), sigmas.len()] {
        if len != d {
            return Err(TomoError::DimensionMismatch {
                expected: d,
                found: len,
            });
        }
    }
    let max_pop = populations.iter().cloned().fold(0.0, f64::max);
    let max_ref = reference_intensity.iter().cloned().fold(0.0, f64::max);
    let eps_pop = WEAK_REFERENCE_RATIO * max_pop;
    let eps_ref = WEAK_REFERENCE_RATIO * max_ref;

    let mut checks = Vec::with_capacity(d);
    let mut unverifiable = Vec::new();
    let mut min_margin = f64::INFINITY;
    let mut pure = true;
    for k in (0..d).filter(|&k| Some(k) != skip) {
        let (p, r, g) = (populations[k], reference_intensity[k], visibilities[k]);
        let gamma_pure = pure_visibility(p, r);
        let margin = if p > eps_pop && r > eps_ref {
            let m = g - gamma_pure;
            min_margin = min_margin.min(m);
            pure &= m >= -(tau + 3.0 * sigmas[k]);
            Some(m)
        } else {
            unverifiable.push(k);
            None
        };
        checks.push(SlitCheck {
            slit: k,
            gamma: g,
            gamma_pure,
            margin,
            sigma: sigmas[k],
        });
    }
    Ok(PurityVerdict {
        pure,
        tau,
        min_margin,
        checks,
        unverifiable,
    })
}

/// Index of the largest population, lowest index on ties.
pub fn choose_reference(populations: &[f64]) -> Result<usize> {
    if populations.iter().any(|p| !(*p >= 0.0)) {
        return Err(TomoError::InvalidConfig(
            "populations must be nonnegative".into(),
        ));
    }
    let mut best: Option<usize> = None;
    for (k, &p) in populations.iter().enumerate() {
        if p > 0.0 && best.is_none_or(|b| p > populations[b]) {
            best = Some(k);
        }
    }
    best.ok_or(TomoError::AllZero)
}

/// Reconstruct from the `4d - 3` projector outcomes with default options.
pub fn reconstruct_from_outcomes(
    outcomes: &ProjectorOutcomes,
    spec: &ProjectorSpec,
) -> Result<ReconstructionReport> {
    reconstruct_outcomes_with(outcomes, spec, &ReconstructOptions::default())
}

/// Reconstruct from projector outcomes (probabilities or raw counts).
///
/// With `c_r = sqrt(p_r)`, every other amplitude follows from
/// `sqrt(2) c_r c_k^* = (p_1 - p_2) + i (p_3 - p_2)`.
pub fn reconstruct_outcomes_with(
    outcomes: &ProjectorOutcomes,
    spec: &ProjectorSpec,
    opts: &ReconstructOptions,
) -> Result<ReconstructionReport> {
    outcomes.validate()?;
    if outcomes.dim != spec.dim() {
        return Err(TomoError::DimensionMismatch {
            expected: spec.dim(),
            found: outcomes.dim,
        });
    }
    if outcomes.ref_index != spec.ref_index() {
        return Err(TomoError::InvalidConfig(alloc::format!(
            "outcomes were taken with reference {}, not {}",
            outcomes.ref_index,
            spec.ref_index()
        )));
    }
    let d = spec.dim();
    let r = spec.ref_index();
    let pops = &outcomes.populations;
    let max_pop = pops.iter().cloned().fold(0.0, f64::max);
    let threshold = opts.weak_reference_ratio * max_pop;
    if !(pops[r] > threshold) || !(pops[r] > 0.0) {
        return Err(TomoError::WeakReference {
            population: pops[r],
            threshold,
        });
    }

    let c_ref = libm::sqrt(pops[r]);
    let mut amps = vec![Complex64::new(0.0, 0.0); d];
    amps[r] = Complex64::new(c_ref, 0.0);
    let mut gammas = vec![1.0; d];
    let mut expected = vec![1.0; d];
    for k in spec.slits() {
        let t = outcomes.interference_for(k).expect("validated shape");
        let coherence = Complex64::new(t[0] - t[1], t[2] - t[1]);
        amps[k] = (coherence / (SQRT_2 * c_ref)).conj();
        let i0 = 0.5 * (pops[r] + pops[k]);
        gammas[k] = if i0 > 0.0 {
            psi_visibility(t[0], t[1], t[2], i0)?
        } else {
            0.0
        };
        expected[k] = pure_visibility(pops[k], pops[r]);
    }
    let state = PureState::normalize(&amps)?.canonicalize();
    let refs = vec![pops[r]; d];
    // Raw counts are Poisson: each count is its own variance.
    let sigmas: Vec<f64> = (0..d)
        .map(|k| match outcomes.interference_for(k) {
            Some(t) if outcomes.counted => {
                let v = [pops[k], pops[r], t[0], t[1], t[2]];
                margin_sigma(OffsetModel::Outcomes, v, v)
            }
            _ => 0.0,
        })
        .collect();
    let purity =
        certify_purity_with_errors(pops, &gammas, &refs, &sigmas, Some(r), opts.tau_purity)?;
    Ok(ReconstructionReport {
        state,
        per_slit_visibility: gammas,
        expected_visibility: expected,
        purity,
        reference_used: r,
        extra_reference: false,
        outcome_budget: 4 * d - 3,
        degenerate_slits: Vec::new(),
    })
}

/// Reconstruct when the last slit is an extra, fully transmitting reference
/// that is not part of the state. `outcomes` cover all `d + 1` slits.
pub fn reconstruct_extra_reference(
    outcomes: &ProjectorOutcomes,
    opts: &ReconstructOptions,
) -> Result<ReconstructionReport> {
    let n = outcomes.dim;
    if n < 3 || outcomes.ref_index != n - 1 {
        return Err(TomoError::InvalidConfig(
            "extra-reference outcomes need the reference as the last of at least 3 slits".into(),
        ));
    }
    let spec = ProjectorSpec::new(n, n - 1)?;
    let full = reconstruct_outcomes_with(outcomes, &spec, opts)?;
    let d = n - 1;
    let state = PureState::normalize(&full.state.amps()[..d])?.canonicalize();
    let pops = &outcomes.populations;
    let refs = vec![pops[d]; d];
    let gammas = full.per_slit_visibility[..d].to_vec();
    let sigmas: Vec<f64> = (0..d)
        .map(|k| {
            full.purity
                .checks
                .iter()
                .find(|c| c.slit == k)
                .map_or(0.0, |c| c.sigma)
        })
        .collect();
    let purity =
        certify_purity_with_errors(&pops[..d], &gammas, &refs, &sigmas, None, opts.tau_purity)?;
    Ok(ReconstructionReport {
        state,
        per_slit_visibility: gammas,
        expected_visibility: full.expected_visibility[..d].to_vec(),
        purity,
        reference_used: d,
        extra_reference: true,
        outcome_budget: 4 * d,
        degenerate_slits: Vec::new(),
    })
}

/// Mean of the pixels outside every ROI column band (blocked frame) or
/// outside the reference band (reference-only frame); these see only dark
/// counts.
fn background(frame: &Interferogram, config: &OpticalConfig) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for y in 0..frame.height {
        for x in 0..frame.width {
            let dark = match frame.kind {
                FrameKind::ReferenceOnly => !config.in_reference_band(y),
                _ => config.slit_at_column(x).is_none(),
            };
            if dark {
                sum += frame.get(x, y);
                n += 1;
            }
        }
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Squared standard error of an ROI mean, from the sample variance.
fn mean_variance(frame: &Interferogram, roi: &crate::optics::Roi) -> f64 {
    let n = roi.area() as f64;
    if n < 2.0 {
        return 0.0;
    }
    let mean = frame.roi_mean(roi);
    let ss: f64 = frame.roi_values(roi).map(|v| (v - mean) * (v - mean)).sum();
    ss / (n - 1.0) / n
}

/// Background-corrected ROI means of the blocked-reference frame, one per
/// physical slit. Used to pick a reference before the interference frames.
pub fn blocked_intensities(frame: &Interferogram, config: &OpticalConfig) -> Vec<f64> {
    let bg = background(frame, config);
    config
        .rois
        .iter()
        .map(|roi| (frame.roi_mean(roi) - bg).max(0.0))
        .collect()
}

/// ROI averages and per-pixel phases for every physical slit.
pub fn measure_rois(set: &FrameSet) -> Result<Vec<RoiMeasurement>> {
    let config = &set.config;
    config.validate()?;
    let (h, w) = config.image_dims;
    let expected = [
        FrameKind::Blocked,
        FrameKind::Step(1),
        FrameKind::Step(2),
        FrameKind::Step(3),
    ];
    let all = set.frames.iter().chain(set.calibration.iter());
    for f in all {
        if f.width != w || f.height != h {
            return Err(TomoError::InvalidConfig(
                "frame size differs from the configured image size".into(),
            ));
        }
    }
    for (f, kind) in set.frames.iter().zip(expected) {
        if f.kind != kind {
            return Err(TomoError::InvalidConfig("frames out of order".into()));
        }
    }
    if let Some(cal) = &set.calibration {
        if cal.kind != FrameKind::ReferenceOnly {
            return Err(TomoError::InvalidConfig(
                "calibration frame must be reference-only".into(),
            ));
        }
    }

    let [blocked, s1, s2, s3] = &set.frames;
    let bg = background(blocked, config);
    let cal_bg = set.calibration.as_ref().map(|c| background(c, config));
    let max_intensity = config
        .rois
        .iter()
        .flat_map(|roi| {
            [s1, s2, s3]
                .into_iter()
                .flat_map(move |f| f.roi_values(roi))
        })
        .fold(0.0, f64::max);
    let eps = DEGENERACY_RATIO * max_intensity;

    Ok(config
        .rois
        .iter()
        .enumerate()
        .map(|(k, roi)| {
            let b = (blocked.roi_mean(roi) - bg).max(0.0);
            let means = [s1.roi_mean(roi), s2.roi_mean(roi), s3.roi_mean(roi)];
            let reference = match (&set.calibration, cal_bg) {
                (Some(cal), Some(cbg)) => (cal.roi_mean(roi) - cbg).max(0.0),
                // I_1 + I_3 cancels the cross term.
                _ => (0.5 * (means[0] + means[2]) - bg - b).max(0.0),
            };
            let phases: Vec<f64> = s1
                .roi_values(roi)
                .zip(s2.roi_values(roi))
                .zip(s3.roi_values(roi))
                .filter_map(|((a, b), c)| psi_phase_with_threshold(a, b, c, eps).ok())
                .collect();
            let [v1, v2, v3] = [s1, s2, s3].map(|f| mean_variance(f, roi));
            let vb = mean_variance(blocked, roi);
            let vr = match &set.calibration {
                Some(cal) => mean_variance(cal, roi),
                None => 0.25 * (v1 + v3) + vb,
            };
            RoiMeasurement {
                slit: k,
                mean_intensity_blocked: b,
                step_means: means,
                reference_intensity: reference,
                phase_map: (!phases.is_empty()).then_some(phases),
                variances: [vb, vr, v1, v2, v3],
            }
        })
        .collect())
}

/// Reconstruct from camera frames with default options.
pub fn reconstruct_from_frames(set: &FrameSet) -> Result<ReconstructionReport> {
    reconstruct_frames_with(set, &ReconstructOptions::default())
}

/// Reconstruct from the blocked, three phase-step and (optional)
/// reference-only frames.
///
/// Moduli come from the blocked frame, phases from the circular mean of the
/// per-pixel three-step phase over each ROI, taken relative to the reference.
pub fn reconstruct_frames_with(
    set: &FrameSet,
    opts: &ReconstructOptions,
) -> Result<ReconstructionReport> {
    let rois = measure_rois(set)?;
    let config = &set.config;
    let r = config.reference_slit;
    let d = config.signal_slits();

    let phase_of = |m: &RoiMeasurement| -> Option<f64> {
        m.phase_map
            .as_ref()
            .and_then(|p| circular_mean(p, None).ok())
    };
    if phase_of(&rois[r]).is_none() {
        return Err(TomoError::DegenerateFringe { slit: r });
    }

    let mut amps = Vec::with_capacity(d);
    let mut degenerate = Vec::new();
    let mut gammas = Vec::with_capacity(d);
    let mut expected = Vec::with_capacity(d);
    for m in &rois[..d] {
        let modulus = libm::sqrt(m.mean_intensity_blocked);
        let phase = if m.slit == r {
            0.0
        } else {
            match phase_of(m) {
                // The fringe phase is phi_ref - phi_k.
                Some(p) => -p,
                None => {
                    degenerate.push(m.slit);
                    0.0
                }
            }
        };
        amps.push(Complex64::from_polar(modulus, phase));
        let i0 = m.mean_intensity_blocked + m.reference_intensity;
        let [a, b, c] = m.step_means;
        gammas.push(if i0 > 0.0 {
            psi_visibility(a, b, c, i0)?
        } else {
            0.0
        });
        expected.push(pure_visibility(
            m.mean_intensity_blocked,
            m.reference_intensity,
        ));
    }
    let state = PureState::normalize(&amps)?.canonicalize();
    let pops: Vec<f64> = rois[..d].iter().map(|m| m.mean_intensity_blocked).collect();
    let refs: Vec<f64> = rois[..d].iter().map(|m| m.reference_intensity).collect();
    let sigmas: Vec<f64> = rois[..d]
        .iter()
        .map(|m| {
            let [a, b, c] = m.step_means;
            let v = [m.mean_intensity_blocked, m.reference_intensity, a, b, c];
            margin_sigma(OffsetModel::Frames, v, m.variances)
        })
        .collect();
    let skip = (!config.extra_reference).then_some(r);
    let purity = certify_purity_with_errors(&pops, &gammas, &refs, &sigmas, skip, opts.tau_purity)?;
    Ok(ReconstructionReport {
        state,
        per_slit_visibility: gammas,
        expected_visibility: expected,
        purity,
        reference_used: r,
        extra_reference: config.extra_reference,
        outcome_budget: 4 * d,
        degenerate_slits: degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{render_frames, Envelope, NoiseModel};
    use crate::projector::{exact_outcomes, exact_outcomes_mixed};
    use crate::seed;
    use crate::state::{fidelity, haar_random, DensityMatrix};
    use core::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn outcome_round_trip_examples() {
        for i in 0..200u64 {
            let d = 2 + (i % 13) as usize;
            let psi = haar_random(d, seed::derive(40, i)).unwrap();
            if psi.amps()[0].norm() <= 0.05 {
                continue;
            }
            let spec = ProjectorSpec::new(d, 0).unwrap();
            let report =
                reconstruct_from_outcomes(&exact_outcomes(&psi, &spec).unwrap(), &spec).unwrap();
            assert!(fidelity(&psi, &report.state).unwrap() >= 1.0 - 1e-10);
            assert_eq!(report.outcome_budget, 4 * d - 3);
            assert!(report.purity.pure);
        }
    }

    #[test]
    fn inverse_of_the_pi_over_three_example() {
        let spec = ProjectorSpec::new(2, 0).unwrap();
        let out = ProjectorOutcomes {
            dim: 2,
            ref_index: 0,
            populations: vec![0.5, 0.5],
            interference: vec![[0.98296, 0.62941, 0.01704]],
            counted: false,
        };
        let report = reconstruct_from_outcomes(&out, &spec).unwrap();
        let want =
            PureState::normalize(&[c(1.0, 0.0), Complex64::from_polar(1.0, PI / 3.0)]).unwrap();
        assert!(fidelity(&want, &report.state).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn null_reference_is_weak() {
        let psi = PureState::basis(3, 1).unwrap();
        let spec = ProjectorSpec::new(3, 0).unwrap();
        let out = exact_outcomes(&psi, &spec).unwrap();
        assert!(matches!(
            reconstruct_from_outcomes(&out, &spec),
            Err(TomoError::WeakReference { .. })
        ));
    }

    #[test]
    fn counts_reconstruct_like_probabilities() {
        let psi = haar_random(4, 7).unwrap();
        let spec = ProjectorSpec::new(4, 0).unwrap();
        let mut out = exact_outcomes(&psi, &spec).unwrap();
        out.populations.iter_mut().for_each(|p| *p *= 1e6);
        out.interference
            .iter_mut()
            .flatten()
            .for_each(|p| *p *= 1e6);
        out.counted = true;
        let report = reconstruct_from_outcomes(&out, &spec).unwrap();
        assert!(fidelity(&psi, &report.state).unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn choose_reference_examples() {
        assert_eq!(choose_reference(&[0.1, 0.7, 0.2]), Ok(1));
        assert_eq!(choose_reference(&[0.5, 0.5]), Ok(0));
        assert_eq!(choose_reference(&[0.0, 0.0]), Err(TomoError::AllZero));
        assert!(choose_reference(&[0.1, -0.1]).is_err());
        let pops = haar_random(9, 1).unwrap().populations();
        let k = choose_reference(&pops).unwrap();
        assert!(pops.iter().all(|p| pops[k] >= *p));
    }

    #[test]
    fn certify_examples() {
        // Pure input: every margin is non-negative up to rounding.
        let psi = haar_random(6, 3).unwrap();
        let spec = ProjectorSpec::new(6, 0).unwrap();
        let report =
            reconstruct_from_outcomes(&exact_outcomes(&psi, &spec).unwrap(), &spec).unwrap();
        assert!(report.purity.pure);
        assert!(report.purity.min_margin >= -1e-9);

        // Half-mixed |+>: |rho_01| = 0.25, visibility 0.5 against a bound of 1.
        let plus = PureState::normalize(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let rho = DensityMatrix::werner(&plus, 0.5).unwrap();
        let spec = ProjectorSpec::new(2, 0).unwrap();
        let out = exact_outcomes_mixed(&rho, &spec).unwrap();
        let report = reconstruct_from_outcomes(&out, &spec).unwrap();
        let check = report.purity.checks[0];
        assert!((check.gamma - 0.5).abs() < 1e-12);
        assert!((check.gamma_pure - 1.0).abs() < 1e-12);
        assert!(!report.purity.pure);

        // A dark slit is skipped.
        let psi = PureState::normalize(&[c(1.0, 0.0), c(0.0, 0.0), c(0.5, 0.5)]).unwrap();
        let spec = ProjectorSpec::new(3, 0).unwrap();
        let report =
            reconstruct_from_outcomes(&exact_outcomes(&psi, &spec).unwrap(), &spec).unwrap();
        assert_eq!(report.purity.unverifiable, vec![1]);
        assert!(report.purity.pure);
    }

    #[test]
    fn certify_rejects_mismatched_lengths() {
        assert!(certify_purity(&[0.5, 0.5], &[1.0], &[0.5, 0.5], None, 0.02).is_err());
    }

    #[test]
    fn extra_reference_outcomes() {
        let psi = PureState::basis(3, 2).unwrap();
        let mut amps = psi.amps().to_vec();
        amps.push(c(1.0, 0.0));
        let ext = PureState::normalize(&amps).unwrap();
        let spec = ProjectorSpec::new(4, 3).unwrap();
        let out = exact_outcomes(&ext, &spec).unwrap();
        let report = reconstruct_extra_reference(&out, &ReconstructOptions::default()).unwrap();
        assert!(fidelity(&psi, &report.state).unwrap() > 1.0 - 1e-12);
        assert_eq!(report.outcome_budget, 12);
        assert_eq!(report.reference_used, 3);
    }

    #[test]
    fn frames_round_trip_noiseless() {
        for d in 2..=6 {
            let psi = haar_random(d, 100 + d as u64).unwrap();
            let config = OpticalConfig::with_reference(d, 0, Envelope::Flat).unwrap();
            let set = render_frames(&psi, &config, &NoiseModel::ideal(), 0).unwrap();
            let report = reconstruct_from_frames(&set).unwrap();
            assert!(fidelity(&psi, &report.state).unwrap() > 1.0 - 1e-9);
            assert!(report.purity.pure, "{:?}", report.purity);
        }
    }

    #[test]
    fn frames_of_the_reference_slit_alone() {
        let psi = PureState::basis(3, 0).unwrap();
        let config = OpticalConfig::with_reference(3, 0, Envelope::Flat).unwrap();
        let set = render_frames(&psi, &config, &NoiseModel::ideal(), 0).unwrap();
        let report = reconstruct_from_frames(&set).unwrap();
        assert_eq!(report.state, psi);
        assert_eq!(report.degenerate_slits, vec![1, 2]);
    }

    #[test]
    fn dark_reference_slit_is_degenerate() {
        let psi = PureState::basis(3, 1).unwrap();
        let config = OpticalConfig::with_reference(3, 0, Envelope::Flat).unwrap();
        let set = render_frames(&psi, &config, &NoiseModel::ideal(), 0).unwrap();
        assert_eq!(
            reconstruct_from_frames(&set),
            Err(TomoError::DegenerateFringe { slit: 0 })
        );
    }

    #[test]
    fn visibility_without_calibration_frame() {
        let psi = haar_random(4, 5).unwrap();
        let mut config = OpticalConfig::with_extra_reference(4, Envelope::default()).unwrap();
        config.calibration_frame = false;
        let set = render_frames(&psi, &config, &NoiseModel::ideal(), 0).unwrap();
        assert!(set.calibration.is_none());
        let report = reconstruct_from_frames(&set).unwrap();
        assert!(fidelity(&psi, &report.state).unwrap() > 1.0 - 1e-9);
        for (g, e) in report
            .per_slit_visibility
            .iter()
            .zip(&report.expected_visibility)
        {
            assert!((g - e).abs() < 1e-9);
        }
    }

    #[test]
    fn dark_counts_are_subtracted() {
        let psi = haar_random(3, 11).unwrap();
        let config = OpticalConfig::with_extra_reference(3, Envelope::Flat).unwrap();
        let noise = NoiseModel {
            dark_rate: 0.3,
            ..NoiseModel::default()
        };
        let set = render_frames(&psi, &config, &noise, 0).unwrap();
        let report = reconstruct_from_frames(&set).unwrap();
        assert!(fidelity(&psi, &report.state).unwrap() > 1.0 - 1e-9);
        assert!(report.purity.pure);
    }
}
