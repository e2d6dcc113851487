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

use psitomo_core::harness::{median, trial_seed};
use psitomo_core::{
    exact_outcomes, haar_random, reconstruct_from_outcomes, render_frames, run_batch, seed,
    Envelope, ExperimentSpec, NoiseModel, OpticalConfig, Pipeline, ProjectorSpec, ReferenceMode,
    StateSource,
};

fn jitter(sd: f64) -> NoiseModel {
    NoiseModel {
        phase_step_jitter_sd: sd,
        ..NoiseModel::ideal()
    }
}

#[test]
fn median_fidelity_degrades_monotonically_with_step_jitter() {
    for d in [2, 5, 14] {
        let mut last = f64::INFINITY;
        for sd in [0.0, 0.02, 0.05, 0.1] {
            let mut spec = ExperimentSpec::new(d, StateSource::Haar(200), 77);
            spec.reference_mode = ReferenceMode::Adaptive;
            spec.noise = jitter(sd);
            let stats = run_batch(&spec).unwrap();
            assert!(
                stats.median_fidelity <= last,
                "d={d} sd={sd}: {} > {last}",
                stats.median_fidelity
            );
            last = stats.median_fidelity;
        }
        assert!(last < 1.0 - 1e-6, "jitter must cost fidelity at d={d}");
    }
}

#[test]
fn exact_pure_outcomes_are_never_rejected() {
    for i in 0..1000u64 {
        let d = 2 + (i as usize % 13);
        let psi = haar_random(d, seed::derive(91, i)).unwrap();
        let spec = ProjectorSpec::new(d, 0).unwrap();
        let report =
            reconstruct_from_outcomes(&exact_outcomes(&psi, &spec).unwrap(), &spec).unwrap();
        assert!(report.purity.pure, "state {i} (d={d})");
        assert!(report.purity.min_margin >= -1e-9);
    }
}

#[test]
fn batches_are_seed_deterministic() {
    let mut spec = ExperimentSpec::new(5, StateSource::Haar(40), 3);
    spec.noise = NoiseModel::laboratory();
    spec.reference_mode = ReferenceMode::ExtraSlit;
    assert_eq!(run_batch(&spec).unwrap(), run_batch(&spec).unwrap());
    let mut other = spec.clone();
    other.root_seed = 4;
    assert_ne!(
        run_batch(&spec).unwrap().mean_fidelity,
        run_batch(&other).unwrap().mean_fidelity
    );
}

#[test]
fn noiseless_frame_batches_certify_every_state() {
    let mut spec = ExperimentSpec::new(4, StateSource::Haar(30), 12);
    spec.pipeline = Pipeline::Frames {
        envelope: Envelope::Flat,
        calibration_frame: true,
    };
    spec.reference_mode = ReferenceMode::Adaptive;
    let stats = run_batch(&spec).unwrap();
    assert_eq!(stats.failures, 0);
    assert_eq!(stats.purity_false_negatives, 0);
    assert!(stats.trials.iter().all(|t| t.pure == Some(true)));
    assert!(stats.median_fidelity > 1.0 - 1e-6);
}

#[test]
fn jittered_qubit_frames_stay_above_099() {
    let mut spec = ExperimentSpec::new(2, StateSource::Haar(500), 5);
    spec.pipeline = Pipeline::Frames {
        envelope: Envelope::Flat,
        calibration_frame: true,
    };
    spec.reference_mode = ReferenceMode::Adaptive;
    spec.noise = jitter(0.05);
    let stats = run_batch(&spec).unwrap();
    assert!(stats.median_fidelity > 0.99, "{}", stats.median_fidelity);
}

#[test]
fn blocked_frame_tracks_populations() {
    for i in 0..20u64 {
        let d = 2 + i as usize % 9;
        let psi = haar_random(d, seed::derive(8, i)).unwrap();
        let config = OpticalConfig::with_reference(d, 0, Envelope::Flat).unwrap();
        let set = render_frames(
            &psi,
            &config,
            &NoiseModel::ideal(),
            trial_seed(1, i as usize),
        )
        .unwrap();
        let means: Vec<f64> = config
            .rois
            .iter()
            .map(|r| set.frames[0].roi_mean(r))
            .collect();
        let total: f64 = means.iter().sum();
        for (m, p) in means.iter().zip(psi.populations()) {
            assert!((m / total - p).abs() < 1e-9);
        }
    }
    assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
}
