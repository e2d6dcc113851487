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

use psitomo::frames_io::{read_frames, write_frames};
use psitomo::results::trials_csv;
use psitomo::{parallel, svg};
use psitomo_core::{
    acquire_frames, fidelity, haar_random, reconstruct_from_frames, run_batch, Envelope,
    ExperimentSpec, NoiseModel, Pipeline, ReferenceMode, StateSource,
};

#[test]
fn frames_survive_the_disk_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (i, mode) in [
        ReferenceMode::Fixed(1),
        ReferenceMode::Adaptive,
        ReferenceMode::ExtraSlit,
    ]
    .into_iter()
    .enumerate()
    {
        let psi = haar_random(5, 40 + i as u64).unwrap();
        let set = acquire_frames(
            &psi,
            mode,
            Envelope::default(),
            true,
            &NoiseModel::ideal(),
            9,
        )
        .unwrap();
        let sub = dir.path().join(format!("set{i}"));
        write_frames(&sub, &set, 9).unwrap();
        let (back, seed) = read_frames(&sub).unwrap();
        assert_eq!(seed, 9);
        assert_eq!(back.config, set.config);
        let f = fidelity(&psi, &reconstruct_from_frames(&back).unwrap().state).unwrap();
        assert!(f > 1.0 - 1e-6, "{mode:?}: {f}");
    }
}

#[test]
fn counted_frames_are_stored_without_rescaling() {
    let dir = tempfile::tempdir().unwrap();
    let psi = haar_random(3, 2).unwrap();
    let set = acquire_frames(
        &psi,
        ReferenceMode::Fixed(0),
        Envelope::Flat,
        false,
        &NoiseModel {
            photons_per_frame: 1e5,
            dark_rate: 0.5,
            ..NoiseModel::laboratory()
        },
        4,
    )
    .unwrap();
    write_frames(dir.path(), &set, 4).unwrap();
    let (back, _) = read_frames(dir.path()).unwrap();
    assert_eq!(back.frames, set.frames);
    assert!(back.calibration.is_none());
}

#[test]
fn inconsistent_sidecars_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let psi = haar_random(2, 1).unwrap();
    let set = acquire_frames(
        &psi,
        ReferenceMode::Fixed(0),
        Envelope::Flat,
        false,
        &NoiseModel::ideal(),
        1,
    )
    .unwrap();
    write_frames(dir.path(), &set, 1).unwrap();
    let path = dir.path().join("frame_2.json");
    let text = std::fs::read_to_string(&path)
        .unwrap()
        .replace("\"seed\": 1", "\"seed\": 2");
    std::fs::write(&path, text).unwrap();
    assert!(matches!(
        read_frames(dir.path()),
        Err(psitomo::Error::Parse { .. })
    ));
}

#[test]
fn parallel_batches_match_serial_for_any_thread_count() {
    let mut spec = ExperimentSpec::new(4, StateSource::Haar(64), 21);
    spec.noise = NoiseModel::laboratory();
    spec.reference_mode = ReferenceMode::Adaptive;
    let serial = run_batch(&spec).unwrap();
    for threads in [1, 3, 8] {
        assert_eq!(
            parallel::run_batch_with_threads(&spec, threads).unwrap(),
            serial
        );
    }
    spec.pipeline = Pipeline::Frames {
        envelope: Envelope::default(),
        calibration_frame: true,
    };
    assert_eq!(
        parallel::run_batch_with_threads(&spec, 4).unwrap(),
        run_batch(&spec).unwrap()
    );
}

#[test]
fn parallel_calibration_matches_serial() {
    let mut spec = ExperimentSpec::new(2, StateSource::BlochGrid(64), 2);
    spec.noise = NoiseModel::laboratory();
    spec.reference_mode = ReferenceMode::ExtraSlit;
    let serial = psitomo_core::calibrate_noise(0.99, 2, &spec).unwrap();
    assert_eq!(parallel::calibrate_noise(0.99, 2, &spec).unwrap(), serial);
}

#[test]
fn csv_and_figures_are_byte_stable() {
    let mut spec = ExperimentSpec::new(2, StateSource::BlochGrid(128), 8);
    spec.noise = NoiseModel::laboratory();
    let a = parallel::run_batch(&spec).unwrap();
    let b = parallel::run_batch(&spec).unwrap();
    assert_eq!(
        trials_csv(&a.trials).unwrap(),
        trials_csv(&b.trials).unwrap()
    );
    let rows = |s: &psitomo_core::SummaryStats| -> Vec<psitomo::results::FigureRow> {
        s.trials
            .iter()
            .map(|t| psitomo::results::FigureRow {
                fidelity: t.fidelity,
                bloch: t.truth.bloch_vector(),
            })
            .collect()
    };
    let svg_a = svg::bloch_figure(&rows(&a));
    assert_eq!(svg_a, svg::bloch_figure(&rows(&b)));
    assert_eq!(svg_a.matches("r=\"3.2\"").count(), 128);
}
