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

//! Per-trial CSV tables and batch summaries.

use std::path::Path;

use psitomo_core::{
    Calibration, ExperimentSpec, NoiseModel, Pipeline, StateSource, SummaryStats, TrialResult,
};
use serde::{Deserialize, Serialize};

use crate::config::reference_label;
use crate::error::{self, Error, Result};

pub const TRIAL_COLUMNS: [&str; 10] = [
    "index",
    "dim",
    "fidelity",
    "verdict",
    "reference",
    "seed",
    "bloch_x",
    "bloch_y",
    "bloch_z",
    "failure",
];

/// One CSV row. Bloch coordinates are those of the true state and are only
/// present for qubits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRow {
    pub index: usize,
    pub dim: usize,
    pub fidelity: f64,
    /// `PURE`, `NOT PURE` or `FAILED`.
    pub verdict: String,
    pub reference: Option<usize>,
    pub seed: u64,
    pub bloch_x: Option<f64>,
    pub bloch_y: Option<f64>,
    pub bloch_z: Option<f64>,
    pub failure: Option<String>,
}

impl TrialRow {
    pub fn new(t: &TrialResult) -> Self {
        let bloch = t.truth.bloch_vector();
        let verdict = match t.pure {
            Some(true) => "PURE",
            Some(false) => "NOT PURE",
            None => "FAILED",
        };
        Self {
            index: t.index,
            dim: t.dim,
            fidelity: t.fidelity,
            verdict: verdict.into(),
            reference: t.reference_used,
            seed: t.seed,
            bloch_x: bloch.map(|b| b[0]),
            bloch_y: bloch.map(|b| b[1]),
            bloch_z: bloch.map(|b| b[2]),
            failure: t.failure.as_ref().map(|e| e.to_string()),
        }
    }
}

pub fn trials_csv(trials: &[TrialResult]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for t in trials {
        w.serialize(TrialRow::new(t))
            .map_err(|e| Error::Config(format!("csv: {e}")))?;
    }
    w.into_inner()
        .map_err(|e| Error::Config(format!("csv: {}", e.error())))
}

pub fn write_trials_csv(path: &Path, trials: &[TrialResult]) -> Result<()> {
    error::write(path, &trials_csv(trials)?)
}

/// The columns a figure needs, read back from a trials CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureRow {
    pub fidelity: f64,
    pub bloch: Option<[f64; 3]>,
}

/// Read a trials CSV. `need_bloch` makes missing or empty Bloch columns an
/// error.
pub fn read_figure_rows(path: &Path, need_bloch: bool) -> Result<Vec<FigureRow>> {
    let bytes = error::read(path)?;
    let mut r = csv::Reader::from_reader(bytes.as_slice());
    let headers = r.headers().map_err(|e| Error::parse(path, e))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::parse(path, format!("missing column {name:?}")))
    };
    let fid = column("fidelity")?;
    let xyz = if need_bloch {
        Some([column("bloch_x")?, column("bloch_y")?, column("bloch_z")?])
    } else {
        None
    };
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::parse(path, e))?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    Error::parse(
                        path,
                        format!("row {}: column {:?} is not a number", line + 1, &headers[i]),
                    )
                })
        };
        let bloch = match xyz {
            Some([x, y, z]) => Some([num(x)?, num(y)?, num(z)?]),
            None => None,
        };
        rows.push(FigureRow {
            fidelity: num(fid)?,
            bloch,
        });
    }
    if rows.is_empty() {
        return Err(Error::parse(path, "no rows"));
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramFile {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseFile {
    pub photons_per_frame: f64,
    pub phase_step_jitter_sd: f64,
    pub phase_inhomogeneity_sd: f64,
    pub dark_rate: f64,
}

impl From<&NoiseModel> for NoiseFile {
    fn from(n: &NoiseModel) -> Self {
        Self {
            photons_per_frame: n.photons_per_frame,
            phase_step_jitter_sd: n.phase_step_jitter_sd,
            phase_inhomogeneity_sd: n.phase_inhomogeneity_sd,
            dark_rate: n.dark_rate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentFile {
    pub dim: usize,
    pub states: String,
    pub pipeline: String,
    pub reference: String,
    pub seed: u64,
    pub tau_purity: f64,
    pub noise: NoiseFile,
}

impl From<&ExperimentSpec> for ExperimentFile {
    fn from(s: &ExperimentSpec) -> Self {
        let states = match &s.source {
            StateSource::Haar(n) => format!("haar:{n}"),
            StateSource::BlochGrid(n) => format!("bloch:{n}"),
            StateSource::Explicit(v) => format!("explicit:{}", v.len()),
        };
        let pipeline = match s.pipeline {
            Pipeline::Outcomes => "outcomes",
            Pipeline::Frames { .. } => "frames",
        };
        Self {
            dim: s.dim,
            states,
            pipeline: pipeline.into(),
            reference: reference_label(s.reference_mode),
            seed: s.root_seed,
            tau_purity: s.tau_purity,
            noise: (&s.noise).into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationFile {
    pub target: f64,
    pub dim: usize,
    pub states: String,
    pub photons_per_frame: f64,
    pub achieved_mean: f64,
    /// `[photons_per_frame, mean fidelity]` per evaluation.
    pub evaluations: Vec<[f64; 2]>,
}

impl CalibrationFile {
    pub fn new(target: f64, spec: &ExperimentSpec, c: &Calibration) -> Self {
        Self {
            target,
            dim: spec.dim,
            states: ExperimentFile::from(spec).states,
            photons_per_frame: c.noise.photons_per_frame,
            achieved_mean: c.achieved_mean,
            evaluations: c.evaluations.iter().map(|&(p, f)| [p, f]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryFile {
    pub n: usize,
    pub mean_fidelity: f64,
    pub std_fidelity: f64,
    pub median_fidelity: f64,
    pub min_fidelity: f64,
    pub failures: usize,
    pub purity_false_negatives: usize,
    pub histogram: HistogramFile,
    pub experiment: ExperimentFile,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub calibration: Option<CalibrationFile>,
}

impl SummaryFile {
    pub fn new(
        spec: &ExperimentSpec,
        stats: &SummaryStats,
        calibration: Option<CalibrationFile>,
    ) -> Self {
        Self {
            n: stats.n,
            mean_fidelity: stats.mean_fidelity,
            std_fidelity: stats.std_fidelity,
            median_fidelity: stats.median_fidelity,
            min_fidelity: stats
                .trials
                .iter()
                .map(|t| t.fidelity)
                .fold(f64::INFINITY, f64::min),
            failures: stats.failures,
            purity_false_negatives: stats.purity_false_negatives,
            histogram: HistogramFile {
                edges: stats.histogram.edges.clone(),
                counts: stats.histogram.counts.clone(),
            },
            experiment: spec.into(),
            calibration,
        }
    }
}
