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

//! JSON files for states, projector outcomes and reconstruction reports.

use std::path::Path;

use psitomo_core::{Complex64, ProjectorOutcomes, PureState, ReconstructionReport};
use serde::{Deserialize, Serialize};

use crate::error::{self, Error, Result};

/// `{"dim": d, "re": [...], "im": [...]}`. Written in canonical form (first
/// nonzero amplitude real and positive); read back normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl StateFile {
    pub fn from_state(psi: &PureState) -> Self {
        let c = psi.canonicalize();
        Self {
            dim: c.dim(),
            re: c.amps().iter().map(|a| a.re).collect(),
            im: c.amps().iter().map(|a| a.im).collect(),
        }
    }

    pub fn to_state(&self) -> std::result::Result<PureState, String> {
        if self.re.len() != self.dim || self.im.len() != self.dim {
            return Err(format!(
                "dim is {} but re/im have {}/{} entries",
                self.dim,
                self.re.len(),
                self.im.len()
            ));
        }
        let amps: Vec<Complex64> = self
            .re
            .iter()
            .zip(&self.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        // Already-normalized files round-trip bit for bit.
        PureState::from_normalized(amps.clone())
            .or_else(|_| PureState::normalize(&amps))
            .map_err(|e| e.to_string())
    }
}

/// Projector outcomes. With `extra_reference` the arrays cover the `d + 1`
/// slits of the extended state and `reference` is `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomesFile {
    pub dim: usize,
    pub reference: usize,
    #[serde(default)]
    pub extra_reference: bool,
    #[serde(default)]
    pub counted: bool,
    pub populations: Vec<f64>,
    /// `[p1, p2, p3]` per non-reference slit, ascending slit order.
    pub interference: Vec<[f64; 3]>,
}

impl OutcomesFile {
    pub fn new(outcomes: &ProjectorOutcomes, extra_reference: bool) -> Self {
        Self {
            dim: outcomes.dim,
            reference: outcomes.ref_index,
            extra_reference,
            counted: outcomes.counted,
            populations: outcomes.populations.clone(),
            interference: outcomes.interference.clone(),
        }
    }

    pub fn outcomes(&self) -> ProjectorOutcomes {
        ProjectorOutcomes {
            dim: self.dim,
            ref_index: self.reference,
            populations: self.populations.clone(),
            interference: self.interference.clone(),
            counted: self.counted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlitReport {
    pub slit: usize,
    pub population: f64,
    pub gamma: f64,
    pub gamma_pure: f64,
    /// `gamma - gamma_pure`; `null` for the reference and unverifiable slits.
    pub margin: Option<f64>,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub state: StateFile,
    pub verdict: String,
    pub pure: bool,
    pub tau: f64,
    pub min_margin: Option<f64>,
    pub reference: usize,
    pub extra_reference: bool,
    pub outcome_budget: usize,
    pub slits: Vec<SlitReport>,
    pub degenerate_slits: Vec<usize>,
    pub unverifiable_slits: Vec<usize>,
    /// Fidelity with a known true state, when one was supplied.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fidelity: Option<f64>,
}

pub fn verdict_label(pure: bool) -> &'static str {
    if pure {
        "PURE"
    } else {
        "NOT PURE"
    }
}

impl ReportFile {
    pub fn new(report: &ReconstructionReport) -> Self {
        let v = &report.purity;
        let pops = report.state.populations();
        let slits = (0..report.state.dim())
            .map(|k| {
                let check = v.checks.iter().find(|c| c.slit == k);
                SlitReport {
                    slit: k,
                    population: pops[k],
                    gamma: report.per_slit_visibility[k],
                    gamma_pure: report.expected_visibility[k],
                    margin: check.and_then(|c| c.margin),
                    sigma: check.map_or(0.0, |c| c.sigma),
                }
            })
            .collect();
        Self {
            state: StateFile::from_state(&report.state),
            verdict: verdict_label(v.pure).to_string(),
            pure: v.pure,
            tau: v.tau,
            min_margin: v.min_margin.is_finite().then_some(v.min_margin),
            reference: report.reference_used,
            extra_reference: report.extra_reference,
            outcome_budget: report.outcome_budget,
            slits,
            degenerate_slits: report.degenerate_slits.clone(),
            unverifiable_slits: v.unverifiable.clone(),
            fidelity: None,
        }
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = error::read(path)?;
    serde_json::from_slice(&bytes).map_err(|e| Error::parse(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::parse(path, e))?;
    text.push('\n');
    error::write(path, text.as_bytes())
}

pub fn read_state(path: &Path) -> Result<PureState> {
    let file: StateFile = read_json(path)?;
    file.to_state().map_err(|m| Error::parse(path, m))
}

pub fn write_state(path: &Path, psi: &PureState) -> Result<()> {
    write_json(path, &StateFile::from_state(psi))
}

/// A JSON array of state objects.
pub fn read_states(path: &Path) -> Result<Vec<PureState>> {
    let files: Vec<StateFile> = read_json(path)?;
    files
        .iter()
        .enumerate()
        .map(|(i, f)| {
            f.to_state()
                .map_err(|m| Error::parse(path, format!("state {i}: {m}")))
        })
        .collect()
}

pub fn write_states(path: &Path, states: &[PureState]) -> Result<()> {
    let files: Vec<StateFile> = states.iter().map(StateFile::from_state).collect();
    write_json(path, &files)
}

pub fn read_outcomes(path: &Path) -> Result<OutcomesFile> {
    read_json(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use psitomo_core::haar_random;

    #[test]
    fn state_round_trip_is_canonical() {
        let psi = haar_random(4, 3).unwrap().with_global_phase(1.1);
        let f = StateFile::from_state(&psi);
        assert_eq!(f.im[0], 0.0);
        assert!(f.re[0] > 0.0);
        let text = serde_json::to_string(&f).unwrap();
        let back: StateFile = serde_json::from_str(&text).unwrap();
        let q = back.to_state().unwrap();
        assert_eq!(q, psi.canonicalize());
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        let f = StateFile {
            dim: 3,
            re: vec![1.0, 0.0],
            im: vec![0.0, 0.0],
        };
        assert!(f.to_state().is_err());
        let bad = r#"{"dim": 2, "re": [1, 0], "im": [0, 0], "extra": 1}"#;
        assert!(serde_json::from_str::<StateFile>(bad).is_err());
    }
}
