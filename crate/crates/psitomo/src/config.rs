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

//! Experiment configuration files (TOML or JSON). Every field is optional
//! so command-line flags can be merged on top of a file.
//!
//! ```toml
//! dim = 14
//! seed = 2024
//! states = "haar:250"            # or "bloch:1024", "file:states.json"
//! pipeline = "outcomes"          # or "frames"
//! reference = "extra_slit"       # "fixed", "fixed:3", "adaptive"
//!
//! [noise]
//! preset = "laboratory"          # or "ideal"; fields below override it
//! phase_step_jitter_sd = 0.15
//!
//! [calibration]
//! target = 0.997
//! dim = 2
//! states = "bloch:1024"
//! ```

use std::path::{Path, PathBuf};

use psitomo_core::harness::DEFAULT_BINS;
use psitomo_core::reconstruct::DEFAULT_TAU_PURITY;
use psitomo_core::{Envelope, ExperimentSpec, NoiseModel, Pipeline, ReferenceMode, StateSource};
use serde::{Deserialize, Serialize};

use crate::error::{self, Error, Result};
use crate::formats::read_states;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub preset: Option<String>,
    pub photons_per_frame: Option<f64>,
    pub phase_step_jitter_sd: Option<f64>,
    pub phase_inhomogeneity_sd: Option<f64>,
    pub dark_rate: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpticsSection {
    /// `"sinc"` (default) or `"flat"`.
    pub envelope: Option<String>,
    pub lobe_um: Option<f64>,
    pub calibration_frame: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationSection {
    pub target: Option<f64>,
    pub dim: Option<usize>,
    pub states: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dim: Option<usize>,
    pub seed: Option<u64>,
    pub states: Option<String>,
    pub pipeline: Option<String>,
    pub reference: Option<String>,
    pub tau_purity: Option<f64>,
    pub bins: Option<usize>,
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub optics: OpticsSection,
    #[serde(default)]
    pub calibration: CalibrationSection,
    /// Directory that relative `file:` paths are resolved against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

/// Noise calibration requested by a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationPlan {
    pub target: f64,
    /// Template for the calibration batch (its dimension and states).
    pub spec: ExperimentSpec,
}

macro_rules! overlay {
    ($dst:expr, $src:expr; $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl ExperimentConfig {
    /// Parse a `.toml` or `.json` file.
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = error::read(path)?;
        let text = String::from_utf8(bytes).map_err(|e| Error::parse(path, e))?;
        let mut cfg: ExperimentConfig = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_str(&text).map_err(|e| Error::parse(path, e))?,
            Some("toml") => toml::from_str(&text).map_err(|e| Error::parse(path, e))?,
            _ => return Err(Error::parse(path, "config must be .toml or .json")),
        };
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        if let Some(out) = &cfg.out_dir {
            if out.is_relative() {
                cfg.out_dir = cfg.base_dir.as_ref().map(|b| b.join(out));
            }
        }
        Ok(cfg)
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overlay(&mut self, other: &ExperimentConfig) {
        overlay!(self, other; dim, seed, states, pipeline, reference, tau_purity, bins, out_dir);
        overlay!(self.noise, other.noise; preset, photons_per_frame, phase_step_jitter_sd,
            phase_inhomogeneity_sd, dark_rate);
        overlay!(self.optics, other.optics; envelope, lobe_um, calibration_frame);
        overlay!(self.calibration, other.calibration; target, dim, states);
        if other.states.is_some() {
            self.base_dir = other.base_dir.clone();
        }
    }

    pub fn noise_model(&self) -> Result<NoiseModel> {
        let n = &self.noise;
        let mut model = match n.preset.as_deref() {
            None | Some("ideal") => NoiseModel::ideal(),
            Some("laboratory") => NoiseModel::laboratory(),
            Some(other) => return Err(Error::Config(format!("unknown noise preset {other:?}"))),
        };
        if let Some(v) = n.photons_per_frame {
            model.photons_per_frame = v;
        }
        if let Some(v) = n.phase_step_jitter_sd {
            model.phase_step_jitter_sd = v;
        }
        if let Some(v) = n.phase_inhomogeneity_sd {
            model.phase_inhomogeneity_sd = v;
        }
        if let Some(v) = n.dark_rate {
            model.dark_rate = v;
        }
        model.validate()?;
        Ok(model)
    }

    pub fn envelope(&self) -> Result<Envelope> {
        parse_envelope(self.optics.envelope.as_deref(), self.optics.lobe_um)
    }

    pub fn pipeline(&self) -> Result<Pipeline> {
        match self.pipeline.as_deref() {
            None | Some("outcomes") => Ok(Pipeline::Outcomes),
            Some("frames") => Ok(Pipeline::Frames {
                envelope: self.envelope()?,
                calibration_frame: self.optics.calibration_frame.unwrap_or(true),
            }),
            Some(other) => Err(Error::Config(format!("unknown pipeline {other:?}"))),
        }
    }

    fn source(&self, text: &str) -> Result<StateSource> {
        parse_states(text, self.base_dir.as_deref())
    }

    /// The experiment and, if requested, the calibration to run first.
    pub fn to_spec(&self) -> Result<(ExperimentSpec, Option<CalibrationPlan>)> {
        let seed = self.seed.ok_or_else(|| {
            Error::Config("a seed is required (--seed or `seed` in the config)".into())
        })?;
        let text = self
            .states
            .as_deref()
            .ok_or_else(|| Error::Config("no states given (e.g. --states haar:250)".into()))?;
        let source = self.source(text)?;
        let dim = match (&source, self.dim) {
            (StateSource::Explicit(v), d) => {
                let found = v.first().map_or(0, |p| p.dim());
                if d.is_some_and(|d| d != found) {
                    return Err(Error::Config(format!(
                        "state file has dimension {found}, config says {}",
                        d.unwrap_or(0)
                    )));
                }
                found
            }
            (StateSource::BlochGrid(_), None) => 2,
            (_, Some(d)) => d,
            (_, None) => return Err(Error::Config("dim is required".into())),
        };
        let spec = ExperimentSpec {
            dim,
            source,
            pipeline: self.pipeline()?,
            noise: self.noise_model()?,
            root_seed: seed,
            reference_mode: parse_reference(self.reference.as_deref().unwrap_or("fixed"))?,
            tau_purity: self.tau_purity.unwrap_or(DEFAULT_TAU_PURITY),
            histogram_bins: self.bins.unwrap_or(DEFAULT_BINS),
        };
        spec.validate()?;

        let calibration = match self.calibration.target {
            None => None,
            Some(target) => {
                let mut cal = spec.clone();
                if let Some(text) = &self.calibration.states {
                    cal.source = self.source(text)?;
                }
                cal.dim = match (&cal.source, self.calibration.dim) {
                    (StateSource::Explicit(v), _) => v.first().map_or(0, |p| p.dim()),
                    (_, Some(d)) => d,
                    (StateSource::BlochGrid(_), None) => 2,
                    (_, None) => spec.dim,
                };
                if let ReferenceMode::Fixed(r) = cal.reference_mode {
                    if r >= cal.dim {
                        cal.reference_mode = ReferenceMode::Fixed(0);
                    }
                }
                cal.validate()?;
                Some(CalibrationPlan { target, spec: cal })
            }
        };
        Ok((spec, calibration))
    }
}

/// `haar:N`, `bloch:N` or `file:PATH` (a JSON array of states).
pub fn parse_states(text: &str, base: Option<&Path>) -> Result<StateSource> {
    let (kind, arg) = text
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("states {text:?}: expected kind:arg")))?;
    let count = || {
        arg.parse::<usize>()
            .map_err(|_| Error::Config(format!("states {text:?}: bad count")))
    };
    match kind {
        "haar" => Ok(StateSource::Haar(count()?)),
        "bloch" => Ok(StateSource::BlochGrid(count()?)),
        "file" => {
            let path = match base {
                Some(b) if Path::new(arg).is_relative() => b.join(arg),
                _ => PathBuf::from(arg),
            };
            let states = read_states(&path)?;
            if let Some(d) = states.first().map(|p| p.dim()) {
                if states.iter().any(|p| p.dim() != d) {
                    return Err(Error::parse(path, "states have mixed dimensions"));
                }
            }
            Ok(StateSource::Explicit(states))
        }
        _ => Err(Error::Config(format!("unknown state source {kind:?}"))),
    }
}

/// `fixed` (slit 0), `fixed:K`, `adaptive` or `extra_slit`.
pub fn parse_reference(text: &str) -> Result<ReferenceMode> {
    match text {
        "fixed" => Ok(ReferenceMode::Fixed(0)),
        "adaptive" => Ok(ReferenceMode::Adaptive),
        "extra_slit" | "extra-slit" => Ok(ReferenceMode::ExtraSlit),
        _ => text
            .strip_prefix("fixed:")
            .and_then(|k| k.parse().ok())
            .map(ReferenceMode::Fixed)
            .ok_or_else(|| Error::Config(format!("unknown reference mode {text:?}"))),
    }
}

pub fn parse_envelope(text: Option<&str>, lobe_um: Option<f64>) -> Result<Envelope> {
    match text {
        None | Some("sinc") => Ok(Envelope::Sinc { lobe_um }),
        Some("flat") => Ok(Envelope::Flat),
        Some(other) => Err(Error::Config(format!("unknown envelope {other:?}"))),
    }
}

pub fn reference_label(mode: ReferenceMode) -> String {
    match mode {
        ReferenceMode::Fixed(r) => format!("fixed:{r}"),
        ReferenceMode::Adaptive => "adaptive".into(),
        ReferenceMode::ExtraSlit => "extra_slit".into(),
    }
}
