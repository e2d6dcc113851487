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

//! The `psitomo` command line.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use psitomo_core::seed;
use psitomo_core::{
    acquire_frames, acquire_outcomes, fidelity, haar_random, reconstruct_extra_reference,
    reconstruct_frames_with, reconstruct_outcomes_with, ReconstructOptions, ReconstructionReport,
    ReferenceMode,
};

use crate::config::{
    parse_envelope, parse_reference, CalibrationSection, ExperimentConfig, NoiseSection,
    OpticsSection,
};
use crate::error::{self, Error, Result};
use crate::formats::{
    read_outcomes, read_state, write_json, write_state, OutcomesFile, ReportFile,
};
use crate::frames_io::{preview, read_frames, write_frames};
use crate::results::{read_figure_rows, write_trials_csv, CalibrationFile, FigureRow, SummaryFile};
use crate::svg::{bloch_figure, histogram_figure};
use crate::{parallel, OUT_DIR_ENV};

#[derive(Debug, Parser)]
#[command(
    name = "psitomo",
    version,
    about = "Pure-state qudit tomography by phase-shifting interferometry"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render the camera frames (or projector outcomes) of one state.
    Simulate(SimulateArgs),
    /// Reconstruct a state from frames or outcomes and certify its purity.
    Reconstruct(ReconstructArgs),
    /// Run a Monte Carlo batch and write per-trial CSV, summary and figures.
    Sweep(SweepArgs),
    /// Draw a figure from a trials CSV.
    Figure(FigureArgs),
}

#[derive(Debug, Args, Default)]
pub struct NoiseArgs {
    /// `ideal` or `laboratory`; the flags below override it.
    #[arg(long = "noise")]
    pub preset: Option<String>,
    /// Mean detected photons per frame (0 disables shot noise).
    #[arg(long)]
    pub photons: Option<f64>,
    /// Phase-step error standard deviation, radians.
    #[arg(long)]
    pub jitter: Option<f64>,
    /// Per-pixel phase noise standard deviation, radians.
    #[arg(long)]
    pub inhomogeneity: Option<f64>,
    /// Mean dark counts per pixel per frame.
    #[arg(long)]
    pub dark_rate: Option<f64>,
}

impl NoiseArgs {
    fn section(&self) -> NoiseSection {
        NoiseSection {
            preset: self.preset.clone(),
            photons_per_frame: self.photons,
            phase_step_jitter_sd: self.jitter,
            phase_inhomogeneity_sd: self.inhomogeneity,
            dark_rate: self.dark_rate,
        }
    }
}

#[derive(Debug, Args, Default)]
pub struct OpticsArgs {
    /// Reference envelope across the slits: `sinc` or `flat`.
    #[arg(long)]
    pub envelope: Option<String>,
    /// First-zero half width of the sinc envelope, micrometres.
    #[arg(long)]
    pub lobe_um: Option<f64>,
    /// Skip the reference-only calibration frame.
    #[arg(long)]
    pub no_calibration_frame: bool,
}

impl OpticsArgs {
    fn section(&self) -> OpticsSection {
        OpticsSection {
            envelope: self.envelope.clone(),
            lobe_um: self.lobe_um,
            calibration_frame: self.no_calibration_frame.then_some(false),
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// True state as a JSON state file.
    #[arg(long, conflicts_with_all = ["haar", "dim"])]
    pub state: Option<PathBuf>,
    /// Draw a Haar-random state of dimension `--dim`.
    #[arg(long, requires = "dim")]
    pub haar: bool,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub seed: u64,
    /// `fixed`, `fixed:K`, `adaptive` or `extra_slit`.
    #[arg(long, default_value = "fixed")]
    pub reference: String,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[command(flatten)]
    pub optics: OpticsArgs,
    /// Write projector outcomes instead of camera frames.
    #[arg(long)]
    pub outcomes: bool,
    /// Also write `preview.pgm` with the ROIs outlined.
    #[arg(long)]
    pub preview: bool,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// Directory of frames and sidecars.
    #[arg(
        long,
        conflicts_with = "outcomes",
        required_unless_present = "outcomes"
    )]
    pub frames: Option<PathBuf>,
    /// Outcomes JSON file.
    #[arg(long)]
    pub outcomes: Option<PathBuf>,
    /// Purity tolerance on the visibility deficit.
    #[arg(long, default_value_t = psitomo_core::reconstruct::DEFAULT_TAU_PURITY)]
    pub tau: f64,
    /// Known true state; its fidelity with the estimate is reported.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Report file (default `report.json` in the output directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// TOML or JSON experiment file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// `haar:N`, `bloch:N` or `file:PATH`.
    #[arg(long)]
    pub states: Option<String>,
    /// `outcomes` or `frames`.
    #[arg(long)]
    pub pipeline: Option<String>,
    #[arg(long)]
    pub reference: Option<String>,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[command(flatten)]
    pub optics: OpticsArgs,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Calibrate photons per frame to this mean fidelity first.
    #[arg(long)]
    pub calibrate: Option<f64>,
    #[arg(long)]
    pub calibrate_dim: Option<usize>,
    #[arg(long)]
    pub calibrate_states: Option<String>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureKind {
    Bloch,
    Hist,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// Trials CSV written by `sweep`.
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long, value_enum)]
    pub mode: FigureKind,
    #[arg(long, default_value_t = psitomo_core::harness::DEFAULT_BINS)]
    pub bins: usize,
    /// SVG file (default `bloch.svg` / `hist.svg` in the output directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Output directory: the flag, then the environment, then the config file.
fn out_dir(flag: Option<&Path>, config: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .or_else(|| config.map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("."))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(a) => simulate(&a),
        Command::Reconstruct(a) => reconstruct(&a),
        Command::Sweep(a) => sweep(&a),
        Command::Figure(a) => figure(&a),
    }
}

fn simulate(a: &SimulateArgs) -> Result<()> {
    let psi = match (&a.state, a.dim) {
        (Some(path), _) => read_state(path)?,
        (None, Some(d)) => haar_random(d, seed::derive(a.seed, seed::STREAM_STATE))?,
        (None, None) => return Err(Error::Config("give --state FILE or --haar --dim D".into())),
    };
    let cfg = ExperimentConfig {
        noise: a.noise.section(),
        optics: a.optics.section(),
        ..Default::default()
    };
    let noise = cfg.noise_model()?;
    let mode = parse_reference(&a.reference)?;
    let acquisition = seed::derive(a.seed, seed::STREAM_TRIAL);
    let dir = out_dir(a.out.as_deref(), None);
    write_state(&dir.join("state.json"), &psi)?;
    if a.outcomes {
        let out = acquire_outcomes(&psi, mode, &noise, acquisition)?;
        let file = OutcomesFile::new(&out, mode == ReferenceMode::ExtraSlit);
        write_json(&dir.join("outcomes.json"), &file)?;
        println!("wrote {} outcomes to {}", out.count(), dir.display());
        return Ok(());
    }
    let envelope = parse_envelope(a.optics.envelope.as_deref(), a.optics.lobe_um)?;
    let set = acquire_frames(
        &psi,
        mode,
        envelope,
        !a.optics.no_calibration_frame,
        &noise,
        acquisition,
    )?;
    let files = write_frames(&dir, &set, a.seed)?;
    if a.preview {
        error::write(&dir.join("preview.pgm"), &preview(&set).encode())?;
    }
    println!(
        "wrote {} frames (reference slit {}) to {}",
        files.len() / 2,
        set.config.reference_slit,
        dir.display()
    );
    Ok(())
}

fn reconstruct(a: &ReconstructArgs) -> Result<()> {
    let opts = ReconstructOptions {
        tau_purity: a.tau,
        ..Default::default()
    };
    let report: ReconstructionReport = if let Some(dir) = &a.frames {
        let (set, _) = read_frames(dir)?;
        reconstruct_frames_with(&set, &opts)?
    } else {
        let path = a
            .outcomes
            .as_ref()
            .expect("clap requires frames or outcomes");
        let file = read_outcomes(path)?;
        let out = file.outcomes();
        if file.extra_reference {
            reconstruct_extra_reference(&out, &opts)?
        } else {
            reconstruct_outcomes_with(&out, &out.spec()?, &opts)?
        }
    };
    let mut file = ReportFile::new(&report);
    if let Some(path) = &a.truth {
        file.fidelity = Some(fidelity(&read_state(path)?, &report.state)?);
    }
    let path = a
        .out
        .clone()
        .unwrap_or_else(|| out_dir(None, None).join("report.json"));
    write_json(&path, &file)?;
    print!(
        "{} (reference {}, {} outcomes)",
        file.verdict, file.reference, file.outcome_budget
    );
    if let Some(f) = file.fidelity {
        print!(", fidelity {f:.6}");
    }
    println!();
    Ok(())
}

fn sweep_config(a: &SweepArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &a.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let flags = ExperimentConfig {
        dim: a.dim,
        seed: a.seed,
        states: a.states.clone(),
        pipeline: a.pipeline.clone(),
        reference: a.reference.clone(),
        tau_purity: a.tau,
        bins: a.bins,
        out_dir: None,
        noise: a.noise.section(),
        optics: a.optics.section(),
        calibration: CalibrationSection {
            target: a.calibrate,
            dim: a.calibrate_dim,
            states: a.calibrate_states.clone(),
        },
        base_dir: std::env::current_dir().ok(),
    };
    cfg.overlay(&flags);
    Ok(cfg)
}

fn sweep(a: &SweepArgs) -> Result<()> {
    let cfg = sweep_config(a)?;
    let (mut spec, plan) = cfg.to_spec()?;
    let dir = out_dir(a.out.as_deref(), cfg.out_dir.as_deref());
    let mut work = || -> Result<_> {
        let calibration = match &plan {
            Some(plan) => {
                let c = parallel::calibrate_noise(plan.target, plan.spec.dim, &plan.spec)?;
                spec.noise = c.noise;
                Some(CalibrationFile::new(plan.target, &plan.spec, &c))
            }
            None => None,
        };
        Ok((parallel::run_batch(&spec)?, calibration))
    };
    let (stats, calibration) = match a.threads {
        Some(n) => parallel::pool(n)?.install(work)?,
        None => work()?,
    };
    write_trials_csv(&dir.join("trials.csv"), &stats.trials)?;
    let summary = SummaryFile::new(&spec, &stats, calibration);
    write_json(&dir.join("summary.json"), &summary)?;
    let rows: Vec<FigureRow> = stats
        .trials
        .iter()
        .map(|t| FigureRow {
            fidelity: t.fidelity,
            bloch: t.truth.bloch_vector(),
        })
        .collect();
    error::write(
        &dir.join("hist.svg"),
        histogram_figure(&rows, spec.histogram_bins).as_bytes(),
    )?;
    if spec.dim == 2 {
        error::write(&dir.join("bloch.svg"), bloch_figure(&rows).as_bytes())?;
    }
    if let Some(c) = &summary.calibration {
        println!(
            "calibrated {:.4e} photons/frame: mean fidelity {:.4} at d={}",
            c.photons_per_frame, c.achieved_mean, c.dim
        );
    }
    println!(
        "d={} n={} mean {:.4} std {:.4} median {:.4} failures {} -> {}",
        spec.dim,
        stats.n,
        stats.mean_fidelity,
        stats.std_fidelity,
        stats.median_fidelity,
        stats.failures,
        dir.display()
    );
    Ok(())
}

fn figure(a: &FigureArgs) -> Result<()> {
    let (svg, name) = match a.mode {
        FigureKind::Bloch => (bloch_figure(&read_figure_rows(&a.csv, true)?), "bloch.svg"),
        FigureKind::Hist => (
            histogram_figure(&read_figure_rows(&a.csv, false)?, a.bins),
            "hist.svg",
        ),
    };
    let path = a
        .out
        .clone()
        .unwrap_or_else(|| out_dir(None, None).join(name));
    error::write(&path, svg.as_bytes())?;
    println!("wrote {}", path.display());
    Ok(())
}
