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

//! Mach-Zehnder image-plane model.
//!
//! The object arm images every slit onto a vertical band of the camera. The
//! reference arm Fourier transforms a single slit into a horizontal band whose
//! amplitude at each slit position follows a diffraction envelope. Each ROI is
//! the crossing of one slit band with the reference band.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Result, TomoError};
use crate::projector::{poisson, STEP_PHASES};
use crate::seed;
use crate::state::PureState;

/// Display slit width in pixels.
pub const DEFAULT_SLIT_WIDTH_PX: usize = 10;
/// Distance between slit centers in pixels.
pub const DEFAULT_SLIT_PITCH_PX: usize = 30;
/// Display pixel pitch.
pub const DEFAULT_PIXEL_SIZE_UM: f64 = 8.0;
/// Height of the reference band, and of every ROI.
pub const DEFAULT_BAND_HEIGHT_PX: usize = 16;
/// Dark rows above and below the reference band.
pub const DEFAULT_MARGIN_PX: usize = 24;
/// Automatic sinc lobe half-width relative to the outermost slit offset.
const AUTO_LOBE_FACTOR: f64 = 1.25;

/// Detector and phase-shifter imperfections.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseModel {
    /// Expected photons per frame; zero renders noiseless intensities.
    pub photons_per_frame: f64,
    /// Standard deviation of the error on each phase step (rad).
    pub phase_step_jitter_sd: f64,
    /// Standard deviation of the static per-pixel phase field (rad).
    pub phase_inhomogeneity_sd: f64,
    /// Expected dark counts per pixel.
    pub dark_rate: f64,
}

impl NoiseModel {
    /// Noiseless model.
    pub fn ideal() -> Self {
        Self::default()
    }

    /// Bench defaults: 0.15 rad phase-step error and a modulator phase
    /// ripple of 2% of a wave. The photon budget is left at zero for
    /// calibration.
    pub fn laboratory() -> Self {
        Self {
            photons_per_frame: 0.0,
            phase_step_jitter_sd: 0.15,
            phase_inhomogeneity_sd: 0.02 * 2.0 * PI,
            dark_rate: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("photons_per_frame", self.photons_per_frame),
            ("phase_step_jitter_sd", self.phase_step_jitter_sd),
            ("phase_inhomogeneity_sd", self.phase_inhomogeneity_sd),
            ("dark_rate", self.dark_rate),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(TomoError::InvalidConfig(format!(
                    "noise field {name} must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn has_shot_noise(&self) -> bool {
        self.photons_per_frame > 0.0
    }
}

/// Reference-band amplitude profile across the slits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    /// Unit amplitude at every slit.
    Flat,
    /// `sinc(pi x / lobe_um)` about the array center; slits beyond the first
    /// zero get no reference. `None` picks a lobe 1.25 times wider than the
    /// outermost slit offset.
    Sinc { lobe_um: Option<f64> },
}

impl Default for Envelope {
    fn default() -> Self {
        Envelope::Sinc { lobe_um: None }
    }
}

/// Pixel rectangle `[x, x + w) x [y, y + h)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Roi {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Roi {
    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x && x < self.x + self.w && y >= self.y && y < self.y + self.h
    }

    pub fn overlaps(&self, other: &Roi) -> bool {
        self.x < other.x + other.w
            && other.x < self.x + self.w
            && self.y < other.y + other.h
            && other.y < self.y + self.h
    }

    #[inline]
    pub fn area(&self) -> usize {
        self.w * self.h
    }
}

/// Slit geometry, reference choice and camera layout.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalConfig {
    pub slit_width_px: usize,
    pub slit_pitch_px: usize,
    pub pixel_size_um: f64,
    /// Physical slits, `d` or `d + 1` with an extra reference slit.
    pub n_slits: usize,
    /// Slit passed by the filter in the reference arm.
    pub reference_slit: usize,
    /// The last slit is a fully transmitting reference outside the state.
    pub extra_reference: bool,
    /// Reference amplitude at each slit center, in `[0, 1]`.
    pub ref_envelope: Vec<f64>,
    pub band_height_px: usize,
    /// `(height, width)` in camera pixels.
    pub image_dims: (usize, usize),
    /// One ROI per slit, slit order.
    pub rois: Vec<Roi>,
    /// Also record a reference-only frame for visibility normalization.
    pub calibration_frame: bool,
}

impl OpticalConfig {
    /// `dim` slits, slit `reference` feeding the reference arm.
    pub fn with_reference(dim: usize, reference: usize, envelope: Envelope) -> Result<Self> {
        if reference >= dim {
            return Err(TomoError::BadIndex {
                index: reference,
                dim,
            });
        }
        Self::build(dim, reference, false, envelope)
    }

    /// `dim` state slits plus a fully transmitting reference slit at index `dim`.
    pub fn with_extra_reference(dim: usize, envelope: Envelope) -> Result<Self> {
        Self::build(dim + 1, dim, true, envelope)
    }

    fn build(n_slits: usize, reference: usize, extra: bool, envelope: Envelope) -> Result<Self> {
        let min = if extra { 3 } else { 2 };
        if n_slits < min {
            return Err(TomoError::DimensionTooSmall(n_slits - extra as usize));
        }
        let mut config = OpticalConfig {
            slit_width_px: DEFAULT_SLIT_WIDTH_PX,
            slit_pitch_px: DEFAULT_SLIT_PITCH_PX,
            pixel_size_um: DEFAULT_PIXEL_SIZE_UM,
            n_slits,
            reference_slit: reference,
            extra_reference: extra,
            ref_envelope: Vec::new(),
            band_height_px: DEFAULT_BAND_HEIGHT_PX,
            image_dims: (0, 0),
            rois: Vec::new(),
            calibration_frame: true,
        };
        config.layout(DEFAULT_MARGIN_PX);
        config.ref_envelope = config.envelope_values(envelope);
        config.validate()?;
        Ok(config)
    }

    /// Recompute the image size and ROIs from the slit geometry.
    pub fn layout(&mut self, margin_px: usize) {
        let pitch = self.slit_pitch_px;
        let w = self.slit_width_px;
        self.image_dims = (self.band_height_px + 2 * margin_px, self.n_slits * pitch);
        self.rois = (0..self.n_slits)
            .map(|k| Roi {
                x: k * pitch + (pitch.saturating_sub(w)) / 2,
                y: margin_px,
                w,
                h: self.band_height_px,
            })
            .collect();
    }

    /// Offset of slit `k` from the array center (um).
    pub fn slit_offset_um(&self, k: usize) -> f64 {
        let center = (self.n_slits as f64 - 1.0) / 2.0;
        (k as f64 - center) * self.slit_pitch_px as f64 * self.pixel_size_um
    }

    pub fn envelope_values(&self, envelope: Envelope) -> Vec<f64> {
        match envelope {
            Envelope::Flat => vec![1.0; self.n_slits],
            Envelope::Sinc { lobe_um } => {
                let lobe = lobe_um.unwrap_or_else(|| {
                    AUTO_LOBE_FACTOR * self.slit_offset_um(self.n_slits - 1).abs()
                });
                (0..self.n_slits)
                    .map(|k| {
                        let u = PI * self.slit_offset_um(k) / lobe;
                        let s = if u == 0.0 { 1.0 } else { libm::sin(u) / u };
                        // Only the central lobe illuminates a slit usefully.
                        if u.abs() >= PI {
                            0.0
                        } else {
                            s.clamp(0.0, 1.0)
                        }
                    })
                    .collect()
            }
        }
    }

    /// Number of slits carrying the state.
    #[inline]
    pub fn signal_slits(&self) -> usize {
        self.n_slits - self.extra_reference as usize
    }

    /// Slit whose image band contains column `x`, if any.
    #[inline]
    pub fn slit_at_column(&self, x: usize) -> Option<usize> {
        let k = x / self.slit_pitch_px;
        if k >= self.n_slits {
            return None;
        }
        let start = k * self.slit_pitch_px + (self.slit_pitch_px - self.slit_width_px) / 2;
        (x >= start && x < start + self.slit_width_px).then_some(k)
    }

    /// Whether row `y` lies inside the reference band.
    #[inline]
    pub fn in_reference_band(&self, y: usize) -> bool {
        let top = self.rois.first().map_or(0, |r| r.y);
        y >= top && y < top + self.band_height_px
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(TomoError::InvalidConfig(msg.into()));
        if self.slit_width_px == 0 || self.slit_width_px >= self.slit_pitch_px {
            return bad("slit width must be positive and below the slit pitch");
        }
        if !(self.pixel_size_um > 0.0) {
            return bad("pixel size must be positive");
        }
        if self.reference_slit >= self.n_slits {
            return bad("reference slit out of range");
        }
        if self.extra_reference && self.reference_slit != self.n_slits - 1 {
            return bad("the extra reference must be the last slit");
        }
        if self.ref_envelope.len() != self.n_slits || self.rois.len() != self.n_slits {
            return bad("need one envelope value and one ROI per slit");
        }
        if self.ref_envelope.iter().any(|e| !(0.0..=1.0).contains(e)) {
            return bad("envelope values must lie in [0, 1]");
        }
        if !(self.ref_envelope[self.reference_slit] > 0.0) {
            return bad("envelope must be positive at the reference slit");
        }
        let (h, w) = self.image_dims;
        for (i, roi) in self.rois.iter().enumerate() {
            if roi.area() == 0 || roi.x + roi.w > w || roi.y + roi.h > h {
                return bad("ROI outside the image");
            }
            if self.rois[..i].iter().any(|other| other.overlaps(roi)) {
                return bad("ROIs overlap");
            }
        }
        Ok(())
    }
}

/// What a frame records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameKind {
    /// Reference arm blocked: slit intensities only.
    Blocked,
    /// Interference at phase step `l` in `1..=3`.
    Step(u8),
    /// Object arm blocked: reference band only.
    ReferenceOnly,
}

impl FrameKind {
    /// `0` for blocked, `1..=3` for steps, `4` for reference-only.
    pub fn index(&self) -> u8 {
        match self {
            FrameKind::Blocked => 0,
            FrameKind::Step(l) => *l,
            FrameKind::ReferenceOnly => 4,
        }
    }

    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            0 => Some(FrameKind::Blocked),
            1..=3 => Some(FrameKind::Step(i)),
            4 => Some(FrameKind::ReferenceOnly),
            _ => None,
        }
    }
}

/// One camera frame, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Interferogram {
    pub kind: FrameKind,
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<f64>,
}

impl Interferogram {
    pub fn new(kind: FrameKind, width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(TomoError::DimensionMismatch {
                expected: width * height,
                found: pixels.len(),
            });
        }
        if pixels.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(TomoError::InvalidConfig(
                "pixels must be finite and nonnegative".into(),
            ));
        }
        Ok(Self {
            kind,
            width,
            height,
            pixels,
        })
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    /// Pixel values inside `roi`, row-major.
    pub fn roi_values<'a>(&'a self, roi: &'a Roi) -> impl Iterator<Item = f64> + 'a {
        (roi.y..roi.y + roi.h)
            .flat_map(move |y| (roi.x..roi.x + roi.w).map(move |x| self.get(x, y)))
    }

    pub fn roi_mean(&self, roi: &Roi) -> f64 {
        self.roi_values(roi).sum::<f64>() / roi.area() as f64
    }
}

/// The frames of one acquisition: blocked reference, three phase steps and
/// optionally a reference-only calibration frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSet {
    pub config: OpticalConfig,
    /// Indexed by step: `[blocked, step 1, step 2, step 3]`.
    pub frames: [Interferogram; 4],
    pub calibration: Option<Interferogram>,
}

/// Render the camera frames for `psi`.
///
/// Inside ROI `k` the interference frames record
/// `|A_k(x, y) + R_k e^{i (Delta_l + eps_l)}|^2` with `A_k = c_k e^{i delta(x, y)}`,
/// `R_k` the reference field at slit `k` and `eps_l` a per-frame phase-step
/// error. The reference field carries the amplitude of the reference slit.
pub fn render_frames(
    psi: &PureState,
    config: &OpticalConfig,
    noise: &NoiseModel,
    seed: u64,
) -> Result<FrameSet> {
    config.validate()?;
    noise.validate()?;
    if config.signal_slits() != psi.dim() {
        return Err(TomoError::ConfigMismatch {
            rois: config.signal_slits(),
            dim: psi.dim(),
        });
    }
    let (height, width) = config.image_dims;

    let mut slit_amps: Vec<Complex64> = psi.amps().to_vec();
    if config.extra_reference {
        slit_amps.push(Complex64::new(1.0, 0.0));
    }
    let ref_amp = slit_amps[config.reference_slit];

    let mut field_rng = seed::rng(seed::derive(seed, seed::STREAM_FIELD));
    let mut jitter_rng = seed::rng(seed::derive(seed, seed::STREAM_JITTER));
    let jitter: [f64; 3] = core::array::from_fn(|_| {
        let z: f64 = StandardNormal.sample(&mut jitter_rng);
        z * noise.phase_step_jitter_sd
    });
    let steps: [Complex64; 3] =
        core::array::from_fn(|l| Complex64::from_polar(1.0, STEP_PHASES[l] + jitter[l]));

    // Object and reference fields at every pixel.
    let n = width * height;
    let mut object = vec![Complex64::new(0.0, 0.0); n];
    let mut reference = vec![Complex64::new(0.0, 0.0); n];
    for y in 0..height {
        let in_band = config.in_reference_band(y);
        for x in 0..width {
            let i = y * width + x;
            if let Some(k) = config.slit_at_column(x) {
                let mut a = slit_amps[k];
                if noise.phase_inhomogeneity_sd > 0.0 {
                    let z: f64 = StandardNormal.sample(&mut field_rng);
                    a *= Complex64::from_polar(1.0, z * noise.phase_inhomogeneity_sd);
                }
                object[i] = a;
            }
            if in_band {
                let k = (x / config.slit_pitch_px).min(config.n_slits - 1);
                reference[i] = ref_amp * config.ref_envelope[k];
            }
        }
    }

    let total: f64 = object
        .iter()
        .zip(&reference)
        .map(|(a, r)| a.norm_sqr() + r.norm_sqr())
        .sum();
    let scale = if noise.has_shot_noise() && total > 0.0 {
        noise.photons_per_frame / total
    } else {
        1.0
    };
    let shot_root = seed::derive(seed, seed::STREAM_SHOT);

    let expose = |kind: FrameKind, intensity: &dyn Fn(usize) -> f64| -> Interferogram {
        let mut rng = seed::rng(seed::derive(shot_root, kind.index() as u64));
        let pixels = (0..n)
            .map(|i| {
                let mean = scale * intensity(i) + noise.dark_rate;
                if noise.has_shot_noise() {
                    poisson(&mut rng, mean)
                } else {
                    mean
                }
            })
            .collect();
        Interferogram {
            kind,
            width,
            height,
            pixels,
        }
    };

    let blocked = expose(FrameKind::Blocked, &|i| object[i].norm_sqr());
    let interference: [Interferogram; 3] = core::array::from_fn(|l| {
        expose(FrameKind::Step(l as u8 + 1), &|i| {
            (object[i] + reference[i] * steps[l]).norm_sqr()
        })
    });
    let [s1, s2, s3] = interference;
    let calibration = config
        .calibration_frame
        .then(|| expose(FrameKind::ReferenceOnly, &|i| reference[i].norm_sqr()));

    Ok(FrameSet {
        config: config.clone(),
        frames: [blocked, s1, s2, s3],
        calibration,
    })
}
