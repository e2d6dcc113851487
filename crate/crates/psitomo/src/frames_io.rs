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

//! Frame sets on disk: one 16-bit PGM per frame plus a JSON sidecar.
//!
//! ```text
//! frame_0.pgm  frame_0.json   blocked reference
//! frame_1.pgm  frame_1.json   step 1 (pi/4)
//! frame_2.pgm  frame_2.json   step 2 (3pi/4)
//! frame_3.pgm  frame_3.json   step 3 (5pi/4)
//! frame_ref.pgm frame_ref.json  reference only (optional)
//! ```
//!
//! Pixel values are `round(intensity * scale)`; `scale` is 1 when the
//! intensities are already 16-bit counts.

use std::path::{Path, PathBuf};

use psitomo_core::{FrameKind, FrameSet, Interferogram, OpticalConfig, Roi};
use serde::{Deserialize, Serialize};

use crate::error::{self, Error, Result};
use crate::formats::{read_json, write_json};
use crate::pgm::Pgm;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpticsFile {
    pub slit_width_px: usize,
    pub slit_pitch_px: usize,
    pub pixel_size_um: f64,
    pub n_slits: usize,
    pub band_height_px: usize,
    pub image_width: usize,
    pub image_height: usize,
    pub ref_envelope: Vec<f64>,
    pub calibration_frame: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    /// 0 blocked, 1-3 phase steps, 4 reference only.
    pub step: u8,
    /// `[x, y, w, h]` per signal slit.
    pub roi: Vec<[usize; 4]>,
    pub seed: u64,
    pub scale: f64,
    pub dim: usize,
    pub reference: usize,
    pub extra_reference: bool,
    pub optics: OpticsFile,
}

impl Sidecar {
    fn new(config: &OpticalConfig, step: u8, seed: u64, scale: f64) -> Self {
        let (h, w) = config.image_dims;
        Self {
            step,
            roi: config.rois.iter().map(|r| [r.x, r.y, r.w, r.h]).collect(),
            seed,
            scale,
            dim: config.signal_slits(),
            reference: config.reference_slit,
            extra_reference: config.extra_reference,
            optics: OpticsFile {
                slit_width_px: config.slit_width_px,
                slit_pitch_px: config.slit_pitch_px,
                pixel_size_um: config.pixel_size_um,
                n_slits: config.n_slits,
                band_height_px: config.band_height_px,
                image_width: w,
                image_height: h,
                ref_envelope: config.ref_envelope.clone(),
                calibration_frame: config.calibration_frame,
            },
        }
    }

    fn config(&self) -> OpticalConfig {
        let o = &self.optics;
        OpticalConfig {
            slit_width_px: o.slit_width_px,
            slit_pitch_px: o.slit_pitch_px,
            pixel_size_um: o.pixel_size_um,
            n_slits: o.n_slits,
            reference_slit: self.reference,
            extra_reference: self.extra_reference,
            ref_envelope: o.ref_envelope.clone(),
            band_height_px: o.band_height_px,
            image_dims: (o.image_height, o.image_width),
            rois: self
                .roi
                .iter()
                .map(|&[x, y, w, h]| Roi { x, y, w, h })
                .collect(),
            calibration_frame: o.calibration_frame,
        }
    }
}

fn stem(kind: FrameKind) -> String {
    match kind {
        FrameKind::ReferenceOnly => "frame_ref".into(),
        k => format!("frame_{}", k.index()),
    }
}

fn frames_of(set: &FrameSet) -> impl Iterator<Item = &Interferogram> {
    set.frames.iter().chain(set.calibration.as_ref())
}

/// Scale that maps the set into 16 bits: 1 for integral data that fits.
pub fn frame_scale(set: &FrameSet) -> f64 {
    let mut max = 0.0f64;
    let mut integral = true;
    for v in frames_of(set).flat_map(|f| f.pixels.iter()) {
        max = max.max(*v);
        integral &= v.fract() == 0.0;
    }
    if integral && max <= 65535.0 {
        1.0
    } else if max > 0.0 {
        65535.0 / max
    } else {
        1.0
    }
}

fn quantize(frame: &Interferogram, scale: f64) -> Pgm {
    Pgm {
        width: frame.width,
        height: frame.height,
        maxval: 65535,
        samples: frame
            .pixels
            .iter()
            .map(|v| (v * scale).round().clamp(0.0, 65535.0) as u16)
            .collect(),
    }
}

/// Write every frame and sidecar of `set` into `dir`; returns the paths.
pub fn write_frames(dir: &Path, set: &FrameSet, seed: u64) -> Result<Vec<PathBuf>> {
    let scale = frame_scale(set);
    let mut paths = Vec::new();
    for frame in frames_of(set) {
        let name = stem(frame.kind);
        let pgm = dir.join(format!("{name}.pgm"));
        error::write(&pgm, &quantize(frame, scale).encode())?;
        let json = dir.join(format!("{name}.json"));
        write_json(
            &json,
            &Sidecar::new(&set.config, frame.kind.index(), seed, scale),
        )?;
        paths.push(pgm);
        paths.push(json);
    }
    Ok(paths)
}

fn read_frame(dir: &Path, kind: FrameKind) -> Result<(Interferogram, Sidecar)> {
    let name = stem(kind);
    let json = dir.join(format!("{name}.json"));
    let sidecar: Sidecar = read_json(&json)?;
    if sidecar.step != kind.index() {
        return Err(Error::parse(
            &json,
            format!("step {} does not match {name}", sidecar.step),
        ));
    }
    if !(sidecar.scale.is_finite() && sidecar.scale > 0.0) {
        return Err(Error::parse(&json, "scale must be positive"));
    }
    let path = dir.join(format!("{name}.pgm"));
    let pgm = Pgm::decode(&error::read(&path)?).map_err(|m| Error::parse(&path, m))?;
    let pixels = pgm
        .samples
        .iter()
        .map(|&s| s as f64 / sidecar.scale)
        .collect();
    let frame = Interferogram::new(kind, pgm.width, pgm.height, pixels)
        .map_err(|e| Error::parse(&path, e))?;
    Ok((frame, sidecar))
}

/// Read a frame set written by [`write_frames`] (or by hand). Returns the
/// set and the seed recorded in the sidecars.
pub fn read_frames(dir: &Path) -> Result<(FrameSet, u64)> {
    let mut frames = Vec::with_capacity(4);
    let mut first: Option<Sidecar> = None;
    let kinds = [
        FrameKind::Blocked,
        FrameKind::Step(1),
        FrameKind::Step(2),
        FrameKind::Step(3),
    ];
    let check = |first: &Option<Sidecar>, s: &Sidecar, kind: FrameKind| -> Result<()> {
        if let Some(f) = first {
            let mut s = s.clone();
            s.step = f.step;
            if &s != f {
                let json = dir.join(format!("{}.json", stem(kind)));
                return Err(Error::parse(json, "sidecar disagrees with frame_0.json"));
            }
        }
        Ok(())
    };
    for kind in kinds {
        let (frame, sidecar) = read_frame(dir, kind)?;
        check(&first, &sidecar, kind)?;
        first.get_or_insert(sidecar);
        frames.push(frame);
    }
    let sidecar = first.expect("four frames read");
    let config = sidecar.config();
    if config.signal_slits() != sidecar.dim {
        return Err(Error::parse(
            dir.join("frame_0.json"),
            format!("dim {} but {} ROIs", sidecar.dim, config.signal_slits()),
        ));
    }
    let calibration = if config.calibration_frame {
        let (frame, s) = read_frame(dir, FrameKind::ReferenceOnly)?;
        check(&Some(sidecar.clone()), &s, FrameKind::ReferenceOnly)?;
        Some(frame)
    } else {
        None
    };
    let frames: [Interferogram; 4] = frames.try_into().expect("four frames");
    Ok((
        FrameSet {
            config,
            frames,
            calibration,
        },
        sidecar.seed,
    ))
}

/// Step-1 frame with every ROI outlined at full scale.
pub fn preview(set: &FrameSet) -> Pgm {
    let mut img = quantize(&set.frames[1], frame_scale(set));
    let w = img.width;
    let mut mark = |x: usize, y: usize| {
        if x < w && y < img.height {
            img.samples[y * w + x] = img.maxval;
        }
    };
    for roi in &set.config.rois {
        let (x1, y1) = (
            roi.x + roi.w.saturating_sub(1),
            roi.y + roi.h.saturating_sub(1),
        );
        for x in roi.x..=x1 {
            mark(x, roi.y);
            mark(x, y1);
        }
        for y in roi.y..=y1 {
            mark(roi.x, y);
            mark(x1, y);
        }
    }
    img
}
