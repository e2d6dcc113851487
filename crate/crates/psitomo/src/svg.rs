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

//! Deterministic SVG figures: Bloch-sphere scatter and fidelity histogram.
//! Identical input always produces identical bytes.

use std::fmt::Write;

use psitomo_core::Histogram;

use crate::results::FigureRow;

const VIRIDIS: [(f64, f64, f64); 5] = [
    (68.0, 1.0, 84.0),
    (59.0, 82.0, 139.0),
    (33.0, 145.0, 140.0),
    (94.0, 201.0, 98.0),
    (253.0, 231.0, 37.0),
];

fn color(t: f64) -> String {
    let t = if t.is_finite() {
        t.clamp(0.0, 1.0)
    } else {
        0.0
    };
    let x = t * (VIRIDIS.len() - 1) as f64;
    let i = (x.floor() as usize).min(VIRIDIS.len() - 2);
    let f = x - i as f64;
    let (a, b) = (VIRIDIS[i], VIRIDIS[i + 1]);
    let mix = |p: f64, q: f64| (p + (q - p) * f).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        mix(a.0, b.0),
        mix(a.1, b.1),
        mix(a.2, b.2)
    )
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

fn header(out: &mut String, w: u32, h: u32) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\" font-family=\"Helvetica, Arial, sans-serif\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    );
}

fn text(out: &mut String, x: f64, y: f64, size: u32, anchor: &str, body: &str) {
    let _ = writeln!(
        out,
        "<text x=\"{x:.1}\" y=\"{y:.1}\" font-size=\"{size}\" text-anchor=\"{anchor}\">{body}</text>"
    );
}

fn fidelity_range(rows: &[FigureRow]) -> (f64, f64) {
    let lo = rows
        .iter()
        .map(|r| r.fidelity)
        .fold(f64::INFINITY, f64::min);
    if lo >= 1.0 - 1e-6 {
        (1.0 - 1e-6, 1.0)
    } else {
        (lo, 1.0)
    }
}

fn annotate(out: &mut String, x: f64, y: f64, rows: &[FigureRow]) {
    let f: Vec<f64> = rows.iter().map(|r| r.fidelity).collect();
    let (mean, std) = mean_std(&f);
    text(out, x, y, 14, "start", &format!("F̄ = {mean:.4}"));
    text(out, x, y + 18.0, 14, "start", &format!("σ_F = {std:.4}"));
    text(out, x, y + 36.0, 14, "start", &format!("n = {}", f.len()));
}

/// Orthographic view of the Bloch sphere, each true state colored by the
/// fidelity of its reconstruction. Rows without Bloch coordinates are
/// skipped.
pub fn bloch_figure(rows: &[FigureRow]) -> String {
    const R: f64 = 170.0;
    const CX: f64 = 220.0;
    const CY: f64 = 230.0;
    let (az, el) = (30f64.to_radians(), 20f64.to_radians());
    // Rotate about z by the azimuth, then tilt toward the viewer; returns
    // screen coordinates and depth (positive toward the viewer).
    let project = |v: [f64; 3]| {
        let x1 = v[0] * az.cos() - v[1] * az.sin();
        let y1 = v[0] * az.sin() + v[1] * az.cos();
        let y2 = y1 * el.cos() - v[2] * el.sin();
        let z2 = y1 * el.sin() + v[2] * el.cos();
        (CX + R * x1, CY - R * z2, -y2)
    };

    let mut out = String::new();
    header(&mut out, 560, 470);
    text(
        &mut out,
        280.0,
        28.0,
        16,
        "middle",
        "Reconstruction fidelity on the Bloch sphere",
    );
    let _ = writeln!(
        out,
        "<circle cx=\"{CX:.1}\" cy=\"{CY:.1}\" r=\"{R:.1}\" fill=\"#f4f4f8\" stroke=\"#444\" stroke-width=\"1.2\"/>"
    );
    let mut eq = String::new();
    for i in 0..=72 {
        let t = i as f64 * std::f64::consts::TAU / 72.0;
        let (x, y, _) = project([t.cos(), t.sin(), 0.0]);
        let _ = write!(eq, "{}{x:.1},{y:.1}", if i == 0 { "" } else { " " });
    }
    let _ = writeln!(
        out,
        "<polyline points=\"{eq}\" fill=\"none\" stroke=\"#999\" stroke-width=\"0.8\" stroke-dasharray=\"4 3\"/>"
    );
    for (axis, label) in [
        ([1.0, 0.0, 0.0], "x"),
        ([0.0, 1.0, 0.0], "y"),
        ([0.0, 0.0, 1.0], "z"),
    ] {
        let (x0, y0, _) = project(axis.map(|c: f64| -c));
        let (x1, y1, _) = project(axis);
        let _ = writeln!(
            out,
            "<line x1=\"{x0:.1}\" y1=\"{y0:.1}\" x2=\"{x1:.1}\" y2=\"{y1:.1}\" stroke=\"#777\" stroke-width=\"0.8\"/>"
        );
        let (lx, ly, _) = project(axis.map(|c: f64| 1.12 * c));
        text(&mut out, lx, ly + 4.0, 13, "middle", label);
    }
    let (_, top, _) = project([0.0, 0.0, 1.0]);
    let (_, bottom, _) = project([0.0, 0.0, -1.0]);
    text(&mut out, CX + 14.0, top - 8.0, 13, "start", "|0⟩");
    text(&mut out, CX + 14.0, bottom + 16.0, 13, "start", "|1⟩");

    let (lo, hi) = fidelity_range(rows);
    let mut pts: Vec<(f64, f64, f64, f64)> = rows
        .iter()
        .filter_map(|r| r.bloch.map(|b| (project(b), r.fidelity)))
        .map(|((x, y, depth), f)| (x, y, depth, f))
        .collect();
    // Back to front; ties keep input order.
    pts.sort_by(|a, b| a.2.total_cmp(&b.2));
    for (x, y, depth, f) in pts {
        let opacity = if depth < 0.0 { 0.35 } else { 0.95 };
        let _ = writeln!(
            out,
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3.2\" fill=\"{}\" fill-opacity=\"{opacity}\"/>",
            color((f - lo) / (hi - lo))
        );
    }

    // Color bar.
    let (bx, by, bw, bh) = (440.0, 80.0, 18.0, 300.0);
    for i in 0..50 {
        let t = 1.0 - (i as f64 + 0.5) / 50.0;
        let _ = writeln!(
            out,
            "<rect x=\"{bx:.1}\" y=\"{:.1}\" width=\"{bw:.1}\" height=\"{:.1}\" fill=\"{}\"/>",
            by + i as f64 * bh / 50.0,
            bh / 50.0 + 0.3,
            color(t)
        );
    }
    let _ = writeln!(
        out,
        "<rect x=\"{bx:.1}\" y=\"{by:.1}\" width=\"{bw:.1}\" height=\"{bh:.1}\" fill=\"none\" stroke=\"#444\"/>"
    );
    text(
        &mut out,
        bx + bw + 6.0,
        by + 5.0,
        12,
        "start",
        &format!("{hi:.4}"),
    );
    text(
        &mut out,
        bx + bw + 6.0,
        by + bh + 4.0,
        12,
        "start",
        &format!("{lo:.4}"),
    );
    text(&mut out, bx + bw / 2.0, by - 12.0, 13, "middle", "F");
    annotate(&mut out, 24.0, 420.0, rows);
    out.push_str("</svg>\n");
    out
}

/// Fidelity histogram over `[min F, 1]` with mean and spread annotated.
pub fn histogram_figure(rows: &[FigureRow], bins: usize) -> String {
    let f: Vec<f64> = rows.iter().map(|r| r.fidelity).collect();
    let hist = Histogram::build(&f, bins.max(1));
    let (mean, _) = mean_std(&f);
    let (px, py, pw, ph) = (70.0, 50.0, 440.0, 280.0);
    let lo = hist.edges[0];
    let hi = *hist.edges.last().expect("at least one bin");
    let span = if hi > lo { hi - lo } else { 1.0 };
    let xmap = |v: f64| px + pw * (v - lo) / span;
    let top = hist.counts.iter().copied().max().unwrap_or(0).max(1) as f64;

    let mut out = String::new();
    header(&mut out, 560, 400);
    text(
        &mut out,
        290.0,
        28.0,
        16,
        "middle",
        "Reconstruction fidelity",
    );
    for (i, &c) in hist.counts.iter().enumerate() {
        let x0 = xmap(hist.edges[i]);
        let x1 = xmap(hist.edges[i + 1]);
        let h = ph * c as f64 / top;
        let _ = writeln!(
            out,
            "<rect x=\"{x0:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{h:.2}\" fill=\"#3b528b\" stroke=\"white\" stroke-width=\"0.5\"/>",
            py + ph - h,
            (x1 - x0).max(0.0)
        );
    }
    let _ = writeln!(
        out,
        "<path d=\"M{px:.1},{py:.1} V{:.1} H{:.1}\" fill=\"none\" stroke=\"#222\"/>",
        py + ph,
        px + pw
    );
    let mx = xmap(mean);
    let _ = writeln!(
        out,
        "<line x1=\"{mx:.2}\" y1=\"{py:.1}\" x2=\"{mx:.2}\" y2=\"{:.1}\" stroke=\"#c0392b\" stroke-dasharray=\"5 3\"/>",
        py + ph
    );
    for i in 0..=4 {
        let v = lo + span * i as f64 / 4.0;
        let x = xmap(v);
        let _ = writeln!(
            out,
            "<line x1=\"{x:.1}\" y1=\"{:.1}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"#222\"/>",
            py + ph,
            py + ph + 5.0
        );
        text(
            &mut out,
            x,
            py + ph + 20.0,
            12,
            "middle",
            &format!("{v:.4}"),
        );
    }
    for (v, label) in [(0.0, "0".to_string()), (top, format!("{}", top as usize))] {
        let y = py + ph - ph * v / top;
        text(&mut out, px - 8.0, y + 4.0, 12, "end", &label);
    }
    text(
        &mut out,
        px + pw / 2.0,
        py + ph + 42.0,
        14,
        "middle",
        "fidelity F",
    );
    text(&mut out, 22.0, py + ph / 2.0, 14, "middle", "trials");
    annotate(&mut out, px + 12.0, py + 22.0, rows);
    out.push_str("</svg>\n");
    out
}
