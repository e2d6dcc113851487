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

//! Three-step phase-shifting estimators.
//!
//! The frames follow `I_l = I_0 (1 + gamma cos(phi - pi/4 + l pi/2))` for
//! `l = 1, 2, 3`, so `I_1 - I_2 = sqrt(2) I_0 gamma cos(phi)` and
//! `I_3 - I_2 = sqrt(2) I_0 gamma sin(phi)`.

use core::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::error::{Result, TomoError};

/// Modulation below which a fringe is treated as absent, relative to the
/// largest intensity in play.
pub const DEGENERACY_RATIO: f64 = 1e-6;

/// Fringe phase `atan2(I_3 - I_2, I_1 - I_2)` in `(-pi, pi]`.
///
/// `eps` is the absolute degeneracy threshold; pass `0.0` together with a
/// relative check elsewhere, or use [`psi_phase`].
pub fn psi_phase_with_threshold(i1: f64, i2: f64, i3: f64, eps: f64) -> Result<f64> {
    let (re, im) = (i1 - i2, i3 - i2);
    if re.abs() < eps && im.abs() < eps {
        return Err(TomoError::DegenerateFringe { slit: 0 });
    }
    if re == 0.0 && im == 0.0 {
        return Err(TomoError::DegenerateFringe { slit: 0 });
    }
    let phi = libm::atan2(im, re);
    // atan2 returns -pi for (negative, -0.0).
    Ok(if phi == -core::f64::consts::PI {
        core::f64::consts::PI
    } else {
        phi
    })
}

/// [`psi_phase_with_threshold`] with the threshold set to
/// [`DEGENERACY_RATIO`] times the largest of the three intensities.
pub fn psi_phase(i1: f64, i2: f64, i3: f64) -> Result<f64> {
    let scale = i1.abs().max(i2.abs()).max(i3.abs());
    psi_phase_with_threshold(i1, i2, i3, DEGENERACY_RATIO * scale)
}

/// Fringe visibility `sqrt((I_1 - I_2)^2 + (I_3 - I_2)^2) / (sqrt(2) I_0)`.
pub fn psi_visibility(i1: f64, i2: f64, i3: f64, i0: f64) -> Result<f64> {
    if !(i0 > 0.0) {
        return Err(TomoError::NonpositiveReference);
    }
    Ok(libm::hypot(i1 - i2, i3 - i2) / (SQRT_2 * i0))
}

/// Direction of the resultant `sum_j w_j e^{i phi_j}`.
///
/// `weights`, when given, must match `phases` in length.
pub fn circular_mean(phases: &[f64], weights: Option<&[f64]>) -> Result<f64> {
    if phases.is_empty() {
        return Err(TomoError::ZeroResultant);
    }
    let resultant: Complex64 = match weights {
        None => phases.iter().map(|&p| Complex64::from_polar(1.0, p)).sum(),
        Some(w) => {
            if w.len() != phases.len() {
                return Err(TomoError::DimensionMismatch {
                    expected: phases.len(),
                    found: w.len(),
                });
            }
            if w.iter().any(|x| !(*x >= 0.0)) || !(w.iter().sum::<f64>() > 0.0) {
                return Err(TomoError::InvalidConfig(
                    "weights must be nonnegative with a positive sum".into(),
                ));
            }
            phases
                .iter()
                .zip(w)
                .map(|(&p, &wj)| Complex64::from_polar(wj, p))
                .sum()
        }
    };
    if resultant.norm() < 1e-12 {
        return Err(TomoError::ZeroResultant);
    }
    let phi = resultant.arg();
    Ok(if phi == -core::f64::consts::PI {
        core::f64::consts::PI
    } else {
        phi
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    /// Intensities of the three steps for the given fringe parameters.
    fn triple(phi: f64, gamma: f64, i0: f64) -> (f64, f64, f64) {
        let i = |l: f64| i0 * (1.0 + gamma * libm::cos(phi - FRAC_PI_4 + FRAC_PI_2 * l));
        (i(1.0), i(2.0), i(3.0))
    }

    #[test]
    fn oracle_triple_at_zero_phase() {
        let (a, b, c) = triple(0.0, 1.0, 1.0);
        assert!((a - 1.7071).abs() < 1e-4);
        assert!((b - 0.2929).abs() < 1e-4);
        assert!((c - 0.2929).abs() < 1e-4);
    }

    #[test]
    fn phase_examples() {
        assert!(psi_phase(1.7071, 0.2929, 0.2929).unwrap().abs() < 1e-15);
        let (a, b, c) = triple(FRAC_PI_2, 0.8, 2.0);
        assert!((psi_phase(a, b, c).unwrap() - FRAC_PI_2).abs() < 1e-12);
        assert_eq!(
            psi_phase(1.0, 1.0, 1.0),
            Err(TomoError::DegenerateFringe { slit: 0 })
        );
        let (a, b, c) = triple(PI, 0.5, 1.0);
        let phi = psi_phase(a, b, c).unwrap();
        assert!(phi > 0.0 && (phi - PI).abs() < 1e-12);
    }

    #[test]
    fn visibility_examples() {
        assert!((psi_visibility(1.7071, 0.2929, 0.2929, 1.0).unwrap() - 1.0).abs() < 1e-4);
        let (a, b, c) = triple(0.0, 1.0, 1.0);
        assert!((psi_visibility(a, b, c, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(psi_visibility(1.0, 1.0, 1.0, 1.0).unwrap(), 0.0);
        for k in 0..20 {
            let phi = -3.0 + 0.3 * k as f64;
            let (a, b, c) = triple(phi, 0.37, 1.5);
            assert!((psi_visibility(a, b, c, 1.5).unwrap() - 0.37).abs() < 1e-12);
        }
        assert_eq!(
            psi_visibility(1.0, 0.0, 1.0, 0.0),
            Err(TomoError::NonpositiveReference)
        );
    }

    #[test]
    fn circular_mean_examples() {
        assert!((circular_mean(&[0.1, 0.1, 0.1], None).unwrap() - 0.1).abs() < 1e-15);
        let m = circular_mean(&[PI - 0.01, -PI + 0.01], None).unwrap();
        assert!((m.abs() - PI).abs() < 1e-12, "{m}");
        let m = circular_mean(&[0.0, FRAC_PI_2], Some(&[1.0, 1.0])).unwrap();
        assert!((m - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(
            circular_mean(&[0.0, PI], None),
            Err(TomoError::ZeroResultant)
        );
        assert_eq!(circular_mean(&[], None), Err(TomoError::ZeroResultant));
        assert!(circular_mean(&[0.0], Some(&[-1.0])).is_err());
    }
}
