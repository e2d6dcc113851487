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

//! Qudit states and the figures of merit used to compare them.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Result, TomoError};
use crate::seed;

/// Tolerance on the unit-norm invariant.
pub const NORM_TOL: f64 = 1e-12;
/// Amplitudes below this modulus cannot pin the global phase.
pub const PHASE_PIVOT_TOL: f64 = 1e-9;
/// Slack allowed on positive semidefiniteness.
pub const PSD_TOL: f64 = 1e-10;

const ZERO_VECTOR_TOL: f64 = 1e-15;

/// A pure qudit `sum_k c_k |k>`, where `c_k` is the complex transmission of
/// slit `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<Complex64>,
}

impl PureState {
    /// Scale `amps` to unit norm.
    pub fn normalize(amps: &[Complex64]) -> Result<Self> {
        if amps.len() < 2 {
            return Err(TomoError::DimensionTooSmall(amps.len()));
        }
        if amps.iter().all(|c| c.norm() < ZERO_VECTOR_TOL) {
            return Err(TomoError::ZeroVector);
        }
        let norm = libm::sqrt(amps.iter().map(|c| c.norm_sqr()).sum::<f64>());
        Ok(Self {
            amps: amps.iter().map(|c| c / norm).collect(),
        })
    }

    /// Wrap amplitudes that are already normalized, checking the invariant.
    pub fn from_normalized(amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(TomoError::DimensionTooSmall(amps.len()));
        }
        let norm_sqr: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(TomoError::InvalidConfig(alloc::format!(
                "state norm^2 is {norm_sqr}, expected 1"
            )));
        }
        Ok(Self { amps })
    }

    /// Canonical basis state `|k>`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if dim < 2 {
            return Err(TomoError::DimensionTooSmall(dim));
        }
        if k >= dim {
            return Err(TomoError::BadIndex { index: k, dim });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[k] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    #[inline]
    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// `|c_k|^2` for every slit.
    pub fn populations(&self) -> Vec<f64> {
        self.amps.iter().map(|c| c.norm_sqr()).collect()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Fix the global phase: the first amplitude with modulus above
    /// [`PHASE_PIVOT_TOL`] becomes real and nonnegative.
    pub fn canonicalize(&self) -> PureState {
        let Some(i) = self.amps.iter().position(|c| c.norm() > PHASE_PIVOT_TOL) else {
            return self.clone();
        };
        let pivot = self.amps[i];
        if pivot.im == 0.0 && pivot.re > 0.0 {
            return self.clone();
        }
        let rot = pivot.conj() / pivot.norm();
        let mut amps: Vec<Complex64> = self.amps.iter().map(|c| c * rot).collect();
        // Exactly real, so a second pass is the identity.
        amps[i] = Complex64::new(pivot.norm(), 0.0);
        PureState { amps }
    }

    /// Multiply by a global phase `e^{i theta}`.
    pub fn with_global_phase(&self, theta: f64) -> PureState {
        let rot = Complex64::from_polar(1.0, theta);
        PureState {
            amps: self.amps.iter().map(|c| c * rot).collect(),
        }
    }

    /// Bloch vector of a qubit, `None` for `dim != 2`.
    pub fn bloch_vector(&self) -> Option<[f64; 3]> {
        if self.dim() != 2 {
            return None;
        }
        let (a, b) = (self.amps[0], self.amps[1]);
        let coh = a.conj() * b;
        Some([2.0 * coh.re, 2.0 * coh.im, a.norm_sqr() - b.norm_sqr()])
    }
}

/// Scale `amps` to a unit-norm state.
pub fn normalize(amps: &[Complex64]) -> Result<PureState> {
    PureState::normalize(amps)
}

/// Draw a state from the unitarily invariant measure: a vector of i.i.d.
/// complex standard normals, normalized.
pub fn haar_random(dim: usize, seed: u64) -> Result<PureState> {
    if dim < 2 {
        return Err(TomoError::DimensionTooSmall(dim));
    }
    let mut rng = seed::rng(seed);
    loop {
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| {
                Complex64::new(
                    StandardNormal.sample(&mut rng),
                    StandardNormal.sample(&mut rng),
                )
            })
            .collect();
        // A zero draw has probability zero, but retry rather than fail.
        if let Ok(state) = PureState::normalize(&amps) {
            return Ok(state);
        }
    }
}

/// `n_points` qubits on a Fibonacci lattice over the Bloch sphere.
pub fn bloch_grid(n_points: usize) -> Vec<PureState> {
    let golden = PI * (3.0 - libm::sqrt(5.0));
    (0..n_points)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n_points as f64;
            let azimuth = golden * i as f64;
            let cos_half = libm::sqrt(((1.0 + z) / 2.0).max(0.0));
            let sin_half = libm::sqrt(((1.0 - z) / 2.0).max(0.0));
            PureState {
                amps: vec![
                    Complex64::new(cos_half, 0.0),
                    Complex64::from_polar(sin_half, azimuth),
                ],
            }
        })
        .collect()
}

/// `|<a|b>|`, clamped to `[0, 1]`.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(a.inner(b)?.norm().min(1.0))
}

/// `sqrt(<psi|rho|psi>)`, the fidelity between a mixed and a pure state.
pub fn fidelity_mixed(rho: &DensityMatrix, psi: &PureState) -> Result<f64> {
    check_dims(rho.dim(), psi.dim())?;
    let d = rho.dim();
    let c = psi.amps();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..d {
        for k in 0..d {
            acc += c[j].conj() * rho.get(j, k) * c[k];
        }
    }
    Ok(libm::sqrt(acc.re.max(0.0)).min(1.0))
}

/// `Tr(rho^2)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    // Tr(rho^2) = sum_jk |rho_jk|^2 for Hermitian rho.
    rho.entries.iter().map(|c| c.norm_sqr()).sum()
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(TomoError::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// A `d x d` density matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    /// Validate Hermiticity, unit trace and positive semidefiniteness.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim < 2 {
            return Err(TomoError::DimensionTooSmall(dim));
        }
        if entries.len() != dim * dim {
            return Err(TomoError::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        let rho = Self { dim, entries };
        for j in 0..dim {
            for k in j..dim {
                if (rho.get(j, k) - rho.get(k, j).conj()).norm() > NORM_TOL {
                    return Err(TomoError::InvalidDensityMatrix("not Hermitian"));
                }
            }
        }
        if (rho.trace() - 1.0).abs() > NORM_TOL {
            return Err(TomoError::InvalidDensityMatrix("trace differs from 1"));
        }
        if !rho.is_psd(PSD_TOL) {
            return Err(TomoError::InvalidDensityMatrix("not positive semidefinite"));
        }
        Ok(rho)
    }

    /// `|psi><psi|`.
    pub fn from_pure(psi: &PureState) -> Self {
        let c = psi.amps();
        let d = c.len();
        let mut entries = Vec::with_capacity(d * d);
        for j in 0..d {
            for k in 0..d {
                entries.push(c[j] * c[k].conj());
            }
        }
        Self { dim: d, entries }
    }

    /// `I / d`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(TomoError::DimensionTooSmall(dim));
        }
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for j in 0..dim {
            entries[j * dim + j] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Ok(Self { dim, entries })
    }

    /// `v |psi><psi| + (1 - v) I / d`.
    pub fn werner(psi: &PureState, v: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&v) {
            return Err(TomoError::InvalidDensityMatrix(
                "mixing weight outside [0, 1]",
            ));
        }
        let pure = Self::from_pure(psi);
        let mixed = Self::maximally_mixed(psi.dim())?;
        Ok(pure.blend(&mixed, v))
    }

    /// Convex combination `w * self + (1 - w) * other`.
    pub fn blend(&self, other: &DensityMatrix, w: f64) -> DensityMatrix {
        assert_eq!(self.dim, other.dim, "blend needs equal dimensions");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * w + b * (1.0 - w))
            .collect();
        DensityMatrix {
            dim: self.dim,
            entries,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.entries[j * self.dim + k]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|j| self.get(j, j).re).sum()
    }

    /// Diagonal, i.e. the slit populations.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim).map(|j| self.get(j, j).re).collect()
    }

    /// Cholesky factorization of `rho + tol * I`; succeeds iff every
    /// eigenvalue of `rho` is at least `-tol` (up to rounding).
    fn is_psd(&self, tol: f64) -> bool {
        let d = self.dim;
        let mut l = vec![Complex64::new(0.0, 0.0); d * d];
        for j in 0..d {
            let mut diag = self.get(j, j).re + tol;
            for k in 0..j {
                diag -= l[j * d + k].norm_sqr();
            }
            if diag <= 0.0 {
                return false;
            }
            let ljj = libm::sqrt(diag);
            l[j * d + j] = Complex64::new(ljj, 0.0);
            for i in (j + 1)..d {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * d + k] * l[j * d + k].conj();
                }
                l[i * d + j] = s / ljj;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn normalize_examples() {
        let s = normalize(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(s.amps(), &[c(1.0, 0.0), c(0.0, 0.0)]);

        let s = normalize(&[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(s.amps(), &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);

        let s = normalize(&[c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert!((s.amps()[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((s.amps()[1] - c(0.0, FRAC_1_SQRT_2)).norm() < 1e-15);
        let n: f64 = s.populations().iter().sum();
        assert!((n - 1.0).abs() < NORM_TOL);
    }

    #[test]
    fn normalize_rejects_zero_and_short() {
        assert_eq!(
            normalize(&[c(0.0, 0.0), c(1e-16, 0.0)]),
            Err(TomoError::ZeroVector)
        );
        assert_eq!(
            normalize(&[c(1.0, 0.0)]),
            Err(TomoError::DimensionTooSmall(1))
        );
    }

    #[test]
    fn haar_is_deterministic_and_normalized() {
        let a = haar_random(2, 99).unwrap();
        let b = haar_random(2, 99).unwrap();
        assert_eq!(a, b);
        let s = haar_random(14, 5).unwrap();
        let n: f64 = s.populations().iter().sum();
        assert!((n - 1.0).abs() < NORM_TOL);
        assert_eq!(haar_random(1, 0), Err(TomoError::DimensionTooSmall(1)));
    }

    #[test]
    fn haar_unit_norm_over_many_draws() {
        for i in 0..100_000u64 {
            let d = 2 + (i % 13) as usize;
            let s = haar_random(d, i).unwrap();
            let n: f64 = s.populations().iter().sum();
            assert!((n - 1.0).abs() < NORM_TOL, "draw {i}");
        }
    }

    #[test]
    fn haar_first_moment_at_dim_two() {
        // E|c_0|^2 = 1/d under the unitarily invariant measure.
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|i| haar_random(2, seed::derive(3, i)).unwrap().populations()[0])
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn bloch_grid_examples() {
        assert_eq!(bloch_grid(1).len(), 1);

        let grid = bloch_grid(1024);
        assert_eq!(grid.len(), 1024);
        let mut mean_z = 0.0;
        for s in &grid {
            let n: f64 = s.populations().iter().sum();
            assert!((n - 1.0).abs() < NORM_TOL);
            mean_z += s.bloch_vector().unwrap()[2];
        }
        mean_z /= 1024.0;
        assert!(mean_z.abs() < 1e-6, "mean z {mean_z}");

        let vecs: Vec<[f64; 3]> = grid.iter().map(|s| s.bloch_vector().unwrap()).collect();
        let mut min_angle = f64::INFINITY;
        for i in 0..vecs.len() {
            for j in (i + 1)..vecs.len() {
                let dot: f64 = (0..3).map(|a| vecs[i][a] * vecs[j][a]).sum();
                min_angle = min_angle.min(libm::acos(dot.clamp(-1.0, 1.0)));
            }
        }
        assert!(min_angle > 0.0);
    }

    #[test]
    fn fidelity_examples() {
        let psi = haar_random(4, 1).unwrap();
        assert!((fidelity(&psi, &psi).unwrap() - 1.0).abs() < 1e-12);

        let zero = PureState::basis(2, 0).unwrap();
        let one = PureState::basis(2, 1).unwrap();
        assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);

        let plus = normalize(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((fidelity(&zero, &plus).unwrap() - FRAC_1_SQRT_2).abs() < 1e-15);

        let three = PureState::basis(3, 0).unwrap();
        assert_eq!(
            fidelity(&zero, &three),
            Err(TomoError::DimensionMismatch {
                expected: 2,
                found: 3
            })
        );
    }

    #[test]
    fn fidelity_mixed_examples() {
        let psi = haar_random(3, 8).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        assert!((fidelity_mixed(&rho, &psi).unwrap() - 1.0).abs() < 1e-12);

        for d in [2, 3, 7] {
            let mixed = DensityMatrix::maximally_mixed(d).unwrap();
            let psi = haar_random(d, d as u64).unwrap();
            let f = fidelity_mixed(&mixed, &psi).unwrap();
            assert!((f - 1.0 / libm::sqrt(d as f64)).abs() < 1e-12);
        }

        // <psi|(0.5 |psi><psi| + 0.25 I)|psi> = 0.75
        let psi = haar_random(2, 4).unwrap();
        let rho = DensityMatrix::werner(&psi, 0.5).unwrap();
        let f = fidelity_mixed(&rho, &psi).unwrap();
        assert!((f - libm::sqrt(0.75)).abs() < 1e-12, "{f}");
    }

    #[test]
    fn purity_examples() {
        let psi = haar_random(5, 2).unwrap();
        assert!((purity(&DensityMatrix::from_pure(&psi)) - 1.0).abs() < 1e-12);
        for d in [2, 6] {
            let p = purity(&DensityMatrix::maximally_mixed(d).unwrap());
            assert!((p - 1.0 / d as f64).abs() < 1e-15);
        }
        // v^2 + 2v(1-v)/d + (1-v)^2/d at v = 0.5, d = 2
        let v: f64 = 0.5;
        let d = 2.0;
        let closed = v * v + 2.0 * v * (1.0 - v) / d + (1.0 - v) * (1.0 - v) / d;
        assert!((closed - 0.625).abs() < 1e-15);
        let rho = DensityMatrix::werner(&haar_random(2, 0).unwrap(), 0.5).unwrap();
        assert!((purity(&rho) - 0.625).abs() < 1e-12);
    }

    #[test]
    fn density_matrix_validation() {
        let bad_trace = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert!(DensityMatrix::new(2, bad_trace).is_err());
        let not_herm = vec![c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0)];
        assert!(DensityMatrix::new(2, not_herm).is_err());
        // Coherence above sqrt(rho_00 rho_11) has a negative eigenvalue.
        let not_psd = vec![c(0.5, 0.0), c(0.6, 0.0), c(0.6, 0.0), c(0.5, 0.0)];
        assert!(DensityMatrix::new(2, not_psd).is_err());

        let psi = haar_random(6, 12).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        let ok = DensityMatrix::new(6, rho.entries.clone()).unwrap();
        for j in 0..6 {
            for k in 0..6 {
                assert!(ok.get(j, k).norm_sqr() <= ok.get(j, j).re * ok.get(k, k).re + PSD_TOL);
            }
        }
    }

    #[test]
    fn canonical_form_pins_first_significant_amplitude() {
        let s = normalize(&[c(0.0, 0.0), c(0.0, -2.0), c(1.0, 1.0)]).unwrap();
        let canon = s.canonicalize();
        assert_eq!(canon.amps()[0], c(0.0, 0.0));
        assert_eq!(canon.amps()[1].im, 0.0);
        assert!(canon.amps()[1].re > 0.0);
        assert!((fidelity(&s, &canon).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bloch_vector_of_basis_states() {
        let zero = PureState::basis(2, 0).unwrap();
        assert_eq!(zero.bloch_vector(), Some([0.0, 0.0, 1.0]));
        assert_eq!(PureState::basis(3, 0).unwrap().bloch_vector(), None);
    }
}
