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

use std::f64::consts::{PI, SQRT_2};

use proptest::prelude::*;
use psitomo_core::{
    exact_outcomes, fidelity, fidelity_mixed, psi_phase, psi_visibility, purity,
    reconstruct_from_outcomes, Complex64, DensityMatrix, ProjectorSpec, PureState,
};

fn amps(max_dim: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..=max_dim).prop_filter_map(
        "zero vector",
        |v| {
            let a: Vec<Complex64> = v
                .into_iter()
                .map(|(re, im)| Complex64::new(re, im))
                .collect();
            (a.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-6).then_some(a)
        },
    )
}

fn state(max_dim: usize) -> impl Strategy<Value = PureState> {
    amps(max_dim).prop_map(|a| PureState::normalize(&a).unwrap())
}

proptest! {
    #[test]
    fn canonicalize_is_idempotent(psi in state(14)) {
        let once = psi.canonicalize();
        prop_assert_eq!(once.canonicalize(), once);
    }

    #[test]
    fn global_phase_leaves_fidelity_at_one(psi in state(14), theta in -10.0f64..10.0) {
        let f = fidelity(&psi, &psi.with_global_phase(theta)).unwrap();
        prop_assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_fidelity_of_a_projector_is_the_pure_fidelity(
        (a, b) in (2usize..=8).prop_flat_map(|d| {
            let s = || prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d);
            (s(), s())
        })
    ) {
        let to = |v: Vec<(f64, f64)>| {
            let a: Vec<Complex64> = v.into_iter().map(|(r, i)| Complex64::new(r, i)).collect();
            PureState::normalize(&a)
        };
        let (Ok(phi), Ok(psi)) = (to(a), to(b)) else { return Ok(()) };
        let rho = DensityMatrix::from_pure(&phi);
        let lhs = fidelity_mixed(&rho, &psi).unwrap();
        prop_assert!((lhs - fidelity(&phi, &psi).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn outcome_round_trip_is_exact(psi in state(14)) {
        prop_assume!(psi.amps()[0].norm() >= 0.05);
        let spec = ProjectorSpec::new(psi.dim(), 0).unwrap();
        let report = reconstruct_from_outcomes(&exact_outcomes(&psi, &spec).unwrap(), &spec).unwrap();
        prop_assert!(fidelity(&psi, &report.state).unwrap() >= 1.0 - 1e-10);
        prop_assert!(report.purity.pure);
    }

    #[test]
    fn recovery_identity(psi in state(14), pick in 0usize..13) {
        let d = psi.dim();
        let k = 1 + pick % (d - 1);
        let spec = ProjectorSpec::new(d, 0).unwrap();
        let t = *exact_outcomes(&psi, &spec).unwrap().interference_for(k).unwrap();
        let lhs = Complex64::new(t[0] - t[1], t[2] - t[1]);
        let c = psi.amps();
        let rhs = c[0] * c[k].conj() * SQRT_2;
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn three_step_inversion(phi in -PI..PI, gamma in 1e-3f64..=1.0, i0 in 1e-3f64..1e3) {
        let phi = if phi == -PI { PI } else { phi };
        let i = |l: f64| i0 * (1.0 + gamma * (phi - PI / 4.0 + l * PI / 2.0).cos());
        let (i1, i2, i3) = (i(1.0), i(2.0), i(3.0));
        let got = psi_phase(i1, i2, i3).unwrap();
        let diff = (got - phi + PI).rem_euclid(2.0 * PI) - PI;
        // Absolute error scales with the fringe amplitude's rounding.
        prop_assert!(diff.abs() < 1e-12 / gamma.min(1.0), "phi {phi} got {got}");
        let g = psi_visibility(i1, i2, i3, i0).unwrap();
        prop_assert!((g - gamma).abs() < 1e-12);
    }
}

/// Gram matrix of vectors `v_k = alpha_k v_0 + beta_k w_k` with `w_k`
/// orthogonal to `v_0`, normalized to unit trace.
fn gram(v0: &[Complex64], alphas: &[Complex64], betas: &[f64]) -> DensityMatrix {
    let m = v0.len();
    // A vector orthogonal to v0 for each k: rotate components and project out v0.
    let n0: f64 = v0.iter().map(|c| c.norm_sqr()).sum();
    let mut vecs = vec![v0.to_vec()];
    for (k, (&a, &b)) in alphas.iter().zip(betas).enumerate() {
        let mut w: Vec<Complex64> = (0..m)
            .map(|i| v0[(i + k + 1) % m] * Complex64::new(0.3, 1.0 + i as f64))
            .collect();
        let proj: Complex64 = v0
            .iter()
            .zip(&w)
            .map(|(x, y)| x.conj() * y)
            .sum::<Complex64>()
            / n0;
        for (wi, xi) in w.iter_mut().zip(v0) {
            *wi -= proj * xi;
        }
        vecs.push(v0.iter().zip(&w).map(|(x, y)| a * x + b * y).collect());
    }
    let d = vecs.len();
    let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
    for j in 0..d {
        for k in 0..d {
            entries[j * d + k] = vecs[j]
                .iter()
                .zip(&vecs[k])
                .map(|(x, y)| x.conj() * y)
                .sum();
        }
    }
    let tr: f64 = (0..d).map(|j| entries[j * d + j].re).sum();
    for e in entries.iter_mut() {
        *e /= tr;
    }
    // Symmetrize exactly; conj(sum) and sum differ only by rounding.
    for j in 0..d {
        entries[j * d + j].im = 0.0;
        for k in j + 1..d {
            entries[k * d + j] = entries[j * d + k].conj();
        }
    }
    DensityMatrix::new(d, entries).unwrap()
}

proptest! {
    #[test]
    fn maximal_coherence_implies_purity(
        v0 in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3),
        alphas in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..6),
        perturb in prop::bool::ANY,
        beta in 0.05f64..0.5,
    ) {
        let v0: Vec<Complex64> = v0.into_iter().map(|(r, i)| Complex64::new(r, i)).collect();
        prop_assume!(v0.iter().map(|c| c.norm_sqr()).sum::<f64>() > 0.05);
        let alphas: Vec<Complex64> = alphas.into_iter().map(|(r, i)| Complex64::new(r, i)).collect();
        let betas = vec![if perturb { beta } else { 0.0 }; alphas.len()];
        let rho = gram(&v0, &alphas, &betas);
        let d = rho.dim();
        let coherent = (1..d).all(|k| {
            let bound = (rho.get(0, 0).re * rho.get(k, k).re).sqrt();
            (rho.get(0, k).norm() - bound).abs() <= 1e-10
        });
        if coherent {
            prop_assert!((purity(&rho) - 1.0).abs() < 1e-9);
        } else {
            // Perturbed matrices fail the condition and are mixed.
            prop_assert!(perturb);
            prop_assert!(purity(&rho) < 1.0 - 1e-9);
        }
        if !perturb {
            prop_assert!(coherent);
        }
    }
}
