//! Randomized invariants; proptest drives the seeds of the library's own generators.

use proptest::prelude::*;
use spacetime_core::channels::{choi_of_channel, random_channel};
use spacetime_core::gaussian::{partial_transpose_gaussian, two_mode_squeezed};
use spacetime_core::operator_algebra::{
    c, haar_random_unitary, hermitian_eigenvalues, hermiticity_defect, max_abs_diff, partial_trace,
    random_density_matrix, random_hermitian, tensor, trace, unit, DimensionVector,
};
use spacetime_core::pdm::{
    build_pdm, causality_monotone_matrix, event_correlation, expectation_from_pdm, marginal,
    TemporalProcess,
};
use spacetime_core::process_matrix::{lv_project, ProcessMatrix};
use spacetime_core::timecrystal::{floquet_correlation_series, DisorderConfig, FloquetChainSpec};
use spacetime_core::{CMatrix, PauliString};

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig::with_cases(n)
}

fn random_process(seed: u64, n_steps: usize) -> TemporalProcess {
    let steps = (0..n_steps as u64)
        .map(|k| random_channel(2, 3, seed.wrapping_add(10 + k)))
        .collect();
    TemporalProcess::new(random_density_matrix(2, seed), steps).unwrap()
}

proptest! {
    #![proptest_config(cases(32))]

    #[test]
    fn tensor_is_associative(seed in any::<u64>()) {
        let a = random_hermitian(2, seed);
        let b = random_hermitian(3, seed ^ 1);
        let d = random_hermitian(2, seed ^ 2);
        let left = tensor(&tensor(&a, &b), &d);
        let right = tensor(&a, &tensor(&b, &d));
        prop_assert!(max_abs_diff(&left, &right) <= 1e-14);
    }

    #[test]
    fn partial_trace_of_product(seed in any::<u64>()) {
        let a = random_hermitian(3, seed);
        let b = random_hermitian(2, seed ^ 7);
        let dims = DimensionVector::new(vec![3, 2]).unwrap();
        let kept = partial_trace(&tensor(&a, &b), &dims, &[0]).unwrap();
        prop_assert!(max_abs_diff(&kept, &(a * trace(&b))) <= 1e-12);
    }

    #[test]
    fn eigenvalues_survive_unitary_conjugation(seed in any::<u64>(), d in 2usize..6) {
        let diag: Vec<f64> = (0..d).map(|k| k as f64 - 0.37 * d as f64).collect();
        let mut m = CMatrix::zeros(d, d);
        for (k, &x) in diag.iter().enumerate() {
            m[(k, k)] = c(x);
        }
        let u = haar_random_unitary(d, seed);
        let eig = hermitian_eigenvalues(&(&u * m * u.adjoint())).unwrap();
        for (got, want) in eig.iter().zip(&diag) {
            prop_assert!((got - want).abs() <= 1e-10);
        }
    }

    #[test]
    fn channels_preserve_trace_and_hermiticity(seed in any::<u64>(), d in 2usize..5, k in 1usize..5) {
        let ch = random_channel(d, k, seed);
        let out = ch.apply(&random_density_matrix(d, seed ^ 3)).unwrap();
        prop_assert!((trace(&out).re - 1.0).abs() <= 1e-10);
        prop_assert!(hermiticity_defect(&out) <= 1e-10);
    }

    #[test]
    fn choi_roundtrip_reproduces_action(seed in any::<u64>(), d in 2usize..4) {
        let ch = random_channel(d, 2, seed);
        let back = choi_of_channel(&ch).to_kraus().unwrap();
        for i in 0..d {
            for j in 0..d {
                let e = unit(d, i, j);
                prop_assert!(max_abs_diff(&back.apply(&e).unwrap(), &ch.apply(&e).unwrap()) <= 1e-10);
            }
        }
    }

    #[test]
    fn pdm_is_hermitian_with_unit_trace(seed in any::<u64>(), steps in 1usize..3) {
        let r = build_pdm(&random_process(seed, steps)).unwrap();
        prop_assert!(hermiticity_defect(&r.matrix) <= 1e-10);
        prop_assert!((trace(&r.matrix) - c(1.0)).norm() <= 1e-10);
    }

    #[test]
    fn pdm_reproduces_correlations_and_first_marginal(seed in any::<u64>(), labels in prop::collection::vec(0u8..4, 3)) {
        let proc = random_process(seed, 2);
        let r = build_pdm(&proc).unwrap();
        let s = PauliString::new(labels.clone()).unwrap();
        let ops: Vec<CMatrix> = labels.iter().map(|&l| PauliString::new(vec![l]).unwrap().matrix()).collect();
        let direct = event_correlation(&proc, &s).unwrap();
        prop_assert!((expectation_from_pdm(&r, &ops).unwrap() - direct).abs() <= 1e-10);
        prop_assert!(max_abs_diff(&marginal(&r, 0).unwrap(), proc.initial()) <= 1e-10);
    }

    #[test]
    fn causality_monotone_ignores_local_unitaries(seed in any::<u64>()) {
        let r = build_pdm(&random_process(seed, 1)).unwrap();
        let u = tensor(&haar_random_unitary(2, seed ^ 5), &haar_random_unitary(2, seed ^ 6));
        let rotated = &u * &r.matrix * u.adjoint();
        let diff = causality_monotone_matrix(&rotated) - causality_monotone_matrix(&r.matrix);
        prop_assert!(diff.abs() <= 1e-10);
    }

    #[test]
    fn lv_projection_is_idempotent(seed in any::<u64>()) {
        let w = ProcessMatrix::new([2; 4], random_hermitian(16, seed)).unwrap();
        let once = lv_project(&w);
        let twice = lv_project(&once);
        prop_assert!(max_abs_diff(once.matrix(), twice.matrix()) <= 1e-10);
    }

    #[test]
    fn gaussian_partial_transpose_keeps_symmetry_and_diagonal(r in 0.0f64..2.0, mode in 0usize..2) {
        let s = two_mode_squeezed(r).cov;
        let pt = partial_transpose_gaussian(&s, mode).unwrap();
        prop_assert!((&pt - pt.transpose()).abs().max() <= 1e-12);
        prop_assert!((pt.diagonal() - s.diagonal()).abs().max() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(cases(8))]

    #[test]
    fn floquet_correlations_are_bounded(seed in any::<u64>(), eps in 0.0f64..0.3, hx in 0.0f64..0.5) {
        let spec = FloquetChainSpec::disordered(4, eps, hx, seed, DisorderConfig::default()).unwrap();
        let s = floquet_correlation_series(&spec, 1, 30).unwrap();
        prop_assert!(s.values().iter().all(|v| v.abs() <= 1.0 + 1e-9));
    }
}

#[test]
fn product_process_without_steps_has_psd_pdm() {
    // A single event has no temporal structure, so its PDM is the state itself.
    let rho = random_density_matrix(2, 9);
    let r = build_pdm(&TemporalProcess::new(rho.clone(), vec![]).unwrap()).unwrap();
    assert!(max_abs_diff(&r.matrix, &rho) <= 1e-12);
    assert!(hermitian_eigenvalues(&r.matrix)
        .unwrap()
        .iter()
        .all(|&e| e >= -1e-12));
}
