//! Momentum-space results against the brute-force Fock-space oracle.

use kdq_core::oracle::{dense_hamiltonian, momentum_spectrum};
use kdq_core::{
    build_dense, char_function, coherence_entropy_density, dense_char_function,
    dense_coherence_entropy, dense_joint_distribution, dense_mean_work, mean_work_density,
    propagators, ModelSpec, MomentumGrid, Protocol, Scheme, C64,
};
use nalgebra::SymmetricEigen;
use rand::{rngs::StdRng, Rng, SeedableRng};
use std::f64::consts::LN_2;

fn momentum_g(spec: &ModelSpec, l: usize, u: f64, scheme: Scheme) -> C64 {
    let grid = MomentumGrid::finite_chain(l).unwrap();
    let props = propagators(spec, &grid, &Default::default()).unwrap();
    char_function(spec, &grid, &props, C64::from(u), scheme).unwrap()
}

#[test]
fn headline_quench_on_eight_sites() {
    let spec = ModelSpec::ising(15.0, 2.0, 0.0, 0.5, Protocol::SuddenQuench);
    let sys = build_dense(&spec, 8).unwrap();
    for u in [0.1, 0.7, 1.3] {
        let dense = dense_char_function(&sys, C64::from(u), Scheme::Kdq).unwrap();
        let momentum = momentum_g(&spec, 8, u, Scheme::Kdq);
        assert!(
            (dense - momentum).norm() <= 1e-8,
            "u={u}: {dense} vs {momentum}"
        );
    }
}

#[test]
fn random_tuples_quench_and_ramp() {
    let mut rng = StdRng::seed_from_u64(7);
    for l in [4, 6] {
        for protocol in [Protocol::SuddenQuench, Protocol::LinearRamp { delta: 4.0 }] {
            for _ in 0..3 {
                let h: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
                let spec = ModelSpec::ising(15.0, h[0], h[1], h[2], protocol);
                let sys = build_dense(&spec, l).unwrap();
                for k in 1..=5 {
                    let u = 0.4 * k as f64;
                    let a = dense_char_function(&sys, C64::from(u), Scheme::Kdq).unwrap();
                    let b = momentum_g(&spec, l, u, Scheme::Kdq);
                    assert!((a - b).norm() <= 1e-8, "{l} {protocol:?} {h:?} u={u}");
                }
            }
        }
    }
}

#[test]
fn generic_couplings_ramp() {
    let spec = ModelSpec {
        hopping: vec![0.7, -0.3],
        pairing: vec![1.1, 0.4],
        ..ModelSpec::ising(2.0, 1.2, -0.8, 0.6, Protocol::LinearRamp { delta: 3.0 })
    };
    let sys = build_dense(&spec, 6).unwrap();
    for scheme in [Scheme::Kdq, Scheme::Tpm] {
        for u in [0.3, 1.1, 1.9] {
            let a = dense_char_function(&sys, C64::from(u), scheme).unwrap();
            let b = momentum_g(&spec, 6, u, scheme);
            assert!((a - b).norm() <= 1e-8, "{scheme:?} u={u}: {a} vs {b}");
        }
    }
}

#[test]
fn tpm_char_function_matches() {
    let spec = ModelSpec::ising(15.0, 1.7, -0.6, 0.5, Protocol::LinearRamp { delta: 4.0 });
    let sys = build_dense(&spec, 6).unwrap();
    for u in [0.2, 0.9] {
        let a = dense_char_function(&sys, C64::from(u), Scheme::Tpm).unwrap();
        let b = momentum_g(&spec, 6, u, Scheme::Tpm);
        assert!((a - b).norm() <= 1e-8);
        // hermitian characteristic function for a genuine distribution
        let c = dense_char_function(&sys, C64::from(-u), Scheme::Tpm).unwrap();
        assert!((a.conj() - c).norm() < 1e-12);
    }
}

#[test]
fn tpm_equals_kdq_when_state_commutes() {
    let spec = ModelSpec::ising(15.0, 0.9, 0.9, 0.5, Protocol::SuddenQuench);
    let sys = build_dense(&spec, 6).unwrap();
    let a = dense_char_function(&sys, C64::from(0.6), Scheme::Kdq).unwrap();
    let b = dense_char_function(&sys, C64::from(0.6), Scheme::Tpm).unwrap();
    assert!((a - b).norm() < 1e-12);
}

#[test]
fn dense_joint_distribution_is_consistent() {
    let spec = ModelSpec::ising(3.0, 2.0, -1.3, 0.5, Protocol::LinearRamp { delta: 4.0 });
    let sys = build_dense(&spec, 6).unwrap();
    let kdq = dense_joint_distribution(&sys, Scheme::Kdq).unwrap();
    let total: C64 = kdq.iter().map(|o| o.q).sum();
    assert!((total - C64::new(1.0, 0.0)).norm() < 1e-12);
    let u = 0.8;
    let from_joint: C64 = kdq
        .iter()
        .map(|o| o.q * C64::new(0.0, u * (o.e2 - o.e1)).exp())
        .sum();
    let direct = dense_char_function(&sys, C64::from(u), Scheme::Kdq).unwrap();
    assert!((from_joint - direct).norm() < 1e-9);
    let tpm = dense_joint_distribution(&sys, Scheme::Tpm).unwrap();
    assert!(tpm.iter().all(|o| o.q.re >= -1e-12 && o.q.im.abs() < 1e-12));
}

#[test]
fn spectrum_matches_mode_multiset() {
    let spec = ModelSpec::ising(1.0, 0.0, 0.0, 0.0, Protocol::SuddenQuench);
    let eig = SymmetricEigen::new(dense_hamiltonian(&spec, 8, 0.37).unwrap());
    let mut dense: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    dense.sort_by(f64::total_cmp);
    let modes = momentum_spectrum(&spec, 8, 0.37).unwrap();
    assert_eq!(dense.len(), modes.len());
    for (a, b) in dense.iter().zip(&modes) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn mean_work_matches_mode_sum() {
    for protocol in [Protocol::SuddenQuench, Protocol::LinearRamp { delta: 4.0 }] {
        let spec = ModelSpec::ising(15.0, 2.0, -0.7, 0.5, protocol);
        let sys = build_dense(&spec, 8).unwrap();
        let grid = MomentumGrid::finite_chain(8).unwrap();
        let props = propagators(&spec, &grid, &Default::default()).unwrap();
        let density = mean_work_density(&spec, &grid, &props).unwrap();
        let dense = dense_mean_work(&sys);
        assert!(
            (dense - 8.0 * density).abs() < 1e-8,
            "{dense} vs {}",
            8.0 * density
        );
    }
    let spec = ModelSpec::ising(15.0, 2.0, 0.5, 0.5, Protocol::SuddenQuench);
    assert!(dense_mean_work(&build_dense(&spec, 6).unwrap()).abs() < 1e-12);
}

#[test]
fn coherence_entropy_matches_mode_sum() {
    // The mode sum uses dp / pi, i.e. entropy per mode pair: 2 S / L.
    let spec = ModelSpec::ising(50.0, 1.0, -1.0, 0.5, Protocol::SuddenQuench);
    let sys = build_dense(&spec, 8).unwrap();
    let dense = dense_coherence_entropy(&sys).unwrap();
    let grid = MomentumGrid::finite_chain(8).unwrap();
    let modes = coherence_entropy_density(&spec, &grid).unwrap();
    assert!((2.0 * dense / 8.0 - modes).abs() < 1e-10, "{dense} {modes}");
    assert!((2.0 * dense / 8.0 - LN_2).abs() < 2e-2);
}
