use linkloop::linkspace::{self, adjoint_of, minkowski_eta, LoopSpec, LoopStep};
use linkloop::qstate::{self, apply_local, pauli, DensityMatrix, LocalOperation, PauliVector, PureState, C64};
use linkloop::rng;
use nalgebra::{DMatrix, Matrix2, Matrix4, Vector4};
use num_complex::Complex;
use proptest::prelude::*;

fn c(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

fn state(n: usize, seed: u64, mixed: bool) -> DensityMatrix {
    if mixed {
        qstate::random_density(n, 1 + (seed as usize % (1 << n)), seed).unwrap()
    } else {
        qstate::haar_random_pure(n, seed).unwrap().density()
    }
}

/// `tr_x[(M ⊗ 1) ρ_xy]` for a two-qubit matrix with factor order (x, y).
fn collapse(m: &Matrix2<C64>, rho_xy: &DMatrix<C64>) -> Matrix2<C64> {
    Matrix2::from_fn(|b, bp| {
        let mut acc = c(0.0);
        for a in 0..2 {
            for k in 0..2 {
                acc += m[(a, k)] * rho_xy[(2 * k + b, 2 * a + bp)];
            }
        }
        acc
    })
}

/// Carries an operator around the loop by repeated collapse, with the
/// antiunitary flip `σ_2 Mᵀ σ_2` applied on leaving a flipped site.
fn sequential_collapse(rho: &DensityMatrix, lp: &LoopSpec, start: &PauliVector) -> Vector4<f64> {
    let y = pauli(2);
    let steps = lp.steps();
    let mut m = qstate::pauli_reconstruct(start);
    for k in 0..steps.len() {
        let from = steps[k];
        let to = steps[(k + 1) % steps.len()].site;
        if from.flipped {
            m = y * m.transpose() * y;
        }
        let pair = qstate::partial_trace(rho, &[from.site, to]).unwrap();
        m = collapse(&m, pair.matrix());
    }
    *qstate::pauli_coefficients(&m).unwrap().as_vector()
}

fn random_loop(n_sites: usize, len: usize, seed: u64) -> LoopSpec {
    // Walk that never repeats the previous site and closes on a different site.
    let mut x = seed;
    let mut next = || {
        x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (x >> 33) as usize
    };
    loop {
        let mut steps: Vec<LoopStep> = Vec::new();
        for _ in 0..len {
            let prev = steps.last().map(|s| s.site);
            let mut s = next() % n_sites;
            while Some(s) == prev {
                s = next() % n_sites;
            }
            steps.push(LoopStep::new(s, next() % 2 == 0));
        }
        if let Ok(lp) = LoopSpec::new(steps) {
            return lp;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pauli_round_trip(m in prop::array::uniform4(-5.0f64..5.0)) {
        let v = PauliVector::from(m);
        let back = qstate::pauli_coefficients(&qstate::pauli_reconstruct(&v)).unwrap();
        prop_assert!((back.as_vector() - v.as_vector()).amax() <= 1e-12);
    }

    #[test]
    fn partial_trace_composes(seed in any::<u64>(), mixed in any::<bool>()) {
        let rho = state(4, seed, mixed);
        let direct = qstate::partial_trace(&rho, &[1, 3]).unwrap();
        let staged = qstate::partial_trace(&qstate::partial_trace(&rho, &[0, 1, 3]).unwrap(), &[1, 2]).unwrap();
        prop_assert!((direct.matrix() - staged.matrix()).camax() <= 1e-12);
        prop_assert!((direct.matrix().trace().re - 1.0).abs() <= 1e-12);
        prop_assert!(direct.eigenvalues()[0] >= -1e-12);
    }

    #[test]
    fn loop_product_matches_sequential_collapse(seed in any::<u64>(), len in 2usize..6, mixed in any::<bool>()) {
        let rho = state(4, seed, mixed);
        let lp = random_loop(4, len, seed ^ 0x5eed);
        let s = linkspace::loop_transform(&rho, &lp).unwrap();
        for i in 0..4 {
            let e = Vector4::from_fn(|r, _| if r == i { 1.0 } else { 0.0 });
            let oracle = sequential_collapse(&rho, &lp, &PauliVector(e));
            prop_assert!((s.column(i) - oracle).amax() <= 1e-12, "{lp}: column {i}");
        }
    }

    #[test]
    fn link_transforms_under_local_operations(seed in any::<u64>(), sl in any::<bool>()) {
        let rho = state(3, seed, seed % 3 == 0);
        let mut r = rng::trial_stream(seed, 1);
        let ops: Vec<LocalOperation> = (0..3)
            // A non-unitary op on the traced-out site would change ρ_02 itself.
            .map(|s| if sl && s != 1 {
                qstate::sample_sl2c(s, &mut r, qstate::DEFAULT_MAX_CONDITION).unwrap()
            } else {
                qstate::sample_su2(s, &mut r)
            })
            .collect();
        let out = apply_local(&rho, &ops).unwrap();
        let before = linkspace::link_between(&rho, 0, 2).unwrap();
        let after = linkspace::link_between(&out.state, 0, 2).unwrap();
        let u0 = adjoint_of(ops[0].matrix());
        let u2 = adjoint_of(ops[2].matrix());
        let predicted = u2 * before.matrix() * u0.transpose();
        let scale = predicted.amax().max(1.0);
        prop_assert!((after.matrix() * out.trace_factor - predicted).amax() <= 1e-10 * scale);
    }

    #[test]
    fn adjoint_is_a_homomorphism(seed in any::<u64>()) {
        let mut r = rng::seeded(seed);
        let a = qstate::sample_sl2c(0, &mut r, qstate::DEFAULT_MAX_CONDITION).unwrap();
        let b = qstate::sample_sl2c(0, &mut r, qstate::DEFAULT_MAX_CONDITION).unwrap();
        let ab = adjoint_of(&(a.matrix() * b.matrix()));
        let prod = adjoint_of(a.matrix()) * adjoint_of(b.matrix());
        prop_assert!((ab - prod).amax() <= 1e-9 * prod.amax());
        let eta = minkowski_eta();
        let u = linkspace::adjoint_representation(&a).unwrap();
        let m = u.matrix();
        prop_assert!((m * eta * m.transpose() - eta).amax() <= 1e-9 * m.amax() * m.amax());
        prop_assert!(m[(0, 0)] >= 1.0 - 1e-12);
    }

    #[test]
    fn su2_adjoint_is_rotation(seed in any::<u64>()) {
        let op = qstate::random_su2(1, seed);
        let u = linkspace::adjoint_representation(&op).unwrap();
        let rot = u.rotation_block();
        prop_assert!((rot * rot.transpose() - nalgebra::Matrix3::identity()).amax() <= 1e-12);
        prop_assert!((rot.determinant() - 1.0).abs() <= 1e-12);
        prop_assert!((u.matrix()[(0, 0)] - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn su2_preserves_spectrum(seed in any::<u64>()) {
        let rho = qstate::random_density(3, 1 + (seed % 8) as usize, seed).unwrap();
        let mut r = rng::trial_stream(seed, 9);
        let ops: Vec<_> = (0..3).map(|s| qstate::sample_su2(s, &mut r)).collect();
        let out = apply_local(&rho, &ops).unwrap();
        prop_assert_eq!(out.trace_factor, 1.0);
        let (a, b) = (rho.eigenvalues(), out.state.eigenvalues());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn loop_label_ignores_rotation(seed in any::<u64>(), len in 2usize..6, shift in 0usize..6) {
        let lp = random_loop(5, len, seed);
        let mut steps = lp.steps().to_vec();
        steps.rotate_left(shift % len);
        let rotated = LoopSpec::new(steps).unwrap();
        prop_assert_eq!(lp.label(), rotated.label());
    }

    #[test]
    fn transport_matches_matrix_product(seed in any::<u64>(), m in prop::array::uniform4(-1.0f64..1.0)) {
        let rho = state(3, seed, false);
        let link = linkspace::link_between(&rho, 2, 1).unwrap();
        let v = PauliVector::from(m);
        let direct = collapse(&qstate::pauli_reconstruct(&v), qstate::partial_trace(&rho, &[2, 1]).unwrap().matrix());
        let expected = qstate::pauli_coefficients(&direct).unwrap();
        prop_assert!((link.transport(&v).as_vector() - expected.as_vector()).amax() <= 1e-12);
    }
}

#[test]
fn swap_completeness() {
    // Σ σ_i ⊗ σ_i = 2·SWAP
    let mut sum = nalgebra::Matrix4::<C64>::zeros();
    for i in 0..4 {
        sum += pauli(i).kronecker(&pauli(i));
    }
    let swap = Matrix4::from_fn(|r, col| {
        let (a, b) = (r / 2, r % 2);
        c(if col == 2 * b + a { 2.0 } else { 0.0 })
    });
    assert!((sum - swap).camax() <= 1e-15);
}

#[test]
fn pure_amplitudes_round_trip_through_density() {
    let psi = PureState::haar(3, &mut rng::seeded(3)).unwrap();
    let rho = psi.density();
    let outer = psi.amplitudes() * psi.amplitudes().adjoint();
    assert!((rho.matrix() - outer).camax() <= 1e-15);
}
