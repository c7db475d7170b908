use std::f64::consts::TAU;

use num_complex::Complex64;
use proptest::prelude::*;
use qsvm_core::sim::{fidelity, subsystem_purity, Angle, Circuit, DensityMatrix, GateKind, GateOp, Statevector};

fn state(n: usize) -> impl Strategy<Value = Statevector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n).prop_filter_map("nonzero", |v| {
        Statevector::normalized(v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect()).ok()
    })
}

fn gate(n: usize) -> impl Strategy<Value = GateOp> {
    (prop::sample::select(GateKind::ALL.to_vec()), 0..n, 1..n, 0.0..TAU).prop_map(move |(kind, a, shift, theta)| {
        let targets = if kind.arity() == 1 { vec![a] } else { vec![a, (a + shift) % n] };
        let angle = kind.is_parametric().then_some(Angle::Fixed(theta));
        GateOp::new(kind, &targets, angle)
    })
}

/// Dense matrix of a single gate on `n` qubits, column k = gate |k⟩.
fn dense(op: &GateOp, n: usize) -> Vec<Vec<Complex64>> {
    (0..1usize << n)
        .map(|k| {
            let mut s = Statevector::basis(n, k);
            s.apply_gate(op, &[]);
            s.amplitudes().to_vec()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn every_gate_is_unitary(op in gate(3)) {
        let cols = dense(&op, 3);
        for (i, a) in cols.iter().enumerate() {
            for (j, b) in cols.iter().enumerate() {
                let ip: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                prop_assert!((ip - expected).norm() < 1e-10, "{op}: <{i}|{j}> = {ip}");
            }
        }
    }

    #[test]
    fn long_circuits_preserve_norm(ops in prop::collection::vec(gate(4), 1..=100), s in state(4)) {
        let c = Circuit::new(4, ops).unwrap();
        let out = c.apply(&[], &s).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fidelity_symmetric_and_phase_blind(a in state(2), b in state(2), phi in 0.0..TAU, psi in 0.0..TAU) {
        let f = fidelity(&a, &b).unwrap();
        prop_assert!((f - fidelity(&b, &a).unwrap()).abs() < 1e-14);
        let g = fidelity(&a.clone().with_global_phase(phi), &b.clone().with_global_phase(psi)).unwrap();
        prop_assert!((f - g).abs() < 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
    }

    #[test]
    fn purity_equals_complement_purity(s in state(3), mask in 1usize..7) {
        let keep: Vec<usize> = (0..3).filter(|q| mask >> q & 1 == 1).collect();
        let rest: Vec<usize> = (0..3).filter(|q| mask >> q & 1 == 0).collect();
        let p = subsystem_purity(&s, &keep).unwrap();
        prop_assert!((p - subsystem_purity(&s, &rest).unwrap()).abs() < 1e-12);
        prop_assert!(p >= 1.0 / (1 << keep.len()) as f64 - 1e-12 && p <= 1.0 + 1e-12);
    }

    #[test]
    fn purity_agrees_with_density_matrix(s in state(3), q in 0usize..3) {
        let rho = DensityMatrix::from_pure(&s).partial_trace(&[q]).unwrap();
        prop_assert!((rho.purity() - subsystem_purity(&s, &[q]).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn fig6_purity_matches_dense_oracle() {
    let c = Circuit::builder(2).param(GateKind::RX, &[0]).param(GateKind::CRY, &[0, 1]).build().unwrap();
    let s = c.run(&[std::f64::consts::FRAC_PI_3, std::f64::consts::FRAC_PI_2]).unwrap();
    // ρ = |ψ⟩⟨ψ|, trace out qubit 0 by hand.
    let a = s.amplitudes();
    let mut r = [[Complex64::new(0.0, 0.0); 2]; 2];
    for q1 in 0..2 {
        for q1p in 0..2 {
            for q0 in 0..2 {
                r[q1][q1p] += a[q0 | q1 << 1] * a[q0 | q1p << 1].conj();
            }
        }
    }
    let purity: f64 = r.iter().flatten().map(|z| z.norm_sqr()).sum();
    assert!((subsystem_purity(&s, &[1]).unwrap() - purity).abs() < 1e-12);
}

#[test]
fn rotation_fidelity_closed_form() {
    let c = Circuit::builder(1).param(GateKind::RY, &[0]).build().unwrap();
    let s = c.run(&[0.7]).unwrap();
    let f = fidelity(&Statevector::zero(1), &s).unwrap();
    assert!((f - (0.35f64).cos().powi(2)).abs() < 1e-14);
}
