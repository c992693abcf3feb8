use std::f64::consts::PI;

use globalgate::circuit::{parse, serialize};
use globalgate::gates::{gate_matrix, phase_matrix, pulse_matrix};
use globalgate::synth::{build_ansatz, CouplerKind, CouplerModel};
use globalgate::tensor::{embed, kron, phase_aligned_distance, raw_distance};
use globalgate::{Circuit, ComplexMatrix, GateOp, C64};
use proptest::prelude::*;

fn single(a: f64, b: f64, c: f64) -> ComplexMatrix {
    &(&phase_matrix(a) * &pulse_matrix(b)) * &phase_matrix(c)
}

fn angle() -> impl Strategy<Value = f64> {
    -2.0 * PI..2.0 * PI
}

fn op(n: usize) -> impl Strategy<Value = GateOp> {
    let q = 0..n;
    prop_oneof![
        (q.clone(), angle()).prop_map(|(q, t)| GateOp::pulse(q, t)),
        (q.clone(), angle()).prop_map(|(q, t)| GateOp::phase(q, t)),
        q.clone().prop_map(GateOp::hadamard),
        q.clone().prop_map(GateOp::t),
        (q.clone(), 1..n).prop_map(move |(a, d)| GateOp::cnot(a, (a + d) % n)),
        (q, 1..n, angle()).prop_map(move |(a, d, t)| GateOp::pair_zz(a, (a + d) % n, t)),
        angle().prop_map(|t| GateOp::global_g([0, 1, 2], t)),
    ]
}

fn circuit() -> impl Strategy<Value = Circuit> {
    prop::collection::vec(op(3), 0..12).prop_map(|ops| Circuit::from_ops(3, ops).expect("valid ops"))
}

proptest! {
    #[test]
    fn kron_is_associative(x in prop::array::uniform9(angle())) {
        let a = single(x[0], x[1], x[2]);
        let b = single(x[3], x[4], x[5]);
        let c = single(x[6], x[7], x[8]);
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert!(left.max_abs_diff(&right).unwrap() < 1e-15);
    }

    #[test]
    fn embedding_keeps_unitarity(x in prop::array::uniform6(angle()), n in 2usize..=4, q0 in 0usize..4, d in 1usize..4) {
        let q0 = q0 % n;
        let q1 = (q0 + 1 + d % (n - 1)) % n;
        let zz = gate_matrix(&GateOp::pair_zz(0, 1, x[5]), 2).unwrap();
        let g = &kron(&single(x[0], x[1], x[2]), &single(x[3], x[4], 0.3)) * &zz;
        let e = embed(&g, &[q0, q1], n).unwrap();
        prop_assert!(e.is_unitary(1e-12));
    }

    #[test]
    fn aligned_distance_never_exceeds_raw(a in circuit(), b in circuit()) {
        let (u, v) = (a.evaluate().unwrap(), b.evaluate().unwrap());
        prop_assert!(phase_aligned_distance(&u, &v).unwrap() <= raw_distance(&u, &v).unwrap() + 1e-12);
    }

    #[test]
    fn global_phase_is_invisible(c in circuit(), alpha in angle()) {
        let u = c.evaluate().unwrap();
        let w = u.scale(C64::from_polar(1.0, alpha));
        prop_assert!(phase_aligned_distance(&u, &w).unwrap() < 1e-12);
    }

    #[test]
    fn ansatz_angles_are_periodic(seed in prop::collection::vec(angle(), 24), k in 0usize..24) {
        let a = build_ansatz(&CouplerModel::standard(CouplerKind::GlobalG).unwrap(), 3, false, None).unwrap();
        let l = a.layout;
        let mut shifted = seed.clone();
        // pulses repeat after 2π, phases and entanglers after π, up to sign
        shifted[k] += if l.is_entangler(k) || l.is_phase(k) { PI } else { 2.0 * PI };
        let u = a.template.evaluate(&seed).unwrap();
        let v = a.template.evaluate(&shifted).unwrap();
        prop_assert!(phase_aligned_distance(&u, &v).unwrap() < 1e-12);
    }

    #[test]
    fn serialization_round_trips(c in circuit()) {
        let back = parse(&serialize(&c)).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.evaluate().unwrap(), c.evaluate().unwrap());
    }
}
