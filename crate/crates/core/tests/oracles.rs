//! Independent reference values checked against the library.

use std::f64::consts::PI;

use globalgate::catalog::{catalog_entry, unequal_j_couplings, TargetGate};
use globalgate::gates::{gate_matrix, phase_matrix, pulse_matrix};
use globalgate::ion::{closed_form_spin_block, dimensionless_couplings, equilibrium_positions, fock_simulate};
use globalgate::ion::{BichromaticParams, FockOptions, SpinBasis};
use globalgate::synth::{build_ansatz, objective, CouplerKind, CouplerModel, ObjectiveMode};
use globalgate::tensor::phase_aligned_distance;
use globalgate::ComplexMatrix;

#[test]
fn three_ion_equilibrium_is_symmetric() {
    // force balance on an outer ion: 1/a² + 1/(2a)² = a
    let a = 1.25f64.cbrt();
    let u = equilibrium_positions(3).unwrap();
    for (got, want) in u.iter().zip([-a, 0.0, a]) {
        assert!((got - want).abs() < 1e-12, "{u:?}");
    }
}

#[test]
fn three_ion_coupling_ratio_from_cofactors() {
    // Hessian of the three-ion chain at (-a, 0, a), 1/a³ = 4/5
    let (near, far) = (0.8f64, 0.1f64);
    let outer = 1.0 + 2.0 * (near + far);
    let middle = 1.0 + 4.0 * near;
    let h = [[outer, -2.0 * near, -2.0 * far], [-2.0 * near, middle, -2.0 * near], [-2.0 * far, -2.0 * near, outer]];
    // off-diagonal inverse entries via cofactors (common determinant cancels)
    let outer_middle = -(h[1][0] * h[2][2] - h[1][2] * h[2][0]);
    let outer_outer = h[1][0] * h[2][1] - h[1][1] * h[2][0];
    let ratio = outer_outer / outer_middle;
    assert!((ratio - 17.0 / 24.0).abs() < 1e-14);

    let j = dimensionless_couplings(3).unwrap();
    assert!((j.get(0, 2) / j.get(0, 1) - ratio).abs() < 1e-12);
    let relabelled = unequal_j_couplings().unwrap();
    assert!((relabelled.get(0, 1) - relabelled.get(0, 2)).abs() < 1e-12);
    assert!((relabelled.get(1, 2) / relabelled.get(0, 1) - 17.0 / 24.0).abs() < 1e-12);
}

/// `v ∝ Phase(a)·Pulse(t)·Phase(b)`.
fn zxz(v: &ComplexMatrix) -> (f64, f64, f64) {
    let t = 2.0 * v[(0, 1)].norm().atan2(v[(0, 0)].norm());
    let sum = if v[(0, 0)].norm() > 1e-9 { 0.5 * (v[(1, 1)].arg() - v[(0, 0)].arg()) } else { 0.0 };
    let dif = if v[(0, 1)].norm() > 1e-9 { 0.5 * (v[(1, 0)].arg() - v[(0, 1)].arg()) } else { 0.0 };
    for (ds, dd) in [(0.0, 0.0), (PI, 0.0), (0.0, PI), (PI, PI)] {
        let (s, d) = (sum + ds, dif + dd);
        let (a, b) = (0.5 * (s + d), 0.5 * (s - d));
        let m = &(&phase_matrix(a) * &pulse_matrix(t)) * &phase_matrix(b);
        if phase_aligned_distance(&m, v).unwrap() < 1e-10 {
            return (a, t, b);
        }
    }
    panic!("no decomposition");
}

#[test]
fn catalog_circuit_maps_into_the_ansatz() {
    // collect single-qubit products between entanglers, then rewrite each as
    // pulse-then-phase with the leading phase pushed into the previous layer
    let e = catalog_entry("ccphase-global-3G").unwrap();
    let n = 3;
    let mut segments = vec![vec![ComplexMatrix::identity(2); n]];
    let mut entanglers = Vec::new();
    for op in e.circuit.ops() {
        if op.kind.is_entangler() {
            entanglers.push(op.angle.unwrap());
            segments.push(vec![ComplexMatrix::identity(2); n]);
            continue;
        }
        let mut local = op.clone();
        let q = local.qubits[0];
        local.qubits = vec![0];
        let seg = segments.last_mut().unwrap();
        seg[q] = &gate_matrix(&local, 1).unwrap() * &seg[q];
    }
    let a = build_ansatz(&CouplerModel::standard(CouplerKind::GlobalG).unwrap(), entanglers.len(), false, None).unwrap();
    let l = a.layout;
    let mut x = vec![0.0; l.n_params()];
    let mut carry: Vec<Option<usize>> = vec![None; n];
    for (layer, seg) in segments.iter().enumerate() {
        for q in 0..n {
            let (ph, t, lead) = zxz(&seg[q]);
            match carry[q] {
                Some(slot) => x[slot] += lead,
                None => assert!(lead.abs() < 1e-12),
            }
            if layer < entanglers.len() {
                x[l.local_pulse(layer, q)] = t;
                x[l.local_phase(layer, q)] = ph;
                carry[q] = Some(l.local_phase(layer, q));
            } else {
                assert!(t.abs() < 1e-9);
                x[l.final_phase(q)] = ph;
            }
        }
        if layer < entanglers.len() {
            x[l.entangler(layer)] = entanglers[layer];
        }
    }
    let f = objective(&a.template, &x, &TargetGate::CCPhase.matrix(), ObjectiveMode::Aligned).unwrap();
    assert!(f < 1e-20, "{f}");
}

#[test]
fn fock_integration_error_is_fourth_order() {
    let p = BichromaticParams::new(0.1, 1.0, 2, SpinBasis::Z).unwrap().with_cutoff(16);
    let t = 2.0 * PI;
    let exact = closed_form_spin_block(&p, t, 0).unwrap();
    let err = |steps| {
        let r = fock_simulate(&p, t, 0, FockOptions { steps: Some(steps), max_norm_drift: 1e-3, ..FockOptions::default() }).unwrap();
        r.spin_block().max_abs_diff(&exact).unwrap()
    };
    let (coarse, fine) = (err(50), err(100));
    let order = (coarse / fine).log2();
    assert!((3.5..4.5).contains(&order), "observed order {order}, errors {coarse:.2e} {fine:.2e}");
}
