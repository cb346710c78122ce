use std::f64::consts::PI;

use proptest::prelude::*;
use qcrypt_core::sim::{circuit_unitary, inverse_circuit, run_circuit, Circuit, GateKind, GateOp, StateVector};

fn gate_strategy(n: usize, kinds: Vec<GateKind>) -> impl Strategy<Value = GateOp> {
    let register: Vec<usize> = (0..n).collect();
    (prop::sample::select(kinds), Just(register).prop_shuffle(), -2.0 * PI..2.0 * PI)
        .prop_filter("arity fits", move |(k, _, _)| k.arity() <= n)
        .prop_map(|(kind, qs, angle)| GateOp {
            kind,
            qubits: qs[..kind.arity()].to_vec(),
            angle: (kind == GateKind::Rx).then_some(angle),
        })
}

fn circuit_strategy(max_qubits: usize, max_len: usize, kinds: Vec<GateKind>) -> impl Strategy<Value = Circuit> {
    (1..=max_qubits).prop_flat_map(move |n| {
        prop::collection::vec(gate_strategy(n, kinds.clone()), 0..=max_len)
            .prop_map(move |ops| Circuit::from_ops(n, ops).unwrap())
    })
}

fn all_kinds() -> Vec<GateKind> {
    vec![GateKind::X, GateKind::H, GateKind::Rx, GateKind::Cx, GateKind::Ccx, GateKind::Swap]
}

fn classical_kinds() -> Vec<GateKind> {
    vec![GateKind::X, GateKind::Cx, GateKind::Ccx, GateKind::Swap]
}

proptest! {
    #[test]
    fn norm_is_preserved(c in circuit_strategy(5, 100, all_kinds()), init in 0usize..32) {
        let s = run_circuit(&c, init % (1 << c.n_qubits())).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn unitary_is_unitary(c in circuit_strategy(5, 20, all_kinds())) {
        prop_assert!(circuit_unitary(&c).unwrap().unitarity_error() < 1e-10);
    }

    #[test]
    fn unitary_columns_agree_with_kernel(c in circuit_strategy(4, 15, all_kinds())) {
        let u = circuit_unitary(&c).unwrap();
        for col in 0..1usize << c.n_qubits() {
            let s = run_circuit(&c, col).unwrap();
            for (row, a) in s.amplitudes().iter().enumerate() {
                prop_assert!((u.get(row, col) - a).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn rx_pi_matches_x_on_probabilities(prep in circuit_strategy(4, 15, all_kinds()), q in 0usize..4) {
        let q = q % prep.n_qubits();
        let mut a = run_circuit(&prep, 0).unwrap();
        let mut b = a.clone();
        a.apply_gate(&GateOp::rx(q, PI)).unwrap();
        b.apply_gate(&GateOp::x(q)).unwrap();
        for (pa, pb) in a.probabilities().iter().zip(b.probabilities()) {
            prop_assert!((pa - pb).abs() < 1e-12);
        }
    }

    #[test]
    fn classical_gates_map_basis_to_basis(c in circuit_strategy(5, 30, classical_kinds()), init in 0usize..32) {
        let s = run_circuit(&c, init % (1 << c.n_qubits())).unwrap();
        let ones = s.amplitudes().iter().filter(|a| (a.norm() - 1.0).abs() < 1e-12).count();
        let zeros = s.amplitudes().iter().filter(|a| a.norm() == 0.0).count();
        prop_assert_eq!(ones, 1);
        prop_assert_eq!(zeros, s.amplitudes().len() - 1);
    }

    #[test]
    fn inverse_is_an_involution_on_self_inverse_lists(c in circuit_strategy(5, 30, classical_kinds())) {
        prop_assert_eq!(inverse_circuit(&inverse_circuit(&c)), c);
    }

    #[test]
    fn forward_then_inverse_returns_to_start(c in circuit_strategy(5, 20, all_kinds())) {
        let mut s = StateVector::new(c.n_qubits()).unwrap();
        s.apply_circuit(&c).unwrap();
        s.apply_circuit(&inverse_circuit(&c)).unwrap();
        let p = s.probabilities();
        prop_assert!((p[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn equal_seeds_sample_identically(c in circuit_strategy(4, 10, all_kinds()), seed in any::<u64>(), other in any::<u64>()) {
        let s = run_circuit(&c, 0).unwrap();
        prop_assert_eq!(s.sample(200, seed).unwrap(), s.sample(200, seed).unwrap());
        prop_assert_eq!(s.sample(200, other).unwrap().values().sum::<u64>(), 200);
    }
}
