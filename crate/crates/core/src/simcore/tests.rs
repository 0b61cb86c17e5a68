use num_complex::Complex;
use proptest::prelude::*;

use super::*;
use crate::error::Error;

type S = StateVector<f64>;

fn ket(s: &str) -> S {
    S::from_ket(s).unwrap()
}

fn bell() -> S {
    let c = Circuit::from_gates(2, "bell", vec![Gate::h(0), Gate::cnot(0, 1)]).unwrap();
    run_pure(&c, &ket("00")).unwrap()
}

#[test]
fn x_flips_zero() {
    let out = ket("0").apply_gate(&Gate::x(0)).unwrap();
    assert_eq!(out, ket("1"));
}

#[test]
fn cnot_controlled_flip() {
    let out = ket("10").apply_gate(&Gate::cnot(0, 1)).unwrap();
    assert_eq!(out, ket("11"));
}

#[test]
fn hadamard_is_involution() {
    let s = ket("0");
    let back = s
        .apply_gate(&Gate::h(0))
        .unwrap()
        .apply_gate(&Gate::h(0))
        .unwrap();
    assert!((back.amplitude(0) - Complex::new(1.0, 0.0)).norm() < 1e-12);
    assert!(back.amplitude(1).norm() < 1e-12);
}

#[test]
fn apply_gate_leaves_input_untouched() {
    let s = ket("0");
    let _ = s.apply_gate(&Gate::x(0)).unwrap();
    assert_eq!(s, ket("0"));
}

#[test]
fn apply_gate_errors() {
    let s = ket("00");
    assert!(matches!(
        s.apply_gate(&Gate::x(2)),
        Err(Error::OperandOutOfRange { qubit: 2, width: 2 })
    ));
    let dup = Gate {
        kind: GateKind::Cnot,
        operands: vec![0, 0],
    };
    assert!(matches!(
        s.apply_gate(&dup),
        Err(Error::DuplicateOperand(0))
    ));
}

#[test]
fn run_pure_identity_and_bell() {
    let s = ket("01");
    let empty = Circuit::new(2, "empty");
    assert_eq!(run_pure(&empty, &s).unwrap(), s);

    let b = bell();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    assert!((b.amplitude(0).re - r).abs() < 1e-12);
    assert!((b.amplitude(3).re - r).abs() < 1e-12);
    assert!(b.amplitude(1).norm() < 1e-12 && b.amplitude(2).norm() < 1e-12);
}

#[test]
fn run_pure_rejects_measure_and_width_mismatch() {
    let c = Circuit::from_gates(1, "m", vec![Gate::measure(0)]).unwrap();
    assert!(matches!(
        run_pure(&c, &ket("0")),
        Err(Error::MeasureInUnitary)
    ));
    let c2 = Circuit::new(2, "w");
    assert!(matches!(
        run_pure(&c2, &ket("0")),
        Err(Error::WidthMismatch { .. })
    ));
}

#[test]
fn measure_sample_deterministic_states() {
    assert_eq!(
        measure_sample(&ket("1"), &[0], 17).unwrap().to_string(),
        "1"
    );
    assert_eq!(
        measure_sample(&ket("10"), &[1], 3).unwrap().to_string(),
        "0"
    );
    assert!(matches!(
        measure_sample(&ket("10"), &[], 3),
        Err(Error::EmptyQubitList)
    ));
    let a = measure_sample(&bell(), &[0, 1], 99).unwrap();
    let b = measure_sample(&bell(), &[0, 1], 99).unwrap();
    assert_eq!(a, b);
}

#[test]
fn measure_sample_bell_frequencies() {
    let b = bell();
    let mut zeros = 0usize;
    let n = 10_000u64;
    for seed in 0..n {
        let out = measure_sample(&b, &[0, 1], seed).unwrap().to_string();
        assert!(out == "00" || out == "11", "impossible outcome {out}");
        if out == "00" {
            zeros += 1;
        }
    }
    let f = zeros as f64 / n as f64;
    assert!((f - 0.5).abs() < 0.03, "frequency {f}");
}

#[test]
fn born_frequencies_within_three_sigma() {
    // (|0> + i|1>)/sqrt2 (x) H X |0>, then CNOT: probabilities all 1/4
    let c = Circuit::from_gates(
        3,
        "mix",
        vec![
            Gate::h(0),
            Gate::s(0),
            Gate::x(1),
            Gate::h(1),
            Gate::cnot(1, 2),
            Gate::h(2),
        ],
    )
    .unwrap();
    let state = run_pure(&c, &ket("000")).unwrap();
    let exact = state.marginal(&[0, 2]);
    let n = 10_000;
    let mut counts = [0usize; 4];
    for seed in 0..n {
        counts[measure_sample(&state, &[0, 2], seed).unwrap().value() as usize] += 1;
    }
    for (k, &cnt) in counts.iter().enumerate() {
        let p = exact[k];
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        let f = cnt as f64 / n as f64;
        assert!(
            (f - p).abs() <= 3.0 * sigma + 1e-12,
            "outcome {k}: {f} vs {p}"
        );
    }
}

#[test]
fn global_phase_comparison() {
    let zero = ket("0");
    let theta: f64 = 1.234;
    let phased = S::from_amplitudes(vec![
        Complex::from_polar(1.0, theta),
        Complex::new(0.0, 0.0),
    ])
    .unwrap();
    assert!(states_equal_up_to_global_phase(&zero, &phased, 1e-12).unwrap());
    assert!(!states_equal_up_to_global_phase(&zero, &ket("1"), 1e-9).unwrap());
    assert!(matches!(
        states_equal_up_to_global_phase(&zero, &ket("00"), 1e-9),
        Err(Error::WidthMismatch { .. })
    ));
}

#[test]
fn entropy_examples() {
    assert!((entropy(&bell(), &[0]).unwrap() - 1.0).abs() < 1e-10);
    let product = run_pure(
        &Circuit::from_gates(2, "p", vec![Gate::h(0), Gate::s(0), Gate::h(1)]).unwrap(),
        &ket("00"),
    )
    .unwrap();
    assert!(entropy(&product, &[0]).unwrap().abs() < 1e-10);
    assert!(entropy(&bell(), &[]).unwrap() < 1e-12);
    assert!(matches!(
        entropy(&bell(), &[5]),
        Err(Error::OperandOutOfRange { .. })
    ));
}

#[test]
fn inverse_pairs_restore_state() {
    let base = run_pure(
        &Circuit::from_gates(
            3,
            "prep",
            vec![
                Gate::h(0),
                Gate::s(0),
                Gate::h(1),
                Gate::cnot(1, 2),
                Gate::y(2),
            ],
        )
        .unwrap(),
        &ket("000"),
    )
    .unwrap();
    let cases: Vec<Vec<Gate>> = vec![
        vec![Gate::x(0), Gate::x(0)],
        vec![Gate::y(1), Gate::y(1)],
        vec![Gate::h(2), Gate::h(2)],
        vec![Gate::cnot(0, 2), Gate::cnot(0, 2)],
        vec![Gate::cz(1, 0), Gate::cz(1, 0)],
        vec![Gate::cy(2, 1), Gate::cy(2, 1)],
        vec![Gate::toffoli(0, 1, 2), Gate::toffoli(0, 1, 2)],
        vec![Gate::s(1), Gate::s(1), Gate::s(1), Gate::s(1)],
    ];
    for gates in cases {
        let c = Circuit::from_gates(3, "inv", gates.clone()).unwrap();
        let out = run_pure(&c, &base).unwrap();
        let diff: f64 = out
            .amplitudes()
            .iter()
            .zip(base.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-12, "{gates:?} drift {diff}");
    }
}

#[test]
fn f32_backend_agrees_with_f64() {
    let c = Circuit::from_gates(2, "bell", vec![Gate::h(0), Gate::cnot(0, 1), Gate::s(1)]).unwrap();
    let s32 = run_pure(&c, &StateVector::<f32>::zero(2).unwrap()).unwrap();
    let s64 = run_pure(&c, &S::zero(2).unwrap()).unwrap();
    for (a, b) in s32.amplitudes().iter().zip(s64.amplitudes()) {
        assert!((a.re as f64 - b.re).abs() < 1e-6 && (a.im as f64 - b.im).abs() < 1e-6);
    }
}

fn arb_gate(width: usize) -> impl Strategy<Value = Gate> {
    let kinds = prop_oneof![
        Just(GateKind::X),
        Just(GateKind::Y),
        Just(GateKind::Z),
        Just(GateKind::H),
        Just(GateKind::S),
        Just(GateKind::Cnot),
        Just(GateKind::Cy),
        Just(GateKind::Cz),
        Just(GateKind::Toffoli),
    ];
    (
        kinds,
        Just(()).prop_perturb(move |_, mut rng| {
            let mut qs: Vec<usize> = (0..width).collect();
            for i in (1..qs.len()).rev() {
                let j = rng.random_range(0..=i);
                qs.swap(i, j);
            }
            qs
        }),
    )
        .prop_map(|(kind, qs)| Gate {
            kind,
            operands: qs[..kind.arity()].to_vec(),
        })
}

proptest! {
    #[test]
    fn norm_is_preserved(gates in prop::collection::vec(arb_gate(4), 0..40)) {
        let c = Circuit::from_gates(4, "rand", gates).unwrap();
        let out = run_pure(&c, &S::zero(4).unwrap()).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
        prop_assert!(entropy(&out, &[]).unwrap() < 1e-12);
    }

    #[test]
    fn sparse_matches_dense(gates in prop::collection::vec(arb_gate(4), 0..40), start in 0u64..16) {
        let mut dense = S::basis(4, start).unwrap();
        let mut sparse = SparseState::<f64>::basis(4, start).unwrap();
        for g in &gates {
            dense.apply_gate_mut(g).unwrap();
            sparse.apply_gate_mut(g).unwrap();
        }
        dense.apply_zz(0, 3, 0.3);
        sparse.apply_zz(0, 3, 0.3);
        dense.apply_pauli(1, Pauli::Y);
        sparse.apply_pauli(1, Pauli::Y);
        let back = sparse.to_dense().unwrap();
        for (a, b) in back.amplitudes().iter().zip(dense.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-10);
        }
        for q in 0..4 {
            prop_assert!((sparse.prob_one(q) - dense.prob_one(q)).abs() < 1e-10);
        }
    }

    #[test]
    fn entropy_complement_symmetry(gates in prop::collection::vec(arb_gate(4), 0..30), cut in 1usize..4) {
        let c = Circuit::from_gates(4, "rand", gates).unwrap();
        let out = run_pure(&c, &S::zero(4).unwrap()).unwrap();
        let a: Vec<usize> = (0..cut).collect();
        let b: Vec<usize> = (cut..4).collect();
        let ea = entropy(&out, &a).unwrap();
        let eb = entropy(&out, &b).unwrap();
        prop_assert!((ea - eb).abs() < 1e-10);
    }
}
