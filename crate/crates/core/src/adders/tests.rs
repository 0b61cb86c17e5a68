use super::*;
use crate::simcore::{run_pure, QuantumState, SparseState};

fn run_classical(adder: &Adder, a: u64, b: u64) -> (u64, u64) {
    let mut s =
        SparseState::<f64>::basis(adder.layout.width, adder.input_index(a, b).unwrap()).unwrap();
    for g in adder.circuit.gates() {
        s.apply_gate_mut(g).unwrap();
    }
    assert_eq!(s.support(), 1);
    let idx = s.entries()[0].0;
    let bits = Bits(
        adder
            .layout
            .output
            .iter()
            .map(|&q| (idx >> q) & 1 == 1)
            .collect(),
    );
    (adder.decode_output(&bits).unwrap(), idx)
}

fn exhaustive(adder: &Adder) {
    let max = adder.spec.max_operand();
    for a in 0..=max {
        for b in 0..=max {
            let (out, idx) = run_classical(adder, a, b);
            assert_eq!(out, adder.spec.oracle(a, b), "{} a={a} b={b}", adder.spec);
            for (i, &q) in adder.layout.a.iter().enumerate() {
                assert_eq!(
                    (idx >> q) & 1,
                    (a >> i) & 1,
                    "{} a not restored",
                    adder.spec
                );
            }
            for &q in &adder.layout.ancillas {
                if !adder.layout.output.contains(&q) {
                    assert_eq!(
                        (idx >> q) & 1,
                        0,
                        "{} ancilla {q} dirty for a={a} b={b}",
                        adder.spec
                    );
                }
            }
        }
    }
}

#[test]
fn qfa_exhaustive_small() {
    for n in 2..=7 {
        exhaustive(&build_qfa(n).unwrap());
    }
}

#[test]
fn qma_exhaustive() {
    for (k, fam) in [
        (2, Family::Pow),
        (3, Family::PowMinusOne),
        (3, Family::PowPlusOne),
        (4, Family::Pow),
        (5, Family::PowPlusOne),
        (6, Family::General),
        (7, Family::PowMinusOne),
        (8, Family::Pow),
        (9, Family::PowPlusOne),
        (11, Family::General),
        (15, Family::PowMinusOne),
        (16, Family::Pow),
        (17, Family::PowPlusOne),
    ] {
        exhaustive(&build_qma(k, fam).unwrap());
    }
}

#[test]
fn qfa_two_bit_output_on_dense_state() {
    let adder = build_qfa(2).unwrap();
    assert_eq!(adder.layout.width, 3);
    for a in 0..2 {
        for b in 0..2 {
            let out = run_pure(&adder.circuit, &adder.encode_inputs::<f64>(a, b).unwrap()).unwrap();
            let probs = out.marginal(&adder.layout.output);
            assert!((probs[(a + b) as usize] - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn qfa_resources_match_closed_forms() {
    for n in 2..=12u32 {
        let r = resources(&build_qfa(n).unwrap().circuit);
        let n = n as usize;
        assert_eq!(r.qubits, 2 * n - 1, "qubits n={n}");
        assert_eq!(r.toffoli_depth, 2 * n - 3, "toffoli depth n={n}");
        if n >= 3 {
            assert_eq!(r.cnot_depth, 3 * n - 5, "cnot depth n={n}");
        }
        assert!(r.toffoli_depth <= r.toffoli_count && r.cnot_depth <= r.cnot_count);
    }
}

#[test]
fn qma_mod4_construction() {
    let adder = build_qma(4, Family::Pow).unwrap();
    assert_eq!(
        adder.circuit.gates(),
        &[Gate::toffoli(2, 0, 3), Gate::cnot(0, 2), Gate::cnot(1, 3)]
    );
    let r = resources(&adder.circuit);
    assert_eq!((r.qubits, r.toffoli_count, r.cnot_count), (4, 1, 2));
}

#[test]
fn qma_mod8_counts() {
    let r = resources(&build_qma(8, Family::Pow).unwrap().circuit);
    assert_eq!((r.qubits, r.toffoli_count, r.cnot_count), (6, 3, 6));
}

#[test]
fn resources_disjoint_cnots_share_a_layer() {
    let c = Circuit::from_gates(4, "pair", vec![Gate::cnot(0, 1), Gate::cnot(2, 3)]).unwrap();
    let r = resources(&c);
    assert_eq!((r.cnot_depth, r.cnot_count), (1, 2));
}

#[test]
fn encode_and_decode() {
    let qfa = build_qfa(6).unwrap();
    assert_eq!(qfa.input_index(0, 0).unwrap(), 0);
    let idx = qfa.input_index(31, 31).unwrap();
    assert_eq!(idx, (1 << 10) - 1);
    assert!(qfa.input_index(32, 0).is_err());
    assert_eq!(qfa.decode_output(&"000000".parse().unwrap()).unwrap(), 0);
    assert!(qfa.decode_output(&"00000".parse().unwrap()).is_err());
    let (out, _) = run_classical(&qfa, 31, 31);
    assert_eq!(out, 62);

    let q9 = build_qma(9, Family::PowPlusOne).unwrap();
    let idx = q9.input_index(0, 8).unwrap();
    let b_bits: String = q9
        .layout
        .b
        .iter()
        .map(|&q| if (idx >> q) & 1 == 1 { '1' } else { '0' })
        .collect();
    assert_eq!(b_bits, "0001");
    assert_eq!(q9.layout.output.len(), 4);
    assert_eq!(
        build_qma(7, Family::PowMinusOne)
            .unwrap()
            .layout
            .output
            .len(),
        3
    );
    assert!(q9.input_index(9, 0).is_err());
}

#[test]
fn qma_mod5_example() {
    let adder = build_qma(5, Family::PowPlusOne).unwrap();
    assert_eq!(run_classical(&adder, 3, 4).0, 2);
}

#[test]
fn spec_validation_and_parsing() {
    assert!(AdderSpec::qfa(1).is_err());
    assert!(AdderSpec::qfa(13).is_err());
    assert!(AdderSpec::qma(7, Family::PowPlusOne).is_err());
    assert!(AdderSpec::qma(6, Family::Pow).is_err());
    assert_eq!(
        "qfa:6".parse::<AdderSpec>().unwrap(),
        AdderSpec::Qfa { output_bits: 6 }
    );
    assert_eq!(
        "qma:9".parse::<AdderSpec>().unwrap(),
        AdderSpec::Qma {
            modulus: 9,
            family: Family::PowPlusOne
        }
    );
    assert_eq!(
        "qma:3:2^n-1".parse::<AdderSpec>().unwrap(),
        AdderSpec::Qma {
            modulus: 3,
            family: Family::PowMinusOne
        }
    );
    assert!("qfx:3".parse::<AdderSpec>().is_err());
    assert_eq!(Family::infer(4, Family::PowPlusOne), Family::Pow);
    assert_eq!(Family::infer(7, Family::PowPlusOne), Family::PowMinusOne);
    assert_eq!(Family::infer(3, Family::PowMinusOne), Family::PowMinusOne);
}

#[test]
fn qma_ledger_covers_table() {
    let ledger = qma_ledger().unwrap();
    assert_eq!(ledger.len(), 7);
    for e in &ledger {
        let exact = e.achieved.qubits == e.published.qubits
            && e.achieved.toffoli_count == e.published.toffoli_count
            && e.achieved.cnot_count == e.published.cnot_count
            && e.achieved.toffoli_depth == e.published.toffoli_depth
            && e.achieved.cnot_depth == e.published.cnot_depth;
        assert_eq!(e.matches, exact, "{}", e.label);
        assert_eq!(e.deltas.is_empty(), exact, "{}", e.label);
    }
    let m4 = ledger.iter().find(|e| e.label == "qma:4:2^n").unwrap();
    assert_eq!((m4.achieved.toffoli_count, m4.achieved.cnot_count), (1, 2));
    let m8 = ledger.iter().find(|e| e.label == "qma:8:2^n").unwrap();
    assert_eq!(
        (
            m8.achieved.qubits,
            m8.achieved.toffoli_count,
            m8.achieved.cnot_count
        ),
        (6, 3, 6)
    );
}
