use super::{build_qma, Family};
use crate::error::Result;
use serde::{Deserialize, Serialize};

use crate::simcore::{Circuit, GateKind};

/// Gate counts and per-family depths of a circuit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub label: String,
    pub qubits: usize,
    pub toffoli_count: usize,
    pub cnot_count: usize,
    pub toffoli_depth: usize,
    pub cnot_depth: usize,
}

impl ResourceReport {
    pub const CSV_HEADER: &'static str =
        "label,qubits,toffoli_count,cnot_count,toffoli_depth,cnot_depth";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.label,
            self.qubits,
            self.toffoli_count,
            self.cnot_count,
            self.toffoli_depth,
            self.cnot_depth
        )
    }
}

/// Family depth is the number of ASAP layers holding at least one gate of
/// that family.
pub fn resources(circuit: &Circuit) -> ResourceReport {
    let layers = circuit.asap_layers();
    let gates = circuit.gates();
    let depth_of = |kind: GateKind| {
        layers
            .iter()
            .filter(|layer| layer.iter().any(|&g| gates[g].kind == kind))
            .count()
    };
    ResourceReport {
        label: circuit.label.clone(),
        qubits: circuit.width,
        toffoli_count: circuit.count(GateKind::Toffoli),
        cnot_count: circuit.count(GateKind::Cnot),
        toffoli_depth: depth_of(GateKind::Toffoli),
        cnot_depth: depth_of(GateKind::Cnot),
    }
}

/// Published resource figures for one modulo adder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublishedResources {
    pub modulus: u64,
    pub family: Family,
    pub qubits: usize,
    pub toffoli_depth: usize,
    pub cnot_depth: usize,
    pub toffoli_count: usize,
    pub cnot_count: usize,
}

const fn row(
    modulus: u64,
    family: Family,
    qubits: usize,
    toffoli_depth: usize,
    cnot_depth: usize,
    toffoli_count: usize,
    cnot_count: usize,
) -> PublishedResources {
    PublishedResources {
        modulus,
        family,
        qubits,
        toffoli_depth,
        cnot_depth,
        toffoli_count,
        cnot_count,
    }
}

pub const PUBLISHED_QMA: [PublishedResources; 7] = [
    row(3, Family::PowMinusOne, 7, 6, 7, 8, 8),
    row(3, Family::PowPlusOne, 8, 4, 2, 5, 2),
    row(4, Family::Pow, 4, 1, 1, 1, 2),
    row(5, Family::PowPlusOne, 11, 6, 5, 8, 7),
    row(7, Family::PowMinusOne, 10, 12, 10, 14, 12),
    row(8, Family::Pow, 6, 3, 4, 3, 6),
    row(9, Family::PowPlusOne, 14, 9, 7, 11, 13),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub label: String,
    pub published: PublishedResources,
    pub achieved: ResourceReport,
    pub matches: bool,
    /// `metric: achieved - published`, one per differing metric.
    pub deltas: Vec<String>,
}

/// Compares every published modulo adder with the circuit built here.
pub fn qma_ledger() -> Result<Vec<LedgerEntry>> {
    PUBLISHED_QMA
        .iter()
        .map(|p| {
            let adder = build_qma(p.modulus, p.family)?;
            let achieved = resources(&adder.circuit);
            let pairs = [
                ("qubits", achieved.qubits, p.qubits),
                ("toffoli_count", achieved.toffoli_count, p.toffoli_count),
                ("cnot_count", achieved.cnot_count, p.cnot_count),
                ("toffoli_depth", achieved.toffoli_depth, p.toffoli_depth),
                ("cnot_depth", achieved.cnot_depth, p.cnot_depth),
            ];
            let deltas: Vec<String> = pairs
                .iter()
                .filter(|(_, a, b)| a != b)
                .map(|(name, a, b)| format!("{name}: {:+}", *a as i64 - *b as i64))
                .collect();
            Ok(LedgerEntry {
                label: adder.spec.label(),
                published: *p,
                matches: deltas.is_empty(),
                deltas,
                achieved,
            })
        })
        .collect()
}
