//! Published output probabilities, used to check metric formulas and the
//! aggregation rule without simulation.

use crate::adders::Family;

use super::AttackChoice;

/// Column order of every probability row below.
pub const ATTACK_COLUMNS: [AttackChoice; 5] = [
    AttackChoice::None,
    AttackChoice::Existing,
    AttackChoice::AltCnot,
    AttackChoice::Sac,
    AttackChoice::Apc,
];

pub struct FullAdderRow {
    pub output_bits: u32,
    pub npqa: [f64; 5],
    pub pqa: [f64; 5],
    pub improvement: [f64; 5],
}

pub const FULL_ADDER_TABLE: [FullAdderRow; 4] = [
    FullAdderRow {
        output_bits: 6,
        npqa: [0.833, 0.74, 0.713, 0.673, 0.653],
        pqa: [0.94, 0.92, 0.927, 0.927, 0.911],
        improvement: [12.8, 24.3, 30.0, 37.7, 39.5],
    },
    FullAdderRow {
        output_bits: 7,
        npqa: [0.653, 0.62, 0.567, 0.473, 0.44],
        pqa: [0.911, 0.878, 0.822, 0.811, 0.8],
        improvement: [39.5, 41.6, 45.0, 71.5, 81.8],
    },
    FullAdderRow {
        output_bits: 8,
        npqa: [0.616, 0.46, 0.382, 0.361, 0.356],
        pqa: [0.911, 0.878, 0.822, 0.811, 0.8],
        improvement: [47.9, 90.9, 115.2, 124.7, 124.7],
    },
    FullAdderRow {
        output_bits: 9,
        npqa: [0.5, 0.376, 0.386, 0.362, 0.345],
        pqa: [0.893, 0.878, 0.822, 0.811, 0.8],
        improvement: [78.6, 133.5, 113.0, 124.0, 131.9],
    },
];

pub struct ModuloAdderRow {
    pub modulus: u64,
    pub family: Family,
    pub probability: [f64; 5],
}

pub const MODULO_ADDER_TABLE: [ModuloAdderRow; 7] = [
    ModuloAdderRow {
        modulus: 3,
        family: Family::PowMinusOne,
        probability: [0.967, 0.94, 0.94, 0.927, 0.933],
    },
    ModuloAdderRow {
        modulus: 3,
        family: Family::PowPlusOne,
        probability: [0.978, 0.956, 0.944, 0.956, 0.956],
    },
    ModuloAdderRow {
        modulus: 4,
        family: Family::Pow,
        probability: [0.989, 0.989, 0.967, 0.978, 0.978],
    },
    ModuloAdderRow {
        modulus: 5,
        family: Family::PowPlusOne,
        probability: [0.94, 0.92, 0.927, 0.927, 0.911],
    },
    ModuloAdderRow {
        modulus: 7,
        family: Family::PowMinusOne,
        probability: [0.893, 0.887, 0.873, 0.867, 0.84],
    },
    ModuloAdderRow {
        modulus: 8,
        family: Family::Pow,
        probability: [0.978, 0.955, 0.944, 0.944, 0.922],
    },
    ModuloAdderRow {
        modulus: 9,
        family: Family::PowPlusOne,
        probability: [0.911, 0.878, 0.822, 0.811, 0.8],
    },
];

pub fn column(attack: AttackChoice) -> usize {
    ATTACK_COLUMNS
        .iter()
        .position(|&a| a == attack)
        .unwrap_or(0)
}

pub fn full_adder(output_bits: u32, attack: AttackChoice) -> Option<f64> {
    FULL_ADDER_TABLE
        .iter()
        .find(|r| r.output_bits == output_bits)
        .map(|r| r.npqa[column(attack)])
}

pub fn modulo_adder(modulus: u64, family: Family, attack: AttackChoice) -> Option<f64> {
    MODULO_ADDER_TABLE
        .iter()
        .find(|r| r.modulus == modulus && r.family == family)
        .map(|r| r.probability[column(attack)])
}
