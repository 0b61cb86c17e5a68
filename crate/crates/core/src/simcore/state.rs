use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::gate::{Gate, GateKind};
use crate::error::{Error, Result};
use crate::scalar::{c, i_unit, Scalar};

/// Single-qubit Pauli operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_index(i: usize) -> Pauli {
        Self::ALL[i & 3]
    }

    /// True if the operator flips a computational basis bit.
    pub fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn label(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Measured bit values; index `i` holds the outcome of the `i`-th listed qubit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bits(pub Vec<bool>);

impl Bits {
    pub fn from_value(value: u64, width: usize) -> Self {
        Bits((0..width).map(|i| (value >> i) & 1 == 1).collect())
    }

    /// Little-endian integer value.
    pub fn value(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | ((b as u64) << i))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::param(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bits)
    }
}

/// 2x2 matrix `[m00, m01, m10, m11]` applied to a target qubit.
pub(crate) type Mat2<T> = [Complex<T>; 4];

pub(crate) fn gate_matrix<T: Scalar>(kind: GateKind) -> Mat2<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let i = i_unit::<T>();
    match kind {
        GateKind::X | GateKind::Cnot | GateKind::Toffoli => [zero, one, one, zero],
        GateKind::Y | GateKind::Cy => [zero, -i, i, zero],
        GateKind::Z | GateKind::Cz => [one, zero, zero, -one],
        GateKind::S => [one, zero, zero, i],
        GateKind::H => {
            let r = T::FRAC_1_SQRT_2();
            [
                c(r, T::zero()),
                c(r, T::zero()),
                c(r, T::zero()),
                c(-r, T::zero()),
            ]
        }
        GateKind::Measure => unreachable!("measurement has no unitary"),
    }
}

pub(crate) fn pauli_kind(p: Pauli) -> Option<GateKind> {
    match p {
        Pauli::I => None,
        Pauli::X => Some(GateKind::X),
        Pauli::Y => Some(GateKind::Y),
        Pauli::Z => Some(GateKind::Z),
    }
}

pub(crate) fn control_mask(gate: &Gate) -> u64 {
    gate.controls().iter().fold(0u64, |m, &q| m | (1u64 << q))
}

/// Operations shared by the dense and sparse statevector backends.
pub trait QuantumState<T: Scalar>: Clone + Send {
    fn width(&self) -> usize;

    /// Applies a unitary gate in place. MEASURE is rejected.
    fn apply_gate_mut(&mut self, gate: &Gate) -> Result<()>;

    fn apply_pauli(&mut self, qubit: usize, pauli: Pauli);

    /// Applies `exp(-i angle/2 Z_a Z_b)`.
    fn apply_zz(&mut self, a: usize, b: usize, angle: T);

    /// Probability of reading `1` on `qubit`.
    fn prob_one(&self, qubit: usize) -> T;

    /// Projects onto `outcome` on `qubit` and renormalizes.
    fn collapse(&mut self, qubit: usize, outcome: bool);

    /// Born distribution over the joint outcomes of `qubits` (little-endian index).
    fn marginal(&self, qubits: &[usize]) -> Vec<T>;

    fn norm_sqr(&self) -> T;

    /// Projective single-qubit measurement driven by a uniform draw `u` in [0,1).
    fn measure(&mut self, qubit: usize, u: T) -> bool {
        let p1 = self.prob_one(qubit);
        let outcome = u < p1;
        self.collapse(qubit, outcome);
        outcome
    }
}

pub(crate) fn check_qubits(qubits: &[usize], width: usize) -> Result<()> {
    if qubits.is_empty() {
        return Err(Error::EmptyQubitList);
    }
    for (i, &q) in qubits.iter().enumerate() {
        if q >= width {
            return Err(Error::OperandOutOfRange { qubit: q, width });
        }
        if qubits[..i].contains(&q) {
            return Err(Error::DuplicateOperand(q));
        }
    }
    Ok(())
}

/// Draws one joint outcome of `qubits` from the Born distribution. The same
/// seed always gives the same outcome.
pub fn measure_sample<T: Scalar, S: QuantumState<T>>(
    state: &S,
    qubits: &[usize],
    rng_seed: u64,
) -> Result<Bits> {
    check_qubits(qubits, state.width())?;
    let probs = state.marginal(qubits);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let u: f64 = rng.random();
    Ok(Bits::from_value(
        sample_index(&probs, u) as u64,
        qubits.len(),
    ))
}

pub(crate) fn sample_index<T: Scalar>(probs: &[T], u: f64) -> usize {
    let total: f64 = probs.iter().map(|p| p.to_f64().unwrap_or(0.0)).sum();
    let target = u * total;
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (i, p) in probs.iter().enumerate() {
        let p = p.to_f64().unwrap_or(0.0);
        if p > 0.0 {
            last_nonzero = i;
        }
        acc += p;
        if target < acc {
            return i;
        }
    }
    last_nonzero
}
