//! Basis-state frame for a tracked subset of qubits.
//!
//! When the tracked qubits start in a basis state, only see permutation
//! gates and Paulis, and couple to the rest of the device through diagonal
//! operations alone, they stay in a basis state and their readout
//! distribution does not depend on the other qubits. The frame follows
//! those bits exactly and ignores the untracked amplitudes.

use super::gate::{Gate, GateKind};
use super::state::{Pauli, QuantumState};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisFrame {
    width: usize,
    bits: u64,
    tracked: u64,
}

impl BasisFrame {
    pub fn new(width: usize, index: u64, tracked: &[usize]) -> Result<Self> {
        if width > 64 {
            return Err(Error::TooManyQubits(width));
        }
        let mut mask = 0u64;
        for &q in tracked {
            if q >= width {
                return Err(Error::OperandOutOfRange { qubit: q, width });
            }
            mask |= 1 << q;
        }
        Ok(BasisFrame {
            width,
            bits: index & mask,
            tracked: mask,
        })
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    fn is_tracked(&self, q: usize) -> bool {
        (self.tracked >> q) & 1 == 1
    }

    fn bit(&self, q: usize) -> bool {
        (self.bits >> q) & 1 == 1
    }
}

impl<T: Scalar> QuantumState<T> for BasisFrame {
    fn width(&self) -> usize {
        self.width
    }

    fn apply_gate_mut(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.width)?;
        let tracked = gate
            .operands
            .iter()
            .filter(|&&q| self.is_tracked(q))
            .count();
        if tracked == 0 {
            return Ok(());
        }
        let diagonal = matches!(gate.kind, GateKind::Z | GateKind::S | GateKind::Cz);
        if diagonal {
            return Ok(());
        }
        if tracked != gate.operands.len()
            || !gate.kind.is_monomial()
            || gate.kind == GateKind::Measure
        {
            return Err(Error::Unsupported(format!("{gate} on a basis frame")));
        }
        if gate.controls().iter().all(|&c| self.bit(c)) {
            self.bits ^= 1 << gate.target();
        }
        Ok(())
    }

    fn apply_pauli(&mut self, qubit: usize, pauli: Pauli) {
        if self.is_tracked(qubit) && pauli.flips() {
            self.bits ^= 1 << qubit;
        }
    }

    /// Diagonal: only a phase on the tracked bits.
    fn apply_zz(&mut self, _a: usize, _b: usize, _angle: T) {}

    /// Untracked qubits report 0.
    fn prob_one(&self, qubit: usize) -> T {
        if self.bit(qubit) {
            T::one()
        } else {
            T::zero()
        }
    }

    fn collapse(&mut self, _qubit: usize, _outcome: bool) {}

    fn marginal(&self, qubits: &[usize]) -> Vec<T> {
        let mut probs = vec![T::zero(); 1 << qubits.len()];
        let idx = qubits
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &q)| acc | ((self.bit(q) as usize) << i));
        probs[idx] = T::one();
        probs
    }

    fn norm_sqr(&self) -> T {
        T::one()
    }
}

impl BasisFrame {
    /// Whether every gate of `gates` keeps `tracked` in a basis state
    /// decoupled from the rest.
    pub fn supports(gates: &[Gate], tracked: &[usize]) -> bool {
        let is_tracked = |q: &usize| tracked.contains(q);
        gates.iter().all(|g| {
            let n = g.operands.iter().filter(|q| is_tracked(q)).count();
            n == 0
                || g.kind == GateKind::Measure
                || matches!(g.kind, GateKind::Z | GateKind::S | GateKind::Cz)
                || (n == g.operands.len() && g.kind.is_monomial())
        })
    }
}
