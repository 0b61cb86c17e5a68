//! Sparse statevector for trajectory simulation.
//!
//! Stores only nonzero amplitudes. Circuits built from X/CNOT/Toffoli-style
//! gates keep a basis state a single entry, so a 20-qubit victim plus a few
//! superposed attack pairs costs a handful of entries instead of 2^20.

use std::collections::HashMap;

use num_complex::Complex;

use super::dense::StateVector;
use super::gate::{Gate, GateKind};
use super::state::{control_mask, gate_matrix, pauli_kind, Mat2, Pauli, QuantumState};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MAX_SPARSE_QUBITS: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct SparseState<T: Scalar> {
    width: usize,
    entries: Vec<(u64, Complex<T>)>,
}

impl<T: Scalar> SparseState<T> {
    pub fn basis(width: usize, index: u64) -> Result<Self> {
        if width > MAX_SPARSE_QUBITS {
            return Err(Error::TooManyQubits(width));
        }
        if width < 64 && index >> width != 0 {
            return Err(Error::OutOfRange {
                value: index,
                what: format!("basis index for {width} qubits"),
            });
        }
        Ok(SparseState {
            width,
            entries: vec![(index, Complex::new(T::one(), T::zero()))],
        })
    }

    pub fn from_dense(state: &StateVector<T>) -> Self {
        let entries = state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > T::zero())
            .map(|(i, a)| (i as u64, *a))
            .collect();
        SparseState {
            width: state.width(),
            entries,
        }
    }

    pub fn to_dense(&self) -> Result<StateVector<T>> {
        if self.width > super::MAX_DENSE_QUBITS {
            return Err(Error::TooManyQubits(self.width));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << self.width];
        for &(i, a) in &self.entries {
            amps[i as usize] = a;
        }
        Ok(StateVector::from_raw(self.width, amps))
    }

    /// Number of stored (nonzero) amplitudes.
    pub fn support(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(u64, Complex<T>)] {
        &self.entries
    }

    fn prune_threshold() -> T {
        T::epsilon() * T::epsilon()
    }

    fn apply_monomial(&mut self, ctrl: u64, target: usize, m: &Mat2<T>) {
        let tbit = 1u64 << target;
        let zero = Complex::new(T::zero(), T::zero());
        let diagonal = m[1] == zero && m[2] == zero;
        for (idx, amp) in &mut self.entries {
            if *idx & ctrl != ctrl {
                continue;
            }
            let one = *idx & tbit != 0;
            if diagonal {
                *amp *= if one { m[3] } else { m[0] };
            } else {
                // column `one` of the matrix has a single nonzero entry in the other row
                *amp *= if one { m[1] } else { m[2] };
                *idx ^= tbit;
            }
        }
    }

    fn apply_mixing(&mut self, ctrl: u64, target: usize, m: &Mat2<T>) {
        let tbit = 1u64 << target;
        let mut acc: HashMap<u64, Complex<T>> = HashMap::with_capacity(self.entries.len() * 2);
        let zero = Complex::new(T::zero(), T::zero());
        for &(idx, amp) in &self.entries {
            if idx & ctrl != ctrl {
                *acc.entry(idx).or_insert(zero) += amp;
                continue;
            }
            let i0 = idx & !tbit;
            let i1 = idx | tbit;
            let (c0, c1) = if idx & tbit == 0 {
                (m[0], m[2])
            } else {
                (m[1], m[3])
            };
            *acc.entry(i0).or_insert(zero) += c0 * amp;
            *acc.entry(i1).or_insert(zero) += c1 * amp;
        }
        let threshold = Self::prune_threshold();
        self.entries = acc
            .into_iter()
            .filter(|(_, a)| a.norm_sqr() > threshold)
            .collect();
        self.entries.sort_unstable_by_key(|e| e.0);
    }
}

impl<T: Scalar> QuantumState<T> for SparseState<T> {
    fn width(&self) -> usize {
        self.width
    }

    fn apply_gate_mut(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.width)?;
        let m = match gate.kind {
            GateKind::Measure => return Err(Error::MeasureInUnitary),
            kind => gate_matrix::<T>(kind),
        };
        if gate.kind.is_monomial() {
            self.apply_monomial(control_mask(gate), gate.target(), &m);
        } else {
            self.apply_mixing(control_mask(gate), gate.target(), &m);
        }
        Ok(())
    }

    fn apply_pauli(&mut self, qubit: usize, pauli: Pauli) {
        if let Some(kind) = pauli_kind(pauli) {
            self.apply_monomial(0, qubit, &gate_matrix::<T>(kind));
        }
    }

    fn apply_zz(&mut self, a: usize, b: usize, angle: T) {
        let half = angle / (T::one() + T::one());
        let even = Complex::from_polar(T::one(), -half);
        let odd = Complex::from_polar(T::one(), half);
        for (idx, amp) in &mut self.entries {
            let parity = ((*idx >> a) ^ (*idx >> b)) & 1;
            *amp *= if parity == 0 { even } else { odd };
        }
    }

    fn prob_one(&self, qubit: usize) -> T {
        self.entries
            .iter()
            .filter(|(i, _)| (i >> qubit) & 1 == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    fn collapse(&mut self, qubit: usize, outcome: bool) {
        self.entries
            .retain(|(i, _)| ((i >> qubit) & 1 == 1) == outcome);
        let kept: T = self.entries.iter().map(|(_, a)| a.norm_sqr()).sum();
        if kept > T::zero() {
            let scale = T::one() / kept.sqrt();
            for (_, a) in &mut self.entries {
                *a *= scale;
            }
        }
    }

    fn marginal(&self, qubits: &[usize]) -> Vec<T> {
        let mut probs = vec![T::zero(); 1 << qubits.len()];
        let mut sorted = self.entries.clone();
        sorted.sort_unstable_by_key(|e| e.0);
        for (i, amp) in sorted {
            let key = qubits
                .iter()
                .enumerate()
                .fold(0usize, |k, (j, &q)| k | ((((i >> q) & 1) as usize) << j));
            probs[key] += amp.norm_sqr();
        }
        probs
    }

    fn norm_sqr(&self) -> T {
        self.entries.iter().map(|(_, a)| a.norm_sqr()).sum()
    }
}
