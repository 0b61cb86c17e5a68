use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::circuit::Circuit;
use super::gate::{Gate, GateKind};
use super::state::{control_mask, gate_matrix, pauli_kind, Mat2, Pauli, QuantumState};
use super::MAX_DENSE_QUBITS;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense `2^width` amplitude vector. Qubit `q` is bit `q` of the basis index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar + Serialize + for<'a> Deserialize<'a>")]
pub struct StateVector<T: Scalar> {
    width: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Scalar> StateVector<T> {
    /// `|0...0>` on `width` qubits.
    pub fn zero(width: usize) -> Result<Self> {
        Self::basis(width, 0)
    }

    pub fn basis(width: usize, index: u64) -> Result<Self> {
        if width > MAX_DENSE_QUBITS {
            return Err(Error::TooManyQubits(width));
        }
        let dim = 1usize << width;
        if index as usize >= dim {
            return Err(Error::OutOfRange {
                value: index,
                what: format!("basis index for {width} qubits"),
            });
        }
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); dim];
        amplitudes[index as usize] = Complex::new(T::one(), T::zero());
        Ok(StateVector { width, amplitudes })
    }

    /// Basis state from a ket label; character `i` is qubit `i` (`"10"` sets qubit 0).
    pub fn from_ket(ket: &str) -> Result<Self> {
        let bits: super::Bits = ket.parse()?;
        Self::basis(bits.len(), bits.value())
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::param(format!(
                "amplitude count {dim} is not a power of two"
            )));
        }
        let width = dim.trailing_zeros() as usize;
        if width > MAX_DENSE_QUBITS {
            return Err(Error::TooManyQubits(width));
        }
        let state = StateVector { width, amplitudes };
        let norm = state.norm_sqr();
        if (norm - T::one()).abs() > T::norm_tolerance() {
            return Err(Error::NotNormalized(norm.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(state)
    }

    pub(crate) fn from_raw(width: usize, amplitudes: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << width);
        StateVector { width, amplitudes }
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: u64) -> Complex<T> {
        self.amplitudes[index as usize]
    }

    /// `self` on the low qubits, `high` on the qubits above.
    pub fn tensor(&self, high: &StateVector<T>) -> Result<Self> {
        let width = self.width + high.width;
        if width > MAX_DENSE_QUBITS {
            return Err(Error::TooManyQubits(width));
        }
        let mut amplitudes = Vec::with_capacity(1 << width);
        for h in &high.amplitudes {
            amplitudes.extend(self.amplitudes.iter().map(|l| l * h));
        }
        Ok(StateVector { width, amplitudes })
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector<T>) -> Result<Complex<T>> {
        if self.width != other.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                got: other.width,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .fold(Complex::new(T::zero(), T::zero()), |acc, x| acc + x))
    }

    /// Returns the gate applied to a copy of this state.
    pub fn apply_gate(&self, gate: &Gate) -> Result<Self> {
        let mut out = self.clone();
        out.apply_gate_mut(gate)?;
        Ok(out)
    }

    fn apply_controlled(&mut self, ctrl: u64, target: usize, m: &Mat2<T>) {
        let ctrl = ctrl as usize;
        let tbit = 1usize << target;
        let low = tbit - 1;
        for k in 0..self.amplitudes.len() / 2 {
            let i = ((k & !low) << 1) | (k & low);
            if i & ctrl != ctrl {
                continue;
            }
            let j = i | tbit;
            let (a, b) = (self.amplitudes[i], self.amplitudes[j]);
            self.amplitudes[i] = m[0] * a + m[1] * b;
            self.amplitudes[j] = m[2] * a + m[3] * b;
        }
    }
}

impl<T: Scalar> QuantumState<T> for StateVector<T> {
    fn width(&self) -> usize {
        self.width
    }

    fn apply_gate_mut(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.width)?;
        if gate.kind == GateKind::Measure {
            return Err(Error::MeasureInUnitary);
        }
        let m = gate_matrix::<T>(gate.kind);
        self.apply_controlled(control_mask(gate), gate.target(), &m);
        Ok(())
    }

    fn apply_pauli(&mut self, qubit: usize, pauli: Pauli) {
        if let Some(kind) = pauli_kind(pauli) {
            self.apply_controlled(0, qubit, &gate_matrix::<T>(kind));
        }
    }

    fn apply_zz(&mut self, a: usize, b: usize, angle: T) {
        let half = angle / (T::one() + T::one());
        let even = Complex::from_polar(T::one(), -half);
        let odd = Complex::from_polar(T::one(), half);
        for (i, amp) in self.amplitudes.iter_mut().enumerate() {
            let parity = ((i >> a) ^ (i >> b)) & 1;
            *amp *= if parity == 0 { even } else { odd };
        }
    }

    fn prob_one(&self, qubit: usize) -> T {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> qubit) & 1 == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    fn collapse(&mut self, qubit: usize, outcome: bool) {
        let mut kept = T::zero();
        for (i, amp) in self.amplitudes.iter_mut().enumerate() {
            if ((i >> qubit) & 1 == 1) != outcome {
                *amp = Complex::new(T::zero(), T::zero());
            } else {
                kept += amp.norm_sqr();
            }
        }
        if kept > T::zero() {
            let scale = T::one() / kept.sqrt();
            for amp in &mut self.amplitudes {
                *amp *= scale;
            }
        }
    }

    fn marginal(&self, qubits: &[usize]) -> Vec<T> {
        let mut probs = vec![T::zero(); 1 << qubits.len()];
        for (i, amp) in self.amplitudes.iter().enumerate() {
            let key = qubits
                .iter()
                .enumerate()
                .fold(0usize, |k, (j, &q)| k | (((i >> q) & 1) << j));
            probs[key] += amp.norm_sqr();
        }
        probs
    }

    fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Folds the circuit's gates over `initial`. Unitary circuits only.
pub fn run_pure<T: Scalar>(circuit: &Circuit, initial: &StateVector<T>) -> Result<StateVector<T>> {
    if circuit.width != initial.width {
        return Err(Error::WidthMismatch {
            expected: circuit.width,
            got: initial.width,
        });
    }
    if circuit.has_measure() {
        return Err(Error::MeasureInUnitary);
    }
    let mut state = initial.clone();
    for gate in circuit.gates() {
        state.apply_gate_mut(gate)?;
    }
    Ok(state)
}

/// True iff `|<a|b>| >= 1 - tol`.
pub fn states_equal_up_to_global_phase<T: Scalar>(
    a: &StateVector<T>,
    b: &StateVector<T>,
    tol: T,
) -> Result<bool> {
    Ok(fidelity_overlap(a, b)? >= T::one() - tol)
}

/// `|<a|b>|`, the global-phase-insensitive overlap.
pub fn fidelity_overlap<T: Scalar>(a: &StateVector<T>, b: &StateVector<T>) -> Result<T> {
    Ok(a.inner(b)?.norm())
}
