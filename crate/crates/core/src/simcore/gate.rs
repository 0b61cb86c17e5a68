use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    Cnot,
    Cy,
    Cz,
    Toffoli,
    Measure,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::X | GateKind::Y | GateKind::Z | GateKind::H | GateKind::S => 1,
            GateKind::Measure => 1,
            GateKind::Cnot | GateKind::Cy | GateKind::Cz => 2,
            GateKind::Toffoli => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::Cnot => "CNOT",
            GateKind::Cy => "CY",
            GateKind::Cz => "CZ",
            GateKind::Toffoli => "TOFFOLI",
            GateKind::Measure => "MEASURE",
        }
    }

    pub fn is_multi_qubit(self) -> bool {
        self.arity() > 1
    }

    /// Gates that map computational basis states to basis states (up to phase).
    pub fn is_monomial(self) -> bool {
        !matches!(self, GateKind::H | GateKind::Measure)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A gate with ordered operands: controls first, target last.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub operands: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, operands: impl Into<Vec<usize>>) -> Result<Self> {
        let gate = Gate {
            kind,
            operands: operands.into(),
        };
        gate.check_shape()?;
        Ok(gate)
    }

    pub fn x(q: usize) -> Self {
        Self::raw(GateKind::X, vec![q])
    }
    pub fn y(q: usize) -> Self {
        Self::raw(GateKind::Y, vec![q])
    }
    pub fn z(q: usize) -> Self {
        Self::raw(GateKind::Z, vec![q])
    }
    pub fn h(q: usize) -> Self {
        Self::raw(GateKind::H, vec![q])
    }
    pub fn s(q: usize) -> Self {
        Self::raw(GateKind::S, vec![q])
    }
    pub fn measure(q: usize) -> Self {
        Self::raw(GateKind::Measure, vec![q])
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Self::checked(GateKind::Cnot, vec![control, target])
    }
    pub fn cy(control: usize, target: usize) -> Self {
        Self::checked(GateKind::Cy, vec![control, target])
    }
    pub fn cz(control: usize, target: usize) -> Self {
        Self::checked(GateKind::Cz, vec![control, target])
    }
    pub fn toffoli(c0: usize, c1: usize, target: usize) -> Self {
        Self::checked(GateKind::Toffoli, vec![c0, c1, target])
    }

    fn raw(kind: GateKind, operands: Vec<usize>) -> Self {
        Gate { kind, operands }
    }

    // Builders in this crate only pass distinct literals; a clash is a bug.
    fn checked(kind: GateKind, operands: Vec<usize>) -> Self {
        let gate = Gate { kind, operands };
        if let Err(e) = gate.check_shape() {
            panic!("malformed {kind} gate: {e}");
        }
        gate
    }

    pub fn target(&self) -> usize {
        *self.operands.last().expect("gate has at least one operand")
    }

    pub fn controls(&self) -> &[usize] {
        &self.operands[..self.operands.len() - 1]
    }

    pub fn touches(&self, q: usize) -> bool {
        self.operands.contains(&q)
    }

    fn check_shape(&self) -> Result<()> {
        let expected = self.kind.arity();
        if self.operands.len() != expected {
            return Err(Error::Arity {
                kind: self.kind.name(),
                expected,
                got: self.operands.len(),
            });
        }
        for (i, &q) in self.operands.iter().enumerate() {
            if self.operands[..i].contains(&q) {
                return Err(Error::DuplicateOperand(q));
            }
        }
        Ok(())
    }

    /// Checks arity, distinctness and that every operand fits in `width`.
    pub fn validate(&self, width: usize) -> Result<()> {
        self.check_shape()?;
        match self.operands.iter().find(|&&q| q >= width) {
            Some(&qubit) => Err(Error::OperandOutOfRange { qubit, width }),
            None => Ok(()),
        }
    }

    /// Same gate with every operand sent through `map`.
    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> Gate {
        Gate {
            kind: self.kind,
            operands: self.operands.iter().map(|&q| map(q)).collect(),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.kind)?;
        for (i, q) in self.operands.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{q}")?;
        }
        f.write_str(")")
    }
}
