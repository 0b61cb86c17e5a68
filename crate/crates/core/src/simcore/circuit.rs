use serde::{Deserialize, Serialize};

use super::gate::{Gate, GateKind};
use crate::error::{Error, Result};

/// Ordered gate list over `width` indexed qubits.
///
/// `layers`, when set, partitions gate indices into time slices. It is only
/// used for scheduling; simulation always follows gate order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub width: usize,
    pub label: String,
    gates: Vec<Gate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    layers: Option<Vec<Vec<usize>>>,
}

impl Circuit {
    pub fn new(width: usize, label: impl Into<String>) -> Self {
        Circuit {
            width,
            label: label.into(),
            gates: Vec::new(),
            layers: None,
        }
    }

    pub fn from_gates(width: usize, label: impl Into<String>, gates: Vec<Gate>) -> Result<Self> {
        let mut circuit = Circuit::new(width, label);
        for gate in gates {
            circuit.push(gate)?;
        }
        Ok(circuit)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.width)?;
        self.gates.push(gate);
        self.layers = None;
        Ok(())
    }

    /// Pushes a gate produced by an internal builder.
    pub(crate) fn add(&mut self, gate: Gate) {
        self.push(gate).expect("builder produced an invalid gate");
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn has_measure(&self) -> bool {
        self.gates.iter().any(|g| g.kind == GateKind::Measure)
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind == kind).count()
    }

    pub fn layers(&self) -> Option<&[Vec<usize>]> {
        self.layers.as_deref()
    }

    /// Installs an explicit layer partition after checking it.
    pub fn set_layers(&mut self, layers: Vec<Vec<usize>>) -> Result<()> {
        self.check_layers(&layers)?;
        self.layers = Some(layers);
        Ok(())
    }

    fn check_layers(&self, layers: &[Vec<usize>]) -> Result<()> {
        let mut seen = vec![false; self.gates.len()];
        for layer in layers {
            let mut busy = vec![false; self.width];
            for &g in layer {
                let gate = self.gates.get(g).ok_or_else(|| {
                    Error::param(format!("layer references gate {g} of {}", self.gates.len()))
                })?;
                if std::mem::replace(&mut seen[g], true) {
                    return Err(Error::param(format!("gate {g} appears in two layers")));
                }
                for &q in &gate.operands {
                    if std::mem::replace(&mut busy[q], true) {
                        return Err(Error::param(format!("qubit {q} used twice in one layer")));
                    }
                }
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::param(format!("gate {missing} is not in any layer")));
        }
        Ok(())
    }

    /// As-soon-as-possible layering: each gate lands one layer after the
    /// latest earlier gate sharing a qubit with it.
    pub fn asap_layers(&self) -> Vec<Vec<usize>> {
        let mut frontier = vec![0usize; self.width];
        let mut layers: Vec<Vec<usize>> = Vec::new();
        for (i, gate) in self.gates.iter().enumerate() {
            let layer = gate
                .operands
                .iter()
                .map(|&q| frontier[q])
                .max()
                .unwrap_or(0);
            for &q in &gate.operands {
                frontier[q] = layer + 1;
            }
            if layers.len() <= layer {
                layers.resize_with(layer + 1, Vec::new);
            }
            layers[layer].push(i);
        }
        layers
    }

    /// Explicit layers if present, otherwise the ASAP layering.
    pub fn schedule(&self) -> Vec<Vec<usize>> {
        match &self.layers {
            Some(l) => l.clone(),
            None => self.asap_layers(),
        }
    }

    pub fn depth(&self) -> usize {
        self.schedule().len()
    }

    /// Concatenates `other` (same width) after this circuit.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.width != self.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                got: other.width,
            });
        }
        self.gates.extend(other.gates.iter().cloned());
        self.layers = None;
        Ok(())
    }

    /// Circuit of width `width` with every qubit `q` sent to `map[q]`.
    pub fn embedded(&self, width: usize, map: &[usize]) -> Result<Circuit> {
        if map.len() != self.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                got: map.len(),
            });
        }
        let mut out = Circuit::new(width, self.label.clone());
        for gate in &self.gates {
            out.push(gate.remapped(|q| map[q]))?;
        }
        if let Some(layers) = &self.layers {
            out.layers = Some(layers.clone());
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_rejects_out_of_range_and_duplicates() {
        let mut c = Circuit::new(2, "t");
        assert!(matches!(
            c.push(Gate::x(2)),
            Err(Error::OperandOutOfRange { qubit: 2, width: 2 })
        ));
        let dup = Gate::new(GateKind::Cnot, vec![1, 1]);
        assert!(matches!(dup, Err(Error::DuplicateOperand(1))));
        assert!(matches!(
            Gate::new(GateKind::Toffoli, vec![0, 1]),
            Err(Error::Arity {
                expected: 3,
                got: 2,
                ..
            })
        ));
    }

    #[test]
    fn asap_merges_disjoint_gates() {
        let c = Circuit::from_gates(
            4,
            "t",
            vec![Gate::cnot(0, 1), Gate::cnot(2, 3), Gate::cnot(1, 2)],
        )
        .unwrap();
        assert_eq!(c.asap_layers(), vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn layer_partition_checked() {
        let mut c = Circuit::from_gates(2, "t", vec![Gate::x(0), Gate::x(1)]).unwrap();
        assert!(c.set_layers(vec![vec![0]]).is_err());
        assert!(c.set_layers(vec![vec![0, 0, 1]]).is_err());
        c.set_layers(vec![vec![0, 1]]).unwrap();
        assert_eq!(c.depth(), 1);
        let mut shared = Circuit::from_gates(2, "t", vec![Gate::x(0), Gate::h(0)]).unwrap();
        assert!(shared.set_layers(vec![vec![0, 1]]).is_err());
    }
}
