//! Victim circuits: ripple-carry full adders (monolithic addition) and
//! modulo-k adders (the residue channels of parallel addition).
//!
//! Registers are little-endian. Every builder returns a reversible gate list;
//! measurement is appended by the harness on the output register only.

mod blocks;
mod resources;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simcore::{Bits, Circuit, Gate, StateVector};
use crate::Scalar;

pub use resources::{
    qma_ledger, resources, LedgerEntry, PublishedResources, ResourceReport, PUBLISHED_QMA,
};

/// Which `2^n + delta` shape a modulus has.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "2^n-1")]
    PowMinusOne,
    #[serde(rename = "2^n")]
    Pow,
    #[serde(rename = "2^n+1")]
    PowPlusOne,
    /// Any other modulus; built with the generic compare-and-correct circuit.
    #[serde(rename = "general")]
    General,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::PowMinusOne => "2^n-1",
            Family::Pow => "2^n",
            Family::PowPlusOne => "2^n+1",
            Family::General => "general",
        }
    }

    /// Whether `k` has this family's shape.
    pub fn admits(self, k: u64) -> bool {
        match self {
            Family::Pow => k >= 2 && k.is_power_of_two(),
            Family::PowMinusOne => k >= 3 && (k + 1).is_power_of_two(),
            Family::PowPlusOne => k >= 3 && (k - 1).is_power_of_two(),
            Family::General => k >= 2,
        }
    }

    /// Family used when only the modulus is given. Moduli that are both
    /// `2^n-1` and `2^n+1` (only 3) resolve to `prefer_for_three`.
    pub fn infer(k: u64, prefer_for_three: Family) -> Family {
        if k == 3 {
            prefer_for_three
        } else if Family::Pow.admits(k) {
            Family::Pow
        } else if Family::PowMinusOne.admits(k) {
            Family::PowMinusOne
        } else if Family::PowPlusOne.admits(k) {
            Family::PowPlusOne
        } else {
            Family::General
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2^n-1" | "pow-1" | "minus" => Ok(Family::PowMinusOne),
            "2^n" | "pow" => Ok(Family::Pow),
            "2^n+1" | "pow+1" | "plus" => Ok(Family::PowPlusOne),
            "general" => Ok(Family::General),
            other => Err(Error::param(format!("unknown modulus family {other:?}"))),
        }
    }
}

pub const QFA_MIN_BITS: u32 = 2;
pub const QFA_MAX_BITS: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AdderSpec {
    /// Full adder with `output_bits`-bit result: two `(output_bits-1)`-bit operands.
    Qfa { output_bits: u32 },
    /// `(a + b) mod modulus` with operands in `[0, modulus)`.
    Qma { modulus: u64, family: Family },
}

impl AdderSpec {
    pub fn qfa(output_bits: u32) -> Result<Self> {
        if !(QFA_MIN_BITS..=QFA_MAX_BITS).contains(&output_bits) {
            return Err(Error::param(format!(
                "full adder output width {output_bits} outside [{QFA_MIN_BITS}, {QFA_MAX_BITS}]"
            )));
        }
        Ok(AdderSpec::Qfa { output_bits })
    }

    pub fn qma(modulus: u64, family: Family) -> Result<Self> {
        if modulus > 1 << 16 {
            return Err(Error::param(format!("modulus {modulus} too large")));
        }
        if !family.admits(modulus) {
            return Err(Error::param(format!(
                "modulus {modulus} is not of family {family}"
            )));
        }
        Ok(AdderSpec::Qma { modulus, family })
    }

    /// Width of each operand register.
    pub fn operand_bits(&self) -> usize {
        match *self {
            AdderSpec::Qfa { output_bits } => output_bits as usize - 1,
            AdderSpec::Qma { modulus, .. } => ceil_log2(modulus),
        }
    }

    pub fn output_bits(&self) -> usize {
        match *self {
            AdderSpec::Qfa { output_bits } => output_bits as usize,
            AdderSpec::Qma { .. } => self.operand_bits(),
        }
    }

    /// Largest allowed operand value.
    pub fn max_operand(&self) -> u64 {
        match *self {
            AdderSpec::Qfa { .. } => (1u64 << self.operand_bits()) - 1,
            AdderSpec::Qma { modulus, .. } => modulus - 1,
        }
    }

    /// Classical reference result.
    pub fn oracle(&self, a: u64, b: u64) -> u64 {
        match *self {
            AdderSpec::Qfa { .. } => a + b,
            AdderSpec::Qma { modulus, .. } => (a + b) % modulus,
        }
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for AdderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdderSpec::Qfa { output_bits } => write!(f, "qfa:{output_bits}"),
            AdderSpec::Qma { modulus, family } => write!(f, "qma:{modulus}:{family}"),
        }
    }
}

impl FromStr for AdderSpec {
    type Err = Error;

    /// `qfa:<output_bits>` or `qma:<modulus>[:<family>]`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| {
            t.parse::<u64>()
                .map_err(|_| Error::param(format!("bad number {t:?} in adder selector {s:?}")))
        };
        match parts.as_slice() {
            ["qfa", n] => AdderSpec::qfa(num(n)? as u32),
            ["qma", k] => {
                let k = num(k)?;
                AdderSpec::qma(k, Family::infer(k, Family::PowPlusOne))
            }
            ["qma", k, fam] => AdderSpec::qma(num(k)?, fam.parse()?),
            _ => Err(Error::param(format!(
                "adder selector {s:?} must be qfa:<bits> or qma:<modulus>[:<family>]"
            ))),
        }
    }
}

pub(crate) fn ceil_log2(k: u64) -> usize {
    (64 - (k - 1).leading_zeros()) as usize
}

/// Qubit roles of a built adder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub width: usize,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    /// Measured register, little-endian.
    pub output: Vec<usize>,
    pub ancillas: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Adder {
    pub spec: AdderSpec,
    pub circuit: Circuit,
    pub layout: Layout,
}

impl Adder {
    pub fn build(spec: AdderSpec) -> Result<Adder> {
        match spec {
            AdderSpec::Qfa { output_bits } => build_qfa(output_bits),
            AdderSpec::Qma { modulus, family } => build_qma(modulus, family),
        }
    }

    /// Basis index of the encoded inputs (work qubits zero).
    pub fn input_index(&self, a: u64, b: u64) -> Result<u64> {
        let max = self.spec.max_operand();
        for (name, v) in [("a", a), ("b", b)] {
            if v > max {
                return Err(Error::OutOfRange {
                    value: v,
                    what: format!("operand {name} of {} (max {max})", self.spec),
                });
            }
        }
        let mut index = 0u64;
        for (i, &q) in self.layout.a.iter().enumerate() {
            index |= ((a >> i) & 1) << q;
        }
        for (i, &q) in self.layout.b.iter().enumerate() {
            index |= ((b >> i) & 1) << q;
        }
        Ok(index)
    }

    pub fn encode_inputs<T: Scalar>(&self, a: u64, b: u64) -> Result<StateVector<T>> {
        StateVector::basis(self.layout.width, self.input_index(a, b)?)
    }

    pub fn decode_output(&self, bits: &Bits) -> Result<u64> {
        decode_output(&self.spec, bits)
    }
}

/// Little-endian value of the measured output register.
pub fn decode_output(spec: &AdderSpec, bits: &Bits) -> Result<u64> {
    if bits.len() != spec.output_bits() {
        return Err(Error::WidthMismatch {
            expected: spec.output_bits(),
            got: bits.len(),
        });
    }
    Ok(bits.value())
}

/// Ripple-carry full adder on `2n-1` qubits: A (n-1 bits), B (n-1 bits,
/// receives the low sum bits) and one carry qubit Z.
pub fn build_qfa(output_bits: u32) -> Result<Adder> {
    let spec = AdderSpec::qfa(output_bits)?;
    let m = spec.operand_bits();
    let a: Vec<usize> = (0..m).collect();
    let b: Vec<usize> = (m..2 * m).collect();
    let z = 2 * m;
    let mut circuit = Circuit::new(2 * m + 1, spec.label());
    blocks::ripple_add(&mut circuit, &a, &b, z);
    let mut output = b.clone();
    output.push(z);
    Ok(Adder {
        spec,
        circuit,
        layout: Layout {
            width: 2 * m + 1,
            a,
            b,
            output,
            ancillas: vec![z],
        },
    })
}

/// Modulo-k adder writing `(a + b) mod k` into the B register in place.
pub fn build_qma(modulus: u64, family: Family) -> Result<Adder> {
    let spec = AdderSpec::qma(modulus, family)?;
    let w = spec.operand_bits();
    let a: Vec<usize> = (0..w).collect();
    let b: Vec<usize> = (w..2 * w).collect();
    let label = spec.label();
    let (circuit, ancillas) = match family {
        Family::Pow => {
            let mut c = Circuit::new(2 * w, label);
            blocks::ripple_add_mod_pow2(&mut c, &a, &b);
            (c, vec![])
        }
        Family::PowMinusOne => {
            // b + 1 through the ripple adder gives f = carry(a + b + 1) =
            // [a+b >= k] and the end-around sum a + b + 1 - 2^w; when f = 0
            // the extra 1 is taken back off.
            let t_len = (w - 2).max(1);
            let t: Vec<usize> = (2 * w..2 * w + t_len).collect();
            let f = 2 * w + t_len;
            let mut c = Circuit::new(f + 1, label);
            blocks::increment(&mut c, None, &b, &t);
            blocks::ripple_add(&mut c, &a, &b, f);
            c.add(Gate::x(f));
            for &q in &b {
                c.add(Gate::x(q));
            }
            blocks::increment(&mut c, Some(f), &b, &t);
            for &q in &b {
                c.add(Gate::x(q));
            }
            c.add(Gate::x(f));
            blocks::less_than_into(&mut c, t[0], &b, &a, f);
            let mut anc = t.clone();
            anc.push(f);
            (c, anc)
        }
        Family::PowPlusOne => {
            // With D = 2^w - k = 2^(w-1) - 1: b' = b + D (a decrement plus a
            // top-bit flip), then the ripple adder's carry out of a + b' is
            // f = [a+b >= k]. When f = 0, D is taken back off by +1 and a
            // top-bit flip.
            let t_len = (w - 2).max(1);
            let t: Vec<usize> = (2 * w..2 * w + t_len).collect();
            let f = 2 * w + t_len;
            let top = b[w - 1];
            let mut c = Circuit::new(f + 1, label);
            blocks::decrement(&mut c, &b, &t);
            c.add(Gate::x(top));
            blocks::ripple_add(&mut c, &a, &b, f);
            c.add(Gate::x(f));
            blocks::increment(&mut c, Some(f), &b, &t);
            c.add(Gate::cnot(f, top));
            c.add(Gate::x(f));
            blocks::less_than_into(&mut c, t[0], &b, &a, f);
            let mut anc = t.clone();
            anc.push(f);
            (c, anc)
        }
        Family::General => {
            // d holds D = 2^w - k. With b' = b + D, f = carry(a + b') = [a+b >= k],
            // and the result is a + b' - (1-f) D mod 2^w.
            let d: Vec<usize> = (2 * w..3 * w).collect();
            let x = 3 * w;
            let f = 3 * w + 1;
            let offset = (1u64 << w) - modulus;
            let d_bits: Vec<usize> = (0..w)
                .filter(|i| (offset >> i) & 1 == 1)
                .map(|i| d[i])
                .collect();
            let mut c = Circuit::new(3 * w + 2, label);
            for &q in &d_bits {
                c.add(Gate::x(q));
            }
            blocks::add_with_carry_in_mod_pow2(&mut c, x, &d, &b);
            blocks::ripple_add(&mut c, &a, &b, f);
            for &q in &d_bits {
                c.add(Gate::cnot(f, q));
            }
            blocks::inverse_of(&mut c, |s| blocks::add_with_carry_in_mod_pow2(s, x, &d, &b));
            for &q in &d_bits {
                c.add(Gate::cnot(f, q));
                c.add(Gate::x(q));
            }
            blocks::less_than_into(&mut c, x, &b, &a, f);
            let mut anc = d.clone();
            anc.extend([x, f]);
            (c, anc)
        }
    };
    Ok(Adder {
        spec,
        layout: Layout {
            width: circuit.width,
            a,
            b: b.clone(),
            output: b,
            ancillas,
        },
        circuit,
    })
}

#[cfg(test)]
mod tests;
