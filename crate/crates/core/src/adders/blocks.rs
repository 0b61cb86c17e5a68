//! Reversible arithmetic building blocks shared by the adder builders.

use crate::simcore::{Circuit, Gate};

/// In-place ripple-carry addition without ancilla (Thapliyal-Ranganathan
/// layout): `b <- a + b` over `a.len()` bits, carry-out XORed into `carry`.
/// `a` is restored.
pub(crate) fn ripple_add(c: &mut Circuit, a: &[usize], b: &[usize], carry: usize) {
    let m = a.len();
    assert_eq!(m, b.len());
    assert!(m >= 1);
    // a_ext(m) is the carry qubit
    let a_ext = |i: usize| if i == m { carry } else { a[i] };

    for i in 1..m {
        c.add(Gate::cnot(a[i], b[i]));
    }
    for i in (1..m).rev() {
        c.add(Gate::cnot(a[i], a_ext(i + 1)));
    }
    for i in 0..m {
        c.add(Gate::toffoli(b[i], a[i], a_ext(i + 1)));
    }
    for i in (1..m).rev() {
        c.add(Gate::cnot(a[i], b[i]));
        c.add(Gate::toffoli(b[i - 1], a[i - 1], a[i]));
    }
    for i in 1..m.saturating_sub(1) {
        c.add(Gate::cnot(a[i], a[i + 1]));
    }
    for i in 0..m {
        c.add(Gate::cnot(a[i], b[i]));
    }
}

/// `b <- (a + b) mod 2^len` with no carry qubit: the low bits ripple into
/// the top sum bit, which then absorbs `a`'s top bit.
pub(crate) fn ripple_add_mod_pow2(c: &mut Circuit, a: &[usize], b: &[usize]) {
    let w = a.len();
    assert_eq!(w, b.len());
    if w > 1 {
        ripple_add(c, &a[..w - 1], &b[..w - 1], b[w - 1]);
    }
    c.add(Gate::cnot(a[w - 1], b[w - 1]));
}

/// Majority gate: `a <- maj(a, b, carry)`, `b <- a^b`, `carry <- a^carry`.
fn maj(c: &mut Circuit, carry: usize, b: usize, a: usize) {
    c.add(Gate::cnot(a, b));
    c.add(Gate::cnot(a, carry));
    c.add(Gate::toffoli(carry, b, a));
}

fn maj_inverse(c: &mut Circuit, carry: usize, b: usize, a: usize) {
    c.add(Gate::toffoli(carry, b, a));
    c.add(Gate::cnot(a, carry));
    c.add(Gate::cnot(a, b));
}

/// Un-majority-and-add: undoes `maj` and leaves the sum bit in `b`.
fn uma(c: &mut Circuit, carry: usize, b: usize, a: usize) {
    c.add(Gate::toffoli(carry, b, a));
    c.add(Gate::cnot(a, carry));
    c.add(Gate::cnot(carry, b));
}

/// XORs the carry-out of `a + b + carry_in` into `out`. All inputs restored.
pub(crate) fn carry_into(c: &mut Circuit, carry_in: usize, a: &[usize], b: &[usize], out: usize) {
    let w = a.len();
    let prev = |i: usize| if i == 0 { carry_in } else { a[i - 1] };
    for i in 0..w {
        maj(c, prev(i), b[i], a[i]);
    }
    c.add(Gate::cnot(a[w - 1], out));
    for i in (0..w).rev() {
        maj_inverse(c, prev(i), b[i], a[i]);
    }
}

/// `b <- (a + b + carry_in) mod 2^len`; `a` and `carry_in` restored.
pub(crate) fn add_with_carry_in_mod_pow2(
    c: &mut Circuit,
    carry_in: usize,
    a: &[usize],
    b: &[usize],
) {
    let w = a.len();
    if w == 1 {
        c.add(Gate::cnot(a[0], b[0]));
        c.add(Gate::cnot(carry_in, b[0]));
        return;
    }
    let prev = |i: usize| if i == 0 { carry_in } else { a[i - 1] };
    for i in 0..w - 1 {
        maj(c, prev(i), b[i], a[i]);
    }
    c.add(Gate::cnot(a[w - 1], b[w - 1]));
    c.add(Gate::cnot(a[w - 2], b[w - 1]));
    for i in (0..w - 1).rev() {
        uma(c, prev(i), b[i], a[i]);
    }
}

/// Appends the inverse of a gate list produced by `build` (all gates here
/// are self-inverse, so reversing the order suffices).
pub(crate) fn inverse_of(c: &mut Circuit, build: impl FnOnce(&mut Circuit)) {
    let mut scratch = Circuit::new(c.width, "scratch");
    build(&mut scratch);
    for g in scratch.gates().iter().rev() {
        c.add(g.clone());
    }
}

/// XORs `[r < a]` into `flag` using the borrow of `r - a`; `x` is a clean
/// ancilla. All registers restored.
pub(crate) fn less_than_into(c: &mut Circuit, x: usize, r: &[usize], a: &[usize], flag: usize) {
    // carry(r + !a + 1) = [r >= a]
    for &q in a {
        c.add(Gate::x(q));
    }
    c.add(Gate::x(x));
    carry_into(c, x, a, r, flag);
    c.add(Gate::x(x));
    for &q in a {
        c.add(Gate::x(q));
    }
    c.add(Gate::x(flag));
}

/// `reg <- reg + 1 mod 2^len`, optionally controlled by `control`.
/// Needs `len - 2` clean ancillas (`len - 1` when controlled) for the
/// running AND of the low bits; they are returned clean.
pub(crate) fn increment(c: &mut Circuit, control: Option<usize>, reg: &[usize], anc: &[usize]) {
    let w = reg.len();
    // prefix[i] holds AND(control, reg[0..i]); None means constant true.
    let mut prefix: Vec<Option<usize>> = vec![control];
    let mut used = 0;
    for i in 1..w.saturating_sub(1) {
        let next = match prefix[i - 1] {
            None => reg[i - 1],
            Some(p) => {
                let t = anc[used];
                used += 1;
                c.add(Gate::toffoli(p, reg[i - 1], t));
                t
            }
        };
        prefix.push(Some(next));
    }
    for i in (0..w).rev() {
        let flip_controls = if i == 0 {
            prefix[0].into_iter().collect::<Vec<_>>()
        } else if i == w - 1 {
            let mut ctl: Vec<usize> = prefix[i - 1].into_iter().collect();
            ctl.push(reg[i - 1]);
            ctl
        } else {
            prefix[i].into_iter().collect()
        };
        match flip_controls.as_slice() {
            [] => c.add(Gate::x(reg[i])),
            [p] => c.add(Gate::cnot(*p, reg[i])),
            [p, q] => c.add(Gate::toffoli(*p, *q, reg[i])),
            _ => unreachable!(),
        }
        // release prefix[i] once reg[i] is done (it depends on reg[i-1] only)
        if i >= 1 && i < w - 1 {
            if let (Some(t), Some(p)) = (prefix[i], prefix[i - 1]) {
                c.add(Gate::toffoli(p, reg[i - 1], t));
            }
        }
    }
}

/// `reg <- reg - 1 mod 2^len`.
pub(crate) fn decrement(c: &mut Circuit, reg: &[usize], anc: &[usize]) {
    for &q in reg {
        c.add(Gate::x(q));
    }
    increment(c, None, reg, anc);
    for &q in reg {
        c.add(Gate::x(q));
    }
}
