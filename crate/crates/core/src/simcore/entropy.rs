use nalgebra::DMatrix;
use num_complex::Complex;

use super::dense::StateVector;
use super::state::QuantumState;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Eigenvalues below this contribute nothing to the entropy sum.
pub const EIGENVALUE_FLOOR: f64 = 1e-15;

/// Largest reduced density operator diagonalized directly; beyond this the
/// complement (same spectrum for a pure state) is used.
const MAX_DIRECT_QUBITS: usize = 10;

/// Reduced density operator on `subset`, with row index bit `j` = `subset[j]`.
pub fn reduced_density<T: Scalar>(
    state: &StateVector<T>,
    subset: &[usize],
) -> Result<DMatrix<Complex<f64>>> {
    let width = state.width();
    for (i, &q) in subset.iter().enumerate() {
        if q >= width {
            return Err(Error::OperandOutOfRange { qubit: q, width });
        }
        if subset[..i].contains(&q) {
            return Err(Error::DuplicateOperand(q));
        }
    }
    let env: Vec<usize> = (0..width).filter(|q| !subset.contains(q)).collect();
    let dim_s = 1usize << subset.len();
    let dim_e = 1usize << env.len();
    // amplitude matrix M[s][e]; rho = M M^dagger
    let mut m = DMatrix::<Complex<f64>>::zeros(dim_s, dim_e);
    for (i, amp) in state.amplitudes().iter().enumerate() {
        let s = gather(i, subset);
        let e = gather(i, &env);
        m[(s, e)] = Complex::new(
            amp.re.to_f64().unwrap_or(0.0),
            amp.im.to_f64().unwrap_or(0.0),
        );
    }
    Ok(&m * m.adjoint())
}

fn gather(index: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |k, (j, &q)| k | (((index >> q) & 1) << j))
}

/// Von Neumann entropy in bits of the reduced state on `subset`. An empty
/// subset means the whole register.
pub fn entropy<T: Scalar>(state: &StateVector<T>, subset: &[usize]) -> Result<f64> {
    let width = state.width();
    let full: Vec<usize>;
    let subset = if subset.is_empty() {
        full = (0..width).collect();
        &full[..]
    } else {
        subset
    };
    let side: Vec<usize> = if subset.len() > MAX_DIRECT_QUBITS {
        for &q in subset {
            if q >= width {
                return Err(Error::OperandOutOfRange { qubit: q, width });
            }
        }
        (0..width).filter(|q| !subset.contains(q)).collect()
    } else {
        subset.to_vec()
    };
    let rho = reduced_density(state, &side)?;
    Ok(spectrum_entropy(&rho))
}

pub(crate) fn spectrum_entropy(rho: &DMatrix<Complex<f64>>) -> f64 {
    if rho.nrows() == 1 {
        return 0.0;
    }
    let eig = rho.clone().symmetric_eigenvalues();
    eig.iter()
        .filter(|&&l| l > EIGENVALUE_FLOOR)
        .map(|&l| -l * l.log2())
        .sum()
}
