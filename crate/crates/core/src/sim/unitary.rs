use num_complex::Complex64;

use super::{gate_matrix, Circuit, GateOp, Matrix, SimError};

/// Registers larger than this are refused by [`circuit_unitary`].
pub const MAX_UNITARY_QUBITS: usize = 5;

/// Full 2^n × 2^n unitary of `c`, composed in application order.
///
/// Each gate's small matrix from [`gate_matrix`] is lifted onto the register
/// and left-multiplied into the accumulator. This path never touches the
/// in-place statevector kernel, so the two can check each other.
pub fn circuit_unitary(c: &Circuit) -> Result<Matrix, SimError> {
    let n = c.n_qubits();
    if n > MAX_UNITARY_QUBITS {
        return Err(SimError::UnsupportedSize(n));
    }
    let dim = 1usize << n;
    let mut u = Matrix::identity(dim);
    for op in c.ops() {
        u = lift(op, n)?.mul(&u);
    }
    Ok(u)
}

/// Embeds the gate's local matrix into the full register space.
fn lift(op: &GateOp, n_qubits: usize) -> Result<Matrix, SimError> {
    op.validate(n_qubits)?;
    let local = gate_matrix(op)?;
    let arity = op.qubits.len();
    let dim = 1usize << n_qubits;
    let mask: usize = op.qubits.iter().map(|q| 1usize << q).sum();

    // local index -> register bits, qubits[0] being the most significant local bit
    let scatter = |local_idx: usize| -> usize {
        op.qubits
            .iter()
            .enumerate()
            .filter(|(k, _)| (local_idx >> (arity - 1 - k)) & 1 == 1)
            .map(|(_, q)| 1usize << q)
            .sum()
    };

    let mut full = Matrix::zeros(dim);
    for rest in (0..dim).filter(|i| i & mask == 0) {
        for r in 0..local.dim() {
            for col in 0..local.dim() {
                let v = local.get(r, col);
                if v != Complex64::new(0.0, 0.0) {
                    full.set(rest | scatter(r), rest | scatter(col), v);
                }
            }
        }
    }
    Ok(full)
}
