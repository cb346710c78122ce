use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_qubit_count, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    X,
    H,
    #[serde(rename = "RX")]
    Rx,
    #[serde(rename = "CX")]
    Cx,
    #[serde(rename = "CCX")]
    Ccx,
    #[serde(rename = "SWAP")]
    Swap,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::X | GateKind::H | GateKind::Rx => 1,
            GateKind::Cx | GateKind::Swap => 2,
            GateKind::Ccx => 3,
        }
    }

    /// Gates that map computational basis states onto basis states.
    pub fn is_classical(self) -> bool {
        matches!(self, GateKind::X | GateKind::Cx | GateKind::Ccx | GateKind::Swap)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::H => "H",
            GateKind::Rx => "RX",
            GateKind::Cx => "CX",
            GateKind::Ccx => "CCX",
            GateKind::Swap => "SWAP",
        }
    }
}

/// A gate addressed to specific qubits. Controls come first, then targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
}

impl GateOp {
    pub fn x(q: usize) -> Self {
        Self { kind: GateKind::X, qubits: vec![q], angle: None }
    }

    pub fn h(q: usize) -> Self {
        Self { kind: GateKind::H, qubits: vec![q], angle: None }
    }

    pub fn rx(q: usize, theta: f64) -> Self {
        Self { kind: GateKind::Rx, qubits: vec![q], angle: Some(theta) }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self { kind: GateKind::Cx, qubits: vec![control, target], angle: None }
    }

    pub fn ccx(c1: usize, c2: usize, target: usize) -> Self {
        Self { kind: GateKind::Ccx, qubits: vec![c1, c2, target], angle: None }
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self { kind: GateKind::Swap, qubits: vec![a, b], angle: None }
    }

    /// Checks arity, the angle field and index distinctness, independent of any register.
    pub fn check_shape(&self) -> Result<(), SimError> {
        let arity = self.kind.arity();
        if self.qubits.len() != arity {
            return Err(SimError::InvalidGate(format!(
                "{} takes {} qubit(s), got {}",
                self.kind.name(),
                arity,
                self.qubits.len()
            )));
        }
        for (i, q) in self.qubits.iter().enumerate() {
            if self.qubits[..i].contains(q) {
                return Err(SimError::InvalidGate(format!("{} addresses qubit {q} more than once", self.kind.name())));
            }
        }
        match (self.kind, self.angle) {
            (GateKind::Rx, Some(a)) if a.is_finite() => Ok(()),
            (GateKind::Rx, Some(_)) => Err(SimError::InvalidGate("RX angle is not finite".into())),
            (GateKind::Rx, None) => Err(SimError::InvalidGate("RX requires an angle".into())),
            (kind, Some(_)) => Err(SimError::InvalidGate(format!("{} does not take an angle", kind.name()))),
            (_, None) => Ok(()),
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<(), SimError> {
        self.check_shape()?;
        if let Some(&index) = self.qubits.iter().find(|&&q| q >= n_qubits) {
            return Err(SimError::QubitOutOfRange { index, n_qubits });
        }
        Ok(())
    }

    /// The gate undoing this one. Only RX is not self-inverse.
    pub fn inverse(&self) -> Self {
        let mut inv = self.clone();
        if let Some(a) = inv.angle.as_mut() {
            *a = -*a;
        }
        inv
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())?;
        if let Some(a) = self.angle {
            write!(f, "({a})")?;
        }
        for q in &self.qubits {
            write!(f, " q{q}")?;
        }
        Ok(())
    }
}

/// An ordered gate list over a fixed register size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self, SimError> {
        check_qubit_count(n_qubits)?;
        Ok(Self { n_qubits, ops: Vec::new() })
    }

    pub fn from_ops(n_qubits: usize, ops: Vec<GateOp>) -> Result<Self, SimError> {
        let mut c = Self::new(n_qubits)?;
        for op in ops {
            c.push(op)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, op: GateOp) -> Result<(), SimError> {
        op.validate(self.n_qubits)?;
        self.ops.push(op);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// Reverses the gate order and inverts each gate.
pub fn inverse_circuit(c: &Circuit) -> Circuit {
    Circuit { n_qubits: c.n_qubits, ops: c.ops.iter().rev().map(GateOp::inverse).collect() }
}

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        Self { dim, data: rows.into_iter().flatten().collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: Complex64) {
        self.data[row * self.dim + col] = v;
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    pub fn mul(&self, other: &Matrix) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * other.data[k * n + c];
                }
            }
        }
        out
    }

    /// Largest entry-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// max |(U†U − I)_ij|.
    pub fn unitarity_error(&self) -> f64 {
        self.adjoint().mul(self).max_abs_diff(&Matrix::identity(self.dim))
    }
}

/// The standard unitary of `g` on its own qubits.
///
/// Local index bit `arity - 1 - k` corresponds to `g.qubits[k]`, so the first
/// listed (control) qubit is the most significant.
pub fn gate_matrix(g: &GateOp) -> Result<Matrix, SimError> {
    g.check_shape()?;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let m = match g.kind {
        GateKind::X => permutation_matrix(&[1, 0]),
        GateKind::H => {
            let s = FRAC_1_SQRT_2;
            Matrix::from_rows(vec![vec![c(s, 0.0), c(s, 0.0)], vec![c(s, 0.0), c(-s, 0.0)]])
        }
        GateKind::Rx => {
            let half = g.angle.unwrap_or_default() / 2.0;
            let (s, co) = half.sin_cos();
            Matrix::from_rows(vec![vec![c(co, 0.0), c(0.0, -s)], vec![c(0.0, -s), c(co, 0.0)]])
        }
        GateKind::Cx => permutation_matrix(&[0, 1, 3, 2]),
        GateKind::Ccx => permutation_matrix(&[0, 1, 2, 3, 4, 5, 7, 6]),
        GateKind::Swap => permutation_matrix(&[0, 2, 1, 3]),
    };
    Ok(m)
}

/// Matrix sending basis column `j` to basis row `images[j]`.
fn permutation_matrix(images: &[usize]) -> Matrix {
    let mut m = Matrix::zeros(images.len());
    for (col, &row) in images.iter().enumerate() {
        m.set(row, col, Complex64::new(1.0, 0.0));
    }
    m
}
