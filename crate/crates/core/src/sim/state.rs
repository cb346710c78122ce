use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{check_qubit_count, Circuit, GateKind, GateOp, SimError};

/// Measurement histogram keyed by basis-state index.
pub type Counts = BTreeMap<usize, u64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Pauli {
    X,
    Y,
    Z,
}

/// The 2^n complex amplitudes of an n-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// |0...0⟩
    pub fn new(n_qubits: usize) -> Result<Self, SimError> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self, SimError> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(SimError::InvalidBasisState { index, n_qubits });
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(Self { n_qubits, amplitudes })
    }

    /// Wraps raw amplitudes. The caller is responsible for normalisation.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self, SimError> {
        let dim = amplitudes.len();
        if !dim.is_power_of_two() {
            return Err(SimError::InvalidQubitCount(0));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        check_qubit_count(n_qubits)?;
        Ok(Self { n_qubits, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(Complex64::norm_sqr).collect()
    }

    /// Applies `g` in place by pairing amplitudes that differ only on the addressed qubits.
    pub fn apply_gate(&mut self, g: &GateOp) -> Result<(), SimError> {
        g.validate(self.n_qubits)?;
        let q = &g.qubits;
        match g.kind {
            GateKind::X => self.apply_pauli(q[0], Pauli::X),
            GateKind::H => {
                let s = FRAC_1_SQRT_2;
                self.for_each_pair(q[0], 0, |a, b| ((a + b) * s, (a - b) * s));
            }
            GateKind::Rx => {
                let (sin, cos) = (g.angle.unwrap_or_default() / 2.0).sin_cos();
                let (c, s) = (Complex64::new(cos, 0.0), Complex64::new(0.0, -sin));
                self.for_each_pair(q[0], 0, |a, b| (c * a + s * b, s * a + c * b));
            }
            GateKind::Cx => self.for_each_pair(q[1], 1 << q[0], |a, b| (b, a)),
            GateKind::Ccx => self.for_each_pair(q[2], (1 << q[0]) | (1 << q[1]), |a, b| (b, a)),
            GateKind::Swap => {
                let (ma, mb) = (1usize << q[0], 1usize << q[1]);
                for i in 0..self.amplitudes.len() {
                    if i & ma != 0 && i & mb == 0 {
                        self.amplitudes.swap(i, i ^ ma ^ mb);
                    }
                }
            }
        }
        Ok(())
    }

    pub(crate) fn apply_pauli(&mut self, qubit: usize, p: Pauli) {
        match p {
            Pauli::X => self.for_each_pair(qubit, 0, |a, b| (b, a)),
            Pauli::Y => self.for_each_pair(qubit, 0, |a, b| (-I * b, I * a)),
            Pauli::Z => self.for_each_pair(qubit, 0, |a, b| (a, -b)),
        }
    }

    /// Visits every pair (i, i | 2^target) with the target bit clear and all
    /// `control_mask` bits set, replacing both amplitudes with `f(a_i, a_j)`.
    fn for_each_pair<F>(&mut self, target: usize, control_mask: usize, f: F)
    where
        F: Fn(Complex64, Complex64) -> (Complex64, Complex64),
    {
        let stride = 1usize << target;
        let dim = self.amplitudes.len();
        let mut base = 0;
        while base < dim {
            for i in base..base + stride {
                if i & control_mask == control_mask {
                    let j = i | stride;
                    let (a, b) = f(self.amplitudes[i], self.amplitudes[j]);
                    self.amplitudes[i] = a;
                    self.amplitudes[j] = b;
                }
            }
            base += stride << 1;
        }
    }

    pub fn apply_circuit(&mut self, c: &Circuit) -> Result<(), SimError> {
        if c.n_qubits() != self.n_qubits {
            return Err(SimError::RegisterMismatch { circuit: c.n_qubits(), state: self.n_qubits });
        }
        c.ops().iter().try_for_each(|g| self.apply_gate(g))
    }

    /// Draws `shots` outcomes from the Born distribution with a seeded generator.
    pub fn sample(&self, shots: u64, rng_seed: u64) -> Result<Counts, SimError> {
        if shots == 0 {
            return Err(SimError::ZeroShots);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let dist = WeightedIndex::new(self.probabilities()).map_err(|_| SimError::Unnormalized)?;
        let mut counts = Counts::new();
        for _ in 0..shots {
            *counts.entry(dist.sample(&mut rng)).or_insert(0) += 1;
        }
        Ok(counts)
    }

    /// Renders basis index `index` as a bitstring, highest qubit first.
    pub fn format_basis(&self, index: usize) -> String {
        format!("{:0width$b}", index, width = self.n_qubits)
    }
}

/// Runs `c` from the basis state |initial⟩.
pub fn run_circuit(c: &Circuit, initial: usize) -> Result<StateVector, SimError> {
    let mut s = StateVector::basis(c.n_qubits(), initial)?;
    s.apply_circuit(c)?;
    Ok(s)
}
