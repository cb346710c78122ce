//! Hashing by angle-encoding input bits into a parameterized circuit.
//!
//! The input is split into blocks of `n_qubits` bits. Each block becomes one
//! layer of RX rotations (θ for a 1 bit, φ for a 0 bit), and the template's
//! entangler follows every layer but the last. PQC1 carries an H prefix in
//! its block and therefore also closes the circuit with one. The hash is the
//! most likely measurement outcome.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;
use crate::sim::{self, noisy_sample, run_circuit, Circuit, GateOp, NoiseModel, SimError};

/// Probabilities closer than this to the maximum count as tied.
const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HashError {
    #[error("input bitstring is empty")]
    EmptyInput,
    #[error("batch is empty")]
    EmptyBatch,
    #[error("unknown template {0:?} (expected PQC1..PQC5)")]
    UnknownTemplate(String),
    #[error("invalid hash configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Entangler topologies, from none (PQC4) to all-pairs (PQC3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Template {
    /// H on every qubit followed by a CX ring.
    Pqc1,
    /// CX chain q0→q1→…→q(n−1).
    Pqc2,
    /// CX on every pair i<j, control i.
    Pqc3,
    /// Rotations only.
    Pqc4,
    /// CX ring followed by the reversed ring.
    Pqc5,
}

impl Template {
    pub const ALL: [Template; 5] = [Template::Pqc1, Template::Pqc2, Template::Pqc3, Template::Pqc4, Template::Pqc5];

    fn has_prefix_layer(self) -> bool {
        self == Template::Pqc1
    }

    /// Gates placed after an encoding layer.
    pub fn entangler(self, n_qubits: usize) -> Vec<GateOp> {
        let n = n_qubits;
        let ring = |ops: &mut Vec<GateOp>| {
            if n >= 2 {
                ops.extend((0..n).map(|i| GateOp::cx(i, (i + 1) % n)));
            }
        };
        let mut ops = Vec::new();
        match self {
            Template::Pqc1 => {
                ops.extend((0..n).map(GateOp::h));
                ring(&mut ops);
            }
            Template::Pqc2 => ops.extend((1..n).map(|i| GateOp::cx(i - 1, i))),
            Template::Pqc3 => {
                for i in 0..n {
                    ops.extend((i + 1..n).map(|j| GateOp::cx(i, j)));
                }
            }
            Template::Pqc4 => {}
            Template::Pqc5 => {
                ring(&mut ops);
                if n >= 2 {
                    ops.extend((0..n).rev().map(|i| GateOp::cx((i + 1) % n, i)));
                }
            }
        }
        ops
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = Template::ALL.iter().position(|t| t == self).unwrap_or(0) + 1;
        write!(f, "PQC{i}")
    }
}

impl FromStr for Template {
    type Err = HashError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().replace('_', "").as_str() {
            "PQC1" => Ok(Template::Pqc1),
            "PQC2" => Ok(Template::Pqc2),
            "PQC3" => Ok(Template::Pqc3),
            "PQC4" => Ok(Template::Pqc4),
            "PQC5" => Ok(Template::Pqc5),
            _ => Err(HashError::UnknownTemplate(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Mode {
    /// Argmax of the exact outcome distribution.
    Exact,
    /// Argmax of a finite, optionally noisy, shot histogram.
    Sampled { shots: u64, rng_seed: u64, noise: NoiseModel },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HashConfig {
    pub n_qubits: usize,
    pub template: Template,
    /// Angle for 1 bits in the first layer.
    pub theta1: f64,
    /// Angle for 0 bits in the first layer.
    pub phi1: f64,
    /// Angles for the second and any later layer.
    pub theta2: f64,
    pub phi2: f64,
    pub mode: Mode,
}

impl Default for HashConfig {
    fn default() -> Self {
        Self { n_qubits: 4, template: Template::Pqc3, theta1: PI, phi1: 0.0, theta2: PI, phi2: 0.0, mode: Mode::Exact }
    }
}

impl HashConfig {
    pub fn new(template: Template) -> Self {
        Self { template, ..Self::default() }
    }

    pub fn with_qubits(mut self, n_qubits: usize) -> Self {
        self.n_qubits = n_qubits;
        self
    }

    /// Uses the same (θ, φ) pair on every layer.
    pub fn with_angles(mut self, theta: f64, phi: f64) -> Self {
        self.theta1 = theta;
        self.theta2 = theta;
        self.phi1 = phi;
        self.phi2 = phi;
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<(), HashError> {
        if !(1..=sim::MAX_QUBITS).contains(&self.n_qubits) {
            return Err(HashError::InvalidConfig(format!(
                "n_qubits = {} outside 1..={}",
                self.n_qubits,
                sim::MAX_QUBITS
            )));
        }
        if [self.theta1, self.phi1, self.theta2, self.phi2].iter().any(|a| !a.is_finite()) {
            return Err(HashError::InvalidConfig("encoding angles must be finite".into()));
        }
        if let Mode::Sampled { shots, noise, .. } = self.mode {
            if shots == 0 {
                return Err(HashError::InvalidConfig("shots must be at least 1".into()));
            }
            noise.validate()?;
        }
        Ok(())
    }
}

/// A hash output, most-significant qubit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HashValue {
    pub bits: BitString,
}

impl HashValue {
    pub fn from_index(index: usize, n_qubits: usize) -> Self {
        let bits = BitString::from_uint(index as u64, n_qubits).expect("index fits in the register");
        Self { bits }
    }

    /// Basis-state index this hash names.
    pub fn index(&self) -> usize {
        self.bits.to_uint() as usize
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

impl fmt::Display for HashValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.bits.fmt(f)
    }
}

/// Builds the encoding circuit for `input_bits`.
pub fn build_hash_circuit(input_bits: &BitString, cfg: &HashConfig) -> Result<Circuit, HashError> {
    if input_bits.is_empty() {
        return Err(HashError::EmptyInput);
    }
    cfg.validate()?;
    let n = cfg.n_qubits;
    let padded = input_bits.padded_to_multiple(n);
    let blocks: Vec<&[bool]> = padded.chunks(n).collect();
    let entangler = cfg.template.entangler(n);
    let trailing = cfg.template.has_prefix_layer();

    let mut circuit = Circuit::new(n)?;
    for (k, block) in blocks.iter().enumerate() {
        let (theta, phi) = if k == 0 { (cfg.theta1, cfg.phi1) } else { (cfg.theta2, cfg.phi2) };
        for (j, &bit) in block.iter().enumerate() {
            circuit.push(GateOp::rx(n - 1 - j, if bit { theta } else { phi }))?;
        }
        if k + 1 < blocks.len() || trailing {
            for op in &entangler {
                circuit.push(op.clone())?;
            }
        }
    }
    Ok(circuit)
}

/// Index of the largest weight; near-ties go to the smallest index.
fn argmax_smallest<I: IntoIterator<Item = (usize, f64)>>(weights: I, tolerance: f64) -> usize {
    let mut best: Option<(usize, f64)> = None;
    for (i, w) in weights {
        match best {
            Some((_, bw)) if w <= bw + tolerance => {}
            _ => best = Some((i, w)),
        }
    }
    best.map_or(0, |(i, _)| i)
}

pub fn hash(input_bits: &BitString, cfg: &HashConfig) -> Result<HashValue, HashError> {
    let circuit = build_hash_circuit(input_bits, cfg)?;
    let index = match cfg.mode {
        Mode::Exact => {
            let probs = run_circuit(&circuit, 0)?.probabilities();
            argmax_smallest(probs.into_iter().enumerate(), TIE_TOLERANCE)
        }
        Mode::Sampled { shots, rng_seed, noise } => {
            let counts = noisy_sample(&circuit, 0, shots, &noise, rng_seed)?;
            argmax_smallest(counts.into_iter().map(|(i, c)| (i, c as f64)), 0.0)
        }
    };
    Ok(HashValue::from_index(index, cfg.n_qubits))
}

/// Hashes every input, preserving order.
pub fn hash_batch(inputs: &[BitString], cfg: &HashConfig) -> Result<Vec<HashValue>, HashError> {
    if inputs.is_empty() {
        return Err(HashError::EmptyBatch);
    }
    inputs.par_iter().map(|x| hash(x, cfg)).collect()
}
