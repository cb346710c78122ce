use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::state::Pauli;
use super::{run_circuit, Circuit, Counts, SimError, StateVector};

/// Parametric noise: a depolarizing kick after every gate plus independent readout flips.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Chance, per touched qubit and per gate, of a uniformly random X/Y/Z.
    pub depolarizing_p: f64,
    /// Chance of flipping each measured bit.
    pub readout_flip_q: f64,
}

impl NoiseModel {
    pub fn new(depolarizing_p: f64, readout_flip_q: f64) -> Result<Self, SimError> {
        let m = Self { depolarizing_p, readout_flip_q };
        m.validate()?;
        Ok(m)
    }

    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for (name, p) in [("depolarizing_p", self.depolarizing_p), ("readout_flip_q", self.readout_flip_q)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(SimError::InvalidNoise(format!("{name} = {p} is outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Shot-by-shot noisy execution of `c` from |initial⟩.
pub fn noisy_sample(
    c: &Circuit,
    initial: usize,
    shots: u64,
    noise: &NoiseModel,
    rng_seed: u64,
) -> Result<Counts, SimError> {
    noise.validate()?;
    if shots == 0 {
        return Err(SimError::ZeroShots);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let n = c.n_qubits();
    let mut counts = Counts::new();

    // Without gate noise every shot sees the same final state.
    let fixed = if noise.depolarizing_p == 0.0 {
        let s = run_circuit(c, initial)?;
        Some(WeightedIndex::new(s.probabilities()).map_err(|_| SimError::Unnormalized)?)
    } else {
        None
    };

    for _ in 0..shots {
        let outcome = match &fixed {
            Some(dist) => dist.sample(&mut rng),
            None => {
                let s = noisy_run(c, initial, noise.depolarizing_p, &mut rng)?;
                WeightedIndex::new(s.probabilities()).map_err(|_| SimError::Unnormalized)?.sample(&mut rng)
            }
        };
        let mut flipped = outcome;
        if noise.readout_flip_q > 0.0 {
            for q in 0..n {
                if rng.gen_bool(noise.readout_flip_q) {
                    flipped ^= 1 << q;
                }
            }
        }
        *counts.entry(flipped).or_insert(0) += 1;
    }
    Ok(counts)
}

fn noisy_run(c: &Circuit, initial: usize, p: f64, rng: &mut ChaCha8Rng) -> Result<StateVector, SimError> {
    let mut s = StateVector::basis(c.n_qubits(), initial)?;
    for op in c.ops() {
        s.apply_gate(op)?;
        for &q in &op.qubits {
            if rng.gen_bool(p) {
                let pauli = match rng.gen_range(0..3) {
                    0 => Pauli::X,
                    1 => Pauli::Y,
                    _ => Pauli::Z,
                };
                s.apply_pauli(q, pauli);
            }
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::GateOp;

    fn x_circuit() -> Circuit {
        Circuit::from_ops(1, vec![GateOp::x(0)]).unwrap()
    }

    #[test]
    fn noiseless_matches_ideal_distribution() {
        let counts = noisy_sample(&x_circuit(), 0, 100, &NoiseModel::noiseless(), 3).unwrap();
        assert_eq!(counts, Counts::from([(1, 100)]));
    }

    #[test]
    fn forced_readout_flip() {
        let noise = NoiseModel::new(0.0, 1.0).unwrap();
        let counts = noisy_sample(&x_circuit(), 0, 100, &noise, 3).unwrap();
        assert_eq!(counts, Counts::from([(0, 100)]));
    }

    #[test]
    fn readout_flip_rate_is_binomial() {
        // mean 0.9, sd sqrt(0.09/10000) = 0.003; [0.87, 0.93] is ±10 sd
        let noise = NoiseModel::new(0.0, 0.1).unwrap();
        let counts = noisy_sample(&x_circuit(), 0, 10_000, &noise, 2024).unwrap();
        let ones = *counts.get(&1).unwrap_or(&0) as f64 / 10_000.0;
        assert!((0.87..=0.93).contains(&ones), "{ones}");
    }

    #[test]
    fn depolarizing_noise_spreads_outcomes() {
        let noise = NoiseModel::new(1.0, 0.0).unwrap();
        let counts = noisy_sample(&x_circuit(), 0, 3000, &noise, 11).unwrap();
        // X then a uniform Pauli: X and Y leave |0>, Z leaves |1>
        let zeros = *counts.get(&0).unwrap_or(&0) as f64 / 3000.0;
        assert!((zeros - 2.0 / 3.0).abs() < 0.05, "{counts:?}");
    }

    #[test]
    fn invalid_probabilities_are_rejected() {
        assert!(NoiseModel::new(-0.1, 0.0).is_err());
        assert!(NoiseModel::new(0.0, 1.5).is_err());
        let bad = NoiseModel { depolarizing_p: 2.0, readout_flip_q: 0.0 };
        assert!(matches!(noisy_sample(&x_circuit(), 0, 1, &bad, 0), Err(SimError::InvalidNoise(_))));
        assert_eq!(noisy_sample(&x_circuit(), 0, 0, &NoiseModel::noiseless(), 0), Err(SimError::ZeroShots));
    }

    #[test]
    fn deterministic_per_seed() {
        let c = Circuit::from_ops(2, vec![GateOp::h(0), GateOp::cx(0, 1)]).unwrap();
        let noise = NoiseModel::new(0.2, 0.05).unwrap();
        assert_eq!(noisy_sample(&c, 0, 400, &noise, 9).unwrap(), noisy_sample(&c, 0, 400, &noise, 9).unwrap());
    }
}
