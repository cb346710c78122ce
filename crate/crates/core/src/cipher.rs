//! Single-round substitution/mix/shift cipher over 4-bit chunks.
//!
//! Each chunk goes through a self-inverse lookup table, then a reversible
//! gate list run on a 4-qubit register, then a circular left shift that
//! depends on the chunk's 1-based position. Decryption undoes the three
//! steps in reverse order with the same seed.

use std::fmt;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;
use crate::sim::{inverse_circuit, run_circuit, Circuit, GateKind, GateOp, SimError, StateVector};

pub const CHUNK_BITS: usize = 4;
pub const SEED_VERSION: u32 = 1;
pub const DEFAULT_MIX_GATES: usize = 12;

const CHUNK_VALUES: usize = 1 << CHUNK_BITS;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnsupportedVersion(u32),
    NotPermutation,
    NotSelfInverse { index: usize },
    InvalidGate { index: usize, reason: String },
    NonClassicalGate { index: usize, kind: GateKind },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnsupportedVersion(v) => write!(f, "unsupported seed version {v}"),
            Violation::NotPermutation => f.write_str("sub_table is not a permutation of 0..15"),
            Violation::NotSelfInverse { index } => write!(f, "sub_table is not self-inverse at {index}"),
            Violation::InvalidGate { index, reason } => write!(f, "mix gate {index}: {reason}"),
            Violation::NonClassicalGate { index, kind } => {
                write!(f, "mix gate {index}: {} is not a classical reversible gate", kind.name())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CipherError {
    #[error("invalid seed: {}", join_violations(.0))]
    InvalidSeed(Vec<Violation>),
    #[error("plaintext is empty")]
    EmptyInput,
    #[error("ciphertext length {0} is not a multiple of 4")]
    Misaligned(usize),
    #[error("original length {orig} inconsistent with {bits} cipher bits")]
    LengthMismatch { orig: usize, bits: usize },
    #[error("nibble {0} out of range")]
    NibbleOutOfRange(u8),
    #[error("mix gates left basis state {0} in superposition")]
    NotBasisState(u8),
    #[error(transparent)]
    Sim(#[from] SimError),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Shared secret: substitution table plus the mix gate list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub version: u32,
    pub sub_table: [u8; CHUNK_VALUES],
    pub mix_gates: Vec<GateOp>,
}

impl SeedSpec {
    /// Identity table, no mix gates.
    pub fn identity() -> Self {
        Self { version: SEED_VERSION, sub_table: std::array::from_fn(|i| i as u8), mix_gates: Vec::new() }
    }

    pub fn new(sub_table: [u8; CHUNK_VALUES], mix_gates: Vec<GateOp>) -> Self {
        Self { version: SEED_VERSION, sub_table, mix_gates }
    }

    pub fn mix_circuit(&self) -> Result<Circuit, SimError> {
        Circuit::from_ops(CHUNK_BITS, self.mix_gates.clone())
    }
}

/// Action of the mix gates on the 16 basis states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MixPermutation {
    pub map: [u8; CHUNK_VALUES],
}

impl MixPermutation {
    /// Derives the map by running every basis state through the simulator.
    pub fn from_simulation(gates: &[GateOp]) -> Result<Self, CipherError> {
        let circuit = Circuit::from_ops(CHUNK_BITS, gates.to_vec())?;
        let mut map = [0u8; CHUNK_VALUES];
        for (i, slot) in map.iter_mut().enumerate() {
            *slot = read_basis(&run_circuit(&circuit, i)?, i as u8)?;
        }
        Ok(Self { map })
    }

    /// Derives the map with plain bit operations, no simulator involved.
    pub fn from_bit_logic(gates: &[GateOp]) -> Self {
        let map = std::array::from_fn(|i| gates.iter().fold(i as u8, |x, g| classical_gate(g, x)));
        Self { map }
    }

    pub fn inverse(&self) -> Self {
        let mut map = [0u8; CHUNK_VALUES];
        for (i, &v) in self.map.iter().enumerate() {
            map[v as usize] = i as u8;
        }
        Self { map }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v as usize)
    }

    pub fn is_permutation(&self) -> bool {
        is_permutation(&self.map)
    }
}

fn classical_gate(g: &GateOp, x: u8) -> u8 {
    let bit = |q: usize| (x >> q) & 1 == 1;
    let q = &g.qubits;
    match g.kind {
        GateKind::X => x ^ (1 << q[0]),
        GateKind::Cx if bit(q[0]) => x ^ (1 << q[1]),
        GateKind::Ccx if bit(q[0]) && bit(q[1]) => x ^ (1 << q[2]),
        GateKind::Swap if bit(q[0]) != bit(q[1]) => x ^ (1 << q[0]) ^ (1 << q[1]),
        _ => x,
    }
}

fn is_permutation(values: &[u8; CHUNK_VALUES]) -> bool {
    let mut seen = [false; CHUNK_VALUES];
    for &v in values {
        match seen.get_mut(v as usize) {
            Some(s) if !*s => *s = true,
            _ => return false,
        }
    }
    true
}

/// The unique basis state holding all the probability mass.
fn read_basis(s: &StateVector, input: u8) -> Result<u8, CipherError> {
    let probs = s.probabilities();
    let (idx, p) =
        probs.iter().copied().enumerate().fold((0, f64::MIN), |best, (i, p)| if p > best.1 { (i, p) } else { best });
    if (p - 1.0).abs() > 1e-9 {
        return Err(CipherError::NotBasisState(input));
    }
    Ok(idx as u8)
}

/// Checks the seed and derives its mix permutation through the simulator.
pub fn validate_seed(seed: &SeedSpec) -> Result<MixPermutation, Vec<Violation>> {
    let mut violations = Vec::new();
    if seed.version != SEED_VERSION {
        violations.push(Violation::UnsupportedVersion(seed.version));
    }
    if !is_permutation(&seed.sub_table) {
        violations.push(Violation::NotPermutation);
    } else if let Some(index) = (0..CHUNK_VALUES).find(|&i| seed.sub_table[seed.sub_table[i] as usize] as usize != i) {
        violations.push(Violation::NotSelfInverse { index });
    }
    for (index, g) in seed.mix_gates.iter().enumerate() {
        if let Err(e) = g.validate(CHUNK_BITS) {
            violations.push(Violation::InvalidGate { index, reason: e.to_string() });
        } else if !g.kind.is_classical() {
            violations.push(Violation::NonClassicalGate { index, kind: g.kind });
        }
    }
    if !violations.is_empty() {
        return Err(violations);
    }
    match MixPermutation::from_simulation(&seed.mix_gates) {
        Ok(m) if m.is_permutation() => Ok(m),
        Ok(_) => Err(vec![Violation::InvalidGate { index: 0, reason: "mix is not a bijection".into() }]),
        Err(e) => Err(vec![Violation::InvalidGate { index: 0, reason: e.to_string() }]),
    }
}

fn checked_seed(seed: &SeedSpec) -> Result<Circuit, CipherError> {
    validate_seed(seed).map_err(CipherError::InvalidSeed)?;
    Ok(seed.mix_circuit()?)
}

pub fn sub_bytes(nibble: u8, table: &[u8; CHUNK_VALUES]) -> u8 {
    table[(nibble & 0xF) as usize]
}

/// Runs the mix gates on |nibble⟩ and reads back the resulting basis state.
pub fn mix_chunk(nibble: u8, mix_gates: &[GateOp]) -> Result<u8, CipherError> {
    if let Some(g) = mix_gates.iter().find(|g| !g.kind.is_classical()) {
        return Err(CipherError::InvalidSeed(vec![Violation::NonClassicalGate { index: 0, kind: g.kind }]));
    }
    let circuit = Circuit::from_ops(CHUNK_BITS, mix_gates.to_vec())?;
    run_mix(&circuit, nibble)
}

fn run_mix(circuit: &Circuit, nibble: u8) -> Result<u8, CipherError> {
    if nibble as usize >= CHUNK_VALUES {
        return Err(CipherError::NibbleOutOfRange(nibble));
    }
    read_basis(&run_circuit(circuit, nibble as usize)?, nibble)
}

fn rotl4(x: u8, r: u32) -> u8 {
    let r = r % 4;
    ((x << r) | (x >> ((4 - r) % 4))) & 0xF
}

/// Left-rotates by `position mod 4`; every fourth chunk is untouched.
pub fn shift_chunk(nibble: u8, position: usize) -> u8 {
    rotl4(nibble & 0xF, (position % 4) as u32)
}

pub fn unshift_chunk(nibble: u8, position: usize) -> u8 {
    rotl4(nibble & 0xF, ((4 - position % 4) % 4) as u32)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CipherText {
    pub orig_bit_len: usize,
    pub bits: BitString,
}

impl CipherText {
    pub fn check(&self) -> Result<(), CipherError> {
        let len = self.bits.len();
        if !len.is_multiple_of(CHUNK_BITS) {
            return Err(CipherError::Misaligned(len));
        }
        if self.orig_bit_len > len || len >= self.orig_bit_len + CHUNK_BITS {
            return Err(CipherError::LengthMismatch { orig: self.orig_bit_len, bits: len });
        }
        Ok(())
    }

    pub fn chunks(&self) -> impl Iterator<Item = u8> + '_ {
        nibbles(&self.bits)
    }
}

fn nibbles(bits: &BitString) -> impl Iterator<Item = u8> + '_ {
    bits.chunks(CHUNK_BITS).map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | b as u8))
}

fn push_nibble(out: &mut BitString, v: u8) {
    for i in (0..CHUNK_BITS).rev() {
        out.push((v >> i) & 1 == 1);
    }
}

fn encrypt_with(
    bits: &BitString,
    seed: &SeedSpec,
    mut mix: impl FnMut(u8) -> Result<u8, CipherError>,
) -> Result<CipherText, CipherError> {
    if bits.is_empty() {
        return Err(CipherError::EmptyInput);
    }
    let padded = bits.padded_to_multiple(CHUNK_BITS);
    let mut out = BitString::new();
    for (i, chunk) in nibbles(&padded).enumerate() {
        let mixed = mix(sub_bytes(chunk, &seed.sub_table))?;
        push_nibble(&mut out, shift_chunk(mixed, i + 1));
    }
    Ok(CipherText { orig_bit_len: bits.len(), bits: out })
}

/// SubBytes, then the mix circuit on the simulator, then ShiftRows, chunk by chunk.
pub fn encrypt(bits: &BitString, seed: &SeedSpec) -> Result<CipherText, CipherError> {
    let circuit = checked_seed(seed)?;
    encrypt_with(bits, seed, |x| run_mix(&circuit, x))
}

/// Inverse shift, inverse mix circuit, then the same self-inverse table.
pub fn decrypt(ct: &CipherText, seed: &SeedSpec) -> Result<BitString, CipherError> {
    ct.check()?;
    let inverse = inverse_circuit(&checked_seed(seed)?);
    let mut out = BitString::new();
    for (i, chunk) in ct.chunks().enumerate() {
        let unmixed = run_mix(&inverse, unshift_chunk(chunk, i + 1))?;
        push_nibble(&mut out, sub_bytes(unmixed, &seed.sub_table));
    }
    out.truncate(ct.orig_bit_len);
    Ok(out)
}

/// Reference encryption that never touches the simulator.
pub fn classical_oracle_encrypt(bits: &BitString, seed: &SeedSpec) -> Result<BitString, CipherError> {
    validate_seed(seed).map_err(CipherError::InvalidSeed)?;
    let perm = MixPermutation::from_bit_logic(&seed.mix_gates);
    Ok(encrypt_with(bits, seed, |x| Ok(perm.map[x as usize]))?.bits)
}

/// Random seed: a uniformly built involution and `DEFAULT_MIX_GATES` classical gates.
pub fn keygen(rng_seed: u64) -> SeedSpec {
    keygen_with(rng_seed, DEFAULT_MIX_GATES)
}

pub fn keygen_with(rng_seed: u64, n_gates: usize) -> SeedSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    loop {
        let seed = SeedSpec::new(random_involution(&mut rng), random_gates(&mut rng, n_gates));
        let table_identity = seed.sub_table.iter().enumerate().all(|(i, &v)| i == v as usize);
        if !(table_identity && MixPermutation::from_bit_logic(&seed.mix_gates).is_identity()) {
            return seed;
        }
    }
}

fn random_involution(rng: &mut impl Rng) -> [u8; CHUNK_VALUES] {
    let mut table: [Option<u8>; CHUNK_VALUES] = [None; CHUNK_VALUES];
    for i in 0..CHUNK_VALUES {
        if table[i].is_some() {
            continue;
        }
        let free: Vec<usize> = (i..CHUNK_VALUES).filter(|&j| table[j].is_none()).collect();
        let j = free[rng.gen_range(0..free.len())];
        table[i] = Some(j as u8);
        table[j] = Some(i as u8);
    }
    table.map(|v| v.expect("every slot assigned"))
}

fn random_gates(rng: &mut impl Rng, n: usize) -> Vec<GateOp> {
    const KINDS: [GateKind; 4] = [GateKind::X, GateKind::Cx, GateKind::Ccx, GateKind::Swap];
    (0..n)
        .map(|_| {
            let kind = KINDS[rng.gen_range(0..KINDS.len())];
            let qubits = index::sample(rng, CHUNK_BITS, kind.arity()).into_vec();
            GateOp { kind, qubits, angle: None }
        })
        .collect()
}

/// Shannon entropy in bits.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    let h: f64 = probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum();
    h.max(0.0)
}

/// Outcome entropy of each ciphertext chunk's mix-register state, re-prepared
/// on the simulator from the pre-mix value.
pub fn chunk_entropies(ct: &CipherText, seed: &SeedSpec) -> Result<Vec<f64>, CipherError> {
    ct.check()?;
    let forward = checked_seed(seed)?;
    let inverse = inverse_circuit(&forward);
    ct.chunks()
        .enumerate()
        .map(|(i, c)| {
            let pre_mix = run_mix(&inverse, unshift_chunk(c, i + 1))?;
            Ok(shannon_entropy(&run_circuit(&forward, pre_mix as usize)?.probabilities()))
        })
        .collect()
}

/// Largest per-chunk entropy; 0 for an empty ciphertext.
pub fn cipher_entropy_diag(ct: &CipherText, seed: &SeedSpec) -> Result<f64, CipherError> {
    Ok(chunk_entropies(ct, seed)?.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn complement() -> SeedSpec {
        SeedSpec::new(std::array::from_fn(|i| 15 - i as u8), Vec::new())
    }

    #[test]
    fn validate_examples() {
        assert!(validate_seed(&SeedSpec::identity()).unwrap().is_identity());
        assert!(validate_seed(&complement()).is_ok());

        let mut cycle = SeedSpec::identity();
        cycle.sub_table[0] = 1;
        cycle.sub_table[1] = 2;
        cycle.sub_table[2] = 0;
        assert_eq!(validate_seed(&cycle), Err(vec![Violation::NotSelfInverse { index: 0 }]));
        assert!(Violation::NotSelfInverse { index: 0 }.to_string().contains("not self-inverse"));
    }

    #[test]
    fn validate_collects_all_violations() {
        let mut bad = SeedSpec::identity();
        bad.version = 9;
        bad.sub_table[3] = 4;
        bad.mix_gates = vec![GateOp::h(0), GateOp::x(4), GateOp::rx(1, 0.2)];
        let v = validate_seed(&bad).unwrap_err();
        assert_eq!(v.len(), 5, "{v:?}");
        assert!(v.contains(&Violation::NotPermutation));
        assert!(v.contains(&Violation::NonClassicalGate { index: 0, kind: GateKind::H }));
        assert!(matches!(v[3], Violation::InvalidGate { index: 1, .. }));
    }

    #[test]
    fn sub_bytes_examples() {
        assert_eq!(sub_bytes(9, &SeedSpec::identity().sub_table), 9);
        assert_eq!(sub_bytes(0b1001, &complement().sub_table), 0b0110);
        let t = keygen(3).sub_table;
        assert!((0..16).all(|x| sub_bytes(sub_bytes(x, &t), &t) == x));
    }

    #[test]
    fn mix_chunk_examples() {
        assert_eq!(mix_chunk(0b1001, &[]).unwrap(), 0b1001);
        assert_eq!(mix_chunk(0b1001, &[GateOp::x(0)]).unwrap(), 0b1000);
        assert_eq!(mix_chunk(0b1001, &[GateOp::cx(3, 0)]).unwrap(), 0b1000);
        assert!(matches!(mix_chunk(0, &[GateOp::h(0)]), Err(CipherError::InvalidSeed(_))));
    }

    #[test]
    fn shift_examples() {
        assert_eq!(shift_chunk(0b1001, 1), 0b0011);
        assert_eq!(shift_chunk(0b1001, 4), 0b1001);
        assert_eq!(shift_chunk(0b0110, 2), 0b1001);
        assert_eq!(shift_chunk(0b0001, 3), 0b1000);
        for p in 1..12 {
            for x in 0..16 {
                assert_eq!(unshift_chunk(shift_chunk(x, p), p), x);
                assert_eq!(shift_chunk(x, p), shift_chunk(x, p + 4));
            }
        }
    }

    #[test]
    fn encrypt_examples() {
        let ct = encrypt(&bits("10010110"), &SeedSpec::identity()).unwrap();
        assert_eq!(ct.bits.to_string(), "00111001");
        assert_eq!(ct.orig_bit_len, 8);

        assert_eq!(encrypt(&bits("1001"), &complement()).unwrap().bits.to_string(), "1100");

        let ct = encrypt(&bits("0000000000001011"), &SeedSpec::identity()).unwrap();
        assert_eq!(&ct.bits.to_string()[12..], "1011");

        assert_eq!(encrypt(&BitString::new(), &SeedSpec::identity()), Err(CipherError::EmptyInput));
        let mut cycle = SeedSpec::identity();
        cycle.sub_table.swap(0, 1);
        cycle.sub_table.swap(1, 2);
        assert!(matches!(encrypt(&bits("1"), &cycle), Err(CipherError::InvalidSeed(_))));
    }

    #[test]
    fn decrypt_examples() {
        let id = SeedSpec::identity();
        let ct = CipherText { orig_bit_len: 8, bits: bits("00111001") };
        assert_eq!(decrypt(&ct, &id).unwrap().to_string(), "10010110");
        assert_eq!(decrypt(&encrypt(&bits("10010110"), &id).unwrap(), &id).unwrap().to_string(), "10010110");

        let short = CipherText { orig_bit_len: 3, bits: bits("101") };
        assert_eq!(decrypt(&short, &id), Err(CipherError::Misaligned(3)));
        let long = CipherText { orig_bit_len: 2, bits: bits("10100000") };
        assert!(matches!(decrypt(&long, &id), Err(CipherError::LengthMismatch { .. })));
    }

    #[test]
    fn padding_round_trip() {
        let seed = keygen(11);
        let x = bits("1011011");
        let ct = encrypt(&x, &seed).unwrap();
        assert_eq!(ct.bits.len(), 8);
        assert_eq!(decrypt(&ct, &seed).unwrap(), x);
    }

    #[test]
    fn keygen_is_deterministic_and_valid() {
        assert_eq!(keygen(7), keygen(7));
        assert_eq!(keygen(7).mix_gates.len(), DEFAULT_MIX_GATES);
        for s in 0..50 {
            assert!(validate_seed(&keygen(s)).is_ok());
        }
        assert_eq!(keygen_with(1, 0).mix_gates.len(), 0);
    }

    #[test]
    fn simulated_and_bit_level_permutations_agree() {
        for s in 0..30 {
            let seed = keygen(s);
            let sim = validate_seed(&seed).unwrap();
            assert_eq!(sim, MixPermutation::from_bit_logic(&seed.mix_gates));
            let inv = MixPermutation::from_simulation(inverse_circuit(&seed.mix_circuit().unwrap()).ops()).unwrap();
            assert_eq!(inv, sim.inverse());
        }
    }

    #[test]
    fn entropy_examples() {
        let seed = keygen(5);
        let ct = encrypt(&bits("1100101001110001"), &seed).unwrap();
        assert_eq!(cipher_entropy_diag(&ct, &seed).unwrap(), 0.0);

        let mut s = StateVector::new(4).unwrap();
        s.apply_gate(&GateOp::h(0)).unwrap();
        assert!((shannon_entropy(&s.probabilities()) - 1.0).abs() < 1e-12);

        let empty = CipherText { orig_bit_len: 0, bits: BitString::new() };
        assert_eq!(cipher_entropy_diag(&empty, &seed).unwrap(), 0.0);
    }

    #[test]
    fn seed_json_shape() {
        let seed = SeedSpec::new(std::array::from_fn(|i| 15 - i as u8), vec![GateOp::cx(3, 0), GateOp::x(1)]);
        let json = serde_json::to_string(&seed).unwrap();
        assert_eq!(
            json,
            r#"{"version":1,"sub_table":[15,14,13,12,11,10,9,8,7,6,5,4,3,2,1,0],"mix_gates":[{"kind":"CX","qubits":[3,0]},{"kind":"X","qubits":[1]}]}"#
        );
        let ct = CipherText { orig_bit_len: 5, bits: bits("10100000") };
        assert_eq!(serde_json::to_string(&ct).unwrap(), r#"{"orig_bit_len":5,"bits":"10100000"}"#);
    }
}
