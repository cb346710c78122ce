//! Bitstrings shared by the hash and cipher pipelines.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitsError {
    #[error("value {value} does not fit in {width} bits")]
    Overflow { value: u64, width: usize },
    #[error("invalid bit character {0:?}")]
    InvalidChar(char),
    #[error("invalid hex string: {0}")]
    InvalidHex(String),
}

/// An ordered sequence of bits, written most-significant first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn from_bools(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// Big-endian binary expansion of `value`, zero-padded to `width`.
    pub fn from_uint(value: u64, width: usize) -> Result<Self, BitsError> {
        if width < 64 && value >> width != 0 {
            return Err(BitsError::Overflow { value, width });
        }
        Ok(Self((0..width).rev().map(|i| i < 64 && (value >> i) & 1 == 1).collect()))
    }

    /// Concatenates the bytes most-significant bit first.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        Self(bytes.iter().flat_map(|b| (0..8).rev().map(move |i| (b >> i) & 1 == 1)).collect())
    }

    pub fn from_hex(hex: &str) -> Result<Self, BitsError> {
        let mut bits = Vec::with_capacity(hex.len() * 4);
        for c in hex.chars() {
            let d = c.to_digit(16).ok_or_else(|| BitsError::InvalidHex(hex.to_string()))?;
            bits.extend((0..4).rev().map(|i| (d >> i) & 1 == 1));
        }
        Ok(Self(bits))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.0.get(i).copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn truncate(&mut self, len: usize) {
        self.0.truncate(len);
    }

    /// Right-pads with zeros up to the next multiple of `block`.
    pub fn padded_to_multiple(&self, block: usize) -> BitString {
        let mut bits = self.0.clone();
        let rem = bits.len() % block;
        if rem != 0 {
            bits.resize(bits.len() + block - rem, false);
        }
        BitString(bits)
    }

    /// Returns a copy with bit `i` inverted.
    pub fn flipped(&self, i: usize) -> BitString {
        let mut bits = self.0.clone();
        bits[i] = !bits[i];
        BitString(bits)
    }

    /// Interprets the bits as a big-endian unsigned integer (at most 64 bits).
    pub fn to_uint(&self) -> u64 {
        self.0.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn hamming_distance(&self, other: &BitString) -> usize {
        let common = self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count();
        common + self.0.len().abs_diff(other.0.len())
    }

    pub fn chunks(&self, size: usize) -> impl Iterator<Item = &[bool]> {
        self.0.chunks(size)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = BitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(BitsError::InvalidChar(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitString)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_expansion() {
        assert_eq!(BitString::from_uint(5, 8).unwrap().to_string(), "00000101");
        assert_eq!(BitString::from_uint(0, 8).unwrap().to_string(), "00000000");
        assert_eq!(BitString::from_uint(99, 8).unwrap().to_string(), "01100011");
    }

    #[test]
    fn overflow_is_rejected() {
        assert_eq!(BitString::from_uint(256, 8), Err(BitsError::Overflow { value: 256, width: 8 }));
        assert!(BitString::from_uint(255, 8).is_ok());
    }

    #[test]
    fn bytes_and_hex_are_msb_first() {
        assert_eq!(BitString::from_bytes(&[0xA5, 0x01]).to_string(), "1010010100000001");
        assert_eq!(BitString::from_hex("a5").unwrap().to_string(), "10100101");
        assert!(BitString::from_hex("zz").is_err());
    }

    #[test]
    fn parse_and_padding() {
        let b: BitString = "101".parse().unwrap();
        assert_eq!(b.padded_to_multiple(4).to_string(), "1010");
        assert_eq!(b.to_uint(), 5);
        assert!("10x".parse::<BitString>().is_err());
        assert_eq!(b.hamming_distance(&"011".parse().unwrap()), 2);
    }
}
