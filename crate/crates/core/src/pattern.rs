//! Binary decimation patterns.
//!
//! A pattern of length `M` marks, for every length-`M` segment of a signal,
//! which samples are retained (`1`) and which are dropped (`0`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An immutable decimation pattern with its derived indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DecimationPattern {
    bits: Vec<u8>,
    ones: Vec<usize>,
}

impl DecimationPattern {
    /// Builds a pattern from a slice of 0/1 values.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::EmptyPattern);
        }
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidSymbol(char::from_digit(b as u32 % 36, 36).unwrap_or('?')));
        }
        let ones: Vec<usize> = bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| (b == 1).then_some(i))
            .collect();
        if ones.is_empty() {
            return Err(Error::AllZeroPattern);
        }
        Ok(Self { bits: bits.to_vec(), ones })
    }

    /// Block decimation: the first `r1` samples of every `r2`-sample segment.
    pub fn block(r1: usize, r2: usize) -> Result<Self> {
        if r1 < 1 || r1 > r2 {
            return Err(Error::InvalidBlockSpec { r1, r2 });
        }
        let bits: Vec<u8> = (0..r2).map(|i| u8::from(i < r1)).collect();
        Self::from_bits(&bits)
    }

    /// Uniform decimation by `m`, i.e. `[1, 0, ..., 0]`.
    pub fn uniform(m: usize) -> Result<Self> {
        Self::block(1, m)
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Segment length `M`.
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of retained samples per segment, `N`.
    pub fn retained(&self) -> usize {
        self.ones.len()
    }

    /// Zero-based positions `i_1 < ... < i_N` of the ones.
    pub fn ones_indices(&self) -> &[usize] {
        &self.ones
    }

    /// Decimation ratio `M / N`, always at least 1.
    pub fn ratio(&self) -> f64 {
        self.len() as f64 / self.retained() as f64
    }

    pub fn is_retained(&self, k: usize) -> bool {
        self.bits[k % self.len()] == 1
    }

    /// Cyclic left rotation by `k` positions.
    pub fn rotate_left(&self, k: usize) -> Self {
        let mut bits = self.bits.clone();
        let m = bits.len();
        bits.rotate_left(k % m);
        Self::from_bits(&bits).expect("rotation preserves validity")
    }

    /// All distinct cyclic rotations, in rotation order starting from `self`.
    pub fn rotations(&self) -> Vec<Self> {
        let mut out: Vec<Self> = Vec::with_capacity(self.len());
        for k in 0..self.len() {
            let r = self.rotate_left(k);
            if !out.contains(&r) {
                out.push(r);
            }
        }
        out
    }

    /// Lexicographically smallest rotation; equal for cyclically equivalent patterns.
    pub fn canonical(&self) -> Self {
        (0..self.len())
            .map(|k| self.rotate_left(k))
            .min_by(|a, b| a.bits.cmp(&b.bits))
            .expect("pattern is nonempty")
    }

    pub fn is_cyclic_equivalent(&self, other: &Self) -> bool {
        self.len() == other.len() && self.canonical() == other.canonical()
    }

    /// Longest run of zeros when the pattern is read cyclically.
    pub fn max_zero_run(&self) -> usize {
        let gaps = self.cyclic_gaps();
        gaps.into_iter().max().unwrap_or(0)
    }

    /// Zeros between each retained index and the next one, wrapping around.
    pub fn cyclic_gaps(&self) -> Vec<usize> {
        let m = self.len();
        let n = self.ones.len();
        (0..n)
            .map(|k| {
                let next = if k + 1 < n { self.ones[k + 1] } else { self.ones[0] + m };
                next - self.ones[k] - 1
            })
            .collect()
    }
}

impl FromStr for DecimationPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .filter(|c| !matches!(c, ' ' | ',' | '[' | ']' | '_'))
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidSymbol(other)),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::from_bits(&bits)
    }
}

impl fmt::Display for DecimationPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for DecimationPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DecimationPattern({self})")
    }
}

impl Serialize for DecimationPattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DecimationPattern {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
