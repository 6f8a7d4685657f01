use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A binary pattern `σ ∈ {0,1}^n`.
///
/// Ordering is lexicographic on the bits with `0 < 1`. Pattern index `k`
/// has bit `i` equal to bit `n - 1 - i` of `k`, so index order and
/// lexicographic order coincide.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct WeavePattern {
    bits: Vec<bool>,
}

impl WeavePattern {
    pub fn new(bits: Vec<bool>) -> Self {
        WeavePattern { bits }
    }

    pub fn zeros(n: usize) -> Self {
        WeavePattern { bits: vec![false; n] }
    }

    pub fn ones(n: usize) -> Self {
        WeavePattern { bits: vec![true; n] }
    }

    /// `σ(i) = i mod 2` with 1-based `i`, i.e. `1010…`.
    pub fn alternating(n: usize) -> Self {
        WeavePattern { bits: (0..n).map(|i| i % 2 == 0).collect() }
    }

    /// Pattern number `k` in lexicographic order. Requires `n < 64`.
    pub fn from_index(n: usize, k: u64) -> Self {
        debug_assert!(n < 64);
        WeavePattern { bits: (0..n).map(|i| (k >> (n - 1 - i)) & 1 == 1).collect() }
    }

    pub fn index(&self) -> u64 {
        self.bits.iter().fold(0u64, |acc, b| (acc << 1) | u64::from(*b))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
    }

    pub fn complement(&self) -> Self {
        WeavePattern { bits: self.bits.iter().map(|b| !b).collect() }
    }

    /// 0-based indices with `σ(i) = value`.
    pub fn indices_of(&self, value: bool) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.bits[i] == value).collect()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }
}

impl fmt::Display for WeavePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for WeavePattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Input(format!("pattern {s:?} contains {other:?}; expected only 0 and 1"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(WeavePattern::new)
    }
}

impl TryFrom<String> for WeavePattern {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<WeavePattern> for String {
    fn from(p: WeavePattern) -> String {
        p.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_order_is_lexicographic() {
        let n = 4;
        let all: Vec<_> = (0..16).map(|k| WeavePattern::from_index(n, k)).collect();
        for w in all.windows(2) {
            assert!(w[0] < w[1]);
        }
        for (k, p) in all.iter().enumerate() {
            assert_eq!(p.index(), k as u64);
        }
        assert_eq!(WeavePattern::from_index(3, 1).to_string(), "001");
    }

    #[test]
    fn alternating_starts_with_one() {
        assert_eq!(WeavePattern::alternating(5).to_string(), "10101");
        assert_eq!(WeavePattern::alternating(4).complement().to_string(), "0101");
    }

    #[test]
    fn parse_round_trip() {
        let p: WeavePattern = "0110".parse().unwrap();
        assert_eq!(p.indices_of(true), vec![1, 2]);
        assert_eq!(p.to_string(), "0110");
        assert!("01a".parse::<WeavePattern>().is_err());
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, "\"0110\"");
        assert_eq!(serde_json::from_str::<WeavePattern>(&json).unwrap(), p);
    }
}
