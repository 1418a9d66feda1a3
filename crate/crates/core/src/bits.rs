//! Binary words, the sliding-window vocabulary of a text, and classical
//! ground-truth substring search.
//!
//! Words are read MSB-first: the word `b_0 b_1 ... b_{m-1}` denotes the
//! integer `sum b_i * 2^(m-1-i)`. Window and text positions are 0-based.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Widest word whose numeric value may be materialized.
///
/// Only tests and oracles go through [`BitString::numeric_value`]; the
/// fingerprint path reduces bit by bit and has no width limit.
pub const MAX_NUMERIC_WIDTH: usize = 62;

/// A non-empty binary word. Each element is 0 or 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct BitString {
    bits: Vec<u8>,
}

impl BitString {
    /// Builds a word from 0/1 values.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::EmptyBitString);
        }
        if let Some(position) = bits.iter().position(|&b| b > 1) {
            return Err(Error::InvalidDigit {
                found: char::from(b'0'.wrapping_add(bits[position])),
                position,
            });
        }
        Ok(Self { bits })
    }

    /// Parses ASCII `'0'`/`'1'` characters. A single trailing newline
    /// (`\n` or `\r\n`) is ignored.
    pub fn parse_ascii(text: &str) -> Result<Self> {
        let trimmed = text
            .strip_suffix("\r\n")
            .or_else(|| text.strip_suffix('\n'))
            .unwrap_or(text);
        let bits = trimmed
            .chars()
            .enumerate()
            .map(|(position, ch)| match ch {
                '0' => Ok(0),
                '1' => Ok(1),
                found => Err(Error::InvalidDigit { found, position }),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::from_bits(bits)
    }

    /// Unpacks bytes MSB-first, eight bits per byte.
    pub fn from_packed_bytes(bytes: &[u8]) -> Result<Self> {
        let bits = bytes
            .iter()
            .flat_map(|byte| (0..8).rev().map(move |shift| (byte >> shift) & 1))
            .collect();
        Self::from_bits(bits)
    }

    pub fn read_ascii_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_ascii(&std::fs::read_to_string(path)?)
    }

    pub fn read_packed_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_packed_bytes(&std::fs::read(path)?)
    }

    /// `bin(a)`: the `width`-bit MSB-first encoding of `value`.
    pub fn from_value(value: u64, width: usize) -> Result<Self> {
        if width == 0 {
            return Err(Error::EmptyBitString);
        }
        if width < 64 && value >> width != 0 {
            return Err(Error::InvalidParameter(format!(
                "value {value} does not fit in {width} bits"
            )));
        }
        let bits = (0..width)
            .rev()
            .map(|shift| {
                if shift >= 64 {
                    0
                } else {
                    ((value >> shift) & 1) as u8
                }
            })
            .collect();
        Ok(Self { bits })
    }

    /// All-zero word of the given width.
    pub fn zeros(width: usize) -> Result<Self> {
        Self::from_bits(vec![0; width])
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// `a(w)`, MSB-first. Oracle use only.
    pub fn numeric_value(&self) -> Result<u64> {
        if self.len() > MAX_NUMERIC_WIDTH {
            return Err(Error::OracleWidthExceeded {
                len: self.len(),
                max: MAX_NUMERIC_WIDTH,
            });
        }
        Ok(self
            .bits
            .iter()
            .fold(0u64, |acc, &bit| (acc << 1) | u64::from(bit)))
    }

    /// Copies `len` bits starting at `start`.
    pub fn slice(&self, start: usize, len: usize) -> Result<Self> {
        let end = start
            .checked_add(len)
            .filter(|&end| end <= self.len())
            .ok_or(Error::IndexOutOfRange {
                index: start.saturating_add(len),
                bound: self.len(),
            })?;
        Self::from_bits(self.bits[start..end].to_vec())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &bit in &self.bits {
            f.write_str(if bit == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(\"{self}\")")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_ascii(s)
    }
}

impl TryFrom<String> for BitString {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        Self::parse_ascii(&s)
    }
}

impl From<BitString> for String {
    fn from(b: BitString) -> Self {
        b.to_string()
    }
}

/// All length-`m` windows of a text, in order of starting offset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    windows: Vec<BitString>,
    m: usize,
    source_length: usize,
}

impl Vocabulary {
    /// Builds `V(text, m)`: `n = N - m + 1` windows, window `k` being bits
    /// `k..k+m` of the text.
    pub fn build(text: &BitString, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("window length must be at least 1".into()));
        }
        if m > text.len() {
            return Err(Error::PatternLongerThanText {
                pattern: m,
                text: text.len(),
            });
        }
        let windows = text
            .bits()
            .windows(m)
            .map(|w| BitString { bits: w.to_vec() })
            .collect();
        Ok(Self {
            windows,
            m,
            source_length: text.len(),
        })
    }

    pub fn windows(&self) -> &[BitString] {
        &self.windows
    }

    pub fn window(&self, k: usize) -> Option<&BitString> {
        self.windows.get(k)
    }

    /// Number of windows.
    pub fn n(&self) -> usize {
        self.windows.len()
    }

    /// Window length.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn source_length(&self) -> usize {
        self.source_length
    }

    /// Indices `k` whose window equals `w`.
    pub fn matches(&self, w: &BitString) -> Vec<usize> {
        self.windows
            .iter()
            .enumerate()
            .filter(|(_, window)| *window == w)
            .map(|(k, _)| k)
            .collect()
    }
}

/// Builds `V(text, m)`; see [`Vocabulary::build`].
pub fn build_vocabulary(text: &BitString, m: usize) -> Result<Vocabulary> {
    Vocabulary::build(text, m)
}

/// Every 0-based offset at which `pattern` occurs in `text`, ascending.
/// Uses Knuth-Morris-Pratt.
pub fn find_occurrences_classical(text: &BitString, pattern: &BitString) -> Vec<usize> {
    find_occurrences_kmp(text.bits(), pattern.bits())
}

/// Quadratic reference scan.
pub fn find_occurrences_naive(text: &[u8], pattern: &[u8]) -> Vec<usize> {
    if pattern.is_empty() || pattern.len() > text.len() {
        return Vec::new();
    }
    text.windows(pattern.len())
        .enumerate()
        .filter(|(_, w)| *w == pattern)
        .map(|(k, _)| k)
        .collect()
}

fn failure_table(pattern: &[u8]) -> Vec<usize> {
    let mut table = vec![0; pattern.len()];
    let mut len = 0;
    for i in 1..pattern.len() {
        while len > 0 && pattern[i] != pattern[len] {
            len = table[len - 1];
        }
        if pattern[i] == pattern[len] {
            len += 1;
        }
        table[i] = len;
    }
    table
}

pub fn find_occurrences_kmp(text: &[u8], pattern: &[u8]) -> Vec<usize> {
    let m = pattern.len();
    if m == 0 || m > text.len() {
        return Vec::new();
    }
    let table = failure_table(pattern);
    let mut hits = Vec::new();
    let mut matched = 0;
    for (i, &ch) in text.iter().enumerate() {
        while matched > 0 && ch != pattern[matched] {
            matched = table[matched - 1];
        }
        if ch == pattern[matched] {
            matched += 1;
        }
        if matched == m {
            hits.push(i + 1 - m);
            matched = table[m - 1];
        }
    }
    hits
}
