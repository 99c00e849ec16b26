//! The two-symbol shift space: sequences, the weighted metric, the Bernoulli
//! shift, periodic points, a dense orbit and a sensitivity witness, plus the
//! encoding of Levinson-style spacings as symbols.
//!
//! Text form writes `s_0` immediately left of the dot: `…s₋₁s₀.s₁s₂…`.
//! Periodic sequences are written `(block)@phase`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ENUMERATE: u32 = 20;
pub const MAX_DENSE_DEPTH: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymbolSequence {
    /// `d_i = block[(phase + i) mod len]` for every integer `i`.
    Periodic { block: Vec<u8>, phase: usize },
    /// `d_{first + j} = bits[j]`; only the covered range is defined. The dot
    /// always sits inside or on the edge of the window (`first ≤ 1 ≤ last + 1`).
    Window { bits: Vec<u8>, first: i64 },
}

fn check_bits(bits: &[u8]) -> Result<()> {
    match bits.iter().find(|&&b| b > 1) {
        Some(b) => Err(Error::InvalidParams(format!("symbols must be 0 or 1, got {b}"))),
        None => Ok(()),
    }
}

impl SymbolSequence {
    pub fn periodic(block: Vec<u8>, phase: usize) -> Result<Self> {
        if block.is_empty() {
            return Err(Error::InvalidParams("periodic block must be non-empty".into()));
        }
        check_bits(&block)?;
        let phase = phase % block.len();
        Ok(Self::Periodic { block, phase })
    }

    pub fn window(bits: Vec<u8>, first: i64) -> Result<Self> {
        check_bits(&bits)?;
        let last = first + bits.len() as i64 - 1;
        if first > 1 || last < 0 {
            return Err(Error::InvalidParams(format!(
                "window [{first}, {last}] must reach the origin (first <= 1, last >= 0)"
            )));
        }
        Ok(Self::Window { bits, first })
    }

    pub fn zeros() -> Self {
        Self::Periodic { block: vec![0], phase: 0 }
    }

    pub fn ones() -> Self {
        Self::Periodic { block: vec![1], phase: 0 }
    }

    /// Indices with a defined symbol; `None` for periodic sequences (all of ℤ).
    pub fn coverage(&self) -> Option<RangeInclusive<i64>> {
        match self {
            Self::Periodic { .. } => None,
            Self::Window { bits, first } => Some(*first..=*first + bits.len() as i64 - 1),
        }
    }

    pub fn covers(&self, range: RangeInclusive<i64>) -> bool {
        match self.coverage() {
            None => true,
            Some(c) => range.is_empty() || (c.start() <= range.start() && range.end() <= c.end()),
        }
    }

    pub fn get(&self, i: i64) -> Option<u8> {
        match self {
            Self::Periodic { block, phase } => {
                let n = block.len() as i64;
                Some(block[(*phase as i64 + i).rem_euclid(n) as usize])
            }
            Self::Window { bits, first } => usize::try_from(i - first).ok().and_then(|j| bits.get(j).copied()),
        }
    }

    /// Explicit symbols on `range`.
    pub fn materialize(&self, range: RangeInclusive<i64>) -> Result<Self> {
        if !self.covers(range.clone()) {
            return Err(self.coverage_error(&range));
        }
        let first = *range.start();
        Self::window(range.map(|i| self.get(i).unwrap()).collect(), first)
    }

    fn coverage_error(&self, range: &RangeInclusive<i64>) -> Error {
        let c = self.coverage().unwrap_or(i64::MIN..=i64::MAX);
        Error::Coverage { lo: *c.start().max(range.start()), hi: *c.end().min(range.end()) }
    }

    /// Bernoulli shift `[σd]_i = d_{i+1}`. A window keeps its symbols and moves
    /// one step left; it is exhausted once its last symbol would pass the origin.
    pub fn shift(&self) -> Result<Self> {
        match self {
            Self::Periodic { block, phase } => Ok(Self::Periodic { block: block.clone(), phase: (phase + 1) % block.len() }),
            Self::Window { bits, first } => {
                if first + bits.len() as i64 - 1 < 1 {
                    return Err(Error::WindowExhausted);
                }
                Ok(Self::Window { bits: bits.clone(), first: first - 1 })
            }
        }
    }

    /// Inverse shift `[σ⁻¹d]_i = d_{i-1}`.
    pub fn unshift(&self) -> Result<Self> {
        match self {
            Self::Periodic { block, phase } => {
                let n = block.len();
                Ok(Self::Periodic { block: block.clone(), phase: (phase + n - 1) % n })
            }
            Self::Window { bits, first } => {
                if *first >= 1 {
                    return Err(Error::WindowExhausted);
                }
                Ok(Self::Window { bits: bits.clone(), first: first + 1 })
            }
        }
    }

    pub fn shift_n(&self, n: usize) -> Result<Self> {
        let mut d = self.clone();
        for _ in 0..n {
            d = d.shift()?;
        }
        Ok(d)
    }

    /// Same symbols at every index of `range`.
    pub fn agrees_on(&self, other: &Self, range: RangeInclusive<i64>) -> bool {
        range.into_iter().all(|i| matches!((self.get(i), other.get(i)), (Some(a), Some(b)) if a == b))
    }
}

impl fmt::Display for SymbolSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ch = |b: &u8| if *b == 0 { '0' } else { '1' };
        match self {
            Self::Periodic { block, phase } => {
                write!(f, "(")?;
                block.iter().try_for_each(|b| write!(f, "{}", ch(b)))?;
                write!(f, ")@{phase}")
            }
            Self::Window { bits, first } => {
                let split = (1 - first) as usize;
                bits[..split].iter().try_for_each(|b| write!(f, "{}", ch(b)))?;
                write!(f, ".")?;
                bits[split..].iter().try_for_each(|b| write!(f, "{}", ch(b)))
            }
        }
    }
}

impl FromStr for SymbolSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace() && *c != '…').collect();
        let bits_of = |t: &str| -> Result<Vec<u8>> {
            t.chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(Error::Parse(format!("unexpected symbol {c:?} in {s:?}"))),
                })
                .collect()
        };
        if let Some(rest) = s.strip_prefix('(') {
            let (block, phase) = rest
                .split_once(")@")
                .ok_or_else(|| Error::Parse(format!("periodic sequence must look like (block)@phase: {s:?}")))?;
            let phase = phase.parse().map_err(|_| Error::Parse(format!("bad phase in {s:?}")))?;
            return Self::periodic(bits_of(block)?, phase).map_err(|e| Error::Parse(e.to_string()));
        }
        let (left, right) = s
            .split_once('.')
            .ok_or_else(|| Error::Parse(format!("window sequence needs a dot after s_0: {s:?}")))?;
        let mut bits = bits_of(left)?;
        bits.extend(bits_of(right)?);
        Self::window(bits, 1 - left.len() as i64).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// `(Σ_{|i|≤W} |d_i − e_i| / 2^|i|, 2^{1−W})`; the second value bounds the
/// contribution of the ignored tail.
pub fn metric(d: &SymbolSequence, e: &SymbolSequence, window: u32) -> Result<(f64, f64)> {
    if window < 1 {
        return Err(Error::InvalidParams("metric window must be >= 1".into()));
    }
    let w = window as i64;
    for s in [d, e] {
        if !s.covers(-w..=w) {
            return Err(s.coverage_error(&(-w..=w)));
        }
    }
    let value = (-w..=w)
        .filter(|&i| d.get(i) != e.get(i))
        .map(|i| 0.5f64.powi(i.unsigned_abs() as i32))
        .sum();
    Ok((value, 0.5f64.powi(window as i32 - 1)))
}

/// Every sequence fixed by `σ^m`: the `2^m` periodic sequences with a block of length `m`.
pub fn enumerate_fixed(m: u32) -> Result<Vec<SymbolSequence>> {
    if m == 0 {
        return Err(Error::InvalidParams("period must be >= 1".into()));
    }
    if m > MAX_ENUMERATE {
        return Err(Error::BudgetExceeded(format!("2^{m} sequences (limit m <= {MAX_ENUMERATE})")));
    }
    Ok((0u32..1 << m)
        .map(|code| SymbolSequence::Periodic { block: (0..m).rev().map(|k| (code >> k & 1) as u8).collect(), phase: 0 })
        .collect())
}

/// Binary words of length `len` in lexicographic order.
fn words(len: u32) -> impl Iterator<Item = Vec<u8>> {
    (0u32..1 << len).map(move |code| (0..len).rev().map(|k| (code >> k & 1) as u8).collect())
}

/// All words of lengths `1..=depth` written one after another from index 0,
/// mirrored by zeros on the negative side so the window is `[-L, L]`.
pub fn dense_orbit(depth: u32) -> Result<SymbolSequence> {
    if depth == 0 {
        return Err(Error::InvalidParams("depth must be >= 1".into()));
    }
    if depth > MAX_DENSE_DEPTH {
        return Err(Error::BudgetExceeded(format!("dense orbit depth {depth} (limit {MAX_DENSE_DEPTH})")));
    }
    let positive: Vec<u8> = (1..=depth).flat_map(words).flatten().collect();
    let len = positive.len();
    let mut bits = vec![0u8; len - 1];
    bits.extend(positive);
    SymbolSequence::window(bits, -(len as i64 - 1))
}

/// Smallest `n` with `σⁿ(d)` equal to `word` on `[0, |word|)`.
pub fn find_word(d: &SymbolSequence, word: &[u8]) -> Option<usize> {
    let end = match d.coverage() {
        Some(c) => *c.end(),
        None => match d {
            SymbolSequence::Periodic { block, .. } => block.len() as i64 + word.len() as i64,
            SymbolSequence::Window { .. } => unreachable!(),
        },
    };
    (0..=end - word.len() as i64 + 1).map(|n| n as usize).find(|&n| {
        word.iter().enumerate().all(|(j, &b)| d.get(n as i64 + j as i64) == Some(b))
    })
}

/// A sequence `e` agreeing with `d` on `[-W, W]` but flipped at `W + 1`, and the
/// number of shifts (`W + 1`) after which the two are at least 1 apart.
/// `d` must be defined on `[-W, 2W + 1]`.
pub fn sensitivity_witness(d: &SymbolSequence, window: u32) -> Result<(SymbolSequence, usize)> {
    let w = window as i64;
    let need = -w..=2 * w + 1;
    if !d.covers(need.clone()) {
        return Err(d.coverage_error(&need));
    }
    let SymbolSequence::Window { mut bits, first } = d.materialize(need)? else { unreachable!() };
    let j = (w + 1 - first) as usize;
    bits[j] ^= 1;
    Ok((SymbolSequence::Window { bits, first }, window as usize + 1))
}

/// One of the two spacings `(2n ∓ 1)π` between successive base intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpacingSymbol {
    pub n: u32,
    pub bit: u8,
}

impl SpacingSymbol {
    pub fn value(&self) -> f64 {
        let k = 2.0 * self.n as f64 + if self.bit == 0 { -1.0 } else { 1.0 };
        k * PI
    }

    pub fn encode(spacing: f64, n: u32, tol: f64) -> Option<Self> {
        [0u8, 1].into_iter().map(|bit| Self { n, bit }).find(|s| (spacing - s.value()).abs() <= tol)
    }
}

/// Symbols for a list of spacings, starting at index 0.
pub fn encode_spacings(spacings: &[f64], n: u32, tol: f64) -> Result<SymbolSequence> {
    if n < 1 {
        return Err(Error::InvalidParams("n must be >= 1".into()));
    }
    if !(tol > 0.0 && tol < PI) {
        return Err(Error::InvalidParams(format!("tolerance must lie in (0, π), got {tol}")));
    }
    if spacings.is_empty() {
        return Err(Error::InvalidParams("no spacings to encode".into()));
    }
    let bits = spacings
        .iter()
        .enumerate()
        .map(|(index, &value)| {
            SpacingSymbol::encode(value, n, tol).map(|s| s.bit).ok_or(Error::UnrecognizedSpacing { index, value })
        })
        .collect::<Result<Vec<_>>>()?;
    SymbolSequence::window(bits, 0)
}
