//! Input-sparsity machinery: preprocessings (down-sampling, thresholding),
//! natural-range declarations, reachable-value sets, and histograms.
//!
//! A preprocessing is applied to an operand *encoding* before it enters a
//! block. Down-sampling `ds:x` clears the low `log2(x)` bits; thresholding
//! `th:x:y` maps every unsigned value below `x` to `y`. Chains compose steps
//! in list order.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Interpretation of an operand encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Interp {
    Unsigned,
    TwosComplement,
}

impl Interp {
    /// Decode an encoding of `wl` bits into its integer value.
    pub fn decode(self, enc: u64, wl: u32) -> i64 {
        debug_assert!(wl <= 32 && enc < (1u64 << wl));
        match self {
            Interp::Unsigned => enc as i64,
            Interp::TwosComplement => {
                let sign = 1u64 << (wl - 1);
                if enc & sign != 0 {
                    enc as i64 - (1i64 << wl)
                } else {
                    enc as i64
                }
            }
        }
    }

    /// Encode an integer value into `wl` bits, or fail if it does not fit.
    pub fn encode(self, value: i64, wl: u32) -> Result<u64> {
        let (lo, hi) = self.value_range(wl);
        if value < lo || value > hi {
            return Err(Error::Parameter(format!(
                "value {value} not representable in {wl}-bit {self:?}"
            )));
        }
        Ok((value as u64) & ((1u64 << wl) - 1))
    }

    /// Inclusive representable value range at word length `wl`.
    pub fn value_range(self, wl: u32) -> (i64, i64) {
        match self {
            Interp::Unsigned => (0, (1i64 << wl) - 1),
            Interp::TwosComplement => (-(1i64 << (wl - 1)), (1i64 << (wl - 1)) - 1),
        }
    }
}

/// One preprocessing step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preprocessing {
    Identity,
    /// Clear the low `log2(step)` bits of the encoding. `step` is a power of
    /// two; for unsigned values this equals `v - (v mod step)`.
    DownSample { step: u32 },
    /// Map every unsigned value below `cutoff` to `replacement`.
    Threshold { cutoff: u32, replacement: u32 },
}

impl Preprocessing {
    /// Check this step against an operand's word length and interpretation.
    pub fn validate(&self, wl: u32, interp: Interp) -> Result<()> {
        let domain = 1u64 << wl;
        match *self {
            Preprocessing::Identity => Ok(()),
            Preprocessing::DownSample { step } => {
                if !step.is_power_of_two() {
                    Err(Error::Parameter(format!(
                        "down-sampling step {step} is not a power of two"
                    )))
                } else if u64::from(step) > domain {
                    Err(Error::Parameter(format!(
                        "down-sampling step {step} exceeds the {wl}-bit domain"
                    )))
                } else {
                    Ok(())
                }
            }
            Preprocessing::Threshold { cutoff, replacement } => {
                if interp != Interp::Unsigned {
                    return Err(Error::Unsupported(
                        "thresholding is defined for unsigned operands only".into(),
                    ));
                }
                if u64::from(cutoff) > domain {
                    return Err(Error::Parameter(format!(
                        "threshold cutoff {cutoff} exceeds the {wl}-bit domain"
                    )));
                }
                if u64::from(replacement) >= domain {
                    return Err(Error::Parameter(format!(
                        "threshold replacement {replacement} outside the {wl}-bit domain"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Apply this step to an encoding. The step must already be valid for
    /// `(wl, interp)`.
    pub fn apply(&self, v: u32, wl: u32, interp: Interp) -> Result<u32> {
        self.validate(wl, interp)?;
        Ok(match *self {
            Preprocessing::Identity => v,
            Preprocessing::DownSample { step } => ds_apply(v, step)?,
            Preprocessing::Threshold { cutoff, replacement } => {
                th_apply(v, cutoff, replacement, interp)?
            }
        })
    }
}

impl fmt::Display for Preprocessing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Preprocessing::Identity => write!(f, "id"),
            Preprocessing::DownSample { step } => write!(f, "ds:{step}"),
            Preprocessing::Threshold { cutoff, replacement } => {
                write!(f, "th:{cutoff}:{replacement}")
            }
        }
    }
}

/// Map encoding `v` to the next-lower multiple of `step` by clearing its low
/// `log2(step)` bits.
pub fn ds_apply(v: u32, step: u32) -> Result<u32> {
    if !step.is_power_of_two() {
        return Err(Error::Parameter(format!(
            "down-sampling step {step} is not a power of two"
        )));
    }
    Ok(v & !(step - 1))
}

/// Map every value below `cutoff` to `replacement`; values at or above the
/// cutoff pass through. Defined for unsigned operands only.
pub fn th_apply(v: u32, cutoff: u32, replacement: u32, interp: Interp) -> Result<u32> {
    if interp != Interp::Unsigned {
        return Err(Error::Unsupported(
            "thresholding is defined for unsigned operands only".into(),
        ));
    }
    Ok(if v < cutoff { replacement } else { v })
}

/// An ordered composition of preprocessing steps applied at a primary input.
///
/// Valid chains are idempotent over their operand domain: applying the chain
/// twice equals applying it once. Per-step validity is cheap to check;
/// idempotence is checked by enumeration in [`PreprocessChain::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PreprocessChain {
    steps: Vec<Preprocessing>,
}

impl PreprocessChain {
    pub fn identity() -> Self {
        PreprocessChain { steps: Vec::new() }
    }

    pub fn new(steps: Vec<Preprocessing>) -> Self {
        PreprocessChain { steps }
    }

    pub fn steps(&self) -> &[Preprocessing] {
        &self.steps
    }

    /// True when the chain cannot change any value.
    pub fn is_identity(&self) -> bool {
        self.steps
            .iter()
            .all(|s| matches!(s, Preprocessing::Identity | Preprocessing::DownSample { step: 1 }))
    }

    /// Apply the steps in list order to an encoding.
    pub fn apply(&self, v: u32, wl: u32, interp: Interp) -> Result<u32> {
        let mut cur = v;
        for step in &self.steps {
            cur = step.apply(cur, wl, interp)?;
        }
        Ok(cur)
    }

    /// Validate every step for `(wl, interp)` and check the chain's
    /// idempotence invariant over the full `wl`-bit domain.
    pub fn validate(&self, wl: u32, interp: Interp) -> Result<()> {
        for step in &self.steps {
            step.validate(wl, interp)?;
        }
        if wl > 16 {
            return Err(Error::Capacity(format!(
                "chain validation enumerates the operand domain; {wl} bits exceeds the 16-bit guard"
            )));
        }
        for v in 0..(1u32 << wl) {
            let once = self.apply(v, wl, interp)?;
            let twice = self.apply(once, wl, interp)?;
            if once != twice {
                return Err(Error::Parameter(format!(
                    "chain `{self}` is not idempotent on {wl}-bit input {v}: {once} != {twice}"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for PreprocessChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            return write!(f, "id");
        }
        for (i, step) in self.steps.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            write!(f, "{step}")?;
        }
        Ok(())
    }
}

/// Parse the spec-string syntax: `ds:<x>`, `th:<x>:<y>`, `id`, joined by `+`
/// (e.g. `th:48:48+ds:16`).
impl FromStr for PreprocessChain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parameter("empty preprocessing spec".into()));
        }
        let mut steps = Vec::new();
        for part in s.split('+') {
            let fields: Vec<&str> = part.trim().split(':').collect();
            let step = match fields.as_slice() {
                ["id"] => Preprocessing::Identity,
                ["ds", x] => Preprocessing::DownSample {
                    step: x.parse().map_err(|_| {
                        Error::Parameter(format!("bad down-sampling step `{x}`"))
                    })?,
                },
                ["th", x, y] => Preprocessing::Threshold {
                    cutoff: x
                        .parse()
                        .map_err(|_| Error::Parameter(format!("bad threshold cutoff `{x}`")))?,
                    replacement: y.parse().map_err(|_| {
                        Error::Parameter(format!("bad threshold replacement `{y}`"))
                    })?,
                },
                _ => {
                    return Err(Error::Parameter(format!(
                        "bad preprocessing step `{part}` (expected id, ds:<x>, or th:<x>:<y>)"
                    )))
                }
            };
            steps.push(step);
        }
        Ok(PreprocessChain::new(steps))
    }
}

/// Inclusive bounds on the integer values an operand actually takes in a
/// given application.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NaturalRange {
    pub lo: i64,
    pub hi: i64,
}

impl NaturalRange {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::Parameter(format!("natural range {lo}:{hi} has lo > hi")));
        }
        Ok(NaturalRange { lo, hi })
    }

    /// The full representable range for `(wl, interp)`.
    pub fn full(wl: u32, interp: Interp) -> Self {
        let (lo, hi) = interp.value_range(wl);
        NaturalRange { lo, hi }
    }

    pub fn contains(&self, value: i64) -> bool {
        value >= self.lo && value <= self.hi
    }

    /// Check the range lies within the representable values of `(wl, interp)`.
    pub fn validate(&self, wl: u32, interp: Interp) -> Result<()> {
        let (lo, hi) = interp.value_range(wl);
        if self.lo < lo || self.hi > hi {
            return Err(Error::Parameter(format!(
                "natural range {}:{} outside the representable {wl}-bit range {lo}:{hi}",
                self.lo, self.hi
            )));
        }
        Ok(())
    }
}

impl fmt::Display for NaturalRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

/// Parse `lo:hi`.
impl FromStr for NaturalRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| Error::Parameter(format!("bad natural range `{s}` (expected lo:hi)")))?;
        let lo = lo
            .trim()
            .parse()
            .map_err(|_| Error::Parameter(format!("bad natural range bound `{lo}`")))?;
        let hi = hi
            .trim()
            .parse()
            .map_err(|_| Error::Parameter(format!("bad natural range bound `{hi}`")))?;
        NaturalRange::new(lo, hi)
    }
}

/// The set of encodings an operand can reach, stored as sorted disjoint
/// inclusive intervals so 16-bit domains stay cheap.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ValueSet {
    wl: u32,
    runs: Vec<(u32, u32)>,
}

impl ValueSet {
    /// Build from any iterator of in-domain encodings (duplicates allowed).
    pub fn from_values(wl: u32, values: impl IntoIterator<Item = u32>) -> Result<Self> {
        let limit = (1u64 << wl) as u64;
        let mut sorted: Vec<u32> = values.into_iter().collect();
        sorted.sort_unstable();
        sorted.dedup();
        if let Some(&max) = sorted.last() {
            if u64::from(max) >= limit {
                return Err(Error::Data(format!("value {max} outside the {wl}-bit domain")));
            }
        }
        let mut runs: Vec<(u32, u32)> = Vec::new();
        for v in sorted {
            match runs.last_mut() {
                Some((_, hi)) if *hi + 1 == v => *hi = v,
                _ => runs.push((v, v)),
            }
        }
        Ok(ValueSet { wl, runs })
    }

    /// Every encoding of the `wl`-bit domain.
    pub fn full(wl: u32) -> Self {
        ValueSet { wl, runs: vec![(0, ((1u64 << wl) - 1) as u32)] }
    }

    pub fn empty(wl: u32) -> Self {
        ValueSet { wl, runs: Vec::new() }
    }

    pub fn word_length(&self) -> u32 {
        self.wl
    }

    pub fn runs(&self) -> &[(u32, u32)] {
        &self.runs
    }

    /// Number of members, computed from interval lengths.
    pub fn len(&self) -> u64 {
        self.runs.iter().map(|&(lo, hi)| u64::from(hi - lo) + 1).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.runs
            .binary_search_by(|&(lo, hi)| {
                if v < lo {
                    std::cmp::Ordering::Greater
                } else if v > hi {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Equal
                }
            })
            .is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.runs.iter().flat_map(|&(lo, hi)| lo..=hi)
    }

    pub fn is_subset_of(&self, other: &ValueSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    /// Project every member onto the bit field `[lo_bit, lo_bit + width)`,
    /// producing a `width`-bit set. Used when splitting a block into
    /// segment-wide sub-blocks.
    pub fn project_field(&self, lo_bit: u32, width: u32) -> ValueSet {
        let mask = ((1u64 << width) - 1) as u32;
        let vals = self.iter().map(|v| (v >> lo_bit) & mask);
        ValueSet::from_values(width, vals).expect("field projection stays in domain")
    }

    /// Fraction of the domain that is unreachable.
    pub fn sparsity(&self) -> f64 {
        let domain = (1u64 << self.wl) as f64;
        1.0 - self.len() as f64 / domain
    }
}

/// Compute the image of a natural range under a preprocessing chain: the set
/// of encodings that can arrive at a block input.
pub fn reachable_set(
    wl: u32,
    interp: Interp,
    natural: NaturalRange,
    chain: &PreprocessChain,
) -> Result<ValueSet> {
    natural.validate(wl, interp)?;
    chain.validate(wl, interp)?;
    let mut images = Vec::new();
    for enc in 0..(1u32 << wl) {
        if natural.contains(interp.decode(u64::from(enc), wl)) {
            images.push(chain.apply(enc, wl, interp)?);
        }
    }
    ValueSet::from_values(wl, images)
}

/// Per-value occurrence counts over a `wl`-bit domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    wl: u32,
    counts: Vec<u64>,
    total: u64,
}

impl Histogram {
    pub fn new(wl: u32) -> Self {
        Histogram { wl, counts: vec![0; 1 << wl], total: 0 }
    }

    pub fn word_length(&self) -> u32 {
        self.wl
    }

    pub fn record(&mut self, v: u32) -> Result<()> {
        let slot = self
            .counts
            .get_mut(v as usize)
            .ok_or_else(|| Error::Data(format!("value {v} outside the {}-bit domain", self.wl)))?;
        *slot += 1;
        self.total += 1;
        Ok(())
    }

    pub fn count(&self, v: u32) -> u64 {
        self.counts.get(v as usize).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Normalized weight of `v`; the weights sum to 1 when the total is
    /// positive.
    pub fn normalized(&self, v: u32) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(v) as f64 / self.total as f64
        }
    }

    /// The set of values with nonzero count.
    pub fn observed_set(&self) -> ValueSet {
        let vals = self
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(v, _)| v as u32);
        ValueSet::from_values(self.wl, vals).expect("histogram indices are in domain")
    }
}

/// Count occurrences of each value in `values`.
pub fn histogram_of(values: impl IntoIterator<Item = u32>, wl: u32) -> Result<Histogram> {
    let mut hist = Histogram::new(wl);
    for v in values {
        hist.record(v)?;
    }
    Ok(hist)
}
