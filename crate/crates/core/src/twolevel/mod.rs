//! Cube algebra and two-level minimization with don't-cares: an exact
//! minimizer (prime generation plus branch-and-bound covering) for small
//! blocks, an expand/irredundant/reduce heuristic for larger ones, cover
//! verification, Berkeley-PLA interop, and segment-wise literal estimates.

mod exact;
mod heuristic;
mod pla;

pub use exact::minimize_exact;
pub use heuristic::minimize_heuristic;
pub use pla::{
    pla_read, pla_write_cover, pla_write_table, PlaFile, PlaOutSym, PlaRow,
};

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::sparsity::ValueSet;
use crate::truthtab::{segmented_blocks, BlockSpec, RowValue, TruthSource};

/// One input position of a cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InputSym {
    Zero,
    One,
    Dash,
}

impl InputSym {
    pub fn to_char(self) -> char {
        match self {
            InputSym::Zero => '0',
            InputSym::One => '1',
            InputSym::Dash => '-',
        }
    }
}

/// A product term over the input columns together with the set of outputs it
/// drives. Input column 0 is the leftmost PLA column (most significant bit
/// of operand a); output bit `o` is the `o`-th least significant result bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cube {
    num_inputs: u32,
    num_outputs: u32,
    /// Bit `p` set: row-index bit `p` is fixed (not a dash).
    care: u64,
    /// Fixed bit values; zero on dash positions.
    value: u64,
    /// Participation mask, bit `o` = output `o`.
    outputs: u32,
}

impl Cube {
    pub fn new(num_inputs: u32, num_outputs: u32, care: u64, value: u64, outputs: u32) -> Self {
        let in_mask = mask(num_inputs);
        debug_assert_eq!(care & !in_mask, 0);
        debug_assert_eq!(value & !care, 0);
        debug_assert_eq!(u64::from(outputs) & !mask(num_outputs), 0);
        Cube { num_inputs, num_outputs, care: care & in_mask, value: value & care, outputs }
    }

    pub fn from_symbols(inputs: &[InputSym], outputs: &[bool]) -> Result<Self> {
        if inputs.is_empty() || inputs.len() > 64 || outputs.len() > 32 {
            return Err(Error::Parameter("cube dimensions out of range".into()));
        }
        if !outputs.iter().any(|&p| p) {
            return Err(Error::Parameter("cube participates in no output".into()));
        }
        let n = inputs.len() as u32;
        let mut care = 0u64;
        let mut value = 0u64;
        for (col, sym) in inputs.iter().enumerate() {
            let bit = n - 1 - col as u32;
            match sym {
                InputSym::Zero => care |= 1 << bit,
                InputSym::One => {
                    care |= 1 << bit;
                    value |= 1 << bit;
                }
                InputSym::Dash => {}
            }
        }
        let mut out_mask = 0u32;
        for (col, &p) in outputs.iter().enumerate() {
            if p {
                out_mask |= 1 << (outputs.len() - 1 - col);
            }
        }
        Ok(Cube::new(n, outputs.len() as u32, care, value, out_mask))
    }

    pub fn num_inputs(&self) -> u32 {
        self.num_inputs
    }

    pub fn num_outputs(&self) -> u32 {
        self.num_outputs
    }

    /// Symbol at input column `col` (0 = leftmost).
    pub fn input_sym(&self, col: u32) -> InputSym {
        let bit = self.num_inputs - 1 - col;
        if self.care >> bit & 1 == 0 {
            InputSym::Dash
        } else if self.value >> bit & 1 == 1 {
            InputSym::One
        } else {
            InputSym::Zero
        }
    }

    /// Whether the cube drives output bit `o`.
    pub fn output_participates(&self, o: u32) -> bool {
        self.outputs >> o & 1 == 1
    }

    pub fn output_mask(&self) -> u32 {
        self.outputs
    }

    /// Number of non-dash input positions.
    pub fn literal_count(&self) -> u32 {
        self.care.count_ones()
    }

    pub fn contains_row(&self, row: u64) -> bool {
        (row ^ self.value) & self.care == 0
    }

    /// True when every row of `other` is a row of `self` and `other` drives
    /// no output `self` does not.
    pub fn covers(&self, other: &Cube) -> bool {
        self.care & !other.care == 0
            && (self.value ^ other.value) & self.care == 0
            && other.outputs & !self.outputs == 0
    }

    fn key(&self) -> (Vec<InputSym>, u32) {
        let syms = (0..self.num_inputs).map(|c| self.input_sym(c)).collect();
        // Higher outputs-first columns compare first in the PLA text; the
        // complemented mask gives '1' < '0' ordering per column.
        (syms, !self.outputs)
    }
}

impl PartialOrd for Cube {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cube {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for col in 0..self.num_inputs {
            write!(f, "{}", self.input_sym(col).to_char())?;
        }
        write!(f, " ")?;
        for col in 0..self.num_outputs {
            let o = self.num_outputs - 1 - col;
            write!(f, "{}", if self.output_participates(o) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// Where a cover came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Exact,
    Heuristic,
    Imported,
}

/// A multi-output sum-of-products: a set of cubes in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    num_inputs: u32,
    num_outputs: u32,
    cubes: Vec<Cube>,
    provenance: Provenance,
}

impl Cover {
    /// Build a cover; cubes are sorted canonically and deduplicated.
    pub fn new(
        num_inputs: u32,
        num_outputs: u32,
        mut cubes: Vec<Cube>,
        provenance: Provenance,
    ) -> Result<Self> {
        for cube in &cubes {
            if cube.num_inputs != num_inputs || cube.num_outputs != num_outputs {
                return Err(Error::Dimension(format!(
                    "cube {cube} does not match cover dimensions {num_inputs}x{num_outputs}"
                )));
            }
            if cube.outputs == 0 {
                return Err(Error::Parameter(format!("cube {cube} participates in no output")));
            }
        }
        cubes.sort();
        cubes.dedup();
        Ok(Cover { num_inputs, num_outputs, cubes, provenance })
    }

    pub fn empty(num_inputs: u32, num_outputs: u32, provenance: Provenance) -> Self {
        Cover { num_inputs, num_outputs, cubes: Vec::new(), provenance }
    }

    pub fn num_inputs(&self) -> u32 {
        self.num_inputs
    }

    pub fn num_outputs(&self) -> u32 {
        self.num_outputs
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    pub fn cube_count(&self) -> usize {
        self.cubes.len()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Total input literals; each cube is counted once regardless of how
    /// many outputs it drives.
    pub fn literal_count(&self) -> u64 {
        self.cubes.iter().map(|c| u64::from(c.literal_count())).sum()
    }

    /// Output mask asserted by the cover on one input row.
    pub fn evaluate_row(&self, row: u64) -> u32 {
        self.cubes
            .iter()
            .filter(|c| c.contains_row(row))
            .fold(0, |acc, c| acc | c.outputs)
    }
}

/// Counters reported by a minimization run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinimizeStats {
    pub literals: u64,
    pub cubes: usize,
    /// Improvement loop count for the heuristic, search-node count for the
    /// exact solver.
    pub iterations: u64,
    pub exact: bool,
}

/// The canonical one-cube-per-specified-row cover (rows whose outputs are
/// all zero contribute nothing).
pub fn canonical_cover(source: &impl TruthSource) -> Result<Cover> {
    let n = source.num_inputs();
    let m = source.num_outputs();
    if n > 22 {
        return Err(Error::Capacity(format!(
            "{n} input bits exceed the 22-bit canonical-cover guard"
        )));
    }
    let mut cubes = Vec::new();
    for row in 0..(1u64 << n) {
        if let RowValue::Specified(out) = source.row(row) {
            let out = (out & mask(m)) as u32;
            if out != 0 {
                cubes.push(Cube::new(n, m, mask(n), row, out));
            }
        }
    }
    Cover::new(n, m, cubes, Provenance::Imported)
}

/// One verification failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// A specified ON minterm of an output is covered by no cube.
    MissingOn,
    /// A cube asserts an output on a row where that output is specified 0.
    AssertedOff,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub row: u64,
    pub output: u32,
    pub kind: ViolationKind,
}

/// Result of an exhaustive cover check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub ok: bool,
    pub violation_count: u64,
    /// At most the first ten violations, in row order.
    pub violations: Vec<Violation>,
    pub checked_rows: u64,
}

const VERIFY_GUARD_BITS: u32 = 22;
const VIOLATION_SAMPLE: usize = 10;

/// Exhaustively check `cover` against `source`: every specified ON minterm
/// of each output must be covered, no output may be asserted on a specified
/// OFF minterm, and don't-care rows are unconstrained.
pub fn verify_cover(cover: &Cover, source: &impl TruthSource) -> Result<VerifyReport> {
    let n = source.num_inputs();
    let m = source.num_outputs();
    if cover.num_inputs() != n || cover.num_outputs() != m {
        return Err(Error::Dimension(format!(
            "cover is {}x{} but the table is {n}x{m}",
            cover.num_inputs(),
            cover.num_outputs()
        )));
    }
    if n > VERIFY_GUARD_BITS {
        return Err(Error::Capacity(format!(
            "{n} input bits exceed the {VERIFY_GUARD_BITS}-bit verification guard"
        )));
    }
    let mut violations = Vec::new();
    let mut violation_count = 0u64;
    let rows = 1u64 << n;
    for row in 0..rows {
        let spec_out = match source.row(row) {
            RowValue::DontCare => continue,
            RowValue::Specified(out) => (out & mask(m)) as u32,
        };
        let asserted = cover.evaluate_row(row);
        let missing = spec_out & !asserted;
        let extra = asserted & !spec_out;
        for o in 0..m {
            let kind = if missing >> o & 1 == 1 {
                Some(ViolationKind::MissingOn)
            } else if extra >> o & 1 == 1 {
                Some(ViolationKind::AssertedOff)
            } else {
                None
            };
            if let Some(kind) = kind {
                violation_count += 1;
                if violations.len() < VIOLATION_SAMPLE {
                    violations.push(Violation { row, output: o, kind });
                }
            }
        }
    }
    Ok(VerifyReport { ok: violation_count == 0, violation_count, violations, checked_rows: rows })
}

/// Minimization flavor for operations that can use either engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinimizeMode {
    Exact,
    Heuristic { max_iters: u64 },
}

/// Per-segment outcome inside a [`SegmentEstimate`].
#[derive(Debug, Clone)]
pub struct SegmentResult {
    pub spec: BlockSpec,
    pub a_lo_bit: u32,
    pub b_lo_bit: u32,
    pub stats: MinimizeStats,
}

/// Sum of independently minimized segment literal counts.
#[derive(Debug, Clone)]
pub struct SegmentEstimate {
    pub total_literals: u64,
    pub total_cubes: u64,
    pub segments: Vec<SegmentResult>,
    /// Always true: the adders that recombine segment results (and any sign
    /// correction of two's-complement parents) are not part of the count.
    pub excludes_recombination: bool,
}

/// Estimate the literal cost of a wide block by decomposing it into
/// segment-wide sub-blocks, minimizing each against its projected value
/// sets, and summing the literal counts.
pub fn segmented_literal_estimate(
    spec: &BlockSpec,
    reach_a: &ValueSet,
    reach_b: &ValueSet,
    segment_wl: u32,
    mode: MinimizeMode,
) -> Result<SegmentEstimate> {
    use std::collections::BTreeMap;

    let segments = segmented_blocks(spec, reach_a, reach_b, segment_wl)?;
    // Identical sub-problems (same spec and operand sets) are minimized once.
    let mut memo: BTreeMap<String, MinimizeStats> = BTreeMap::new();
    let mut results = Vec::with_capacity(segments.len());
    let mut total_literals = 0u64;
    let mut total_cubes = 0u64;
    for seg in segments {
        let key = format!(
            "{:?}|{:?}|{:?}",
            seg.spec,
            seg.reach_a.runs(),
            seg.reach_b.runs()
        );
        let stats = match memo.get(&key) {
            Some(&stats) => stats,
            None => {
                let tt = crate::truthtab::gen_block_tt(
                    seg.spec,
                    seg.reach_a.clone(),
                    seg.reach_b.clone(),
                )?;
                let (_, stats) = match mode {
                    MinimizeMode::Exact => minimize_exact(&tt)?,
                    MinimizeMode::Heuristic { max_iters } => minimize_heuristic(&tt, max_iters)?,
                };
                memo.insert(key, stats);
                stats
            }
        };
        total_literals += stats.literals;
        total_cubes += stats.cubes as u64;
        results.push(SegmentResult {
            spec: seg.spec,
            a_lo_bit: seg.a_lo_bit,
            b_lo_bit: seg.b_lo_bit,
            stats,
        });
    }
    Ok(SegmentEstimate {
        total_literals,
        total_cubes,
        segments: results,
        excludes_recombination: true,
    })
}

pub(crate) fn mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Materialized ON/OFF structure of a truth source, shared by both
/// minimizers.
pub(crate) struct FunctionSets {
    pub n: u32,
    pub m: u32,
    /// Per output: sorted ON minterms.
    pub on: Vec<Vec<u64>>,
    /// Per output: sorted OFF minterms.
    pub off: Vec<Vec<u64>>,
    /// Per output: OFF membership bitset over rows.
    pub off_bits: Vec<Vec<u64>>,
}

impl FunctionSets {
    pub fn build(source: &impl TruthSource) -> FunctionSets {
        let n = source.num_inputs();
        let m = source.num_outputs();
        let words = ((1usize << n) + 63) / 64;
        let mut on = vec![Vec::new(); m as usize];
        let mut off = vec![Vec::new(); m as usize];
        let mut off_bits = vec![vec![0u64; words]; m as usize];
        for row in 0..(1u64 << n) {
            if let RowValue::Specified(out) = source.row(row) {
                for o in 0..m {
                    if out >> o & 1 == 1 {
                        on[o as usize].push(row);
                    } else {
                        off[o as usize].push(row);
                        off_bits[o as usize][(row / 64) as usize] |= 1 << (row % 64);
                    }
                }
            }
        }
        FunctionSets { n, m, on, off, off_bits }
    }

    /// Whether the input cube `(care, value)` contains any OFF minterm of
    /// output `o`. Scans whichever of the cube or the OFF list is smaller.
    pub fn cube_hits_off(&self, care: u64, value: u64, o: u32) -> bool {
        let dashes = (!care & mask(self.n)).count_ones();
        let off = &self.off[o as usize];
        if off.is_empty() {
            return false;
        }
        if dashes <= 12 || (1u64 << dashes) <= off.len() as u64 {
            let bits = &self.off_bits[o as usize];
            let mut hit = false;
            for_each_cube_row(care, value, self.n, &mut |row| {
                if bits[(row / 64) as usize] >> (row % 64) & 1 == 1 {
                    hit = true;
                    false
                } else {
                    true
                }
            });
            hit
        } else {
            off.iter().any(|&row| (row ^ value) & care == 0)
        }
    }
}

/// Call `f` for every row of the input cube until it returns false.
pub(crate) fn for_each_cube_row(care: u64, value: u64, n: u32, f: &mut impl FnMut(u64) -> bool) {
    let free = !care & mask(n);
    let mut sub = 0u64;
    loop {
        if !f(value | sub) {
            return;
        }
        // Enumerate submasks of the free positions in increasing order.
        sub = (sub.wrapping_sub(free)) & free;
        if sub == 0 {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::truthtab::DenseTable;

    fn cube(inputs: &str, outputs: &str) -> Cube {
        let syms: Vec<InputSym> = inputs
            .chars()
            .map(|c| match c {
                '0' => InputSym::Zero,
                '1' => InputSym::One,
                '-' => InputSym::Dash,
                _ => panic!("bad symbol"),
            })
            .collect();
        let outs: Vec<bool> = outputs.chars().map(|c| c == '1').collect();
        Cube::from_symbols(&syms, &outs).unwrap()
    }

    pub(crate) fn table_from_str(num_inputs: u32, num_outputs: u32, rows: &[&str]) -> DenseTable {
        let parsed = rows
            .iter()
            .map(|r| {
                if r.contains('d') {
                    RowValue::DontCare
                } else {
                    RowValue::Specified(u64::from_str_radix(r, 2).unwrap())
                }
            })
            .collect();
        DenseTable::new(num_inputs, num_outputs, parsed).unwrap()
    }

    #[test]
    fn cube_symbols_roundtrip() {
        let c = cube("1-0", "10");
        assert_eq!(c.input_sym(0), InputSym::One);
        assert_eq!(c.input_sym(1), InputSym::Dash);
        assert_eq!(c.input_sym(2), InputSym::Zero);
        assert!(c.output_participates(1));
        assert!(!c.output_participates(0));
        assert_eq!(c.literal_count(), 2);
        assert_eq!(c.to_string(), "1-0 10");
    }

    #[test]
    fn cube_row_containment() {
        let c = cube("1-0", "1");
        assert!(c.contains_row(0b100));
        assert!(c.contains_row(0b110));
        assert!(!c.contains_row(0b101));
        assert!(!c.contains_row(0b000));
    }

    #[test]
    fn cube_covering() {
        let big = cube("1--", "11");
        let small = cube("1-0", "01");
        assert!(big.covers(&small));
        assert!(!small.covers(&big));
    }

    #[test]
    fn cover_dedupes_and_sorts() {
        let a = cube("1-0", "1");
        let b = cube("01-", "1");
        let cover = Cover::new(3, 1, vec![a, b, a], Provenance::Imported).unwrap();
        assert_eq!(cover.cube_count(), 2);
        assert_eq!(cover.cubes()[0], b);
        assert_eq!(cover.literal_count(), 4);
    }

    #[test]
    fn verify_canonical_cover_passes() {
        let table = table_from_str(2, 2, &["00", "01", "10", "d"]);
        let cover = canonical_cover(&table).unwrap();
        let report = verify_cover(&cover, &table).unwrap();
        assert!(report.ok, "{report:?}");
    }

    #[test]
    fn verify_empty_cover_cites_missing_row() {
        let table = table_from_str(2, 1, &["0", "1", "0", "0"]);
        let cover = Cover::empty(2, 1, Provenance::Imported);
        let report = verify_cover(&cover, &table).unwrap();
        assert!(!report.ok);
        assert_eq!(
            report.violations,
            vec![Violation { row: 1, output: 0, kind: ViolationKind::MissingOn }]
        );
    }

    #[test]
    fn verify_flags_asserted_off() {
        let table = table_from_str(2, 1, &["0", "0", "0", "0"]);
        let cover = Cover::new(2, 1, vec![cube("--", "1")], Provenance::Imported).unwrap();
        let report = verify_cover(&cover, &table).unwrap();
        assert!(!report.ok);
        assert_eq!(report.violation_count, 4);
        assert!(report
            .violations
            .iter()
            .all(|v| v.kind == ViolationKind::AssertedOff));
    }

    #[test]
    fn verify_dimension_mismatch() {
        let table = table_from_str(2, 1, &["0", "1", "1", "0"]);
        let cover = Cover::empty(3, 1, Provenance::Imported);
        assert!(matches!(verify_cover(&cover, &table), Err(Error::Dimension(_))));
    }

    #[test]
    fn cube_row_enumeration_visits_each_row_once() {
        let c = cube("1--0", "1");
        let mut rows = Vec::new();
        for_each_cube_row(c.care, c.value, 4, &mut |row| {
            rows.push(row);
            true
        });
        rows.sort_unstable();
        assert_eq!(rows, vec![0b1000, 0b1010, 0b1100, 0b1110]);
    }
}
