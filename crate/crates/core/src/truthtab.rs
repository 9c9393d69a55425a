//! Truth tables of arithmetic blocks with don't-cares on unreachable input
//! combinations, don't-care counting (formula and enumeration), Karnaugh-map
//! rendering for small blocks, and segment decomposition of wide blocks.

use crate::error::{Error, Result};
use crate::sparsity::{Interp, ValueSet};

/// Operation computed by a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockOp {
    Add,
    Mul,
}

/// What the block emits relative to the full-width result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutputPolicy {
    /// `max(wl_a, wl_b) + 1` bits for Add, `wl_a + wl_b` for Mul.
    FullWidth,
    /// Keep the `n` most significant bits of the full-width encoding.
    TruncateKeepHigh(u32),
}

/// Description of an arithmetic block: operation, operand word lengths and
/// interpretations, and output policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockSpec {
    pub op: BlockOp,
    pub wl_a: u32,
    pub wl_b: u32,
    pub interp_a: Interp,
    pub interp_b: Interp,
    pub out_policy: OutputPolicy,
}

impl BlockSpec {
    pub fn new(
        op: BlockOp,
        wl_a: u32,
        wl_b: u32,
        interp_a: Interp,
        interp_b: Interp,
        out_policy: OutputPolicy,
    ) -> Result<Self> {
        if wl_a == 0 || wl_b == 0 || wl_a > 16 || wl_b > 16 {
            return Err(Error::Parameter(format!(
                "operand word lengths must be in 1..=16, got {wl_a}/{wl_b}"
            )));
        }
        if op == BlockOp::Add && interp_a != interp_b {
            return Err(Error::Parameter(
                "addition of mixed-signedness operands is not supported".into(),
            ));
        }
        let spec = BlockSpec { op, wl_a, wl_b, interp_a, interp_b, out_policy };
        if let OutputPolicy::TruncateKeepHigh(n) = out_policy {
            if n == 0 || n > spec.full_width() {
                return Err(Error::Parameter(format!(
                    "truncated output width {n} must be in 1..={}",
                    spec.full_width()
                )));
            }
        }
        Ok(spec)
    }

    /// Shorthand for an unsigned full-width block.
    pub fn unsigned(op: BlockOp, wl_a: u32, wl_b: u32) -> Result<Self> {
        BlockSpec::new(op, wl_a, wl_b, Interp::Unsigned, Interp::Unsigned, OutputPolicy::FullWidth)
    }

    /// Width of the untruncated result encoding.
    pub fn full_width(&self) -> u32 {
        match self.op {
            BlockOp::Add => self.wl_a.max(self.wl_b) + 1,
            BlockOp::Mul => self.wl_a + self.wl_b,
        }
    }

    /// Width of the emitted output encoding.
    pub fn out_wl(&self) -> u32 {
        match self.out_policy {
            OutputPolicy::FullWidth => self.full_width(),
            OutputPolicy::TruncateKeepHigh(n) => n,
        }
    }

    pub fn num_inputs(&self) -> u32 {
        self.wl_a + self.wl_b
    }

    /// Signedness of the result encoding: signed if either operand is.
    pub fn out_interp(&self) -> Interp {
        if self.interp_a == Interp::TwosComplement || self.interp_b == Interp::TwosComplement {
            Interp::TwosComplement
        } else {
            Interp::Unsigned
        }
    }

    /// Exact result of the block on operand encodings, as an output encoding.
    ///
    /// The arithmetic is performed on decoded values, encoded at full width,
    /// then truncated per the output policy (logical right shift of the
    /// encoding, which keeps the sign bits of a two's-complement result).
    pub fn eval_encoding(&self, a: u32, b: u32) -> u64 {
        debug_assert!(u64::from(a) < (1u64 << self.wl_a));
        debug_assert!(u64::from(b) < (1u64 << self.wl_b));
        let va = self.interp_a.decode(u64::from(a), self.wl_a);
        let vb = self.interp_b.decode(u64::from(b), self.wl_b);
        let result = match self.op {
            BlockOp::Add => va + vb,
            BlockOp::Mul => va * vb,
        };
        let full = self.full_width();
        let enc = (result as u64) & (((1u128 << full) - 1) as u64);
        match self.out_policy {
            OutputPolicy::FullWidth => enc,
            OutputPolicy::TruncateKeepHigh(n) => enc >> (full - n),
        }
    }

    /// Exact result as a decoded integer value (truncation applied).
    pub fn eval_value(&self, a: u32, b: u32) -> i64 {
        self.out_interp().decode(self.eval_encoding(a, b), self.out_wl())
    }
}

/// One row of a truth table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowValue {
    Specified(u64),
    DontCare,
}

/// Anything that looks like a multi-output truth table over
/// `num_inputs`-bit row indices. Row index bit `num_inputs - 1 - i`
/// corresponds to input column `i`; output bit `o` is the `o`-th least
/// significant result bit.
pub trait TruthSource {
    fn num_inputs(&self) -> u32;
    fn num_outputs(&self) -> u32;
    fn row(&self, index: u64) -> RowValue;
}

/// Lazily enumerable truth table of a block: rows outside
/// `reach_a x reach_b` are don't-cares, all other rows carry the exact
/// arithmetic result.
#[derive(Debug, Clone)]
pub struct TruthTable {
    spec: BlockSpec,
    reach_a: ValueSet,
    reach_b: ValueSet,
}

impl TruthTable {
    pub fn spec(&self) -> &BlockSpec {
        &self.spec
    }

    pub fn reach_a(&self) -> &ValueSet {
        &self.reach_a
    }

    pub fn reach_b(&self) -> &ValueSet {
        &self.reach_b
    }

    /// Value of the row for operand encodings `(a, b)`.
    pub fn row_ab(&self, a: u32, b: u32) -> RowValue {
        if self.reach_a.contains(a) && self.reach_b.contains(b) {
            RowValue::Specified(self.spec.eval_encoding(a, b))
        } else {
            RowValue::DontCare
        }
    }

    /// Total number of rows, `2^(wl_a + wl_b)`.
    pub fn num_rows(&self) -> u64 {
        1u64 << self.spec.num_inputs()
    }

    /// Split a row index into `(a, b)` encodings.
    pub fn split_index(&self, index: u64) -> (u32, u32) {
        let b_mask = (1u64 << self.spec.wl_b) - 1;
        ((index >> self.spec.wl_b) as u32, (index & b_mask) as u32)
    }
}

impl TruthSource for TruthTable {
    fn num_inputs(&self) -> u32 {
        self.spec.num_inputs()
    }

    fn num_outputs(&self) -> u32 {
        self.spec.out_wl()
    }

    fn row(&self, index: u64) -> RowValue {
        let (a, b) = self.split_index(index);
        self.row_ab(a, b)
    }
}

/// A fully materialized table, used for ad-hoc functions (tests, imports).
#[derive(Debug, Clone)]
pub struct DenseTable {
    num_inputs: u32,
    num_outputs: u32,
    rows: Vec<RowValue>,
}

impl DenseTable {
    pub fn new(num_inputs: u32, num_outputs: u32, rows: Vec<RowValue>) -> Result<Self> {
        if rows.len() != 1usize << num_inputs {
            return Err(Error::Dimension(format!(
                "expected {} rows, got {}",
                1usize << num_inputs,
                rows.len()
            )));
        }
        Ok(DenseTable { num_inputs, num_outputs, rows })
    }
}

impl TruthSource for DenseTable {
    fn num_inputs(&self) -> u32 {
        self.num_inputs
    }

    fn num_outputs(&self) -> u32 {
        self.num_outputs
    }

    fn row(&self, index: u64) -> RowValue {
        self.rows[index as usize]
    }
}

/// Build the truth table of `spec` with don't-cares wherever an operand
/// encoding is unreachable.
pub fn gen_block_tt(spec: BlockSpec, reach_a: ValueSet, reach_b: ValueSet) -> Result<TruthTable> {
    if reach_a.word_length() != spec.wl_a || reach_b.word_length() != spec.wl_b {
        return Err(Error::Parameter(format!(
            "value-set word lengths {}/{} do not match operand word lengths {}/{}",
            reach_a.word_length(),
            reach_b.word_length(),
            spec.wl_a,
            spec.wl_b
        )));
    }
    Ok(TruthTable { spec, reach_a, reach_b })
}

/// Enumeration guard for exhaustive row walks.
const ENUM_GUARD_BITS: u32 = 24;

/// Count don't-care rows by walking every row of the table.
pub fn dc_count_enumerate(tt: &TruthTable) -> Result<u64> {
    if tt.spec.num_inputs() > ENUM_GUARD_BITS {
        return Err(Error::Capacity(format!(
            "{} input bits exceed the {ENUM_GUARD_BITS}-bit enumeration guard",
            tt.spec.num_inputs()
        )));
    }
    let mut count = 0;
    for index in 0..tt.num_rows() {
        if matches!(tt.row(index), RowValue::DontCare) {
            count += 1;
        }
    }
    Ok(count)
}

/// Don't-care row count of a block whose inputs are down-sampled by `x` and
/// `x_prime`: `2^(wl_a + wl_b) * (1 - 1/(x * x_prime))`, exact.
pub fn dc_formula_ds(wl_a: u32, wl_b: u32, x: u32, x_prime: u32) -> Result<u64> {
    if !x.is_power_of_two() || !x_prime.is_power_of_two() {
        return Err(Error::Parameter(format!(
            "down-sampling steps must be powers of two, got {x}/{x_prime}"
        )));
    }
    let rows = 1u64 << (wl_a + wl_b);
    Ok(rows - rows / (u64::from(x) * u64::from(x_prime)))
}

/// Result of the printed threshold don't-care count, reported alongside the
/// enumerated count because the two disagree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThDcCount {
    /// `2^(2 wl) * (x / 2^wl) * (x_prime / 2^wl)` as printed; asserted by the
    /// source material, not derived here.
    pub paper_asserted: u64,
}

/// Evaluate the printed closed form for the number of don't-care rows under
/// thresholding on both inputs of a `wl`-bit block. The value is flagged
/// paper-asserted: enumeration via [`dc_count_enumerate`] is normative and
/// generally differs.
pub fn dc_formula_th(wl: u32, x: u32, x_prime: u32) -> Result<ThDcCount> {
    let domain = 1u64 << wl;
    if u64::from(x) > domain || u64::from(x_prime) > domain {
        return Err(Error::Parameter(format!(
            "thresholds {x}/{x_prime} exceed the {wl}-bit domain"
        )));
    }
    Ok(ThDcCount { paper_asserted: u64::from(x) * u64::from(x_prime) })
}

/// A rendered Karnaugh map of one output bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KarnaughMap {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    /// `cells[r][c]` in {'0', '1', 'd'}, indexed by label positions.
    pub cells: Vec<Vec<char>>,
}

impl KarnaughMap {
    /// Text grid with operand-a labels on rows and operand-b labels on
    /// columns.
    pub fn render(&self) -> String {
        let row_w = self.row_labels.iter().map(|l| l.len()).max().unwrap_or(1);
        let col_w = self.col_labels.iter().map(|l| l.len()).max().unwrap_or(1);
        let mut out = String::new();
        out.push_str(&" ".repeat(row_w));
        for label in &self.col_labels {
            out.push(' ');
            out.push_str(&format!("{label:>col_w$}"));
        }
        out.push('\n');
        for (r, label) in self.row_labels.iter().enumerate() {
            out.push_str(&format!("{label:>row_w$}"));
            for cell in &self.cells[r] {
                out.push(' ');
                out.push_str(&format!("{cell:>col_w$}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Label sequence for a `wl`-bit Karnaugh-map axis: the low two bits follow
/// the Gray sequence 00,01,11,10 and any higher bits count in binary, giving
/// 000,001,011,010,100,101,111,110 for three bits.
fn km_axis_sequence(wl: u32) -> Vec<u32> {
    let gray2 = [0u32, 1, 3, 2];
    match wl {
        0 => vec![0],
        1 => vec![0, 1],
        _ => {
            let mut seq = Vec::with_capacity(1 << wl);
            for high in 0..(1u32 << (wl - 2)) {
                for &low in &gray2 {
                    seq.push((high << 2) | low);
                }
            }
            seq
        }
    }
}

/// Render the Karnaugh map of `output_bit` (least-significant bit is 0).
/// Rows are operand-a encodings, columns operand-b encodings.
pub fn km_render(tt: &TruthTable, output_bit: u32) -> Result<KarnaughMap> {
    let spec = tt.spec();
    if spec.wl_a > 4 || spec.wl_b > 4 {
        return Err(Error::Capacity(format!(
            "Karnaugh rendering is limited to 4-bit operands, got {}/{}",
            spec.wl_a, spec.wl_b
        )));
    }
    if output_bit >= spec.out_wl() {
        return Err(Error::Parameter(format!(
            "output bit {output_bit} outside the {}-bit output",
            spec.out_wl()
        )));
    }
    let rows = km_axis_sequence(spec.wl_a);
    let cols = km_axis_sequence(spec.wl_b);
    let label = |v: u32, wl: u32| format!("{v:0width$b}", width = wl as usize);
    let cells = rows
        .iter()
        .map(|&a| {
            cols.iter()
                .map(|&b| match tt.row_ab(a, b) {
                    RowValue::DontCare => 'd',
                    RowValue::Specified(out) => {
                        if (out >> output_bit) & 1 == 1 {
                            '1'
                        } else {
                            '0'
                        }
                    }
                })
                .collect()
        })
        .collect();
    Ok(KarnaughMap {
        row_labels: rows.iter().map(|&v| label(v, spec.wl_a)).collect(),
        col_labels: cols.iter().map(|&v| label(v, spec.wl_b)).collect(),
        cells,
    })
}

/// One segment of a decomposed block, with the bit offsets of its operand
/// fields in the parent operands.
#[derive(Debug, Clone)]
pub struct SegmentBlock {
    pub spec: BlockSpec,
    pub reach_a: ValueSet,
    pub reach_b: ValueSet,
    /// Low bit of the segment's field in parent operand a.
    pub a_lo_bit: u32,
    /// Low bit of the segment's field in parent operand b.
    pub b_lo_bit: u32,
}

/// Decompose a wide block into segment-wide sub-blocks: a multiplier becomes
/// the grid of partial-product sub-multipliers over operand bit fields, an
/// adder a cascade of segment adders. Field extraction works on raw
/// encodings, so sub-blocks are unsigned; sign handling of two's-complement
/// parents is not modeled by the decomposition.
pub fn segmented_blocks(
    spec: &BlockSpec,
    reach_a: &ValueSet,
    reach_b: &ValueSet,
    segment_wl: u32,
) -> Result<Vec<SegmentBlock>> {
    if segment_wl == 0 || spec.wl_a % segment_wl != 0 || spec.wl_b % segment_wl != 0 {
        return Err(Error::Parameter(format!(
            "word lengths {}/{} are not divisible by segment width {segment_wl}",
            spec.wl_a, spec.wl_b
        )));
    }
    if spec.op == BlockOp::Add && spec.wl_a != spec.wl_b {
        return Err(Error::Parameter(
            "segmented adders require equal operand word lengths".into(),
        ));
    }
    let mut segments = Vec::new();
    match spec.op {
        BlockOp::Mul => {
            for i in 0..(spec.wl_a / segment_wl) {
                for j in 0..(spec.wl_b / segment_wl) {
                    let a_lo = i * segment_wl;
                    let b_lo = j * segment_wl;
                    segments.push(SegmentBlock {
                        spec: BlockSpec::unsigned(BlockOp::Mul, segment_wl, segment_wl)?,
                        reach_a: reach_a.project_field(a_lo, segment_wl),
                        reach_b: reach_b.project_field(b_lo, segment_wl),
                        a_lo_bit: a_lo,
                        b_lo_bit: b_lo,
                    });
                }
            }
        }
        BlockOp::Add => {
            for k in 0..(spec.wl_a / segment_wl) {
                let lo = k * segment_wl;
                segments.push(SegmentBlock {
                    spec: BlockSpec::unsigned(BlockOp::Add, segment_wl, segment_wl)?,
                    reach_a: reach_a.project_field(lo, segment_wl),
                    reach_b: reach_b.project_field(lo, segment_wl),
                    a_lo_bit: lo,
                    b_lo_bit: lo,
                });
            }
        }
    }
    Ok(segments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparsity::{reachable_set, NaturalRange, PreprocessChain};
    use num_bigint::BigInt;

    fn chain(s: &str) -> PreprocessChain {
        s.parse().unwrap()
    }

    fn full_tt(spec: BlockSpec) -> TruthTable {
        let a = ValueSet::full(spec.wl_a);
        let b = ValueSet::full(spec.wl_b);
        gen_block_tt(spec, a, b).unwrap()
    }

    fn ds_tt(spec: BlockSpec, x: u32, x_prime: u32) -> TruthTable {
        let ra = reachable_set(
            spec.wl_a,
            spec.interp_a,
            NaturalRange::full(spec.wl_a, spec.interp_a),
            &chain(&format!("ds:{x}")),
        )
        .unwrap();
        let rb = reachable_set(
            spec.wl_b,
            spec.interp_b,
            NaturalRange::full(spec.wl_b, spec.interp_b),
            &chain(&format!("ds:{x_prime}")),
        )
        .unwrap();
        gen_block_tt(spec, ra, rb).unwrap()
    }

    #[test]
    fn add_row_example() {
        let tt = full_tt(BlockSpec::unsigned(BlockOp::Add, 2, 2).unwrap());
        assert_eq!(tt.row_ab(3, 1), RowValue::Specified(4));
    }

    #[test]
    fn ds2_multiplier_dc_pattern() {
        let tt = ds_tt(BlockSpec::unsigned(BlockOp::Mul, 2, 3).unwrap(), 2, 2);
        for a in 0..4u32 {
            for b in 0..8u32 {
                let dc = matches!(tt.row_ab(a, b), RowValue::DontCare);
                assert_eq!(dc, a % 2 == 1 || b % 2 == 1, "row ({a},{b})");
            }
        }
    }

    #[test]
    fn th_multiplier_dc_rows() {
        let spec = BlockSpec::unsigned(BlockOp::Mul, 2, 3).unwrap();
        let rb = reachable_set(3, Interp::Unsigned, NaturalRange::new(0, 7).unwrap(), &chain("th:5:0"))
            .unwrap();
        assert_eq!(rb.iter().collect::<Vec<_>>(), vec![0, 5, 6, 7]);
        let tt = gen_block_tt(spec, ValueSet::full(2), rb).unwrap();
        let dc = dc_count_enumerate(&tt).unwrap();
        assert_eq!(dc, 16);
        for b in [1u32, 2, 3, 4] {
            assert!(matches!(tt.row_ab(0, b), RowValue::DontCare));
        }
    }

    #[test]
    fn dc_enumeration_examples() {
        let precise = full_tt(BlockSpec::unsigned(BlockOp::Add, 4, 4).unwrap());
        assert_eq!(dc_count_enumerate(&precise).unwrap(), 0);

        let tt = ds_tt(BlockSpec::unsigned(BlockOp::Mul, 4, 4).unwrap(), 2, 2);
        assert_eq!(dc_count_enumerate(&tt).unwrap(), 256 * 3 / 4);

        let th_set = reachable_set(
            3,
            Interp::Unsigned,
            NaturalRange::new(0, 7).unwrap(),
            &chain("th:5:0"),
        )
        .unwrap();
        let tt = gen_block_tt(
            BlockSpec::unsigned(BlockOp::Mul, 3, 3).unwrap(),
            th_set.clone(),
            th_set,
        )
        .unwrap();
        assert_eq!(dc_count_enumerate(&tt).unwrap(), 48);
    }

    #[test]
    fn dc_formula_ds_examples() {
        assert_eq!(dc_formula_ds(2, 2, 2, 2).unwrap(), 12);
        assert_eq!(dc_formula_ds(6, 6, 1, 1).unwrap(), 0);
        assert!(dc_formula_ds(4, 4, 3, 1).is_err());
    }

    #[test]
    fn dc_formula_matches_enumeration_on_grid() {
        for wl in 2..=6u32 {
            for &x in &[1u32, 2, 4, 8, 16] {
                for &xp in &[1u32, 2, 4, 8, 16] {
                    if u64::from(x) > 1 << wl || u64::from(xp) > 1 << wl {
                        continue;
                    }
                    let tt = ds_tt(BlockSpec::unsigned(BlockOp::Mul, wl, wl).unwrap(), x, xp);
                    assert_eq!(
                        dc_formula_ds(wl, wl, x, xp).unwrap(),
                        dc_count_enumerate(&tt).unwrap(),
                        "wl={wl} x={x} x'={xp}"
                    );
                }
            }
        }
    }

    #[test]
    fn dc_formula_th_is_paper_asserted_and_differs_from_enumeration() {
        let printed = dc_formula_th(3, 5, 5).unwrap();
        assert_eq!(printed.paper_asserted, 25);
        assert_eq!(dc_formula_th(4, 0, 0).unwrap().paper_asserted, 0);
        // Enumeration of the same configuration gives 48, not 25.
        let th_set = reachable_set(
            3,
            Interp::Unsigned,
            NaturalRange::new(0, 7).unwrap(),
            &chain("th:5:0"),
        )
        .unwrap();
        let tt = gen_block_tt(
            BlockSpec::unsigned(BlockOp::Mul, 3, 3).unwrap(),
            th_set.clone(),
            th_set,
        )
        .unwrap();
        assert_eq!(dc_count_enumerate(&tt).unwrap(), 48);
    }

    #[test]
    fn km_axis_sequences() {
        assert_eq!(km_axis_sequence(2), vec![0, 1, 3, 2]);
        assert_eq!(km_axis_sequence(3), vec![0, 1, 3, 2, 4, 5, 7, 6]);
    }

    #[test]
    fn km_precise_multiplier_has_no_dc() {
        let tt = full_tt(BlockSpec::unsigned(BlockOp::Mul, 2, 3).unwrap());
        let km = km_render(&tt, 2).unwrap();
        assert!(km.cells.iter().flatten().all(|&c| c != 'd'));
        assert_eq!(km.row_labels, vec!["00", "01", "11", "10"]);
        assert_eq!(
            km.col_labels,
            vec!["000", "001", "011", "010", "100", "101", "111", "110"]
        );
    }

    #[test]
    fn km_all_dc_table() {
        let spec = BlockSpec::unsigned(BlockOp::Mul, 2, 2).unwrap();
        let tt = gen_block_tt(spec, ValueSet::empty(2), ValueSet::empty(2)).unwrap();
        let km = km_render(&tt, 0).unwrap();
        assert!(km.cells.iter().flatten().all(|&c| c == 'd'));
    }

    #[test]
    fn km_guards() {
        let tt = full_tt(BlockSpec::unsigned(BlockOp::Mul, 5, 3).unwrap());
        assert!(matches!(km_render(&tt, 0), Err(Error::Capacity(_))));
        let tt = full_tt(BlockSpec::unsigned(BlockOp::Mul, 2, 2).unwrap());
        assert!(matches!(km_render(&tt, 9), Err(Error::Parameter(_))));
    }

    #[test]
    fn segment_decomposition_shapes() {
        let mul8 = BlockSpec::unsigned(BlockOp::Mul, 8, 8).unwrap();
        let segs =
            segmented_blocks(&mul8, &ValueSet::full(8), &ValueSet::full(8), 4).unwrap();
        assert_eq!(segs.len(), 4);
        assert!(segs.iter().all(|s| s.spec.wl_a == 4 && s.spec.wl_b == 4));

        let add12 = BlockSpec::unsigned(BlockOp::Add, 12, 12).unwrap();
        let segs =
            segmented_blocks(&add12, &ValueSet::full(12), &ValueSet::full(12), 4).unwrap();
        assert_eq!(segs.len(), 3);

        let mul4 = BlockSpec::unsigned(BlockOp::Mul, 4, 4).unwrap();
        let segs = segmented_blocks(&mul4, &ValueSet::full(4), &ValueSet::full(4), 4).unwrap();
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].spec, mul4);
        assert_eq!(segs[0].reach_a, ValueSet::full(4));

        assert!(segmented_blocks(&mul8, &ValueSet::full(8), &ValueSet::full(8), 3).is_err());
    }

    /// Independent big-integer recomputation of a block result.
    fn bigint_oracle(spec: &BlockSpec, a: u32, b: u32) -> u64 {
        let decode = |enc: u32, wl: u32, interp: Interp| -> BigInt {
            let v = BigInt::from(enc);
            match interp {
                Interp::Unsigned => v,
                Interp::TwosComplement => {
                    if enc >> (wl - 1) & 1 == 1 {
                        v - (BigInt::from(1) << wl)
                    } else {
                        v
                    }
                }
            }
        };
        let va = decode(a, spec.wl_a, spec.interp_a);
        let vb = decode(b, spec.wl_b, spec.interp_b);
        let result = match spec.op {
            BlockOp::Add => va + vb,
            BlockOp::Mul => va * vb,
        };
        let modulus = BigInt::from(1) << spec.full_width();
        let enc = ((result % &modulus) + &modulus) % &modulus;
        let shifted = match spec.out_policy {
            OutputPolicy::FullWidth => enc,
            OutputPolicy::TruncateKeepHigh(n) => enc >> (spec.full_width() - n),
        };
        u64::try_from(shifted).unwrap()
    }

    #[test]
    fn specified_rows_match_bigint_oracle() {
        let specs = [
            BlockSpec::unsigned(BlockOp::Add, 3, 3).unwrap(),
            BlockSpec::unsigned(BlockOp::Mul, 3, 4).unwrap(),
            BlockSpec::new(
                BlockOp::Mul,
                4,
                4,
                Interp::TwosComplement,
                Interp::TwosComplement,
                OutputPolicy::FullWidth,
            )
            .unwrap(),
            BlockSpec::new(
                BlockOp::Mul,
                4,
                4,
                Interp::Unsigned,
                Interp::TwosComplement,
                OutputPolicy::TruncateKeepHigh(5),
            )
            .unwrap(),
            BlockSpec::new(
                BlockOp::Add,
                3,
                3,
                Interp::TwosComplement,
                Interp::TwosComplement,
                OutputPolicy::TruncateKeepHigh(2),
            )
            .unwrap(),
        ];
        for spec in specs {
            let tt = full_tt(spec);
            for index in 0..tt.num_rows() {
                let (a, b) = tt.split_index(index);
                match tt.row(index) {
                    RowValue::Specified(out) => {
                        assert_eq!(out, bigint_oracle(&spec, a, b), "{spec:?} ({a},{b})")
                    }
                    RowValue::DontCare => panic!("full table has no DC"),
                }
            }
        }
    }

    #[test]
    fn truncate_keeps_high_bits_of_product() {
        let spec = BlockSpec::new(
            BlockOp::Mul,
            8,
            8,
            Interp::Unsigned,
            Interp::Unsigned,
            OutputPolicy::TruncateKeepHigh(8),
        )
        .unwrap();
        for (a, b) in [(200u32, 128u32), (255, 255), (13, 77)] {
            assert_eq!(spec.eval_encoding(a, b), (u64::from(a) * u64::from(b)) >> 8);
        }
    }

    #[test]
    fn signed_multiplication_encodes_twos_complement() {
        let spec = BlockSpec::new(
            BlockOp::Mul,
            4,
            4,
            Interp::TwosComplement,
            Interp::TwosComplement,
            OutputPolicy::FullWidth,
        )
        .unwrap();
        // -2 * 3 = -6 -> 8-bit two's complement 0xFA.
        let a = Interp::TwosComplement.encode(-2, 4).unwrap() as u32;
        let b = Interp::TwosComplement.encode(3, 4).unwrap() as u32;
        assert_eq!(spec.eval_encoding(a, b), 0xFA);
        assert_eq!(spec.eval_value(a, b), -6);
    }
}
