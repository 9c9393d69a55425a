//! Behavioral fixed-point models of preprocessed arithmetic blocks: a block
//! computes the precise operation on chain-preprocessed operands, so
//! don't-care rows never arise functionally. Strict blocks reject raw inputs
//! outside their declared natural ranges.

use crate::error::{Error, Result};
use crate::sparsity::{reachable_set, Interp, NaturalRange, PreprocessChain, ValueSet};
use crate::truthtab::{BlockOp, BlockSpec};

/// An integer encoding together with its width and interpretation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedWord {
    bits: u32,
    wl: u32,
    interp: Interp,
}

impl FixedWord {
    pub fn from_encoding(bits: u32, wl: u32, interp: Interp) -> Result<Self> {
        if wl == 0 || wl > 32 || (wl < 32 && bits >= 1 << wl) {
            return Err(Error::Parameter(format!(
                "encoding {bits} does not fit a {wl}-bit word"
            )));
        }
        Ok(FixedWord { bits, wl, interp })
    }

    pub fn unsigned(value: u64, wl: u32) -> Result<Self> {
        let bits = Interp::Unsigned.encode(i64::try_from(value).map_err(|_| {
            Error::Parameter(format!("value {value} too large"))
        })?, wl)?;
        Ok(FixedWord { bits: bits as u32, wl, interp: Interp::Unsigned })
    }

    pub fn signed(value: i64, wl: u32) -> Result<Self> {
        let bits = Interp::TwosComplement.encode(value, wl)?;
        Ok(FixedWord { bits: bits as u32, wl, interp: Interp::TwosComplement })
    }

    pub fn encoding(&self) -> u32 {
        self.bits
    }

    pub fn word_length(&self) -> u32 {
        self.wl
    }

    pub fn interp(&self) -> Interp {
        self.interp
    }

    /// Decoded integer value.
    pub fn to_int(&self) -> i64 {
        self.interp.decode(u64::from(self.bits), self.wl)
    }
}

/// Whether out-of-natural-range raw inputs are rejected or evaluated
/// precisely (one legal completion of the don't-care rows).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strictness {
    Strict,
    Permissive,
}

/// A preprocessed arithmetic block bound to its operand declarations.
#[derive(Debug, Clone)]
pub struct PpcBlock {
    spec: BlockSpec,
    chain_a: PreprocessChain,
    chain_b: PreprocessChain,
    natural_a: NaturalRange,
    natural_b: NaturalRange,
    strictness: Strictness,
}

impl PpcBlock {
    pub fn new(
        spec: BlockSpec,
        chain_a: PreprocessChain,
        chain_b: PreprocessChain,
        natural_a: NaturalRange,
        natural_b: NaturalRange,
        strictness: Strictness,
    ) -> Result<Self> {
        chain_a.validate(spec.wl_a, spec.interp_a)?;
        chain_b.validate(spec.wl_b, spec.interp_b)?;
        natural_a.validate(spec.wl_a, spec.interp_a)?;
        natural_b.validate(spec.wl_b, spec.interp_b)?;
        Ok(PpcBlock { spec, chain_a, chain_b, natural_a, natural_b, strictness })
    }

    /// A fully precise block over the whole domain.
    pub fn precise(spec: BlockSpec) -> Result<Self> {
        PpcBlock::new(
            spec,
            PreprocessChain::identity(),
            PreprocessChain::identity(),
            NaturalRange::full(spec.wl_a, spec.interp_a),
            NaturalRange::full(spec.wl_b, spec.interp_b),
            Strictness::Permissive,
        )
    }

    pub fn spec(&self) -> &BlockSpec {
        &self.spec
    }

    pub fn chain_a(&self) -> &PreprocessChain {
        &self.chain_a
    }

    pub fn chain_b(&self) -> &PreprocessChain {
        &self.chain_b
    }

    /// Reachable encodings of operand a after range analysis and
    /// preprocessing.
    pub fn reach_a(&self) -> Result<ValueSet> {
        reachable_set(self.spec.wl_a, self.spec.interp_a, self.natural_a, &self.chain_a)
    }

    pub fn reach_b(&self) -> Result<ValueSet> {
        reachable_set(self.spec.wl_b, self.spec.interp_b, self.natural_b, &self.chain_b)
    }

    fn check_operand(&self, word: FixedWord, wl: u32, interp: Interp, natural: &NaturalRange, name: &str) -> Result<()> {
        if word.word_length() != wl || word.interp() != interp {
            return Err(Error::Parameter(format!(
                "operand {name} is {}-bit {:?}, block expects {wl}-bit {interp:?}",
                word.word_length(),
                word.interp()
            )));
        }
        if self.strictness == Strictness::Strict && !natural.contains(word.to_int()) {
            return Err(Error::RangeViolation(format!(
                "operand {name} value {} outside natural range {}",
                word.to_int(),
                natural
            )));
        }
        Ok(())
    }

    fn eval(&self, a: FixedWord, b: FixedWord) -> Result<FixedWord> {
        self.check_operand(a, self.spec.wl_a, self.spec.interp_a, &self.natural_a, "a")?;
        self.check_operand(b, self.spec.wl_b, self.spec.interp_b, &self.natural_b, "b")?;
        let pa = self.chain_a.apply(a.encoding(), self.spec.wl_a, self.spec.interp_a)?;
        let pb = self.chain_b.apply(b.encoding(), self.spec.wl_b, self.spec.interp_b)?;
        let out = self.spec.eval_encoding(pa, pb);
        FixedWord::from_encoding(out as u32, self.spec.out_wl(), self.spec.out_interp())
    }
}

/// Evaluate a preprocessed adder: the precise sum of chain-preprocessed
/// operands at the spec's output width.
pub fn ppa_eval(block: &PpcBlock, a: FixedWord, b: FixedWord) -> Result<FixedWord> {
    if block.spec().op != BlockOp::Add {
        return Err(Error::Parameter("ppa_eval needs an Add block".into()));
    }
    block.eval(a, b)
}

/// Evaluate a preprocessed multiplier, output policy applied.
pub fn ppm_eval(block: &PpcBlock, a: FixedWord, b: FixedWord) -> Result<FixedWord> {
    if block.spec().op != BlockOp::Mul {
        return Err(Error::Parameter("ppm_eval needs a Mul block".into()));
    }
    block.eval(a, b)
}

/// Accumulator width of the multiply-accumulate datapath, sized so that 960
/// accumulations of the widest product cannot wrap (960 * 159 * 128 fits
/// well inside 25 bits of magnitude).
pub const MAC_ACC_WL: u32 = 26;

/// One multiply-accumulate step: `acc + ppm(block, pixel, weight)` with the
/// accumulator held at [`MAC_ACC_WL`] bits two's complement; overflow is an
/// error, never a silent wrap.
pub fn mac_step(
    acc: FixedWord,
    pixel: FixedWord,
    weight: FixedWord,
    block: &PpcBlock,
) -> Result<FixedWord> {
    if acc.word_length() != MAC_ACC_WL || acc.interp() != Interp::TwosComplement {
        return Err(Error::Parameter(format!(
            "accumulator must be {MAC_ACC_WL}-bit two's complement"
        )));
    }
    let product = ppm_eval(block, pixel, weight)?;
    let sum = acc.to_int() + product.to_int();
    FixedWord::signed(sum, MAC_ACC_WL)
        .map_err(|_| Error::Overflow(format!("MAC accumulator overflow at {sum}")))
}

/// A zeroed MAC accumulator.
pub fn mac_acc_zero() -> FixedWord {
    FixedWord::signed(0, MAC_ACC_WL).expect("zero fits")
}
