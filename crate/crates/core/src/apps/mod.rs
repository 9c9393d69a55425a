//! Fixed-point application pipelines (Gaussian denoising filter, image
//! blending, MAC dot product), PGM image I/O, PSNR/MSE quality metrics, and
//! per-signal range tracing.

mod blend;
mod gaussian;
mod pgm;

pub use blend::blend;
pub use gaussian::gaussian_filter;
pub use pgm::{pgm_read, pgm_read_path, pgm_write, pgm_write_path};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::fxblocks::{mac_acc_zero, mac_step, FixedWord, PpcBlock};
use crate::sparsity::{Histogram, PreprocessChain, ValueSet};

/// A row-major 8-bit grayscale image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageU8 {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl ImageU8 {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != width as usize * height as usize {
            return Err(Error::Dimension(format!(
                "{}x{} image needs {} pixels, got {}",
                width,
                height,
                width as usize * height as usize,
                pixels.len()
            )));
        }
        Ok(ImageU8 { width, height, pixels })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    /// Edge-replicated read: coordinates clamp to the frame.
    pub fn get_clamped(&self, x: i64, y: i64) -> u8 {
        let cx = x.clamp(0, i64::from(self.width) - 1) as u32;
        let cy = y.clamp(0, i64::from(self.height) - 1) as u32;
        self.get(cx, cy)
    }

    pub fn same_dimensions(&self, other: &ImageU8) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// Apply a preprocessing chain to every pixel.
pub fn preprocess_image(img: &ImageU8, chain: &PreprocessChain) -> Result<ImageU8> {
    chain.validate(8, crate::sparsity::Interp::Unsigned)?;
    let pixels = img
        .pixels
        .iter()
        .map(|&p| {
            chain
                .apply(u32::from(p), 8, crate::sparsity::Interp::Unsigned)
                .map(|v| v as u8)
        })
        .collect::<Result<Vec<u8>>>()?;
    ImageU8::new(img.width, img.height, pixels)
}

/// Peak signal-to-noise ratio against a reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psnr {
    /// The images are identical (zero MSE).
    Infinite,
    Db(f64),
}

impl Psnr {
    pub fn as_db(&self) -> f64 {
        match self {
            Psnr::Infinite => f64::INFINITY,
            Psnr::Db(v) => *v,
        }
    }
}

/// Exact MSE plus the derived PSNR of a test image against a reference.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    pub mse: BigRational,
    pub psnr: Psnr,
    pub sse: u64,
    pub pixels: u64,
}

/// Compute PSNR = `10 log10(255^2 / mse)` with an exact integer
/// sum-of-squared-differences and a single final float evaluation.
pub fn psnr(reference: &ImageU8, test: &ImageU8) -> Result<QualityReport> {
    if !reference.same_dimensions(test) {
        return Err(Error::Dimension(format!(
            "reference is {}x{}, test is {}x{}",
            reference.width, reference.height, test.width, test.height
        )));
    }
    let mut sse: u64 = 0;
    for (&a, &b) in reference.pixels.iter().zip(&test.pixels) {
        let d = i64::from(a) - i64::from(b);
        sse += (d * d) as u64;
    }
    let pixels = u64::from(reference.width) * u64::from(reference.height);
    let mse = BigRational::new(BigInt::from(sse), BigInt::from(pixels));
    let psnr = if sse == 0 {
        Psnr::Infinite
    } else {
        let mse_f = sse as f64 / pixels as f64;
        Psnr::Db(10.0 * (255.0f64 * 255.0 / mse_f).log10())
    };
    Ok(QualityReport { mse, psnr, sse, pixels })
}

/// Histograms of every named signal observed during a pipeline run.
#[derive(Debug, Clone)]
pub struct SignalTrace {
    signals: BTreeMap<String, Histogram>,
}

impl SignalTrace {
    pub fn signals(&self) -> &BTreeMap<String, Histogram> {
        &self.signals
    }

    pub fn histogram(&self, name: &str) -> Option<&Histogram> {
        self.signals.get(name)
    }

    pub fn observed_set(&self, name: &str) -> Option<ValueSet> {
        self.signals.get(name).map(|h| h.observed_set())
    }
}

/// Incremental trace recorder with index-addressed signals; pipelines record
/// through integer handles and convert to the named map once at the end.
pub(crate) struct TraceBuilder {
    names: Vec<&'static str>,
    hists: Vec<Histogram>,
}

impl TraceBuilder {
    pub fn new(signals: &[(&'static str, u32)]) -> TraceBuilder {
        TraceBuilder {
            names: signals.iter().map(|&(n, _)| n).collect(),
            hists: signals.iter().map(|&(_, wl)| Histogram::new(wl)).collect(),
        }
    }

    #[inline]
    pub fn record(&mut self, signal: usize, value: u32) {
        self.hists[signal].record(value).expect("traced value exceeds declared word length");
    }

    pub fn finish(self) -> SignalTrace {
        SignalTrace {
            signals: self
                .names
                .into_iter()
                .map(String::from)
                .zip(self.hists)
                .collect(),
        }
    }
}

/// Per-signal summary derived from a trace.
#[derive(Debug, Clone)]
pub struct SignalReport {
    pub name: String,
    pub wl: u32,
    pub observed_values: u64,
    pub domain_size: u64,
    /// `1 - observed/domain`.
    pub sparsity: f64,
    /// Number of low bits cleared in every observed value.
    pub cleared_low_bits: u32,
    /// True when all observed values share at least one cleared low bit.
    pub ds_like: bool,
}

/// Summarize a trace: per-signal observed set size, sparsity percentage, and
/// a flag for down-sampling-like regularity.
pub fn trace_report(trace: &SignalTrace) -> Vec<SignalReport> {
    trace
        .signals()
        .iter()
        .map(|(name, hist)| {
            let wl = hist.word_length();
            let observed = hist.observed_set();
            let domain_size = 1u64 << wl;
            let or_of_values = observed.iter().fold(0u32, |acc, v| acc | v);
            let cleared_low_bits = if observed.is_empty() {
                wl
            } else if or_of_values == 0 {
                wl
            } else {
                or_of_values.trailing_zeros().min(wl)
            };
            SignalReport {
                name: name.clone(),
                wl,
                observed_values: observed.len(),
                domain_size,
                sparsity: 1.0 - observed.len() as f64 / domain_size as f64,
                cleared_low_bits,
                ds_like: !observed.is_empty() && cleared_low_bits >= 1,
            }
        })
        .collect()
}

/// Dot product of up to 960 pixel/weight pairs as a left fold of MAC steps
/// from a zero accumulator.
pub fn mac_dotproduct(
    pixels: &[FixedWord],
    weights: &[FixedWord],
    block: &PpcBlock,
) -> Result<FixedWord> {
    if pixels.len() != weights.len() {
        return Err(Error::Dimension(format!(
            "{} pixels but {} weights",
            pixels.len(),
            weights.len()
        )));
    }
    if pixels.len() > 960 {
        return Err(Error::Capacity(format!(
            "{} terms exceed the 960-term accumulator budget",
            pixels.len()
        )));
    }
    let mut acc = mac_acc_zero();
    for (&p, &w) in pixels.iter().zip(weights) {
        acc = mac_step(acc, p, w, block)?;
    }
    Ok(acc)
}

#[cfg(test)]
pub(crate) mod testimg {
    use super::ImageU8;

    /// Deterministic pseudo-natural test image: smooth sinusoid mix plus a
    /// small hash-noise term, clamped away from the extremes.
    pub fn synthetic(width: u32, height: u32, seed: u64) -> ImageU8 {
        let mut pixels = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                let fx = f64::from(x);
                let fy = f64::from(y);
                let s = seed as f64;
                let base = 120.0
                    + 52.0 * ((fx / 97.0 + s * 0.37).sin() * (fy / 61.0 - s * 0.11).cos())
                    + 26.0 * ((fx + 2.0 * fy) / 37.0 + s).sin()
                    + 13.0 * ((3.0 * fx - fy) / 17.0 - s * 1.7).cos();
                let mut h = (u64::from(x) << 32 | u64::from(y)) ^ seed.wrapping_mul(0x9E3779B97F4A7C15);
                h ^= h >> 33;
                h = h.wrapping_mul(0xFF51AFD7ED558CCD);
                h ^= h >> 33;
                let noise = (h % 17) as f64 - 8.0;
                pixels.push((base + noise).round().clamp(2.0, 253.0) as u8);
            }
        }
        ImageU8::new(width, height, pixels).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparsity::Interp;
    use crate::truthtab::{BlockOp, BlockSpec};
    use crate::fxblocks::{PpcBlock, Strictness};
    use crate::sparsity::NaturalRange;

    #[test]
    fn psnr_examples() {
        let a = ImageU8::new(4, 4, vec![7; 16]).unwrap();
        let report = psnr(&a, &a.clone()).unwrap();
        assert_eq!(report.psnr, Psnr::Infinite);
        assert_eq!(report.sse, 0);

        let b = ImageU8::new(4, 4, vec![8; 16]).unwrap();
        let report = psnr(&a, &b).unwrap();
        match report.psnr {
            Psnr::Db(v) => assert!((v - 48.1308).abs() < 1e-3, "{v}"),
            Psnr::Infinite => panic!("psnr must be finite"),
        }

        let black = ImageU8::new(2, 2, vec![0; 4]).unwrap();
        let white = ImageU8::new(2, 2, vec![255; 4]).unwrap();
        let report = psnr(&black, &white).unwrap();
        match report.psnr {
            Psnr::Db(v) => assert!(v.abs() < 1e-12, "{v}"),
            Psnr::Infinite => panic!(),
        }

        let wide = ImageU8::new(4, 2, vec![0; 8]).unwrap();
        assert!(matches!(psnr(&a, &wide), Err(Error::Dimension(_))));
    }

    #[test]
    fn trace_report_flags_ds_like_signals() {
        let mut builder = TraceBuilder::new(&[("even", 4), ("dense", 4)]);
        for v in [0u32, 4, 8, 12] {
            builder.record(0, v);
        }
        for v in 0..16u32 {
            builder.record(1, v);
        }
        let reports = trace_report(&builder.finish());
        let even = reports.iter().find(|r| r.name == "even").unwrap();
        assert!(even.ds_like);
        assert_eq!(even.cleared_low_bits, 2);
        assert!((even.sparsity - 0.75).abs() < 1e-12);
        let dense = reports.iter().find(|r| r.name == "dense").unwrap();
        assert!(!dense.ds_like);
        assert!(dense.sparsity.abs() < 1e-12);
    }

    #[test]
    fn mac_dotproduct_examples() {
        let spec = BlockSpec::new(
            BlockOp::Mul,
            8,
            8,
            Interp::Unsigned,
            Interp::TwosComplement,
            crate::truthtab::OutputPolicy::FullWidth,
        )
        .unwrap();
        let precise = PpcBlock::precise(spec).unwrap();
        let px = |v: u64| FixedWord::unsigned(v, 8).unwrap();
        let wt = |v: i64| FixedWord::signed(v, 8).unwrap();

        let zero =
            mac_dotproduct(&[px(3), px(200)], &[wt(0), wt(0)], &precise).unwrap();
        assert_eq!(zero.to_int(), 0);

        let th_block = PpcBlock::new(
            spec,
            "th:48:48".parse().unwrap(),
            crate::sparsity::PreprocessChain::identity(),
            NaturalRange::full(8, Interp::Unsigned),
            NaturalRange::full(8, Interp::TwosComplement),
            Strictness::Permissive,
        )
        .unwrap();
        let out = mac_dotproduct(&[px(10), px(100)], &[wt(2), wt(1)], &th_block).unwrap();
        assert_eq!(out.to_int(), 48 * 2 + 100);

        let strict = PpcBlock::new(
            spec,
            crate::sparsity::PreprocessChain::identity(),
            crate::sparsity::PreprocessChain::identity(),
            NaturalRange::new(0, 159).unwrap(),
            NaturalRange::full(8, Interp::TwosComplement),
            Strictness::Strict,
        )
        .unwrap();
        let res = mac_dotproduct(&[px(200)], &[wt(1)], &strict);
        assert!(matches!(res, Err(Error::RangeViolation(_))));

        let res = mac_dotproduct(&[px(1)], &[wt(1), wt(2)], &precise);
        assert!(matches!(res, Err(Error::Dimension(_))));
    }

    #[test]
    fn preprocess_image_applies_chain_per_pixel() {
        let img = ImageU8::new(2, 2, vec![10, 47, 48, 200]).unwrap();
        let out = preprocess_image(&img, &"th:48:48+ds:16".parse().unwrap()).unwrap();
        assert_eq!(out.pixels(), &[48, 48, 48, 192]);
    }
}
