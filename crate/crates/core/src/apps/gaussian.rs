//! 3x3 Gaussian denoising filter as a fixed shift-add adder tree.
//!
//! Window coefficients are [1 2 1; 2 4 2; 1 2 1] / 16. The weight
//! multiplications are left shifts on the adder inputs: corners add
//! directly, edges enter shifted by one bit, the center by two, and the
//! final sum is truncated by a 4-bit right shift. Edge pixels replicate at
//! the border.

use crate::error::{Error, Result};
use crate::sparsity::PreprocessChain;

use super::{preprocess_image, ImageU8, SignalTrace, TraceBuilder};

/// Trace signal declarations: name and word length.
const SIGNALS: &[(&str, u32)] = &[
    ("in.a1", 8),
    ("in.a2", 8),
    ("in.a3", 8),
    ("in.a4", 8),
    ("in.a5", 8),
    ("in.a6", 8),
    ("in.a7", 8),
    ("in.a8", 8),
    ("in.a9", 8),
    ("adder1.lhs", 8),
    ("adder1.rhs", 8),
    ("adder1.out", 9),
    ("adder2.lhs", 8),
    ("adder2.rhs", 8),
    ("adder2.out", 9),
    ("adder3.lhs", 9),
    ("adder3.rhs", 9),
    ("adder3.out", 10),
    ("adder4.lhs", 9),
    ("adder4.rhs", 9),
    ("adder4.out", 10),
    ("adder5.lhs", 9),
    ("adder5.rhs", 9),
    ("adder5.out", 10),
    ("adder6.lhs", 10),
    ("adder6.rhs", 10),
    ("adder6.out", 11),
    ("adder7.lhs", 10),
    ("adder7.rhs", 11),
    ("adder7.out", 12),
    ("adder8.lhs", 12),
    ("adder8.rhs", 10),
    ("adder8.out", 12),
    ("out", 8),
];

// Signal indices into SIGNALS; kept in sync by the declaration order above.
const IN_A1: usize = 0;
const ADDER1_LHS: usize = 9;
const OUT: usize = 33;

/// Run the filter: the chain is applied to every input pixel, then the
/// precise adder tree computes the window sum. Returns the filtered image
/// and the per-signal trace.
pub fn gaussian_filter(
    img: &ImageU8,
    chain: &PreprocessChain,
) -> Result<(ImageU8, SignalTrace)> {
    if img.width() < 3 || img.height() < 3 {
        return Err(Error::Dimension(format!(
            "{}x{} image is smaller than the 3x3 window",
            img.width(),
            img.height()
        )));
    }
    let pre = preprocess_image(img, chain)?;
    let mut trace = TraceBuilder::new(SIGNALS);
    let mut out_pixels = Vec::with_capacity(pre.pixels().len());

    for y in 0..pre.height() {
        for x in 0..pre.width() {
            let xi = i64::from(x);
            let yi = i64::from(y);
            // Window a1..a9 in row-major order, edge-replicated.
            let a: [u32; 9] = [
                pre.get_clamped(xi - 1, yi - 1).into(),
                pre.get_clamped(xi, yi - 1).into(),
                pre.get_clamped(xi + 1, yi - 1).into(),
                pre.get_clamped(xi - 1, yi).into(),
                pre.get_clamped(xi, yi).into(),
                pre.get_clamped(xi + 1, yi).into(),
                pre.get_clamped(xi - 1, yi + 1).into(),
                pre.get_clamped(xi, yi + 1).into(),
                pre.get_clamped(xi + 1, yi + 1).into(),
            ];
            for (i, &v) in a.iter().enumerate() {
                trace.record(IN_A1 + i, v);
            }

            // Corner pairs.
            let add1 = a[0] + a[2];
            let add2 = a[6] + a[8];
            // Edge pairs, inputs shifted left by one.
            let add3 = (a[1] << 1) + (a[3] << 1);
            let add4 = (a[5] << 1) + (a[7] << 1);
            // Corner sum and edge sum.
            let add5 = add1 + add2;
            let add6 = add3 + add4;
            // Corner+edge: operands differ by one bit of width.
            let add7 = add5 + add6;
            // Center enters shifted left by two.
            let add8 = add7 + (a[4] << 2);
            let out = add8 >> 4;

            let signals = [
                (ADDER1_LHS, a[0]),
                (ADDER1_LHS + 1, a[2]),
                (ADDER1_LHS + 2, add1),
                (ADDER1_LHS + 3, a[6]),
                (ADDER1_LHS + 4, a[8]),
                (ADDER1_LHS + 5, add2),
                (ADDER1_LHS + 6, a[1] << 1),
                (ADDER1_LHS + 7, a[3] << 1),
                (ADDER1_LHS + 8, add3),
                (ADDER1_LHS + 9, a[5] << 1),
                (ADDER1_LHS + 10, a[7] << 1),
                (ADDER1_LHS + 11, add4),
                (ADDER1_LHS + 12, add1),
                (ADDER1_LHS + 13, add2),
                (ADDER1_LHS + 14, add5),
                (ADDER1_LHS + 15, add3),
                (ADDER1_LHS + 16, add4),
                (ADDER1_LHS + 17, add6),
                (ADDER1_LHS + 18, add5),
                (ADDER1_LHS + 19, add6),
                (ADDER1_LHS + 20, add7),
                (ADDER1_LHS + 21, add7),
                (ADDER1_LHS + 22, a[4] << 2),
                (ADDER1_LHS + 23, add8),
                (OUT, out),
            ];
            for (idx, v) in signals {
                trace.record(idx, v);
            }
            out_pixels.push(out as u8);
        }
    }
    let output = ImageU8::new(pre.width(), pre.height(), out_pixels)?;
    Ok((output, trace.finish()))
}
