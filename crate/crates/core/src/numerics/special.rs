//! Scalar special functions.

use crate::{Error, Result};
use std::f64::consts::{LN_2, SQRT_2};

/// Tail probability of the standard normal distribution,
/// `Q(x) = ∫_x^∞ (1/√2π) e^{-t²/2} dt`, computed as `erfc(x/√2)/2`.
///
/// Relative accuracy is a few ulp; far tails underflow smoothly to 0
/// (and to 1 on the negative side).
#[inline]
pub fn q_func(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Binary entropy in bits, `-p log2 p - (1-p) log2 (1-p)` with `0 log 0 = 0`.
///
/// Returns a domain error when `p` is outside `[0, 1]`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!(
            "binary_entropy: p = {p} outside [0, 1]"
        )));
    }
    Ok(hb(p))
}

/// Binary entropy without the domain check, for internal callers that pass
/// probabilities by construction. Accurate near both endpoints: the small
/// argument goes through `ln`, the complement through `ln_1p`.
#[inline]
pub(crate) fn hb(p: f64) -> f64 {
    let p = if p > 0.5 { 1.0 - p } else { p };
    if p <= 0.0 {
        return 0.0;
    }
    -(p * p.ln() + (1.0 - p) * (-p).ln_1p()) / LN_2
}
