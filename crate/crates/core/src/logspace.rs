//! Base-2 log-domain arithmetic for weights that overflow `f64`.
//!
//! Zero is represented by `f64::NEG_INFINITY`.

pub const LOG2_ZERO: f64 = f64::NEG_INFINITY;

/// `log2(2^a + 2^b)`.
#[inline]
pub fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp2().ln_1p() / std::f64::consts::LN_2
}

/// `log2(sum_i 2^x_i)`; `LOG2_ZERO` for an empty input.
pub fn log2_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return LOG2_ZERO;
    }
    let s: f64 = xs.iter().map(|x| (x - max).exp2()).sum();
    max + s.log2()
}

/// `log2(x)` with `log2(0) = LOG2_ZERO`.
#[inline]
pub fn to_log2(x: f64) -> f64 {
    if x <= 0.0 {
        LOG2_ZERO
    } else {
        x.log2()
    }
}
