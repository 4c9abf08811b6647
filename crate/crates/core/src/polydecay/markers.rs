use crate::error::{Error, Result};

/// Highest level a marker can be computed for; `2^62` covers any `u64` stream.
pub const MAX_LEVEL: u32 = 62;

/// `(x / (x - 2^i + 1))^s <= (1+eps)/(1-eps)`.
#[inline]
pub(crate) fn marker_holds(s: f64, epsilon: f64, i: u32, x: u64) -> bool {
    let span = 1u64 << i;
    if x < span {
        return false;
    }
    let ratio = x as f64 / (x - span + 1) as f64;
    ratio.powf(s) <= (1.0 + epsilon) / (1.0 - epsilon)
}

/// Smallest integer `x >= 2^i` whose oldest and newest elements in a span of
/// `2^i` ending at age `x` differ in weight by at most `(1+eps)/(1-eps)`.
pub fn compute_marker(s: f64, epsilon: f64, i: u32) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param(format!("epsilon must lie in (0,1), got {epsilon}")));
    }
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::param(format!("decay exponent s must be >= 0, got {s}")));
    }
    if i > MAX_LEVEL {
        return Err(Error::param(format!("marker level {i} exceeds {MAX_LEVEL}")));
    }
    let span = 1u64 << i;
    if s == 0.0 || i == 0 {
        return Ok(span);
    }
    // x <= r (x - 2^i + 1) with r = ((1+eps)/(1-eps))^(1/s); start from the
    // real-valued solution and correct for rounding.
    let r = ((1.0 + epsilon) / (1.0 - epsilon)).powf(1.0 / s);
    let guess = (r * (span - 1) as f64 / (r - 1.0)).ceil();
    let mut x = if guess.is_finite() && guess < u64::MAX as f64 / 2.0 {
        (guess as u64).max(span)
    } else {
        return Err(Error::param(format!("marker for level {i} overflows (s={s}, eps={epsilon})")));
    };
    while !marker_holds(s, epsilon, i, x) {
        x += 1;
    }
    while x > span && marker_holds(s, epsilon, i, x - 1) {
        x -= 1;
    }
    Ok(x)
}

/// Lazily filled table of markers for fixed `(s, eps)`.
#[derive(Clone, Debug)]
pub struct MarkerTable {
    s: f64,
    epsilon: f64,
    x: Vec<u64>,
}

impl MarkerTable {
    pub fn new(s: f64, epsilon: f64) -> Result<Self> {
        let x0 = compute_marker(s, epsilon, 0)?;
        Ok(MarkerTable { s, epsilon, x: vec![x0] })
    }

    /// `x_i`.
    pub fn get(&mut self, i: u32) -> Result<u64> {
        while self.x.len() <= i as usize {
            let next = compute_marker(self.s, self.epsilon, self.x.len() as u32)?;
            self.x.push(next);
        }
        Ok(self.x[i as usize])
    }

    pub fn computed(&self) -> &[u64] {
        &self.x
    }
}
