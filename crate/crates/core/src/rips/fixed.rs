//! Nonnegative lengths in units of `2^-32`, stored as `u64`.
//!
//! Sums of such lengths are exact, so graph distances built from them are
//! symmetric and satisfy the triangle inequality without rounding slack.

use num_integer::Roots;

use crate::metric::{Dist, Q};

pub const SHIFT: u32 = 32;
pub const ONE: u64 = 1 << SHIFT;
pub const INF: u64 = u64::MAX;

/// Fixed-point `(lo, hi)` with `lo ≤ sqrt(p / q) ≤ hi`. Needs `p < 2^64`.
pub fn sqrt_bounds(p: u128, q: u128) -> (u64, u64) {
    assert!(q > 0 && p < 1 << 64);
    let scaled = p << (2 * SHIFT);
    let floor = scaled / q;
    let ceil = floor + u128::from(!scaled.is_multiple_of(q));
    let lo = floor.sqrt();
    let mut hi = ceil.sqrt();
    if hi * hi < ceil {
        hi += 1;
    }
    (lo as u64, hi as u64)
}

/// `ceil(w * num / den)`.
pub fn scale_up(w: u64, num: u64, den: u64) -> u64 {
    let x = u128::from(w) * u128::from(num);
    let d = u128::from(den);
    x.div_ceil(d) as u64
}

pub fn add(a: u64, b: u64) -> u64 {
    if a == INF || b == INF {
        INF
    } else {
        a.saturating_add(b).min(INF - 1)
    }
}

pub fn to_dist(x: u64) -> Dist {
    if x == INF {
        Dist::Infinite
    } else {
        Dist::Finite(Q::new(x as i64, ONE as i64))
    }
}
