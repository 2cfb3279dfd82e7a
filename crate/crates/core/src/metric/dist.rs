use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational used for distances, radii and challenges.
pub type Q = Ratio<i64>;

pub fn q(n: i64) -> Q {
    Q::from_integer(n)
}

/// Formats a rational as `p/q`, always with an explicit denominator.
pub fn fmt_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p/q`, `p` or a finite decimal such as `2.5`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((p, d)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Q::new(p, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 12 {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let int_v: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let scale = 10i64.pow(frac.len() as u32);
        let frac_v: i64 = frac.parse().map_err(|_| bad())?;
        let mag = int_v.abs() * scale + frac_v;
        return Ok(Q::new(if neg { -mag } else { mag }, scale));
    }
    s.parse::<i64>().map(Q::from_integer).map_err(|_| bad())
}

/// Smallest integer `>= x`.
pub fn ceil_q(x: &Q) -> i64 {
    x.ceil().to_integer()
}

/// A distance value: an exact nonnegative rational, or the infinite
/// sentinel (ordered above every rational) for points in distinct components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dist {
    Finite(Q),
    Infinite,
}

impl Dist {
    pub const ZERO: Dist = Dist::Finite(Ratio::new_raw(0, 1));

    pub fn int(n: i64) -> Dist {
        Dist::Finite(q(n))
    }

    pub fn finite(self) -> Option<Q> {
        match self {
            Dist::Finite(x) => Some(x),
            Dist::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Dist::Finite(_))
    }

    pub fn add(self, other: Dist) -> Dist {
        match (self, other) {
            (Dist::Finite(a), Dist::Finite(b)) => Dist::Finite(a + b),
            _ => Dist::Infinite,
        }
    }

    pub fn le_q(self, bound: &Q) -> bool {
        match self {
            Dist::Finite(x) => x <= *bound,
            Dist::Infinite => false,
        }
    }

    pub fn to_json_string(self) -> String {
        match self {
            Dist::Finite(x) => fmt_q(&x),
            Dist::Infinite => "inf".to_string(),
        }
    }

    pub fn parse(s: &str) -> Result<Dist> {
        if s.trim() == "inf" {
            Ok(Dist::Infinite)
        } else {
            let x = parse_q(s)?;
            if x.is_negative() {
                return Err(Error::InvalidMetric(format!("negative distance {s}")));
            }
            Ok(Dist::Finite(x))
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Dist::Finite(x) => *x.numer() as f64 / *x.denom() as f64,
            Dist::Infinite => f64::INFINITY,
        }
    }
}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Dist::Finite(a), Dist::Finite(b)) => a.cmp(b),
            (Dist::Finite(_), Dist::Infinite) => Ordering::Less,
            (Dist::Infinite, Dist::Finite(_)) => Ordering::Greater,
            (Dist::Infinite, Dist::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dist::Finite(x) if x.is_zero() => write!(f, "0"),
            Dist::Finite(x) => write!(f, "{x}"),
            Dist::Infinite => write!(f, "inf"),
        }
    }
}
