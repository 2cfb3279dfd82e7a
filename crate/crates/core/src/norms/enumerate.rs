//! Exact enumeration of the sets `B_A(k, s)`: elements of a catalog ring whose
//! discrete norms are at most `e^k` and whose evaluation norms are at most `s`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::field::{is_prime, Field, Fp};
use super::norm::{Norm, NormValue};
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};

pub const DEFAULT_ENUM_BUDGET: u64 = 1_000_000;

/// Rings supported by [`enumerate_ball_ba`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "ring", rename_all = "snake_case")]
pub enum RingSpec {
    /// `F_p[X_1, …, X_vars]`; with one variable it is written `F_p[X]`.
    FpPoly { p: u64, vars: usize },
    /// `F_p[X, X⁻¹]`.
    FpLaurent { p: u64 },
    /// `Z[X]`.
    IntPoly,
    /// `Z[1/n]`.
    IntLocalized { n: u64 },
}

impl RingSpec {
    /// Parses short names: `f2x`, `f3x2` (two variables), `f2laurent`, `zx`, `z1/6`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::BadParams(format!("unknown ring {s:?}"));
        let s = s.trim().to_ascii_lowercase();
        if s == "zx" {
            return Ok(RingSpec::IntPoly);
        }
        if let Some(n) = s.strip_prefix("z1/").or_else(|| s.strip_prefix("z[1/").map(|t| t.trim_end_matches(']'))) {
            return Ok(RingSpec::IntLocalized { n: n.parse().map_err(|_| bad())? });
        }
        let rest = s.strip_prefix('f').ok_or_else(bad)?;
        let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
        let p: u64 = digits.parse().map_err(|_| bad())?;
        match &rest[digits.len()..] {
            "x" => Ok(RingSpec::FpPoly { p, vars: 1 }),
            "laurent" => Ok(RingSpec::FpLaurent { p }),
            t => match t.strip_prefix('x') {
                Some(m) => Ok(RingSpec::FpPoly { p, vars: m.parse().map_err(|_| bad())? }),
                None => Err(bad()),
            },
        }
    }

    fn check(&self) -> Result<()> {
        match self {
            RingSpec::FpPoly { p, vars } => {
                supported_prime(*p)?;
                if *vars == 0 {
                    return Err(Error::BadParams("polynomial ring needs at least one variable".into()));
                }
                Ok(())
            }
            RingSpec::FpLaurent { p } => supported_prime(*p),
            RingSpec::IntPoly => Ok(()),
            RingSpec::IntLocalized { n } if *n == 0 => Err(Error::BadParams("Z[1/0] is not a ring".into())),
            RingSpec::IntLocalized { .. } => Ok(()),
        }
    }
}

pub fn supported_prime(p: u64) -> Result<()> {
    if matches!(p, 2 | 3 | 5 | 7) {
        Ok(())
    } else if is_prime(p) {
        Err(Error::BadParams(format!("F_{p} is outside the supported fields F_2, F_3, F_5, F_7")))
    } else {
        Err(Error::BadParams(format!("{p} is not prime")))
    }
}

/// A ring element as a map from exponent vectors to exact coefficients.
/// Coefficients over `F_p` are stored as their representatives in `0..p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparseElement {
    pub terms: BTreeMap<Vec<i64>, BigRational>,
}

impl SparseElement {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn univariate<F: Field>(&self) -> RatFunc<F> {
        let t: BTreeMap<i64, F> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let f = F::from_int(c.numer()).mul(&F::from_int(c.denom()).inv());
                (e.first().copied().unwrap_or(0), f)
            })
            .collect();
        RatFunc::laurent(&t)
    }

    /// Text form, e.g. `X1^2*X2 + 1` or `-3/2`.
    pub fn render(&self, vars: usize) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if i > 0 {
                out.push_str(if neg { " - " } else { " + " });
            } else if neg {
                out.push('-');
            }
            let mag = c.abs();
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(j, &x)| {
                    let v = if vars == 1 { "X".to_string() } else { format!("X{}", j + 1) };
                    if x == 1 {
                        v
                    } else {
                        format!("{v}^{x}")
                    }
                })
                .collect();
            if mono.is_empty() {
                out.push_str(&mag.to_string());
            } else {
                if !One::is_one(&mag) {
                    out.push_str(&format!("{mag}*"));
                }
                out.push_str(&mono.join("*"));
            }
        }
        out
    }
}

impl fmt::Display for SparseElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars = self.terms.keys().next().map_or(1, |e| e.len().max(1));
        write!(f, "{}", self.render(vars))
    }
}

/// Box search: for each coordinate the inclusive coefficient range, and the
/// exponent vector of that coordinate.
struct CoefficientBox {
    monomials: Vec<Vec<i64>>,
    ranges: Vec<(i64, i64)>,
    /// Common denominator of all coefficients.
    denom: BigInt,
}

impl CoefficientBox {
    fn size(&self) -> Option<u64> {
        self.ranges.iter().try_fold(1u64, |acc, &(lo, hi)| acc.checked_mul((hi - lo + 1).max(0) as u64))
    }

    fn for_each(&self, mut f: impl FnMut(SparseElement)) {
        let n = self.ranges.len();
        if self.ranges.iter().any(|&(lo, hi)| lo > hi) {
            return;
        }
        let mut cur: Vec<i64> = self.ranges.iter().map(|r| r.0).collect();
        loop {
            let terms = cur
                .iter()
                .zip(&self.monomials)
                .filter(|(c, _)| **c != 0)
                .map(|(c, e)| (e.clone(), BigRational::new(BigInt::from(*c), self.denom.clone())))
                .collect();
            f(SparseElement { terms });
            // odometer, last coordinate fastest
            let mut i = n;
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                if cur[i] < self.ranges[i].1 {
                    cur[i] += 1;
                    break;
                }
                cur[i] = self.ranges[i].0;
            }
        }
    }
}

fn unbounded(what: &str) -> Error {
    Error::EnumerationBudgetExceeded(format!("constraints do not bound the search box: {what}"))
}

fn degree_cap(discrete: &[Norm], var: &str, k: f64) -> Option<i64> {
    discrete
        .iter()
        .filter(|n| matches!(n, Norm::Degree { var: v } if v == var))
        .filter_map(|n| n.exponent_cap(k))
        .min()
}

/// Enumerates `B_A(k, s)` by searching a coefficient box bounded by the
/// constraints, then filtering every candidate exactly.
pub fn enumerate_ball_ba(
    ring: &RingSpec,
    discrete: &[Norm],
    k: f64,
    archimedean: &[Norm],
    s: &BigRational,
    budget: u64,
) -> Result<Vec<SparseElement>> {
    ring.check()?;
    for n in discrete {
        n.check()?;
        if n.is_archimedean() {
            return Err(Error::BadParams("archimedean norm listed among discrete norms".into()));
        }
    }
    for n in archimedean {
        if !n.is_archimedean() {
            return Err(Error::BadParams("discrete norm listed among archimedean norms".into()));
        }
        n.check()?;
    }
    let bx = search_box(ring, discrete, k, archimedean, s)?;
    let size = bx.size().unwrap_or(u64::MAX);
    if size > budget {
        return Err(Error::EnumerationBudgetExceeded(format!("{size} candidates exceed the budget of {budget}")));
    }
    let mut out = Vec::new();
    let mut err = None;
    bx.for_each(|cand| {
        if err.is_some() {
            return;
        }
        match accepts(ring, discrete, k, archimedean, s, &cand) {
            Ok(true) => out.push(cand),
            Ok(false) => {}
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

fn search_box(
    ring: &RingSpec,
    discrete: &[Norm],
    k: f64,
    archimedean: &[Norm],
    s: &BigRational,
) -> Result<CoefficientBox> {
    match ring {
        RingSpec::FpPoly { p, vars } => {
            let mut caps = Vec::with_capacity(*vars);
            for i in 0..*vars {
                let name = format!("X{}", i + 1);
                let mut cap = degree_cap(discrete, &name, k);
                if *vars == 1 {
                    cap = cap.into_iter().chain(degree_cap(discrete, "X", k)).min();
                }
                caps.push(cap.ok_or_else(|| unbounded(&format!("no degree bound in {name}")))?);
            }
            let mut monomials = vec![Vec::new()];
            for &c in &caps {
                monomials = monomials
                    .into_iter()
                    .flat_map(|m: Vec<i64>| (0..=c).map(move |e| [m.clone(), vec![e]].concat()))
                    .collect();
            }
            let top = *p as i64 - 1;
            Ok(CoefficientBox { ranges: vec![(0, top); monomials.len()], monomials, denom: BigInt::one() })
        }
        RingSpec::FpLaurent { p } => {
            let hi = degree_cap(discrete, "X", k).ok_or_else(|| unbounded("no degree bound"))?;
            let lo = discrete
                .iter()
                .filter(|n| matches!(n, Norm::OrderAt { q } if q.trim() == "X"))
                .filter_map(|n| n.exponent_cap(k))
                .min()
                .map(|c| -c)
                .ok_or_else(|| unbounded("no bound on negative exponents (order at X)"))?;
            let monomials: Vec<Vec<i64>> = (lo..=hi).map(|e| vec![e]).collect();
            let top = *p as i64 - 1;
            Ok(CoefficientBox { ranges: vec![(0, top); monomials.len()], monomials, denom: BigInt::one() })
        }
        RingSpec::IntPoly => {
            let d = degree_cap(discrete, "X", k).ok_or_else(|| unbounded("no degree bound"))?;
            if d < 0 {
                return Ok(CoefficientBox { monomials: vec![], ranges: vec![], denom: BigInt::one() });
            }
            let mut pts: Vec<BigRational> = Vec::new();
            for n in archimedean {
                let t = n.eval_point()?;
                if !pts.contains(&t) {
                    pts.push(t);
                }
            }
            let need = d as usize + 1;
            if pts.len() < need {
                return Err(unbounded(&format!("degree {d} needs {need} distinct evaluation points, got {}", pts.len())));
            }
            pts.truncate(need);
            let inv = vandermonde_inverse(&pts);
            let ranges = (0..need)
                .map(|j| {
                    let b: BigRational = inv[j].iter().map(|x| x.abs()).sum::<BigRational>() * s;
                    let b = b.floor().to_integer().to_i64().unwrap_or(i64::MAX / 4);
                    (-b, b)
                })
                .collect();
            Ok(CoefficientBox { monomials: (0..need as i64).map(|e| vec![e]).collect(), ranges, denom: BigInt::one() })
        }
        RingSpec::IntLocalized { n } => {
            let mut denom = BigInt::one();
            for p in prime_factors(*n) {
                let cap = discrete
                    .iter()
                    .filter(|x| matches!(x, Norm::Padic { p: q } if *q == p))
                    .filter_map(|x| x.exponent_cap(k))
                    .min()
                    .ok_or_else(|| unbounded(&format!("no {p}-adic bound")))?;
                if cap > 0 {
                    denom *= BigInt::from(p).pow(cap as u32);
                }
            }
            if archimedean.is_empty() {
                return Err(unbounded("no archimedean bound"));
            }
            let b = (s * BigRational::from_integer(denom.clone())).floor().to_integer();
            let b = b.to_i64().ok_or_else(|| Error::EnumerationBudgetExceeded("numerator bound overflows".into()))?;
            Ok(CoefficientBox { monomials: vec![vec![0]], ranges: vec![(-b, b)], denom })
        }
    }
}

fn accepts(
    ring: &RingSpec,
    discrete: &[Norm],
    k: f64,
    archimedean: &[Norm],
    s: &BigRational,
    cand: &SparseElement,
) -> Result<bool> {
    match ring {
        RingSpec::FpPoly { vars, .. } if *vars > 1 => {
            for n in discrete {
                let Norm::Degree { var } = n else {
                    return Err(Error::DomainMismatch(format!("{n:?} on a multivariate ring")));
                };
                let idx = var
                    .strip_prefix('X')
                    .and_then(|i| i.parse::<usize>().ok())
                    .filter(|&i| (1..=*vars).contains(&i))
                    .ok_or_else(|| Error::DomainMismatch(format!("variable {var} not in ring")))?;
                let cap = n.exponent_cap(k).expect("discrete");
                if cand.terms.keys().any(|e| e[idx - 1] > cap) {
                    return Ok(false);
                }
            }
            if !archimedean.is_empty() {
                return Err(Error::DomainMismatch("archimedean norm in positive characteristic".into()));
            }
            Ok(true)
        }
        RingSpec::FpPoly { p, .. } | RingSpec::FpLaurent { p } => match p {
            2 => accepts_uni::<Fp<2>>(discrete, k, archimedean, s, cand),
            3 => accepts_uni::<Fp<3>>(discrete, k, archimedean, s, cand),
            5 => accepts_uni::<Fp<5>>(discrete, k, archimedean, s, cand),
            _ => accepts_uni::<Fp<7>>(discrete, k, archimedean, s, cand),
        },
        RingSpec::IntPoly | RingSpec::IntLocalized { .. } => accepts_uni::<BigRational>(discrete, k, archimedean, s, cand),
    }
}

fn accepts_uni<F: Field>(
    discrete: &[Norm],
    k: f64,
    archimedean: &[Norm],
    s: &BigRational,
    cand: &SparseElement,
) -> Result<bool> {
    let x: RatFunc<F> = cand.univariate();
    for n in discrete {
        let cap = n.exponent_cap(k).expect("discrete");
        if !n.eval(&x)?.le_exp(cap) {
            return Ok(false);
        }
    }
    for n in archimedean {
        match n.eval(&x)? {
            NormValue::Zero => {}
            NormValue::Abs(v) if v <= *s => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Inverse of `V_ij = t_i^j` by Gauss–Jordan over the rationals.
fn vandermonde_inverse(t: &[BigRational]) -> Vec<Vec<BigRational>> {
    let n = t.len();
    let mut a: Vec<Vec<BigRational>> = t
        .iter()
        .map(|ti| {
            let mut row = Vec::with_capacity(2 * n);
            let mut p = <BigRational as One>::one();
            for _ in 0..n {
                row.push(p.clone());
                p = &p * ti;
            }
            row
        })
        .collect();
    for (i, row) in a.iter_mut().enumerate() {
        row.extend((0..n).map(|j| if i == j { <BigRational as One>::one() } else { <BigRational as Zero>::zero() }));
    }
    for c in 0..n {
        let piv = (c..n).find(|&r| !Zero::is_zero(&a[r][c])).expect("distinct points");
        a.swap(c, piv);
        let s = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x = &*x * &s;
        }
        for r in 0..n {
            if r != c && !Zero::is_zero(&a[r][c]) {
                let f = a[r][c].clone();
                let pivot_row = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x = &*x - &(&f * y);
                }
            }
        }
    }
    // row j of V⁻¹ maps the values at the points to coefficient j
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}
