use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::field::{is_prime, Field};
use super::matrix::Matrix;
use super::parse::parse_ratfunc;
use super::poly::Poly;
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};

/// Tolerance of the power iteration used for archimedean lengths.
pub const OPERATOR_NORM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Norm {
    /// `γ(P/Q) = e^{deg P − deg Q}` in the variable `var`.
    Degree {
        #[serde(default = "default_var")]
        var: String,
    },
    /// `γ(a) = p^{−v_p(a)}` on rational numbers.
    Padic { p: u64 },
    /// `γ(P·Q^l) = e^{−l}` for `P` prime to the irreducible `q`.
    OrderAt { q: String },
    /// Max of the base norm over polynomial coefficients.
    Gauss { base: Box<Norm> },
    /// `|f(t)|` for an exact rational point `t`.
    Eval { t: String },
}

fn default_var() -> String {
    "X".into()
}

impl Norm {
    pub fn degree() -> Self {
        Norm::Degree { var: default_var() }
    }

    pub fn order_at_x() -> Self {
        Norm::OrderAt { q: "X".into() }
    }

    /// Short forms: `degree`, `degree:Y`, `order-at:X+1`, `padic:3`,
    /// `gauss:padic:3`, `eval:1/2`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = s.split_once(':').map_or((s, None), |(h, a)| (h, Some(a.trim())));
        let need = || arg.filter(|a| !a.is_empty()).ok_or_else(|| Error::BadParams(format!("norm {s:?} needs an argument")));
        let n = match head.to_ascii_lowercase().replace('_', "-").as_str() {
            "degree" => Norm::Degree { var: arg.map_or_else(default_var, str::to_string) },
            "order-at" | "order" => Norm::OrderAt { q: arg.unwrap_or("X").to_string() },
            "padic" => Norm::Padic {
                p: need()?.parse().map_err(|_| Error::BadParams(format!("bad prime in {s:?}")))?,
            },
            "gauss" => Norm::Gauss { base: Box::new(Norm::parse(need()?)?) },
            "eval" => Norm::Eval { t: need()?.to_string() },
            _ => return Err(Error::BadParams(format!("unknown norm {s:?}"))),
        };
        n.check()?;
        Ok(n)
    }

    pub fn is_archimedean(&self) -> bool {
        matches!(self, Norm::Eval { .. })
    }

    /// Natural-log factor: `γ = e^{scale·exponent}`. `None` for archimedean norms.
    pub fn scale(&self) -> Option<f64> {
        match self {
            Norm::Degree { .. } | Norm::OrderAt { .. } => Some(1.0),
            Norm::Padic { p } => Some((*p as f64).ln()),
            Norm::Gauss { base } => base.scale(),
            Norm::Eval { .. } => None,
        }
    }

    /// Largest exponent `e` with `scale·e ≤ k`.
    pub fn exponent_cap(&self, k: f64) -> Option<i64> {
        let s = self.scale()?;
        let v = k / s;
        // guard against ln-rounding pushing an exact integer just below
        let r = v.round();
        Some(if (v - r).abs() < 1e-12 { r as i64 } else { v.floor() as i64 })
    }

    pub fn eval_point(&self) -> Result<BigRational> {
        match self {
            Norm::Eval { t } => {
                let v: RatFunc<BigRational> = parse_ratfunc(t)?;
                v.as_constant().ok_or_else(|| Error::BadParams(format!("evaluation point {t} is not a number")))
            }
            _ => Err(Error::BadParams("not an evaluation norm".into())),
        }
    }

    pub fn check(&self) -> Result<()> {
        match self {
            Norm::Padic { p } if !is_prime(*p) => Err(Error::BadParams(format!("{p} is not prime"))),
            Norm::Gauss { base } => match **base {
                Norm::Padic { .. } => base.check(),
                _ => Err(Error::BadParams("gauss extension is supported over p-adic norms".into())),
            },
            Norm::Eval { .. } => self.eval_point().map(|_| ()),
            _ => Ok(()),
        }
    }

    pub fn eval<F: Field>(&self, x: &RatFunc<F>) -> Result<NormValue> {
        self.check()?;
        if x.is_zero() {
            return Ok(NormValue::Zero);
        }
        let mismatch = |m: &str| Error::DomainMismatch(format!("{m} (element {x} over {})", F::name()));
        match self {
            Norm::Degree { var } => {
                if var != "X" && var != "X1" {
                    return Err(mismatch(&format!("variable {var} not in ring")));
                }
                Ok(NormValue::Exp(x.degree().expect("nonzero")))
            }
            Norm::OrderAt { q } => {
                let q = order_poly::<F>(q)?;
                Ok(NormValue::Exp(-x.order_at(&q).expect("nonzero")))
            }
            Norm::Padic { p } => {
                let c = x.as_constant().ok_or_else(|| mismatch("p-adic norm needs a number"))?;
                let v = c.padic_val(*p).ok_or_else(|| mismatch("p-adic norm needs characteristic zero"))?;
                Ok(NormValue::Exp(-v))
            }
            Norm::Gauss { base } => {
                let Norm::Padic { p } = **base else { unreachable!("checked") };
                let top = |poly: &Poly<F>| -> Result<i64> {
                    poly.coeffs()
                        .iter()
                        .filter(|a| !a.is_zero())
                        .map(|a| a.padic_val(p).map(|v| -v).ok_or_else(|| mismatch("p-adic coefficients")))
                        .try_fold(i64::MIN, |m, v| Ok(m.max(v?)))
                };
                Ok(NormValue::Exp(top(x.num())? - top(x.den())?))
            }
            Norm::Eval { .. } => {
                let t = self.eval_point()?;
                let tf = F::from_int(t.numer()).mul(&F::from_int(t.denom()).inv());
                if F::characteristic() != 0 {
                    return Err(mismatch("archimedean norm in positive characteristic"));
                }
                let v = x.eval(&tf).ok_or_else(|| mismatch("evaluation point is a pole"))?;
                Ok(NormValue::Abs(v.to_rational().expect("char 0").abs()))
            }
        }
    }
}

fn order_poly<F: Field>(q: &str) -> Result<Poly<F>> {
    let r: RatFunc<F> = parse_ratfunc(q)?;
    if !r.is_polynomial() || r.num().is_constant() {
        return Err(Error::BadParams(format!("order_at needs a nonconstant polynomial, got {q}")));
    }
    Ok(r.num().monic())
}

/// Value of a norm: `base^k` as an integer exponent for discrete norms,
/// a distinguished zero, or an exact absolute value for evaluation norms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NormValue {
    Zero,
    Exp(i64),
    Abs(BigRational),
}

impl NormValue {
    pub fn mul(&self, o: &NormValue) -> NormValue {
        match (self, o) {
            (NormValue::Zero, _) | (_, NormValue::Zero) => NormValue::Zero,
            (NormValue::Exp(a), NormValue::Exp(b)) => NormValue::Exp(a + b),
            (NormValue::Abs(a), NormValue::Abs(b)) => NormValue::Abs(a * b),
            _ => panic!("mixing discrete and archimedean values"),
        }
    }

    /// True iff the value is at most `base^k`.
    pub fn le_exp(&self, k: i64) -> bool {
        match self {
            NormValue::Zero => true,
            NormValue::Exp(e) => *e <= k,
            NormValue::Abs(_) => panic!("archimedean value compared to exponent"),
        }
    }

    pub fn exponent(&self) -> Option<i64> {
        match self {
            NormValue::Exp(e) => Some(*e),
            _ => None,
        }
    }
}

impl PartialOrd for NormValue {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        match (self, o) {
            (NormValue::Zero, NormValue::Zero) => Some(Ordering::Equal),
            (NormValue::Zero, _) => Some(Ordering::Less),
            (_, NormValue::Zero) => Some(Ordering::Greater),
            (NormValue::Exp(a), NormValue::Exp(b)) => Some(a.cmp(b)),
            (NormValue::Abs(a), NormValue::Abs(b)) => Some(a.cmp(b)),
            _ => None,
        }
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormValue::Zero => write!(f, "0"),
            NormValue::Exp(e) => write!(f, "exp({e})"),
            NormValue::Abs(a) => write!(f, "{a}"),
        }
    }
}

/// A length on `GL(n)`: exponent units times the norm scale, or an
/// archimedean value with an error interval.
#[derive(Clone, Debug, PartialEq)]
pub enum Length {
    Discrete { exponent: i64, scale: f64 },
    Archimedean { value: f64, lo: f64, hi: f64 },
}

impl Length {
    pub fn value(&self) -> f64 {
        match self {
            Length::Discrete { exponent, scale } => *exponent as f64 * scale,
            Length::Archimedean { value, .. } => *value,
        }
    }

    pub fn exponent(&self) -> Option<i64> {
        match self {
            Length::Discrete { exponent, .. } => Some(*exponent),
            Length::Archimedean { .. } => None,
        }
    }
}

/// Largest entry exponent of `g` and `g⁻¹`, clamped below at zero.
pub fn length_exponent<F: Field>(norm: &Norm, g: &Matrix<F>, g_inv: &Matrix<F>) -> Result<i64> {
    let mut best = 0i64;
    for a in g.entries().iter().chain(g_inv.entries()) {
        if let NormValue::Exp(e) = norm.eval(a)? {
            best = best.max(e);
        }
    }
    Ok(best)
}

pub fn length_gl<F: Field>(norm: &Norm, g: &Matrix<F>) -> Result<Length> {
    let inv = g.inverse()?;
    match norm.scale() {
        Some(scale) => Ok(Length::Discrete { exponent: length_exponent(norm, g, &inv)?, scale }),
        None => {
            let a = eval_matrix(norm, g)?;
            let b = eval_matrix(norm, &inv)?;
            let m = operator_norm(&a).max(operator_norm(&b));
            let value = m.ln().max(0.0);
            let err = OPERATOR_NORM_TOL * value.abs().max(1.0);
            Ok(Length::Archimedean { value, lo: (value - err).max(0.0), hi: value + err })
        }
    }
}

fn eval_matrix<F: Field>(norm: &Norm, g: &Matrix<F>) -> Result<Vec<Vec<f64>>> {
    let t = norm.eval_point()?;
    let tf = F::from_int(t.numer()).mul(&F::from_int(t.denom()).inv());
    g.rows()
        .iter()
        .map(|row| {
            row.iter()
                .map(|a| {
                    let v = a.eval(&tf).ok_or_else(|| Error::DomainMismatch(format!("{a} has a pole at {t}")))?;
                    let r = v.to_rational().ok_or_else(|| Error::DomainMismatch("positive characteristic".into()))?;
                    Ok(r.to_f64().unwrap_or(f64::NAN))
                })
                .collect()
        })
        .collect()
}

/// Largest singular value by power iteration on `AᵀA` from several starts.
pub fn operator_norm(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let ata: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[k][i] * a[k][j]).sum()).collect())
        .collect();
    let mut starts: Vec<Vec<f64>> = vec![vec![1.0; n]];
    starts.extend((0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.5 }).collect()));
    let mut best = 0.0f64;
    for mut v in starts {
        let mut lambda = 0.0;
        for _ in 0..10_000 {
            let w: Vec<f64> = (0..n).map(|i| (0..n).map(|j| ata[i][j] * v[j]).sum()).collect();
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            let next = w.iter().zip(&v).map(|(x, y)| x * y).sum::<f64>() / v.iter().map(|x| x * x).sum::<f64>();
            v = w.into_iter().map(|x| x / norm).collect();
            let done = (next - lambda).abs() <= OPERATOR_NORM_TOL * 1e-3 * next.abs().max(1.0);
            lambda = next;
            if done {
                break;
            }
        }
        best = best.max(lambda);
    }
    best.max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::field::Fp;

    fn f2(s: &str) -> RatFunc<Fp<2>> {
        parse_ratfunc(s).unwrap()
    }

    #[test]
    fn short_forms() {
        assert_eq!(Norm::parse("degree").unwrap(), Norm::degree());
        assert_eq!(Norm::parse("order-at:X").unwrap(), Norm::order_at_x());
        assert_eq!(Norm::parse("gauss:padic:3").unwrap(), Norm::Gauss { base: Box::new(Norm::Padic { p: 3 }) });
        assert!(Norm::parse("padic:4").is_err());
        assert!(Norm::parse("padic").is_err());
    }

    fn qx(s: &str) -> RatFunc<BigRational> {
        parse_ratfunc(s).unwrap()
    }

    #[test]
    fn norm_examples() {
        assert_eq!(Norm::degree().eval(&f2("X^2+X")).unwrap(), NormValue::Exp(2));
        assert_eq!(Norm::degree().eval(&f2("1/(X+1)")).unwrap(), NormValue::Exp(-1));
        assert_eq!(Norm::Padic { p: 2 }.eval(&qx("12")).unwrap(), NormValue::Exp(-2));
        assert_eq!(Norm::order_at_x().eval(&f2("X^3+X^2")).unwrap(), NormValue::Exp(-2));
        assert_eq!(Norm::degree().eval(&f2("0")).unwrap(), NormValue::Zero);
        let g = Norm::Gauss { base: Box::new(Norm::Padic { p: 3 }) };
        assert_eq!(g.eval(&qx("9X^2 + 1/3")).unwrap(), NormValue::Exp(1));
        let e = Norm::Eval { t: "1/2".into() };
        assert_eq!(e.eval(&qx("X^2 - 1")).unwrap(), NormValue::Abs(BigRational::new(3.into(), 4.into())));
    }

    #[test]
    fn domain_mismatch() {
        assert!(matches!(Norm::Padic { p: 2 }.eval(&f2("X")), Err(Error::DomainMismatch(_))));
        assert!(matches!(Norm::Eval { t: "1".into() }.eval(&f2("X")), Err(Error::DomainMismatch(_))));
        assert!(Norm::Padic { p: 4 }.eval(&qx("2")).is_err());
    }

    #[test]
    fn length_examples() {
        let d = Norm::degree();
        let id = Matrix::<Fp<2>>::identity(3);
        assert_eq!(length_gl(&d, &id).unwrap().exponent(), Some(0));
        let g = Matrix::diagonal(vec![f2("X"), f2("X^-1")]);
        assert_eq!(length_gl(&d, &g).unwrap().exponent(), Some(1));
        let w = Matrix::from_rows(vec![vec![f2("X"), f2("X^2")], vec![f2("0"), f2("X^-1")]]).unwrap();
        assert_eq!(length_gl(&d, &w).unwrap().exponent(), Some(2));
    }

    #[test]
    fn archimedean_length() {
        let e = Norm::Eval { t: "2".into() };
        let g = Matrix::diagonal(vec![qx("X^2"), qx("1")]);
        let l = length_gl(&e, &g).unwrap();
        assert!((l.value() - 4f64.ln()).abs() < 1e-8);
        assert!((operator_norm(&[vec![3.0, 0.0], vec![0.0, 1.0]]) - 3.0).abs() < 1e-9);
    }
}
