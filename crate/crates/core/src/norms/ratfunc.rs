use std::collections::BTreeMap;
use std::fmt;

use super::field::Field;
use super::poly::Poly;

/// A rational function `num/den` in lowest terms with a monic denominator.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFunc<F: Field> {
    num: Poly<F>,
    den: Poly<F>,
}

impl<F: Field> RatFunc<F> {
    /// Panics if `den` is zero.
    pub fn new(num: Poly<F>, den: Poly<F>) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        if den.is_one() {
            return RatFunc { num, den };
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = if g.is_one() { (num, den) } else { (num.divrem(&g).0, den.divrem(&g).0) };
        let l = d.leading().expect("nonzero").inv();
        n = n.scale(&l);
        d = d.scale(&l);
        RatFunc { num: n, den: d }
    }

    pub fn from_poly(p: Poly<F>) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn constant(a: F) -> Self {
        Self::from_poly(Poly::constant(a))
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    /// `X^e` for any integer `e`.
    pub fn x_pow(e: i64) -> Self {
        if e >= 0 {
            Self::from_poly(Poly::monomial(F::one(), e as usize))
        } else {
            RatFunc { num: Poly::one(), den: Poly::monomial(F::one(), (-e) as usize) }
        }
    }

    /// Laurent polynomial from `exponent -> coefficient`.
    pub fn laurent(terms: &BTreeMap<i64, F>) -> Self {
        let low = terms.keys().next().copied().unwrap_or(0).min(0);
        let mut c = Vec::new();
        for (&e, a) in terms {
            let i = (e - low) as usize;
            if c.len() <= i {
                c.resize(i + 1, F::zero());
            }
            c[i] = c[i].add(a);
        }
        Self::new(Poly::new(c), Poly::monomial(F::one(), (-low) as usize))
    }

    pub fn num(&self) -> &Poly<F> {
        &self.num
    }

    pub fn den(&self) -> &Poly<F> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_one() && self.num.is_constant()
    }

    /// The constant value, if this is a constant.
    pub fn as_constant(&self) -> Option<F> {
        self.is_constant().then(|| self.num.coeff(0))
    }

    /// `exponent -> coefficient` when the denominator is a power of `X`.
    pub fn laurent_terms(&self) -> Option<BTreeMap<i64, F>> {
        let d = self.den.deg()?;
        if self.den.coeffs()[..d].iter().any(|a| !a.is_zero()) {
            return None;
        }
        Some(
            self.num
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, a)| !a.is_zero())
                .map(|(i, a)| (i as i64 - d as i64, a.clone()))
                .collect(),
        )
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::new(self.num.add(&o.num), self.den.clone());
        }
        Self::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return Self::from_poly(self.num.mul(&o.num));
        }
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn inv(&self) -> Option<Self> {
        (!self.is_zero()).then(|| Self::new(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|i| self.mul(&i))
    }

    pub fn pow(&self, e: i64) -> Option<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let e = e.unsigned_abs() as u32;
        Some(RatFunc { num: base.num.pow(e), den: base.den.pow(e) })
    }

    /// `deg num − deg den`; `None` for zero.
    pub fn degree(&self) -> Option<i64> {
        Some(self.num.deg()? as i64 - self.den.deg().expect("nonzero") as i64)
    }

    /// Order of vanishing along the irreducible polynomial `q`.
    pub fn order_at(&self, q: &Poly<F>) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(self.num.multiplicity(q) as i64 - self.den.multiplicity(q) as i64)
    }

    pub fn eval(&self, t: &F) -> Option<F> {
        let d = self.den.eval(t);
        (!d.is_zero()).then(|| self.num.eval(t).mul(&d.inv()))
    }
}

impl<F: Field> fmt::Display for RatFunc<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &Poly<F>| {
            let s = p.to_string();
            if s.contains(' ') {
                format!("({s})")
            } else {
                s
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::field::Fp;

    type R2 = RatFunc<Fp<2>>;

    #[test]
    fn lowest_terms() {
        let x = R2::x_pow(1);
        let one = R2::one();
        let a = x.add(&one).mul(&x); // X^2+X
        let b = a.div(&x.add(&one)).unwrap();
        assert_eq!(b, x);
        assert_eq!(x.inv().unwrap(), R2::x_pow(-1));
        assert_eq!(R2::x_pow(-2).mul(&R2::x_pow(3)), x);
    }

    #[test]
    fn degree_and_order() {
        let x = R2::x_pow(1);
        let f = R2::one().div(&x.add(&R2::one())).unwrap();
        assert_eq!(f.degree(), Some(-1));
        assert_eq!(R2::x_pow(-3).order_at(&Poly::x()), Some(-3));
        let t: BTreeMap<i64, Fp<2>> = [(-1, Fp(1)), (1, Fp(1))].into_iter().collect();
        assert_eq!(R2::laurent(&t).laurent_terms().unwrap(), t);
    }
}
