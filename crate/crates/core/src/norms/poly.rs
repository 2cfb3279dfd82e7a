use std::fmt;

use num_traits::Signed;

use super::field::Field;

/// Dense univariate polynomial in `X`, lowest coefficient first, with no
/// trailing zeros (the zero polynomial has no coefficients).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly<F: Field> {
    c: Vec<F>,
}

impl<F: Field> Poly<F> {
    pub fn new(mut c: Vec<F>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn constant(a: F) -> Self {
        Self::new(vec![a])
    }

    /// `a·X^e`.
    pub fn monomial(a: F, e: usize) -> Self {
        let mut c = vec![F::zero(); e + 1];
        c[e] = a;
        Self::new(c)
    }

    pub fn x() -> Self {
        Self::monomial(F::one(), 1)
    }

    pub fn coeffs(&self) -> &[F] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> F {
        self.c.get(i).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0].is_one()
    }

    pub fn deg(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Order of vanishing at `X = 0`.
    pub fn low_deg(&self) -> Option<usize> {
        self.c.iter().position(|a| !a.is_zero())
    }

    pub fn leading(&self) -> Option<&F> {
        self.c.last()
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|i| self.coeff(i).add(&o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|i| self.coeff(i).sub(&o.coeff(i))).collect())
    }

    pub fn neg(&self) -> Self {
        Poly { c: self.c.iter().map(|a| a.neg()).collect() }
    }

    pub fn scale(&self, a: &F) -> Self {
        Self::new(self.c.iter().map(|x| x.mul(a)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![F::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = c[i + j].add(&a.mul(b));
            }
        }
        Self::new(c)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Multiplies by `X^e`.
    pub fn shift(&self, e: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = vec![F::zero(); e];
        c.extend(self.c.iter().cloned());
        Poly { c }
    }

    /// Divides by `X^e`, assuming the low coefficients vanish.
    pub fn unshift(&self, e: usize) -> Self {
        debug_assert!(self.c.iter().take(e).all(|a| a.is_zero()));
        Poly { c: self.c.iter().skip(e).cloned().collect() }
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.deg().expect("division by zero polynomial");
        let lead_inv = d.c[dd].inv();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![F::zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            let f = r[i].mul(&lead_inv);
            if f.is_zero() {
                continue;
            }
            for (j, b) in d.c.iter().enumerate() {
                r[i - dd + j] = r[i - dd + j].sub(&f.mul(b));
            }
            q[i - dd] = f;
        }
        (Self::new(q), Self::new(r))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(l) => self.scale(&l.inv()),
        }
    }

    /// Monic greatest common divisor (zero iff both are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval(&self, t: &F) -> F {
        self.c.iter().rev().fold(F::zero(), |acc, a| acc.mul(t).add(a))
    }

    /// Largest `l` with `q^l | self`, for a nonconstant `q` and nonzero self.
    pub fn multiplicity(&self, q: &Self) -> usize {
        let mut p = self.clone();
        let mut l = 0;
        loop {
            let (d, r) = p.divrem(q);
            if !r.is_zero() {
                return l;
            }
            p = d;
            l += 1;
        }
    }
}

fn is_negative<F: Field>(a: &F) -> bool {
    a.to_rational().is_some_and(|r| r.is_negative())
}

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let neg = is_negative(a);
            let mag = if neg { a.neg() } else { a.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let coef = if mag.is_one() && e > 0 { String::new() } else { mag.to_string() };
            match e {
                0 => write!(f, "{coef}")?,
                1 if coef.is_empty() => write!(f, "X")?,
                1 => write!(f, "{coef}*X")?,
                _ if coef.is_empty() => write!(f, "X^{e}")?,
                _ => write!(f, "{coef}*X^{e}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::field::Fp;
    use num_rational::BigRational;

    type P2 = Poly<Fp<2>>;

    fn p2(bits: u32) -> P2 {
        Poly::new((0..32).map(|i| Fp((bits >> i) as u64 & 1)).collect())
    }

    #[test]
    fn f2_arithmetic() {
        // (X+1)^2 = X^2+1 in characteristic 2
        assert_eq!(p2(0b11).mul(&p2(0b11)), p2(0b101));
        let (q, r) = p2(0b1011).divrem(&p2(0b11));
        assert_eq!(q.mul(&p2(0b11)).add(&r), p2(0b1011));
        assert_eq!(p2(0b110).gcd(&p2(0b1010)), p2(0b110));
        assert_eq!(p2(0b1100).multiplicity(&P2::x()), 2);
    }

    #[test]
    fn display() {
        assert_eq!(p2(0b110).to_string(), "X^2 + X");
        let q = Poly::new(vec![BigRational::from_integer(1.into()), BigRational::from_integer((-2).into())]);
        assert_eq!(q.to_string(), "-2*X + 1");
    }
}
