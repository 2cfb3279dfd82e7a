use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Coefficient fields for polynomial and rational-function rings.
pub trait Field: Clone + PartialEq + Eq + Hash + Debug + Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; panics on zero.
    fn inv(&self) -> Self;
    fn from_int(n: &BigInt) -> Self;
    fn characteristic() -> u64;
    /// Name used in ring specifications, e.g. `f2` or `q`.
    fn name() -> String;

    /// The `p`-adic valuation, for fields where it makes sense.
    fn padic_val(&self, _p: u64) -> Option<i64> {
        None
    }

    /// The element as an exact rational number, in characteristic zero.
    fn to_rational(&self) -> Option<BigRational> {
        None
    }

    fn from_i64(n: i64) -> Self {
        Self::from_int(&BigInt::from(n))
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

/// The prime field `Z/P`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct Fp<const P: u64>(pub u64);

impl<const P: u64> Fp<P> {
    pub fn new(v: i64) -> Self {
        Fp(v.rem_euclid(P as i64) as u64)
    }

    /// Every element of the field, in increasing representative order.
    pub fn all() -> impl Iterator<Item = Self> {
        (0..P).map(Fp)
    }
}

impl<const P: u64> Display for Fp<P> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Field for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1 % P)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn add(&self, o: &Self) -> Self {
        Fp((self.0 + o.0) % P)
    }
    fn sub(&self, o: &Self) -> Self {
        Fp((self.0 + P - o.0) % P)
    }
    fn mul(&self, o: &Self) -> Self {
        Fp((self.0 * o.0) % P)
    }
    fn neg(&self) -> Self {
        Fp((P - self.0) % P)
    }
    fn inv(&self) -> Self {
        assert!(self.0 != 0, "inverse of zero in F_{P}");
        // Fermat: a^(P-2)
        let (mut base, mut e, mut acc) = (self.0, P - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % P;
            }
            base = base * base % P;
            e >>= 1;
        }
        Fp(acc)
    }
    fn from_int(n: &BigInt) -> Self {
        let r = n.mod_floor(&BigInt::from(P));
        Fp(r.to_u64().expect("residue fits"))
    }
    fn characteristic() -> u64 {
        P
    }
    fn name() -> String {
        format!("f{P}")
    }
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        assert!(!Zero::is_zero(self), "inverse of zero in Q");
        self.recip()
    }
    fn from_int(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }
    fn characteristic() -> u64 {
        0
    }
    fn name() -> String {
        "q".into()
    }
    fn padic_val(&self, p: u64) -> Option<i64> {
        if Zero::is_zero(self) {
            return None;
        }
        Some(int_val(self.numer(), p) - int_val(self.denom(), p))
    }
    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }
}

/// `v_p(n)` for a nonzero integer.
pub fn int_val(n: &BigInt, p: u64) -> i64 {
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !Zero::is_zero(&r) {
            return v;
        }
        n = q;
        v += 1;
    }
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fp_arithmetic() {
        let a = Fp::<7>::new(3);
        assert_eq!(a.mul(&a.inv()), Fp::one());
        assert_eq!(Fp::<7>::new(-1), Fp(6));
        assert_eq!(Fp::<2>::new(1).add(&Fp(1)), Fp(0));
    }

    #[test]
    fn rational_valuation() {
        let x = BigRational::new(12.into(), 5.into());
        assert_eq!(x.padic_val(2), Some(2));
        assert_eq!(x.padic_val(5), Some(-1));
        assert_eq!(x.padic_val(3), Some(1));
    }
}
