//! Norms on polynomial and rational-function rings, the sets `B_A(k, s)`,
//! and norm-induced lengths on `GL(n)`.

pub mod enumerate;
pub mod field;
pub mod matrix;
pub mod norm;
pub mod parse;
pub mod poly;
pub mod ratfunc;
pub mod unipotent;

use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

pub use enumerate::{enumerate_ball_ba, RingSpec, SparseElement, DEFAULT_ENUM_BUDGET};
pub use field::{Field, Fp};
pub use matrix::Matrix;
pub use norm::{length_gl, Length, Norm, NormValue};
pub use parse::parse_ratfunc;
pub use poly::Poly;
pub use ratfunc::RatFunc;
pub use unipotent::{diagonal_length, dilation, unipotent_level};

use crate::error::{Error, Result};

/// Coefficient field of a runtime-typed ring element, written `f2`, `f3`,
/// `f5`, `f7` or `q`. Elements live in the rational-function field over it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseField {
    F2,
    F3,
    F5,
    F7,
    Q,
}

impl BaseField {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "f2" => Ok(BaseField::F2),
            "f3" => Ok(BaseField::F3),
            "f5" => Ok(BaseField::F5),
            "f7" => Ok(BaseField::F7),
            "q" | "z" => Ok(BaseField::Q),
            other => Err(Error::BadParams(format!("unsupported coefficient field {other:?}"))),
        }
    }
}

macro_rules! dyn_enum {
    ($name:ident, $inner:ident) => {
        #[derive(Clone, Debug, PartialEq, Eq, Hash)]
        pub enum $name {
            F2($inner<Fp<2>>),
            F3($inner<Fp<3>>),
            F5($inner<Fp<5>>),
            F7($inner<Fp<7>>),
            Q($inner<BigRational>),
        }
    };
}

dyn_enum!(AnyElem, RatFunc);
dyn_enum!(AnyMatrix, Matrix);

/// Runs `$body` with `$F` bound to the coefficient type of `$field`.
macro_rules! with_field {
    ($field:expr, $F:ident => $body:expr) => {
        match $field {
            BaseField::F2 => {
                type $F = Fp<2>;
                $body
            }
            BaseField::F3 => {
                type $F = Fp<3>;
                $body
            }
            BaseField::F5 => {
                type $F = Fp<5>;
                $body
            }
            BaseField::F7 => {
                type $F = Fp<7>;
                $body
            }
            BaseField::Q => {
                type $F = BigRational;
                $body
            }
        }
    };
}

/// Destructures one runtime value, binding the typed payload.
macro_rules! each {
    ($ty:ident, $v:expr, $x:ident => $body:expr) => {
        match $v {
            $ty::F2($x) => $body,
            $ty::F3($x) => $body,
            $ty::F5($x) => $body,
            $ty::F7($x) => $body,
            $ty::Q($x) => $body,
        }
    };
}

/// Destructures two runtime values over the same field.
macro_rules! pair {
    ($ty:ident, $a:expr, $b:expr, $x:ident, $y:ident => $body:expr) => {
        match ($a, $b) {
            ($ty::F2($x), $ty::F2($y)) => Ok($ty::F2($body)),
            ($ty::F3($x), $ty::F3($y)) => Ok($ty::F3($body)),
            ($ty::F5($x), $ty::F5($y)) => Ok($ty::F5($body)),
            ($ty::F7($x), $ty::F7($y)) => Ok($ty::F7($body)),
            ($ty::Q($x), $ty::Q($y)) => Ok($ty::Q($body)),
            _ => Err(Error::DomainMismatch("operands over different fields".into())),
        }
    };
}

pub trait Wrap: Field {
    fn wrap_elem(x: RatFunc<Self>) -> AnyElem;
    fn wrap_matrix(m: Matrix<Self>) -> AnyMatrix;
}

macro_rules! impl_wrap {
    ($t:ty, $v:ident) => {
        impl Wrap for $t {
            fn wrap_elem(x: RatFunc<Self>) -> AnyElem {
                AnyElem::$v(x)
            }
            fn wrap_matrix(m: Matrix<Self>) -> AnyMatrix {
                AnyMatrix::$v(m)
            }
        }
    };
}

impl_wrap!(Fp<2>, F2);
impl_wrap!(Fp<3>, F3);
impl_wrap!(Fp<5>, F5);
impl_wrap!(Fp<7>, F7);
impl_wrap!(BigRational, Q);

impl AnyElem {
    pub fn parse(field: BaseField, s: &str) -> Result<Self> {
        with_field!(field, F => Ok(F::wrap_elem(parse_ratfunc::<F>(s)?)))
    }

    pub fn field(&self) -> BaseField {
        match self {
            AnyElem::F2(_) => BaseField::F2,
            AnyElem::F3(_) => BaseField::F3,
            AnyElem::F5(_) => BaseField::F5,
            AnyElem::F7(_) => BaseField::F7,
            AnyElem::Q(_) => BaseField::Q,
        }
    }

    pub fn norm(&self, norm: &Norm) -> Result<NormValue> {
        each!(AnyElem, self, x => norm.eval(x))
    }

    pub fn mul(&self, o: &AnyElem) -> Result<AnyElem> {
        pair!(AnyElem, self, o, x, y => x.mul(y))
    }

    pub fn add(&self, o: &AnyElem) -> Result<AnyElem> {
        pair!(AnyElem, self, o, x, y => x.add(y))
    }
}

impl fmt::Display for AnyElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        each!(AnyElem, self, x => write!(f, "{x}"))
    }
}

impl AnyMatrix {
    pub fn parse(field: BaseField, rows: &[Vec<String>]) -> Result<Self> {
        with_field!(field, F => {
            let rows = rows
                .iter()
                .map(|r| r.iter().map(|s| parse_ratfunc::<F>(s)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Ok(F::wrap_matrix(Matrix::from_rows(rows)?))
        })
    }

    pub fn identity(field: BaseField, n: usize) -> Self {
        with_field!(field, F => F::wrap_matrix(Matrix::<F>::identity(n)))
    }

    /// `(X^n, P; 0, X^{-n})`, the image of a lamplighter-type element.
    pub fn wreath(field: BaseField, n: i64, p: &str) -> Result<Self> {
        with_field!(field, F => {
            let p = parse_ratfunc::<F>(p)?;
            let rows = vec![vec![RatFunc::x_pow(n), p], vec![RatFunc::zero(), RatFunc::x_pow(-n)]];
            Ok(F::wrap_matrix(Matrix::from_rows(rows)?))
        })
    }

    pub fn field(&self) -> BaseField {
        match self {
            AnyMatrix::F2(_) => BaseField::F2,
            AnyMatrix::F3(_) => BaseField::F3,
            AnyMatrix::F5(_) => BaseField::F5,
            AnyMatrix::F7(_) => BaseField::F7,
            AnyMatrix::Q(_) => BaseField::Q,
        }
    }

    pub fn dim(&self) -> usize {
        each!(AnyMatrix, self, m => m.dim())
    }

    pub fn mul(&self, o: &AnyMatrix) -> Result<AnyMatrix> {
        if self.dim() != o.dim() {
            return Err(Error::DomainMismatch("matrix dimensions differ".into()));
        }
        pair!(AnyMatrix, self, o, x, y => x.mul(y))
    }

    pub fn inverse(&self) -> Result<AnyMatrix> {
        each!(AnyMatrix, self, m => m.inverse().map(Wrap::wrap_matrix))
    }

    pub fn is_identity(&self) -> bool {
        each!(AnyMatrix, self, m => m.is_identity())
    }

    pub fn is_upper_unipotent(&self) -> bool {
        each!(AnyMatrix, self, m => m.is_upper_unipotent())
    }

    pub fn length(&self, norm: &Norm) -> Result<Length> {
        each!(AnyMatrix, self, m => length_gl(norm, m))
    }

    /// Length in exponent units; errors for archimedean norms.
    pub fn length_exponent(&self, norm: &Norm) -> Result<i64> {
        self.length(norm)?
            .exponent()
            .ok_or_else(|| Error::BadParams("exponent lengths need a discrete norm".into()))
    }

    /// Entries as text, row by row.
    pub fn rows(&self) -> Vec<Vec<String>> {
        each!(AnyMatrix, self, m => m.rows().iter().map(|r| r.iter().map(|a| a.to_string()).collect()).collect())
    }

    pub fn dilate(&self, theta: &AnyElem) -> Result<AnyMatrix> {
        pair!(AnyMatrix, self, &theta.as_scalar_matrix(self.dim()), m, t => dilation(t.get(0, 0), m)?)
    }

    pub fn unipotent_level(&self, theta: &AnyElem, norm: &Norm) -> Result<i64> {
        match (self, theta) {
            (AnyMatrix::F2(m), AnyElem::F2(t)) => unipotent_level(m, t, norm),
            (AnyMatrix::F3(m), AnyElem::F3(t)) => unipotent_level(m, t, norm),
            (AnyMatrix::F5(m), AnyElem::F5(t)) => unipotent_level(m, t, norm),
            (AnyMatrix::F7(m), AnyElem::F7(t)) => unipotent_level(m, t, norm),
            (AnyMatrix::Q(m), AnyElem::Q(t)) => unipotent_level(m, t, norm),
            _ => Err(Error::DomainMismatch("matrix and dilation element over different fields".into())),
        }
    }
}

impl AnyElem {
    fn as_scalar_matrix(&self, n: usize) -> AnyMatrix {
        each!(AnyElem, self, x => {
            let mut m = Matrix::identity(n);
            m.set(0, 0, x.clone());
            Wrap::wrap_matrix(m)
        })
    }
}

impl fmt::Display for AnyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        each!(AnyMatrix, self, m => write!(f, "{m}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runtime_matrices() {
        let g = AnyMatrix::wreath(BaseField::F2, 1, "X^2").unwrap();
        assert_eq!(g.length_exponent(&Norm::degree()).unwrap(), 2);
        let h = g.inverse().unwrap();
        assert!(g.mul(&h).unwrap().is_identity());
        let q = AnyMatrix::identity(BaseField::Q, 2);
        assert!(matches!(g.mul(&q), Err(Error::DomainMismatch(_))));
    }

    #[test]
    fn runtime_dilation() {
        let theta = AnyElem::parse(BaseField::F2, "X").unwrap();
        let u = AnyMatrix::parse(BaseField::F2, &[vec!["1".into(), "X".into()], vec!["0".into(), "1".into()]]).unwrap();
        let d = u.dilate(&theta).unwrap();
        assert_eq!(d.rows()[0][1], "X^2");
        assert_eq!(d.unipotent_level(&theta, &Norm::degree()).unwrap(), 2);
    }
}
