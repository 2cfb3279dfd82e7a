use std::fmt;

use super::field::Field;
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};

/// Square matrix with rational-function entries, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Matrix<F: Field> {
    n: usize,
    e: Vec<RatFunc<F>>,
}

impl<F: Field> Matrix<F> {
    pub fn from_rows(rows: Vec<Vec<RatFunc<F>>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parse("matrix must be square and nonempty".into()));
        }
        Ok(Matrix { n, e: rows.into_iter().flatten().collect() })
    }

    pub fn identity(n: usize) -> Self {
        let mut e = vec![RatFunc::zero(); n * n];
        for i in 0..n {
            e[i * n + i] = RatFunc::one();
        }
        Matrix { n, e }
    }

    pub fn diagonal(d: Vec<RatFunc<F>>) -> Self {
        let n = d.len();
        let mut m = Self::identity(n);
        for (i, a) in d.into_iter().enumerate() {
            m.e[i * n + i] = a;
        }
        m
    }

    /// `1 + a·E_ij`.
    pub fn elementary(n: usize, i: usize, j: usize, a: RatFunc<F>) -> Self {
        let mut m = Self::identity(n);
        m.e[i * n + j] = a;
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &RatFunc<F> {
        &self.e[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, a: RatFunc<F>) {
        self.e[i * self.n + j] = a;
    }

    pub fn entries(&self) -> &[RatFunc<F>] {
        &self.e
    }

    pub fn rows(&self) -> Vec<Vec<RatFunc<F>>> {
        self.e.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n, "dimension mismatch");
        let n = self.n;
        let mut e = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = RatFunc::zero();
                for k in 0..n {
                    let (a, b) = (self.get(i, k), o.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                e.push(acc);
            }
        }
        Matrix { n, e }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Matrix { n: self.n, e: self.e.iter().zip(&o.e).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn is_upper_unipotent(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| match i.cmp(&j) {
                std::cmp::Ordering::Equal => self.get(i, j).is_one(),
                std::cmp::Ordering::Greater => self.get(i, j).is_zero(),
                std::cmp::Ordering::Less => true,
            })
        })
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_upper_unipotent() {
            return Ok(self.unipotent_inverse());
        }
        self.gauss_jordan_inverse()
    }

    /// `u⁻¹ = Σ_k (−N)^k` with `N = u − 1` nilpotent.
    fn unipotent_inverse(&self) -> Self {
        let id = Self::identity(self.n);
        let minus_n = id.sub(self);
        let mut acc = id.clone();
        let mut p = id;
        for _ in 1..self.n {
            p = p.mul(&minus_n);
            acc = Matrix { n: self.n, e: acc.e.iter().zip(&p.e).map(|(a, b)| a.add(b)).collect() };
        }
        acc
    }

    fn gauss_jordan_inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a = self.rows();
        let mut inv = Self::identity(n).rows();
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(Error::SingularMatrix)?;
            a.swap(col, piv);
            inv.swap(col, piv);
            let s = a[col][col].inv().expect("nonzero pivot");
            for j in 0..n {
                a[col][j] = a[col][j].mul(&s);
                inv[col][j] = inv[col][j].mul(&s);
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for j in 0..n {
                    let x = a[col][j].mul(&f);
                    a[r][j] = a[r][j].sub(&x);
                    let y = inv[col][j].mul(&f);
                    inv[r][j] = inv[r][j].sub(&y);
                }
            }
        }
        Self::from_rows(inv)
    }
}

impl<F: Field> fmt::Display for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.e.chunks(self.n).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, a) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}
