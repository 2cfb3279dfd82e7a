use super::field::Field;
use super::matrix::Matrix;
use super::norm::{Length, Norm, NormValue};
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};

/// `Θ(u)_ij = θ^{j−i} u_ij` on upper unipotent matrices.
pub fn dilation<F: Field>(theta: &RatFunc<F>, u: &Matrix<F>) -> Result<Matrix<F>> {
    if !u.is_upper_unipotent() {
        return Err(Error::NotUnipotent);
    }
    if theta.is_zero() {
        return Err(Error::BadParams("dilation by zero".into()));
    }
    let n = u.dim();
    let mut out = u.clone();
    let mut powers = vec![RatFunc::one()];
    for k in 1..n {
        powers.push(powers[k - 1].mul(theta));
    }
    for i in 0..n {
        for j in i + 1..n {
            if !u.get(i, j).is_zero() {
                out.set(i, j, u.get(i, j).mul(&powers[j - i]));
            }
        }
    }
    Ok(out)
}

/// Exponent of `γ(θ)`; errors unless it is positive.
pub fn expansion_exponent<F: Field>(theta: &RatFunc<F>, norm: &Norm) -> Result<i64> {
    match norm.eval(theta)? {
        NormValue::Exp(e) if e > 0 => Ok(e),
        NormValue::Abs(_) => Err(Error::BadParams("unipotent levels need a discrete norm".into())),
        _ => Err(Error::ThetaNotExpanding),
    }
}

/// Minimal `k ≥ 0` with `Θ^{-k}(u)` of length zero.
///
/// Since `Θ^{-k}` scales entry `(i,j)` of both `u` and `u⁻¹` by
/// `θ^{-k(j-i)}`, this is the largest `⌈e_ij / ((j−i)·e_θ)⌉` over the
/// off-diagonal entry exponents.
pub fn unipotent_level<F: Field>(u: &Matrix<F>, theta: &RatFunc<F>, norm: &Norm) -> Result<i64> {
    let inv = if u.is_upper_unipotent() { u.inverse()? } else { return Err(Error::NotUnipotent) };
    unipotent_level_with_inverse(u, &inv, theta, norm)
}

pub fn unipotent_level_with_inverse<F: Field>(
    u: &Matrix<F>,
    inv: &Matrix<F>,
    theta: &RatFunc<F>,
    norm: &Norm,
) -> Result<i64> {
    let et = expansion_exponent(theta, norm)?;
    let n = u.dim();
    let mut k = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            for m in [u, inv] {
                if let NormValue::Exp(e) = norm.eval(m.get(i, j))? {
                    let step = (j - i) as i64 * et;
                    k = k.max(e.div_euclid(step) + i64::from(e.rem_euclid(step) != 0));
                }
            }
        }
    }
    Ok(k)
}

/// Length of `diag(π^{k_1}, …, π^{k_n})`: `max |k_i|` times the exponent of `π`.
pub fn diagonal_length<F: Field>(norm: &Norm, pi: &RatFunc<F>, ks: &[i64]) -> Result<Length> {
    let scale = norm.scale().ok_or_else(|| Error::BadParams("diagonal length needs a discrete norm".into()))?;
    let e = match norm.eval(pi)? {
        NormValue::Exp(e) if e != 0 => e.abs(),
        _ => return Err(Error::BadParams(format!("{pi} is not a uniformizer power for this norm"))),
    };
    let m = ks.iter().map(|k| k.abs()).max().unwrap_or(0);
    Ok(Length::Discrete { exponent: m * e, scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::field::Fp;
    use crate::norms::norm::length_gl;
    use crate::norms::parse::parse_ratfunc;

    type R = RatFunc<Fp<2>>;

    fn f2(s: &str) -> R {
        parse_ratfunc(s).unwrap()
    }

    fn u2(s: &str) -> Matrix<Fp<2>> {
        Matrix::elementary(2, 0, 1, f2(s))
    }

    #[test]
    fn dilation_examples() {
        let x = f2("X");
        assert!(dilation(&x, &Matrix::identity(3)).unwrap().is_identity());
        assert_eq!(dilation(&x, &u2("X")).unwrap(), u2("X^2"));
        let diag = Matrix::diagonal(vec![x.clone(), f2("1")]);
        assert!(matches!(dilation(&x, &diag), Err(Error::NotUnipotent)));
    }

    #[test]
    fn level_examples() {
        let d = Norm::degree();
        let x = f2("X");
        assert_eq!(unipotent_level(&u2("X^-2"), &x, &d).unwrap(), 0);
        assert_eq!(unipotent_level(&u2("X^2"), &x, &d).unwrap(), 2);
        assert!(matches!(unipotent_level(&u2("X"), &f2("X^-1"), &d), Err(Error::ThetaNotExpanding)));
        assert!(matches!(unipotent_level(&u2("X"), &f2("1"), &d), Err(Error::ThetaNotExpanding)));
    }

    #[test]
    fn diagonal_examples() {
        let d = Norm::degree();
        let x = f2("X");
        assert_eq!(diagonal_length(&d, &x, &[0, 0]).unwrap().exponent(), Some(0));
        assert_eq!(diagonal_length(&d, &x, &[2, -3]).unwrap().exponent(), Some(3));
        let g = Matrix::diagonal(vec![f2("X^2"), f2("X^-3")]);
        assert_eq!(length_gl(&d, &g).unwrap().exponent(), Some(3));
    }
}
