//! Exactness witnesses: partitions of unity over a bounded cover whose
//! variation across pairs at distance `≤ R` is at most `ε`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::decomp::DecompositionCertificate;
use crate::error::{Error, Result};
use crate::metric::{fmt_q, parse_q, Dist, FiniteMetricSpace, PointSet, Q};

pub fn big(x: &Q) -> BigRational {
    BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()))
}

pub fn fmt_big(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_big(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let (n, d) = t.split_once('/').unwrap_or((t, "1"));
    let n: BigInt = n.trim().parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    let d: BigInt = d.trim().parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactnessWitness {
    pub cover: Vec<PointSet>,
    /// Nonzero values of `φ_U` for each cover piece, keyed by point.
    pub phi: Vec<BTreeMap<usize, BigRational>>,
    pub r: Q,
    pub eps: Q,
    pub bound: Q,
}

#[derive(Clone, Debug)]
pub struct WitnessReport {
    pub valid: bool,
    pub worst_variation: BigRational,
    pub worst_pair: Option<(String, String)>,
    pub problems: Vec<String>,
}

/// The constant function 1 on a single piece.
pub fn constant_witness(space: &FiniteMetricSpace, r: &Q, eps: &Q) -> Result<ExactnessWitness> {
    let all = space.all_points();
    let bound = space.diameter_of(&all)?;
    let phi = vec![all.iter().map(|&p| (p, BigRational::one())).collect()];
    Ok(ExactnessWitness { cover: vec![all], phi, r: *r, eps: *eps, bound })
}

/// Tents around the final pieces of a certificate.
///
/// Tries the challenges `r ≥ 4R/ε` in increasing order; with `t = r/2` each
/// final piece `U` gets `ψ_U(x) = max(0, 1 − d(x, U)/t)`, and
/// `φ_U = ψ_U / Σ_V ψ_V`. The first family that [`verify_witness`] accepts is
/// returned. Supports have diameter below the certificate bound plus `r`.
pub fn pou_from_certificate(cert: &DecompositionCertificate, r_param: &Q, eps: &Q) -> Result<ExactnessWitness> {
    if *r_param <= Q::from_integer(0) || *eps <= Q::from_integer(0) {
        return Err(Error::BadParams("R and eps must be positive".into()));
    }
    let space = &cert.ambient;
    let cores = cert.final_family()?;
    if cores.len() == 1 && cores[0].len() == space.len() {
        return constant_witness(space, r_param, eps);
    }
    let need = Q::from_integer(4) * r_param / eps;
    let mut scales: Vec<Q> = cert.steps.iter().map(|s| s.r).filter(|r| *r >= need).collect();
    scales.sort();
    scales.dedup();
    for r in scales {
        let w = tent_witness(cert, &r, r_param, eps)?;
        if verify_witness(space, &w).valid {
            return Ok(w);
        }
    }
    Err(Error::NoSuitableStep)
}

/// Normalized tents `max(0, 1 − 2·d(x, U)/r)` over the final pieces, unchecked.
pub fn tent_witness(cert: &DecompositionCertificate, r: &Q, r_param: &Q, eps: &Q) -> Result<ExactnessWitness> {
    let space = &cert.ambient;
    let cores = cert.final_family()?;
    let t = big(r) / BigRational::from_integer(2.into());
    let psi: Vec<BTreeMap<usize, BigRational>> = cores
        .par_iter()
        .map(|core| {
            (0..space.len())
                .filter_map(|x| {
                    let Dist::Finite(d) = space.dist_to_set(x, core) else { return None };
                    let v = BigRational::one() - big(&d) / &t;
                    v.is_positive().then_some((x, v))
                })
                .collect()
        })
        .collect();
    let mut sums = vec![BigRational::zero(); space.len()];
    for m in &psi {
        for (&x, v) in m {
            sums[x] += v;
        }
    }
    if let Some(x) = sums.iter().position(|s| s.is_zero()) {
        return Err(Error::MalformedCertificate(format!("point {} is in no final piece", space.id(x))));
    }
    let phi: Vec<BTreeMap<usize, BigRational>> =
        psi.into_iter().map(|m| m.into_iter().map(|(x, v)| (x, v / &sums[x])).collect()).collect();
    let cover = phi.iter().map(|m| m.keys().copied().collect()).collect();
    Ok(ExactnessWitness { cover, phi, r: *r_param, eps: *eps, bound: cert.bound + *r })
}

pub fn verify_witness(space: &FiniteMetricSpace, w: &ExactnessWitness) -> WitnessReport {
    let n = space.len();
    let mut problems = Vec::new();
    if w.phi.len() != w.cover.len() {
        problems.push(format!("{} functions for {} cover pieces", w.phi.len(), w.cover.len()));
    }
    let mut at: Vec<Vec<(usize, &BigRational)>> = vec![Vec::new(); n];
    for (k, (m, piece)) in w.phi.iter().zip(&w.cover).enumerate() {
        match space.diameter_of(piece) {
            Ok(d) if d <= w.bound => {}
            _ => problems.push(format!("cover piece {k} is not bounded by {}", fmt_q(&w.bound))),
        }
        for (&x, v) in m {
            if x >= n {
                problems.push(format!("function {k} is defined off the space"));
                continue;
            }
            if v.is_negative() || *v > BigRational::one() {
                problems.push(format!("phi_{k}({}) = {} is outside [0, 1]", space.id(x), fmt_big(v)));
            }
            if !v.is_zero() && !piece.contains(x) {
                problems.push(format!("phi_{k} is nonzero at {} outside its piece", space.id(x)));
            }
            if !v.is_zero() {
                at[x].push((k, v));
            }
        }
    }
    for (x, vals) in at.iter().enumerate() {
        let s: BigRational = vals.iter().map(|(_, v)| (*v).clone()).sum();
        if !s.is_one() {
            problems.push(format!("values at {} sum to {}", space.id(x), fmt_big(&s)));
        }
    }
    let reach = Dist::Finite(w.r);
    let worst = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut best: Option<(BigRational, usize, usize)> = None;
            for y in x + 1..n {
                if space.dist(x, y) > reach {
                    continue;
                }
                let v = variation(&at[x], &at[y]);
                if best.as_ref().is_none_or(|(b, _, _)| v > *b) {
                    best = Some((v, x, y));
                }
            }
            best
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (Some(a), Some(b)) => Some(if b.0 > a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) { b } else { a }),
                (a, None) => a,
                (None, b) => b,
            },
        );
    let (worst_variation, worst_pair) = match worst {
        Some((v, x, y)) => (v, Some((space.id(x).to_string(), space.id(y).to_string()))),
        None => (BigRational::zero(), None),
    };
    if worst_variation > big(&w.eps) {
        problems.push(format!("variation {} exceeds eps {}", fmt_big(&worst_variation), fmt_q(&w.eps)));
    }
    WitnessReport { valid: problems.is_empty(), worst_variation, worst_pair, problems }
}

/// `Σ_U |φ_U(x) − φ_U(y)|` over two sparse rows sorted by piece.
fn variation(a: &[(usize, &BigRational)], b: &[(usize, &BigRational)]) -> BigRational {
    let (mut i, mut j) = (0, 0);
    let mut s = BigRational::zero();
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&(p, u)), Some(&(q, v))) if p == q => {
                s += (u - v).abs();
                i += 1;
                j += 1;
            }
            (Some(&(p, u)), Some(&(q, _))) if p < q => {
                s += u;
                i += 1;
            }
            (Some(&(_, u)), None) => {
                s += u;
                i += 1;
            }
            (_, Some(&(_, v))) => {
                s += v;
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    s
}

pub fn witness_to_json(space: &FiniteMetricSpace, w: &ExactnessWitness) -> Value {
    let cover: Vec<Value> = w.cover.iter().map(|s| json!(s.iter().map(|&p| space.id(p)).collect::<Vec<_>>())).collect();
    let phi: Vec<Value> = w
        .phi
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let values: Map<String, Value> =
                m.iter().map(|(&x, v)| (space.id(x).to_string(), Value::String(fmt_big(v)))).collect();
            json!({"piece": k, "values": values})
        })
        .collect();
    json!({"cover": cover, "phi": phi, "R": fmt_q(&w.r), "eps": fmt_q(&w.eps), "B": fmt_q(&w.bound)})
}

pub fn witness_from_json(space: &FiniteMetricSpace, v: &Value) -> Result<ExactnessWitness> {
    let bad = |m: &str| Error::Parse(format!("witness: {m}"));
    let lookup = |id: &Value| -> Result<usize> {
        let s = match id {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            _ => return Err(bad("point ids must be strings")),
        };
        space.index_of(&s).ok_or_else(|| bad(&format!("unknown point {s:?}")))
    };
    let cover = v
        .get("cover")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing cover"))?
        .iter()
        .map(|s| s.as_array().ok_or_else(|| bad("cover pieces must be lists"))?.iter().map(lookup).collect())
        .collect::<Result<Vec<PointSet>>>()?;
    let mut phi = vec![BTreeMap::new(); cover.len()];
    for f in v.get("phi").and_then(Value::as_array).ok_or_else(|| bad("missing phi"))? {
        let k = f.get("piece").and_then(Value::as_u64).ok_or_else(|| bad("phi entry needs a piece index"))? as usize;
        let slot = phi.get_mut(k).ok_or_else(|| bad("phi piece index out of range"))?;
        for (id, val) in f.get("values").and_then(Value::as_object).ok_or_else(|| bad("phi entry needs values"))? {
            let x = lookup(&Value::String(id.clone()))?;
            let s = val.as_str().map(str::to_string).unwrap_or_else(|| val.to_string());
            slot.insert(x, parse_big(&s)?);
        }
    }
    let rat = |k: &str| -> Result<Q> {
        match v.get(k) {
            Some(Value::String(s)) => parse_q(s),
            Some(Value::Number(n)) => parse_q(&n.to_string()),
            _ => Err(bad(&format!("missing {k}"))),
        }
    };
    Ok(ExactnessWitness { cover, phi, r: rat("R")?, eps: rat("eps")?, bound: rat("B")? })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::decomp::{play_game, Height, Strategy};
    use crate::metric::{q, MetricFamily};

    #[test]
    fn constant_function_is_valid() {
        let z = FiniteMetricSpace::integer_interval(0, 5);
        let w = constant_witness(&z, &q(100), &Q::new(1, 100)).unwrap();
        assert!(verify_witness(&z, &w).valid);
    }

    #[test]
    fn characteristic_functions_vary_too_much() {
        let z = FiniteMetricSpace::integer_interval(0, 9);
        let a: PointSet = (0..5).collect();
        let b: PointSet = (5..10).collect();
        let phi =
            vec![a.iter().map(|&x| (x, BigRational::one())).collect(), b.iter().map(|&x| (x, BigRational::one())).collect()];
        let w = ExactnessWitness { cover: vec![a, b], phi, r: q(1), eps: Q::new(1, 2), bound: q(4) };
        let rep = verify_witness(&z, &w);
        assert!(!rep.valid);
        assert_eq!(rep.worst_variation, BigRational::from_integer(2.into()));
        assert_eq!(rep.worst_pair, Some(("4".into(), "5".into())));
    }

    #[test]
    fn tents_on_an_interval() {
        let z = Arc::new(FiniteMetricSpace::integer_interval(0, 40));
        let c = play_game(&MetricFamily::single(z.clone()), &Strategy::IntervalSlabs { height: Height::Id }, &[q(8)])
            .unwrap();
        let w = pou_from_certificate(&c, &q(1), &q(1)).unwrap();
        let rep = verify_witness(&z, &w);
        assert!(rep.valid, "{:?}", rep.problems);
        let back = witness_from_json(&z, &witness_to_json(&z, &w)).unwrap();
        assert_eq!(back, w);
        assert!(matches!(pou_from_certificate(&c, &q(4), &q(1)), Err(Error::NoSuitableStep)));
    }
}
