//! Word-metric balls of concrete groups: `Z^n`, weighted `⊕Z`, lamplighters
//! and matrix groups with norm-induced lengths.

mod coset;
mod lamplighter;

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use coset::{coset_partition, SubgroupSelector};
pub use lamplighter::{LampElement, LampGroup};

use crate::error::{Error, Result};
use crate::metric::{Dist, DistanceOracle, FiniteMetricSpace, SpaceOrigin, Q};
use crate::norms::{AnyMatrix, BaseField, Norm};

pub const DEFAULT_BALL_CAP: usize = 200_000;
/// Balls up to this size get a dense distance table.
pub const DENSE_LIMIT: usize = 3_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GroupSpec {
    /// `Z^n` with generator `±e_i` of length `weights[i]` (default all 1).
    FreeAbelian {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<i64>>,
    },
    /// `⊕Z` truncated to coordinates `1..=cutoff`, where `e_i` has length `i`.
    WeightedDirectSum { cutoff: usize },
    /// `L ≀ Z` with generators `t^{±1}` and the lamp generators.
    Lamplighter { lamp: LampGroup },
    Matrix(MatrixGroupSpec),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixGroupSpec {
    pub ring: BaseField,
    /// Generator matrices as rows of entry expressions; inverses are added.
    pub generators: Vec<Vec<Vec<String>>>,
    pub length: Norm,
}

impl GroupSpec {
    pub fn zn(n: usize) -> Self {
        GroupSpec::FreeAbelian { n, weights: None }
    }

    pub fn lamplighter_z2() -> Self {
        GroupSpec::Lamplighter { lamp: LampGroup::Cyclic(2) }
    }

    /// The 2×2 upper unipotent group over `F_2(X)` generated by
    /// `1 + X^i E_12` for `i = 0..=max_deg`, with the degree length.
    pub fn unipotent_f2(max_deg: usize) -> Self {
        let generators = (0..=max_deg)
            .map(|i| {
                let e = if i == 0 { "1".to_string() } else { format!("X^{i}") };
                vec![vec!["1".to_string(), e], vec!["0".to_string(), "1".to_string()]]
            })
            .collect();
        GroupSpec::Matrix(MatrixGroupSpec { ring: BaseField::F2, generators, length: Norm::degree() })
    }

    pub fn weights(&self) -> Result<Vec<i64>> {
        match self {
            GroupSpec::FreeAbelian { n, weights } => {
                let w = weights.clone().unwrap_or_else(|| vec![1; *n]);
                if w.len() != *n {
                    return Err(Error::BadParams(format!("{} weights for rank {n}", w.len())));
                }
                if w.iter().any(|&x| x <= 0) {
                    return Err(Error::BadParams("generator weights must be positive".into()));
                }
                Ok(w)
            }
            GroupSpec::WeightedDirectSum { cutoff } => Ok((1..=*cutoff as i64).collect()),
            _ => Err(Error::BadParams("not an abelian group spec".into())),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            GroupSpec::FreeAbelian { n: 0, .. } => Err(Error::BadParams("rank must be positive".into())),
            GroupSpec::FreeAbelian { .. } => self.weights().map(|_| ()),
            GroupSpec::WeightedDirectSum { cutoff: 0 } => Err(Error::BadParams("cutoff must be positive".into())),
            GroupSpec::Matrix(m) if m.generators.is_empty() => {
                Err(Error::BadParams("matrix group needs generators".into()))
            }
            GroupSpec::Matrix(m) if m.length.is_archimedean() => {
                Err(Error::BadParams("matrix balls need a discrete length".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupElement {
    Vector(Vec<i64>),
    Lamp(LampElement),
    Matrix(AnyMatrix),
}

impl GroupElement {
    pub fn as_vector(&self) -> Option<&[i64]> {
        match self {
            GroupElement::Vector(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_lamp(&self) -> Option<&LampElement> {
        match self {
            GroupElement::Lamp(l) => Some(l),
            _ => None,
        }
    }

    pub fn as_matrix(&self) -> Option<&AnyMatrix> {
        match self {
            GroupElement::Matrix(m) => Some(m),
            _ => None,
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Vector(v) if v.len() == 1 => write!(f, "{}", v[0]),
            GroupElement::Vector(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
            GroupElement::Lamp(l) => write!(f, "{l}"),
            GroupElement::Matrix(m) => write!(f, "{m}"),
        }
    }
}

/// `Σ_i i·|a_i|` with coordinates numbered from 1.
pub fn weighted_abelian_length(a: &[i64]) -> i64 {
    a.iter().enumerate().map(|(i, x)| (i as i64 + 1) * x.abs()).sum()
}

/// `Σ_i w_i·|a_i|`, the word length for commuting generators `±e_i` of length `w_i`.
pub fn abelian_length(a: &[i64], weights: &[i64]) -> i64 {
    a.iter().zip(weights).map(|(x, w)| w * x.abs()).sum()
}

/// Dijkstra over a weighted symmetric generating set; returns every element
/// of word length `≤ radius` with its length, in order of discovery.
pub fn word_ball<T, F>(identity: T, radius: i64, cap: usize, mut neighbors: F) -> Result<Vec<(T, i64)>>
where
    T: Clone + Eq + Hash,
    F: FnMut(&T) -> Vec<(T, i64)>,
{
    let mut best: HashMap<T, i64> = HashMap::new();
    let mut order = Vec::new();
    // integer weights: bucket queue indexed by distance
    let mut buckets: Vec<VecDeque<T>> = vec![VecDeque::new(); radius.max(0) as usize + 1];
    if radius < 0 {
        return Ok(order);
    }
    best.insert(identity.clone(), 0);
    buckets[0].push_back(identity);
    for d in 0..=radius {
        while let Some(g) = buckets[d as usize].pop_front() {
            if best[&g] != d {
                continue;
            }
            order.push((g.clone(), d));
            if order.len() > cap {
                return Err(Error::BallTooLarge { cap });
            }
            for (h, w) in neighbors(&g) {
                let nd = d + w;
                if nd > radius {
                    continue;
                }
                if best.get(&h).is_none_or(|&old| nd < old) {
                    best.insert(h.clone(), nd);
                    buckets[nd as usize].push_back(h);
                }
            }
        }
    }
    Ok(order)
}

#[derive(Clone, Debug)]
enum ClosedForm {
    Abelian(Vec<i64>),
    Lamp(LampGroup),
}

impl ClosedForm {
    fn dist(&self, g: &GroupElement, h: &GroupElement) -> i64 {
        match (self, g, h) {
            (ClosedForm::Abelian(w), GroupElement::Vector(a), GroupElement::Vector(b)) => {
                a.iter().zip(b).zip(w).map(|((x, y), w)| w * (x - y).abs()).sum()
            }
            (ClosedForm::Lamp(l), GroupElement::Lamp(a), GroupElement::Lamp(b)) => LampElement::distance(a, b, *l),
            _ => unreachable!("element kind matches metric"),
        }
    }
}

struct ClosedOracle {
    form: ClosedForm,
    elems: Arc<Vec<GroupElement>>,
}

impl DistanceOracle for ClosedOracle {
    fn dist(&self, i: usize, j: usize) -> Dist {
        Dist::int(self.form.dist(&self.elems[i], &self.elems[j]))
    }
}

/// Integer distance table, upper triangle only.
struct DenseIntOracle {
    n: usize,
    d: Vec<u32>,
}

impl DenseIntOracle {
    fn build(n: usize, f: impl Fn(usize, usize) -> i64 + Sync) -> Self {
        let rows: Vec<Vec<u32>> = (0..n).into_par_iter().map(|i| (i + 1..n).map(|j| f(i, j) as u32).collect()).collect();
        DenseIntOracle { n, d: rows.into_iter().flatten().collect() }
    }

    fn offset(&self, i: usize) -> usize {
        // start of row i in the packed upper triangle
        i * (2 * self.n - i - 1) / 2
    }
}

impl DistanceOracle for DenseIntOracle {
    fn dist(&self, i: usize, j: usize) -> Dist {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        Dist::int(self.d[self.offset(a) + (b - a - 1)] as i64)
    }
}

/// All elements of length `≤ radius` with `d(g, h) = ℓ(g⁻¹h)`.
pub fn ball(spec: &GroupSpec, radius: &Q) -> Result<FiniteMetricSpace> {
    ball_with_cap(spec, radius, DEFAULT_BALL_CAP)
}

pub fn ball_with_cap(spec: &GroupSpec, radius: &Q, cap: usize) -> Result<FiniteMetricSpace> {
    spec.validate()?;
    if *radius < Q::from_integer(0) {
        return Err(Error::BadParams(format!("negative radius {radius}")));
    }
    let r = radius.floor().to_integer();
    let origin = SpaceOrigin::Group { spec: spec.clone(), radius: *radius };
    let (elems, form): (Vec<GroupElement>, ClosedForm) = match spec {
        GroupSpec::FreeAbelian { .. } | GroupSpec::WeightedDirectSum { .. } => {
            let w = spec.weights()?;
            let n = w.len();
            let found = word_ball(vec![0i64; n], r, cap, |g| {
                let mut out = Vec::with_capacity(2 * n);
                for (i, &wi) in w.iter().enumerate() {
                    for s in [1, -1] {
                        let mut h = g.clone();
                        h[i] += s;
                        out.push((h, wi));
                    }
                }
                out
            })?;
            let mut v: Vec<Vec<i64>> = found.into_iter().map(|(g, _)| g).collect();
            v.sort();
            (v.into_iter().map(GroupElement::Vector).collect(), ClosedForm::Abelian(w))
        }
        GroupSpec::Lamplighter { lamp } => {
            let lamp = *lamp;
            let gens = lamp.generators();
            let found = word_ball(LampElement::identity(), r, cap, |g| {
                let mut out = vec![(g.move_cursor(1), 1), (g.move_cursor(-1), 1)];
                out.extend(gens.iter().map(|&v| (g.switch(v, lamp), 1)));
                out
            })?;
            let mut v: Vec<LampElement> = found.into_iter().map(|(g, _)| g).collect();
            v.sort();
            (v.into_iter().map(GroupElement::Lamp).collect(), ClosedForm::Lamp(lamp))
        }
        GroupSpec::Matrix(m) => return matrix_ball(m, r, cap, origin),
    };
    let ids = elems.iter().map(|e| e.to_string()).collect();
    let elems = Arc::new(elems);
    let oracle: Box<dyn DistanceOracle> = if elems.len() <= DENSE_LIMIT {
        let e = elems.clone();
        let f = form.clone();
        Box::new(DenseIntOracle::build(elems.len(), move |i, j| f.dist(&e[i], &e[j])))
    } else {
        Box::new(ClosedOracle { form, elems: elems.clone() })
    };
    FiniteMetricSpace::from_oracle(ids, oracle, Some(elems), origin, true)
}

/// A finite subset of `Z^k` with the weighted `ℓ¹` metric. Points are
/// deduplicated and sorted.
pub fn vector_space(mut points: Vec<Vec<i64>>, weights: Vec<i64>) -> Result<FiniteMetricSpace> {
    if points.iter().any(|p| p.len() != weights.len()) {
        return Err(Error::BadParams("point rank does not match the weights".into()));
    }
    if weights.iter().any(|&w| w <= 0) {
        return Err(Error::BadParams("generator weights must be positive".into()));
    }
    points.sort();
    points.dedup();
    let elems: Vec<GroupElement> = points.into_iter().map(GroupElement::Vector).collect();
    let ids = elems.iter().map(|e| e.to_string()).collect();
    let elems = Arc::new(elems);
    let form = ClosedForm::Abelian(weights);
    let oracle: Box<dyn DistanceOracle> = if elems.len() <= DENSE_LIMIT {
        let e = elems.clone();
        let f = form.clone();
        Box::new(DenseIntOracle::build(elems.len(), move |i, j| f.dist(&e[i], &e[j])))
    } else {
        Box::new(ClosedOracle { form, elems: elems.clone() })
    };
    FiniteMetricSpace::from_oracle(ids, oracle, Some(elems), SpaceOrigin::Explicit, true)
}

fn matrix_ball(spec: &MatrixGroupSpec, radius: i64, cap: usize, origin: SpaceOrigin) -> Result<FiniteMetricSpace> {
    let norm = &spec.length;
    let mut gens = Vec::new();
    for g in &spec.generators {
        let m = AnyMatrix::parse(spec.ring, g)?;
        let inv = m.inverse()?;
        gens.push(m);
        gens.push(inv);
    }
    let n = gens[0].dim();
    if gens.iter().any(|g| g.dim() != n) {
        return Err(Error::BadParams("generators have different sizes".into()));
    }
    // closure under the generators, expanding only elements within the radius
    let id = AnyMatrix::identity(spec.ring, n);
    let mut seen: HashSet<AnyMatrix> = HashSet::new();
    let mut elems = vec![id.clone()];
    seen.insert(id);
    let mut head = 0;
    while head < elems.len() {
        let g = elems[head].clone();
        head += 1;
        for s in &gens {
            let h = g.mul(s)?;
            if !seen.insert(h.clone()) {
                continue;
            }
            if h.length_exponent(norm)? <= radius {
                elems.push(h);
                if elems.len() > cap {
                    return Err(Error::BallTooLarge { cap });
                }
            }
        }
    }
    let invs: Vec<AnyMatrix> = elems.par_iter().map(|g| g.inverse()).collect::<Result<_>>()?;
    let table: Vec<Vec<i64>> = (0..elems.len())
        .into_par_iter()
        .map(|i| {
            (i + 1..elems.len())
                .map(|j| invs[i].mul(&elems[j]).and_then(|m| m.length_exponent(norm)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let oracle = DenseIntOracle {
        n: elems.len(),
        d: table.into_iter().flatten().map(|x| x as u32).collect(),
    };
    let ids = elems.iter().map(|e| e.to_string()).collect();
    let separated = (0..elems.len()).all(|i| (0..i).all(|j| oracle.dist(j, i) >= Dist::int(1)));
    let elems = Arc::new(elems.into_iter().map(GroupElement::Matrix).collect());
    FiniteMetricSpace::from_oracle(ids, Box::new(oracle), Some(elems), origin, separated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::q;

    #[test]
    fn ball_sizes() {
        assert_eq!(ball(&GroupSpec::zn(1), &q(3)).unwrap().len(), 7);
        assert_eq!(ball(&GroupSpec::zn(2), &q(2)).unwrap().len(), 13);
        assert_eq!(ball(&GroupSpec::lamplighter_z2(), &q(2)).unwrap().len(), 10);
        assert_eq!(ball(&GroupSpec::unipotent_f2(4), &q(4)).unwrap().len(), 32);
    }

    #[test]
    fn weighted_length_examples() {
        assert_eq!(weighted_abelian_length(&[0, 0, 0]), 0);
        assert_eq!(weighted_abelian_length(&[0, 0, 1]), 3);
        assert_eq!(weighted_abelian_length(&[2, 0, -1]), 5);
    }

    #[test]
    fn ball_cap_enforced() {
        let e = ball_with_cap(&GroupSpec::zn(3), &q(5), 50).unwrap_err();
        assert!(matches!(e, Error::BallTooLarge { cap: 50 }));
    }

    #[test]
    fn dense_and_closed_agree() {
        let s = ball(&GroupSpec::zn(2), &q(3)).unwrap();
        let e = s.elements().unwrap();
        for i in 0..s.len() {
            for j in 0..s.len() {
                let (a, b) = (e[i].as_vector().unwrap(), e[j].as_vector().unwrap());
                let d = (a[0] - b[0]).abs() + (a[1] - b[1]).abs();
                assert_eq!(s.dist(i, j), Dist::int(d));
            }
        }
    }

    #[test]
    fn spec_json_forms() {
        let s: GroupSpec = serde_json::from_str(r#"{"type":"free_abelian","n":2,"weights":[1,1]}"#).unwrap();
        assert_eq!(s, GroupSpec::FreeAbelian { n: 2, weights: Some(vec![1, 1]) });
        let s: GroupSpec = serde_json::from_str(r#"{"type":"lamplighter","lamp":"z2"}"#).unwrap();
        assert_eq!(s, GroupSpec::lamplighter_z2());
        let s: GroupSpec = serde_json::from_str(r#"{"type":"weighted_direct_sum","cutoff":8}"#).unwrap();
        assert_eq!(s, GroupSpec::WeightedDirectSum { cutoff: 8 });
        let u = GroupSpec::unipotent_f2(2);
        let back: GroupSpec = serde_json::from_str(&serde_json::to_string(&u).unwrap()).unwrap();
        assert_eq!(back, u);
    }
}
