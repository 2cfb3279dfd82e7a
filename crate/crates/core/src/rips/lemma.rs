use std::str::FromStr;
use std::sync::Arc;

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::complex::{build_relative_rips, build_rips, build_scaled_rips, MetricSimplicialComplex};
use super::constants::{derive_dimension_constants, DimensionConstants};
use super::fixed::{self, ONE};
use super::geodesic::{
    geodesic_lower_sets, geodesic_upper_from, geodesic_upper_sets, geodesic_upper_to_set, NodeKey, DEFAULT_LEVEL,
};
use crate::error::{Error, Result};
use crate::metric::{fmt_q, Dist, FiniteMetricSpace, PointSet, Q};
use crate::property_a::big;

/// Offenders kept per report.
pub const MAX_OFFENDERS: usize = 100;
/// Largest complex dimension handled by the scaled checks.
pub const SCALED_DIM_CAP: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma {
    Comparison,
    Neighborhood,
    Separation,
    ScaledComparison,
    ConeRetraction,
}

impl Lemma {
    pub const ALL: [Lemma; 5] =
        [Lemma::Comparison, Lemma::Neighborhood, Lemma::Separation, Lemma::ScaledComparison, Lemma::ConeRetraction];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::Comparison => "comparison",
            Lemma::Neighborhood => "neighborhood",
            Lemma::Separation => "separation",
            Lemma::ScaledComparison => "scaled_comparison",
            Lemma::ConeRetraction => "cone_retraction",
        }
    }
}

impl FromStr for Lemma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Lemma::ALL
            .into_iter()
            .find(|l| l.name() == s.replace('-', "_"))
            .ok_or_else(|| Error::BadParams(format!("unknown lemma {s}")))
    }
}

#[derive(Clone, Debug)]
pub struct LemmaParams {
    pub a: Q,
    pub b: Option<Q>,
    pub eps: Option<Q>,
    pub m: Option<u32>,
    /// `C` for the neighborhood and scaled checks, `W` for the retraction,
    /// the separated family for the separation check.
    pub sets: Vec<PointSet>,
    pub level: u32,
    /// Source nodes sampled by the retraction check.
    pub samples: usize,
    pub seed: u64,
}

impl LemmaParams {
    pub fn new(a: Q) -> Self {
        LemmaParams { a, b: None, eps: None, m: None, sets: vec![], level: DEFAULT_LEVEL, samples: 24, seed: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LemmaStatus {
    Pass,
    Inconclusive,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct Offender {
    pub points: (String, String),
    pub detail: String,
    /// The estimator bounds prove the inequality false.
    pub certified: bool,
}

#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub lemma: Lemma,
    pub status: LemmaStatus,
    pub dimension: usize,
    pub constants: DimensionConstants,
    pub checked: usize,
    pub worst_ratio: Option<f64>,
    pub offenders: Vec<Offender>,
}

impl LemmaReport {
    fn new(lemma: Lemma, dimension: usize, constants: DimensionConstants) -> Self {
        LemmaReport {
            lemma,
            status: LemmaStatus::Pass,
            dimension,
            constants,
            checked: 0,
            worst_ratio: None,
            offenders: vec![],
        }
    }

    fn ratio(&mut self, r: f64) {
        self.worst_ratio = Some(self.worst_ratio.map_or(r, |w| w.max(r)));
    }

    fn offend(&mut self, space: &FiniteMetricSpace, x: usize, y: usize, detail: String, certified: bool) {
        let s = if certified { LemmaStatus::Fail } else { LemmaStatus::Inconclusive };
        self.status = self.status.max(s);
        if self.offenders.len() < MAX_OFFENDERS {
            self.offenders.push(Offender { points: (space.id(x).into(), space.id(y).into()), detail, certified });
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "lemma": self.lemma,
            "status": self.status,
            "dimension": self.dimension,
            "constants": self.constants.to_json(),
            "checked": self.checked,
            "worst_ratio": self.worst_ratio,
            "offenders": self.offenders,
        })
    }
}

fn need<T: Copy>(x: Option<T>, what: &str) -> Result<T> {
    x.ok_or_else(|| Error::BadParams(format!("missing parameter {what}")))
}

fn need_set<'a>(p: &'a LemmaParams, what: &str) -> Result<&'a PointSet> {
    p.sets.first().ok_or_else(|| Error::BadParams(format!("missing vertex set {what}")))
}

fn finite(d: Dist) -> Option<BigRational> {
    d.finite().map(|q| big(&q))
}

fn ratio(num: Q, den: &BigRational) -> f64 {
    let n = *num.numer() as f64 / *num.denom() as f64;
    let d = num_traits::ToPrimitive::to_f64(den).unwrap_or(f64::INFINITY);
    if d == 0.0 {
        if n == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        n / d
    }
}

/// Checks one lemma on one space. `dimension` overrides the complex
/// dimension used to pick constants, so a family can share them.
fn check(space: &Arc<FiniteMetricSpace>, lemma: Lemma, p: &LemmaParams, dimension: Option<usize>) -> Result<LemmaReport> {
    let a = p.a;
    if a < Q::from_integer(1) {
        return Err(Error::BadParams(format!("need a >= 1, got {}", fmt_q(&a))));
    }
    let base = build_rips(space.clone(), &a)?;
    let n = dimension.unwrap_or_else(|| base.dimension());
    let consts = derive_dimension_constants(n)?;
    let mut rep = LemmaReport::new(lemma, n, consts.clone());
    let (ab, aeb) = (big(&(a * consts.alpha)), big(&(a * consts.beta)));
    match lemma {
        Lemma::Comparison => {
            for x in 0..space.len() {
                let up = geodesic_upper_from(&base, x, p.level)?;
                for y in x + 1..space.len() {
                    let (Dist::Finite(dg), Some(u)) = (space.dist(x, y), finite(up[y])) else { continue };
                    rep.checked += 1;
                    rep.ratio(ratio(dg, &(big(&a) * &u)));
                    if big(&dg) > &ab * &u {
                        let detail = format!("d = {} exceeds {} times the upper estimate {}", fmt_q(&dg), fmt_q(&(a * consts.alpha)), up[y]);
                        rep.offend(space, x, y, detail, true);
                    }
                }
            }
        }
        Lemma::Neighborhood => {
            let c = need_set(p, "C")?;
            let eps = need(p.eps, "eps")?;
            let k = match p.b {
                Some(b) => build_relative_rips(space.clone(), c, &a, &b)?,
                None => base,
            };
            let up = geodesic_upper_to_set(&k, c, p.level)?;
            let limit = &aeb * big(&eps);
            for x in (0..space.len()).filter(|&x| !c.contains(x)) {
                if !up[x].le_q(&eps) {
                    continue;
                }
                rep.checked += 1;
                let (dg, y) = nearest(space, x, c);
                if let Dist::Finite(v) = dg {
                    rep.ratio(ratio(v, &(big(&a) * big(&eps))));
                }
                if finite(dg).is_none_or(|v| v > limit) {
                    rep.offend(space, x, y, format!("within {} of the subcomplex but d(x, C) = {dg}", fmt_q(&eps)), true);
                }
            }
        }
        Lemma::Separation => {
            let eps = need(p.eps, "eps")?;
            if p.sets.len() < 2 {
                return Err(Error::BadParams("separation needs at least two sets".into()));
            }
            let threshold = big(&eps) / &aeb;
            for i in 0..p.sets.len() {
                for j in i + 1..p.sets.len() {
                    let Some((d, x, y)) = space.set_distance(&p.sets[i], &p.sets[j]) else {
                        return Err(Error::BadParams("empty set in the family".into()));
                    };
                    if !(Dist::Finite(eps) <= d) {
                        return Err(Error::BadParams(format!("sets {i} and {j} are closer than eps")));
                    }
                    rep.checked += 1;
                    let lo = geodesic_lower_sets(&base, &p.sets[i], &p.sets[j])?;
                    let Some(lo) = finite(lo) else { continue };
                    if lo >= threshold {
                        continue;
                    }
                    let hi = finite(geodesic_upper_sets(&base, &p.sets[i], &p.sets[j], p.level)?);
                    let certified = hi.is_some_and(|h| h < threshold);
                    let detail = format!("lower estimate for sets {i} and {j} is below eps / (a beta)");
                    rep.offend(space, x, y, detail, certified);
                }
            }
        }
        Lemma::ScaledComparison => {
            let c = need_set(p, "C")?;
            let k = scaled(space, c, p)?;
            let up = geodesic_upper_to_set(&k, c, p.level)?;
            for x in 0..space.len() {
                let Some(u) = finite(up[x]) else { continue };
                let (dg, y) = nearest(space, x, c);
                let Dist::Finite(v) = dg else { continue };
                rep.checked += 1;
                rep.ratio(ratio(v, &(big(&a) * &u)));
                if big(&v) > &aeb * &u {
                    rep.offend(space, x, y, format!("d(x, C) = {} against upper estimate {}", fmt_q(&v), up[x]), true);
                }
            }
        }
        Lemma::ConeRetraction => retraction(space, p, &mut rep)?,
    }
    Ok(rep)
}

fn nearest(space: &FiniteMetricSpace, x: usize, c: &PointSet) -> (Dist, usize) {
    c.iter().map(|&y| (space.dist(x, y), y)).min().unwrap_or((Dist::Infinite, x))
}

fn scaled(space: &Arc<FiniteMetricSpace>, w: &PointSet, p: &LemmaParams) -> Result<MetricSimplicialComplex> {
    let b = need(p.b, "b")?;
    let m = need(p.m, "m")?;
    let k = build_scaled_rips(space.clone(), w, &p.a, &b, m)?;
    if k.dimension() > SCALED_DIM_CAP {
        return Err(Error::UnsupportedDimension(k.dimension()));
    }
    Ok(k)
}

/// Samples node pairs near `P_b(W)` and compares distances before and after
/// pushing collar points of scaled simplices onto their boundary.
fn retraction(space: &Arc<FiniteMetricSpace>, p: &LemmaParams, rep: &mut LemmaReport) -> Result<()> {
    let w = need_set(p, "W")?;
    let eps = need(p.eps, "eps")?;
    let k = scaled(space, w, p)?;
    let m = Q::from_integer(i64::from(k.cone_factor()));
    let g = k.subdivision(p.level)?;
    let near = g.distances(&g.nodes_within(w));
    let cap = (big(&eps) * BigRational::from_integer(ONE.into())).floor().to_integer();
    let cap = u64::try_from(cap).unwrap_or(u64::MAX - 1);
    let v: Vec<usize> = (0..g.node_count()).filter(|&i| near[i] <= cap).collect();
    let collapse = |i: usize| -> usize {
        match g.key(i) {
            NodeKey::Level { t, base, .. } if (Q::from_integer(1) - Q::new(i64::from(t.0), i64::from(t.1))) * m <= eps => {
                g.node_of(base).expect("base nodes are interned")
            }
            _ => i,
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let sources: Vec<usize> = v.choose_multiple(&mut rng, p.samples.min(v.len())).copied().collect();
    let vertex = |i: usize| match g.key(i) {
        NodeKey::Bary(c) => c[0].0,
        NodeKey::Apex(s) | NodeKey::Level { simplex: s, .. } => s[0],
    };
    for x in sources {
        let before = g.distances(&[x]);
        let after = g.distances(&[collapse(x)]);
        for &y in &v {
            if y == x || before[y] == 0 || before[y] == fixed::INF {
                continue;
            }
            rep.checked += 1;
            let r = after[collapse(y)] as f64 / before[y] as f64;
            rep.ratio(r);
            if r > 2.0 {
                rep.offend(space, vertex(x), vertex(y), format!("collapse stretches a pair by {r:.4}"), false);
            }
        }
    }
    Ok(())
}

/// Checks `lemma` on a single space with constants for its own dimension.
pub fn verify_lemma(space: &Arc<FiniteMetricSpace>, lemma: Lemma, params: &LemmaParams) -> Result<LemmaReport> {
    check(space, lemma, params, None)
}

/// Checks `lemma` on every member with the constants of the largest member
/// dimension, merging the reports.
pub fn verify_lemma_family(spaces: &[Arc<FiniteMetricSpace>], lemma: Lemma, params: &LemmaParams) -> Result<LemmaReport> {
    let mut n = 0;
    for s in spaces {
        n = n.max(build_rips(s.clone(), &params.a)?.dimension());
    }
    let mut out = LemmaReport::new(lemma, n, derive_dimension_constants(n)?);
    for s in spaces {
        let r = check(s, lemma, params, Some(n))?;
        out.status = out.status.max(r.status);
        out.checked += r.checked;
        if let Some(w) = r.worst_ratio {
            out.ratio(w);
        }
        out.offenders.extend(r.offenders);
        out.offenders.truncate(MAX_OFFENDERS);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::q;

    fn path(n: i64) -> Arc<FiniteMetricSpace> {
        Arc::new(FiniteMetricSpace::integer_interval(0, n - 1))
    }

    #[test]
    fn comparison_on_a_path() {
        let r = verify_lemma(&path(8), Lemma::Comparison, &LemmaParams::new(q(1))).unwrap();
        assert_eq!(r.status, LemmaStatus::Pass);
        assert_eq!(r.checked, 28);
        assert_eq!(r.worst_ratio, Some(1.0));
    }

    #[test]
    fn neighborhood_and_separation() {
        let mut p = LemmaParams::new(q(1));
        p.eps = Some(q(1));
        p.sets = vec![(0..4).collect()];
        let r = verify_lemma(&path(12), Lemma::Neighborhood, &p).unwrap();
        assert_eq!((r.status, r.checked), (LemmaStatus::Pass, 1));

        p.eps = Some(q(5));
        p.sets = vec![(0..3).collect(), (8..12).collect()];
        let r = verify_lemma(&path(12), Lemma::Separation, &p).unwrap();
        assert_eq!(r.status, LemmaStatus::Pass);
        p.sets = vec![(0..3).collect(), (4..12).collect()];
        assert!(verify_lemma(&path(12), Lemma::Separation, &p).is_err());
    }

    #[test]
    fn scaled_checks() {
        let mut p = LemmaParams::new(q(1));
        p.b = Some(q(2));
        p.m = Some(4);
        p.eps = Some(q(1));
        p.sets = vec![(0..5).collect()];
        let r = verify_lemma(&path(11), Lemma::ScaledComparison, &p).unwrap();
        assert_eq!(r.status, LemmaStatus::Pass);
        let r = verify_lemma(&path(11), Lemma::ConeRetraction, &p).unwrap();
        assert_ne!(r.status, LemmaStatus::Fail);
        p.b = Some(q(3));
        assert!(matches!(verify_lemma(&path(11), Lemma::ScaledComparison, &p), Err(Error::UnsupportedDimension(3))));
    }

    #[test]
    fn names_round_trip() {
        for l in Lemma::ALL {
            assert_eq!(l.name().parse::<Lemma>().unwrap(), l);
        }
    }
}
