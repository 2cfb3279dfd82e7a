use std::sync::Arc;

use rayon::prelude::*;

use super::{Dist, FiniteMetricSpace, MetricFamily, Q};
use crate::error::{Error, Result};

/// A nondecreasing step function on `[0, ∞)` given by breakpoints
/// `(x_i, y_i)`. Evaluation is right-continuous: `f(t) = y_k` for the
/// largest `x_k <= t`; values below the first breakpoint are `y_0` and
/// the last value extends to infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepFunction {
    breaks: Vec<(Q, Q)>,
}

impl StepFunction {
    pub fn new(breaks: Vec<(Q, Q)>) -> Result<Self> {
        if breaks.is_empty() {
            return Err(Error::BadParams("step function needs at least one breakpoint".into()));
        }
        for w in breaks.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::BadParams("breakpoints must be strictly increasing".into()));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::BadParams("step function must be nondecreasing".into()));
            }
        }
        Ok(StepFunction { breaks })
    }

    /// Samples `f` at the given abscissae (sorted and deduplicated here).
    pub fn sample(mut xs: Vec<Q>, f: impl Fn(&Q) -> Q) -> Result<Self> {
        xs.sort();
        xs.dedup();
        Self::new(xs.into_iter().map(|x| (x, f(&x))).collect())
    }

    /// `t ↦ slope·t` sampled at the integers `0..=upto`.
    pub fn linear(slope: Q, upto: i64) -> Self {
        Self::sample((0..=upto).map(Q::from_integer).collect(), |x| slope * x).expect("linear is monotone")
    }

    pub fn breakpoints(&self) -> &[(Q, Q)] {
        &self.breaks
    }

    pub fn eval(&self, t: &Q) -> Q {
        let k = self.breaks.partition_point(|(x, _)| x <= t);
        self.breaks[k.saturating_sub(1)].1
    }

    pub fn eval_dist(&self, t: Dist) -> Dist {
        match t {
            Dist::Finite(x) => Dist::Finite(self.eval(&x)),
            Dist::Infinite => Dist::Infinite,
        }
    }

    /// `self ∘ inner`, again a step function with the breakpoints of `inner`.
    pub fn compose(&self, inner: &StepFunction) -> StepFunction {
        StepFunction { breaks: inner.breaks.iter().map(|(x, y)| (*x, self.eval(y))).collect() }
    }
}

/// A map from each member of a family into a target space, with
/// expansion modulus `rho` and properness modulus `delta`.
#[derive(Clone, Debug)]
pub struct CoarseMapWitness {
    pub domain: MetricFamily,
    pub target: Arc<FiniteMetricSpace>,
    /// `images[m][k]` is the image of the `k`-th point of member `m`.
    pub images: Vec<Vec<usize>>,
    pub rho: StepFunction,
    pub delta: StepFunction,
}

impl CoarseMapWitness {
    pub fn new(
        domain: MetricFamily,
        target: Arc<FiniteMetricSpace>,
        images: Vec<Vec<usize>>,
        rho: StepFunction,
        delta: StepFunction,
    ) -> Result<Self> {
        if images.len() != domain.len()
            || images.iter().zip(&domain.members).any(|(im, m)| im.len() != m.points.len())
        {
            return Err(Error::BadParams("map is not total on every member".into()));
        }
        if images.iter().flatten().any(|&y| y >= target.len()) {
            return Err(Error::BadParams("image outside target space".into()));
        }
        Ok(CoarseMapWitness { domain, target, images, rho, delta })
    }

    /// `other ∘ self`, with composed moduli.
    pub fn then(&self, other: &CoarseMapWitness) -> Result<CoarseMapWitness> {
        if other.domain.len() != 1 || other.domain.members[0].ambient.uid() != self.target.uid() {
            return Err(Error::AmbientMismatch);
        }
        let outer = &other.domain.members[0];
        let mut lookup = vec![usize::MAX; self.target.len()];
        for (k, &p) in outer.points.iter().enumerate() {
            lookup[p] = other.images[0][k];
        }
        let images = self
            .images
            .iter()
            .map(|im| {
                im.iter()
                    .map(|&y| match lookup[y] {
                        usize::MAX => Err(Error::BadParams("composition leaves the outer domain".into())),
                        z => Ok(z),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        CoarseMapWitness::new(
            self.domain.clone(),
            other.target.clone(),
            images,
            other.rho.compose(&self.rho),
            other.delta.compose(&self.delta),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    Expansion,
    Properness,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoarseViolation {
    pub kind: ViolationKind,
    pub member: usize,
    pub points: (usize, usize),
    pub domain_dist: Dist,
    pub image_dist: Dist,
}

#[derive(Clone, Debug, Default)]
pub struct CoarseMapReport {
    pub expansive: bool,
    pub proper: bool,
    pub violations: Vec<CoarseViolation>,
}

/// Checks both moduli on every pair of every member.
pub fn check_coarse_map(w: &CoarseMapWitness) -> CoarseMapReport {
    let mut violations: Vec<CoarseViolation> = w
        .domain
        .members
        .par_iter()
        .enumerate()
        .flat_map_iter(|(m, member)| {
            let pts = member.points.as_slice();
            let im = &w.images[m];
            let mut out = Vec::new();
            for a in 0..pts.len() {
                for b in a + 1..pts.len() {
                    let d = member.ambient.dist(pts[a], pts[b]);
                    let e = w.target.dist(im[a], im[b]);
                    if e > w.rho.eval_dist(d) {
                        out.push(CoarseViolation {
                            kind: ViolationKind::Expansion,
                            member: m,
                            points: (pts[a], pts[b]),
                            domain_dist: d,
                            image_dist: e,
                        });
                    }
                    if w.delta.eval_dist(d) > e {
                        out.push(CoarseViolation {
                            kind: ViolationKind::Properness,
                            member: m,
                            points: (pts[a], pts[b]),
                            domain_dist: d,
                            image_dist: e,
                        });
                    }
                }
            }
            out
        })
        .collect();
    violations.sort_by_key(|v| (v.member, v.points, v.kind == ViolationKind::Properness));
    CoarseMapReport {
        expansive: !violations.iter().any(|v| v.kind == ViolationKind::Expansion),
        proper: !violations.iter().any(|v| v.kind == ViolationKind::Properness),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{q, Member};

    fn line(lo: i64, hi: i64) -> Arc<FiniteMetricSpace> {
        Arc::new(FiniteMetricSpace::integer_interval(lo, hi))
    }

    fn scaling(k: i64, rho: Q, delta: Q) -> CoarseMapWitness {
        let dom = line(0, 8);
        let tgt = line(0, 8 * k);
        let images = vec![(0..9).map(|x| (k * x) as usize).collect()];
        CoarseMapWitness::new(
            MetricFamily::new(vec![Member::whole(dom)]),
            tgt,
            images,
            StepFunction::linear(rho, 8),
            StepFunction::linear(delta, 8),
        )
        .unwrap()
    }

    #[test]
    fn step_lookup_is_right_continuous() {
        let f = StepFunction::new(vec![(q(0), q(0)), (q(2), q(5)), (q(3), q(7))]).unwrap();
        assert_eq!(f.eval(&Q::new(19, 10)), q(0));
        assert_eq!(f.eval(&q(2)), q(5));
        assert_eq!(f.eval(&q(100)), q(7));
        assert!(StepFunction::new(vec![(q(0), q(2)), (q(1), q(1))]).is_err());
    }

    #[test]
    fn identity_doubling_examples() {
        let r = check_coarse_map(&scaling(1, q(1), q(1)));
        assert!(r.expansive && r.proper);
        let r = check_coarse_map(&scaling(2, q(1), q(1)));
        assert!(!r.expansive && r.proper);
        assert_eq!(r.violations[0].points, (0, 1));
        let r = check_coarse_map(&scaling(2, q(2), q(1)));
        assert!(r.expansive && r.proper);
    }
}
