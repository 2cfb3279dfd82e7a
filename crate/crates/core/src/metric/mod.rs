//! Finite metric spaces, subsets, metric families and the elementary
//! large-scale operations on them (disjointness, diameters, neighborhoods).

mod coarse;
mod dist;
pub mod io;

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use coarse::{check_coarse_map, CoarseMapReport, CoarseMapWitness, CoarseViolation, StepFunction, ViolationKind};
pub use dist::{ceil_q, fmt_q, parse_q, q, Dist, Q};

use crate::error::{Error, Result};
use crate::groups::{GroupElement, GroupSpec};

static NEXT_UID: AtomicU64 = AtomicU64::new(1);

/// Spaces above this size only get a sampled triangle-inequality check.
pub const FULL_TRIANGLE_CHECK_LIMIT: usize = 300;
pub const DEFAULT_TRIANGLE_SAMPLES: usize = 10_000;

/// Anything that can answer distance queries between point indices.
pub trait DistanceOracle: Send + Sync {
    fn dist(&self, i: usize, j: usize) -> Dist;
}

struct DenseMetric {
    n: usize,
    d: Vec<Dist>,
}

impl DistanceOracle for DenseMetric {
    fn dist(&self, i: usize, j: usize) -> Dist {
        self.d[i * self.n + j]
    }
}

/// Where a space came from; used to serialize it back.
#[derive(Clone, Debug)]
pub enum SpaceOrigin {
    Explicit,
    Group { spec: GroupSpec, radius: Q },
}

pub struct FiniteMetricSpace {
    uid: u64,
    ids: Vec<String>,
    index: HashMap<String, usize>,
    oracle: Box<dyn DistanceOracle>,
    elements: Option<Arc<Vec<GroupElement>>>,
    origin: SpaceOrigin,
    separated: bool,
}

impl fmt::Debug for FiniteMetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteMetricSpace")
            .field("uid", &self.uid)
            .field("points", &self.ids.len())
            .field("origin", &self.origin)
            .finish()
    }
}

impl FiniteMetricSpace {
    /// Builds a space from a full distance matrix, verifying the metric
    /// axioms. The triangle inequality is checked on all triples up to
    /// [`FULL_TRIANGLE_CHECK_LIMIT`] points and on `samples` random triples
    /// beyond that.
    pub fn from_matrix(ids: Vec<String>, d: Vec<Vec<Dist>>) -> Result<Self> {
        Self::from_matrix_with(ids, d, DEFAULT_TRIANGLE_SAMPLES, 0)
    }

    pub fn from_matrix_with(
        ids: Vec<String>,
        d: Vec<Vec<Dist>>,
        samples: usize,
        seed: u64,
    ) -> Result<Self> {
        let n = ids.len();
        if d.len() != n || d.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidMetric("matrix shape does not match point count".into()));
        }
        for i in 0..n {
            if d[i][i] != Dist::ZERO {
                return Err(Error::InvalidMetric(format!("d({0},{0}) != 0", ids[i])));
            }
            for j in 0..i {
                if d[i][j] != d[j][i] {
                    return Err(Error::InvalidMetric(format!("asymmetric at ({},{})", ids[i], ids[j])));
                }
                if d[i][j] == Dist::ZERO {
                    return Err(Error::InvalidMetric(format!(
                        "distinct points {} and {} at distance 0",
                        ids[i], ids[j]
                    )));
                }
            }
        }
        let flat: Vec<Dist> = d.into_iter().flatten().collect();
        let oracle = DenseMetric { n, d: flat };
        let separated = (0..n).all(|i| (0..i).all(|j| oracle.dist(i, j) >= Dist::int(1)));
        let space = Self::from_oracle(ids, Box::new(oracle), None, SpaceOrigin::Explicit, separated)?;
        if n <= FULL_TRIANGLE_CHECK_LIMIT {
            space.check_triangle_exhaustive()?;
        } else {
            space.check_triangle_sampled(samples, seed)?;
        }
        Ok(space)
    }

    pub(crate) fn from_oracle(
        ids: Vec<String>,
        oracle: Box<dyn DistanceOracle>,
        elements: Option<Arc<Vec<GroupElement>>>,
        origin: SpaceOrigin,
        separated: bool,
    ) -> Result<Self> {
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::InvalidMetric(format!("duplicate point id {id}")));
            }
        }
        Ok(FiniteMetricSpace {
            uid: NEXT_UID.fetch_add(1, Ordering::Relaxed),
            ids,
            index,
            oracle,
            elements,
            origin,
            separated,
        })
    }

    /// The integer points `lo..=hi` of the real line.
    pub fn integer_interval(lo: i64, hi: i64) -> Self {
        let ids: Vec<String> = (lo..=hi).map(|x| x.to_string()).collect();
        let n = ids.len();
        let d = (0..n)
            .map(|i| (0..n).map(|j| Dist::int((i as i64 - j as i64).abs())).collect())
            .collect();
        Self::from_matrix(ids, d).expect("integer interval is a metric")
    }

    pub fn uid(&self) -> u64 {
        self.uid
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn dist(&self, i: usize, j: usize) -> Dist {
        if i == j {
            Dist::ZERO
        } else {
            self.oracle.dist(i, j)
        }
    }

    pub fn elements(&self) -> Option<&[GroupElement]> {
        self.elements.as_deref().map(|v| v.as_slice())
    }

    pub fn origin(&self) -> &SpaceOrigin {
        &self.origin
    }

    /// True when distinct points are at distance at least one.
    pub fn is_separated(&self) -> bool {
        self.separated
    }

    pub fn all_points(&self) -> PointSet {
        PointSet((0..self.len()).collect())
    }

    pub fn check_triangle_exhaustive(&self) -> Result<()> {
        let n = self.len();
        let bad = (0..n).into_par_iter().find_map_any(|i| {
            for j in 0..n {
                for k in 0..n {
                    if self.dist(i, k) > self.dist(i, j).add(self.dist(j, k)) {
                        return Some((i, j, k));
                    }
                }
            }
            None
        });
        match bad {
            Some((i, j, k)) => Err(self.triangle_error(i, j, k)),
            None => Ok(()),
        }
    }

    pub fn check_triangle_sampled(&self, samples: usize, seed: u64) -> Result<()> {
        let n = self.len();
        if n == 0 {
            return Ok(());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let (i, j, k) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            if self.dist(i, k) > self.dist(i, j).add(self.dist(j, k)) {
                return Err(self.triangle_error(i, j, k));
            }
        }
        Ok(())
    }

    fn triangle_error(&self, i: usize, j: usize, k: usize) -> Error {
        Error::InvalidMetric(format!(
            "triangle inequality fails for ({}, {}, {})",
            self.ids[i], self.ids[j], self.ids[k]
        ))
    }

    /// Exact diameter of the whole space.
    pub fn diameter(&self) -> Result<Q> {
        self.diameter_of(&self.all_points())
    }

    pub fn diameter_of(&self, set: &PointSet) -> Result<Q> {
        let pts = set.as_slice();
        let max = pts
            .par_iter()
            .enumerate()
            .map(|(a, &i)| pts[a + 1..].iter().map(|&j| self.dist(i, j)).max().unwrap_or(Dist::ZERO))
            .max()
            .unwrap_or(Dist::ZERO);
        max.finite().ok_or(Error::InfiniteDiameter)
    }

    /// Distance from point `y` to the set `x` (infinite for the empty set).
    pub fn dist_to_set(&self, y: usize, x: &PointSet) -> Dist {
        x.iter().map(|&p| self.dist(y, p)).min().unwrap_or(Dist::Infinite)
    }

    /// Minimal distance between two sets together with a witnessing pair.
    pub fn set_distance(&self, a: &PointSet, b: &PointSet) -> Option<(Dist, usize, usize)> {
        a.iter()
            .flat_map(|&x| b.iter().map(move |&y| (x, y)))
            .map(|(x, y)| (self.dist(x, y), x, y))
            .min()
    }
}

/// A sorted, duplicate-free set of point indices of some ambient space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PointSet(Vec<usize>);

impl PointSet {
    pub fn new(mut pts: Vec<usize>) -> Self {
        pts.sort_unstable();
        pts.dedup();
        PointSet(pts)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: usize) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.0.iter().all(|&p| other.contains(p))
    }

    pub fn intersect(&self, other: &PointSet) -> PointSet {
        PointSet(self.0.iter().copied().filter(|&p| other.contains(p)).collect())
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        PointSet::new(self.0.iter().chain(other.0.iter()).copied().collect())
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        PointSet::new(iter.into_iter().collect())
    }
}

/// One member of a metric family: a subset of a declared ambient space.
#[derive(Clone, Debug)]
pub struct Member {
    pub ambient: Arc<FiniteMetricSpace>,
    pub points: PointSet,
}

impl Member {
    pub fn new(ambient: Arc<FiniteMetricSpace>, points: PointSet) -> Result<Self> {
        if let Some(&bad) = points.iter().find(|&&p| p >= ambient.len()) {
            return Err(Error::InvalidMetric(format!("point index {bad} outside ambient space")));
        }
        Ok(Member { ambient, points })
    }

    pub fn whole(ambient: Arc<FiniteMetricSpace>) -> Self {
        let points = ambient.all_points();
        Member { ambient, points }
    }

    pub fn diameter(&self) -> Result<Q> {
        self.ambient.diameter_of(&self.points)
    }
}

/// An ordered collection of subspaces, each tagged with its ambient space.
#[derive(Clone, Debug, Default)]
pub struct MetricFamily {
    pub members: Vec<Member>,
}

impl MetricFamily {
    pub fn new(members: Vec<Member>) -> Self {
        MetricFamily { members }
    }

    pub fn single(ambient: Arc<FiniteMetricSpace>) -> Self {
        MetricFamily { members: vec![Member::whole(ambient)] }
    }

    pub fn from_sets(ambient: &Arc<FiniteMetricSpace>, sets: Vec<PointSet>) -> Result<Self> {
        sets.into_iter()
            .map(|s| Member::new(ambient.clone(), s))
            .collect::<Result<Vec<_>>>()
            .map(MetricFamily::new)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The one ambient space shared by all members.
    pub fn common_ambient(&self) -> Result<Option<&Arc<FiniteMetricSpace>>> {
        let mut it = self.members.iter();
        let Some(first) = it.next() else { return Ok(None) };
        if it.any(|m| m.ambient.uid() != first.ambient.uid()) {
            return Err(Error::AmbientMismatch);
        }
        Ok(Some(&first.ambient))
    }

    /// Largest member diameter (zero for the empty family).
    pub fn max_diameter(&self) -> Result<Q> {
        self.members.iter().try_fold(q(0), |acc, m| Ok(acc.max(m.diameter()?)))
    }
}

/// A pair of members closer than the requested separation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisjointnessViolation {
    pub members: (usize, usize),
    pub points: (usize, usize),
    pub distance: Dist,
}

/// First pair of distinct members at distance `< r`, if any.
pub fn disjointness_violation(family: &MetricFamily, r: &Q) -> Result<Option<DisjointnessViolation>> {
    let Some(ambient) = family.common_ambient()? else { return Ok(None) };
    let bound = Dist::Finite(*r);
    let m = &family.members;
    let pairs: Vec<(usize, usize)> =
        (0..m.len()).flat_map(|a| (a + 1..m.len()).map(move |b| (a, b))).collect();
    let found = pairs.par_iter().find_first(|&&(a, b)| {
        m[a].points.iter().any(|&x| m[b].points.iter().any(|&y| ambient.dist(x, y) < bound))
    });
    Ok(found.map(|&(a, b)| {
        let (distance, x, y) = ambient
            .set_distance(&m[a].points, &m[b].points)
            .expect("violating members are nonempty");
        DisjointnessViolation { members: (a, b), points: (x, y), distance }
    }))
}

/// True iff every pair of distinct members is at distance `>= r`.
pub fn is_r_disjoint(family: &MetricFamily, r: &Q) -> Result<bool> {
    Ok(disjointness_violation(family, r)?.is_none())
}

pub fn diameter(space: &FiniteMetricSpace) -> Result<Q> {
    space.diameter()
}

/// True iff every member has diameter at most `bound`.
pub fn is_bounded(family: &MetricFamily, bound: &Q) -> Result<bool> {
    for m in &family.members {
        if m.diameter()? > *bound {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `N_t(X)`: the points of the ambient space within distance `t` of `x`.
pub fn neighborhood(ambient: &FiniteMetricSpace, x: &PointSet, t: &Q) -> PointSet {
    let bound = Dist::Finite(*t);
    PointSet(
        (0..ambient.len())
            .into_par_iter()
            .filter(|&y| x.contains(y) || ambient.dist_to_set(y, x) <= bound)
            .collect(),
    )
}

/// Pieces `N_t(C_i) ∩ N_t(D_j) ∩ Z` together with their union.
#[derive(Clone, Debug)]
pub struct EnlargedIntersection {
    pub union: PointSet,
    /// `(i, j, piece)` for every nonempty piece, ordered by `(i, j)`.
    pub pieces: Vec<(usize, usize, PointSet)>,
}

impl EnlargedIntersection {
    pub fn family(&self, ambient: &Arc<FiniteMetricSpace>) -> MetricFamily {
        MetricFamily::new(
            self.pieces
                .iter()
                .map(|(_, _, p)| Member { ambient: ambient.clone(), points: p.clone() })
                .collect(),
        )
    }
}

pub fn enlarged_intersection(
    ambient: &FiniteMetricSpace,
    c: &[PointSet],
    d: &[PointSet],
    z: &PointSet,
    t: &Q,
) -> EnlargedIntersection {
    let nc: Vec<PointSet> = c.iter().map(|s| neighborhood(ambient, s, t)).collect();
    let nd: Vec<PointSet> = d.iter().map(|s| neighborhood(ambient, s, t)).collect();
    let mut pieces = Vec::new();
    let mut union = PointSet::default();
    for (i, a) in nc.iter().enumerate() {
        for (j, b) in nd.iter().enumerate() {
            let w = a.intersect(b).intersect(z);
            if !w.is_empty() {
                union = union.union(&w);
                pieces.push((i, j, w));
            }
        }
    }
    EnlargedIntersection { union, pieces }
}

/// `N(r)`: the largest number of points in a closed ball of radius `r`.
pub fn bounded_geometry_profile(space: &FiniteMetricSpace, r: &Q) -> usize {
    let bound = Dist::Finite(*r);
    (0..space.len())
        .into_par_iter()
        .map(|c| (0..space.len()).filter(|&y| space.dist(c, y) <= bound).count())
        .max()
        .unwrap_or(0)
}
