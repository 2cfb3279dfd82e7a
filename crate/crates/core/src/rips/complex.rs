use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::{Arc, Mutex};

use serde_json::{json, Map, Value};

use super::geodesic::Subdivision;
use crate::error::{Error, Result};
use crate::metric::{fmt_q, Dist, FiniteMetricSpace, PointSet, Q};

/// Largest clique accepted during enumeration (dimension 11).
pub const MAX_CLIQUE: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub enum ComplexKind {
    Rips { d: Q },
    Relative { a: Q, b: Q, sigma: PointSet },
    /// `P_b(Γ)` whose simplices outside `P_ab(Γ, W)` carry cone metrics with
    /// factor `m` in every dimension.
    Scaled { a: Q, b: Q, w: PointSet, m: u32 },
}

pub struct MetricSimplicialComplex {
    pub space: Arc<FiniteMetricSpace>,
    pub kind: ComplexKind,
    /// Maximal simplices as sorted vertex lists, in sorted order.
    pub maximal: Vec<Vec<usize>>,
    neighbors: Vec<Vec<usize>>,
    cache: Mutex<HashMap<u32, Arc<Subdivision>>>,
}

impl std::fmt::Debug for MetricSimplicialComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MetricSimplicialComplex")
            .field("kind", &self.kind)
            .field("maximal", &self.maximal)
            .finish()
    }
}

fn within(space: &FiniteMetricSpace, s: &[usize], r: &Q) -> bool {
    let r = Dist::Finite(*r);
    s.iter().enumerate().all(|(i, &x)| s[i + 1..].iter().all(|&y| space.dist(x, y) <= r))
}

/// Maximal cliques of the graph `d(x, y) ≤ r` on `pts`, by Bron–Kerbosch
/// with pivoting.
fn maximal_cliques(space: &FiniteMetricSpace, pts: &[usize], r: &Q) -> Result<Vec<Vec<usize>>> {
    let limit = Dist::Finite(*r);
    let k = pts.len();
    let adj: Vec<Vec<bool>> =
        (0..k).map(|i| (0..k).map(|j| i != j && space.dist(pts[i], pts[j]) <= limit).collect()).collect();
    let mut out = Vec::new();
    fn bk(
        adj: &[Vec<bool>],
        r: &mut Vec<usize>,
        p: Vec<usize>,
        x: Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        if r.len() > MAX_CLIQUE {
            return Err(Error::DimensionCapExceeded(r.len() - 1));
        }
        if p.is_empty() && x.is_empty() {
            out.push(r.clone());
            return Ok(());
        }
        let pivot = p
            .iter()
            .chain(&x)
            .copied()
            .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count())
            .expect("p or x is nonempty");
        let cand: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
        let (mut p, mut x) = (p, x);
        for v in cand {
            r.push(v);
            let np = p.iter().copied().filter(|&u| adj[v][u]).collect();
            let nx = x.iter().copied().filter(|&u| adj[v][u]).collect();
            bk(adj, r, np, nx, out)?;
            r.pop();
            p.retain(|&u| u != v);
            x.push(v);
        }
        Ok(())
    }
    bk(&adj, &mut Vec::new(), (0..k).collect(), Vec::new(), &mut out)?;
    let mut cliques: Vec<Vec<usize>> = out
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|i| pts[i]).collect();
            v.sort_unstable();
            v
        })
        .collect();
    cliques.sort();
    Ok(cliques)
}

fn is_face(s: &[usize], t: &[usize]) -> bool {
    s.len() <= t.len() && s.iter().all(|x| t.binary_search(x).is_ok())
}

impl MetricSimplicialComplex {
    fn assemble(space: Arc<FiniteMetricSpace>, kind: ComplexKind, mut maximal: Vec<Vec<usize>>) -> Self {
        maximal.sort();
        maximal.dedup();
        let keep: Vec<bool> = maximal
            .iter()
            .map(|s| !maximal.iter().any(|t| t.len() > s.len() && is_face(s, t)))
            .collect();
        let maximal: Vec<Vec<usize>> = maximal.into_iter().zip(keep).filter(|(_, k)| *k).map(|(s, _)| s).collect();
        let mut neighbors = vec![Vec::new(); space.len()];
        for s in &maximal {
            for &x in s {
                neighbors[x].extend(s.iter().copied().filter(|&y| y != x));
            }
        }
        for n in &mut neighbors {
            n.sort_unstable();
            n.dedup();
        }
        MetricSimplicialComplex { space, kind, maximal, neighbors, cache: Mutex::new(HashMap::new()) }
    }

    pub fn dimension(&self) -> usize {
        self.maximal.iter().map(|s| s.len().saturating_sub(1)).max().unwrap_or(0)
    }

    pub fn vertex_count(&self) -> usize {
        self.space.len()
    }

    pub fn is_simplex(&self, s: &[usize]) -> bool {
        let mut v = s.to_vec();
        v.sort_unstable();
        self.maximal.iter().any(|t| is_face(&v, t))
    }

    /// Whether the simplex carries the standard metric.
    pub fn is_standard(&self, s: &[usize]) -> bool {
        match &self.kind {
            ComplexKind::Scaled { a, b, w, .. } => in_relative(&self.space, s, a, b, w),
            _ => true,
        }
    }

    /// Relative simplices that exist only because all vertices lie in `Σ`.
    pub fn is_relative_only(&self, s: &[usize]) -> bool {
        match &self.kind {
            ComplexKind::Relative { a, .. } => !within(&self.space, s, a),
            _ => false,
        }
    }

    pub fn has_cone_simplices(&self) -> bool {
        self.maximal.iter().any(|s| !self.is_standard(s))
    }

    /// The cone factor, 1 for complexes without cone simplices.
    pub fn cone_factor(&self) -> u32 {
        match self.kind {
            ComplexKind::Scaled { m, .. } => m,
            _ => 1,
        }
    }

    /// The 1-skeleton neighbors of a vertex.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    /// Edge counts from `sources` in the 1-skeleton; `None` if unreachable.
    pub fn hops_from(&self, sources: &PointSet) -> Vec<Option<usize>> {
        let mut hop = vec![None; self.space.len()];
        let mut queue = VecDeque::new();
        for &s in sources.iter() {
            hop[s] = Some(0);
            queue.push_back(s);
        }
        while let Some(x) = queue.pop_front() {
            let h = hop[x].expect("queued vertices have hops");
            for &y in &self.neighbors[x] {
                if hop[y].is_none() {
                    hop[y] = Some(h + 1);
                    queue.push_back(y);
                }
            }
        }
        hop
    }

    /// The level-`L` subdivision graph, built once per level.
    pub fn subdivision(&self, level: u32) -> Result<Arc<Subdivision>> {
        if let Some(s) = self.cache.lock().expect("cache lock").get(&level) {
            return Ok(s.clone());
        }
        let s = Arc::new(match super::cache::load(self, level) {
            Some(s) => s,
            None => {
                let s = Subdivision::build(self, level)?;
                super::cache::store(self, level, &s);
                s
            }
        });
        self.cache.lock().expect("cache lock").insert(level, s.clone());
        Ok(s)
    }

    pub fn to_json(&self) -> Value {
        let ids = |s: &[usize]| s.iter().map(|&v| self.space.id(v).to_string()).collect::<Vec<_>>();
        let mut tags = Map::new();
        for s in &self.maximal {
            let tag = if !self.is_standard(s) {
                format!("scaled:{}:{}", s.len() - 1, self.cone_factor())
            } else if self.is_relative_only(s) {
                "relative".to_string()
            } else {
                continue;
            };
            tags.insert(ids(s).join(","), Value::String(tag));
        }
        let kind = match &self.kind {
            ComplexKind::Rips { d } => json!({"type": "rips", "d": fmt_q(d)}),
            ComplexKind::Relative { a, b, sigma } => {
                json!({"type": "relative", "a": fmt_q(a), "b": fmt_q(b), "sigma": ids(sigma.as_slice())})
            }
            ComplexKind::Scaled { a, b, w, m } => {
                json!({"type": "scaled", "a": fmt_q(a), "b": fmt_q(b), "w": ids(w.as_slice()), "m": m})
            }
        };
        json!({
            "kind": kind,
            "vertices": self.space.ids(),
            "maximal_simplices": self.maximal.iter().map(|s| ids(s)).collect::<Vec<_>>(),
            "tags": tags,
        })
    }

    /// Number of simplices in each dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut faces: BTreeMap<usize, std::collections::BTreeSet<Vec<usize>>> = BTreeMap::new();
        for s in &self.maximal {
            let k = s.len();
            for mask in 1u32..(1 << k) {
                let f: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| s[i]).collect();
                faces.entry(f.len() - 1).or_default().insert(f);
            }
        }
        faces.values().map(|s| s.len()).collect()
    }
}

fn in_relative(space: &FiniteMetricSpace, s: &[usize], a: &Q, b: &Q, sigma: &PointSet) -> bool {
    within(space, s, a) || (s.iter().all(|&x| sigma.contains(x)) && within(space, s, b))
}

pub fn build_rips(space: Arc<FiniteMetricSpace>, d: &Q) -> Result<MetricSimplicialComplex> {
    if *d < Q::from_integer(0) {
        return Err(Error::BadParams(format!("Rips scale {} is negative", fmt_q(d))));
    }
    let all: Vec<usize> = (0..space.len()).collect();
    let maximal = maximal_cliques(&space, &all, d)?;
    Ok(MetricSimplicialComplex::assemble(space, ComplexKind::Rips { d: *d }, maximal))
}

fn check_scales(a: &Q, b: &Q) -> Result<()> {
    if *a < Q::from_integer(1) || a > b {
        return Err(Error::BadParams(format!("need 1 <= a <= b, got a = {}, b = {}", fmt_q(a), fmt_q(b))));
    }
    Ok(())
}

pub fn build_relative_rips(space: Arc<FiniteMetricSpace>, sigma: &PointSet, a: &Q, b: &Q) -> Result<MetricSimplicialComplex> {
    check_scales(a, b)?;
    if sigma.iter().any(|&x| x >= space.len()) {
        return Err(Error::BadParams("subset references a missing point".into()));
    }
    let all: Vec<usize> = (0..space.len()).collect();
    let mut maximal = maximal_cliques(&space, &all, a)?;
    maximal.extend(maximal_cliques(&space, sigma.as_slice(), b)?);
    let kind = ComplexKind::Relative { a: *a, b: *b, sigma: sigma.clone() };
    Ok(MetricSimplicialComplex::assemble(space, kind, maximal))
}

pub fn build_scaled_rips(
    space: Arc<FiniteMetricSpace>,
    w: &PointSet,
    a: &Q,
    b: &Q,
    m: u32,
) -> Result<MetricSimplicialComplex> {
    check_scales(a, b)?;
    if m == 0 {
        return Err(Error::BadParams("cone factor m must be positive".into()));
    }
    if w.iter().any(|&x| x >= space.len()) {
        return Err(Error::BadParams("subset references a missing point".into()));
    }
    let all: Vec<usize> = (0..space.len()).collect();
    let maximal = maximal_cliques(&space, &all, b)?;
    let kind = ComplexKind::Scaled { a: *a, b: *b, w: w.clone(), m };
    Ok(MetricSimplicialComplex::assemble(space, kind, maximal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::q;
    use crate::rips::corpus::grid;

    fn line(n: i64) -> Arc<FiniteMetricSpace> {
        Arc::new(FiniteMetricSpace::integer_interval(0, n))
    }

    #[test]
    fn three_points() {
        let k = build_rips(line(2), &q(1)).unwrap();
        assert_eq!(k.maximal, vec![vec![0, 1], vec![1, 2]]);
        let k = build_rips(line(2), &q(2)).unwrap();
        assert_eq!(k.maximal, vec![vec![0, 1, 2]]);
        assert_eq!(k.dimension(), 2);
    }

    #[test]
    fn grid_is_a_graph() {
        let k = build_rips(Arc::new(grid(5, 5)), &q(1)).unwrap();
        assert_eq!(k.dimension(), 1);
        assert!(k.maximal.iter().all(|s| s.len() == 2));
        assert_eq!(k.maximal.len(), 40);
    }

    #[test]
    fn relative_extra_edge() {
        let sigma: PointSet = [0, 10].into_iter().collect();
        let k = build_relative_rips(line(10), &sigma, &q(1), &q(10)).unwrap();
        assert!(k.is_simplex(&[0, 10]));
        assert!(k.is_relative_only(&[0, 10]));
        let plain = build_rips(line(10), &q(1)).unwrap();
        let empty = build_relative_rips(line(10), &PointSet::default(), &q(1), &q(10)).unwrap();
        assert_eq!(empty.maximal, plain.maximal);
        let same = build_relative_rips(line(10), &sigma, &q(1), &q(1)).unwrap();
        assert_eq!(same.maximal, plain.maximal);
        assert!(build_relative_rips(line(10), &sigma, &q(3), &q(2)).is_err());
    }

    #[test]
    fn clique_cap() {
        let s = Arc::new(FiniteMetricSpace::integer_interval(0, 13));
        assert!(matches!(build_rips(s, &q(20)), Err(Error::DimensionCapExceeded(_))));
    }
}
