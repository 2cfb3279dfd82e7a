use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::rc::Rc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::complex::MetricSimplicialComplex;
use super::constants::derive_dimension_constants;
use super::fixed::{self, sqrt_bounds, INF, ONE};
use crate::error::{Error, Result};
use crate::metric::{Dist, PointSet, Q};

pub const DEFAULT_LEVEL: u32 = 3;
/// Finest subdivision level accepted.
pub const MAX_LEVEL: u32 = 8;

/// A node of the subdivision graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeKey {
    /// Barycentric point with numerators over the common denominator; the
    /// vertex list is the support.
    Bary(Vec<(usize, u32)>),
    /// Cone point of a scaled simplex.
    Apex(Vec<usize>),
    /// Point at height `t = num/den` over a boundary node of a scaled simplex.
    Level { simplex: Vec<usize>, t: (u32, u32), base: Box<NodeKey> },
}

impl NodeKey {
    /// Support of a barycentric node; `None` inside scaled simplices.
    pub fn support(&self) -> Option<Vec<usize>> {
        match self {
            NodeKey::Bary(c) => Some(c.iter().map(|&(v, _)| v).collect()),
            _ => None,
        }
    }
}

struct Local {
    nodes: Vec<NodeKey>,
    edges: Vec<(usize, usize, u64)>,
}

/// Weighted graph on the level-`L` nodes. Every edge weight bounds the
/// length of a segment in the complex from above, so shortest paths bound
/// geodesic distances from above.
///
/// Level `L` uses the barycentric grids of every denominator up to `L`, and
/// its graph contains the level `L - 1` graph, so distances can only shrink
/// as the level grows.
#[derive(Serialize, Deserialize)]
pub struct Subdivision {
    pub level: u32,
    pub denom: u32,
    keys: Vec<NodeKey>,
    #[serde(skip)]
    index: HashMap<NodeKey, usize>,
    adj: Vec<Vec<(u32, u64)>>,
    vertex_node: Vec<usize>,
}

fn compositions(parts: usize, total: u32, out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>) {
    if cur.len() + 1 == parts {
        let used: u32 = cur.iter().sum();
        cur.push(total - used);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    let used: u32 = cur.iter().sum();
    for x in 0..=total - used {
        cur.push(x);
        compositions(parts, total, out, cur);
        cur.pop();
    }
}

/// Levels `j/k` with `0 < j < k ≤ L`, reduced and in increasing order.
fn heights(level: u32) -> Vec<(u32, u32)> {
    let mut t: Vec<(u32, u32)> = (2..=level)
        .flat_map(|k| (1..k).map(move |j| (j / j.gcd(&k), k / j.gcd(&k))))
        .collect();
    t.sort_by(|a, b| (u64::from(a.0) * u64::from(b.1)).cmp(&(u64::from(b.0) * u64::from(a.1))));
    t.dedup();
    t
}

struct Builder<'a> {
    complex: &'a MetricSimplicialComplex,
    level: u32,
    denom: u32,
    m: u64,
    memo: HashMap<Vec<usize>, Rc<Local>>,
}

impl Builder<'_> {
    fn local(&mut self, s: &[usize]) -> Rc<Local> {
        if let Some(l) = self.memo.get(s) {
            return l.clone();
        }
        let l = Rc::new(if s.len() >= 2 && !self.complex.is_standard(s) { self.cone(s) } else { self.standard(s) });
        self.memo.insert(s.to_vec(), l.clone());
        l
    }

    fn standard(&self, s: &[usize]) -> Local {
        let mut coords = Vec::new();
        for k in 1..=self.level {
            let mut grid = Vec::new();
            compositions(s.len(), k, &mut grid, &mut Vec::with_capacity(s.len()));
            coords.extend(grid.into_iter().map(|c| c.into_iter().map(|x| x * (self.denom / k)).collect::<Vec<u32>>()));
        }
        coords.sort();
        coords.dedup();
        let nodes: Vec<NodeKey> = coords
            .iter()
            .map(|c| NodeKey::Bary(s.iter().zip(c).filter(|(_, &x)| x > 0).map(|(&v, &x)| (v, x)).collect()))
            .collect();
        let q = 2 * u128::from(self.denom) * u128::from(self.denom);
        let mut edges = Vec::new();
        for i in 0..coords.len() {
            for j in i + 1..coords.len() {
                let p: u128 = coords[i]
                    .iter()
                    .zip(&coords[j])
                    .map(|(&a, &b)| {
                        let d = u128::from(a.abs_diff(b));
                        d * d
                    })
                    .sum();
                edges.push((i, j, sqrt_bounds(p, q).1));
            }
        }
        Local { nodes, edges }
    }

    /// The cone over the boundary with apex at height 0 and the boundary at
    /// height 1; a radial segment of height `h` has length `m h`, and a level
    /// path at height `t` is `t` times as long as its base path.
    fn cone(&mut self, s: &[usize]) -> Local {
        let mut index: HashMap<NodeKey, usize> = HashMap::new();
        let mut nodes: Vec<NodeKey> = Vec::new();
        let mut base_edges = Vec::new();
        let mut intern = |k: NodeKey, nodes: &mut Vec<NodeKey>| {
            *index.entry(k.clone()).or_insert_with(|| {
                nodes.push(k);
                nodes.len() - 1
            })
        };
        for skip in 0..s.len() {
            let facet: Vec<usize> = s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
            let f = self.local(&facet);
            let map: Vec<usize> = f.nodes.iter().map(|k| intern(k.clone(), &mut nodes)).collect();
            base_edges.extend(f.edges.iter().map(|&(a, b, w)| (map[a], map[b], w)));
        }
        let base = nodes.len();
        let t = heights(self.level);
        let apex = nodes.len();
        nodes.push(NodeKey::Apex(s.to_vec()));
        // node at height index h over base node y; h = 0 is the apex, h = t.len() + 1 the base
        let first_level = nodes.len();
        for &ti in &t {
            for y in 0..base {
                nodes.push(NodeKey::Level { simplex: s.to_vec(), t: ti, base: Box::new(nodes[y].clone()) });
            }
        }
        let at = |h: usize, y: usize| -> usize {
            if h == 0 {
                apex
            } else if h == t.len() + 1 {
                y
            } else {
                first_level + (h - 1) * base + y
            }
        };
        let mut full = vec![(0u32, 1u32)];
        full.extend(&t);
        full.push((1, 1));
        let mut edges = base_edges.clone();
        for y in 0..base {
            for h1 in 0..full.len() {
                for h2 in h1 + 1..full.len() {
                    let (a, b) = (full[h1], full[h2]);
                    let num = u64::from(b.0) * u64::from(a.1) - u64::from(a.0) * u64::from(b.1);
                    let den = u64::from(a.1) * u64::from(b.1);
                    let (u, v) = (at(h1, y), at(h2, y));
                    edges.push((u, v, fixed::scale_up(ONE * self.m, num, den)));
                }
            }
        }
        for (h, &(j, k)) in t.iter().enumerate() {
            for &(a, b, w) in &base_edges {
                edges.push((at(h + 1, a), at(h + 1, b), fixed::scale_up(w, u64::from(j), u64::from(k))));
            }
        }
        Local { nodes, edges }
    }
}

impl Subdivision {
    pub fn build(complex: &MetricSimplicialComplex, level: u32) -> Result<Self> {
        if level == 0 || level > MAX_LEVEL {
            return Err(Error::BadParams(format!("subdivision level must lie in 1..={MAX_LEVEL}, got {level}")));
        }
        let denom = (1..=level).fold(1u32, |acc, k| acc.lcm(&k));
        let mut b = Builder { complex, level, denom, m: u64::from(complex.cone_factor()), memo: HashMap::new() };
        let mut index: HashMap<NodeKey, usize> = HashMap::new();
        let mut keys = Vec::new();
        let mut adj: Vec<Vec<(u32, u64)>> = Vec::new();
        let mut vertex_node = Vec::with_capacity(complex.vertex_count());
        let mut intern = |k: NodeKey, keys: &mut Vec<NodeKey>, adj: &mut Vec<Vec<(u32, u64)>>| {
            *index.entry(k.clone()).or_insert_with(|| {
                keys.push(k);
                adj.push(Vec::new());
                keys.len() - 1
            })
        };
        for v in 0..complex.vertex_count() {
            vertex_node.push(intern(NodeKey::Bary(vec![(v, denom)]), &mut keys, &mut adj));
        }
        for s in &complex.maximal {
            let l = b.local(s);
            let map: Vec<usize> = l.nodes.iter().map(|k| intern(k.clone(), &mut keys, &mut adj)).collect();
            for &(x, y, w) in &l.edges {
                let (x, y) = (map[x], map[y]);
                adj[x].push((y as u32, w));
                adj[y].push((x as u32, w));
            }
        }
        Ok(Subdivision { level, denom, keys, index, adj, vertex_node })
    }

    /// Rebuilds the key index after deserialization.
    pub fn reindex(&mut self) {
        self.index = self.keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    }

    /// Structural sanity of a loaded graph.
    pub fn is_consistent(&self, vertices: usize) -> bool {
        let n = self.keys.len();
        self.adj.len() == n
            && self.vertex_node.len() == vertices
            && self.vertex_node.iter().all(|&v| v < n)
            && self.adj.iter().all(|a| a.iter().all(|&(v, _)| (v as usize) < n))
    }

    pub fn node_count(&self) -> usize {
        self.keys.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    pub fn key(&self, node: usize) -> &NodeKey {
        &self.keys[node]
    }

    pub fn node_of(&self, key: &NodeKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn vertex_node(&self, v: usize) -> usize {
        self.vertex_node[v]
    }

    /// Barycentric nodes supported inside the full subcomplex on `set`.
    pub fn nodes_within(&self, set: &PointSet) -> Vec<usize> {
        (0..self.keys.len())
            .filter(|&i| matches!(self.keys[i].support(), Some(s) if s.iter().all(|&v| set.contains(v))))
            .collect()
    }

    /// Multi-source shortest path lengths in fixed point.
    pub fn distances(&self, sources: &[usize]) -> Vec<u64> {
        let mut dist = vec![INF; self.keys.len()];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            dist[s] = 0;
            heap.push(Reverse((0u64, s as u32)));
        }
        while let Some(Reverse((d, u))) = heap.pop() {
            let u = u as usize;
            if d > dist[u] {
                continue;
            }
            for &(v, w) in &self.adj[u] {
                let nd = fixed::add(d, w);
                if nd < dist[v as usize] {
                    dist[v as usize] = nd;
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        dist
    }
}

fn check_vertex(k: &MetricSimplicialComplex, v: usize) -> Result<()> {
    if v >= k.vertex_count() {
        return Err(Error::BadParams(format!("vertex {v} is not in the complex")));
    }
    Ok(())
}

fn check_set(k: &MetricSimplicialComplex, s: &PointSet) -> Result<()> {
    if s.is_empty() {
        return Err(Error::BadParams("empty vertex set".into()));
    }
    s.iter().try_for_each(|&v| check_vertex(k, v))
}

/// Upper bound on the geodesic distance between two vertices, exact in
/// units of `2^-32`; infinite across components.
pub fn geodesic_upper(k: &MetricSimplicialComplex, p: usize, q: usize, level: u32) -> Result<Dist> {
    check_vertex(k, p)?;
    check_vertex(k, q)?;
    let (p, q) = (p.min(q), p.max(q));
    Ok(geodesic_upper_from(k, p, level)?[q])
}

/// Upper bounds from `p` to every vertex.
pub fn geodesic_upper_from(k: &MetricSimplicialComplex, p: usize, level: u32) -> Result<Vec<Dist>> {
    check_vertex(k, p)?;
    let g = k.subdivision(level)?;
    let d = g.distances(&[g.vertex_node(p)]);
    Ok((0..k.vertex_count()).map(|v| fixed::to_dist(d[g.vertex_node(v)])).collect())
}

/// Upper bounds from every vertex to the full subcomplex on `set`.
pub fn geodesic_upper_to_set(k: &MetricSimplicialComplex, set: &PointSet, level: u32) -> Result<Vec<Dist>> {
    check_set(k, set)?;
    let g = k.subdivision(level)?;
    let d = g.distances(&g.nodes_within(set));
    Ok((0..k.vertex_count()).map(|v| fixed::to_dist(d[g.vertex_node(v)])).collect())
}

/// Upper bound on the distance between the full subcomplexes on two sets.
pub fn geodesic_upper_sets(k: &MetricSimplicialComplex, a: &PointSet, b: &PointSet, level: u32) -> Result<Dist> {
    check_set(k, a)?;
    check_set(k, b)?;
    let g = k.subdivision(level)?;
    let d = g.distances(&g.nodes_within(a));
    Ok(fixed::to_dist(g.nodes_within(b).into_iter().map(|v| d[v]).min().unwrap_or(INF)))
}

/// Fixed-point lower bound on the smallest distance between two disjoint
/// faces of the regular `n`-simplex with unit edges. Faces with `p` and `q`
/// vertices are `sqrt((1/p + 1/q) / 2)` apart.
pub fn face_gap(n: usize) -> Q {
    let mut best: Option<Q> = None;
    let k = n as u128 + 1;
    for p in 1..k {
        for q in 1..=k - p {
            let (lo, _) = sqrt_bounds(p + q, 2 * p * q);
            let v = fixed::to_dist(lo).finite().expect("finite");
            best = Some(best.map_or(v, |b: Q| b.min(v)));
        }
    }
    best.unwrap_or(Q::from_integer(0))
}

/// Combines two bounds from the hop count `h` between the vertex sets:
/// `(h - 2) / c_n`, and `h` times [`face_gap`], which holds because the
/// barycentric interpolation of hop distances changes by at most one between
/// disjoint faces of each simplex.
fn hop_bound(k: &MetricSimplicialComplex, hops: Option<usize>) -> Result<Dist> {
    let Some(h) = hops else {
        return Ok(Dist::Infinite);
    };
    if k.has_cone_simplices() {
        return Ok(Dist::ZERO);
    }
    let n = k.dimension();
    let c = derive_dimension_constants(n)?.c;
    let skeleton = (Q::from_integer(h as i64 - 2) / c).max(Q::from_integer(0));
    Ok(Dist::Finite(skeleton.max(face_gap(n) * Q::from_integer(h as i64))))
}

/// Lower bound from the 1-skeleton hop distance. Complexes with scaled
/// simplices only get the trivial bound.
pub fn geodesic_lower(k: &MetricSimplicialComplex, p: usize, q: usize) -> Result<Dist> {
    check_vertex(k, p)?;
    check_vertex(k, q)?;
    let hops = k.hops_from(&PointSet::new(vec![p]))[q];
    hop_bound(k, hops)
}

/// Lower bound on the distance between the full subcomplexes on two sets.
pub fn geodesic_lower_sets(k: &MetricSimplicialComplex, a: &PointSet, b: &PointSet) -> Result<Dist> {
    check_set(k, a)?;
    check_set(k, b)?;
    let hops = k.hops_from(a);
    hop_bound(k, b.iter().filter_map(|&v| hops[v]).min())
}
