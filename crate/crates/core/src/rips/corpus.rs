//! Small spaces and complexes used by the lemma sweeps and the CLI.

use std::sync::Arc;

use super::complex::{build_rips, build_scaled_rips, ComplexKind, MetricSimplicialComplex};
use super::lemma::{Lemma, LemmaParams};
use crate::error::Result;
use crate::groups::vector_space;
use crate::metric::{q, Dist, FiniteMetricSpace, PointSet, Q};

pub struct Fixture {
    pub name: String,
    pub complex: MetricSimplicialComplex,
}

/// `{0, ..., w-1} × {0, ..., h-1}` with the `ℓ¹` metric.
pub fn grid(w: i64, h: i64) -> FiniteMetricSpace {
    let pts = (0..w).flat_map(|x| (0..h).map(move |y| vec![x, y])).collect();
    vector_space(pts, vec![1, 1]).expect("grid points are well formed")
}

fn from_table(names: &[&str], far: &[(usize, usize)]) -> FiniteMetricSpace {
    let n = names.len();
    let d = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match (i == j, far.contains(&(i.min(j), i.max(j)))) {
                    (true, _) => Dist::ZERO,
                    (false, true) => Dist::int(2),
                    (false, false) => Dist::int(1),
                })
                .collect()
        })
        .collect();
    FiniteMetricSpace::from_matrix(names.iter().map(|s| s.to_string()).collect(), d).expect("fixed table is a metric")
}

/// Two unit triangles sharing the edge `bc`; `d(a, d) = 2`.
pub fn glued_triangles() -> FiniteMetricSpace {
    from_table(&["a", "b", "c", "d"], &[(0, 3)])
}

/// Two unit tetrahedra sharing the face `bcd`; `d(a, e) = 2`.
pub fn glued_tetrahedra() -> FiniteMetricSpace {
    from_table(&["a", "b", "c", "d", "e"], &[(0, 4)])
}

pub fn path(n: i64) -> FiniteMetricSpace {
    FiniteMetricSpace::integer_interval(0, n - 1)
}

/// Builtin spaces addressed by name.
pub fn builtin_space(name: &str) -> Option<FiniteMetricSpace> {
    Some(match name {
        "path8" => path(8),
        "path11" => path(11),
        "path12" => path(12),
        "grid5" => grid(5, 5),
        "glued" | "glued-triangles" => glued_triangles(),
        "glued-tetrahedra" => glued_tetrahedra(),
        _ => return None,
    })
}

/// The standard Rips corpus: paths, grids at two scales and glued simplices.
pub fn rips_corpus() -> Result<Vec<Fixture>> {
    let items: [(&str, FiniteMetricSpace, Q); 5] = [
        ("path8", path(8), q(1)),
        ("grid5-d1", grid(5, 5), q(1)),
        ("grid5-d2", grid(5, 5), q(2)),
        ("glued-triangles", glued_triangles(), q(1)),
        ("glued-tetrahedra", glued_tetrahedra(), q(1)),
    ];
    items
        .into_iter()
        .map(|(name, s, d)| Ok(Fixture { name: name.to_string(), complex: build_rips(Arc::new(s), &d)? }))
        .collect()
}

/// Scaled complexes of dimension 2 on a path, for each cone factor.
pub fn scaled_corpus(factors: &[u32]) -> Result<Vec<Fixture>> {
    let mut out = Vec::new();
    for &m in factors {
        for (tag, w) in [("left", (0..5).collect::<PointSet>()), ("right", (6..11).collect())] {
            let complex = build_scaled_rips(Arc::new(path(11)), &w, &q(1), &q(2), m)?;
            out.push(Fixture { name: format!("path11-{tag}-m{m}"), complex });
        }
    }
    Ok(out)
}

pub struct SweepCase {
    pub fixture: String,
    pub space: Arc<FiniteMetricSpace>,
    pub lemma: Lemma,
    pub params: LemmaParams,
}

fn ids(space: &FiniteMetricSpace, names: &[&str]) -> PointSet {
    names.iter().map(|n| space.index_of(n).expect("fixture ids exist")).collect()
}

/// Lemma checks over the corpus: comparison, separation and neighborhood on
/// every complex of dimension at most 3, neighborhood on a 4-dimensional
/// complex from a `Z^2` ball, and scaled comparison on the scaled complexes
/// with the given cone factors.
pub fn lemma_sweep(factors: &[u32]) -> Result<Vec<SweepCase>> {
    let mut out = Vec::new();
    let mut push = |fixture: &str, space: &Arc<FiniteMetricSpace>, lemma, params| {
        out.push(SweepCase { fixture: fixture.to_string(), space: space.clone(), lemma, params })
    };
    // (name, space, separated sets with their eps, neighborhood set)
    let rips: [(&str, FiniteMetricSpace, [&[&str]; 2], i64, &[&str]); 4] = [
        ("path8", path(8), [&["0", "1"], &["6", "7"]], 5, &["0", "1", "2"]),
        ("grid5-d1", grid(5, 5), [&["(0,0)", "(0,1)"], &["(4,4)", "(4,3)"]], 6, &["(0,0)", "(0,1)", "(0,2)", "(0,3)", "(0,4)"]),
        ("glued-triangles", glued_triangles(), [&["a"], &["d"]], 2, &["a", "b"]),
        ("glued-tetrahedra", glued_tetrahedra(), [&["a"], &["e"]], 2, &["a", "b"]),
    ];
    for (name, space, sep, eps, near) in rips {
        let space = Arc::new(space);
        push(name, &space, Lemma::Comparison, LemmaParams::new(q(1)));
        let mut p = LemmaParams::new(q(1));
        p.eps = Some(q(eps));
        p.sets = sep.iter().map(|s| ids(&space, s)).collect();
        push(name, &space, Lemma::Separation, p);
        let mut p = LemmaParams::new(q(1));
        p.eps = Some(q(1));
        p.sets = vec![ids(&space, near)];
        push(name, &space, Lemma::Neighborhood, p);
    }
    let ball = Arc::new(crate::groups::ball(&crate::groups::GroupSpec::zn(2), &q(2))?);
    let mut p = LemmaParams::new(q(2));
    p.eps = Some(q(2));
    p.sets = vec![ids(&ball, &["(0,0)"])];
    push("z2-ball2", &ball, Lemma::Neighborhood, p);
    for f in scaled_corpus(factors)? {
        let ComplexKind::Scaled { a, b, w, m } = &f.complex.kind else { continue };
        let mut p = LemmaParams::new(*a);
        p.b = Some(*b);
        p.m = Some(*m);
        p.sets = vec![w.clone()];
        push(&f.name, &f.complex.space, Lemma::ScaledComparison, p);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rips::{verify_lemma, LemmaStatus};

    #[test]
    fn fixtures_have_expected_dimensions() {
        let dims: Vec<(String, usize)> = rips_corpus().unwrap().into_iter().map(|f| (f.name, f.complex.dimension())).collect();
        let want = [("path8", 1), ("grid5-d1", 1), ("grid5-d2", 4), ("glued-triangles", 2), ("glued-tetrahedra", 3)];
        for ((n, d), (wn, wd)) in dims.iter().zip(want) {
            assert_eq!((n.as_str(), *d), (wn, wd));
        }
        assert!(scaled_corpus(&[4]).unwrap().iter().all(|f| f.complex.dimension() == 2 && f.complex.has_cone_simplices()));
    }

    #[test]
    fn sweep_passes() {
        for c in lemma_sweep(&[4]).unwrap() {
            let r = verify_lemma(&c.space, c.lemma, &c.params).unwrap();
            assert_eq!(r.status, LemmaStatus::Pass, "{} {:?}: {:?}", c.fixture, c.lemma, r.offenders);
            assert!(r.checked > 0, "{} {:?}", c.fixture, c.lemma);
        }
    }
}
