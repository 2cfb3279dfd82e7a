use std::sync::Arc;

use coarse_decomp::groups::vector_space;
use coarse_decomp::metric::{q, Dist, FiniteMetricSpace, PointSet, Q};
use coarse_decomp::rips::corpus::{glued_triangles, path};
use coarse_decomp::rips::{
    build_relative_rips, build_rips, build_scaled_rips, geodesic_lower, geodesic_upper, geodesic_upper_from,
    verify_lemma, Lemma, LemmaParams, LemmaStatus, MetricSimplicialComplex,
};
use coarse_decomp::Error;
use proptest::prelude::*;

fn grid_subset() -> impl Strategy<Value = Arc<FiniteMetricSpace>> {
    prop::collection::btree_set((0i64..4, 0i64..4), 3..10)
        .prop_map(|s| Arc::new(vector_space(s.into_iter().map(|(x, y)| vec![x, y]).collect(), vec![1, 1]).unwrap()))
}

fn diam(s: &FiniteMetricSpace, pts: &[usize]) -> Dist {
    pts.iter().flat_map(|&x| pts.iter().map(move |&y| s.dist(x, y))).max().unwrap_or(Dist::ZERO)
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..1 << n).map(move |m| (0..n).filter(|i| m >> i & 1 == 1).collect())
}

/// Face counts of the flag complex, by enumerating every vertex subset.
fn brute_f_vector(s: &FiniteMetricSpace, member: impl Fn(&[usize]) -> bool) -> Vec<usize> {
    let mut f = Vec::new();
    for sub in subsets(s.len()).filter(|v| member(v)) {
        if f.len() < sub.len() {
            f.resize(sub.len(), 0);
        }
        f[sub.len() - 1] += 1;
    }
    f
}

fn uppers(k: &MetricSimplicialComplex, level: u32) -> Vec<Vec<Dist>> {
    (0..k.vertex_count()).map(|p| geodesic_upper_from(k, p, level).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rips_faces_match_brute_force(s in grid_subset(), d in 1i64..=2) {
        let k = build_rips(s.clone(), &q(d)).unwrap();
        let want = brute_f_vector(&s, |v| diam(&s, v) <= Dist::int(d));
        prop_assert_eq!(k.f_vector(), want);
        for v in subsets(s.len()).take(200) {
            prop_assert_eq!(k.is_simplex(&v), diam(&s, &v) <= Dist::int(d));
        }
    }

    #[test]
    fn relative_faces_match_brute_force(s in grid_subset(), pick in any::<u32>()) {
        let sigma: PointSet = (0..s.len()).filter(|i| pick >> i & 1 == 1).collect();
        let k = build_relative_rips(s.clone(), &sigma, &q(1), &q(2)).unwrap();
        let want = brute_f_vector(&s, |v| {
            diam(&s, v) <= Dist::int(1) || (v.iter().all(|&x| sigma.contains(x)) && diam(&s, v) <= Dist::int(2))
        });
        prop_assert_eq!(k.f_vector(), want);
    }

    #[test]
    fn upper_is_a_metric_and_brackets_lower(s in grid_subset(), d in 1i64..=2) {
        let k = build_rips(s.clone(), &q(d)).unwrap();
        let u = uppers(&k, 3);
        let n = s.len();
        for p in 0..n {
            prop_assert_eq!(u[p][p], Dist::ZERO);
            for r in 0..n {
                prop_assert_eq!(u[p][r], u[r][p]);
                prop_assert!(geodesic_lower(&k, p, r).unwrap() <= u[p][r]);
                for m in 0..n {
                    prop_assert!(u[p][r] <= u[p][m].add(u[m][r]));
                }
            }
        }
    }

    #[test]
    fn finer_subdivisions_never_lengthen(s in grid_subset()) {
        let k = build_rips(s, &q(2)).unwrap();
        let mut prev = uppers(&k, 1);
        for level in 2..=4 {
            let cur = uppers(&k, level);
            for (a, b) in cur.iter().flatten().zip(prev.iter().flatten()) {
                prop_assert!(a <= b);
            }
            prev = cur;
        }
    }

    #[test]
    fn larger_scales_contain_smaller(s in grid_subset()) {
        let small = build_rips(s.clone(), &q(1)).unwrap();
        let big = build_rips(s.clone(), &q(2)).unwrap();
        for m in &small.maximal {
            prop_assert!(big.is_simplex(m));
        }
        let rel = build_relative_rips(s.clone(), &s.all_points(), &q(1), &q(2)).unwrap();
        for m in &rel.maximal {
            prop_assert!(big.is_simplex(m));
        }
        for m in &small.maximal {
            prop_assert!(rel.is_simplex(m));
        }
    }
}

#[test]
fn relative_degeneracies() {
    let s = Arc::new(path(6));
    let empty = build_relative_rips(s.clone(), &PointSet::default(), &q(1), &q(3)).unwrap();
    assert_eq!(empty.f_vector(), build_rips(s.clone(), &q(1)).unwrap().f_vector());
    let full = build_relative_rips(s.clone(), &s.all_points(), &q(1), &q(3)).unwrap();
    assert_eq!(full.f_vector(), build_rips(s.clone(), &q(3)).unwrap().f_vector());
    let same = build_relative_rips(s.clone(), &[1, 2, 3].into_iter().collect(), &q(2), &q(2)).unwrap();
    assert_eq!(same.f_vector(), build_rips(s.clone(), &q(2)).unwrap().f_vector());
    assert!(matches!(build_relative_rips(s.clone(), &PointSet::default(), &q(3), &q(2)), Err(Error::BadParams(_))));
    assert!(matches!(build_scaled_rips(s, &PointSet::default(), &q(1), &q(2), 0), Err(Error::BadParams(_))));
}

#[test]
fn disconnected_pairs() {
    let pts = vec![vec![0, 0], vec![0, 1], vec![5, 5]];
    let s = Arc::new(vector_space(pts, vec![1, 1]).unwrap());
    let k = build_rips(s, &q(1)).unwrap();
    assert_eq!(geodesic_upper(&k, 0, 2, 3).unwrap(), Dist::Infinite);
    assert_eq!(geodesic_lower(&k, 0, 2).unwrap(), Dist::Infinite);
    assert_eq!(geodesic_upper(&k, 0, 1, 3).unwrap(), Dist::int(1));
}

#[test]
fn glued_corners_converge_to_root_three() {
    let k = build_rips(Arc::new(glued_triangles()), &q(1)).unwrap();
    let (a, d) = (k.space.index_of("a").unwrap(), k.space.index_of("d").unwrap());
    let l1 = geodesic_upper(&k, a, d, 1).unwrap().to_f64();
    let l3 = geodesic_upper(&k, a, d, 3).unwrap().to_f64();
    assert_eq!(l1, 2.0);
    assert!((l3 - 3f64.sqrt()).abs() < 1e-8);
}

#[test]
fn scaled_cones_stretch_distances() {
    let s = Arc::new(path(11));
    let w: PointSet = (0..5).collect();
    let plain = build_rips(s.clone(), &q(2)).unwrap();
    let k = build_scaled_rips(s, &w, &q(1), &q(2), 4).unwrap();
    // long edges outside W are cones of length 2m, so unit steps win there
    assert_eq!(geodesic_upper(&plain, 6, 10, 2).unwrap(), Dist::int(2));
    assert_eq!(geodesic_upper(&k, 6, 10, 2).unwrap(), Dist::int(4));
    // inside W the long edges stay standard
    assert_eq!(geodesic_upper(&k, 0, 4, 2).unwrap(), Dist::int(2));
    assert!(k.has_cone_simplices());
    assert_eq!(geodesic_lower(&k, 0, 10).unwrap(), Dist::ZERO);
}

#[test]
fn lemma_checks_on_a_path() {
    let s = Arc::new(path(8));
    let ok = verify_lemma(&s, Lemma::Comparison, &LemmaParams::new(q(1))).unwrap();
    assert_eq!(ok.status, LemmaStatus::Pass);
    let mut tight = LemmaParams::new(q(1));
    tight.eps = Some(Q::new(1, 2));
    tight.sets = vec![(0..3).collect(), (5..8).collect()];
    let sep = verify_lemma(&s, Lemma::Separation, &tight).unwrap();
    assert!(sep.checked > 0);
}
