use std::sync::Arc;

use coarse_decomp::groups::vector_space;
use coarse_decomp::metric::io::{space_from_json, space_to_explicit_json};
use coarse_decomp::metric::{
    disjointness_violation, neighborhood, q, Dist, FiniteMetricSpace, MetricFamily, PointSet, Q,
};
use coarse_decomp::Error;
use proptest::prelude::*;

fn l1(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn points() -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::btree_set(prop::collection::vec(-6i64..=6, 2), 2..24).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #[test]
    fn vector_spaces_match_l1(pts in points()) {
        let s = vector_space(pts.clone(), vec![1, 1]).unwrap();
        prop_assert_eq!(s.len(), pts.len());
        for (i, a) in pts.iter().enumerate() {
            for (j, b) in pts.iter().enumerate() {
                prop_assert_eq!(s.dist(i, j), Dist::int(l1(a, b)));
            }
        }
        prop_assert!(s.check_triangle_exhaustive().is_ok());
    }

    #[test]
    fn explicit_json_round_trips(pts in points()) {
        let s = vector_space(pts, vec![1, 2]).unwrap();
        let back = space_from_json(&space_to_explicit_json(&s)).unwrap();
        prop_assert_eq!(back.ids(), s.ids());
        for i in 0..s.len() {
            for j in 0..s.len() {
                prop_assert_eq!(back.dist(i, j), s.dist(i, j));
            }
        }
    }

    #[test]
    fn neighborhoods_match_brute_force(pts in points(), picks in prop::collection::vec(0usize..24, 1..5), t in 0i64..6) {
        let s = vector_space(pts, vec![1, 1]).unwrap();
        let x: PointSet = picks.iter().map(|&i| i % s.len()).collect();
        let got = neighborhood(&s, &x, &q(t));
        let want: PointSet = (0..s.len()).filter(|&y| x.iter().any(|&p| s.dist(p, y) <= Dist::int(t))).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn disjointness_matches_brute_force(pts in points(), split in 1usize..23, r in 1i64..5) {
        let s = Arc::new(vector_space(pts, vec![1, 1]).unwrap());
        let cut = split.min(s.len() - 1);
        let a: PointSet = (0..cut).collect();
        let b: PointSet = (cut..s.len()).collect();
        let fam = MetricFamily::from_sets(&s, vec![a.clone(), b.clone()]).unwrap();
        let close = a.iter().any(|&x| b.iter().any(|&y| s.dist(x, y) < Dist::int(r)));
        let v = disjointness_violation(&fam, &q(r)).unwrap();
        prop_assert_eq!(v.is_some(), close);
        if let Some(v) = v {
            prop_assert!(v.distance < Dist::int(r));
            prop_assert_eq!(s.dist(v.points.0, v.points.1), v.distance);
        }
    }
}

fn table(d: &[&[i64]]) -> Vec<Vec<Dist>> {
    d.iter().map(|row| row.iter().map(|&x| if x < 0 { Dist::Infinite } else { Dist::int(x) }).collect()).collect()
}

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

#[test]
fn bad_matrices_are_rejected() {
    let bad = [
        table(&[&[0, 1], &[2, 0]]),
        table(&[&[0, 0], &[0, 0]]),
        table(&[&[0, 1, 5], &[1, 0, 1], &[5, 1, 0]]),
        table(&[&[1, 1], &[1, 0]]),
    ];
    for d in bad {
        let n = d.len();
        assert!(matches!(FiniteMetricSpace::from_matrix(ids(n), d), Err(Error::InvalidMetric(_))));
    }
}

#[test]
fn infinite_distances_split_components() {
    let d = table(&[&[0, 1, -1], &[1, 0, -1], &[-1, -1, 0]]);
    let s = FiniteMetricSpace::from_matrix(ids(3), d).unwrap();
    assert!(matches!(s.diameter(), Err(Error::InfiniteDiameter)));
    assert_eq!(s.diameter_of(&[0, 1].into_iter().collect()).unwrap(), q(1));
}

#[test]
fn rational_distances() {
    let h = Dist::Finite(Q::new(1, 2));
    let d = vec![vec![Dist::ZERO, h], vec![h, Dist::ZERO]];
    let s = FiniteMetricSpace::from_matrix(ids(2), d).unwrap();
    assert!(!s.is_separated());
    assert_eq!(s.diameter().unwrap(), Q::new(1, 2));
}
