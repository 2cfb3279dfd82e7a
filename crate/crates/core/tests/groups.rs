use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use coarse_decomp::groups::{
    abelian_length, ball, ball_with_cap, coset_partition, weighted_abelian_length, GroupSpec, LampElement, LampGroup,
    SubgroupSelector,
};
use coarse_decomp::metric::io::{space_from_json, space_to_json};
use coarse_decomp::metric::{disjointness_violation, q, Dist};
use coarse_decomp::Error;
use proptest::prelude::*;

type Lamp = (i64, BTreeSet<i64>);

/// Word lengths in `Z/2 ≀ Z` by breadth-first search from the identity.
fn lamp_lengths(radius: usize) -> HashMap<Lamp, usize> {
    let start: Lamp = (0, BTreeSet::new());
    let mut len = HashMap::from([(start.clone(), 0)]);
    let mut queue = VecDeque::from([start]);
    while let Some((c, lamps)) = queue.pop_front() {
        let d = len[&(c, lamps.clone())];
        if d == radius {
            continue;
        }
        let mut toggled = lamps.clone();
        if !toggled.remove(&c) {
            toggled.insert(c);
        }
        for next in [(c + 1, lamps.clone()), (c - 1, lamps.clone()), (c, toggled)] {
            if !len.contains_key(&next) {
                len.insert(next.clone(), d + 1);
                queue.push_back(next);
            }
        }
    }
    len
}

fn as_lamp(e: &LampElement) -> Lamp {
    (e.cursor, e.lamps.keys().copied().collect())
}

/// `g⁻¹h` computed on the pair representation.
fn lamp_relative(g: &Lamp, h: &Lamp) -> Lamp {
    let lit = g.1.symmetric_difference(&h.1).map(|x| x - g.0).collect();
    (h.0 - g.0, lit)
}

#[test]
fn lamplighter_distances_match_bfs() {
    let b = ball(&GroupSpec::lamplighter_z2(), &q(4)).unwrap();
    let oracle = lamp_lengths(8);
    let elems: Vec<Lamp> = b.elements().unwrap().iter().map(|e| as_lamp(e.as_lamp().unwrap())).collect();
    let expected: HashSet<&Lamp> = oracle.iter().filter(|(_, &d)| d <= 4).map(|(g, _)| g).collect();
    assert_eq!(elems.iter().collect::<HashSet<_>>(), expected);
    for (i, g) in elems.iter().enumerate() {
        for (j, h) in elems.iter().enumerate() {
            assert_eq!(b.dist(i, j), Dist::int(oracle[&lamp_relative(g, h)] as i64), "{g:?} {h:?}");
        }
    }
}

#[test]
fn lamplighter_closed_length() {
    for (g, d) in lamp_lengths(7) {
        let e = LampElement::new(g.0, g.1.iter().map(|&x| (x, 1)), LampGroup::Cyclic(2));
        assert_eq!(e.length(LampGroup::Cyclic(2)), d as i64, "{g:?}");
    }
}

#[test]
fn weighted_sum_distances() {
    let b = ball(&GroupSpec::WeightedDirectSum { cutoff: 6 }, &q(6)).unwrap();
    let elems: Vec<&[i64]> = b.elements().unwrap().iter().map(|e| e.as_vector().unwrap()).collect();
    for (i, g) in elems.iter().enumerate() {
        assert!(weighted_abelian_length(g) <= 6);
        for (j, h) in elems.iter().enumerate() {
            let diff: Vec<i64> = g.iter().zip(h.iter()).map(|(a, b)| b - a).collect();
            assert_eq!(b.dist(i, j), Dist::int(weighted_abelian_length(&diff)));
        }
    }
}

#[test]
fn ball_sizes_and_errors() {
    // octahedral numbers
    for r in 0..=6i64 {
        let n = ball(&GroupSpec::zn(3), &q(r)).unwrap().len() as i64;
        assert_eq!(n, (2 * r + 1) * (2 * r * r + 2 * r + 3) / 3);
    }
    assert!(matches!(ball_with_cap(&GroupSpec::zn(3), &q(8), 100), Err(Error::BallTooLarge { cap: 100 })));
    assert!(matches!(ball(&GroupSpec::zn(2), &q(-1)), Err(Error::BadParams(_))));
    assert!(matches!(ball(&GroupSpec::zn(0), &q(1)), Err(Error::BadParams(_))));
    let w = GroupSpec::FreeAbelian { n: 2, weights: Some(vec![1, 0]) };
    assert!(matches!(ball(&w, &q(1)), Err(Error::BadParams(_))));
}

#[test]
fn unipotent_balls_are_full_degree_boxes() {
    let b = ball(&GroupSpec::unipotent_f2(4), &q(4)).unwrap();
    assert_eq!(b.len(), 32);
    let b = ball(&GroupSpec::unipotent_f2(2), &q(3)).unwrap();
    assert_eq!(b.len(), 8);
    for e in b.elements().unwrap() {
        assert!(e.as_matrix().unwrap().is_upper_unipotent());
    }
}

#[test]
fn generated_spaces_round_trip() {
    let b = ball(&GroupSpec::lamplighter_z2(), &q(3)).unwrap();
    let back = space_from_json(&space_to_json(&b)).unwrap();
    assert_eq!(back.ids(), b.ids());
}

proptest! {
    #[test]
    fn abelian_length_is_a_norm(a in prop::collection::vec(-20i64..=20, 3), b in prop::collection::vec(-20i64..=20, 3),
                                w in prop::collection::vec(1i64..=5, 3)) {
        let sum: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let neg: Vec<i64> = a.iter().map(|x| -x).collect();
        prop_assert!(abelian_length(&sum, &w) <= abelian_length(&a, &w) + abelian_length(&b, &w));
        prop_assert_eq!(abelian_length(&neg, &w), abelian_length(&a, &w));
        prop_assert_eq!(abelian_length(&a, &w) == 0, a.iter().all(|&x| x == 0));
    }

    #[test]
    fn first_coordinate_cosets_are_separated(n in 1usize..5) {
        let b = Arc::new(ball(&GroupSpec::WeightedDirectSum { cutoff: 6 }, &q(6)).unwrap());
        let fam = coset_partition(&b, &SubgroupSelector::FirstCoordinates { n }).unwrap();
        prop_assert!(disjointness_violation(&fam, &q(n as i64 + 1)).unwrap().is_none());
        let total: usize = fam.members.iter().map(|m| m.points.len()).sum();
        prop_assert_eq!(total, b.len());
    }
}
