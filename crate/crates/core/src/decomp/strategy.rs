use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::certificate::{part_conflicts, MemberStep};
use crate::error::{Error, Result};
use crate::groups::{vector_space, GroupElement, GroupSpec, SubgroupSelector};
use crate::metric::{ceil_q, fmt_q, Dist, FiniteMetricSpace, PointSet, SpaceOrigin, Q};
use crate::norms::{AnyElem, AnyMatrix, Norm, NormValue};

/// Integer-valued point functions used as slab heights.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Height {
    /// Coordinate of a vector element; on spaces without elements, index 0
    /// reads the point id as an integer.
    Coordinate { index: usize },
    /// Cursor of a lamplighter element.
    Cursor,
    /// The point id read as an integer.
    Id,
    /// Values keyed by point id.
    Explicit { values: BTreeMap<String, i64> },
}

impl Height {
    pub fn eval(&self, space: &FiniteMetricSpace, p: usize) -> Result<i64> {
        let parse_id = || {
            space
                .id(p)
                .parse::<i64>()
                .map_err(|_| Error::BadParams(format!("point id {:?} is not an integer", space.id(p))))
        };
        match self {
            Height::Coordinate { index } => match space.elements().map(|e| &e[p]) {
                Some(GroupElement::Vector(v)) => v
                    .get(*index)
                    .copied()
                    .ok_or_else(|| Error::BadParams(format!("coordinate {index} out of range"))),
                None if *index == 0 => parse_id(),
                _ => Err(Error::BadParams("coordinate height needs vector points".into())),
            },
            Height::Cursor => match space.elements().map(|e| &e[p]) {
                Some(GroupElement::Lamp(l)) => Ok(l.cursor),
                _ => Err(Error::BadParams("cursor height needs lamplighter points".into())),
            },
            Height::Id => parse_id(),
            Height::Explicit { values } => values
                .get(space.id(p))
                .copied()
                .ok_or_else(|| Error::BadParams(format!("no height for point {:?}", space.id(p)))),
        }
    }
}

/// 1-Lipschitz maps to a free abelian group, used for fibering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FiberMap {
    /// Lamplighter cursor position, onto `Z`.
    Cursor,
    /// Projection of vector points onto the listed coordinates.
    Coordinates { keep: Vec<usize> },
}

impl FiberMap {
    fn image(&self, space: &FiniteMetricSpace, p: usize) -> Result<Vec<i64>> {
        match (self, space.elements().map(|e| &e[p])) {
            (FiberMap::Cursor, Some(GroupElement::Lamp(l))) => Ok(vec![l.cursor]),
            (FiberMap::Coordinates { keep }, Some(GroupElement::Vector(v))) => keep
                .iter()
                .map(|&i| v.get(i).copied().ok_or_else(|| Error::BadParams(format!("coordinate {i} out of range"))))
                .collect(),
            _ => Err(Error::BadParams(format!("{self:?} does not apply to these points"))),
        }
    }

    fn weights(&self, space: &FiniteMetricSpace) -> Vec<i64> {
        match self {
            FiberMap::Cursor => vec![1],
            FiberMap::Coordinates { keep } => {
                let all = match space.origin() {
                    SpaceOrigin::Group { spec, .. } => spec.weights().ok(),
                    SpaceOrigin::Explicit => None,
                };
                keep.iter().map(|&i| all.as_ref().and_then(|w| w.get(i).copied()).unwrap_or(1)).collect()
            }
        }
    }
}

/// How a coset strategy picks its subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CosetSelector {
    Fixed { subgroup: SubgroupSelector },
    /// Cosets of the span of the first `⌈r⌉` coordinates of a weighted sum,
    /// which are `r`-disjoint because `e_i` has length `i`.
    FirstCoordinatesAdaptive,
    /// Lamplighter classes agreeing off the window `[lo − m, hi + m]`, where
    /// `[lo, hi]` is the member's cursor range and `m = ⌈r/2⌉`.
    LampWindow,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Strategy {
    /// Components of the `< r` graph; a member is finished once its
    /// diameter is below the challenge.
    GreedyComponents,
    IntervalSlabs { height: Height },
    /// Runs each component strategy to completion, in order.
    Product { parts: Vec<Strategy> },
    /// One step of coset pieces, then `then` on each piece. Without `then`,
    /// pieces continue with slabs on the free coordinates, or finish.
    Coset {
        selector: CosetSelector,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        then: Option<Box<Strategy>>,
    },
    UnipotentCosets { theta: String, norm: Norm },
    /// Decomposes the image under `map` with `base` and pulls the pieces
    /// back; once the base finishes, each preimage continues with `fiber`.
    Fibering { map: FiberMap, base: Box<Strategy>, fiber: Box<Strategy> },
    Done,
}

/// One member's step together with the strategy each piece continues with,
/// in piece order (`part0` then `part1`).
pub type Outcome = (MemberStep, Vec<Strategy>);

impl Strategy {
    pub fn product_of_slabs(coords: impl IntoIterator<Item = usize>) -> Strategy {
        Strategy::seq(coords.into_iter().map(|i| Strategy::IntervalSlabs { height: Height::Coordinate { index: i } }).collect())
    }

    /// Normalized sequence: `Done` parts are dropped.
    pub fn seq(parts: Vec<Strategy>) -> Strategy {
        let mut parts: Vec<Strategy> = parts.into_iter().filter(|p| *p != Strategy::Done).collect();
        match parts.len() {
            0 => Strategy::Done,
            1 => parts.pop().expect("one part"),
            _ => Strategy::Product { parts },
        }
    }

    /// Built-in strategy for a generated ball.
    pub fn default_for(spec: &GroupSpec) -> Strategy {
        match spec {
            GroupSpec::FreeAbelian { n, .. } => Strategy::product_of_slabs((0..*n).rev()),
            GroupSpec::WeightedDirectSum { .. } => {
                Strategy::Coset { selector: CosetSelector::FirstCoordinatesAdaptive, then: None }
            }
            GroupSpec::Lamplighter { .. } => Strategy::Fibering {
                map: FiberMap::Cursor,
                base: Box::new(Strategy::IntervalSlabs { height: Height::Coordinate { index: 0 } }),
                fiber: Box::new(Strategy::Coset { selector: CosetSelector::LampWindow, then: None }),
            },
            GroupSpec::Matrix(m) => Strategy::UnipotentCosets { theta: "X".into(), norm: m.length.clone() },
        }
    }

    /// Whether a member in this state counts as finished before facing `r`.
    pub fn is_terminal(&self, space: &FiniteMetricSpace, member: &PointSet, r: &Q) -> Result<bool> {
        Ok(match self {
            Strategy::Done => true,
            _ if member.len() <= 1 => true,
            Strategy::GreedyComponents => space.diameter_of(member).map(|d| d < *r).unwrap_or(false),
            _ => false,
        })
    }

    pub fn step(&self, space: &Arc<FiniteMetricSpace>, member: &PointSet, r: &Q) -> Result<Outcome> {
        match self {
            Strategy::Done => Ok((MemberStep::trivial(member), vec![Strategy::Done])),
            Strategy::GreedyComponents => {
                let ms = greedy_components(space, member, r)?;
                let n = ms.part0.len();
                Ok((ms, vec![Strategy::GreedyComponents; n]))
            }
            Strategy::IntervalSlabs { height } => {
                let ms = strategy_interval_slabs(space, member, height, r)?;
                let n = ms.part0.len() + ms.part1.len();
                Ok((ms, vec![Strategy::Done; n]))
            }
            Strategy::Product { parts } => {
                let Some((first, rest)) = parts.split_first() else {
                    return Strategy::Done.step(space, member, r);
                };
                let (ms, conts) = first.step(space, member, r)?;
                let conts = conts
                    .into_iter()
                    .map(|c| Strategy::seq(std::iter::once(c).chain(rest.iter().cloned()).collect()))
                    .collect();
                Ok((ms, conts))
            }
            Strategy::Coset { selector, then } => coset_step(space, member, selector, then.as_deref(), r),
            Strategy::UnipotentCosets { theta, norm } => {
                let ms = strategy_unipotent_cosets(space, member, theta, norm, r)?;
                let n = ms.part0.len();
                Ok((ms, vec![Strategy::Done; n]))
            }
            Strategy::Fibering { map, base, fiber } => fibering_step(space, member, map, base, fiber, r),
        }
    }
}

fn stuck(msg: String) -> Error {
    Error::StrategyStuck(msg)
}

fn greedy_components(space: &FiniteMetricSpace, member: &PointSet, r: &Q) -> Result<MemberStep> {
    let pts = member.as_slice();
    let bound = Dist::Finite(*r);
    let mut comp = vec![usize::MAX; pts.len()];
    let mut pieces = Vec::new();
    for s in 0..pts.len() {
        if comp[s] != usize::MAX {
            continue;
        }
        let c = pieces.len();
        comp[s] = c;
        let mut stack = vec![s];
        let mut piece = Vec::new();
        while let Some(a) = stack.pop() {
            piece.push(pts[a]);
            for b in 0..pts.len() {
                if comp[b] == usize::MAX && space.dist(pts[a], pts[b]) < bound {
                    comp[b] = c;
                    stack.push(b);
                }
            }
        }
        pieces.push(PointSet::new(piece));
    }
    if pieces.len() <= 1 && pts.len() > 1 {
        return Err(stuck(format!("member of {} points is connected at scale {}", pts.len(), fmt_q(r))));
    }
    Ok(MemberStep { part0: pieces, part1: vec![] })
}

/// Even slabs of width `R = ⌈r⌉` go to `part0` and odd slabs to `part1`.
/// Slab `k` holds the points with `h_min + kR ≤ h < h_min + (k+1)R`.
pub fn strategy_interval_slabs(space: &FiniteMetricSpace, member: &PointSet, height: &Height, r: &Q) -> Result<MemberStep> {
    let pts = member.as_slice();
    let h: Vec<i64> = pts.iter().map(|&p| height.eval(space, p)).collect::<Result<_>>()?;
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            if Dist::int((h[a] - h[b]).abs()) > space.dist(pts[a], pts[b]) {
                return Err(Error::NotLipschitz(format!(
                    "|h({}) - h({})| = {} exceeds their distance {}",
                    space.id(pts[a]),
                    space.id(pts[b]),
                    (h[a] - h[b]).abs(),
                    space.dist(pts[a], pts[b])
                )));
            }
        }
    }
    let width = ceil_q(r).max(1);
    let Some(&lo) = h.iter().min() else {
        return Ok(MemberStep::default());
    };
    let mut slabs: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (&p, &v) in pts.iter().zip(&h) {
        slabs.entry((v - lo).div_euclid(width)).or_default().push(p);
    }
    let mut ms = MemberStep::default();
    for (k, s) in slabs {
        let part = if k % 2 == 0 { &mut ms.part0 } else { &mut ms.part1 };
        part.push(PointSet::new(s));
    }
    Ok(ms)
}

/// `k = ⌊r / e_θ⌋ + 1`, the least `k` with `k·e_θ > r`.
pub fn unipotent_coset_level(theta: &AnyElem, norm: &Norm, r: &Q) -> Result<i64> {
    match theta.norm(norm)? {
        NormValue::Exp(e) if e > 0 => Ok((r / Q::from_integer(e)).floor().to_integer() + 1),
        NormValue::Abs(_) => Err(Error::BadParams("unipotent cosets need a discrete norm".into())),
        _ => Err(Error::ThetaNotExpanding),
    }
}

/// Pieces are the member's intersections with the left cosets of `U_k`.
pub fn strategy_unipotent_cosets(
    space: &FiniteMetricSpace,
    member: &PointSet,
    theta: &str,
    norm: &Norm,
    r: &Q,
) -> Result<MemberStep> {
    let elems = space.elements().ok_or_else(|| Error::BadParams("unipotent cosets need matrix points".into()))?;
    let mats: Vec<&AnyMatrix> = member
        .iter()
        .map(|&p| elems[p].as_matrix().ok_or_else(|| Error::BadParams("unipotent cosets need matrix points".into())))
        .collect::<Result<_>>()?;
    let Some(first) = mats.first() else {
        return Ok(MemberStep::default());
    };
    let theta = AnyElem::parse(first.field(), theta)?;
    let k = unipotent_coset_level(&theta, norm, r)?;
    // representatives' inverses, one per class
    let mut reps: Vec<(AnyMatrix, Vec<usize>)> = Vec::new();
    for (&p, m) in member.iter().zip(&mats) {
        if !m.is_upper_unipotent() {
            return Err(Error::NotUnipotent);
        }
        let mut placed = false;
        for (inv, class) in reps.iter_mut() {
            if inv.mul(m)?.unipotent_level(&theta, norm)? <= k {
                class.push(p);
                placed = true;
                break;
            }
        }
        if !placed {
            reps.push((m.inverse()?, vec![p]));
        }
    }
    Ok(MemberStep { part0: reps.into_iter().map(|(_, c)| PointSet::new(c)).collect(), part1: vec![] })
}

fn coset_step(
    space: &Arc<FiniteMetricSpace>,
    member: &PointSet,
    selector: &CosetSelector,
    then: Option<&Strategy>,
    r: &Q,
) -> Result<Outcome> {
    let elems = space.elements().ok_or_else(|| Error::UnsupportedSubgroup("space carries no group elements".into()))?;
    let mut classes: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    let default_then;
    match selector {
        CosetSelector::Fixed { subgroup } => {
            for &p in member.iter() {
                classes.entry(subgroup.coset_key(&elems[p])?).or_default().push(p);
            }
            default_then = match subgroup {
                SubgroupSelector::FirstCoordinates { n } => Strategy::product_of_slabs(0..*n),
                SubgroupSelector::Coordinates { free } => Strategy::product_of_slabs(free.iter().copied()),
                SubgroupSelector::PositionKernel => Strategy::Done,
            };
        }
        CosetSelector::FirstCoordinatesAdaptive => {
            let dim = member.iter().next().and_then(|&p| elems[p].as_vector()).map_or(0, |v| v.len());
            let n = (ceil_q(r).max(1) as usize).min(dim);
            let sub = SubgroupSelector::FirstCoordinates { n };
            for &p in member.iter() {
                classes.entry(sub.coset_key(&elems[p])?).or_default().push(p);
            }
            default_then = Strategy::product_of_slabs(0..n);
        }
        CosetSelector::LampWindow => {
            let lamps: Vec<_> = member
                .iter()
                .map(|&p| {
                    elems[p]
                        .as_lamp()
                        .ok_or_else(|| Error::UnsupportedSubgroup("lamp windows need lamplighter points".into()))
                })
                .collect::<Result<_>>()?;
            let lo = lamps.iter().map(|l| l.cursor).min().unwrap_or(0);
            let hi = lamps.iter().map(|l| l.cursor).max().unwrap_or(0);
            let m = ceil_q(&(r / Q::from_integer(2))).max(0);
            let (a, b) = (lo - m, hi + m);
            for (&p, l) in member.iter().zip(&lamps) {
                let key: Vec<i64> =
                    l.lamps.iter().filter(|(&x, _)| x < a || x > b).flat_map(|(&x, &v)| [x, v]).collect();
                classes.entry(key).or_default().push(p);
            }
            default_then = Strategy::Done;
        }
    }
    let pieces: Vec<PointSet> = classes.into_values().map(PointSet::new).collect();
    if let Some((a, b, x, y, d)) = part_conflicts(space, &pieces, r).into_iter().next() {
        return Err(stuck(format!(
            "coset pieces {a} and {b} are {d} apart at {} and {} (challenge {})",
            space.id(x),
            space.id(y),
            fmt_q(r)
        )));
    }
    let cont = then.cloned().unwrap_or(default_then);
    let n = pieces.len();
    Ok((MemberStep { part0: pieces, part1: vec![] }, vec![cont; n]))
}

fn fibering_step(
    space: &Arc<FiniteMetricSpace>,
    member: &PointSet,
    map: &FiberMap,
    base: &Strategy,
    fiber: &Strategy,
    r: &Q,
) -> Result<Outcome> {
    if *base == Strategy::Done {
        return fiber.step(space, member, r);
    }
    let pts = member.as_slice();
    let images: Vec<Vec<i64>> = pts.iter().map(|&p| map.image(space, p)).collect::<Result<_>>()?;
    let target = Arc::new(vector_space(images.clone(), map.weights(space))?);
    let at: Vec<usize> = images
        .iter()
        .map(|v| target.index_of(&GroupElement::Vector(v.clone()).to_string()).expect("image is a target point"))
        .collect();
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            if target.dist(at[a], at[b]) > space.dist(pts[a], pts[b]) {
                return Err(Error::NotLipschitz(format!(
                    "map expands the pair {}, {}",
                    space.id(pts[a]),
                    space.id(pts[b])
                )));
            }
        }
    }
    // the map is 1-Lipschitz, so the base challenge is r itself
    let (base_step, conts) = base.step(&target, &target.all_points(), r)?;
    let pull = |piece: &PointSet| -> PointSet {
        pts.iter().zip(&at).filter(|(_, t)| piece.contains(**t)).map(|(&p, _)| p).collect()
    };
    let ms = MemberStep {
        part0: base_step.part0.iter().map(pull).collect(),
        part1: base_step.part1.iter().map(pull).collect(),
    };
    let conts = conts
        .into_iter()
        .map(|c| {
            if c == Strategy::Done {
                fiber.clone()
            } else {
                Strategy::Fibering { map: map.clone(), base: Box::new(c), fiber: Box::new(fiber.clone()) }
            }
        })
        .collect();
    Ok((ms, conts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::ball;
    use crate::metric::q;

    fn set(xs: impl IntoIterator<Item = usize>) -> PointSet {
        xs.into_iter().collect()
    }

    #[test]
    fn interval_slabs_example() {
        let z = FiniteMetricSpace::integer_interval(0, 11);
        let ms = strategy_interval_slabs(&z, &z.all_points(), &Height::Id, &q(3)).unwrap();
        assert_eq!(ms.part0, vec![set(0..=2), set(6..=8)]);
        assert_eq!(ms.part1, vec![set(3..=5), set(9..=11)]);
    }

    #[test]
    fn constant_height_gives_one_piece() {
        let z = FiniteMetricSpace::integer_interval(0, 4);
        let values = z.ids().iter().map(|s| (s.clone(), 7)).collect();
        let ms = strategy_interval_slabs(&z, &z.all_points(), &Height::Explicit { values }, &q(2)).unwrap();
        assert_eq!(ms.part0, vec![z.all_points()]);
        assert!(ms.part1.is_empty());
    }

    #[test]
    fn expanding_height_is_rejected() {
        let z = FiniteMetricSpace::integer_interval(0, 4);
        let values = z.ids().iter().map(|s| (s.clone(), 2 * s.parse::<i64>().unwrap())).collect();
        let e = strategy_interval_slabs(&z, &z.all_points(), &Height::Explicit { values }, &q(2)).unwrap_err();
        assert!(matches!(e, Error::NotLipschitz(_)));
    }

    #[test]
    fn unipotent_levels_from_challenge() {
        let theta = AnyElem::parse(crate::norms::BaseField::F2, "X").unwrap();
        assert_eq!(unipotent_coset_level(&theta, &Norm::degree(), &q(2)).unwrap(), 3);
        assert_eq!(unipotent_coset_level(&theta, &Norm::degree(), &Q::new(1, 2)).unwrap(), 1);
        let one = AnyElem::parse(crate::norms::BaseField::F2, "1").unwrap();
        assert!(matches!(unipotent_coset_level(&one, &Norm::degree(), &q(2)), Err(Error::ThetaNotExpanding)));
    }

    #[test]
    fn unipotent_cosets_at_two() {
        let b = Arc::new(ball(&GroupSpec::unipotent_f2(4), &q(4)).unwrap());
        let ms = strategy_unipotent_cosets(&b, &b.all_points(), "X", &Norm::degree(), &q(2)).unwrap();
        // cosets of U_3: the X^4 coefficient of the corner entry
        assert_eq!(ms.part0.len(), 2);
        assert!(part_conflicts(&b, &ms.part0, &q(2)).is_empty());
    }

    #[test]
    fn greedy_stuck_on_connected_member() {
        let z = Arc::new(FiniteMetricSpace::integer_interval(0, 5));
        let e = Strategy::GreedyComponents.step(&z, &z.all_points(), &q(2)).unwrap_err();
        assert!(matches!(e, Error::StrategyStuck(_)));
    }

    #[test]
    fn strategies_round_trip_as_json() {
        for spec in [GroupSpec::zn(2), GroupSpec::WeightedDirectSum { cutoff: 4 }, GroupSpec::lamplighter_z2()] {
            let s = Strategy::default_for(&spec);
            let v = serde_json::to_value(&s).unwrap();
            assert_eq!(serde_json::from_value::<Strategy>(v).unwrap(), s);
        }
    }
}
