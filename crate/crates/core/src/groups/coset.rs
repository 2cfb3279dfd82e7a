use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::GroupElement;
use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, MetricFamily, PointSet};

/// Subgroups whose left cosets can be read off element coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubgroupSelector {
    /// The coordinate subgroup spanned by `e_1, …, e_n`.
    FirstCoordinates { n: usize },
    /// The coordinate subgroup spanned by the listed (0-based) coordinates.
    Coordinates { free: Vec<usize> },
    /// Kernel of the cursor-position homomorphism of a lamplighter group.
    PositionKernel,
}

impl SubgroupSelector {
    /// Key identifying the left coset `gH` of an element.
    pub fn coset_key(&self, g: &GroupElement) -> Result<Vec<i64>> {
        match (self, g) {
            (SubgroupSelector::FirstCoordinates { n }, GroupElement::Vector(v)) => {
                Ok(v.iter().skip(*n).copied().collect())
            }
            (SubgroupSelector::Coordinates { free }, GroupElement::Vector(v)) => {
                if let Some(&bad) = free.iter().find(|&&i| i >= v.len()) {
                    return Err(Error::UnsupportedSubgroup(format!("coordinate {bad} out of range")));
                }
                Ok(v.iter().enumerate().filter(|(i, _)| !free.contains(i)).map(|(_, &x)| x).collect())
            }
            (SubgroupSelector::PositionKernel, GroupElement::Lamp(l)) => Ok(vec![l.cursor]),
            _ => Err(Error::UnsupportedSubgroup(format!("{self:?} on this group"))),
        }
    }
}

/// Intersections of the ball with the left cosets of the selected
/// subgroup, ordered by coset key.
pub fn coset_partition(ball: &Arc<FiniteMetricSpace>, selector: &SubgroupSelector) -> Result<MetricFamily> {
    let elems = ball
        .elements()
        .ok_or_else(|| Error::UnsupportedSubgroup("space carries no group elements".into()))?;
    let mut classes: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for (i, g) in elems.iter().enumerate() {
        classes.entry(selector.coset_key(g)?).or_default().push(i);
    }
    MetricFamily::from_sets(ball, classes.into_values().map(PointSet::new).collect())
}
