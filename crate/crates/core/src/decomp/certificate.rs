use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{fmt_q, Dist, FiniteMetricSpace, PointSet, Q};

/// Reports stop collecting violations after this many.
pub const MAX_VIOLATIONS: usize = 100;

/// The two parts of one member's decomposition at a given challenge.
///
/// The next family lists, member by member, the `part0` pieces followed by
/// the `part1` pieces; that order is the provenance of each new member.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MemberStep {
    pub part0: Vec<PointSet>,
    pub part1: Vec<PointSet>,
}

impl MemberStep {
    pub fn trivial(member: &PointSet) -> Self {
        MemberStep { part0: vec![member.clone()], part1: vec![] }
    }

    pub fn pieces(&self) -> impl Iterator<Item = &PointSet> {
        self.part0.iter().chain(&self.part1)
    }

    pub fn part(&self, k: usize) -> &[PointSet] {
        if k == 0 {
            &self.part0
        } else {
            &self.part1
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub r: Q,
    pub members: Vec<MemberStep>,
}

impl Step {
    /// The family this step produces.
    pub fn output(&self) -> Vec<PointSet> {
        self.members.iter().flat_map(|m| m.pieces().cloned()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct DecompositionCertificate {
    pub ambient: Arc<FiniteMetricSpace>,
    pub initial: Vec<PointSet>,
    pub steps: Vec<Step>,
    pub bound: Q,
}

impl DecompositionCertificate {
    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    /// The families `Y_0, …, Y_n`, or an error when a step does not have one
    /// entry per member of the previous family.
    pub fn families(&self) -> Result<Vec<Vec<PointSet>>> {
        let mut fams = vec![self.initial.clone()];
        for (i, s) in self.steps.iter().enumerate() {
            let prev = fams.last().expect("nonempty");
            if s.members.len() != prev.len() {
                return Err(Error::MalformedCertificate(format!(
                    "step {i} decomposes {} members but the family has {}",
                    s.members.len(),
                    prev.len()
                )));
            }
            fams.push(s.output());
        }
        Ok(fams)
    }

    pub fn final_family(&self) -> Result<Vec<PointSet>> {
        Ok(self.families()?.pop().expect("nonempty"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub code: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub member: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub part: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pieces: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<(String, String)>,
    pub detail: String,
}

impl Violation {
    fn new(code: &'static str, detail: String) -> Self {
        Violation { code, step: None, member: None, part: None, pieces: None, points: None, detail }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub valid: bool,
    pub depth: usize,
    pub violations: Vec<Violation>,
    pub truncated: bool,
}

/// Checks bounds of every index and the shape of every step.
fn check_references(cert: &DecompositionCertificate) -> Result<()> {
    let n = cert.ambient.len();
    let bad = |ctx: String| Error::MalformedCertificate(format!("dangling point index in {ctx}"));
    for (k, s) in cert.initial.iter().enumerate() {
        if s.iter().any(|&p| p >= n) {
            return Err(bad(format!("initial member {k}")));
        }
    }
    for (i, st) in cert.steps.iter().enumerate() {
        for (j, m) in st.members.iter().enumerate() {
            if m.pieces().any(|s| s.iter().any(|&p| p >= n)) {
                return Err(bad(format!("step {i} member {j}")));
            }
        }
    }
    cert.families().map(|_| ())
}

/// Pairs of pieces in one part at distance `< r`, with a witnessing pair.
pub fn part_conflicts(space: &FiniteMetricSpace, pieces: &[PointSet], r: &Q) -> Vec<(usize, usize, usize, usize, Dist)> {
    let bound = Dist::Finite(*r);
    let mut out = Vec::new();
    for a in 0..pieces.len() {
        for b in a + 1..pieces.len() {
            let hit = pieces[a]
                .iter()
                .find_map(|&x| pieces[b].iter().find(|&&y| space.dist(x, y) < bound).map(|&y| (x, y)));
            if let Some((x, y)) = hit {
                out.push((a, b, x, y, space.dist(x, y)));
            }
        }
    }
    out
}

/// Violations of one member's step: covering, containment, set-disjointness
/// within each part and `r`-disjointness within each part.
pub fn step_violations(space: &FiniteMetricSpace, member: &PointSet, ms: &MemberStep, r: &Q) -> Vec<Violation> {
    let mut v = Vec::new();
    let id = |p: usize| space.id(p).to_string();
    let mut covered = PointSet::default();
    for (k, part) in [&ms.part0, &ms.part1].into_iter().enumerate() {
        for (a, piece) in part.iter().enumerate() {
            if let Some(&p) = piece.iter().find(|&&p| !member.contains(p)) {
                v.push(Violation {
                    part: Some(k),
                    pieces: Some((a, a)),
                    points: Some((id(p), id(p))),
                    ..Violation::new("PIECE_OUTSIDE_MEMBER", format!("point {} is not in the member", id(p)))
                });
            }
            covered = covered.union(piece);
        }
        for a in 0..part.len() {
            for b in a + 1..part.len() {
                if let Some(&p) = part[a].iter().find(|&&p| part[b].contains(p)) {
                    v.push(Violation {
                        part: Some(k),
                        pieces: Some((a, b)),
                        points: Some((id(p), id(p))),
                        ..Violation::new("OVERLAP_VIOLATION", format!("pieces {a} and {b} share {}", id(p)))
                    });
                }
            }
        }
        for (a, b, x, y, d) in part_conflicts(space, part, r) {
            v.push(Violation {
                part: Some(k),
                pieces: Some((a, b)),
                points: Some((id(x), id(y))),
                ..Violation::new(
                    "R_DISJOINT_VIOLATION",
                    format!("pieces {a} and {b} are at distance {d} < {}", fmt_q(r)),
                )
            });
        }
    }
    if let Some(&p) = member.iter().find(|&&p| !covered.contains(p)) {
        v.push(Violation {
            points: Some((id(p), id(p))),
            ..Violation::new("COVER_VIOLATION", format!("point {} is not covered by either part", id(p)))
        });
    }
    v
}

pub fn verify_certificate(cert: &DecompositionCertificate) -> Result<VerifyReport> {
    check_references(cert)?;
    let fams = cert.families()?;
    let mut violations = Vec::new();
    for (i, st) in cert.steps.iter().enumerate() {
        if st.r <= Q::from_integer(0) {
            violations.push(Violation {
                step: Some(i),
                ..Violation::new("NONPOSITIVE_CHALLENGE", format!("challenge {} is not positive", fmt_q(&st.r)))
            });
        }
        let per_member: Vec<Vec<Violation>> = st
            .members
            .par_iter()
            .zip(fams[i].par_iter())
            .enumerate()
            .map(|(j, (ms, member))| {
                step_violations(&cert.ambient, member, ms, &st.r)
                    .into_iter()
                    .map(|mut x| {
                        x.step = Some(i);
                        x.member = Some(j);
                        x
                    })
                    .collect()
            })
            .collect();
        violations.extend(per_member.into_iter().flatten());
        if violations.len() > MAX_VIOLATIONS {
            break;
        }
    }
    let last = fams.last().expect("nonempty");
    for (j, m) in last.iter().enumerate() {
        let diam = cert.ambient.diameter_of(m);
        let ok = matches!(diam, Ok(d) if d <= cert.bound);
        if !ok {
            let shown = diam.map(|d| fmt_q(&d)).unwrap_or_else(|_| "inf".into());
            violations.push(Violation {
                member: Some(j),
                ..Violation::new(
                    "BOUND_VIOLATION",
                    format!("final member {j} has diameter {shown} > {}", fmt_q(&cert.bound)),
                )
            });
        }
    }
    let truncated = violations.len() > MAX_VIOLATIONS;
    violations.truncate(MAX_VIOLATIONS);
    Ok(VerifyReport { valid: violations.is_empty(), depth: cert.depth(), violations, truncated })
}
