use std::sync::Arc;

use super::certificate::{step_violations, DecompositionCertificate, Step, Violation};
use crate::error::{Error, Result};
use crate::metric::{fmt_q, FiniteMetricSpace, PointSet, Q};

#[derive(Clone, Debug)]
pub struct TreeEdge {
    pub r: Q,
    pub step: Step,
    pub child: usize,
}

#[derive(Clone, Debug)]
pub struct TreeNode {
    pub family: Vec<PointSet>,
    /// Set on vertices where some played game ended.
    pub bound: Option<Q>,
    pub children: Vec<TreeEdge>,
}

/// Transcript summary of games played from one family. Node 0 is the root;
/// children always have larger indices than their parents.
#[derive(Clone, Debug)]
pub struct StrategyTree {
    pub ambient: Arc<FiniteMetricSpace>,
    pub nodes: Vec<TreeNode>,
}

impl StrategyTree {
    pub fn new(ambient: Arc<FiniteMetricSpace>, root: Vec<PointSet>) -> Self {
        StrategyTree { ambient, nodes: vec![TreeNode { family: root, bound: None, children: vec![] }] }
    }

    pub fn leaf(ambient: Arc<FiniteMetricSpace>, root: Vec<PointSet>, bound: Q) -> Self {
        let mut t = Self::new(ambient, root);
        t.nodes[0].bound = Some(bound);
        t
    }

    /// Adds the child reached from `parent` through `step`.
    pub fn add_child(&mut self, parent: usize, step: Step) -> usize {
        let child = self.nodes.len();
        self.nodes.push(TreeNode { family: step.output(), bound: None, children: vec![] });
        self.nodes[parent].children.push(TreeEdge { r: step.r, step, child });
        child
    }

    pub fn set_bound(&mut self, node: usize, bound: Q) {
        let b = &mut self.nodes[node].bound;
        *b = Some(b.map_or(bound, |old| old.max(bound)));
    }

    /// Merges a certificate along its challenge sequence.
    pub fn insert_certificate(&mut self, cert: &DecompositionCertificate) -> Result<()> {
        if cert.ambient.uid() != self.ambient.uid() {
            return Err(Error::AmbientMismatch);
        }
        if cert.initial != self.nodes[0].family {
            return Err(Error::MalformedCertificate("certificate starts from a different family".into()));
        }
        let mut v = 0;
        for step in &cert.steps {
            let next = self.nodes[v].children.iter().find(|e| e.r == step.r);
            v = match next {
                Some(e) if e.step == *step => e.child,
                Some(_) => {
                    return Err(Error::MalformedCertificate(format!(
                        "two different steps for challenge {}",
                        fmt_q(&step.r)
                    )))
                }
                None => self.add_child(v, step.clone()),
            };
        }
        self.set_bound(v, cert.bound);
        Ok(())
    }

    pub fn from_certificates(certs: &[DecompositionCertificate]) -> Result<Self> {
        let first = certs.first().ok_or_else(|| Error::BadParams("no certificates".into()))?;
        let mut t = Self::new(first.ambient.clone(), first.initial.clone());
        for c in certs {
            t.insert_certificate(c)?;
        }
        Ok(t)
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.nodes[v].children.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct TreeReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

/// Checks every edge as a decomposition step and every leaf against its bound.
pub fn verify_tree(tree: &StrategyTree) -> Result<TreeReport> {
    let n = tree.ambient.len();
    let mut violations = Vec::new();
    for (v, node) in tree.nodes.iter().enumerate() {
        if node.family.iter().any(|s| s.iter().any(|&p| p >= n)) {
            return Err(Error::MalformedCertificate(format!("vertex {v} references a missing point")));
        }
        for e in &node.children {
            if e.child <= v || e.child >= tree.nodes.len() {
                return Err(Error::MalformedCertificate(format!("edge from {v} to {} breaks the order", e.child)));
            }
            if e.step.members.len() != node.family.len() || tree.nodes[e.child].family != e.step.output() {
                return Err(Error::MalformedCertificate(format!("edge {v} -> {} does not match its labels", e.child)));
            }
            for (j, (ms, member)) in e.step.members.iter().zip(&node.family).enumerate() {
                violations.extend(step_violations(&tree.ambient, member, ms, &e.r).into_iter().map(|mut x| {
                    x.step = Some(e.child);
                    x.member = Some(j);
                    x
                }));
            }
        }
        if node.children.is_empty() {
            let bounded = match &node.bound {
                Some(b) => node.family.iter().all(|m| matches!(tree.ambient.diameter_of(m), Ok(d) if d <= *b)),
                None => false,
            };
            if !bounded {
                violations.push(Violation {
                    code: "BOUND_VIOLATION",
                    step: Some(v),
                    member: None,
                    part: None,
                    pieces: None,
                    points: None,
                    detail: format!("leaf {v} is not bounded by its label"),
                });
            }
        }
    }
    Ok(TreeReport { valid: violations.is_empty(), violations })
}

/// `α_v = 0` on leaves and `max α_w + 1` over the children otherwise.
pub fn tree_rank(tree: &StrategyTree) -> usize {
    let mut rank = vec![0usize; tree.nodes.len()];
    for v in (0..tree.nodes.len()).rev() {
        rank[v] = tree.nodes[v].children.iter().map(|e| rank[e.child] + 1).max().unwrap_or(0);
    }
    rank[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::MemberStep;
    use crate::metric::q;

    fn tiny() -> (Arc<FiniteMetricSpace>, PointSet) {
        let z = Arc::new(FiniteMetricSpace::integer_interval(0, 3));
        let all = z.all_points();
        (z, all)
    }

    fn step(member: &PointSet, r: i64) -> Step {
        Step { r: q(r), members: vec![MemberStep::trivial(member)] }
    }

    #[test]
    fn ranks() {
        let (z, all) = tiny();
        let t = StrategyTree::leaf(z.clone(), vec![all.clone()], q(3));
        assert_eq!(tree_rank(&t), 0);

        let mut t = StrategyTree::new(z.clone(), vec![all.clone()]);
        let a = t.add_child(0, step(&all, 1));
        let b = t.add_child(0, step(&all, 2));
        t.set_bound(a, q(3));
        t.set_bound(b, q(3));
        assert_eq!(tree_rank(&t), 1);
        assert!(verify_tree(&t).unwrap().valid);

        let mut t = StrategyTree::new(z, vec![all.clone()]);
        let a = t.add_child(0, step(&all, 1));
        let b = t.add_child(a, step(&all, 1));
        t.set_bound(b, q(3));
        assert_eq!(tree_rank(&t), 2);
    }

    #[test]
    fn unbounded_leaf_fails() {
        let (z, all) = tiny();
        let t = StrategyTree::leaf(z, vec![all], q(2));
        assert!(!verify_tree(&t).unwrap().valid);
    }
}
