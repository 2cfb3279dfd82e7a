use super::certificate::part_conflicts;
use crate::error::{Error, Result};
use crate::metric::{fmt_q, Dist, FiniteMetricSpace, PointSet, Q};

/// Colorings of at most this many carved pieces are searched exhaustively.
pub const EXACT_PIECE_LIMIT: usize = 24;
/// Backtracking nodes allowed before the search gives up.
pub const SEARCH_NODE_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Infeasibility {
    /// A component of the `< r` graph is wider than the bound; no
    /// `r`-disjoint family of small pieces can cover it.
    WideComponent { diameter: Q },
    /// No assignment of the carved pieces to `d + 1` parts avoids conflicts.
    CarvedPieces { pieces: usize },
}

#[derive(Clone, Debug)]
pub enum AsdimOutcome {
    Found(Vec<Vec<PointSet>>),
    Infeasible(Infeasibility),
}

/// Looks for `d + 1` collections of pieces of diameter `≤ b`, each
/// collection `r`-disjoint, jointly covering the space.
///
/// `d = 0` is decided exactly from the components at scale `r`. Otherwise
/// pieces are carved greedily and then assigned to parts, exhaustively up
/// to [`EXACT_PIECE_LIMIT`] pieces and by DSATUR beyond.
pub fn asdim_decomposition(space: &FiniteMetricSpace, d: usize, r: &Q, b: &Q) -> Result<AsdimOutcome> {
    if *r <= Q::from_integer(0) || *b < Q::from_integer(0) {
        return Err(Error::BadParams(format!("need r > 0 and B >= 0, got {} and {}", fmt_q(r), fmt_q(b))));
    }
    if d == 0 {
        let comps = components(space, r);
        for c in &comps {
            let diam = space.diameter_of(c)?;
            if diam > *b {
                return Ok(AsdimOutcome::Infeasible(Infeasibility::WideComponent { diameter: diam }));
            }
        }
        return Ok(AsdimOutcome::Found(vec![comps]));
    }
    let pieces = carve(space, b);
    let k = pieces.len();
    let mut adj = vec![vec![false; k]; k];
    let bound = Dist::Finite(*r);
    for i in 0..k {
        for j in i + 1..k {
            let close = pieces[i].iter().any(|&x| pieces[j].iter().any(|&y| space.dist(x, y) < bound));
            adj[i][j] = close;
            adj[j][i] = close;
        }
    }
    let colors = if k <= EXACT_PIECE_LIMIT {
        match exact_coloring(&adj, d + 1)? {
            Some(c) => c,
            None => return Ok(AsdimOutcome::Infeasible(Infeasibility::CarvedPieces { pieces: k })),
        }
    } else {
        dsatur(&adj, d + 1).ok_or(Error::SearchBudgetExceeded)?
    };
    let mut parts = vec![Vec::new(); d + 1];
    for (p, c) in pieces.into_iter().zip(colors) {
        parts[c].push(p);
    }
    Ok(AsdimOutcome::Found(parts))
}

/// Problems with a claimed decomposition, as readable strings.
pub fn check_asdim(space: &FiniteMetricSpace, parts: &[Vec<PointSet>], r: &Q, b: &Q) -> Vec<String> {
    let mut out = Vec::new();
    let mut covered = PointSet::default();
    for (i, part) in parts.iter().enumerate() {
        for (j, p) in part.iter().enumerate() {
            match space.diameter_of(p) {
                Ok(diam) if diam <= *b => {}
                _ => out.push(format!("piece {j} of part {i} exceeds the bound")),
            }
            covered = covered.union(p);
        }
        for (a, c, x, y, dist) in part_conflicts(space, part, r) {
            out.push(format!("part {i}: pieces {a} and {c} meet at {}, {} (distance {dist})", space.id(x), space.id(y)));
        }
    }
    if covered.len() != space.len() {
        out.push(format!("{} points uncovered", space.len() - covered.len()));
    }
    out
}

fn components(space: &FiniteMetricSpace, r: &Q) -> Vec<PointSet> {
    let n = space.len();
    let bound = Dist::Finite(*r);
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut comp = Vec::new();
        while let Some(a) = stack.pop() {
            comp.push(a);
            for b in 0..n {
                if !seen[b] && space.dist(a, b) < bound {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        out.push(PointSet::new(comp));
    }
    out
}

/// Sweeps from a far point, growing each piece around its seed while the
/// diameter stays within `b`.
fn carve(space: &FiniteMetricSpace, b: &Q) -> Vec<PointSet> {
    let n = space.len();
    if n == 0 {
        return vec![];
    }
    let far = (0..n).max_by(|&x, &y| space.dist(0, x).cmp(&space.dist(0, y)).then(y.cmp(&x))).unwrap_or(0);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| space.dist(far, x).cmp(&space.dist(far, y)).then(x.cmp(&y)));
    let limit = Dist::Finite(*b);
    let mut taken = vec![false; n];
    let mut pieces = Vec::new();
    for &seed in &order {
        if taken[seed] {
            continue;
        }
        let mut cand: Vec<usize> = order.iter().copied().filter(|&x| !taken[x] && x != seed).collect();
        cand.sort_by_key(|&x| space.dist(seed, x));
        let mut piece = vec![seed];
        taken[seed] = true;
        for x in cand {
            if space.dist(seed, x) > limit {
                break;
            }
            if piece.iter().all(|&y| space.dist(x, y) <= limit) {
                piece.push(x);
                taken[x] = true;
            }
        }
        pieces.push(PointSet::new(piece));
    }
    pieces
}

fn exact_coloring(adj: &[Vec<bool>], colors: usize) -> Result<Option<Vec<usize>>> {
    let k = adj.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(adj[v].iter().filter(|&&e| e).count()));
    let mut col = vec![usize::MAX; k];
    let mut nodes = 0u64;
    fn go(i: usize, order: &[usize], adj: &[Vec<bool>], col: &mut [usize], colors: usize, used: usize, nodes: &mut u64) -> Result<bool> {
        if i == order.len() {
            return Ok(true);
        }
        *nodes += 1;
        if *nodes > SEARCH_NODE_BUDGET {
            return Err(Error::SearchBudgetExceeded);
        }
        let v = order[i];
        // new colors are interchangeable, so only the first unused one is tried
        for c in 0..colors.min(used + 1) {
            if (0..adj.len()).all(|w| !adj[v][w] || col[w] != c) {
                col[v] = c;
                if go(i + 1, order, adj, col, colors, used.max(c + 1), nodes)? {
                    return Ok(true);
                }
                col[v] = usize::MAX;
            }
        }
        Ok(false)
    }
    Ok(go(0, &order, adj, &mut col, colors, 0, &mut nodes)?.then_some(col))
}

fn dsatur(adj: &[Vec<bool>], colors: usize) -> Option<Vec<usize>> {
    let k = adj.len();
    let mut col = vec![usize::MAX; k];
    for _ in 0..k {
        let sat = |v: usize| {
            let mut s: Vec<usize> = (0..k).filter(|&w| adj[v][w] && col[w] != usize::MAX).map(|w| col[w]).collect();
            s.sort_unstable();
            s.dedup();
            s.len()
        };
        let v = (0..k)
            .filter(|&v| col[v] == usize::MAX)
            .max_by_key(|&v| (sat(v), adj[v].iter().filter(|&&e| e).count(), std::cmp::Reverse(v)))?;
        col[v] = (0..colors).find(|&c| (0..k).all(|w| !adj[v][w] || col[w] != c))?;
    }
    Some(col)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::q;

    #[test]
    fn interval_dimension_one() {
        let z = FiniteMetricSpace::integer_interval(0, 100);
        let AsdimOutcome::Found(parts) = asdim_decomposition(&z, 1, &q(5), &q(10)).unwrap() else {
            panic!("expected a decomposition");
        };
        assert_eq!(parts.len(), 2);
        assert!(check_asdim(&z, &parts, &q(5), &q(10)).is_empty());
    }

    #[test]
    fn interval_dimension_zero_is_infeasible() {
        let z = FiniteMetricSpace::integer_interval(0, 100);
        let out = asdim_decomposition(&z, 0, &q(5), &q(10)).unwrap();
        assert!(matches!(out, AsdimOutcome::Infeasible(Infeasibility::WideComponent { .. })));
    }

    #[test]
    fn bounded_piece() {
        let z = FiniteMetricSpace::integer_interval(0, 6);
        let AsdimOutcome::Found(parts) = asdim_decomposition(&z, 0, &q(50), &q(6)).unwrap() else {
            panic!("expected a decomposition");
        };
        assert_eq!(parts, vec![vec![z.all_points()]]);
    }

    #[test]
    fn triangle_needs_three_colors() {
        let adj = vec![vec![false, true, true], vec![true, false, true], vec![true, true, false]];
        assert!(exact_coloring(&adj, 2).unwrap().is_none());
        assert!(exact_coloring(&adj, 3).unwrap().is_some());
        assert!(dsatur(&adj, 2).is_none());
    }
}
