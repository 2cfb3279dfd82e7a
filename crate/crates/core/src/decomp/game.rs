use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::certificate::{DecompositionCertificate, MemberStep, Step};
use super::strategy::Strategy;
use crate::error::{Error, Result};
use crate::metric::{fmt_q, MetricFamily, PointSet, Q};

/// Plays the decomposition game against a fixed challenge list.
///
/// Each round first retires members whose state is terminal at the current
/// challenge; the game ends as soon as every member is retired.
pub fn play_game(family: &MetricFamily, strategy: &Strategy, challenges: &[Q]) -> Result<DecompositionCertificate> {
    let ambient = family
        .common_ambient()?
        .ok_or_else(|| Error::BadParams("cannot play on an empty family".into()))?
        .clone();
    let mut members: Vec<(PointSet, Strategy)> =
        family.members.iter().map(|m| (m.points.clone(), strategy.clone())).collect();
    let initial: Vec<PointSet> = members.iter().map(|(p, _)| p.clone()).collect();
    let mut steps = Vec::new();
    let mut finished = false;
    for r in challenges {
        if *r <= Q::from_integer(0) {
            return Err(Error::BadParams(format!("challenge {} is not positive", fmt_q(r))));
        }
        let terminal: Vec<bool> =
            members.par_iter().map(|(m, s)| s.is_terminal(&ambient, m, r)).collect::<Result<_>>()?;
        if terminal.iter().all(|&t| t) {
            finished = true;
            break;
        }
        let outcomes: Vec<(MemberStep, Vec<Strategy>)> = members
            .par_iter()
            .zip(terminal.par_iter())
            .map(|((m, s), &t)| {
                if t {
                    Ok((MemberStep::trivial(m), vec![Strategy::Done]))
                } else {
                    s.step(&ambient, m, r)
                }
            })
            .collect::<Result<_>>()?;
        let mut next = Vec::new();
        let mut step = Step { r: *r, members: Vec::with_capacity(outcomes.len()) };
        for (ms, conts) in outcomes {
            next.extend(ms.pieces().cloned().zip(conts));
            step.members.push(ms);
        }
        steps.push(step);
        members = next;
    }
    if !finished && members.iter().any(|(_, s)| *s != Strategy::Done) {
        let open = members.iter().filter(|(_, s)| *s != Strategy::Done).count();
        return Err(Error::ChallengesExhausted(format!("{open} members still open after {} challenges", challenges.len())));
    }
    let mut bound = Q::from_integer(0);
    for (m, _) in &members {
        bound = bound.max(ambient.diameter_of(m)?);
    }
    Ok(DecompositionCertificate { ambient, initial, steps, bound })
}

/// `len` challenges `a/b` with `b ∈ 1..=4` and `1/b ≤ a/b ≤ max`.
pub fn random_schedule(seed: u64, len: usize, max: i64) -> Vec<Q> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| {
            let b = rng.gen_range(1..=4i64);
            let a = rng.gen_range(1..=max * b);
            Q::new(a, b)
        })
        .collect()
}
