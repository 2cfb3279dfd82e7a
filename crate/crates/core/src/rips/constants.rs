use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{fmt_q, Q};

pub const MAX_CONSTANT_DIM: usize = 4;
pub const CHORD_SAMPLES: usize = 100_000;
pub const CHORD_SEED: u64 = 0x5eed;
/// Multiplier applied to each sampled ratio.
pub const SAFETY: (i64, i64) = (11, 10);
/// Constants are rounded up to this denominator.
pub const GRID: i64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Derivation {
    pub samples: usize,
    pub seed: u64,
    /// Largest sampled boundary-detour ratio in this dimension.
    pub max_ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimensionConstants {
    pub n: usize,
    /// Comparison constant `α_n`.
    pub alpha: Q,
    /// Lower-bound divisor `c_n`.
    pub c: Q,
    /// Neighborhood constant `β_n`.
    pub beta: Q,
    pub record: Option<Derivation>,
}

impl DimensionConstants {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "alpha": fmt_q(&self.alpha),
            "c": fmt_q(&self.c),
            "beta": fmt_q(&self.beta),
            "derivation": self.record,
        })
    }
}

fn dist(x: &[f64], y: &[f64]) -> f64 {
    (0.5 * x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()).sqrt()
}

/// A uniform point of the facet opposite vertex `skip`.
fn facet_point(rng: &mut ChaCha8Rng, n: usize, skip: usize) -> Vec<f64> {
    let mut x: Vec<f64> = (0..=n).map(|i| if i == skip { 0.0 } else { -(1.0 - rng.gen::<f64>()).ln() }).collect();
    let s: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= s);
    x
}

fn golden<F: Fn(f64) -> f64>(lo: f64, hi: f64, iters: usize, f: F) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    f(lo).min(f(hi)).min(fc).min(fd)
}

/// Shortest detour `min |x - z| + |z - y|` over `z` in the face spanned by
/// `face`. The minimizer is approximate, which can only overstate the detour.
fn detour(x: &[f64], y: &[f64], face: &[usize], n: usize) -> f64 {
    let point = |w: &[f64]| {
        let mut z = vec![0.0; n + 1];
        for (&v, &c) in face.iter().zip(w) {
            z[v] = c;
        }
        dist(x, &z) + dist(&z, y)
    };
    match face.len() {
        1 => point(&[1.0]),
        2 => golden(0.0, 1.0, 40, |s| point(&[s, 1.0 - s])),
        3 => golden(0.0, 1.0, 30, |s| golden(0.0, s, 30, |v| point(&[1.0 - s, v, s - v]))),
        k => unreachable!("faces of dimension {} are not sampled", k - 1),
    }
}

/// Largest sampled ratio of boundary detour to chord length for chords
/// joining two facets of the regular `n`-simplex with unit edges.
pub fn boundary_detour_ratio(n: usize, samples: usize, seed: u64) -> f64 {
    if n <= 1 {
        return 1.0;
    }
    let chunks = 64usize;
    let per = samples.div_ceil(chunks);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((n as u64) << 32) ^ c as u64);
            let mut best: f64 = 1.0;
            for _ in 0..per {
                let i = rng.gen_range(0..=n);
                let mut j = rng.gen_range(0..n);
                if j >= i {
                    j += 1;
                }
                let x = facet_point(&mut rng, n, i);
                let y = facet_point(&mut rng, n, j);
                let chord = dist(&x, &y);
                if chord < 1e-9 {
                    continue;
                }
                let face: Vec<usize> = (0..=n).filter(|&v| v != i && v != j).collect();
                best = best.max(detour(&x, &y, &face, n) / chord);
            }
            best
        })
        .reduce(|| 1.0, f64::max)
}

fn round_up(x: f64) -> Q {
    Q::new((x * GRID as f64).ceil() as i64, GRID)
}

fn table() -> &'static Mutex<BTreeMap<usize, DimensionConstants>> {
    static T: OnceLock<Mutex<BTreeMap<usize, DimensionConstants>>> = OnceLock::new();
    T.get_or_init(|| Mutex::new(BTreeMap::new()))
}

/// `α_0 = α_1 = 1` and `α_n = α_{n-1} · 11/10 · Ĉ_n`, where `Ĉ_n` is the
/// sampled boundary-detour ratio, rounded up to six decimals; `c_n = α_n`
/// and `β_n = 2 α_n`. Values are cached per process.
pub fn derive_dimension_constants(n: usize) -> Result<DimensionConstants> {
    if n > MAX_CONSTANT_DIM {
        return Err(Error::DimensionCapExceeded(n));
    }
    if let Some(c) = table().lock().expect("constants lock").get(&n) {
        return Ok(c.clone());
    }
    let (alpha, record) = if n <= 1 {
        (Q::from_integer(1), None)
    } else {
        let prev = derive_dimension_constants(n - 1)?.alpha;
        let ratio = boundary_detour_ratio(n, CHORD_SAMPLES, CHORD_SEED);
        let raw = prev * Q::new(SAFETY.0, SAFETY.1) * round_up(ratio);
        let alpha = Q::new((raw * Q::from_integer(GRID)).ceil().to_integer(), GRID);
        (alpha, Some(Derivation { samples: CHORD_SAMPLES, seed: CHORD_SEED, max_ratio: ratio }))
    };
    let c = DimensionConstants { n, alpha, c: alpha, beta: alpha * Q::from_integer(2), record };
    table().lock().expect("constants lock").insert(n, c.clone());
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_dimensions() {
        assert_eq!(derive_dimension_constants(1).unwrap().alpha, Q::from_integer(1));
        let a2 = derive_dimension_constants(2).unwrap();
        let v = *a2.alpha.numer() as f64 / *a2.alpha.denom() as f64;
        assert!((2.15..=2.2 + 1e-6).contains(&v), "{v}");
        assert_eq!(a2.beta, a2.alpha * Q::from_integer(2));
        assert!(matches!(derive_dimension_constants(5), Err(Error::DimensionCapExceeded(5))));
    }

    #[test]
    fn monotone() {
        let a: Vec<Q> = (0..=MAX_CONSTANT_DIM).map(|n| derive_dimension_constants(n).unwrap().alpha).collect();
        assert!(a.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn two_simplex_ratio_is_at_most_two() {
        // through the shared vertex the worst chord is the equilateral one
        let r = boundary_detour_ratio(2, 20_000, 1);
        assert!(r <= 2.0 + 1e-9 && r > 1.9, "{r}");
    }
}
