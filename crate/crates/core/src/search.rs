//! Maximisation over `{0,1}^n`: parallel exhaustive enumeration or seeded
//! single-flip hill climbing.
//!
//! Both paths evaluate each pattern from scratch with the same objective, so
//! a pattern scores identically whichever path visits it. Ties resolve to the
//! lexicographically smallest pattern.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::operator::Exactness;
use crate::pattern::WeavePattern;

pub const DEFAULT_EXHAUSTIVE_CAP: u64 = 1 << 22;
pub const DEFAULT_RESTARTS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExactnessMode {
    Exhaustive,
    Heuristic { restarts: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub mode: ExactnessMode,
    /// Largest `2^n` enumerated exhaustively.
    pub exhaustive_cap: u64,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { mode: ExactnessMode::Exhaustive, exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP, seed: 0 }
    }
}

impl SearchOptions {
    pub fn heuristic(restarts: usize, seed: u64) -> Self {
        SearchOptions { mode: ExactnessMode::Heuristic { restarts }, seed, ..Default::default() }
    }

    /// Mode actually used for `n` bits: exhaustive requests above the cap
    /// fall back to the heuristic.
    pub fn effective_mode(&self, n: usize) -> ExactnessMode {
        match self.mode {
            ExactnessMode::Exhaustive if n < 63 && (1u64 << n) <= self.exhaustive_cap => ExactnessMode::Exhaustive,
            ExactnessMode::Exhaustive => ExactnessMode::Heuristic { restarts: DEFAULT_RESTARTS },
            h => h,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub best: WeavePattern,
    pub value: f64,
    pub mode: ExactnessMode,
    /// `Exact` after full enumeration; `LowerBound` otherwise.
    pub exactness: Exactness,
    pub evaluations: u64,
    pub forced_heuristic: bool,
}

/// Larger value wins; equal values go to the smaller index.
fn better(a: (f64, u64), b: (f64, u64)) -> (f64, u64) {
    if a.0 > b.0 || (a.0 == b.0 && a.1 <= b.1) {
        a
    } else {
        b
    }
}

/// Maximises `objective` over all patterns of length `n`.
///
/// NaN objective values are treated as `-∞`.
pub fn maximize<F>(n: usize, opts: &SearchOptions, objective: F) -> SearchOutcome
where
    F: Fn(&WeavePattern) -> f64 + Sync,
{
    let eval = |p: &WeavePattern| {
        let v = objective(p);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let mode = opts.effective_mode(n);
    let forced_heuristic = mode != opts.mode;
    match mode {
        ExactnessMode::Exhaustive => {
            let total = 1u64 << n;
            let (value, k) = (0..total)
                .into_par_iter()
                .map(|k| (eval(&WeavePattern::from_index(n, k)), k))
                .reduce(|| (f64::NEG_INFINITY, u64::MAX), better);
            let k = if k == u64::MAX { 0 } else { k };
            SearchOutcome {
                best: WeavePattern::from_index(n, k),
                value,
                mode,
                exactness: Exactness::Exact,
                evaluations: total,
                forced_heuristic,
            }
        }
        ExactnessMode::Heuristic { restarts } => {
            let (best, value, evaluations) = hill_climb(n, restarts, opts.seed, &eval);
            SearchOutcome { best, value, mode, exactness: Exactness::LowerBound, evaluations, forced_heuristic }
        }
    }
}

fn start_pattern(n: usize, idx: usize, seed: u64) -> WeavePattern {
    match idx {
        0 => WeavePattern::zeros(n),
        1 => WeavePattern::ones(n),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(idx as u64);
            WeavePattern::new((0..n).map(|_| rng.random::<bool>()).collect())
        }
    }
}

fn prefer(a: (f64, WeavePattern), b: (f64, WeavePattern)) -> (f64, WeavePattern) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

/// Steepest-ascent single-flip climbing from the two constant patterns plus
/// `restarts` seeded random ones. Every evaluated pattern competes for the
/// result, not only the local optima.
fn hill_climb<F>(n: usize, restarts: usize, seed: u64, eval: &F) -> (WeavePattern, f64, u64)
where
    F: Fn(&WeavePattern) -> f64 + Sync,
{
    let runs: Vec<((f64, WeavePattern), u64)> = (0..restarts + 2)
        .into_par_iter()
        .map(|idx| {
            let mut current = start_pattern(n, idx, seed);
            let mut value = eval(&current);
            let mut evaluations = 1u64;
            let mut best = (value, current.clone());
            loop {
                let mut step: Option<(f64, WeavePattern)> = None;
                for i in 0..n {
                    let mut next = current.clone();
                    next.flip(i);
                    let v = eval(&next);
                    evaluations += 1;
                    best = prefer(best, (v, next.clone()));
                    step = Some(match step {
                        None => (v, next),
                        Some(s) => prefer(s, (v, next)),
                    });
                }
                match step {
                    Some((v, next)) if v > value => {
                        current = next;
                        value = v;
                    }
                    _ => break,
                }
            }
            (best, evaluations)
        })
        .collect();
    let evaluations = runs.iter().map(|r| r.1).sum();
    let (value, best) = runs.into_iter().map(|r| r.0).reduce(prefer).expect("at least two starts");
    (best, value, evaluations)
}

/// Evaluates every pattern in index order; `2^n` results.
pub fn enumerate_all<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&WeavePattern) -> T + Sync,
{
    (0..1u64 << n).into_par_iter().map(|k| f(&WeavePattern::from_index(n, k))).collect()
}
