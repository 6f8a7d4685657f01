//! Weaving two frame systems by a pattern, partial operators `P_{σ,I}`, and
//! the worst-case searches over `{0,1}^n`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::frame::{assemble, frame_objective, FrameSystem};
use crate::norm::norm_unchecked;
use crate::operator::{invert_matrix, matrix_norm_value, DenseOperator, Exactness, DEFAULT_COND_CAP};
use crate::pattern::WeavePattern;
use crate::search::{enumerate_all, maximize, ExactnessMode, SearchOptions};

pub const DEFAULT_BLOW_UP_THRESHOLD: f64 = 1e8;
/// Per-pattern logs are only produced up to this many patterns.
pub const MAX_LOGGED_PATTERNS: u64 = 4096;

fn check_compatible(f0: &FrameSystem, f1: &FrameSystem) -> Result<()> {
    if f0.space() != f1.space() {
        return Err(mismatch(format!(
            "systems live in different spaces ({} in dim {} vs {} in dim {})",
            f0.norm(),
            f0.dim(),
            f1.norm(),
            f1.dim()
        )));
    }
    if f0.n() != f1.n() {
        return Err(mismatch(format!("systems have {} and {} pairs", f0.n(), f1.n())));
    }
    Ok(())
}

fn check_pattern(f0: &FrameSystem, sigma: &WeavePattern) -> Result<()> {
    if sigma.len() != f0.n() {
        return Err(mismatch(format!("pattern has length {} but the systems have {} pairs", sigma.len(), f0.n())));
    }
    Ok(())
}

fn pick<'a>(
    f0: &'a FrameSystem,
    f1: &'a FrameSystem,
    sigma: &'a WeavePattern,
    i: usize,
) -> (&'a DVector<f64>, &'a DVector<f64>) {
    let f = if sigma.get(i) { f1 } else { f0 };
    (f.vector(i), f.functional(i))
}

/// Pair `i` of the result is `(x_i^{σ(i)}, f_i^{σ(i)})`.
pub fn weave(f0: &FrameSystem, f1: &FrameSystem, sigma: &WeavePattern) -> Result<FrameSystem> {
    check_compatible(f0, f1)?;
    check_pattern(f0, sigma)?;
    let (vectors, functionals) = (0..f0.n())
        .map(|i| {
            let (x, f) = pick(f0, f1, sigma, i);
            (x.clone(), f.clone())
        })
        .unzip();
    Ok(FrameSystem::from_columns(f0.space(), vectors, functionals, format!("weave[{sigma}]")))
}

/// Frame operator of the weaving, accumulated like [`crate::frame::frame_operator`].
pub(crate) fn woven_operator(f0: &FrameSystem, f1: &FrameSystem, sigma: &WeavePattern) -> DMatrix<f64> {
    assemble(f0.dim(), (0..f0.n()).map(|i| pick(f0, f1, sigma, i)))
}

/// An interval `[lo, hi]` (1-based, inclusive) together with a pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalQuery {
    pub pattern: WeavePattern,
    pub lo: usize,
    pub hi: usize,
}

impl IntervalQuery {
    pub fn new(pattern: WeavePattern, lo: usize, hi: usize) -> Result<Self> {
        if lo < 1 || lo > hi || hi > pattern.len() {
            return Err(Error::Range(format!(
                "interval [{lo}, {hi}] is not inside [1, {}]",
                pattern.len()
            )));
        }
        Ok(IntervalQuery { pattern, lo, hi })
    }
}

/// `P_{σ,I} = Σ_{j∈I} x_j^{σ(j)} (f_j^{σ(j)})ᵀ`.
pub fn partial_operator(f0: &FrameSystem, f1: &FrameSystem, q: &IntervalQuery) -> Result<DenseOperator> {
    check_compatible(f0, f1)?;
    check_pattern(f0, &q.pattern)?;
    if q.hi > f0.n() || q.lo < 1 || q.lo > q.hi {
        return Err(Error::Range(format!("interval [{}, {}] is not inside [1, {}]", q.lo, q.hi, f0.n())));
    }
    let m = assemble(f0.dim(), (q.lo - 1..q.hi).map(|i| pick(f0, f1, &q.pattern, i)));
    Ok(DenseOperator::from_parts(m, f0.norm(), f0.norm()))
}

/// `P_{σ,Γ}` for an arbitrary index set `Γ` given as a membership mask.
pub fn partial_operator_subset(
    f0: &FrameSystem,
    f1: &FrameSystem,
    sigma: &WeavePattern,
    gamma: &[bool],
) -> Result<DenseOperator> {
    check_compatible(f0, f1)?;
    check_pattern(f0, sigma)?;
    if gamma.len() != f0.n() {
        return Err(Error::Range(format!("index mask has length {} but n = {}", gamma.len(), f0.n())));
    }
    let m = assemble(f0.dim(), (0..f0.n()).filter(|&i| gamma[i]).map(|i| pick(f0, f1, sigma, i)));
    Ok(DenseOperator::from_parts(m, f0.norm(), f0.norm()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeaveOptions {
    pub search: SearchOptions,
    /// Invertible weavings with a constant above this count as not woven.
    pub blow_up_threshold: f64,
    pub cond_cap: f64,
    pub log_all_patterns: bool,
}

impl Default for WeaveOptions {
    fn default() -> Self {
        WeaveOptions {
            search: SearchOptions::default(),
            blow_up_threshold: DEFAULT_BLOW_UP_THRESHOLD,
            cond_cap: DEFAULT_COND_CAP,
            log_all_patterns: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum WeaveVerdict {
    Woven {
        #[serde(with = "crate::float")]
        constant: f64,
    },
    NotWoven {
        witness: WeavePattern,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternLogEntry {
    pub pattern: WeavePattern,
    #[serde(with = "crate::float")]
    pub s_norm: f64,
    /// `∞` when `S_σ` is not invertible.
    #[serde(with = "crate::float")]
    pub s_inv_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeaveSearchResult {
    pub worst_pattern: WeavePattern,
    #[serde(with = "crate::float")]
    pub worst_constant: f64,
    pub exactness: Exactness,
    pub mode: ExactnessMode,
    pub forced_heuristic: bool,
    pub evaluations: u64,
    pub verdict: WeaveVerdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_pattern_log: Option<Vec<PatternLogEntry>>,
}

/// Maximises `max(‖S_σ‖, ‖S_σ⁻¹‖)` over patterns.
pub fn worst_weaving(f0: &FrameSystem, f1: &FrameSystem, opts: &WeaveOptions) -> Result<WeaveSearchResult> {
    check_compatible(f0, f1)?;
    let n = f0.n();
    let norm = f0.norm();
    let outcome = maximize(n, &opts.search, |sigma| {
        frame_objective(&woven_operator(f0, f1, sigma), norm, opts.cond_cap)
    });
    let exact_norms = norm.has_exact_operator_norm();
    let exactness = if exact_norms { outcome.exactness } else { Exactness::LowerBound };
    let verdict = if outcome.value.is_infinite() {
        WeaveVerdict::NotWoven {
            witness: outcome.best.clone(),
            reason: "frame operator of the witness weaving is not invertible".into(),
        }
    } else if outcome.value > opts.blow_up_threshold {
        WeaveVerdict::NotWoven {
            witness: outcome.best.clone(),
            reason: format!("constant {:e} exceeds blow-up threshold {:e}", outcome.value, opts.blow_up_threshold),
        }
    } else {
        WeaveVerdict::Woven { constant: outcome.value }
    };
    let per_pattern_log = (opts.log_all_patterns && n < 63 && (1u64 << n) <= MAX_LOGGED_PATTERNS).then(|| {
        enumerate_all(n, |sigma| {
            let s = woven_operator(f0, f1, sigma);
            let s_norm = matrix_norm_value(&s, norm, norm).0;
            let s_inv_norm = invert_matrix(&s, opts.cond_cap)
                .map(|inv| matrix_norm_value(&inv, norm, norm).0)
                .unwrap_or(f64::INFINITY);
            PatternLogEntry { pattern: sigma.clone(), s_norm, s_inv_norm }
        })
    });
    Ok(WeaveSearchResult {
        worst_pattern: outcome.best,
        worst_constant: outcome.value,
        exactness,
        mode: outcome.mode,
        forced_heuristic: outcome.forced_heuristic,
        evaluations: outcome.evaluations,
        verdict,
        per_pattern_log,
    })
}

/// Depth-first walk over all intervals starting at `m` (0-based) and all
/// local patterns on them, calling `visit(hi, bits, acc)` with the running
/// sum after each appended index.
fn walk_intervals<T: Clone>(
    m: usize,
    n: usize,
    acc: T,
    bits: &mut Vec<bool>,
    step: &impl Fn(&T, usize, bool) -> T,
    visit: &mut impl FnMut(usize, &[bool], &T),
) {
    let j = m + bits.len();
    if j >= n {
        return;
    }
    for b in [false, true] {
        let next = step(&acc, j, b);
        bits.push(b);
        visit(j, bits, &next);
        walk_intervals(m, n, next, bits, step, visit);
        bits.pop();
    }
}

/// `max ‖P_{σ,[m,k]} x‖` over `N ≤ m ≤ k ≤ n` and all local patterns. `big_n` is 1-based.
pub fn tail_profile(f0: &FrameSystem, f1: &FrameSystem, x: &[f64], big_n: usize) -> Result<f64> {
    check_compatible(f0, f1)?;
    let n = f0.n();
    if big_n < 1 || big_n > n {
        return Err(Error::Range(format!("tail start N = {big_n} is not inside [1, {n}]")));
    }
    if x.len() != f0.dim() {
        return Err(mismatch(format!("vector has length {} in dimension {}", x.len(), f0.dim())));
    }
    crate::norm::vector_norm(x, f0.norm())?;
    let xv = DVector::from_column_slice(x);
    // v[b][j] = f_j^b(x) x_j^b
    let terms: Vec<[DVector<f64>; 2]> = (0..n)
        .map(|j| [f0.vector(j) * f0.functional(j).dot(&xv), f1.vector(j) * f1.functional(j).dot(&xv)])
        .collect();
    let norm = f0.norm();
    let best = (big_n - 1..n)
        .into_par_iter()
        .map(|m| {
            let mut best = 0.0f64;
            let step = |acc: &DVector<f64>, j: usize, b: bool| acc + &terms[j][usize::from(b)];
            walk_intervals(m, n, DVector::zeros(f0.dim()), &mut Vec::new(), &step, &mut |_, _, acc| {
                best = best.max(norm_unchecked(acc.iter(), norm));
            });
            best
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileValue {
    #[serde(with = "crate::float")]
    pub value: f64,
    pub exactness: Exactness,
}

/// The finite-scale `D = max ‖P_{σ,[m,k]}‖` over intervals and local patterns.
///
/// Exhaustive when `2^(n+1)` fits under the cap; otherwise a heuristic over
/// global patterns, each scored by its worst interval.
pub fn uniform_bound_profile(f0: &FrameSystem, f1: &FrameSystem, opts: &SearchOptions) -> Result<ProfileValue> {
    check_compatible(f0, f1)?;
    let n = f0.n();
    let d = f0.dim();
    let norm = f0.norm();
    let exact_norms = norm.has_exact_operator_norm();
    let exhaustive = opts.mode == ExactnessMode::Exhaustive && n < 62 && (1u64 << (n + 1)) <= opts.exhaustive_cap;
    if exhaustive {
        let value = (0..n)
            .into_par_iter()
            .map(|m| {
                let mut best = 0.0f64;
                let step = |acc: &DMatrix<f64>, j: usize, b: bool| {
                    let f = if b { f1 } else { f0 };
                    let mut next = acc.clone();
                    next.ger(1.0, f.vector(j), f.functional(j), 1.0);
                    next
                };
                walk_intervals(m, n, DMatrix::zeros(d, d), &mut Vec::new(), &step, &mut |_, _, acc| {
                    best = best.max(matrix_norm_value(acc, norm, norm).0);
                });
                best
            })
            .reduce(|| 0.0, f64::max);
        let exactness = if exact_norms { Exactness::Exact } else { Exactness::LowerBound };
        return Ok(ProfileValue { value, exactness });
    }
    let heuristic = match opts.mode {
        ExactnessMode::Heuristic { .. } => *opts,
        ExactnessMode::Exhaustive => SearchOptions::heuristic(crate::search::DEFAULT_RESTARTS, opts.seed),
    };
    let outcome = maximize(n, &heuristic, |sigma| {
        let mut best = 0.0f64;
        for m in 0..n {
            let mut acc = DMatrix::zeros(d, d);
            for j in m..n {
                let (x, f) = pick(f0, f1, sigma, j);
                acc.ger(1.0, x, f, 1.0);
                best = best.max(matrix_norm_value(&acc, norm, norm).0);
            }
        }
        best
    });
    Ok(ProfileValue { value: outcome.value, exactness: Exactness::LowerBound })
}

/// The best uniform `δ = min_σ 1/‖S_σ⁻¹‖`; zero if some weaving is not invertible.
///
/// A heuristic search can only find large `‖S_σ⁻¹‖`, so its `δ` is an upper bound.
pub fn lower_bound_profile(f0: &FrameSystem, f1: &FrameSystem, opts: &WeaveOptions) -> Result<ProfileValue> {
    check_compatible(f0, f1)?;
    let norm = f0.norm();
    let outcome = maximize(f0.n(), &opts.search, |sigma| {
        match invert_matrix(&woven_operator(f0, f1, sigma), opts.cond_cap) {
            Ok(inv) => matrix_norm_value(&inv, norm, norm).0,
            Err(_) => f64::INFINITY,
        }
    });
    let value = if outcome.value.is_infinite() { 0.0 } else { 1.0 / outcome.value };
    let exactness = match (outcome.exactness, norm.has_exact_operator_norm()) {
        (Exactness::Exact, true) => Exactness::Exact,
        _ => Exactness::UpperBound,
    };
    Ok(ProfileValue { value, exactness })
}
