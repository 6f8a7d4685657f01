//! The six equivalent conditions on a pair of unconditional bases, checked
//! pattern by pattern.
//!
//! For a pattern `σ` write `Γ₀ = σ⁻¹(0)`, `Γ₁ = σ⁻¹(1)`, `P` for the basis
//! projection of basis 0 onto `[x⁰_i]_{Γ₀}` and `Q` for that of basis 1 onto
//! `[x¹_i]_{Γ₀}`. Per pattern the conditions are measured by:
//!
//! - (i), (ii): `K_σ`, the unconditional constant of the woven basis with
//!   freshly computed biorthogonals; `∞` if the weaving does not span.
//! - (iii): `max(c_frame, C_u)` of the weaving with the original functionals,
//!   whose frame operator is `P + (I − Q)`.
//! - (iv): the unconditional basic-sequence constant
//!   `max_ε sup ‖Σ ε_i a_i x_i‖ / ‖Σ a_i x_i‖`; `∞` if dependent.
//! - (v): `D_σ = 1 / d([x⁰_i]_{Γ₀}, [x¹_i]_{Γ₁})`.
//! - (vi): `E_σ = max(‖(P|_{[x¹]_{Γ₀}})⁻¹‖, ‖(Q|_{[x⁰]_{Γ₀}})⁻¹‖)`.
//!
//! A condition holds at `σ` when its constant is at most a fixed multiple
//! of the base constant `C = max(C_u(basis 0), C_u(basis 1))`. The explicit inverse
//! `T = P|⁻¹ Q|⁻¹ Q + (I−Q)|⁻¹ (I−P)|⁻¹ (I−P)` of `P + (I − Q)` is built
//! from the four restricted blocks and checked against `ST = TS = I`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{mismatch, Error, Result};
use crate::frame::{basis_inverse, check_approximate_frame_with, unconditional_constant, FrameSystem};
use crate::operator::{invert_matrix, matrix_norm_value, max_abs_diff, DenseOperator, Exactness, DEFAULT_COND_CAP};
use crate::pattern::WeavePattern;
use crate::restricted::restricted_norm;
use crate::search::{maximize, SearchOptions};
use crate::subspace::{restricted_inverse, subspace_distance, SpannedSubspace, RANK_TOL};
use crate::weave::weave;

/// Exhaustive pattern scope is used up to this many basis vectors.
pub const MAX_EXHAUSTIVE_DIM: usize = 16;
/// Sampled patterns beyond [`MAX_EXHAUSTIVE_DIM`], besides the fixed ones.
pub const SAMPLED_PATTERNS: usize = 512;
/// Sign searches inside a pattern are exhaustive up to `2^n` of this size.
pub const INNER_EXHAUSTIVE_CAP: u64 = 4096;
/// Tolerance for `ST = TS = I` with the explicit inverse.
pub const INVERSE_TOL: f64 = 1e-8;
/// Tolerance for `P² = P`, `Q² = Q`.
pub const PROJECTION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    I,
    Ii,
    Iii,
    Iv,
    V,
    Vi,
}

impl Condition {
    pub const ALL: [Condition; 6] = [Condition::I, Condition::Ii, Condition::Iii, Condition::Iv, Condition::V, Condition::Vi];

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        let s = ["i", "ii", "iii", "iv", "v", "vi"][self.index()];
        f.write_str(s)
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Condition::ALL
            .into_iter()
            .find(|c| c.to_string() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Input(format!("unknown condition {s:?}; expected one of i, ii, iii, iv, v, vi")))
    }
}

/// `P` and `Q` for one pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionPair {
    pub p: DenseOperator,
    pub q: DenseOperator,
}

impl ProjectionPair {
    pub fn new(p: DenseOperator, q: DenseOperator) -> Result<Self> {
        if p.matrix().shape() != q.matrix().shape() || !p.is_square() {
            return Err(mismatch("projections must be square and of equal size".to_string()));
        }
        for (name, m) in [("P", p.matrix()), ("Q", q.matrix())] {
            let err = max_abs_diff(&(m * m), m);
            if !(err <= PROJECTION_TOL) {
                return Err(Error::Input(format!("{name} is not idempotent (deviation {err:e})")));
            }
        }
        Ok(ProjectionPair { p, q })
    }

    /// Basis projections of both bases onto the indices where `σ` is `0`.
    pub fn for_pattern(b0: &FrameSystem, b1: &FrameSystem, sigma: &WeavePattern) -> Result<Self> {
        let gamma: Vec<bool> = sigma.bits().iter().map(|b| !b).collect();
        let p = crate::subspace::basis_projection(b0, &gamma)?;
        let q = crate::subspace::basis_projection(b1, &gamma)?;
        ProjectionPair::new(p, q)
    }

    /// `P + (I − Q)`.
    pub fn frame_operator(&self) -> DMatrix<f64> {
        let d = self.p.rows();
        self.p.matrix() + DMatrix::identity(d, d) - self.q.matrix()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UncScope {
    Exhaustive,
    /// `count` seeded patterns plus the alternating and constant ones.
    Sampled { count: usize, seed: u64 },
}

/// Multiples of the base constant `C`: a condition holds at `σ` when its
/// constant is at most `factor · C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncThresholds {
    /// For `K_σ` in (i), (ii) and the constants of (iii) and (iv).
    pub unconditional: f64,
    /// For `D_σ` in (v).
    pub distance: f64,
    /// For `E_σ` in (vi).
    pub inverse: f64,
}

/// Default factor. Weavings satisfying (vi) are `2C`-unconditional frames.
pub const DEFAULT_THRESHOLD_FACTOR: f64 = 2.0;

impl UncThresholds {
    pub fn uniform(t: f64) -> Self {
        UncThresholds { unconditional: t, distance: t, inverse: t }
    }

    fn factor(&self, c: Condition) -> f64 {
        match c {
            Condition::I | Condition::Ii | Condition::Iii | Condition::Iv => self.unconditional,
            Condition::V => self.distance,
            Condition::Vi => self.inverse,
        }
    }
}

impl Default for UncThresholds {
    fn default() -> Self {
        UncThresholds::uniform(DEFAULT_THRESHOLD_FACTOR)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncOptions {
    /// `None` picks exhaustive up to [`MAX_EXHAUSTIVE_DIM`], sampled beyond.
    pub scope: Option<UncScope>,
    pub thresholds: UncThresholds,
    pub cond_cap: f64,
    pub seed: u64,
}

impl Default for UncOptions {
    fn default() -> Self {
        UncOptions { scope: None, thresholds: UncThresholds::default(), cond_cap: DEFAULT_COND_CAP, seed: 0 }
    }
}

/// The six per-pattern constants in condition order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternEvaluation {
    pub pattern: WeavePattern,
    #[serde(with = "constants_serde")]
    pub constants: [f64; 6],
    pub exactness: Exactness,
    /// `max(‖ST − I‖, ‖TS − I‖)` in operator norm; absent when a block is singular.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse_residual: Option<f64>,
    /// Conditions holding at this pattern, in condition order.
    pub holds: Vec<bool>,
}

impl PatternEvaluation {
    pub fn constant(&self, c: Condition) -> f64 {
        self.constants[c.index()]
    }

    /// Whether the evaluated conditions give one verdict.
    pub fn agrees(&self) -> bool {
        self.holds.windows(2).all(|w| w[0] == w[1])
    }
}

mod constants_serde {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(serde::Serialize, serde::Deserialize)]
    struct F(#[serde(with = "crate::float")] f64);

    pub fn serialize<S: Serializer>(v: &[f64; 6], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(6))?;
        for x in v {
            seq.serialize_element(&F(*x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[f64; 6], D::Error> {
        let v: Vec<F> = Vec::deserialize(d)?;
        let v: Vec<f64> = v.into_iter().map(|f| f.0).collect();
        v.try_into().map_err(|_| serde::de::Error::custom("expected six constants"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub condition: Condition,
    /// Holds at every tested pattern.
    pub holds: bool,
    /// Extremal constant over tested patterns (`K`, `D`, `E`, ...).
    #[serde(with = "crate::float")]
    pub constant: f64,
    /// First pattern attaining the extremal constant.
    pub witness: WeavePattern,
    pub exactness: Exactness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncVerdict {
    pub scope: UncScope,
    pub patterns_tested: usize,
    pub conditions: Vec<ConditionResult>,
    /// `max(C_u(basis 0), C_u(basis 1))`; thresholds are multiples of it.
    #[serde(with = "crate::float")]
    pub base_constant: f64,
    /// Every tested pattern gives one verdict across the selected conditions.
    pub agree: bool,
    pub disagreements: Vec<WeavePattern>,
    /// First pattern at which every selected condition fails and attains
    /// its extremal constant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint_witness: Option<WeavePattern>,
    /// Largest explicit-inverse residual over patterns where it exists.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_inverse_residual: Option<f64>,
    pub thresholds: UncThresholds,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub evaluations: Vec<PatternEvaluation>,
}

impl UncVerdict {
    pub fn condition(&self, c: Condition) -> Option<&ConditionResult> {
        self.conditions.iter().find(|r| r.condition == c)
    }
}

/// Precomputed matrices shared by all patterns.
struct Pair<'a> {
    b0: &'a FrameSystem,
    b1: &'a FrameSystem,
    x0: DMatrix<f64>,
    x1: DMatrix<f64>,
    x0_inv: DMatrix<f64>,
    x1_inv: DMatrix<f64>,
    /// `X₀⁻¹X₁`: column `j` holds the basis-0 coordinates of `x¹_j`.
    g01: DMatrix<f64>,
    /// `X₁⁻¹X₀`.
    g10: DMatrix<f64>,
    inner: SearchOptions,
    cond_cap: f64,
}

fn block(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

fn columns(m: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    m.select_columns(cols.iter())
}

fn rows(m: &DMatrix<f64>, r: &[usize]) -> DMatrix<f64> {
    m.select_rows(r.iter())
}

impl<'a> Pair<'a> {
    fn new(b0: &'a FrameSystem, b1: &'a FrameSystem, opts: &UncOptions) -> Result<Self> {
        if b0.space() != b1.space() {
            return Err(mismatch("bases live in different spaces".to_string()));
        }
        b0.check_basis()?;
        b1.check_basis()?;
        let x0 = b0.vectors_matrix();
        let x1 = b1.vectors_matrix();
        let x0_inv = b0.functionals_matrix().transpose();
        let x1_inv = b1.functionals_matrix().transpose();
        let g01 = &x0_inv * &x1;
        let g10 = &x1_inv * &x0;
        let inner = SearchOptions { exhaustive_cap: INNER_EXHAUSTIVE_CAP, seed: opts.seed, ..SearchOptions::default() };
        Ok(Pair { b0, b1, x0, x1, x0_inv, x1_inv, g01, g10, inner, cond_cap: opts.cond_cap })
    }

    fn dim(&self) -> usize {
        self.x0.nrows()
    }

    fn woven_vectors(&self, sigma: &WeavePattern) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| if sigma.get(j) { self.x1[(i, j)] } else { self.x0[(i, j)] })
    }

    /// (i)/(ii): `K_σ` with fresh biorthogonals.
    fn woven_basis_constant(&self, w: &DMatrix<f64>) -> (f64, Exactness) {
        let Ok(inv) = basis_inverse(w) else {
            return (f64::INFINITY, Exactness::Exact);
        };
        let d = self.dim();
        let vectors = (0..d).map(|j| w.column(j).iter().copied().collect()).collect();
        let functionals = (0..d).map(|j| inv.row(j).iter().copied().collect()).collect();
        let Ok(fs) = FrameSystem::new(self.b0.space(), vectors, functionals, "woven basis") else {
            return (f64::INFINITY, Exactness::Exact);
        };
        match unconditional_constant(&fs, &self.inner) {
            Ok(c) => (c.value, c.exactness),
            Err(_) => (f64::INFINITY, Exactness::Exact),
        }
    }

    /// (iii): the weaving with the original functionals.
    fn woven_frame_constant(&self, sigma: &WeavePattern) -> (f64, Exactness) {
        let Ok(f) = weave(self.b0, self.b1, sigma) else {
            return (f64::INFINITY, Exactness::Exact);
        };
        let report = check_approximate_frame_with(&f, self.cond_cap);
        if !report.is_frame() {
            return (f64::INFINITY, Exactness::Exact);
        }
        match unconditional_constant(&f, &self.inner) {
            Ok(c) => (report.c_frame.max(c.value), report.c_frame_exactness.combine_max(c.exactness)),
            Err(_) => (f64::INFINITY, Exactness::Exact),
        }
    }

    /// (iv): unconditional basic-sequence constant measured on `span(w)`.
    fn basic_sequence_constant(&self, w: &DMatrix<f64>) -> (f64, Exactness) {
        let sv = w.singular_values();
        let top = sv.iter().fold(0.0f64, |a, s| a.max(*s));
        if top == 0.0 || sv.iter().any(|s| *s <= RANK_TOL * top) {
            return (f64::INFINITY, Exactness::Exact);
        }
        let norm = self.b0.norm();
        let mut exact = Exactness::Exact;
        let outcome = maximize(w.ncols(), &self.inner, |eps| {
            let signed = DMatrix::from_fn(w.nrows(), w.ncols(), |i, j| if eps.get(j) { -w[(i, j)] } else { w[(i, j)] });
            restricted_norm(&signed, w, norm, norm).value
        });
        if !norm.has_exact_operator_norm() {
            exact = Exactness::LowerBound;
        }
        (outcome.value, exact.combine_max(outcome.exactness))
    }

    fn span(&self, m: &DMatrix<f64>, idx: &[usize], label: &str) -> Option<SpannedSubspace> {
        SpannedSubspace::new(self.b0.space(), columns(m, idx), label).ok()
    }

    /// (v): `D_σ`; `1` when one side is trivial.
    fn distance_constant(&self, g0: &[usize], g1: &[usize]) -> (f64, Exactness) {
        if g0.is_empty() || g1.is_empty() {
            return (1.0, Exactness::Exact);
        }
        let (Some(a), Some(b)) = (self.span(&self.x0, g0, "X1"), self.span(&self.x1, g1, "Y2")) else {
            return (f64::INFINITY, Exactness::Exact);
        };
        match subspace_distance(&a, &b, 0) {
            Ok(r) if r.value > 0.0 => {
                // an upper bound on the distance is a lower bound on D
                let ex = if r.exactness.is_exact() { Exactness::Exact } else { Exactness::LowerBound };
                (1.0 / r.value, ex)
            }
            _ => (f64::INFINITY, Exactness::Exact),
        }
    }

    /// (vi): `E_σ`; `1` when `Γ₀` is empty.
    fn inverse_constant(&self, pp: &ProjectionPair, g0: &[usize]) -> (f64, Exactness) {
        if g0.is_empty() {
            return (1.0, Exactness::Exact);
        }
        let (Some(x1s), Some(y1s)) = (self.span(&self.x0, g0, "X1"), self.span(&self.x1, g0, "Y1")) else {
            return (f64::INFINITY, Exactness::Exact);
        };
        let a = restricted_inverse(&pp.p, &y1s, &x1s, self.cond_cap);
        let b = restricted_inverse(&pp.q, &x1s, &y1s, self.cond_cap);
        match (a, b) {
            (Ok(a), Ok(b)) => (a.inverse_norm.max(b.inverse_norm), a.exactness.combine_max(b.exactness)),
            _ => (f64::INFINITY, Exactness::Exact),
        }
    }

    /// `T = T₁ + T₂`; `None` when a diagonal block of the cross-Grams is singular.
    fn explicit_inverse(&self, g0: &[usize], g1: &[usize]) -> Option<DMatrix<f64>> {
        let d = self.dim();
        let mut t = DMatrix::zeros(d, d);
        if !g0.is_empty() {
            // P|_{Y₁}⁻¹ Q|_{X₁}⁻¹ Q
            let a = invert_matrix(&block(&self.g01, g0, g0), self.cond_cap).ok()?;
            let b = invert_matrix(&block(&self.g10, g0, g0), self.cond_cap).ok()?;
            t += columns(&self.x1, g0) * a * b * rows(&self.x1_inv, g0);
        }
        if !g1.is_empty() {
            // (I−Q)|_{X₂}⁻¹ (I−P)|_{Y₂}⁻¹ (I−P)
            let a = invert_matrix(&block(&self.g10, g1, g1), self.cond_cap).ok()?;
            let b = invert_matrix(&block(&self.g01, g1, g1), self.cond_cap).ok()?;
            t += columns(&self.x0, g1) * a * b * rows(&self.x0_inv, g1);
        }
        Some(t)
    }

    fn evaluate(&self, sigma: &WeavePattern, selected: &[bool; 6], limits: &[f64; 6]) -> Result<PatternEvaluation> {
        let g0 = sigma.indices_of(false);
        let g1 = sigma.indices_of(true);
        let pp = ProjectionPair::for_pattern(self.b0, self.b1, sigma)?;
        let w = self.woven_vectors(sigma);
        let mut constants = [f64::NAN; 6];
        let mut exactness = Exactness::Exact;
        let mut record = |c: Condition, (v, e): (f64, Exactness)| {
            constants[c.index()] = v;
            exactness = exactness.combine_max(e);
        };
        if selected[0] || selected[1] {
            let k = self.woven_basis_constant(&w);
            record(Condition::I, k);
            record(Condition::Ii, k);
        }
        if selected[2] {
            record(Condition::Iii, self.woven_frame_constant(sigma));
        }
        if selected[3] {
            record(Condition::Iv, self.basic_sequence_constant(&w));
        }
        if selected[4] {
            record(Condition::V, self.distance_constant(&g0, &g1));
        }
        if selected[5] {
            record(Condition::Vi, self.inverse_constant(&pp, &g0));
        }
        let inverse_residual = self.explicit_inverse(&g0, &g1).map(|t| {
            let s = pp.frame_operator();
            let eye = DMatrix::identity(self.dim(), self.dim());
            let norm = self.b0.norm();
            matrix_norm_value(&(&s * &t - &eye), norm, norm).0.max(matrix_norm_value(&(&t * &s - &eye), norm, norm).0)
        });
        let holds = Condition::ALL
            .into_iter()
            .filter(|c| selected[c.index()])
            .map(|c| constants[c.index()] <= limits[c.index()])
            .collect();
        Ok(PatternEvaluation { pattern: sigma.clone(), constants, exactness, inverse_residual, holds })
    }
}

fn scope_patterns(n: usize, scope: UncScope) -> Vec<WeavePattern> {
    match scope {
        UncScope::Exhaustive => (0..1u64 << n).map(|k| WeavePattern::from_index(n, k)).collect(),
        UncScope::Sampled { count, seed } => {
            let alt = WeavePattern::alternating(n);
            let mut out = vec![WeavePattern::zeros(n), WeavePattern::ones(n), alt.complement(), alt];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            out.extend((0..count).map(|_| WeavePattern::new((0..n).map(|_| rng.random_bool(0.5)).collect())));
            out.sort();
            out.dedup();
            out
        }
    }
}

/// Checks the selected conditions on every pattern in scope.
///
/// `keep_evaluations` retains the per-pattern records in the verdict.
pub fn unc_conditions(
    b0: &FrameSystem,
    b1: &FrameSystem,
    conditions: &[Condition],
    opts: &UncOptions,
    keep_evaluations: bool,
) -> Result<UncVerdict> {
    let pair = Pair::new(b0, b1, opts)?;
    let n = b0.n();
    let scope = opts.scope.unwrap_or(if n <= MAX_EXHAUSTIVE_DIM {
        UncScope::Exhaustive
    } else {
        UncScope::Sampled { count: SAMPLED_PATTERNS, seed: opts.seed }
    });
    if matches!(scope, UncScope::Exhaustive) && n >= 63 {
        return Err(Error::Input(format!("exhaustive scope is impossible for n = {n}")));
    }
    let mut selected = [false; 6];
    for c in conditions {
        selected[c.index()] = true;
    }
    if !selected.iter().any(|s| *s) {
        selected = [true; 6];
    }
    let base_constant = [b0, b1]
        .iter()
        .map(|b| unconditional_constant(b, &SearchOptions { seed: opts.seed, ..SearchOptions::default() }).map(|c| c.value))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(1.0f64, f64::max);
    let mut limits = [0.0; 6];
    for c in Condition::ALL {
        // relative slack for constants computed at the threshold
        limits[c.index()] = opts.thresholds.factor(c) * base_constant * (1.0 + 1e-9);
    }
    let patterns = scope_patterns(n, scope);
    let evals: Vec<PatternEvaluation> = patterns
        .par_iter()
        .map(|sigma| pair.evaluate(sigma, &selected, &limits))
        .collect::<Result<_>>()?;

    let active: Vec<Condition> = Condition::ALL.into_iter().filter(|c| selected[c.index()]).collect();
    let results: Vec<ConditionResult> = active
        .iter()
        .map(|&c| {
            let i = c.index();
            // patterns are in index order, so the first maximiser is the smallest
            let mut best = 0;
            for (k, e) in evals.iter().enumerate() {
                if e.constants[i] > evals[best].constants[i] {
                    best = k;
                }
            }
            let exactness = match scope {
                UncScope::Exhaustive => evals.iter().fold(Exactness::Exact, |a, e| a.combine_max(e.exactness)),
                UncScope::Sampled { .. } => Exactness::LowerBound,
            };
            ConditionResult {
                condition: c,
                holds: evals.iter().all(|e| e.constants[i] <= limits[i]),
                constant: evals[best].constants[i],
                witness: evals[best].pattern.clone(),
                exactness,
            }
        })
        .collect();
    let joint_witness = evals
        .iter()
        .find(|e| {
            results.iter().all(|r| {
                let v = e.constants[r.condition.index()];
                let extreme = v == r.constant || (v - r.constant).abs() <= 1e-9 * r.constant.abs();
                extreme && v > limits[r.condition.index()]
            })
        })
        .map(|e| e.pattern.clone());
    let disagreements: Vec<WeavePattern> = evals.iter().filter(|e| !e.agrees()).map(|e| e.pattern.clone()).collect();
    let max_inverse_residual = evals.iter().filter_map(|e| e.inverse_residual).reduce(f64::max);
    Ok(UncVerdict {
        scope,
        patterns_tested: evals.len(),
        conditions: results,
        base_constant,
        agree: disagreements.is_empty(),
        disagreements,
        joint_witness,
        max_inverse_residual,
        thresholds: opts.thresholds,
        evaluations: if keep_evaluations { evals } else { Vec::new() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::{NormKind, NormedSpace};

    fn basis(d: usize, cols: Vec<Vec<f64>>) -> FrameSystem {
        FrameSystem::from_basis(NormedSpace::new(d, NormKind::L1).unwrap(), cols, "b").unwrap()
    }

    fn standard(d: usize) -> FrameSystem {
        basis(d, (0..d).map(|i| (0..d).map(|j| f64::from(u8::from(i == j))).collect()).collect())
    }

    #[test]
    fn identical_standard_bases() {
        let e = standard(4);
        let v = unc_conditions(&e, &e, &[], &UncOptions::default(), true).unwrap();
        assert_eq!(v.patterns_tested, 16);
        assert!(v.agree);
        for r in &v.conditions {
            assert!(r.holds, "{}", r.condition);
            assert_eq!(r.constant, 1.0, "{}", r.condition);
        }
        assert!(v.max_inverse_residual.unwrap() < 1e-15);
        assert_eq!(v.base_constant, 1.0);
        assert_eq!(v.joint_witness, None);
    }

    #[test]
    fn block_pair_fails_jointly_at_the_alternating_pattern() {
        let a0 = crate::gallery::system(crate::gallery::GalleryName::BlockPairA0, 8).unwrap();
        let a1 = crate::gallery::system(crate::gallery::GalleryName::BlockPairA1, 8).unwrap();
        let v = unc_conditions(&a0, &a1, &[], &UncOptions::default(), false).unwrap();
        assert_eq!(v.base_constant, 3.0);
        assert!(v.conditions.iter().all(|r| !r.holds));
        assert_eq!(v.joint_witness, Some(WeavePattern::alternating(8)));
    }

    #[test]
    fn condition_subsets_and_parsing() {
        let e = standard(3);
        let v = unc_conditions(&e, &e, &[Condition::V, Condition::Vi], &UncOptions::default(), false).unwrap();
        assert_eq!(v.conditions.len(), 2);
        assert!(v.evaluations.is_empty());
        assert_eq!("iv".parse::<Condition>().unwrap(), Condition::Iv);
        assert!("vii".parse::<Condition>().is_err());
    }

    #[test]
    fn projection_pair_frame_operator() {
        let e = standard(3);
        let sigma: WeavePattern = "010".parse().unwrap();
        let pp = ProjectionPair::for_pattern(&e, &e, &sigma).unwrap();
        assert_eq!(pp.frame_operator(), DMatrix::identity(3, 3));
        let bad = DenseOperator::new(DMatrix::identity(3, 3) * 2.0, NormKind::L1).unwrap();
        assert!(ProjectionPair::new(bad.clone(), bad).is_err());
    }

    #[test]
    fn sampled_scope_contains_fixed_patterns() {
        let p = scope_patterns(20, UncScope::Sampled { count: 10, seed: 3 });
        assert!(p.contains(&WeavePattern::alternating(20)));
        assert!(p.contains(&WeavePattern::zeros(20)));
        assert!(p.windows(2).all(|w| w[0] < w[1]));
    }
}
