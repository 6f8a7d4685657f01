//! Perturbation budgets and the certificates they imply.
//!
//! Three budgets are measured, each compared strictly against its bound:
//!
//! - basis: `Σ ‖x⁰_j − x¹_j‖ ‖x⁰*_j‖ < 1`;
//! - operator: `‖I − T‖ < C_s⁻¹` for `(x_i, f_i)` against `(T x_i, f_i)`;
//! - pair: `Σ (‖f⁰_i − f¹_i‖ ‖x⁰_i‖ + ‖x⁰_i − x¹_i‖ ‖f¹_i‖) < ‖S⁻¹‖⁻¹`.
//!
//! When a budget holds, every weaving in scope is inverted explicitly and
//! its residual compared with the quantitative bound behind the conclusion.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::frame::{
    basis_constant, basis_inverse, equivalence_constants, frame_operator, suppression_constant, ConstantValue,
    Equivalence, FrameSystem,
};
use crate::norm::{dual_norm, vector_norm};
use crate::operator::{invert_matrix, matrix_norm, matrix_norm_value, DenseOperator, Exactness};
use crate::pattern::WeavePattern;
use crate::search::SearchOptions;
use crate::weave::{weave, woven_operator, worst_weaving, WeaveOptions, WeaveSearchResult};

/// Certificates are exhaustive over patterns up to this many pairs.
pub const MAX_CERTIFIED_EXHAUSTIVE: usize = 12;
/// Patterns sampled beyond [`MAX_CERTIFIED_EXHAUSTIVE`], besides the fixed ones.
pub const SAMPLED_PATTERNS: usize = 512;
/// Slack on the residual bounds.
pub const CERTIFICATE_SLACK: f64 = 1e-9;
/// Above this suppression constant the operator theorem is reported as vacuous in practice.
pub const LARGE_SUPPRESSION_CONSTANT: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetKind {
    BasisSum,
    OperatorDeviation,
    PairSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationBudget {
    pub kind: BudgetKind,
    #[serde(with = "crate::float")]
    pub bound: f64,
    #[serde(with = "crate::float")]
    pub actual: f64,
    /// `actual < bound`, strictly.
    pub satisfied: bool,
}

impl PerturbationBudget {
    pub fn new(kind: BudgetKind, bound: f64, actual: f64) -> Self {
        PerturbationBudget { kind, bound, actual, satisfied: actual < bound }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateScope {
    Exhaustive,
    Sampled,
}

/// Patterns checked by a certificate.
pub fn certificate_patterns(n: usize, seed: u64) -> (CertificateScope, Vec<WeavePattern>) {
    if n <= MAX_CERTIFIED_EXHAUSTIVE {
        return (CertificateScope::Exhaustive, (0..1u64 << n).map(|k| WeavePattern::from_index(n, k)).collect());
    }
    let alt = WeavePattern::alternating(n);
    let mut out = vec![WeavePattern::zeros(n), WeavePattern::ones(n), alt.complement(), alt];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    out.extend((0..SAMPLED_PATTERNS).map(|_| WeavePattern::new((0..n).map(|_| rng.random_bool(0.5)).collect())));
    out.sort();
    out.dedup();
    (CertificateScope::Sampled, out)
}

/// Outcome of checking `‖I − S_σ S⁻¹‖ ≤ bound` and invertibility of `S_σ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub scope: CertificateScope,
    pub patterns: usize,
    /// The bound each residual is compared with (before slack).
    #[serde(with = "crate::float")]
    pub bound: f64,
    /// Largest `‖I − S_σ S⁻¹‖` over patterns.
    #[serde(with = "crate::float")]
    pub max_residual: f64,
    pub worst_pattern: WeavePattern,
    pub all_invertible: bool,
    pub exactness: Exactness,
    /// Every pattern is invertible and within `bound + slack`.
    pub holds: bool,
}

/// Residual norms of `I − S_σ S⁻¹` over the given patterns.
fn certify(
    f0: &FrameSystem,
    f1: &FrameSystem,
    s_inv: &DMatrix<f64>,
    bound: f64,
    patterns: (CertificateScope, Vec<WeavePattern>),
    cond_cap: f64,
) -> Certificate {
    let norm = f0.norm();
    let d = f0.dim();
    let (scope, patterns) = patterns;
    let rows: Vec<(f64, bool, Exactness)> = patterns
        .par_iter()
        .map(|sigma| {
            let s_sigma = woven_operator(f0, f1, sigma);
            let invertible = invert_matrix(&s_sigma, cond_cap).is_ok();
            let resid = DMatrix::identity(d, d) - &s_sigma * s_inv;
            let (v, ex) = matrix_norm_value(&resid, norm, norm);
            (v, invertible, ex)
        })
        .collect();
    let mut worst = 0;
    for (k, r) in rows.iter().enumerate() {
        if r.0 > rows[worst].0 {
            worst = k;
        }
    }
    let all_invertible = rows.iter().all(|r| r.1);
    let exactness = rows.iter().fold(Exactness::Exact, |a, r| a.combine_max(r.2));
    let max_residual = rows[worst].0;
    Certificate {
        scope,
        patterns: patterns.len(),
        bound,
        max_residual,
        worst_pattern: patterns[worst].clone(),
        all_invertible,
        exactness,
        holds: all_invertible && max_residual <= bound + CERTIFICATE_SLACK,
    }
}

/// Whether every weaving of two bases is again a basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisWeavingSummary {
    pub scope: CertificateScope,
    pub patterns: usize,
    pub all_bases: bool,
    /// Largest basis constant over weavings that are bases.
    #[serde(with = "crate::float")]
    pub worst_basis_constant: f64,
    pub worst_pattern: WeavePattern,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<WeavePattern>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisPerturbationReport {
    pub budget: PerturbationBudget,
    pub candidate_is_basis: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equivalence: Option<Equivalence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weaving: Option<BasisWeavingSummary>,
}

/// `Σ_j ‖x⁰_j − x¹_j‖ ‖x⁰*_j‖`, folded in index order.
pub fn basis_budget(basis0: &FrameSystem, candidate: &[Vec<f64>]) -> Result<PerturbationBudget> {
    basis0.check_basis()?;
    if candidate.len() != basis0.n() {
        return Err(mismatch(format!("{} candidate vectors for a basis of {}", candidate.len(), basis0.n())));
    }
    let norm = basis0.norm();
    let mut actual = 0.0;
    for (j, y) in candidate.iter().enumerate() {
        if y.len() != basis0.dim() {
            return Err(mismatch(format!("candidate vector {} has length {}", j + 1, y.len())));
        }
        let diff: Vec<f64> = basis0.vector(j).iter().zip(y).map(|(a, b)| a - b).collect();
        actual += vector_norm(&diff, norm)? * dual_norm(basis0.functional(j).as_slice(), norm)?;
    }
    Ok(PerturbationBudget::new(BudgetKind::BasisSum, 1.0, actual))
}

fn basis_weavings(b0: &FrameSystem, b1: &FrameSystem, seed: u64) -> Result<BasisWeavingSummary> {
    let (scope, patterns) = certificate_patterns(b0.n(), seed);
    let rows: Vec<Option<f64>> = patterns
        .par_iter()
        .map(|sigma| {
            let w = weave(b0, b1, sigma).ok()?;
            let inv = basis_inverse(&w.vectors_matrix()).ok()?;
            let functionals = (0..w.n()).map(|j| inv.row(j).iter().copied().collect()).collect();
            let fs = FrameSystem::new(w.space(), w.vector_rows(), functionals, "woven basis").ok()?;
            basis_constant(&fs).ok().map(|c| c.value)
        })
        .collect();
    let first_failure = rows.iter().position(Option::is_none).map(|k| patterns[k].clone());
    let mut worst = (0.0f64, 0usize);
    for (k, r) in rows.iter().enumerate() {
        if let Some(v) = r {
            if *v > worst.0 {
                worst = (*v, k);
            }
        }
    }
    Ok(BasisWeavingSummary {
        scope,
        patterns: patterns.len(),
        all_bases: first_failure.is_none(),
        worst_basis_constant: worst.0,
        worst_pattern: patterns[worst.1].clone(),
        first_failure,
    })
}

/// Budget for replacing the vectors of `basis0` by `candidate`; when it holds,
/// checks that the candidate is an equivalent basis and that every weaving is a basis.
pub fn basis_perturbation_check(basis0: &FrameSystem, candidate: &[Vec<f64>], seed: u64) -> Result<BasisPerturbationReport> {
    let budget = basis_budget(basis0, candidate)?;
    let b1 = crate::frame::biorthogonals(candidate)
        .and_then(|duals| FrameSystem::new(basis0.space(), candidate.to_vec(), duals, "candidate"));
    let candidate_is_basis = b1.is_ok();
    let (equivalence, weaving) = match (&b1, budget.satisfied) {
        (Ok(b1), true) => (Some(equivalence_constants(basis0, b1)?), Some(basis_weavings(basis0, b1, seed)?)),
        _ => (None, None),
    };
    Ok(BasisPerturbationReport { budget, candidate_is_basis, equivalence, weaving })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorPerturbationReport {
    pub budget: PerturbationBudget,
    pub suppression_constant: ConstantValue,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weaving: Option<WeaveSearchResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationOptions {
    pub weave: WeaveOptions,
    /// Run the weaving search even when the budget fails.
    pub informational: bool,
}

impl Default for PerturbationOptions {
    fn default() -> Self {
        PerturbationOptions { weave: WeaveOptions::default(), informational: false }
    }
}

/// `(x_i, f_i)` against `(T x_i, f_i)` with budget `‖I − T‖ < C_s⁻¹`.
pub fn operator_perturbation_check(
    f: &FrameSystem,
    t: &DenseOperator,
    opts: &PerturbationOptions,
) -> Result<OperatorPerturbationReport> {
    if t.matrix().shape() != (f.dim(), f.dim()) {
        return Err(mismatch(format!("operator shape {:?} does not act on dimension {}", t.matrix().shape(), f.dim())));
    }
    let norm = f.norm();
    let cs = suppression_constant(f, &SearchOptions { seed: opts.weave.search.seed, ..SearchOptions::default() })?;
    let deviation = DMatrix::identity(f.dim(), f.dim()) - t.matrix();
    let dev = matrix_norm(&deviation, norm, norm);
    let budget = PerturbationBudget::new(BudgetKind::OperatorDeviation, 1.0 / cs.value, dev.value);
    let mut warnings = Vec::new();
    if cs.value > LARGE_SUPPRESSION_CONSTANT {
        let msg = format!("suppression constant {} exceeds {LARGE_SUPPRESSION_CONSTANT}; the budget is tiny", cs.value);
        log::warn!("{msg}");
        warnings.push(msg);
    }
    let exact = cs.exactness.is_exact() && dev.exactness.is_exact();
    if !exact {
        warnings.push("suppression constant or deviation is not exact; no certificate is issued".into());
    }
    let ft = f.with_mapped_vectors(t.matrix())?.with_label(format!("T·{}", f.label()));
    let run = budget.satisfied || opts.informational;
    let weaving = if run { Some(worst_weaving(f, &ft, &opts.weave)?) } else { None };
    let certificate = if budget.satisfied && exact {
        let s_inv = invert_matrix(frame_operator(f).matrix(), opts.weave.cond_cap).map_err(|e| Error::NotAFrame(e.to_string()))?;
        Some(certify(f, &ft, &s_inv, cs.value * dev.value, certificate_patterns(f.n(), opts.weave.search.seed), opts.weave.cond_cap))
    } else {
        None
    };
    Ok(OperatorPerturbationReport { budget, suppression_constant: cs, weaving, certificate, warnings })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairPerturbationReport {
    pub budget: PerturbationBudget,
    #[serde(with = "crate::float")]
    pub s_inv_norm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weaving: Option<WeaveSearchResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

/// `Σ_i (‖f⁰_i − f¹_i‖ ‖x⁰_i‖ + ‖x⁰_i − x¹_i‖ ‖f¹_i‖)`, folded in index order.
pub fn pair_budget_actual(f0: &FrameSystem, f1: &FrameSystem) -> Result<f64> {
    if f0.space() != f1.space() || f0.n() != f1.n() {
        return Err(mismatch("systems differ in space or length".to_string()));
    }
    let norm = f0.norm();
    let mut actual = 0.0;
    for i in 0..f0.n() {
        let df: Vec<f64> = f0.functional(i).iter().zip(f1.functional(i).iter()).map(|(a, b)| a - b).collect();
        let dx: Vec<f64> = f0.vector(i).iter().zip(f1.vector(i).iter()).map(|(a, b)| a - b).collect();
        actual += dual_norm(&df, norm)? * vector_norm(f0.vector(i).as_slice(), norm)?
            + vector_norm(&dx, norm)? * dual_norm(f1.functional(i).as_slice(), norm)?;
    }
    Ok(actual)
}

/// Budget `Σ … < ‖S⁻¹‖⁻¹` for weaving `f0` with `f1`.
pub fn pair_perturbation_check(f0: &FrameSystem, f1: &FrameSystem, opts: &PerturbationOptions) -> Result<PairPerturbationReport> {
    let actual = pair_budget_actual(f0, f1)?;
    let norm = f0.norm();
    let s_inv = invert_matrix(frame_operator(f0).matrix(), opts.weave.cond_cap).map_err(|e| Error::NotAFrame(e.to_string()))?;
    let s_inv_norm = matrix_norm(&s_inv, norm, norm);
    let budget = PerturbationBudget::new(BudgetKind::PairSum, 1.0 / s_inv_norm.value, actual);
    let run = budget.satisfied || opts.informational;
    let weaving = if run { Some(worst_weaving(f0, f1, &opts.weave)?) } else { None };
    let certificate = (budget.satisfied && s_inv_norm.exactness.is_exact()).then(|| {
        certify(
            f0,
            f1,
            &s_inv,
            actual * s_inv_norm.value,
            certificate_patterns(f0.n(), opts.weave.search.seed),
            opts.weave.cond_cap,
        )
    });
    Ok(PairPerturbationReport { budget, s_inv_norm: s_inv_norm.value, weaving, certificate })
}

/// `f1` with functionals `f⁰ + t(f¹ − f⁰)` and vectors likewise.
pub fn interpolate(f0: &FrameSystem, f1: &FrameSystem, t: f64) -> Result<FrameSystem> {
    if f0.space() != f1.space() || f0.n() != f1.n() {
        return Err(mismatch("systems differ in space or length".to_string()));
    }
    let mix = |a: &nalgebra::DVector<f64>, b: &nalgebra::DVector<f64>| -> Vec<f64> {
        a.iter().zip(b.iter()).map(|(p, q)| p + t * (q - p)).collect()
    };
    let v = (0..f0.n()).map(|i| mix(f0.vector(i), f1.vector(i))).collect();
    let g = (0..f0.n()).map(|i| mix(f0.functional(i), f1.functional(i))).collect();
    FrameSystem::new(f0.space(), v, g, format!("{}→{}@{t}", f0.label(), f1.label()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{system, GalleryName};
    use crate::norm::NormKind;

    #[test]
    fn basis_budget_examples() {
        let e = system(GalleryName::StandardL1, 4).unwrap();
        let same = basis_perturbation_check(&e, &e.vector_rows(), 0).unwrap();
        assert_eq!(same.budget.actual, 0.0);
        assert!(same.budget.satisfied);
        let w = same.weaving.unwrap();
        assert!(w.all_bases);
        assert_eq!(w.worst_basis_constant, basis_constant(&e).unwrap().value);

        let mut moved = e.vector_rows();
        moved[0][1] += 0.4;
        let r = basis_perturbation_check(&e, &moved, 0).unwrap();
        assert!((r.budget.actual - 0.4).abs() < 1e-15);
        assert!(r.budget.satisfied && r.candidate_is_basis);
        assert!(r.weaving.unwrap().all_bases);
        assert!(r.equivalence.unwrap().upper.is_finite());

        let neg: Vec<Vec<f64>> = e.vector_rows().iter().map(|v| v.iter().map(|x| -x).collect()).collect();
        let r = basis_perturbation_check(&e, &neg, 0).unwrap();
        assert_eq!(r.budget.actual, 8.0);
        assert!(!r.budget.satisfied);
        assert!(r.weaving.is_none());
    }

    #[test]
    fn borderline_budget_is_unsatisfied() {
        assert!(!PerturbationBudget::new(BudgetKind::BasisSum, 1.0, 1.0).satisfied);
    }

    #[test]
    fn operator_examples() {
        let e = system(GalleryName::StandardL1, 6).unwrap();
        let id = DenseOperator::identity(6, NormKind::L1);
        let r = operator_perturbation_check(&e, &id, &PerturbationOptions::default()).unwrap();
        assert_eq!(r.budget.actual, 0.0);
        assert_eq!(r.certificate.unwrap().max_residual, 0.0);

        let t = id.scale(0.7);
        let r = operator_perturbation_check(&e, &t, &PerturbationOptions::default()).unwrap();
        assert!(r.budget.satisfied);
        assert_eq!(r.suppression_constant.value, 1.0);
        let c = r.certificate.unwrap();
        assert!(c.holds && c.all_invertible);
        assert_eq!(c.patterns, 64);
        assert!(c.max_residual <= 0.3 + 1e-12);

        let s = system(GalleryName::SummingC0, 6).unwrap();
        let t = DenseOperator::identity(6, NormKind::LInf).scale(2.0);
        let opts = PerturbationOptions { informational: true, ..Default::default() };
        let r = operator_perturbation_check(&s, &t, &opts).unwrap();
        assert!(!r.budget.satisfied);
        assert!(r.certificate.is_none());
        assert!(r.weaving.unwrap().worst_constant > 1.0 / r.budget.bound);
    }

    #[test]
    fn pair_examples() {
        let e = system(GalleryName::StandardL1, 6).unwrap();
        let r = pair_perturbation_check(&e, &e, &PerturbationOptions::default()).unwrap();
        assert_eq!(r.budget.actual, 0.0);
        assert!(r.certificate.unwrap().holds);

        let mut g = e.functional_rows();
        g[0][0] *= 1.1;
        let f1 = FrameSystem::new(e.space(), e.vector_rows(), g, "scaled").unwrap();
        let r = pair_perturbation_check(&e, &f1, &PerturbationOptions::default()).unwrap();
        assert!((r.budget.actual - 0.1).abs() < 1e-15);
        let c = r.certificate.unwrap();
        assert!(c.holds);
        assert!(c.max_residual <= 0.1 + 1e-12);

        let far = e.with_scaled_functionals(-1.0);
        let r = pair_perturbation_check(&e, &far, &PerturbationOptions::default()).unwrap();
        assert!(!r.budget.satisfied && r.certificate.is_none());
    }

    #[test]
    fn pair_budget_is_not_monotone_along_segments() {
        // x⁰ = ε, x¹ = ε + 1, f⁰ = 1, f¹ = 0 in one dimension
        let sp = crate::norm::NormedSpace::new(1, NormKind::L1).unwrap();
        let eps = 0.01;
        let f0 = FrameSystem::new(sp, vec![vec![eps]], vec![vec![1.0]], "a").unwrap();
        let f1 = FrameSystem::new(sp, vec![vec![eps + 1.0]], vec![vec![0.0]], "b").unwrap();
        let full = pair_budget_actual(&f0, &f1).unwrap();
        let half = pair_budget_actual(&f0, &interpolate(&f0, &f1, 0.5).unwrap()).unwrap();
        assert!(half > full);
    }
}
