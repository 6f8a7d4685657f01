//! Frame systems `(x_i, f_i)` and their constants.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::norm::{NormKind, NormedSpace};
use crate::operator::{
    invert_matrix, matrix_norm, matrix_norm_value, max_abs_diff, DenseOperator, Exactness, OpNormResult,
    DEFAULT_COND_CAP,
};
use crate::pattern::WeavePattern;
use crate::search::{maximize, SearchOptions};

/// Tolerance for `x*_j(x_k) = δ_jk`.
pub const BIORTHOGONAL_TOL: f64 = 1e-10;

/// A finite family of (vector, functional) pairs over a normed space.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSystem {
    space: NormedSpace,
    vectors: Vec<DVector<f64>>,
    functionals: Vec<DVector<f64>>,
    label: String,
}

impl FrameSystem {
    pub fn new(
        space: NormedSpace,
        vectors: Vec<Vec<f64>>,
        functionals: Vec<Vec<f64>>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::Input("a frame system needs at least one pair".into()));
        }
        if vectors.len() != functionals.len() {
            return Err(mismatch(format!(
                "{} vectors but {} functionals",
                vectors.len(),
                functionals.len()
            )));
        }
        let check = |what: &str, rows: &[Vec<f64>]| -> Result<()> {
            for (i, r) in rows.iter().enumerate() {
                if r.len() != space.dim {
                    return Err(mismatch(format!(
                        "{what} {} has length {} but the space has dimension {}",
                        i + 1,
                        r.len(),
                        space.dim
                    )));
                }
                if let Some(j) = r.iter().position(|x| !x.is_finite()) {
                    return Err(Error::Input(format!("{what} {} entry {} is not finite", i + 1, j + 1)));
                }
            }
            Ok(())
        };
        check("vector", &vectors)?;
        check("functional", &functionals)?;
        Ok(FrameSystem {
            space,
            vectors: vectors.into_iter().map(DVector::from_vec).collect(),
            functionals: functionals.into_iter().map(DVector::from_vec).collect(),
            label: label.into(),
        })
    }

    /// A basis paired with its biorthogonal functionals.
    pub fn from_basis(space: NormedSpace, vectors: Vec<Vec<f64>>, label: impl Into<String>) -> Result<Self> {
        let functionals = biorthogonals(&vectors)?;
        FrameSystem::new(space, vectors, functionals, label)
    }

    pub(crate) fn from_columns(
        space: NormedSpace,
        vectors: Vec<DVector<f64>>,
        functionals: Vec<DVector<f64>>,
        label: String,
    ) -> Self {
        debug_assert_eq!(vectors.len(), functionals.len());
        FrameSystem { space, vectors, functionals, label }
    }

    pub fn space(&self) -> NormedSpace {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim
    }

    pub fn norm(&self) -> NormKind {
        self.space.norm
    }

    /// Number of pairs.
    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Same vectors and functionals measured in another norm.
    pub fn with_norm(mut self, norm: NormKind) -> Self {
        self.space.norm = norm;
        self
    }

    pub fn vector(&self, i: usize) -> &DVector<f64> {
        &self.vectors[i]
    }

    pub fn functional(&self, i: usize) -> &DVector<f64> {
        &self.functionals[i]
    }

    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.vectors
    }

    pub fn functionals(&self) -> &[DVector<f64>] {
        &self.functionals
    }

    pub fn vector_rows(&self) -> Vec<Vec<f64>> {
        self.vectors.iter().map(|v| v.iter().copied().collect()).collect()
    }

    pub fn functional_rows(&self) -> Vec<Vec<f64>> {
        self.functionals.iter().map(|v| v.iter().copied().collect()).collect()
    }

    /// `dim × n` matrix with the vectors as columns.
    pub fn vectors_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_columns(&self.vectors)
    }

    /// `dim × n` matrix with the functionals as columns.
    pub fn functionals_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_columns(&self.functionals)
    }

    pub fn with_scaled_functionals(&self, factor: f64) -> FrameSystem {
        FrameSystem {
            space: self.space,
            vectors: self.vectors.clone(),
            functionals: self.functionals.iter().map(|f| f * factor).collect(),
            label: self.label.clone(),
        }
    }

    /// `(T x_i, f_i)`.
    pub fn with_mapped_vectors(&self, t: &DMatrix<f64>) -> Result<FrameSystem> {
        if t.shape() != (self.dim(), self.dim()) {
            return Err(mismatch(format!("operator shape {:?} does not act on dimension {}", t.shape(), self.dim())));
        }
        Ok(FrameSystem {
            space: self.space,
            vectors: self.vectors.iter().map(|x| t * x).collect(),
            functionals: self.functionals.clone(),
            label: self.label.clone(),
        })
    }

    /// Whether the functionals are the biorthogonals of a spanning,
    /// independent family of vectors.
    pub fn is_basis_with_biorthogonals(&self) -> bool {
        self.check_basis().is_ok()
    }

    pub(crate) fn check_basis(&self) -> Result<()> {
        if self.n() != self.dim() {
            return Err(Error::NotABasis(format!("{} vectors in dimension {}", self.n(), self.dim())));
        }
        let x = self.vectors_matrix();
        let f = self.functionals_matrix();
        let gram = f.transpose() * &x;
        let err = max_abs_diff(&gram, &DMatrix::identity(self.n(), self.n()));
        if !(err <= BIORTHOGONAL_TOL) {
            return Err(Error::NotABasis(format!(
                "functionals are not biorthogonal to the vectors (max deviation {err:e})"
            )));
        }
        Ok(())
    }
}

/// `Σ x_i f_iᵀ`, accumulated in index order.
pub(crate) fn assemble<'a>(dim: usize, pairs: impl Iterator<Item = (&'a DVector<f64>, &'a DVector<f64>)>) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(dim, dim);
    for (x, f) in pairs {
        s.ger(1.0, x, f, 1.0);
    }
    s
}

/// The frame operator `S = Σ x_i f_iᵀ`.
pub fn frame_operator(f: &FrameSystem) -> DenseOperator {
    let s = assemble(f.dim(), f.vectors.iter().zip(&f.functionals));
    DenseOperator::from_parts(s, f.norm(), f.norm())
}

/// `max(‖S‖, ‖S⁻¹‖)`, or `∞` when `S` is not invertible under `cond_cap`.
pub(crate) fn frame_objective(s: &DMatrix<f64>, norm: NormKind, cond_cap: f64) -> f64 {
    match invert_matrix(s, cond_cap) {
        Ok(inv) => matrix_norm_value(s, norm, norm).0.max(matrix_norm_value(&inv, norm, norm).0),
        Err(_) => f64::INFINITY,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FrameVerdict {
    ApproximateFrame,
    NotAFrame { reason: String },
}

/// A computed constant with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantValue {
    #[serde(with = "crate::float")]
    pub value: f64,
    pub exactness: Exactness,
    /// Maximising subset or sign pattern, when the constant is a maximum over patterns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WeavePattern>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantReport {
    pub s_norm: OpNormResult,
    pub s_inv_norm: Option<OpNormResult>,
    /// `max(‖S‖, ‖S⁻¹‖)`; `∞` for non-frames.
    #[serde(with = "crate::float")]
    pub c_frame: f64,
    pub c_frame_exactness: Exactness,
    pub verdict: FrameVerdict,
    pub c_suppression: Option<ConstantValue>,
    pub c_unconditional: Option<ConstantValue>,
    pub basis_constant: Option<ConstantValue>,
}

impl ConstantReport {
    pub fn is_frame(&self) -> bool {
        self.verdict == FrameVerdict::ApproximateFrame
    }
}

/// Frame fields of a [`ConstantReport`]; constants are left empty.
pub fn check_approximate_frame(f: &FrameSystem) -> ConstantReport {
    check_approximate_frame_with(f, DEFAULT_COND_CAP)
}

pub fn check_approximate_frame_with(f: &FrameSystem, cond_cap: f64) -> ConstantReport {
    let s = frame_operator(f);
    let norm = f.norm();
    let s_norm = matrix_norm(s.matrix(), norm, norm);
    let (s_inv_norm, c_frame, verdict) = match invert_matrix(s.matrix(), cond_cap) {
        Ok(inv) => {
            let r = matrix_norm(&inv, norm, norm);
            let c = s_norm.value.max(r.value);
            (Some(r), c, FrameVerdict::ApproximateFrame)
        }
        Err(e) => (None, f64::INFINITY, FrameVerdict::NotAFrame { reason: e.to_string() }),
    };
    let c_frame_exactness = match &s_inv_norm {
        Some(r) => s_norm.exactness.combine_max(r.exactness),
        None => Exactness::Exact,
    };
    ConstantReport {
        s_norm,
        s_inv_norm,
        c_frame,
        c_frame_exactness,
        verdict,
        c_suppression: None,
        c_unconditional: None,
        basis_constant: None,
    }
}

/// Frame check plus `C_s`, `C_u` and, for bases, the basis constant.
pub fn analyze(f: &FrameSystem, opts: &SearchOptions) -> ConstantReport {
    let mut report = check_approximate_frame(f);
    if report.is_frame() {
        report.c_suppression = suppression_constant(f, opts).ok();
        report.c_unconditional = unconditional_constant(f, opts).ok();
    }
    if f.is_basis_with_biorthogonals() {
        report.basis_constant = basis_constant(f).ok();
    }
    report
}

/// Rows of `X⁻¹` for the column matrix `X = [x_1 … x_d]`.
pub fn biorthogonals(vectors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = vectors.len();
    if d == 0 {
        return Err(Error::NotABasis("empty family".into()));
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != d) {
        return Err(Error::NotABasis(format!("{d} vectors of length {} cannot form a basis", v.len())));
    }
    let x = DMatrix::from_fn(d, d, |i, j| vectors[j][i]);
    let inv = basis_inverse(&x)?;
    Ok((0..d).map(|j| inv.row(j).iter().copied().collect()).collect())
}

pub(crate) fn basis_inverse(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let inv = invert_matrix(x, DEFAULT_COND_CAP).map_err(|e| Error::NotABasis(e.to_string()))?;
    let err = max_abs_diff(&(&inv * x), &DMatrix::identity(x.nrows(), x.ncols()));
    if !(err <= BIORTHOGONAL_TOL) {
        return Err(Error::NotABasis(format!("biorthogonality residual {err:e} above {BIORTHOGONAL_TOL:e}")));
    }
    Ok(inv)
}

/// `max_n ‖P_n‖` over the partial-sum projections `P_n = Σ_{i≤n} x_i x*_iᵀ`.
pub fn basis_constant(f: &FrameSystem) -> Result<ConstantValue> {
    f.check_basis()?;
    let norm = f.norm();
    let mut p = DMatrix::zeros(f.dim(), f.dim());
    let mut best = (0.0f64, Exactness::Exact, 0usize);
    for (i, (x, g)) in f.vectors.iter().zip(&f.functionals).enumerate() {
        p.ger(1.0, x, g, 1.0);
        let (v, ex) = matrix_norm_value(&p, norm, norm);
        if v > best.0 {
            best.0 = v;
            best.2 = i;
        }
        best.1 = best.1.combine_max(ex);
    }
    // The least constant is at least 1 by convention.
    Ok(ConstantValue { value: best.0.max(1.0), exactness: best.1, witness: None })
}

struct SignedSums {
    dim: usize,
    norm: NormKind,
    /// `S⁻ᵀ f_i`, so that `f_iᵀ S⁻¹ = g_iᵀ`.
    g: Vec<DVector<f64>>,
    exact_norms: bool,
}

impl SignedSums {
    fn new(f: &FrameSystem) -> Result<Self> {
        let s = frame_operator(f);
        let inv = invert_matrix(s.matrix(), DEFAULT_COND_CAP).map_err(|e| Error::NotAFrame(e.to_string()))?;
        let inv_t = inv.transpose();
        let g = f.functionals.iter().map(|fi| &inv_t * fi).collect();
        let norm = f.norm();
        let exact_norms = norm.has_exact_operator_norm();
        Ok(SignedSums { dim: f.dim(), norm, g, exact_norms })
    }

    /// `‖Σ_i c_i x_i g_iᵀ‖` with `c_i` from `coef`.
    fn value(&self, f: &FrameSystem, coef: impl Fn(usize) -> f64) -> f64 {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, (x, g)) in f.vectors.iter().zip(&self.g).enumerate() {
            let c = coef(i);
            if c != 0.0 {
                m.ger(c, x, g, 1.0);
            }
        }
        matrix_norm_value(&m, self.norm, self.norm).0
    }
}

fn finish(outcome: crate::search::SearchOutcome, exact_norms: bool) -> ConstantValue {
    let exactness = if exact_norms { outcome.exactness } else { Exactness::LowerBound };
    ConstantValue { value: outcome.value, exactness, witness: Some(outcome.best) }
}

/// `C_s = max_Γ ‖P_Γ S⁻¹‖` with `P_Γ = Σ_{i∈Γ} x_i f_iᵀ`. The witness marks `Γ`.
pub fn suppression_constant(f: &FrameSystem, opts: &SearchOptions) -> Result<ConstantValue> {
    let sums = SignedSums::new(f)?;
    let outcome = maximize(f.n(), opts, |gamma| {
        if gamma.count_ones() == gamma.len() {
            // P_Γ S⁻¹ = I
            return 1.0;
        }
        sums.value(f, |i| if gamma.get(i) { 1.0 } else { 0.0 })
    });
    Ok(finish(outcome, sums.exact_norms))
}

/// `C_u = max_ε ‖(Σ ε_i x_i f_iᵀ) S⁻¹‖`. Witness bit `1` means `ε_i = −1`.
pub fn unconditional_constant(f: &FrameSystem, opts: &SearchOptions) -> Result<ConstantValue> {
    let sums = SignedSums::new(f)?;
    let outcome = maximize(f.n(), opts, |eps| {
        let ones = eps.count_ones();
        if ones == 0 || ones == eps.len() {
            // ±I
            return 1.0;
        }
        sums.value(f, |i| if eps.get(i) { -1.0 } else { 1.0 })
    });
    Ok(finish(outcome, sums.exact_norms))
}

/// `Σ_j (Σ_i |a_i u*_j(x_i)|²)^{1/2} u_j` for a lattice basis `(u_j, u*_j)`.
pub fn square_function(vectors: &[Vec<f64>], coeffs: &[f64], lattice: &FrameSystem) -> Result<Vec<f64>> {
    if vectors.len() != coeffs.len() {
        return Err(mismatch(format!("{} vectors but {} coefficients", vectors.len(), coeffs.len())));
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != lattice.dim()) {
        return Err(mismatch(format!("vector of length {} in dimension {}", v.len(), lattice.dim())));
    }
    let mut out = DVector::zeros(lattice.dim());
    for j in 0..lattice.n() {
        let u_star = lattice.functional(j);
        let r = vectors
            .iter()
            .zip(coeffs)
            .map(|(x, a)| {
                let t = a * x.iter().zip(u_star.iter()).map(|(p, q)| p * q).sum::<f64>();
                t * t
            })
            .sum::<f64>()
            .sqrt();
        out.axpy(r, lattice.vector(j), 1.0);
    }
    Ok(out.iter().copied().collect())
}

/// Optimal `(c, C)` with `c‖Σa_j x_j‖ ≤ ‖Σa_j y_j‖ ≤ C‖Σa_j x_j‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equivalence {
    pub lower: f64,
    pub upper: f64,
    pub exactness: Exactness,
}

/// `(‖X₀X₁⁻¹‖⁻¹, ‖X₁X₀⁻¹‖)` for bases `x = basis0`, `y = basis1`.
pub fn equivalence_constants(basis0: &FrameSystem, basis1: &FrameSystem) -> Result<Equivalence> {
    if basis0.space() != basis1.space() {
        return Err(mismatch("bases live in different spaces".to_string()));
    }
    let x0 = basis0.vectors_matrix();
    let x1 = basis1.vectors_matrix();
    if !x0.is_square() || !x1.is_square() {
        return Err(Error::NotABasis("equivalence needs square bases".into()));
    }
    let x0_inv = basis_inverse(&x0)?;
    let x1_inv = basis_inverse(&x1)?;
    let norm = basis0.norm();
    let (a, ea) = matrix_norm_value(&(&x0 * x1_inv), norm, norm);
    let (b, eb) = matrix_norm_value(&(&x1 * x0_inv), norm, norm);
    Ok(Equivalence { lower: 1.0 / a, upper: b, exactness: ea.combine_max(eb) })
}
