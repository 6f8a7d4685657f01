//! Dense operators between finite `ℓp` spaces, their operator norms, and
//! guarded inversion.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::norm::{norm_unchecked, norming_functional, NormKind};

/// Condition numbers above this are treated as "not invertible at this scale".
pub const DEFAULT_COND_CAP: f64 = 1e12;
/// Entrywise bound on `M·M⁻¹ − I` accepted by [`invert`].
pub const INVERSE_RESIDUAL_TOL: f64 = 1e-9;
/// Multi-start count for norms without a closed form.
pub const ASCENT_STARTS: usize = 64;
/// Largest sign-vertex enumeration used for exact `ℓ∞`-domain norms.
const MAX_VERTEX_BITS: usize = 20;

/// How a reported number relates to the true quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    LowerBound,
    UpperBound,
}

impl Exactness {
    /// Exactness of the maximum of several quantities.
    pub fn combine_max(self, other: Exactness) -> Exactness {
        use Exactness::*;
        match (self, other) {
            (Exact, Exact) => Exact,
            (UpperBound, _) | (_, UpperBound) => UpperBound,
            _ => LowerBound,
        }
    }

    pub fn is_exact(self) -> bool {
        self == Exactness::Exact
    }
}

/// A real matrix viewed as an operator `(ℝ^cols, domain) → (ℝ^rows, codomain)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    matrix: DMatrix<f64>,
    domain: NormKind,
    codomain: NormKind,
}

impl DenseOperator {
    /// Operator on a single space (`domain = codomain`).
    pub fn new(matrix: DMatrix<f64>, norm: NormKind) -> Result<Self> {
        Self::between(matrix, norm, norm)
    }

    pub fn between(matrix: DMatrix<f64>, domain: NormKind, codomain: NormKind) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(Error::Input("operator must have at least one row and column".into()));
        }
        if let Some(x) = matrix.iter().find(|x| !x.is_finite()) {
            return Err(Error::Input(format!("operator has a non-finite entry ({x})")));
        }
        Ok(DenseOperator { matrix, domain, codomain })
    }

    pub fn identity(dim: usize, norm: NormKind) -> Self {
        DenseOperator { matrix: DMatrix::identity(dim, dim), domain: norm, codomain: norm }
    }

    pub fn zeros(dim: usize, norm: NormKind) -> Self {
        DenseOperator { matrix: DMatrix::zeros(dim, dim), domain: norm, codomain: norm }
    }

    /// Wraps a matrix already known to be finite and non-empty.
    pub(crate) fn from_parts(matrix: DMatrix<f64>, domain: NormKind, codomain: NormKind) -> Self {
        debug_assert!(matrix.iter().all(|x| x.is_finite()));
        DenseOperator { matrix, domain, codomain }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn domain_norm(&self) -> NormKind {
        self.domain
    }

    pub fn codomain_norm(&self) -> NormKind {
        self.codomain
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols() {
            return Err(mismatch(format!("operator expects length {}, got {}", self.cols(), x.len())));
        }
        Ok(mat_vec(&self.matrix, x))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &DenseOperator) -> Result<DenseOperator> {
        if inner.rows() != self.cols() {
            return Err(mismatch(format!(
                "cannot compose {}x{} after {}x{}",
                self.rows(),
                self.cols(),
                inner.rows(),
                inner.cols()
            )));
        }
        if inner.codomain != self.domain {
            return Err(mismatch(format!(
                "composition norms disagree: inner codomain {} vs outer domain {}",
                inner.codomain, self.domain
            )));
        }
        Ok(DenseOperator::from_parts(&self.matrix * &inner.matrix, inner.domain, self.codomain))
    }

    pub fn sub(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_same_shape(other)?;
        Ok(DenseOperator::from_parts(&self.matrix - &other.matrix, self.domain, self.codomain))
    }

    pub fn add(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_same_shape(other)?;
        Ok(DenseOperator::from_parts(&self.matrix + &other.matrix, self.domain, self.codomain))
    }

    pub fn scale(&self, factor: f64) -> DenseOperator {
        DenseOperator::from_parts(&self.matrix * factor, self.domain, self.codomain)
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &DenseOperator) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(max_abs_diff(&self.matrix, &other.matrix))
    }

    fn check_same_shape(&self, other: &DenseOperator) -> Result<()> {
        if self.matrix.shape() != other.matrix.shape() {
            return Err(mismatch(format!("shapes {:?} and {:?} differ", self.matrix.shape(), other.matrix.shape())));
        }
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(mismatch("operators act between different normed spaces".to_string()));
        }
        Ok(())
    }
}

pub(crate) fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()))
}

pub(crate) fn mat_vec(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * x[j]).sum())
        .collect()
}

pub(crate) fn mat_t_vec(m: &DMatrix<f64>, y: &[f64]) -> Vec<f64> {
    (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| m[(i, j)] * y[i]).sum())
        .collect()
}

/// An operator norm with a vector attaining (or approaching) it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpNormResult {
    pub value: f64,
    pub exactness: Exactness,
    /// Unit vector in the domain norm.
    pub witness: Vec<f64>,
}

/// `sup ‖Mx‖ / ‖x‖`.
///
/// Exact for an `ℓ1` domain (columns), an `ℓ∞` codomain (rows), `ℓ2 → ℓ2`
/// (largest singular value) and small `ℓ∞`-domain or `ℓ1`-codomain cases
/// (sign-vertex enumeration). Everything else is a multi-start ascent
/// reported as a lower bound.
pub fn operator_norm(op: &DenseOperator) -> OpNormResult {
    matrix_norm(&op.matrix, op.domain, op.codomain)
}

pub(crate) fn matrix_norm(m: &DMatrix<f64>, domain: NormKind, codomain: NormKind) -> OpNormResult {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return OpNormResult { value: 0.0, exactness: Exactness::Exact, witness: vec![0.0; cols] };
    }
    match (domain, codomain) {
        (NormKind::L1, _) => {
            let (j, value) = argmax((0..cols).map(|j| column_norm(m, j, codomain)));
            let mut witness = vec![0.0; cols];
            witness[j] = 1.0;
            OpNormResult { value, exactness: Exactness::Exact, witness }
        }
        (_, NormKind::LInf) => {
            let row_dual = domain.dual();
            let (i, value) = argmax((0..rows).map(|i| row_norm(m, i, row_dual)));
            let row: Vec<f64> = m.row(i).iter().copied().collect();
            let mut witness = norming_functional(&row, row_dual);
            if witness.iter().all(|x| *x == 0.0) {
                witness[0] = 1.0;
            }
            OpNormResult { value, exactness: Exactness::Exact, witness }
        }
        (NormKind::L2, NormKind::L2) => {
            let value = spectral_norm(m);
            let eig = (m.transpose() * m).symmetric_eigen();
            let (k, _) = argmax(eig.eigenvalues.iter().copied());
            let witness: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            OpNormResult { value, exactness: Exactness::Exact, witness }
        }
        (NormKind::LInf, _) => sign_vertex_norm(m, codomain),
        (_, NormKind::L1) => {
            // ‖M‖_{p→1} = ‖Mᵀ‖_{∞→p'}; the maximising sign vector s gives the
            // domain witness as the norming vector of Mᵀs.
            let t = m.transpose();
            let dual = sign_vertex_norm(&t, domain.dual());
            let z = mat_vec(&t, &dual.witness);
            let witness = norming_functional(&z, domain.dual());
            let value = ratio(m, &witness, domain, codomain);
            let exactness = dual.exactness;
            OpNormResult { value: if exactness.is_exact() { dual.value } else { value }, exactness, witness }
        }
        _ => power_ascent(m, domain, codomain),
    }
}

/// Value-only fast path. Agrees bit-for-bit with [`matrix_norm`]`.value`.
pub(crate) fn matrix_norm_value(m: &DMatrix<f64>, domain: NormKind, codomain: NormKind) -> (f64, Exactness) {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return (0.0, Exactness::Exact);
    }
    match (domain, codomain) {
        (NormKind::L1, _) => (argmax((0..cols).map(|j| column_norm(m, j, codomain))).1, Exactness::Exact),
        (_, NormKind::LInf) => {
            let row_dual = domain.dual();
            (argmax((0..rows).map(|i| row_norm(m, i, row_dual))).1, Exactness::Exact)
        }
        (NormKind::L2, NormKind::L2) => (spectral_norm(m), Exactness::Exact),
        _ => {
            let r = matrix_norm(m, domain, codomain);
            (r.value, r.exactness)
        }
    }
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.singular_values().iter().fold(0.0, |a: f64, s| a.max(*s))
}

fn column_norm(m: &DMatrix<f64>, j: usize, kind: NormKind) -> f64 {
    norm_unchecked(m.column(j).iter(), kind)
}

fn row_norm(m: &DMatrix<f64>, i: usize, kind: NormKind) -> f64 {
    let row: Vec<f64> = m.row(i).iter().copied().collect();
    norm_unchecked(&row, kind)
}

/// First index attaining the maximum.
fn argmax(values: impl Iterator<Item = f64>) -> (usize, f64) {
    values
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, v)| if v > bv { (i, v) } else { (bi, bv) })
}

fn ratio(m: &DMatrix<f64>, x: &[f64], domain: NormKind, codomain: NormKind) -> f64 {
    let nx = norm_unchecked(x, domain);
    if nx == 0.0 {
        return 0.0;
    }
    norm_unchecked(&mat_vec(m, x), codomain) / nx
}

/// `ℓ∞`-domain norm: maximise over the vertices `{±1}^cols` of the unit ball.
fn sign_vertex_norm(m: &DMatrix<f64>, codomain: NormKind) -> OpNormResult {
    let cols = m.ncols();
    if cols <= MAX_VERTEX_BITS {
        let mut best = (f64::NEG_INFINITY, vec![1.0; cols]);
        let mut x = vec![1.0; cols];
        // x and -x have equal norms: fix the first sign.
        for mask in 0u64..(1u64 << (cols - 1)) {
            for (j, xj) in x.iter_mut().enumerate().skip(1) {
                *xj = if (mask >> (j - 1)) & 1 == 1 { -1.0 } else { 1.0 };
            }
            let v = norm_unchecked(&mat_vec(m, &x), codomain);
            if v > best.0 {
                best = (v, x.clone());
            }
        }
        return OpNormResult { value: best.0, exactness: Exactness::Exact, witness: best.1 };
    }
    // Large case: single-flip hill climbing over sign vectors.
    let mut rng = ChaCha8Rng::seed_from_u64(0x51_6e5);
    let mut best = (f64::NEG_INFINITY, vec![1.0; cols]);
    for _ in 0..ASCENT_STARTS {
        let mut x: Vec<f64> = (0..cols).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let mut v = norm_unchecked(&mat_vec(m, &x), codomain);
        loop {
            let mut improved = false;
            for j in 0..cols {
                x[j] = -x[j];
                let w = norm_unchecked(&mat_vec(m, &x), codomain);
                if w > v {
                    v = w;
                    improved = true;
                } else {
                    x[j] = -x[j];
                }
            }
            if !improved {
                break;
            }
        }
        if v > best.0 {
            best = (v, x);
        }
    }
    OpNormResult { value: best.0, exactness: Exactness::LowerBound, witness: best.1 }
}

/// Multi-start nonlinear power iteration for `‖M‖_{p→q}` with `p, q ∈ (1, ∞)`.
fn power_ascent(m: &DMatrix<f64>, domain: NormKind, codomain: NormKind) -> OpNormResult {
    let cols = m.ncols();
    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(ASCENT_STARTS);
    for j in 0..cols.min(ASCENT_STARTS / 2) {
        let mut e = vec![0.0; cols];
        e[j] = 1.0;
        starts.push(e);
    }
    starts.push(vec![1.0; cols]);
    let mut rng = ChaCha8Rng::seed_from_u64(0xa5c3_7);
    while starts.len() < ASCENT_STARTS {
        starts.push((0..cols).map(|_| rng.random_range(-1.0..1.0)).collect());
    }

    let domain_dual = domain.dual();
    let mut best = (f64::NEG_INFINITY, vec![0.0; cols]);
    for start in starts {
        let mut x = normalize(start, domain);
        let mut value = ratio(m, &x, domain, codomain);
        for _ in 0..500 {
            let y = mat_vec(m, &x);
            if norm_unchecked(&y, codomain) == 0.0 {
                break;
            }
            let g = norming_functional(&y, codomain);
            let z = mat_t_vec(m, &g);
            let next = norming_functional(&z, domain_dual);
            let next_value = ratio(m, &next, domain, codomain);
            if next_value <= value * (1.0 + 1e-15) {
                if next_value > value {
                    x = next;
                    value = next_value;
                }
                break;
            }
            x = next;
            value = next_value;
        }
        if value > best.0 {
            best = (value, x);
        }
    }
    OpNormResult { value: best.0.max(0.0), exactness: Exactness::LowerBound, witness: best.1 }
}

fn normalize(x: Vec<f64>, kind: NormKind) -> Vec<f64> {
    let n = norm_unchecked(&x, kind);
    if n == 0.0 {
        x
    } else {
        x.into_iter().map(|v| v / n).collect()
    }
}

/// `M⁻¹`, refusing singular or ill-conditioned input.
///
/// The condition number is the exact `ℓ1` one, `‖M‖₁‖M⁻¹‖₁`.
pub fn invert(op: &DenseOperator, cond_cap: f64) -> Result<DenseOperator> {
    if !op.is_square() {
        return Err(mismatch(format!("cannot invert a {}x{} operator", op.rows(), op.cols())));
    }
    let inv = invert_matrix(&op.matrix, cond_cap)?;
    Ok(DenseOperator::from_parts(inv, op.codomain, op.domain))
}

pub(crate) fn invert_matrix(m: &DMatrix<f64>, cond_cap: f64) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(mismatch(format!("cannot invert a {}x{} matrix", n, m.ncols())));
    }
    let mut inv = m
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NotInvertible("matrix is singular".into()))?;
    if inv.iter().any(|x| !x.is_finite()) {
        return Err(Error::NotInvertible("inverse has non-finite entries".into()));
    }
    let cond = one_norm(m) * one_norm(&inv);
    if !(cond <= cond_cap) {
        return Err(Error::NotInvertible(format!("condition number {cond:e} exceeds cap {cond_cap:e}")));
    }
    let eye = DMatrix::<f64>::identity(n, n);
    let mut residual = max_abs_diff(&(m * &inv), &eye);
    if residual > 1e-12 {
        // one step of Newton refinement: X ← X + X(I − MX)
        let correction = &inv * (&eye - m * &inv);
        inv += correction;
        residual = max_abs_diff(&(m * &inv), &eye);
    }
    if !(residual <= INVERSE_RESIDUAL_TOL) {
        return Err(Error::NotInvertible(format!("inverse residual {residual:e} exceeds {INVERSE_RESIDUAL_TOL:e}")));
    }
    Ok(inv)
}

pub(crate) fn one_norm(m: &DMatrix<f64>) -> f64 {
    (0..m.ncols()).map(|j| m.column(j).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}


#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn op(m: DMatrix<f64>, k: NormKind) -> DenseOperator {
        DenseOperator::new(m, k).unwrap()
    }

    #[test]
    fn identity_norms() {
        for k in [NormKind::L1, NormKind::L2, NormKind::LInf] {
            let r = operator_norm(&DenseOperator::identity(3, k));
            assert!((r.value - 1.0).abs() < 1e-15);
            assert_eq!(r.exactness, Exactness::Exact);
        }
    }

    #[test]
    fn small_upper_triangular() {
        let m = dmatrix![1.0, -1.0; 0.0, 1.0];
        let r1 = operator_norm(&op(m.clone(), NormKind::L1));
        assert_eq!(r1.value, 2.0);
        assert_eq!(r1.witness, vec![0.0, 1.0]);
        let ri = operator_norm(&op(m, NormKind::LInf));
        assert_eq!(ri.value, 2.0);
        assert_eq!(ri.witness, vec![1.0, -1.0]);
    }

    #[test]
    fn witnesses_reproduce_exact_values() {
        let m = dmatrix![0.3, -1.7, 2.2; 0.9, 0.4, -0.1; -1.2, 0.8, 0.5];
        for k in [NormKind::L1, NormKind::L2, NormKind::LInf] {
            let r = operator_norm(&op(m.clone(), k));
            let achieved = ratio(&m, &r.witness, k, k);
            assert!((achieved - r.value).abs() <= 1e-12 * r.value, "{k}: {achieved} vs {}", r.value);
        }
    }

    #[test]
    fn lp_norm_is_a_lower_bound_close_to_truth() {
        // Diagonal matrices have ‖D‖_p = max |d_i| for every p.
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.5, -3.0, 2.0]));
        let r = operator_norm(&op(m, NormKind::Lp(3.0)));
        assert_eq!(r.exactness, Exactness::LowerBound);
        assert!((r.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_norms_use_duality() {
        let m = dmatrix![1.0, 2.0; -3.0, 0.5];
        // ℓ∞ → ℓ1 by brute force over the four sign vertices.
        let mut brute: f64 = 0.0;
        for s in [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]] {
            brute = brute.max(norm_unchecked(&mat_vec(&m, &s), NormKind::L1));
        }
        let r = matrix_norm(&m, NormKind::LInf, NormKind::L1);
        assert_eq!(r.value, brute);
        let r2 = matrix_norm(&m, NormKind::L2, NormKind::L1);
        assert_eq!(r2.exactness, Exactness::Exact);
        assert!((ratio(&m, &r2.witness, NormKind::L2, NormKind::L1) - r2.value).abs() < 1e-12);
    }

    #[test]
    fn value_fast_path_matches() {
        let m = dmatrix![0.3, -1.7; 0.9, 0.4];
        for k in [NormKind::L1, NormKind::L2, NormKind::LInf] {
            assert_eq!(matrix_norm_value(&m, k, k).0, matrix_norm(&m, k, k).value);
        }
    }

    #[test]
    fn inversion_examples() {
        let eye = DenseOperator::identity(4, NormKind::L1);
        let inv = invert(&eye, DEFAULT_COND_CAP).unwrap();
        assert_eq!(inv.matrix(), eye.matrix());

        let m = op(dmatrix![1.0, 1.0; 0.0, 1.0], NormKind::L1);
        assert_eq!(invert(&m, DEFAULT_COND_CAP).unwrap().matrix(), &dmatrix![1.0, -1.0; 0.0, 1.0]);

        let singular = op(dmatrix![1.0, 1.0; 1.0, 1.0], NormKind::L1);
        assert!(matches!(invert(&singular, DEFAULT_COND_CAP), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn condition_cap_is_enforced() {
        let m = op(dmatrix![1.0, 0.0; 0.0, 1e-7], NormKind::L2);
        assert!(invert(&m, 1e6).is_err());
        assert!(invert(&m, 1e8).is_ok());
    }

    #[test]
    fn rejects_non_finite_entries() {
        assert!(DenseOperator::new(dmatrix![1.0, f64::NAN], NormKind::L1).is_err());
    }

    #[test]
    fn compose_checks_shapes_and_norms() {
        let a = op(dmatrix![1.0, 2.0; 3.0, 4.0], NormKind::L1);
        let b = DenseOperator::between(dmatrix![1.0; 1.0], NormKind::L2, NormKind::L1).unwrap();
        let c = a.compose(&b).unwrap();
        assert_eq!(c.matrix(), &dmatrix![3.0; 7.0]);
        assert_eq!(c.domain_norm(), NormKind::L2);
        assert!(b.compose(&a).is_err());
        let wrong = op(dmatrix![1.0, 0.0; 0.0, 1.0], NormKind::LInf);
        assert!(a.compose(&wrong).is_err());
    }
}
