//! Spanned subspaces, basis projections, restricted inverses, subspace
//! distance and the oblique projections built from them.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::frame::FrameSystem;
use crate::norm::{norm_unchecked, NormKind, NormedSpace};
use crate::operator::{invert_matrix, mat_vec, matrix_norm, max_abs_diff, DenseOperator, Exactness};
use crate::restricted::restricted_norm;

/// Rank tolerance: `σ_min / σ_max` above this counts as independent.
pub const RANK_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 400;

/// `span(generators)` inside a normed space; generators are independent.
#[derive(Debug, Clone, PartialEq)]
pub struct SpannedSubspace {
    space: NormedSpace,
    generators: DMatrix<f64>,
    label: String,
}

fn relative_rank(m: &DMatrix<f64>) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    let sv = m.singular_values();
    let top = sv.iter().fold(0.0f64, |a, s| a.max(*s));
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > RANK_TOL * top).count()
}

impl SpannedSubspace {
    pub fn new(space: NormedSpace, generators: DMatrix<f64>, label: impl Into<String>) -> Result<Self> {
        if generators.nrows() != space.dim {
            return Err(mismatch(format!(
                "generators have length {} in dimension {}",
                generators.nrows(),
                space.dim
            )));
        }
        if generators.ncols() == 0 {
            return Err(Error::Input("a subspace needs at least one generator".into()));
        }
        if generators.iter().any(|x| !x.is_finite()) {
            return Err(Error::Input("generator entries must be finite".into()));
        }
        let rank = relative_rank(&generators);
        if rank < generators.ncols() {
            return Err(Error::Input(format!(
                "{} generators span only a {rank}-dimensional subspace",
                generators.ncols()
            )));
        }
        Ok(SpannedSubspace { space, generators, label: label.into() })
    }

    pub fn from_vectors(space: NormedSpace, vectors: &[Vec<f64>], label: impl Into<String>) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != space.dim) {
            return Err(mismatch(format!("generator of length {} in dimension {}", v.len(), space.dim)));
        }
        let g = DMatrix::from_fn(space.dim, vectors.len(), |i, j| vectors[j][i]);
        SpannedSubspace::new(space, g, label)
    }

    /// `[x_i]_{i∈indices}` (0-based) for the vectors of a system.
    pub fn span_of(f: &FrameSystem, indices: &[usize], label: impl Into<String>) -> Result<Self> {
        if let Some(i) = indices.iter().find(|&&i| i >= f.n()) {
            return Err(Error::Range(format!("index {} exceeds n = {}", i + 1, f.n())));
        }
        let cols: Vec<_> = indices.iter().map(|&i| f.vector(i).clone()).collect();
        SpannedSubspace::new(f.space(), DMatrix::from_columns(&cols), label)
    }

    /// Orthonormal basis of `range(m)`.
    pub fn range_of(m: &DMatrix<f64>, space: NormedSpace, label: impl Into<String>) -> Result<Self> {
        // Pivoted QR: the leading columns of Q span the range. nalgebra's SVD
        // can return inaccurate left vectors when zero singular values repeat.
        let rank = relative_rank(m);
        if rank == 0 {
            return Err(Error::Input("operator has zero range".into()));
        }
        let q = m.clone().col_piv_qr().q();
        SpannedSubspace::new(space, q.columns(0, rank).into_owned(), label)
    }

    pub fn space(&self) -> NormedSpace {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.generators.ncols()
    }

    pub fn generators(&self) -> &DMatrix<f64> {
        &self.generators
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// `P_Γ = Σ_{i∈Γ} x_i x*_iᵀ` for a basis with its biorthogonals; `gamma` is a membership mask.
pub fn basis_projection(basis: &FrameSystem, gamma: &[bool]) -> Result<DenseOperator> {
    basis.check_basis()?;
    if gamma.len() != basis.n() {
        return Err(Error::Range(format!("index mask has length {} but the basis has {}", gamma.len(), basis.n())));
    }
    let m = crate::frame::assemble(
        basis.dim(),
        (0..basis.n()).filter(|&i| gamma[i]).map(|i| (basis.vector(i), basis.functional(i))),
    );
    Ok(DenseOperator::from_parts(m, basis.norm(), basis.norm()))
}

/// [`basis_projection`] for 1-based indices.
pub fn basis_projection_onto(basis: &FrameSystem, indices: &[usize]) -> Result<DenseOperator> {
    let mut mask = vec![false; basis.n()];
    for &i in indices {
        if i == 0 || i > basis.n() {
            return Err(Error::Range(format!("index {i} is not inside [1, {}]", basis.n())));
        }
        mask[i - 1] = true;
    }
    basis_projection(basis, &mask)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedInverse {
    /// `M|_A` in generator coordinates: `M A = B · coords`.
    pub coords: DMatrix<f64>,
    pub inverse_norm: f64,
    pub exactness: Exactness,
}

/// Least-squares coordinates of `rhs` in the columns of `b` (full column rank), via QR.
fn least_squares(b: &DMatrix<f64>, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let qr = b.clone().qr();
    let qt_rhs = qr.q().transpose() * rhs;
    qr.r()
        .solve_upper_triangular(&qt_rhs)
        .ok_or_else(|| Error::Input("generators are not independent".into()))
}

/// Inverts `M: domain → codomain` and measures `‖(M|_domain)⁻¹‖` in the ambient norm.
pub fn restricted_inverse(
    m: &DenseOperator,
    domain: &SpannedSubspace,
    codomain: &SpannedSubspace,
    cond_cap: f64,
) -> Result<RestrictedInverse> {
    if domain.dim() != codomain.dim() {
        return Err(mismatch(format!("domain has dimension {} but codomain {}", domain.dim(), codomain.dim())));
    }
    if m.cols() != domain.space().dim || m.rows() != codomain.space().dim {
        return Err(mismatch("operator shape does not match the ambient spaces".to_string()));
    }
    let a = domain.generators();
    let b = codomain.generators();
    let image = m.matrix() * a;
    let coords = least_squares(b, &image)?;
    let residual = max_abs_diff(&(b * &coords), &image);
    let scale = image.iter().fold(1.0f64, |s, x| s.max(x.abs()));
    if residual > 1e-9 * scale {
        return Err(Error::Input(format!("operator does not map the domain into the codomain (residual {residual:e})")));
    }
    let inv = invert_matrix(&coords, cond_cap)?;
    let norm = domain.space().norm;
    // b ↦ A C⁻¹ b, measured against ‖B b‖.
    let r = restricted_norm(&(a * &inv), b, codomain.space().norm, norm);
    Ok(RestrictedInverse { coords, inverse_norm: r.value, exactness: r.exactness })
}

/// One ordering of the distance: `inf { ‖u − v‖ : u ∈ S_U, v ∈ V }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneSidedDistance {
    pub value: f64,
    pub exactness: Exactness,
}

/// Distance between two subspaces: the minimum over both orderings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub value: f64,
    pub exactness: Exactness,
    /// Multi-start search value on its own; `∞` when the search is skipped.
    #[serde(with = "crate::float")]
    pub search_estimate: f64,
    /// Best feasible value: the smaller of the search and the computed value.
    pub upper_bound: f64,
    /// Certified lower bound.
    pub lower_bound: f64,
    pub from_a: OneSidedDistance,
    pub from_b: OneSidedDistance,
}

fn check_pair(a: &SpannedSubspace, b: &SpannedSubspace) -> Result<()> {
    if a.space() != b.space() {
        return Err(mismatch("subspaces live in different spaces".to_string()));
    }
    Ok(())
}

/// `d(S_U, V) = 1/‖π_U‖`, `π_U` the projection of `U ⊕ V` onto `U` along `V`.
/// Zero when the sum is not direct. Also returns a certified lower bound.
fn one_sided(u: &DMatrix<f64>, v: &DMatrix<f64>, norm: NormKind) -> (OneSidedDistance, f64) {
    let (d, k) = u.shape();
    let g = DMatrix::from_fn(d, k + v.ncols(), |i, j| if j < k { u[(i, j)] } else { v[(i, j - k)] });
    if k + v.ncols() > d || relative_rank(&g) < k + v.ncols() {
        return (OneSidedDistance { value: 0.0, exactness: Exactness::Exact }, 0.0);
    }
    if norm == NormKind::L2 {
        // σ_min((I − P_V) Q_U)
        let qu = u.clone().qr().q();
        let qv = v.clone().qr().q();
        let resid = &qu - &qv * (qv.transpose() * &qu);
        let s = resid.singular_values().iter().fold(f64::INFINITY, |a, s| a.min(*s));
        return (OneSidedDistance { value: s, exactness: Exactness::Exact }, s);
    }
    let l = DMatrix::from_fn(d, g.ncols(), |i, j| if j < k { u[(i, j)] } else { 0.0 });
    let r = restricted_norm(&l, &g, norm, norm);
    let value = 1.0 / r.value;
    if r.exactness.is_exact() {
        return (OneSidedDistance { value, exactness: Exactness::Exact }, value);
    }
    // Extend π_U by zero on an orthogonal complement of U ⊕ V; its norm bounds ‖π_U‖ above.
    let lower = extension_bound(&g, k, norm).map_or(0.0, |n| 1.0 / n);
    (OneSidedDistance { value, exactness: Exactness::UpperBound }, lower)
}

/// Upper bound on `‖[U 0 0][U V W]⁻¹‖`, exact for `ℓ1`, `ℓ2`, `ℓ∞` and by
/// Riesz–Thorin interpolation otherwise.
fn extension_bound(g: &DMatrix<f64>, k: usize, norm: NormKind) -> Option<f64> {
    let d = g.nrows();
    let full = if g.ncols() < d {
        let q = g.clone().qr().q();
        // orthonormal basis of range(g)ᗮ
        let proj = DMatrix::<f64>::identity(d, d) - &q * q.transpose();
        let w = SpannedSubspace::range_of(&proj, NormedSpace { dim: d, norm }, "complement").ok()?;
        let mut cols: Vec<_> = g.column_iter().map(|c| c.into_owned()).collect();
        cols.extend(w.generators().column_iter().map(|c| c.into_owned()));
        DMatrix::from_columns(&cols)
    } else {
        g.clone()
    };
    let inv = invert_matrix(&full, 1e14).ok()?;
    let mut sel = DMatrix::zeros(d, d);
    for j in 0..k {
        sel.set_column(j, &full.column(j));
    }
    let m = sel * inv;
    match norm {
        NormKind::Lp(p) => {
            let n1 = matrix_norm(&m, NormKind::L1, NormKind::L1).value;
            let ni = matrix_norm(&m, NormKind::LInf, NormKind::LInf).value;
            Some(n1.powf(1.0 / p) * ni.powf(1.0 - 1.0 / p))
        }
        _ => Some(matrix_norm(&m, norm, norm).value),
    }
}

/// Multi-start local minimisation of `‖Ua − Vb‖ / ‖Ua‖`; every evaluated
/// point is a feasible pair, so the result is an upper bound.
fn search_upper(u: &DMatrix<f64>, v: &DMatrix<f64>, norm: NormKind, effort: usize, seed: u64) -> f64 {
    let (k, l) = (u.ncols(), v.ncols());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eval = |c: &[f64]| -> f64 {
        let ua = mat_vec(u, &c[..k]);
        let den = norm_unchecked(&ua, norm);
        if den == 0.0 {
            return f64::INFINITY;
        }
        let b: Vec<f64> = if norm == NormKind::L2 {
            // exact inner minimiser
            match least_squares(v, &DMatrix::from_column_slice(ua.len(), 1, &ua)) {
                Ok(x) => x.iter().copied().collect(),
                Err(_) => c[k..].to_vec(),
            }
        } else {
            c[k..].to_vec()
        };
        let vb = mat_vec(v, &b);
        let diff: Vec<f64> = ua.iter().zip(&vb).map(|(p, q)| p - q).collect();
        norm_unchecked(&diff, norm) / den
    };
    let dims = if norm == NormKind::L2 { k } else { k + l };
    let mut best = f64::INFINITY;
    for _ in 0..effort.max(1) {
        let mut c: Vec<f64> = (0..k + l).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut val = eval(&c);
        let mut step = 0.5;
        let mut sweeps = 0;
        while step > 1e-9 && sweeps < MAX_SWEEPS {
            sweeps += 1;
            let mut moved = false;
            for i in 0..dims {
                for dir in [step, -step] {
                    c[i] += dir;
                    let w = eval(&c);
                    if w < val {
                        val = w;
                        moved = true;
                        break;
                    }
                    c[i] -= dir;
                }
            }
            if !moved {
                step *= 0.5;
            }
            // the ratio is scale invariant; keep the iterate bounded
            let size = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if size > 4.0 || (size < 0.25 && size > 0.0) {
                c.iter_mut().for_each(|x| *x /= size);
            }
        }
        best = best.min(val);
    }
    best
}

/// `d(A, B) = inf { ‖x − y‖ : x ∈ S_A, y ∈ B or x ∈ S_B, y ∈ A }`.
///
/// Exact for `ℓ2` (principal angles) and for `ℓ1`/`ℓ∞` while vertex
/// enumeration fits; otherwise an upper bound with a certified lower bound.
/// `effort` is the restart count of the cross-checking search; `0` skips it.
pub fn subspace_distance(a: &SpannedSubspace, b: &SpannedSubspace, effort: usize) -> Result<DistanceReport> {
    check_pair(a, b)?;
    let norm = a.space().norm;
    let (u, v) = (a.generators(), b.generators());
    let (from_a, low_a) = one_sided(u, v, norm);
    let (from_b, low_b) = one_sided(v, u, norm);
    let search = if effort == 0 {
        f64::INFINITY
    } else {
        search_upper(u, v, norm, effort, 0xd15).min(search_upper(v, u, norm, effort, 0xd16))
    };
    let exact = from_a.exactness.is_exact() && from_b.exactness.is_exact();
    let computed = from_a.value.min(from_b.value);
    let (value, exactness) = if exact { (computed, Exactness::Exact) } else { (computed.min(search), Exactness::UpperBound) };
    Ok(DistanceReport {
        value,
        exactness,
        search_estimate: search,
        upper_bound: search.min(computed),
        lower_bound: if exact { computed } else { low_a.min(low_b) },
        from_a,
        from_b,
    })
}

/// Independence and partial-sum bounds of a finite sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasicSequenceCheck {
    pub rank: usize,
    pub independent: bool,
    /// `rank` equals the ambient dimension.
    pub spanning: bool,
    /// `max_n sup ‖Σ_{i≤n} a_i x_i‖ / ‖Σ a_i x_i‖`, at least 1; `∞` if dependent.
    #[serde(with = "crate::float")]
    pub basis_constant: f64,
    pub exactness: Exactness,
}

/// Checks that the columns of `vectors` form a basic sequence in the given norm.
pub fn basic_sequence_check(vectors: &DMatrix<f64>, norm: NormKind) -> BasicSequenceCheck {
    let (d, k) = vectors.shape();
    let rank = relative_rank(vectors);
    let independent = rank == k && k > 0;
    if !independent {
        return BasicSequenceCheck {
            rank,
            independent,
            spanning: rank == d,
            basis_constant: f64::INFINITY,
            exactness: Exactness::Exact,
        };
    }
    let mut best = 1.0f64;
    let mut exactness = Exactness::Exact;
    let mut partial = DMatrix::zeros(d, k);
    for n in 0..k {
        partial.set_column(n, &vectors.column(n));
        let r = restricted_norm(&partial, vectors, norm, norm);
        best = best.max(r.value);
        exactness = exactness.combine_max(r.exactness);
    }
    BasicSequenceCheck { rank, independent, spanning: rank == d, basis_constant: best, exactness }
}

/// `Q = (P|_Z)⁻¹ P`, a projection onto `Z` with the kernel of `P`.
pub fn oblique_projection(p: &DenseOperator, z: &SpannedSubspace, cond_cap: f64) -> Result<DenseOperator> {
    if !p.is_square() || p.rows() != z.space().dim {
        return Err(mismatch("projection does not act on the subspace's space".to_string()));
    }
    let pm = p.matrix();
    let scale = pm.iter().fold(1.0f64, |s, x| s.max(x.abs()));
    let idem = max_abs_diff(&(pm * pm), pm);
    if idem > 1e-9 * scale {
        return Err(Error::Input(format!("operator is not a projection (‖P² − P‖_max = {idem:e})")));
    }
    let y = SpannedSubspace::range_of(pm, z.space(), "range(P)")?;
    if y.dim() != z.dim() {
        return Err(mismatch(format!("range of P has dimension {} but Z has {}", y.dim(), z.dim())));
    }
    let r = restricted_inverse(p, z, &y, cond_cap)?;
    let c_inv = invert_matrix(&r.coords, cond_cap)?;
    // Y is orthonormal, so Yᵀ P x are the coordinates of P x.
    let q = z.generators() * c_inv * y.generators().transpose() * pm;
    Ok(DenseOperator::from_parts(q, p.domain_norm(), p.codomain_norm()))
}

/// `R = (Q|_{X₁})⁻¹ Q + ((I − P)|_{Y₂})⁻¹ (I − P)` for `P` onto `X₁` along
/// `X₂` and `Q` onto `Y₁` along `Y₂`. Requires `d(X₁, Y₂) > 0`.
pub fn direct_sum_projection(p: &DenseOperator, q: &DenseOperator, cond_cap: f64) -> Result<DenseOperator> {
    if !p.is_square() || p.matrix().shape() != q.matrix().shape() {
        return Err(mismatch("projections must be square and of equal size".to_string()));
    }
    let d = p.rows();
    let space = NormedSpace::new(d, p.domain_norm())?;
    let eye = DMatrix::<f64>::identity(d, d);
    let x1 = SpannedSubspace::range_of(p.matrix(), space, "X1")?;
    let i_minus_q = &eye - q.matrix();
    let y2 = SpannedSubspace::range_of(&i_minus_q, space, "Y2")?;
    let dist = subspace_distance(&x1, &y2, 8)?;
    if !(dist.lower_bound > RANK_TOL) {
        return Err(Error::DistanceZero { bound: dist.lower_bound });
    }
    let i_minus_p = DenseOperator::from_parts(&eye - p.matrix(), p.domain_norm(), p.codomain_norm());
    let first = oblique_projection(q, &x1, cond_cap)?;
    let second = oblique_projection(&i_minus_p, &y2, cond_cap)?;
    first.add(&second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::DEFAULT_COND_CAP;
    use nalgebra::dmatrix;

    fn sp(d: usize, k: NormKind) -> NormedSpace {
        NormedSpace::new(d, k).unwrap()
    }

    fn standard(d: usize) -> FrameSystem {
        let v = (0..d).map(|i| (0..d).map(|j| f64::from(u8::from(i == j))).collect()).collect();
        FrameSystem::from_basis(sp(d, NormKind::L1), v, "e").unwrap()
    }

    #[test]
    fn basis_projection_examples() {
        let e = standard(3);
        assert_eq!(basis_projection(&e, &[true; 3]).unwrap().matrix(), &DMatrix::identity(3, 3));
        assert_eq!(basis_projection(&e, &[false; 3]).unwrap().matrix(), &DMatrix::zeros(3, 3));
        let p1 = basis_projection_onto(&e, &[1]).unwrap();
        assert_eq!(p1.matrix(), &dmatrix![1.0, 0.0, 0.0; 0.0, 0.0, 0.0; 0.0, 0.0, 0.0]);
        assert!(basis_projection_onto(&e, &[4]).is_err());
    }

    #[test]
    fn range_of_rank_deficient_oblique_projection() {
        // A diag(1, 1, 0, 0, 0, 0) A⁻¹ with a repeated zero singular value.
        let a = DMatrix::from_fn(6, 6, |i, j| 1.0 / (1.0 + i as f64 + 2.0 * j as f64) + f64::from(u8::from(i == j)));
        let mut diag = DMatrix::zeros(6, 6);
        diag[(0, 0)] = 1.0;
        diag[(1, 1)] = 1.0;
        let p = &a * diag * a.clone().try_inverse().unwrap();
        let y = SpannedSubspace::range_of(&p, sp(6, NormKind::L1), "y").unwrap();
        assert_eq!(y.dim(), 2);
        assert!(max_abs_diff(&(&p * y.generators()), y.generators()) < 1e-12);
    }

    #[test]
    fn restricted_inverse_examples() {
        let s = sp(3, NormKind::L1);
        let span12 = SpannedSubspace::from_vectors(s, &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]], "e1,e2").unwrap();
        let id = DenseOperator::identity(3, NormKind::L1);
        let r = restricted_inverse(&id, &span12, &span12, DEFAULT_COND_CAP).unwrap();
        assert_eq!(r.inverse_norm, 1.0);
        let r = restricted_inverse(&id.scale(2.0), &span12, &span12, DEFAULT_COND_CAP).unwrap();
        assert_eq!(r.inverse_norm, 0.5);

        let s2 = sp(2, NormKind::L1);
        let p = basis_projection_onto(&standard(2), &[1]).unwrap();
        let diag = SpannedSubspace::from_vectors(s2, &[vec![1.0, 1.0]], "e1+e2").unwrap();
        let e1 = SpannedSubspace::from_vectors(s2, &[vec![1.0, 0.0]], "e1").unwrap();
        let r = restricted_inverse(&p, &diag, &e1, DEFAULT_COND_CAP).unwrap();
        assert_eq!(r.inverse_norm, 2.0);
        assert_eq!(r.exactness, Exactness::Exact);
    }

    #[test]
    fn distance_examples() {
        let s = sp(4, NormKind::L1);
        let e1 = SpannedSubspace::from_vectors(s, &[vec![1.0, 0.0, 0.0, 0.0]], "e1").unwrap();
        let e2 = SpannedSubspace::from_vectors(s, &[vec![0.0, 1.0, 0.0, 0.0]], "e2").unwrap();
        let same = subspace_distance(&e1, &e1, 4).unwrap();
        assert_eq!(same.value, 0.0);
        let r = subspace_distance(&e1, &e2, 4).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.exactness, Exactness::Exact);

        let chain = SpannedSubspace::from_vectors(
            s,
            &[vec![1.0, 1.0, 0.0, 0.0], vec![0.0, 1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0, 1.0]],
            "chain",
        )
        .unwrap();
        let r = subspace_distance(&e1, &chain, 8).unwrap();
        // e₁ is at distance 1 from the chain; the chain's unit vector
        // (e₁ + e₄)/2 is at distance 1/2 from span(e₁).
        assert!((r.from_a.value - 1.0).abs() < 1e-12);
        assert!((r.from_b.value - 0.5).abs() < 1e-12);
        assert!((r.value - 0.5).abs() < 1e-12);
        assert!(r.upper_bound >= r.value - 1e-12);
    }

    #[test]
    fn l2_distance_is_the_principal_angle_sine() {
        let s = sp(2, NormKind::L2);
        let a = SpannedSubspace::from_vectors(s, &[vec![1.0, 0.0]], "a").unwrap();
        let t = 0.3f64;
        let b = SpannedSubspace::from_vectors(s, &[vec![t.cos(), t.sin()]], "b").unwrap();
        let r = subspace_distance(&a, &b, 6).unwrap();
        assert!((r.value - t.sin()).abs() < 1e-14);
        assert!((r.upper_bound - r.value).abs() < 1e-6);
    }

    #[test]
    fn basic_sequences() {
        let chain = DMatrix::from_column_slice(3, 2, &[1.0, 1.0, 0.0, 0.0, 1.0, 1.0]);
        let c = basic_sequence_check(&chain, NormKind::L1);
        assert!(c.independent && !c.spanning);
        assert_eq!(c.basis_constant, 1.0);
        let summing = DMatrix::from_column_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]);
        assert_eq!(basic_sequence_check(&summing, NormKind::LInf).basis_constant, 2.0);
        let dep = DMatrix::from_column_slice(2, 2, &[1.0, 1.0, 2.0, 2.0]);
        assert!(!basic_sequence_check(&dep, NormKind::L1).independent);
    }

    #[test]
    fn oblique_projection_examples() {
        let s = sp(2, NormKind::L1);
        let p = basis_projection_onto(&standard(2), &[1]).unwrap();
        let e1 = SpannedSubspace::from_vectors(s, &[vec![1.0, 0.0]], "e1").unwrap();
        let q = oblique_projection(&p, &e1, DEFAULT_COND_CAP).unwrap();
        assert!(max_abs_diff(q.matrix(), p.matrix()) < 1e-15);
        let diag = SpannedSubspace::from_vectors(s, &[vec![1.0, 1.0]], "e1+e2").unwrap();
        let q = oblique_projection(&p, &diag, DEFAULT_COND_CAP).unwrap();
        assert!(max_abs_diff(q.matrix(), &dmatrix![1.0, 0.0; 1.0, 0.0]) < 1e-14);
        assert!(max_abs_diff(&(q.matrix() * q.matrix()), q.matrix()) < 1e-14);
        let not_proj = DenseOperator::new(dmatrix![2.0, 0.0; 0.0, 0.0], NormKind::L1).unwrap();
        assert!(oblique_projection(&not_proj, &e1, DEFAULT_COND_CAP).is_err());
    }

    #[test]
    fn direct_sum_examples() {
        let p = basis_projection_onto(&standard(2), &[1]).unwrap();
        let r = direct_sum_projection(&p, &p, DEFAULT_COND_CAP).unwrap();
        assert!(max_abs_diff(r.matrix(), &DMatrix::identity(2, 2)) < 1e-14);
        // Q projects onto e₂ along e₁, so Y₂ = span(e₁) = X₁.
        let q = basis_projection_onto(&standard(2), &[2]).unwrap();
        assert!(matches!(direct_sum_projection(&p, &q, DEFAULT_COND_CAP), Err(Error::DistanceZero { .. })));
    }
}
