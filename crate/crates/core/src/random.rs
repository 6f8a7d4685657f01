//! Seeded random instances: bases, frames, operators and perturbations.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::frame::{biorthogonals, FrameSystem};
use crate::norm::{dual_norm, vector_norm, NormKind, NormedSpace};
use crate::operator::{invert_matrix, matrix_norm, DEFAULT_COND_CAP};

fn columns(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.column_iter().map(|c| c.iter().copied().collect()).collect()
}

fn basis_from_columns(m: &DMatrix<f64>, norm: NormKind, label: &str) -> Result<FrameSystem> {
    let v = columns(m);
    let duals = biorthogonals(&v)?;
    FrameSystem::new(NormedSpace::new(m.nrows(), norm)?, v, duals, label)
}

pub fn random_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

/// Uniform entries in `[−1, 1)`, redrawn until the 2-norm condition number
/// is below `max_cond`.
pub fn random_invertible<R: Rng>(d: usize, max_cond: f64, rng: &mut R) -> DMatrix<f64> {
    loop {
        let m = random_matrix(d, d, rng);
        let sv = m.singular_values();
        let (hi, lo) = sv.iter().fold((0.0f64, f64::INFINITY), |(h, l), s| (h.max(*s), l.min(*s)));
        if lo > 0.0 && hi / lo < max_cond {
            return m;
        }
    }
}

/// A random basis with a bounded condition number, with biorthogonals.
pub fn random_basis<R: Rng>(d: usize, norm: NormKind, rng: &mut R) -> FrameSystem {
    let m = random_invertible(d, 50.0, rng);
    basis_from_columns(&m, norm, "random basis").expect("conditioned matrices are bases")
}

/// A 1-unconditional basis: a signed, scaled permutation of `e_j` for
/// `ℓ1`/`ℓ∞`/`ℓp`, or an orthogonal matrix with positive column scales for `ℓ2`.
pub fn random_unconditional_basis<R: Rng>(d: usize, norm: NormKind, rng: &mut R) -> FrameSystem {
    let scales: Vec<f64> = (0..d).map(|_| rng.random_range(0.5..2.0)).collect();
    let m = if norm == NormKind::L2 {
        let q = random_invertible(d, 1e6, rng).qr().q();
        DMatrix::from_fn(d, d, |i, j| q[(i, j)] * scales[j])
    } else {
        let mut perm: Vec<usize> = (0..d).collect();
        perm.shuffle(rng);
        let mut m = DMatrix::zeros(d, d);
        for j in 0..d {
            let s = if rng.random_bool(0.5) { -1.0 } else { 1.0 };
            m[(perm[j], j)] = s * scales[j];
        }
        m
    };
    basis_from_columns(&m, norm, "random unconditional basis").expect("monomial and orthogonal matrices are bases")
}

/// `n ≥ d` random pairs whose frame operator is invertible.
pub fn random_frame<R: Rng>(d: usize, n: usize, norm: NormKind, rng: &mut R) -> FrameSystem {
    let space = NormedSpace::new(d, norm).expect("positive dimension");
    loop {
        let x = columns(&random_matrix(d, n, rng));
        let f = columns(&random_matrix(d, n, rng));
        let fs = FrameSystem::new(space, x, f, "random frame").expect("finite entries");
        let s = crate::frame::frame_operator(&fs);
        if let Ok(inv) = invert_matrix(s.matrix(), DEFAULT_COND_CAP) {
            let c = matrix_norm(s.matrix(), norm, norm).value.max(matrix_norm(&inv, norm, norm).value);
            if c < 50.0 {
                return fs;
            }
        }
    }
}

/// `T = I − E` with `‖E‖ = deviation` in the given norm.
pub fn operator_at_distance<R: Rng>(d: usize, norm: NormKind, deviation: f64, rng: &mut R) -> DMatrix<f64> {
    let e = random_matrix(d, d, rng);
    let size = matrix_norm(&e, norm, norm).value;
    DMatrix::identity(d, d) - e * (deviation / size)
}

/// Vectors `x⁰_j + Δ_j` with `Σ ‖Δ_j‖‖x⁰*_j‖ = budget` exactly up to rounding.
pub fn perturbed_vectors<R: Rng>(basis: &FrameSystem, budget: f64, rng: &mut R) -> Vec<Vec<f64>> {
    let norm = basis.norm();
    let deltas: Vec<Vec<f64>> = (0..basis.n()).map(|_| (0..basis.dim()).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let raw: f64 = deltas
        .iter()
        .enumerate()
        .map(|(j, dlt)| {
            vector_norm(dlt, norm).expect("finite") * dual_norm(basis.functional(j).as_slice(), norm).expect("finite")
        })
        .sum();
    let t = budget / raw;
    (0..basis.n())
        .map(|j| basis.vector(j).iter().zip(&deltas[j]).map(|(x, dlt)| x + t * dlt).collect())
        .collect()
}

/// A basis whose vectors are a perturbation of `basis` with the given budget.
pub fn perturbed_basis<R: Rng>(basis: &FrameSystem, budget: f64, rng: &mut R) -> Result<FrameSystem> {
    let v = perturbed_vectors(basis, budget, rng);
    let duals = biorthogonals(&v)?;
    FrameSystem::new(basis.space(), v, duals, "perturbed basis")
}
