//! `sup_{c≠0} ‖Lc‖ / ‖Gc‖` for a full-column-rank embedding `G`.
//!
//! This is the norm of the map `Gc ↦ Lc` from the subspace `range(G)` with
//! the ambient norm. The unit ball of that subspace is a polytope for `ℓ1`
//! and `ℓ∞`, so the supremum of the convex numerator is attained at one of
//! its vertices; these are enumerated exactly while their number stays
//! under a cap.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::norm::{norm_unchecked, NormKind};
use crate::operator::{invert_matrix, mat_vec, matrix_norm, Exactness, ASCENT_STARTS};

/// Largest number of vertex candidates enumerated.
pub const VERTEX_CAP: u64 = 400_000;

#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedNorm {
    pub value: f64,
    pub exactness: Exactness,
    /// Coordinates `c` of a maximiser.
    pub coords: Vec<f64>,
}

fn ratio(l: &DMatrix<f64>, g: &DMatrix<f64>, c: &[f64], dom: NormKind, cod: NormKind) -> f64 {
    let den = norm_unchecked(&mat_vec(g, c), dom);
    if den == 0.0 {
        return 0.0;
    }
    norm_unchecked(&mat_vec(l, c), cod) / den
}

pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u64 = 1;
    for i in 0..k {
        r = r.saturating_mul((n - i) as u64) / (i as u64 + 1);
    }
    r
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Largest ratio over candidate coordinate vectors; first maximiser wins.
fn best_of(
    l: &DMatrix<f64>,
    g: &DMatrix<f64>,
    dom: NormKind,
    cod: NormKind,
    candidates: Vec<Vec<f64>>,
) -> (f64, Vec<f64>) {
    let (v, i) = candidates
        .par_iter()
        .enumerate()
        .map(|(i, c)| (ratio(l, g, c, dom, cod), i))
        .reduce(|| (f64::NEG_INFINITY, usize::MAX), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    if i == usize::MAX {
        (0.0, vec![0.0; g.ncols()])
    } else {
        (v, candidates[i].clone())
    }
}

/// Determinant by LU; `0` for singular input.
fn det(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    m.clone().lu().determinant()
}

/// Null vector of a `(k−1) × k` matrix by signed maximal minors. `None` if
/// the rows are (numerically) dependent.
fn null_vector(a: &DMatrix<f64>) -> Option<Vec<f64>> {
    let k = a.ncols();
    let scale: f64 = (0..a.nrows()).map(|i| a.row(i).norm()).product();
    let c: Vec<f64> = (0..k)
        .map(|j| {
            let minor = a.clone().remove_column(j);
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            s * det(&minor)
        })
        .collect();
    let size = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    (size > 1e-10 * scale.max(f64::MIN_POSITIVE)).then_some(c)
}

fn select_rows(g: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
    g.select_rows(rows.iter())
}

/// Vertices of `{c : ‖Gc‖₁ ≤ 1}` up to scale: null vectors of `(k−1)`-row subsets.
fn l1_candidates(g: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let (d, k) = g.shape();
    if k == 1 {
        return vec![vec![1.0]];
    }
    combinations(d, k - 1)
        .into_par_iter()
        .filter_map(|rows| null_vector(&select_rows(g, &rows)))
        .collect()
}

/// Vertices of `{c : ‖Gc‖_∞ ≤ 1}`: `G_R c = s` for `k`-row subsets `R` and signs `s`.
fn linf_candidates(g: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let (d, k) = g.shape();
    combinations(d, k)
        .into_par_iter()
        .flat_map_iter(|rows| {
            let sub = select_rows(g, &rows);
            let inv = invert_matrix(&sub, 1e14).ok();
            let signs = 1u64 << (k - 1);
            (0..signs).filter_map(move |mask| {
                let inv = inv.as_ref()?;
                let s: Vec<f64> = (0..k)
                    .map(|i| if i > 0 && (mask >> (i - 1)) & 1 == 1 { -1.0 } else { 1.0 })
                    .collect();
                Some(mat_vec(inv, &s))
            })
        })
        .collect()
}

/// Multi-start coordinate pattern search; a lower bound.
fn local_search(l: &DMatrix<f64>, g: &DMatrix<f64>, dom: NormKind, cod: NormKind, seed: u64) -> (f64, Vec<f64>) {
    let k = g.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (0.0, vec![0.0; k]);
    for s in 0..ASCENT_STARTS {
        let mut c: Vec<f64> = if s < k {
            (0..k).map(|i| f64::from(u8::from(i == s))).collect()
        } else {
            (0..k).map(|_| rng.random_range(-1.0..1.0)).collect()
        };
        let mut v = ratio(l, g, &c, dom, cod);
        let mut step = 0.5;
        while step > 1e-10 {
            let mut moved = false;
            for i in 0..k {
                for dir in [step, -step] {
                    c[i] += dir;
                    let w = ratio(l, g, &c, dom, cod);
                    if w > v {
                        v = w;
                        moved = true;
                        break;
                    }
                    c[i] -= dir;
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        if v > best.0 {
            best = (v, c);
        }
    }
    best
}

/// `sup ‖Lc‖_cod / ‖Gc‖_dom`. `G` must have full column rank.
pub fn restricted_norm(l: &DMatrix<f64>, g: &DMatrix<f64>, dom: NormKind, cod: NormKind) -> RestrictedNorm {
    let (d, k) = g.shape();
    debug_assert_eq!(l.ncols(), k);
    if k == 0 {
        return RestrictedNorm { value: 0.0, exactness: Exactness::Exact, coords: vec![] };
    }
    if d == k {
        if let Ok(inv) = invert_matrix(g, 1e14) {
            let r = matrix_norm(&(l * &inv), dom, cod);
            return RestrictedNorm { value: r.value, exactness: r.exactness, coords: mat_vec(&inv, &r.witness) };
        }
    }
    match dom {
        NormKind::L2 => {
            // ‖Gc‖₂ = ‖Rc‖₂ for G = QR, so c = R⁻¹b with b on the unit sphere.
            let r = g.clone().qr().r();
            let map = r.try_inverse().expect("full column rank");
            let n = matrix_norm(&(l * &map), NormKind::L2, cod);
            RestrictedNorm { value: n.value, exactness: n.exactness, coords: mat_vec(&map, &n.witness) }
        }
        NormKind::L1 if binomial(d, k - 1) <= VERTEX_CAP => {
            let (value, coords) = best_of(l, g, dom, cod, l1_candidates(g));
            RestrictedNorm { value, exactness: Exactness::Exact, coords }
        }
        NormKind::LInf if binomial(d, k).saturating_mul(1u64 << (k - 1).min(62)) <= VERTEX_CAP => {
            let (value, coords) = best_of(l, g, dom, cod, linf_candidates(g));
            RestrictedNorm { value, exactness: Exactness::Exact, coords }
        }
        _ => {
            let (value, coords) = local_search(l, g, dom, cod, 0x7e57);
            RestrictedNorm { value, exactness: Exactness::LowerBound, coords }
        }
    }
}
