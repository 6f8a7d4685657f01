//! Finite sequence-space norms.
//!
//! `c0` truncations are modelled by [`NormKind::LInf`]; on finitely supported
//! vectors the two norms coincide.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An `ℓp` norm on a finite truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum NormKind {
    L1,
    L2,
    LInf,
    /// `1 < p < ∞`, `p ≠ 2`. Build with [`NormKind::lp`].
    Lp(f64),
}

impl NormKind {
    /// Validated constructor. `p = 1`, `2` and `∞` map to the dedicated variants.
    pub fn lp(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::Input(format!("norm exponent must satisfy p >= 1, got {p}")));
        }
        Ok(if p == 1.0 {
            NormKind::L1
        } else if p == 2.0 {
            NormKind::L2
        } else if p.is_infinite() {
            NormKind::LInf
        } else {
            NormKind::Lp(p)
        })
    }

    /// The exponent `p`, with `∞` for `LInf`.
    pub fn exponent(self) -> f64 {
        match self {
            NormKind::L1 => 1.0,
            NormKind::L2 => 2.0,
            NormKind::LInf => f64::INFINITY,
            NormKind::Lp(p) => p,
        }
    }

    /// Norm of the dual space, `1/p + 1/q = 1`.
    pub fn dual(self) -> Self {
        match self {
            NormKind::L1 => NormKind::LInf,
            NormKind::LInf => NormKind::L1,
            NormKind::L2 => NormKind::L2,
            NormKind::Lp(p) => NormKind::Lp(p / (p - 1.0)),
        }
    }

    /// Whether operator norms between two copies of this norm are computed exactly.
    pub fn has_exact_operator_norm(self) -> bool {
        !matches!(self, NormKind::Lp(_))
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::L1 => f.write_str("l1"),
            NormKind::L2 => f.write_str("l2"),
            NormKind::LInf => f.write_str("linf"),
            NormKind::Lp(p) => write!(f, "lp:{p}"),
        }
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "l1" => Ok(NormKind::L1),
            "l2" => Ok(NormKind::L2),
            "linf" | "c0" => Ok(NormKind::LInf),
            other => {
                let p = other
                    .strip_prefix("lp:")
                    .ok_or_else(|| Error::Input(format!("unknown norm tag {s:?} (expected l1, l2, linf or lp:<p>)")))?;
                let p: f64 = p
                    .parse()
                    .map_err(|_| Error::Input(format!("cannot parse exponent in norm tag {s:?}")))?;
                NormKind::lp(p)
            }
        }
    }
}

impl TryFrom<String> for NormKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<NormKind> for String {
    fn from(k: NormKind) -> String {
        k.to_string()
    }
}

/// A truncation `ℝ^dim` equipped with an `ℓp` norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormedSpace {
    pub dim: usize,
    pub norm: NormKind,
}

impl NormedSpace {
    pub fn new(dim: usize, norm: NormKind) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input("space dimension must be at least 1".into()));
        }
        Ok(NormedSpace { dim, norm })
    }

    pub fn dual(&self) -> NormedSpace {
        NormedSpace { dim: self.dim, norm: self.norm.dual() }
    }

    pub fn norm_of(&self, v: &[f64]) -> Result<f64> {
        if v.len() != self.dim {
            return Err(crate::error::mismatch(format!(
                "vector has length {} but the space has dimension {}",
                v.len(),
                self.dim
            )));
        }
        vector_norm(v, self.norm)
    }
}

fn check_finite(v: &[f64]) -> Result<()> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(Error::Input(format!("entry {i} is not finite ({})", v[i]))),
        None => Ok(()),
    }
}

/// `(Σ|v_i|^p)^{1/p}`, or `max|v_i|` for `LInf`.
pub fn vector_norm(v: &[f64], kind: NormKind) -> Result<f64> {
    check_finite(v)?;
    Ok(norm_unchecked(v, kind))
}

/// Norm of `f` viewed as a functional, i.e. its norm in the dual exponent.
pub fn dual_norm(f: &[f64], kind: NormKind) -> Result<f64> {
    vector_norm(f, kind.dual())
}

/// Same as [`vector_norm`] without the finiteness scan; for inner loops over
/// data that is finite by construction.
pub(crate) fn norm_unchecked<'a, I>(v: I, kind: NormKind) -> f64
where
    I: IntoIterator<Item = &'a f64>,
    I::IntoIter: Clone,
{
    let it = v.into_iter();
    match kind {
        NormKind::L1 => it.map(|x| x.abs()).sum(),
        NormKind::LInf => it.fold(0.0, |m: f64, x| m.max(x.abs())),
        NormKind::L2 => {
            let scale = it.clone().fold(0.0, |m: f64, x| m.max(x.abs()));
            if scale == 0.0 {
                return 0.0;
            }
            scale * it.map(|x| (x / scale) * (x / scale)).sum::<f64>().sqrt()
        }
        NormKind::Lp(p) => {
            let scale = it.clone().fold(0.0, |m: f64, x| m.max(x.abs()));
            if scale == 0.0 {
                return 0.0;
            }
            scale * it.map(|x| (x.abs() / scale).powf(p)).sum::<f64>().powf(1.0 / p)
        }
    }
}

/// The norming vector of `v`: a dual vector `g` with `‖g‖_dual = 1` and
/// `⟨g, v⟩ = ‖v‖`. Zero for `v = 0`.
pub(crate) fn norming_functional(v: &[f64], kind: NormKind) -> Vec<f64> {
    let n = norm_unchecked(v, kind);
    if n == 0.0 {
        return vec![0.0; v.len()];
    }
    match kind {
        NormKind::L1 => v.iter().map(|x| sign(*x)).collect(),
        NormKind::LInf => {
            let i = v
                .iter()
                .enumerate()
                .fold((0, 0.0), |(bi, bv), (i, x)| if x.abs() > bv { (i, x.abs()) } else { (bi, bv) })
                .0;
            let mut g = vec![0.0; v.len()];
            g[i] = sign(v[i]);
            g
        }
        NormKind::L2 => v.iter().map(|x| x / n).collect(),
        NormKind::Lp(p) => v.iter().map(|x| sign(*x) * (x.abs() / n).powf(p - 1.0)).collect(),
    }
}

pub(crate) fn sign(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_norms() {
        assert_eq!(vector_norm(&[3.0, 4.0], NormKind::L2).unwrap(), 5.0);
        assert_eq!(vector_norm(&[1.0, -2.0, 3.0], NormKind::L1).unwrap(), 6.0);
        assert_eq!(vector_norm(&[1.0, -2.0, 3.0], NormKind::LInf).unwrap(), 3.0);
        let v = vector_norm(&[1.0, 1.0], NormKind::lp(3.0).unwrap()).unwrap();
        assert!((v - 2f64.powf(1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn dual_norm_examples() {
        assert_eq!(dual_norm(&[1.0, 1.0], NormKind::L1).unwrap(), 1.0);
        assert_eq!(dual_norm(&[1.0, 1.0], NormKind::LInf).unwrap(), 2.0);
        for k in [NormKind::L1, NormKind::L2, NormKind::LInf, NormKind::Lp(1.5)] {
            assert_eq!(dual_norm(&[0.0, 0.0, 0.0], k).unwrap(), 0.0);
        }
    }

    #[test]
    fn non_finite_rejected() {
        assert!(matches!(vector_norm(&[1.0, f64::NAN], NormKind::L1), Err(Error::Input(_))));
        assert!(vector_norm(&[f64::INFINITY], NormKind::L2).is_err());
    }

    #[test]
    fn duality_pairs() {
        assert_eq!(NormKind::L1.dual(), NormKind::LInf);
        assert_eq!(NormKind::LInf.dual(), NormKind::L1);
        assert_eq!(NormKind::L2.dual(), NormKind::L2);
        match NormKind::lp(3.0).unwrap().dual() {
            NormKind::Lp(q) => assert!((q - 1.5).abs() < 1e-15),
            other => panic!("unexpected dual {other:?}"),
        }
    }

    #[test]
    fn parse_tags() {
        assert_eq!("l1".parse::<NormKind>().unwrap(), NormKind::L1);
        assert_eq!("LINF".parse::<NormKind>().unwrap(), NormKind::LInf);
        assert_eq!("lp:2".parse::<NormKind>().unwrap(), NormKind::L2);
        assert_eq!("lp:3.5".parse::<NormKind>().unwrap(), NormKind::Lp(3.5));
        assert!("lp:0.5".parse::<NormKind>().is_err());
        assert!("l7".parse::<NormKind>().is_err());
        assert_eq!(NormKind::Lp(3.5).to_string(), "lp:3.5");
    }

    #[test]
    fn norming_functional_attains_norm() {
        let v = [0.5, -2.0, 1.25];
        for k in [NormKind::L1, NormKind::L2, NormKind::LInf, NormKind::Lp(3.0)] {
            let g = norming_functional(&v, k);
            let pairing: f64 = g.iter().zip(&v).map(|(a, b)| a * b).sum();
            let n = vector_norm(&v, k).unwrap();
            assert!((pairing - n).abs() < 1e-12, "{k}: {pairing} vs {n}");
            assert!((dual_norm(&g, k).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn space_requires_positive_dim() {
        assert!(NormedSpace::new(0, NormKind::L1).is_err());
        let s = NormedSpace::new(3, NormKind::L1).unwrap();
        assert_eq!(s.dual().norm, NormKind::LInf);
        assert!(s.norm_of(&[1.0, 2.0]).is_err());
    }
}
