//! Named systems and counterexamples, truncated to dimension `d`.
//!
//! Each family takes its first `d` vectors and restricts them to coordinates
//! `1..=d`; a vector whose formula reaches past `e_d` loses those entries.
//! All entries are integers.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::frame::{biorthogonals, FrameSystem};
use crate::norm::{NormKind, NormedSpace};
use crate::pattern::WeavePattern;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GalleryName {
    /// `e_j` in `ℓ1`.
    StandardL1,
    /// `e_j` in `c0` (sup norm).
    StandardC0,
    /// `s_j = e_1 + … + e_j` in `c0`.
    SummingC0,
    /// `x_1 = e_1`, `x_n = e_n − e_{n−1}` in `ℓ1`.
    DifferenceL1,
    /// `x_{2n−1} = e_{2n−1}`, `x_{2n} = e_{2n} − e_{2n−1}` in `ℓ1`.
    BlockPairA0,
    /// `x_{2n−1} = e_n`, `x_{2n} = e_{2n} − e_{2n−1}`; dependent for `d ≥ 3`.
    BlockPairA0Literal,
    /// `x_1 = e_1`, `x_2 = e_2`, `x_{2n−1} = e_{2n−1} − e_{2n−2}`, `x_{2n} = e_{2n}` in `ℓ1`.
    BlockPairA1,
    /// `x_{2n−1} = e_{2n−1} + e_{2n}`, `x_{2n} = e_{2n−1} − e_{2n}` in `ℓ1`; even `d`.
    SubspacePairB0,
    /// `x_1 = e_1`, `x_{2n} = e_{2n} + e_{2n+1}`, `x_{2n+1} = e_{2n} − e_{2n+1}` in `ℓ1`.
    SubspacePairB1,
    /// The pattern `σ(i) = i mod 2` (1-based), i.e. `1010…`.
    AlternatingWeave,
}

impl GalleryName {
    pub const ALL: [GalleryName; 10] = [
        GalleryName::StandardL1,
        GalleryName::StandardC0,
        GalleryName::SummingC0,
        GalleryName::DifferenceL1,
        GalleryName::BlockPairA0,
        GalleryName::BlockPairA0Literal,
        GalleryName::BlockPairA1,
        GalleryName::SubspacePairB0,
        GalleryName::SubspacePairB1,
        GalleryName::AlternatingWeave,
    ];

    /// Command-line spelling.
    pub fn slug(self) -> &'static str {
        match self {
            GalleryName::StandardL1 => "standard-l1",
            GalleryName::StandardC0 => "standard-c0",
            GalleryName::SummingC0 => "summing-c0",
            GalleryName::DifferenceL1 => "difference-l1",
            GalleryName::BlockPairA0 => "block-a0",
            GalleryName::BlockPairA0Literal => "block-a0-literal",
            GalleryName::BlockPairA1 => "block-a1",
            GalleryName::SubspacePairB0 => "subspace-b0",
            GalleryName::SubspacePairB1 => "subspace-b1",
            GalleryName::AlternatingWeave => "alternating",
        }
    }

    pub fn norm(self) -> NormKind {
        match self {
            GalleryName::StandardC0 | GalleryName::SummingC0 => NormKind::LInf,
            _ => NormKind::L1,
        }
    }
}

impl fmt::Display for GalleryName {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for GalleryName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        let alias = match key.as_str() {
            "standard" => Some(GalleryName::StandardL1),
            "summing" => Some(GalleryName::SummingC0),
            "difference" => Some(GalleryName::DifferenceL1),
            _ => None,
        };
        alias
            .or_else(|| {
                GalleryName::ALL
                    .into_iter()
                    .find(|n| n.slug() == key || format!("{n:?}").eq_ignore_ascii_case(&key))
            })
            .ok_or_else(|| {
                let names: Vec<_> = GalleryName::ALL.iter().map(|n| n.slug()).collect();
                Error::Input(format!("unknown gallery name {s:?}; known: {}", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GallerySpec {
    pub name: GalleryName,
    pub dim: usize,
    /// Attach biorthogonal functionals.
    pub as_frame: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generated {
    Family { vectors: Vec<Vec<f64>>, norm: NormKind, rank: usize },
    System(FrameSystem),
    Pattern(WeavePattern),
}

fn e(d: usize, k: usize) -> Vec<f64> {
    let mut v = vec![0.0; d];
    v[k - 1] = 1.0;
    v
}

/// `Σ c·e_k` over `(k, c)`, dropping `k > d`.
fn combo(d: usize, terms: &[(usize, f64)]) -> Vec<f64> {
    let mut v = vec![0.0; d];
    for &(k, c) in terms {
        if (1..=d).contains(&k) {
            v[k - 1] += c;
        }
    }
    v
}

/// Vector `i` (1-based) of a family in dimension `d`.
fn member(name: GalleryName, d: usize, i: usize) -> Vec<f64> {
    let odd = i % 2 == 1;
    match name {
        GalleryName::StandardL1 | GalleryName::StandardC0 => e(d, i),
        GalleryName::SummingC0 => (1..=d).map(|k| f64::from(u8::from(k <= i))).collect(),
        GalleryName::DifferenceL1 if i == 1 => e(d, 1),
        GalleryName::DifferenceL1 => combo(d, &[(i, 1.0), (i - 1, -1.0)]),
        GalleryName::BlockPairA0 if odd => e(d, i),
        GalleryName::BlockPairA0Literal if odd => e(d, i.div_ceil(2)),
        GalleryName::BlockPairA0 | GalleryName::BlockPairA0Literal => combo(d, &[(i, 1.0), (i - 1, -1.0)]),
        GalleryName::BlockPairA1 if i <= 2 || !odd => e(d, i),
        GalleryName::BlockPairA1 => combo(d, &[(i, 1.0), (i - 1, -1.0)]),
        GalleryName::SubspacePairB0 if odd => combo(d, &[(i, 1.0), (i + 1, 1.0)]),
        GalleryName::SubspacePairB0 => combo(d, &[(i - 1, 1.0), (i, -1.0)]),
        GalleryName::SubspacePairB1 if i == 1 => e(d, 1),
        GalleryName::SubspacePairB1 if !odd => combo(d, &[(i, 1.0), (i + 1, 1.0)]),
        GalleryName::SubspacePairB1 => combo(d, &[(i - 1, 1.0), (i, -1.0)]),
        GalleryName::AlternatingWeave => unreachable!("patterns have no vectors"),
    }
}

fn check_dim(name: GalleryName, d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::Input("gallery dimension must be positive".into()));
    }
    if name == GalleryName::SubspacePairB0 && d % 2 == 1 {
        return Err(Error::Input(format!("{name} is built from 2-blocks and needs even d, got {d}")));
    }
    Ok(())
}

/// The first `d` vectors of a family restricted to `ℝ^d`.
pub fn vectors(name: GalleryName, d: usize) -> Result<Vec<Vec<f64>>> {
    section(name, d, d)
}

/// The first `d` vectors of a family inside `ℝ^ambient`, `ambient ≥ d`.
pub fn section(name: GalleryName, d: usize, ambient: usize) -> Result<Vec<Vec<f64>>> {
    check_dim(name, d)?;
    if name == GalleryName::AlternatingWeave {
        return Err(Error::Input("alternating is a pattern, not a vector family".into()));
    }
    if ambient < d {
        return Err(Error::Input(format!("ambient dimension {ambient} is below the section length {d}")));
    }
    Ok((1..=d).map(|i| member(name, ambient, i)).collect())
}

/// The family with biorthogonal functionals; `NotABasis` if it is not one.
pub fn system(name: GalleryName, d: usize) -> Result<FrameSystem> {
    let v = vectors(name, d)?;
    let duals = biorthogonals(&v)?;
    FrameSystem::new(NormedSpace::new(d, name.norm())?, v, duals, format!("{name}[{d}]"))
}

fn rank(vectors: &[Vec<f64>]) -> usize {
    let d = vectors.first().map_or(0, Vec::len);
    let m = nalgebra::DMatrix::from_fn(d, vectors.len(), |i, j| vectors[j][i]);
    let sv = m.singular_values();
    let top = sv.iter().fold(0.0f64, |a, s| a.max(*s));
    sv.iter().filter(|s| **s > 1e-10 * top).count()
}

pub fn generate(spec: &GallerySpec) -> Result<Generated> {
    check_dim(spec.name, spec.dim)?;
    if spec.name == GalleryName::AlternatingWeave {
        return Ok(Generated::Pattern(WeavePattern::alternating(spec.dim)));
    }
    if spec.as_frame {
        return system(spec.name, spec.dim).map(Generated::System);
    }
    let v = vectors(spec.name, spec.dim)?;
    let r = rank(&v);
    Ok(Generated::Family { vectors: v, norm: spec.name.norm(), rank: r })
}

/// Rank of the truncated family (a basis iff equal to `d`).
pub fn family_rank(name: GalleryName, d: usize) -> Result<usize> {
    Ok(rank(&vectors(name, d)?))
}
