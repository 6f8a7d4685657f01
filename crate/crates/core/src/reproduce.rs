//! Reproductions of the three counterexamples as growth tables.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::frame::{basis_constant, check_approximate_frame, suppression_constant, unconditional_constant, FrameSystem};
use crate::gallery::{section, system, GalleryName};
use crate::norm::{NormKind, NormedSpace};
use crate::operator::Exactness;
use crate::pattern::WeavePattern;
use crate::search::SearchOptions;
use crate::subspace::{basic_sequence_check, subspace_distance, SpannedSubspace};
use crate::weave::{weave, worst_weaving, WeaveOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReproductionId {
    /// Summing against standard basis in `c0`.
    ConditionalC0,
    /// Difference against standard basis in `ℓ1`.
    ConditionalL1,
    /// Two unconditional block bases whose alternating weaving is the difference basis.
    BlockPair,
    /// Two unconditional bases whose alternating weaving misses `e₁`.
    SubspacePair,
}

impl ReproductionId {
    pub const ALL: [ReproductionId; 4] =
        [ReproductionId::ConditionalC0, ReproductionId::ConditionalL1, ReproductionId::BlockPair, ReproductionId::SubspacePair];

    pub fn slug(self) -> &'static str {
        match self {
            ReproductionId::ConditionalC0 => "conditional-c0",
            ReproductionId::ConditionalL1 => "conditional-l1",
            ReproductionId::BlockPair => "block-pair",
            ReproductionId::SubspacePair => "subspace-pair",
        }
    }

    /// Default dimension range.
    pub fn default_dims(self) -> Vec<usize> {
        match self {
            ReproductionId::ConditionalC0 | ReproductionId::ConditionalL1 => (2..=12).collect(),
            ReproductionId::BlockPair => (2..=10).collect(),
            ReproductionId::SubspacePair => (2..=12).step_by(2).collect(),
        }
    }
}

impl fmt::Display for ReproductionId {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for ReproductionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ReproductionId::ALL.into_iter().find(|r| r.slug() == s.trim()).ok_or_else(|| {
            let names: Vec<_> = ReproductionId::ALL.iter().map(|r| r.slug()).collect();
            Error::Input(format!("unknown reproduction {s:?}; known: {}", names.join(", ")))
        })
    }
}

/// One dimension of a conditional-pair table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalRow {
    pub d: usize,
    /// Worst `max(‖S_σ‖, ‖S_σ⁻¹‖)` over frame weavings.
    #[serde(with = "crate::float")]
    pub frame_worst: f64,
    pub frame_witness: WeavePattern,
    /// Every weaving of the vectors is a basis.
    pub all_weavings_bases: bool,
    /// Largest basis constant over the woven bases.
    #[serde(with = "crate::float")]
    pub basis_weaving_worst: f64,
    #[serde(with = "crate::float")]
    pub conditional_basis_constant: f64,
    #[serde(with = "crate::float")]
    pub conditional_suppression: f64,
    #[serde(with = "crate::float")]
    pub conditional_unconditional: f64,
    /// `D C⁻¹ − K C` with `D`, `C` from the conditional system and `K` from the standard one.
    #[serde(with = "crate::float")]
    pub not_woven_bound: f64,
    /// `frame_worst > not_woven_bound`.
    pub exceeds_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockRow {
    pub d: usize,
    #[serde(with = "crate::float")]
    pub unconditional_a0: f64,
    #[serde(with = "crate::float")]
    pub unconditional_a1: f64,
    /// Unconditional constant of the alternating weaving `1010…`.
    #[serde(with = "crate::float")]
    pub unconditional_alternating: f64,
    /// The alternating weaving equals the difference basis.
    pub alternating_is_difference: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceRow {
    pub d: usize,
    /// Ambient dimension `d + 1`: the first `d` vectors are kept whole.
    pub ambient: usize,
    /// `inf ‖e₁ − y‖` over `y` in the span of the alternating weaving `0101…`.
    #[serde(with = "crate::float")]
    pub distance_from_e1: f64,
    pub distance_exactness: Exactness,
    pub alternating_rank: usize,
    /// Every one of the `2^d` weavings is a basic sequence.
    pub all_weavings_basic: bool,
    #[serde(with = "crate::float")]
    pub worst_basis_constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Reproduction {
    Conditional {
        id: ReproductionId,
        rows: Vec<ConditionalRow>,
        /// `frame_worst` strictly increases with `d`.
        frame_growth_strict: bool,
    },
    Blocks {
        rows: Vec<BlockRow>,
        alternating_growth_strict: bool,
    },
    Subspace {
        rows: Vec<SubspaceRow>,
    },
}

impl Reproduction {
    /// `(d, headline value)` pairs for flat CSV output.
    pub fn growth(&self) -> Vec<(usize, f64)> {
        match self {
            Reproduction::Conditional { rows, .. } => rows.iter().map(|r| (r.d, r.frame_worst)).collect(),
            Reproduction::Blocks { rows, .. } => rows.iter().map(|r| (r.d, r.unconditional_alternating)).collect(),
            Reproduction::Subspace { rows } => rows.iter().map(|r| (r.d, r.distance_from_e1)).collect(),
        }
    }
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

fn exact_search() -> SearchOptions {
    SearchOptions::default()
}

fn woven_basis(w: &FrameSystem) -> Option<FrameSystem> {
    let duals = crate::frame::biorthogonals(&w.vector_rows()).ok()?;
    FrameSystem::new(w.space(), w.vector_rows(), duals, w.label()).ok()
}

fn conditional_row(standard: GalleryName, conditional: GalleryName, d: usize) -> Result<ConditionalRow> {
    let e = system(standard, d)?;
    let c = system(conditional, d)?;
    let worst = worst_weaving(&e, &c, &WeaveOptions::default())?;
    let n = d;
    let basis_consts: Vec<Option<f64>> = (0..1u64 << n)
        .into_par_iter()
        .map(|k| {
            let w = weave(&e, &c, &WeavePattern::from_index(n, k)).ok()?;
            basis_constant(&woven_basis(&w)?).ok().map(|v| v.value)
        })
        .collect();
    let all_weavings_bases = basis_consts.iter().all(Option::is_some);
    let basis_weaving_worst = basis_consts.iter().flatten().fold(0.0f64, |a, b| a.max(*b));
    let cs = suppression_constant(&c, &exact_search())?.value;
    let cu = unconditional_constant(&c, &exact_search())?.value;
    let k = suppression_constant(&e, &exact_search())?.value;
    let frame_c = check_approximate_frame(&c).c_frame.max(check_approximate_frame(&e).c_frame);
    let not_woven_bound = cs / frame_c - k * frame_c;
    Ok(ConditionalRow {
        d,
        frame_worst: worst.worst_constant,
        frame_witness: worst.worst_pattern,
        all_weavings_bases,
        basis_weaving_worst,
        conditional_basis_constant: basis_constant(&c)?.value,
        conditional_suppression: cs,
        conditional_unconditional: cu,
        not_woven_bound,
        exceeds_bound: worst.worst_constant > not_woven_bound,
    })
}

fn block_row(d: usize) -> Result<BlockRow> {
    let a0 = system(GalleryName::BlockPairA0, d)?;
    let a1 = system(GalleryName::BlockPairA1, d)?;
    let alt = weave(&a0, &a1, &WeavePattern::alternating(d))?;
    let alt_basis = woven_basis(&alt).ok_or_else(|| Error::NotABasis("alternating block weaving".into()))?;
    let diff = crate::gallery::vectors(GalleryName::DifferenceL1, d)?;
    Ok(BlockRow {
        d,
        unconditional_a0: unconditional_constant(&a0, &exact_search())?.value,
        unconditional_a1: unconditional_constant(&a1, &exact_search())?.value,
        unconditional_alternating: unconditional_constant(&alt_basis, &exact_search())?.value,
        alternating_is_difference: alt.vector_rows() == diff,
    })
}

/// Columns `x^{σ(i)}_i` of the two sections.
fn woven_columns(v0: &[Vec<f64>], v1: &[Vec<f64>], sigma: &WeavePattern) -> DMatrix<f64> {
    let rows = v0[0].len();
    DMatrix::from_fn(rows, v0.len(), |i, j| if sigma.get(j) { v1[j][i] } else { v0[j][i] })
}

fn subspace_row(d: usize) -> Result<SubspaceRow> {
    let ambient = d + 1;
    let v0 = section(GalleryName::SubspacePairB0, d, ambient)?;
    let v1 = section(GalleryName::SubspacePairB1, d, ambient)?;
    let space = NormedSpace::new(ambient, NormKind::L1)?;
    let alternating = WeavePattern::alternating(d).complement();
    let alt = woven_columns(&v0, &v1, &alternating);
    let e1 = SpannedSubspace::new(space, DMatrix::from_fn(ambient, 1, |i, _| f64::from(u8::from(i == 0))), "e1")?;
    let span = SpannedSubspace::new(space, alt.clone(), "alternating")?;
    let dist = subspace_distance(&e1, &span, 0)?;
    let checks: Vec<_> = (0..1u64 << d)
        .into_par_iter()
        .map(|k| basic_sequence_check(&woven_columns(&v0, &v1, &WeavePattern::from_index(d, k)), NormKind::L1))
        .collect();
    Ok(SubspaceRow {
        d,
        ambient,
        distance_from_e1: dist.from_a.value,
        distance_exactness: dist.from_a.exactness,
        alternating_rank: basic_sequence_check(&alt, NormKind::L1).rank,
        all_weavings_basic: checks.iter().all(|c| c.independent && c.basis_constant.is_finite()),
        worst_basis_constant: checks.iter().fold(0.0f64, |a, c| a.max(c.basis_constant)),
    })
}

/// Runs one reproduction over the given dimensions (ascending).
pub fn reproduce(id: ReproductionId, dims: &[usize]) -> Result<Reproduction> {
    if dims.is_empty() {
        return Err(Error::Input("no dimensions requested".into()));
    }
    if let Some(d) = dims.iter().find(|&&d| d < 2 || d > 16) {
        return Err(Error::Input(format!("dimension {d} is outside 2..=16")));
    }
    match id {
        ReproductionId::ConditionalC0 | ReproductionId::ConditionalL1 => {
            let (standard, conditional) = if id == ReproductionId::ConditionalC0 {
                (GalleryName::StandardC0, GalleryName::SummingC0)
            } else {
                (GalleryName::StandardL1, GalleryName::DifferenceL1)
            };
            let rows = dims.iter().map(|&d| conditional_row(standard, conditional, d)).collect::<Result<Vec<_>>>()?;
            let worst: Vec<f64> = rows.iter().map(|r| r.frame_worst).collect();
            Ok(Reproduction::Conditional { id, frame_growth_strict: strictly_increasing(&worst), rows })
        }
        ReproductionId::BlockPair => {
            let rows = dims.iter().map(|&d| block_row(d)).collect::<Result<Vec<_>>>()?;
            let alt: Vec<f64> = rows.iter().map(|r| r.unconditional_alternating).collect();
            Ok(Reproduction::Blocks { alternating_growth_strict: strictly_increasing(&alt), rows })
        }
        ReproductionId::SubspacePair => {
            if let Some(d) = dims.iter().find(|&&d| d % 2 == 1) {
                return Err(Error::Input(format!("the subspace pair needs even d, got {d}")));
            }
            Ok(Reproduction::Subspace { rows: dims.iter().map(|&d| subspace_row(d)).collect::<Result<Vec<_>>>()? })
        }
    }
}
