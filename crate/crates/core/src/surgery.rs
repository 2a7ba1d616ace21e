//! Surgery formulas for a positive integral surgery on a knot.
//!
//! The knot Floer homology of the induced knot at level `s` is the homology of
//! the three-slot mapping cone
//!
//! ```text
//! C_n(s) = B{≥s} ⊕ B{≥n+1-s} ⊕ B,   d(x, y, z) = (dx, dy, dz + x + y)
//! ```
//!
//! and the Heegaard Floer homology of the surgered manifold in the class
//! `[s] ∈ Z/n` is the homology of the cones `C_n(t)`, `t ≡ s (mod n)`, glued
//! along the chain maps `Υ_t : C_n(t) → C_n(t+n)`. Only cones with
//! `-g < t ≤ n+g` are kept; the others are acyclic.
//!
//! Cone generators carry no homological degree, so every output here is a rank
//! table.

use thiserror::Error;

use crate::gf2::{self, BitMatrix, Subquotient};
use crate::knotcx::{KnotComplex, Level, RankReport, SliceKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurgeryError {
    #[error("surgery coefficient must be a positive integer, got {0}")]
    InvalidCoefficient(i64),
    #[error("level {s} is outside the range ({lo}, {hi}]")]
    OutOfRange { s: Level, lo: Level, hi: Level },
    #[error(
        "simplicity criteria disagree for n = {n}: ranks {hfk_total} vs {hf_total}, \
         nonvanishing Υ at {witness_levels:?}"
    )]
    CriterionMismatch {
        n: i64,
        hfk_total: usize,
        hf_total: usize,
        witness_levels: Vec<Level>,
    },
    #[error("internal invariant failed: {0}")]
    Invariant(String),
}

fn check_coefficient(n: i64) -> Result<(), SurgeryError> {
    if n >= 1 {
        Ok(())
    } else {
        Err(SurgeryError::InvalidCoefficient(n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    /// `B{≥s}`
    X,
    /// `B{≥n+1-s}`
    Y,
    /// `B`
    Z,
}

/// The mapping cone `C_n(s)`. Generators are `(slot, parent index)` pairs,
/// laid out as the X block, then Y, then Z, each in parent order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeComplex {
    pub n: i64,
    pub s: Level,
    pub slots: Vec<(Slot, usize)>,
    pub d: BitMatrix,
}

impl ConeComplex {
    pub fn dim(&self) -> usize {
        self.slots.len()
    }

    pub fn position(&self, slot: Slot, parent: usize) -> Option<usize> {
        self.slots.binary_search(&(slot, parent)).ok()
    }

    pub fn homology_rank(&self) -> usize {
        self.dim() - 2 * gf2::rank(&self.d)
    }

    pub fn homology_space(&self) -> Subquotient {
        Subquotient::homology(&self.d).expect("cone differential squares to zero")
    }
}

pub fn build_cone(b: &KnotComplex, n: i64, s: Level) -> Result<ConeComplex, SurgeryError> {
    check_coefficient(n)?;
    let xs = b.slice(SliceKind::Ge, s).gens;
    let ys = b.slice(SliceKind::Ge, n + 1 - s).gens;
    let slots: Vec<(Slot, usize)> = xs
        .iter()
        .map(|&p| (Slot::X, p))
        .chain(ys.iter().map(|&p| (Slot::Y, p)))
        .chain((0..b.dim()).map(|p| (Slot::Z, p)))
        .collect();
    let mut cone = ConeComplex {
        n,
        s,
        slots,
        d: BitMatrix::zeros(0, 0),
    };
    let mut d = BitMatrix::zeros(cone.dim(), cone.dim());
    for (j, &(slot, p)) in cone.slots.iter().enumerate() {
        for &t in b.d_targets(p) {
            let i = cone
                .position(slot, t)
                .ok_or_else(|| SurgeryError::Invariant(format!("d leaves the {slot:?} slot")))?;
            d.toggle(i, j);
        }
        if slot != Slot::Z {
            d.toggle(cone.position(Slot::Z, p).unwrap(), j);
        }
    }
    if !d.mul(&d).unwrap().is_zero() {
        return Err(SurgeryError::Invariant(format!("d² ≠ 0 on C_{n}({s})")));
    }
    cone.d = d;
    Ok(cone)
}

fn support(b: &KnotComplex, n: i64) -> std::ops::RangeInclusive<Level> {
    let g = b.genus_or_zero();
    (1 - g)..=(n + g)
}

/// `s ↦ rank H_*(C_n(s))` on `-g < s ≤ n+g`. The two levels just outside the
/// range are computed too and must vanish.
pub fn hfk_ranks(b: &KnotComplex, n: i64) -> Result<RankReport<Level>, SurgeryError> {
    check_coefficient(n)?;
    let range = support(b, n);
    for edge in [*range.start() - 1, *range.end() + 1] {
        let r = build_cone(b, n, edge)?.homology_rank();
        if r != 0 {
            return Err(SurgeryError::Invariant(format!(
                "H_*(C_{n}({edge})) has rank {r} outside the support"
            )));
        }
    }
    range
        .map(|s| Ok((s, build_cone(b, n, s)?.homology_rank())))
        .collect()
}

/// Rank of the homology of the reduced cone
/// `H{≥s} ⊕ H{≥n+1-s} ⊕ H` with differential `(x, y, z) ↦ (0, 0, ι_* x + ι_* y)`.
pub fn hfk_rank_reduced(b: &KnotComplex, n: i64, s: Level) -> Result<usize, SurgeryError> {
    check_coefficient(n)?;
    let first = b.iota(s);
    let second = b.iota(n + 1 - s);
    let whole = b.homology_rank();
    let combined = first.hstack(&second).map_err(|e| SurgeryError::Invariant(e.to_string()))?;
    Ok(first.cols() + second.cols() + whole - 2 * gf2::rank(&combined))
}

/// The chain map `Υ_s : C_n(s) → C_n(s+n)` and its effect on homology.
#[derive(Debug, Clone)]
pub struct Upsilon {
    pub source: ConeComplex,
    pub target: ConeComplex,
    pub chain: BitMatrix,
    pub induced: BitMatrix,
}

impl Upsilon {
    pub fn vanishes_on_homology(&self) -> bool {
        self.induced.is_zero()
    }
}

/// `Υ_s(x, y, z) = (0, d Ξ π_s x, Ξ π_s x)`, checked to be a chain map.
pub fn upsilon(b: &KnotComplex, n: i64, s: Level) -> Result<Upsilon, SurgeryError> {
    let source = build_cone(b, n, s)?;
    let target = build_cone(b, n, s + n)?;
    let chain = upsilon_chain(b, &source, &target)?;
    let lhs = target.d.mul(&chain).unwrap();
    let rhs = chain.mul(&source.d).unwrap();
    if lhs != rhs {
        return Err(SurgeryError::Invariant(format!("Υ_{s} is not a chain map for n = {n}")));
    }
    let induced = gf2::induced_map(&chain, &source.homology_space(), &target.homology_space())
        .map_err(|e| SurgeryError::Invariant(e.to_string()))?;
    Ok(Upsilon {
        source,
        target,
        chain,
        induced,
    })
}

fn upsilon_chain(
    b: &KnotComplex,
    source: &ConeComplex,
    target: &ConeComplex,
) -> Result<BitMatrix, SurgeryError> {
    let s = source.s;
    let mut chain = BitMatrix::zeros(target.dim(), source.dim());
    for p in b.at_level(s) {
        let Some(j) = source.position(Slot::X, p) else { continue };
        let dual = b.xi(p);
        for &t in b.d_targets(dual) {
            // d(B{-s}) lies in B{≥1-s}, the Y slot of C_n(s+n).
            let i = target.position(Slot::Y, t).ok_or_else(|| {
                SurgeryError::Invariant(format!("dΞπ_{s} leaves B{{≥{}}}", 1 - s))
            })?;
            chain.toggle(i, j);
        }
        chain.toggle(target.position(Slot::Z, dual).unwrap(), j);
    }
    Ok(chain)
}

/// The truncated glued complex `G_n[r]`.
#[derive(Debug, Clone)]
pub struct GluedComplex {
    pub n: i64,
    pub residue: i64,
    pub blocks: Vec<ConeComplex>,
    pub d: BitMatrix,
}

impl GluedComplex {
    pub fn dim(&self) -> usize {
        self.d.cols()
    }

    pub fn homology_rank(&self) -> usize {
        self.dim() - 2 * gf2::rank(&self.d)
    }
}

pub fn glue(b: &KnotComplex, n: i64, residue: i64) -> Result<GluedComplex, SurgeryError> {
    check_coefficient(n)?;
    let residue = residue.rem_euclid(n);
    let blocks: Vec<ConeComplex> = support(b, n)
        .filter(|t| t.rem_euclid(n) == residue)
        .map(|t| build_cone(b, n, t))
        .collect::<Result<_, _>>()?;
    let offsets: Vec<usize> = blocks
        .iter()
        .scan(0, |acc, c| {
            let o = *acc;
            *acc += c.dim();
            Some(o)
        })
        .collect();
    let total: usize = blocks.iter().map(ConeComplex::dim).sum();
    let mut d = BitMatrix::zeros(total, total);
    for (k, block) in blocks.iter().enumerate() {
        let o = offsets[k];
        for j in 0..block.dim() {
            for i in block.d.column(j).ones() {
                d.toggle(o + i, o + j);
            }
        }
        // Blocks are consecutive in t, so block k+1 sits at level t+n.
        if let Some(next) = blocks.get(k + 1) {
            let chain = upsilon_chain(b, block, next)?;
            let on = offsets[k + 1];
            for j in 0..chain.cols() {
                for i in chain.column(j).ones() {
                    d.toggle(on + i, o + j);
                }
            }
        }
    }
    if !d.mul(&d).unwrap().is_zero() {
        return Err(SurgeryError::Invariant(format!("glued differential for [{residue}] squares to nonzero")));
    }
    Ok(GluedComplex {
        n,
        residue,
        blocks,
        d,
    })
}

/// `[s] ↦ rank H_*(G_n[s])` for every residue class mod `n`.
pub fn hf_ranks(b: &KnotComplex, n: i64) -> Result<RankReport<i64>, SurgeryError> {
    check_coefficient(n)?;
    (0..n)
        .map(|r| Ok((r, glue(b, n, r)?.homology_rank())))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simplicity {
    pub simple: bool,
    /// Levels `s` whose `(Υ_s)_*` is nonzero.
    pub witness_levels: Vec<Level>,
    pub hfk_total: usize,
    pub hf_total: usize,
}

/// Decides simplicity of the induced knot two ways, by comparing total ranks
/// and by testing every `(Υ_s)_*` for vanishing, and insists they agree.
pub fn is_simple(b: &KnotComplex, n: i64) -> Result<Simplicity, SurgeryError> {
    let hfk_total = hfk_ranks(b, n)?.total();
    let hf_total = hf_ranks(b, n)?.total();
    let mut witness_levels = Vec::new();
    for s in support(b, n) {
        if !upsilon(b, n, s)?.vanishes_on_homology() {
            witness_levels.push(s);
        }
    }
    let by_rank = hfk_total == hf_total;
    let by_maps = witness_levels.is_empty();
    if by_rank != by_maps {
        return Err(SurgeryError::CriterionMismatch {
            n,
            hfk_total,
            hf_total,
            witness_levels,
        });
    }
    Ok(Simplicity {
        simple: by_rank,
        witness_levels,
        hfk_total,
        hf_total,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Epsilon {
    pub s: Level,
    /// `H{<s} → H{≤-s}`
    pub matrix: BitMatrix,
    pub source_rank: usize,
    pub target_rank: usize,
}

impl Epsilon {
    pub fn vanishes(&self) -> bool {
        self.matrix.is_zero()
    }
}

/// `ε_s = q_{-s} ∘ Ξ_s ∘ τ_s : H{<s} → H{≤-s}` for `-g < s ≤ g`.
pub fn epsilon(b: &KnotComplex, s: Level) -> Result<Epsilon, SurgeryError> {
    let g = b.genus_or_zero();
    if !(-g < s && s <= g) {
        return Err(SurgeryError::OutOfRange { s, lo: -g, hi: g });
    }
    let tau = b.tau(s);
    let xi = b.xi_map(s);
    let q = b.q_map(-s);
    let matrix = q.mul(&xi.mul(&tau).unwrap()).unwrap();
    Ok(Epsilon {
        s,
        source_rank: matrix.cols(),
        target_rank: matrix.rows(),
        matrix,
    })
}

/// All `ε_s` on `-g < s ≤ g`.
pub fn epsilons(b: &KnotComplex) -> Vec<Epsilon> {
    let g = b.genus_or_zero();
    ((1 - g)..=g)
        .map(|s| epsilon(b, s).expect("level in range"))
        .collect()
}

/// Ranks behind the large-surgery identifications at level `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LargeSurgeryRanks {
    /// `rank H_*(C_n(s))`
    pub cone: usize,
    /// `rank H_*(C_n(s+n))`
    pub shifted_cone: usize,
    /// `rank H{<s}`
    pub below: usize,
    /// `rank H{≤-s}`
    pub dual_at_or_below: usize,
    /// `rank H{≤s}`
    pub at_or_below: usize,
}

impl LargeSurgeryRanks {
    pub fn identified(&self) -> bool {
        self.cone == self.below && self.shifted_cone == self.dual_at_or_below
    }
}

pub fn large_surgery_ranks(b: &KnotComplex, n: i64, s: Level) -> Result<LargeSurgeryRanks, SurgeryError> {
    let g = b.genus_or_zero();
    if n < 2 * g {
        return Err(SurgeryError::InvalidCoefficient(n));
    }
    if !(-g < s && s <= g) {
        return Err(SurgeryError::OutOfRange { s, lo: -g, hi: g });
    }
    Ok(LargeSurgeryRanks {
        cone: build_cone(b, n, s)?.homology_rank(),
        shifted_cone: build_cone(b, n, s + n)?.homology_rank(),
        below: b.slice(SliceKind::Lt, s).homology_rank(),
        dual_at_or_below: b.slice(SliceKind::Le, -s).homology_rank(),
        at_or_below: b.slice(SliceKind::Le, s).homology_rank(),
    })
}
