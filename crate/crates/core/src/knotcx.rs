//! The reduced filtered complex `B` of a knot in a homology sphere: generators
//! carrying an Alexander level and a homological degree, a differential that
//! strictly raises level and drops degree by one, and a duality involution.
//!
//! Degree convention: degrees grow toward negative levels, and the duality
//! sends a generator at `(a, m)` to one at `(-a, m + 2a)`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{self, BitMatrix, Subquotient};

pub type Level = i64;
pub type Degree = i64;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generator {
    pub id: String,
    pub a: Level,
    pub m: Degree,
}

impl Generator {
    pub fn new(id: impl Into<String>, a: Level, m: Degree) -> Self {
        Self { id: id.into(), a, m }
    }
}

/// An unchecked complex keyed by generator ids; the shape of the JSON file.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawComplex {
    pub name: String,
    pub generators: Vec<Generator>,
    pub differential: BTreeMap<String, Vec<String>>,
    pub duality: BTreeMap<String, String>,
}

/// One broken invariant, naming the generators involved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    EmptyId { index: usize },
    NonAsciiId { id: String },
    DuplicateId { id: String },
    UnknownGenerator { context: String, id: String },
    RepeatedTarget { source: String, target: String },
    LevelPreserving { source: String, target: String, level: Level },
    LevelDecreasing { source: String, target: String },
    DegreeLaw { source: String, target: String, expected: Degree, found: Degree },
    DSquaredNonzero { source: String, target: String },
    DualityMissing { id: String },
    DualityNotInvolution { id: String, image: String, back: Option<String> },
    DualityLevel { id: String, image: String, expected: Level, found: Level },
    DualityDegree { id: String, image: String, expected: Degree, found: Degree },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            EmptyId { index } => write!(f, "generator #{index} has an empty id"),
            NonAsciiId { id } => write!(f, "generator id {id:?} is not ASCII"),
            DuplicateId { id } => write!(f, "generator id {id} is used more than once"),
            UnknownGenerator { context, id } => write!(f, "{context} refers to unknown generator {id}"),
            RepeatedTarget { source, target } => {
                write!(f, "d({source}) lists {target} more than once")
            }
            LevelPreserving { source, target, level } => write!(
                f,
                "d({source}) hits {target} at the same level {level}; the complex must be reduced"
            ),
            LevelDecreasing { source, target } => {
                write!(f, "d({source}) hits {target} at a lower level")
            }
            DegreeLaw { source, target, expected, found } => write!(
                f,
                "d({source}) hits {target}: degree must be {expected}, found {found}"
            ),
            DSquaredNonzero { source, target } => {
                write!(f, "d(d({source})) contains {target}; d∘d must vanish")
            }
            DualityMissing { id } => write!(f, "duality has no image for {id}"),
            DualityNotInvolution { id, image, back } => match back {
                Some(b) => write!(f, "duality is not an involution: {id} -> {image} -> {b}"),
                None => write!(f, "duality is not an involution: {id} -> {image} -> (none)"),
            },
            DualityLevel { id, image, expected, found } => write!(
                f,
                "duality {id} -> {image}: level must be {expected}, found {found}"
            ),
            DualityDegree { id, image, expected, found } => write!(
                f,
                "m(xi({id})) must be m({id})+2·a({id})={expected}, found {found} at {image}"
            ),
        }
    }
}

impl RawComplex {
    /// Every violated invariant, in a deterministic order. Empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut index: HashMap<&str, usize> = HashMap::new();
        for (k, g) in self.generators.iter().enumerate() {
            if g.id.is_empty() {
                out.push(Violation::EmptyId { index: k });
            } else if !g.id.is_ascii() {
                out.push(Violation::NonAsciiId { id: g.id.clone() });
            }
            if index.insert(g.id.as_str(), k).is_some() {
                out.push(Violation::DuplicateId { id: g.id.clone() });
            }
        }
        let lookup = |id: &str| index.get(id).map(|&k| &self.generators[k]);

        // Differential: membership, multiplicity, level and degree laws.
        let mut targets: HashMap<&str, Vec<&str>> = HashMap::new();
        for (source, list) in &self.differential {
            let Some(src) = lookup(source) else {
                out.push(Violation::UnknownGenerator {
                    context: "differential source".into(),
                    id: source.clone(),
                });
                continue;
            };
            let mut seen = HashSet::new();
            for target in list {
                if !seen.insert(target.as_str()) {
                    out.push(Violation::RepeatedTarget {
                        source: source.clone(),
                        target: target.clone(),
                    });
                    continue;
                }
                let Some(tgt) = lookup(target) else {
                    out.push(Violation::UnknownGenerator {
                        context: format!("d({source})"),
                        id: target.clone(),
                    });
                    continue;
                };
                if tgt.a == src.a {
                    out.push(Violation::LevelPreserving {
                        source: source.clone(),
                        target: target.clone(),
                        level: src.a,
                    });
                } else if tgt.a < src.a {
                    out.push(Violation::LevelDecreasing {
                        source: source.clone(),
                        target: target.clone(),
                    });
                }
                if tgt.m != src.m - 1 {
                    out.push(Violation::DegreeLaw {
                        source: source.clone(),
                        target: target.clone(),
                        expected: src.m - 1,
                        found: tgt.m,
                    });
                }
                targets.entry(source.as_str()).or_default().push(target.as_str());
            }
        }

        // d∘d = 0, computed on the known part of the differential.
        for g in &self.generators {
            let mut parity: BTreeMap<&str, bool> = BTreeMap::new();
            for mid in targets.get(g.id.as_str()).into_iter().flatten() {
                for t in targets.get(mid).into_iter().flatten() {
                    *parity.entry(t).or_default() ^= true;
                }
            }
            for (t, odd) in parity {
                if odd {
                    out.push(Violation::DSquaredNonzero {
                        source: g.id.clone(),
                        target: t.to_string(),
                    });
                }
            }
        }

        // Duality.
        for id in self.duality.keys() {
            if lookup(id).is_none() {
                out.push(Violation::UnknownGenerator {
                    context: "duality key".into(),
                    id: id.clone(),
                });
            }
        }
        for g in &self.generators {
            let Some(image) = self.duality.get(&g.id) else {
                out.push(Violation::DualityMissing { id: g.id.clone() });
                continue;
            };
            let Some(img) = lookup(image) else {
                out.push(Violation::UnknownGenerator {
                    context: format!("xi({})", g.id),
                    id: image.clone(),
                });
                continue;
            };
            let back = self.duality.get(image);
            if back != Some(&g.id) {
                out.push(Violation::DualityNotInvolution {
                    id: g.id.clone(),
                    image: image.clone(),
                    back: back.cloned(),
                });
            }
            if img.a != -g.a {
                out.push(Violation::DualityLevel {
                    id: g.id.clone(),
                    image: image.clone(),
                    expected: -g.a,
                    found: img.a,
                });
            }
            if img.m != g.m + 2 * g.a {
                out.push(Violation::DualityDegree {
                    id: g.id.clone(),
                    image: image.clone(),
                    expected: g.m + 2 * g.a,
                    found: img.m,
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KnotError {
    #[error("complex failed validation with {} violation(s)", .0.len())]
    Invalid(Vec<Violation>),
    #[error("the complex has no generators")]
    EmptyComplex,
    #[error("homology has rank {0}, expected 1")]
    NotRankOne(usize),
}

/// A validated complex with generators in canonical `(a, m, id)` order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnotComplex {
    name: String,
    gens: Vec<Generator>,
    targets: Vec<Vec<usize>>,
    xi: Vec<usize>,
    d: BitMatrix,
}

impl TryFrom<RawComplex> for KnotComplex {
    type Error = KnotError;

    fn try_from(raw: RawComplex) -> Result<Self, KnotError> {
        let violations = raw.validate();
        if !violations.is_empty() {
            return Err(KnotError::Invalid(violations));
        }
        let mut gens = raw.generators;
        gens.sort_by(|x, y| (x.a, x.m, &x.id).cmp(&(y.a, y.m, &y.id)));
        let index: HashMap<&str, usize> =
            gens.iter().enumerate().map(|(k, g)| (g.id.as_str(), k)).collect();
        let n = gens.len();
        let mut targets = vec![Vec::new(); n];
        let mut d = BitMatrix::zeros(n, n);
        for (source, list) in &raw.differential {
            let j = index[source.as_str()];
            for t in list {
                let i = index[t.as_str()];
                targets[j].push(i);
                d.toggle(i, j);
            }
            targets[j].sort_unstable();
        }
        let xi = gens.iter().map(|g| index[raw.duality[&g.id].as_str()]).collect();
        Ok(Self {
            name: raw.name,
            gens,
            targets,
            xi,
            d,
        })
    }
}

/// Which piece of the level filtration a slice keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SliceKind {
    /// `B{≥ s}`, a subcomplex.
    Ge,
    /// `B{> s}`, a subcomplex.
    Gt,
    /// `B{≤ s}`, a quotient complex.
    Le,
    /// `B{< s}`, a quotient complex.
    Lt,
    /// `B{s}`, always with zero differential.
    At,
    /// The whole complex; the level is ignored.
    All,
}

impl SliceKind {
    pub fn contains(self, level: Level, s: Level) -> bool {
        match self {
            SliceKind::Ge => level >= s,
            SliceKind::Gt => level > s,
            SliceKind::Le => level <= s,
            SliceKind::Lt => level < s,
            SliceKind::At => level == s,
            SliceKind::All => true,
        }
    }
}

/// A sub- or quotient complex of `B`, on a subset of the parent generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceComplex {
    pub kind: SliceKind,
    pub level: Level,
    /// Parent generator indices, ascending.
    pub gens: Vec<usize>,
    /// Induced differential in the local basis.
    pub d: BitMatrix,
}

impl SliceComplex {
    pub fn dim(&self) -> usize {
        self.gens.len()
    }

    fn local_index(&self) -> HashMap<usize, usize> {
        self.gens.iter().enumerate().map(|(k, &p)| (p, k)).collect()
    }

    pub fn homology_space(&self) -> Subquotient {
        Subquotient::homology(&self.d).expect("validated complexes have d∘d = 0")
    }

    pub fn homology_rank(&self) -> usize {
        self.dim() - 2 * gf2::rank(&self.d)
    }
}

/// Rank tables keyed by a level, degree or Spin^c residue.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RankReport<K: Ord> {
    pub ranks: BTreeMap<K, usize>,
}

impl<K: Ord> RankReport<K> {
    pub fn total(&self) -> usize {
        self.ranks.values().sum()
    }

    pub fn get(&self, key: &K) -> usize {
        self.ranks.get(key).copied().unwrap_or(0)
    }
}

impl<K: Ord> FromIterator<(K, usize)> for RankReport<K> {
    fn from_iter<I: IntoIterator<Item = (K, usize)>>(iter: I) -> Self {
        Self {
            ranks: iter.into_iter().collect(),
        }
    }
}

/// How a parent-level operator moves between two slices.
#[derive(Clone, Copy)]
enum Transfer {
    Inclusion,
    Differential,
    Duality,
}

impl KnotComplex {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn dim(&self) -> usize {
        self.gens.len()
    }

    /// Targets of `d` on generator `i`, as parent indices.
    pub fn d_targets(&self, i: usize) -> &[usize] {
        &self.targets[i]
    }

    pub fn xi(&self, i: usize) -> usize {
        self.xi[i]
    }

    pub fn differential(&self) -> &BitMatrix {
        &self.d
    }

    pub fn to_raw(&self) -> RawComplex {
        let id = |i: usize| self.gens[i].id.clone();
        RawComplex {
            name: self.name.clone(),
            generators: self.gens.clone(),
            differential: (0..self.dim())
                .filter(|&j| !self.targets[j].is_empty())
                .map(|j| (id(j), self.targets[j].iter().map(|&i| id(i)).collect()))
                .collect(),
            duality: (0..self.dim()).map(|j| (id(j), id(self.xi[j]))).collect(),
        }
    }

    pub fn levels(&self) -> impl Iterator<Item = Level> + '_ {
        self.gens.iter().map(|g| g.a)
    }

    /// Indices of generators at level exactly `s`.
    pub fn at_level(&self, s: Level) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.gens[i].a == s).collect()
    }

    pub fn slice(&self, kind: SliceKind, s: Level) -> SliceComplex {
        let gens: Vec<usize> = (0..self.dim())
            .filter(|&i| kind.contains(self.gens[i].a, s))
            .collect();
        let d = self.d.submatrix(&gens, &gens);
        SliceComplex {
            kind,
            level: s,
            gens,
            d,
        }
    }

    pub fn whole(&self) -> SliceComplex {
        self.slice(SliceKind::All, 0)
    }

    /// Homology ranks of a slice (or of `whole()`), by homological degree.
    /// Degrees with zero homology are omitted.
    pub fn homology(&self, c: &SliceComplex) -> RankReport<Degree> {
        let mut by_degree: BTreeMap<Degree, Vec<usize>> = BTreeMap::new();
        for (k, &p) in c.gens.iter().enumerate() {
            by_degree.entry(self.gens[p].m).or_default().push(k);
        }
        let all: Vec<usize> = (0..c.dim()).collect();
        let rank_out: BTreeMap<Degree, usize> = by_degree
            .iter()
            .map(|(&m, cols)| (m, gf2::rank(&c.d.submatrix(&all, cols))))
            .collect();
        by_degree
            .iter()
            .map(|(&m, cols)| {
                let incoming = rank_out.get(&(m + 1)).copied().unwrap_or(0);
                (m, cols.len() - rank_out[&m] - incoming)
            })
            .filter(|&(_, r)| r > 0)
            .collect()
    }

    pub fn homology_rank(&self) -> usize {
        self.whole().homology_rank()
    }

    /// Seifert genus: the top occupied level.
    pub fn genus(&self) -> Result<Level, KnotError> {
        self.levels().max().ok_or(KnotError::EmptyComplex)
    }

    /// Genus, treating the empty complex as genus 0.
    pub(crate) fn genus_or_zero(&self) -> Level {
        self.levels().max().unwrap_or(0)
    }

    /// Degree of the single homology generator.
    pub fn d_invariant(&self) -> Result<Degree, KnotError> {
        let report = self.homology(&self.whole());
        match report.total() {
            1 => Ok(*report.ranks.keys().next().unwrap()),
            r => Err(KnotError::NotRankOne(r)),
        }
    }

    fn transfer_matrix(&self, from: &SliceComplex, to: &SliceComplex, how: Transfer) -> BitMatrix {
        let local = to.local_index();
        let mut m = BitMatrix::zeros(to.dim(), from.dim());
        for (j, &p) in from.gens.iter().enumerate() {
            let images: &[usize] = match how {
                Transfer::Inclusion => std::slice::from_ref(&p),
                Transfer::Differential => &self.targets[p],
                Transfer::Duality => std::slice::from_ref(&self.xi[p]),
            };
            for q in images {
                if let Some(&i) = local.get(q) {
                    m.toggle(i, j);
                }
            }
        }
        m
    }

    fn induced(&self, from: &SliceComplex, to: &SliceComplex, how: Transfer) -> BitMatrix {
        let m = self.transfer_matrix(from, to, how);
        gf2::induced_map(&m, &from.homology_space(), &to.homology_space())
            .expect("structure maps are well defined on a validated complex")
    }

    /// `τ_s : H{<s} → B{s}`, the level-`s` part of `d`.
    pub fn tau(&self, s: Level) -> BitMatrix {
        self.induced(
            &self.slice(SliceKind::Lt, s),
            &self.slice(SliceKind::At, s),
            Transfer::Differential,
        )
    }

    /// `q_s : B{s} → H{≤s}`, induced by inclusion.
    pub fn q_map(&self, s: Level) -> BitMatrix {
        self.induced(
            &self.slice(SliceKind::At, s),
            &self.slice(SliceKind::Le, s),
            Transfer::Inclusion,
        )
    }

    /// `p_s : H{≤s} → H{>s}`, induced by `d`.
    pub fn p_map(&self, s: Level) -> BitMatrix {
        self.induced(
            &self.slice(SliceKind::Le, s),
            &self.slice(SliceKind::Gt, s),
            Transfer::Differential,
        )
    }

    /// `(ι_s)_* : H{≥s} → H`.
    pub fn iota(&self, s: Level) -> BitMatrix {
        self.induced(&self.slice(SliceKind::Ge, s), &self.whole(), Transfer::Inclusion)
    }

    /// The duality `Ξ_s : B{s} → B{-s}` as a permutation matrix.
    pub fn xi_map(&self, s: Level) -> BitMatrix {
        self.transfer_matrix(
            &self.slice(SliceKind::At, s),
            &self.slice(SliceKind::At, -s),
            Transfer::Duality,
        )
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn raw(gens: &[(&str, Level, Degree)], d: &[(&str, &[&str])], xi: &[(&str, &str)]) -> RawComplex {
        RawComplex {
            name: "test".into(),
            generators: gens.iter().map(|&(id, a, m)| Generator::new(id, a, m)).collect(),
            differential: d
                .iter()
                .map(|(s, t)| (s.to_string(), t.iter().map(|x| x.to_string()).collect()))
                .collect(),
            duality: xi.iter().map(|(x, y)| (x.to_string(), y.to_string())).collect(),
        }
    }

    pub fn unknot() -> KnotComplex {
        raw(&[("x", 0, 0)], &[], &[("x", "x")]).try_into().unwrap()
    }

    pub fn trefoil_raw() -> RawComplex {
        raw(
            &[("x-1", -1, 2), ("x0", 0, 1), ("x1", 1, 0)],
            &[("x-1", &["x0"])],
            &[("x-1", "x1"), ("x0", "x0"), ("x1", "x-1")],
        )
    }

    pub fn trefoil() -> KnotComplex {
        trefoil_raw().try_into().unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(unknot().to_raw().validate().is_empty());
        assert!(trefoil_raw().validate().is_empty());
        let flat = raw(
            &[("x-1", -1, 0), ("x0", 0, 0), ("x1", 1, 0)],
            &[],
            &[("x-1", "x1"), ("x0", "x0"), ("x1", "x-1")],
        );
        let v = flat.validate();
        assert!(v.contains(&Violation::DualityDegree {
            id: "x1".into(),
            image: "x-1".into(),
            expected: 2,
            found: 0,
        }));
    }

    #[test]
    fn validate_reports_each_law() {
        // Level-preserving, degree law and d² in one go.
        let bad = raw(
            &[("a", 0, 1), ("b", 0, 0), ("c", 1, 0), ("e", -1, 2)],
            &[("a", &["b"]), ("e", &["b", "c"])],
            &[("a", "a"), ("b", "b"), ("c", "e"), ("e", "c")],
        );
        let v = bad.validate();
        assert!(v.iter().any(|x| matches!(x, Violation::LevelPreserving { source, .. } if source == "a")));
        assert!(v.iter().any(|x| matches!(x, Violation::DegreeLaw { target, .. } if target == "c")));
        let inv = raw(&[("x", 0, 0), ("y", 0, 0)], &[], &[("x", "y"), ("y", "y")]);
        assert!(inv
            .validate()
            .iter()
            .any(|x| matches!(x, Violation::DualityNotInvolution { id, .. } if id == "x")));
    }

    #[test]
    fn d_squared_detected() {
        let bad = raw(
            &[("p", -1, 2), ("q", 0, 1), ("r", 1, 0)],
            &[("p", &["q"]), ("q", &["r"])],
            &[("p", "r"), ("q", "q"), ("r", "p")],
        );
        let v = bad.validate();
        assert!(v.contains(&Violation::DSquaredNonzero {
            source: "p".into(),
            target: "r".into(),
        }));
    }

    #[test]
    fn slices_of_trefoil() {
        let b = trefoil();
        let ge1 = b.slice(SliceKind::Ge, 1);
        assert_eq!(ge1.gens, vec![2]);
        assert!(ge1.d.is_zero());
        let lt1 = b.slice(SliceKind::Lt, 1);
        assert_eq!(lt1.gens, vec![0, 1]);
        assert_eq!(lt1.d, BitMatrix::from_rows(&[&[0, 0], &[1, 0]]));
        assert_eq!(b.slice(SliceKind::Ge, 2).dim(), 0);
    }

    #[test]
    fn homology_examples() {
        let u = unknot();
        assert_eq!(u.homology(&u.whole()).ranks, BTreeMap::from([(0, 1)]));
        let b = trefoil();
        assert_eq!(b.homology(&b.whole()).ranks, BTreeMap::from([(0, 1)]));
        assert_eq!(b.homology(&b.slice(SliceKind::Lt, 1)).total(), 0);
    }

    #[test]
    fn genus_and_d() {
        assert_eq!(unknot().genus(), Ok(0));
        assert_eq!(trefoil().genus(), Ok(1));
        assert_eq!(unknot().d_invariant(), Ok(0));
        assert_eq!(trefoil().d_invariant(), Ok(0));
        let empty: KnotComplex = RawComplex::default().try_into().unwrap();
        assert_eq!(empty.genus(), Err(KnotError::EmptyComplex));
        assert_eq!(empty.d_invariant(), Err(KnotError::NotRankOne(0)));
    }

    #[test]
    fn structure_maps_of_trefoil() {
        let b = trefoil();
        assert_eq!(b.tau(1).cols(), 0);
        assert_eq!(b.tau(0), BitMatrix::identity(1));
        assert_eq!(unknot().tau(0).cols(), 0);
        assert_eq!(b.q_map(-1), BitMatrix::identity(1));
        let q0 = b.q_map(0);
        assert_eq!((q0.rows(), q0.cols()), (0, 1));
        assert_eq!(b.iota(1), BitMatrix::identity(1));
        assert_eq!(b.xi_map(0), BitMatrix::identity(1));
    }
}
