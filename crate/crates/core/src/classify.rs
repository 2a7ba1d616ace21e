//! Staircase complexes: the normal form of a complex whose large surgeries
//! have simple knot Floer homology, plus the harness that checks the surgery
//! dichotomy on enumerated and random complexes.
//!
//! A staircase is fixed by positive levels `n_1 < … < n_k` and the degree
//! `d_top` of its homology generator. Its generators `x_{-k}, …, x_k` sit at
//! levels `n_i` (with `n_0 = 0`, `n_{-i} = -n_i`) and degrees `δ_i`, where
//! `δ_k = d_top` and, going down in `i`,
//!
//! ```text
//! δ_i = δ_{i+1} + 2(n_{i+1} - n_i) - 1   if k - i is odd
//! δ_i = δ_{i+1} + 1                      if k - i is even
//! ```
//!
//! The differential is `d(x_i) = x_{i+1}` when `k - i` is even and positive,
//! and zero otherwise.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::gf2::{self, BitMatrix, BitVec};
use crate::knotcx::{Degree, Generator, KnotComplex, Level, RawComplex};
use crate::surgery::{self, SurgeryError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("staircase steps must be strictly increasing positive integers, got {0:?}")]
    InvalidSteps(Vec<Level>),
    #[error("Euler characteristic is zero; the Alexander polynomial sign cannot be fixed")]
    NotNormalizable,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct StaircaseSpec {
    steps: Vec<Level>,
    d_top: Degree,
}

impl StaircaseSpec {
    pub fn new(steps: Vec<Level>, d_top: Degree) -> Result<Self, ClassifyError> {
        let increasing = steps.windows(2).all(|w| w[0] < w[1]);
        if !increasing || steps.first().is_some_and(|&s| s < 1) {
            return Err(ClassifyError::InvalidSteps(steps));
        }
        Ok(Self { steps, d_top })
    }

    pub fn steps(&self) -> &[Level] {
        &self.steps
    }

    pub fn d_top(&self) -> Degree {
        self.d_top
    }

    pub fn k(&self) -> i64 {
        self.steps.len() as i64
    }

    pub fn genus(&self) -> Level {
        self.steps.last().copied().unwrap_or(0)
    }

    /// `n_i` for `-k ≤ i ≤ k`.
    pub fn level(&self, i: i64) -> Level {
        match i {
            0 => 0,
            i if i > 0 => self.steps[(i - 1) as usize],
            i => -self.steps[(-i - 1) as usize],
        }
    }
}

impl fmt::Display for StaircaseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let steps: Vec<String> = self.steps.iter().map(ToString::to_string).collect();
        write!(f, "staircase({}; d={})", steps.join(","), self.d_top)
    }
}

/// `i ↦ δ_i` for `-k ≤ i ≤ k`.
pub fn delta_sequence(spec: &StaircaseSpec) -> BTreeMap<i64, Degree> {
    let k = spec.k();
    let mut delta = BTreeMap::from([(k, spec.d_top)]);
    let mut current = spec.d_top;
    for i in (-k..k).rev() {
        current += if (k - i) % 2 == 1 {
            2 * (spec.level(i + 1) - spec.level(i)) - 1
        } else {
            1
        };
        delta.insert(i, current);
    }
    delta
}

fn staircase_id(i: i64) -> String {
    format!("x{i}")
}

pub fn make_staircase(spec: &StaircaseSpec) -> KnotComplex {
    let k = spec.k();
    let delta = delta_sequence(spec);
    let raw = RawComplex {
        name: spec.to_string(),
        generators: (-k..=k)
            .map(|i| Generator::new(staircase_id(i), spec.level(i), delta[&i]))
            .collect(),
        differential: (-k..k)
            .filter(|i| (k - i) % 2 == 0)
            .map(|i| (staircase_id(i), vec![staircase_id(i + 1)]))
            .collect(),
        duality: (-k..=k).map(|i| (staircase_id(i), staircase_id(-i))).collect(),
    };
    KnotComplex::try_from(raw).expect("staircases satisfy every complex invariant")
}

/// Why a complex is not a staircase; the first failed condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NotStaircase {
    LevelMultiplicity { level: Level, count: usize },
    MissingLevelZero,
    HomologyRank { rank: usize },
    DegreeMismatch { id: String, expected: Degree, found: Degree },
    DifferentialMismatch { id: String },
}

impl fmt::Display for NotStaircase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotStaircase::LevelMultiplicity { level, count } => {
                write!(f, "level {level} holds {count} generators, expected at most 1")
            }
            NotStaircase::MissingLevelZero => write!(f, "no generator at level 0"),
            NotStaircase::HomologyRank { rank } => write!(f, "homology rank {rank} ≠ 1"),
            NotStaircase::DegreeMismatch { id, expected, found } => {
                write!(f, "generator {id} has degree {found}, staircase needs {expected}")
            }
            NotStaircase::DifferentialMismatch { id } => {
                write!(f, "d({id}) does not follow the staircase pattern")
            }
        }
    }
}

/// Recovers the staircase spec of `b`, comparing structurally against the
/// normal form. With one generator per level and degrees strictly monotone in
/// the level, no filtered change of basis can relate two distinct complexes.
pub fn recognize_staircase(b: &KnotComplex) -> Result<StaircaseSpec, NotStaircase> {
    let mut count: BTreeMap<Level, usize> = BTreeMap::new();
    for a in b.levels() {
        *count.entry(a).or_default() += 1;
    }
    if let Some((&level, &c)) = count.iter().find(|(_, &c)| c > 1) {
        return Err(NotStaircase::LevelMultiplicity { level, count: c });
    }
    if !count.contains_key(&0) {
        return Err(NotStaircase::MissingLevelZero);
    }
    let rank = b.homology_rank();
    if rank != 1 {
        return Err(NotStaircase::HomologyRank { rank });
    }
    let steps: Vec<Level> = count.keys().copied().filter(|&a| a > 0).collect();
    // Generators are sorted by level, so the last one is on top.
    let d_top = b.generators().last().expect("level 0 is occupied").m;
    let spec = StaircaseSpec::new(steps, d_top).expect("positive levels are increasing");
    let model = make_staircase(&spec);

    // Both complexes list exactly one generator per level in level order.
    for (g, e) in b.generators().iter().zip(model.generators()) {
        if g.m != e.m {
            return Err(NotStaircase::DegreeMismatch {
                id: g.id.clone(),
                expected: e.m,
                found: g.m,
            });
        }
    }
    for i in 0..b.dim() {
        if b.d_targets(i) != model.d_targets(i) {
            return Err(NotStaircase::DifferentialMismatch {
                id: b.generators()[i].id.clone(),
            });
        }
    }
    Ok(spec)
}

/// The symmetrized Alexander polynomial as `level ↦ coefficient`, zero
/// coefficients omitted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlexanderPoly {
    pub coeffs: BTreeMap<Level, i64>,
}

impl AlexanderPoly {
    pub fn coefficient(&self, s: Level) -> i64 {
        self.coeffs.get(&s).copied().unwrap_or(0)
    }

    pub fn at_one(&self) -> i64 {
        self.coeffs.values().sum()
    }

    pub fn is_symmetric(&self) -> bool {
        self.coeffs.iter().all(|(&s, &c)| self.coefficient(-s) == c)
    }
}

impl fmt::Display for AlexanderPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&s, &c) in self.coeffs.iter().rev() {
            let (sign, abs) = if c < 0 { ("-", -c) } else { ("+", c) };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let power = match s {
                0 => String::new(),
                1 => "t".to_string(),
                s => format!("t^{s}"),
            };
            match (abs, power.is_empty()) {
                (_, true) => write!(f, "{abs}")?,
                (1, false) => write!(f, "{power}")?,
                (_, false) => write!(f, "{abs}{power}")?,
            }
        }
        Ok(())
    }
}

/// Graded Euler characteristic by level, signed so that it sums to `+|χ|`.
pub fn alexander(b: &KnotComplex) -> Result<AlexanderPoly, ClassifyError> {
    let mut coeffs: BTreeMap<Level, i64> = BTreeMap::new();
    for g in b.generators() {
        *coeffs.entry(g.a).or_default() += if g.m.rem_euclid(2) == 0 { 1 } else { -1 };
    }
    coeffs.retain(|_, c| *c != 0);
    let sum: i64 = coeffs.values().sum();
    if sum == 0 {
        return Err(ClassifyError::NotNormalizable);
    }
    let sign = sum.signum();
    coeffs.values_mut().for_each(|c| *c *= sign);
    Ok(AlexanderPoly { coeffs })
}

/// A seeded random complex with every invariant of [`KnotComplex`]: levels in
/// `[-levels_bound, levels_bound]`, between 1 and `dim_bound` generators.
///
/// Generators come in duality pairs `(a, w - a)`, `(-a, w + a)` (or duality
/// fixed points at level 0). The differential is chosen top level first: each
/// `d(x)` is a random cycle among the already-finished generators of higher
/// level and degree `m(x) - 1`, so `d∘d = 0` holds by construction.
pub fn random_symmetric_complex(levels_bound: u32, dim_bound: usize, seed: u64) -> KnotComplex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = levels_bound as i64;
    let dim = if dim_bound == 0 { 0 } else { rng.gen_range(1..=dim_bound) };

    let mut gens: Vec<Generator> = Vec::with_capacity(dim);
    let mut duality = BTreeMap::new();
    while gens.len() < dim {
        let remaining = dim - gens.len();
        let w = rng.gen_range(0..=bound + 1);
        let id = |k: usize| format!("g{k}");
        let k = gens.len();
        let choice = if remaining >= 2 { rng.gen_range(0..6) } else { 5 };
        match choice {
            0..=3 if bound > 0 => {
                let a = rng.gen_range(1..=bound);
                gens.push(Generator::new(id(k), a, w - a));
                gens.push(Generator::new(id(k + 1), -a, w + a));
                duality.insert(id(k), id(k + 1));
                duality.insert(id(k + 1), id(k));
            }
            0..=4 => {
                gens.push(Generator::new(id(k), 0, w));
                gens.push(Generator::new(id(k + 1), 0, w));
                duality.insert(id(k), id(k + 1));
                duality.insert(id(k + 1), id(k));
            }
            _ => {
                gens.push(Generator::new(id(k), 0, w));
                duality.insert(id(k), id(k));
            }
        }
    }

    // Top level first, so every candidate target already has its differential.
    let mut order: Vec<usize> = (0..gens.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(gens[i].a), i));
    let n = gens.len();
    let mut d = BitMatrix::zeros(n, n);
    for &x in &order {
        let candidates: Vec<usize> = (0..n)
            .filter(|&y| gens[y].a > gens[x].a && gens[y].m == gens[x].m - 1)
            .collect();
        if candidates.is_empty() || rng.gen_bool(0.25) {
            continue;
        }
        let all: Vec<usize> = (0..n).collect();
        let cycles = gf2::kernel_basis(&d.submatrix(&all, &candidates));
        if cycles.dim() == 0 {
            continue;
        }
        let mut pick = BitVec::zeros(candidates.len());
        while pick.is_zero() {
            for v in cycles.basis() {
                if rng.gen_bool(0.5) {
                    pick.xor_assign(v);
                }
            }
        }
        for k in pick.ones() {
            d.toggle(candidates[k], x);
        }
    }

    let differential = (0..n)
        .filter_map(|j| {
            let targets: Vec<String> = d.column(j).ones().map(|i| gens[i].id.clone()).collect();
            (!targets.is_empty()).then(|| (gens[j].id.clone(), targets))
        })
        .collect();
    let raw = RawComplex {
        name: format!("random(L={levels_bound}, D={dim_bound}, seed={seed})"),
        generators: gens,
        differential,
        duality,
    };
    KnotComplex::try_from(raw).expect("sampler preserves every invariant")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    SmallSurgery,
    LargeForward,
    Converse,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::SmallSurgery => "small-surgery",
            Suite::LargeForward => "large-forward",
            Suite::Converse => "converse",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "small-surgery" => Ok(Suite::SmallSurgery),
            "large-forward" => Ok(Suite::LargeForward),
            "converse" => Ok(Suite::Converse),
            other => Err(format!(
                "unknown suite {other:?} (expected small-surgery, large-forward or converse)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceSource {
    /// Every staircase with steps a nonempty subset of `{1, …, max_genus}`.
    Staircases,
    Random { count: usize, seed: u64, dim_bound: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteParams {
    pub max_genus: u32,
    pub max_n: i64,
    pub source: InstanceSource,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub params: SuiteParams,
    pub instances: usize,
    /// Instances that met the suite's hypotheses and were checked.
    pub checked_instances: usize,
    /// `(instance, n)` pairs checked; for large-forward, one per instance plus
    /// one per `n` in the ε/simplicity comparison.
    pub checks: usize,
    pub skipped: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{suite:?} failed on {instance}{}: {detail}", .n.map(|n| format!(" at n = {n}")).unwrap_or_default())]
pub struct SuiteFailure {
    pub suite: Suite,
    pub instance: String,
    pub n: Option<i64>,
    pub detail: String,
    pub counterexample: RawComplex,
}

/// Nonempty subsets of `{1, …, max_genus}` as staircases with `d_top = 0`,
/// ordered by genus and then lexicographically.
pub fn enumerate_staircases(max_genus: u32) -> Vec<StaircaseSpec> {
    let mut specs: Vec<StaircaseSpec> = (1u64..(1 << max_genus))
        .map(|mask| {
            let steps = (1..=max_genus as i64).filter(|b| mask >> (b - 1) & 1 == 1).collect();
            StaircaseSpec::new(steps, 0).unwrap()
        })
        .collect();
    specs.sort_by(|x, y| (x.genus(), &x.steps).cmp(&(y.genus(), &y.steps)));
    specs
}

fn instances(params: &SuiteParams) -> Vec<KnotComplex> {
    match &params.source {
        InstanceSource::Staircases => enumerate_staircases(params.max_genus)
            .iter()
            .map(make_staircase)
            .collect(),
        InstanceSource::Random { count, seed, dim_bound } => (0..*count as u64)
            .map(|i| random_symmetric_complex(params.max_genus, *dim_bound, seed.wrapping_add(i)))
            .collect(),
    }
}

pub fn run_suite(suite: Suite, params: &SuiteParams) -> Result<SuiteReport, Box<SuiteFailure>> {
    let started = Instant::now();
    let all = instances(params);
    let mut report = SuiteReport {
        suite,
        params: params.clone(),
        instances: all.len(),
        checked_instances: 0,
        checks: 0,
        skipped: 0,
        failures: 0,
        elapsed_ms: None,
    };
    for b in &all {
        let fail = |n: Option<i64>, detail: String| {
            Box::new(SuiteFailure {
                suite,
                instance: b.name().to_string(),
                n,
                detail,
                counterexample: b.to_raw(),
            })
        };
        let surgery_err = |n: i64| move |e: SurgeryError| fail(Some(n), e.to_string());
        let g = b.genus_or_zero();
        match suite {
            Suite::SmallSurgery => {
                if g < 1 {
                    report.skipped += 1;
                    continue;
                }
                report.checked_instances += 1;
                for n in 1..(2 * g).min(params.max_n + 1) {
                    let s = surgery::is_simple(b, n).map_err(surgery_err(n))?;
                    report.checks += 1;
                    if s.simple || s.hfk_total <= s.hf_total {
                        return Err(fail(
                            Some(n),
                            format!("simple surgery below 2g: hfk {} vs hf {}", s.hfk_total, s.hf_total),
                        ));
                    }
                }
            }
            Suite::Converse => {
                if recognize_staircase(b).is_err() {
                    report.skipped += 1;
                    continue;
                }
                report.checked_instances += 1;
                for n in (2 * g).max(1)..=params.max_n {
                    let s = surgery::is_simple(b, n).map_err(surgery_err(n))?;
                    let hf = surgery::hf_ranks(b, n).map_err(surgery_err(n))?;
                    report.checks += 1;
                    if !s.simple {
                        return Err(fail(Some(n), format!("not simple, witnesses {:?}", s.witness_levels)));
                    }
                    if let Some((class, rank)) = hf.ranks.iter().find(|(_, &r)| r != 1) {
                        return Err(fail(Some(n), format!("class [{class}] has HF rank {rank}")));
                    }
                }
            }
            Suite::LargeForward => {
                if b.homology_rank() != 1 {
                    report.skipped += 1;
                    continue;
                }
                report.checked_instances += 1;
                let vanish = surgery::epsilons(b).iter().all(surgery::Epsilon::vanishes);
                report.checks += 1;
                if vanish {
                    if let Err(reason) = recognize_staircase(b) {
                        return Err(fail(None, format!("all ε vanish but not a staircase: {reason}")));
                    }
                }
                for n in (2 * g).max(1)..=params.max_n {
                    let s = surgery::is_simple(b, n).map_err(surgery_err(n))?;
                    report.checks += 1;
                    if s.simple != vanish {
                        return Err(fail(
                            Some(n),
                            format!("ε vanishing is {vanish} but simplicity is {}", s.simple),
                        ));
                    }
                }
            }
        }
    }
    report.elapsed_ms = Some(started.elapsed().as_millis());
    Ok(report)
}
