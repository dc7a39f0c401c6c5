//! Bounded 3-dimensional matching: the source side of every reduction.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{rat, to_pretty_json, ModelError, Rational, Triple, FORMAT_VERSION};

/// Default cap on `|T|` for [`solve_3dm_exact`].
pub const DEFAULT_TUPLE_LIMIT: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error("instance has {tuples} tuples, exact solver limit is {limit}")]
    SizeLimit { tuples: usize, limit: usize },
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("invalid instance: {0}")]
    Invalid(String),
}

/// `X = Y = Z = {1..q}` plus an ordered tuple list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Max3dmInstance {
    q: u32,
    tuples: Vec<Triple>,
}

/// Per-element occurrence counts and structural problems. Never fails; the
/// caller decides what to do with the findings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub q: u32,
    pub tuple_count: usize,
    /// Pairs of positions holding the same triple.
    pub duplicates: Vec<(usize, usize)>,
    /// Positions whose triple has a coordinate outside `1..=q`.
    pub out_of_range: Vec<usize>,
    /// Occurrence counts, indexed `[dimension][element - 1]`.
    pub occurrences: [Vec<u32>; 3],
    pub bound: Option<u32>,
    /// Every element occurs at most `bound` times.
    pub within_bound: bool,
    /// Every element occurs exactly `bound` times.
    pub exactly_regular: bool,
}

impl ValidationReport {
    pub fn structurally_valid(&self) -> bool {
        self.q >= 1 && self.duplicates.is_empty() && self.out_of_range.is_empty()
    }

    /// MAX-3-DM-E2: structurally valid, every element in exactly two tuples.
    pub fn is_e2(&self) -> bool {
        self.structurally_valid()
            && self.occurrences.iter().flatten().all(|&c| c == 2)
            && self.tuple_count == 2 * self.q as usize
    }

    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.q == 0 {
            out.push("q must be at least 1".to_string());
        }
        for &(a, b) in &self.duplicates {
            out.push(format!("tuples[{a}] and tuples[{b}] are identical"));
        }
        for &p in &self.out_of_range {
            out.push(format!(
                "tuples[{p}] has a coordinate outside 1..={}",
                self.q
            ));
        }
        out
    }
}

impl Max3dmInstance {
    pub fn new(q: u32, tuples: Vec<Triple>) -> Self {
        Max3dmInstance { q, tuples }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn tuples(&self) -> &[Triple] {
        &self.tuples
    }

    pub fn validate(&self, bound: Option<u32>) -> ValidationReport {
        let q = self.q as usize;
        let mut occurrences = [vec![0u32; q], vec![0u32; q], vec![0u32; q]];
        let mut out_of_range = Vec::new();
        let mut duplicates = Vec::new();
        let mut first_seen = std::collections::HashMap::new();
        for (pos, t) in self.tuples.iter().enumerate() {
            if let Some(&prev) = first_seen.get(t) {
                duplicates.push((prev, pos));
            } else {
                first_seen.insert(*t, pos);
            }
            if t.iter().any(|&c| c == 0 || c > self.q) {
                out_of_range.push(pos);
                continue;
            }
            for (dim, &c) in t.iter().enumerate() {
                occurrences[dim][c as usize - 1] += 1;
            }
        }
        let counts = || occurrences.iter().flatten().copied();
        let within_bound = bound.is_none_or(|b| counts().all(|c| c <= b));
        let exactly_regular = bound.is_some_and(|b| counts().all(|c| c == b));
        ValidationReport {
            q: self.q,
            tuple_count: self.tuples.len(),
            duplicates,
            out_of_range,
            occurrences,
            bound,
            within_bound,
            exactly_regular,
        }
    }

    /// Errors unless the instance is structurally valid.
    pub fn require_valid(&self) -> Result<(), MatchingError> {
        let report = self.validate(None);
        if report.structurally_valid() {
            Ok(())
        } else {
            Err(MatchingError::Invalid(report.problems().join("; ")))
        }
    }
}

/// Indices (into the tuple list) of pairwise disjoint tuples.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MatchingSolution {
    pub selected: Vec<usize>,
}

impl MatchingSolution {
    pub fn size(&self) -> usize {
        self.selected.len()
    }

    pub fn is_valid_for(&self, instance: &Max3dmInstance) -> bool {
        let mut used: [HashSet<u32>; 3] = Default::default();
        let mut seen = HashSet::new();
        self.selected.iter().all(|&idx| {
            let Some(t) = instance.tuples.get(idx) else {
                return false;
            };
            seen.insert(idx) && (0..3).all(|d| used[d].insert(t[d]))
        })
    }
}

/// Theorem-level constants of the MAX-3-DM-E2 promise problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HardnessConstants {
    pub alpha0: Rational,
    pub beta0: Rational,
}

impl HardnessConstants {
    /// alpha0 = 0.9690082645, beta0 = 0.979338843.
    pub fn theorem() -> Self {
        HardnessConstants {
            alpha0: Rational::new(9_690_082_645u64.into(), 10_000_000_000u64.into()),
            beta0: rat(979_338_843, 1_000_000_000),
        }
    }

    /// Variant with beta0 = 0.979339943, which also circulates for the
    /// covering bound. Kept only so the two can be compared side by side;
    /// everything else uses
    /// [`HardnessConstants::theorem`].
    pub fn covering_restated() -> Self {
        HardnessConstants {
            beta0: rat(979_339_943, 1_000_000_000),
            ..Self::theorem()
        }
    }
}

impl Default for HardnessConstants {
    fn default() -> Self {
        Self::theorem()
    }
}

fn conflicts(a: &Triple, b: &Triple) -> bool {
    a[0] == b[0] || a[1] == b[1] || a[2] == b[2]
}

/// Exact maximum matching by depth-first search over tuples in input order.
///
/// Each tuple is first tried as included (when it does not clash with the
/// partial selection) and then as excluded; a branch is cut once the tuples
/// still available cannot beat the incumbent. The witness is the first optimum
/// found in that order.
pub fn solve_3dm_exact(
    instance: &Max3dmInstance,
    limit: usize,
) -> Result<(usize, MatchingSolution), MatchingError> {
    let tuples = instance.tuples();
    if tuples.len() > limit {
        return Err(MatchingError::SizeLimit {
            tuples: tuples.len(),
            limit,
        });
    }

    struct Search<'a> {
        tuples: &'a [Triple],
        cap: usize,
        current: Vec<usize>,
        best: Vec<usize>,
    }

    impl Search<'_> {
        fn run(&mut self, idx: usize) {
            if self.current.len() > self.best.len() {
                self.best = self.current.clone();
            }
            if self.best.len() == self.cap || idx == self.tuples.len() {
                return;
            }
            if self.current.len() + (self.tuples.len() - idx) <= self.best.len() {
                return;
            }
            let t = &self.tuples[idx];
            if !self.current.iter().any(|&s| conflicts(&self.tuples[s], t)) {
                self.current.push(idx);
                self.run(idx + 1);
                self.current.pop();
            }
            self.run(idx + 1);
        }
    }

    let mut search = Search {
        tuples,
        cap: instance.q() as usize,
        current: Vec::new(),
        best: Vec::new(),
    };
    search.run(0);
    let best = search.best;
    Ok((best.len(), MatchingSolution { selected: best }))
}

fn random_perm(rng: &mut ChaCha8Rng, q: u32) -> Vec<u32> {
    let mut p: Vec<u32> = (1..=q).collect();
    p.shuffle(rng);
    p
}

/// An E2 instance made of two disjoint permutation matchings
/// `{(i, p(i), s(i))}` and `{(i, p'(i), s'(i))}`.
///
/// Every output contains a perfect matching, so these are yes-instances only;
/// instances with a smaller optimum come from [`planted_instance`].
pub fn generate_e2(q: u32, seed: u64) -> Result<Max3dmInstance, MatchingError> {
    if q < 2 {
        return Err(MatchingError::Infeasible(
            "E2 generation needs q >= 2".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first: Vec<Triple> = {
        let (p, s) = (random_perm(&mut rng, q), random_perm(&mut rng, q));
        (1..=q)
            .map(|i| [i, p[i as usize - 1], s[i as usize - 1]])
            .collect()
    };
    loop {
        let (p, s) = (random_perm(&mut rng, q), random_perm(&mut rng, q));
        let second: Vec<Triple> = (1..=q)
            .map(|i| [i, p[i as usize - 1], s[i as usize - 1]])
            .collect();
        // both matchings share the x coordinate order, so disjointness is positional
        if first.iter().zip(&second).all(|(a, b)| a != b) {
            let mut tuples = first;
            tuples.extend(second);
            return Ok(Max3dmInstance::new(q, tuples));
        }
    }
}

/// A planted matching of `planted_size` tuples plus `extra_tuples` random
/// tuples that each share an element with the planted part (any tuple when
/// nothing is planted). The optimum is not assumed; certify it with
/// [`solve_3dm_exact`].
pub fn planted_instance(
    q: u32,
    planted_size: u32,
    extra_tuples: usize,
    seed: u64,
) -> Result<Max3dmInstance, MatchingError> {
    if q == 0 {
        return Err(MatchingError::Infeasible("q must be at least 1".into()));
    }
    if planted_size > q {
        return Err(MatchingError::Infeasible(format!(
            "planted size {planted_size} exceeds q = {q}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (xs, ys, zs) = (
        random_perm(&mut rng, q),
        random_perm(&mut rng, q),
        random_perm(&mut rng, q),
    );
    let s = planted_size as usize;
    let mut planted: Vec<Triple> = (0..s).map(|a| [xs[a], ys[a], zs[a]]).collect();
    planted.sort_unstable();

    let used: [HashSet<u32>; 3] = [
        xs[..s].iter().copied().collect(),
        ys[..s].iter().copied().collect(),
        zs[..s].iter().copied().collect(),
    ];
    let planted_set: HashSet<Triple> = planted.iter().copied().collect();
    let eligible = |t: &Triple| {
        !planted_set.contains(t) && (s == 0 || (0..3).any(|d| used[d].contains(&t[d])))
    };

    let q64 = q as u128;
    let free = (q - planted_size) as u128;
    let available = if s == 0 {
        q64.pow(3)
    } else {
        q64.pow(3) - free.pow(3) - s as u128
    };
    if extra_tuples as u128 > available {
        return Err(MatchingError::Infeasible(format!(
            "only {available} distinct conflicting tuples exist, {extra_tuples} requested"
        )));
    }

    let mut extras = Vec::with_capacity(extra_tuples);
    if (extra_tuples as u128) * 2 > available {
        // dense request: enumerate candidates and sample without replacement
        let mut candidates: Vec<Triple> = Vec::new();
        for i in 1..=q {
            for j in 1..=q {
                for k in 1..=q {
                    let t = [i, j, k];
                    if eligible(&t) {
                        candidates.push(t);
                    }
                }
            }
        }
        candidates.shuffle(&mut rng);
        extras.extend(candidates.into_iter().take(extra_tuples));
    } else {
        let mut chosen = HashSet::new();
        while extras.len() < extra_tuples {
            let t = [
                rng.gen_range(1..=q),
                rng.gen_range(1..=q),
                rng.gen_range(1..=q),
            ];
            if eligible(&t) && chosen.insert(t) {
                extras.push(t);
            }
        }
    }
    planted.extend(extras);
    Ok(Max3dmInstance::new(q, planted))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Max3dmDoc {
    format_version: u32,
    q: u32,
    tuples: Vec<Triple>,
}

impl Max3dmInstance {
    pub fn to_json(&self) -> String {
        to_pretty_json(&Max3dmDoc {
            format_version: FORMAT_VERSION,
            q: self.q,
            tuples: self.tuples.clone(),
        })
    }

    /// Parses the document; structural problems are left to [`Self::validate`].
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let doc: Max3dmDoc = serde_json::from_str(text)?;
        if doc.format_version != FORMAT_VERSION {
            return Err(ModelError::Version(doc.format_version));
        }
        Ok(Max3dmInstance::new(doc.q, doc.tuples))
    }
}
