//! Brute-force verification of the gadget lemmas, the gap bounds, the
//! counterexample to the original construction, and the theorem-level bound
//! arithmetic.
//!
//! Every lemma check enumerates an explicit universe (subsets of items or of
//! gadget integers) under exact rational arithmetic and reports each member
//! that contradicts the claim. Counterexamples are listed in canonical label
//! order, truncated at [`MAX_LISTED`] with the full count kept.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::ops::RangeInclusive;
use std::time::Instant;

use num_traits::{One, Pow};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::gadgets::{
    build_covering_instance, build_packing_instance, build_skewed_instance, skew_m, GadgetError,
    GadgetIntegers, LabeledInteger, SkewedGadgetIntegers,
};
use crate::matching::{
    solve_3dm_exact, HardnessConstants, MatchingError, Max3dmInstance, DEFAULT_TUPLE_LIMIT,
};
use crate::model::{
    ceil, covers, decimal, fits, floor, format_rational, int, rat, vec_sum, BigInt, Flavor,
    ItemKind, ItemLabel, Rational, Triple, Vec2, VectorInstance,
};
use crate::solvers::{solve_vbc_exact, solve_vbp_exact, SolverError, SolverLimits};

pub const DEFAULT_BUDGET: u64 = 100_000_000;
pub const MAX_LISTED: usize = 100;
/// Largest `m` the skewed checks accept.
pub const MAX_SKEW_M: u32 = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("{claim}: universe of {needed} subsets exceeds the budget of {budget}")]
    BudgetExceeded {
        claim: ClaimId,
        needed: u128,
        budget: u64,
    },
    #[error("m = {m} is too large for enumeration (max {max})")]
    MTooLarge { m: u32, max: u32 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("expected a {expected} instance, got {found}")]
    WrongFlavor { expected: Flavor, found: Flavor },
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimId {
    /// Four gadget integers sum to `b` iff they encode a tuple.
    IntegerCorrespondence,
    /// No five packing items fit together.
    BinSizeNoFive,
    /// Every pair fits except two dummies.
    BinSizePairs,
    /// A dummy plus two more items never fits.
    BinSizeDummyPlusTwo,
    /// Four packing items fit iff they encode a tuple.
    VectorCorrespondence,
    /// `2^(m+1) - 1` has exactly one decomposition into `m` residues.
    SkewConstantDecomposition,
    SkewIntegerCorrespondence,
    /// No `m + 1` skewed items fit together.
    SkewBinSizeNoOverflow,
    SkewBinSizePairs,
    SkewBinSizeDummyPlusTwo,
    SkewVectorCorrespondence,
    /// Every skewed item has at most one coordinate above delta.
    Skewness,
    /// Every five covering items form a unit cover.
    CoverAnyFive,
    /// A dummy plus any item forms a unit cover.
    CoverDummyPlusAny,
    /// No single item is a unit cover.
    CoverNoSingle,
    /// Four non-dummy items cover iff they encode a tuple.
    CoverNonDummyFour,
    /// Capped and uncapped exact packing agree.
    SolverCapConsistency,
    /// Three tuple vectors of the original `r = 32q` construction overflow.
    WoegingerThreeTuple,
}

impl ClaimId {
    pub const ALL: [ClaimId; 18] = [
        ClaimId::IntegerCorrespondence,
        ClaimId::BinSizeNoFive,
        ClaimId::BinSizePairs,
        ClaimId::BinSizeDummyPlusTwo,
        ClaimId::VectorCorrespondence,
        ClaimId::SkewConstantDecomposition,
        ClaimId::SkewIntegerCorrespondence,
        ClaimId::SkewBinSizeNoOverflow,
        ClaimId::SkewBinSizePairs,
        ClaimId::SkewBinSizeDummyPlusTwo,
        ClaimId::SkewVectorCorrespondence,
        ClaimId::Skewness,
        ClaimId::CoverAnyFive,
        ClaimId::CoverDummyPlusAny,
        ClaimId::CoverNoSingle,
        ClaimId::CoverNonDummyFour,
        ClaimId::SolverCapConsistency,
        ClaimId::WoegingerThreeTuple,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ClaimId::IntegerCorrespondence => "integer-correspondence",
            ClaimId::BinSizeNoFive => "bin-size-no-five",
            ClaimId::BinSizePairs => "bin-size-pairs",
            ClaimId::BinSizeDummyPlusTwo => "bin-size-dummy-plus-two",
            ClaimId::VectorCorrespondence => "vector-correspondence",
            ClaimId::SkewConstantDecomposition => "skew-constant-decomposition",
            ClaimId::SkewIntegerCorrespondence => "skew-integer-correspondence",
            ClaimId::SkewBinSizeNoOverflow => "skew-bin-size-no-overflow",
            ClaimId::SkewBinSizePairs => "skew-bin-size-pairs",
            ClaimId::SkewBinSizeDummyPlusTwo => "skew-bin-size-dummy-plus-two",
            ClaimId::SkewVectorCorrespondence => "skew-vector-correspondence",
            ClaimId::Skewness => "skewness",
            ClaimId::CoverAnyFive => "cover-any-five",
            ClaimId::CoverDummyPlusAny => "cover-dummy-plus-any",
            ClaimId::CoverNoSingle => "cover-no-single",
            ClaimId::CoverNonDummyFour => "cover-non-dummy-four",
            ClaimId::SolverCapConsistency => "solver-cap-consistency",
            ClaimId::WoegingerThreeTuple => "woeginger-three-tuple",
        }
    }

    pub fn parse(s: &str) -> Option<ClaimId> {
        Self::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Verified,
    Falsified,
    /// No counterexample, but the universe was not fully covered.
    Partial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Universe {
    pub description: String,
    pub size: u64,
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub claim_id: ClaimId,
    pub verdict: Verdict,
    pub universe: Universe,
    /// Members of the universe satisfying the claim's predicate (sum hits the
    /// target, set fits, set covers, ...).
    pub positives: u64,
    pub counterexamples: Vec<String>,
    pub counterexample_total: u64,
    pub details: Vec<String>,
    pub wall_time_ms: u64,
}

impl LemmaReport {
    fn new(
        claim_id: ClaimId,
        universe: Universe,
        positives: u64,
        counterexamples: Vec<String>,
        counterexample_total: u64,
        details: Vec<String>,
    ) -> Self {
        let verdict = if counterexample_total > 0 {
            Verdict::Falsified
        } else if universe.complete {
            Verdict::Verified
        } else {
            Verdict::Partial
        };
        LemmaReport {
            claim_id,
            verdict,
            universe,
            positives,
            counterexamples,
            counterexample_total,
            details,
            wall_time_ms: 0,
        }
    }

    pub fn is_verified(&self) -> bool {
        self.verdict == Verdict::Verified
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckOptions {
    /// Largest universe any single check may enumerate.
    pub budget: u64,
    /// Worker threads for subset enumeration. Results do not depend on it.
    pub threads: usize,
    /// Fill `wall_time_ms`; off by default so reports are byte-stable.
    pub record_time: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            budget: DEFAULT_BUDGET,
            threads: 1,
            record_time: false,
        }
    }
}

// ---------------------------------------------------------------------------
// Subset enumeration

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Every `k`-combination of `0..n` in lexicographic order whose first element
/// is congruent to `shard` modulo `shards`.
fn for_each_combination(
    n: usize,
    k: usize,
    shard: usize,
    shards: usize,
    mut f: impl FnMut(&[usize]),
) {
    if k == 0 {
        if shard == 0 {
            f(&[]);
        }
        return;
    }
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if idx[0] % shards == shard {
            f(&idx);
        }
        let mut i = k - 1;
        while idx[i] == n - k + i {
            if i == 0 {
                return;
            }
            i -= 1;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Class {
    /// Not part of the claim's universe.
    Skip,
    /// In the universe and consistent with the claim.
    Ok { positive: bool },
    /// Contradicts the claim.
    Bad { positive: bool },
}

#[derive(Default)]
struct Scan {
    universe: u64,
    positives: u64,
    bad_total: u64,
    listed: BTreeSet<Vec<usize>>,
}

impl Scan {
    fn record(&mut self, set: &[usize], class: Class) {
        match class {
            Class::Skip => {}
            Class::Ok { positive } => {
                self.universe += 1;
                self.positives += positive as u64;
            }
            Class::Bad { positive } => {
                self.universe += 1;
                self.positives += positive as u64;
                self.bad_total += 1;
                self.push_listed(set.to_vec());
            }
        }
    }

    fn push_listed(&mut self, set: Vec<usize>) {
        self.listed.insert(set);
        if self.listed.len() > MAX_LISTED {
            self.listed.pop_last();
        }
    }

    fn merge(mut self, other: Scan) -> Scan {
        self.universe += other.universe;
        self.positives += other.positives;
        self.bad_total += other.bad_total;
        for s in other.listed {
            self.push_listed(s);
        }
        self
    }
}

/// Classifies every `k`-subset of `0..n`. Subsets are index sets into a
/// label-sorted item list, so lexicographic order is canonical label order.
fn scan_subsets<F>(n: usize, k: usize, threads: usize, classify: F) -> Scan
where
    F: Fn(&[usize]) -> Class + Sync,
{
    let shards = threads.max(1).min(n.max(1));
    if shards == 1 {
        let mut scan = Scan::default();
        for_each_combination(n, k, 0, 1, |set| scan.record(set, classify(set)));
        return scan;
    }
    let classify = &classify;
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..shards)
            .map(|shard| {
                scope.spawn(move || {
                    let mut scan = Scan::default();
                    for_each_combination(n, k, shard, shards, |set| {
                        scan.record(set, classify(set))
                    });
                    scan
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("enumeration worker panicked"))
            .fold(Scan::default(), Scan::merge)
    })
}

fn check_budget(claim: ClaimId, needed: u128, opts: &CheckOptions) -> Result<(), VerifyError> {
    if needed > opts.budget as u128 {
        Err(VerifyError::BudgetExceeded {
            claim,
            needed,
            budget: opts.budget,
        })
    } else {
        Ok(())
    }
}

fn format_set(labels: &[&ItemLabel]) -> String {
    let parts: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Items (or integers) re-ordered by label.
struct Sorted<'a, T> {
    labels: Vec<&'a ItemLabel>,
    values: Vec<&'a T>,
}

impl<'a, T> Sorted<'a, T> {
    fn new(pairs: impl Iterator<Item = (&'a ItemLabel, &'a T)>) -> Self {
        let mut v: Vec<_> = pairs.collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        let (labels, values) = v.into_iter().unzip();
        Sorted { labels, values }
    }

    fn len(&self) -> usize {
        self.labels.len()
    }

    fn labels_of(&self, set: &[usize]) -> Vec<&'a ItemLabel> {
        set.iter().map(|&i| self.labels[i]).collect()
    }

    fn values_of<'s>(&'s self, set: &'s [usize]) -> impl Iterator<Item = &'a T> + 's {
        set.iter().map(move |&i| self.values[i])
    }

    fn report(
        &self,
        claim: ClaimId,
        description: String,
        scan: Scan,
        details: Vec<String>,
    ) -> LemmaReport {
        let listed = scan
            .listed
            .iter()
            .map(|set| format_set(&self.labels_of(set)))
            .collect();
        LemmaReport::new(
            claim,
            Universe {
                description,
                size: scan.universe,
                complete: true,
            },
            scan.positives,
            listed,
            scan.bad_total,
            details,
        )
    }
}

fn timed<T>(
    opts: &CheckOptions,
    f: impl FnOnce() -> Result<T, VerifyError>,
) -> Result<T, VerifyError>
where
    T: Timed,
{
    let start = Instant::now();
    let mut out = f()?;
    if opts.record_time {
        out.set_time(start.elapsed().as_millis() as u64);
    }
    Ok(out)
}

trait Timed {
    fn set_time(&mut self, ms: u64);
}

impl Timed for LemmaReport {
    fn set_time(&mut self, ms: u64) {
        self.wall_time_ms = ms;
    }
}

impl Timed for Vec<LemmaReport> {
    fn set_time(&mut self, ms: u64) {
        for r in self {
            r.wall_time_ms = ms;
        }
    }
}

// ---------------------------------------------------------------------------
// Tuple patterns

/// What a "corresponding" set looks like: `x_i, y_j, z_k, t_(i,j,k)` for a
/// tuple in `T`, plus one filler of every level in `filler_levels`.
struct Pattern {
    tuples: HashSet<Triple>,
    filler_levels: Vec<u32>,
}

impl Pattern {
    fn new(tuples: &[Triple], filler_levels: Vec<u32>) -> Self {
        Pattern {
            tuples: tuples.iter().copied().collect(),
            filler_levels,
        }
    }

    fn size(&self) -> usize {
        4 + self.filler_levels.len()
    }

    fn matches(&self, labels: &[&ItemLabel]) -> bool {
        if labels.len() != self.size() {
            return false;
        }
        let mut x = None;
        let mut y = None;
        let mut z = None;
        let mut t = None;
        let mut levels = Vec::new();
        for l in labels {
            let slot = match l.kind {
                ItemKind::X => &mut x,
                ItemKind::Y => &mut y,
                ItemKind::Z => &mut z,
                ItemKind::Tuple => {
                    if t.replace(l.triple()).is_some() {
                        return false;
                    }
                    continue;
                }
                ItemKind::Filler => {
                    levels.push(l.index[0]);
                    continue;
                }
                ItemKind::Dummy => return false,
            };
            if slot.replace(l.index[0]).is_some() {
                return false;
            }
        }
        levels.sort_unstable();
        match (x, y, z, t.flatten()) {
            (Some(i), Some(j), Some(k), Some(tr)) => {
                tr == [i, j, k] && self.tuples.contains(&tr) && levels == self.filler_levels
            }
            _ => false,
        }
    }
}

// ---------------------------------------------------------------------------
// Integer correspondence

fn integer_correspondence(
    claim: ClaimId,
    ints: &[LabeledInteger],
    target: &BigInt,
    tuples: &[Triple],
    filler_levels: Vec<u32>,
    opts: &CheckOptions,
) -> Result<LemmaReport, VerifyError> {
    let pattern = Pattern::new(tuples, filler_levels);
    let k = pattern.size();
    check_budget(claim, binomial(ints.len(), k), opts)?;
    let sorted = Sorted::new(ints.iter().map(|li| (&li.label, &li.value)));
    let scan = scan_subsets(sorted.len(), k, opts.threads, |set| {
        let sum: BigInt = sorted.values_of(set).sum();
        let hit = &sum == target;
        let expected = pattern.matches(&sorted.labels_of(set));
        if hit == expected {
            Class::Ok { positive: hit }
        } else {
            Class::Bad { positive: hit }
        }
    });
    let description = format!("all {k}-subsets of {} gadget integers", sorted.len());
    let details = vec![format!("target b = {target}")];
    Ok(sorted.report(claim, description, scan, details))
}

/// Every 4-subset of `U'` sums to `b` exactly when it encodes a tuple of `T`.
pub fn check_integer_correspondence(
    g: &GadgetIntegers,
    tuples: &[Triple],
    opts: &CheckOptions,
) -> Result<LemmaReport, VerifyError> {
    timed(opts, || {
        integer_correspondence(
            ClaimId::IntegerCorrespondence,
            &g.labeled(),
            &g.b,
            tuples,
            Vec::new(),
            opts,
        )
    })
}

// ---------------------------------------------------------------------------
// Bin size

struct BinSizeClaims {
    overflow: ClaimId,
    pairs: ClaimId,
    dummy: ClaimId,
}

fn bin_size_reports(
    instance: &VectorInstance,
    max_fit: usize,
    claims: BinSizeClaims,
    opts: &CheckOptions,
) -> Result<Vec<LemmaReport>, VerifyError> {
    let sorted = Sorted::new(instance.items().iter().map(|it| (&it.label, &it.v)));
    let n = sorted.len();
    let is_dummy = |i: usize| sorted.labels[i].is_dummy();
    let mut reports = Vec::new();

    // (i) no (max_fit + 1)-subset fits
    let k = max_fit + 1;
    let needed = binomial(n, k);
    if needed <= opts.budget as u128 {
        let scan = scan_subsets(n, k, opts.threads, |set| {
            if fits(sorted.values_of(set)) {
                Class::Bad { positive: true }
            } else {
                Class::Ok { positive: false }
            }
        });
        reports.push(sorted.report(
            claims.overflow,
            format!("all {k}-subsets of {n} items"),
            scan,
            Vec::new(),
        ));
    } else {
        // every item has first coordinate above 1/(max_fit+1), so the k
        // smallest first coordinates already decide the claim
        let mut firsts: Vec<&Rational> = sorted.values.iter().map(|v| &v.c1).collect();
        firsts.sort();
        let smallest: Rational = firsts.iter().take(k).copied().sum();
        let decided = smallest > Rational::one();
        reports.push(LemmaReport::new(
            claims.overflow,
            Universe {
                description: format!(
                    "all {k}-subsets of {n} items, via the {k} smallest first coordinates"
                ),
                size: u64::try_from(needed).unwrap_or(u64::MAX),
                complete: decided,
            },
            0,
            Vec::new(),
            0,
            vec![format!(
                "sum of the {k} smallest first coordinates = {}",
                format_rational(&smallest)
            )],
        ));
    }

    // (ii) all pairs fit except dummy pairs
    check_budget(claims.pairs, binomial(n, 2), opts)?;
    let scan = scan_subsets(n, 2, opts.threads, |set| {
        let fit = fits(sorted.values_of(set));
        let both_dummy = is_dummy(set[0]) && is_dummy(set[1]);
        if fit != both_dummy {
            Class::Ok { positive: fit }
        } else {
            Class::Bad { positive: fit }
        }
    });
    let non_fitting = scan.universe - scan.positives;
    let dummies = (0..n).filter(|&i| is_dummy(i)).count();
    let details = vec![format!(
        "{non_fitting} non-fitting pairs; {} dummy-dummy pairs",
        binomial(dummies, 2)
    )];
    reports.push(sorted.report(
        claims.pairs,
        format!("all 2-subsets of {n} items"),
        scan,
        details,
    ));

    // (iii) a dummy plus two other items never fits
    check_budget(claims.dummy, binomial(n, 3), opts)?;
    let scan = scan_subsets(n, 3, opts.threads, |set| {
        if !set.iter().any(|&i| is_dummy(i)) {
            Class::Skip
        } else if fits(sorted.values_of(set)) {
            Class::Bad { positive: true }
        } else {
            Class::Ok { positive: false }
        }
    });
    reports.push(sorted.report(
        claims.dummy,
        format!("3-subsets of {n} items containing a dummy"),
        scan,
        Vec::new(),
    ));
    Ok(reports)
}

fn require_flavor(instance: &VectorInstance, expected: Flavor) -> Result<(), VerifyError> {
    if instance.flavor() == expected {
        Ok(())
    } else {
        Err(VerifyError::WrongFlavor {
            expected,
            found: instance.flavor(),
        })
    }
}

/// Bin-size claims for the general packing instance, as three reports: no
/// five items fit, every non-dummy-dummy pair fits, a dummy takes at most one
/// companion.
pub fn check_bin_size(
    instance: &VectorInstance,
    opts: &CheckOptions,
) -> Result<Vec<LemmaReport>, VerifyError> {
    require_flavor(instance, Flavor::Pack)?;
    timed(opts, || {
        bin_size_reports(
            instance,
            4,
            BinSizeClaims {
                overflow: ClaimId::BinSizeNoFive,
                pairs: ClaimId::BinSizePairs,
                dummy: ClaimId::BinSizeDummyPlusTwo,
            },
            opts,
        )
    })
}

// ---------------------------------------------------------------------------
// Vector correspondence

fn vector_correspondence(
    claim: ClaimId,
    instance: &VectorInstance,
    tuples: &[Triple],
    filler_levels: Vec<u32>,
    opts: &CheckOptions,
) -> Result<LemmaReport, VerifyError> {
    let pattern = Pattern::new(tuples, filler_levels);
    let k = pattern.size();
    let sorted = Sorted::new(instance.items().iter().map(|it| (&it.label, &it.v)));
    check_budget(claim, binomial(sorted.len(), k), opts)?;
    let unit = Vec2::new(int(1), int(1));
    let scan = scan_subsets(sorted.len(), k, opts.threads, |set| {
        let sum = vec_sum(sorted.values_of(set));
        let fit = sum.c1 <= Rational::one() && sum.c2 <= Rational::one();
        let expected = pattern.matches(&sorted.labels_of(set));
        // corresponding sets must land exactly on (1, 1)
        if fit == expected && (!expected || sum == unit) {
            Class::Ok { positive: fit }
        } else {
            Class::Bad { positive: fit }
        }
    });
    let description = format!("all {k}-subsets of {} items", sorted.len());
    Ok(sorted.report(claim, description, scan, Vec::new()))
}

/// Four packing items fit exactly when they encode a tuple of `T` (and then
/// sum to exactly `(1, 1)`).
pub fn check_vector_correspondence(
    instance: &VectorInstance,
    tuples: &[Triple],
    opts: &CheckOptions,
) -> Result<LemmaReport, VerifyError> {
    require_flavor(instance, Flavor::Pack)?;
    timed(opts, || {
        vector_correspondence(
            ClaimId::VectorCorrespondence,
            instance,
            tuples,
            Vec::new(),
            opts,
        )
    })
}

// ---------------------------------------------------------------------------
// Skewed lemmas

/// Residue pool and expected decomposition check for the m-Partition integers.
fn constant_decomposition(
    ints: &[LabeledInteger],
    target: &BigInt,
    r: &BigInt,
    m: u32,
    opts: &CheckOptions,
) -> Result<LemmaReport, VerifyError> {
    let claim = ClaimId::SkewConstantDecomposition;
    let pool: Vec<BigInt> = ints
        .iter()
        .map(|li| &li.value % r)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let k = m as usize;
    check_budget(claim, binomial(pool.len() + k - 1, k), opts)?;
    let goal = target % r;

    // the intended decomposition takes each residue class exactly once
    let mut expected: Vec<BigInt> = Vec::new();
    let mut seen_kinds = BTreeSet::new();
    for li in ints {
        let key = (
            li.label.kind,
            if li.label.kind == ItemKind::Filler {
                li.label.index[0]
            } else {
                0
            },
        );
        if seen_kinds.insert(key) {
            expected.push(&li.value % r);
        }
    }
    expected.sort();

    let mut universe = 0u64;
    let mut found: Vec<Vec<BigInt>> = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        universe += 1;
        let sum: BigInt = idx.iter().map(|&i| &pool[i]).sum();
        if sum == goal {
            found.push(idx.iter().map(|&i| pool[i].clone()).collect());
        }
        // next non-decreasing index sequence
        let mut i = k;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if idx[i] + 1 < pool.len() {
                let v = idx[i] + 1;
                for slot in &mut idx[i..] {
                    *slot = v;
                }
                break;
            }
            if i == 0 {
                i = usize::MAX;
                break;
            }
        }
        if i == usize::MAX || k == 0 {
            break;
        }
    }

    let fmt = |v: &[BigInt]| {
        let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        format!("{{{}}}", parts.join(", "))
    };
    let mut bad: Vec<String> = found
        .iter()
        .filter(|d| **d != expected)
        .map(|d| fmt(d))
        .collect();
    if !found.contains(&expected) {
        bad.push(format!(
            "expected decomposition {} not found",
            fmt(&expected)
        ));
    }
    let largest = pool.last().cloned().unwrap_or_default();
    let wrap_free = BigInt::from(m) * &largest < *r;
    if !wrap_free {
        bad.push(format!("{m} residues of up to {largest} can reach r = {r}"));
    }
    let total = bad.len() as u64;
    bad.truncate(MAX_LISTED);
    Ok(LemmaReport::new(
        claim,
        Universe {
            description: format!(
                "all {k}-multisets of the residue pool {} modulo r",
                fmt(&pool)
            ),
            size: universe,
            complete: true,
        },
        found.len() as u64,
        bad,
        total,
        vec![
            format!("target residue {goal} = 2^(m+1) - 1 with m = {m}"),
            format!("unique decomposition {}", fmt(&expected)),
            format!("m * max residue < r: {wrap_free}"),
        ],
    ))
}

fn skewness_report(instance: &VectorInstance, delta: &Rational, m: u32) -> LemmaReport {
    let bound = rat(2, m as i64 + 1);
    let mut bad = Vec::new();
    for it in instance.items() {
        let v = &it.v;
        let skewed = crate::model::is_skewed(v, delta);
        let small = it.label.is_dummy() || (v.c1 < bound && v.c2 < bound);
        if !(skewed && small) {
            bad.push(it.label.to_string());
        }
    }
    bad.sort();
    let total = bad.len() as u64;
    bad.truncate(MAX_LISTED);
    LemmaReport::new(
        ClaimId::Skewness,
        Universe {
            description: format!("all {} items", instance.len()),
            size: instance.len() as u64,
            complete: true,
        },
        instance.len() as u64 - total,
        bad,
        total,
        vec![format!(
            "delta = {}, non-dummy coordinates < 2/(m+1) = {}",
            format_rational(delta),
            format_rational(&bound)
        )],
    )
}

fn skewed_reports(
    instance: &VectorInstance,
    ints: &[LabeledInteger],
    b: &BigInt,
    r: &BigInt,
    m: u32,
    tuples: &[Triple],
    opts: &CheckOptions,
) -> Result<Vec<LemmaReport>, VerifyError> {
    if m > MAX_SKEW_M {
        return Err(VerifyError::MTooLarge { m, max: MAX_SKEW_M });
    }
    let delta = instance
        .params()
        .delta
        .clone()
        .ok_or_else(|| VerifyError::Precondition("skew instance without delta".into()))?;
    let levels: Vec<u32> = (4..m).collect();
    let mut reports = vec![
        constant_decomposition(ints, b, r, m, opts)?,
        integer_correspondence(
            ClaimId::SkewIntegerCorrespondence,
            ints,
            b,
            tuples,
            levels.clone(),
            opts,
        )?,
    ];
    reports.extend(bin_size_reports(
        instance,
        m as usize,
        BinSizeClaims {
            overflow: ClaimId::SkewBinSizeNoOverflow,
            pairs: ClaimId::SkewBinSizePairs,
            dummy: ClaimId::SkewBinSizeDummyPlusTwo,
        },
        opts,
    )?);
    reports.push(vector_correspondence(
        ClaimId::SkewVectorCorrespondence,
        instance,
        tuples,
        levels,
        opts,
    )?);
    reports.push(skewness_report(instance, &delta, m));
    Ok(reports)
}

/// The skewed analogues: unique residue decomposition, m-subset integer
/// correspondence, bin size (three reports), m-subset vector correspondence,
/// and skewness.
pub fn check_skewed_lemmas(
    instance: &VectorInstance,
    g: &SkewedGadgetIntegers,
    tuples: &[Triple],
    opts: &CheckOptions,
) -> Result<Vec<LemmaReport>, VerifyError> {
    require_flavor(instance, Flavor::Skew)?;
    timed(opts, || {
        skewed_reports(instance, &g.labeled(), &g.b, &g.r, g.m, tuples, opts)
    })
}

// ---------------------------------------------------------------------------
// Covering claims

/// Four reports: every 5-set covers (expected to fail on tuple-heavy sets), a
/// dummy plus anything covers, no single item covers, and four non-dummy
/// items cover exactly when they encode a tuple.
pub fn check_cover_claims(
    instance: &VectorInstance,
    tuples: &[Triple],
    opts: &CheckOptions,
) -> Result<Vec<LemmaReport>, VerifyError> {
    require_flavor(instance, Flavor::Cover)?;
    timed(opts, || cover_reports(instance, tuples, opts))
}

fn cover_reports(
    instance: &VectorInstance,
    tuples: &[Triple],
    opts: &CheckOptions,
) -> Result<Vec<LemmaReport>, VerifyError> {
    let sorted = Sorted::new(instance.items().iter().map(|it| (&it.label, &it.v)));
    let n = sorted.len();
    let is_dummy = |i: usize| sorted.labels[i].is_dummy();
    let mut reports = Vec::new();

    check_budget(ClaimId::CoverAnyFive, binomial(n, 5), opts)?;
    let scan = scan_subsets(n, 5, opts.threads, |set| {
        if covers(sorted.values_of(set)) {
            Class::Ok { positive: true }
        } else {
            Class::Bad { positive: false }
        }
    });
    let mut details = Vec::new();
    if let Some(first) = scan.listed.first() {
        let s = vec_sum(sorted.values_of(first));
        details.push(format!(
            "first counterexample sums to {} ~ ({}, {})",
            s,
            decimal(&s.c1, 4),
            decimal(&s.c2, 4)
        ));
    }
    reports.push(sorted.report(
        ClaimId::CoverAnyFive,
        format!("all 5-subsets of {n} items"),
        scan,
        details,
    ));

    let scan = scan_subsets(n, 2, opts.threads, |set| {
        if !(is_dummy(set[0]) || is_dummy(set[1])) {
            Class::Skip
        } else if covers(sorted.values_of(set)) {
            Class::Ok { positive: true }
        } else {
            Class::Bad { positive: false }
        }
    });
    reports.push(sorted.report(
        ClaimId::CoverDummyPlusAny,
        format!("2-subsets of {n} items containing a dummy"),
        scan,
        Vec::new(),
    ));

    let scan = scan_subsets(n, 1, opts.threads, |set| {
        if covers(sorted.values_of(set)) {
            Class::Bad { positive: true }
        } else {
            Class::Ok { positive: false }
        }
    });
    reports.push(sorted.report(
        ClaimId::CoverNoSingle,
        format!("all {n} single items"),
        scan,
        Vec::new(),
    ));

    let pattern = Pattern::new(tuples, Vec::new());
    let scan = scan_subsets(n, 4, opts.threads, |set| {
        if set.iter().any(|&i| is_dummy(i)) {
            return Class::Skip;
        }
        let cover = covers(sorted.values_of(set));
        if cover == pattern.matches(&sorted.labels_of(set)) {
            Class::Ok { positive: cover }
        } else {
            Class::Bad { positive: cover }
        }
    });
    reports.push(sorted.report(
        ClaimId::CoverNonDummyFour,
        format!(
            "4-subsets of the {} non-dummy items",
            n - instance.dummy_count()
        ),
        scan,
        Vec::new(),
    ));
    Ok(reports)
}

// ---------------------------------------------------------------------------
// Solver cross-check

/// Exact packing with the flavor-derived configuration cap agrees with the
/// uncapped solver.
pub fn check_solver_caps(
    instance: &VectorInstance,
    limits: &SolverLimits,
    opts: &CheckOptions,
) -> Result<LemmaReport, VerifyError> {
    timed(opts, || {
        let cap = limits.packing_cap(instance);
        let (capped, _) = solve_vbp_exact(instance, limits)?;
        let (free, _) = solve_vbp_exact(instance, &limits.unlimited_configs())?;
        let bad = if capped == free {
            Vec::new()
        } else {
            vec![format!("capped {capped} bins vs uncapped {free} bins")]
        };
        let total = bad.len() as u64;
        Ok(LemmaReport::new(
            ClaimId::SolverCapConsistency,
            Universe {
                description: format!(
                    "exact packing of {} items, cap {cap:?} vs none",
                    instance.len()
                ),
                size: 1,
                complete: true,
            },
            (capped == free) as u64,
            bad,
            total,
            vec![format!("optimum {free} bins")],
        ))
    })
}

// ---------------------------------------------------------------------------
// Gap checks

fn ser_rational<S: Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(v))
}

/// Outcome of one end-to-end gap check: certified 3DM optimum, predicted
/// target bounds, exact target optimum and its bin categories.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapReport {
    pub flavor: Flavor,
    pub q: u32,
    pub tuples: usize,
    /// Certified 3DM optimum.
    pub alpha: usize,
    pub beta: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    /// Bins (covers) achievable when the matching has `beta` tuples.
    pub predicted_yes: i64,
    /// Lower bound on bins (packing) or upper bound on covers (covering)
    /// when every matching has at most `alpha` tuples.
    #[serde(serialize_with = "ser_rational")]
    pub predicted_no_bound: Rational,
    pub solver_opt: usize,
    /// Bins with a full tuple configuration (4, or `m` when skewed; for
    /// covering: non-D covers of exactly 4 items).
    pub n_g: usize,
    /// Bins (covers) containing a dummy.
    pub n_d: usize,
    pub n_r: usize,
    /// `alpha >= beta`, so the constructive bound applies.
    pub yes_bound_applies: bool,
    pub yes_bound_holds: bool,
    pub no_bound_holds: bool,
}

impl GapReport {
    pub fn holds(&self) -> bool {
        self.yes_bound_holds && self.no_bound_holds
    }

    /// Both bounds coincide and the solver hits them.
    pub fn pinched(&self) -> bool {
        self.alpha as u64 == self.beta && self.solver_opt as i64 == self.predicted_yes
    }
}

fn certify(instance: &Max3dmInstance) -> Result<usize, VerifyError> {
    instance.require_valid()?;
    Ok(solve_3dm_exact(instance, DEFAULT_TUPLE_LIMIT)?.0)
}

fn categorize(
    instance: &VectorInstance,
    groups: &[Vec<usize>],
    full: usize,
) -> (usize, usize, usize) {
    let items = instance.items();
    let mut n = (0, 0, 0);
    for g in groups {
        if g.iter().any(|&i| items[i].label.is_dummy()) {
            n.1 += 1;
        } else if g.len() == full {
            n.0 += 1;
        } else {
            n.2 += 1;
        }
    }
    n
}

/// Packing gap: `opt <= |T| + 3q - 3 beta` when `alpha >= beta`, and always
/// `opt >= |T| + 3q - alpha/3 - 8 beta/3`.
pub fn gap_check_packing(
    instance: &Max3dmInstance,
    beta: u64,
    limits: &SolverLimits,
) -> Result<GapReport, VerifyError> {
    let alpha = certify(instance)?;
    let vi = build_packing_instance(instance, beta)?;
    let (opt, sol) = solve_vbp_exact(&vi, limits)?;
    let (t, q) = (instance.tuples().len() as i64, instance.q() as i64);
    let (a, bt) = (alpha as i64, beta as i64);
    let yes = t + 3 * q - 3 * bt;
    let bound = int(t + 3 * q) - rat(a, 3) - rat(8 * bt, 3);
    let (n_g, n_d, n_r) = categorize(&vi, &sol.bins, 4);
    let applies = alpha as u64 >= beta;
    Ok(GapReport {
        flavor: Flavor::Pack,
        q: instance.q(),
        tuples: t as usize,
        alpha,
        beta,
        m: None,
        predicted_yes: yes,
        yes_bound_applies: applies,
        yes_bound_holds: !applies || (opt as i64) <= yes,
        no_bound_holds: BigInt::from(opt) >= ceil(&bound),
        predicted_no_bound: bound,
        solver_opt: opt,
        n_g,
        n_d,
        n_r,
    })
}

/// Skewed gap: `opt <= (m-3)|T| + 3q - (m-1) beta` when `alpha >= beta`, and
/// always `opt >= (m-3)|T| + 3q - alpha/(m-1) - m(m-2) beta/(m-1)`.
pub fn gap_check_skewed(
    instance: &Max3dmInstance,
    beta: u64,
    delta: &Rational,
    limits: &SolverLimits,
) -> Result<GapReport, VerifyError> {
    let alpha = certify(instance)?;
    let m = skew_m(delta)?;
    let vi = build_skewed_instance(instance, beta, delta)?;
    let (opt, sol) = solve_vbp_exact(&vi, limits)?;
    let (t, q) = (instance.tuples().len() as i64, instance.q() as i64);
    let (a, bt, mi) = (alpha as i64, beta as i64, m as i64);
    let base = (mi - 3) * t + 3 * q;
    let yes = base - (mi - 1) * bt;
    let bound = int(base) - rat(a, mi - 1) - rat(mi * (mi - 2) * bt, mi - 1);
    let (n_g, n_d, n_r) = categorize(&vi, &sol.bins, m as usize);
    let applies = alpha as u64 >= beta;
    Ok(GapReport {
        flavor: Flavor::Skew,
        q: instance.q(),
        tuples: t as usize,
        alpha,
        beta,
        m: Some(m),
        predicted_yes: yes,
        yes_bound_applies: applies,
        yes_bound_holds: !applies || (opt as i64) <= yes,
        no_bound_holds: BigInt::from(opt) >= ceil(&bound),
        predicted_no_bound: bound,
        solver_opt: opt,
        n_g,
        n_d,
        n_r,
    })
}

/// Covering gap: `opt >= |T| + 3q - 3 beta` when `alpha >= beta`, and always
/// `opt <= |T| + 3q - 16 beta/5 + alpha/5`.
pub fn gap_check_covering(
    instance: &Max3dmInstance,
    beta: u64,
    limits: &SolverLimits,
) -> Result<GapReport, VerifyError> {
    let alpha = certify(instance)?;
    let vi = build_covering_instance(instance, beta)?;
    let (opt, sol) = solve_vbc_exact(&vi, limits)?;
    let (t, q) = (instance.tuples().len() as i64, instance.q() as i64);
    let (a, bt) = (alpha as i64, beta as i64);
    let yes = t + 3 * q - 3 * bt;
    let bound = int(t + 3 * q) - rat(16 * bt, 5) + rat(a, 5);
    let (n_g, n_d, n_r) = categorize(&vi, &sol.covers, 4);
    let applies = alpha as u64 >= beta;
    Ok(GapReport {
        flavor: Flavor::Cover,
        q: instance.q(),
        tuples: t as usize,
        alpha,
        beta,
        m: None,
        predicted_yes: yes,
        yes_bound_applies: applies,
        yes_bound_holds: !applies || (opt as i64) >= yes,
        no_bound_holds: BigInt::from(opt) <= floor(&bound),
        predicted_no_bound: bound,
        solver_opt: opt,
        n_g,
        n_d,
        n_r,
    })
}

// ---------------------------------------------------------------------------
// Original construction

/// The original `r = 32q` construction, without dummies: the tuple vectors
/// of `(1,1,1), (2,1,1), (3,1,1)` do not fit in one bin, contradicting the
/// claim that any three vectors do. Verified when both
/// `3/5 + (t1+t2+t3)/(5b) > 1` and `r^4 > 3r^3 + 3r^2 + 6r + 6` hold.
pub fn counterexample_woeginger(q: u32) -> Result<LemmaReport, VerifyError> {
    if q < 3 {
        return Err(VerifyError::Precondition(format!(
            "needs q >= 3 for x1, x2, x3 (got q = {q})"
        )));
    }
    let r = BigInt::from(32u32) * q;
    let r2 = &r * &r;
    let r3 = &r2 * &r;
    let r4 = &r3 * &r;
    let b = &r4 + 15;
    let t: Vec<BigInt> = (1..=3u32)
        .map(|i| &r4 - &r3 - &r2 - BigInt::from(i) * &r + 8)
        .collect();
    let vectors: Vec<Vec2> = t
        .iter()
        .map(|a| crate::gadgets::packing_vector(a, &b))
        .collect();
    let first_sum = vec_sum(&vectors).c1;
    let overflow = first_sum > Rational::one();
    let lhs = r4.clone();
    let rhs = 3 * &r3 + 3 * &r2 + 6 * &r + 6;
    let inequality = lhs > rhs;
    let fits_together = fits(&vectors);

    let labels: Vec<ItemLabel> = (1..=3).map(|i| ItemLabel::tuple([i, 1, 1])).collect();
    let mut bad = Vec::new();
    if !overflow {
        bad.push("first coordinates of the three tuple vectors sum to at most 1".to_string());
    }
    if !inequality {
        bad.push(format!("r^4 = {lhs} <= {rhs}"));
    }
    let total = bad.len() as u64;
    Ok(LemmaReport::new(
        ClaimId::WoegingerThreeTuple,
        Universe {
            description: format!(
                "tuple vectors {} of the r = 32q construction at q = {q}",
                format_set(&labels.iter().collect::<Vec<_>>())
            ),
            size: 1,
            complete: true,
        },
        (!fits_together) as u64,
        bad,
        total,
        vec![
            format!("r = {r}, b = {b}"),
            format!("t' = {}, {}, {}", t[0], t[1], t[2]),
            format!(
                "first-coordinate sum = {} ~ {} > 1: {overflow}",
                format_rational(&first_sum),
                decimal(&first_sum, 6)
            ),
            format!("r^4 = {lhs} > 3r^3 + 3r^2 + 6r + 6 = {rhs}: {inequality}"),
            format!("three tuple vectors fit together: {fits_together}"),
        ],
    ))
}

// ---------------------------------------------------------------------------
// Bound arithmetic

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    AtLeast,
    GreaterThan,
    LessThan,
}

impl Relation {
    fn holds(&self, a: &Rational, b: &Rational) -> bool {
        match self {
            Relation::AtLeast => a >= b,
            Relation::GreaterThan => a > b,
            Relation::LessThan => a < b,
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Relation::AtLeast => ">=",
            Relation::GreaterThan => ">",
            Relation::LessThan => "<",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundResult {
    pub name: String,
    #[serde(serialize_with = "ser_rational")]
    pub exact: Rational,
    pub decimal: String,
    #[serde(serialize_with = "ser_rational")]
    pub reference: Rational,
    pub relation: Relation,
    pub holds: bool,
}

impl BoundResult {
    fn new(name: String, exact: Rational, relation: Relation, reference: Rational) -> Self {
        let holds = relation.holds(&exact, &reference);
        BoundResult {
            name,
            decimal: decimal(&exact, 12),
            exact,
            reference,
            relation,
            holds,
        }
    }

    pub fn summary(&self) -> String {
        format!(
            "{:<22} {} {} {} ({}) : {}",
            self.name,
            self.decimal,
            self.relation.symbol(),
            decimal(&self.reference, 12),
            format_rational(&self.reference),
            if self.holds { "holds" } else { "FAILS" }
        )
    }
}

/// `1 + (beta0 - alpha0) / (15 - 9 beta0)`
pub fn packing_bound(c: &HardnessConstants) -> Rational {
    let gap = &c.beta0 - &c.alpha0;
    int(1) + gap / (int(15) - int(9) * &c.beta0)
}

/// `1 + (beta0 - alpha0) / (25 - 16 beta0 + alpha0)`
pub fn covering_bound(c: &HardnessConstants) -> Rational {
    let gap = &c.beta0 - &c.alpha0;
    int(1) + gap / (int(25) - int(16) * &c.beta0 + &c.alpha0)
}

/// `1 + (beta0 - alpha0) / (m(2m - 3) - (m - 1)^2 beta0)`
pub fn skewed_bound(c: &HardnessConstants, m: u32) -> Rational {
    let m = m as i64;
    let gap = &c.beta0 - &c.alpha0;
    int(1) + gap / (int(m * (2 * m - 3)) - int((m - 1) * (m - 1)) * &c.beta0)
}

/// Packing bound against `1 + 1/599` (and `< 1 + 1/598`), covering bound
/// against `1 + 1/997` (and `< 1 + 1/996`), and for each `m` the skewed bound
/// against `1 + delta^2/400` at `delta = 2/(m+1)`.
pub fn hardness_bounds(
    constants: &HardnessConstants,
    m_range: RangeInclusive<u32>,
) -> Result<Vec<BoundResult>, VerifyError> {
    if *m_range.start() < 4 || *m_range.end() > 64 {
        return Err(VerifyError::Precondition(format!(
            "m range {}..={} is outside 4..=64",
            m_range.start(),
            m_range.end()
        )));
    }
    let p = packing_bound(constants);
    let c = covering_bound(constants);
    let mut out = vec![
        BoundResult::new(
            "packing".into(),
            p.clone(),
            Relation::AtLeast,
            int(1) + rat(1, 599),
        ),
        BoundResult::new(
            "packing-tightness".into(),
            p,
            Relation::LessThan,
            int(1) + rat(1, 598),
        ),
        BoundResult::new(
            "covering".into(),
            c.clone(),
            Relation::AtLeast,
            int(1) + rat(1, 997),
        ),
        BoundResult::new(
            "covering-tightness".into(),
            c,
            Relation::LessThan,
            int(1) + rat(1, 996),
        ),
    ];
    for m in m_range {
        let delta = rat(2, m as i64 + 1);
        let reference = int(1) + Pow::pow(&delta, 2u32) / int(400);
        out.push(BoundResult::new(
            format!("skewed-m{m}"),
            skewed_bound(constants, m),
            Relation::GreaterThan,
            reference,
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Document-driven dispatch

/// Every lemma check applicable to an instance document's flavor, with the
/// gadget integers recovered from the item coordinates.
pub fn check_instance(
    instance: &VectorInstance,
    opts: &CheckOptions,
) -> Result<Vec<LemmaReport>, VerifyError> {
    let tuples = instance.tuples();
    let ints = crate::gadgets::integers_from_instance(instance)?;
    let b = instance
        .params()
        .b
        .clone()
        .ok_or_else(|| VerifyError::Precondition("instance has no `b` parameter".into()))?;
    timed(opts, || match instance.flavor() {
        Flavor::Pack => {
            let mut out = vec![integer_correspondence(
                ClaimId::IntegerCorrespondence,
                &ints,
                &b,
                &tuples,
                Vec::new(),
                opts,
            )?];
            out.extend(check_bin_size(instance, opts)?);
            out.push(check_vector_correspondence(instance, &tuples, opts)?);
            Ok(out)
        }
        Flavor::Cover => {
            let mut out = vec![integer_correspondence(
                ClaimId::IntegerCorrespondence,
                &ints,
                &b,
                &tuples,
                Vec::new(),
                opts,
            )?];
            out.extend(cover_reports(instance, &tuples, opts)?);
            Ok(out)
        }
        Flavor::Skew => {
            let p = instance.params();
            let (r, m) = match (&p.r, p.m) {
                (Some(r), Some(m)) => (r.clone(), m),
                _ => {
                    return Err(VerifyError::Precondition(
                        "skew instance needs `r` and `m` parameters".into(),
                    ))
                }
            };
            skewed_reports(instance, &ints, &b, &r, m, &tuples, opts)
        }
        Flavor::Generic => Err(VerifyError::Precondition(
            "generic instances have no lemmas to check".into(),
        )),
    })
}

/// Reports that are not verified, ignoring the claims in `expected_falsified`.
pub fn unexpected_failures<'a>(
    reports: &'a [LemmaReport],
    expected_falsified: &[ClaimId],
) -> Vec<&'a LemmaReport> {
    reports
        .iter()
        .filter(|r| r.verdict != Verdict::Verified && !expected_falsified.contains(&r.claim_id))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{build_integers, build_skewed_integers, pack_vectors};

    fn conflict_q2() -> Max3dmInstance {
        Max3dmInstance::new(2, vec![[1, 1, 1], [1, 2, 2], [2, 1, 2], [2, 2, 1]])
    }

    fn cyclic_q3() -> Max3dmInstance {
        let mut tuples: Vec<Triple> = (1..=3).map(|i| [i, i, i]).collect();
        tuples.extend((1..=3).map(|i| [i, i % 3 + 1, (i + 1) % 3 + 1]));
        Max3dmInstance::new(3, tuples)
    }

    #[test]
    fn combinations_enumerate_binomially() {
        for n in 0..8 {
            for k in 0..=n + 1 {
                let mut count = 0u128;
                let mut prev: Option<Vec<usize>> = None;
                for_each_combination(n, k, 0, 1, |s| {
                    count += 1;
                    if let Some(p) = &prev {
                        assert!(p.as_slice() < s);
                    }
                    prev = Some(s.to_vec());
                });
                assert_eq!(count, binomial(n, k), "n={n} k={k}");
            }
        }
        let mut sharded = 0;
        for shard in 0..3 {
            for_each_combination(7, 3, shard, 3, |_| sharded += 1);
        }
        assert_eq!(sharded, 35);
    }

    #[test]
    fn integer_correspondence_q2() {
        let inst = conflict_q2();
        let g = build_integers(&inst).unwrap();
        let r = check_integer_correspondence(&g, inst.tuples(), &CheckOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Verified);
        assert_eq!(r.universe.size, 210);
        assert_eq!(r.positives, 4);
    }

    #[test]
    fn integer_correspondence_q3() {
        let inst = cyclic_q3();
        let g = build_integers(&inst).unwrap();
        let r = check_integer_correspondence(&g, inst.tuples(), &CheckOptions::default()).unwrap();
        assert!(r.is_verified());
        assert_eq!(r.universe.size, 1365);
        assert_eq!(r.positives, 6);
    }

    #[test]
    fn mutated_tuple_integer_is_caught() {
        let inst = conflict_q2();
        let mut g = build_integers(&inst).unwrap();
        g.t[0].1 += 1;
        let r = check_integer_correspondence(&g, inst.tuples(), &CheckOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Falsified);
        assert_eq!(
            r.counterexamples,
            vec!["{x1, y1, z1, t(1,1,1)}".to_string()]
        );
    }

    #[test]
    fn bin_size_q2() {
        let vi = build_packing_instance(&conflict_q2(), 2).unwrap();
        let reports = check_bin_size(&vi, &CheckOptions::default()).unwrap();
        assert_eq!(reports.len(), 3);
        assert!(reports.iter().all(|r| r.is_verified()), "{reports:#?}");
        // 2 dummies: exactly one non-fitting pair, the dummy pair
        assert_eq!(reports[1].universe.size - reports[1].positives, 1);
    }

    #[test]
    fn bin_size_first_coordinate_fallback() {
        let vi = build_packing_instance(&conflict_q2(), 2).unwrap();
        let opts = CheckOptions {
            budget: 500,
            ..Default::default()
        };
        let reports = check_bin_size(&vi, &opts).unwrap();
        assert!(reports[0].is_verified());
        assert!(reports[0]
            .universe
            .description
            .contains("smallest first coordinates"));
    }

    #[test]
    fn vector_correspondence_q2() {
        let inst = conflict_q2();
        let vi = build_packing_instance(&inst, 2).unwrap();
        let r = check_vector_correspondence(&vi, inst.tuples(), &CheckOptions::default()).unwrap();
        assert!(r.is_verified());
        assert_eq!(r.positives, 4);
        let find = |l: ItemLabel| &vi.items().iter().find(|it| it.label == l).unwrap().v;
        let wrong = [
            find(ItemLabel::x(1)),
            find(ItemLabel::x(2)),
            find(ItemLabel::y(1)),
            find(ItemLabel::z(1)),
        ];
        assert!(!fits(wrong));
    }

    #[test]
    fn flavor_mismatch_is_an_error() {
        let vi = build_covering_instance(&conflict_q2(), 2).unwrap();
        assert!(matches!(
            check_bin_size(&vi, &CheckOptions::default()),
            Err(VerifyError::WrongFlavor { .. })
        ));
    }

    #[test]
    fn budget_exceeded() {
        let inst = conflict_q2();
        let g = build_integers(&inst).unwrap();
        let opts = CheckOptions {
            budget: 100,
            ..Default::default()
        };
        assert!(matches!(
            check_integer_correspondence(&g, inst.tuples(), &opts),
            Err(VerifyError::BudgetExceeded { needed: 210, .. })
        ));
    }

    #[test]
    fn skewed_m5_decomposition() {
        let inst = conflict_q2();
        let g = build_skewed_integers(&inst, &rat(7, 20)).unwrap();
        let vi = crate::gadgets::skew_vectors(&g, 2).unwrap();
        let reports =
            check_skewed_lemmas(&vi, &g, inst.tuples(), &CheckOptions::default()).unwrap();
        let dec = &reports[0];
        assert_eq!(dec.claim_id, ClaimId::SkewConstantDecomposition);
        assert_eq!(dec.universe.size, 126);
        assert_eq!(dec.positives, 1);
        assert!(dec.universe.description.contains("{1, 2, 4, 16, 40}"));
        assert!(reports.iter().all(|r| r.is_verified()), "{reports:#?}");
    }

    #[test]
    fn skewed_without_repair_fails_decomposition() {
        // undo the +8 on every tuple integer
        let inst = conflict_q2();
        let mut g = build_skewed_integers(&inst, &rat(2, 5)).unwrap();
        for (_, t) in &mut g.t {
            *t -= 8;
        }
        let vi = crate::gadgets::skew_vectors(&g, 2).unwrap();
        let reports =
            check_skewed_lemmas(&vi, &g, inst.tuples(), &CheckOptions::default()).unwrap();
        let failed: Vec<_> = reports
            .iter()
            .filter(|r| !r.is_verified())
            .map(|r| r.claim_id)
            .collect();
        assert!(failed.contains(&ClaimId::SkewConstantDecomposition));
        assert!(failed.contains(&ClaimId::SkewIntegerCorrespondence));
        assert!(failed.contains(&ClaimId::SkewVectorCorrespondence));
    }

    #[test]
    fn cover_claims_q2() {
        let inst = conflict_q2();
        let vi = build_covering_instance(&inst, 2).unwrap();
        let reports = check_cover_claims(&vi, inst.tuples(), &CheckOptions::default()).unwrap();
        assert_eq!(reports[0].claim_id, ClaimId::CoverAnyFive);
        assert_eq!(reports[0].verdict, Verdict::Falsified);
        assert!(!reports[0].counterexamples.is_empty());
        for r in &reports[1..] {
            assert!(r.is_verified(), "{r:#?}");
        }
        assert_eq!(reports[3].positives, 4);
    }

    #[test]
    fn threads_do_not_change_reports() {
        let inst = cyclic_q3();
        let vi = build_covering_instance(&inst, 3).unwrap();
        let one = check_cover_claims(&vi, inst.tuples(), &CheckOptions::default()).unwrap();
        let four = check_cover_claims(
            &vi,
            inst.tuples(),
            &CheckOptions {
                threads: 4,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn gap_packing_conflict_instance() {
        let r = gap_check_packing(&conflict_q2(), 2, &SolverLimits::default()).unwrap();
        assert_eq!(r.alpha, 1);
        // 10 - 1/3 - 16/3 = 13/3
        assert_eq!(r.predicted_no_bound, rat(13, 3));
        assert!(r.solver_opt >= 5);
        assert!(!r.yes_bound_applies);
        assert!(r.holds());
        assert_eq!(r.n_g + r.n_d + r.n_r, r.solver_opt);
    }

    #[test]
    fn gap_covering_bound_arithmetic() {
        let r = gap_check_covering(&conflict_q2(), 1, &SolverLimits::default()).unwrap();
        // 10 - 16/5 + 1/5 = 7
        assert_eq!(r.predicted_no_bound, int(7));
        assert!(r.holds());
        assert_eq!(r.n_g + r.n_d + r.n_r, r.solver_opt);
    }

    #[test]
    fn gap_errors_surface() {
        assert!(matches!(
            gap_check_packing(&conflict_q2(), 3, &SolverLimits::default()),
            Err(VerifyError::Gadget(GadgetError::NegativeDummyCount { .. }))
        ));
        assert!(
            gap_check_packing(&Max3dmInstance::new(0, vec![]), 0, &SolverLimits::default())
                .is_err()
        );
        assert!(gap_check_skewed(&conflict_q2(), 9, &rat(2, 5), &SolverLimits::default()).is_err());
    }

    #[test]
    fn woeginger_counterexample_q3() {
        let r = counterexample_woeginger(3).unwrap();
        assert!(r.is_verified(), "{r:#?}");
        assert!(r
            .details
            .iter()
            .any(|d| d.contains("84934656") && d.contains("2682438")));
        assert!(counterexample_woeginger(2).is_err());
    }

    #[test]
    fn smallest_r_inequality() {
        // r = 32 is the smallest value of 32q
        let r = BigInt::from(32);
        let lhs = Pow::pow(&r, 4u32);
        let rhs = 3 * Pow::pow(&r, 3u32) + 3 * &r * &r + 6 * &r + 6;
        assert_eq!(lhs, BigInt::from(1_048_576));
        assert_eq!(rhs, BigInt::from(101_574));
    }

    #[test]
    fn bound_values() {
        let c = HardnessConstants::theorem();
        let p = packing_bound(&c);
        assert!(p >= int(1) + rat(1, 599) && p < int(1) + rat(1, 598));
        let s4 = skewed_bound(&c, 4) - int(1);
        // denominator 20 - 9 beta0
        assert_eq!(s4, (&c.beta0 - &c.alpha0) / (int(20) - int(9) * &c.beta0));
        assert_eq!(decimal(&s4, 6), "0.000923");
        assert!(hardness_bounds(&c, 3..=10).is_err());
        assert!(hardness_bounds(&c, 4..=65).is_err());
    }

    #[test]
    fn covering_bound_depends_on_which_beta0() {
        // with the theorem's beta0 the covering bound falls just short of
        // 998/997; the variant beta0 = 0.979339943 clears it
        let theorem = covering_bound(&HardnessConstants::theorem());
        assert!(theorem < int(1) + rat(1, 997));
        assert!(theorem > int(1) + rat(1, 998));
        let restated = covering_bound(&HardnessConstants::covering_restated());
        assert!(restated >= int(1) + rat(1, 997));
    }

    #[test]
    fn cap_cross_check() {
        let vi = build_packing_instance(&conflict_q2(), 2).unwrap();
        let r = check_solver_caps(&vi, &SolverLimits::default(), &CheckOptions::default()).unwrap();
        assert!(r.is_verified());
    }

    #[test]
    fn check_instance_dispatch() {
        let inst = conflict_q2();
        let g = build_integers(&inst).unwrap();
        let vi = pack_vectors(&g, 2).unwrap();
        let reports = check_instance(&vi, &CheckOptions::default()).unwrap();
        assert_eq!(reports.len(), 5);
        assert!(unexpected_failures(&reports, &[]).is_empty());
        let vc = build_covering_instance(&inst, 2).unwrap();
        let reports = check_instance(&vc, &CheckOptions::default()).unwrap();
        assert_eq!(unexpected_failures(&reports, &[]).len(), 1);
        assert!(unexpected_failures(&reports, &[ClaimId::CoverAnyFive]).is_empty());
    }
}
