//! Exact and heuristic solvers for 2-dimensional vector bin packing and
//! vector bin covering.
//!
//! The exact solvers are dynamic programs over item subsets (bitmasks). Each
//! coordinate is rescaled to integers over the common denominator of that
//! coordinate, so every feasibility test is an exact integer comparison; the
//! scaled values use `i128` when the column totals fit and `BigInt` otherwise.

use std::ops::{AddAssign, SubAssign};

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::model::{
    covers, fits, BigInt, CoveringSolution, Flavor, PackingSolution, Rational, Vec2, VectorInstance,
};

pub const DEFAULT_MAX_ITEMS: usize = 24;
/// The memo table has `2^n` entries; beyond this the tool refuses.
pub const HARD_MAX_ITEMS: usize = 26;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("instance has {items} items, exact solver limit is {limit}")]
    SizeLimit { items: usize, limit: usize },
    #[error("item {index} ({label}) does not fit in an empty bin")]
    InfeasibleItem { index: usize, label: String },
    #[error("invalid item order: {0}")]
    InvalidOrder(String),
}

/// Upper bound on configuration size used by the exact solvers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConfigCap {
    /// Derived from the flavor: 4 for `pack`, `m` for `skew`, none otherwise.
    Auto,
    Unlimited,
    Fixed(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverLimits {
    pub max_items: usize,
    pub max_config_size: ConfigCap,
}

impl Default for SolverLimits {
    fn default() -> Self {
        SolverLimits {
            max_items: DEFAULT_MAX_ITEMS,
            max_config_size: ConfigCap::Auto,
        }
    }
}

impl SolverLimits {
    pub fn unlimited_configs(self) -> Self {
        SolverLimits {
            max_config_size: ConfigCap::Unlimited,
            ..self
        }
    }

    /// Configuration cap for packing. Only flavors whose structure bounds the
    /// bin size get one; covering and generic instances are never capped
    /// automatically.
    pub fn packing_cap(&self, instance: &VectorInstance) -> Option<usize> {
        match self.max_config_size {
            ConfigCap::Unlimited => None,
            ConfigCap::Fixed(k) => Some(k),
            ConfigCap::Auto => match instance.flavor() {
                Flavor::Pack => Some(4),
                Flavor::Skew => instance.params().m.map(|m| m as usize),
                Flavor::Cover | Flavor::Generic => None,
            },
        }
    }

    pub fn covering_cap(&self) -> Option<usize> {
        match self.max_config_size {
            ConfigCap::Fixed(k) => Some(k),
            ConfigCap::Auto | ConfigCap::Unlimited => None,
        }
    }

    fn check_size(&self, n: usize) -> Result<(), SolverError> {
        let limit = self.max_items.min(HARD_MAX_ITEMS);
        if n > limit {
            Err(SolverError::SizeLimit { items: n, limit })
        } else {
            Ok(())
        }
    }
}

trait Weight: Clone + Ord + Zero + for<'a> AddAssign<&'a Self> + for<'a> SubAssign<&'a Self> {}

impl<T> Weight for T where
    T: Clone + Ord + Zero + for<'a> AddAssign<&'a T> + for<'a> SubAssign<&'a T>
{
}

/// Items as integer pairs against an integer capacity per coordinate.
struct Scaled<W> {
    items: Vec<[W; 2]>,
    cap: [W; 2],
}

impl<W: Weight> Scaled<W> {
    fn sum(&self, mask: u32) -> [W; 2] {
        let mut acc = [W::zero(), W::zero()];
        for i in bits(mask) {
            acc[0] += &self.items[i][0];
            acc[1] += &self.items[i][1];
        }
        acc
    }

    fn fits_with(&self, sum: &[W; 2], i: usize) -> bool {
        let mut a = sum[0].clone();
        a += &self.items[i][0];
        if a > self.cap[0] {
            return false;
        }
        let mut b = sum[1].clone();
        b += &self.items[i][1];
        b <= self.cap[1]
    }

    fn plus(&self, sum: &[W; 2], i: usize) -> [W; 2] {
        let mut out = sum.clone();
        out[0] += &self.items[i][0];
        out[1] += &self.items[i][1];
        out
    }

    fn minus(&self, sum: &[W; 2], i: usize) -> [W; 2] {
        let mut out = sum.clone();
        out[0] -= &self.items[i][0];
        out[1] -= &self.items[i][1];
        out
    }

    fn covers(&self, sum: &[W; 2]) -> bool {
        sum[0] >= self.cap[0] && sum[1] >= self.cap[1]
    }
}

fn column_lcm(values: impl Iterator<Item = BigInt>) -> BigInt {
    values.fold(BigInt::one(), |acc, d| acc.lcm(&d))
}

fn scale_column(values: &[&Rational], lcm: &BigInt) -> Vec<BigInt> {
    values
        .iter()
        .map(|v| v.numer() * (lcm / v.denom()))
        .collect()
}

fn scale_big(vectors: &[Vec2]) -> Scaled<BigInt> {
    let c1: Vec<&Rational> = vectors.iter().map(|v| &v.c1).collect();
    let c2: Vec<&Rational> = vectors.iter().map(|v| &v.c2).collect();
    let l1 = column_lcm(c1.iter().map(|v| v.denom().clone()));
    let l2 = column_lcm(c2.iter().map(|v| v.denom().clone()));
    let s1 = scale_column(&c1, &l1);
    let s2 = scale_column(&c2, &l2);
    Scaled {
        items: s1.into_iter().zip(s2).map(|(a, b)| [a, b]).collect(),
        cap: [l1, l2],
    }
}

fn narrow(big: &Scaled<BigInt>) -> Option<Scaled<i128>> {
    // all coordinates are non-negative, so no subset sum exceeds the totals
    for c in 0..2 {
        let total: BigInt = big.items.iter().map(|it| &it[c]).sum::<BigInt>() + &big.cap[c];
        total.to_i128()?;
    }
    Some(Scaled {
        items: big
            .items
            .iter()
            .map(|[a, b]| [a.to_i128().unwrap(), b.to_i128().unwrap()])
            .collect(),
        cap: [big.cap[0].to_i128()?, big.cap[1].to_i128()?],
    })
}

fn bits(mask: u32) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

fn mask_to_indices(mask: u32) -> Vec<usize> {
    bits(mask).collect()
}

// ---------------------------------------------------------------------------
// Packing

struct PackDp<'a, W> {
    w: &'a Scaled<W>,
    cap_size: usize,
    /// 0 = unknown, otherwise value + 1
    memo: Vec<u8>,
}

impl<W: Weight> PackDp<'_, W> {
    /// Configurations containing the lowest item of `set` that cannot be
    /// extended by any other item of `set`. Restricting to these is enough:
    /// the optimum over a subset never exceeds the optimum over the set.
    fn maximal_configs(&self, set: u32) -> Vec<u32> {
        let pivot = set.trailing_zeros() as usize;
        let start = 1u32 << pivot;
        let mut out = Vec::new();
        let sum = self.w.plus(&[W::zero(), W::zero()], pivot);
        self.extend(set, start, &sum, pivot, 1, &mut out);
        out
    }

    fn extend(
        &self,
        set: u32,
        mask: u32,
        sum: &[W; 2],
        last: usize,
        size: usize,
        out: &mut Vec<u32>,
    ) {
        let addable: Vec<usize> = if size >= self.cap_size {
            Vec::new()
        } else {
            bits(set & !mask)
                .filter(|&j| self.w.fits_with(sum, j))
                .collect()
        };
        if addable.is_empty() {
            out.push(mask);
            return;
        }
        for &j in addable.iter().filter(|&&j| j > last) {
            let next = self.w.plus(sum, j);
            self.extend(set, mask | 1 << j, &next, j, size + 1, out);
        }
    }

    fn value(&mut self, set: u32) -> u8 {
        if set == 0 {
            return 0;
        }
        let cached = self.memo[set as usize];
        if cached != 0 {
            return cached - 1;
        }
        let mut best = u8::MAX;
        for c in self.maximal_configs(set) {
            let v = 1 + self.value(set & !c);
            best = best.min(v);
        }
        self.memo[set as usize] = best + 1;
        best
    }

    fn solve(mut self, n: usize) -> Vec<Vec<usize>> {
        let mut set = if n == 0 { 0 } else { u32::MAX >> (32 - n) };
        let mut bins = Vec::new();
        while set != 0 {
            let target = self.value(set);
            let chosen = self
                .maximal_configs(set)
                .into_iter()
                .find(|&c| 1 + self.value(set & !c) == target)
                .expect("optimal configuration exists");
            bins.push(mask_to_indices(chosen));
            set &= !chosen;
        }
        bins
    }
}

fn pack_exact<W: Weight>(w: &Scaled<W>, cap_size: usize) -> Vec<Vec<usize>> {
    let n = w.items.len();
    let dp = PackDp {
        w,
        cap_size,
        memo: vec![0; 1usize << n],
    };
    dp.solve(n)
}

/// Minimum number of bins, with one optimal packing.
pub fn solve_vbp_exact(
    instance: &VectorInstance,
    limits: &SolverLimits,
) -> Result<(usize, PackingSolution), SolverError> {
    let n = instance.len();
    limits.check_size(n)?;
    for (index, it) in instance.items().iter().enumerate() {
        if !fits([&it.v]) {
            return Err(SolverError::InfeasibleItem {
                index,
                label: it.label.to_string(),
            });
        }
    }
    let cap = limits.packing_cap(instance).unwrap_or(n).max(1);
    let big = scale_big(&instance.vectors());
    let bins = match narrow(&big) {
        Some(small) => pack_exact(&small, cap),
        None => pack_exact(&big, cap),
    };
    Ok((bins.len(), PackingSolution { bins }))
}

// ---------------------------------------------------------------------------
// Covering

struct CoverDp<'a, W> {
    w: &'a Scaled<W>,
    cap_size: usize,
    memo: Vec<u8>,
}

impl<W: Weight> CoverDp<'_, W> {
    /// Covers containing the lowest item of `set` none of whose proper
    /// subsets cover.
    fn minimal_covers(&self, set: u32) -> Vec<u32> {
        let pivot = set.trailing_zeros() as usize;
        let mut out = Vec::new();
        let sum = self.w.plus(&[W::zero(), W::zero()], pivot);
        self.grow(set, 1 << pivot, &sum, pivot, 1, &mut out);
        out
    }

    fn is_minimal(&self, mask: u32, sum: &[W; 2]) -> bool {
        bits(mask).all(|e| !self.w.covers(&self.w.minus(sum, e)))
    }

    fn grow(
        &self,
        set: u32,
        mask: u32,
        sum: &[W; 2],
        last: usize,
        size: usize,
        out: &mut Vec<u32>,
    ) {
        if self.w.covers(sum) {
            if self.is_minimal(mask, sum) {
                out.push(mask);
            }
            return;
        }
        if size >= self.cap_size {
            return;
        }
        let rest = set & !((2u32 << last) - 1);
        if rest == 0 || !self.w.covers(&self.add_mask(sum, rest)) {
            return;
        }
        for j in bits(rest) {
            let next = self.w.plus(sum, j);
            self.grow(set, mask | 1 << j, &next, j, size + 1, out);
        }
    }

    fn add_mask(&self, sum: &[W; 2], mask: u32) -> [W; 2] {
        let extra = self.w.sum(mask);
        let mut out = sum.clone();
        out[0] += &extra[0];
        out[1] += &extra[1];
        out
    }

    fn value(&mut self, set: u32) -> u8 {
        if set == 0 || !self.w.covers(&self.w.sum(set)) {
            return 0;
        }
        let cached = self.memo[set as usize];
        if cached != 0 {
            return cached - 1;
        }
        let pivot_bit = set & set.wrapping_neg();
        let mut best = self.value(set & !pivot_bit);
        for c in self.minimal_covers(set) {
            best = best.max(1 + self.value(set & !c));
        }
        self.memo[set as usize] = best + 1;
        best
    }

    fn solve(mut self, n: usize) -> CoveringSolution {
        let mut set = if n == 0 { 0 } else { u32::MAX >> (32 - n) };
        let mut sol = CoveringSolution::default();
        while set != 0 {
            let target = self.value(set);
            let pivot_bit = set & set.wrapping_neg();
            if self.value(set & !pivot_bit) == target {
                sol.leftovers.push(pivot_bit.trailing_zeros() as usize);
                set &= !pivot_bit;
                continue;
            }
            let chosen = self
                .minimal_covers(set)
                .into_iter()
                .find(|&c| 1 + self.value(set & !c) == target)
                .expect("optimal cover exists");
            sol.covers.push(mask_to_indices(chosen));
            set &= !chosen;
        }
        sol
    }
}

fn cover_exact<W: Weight>(w: &Scaled<W>, cap_size: usize) -> CoveringSolution {
    let n = w.items.len();
    let dp = CoverDp {
        w,
        cap_size,
        memo: vec![0; 1usize << n],
    };
    dp.solve(n)
}

/// Maximum number of disjoint unit covers, with one optimal family.
pub fn solve_vbc_exact(
    instance: &VectorInstance,
    limits: &SolverLimits,
) -> Result<(usize, CoveringSolution), SolverError> {
    let n = instance.len();
    limits.check_size(n)?;
    let cap = limits.covering_cap().unwrap_or(n).max(1);
    let big = scale_big(&instance.vectors());
    let sol = match narrow(&big) {
        Some(small) => cover_exact(&small, cap),
        None => cover_exact(&big, cap),
    };
    Ok((sol.covers.len(), sol))
}

// ---------------------------------------------------------------------------
// Heuristics

fn resolve_order(n: usize, order: Option<&[usize]>) -> Result<Vec<usize>, SolverError> {
    match order {
        None => Ok((0..n).collect()),
        Some(o) => {
            let mut seen = vec![false; n];
            if o.len() != n {
                return Err(SolverError::InvalidOrder(format!(
                    "expected {n} indices, got {}",
                    o.len()
                )));
            }
            for &i in o {
                if i >= n || std::mem::replace(&mut seen[i], true) {
                    return Err(SolverError::InvalidOrder(format!(
                        "index {i} is out of range or repeated"
                    )));
                }
            }
            Ok(o.to_vec())
        }
    }
}

/// First fit over `order` (input order when `None`).
pub fn first_fit(
    instance: &VectorInstance,
    order: Option<&[usize]>,
) -> Result<PackingSolution, SolverError> {
    let order = resolve_order(instance.len(), order)?;
    let items = instance.items();
    let mut bins: Vec<(Vec<usize>, Vec2)> = Vec::new();
    for i in order {
        let v = &items[i].v;
        let slot = bins.iter().position(|(_, load)| fits([load, v]));
        match slot {
            Some(b) => {
                bins[b].0.push(i);
                bins[b].1.add_assign(v);
            }
            None => bins.push((vec![i], v.clone())),
        }
    }
    Ok(PackingSolution {
        bins: bins.into_iter().map(|(b, _)| b).collect(),
    })
}

/// Items by largest coordinate, descending; ties by first coordinate
/// descending, then label.
pub fn ffd_order(instance: &VectorInstance) -> Vec<usize> {
    let items = instance.items();
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| {
        let (ia, ib) = (&items[a], &items[b]);
        ib.v.max_coord()
            .cmp(ia.v.max_coord())
            .then_with(|| ib.v.c1.cmp(&ia.v.c1))
            .then_with(|| ia.label.cmp(&ib.label))
    });
    order
}

pub fn first_fit_decreasing(instance: &VectorInstance) -> PackingSolution {
    let order = ffd_order(instance);
    first_fit(instance, Some(&order)).expect("ffd order is a permutation")
}

/// Accumulates items in order until the running set covers, seals it, and
/// starts over. The unsealed tail becomes the leftovers.
pub fn greedy_cover(
    instance: &VectorInstance,
    order: Option<&[usize]>,
) -> Result<CoveringSolution, SolverError> {
    let order = resolve_order(instance.len(), order)?;
    let items = instance.items();
    let mut sol = CoveringSolution::default();
    let mut current = Vec::new();
    let mut load = Vec2::zero();
    for i in order {
        current.push(i);
        load.add_assign(&items[i].v);
        if covers([&load]) {
            sol.covers.push(std::mem::take(&mut current));
            load = Vec2::zero();
        }
    }
    sol.leftovers = current;
    Ok(sol)
}
