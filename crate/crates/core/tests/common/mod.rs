//! Naive oracles and instance fixtures shared by the integration tests.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vecgap_core::gadgets::{
    build_covering_instance, build_packing_instance, build_skewed_instance,
};
use vecgap_core::matching::Max3dmInstance;
use vecgap_core::model::{
    covers, fits, rat, Flavor, InstanceParams, Item, ItemLabel, Vec2, VectorInstance,
};

pub fn conflict_q2() -> Max3dmInstance {
    Max3dmInstance::new(2, vec![[1, 1, 1], [1, 2, 2], [2, 1, 2], [2, 2, 1]])
}

pub fn cyclic_q3() -> Max3dmInstance {
    let mut tuples: Vec<[u32; 3]> = (1..=3).map(|i| [i, i, i]).collect();
    tuples.extend((1..=3).map(|i| [i, i % 3 + 1, (i + 1) % 3 + 1]));
    Max3dmInstance::new(3, tuples)
}

/// Calls `f` on every set partition of `0..n`, as a block index per item
/// (restricted growth strings).
pub fn for_each_partition(n: usize, mut f: impl FnMut(&[usize], usize)) {
    if n == 0 {
        f(&[], 0);
        return;
    }
    let mut a = vec![0usize; n];
    fn rec(a: &mut Vec<usize>, pos: usize, blocks: usize, f: &mut dyn FnMut(&[usize], usize)) {
        if pos == a.len() {
            f(a, blocks);
            return;
        }
        for b in 0..=blocks {
            a[pos] = b;
            rec(a, pos + 1, blocks.max(b + 1), f);
        }
    }
    rec(&mut a, 1, 1, &mut f);
}

fn blocks_of<'a>(vs: &'a [Vec2], assign: &[usize], blocks: usize) -> Vec<Vec<&'a Vec2>> {
    let mut out = vec![Vec::new(); blocks];
    for (i, &b) in assign.iter().enumerate() {
        out[b].push(&vs[i]);
    }
    out
}

/// Fewest unit bins over all set partitions. `None` if some item alone
/// overflows.
pub fn naive_vbp(vs: &[Vec2]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for_each_partition(vs.len(), |assign, blocks| {
        if best.is_some_and(|b| b <= blocks) {
            return;
        }
        if blocks_of(vs, assign, blocks).into_iter().all(fits) {
            best = Some(blocks);
        }
    });
    best
}

/// Most disjoint unit covers: over all set partitions, the number of blocks
/// that cover (uncovered leftovers can always be merged into one block).
pub fn naive_vbc(vs: &[Vec2]) -> usize {
    let mut best = 0;
    for_each_partition(vs.len(), |assign, blocks| {
        let c = blocks_of(vs, assign, blocks)
            .into_iter()
            .filter(|blk| covers(blk.iter().copied()))
            .count();
        best = best.max(c);
    });
    best
}

pub fn generic(vs: Vec<(Vec2, bool)>) -> VectorInstance {
    let items = vs
        .into_iter()
        .enumerate()
        .map(|(i, (v, dummy))| {
            let label = if dummy {
                ItemLabel::dummy(i as u32 + 1)
            } else {
                ItemLabel::x(i as u32 + 1)
            };
            Item::new(label, v)
        })
        .collect();
    VectorInstance::new(Flavor::Generic, InstanceParams::default(), items).unwrap()
}

fn random_vec(rng: &mut ChaCha8Rng) -> Vec2 {
    let mut coord = || {
        let d = rng.gen_range(2..=12i64);
        rat(rng.gen_range(1..=d), d)
    };
    Vec2::new(coord(), coord())
}

/// Random generic instance of 1 to 9 items. Even seeds draw a subset of a
/// q = 2 gadget (packing, covering or skewed) topped up with random rational
/// items; odd seeds are purely random.
pub fn random_mixed_instance(seed: u64) -> VectorInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=9usize);
    let mut vs: Vec<(Vec2, bool)> = Vec::new();
    if seed.is_multiple_of(2) {
        let base = conflict_q2();
        let gadget = match rng.gen_range(0..3) {
            0 => build_packing_instance(&base, 2).unwrap(),
            1 => build_covering_instance(&base, 2).unwrap(),
            _ => build_skewed_instance(&base, 2, &rat(7, 20)).unwrap(),
        };
        let mut pool: Vec<&Item> = gadget.items().iter().collect();
        let take = rng.gen_range(1..=n);
        for _ in 0..take {
            let it = pool.swap_remove(rng.gen_range(0..pool.len()));
            vs.push((it.v.clone(), it.label.is_dummy()));
        }
    }
    while vs.len() < n {
        vs.push((random_vec(&mut rng), false));
    }
    generic(vs)
}
