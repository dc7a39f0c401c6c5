//! Integer encodings of a 3DM instance and the three vector-instance families
//! built from them (general packing, skewed packing, covering), plus the
//! intermediate 4-Partition instance.
//!
//! Integer scheme, with `q = |X|`:
//!
//! * general: `r = 64q`, `b = r^4 + 15`, `x_i = i r + 1`, `y_j = j r^2 + 2`,
//!   `z_k = k r^3 + 4`, `t_(i,j,k) = r^4 - k r^3 - j r^2 - i r + 8`.
//! * skewed (`m = ceil(2/delta) - 1`): `r = n q`, `b = r^m + 2^(m+1) - 1`,
//!   fillers `c_l = r^l + 2^l` for `4 <= l < m` (each `|T|` times), and
//!   `t_(i,j,k) = r^m - sum_l r^l - k r^3 - j r^2 - i r + 2^m + 8`.
//!
//! The `+ 8` in the skewed tuple constant makes the `m` residues modulo `r`
//! of a tuple's integers add up to `2^(m+1) - 1`; with plain `2^m` they
//! fall 8 short of `b`. `n = m 2^m + 9m + 1` keeps any `m` residues below `r`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use num_traits::{One, Zero};

use crate::matching::{HardnessConstants, MatchingError, Max3dmInstance};
use crate::model::{
    ceil, format_rational, int, rat, to_pretty_json, BigInt, Flavor, InstanceParams, Item,
    ItemLabel, ModelError, Rational, Triple, Vec2, VectorInstance, FORMAT_VERSION,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GadgetError {
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error("delta = {0} is outside (0, 2/5]")]
    DeltaOutOfRange(String),
    #[error("beta = {beta} needs {count} dummy items")]
    NegativeDummyCount { beta: u64, count: i128 },
    #[error("gadget invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// An integer of `U'` together with the item it encodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledInteger {
    pub label: ItemLabel,
    pub value: BigInt,
}

/// General-packing integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetIntegers {
    pub q: u32,
    pub r: BigInt,
    pub b: BigInt,
    /// `x[i - 1] = i r + 1`
    pub x: Vec<BigInt>,
    pub y: Vec<BigInt>,
    pub z: Vec<BigInt>,
    /// One entry per tuple, in tuple order.
    pub t: Vec<(Triple, BigInt)>,
}

impl GadgetIntegers {
    /// `x, y, z` in element order followed by the tuple integers.
    pub fn labeled(&self) -> Vec<LabeledInteger> {
        labeled_elements(&self.x, &self.y, &self.z, &self.t)
    }

    pub fn tuple_count(&self) -> usize {
        self.t.len()
    }

    pub fn four_partition(&self) -> FourPartitionInstance {
        FourPartitionInstance {
            integers: self.labeled().into_iter().map(|li| li.value).collect(),
            target: self.b.clone(),
        }
    }
}

fn labeled_elements(
    x: &[BigInt],
    y: &[BigInt],
    z: &[BigInt],
    t: &[(Triple, BigInt)],
) -> Vec<LabeledInteger> {
    let mut out = Vec::with_capacity(x.len() * 3 + t.len());
    let family = |v: &[BigInt], make: fn(u32) -> ItemLabel| {
        v.iter()
            .enumerate()
            .map(move |(i, value)| LabeledInteger {
                label: make(i as u32 + 1),
                value: value.clone(),
            })
            .collect::<Vec<_>>()
    };
    out.extend(family(x, ItemLabel::x));
    out.extend(family(y, ItemLabel::y));
    out.extend(family(z, ItemLabel::z));
    out.extend(t.iter().map(|(tr, value)| LabeledInteger {
        label: ItemLabel::tuple(*tr),
        value: value.clone(),
    }));
    out
}

/// Skewed-packing integers (m-Partition encoding).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewedGadgetIntegers {
    pub q: u32,
    pub delta: Rational,
    pub m: u32,
    pub n: BigInt,
    pub r: BigInt,
    pub b: BigInt,
    pub x: Vec<BigInt>,
    pub y: Vec<BigInt>,
    pub z: Vec<BigInt>,
    pub t: Vec<(Triple, BigInt)>,
    /// `(l, c_l)` for `l` in `4..m`; each appears `filler_copies` times in `U'`.
    pub fillers: Vec<(u32, BigInt)>,
    pub filler_copies: u32,
}

impl SkewedGadgetIntegers {
    /// Elements, tuples, then fillers level by level with copies `1..=|T|`.
    pub fn labeled(&self) -> Vec<LabeledInteger> {
        let mut out = labeled_elements(&self.x, &self.y, &self.z, &self.t);
        for (level, value) in &self.fillers {
            for copy in 1..=self.filler_copies {
                out.push(LabeledInteger {
                    label: ItemLabel::filler(*level, copy),
                    value: value.clone(),
                });
            }
        }
        out
    }

    pub fn tuple_count(&self) -> usize {
        self.t.len()
    }

    /// Additive constant of every tuple integer.
    pub fn tuple_constant(m: u32) -> BigInt {
        pow2(m) + 8
    }

    pub fn four_partition(&self) -> FourPartitionInstance {
        FourPartitionInstance {
            integers: self.labeled().into_iter().map(|li| li.value).collect(),
            target: self.b.clone(),
        }
    }
}

/// The multiset `U'` with its common target `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourPartitionInstance {
    pub integers: Vec<BigInt>,
    pub target: BigInt,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FourPartitionDoc {
    format_version: u32,
    target: String,
    integers: Vec<String>,
}

impl FourPartitionInstance {
    pub fn to_json(&self) -> String {
        to_pretty_json(&FourPartitionDoc {
            format_version: FORMAT_VERSION,
            target: self.target.to_string(),
            integers: self.integers.iter().map(|v| v.to_string()).collect(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let doc: FourPartitionDoc = serde_json::from_str(text)?;
        if doc.format_version != FORMAT_VERSION {
            return Err(ModelError::Version(doc.format_version));
        }
        let field = |name: String, s: &str| {
            crate::model::parse_bigint(s).map_err(|message| ModelError::Field {
                field: name,
                message,
            })
        };
        let target = field("target".into(), &doc.target)?;
        let integers = doc
            .integers
            .iter()
            .enumerate()
            .map(|(i, s)| field(format!("integers[{i}]"), s))
            .collect::<Result<Vec<_>, _>>()?;
        let inst = FourPartitionInstance { integers, target };
        if let Some(bad) = inst
            .integers
            .iter()
            .find(|v| **v <= BigInt::zero() || **v >= inst.target)
        {
            return Err(ModelError::Invariant(format!(
                "integer {bad} is not strictly between 0 and the target"
            )));
        }
        Ok(inst)
    }
}

/// Dispatch helper for [`emit_four_partition`].
pub enum AnyGadget<'a> {
    General(&'a GadgetIntegers),
    Skewed(&'a SkewedGadgetIntegers),
}

pub fn emit_four_partition(g: AnyGadget<'_>) -> FourPartitionInstance {
    match g {
        AnyGadget::General(g) => g.four_partition(),
        AnyGadget::Skewed(g) => g.four_partition(),
    }
}

fn pow2(e: u32) -> BigInt {
    BigInt::one() << e as usize
}

fn element_integers(q: u32, r: &BigInt) -> (Vec<BigInt>, Vec<BigInt>, Vec<BigInt>) {
    let r2 = r * r;
    let r3 = &r2 * r;
    let x = (1..=q).map(|i| BigInt::from(i) * r + 1).collect();
    let y = (1..=q).map(|j| BigInt::from(j) * &r2 + 2).collect();
    let z = (1..=q).map(|k| BigInt::from(k) * &r3 + 4).collect();
    (x, y, z)
}

fn check_range(values: &[LabeledInteger], b: &BigInt) -> Result<(), GadgetError> {
    let zero = BigInt::zero();
    if let Some(bad) = values.iter().find(|li| li.value <= zero || &li.value >= b) {
        return Err(GadgetError::Invariant(format!(
            "{} = {} is not strictly between 0 and b",
            bad.label, bad.value
        )));
    }
    Ok(())
}

pub fn build_integers(instance: &Max3dmInstance) -> Result<GadgetIntegers, GadgetError> {
    instance.require_valid()?;
    let q = instance.q();
    let r = BigInt::from(64u32) * q;
    let r2 = &r * &r;
    let r3 = &r2 * &r;
    let r4 = &r3 * &r;
    let b = &r4 + 15;
    let (x, y, z) = element_integers(q, &r);
    let t = instance
        .tuples()
        .iter()
        .map(|&[i, j, k]| {
            let v = &r4 - BigInt::from(k) * &r3 - BigInt::from(j) * &r2 - BigInt::from(i) * &r + 8;
            ([i, j, k], v)
        })
        .collect();
    let g = GadgetIntegers {
        q,
        r,
        b,
        x,
        y,
        z,
        t,
    };
    check_range(&g.labeled(), &g.b)?;
    Ok(g)
}

/// `m = ceil(2/delta) - 1`.
pub fn skew_m(delta: &Rational) -> Result<u32, GadgetError> {
    if *delta <= Rational::zero() || *delta > rat(2, 5) {
        return Err(GadgetError::DeltaOutOfRange(format_rational(delta)));
    }
    let m = ceil(&(int(2) / delta)) - 1;
    u32::try_from(m).map_err(|_| GadgetError::DeltaOutOfRange(format_rational(delta)))
}

pub fn build_skewed_integers(
    instance: &Max3dmInstance,
    delta: &Rational,
) -> Result<SkewedGadgetIntegers, GadgetError> {
    instance.require_valid()?;
    let m = skew_m(delta)?;
    let q = instance.q();
    let n = BigInt::from(m) * pow2(m) + 9 * m + 1;
    let r: BigInt = &n * q;
    let rm = r.pow(m);
    let b = &rm + pow2(m + 1) - 1;
    let (x, y, z) = element_integers(q, &r);
    let r2 = &r * &r;
    let r3 = &r2 * &r;
    let filler_powers: BigInt = (4..m).map(|l| r.pow(l)).sum();
    let tconst = SkewedGadgetIntegers::tuple_constant(m);
    let t = instance
        .tuples()
        .iter()
        .map(|&[i, j, k]| {
            let v = &rm
                - &filler_powers
                - BigInt::from(k) * &r3
                - BigInt::from(j) * &r2
                - BigInt::from(i) * &r
                + &tconst;
            ([i, j, k], v)
        })
        .collect();
    let fillers = (4..m).map(|l| (l, r.pow(l) + pow2(l))).collect();
    let g = SkewedGadgetIntegers {
        q,
        delta: delta.clone(),
        m,
        n,
        r,
        b,
        x,
        y,
        z,
        t,
        fillers,
        filler_copies: instance.tuples().len() as u32,
    };
    check_range(&g.labeled(), &g.b)?;
    let residue_sum = BigInt::from(7u32) + &tconst + (4..m).map(pow2).sum::<BigInt>();
    if residue_sum != pow2(m + 1) - 1 {
        return Err(GadgetError::Invariant(format!(
            "tuple residues sum to {residue_sum}, expected 2^(m+1) - 1"
        )));
    }
    if BigInt::from(m) * &tconst >= g.r {
        return Err(GadgetError::Invariant(
            "m residues can wrap around modulo r".into(),
        ));
    }
    Ok(g)
}

/// `ceil(beta0 * q)` in exact arithmetic.
pub fn default_beta(instance: &Max3dmInstance) -> u64 {
    let c = HardnessConstants::theorem();
    let v = ceil(&(c.beta0 * int(instance.q() as i64)));
    u64::try_from(v).expect("beta fits in u64")
}

fn dummy_count(formula: i128, beta: u64) -> Result<usize, GadgetError> {
    if formula < 0 {
        Err(GadgetError::NegativeDummyCount {
            beta,
            count: formula,
        })
    } else {
        Ok(formula as usize)
    }
}

/// `(1/5 + a'/(5b), 3/10 - a'/(5b))`
pub fn packing_vector(a: &BigInt, b: &BigInt) -> Vec2 {
    let shift = Rational::new(a.clone(), b * 5);
    Vec2::new(rat(1, 5) + &shift, rat(3, 10) - shift)
}

/// `(1/(m+1) + a'/((m+1)b), (m+2)/(m(m+1)) - a'/((m+1)b))`
pub fn skewed_vector(a: &BigInt, b: &BigInt, m: u32) -> Vec2 {
    let m = m as i64;
    let shift = Rational::new(a.clone(), b * (m + 1));
    Vec2::new(rat(1, m + 1) + &shift, rat(m + 2, m * (m + 1)) - shift)
}

fn element_params(q: u32, tuples: usize, r: &BigInt, b: &BigInt, beta: u64) -> InstanceParams {
    InstanceParams {
        q: Some(q),
        tuples: Some(tuples as u64),
        r: Some(r.clone()),
        b: Some(b.clone()),
        beta: Some(beta),
        ..Default::default()
    }
}

fn with_dummies(mut items: Vec<Item>, count: usize, dummy: Vec2) -> Vec<Item> {
    items.extend((1..=count).map(|c| Item::new(ItemLabel::dummy(c as u32), dummy.clone())));
    items
}

fn general_items(g: &GadgetIntegers, beta: u64, dummy: Vec2) -> Result<Vec<Item>, GadgetError> {
    let formula = g.tuple_count() as i128 + 3 * g.q as i128 - 4 * beta as i128;
    let count = dummy_count(formula, beta)?;
    let items = g
        .labeled()
        .into_iter()
        .map(|li| Item::new(li.label, packing_vector(&li.value, &g.b)))
        .collect();
    Ok(with_dummies(items, count, dummy))
}

/// Packing instance from (possibly hand-modified) general integers.
pub fn pack_vectors(g: &GadgetIntegers, beta: u64) -> Result<VectorInstance, GadgetError> {
    let items = general_items(g, beta, Vec2::new(rat(3, 5), rat(3, 5)))?;
    let params = element_params(g.q, g.tuple_count(), &g.r, &g.b, beta);
    Ok(VectorInstance::new(Flavor::Pack, params, items)?)
}

/// Covering instance from general integers: same items, (9/10, 9/10) dummies.
pub fn cover_vectors(g: &GadgetIntegers, beta: u64) -> Result<VectorInstance, GadgetError> {
    let items = general_items(g, beta, Vec2::new(rat(9, 10), rat(9, 10)))?;
    let params = element_params(g.q, g.tuple_count(), &g.r, &g.b, beta);
    Ok(VectorInstance::new(Flavor::Cover, params, items)?)
}

pub fn skew_vectors(g: &SkewedGadgetIntegers, beta: u64) -> Result<VectorInstance, GadgetError> {
    let m = g.m as i128;
    let formula = (m - 3) * g.tuple_count() as i128 + 3 * g.q as i128 - m * beta as i128;
    let count = dummy_count(formula, beta)?;
    let items = g
        .labeled()
        .into_iter()
        .map(|li| Item::new(li.label, skewed_vector(&li.value, &g.b, g.m)))
        .collect();
    let mi = g.m as i64;
    let items = with_dummies(
        items,
        count,
        Vec2::new(rat(mi - 1, mi + 1), Rational::zero()),
    );
    let params = InstanceParams {
        delta: Some(g.delta.clone()),
        m: Some(g.m),
        n: Some(g.n.clone()),
        ..element_params(g.q, g.tuple_count(), &g.r, &g.b, beta)
    };
    Ok(VectorInstance::new(Flavor::Skew, params, items)?)
}

pub fn build_packing_instance(
    instance: &Max3dmInstance,
    beta: u64,
) -> Result<VectorInstance, GadgetError> {
    pack_vectors(&build_integers(instance)?, beta)
}

pub fn build_covering_instance(
    instance: &Max3dmInstance,
    beta: u64,
) -> Result<VectorInstance, GadgetError> {
    cover_vectors(&build_integers(instance)?, beta)
}

pub fn build_skewed_instance(
    instance: &Max3dmInstance,
    beta: u64,
    delta: &Rational,
) -> Result<VectorInstance, GadgetError> {
    skew_vectors(&build_skewed_integers(instance, delta)?, beta)
}

/// Recovers the encoded integers `a'` of every non-dummy item from its first
/// coordinate, inverting [`packing_vector`] / [`skewed_vector`]. Needs the
/// `b` (and for skew, `m`) parameters embedded in the document.
pub fn integers_from_instance(inst: &VectorInstance) -> Result<Vec<LabeledInteger>, GadgetError> {
    let p = inst.params();
    let b =
        p.b.clone()
            .ok_or_else(|| GadgetError::Invariant("instance has no `b` parameter".into()))?;
    let (base, scale) = match inst.flavor() {
        Flavor::Pack | Flavor::Cover => (rat(1, 5), int(5)),
        Flavor::Skew => {
            let m =
                p.m.ok_or_else(|| GadgetError::Invariant("skew instance has no `m`".into()))?
                    as i64;
            (rat(1, m + 1), int(m + 1))
        }
        Flavor::Generic => {
            return Err(GadgetError::Invariant(
                "generic instances carry no gadget integers".into(),
            ))
        }
    };
    let bq = Rational::from_integer(b);
    inst.items()
        .iter()
        .filter(|it| !it.label.is_dummy())
        .map(|it| {
            let a = (&it.v.c1 - &base) * &scale * &bq;
            if !a.is_integer() {
                return Err(GadgetError::Invariant(format!(
                    "{} does not encode an integer",
                    it.label
                )));
            }
            Ok(LabeledInteger {
                label: it.label.clone(),
                value: a.to_integer(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::generate_e2;
    use crate::model::vec_sum;
    use std::collections::HashSet;

    fn conflict_q2() -> Max3dmInstance {
        Max3dmInstance::new(2, vec![[1, 1, 1], [1, 2, 2], [2, 1, 2], [2, 2, 1]])
    }

    fn cyclic_q3() -> Max3dmInstance {
        let mut tuples: Vec<Triple> = (1..=3).map(|i| [i, i, i]).collect();
        tuples.extend((1..=3).map(|i| [i, i % 3 + 1, (i + 1) % 3 + 1]));
        Max3dmInstance::new(3, tuples)
    }

    fn big(v: u64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn q2_integers() {
        let g = build_integers(&conflict_q2()).unwrap();
        assert_eq!(g.r, big(128));
        assert_eq!(g.b, big(268_435_471));
        assert_eq!(g.x[0], big(129));
        assert_eq!(g.y[0], big(16_386));
        assert_eq!(g.z[0], big(2_097_156));
        assert_eq!(g.t[0], ([1, 1, 1], big(266_321_800)));
        assert_eq!(&g.x[0] + &g.y[0] + &g.z[0] + &g.t[0].1, g.b);
        let wrong = &g.x[0] + &g.x[1] + &g.y[0] + &g.z[0];
        assert_eq!(wrong, big(2_113_928));
        assert_ne!(wrong, g.b);
    }

    #[test]
    fn tuple_sum_identity_and_distinctness() {
        for inst in [conflict_q2(), cyclic_q3(), generate_e2(5, 3).unwrap()] {
            let g = build_integers(&inst).unwrap();
            for ([i, j, k], t) in &g.t {
                let s = &g.x[*i as usize - 1] + &g.y[*j as usize - 1] + &g.z[*k as usize - 1] + t;
                assert_eq!(s, g.b);
            }
            let values: HashSet<_> = g.labeled().into_iter().map(|li| li.value).collect();
            assert_eq!(values.len(), 3 * inst.q() as usize + inst.tuples().len());
        }
    }

    #[test]
    fn packing_instance_shape() {
        let inst = build_packing_instance(&cyclic_q3(), 3).unwrap();
        assert_eq!(inst.len(), 18);
        assert_eq!(inst.dummy_count(), 3);
        let half = rat(1, 2);
        for it in inst.items().iter().filter(|it| !it.label.is_dummy()) {
            assert_eq!(&it.v.c1 + &it.v.c2, half);
            assert!(it.v.c1 > rat(1, 5) && it.v.c1 < rat(2, 5));
        }
        let d = &inst.items().last().unwrap().v;
        assert_eq!(d, &Vec2::new(rat(3, 5), rat(3, 5)));
    }

    #[test]
    fn tuple_items_sum_to_one_one() {
        let inst = build_packing_instance(&conflict_q2(), 2).unwrap();
        let find = |l: ItemLabel| {
            inst.items()
                .iter()
                .find(|it| it.label == l)
                .unwrap()
                .v
                .clone()
        };
        let set = [
            find(ItemLabel::x(1)),
            find(ItemLabel::y(1)),
            find(ItemLabel::z(1)),
            find(ItemLabel::tuple([1, 1, 1])),
        ];
        assert_eq!(vec_sum(&set), Vec2::new(int(1), int(1)));
    }

    #[test]
    fn negative_dummy_count_rejected() {
        // |T| + 3q - 4 beta = 4 + 6 - 12
        let err = build_packing_instance(&conflict_q2(), 3).unwrap_err();
        assert_eq!(err, GadgetError::NegativeDummyCount { beta: 3, count: -2 });
        assert!(build_covering_instance(&conflict_q2(), 3).is_err());
        assert!(build_skewed_instance(&conflict_q2(), 4, &rat(2, 5)).is_err());
    }

    #[test]
    fn covering_shares_items_with_packing() {
        let p = build_packing_instance(&cyclic_q3(), 3).unwrap();
        let c = build_covering_instance(&cyclic_q3(), 3).unwrap();
        assert_eq!(c.dummy_count(), 3);
        for (a, b) in p.items().iter().zip(c.items()) {
            assert_eq!(a.label, b.label);
            if !a.label.is_dummy() {
                assert_eq!(a.v, b.v);
            } else {
                assert_eq!(b.v, Vec2::new(rat(9, 10), rat(9, 10)));
            }
        }
    }

    #[test]
    fn skew_m_values() {
        assert_eq!(skew_m(&rat(7, 20)).unwrap(), 5);
        assert_eq!(skew_m(&rat(19, 50)).unwrap(), 5);
        assert_eq!(skew_m(&rat(2, 5)).unwrap(), 4);
        assert_eq!(skew_m(&rat(1, 3)).unwrap(), 5);
        assert_eq!(skew_m(&rat(2, 7)).unwrap(), 6);
        assert_eq!(skew_m(&rat(1, 10)).unwrap(), 19);
        assert!(matches!(
            skew_m(&rat(1, 2)),
            Err(GadgetError::DeltaOutOfRange(_))
        ));
        assert!(skew_m(&int(0)).is_err());
    }

    #[test]
    fn skewed_integers_m4_has_no_fillers() {
        let g = build_skewed_integers(&conflict_q2(), &rat(2, 5)).unwrap();
        assert_eq!(g.m, 4);
        assert!(g.fillers.is_empty());
        assert_eq!(g.n, big(4 * 16 + 36 + 1));
        assert_eq!(g.r, big(202));
        let inst = skew_vectors(&g, 2).unwrap();
        // (m - 3)|T| + 3q - m beta = 4 + 6 - 8
        assert_eq!(inst.dummy_count(), 2);
        assert_eq!(inst.len(), 12);
    }

    #[test]
    fn skewed_tuple_identity_and_coordinates() {
        for (inst, delta) in [
            (conflict_q2(), rat(7, 20)),
            (cyclic_q3(), rat(2, 5)),
            (conflict_q2(), rat(2, 7)),
        ] {
            let g = build_skewed_integers(&inst, &delta).unwrap();
            let fill: BigInt = g.fillers.iter().map(|(_, v)| v.clone()).sum();
            for ([i, j, k], t) in &g.t {
                let s = &g.x[*i as usize - 1]
                    + &g.y[*j as usize - 1]
                    + &g.z[*k as usize - 1]
                    + t
                    + &fill;
                assert_eq!(s, g.b, "m = {}", g.m);
            }
            let m = g.m as i64;
            let beta = 1;
            let vi = skew_vectors(&g, beta).unwrap();
            // 1/(m+1) + (m+2)/(m(m+1)) = 2/m
            let total = rat(2, m);
            let bound = rat(2, m + 1);
            for it in vi.items() {
                if it.label.is_dummy() {
                    assert_eq!(it.v, Vec2::new(rat(m - 1, m + 1), int(0)));
                } else {
                    assert_eq!(&it.v.c1 + &it.v.c2, total);
                    assert!(it.v.c1 < bound && it.v.c2 < bound);
                }
                assert!(crate::model::is_skewed(&it.v, &delta));
            }
            let expected_dummies =
                (m - 3) * inst.tuples().len() as i64 + 3 * inst.q() as i64 - m * beta as i64;
            assert_eq!(vi.dummy_count() as i64, expected_dummies);
        }
    }

    #[test]
    fn four_partition_emission() {
        let g = build_integers(&conflict_q2()).unwrap();
        let fp = emit_four_partition(AnyGadget::General(&g));
        assert_eq!(fp.integers.len(), 10);
        assert_eq!(fp.target, big(268_435_471));
        assert!(fp.integers.iter().all(|v| v < &fp.target));
        let text = fp.to_json();
        assert_eq!(FourPartitionInstance::from_json(&text).unwrap(), fp);

        let sg = build_skewed_integers(&conflict_q2(), &rat(7, 20)).unwrap();
        assert_eq!(sg.m, 5);
        assert_eq!(
            emit_four_partition(AnyGadget::Skewed(&sg)).integers.len(),
            14
        );
    }

    #[test]
    fn default_beta_values() {
        let q = |q| Max3dmInstance::new(q, vec![]);
        assert_eq!(default_beta(&q(2)), 2);
        assert_eq!(default_beta(&q(3)), 3);
        assert_eq!(default_beta(&q(100)), 98);
        // 0.979338843 * 1000000000 is an integer
        assert_eq!(default_beta(&q(1_000_000_000)), 979_338_843);
    }

    #[test]
    fn integers_recovered_from_documents() {
        let g = build_integers(&cyclic_q3()).unwrap();
        let inst = pack_vectors(&g, 3).unwrap();
        assert_eq!(integers_from_instance(&inst).unwrap(), g.labeled());
        let sg = build_skewed_integers(&conflict_q2(), &rat(7, 20)).unwrap();
        let inst = skew_vectors(&sg, 2).unwrap();
        assert_eq!(integers_from_instance(&inst).unwrap(), sg.labeled());
    }

    #[test]
    fn invalid_source_rejected() {
        let dup = Max3dmInstance::new(2, vec![[1, 1, 1], [1, 1, 1]]);
        assert!(matches!(
            build_integers(&dup),
            Err(GadgetError::Matching(_))
        ));
        let empty = Max3dmInstance::new(0, vec![]);
        assert!(build_integers(&empty).is_err());
    }
}
