//! Exact-arithmetic data model shared by every other module.
//!
//! Coordinates are [`Rational`]s (always reduced, positive denominator) and
//! integers are [`BigInt`]s. Nothing in here touches floating point; decimal
//! strings are produced only by [`decimal`] for display.
//!
//! Documents are UTF-8 JSON. Integers and rationals are written as strings so
//! that arbitrarily large values survive a round trip, and the field order is
//! fixed so that serialization is byte-stable.

use std::collections::HashSet;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use num_bigint::BigInt;
pub type Rational = num_rational::BigRational;

/// Current version of every JSON document written by this crate.
pub const FORMAT_VERSION: u32 = 1;

/// A 1-based `(i, j, k)` element triple of a 3-dimensional matching instance.
pub type Triple = [u32; 3];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("unsupported format_version {0}")]
    Version(u32),
}

impl ModelError {
    fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        ModelError::Field {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<serde_json::Error> for ModelError {
    fn from(e: serde_json::Error) -> Self {
        ModelError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

/// `n / d` as an exact rational. Panics on a zero denominator.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Canonical text form: always `numerator/denominator` in lowest terms.
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Accepts `n/d` (any sign placement, not necessarily reduced) or a bare
/// integer `n`.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n = parse_bigint(n)?;
            let d = parse_bigint(d)?;
            if d.is_zero() {
                return Err(format!("zero denominator in `{text}`"));
            }
            Ok(Rational::new(n, d))
        }
        None => parse_bigint(text).map(Rational::from_integer),
    }
}

pub fn parse_bigint(text: &str) -> Result<BigInt, String> {
    let t = text.trim();
    let digits = t.strip_prefix('-').unwrap_or(t);
    if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
        return Err(format!("`{text}` is not a decimal integer"));
    }
    t.parse::<BigInt>().map_err(|e| e.to_string())
}

/// Smallest integer `>= value`.
pub fn ceil(value: &Rational) -> BigInt {
    value.numer().div_ceil(value.denom())
}

/// Largest integer `<= value`.
pub fn floor(value: &Rational) -> BigInt {
    value.numer().div_floor(value.denom())
}

/// Truncated decimal rendering with `digits` fractional digits. Display only.
pub fn decimal(value: &Rational, digits: usize) -> String {
    let neg = value.is_negative();
    let abs = value.abs();
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (abs.numer() * &scale) / abs.denom();
    let (whole, frac) = scaled.div_rem(&scale);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{whole}")
    } else {
        format!(
            "{sign}{whole}.{:0>width$}",
            frac.to_string(),
            width = digits
        )
    }
}

/// A 2-dimensional item.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vec2 {
    pub c1: Rational,
    pub c2: Rational,
}

impl Vec2 {
    pub fn new(c1: Rational, c2: Rational) -> Self {
        Vec2 { c1, c2 }
    }

    pub fn zero() -> Self {
        Vec2::new(Rational::zero(), Rational::zero())
    }

    pub fn max_coord(&self) -> &Rational {
        if self.c1 >= self.c2 {
            &self.c1
        } else {
            &self.c2
        }
    }

    pub fn add_assign(&mut self, other: &Vec2) {
        self.c1 += &other.c1;
        self.c2 += &other.c2;
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {})",
            format_rational(&self.c1),
            format_rational(&self.c2)
        )
    }
}

/// Componentwise sum.
pub fn vec_sum<'a>(items: impl IntoIterator<Item = &'a Vec2>) -> Vec2 {
    let mut acc = Vec2::zero();
    for v in items {
        acc.add_assign(v);
    }
    acc
}

/// True iff both coordinate sums are at most 1.
pub fn fits<'a>(items: impl IntoIterator<Item = &'a Vec2>) -> bool {
    let s = vec_sum(items);
    let one = Rational::one();
    s.c1 <= one && s.c2 <= one
}

/// True iff both coordinate sums are at least 1.
pub fn covers<'a>(items: impl IntoIterator<Item = &'a Vec2>) -> bool {
    let s = vec_sum(items);
    let one = Rational::one();
    s.c1 >= one && s.c2 >= one
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ItemKind {
    X,
    Y,
    Z,
    Tuple,
    Filler,
    Dummy,
}

/// Provenance of an item: which gadget integer (or dummy) it encodes.
///
/// `index` is `[i]` for X/Y/Z elements, `[i, j, k]` for tuples, `[l]` for
/// fillers and empty for dummies. `copy` distinguishes duplicated fillers and
/// dummies and is 1 otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ItemLabel {
    pub kind: ItemKind,
    pub index: Vec<u32>,
    pub copy: u32,
}

impl ItemLabel {
    pub fn x(i: u32) -> Self {
        ItemLabel {
            kind: ItemKind::X,
            index: vec![i],
            copy: 1,
        }
    }
    pub fn y(j: u32) -> Self {
        ItemLabel {
            kind: ItemKind::Y,
            index: vec![j],
            copy: 1,
        }
    }
    pub fn z(k: u32) -> Self {
        ItemLabel {
            kind: ItemKind::Z,
            index: vec![k],
            copy: 1,
        }
    }
    pub fn tuple(t: Triple) -> Self {
        ItemLabel {
            kind: ItemKind::Tuple,
            index: t.to_vec(),
            copy: 1,
        }
    }
    pub fn filler(level: u32, copy: u32) -> Self {
        ItemLabel {
            kind: ItemKind::Filler,
            index: vec![level],
            copy,
        }
    }
    pub fn dummy(copy: u32) -> Self {
        ItemLabel {
            kind: ItemKind::Dummy,
            index: Vec::new(),
            copy,
        }
    }

    pub fn is_dummy(&self) -> bool {
        self.kind == ItemKind::Dummy
    }

    /// The tuple triple, if this labels a tuple item.
    pub fn triple(&self) -> Option<Triple> {
        match (self.kind, self.index.as_slice()) {
            (ItemKind::Tuple, &[i, j, k]) => Some([i, j, k]),
            _ => None,
        }
    }

    fn shape_ok(&self) -> bool {
        let arity = match self.kind {
            ItemKind::X | ItemKind::Y | ItemKind::Z | ItemKind::Filler => 1,
            ItemKind::Tuple => 3,
            ItemKind::Dummy => 0,
        };
        self.index.len() == arity && self.copy >= 1 && self.index.iter().all(|&v| v >= 1)
    }
}

impl fmt::Display for ItemLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ItemKind::X => write!(f, "x{}", self.index[0]),
            ItemKind::Y => write!(f, "y{}", self.index[0]),
            ItemKind::Z => write!(f, "z{}", self.index[0]),
            ItemKind::Tuple => write!(
                f,
                "t({},{},{})",
                self.index[0], self.index[1], self.index[2]
            ),
            ItemKind::Filler => write!(f, "c{}#{}", self.index[0], self.copy),
            ItemKind::Dummy => write!(f, "d#{}", self.copy),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// General packing gadget: coordinates 1/5 + a'/(5b), dummies (3/5, 3/5).
    Pack,
    /// Skewed packing gadget built through m-Partition.
    Skew,
    /// Covering gadget: packing items plus (9/10, 9/10) dummies.
    Cover,
    /// Any other instance; solvers apply no structural shortcuts to it.
    Generic,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Flavor::Pack => "pack",
            Flavor::Skew => "skew",
            Flavor::Cover => "cover",
            Flavor::Generic => "generic",
        };
        f.write_str(s)
    }
}

/// The parameters an instance was generated from. Embedded in the document so
/// that verifiers never have to re-derive them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InstanceParams {
    pub q: Option<u32>,
    pub tuples: Option<u64>,
    pub r: Option<BigInt>,
    pub b: Option<BigInt>,
    pub beta: Option<u64>,
    pub delta: Option<Rational>,
    pub m: Option<u32>,
    pub n: Option<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Item {
    pub label: ItemLabel,
    pub v: Vec2,
}

impl Item {
    pub fn new(label: ItemLabel, v: Vec2) -> Self {
        Item { label, v }
    }
}

/// A validated, immutable multiset of labeled 2-dimensional items.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorInstance {
    flavor: Flavor,
    params: InstanceParams,
    items: Vec<Item>,
}

impl VectorInstance {
    pub fn new(
        flavor: Flavor,
        params: InstanceParams,
        items: Vec<Item>,
    ) -> Result<Self, ModelError> {
        let inst = VectorInstance {
            flavor,
            params,
            items,
        };
        inst.check()?;
        Ok(inst)
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }
    pub fn params(&self) -> &InstanceParams {
        &self.params
    }
    pub fn items(&self) -> &[Item] {
        &self.items
    }
    pub fn len(&self) -> usize {
        self.items.len()
    }
    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
    pub fn vectors(&self) -> Vec<Vec2> {
        self.items.iter().map(|it| it.v.clone()).collect()
    }
    pub fn dummy_count(&self) -> usize {
        self.items.iter().filter(|it| it.label.is_dummy()).count()
    }

    /// Tuples recovered from the tuple-item labels, in item order.
    pub fn tuples(&self) -> Vec<Triple> {
        self.items
            .iter()
            .filter_map(|it| it.label.triple())
            .collect()
    }

    fn check(&self) -> Result<(), ModelError> {
        let zero = Rational::zero();
        let one = Rational::one();
        let mut seen = HashSet::new();
        for (idx, it) in self.items.iter().enumerate() {
            let v = &it.v;
            if !it.label.shape_ok() {
                return Err(ModelError::Invariant(format!(
                    "items[{idx}]: malformed label {:?}",
                    it.label
                )));
            }
            if !seen.insert(&it.label) {
                return Err(ModelError::Invariant(format!(
                    "items[{idx}]: duplicate label {}",
                    it.label
                )));
            }
            if v.c1 <= zero || v.c1 > one {
                return Err(ModelError::Invariant(format!(
                    "items[{idx}] ({}): c1 = {} outside (0, 1]",
                    it.label,
                    format_rational(&v.c1)
                )));
            }
            if v.c2 < zero || v.c2 > one {
                return Err(ModelError::Invariant(format!(
                    "items[{idx}] ({}): c2 = {} outside [0, 1]",
                    it.label,
                    format_rational(&v.c2)
                )));
            }
            if !it.label.is_dummy() && v.c2.is_zero() {
                return Err(ModelError::Invariant(format!(
                    "items[{idx}] ({}): non-dummy item with zero coordinate",
                    it.label
                )));
            }
        }
        if self.flavor == Flavor::Skew {
            let delta = self.params.delta.as_ref().ok_or_else(|| {
                ModelError::Invariant("skew instance without delta parameter".into())
            })?;
            for (idx, it) in self.items.iter().enumerate() {
                if !is_skewed(&it.v, delta) {
                    return Err(ModelError::Invariant(format!(
                        "items[{idx}] ({}): both coordinates exceed delta",
                        it.label
                    )));
                }
            }
        }
        Ok(())
    }

    /// Non-fatal observations: items with a zero coordinate are admitted (the
    /// skewed dummy has one) but reported here.
    pub fn warnings(&self) -> Vec<String> {
        self.items
            .iter()
            .filter(|it| it.v.c2.is_zero())
            .map(|it| format!("{} has a zero second coordinate", it.label))
            .collect()
    }
}

/// At most one coordinate exceeds `delta`.
pub fn is_skewed(v: &Vec2, delta: &Rational) -> bool {
    !(&v.c1 > delta && &v.c2 > delta)
}

/// Bins as lists of item indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PackingSolution {
    pub bins: Vec<Vec<usize>>,
}

impl PackingSolution {
    pub fn bin_count(&self) -> usize {
        self.bins.len()
    }

    /// Bins are disjoint, cover every item, and each fits.
    pub fn check(&self, instance: &VectorInstance) -> Result<(), ModelError> {
        let n = instance.len();
        let mut used = vec![false; n];
        for (b, bin) in self.bins.iter().enumerate() {
            for &i in bin {
                if i >= n {
                    return Err(ModelError::Invariant(format!(
                        "bin {b}: item index {i} out of range"
                    )));
                }
                if std::mem::replace(&mut used[i], true) {
                    return Err(ModelError::Invariant(format!(
                        "item {i} appears in more than one bin"
                    )));
                }
            }
            if !fits(bin.iter().map(|&i| &instance.items[i].v)) {
                return Err(ModelError::Invariant(format!("bin {b} overflows")));
            }
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(ModelError::Invariant(format!("item {i} is not packed")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoveringSolution {
    pub covers: Vec<Vec<usize>>,
    pub leftovers: Vec<usize>,
}

impl CoveringSolution {
    pub fn cover_count(&self) -> usize {
        self.covers.len()
    }

    /// Covers and leftovers partition the items, and every cover covers.
    pub fn check(&self, instance: &VectorInstance) -> Result<(), ModelError> {
        let n = instance.len();
        let mut used = vec![false; n];
        let all = self.covers.iter().flatten().chain(self.leftovers.iter());
        for &i in all {
            if i >= n {
                return Err(ModelError::Invariant(format!(
                    "item index {i} out of range"
                )));
            }
            if std::mem::replace(&mut used[i], true) {
                return Err(ModelError::Invariant(format!(
                    "item {i} is used more than once"
                )));
            }
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(ModelError::Invariant(format!(
                "item {i} is neither in a cover nor a leftover"
            )));
        }
        for (c, cover) in self.covers.iter().enumerate() {
            if !covers(cover.iter().map(|&i| &instance.items[i].v)) {
                return Err(ModelError::Invariant(format!(
                    "cover {c} does not reach (1, 1)"
                )));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Documents

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsDoc {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    q: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    tuples: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    r: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    b: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    beta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    delta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    m: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    n: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ItemDoc {
    label: ItemLabel,
    c1: String,
    c2: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    format_version: u32,
    flavor: Flavor,
    params: ParamsDoc,
    items: Vec<ItemDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PackingDoc {
    format_version: u32,
    bins: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoveringDoc {
    format_version: u32,
    covers: Vec<Vec<usize>>,
    leftovers: Vec<usize>,
}

fn parse_field<T: std::str::FromStr>(
    field: &str,
    value: Option<String>,
) -> Result<Option<T>, ModelError> {
    value
        .map(|s| {
            parse_bigint(&s)
                .ok()
                .and_then(|_| s.trim().parse::<T>().ok())
                .ok_or_else(|| ModelError::field(field, format!("`{s}` is not a valid integer")))
        })
        .transpose()
}

fn parse_big_field(field: &str, value: Option<String>) -> Result<Option<BigInt>, ModelError> {
    value
        .map(|s| parse_bigint(&s).map_err(|e| ModelError::field(field, e)))
        .transpose()
}

fn check_version(v: u32) -> Result<(), ModelError> {
    if v == FORMAT_VERSION {
        Ok(())
    } else {
        Err(ModelError::Version(v))
    }
}

pub(crate) fn to_pretty_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents always serialize");
    s.push('\n');
    s
}

impl VectorInstance {
    pub fn to_json(&self) -> String {
        let p = &self.params;
        let doc = InstanceDoc {
            format_version: FORMAT_VERSION,
            flavor: self.flavor,
            params: ParamsDoc {
                q: p.q.map(|v| v.to_string()),
                tuples: p.tuples.map(|v| v.to_string()),
                r: p.r.as_ref().map(|v| v.to_string()),
                b: p.b.as_ref().map(|v| v.to_string()),
                beta: p.beta.map(|v| v.to_string()),
                delta: p.delta.as_ref().map(format_rational),
                m: p.m.map(|v| v.to_string()),
                n: p.n.as_ref().map(|v| v.to_string()),
            },
            items: self
                .items
                .iter()
                .map(|it| ItemDoc {
                    label: it.label.clone(),
                    c1: format_rational(&it.v.c1),
                    c2: format_rational(&it.v.c2),
                })
                .collect(),
        };
        to_pretty_json(&doc)
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let doc: InstanceDoc = serde_json::from_str(text)?;
        check_version(doc.format_version)?;
        let p = doc.params;
        let params = InstanceParams {
            q: parse_field("params.q", p.q)?,
            tuples: parse_field("params.tuples", p.tuples)?,
            r: parse_big_field("params.r", p.r)?,
            b: parse_big_field("params.b", p.b)?,
            beta: parse_field("params.beta", p.beta)?,
            delta: p
                .delta
                .map(|s| parse_rational(&s).map_err(|e| ModelError::field("params.delta", e)))
                .transpose()?,
            m: parse_field("params.m", p.m)?,
            n: parse_big_field("params.n", p.n)?,
        };
        let items = doc
            .items
            .into_iter()
            .enumerate()
            .map(|(idx, it)| {
                let c1 = parse_rational(&it.c1)
                    .map_err(|e| ModelError::field(format!("items[{idx}].c1"), e))?;
                let c2 = parse_rational(&it.c2)
                    .map_err(|e| ModelError::field(format!("items[{idx}].c2"), e))?;
                Ok(Item::new(it.label, Vec2::new(c1, c2)))
            })
            .collect::<Result<Vec<_>, ModelError>>()?;
        VectorInstance::new(doc.flavor, params, items)
    }
}

impl PackingSolution {
    pub fn to_json(&self) -> String {
        to_pretty_json(&PackingDoc {
            format_version: FORMAT_VERSION,
            bins: self.bins.clone(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let doc: PackingDoc = serde_json::from_str(text)?;
        check_version(doc.format_version)?;
        Ok(PackingSolution { bins: doc.bins })
    }
}

impl CoveringSolution {
    pub fn to_json(&self) -> String {
        to_pretty_json(&CoveringDoc {
            format_version: FORMAT_VERSION,
            covers: self.covers.clone(),
            leftovers: self.leftovers.clone(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let doc: CoveringDoc = serde_json::from_str(text)?;
        check_version(doc.format_version)?;
        Ok(CoveringSolution {
            covers: doc.covers,
            leftovers: doc.leftovers,
        })
    }
}
