//! Group elements, generating contexts, and exact finite-set calculus.

mod abelian;
mod dihedral;
mod heisenberg;
mod product;

pub use abelian::Abelian;
pub use dihedral::{DElem, Dihedral};
pub use heisenberg::{HElem, Heisenberg};
pub use product::DirectProduct;

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Debug;
use std::hash::{Hash, Hasher};

use rand::Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::num::{ratio, Q};
use crate::par;

/// A concrete group given by canonical normal-form coordinates.
///
/// `Elem` values are canonical: two elements are equal iff their coordinates
/// are identical. Implementations must keep `mul` and `inv` closed on valid
/// elements.
pub trait Group: Clone + Debug + Send + Sync + 'static {
    type Elem: Clone + Ord + Hash + Debug + Send + Sync + Serialize + DeserializeOwned;

    /// Short tag used in descriptors, e.g. `"heisenberg"`.
    fn kind(&self) -> &'static str;

    /// Kind-specific parameters, enough to rebuild the group.
    fn structure(&self) -> Value;

    fn identity(&self) -> Self::Elem;

    fn mul(&self, g: &Self::Elem, h: &Self::Elem) -> Self::Elem;

    fn inv(&self, g: &Self::Elem) -> Self::Elem;

    /// Whether `g` is a canonical element of this group.
    fn is_valid(&self, g: &Self::Elem) -> bool;

    /// A homomorphism to the integers, when the group carries one.
    ///
    /// Contexts whose distinguished element has level 1 get exact orbit
    /// charts for `⟨s_o⟩` (see [`crate::scheme::OrbitChart`]).
    fn level(&self, _g: &Self::Elem) -> Option<i64> {
        None
    }

    /// Every conjugacy class is finite.
    fn is_fc(&self) -> bool {
        false
    }

    fn pow(&self, g: &Self::Elem, k: i64) -> Self::Elem {
        let base = if k < 0 { self.inv(g) } else { g.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = self.identity();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        acc
    }

    fn descriptor(&self) -> Value {
        json!({ "kind": self.kind(), "structure": self.structure() })
    }
}

/// Groups that can be rebuilt from their `structure` JSON.
pub trait FromStructure: Group + Sized {
    fn from_structure(structure: &Value) -> Result<Self>;
}

/// Left or right translation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Fingerprint of a group descriptor, attached to every [`FinSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupId(u64);

impl GroupId {
    fn of(desc: &Value) -> Self {
        let mut h = DefaultHasher::new();
        desc.to_string().hash(&mut h);
        GroupId(h.finish())
    }
}

/// Power bound for the infinite-order guard on `s_o`.
pub const ORDER_GUARD: i64 = 64;

/// A group with a finite symmetric generating set and a distinguished element.
#[derive(Clone, Debug)]
pub struct GroupCtx<G: Group> {
    group: G,
    gens: Vec<G::Elem>,
    s_o: G::Elem,
    id: GroupId,
    charted: bool,
}

impl<G: Group> GroupCtx<G> {
    /// Validates symmetry of `gens`, membership of `s_o`, and that
    /// `s_o^k ≠ e` for `1 ≤ k ≤ 64`.
    pub fn new(group: G, gens: Vec<G::Elem>, s_o: G::Elem) -> Result<Self> {
        for g in gens.iter().chain(std::iter::once(&s_o)) {
            if !group.is_valid(g) {
                return Err(Error::Validation(format!("{g:?} is not a canonical element")));
            }
        }
        let mut uniq: Vec<G::Elem> = Vec::with_capacity(gens.len());
        for g in gens {
            if !uniq.contains(&g) {
                uniq.push(g);
            }
        }
        for g in &uniq {
            let gi = group.inv(g);
            if !uniq.contains(&gi) {
                return Err(Error::Validation(format!(
                    "generating set is not symmetric: missing inverse {gi:?} of {g:?}"
                )));
            }
        }
        if !uniq.contains(&s_o) {
            return Err(Error::Validation(format!("s_o = {s_o:?} is not in the generating set")));
        }
        let e = group.identity();
        let mut p = s_o.clone();
        for k in 1..=ORDER_GUARD {
            if p == e {
                return Err(Error::Validation(format!("s_o has finite order {k}")));
            }
            p = group.mul(&p, &s_o);
        }
        let charted = group.level(&s_o) == Some(1) && group.level(&e) == Some(0);
        let id = GroupId::of(&group.descriptor());
        Ok(Self { group, gens: uniq, s_o, id, charted })
    }

    pub fn group(&self) -> &G {
        &self.group
    }

    pub fn gens(&self) -> &[G::Elem] {
        &self.gens
    }

    pub fn s_o(&self) -> &G::Elem {
        &self.s_o
    }

    pub fn id(&self) -> GroupId {
        self.id
    }

    /// Whether `level` is a homomorphism with `level(s_o) = 1`.
    pub fn charted(&self) -> bool {
        self.charted
    }

    pub fn identity(&self) -> G::Elem {
        self.group.identity()
    }

    pub fn mul(&self, g: &G::Elem, h: &G::Elem) -> G::Elem {
        self.group.mul(g, h)
    }

    /// `mul` with a domain check on both arguments.
    pub fn checked_mul(&self, g: &G::Elem, h: &G::Elem) -> Result<G::Elem> {
        for x in [g, h] {
            if !self.group.is_valid(x) {
                return Err(Error::Domain(format!("{x:?} is not an element of this {}", self.group.kind())));
            }
        }
        Ok(self.group.mul(g, h))
    }

    pub fn inv(&self, g: &G::Elem) -> G::Elem {
        self.group.inv(g)
    }

    pub fn pow(&self, g: &G::Elem, k: i64) -> G::Elem {
        self.group.pow(g, k)
    }

    /// `s_o^k`.
    pub fn gamma(&self, k: i64) -> G::Elem {
        self.group.pow(&self.s_o, k)
    }

    /// The conjugate `h g h⁻¹`.
    pub fn conj(&self, g: &G::Elem, h: &G::Elem) -> G::Elem {
        self.mul(&self.mul(h, g), &self.inv(h))
    }

    pub fn act(&self, side: Side, g: &G::Elem, h: &G::Elem) -> G::Elem {
        match side {
            Side::Left => self.mul(g, h),
            Side::Right => self.mul(h, g),
        }
    }

    pub fn set<I: IntoIterator<Item = G::Elem>>(&self, elems: I) -> FinSet<G::Elem> {
        FinSet { group: self.id, elems: elems.into_iter().collect() }
    }

    pub fn empty_set(&self) -> FinSet<G::Elem> {
        self.set(std::iter::empty())
    }

    /// Builds a set after checking every element is canonical.
    pub fn try_set<I: IntoIterator<Item = G::Elem>>(&self, elems: I) -> Result<FinSet<G::Elem>> {
        let s = self.set(elems);
        if let Some(bad) = s.iter().find(|g| !self.group.is_valid(g)) {
            return Err(Error::Domain(format!("{bad:?} is not an element of this {}", self.group.kind())));
        }
        Ok(s)
    }

    pub fn set_from_json(&self, v: &Value) -> Result<FinSet<G::Elem>> {
        let elems: Vec<G::Elem> = serde_json::from_value(v.clone())?;
        self.try_set(elems)
    }

    /// `gE` or `Eg`.
    pub fn translate(&self, side: Side, g: &G::Elem, e: &FinSet<G::Elem>) -> FinSet<G::Elem> {
        FinSet { group: self.id, elems: par::image(&e.elems, |h| self.act(side, g, h)) }
    }

    /// `E⁻¹`.
    pub fn invert(&self, e: &FinSet<G::Elem>) -> FinSet<G::Elem> {
        FinSet { group: self.id, elems: par::image(&e.elems, |h| self.inv(h)) }
    }

    /// `|gE ∩ E|` (or `|Eg ∩ E|`), counted without materializing `gE`.
    pub fn overlap(&self, side: Side, g: &G::Elem, e: &FinSet<G::Elem>) -> usize {
        par::count(&e.elems, |h| e.contains(&self.act(side, g, h)))
    }

    /// `|gE △ E|` (or `|Eg △ E|`).
    pub fn sym_diff_size(&self, side: Side, g: &G::Elem, e: &FinSet<G::Elem>) -> usize {
        2 * (e.len() - self.overlap(side, g, e))
    }

    /// `|gE △ E| / |E|` as an exact rational.
    pub fn boundary_ratio(&self, side: Side, g: &G::Elem, e: &FinSet<G::Elem>) -> Result<Q> {
        if e.is_empty() {
            return Err(Error::Domain("boundary ratio of the empty set".into()));
        }
        Ok(ratio(self.sym_diff_size(side, g, e), e.len()))
    }

    /// `gE △ E` as a set.
    pub fn boundary_set(&self, side: Side, g: &G::Elem, e: &FinSet<G::Elem>) -> FinSet<G::Elem> {
        let ge = self.translate(side, g, e);
        ge.symdiff(e).expect("same group")
    }

    /// A shortest word over the generators representing `g`, by breadth-first
    /// search of the Cayley graph. Returns generator elements in order, so
    /// that their product is `g`.
    pub fn word_decompose(&self, g: &G::Elem, max_len: usize) -> Result<Vec<G::Elem>> {
        let e = self.identity();
        if *g == e {
            return Ok(Vec::new());
        }
        let mut parent: HashMap<G::Elem, (G::Elem, usize)> = HashMap::new();
        let mut frontier = VecDeque::from([(e.clone(), 0usize)]);
        let mut seen: BTreeSet<G::Elem> = BTreeSet::from([e]);
        while let Some((h, d)) = frontier.pop_front() {
            if d == max_len {
                continue;
            }
            for (i, s) in self.gens.iter().enumerate() {
                let nh = self.mul(&h, s);
                if seen.insert(nh.clone()) {
                    parent.insert(nh.clone(), (h.clone(), i));
                    if nh == *g {
                        let mut word = Vec::new();
                        let mut cur = nh;
                        while let Some((p, i)) = parent.get(&cur) {
                            word.push(self.gens[*i].clone());
                            cur = p.clone();
                        }
                        word.reverse();
                        return Ok(word);
                    }
                    frontier.push_back((nh, d + 1));
                }
            }
        }
        Err(Error::RadiusExceeded { max_len, target: format!("{g:?}") })
    }

    /// Product of a random word of length `len` over the generators.
    pub fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R, len: usize) -> G::Elem {
        let mut g = self.identity();
        for _ in 0..len {
            let s = &self.gens[rng.random_range(0..self.gens.len())];
            g = self.mul(&g, s);
        }
        g
    }

    /// JSON form `{kind, structure, gens, s_o}`.
    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.group.kind(),
            "structure": self.group.structure(),
            "gens": serde_json::to_value(&self.gens).expect("serializable"),
            "s_o": serde_json::to_value(&self.s_o).expect("serializable"),
        })
    }
}

impl<G: FromStructure> GroupCtx<G> {
    pub fn from_json(v: &Value) -> Result<Self> {
        let structure = v.get("structure").cloned().unwrap_or(Value::Null);
        let group = G::from_structure(&structure)?;
        if let Some(kind) = v.get("kind").and_then(Value::as_str) {
            if kind != group.kind() {
                return Err(Error::Validation(format!("expected kind {}, found {kind}", group.kind())));
            }
        }
        let gens: Vec<G::Elem> = serde_json::from_value(
            v.get("gens").cloned().ok_or_else(|| Error::Validation("missing gens".into()))?,
        )?;
        let s_o: G::Elem = serde_json::from_value(
            v.get("s_o").cloned().ok_or_else(|| Error::Validation("missing s_o".into()))?,
        )?;
        Self::new(group, gens, s_o)
    }
}

/// Set operation selector for [`set_algebra`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetOp {
    Union,
    Intersect,
    Symdiff,
    Minus,
}

/// A finite set of canonical elements, iterated in sorted order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinSet<E: Ord> {
    group: GroupId,
    elems: BTreeSet<E>,
}

impl<E: Ord + Clone> FinSet<E> {
    pub fn group_id(&self) -> GroupId {
        self.group
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, g: &E) -> bool {
        self.elems.contains(g)
    }

    pub fn iter(&self) -> std::collections::btree_set::Iter<'_, E> {
        self.elems.iter()
    }

    pub fn elems(&self) -> &BTreeSet<E> {
        &self.elems
    }

    pub fn insert(&mut self, g: E) -> bool {
        self.elems.insert(g)
    }

    pub fn remove(&mut self, g: &E) -> bool {
        self.elems.remove(g)
    }

    fn same_group(&self, other: &Self) -> Result<()> {
        if self.group != other.group {
            return Err(Error::Domain("set operation across different groups".into()));
        }
        Ok(())
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        Ok(Self { group: self.group, elems: self.elems.union(&other.elems).cloned().collect() })
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        Ok(Self { group: self.group, elems: self.elems.intersection(&other.elems).cloned().collect() })
    }

    pub fn symdiff(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        Ok(Self {
            group: self.group,
            elems: self.elems.symmetric_difference(&other.elems).cloned().collect(),
        })
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        Ok(Self { group: self.group, elems: self.elems.difference(&other.elems).cloned().collect() })
    }

    /// `|E ∩ F|` without building the intersection.
    pub fn intersection_len(&self, other: &Self) -> Result<usize> {
        self.same_group(other)?;
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        Ok(small.elems.iter().filter(|g| big.elems.contains(g)).count())
    }

    pub fn is_disjoint(&self, other: &Self) -> Result<bool> {
        self.same_group(other)?;
        Ok(self.elems.is_disjoint(&other.elems))
    }

    /// Some common element, the least one.
    pub fn first_common(&self, other: &Self) -> Option<&E> {
        self.elems.iter().find(|g| other.elems.contains(g))
    }
}

/// `E op F` for the four basic operations.
pub fn set_algebra<E: Ord + Clone>(e: &FinSet<E>, f: &FinSet<E>, op: SetOp) -> Result<FinSet<E>> {
    match op {
        SetOp::Union => e.union(f),
        SetOp::Intersect => e.intersect(f),
        SetOp::Symdiff => e.symdiff(f),
        SetOp::Minus => e.minus(f),
    }
}

impl<E: Ord + Serialize> Serialize for FinSet<E> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.elems.iter())
    }
}

impl<'a, E: Ord> IntoIterator for &'a FinSet<E> {
    type Item = &'a E;
    type IntoIter = std::collections::btree_set::Iter<'a, E>;
    fn into_iter(self) -> Self::IntoIter {
        self.elems.iter()
    }
}
