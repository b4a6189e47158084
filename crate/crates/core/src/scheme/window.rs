use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::{FinSet, FromStructure, Group, GroupCtx};
use crate::num::{Kappa, Q};

/// Declared per-`n` upper bounds on `|sE_n △ E_n| / |E_n|` for one generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "E: Serialize + DeserializeOwned")]
pub struct GenBudget<E> {
    pub gen: E,
    #[serde(with = "crate::num::qvec")]
    pub per_n: Vec<Q>,
}

/// Construction metadata carried by a window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "E: Serialize + DeserializeOwned")]
pub struct WindowParams<E> {
    pub family: String,
    /// Level counts `A_n` (box width or tower height).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub a: Vec<i64>,
    /// Box parameters `B_n`, `C_n`, `b_n` and the height `μ`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub b_len: Vec<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub c: Vec<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub b_start: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<i64>,
    /// Tower budgets `ε_n`.
    #[serde(default, with = "crate::num::qvec", skip_serializing_if = "Vec::is_empty")]
    pub eps: Vec<Q>,
    /// Declared growth base: `A_n ≥ q^n` on the window.
    #[serde(default, with = "crate::num::qopt", skip_serializing_if = "Option::is_none")]
    pub q: Option<Q>,
    #[serde(default)]
    pub budgets: Vec<GenBudget<E>>,
    /// Exponents `k` of the translates `γ_n = s_o^k` chosen by rearrangement.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<i64>>,
    #[serde(default)]
    pub provenance: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, Value>,
}

impl<E> WindowParams<E> {
    pub fn new(family: impl Into<String>) -> Self {
        Self {
            family: family.into(),
            a: Vec::new(),
            b_len: Vec::new(),
            c: Vec::new(),
            b_start: Vec::new(),
            mu: None,
            eps: Vec::new(),
            q: None,
            budgets: Vec::new(),
            gammas: None,
            provenance: Vec::new(),
            extra: BTreeMap::new(),
        }
    }
}

/// A finite truncation `E_1, …, E_N` of a left scheme.
#[derive(Clone, Debug)]
pub struct SchemeWindow<G: Group> {
    pub ctx: GroupCtx<G>,
    pub sets: Vec<FinSet<G::Elem>>,
    pub params: WindowParams<G::Elem>,
    pub kappa: Option<Kappa>,
}

impl<G: Group> SchemeWindow<G> {
    pub fn new(
        ctx: GroupCtx<G>,
        sets: Vec<FinSet<G::Elem>>,
        params: WindowParams<G::Elem>,
        kappa: Option<Kappa>,
    ) -> Result<Self> {
        for (i, e) in sets.iter().enumerate() {
            if e.is_empty() {
                return Err(Error::Validation(format!("E_{} is empty", i + 1)));
            }
            if e.group_id() != ctx.id() {
                return Err(Error::Domain(format!("E_{} belongs to a different group", i + 1)));
            }
        }
        let kappa = kappa.or_else(|| params.q.clone().map(Kappa::half_ln));
        Ok(Self { ctx, sets, params, kappa })
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Declared budget of generator `g` at index `n` (0-based), if any.
    pub fn budget(&self, g: &G::Elem, n: usize) -> Option<&Q> {
        self.params.budgets.iter().find(|b| &b.gen == g).and_then(|b| b.per_n.get(n))
    }

    /// JSON form `{group, s_o, S, params, sets, kappa_hint}`.
    pub fn to_json(&self) -> Value {
        json!({
            "group": self.ctx.group().descriptor(),
            "s_o": serde_json::to_value(self.ctx.s_o()).expect("serializable"),
            "S": serde_json::to_value(self.ctx.gens()).expect("serializable"),
            "params": serde_json::to_value(&self.params).expect("serializable"),
            "sets": serde_json::to_value(&self.sets).expect("serializable"),
            "kappa_hint": serde_json::to_value(&self.kappa).expect("serializable"),
        })
    }
}

impl<G: FromStructure> SchemeWindow<G> {
    pub fn from_json(v: &Value) -> Result<Self> {
        let field = |k: &str| v.get(k).cloned().ok_or_else(|| Error::Validation(format!("scheme JSON missing {k}")));
        let group = field("group")?;
        let ctx_json = json!({
            "kind": group.get("kind").cloned().unwrap_or(Value::Null),
            "structure": group.get("structure").cloned().unwrap_or(Value::Null),
            "gens": field("S")?,
            "s_o": field("s_o")?,
        });
        let ctx = GroupCtx::<G>::from_json(&ctx_json)?;
        let params: WindowParams<G::Elem> = serde_json::from_value(field("params")?)?;
        let sets_json = field("sets")?;
        let arr = sets_json.as_array().ok_or_else(|| Error::Validation("sets must be an array".into()))?;
        let sets = arr.iter().map(|s| ctx.set_from_json(s)).collect::<Result<Vec<_>>>()?;
        let kappa: Option<Kappa> = match v.get("kappa_hint") {
            Some(k) if !k.is_null() => Some(serde_json::from_value(k.clone())?),
            _ => None,
        };
        Self::new(ctx, sets, params, kappa)
    }
}

/// Refuse FC contexts, which carry no left scheme.
pub fn require_scheme_capable<G: Group>(ctx: &GroupCtx<G>) -> Result<()> {
    if ctx.group().is_fc() {
        return Err(Error::NoScheme(format!(
            "{} has only finite conjugacy classes; no s_o-displacement construction exists for this kind",
            ctx.group().kind()
        )));
    }
    Ok(())
}
