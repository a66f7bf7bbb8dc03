//! Instance documents: a JSON schema with string ids, a validating loader
//! and the inverse emitter.
//!
//! Omitted entries default to identities wherever an identity type-checks:
//! inverse images along identity morphisms, comparisons, transitions,
//! monoidality cells and constraints. The emitter omits exactly those.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adjoint::{AdjointAssignment, Adjunction, Side};
use crate::base::{BaseCat, ChosenProduct, Scope};
use crate::ets::{assoc_boundary, comm_boundary, rho_boundary, Boxes, EtsData};
use crate::fibered::{FibMorphism, FiberedCat, Variance};
use crate::fincat::{CatTables, FinCat, Functor, MorId, NatTrans, ObjId};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Field { path: String, message: String },
}

fn field(path: &str, message: impl std::fmt::Display) -> ParseError {
    ParseError::Field { path: path.to_string(), message: message.to_string() }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDoc {
    pub name: String,
    pub dom: String,
    pub cod: String,
}

/// A finite category. `compose` rows are `[g, f, g∘f]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryDoc {
    pub name: String,
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismDoc>,
    pub identities: BTreeMap<String, String>,
    pub compose: Vec<[String; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductDoc {
    pub left: String,
    pub right: String,
    pub obj: String,
    pub p1: String,
    pub p2: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplementDoc {
    pub closed: String,
    pub open: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseDoc {
    pub category: CategoryDoc,
    pub smooth: Vec<String>,
    pub closed: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub products: Option<Vec<ProductDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complements: Option<Vec<ComplementDoc>>,
}

/// `"identity"` or explicit object and morphism tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctorDoc {
    Named(String),
    Table { obj: BTreeMap<String, String>, mor: BTreeMap<String, String> },
}

/// Components keyed by object name.
pub type TransDoc = BTreeMap<String, String>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnDoc {
    pub f: String,
    pub g: String,
    pub components: TransDoc,
}

/// `conn` entries follow `conn_{f,g}` for `g ∘ f`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberedDoc {
    pub name: String,
    #[serde(default = "inverse")]
    pub variance: Variance,
    #[serde(default = "all")]
    pub scope: Scope,
    pub fibers: BTreeMap<String, CategoryDoc>,
    pub functors: BTreeMap<String, FunctorDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conn: Vec<ConnDoc>,
}

fn inverse() -> Variance {
    Variance::Inverse
}

fn all() -> Scope {
    Scope::All
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdjunctionDoc {
    pub adjoint: FunctorDoc,
    pub unit: TransDoc,
    pub counit: TransDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdjunctionsDoc {
    pub host: String,
    pub side: Side,
    pub marked: Scope,
    #[serde(default)]
    pub entries: BTreeMap<String, AdjunctionDoc>,
}

/// One fibered morphism in any of its forms: full transitions, the smooth
/// and closed parts, or the closed part in direct-image form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FibMorphismDoc {
    pub name: String,
    pub source: String,
    pub target: String,
    pub family: BTreeMap<String, FunctorDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<BTreeMap<String, TransDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_sm: Option<BTreeMap<String, TransDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_cl: Option<BTreeMap<String, TransDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_bar_cl: Option<BTreeMap<String, TransDoc>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxDoc {
    pub left: String,
    pub right: String,
    pub functor: FunctorDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairCellDoc {
    pub f1: String,
    pub f2: String,
    pub components: TransDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjCellDoc {
    pub objects: Vec<String>,
    pub components: TransDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtsDoc {
    pub name: String,
    pub host: String,
    pub boxes: Vec<BoxDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<PairCellDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_sm: Option<Vec<PairCellDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_cl: Option<Vec<PairCellDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_bar_cl: Option<Vec<PairCellDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assoc: Option<Vec<ObjCellDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comm: Option<Vec<ObjCellDoc>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorEtsDoc {
    pub name: String,
    pub morphism: String,
    pub source_ets: String,
    pub target_ets: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<ObjCellDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_sm: Option<Vec<ObjCellDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_cl: Option<Vec<ObjCellDoc>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub schema_version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub base: BaseDoc,
    pub fibered: Vec<FiberedDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub adjunctions: Vec<AdjunctionsDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub morphisms: Vec<FibMorphismDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ets: Vec<EtsDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mor_ets: Vec<MorEtsDoc>,
}

pub type Thetas = Vec<Option<NatTrans>>;
pub type PairCells = HashMap<(MorId, MorId), NatTrans>;
pub type ObjPairCells = HashMap<(ObjId, ObjId), NatTrans>;

/// A fibered morphism as stored: every present form is materialized.
#[derive(Clone, Debug)]
pub struct MorphismEntry {
    pub name: String,
    pub source: usize,
    pub target: usize,
    pub family: Vec<Functor>,
    pub theta: Option<Thetas>,
    pub theta_sm: Option<Thetas>,
    pub theta_cl: Option<Thetas>,
    pub theta_bar_cl: Option<Thetas>,
}

#[derive(Clone, Debug)]
pub struct EtsEntry {
    pub name: String,
    pub host: usize,
    pub boxes: Arc<Boxes>,
    pub m: Option<PairCells>,
    pub m_sm: Option<PairCells>,
    pub m_cl: Option<PairCells>,
    pub m_bar_cl: Option<PairCells>,
    pub assoc: Option<HashMap<(ObjId, ObjId, ObjId), NatTrans>>,
    pub comm: Option<ObjPairCells>,
}

#[derive(Clone, Debug)]
pub struct MorEtsEntry {
    pub name: String,
    pub morphism: usize,
    pub source_ets: usize,
    pub target_ets: usize,
    pub rho: Option<ObjPairCells>,
    pub rho_sm: Option<ObjPairCells>,
    pub rho_cl: Option<ObjPairCells>,
}

/// A loaded instance. Indices in entries point into the vectors here.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub seed: Option<u64>,
    pub base: Arc<BaseCat>,
    pub fibered: Vec<Arc<FiberedCat>>,
    pub adjunctions: Vec<AdjointAssignment>,
    pub morphisms: Vec<MorphismEntry>,
    pub ets: Vec<EtsEntry>,
    pub mor_ets: Vec<MorEtsEntry>,
}

impl Instance {
    pub fn new(base: Arc<BaseCat>, name: &str) -> Instance {
        Instance {
            name: name.to_string(),
            seed: None,
            base,
            fibered: Vec::new(),
            adjunctions: Vec::new(),
            morphisms: Vec::new(),
            ets: Vec::new(),
            mor_ets: Vec::new(),
        }
    }

    pub fn fibered_index(&self, name: &str) -> Option<usize> {
        self.fibered.iter().position(|h| h.name == name)
    }

    /// The assignment on a host with the given side whose marked class is `marked`.
    pub fn assignment(&self, host: usize, side: Side, marked: Scope) -> Option<&AdjointAssignment> {
        let name = &self.fibered[host].name;
        self.adjunctions.iter().find(|a| &a.host.name == name && a.side == side && a.marked == marked)
    }
}

struct Loader<'a> {
    doc: &'a Document,
    base: Arc<BaseCat>,
}

fn category(d: &CategoryDoc, path: &str) -> Result<FinCat, ParseError> {
    let oix: HashMap<&str, u32> = d.objects.iter().enumerate().map(|(i, o)| (o.as_str(), i as u32)).collect();
    if oix.len() != d.objects.len() {
        return Err(field(&format!("{path}.objects"), "duplicate object name"));
    }
    let mix: HashMap<&str, u32> = d.morphisms.iter().enumerate().map(|(i, m)| (m.name.as_str(), i as u32)).collect();
    if mix.len() != d.morphisms.len() {
        return Err(field(&format!("{path}.morphisms"), "duplicate morphism name"));
    }
    let o = |n: &str, p: String| oix.get(n).copied().ok_or_else(|| field(&p, format!("unknown object {n:?}")));
    let m = |n: &str, p: String| mix.get(n).copied().ok_or_else(|| field(&p, format!("unknown morphism {n:?}")));
    let mut morphisms = Vec::new();
    for (i, md) in d.morphisms.iter().enumerate() {
        morphisms.push((md.name.clone(), o(&md.dom, format!("{path}.morphisms[{i}].dom"))?, o(&md.cod, format!("{path}.morphisms[{i}].cod"))?));
    }
    let mut identity = Vec::new();
    for x in &d.objects {
        let p = format!("{path}.identities.{x}");
        let id = d.identities.get(x).ok_or_else(|| field(&p, "missing identity"))?;
        identity.push(m(id, p)?);
    }
    let mut compose = Vec::new();
    for (i, [g, f, gf]) in d.compose.iter().enumerate() {
        let p = format!("{path}.compose[{i}]");
        compose.push((m(g, p.clone())?, m(f, p.clone())?, m(gf, p)?));
    }
    let c = FinCat::from_tables(&d.name, CatTables { objects: d.objects.clone(), morphisms, identity, compose })
        .map_err(|e| field(path, e))?;
    let v = crate::fincat::validate_category(&c);
    if let Some(v) = v.violations.first() {
        return Err(field(path, format!("not a category: {} at [{}]", v.law, v.witness.join(", "))));
    }
    Ok(c)
}

fn functor(d: &FunctorDoc, name: &str, src: &FinCat, tgt: &FinCat, path: &str) -> Result<Functor, ParseError> {
    match d {
        FunctorDoc::Named(n) if n == "identity" => {
            if !src.same(tgt) {
                return Err(field(path, "identity between different categories"));
            }
            Ok(Functor::identity(src).renamed(name))
        }
        FunctorDoc::Named(n) => Err(field(path, format!("unknown functor {n:?}"))),
        FunctorDoc::Table { obj, mor } => {
            let mut ot = Vec::new();
            for x in src.objects() {
                let xn = src.obj_name(x);
                let p = format!("{path}.obj.{xn}");
                let y = obj.get(&xn).ok_or_else(|| field(&p, "missing"))?;
                ot.push(tgt.obj_by_name(y).ok_or_else(|| field(&p, format!("unknown object {y:?}")))?);
            }
            let mut mt = Vec::new();
            for m in src.morphisms() {
                let mn = src.mor_name(m);
                let p = format!("{path}.mor.{mn}");
                let y = mor.get(&mn).ok_or_else(|| field(&p, "missing"))?;
                mt.push(tgt.mor_by_name(y).ok_or_else(|| field(&p, format!("unknown morphism {y:?}")))?);
            }
            if obj.len() != ot.len() || mor.len() != mt.len() {
                return Err(field(path, "entries for unknown source ids"));
            }
            let f = Functor::new(name, src, tgt, ot, mt).map_err(|e| field(path, e))?;
            let laws = crate::fincat::functor_laws(&f);
            if let Some(v) = laws.violations.first() {
                return Err(field(path, format!("not a functor: {} at [{}]", v.law, v.witness.join(", "))));
            }
            Ok(f)
        }
    }
}

fn trans(d: &TransDoc, source: &Functor, target: &Functor, path: &str) -> Result<NatTrans, ParseError> {
    let dom = source.source();
    let cod = source.target();
    let mut comps = Vec::new();
    for x in dom.objects() {
        let xn = dom.obj_name(x);
        let p = format!("{path}.{xn}");
        let m = d.get(&xn).ok_or_else(|| field(&p, "missing component"))?;
        comps.push(cod.mor_by_name(m).ok_or_else(|| field(&p, format!("unknown morphism {m:?}")))?);
    }
    if d.len() != comps.len() {
        return Err(field(path, "components for unknown objects"));
    }
    let t = NatTrans::new(source, target, comps).map_err(|e| field(path, e))?;
    let nat = crate::fincat::validate_nat_trans(&t);
    if let Some(v) = nat.violations.first() {
        return Err(field(path, format!("not natural at [{}]", v.witness.join(", "))));
    }
    Ok(t)
}

/// Explicit cell or the identity when the boundary allows it.
fn cell_or_identity(d: Option<&TransDoc>, src: &Functor, tgt: &Functor, path: &str) -> Result<NatTrans, ParseError> {
    match d {
        Some(d) => trans(d, src, tgt, path),
        None if src.same(tgt) => Ok(NatTrans::identity(src)),
        None => Err(field(path, "missing and the identity does not type-check")),
    }
}

impl<'a> Loader<'a> {
    fn obj(&self, n: &str, path: &str) -> Result<ObjId, ParseError> {
        self.base.cat.obj_by_name(n).ok_or_else(|| field(path, format!("unknown base object {n:?}")))
    }

    fn mor(&self, n: &str, path: &str) -> Result<MorId, ParseError> {
        self.base.cat.mor_by_name(n).ok_or_else(|| field(path, format!("unknown base morphism {n:?}")))
    }
}

fn load_base(d: &BaseDoc) -> Result<BaseCat, ParseError> {
    let cat = category(&d.category, "base.category")?;
    let mor = |n: &str, p: &str| cat.mor_by_name(n).ok_or_else(|| field(p, format!("unknown base morphism {n:?}")));
    let obj = |n: &str, p: &str| cat.obj_by_name(n).ok_or_else(|| field(p, format!("unknown base object {n:?}")));
    let smooth = d.smooth.iter().enumerate().map(|(i, n)| mor(n, &format!("base.smooth[{i}]"))).collect::<Result<Vec<_>, _>>()?;
    let closed = d.closed.iter().enumerate().map(|(i, n)| mor(n, &format!("base.closed[{i}]"))).collect::<Result<Vec<_>, _>>()?;
    let initial = d.initial.as_deref().map(|n| obj(n, "base.initial")).transpose()?;
    let products = match &d.products {
        None => None,
        Some(ps) => {
            let mut v = Vec::new();
            for (i, p) in ps.iter().enumerate() {
                let path = format!("base.products[{i}]");
                let cp = ChosenProduct {
                    obj: obj(&p.obj, &format!("{path}.obj"))?,
                    p1: mor(&p.p1, &format!("{path}.p1"))?,
                    p2: mor(&p.p2, &format!("{path}.p2"))?,
                };
                v.push(((obj(&p.left, &format!("{path}.left"))?, obj(&p.right, &format!("{path}.right"))?), cp));
            }
            Some(v)
        }
    };
    let complements = match &d.complements {
        None => None,
        Some(cs) => Some(
            cs.iter()
                .enumerate()
                .map(|(i, c)| {
                    let path = format!("base.complements[{i}]");
                    Ok((mor(&c.closed, &format!("{path}.closed"))?, mor(&c.open, &format!("{path}.open"))?))
                })
                .collect::<Result<Vec<_>, ParseError>>()?,
        ),
    };
    let b = BaseCat::new(cat, &smooth, &closed, initial, products, complements);
    if b.has_products() {
        let r = crate::base::check_products(&b);
        let bad = r.failures().next().map(|s| {
            let w = s.violations.first().map(|v| v.witness.join(", ")).unwrap_or_default();
            format!("{} fails at [{w}]", s.condition)
        });
        if let Some(msg) = bad {
            return Err(field("base.products", msg));
        }
    }
    Ok(b)
}

impl<'a> Loader<'a> {
    fn fibered(&self, i: usize, d: &FiberedDoc) -> Result<FiberedCat, ParseError> {
        let path = format!("fibered[{i}]");
        let b = &self.base;
        let mut fibers = Vec::new();
        for x in b.cat.objects() {
            let xn = b.oname(x);
            let p = format!("{path}.fibers.{xn}");
            let c = d.fibers.get(&xn).ok_or_else(|| field(&p, "missing fiber"))?;
            fibers.push(category(c, &p)?);
        }
        if d.fibers.len() != fibers.len() {
            return Err(field(&format!("{path}.fibers"), "fiber for an unknown object"));
        }
        let ends = |m: MorId| match d.variance {
            Variance::Inverse => (b.cod(m), b.dom(m)),
            Variance::Direct => (b.dom(m), b.cod(m)),
        };
        let mut functors = vec![None; b.cat.n_morphisms()];
        for (mn, fd) in &d.functors {
            let p = format!("{path}.functors.{mn}");
            let m = self.mor(mn, &p)?;
            let (s, t) = ends(m);
            functors[m.ix()] = Some(functor(fd, &format!("{}[{mn}]", d.name), &fibers[s.ix()], &fibers[t.ix()], &p)?);
        }
        for x in b.cat.objects() {
            let i = b.id(x);
            if functors[i.ix()].is_none() {
                functors[i.ix()] = Some(Functor::identity(&fibers[x.ix()]));
            }
        }
        let mut comparisons = HashMap::new();
        for (k, c) in d.conn.iter().enumerate() {
            let p = format!("{path}.conn[{k}]");
            let f = self.mor(&c.f, &format!("{p}.f"))?;
            let g = self.mor(&c.g, &format!("{p}.g"))?;
            if b.cod(f) != b.dom(g) {
                return Err(field(&p, "morphisms are not composable"));
            }
            let (first, second) = match d.variance {
                Variance::Inverse => (g, f),
                Variance::Direct => (f, g),
            };
            let fa = functors[first.ix()].as_ref().ok_or_else(|| field(&p, "outside the scope"))?;
            let fb = functors[second.ix()].as_ref().ok_or_else(|| field(&p, "outside the scope"))?;
            let comp = functors[b.compose(g, f).ix()].as_ref().ok_or_else(|| field(&p, "outside the scope"))?;
            let t = trans(&c.components, comp, &Functor::compose(fb, fa), &format!("{p}.components"))?;
            comparisons.insert((first, second), t);
        }
        FiberedCat::new(&d.name, self.base.clone(), d.variance, d.scope, fibers, functors, comparisons)
            .map_err(|e| field(&path, e))
    }
}

fn family_of(
    d: &BTreeMap<String, FunctorDoc>,
    base: &BaseCat,
    h1: &FiberedCat,
    h2: &FiberedCat,
    name: &str,
    path: &str,
) -> Result<Vec<Functor>, ParseError> {
    let mut out = Vec::new();
    for x in base.cat.objects() {
        let xn = base.oname(x);
        let p = format!("{path}.{xn}");
        let fd = d.get(&xn).ok_or_else(|| field(&p, "missing"))?;
        out.push(functor(fd, &format!("{name}.R[{xn}]"), h1.fiber(x), h2.fiber(x), &p)?);
    }
    if d.len() != out.len() {
        return Err(field(path, "entry for an unknown object"));
    }
    Ok(out)
}

fn pair_cells(
    cells: &[PairCellDoc],
    base: &BaseCat,
    boundary: &dyn Fn(MorId, MorId) -> Option<(Functor, Functor)>,
    path: &str,
) -> Result<PairCells, ParseError> {
    let mut out = HashMap::new();
    for (i, c) in cells.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let f1 = base.cat.mor_by_name(&c.f1).ok_or_else(|| field(&format!("{p}.f1"), "unknown base morphism"))?;
        let f2 = base.cat.mor_by_name(&c.f2).ok_or_else(|| field(&format!("{p}.f2"), "unknown base morphism"))?;
        let (s, t) = boundary(f1, f2).ok_or_else(|| field(&p, "pair outside the marked class"))?;
        if out.insert((f1, f2), trans(&c.components, &s, &t, &format!("{p}.components"))?).is_some() {
            return Err(field(&p, "duplicate pair"));
        }
    }
    Ok(out)
}

fn obj_cells<K: std::hash::Hash + Eq>(
    cells: &[ObjCellDoc],
    base: &BaseCat,
    arity: usize,
    key: &dyn Fn(&[ObjId]) -> K,
    boundary: &dyn Fn(&[ObjId]) -> Result<(Functor, Functor), String>,
    path: &str,
) -> Result<HashMap<K, NatTrans>, ParseError> {
    let mut out = HashMap::new();
    for (i, c) in cells.iter().enumerate() {
        let p = format!("{path}[{i}]");
        if c.objects.len() != arity {
            return Err(field(&format!("{p}.objects"), format!("expected {arity} objects")));
        }
        let os = c
            .objects
            .iter()
            .map(|n| base.cat.obj_by_name(n).ok_or_else(|| field(&format!("{p}.objects"), format!("unknown base object {n:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let (s, t) = boundary(&os).map_err(|e| field(&p, e))?;
        if out.insert(key(&os), trans(&c.components, &s, &t, &format!("{p}.components"))?).is_some() {
            return Err(field(&p, "duplicate entry"));
        }
    }
    Ok(out)
}

impl<'a> Loader<'a> {
    fn host(&self, fibered: &[Arc<FiberedCat>], name: &str, path: &str) -> Result<usize, ParseError> {
        fibered.iter().position(|h| h.name == name).ok_or_else(|| field(path, format!("unknown fibered structure {name:?}")))
    }

    fn adjunctions(&self, i: usize, d: &AdjunctionsDoc, fibered: &[Arc<FiberedCat>]) -> Result<AdjointAssignment, ParseError> {
        let path = format!("adjunctions[{i}]");
        let host = fibered[self.host(fibered, &d.host, &format!("{path}.host"))?].clone();
        let mut given = BTreeMap::new();
        for (mn, e) in &d.entries {
            let p = format!("{path}.entries.{mn}");
            let f = self.mor(mn, &p)?;
            let fstar = host.try_functor(f).ok_or_else(|| field(&p, "outside the host scope"))?.clone();
            let adj = functor(&e.adjoint, &format!("{}.adj[{mn}]", host.name), fstar.target(), fstar.source(), &format!("{p}.adjoint"))?;
            let (left, right) = match d.side {
                Side::Left => (adj, fstar),
                Side::Right => (fstar, adj),
            };
            let unit = trans(&e.unit, &Functor::identity(left.source()), &Functor::compose(&right, &left), &format!("{p}.unit"))?;
            let counit = trans(&e.counit, &Functor::compose(&left, &right), &Functor::identity(left.target()), &format!("{p}.counit"))?;
            given.insert(f, Adjunction::new(left, right, unit, counit).map_err(|e| field(&p, e))?);
        }
        AdjointAssignment::new(host, d.side, d.marked, given).map_err(|e| field(&path, e))
    }

    #[allow(clippy::too_many_arguments)]
    fn thetas(
        &self,
        d: &BTreeMap<String, TransDoc>,
        h1: &Arc<FiberedCat>,
        h2: &Arc<FiberedCat>,
        family: &[Functor],
        scope: Scope,
        name: &str,
        path: &str,
    ) -> Result<Thetas, ParseError> {
        let (r1, r2) = (Arc::new(h1.restrict(scope)), Arc::new(h2.restrict(scope)));
        let mut th = vec![None; self.base.cat.n_morphisms()];
        for (mn, td) in d {
            let p = format!("{path}.{mn}");
            let f = self.mor(mn, &p)?;
            if !r1.in_scope(f) {
                return Err(field(&p, "outside the marked class"));
            }
            let (s, t) = (r1.src(f), r1.tgt(f));
            let src = Functor::compose(r2.functor(f), &family[s.ix()]);
            let tgt = Functor::compose(&family[t.ix()], r1.functor(f));
            th[f.ix()] = Some(trans(td, &src, &tgt, &p)?);
        }
        let m = FibMorphism::new(name, r1, r2, family.to_vec(), th).map_err(|e| field(path, e))?;
        Ok(m.thetas().to_vec())
    }

    fn morphism(
        &self,
        i: usize,
        d: &FibMorphismDoc,
        fibered: &[Arc<FiberedCat>],
        adj: &[AdjointAssignment],
    ) -> Result<MorphismEntry, ParseError> {
        let path = format!("morphisms[{i}]");
        let si = self.host(fibered, &d.source, &format!("{path}.source"))?;
        let ti = self.host(fibered, &d.target, &format!("{path}.target"))?;
        let (h1, h2) = (&fibered[si], &fibered[ti]);
        let family = family_of(&d.family, &self.base, h1, h2, &d.name, &format!("{path}.family"))?;
        let go = |t: &Option<BTreeMap<String, TransDoc>>, scope: Scope, key: &str| {
            t.as_ref().map(|t| self.thetas(t, h1, h2, &family, scope, &d.name, &format!("{path}.{key}"))).transpose()
        };
        let theta = go(&d.theta, Scope::All, "theta")?;
        let theta_sm = go(&d.theta_sm, Scope::Smooth, "theta_sm")?;
        let theta_cl = go(&d.theta_cl, Scope::Closed, "theta_cl")?;
        let theta_bar_cl = match &d.theta_bar_cl {
            None => None,
            Some(map) => {
                let p = format!("{path}.theta_bar_cl");
                let find = |h: &Arc<FiberedCat>| {
                    adj.iter()
                        .find(|a| a.host.name == h.name && a.side == Side::Right && a.marked == Scope::Closed)
                        .ok_or_else(|| field(&p, format!("no right adjoints on closed morphisms of {}", h.name)))
                };
                let (a1, a2) = (find(h1)?, find(h2)?);
                let mut out = vec![None; self.base.cat.n_morphisms()];
                for z in self.base.scoped(Scope::Closed) {
                    let zn = self.base.name(z);
                    let (s, t) = (self.base.cod(z), self.base.dom(z));
                    let src = Functor::compose(&family[s.ix()], a1.adjoint(z));
                    let tgt = Functor::compose(a2.adjoint(z), &family[t.ix()]);
                    out[z.ix()] = Some(cell_or_identity(map.get(&zn), &src, &tgt, &format!("{p}.{zn}"))?);
                }
                if let Some(k) = map.keys().find(|k| self.base.cat.mor_by_name(k).is_none_or(|m| !self.base.is_closed(m))) {
                    return Err(field(&format!("{p}.{k}"), "not a closed morphism"));
                }
                Some(out)
            }
        };
        Ok(MorphismEntry { name: d.name.clone(), source: si, target: ti, family, theta, theta_sm, theta_cl, theta_bar_cl })
    }

    fn ets(&self, i: usize, d: &EtsDoc, fibered: &[Arc<FiberedCat>], adj: &[AdjointAssignment]) -> Result<EtsEntry, ParseError> {
        let path = format!("ets[{i}]");
        let hi = self.host(fibered, &d.host, &format!("{path}.host"))?;
        let h = &fibered[hi];
        let b = &self.base;
        if !b.has_products() {
            return Err(field(&path, "the base has no chosen products"));
        }
        let mut map = HashMap::new();
        for (k, bd) in d.boxes.iter().enumerate() {
            let p = format!("{path}.boxes[{k}]");
            let s1 = self.obj(&bd.left, &format!("{p}.left"))?;
            let s2 = self.obj(&bd.right, &format!("{p}.right"))?;
            let src = FinCat::product(&[h.fiber(s1).clone(), h.fiber(s2).clone()]);
            let f = functor(&bd.functor, &format!("box[{},{}]", bd.left, bd.right), &src, h.fiber(b.product_obj(s1, s2)), &format!("{p}.functor"))?;
            map.insert((s1, s2), f);
        }
        let boxes = Arc::new(Boxes::new(b.clone(), h.fibers(), map).map_err(|e| field(&format!("{path}.boxes"), e))?);
        let family = |cells: &Option<Vec<PairCellDoc>>, host: Arc<FiberedCat>, key: &str| -> Result<Option<PairCells>, ParseError> {
            let Some(cells) = cells else { return Ok(None) };
            let p = format!("{path}.{key}");
            let bd = |f1: MorId, f2: MorId| {
                (host.in_scope(f1) && host.in_scope(f2) && host.in_scope(b.times(f1, f2)))
                    .then(|| crate::ets::m_boundary(&host, &boxes, f1, f2))
            };
            let given = pair_cells(cells, b, &bd, &p)?;
            let e = EtsData::new(&d.name, host.clone(), boxes.clone(), given).map_err(|e| field(&p, e))?;
            Ok(Some(e.cells().clone()))
        };
        let m = family(&d.m, h.clone(), "m")?;
        let m_sm = family(&d.m_sm, Arc::new(h.restrict(Scope::Smooth)), "m_sm")?;
        let m_cl = family(&d.m_cl, Arc::new(h.restrict(Scope::Closed)), "m_cl")?;
        let m_bar_cl = match &d.m_bar_cl {
            None => None,
            Some(_) => {
                let p = format!("{path}.m_bar_cl");
                let a = adj
                    .iter()
                    .find(|a| a.host.name == h.name && a.side == Side::Right && a.marked == Scope::Closed)
                    .ok_or_else(|| field(&p, "no right adjoints on closed morphisms"))?;
                let direct = crate::adjoint::derive_opposite_conn(h, a).map_err(|e| field(&p, e))?;
                family(&d.m_bar_cl, Arc::new(direct), "m_bar_cl")?
            }
        };
        let assoc = match &d.assoc {
            None => None,
            Some(cells) => {
                let bd = |os: &[ObjId]| Ok(assoc_boundary(h, &boxes, os[0], os[1], os[2]));
                Some(obj_cells(cells, b, 3, &|os| (os[0], os[1], os[2]), &bd, &format!("{path}.assoc"))?)
            }
        };
        let comm = match &d.comm {
            None => None,
            Some(cells) => {
                let bd = |os: &[ObjId]| comm_boundary(h, &boxes, os[0], os[1]).map_err(|e| e.to_string());
                Some(obj_cells(cells, b, 2, &|os| (os[0], os[1]), &bd, &format!("{path}.comm"))?)
            }
        };
        Ok(EtsEntry { name: d.name.clone(), host: hi, boxes, m, m_sm, m_cl, m_bar_cl, assoc, comm })
    }

    fn mor_ets(&self, i: usize, d: &MorEtsDoc, morphisms: &[MorphismEntry], ets: &[EtsEntry]) -> Result<MorEtsEntry, ParseError> {
        let path = format!("mor_ets[{i}]");
        let mi = morphisms
            .iter()
            .position(|m| m.name == d.morphism)
            .ok_or_else(|| field(&format!("{path}.morphism"), format!("unknown morphism {:?}", d.morphism)))?;
        let find = |n: &str, k: &str| ets.iter().position(|e| e.name == n).ok_or_else(|| field(&format!("{path}.{k}"), format!("unknown ets {n:?}")));
        let (e1, e2) = (find(&d.source_ets, "source_ets")?, find(&d.target_ets, "target_ets")?);
        let m = &morphisms[mi];
        if ets[e1].host != m.source || ets[e2].host != m.target {
            return Err(field(&path, "tensor structures do not sit on the morphism's ends"));
        }
        let b = &self.base;
        let bd = |os: &[ObjId]| Ok(rho_boundary(&m.family, &ets[e1].boxes, &ets[e2].boxes, os[0], os[1]));
        let go = |cells: &Option<Vec<ObjCellDoc>>, key: &str| -> Result<Option<ObjPairCells>, ParseError> {
            let Some(cells) = cells else { return Ok(None) };
            let p = format!("{path}.{key}");
            let mut given = obj_cells(cells, b, 2, &|os| (os[0], os[1]), &bd, &p)?;
            for s1 in b.cat.objects() {
                for s2 in b.cat.objects() {
                    if !given.contains_key(&(s1, s2)) {
                        let (s, t) = bd(&[s1, s2]).map_err(|e: String| field(&p, e))?;
                        if !s.same(&t) {
                            return Err(field(&format!("{p}[{},{}]", b.oname(s1), b.oname(s2)), "missing and the identity does not type-check"));
                        }
                        given.insert((s1, s2), NatTrans::identity(&s));
                    }
                }
            }
            Ok(Some(given))
        };
        Ok(MorEtsEntry {
            name: d.name.clone(),
            morphism: mi,
            source_ets: e1,
            target_ets: e2,
            rho: go(&d.rho, "rho")?,
            rho_sm: go(&d.rho_sm, "rho_sm")?,
            rho_cl: go(&d.rho_cl, "rho_cl")?,
        })
    }
}

/// Parses JSON text into a document; syntax errors carry line and column.
pub fn parse(text: &str) -> Result<Document, ParseError> {
    let d: Document = serde_json::from_str(text)
        .map_err(|e| ParseError::Syntax { line: e.line(), column: e.column(), message: e.to_string() })?;
    if d.schema_version != SCHEMA_VERSION {
        return Err(field("schema_version", format!("unsupported version {}", d.schema_version)));
    }
    Ok(d)
}

/// Resolves and validates a document.
pub fn load(doc: &Document) -> Result<Instance, ParseError> {
    let base = Arc::new(load_base(&doc.base)?);
    let l = Loader { doc, base: base.clone() };
    let mut inst = Instance::new(base, &doc.name);
    inst.seed = doc.seed;
    for (i, d) in l.doc.fibered.iter().enumerate() {
        if inst.fibered_index(&d.name).is_some() {
            return Err(field(&format!("fibered[{i}].name"), "duplicate name"));
        }
        let h = l.fibered(i, d)?;
        inst.fibered.push(Arc::new(h));
    }
    for (i, d) in doc.adjunctions.iter().enumerate() {
        let a = l.adjunctions(i, d, &inst.fibered)?;
        inst.adjunctions.push(a);
    }
    for (i, d) in doc.morphisms.iter().enumerate() {
        let m = l.morphism(i, d, &inst.fibered, &inst.adjunctions)?;
        inst.morphisms.push(m);
    }
    for (i, d) in doc.ets.iter().enumerate() {
        let e = l.ets(i, d, &inst.fibered, &inst.adjunctions)?;
        inst.ets.push(e);
    }
    for (i, d) in doc.mor_ets.iter().enumerate() {
        let r = l.mor_ets(i, d, &inst.morphisms, &inst.ets)?;
        inst.mor_ets.push(r);
    }
    Ok(inst)
}

pub fn load_str(text: &str) -> Result<Instance, ParseError> {
    load(&parse(text)?)
}

pub fn emit_category(c: &FinCat) -> CategoryDoc {
    CategoryDoc {
        name: c.name().to_string(),
        objects: c.objects().map(|x| c.obj_name(x)).collect(),
        morphisms: c
            .morphisms()
            .map(|m| MorphismDoc { name: c.mor_name(m), dom: c.obj_name(c.dom(m)), cod: c.obj_name(c.cod(m)) })
            .collect(),
        identities: c.objects().map(|x| (c.obj_name(x), c.mor_name(c.id(x)))).collect(),
        compose: c
            .morphisms()
            .flat_map(|g| c.morphisms().map(move |f| (g, f)))
            .filter_map(|(g, f)| c.compose_entry(g, f).map(|gf| [c.mor_name(g), c.mor_name(f), c.mor_name(gf)]))
            .collect(),
    }
}

pub fn emit_functor(f: &Functor) -> FunctorDoc {
    if f.is_identity() {
        return FunctorDoc::Named("identity".into());
    }
    let (s, t) = (f.source(), f.target());
    FunctorDoc::Table {
        obj: s.objects().map(|x| (s.obj_name(x), t.obj_name(f.obj(x)))).collect(),
        mor: s.morphisms().map(|m| (s.mor_name(m), t.mor_name(f.mor(m)))).collect(),
    }
}

pub fn emit_trans(t: &NatTrans) -> TransDoc {
    let (d, c) = (t.domain(), t.codomain());
    d.objects().map(|x| (d.obj_name(x), c.mor_name(t.at(x)))).collect()
}

fn trivial(t: &NatTrans) -> bool {
    t.source().same(t.target()) && t.is_identity()
}

pub fn emit_thetas(b: &BaseCat, th: &Thetas) -> BTreeMap<String, TransDoc> {
    th.iter()
        .enumerate()
        .filter_map(|(i, t)| t.as_ref().filter(|t| !trivial(t)).map(|t| (b.name(MorId(i as u32)), emit_trans(t))))
        .collect()
}

pub fn emit_pairs(b: &BaseCat, cells: &PairCells) -> Vec<PairCellDoc> {
    let mut keys: Vec<_> = cells.keys().copied().filter(|k| !trivial(&cells[k])).collect();
    keys.sort();
    keys.into_iter()
        .map(|(f1, f2)| PairCellDoc { f1: b.name(f1), f2: b.name(f2), components: emit_trans(&cells[&(f1, f2)]) })
        .collect()
}

fn emit_objs<K: Ord + Copy + std::hash::Hash>(b: &BaseCat, cells: &HashMap<K, NatTrans>, names: &dyn Fn(K) -> Vec<ObjId>) -> Vec<ObjCellDoc> {
    let mut keys: Vec<K> = cells.keys().copied().filter(|k| !trivial(&cells[k])).collect();
    keys.sort();
    keys.into_iter()
        .map(|k| ObjCellDoc { objects: names(k).into_iter().map(|x| b.oname(x)).collect(), components: emit_trans(&cells[&k]) })
        .collect()
}

/// The inverse of [`load`]: identities that the loader would supply are omitted.
pub fn emit(inst: &Instance) -> Document {
    let b = &*inst.base;
    let c = &b.cat;
    let base = BaseDoc {
        category: emit_category(c),
        smooth: b.scoped(Scope::Smooth).map(|m| b.name(m)).collect(),
        closed: b.scoped(Scope::Closed).map(|m| b.name(m)).collect(),
        initial: b.initial.map(|x| b.oname(x)),
        products: b.has_products().then(|| {
            c.objects()
                .flat_map(|x| c.objects().map(move |y| (x, y)))
                .map(|(x, y)| {
                    let p = b.product(x, y).expect("chosen product present");
                    ProductDoc { left: b.oname(x), right: b.oname(y), obj: b.oname(p.obj), p1: b.name(p.p1), p2: b.name(p.p2) }
                })
                .collect()
        }),
        complements: b.complements().map(|cs| {
            cs.iter().map(|(&z, &u)| ComplementDoc { closed: b.name(z), open: b.name(u) }).collect()
        }),
    };
    let fibered = inst
        .fibered
        .iter()
        .map(|h| {
            let mut conn = Vec::new();
            for (first, second) in h.pairs() {
                let t = h.comparison(first, second);
                if trivial(t) {
                    continue;
                }
                let (f, g) = match h.variance {
                    Variance::Inverse => (second, first),
                    Variance::Direct => (first, second),
                };
                conn.push(ConnDoc { f: b.name(f), g: b.name(g), components: emit_trans(t) });
            }
            FiberedDoc {
                name: h.name.clone(),
                variance: h.variance,
                scope: h.scope,
                fibers: c.objects().map(|x| (b.oname(x), emit_category(h.fiber(x)))).collect(),
                functors: h
                    .scoped()
                    .into_iter()
                    .filter(|&m| !(b.is_id(m) && h.functor(m).is_identity()))
                    .map(|m| (b.name(m), emit_functor(h.functor(m))))
                    .collect(),
                conn,
            }
        })
        .collect();
    let adjunctions = inst
        .adjunctions
        .iter()
        .map(|a| AdjunctionsDoc {
            host: a.host.name.clone(),
            side: a.side,
            marked: a.marked,
            entries: a
                .entries()
                .filter(|(f, e)| {
                    !(b.is_id(*f) && e.left.is_identity() && e.right.is_identity() && e.unit.is_identity() && e.counit.is_identity())
                })
                .map(|(f, e)| {
                    (b.name(f), AdjunctionDoc { adjoint: emit_functor(a.adjoint(f)), unit: emit_trans(&e.unit), counit: emit_trans(&e.counit) })
                })
                .collect(),
        })
        .collect();
    let morphisms = inst
        .morphisms
        .iter()
        .map(|m| FibMorphismDoc {
            name: m.name.clone(),
            source: inst.fibered[m.source].name.clone(),
            target: inst.fibered[m.target].name.clone(),
            family: c.objects().map(|x| (b.oname(x), emit_functor(&m.family[x.ix()]))).collect(),
            theta: m.theta.as_ref().map(|t| emit_thetas(b, t)),
            theta_sm: m.theta_sm.as_ref().map(|t| emit_thetas(b, t)),
            theta_cl: m.theta_cl.as_ref().map(|t| emit_thetas(b, t)),
            theta_bar_cl: m.theta_bar_cl.as_ref().map(|t| emit_thetas(b, t)),
        })
        .collect();
    let ets = inst
        .ets
        .iter()
        .map(|e| {
            let mut boxes = Vec::new();
            for x in c.objects() {
                for y in c.objects() {
                    boxes.push(BoxDoc { left: b.oname(x), right: b.oname(y), functor: emit_functor(e.boxes.at(x, y)) });
                }
            }
            EtsDoc {
                name: e.name.clone(),
                host: inst.fibered[e.host].name.clone(),
                boxes,
                m: e.m.as_ref().map(|m| emit_pairs(b, m)),
                m_sm: e.m_sm.as_ref().map(|m| emit_pairs(b, m)),
                m_cl: e.m_cl.as_ref().map(|m| emit_pairs(b, m)),
                m_bar_cl: e.m_bar_cl.as_ref().map(|m| emit_pairs(b, m)),
                assoc: e.assoc.as_ref().map(|a| emit_objs(b, a, &|(x, y, z)| vec![x, y, z])),
                comm: e.comm.as_ref().map(|a| emit_objs(b, a, &|(x, y)| vec![x, y])),
            }
        })
        .collect();
    let mor_ets = inst
        .mor_ets
        .iter()
        .map(|r| MorEtsDoc {
            name: r.name.clone(),
            morphism: inst.morphisms[r.morphism].name.clone(),
            source_ets: inst.ets[r.source_ets].name.clone(),
            target_ets: inst.ets[r.target_ets].name.clone(),
            rho: r.rho.as_ref().map(|a| emit_objs(b, a, &|(x, y)| vec![x, y])),
            rho_sm: r.rho_sm.as_ref().map(|a| emit_objs(b, a, &|(x, y)| vec![x, y])),
            rho_cl: r.rho_cl.as_ref().map(|a| emit_objs(b, a, &|(x, y)| vec![x, y])),
        })
        .collect();
    Document {
        schema_version: SCHEMA_VERSION,
        name: inst.name.clone(),
        seed: inst.seed,
        base,
        fibered,
        adjunctions,
        morphisms,
        ets,
        mor_ets,
    }
}

/// Pretty JSON with a trailing newline; byte-stable for equal documents.
pub fn to_json(doc: &Document) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}
