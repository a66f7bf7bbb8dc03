//! Finite categories, functors and natural transformations as dense tables.
//!
//! Every category is either an explicit table or a finite product of
//! categories. Product ids are mixed-radix, row-major over the flattened
//! factor list, so `(A × B) × C` and `A × (B × C)` share one encoding.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::report::{Section, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MorId(pub u32);

impl ObjId {
    pub fn ix(self) -> usize {
        self.0 as usize
    }
}

impl MorId {
    pub fn ix(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FincatError {
    #[error("dangling id {id} in {context}")]
    DanglingId { context: String, id: String },
    #[error("functor {functor} has an invalid source or target category")]
    SourceInvalid { functor: String },
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),
    #[error("component at {object} is {morphism}, expected a morphism {expected}")]
    ComponentType {
        object: String,
        morphism: String,
        expected: String,
    },
    #[error("component at {object} ({morphism}) is not an isomorphism")]
    NotIso { object: String, morphism: String },
    #[error("pasting step {step} does not chain: {detail}")]
    TypeError { step: usize, detail: String },
}

struct Table {
    objects: Vec<String>,
    morphisms: Vec<String>,
    dom: Vec<ObjId>,
    cod: Vec<ObjId>,
    identity: Vec<MorId>,
    /// Row `g`, column `f` holds `g ∘ f`.
    compose: Vec<Option<MorId>>,
}

struct Product {
    factors: Vec<FinCat>,
    obj_stride: Vec<usize>,
    mor_stride: Vec<usize>,
    n_obj: usize,
    n_mor: usize,
}

enum Kind {
    Table(Table),
    Product(Product),
}

struct CatInner {
    name: String,
    fingerprint: u64,
    kind: Kind,
    inverses: OnceLock<Vec<Option<MorId>>>,
    obj_names: OnceLock<HashMap<String, ObjId>>,
    mor_names: OnceLock<HashMap<String, MorId>>,
}

/// A finite category. Cloning shares the underlying tables.
#[derive(Clone)]
pub struct FinCat(Arc<CatInner>);

/// Raw description of a table category, ids already densified.
#[derive(Clone, Debug)]
pub struct CatTables {
    pub objects: Vec<String>,
    pub morphisms: Vec<(String, u32, u32)>,
    pub identity: Vec<u32>,
    /// Entries `(g, f, g∘f)`.
    pub compose: Vec<(u32, u32, u32)>,
}

impl FinCat {
    pub fn from_tables(name: &str, t: CatTables) -> Result<FinCat, FincatError> {
        let n_obj = t.objects.len();
        let n_mor = t.morphisms.len();
        let dangling = |what: &str, id: u32| FincatError::DanglingId {
            context: format!("{name}.{what}"),
            id: id.to_string(),
        };
        let mut dom = Vec::with_capacity(n_mor);
        let mut cod = Vec::with_capacity(n_mor);
        let mut morphisms = Vec::with_capacity(n_mor);
        for (m, d, c) in &t.morphisms {
            if *d as usize >= n_obj {
                return Err(dangling("dom", *d));
            }
            if *c as usize >= n_obj {
                return Err(dangling("cod", *c));
            }
            morphisms.push(m.clone());
            dom.push(ObjId(*d));
            cod.push(ObjId(*c));
        }
        if t.identity.len() != n_obj {
            return Err(FincatError::DanglingId {
                context: format!("{name}.identity"),
                id: format!("{} entries for {} objects", t.identity.len(), n_obj),
            });
        }
        let mut identity = Vec::with_capacity(n_obj);
        for &i in &t.identity {
            if i as usize >= n_mor {
                return Err(dangling("identity", i));
            }
            identity.push(MorId(i));
        }
        let mut compose = vec![None; n_mor * n_mor];
        for &(g, f, gf) in &t.compose {
            for id in [g, f, gf] {
                if id as usize >= n_mor {
                    return Err(dangling("compose", id));
                }
            }
            compose[g as usize * n_mor + f as usize] = Some(MorId(gf));
        }
        let mut h = DefaultHasher::new();
        "table".hash(&mut h);
        t.objects.hash(&mut h);
        morphisms.hash(&mut h);
        dom.hash(&mut h);
        cod.hash(&mut h);
        identity.hash(&mut h);
        compose.hash(&mut h);
        let table = Table {
            objects: t.objects,
            morphisms,
            dom,
            cod,
            identity,
            compose,
        };
        Ok(FinCat::wrap(name.to_string(), h.finish(), Kind::Table(table)))
    }

    fn wrap(name: String, fingerprint: u64, kind: Kind) -> FinCat {
        FinCat(Arc::new(CatInner {
            name,
            fingerprint,
            kind,
            inverses: OnceLock::new(),
            obj_names: OnceLock::new(),
            mor_names: OnceLock::new(),
        }))
    }

    /// Finite product; nested products are flattened, the empty product is terminal.
    pub fn product(factors: &[FinCat]) -> FinCat {
        let mut flat = Vec::new();
        for f in factors {
            match &f.0.kind {
                Kind::Product(p) => flat.extend(p.factors.iter().cloned()),
                Kind::Table(_) => flat.push(f.clone()),
            }
        }
        let n = flat.len();
        let mut obj_stride = vec![1usize; n];
        let mut mor_stride = vec![1usize; n];
        for k in (0..n.saturating_sub(1)).rev() {
            obj_stride[k] = obj_stride[k + 1] * flat[k + 1].n_objects();
            mor_stride[k] = mor_stride[k + 1] * flat[k + 1].n_morphisms();
        }
        let n_obj = flat.iter().map(|c| c.n_objects()).product();
        let n_mor = flat.iter().map(|c| c.n_morphisms()).product();
        let mut h = DefaultHasher::new();
        "product".hash(&mut h);
        for c in &flat {
            c.0.fingerprint.hash(&mut h);
        }
        let name = format!(
            "({})",
            flat.iter().map(|c| c.name().to_string()).collect::<Vec<_>>().join(" x ")
        );
        FinCat::wrap(
            name,
            h.finish(),
            Kind::Product(Product {
                factors: flat,
                obj_stride,
                mor_stride,
                n_obj,
                n_mor,
            }),
        )
    }

    pub fn terminal() -> FinCat {
        FinCat::from_tables(
            "1",
            CatTables {
                objects: vec!["*".into()],
                morphisms: vec![("id".into(), 0, 0)],
                identity: vec![0],
                compose: vec![(0, 0, 0)],
            },
        )
        .expect("terminal category tables are well-formed")
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn same(&self, other: &FinCat) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.0.fingerprint != other.0.fingerprint {
            return false;
        }
        match (&self.0.kind, &other.0.kind) {
            (Kind::Table(a), Kind::Table(b)) => {
                a.objects == b.objects
                    && a.morphisms == b.morphisms
                    && a.dom == b.dom
                    && a.cod == b.cod
                    && a.identity == b.identity
                    && a.compose == b.compose
            }
            (Kind::Product(a), Kind::Product(b)) => {
                a.factors.len() == b.factors.len()
                    && a.factors.iter().zip(&b.factors).all(|(x, y)| x.same(y))
            }
            _ => false,
        }
    }

    pub fn factors(&self) -> Option<&[FinCat]> {
        match &self.0.kind {
            Kind::Product(p) => Some(&p.factors),
            Kind::Table(_) => None,
        }
    }

    pub fn n_objects(&self) -> usize {
        match &self.0.kind {
            Kind::Table(t) => t.objects.len(),
            Kind::Product(p) => p.n_obj,
        }
    }

    pub fn n_morphisms(&self) -> usize {
        match &self.0.kind {
            Kind::Table(t) => t.morphisms.len(),
            Kind::Product(p) => p.n_mor,
        }
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> {
        (0..self.n_objects() as u32).map(ObjId)
    }

    pub fn morphisms(&self) -> impl Iterator<Item = MorId> {
        (0..self.n_morphisms() as u32).map(MorId)
    }

    pub fn split_obj(&self, x: ObjId) -> Vec<ObjId> {
        match &self.0.kind {
            Kind::Table(_) => vec![x],
            Kind::Product(p) => p
                .factors
                .iter()
                .zip(&p.obj_stride)
                .map(|(c, s)| ObjId(((x.ix() / s) % c.n_objects()) as u32))
                .collect(),
        }
    }

    pub fn split_mor(&self, m: MorId) -> Vec<MorId> {
        match &self.0.kind {
            Kind::Table(_) => vec![m],
            Kind::Product(p) => p
                .factors
                .iter()
                .zip(&p.mor_stride)
                .map(|(c, s)| MorId(((m.ix() / s) % c.n_morphisms()) as u32))
                .collect(),
        }
    }

    pub fn join_obj(&self, parts: &[ObjId]) -> ObjId {
        match &self.0.kind {
            Kind::Table(_) => parts[0],
            Kind::Product(p) => {
                ObjId(parts.iter().zip(&p.obj_stride).map(|(x, s)| x.ix() * s).sum::<usize>() as u32)
            }
        }
    }

    pub fn join_mor(&self, parts: &[MorId]) -> MorId {
        match &self.0.kind {
            Kind::Table(_) => parts[0],
            Kind::Product(p) => {
                MorId(parts.iter().zip(&p.mor_stride).map(|(m, s)| m.ix() * s).sum::<usize>() as u32)
            }
        }
    }

    pub fn dom(&self, m: MorId) -> ObjId {
        match &self.0.kind {
            Kind::Table(t) => t.dom[m.ix()],
            Kind::Product(p) => {
                let parts: Vec<ObjId> =
                    p.factors.iter().zip(self.split_mor(m)).map(|(c, x)| c.dom(x)).collect();
                self.join_obj(&parts)
            }
        }
    }

    pub fn cod(&self, m: MorId) -> ObjId {
        match &self.0.kind {
            Kind::Table(t) => t.cod[m.ix()],
            Kind::Product(p) => {
                let parts: Vec<ObjId> =
                    p.factors.iter().zip(self.split_mor(m)).map(|(c, x)| c.cod(x)).collect();
                self.join_obj(&parts)
            }
        }
    }

    pub fn id(&self, x: ObjId) -> MorId {
        match &self.0.kind {
            Kind::Table(t) => t.identity[x.ix()],
            Kind::Product(p) => {
                let parts: Vec<MorId> =
                    p.factors.iter().zip(self.split_obj(x)).map(|(c, y)| c.id(y)).collect();
                self.join_mor(&parts)
            }
        }
    }

    /// Table entry for `g ∘ f`, whether or not the pair is composable.
    pub fn compose_entry(&self, g: MorId, f: MorId) -> Option<MorId> {
        match &self.0.kind {
            Kind::Table(t) => t.compose[g.ix() * t.morphisms.len() + f.ix()],
            Kind::Product(p) => {
                let gs = self.split_mor(g);
                let fs = self.split_mor(f);
                let mut parts = Vec::with_capacity(gs.len());
                for ((c, a), b) in p.factors.iter().zip(gs).zip(fs) {
                    parts.push(c.compose_entry(a, b)?);
                }
                Some(self.join_mor(&parts))
            }
        }
    }

    /// `g ∘ f`; the pair must be composable in a validated category.
    pub fn compose(&self, g: MorId, f: MorId) -> MorId {
        match self.compose_entry(g, f) {
            Some(gf) => gf,
            None => panic!(
                "{}: no composite {} ∘ {}",
                self.name(),
                self.mor_name(g),
                self.mor_name(f)
            ),
        }
    }

    pub fn obj_name(&self, x: ObjId) -> String {
        match &self.0.kind {
            Kind::Table(t) => t.objects[x.ix()].clone(),
            Kind::Product(p) => {
                let parts: Vec<String> = p
                    .factors
                    .iter()
                    .zip(self.split_obj(x))
                    .map(|(c, y)| c.obj_name(y))
                    .collect();
                format!("({})", parts.join(","))
            }
        }
    }

    pub fn mor_name(&self, m: MorId) -> String {
        match &self.0.kind {
            Kind::Table(t) => t.morphisms[m.ix()].clone(),
            Kind::Product(p) => {
                let parts: Vec<String> = p
                    .factors
                    .iter()
                    .zip(self.split_mor(m))
                    .map(|(c, y)| c.mor_name(y))
                    .collect();
                format!("({})", parts.join(","))
            }
        }
    }

    pub fn obj_by_name(&self, name: &str) -> Option<ObjId> {
        self.0
            .obj_names
            .get_or_init(|| self.objects().map(|x| (self.obj_name(x), x)).collect())
            .get(name)
            .copied()
    }

    pub fn mor_by_name(&self, name: &str) -> Option<MorId> {
        self.0
            .mor_names
            .get_or_init(|| self.morphisms().map(|m| (self.mor_name(m), m)).collect())
            .get(name)
            .copied()
    }

    pub fn hom(&self, x: ObjId, y: ObjId) -> Vec<MorId> {
        self.morphisms()
            .filter(|&m| self.dom(m) == x && self.cod(m) == y)
            .collect()
    }

    /// Two-sided inverse of `m`, if any.
    pub fn inverse(&self, m: MorId) -> Option<MorId> {
        self.0.inverses.get_or_init(|| self.compute_inverses())[m.ix()]
    }

    pub fn is_iso(&self, m: MorId) -> bool {
        self.inverse(m).is_some()
    }

    pub fn is_identity(&self, m: MorId) -> bool {
        self.id(self.dom(m)) == m
    }

    fn compute_inverses(&self) -> Vec<Option<MorId>> {
        match &self.0.kind {
            Kind::Table(t) => (0..t.morphisms.len())
                .map(|i| {
                    let m = MorId(i as u32);
                    let (d, c) = (t.dom[i], t.cod[i]);
                    self.morphisms().find(|&n| {
                        t.dom[n.ix()] == c
                            && t.cod[n.ix()] == d
                            && self.compose_entry(n, m) == Some(t.identity[d.ix()])
                            && self.compose_entry(m, n) == Some(t.identity[c.ix()])
                    })
                })
                .collect(),
            Kind::Product(p) => self
                .morphisms()
                .map(|m| {
                    let mut parts = Vec::with_capacity(p.factors.len());
                    for (c, x) in p.factors.iter().zip(self.split_mor(m)) {
                        parts.push(c.inverse(x)?);
                    }
                    Some(self.join_mor(&parts))
                })
                .collect(),
        }
    }

    /// Copies a product into an explicit table with the same ids and names.
    pub fn materialize(&self, name: &str) -> FinCat {
        let n = self.n_morphisms();
        let mut compose = Vec::new();
        for g in self.morphisms() {
            for f in self.morphisms() {
                if self.cod(f) == self.dom(g) {
                    compose.push((g.0, f.0, self.compose(g, f).0));
                }
            }
        }
        let t = CatTables {
            objects: self.objects().map(|x| self.obj_name(x)).collect(),
            morphisms: (0..n as u32)
                .map(|m| (self.mor_name(MorId(m)), self.dom(MorId(m)).0, self.cod(MorId(m)).0))
                .collect(),
            identity: self.objects().map(|x| self.id(x).0).collect(),
            compose,
        };
        FinCat::from_tables(name, t).expect("materialized tables are in range")
    }

    fn describe(&self, m: MorId) -> String {
        format!(
            "{}: {} -> {}",
            self.mor_name(m),
            self.obj_name(self.dom(m)),
            self.obj_name(self.cod(m))
        )
    }
}

impl fmt::Debug for FinCat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinCat({}; {} objects, {} morphisms)", self.name(), self.n_objects(), self.n_morphisms())
    }
}

/// Checks the category laws on the stored tables.
pub fn validate_category(c: &FinCat) -> Section {
    let mut s = Section::new("category", c.name());
    let n = c.n_morphisms();
    for x in c.objects() {
        let i = c.id(x);
        if c.dom(i) != x || c.cod(i) != x {
            s.fail(Violation::new("identity-type", vec![c.obj_name(x), c.mor_name(i)]));
        }
    }
    for g in c.morphisms() {
        for f in c.morphisms() {
            let composable = c.cod(f) == c.dom(g);
            match (composable, c.compose_entry(g, f)) {
                (false, Some(_)) => {
                    s.fail(Violation::new("composability", vec![c.mor_name(g), c.mor_name(f)]))
                }
                (true, None) => {
                    s.fail(Violation::new("totality", vec![c.mor_name(g), c.mor_name(f)]))
                }
                (true, Some(gf)) => {
                    if c.dom(gf) != c.dom(f) || c.cod(gf) != c.cod(g) {
                        s.fail(Violation::new(
                            "composite-type",
                            vec![c.mor_name(g), c.mor_name(f), c.mor_name(gf)],
                        ));
                    }
                }
                (false, None) => {}
            }
            s.count();
        }
    }
    if !s.passed() {
        return s;
    }
    for f in c.morphisms() {
        if c.compose(c.id(c.cod(f)), f) != f || c.compose(f, c.id(c.dom(f))) != f {
            s.fail(Violation::new("unit", vec![c.mor_name(f)]));
        }
    }
    for f in 0..n as u32 {
        let f = MorId(f);
        for g in c.morphisms().filter(|&g| c.dom(g) == c.cod(f)) {
            let gf = c.compose(g, f);
            for h in c.morphisms().filter(|&h| c.dom(h) == c.cod(g)) {
                s.count();
                if c.compose(h, gf) != c.compose(c.compose(h, g), f) {
                    s.fail(Violation::new(
                        "associativity",
                        vec![c.mor_name(h), c.mor_name(g), c.mor_name(f)],
                    ));
                }
            }
        }
    }
    s
}

struct FunctorInner {
    name: String,
    source: FinCat,
    target: FinCat,
    obj: Vec<ObjId>,
    mor: Vec<MorId>,
}

/// A functor between finite categories, stored as object and morphism tables.
#[derive(Clone)]
pub struct Functor(Arc<FunctorInner>);

impl Functor {
    pub fn new(
        name: &str,
        source: &FinCat,
        target: &FinCat,
        obj: Vec<ObjId>,
        mor: Vec<MorId>,
    ) -> Result<Functor, FincatError> {
        if obj.len() != source.n_objects() || mor.len() != source.n_morphisms() {
            return Err(FincatError::DanglingId {
                context: format!("functor {name}"),
                id: format!("table sizes {}/{}", obj.len(), mor.len()),
            });
        }
        if let Some(x) = obj.iter().find(|x| x.ix() >= target.n_objects()) {
            return Err(FincatError::DanglingId { context: format!("functor {name}"), id: x.0.to_string() });
        }
        if let Some(m) = mor.iter().find(|m| m.ix() >= target.n_morphisms()) {
            return Err(FincatError::DanglingId { context: format!("functor {name}"), id: m.0.to_string() });
        }
        Ok(Functor(Arc::new(FunctorInner {
            name: name.to_string(),
            source: source.clone(),
            target: target.clone(),
            obj,
            mor,
        })))
    }

    pub fn identity(c: &FinCat) -> Functor {
        Functor::new("Id", c, c, c.objects().collect(), c.morphisms().collect())
            .expect("identity tables are in range")
    }

    /// The constant functor at `x`.
    pub fn constant(name: &str, source: &FinCat, target: &FinCat, x: ObjId) -> Functor {
        let i = target.id(x);
        Functor::new(name, source, target, vec![x; source.n_objects()], vec![i; source.n_morphisms()])
            .expect("constant functor tables are in range")
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn renamed(&self, name: &str) -> Functor {
        Functor(Arc::new(FunctorInner {
            name: name.to_string(),
            source: self.0.source.clone(),
            target: self.0.target.clone(),
            obj: self.0.obj.clone(),
            mor: self.0.mor.clone(),
        }))
    }

    pub fn source(&self) -> &FinCat {
        &self.0.source
    }

    pub fn target(&self) -> &FinCat {
        &self.0.target
    }

    pub fn obj(&self, x: ObjId) -> ObjId {
        self.0.obj[x.ix()]
    }

    pub fn mor(&self, m: MorId) -> MorId {
        self.0.mor[m.ix()]
    }

    pub fn obj_table(&self) -> &[ObjId] {
        &self.0.obj
    }

    pub fn mor_table(&self) -> &[MorId] {
        &self.0.mor
    }

    pub fn is_identity(&self) -> bool {
        self.source().same(self.target())
            && self.0.obj.iter().enumerate().all(|(i, x)| x.ix() == i)
            && self.0.mor.iter().enumerate().all(|(i, m)| m.ix() == i)
    }

    pub fn same(&self, other: &Functor) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.source().same(other.source())
                && self.target().same(other.target())
                && self.0.obj == other.0.obj
                && self.0.mor == other.0.mor)
    }

    /// `g ∘ f`, applying `f` first.
    pub fn try_compose(g: &Functor, f: &Functor) -> Result<Functor, FincatError> {
        if !f.target().same(g.source()) {
            return Err(FincatError::BoundaryMismatch(format!(
                "cannot compose {} after {}: {} vs {}",
                g.name(),
                f.name(),
                f.target().name(),
                g.source().name()
            )));
        }
        if f.is_identity() {
            return Ok(g.clone());
        }
        if g.is_identity() {
            return Ok(f.clone());
        }
        let obj = f.0.obj.iter().map(|&x| g.obj(x)).collect();
        let mor = f.0.mor.iter().map(|&m| g.mor(m)).collect();
        Ok(Functor(Arc::new(FunctorInner {
            name: format!("{}{}", g.name(), f.name()),
            source: f.source().clone(),
            target: g.target().clone(),
            obj,
            mor,
        })))
    }

    pub fn compose(g: &Functor, f: &Functor) -> Functor {
        Functor::try_compose(g, f).unwrap_or_else(|e| panic!("{e}"))
    }

    /// Composite of a chain listed in application order.
    pub fn chain(fs: &[&Functor]) -> Functor {
        let mut acc = fs[0].clone();
        for g in &fs[1..] {
            acc = Functor::compose(g, &acc);
        }
        acc
    }

    /// The product functor `F1 × … × Fn` between product categories.
    pub fn product(fs: &[&Functor]) -> Functor {
        let source = FinCat::product(&fs.iter().map(|f| f.source().clone()).collect::<Vec<_>>());
        let target = FinCat::product(&fs.iter().map(|f| f.target().clone()).collect::<Vec<_>>());
        let spans = |c: &FinCat| c.factors().map_or(1, |x| x.len());
        let widths: Vec<usize> = fs.iter().map(|f| spans(f.source())).collect();
        let obj = source
            .objects()
            .map(|x| {
                let parts = source.split_obj(x);
                let mut out = Vec::new();
                let mut k = 0;
                for (f, w) in fs.iter().zip(&widths) {
                    let sub = f.source().join_obj(&parts[k..k + w]);
                    out.extend(f.target().split_obj(f.obj(sub)));
                    k += w;
                }
                target.join_obj(&out)
            })
            .collect();
        let mor = source
            .morphisms()
            .map(|m| {
                let parts = source.split_mor(m);
                let mut out = Vec::new();
                let mut k = 0;
                for (f, w) in fs.iter().zip(&widths) {
                    let sub = f.source().join_mor(&parts[k..k + w]);
                    out.extend(f.target().split_mor(f.mor(sub)));
                    k += w;
                }
                target.join_mor(&out)
            })
            .collect();
        let name = format!("({})", fs.iter().map(|f| f.name()).collect::<Vec<_>>().join("x"));
        Functor(Arc::new(FunctorInner { name, source, target, obj, mor }))
    }

    /// The symmetry `C1 × C2 → C2 × C1` of a binary product.
    pub fn swap(c1: &FinCat, c2: &FinCat) -> Functor {
        let source = FinCat::product(&[c1.clone(), c2.clone()]);
        let target = FinCat::product(&[c2.clone(), c1.clone()]);
        let w1 = c1.factors().map_or(1, |x| x.len());
        let obj = source
            .objects()
            .map(|x| {
                let p = source.split_obj(x);
                let mut q = p[w1..].to_vec();
                q.extend_from_slice(&p[..w1]);
                target.join_obj(&q)
            })
            .collect();
        let mor = source
            .morphisms()
            .map(|m| {
                let p = source.split_mor(m);
                let mut q = p[w1..].to_vec();
                q.extend_from_slice(&p[..w1]);
                target.join_mor(&q)
            })
            .collect();
        Functor(Arc::new(FunctorInner { name: "swap".into(), source, target, obj, mor }))
    }
}

impl fmt::Debug for Functor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Functor({}: {} -> {})", self.name(), self.source().name(), self.target().name())
    }
}

/// Checks the functor laws; both categories are validated first.
pub fn validate_functor(f: &Functor) -> Result<Section, FincatError> {
    if !validate_category(f.source()).passed() || !validate_category(f.target()).passed() {
        return Err(FincatError::SourceInvalid { functor: f.name().to_string() });
    }
    Ok(functor_laws(f))
}

/// Functor laws without re-validating the categories.
pub fn functor_laws(f: &Functor) -> Section {
    let (c, d) = (f.source(), f.target());
    let mut s = Section::new("functor", f.name());
    for m in c.morphisms() {
        s.count();
        let fm = f.mor(m);
        if d.dom(fm) != f.obj(c.dom(m)) || d.cod(fm) != f.obj(c.cod(m)) {
            s.fail(Violation::new("dom-cod", vec![c.mor_name(m), d.mor_name(fm)]));
        }
    }
    for x in c.objects() {
        s.count();
        if f.mor(c.id(x)) != d.id(f.obj(x)) {
            s.fail(Violation::new("identity", vec![c.obj_name(x)]));
        }
    }
    if !s.passed() {
        return s;
    }
    for g in c.morphisms() {
        for h in c.morphisms().filter(|&h| c.cod(h) == c.dom(g)) {
            s.count();
            if f.mor(c.compose(g, h)) != d.compose(f.mor(g), f.mor(h)) {
                s.fail(Violation::new("composition", vec![c.mor_name(g), c.mor_name(h)]));
            }
        }
    }
    s
}

struct NatInner {
    source: Functor,
    target: Functor,
    comps: Vec<MorId>,
}

/// A natural transformation `source ⇒ target`, one component per object.
#[derive(Clone)]
pub struct NatTrans(Arc<NatInner>);

impl NatTrans {
    pub fn new(source: &Functor, target: &Functor, comps: Vec<MorId>) -> Result<NatTrans, FincatError> {
        if !source.source().same(target.source()) || !source.target().same(target.target()) {
            return Err(FincatError::BoundaryMismatch(format!(
                "{} and {} do not share source and target",
                source.name(),
                target.name()
            )));
        }
        let c = source.source();
        let d = source.target();
        if comps.len() != c.n_objects() {
            return Err(FincatError::DanglingId {
                context: format!("transformation {} => {}", source.name(), target.name()),
                id: format!("{} components for {} objects", comps.len(), c.n_objects()),
            });
        }
        for x in c.objects() {
            let m = comps[x.ix()];
            if m.ix() >= d.n_morphisms() {
                return Err(FincatError::DanglingId {
                    context: format!("component at {}", c.obj_name(x)),
                    id: m.0.to_string(),
                });
            }
            if d.dom(m) != source.obj(x) || d.cod(m) != target.obj(x) {
                return Err(FincatError::ComponentType {
                    object: c.obj_name(x),
                    morphism: d.describe(m),
                    expected: format!("{} -> {}", d.obj_name(source.obj(x)), d.obj_name(target.obj(x))),
                });
            }
        }
        Ok(NatTrans(Arc::new(NatInner { source: source.clone(), target: target.clone(), comps })))
    }

    pub fn identity(f: &Functor) -> NatTrans {
        let d = f.target();
        let comps = f.source().objects().map(|x| d.id(f.obj(x))).collect();
        NatTrans(Arc::new(NatInner { source: f.clone(), target: f.clone(), comps }))
    }

    pub fn source(&self) -> &Functor {
        &self.0.source
    }

    pub fn target(&self) -> &Functor {
        &self.0.target
    }

    pub fn domain(&self) -> &FinCat {
        self.0.source.source()
    }

    pub fn codomain(&self) -> &FinCat {
        self.0.source.target()
    }

    pub fn at(&self, x: ObjId) -> MorId {
        self.0.comps[x.ix()]
    }

    pub fn components(&self) -> &[MorId] {
        &self.0.comps
    }

    pub fn is_identity(&self) -> bool {
        let d = self.codomain();
        self.0.comps.iter().all(|&m| d.is_identity(m))
    }

    /// Componentwise table equality, including boundaries.
    pub fn same(&self, other: &NatTrans) -> bool {
        self.0.source.same(&other.0.source) && self.0.target.same(&other.0.target) && self.0.comps == other.0.comps
    }

    /// First object where the components differ.
    pub fn first_difference(&self, other: &NatTrans) -> Option<ObjId> {
        self.domain().objects().find(|&x| self.at(x) != other.at(x))
    }

    /// `β · α`, applying `α` first.
    pub fn try_vcomp(beta: &NatTrans, alpha: &NatTrans) -> Result<NatTrans, FincatError> {
        if !alpha.target().same(beta.source()) {
            return Err(FincatError::BoundaryMismatch(format!(
                "{} does not end where {} starts",
                alpha.target().name(),
                beta.source().name()
            )));
        }
        let d = alpha.codomain();
        let comps = alpha
            .domain()
            .objects()
            .map(|x| d.compose(beta.at(x), alpha.at(x)))
            .collect();
        Ok(NatTrans(Arc::new(NatInner {
            source: alpha.source().clone(),
            target: beta.target().clone(),
            comps,
        })))
    }

    pub fn vcomp(beta: &NatTrans, alpha: &NatTrans) -> NatTrans {
        NatTrans::try_vcomp(beta, alpha).unwrap_or_else(|e| panic!("{e}"))
    }

    /// `L ∘ α`, components `L(α_X)`.
    pub fn try_left(l: &Functor, alpha: &NatTrans) -> Result<NatTrans, FincatError> {
        let source = Functor::try_compose(l, alpha.source())?;
        let target = Functor::try_compose(l, alpha.target())?;
        let comps = alpha.0.comps.iter().map(|&m| l.mor(m)).collect();
        Ok(NatTrans(Arc::new(NatInner { source, target, comps })))
    }

    pub fn left(l: &Functor, alpha: &NatTrans) -> NatTrans {
        NatTrans::try_left(l, alpha).unwrap_or_else(|e| panic!("{e}"))
    }

    /// `α ∘ R`, components `α_{R(X)}`.
    pub fn try_right(alpha: &NatTrans, r: &Functor) -> Result<NatTrans, FincatError> {
        let source = Functor::try_compose(alpha.source(), r)?;
        let target = Functor::try_compose(alpha.target(), r)?;
        let comps = r.obj_table().iter().map(|&x| alpha.at(x)).collect();
        Ok(NatTrans(Arc::new(NatInner { source, target, comps })))
    }

    pub fn right(alpha: &NatTrans, r: &Functor) -> NatTrans {
        NatTrans::try_right(alpha, r).unwrap_or_else(|e| panic!("{e}"))
    }

    /// `α1 × … × αn` between product functors.
    pub fn product(ts: &[&NatTrans]) -> NatTrans {
        let source = Functor::product(&ts.iter().map(|t| t.source()).collect::<Vec<_>>());
        let target = Functor::product(&ts.iter().map(|t| t.target()).collect::<Vec<_>>());
        let c = source.source().clone();
        let d = source.target().clone();
        let widths: Vec<usize> = ts.iter().map(|t| t.domain().factors().map_or(1, |x| x.len())).collect();
        let comps = c
            .objects()
            .map(|x| {
                let parts = c.split_obj(x);
                let mut out = Vec::new();
                let mut k = 0;
                for (t, w) in ts.iter().zip(&widths) {
                    let sub = t.domain().join_obj(&parts[k..k + w]);
                    out.extend(t.codomain().split_mor(t.at(sub)));
                    k += w;
                }
                d.join_mor(&out)
            })
            .collect();
        NatTrans(Arc::new(NatInner { source, target, comps }))
    }
}

impl fmt::Debug for NatTrans {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.codomain();
        let comps: Vec<String> = self.0.comps.iter().map(|&m| d.mor_name(m)).collect();
        write!(f, "{} => {} [{}]", self.source().name(), self.target().name(), comps.join(", "))
    }
}

/// Checks every naturality square of `t`.
pub fn validate_nat_trans(t: &NatTrans) -> Section {
    let (c, d) = (t.domain(), t.codomain());
    let mut s = Section::new("naturality", &format!("{} => {}", t.source().name(), t.target().name()));
    for m in c.morphisms() {
        s.count();
        let lhs = d.compose(t.target().mor(m), t.at(c.dom(m)));
        let rhs = d.compose(t.at(c.cod(m)), t.source().mor(m));
        if lhs != rhs {
            s.fail(Violation::new("naturality", vec![c.mor_name(m)]).with_detail(format!(
                "{} vs {}",
                d.mor_name(lhs),
                d.mor_name(rhs)
            )));
        }
    }
    s
}

/// Componentwise inverse of a natural isomorphism.
pub fn invert_nat_iso(t: &NatTrans) -> Result<NatTrans, FincatError> {
    let d = t.codomain();
    let mut comps = Vec::with_capacity(t.components().len());
    for x in t.domain().objects() {
        match d.inverse(t.at(x)) {
            Some(i) => comps.push(i),
            None => {
                return Err(FincatError::NotIso {
                    object: t.domain().obj_name(x),
                    morphism: d.mor_name(t.at(x)),
                })
            }
        }
    }
    Ok(NatTrans(Arc::new(NatInner { source: t.target().clone(), target: t.source().clone(), comps })))
}

/// Objects at which `t` fails to be invertible.
pub fn non_invertible_objects(t: &NatTrans) -> Vec<ObjId> {
    let d = t.codomain();
    t.domain().objects().filter(|&x| !d.is_iso(t.at(x))).collect()
}

/// One formal step of a pasting composite.
#[derive(Clone, Debug)]
pub enum Cell {
    Atom { label: String, trans: NatTrans },
    Inverse(Box<Cell>),
    Identity(Functor),
    /// `L ∘ cell`.
    Left(Functor, Box<Cell>),
    /// `cell ∘ R`.
    Right(Box<Cell>, Functor),
    Product(Vec<Cell>),
    /// Vertical composite, first element applied first.
    Seq(Vec<Cell>),
}

impl Cell {
    pub fn atom(label: impl Into<String>, trans: &NatTrans) -> Cell {
        Cell::Atom { label: label.into(), trans: trans.clone() }
    }

    pub fn inv(self) -> Cell {
        Cell::Inverse(Box::new(self))
    }

    pub fn left(self, l: &Functor) -> Cell {
        if l.is_identity() {
            return self;
        }
        Cell::Left(l.clone(), Box::new(self))
    }

    pub fn right(self, r: &Functor) -> Cell {
        if r.is_identity() {
            return self;
        }
        Cell::Right(Box::new(self), r.clone())
    }

    pub fn label(&self) -> String {
        match self {
            Cell::Atom { label, .. } => label.clone(),
            Cell::Inverse(c) => format!("{}^-1", c.label()),
            Cell::Identity(f) => format!("id[{}]", f.name()),
            Cell::Left(l, c) => format!("{}({})", l.name(), c.label()),
            Cell::Right(c, r) => format!("({}){}", c.label(), r.name()),
            Cell::Product(cs) => {
                format!("({})", cs.iter().map(|c| c.label()).collect::<Vec<_>>().join(" x "))
            }
            Cell::Seq(cs) => cs.iter().map(|c| c.label()).collect::<Vec<_>>().join(" ; "),
        }
    }

    pub fn eval(&self) -> Result<NatTrans, FincatError> {
        match self {
            Cell::Atom { trans, .. } => Ok(trans.clone()),
            Cell::Inverse(c) => invert_nat_iso(&c.eval()?),
            Cell::Identity(f) => Ok(NatTrans::identity(f)),
            Cell::Left(l, c) => NatTrans::try_left(l, &c.eval()?),
            Cell::Right(c, r) => NatTrans::try_right(&c.eval()?, r),
            Cell::Product(cs) => {
                let ts = cs.iter().map(|c| c.eval()).collect::<Result<Vec<_>, _>>()?;
                Ok(NatTrans::product(&ts.iter().collect::<Vec<_>>()))
            }
            Cell::Seq(cs) => {
                let mut it = cs.iter();
                let mut acc = it
                    .next()
                    .ok_or_else(|| FincatError::TypeError { step: 0, detail: "empty sequence".into() })?
                    .eval()?;
                for c in it {
                    acc = NatTrans::try_vcomp(&c.eval()?, &acc)?;
                }
                Ok(acc)
            }
        }
    }
}

/// A vertical chain of cells with a declared boundary.
#[derive(Clone, Debug)]
pub struct PastingTerm {
    pub source: Functor,
    pub target: Functor,
    pub steps: Vec<Cell>,
}

impl PastingTerm {
    pub fn new(source: &Functor, target: &Functor) -> PastingTerm {
        PastingTerm { source: source.clone(), target: target.clone(), steps: Vec::new() }
    }

    pub fn then(mut self, c: Cell) -> PastingTerm {
        self.steps.push(c);
        self
    }

    /// Concatenation, `self` first.
    pub fn append(mut self, other: PastingTerm) -> PastingTerm {
        self.target = other.target;
        self.steps.extend(other.steps);
        self
    }
}

/// Evaluates every step and returns the per-step transformations.
pub fn evaluate_steps(term: &PastingTerm) -> Result<Vec<NatTrans>, FincatError> {
    let mut current = term.source.clone();
    let mut out = Vec::with_capacity(term.steps.len());
    for (i, c) in term.steps.iter().enumerate() {
        let t = c.eval().map_err(|e| FincatError::TypeError { step: i, detail: format!("{}: {e}", c.label()) })?;
        if !t.source().same(&current) {
            return Err(FincatError::TypeError {
                step: i,
                detail: format!("{} starts at {}, previous step ends at {}", c.label(), t.source().name(), current.name()),
            });
        }
        current = t.target().clone();
        out.push(t);
    }
    if !current.same(&term.target) {
        return Err(FincatError::TypeError {
            step: term.steps.len(),
            detail: format!("term ends at {}, declared {}", current.name(), term.target.name()),
        });
    }
    Ok(out)
}

/// Evaluates a pasting term to a transformation between its declared boundary.
pub fn evaluate_pasting(term: &PastingTerm) -> Result<NatTrans, FincatError> {
    let steps = evaluate_steps(term)?;
    let mut acc = NatTrans::identity(&term.source);
    for t in &steps {
        acc = NatTrans::vcomp(t, &acc);
    }
    // keep the declared boundary functors (names included)
    Ok(NatTrans(Arc::new(NatInner {
        source: term.source.clone(),
        target: term.target.clone(),
        comps: acc.0.comps.clone(),
    })))
}

/// Per-step component chain of an evaluated term at one object.
pub fn trace_at(term: &PastingTerm, steps: &[NatTrans], x: ObjId) -> Vec<String> {
    let d = term.source.target();
    term.steps
        .iter()
        .zip(steps)
        .map(|(c, t)| format!("{} = {}", c.label(), d.describe(t.at(x))))
        .collect()
}
