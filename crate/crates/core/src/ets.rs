//! External tensor structures: boxes `H(S1) × H(S2) → H(S1 × S2)` with
//! monoidality isomorphisms, their skeleta and cores, associativity and
//! commutativity constraints, and tensor compatibility of morphisms.
//!
//! As in [`crate::fibered`], everything is written for either variance. The
//! monoidality cell of a pair `(f1, f2)` always has the shape
//! `⊠_{tgt} ∘ (F_f1 × F_f2) ⇒ F_{f1×f2} ∘ ⊠_{src}`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::adjoint::{closed_exchange_path, derive_opposite_conn, AdjointAssignment, AdjointError, Side};
use crate::base::{fact_category, BaseCat, Scope, Square};
use crate::diagram;
use crate::fibered::{check_mor_axioms, FibMorphism, FiberedCat, Variance};
use crate::fincat::{functor_laws, invert_nat_iso, non_invertible_objects, Cell, FinCat, FincatError, Functor, MorId, NatTrans, ObjId};
use crate::report::{Report, Section, Violation};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EtsError {
    #[error("{0} has no chosen products")]
    NoProducts(String),
    #[error("box at ({0}, {1}) missing or mistyped")]
    BadBox(String, String),
    #[error("monoidality cell for ({0}, {1}) has the wrong boundary")]
    BadCell(String, String),
    #[error("no monoidality cell for ({0}, {1}) and the identity does not type-check")]
    MissingCell(String, String),
    #[error("product {0} lies outside the marked class")]
    ProductOutOfScope(String),
    #[error("factorizations {first} and {second} of ({f1}, {f2}) give different cells")]
    IndependenceFailure { f1: String, f2: String, first: String, second: String },
    #[error("({0}, {1}) has no factorization")]
    NoFactorization(String, String),
    #[error("extended cells fail the monoidality square at {0:?}")]
    CompositionFailure(Vec<String>),
    #[error("{what} is not invertible at {object}")]
    NotInvertible { what: String, object: String },
    #[error("constraint at {0} has the wrong boundary")]
    BadConstraint(String),
    #[error(transparent)]
    Adjoint(#[from] AdjointError),
    #[error(transparent)]
    Fincat(#[from] FincatError),
}

/// One box functor per ordered pair of base objects.
#[derive(Clone, Debug)]
pub struct Boxes {
    pub base: Arc<BaseCat>,
    map: HashMap<(ObjId, ObjId), Functor>,
}

impl Boxes {
    pub fn new(base: Arc<BaseCat>, fibers: &[FinCat], map: HashMap<(ObjId, ObjId), Functor>) -> Result<Boxes, EtsError> {
        if !base.has_products() {
            return Err(EtsError::NoProducts(base.cat.name().into()));
        }
        for s1 in base.cat.objects() {
            for s2 in base.cat.objects() {
                let bad = || EtsError::BadBox(base.oname(s1), base.oname(s2));
                let f = map.get(&(s1, s2)).ok_or_else(bad)?;
                let dom = FinCat::product(&[fibers[s1.ix()].clone(), fibers[s2.ix()].clone()]);
                if !f.source().same(&dom) || !f.target().same(&fibers[base.product_obj(s1, s2).ix()]) {
                    return Err(bad());
                }
            }
        }
        Ok(Boxes { base, map })
    }

    pub fn at(&self, s1: ObjId, s2: ObjId) -> &Functor {
        &self.map[&(s1, s2)]
    }

    pub fn check(&self) -> Section {
        let b = &self.base;
        let mut s = Section::new("box-functor", b.cat.name());
        for s1 in b.cat.objects() {
            for s2 in b.cat.objects() {
                s.count();
                let laws = functor_laws(self.at(s1, s2));
                if let Some(v) = laws.violations.first() {
                    s.fail(Violation::new("bifunctor", vec![b.oname(s1), b.oname(s2)]).with_detail(format!(
                        "{} at [{}]",
                        v.law,
                        v.witness.join(", ")
                    )));
                }
            }
        }
        s
    }
}

/// Monoidality cells over a fibered structure.
#[derive(Clone, Debug)]
pub struct EtsData {
    pub name: String,
    pub host: Arc<FiberedCat>,
    pub boxes: Arc<Boxes>,
    cells: HashMap<(MorId, MorId), NatTrans>,
}

/// `(⊠_{tgt} ∘ (F_f1 × F_f2), F_{f1×f2} ∘ ⊠_{src})`.
pub fn m_boundary(h: &FiberedCat, boxes: &Boxes, f1: MorId, f2: MorId) -> (Functor, Functor) {
    let f12 = h.base.times(f1, f2);
    (
        Functor::compose(boxes.at(h.tgt(f1), h.tgt(f2)), &Functor::product(&[h.functor(f1), h.functor(f2)])),
        Functor::compose(h.functor(f12), boxes.at(h.src(f1), h.src(f2))),
    )
}

impl EtsData {
    /// Missing cells default to identities where they type-check.
    pub fn new(
        name: &str,
        host: Arc<FiberedCat>,
        boxes: Arc<Boxes>,
        mut given: HashMap<(MorId, MorId), NatTrans>,
    ) -> Result<EtsData, EtsError> {
        let mut e = EtsData { name: name.to_string(), host, boxes, cells: HashMap::new() };
        let b = e.host.base.clone();
        for (f1, f2) in e.pairs() {
            let f12 = b.times(f1, f2);
            if !e.host.in_scope(f12) {
                return Err(EtsError::ProductOutOfScope(b.name(f12)));
            }
            let (src, tgt) = e.boundary(f1, f2);
            match given.remove(&(f1, f2)) {
                Some(t) => {
                    if !t.source().same(&src) || !t.target().same(&tgt) {
                        return Err(EtsError::BadCell(b.name(f1), b.name(f2)));
                    }
                    e.cells.insert((f1, f2), t);
                }
                None => {
                    if !src.same(&tgt) {
                        return Err(EtsError::MissingCell(b.name(f1), b.name(f2)));
                    }
                    e.cells.insert((f1, f2), NatTrans::identity(&src));
                }
            }
        }
        Ok(e)
    }

    pub fn base(&self) -> &Arc<BaseCat> {
        &self.host.base
    }

    /// Every pair of marked morphisms.
    pub fn pairs(&self) -> Vec<(MorId, MorId)> {
        let ms = self.host.scoped();
        ms.iter().flat_map(|&a| ms.iter().map(move |&b| (a, b))).collect()
    }

    pub fn boxed(&self, s1: ObjId, s2: ObjId) -> &Functor {
        self.boxes.at(s1, s2)
    }

    pub fn boundary(&self, f1: MorId, f2: MorId) -> (Functor, Functor) {
        m_boundary(&self.host, &self.boxes, f1, f2)
    }

    pub fn cell(&self, f1: MorId, f2: MorId) -> &NatTrans {
        match self.cells.get(&(f1, f2)) {
            Some(t) => t,
            None => panic!("{}: no cell for ({}, {})", self.name, self.base().name(f1), self.base().name(f2)),
        }
    }

    pub fn try_cell(&self, f1: MorId, f2: MorId) -> Option<&NatTrans> {
        self.cells.get(&(f1, f2))
    }

    pub fn m_cell(&self, f1: MorId, f2: MorId) -> Cell {
        let b = self.base();
        Cell::atom(format!("{}.m[{},{}]", self.name, b.name(f1), b.name(f2)), self.cell(f1, f2))
    }

    pub fn cells(&self) -> &HashMap<(MorId, MorId), NatTrans> {
        &self.cells
    }

    pub fn restrict(&self, scope: Scope) -> EtsData {
        let host = Arc::new(self.host.restrict(scope));
        let cells = self
            .cells
            .iter()
            .filter(|((a, b), _)| host.in_scope(*a) && host.in_scope(*b))
            .map(|(k, v)| (*k, v.clone()))
            .collect();
        EtsData { name: self.name.clone(), host, boxes: self.boxes.clone(), cells }
    }

    fn id_fiber(&self, x: ObjId) -> Functor {
        Functor::identity(self.host.fiber(x))
    }
}

fn pair_witness(b: &BaseCat, ms: &[MorId]) -> Vec<String> {
    ms.iter().map(|&m| b.name(m)).collect()
}

/// Box functoriality, invertibility of the cells and the monoidality square.
pub fn check_mets(e: &EtsData) -> Report {
    let mut r = Report::new(&format!("ets {}", e.name));
    let h = &*e.host;
    let b = e.base();
    r.push(e.boxes.check());
    let mut wf = Section::new("monoidality-iso", &e.name);
    let mut pairs = e.pairs();
    pairs.sort();
    for &(f1, f2) in &pairs {
        diagram::wellformed(&mut wf, &format!("({},{})", b.name(f1), b.name(f2)), e.cell(f1, f2), true);
    }
    r.push(wf);

    let hp = h.pairs();
    let quads: Vec<((MorId, MorId), (MorId, MorId))> =
        hp.iter().flat_map(|&p1| hp.iter().map(move |&p2| (p1, p2))).collect();
    let mut sq = Section::new("monoidality-square", &e.name);
    diagram::run(&mut sq, &quads, |&((a1, b1), (a2, b2))| {
        let (c1, c2) = (h.composite(a1, b1), h.composite(a2, b2));
        let (first12, second12) = (b.times(a1, a2), b.times(b1, b2));
        let lhs = [
            e.m_cell(c1, c2),
            h.comparison_cell(first12, second12).right(e.boxed(h.src(a1), h.src(a2))),
        ];
        let rhs = [
            Cell::Product(vec![h.comparison_cell(a1, b1), h.comparison_cell(a2, b2)])
                .left(e.boxed(h.tgt(b1), h.tgt(b2))),
            e.m_cell(b1, b2).right(&Functor::product(&[h.functor(a1), h.functor(a2)])),
            e.m_cell(a1, a2).left(h.functor(second12)),
        ];
        diagram::compare("monoidality-square", pair_witness(b, &[a1, b1, a2, b2]), &lhs, &rhs)
    });
    r.push(sq);
    r
}

/// Monoidality cells along smooth pairs and along closed pairs, sharing one box.
#[derive(Clone, Debug)]
pub struct EtsSkeleton {
    pub name: String,
    pub host: Arc<FiberedCat>,
    pub sm: EtsData,
    pub cl: EtsData,
}

impl EtsSkeleton {
    pub fn new(
        name: &str,
        host: Arc<FiberedCat>,
        boxes: Arc<Boxes>,
        m_sm: HashMap<(MorId, MorId), NatTrans>,
        m_cl: HashMap<(MorId, MorId), NatTrans>,
    ) -> Result<EtsSkeleton, EtsError> {
        let sm = EtsData::new(name, Arc::new(host.restrict(Scope::Smooth)), boxes.clone(), m_sm)?;
        let cl = EtsData::new(name, Arc::new(host.restrict(Scope::Closed)), boxes, m_cl)?;
        Ok(EtsSkeleton { name: name.to_string(), host, sm, cl })
    }

    pub fn boxes(&self) -> &Arc<Boxes> {
        &self.sm.boxes
    }
}

fn prefixed(r: Report, prefix: &str) -> Vec<Section> {
    r.sections
        .into_iter()
        .map(|mut s| {
            s.condition = format!("{prefix}{}", s.condition);
            s
        })
        .collect()
}

fn square_witness(b: &BaseCat, s1: &Square, s2: &Square) -> Vec<String> {
    [s1.top, s1.left, s1.right, s1.bottom, s2.top, s2.left, s2.right, s2.bottom].iter().map(|&m| b.name(m)).collect()
}

fn product_square(b: &BaseCat, s1: &Square, s2: &Square) -> Square {
    Square {
        top: b.times(s1.top, s2.top),
        left: b.times(s1.left, s2.left),
        right: b.times(s1.right, s2.right),
        bottom: b.times(s1.bottom, s2.bottom),
    }
}

/// Exchange for a pair of mixed squares: `⊠_Q(q^*z^* × q^*z^*) ⇒ q12^* z12^* ⊠_S` both ways round.
fn pair_exchange_paths(
    h: &FiberedCat,
    boxes: &Boxes,
    sm: &dyn Fn(MorId, MorId) -> Cell,
    cl: &dyn Fn(MorId, MorId) -> Cell,
    s1: &Square,
    s2: &Square,
) -> (Vec<Cell>, Vec<Cell>) {
    let b = &h.base;
    let sq = product_square(b, s1, s2);
    let bq = boxes.at(b.dom(s1.left), b.dom(s2.left));
    let bs = boxes.at(b.cod(s1.right), b.cod(s2.right));
    let zz = Functor::product(&[h.functor(s1.bottom), h.functor(s2.bottom)]);
    let pp = Functor::product(&[h.functor(s1.right), h.functor(s2.right)]);
    let path1 = vec![sm(s1.left, s2.left).right(&zz), cl(s1.bottom, s2.bottom).left(h.functor(sq.left))];
    let ident = |s: &Square| Cell::Seq(vec![h.conn_cell(s.left, s.bottom).inv(), h.conn_cell(s.top, s.right)]);
    let path2 = vec![
        Cell::Product(vec![ident(s1), ident(s2)]).left(bq),
        cl(s1.top, s2.top).right(&pp),
        sm(s1.right, s2.right).left(h.functor(sq.top)),
        Cell::Seq(vec![h.conn_cell(sq.top, sq.right).inv(), h.conn_cell(sq.left, sq.bottom)]).right(bs),
    ];
    (path1, path2)
}

fn pair_exchange_section(
    condition: &str,
    name: &str,
    h: &FiberedCat,
    boxes: &Boxes,
    sm: &(dyn Fn(MorId, MorId) -> Cell + Sync),
    cl: &(dyn Fn(MorId, MorId) -> Cell + Sync),
    squares: &[Square],
) -> Section {
    let pairs: Vec<(Square, Square)> = squares.iter().flat_map(|&a| squares.iter().map(move |&b| (a, b))).collect();
    let mut sec = Section::new(condition, name);
    diagram::run(&mut sec, &pairs, |(s1, s2)| {
        let (a, b) = pair_exchange_paths(h, boxes, sm, cl, s1, s2);
        diagram::compare(condition, square_witness(&h.base, s1, s2), &a, &b)
    });
    sec
}

fn ets_coincide(s: &EtsSkeleton) -> Section {
    let b = s.host.base.clone();
    let mut sec = Section::new("smooth-closed-coincide", &s.name);
    let both: Vec<MorId> = b.cat.morphisms().filter(|&f| b.is_smooth(f) && b.is_closed(f)).collect();
    for &f1 in &both {
        for &f2 in &both {
            sec.count();
            if !s.sm.cell(f1, f2).same(s.cl.cell(f1, f2)) {
                sec.fail(Violation::new("coincide", vec![b.name(f1), b.name(f2)]));
            }
        }
    }
    sec
}

fn skeleton_head(s: &EtsSkeleton, r: &mut Report) {
    for sec in prefixed(check_mets(&s.sm), "smooth-").into_iter().chain(prefixed(check_mets(&s.cl), "closed-")) {
        r.push(sec);
    }
    let mut shared = Section::new("box-shared", &s.name);
    shared.count();
    r.push(shared.note("one box family serves both classes"));
}

pub fn check_ets_skeleton(s: &EtsSkeleton) -> Report {
    let mut r = Report::new(&format!("ets-skeleton {}", s.name));
    skeleton_head(s, &mut r);
    let sm = |a: MorId, b: MorId| s.sm.m_cell(a, b);
    let cl = |a: MorId, b: MorId| s.cl.m_cell(a, b);
    r.push(pair_exchange_section("pair-exchange", &s.name, &s.host, s.boxes(), &sm, &cl, &s.host.base.mixed_squares()));
    r.push(ets_coincide(s));
    r
}

pub fn check_ets_ct(s: &EtsSkeleton) -> Report {
    let mut r = Report::new(&format!("ets-skeleton-ct {}", s.name));
    skeleton_head(s, &mut r);
    let sm = |a: MorId, b: MorId| s.sm.m_cell(a, b);
    let cl = |a: MorId, b: MorId| s.cl.m_cell(a, b);
    let b = &s.host.base;
    r.push(pair_exchange_section("cartesian-pair-exchange", &s.name, &s.host, s.boxes(), &sm, &cl, &b.cartesian_mixed_squares()));
    r.push(pair_exchange_section("triangle-pair-exchange", &s.name, &s.host, s.boxes(), &sm, &cl, &b.triangles()));
    r
}

/// `m_{f1,f2}` through factorizations `f_i = p_i ∘ t_i`.
fn through_factorizations(s: &EtsSkeleton, t1: MorId, p1: MorId, t2: MorId, p2: MorId) -> Result<NatTrans, EtsError> {
    let h = &*s.host;
    let b = &h.base;
    let (t12, p12) = (b.times(t1, t2), b.times(p1, p2));
    let cells = [
        Cell::Product(vec![h.conn_cell(t1, p1), h.conn_cell(t2, p2)]).left(s.boxes().at(b.dom(t1), b.dom(t2))),
        s.cl.m_cell(t1, t2).right(&Functor::product(&[h.functor(p1), h.functor(p2)])),
        s.sm.m_cell(p1, p2).left(h.functor(t12)),
        h.conn_cell(t12, p12).inv().right(s.boxes().at(b.cod(p1), b.cod(p2))),
    ];
    diagram::eval(&cells).map_err(|e| EtsError::Adjoint(AdjointError::PastingTypeError(e.to_string())))
}

fn all_pairs(b: &BaseCat) -> Vec<(MorId, MorId)> {
    let ms: Vec<MorId> = b.cat.morphisms().collect();
    ms.iter().flat_map(|&a| ms.iter().map(move |&c| (a, c))).collect()
}

fn extend_pair(s: &EtsSkeleton, f1: MorId, f2: MorId) -> Result<NatTrans, EtsError> {
    let b = &s.host.base;
    let (fc1, fc2) = (fact_category(b, f1), fact_category(b, f2));
    let name = |o: &crate::base::FactObject| format!("{} then {}", b.name(o.closed_part), b.name(o.smooth_part));
    let (Some(o1), Some(o2)) = (fc1.objects.first(), fc2.objects.first()) else {
        return Err(EtsError::NoFactorization(b.name(f1), b.name(f2)));
    };
    let first = through_factorizations(s, o1.closed_part, o1.smooth_part, o2.closed_part, o2.smooth_part)?;
    for x in &fc1.objects {
        for y in &fc2.objects {
            let t = through_factorizations(s, x.closed_part, x.smooth_part, y.closed_part, y.smooth_part)?;
            if !t.same(&first) {
                return Err(EtsError::IndependenceFailure {
                    f1: b.name(f1),
                    f2: b.name(f2),
                    first: format!("{} / {}", name(o1), name(o2)),
                    second: format!("{} / {}", name(x), name(y)),
                });
            }
        }
    }
    Ok(first)
}

/// Extends the skeleton cells to every pair of base morphisms.
pub fn extend_ets_skeleton(s: &EtsSkeleton) -> Result<EtsData, EtsError> {
    let pairs = all_pairs(&s.host.base);
    let per: Vec<Result<NatTrans, EtsError>> = pairs.par_iter().map(|&(f1, f2)| extend_pair(s, f1, f2)).collect();
    let mut cells = HashMap::new();
    for (&k, t) in pairs.iter().zip(per) {
        cells.insert(k, t?);
    }
    let e = EtsData::new(&s.name, s.host.clone(), s.boxes().clone(), cells)?;
    let r = check_mets(&e);
    if let Some(sec) = r.failures().next() {
        return Err(EtsError::CompositionFailure(sec.violations.first().map(|v| v.witness.clone()).unwrap_or_default()));
    }
    Ok(e)
}

pub fn ets_factorization_independence(s: &EtsSkeleton) -> Section {
    let b = &s.host.base;
    let mut sec = Section::new("factorization-independence", &s.name);
    let pairs = all_pairs(b);
    diagram::run(&mut sec, &pairs, |&(f1, f2)| match extend_pair(s, f1, f2) {
        Ok(_) => None,
        Err(e) => Some(Violation::new("independence", vec![b.name(f1), b.name(f2)]).with_detail(e.to_string())),
    });
    sec
}

pub fn restrict_ets(e: &EtsData) -> EtsSkeleton {
    EtsSkeleton { name: e.name.clone(), host: e.host.clone(), sm: e.restrict(Scope::Smooth), cl: e.restrict(Scope::Closed) }
}

/// Transposed monoidality cells with invertibility verdicts.
#[derive(Clone, Debug)]
pub struct TransposedM {
    pub side: Side,
    /// Direct-image shape `⊠_S (F_f1 × F_f2) ⇒ F_{f1×f2} ⊠_T`.
    pub bars: HashMap<(MorId, MorId), NatTrans>,
    pub non_invertible: BTreeMap<(MorId, MorId), Vec<ObjId>>,
}

impl TransposedM {
    pub fn invertible(&self) -> bool {
        self.non_invertible.is_empty()
    }
}

fn pasting(cells: &[Cell]) -> Result<NatTrans, EtsError> {
    diagram::eval(cells).map_err(|e| EtsError::Adjoint(AdjointError::PastingTypeError(e.to_string())))
}

fn transpose_pair(e: &EtsData, a: &AdjointAssignment, f1: MorId, f2: MorId) -> Result<NatTrans, EtsError> {
    let h = &*e.host;
    let b = &h.base;
    let f12 = b.times(f1, f2);
    let (s1, s2) = (b.cod(f1), b.cod(f2));
    let (t1, t2) = (b.dom(f1), b.dom(f2));
    let adj = Functor::product(&[a.adjoint(f1), a.adjoint(f2)]);
    let m = e.m_cell(f1, f2);
    match a.side {
        Side::Right => pasting(&[
            a.unit(f12).right(&Functor::compose(e.boxed(s1, s2), &adj)),
            m.inv().right(&adj).left(a.adjoint(f12)),
            Cell::Product(vec![a.counit(f1), a.counit(f2)]).left(&Functor::compose(a.adjoint(f12), e.boxed(t1, t2))),
        ]),
        Side::Left => {
            let nu = pasting(&[
                Cell::Product(vec![a.unit(f1), a.unit(f2)]).left(&Functor::compose(a.adjoint(f12), e.boxed(t1, t2))),
                m.right(&adj).left(a.adjoint(f12)),
                a.counit(f12).right(&Functor::compose(e.boxed(s1, s2), &adj)),
            ])?;
            invert_nat_iso(&nu).map_err(|_| EtsError::NotInvertible {
                what: format!("transposed cell ({}, {})", b.name(f1), b.name(f2)),
                object: nu.domain().obj_name(non_invertible_objects(&nu)[0]),
            })
        }
    }
}

/// Transposes every cell over the marked class of the assignment.
pub fn transpose_m(e: &EtsData, a: &AdjointAssignment) -> Result<TransposedM, EtsError> {
    let b = e.base().clone();
    let marked: Vec<MorId> = b.scoped(a.marked).collect();
    let mut bars = HashMap::new();
    let mut non_invertible = BTreeMap::new();
    for &f1 in &marked {
        for &f2 in &marked {
            match transpose_pair(e, a, f1, f2) {
                Ok(t) => {
                    let bad = non_invertible_objects(&t);
                    if !bad.is_empty() {
                        non_invertible.insert((f1, f2), bad);
                    }
                    bars.insert((f1, f2), t);
                }
                Err(EtsError::NotInvertible { .. }) => {
                    non_invertible.insert((f1, f2), vec![ObjId(0)]);
                }
                Err(err) => return Err(err),
            }
        }
    }
    Ok(TransposedM { side: a.side, bars, non_invertible })
}

/// Recovers inverse-image cells from transposed ones.
pub fn transpose_back_m(
    boxes: &Boxes,
    bars: &HashMap<(MorId, MorId), NatTrans>,
    a: &AdjointAssignment,
) -> Result<HashMap<(MorId, MorId), NatTrans>, EtsError> {
    let h = &*a.host;
    let b = &h.base;
    let mut out = HashMap::new();
    let mut keys: Vec<_> = bars.keys().copied().collect();
    keys.sort();
    for (f1, f2) in keys {
        let f12 = b.times(f1, f2);
        let (s1, s2) = (b.cod(f1), b.cod(f2));
        let (t1, t2) = (b.dom(f1), b.dom(f2));
        let inv = Functor::product(&[h.functor(f1), h.functor(f2)]);
        let bar = Cell::atom(format!("mbar[{},{}]", b.name(f1), b.name(f2)), &bars[&(f1, f2)]);
        let m = match a.side {
            Side::Right => {
                let mu = pasting(&[
                    Cell::Product(vec![a.unit(f1), a.unit(f2)]).left(&Functor::compose(h.functor(f12), boxes.at(s1, s2))),
                    bar.right(&inv).left(h.functor(f12)),
                    a.counit(f12).right(&Functor::compose(boxes.at(t1, t2), &inv)),
                ])?;
                invert_nat_iso(&mu).map_err(|_| EtsError::NotInvertible {
                    what: format!("back-transposed cell ({}, {})", b.name(f1), b.name(f2)),
                    object: mu.domain().obj_name(non_invertible_objects(&mu)[0]),
                })?
            }
            Side::Left => pasting(&[
                a.unit(f12).right(&Functor::compose(boxes.at(t1, t2), &inv)),
                bar.inv().right(&inv).left(h.functor(f12)),
                Cell::Product(vec![a.counit(f1), a.counit(f2)]).left(&Functor::compose(h.functor(f12), boxes.at(s1, s2))),
            ])?,
        };
        out.insert((f1, f2), m);
    }
    Ok(out)
}

/// The transposed cells as a tensor structure on the direct-image side.
pub fn opposite_ets(e: &EtsData, a: &AdjointAssignment, tr: &TransposedM) -> Result<EtsData, EtsError> {
    let direct = derive_opposite_conn(&a.host, a)?;
    EtsData::new(&format!("{}bar", e.name), Arc::new(direct), e.boxes.clone(), tr.bars.clone())
}

/// `a: (A1 ⊠ A2) ⊠ A3 ⇒ A1 ⊠ (A2 ⊠ A3)` per object triple.
#[derive(Clone, Debug)]
pub struct AssocConstraint {
    pub cells: HashMap<(ObjId, ObjId, ObjId), NatTrans>,
}

/// `c: A1 ⊠ A2 ⇒ T(A2 ⊠ A1)` per object pair, `T` the functor of the symmetry.
#[derive(Clone, Debug)]
pub struct CommConstraint {
    pub cells: HashMap<(ObjId, ObjId), NatTrans>,
}

/// `(⊠_{12,3} ∘ (⊠_{1,2} × Id), ⊠_{1,23} ∘ (Id × ⊠_{2,3}))`.
pub fn assoc_boundary(h: &FiberedCat, boxes: &Boxes, s1: ObjId, s2: ObjId, s3: ObjId) -> (Functor, Functor) {
    let b = &h.base;
    let (s12, s23) = (b.product_obj(s1, s2), b.product_obj(s2, s3));
    let id = |x: ObjId| Functor::identity(h.fiber(x));
    (
        Functor::compose(boxes.at(s12, s3), &Functor::product(&[boxes.at(s1, s2), &id(s3)])),
        Functor::compose(boxes.at(s1, s23), &Functor::product(&[&id(s1), boxes.at(s2, s3)])),
    )
}

/// The symmetry morphism whose functor carries `H(S2×S1)` to `H(S1×S2)`.
pub fn sym(h: &FiberedCat, s1: ObjId, s2: ObjId) -> Result<MorId, EtsError> {
    let b = &h.base;
    let t = match h.variance {
        Variance::Inverse => b.tau(s1, s2),
        Variance::Direct => b.tau(s2, s1),
    };
    t.map_err(|_| EtsError::NoProducts(b.cat.name().into()))
}

/// `(⊠_{1,2}, T ∘ ⊠_{2,1} ∘ swap)`.
pub fn comm_boundary(h: &FiberedCat, boxes: &Boxes, s1: ObjId, s2: ObjId) -> Result<(Functor, Functor), EtsError> {
    let t = sym(h, s1, s2)?;
    let ft = h.try_functor(t).ok_or_else(|| EtsError::BadConstraint(format!("symmetry {} unmarked", h.base.name(t))))?;
    let swap = Functor::swap(h.fiber(s1), h.fiber(s2));
    Ok((boxes.at(s1, s2).clone(), Functor::chain(&[&swap, boxes.at(s2, s1), ft])))
}

impl AssocConstraint {
    pub fn new(e: &EtsData, cells: HashMap<(ObjId, ObjId, ObjId), NatTrans>) -> Result<AssocConstraint, EtsError> {
        let b = e.base();
        for (&(s1, s2, s3), t) in &cells {
            let (src, tgt) = assoc_boundary(&e.host, &e.boxes, s1, s2, s3);
            if !t.source().same(&src) || !t.target().same(&tgt) {
                return Err(EtsError::BadConstraint(format!("({},{},{})", b.oname(s1), b.oname(s2), b.oname(s3))));
            }
        }
        Ok(AssocConstraint { cells })
    }

    fn cell(&self, e: &EtsData, s1: ObjId, s2: ObjId, s3: ObjId) -> Cell {
        let b = e.base();
        let key = (s1, s2, s3);
        match self.cells.get(&key) {
            Some(t) => Cell::atom(format!("a[{},{},{}]", b.oname(s1), b.oname(s2), b.oname(s3)), t),
            None => Cell::Identity(assoc_boundary(&e.host, &e.boxes, s1, s2, s3).0),
        }
    }
}

impl CommConstraint {
    pub fn new(e: &EtsData, cells: HashMap<(ObjId, ObjId), NatTrans>) -> Result<CommConstraint, EtsError> {
        let b = e.base();
        for (&(s1, s2), t) in &cells {
            let (src, tgt) = comm_boundary(&e.host, &e.boxes, s1, s2)?;
            if !t.source().same(&src) || !t.target().same(&tgt) {
                return Err(EtsError::BadConstraint(format!("({},{})", b.oname(s1), b.oname(s2))));
            }
        }
        Ok(CommConstraint { cells })
    }

    fn cell(&self, e: &EtsData, s1: ObjId, s2: ObjId) -> Result<Cell, EtsError> {
        let b = e.base();
        Ok(match self.cells.get(&(s1, s2)) {
            Some(t) => Cell::atom(format!("c[{},{}]", b.oname(s1), b.oname(s2)), t),
            None => Cell::Identity(comm_boundary(&e.host, &e.boxes, s1, s2)?.0),
        })
    }
}

/// Pentagon over object quadruples and compatibility with the cells over morphism triples.
pub fn check_assoc(e: &EtsData, a: &AssocConstraint) -> Report {
    let mut r = Report::new(&format!("associativity {}", e.name));
    let b = e.base().clone();
    let objs: Vec<ObjId> = b.cat.objects().collect();
    let mut wf = Section::new("associator-iso", &e.name);
    let mut keys: Vec<_> = a.cells.keys().copied().collect();
    keys.sort();
    for k in keys {
        diagram::wellformed(&mut wf, &format!("({},{},{})", b.oname(k.0), b.oname(k.1), b.oname(k.2)), &a.cells[&k], true);
    }
    r.push(wf);

    let mut quads = Vec::new();
    for &s1 in &objs {
        for &s2 in &objs {
            for &s3 in &objs {
                for &s4 in &objs {
                    quads.push([s1, s2, s3, s4]);
                }
            }
        }
    }
    let mut pent = Section::new("pentagon", &e.name);
    diagram::run(&mut pent, &quads, |&[s1, s2, s3, s4]| {
        let p = |x, y| b.product_obj(x, y);
        let id = |x| e.id_fiber(x);
        let lhs = [
            a.cell(e, p(s1, s2), s3, s4).right(&Functor::product(&[e.boxed(s1, s2), &id(s3), &id(s4)])),
            a.cell(e, s1, s2, p(s3, s4)).right(&Functor::product(&[&id(s1), &id(s2), e.boxed(s3, s4)])),
        ];
        let rhs = [
            Cell::Product(vec![a.cell(e, s1, s2, s3), Cell::Identity(id(s4))]).left(e.boxed(p(p(s1, s2), s3), s4)),
            a.cell(e, s1, p(s2, s3), s4).right(&Functor::product(&[&id(s1), e.boxed(s2, s3), &id(s4)])),
            Cell::Product(vec![Cell::Identity(id(s1)), a.cell(e, s2, s3, s4)]).left(e.boxed(s1, p(p(s2, s3), s4))),
        ];
        let w = [s1, s2, s3, s4].iter().map(|&x| b.oname(x)).collect();
        diagram::compare("pentagon", w, &lhs, &rhs)
    });
    r.push(pent);

    let h = &*e.host;
    let ms = h.scoped();
    let mut triples = Vec::new();
    for &f1 in &ms {
        for &f2 in &ms {
            for &f3 in &ms {
                triples.push((f1, f2, f3));
            }
        }
    }
    let mut comp = Section::new("associator-monoidality", &e.name);
    diagram::run(&mut comp, &triples, |&(f1, f2, f3)| {
        let (t1, t2, t3) = (h.tgt(f1), h.tgt(f2), h.tgt(f3));
        let (s1, s2, s3) = (h.src(f1), h.src(f2), h.src(f3));
        let (f12, f23) = (b.times(f1, f2), b.times(f2, f3));
        let f123 = b.times(f12, f3);
        let (fn1, fn2, fn3) = (h.functor(f1), h.functor(f2), h.functor(f3));
        let ids = |x| e.id_fiber(x);
        let lhs = [
            a.cell(e, t1, t2, t3).right(&Functor::product(&[fn1, fn2, fn3])),
            Cell::Product(vec![Cell::Identity(fn1.clone()), e.m_cell(f2, f3)]).left(e.boxed(t1, b.product_obj(t2, t3))),
            e.m_cell(f1, f23).right(&Functor::product(&[&ids(s1), e.boxed(s2, s3)])),
        ];
        let rhs = [
            Cell::Product(vec![e.m_cell(f1, f2), Cell::Identity(fn3.clone())]).left(e.boxed(b.product_obj(t1, t2), t3)),
            e.m_cell(f12, f3).right(&Functor::product(&[e.boxed(s1, s2), &ids(s3)])),
            a.cell(e, s1, s2, s3).left(h.functor(f123)),
        ];
        diagram::compare("associator-monoidality", pair_witness(&b, &[f1, f2, f3]), &lhs, &rhs)
    });
    r.push(comp);
    r
}

/// Involutivity over object pairs and compatibility with the cells over morphism pairs.
pub fn check_comm(e: &EtsData, c: &CommConstraint) -> Report {
    let mut r = Report::new(&format!("commutativity {}", e.name));
    let b = e.base().clone();
    let h = &*e.host;
    if h.base.cat.objects().any(|x| !h.in_scope(b.id(x))) {
        r.push(Section::skipped("commutator-involution", &e.name, "identities outside the marked class"));
        return r;
    }
    let objs: Vec<ObjId> = b.cat.objects().collect();
    let mut wf = Section::new("commutator-iso", &e.name);
    let mut keys: Vec<_> = c.cells.keys().copied().collect();
    keys.sort();
    for k in keys {
        diagram::wellformed(&mut wf, &format!("({},{})", b.oname(k.0), b.oname(k.1)), &c.cells[&k], true);
    }
    r.push(wf);

    let sym_ok = objs.iter().all(|&s1| objs.iter().all(|&s2| sym(h, s1, s2).is_ok_and(|t| h.in_scope(t))));
    if !sym_ok {
        r.push(Section::skipped("commutator-involution", &e.name, "symmetries outside the marked class"));
        return r;
    }
    let pairs: Vec<(ObjId, ObjId)> = objs.iter().flat_map(|&a| objs.iter().map(move |&c| (a, c))).collect();
    let mut inv = Section::new("commutator-involution", &e.name);
    diagram::run(&mut inv, &pairs, |&(s1, s2)| {
        let w = vec![b.oname(s1), b.oname(s2)];
        let (t12, t21) = (sym(h, s1, s2).ok()?, sym(h, s2, s1).ok()?);
        let (first, second) = match h.variance {
            Variance::Inverse => (t21, t12),
            Variance::Direct => (t12, t21),
        };
        let swap = Functor::swap(h.fiber(s1), h.fiber(s2));
        let lhs = [c.cell(e, s1, s2).ok()?, c.cell(e, s2, s1).ok()?.right(&swap).left(h.functor(t12))];
        let rhs = [h.comparison_cell(first, second).right(e.boxed(s1, s2))];
        diagram::compare("commutator-involution", w, &lhs, &rhs)
    });
    r.push(inv);

    let mps = e.pairs();
    let mut comp = Section::new("commutator-monoidality", &e.name);
    diagram::run(&mut comp, &mps, |&(f1, f2)| {
        let (t1, t2) = (h.tgt(f1), h.tgt(f2));
        let (s1, s2) = (h.src(f1), h.src(f2));
        let (f12, f21) = (b.times(f1, f2), b.times(f2, f1));
        let (tt, ts) = (sym(h, t1, t2).ok()?, sym(h, s1, s2).ok()?);
        let fprod = Functor::product(&[h.functor(f1), h.functor(f2)]);
        let swap_s = Functor::swap(h.fiber(s1), h.fiber(s2));
        let tail = Functor::compose(e.boxed(s2, s1), &swap_s);
        let lhs = [
            c.cell(e, t1, t2).ok()?.right(&fprod),
            e.m_cell(f2, f1).right(&swap_s).left(h.functor(tt)),
            h.comparison_cell(f21, tt).inv().right(&tail),
            h.comparison_cell(ts, f12).right(&tail),
        ];
        let rhs = [e.m_cell(f1, f2), c.cell(e, s1, s2).ok()?.left(h.functor(f12))];
        diagram::compare("commutator-monoidality", pair_witness(&b, &[f1, f2]), &lhs, &rhs)
    });
    r.push(comp);
    r
}

/// `ρ: ⊠2 ∘ (R_S1 × R_S2) ⇒ R_{S1×S2} ∘ ⊠1` per object pair.
#[derive(Clone, Debug)]
pub struct MorEts {
    pub name: String,
    pub morphism: FibMorphism,
    pub source: EtsData,
    pub target: EtsData,
    pub rho: HashMap<(ObjId, ObjId), NatTrans>,
}

pub fn rho_boundary(family: &[Functor], b1: &Boxes, b2: &Boxes, s1: ObjId, s2: ObjId) -> (Functor, Functor) {
    let r = |x: ObjId| &family[x.ix()];
    (
        Functor::compose(b2.at(s1, s2), &Functor::product(&[r(s1), r(s2)])),
        Functor::compose(r(b1.base.product_obj(s1, s2)), b1.at(s1, s2)),
    )
}

impl MorEts {
    pub fn new(
        name: &str,
        morphism: FibMorphism,
        source: EtsData,
        target: EtsData,
        mut rho: HashMap<(ObjId, ObjId), NatTrans>,
    ) -> Result<MorEts, EtsError> {
        let b = source.base().clone();
        for s1 in b.cat.objects() {
            for s2 in b.cat.objects() {
                let (src, tgt) = rho_boundary(morphism.family(), &source.boxes, &target.boxes, s1, s2);
                let key = format!("({},{})", b.oname(s1), b.oname(s2));
                match rho.get(&(s1, s2)) {
                    Some(t) => {
                        if !t.source().same(&src) || !t.target().same(&tgt) {
                            return Err(EtsError::BadConstraint(key));
                        }
                    }
                    None => {
                        if !src.same(&tgt) {
                            return Err(EtsError::BadConstraint(key));
                        }
                        rho.insert((s1, s2), NatTrans::identity(&src));
                    }
                }
            }
        }
        Ok(MorEts { name: name.to_string(), morphism, source, target, rho })
    }

    pub fn rho_cell(&self, s1: ObjId, s2: ObjId) -> Cell {
        let b = self.source.base();
        Cell::atom(format!("{}.rho[{},{}]", self.name, b.oname(s1), b.oname(s2)), &self.rho[&(s1, s2)])
    }

    /// The same `ρ` over other transitions and cells.
    pub fn with(&self, morphism: FibMorphism, source: EtsData, target: EtsData) -> MorEts {
        MorEts { name: self.name.clone(), morphism, source, target, rho: self.rho.clone() }
    }
}

/// Invertibility of `ρ` and the tensor compatibility hexagon over morphism pairs.
pub fn check_mor_ets(r: &MorEts) -> Report {
    let mut rep = Report::new(&format!("morphism-ets {}", r.name));
    let (e1, e2, m) = (&r.source, &r.target, &r.morphism);
    let b = e1.base().clone();
    let mut wf = Section::new("rho-iso", &r.name);
    for s1 in b.cat.objects() {
        for s2 in b.cat.objects() {
            diagram::wellformed(&mut wf, &format!("({},{})", b.oname(s1), b.oname(s2)), &r.rho[&(s1, s2)], true);
        }
    }
    rep.push(wf);
    let (h1, h2) = (&*e1.host, &*e2.host);
    let pairs = e1.pairs();
    let mut hex = Section::new("rho-hexagon", &r.name);
    diagram::run(&mut hex, &pairs, |&(f1, f2)| {
        let (s1, s2) = (h1.src(f1), h1.src(f2));
        let (t1, t2) = (h1.tgt(f1), h1.tgt(f2));
        let f12 = b.times(f1, f2);
        let lhs = [
            e2.m_cell(f1, f2).right(&Functor::product(&[m.r(s1), m.r(s2)])),
            r.rho_cell(s1, s2).left(h2.functor(f12)),
            m.theta_cell(f12).right(e1.boxed(s1, s2)),
        ];
        let rhs = [
            Cell::Product(vec![m.theta_cell(f1), m.theta_cell(f2)]).left(e2.boxed(t1, t2)),
            r.rho_cell(t1, t2).right(&Functor::product(&[h1.functor(f1), h1.functor(f2)])),
            e1.m_cell(f1, f2).left(m.r(b.product_obj(t1, t2))),
        ];
        diagram::compare("rho-hexagon", pair_witness(&b, &[f1, f2]), &lhs, &rhs)
    });
    rep.push(hex);
    rep
}

/// `ρ` checked separately along smooth and closed pairs, with the two families compared.
pub fn check_mor_ets_skeleton(sm: &MorEts, cl: &MorEts) -> Report {
    let mut rep = Report::new(&format!("morphism-ets-skeleton {}", sm.name));
    let b = sm.source.base().clone();
    let mut eq = Section::new("rho-coincide", &sm.name);
    for s1 in b.cat.objects() {
        for s2 in b.cat.objects() {
            eq.count();
            if !sm.rho[&(s1, s2)].same(&cl.rho[&(s1, s2)]) {
                eq.fail(Violation::new("rho-coincide", vec![b.oname(s1), b.oname(s2)]));
            }
        }
    }
    rep.push(eq);
    for s in prefixed(check_mor_ets(sm), "smooth-").into_iter().chain(prefixed(check_mor_ets(cl), "closed-")) {
        rep.push(s);
    }
    rep
}

/// Smooth cells with left adjoints and closed cells in direct-image form.
#[derive(Clone, Debug)]
pub struct EtCore {
    pub name: String,
    pub host: Arc<FiberedCat>,
    pub sm: EtsData,
    pub sm_left: AdjointAssignment,
    pub cl_right: AdjointAssignment,
    pub cl_bar: HashMap<(MorId, MorId), NatTrans>,
}

impl EtCore {
    pub fn boxes(&self) -> &Arc<Boxes> {
        &self.sm.boxes
    }

    fn bar_cell(&self, z1: MorId, z2: MorId) -> Cell {
        let b = &self.host.base;
        Cell::atom(format!("{}.mbar[{},{}]", self.name, b.name(z1), b.name(z2)), &self.cl_bar[&(z1, z2)])
    }
}

pub fn ets_skeleton_to_core(s: &EtsSkeleton, sm_left: AdjointAssignment, cl_right: AdjointAssignment) -> Result<EtCore, EtsError> {
    let tr = transpose_m(&s.cl, &cl_right)?;
    if let Some(((z1, z2), xs)) = tr.non_invertible.iter().next() {
        let b = &s.host.base;
        return Err(EtsError::NotInvertible {
            what: format!("transposed cell ({}, {})", b.name(*z1), b.name(*z2)),
            object: format!("object #{}", xs[0].0),
        });
    }
    Ok(EtCore { name: s.name.clone(), host: s.host.clone(), sm: s.sm.clone(), sm_left, cl_right, cl_bar: tr.bars })
}

pub fn ets_core_to_skeleton(c: &EtCore) -> Result<EtsSkeleton, EtsError> {
    let m_cl = transpose_back_m(c.boxes(), &c.cl_bar, &c.cl_right)?;
    let cl = EtsData::new(&c.name, Arc::new(c.host.restrict(Scope::Closed)), c.boxes().clone(), m_cl)?;
    Ok(EtsSkeleton { name: c.name.clone(), host: c.host.clone(), sm: c.sm.clone(), cl })
}

/// Conditions on a tensor core: smooth axioms and adjointability, closed axioms
/// in direct-image form, the Cartesian pair hexagon and the triangle pairs.
pub fn check_etc(c: &EtCore) -> Report {
    let mut r = Report::new(&format!("etc {}", c.name));
    let h = &*c.host;
    let b = &h.base;
    for sec in prefixed(check_mets(&c.sm), "smooth-") {
        r.push(sec);
    }
    let mut adj = Section::new("smooth-adjointable", &c.name);
    match transpose_m(&c.sm, &c.sm_left) {
        Ok(tr) => {
            let mut ks: Vec<_> = c.sm.cells().keys().copied().collect();
            ks.sort();
            for k in ks {
                adj.count();
                if tr.non_invertible.contains_key(&k) {
                    adj.fail(Violation::new("not-adjointable", vec![b.name(k.0), b.name(k.1)]));
                }
            }
        }
        Err(e) => adj.fail(Violation::new("pasting", vec![]).with_detail(e.to_string())),
    }
    r.push(adj);
    let mut shared = Section::new("box-shared", &c.name);
    shared.count();
    r.push(shared.note("one box family serves both classes"));

    let mut inv = Section::new("closed-invertible", &c.name);
    let mut ks: Vec<_> = c.cl_bar.keys().copied().collect();
    ks.sort();
    for k in &ks {
        inv.count();
        let t = &c.cl_bar[k];
        if let Some(&x) = non_invertible_objects(t).first() {
            inv.fail(Violation::new("invertible", vec![b.name(k.0), b.name(k.1), t.domain().obj_name(x)]));
        }
    }
    r.push(inv);

    match derive_opposite_conn(&c.host, &c.cl_right)
        .map_err(EtsError::from)
        .and_then(|d| EtsData::new(&format!("{}bar", c.name), Arc::new(d), c.boxes().clone(), c.cl_bar.clone()))
    {
        Ok(d) => {
            for sec in prefixed(check_mets(&d), "closed-") {
                r.push(sec);
            }
        }
        Err(e) => {
            let mut sec = Section::new("closed-monoidality-square", &c.name);
            sec.fail(Violation::new("structure", vec![]).with_detail(e.to_string()));
            r.push(sec);
        }
    }

    let squares = b.cartesian_mixed_squares();
    let pairs: Vec<(Square, Square)> = squares.iter().flat_map(|&a| squares.iter().map(move |&s| (a, s))).collect();
    let x = &c.cl_right;
    let mut hex = Section::new("cartesian-pair-hexagon", &c.name);
    diagram::run(&mut hex, &pairs, |(s1, s2)| {
        let sq = product_square(b, s1, s2);
        let (z1, z2) = (s1.bottom, s2.bottom);
        let (zp1, zp2) = (s1.top, s2.top);
        let (pp1, pp2) = (s1.left, s2.left);
        let zz = Functor::product(&[x.adjoint(z1), x.adjoint(z2)]);
        let ppst = Functor::product(&[h.functor(pp1), h.functor(pp2)]);
        let bz = c.boxes().at(b.dom(z1), b.dom(z2));
        let lhs = vec![
            c.sm.m_cell(s1.right, s2.right).right(&zz),
            c.bar_cell(z1, z2).left(h.functor(sq.right)),
            Cell::Seq(closed_exchange_path(h, x, &sq)).right(bz),
        ];
        let rhs = vec![
            Cell::Product(vec![Cell::Seq(closed_exchange_path(h, x, s1)), Cell::Seq(closed_exchange_path(h, x, s2))])
                .left(c.boxes().at(b.cod(s1.top), b.cod(s2.top))),
            c.bar_cell(zp1, zp2).right(&ppst),
            c.sm.m_cell(pp1, pp2).left(x.adjoint(sq.top)),
        ];
        diagram::compare("cartesian-pair-hexagon", square_witness(b, s1, s2), &lhs, &rhs)
    });
    r.push(hex);

    let mut tri = Section::new("triangle-pair-exchange", &c.name);
    match transpose_back_m(c.boxes(), &c.cl_bar, &c.cl_right) {
        Ok(m_cl) => {
            let named: HashMap<(MorId, MorId), Cell> = m_cl
                .iter()
                .map(|(&(a1, a2), t)| ((a1, a2), Cell::atom(format!("{}.m[{},{}]", c.name, b.name(a1), b.name(a2)), t)))
                .collect();
            let sm = |a: MorId, bb: MorId| c.sm.m_cell(a, bb);
            let cl = |a: MorId, bb: MorId| named[&(a, bb)].clone();
            tri.absorb(pair_exchange_section("triangle-pair-exchange", &c.name, h, c.boxes(), &sm, &cl, &b.triangles()));
        }
        Err(e) => tri.fail(Violation::new("transpose-back", vec![]).with_detail(e.to_string())),
    }
    r.push(tri);
    r
}

/// Verdict of a tensor core check with smooth adjointability left out.
pub fn etc_exchange_passed(r: &Report) -> bool {
    r.sections.iter().filter(|s| s.condition != "smooth-adjointable").all(Section::passed)
}

/// Runs [`check_mor_axioms`] and [`check_mor_ets`] on the same data; used by the core sweeps.
pub fn full_morphism_report(r: &MorEts) -> Report {
    let mut rep = check_mor_axioms(&r.morphism);
    rep.extend(check_mor_ets(r));
    rep
}
