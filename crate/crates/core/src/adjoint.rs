//! Adjunctions given as data, and the transposition calculus built on them:
//! direct-image comparisons, transposed transitions and base-change maps.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::base::{Scope, Square};
use crate::diagram;
use crate::fibered::{FibMorphism, FiberedCat, FiberedError, Variance};
use crate::fincat::{invert_nat_iso, non_invertible_objects, Cell, FinCat, Functor, MorId, NatTrans, ObjId};
use crate::report::{Section, Violation};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AdjointError {
    #[error("pasting does not type-check: {0}")]
    PastingTypeError(String),
    #[error("adjunction for {morphism}: {detail}")]
    BadEntry { morphism: String, detail: String },
    #[error("no adjunction for marked morphism {0}")]
    MissingEntry(String),
    #[error("{what} is not invertible at {object}")]
    NotInvertible { what: String, object: String },
    #[error("square does not commute")]
    SquareNotCommuting,
    #[error("{0}")]
    Fibered(#[from] FiberedError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// `left ⊣ right` with `unit: Id ⇒ right∘left` and `counit: left∘right ⇒ Id`.
#[derive(Clone, Debug)]
pub struct Adjunction {
    pub left: Functor,
    pub right: Functor,
    pub unit: NatTrans,
    pub counit: NatTrans,
}

impl Adjunction {
    pub fn new(left: Functor, right: Functor, unit: NatTrans, counit: NatTrans) -> Result<Adjunction, String> {
        let a = left.source();
        let b = left.target();
        if !right.source().same(b) || !right.target().same(a) {
            return Err("legs are not opposite".into());
        }
        if !unit.source().is_identity() || !unit.source().source().same(a) {
            return Err("unit does not start at the identity".into());
        }
        if !unit.target().same(&Functor::compose(&right, &left)) {
            return Err("unit does not end at right∘left".into());
        }
        if !counit.target().is_identity() || !counit.target().source().same(b) {
            return Err("counit does not end at the identity".into());
        }
        if !counit.source().same(&Functor::compose(&left, &right)) {
            return Err("counit does not start at left∘right".into());
        }
        Ok(Adjunction { left, right, unit, counit })
    }

    pub fn identity(c: &FinCat) -> Adjunction {
        let i = Functor::identity(c);
        Adjunction { left: i.clone(), right: i.clone(), unit: NatTrans::identity(&i), counit: NatTrans::identity(&i) }
    }
}

/// Both triangle identities, componentwise.
pub fn check_adjunction(a: &Adjunction) -> Section {
    let mut s = Section::new("triangle-identities", &format!("{} -| {}", a.left.name(), a.right.name()));
    diagram::wellformed(&mut s, "unit", &a.unit, false);
    diagram::wellformed(&mut s, "counit", &a.counit, false);
    let eta = Cell::atom("eta", &a.unit);
    let eps = Cell::atom("eps", &a.counit);
    s.count();
    if let Some(v) = diagram::is_identity("left-triangle", vec![], &[eta.clone().left(&a.left), eps.clone().right(&a.left)]) {
        s.fail(v);
    }
    s.count();
    if let Some(v) = diagram::is_identity("right-triangle", vec![], &[eta.right(&a.right), eps.left(&a.right)]) {
        s.fail(v);
    }
    s
}

/// One adjoint per marked morphism of an inverse-image structure.
///
/// With [`Side::Left`] each entry is `f_# ⊣ f^*`, with [`Side::Right`] it is
/// `f^* ⊣ f_*`. Identities carry the identity adjunction.
#[derive(Clone, Debug)]
pub struct AdjointAssignment {
    pub host: Arc<FiberedCat>,
    pub side: Side,
    pub marked: Scope,
    entries: Vec<Option<Adjunction>>,
}

impl AdjointAssignment {
    pub fn new(
        host: Arc<FiberedCat>,
        side: Side,
        marked: Scope,
        mut given: BTreeMap<MorId, Adjunction>,
    ) -> Result<AdjointAssignment, AdjointError> {
        let b = host.base.clone();
        let mut entries = vec![None; b.cat.n_morphisms()];
        for f in b.scoped(marked) {
            let name = b.name(f);
            let fstar = host
                .try_functor(f)
                .ok_or_else(|| AdjointError::BadEntry { morphism: name.clone(), detail: "outside host scope".into() })?;
            let a = match given.remove(&f) {
                Some(a) => a,
                None if b.is_id(f) => Adjunction::identity(host.fiber(b.dom(f))),
                None => return Err(AdjointError::MissingEntry(name)),
            };
            let leg = match side {
                Side::Left => &a.right,
                Side::Right => &a.left,
            };
            if !leg.same(fstar) {
                return Err(AdjointError::BadEntry { morphism: name, detail: "leg differs from the inverse image".into() });
            }
            entries[f.ix()] = Some(a);
        }
        if let Some((&f, _)) = given.iter().next() {
            return Err(AdjointError::BadEntry { morphism: b.name(f), detail: "not a marked morphism".into() });
        }
        Ok(AdjointAssignment { host, side, marked, entries })
    }

    /// Identity adjunctions on every marked morphism; valid when those inverse images are identities.
    pub fn identities(host: Arc<FiberedCat>, side: Side, marked: Scope) -> Result<AdjointAssignment, AdjointError> {
        let b = host.base.clone();
        let mut given = BTreeMap::new();
        for f in b.scoped(marked).filter(|&f| !b.is_id(f)) {
            let fstar = host.try_functor(f).ok_or_else(|| AdjointError::BadEntry { morphism: b.name(f), detail: "outside host scope".into() })?;
            if !fstar.is_identity() {
                return Err(AdjointError::BadEntry { morphism: b.name(f), detail: "inverse image is not an identity".into() });
            }
            given.insert(f, Adjunction::identity(fstar.source()));
        }
        AdjointAssignment::new(host, side, marked, given)
    }

    pub fn entry(&self, f: MorId) -> &Adjunction {
        match &self.entries[f.ix()] {
            Some(a) => a,
            None => panic!("no adjunction for {}", self.host.base.name(f)),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (MorId, &Adjunction)> {
        self.entries.iter().enumerate().filter_map(|(i, a)| a.as_ref().map(|a| (MorId(i as u32), a)))
    }

    pub fn has(&self, f: MorId) -> bool {
        self.entries.get(f.ix()).is_some_and(|a| a.is_some())
    }

    /// `f_#` or `f_*`.
    pub fn adjoint(&self, f: MorId) -> &Functor {
        let a = self.entry(f);
        match self.side {
            Side::Left => &a.left,
            Side::Right => &a.right,
        }
    }

    pub fn unit(&self, f: MorId) -> Cell {
        Cell::atom(format!("{}.eta[{}]", self.host.name, self.host.base.name(f)), &self.entry(f).unit)
    }

    pub fn counit(&self, f: MorId) -> Cell {
        Cell::atom(format!("{}.eps[{}]", self.host.name, self.host.base.name(f)), &self.entry(f).counit)
    }

    pub fn inv_image(&self, f: MorId) -> &Functor {
        self.host.functor(f)
    }

    pub fn check(&self) -> Section {
        let mut s = Section::new("adjunctions", &self.host.name);
        for (f, a) in self.entries() {
            let sec = check_adjunction(a);
            s.count();
            if let Some(v) = sec.violations.first() {
                let mut v = v.clone();
                v.witness.insert(0, self.host.base.name(f));
                s.fail(v);
            }
        }
        s
    }
}

fn pasting(cells: &[Cell]) -> Result<NatTrans, AdjointError> {
    diagram::eval(cells).map_err(|e| AdjointError::PastingTypeError(e.to_string()))
}

/// Path for the direct-image comparison `F_{g∘f} ⇒ F_g ∘ F_f`, `f` applied first.
pub fn opposite_conn_path(h: &FiberedCat, a: &AdjointAssignment, f: MorId, g: MorId) -> Vec<Cell> {
    let gf = h.base.compose(g, f);
    let conn_inv = h.conn_cell(f, g).inv();
    let (fs, gs) = (h.functor(f), h.functor(g));
    let (fa, ga, gfa) = (a.adjoint(f), a.adjoint(g), a.adjoint(gf));
    let gafa = Functor::compose(ga, fa);
    match a.side {
        Side::Left => vec![
            a.unit(f).left(gfa),
            a.unit(g).right(fa).left(&Functor::compose(gfa, fs)),
            conn_inv.right(&gafa).left(gfa),
            a.counit(gf).right(&gafa),
        ],
        Side::Right => vec![
            a.unit(g).right(gfa),
            a.unit(f).right(&Functor::compose(gs, gfa)).left(ga),
            conn_inv.right(gfa).left(&gafa),
            a.counit(gf).left(&gafa),
        ],
    }
}

/// The adjoints as a direct-image structure over the marked class.
pub fn derive_opposite_conn(h: &Arc<FiberedCat>, a: &AdjointAssignment) -> Result<FiberedCat, AdjointError> {
    let b = h.base.clone();
    let functors = b.cat.morphisms().map(|f| a.has(f).then(|| a.adjoint(f).clone())).collect();
    let mut comps = HashMap::new();
    for (f, g) in b.composable_pairs(a.marked) {
        let t = pasting(&opposite_conn_path(h, a, f, g))?;
        comps.insert((f, g), t);
    }
    let suffix = match a.side {
        Side::Left => "#",
        Side::Right => "*",
    };
    Ok(FiberedCat::new(&format!("{}{}", h.name, suffix), b, Variance::Direct, a.marked, h.fibers().to_vec(), functors, comps)?)
}

/// Transposed transitions with per-morphism invertibility.
#[derive(Clone, Debug)]
pub struct Transposed {
    pub side: Side,
    /// Left: `f_# R_T ⇒ R_S f_#`. Right: `R_S z_* ⇒ z_* R_Z`.
    pub bars: Vec<Option<NatTrans>>,
    pub non_invertible: BTreeMap<MorId, Vec<ObjId>>,
}

impl Transposed {
    pub fn invertible(&self) -> bool {
        self.non_invertible.is_empty()
    }

    pub fn bar(&self, f: MorId) -> &NatTrans {
        self.bars[f.ix()].as_ref().expect("transposed component present")
    }

    pub fn verdicts(&self, m: &FibMorphism) -> Section {
        let mut s = Section::new("transposed-invertible", &m.name);
        for (f, t) in self.bars.iter().enumerate() {
            if t.is_some() {
                s.count();
                if let Some(xs) = self.non_invertible.get(&MorId(f as u32)) {
                    let b = m.base();
                    let dom = t.as_ref().map(|t| t.domain().clone()).expect("present");
                    s.fail(Violation::new("not-adjointable", vec![b.name(MorId(f as u32)), dom.obj_name(xs[0])]));
                }
            }
        }
        s
    }
}

/// Path for one transposed transition.
pub fn theta_bar_path(
    m: &FibMorphism,
    a1: &AdjointAssignment,
    a2: &AdjointAssignment,
    f: MorId,
) -> Vec<Cell> {
    let b = m.base();
    let (s, t) = (b.cod(f), b.dom(f));
    let (rs, rt) = (m.r(s), m.r(t));
    let (f1, f2) = (a1.adjoint(f), a2.adjoint(f));
    let theta = m.theta_cell(f);
    match a1.side {
        Side::Left => vec![
            a1.unit(f).left(&Functor::compose(f2, rt)),
            theta.inv().right(f1).left(f2),
            a2.counit(f).right(&Functor::compose(rs, f1)),
        ],
        Side::Right => vec![
            a2.unit(f).right(&Functor::compose(rs, f1)),
            theta.right(f1).left(f2),
            a1.counit(f).left(&Functor::compose(f2, rt)),
        ],
    }
}

/// Transposes every transition along the marked class of the assignments.
pub fn transpose_theta(
    m: &FibMorphism,
    a1: &AdjointAssignment,
    a2: &AdjointAssignment,
) -> Result<Transposed, AdjointError> {
    let b = m.base();
    let marked: Vec<MorId> = b.scoped(a1.marked).collect();
    let mut bars = vec![None; b.cat.n_morphisms()];
    let mut non_invertible = BTreeMap::new();
    for f in marked {
        let t = pasting(&theta_bar_path(m, a1, a2, f))?;
        let bad = non_invertible_objects(&t);
        if !bad.is_empty() {
            non_invertible.insert(f, bad);
        }
        bars[f.ix()] = Some(t);
    }
    Ok(Transposed { side: a1.side, bars, non_invertible })
}

/// The transposed data as a morphism of direct-image structures.
pub fn opposite_morphism(
    m: &FibMorphism,
    h1: &FiberedCat,
    h2: &FiberedCat,
    tr: &Transposed,
) -> Result<FibMorphism, AdjointError> {
    let mut theta = Vec::with_capacity(tr.bars.len());
    for (i, t) in tr.bars.iter().enumerate() {
        theta.push(match (t, tr.side) {
            (None, _) => None,
            (Some(t), Side::Left) => Some(t.clone()),
            (Some(t), Side::Right) => Some(invert_nat_iso(t).map_err(|_| AdjointError::NotInvertible {
                what: format!("transposed transition {}", m.base().name(MorId(i as u32))),
                object: String::new(),
            })?),
        });
    }
    Ok(FibMorphism::new(
        &format!("{}bar", m.name),
        Arc::new(h1.clone()),
        Arc::new(h2.clone()),
        m.family().to_vec(),
        theta,
    )?)
}

/// Path recovering `θ_f` (right side) or its inverse (left side) from a transposed component.
pub fn theta_back_path(
    family: &[Functor],
    bar: &Cell,
    a1: &AdjointAssignment,
    a2: &AdjointAssignment,
    f: MorId,
) -> Vec<Cell> {
    let b = &a1.host.base;
    let (rs, rt) = (&family[b.cod(f).ix()], &family[b.dom(f).ix()]);
    let (p1, p2) = (a1.inv_image(f), a2.inv_image(f));
    match a1.side {
        Side::Left => vec![
            a2.unit(f).right(&Functor::compose(rt, p1)),
            bar.clone().right(p1).left(p2),
            a1.counit(f).left(&Functor::compose(p2, rs)),
        ],
        Side::Right => vec![
            a1.unit(f).left(&Functor::compose(p2, rs)),
            bar.clone().right(p1).left(p2),
            a2.counit(f).right(&Functor::compose(rt, p1)),
        ],
    }
}

/// Inverse of [`transpose_theta`]: recovers the transitions from transposed components.
pub fn transpose_back_theta(
    family: &[Functor],
    bars: &[Option<NatTrans>],
    a1: &AdjointAssignment,
    a2: &AdjointAssignment,
) -> Result<Vec<Option<NatTrans>>, AdjointError> {
    let b = &a1.host.base;
    let mut out = vec![None; b.cat.n_morphisms()];
    for (i, t) in bars.iter().enumerate() {
        let Some(t) = t else { continue };
        let f = MorId(i as u32);
        let cell = Cell::atom(format!("bar[{}]", b.name(f)), t);
        let raw = pasting(&theta_back_path(family, &cell, a1, a2, f))?;
        let theta = match a1.side {
            Side::Right => raw,
            Side::Left => invert_nat_iso(&raw).map_err(|e| AdjointError::NotInvertible {
                what: format!("back-transposed transition {}", b.name(f)),
                object: e.to_string(),
            })?,
        };
        out[f.ix()] = Some(theta);
    }
    Ok(out)
}

/// A map with its non-invertible objects.
#[derive(Clone, Debug)]
pub struct Exchange {
    pub map: NatTrans,
    pub non_invertible: Vec<ObjId>,
}

fn exchange(cells: &[Cell]) -> Result<Exchange, AdjointError> {
    let map = pasting(cells)?;
    let non_invertible = non_invertible_objects(&map);
    Ok(Exchange { map, non_invertible })
}

/// `p'_# f'^* ⇒ f^* p_#` for a square `p ∘ f' = f ∘ p'` with `p, p'` in the left assignment.
///
/// In square terms: `top = f'`, `left = p'`, `right = p`, `bottom = f`.
pub fn beck_chevalley_path(h: &FiberedCat, a: &AdjointAssignment, sq: &Square) -> Vec<Cell> {
    let (fp, pp, p, f) = (sq.top, sq.left, sq.right, sq.bottom);
    let (pp_sh, p_sh) = (a.adjoint(pp), a.adjoint(p));
    vec![
        a.unit(p).left(&Functor::compose(pp_sh, h.functor(fp))),
        h.conn_cell(fp, p).inv().right(p_sh).left(pp_sh),
        h.conn_cell(pp, f).right(p_sh).left(pp_sh),
        a.counit(pp).right(&Functor::compose(h.functor(f), p_sh)),
    ]
}

pub fn beck_chevalley(h: &FiberedCat, sq: &Square, a: &AdjointAssignment) -> Result<Exchange, AdjointError> {
    if !h.base.commutes(sq) {
        return Err(AdjointError::SquareNotCommuting);
    }
    exchange(&beck_chevalley_path(h, a, sq))
}

/// `p^* z_* ⇒ z'_* p'^*` for a square `p ∘ z' = z ∘ p'` with `z, z'` in the right assignment.
///
/// In square terms: `top = z'`, `left = p'`, `right = p`, `bottom = z`.
pub fn closed_exchange_path(h: &FiberedCat, a: &AdjointAssignment, sq: &Square) -> Vec<Cell> {
    let (zp, pp, p, z) = (sq.top, sq.left, sq.right, sq.bottom);
    let (zp_st, z_st) = (a.adjoint(zp), a.adjoint(z));
    vec![
        a.unit(zp).right(&Functor::compose(h.functor(p), z_st)),
        h.conn_cell(zp, p).inv().right(z_st).left(zp_st),
        h.conn_cell(pp, z).right(z_st).left(zp_st),
        a.counit(z).left(&Functor::compose(zp_st, h.functor(pp))),
    ]
}

pub fn closed_exchange(h: &FiberedCat, sq: &Square, a: &AdjointAssignment) -> Result<Exchange, AdjointError> {
    if !h.base.commutes(sq) {
        return Err(AdjointError::SquareNotCommuting);
    }
    exchange(&closed_exchange_path(h, a, sq))
}
