//! Skeleta and cores of morphisms: transitions given only along smooth and
//! closed morphisms, the exchange conditions tying them together, and the
//! factorization algorithm that extends them to every base morphism.

use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::adjoint::{
    closed_exchange_path, derive_opposite_conn, opposite_morphism, transpose_back_theta, transpose_theta,
    AdjointAssignment, AdjointError, Side, Transposed,
};
use crate::base::{fact_category, Scope, Square};
use crate::diagram;
use crate::fibered::{check_mor_axioms, FibMorphism, FiberedCat, FiberedError};
use crate::fincat::{non_invertible_objects, Cell, Functor, MorId, NatTrans};
use crate::report::{Report, Section, Violation};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SkeletonError {
    #[error("factorizations {first} and {second} of {morphism} give different transitions")]
    IndependenceFailure { morphism: String, first: String, second: String, object: String },
    #[error("{morphism} has no factorization")]
    NoFactorization { morphism: String },
    #[error("extended transitions fail the transition square at {witness:?}")]
    CompositionFailure { witness: Vec<String> },
    #[error("{what} is not invertible at {object}")]
    NotInvertible { what: String, object: String },
    #[error(transparent)]
    Adjoint(#[from] AdjointError),
    #[error(transparent)]
    Fibered(#[from] FiberedError),
}

/// Transitions along smooth and along closed morphisms over a common family.
#[derive(Clone, Debug)]
pub struct SkeletonData {
    pub name: String,
    /// Full inverse-image structures; only their restrictions are read.
    pub source: Arc<FiberedCat>,
    pub target: Arc<FiberedCat>,
    pub sm: FibMorphism,
    pub cl: FibMorphism,
}

impl SkeletonData {
    pub fn new(
        name: &str,
        source: Arc<FiberedCat>,
        target: Arc<FiberedCat>,
        family: Vec<Functor>,
        theta_sm: Vec<Option<NatTrans>>,
        theta_cl: Vec<Option<NatTrans>>,
    ) -> Result<SkeletonData, SkeletonError> {
        let sm = FibMorphism::new(
            name,
            Arc::new(source.restrict(Scope::Smooth)),
            Arc::new(target.restrict(Scope::Smooth)),
            family.clone(),
            theta_sm,
        )?;
        let cl = FibMorphism::new(
            name,
            Arc::new(source.restrict(Scope::Closed)),
            Arc::new(target.restrict(Scope::Closed)),
            family,
            theta_cl,
        )?;
        Ok(SkeletonData { name: name.to_string(), source, target, sm, cl })
    }

    pub fn family(&self) -> &[Functor] {
        self.sm.family()
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

/// Mixed exchange on one square: `q^* z^* R_S ⇒ R_Q q^* z^*` both ways round.
///
/// `theta_cl` supplies the closed transitions so cores can pass back-transposed ones.
fn exchange_paths(
    h1: &FiberedCat,
    h2: &FiberedCat,
    family: &[Functor],
    sm: &dyn Fn(MorId) -> Cell,
    cl: &dyn Fn(MorId) -> Cell,
    sq: &Square,
) -> (Vec<Cell>, Vec<Cell>) {
    let b = &h1.base;
    let (h, q, p, z) = (sq.top, sq.left, sq.right, sq.bottom);
    let rq = &family[b.dom(q).ix()];
    let rs = &family[b.cod(p).ix()];
    let path1 = vec![cl(z).left(h2.functor(q)), sm(q).right(h1.functor(z))];
    let path2 = vec![
        h2.conn_cell(q, z).inv().right(rs),
        h2.conn_cell(h, p).right(rs),
        sm(p).left(h2.functor(h)),
        cl(h).right(h1.functor(p)),
        h1.conn_cell(h, p).inv().left(rq),
        h1.conn_cell(q, z).left(rq),
    ];
    (path1, path2)
}

fn square_witness(b: &crate::base::BaseCat, sq: &Square) -> Vec<String> {
    vec![b.name(sq.top), b.name(sq.left), b.name(sq.right), b.name(sq.bottom)]
}

fn exchange_section(condition: &str, s: &SkeletonData, squares: &[Square]) -> Section {
    let (h1, h2) = (&*s.source, &*s.target);
    let mut sec = Section::new(condition, &s.name);
    let sm = |f: MorId| s.sm.theta_cell(f);
    let cl = |f: MorId| s.cl.theta_cell(f);
    diagram::run(&mut sec, squares, |sq| {
        let (a, b) = exchange_paths(h1, h2, s.family(), &sm, &cl, sq);
        diagram::compare(condition, square_witness(&h1.base, sq), &a, &b)
    });
    sec
}

fn subcategory_sections(s: &SkeletonData, r: &mut Report) -> bool {
    let rs = check_mor_axioms(&s.sm);
    let rc = check_mor_axioms(&s.cl);
    let ok = rs.passed() && rc.passed();
    for sec in prefixed(rs, "smooth-").into_iter().chain(prefixed(rc, "closed-")) {
        r.push(sec);
    }
    ok
}

fn coincide_section(s: &SkeletonData) -> Section {
    let b = &s.source.base;
    let mut sec = Section::new("smooth-closed-coincide", &s.name);
    for f in b.cat.morphisms().filter(|&f| b.is_smooth(f) && b.is_closed(f)) {
        sec.count();
        if let Some(x) = s.sm.theta(f).first_difference(s.cl.theta(f)) {
            sec.fail(Violation::new("coincide", vec![b.name(f)]).with_detail(format!(
                "at object {}",
                s.sm.theta(f).domain().obj_name(x)
            )));
        }
    }
    sec
}

/// Subcategory axioms, the exchange over every mixed square, and agreement on doubly-marked morphisms.
pub fn check_skeleton(s: &SkeletonData) -> Report {
    let mut r = Report::new(&format!("skeleton {}", s.name));
    subcategory_sections(s, &mut r);
    r.push(exchange_section("exchange", s, &s.source.base.mixed_squares()));
    r.push(coincide_section(s));
    r
}

/// Subcategory axioms with the exchange split into Cartesian squares and triangles.
pub fn check_skeleton_ct(s: &SkeletonData) -> Report {
    let mut r = Report::new(&format!("skeleton-ct {}", s.name));
    subcategory_sections(s, &mut r);
    let b = &s.source.base;
    r.push(exchange_section("cartesian-exchange", s, &b.cartesian_mixed_squares()));
    r.push(exchange_section("triangle-exchange", s, &b.triangles()));
    r
}

/// `θ_f` through the factorization `f = p ∘ t`.
fn through_factorization(s: &SkeletonData, t: MorId, p: MorId) -> Result<NatTrans, SkeletonError> {
    let (h1, h2) = (&*s.source, &*s.target);
    let b = &h1.base;
    let rs = &s.family()[b.cod(p).ix()];
    let rt = &s.family()[b.dom(t).ix()];
    let cells = [
        h2.conn_cell(t, p).right(rs),
        s.sm.theta_cell(p).left(h2.functor(t)),
        s.cl.theta_cell(t).right(h1.functor(p)),
        h1.conn_cell(t, p).inv().left(rt),
    ];
    diagram::eval(&cells).map_err(|e| SkeletonError::Adjoint(AdjointError::PastingTypeError(e.to_string())))
}

/// Extends a skeleton to every base morphism, checking independence of the factorization first.
pub fn extend_skeleton(s: &SkeletonData) -> Result<FibMorphism, SkeletonError> {
    let b = s.source.base.clone();
    let ms: Vec<MorId> = b.cat.morphisms().collect();
    let per: Vec<Result<NatTrans, SkeletonError>> = ms
        .par_iter()
        .map(|&f| {
            let fc = fact_category(&b, f);
            let first = fc.objects.first().ok_or_else(|| SkeletonError::NoFactorization { morphism: b.name(f) })?;
            let name = |o: &crate::base::FactObject| format!("{} then {}", b.name(o.closed_part), b.name(o.smooth_part));
            let base = through_factorization(s, first.closed_part, first.smooth_part)?;
            for o in &fc.objects[1..] {
                let t = through_factorization(s, o.closed_part, o.smooth_part)?;
                if let Some(x) = base.first_difference(&t) {
                    return Err(SkeletonError::IndependenceFailure {
                        morphism: b.name(f),
                        first: name(first),
                        second: name(o),
                        object: base.domain().obj_name(x),
                    });
                }
            }
            Ok(base)
        })
        .collect();
    let mut theta = Vec::with_capacity(ms.len());
    for t in per {
        theta.push(Some(t?));
    }
    let m = FibMorphism::new(&s.name, s.source.clone(), s.target.clone(), s.family().to_vec(), theta)?;
    let r = check_mor_axioms(&m);
    if let Some(sec) = r.failures().next() {
        let witness = sec.violations.first().map(|v| v.witness.clone()).unwrap_or_default();
        return Err(SkeletonError::CompositionFailure { witness });
    }
    Ok(m)
}

/// Per-morphism check that every factorization gives the same transition.
pub fn factorization_independence(s: &SkeletonData) -> Section {
    let b = &s.source.base;
    let mut sec = Section::new("factorization-independence", &s.name);
    let ms: Vec<MorId> = b.cat.morphisms().collect();
    diagram::run(&mut sec, &ms, |&f| {
        let fc = fact_category(b, f);
        let Some(first) = fc.objects.first() else {
            return Some(Violation::new("non-empty", vec![b.name(f)]));
        };
        let base = through_factorization(s, first.closed_part, first.smooth_part).ok()?;
        for o in &fc.objects[1..] {
            match through_factorization(s, o.closed_part, o.smooth_part) {
                Ok(t) if t.same(&base) => {}
                _ => {
                    return Some(Violation::new(
                        "independence",
                        vec![b.name(f), b.name(o.closed_part), b.name(o.smooth_part)],
                    ))
                }
            }
        }
        None
    });
    sec
}

pub fn restrict_to_skeleton(m: &FibMorphism) -> SkeletonData {
    SkeletonData {
        name: m.name.clone(),
        source: m.source.clone(),
        target: m.target.clone(),
        sm: m.restrict(Scope::Smooth),
        cl: m.restrict(Scope::Closed),
    }
}

/// Smooth transitions with left adjoints, and closed transitions in direct-image form.
#[derive(Clone, Debug)]
pub struct CoreData {
    pub name: String,
    pub source: Arc<FiberedCat>,
    pub target: Arc<FiberedCat>,
    pub sm: FibMorphism,
    pub sm_left: (AdjointAssignment, AdjointAssignment),
    pub cl_right: (AdjointAssignment, AdjointAssignment),
    /// `R_S z_* ⇒ z_* R_Z` per closed `z`.
    pub cl_bar: Vec<Option<NatTrans>>,
}

impl CoreData {
    pub fn family(&self) -> &[Functor] {
        self.sm.family()
    }

    pub fn bar_cell(&self, z: MorId) -> Cell {
        let t = self.cl_bar[z.ix()].as_ref().expect("closed transition present");
        Cell::atom(format!("{}.thetabar[{}]", self.name, self.source.base.name(z)), t)
    }
}

fn first_bad(tr: &Transposed, b: &crate::base::BaseCat) -> Option<SkeletonError> {
    let (f, xs) = tr.non_invertible.iter().next()?;
    let dom = tr.bar(*f).domain().clone();
    Some(SkeletonError::NotInvertible { what: format!("transposed transition {}", b.name(*f)), object: dom.obj_name(xs[0]) })
}

pub fn skeleton_to_core(
    s: &SkeletonData,
    sm_left: (AdjointAssignment, AdjointAssignment),
    cl_right: (AdjointAssignment, AdjointAssignment),
) -> Result<CoreData, SkeletonError> {
    let tr = transpose_theta(&s.cl, &cl_right.0, &cl_right.1)?;
    if let Some(e) = first_bad(&tr, &s.source.base) {
        return Err(e);
    }
    Ok(CoreData {
        name: s.name.clone(),
        source: s.source.clone(),
        target: s.target.clone(),
        sm: s.sm.clone(),
        sm_left,
        cl_right,
        cl_bar: tr.bars,
    })
}

/// Closed transitions recovered from the direct-image form.
pub fn core_closed_thetas(c: &CoreData) -> Result<Vec<Option<NatTrans>>, SkeletonError> {
    let th = transpose_back_theta(c.family(), &c.cl_bar, &c.cl_right.0, &c.cl_right.1)?;
    let b = &c.source.base;
    for (i, t) in th.iter().enumerate() {
        if let Some(t) = t {
            if let Some(&x) = non_invertible_objects(t).first() {
                return Err(SkeletonError::NotInvertible {
                    what: format!("closed transition {}", b.name(MorId(i as u32))),
                    object: t.domain().obj_name(x),
                });
            }
        }
    }
    Ok(th)
}

pub fn core_to_skeleton(c: &CoreData) -> Result<SkeletonData, SkeletonError> {
    let th = core_closed_thetas(c)?;
    SkeletonData::new(&c.name, c.source.clone(), c.target.clone(), c.family().to_vec(), c.sm.thetas().to_vec(), th)
}

/// Conditions on a core: smooth axioms and adjointability, closed axioms in
/// direct-image form, the Cartesian hexagon and the triangle exchange.
pub fn check_core(c: &CoreData) -> Report {
    let mut r = Report::new(&format!("core {}", c.name));
    let (h1, h2) = (&*c.source, &*c.target);
    let b = &h1.base;
    for sec in prefixed(check_mor_axioms(&c.sm), "smooth-") {
        r.push(sec);
    }
    match transpose_theta(&c.sm, &c.sm_left.0, &c.sm_left.1) {
        Ok(tr) => {
            let mut sec = tr.verdicts(&c.sm);
            sec.condition = "smooth-adjointable".into();
            r.push(sec);
        }
        Err(e) => {
            let mut sec = Section::new("smooth-adjointable", &c.name);
            sec.fail(Violation::new("pasting", vec![]).with_detail(e.to_string()));
            r.push(sec);
        }
    }

    let mut inv = Section::new("closed-invertible", &c.name);
    for z in b.scoped(Scope::Closed) {
        inv.count();
        let t = c.cl_bar[z.ix()].as_ref().expect("closed transition present");
        if let Some(&x) = non_invertible_objects(t).first() {
            inv.fail(Violation::new("invertible", vec![b.name(z), t.domain().obj_name(x)]));
        }
    }
    let invertible = inv.passed();
    r.push(inv);
    if !invertible {
        return r;
    }

    let direct = (|| -> Result<FibMorphism, AdjointError> {
        let d1 = derive_opposite_conn(&c.source, &c.cl_right.0)?;
        let d2 = derive_opposite_conn(&c.target, &c.cl_right.1)?;
        let tr = Transposed { side: Side::Right, bars: c.cl_bar.clone(), non_invertible: Default::default() };
        opposite_morphism(&c.sm, &d1, &d2, &tr)
    })();
    match direct {
        Ok(m) => {
            for sec in prefixed(check_mor_axioms(&m), "closed-") {
                r.push(sec);
            }
        }
        Err(e) => {
            let mut sec = Section::new("closed-transition-square", &c.name);
            sec.fail(Violation::new("pasting", vec![]).with_detail(e.to_string()));
            r.push(sec);
        }
    }

    let mut hex = Section::new("cartesian-hexagon", &c.name);
    let squares = b.cartesian_mixed_squares();
    let (x1, x2) = (&c.cl_right.0, &c.cl_right.1);
    diagram::run(&mut hex, &squares, |sq| {
        let (zp, pp, p, z) = (sq.top, sq.left, sq.right, sq.bottom);
        let rz = &c.family()[b.dom(z).ix()];
        let rp = &c.family()[b.dom(p).ix()];
        let lhs: Vec<Cell> = vec![
            c.bar_cell(z).left(h2.functor(p)),
            Cell::Seq(closed_exchange_path(h2, x2, sq)).right(rz),
            c.sm.theta_cell(pp).left(x2.adjoint(zp)),
        ];
        let rhs: Vec<Cell> = vec![
            c.sm.theta_cell(p).right(x1.adjoint(z)),
            Cell::Seq(closed_exchange_path(h1, x1, sq)).left(rp),
            c.bar_cell(zp).right(h1.functor(pp)),
        ];
        diagram::compare("cartesian-hexagon", square_witness(b, sq), &lhs, &rhs)
    });
    r.push(hex);

    let mut tri = Section::new("triangle-exchange", &c.name);
    match core_closed_thetas(c) {
        Ok(th) => {
            let cells: Vec<Option<Cell>> = th
                .iter()
                .enumerate()
                .map(|(i, t)| t.as_ref().map(|t| Cell::atom(format!("{}.theta[{}]", c.name, b.name(MorId(i as u32))), t)))
                .collect();
            let sm = |f: MorId| c.sm.theta_cell(f);
            let cl = |f: MorId| cells[f.ix()].clone().expect("closed transition present");
            diagram::run(&mut tri, &b.triangles(), |sq| {
                let (a, bb) = exchange_paths(h1, h2, c.family(), &sm, &cl, sq);
                diagram::compare("triangle-exchange", square_witness(b, sq), &a, &bb)
            });
        }
        Err(e) => tri.fail(Violation::new("transpose-back", vec![]).with_detail(e.to_string())),
    }
    r.push(tri);
    r
}

/// The verdict of a core check with adjointability of the smooth part left out.
pub fn core_exchange_passed(r: &Report) -> bool {
    r.sections.iter().filter(|s| s.condition != "smooth-adjointable").all(Section::passed)
}

