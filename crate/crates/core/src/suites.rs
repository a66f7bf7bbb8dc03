//! Suite orchestration over loaded instances, and the extension passes.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::adjoint::{
    derive_opposite_conn, opposite_morphism, transpose_back_theta, transpose_theta, AdjointAssignment, Side, Transposed,
};
use crate::base::{check_base, check_products, Scope};
use crate::ets::{
    check_assoc, check_comm, check_ets_ct, check_ets_skeleton, check_etc, check_mets, check_mor_ets, check_mor_ets_skeleton,
    ets_core_to_skeleton, extend_ets_skeleton, opposite_ets, transpose_back_m, transpose_m, AssocConstraint, CommConstraint, EtCore, EtsData,
    EtsSkeleton, MorEts,
};
use crate::fibered::{check_coherence, check_fib_axioms, check_mor_axioms, FibMorphism};
use crate::fincat::{functor_laws, validate_category, Functor, NatTrans};
use crate::instance::{EtsEntry, Instance, MorEtsEntry, MorphismEntry};
use crate::localic::{check_localic_partial, LocalicData};
use crate::report::{Report, Section, Violation};
use crate::skeleton::{
    check_core, check_skeleton, check_skeleton_ct, core_to_skeleton, extend_skeleton, factorization_independence, CoreData,
    SkeletonData,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Category,
    Base,
    Fibered,
    Morphism,
    Skeleton,
    Core,
    Ets,
    EtsSkeleton,
    Etc,
    Localic,
    All,
}

impl Suite {
    pub const EACH: [Suite; 10] = [
        Suite::Category,
        Suite::Base,
        Suite::Fibered,
        Suite::Morphism,
        Suite::Skeleton,
        Suite::Core,
        Suite::Ets,
        Suite::EtsSkeleton,
        Suite::Etc,
        Suite::Localic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Category => "category",
            Suite::Base => "base",
            Suite::Fibered => "fibered",
            Suite::Morphism => "morphism",
            Suite::Skeleton => "skeleton",
            Suite::Core => "core",
            Suite::Ets => "ets",
            Suite::EtsSkeleton => "ets-skeleton",
            Suite::Etc => "etc",
            Suite::Localic => "localic",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Extension {
    Skeleton,
    EtsSkeleton,
    Core,
    Etc,
}

/// Why a derived presentation could not be built.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DeriveError {
    /// The data is fine but a transposed cell is not invertible, so the
    /// presentation does not exist.
    #[error("{0}")]
    NotInvertible(String),
    #[error("{0}")]
    Invalid(String),
}

impl From<String> for DeriveError {
    fn from(s: String) -> DeriveError {
        DeriveError::Invalid(s)
    }
}

impl From<crate::skeleton::SkeletonError> for DeriveError {
    fn from(e: crate::skeleton::SkeletonError) -> DeriveError {
        match e {
            crate::skeleton::SkeletonError::NotInvertible { .. } => DeriveError::NotInvertible(e.to_string()),
            _ => DeriveError::Invalid(e.to_string()),
        }
    }
}

impl From<crate::ets::EtsError> for DeriveError {
    fn from(e: crate::ets::EtsError) -> DeriveError {
        match e {
            crate::ets::EtsError::NotInvertible { .. } => DeriveError::NotInvertible(e.to_string()),
            _ => DeriveError::Invalid(e.to_string()),
        }
    }
}

pub fn assignment(inst: &Instance, host: usize, side: Side) -> Option<AdjointAssignment> {
    let marked = match side {
        Side::Left => Scope::Smooth,
        Side::Right => Scope::Closed,
    };
    inst.assignment(host, side, marked).cloned()
}

pub fn full_morphism(inst: &Instance, m: &MorphismEntry) -> Option<Result<FibMorphism, String>> {
    let th = m.theta.as_ref()?;
    Some(
        FibMorphism::new(&m.name, inst.fibered[m.source].clone(), inst.fibered[m.target].clone(), m.family.clone(), th.clone())
            .map_err(|e| e.to_string()),
    )
}

/// From explicit smooth and closed parts, else by restricting full transitions.
pub fn skeleton_of(inst: &Instance, m: &MorphismEntry) -> Option<Result<SkeletonData, String>> {
    let (h1, h2) = (inst.fibered[m.source].clone(), inst.fibered[m.target].clone());
    let (sm, cl) = match (&m.theta_sm, &m.theta_cl, &m.theta) {
        (Some(sm), Some(cl), _) => (sm.clone(), cl.clone()),
        (_, _, Some(th)) => {
            let keep = |s: Scope| {
                th.iter().enumerate().map(|(i, t)| t.clone().filter(|_| inst.base.in_scope(crate::fincat::MorId(i as u32), s))).collect()
            };
            (keep(Scope::Smooth), keep(Scope::Closed))
        }
        _ => return None,
    };
    Some(SkeletonData::new(&m.name, h1, h2, m.family.clone(), sm, cl).map_err(|e| e.to_string()))
}

fn adjoint_pairs(inst: &Instance, m: &MorphismEntry) -> Option<((AdjointAssignment, AdjointAssignment), (AdjointAssignment, AdjointAssignment))> {
    Some((
        (assignment(inst, m.source, Side::Left)?, assignment(inst, m.target, Side::Left)?),
        (assignment(inst, m.source, Side::Right)?, assignment(inst, m.target, Side::Right)?),
    ))
}

/// From explicit direct-image closed transitions, else by transposing the skeleton.
pub fn core_of(inst: &Instance, m: &MorphismEntry) -> Option<Result<CoreData, DeriveError>> {
    let (sm_left, cl_right) = adjoint_pairs(inst, m)?;
    let (h1, h2) = (inst.fibered[m.source].clone(), inst.fibered[m.target].clone());
    if let Some(bar) = &m.theta_bar_cl {
        let sm_th = match (&m.theta_sm, &m.theta) {
            (Some(t), _) | (None, Some(t)) => t.clone(),
            _ => return None,
        };
        let sm = FibMorphism::new(
            &m.name,
            Arc::new(h1.restrict(Scope::Smooth)),
            Arc::new(h2.restrict(Scope::Smooth)),
            m.family.clone(),
            sm_th,
        );
        return Some(sm.map_err(|e| DeriveError::Invalid(e.to_string())).map(|sm| CoreData {
            name: m.name.clone(),
            source: h1,
            target: h2,
            sm,
            sm_left,
            cl_right,
            cl_bar: bar.clone(),
        }));
    }
    let s = match skeleton_of(inst, m)? {
        Ok(s) => s,
        Err(e) => return Some(Err(e.into())),
    };
    Some(crate::skeleton::skeleton_to_core(&s, sm_left, cl_right).map_err(DeriveError::from))
}

pub fn ets_full(inst: &Instance, e: &EtsEntry) -> Option<Result<EtsData, String>> {
    let m = e.m.as_ref()?;
    Some(EtsData::new(&e.name, inst.fibered[e.host].clone(), e.boxes.clone(), m.clone()).map_err(|e| e.to_string()))
}

pub fn ets_skeleton_of(inst: &Instance, e: &EtsEntry) -> Option<Result<EtsSkeleton, String>> {
    let host = inst.fibered[e.host].clone();
    match (&e.m_sm, &e.m_cl) {
        (Some(sm), Some(cl)) => {
            Some(EtsSkeleton::new(&e.name, host, e.boxes.clone(), sm.clone(), cl.clone()).map_err(|e| e.to_string()))
        }
        _ => {
            let full = match ets_full(inst, e)? {
                Ok(f) => f,
                Err(err) => return Some(Err(err)),
            };
            Some(Ok(crate::ets::restrict_ets(&full)))
        }
    }
}

pub fn etc_of(inst: &Instance, e: &EtsEntry) -> Option<Result<EtCore, DeriveError>> {
    let sm_left = assignment(inst, e.host, Side::Left)?;
    let cl_right = assignment(inst, e.host, Side::Right)?;
    let host = inst.fibered[e.host].clone();
    if let Some(bar) = &e.m_bar_cl {
        let sm_cells = match (&e.m_sm, &e.m) {
            (Some(t), _) => t.clone(),
            (None, Some(t)) => t.iter().filter(|((a, b), _)| inst.base.is_smooth(*a) && inst.base.is_smooth(*b)).map(|(k, v)| (*k, v.clone())).collect(),
            _ => return None,
        };
        let sm = EtsData::new(&e.name, Arc::new(host.restrict(Scope::Smooth)), e.boxes.clone(), sm_cells);
        return Some(sm.map_err(DeriveError::from).map(|sm| EtCore {
            name: e.name.clone(),
            host,
            sm,
            sm_left,
            cl_right,
            cl_bar: bar.clone(),
        }));
    }
    let s = match ets_skeleton_of(inst, e)? {
        Ok(s) => s,
        Err(err) => return Some(Err(err.into())),
    };
    Some(crate::ets::ets_skeleton_to_core(&s, sm_left, cl_right).map_err(DeriveError::from))
}

fn constraints(inst: &Instance, e: &EtsEntry, on: &EtsData) -> Result<(Option<AssocConstraint>, Option<CommConstraint>), String> {
    let _ = inst;
    let a = e.assoc.as_ref().map(|a| AssocConstraint::new(on, a.clone())).transpose().map_err(|e| e.to_string())?;
    let c = e.comm.as_ref().map(|c| CommConstraint::new(on, c.clone())).transpose().map_err(|e| e.to_string())?;
    Ok((a, c))
}

fn constraint_reports(r: &mut Report, inst: &Instance, e: &EtsEntry, on: &EtsData, prefix: &str) {
    match constraints(inst, e, on) {
        Ok((a, c)) => {
            for sec in a.map(|a| check_assoc(on, &a).sections).unwrap_or_default() {
                r.push(renamed(sec, prefix));
            }
            for sec in c.map(|c| check_comm(on, &c).sections).unwrap_or_default() {
                r.push(renamed(sec, prefix));
            }
        }
        Err(err) => r.push(failed(&format!("{prefix}constraints"), &e.name, err)),
    }
}

fn renamed(mut s: Section, prefix: &str) -> Section {
    s.condition = format!("{prefix}{}", s.condition);
    s
}

fn failed(condition: &str, subject: &str, detail: String) -> Section {
    let mut s = Section::new(condition, subject);
    s.fail(Violation::new("structure", vec![]).with_detail(detail));
    s
}

fn rho_coincidence(inst: &Instance, name: &str, sm: &crate::instance::ObjPairCells, cl: &crate::instance::ObjPairCells) -> Section {
    let b = &inst.base;
    let mut sec = Section::new("rho-coincide", name);
    for x in b.cat.objects() {
        for y in b.cat.objects() {
            sec.count();
            let same = match (sm.get(&(x, y)), cl.get(&(x, y))) {
                (Some(a), Some(c)) => a.same(c),
                (None, None) => true,
                _ => false,
            };
            if !same {
                sec.fail(Violation::new("rho-tables-differ", vec![b.oname(x), b.oname(y)]));
            }
        }
    }
    sec
}

/// Full transitions, extended from skeleton or core data when not given.
pub fn full_or_extended(inst: &Instance, m: &MorphismEntry) -> Option<Result<FibMorphism, DeriveError>> {
    if m.theta.is_some() {
        return full_morphism(inst, m).map(|r| r.map_err(DeriveError::Invalid));
    }
    let s = match skeleton_of(inst, m) {
        Some(s) => s.map_err(DeriveError::Invalid),
        None => core_of(inst, m)?.and_then(|c| core_to_skeleton(&c).map_err(DeriveError::from)),
    };
    Some(s.and_then(|s| extend_skeleton(&s).map_err(DeriveError::from)))
}

/// Full cells, extended from skeleton or core data when not given.
pub fn ets_full_or_extended(inst: &Instance, e: &EtsEntry) -> Option<Result<EtsData, DeriveError>> {
    if e.m.is_some() {
        return ets_full(inst, e).map(|r| r.map_err(DeriveError::Invalid));
    }
    let s = match (&e.m_sm, &e.m_cl) {
        (Some(_), Some(_)) => ets_skeleton_of(inst, e)?.map_err(DeriveError::Invalid),
        _ => etc_of(inst, e)?.and_then(|c| ets_core_to_skeleton(&c).map_err(DeriveError::from)),
    };
    Some(s.and_then(|s| extend_ets_skeleton(&s).map_err(DeriveError::from)))
}

fn side_tag(side: Side) -> &'static str {
    match side {
        Side::Left => "smooth-left",
        Side::Right => "closed-right",
    }
}

fn side_scope(side: Side) -> Scope {
    match side {
        Side::Left => Scope::Smooth,
        Side::Right => Scope::Closed,
    }
}

fn roundtrip_section<K: Copy>(cond: &str, subject: &str, pairs: impl Iterator<Item = (K, Option<NatTrans>, Option<NatTrans>)>, name: impl Fn(K) -> Vec<String>) -> Section {
    let mut sec = Section::new(cond, subject);
    for (k, a, b) in pairs {
        sec.count();
        let ok = match (&a, &b) {
            (Some(a), Some(b)) => a.same(b),
            (None, None) => true,
            _ => false,
        };
        if !ok {
            sec.fail(Violation::new("roundtrip-differs", name(k)));
        }
    }
    sec
}

/// The structures obtained by passing to adjoints, each checked against its
/// own axioms: opposite comparisons, transposed transitions and cells, the
/// constraints against the transposed cells and `ρ` against both. Also checks
/// that transposing back returns the original tables exactly.
pub fn adjunction_calculus(inst: &Instance) -> Report {
    let mut r = Report::new("adjunction-calculus");
    let b = &inst.base;
    for (i, h) in inst.fibered.iter().enumerate() {
        for side in [Side::Left, Side::Right] {
            let cond = format!("opposite-{}-fibered", side_tag(side));
            let Some(a) = assignment(inst, i, side) else {
                skipped(&mut r, &cond, &h.name, "adjoints unavailable");
                continue;
            };
            match derive_opposite_conn(h, &a) {
                Ok(d) => {
                    for sec in check_fib_axioms(&d).sections {
                        r.push(renamed(sec, &format!("opposite-{}-", side_tag(side))));
                    }
                }
                Err(e) => r.push(failed(&cond, &h.name, e.to_string())),
            }
        }
    }
    for m in &inst.morphisms {
        let fm = match full_or_extended(inst, m) {
            None => {
                skipped(&mut r, "opposite-morphism", &m.name, "no transitions");
                continue;
            }
            Some(Err(DeriveError::NotInvertible(e))) => {
                skipped(&mut r, "opposite-morphism", &m.name, &e);
                continue;
            }
            Some(Err(DeriveError::Invalid(e))) => {
                r.push(failed("opposite-morphism", &m.name, e));
                continue;
            }
            Some(Ok(fm)) => fm,
        };
        for side in [Side::Left, Side::Right] {
            let tag = side_tag(side);
            let cond = format!("opposite-{tag}-morphism");
            let (Some(a1), Some(a2)) = (assignment(inst, m.source, side), assignment(inst, m.target, side)) else {
                skipped(&mut r, &cond, &m.name, "adjoints unavailable");
                continue;
            };
            let mr = fm.restrict(side_scope(side));
            let out = (|| -> Result<Option<(FibMorphism, Section)>, String> {
                let tr = transpose_theta(&mr, &a1, &a2).map_err(|e| e.to_string())?;
                if !tr.invertible() {
                    return Ok(None);
                }
                let d1 = derive_opposite_conn(&fm.source, &a1).map_err(|e| e.to_string())?;
                let d2 = derive_opposite_conn(&fm.target, &a2).map_err(|e| e.to_string())?;
                let dm = opposite_morphism(&mr, &d1, &d2, &tr).map_err(|e| e.to_string())?;
                let back = transpose_back_theta(mr.family(), &tr.bars, &a1, &a2).map_err(|e| e.to_string())?;
                let rt = roundtrip_section(
                    &format!("theta-transpose-roundtrip-{tag}"),
                    &m.name,
                    b.scoped(side_scope(side)).map(|f| (f, mr.thetas()[f.ix()].clone(), back[f.ix()].clone())),
                    |f| vec![b.name(f)],
                );
                Ok(Some((dm, rt)))
            })();
            match out {
                Ok(Some((dm, rt))) => {
                    for sec in check_mor_axioms(&dm).sections {
                        r.push(renamed(sec, &format!("opposite-{tag}-")));
                    }
                    r.push(rt);
                }
                Ok(None) => skipped(&mut r, &cond, &m.name, "a transposed transition is not invertible"),
                Err(e) => r.push(failed(&cond, &m.name, e)),
            }
        }
    }
    for e in &inst.ets {
        let full = match ets_full_or_extended(inst, e) {
            None => {
                skipped(&mut r, "opposite-ets", &e.name, "no monoidality cells");
                continue;
            }
            Some(Err(DeriveError::NotInvertible(err))) => {
                skipped(&mut r, "opposite-ets", &e.name, &err);
                continue;
            }
            Some(Err(DeriveError::Invalid(err))) => {
                r.push(failed("opposite-ets", &e.name, err));
                continue;
            }
            Some(Ok(d)) => d,
        };
        for side in [Side::Left, Side::Right] {
            let tag = side_tag(side);
            let cond = format!("opposite-{tag}-ets");
            let Some(a) = assignment(inst, e.host, side) else {
                skipped(&mut r, &cond, &e.name, "adjoints unavailable");
                continue;
            };
            let er = full.restrict(side_scope(side));
            let tm = match transpose_m(&er, &a) {
                Ok(t) if t.invertible() => t,
                Ok(_) | Err(crate::ets::EtsError::NotInvertible { .. }) => {
                    skipped(&mut r, &cond, &e.name, "a transposed cell is not invertible");
                    continue;
                }
                Err(err) => {
                    r.push(failed(&cond, &e.name, err.to_string()));
                    continue;
                }
            };
            match opposite_ets(&er, &a, &tm) {
                Ok(o) => {
                    for sec in check_mets(&o).sections {
                        r.push(renamed(sec, &format!("opposite-{tag}-")));
                    }
                    constraint_reports(&mut r, inst, e, &o, &format!("lifted-{tag}-"));
                }
                Err(err) => r.push(failed(&cond, &e.name, err.to_string())),
            }
            match transpose_back_m(&er.boxes, &tm.bars, &a) {
                Ok(back) => {
                    let mut keys: Vec<_> = er.cells().keys().copied().collect();
                    keys.sort();
                    r.push(roundtrip_section(
                        &format!("m-transpose-roundtrip-{tag}"),
                        &e.name,
                        keys.into_iter().map(|k| (k, er.cells().get(&k).cloned(), back.get(&k).cloned())),
                        |(f1, f2)| vec![b.name(f1), b.name(f2)],
                    ));
                }
                Err(err) => r.push(failed(&format!("m-transpose-roundtrip-{tag}"), &e.name, err.to_string())),
            }
        }
    }
    for me in &inst.mor_ets {
        for side in [Side::Left, Side::Right] {
            r.extend(transport_rho(inst, me, side));
        }
    }
    r
}

/// The mor-ETS data with a given `ρ` table on full structures.
pub fn mor_ets_full(inst: &Instance, r: &MorEtsEntry, rho: &crate::instance::ObjPairCells) -> Option<Result<MorEts, String>> {
    let m = full_morphism(inst, &inst.morphisms[r.morphism])?;
    let e1 = ets_full(inst, &inst.ets[r.source_ets])?;
    let e2 = ets_full(inst, &inst.ets[r.target_ets])?;
    Some((|| {
        MorEts::new(&r.name, m?, e1?, e2?, rho.clone()).map_err(|e| e.to_string())
    })())
}

fn rho_of(r: &MorEtsEntry) -> Option<&crate::instance::ObjPairCells> {
    r.rho.as_ref().or(r.rho_sm.as_ref())
}

/// `ρ` over the smooth part and over the closed part in direct-image form.
pub fn mor_ets_core(inst: &Instance, r: &MorEtsEntry) -> Option<Result<(MorEts, MorEts), DeriveError>> {
    let rho = rho_of(r)?;
    let mc = core_of(inst, &inst.morphisms[r.morphism])?;
    let c1 = etc_of(inst, &inst.ets[r.source_ets])?;
    let c2 = etc_of(inst, &inst.ets[r.target_ets])?;
    Some((|| -> Result<(MorEts, MorEts), DeriveError> {
        let (mc, c1, c2) = (mc?, c1?, c2?);
        let sm = MorEts::new(&r.name, mc.sm.clone(), c1.sm.clone(), c2.sm.clone(), rho.clone()).map_err(|e| e.to_string())?;
        let d1 = derive_opposite_conn(&mc.source, &mc.cl_right.0).map_err(|e| e.to_string())?;
        let d2 = derive_opposite_conn(&mc.target, &mc.cl_right.1).map_err(|e| e.to_string())?;
        let tr = Transposed { side: Side::Right, bars: mc.cl_bar.clone(), non_invertible: Default::default() };
        let dm = opposite_morphism(&mc.sm, &d1, &d2, &tr).map_err(|e| e.to_string())?;
        let e1 = EtsData::new(&c1.name, dm.source.clone(), c1.boxes().clone(), c1.cl_bar.clone()).map_err(|e| e.to_string())?;
        let e2 = EtsData::new(&c2.name, dm.target.clone(), c2.boxes().clone(), c2.cl_bar.clone()).map_err(|e| e.to_string())?;
        let cl = MorEts::new(&r.name, dm, e1, e2, r.rho_cl.as_ref().unwrap_or(rho).clone()).map_err(|e| e.to_string())?;
        Ok((sm, cl))
    })())
}

/// The same `ρ` against the transposed structures on one side.
pub fn transport_rho(inst: &Instance, r: &MorEtsEntry, side: Side) -> Report {
    let mut rep = Report::new(&format!("transport {}", r.name));
    let cond = format!("transported-{}", if side == Side::Left { "smooth" } else { "closed" });
    let scope = if side == Side::Left { Scope::Smooth } else { Scope::Closed };
    let Some(rho) = rho_of(r) else {
        rep.push(Section::skipped(&cond, &r.name, "no rho table"));
        return rep;
    };
    let me = &inst.morphisms[r.morphism];
    let (Some(Ok(m)), Some(Ok(e1)), Some(Ok(e2))) =
        (full_morphism(inst, me), ets_full(inst, &inst.ets[r.source_ets]), ets_full(inst, &inst.ets[r.target_ets]))
    else {
        rep.push(Section::skipped(&cond, &r.name, "full structures unavailable"));
        return rep;
    };
    let (Some(a1), Some(a2)) = (assignment(inst, me.source, side), assignment(inst, me.target, side)) else {
        rep.push(Section::skipped(&cond, &r.name, "adjoints unavailable"));
        return rep;
    };
    let out = (|| -> Result<Option<MorEts>, String> {
        let mr = m.restrict(scope);
        let tr = transpose_theta(&mr, &a1, &a2).map_err(|e| e.to_string())?;
        let (er1, er2) = (e1.restrict(scope), e2.restrict(scope));
        let (t1, t2) = match (transpose_m(&er1, &a1), transpose_m(&er2, &a2)) {
            (Ok(t1), Ok(t2)) => (t1, t2),
            _ => return Ok(None),
        };
        if !tr.invertible() || !t1.invertible() || !t2.invertible() {
            return Ok(None);
        }
        let d1 = derive_opposite_conn(&m.source, &a1).map_err(|e| e.to_string())?;
        let d2 = derive_opposite_conn(&m.target, &a2).map_err(|e| e.to_string())?;
        let dm = opposite_morphism(&mr, &d1, &d2, &tr).map_err(|e| e.to_string())?;
        let o1 = opposite_ets(&er1, &a1, &t1).map_err(|e| e.to_string())?;
        let o2 = opposite_ets(&er2, &a2, &t2).map_err(|e| e.to_string())?;
        let o1 = EtsData::new(&o1.name, dm.source.clone(), o1.boxes.clone(), o1.cells().clone()).map_err(|e| e.to_string())?;
        let o2 = EtsData::new(&o2.name, dm.target.clone(), o2.boxes.clone(), o2.cells().clone()).map_err(|e| e.to_string())?;
        Ok(Some(MorEts::new(&r.name, dm, o1, o2, rho.clone()).map_err(|e| e.to_string())?))
    })();
    match out {
        Ok(Some(t)) => {
            for s in check_mor_ets(&t).sections {
                rep.push(renamed(s, &format!("{cond}-")));
            }
        }
        Ok(None) => rep.push(Section::skipped(&cond, &r.name, "a transposed cell is not invertible")),
        Err(e) => rep.push(failed(&cond, &r.name, e)),
    }
    rep
}

fn category_suite(inst: &Instance) -> Report {
    let mut r = Report::new("category");
    let mut cats = Section::new("category-axioms", &inst.name);
    cats.absorb(validate_category(&inst.base.cat));
    for h in &inst.fibered {
        for f in h.fibers() {
            cats.absorb(validate_category(f));
        }
    }
    r.push(cats);
    let mut fl = Section::new("functor-laws", &inst.name);
    let mut all: Vec<Functor> = Vec::new();
    for h in &inst.fibered {
        all.extend(h.scoped().into_iter().map(|m| h.functor(m).clone()));
    }
    for m in &inst.morphisms {
        all.extend(m.family.iter().cloned());
    }
    for e in &inst.ets {
        for x in inst.base.cat.objects() {
            for y in inst.base.cat.objects() {
                all.push(e.boxes.at(x, y).clone());
            }
        }
    }
    for f in &all {
        fl.absorb(functor_laws(f));
    }
    r.push(fl);
    r
}

fn skipped(r: &mut Report, cond: &str, subject: &str, why: &str) {
    r.push(Section::skipped(cond, subject, why));
}

/// Runs one suite; structures a suite needs but the instance lacks are reported as skipped.
pub fn run(inst: &Instance, suite: Suite) -> Report {
    let mut r = Report::new(suite.name());
    match suite {
        Suite::All => {
            for s in Suite::EACH {
                for sec in run(inst, s).sections {
                    r.push(renamed(sec, &format!("{}/", s.name())));
                }
            }
        }
        Suite::Category => r = category_suite(inst),
        Suite::Base => {
            r.extend(check_base(&inst.base));
            if inst.base.has_products() {
                r.extend(check_products(&inst.base));
            }
        }
        Suite::Fibered => {
            for h in &inst.fibered {
                r.extend(check_fib_axioms(h));
                r.push(check_coherence(h));
            }
            for a in &inst.adjunctions {
                r.push(a.check());
            }
        }
        Suite::Morphism => {
            for m in &inst.morphisms {
                match full_morphism(inst, m) {
                    None => skipped(&mut r, "morphism", &m.name, "no full transitions"),
                    Some(Ok(fm)) => r.extend(check_mor_axioms(&fm)),
                    Some(Err(e)) => r.push(failed("morphism", &m.name, e)),
                }
            }
        }
        Suite::Skeleton => {
            for m in &inst.morphisms {
                match skeleton_of(inst, m) {
                    None => skipped(&mut r, "skeleton", &m.name, "no skeleton data"),
                    Some(Ok(s)) => {
                        r.extend(check_skeleton(&s));
                        for sec in check_skeleton_ct(&s).sections {
                            if sec.condition.starts_with("cartesian-") || sec.condition.starts_with("triangle-") {
                                r.push(sec);
                            }
                        }
                        r.push(factorization_independence(&s));
                    }
                    Some(Err(e)) => r.push(failed("skeleton", &m.name, e)),
                }
            }
        }
        Suite::Core => {
            for m in &inst.morphisms {
                match core_of(inst, m) {
                    None => skipped(&mut r, "core", &m.name, "no core data or adjoints"),
                    Some(Ok(c)) => r.extend(check_core(&c)),
                    Some(Err(DeriveError::NotInvertible(e))) => skipped(&mut r, "core", &m.name, &format!("no core presentation: {e}")),
                    Some(Err(DeriveError::Invalid(e))) => r.push(failed("core", &m.name, e)),
                }
            }
        }
        Suite::Ets => {
            for e in &inst.ets {
                match ets_full(inst, e) {
                    None => skipped(&mut r, "ets", &e.name, "no full monoidality cells"),
                    Some(Ok(d)) => {
                        r.extend(check_mets(&d));
                        constraint_reports(&mut r, inst, e, &d, "");
                    }
                    Some(Err(err)) => r.push(failed("ets", &e.name, err)),
                }
            }
            for me in &inst.mor_ets {
                let Some(rho) = me.rho.as_ref() else {
                    skipped(&mut r, "rho-hexagon", &me.name, "no full rho table");
                    continue;
                };
                match mor_ets_full(inst, me, rho) {
                    None => skipped(&mut r, "rho-hexagon", &me.name, "full structures unavailable"),
                    Some(Ok(x)) => r.extend(check_mor_ets(&x)),
                    Some(Err(err)) => r.push(failed("rho-hexagon", &me.name, err)),
                }
            }
        }
        Suite::EtsSkeleton => {
            for e in &inst.ets {
                match ets_skeleton_of(inst, e) {
                    None => skipped(&mut r, "ets-skeleton", &e.name, "no skeleton cells"),
                    Some(Ok(s)) => {
                        r.extend(check_ets_skeleton(&s));
                        for sec in check_ets_ct(&s).sections {
                            if sec.condition.starts_with("cartesian-") || sec.condition.starts_with("triangle-") {
                                r.push(sec);
                            }
                        }
                        r.push(crate::ets::ets_factorization_independence(&s));
                        if e.assoc.is_some() || e.comm.is_some() {
                            match extend_ets_skeleton(&s) {
                                Ok(full) => constraint_reports(&mut r, inst, e, &full, "extended-"),
                                Err(err) => skipped(&mut r, "extended-constraints", &e.name, &err.to_string()),
                            }
                        }
                    }
                    Some(Err(err)) => r.push(failed("ets-skeleton", &e.name, err)),
                }
            }
            for me in &inst.mor_ets {
                let (Some(sm), Some(cl)) = (me.rho_sm.as_ref().or(me.rho.as_ref()), me.rho_cl.as_ref().or(me.rho.as_ref())) else {
                    skipped(&mut r, "rho-coincide", &me.name, "no rho table");
                    continue;
                };
                match mor_ets_skeleton(inst, me, sm, cl) {
                    None => skipped(&mut r, "rho-coincide", &me.name, "skeleton structures unavailable"),
                    Some(Ok((a, b))) => r.extend(check_mor_ets_skeleton(&a, &b)),
                    Some(Err(err)) => r.push(failed("rho-coincide", &me.name, err)),
                }
            }
        }
        Suite::Etc => {
            for e in &inst.ets {
                match etc_of(inst, e) {
                    None => skipped(&mut r, "etc", &e.name, "no core cells or adjoints"),
                    Some(Ok(c)) => {
                        r.extend(check_etc(&c));
                        if e.assoc.is_some() || e.comm.is_some() {
                            match ets_core_to_skeleton(&c).and_then(|s| extend_ets_skeleton(&s)) {
                                Ok(full) => constraint_reports(&mut r, inst, e, &full, "core-extended-"),
                                Err(err) => skipped(&mut r, "core-extended-constraints", &e.name, &err.to_string()),
                            }
                        }
                    }
                    Some(Err(DeriveError::NotInvertible(err))) => skipped(&mut r, "etc", &e.name, &format!("no core presentation: {err}")),
                    Some(Err(DeriveError::Invalid(err))) => r.push(failed("etc", &e.name, err)),
                }
            }
            for me in &inst.mor_ets {
                if let (Some(sm), Some(cl)) = (&me.rho_sm, &me.rho_cl) {
                    r.push(rho_coincidence(inst, &me.name, sm, cl));
                }
                match mor_ets_core(inst, me) {
                    None => skipped(&mut r, "core-rho", &me.name, "core structures unavailable"),
                    Some(Ok((sm, cl))) => {
                        for s in check_mor_ets(&sm).sections {
                            r.push(renamed(s, "smooth-"));
                        }
                        for s in check_mor_ets(&cl).sections {
                            r.push(renamed(s, "closed-"));
                        }
                    }
                    Some(Err(DeriveError::NotInvertible(err))) => skipped(&mut r, "core-rho", &me.name, &format!("no core presentation: {err}")),
                    Some(Err(DeriveError::Invalid(err))) => r.push(failed("core-rho", &me.name, err)),
                }
            }
            r.extend(adjunction_calculus(inst));
        }
        Suite::Localic => {
            if inst.base.initial.is_none() {
                skipped(&mut r, "localic", &inst.name, "the base declares no initial object");
                return r;
            }
            for (i, h) in inst.fibered.iter().enumerate() {
                match (assignment(inst, i, Side::Left), assignment(inst, i, Side::Right)) {
                    (Some(sl), Some(cr)) => {
                        r.extend(check_localic_partial(&LocalicData { host: h.clone(), smooth_left: sl, closed_right: cr }))
                    }
                    _ => skipped(&mut r, "localic", &h.name, "adjoints unavailable"),
                }
            }
        }
    }
    r
}

/// `ρ` restricted to the smooth and the closed parts of the skeleton structures.
pub fn mor_ets_skeleton(
    inst: &Instance,
    r: &MorEtsEntry,
    sm: &crate::instance::ObjPairCells,
    cl: &crate::instance::ObjPairCells,
) -> Option<Result<(MorEts, MorEts), String>> {
    let s = skeleton_of(inst, &inst.morphisms[r.morphism])?;
    let e1 = ets_skeleton_of(inst, &inst.ets[r.source_ets])?;
    let e2 = ets_skeleton_of(inst, &inst.ets[r.target_ets])?;
    Some((|| {
        let (s, e1, e2) = (s?, e1?, e2?);
        let a = MorEts::new(&r.name, s.sm.clone(), e1.sm.clone(), e2.sm.clone(), sm.clone()).map_err(|e| e.to_string())?;
        let b = MorEts::new(&r.name, s.cl.clone(), e1.cl.clone(), e2.cl.clone(), cl.clone()).map_err(|e| e.to_string())?;
        Ok((a, b))
    })())
}

/// Fills in the full structure from skeleton or core data.
pub fn extend(inst: &Instance, what: Extension) -> Result<Instance, String> {
    let mut out = inst.clone();
    match what {
        Extension::Skeleton | Extension::Core => {
            for (i, m) in inst.morphisms.iter().enumerate() {
                let s = match what {
                    Extension::Core => match core_of(inst, m) {
                        Some(c) => core_to_skeleton(&c.map_err(|e| e.to_string())?).map_err(|e| e.to_string())?,
                        None => continue,
                    },
                    _ => match skeleton_of(inst, m) {
                        Some(s) => s?,
                        None => continue,
                    },
                };
                let full = extend_skeleton(&s).map_err(|e| format!("{}: {e}", m.name))?;
                let e = &mut out.morphisms[i];
                e.theta = Some(full.thetas().to_vec());
                e.theta_sm = Some(s.sm.thetas().to_vec());
                e.theta_cl = Some(s.cl.thetas().to_vec());
            }
        }
        Extension::EtsSkeleton | Extension::Etc => {
            for (i, e) in inst.ets.iter().enumerate() {
                let s = match what {
                    Extension::Etc => match etc_of(inst, e) {
                        Some(c) => ets_core_to_skeleton(&c.map_err(|e| e.to_string())?).map_err(|e| e.to_string())?,
                        None => continue,
                    },
                    _ => match ets_skeleton_of(inst, e) {
                        Some(s) => s?,
                        None => continue,
                    },
                };
                let full = extend_ets_skeleton(&s).map_err(|err| format!("{}: {err}", e.name))?;
                let o = &mut out.ets[i];
                o.m = Some(full.cells().clone());
                o.m_sm = Some(s.sm.cells().clone());
                o.m_cl = Some(s.cl.cells().clone());
            }
        }
    }
    Ok(out)
}
