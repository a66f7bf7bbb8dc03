mod common;

use std::collections::HashMap;
use std::sync::Arc;

use common::{coboundary_morphism, cochain, identity_family, twisted_host, value, zn, N};
use fibcat::base::BaseCat;
use fibcat::fibered::FiberedCat;
use fibcat::fincat::{FinCat, Functor, MorId, NatTrans, ObjId};
use fibcat::generators::{lattice_base, Lattice, Marking};
use fibcat::ets::{
    assoc_boundary, check_assoc, check_comm, check_ets_ct, check_ets_skeleton, check_mets, check_mor_ets,
    comm_boundary, extend_ets_skeleton, ets_factorization_independence, m_boundary, restrict_ets, rho_boundary,
    AssocConstraint, Boxes, CommConstraint, EtsData, EtsError, EtsSkeleton, MorEts,
};
use proptest::prelude::*;

const ONES: [u32; 3] = [1, 1, 1];

/// `(a, b) ↦ a + b` on `Z_7 × Z_7`.
fn sum(c: &FinCat) -> Functor {
    let p = FinCat::product(&[c.clone(), c.clone()]);
    let mors = p
        .morphisms()
        .map(|m| {
            let v = p.split_mor(m);
            MorId((v[0].0 + v[1].0) % N)
        })
        .collect();
    Functor::new("+", &p, c, vec![ObjId(0)], mors).unwrap()
}

fn sum_boxes(b: &Arc<BaseCat>) -> Arc<Boxes> {
    let c = zn(N);
    let plus = sum(&c);
    let map = b.cat.objects().flat_map(|x| b.cat.objects().map(move |y| (x, y))).map(|k| (k, plus.clone())).collect();
    Arc::new(Boxes::new(b.clone(), &vec![c; b.cat.n_objects()], map).unwrap())
}

/// Cells `m(f1, f2) = u(f1 × f2) - u(f1) - u(f2)`, the tensor partner of the coboundary of `u`.
fn coboundary_cells(h: &FiberedCat, boxes: &Boxes, u: &[u32]) -> HashMap<(MorId, MorId), NatTrans> {
    let b = &h.base;
    let mut cells = HashMap::new();
    for f1 in h.scoped() {
        for f2 in h.scoped() {
            let v = (u[b.times(f1, f2).ix()] + 2 * N - u[f1.ix()] - u[f2.ix()]) % N;
            let (src, tgt) = m_boundary(h, boxes, f1, f2);
            cells.insert((f1, f2), NatTrans::new(&src, &tgt, vec![MorId(v)]).unwrap());
        }
    }
    cells
}

fn ets(b: &Arc<BaseCat>, u: &[u32]) -> EtsData {
    let h = Arc::new(twisted_host(b, &ONES, u));
    let boxes = sum_boxes(b);
    let cells = coboundary_cells(&h, &boxes, u);
    EtsData::new("E", h, boxes, cells).unwrap()
}

fn with_cell(e: &EtsData, key: (MorId, MorId), v: u32) -> EtsData {
    let mut cells = e.cells().clone();
    let old = cells[&key].clone();
    cells.insert(key, NatTrans::new(old.source(), old.target(), vec![MorId(v)]).unwrap());
    EtsData::new("E'", e.host.clone(), e.boxes.clone(), cells).unwrap()
}

fn powerset(n: u8, mk: Marking) -> Arc<BaseCat> {
    lattice_base(Lattice::Powerset(n), mk, false)
}

fn by_name(b: &BaseCat, name: &str) -> MorId {
    b.cat.mor_by_name(name).unwrap()
}

fn raw() -> impl Strategy<Value = Vec<u32>> {
    proptest::collection::vec(0u32..N, 27)
}

#[test]
fn boxes_must_cover_every_pair_with_the_right_type() {
    let b = powerset(1, Marking::All);
    let c = zn(N);
    let mut map = HashMap::new();
    map.insert((ObjId(0), ObjId(0)), sum(&c));
    assert!(matches!(Boxes::new(b.clone(), &[c.clone(), c.clone()], map), Err(EtsError::BadBox(..))));
    let chain = lattice_base(Lattice::Chain(2), Marking::All, false);
    let bare = Arc::new(BaseCat::new(chain.cat.clone(), &[], &[], None, None, None));
    assert!(matches!(Boxes::new(bare, &[c.clone(), c], HashMap::new()), Err(EtsError::NoProducts(_))));
}

#[test]
fn a_composite_cell_that_ignores_its_factors_breaks_the_square() {
    let b = powerset(2, Marking::All);
    let e = ets(&b, &cochain(&b, &[3; 27]));
    assert!(check_mets(&e).passed());
    // m(o->12, id_o) must be m(1->12, id_o) + m(o->1, id_o) plus comparisons
    let key = (by_name(&b, "o->12"), by_name(&b, "id_o"));
    let bad = with_cell(&e, key, (value(e.cell(key.0, key.1)) + 1) % N);
    let r = check_mets(&bad);
    let failing: Vec<&str> = r.failures().map(|s| s.condition.as_str()).collect();
    assert_eq!(failing, ["monoidality-square"]);
}

#[test]
fn a_constant_associator_fails_the_pentagon() {
    let b = powerset(2, Marking::All);
    let e = ets(&b, &cochain(&b, &[0; 27]));
    let objs: Vec<ObjId> = b.cat.objects().collect();
    let mut cells = HashMap::new();
    for &x in &objs {
        for &y in &objs {
            for &z in &objs {
                let (src, tgt) = assoc_boundary(&e.host, &e.boxes, x, y, z);
                cells.insert((x, y, z), NatTrans::new(&src, &tgt, vec![MorId(2)]).unwrap());
            }
        }
    }
    let r = check_assoc(&e, &AssocConstraint::new(&e, cells).unwrap());
    assert!(!r.section("pentagon").unwrap().passed());
    assert!(check_assoc(&e, &AssocConstraint::new(&e, HashMap::new()).unwrap()).passed());
}

#[test]
fn a_one_sided_commutator_is_not_involutive() {
    let b = powerset(2, Marking::All);
    let e = ets(&b, &cochain(&b, &[5; 27]));
    let one = |x: ObjId, y: ObjId, v: u32| {
        let (src, tgt) = comm_boundary(&e.host, &e.boxes, x, y).unwrap();
        NatTrans::new(&src, &tgt, vec![MorId(v)]).unwrap()
    };
    let (s1, s2) = (b.cat.obj_by_name("1").unwrap(), b.cat.obj_by_name("2").unwrap());
    let mut cells = HashMap::new();
    cells.insert((s1, s2), one(s1, s2, 3));
    let r = check_comm(&e, &CommConstraint::new(&e, cells.clone()).unwrap());
    assert!(!r.section("commutator-involution").unwrap().passed());
    // antisymmetric cells are involutive but still have to be natural in the morphisms
    cells.insert((s2, s1), one(s2, s1, N - 3));
    let r = check_comm(&e, &CommConstraint::new(&e, cells).unwrap());
    assert!(r.section("commutator-involution").unwrap().passed());
    assert!(!r.section("commutator-monoidality").unwrap().passed());
    assert!(check_comm(&e, &CommConstraint::new(&e, HashMap::new()).unwrap()).passed());
}

#[test]
fn disagreeing_smooth_and_closed_cells_are_not_independent() {
    let b = powerset(2, Marking::All);
    let e = ets(&b, &cochain(&b, &[1; 27]));
    let s = restrict_ets(&e);
    assert!(ets_factorization_independence(&s).passed());
    let key = (by_name(&b, "o->1"), by_name(&b, "id_2"));
    let mut m_sm = s.sm.cells().clone();
    let old = m_sm[&key].clone();
    m_sm.insert(key, NatTrans::new(old.source(), old.target(), vec![MorId((value(&old) + 1) % N)]).unwrap());
    let bad = EtsSkeleton::new("bad", e.host.clone(), e.boxes.clone(), m_sm, s.cl.cells().clone()).unwrap();
    assert!(!check_ets_skeleton(&bad).section("smooth-closed-coincide").unwrap().passed());
    assert!(!ets_factorization_independence(&bad).passed());
    assert!(matches!(extend_ets_skeleton(&bad), Err(EtsError::IndependenceFailure { .. })));
}

proptest! {
    // each case runs every tensor diagram over the base, so keep the count small
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coboundary_cells_satisfy_every_tensor_axiom(u in raw(), n in 1u8..3) {
        let b = powerset(n, Marking::All);
        let e = ets(&b, &cochain(&b, &u));
        prop_assert!(check_mets(&e).passed());
        prop_assert!(check_assoc(&e, &AssocConstraint::new(&e, HashMap::new()).unwrap()).passed());
        prop_assert!(check_comm(&e, &CommConstraint::new(&e, HashMap::new()).unwrap()).passed());
    }

    #[test]
    fn split_skeleta_restrict_and_extend_inversely(u in raw()) {
        let b = powerset(2, Marking::Split);
        let e = ets(&b, &cochain(&b, &u));
        let s = restrict_ets(&e);
        prop_assert!(check_ets_skeleton(&s).passed());
        prop_assert!(check_ets_ct(&s).passed());
        let back = extend_ets_skeleton(&s).unwrap();
        for (k, t) in e.cells() {
            prop_assert!(back.cell(k.0, k.1).same(t));
        }
    }

    // With θ = v from u to u - v the cells differ by v(f1 × f2) - v(f1) - v(f2),
    // so a constant ρ closes every hexagon and any other ρ does not.
    #[test]
    fn constant_rho_is_compatible_and_a_bump_is_not(u in raw(), v in raw(), r in 0u32..N, bump in 1u32..N) {
        let b = powerset(2, Marking::All);
        let (u, v) = (cochain(&b, &u), cochain(&b, &v));
        let m = coboundary_morphism(&b, &ONES, &u, &v);
        let uv: Vec<u32> = u.iter().zip(&v).map(|(x, d)| (x + N - d) % N).collect();
        let (e1, e2) = (ets(&b, &u), ets(&b, &uv));
        let family = identity_family(&b);
        let rho = |at: Option<(ObjId, ObjId)>| -> HashMap<(ObjId, ObjId), NatTrans> {
            let objs: Vec<ObjId> = b.cat.objects().collect();
            objs.iter().flat_map(|&x| objs.iter().map(move |&y| (x, y))).map(|(x, y)| {
                let (src, tgt) = rho_boundary(&family, &e1.boxes, &e2.boxes, x, y);
                let val = if at == Some((x, y)) { (r + bump) % N } else { r };
                ((x, y), NatTrans::new(&src, &tgt, vec![MorId(val)]).unwrap())
            }).collect()
        };
        let at = (b.cat.obj_by_name("1").unwrap(), b.cat.obj_by_name("12").unwrap());
        let (constant, bumped) = (rho(None), rho(Some(at)));
        let good = MorEts::new("rho", m.clone(), e1.clone(), e2.clone(), constant).unwrap();
        prop_assert!(check_mor_ets(&good).passed());
        let bad = MorEts::new("rho", m, e1, e2, bumped).unwrap();
        prop_assert!(!check_mor_ets(&bad).section("rho-hexagon").unwrap().passed());
    }
}
