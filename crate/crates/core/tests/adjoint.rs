mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use common::{arrow, chain4, cochain, equivalence, factor, inv, twisted_host, value, zn, N};
use fibcat::adjoint::{
    beck_chevalley, check_adjunction, derive_opposite_conn, transpose_back_theta, transpose_theta, AdjointAssignment,
    AdjointError, Adjunction, Side,
};
use fibcat::base::{BaseCat, Scope, Square};
use fibcat::fibered::{check_fib_axioms, FibMorphism, FiberedCat};
use fibcat::fincat::{FinCat, Functor, MorId, NatTrans, ObjId};
use proptest::prelude::*;

/// `f_# = scale(1/k_f) ⊣ f^* = scale(k_f)` for every morphism of the host.
fn left_adjoints(h: &Arc<FiberedCat>, steps: &[u32]) -> AdjointAssignment {
    let b = &h.base;
    let given: BTreeMap<MorId, Adjunction> =
        b.cat.morphisms().filter(|&f| !b.is_id(f)).map(|f| (f, equivalence(inv(factor(b, steps, f)), 0).unwrap())).collect();
    AdjointAssignment::new(h.clone(), Side::Left, Scope::All, given).unwrap()
}

fn host(steps: &[u32], raw: &[u32]) -> (Arc<BaseCat>, Arc<FiberedCat>) {
    let b = chain4();
    let h = Arc::new(twisted_host(&b, steps, &cochain(&b, raw)));
    (b, h)
}

#[test]
fn equivalences_satisfy_the_triangle_identities() {
    for k in 1..N {
        assert!(check_adjunction(&equivalence(k, 0).unwrap()).passed());
    }
}

#[test]
fn a_shifted_unit_breaks_both_triangles() {
    let s = check_adjunction(&equivalence(3, 2).unwrap());
    let laws: Vec<&str> = s.violations.iter().map(|v| v.law.as_str()).collect();
    assert_eq!(laws, ["left-triangle", "right-triangle"]);
}

#[test]
fn a_reflection_onto_the_terminal_object_is_an_adjunction() {
    let a = arrow();
    let t = FinCat::terminal();
    let bang = Functor::new("!", &a, &t, vec![ObjId(0); 2], vec![MorId(0); 3]).unwrap();
    let pick_b = Functor::new("b", &t, &a, vec![ObjId(1)], vec![a.id(ObjId(1))]).unwrap();
    let f = a.mor_by_name("f").unwrap();
    let unit = NatTrans::new(&Functor::identity(&a), &Functor::compose(&pick_b, &bang), vec![f, a.id(ObjId(1))]).unwrap();
    let counit = NatTrans::new(&Functor::compose(&bang, &pick_b), &Functor::identity(&t), vec![MorId(0)]).unwrap();
    let adj = Adjunction::new(bang.clone(), pick_b.clone(), unit.clone(), counit.clone()).unwrap();
    assert!(check_adjunction(&adj).passed());
    // the legs in the wrong order do not even type-check
    assert!(Adjunction::new(pick_b, bang, unit, counit).is_err());
}

#[test]
fn assignments_need_an_adjoint_of_each_marked_inverse_image() {
    let (b, h) = host(&[3, 5, 2], &[0; 10]);
    let f = b.cat.mor_by_name("o->1").unwrap();
    let mut given: BTreeMap<MorId, Adjunction> = BTreeMap::new();
    let err = AdjointAssignment::new(h.clone(), Side::Left, Scope::All, given.clone()).unwrap_err();
    assert!(matches!(err, AdjointError::MissingEntry(_)));
    // f^* = x3, but this entry has right leg x5
    given.insert(f, equivalence(3, 0).unwrap());
    let err = AdjointAssignment::new(h.clone(), Side::Left, Scope::All, given).unwrap_err();
    assert!(matches!(err, AdjointError::BadEntry { ref morphism, .. } if morphism == "o->1"), "{err:?}");
    assert!(matches!(
        AdjointAssignment::identities(h, Side::Left, Scope::All),
        Err(AdjointError::BadEntry { .. })
    ));
}

#[test]
fn a_non_commuting_square_has_no_exchange_map() {
    let (b, h) = host(&[1, 1, 1], &[0; 10]);
    let a = left_adjoints(&h, &[1, 1, 1]);
    let m = |n: &str| b.cat.mor_by_name(n).unwrap();
    let sq = Square { top: m("o->1"), left: m("id_o"), right: m("1->12"), bottom: m("o->1") };
    assert!(matches!(beck_chevalley(&h, &sq, &a), Err(AdjointError::SquareNotCommuting)));
}

proptest! {
    // conn(f, g) = k_f u(g) + u(f) - u(gf); its direct-image partner is -(conn)/k_{gf}.
    #[test]
    fn derived_direct_comparisons_match_the_closed_form(
        steps in proptest::collection::vec(1u32..N, 3),
        raw in proptest::collection::vec(0u32..N, 10),
    ) {
        let (b, h) = host(&steps, &raw);
        let a = left_adjoints(&h, &steps);
        prop_assert!(a.check().passed());
        let d = derive_opposite_conn(&h, &a).unwrap();
        prop_assert!(check_fib_axioms(&d).passed());
        for (f, g) in b.composable_pairs(Scope::All) {
            let gf = b.compose(g, f);
            let want = (N - value(h.conn(f, g))) * inv(factor(&b, &steps, gf)) % N;
            prop_assert_eq!(value(d.conn(f, g)), want);
        }
    }

    // With zero units the transpose is -θ/k, and transposing back recovers θ.
    #[test]
    fn transposition_is_negation_over_the_scale_and_inverts(
        steps in proptest::collection::vec(1u32..N, 3),
        raw in proptest::collection::vec(0u32..N, 10),
        theta in proptest::collection::vec(0u32..N, 10),
    ) {
        let (b, h1) = host(&steps, &raw);
        let u = cochain(&b, &raw);
        let th = cochain(&b, &theta);
        let target: Vec<u32> = u.iter().zip(&th).map(|(x, t)| (x + N - t) % N).collect();
        let h2 = Arc::new(twisted_host(&b, &steps, &target));
        let thetas: Vec<Option<NatTrans>> = b.cat.morphisms()
            .map(|f| Some(NatTrans::new(h1.functor(f), h1.functor(f), vec![MorId(th[f.ix()])]).unwrap()))
            .collect();
        let m = FibMorphism::new("R", h1.clone(), h2.clone(), vec![Functor::identity(&zn(N)); 4], thetas).unwrap();
        let (a1, a2) = (left_adjoints(&h1, &steps), left_adjoints(&h2, &steps));
        let tr = transpose_theta(&m, &a1, &a2).unwrap();
        prop_assert!(tr.invertible());
        for f in b.cat.morphisms() {
            let want = (N - th[f.ix()]) * inv(factor(&b, &steps, f)) % N;
            prop_assert_eq!(value(tr.bar(f)), want);
        }
        let back = transpose_back_theta(m.family(), &tr.bars, &a1, &a2).unwrap();
        for f in b.cat.morphisms() {
            prop_assert!(back[f.ix()].as_ref().unwrap().same(m.theta(f)));
        }
    }

    // p'_# f'^* => f^* p_# reduces to (conn(p', f) - conn(f', p)) / k_{p'}.
    #[test]
    fn exchange_maps_match_the_closed_form(
        steps in proptest::collection::vec(1u32..N, 3),
        raw in proptest::collection::vec(0u32..N, 10),
    ) {
        let (b, h) = host(&steps, &raw);
        let a = left_adjoints(&h, &steps);
        let squares = b.mixed_squares();
        prop_assert!(!squares.is_empty());
        for sq in squares {
            let ex = beck_chevalley(&h, &sq, &a).unwrap();
            prop_assert!(ex.non_invertible.is_empty());
            let diff = (value(h.conn(sq.left, sq.bottom)) + N - value(h.conn(sq.top, sq.right))) % N;
            prop_assert_eq!(value(&ex.map), diff * inv(factor(&b, &steps, sq.left)) % N);
        }
    }
}
