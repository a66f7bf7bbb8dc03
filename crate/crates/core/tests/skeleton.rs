mod common;

use std::sync::Arc;

use common::{adjoints, coboundary_morphism, cochain, factor, identity_family, inv, transitions, twisted_host, value, N};
use fibcat::adjoint::Side;
use fibcat::base::{BaseCat, Scope};
use fibcat::fibered::check_mor_axioms;
use fibcat::generators::{lattice_base, Lattice, Marking};
use fibcat::skeleton::{
    check_core, check_skeleton, check_skeleton_ct, core_exchange_passed, core_to_skeleton, extend_skeleton,
    factorization_independence, restrict_to_skeleton, skeleton_to_core, SkeletonData, SkeletonError,
};
use proptest::prelude::*;

fn base(l: Lattice, mk: Marking) -> Arc<BaseCat> {
    lattice_base(l, mk, false)
}

fn by_name(b: &BaseCat, name: &str) -> fibcat::fincat::MorId {
    b.cat.mor_by_name(name).unwrap()
}

fn raw() -> impl Strategy<Value = Vec<u32>> {
    proptest::collection::vec(0u32..N, 27)
}

fn steps() -> impl Strategy<Value = Vec<u32>> {
    proptest::collection::vec(1u32..N, 3)
}

#[test]
fn disagreeing_smooth_and_closed_transitions_are_not_independent() {
    let b = base(Lattice::Powerset(2), Marking::All);
    let m = coboundary_morphism(&b, &[3, 5], &cochain(&b, &[2; 27]), &cochain(&b, &[4; 27]));
    let s = restrict_to_skeleton(&m);
    assert!(check_skeleton(&s).passed());
    assert!(factorization_independence(&s).passed());

    let f = by_name(&b, "o->1");
    let mut w = cochain(&b, &[4; 27]);
    w[f.ix()] = (w[f.ix()] + 1) % N;
    let bad = SkeletonData::new("bad", s.source.clone(), s.target.clone(), identity_family(&b), transitions(&s.sm.source, &w), s.cl.thetas().to_vec()).unwrap();
    let r = check_skeleton(&bad);
    assert!(!r.section("smooth-closed-coincide").unwrap().passed());
    let sec = factorization_independence(&bad);
    assert!(sec.violations.iter().any(|v| v.witness[0] == "o->1"));
    match extend_skeleton(&bad) {
        Err(SkeletonError::IndependenceFailure { morphism, .. }) => assert_eq!(morphism, "o->1"),
        other => panic!("expected an independence failure, got {other:?}"),
    }
}

#[test]
fn a_chain_without_a_mixed_factorization_cannot_be_extended() {
    let b = base(Lattice::Chain(4), Marking::Split);
    let h = Arc::new(twisted_host(&b, &[1, 1, 1], &cochain(&b, &[0; 27])));
    let th = transitions(&h, &[0; 27]);
    let s = SkeletonData::new("s", h.clone(), h, identity_family(&b), th.clone(), th).unwrap();
    assert!(matches!(extend_skeleton(&s), Err(SkeletonError::NoFactorization { ref morphism }) if morphism == "o->123"));
}

proptest! {
    // On chain3 split every morphism factors once: o->1 closed, then 1->12 smooth.
    // θ(o->12) = c2 - c1 + k_{o->1} θ(1->12) + θ(o->1) at the pair (1->12, o->1).
    #[test]
    fn a_chain_skeleton_extends_by_the_pasting_formula(s in steps(), u1 in raw(), u2 in raw(), w in raw()) {
        let b = base(Lattice::Chain(3), Marking::Split);
        let h1 = Arc::new(twisted_host(&b, &s, &cochain(&b, &u1)));
        let h2 = Arc::new(twisted_host(&b, &s, &cochain(&b, &u2)));
        let th = transitions(&h1, &cochain(&b, &w));
        let sk = SkeletonData::new("s", h1.clone(), h2.clone(), identity_family(&b), th.clone(), th).unwrap();
        prop_assert!(check_skeleton(&sk).passed());
        let full = extend_skeleton(&sk).unwrap();
        prop_assert!(check_mor_axioms(&full).passed());
        let (z, p, f) = (by_name(&b, "o->1"), by_name(&b, "1->12"), by_name(&b, "o->12"));
        let c1 = value(h1.comparison(p, z));
        let c2 = value(h2.comparison(p, z));
        let w = cochain(&b, &w);
        let want = (c2 + N - c1 + factor(&b, &s, z) * w[p.ix()] + w[z.ix()]) % N;
        prop_assert_eq!(value(full.theta(f)), want);
        let back = restrict_to_skeleton(&full);
        for g in [z, p] {
            prop_assert!(back.sm.try_theta(g).map_or(true, |t| t.same(sk.sm.theta(g))));
            prop_assert!(back.cl.try_theta(g).map_or(true, |t| t.same(sk.cl.theta(g))));
        }
    }

    // Restricting a valid morphism and extending again is the identity.
    #[test]
    fn restriction_then_extension_is_the_identity(s in steps(), u in raw(), v in raw(), n in 2u8..4) {
        let b = base(Lattice::Powerset(n), Marking::All);
        let m = coboundary_morphism(&b, &s, &cochain(&b, &u), &cochain(&b, &v));
        let sk = restrict_to_skeleton(&m);
        prop_assert!(check_skeleton(&sk).passed());
        prop_assert!(check_skeleton_ct(&sk).passed());
        let back = extend_skeleton(&sk).unwrap();
        for f in b.cat.morphisms() {
            prop_assert!(back.theta(f).same(m.theta(f)));
        }
    }

    // Right adjoints scale(1/k) with zero units transpose θ_z to θ_z / k_z.
    #[test]
    fn core_form_divides_closed_transitions_by_the_scale(s in steps(), u in raw(), v in raw()) {
        let b = base(Lattice::Powerset(2), Marking::Split);
        let m = coboundary_morphism(&b, &s, &cochain(&b, &u), &cochain(&b, &v));
        let sk = restrict_to_skeleton(&m);
        prop_assert!(check_skeleton(&sk).passed());
        let (h1, h2) = (m.source.clone(), m.target.clone());
        let sm_left = (adjoints(&h1, &s, Side::Left, Scope::Smooth), adjoints(&h2, &s, Side::Left, Scope::Smooth));
        let cl_right = (adjoints(&h1, &s, Side::Right, Scope::Closed), adjoints(&h2, &s, Side::Right, Scope::Closed));
        let core = skeleton_to_core(&sk, sm_left, cl_right).unwrap();
        for z in b.scoped(Scope::Closed) {
            let want = value(m.theta(z)) * inv(factor(&b, &s, z)) % N;
            prop_assert_eq!(value(core.cl_bar[z.ix()].as_ref().unwrap()), want);
        }
        let r = check_core(&core);
        prop_assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        prop_assert!(core_exchange_passed(&r));
        let again = core_to_skeleton(&core).unwrap();
        for z in b.scoped(Scope::Closed) {
            prop_assert!(again.cl.theta(z).same(sk.cl.theta(z)));
        }
    }
}
