use std::collections::BTreeMap;
use std::sync::Arc;

use fibcat::adjoint::{AdjointAssignment, Side};
use fibcat::base::{BaseCat, Scope};
use fibcat::fibered::FiberedCat;
use fibcat::fincat::MorId;
use fibcat::generators::{blueprint_base, lattice_base, strict_presheaf_instance, Blueprint, Lattice, Marking};
use fibcat::instance::Instance;
use fibcat::localic::{check_localic_partial, LocalicData, PARTIAL_NOTE};
use fibcat::report::Status;
use fibcat::suites::{run, Suite};

fn by_name(b: &BaseCat, name: &str) -> MorId {
    b.cat.mor_by_name(name).unwrap()
}

fn localic_instance(l: Lattice, bp: Blueprint) -> Instance {
    strict_presheaf_instance(blueprint_base(l, Marking::All, bp), bp).unwrap()
}

/// The first host of `inst` and its adjoints, moved onto `base`, which shares the category.
fn rebased(inst: &Instance, base: Arc<BaseCat>) -> LocalicData {
    let h = &inst.fibered[0];
    let functors = base.cat.morphisms().map(|f| Some(h.functor(f).clone())).collect();
    let host = Arc::new(
        FiberedCat::new("H", base.clone(), h.variance, h.scope, h.fibers().to_vec(), functors, Default::default()).unwrap(),
    );
    let moved = |a: &AdjointAssignment, side: Side, scope: Scope| {
        let given: BTreeMap<_, _> = a.entries().filter(|&(f, _)| !base.is_id(f)).map(|(f, e)| (f, e.clone())).collect();
        AdjointAssignment::new(host.clone(), side, scope, given).unwrap()
    };
    LocalicData {
        host: host.clone(),
        smooth_left: moved(&inst.adjunctions[0], Side::Left, Scope::Smooth),
        closed_right: moved(&inst.adjunctions[1], Side::Right, Scope::Closed),
    }
}

#[test]
fn chain_valued_presheaves_pass_with_a_partial_verdict() {
    // fibers C^S stay within the generator's size bound
    for (l, bp) in [(Lattice::Powerset(1), Blueprint::Cs2), (Lattice::Powerset(2), Blueprint::Cs2), (Lattice::Powerset(1), Blueprint::Cs3)] {
        let inst = localic_instance(l, bp);
        let r = run(&inst, Suite::Localic);
        assert!(r.passed(), "{} {:?}", inst.name, r.failures().collect::<Vec<_>>());
        let notes: Vec<_> = r.sections.iter().filter(|s| s.condition == "localic-status").collect();
        assert_eq!(notes.len(), inst.fibered.len());
        assert!(notes.iter().all(|s| s.note.as_deref() == Some(PARTIAL_NOTE)));
    }
}

#[test]
fn a_nontrivial_fiber_over_the_initial_object_fails() {
    let b = lattice_base(Lattice::Powerset(2), Marking::All, true);
    let inst = strict_presheaf_instance(b, Blueprint::Bz2).unwrap();
    let r = run(&inst, Suite::Localic);
    let s = r.section("initial-fiber-terminal").unwrap();
    assert!(!s.passed());
    assert_eq!(s.violations[0].witness, ["o"]);
    assert!(r.section("localic-status").is_none());
}

#[test]
fn a_base_without_an_initial_object_is_skipped() {
    let inst = strict_presheaf_instance(blueprint_base(Lattice::Powerset(2), Marking::All, Blueprint::Bz3), Blueprint::Bz3).unwrap();
    let r = run(&inst, Suite::Localic);
    assert!(!r.sections.is_empty());
    assert!(r.sections.iter().all(|s| s.status == Status::Skipped));
}

#[test]
fn missing_complements_fail_conservativity() {
    let inst = localic_instance(Lattice::Powerset(2), Blueprint::Cs2);
    let b = &inst.base;
    let sm: Vec<MorId> = b.scoped(Scope::Smooth).collect();
    let cl: Vec<MorId> = b.scoped(Scope::Closed).collect();
    let bare = Arc::new(BaseCat::new(b.cat.clone(), &sm, &cl, b.initial, None, None));
    let r = check_localic_partial(&rebased(&inst, bare));
    let failing: Vec<&str> = r.failures().map(|s| s.condition.as_str()).collect();
    assert_eq!(failing, ["complement-pair-conservative"]);
}

#[test]
fn a_wrong_complement_does_not_detect_isomorphisms() {
    let inst = localic_instance(Lattice::Powerset(2), Blueprint::Cs2);
    let b = &inst.base;
    let sm: Vec<MorId> = b.scoped(Scope::Smooth).collect();
    let cl: Vec<MorId> = b.scoped(Scope::Closed).collect();
    // pairing 1->12 with itself forgets the second coordinate twice
    let mut comps: Vec<(MorId, MorId)> = b.complements().unwrap().iter().map(|(&z, &u)| (z, u)).collect();
    let z = by_name(b, "1->12");
    for c in &mut comps {
        if c.0 == z {
            c.1 = z;
        }
    }
    let wrong = Arc::new(BaseCat::new(b.cat.clone(), &sm, &cl, b.initial, None, Some(comps)));
    let r = check_localic_partial(&rebased(&inst, wrong));
    let s = r.section("complement-pair-conservative").unwrap();
    assert!(!s.passed());
    assert!(s.violations.iter().all(|v| v.witness[0] == "1->12" && v.witness[1] == "1->12"));
    assert!(r.section("initial-fiber-terminal").unwrap().passed());
}
