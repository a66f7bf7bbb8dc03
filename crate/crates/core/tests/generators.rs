use fibcat::fincat::MorId;
use fibcat::generators::{
    battery_sources, blueprint_base, candidate_mutations, cell_at, coverable, full_tables, lattice_base, mutate_instance,
    oracle_tables, random_twist, strict_presheaf_instance, twist_instance, twist_oracle, twisted_entry, with_form,
    Address, Blueprint, CellForm, Form, GenError, Lattice, Marking, MutationSpec,
};
use fibcat::instance::Instance;
use fibcat::suites::{run, Suite};
use proptest::prelude::*;

fn strict(l: Lattice, mk: Marking, bp: Blueprint) -> Instance {
    strict_presheaf_instance(blueprint_base(l, mk, bp), bp).unwrap()
}

#[test]
fn names_parse_back_and_out_of_range_names_are_rejected() {
    for n in 2..=8 {
        assert_eq!(Lattice::Chain(n).name().parse::<Lattice>().unwrap(), Lattice::Chain(n));
    }
    for n in 1..=3 {
        assert_eq!(Lattice::Powerset(n).name().parse::<Lattice>().unwrap(), Lattice::Powerset(n));
    }
    for bad in ["chain1", "chain9", "powerset0", "powerset4", "powerset9", "chain", "cube2"] {
        assert!(matches!(bad.parse::<Lattice>(), Err(GenError::BadBlueprint(_))), "{bad}");
    }
    for mk in [Marking::All, Marking::ClosedOnly, Marking::SmoothOnly, Marking::Split] {
        assert_eq!(mk.name().parse::<Marking>().unwrap(), mk);
    }
    assert!("both".parse::<Marking>().is_err());
    for bp in Blueprint::EACH {
        assert_eq!(bp.name().parse::<Blueprint>().unwrap(), bp);
    }
    assert!("bz5".parse::<Blueprint>().is_err());
}

#[test]
fn lattice_bases_have_the_expected_size() {
    for n in 1..=3u32 {
        let b = lattice_base(Lattice::Powerset(n as u8), Marking::All, false);
        // one inclusion per pair A ⊆ S, i.e. per element placed in A, S \ A or neither
        assert_eq!((b.cat.n_objects(), b.cat.n_morphisms()), (1 << n, 3usize.pow(n)));
    }
    for n in 2..=8usize {
        let b = lattice_base(Lattice::Chain(n as u8), Marking::All, false);
        assert_eq!((b.cat.n_objects(), b.cat.n_morphisms()), (n, n * (n + 1) / 2));
    }
}

#[test]
fn strict_instances_pass_every_suite_in_every_form() {
    for (l, mk, bp) in [
        (Lattice::Chain(2), Marking::All, Blueprint::Bz3),
        (Lattice::Chain(3), Marking::Split, Blueprint::Monoid),
        (Lattice::Powerset(2), Marking::All, Blueprint::Poset2),
        (Lattice::Powerset(2), Marking::Split, Blueprint::S3),
    ] {
        let inst = strict(l, mk, bp);
        for form in [Form::Full, Form::Skeleton, Form::Core] {
            let f = with_form(&inst, form).unwrap();
            let r = run(&f, Suite::All);
            assert!(r.passed(), "{}: {:?}", f.name, r.failures().map(|s| &s.condition).collect::<Vec<_>>());
        }
    }
}

#[test]
fn presentations_carry_only_their_own_tables() {
    let inst = strict(Lattice::Powerset(2), Marking::All, Blueprint::Bz2);
    let sk = with_form(&inst, Form::Skeleton).unwrap();
    let m = &sk.morphisms[0];
    assert!(m.theta.is_none() && m.theta_sm.is_some() && m.theta_cl.is_some() && m.theta_bar_cl.is_none());
    let core = with_form(&inst, Form::Core).unwrap();
    let m = &core.morphisms[0];
    assert!(m.theta.is_none() && m.theta_sm.is_some() && m.theta_cl.is_none() && m.theta_bar_cl.is_some());
    // re-presenting needs the full tables
    assert!(matches!(with_form(&sk, Form::Core), Err(GenError::Build(_))));
    assert_eq!(full_tables(&with_form(&inst, Form::Full).unwrap()), full_tables(&inst));
}

#[test]
fn mutations_must_replace_a_component_by_a_different_parallel_one() {
    let inst = twisted_entry(Lattice::Powerset(2), Marking::All, Blueprint::Bz3, 5).unwrap().instance;
    let spec = candidate_mutations(&inst)[0];
    let old = cell_at(&inst, &spec.address).unwrap().at(spec.address.object());
    let same = MutationSpec { replacement: old, ..spec };
    assert!(matches!(mutate_instance(&inst, &same), Err(GenError::AddressInvalid(_))));
    let far = MutationSpec { replacement: MorId(999), ..spec };
    assert!(matches!(mutate_instance(&inst, &far), Err(GenError::AddressInvalid(_))));
    let f = inst.base.cat.mor_by_name("o->1").unwrap();
    let nowhere = MutationSpec { address: Address::Theta { morphism: 7, form: CellForm::Full, f, object: spec.address.object() }, ..spec };
    assert!(matches!(mutate_instance(&inst, &nowhere), Err(GenError::AddressInvalid(_))));
    let absent = MutationSpec { address: Address::Theta { morphism: 0, form: CellForm::ClosedBar, f, object: spec.address.object() }, ..spec };
    assert!(matches!(mutate_instance(&inst, &absent), Err(GenError::AddressInvalid(_))));
    let bad = mutate_instance(&inst, &spec).unwrap();
    assert_ne!(bad.name, inst.name);
}

#[test]
fn a_lone_transition_without_neighbors_is_invisible() {
    // chain2 has one non-identity morphism, so θ on it enters no equation once ρ is gone
    let mut inst = twisted_entry(Lattice::Chain(2), Marking::All, Blueprint::Bz3, 11).unwrap().instance;
    inst.mor_ets.clear();
    let f = inst.base.cat.mor_by_name("o->1").unwrap();
    let specs: Vec<MutationSpec> = candidate_mutations(&inst)
        .into_iter()
        .filter(|s| matches!(s.address, Address::Theta { f: g, form: CellForm::Full, .. } if g == f))
        .collect();
    assert!(!specs.is_empty());
    for s in specs {
        assert!(!coverable(&inst, &s.address));
        assert!(run(&mutate_instance(&inst, &s).unwrap(), Suite::All).passed());
    }
}

#[test]
fn battery_sources_are_deterministic_and_valid() {
    let (a, b) = (battery_sources(3).unwrap(), battery_sources(3).unwrap());
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(full_tables(x), full_tables(y));
        assert!(run(x, Suite::All).passed(), "{}", x.name);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    // The oracle multiplies chosen group elements; the twist conjugates cells.
    #[test]
    fn twisted_tables_match_the_group_arithmetic(seed in any::<u64>(), pick in 0usize..4) {
        let (l, mk, bp) = [
            (Lattice::Chain(2), Marking::All, Blueprint::Bz3),
            (Lattice::Chain(3), Marking::Split, Blueprint::Bz2),
            (Lattice::Powerset(2), Marking::All, Blueprint::Bz3),
            (Lattice::Powerset(2), Marking::Split, Blueprint::S3),
        ][pick];
        let s = strict(l, mk, bp);
        let spec = random_twist(&s, seed);
        prop_assert_eq!(&spec, &random_twist(&s, seed));
        let t = twist_instance(&s, &spec).unwrap();
        let o = twist_oracle(&s, &t, bp, &spec).unwrap();
        prop_assert_eq!(oracle_tables(&t, &o), full_tables(&t));
    }
}
