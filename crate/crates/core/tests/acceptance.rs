//! Acceptance sweep over the shipped corpus and mutation battery.
//!
//! Prints one PASS/FAIL line per criterion and exits non-zero if any fails.
//! Runs under `cargo test` with `harness = false`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::hash::Hash;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use fibcat::adjoint::Side;
use fibcat::base::{check_base, fact_category, fact_connectivity, BaseCat};
use fibcat::diagram;
use fibcat::ets::{
    check_ets_ct, check_ets_skeleton, check_etc, check_mor_ets, check_mor_ets_skeleton, ets_core_to_skeleton,
    ets_factorization_independence, ets_skeleton_to_core, etc_exchange_passed, extend_ets_skeleton, restrict_ets,
};
use fibcat::fincat::{MorId, NatTrans};
use fibcat::generators::{
    full_tables, lattice_base, mutation_battery, oracle_tables, positive_corpus, with_form, CorpusEntry, Form, Lattice,
    Marking,
};
use fibcat::instance::{Instance, ObjPairCells};
use fibcat::report::Status;
use fibcat::skeleton::{
    check_core, check_skeleton, check_skeleton_ct, core_exchange_passed, core_to_skeleton, extend_skeleton,
    factorization_independence, restrict_to_skeleton, skeleton_to_core,
};
use fibcat::suites::{
    self, adjunction_calculus, assignment, core_of, ets_full, ets_skeleton_of, etc_of, extend, full_morphism,
    mor_ets_core, mor_ets_full, mor_ets_skeleton, skeleton_of, Extension, Suite,
};

const SEED: u64 = 7;
const MUTANTS: usize = 120;
const MIN_POSITIVES: usize = 40;
const MIN_MUTANTS: usize = 100;
const BUDGET: Duration = Duration::from_secs(300);

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(name: &'static str, problems: &[String], detail: String) -> Outcome {
        let mut detail = detail;
        for p in problems.iter().take(5) {
            detail.push_str(&format!("\n      {p}"));
        }
        if problems.len() > 5 {
            detail.push_str(&format!("\n      ... and {} more", problems.len() - 5));
        }
        Outcome { name, pass: problems.is_empty(), detail }
    }
}

fn same_opt(a: &Option<NatTrans>, b: &Option<NatTrans>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => a.same(b),
        (None, None) => true,
        _ => false,
    }
}

fn same_thetas(a: &[Option<NatTrans>], b: &[Option<NatTrans>]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| same_opt(x, y))
}

fn same_cells<K: Hash + Eq>(a: &HashMap<K, NatTrans>, b: &HashMap<K, NatTrans>) -> bool {
    a.len() == b.len() && a.iter().all(|(k, v)| b.get(k).is_some_and(|w| w.same(v)))
}

/// Every full table filled in, through whichever partial form the instance carries.
fn fully_extended(inst: &Instance) -> Result<Instance, String> {
    let mut out = inst.clone();
    if out.morphisms.iter().any(|m| m.theta.is_none()) {
        let how = if out.morphisms.iter().any(|m| m.theta_bar_cl.is_some()) { Extension::Core } else { Extension::Skeleton };
        out = extend(&out, how)?;
    }
    if out.ets.iter().any(|e| e.m.is_none()) {
        let how = if out.ets.iter().any(|e| e.m_bar_cl.is_some()) { Extension::Etc } else { Extension::EtsSkeleton };
        out = extend(&out, how)?;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------

fn extension_bijection(corpus: &[CorpusEntry]) -> Outcome {
    let per: Vec<(usize, Vec<String>)> = corpus
        .par_iter()
        .map(|entry| {
            let inst = &entry.instance;
            let mut n = 0;
            let mut bad = Vec::new();
            let skel = match with_form(inst, Form::Skeleton) {
                Ok(s) => s,
                Err(e) => return (0, vec![format!("{}: {e}", inst.name)]),
            };
            for (m, ms) in inst.morphisms.iter().zip(&skel.morphisms) {
                // extend after restrict, starting from the full transitions
                let fm = full_morphism(inst, m).expect("positives are full").expect("positives load");
                match extend_skeleton(&restrict_to_skeleton(&fm)) {
                    Ok(e) if same_thetas(e.thetas(), fm.thetas()) => {}
                    Ok(_) => bad.push(format!("{}/{}: extend after restrict changed a transition", inst.name, m.name)),
                    Err(e) => bad.push(format!("{}/{}: {e}", inst.name, m.name)),
                }
                // restrict after extend, starting from skeleton data
                let s = skeleton_of(&skel, ms).expect("skeleton form").expect("skeleton loads");
                match extend_skeleton(&s) {
                    Ok(e) => {
                        let r = restrict_to_skeleton(&e);
                        if !same_thetas(r.sm.thetas(), s.sm.thetas()) || !same_thetas(r.cl.thetas(), s.cl.thetas()) {
                            bad.push(format!("{}/{}: restrict after extend changed the skeleton", inst.name, m.name));
                        }
                    }
                    Err(e) => bad.push(format!("{}/{}: {e}", inst.name, m.name)),
                }
                n += 2;
            }
            for (e, es) in inst.ets.iter().zip(&skel.ets) {
                let full = ets_full(inst, e).expect("positives are full").expect("positives load");
                match extend_ets_skeleton(&restrict_ets(&full)) {
                    Ok(x) if same_cells(x.cells(), full.cells()) => {}
                    Ok(_) => bad.push(format!("{}/{}: extend after restrict changed a cell", inst.name, e.name)),
                    Err(err) => bad.push(format!("{}/{}: {err}", inst.name, e.name)),
                }
                let s = ets_skeleton_of(&skel, es).expect("skeleton form").expect("skeleton loads");
                match extend_ets_skeleton(&s) {
                    Ok(x) => {
                        let r = restrict_ets(&x);
                        if !same_cells(r.sm.cells(), s.sm.cells()) || !same_cells(r.cl.cells(), s.cl.cells()) {
                            bad.push(format!("{}/{}: restrict after extend changed the skeleton", inst.name, e.name));
                        }
                    }
                    Err(err) => bad.push(format!("{}/{}: {err}", inst.name, e.name)),
                }
                n += 2;
            }
            (n, bad)
        })
        .collect();
    let n: usize = per.iter().map(|p| p.0).sum();
    let bad: Vec<String> = per.into_iter().flat_map(|p| p.1).collect();
    Outcome::new("extension-bijection", &bad, format!("{} instances, {n} roundtrips, exact table equality", corpus.len()))
}

/// `θ_f` pasted from the skeleton through one factorization `f = p ∘ t`:
/// `conn_{t,p}` on the target, `t^* θ_p`, `θ_t p^*`, then `conn_{t,p}⁻¹` on the source.
fn theta_through(s: &fibcat::skeleton::SkeletonData, t: MorId, p: MorId) -> Result<NatTrans, String> {
    let (h1, h2) = (&*s.source, &*s.target);
    let b = &h1.base;
    let rs = &s.sm.family()[b.cod(p).ix()];
    let rt = &s.sm.family()[b.dom(t).ix()];
    diagram::eval(&[
        h2.conn_cell(t, p).right(rs),
        s.sm.theta_cell(p).left(h2.functor(t)),
        s.cl.theta_cell(t).right(h1.functor(p)),
        h1.conn_cell(t, p).inv().left(rt),
    ])
    .map_err(|e| e.to_string())
}

fn factorization_independence_sweep(corpus: &[CorpusEntry]) -> Outcome {
    let per: Vec<(usize, usize, Vec<String>)> = corpus
        .par_iter()
        .map(|entry| {
            let inst = &entry.instance;
            let b = &inst.base;
            let (mut facts, mut morphisms, mut bad) = (0, 0, Vec::new());
            for m in &inst.morphisms {
                let fm = full_morphism(inst, m).expect("positives are full").expect("positives load");
                let s = restrict_to_skeleton(&fm);
                let sec = factorization_independence(&s);
                if !sec.passed() || sec.checked != b.cat.n_morphisms() {
                    bad.push(format!("{}/{}: library sweep {:?} over {} morphisms", inst.name, m.name, sec.status, sec.checked));
                }
                for f in b.cat.morphisms() {
                    morphisms += 1;
                    let fc = fact_category(b, f);
                    if fc.objects.is_empty() {
                        bad.push(format!("{}: no factorization of {}", inst.name, b.name(f)));
                    }
                    for o in &fc.objects {
                        facts += 1;
                        match theta_through(&s, o.closed_part, o.smooth_part) {
                            Ok(t) if t.same(fm.theta(f)) => {}
                            Ok(_) => bad.push(format!(
                                "{}/{}: {} through ({}, {}) differs",
                                inst.name,
                                m.name,
                                b.name(f),
                                b.name(o.closed_part),
                                b.name(o.smooth_part)
                            )),
                            Err(e) => bad.push(format!("{}/{}: {e}", inst.name, m.name)),
                        }
                    }
                }
            }
            for e in &inst.ets {
                let full = ets_full(inst, e).expect("positives are full").expect("positives load");
                let sec = ets_factorization_independence(&restrict_ets(&full));
                let pairs = b.cat.n_morphisms() * b.cat.n_morphisms();
                if !sec.passed() || sec.checked != pairs {
                    bad.push(format!("{}/{}: pair sweep {:?} over {} pairs", inst.name, e.name, sec.status, sec.checked));
                }
            }
            (morphisms, facts, bad)
        })
        .collect();
    let morphisms: usize = per.iter().map(|p| p.0).sum();
    let facts: usize = per.iter().map(|p| p.1).sum();
    let bad: Vec<String> = per.into_iter().flat_map(|p| p.2).collect();
    Outcome::new(
        "factorization-independence",
        &bad,
        format!("{morphisms} transitions, {facts} factorizations each equal to the stored transition"),
    )
}

/// Positives, battery sources in every form, and every mutant.
struct Pool {
    instances: Vec<(Instance, bool)>,
}

fn splitting_equivalences(pool: &Pool) -> Outcome {
    let per: Vec<(usize, usize, Vec<String>)> = pool
        .instances
        .par_iter()
        .map(|(inst, _)| {
            let (mut n, mut negatives, mut bad) = (0, 0, Vec::new());
            for m in &inst.morphisms {
                let Some(Ok(s)) = skeleton_of(inst, m) else { continue };
                let ex = check_skeleton(&s).passed();
                let ct = check_skeleton_ct(&s).passed();
                n += 1;
                negatives += usize::from(!ex);
                if ex != ct {
                    bad.push(format!("{}/{}: exchange {ex}, cartesian and triangle {ct}", inst.name, m.name));
                }
            }
            for e in &inst.ets {
                let Some(Ok(s)) = ets_skeleton_of(inst, e) else { continue };
                let ex = check_ets_skeleton(&s).passed();
                let ct = check_ets_ct(&s).passed();
                n += 1;
                negatives += usize::from(!ex);
                if ex != ct {
                    bad.push(format!("{}/{}: pair exchange {ex}, cartesian and triangle {ct}", inst.name, e.name));
                }
            }
            (n, negatives, bad)
        })
        .collect();
    let n: usize = per.iter().map(|p| p.0).sum();
    let negatives: usize = per.iter().map(|p| p.1).sum();
    let mut bad: Vec<String> = per.into_iter().flat_map(|p| p.2).collect();
    if negatives == 0 {
        bad.push("no skeleton in the pool fails, so the comparison is vacuous".into());
    }
    Outcome::new(
        "splitting-equivalences",
        &bad,
        format!("{} instances, {n} skeleta, {negatives} failing, verdicts agree", pool.instances.len()),
    )
}

#[derive(Default)]
struct CoreTally {
    compared: usize,
    negatives: usize,
    roundtrips: usize,
    unpresentable: usize,
    outside_hypotheses: usize,
    bad: Vec<String>,
}

impl CoreTally {
    fn merge(mut self, o: CoreTally) -> CoreTally {
        self.compared += o.compared;
        self.negatives += o.negatives;
        self.roundtrips += o.roundtrips;
        self.unpresentable += o.unpresentable;
        self.outside_hypotheses += o.outside_hypotheses;
        self.bad.extend(o.bad);
        self
    }

    fn verdicts(&mut self, what: String, direct: bool, converted: bool) {
        self.compared += 1;
        self.negatives += usize::from(!direct);
        if direct != converted {
            self.bad.push(format!("{what}: direct {direct}, converted {converted}"));
        }
    }
}

fn core_for_instance(inst: &Instance) -> CoreTally {
    let mut t = CoreTally::default();
    // the equivalences are stated for genuine adjunctions; a broken unit or counit is outside them
    if !inst.adjunctions.iter().all(|a| a.check().passed()) {
        t.outside_hypotheses += 1;
        return t;
    }
    for m in &inst.morphisms {
        let what = format!("{}/{}", inst.name, m.name);
        let (Some(sl1), Some(sl2), Some(cr1), Some(cr2)) = (
            assignment(inst, m.source, Side::Left),
            assignment(inst, m.target, Side::Left),
            assignment(inst, m.source, Side::Right),
            assignment(inst, m.target, Side::Right),
        ) else {
            continue;
        };
        if m.theta_bar_cl.is_some() {
            // core data given: convert to a skeleton and back
            let Some(Ok(c)) = core_of(inst, m) else { continue };
            let direct = core_exchange_passed(&check_core(&c));
            match core_to_skeleton(&c) {
                Ok(s) => {
                    t.verdicts(format!("{what} core"), direct, check_skeleton(&s).passed());
                    match skeleton_to_core(&s, c.sm_left.clone(), c.cl_right.clone()) {
                        Ok(c2) if same_thetas(&c2.cl_bar, &c.cl_bar) && same_thetas(c2.sm.thetas(), c.sm.thetas()) => {
                            t.roundtrips += 1
                        }
                        Ok(_) => t.bad.push(format!("{what}: core to skeleton to core is not the identity")),
                        Err(e) => t.bad.push(format!("{what}: {e}")),
                    }
                }
                // no invertible closed transitions: no skeleton, and the core check must fail
                Err(_) => t.verdicts(format!("{what} core"), direct, false),
            }
        } else {
            let Some(Ok(s)) = skeleton_of(inst, m) else { continue };
            let direct = check_skeleton(&s).passed();
            match skeleton_to_core(&s, (sl1, sl2), (cr1, cr2)) {
                Ok(c) => {
                    t.verdicts(format!("{what} skeleton"), direct, core_exchange_passed(&check_core(&c)));
                    match core_to_skeleton(&c) {
                        Ok(s2) if same_thetas(s2.sm.thetas(), s.sm.thetas()) && same_thetas(s2.cl.thetas(), s.cl.thetas()) => {
                            t.roundtrips += 1
                        }
                        Ok(_) => t.bad.push(format!("{what}: skeleton to core to skeleton is not the identity")),
                        Err(e) => t.bad.push(format!("{what}: {e}")),
                    }
                }
                Err(_) => t.unpresentable += 1,
            }
        }
    }
    for e in &inst.ets {
        let what = format!("{}/{}", inst.name, e.name);
        let (Some(sl), Some(cr)) = (assignment(inst, e.host, Side::Left), assignment(inst, e.host, Side::Right)) else {
            continue;
        };
        if e.m_bar_cl.is_some() {
            let Some(Ok(c)) = etc_of(inst, e) else { continue };
            let direct = etc_exchange_passed(&check_etc(&c));
            match ets_core_to_skeleton(&c) {
                Ok(s) => {
                    t.verdicts(format!("{what} tensor core"), direct, check_ets_skeleton(&s).passed());
                    match ets_skeleton_to_core(&s, c.sm_left.clone(), c.cl_right.clone()) {
                        Ok(c2) if same_cells(&c2.cl_bar, &c.cl_bar) && same_cells(c2.sm.cells(), c.sm.cells()) => t.roundtrips += 1,
                        Ok(_) => t.bad.push(format!("{what}: tensor core to skeleton to core is not the identity")),
                        Err(err) => t.bad.push(format!("{what}: {err}")),
                    }
                }
                Err(_) => t.verdicts(format!("{what} tensor core"), direct, false),
            }
        } else {
            let Some(Ok(s)) = ets_skeleton_of(inst, e) else { continue };
            let direct = check_ets_skeleton(&s).passed();
            match ets_skeleton_to_core(&s, sl, cr) {
                Ok(c) => {
                    t.verdicts(format!("{what} tensor skeleton"), direct, etc_exchange_passed(&check_etc(&c)));
                    match ets_core_to_skeleton(&c) {
                        Ok(s2) if same_cells(s2.sm.cells(), s.sm.cells()) && same_cells(s2.cl.cells(), s.cl.cells()) => t.roundtrips += 1,
                        Ok(_) => t.bad.push(format!("{what}: tensor skeleton to core to skeleton is not the identity")),
                        Err(err) => t.bad.push(format!("{what}: {err}")),
                    }
                }
                Err(_) => t.unpresentable += 1,
            }
        }
    }
    rho_presentations(inst, &mut t);
    t
}

/// Every candidate `ρ` table over valid full structures: the full hexagon, the
/// smooth and closed restrictions, and the core presentation agree.
fn rho_presentations(inst: &Instance, t: &mut CoreTally) {
    if inst.mor_ets.is_empty() {
        return;
    }
    let Ok(full) = fully_extended(inst) else { return };
    for (k, me) in full.mor_ets.iter().enumerate() {
        let mor = &full.morphisms[me.morphism];
        let valid_underneath = full_morphism(&full, mor).is_some_and(|r| r.is_ok_and(|m| fibcat::fibered::check_mor_axioms(&m).passed()))
            && [me.source_ets, me.target_ets]
                .iter()
                .all(|&i| ets_full(&full, &full.ets[i]).is_some_and(|r| r.is_ok_and(|d| fibcat::ets::check_mets(&d).passed())));
        if !valid_underneath {
            continue;
        }
        let mut tables: Vec<&ObjPairCells> = Vec::new();
        for r in [&me.rho, &me.rho_sm, &me.rho_cl].into_iter().flatten() {
            if !tables.iter().any(|x| same_cells(x, r)) {
                tables.push(r);
            }
        }
        for (j, rho) in tables.into_iter().enumerate() {
            let what = format!("{}/{} table {j}", inst.name, me.name);
            let Some(Ok(direct)) = mor_ets_full(&full, me, rho) else {
                t.bad.push(format!("{what}: full data unavailable"));
                continue;
            };
            let direct = check_mor_ets(&direct).passed();
            match mor_ets_skeleton(&full, me, rho, rho) {
                Some(Ok((a, b))) => t.verdicts(format!("{what} restricted"), direct, check_mor_ets_skeleton(&a, &b).passed()),
                _ => t.bad.push(format!("{what}: restrictions unavailable")),
            }
            let mut single = full.clone();
            let r = &mut single.mor_ets[k];
            (r.rho, r.rho_sm, r.rho_cl) = (Some(rho.clone()), None, None);
            match mor_ets_core(&single, &single.mor_ets[k]) {
                Some(Ok((sm, cl))) => {
                    t.verdicts(format!("{what} core"), direct, check_mor_ets(&sm).passed() && check_mor_ets(&cl).passed())
                }
                Some(Err(suites::DeriveError::NotInvertible(_))) => t.unpresentable += 1,
                _ => t.bad.push(format!("{what}: core presentation unavailable")),
            }
        }
    }
}

fn core_equivalences(pool: &Pool) -> Outcome {
    let t = pool.instances.par_iter().map(|(i, _)| core_for_instance(i)).reduce(CoreTally::default, CoreTally::merge);
    let mut bad = t.bad;
    if t.negatives == 0 {
        bad.push("no structure in the pool fails, so the comparison is vacuous".into());
    }
    Outcome::new(
        "core-equivalences",
        &bad,
        format!(
            "{} verdict pairs agree ({} failing), {} exact roundtrips, {} without a core presentation, {} instances with a broken adjunction excluded",
            t.compared, t.negatives, t.roundtrips, t.unpresentable, t.outside_hypotheses
        ),
    )
}

fn adjunction_calculus_sweep(corpus: &[CorpusEntry]) -> Outcome {
    let per: Vec<(BTreeSet<String>, usize, usize, Vec<String>)> = corpus
        .par_iter()
        .map(|entry| {
            let r = adjunction_calculus(&entry.instance);
            let mut kinds = BTreeSet::new();
            let (mut checked, mut skipped) = (0, 0);
            for s in &r.sections {
                match s.status {
                    Status::Skipped => skipped += 1,
                    _ => {
                        checked += s.checked;
                        let kind = s.condition.split('-').take(2).collect::<Vec<_>>().join("-");
                        kinds.insert(kind);
                    }
                }
            }
            let bad = r.failures().map(|s| format!("{}: {} on {}", entry.instance.name, s.condition, s.subject)).collect();
            (kinds, checked, skipped, bad)
        })
        .collect();
    let mut kinds = BTreeSet::new();
    let (mut checked, mut skipped, mut bad) = (0, 0, Vec::new());
    for (k, c, s, b) in per {
        kinds.extend(k);
        checked += c;
        skipped += s;
        bad.extend(b);
    }
    for need in ["opposite-smooth", "opposite-closed", "lifted-smooth", "lifted-closed", "theta-transpose", "m-transpose", "transported-smooth", "transported-closed"] {
        if !kinds.contains(need) {
            bad.push(format!("no {need} check ran anywhere in the corpus"));
        }
    }
    Outcome::new(
        "adjunction-calculus",
        &bad,
        format!("{} instances, {checked} diagrams, {skipped} sections skipped for non-invertible transposes", corpus.len()),
    )
}

fn oracle_agreement(corpus: &[CorpusEntry]) -> Outcome {
    let twisted: Vec<&CorpusEntry> = corpus.iter().filter(|e| e.twist.is_some()).collect();
    let per: Vec<Vec<String>> = twisted
        .par_iter()
        .map(|entry| {
            let inst = &entry.instance;
            let (_, _, oracle) = entry.twist.as_ref().expect("twisted entry");
            let want = oracle_tables(inst, oracle).to_json();
            let mut bad = Vec::new();
            if full_tables(inst).to_json() != want {
                bad.push(format!("{}: transported tables differ from the oracle", inst.name));
            }
            for (form, via) in [(Form::Skeleton, "skeleton"), (Form::Core, "core")] {
                let got = with_form(inst, form).map_err(|e| e.to_string()).and_then(|i| fully_extended(&i));
                match got {
                    Ok(i) if full_tables(&i).to_json() == want => {}
                    Ok(_) => bad.push(format!("{}: tables extended from {via} data differ from the oracle", inst.name)),
                    Err(e) => bad.push(format!("{}: extension from {via} data failed: {e}", inst.name)),
                }
            }
            bad
        })
        .collect();
    let bad: Vec<String> = per.into_iter().flatten().collect();
    Outcome::new(
        "oracle-agreement",
        &bad,
        format!("{} twisted instances, extended from skeleton and from core, byte-equal JSON", twisted.len()),
    )
}

fn mutation_detection(battery: &fibcat::generators::Battery, verdicts: &[bool], sources_pass: &[bool]) -> Outcome {
    let mut bad = Vec::new();
    for (i, ok) in sources_pass.iter().enumerate() {
        if !ok {
            bad.push(format!("battery source {} does not pass, so detection is meaningless", battery.sources[i].name));
        }
    }
    let (mut caught, mut exempt, mut exempt_caught) = (0, 0, 0);
    for (m, &passed) in battery.mutants.iter().zip(verdicts) {
        match (m.coverable, passed) {
            (true, true) => bad.push(format!("missed {} ({})", m.label, m.family)),
            (true, false) => caught += 1,
            (false, p) => {
                exempt += 1;
                exempt_caught += usize::from(!p);
            }
        }
    }
    let families: BTreeSet<&str> = battery.mutants.iter().map(|m| m.family.as_str()).collect();
    Outcome::new(
        "mutation-detection",
        &bad,
        format!(
            "{} mutants over {} families, {caught} coverable caught, {exempt} structurally uncoverable ({exempt_caught} caught anyway)",
            battery.mutants.len(),
            families.len()
        ),
    )
}

/// Connectedness by search over the factorization arrows, independent of the library's union-find.
fn connected(n: usize, arrows: &[(usize, usize, MorId)]) -> bool {
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(i) = queue.pop_front() {
        for &(a, b, _) in arrows {
            for (x, y) in [(a, b), (b, a)] {
                if x == i && !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn base_hypotheses(corpus: &[CorpusEntry]) -> Outcome {
    let mut bad = Vec::new();
    let (mut bases, mut controls) = (0, 0);
    let markings = [Marking::All, Marking::ClosedOnly, Marking::SmoothOnly, Marking::Split];
    for n in 1..=3 {
        for mk in markings {
            for core in [false, true] {
                bases += 1;
                let b = lattice_base(Lattice::Powerset(n), mk, core);
                let r = check_base(&b);
                let name = format!("powerset{n}/{}{}", mk.name(), if core { "/core" } else { "" });
                // a closed inclusion adding an element of either parity has no smooth open complement
                // under these markings, so the localic hypotheses must be rejected
                let complements_exist = !core || matches!(mk, Marking::All | Marking::SmoothOnly);
                if complements_exist {
                    for s in r.failures() {
                        bad.push(format!("{name}: {}", s.condition));
                    }
                } else {
                    controls += 1;
                    let failing: BTreeSet<&str> = r.failures().map(|s| s.condition.as_str()).collect();
                    if failing != BTreeSet::from(["open-complements"]) {
                        bad.push(format!("{name}: expected only missing open complements, got {failing:?}"));
                    }
                }
            }
        }
    }
    let mut seen = BTreeSet::new();
    let (mut facts, mut witnesses) = (0, 0);
    for entry in corpus {
        let b: &BaseCat = &entry.instance.base;
        if !seen.insert((b.cat.name().to_string(), entry.marking.name())) {
            continue;
        }
        for f in b.cat.morphisms() {
            let fc = fact_category(b, f);
            let n = fc.objects.len();
            facts += 1;
            if n == 0 {
                bad.push(format!("{}: Fact({}) is empty", b.cat.name(), b.name(f)));
                continue;
            }
            if !connected(n, &fc.arrows) {
                bad.push(format!("{}: Fact({}) is disconnected", b.cat.name(), b.name(f)));
            }
            match fact_connectivity(&fc, b) {
                Ok(s) if s.passed() && s.checked == n * (n - 1) / 2 => witnesses += s.checked,
                Ok(s) => bad.push(format!("{}: domination for {} {:?} over {} pairs", b.cat.name(), b.name(f), s.status, s.checked)),
                Err(e) => bad.push(format!("{}: {e}", b.cat.name())),
            }
        }
    }
    Outcome::new(
        "base-hypotheses",
        &bad,
        format!(
            "{} of {bases} powerset bases pass every check, {controls} without smooth complements rejected; {} corpus bases, {facts} factorization categories non-empty and connected, {witnesses} domination witnesses",
            bases - controls,
            seen.len()
        ),
    )
}

fn main() -> ExitCode {
    if let Ok(n) = std::env::var("FIBCAT_THREADS").map(|v| v.parse::<usize>().unwrap_or(1)) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let start = Instant::now();
    let corpus = positive_corpus(SEED).expect("corpus builds");
    let battery = mutation_battery(SEED, MUTANTS).expect("battery builds");
    let mutant_instances: Vec<Instance> = battery.mutants.iter().map(|m| battery.instance(m).expect("mutant builds")).collect();
    let sources_pass: Vec<bool> = battery.sources.par_iter().map(|s| suites::run(s, Suite::All).passed()).collect();
    let verdicts: Vec<bool> = mutant_instances.par_iter().map(|i| suites::run(i, Suite::All).passed()).collect();

    let mut pool = Pool { instances: corpus.iter().map(|e| (e.instance.clone(), true)).collect() };
    pool.instances.extend(battery.sources.iter().map(|s| (s.clone(), true)));
    pool.instances.extend(mutant_instances.into_iter().map(|i| (i, false)));

    let mut outcomes = vec![
        extension_bijection(&corpus),
        factorization_independence_sweep(&corpus),
        splitting_equivalences(&pool),
        core_equivalences(&pool),
        adjunction_calculus_sweep(&corpus),
        oracle_agreement(&corpus),
        mutation_detection(&battery, &verdicts, &sources_pass),
        base_hypotheses(&corpus),
    ];
    let elapsed = start.elapsed();
    let mut budget = Vec::new();
    if corpus.len() < MIN_POSITIVES {
        budget.push(format!("only {} positive instances", corpus.len()));
    }
    if battery.mutants.len() < MIN_MUTANTS {
        budget.push(format!("only {} mutations", battery.mutants.len()));
    }
    if elapsed > BUDGET {
        budget.push(format!("took {:.1} s", elapsed.as_secs_f64()));
    }
    outcomes.push(Outcome::new(
        "corpus-budget",
        &budget,
        format!(
            "{} positives, {} mutations, {:.1} s of a {} s budget",
            corpus.len(),
            battery.mutants.len(),
            elapsed.as_secs_f64(),
            BUDGET.as_secs()
        ),
    ));

    let mut failed = 0;
    for o in &outcomes {
        println!("{} {}: {}", if o.pass { "PASS" } else { "FAIL" }, o.name, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria pass", outcomes.len() - failed, outcomes.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
