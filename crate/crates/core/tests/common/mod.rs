//! Small hand-built categories shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use fibcat::adjoint::{AdjointAssignment, Adjunction, Side};
use fibcat::base::{BaseCat, Scope};
use fibcat::fibered::{FibMorphism, FiberedCat, Variance};
use fibcat::fincat::{CatTables, FinCat, Functor, MorId, NatTrans, ObjId};
use fibcat::generators::{lattice_base, Lattice, Marking};

/// The cyclic group of order `n` as a one-object category; morphism `k` is `k mod n`.
pub fn zn(n: u32) -> FinCat {
    let compose = (0..n).flat_map(|a| (0..n).map(move |b| (a, b, (a + b) % n))).collect();
    FinCat::from_tables(
        &format!("Z{n}"),
        CatTables {
            objects: vec!["*".into()],
            morphisms: (0..n).map(|k| (k.to_string(), 0, 0)).collect(),
            identity: vec![0],
            compose,
        },
    )
    .unwrap()
}

/// Permutations of three letters, composed as functions; index 0 is the identity.
pub fn s3_perms() -> Vec<[usize; 3]> {
    vec![[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]]
}

pub fn s3() -> FinCat {
    let p = s3_perms();
    let ix = |q: [usize; 3]| p.iter().position(|&r| r == q).unwrap() as u32;
    let mut compose = Vec::new();
    for (g, pg) in p.iter().enumerate() {
        for (f, pf) in p.iter().enumerate() {
            compose.push((g as u32, f as u32, ix([pg[pf[0]], pg[pf[1]], pg[pf[2]]])));
        }
    }
    FinCat::from_tables(
        "S3",
        CatTables {
            objects: vec!["*".into()],
            morphisms: (0..6).map(|k| (format!("s{k}"), 0, 0)).collect(),
            identity: vec![0],
            compose,
        },
    )
    .unwrap()
}

/// `a --f--> b`.
pub fn arrow() -> FinCat {
    FinCat::from_tables(
        "arrow",
        CatTables {
            objects: vec!["a".into(), "b".into()],
            morphisms: vec![("id_a".into(), 0, 0), ("id_b".into(), 1, 1), ("f".into(), 0, 1)],
            identity: vec![0, 1],
            compose: vec![(0, 0, 0), (1, 1, 1), (2, 0, 2), (1, 2, 2)],
        },
    )
    .unwrap()
}

/// Multiplication by `k` on `Z_n`, a group endomorphism.
pub fn scale(c: &FinCat, n: u32, k: u32) -> Functor {
    Functor::new(&format!("x{k}"), c, c, vec![ObjId(0)], (0..n).map(|m| MorId(m * k % n)).collect()).unwrap()
}

pub const N: u32 = 7;

/// Elements of a lattice object, read back from its name (`o` is empty).
pub fn elements(b: &BaseCat, x: ObjId) -> u8 {
    let n = b.oname(x);
    if n == "o" {
        return 0;
    }
    n.bytes().fold(0, |acc, c| acc | 1 << (c - b'1'))
}

/// Scale factor of `F_f`: the product of the step factors of the elements `f` adds.
pub fn factor(b: &BaseCat, steps: &[u32], f: MorId) -> u32 {
    let added = elements(b, b.cod(f)) & !elements(b, b.dom(f));
    (0..steps.len()).filter(|i| added & (1 << i) != 0).fold(1, |acc, i| acc * steps[i] % N)
}

/// Inverse images on `Z_7` over a lattice with the coboundary of `u` as comparisons:
/// `conn(first, second) = k_second * u(first) + u(second) - u(composite)`.
pub fn twisted_host(base: &Arc<BaseCat>, steps: &[u32], u: &[u32]) -> FiberedCat {
    let c = zn(N);
    let functor = |f: MorId| scale(&c, N, factor(base, steps, f));
    let functors = base.cat.morphisms().map(|f| Some(functor(f))).collect();
    let mut comps = HashMap::new();
    for (f, g) in base.composable_pairs(Scope::All) {
        let (first, second) = (g, f);
        let comp = base.compose(g, f);
        let value = (factor(base, steps, second) * u[first.ix()] + u[second.ix()] + N - u[comp.ix()]) % N;
        let t = NatTrans::new(&functor(comp), &Functor::compose(&functor(second), &functor(first)), vec![MorId(value)]).unwrap();
        comps.insert((first, second), t);
    }
    FiberedCat::new("H", base.clone(), Variance::Inverse, Scope::All, vec![c.clone(); base.cat.n_objects()], functors, comps).unwrap()
}

pub fn chain4() -> Arc<BaseCat> {
    lattice_base(Lattice::Chain(4), Marking::All, false)
}

/// `raw` read as a cochain that vanishes on identities.
pub fn cochain(base: &BaseCat, raw: &[u32]) -> Vec<u32> {
    base.cat.morphisms().map(|f| if base.is_id(f) { 0 } else { raw[f.ix()] % N }).collect()
}

pub fn inv(k: u32) -> u32 {
    (1..N).find(|&j| j * k % N == 1).expect("units of Z_7")
}

/// The single component of a cell between scaling functors on `Z_7`.
pub fn value(t: &NatTrans) -> u32 {
    t.components()[0].0
}

/// `scale(k) ⊣ scale(1/k)` on `Z_7` with unit `unit_at` and zero counit.
pub fn equivalence(k: u32, unit_at: u32) -> Result<Adjunction, String> {
    let c = zn(N);
    let (l, r) = (scale(&c, N, k), scale(&c, N, inv(k)));
    let id = Functor::identity(&c);
    let unit = NatTrans::new(&id, &Functor::compose(&r, &l), vec![MorId(unit_at)]).unwrap();
    let counit = NatTrans::new(&Functor::compose(&l, &r), &id, vec![MorId(0)]).unwrap();
    Adjunction::new(l, r, unit, counit)
}

/// Inverse scalings as adjoints of every marked inverse image of a twisted host.
pub fn adjoints(h: &Arc<FiberedCat>, steps: &[u32], side: Side, marked: Scope) -> AdjointAssignment {
    let b = &h.base;
    let given: BTreeMap<MorId, Adjunction> = b
        .scoped(marked)
        .filter(|&f| !b.is_id(f))
        .map(|f| {
            let k = factor(b, steps, f);
            let a = match side {
                Side::Left => equivalence(inv(k), 0),
                Side::Right => equivalence(k, 0),
            };
            (f, a.unwrap())
        })
        .collect();
    AdjointAssignment::new(h.clone(), side, marked, given).unwrap()
}

/// Transitions with components `w` and identity family between two twisted hosts.
pub fn transitions(h1: &FiberedCat, w: &[u32]) -> Vec<Option<NatTrans>> {
    h1.base
        .cat
        .morphisms()
        .map(|f| h1.try_functor(f).map(|fs| NatTrans::new(fs, fs, vec![MorId(w[f.ix()])]).unwrap()))
        .collect()
}

pub fn identity_family(b: &BaseCat) -> Vec<Functor> {
    vec![Functor::identity(&zn(N)); b.cat.n_objects()]
}

/// `θ = v` from the coboundary of `u` to that of `u - v`: a valid morphism.
pub fn coboundary_morphism(b: &Arc<BaseCat>, steps: &[u32], u: &[u32], v: &[u32]) -> FibMorphism {
    let h1 = Arc::new(twisted_host(b, steps, u));
    let target: Vec<u32> = u.iter().zip(v).map(|(x, d)| (x + N - d) % N).collect();
    let h2 = Arc::new(twisted_host(b, steps, &target));
    let th = transitions(&h1, v);
    FibMorphism::new("R", h1, h2, identity_family(b), th).unwrap()
}
