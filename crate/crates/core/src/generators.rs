//! Deterministic corpus construction.
//!
//! Positive instances are strict presheaves over lattice bases and their twists
//! by chosen automorphisms; negative instances are single-component mutations.
//! All randomness is drawn from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64`, so a corpus is a pure function of its seed.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adjoint::{AdjointAssignment, Adjunction, Side};
use crate::base::{BaseCat, ChosenProduct, Scope};
use crate::ets::{assoc_boundary, comm_boundary, rho_boundary, sym, Boxes, EtsData};
use crate::fibered::{FibMorphism, FiberedCat, Variance};
use crate::fincat::{invert_nat_iso, validate_nat_trans, CatTables, FinCat, Functor, MorId, NatTrans, ObjId};
use crate::instance::{emit_pairs, emit_thetas, EtsEntry, Instance, MorEtsEntry, MorphismEntry, PairCellDoc, PairCells, Thetas, TransDoc};
use crate::suites;

pub const PRNG: &str = "ChaCha8Rng::seed_from_u64";

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("bad blueprint: {0}")]
    BadBlueprint(String),
    #[error("twist choice is not an automorphism: {0}")]
    NotIso(String),
    #[error("invalid mutation address: {0}")]
    AddressInvalid(String),
    #[error("construction failed: {0}")]
    Build(String),
}

fn build(e: impl fmt::Display) -> GenError {
    GenError::Build(e.to_string())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Bases

/// Lattices of subsets of `{1..n}`, ordered by inclusion. Meets are the products.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Lattice {
    /// `∅ ⊂ {1} ⊂ {1,2} ⊂ …` with the given number of elements.
    Chain(u8),
    Powerset(u8),
}

impl Lattice {
    pub fn name(self) -> String {
        match self {
            Lattice::Chain(n) => format!("chain{n}"),
            Lattice::Powerset(n) => format!("powerset{n}"),
        }
    }

    fn members(self) -> Vec<u8> {
        match self {
            Lattice::Chain(n) => (0..n).map(|k| ((1u16 << k) - 1) as u8).collect(),
            Lattice::Powerset(n) => {
                let mut v: Vec<u8> = (0..(1u16 << n)).map(|m| m as u8).collect();
                v.sort_by_key(|m| (m.count_ones(), *m));
                v
            }
        }
    }
}

impl FromStr for Lattice {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Lattice, GenError> {
        let bad = || GenError::BadBlueprint(format!("unknown base {s:?}; expected chainN (2..=8) or powersetN (1..=3)"));
        if let Some(n) = s.strip_prefix("chain") {
            let n: u8 = n.parse().map_err(|_| bad())?;
            return if (2..=8).contains(&n) { Ok(Lattice::Chain(n)) } else { Err(bad()) };
        }
        if let Some(n) = s.strip_prefix("powerset") {
            let n: u8 = n.parse().map_err(|_| bad())?;
            return if (1..=3).contains(&n) { Ok(Lattice::Powerset(n)) } else { Err(bad()) };
        }
        Err(bad())
    }
}

/// Which inclusions are smooth and which are closed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Marking {
    /// Every inclusion is both.
    All,
    /// Closed = all, smooth = identities.
    ClosedOnly,
    /// Smooth = all, closed = identities.
    SmoothOnly,
    /// Odd elements are closed directions, even ones smooth: an inclusion is
    /// closed (smooth) when the elements it adds are all odd (even).
    Split,
}

impl Marking {
    pub fn name(self) -> &'static str {
        match self {
            Marking::All => "all",
            Marking::ClosedOnly => "closed",
            Marking::SmoothOnly => "smooth",
            Marking::Split => "split",
        }
    }

    fn classes(self, added: u8) -> (bool, bool) {
        const ODD: u8 = 0b0101_0101;
        const EVEN: u8 = 0b1010_1010;
        match self {
            Marking::All => (true, true),
            Marking::ClosedOnly => (added == 0, true),
            Marking::SmoothOnly => (true, added == 0),
            Marking::Split => (added & ODD == 0, added & EVEN == 0),
        }
    }
}

impl FromStr for Marking {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Marking, GenError> {
        match s {
            "all" => Ok(Marking::All),
            "closed" => Ok(Marking::ClosedOnly),
            "smooth" => Ok(Marking::SmoothOnly),
            "split" => Ok(Marking::Split),
            _ => Err(GenError::BadBlueprint(format!("unknown marking {s:?}; expected all, closed, smooth or split"))),
        }
    }
}

pub fn set_name(m: u8) -> String {
    if m == 0 {
        return "o".into();
    }
    (0..8).filter(|i| m & (1 << i) != 0).map(|i| char::from(b'1' + i)).collect()
}

/// The lattice as a base category. `core` adds the initial object and the open
/// complements that exist in the lattice.
pub fn lattice_base(l: Lattice, marking: Marking, core: bool) -> Arc<BaseCat> {
    let sets = l.members();
    let oix: HashMap<u8, u32> = sets.iter().enumerate().map(|(i, &s)| (s, i as u32)).collect();
    let mut morphisms = Vec::new();
    let mut mix: HashMap<(u8, u8), u32> = HashMap::new();
    for &a in &sets {
        for &b in sets.iter().filter(|&&b| a & b == a) {
            let name = if a == b { format!("id_{}", set_name(a)) } else { format!("{}->{}", set_name(a), set_name(b)) };
            mix.insert((a, b), morphisms.len() as u32);
            morphisms.push((name, oix[&a], oix[&b]));
        }
    }
    let mut compose = Vec::new();
    for (&(a, b), &f) in &mix {
        for (&(b2, c), &g) in &mix {
            if b2 == b {
                compose.push((g, f, mix[&(a, c)]));
            }
        }
    }
    compose.sort();
    let tables = CatTables {
        objects: sets.iter().map(|&s| set_name(s)).collect(),
        morphisms,
        identity: sets.iter().map(|&s| mix[&(s, s)]).collect(),
        compose,
    };
    let cat = FinCat::from_tables(&l.name(), tables).expect("lattice tables are well formed");
    let (mut smooth, mut closed) = (Vec::new(), Vec::new());
    for (&(a, b), &f) in &mix {
        let (sm, cl) = marking.classes(b & !a);
        if sm {
            smooth.push(MorId(f));
        }
        if cl {
            closed.push(MorId(f));
        }
    }
    smooth.sort();
    closed.sort();
    let mut products = Vec::new();
    for &a in &sets {
        for &b in &sets {
            let p = a & b;
            let cp = ChosenProduct { obj: ObjId(oix[&p]), p1: MorId(mix[&(p, a)]), p2: MorId(mix[&(p, b)]) };
            products.push(((ObjId(oix[&a]), ObjId(oix[&b])), cp));
        }
    }
    let (initial, complements) = if core {
        let mut comps = Vec::new();
        for (&(a, s), &z) in &mix {
            if !closed.contains(&MorId(z)) {
                continue;
            }
            let u = sets.iter().filter(|&&t| t & s == t && t & a == 0).fold(0u8, |acc, &t| acc | t);
            if let Some(&um) = mix.get(&(u, s)) {
                if smooth.contains(&MorId(um)) {
                    comps.push((MorId(z), MorId(um)));
                }
            }
        }
        comps.sort();
        (Some(ObjId(oix[&0])), Some(comps))
    } else {
        (None, None)
    };
    Arc::new(BaseCat::new(cat, &smooth, &closed, initial, Some(products), complements))
}

fn subset_of(b: &BaseCat, x: ObjId) -> u8 {
    let n = b.cat.obj_name(x);
    if n == "o" {
        return 0;
    }
    n.bytes().fold(0u8, |acc, c| acc | 1 << (c - b'1'))
}

// ---------------------------------------------------------------------------
// Fiber blueprints

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Blueprint {
    /// Constant `BZ/2`, `⊠` = multiplication.
    Bz2,
    /// Constant `BZ/3`, `⊠` = multiplication.
    Bz3,
    /// Constant `BS_3`; no tensor structure since `S_3` is not abelian.
    S3,
    /// Constant one-object monoid `{1, a}` with `a·a = a`.
    Monoid,
    /// Constant poset `0 < 1`, `⊠` = meet.
    Poset2,
    /// Constant poset `0 < 1 < 2`, `⊠` = meet.
    Poset3,
    /// `H(S) = C^S` for the chain `C = {0 < 1}`; restriction, extension by
    /// bottom and by top, `⊠` = pointwise meet of restrictions.
    Cs2,
    /// As [`Blueprint::Cs2`] with `C = {0 < 1 < 2}`.
    Cs3,
}

impl Blueprint {
    pub const EACH: [Blueprint; 8] = [
        Blueprint::Bz2,
        Blueprint::Bz3,
        Blueprint::S3,
        Blueprint::Monoid,
        Blueprint::Poset2,
        Blueprint::Poset3,
        Blueprint::Cs2,
        Blueprint::Cs3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Blueprint::Bz2 => "bz2",
            Blueprint::Bz3 => "bz3",
            Blueprint::S3 => "s3",
            Blueprint::Monoid => "monoid",
            Blueprint::Poset2 => "poset2",
            Blueprint::Poset3 => "poset3",
            Blueprint::Cs2 => "cs2",
            Blueprint::Cs3 => "cs3",
        }
    }

    pub fn is_group(self) -> bool {
        matches!(self, Blueprint::Bz2 | Blueprint::Bz3 | Blueprint::S3)
    }

    pub fn has_tensor(self) -> bool {
        self != Blueprint::S3
    }

    pub fn is_localic(self) -> bool {
        matches!(self, Blueprint::Cs2 | Blueprint::Cs3)
    }

    fn chain_len(self) -> usize {
        match self {
            Blueprint::Poset2 | Blueprint::Cs2 => 2,
            _ => 3,
        }
    }

    /// The one-object algebra behind the group and monoid blueprints.
    pub fn algebra(self) -> Option<Algebra> {
        match self {
            Blueprint::Bz2 | Blueprint::Bz3 => {
                let n = if self == Blueprint::Bz2 { 2 } else { 3 };
                Some(Algebra {
                    elems: (0..n).map(|i| format!("g{i}")).collect(),
                    mul: (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect(),
                    unit: 0,
                    // negation, an automorphism of an abelian group
                    hom: (0..n).map(|a| (n - a) % n).collect(),
                })
            }
            Blueprint::S3 => {
                let perms: Vec<[usize; 3]> =
                    vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
                let ix = |p: [usize; 3]| perms.iter().position(|q| *q == p).expect("closed under composition");
                let mul: Vec<Vec<usize>> = perms
                    .iter()
                    .map(|p| perms.iter().map(|q| ix([p[q[0]], p[q[1]], p[q[2]]])).collect())
                    .collect();
                let inv: Vec<usize> = (0..6).map(|a| (0..6).find(|&b| mul[a][b] == 0).expect("group")).collect();
                // conjugation by the transposition (1 2)
                let t = 1;
                let hom = (0..6).map(|a| mul[mul[t][a]][inv[t]]).collect();
                Some(Algebra {
                    elems: perms.iter().map(|p| format!("p{}{}{}", p[0], p[1], p[2])).collect(),
                    mul,
                    unit: 0,
                    hom,
                })
            }
            Blueprint::Monoid => Some(Algebra {
                elems: vec!["1".into(), "a".into()],
                mul: vec![vec![0, 1], vec![1, 1]],
                unit: 0,
                // the homomorphism onto the unit
                hom: vec![0, 0],
            }),
            _ => None,
        }
    }
}

impl FromStr for Blueprint {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Blueprint, GenError> {
        Blueprint::EACH.into_iter().find(|b| b.name() == s).ok_or_else(|| {
            GenError::BadBlueprint(format!(
                "unknown fiber {s:?}; expected one of {}",
                Blueprint::EACH.map(|b| b.name()).join(", ")
            ))
        })
    }
}

/// A finite monoid on elements `0..n`; `mul[a][b]` is `a·b`, which is the
/// composite `a ∘ b` in the one-object category.
#[derive(Clone, Debug)]
pub struct Algebra {
    pub elems: Vec<String>,
    pub mul: Vec<Vec<usize>>,
    pub unit: usize,
    /// The endomorphism used for the morphism family.
    pub hom: Vec<usize>,
}

impl Algebra {
    pub fn inv(&self, a: usize) -> Option<usize> {
        (0..self.elems.len()).find(|&b| self.mul[a][b] == self.unit && self.mul[b][a] == self.unit)
    }

    fn category(&self, name: &str) -> FinCat {
        let n = self.elems.len() as u32;
        let tables = CatTables {
            objects: vec!["*".into()],
            morphisms: self.elems.iter().map(|e| (e.clone(), 0, 0)).collect(),
            identity: vec![self.unit as u32],
            compose: (0..n).flat_map(|g| (0..n).map(move |f| (g, f))).map(|(g, f)| (g, f, self.mul[g as usize][f as usize] as u32)).collect(),
        };
        FinCat::from_tables(name, tables).expect("monoid tables are well formed")
    }

    fn commutative(&self) -> bool {
        let n = self.elems.len();
        (0..n).all(|a| (0..n).all(|b| self.mul[a][b] == self.mul[b][a]))
    }
}

/// A finite poset as a thin category.
#[derive(Clone, Debug)]
struct Poset {
    cat: FinCat,
    arrows: HashMap<(usize, usize), MorId>,
}

impl Poset {
    fn new(name: &str, elems: &[String], leq: impl Fn(usize, usize) -> bool) -> Poset {
        let n = elems.len();
        let mut morphisms = Vec::new();
        let mut arrows = HashMap::new();
        for x in 0..n {
            for y in (0..n).filter(|&y| leq(x, y)) {
                let name = if x == y { format!("id_{}", elems[x]) } else { format!("{}->{}", elems[x], elems[y]) };
                arrows.insert((x, y), MorId(morphisms.len() as u32));
                morphisms.push((name, x as u32, y as u32));
            }
        }
        let mut compose = Vec::new();
        for (&(x, y), &f) in &arrows {
            for (&(y2, z), &g) in &arrows {
                if y2 == y {
                    compose.push((g.0, f.0, arrows[&(x, z)].0));
                }
            }
        }
        compose.sort();
        let tables = CatTables {
            objects: elems.to_vec(),
            morphisms,
            identity: (0..n).map(|x| arrows[&(x, x)].0).collect(),
            compose,
        };
        Poset { cat: FinCat::from_tables(name, tables).expect("poset tables are well formed"), arrows }
    }

    fn arrow(&self, x: usize, y: usize) -> Result<MorId, GenError> {
        self.arrows.get(&(x, y)).copied().ok_or_else(|| {
            GenError::BadBlueprint(format!("{}: no arrow {} -> {}", self.cat.name(), self.cat.obj_name(ObjId(x as u32)), self.cat.obj_name(ObjId(y as u32))))
        })
    }
}

/// The functor into a thin category determined by an object map.
fn thin_functor(name: &str, source: &FinCat, target: &Poset, obj: impl Fn(ObjId) -> usize) -> Result<Functor, GenError> {
    let objs: Vec<ObjId> = source.objects().map(|x| ObjId(obj(x) as u32)).collect();
    let mors = source
        .morphisms()
        .map(|m| target.arrow(objs[source.dom(m).ix()].ix(), objs[source.cod(m).ix()].ix()))
        .collect::<Result<Vec<_>, _>>()?;
    Functor::new(name, source, &target.cat, objs, mors).map_err(build)
}

/// The transformation between two functors into a thin category.
fn thin_trans(source: &Functor, target: &Functor, poset: &Poset) -> Result<NatTrans, GenError> {
    let comps = source
        .source()
        .objects()
        .map(|x| poset.arrow(source.obj(x).ix(), target.obj(x).ix()))
        .collect::<Result<Vec<_>, _>>()?;
    NatTrans::new(source, target, comps).map_err(build)
}

/// Tuples over the elements of a subset, coordinates in increasing order.
struct PowerFiber {
    poset: Poset,
    coords: Vec<u8>,
    k: usize,
}

impl PowerFiber {
    fn new(set: u8, k: usize) -> PowerFiber {
        let coords: Vec<u8> = (0..8).filter(|i| set & (1 << i) != 0).collect();
        let n = coords.len();
        let size = k.pow(n as u32);
        let tuple = |i: usize| -> Vec<usize> { (0..n).map(|j| (i / k.pow((n - 1 - j) as u32)) % k).collect() };
        let elems: Vec<String> = (0..size)
            .map(|i| if n == 0 { "*".to_string() } else { tuple(i).iter().map(|d| d.to_string()).collect() })
            .collect();
        let poset = Poset::new(&format!("C{}^{}", k, set_name(set)), &elems, |x, y| {
            tuple(x).iter().zip(tuple(y)).all(|(a, b)| *a <= b)
        });
        PowerFiber { poset, coords, k }
    }

    fn tuple(&self, x: usize) -> Vec<usize> {
        let n = self.coords.len();
        (0..n).map(|j| (x / self.k.pow((n - 1 - j) as u32)) % self.k).collect()
    }

    fn index(&self, t: &[usize]) -> usize {
        t.iter().fold(0, |acc, d| acc * self.k + d)
    }

    /// The value at every coordinate of `self`, read from `src` where present and `fill` elsewhere.
    fn pull(&self, src: &PowerFiber, x: usize, fill: usize) -> usize {
        let t = src.tuple(x);
        let v: Vec<usize> = self
            .coords
            .iter()
            .map(|c| src.coords.iter().position(|d| d == c).map_or(fill, |j| t[j]))
            .collect();
        self.index(&v)
    }
}

/// The fiber categories and everything else a blueprint supplies over a base.
struct Blue {
    fibers: Vec<FinCat>,
    functors: Vec<Option<Functor>>,
    family: Vec<Functor>,
    boxes: Option<HashMap<(ObjId, ObjId), Functor>>,
    /// Empty for constant blueprints, whose adjunctions are identities.
    left: BTreeMap<MorId, Adjunction>,
    right: BTreeMap<MorId, Adjunction>,
}

fn blueprint_data(b: &BaseCat, bp: Blueprint) -> Result<Blue, GenError> {
    let c = &b.cat;
    if let Some(alg) = bp.algebra() {
        let cat = alg.category(bp.name());
        let fibers = vec![cat.clone(); c.n_objects()];
        let id = Functor::identity(&cat);
        let r = Functor::new("R", &cat, &cat, vec![ObjId(0)], alg.hom.iter().map(|&h| MorId(h as u32)).collect()).map_err(build)?;
        let boxes = if alg.commutative() {
            let prod = FinCat::product(&[cat.clone(), cat.clone()]);
            let mors = prod
                .morphisms()
                .map(|m| {
                    let p = prod.split_mor(m);
                    MorId(alg.mul[p[0].ix()][p[1].ix()] as u32)
                })
                .collect();
            let boxf = Functor::new("mul", &prod, &cat, vec![ObjId(0)], mors).map_err(build)?;
            Some(c.objects().flat_map(|x| c.objects().map(move |y| (x, y))).map(|k| (k, boxf.clone())).collect())
        } else {
            None
        };
        return Ok(Blue {
            fibers,
            functors: c.morphisms().map(|_| Some(id.clone())).collect(),
            family: vec![r; c.n_objects()],
            boxes,
            left: BTreeMap::new(),
            right: BTreeMap::new(),
        });
    }
    let k = bp.chain_len();
    let elems: Vec<String> = (0..k).map(|i| i.to_string()).collect();
    if matches!(bp, Blueprint::Poset2 | Blueprint::Poset3) {
        let p = Poset::new(bp.name(), &elems, |x, y| x <= y);
        let id = Functor::identity(&p.cat);
        let r = thin_functor("R", &p.cat, &p, |x| (x.ix() + 1).min(k - 1))?;
        let prod = FinCat::product(&[p.cat.clone(), p.cat.clone()]);
        let meet = thin_functor("meet", &prod, &p, |x| {
            let q = prod.split_obj(x);
            q[0].ix().min(q[1].ix())
        })?;
        return Ok(Blue {
            fibers: vec![p.cat.clone(); c.n_objects()],
            functors: c.morphisms().map(|_| Some(id.clone())).collect(),
            family: vec![r; c.n_objects()],
            boxes: Some(c.objects().flat_map(|x| c.objects().map(move |y| (x, y))).map(|kk| (kk, meet.clone())).collect()),
            left: BTreeMap::new(),
            right: BTreeMap::new(),
        });
    }
    // C^S
    let pf: Vec<PowerFiber> = c.objects().map(|x| PowerFiber::new(subset_of(b, x), k)).collect();
    if let Some(big) = pf.iter().find(|f| f.poset.cat.n_objects() > 5) {
        return Err(GenError::BadBlueprint(format!(
            "{} over {}: fiber {} has {} objects, more than 5",
            bp.name(),
            c.name(),
            big.poset.cat.name(),
            big.poset.cat.n_objects()
        )));
    }
    let top = k - 1;
    let phi: Vec<usize> = if k == 3 { vec![0, 2, 2] } else { (0..k).collect() };
    let mut functors = Vec::new();
    let mut left = BTreeMap::new();
    let mut right = BTreeMap::new();
    for f in c.morphisms() {
        let (t, s) = (&pf[c.dom(f).ix()], &pf[c.cod(f).ix()]);
        let fstar = if c.is_identity(f) {
            Functor::identity(&s.poset.cat)
        } else {
            thin_functor(&format!("{}^*", b.name(f)), &s.poset.cat, &t.poset, |x| t.pull(s, x.ix(), 0))?
        };
        if !c.is_identity(f) {
            let lower = thin_functor(&format!("{}_#", b.name(f)), &t.poset.cat, &s.poset, |x| s.pull(t, x.ix(), 0))?;
            let upper = thin_functor(&format!("{}_*", b.name(f)), &t.poset.cat, &s.poset, |x| s.pull(t, x.ix(), top))?;
            let (it, is) = (Functor::identity(&t.poset.cat), Functor::identity(&s.poset.cat));
            if b.is_smooth(f) {
                let unit = thin_trans(&it, &Functor::compose(&fstar, &lower), &t.poset)?;
                let counit = thin_trans(&Functor::compose(&lower, &fstar), &is, &s.poset)?;
                left.insert(f, Adjunction::new(lower, fstar.clone(), unit, counit).map_err(GenError::Build)?);
            }
            if b.is_closed(f) {
                let unit = thin_trans(&is, &Functor::compose(&upper, &fstar), &s.poset)?;
                let counit = thin_trans(&Functor::compose(&fstar, &upper), &it, &t.poset)?;
                right.insert(f, Adjunction::new(fstar.clone(), upper, unit, counit).map_err(GenError::Build)?);
            }
        }
        functors.push(Some(fstar));
    }
    let family = pf
        .iter()
        .map(|p| {
            thin_functor("R", &p.poset.cat, &p.poset, |x| {
                let t: Vec<usize> = p.tuple(x.ix()).iter().map(|&d| phi[d]).collect();
                p.index(&t)
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut boxes = HashMap::new();
    for x in c.objects() {
        for y in c.objects() {
            let (p1, p2) = (&pf[x.ix()], &pf[y.ix()]);
            let p12 = &pf[b.product_obj(x, y).ix()];
            let prod = FinCat::product(&[p1.poset.cat.clone(), p2.poset.cat.clone()]);
            let f = thin_functor("meet", &prod, &p12.poset, |o| {
                let q = prod.split_obj(o);
                let (a, bb) = (p12.tuple(p12.pull(p1, q[0].ix(), top)), p12.tuple(p12.pull(p2, q[1].ix(), top)));
                let t: Vec<usize> = a.iter().zip(&bb).map(|(u, v)| *u.min(v)).collect();
                p12.index(&t)
            })?;
            boxes.insert((x, y), f);
        }
    }
    Ok(Blue {
        fibers: pf.iter().map(|p| p.poset.cat.clone()).collect(),
        functors,
        family,
        boxes: Some(boxes),
        left,
        right,
    })
}

fn identity_map<K: Copy + Eq + std::hash::Hash>(
    keys: impl IntoIterator<Item = K>,
    boundary: impl Fn(K) -> Result<(Functor, Functor), GenError>,
) -> Result<HashMap<K, NatTrans>, GenError> {
    let mut out = HashMap::new();
    for k in keys {
        let (s, t) = boundary(k)?;
        if !s.same(&t) {
            return Err(GenError::BadBlueprint("a strict cell does not have equal boundaries".into()));
        }
        out.insert(k, NatTrans::identity(&s));
    }
    Ok(out)
}

/// Two copies `H`, `K` of the blueprint presheaf with adjoints on both sides,
/// a morphism `R: H → K`, tensor structures on both with associativity and
/// commutativity constraints, and `ρ` for `R`. Every comparison, transition and
/// cell is an identity.
pub fn strict_presheaf_instance(base: Arc<BaseCat>, bp: Blueprint) -> Result<Instance, GenError> {
    let blue = blueprint_data(&base, bp)?;
    let name = format!("strict-{}-{}", bp.name(), base.cat.name());
    let mut inst = Instance::new(base.clone(), &name);
    for host in ["H", "K"] {
        let h = FiberedCat::new(host, base.clone(), Variance::Inverse, Scope::All, blue.fibers.clone(), blue.functors.clone(), HashMap::new())
            .map_err(build)?;
        inst.fibered.push(Arc::new(h));
    }
    for i in 0..2 {
        let h = inst.fibered[i].clone();
        let (l, r) = if bp.is_localic() {
            (
                AdjointAssignment::new(h.clone(), Side::Left, Scope::Smooth, blue.left.clone()),
                AdjointAssignment::new(h, Side::Right, Scope::Closed, blue.right.clone()),
            )
        } else {
            // constant blueprints: every inverse image is the identity
            (
                AdjointAssignment::identities(h.clone(), Side::Left, Scope::Smooth),
                AdjointAssignment::identities(h, Side::Right, Scope::Closed),
            )
        };
        let (l, r) = (l.map_err(build)?, r.map_err(build)?);
        inst.adjunctions.push(l);
        inst.adjunctions.push(r);
    }
    let fm = FibMorphism::new("R", inst.fibered[0].clone(), inst.fibered[1].clone(), blue.family.clone(), Vec::new()).map_err(build)?;
    inst.morphisms.push(MorphismEntry {
        name: "R".into(),
        source: 0,
        target: 1,
        family: blue.family.clone(),
        theta: Some(fm.thetas().to_vec()),
        theta_sm: None,
        theta_cl: None,
        theta_bar_cl: None,
    });
    if let Some(map) = &blue.boxes {
        let boxes = Arc::new(Boxes::new(base.clone(), &blue.fibers, map.clone()).map_err(build)?);
        let objs: Vec<ObjId> = base.cat.objects().collect();
        let pairs: Vec<(ObjId, ObjId)> = objs.iter().flat_map(|&x| objs.iter().map(move |&y| (x, y))).collect();
        let triples: Vec<(ObjId, ObjId, ObjId)> = pairs.iter().flat_map(|&(x, y)| objs.iter().map(move |&z| (x, y, z))).collect();
        for (i, name) in [(0, "boxH"), (1, "boxK")] {
            let h = inst.fibered[i].clone();
            let e = EtsData::new(name, h.clone(), boxes.clone(), HashMap::new()).map_err(build)?;
            let assoc = identity_map(triples.iter().copied(), |(x, y, z)| Ok(assoc_boundary(&h, &boxes, x, y, z)))?;
            let comm = identity_map(pairs.iter().copied(), |(x, y)| comm_boundary(&h, &boxes, x, y).map_err(build))?;
            inst.ets.push(EtsEntry {
                name: name.into(),
                host: i,
                boxes: boxes.clone(),
                m: Some(e.cells().clone()),
                m_sm: None,
                m_cl: None,
                m_bar_cl: None,
                assoc: Some(assoc),
                comm: Some(comm),
            });
        }
        let rho = identity_map(pairs.iter().copied(), |(x, y)| Ok(rho_boundary(&blue.family, &boxes, &boxes, x, y)))?;
        inst.mor_ets.push(MorEtsEntry { name: "rhoR".into(), morphism: 0, source_ets: 0, target_ets: 1, rho: Some(rho), rho_sm: None, rho_cl: None });
    }
    Ok(inst)
}

/// The base a blueprint is meant to live over: localic blueprints get the
/// initial object and open complements when the marking allows them.
pub fn blueprint_base(l: Lattice, marking: Marking, bp: Blueprint) -> Arc<BaseCat> {
    let core = bp.is_localic() && matches!(marking, Marking::All | Marking::SmoothOnly);
    lattice_base(l, marking, core)
}

// ---------------------------------------------------------------------------
// Forms

/// Which presentation of the transitions and cells an instance carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Form {
    Full,
    Skeleton,
    Core,
}

impl Form {
    pub fn name(self) -> &'static str {
        match self {
            Form::Full => "full",
            Form::Skeleton => "skeleton",
            Form::Core => "core",
        }
    }
}

/// Re-presents a full-form instance. Core form needs invertible transposes.
pub fn with_form(inst: &Instance, form: Form) -> Result<Instance, GenError> {
    let mut out = inst.clone();
    for (i, m) in inst.morphisms.iter().enumerate() {
        if m.theta.is_none() {
            return Err(GenError::Build(format!("{} has no full transitions", m.name)));
        }
        let o = &mut out.morphisms[i];
        (o.theta_sm, o.theta_cl, o.theta_bar_cl) = (None, None, None);
        match form {
            Form::Full => {}
            Form::Skeleton => {
                let s = suites::skeleton_of(inst, m).expect("full transitions present").map_err(GenError::Build)?;
                o.theta = None;
                o.theta_sm = Some(s.sm.thetas().to_vec());
                o.theta_cl = Some(s.cl.thetas().to_vec());
            }
            Form::Core => {
                let c = suites::core_of(inst, m)
                    .ok_or_else(|| GenError::Build(format!("{}: adjoints missing", m.name)))?
                    .map_err(build)?;
                o.theta = None;
                o.theta_sm = Some(c.sm.thetas().to_vec());
                o.theta_bar_cl = Some(c.cl_bar.clone());
            }
        }
    }
    for (i, e) in inst.ets.iter().enumerate() {
        if e.m.is_none() {
            return Err(GenError::Build(format!("{} has no full cells", e.name)));
        }
        let o = &mut out.ets[i];
        (o.m_sm, o.m_cl, o.m_bar_cl) = (None, None, None);
        match form {
            Form::Full => {}
            Form::Skeleton => {
                let s = suites::ets_skeleton_of(inst, e).expect("full cells present").map_err(GenError::Build)?;
                o.m = None;
                o.m_sm = Some(s.sm.cells().clone());
                o.m_cl = Some(s.cl.cells().clone());
            }
            Form::Core => {
                let c = suites::etc_of(inst, e)
                    .ok_or_else(|| GenError::Build(format!("{}: adjoints missing", e.name)))?
                    .map_err(build)?;
                o.m = None;
                o.m_sm = Some(c.sm.cells().clone());
                o.m_bar_cl = Some(c.cl_bar.clone());
            }
        }
    }
    for r in &mut out.mor_ets {
        let rho = r.rho.take().or(r.rho_sm.take()).ok_or_else(|| GenError::Build(format!("{} has no rho", r.name)))?;
        r.rho_cl = None;
        match form {
            Form::Full => r.rho = Some(rho),
            Form::Skeleton | Form::Core => {
                r.rho_sm = Some(rho.clone());
                r.rho_cl = Some(rho);
            }
        }
    }
    out.name = format!("{}-{}", inst.name, form.name());
    Ok(out)
}

// ---------------------------------------------------------------------------
// Twists

/// Chosen automorphisms. Identity base morphisms are never twisted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TwistSpec {
    pub seed: u64,
    /// Per fibered category and non-identity base morphism `f`: an automorphism
    /// of `F_f(x)` for every object `x` of the source fiber.
    pub functors: Vec<BTreeMap<MorId, Vec<MorId>>>,
    /// Per tensor structure and object pair: an automorphism of `⊠(x)` for every
    /// object `x` of the product fiber.
    pub boxes: Vec<BTreeMap<(ObjId, ObjId), Vec<MorId>>>,
}

fn automorphisms(c: &FinCat, x: ObjId) -> Vec<MorId> {
    c.hom(x, x).into_iter().filter(|&m| c.is_iso(m)).collect()
}

fn pick_autos(r: &mut ChaCha8Rng, f: &Functor) -> Vec<MorId> {
    let d = f.target();
    f.source()
        .objects()
        .map(|x| *automorphisms(d, f.obj(x)).choose(r).expect("identities are automorphisms"))
        .collect()
}

pub fn random_twist(inst: &Instance, seed: u64) -> TwistSpec {
    let mut r = rng(seed);
    let b = &inst.base;
    let functors = inst
        .fibered
        .iter()
        .map(|h| {
            h.scoped()
                .into_iter()
                .filter(|&m| !b.is_id(m))
                .map(|m| (m, pick_autos(&mut r, h.functor(m))))
                .collect()
        })
        .collect();
    let boxes = inst
        .ets
        .iter()
        .map(|e| {
            b.cat
                .objects()
                .flat_map(|x| b.cat.objects().map(move |y| (x, y)))
                .map(|k| (k, pick_autos(&mut r, e.boxes.at(k.0, k.1))))
                .collect()
        })
        .collect();
    TwistSpec { seed, functors, boxes }
}

/// `m ↦ k_y ∘ F(m) ∘ k_x⁻¹` together with `F ⇒ F'` given by `k`.
fn conjugate(f: &Functor, k: &[MorId], what: &str) -> Result<(Functor, NatTrans), GenError> {
    let (c, d) = (f.source(), f.target());
    if k.len() != c.n_objects() {
        return Err(GenError::NotIso(format!("{what}: {} choices for {} objects", k.len(), c.n_objects())));
    }
    let mut inv = Vec::new();
    for x in c.objects() {
        let m = k[x.ix()];
        let ok = m.ix() < d.n_morphisms() && d.dom(m) == f.obj(x) && d.cod(m) == f.obj(x);
        match d.inverse(m).filter(|_| ok) {
            Some(i) => inv.push(i),
            None => return Err(GenError::NotIso(format!("{what} at {}", c.obj_name(x)))),
        }
    }
    let mors = c
        .morphisms()
        .map(|m| d.compose(k[c.cod(m).ix()], d.compose(f.mor(m), inv[c.dom(m).ix()])))
        .collect();
    let g = Functor::new(f.name(), c, d, f.obj_table().to_vec(), mors).map_err(build)?;
    let t = NatTrans::new(f, &g, k.to_vec()).map_err(build)?;
    Ok((g, t))
}

fn inv(t: &NatTrans) -> Result<NatTrans, GenError> {
    invert_nat_iso(t).map_err(|e| GenError::NotIso(e.to_string()))
}

fn chain(ts: &[NatTrans]) -> NatTrans {
    let mut acc = ts[0].clone();
    for t in &ts[1..] {
        acc = NatTrans::vcomp(t, &acc);
    }
    acc
}

struct HostTwist {
    host: Arc<FiberedCat>,
    /// `φ_f: F_f ⇒ F'_f`, identities where untwisted.
    phi: Vec<Option<NatTrans>>,
}

fn twist_host(h: &FiberedCat, choice: &BTreeMap<MorId, Vec<MorId>>) -> Result<HostTwist, GenError> {
    let b = &h.base;
    let mut functors = vec![None; b.cat.n_morphisms()];
    let mut phi = vec![None; b.cat.n_morphisms()];
    for m in h.scoped() {
        let f = h.functor(m);
        let (g, t) = match choice.get(&m).filter(|_| !b.is_id(m)) {
            Some(k) => conjugate(f, k, &format!("{}.{}", h.name, b.name(m)))?,
            None => (f.clone(), NatTrans::identity(f)),
        };
        functors[m.ix()] = Some(g);
        phi[m.ix()] = Some(t);
    }
    let fun = |m: MorId| functors[m.ix()].clone().expect("in scope");
    let ph = |m: MorId| phi[m.ix()].clone().expect("in scope");
    let mut comparisons = HashMap::new();
    for (first, second) in h.pairs() {
        let c = h.composite(first, second);
        // φ_second ∗ φ_first : F_second F_first ⇒ F'_second F'_first
        let star = NatTrans::vcomp(&NatTrans::right(&ph(second), &fun(first)), &NatTrans::left(h.functor(second), &ph(first)));
        let t = chain(&[inv(&ph(c))?, h.comparison(first, second).clone(), star]);
        comparisons.insert((first, second), t);
    }
    let host = FiberedCat::new(&h.name, h.base.clone(), h.variance, h.scope, h.fibers().to_vec(), functors, comparisons).map_err(build)?;
    Ok(HostTwist { host: Arc::new(host), phi })
}

fn twist_assignment(a: &AdjointAssignment, t: &HostTwist) -> Result<AdjointAssignment, GenError> {
    let mut entries = BTreeMap::new();
    for (f, adj) in a.entries() {
        let phi = t.phi[f.ix()].clone().expect("marked morphisms are in scope");
        let new = match a.side {
            Side::Left => {
                let l = &adj.left;
                let fp = phi.target().clone();
                let unit = NatTrans::vcomp(&NatTrans::right(&phi, l), &adj.unit);
                let counit = NatTrans::vcomp(&adj.counit, &NatTrans::left(l, &inv(&phi)?));
                Adjunction::new(l.clone(), fp, unit, counit)
            }
            Side::Right => {
                let g = &adj.right;
                let fp = phi.target().clone();
                let unit = NatTrans::vcomp(&NatTrans::left(g, &phi), &adj.unit);
                let counit = NatTrans::vcomp(&adj.counit, &NatTrans::right(&inv(&phi)?, g));
                Adjunction::new(fp, g.clone(), unit, counit)
            }
        }
        .map_err(GenError::Build)?;
        entries.insert(f, new);
    }
    AdjointAssignment::new(t.host.clone(), a.side, a.marked, entries).map_err(build)
}

/// Conjugates every inverse image and box by the chosen automorphisms and
/// transports comparisons, adjunctions, transitions, cells, constraints and
/// `ρ` along them. Needs full forms; the result is in full form.
pub fn twist_instance(inst: &Instance, spec: &TwistSpec) -> Result<Instance, GenError> {
    let b = inst.base.clone();
    if spec.functors.len() != inst.fibered.len() || spec.boxes.len() != inst.ets.len() {
        return Err(GenError::BadBlueprint("twist does not match the instance".into()));
    }
    let hosts: Vec<HostTwist> = inst.fibered.iter().zip(&spec.functors).map(|(h, c)| twist_host(h, c)).collect::<Result<_, _>>()?;
    let mut out = inst.clone();
    out.name = format!("twist{}-{}", spec.seed, inst.name.trim_start_matches("strict-"));
    out.seed = Some(spec.seed);
    out.fibered = hosts.iter().map(|t| t.host.clone()).collect();
    out.adjunctions = inst
        .adjunctions
        .iter()
        .map(|a| {
            let i = inst.fibered_index(&a.host.name).expect("assignments sit on hosts");
            twist_assignment(a, &hosts[i])
        })
        .collect::<Result<_, _>>()?;
    let phi = |host: usize, f: MorId| hosts[host].phi[f.ix()].clone().expect("in scope");

    for (i, m) in inst.morphisms.iter().enumerate() {
        let th = m.theta.as_ref().ok_or_else(|| GenError::Build(format!("{}: twist needs full transitions", m.name)))?;
        let h1 = &inst.fibered[m.source];
        let mut out_th = th.clone();
        for f in h1.scoped() {
            let t = th[f.ix()].as_ref().expect("full transitions cover the scope");
            let r_src = &m.family[h1.src(f).ix()];
            let r_tgt = &m.family[h1.tgt(f).ix()];
            let a = NatTrans::right(&inv(&phi(m.target, f))?, r_src);
            let c = NatTrans::left(r_tgt, &phi(m.source, f));
            out_th[f.ix()] = Some(chain(&[a, t.clone(), c]));
        }
        out.morphisms[i].theta = Some(out_th);
        (out.morphisms[i].theta_sm, out.morphisms[i].theta_cl, out.morphisms[i].theta_bar_cl) = (None, None, None);
    }

    let mut chis: Vec<HashMap<(ObjId, ObjId), NatTrans>> = Vec::new();
    for (i, e) in inst.ets.iter().enumerate() {
        let mut map = HashMap::new();
        let mut chi = HashMap::new();
        for x in b.cat.objects() {
            for y in b.cat.objects() {
                let k = spec.boxes[i].get(&(x, y)).cloned().unwrap_or_else(|| {
                    let f = e.boxes.at(x, y);
                    f.source().objects().map(|o| f.target().id(f.obj(o))).collect()
                });
                let (g, t) = conjugate(e.boxes.at(x, y), &k, &format!("{}.box[{},{}]", e.name, b.oname(x), b.oname(y)))?;
                map.insert((x, y), g);
                chi.insert((x, y), t);
            }
        }
        let fibers = inst.fibered[e.host].fibers().to_vec();
        let boxes = Arc::new(Boxes::new(b.clone(), &fibers, map).map_err(build)?);
        let h = &*inst.fibered[e.host];
        let hn = &*out.fibered[e.host];
        let m = e.m.as_ref().ok_or_else(|| GenError::Build(format!("{}: twist needs full cells", e.name)))?;
        let mut cells = HashMap::new();
        for (&(f1, f2), t) in m {
            let f12 = b.times(f1, f2);
            let s = (h.src(f1), h.src(f2));
            let tg = (h.tgt(f1), h.tgt(f2));
            let fp = Functor::product(&[hn.functor(f1), hn.functor(f2)]);
            let s1 = inv(&NatTrans::right(&chi[&tg], &fp))?;
            let s2 = inv(&NatTrans::left(e.boxes.at(tg.0, tg.1), &NatTrans::product(&[&phi(e.host, f1), &phi(e.host, f2)])))?;
            let s4 = NatTrans::right(&phi(e.host, f12), e.boxes.at(s.0, s.1));
            let s5 = NatTrans::left(hn.functor(f12), &chi[&s]);
            cells.insert((f1, f2), chain(&[s1, s2, t.clone(), s4, s5]));
        }
        let assoc = match &e.assoc {
            None => None,
            Some(a) => {
                let mut out_a = HashMap::new();
                for (&(x, y, z), t) in a {
                    let (xy, yz) = (b.product_obj(x, y), b.product_obj(y, z));
                    let idf = |o: ObjId| Functor::identity(h.fiber(o));
                    let idt = |o: ObjId| NatTrans::identity(&idf(o));
                    let left = NatTrans::vcomp(
                        &NatTrans::right(&chi[&(xy, z)], &Functor::product(&[boxes.at(x, y), &idf(z)])),
                        &NatTrans::left(e.boxes.at(xy, z), &NatTrans::product(&[&chi[&(x, y)], &idt(z)])),
                    );
                    let right = NatTrans::vcomp(
                        &NatTrans::right(&chi[&(x, yz)], &Functor::product(&[&idf(x), boxes.at(y, z)])),
                        &NatTrans::left(e.boxes.at(x, yz), &NatTrans::product(&[&idt(x), &chi[&(y, z)]])),
                    );
                    out_a.insert((x, y, z), chain(&[inv(&left)?, t.clone(), right]));
                }
                Some(out_a)
            }
        };
        let comm = match &e.comm {
            None => None,
            Some(cm) => {
                let mut out_c = HashMap::new();
                for (&(x, y), t) in cm {
                    let s = sym(h, x, y).map_err(build)?;
                    let swap = Functor::swap(h.fiber(x), h.fiber(y));
                    let tail = NatTrans::vcomp(
                        &NatTrans::right(&phi(e.host, s), &Functor::compose(boxes.at(y, x), &swap)),
                        &NatTrans::left(h.functor(s), &NatTrans::right(&chi[&(y, x)], &swap)),
                    );
                    out_c.insert((x, y), chain(&[inv(&chi[&(x, y)])?, t.clone(), tail]));
                }
                Some(out_c)
            }
        };
        let o = &mut out.ets[i];
        o.boxes = boxes;
        o.m = Some(cells);
        (o.m_sm, o.m_cl, o.m_bar_cl) = (None, None, None);
        o.assoc = assoc;
        o.comm = comm;
        chis.push(chi);
    }

    for (i, r) in inst.mor_ets.iter().enumerate() {
        let rho = r.rho.as_ref().ok_or_else(|| GenError::Build(format!("{}: twist needs full rho", r.name)))?;
        let fam = &inst.morphisms[r.morphism].family;
        let (c1, c2) = (&chis[r.source_ets], &chis[r.target_ets]);
        let mut out_r = HashMap::new();
        for (&(x, y), t) in rho {
            let rr = Functor::product(&[&fam[x.ix()], &fam[y.ix()]]);
            let a = inv(&NatTrans::right(&c2[&(x, y)], &rr))?;
            let c = NatTrans::left(&fam[b.product_obj(x, y).ix()], &c1[&(x, y)]);
            out_r.insert((x, y), chain(&[a, t.clone(), c]));
        }
        out.mor_ets[i].rho = Some(out_r);
        (out.mor_ets[i].rho_sm, out.mor_ets[i].rho_cl) = (None, None);
    }
    Ok(out)
}

/// Predicted full tables of a twisted strict instance, per morphism and per
/// tensor structure, in the instance's order.
#[derive(Clone, Debug)]
pub struct Oracle {
    pub theta: Vec<Thetas>,
    pub m: Vec<PairCells>,
}

/// Computes the twisted transitions and cells by monoid arithmetic on the
/// chosen elements: `θ'_f = α(k_f)·l_f⁻¹` for the source and target twists
/// `k`, `l` and the family's endomorphism `α`, and
/// `m'_{f1,f2} = k_{f1×f2}·c_src·(k_f1·k_f2)⁻¹·c_tgt⁻¹` for the box twist `c`.
/// Blueprints without non-identity automorphisms predict identities.
pub fn twist_oracle(strict: &Instance, twisted: &Instance, bp: Blueprint, spec: &TwistSpec) -> Result<Oracle, GenError> {
    let b = &strict.base;
    let alg = bp.algebra().filter(|_| bp.is_group());
    let pick = |v: Option<&Vec<MorId>>, unit: usize| v.map_or(unit, |k| k[0].ix());
    let mut theta = Vec::new();
    for (i, m) in twisted.morphisms.iter().enumerate() {
        let th = m.theta.as_ref().ok_or_else(|| GenError::Build("twisted instances are full".into()))?;
        let mut out = vec![None; b.cat.n_morphisms()];
        for f in b.cat.morphisms() {
            let Some(t) = &th[f.ix()] else { continue };
            let comps = match &alg {
                Some(a) => {
                    let k = pick(spec.functors[strict.morphisms[i].source].get(&f), a.unit);
                    let l = pick(spec.functors[strict.morphisms[i].target].get(&f), a.unit);
                    let li = a.inv(l).ok_or_else(|| GenError::NotIso(a.elems[l].clone()))?;
                    vec![MorId(a.mul[a.hom[k]][li] as u32)]
                }
                None => identity_comps(t),
            };
            out[f.ix()] = Some(NatTrans::new(t.source(), t.target(), comps).map_err(build)?);
        }
        theta.push(out);
    }
    let mut m = Vec::new();
    for (i, e) in twisted.ets.iter().enumerate() {
        let cells = e.m.as_ref().ok_or_else(|| GenError::Build("twisted instances are full".into()))?;
        let h = &twisted.fibered[e.host];
        let mut out = HashMap::new();
        for (&(f1, f2), t) in cells {
            let comps = match &alg {
                Some(a) => {
                    let tw = &spec.functors[e.host];
                    let k = |f: MorId| pick(tw.get(&f), a.unit);
                    let cs = pick(spec.boxes[i].get(&(h.src(f1), h.src(f2))), a.unit);
                    let ct = pick(spec.boxes[i].get(&(h.tgt(f1), h.tgt(f2))), a.unit);
                    let k12 = k(b.times(f1, f2));
                    let den = a.inv(a.mul[k(f1)][k(f2)]).expect("group");
                    let cti = a.inv(ct).expect("group");
                    vec![MorId(a.mul[a.mul[a.mul[k12][cs]][den]][cti] as u32)]
                }
                None => identity_comps(t),
            };
            out.insert((f1, f2), NatTrans::new(t.source(), t.target(), comps).map_err(build)?);
        }
        m.push(out);
    }
    Ok(Oracle { theta, m })
}

fn identity_comps(t: &NatTrans) -> Vec<MorId> {
    let d = t.codomain();
    t.domain().objects().map(|x| d.id(t.source().obj(x))).collect()
}

/// Full transition and cell tables in emitted form; the comparison target for oracles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TablesDoc {
    pub theta: BTreeMap<String, BTreeMap<String, TransDoc>>,
    pub m: BTreeMap<String, Vec<PairCellDoc>>,
}

impl TablesDoc {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tables serialize")
    }
}

pub fn oracle_tables(inst: &Instance, o: &Oracle) -> TablesDoc {
    let b = &inst.base;
    TablesDoc {
        theta: inst.morphisms.iter().zip(&o.theta).map(|(m, t)| (m.name.clone(), emit_thetas(b, t))).collect(),
        m: inst.ets.iter().zip(&o.m).map(|(e, c)| (e.name.clone(), emit_pairs(b, c))).collect(),
    }
}

/// The instance's full tables; entries without a full form are left out.
pub fn full_tables(inst: &Instance) -> TablesDoc {
    let b = &inst.base;
    TablesDoc {
        theta: inst.morphisms.iter().filter_map(|m| m.theta.as_ref().map(|t| (m.name.clone(), emit_thetas(b, t)))).collect(),
        m: inst.ets.iter().filter_map(|e| e.m.as_ref().map(|c| (e.name.clone(), emit_pairs(b, c)))).collect(),
    }
}

// ---------------------------------------------------------------------------
// Mutations

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellForm {
    Full,
    Smooth,
    Closed,
    ClosedBar,
}

impl CellForm {
    pub fn name(self) -> &'static str {
        match self {
            CellForm::Full => "full",
            CellForm::Smooth => "smooth",
            CellForm::Closed => "closed",
            CellForm::ClosedBar => "closed-bar",
        }
    }
}

/// One component of one cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Address {
    /// The comparison keyed `(first, second)` in application order.
    Conn { host: usize, first: MorId, second: MorId, object: ObjId },
    Theta { morphism: usize, form: CellForm, f: MorId, object: ObjId },
    M { ets: usize, form: CellForm, f1: MorId, f2: MorId, object: ObjId },
    Assoc { ets: usize, objects: (ObjId, ObjId, ObjId), object: ObjId },
    Comm { ets: usize, objects: (ObjId, ObjId), object: ObjId },
    Rho { mor_ets: usize, form: CellForm, objects: (ObjId, ObjId), object: ObjId },
    Unit { adjunction: usize, f: MorId, object: ObjId },
    Counit { adjunction: usize, f: MorId, object: ObjId },
}

impl Address {
    pub fn family(&self) -> String {
        match self {
            Address::Conn { .. } => "conn".into(),
            Address::Theta { form, .. } => format!("theta-{}", form.name()),
            Address::M { form, .. } => format!("m-{}", form.name()),
            Address::Assoc { .. } => "assoc".into(),
            Address::Comm { .. } => "comm".into(),
            Address::Rho { form, .. } => format!("rho-{}", form.name()),
            Address::Unit { .. } => "unit".into(),
            Address::Counit { .. } => "counit".into(),
        }
    }

    pub fn object(&self) -> ObjId {
        match *self {
            Address::Conn { object, .. }
            | Address::Theta { object, .. }
            | Address::M { object, .. }
            | Address::Assoc { object, .. }
            | Address::Comm { object, .. }
            | Address::Rho { object, .. }
            | Address::Unit { object, .. }
            | Address::Counit { object, .. } => object,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MutationSpec {
    pub address: Address,
    pub replacement: MorId,
}

fn invalid(msg: impl Into<String>) -> GenError {
    GenError::AddressInvalid(msg.into())
}

fn thetas_ref(m: &MorphismEntry, form: CellForm) -> Option<&Thetas> {
    match form {
        CellForm::Full => m.theta.as_ref(),
        CellForm::Smooth => m.theta_sm.as_ref(),
        CellForm::Closed => m.theta_cl.as_ref(),
        CellForm::ClosedBar => m.theta_bar_cl.as_ref(),
    }
}

fn pairs_ref(e: &EtsEntry, form: CellForm) -> Option<&PairCells> {
    match form {
        CellForm::Full => e.m.as_ref(),
        CellForm::Smooth => e.m_sm.as_ref(),
        CellForm::Closed => e.m_cl.as_ref(),
        CellForm::ClosedBar => e.m_bar_cl.as_ref(),
    }
}

fn rho_ref(r: &MorEtsEntry, form: CellForm) -> Option<&HashMap<(ObjId, ObjId), NatTrans>> {
    match form {
        CellForm::Full => r.rho.as_ref(),
        CellForm::Smooth => r.rho_sm.as_ref(),
        CellForm::Closed => r.rho_cl.as_ref(),
        CellForm::ClosedBar => None,
    }
}

fn thetas_mut(m: &mut MorphismEntry, form: CellForm) -> Option<&mut Thetas> {
    match form {
        CellForm::Full => m.theta.as_mut(),
        CellForm::Smooth => m.theta_sm.as_mut(),
        CellForm::Closed => m.theta_cl.as_mut(),
        CellForm::ClosedBar => m.theta_bar_cl.as_mut(),
    }
}

fn pairs_mut(e: &mut EtsEntry, form: CellForm) -> Option<&mut PairCells> {
    match form {
        CellForm::Full => e.m.as_mut(),
        CellForm::Smooth => e.m_sm.as_mut(),
        CellForm::Closed => e.m_cl.as_mut(),
        CellForm::ClosedBar => e.m_bar_cl.as_mut(),
    }
}

fn rho_mut(r: &mut MorEtsEntry, form: CellForm) -> Option<&mut HashMap<(ObjId, ObjId), NatTrans>> {
    match form {
        CellForm::Full => r.rho.as_mut(),
        CellForm::Smooth => r.rho_sm.as_mut(),
        CellForm::Closed => r.rho_cl.as_mut(),
        CellForm::ClosedBar => None,
    }
}

/// The cell an address points into.
pub fn cell_at(inst: &Instance, a: &Address) -> Result<NatTrans, GenError> {
    let t = match *a {
        Address::Conn { host, first, second, .. } => {
            let h = inst.fibered.get(host).ok_or_else(|| invalid("no such fibered category"))?;
            if !h.in_scope(first) || !h.in_scope(second) || !h.chains(first, second) {
                return Err(invalid("comparison pair not composable in scope"));
            }
            h.comparison(first, second).clone()
        }
        Address::Theta { morphism, form, f, .. } => {
            let m = inst.morphisms.get(morphism).ok_or_else(|| invalid("no such morphism"))?;
            let th = thetas_ref(m, form).ok_or_else(|| invalid(format!("morphism has no {} transitions", form.name())))?;
            th.get(f.ix()).cloned().flatten().ok_or_else(|| invalid("transition outside the form's scope"))?
        }
        Address::M { ets, form, f1, f2, .. } => {
            let e = inst.ets.get(ets).ok_or_else(|| invalid("no such tensor structure"))?;
            let cells = pairs_ref(e, form).ok_or_else(|| invalid(format!("tensor structure has no {} cells", form.name())))?;
            cells.get(&(f1, f2)).cloned().ok_or_else(|| invalid("cell outside the form's scope"))?
        }
        Address::Assoc { ets, objects, .. } => {
            let e = inst.ets.get(ets).ok_or_else(|| invalid("no such tensor structure"))?;
            e.assoc.as_ref().and_then(|a| a.get(&objects)).cloned().ok_or_else(|| invalid("no associator there"))?
        }
        Address::Comm { ets, objects, .. } => {
            let e = inst.ets.get(ets).ok_or_else(|| invalid("no such tensor structure"))?;
            e.comm.as_ref().and_then(|a| a.get(&objects)).cloned().ok_or_else(|| invalid("no commutator there"))?
        }
        Address::Rho { mor_ets, form, objects, .. } => {
            let r = inst.mor_ets.get(mor_ets).ok_or_else(|| invalid("no such tensor morphism"))?;
            rho_ref(r, form).and_then(|x| x.get(&objects)).cloned().ok_or_else(|| invalid("no rho there"))?
        }
        Address::Unit { adjunction, f, .. } | Address::Counit { adjunction, f, .. } => {
            let fam = inst.adjunctions.get(adjunction).ok_or_else(|| invalid("no such adjunction family"))?;
            if !fam.has(f) {
                return Err(invalid("no adjunction at that morphism"));
            }
            let e = fam.entry(f);
            if matches!(a, Address::Unit { .. }) {
                e.unit.clone()
            } else {
                e.counit.clone()
            }
        }
    };
    if a.object().ix() >= t.domain().n_objects() {
        return Err(invalid("object outside the cell's domain"));
    }
    Ok(t)
}

fn replace_host(inst: &mut Instance, host: usize, new: Arc<FiberedCat>) -> Result<(), GenError> {
    let name = inst.fibered[host].name.clone();
    inst.fibered[host] = new.clone();
    for a in inst.adjunctions.iter_mut().filter(|a| a.host.name == name) {
        let entries = a.entries().map(|(f, adj)| (f, adj.clone())).collect();
        *a = AdjointAssignment::new(new.clone(), a.side, a.marked, entries).map_err(build)?;
    }
    Ok(())
}

/// Human-readable address, e.g. `theta-full[R](o->1)@*`.
pub fn describe(inst: &Instance, a: &Address) -> String {
    let b = &inst.base;
    let at = |x: ObjId| match cell_at(inst, a) {
        Ok(t) => t.domain().obj_name(x),
        Err(_) => format!("#{}", x.0),
    };
    match *a {
        Address::Conn { host, first, second, object } => {
            format!("conn[{}]({},{})@{}", inst.fibered[host].name, b.name(first), b.name(second), at(object))
        }
        Address::Theta { morphism, f, object, .. } => {
            format!("{}[{}]({})@{}", a.family(), inst.morphisms[morphism].name, b.name(f), at(object))
        }
        Address::M { ets, f1, f2, object, .. } => {
            format!("{}[{}]({},{})@{}", a.family(), inst.ets[ets].name, b.name(f1), b.name(f2), at(object))
        }
        Address::Assoc { ets, objects: (x, y, z), object } => {
            format!("assoc[{}]({},{},{})@{}", inst.ets[ets].name, b.oname(x), b.oname(y), b.oname(z), at(object))
        }
        Address::Comm { ets, objects: (x, y), object } => {
            format!("comm[{}]({},{})@{}", inst.ets[ets].name, b.oname(x), b.oname(y), at(object))
        }
        Address::Rho { mor_ets, objects: (x, y), object, .. } => {
            format!("{}[{}]({},{})@{}", a.family(), inst.mor_ets[mor_ets].name, b.oname(x), b.oname(y), at(object))
        }
        Address::Unit { adjunction, f, object } | Address::Counit { adjunction, f, object } => {
            let fam = &inst.adjunctions[adjunction];
            let side = match fam.side {
                Side::Left => "left",
                Side::Right => "right",
            };
            format!("{}[{}/{}]({})@{}", a.family(), fam.host.name, side, b.name(f), at(object))
        }
    }
}

/// Replaces one component. The replacement must be a different parallel
/// morphism; naturality is not required here.
pub fn mutate_instance(inst: &Instance, spec: &MutationSpec) -> Result<Instance, GenError> {
    let t = cell_at(inst, &spec.address)?;
    let x = spec.address.object();
    let d = t.codomain();
    let (old, r) = (t.at(x), spec.replacement);
    if r.ix() >= d.n_morphisms() || d.dom(r) != d.dom(old) || d.cod(r) != d.cod(old) {
        return Err(invalid("replacement is not parallel to the original component"));
    }
    if r == old {
        return Err(invalid("replacement equals the original component"));
    }
    let mut comps = t.components().to_vec();
    comps[x.ix()] = r;
    let new = NatTrans::new(t.source(), t.target(), comps).map_err(build)?;
    let mut out = inst.clone();
    match spec.address {
        Address::Conn { host, first, second, .. } => {
            let h = &inst.fibered[host];
            let mut cmp: HashMap<(MorId, MorId), NatTrans> =
                h.pairs().into_iter().map(|(f, g)| ((f, g), h.comparison(f, g).clone())).collect();
            cmp.insert((first, second), new);
            let functors = h.base.cat.morphisms().map(|m| h.try_functor(m).cloned()).collect();
            let nh = FiberedCat::new(&h.name, h.base.clone(), h.variance, h.scope, h.fibers().to_vec(), functors, cmp).map_err(build)?;
            replace_host(&mut out, host, Arc::new(nh))?;
        }
        Address::Theta { morphism, form, f, .. } => {
            thetas_mut(&mut out.morphisms[morphism], form).expect("checked by cell_at")[f.ix()] = Some(new);
        }
        Address::M { ets, form, f1, f2, .. } => {
            pairs_mut(&mut out.ets[ets], form).expect("checked by cell_at").insert((f1, f2), new);
        }
        Address::Assoc { ets, objects, .. } => {
            out.ets[ets].assoc.as_mut().expect("checked by cell_at").insert(objects, new);
        }
        Address::Comm { ets, objects, .. } => {
            out.ets[ets].comm.as_mut().expect("checked by cell_at").insert(objects, new);
        }
        Address::Rho { mor_ets, form, objects, .. } => {
            rho_mut(&mut out.mor_ets[mor_ets], form).expect("checked by cell_at").insert(objects, new);
        }
        Address::Unit { adjunction, f, .. } | Address::Counit { adjunction, f, .. } => {
            let fam = &inst.adjunctions[adjunction];
            let mut entries: BTreeMap<MorId, Adjunction> = fam.entries().map(|(g, adj)| (g, adj.clone())).collect();
            let e = entries.get_mut(&f).expect("checked by cell_at");
            if matches!(spec.address, Address::Unit { .. }) {
                e.unit = new;
            } else {
                e.counit = new;
            }
            out.adjunctions[adjunction] = AdjointAssignment::new(fam.host.clone(), fam.side, fam.marked, entries).map_err(build)?;
        }
    }
    out.name = format!("{}~{}", inst.name, describe(inst, &spec.address));
    Ok(out)
}

/// Every cell of the instance, with object 0 as a placeholder.
pub fn cell_addresses(inst: &Instance) -> Vec<Address> {
    let o = ObjId(0);
    let mut out = Vec::new();
    for (host, h) in inst.fibered.iter().enumerate() {
        let mut pairs = h.pairs();
        pairs.sort();
        out.extend(pairs.into_iter().map(|(first, second)| Address::Conn { host, first, second, object: o }));
    }
    for (i, m) in inst.morphisms.iter().enumerate() {
        for form in [CellForm::Full, CellForm::Smooth, CellForm::Closed, CellForm::ClosedBar] {
            if let Some(th) = thetas_ref(m, form) {
                for (f, t) in th.iter().enumerate() {
                    if t.is_some() {
                        out.push(Address::Theta { morphism: i, form, f: MorId(f as u32), object: o });
                    }
                }
            }
        }
    }
    for (i, e) in inst.ets.iter().enumerate() {
        for form in [CellForm::Full, CellForm::Smooth, CellForm::Closed, CellForm::ClosedBar] {
            if let Some(cells) = pairs_ref(e, form) {
                let keys: BTreeSet<_> = cells.keys().copied().collect();
                out.extend(keys.into_iter().map(|(f1, f2)| Address::M { ets: i, form, f1, f2, object: o }));
            }
        }
        if let Some(a) = &e.assoc {
            let keys: BTreeSet<_> = a.keys().copied().collect();
            out.extend(keys.into_iter().map(|objects| Address::Assoc { ets: i, objects, object: o }));
        }
        if let Some(c) = &e.comm {
            let keys: BTreeSet<_> = c.keys().copied().collect();
            out.extend(keys.into_iter().map(|objects| Address::Comm { ets: i, objects, object: o }));
        }
    }
    for (i, r) in inst.mor_ets.iter().enumerate() {
        for form in [CellForm::Full, CellForm::Smooth, CellForm::Closed] {
            if let Some(cells) = rho_ref(r, form) {
                let keys: BTreeSet<_> = cells.keys().copied().collect();
                out.extend(keys.into_iter().map(|objects| Address::Rho { mor_ets: i, form, objects, object: o }));
            }
        }
    }
    for (i, a) in inst.adjunctions.iter().enumerate() {
        for (f, _) in a.entries() {
            out.push(Address::Unit { adjunction: i, f, object: o });
            out.push(Address::Counit { adjunction: i, f, object: o });
        }
    }
    out
}

fn with_object(a: Address, x: ObjId) -> Address {
    let mut a = a;
    match &mut a {
        Address::Conn { object, .. }
        | Address::Theta { object, .. }
        | Address::M { object, .. }
        | Address::Assoc { object, .. }
        | Address::Comm { object, .. }
        | Address::Rho { object, .. }
        | Address::Unit { object, .. }
        | Address::Counit { object, .. } => *object = x,
    }
    a
}

/// All single-component replacements that keep the cell natural, so the
/// mutated instance still loads.
pub fn candidate_mutations(inst: &Instance) -> Vec<MutationSpec> {
    let mut out = Vec::new();
    for a in cell_addresses(inst) {
        let Ok(t) = cell_at(inst, &a) else { continue };
        let d = t.codomain();
        for x in t.domain().objects() {
            let old = t.at(x);
            for r in d.hom(d.dom(old), d.cod(old)) {
                if r == old {
                    continue;
                }
                let mut comps = t.components().to_vec();
                comps[x.ix()] = r;
                let natural = NatTrans::new(t.source(), t.target(), comps).map(|n| validate_nat_trans(&n).passed()).unwrap_or(false);
                if natural {
                    out.push(MutationSpec { address: with_object(a, x), replacement: r });
                }
            }
        }
    }
    out
}

fn form_scope(form: CellForm) -> Scope {
    match form {
        CellForm::Full => Scope::All,
        CellForm::Smooth => Scope::Smooth,
        CellForm::Closed | CellForm::ClosedBar => Scope::Closed,
    }
}

/// Some non-identity morphism of the scope composes with `f` on either side.
fn has_neighbor(b: &BaseCat, scope: Scope, f: MorId) -> bool {
    b.scoped(scope).any(|g| !b.is_id(g) && (b.dom(g) == b.cod(f) || b.cod(g) == b.dom(f)))
}

/// Whether a single transition of the given form occurs in some checked
/// equation of its suite where it cannot cancel.
fn transition_coverable(b: &BaseCat, form: CellForm, f: MorId) -> bool {
    if b.is_id(f) || has_neighbor(b, form_scope(form), f) {
        return true;
    }
    match form {
        CellForm::Full => false,
        CellForm::Smooth => b.mixed_squares().iter().any(|s| (s.left == f || s.right == f) && !b.is_id(s.top)),
        CellForm::Closed => b.mixed_squares().iter().any(|s| (s.top == f || s.bottom == f) && !b.is_id(s.left)),
        CellForm::ClosedBar => {
            b.cartesian_mixed_squares().iter().any(|s| (s.top == f || s.bottom == f) && !b.is_id(s.left))
                || b.triangles().iter().any(|s| s.top == f)
        }
    }
}

/// A product functor injective on morphisms once either variable is fixed to an identity.
fn separately_faithful(f: &Functor) -> bool {
    let c = f.source();
    let Some([c1, c2]) = c.factors() else { return faithful(f) };
    let injective = |ms: Vec<MorId>| {
        let imgs: BTreeSet<MorId> = ms.iter().map(|&m| f.mor(m)).collect();
        imgs.len() == ms.len()
    };
    c2.objects().all(|y| injective(c1.morphisms().map(|m| c.join_mor(&[m, c2.id(y)])).collect()))
        && c1.objects().all(|x| injective(c2.morphisms().map(|m| c.join_mor(&[c1.id(x), m])).collect()))
}

/// `θ_f` enters the ρ-hexagon for the pair `(f, id_x)` once when `f × id_x ≠ f`.
fn theta_in_hexagon(inst: &Instance, morphism: usize, f: MorId) -> bool {
    let b = &inst.base;
    b.has_products()
        && b.cat.objects().any(|x| b.times(f, b.id(x)) != f)
        && inst.mor_ets.iter().any(|r| {
            let e = &inst.ets[r.target_ets];
            r.morphism == morphism
                && b.cat.objects().all(|x| b.cat.objects().all(|y| separately_faithful(e.boxes.at(x, y))))
        })
}

fn faithful(f: &Functor) -> bool {
    let t = f.mor_table();
    let set: BTreeSet<_> = t.iter().collect();
    set.len() == t.len()
}

/// Structural prediction of whether the suites can see a mutation at this
/// address. It depends only on the base, the scopes and which forms are
/// present, never on the suites' verdicts.
pub fn coverable(inst: &Instance, a: &Address) -> bool {
    let b = &inst.base;
    let touches = |xs: &[ObjId]| b.cat.morphisms().any(|g| !b.is_id(g) && xs.iter().any(|&x| b.dom(g) == x || b.cod(g) == x));
    match *a {
        Address::Conn { host, first, second, .. } => {
            if b.is_id(first) || b.is_id(second) {
                return true;
            }
            let h = &inst.fibered[host];
            let cocycle = h.triples().iter().any(|&(f, g, k)| {
                ((f, g) == (first, second) && !b.is_id(k)) || ((g, k) == (first, second) && !b.is_id(f))
            });
            let seen_by_morphism = inst.morphisms.iter().any(|m| {
                let forms = [(CellForm::Full, &m.theta), (CellForm::Smooth, &m.theta_sm), (CellForm::Closed, &m.theta_cl)];
                forms.iter().any(|(form, th)| {
                    let sc = form_scope(*form);
                    th.is_some()
                        && b.in_scope(first, sc)
                        && b.in_scope(second, sc)
                        && (m.target == host || (m.source == host && m.family.iter().all(faithful)))
                })
            });
            cocycle || seen_by_morphism
        }
        Address::Theta { morphism, form, f, .. } => transition_coverable(b, form, f) || theta_in_hexagon(inst, morphism, f),
        Address::M { ets, form, f1, f2, .. } => {
            // (f1, f2) = (id, f2) ∘ (f1, id) when both are non-identities
            (b.is_id(f1) == b.is_id(f2))
                || [f1, f2].iter().any(|&f| has_neighbor(b, form_scope(form), f) || (!b.is_id(f) && transition_coverable(b, form, f)))
                || inst.mor_ets.iter().any(|r| {
                    (r.target_ets == ets) != (r.source_ets == ets)
                        && (r.target_ets == ets || inst.morphisms[r.morphism].family.iter().all(faithful))
                })
        }
        Address::Assoc { objects: (x, y, z), .. } => touches(&[x, y, z]),
        Address::Comm { objects: (x, y), .. } => touches(&[x, y]),
        Address::Rho { form, objects: (x, y), .. } => form != CellForm::Full || touches(&[x, y]),
        Address::Unit { .. } | Address::Counit { .. } => true,
    }
}

#[derive(Clone, Debug)]
pub struct Mutant {
    pub source: usize,
    pub spec: MutationSpec,
    pub family: String,
    pub label: String,
    pub coverable: bool,
}

#[derive(Clone, Debug)]
pub struct Battery {
    pub sources: Vec<Instance>,
    pub mutants: Vec<Mutant>,
}

impl Battery {
    pub fn instance(&self, m: &Mutant) -> Result<Instance, GenError> {
        mutate_instance(&self.sources[m.source], &m.spec)
    }

    /// Mutants the coverage rules predict no suite can see.
    pub fn uncoverable(&self) -> Vec<&Mutant> {
        self.mutants.iter().filter(|m| !m.coverable).collect()
    }
}

/// Twisted valid instances in every form, over bases with both kinds of
/// morphisms, plus one with a transition that nothing constrains.
pub fn battery_sources(seed: u64) -> Result<Vec<Instance>, GenError> {
    let mut out = Vec::new();
    let mut r = rng(seed);
    for (l, mk, bp) in [
        (Lattice::Chain(3), Marking::Split, Blueprint::Bz3),
        (Lattice::Powerset(2), Marking::All, Blueprint::Bz2),
    ] {
        let strict = strict_presheaf_instance(blueprint_base(l, mk, bp), bp)?;
        let spec = random_twist(&strict, rand::Rng::gen(&mut r));
        let full = twist_instance(&strict, &spec)?;
        for form in [Form::Full, Form::Skeleton, Form::Core] {
            out.push(with_form(&full, form)?);
        }
    }
    let lone = strict_presheaf_instance(blueprint_base(Lattice::Chain(2), Marking::All, Blueprint::Bz3), Blueprint::Bz3)?;
    let spec = random_twist(&lone, rand::Rng::gen(&mut r));
    out.push(with_form(&twist_instance(&lone, &spec)?, Form::Full)?);
    Ok(out)
}

/// At least `count` mutants (when that many exist), drawn round-robin over
/// cell families so every family is represented.
pub fn mutation_battery(seed: u64, count: usize) -> Result<Battery, GenError> {
    let sources = battery_sources(seed)?;
    let mut r = rng(seed ^ 0x6d75_7461_6e74);
    let mut by_family: BTreeMap<String, Vec<Mutant>> = BTreeMap::new();
    for (i, inst) in sources.iter().enumerate() {
        for spec in candidate_mutations(inst) {
            let family = spec.address.family();
            let label = format!("{}:{}:={}", inst.name, describe(inst, &spec.address), {
                let t = cell_at(inst, &spec.address)?;
                t.codomain().mor_name(spec.replacement)
            });
            let coverable = coverable(inst, &spec.address);
            by_family.entry(family.clone()).or_default().push(Mutant { source: i, spec, family, label, coverable });
        }
    }
    for v in by_family.values_mut() {
        v.shuffle(&mut r);
    }
    let mut queues: Vec<std::vec::IntoIter<Mutant>> = by_family.into_values().map(|v| v.into_iter()).collect();
    let mut mutants = Vec::new();
    while mutants.len() < count {
        let before = mutants.len();
        for q in &mut queues {
            if let Some(m) = q.next() {
                mutants.push(m);
            }
        }
        if mutants.len() == before {
            break;
        }
    }
    Ok(Battery { sources, mutants })
}

// ---------------------------------------------------------------------------
// Corpus

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub lattice: Lattice,
    pub marking: Marking,
    pub blueprint: Blueprint,
    pub instance: Instance,
    /// For twisted entries: the strict instance, the twist and its predicted tables.
    pub twist: Option<(Instance, TwistSpec, Oracle)>,
}

pub fn strict_entry(l: Lattice, mk: Marking, bp: Blueprint) -> Result<CorpusEntry, GenError> {
    let mut instance = strict_presheaf_instance(blueprint_base(l, mk, bp), bp)?;
    instance.name = format!("strict-{}-{}-{}", bp.name(), l.name(), mk.name());
    Ok(CorpusEntry { lattice: l, marking: mk, blueprint: bp, instance, twist: None })
}

pub fn twisted_entry(l: Lattice, mk: Marking, bp: Blueprint, seed: u64) -> Result<CorpusEntry, GenError> {
    let strict = strict_entry(l, mk, bp)?.instance;
    let spec = random_twist(&strict, seed);
    let instance = twist_instance(&strict, &spec)?;
    let oracle = twist_oracle(&strict, &instance, bp, &spec)?;
    Ok(CorpusEntry { lattice: l, marking: mk, blueprint: bp, instance, twist: Some((strict, spec, oracle)) })
}

/// Valid instances across bases, markings and blueprints; every twist seed is
/// drawn from `seed`.
pub fn positive_corpus(seed: u64) -> Result<Vec<CorpusEntry>, GenError> {
    use Blueprint::*;
    let (c2, c3, p2) = (Lattice::Chain(2), Lattice::Chain(3), Lattice::Powerset(2));
    let strict: &[(Lattice, Marking, &[Blueprint])] = &[
        (c2, Marking::All, &[Bz2, Bz3, S3, Monoid, Poset2, Cs2, Cs3]),
        (c2, Marking::SmoothOnly, &[Cs3]),
        (c3, Marking::Split, &[Bz2, Bz3, S3, Monoid, Poset3]),
        (c3, Marking::ClosedOnly, &[Bz3, Poset2]),
        (p2, Marking::All, &[Bz2, Bz3, S3, Monoid, Poset2, Cs2]),
        (p2, Marking::Split, &[Bz2, Bz3, S3, Monoid, Poset2]),
        (p2, Marking::SmoothOnly, &[Cs2]),
    ];
    let mut out = Vec::new();
    for (l, mk, bps) in strict {
        for &bp in *bps {
            out.push(strict_entry(*l, *mk, bp)?);
        }
    }
    let mut r = rng(seed);
    let twisted = [
        (c2, Marking::All),
        (c3, Marking::Split),
        (p2, Marking::Split),
        (p2, Marking::All),
    ];
    for bp in [Bz2, Bz3, S3] {
        for (l, mk) in twisted {
            out.push(twisted_entry(l, mk, bp, rand::Rng::gen(&mut r))?);
        }
    }
    for _ in 0..2 {
        out.push(twisted_entry(p2, Marking::Split, Bz3, rand::Rng::gen(&mut r))?);
    }
    Ok(out)
}
