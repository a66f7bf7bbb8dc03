//! Pseudofunctors from a marked part of the base into finite categories, and
//! morphisms between them.
//!
//! One type covers both variances. With [`Variance::Inverse`] the functor of
//! `f: T → S` goes `H(S) → H(T)` (an inverse image); with [`Variance::Direct`]
//! it goes `H(T) → H(S)` (a direct image `f_#` or `f_*`). Internally every
//! composable pair is written in application order `(first, second)`, and the
//! comparison cell is `F_c ⇒ F_second ∘ F_first` with `c` the base composite.
//! Every axiom below is stated once in that form.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::base::{BaseCat, Scope};
use crate::diagram;
use crate::fincat::{functor_laws, Cell, FinCat, FincatError, Functor, MorId, NatTrans, ObjId};
use crate::report::{Report, Section, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    Inverse,
    Direct,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FiberedError {
    #[error("no functor for base morphism {0}")]
    MissingFunctor(String),
    #[error("functor for {morphism} has the wrong boundary: {detail}")]
    FunctorBoundary { morphism: String, detail: String },
    #[error("no comparison for the pair ({first}, {second}) and the identity does not type-check")]
    MissingComparison { first: String, second: String },
    #[error("{0} lies outside the marked scope")]
    OutOfScope(String),
    #[error("family functor at {0} has the wrong boundary")]
    FamilyBoundary(String),
    #[error("transition for {0} missing")]
    MissingTransition(String),
    #[error("fibered categories do not share a base, scope and variance")]
    Incompatible,
    #[error(transparent)]
    Fincat(#[from] FincatError),
}

/// `H` with its functors and comparison isomorphisms.
#[derive(Clone)]
pub struct FiberedCat {
    pub name: String,
    pub base: Arc<BaseCat>,
    pub variance: Variance,
    pub scope: Scope,
    fibers: Vec<FinCat>,
    functors: Vec<Option<Functor>>,
    /// Keyed by `(first, second)` in application order.
    comparisons: HashMap<(MorId, MorId), NatTrans>,
}

impl std::fmt::Debug for FiberedCat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FiberedCat({}, {:?} over {} morphisms)", self.name, self.variance, self.scope.name())
    }
}

impl FiberedCat {
    /// Builds the structure; missing comparisons default to identities where they type-check.
    pub fn new(
        name: &str,
        base: Arc<BaseCat>,
        variance: Variance,
        scope: Scope,
        fibers: Vec<FinCat>,
        functors: Vec<Option<Functor>>,
        mut comparisons: HashMap<(MorId, MorId), NatTrans>,
    ) -> Result<FiberedCat, FiberedError> {
        let mut h = FiberedCat {
            name: name.to_string(),
            base,
            variance,
            scope,
            fibers,
            functors: Vec::new(),
            comparisons: HashMap::new(),
        };
        let mut fs = functors;
        fs.resize(h.base.cat.n_morphisms(), None);
        for m in h.base.cat.morphisms() {
            if !h.base.in_scope(m, scope) {
                fs[m.ix()] = None;
                continue;
            }
            let f = fs[m.ix()].as_ref().ok_or_else(|| FiberedError::MissingFunctor(h.base.name(m)))?;
            let (s, t) = (&h.fibers[h.src(m).ix()], &h.fibers[h.tgt(m).ix()]);
            if !f.source().same(s) || !f.target().same(t) {
                return Err(FiberedError::FunctorBoundary {
                    morphism: h.base.name(m),
                    detail: format!("{} -> {}, expected {} -> {}", f.source().name(), f.target().name(), s.name(), t.name()),
                });
            }
        }
        h.functors = fs;
        for (first, second) in h.pairs() {
            let c = h.composite(first, second);
            let want_src = h.functor(c).clone();
            let want_tgt = Functor::compose(h.functor(second), h.functor(first));
            match comparisons.remove(&(first, second)) {
                Some(t) => {
                    if !t.source().same(&want_src) || !t.target().same(&want_tgt) {
                        return Err(FiberedError::Fincat(FincatError::BoundaryMismatch(format!(
                            "comparison for ({}, {})",
                            h.base.name(first),
                            h.base.name(second)
                        ))));
                    }
                    h.comparisons.insert((first, second), t);
                }
                None => {
                    if !want_src.same(&want_tgt) {
                        return Err(FiberedError::MissingComparison {
                            first: h.base.name(first),
                            second: h.base.name(second),
                        });
                    }
                    h.comparisons.insert((first, second), NatTrans::identity(&want_src));
                }
            }
        }
        Ok(h)
    }

    pub fn fiber(&self, x: ObjId) -> &FinCat {
        &self.fibers[x.ix()]
    }

    pub fn fibers(&self) -> &[FinCat] {
        &self.fibers
    }

    /// Base object whose fiber the functor of `m` starts from.
    pub fn src(&self, m: MorId) -> ObjId {
        match self.variance {
            Variance::Inverse => self.base.cod(m),
            Variance::Direct => self.base.dom(m),
        }
    }

    pub fn tgt(&self, m: MorId) -> ObjId {
        match self.variance {
            Variance::Inverse => self.base.dom(m),
            Variance::Direct => self.base.cod(m),
        }
    }

    pub fn in_scope(&self, m: MorId) -> bool {
        self.base.in_scope(m, self.scope)
    }

    pub fn scoped(&self) -> Vec<MorId> {
        self.base.scoped(self.scope).collect()
    }

    pub fn functor(&self, m: MorId) -> &Functor {
        match &self.functors[m.ix()] {
            Some(f) => f,
            None => panic!("{}: {} is outside the marked scope", self.name, self.base.name(m)),
        }
    }

    pub fn try_functor(&self, m: MorId) -> Option<&Functor> {
        self.functors.get(m.ix())?.as_ref()
    }

    /// Whether the functor of `first` can be followed by that of `second`.
    pub fn chains(&self, first: MorId, second: MorId) -> bool {
        self.tgt(first) == self.src(second)
    }

    /// Base morphism whose functor is compared with `F_second ∘ F_first`.
    pub fn composite(&self, first: MorId, second: MorId) -> MorId {
        match self.variance {
            Variance::Inverse => self.base.compose(first, second),
            Variance::Direct => self.base.compose(second, first),
        }
    }

    /// `F_{composite} ⇒ F_second ∘ F_first`.
    pub fn comparison(&self, first: MorId, second: MorId) -> &NatTrans {
        match self.comparisons.get(&(first, second)) {
            Some(t) => t,
            None => panic!(
                "{}: no comparison for ({}, {})",
                self.name,
                self.base.name(first),
                self.base.name(second)
            ),
        }
    }

    pub fn comparison_cell(&self, first: MorId, second: MorId) -> Cell {
        let (a, b) = (self.base.name(first), self.base.name(second));
        let label = match self.variance {
            Variance::Inverse => format!("{}.conn[{b},{a}]", self.name),
            Variance::Direct => format!("{}.connbar[{a},{b}]", self.name),
        };
        Cell::atom(label, self.comparison(first, second))
    }

    /// The comparison in the argument order used for inverse images:
    /// `conn_{f,g}: (g∘f)^* ⇒ f^* g^*`.
    pub fn conn(&self, f: MorId, g: MorId) -> &NatTrans {
        match self.variance {
            Variance::Inverse => self.comparison(g, f),
            Variance::Direct => self.comparison(f, g),
        }
    }

    pub fn conn_cell(&self, f: MorId, g: MorId) -> Cell {
        match self.variance {
            Variance::Inverse => self.comparison_cell(g, f),
            Variance::Direct => self.comparison_cell(f, g),
        }
    }

    /// Chainable pairs `(first, second)` in scope, in a fixed order.
    pub fn pairs(&self) -> Vec<(MorId, MorId)> {
        self.base
            .composable_pairs(self.scope)
            .into_iter()
            .map(|(f, g)| match self.variance {
                Variance::Inverse => (g, f),
                Variance::Direct => (f, g),
            })
            .collect()
    }

    /// Chainable triples in application order.
    pub fn triples(&self) -> Vec<(MorId, MorId, MorId)> {
        self.base
            .composable_triples(self.scope)
            .into_iter()
            .map(|(f, g, h)| match self.variance {
                Variance::Inverse => (h, g, f),
                Variance::Direct => (f, g, h),
            })
            .collect()
    }

    /// Same data over a smaller marked class.
    pub fn restrict(&self, scope: Scope) -> FiberedCat {
        let keep = |m: MorId| self.base.in_scope(m, scope) && self.in_scope(m);
        let functors = self
            .base
            .cat
            .morphisms()
            .map(|m| if keep(m) { self.functors[m.ix()].clone() } else { None })
            .collect();
        let comparisons = self
            .comparisons
            .iter()
            .filter(|((a, b), _)| keep(*a) && keep(*b))
            .map(|(k, v)| (*k, v.clone()))
            .collect();
        FiberedCat {
            name: self.name.clone(),
            base: self.base.clone(),
            variance: self.variance,
            scope: narrower(self.scope, scope),
            fibers: self.fibers.clone(),
            functors,
            comparisons,
        }
    }

    pub fn witness(&self, ms: &[MorId]) -> Vec<String> {
        ms.iter().map(|&m| self.base.name(m)).collect()
    }
}

/// The marked class selected by restricting `a` to `b`; the classes must be nested.
fn narrower(a: Scope, b: Scope) -> Scope {
    match (a, b) {
        (Scope::All, s) | (s, Scope::All) => s,
        (s, t) if s == t => s,
        (s, t) => panic!("cannot restrict a {} structure to {}", s.name(), t.name()),
    }
}

/// Checks strict identities, well-formed comparisons, unit conditions and the cocycle.
pub fn check_fib_axioms(h: &FiberedCat) -> Report {
    let mut r = Report::new(&format!("fibered {}", h.name));

    let mut laws = Section::new("functors", &h.name);
    for m in h.scoped() {
        let s = functor_laws(h.functor(m));
        if !s.passed() {
            let mut v = Violation::new("functor-laws", vec![h.base.name(m)]);
            if let Some(w) = s.violations.first() {
                v = v.with_detail(format!("{} at [{}]", w.law, w.witness.join(", ")));
            }
            laws.fail(v);
        }
        laws.count();
    }
    r.push(laws);

    let mut ident = Section::new("identity-strict", &h.name);
    for x in h.base.cat.objects() {
        let i = h.base.id(x);
        if h.in_scope(i) {
            ident.count();
            if !h.functor(i).is_identity() {
                ident.fail(Violation::new("identity-strict", vec![h.base.oname(x)]));
            }
        }
    }
    r.push(ident);

    let pairs = h.pairs();
    let mut wf = Section::new("comparison-iso", &h.name);
    for &(a, b) in &pairs {
        diagram::wellformed(&mut wf, &format!("({},{})", h.base.name(a), h.base.name(b)), h.comparison(a, b), true);
    }
    r.push(wf);

    let mut unit = Section::new("comparison-unit", &h.name);
    for &(a, b) in &pairs {
        if h.base.is_id(a) || h.base.is_id(b) {
            unit.count();
            if !h.comparison(a, b).is_identity() {
                unit.fail(Violation::new("comparison-unit", h.witness(&[a, b])));
            }
        }
    }
    r.push(unit);

    let mut coc = Section::new("cocycle", &h.name);
    let triples = h.triples();
    diagram::run(&mut coc, &triples, |&(a1, a2, a3)| {
        let x = h.composite(a1, a2);
        let y = h.composite(a2, a3);
        let lhs = [h.comparison_cell(x, a3), h.comparison_cell(a1, a2).left(h.functor(a3))];
        let rhs = [h.comparison_cell(a1, y), h.comparison_cell(a2, a3).right(h.functor(a1))];
        diagram::compare("cocycle", h.witness(&[a1, a2, a3]), &lhs, &rhs)
    });
    r.push(coc);
    r
}

/// Any two conn-paths from `F_{a4 a3 a2 a1}` to `F_{a4}F_{a3}F_{a2}F_{a1}` agree.
pub fn check_coherence(h: &FiberedCat) -> Section {
    let mut s = Section::new("comparison-coherence", &h.name);
    let mut quads = Vec::new();
    for (a1, a2, a3) in h.triples() {
        for a4 in h.scoped() {
            if h.chains(a3, a4) {
                quads.push([a1, a2, a3, a4]);
            }
        }
    }
    diagram::run(&mut s, &quads, |q| {
        let paths = splitting_paths(h, q);
        let first = &paths[0];
        paths[1..].iter().find_map(|p| diagram::compare("coherence", h.witness(q), first, p))
    });
    s
}

/// All ways of splitting a chain off one morphism at a time, as cell paths.
fn splitting_paths(h: &FiberedCat, chain: &[MorId]) -> Vec<Vec<Cell>> {
    if chain.len() == 1 {
        return vec![Vec::new()];
    }
    let total = |xs: &[MorId]| xs[1..].iter().fold(xs[0], |acc, &m| h.composite(acc, m));
    let mut out = Vec::new();
    for k in 1..chain.len() {
        let (lo, hi) = chain.split_at(k);
        let (a, b) = (total(lo), total(hi));
        let head = h.comparison_cell(a, b);
        let fa = Functor::chain(&lo.iter().map(|&m| h.functor(m)).collect::<Vec<_>>());
        for pl in splitting_paths(h, lo) {
            for ph in splitting_paths(h, hi) {
                let mut p = vec![head.clone()];
                p.extend(pl.iter().cloned().map(|c| c.left(h.functor(b))));
                p.extend(ph.iter().cloned().map(|c| c.right(&fa)));
                out.push(p);
            }
        }
    }
    out
}

/// `R` with transition isomorphisms `θ_f: F2_f ∘ R_{src f} ⇒ R_{tgt f} ∘ F1_f`.
#[derive(Clone)]
pub struct FibMorphism {
    pub name: String,
    pub source: Arc<FiberedCat>,
    pub target: Arc<FiberedCat>,
    family: Vec<Functor>,
    theta: Vec<Option<NatTrans>>,
}

impl std::fmt::Debug for FibMorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FibMorphism({}: {} -> {})", self.name, self.source.name, self.target.name)
    }
}

impl FibMorphism {
    /// Builds the morphism; missing transitions default to identities where they type-check.
    pub fn new(
        name: &str,
        source: Arc<FiberedCat>,
        target: Arc<FiberedCat>,
        family: Vec<Functor>,
        theta: Vec<Option<NatTrans>>,
    ) -> Result<FibMorphism, FiberedError> {
        if !source.base.cat.same(&target.base.cat)
            || source.scope != target.scope
            || source.variance != target.variance
        {
            return Err(FiberedError::Incompatible);
        }
        let b = source.base.clone();
        for x in b.cat.objects() {
            let r = family.get(x.ix()).ok_or_else(|| FiberedError::FamilyBoundary(b.oname(x)))?;
            if !r.source().same(source.fiber(x)) || !r.target().same(target.fiber(x)) {
                return Err(FiberedError::FamilyBoundary(b.oname(x)));
            }
        }
        let mut m = FibMorphism { name: name.to_string(), source, target, family, theta: Vec::new() };
        let mut th = theta;
        th.resize(b.cat.n_morphisms(), None);
        for f in b.cat.morphisms() {
            if !m.source.in_scope(f) {
                th[f.ix()] = None;
                continue;
            }
            let (want_src, want_tgt) = m.theta_boundary(f);
            match &th[f.ix()] {
                Some(t) => {
                    if !t.source().same(&want_src) || !t.target().same(&want_tgt) {
                        return Err(FiberedError::Fincat(FincatError::BoundaryMismatch(format!(
                            "transition for {}",
                            b.name(f)
                        ))));
                    }
                }
                None => {
                    if !want_src.same(&want_tgt) {
                        return Err(FiberedError::MissingTransition(b.name(f)));
                    }
                    th[f.ix()] = Some(NatTrans::identity(&want_src));
                }
            }
        }
        m.theta = th;
        Ok(m)
    }

    pub fn base(&self) -> &Arc<BaseCat> {
        &self.source.base
    }

    /// `(F2_f ∘ R_src, R_tgt ∘ F1_f)`.
    pub fn theta_boundary(&self, f: MorId) -> (Functor, Functor) {
        let (s, t) = (self.source.src(f), self.source.tgt(f));
        (
            Functor::compose(self.target.functor(f), &self.family[s.ix()]),
            Functor::compose(&self.family[t.ix()], self.source.functor(f)),
        )
    }

    pub fn r(&self, x: ObjId) -> &Functor {
        &self.family[x.ix()]
    }

    pub fn family(&self) -> &[Functor] {
        &self.family
    }

    pub fn theta(&self, f: MorId) -> &NatTrans {
        match &self.theta[f.ix()] {
            Some(t) => t,
            None => panic!("{}: no transition for {}", self.name, self.base().name(f)),
        }
    }

    pub fn try_theta(&self, f: MorId) -> Option<&NatTrans> {
        self.theta.get(f.ix())?.as_ref()
    }

    pub fn theta_cell(&self, f: MorId) -> Cell {
        Cell::atom(format!("{}.theta[{}]", self.name, self.base().name(f)), self.theta(f))
    }

    pub fn thetas(&self) -> &[Option<NatTrans>] {
        &self.theta
    }

    pub fn restrict(&self, scope: Scope) -> FibMorphism {
        let source = Arc::new(self.source.restrict(scope));
        let target = Arc::new(self.target.restrict(scope));
        let theta = self
            .base()
            .cat
            .morphisms()
            .map(|f| if source.in_scope(f) { self.theta[f.ix()].clone() } else { None })
            .collect();
        FibMorphism { name: self.name.clone(), source, target, family: self.family.clone(), theta }
    }
}

/// Checks the family, well-formedness of every transition and the transition square.
pub fn check_mor_axioms(m: &FibMorphism) -> Report {
    let mut r = Report::new(&format!("morphism {}", m.name));
    let (h1, h2) = (&*m.source, &*m.target);
    let b = m.base();

    let mut fam = Section::new("family", &m.name);
    for x in b.cat.objects() {
        fam.count();
        let s = functor_laws(m.r(x));
        if !s.passed() {
            fam.fail(Violation::new("functor-laws", vec![b.oname(x)]));
        }
    }
    r.push(fam);

    let mut wf = Section::new("transition-iso", &m.name);
    for f in h1.scoped() {
        diagram::wellformed(&mut wf, &b.name(f), m.theta(f), true);
    }
    r.push(wf);

    let mut sq = Section::new("transition-square", &m.name);
    let pairs = h1.pairs();
    diagram::run(&mut sq, &pairs, |&(a1, a2)| {
        let c = h1.composite(a1, a2);
        let lhs = [m.theta_cell(c), h1.comparison_cell(a1, a2).left(m.r(h1.tgt(c)))];
        let rhs = [
            h2.comparison_cell(a1, a2).right(m.r(h1.src(c))),
            m.theta_cell(a1).left(h2.functor(a2)),
            m.theta_cell(a2).right(h1.functor(a1)),
        ];
        diagram::compare("transition-square", h1.witness(&[a1, a2]), &lhs, &rhs)
    });
    let passed = sq.passed();
    r.push(sq);

    // A consequence of the square: θ at an identity is the identity.
    let mut unit = Section::new("transition-unit", &m.name);
    for x in b.cat.objects() {
        let i = b.id(x);
        if h1.in_scope(i) {
            unit.count();
            if !m.theta(i).is_identity() {
                unit.fail(Violation::new("transition-unit", vec![b.oname(x)]));
            }
        }
    }
    if !passed && unit.passed() {
        unit = unit.note("transition square failed; identity check is not implied");
    }
    r.push(unit);
    r
}
