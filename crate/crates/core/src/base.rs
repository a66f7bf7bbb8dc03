//! Base categories with smooth and closed classes, pullbacks, factorization
//! categories, chosen products and open complements.
//!
//! Limits are always found by enumerating cones against the tables; nothing
//! is assumed from how an instance was built.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Mutex, OnceLock};

use thiserror::Error;

use crate::fincat::{FinCat, MorId, ObjId};
use crate::report::{Report, Section, Violation};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BaseError {
    #[error("no pullback of {p} and {f}")]
    NoPullback { p: String, f: String },
    #[error("closed morphism {0} has no open complement")]
    MissingComplement(String),
    #[error("factorization category of {f} is disconnected: {left:?} vs {right:?}")]
    Disconnected { f: String, left: Vec<String>, right: Vec<String> },
    #[error("{0} has no chosen products")]
    NoProducts(String),
    #[error("no morphism {what}")]
    NotFound { what: String },
    #[error("several morphisms {what}")]
    NotUnique { what: String },
}

/// Which marked subcategory a structure lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    All,
    Smooth,
    Closed,
}

impl Scope {
    pub fn name(self) -> &'static str {
        match self {
            Scope::All => "all",
            Scope::Smooth => "smooth",
            Scope::Closed => "closed",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChosenProduct {
    pub obj: ObjId,
    pub p1: MorId,
    pub p2: MorId,
}

/// A commutative square `right ∘ top = bottom ∘ left`:
///
/// ```text
///   Q --top--> P
///   |          |
///  left      right
///   v          v
///   Z --bottom--> S
/// ```
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Square {
    pub top: MorId,
    pub left: MorId,
    pub right: MorId,
    pub bottom: MorId,
}

/// A cone `(apex, a, b)` over a cospan `(p, f)`: `p ∘ a = f ∘ b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cone {
    pub apex: ObjId,
    pub over_f: MorId,
    pub over_p: MorId,
}

pub struct BaseCat {
    pub cat: FinCat,
    smooth: Vec<bool>,
    closed: Vec<bool>,
    pub initial: Option<ObjId>,
    products: Option<HashMap<(ObjId, ObjId), ChosenProduct>>,
    complements: Option<BTreeMap<MorId, MorId>>,
    universal: Mutex<HashMap<(MorId, MorId), Vec<Cone>>>,
    product_morphisms: OnceLock<HashMap<(MorId, MorId), Result<MorId, BaseError>>>,
}

impl std::fmt::Debug for BaseCat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BaseCat({:?})", self.cat)
    }
}

impl BaseCat {
    pub fn new(
        cat: FinCat,
        smooth: &[MorId],
        closed: &[MorId],
        initial: Option<ObjId>,
        products: Option<Vec<((ObjId, ObjId), ChosenProduct)>>,
        complements: Option<Vec<(MorId, MorId)>>,
    ) -> BaseCat {
        let n = cat.n_morphisms();
        let mut sm = vec![false; n];
        let mut cl = vec![false; n];
        for m in smooth {
            sm[m.ix()] = true;
        }
        for m in closed {
            cl[m.ix()] = true;
        }
        BaseCat {
            cat,
            smooth: sm,
            closed: cl,
            initial,
            products: products.map(|v| v.into_iter().collect()),
            complements: complements.map(|v| v.into_iter().collect()),
            universal: Mutex::new(HashMap::new()),
            product_morphisms: OnceLock::new(),
        }
    }

    pub fn is_smooth(&self, m: MorId) -> bool {
        self.smooth[m.ix()]
    }

    pub fn is_closed(&self, m: MorId) -> bool {
        self.closed[m.ix()]
    }

    pub fn in_scope(&self, m: MorId, s: Scope) -> bool {
        match s {
            Scope::All => true,
            Scope::Smooth => self.is_smooth(m),
            Scope::Closed => self.is_closed(m),
        }
    }

    pub fn scoped(&self, s: Scope) -> impl Iterator<Item = MorId> + '_ {
        self.cat.morphisms().filter(move |&m| self.in_scope(m, s))
    }

    pub fn name(&self, m: MorId) -> String {
        self.cat.mor_name(m)
    }

    pub fn oname(&self, x: ObjId) -> String {
        self.cat.obj_name(x)
    }

    pub fn dom(&self, m: MorId) -> ObjId {
        self.cat.dom(m)
    }

    pub fn cod(&self, m: MorId) -> ObjId {
        self.cat.cod(m)
    }

    pub fn compose(&self, g: MorId, f: MorId) -> MorId {
        self.cat.compose(g, f)
    }

    pub fn id(&self, x: ObjId) -> MorId {
        self.cat.id(x)
    }

    pub fn is_id(&self, m: MorId) -> bool {
        self.cat.is_identity(m)
    }

    pub fn has_products(&self) -> bool {
        self.products.is_some()
    }

    pub fn complements(&self) -> Option<&BTreeMap<MorId, MorId>> {
        self.complements.as_ref()
    }

    /// Composable pairs `(f, g)` with `g ∘ f` defined, both in scope.
    pub fn composable_pairs(&self, s: Scope) -> Vec<(MorId, MorId)> {
        let mut out = Vec::new();
        for f in self.scoped(s) {
            for g in self.scoped(s).filter(|&g| self.dom(g) == self.cod(f)) {
                out.push((f, g));
            }
        }
        out
    }

    /// Composable triples `(f, g, h)` in scope.
    pub fn composable_triples(&self, s: Scope) -> Vec<(MorId, MorId, MorId)> {
        let mut out = Vec::new();
        for (f, g) in self.composable_pairs(s) {
            for h in self.scoped(s).filter(|&h| self.dom(h) == self.cod(g)) {
                out.push((f, g, h));
            }
        }
        out
    }

    /// Every cone over `(p, f)`, ordered by apex then legs.
    pub fn cones(&self, p: MorId, f: MorId) -> Vec<Cone> {
        let c = &self.cat;
        let mut out = Vec::new();
        for x in c.objects() {
            for a in c.hom(x, c.dom(p)) {
                for b in c.hom(x, c.dom(f)) {
                    if c.compose(p, a) == c.compose(f, b) {
                        out.push(Cone { apex: x, over_f: a, over_p: b });
                    }
                }
            }
        }
        out
    }

    fn is_universal(&self, k: &Cone, all: &[Cone]) -> bool {
        let c = &self.cat;
        all.iter().all(|o| {
            c.hom(o.apex, k.apex)
                .into_iter()
                .filter(|&u| c.compose(k.over_f, u) == o.over_f && c.compose(k.over_p, u) == o.over_p)
                .count()
                == 1
        })
    }

    /// All limit cones over `(p, f)`.
    pub fn universal_cones(&self, p: MorId, f: MorId) -> Vec<Cone> {
        if let Some(v) = self.universal.lock().expect("cone cache").get(&(p, f)) {
            return v.clone();
        }
        let all = self.cones(p, f);
        let v: Vec<Cone> = all.iter().copied().filter(|k| self.is_universal(k, &all)).collect();
        self.universal.lock().expect("cone cache").insert((p, f), v.clone());
        v
    }

    pub fn is_cartesian(&self, sq: &Square) -> bool {
        let k = Cone { apex: self.dom(sq.top), over_f: sq.top, over_p: sq.left };
        self.universal_cones(sq.right, sq.bottom).contains(&k)
    }

    pub fn commutes(&self, sq: &Square) -> bool {
        let c = &self.cat;
        c.dom(sq.top) == c.dom(sq.left)
            && c.cod(sq.top) == c.dom(sq.right)
            && c.cod(sq.left) == c.dom(sq.bottom)
            && c.cod(sq.right) == c.cod(sq.bottom)
            && c.compose(sq.right, sq.top) == c.compose(sq.bottom, sq.left)
    }

    /// Commutative squares with `top, bottom` closed and `left, right` smooth.
    pub fn mixed_squares(&self) -> Vec<Square> {
        let c = &self.cat;
        let mut out = Vec::new();
        for right in self.scoped(Scope::Smooth) {
            for bottom in self.scoped(Scope::Closed).filter(|&z| c.cod(z) == c.cod(right)) {
                for top in self.scoped(Scope::Closed).filter(|&h| c.cod(h) == c.dom(right)) {
                    for left in self
                        .scoped(Scope::Smooth)
                        .filter(|&q| c.cod(q) == c.dom(bottom) && c.dom(q) == c.dom(top))
                    {
                        let sq = Square { top, left, right, bottom };
                        if self.commutes(&sq) {
                            out.push(sq);
                        }
                    }
                }
            }
        }
        out
    }

    /// Cartesian mixed squares: a closed `bottom` pulled back along a smooth `right`.
    pub fn cartesian_mixed_squares(&self) -> Vec<Square> {
        self.mixed_squares().into_iter().filter(|s| self.is_cartesian(s)).collect()
    }

    /// Triangles `right ∘ top = left` as squares with identity bottom.
    pub fn triangles(&self) -> Vec<Square> {
        self.mixed_squares()
            .into_iter()
            .filter(|s| self.is_id(s.bottom))
            .collect()
    }

    pub fn product(&self, a: ObjId, b: ObjId) -> Option<ChosenProduct> {
        self.products.as_ref()?.get(&(a, b)).copied()
    }

    pub fn product_obj(&self, a: ObjId, b: ObjId) -> ObjId {
        self.product(a, b).expect("chosen product present").obj
    }

    /// `f1 × f2` from the precomputed table.
    pub fn times(&self, f1: MorId, f2: MorId) -> MorId {
        match self.product_table().get(&(f1, f2)) {
            Some(Ok(m)) => *m,
            Some(Err(e)) => panic!("{e}"),
            None => panic!("no product data for {} x {}", self.name(f1), self.name(f2)),
        }
    }

    fn product_table(&self) -> &HashMap<(MorId, MorId), Result<MorId, BaseError>> {
        self.product_morphisms.get_or_init(|| {
            let mut t = HashMap::new();
            if self.products.is_some() {
                for f1 in self.cat.morphisms() {
                    for f2 in self.cat.morphisms() {
                        t.insert((f1, f2), product_of_morphisms(self, f1, f2));
                    }
                }
            }
            t
        })
    }

    /// The symmetry `S1 × S2 → S2 × S1`.
    pub fn tau(&self, s1: ObjId, s2: ObjId) -> Result<MorId, BaseError> {
        let a = self.product(s1, s2).ok_or_else(|| BaseError::NoProducts(self.cat.name().into()))?;
        let b = self.product(s2, s1).ok_or_else(|| BaseError::NoProducts(self.cat.name().into()))?;
        self.unique_into(a.obj, b, a.p2, a.p1, || {
            format!("tau({},{})", self.oname(s1), self.oname(s2))
        })
    }

    fn unique_into(
        &self,
        x: ObjId,
        target: ChosenProduct,
        leg1: MorId,
        leg2: MorId,
        what: impl Fn() -> String,
    ) -> Result<MorId, BaseError> {
        let c = &self.cat;
        let found: Vec<MorId> = c
            .hom(x, target.obj)
            .into_iter()
            .filter(|&u| c.compose(target.p1, u) == leg1 && c.compose(target.p2, u) == leg2)
            .collect();
        match found.len() {
            1 => Ok(found[0]),
            0 => Err(BaseError::NotFound { what: what() }),
            _ => Err(BaseError::NotUnique { what: what() }),
        }
    }
}

/// A pullback of `(p, f)` with the lowest-id tie-break: `(apex, leg over f, leg over p)`.
pub fn pullback(b: &BaseCat, p: MorId, f: MorId) -> Result<(ObjId, MorId, MorId), BaseError> {
    let err = || BaseError::NoPullback { p: b.name(p), f: b.name(f) };
    if b.cod(p) != b.cod(f) {
        return Err(err());
    }
    b.universal_cones(p, f)
        .first()
        .map(|k| (k.apex, k.over_f, k.over_p))
        .ok_or_else(err)
}

/// Closure, base change and factorization for the smooth and closed classes.
pub fn check_hyp_skel(b: &BaseCat) -> Report {
    let c = &b.cat;
    let mut r = Report::new("base-skeleton");
    let mut s1 = Section::new("classes-closed", c.name());
    for (class, scope) in [("smooth", Scope::Smooth), ("closed", Scope::Closed)] {
        for x in c.objects() {
            s1.count();
            if !b.in_scope(c.id(x), scope) {
                s1.fail(Violation::new(&format!("{class}-identity"), vec![b.oname(x)]));
            }
        }
        for (f, g) in b.composable_pairs(scope) {
            s1.count();
            if !b.in_scope(c.compose(g, f), scope) {
                s1.fail(Violation::new(&format!("{class}-composition"), vec![b.name(g), b.name(f)]));
            }
        }
        for m in c.morphisms().filter(|&m| c.is_iso(m)) {
            s1.count();
            if !b.in_scope(m, scope) {
                s1.fail(Violation::new(&format!("{class}-isomorphism"), vec![b.name(m)]));
            }
        }
    }
    r.push(s1);

    let mut s2 = Section::new("smooth-base-change", c.name());
    for p in b.scoped(Scope::Smooth) {
        for f in c.morphisms().filter(|&f| c.cod(f) == c.cod(p)) {
            s2.count();
            let cones = b.universal_cones(p, f);
            if cones.is_empty() {
                s2.fail(Violation::new("pullback-exists", vec![b.name(p), b.name(f)]));
            }
            for k in cones {
                if !b.is_smooth(k.over_p) {
                    s2.fail(Violation::new("smooth-base-change", vec![b.name(p), b.name(f), b.name(k.over_p)]));
                }
            }
        }
    }
    r.push(s2);

    let mut s3 = Section::new("closed-base-change", c.name());
    for p in b.scoped(Scope::Smooth) {
        for z in b.scoped(Scope::Closed).filter(|&z| c.cod(z) == c.cod(p)) {
            s3.count();
            for k in b.universal_cones(p, z) {
                if !b.is_closed(k.over_f) {
                    s3.fail(Violation::new("closed-base-change", vec![b.name(p), b.name(z), b.name(k.over_f)]));
                }
            }
        }
    }
    for (z, g) in b.composable_pairs(Scope::All) {
        s3.count();
        if b.is_closed(c.compose(g, z)) && !b.is_closed(z) {
            s3.fail(Violation::new("closed-cancellation", vec![b.name(g), b.name(z)]));
        }
    }
    r.push(s3);

    let mut s4 = Section::new("factorizations-exist", c.name());
    for f in c.morphisms() {
        s4.count();
        if fact_category(b, f).objects.is_empty() {
            s4.fail(Violation::new("factorization", vec![b.name(f)]));
        }
    }
    r.push(s4);
    r
}

/// Initial object and open complements.
pub fn check_hyp_core(b: &BaseCat) -> Result<Report, BaseError> {
    let c = &b.cat;
    let mut r = Report::new("base-core");
    let mut si = Section::new("initial-object", c.name());
    let Some(e) = b.initial else {
        si.fail(Violation::new("initial-object", vec![]).with_detail("no initial object declared"));
        r.push(si);
        return Ok(r);
    };
    for x in c.objects() {
        si.count();
        if c.hom(e, x).len() != 1 {
            si.fail(Violation::new("initial-object", vec![b.oname(e), b.oname(x)]));
        }
    }
    let initial_ok = si.passed();
    r.push(si);
    let mut sc = Section::new("open-complements", c.name());
    if !initial_ok {
        r.push(Section::skipped("open-complements", c.name(), "initial object invalid"));
        return Ok(r);
    }
    let empty = BTreeMap::new();
    let comps = b.complements().unwrap_or(&empty);
    for z in b.scoped(Scope::Closed) {
        let Some(&u) = comps.get(&z) else {
            return Err(BaseError::MissingComplement(b.name(z)));
        };
        let s = c.cod(z);
        if !b.is_smooth(u) || c.cod(u) != s {
            sc.fail(Violation::new("complement-smooth", vec![b.name(z), b.name(u)]));
            continue;
        }
        for t in c.objects() {
            sc.count();
            let image: Vec<MorId> = c.hom(t, c.dom(u)).into_iter().map(|g| c.compose(u, g)).collect();
            let distinct: BTreeSet<MorId> = image.iter().copied().collect();
            if distinct.len() != image.len() {
                sc.fail(Violation::new("complement-mono", vec![b.name(z), b.name(u), b.oname(t)]));
            }
            for f in c.hom(t, s) {
                let cart = b.is_cartesian(&Square {
                    top: c.hom(e, t)[0],
                    left: c.hom(e, c.dom(z))[0],
                    right: f,
                    bottom: z,
                });
                if cart != distinct.contains(&f) {
                    sc.fail(
                        Violation::new("complement-image", vec![b.name(z), b.name(u), b.oname(t), b.name(f)])
                            .with_detail(if cart {
                                "misses a morphism disjoint from the closed part"
                            } else {
                                "contains a morphism meeting the closed part"
                            }),
                    );
                }
            }
        }
    }
    r.push(sc);
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FactObject {
    pub mid: ObjId,
    pub closed_part: MorId,
    pub smooth_part: MorId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactCategory {
    pub ambient: MorId,
    pub objects: Vec<FactObject>,
    /// `(source, target, q)` with `q ∘ t' = t` and `p ∘ q = p'`.
    pub arrows: Vec<(usize, usize, MorId)>,
}

pub fn fact_category(b: &BaseCat, f: MorId) -> FactCategory {
    let c = &b.cat;
    let (t, s) = (c.dom(f), c.cod(f));
    let mut objects = Vec::new();
    for p_mid in c.objects() {
        for t_part in c.hom(t, p_mid).into_iter().filter(|&m| b.is_closed(m)) {
            for s_part in c.hom(p_mid, s).into_iter().filter(|&m| b.is_smooth(m)) {
                if c.compose(s_part, t_part) == f {
                    objects.push(FactObject { mid: p_mid, closed_part: t_part, smooth_part: s_part });
                }
            }
        }
    }
    let mut arrows = Vec::new();
    for (i, a) in objects.iter().enumerate() {
        for (j, o) in objects.iter().enumerate() {
            for q in c.hom(a.mid, o.mid).into_iter().filter(|&q| b.is_smooth(q)) {
                if c.compose(q, a.closed_part) == o.closed_part && c.compose(o.smooth_part, q) == a.smooth_part {
                    arrows.push((i, j, q));
                }
            }
        }
    }
    FactCategory { ambient: f, objects, arrows }
}

fn fact_name(b: &BaseCat, o: &FactObject) -> String {
    format!("({}; {}, {})", b.oname(o.mid), b.name(o.closed_part), b.name(o.smooth_part))
}

/// Non-emptiness, connectedness and pairwise domination through `P ×_S P'`.
pub fn fact_connectivity(fc: &FactCategory, b: &BaseCat) -> Result<Section, BaseError> {
    let c = &b.cat;
    let f = fc.ambient;
    let mut s = Section::new("fact-connected", &b.name(f));
    if fc.objects.is_empty() {
        s.fail(Violation::new("non-empty", vec![b.name(f)]));
        return Ok(s);
    }
    let n = fc.objects.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for &(i, j, _) in &fc.arrows {
        let (a, bb) = (find(&mut parent, i), find(&mut parent, j));
        parent[a.max(bb)] = a.min(bb);
    }
    let root0 = find(&mut parent, 0);
    if let Some(k) = (0..n).find(|&k| find(&mut parent, k) != root0) {
        let rk = find(&mut parent, k);
        let names = |r: usize, p: &mut Vec<usize>| {
            (0..n).filter(|&i| find(p, i) == r).map(|i| fact_name(b, &fc.objects[i])).collect::<Vec<_>>()
        };
        let left = names(root0, &mut parent);
        let right = names(rk, &mut parent);
        return Err(BaseError::Disconnected { f: b.name(f), left, right });
    }
    for i in 0..n {
        for j in (i + 1)..n {
            s.count();
            let (x, y) = (fc.objects[i], fc.objects[j]);
            let w = vec![b.name(f), fact_name(b, &x), fact_name(b, &y)];
            let Ok((apex, to_x, to_y)) = pullback(b, x.smooth_part, y.smooth_part) else {
                s.fail(Violation::new("domination-pullback", w));
                continue;
            };
            let t_induced: Vec<MorId> = c
                .hom(c.dom(f), apex)
                .into_iter()
                .filter(|&u| c.compose(to_x, u) == x.closed_part && c.compose(to_y, u) == y.closed_part)
                .collect();
            let p_dom = c.compose(x.smooth_part, to_x);
            let ok = t_induced.len() == 1
                && b.is_closed(t_induced[0])
                && b.is_smooth(p_dom)
                && b.is_smooth(to_x)
                && b.is_smooth(to_y);
            if !ok {
                s.fail(Violation::new("domination", w));
            }
        }
    }
    Ok(s)
}

/// The unique `f1 × f2` between chosen products, by enumeration.
pub fn product_of_morphisms(b: &BaseCat, f1: MorId, f2: MorId) -> Result<MorId, BaseError> {
    let c = &b.cat;
    let no = || BaseError::NoProducts(c.name().into());
    let src = b.product(c.dom(f1), c.dom(f2)).ok_or_else(no)?;
    let tgt = b.product(c.cod(f1), c.cod(f2)).ok_or_else(no)?;
    b.unique_into(src.obj, tgt, c.compose(f1, src.p1), c.compose(f2, src.p2), || {
        format!("{} x {}", b.name(f1), b.name(f2))
    })
}

/// Universal property, strict associativity, functoriality and class closure of products.
pub fn check_products(b: &BaseCat) -> Report {
    let c = &b.cat;
    let mut r = Report::new("base-products");
    if !b.has_products() {
        r.push(Section::skipped("products", c.name(), "no chosen products"));
        return r;
    }
    let mut su = Section::new("product-universal", c.name());
    for s1 in c.objects() {
        for s2 in c.objects() {
            su.count();
            let Some(p) = b.product(s1, s2) else {
                su.fail(Violation::new("product-missing", vec![b.oname(s1), b.oname(s2)]));
                continue;
            };
            if c.dom(p.p1) != p.obj || c.cod(p.p1) != s1 || c.dom(p.p2) != p.obj || c.cod(p.p2) != s2 {
                su.fail(Violation::new("projection-type", vec![b.oname(s1), b.oname(s2)]));
                continue;
            }
            'outer: for x in c.objects() {
                for a in c.hom(x, s1) {
                    for bb in c.hom(x, s2) {
                        if b.unique_into(x, p, a, bb, String::new).is_err() {
                            su.fail(Violation::new(
                                "product-universal",
                                vec![b.oname(s1), b.oname(s2), b.oname(x), b.name(a), b.name(bb)],
                            ));
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    let universal_ok = su.passed();
    r.push(su);
    if !universal_ok {
        return r;
    }
    let mut sf = Section::new("product-functorial", c.name());
    for (f1, g1) in b.composable_pairs(Scope::All) {
        for (f2, g2) in b.composable_pairs(Scope::All) {
            sf.count();
            let lhs = c.compose(b.times(g1, g2), b.times(f1, f2));
            let rhs = b.times(c.compose(g1, f1), c.compose(g2, f2));
            if lhs != rhs {
                sf.fail(Violation::new("product-functorial", vec![b.name(f1), b.name(g1), b.name(f2), b.name(g2)]));
            }
        }
    }
    r.push(sf);
    let mut sa = Section::new("product-associative", c.name());
    for f1 in c.morphisms() {
        for f2 in c.morphisms() {
            for f3 in c.morphisms() {
                sa.count();
                if b.times(b.times(f1, f2), f3) != b.times(f1, b.times(f2, f3)) {
                    sa.fail(Violation::new("product-associative", vec![b.name(f1), b.name(f2), b.name(f3)]));
                }
            }
        }
    }
    r.push(sa);
    let mut sc = Section::new("product-marked", c.name());
    for scope in [Scope::Smooth, Scope::Closed] {
        for f1 in b.scoped(scope) {
            for f2 in b.scoped(scope) {
                sc.count();
                if !b.in_scope(b.times(f1, f2), scope) {
                    sc.fail(Violation::new(&format!("{}-product", scope.name()), vec![b.name(f1), b.name(f2)]));
                }
            }
        }
    }
    r.push(sc);
    r
}

/// Class hypotheses plus connectivity of every factorization category.
pub fn check_base(b: &BaseCat) -> Report {
    let mut r = check_hyp_skel(b);
    let mut sc = Section::new("fact-connected", b.cat.name());
    for f in b.cat.morphisms() {
        match fact_connectivity(&fact_category(b, f), b) {
            Ok(s) => sc.absorb(s),
            Err(e) => {
                sc.count();
                sc.fail(Violation::new("connected", vec![b.name(f)]).with_detail(e.to_string()));
            }
        }
    }
    r.push(sc);
    if b.initial.is_some() || b.complements().is_some() {
        match check_hyp_core(b) {
            Ok(rc) => r.extend(rc),
            Err(e) => {
                let mut s = Section::new("open-complements", b.cat.name());
                s.fail(Violation::new("complement-missing", vec![]).with_detail(e.to_string()));
                r.push(s);
            }
        }
    }
    r.extend(check_products(b));
    r
}
