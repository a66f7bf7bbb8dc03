//! The finitely checkable part of the localic conditions. Passing all of them
//! only ever earns the verdict "partial checks passed": the localization
//! triangle has no analogue at this scale.

use std::sync::Arc;

use crate::adjoint::{beck_chevalley, AdjointAssignment};
use crate::base::{pullback, Scope, Square};
use crate::fibered::FiberedCat;
use crate::fincat::ObjId;
use crate::report::{Report, Section, Violation};

pub const PARTIAL_NOTE: &str = "partial checks passed; the localization triangle is not modelled";

#[derive(Clone, Debug)]
pub struct LocalicData {
    pub host: Arc<FiberedCat>,
    pub smooth_left: AdjointAssignment,
    pub closed_right: AdjointAssignment,
}

/// Terminal fiber at the initial object, invertible smooth base change,
/// fully faithful closed direct images and joint conservativity of `(z^*, u^*)`.
pub fn check_localic_partial(l: &LocalicData) -> Report {
    let h = &*l.host;
    let b = &h.base;
    let c = &b.cat;
    let mut r = Report::new("localic");

    let mut sa = Section::new("initial-fiber-terminal", &h.name);
    match b.initial {
        None => sa.fail(Violation::new("initial-object", vec![]).with_detail("no initial object declared")),
        Some(e) => {
            sa.count();
            let f = h.fiber(e);
            if f.n_objects() != 1 || f.n_morphisms() != 1 {
                sa.fail(Violation::new("terminal", vec![b.oname(e)]).with_detail(format!(
                    "{} objects, {} morphisms",
                    f.n_objects(),
                    f.n_morphisms()
                )));
            }
        }
    }
    r.push(sa);

    let mut sb = Section::new("base-change-invertible", &h.name);
    for p in b.scoped(Scope::Smooth) {
        for f in c.morphisms().filter(|&f| c.cod(f) == c.cod(p)) {
            sb.count();
            let w = vec![b.name(p), b.name(f)];
            let Ok((_, top, left)) = pullback(b, p, f) else {
                sb.fail(Violation::new("pullback", w));
                continue;
            };
            let sq = Square { top, left, right: p, bottom: f };
            match beck_chevalley(h, &sq, &l.smooth_left) {
                Ok(x) if x.non_invertible.is_empty() => {}
                Ok(x) => {
                    let o = x.map.domain().obj_name(x.non_invertible[0]);
                    sb.fail(Violation::new("invertible", w).with_detail(format!("at object {o}")));
                }
                Err(e) => sb.fail(Violation::new("pasting", w).with_detail(e.to_string())),
            }
        }
    }
    r.push(sb);

    let mut sc = Section::new("closed-direct-image-fully-faithful", &h.name);
    for z in b.scoped(Scope::Closed) {
        let push = l.closed_right.adjoint(z);
        let fib = h.fiber(c.dom(z));
        let tgt = push.target();
        for x in fib.objects() {
            for y in fib.objects() {
                sc.count();
                let hom = fib.hom(x, y);
                let mut images: Vec<_> = hom.iter().map(|&m| push.mor(m)).collect();
                images.sort();
                images.dedup();
                let full = tgt.hom(push.obj(x), push.obj(y)).len();
                if images.len() != hom.len() || images.len() != full {
                    sc.fail(Violation::new("fully-faithful", vec![b.name(z), fib.obj_name(x), fib.obj_name(y)])
                        .with_detail(format!("{} morphisms map onto {} of {}", hom.len(), images.len(), full)));
                }
            }
        }
    }
    r.push(sc);

    let mut sd = Section::new("complement-pair-conservative", &h.name);
    match b.complements() {
        None => sd.fail(Violation::new("complements", vec![]).with_detail("no open complements declared")),
        Some(comps) => {
            for (&z, &u) in comps {
                let s: ObjId = c.cod(z);
                let fib = h.fiber(s);
                let (zs, us) = (h.functor(z), h.functor(u));
                for m in fib.morphisms() {
                    sd.count();
                    if !fib.is_iso(m) && zs.target().is_iso(zs.mor(m)) && us.target().is_iso(us.mor(m)) {
                        sd.fail(Violation::new("conservative", vec![b.name(z), b.name(u), fib.mor_name(m)]));
                    }
                }
            }
        }
    }
    r.push(sd);

    if r.passed() {
        let mut n = Section::new("localic-status", &h.name);
        n.count();
        r.push(n.note(PARTIAL_NOTE));
    }
    r
}
