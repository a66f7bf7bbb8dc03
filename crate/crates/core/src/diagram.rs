//! Comparing two pasting paths componentwise, with traces on failure.

use rayon::prelude::*;

use crate::fincat::{Cell, FincatError, NatTrans, PastingTerm};
use crate::report::{Section, Violation};

/// Evaluates a chain of cells; the boundary is read off the first and last step.
pub fn eval_path(cells: &[Cell]) -> Result<(Vec<NatTrans>, NatTrans), FincatError> {
    let first = cells
        .first()
        .ok_or_else(|| FincatError::TypeError { step: 0, detail: "empty path".into() })?
        .eval()
        .map_err(|e| FincatError::TypeError { step: 0, detail: e.to_string() })?;
    let mut steps = vec![first.clone()];
    let mut acc = first;
    for (i, c) in cells.iter().enumerate().skip(1) {
        let t = c
            .eval()
            .map_err(|e| FincatError::TypeError { step: i, detail: format!("{}: {e}", c.label()) })?;
        acc = NatTrans::try_vcomp(&t, &acc).map_err(|e| FincatError::TypeError {
            step: i,
            detail: format!("{}: {e}", c.label()),
        })?;
        steps.push(t);
    }
    Ok((steps, acc))
}

/// Evaluates one path to a single transformation.
pub fn eval(cells: &[Cell]) -> Result<NatTrans, FincatError> {
    eval_path(cells).map(|(_, t)| t)
}

/// Checks that two paths with a common boundary agree componentwise.
pub fn compare(law: &str, witness: Vec<String>, lhs: &[Cell], rhs: &[Cell]) -> Option<Violation> {
    let (ls, l) = match eval_path(lhs) {
        Ok(v) => v,
        Err(e) => return Some(Violation::new(law, witness).with_detail(format!("lhs ill-typed: {e}"))),
    };
    let (rs, r) = match eval_path(rhs) {
        Ok(v) => v,
        Err(e) => return Some(Violation::new(law, witness).with_detail(format!("rhs ill-typed: {e}"))),
    };
    if !l.source().same(r.source()) || !l.target().same(r.target()) {
        return Some(Violation::new(law, witness).with_detail(format!(
            "boundaries differ: {} => {} vs {} => {}",
            l.source().name(),
            l.target().name(),
            r.source().name(),
            r.target().name()
        )));
    }
    let x = l.first_difference(&r)?;
    let dom = l.domain();
    let lt = PastingTerm { source: l.source().clone(), target: l.target().clone(), steps: lhs.to_vec() };
    let rt = PastingTerm { source: r.source().clone(), target: r.target().clone(), steps: rhs.to_vec() };
    let mut v = Violation::new(law, witness).with_detail(format!("at object {}", dom.obj_name(x)));
    v.lhs = crate::fincat::trace_at(&lt, &ls, x);
    v.rhs = crate::fincat::trace_at(&rt, &rs, x);
    Some(v)
}

/// Checks that a path evaluates to an identity transformation.
pub fn is_identity(law: &str, witness: Vec<String>, path: &[Cell]) -> Option<Violation> {
    match eval_path(path) {
        Err(e) => Some(Violation::new(law, witness).with_detail(format!("ill-typed: {e}"))),
        Ok((steps, t)) => {
            if !t.source().same(t.target()) {
                return Some(Violation::new(law, witness).with_detail("boundary is not an endofunctor"));
            }
            let x = t.domain().objects().find(|&x| !t.codomain().is_identity(t.at(x)))?;
            let term = PastingTerm { source: t.source().clone(), target: t.target().clone(), steps: path.to_vec() };
            let mut v = Violation::new(law, witness).with_detail(format!("at object {}", t.domain().obj_name(x)));
            v.lhs = crate::fincat::trace_at(&term, &steps, x);
            Some(v)
        }
    }
}

/// Runs a check over items in parallel and records the results in item order.
pub fn run<T, F>(section: &mut Section, items: &[T], check: F)
where
    T: Sync,
    F: Fn(&T) -> Option<Violation> + Sync,
{
    let results: Vec<Option<Violation>> = items.par_iter().map(&check).collect();
    for r in results {
        section.count();
        if let Some(v) = r {
            section.fail(v);
        }
    }
}

/// Checks naturality and invertibility of one component family.
pub fn wellformed(section: &mut Section, what: &str, t: &NatTrans, need_iso: bool) {
    section.count();
    let nat = crate::fincat::validate_nat_trans(t);
    if let Some(v) = nat.violations.first() {
        let mut w = vec![what.to_string()];
        w.extend(v.witness.iter().cloned());
        section.fail(Violation::new("naturality", w).with_detail(v.detail.clone().unwrap_or_default()));
    }
    if need_iso {
        let bad = crate::fincat::non_invertible_objects(t);
        if let Some(&x) = bad.first() {
            section.fail(Violation::new("invertible", vec![what.to_string(), t.domain().obj_name(x)]));
        }
    }
}
