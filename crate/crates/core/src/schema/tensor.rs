//! Tensor product of schemas: realize the right factor, then the left
//! factor over the result.

use std::collections::BTreeSet;

use super::{canonical_order, type_guard, Decision, Pattern, RuleFamily, Slot, TypeSchema};
use crate::error::{Error, Result};
use crate::logic::structure::all_tuples;
use crate::logic::PartialStructure;

/// Every canonical slot pattern over the non-realised variables with at
/// least one variable and at least one wildcard.
pub(crate) fn all_patterns(s: &TypeSchema) -> Vec<Pattern> {
    let nr = s.non_realised();
    let mut choices: Vec<Slot> = nr.iter().map(|&i| Slot::Var(i)).collect();
    choices.push(Slot::Wild);
    let sig = &s.theory.signature;
    let mut out = BTreeSet::new();
    for r in sig.ids() {
        for idx in all_tuples(choices.len(), sig.arity(r)) {
            let raw: Vec<Slot> = idx.iter().map(|&i| choices[i]).collect();
            if !raw.iter().any(|x| *x == Slot::Wild) || raw.iter().all(|x| *x == Slot::Wild) {
                continue;
            }
            let order = canonical_order(&raw, s.theory.is_symmetric(r));
            out.insert(Pattern {
                rel: r,
                slots: order.iter().map(|&i| raw[i]).collect(),
            });
        }
    }
    out.into_iter().collect()
}

/// Renames the variables; rules refer to variables by position.
pub fn rename(p: &TypeSchema, f: &dyn Fn(&str) -> String) -> TypeSchema {
    TypeSchema {
        vars: p.vars.iter().map(|v| f(v)).collect(),
        ..p.clone()
    }
}

/// Two-step realization: `q` over `params`, then `p` over the result.
/// Returns the structure and the point of every product variable.
fn realize_pair(
    p: &TypeSchema,
    q: &TypeSchema,
    params: &PartialStructure,
) -> Result<(PartialStructure, Vec<usize>)> {
    let y = q.realize(params)?;
    let z = p.realize(&y.structure)?;
    let mut points = z.var_points.clone();
    points.extend(y.var_points.iter().copied());
    Ok((z.structure, points))
}


/// The product's variables, constants, facts and realised declarations,
/// with no rules yet. Also returns the index of each of `q`'s constants.
pub(crate) fn joint_skeleton(p: &TypeSchema, q: &TypeSchema) -> Result<(TypeSchema, Vec<usize>)> {
    if p.theory != q.theory {
        return Err(Error::Invalid(format!(
            "`{}` and `{}` are over different theories",
            p.name, q.name
        )));
    }
    if let Some(v) = p.vars.iter().find(|v| q.vars.contains(v)) {
        return Err(Error::DuplicateName(v.clone()));
    }
    let nx = p.vars.len();
    let mut out = TypeSchema::empty(
        &format!("{}_{}", p.name, q.name),
        p.theory.clone(),
        p.vars.iter().chain(&q.vars).cloned().collect(),
    );
    out.constants = p.constants.clone();
    let mut qmap = Vec::new();
    for c in &q.constants {
        match out.const_index(c) {
            Some(i) => qmap.push(i),
            None => {
                out.constants.push(c.clone());
                qmap.push(out.constants.len() - 1);
            }
        }
    }
    out.facts = p.facts.clone();
    for (r, t, v) in &q.facts {
        let f = (*r, t.iter().map(|&c| qmap[c]).collect(), *v);
        if !out.facts.contains(&f) {
            out.facts.push(f);
        }
    }
    for (i, c) in p.realised.iter().enumerate() {
        out.realised[i] = *c;
    }
    for (i, c) in q.realised.iter().enumerate() {
        out.realised[nx + i] = c.map(|c| qmap[c]);
    }
    Ok((out, qmap))
}

/// `p(x) ⊗ q(y)`: variables are `p`'s followed by `q`'s.
pub fn tensor(p: &TypeSchema, q: &TypeSchema) -> Result<TypeSchema> {
    let nx = p.vars.len();
    let (mut out, qmap) = joint_skeleton(p, q)?;
    let engine = out.engine()?;
    let d0 = out.constant_diagram(&engine)?;
    let const_points: Vec<usize> = out
        .constants
        .iter()
        .map(|c| d0.require_point(c))
        .collect::<Result<_>>()?;

    // Atoms among the variables.
    let (z0, points) = realize_pair(p, q, &d0)?;
    let nr = out.non_realised();
    let sig = out.theory.signature.clone();
    for r in sig.ids() {
        for idx in all_tuples(nr.len(), sig.arity(r)) {
            let vars: Vec<usize> = idx.iter().map(|&i| nr[i]).collect();
            let t: Vec<usize> = vars.iter().map(|&v| points[v]).collect();
            let v = z0.get(r, &t).ok_or_else(|| {
                Error::GuardUnresolved(format!("{} is undecided", z0.atom_name(r, &t)))
            })?;
            out.set_internal(r, &vars, v);
        }
    }

    for pat in all_patterns(&out) {
        let x_part = pat.slots.iter().any(|s| matches!(s, Slot::Var(i) if *i < nx));
        if !x_part {
            let qslots: Vec<Slot> = pat
                .slots
                .iter()
                .map(|s| match s {
                    Slot::Var(i) => Slot::Var(i - nx),
                    Slot::Wild => Slot::Wild,
                })
                .collect();
            if let Some(f) = q.families.get(&Pattern {
                rel: pat.rel,
                slots: qslots,
            }) {
                let mut f = f.clone();
                for d in &mut f.decisions {
                    for g in &mut d.guard {
                        remap_consts(&mut g.atom, &qmap);
                    }
                }
                out.families.insert(pat, f);
            }
            continue;
        }
        let w = pat.wild_count();
        let mut rows = Vec::new();
        for tau in engine.enumerate_extensions(&d0, w)? {
            let (z, points) = realize_pair(p, q, &tau.structure)?;
            let mut k = 0;
            let t: Vec<usize> = pat
                .slots
                .iter()
                .map(|s| match s {
                    Slot::Var(i) => points[*i],
                    Slot::Wild => {
                        k += 1;
                        tau.coords[k - 1]
                    }
                })
                .collect();
            let v = z.get(pat.rel, &t).ok_or_else(|| {
                Error::GuardUnresolved(format!("{} is undecided", z.atom_name(pat.rel, &t)))
            })?;
            rows.push((type_guard(&out.theory, &tau, &const_points), v));
        }
        out.families.insert(pat, collapse(rows));
    }
    Ok(out)
}

fn remap_consts(atom: &mut super::GuardAtom, map: &[usize]) {
    use super::{GArg, GuardAtom};
    let f = |a: &mut GArg| {
        if let GArg::Const(c) = a {
            *c = map[*c];
        }
    };
    match atom {
        GuardAtom::Rel(_, args) => args.iter_mut().for_each(f),
        GuardAtom::Eq(a, b) => {
            f(a);
            f(b);
        }
    }
}

/// A single default when every parameter type gets the same value,
/// otherwise one decision per type.
pub(crate) fn collapse(rows: Vec<(Vec<super::GuardLit>, bool)>) -> RuleFamily {
    if let Some(first) = rows.first().map(|r| r.1) {
        if rows.iter().all(|r| r.1 == first) {
            return RuleFamily {
                decisions: Vec::new(),
                default: Some(first),
            };
        }
    }
    RuleFamily {
        decisions: rows
            .into_iter()
            .map(|(guard, value)| Decision { guard, value })
            .collect(),
        default: None,
    }
}

/// `p^n`, right-associated, with variables `v_{n-1}, ..., v_0`.
pub fn power(p: &TypeSchema, n: usize) -> Result<TypeSchema> {
    if n == 0 || n > 3 {
        return Err(Error::Invalid(format!("power {n} is outside 1..=3")));
    }
    let mut acc = rename(p, &|v| format!("{v}_0"));
    for i in 1..n {
        let f = rename(p, &|v| format!("{v}_{i}"));
        acc = tensor(&f, &acc)?;
    }
    acc.name = format!("{}_pow{n}", p.name);
    Ok(acc)
}
