//! Schema contents as explicit tables, for comparing schemas that decide
//! the same atoms with differently written rules.

use std::collections::BTreeSet;

use super::tensor::all_patterns;
use super::{type_guard, TypeSchema};
use crate::error::Result;
use crate::logic::structure::all_tuples;

/// Every atom decision up to the bound, as sorted rows
/// `(pattern, complete parameter diagram, value)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub vars: Vec<String>,
    pub realised: Vec<Option<String>>,
    pub internal: BTreeSet<(String, bool)>,
    pub rows: BTreeSet<(String, Vec<String>, Option<bool>)>,
}

pub fn normalize(s: &TypeSchema, bound: usize) -> Result<NormalForm> {
    let engine = s.engine()?;
    let d0 = s.constant_diagram(&engine)?;
    let const_points: Vec<usize> = s
        .constants
        .iter()
        .map(|c| d0.require_point(c))
        .collect::<Result<_>>()?;
    let mut internal = BTreeSet::new();
    let nr = s.non_realised();
    let sig = s.theory.signature.clone();
    for r in sig.ids() {
        for idx in all_tuples(nr.len(), sig.arity(r)) {
            let vars: Vec<usize> = idx.iter().map(|&i| nr[i]).collect();
            if let Some(v) = s.internal_value(r, &vars) {
                let names: Vec<&str> = vars.iter().map(|&i| s.vars[i].as_str()).collect();
                internal.insert((format!("{}({})", sig.name(r), names.join(",")), v));
            }
        }
    }
    let mut rows = BTreeSet::new();
    for pat in all_patterns(s) {
        let w = pat.wild_count();
        if w > bound {
            continue;
        }
        let head = s.fmt_pattern(&pat, true);
        for tau in engine.enumerate_extensions(&d0, w)? {
            let guard: Vec<String> = type_guard(&s.theory, &tau, &const_points)
                .iter()
                .map(|g| s.fmt_guard_lit(g))
                .collect();
            let (real, _) = s.realize_partial(&tau.structure)?;
            let mut k = 0;
            let t: Vec<usize> = pat
                .slots
                .iter()
                .map(|sl| match sl {
                    super::Slot::Var(i) => real.var_points[*i],
                    super::Slot::Wild => {
                        k += 1;
                        tau.coords[k - 1]
                    }
                })
                .collect();
            rows.insert((head.clone(), guard, real.structure.get(pat.rel, &t)));
        }
    }
    Ok(NormalForm {
        vars: s.vars.clone(),
        realised: s
            .realised
            .iter()
            .map(|c| c.map(|c| s.constants[c].clone()))
            .collect(),
        internal,
        rows,
    })
}
