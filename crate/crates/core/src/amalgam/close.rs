//! Horn closure with a replayable trace.

use serde::{Deserialize, Serialize};

use crate::logic::structure::{all_tuples, decode_tuple};
use crate::logic::{Literal, PartialStructure, PatAtom, PatLit, RelId, TheorySpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Justification {
    /// Closure rule `rule` instantiated with point ids for its variables.
    Rule { rule: usize, binding: Vec<String> },
    /// Single-literal forbidden configuration.
    Forbid { forbid: usize, binding: Vec<String> },
    Irreflexive,
    /// Same atom under a permutation of a symmetric relation.
    Symmetry { from: Literal },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub literal: Literal,
    pub why: Justification,
}

/// Propagation derived `clash.literal` while its negation already held.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contradiction {
    pub steps: Vec<TraceStep>,
    pub clash: TraceStep,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CloseOutcome {
    Closed {
        structure: PartialStructure,
        steps: Vec<TraceStep>,
    },
    Contradiction(Contradiction),
}

impl CloseOutcome {
    pub fn structure(&self) -> Option<&PartialStructure> {
        match self {
            CloseOutcome::Closed { structure, .. } => Some(structure),
            CloseOutcome::Contradiction(_) => None,
        }
    }
}

pub(crate) fn permutations(t: &[usize]) -> Vec<Vec<usize>> {
    if t.len() <= 1 {
        return vec![t.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..t.len() {
        let mut rest = t.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

fn lit_holds(s: &PartialStructure, l: &PatLit, b: &[usize]) -> bool {
    match &l.atom {
        PatAtom::Eq(x, y) => (b[*x] == b[*y]) == l.positive,
        PatAtom::Rel(r, args) => {
            let t: Vec<usize> = args.iter().map(|&i| b[i]).collect();
            s.get(*r, &t) == Some(l.positive)
        }
    }
}

fn bindings(nvars: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    all_tuples(n, nvars)
}

struct Closer<'a> {
    theory: &'a TheorySpec,
    state: PartialStructure,
    steps: Vec<TraceStep>,
}

impl Closer<'_> {
    fn ids(&self, b: &[usize]) -> Vec<String> {
        b.iter().map(|&i| self.state.point(i).id.clone()).collect()
    }

    /// Ok(true) if something new was set.
    fn derive(
        &mut self,
        r: RelId,
        t: &[usize],
        value: bool,
        why: Justification,
    ) -> Result<bool, Contradiction> {
        let lit = self.state.literal(r, t, value);
        match self.state.get(r, t) {
            Some(v) if v == value => return Ok(false),
            Some(_) => {
                return Err(Contradiction {
                    steps: self.steps.clone(),
                    clash: TraceStep { literal: lit, why },
                })
            }
            None => {}
        }
        self.state.set(r, t, Some(value));
        self.steps.push(TraceStep {
            literal: lit.clone(),
            why,
        });
        if self.theory.is_symmetric(r) {
            for p in permutations(t) {
                self.derive(r, &p, value, Justification::Symmetry { from: lit.clone() })?;
            }
        }
        Ok(true)
    }

    fn pass(&mut self) -> Result<bool, Contradiction> {
        let n = self.state.len();
        let mut changed = false;
        let theory = self.theory;
        for (id, rule) in theory.rules.iter().enumerate() {
            for b in bindings(rule.vars.len(), n) {
                if rule.body.iter().all(|l| lit_holds(&self.state, l, &b)) {
                    let t: Vec<usize> = rule.head.1.iter().map(|&i| b[i]).collect();
                    let why = Justification::Rule {
                        rule: id,
                        binding: self.ids(&b),
                    };
                    changed |= self.derive(rule.head.0, &t, true, why)?;
                }
            }
        }
        for (id, fb) in theory.forbidden.iter().enumerate() {
            let rels: Vec<&PatLit> = fb
                .lits
                .iter()
                .filter(|l| matches!(l.atom, PatAtom::Rel(..)))
                .collect();
            if rels.len() != 1 {
                continue;
            }
            let PatAtom::Rel(r, args) = &rels[0].atom else { unreachable!() };
            for b in bindings(fb.vars.len(), n) {
                let guards_hold = fb
                    .lits
                    .iter()
                    .filter(|l| matches!(l.atom, PatAtom::Eq(..)))
                    .all(|l| lit_holds(&self.state, l, &b));
                if guards_hold {
                    let t: Vec<usize> = args.iter().map(|&i| b[i]).collect();
                    let why = Justification::Forbid {
                        forbid: id,
                        binding: self.ids(&b),
                    };
                    changed |= self.derive(*r, &t, !rels[0].positive, why)?;
                }
            }
        }
        for &r in &theory.irreflexive {
            let k = theory.signature.arity(r);
            for t in all_tuples(n, k) {
                let mut s = t.clone();
                s.sort_unstable();
                if s.windows(2).any(|w| w[0] == w[1]) {
                    changed |= self.derive(r, &t, false, Justification::Irreflexive)?;
                }
            }
        }
        Ok(changed)
    }
}

/// Least fixed point of Horn propagation, symmetry, irreflexivity and
/// single-literal forbidden configurations.
pub fn close(s: &PartialStructure, theory: &TheorySpec) -> CloseOutcome {
    let mut c = Closer {
        theory,
        state: s.clone(),
        steps: Vec::new(),
    };
    let run = (|| {
        let n = s.len();
        for &r in &theory.symmetric {
            let k = theory.signature.arity(r);
            for (i, v) in s.table(r).iter().enumerate() {
                if let Some(v) = v {
                    let t = decode_tuple(i, n, k);
                    let from = s.literal(r, &t, *v);
                    for p in permutations(&t) {
                        c.derive(r, &p, *v, Justification::Symmetry { from: from.clone() })?;
                    }
                }
            }
        }
        while c.pass()? {}
        Ok(())
    })();
    match run {
        Ok(()) => CloseOutcome::Closed {
            structure: c.state,
            steps: c.steps,
        },
        Err(contra) => CloseOutcome::Contradiction(contra),
    }
}

fn resolve_binding(state: &PartialStructure, binding: &[String]) -> Option<Vec<usize>> {
    binding.iter().map(|id| state.point_index(id)).collect()
}

/// Checks that `step` is a legitimate consequence of `state`.
fn step_valid(state: &PartialStructure, theory: &TheorySpec, step: &TraceStep) -> bool {
    let Ok((r, t)) = state.resolve_literal(&step.literal) else {
        return false;
    };
    match &step.why {
        Justification::Rule { rule, binding } => {
            let Some(rule) = theory.rules.get(*rule) else { return false };
            let Some(b) = resolve_binding(state, binding) else { return false };
            if b.len() != rule.vars.len() || !step.literal.positive {
                return false;
            }
            let head: Vec<usize> = rule.head.1.iter().map(|&i| b[i]).collect();
            rule.head.0 == r && head == t && rule.body.iter().all(|l| lit_holds(state, l, &b))
        }
        Justification::Forbid { forbid, binding } => {
            let Some(fb) = theory.forbidden.get(*forbid) else { return false };
            let Some(b) = resolve_binding(state, binding) else { return false };
            if b.len() != fb.vars.len() {
                return false;
            }
            let mut rel_lits = fb.lits.iter().filter(|l| matches!(l.atom, PatAtom::Rel(..)));
            let (Some(only), None) = (rel_lits.next(), rel_lits.next()) else { return false };
            let PatAtom::Rel(fr, args) = &only.atom else { return false };
            let ft: Vec<usize> = args.iter().map(|&i| b[i]).collect();
            *fr == r
                && ft == t
                && step.literal.positive != only.positive
                && fb
                    .lits
                    .iter()
                    .filter(|l| matches!(l.atom, PatAtom::Eq(..)))
                    .all(|l| lit_holds(state, l, &b))
        }
        Justification::Irreflexive => {
            let mut s = t.clone();
            s.sort_unstable();
            theory.irreflexive.contains(&r)
                && !step.literal.positive
                && s.windows(2).any(|w| w[0] == w[1])
        }
        Justification::Symmetry { from } => {
            let Ok((fr, ft)) = state.resolve_literal(from) else { return false };
            let mut a = ft.clone();
            let mut b = t.clone();
            a.sort_unstable();
            b.sort_unstable();
            theory.is_symmetric(r)
                && fr == r
                && a == b
                && from.positive == step.literal.positive
                && state.get(fr, &ft) == Some(from.positive)
        }
    }
}

impl Contradiction {
    /// Re-derives every step from `s` and confirms the clash.
    pub fn replay(&self, s: &PartialStructure, theory: &TheorySpec) -> bool {
        let mut state = s.clone();
        for step in &self.steps {
            if !step_valid(&state, theory, step) {
                return false;
            }
            let (r, t) = state.resolve_literal(&step.literal).unwrap();
            if state.get(r, &t) == Some(!step.literal.positive) {
                return false;
            }
            state.set(r, &t, Some(step.literal.positive));
        }
        if !step_valid(&state, theory, &self.clash) {
            return false;
        }
        let (r, t) = state.resolve_literal(&self.clash.literal).unwrap();
        state.get(r, &t) == Some(!self.clash.literal.positive)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::logic::{Point, PointKind};

    #[test]
    fn permutations_of_three() {
        let mut p = permutations(&[0, 1, 2]);
        p.sort();
        p.dedup();
        assert_eq!(p.len(), 6);
    }

    #[test]
    fn symmetric_closure_is_traced() {
        let th = builtins::theory("random-graph").unwrap();
        let pts = vec![
            Point::new("a", PointKind::FreshParameter),
            Point::new("b", PointKind::FreshParameter),
        ];
        let mut s = PartialStructure::with_points(th.signature.clone(), pts).unwrap();
        s.assert_literal(&Literal::rel("E", &["a", "b"], true)).unwrap();
        let CloseOutcome::Closed { structure, steps } = close(&s, &th) else { panic!() };
        let e = th.rel("E").unwrap();
        assert_eq!(structure.get(e, &[1, 0]), Some(true));
        assert_eq!(structure.get(e, &[0, 0]), Some(false));
        assert!(steps.iter().any(|st| matches!(st.why, Justification::Symmetry { .. })));
        assert!(steps.iter().any(|st| st.why == Justification::Irreflexive));
    }
}
