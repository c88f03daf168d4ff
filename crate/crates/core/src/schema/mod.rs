//! Rule schemas for global invariant types over amalgamation theories:
//! validation, restriction and the tensor product.

mod normalize;
mod parse;
mod tensor;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

pub use normalize::{normalize, NormalForm};
pub use parse::{parse_schema, parse_schema_file, SchemaItem};
pub use tensor::{power, rename, tensor};
pub(crate) use tensor::{all_patterns, joint_skeleton};
pub use validate::{
    complete_schema, validate_schema, verify_derived, DerivedRule, FailureKind, SchemaFailure,
    SchemaReport, MAX_ARITY_BOUND,
};

use crate::amalgam::{AmalgamEngine, QfType};
use crate::error::{Error, Result};
use crate::logic::structure::all_tuples;
use crate::logic::{Literal, PartialStructure, Point, PointKind, RelId, TheorySpec};

/// A slot of a rule pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Var(usize),
    Wild,
}

/// Relation plus slots. Patterns of symmetric relations are stored with
/// variables first (by index) and wildcards after, in their original order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    pub rel: RelId,
    pub slots: Vec<Slot>,
}

impl Pattern {
    pub fn wild_count(&self) -> usize {
        self.slots.iter().filter(|s| **s == Slot::Wild).count()
    }

    pub fn has_var(&self) -> bool {
        self.slots.iter().any(|s| matches!(s, Slot::Var(_)))
    }
}

/// Argument of a guard literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GArg {
    /// k-th wildcard of the pattern, in pattern order.
    Wild(usize),
    Const(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GuardAtom {
    Rel(RelId, Vec<GArg>),
    Eq(GArg, GArg),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GuardLit {
    pub atom: GuardAtom,
    pub positive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Decision {
    pub guard: Vec<GuardLit>,
    pub value: bool,
}

/// First matching decision wins; `default` applies when none matches.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RuleFamily {
    pub decisions: Vec<Decision>,
    pub default: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeSchema {
    pub name: String,
    pub theory: Arc<TheorySpec>,
    pub vars: Vec<String>,
    /// Constant index for realised variables.
    pub realised: Vec<Option<usize>>,
    pub constants: Vec<String>,
    /// Literals among constants as written.
    pub facts: Vec<(RelId, Vec<usize>, bool)>,
    /// Atoms among non-realised variables; symmetric tuples sorted.
    pub internal: BTreeMap<(RelId, Vec<usize>), bool>,
    pub families: BTreeMap<Pattern, RuleFamily>,
}

/// How a schema treats one atom of a realization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AtomRule {
    /// No non-realised variable occurs in the atom.
    Outside,
    Decided(bool),
    /// No internal atom, family or default covers it.
    Uncovered,
}

/// A realization of a schema's variables next to a parameter structure.
#[derive(Clone, Debug)]
pub struct Realized {
    pub structure: PartialStructure,
    /// Point of each variable (constants for realised ones).
    pub var_points: Vec<usize>,
    pub const_points: Vec<usize>,
}

/// Orders the slots of a symmetric atom canonically; returns the permutation.
pub(crate) fn canonical_order(slots: &[Slot], symmetric: bool) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..slots.len()).collect();
    if symmetric {
        idx.sort_by_key(|&i| slots[i]);
    }
    idx
}

impl TypeSchema {
    pub fn empty(name: &str, theory: Arc<TheorySpec>, vars: Vec<String>) -> Self {
        let n = vars.len();
        TypeSchema {
            name: name.to_string(),
            theory,
            vars,
            realised: vec![None; n],
            constants: Vec::new(),
            facts: Vec::new(),
            internal: BTreeMap::new(),
            families: BTreeMap::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn non_realised(&self) -> Vec<usize> {
        (0..self.vars.len()).filter(|&i| self.realised[i].is_none()).collect()
    }

    pub fn is_realised(&self) -> bool {
        self.realised.iter().all(Option::is_some)
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn const_index(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|c| c == name)
    }

    /// Largest wildcard count of any family.
    pub fn max_wildcards(&self) -> usize {
        self.families.keys().map(Pattern::wild_count).max().unwrap_or(0)
    }

    pub(crate) fn engine(&self) -> Result<AmalgamEngine> {
        AmalgamEngine::new(self.theory.clone())
    }

    /// The constants with their facts, not yet completed.
    pub fn constant_skeleton(&self) -> Result<PartialStructure> {
        let points = self
            .constants
            .iter()
            .map(|c| Point::new(c.clone(), PointKind::BaseConstant))
            .collect();
        let mut s = PartialStructure::with_points(self.theory.signature.clone(), points)?;
        for (r, t, v) in &self.facts {
            if s.get(*r, t) == Some(!v) {
                return Err(Error::InvalidSchema(format!(
                    "facts of `{}` contradict each other",
                    self.name
                )));
            }
            s.set(*r, t, Some(*v));
        }
        Ok(s)
    }

    /// The complete diagram of the constants, which the facts must determine.
    pub fn constant_diagram(&self, engine: &AmalgamEngine) -> Result<PartialStructure> {
        let s = self.constant_skeleton()?;
        engine.unique_completion(&s)?.ok_or_else(|| {
            Error::InvalidSchema(format!(
                "facts of `{}` do not determine a unique diagram of its constants",
                self.name
            ))
        })
    }

    fn internal_key(&self, r: RelId, vars: &[usize]) -> (RelId, Vec<usize>) {
        let mut t = vars.to_vec();
        if self.theory.is_symmetric(r) {
            t.sort_unstable();
        }
        (r, t)
    }

    pub fn internal_value(&self, r: RelId, vars: &[usize]) -> Option<bool> {
        self.internal.get(&self.internal_key(r, vars)).copied()
    }

    pub fn set_internal(&mut self, r: RelId, vars: &[usize], value: bool) {
        let key = self.internal_key(r, vars);
        self.internal.insert(key, value);
    }

    /// Canonical pattern and wildcard binding of an atom whose slots are
    /// given as variables or bound points.
    pub fn pattern_of<T: Copy>(&self, r: RelId, slots: &[std::result::Result<usize, T>]) -> (Pattern, Vec<T>) {
        let raw: Vec<Slot> = slots
            .iter()
            .map(|s| match s {
                Ok(v) => Slot::Var(*v),
                Err(_) => Slot::Wild,
            })
            .collect();
        let order = canonical_order(&raw, self.theory.is_symmetric(r));
        let mut pattern = Vec::with_capacity(raw.len());
        let mut binding = Vec::new();
        for i in order {
            pattern.push(raw[i]);
            if let Err(p) = slots[i] {
                binding.push(p);
            }
        }
        (Pattern { rel: r, slots: pattern }, binding)
    }

    /// Evaluates a guard literal with wildcards bound to points of `s`.
    pub(crate) fn guard_holds(
        &self,
        s: &PartialStructure,
        lit: &GuardLit,
        binding: &[usize],
        const_points: &[usize],
    ) -> Result<bool> {
        let point = |a: &GArg| match a {
            GArg::Wild(k) => binding[*k],
            GArg::Const(c) => const_points[*c],
        };
        let v = match &lit.atom {
            GuardAtom::Eq(a, b) => point(a) == point(b),
            GuardAtom::Rel(r, args) => {
                let t: Vec<usize> = args.iter().map(point).collect();
                match s.get(*r, &t) {
                    Some(v) => v,
                    None => {
                        return Err(Error::GuardUnresolved(format!(
                            "guard atom {} of `{}` is undecided",
                            s.atom_name(*r, &t),
                            self.name
                        )))
                    }
                }
            }
        };
        Ok(v == lit.positive)
    }

    /// Runs a decision list against a binding.
    pub(crate) fn run_family(
        &self,
        family: &RuleFamily,
        s: &PartialStructure,
        binding: &[usize],
        const_points: &[usize],
    ) -> Result<Option<bool>> {
        for d in &family.decisions {
            let mut all = true;
            for g in &d.guard {
                if !self.guard_holds(s, g, binding, const_points)? {
                    all = false;
                    break;
                }
            }
            if all {
                return Ok(Some(d.value));
            }
        }
        Ok(family.default)
    }

    /// The schema's value for atom `r(tuple)`; `var_of[p]` gives the
    /// non-realised variable sitting at point `p`, if any.
    pub fn decide_atom(
        &self,
        s: &PartialStructure,
        r: RelId,
        tuple: &[usize],
        var_of: &[Option<usize>],
        const_points: &[usize],
    ) -> Result<AtomRule> {
        let slots: Vec<std::result::Result<usize, usize>> = tuple
            .iter()
            .map(|&p| var_of[p].ok_or(p))
            .collect();
        if slots.iter().all(|s| s.is_err()) {
            return Ok(AtomRule::Outside);
        }
        if slots.iter().all(|s| s.is_ok()) {
            let vars: Vec<usize> = slots.iter().map(|s| *s.as_ref().unwrap()).collect();
            return Ok(match self.internal_value(r, &vars) {
                Some(v) => AtomRule::Decided(v),
                None => AtomRule::Uncovered,
            });
        }
        let (pattern, binding) = self.pattern_of(r, &slots);
        let Some(family) = self.families.get(&pattern) else {
            return Ok(AtomRule::Uncovered);
        };
        Ok(match self.run_family(family, s, &binding, const_points)? {
            Some(v) => AtomRule::Decided(v),
            None => AtomRule::Uncovered,
        })
    }

    /// Adjoins the variables to `params` (which must contain the constants)
    /// and decides every atom the schema covers. Uncovered atoms stay
    /// undecided and are listed.
    pub fn realize_partial(
        &self,
        params: &PartialStructure,
    ) -> Result<(Realized, Vec<(RelId, Vec<usize>)>)> {
        let const_points = self
            .constants
            .iter()
            .map(|c| params.require_point(c))
            .collect::<Result<Vec<_>>>()?;
        let nr = self.non_realised();
        let extra = nr
            .iter()
            .map(|&i| Point::new(self.vars[i].clone(), PointKind::DesignatedVariable))
            .collect();
        let mut s = params.with_extra_points(extra)?;
        let base = params.len();
        let mut var_points = vec![0; self.vars.len()];
        let mut var_of = vec![None; s.len()];
        for (j, &i) in nr.iter().enumerate() {
            var_points[i] = base + j;
            var_of[base + j] = Some(i);
        }
        for (i, c) in self.realised.iter().enumerate() {
            if let Some(c) = c {
                var_points[i] = const_points[*c];
            }
        }
        let mut uncovered = Vec::new();
        let n = s.len();
        let sig = self.theory.signature.clone();
        for r in sig.ids() {
            for t in all_tuples(n, sig.arity(r)) {
                match self.decide_atom(&s, r, &t, &var_of, &const_points)? {
                    AtomRule::Outside => {}
                    AtomRule::Decided(v) => match s.get(r, &t) {
                        Some(w) if w != v => {
                            return Err(Error::InvalidSchema(format!(
                                "`{}` assigns both values to {} (rules are not symmetric)",
                                self.name,
                                s.atom_name(r, &t)
                            )))
                        }
                        _ => s.set(r, &t, Some(v)),
                    },
                    AtomRule::Uncovered => uncovered.push((r, t)),
                }
            }
        }
        Ok((
            Realized {
                structure: s,
                var_points,
                const_points,
            },
            uncovered,
        ))
    }

    /// As `realize_partial`, failing on the first uncovered atom.
    pub fn realize(&self, params: &PartialStructure) -> Result<Realized> {
        let (real, uncovered) = self.realize_partial(params)?;
        if let Some((r, t)) = uncovered.first() {
            return Err(Error::NoRuleMatches {
                schema: self.name.clone(),
                atom: real.structure.atom_name(*r, t),
            });
        }
        Ok(real)
    }

    /// The literals the schema decides over `params`: relational literals
    /// involving a non-realised variable, realised equalities and the
    /// distinctness of the variables.
    pub fn restrict(&self, params: &PartialStructure) -> Result<BTreeSet<Literal>> {
        let real = self.realize(params)?;
        Ok(self.literals_of(&real, params.len()))
    }

    pub(crate) fn literals_of(&self, real: &Realized, base: usize) -> BTreeSet<Literal> {
        let s = &real.structure;
        let mut out = BTreeSet::new();
        for r in s.signature().ids() {
            for t in all_tuples(s.len(), s.signature().arity(r)) {
                if t.iter().any(|&p| p >= base) {
                    if let Some(v) = s.get(r, &t) {
                        out.insert(s.literal(r, &t, v));
                    }
                }
            }
        }
        for (i, c) in self.realised.iter().enumerate() {
            if let Some(c) = c {
                out.insert(Literal::eq(&self.vars[i], &self.constants[*c], true));
            }
        }
        let nr = self.non_realised();
        for (a, &i) in nr.iter().enumerate() {
            for &j in &nr[a + 1..] {
                out.insert(Literal::eq(&self.vars[i], &self.vars[j], false));
            }
        }
        out
    }

    /// Complete diagram of the parameters bound by a type, as guard literals
    /// (atoms with at least one wildcard, plus wildcard equalities).
    pub fn type_guard(&self, t: &QfType, const_points: &[usize]) -> Vec<GuardLit> {
        type_guard(&self.theory, t, const_points)
    }
}

/// See [`TypeSchema::type_guard`].
pub fn type_guard(theory: &TheorySpec, t: &QfType, const_points: &[usize]) -> Vec<GuardLit> {
    let w = t.coords.len();
    let args: Vec<GArg> = (0..w)
        .map(GArg::Wild)
        .chain((0..const_points.len()).map(GArg::Const))
        .collect();
    let point = |a: &GArg| match a {
        GArg::Wild(k) => t.coords[*k],
        GArg::Const(c) => const_points[*c],
    };
    let mut out = Vec::new();
    for r in theory.signature.ids() {
        for idx in all_tuples(args.len(), theory.signature.arity(r)) {
            let a: Vec<GArg> = idx.iter().map(|&i| args[i]).collect();
            if !a.iter().any(|x| matches!(x, GArg::Wild(_))) {
                continue;
            }
            let pts: Vec<usize> = a.iter().map(point).collect();
            let v = t.structure.get(r, &pts).expect("types are total");
            out.push(GuardLit {
                atom: GuardAtom::Rel(r, a),
                positive: v,
            });
        }
    }
    for i in 0..w {
        for j in i + 1..args.len() {
            out.push(GuardLit {
                atom: GuardAtom::Eq(args[i], args[j]),
                positive: point(&args[i]) == point(&args[j]),
            });
        }
    }
    out
}

impl TypeSchema {
    fn fmt_garg(&self, a: &GArg) -> String {
        match a {
            GArg::Wild(k) => format!("*w{k}"),
            GArg::Const(c) => self.constants[*c].clone(),
        }
    }

    pub(crate) fn fmt_guard_lit(&self, g: &GuardLit) -> String {
        match &g.atom {
            GuardAtom::Rel(r, args) => {
                let a: Vec<String> = args.iter().map(|x| self.fmt_garg(x)).collect();
                format!(
                    "{}{}({})",
                    if g.positive { "" } else { "!" },
                    self.theory.signature.name(*r),
                    a.join(",")
                )
            }
            GuardAtom::Eq(a, b) => format!(
                "{} {} {}",
                self.fmt_garg(a),
                if g.positive { "=" } else { "!=" },
                self.fmt_garg(b)
            ),
        }
    }

    pub fn fmt_pattern(&self, p: &Pattern, named: bool) -> String {
        let mut k = 0;
        let slots: Vec<String> = p
            .slots
            .iter()
            .map(|s| match s {
                Slot::Var(i) => self.vars[*i].clone(),
                Slot::Wild => {
                    k += 1;
                    if named {
                        format!("*w{}", k - 1)
                    } else {
                        "*".into()
                    }
                }
            })
            .collect();
        format!("{}({})", self.theory.signature.name(p.rel), slots.join(","))
    }

    /// DSL lines for one family.
    pub(crate) fn family_lines(&self, p: &Pattern, f: &RuleFamily) -> Vec<String> {
        let named = f.decisions.iter().any(|d| {
            d.guard.iter().any(|g| match &g.atom {
                GuardAtom::Rel(_, a) => a.iter().any(|x| matches!(x, GArg::Wild(_))),
                GuardAtom::Eq(a, b) => {
                    matches!(a, GArg::Wild(_)) || matches!(b, GArg::Wild(_))
                }
            })
        });
        let head = self.fmt_pattern(p, named);
        let mut out = Vec::new();
        for d in &f.decisions {
            if d.guard.is_empty() {
                out.push(format!("{head} := {}", d.value));
            } else {
                let g: Vec<String> = d.guard.iter().map(|g| self.fmt_guard_lit(g)).collect();
                out.push(format!("{head} := {} if {}", d.value, g.join(" & ")));
            }
        }
        if let Some(v) = f.default {
            out.push(format!("{head} := {v}"));
        }
        out
    }
}

/// Schema DSL text; `parse_schema` reads it back.
impl fmt::Display for TypeSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "type {} over {} vars {}",
            self.name,
            self.theory.name,
            self.vars.join(",")
        )?;
        if !self.constants.is_empty() {
            writeln!(f, "const {}", self.constants.join(","))?;
        }
        for (r, t, v) in &self.facts {
            let a: Vec<&str> = t.iter().map(|&c| self.constants[c].as_str()).collect();
            writeln!(
                f,
                "fact {}{}({})",
                if *v { "" } else { "!" },
                self.theory.signature.name(*r),
                a.join(",")
            )?;
        }
        for (i, c) in self.realised.iter().enumerate() {
            if let Some(c) = c {
                writeln!(f, "realised {} = {}", self.vars[i], self.constants[*c])?;
            }
        }
        let nr = self.non_realised();
        for (a, &i) in nr.iter().enumerate() {
            for &j in &nr[a + 1..] {
                writeln!(f, "internal {} != {}", self.vars[i], self.vars[j])?;
            }
        }
        for ((r, t), v) in &self.internal {
            let a: Vec<&str> = t.iter().map(|&i| self.vars[i].as_str()).collect();
            writeln!(
                f,
                "internal {}{}({})",
                if *v { "" } else { "!" },
                self.theory.signature.name(*r),
                a.join(",")
            )?;
        }
        for (p, fam) in &self.families {
            for line in self.family_lines(p, fam) {
                writeln!(f, "{line}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;

    #[test]
    fn symmetric_patterns_put_variables_first() {
        let p = builtins::type_schema("counterexample", "p").unwrap();
        let r3 = p.theory.rel("R3").unwrap();
        let slots: [std::result::Result<usize, char>; 3] = [Err('a'), Ok(0), Err('b')];
        let (pat, binding) = p.pattern_of(r3, &slots);
        assert_eq!(pat.slots, [Slot::Var(0), Slot::Wild, Slot::Wild]);
        assert_eq!(binding, ['a', 'b']);
        assert!(p.families.contains_key(&pat));
    }

    #[test]
    fn realised_schema_needs_its_constant() {
        let c = builtins::type_schema("random-graph", "c").unwrap();
        assert!(c.is_realised());
        let empty = PartialStructure::new(c.theory.signature.clone());
        assert!(c.realize(&empty).is_err());
    }
}
