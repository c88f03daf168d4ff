//! Membership, closure, consistency and type enumeration for theories given
//! by Horn rules and forbidden configurations.

mod close;
mod ground;
mod solver;

use std::collections::{HashMap, HashSet};
use std::ops::ControlFlow;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

pub use close::{close, CloseOutcome, Contradiction, Justification, TraceStep};
pub use ground::Origin;
use ground::Grounding;
use solver::{Reason, Solver};

use crate::error::{Error, Result};
use crate::logic::structure::decode_tuple;
use crate::logic::{iso_canonical, Literal, PartialStructure, Point, PointKind, TheorySpec};

pub const DEFAULT_POINT_CAP: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StepReason {
    Choice,
    Rule { rule: usize },
    Forbid { forbid: usize },
    Irreflexive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionStep {
    pub literal: Literal,
    pub reason: StepReason,
}

/// A total member extending the input, with the order in which the search
/// decided each atom orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completion {
    pub structure: PartialStructure,
    pub trace: Vec<CompletionStep>,
}

/// A complete quantifier-free type over a named base: the base plus fresh
/// points, with `coords[i]` the point realizing the i-th coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QfType {
    pub structure: PartialStructure,
    pub coords: Vec<usize>,
}

impl QfType {
    /// Indices of the points not in the base.
    pub fn fresh(&self, base_len: usize) -> Vec<usize> {
        (base_len..self.structure.len()).collect()
    }
}

/// Names `#0`, `#1`, ... not already used in `s`.
pub fn fresh_names(s: &PartialStructure, count: usize, prefix: &str) -> Vec<String> {
    let mut out = Vec::with_capacity(count);
    let mut i = 0;
    while out.len() < count {
        let name = format!("{prefix}{i}");
        if s.point_index(&name).is_none() {
            out.push(name);
        }
        i += 1;
    }
    out
}

/// Oracle for one amalgamation theory. Groundings are cached per point count.
pub struct AmalgamEngine {
    theory: Arc<TheorySpec>,
    point_cap: usize,
    groundings: Mutex<HashMap<usize, Arc<Grounding>>>,
}

impl std::fmt::Debug for AmalgamEngine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AmalgamEngine")
            .field("theory", &self.theory.name)
            .field("point_cap", &self.point_cap)
            .finish()
    }
}

impl AmalgamEngine {
    pub fn new(theory: Arc<TheorySpec>) -> Result<Self> {
        theory.require_amalgamation()?;
        Ok(AmalgamEngine {
            theory,
            point_cap: DEFAULT_POINT_CAP,
            groundings: Mutex::new(HashMap::new()),
        })
    }

    pub fn with_point_cap(mut self, cap: usize) -> Self {
        self.point_cap = cap;
        self
    }

    pub fn point_cap(&self) -> usize {
        self.point_cap
    }

    pub fn theory(&self) -> &Arc<TheorySpec> {
        &self.theory
    }

    fn check_size(&self, s: &PartialStructure) -> Result<()> {
        if s.len() > self.point_cap {
            return Err(Error::SizeLimit {
                what: "structure".into(),
                found: s.len(),
                limit: self.point_cap,
            });
        }
        Ok(())
    }

    fn grounding(&self, n: usize) -> Arc<Grounding> {
        let mut cache = self.groundings.lock().expect("grounding cache poisoned");
        cache
            .entry(n)
            .or_insert_with(|| Arc::new(Grounding::build(&self.theory, n)))
            .clone()
    }

    pub fn close(&self, s: &PartialStructure) -> Result<CloseOutcome> {
        self.check_size(s)?;
        Ok(close(s, &self.theory))
    }

    /// Loads the decided atoms; `None` if two slots of one orbit disagree.
    fn load<'g>(&self, g: &'g Grounding, s: &PartialStructure) -> Option<Solver<'g>> {
        let mut solver = Solver::new(g);
        for r in s.signature().ids() {
            for (i, v) in s.table(r).iter().enumerate() {
                if let Some(v) = v {
                    if !solver.give(g.var_of_index(r, i), *v) {
                        return None;
                    }
                }
            }
        }
        Some(solver)
    }

    fn materialize(&self, s: &PartialStructure, solver: &Solver) -> PartialStructure {
        let mut out = s.clone();
        let g = solver.g;
        for r in s.signature().ids() {
            let len = out.table(r).len();
            for i in 0..len {
                let v = g.var_of_index(r, i);
                out.table_mut(r)[i] = solver.val[v as usize];
            }
        }
        out
    }

    pub fn is_member(&self, s: &PartialStructure) -> Result<bool> {
        self.check_size(s)?;
        if let Some((r, t)) = s.undecided().first() {
            return Err(Error::UndecidedAtom(s.atom_name(*r, t)));
        }
        let g = self.grounding(s.len());
        let Some(mut solver) = self.load(&g, s) else {
            return Ok(false);
        };
        Ok(solver.start().is_ok())
    }

    fn first_completion(
        &self,
        s: &PartialStructure,
        true_first: bool,
    ) -> Result<Option<(PartialStructure, Vec<CompletionStep>)>> {
        self.check_size(s)?;
        let g = self.grounding(s.len());
        let Some(mut solver) = self.load(&g, s) else {
            return Ok(None);
        };
        if solver.start().is_err() {
            return Ok(None);
        }
        solver.first_value = true_first;
        let mut found = None;
        let _ = solver.search(0, &mut |sv: &Solver| {
            let trace = sv
                .trail
                .iter()
                .filter_map(|&v| {
                    let reason = match sv.reason[v as usize] {
                        Reason::Given => return None,
                        Reason::Choice => StepReason::Choice,
                        Reason::Clause(_) => match sv.origin(v).unwrap() {
                            Origin::Rule(rule) => StepReason::Rule { rule },
                            Origin::Forbid(forbid) => StepReason::Forbid { forbid },
                            Origin::Irreflexive => StepReason::Irreflexive,
                        },
                    };
                    let (r, idx) = sv.g.var_rep[v as usize];
                    let t = decode_tuple(idx, s.len(), s.signature().arity(r));
                    Some(CompletionStep {
                        literal: s.literal(r, &t, sv.val[v as usize].unwrap()),
                        reason,
                    })
                })
                .collect();
            found = Some((self.materialize(s, sv), trace));
            ControlFlow::Break(())
        });
        Ok(found)
    }

    /// First completion in the deterministic order (false-first).
    pub fn consistent(&self, s: &PartialStructure) -> Result<Option<Completion>> {
        self.consistent_ordered(s, false)
    }

    /// As `consistent`, optionally trying `true` before `false`.
    pub fn consistent_ordered(
        &self,
        s: &PartialStructure,
        true_first: bool,
    ) -> Result<Option<Completion>> {
        Ok(self
            .first_completion(s, true_first)?
            .map(|(structure, trace)| Completion { structure, trace }))
    }

    pub fn is_consistent(&self, s: &PartialStructure) -> Result<bool> {
        self.check_size(s)?;
        let g = self.grounding(s.len());
        let Some(mut solver) = self.load(&g, s) else {
            return Ok(false);
        };
        if solver.start().is_err() {
            return Ok(false);
        }
        let mut found = false;
        let _ = solver.search(0, &mut |_| {
            found = true;
            ControlFlow::Break(())
        });
        Ok(found)
    }

    /// Every member completion, in search order.
    pub fn completions(&self, s: &PartialStructure) -> Result<Vec<PartialStructure>> {
        self.check_size(s)?;
        let g = self.grounding(s.len());
        let Some(mut solver) = self.load(&g, s) else {
            return Ok(Vec::new());
        };
        if solver.start().is_err() {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        let _ = solver.search(0, &mut |sv| {
            out.push(self.materialize(s, sv));
            ControlFlow::Continue(())
        });
        Ok(out)
    }

    /// The completion if there is exactly one.
    pub fn unique_completion(&self, s: &PartialStructure) -> Result<Option<PartialStructure>> {
        self.check_size(s)?;
        let g = self.grounding(s.len());
        let Some(mut solver) = self.load(&g, s) else {
            return Ok(None);
        };
        if solver.start().is_err() {
            return Ok(None);
        }
        let mut out = Vec::new();
        let _ = solver.search(0, &mut |sv| {
            out.push(self.materialize(s, sv));
            if out.len() > 1 {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        Ok(if out.len() == 1 { out.pop() } else { None })
    }

    fn require_member(&self, base: &PartialStructure) -> Result<()> {
        if !self.is_member(base)? {
            return Err(Error::Invalid(format!("base {base} is not a member")));
        }
        Ok(())
    }

    /// All complete k-types over the named base, in deterministic order.
    /// Coordinates may coincide with base points or with each other; fresh
    /// points are introduced in first-occurrence order, so no two entries
    /// are isomorphic over the base.
    pub fn enumerate_extensions(&self, base: &PartialStructure, k: usize) -> Result<Vec<QfType>> {
        self.require_member(base)?;
        if base.len() + k > self.point_cap {
            return Err(Error::SizeLimit {
                what: "type enumeration".into(),
                found: base.len() + k,
                limit: self.point_cap,
            });
        }
        let b = base.len();
        let mut out = Vec::new();
        let mut coords = Vec::with_capacity(k);
        self.extension_patterns(base, b, k, 0, &mut coords, &mut out)?;
        Ok(out)
    }

    fn extension_patterns(
        &self,
        base: &PartialStructure,
        b: usize,
        k: usize,
        fresh: usize,
        coords: &mut Vec<usize>,
        out: &mut Vec<QfType>,
    ) -> Result<()> {
        if coords.len() == k {
            let names = fresh_names(base, fresh, "#");
            let points = names
                .into_iter()
                .map(|n| Point::new(n, PointKind::FreshParameter))
                .collect();
            let s = base.with_extra_points(points)?;
            for structure in self.completions(&s)? {
                out.push(QfType {
                    structure,
                    coords: coords.clone(),
                });
            }
            return Ok(());
        }
        for target in 0..=b + fresh {
            coords.push(target);
            let next_fresh = if target == b + fresh { fresh + 1 } else { fresh };
            self.extension_patterns(base, b, k, next_fresh, coords, out)?;
            coords.pop();
        }
        Ok(())
    }

    /// All members extending `base` by exactly `m` new distinct points,
    /// deduplicated up to isomorphism over the base points.
    pub fn enumerate_structures(
        &self,
        base: &PartialStructure,
        m: usize,
    ) -> Result<Vec<PartialStructure>> {
        self.enumerate_structures_named(base, m, "#")
    }

    pub fn enumerate_structures_named(
        &self,
        base: &PartialStructure,
        m: usize,
        prefix: &str,
    ) -> Result<Vec<PartialStructure>> {
        self.require_member(base)?;
        let names = fresh_names(base, m, prefix);
        let points = names
            .into_iter()
            .map(|n| Point::new(n, PointKind::FreshParameter))
            .collect();
        let s = base.with_extra_points(points)?;
        let fixed: Vec<usize> = (0..base.len()).collect();
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for c in self.completions(&s)? {
            if seen.insert(iso_canonical(&c, &fixed)?) {
                out.push(c);
            }
        }
        Ok(out)
    }

    /// Realizes a 1-type over `base`.
    pub fn one_point_extension(&self, base: &PartialStructure, t: &QfType) -> Result<PartialStructure> {
        if t.coords.len() != 1 {
            return Err(Error::NotRealizable("expected a 1-type".into()));
        }
        let b = base.len();
        let same_base = t.structure.len() >= b
            && (0..b).all(|i| t.structure.point(i).id == base.point(i).id)
            && t.structure.induced(&(0..b).collect::<Vec<_>>()) == *base;
        if !same_base {
            return Err(Error::NotRealizable("type is over a different base".into()));
        }
        if t.coords[0] < b {
            return Ok(base.clone());
        }
        if t.structure.len() != b + 1 || t.coords[0] != b {
            return Err(Error::NotRealizable("malformed 1-type".into()));
        }
        if t.structure.undecided_count() > 0 || !self.is_member(&t.structure)? {
            return Err(Error::NotRealizable(format!(
                "{} is not a member",
                t.structure
            )));
        }
        Ok(t.structure.clone())
    }
}
