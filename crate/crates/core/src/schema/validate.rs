//! Completeness and consistency of schemas over bounded parameter cores,
//! plus semantic completion by forced values.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{type_guard, Decision, GuardLit, Pattern, TypeSchema};
use crate::amalgam::{AmalgamEngine, QfType};
use crate::error::{Error, Result};
use crate::logic::{PartialStructure, RelId, StructureDto};

pub const MAX_ARITY_BOUND: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureKind {
    /// Neither value of some atom is ruled out.
    Incomplete,
    /// Both values of some atom are ruled out, or rules disagree.
    Conflict,
    /// The restriction to some core is inconsistent.
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaFailure {
    pub kind: FailureKind,
    /// Number of parameter points the failure needs.
    pub arity: usize,
    pub atom: String,
    /// The value the theory forces, when the atom is merely uncovered.
    pub forced: Option<bool>,
    pub core: StructureDto,
}

/// A rule added by completion. `certificate` sets the atom to the opposite
/// value and has no member completion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedRule {
    pub rule: String,
    pub atom: String,
    pub certificate: StructureDto,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchemaReport {
    pub schema: String,
    pub arity_bound: usize,
    /// `complete_by_arity[m]`: every atom is covered over every m-point core.
    pub complete_by_arity: Vec<bool>,
    pub consistent: bool,
    pub failures: Vec<SchemaFailure>,
    pub derived: Vec<DerivedRule>,
    pub trace: Vec<String>,
}

impl SchemaReport {
    pub fn passed(&self) -> bool {
        self.consistent && self.complete_by_arity.iter().all(|c| *c) && self.failures.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Internal(RelId, Vec<usize>),
    Family(Pattern, Vec<GuardLit>),
}

#[derive(Debug)]
struct Group {
    arity: usize,
    atom: String,
    core: StructureDto,
    /// Certificate ruling out each value (index = value).
    ruled_out: [Option<(StructureDto, String)>; 2],
}

struct Analysis {
    groups: BTreeMap<Key, Group>,
    uncovered_by_arity: Vec<bool>,
    failures: Vec<SchemaFailure>,
    trace: Vec<String>,
}

fn analyse(s: &TypeSchema, engine: &AmalgamEngine, bound: usize) -> Result<Analysis> {
    let d0 = s.constant_diagram(engine)?;
    let mut a = Analysis {
        groups: BTreeMap::new(),
        uncovered_by_arity: vec![false; bound + 1],
        failures: Vec::new(),
        trace: Vec::new(),
    };
    for m in 0..=bound {
        let cores = engine.enumerate_structures_named(&d0, m, "a")?;
        let mut uncovered_total = 0;
        for core in &cores {
            let (real, uncovered) = match s.realize_partial(core) {
                Ok(x) => x,
                Err(e @ (Error::InvalidSchema(_) | Error::GuardUnresolved(_))) => {
                    a.failures.push(SchemaFailure {
                        kind: FailureKind::Conflict,
                        arity: m,
                        atom: e.to_string(),
                        forced: None,
                        core: core.to_dto(),
                    });
                    continue;
                }
                Err(e) => return Err(e),
            };
            let st = &real.structure;
            if !engine.is_consistent(st)? {
                a.failures.push(SchemaFailure {
                    kind: FailureKind::Inconsistent,
                    arity: m,
                    atom: String::new(),
                    forced: None,
                    core: core.to_dto(),
                });
                continue;
            }
            if !uncovered.is_empty() {
                a.uncovered_by_arity[m] = true;
            }
            uncovered_total += uncovered.len();
            let var_of = var_of(s, &real.var_points, st.len());
            for (r, t) in uncovered {
                let slots: Vec<std::result::Result<usize, usize>> =
                    t.iter().map(|&p| var_of[p].ok_or(p)).collect();
                let (key, arity) = if slots.iter().all(|x| x.is_ok()) {
                    let vars: Vec<usize> = slots.iter().map(|x| *x.as_ref().unwrap()).collect();
                    let key = s.internal_key(r, &vars);
                    (Key::Internal(key.0, key.1), 0)
                } else {
                    let (pattern, binding) = s.pattern_of(r, &slots);
                    let qt = QfType {
                        structure: core.clone(),
                        coords: binding.clone(),
                    };
                    let guard = type_guard(&s.theory, &qt, &real.const_points);
                    let mut distinct = binding.clone();
                    distinct.sort_unstable();
                    distinct.dedup();
                    (Key::Family(pattern, guard), distinct.len())
                };
                let atom = st.atom_name(r, &t);
                let g = a.groups.entry(key).or_insert_with(|| Group {
                    arity,
                    atom: atom.clone(),
                    core: core.to_dto(),
                    ruled_out: [None, None],
                });
                for v in [false, true] {
                    if g.ruled_out[v as usize].is_some() {
                        continue;
                    }
                    let mut probe = st.clone();
                    probe.set(r, &t, Some(v));
                    if !engine.is_consistent(&probe)? {
                        g.ruled_out[v as usize] = Some((probe.to_dto(), atom.clone()));
                    }
                }
            }
        }
        a.trace.push(format!(
            "arity {m}: {} cores, {uncovered_total} uncovered atoms",
            cores.len()
        ));
    }
    Ok(a)
}

fn var_of(s: &TypeSchema, var_points: &[usize], n: usize) -> Vec<Option<usize>> {
    let mut out = vec![None; n];
    for i in s.non_realised() {
        out[var_points[i]] = Some(i);
    }
    out
}

fn forced(g: &Group) -> Option<bool> {
    match (&g.ruled_out[0], &g.ruled_out[1]) {
        (Some(_), None) => Some(true),
        (None, Some(_)) => Some(false),
        _ => None,
    }
}

fn group_failures(a: &Analysis) -> Vec<SchemaFailure> {
    a.groups
        .values()
        .map(|g| {
            let both = g.ruled_out.iter().all(Option::is_some);
            SchemaFailure {
                kind: if both {
                    FailureKind::Conflict
                } else {
                    FailureKind::Incomplete
                },
                arity: g.arity,
                atom: g.atom.clone(),
                forced: forced(g),
                core: g.core.clone(),
            }
        })
        .collect()
}

fn check_bound(s: &TypeSchema, bound: usize) -> Result<AmalgamEngine> {
    if bound > MAX_ARITY_BOUND {
        return Err(Error::SizeLimit {
            what: "arity bound".into(),
            found: bound,
            limit: MAX_ARITY_BOUND,
        });
    }
    s.engine()
}

/// Adds every forced rule found at this bound; returns what was added.
fn derive(s: &mut TypeSchema, a: &Analysis, bound: usize) -> Vec<DerivedRule> {
    let mut out = Vec::new();
    let mut by_pattern: BTreeMap<Pattern, Vec<(&Vec<GuardLit>, &Group)>> = BTreeMap::new();
    for (key, g) in &a.groups {
        match key {
            Key::Internal(r, vars) => {
                if let Some(v) = forced(g) {
                    s.set_internal(*r, vars, v);
                    let names: Vec<&str> = vars.iter().map(|&i| s.vars[i].as_str()).collect();
                    out.push(DerivedRule {
                        rule: format!(
                            "internal {}{}({})",
                            if v { "" } else { "!" },
                            s.theory.signature.name(*r),
                            names.join(",")
                        ),
                        atom: g.atom.clone(),
                        certificate: g.ruled_out[!v as usize].clone().unwrap().0,
                    });
                }
            }
            Key::Family(p, guard) => by_pattern.entry(p.clone()).or_default().push((guard, g)),
        }
    }
    for (p, groups) in by_pattern {
        let values: Vec<Option<bool>> = groups.iter().map(|(_, g)| forced(g)).collect();
        let uniform = values[0].is_some() && values.iter().all(|v| *v == values[0]);
        let fam = s.families.entry(p.clone()).or_default();
        if uniform && p.wild_count() <= bound && fam.default.is_none() {
            let v = values[0].unwrap();
            fam.default = Some(v);
            let (_, g) = groups[0];
            let rule = s.family_lines(&p, &s.families[&p]).pop().unwrap();
            out.push(DerivedRule {
                rule,
                atom: g.atom.clone(),
                certificate: g.ruled_out[!v as usize].clone().unwrap().0,
            });
            continue;
        }
        for (guard, g) in groups {
            if let Some(v) = forced(g) {
                let fam = s.families.get_mut(&p).unwrap();
                fam.decisions.push(Decision {
                    guard: guard.clone(),
                    value: v,
                });
                let line = s.family_lines(&p, &s.families[&p]);
                let idx = s.families[&p].decisions.len() - 1;
                out.push(DerivedRule {
                    rule: line[idx].clone(),
                    atom: g.atom.clone(),
                    certificate: g.ruled_out[!v as usize].clone().unwrap().0,
                });
            }
        }
    }
    s.families.retain(|_, f| !f.decisions.is_empty() || f.default.is_some());
    out
}

fn report(s: &TypeSchema, a: Analysis, bound: usize, derived: Vec<DerivedRule>) -> SchemaReport {
    let mut failures = a.failures.clone();
    failures.extend(group_failures(&a));
    let consistent = !failures
        .iter()
        .any(|f| matches!(f.kind, FailureKind::Inconsistent | FailureKind::Conflict));
    SchemaReport {
        schema: s.name.clone(),
        arity_bound: bound,
        complete_by_arity: a.uncovered_by_arity.iter().map(|u| !u).collect(),
        consistent,
        failures,
        derived,
        trace: a.trace,
    }
}

/// Checks that every atom over every core of at most `bound` parameter
/// points is decided and that each restriction is consistent. `derived`
/// lists the rules completion would add; the schema is left unchanged.
pub fn validate_schema(s: &TypeSchema, bound: usize) -> Result<SchemaReport> {
    let engine = check_bound(s, bound)?;
    let a = analyse(s, &engine, bound)?;
    let mut scratch = s.clone();
    let derived = derive(&mut scratch, &a, bound);
    Ok(report(s, a, bound, derived))
}

/// Adds forced rules until nothing more is forced, then validates the result.
pub fn complete_schema(s: &TypeSchema, bound: usize) -> Result<(TypeSchema, SchemaReport)> {
    let engine = check_bound(s, bound)?;
    let mut out = s.clone();
    let mut derived = Vec::new();
    let mut rounds = 0;
    loop {
        let a = analyse(&out, &engine, bound)?;
        let added = derive(&mut out, &a, bound);
        rounds += 1;
        if added.is_empty() {
            let mut rep = report(&out, a, bound, derived);
            rep.trace.push(format!("completion: {rounds} rounds"));
            return Ok((out, rep));
        }
        derived.extend(added);
    }
}

/// Re-checks a derived rule's certificate: it must have no member completion.
pub fn verify_derived(s: &TypeSchema, d: &DerivedRule) -> Result<bool> {
    let engine = s.engine()?;
    let st = PartialStructure::from_dto(s.theory.signature.clone(), &d.certificate)?;
    Ok(!engine.is_consistent(&st)?)
}
