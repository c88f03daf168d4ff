//! User scenario files (TOML).
//!
//! ```toml
//! name = "rg-check"
//! theory = "random-graph"      # built-in name or path to a .thy file
//! schemas = "types.sch"        # optional; defaults to the built-in schemas
//!
//! [[claim]]
//! kind = "refute-all"          # domination | equidominance | refute-all
//!                              # | refute-all-equidominance | weakly-orthogonal
//! left = "p"
//! right = "q"
//! base = 1
//! expect = "refuted"           # entailed | refuted
//! ```

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, bail, Context as _, Result};
use serde::Deserialize;
use tamedom_core::builtins::{self, COMPLETION_BOUND};
use tamedom_core::domination::{
    search_equidominance_witness, search_witness, AmalgamBackend, CheckOptions, OrderBackend, SearchOutcome,
};
use tamedom_core::logic::{parse_theory, Backend, TheorySpec};
use tamedom_core::schema::{complete_schema, parse_schema_file, SchemaItem};

use crate::context::Budgets;
use crate::monoid::Algebra;
use crate::report::{Bounded, Claim, Evidence, Report};
use crate::scenario::{bounded_note, check_cap_arity, evidence_of, options, refute_claim};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub theory: String,
    pub schemas: Option<String>,
    #[serde(default, rename = "claim")]
    pub claims: Vec<ClaimSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimKind {
    Domination,
    Equidominance,
    RefuteAll,
    RefuteAllEquidominance,
    WeaklyOrthogonal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expect {
    Entailed,
    Refuted,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimSpec {
    pub kind: ClaimKind,
    pub left: String,
    pub right: String,
    pub base: Option<usize>,
    pub expect: Option<Expect>,
}

pub fn is_scenario_file(name: &str) -> bool {
    name.ends_with(".toml") && Path::new(name).is_file()
}

fn resolve(dir: &Path, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        dir.join(p)
    }
}

/// A theory by built-in name or file path.
pub fn load_theory(spec: &str, dir: &Path) -> Result<Arc<TheorySpec>> {
    if builtins::theory_source(spec).is_some() {
        return Ok(builtins::theory(spec)?);
    }
    let path = resolve(dir, spec);
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading theory {}", path.display()))?;
    Ok(Arc::new(
        parse_theory(&text).with_context(|| format!("parsing theory {}", path.display()))?,
    ))
}

/// Parses a schema file over `theory`, completing rule schemas at the same
/// bound as the built-ins.
pub fn load_schemas(text: &str, theory: &Arc<TheorySpec>) -> Result<Vec<SchemaItem>> {
    let items = parse_schema_file(text, &|n| {
        if n.eq_ignore_ascii_case(&theory.name) {
            Ok(theory.clone())
        } else {
            builtins::theory(n)
        }
    })?;
    items
        .into_iter()
        .map(|item| match item {
            SchemaItem::Type(t) => {
                let (done, rep) = complete_schema(&t, COMPLETION_BOUND)?;
                if !rep.passed() {
                    bail!("schema `{}` does not validate: {:?}", t.name, rep.failures);
                }
                Ok(SchemaItem::Type(done))
            }
            order => Ok(order),
        })
        .collect()
}

pub fn run_file(path: &Path, budgets: &Budgets, cap: usize) -> Result<Report> {
    let start = Instant::now();
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: ScenarioFile = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let theory = load_theory(&file.theory, dir)?;
    let items = match &file.schemas {
        Some(s) => {
            let p = resolve(dir, s);
            let t = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
            load_schemas(&t, &theory).with_context(|| format!("schemas in {}", p.display()))?
        }
        None => builtins::schemas(&file.theory)?,
    };
    if file.claims.is_empty() {
        bail!("{} has no [[claim]] entries", path.display());
    }
    let mut report = Report::new(&file.name);
    for (i, spec) in file.claims.iter().enumerate() {
        let find = |n: &str| {
            items
                .iter()
                .find(|s| s.name() == n)
                .cloned()
                .ok_or_else(|| anyhow!("claim {i}: unknown schema `{n}`"))
        };
        let claim = match (&theory.backend, find(&spec.left)?, find(&spec.right)?) {
            (Backend::Amalgamation, SchemaItem::Type(l), SchemaItem::Type(r)) => {
                let be = AmalgamBackend::new(theory.clone())?.with_point_cap(cap);
                check_cap_arity(cap, spec.base.unwrap_or(1), l.constants.len() + r.constants.len(), l.arity() + r.arity(), r.max_wildcards().max(l.max_wildcards()))?;
                user_claim(&mut report, &be, &l, &r, spec, budgets, i)?
            }
            (Backend::DenseOrder(_), SchemaItem::Order(l), SchemaItem::Order(r)) => {
                user_claim(&mut report, &OrderBackend, &l, &r, spec, budgets, i)?
            }
            _ => bail!("claim {i}: schema kinds do not match the theory backend"),
        };
        report.push(claim);
    }
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

fn user_claim<B: Algebra>(
    report: &mut Report,
    b: &B,
    p: &B::Schema,
    q: &B::Schema,
    spec: &ClaimSpec,
    budgets: &Budgets,
    i: usize,
) -> Result<Claim> {
    let base = budgets.base.or(spec.base).unwrap_or(1);
    let opts: CheckOptions = options(budgets, None);
    let param = opts.param_budget.unwrap_or(2);
    let anchor = format!("user.{i}");
    let statement = format!("{:?} `{}` vs `{}`", spec.kind, b.name(p), b.name(q));
    let ctx = b.context(p, q)?;
    let default_expect = match spec.kind {
        ClaimKind::RefuteAll | ClaimKind::RefuteAllEquidominance => Expect::Refuted,
        _ => Expect::Entailed,
    };
    let expect = spec.expect.unwrap_or(default_expect);
    let expected = match expect {
        Expect::Entailed => "entailed",
        Expect::Refuted => "refuted",
    };
    let (entailed, certificates, notes) = match spec.kind {
        ClaimKind::RefuteAll | ClaimKind::RefuteAllEquidominance => {
            let equi = spec.kind == ClaimKind::RefuteAllEquidominance;
            let (c, rep) = refute_claim(report, b, ctx, p, q, base, param, &opts, equi, &anchor, &statement)?;
            (!rep.all_refuted(), c.certificates, c.notes)
        }
        ClaimKind::Domination | ClaimKind::Equidominance => {
            let ci = report.context(ctx);
            let found = if spec.kind == ClaimKind::Domination {
                search_witness(b, p, q, base, &opts)?
            } else {
                search_equidominance_witness(b, p, q, base, &opts)?
            };
            match found {
                SearchOutcome::Found { witness, .. } => {
                    let v = b.check_domination(p, q, &witness, &opts)?;
                    let mut ev = evidence_of(ci, false, &witness, &v)?;
                    if spec.kind == ClaimKind::Equidominance {
                        let sw = b.swap(&witness);
                        let v = b.check_domination(q, p, &sw, &opts)?;
                        ev.extend(evidence_of(ci, true, &sw, &v)?);
                    }
                    (true, ev, vec![])
                }
                SearchOutcome::Exhausted { candidates, .. } => (
                    false,
                    Vec::new(),
                    vec![format!("no witness among {candidates} candidates"), bounded_note(base)],
                ),
            }
        }
        ClaimKind::WeaklyOrthogonal => {
            let ci = report.context(ctx);
            let v = b.weakly_orthogonal(p, q, param)?;
            let ev = v
                .certificates()
                .into_iter()
                .map(|c| Evidence::Orthogonality {
                    context: ci,
                    certificate: c.clone(),
                })
                .collect();
            (v.is_entailed(), ev, vec![])
        }
    };
    let got = if entailed { "entailed" } else { "refuted" };
    Ok(Claim {
        paper_anchor: anchor,
        statement,
        expected: expected.into(),
        verdict: got.into(),
        pass: got == expected,
        bounded: Some(Bounded { base, param }),
        notes,
        details: serde_json::Value::Null,
        certificates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_claims() {
        let f: ScenarioFile = toml::from_str(
            "name = \"x\"\ntheory = \"random-graph\"\n[[claim]]\nkind = \"refute-all-equidominance\"\nleft = \"p\"\nright = \"q\"\n",
        )
        .unwrap();
        assert_eq!(f.claims.len(), 1);
        assert_eq!(f.claims[0].kind, ClaimKind::RefuteAllEquidominance);
        assert_eq!(f.claims[0].expect, None);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let r: std::result::Result<ScenarioFile, _> =
            toml::from_str("name = \"x\"\ntheory = \"DLO\"\nextra = 1\n");
        assert!(r.is_err());
    }

    #[test]
    fn user_schemas_are_completed() {
        let th = builtins::theory("counterexample").unwrap();
        let items = load_schemas(
            "type p over counterexample vars x\nR2(x,*) := true\nR3(x,*,*) := false\n",
            &th,
        )
        .unwrap();
        let SchemaItem::Type(t) = &items[0] else { panic!() };
        assert!(t.families.len() > 2);
    }
}
