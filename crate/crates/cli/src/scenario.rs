//! Built-in scenarios. Each reproduces one published claim and records the
//! certificates behind it.

use std::str::FromStr;
use std::time::Instant;

use anyhow::{anyhow, bail, Context as _, Result};
use tamedom_core::builtins::{self, cut_type, type_schema};
use tamedom_core::domination::{
    check_domination, check_equidominance, refute_all_equidominance, refute_all_witnesses,
    search_equidominance_witness, AmalgamBackend, AmalgamWitness, Certificate, CheckOptions,
    DominationBackend, OrderBackend, RefutationReport, SearchOutcome, Verdict,
};
use tamedom_core::logic::{Literal, Pred};
use tamedom_core::order::{class_invariant, cut_power, cut_tensor, CutType};
use tamedom_core::schema::{rename, tensor, TypeSchema};

use crate::context::{Budgets, Context};
use crate::monoid::{matches_model, monoid_table, Algebra, MonoidTable};
use crate::report::{Bounded, Claim, Evidence, Report};

pub const SCENARIOS: [&str; 6] = [
    "counterexample-wd",
    "random-graph-noncomm",
    "dlop-invbar-noncomm",
    "monoid-equality",
    "monoid-dlo",
    "monoid-equivalence",
];

pub fn run_scenario(name: &str, budgets: &Budgets, cap: usize) -> Result<Report> {
    let start = Instant::now();
    let mut report = match name {
        "counterexample-wd" => counterexample(budgets, cap)?,
        "random-graph-noncomm" => random_graph(budgets, cap)?,
        "dlop-invbar-noncomm" => dlop(budgets)?,
        "monoid-equality" => monoid_equality(budgets, cap)?,
        "monoid-dlo" => monoid_dlo(budgets)?,
        "monoid-equivalence" => monoid_equivalence(budgets, cap)?,
        file if crate::userfile::is_scenario_file(file) => {
            return crate::userfile::run_file(std::path::Path::new(file), budgets, cap)
        }
        other => bail!(
            "unknown scenario `{other}`; built-in scenarios are {}",
            SCENARIOS.join(", ")
        ),
    };
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

pub(crate) fn options(b: &Budgets, focus: Option<&str>) -> CheckOptions {
    CheckOptions {
        param_budget: b.param,
        probes: b.probes.unwrap_or(2),
        focus: focus.map(str::to_string),
    }
}

/// Refuses runs whose cores could exceed the point cap.
pub(crate) fn check_cap(cap: usize, base: usize, p: &TypeSchema, q: &TypeSchema, param: usize) -> Result<()> {
    check_cap_arity(cap, base, p.constants.len() + q.constants.len(), p.arity() + q.arity(), param)
        .with_context(|| format!("`{}` vs `{}`", p.name, q.name))
}

pub(crate) fn check_cap_arity(cap: usize, base: usize, consts: usize, arity: usize, param: usize) -> Result<()> {
    let needed = consts + base + arity + param;
    if needed > cap {
        bail!("cores need up to {needed} points; the cap is {cap} (TAMEDOM_HARD_CAP_POINTS)");
    }
    Ok(())
}

pub(crate) fn param_of(opts: &CheckOptions, goal_max: usize) -> usize {
    opts.param_budget.unwrap_or(goal_max).min(goal_max)
}

/// Evidence for one verdict.
pub(crate) fn evidence_of<W: serde::Serialize>(ctx: usize, reversed: bool, w: &W, v: &Verdict) -> Result<Vec<Evidence>> {
    let witness = serde_json::to_value(w)?;
    let probes = match v {
        Verdict::Refuted { probes, .. } => probes.clone(),
        _ => None,
    };
    Ok(v
        .certificates()
        .into_iter()
        .map(|c| Evidence::Domination {
            context: ctx,
            reversed,
            witness: witness.clone(),
            certificate: c.clone(),
            probes: probes.clone(),
        })
        .collect())
}

pub(crate) fn bounded_note(base: usize) -> String {
    format!("verified for witness bases with at most {base} points beyond the named constants")
}

fn probes_ok(v: &Verdict) -> bool {
    match v {
        Verdict::Refuted { probes, .. } => probes.as_ref().map_or(true, |p| p.passed),
        _ => true,
    }
}

/// Claim that every witness over bases up to `base` fails (in one
/// direction, or for equidominance in at least one of the two).
#[allow(clippy::too_many_arguments)]
pub(crate) fn refute_claim<B: DominationBackend>(
    report: &mut Report,
    b: &B,
    ctx: Context,
    p: &B::Schema,
    q: &B::Schema,
    base: usize,
    param: usize,
    opts: &CheckOptions,
    equi: bool,
    anchor: &str,
    statement: &str,
) -> Result<(Claim, RefutationReport<B::Witness>)> {
    let ci = report.context(ctx);
    let rep = if equi {
        refute_all_equidominance(b, p, q, base, opts)?
    } else {
        refute_all_witnesses(b, p, q, base, opts)?
    };
    let mut certificates = Vec::new();
    let mut probes_pass = true;
    for c in &rep.candidates {
        let w = if c.reversed { b.swap(&c.witness) } else { c.witness.clone() };
        certificates.extend(evidence_of(ci, c.reversed, &w, &c.verdict)?);
        probes_pass &= probes_ok(&c.verdict);
    }
    let all = rep.all_refuted() && rep.count() > 0;
    let mut notes = vec![
        bounded_note(base),
        format!("{} witness candidates checked", rep.count()),
    ];
    if !probes_pass {
        notes.push("a probe extension of some counter was inconsistent".into());
    }
    let claim = Claim {
        paper_anchor: anchor.into(),
        statement: statement.into(),
        expected: "refuted for every candidate".into(),
        verdict: if all {
            "refuted for every candidate".into()
        } else {
            format!(
                "{} of {} candidates refuted",
                rep.candidates.iter().filter(|c| c.verdict.is_refuted()).count(),
                rep.count()
            )
        },
        pass: all && probes_pass,
        bounded: Some(Bounded { base, param }),
        notes,
        details: serde_json::Value::Null,
        certificates,
    };
    Ok((claim, rep))
}

fn equi_claim<B: DominationBackend>(
    report: &mut Report,
    b: &B,
    ctx: Context,
    p: &B::Schema,
    q: &B::Schema,
    w: &B::Witness,
    opts: &CheckOptions,
    bounded: Bounded,
    anchor: &str,
    statement: &str,
) -> Result<Claim> {
    let ci = report.context(ctx);
    let v = check_equidominance(b, p, q, w, opts)?;
    let mut certificates = evidence_of(ci, false, w, &v.forward)?;
    certificates.extend(evidence_of(ci, true, &b.swap(w), &v.backward)?);
    Ok(Claim {
        paper_anchor: anchor.into(),
        statement: statement.into(),
        expected: "entailed in both directions".into(),
        verdict: format!("forward {}, backward {}", v.forward.name(), v.backward.name()),
        pass: v.is_entailed(),
        bounded: Some(bounded),
        notes: Vec::new(),
        details: serde_json::Value::Null,
        certificates,
    })
}

fn counterexample(bud: &Budgets, cap: usize) -> Result<Report> {
    let mut report = Report::new("counterexample-wd");
    let theory = builtins::theory("counterexample")?;
    let be = AmalgamBackend::new(theory.clone())?.with_point_cap(cap);
    let p = type_schema("counterexample", "p")?;
    let q0 = type_schema("counterexample", "q0")?;
    let q1 = type_schema("counterexample", "q1")?;
    let base = bud.base.unwrap_or(1);
    let opts = options(bud, Some("R3"));

    // q0 and q1 share a witness over the empty base.
    let param = param_of(&opts, q0.max_wildcards().max(q1.max_wildcards()));
    check_cap(cap, 0, &q0, &q1, param)?;
    let SearchOutcome::Found { witness, .. } = search_equidominance_witness(&be, &q0, &q1, 0, &opts)? else {
        bail!("no shared witness for q0 and q1 over the empty base");
    };
    let mut claim = equi_claim(
        &mut report,
        &be,
        Context::new(&theory, &q0, &q1),
        &q0,
        &q1,
        &witness,
        &opts,
        Bounded { base: 0, param },
        "counterexample.q0-equidominant-q1",
        "q0 and q1 are equidominant via the witness identifying y with z0",
    )?;
    let merged = witness.merges == [("y".to_string(), "z0".to_string())];
    claim.pass &= merged;
    claim.notes.push(format!("witness merges {:?}", witness.merges));
    report.push(claim);

    // p(x)q0(y) does not dominate p(w)q1(z0,z1).
    let pq0 = tensor(&p, &q0)?;
    let pw = rename(&p, &|_| "w".into());
    let pq1 = tensor(&pw, &q1)?;
    let param = param_of(&opts, pq1.max_wildcards());
    check_cap(cap, base, &pq0, &pq1, param)?;
    let (mut claim, rep) = refute_claim(
        &mut report,
        &be,
        Context::new(&theory, &pq0, &pq1),
        &pq0,
        &pq1,
        base,
        param,
        &opts,
        false,
        "counterexample.product-not-dominating",
        "p(x)q0(y) does not dominate p(w)q1(z0,z1)",
    )?;
    let bad = rep.candidates.iter().filter(|c| !r3_counter(&pq1, &c.witness, &c.verdict)).count();
    if bad > 0 {
        claim.pass = false;
        claim.notes.push(format!("{bad} counters do not make R3(w,z_i,a) true"));
    } else {
        claim.notes.push("every counter makes R3(w,z_i,a) true for a fresh a".into());
    }
    report.push(claim);
    Ok(report)
}

/// The counter makes `R3(w, z_i, a)` true with `a` fresh.
fn r3_counter(goal: &TypeSchema, w: &AmalgamWitness, v: &Verdict) -> bool {
    let Verdict::Refuted {
        counter: Certificate::Counter { target, identified: None, .. },
        ..
    } = v
    else {
        return false;
    };
    let Ok(lit) = Literal::from_str(target) else {
        return false;
    };
    let name_of = |var: &str| {
        goal.var_index(var)
            .map(|i| w.structure.point(w.right_points[i]).id.clone())
    };
    let (Some(wn), Some(z0), Some(z1)) = (name_of("w"), name_of("z0"), name_of("z1")) else {
        return false;
    };
    lit.pred == Pred::Rel("R3".into())
        && !lit.positive
        && lit.args.contains(&wn)
        && (lit.args.contains(&z0) || lit.args.contains(&z1))
        && lit.args.iter().any(|a| w.structure.point_index(a).is_none())
}

fn tensor_claim(
    report: &mut Report,
    p: &TypeSchema,
    q: &TypeSchema,
    literal: &str,
    anchor: &str,
    statement: &str,
) -> Result<Claim> {
    let ci = report.context(Context::new(&p.theory, p, q));
    let prod = tensor(p, q)?;
    let real = prod.realize(&prod.constant_skeleton()?)?;
    let holds = real.structure.holds(&Literal::from_str(literal)?)? == Some(true);
    Ok(Claim {
        paper_anchor: anchor.into(),
        statement: statement.into(),
        expected: format!("internal literal {literal}"),
        verdict: if holds {
            format!("internal literal {literal}")
        } else {
            format!("{literal} does not hold")
        },
        pass: holds,
        bounded: None,
        notes: vec![format!("product schema:\n{prod}")],
        details: serde_json::Value::Null,
        certificates: vec![Evidence::TensorInternal {
            context: ci,
            literal: literal.into(),
        }],
    })
}

/// For every candidate leaving a goal coordinate `v` unmerged, the premise
/// and witness leave each binary atom between `v` and a fresh point open:
/// both values are consistent.
fn degenerate_claim(
    report: &mut Report,
    be: &AmalgamBackend,
    ctx: Context,
    premise: &TypeSchema,
    goal: &TypeSchema,
    rep: &RefutationReport<AmalgamWitness>,
    anchor: &str,
) -> Result<Claim> {
    let ci = report.context(ctx);
    let sig = goal.theory.signature.clone();
    let mut certificates = Vec::new();
    let mut checked = 0;
    let mut failures = Vec::new();
    for c in &rep.candidates {
        let w = &c.witness;
        let Some(&vp) = be.unmerged_points(goal, w).first() else {
            continue;
        };
        checked += 1;
        if !c.verdict.is_refuted() {
            failures.push(format!("{:?}: not refuted", w.merges));
        }
        for (core, fresh) in be.premise_cores(premise, goal, w, 1)? {
            for rel in sig.ids().filter(|&r| sig.arity(r) == 2) {
                let t = [vp, fresh[0]];
                let atom = core.atom_name(rel, &t);
                let mut open = core.get(rel, &t).is_none();
                for v in [false, true] {
                    let mut s = core.clone();
                    s.set(rel, &t, Some(v));
                    open &= be.engine().is_consistent(&s)?;
                }
                if !open {
                    failures.push(format!("{:?}: {atom} is not open", w.merges));
                }
                certificates.push(Evidence::Undetermined {
                    context: ci,
                    core: core.to_dto(),
                    atom,
                });
            }
        }
    }
    let pass = failures.is_empty() && checked > 0;
    Ok(Claim {
        paper_anchor: anchor.into(),
        statement: "every candidate leaving a goal coordinate unmerged is refuted and leaves its edges to a fresh point open".into(),
        expected: "holds".into(),
        verdict: if pass { "holds".into() } else { "fails".into() },
        pass,
        bounded: Some(Bounded {
            base: rep.base_budget,
            param: 1,
        }),
        notes: [format!("{checked} candidates checked"), bounded_note(rep.base_budget)]
            .into_iter()
            .chain(failures.into_iter().take(5))
            .collect(),
        details: serde_json::Value::Null,
        certificates,
    })
}

fn random_graph(bud: &Budgets, cap: usize) -> Result<Report> {
    let mut report = Report::new("random-graph-noncomm");
    let theory = builtins::theory("random-graph")?;
    let be = AmalgamBackend::new(theory.clone())?.with_point_cap(cap);
    let p = type_schema("random-graph", "p")?;
    let q = type_schema("random-graph", "q")?;
    let base = bud.base.unwrap_or(1);
    let opts = options(bud, None);

    let c = tensor_claim(
        &mut report,
        &p,
        &q,
        "!E(x,y)",
        "random-graph.product-pq",
        "p(x)q(y) has no edge between x and y",
    )?;
    report.push(c);
    let c = tensor_claim(
        &mut report,
        &q,
        &p,
        "E(y,x)",
        "random-graph.product-qp",
        "q(y)p(x) has an edge between y and x",
    )?;
    report.push(c);

    let pq = tensor(&p, &q)?;
    let qv = rename(&q, &|_| "v".into());
    let pu = rename(&p, &|_| "u".into());
    let qp = tensor(&qv, &pu)?;
    for (a, b, anchor, st) in [
        (&pq, &qp, "random-graph.pq-not-dominating-qp", "p(x)q(y) does not dominate q(v)p(u)"),
        (&qp, &pq, "random-graph.qp-not-dominating-pq", "q(v)p(u) does not dominate p(x)q(y)"),
    ] {
        let param = param_of(&opts, b.max_wildcards());
        check_cap(cap, base, a, b, param)?;
        let ctx = Context::new(&theory, a, b);
        let (claim, rep) = refute_claim(&mut report, &be, ctx.clone(), a, b, base, param, &opts, false, anchor, st)?;
        report.push(claim);
        let d = degenerate_claim(&mut report, &be, ctx, a, b, &rep, &format!("{anchor}.degenerate"))?;
        report.push(d);
    }
    let pu = rename(&p, &|_| "u".into());
    for (a, b, anchor, st) in [
        (&p, &qv, "random-graph.no-edges-not-dominating-all-edges", "p(x) does not dominate q(v)"),
        (&qv, &pu, "random-graph.all-edges-not-dominating-no-edges", "q(v) does not dominate p(u)"),
    ] {
        let param = param_of(&opts, b.max_wildcards());
        check_cap(cap, base, a, b, param)?;
        let (claim, _) = refute_claim(&mut report, &be, Context::new(&theory, a, b), a, b, base, param, &opts, false, anchor, st)?;
        report.push(claim);
    }
    Ok(report)
}

fn order_witness(
    b: &OrderBackend,
    p: &CutType,
    q: &CutType,
    blocks: &[&[&str]],
) -> Result<tamedom_core::domination::OrderWitness> {
    b.witnesses(p, q, 0)?
        .into_iter()
        .find(|w| {
            w.blocks.len() == blocks.len()
                && w.blocks.iter().zip(blocks).all(|(x, y)| x.iter().map(String::as_str).eq(y.iter().copied()))
        })
        .ok_or_else(|| anyhow!("no witness with blocks {blocks:?} for `{}` and `{}`", p.name, q.name))
}

fn order_context(p: &CutType, q: &CutType) -> Result<Context> {
    OrderBackend.context(p, q)
}

fn dlop(bud: &Budgets) -> Result<Report> {
    let mut report = Report::new("dlop-invbar-noncomm");
    let ob = OrderBackend;
    let p = cut_type("DLOP", "p")?;
    let q = cut_type("DLOP", "q")?;
    let base = bud.base.unwrap_or(2);
    let opts = options(bud, None);
    let bounded0 = Bounded { base: 0, param: 1 };

    // p and q dominate each other with different witnesses.
    let ctx = report.context(order_context(&p, &q)?);
    let fw = order_witness(&ob, &p, &q, &[&["x"], &["y"]])?;
    let bw = order_witness(&ob, &q, &p, &[&["y"], &["x"]])?;
    let vf = check_domination(&ob, &p, &q, &fw, &opts)?;
    let vb = check_domination(&ob, &q, &p, &bw, &opts)?;
    let mut certificates = evidence_of(ctx, false, &fw, &vf)?;
    certificates.extend(evidence_of(ctx, true, &bw, &vb)?);
    report.push(Claim {
        paper_anchor: "dlop.domination-equivalent".into(),
        statement: "p dominates q with a witness containing y > x, and q dominates p with one containing y < x".into(),
        expected: "entailed in both directions".into(),
        verdict: format!("forward {}, backward {}", vf.name(), vb.name()),
        pass: vf.is_entailed() && vb.is_entailed(),
        bounded: Some(bounded0.clone()),
        notes: Vec::new(),
        details: serde_json::Value::Null,
        certificates,
    });

    // No shared witness.
    let (claim, _) = refute_claim(
        &mut report,
        &ob,
        order_context(&p, &q)?,
        &p,
        &q,
        base,
        1,
        &opts,
        true,
        "dlop.not-equidominant",
        "p and q are not equidominant",
    )?;
    report.push(claim);

    // Products absorb their left factor up to equidominance.
    let qz = q.rename(&|_| "z".into());
    let pz = p.rename(&|_| "z".into());
    let pq = cut_tensor(&p, &q)?;
    let qp = cut_tensor(&q, &p)?;
    let w = order_witness(&ob, &pq, &qz, &[&["y", "z"], &["x"]])?;
    let c = equi_claim(
        &mut report,
        &ob,
        order_context(&pq, &qz)?,
        &pq,
        &qz,
        &w,
        &opts,
        bounded0.clone(),
        "dlop.pq-equidominant-q",
        "p(x)q(y) and q(z) are equidominant via y = z",
    )?;
    report.push(c);
    let w = order_witness(&ob, &qp, &pz, &[&["x", "z"], &["y"]])?;
    let c = equi_claim(
        &mut report,
        &ob,
        order_context(&qp, &pz)?,
        &qp,
        &pz,
        &w,
        &opts,
        bounded0,
        "dlop.qp-equidominant-p",
        "q(y)p(x) and p(z) are equidominant via x = z",
    )?;
    report.push(c);

    // Class invariants.
    let inv = |c: &CutType| class_invariant(c).into_iter().collect::<Vec<_>>();
    let ci = report.context(order_context(&p, &q)?);
    report.push(Claim {
        paper_anchor: "dlop.class-invariants".into(),
        statement: "p and q sit in the same cut with different predicate bits".into(),
        expected: "distinct invariants".into(),
        verdict: format!("{:?} vs {:?}", inv(&p), inv(&q)),
        pass: inv(&p) != inv(&q),
        bounded: None,
        notes: Vec::new(),
        details: serde_json::Value::Null,
        certificates: vec![Evidence::ClassInvariant {
            context: ci,
            left: inv(&p),
            right: inv(&q),
        }],
    });
    let d = cut_type("DLO", "p")?;
    let d2 = cut_power(&d, 2)?;
    let ci = report.context(order_context(&d2, &d)?);
    report.push(Claim {
        paper_anchor: "dlo.square-class".into(),
        statement: "the square of the type at plus infinity has the same class invariant".into(),
        expected: "equal invariants".into(),
        verdict: format!("{:?} vs {:?}", inv(&d2), inv(&d)),
        pass: inv(&d2) == inv(&d),
        bounded: None,
        notes: Vec::new(),
        details: serde_json::Value::Null,
        certificates: vec![Evidence::ClassInvariant {
            context: ci,
            left: inv(&d2),
            right: inv(&d),
        }],
    });
    Ok(report)
}

fn table_claim(
    report: &mut Report,
    table: &MonoidTable,
    evidence: Vec<crate::monoid::CellEvidence>,
    verdict: Result<(), String>,
    anchor: &str,
    statement: &str,
    expected: &str,
    param: usize,
) -> Result<Claim> {
    let mut certificates = Vec::new();
    for e in evidence {
        let ci = report.context(e.context);
        certificates.push(Evidence::Domination {
            context: ci,
            reversed: false,
            witness: e.witness,
            certificate: e.certificate,
            probes: None,
        });
    }
    Ok(Claim {
        paper_anchor: anchor.into(),
        statement: statement.into(),
        expected: expected.into(),
        verdict: match &verdict {
            Ok(()) => expected.into(),
            Err(e) => e.clone(),
        },
        pass: verdict.is_ok(),
        bounded: Some(Bounded {
            base: table.base_budget,
            param,
        }),
        notes: vec![bounded_note(table.base_budget), table.render()],
        details: serde_json::to_value(table)?,
        certificates,
    })
}

fn monoid_equality(bud: &Budgets, cap: usize) -> Result<Report> {
    let mut report = Report::new("monoid-equality");
    let theory = builtins::theory("equality")?;
    let be = AmalgamBackend::new(theory)?.with_point_cap(cap);
    let factors: Vec<TypeSchema> = ["c", "t1", "t2", "t3"]
        .iter()
        .map(|n| type_schema("equality", n))
        .collect::<Result<_, _>>()?;
    let base = bud.base.unwrap_or(1);
    let opts = options(bud, None);
    let dims: Vec<usize> = factors.iter().map(|f| f.non_realised().len()).collect();
    let mut ev = Vec::new();
    let table = monoid_table(&be, &factors, 3, base, &opts, Some(&mut ev))?;
    let label = |w: &[usize]| w.iter().map(|&f| dims[f]).sum::<usize>();
    let verdict = matches_model(&table, &label, &|a, b| a >= b, &|a, b| a + b);
    let c = table_claim(
        &mut report,
        &table,
        ev,
        verdict,
        "equality.monoid",
        "classes of tensor words over the equality types are counted by non-realised coordinates",
        "matches (N, +, >=) truncated at total arity 3",
        2,
    )?;
    report.push(c);
    Ok(report)
}

fn monoid_dlo(bud: &Budgets) -> Result<Report> {
    let mut report = Report::new("monoid-dlo");
    let factors = vec![cut_type("DLO", "p1")?, cut_type("DLO", "p2")?];
    let base = bud.base.unwrap_or(1);
    let opts = options(bud, None);
    let invs: Vec<_> = factors.iter().map(class_invariant).collect();
    let mut ev = Vec::new();
    let table = monoid_table(&OrderBackend, &factors, 3, base, &opts, Some(&mut ev))?;
    let label = |w: &[usize]| w.iter().flat_map(|&f| invs[f].iter().cloned()).collect::<std::collections::BTreeSet<_>>();
    let verdict = matches_model(&table, &label, &|a, b| a.is_superset(b), &|a, b| a.union(b).cloned().collect());
    let c = table_claim(
        &mut report,
        &table,
        ev,
        verdict,
        "dlo.monoid",
        "classes of tensor words over the two cut types are their sets of cuts",
        "matches finite subsets of cuts under union, ordered by inclusion",
        1,
    )?;
    report.push(c);
    Ok(report)
}

fn monoid_equivalence(bud: &Budgets, cap: usize) -> Result<Report> {
    let mut report = Report::new("monoid-equivalence");
    let theory = builtins::theory("equivalence")?;
    let be = AmalgamBackend::new(theory)?.with_point_cap(cap);
    let factors = vec![type_schema("equivalence", "new")?, type_schema("equivalence", "inb")?];
    let base = bud.base.unwrap_or(1);
    let opts = options(bud, None);
    let mut ev = Vec::new();
    let table = monoid_table(&be, &factors, 3, base, &opts, Some(&mut ev))?;
    let label = |w: &[usize]| {
        let mut v = [0usize; 2];
        for &f in w {
            v[f] += 1;
        }
        v
    };
    let verdict = matches_model(
        &table,
        &label,
        &|a, b| a[0] >= b[0] && a[1] >= b[1],
        &|a, b| [a[0] + b[0], a[1] + b[1]],
    );
    let c = table_claim(
        &mut report,
        &table,
        ev,
        verdict,
        "equivalence.monoid",
        "classes of tensor words over `new class` and `new point in the class of b` count each kind",
        "matches N (+) N componentwise, truncated at total arity 3",
        2,
    )?;
    report.push(c);
    Ok(report)
}
