use tamedom_core::amalgam::AmalgamEngine;
use tamedom_core::builtins;
use tamedom_core::logic::{Literal, PartialStructure, Point, PointKind};
use tamedom_core::schema::{
    complete_schema, normalize, parse_schema, power, rename, tensor, validate_schema,
    verify_derived, TypeSchema,
};

const BOUND: usize = 2;

fn ty(theory: &str, name: &str) -> TypeSchema {
    builtins::type_schema(theory, name).unwrap()
}

/// A member on the named points, completed false-first.
fn params(theory: &str, ids: &[&str]) -> PartialStructure {
    let th = builtins::theory(theory).unwrap();
    let points = ids.iter().map(|i| Point::new(*i, PointKind::FreshParameter)).collect();
    let s = PartialStructure::with_points(th.signature.clone(), points).unwrap();
    AmalgamEngine::new(th).unwrap().consistent(&s).unwrap().unwrap().structure
}

fn has(lits: &std::collections::BTreeSet<Literal>, rel: &str, args: &[&str], positive: bool) -> bool {
    lits.contains(&Literal::rel(rel, args, positive))
}

#[test]
fn builtin_schemas_validate() {
    for (t, n) in [("counterexample", "p"), ("counterexample", "q0"), ("counterexample", "q1"), ("random-graph", "p"), ("random-graph", "q")] {
        let rep = validate_schema(&ty(t, n), BOUND).unwrap();
        assert!(rep.passed(), "{t}/{n}: {:?}", rep.failures);
    }
}

#[test]
fn missing_rule_is_derived() {
    let th = builtins::theory("counterexample").unwrap();
    let partial = parse_schema(
        "type p over counterexample vars x\nR2(x,*) := true\nR3(x,*,*) := false\n",
        &th,
    )
    .unwrap();
    assert!(!validate_schema(&partial, BOUND).unwrap().passed());
    let (done, rep) = complete_schema(&partial, BOUND).unwrap();
    assert!(rep.passed(), "{:?}", rep.failures);
    assert!(!rep.derived.is_empty());
    assert!(rep.derived.iter().any(|d| d.rule.starts_with("E(")), "{:?}", rep.derived);
    for d in &rep.derived {
        assert!(verify_derived(&partial, d).unwrap(), "{}", d.rule);
    }
    // The completed schema puts x outside every E-class.
    let lits = done.restrict(&params("counterexample", &["a"])).unwrap();
    assert!(has(&lits, "E", &["x", "a"], false));
}

#[test]
fn restriction_of_p() {
    let lits = ty("counterexample", "p").restrict(&params("counterexample", &["a", "b"])).unwrap();
    assert!(has(&lits, "E", &["x", "a"], false));
    assert!(has(&lits, "R2", &["x", "b"], true));
    assert!(has(&lits, "R2", &["b", "x"], true));
    assert!(has(&lits, "R3", &["x", "a", "b"], false));
    // Nothing about the parameters alone.
    assert!(!lits.iter().any(|l| l.to_string().contains("(a,b)")));
}

#[test]
fn restriction_of_q1() {
    let lits = ty("counterexample", "q1").restrict(&params("counterexample", &["a"])).unwrap();
    assert!(has(&lits, "E", &["z0", "z1"], true));
    assert!(has(&lits, "R2", &["z0", "a"], false));
    // z1 shares z0's class, so it follows z0 by equivariance.
    assert!(has(&lits, "R2", &["z1", "a"], false));
    assert!(lits.contains(&Literal::eq("z0", "z1", false)));
}

#[test]
fn p_times_q0() {
    let th = builtins::theory("counterexample").unwrap();
    let pq = tensor(&ty("counterexample", "p"), &ty("counterexample", "q0")).unwrap();
    assert_eq!(pq.vars, ["x", "y"]);
    let (e, r2) = (th.rel("E").unwrap(), th.rel("R2").unwrap());
    assert_eq!(pq.internal_value(r2, &[0, 1]), Some(true));
    assert_eq!(pq.internal_value(e, &[0, 1]), Some(false));
    let lits = pq.restrict(&params("counterexample", &["a"])).unwrap();
    assert!(has(&lits, "R3", &["x", "y", "a"], false));
    assert!(has(&lits, "R2", &["y", "a"], false));
    assert!(validate_schema(&pq, BOUND).unwrap().passed());
}

#[test]
fn random_graph_pair_does_not_commute() {
    let th = builtins::theory("random-graph").unwrap();
    let e = th.rel("E").unwrap();
    let (p, q) = (ty("random-graph", "p"), ty("random-graph", "q"));
    // The left factor is realized last and sees the right one.
    assert_eq!(tensor(&p, &q).unwrap().internal_value(e, &[0, 1]), Some(false));
    assert_eq!(tensor(&q, &p).unwrap().internal_value(e, &[0, 1]), Some(true));
}

#[test]
fn realised_factor_is_absorbed() {
    let c = ty("random-graph", "c");
    let p = rename(&ty("random-graph", "p"), &|_| "y".into());
    let cp = tensor(&c, &p).unwrap();
    assert_eq!(cp.non_realised(), [1]);
    assert!(cp.realised[0].is_some());
    let mut base = params("random-graph", &["c", "a"]);
    base.set_kind(0, PointKind::BaseConstant);
    let lits = cp.restrict(&base).unwrap();
    assert!(lits.contains(&Literal::eq("x", "c", true)));
    assert!(has(&lits, "E", &["y", "c"], false));
    assert!(has(&lits, "E", &["y", "a"], false));
}

#[test]
fn power_matches_both_bracketings() {
    for (t, n) in [("counterexample", "p"), ("random-graph", "q"), ("equivalence", "new")] {
        let p = ty(t, n);
        let f = |i: usize| rename(&p, &move |v| format!("{v}_{i}"));
        let p3 = power(&p, 3).unwrap();
        let left = tensor(&tensor(&f(2), &f(1)).unwrap(), &f(0)).unwrap();
        assert_eq!(normalize(&p3, BOUND).unwrap(), normalize(&left, BOUND).unwrap(), "{t}/{n}");
        let x = &p.vars[0];
        assert_eq!(p3.vars, [format!("{x}_2"), format!("{x}_1"), format!("{x}_0")]);
    }
    assert!(power(&ty("random-graph", "p"), 4).is_err());
}
