use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use tamedom_core::builtins;
use tamedom_core::logic::{
    all_tuples, iso_canonical, parse_theory, Literal, PartialStructure, Point, PointKind, Pred,
    Signature,
};
use tamedom_core::schema::{parse_schema, parse_schema_file, SchemaItem};
use tamedom_core::Error;

fn pts(ids: &[&str]) -> Vec<Point> {
    ids.iter().map(|i| Point::new(*i, PointKind::FreshParameter)).collect()
}

fn counterexample_sig() -> Arc<Signature> {
    builtins::theory("counterexample").unwrap().signature.clone()
}

/// The 3-point member a,b,c with R2(a,b), R2(a,c), !R2(b,c), R3(a,b,c) and
/// three E-classes.
fn lambda_triple() -> PartialStructure {
    let th = builtins::theory("counterexample").unwrap();
    let (e, r2, r3) = (th.rel("E").unwrap(), th.rel("R2").unwrap(), th.rel("R3").unwrap());
    let mut s = PartialStructure::with_points(th.signature.clone(), pts(&["a", "b", "c"])).unwrap();
    for t in all_tuples(3, 2) {
        s.set(e, &t, Some(t[0] == t[1]));
        let edge = t[0] != t[1] && (t[0] == 0 || t[1] == 0);
        s.set(r2, &t, Some(edge));
    }
    for t in all_tuples(3, 3) {
        let distinct = t[0] != t[1] && t[0] != t[2] && t[1] != t[2];
        s.set(r3, &t, Some(distinct));
    }
    s
}

#[test]
fn counterexample_theory_shape() {
    let th = builtins::theory("counterexample").unwrap();
    assert_eq!(th.signature.len(), 3);
    assert_eq!(th.rules.len(), 5);
    assert_eq!(th.forbidden.len(), 4);
}

#[test]
fn pure_equality_theory_is_empty() {
    let th = parse_theory(builtins::EQUALITY_THY).unwrap();
    assert_eq!(th.signature.len(), 0);
    assert!(th.rules.is_empty());
}

#[test]
fn redeclared_relation_is_rejected() {
    let err = parse_theory("theory t\nrelation E 2\nrelation E 2\n").unwrap_err();
    assert!(matches!(err, Error::DuplicateRelation(_)), "{err:?}");
}

#[test]
fn schema_p_has_three_families() {
    let th = builtins::theory("counterexample").unwrap();
    let p = parse_schema(
        "type p over counterexample vars x\nE(x,*) := false\nR2(x,*) := true\nR3(x,*,*) := false\n",
        &th,
    )
    .unwrap();
    assert_eq!(p.families.len(), 3);
}

#[test]
fn schema_q1_has_internal_section() {
    let th = builtins::theory("counterexample").unwrap();
    let q1 = parse_schema(
        "type q1 over counterexample vars z0,z1\ninternal E(z0,z1)\ninternal z0 != z1\nR2(z0,*) := false\n",
        &th,
    )
    .unwrap();
    let e = th.rel("E").unwrap();
    assert_eq!(q1.internal_value(e, &[0, 1]), Some(true));
    assert_eq!(q1.vars, ["z0", "z1"]);
}

#[test]
fn rule_without_variable_is_rejected() {
    let th = builtins::theory("random-graph").unwrap();
    assert!(parse_schema("type bad over random-graph vars x\nE(*,*) := true\n", &th).is_err());
}

#[test]
fn qf_type_of_lambda_triple() {
    let s = lambda_triple();
    let lits = s.qf_type(&[0, 1, 2]).unwrap();
    // Every atom over three points: 9 for each binary relation, 27 ternary.
    assert_eq!(lits.len(), 9 + 9 + 27);
    let r3_true: Vec<&Literal> = lits
        .iter()
        .filter(|l| l.positive && l.pred == Pred::Rel("R3".into()))
        .collect();
    assert_eq!(r3_true.len(), 6);
}

#[test]
fn qf_type_with_undecided_slot_fails() {
    let mut s = lambda_triple();
    let r3 = builtins::theory("counterexample").unwrap().rel("R3").unwrap();
    s.set(r3, &[2, 1, 0], None);
    assert!(matches!(s.qf_type(&[0, 1, 2]), Err(Error::UndecidedAtom(_))));
}

#[test]
fn canonical_form_sees_the_base() {
    let th = builtins::theory("random-graph").unwrap();
    let e = th.rel("E").unwrap();
    // Edge a-b in one, edge b-c in the other, three points each.
    let mut s1 = PartialStructure::with_points(th.signature.clone(), pts(&["a", "b", "c"])).unwrap();
    let mut s2 = s1.clone();
    for t in all_tuples(3, 2) {
        let u = [t[0].min(t[1]), t[0].max(t[1])];
        s1.set(e, &t, Some(u == [0, 1]));
        s2.set(e, &t, Some(u == [1, 2]));
    }
    assert_eq!(iso_canonical(&s1, &[]).unwrap(), iso_canonical(&s2, &[]).unwrap());
    assert_ne!(iso_canonical(&s1, &[0]).unwrap(), iso_canonical(&s2, &[0]).unwrap());
    // Brute force: some permutation fixing `a` maps s1 onto s2 iff the
    // canonical forms agree.
    let maps = [[0, 1, 2], [0, 2, 1]];
    let iso = maps.iter().any(|m| {
        all_tuples(3, 2).all(|t| s1.get(e, &t) == s2.get(e, &[m[t[0]], m[t[1]]]))
    });
    assert!(!iso);
}

#[test]
fn builtin_schema_files_parse() {
    for t in builtins::THEORY_NAMES {
        let src = builtins::schema_source(t).unwrap();
        let items = parse_schema_file(src, &|n| builtins::theory(n)).unwrap();
        assert!(items.iter().all(|i| matches!(i, SchemaItem::Type(_) | SchemaItem::Order(_))));
    }
}

fn table_len(sig: &Signature, n: usize) -> usize {
    sig.ids().map(|r| n.pow(sig.arity(r) as u32)).sum()
}

fn fill(sig: Arc<Signature>, n: usize, vals: &[Option<bool>]) -> PartialStructure {
    let ids: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
    let mut s = PartialStructure::with_points(sig.clone(), pts(&refs)).unwrap();
    let mut k = 0;
    for r in sig.ids() {
        for t in all_tuples(n, sig.arity(r)) {
            s.set(r, &t, vals[k]);
            k += 1;
        }
    }
    s
}

fn structure(max_points: usize, total: bool) -> impl Strategy<Value = PartialStructure> {
    (0..=max_points).prop_flat_map(move |n| {
        let sig = counterexample_sig();
        let len = table_len(&sig, n);
        let value = if total {
            prop_oneof![Just(Some(false)), Just(Some(true))].boxed()
        } else {
            prop_oneof![Just(None), Just(Some(false)), Just(Some(true))].boxed()
        };
        proptest::collection::vec(value, len).prop_map(move |v| fill(sig.clone(), n, &v))
    })
}

fn relabel(s: &PartialStructure, perm: &[usize]) -> PartialStructure {
    // Point i of `s` becomes point perm[i] of the result, keeping its name.
    let n = s.len();
    let mut points = vec![Point::new("", PointKind::FreshParameter); n];
    for i in 0..n {
        points[perm[i]] = s.point(i).clone();
    }
    let sig = s.signature().clone();
    let mut out = PartialStructure::with_points(sig.clone(), points).unwrap();
    for r in sig.ids() {
        for t in all_tuples(n, sig.arity(r)) {
            let u: Vec<usize> = t.iter().map(|&i| perm[i]).collect();
            out.set(r, &u, s.get(r, &t));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theory_roundtrip(idx in 0usize..builtins::THEORY_NAMES.len()) {
        let th = builtins::theory(builtins::THEORY_NAMES[idx]).unwrap();
        prop_assert_eq!(parse_theory(&th.pretty_print()).unwrap(), (*th).clone());
    }

    #[test]
    fn qf_type_rebuilds_the_structure(s in structure(4, true)) {
        let all: Vec<usize> = (0..s.len()).collect();
        let lits = s.qf_type(&all).unwrap();
        let back = PartialStructure::from_literals(s.signature().clone(), s.points().to_vec(), &lits).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn canonical_form_ignores_relabelling(
        s in structure(6, false),
        seed in any::<u64>(),
        nfixed in 0usize..3,
    ) {
        let n = s.len();
        let fixed: Vec<usize> = (0..n.min(nfixed)).collect();
        // A permutation of the non-fixed points from the seed.
        let mut free: Vec<usize> = (fixed.len()..n).collect();
        let mut x = seed;
        for i in (1..free.len()).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            free.swap(i, (x >> 33) as usize % (i + 1));
        }
        let mut perm: Vec<usize> = fixed.clone();
        perm.extend(free);
        let t = relabel(&s, &perm);
        let a = iso_canonical(&s, &fixed).unwrap();
        let b = iso_canonical(&t, &fixed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(iso_canonical(&s, &fixed).unwrap(), a);
    }

    #[test]
    fn literal_text_roundtrip(s in structure(3, false)) {
        for l in s.decided_literals() {
            let back: Literal = l.to_string().parse().unwrap();
            prop_assert_eq!(back, l);
        }
    }
}

#[test]
fn decided_literals_cover_decided_atoms() {
    let s = lambda_triple();
    let set: BTreeSet<Literal> = s.decided_literals().into_iter().collect();
    assert_eq!(set.len(), 45);
}
