use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use proptest::prelude::*;
use tamedom_core::builtins;
use tamedom_core::order::{
    class_invariant, cut_power, cut_tensor, dlo_consistent, CutType, OrderLit, OrderScope,
    OrderUniverse, Placement, Side,
};

fn v(s: &str) -> String {
    s.to_string()
}

fn consistent(u: &OrderUniverse, vars: &[&str], lits: &[OrderLit]) -> bool {
    let scope = OrderScope {
        universe: u,
        upoints: Vec::new(),
        vars: vars.iter().map(|s| s.to_string()).collect(),
    };
    dlo_consistent(&scope, lits).unwrap()
}

#[test]
fn diagrams_over_two_cuts() {
    let p1 = builtins::cut_type("DLO", "p1").unwrap();
    let u = &p1.universe;
    let base = [OrderLit::InCut(v("x"), v("c1")), OrderLit::InCut(v("y"), v("c2"))];
    let mut lits = base.to_vec();
    lits.push(OrderLit::Less(v("x"), v("y")));
    assert!(consistent(u, &["x", "y"], &lits));
    let mut lits = base.to_vec();
    lits.push(OrderLit::Less(v("y"), v("x")));
    assert!(!consistent(u, &["x", "y"], &lits));
    let mut lits = base.to_vec();
    lits.push(OrderLit::Eq(v("y"), v("x")));
    assert!(!consistent(u, &["x", "y"], &lits));
}

#[test]
fn diagrams_within_one_cut() {
    let p = builtins::cut_type("DLO", "p").unwrap();
    let u = &p.universe;
    let lits = [
        OrderLit::InCut(v("x"), v("top")),
        OrderLit::InCut(v("y"), v("top")),
        OrderLit::InCut(v("z"), v("top")),
        OrderLit::Less(v("x"), v("y")),
        OrderLit::Less(v("y"), v("z")),
    ];
    assert!(consistent(u, &["x", "y", "z"], &lits));
    let mut cyc = lits.to_vec();
    cyc.push(OrderLit::Less(v("z"), v("x")));
    assert!(!consistent(u, &["x", "y", "z"], &cyc));
    let mut neq = lits[..2].to_vec();
    neq.push(OrderLit::Eq(v("x"), v("y")));
    neq.push(OrderLit::Neq(v("x"), v("y")));
    assert!(!consistent(u, &["x", "y"], &neq));
}

#[test]
fn predicate_bits_must_agree() {
    let p = builtins::cut_type("DLOP", "p").unwrap();
    let u = &p.universe;
    let lits = [
        OrderLit::InCut(v("x"), v("top")),
        OrderLit::Pred(v("x"), true),
        OrderLit::InCut(v("y"), v("top")),
        OrderLit::Pred(v("y"), false),
    ];
    assert!(consistent(u, &["x", "y"], &lits));
    let mut eq = lits.to_vec();
    eq.push(OrderLit::Eq(v("x"), v("y")));
    assert!(!consistent(u, &["x", "y"], &eq));
}

#[test]
fn square_at_plus_infinity() {
    let p = builtins::cut_type("DLO", "p").unwrap();
    let q = p.rename(&|_| v("y"));
    let pq = cut_tensor(&p, &q).unwrap();
    assert_eq!(pq.vars, ["x", "y"]);
    // y, then x: the left factor is closer to +infinity.
    assert_eq!(pq.cut_orders.values().next().unwrap(), &vec![1, 0]);
    let mut lits = pq.literals();
    assert!(consistent(&pq.universe, &["x", "y"], &lits));
    lits.push(OrderLit::Less(v("x"), v("y")));
    assert!(!consistent(&pq.universe, &["x", "y"], &lits));
}

#[test]
fn distinct_cuts_stay_independent() {
    let p1 = builtins::cut_type("DLO", "p1").unwrap();
    let p2 = builtins::cut_type("DLO", "p2").unwrap().rename(&|_| v("y"));
    let pq = cut_tensor(&p1, &p2).unwrap();
    let qp = cut_tensor(&p2, &p1).unwrap();
    assert_eq!(pq.cut_orders.len(), 2);
    assert!(pq.cut_orders.values().all(|o| o.len() == 1));
    assert_eq!(class_invariant(&pq), class_invariant(&qp));
    let sorted = |t: &CutType| -> BTreeSet<String> {
        t.literals().iter().map(|l| format!("{l:?}")).collect()
    };
    assert_eq!(sorted(&pq), sorted(&qp));
}

#[test]
fn class_invariants() {
    let p = builtins::cut_type("DLOP", "p").unwrap();
    let q = builtins::cut_type("DLOP", "q").unwrap();
    let inv: Vec<_> = class_invariant(&p).into_iter().collect();
    assert_eq!(inv, [(v("top"), Some(true))]);
    assert_ne!(class_invariant(&p), class_invariant(&q));
    let p3 = cut_power(&p, 3).unwrap();
    assert_eq!(class_invariant(&p3), class_invariant(&p));
    let pq = cut_tensor(&p, &q).unwrap();
    assert_eq!(class_invariant(&pq).len(), 2);
}

#[test]
fn tensor_over_different_universes_fails() {
    let a = builtins::cut_type("DLO", "p").unwrap();
    let b = builtins::cut_type("DLO", "p1").unwrap().rename(&|_| v("y"));
    assert!(cut_tensor(&a, &b).is_err());
}

/// A cut type over `universe` with `n` variables, each at one of its cuts
/// (bits when the flavour has a predicate), named `{prefix}{i}`.
fn random_type(
    universe: Arc<OrderUniverse>,
    prefix: &str,
    picks: &[(usize, bool, u32)],
    with_bits: bool,
) -> CutType {
    let cuts: Vec<usize> = universe
        .items
        .iter()
        .enumerate()
        .filter(|(_, it)| matches!(it, tamedom_core::order::Item::Cut { .. }))
        .map(|(i, _)| i)
        .collect();
    let mut placement = Vec::new();
    let mut by_cut: BTreeMap<usize, Vec<(u32, usize)>> = BTreeMap::new();
    for (i, &(c, b, key)) in picks.iter().enumerate() {
        let cut = cuts[c % cuts.len()];
        placement.push(Placement::AtCut {
            cut,
            bit: with_bits.then_some(b),
        });
        by_cut.entry(cut).or_default().push((key, i));
    }
    let cut_orders = by_cut
        .into_iter()
        .map(|(c, mut vs)| {
            vs.sort();
            (c, vs.into_iter().map(|(_, i)| i).collect())
        })
        .collect();
    CutType {
        name: v(prefix),
        universe,
        vars: (0..picks.len()).map(|i| format!("{prefix}{i}")).collect(),
        placement,
        cut_orders,
    }
}

fn universe(idx: usize) -> (Arc<OrderUniverse>, bool) {
    match idx {
        0 => (builtins::cut_type("DLO", "p1").unwrap().universe, false),
        1 => (builtins::cut_type("DLO", "p").unwrap().universe, false),
        _ => (builtins::cut_type("DLOP", "p").unwrap().universe, true),
    }
}

fn picks() -> impl Strategy<Value = Vec<(usize, bool, u32)>> {
    proptest::collection::vec((0usize..4, any::<bool>(), any::<u32>()), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn invariant_of_tensor_is_union(u in 0usize..3, a in picks(), b in picks()) {
        let (uni, bits) = universe(u);
        let p = random_type(uni.clone(), "a", &a, bits);
        let q = random_type(uni, "b", &b, bits);
        let pq = cut_tensor(&p, &q).unwrap();
        let mut union = class_invariant(&p);
        union.extend(class_invariant(&q));
        prop_assert_eq!(class_invariant(&pq), union);
    }

    #[test]
    fn tensor_is_associative(u in 0usize..3, a in picks(), b in picks(), c in picks()) {
        let (uni, bits) = universe(u);
        let p = random_type(uni.clone(), "a", &a, bits);
        let q = random_type(uni.clone(), "b", &b, bits);
        let r = random_type(uni, "c", &c, bits);
        let left = cut_tensor(&cut_tensor(&p, &q).unwrap(), &r).unwrap();
        let right = cut_tensor(&p, &cut_tensor(&q, &r).unwrap()).unwrap();
        prop_assert_eq!(&left.vars, &right.vars);
        prop_assert_eq!(&left.placement, &right.placement);
        prop_assert_eq!(&left.cut_orders, &right.cut_orders);
    }

    /// Every left-factor variable lies on the small side of every
    /// right-factor variable sharing its cut, and the product is satisfiable.
    #[test]
    fn tensor_order_is_realizable(u in 0usize..3, a in picks(), b in picks()) {
        let (uni, bits) = universe(u);
        let p = random_type(uni.clone(), "a", &a, bits);
        let q = random_type(uni.clone(), "b", &b, bits);
        let pq = cut_tensor(&p, &q).unwrap();
        let vars: Vec<&str> = pq.vars.iter().map(String::as_str).collect();
        let lits = pq.literals();
        prop_assert!(consistent(&uni, &vars, &lits));
        for i in 0..p.arity() {
            for j in 0..q.arity() {
                let (Placement::AtCut { cut: ci, .. }, Placement::AtCut { cut: cj, .. }) =
                    (p.placement[i], q.placement[j]) else { continue };
                if ci != cj {
                    continue;
                }
                let (x, y) = (p.vars[i].clone(), q.vars[j].clone());
                let wrong = match uni.side(ci) {
                    Side::FromBelow => OrderLit::Less(x, y),
                    Side::FromAbove => OrderLit::Less(y, x),
                };
                let mut with = lits.clone();
                with.push(wrong);
                prop_assert!(!consistent(&uni, &vars, &with));
            }
        }
    }
}
