use std::sync::Arc;

use proptest::prelude::*;
use tamedom_core::amalgam::{close, AmalgamEngine, CloseOutcome};
use tamedom_core::builtins;
use tamedom_core::logic::{all_tuples, Literal, PartialStructure, Point, PointKind, TheorySpec};

const AMALGAM_THEORIES: [&str; 4] = ["counterexample", "random-graph", "equality", "equivalence"];

fn engine(name: &str) -> AmalgamEngine {
    AmalgamEngine::new(builtins::theory(name).unwrap()).unwrap()
}

fn blank(th: &TheorySpec, ids: &[&str]) -> PartialStructure {
    let points = ids.iter().map(|i| Point::new(*i, PointKind::FreshParameter)).collect();
    PartialStructure::with_points(th.signature.clone(), points).unwrap()
}

fn lit(rel: &str, args: &[&str], positive: bool) -> Literal {
    Literal::rel(rel, args, positive)
}

fn with(th: &TheorySpec, ids: &[&str], lits: &[Literal]) -> PartialStructure {
    let mut s = blank(th, ids);
    for l in lits {
        s.assert_literal(l).unwrap();
    }
    s
}

/// The three-class triangle-free configuration: a adjacent to b and c,
/// R3 on {a,b,c}, everything else false.
fn lambda_member(th: &TheorySpec) -> PartialStructure {
    let (e, r2, r3) = (th.rel("E").unwrap(), th.rel("R2").unwrap(), th.rel("R3").unwrap());
    let mut s = blank(th, &["a", "b", "c"]);
    for t in all_tuples(3, 2) {
        s.set(e, &t, Some(t[0] == t[1]));
        s.set(r2, &t, Some(t[0] != t[1] && (t[0] == 0 || t[1] == 0)));
    }
    for t in all_tuples(3, 3) {
        s.set(r3, &t, Some(t[0] != t[1] && t[1] != t[2] && t[0] != t[2]));
    }
    s
}

#[test]
fn close_derives_transitivity() {
    let th = builtins::theory("counterexample").unwrap();
    let s = with(&th, &["a", "b", "c"], &[lit("E", &["a", "b"], true), lit("E", &["b", "c"], true)]);
    let CloseOutcome::Closed { structure, .. } = close(&s, &th) else {
        panic!("unexpected contradiction");
    };
    let e = th.rel("E").unwrap();
    assert_eq!(structure.get(e, &[0, 2]), Some(true));
    assert_eq!(structure.get(e, &[2, 0]), Some(true));
    assert_eq!(structure.get(e, &[1, 1]), Some(true));
}

#[test]
fn close_derives_equivariance() {
    let th = builtins::theory("counterexample").unwrap();
    let s = with(&th, &["a", "a2", "b"], &[lit("E", &["a", "a2"], true), lit("R2", &["a", "b"], true)]);
    let out = close(&s, &th);
    let st = out.structure().unwrap();
    let r2 = th.rel("R2").unwrap();
    assert_eq!(st.get(r2, &[1, 2]), Some(true));
    assert_eq!(st.get(r2, &[2, 1]), Some(true));
    // R2 is irreflexive through its forbidden configuration.
    assert_eq!(st.get(r2, &[0, 0]), Some(false));
}

#[test]
fn close_reports_a_replayable_contradiction() {
    let th = builtins::theory("counterexample").unwrap();
    // E(a,b) and R2(a,c) force R2(b,c) by equivariance.
    let s = with(
        &th,
        &["a", "b", "c"],
        &[lit("E", &["a", "b"], true), lit("R2", &["a", "c"], true), lit("R2", &["b", "c"], false)],
    );
    let CloseOutcome::Contradiction(c) = close(&s, &th) else {
        panic!("expected a contradiction");
    };
    assert!(c.replay(&s, &th));
    // The same trace does not explain a clash from a different start.
    let other = with(&th, &["a", "b", "c"], &[lit("E", &["a", "b"], true)]);
    assert!(!c.replay(&other, &th));
}

#[test]
fn membership_examples() {
    let th = builtins::theory("counterexample").unwrap();
    let eng = engine("counterexample");
    let good = lambda_member(&th);
    assert!(eng.is_member(&good).unwrap());

    // A triangle with R3 is forbidden.
    let mut tri = good.clone();
    let r2 = th.rel("R2").unwrap();
    tri.set(r2, &[1, 2], Some(true));
    tri.set(r2, &[2, 1], Some(true));
    assert!(!eng.is_member(&tri).unwrap());

    // Only one edge under R3 is forbidden too.
    let mut one = good.clone();
    one.set(r2, &[0, 2], Some(false));
    one.set(r2, &[2, 0], Some(false));
    assert!(!eng.is_member(&one).unwrap());

    // Undecided atoms are an error, not a verdict.
    let mut partial = good;
    partial.set(r2, &[1, 2], None);
    assert!(eng.is_member(&partial).is_err());
}

#[test]
fn consistency_examples() {
    let th = builtins::theory("counterexample").unwrap();
    let eng = engine("counterexample");
    let r3 = th.rel("R3").unwrap();

    let mut open = lambda_member(&th);
    for t in all_tuples(3, 3) {
        open.set(r3, &t, None);
    }
    let f = eng.consistent(&open).unwrap().unwrap();
    let t = eng.consistent_ordered(&open, true).unwrap().unwrap();
    assert_eq!(f.structure.get(r3, &[0, 1, 2]), Some(false));
    assert_eq!(t.structure.get(r3, &[0, 1, 2]), Some(true));
    assert!(f.structure.extends(&open) && t.structure.extends(&open));
    assert!(eng.is_member(&f.structure).unwrap() && eng.is_member(&t.structure).unwrap());
    assert_eq!(eng.completions(&open).unwrap().len(), 2);

    // R3 with an E-edge among its arguments has no completion.
    let bad = with(&th, &["a", "b", "c"], &[lit("E", &["a", "b"], true), lit("R3", &["a", "b", "c"], true)]);
    assert!(eng.consistent(&bad).unwrap().is_none());
    assert!(eng.completions(&bad).unwrap().is_empty());
}

#[test]
fn extension_counts() {
    // Two base points in pure equality: equal to either, or new.
    let eq = engine("equality");
    let th = builtins::theory("equality").unwrap();
    assert_eq!(eq.enumerate_extensions(&blank(&th, &["a", "b"]), 1).unwrap().len(), 3);

    // One base point in the random graph: equal, adjacent or not.
    let rg = engine("random-graph");
    let th = builtins::theory("random-graph").unwrap();
    let base = rg.consistent(&blank(&th, &["a"])).unwrap().unwrap().structure;
    assert_eq!(rg.enumerate_extensions(&base, 1).unwrap().len(), 3);

    // A single point has exactly one type.
    let ce = engine("counterexample");
    let th = builtins::theory("counterexample").unwrap();
    assert_eq!(ce.enumerate_extensions(&blank(&th, &[]), 1).unwrap().len(), 1);
}

#[test]
fn one_point_extension_examples() {
    let rg = engine("random-graph");
    let th = builtins::theory("random-graph").unwrap();
    let base = rg.consistent(&blank(&th, &["a"])).unwrap().unwrap().structure;
    let types = rg.enumerate_extensions(&base, 1).unwrap();
    let e = th.rel("E").unwrap();
    let mut adjacency = Vec::new();
    for t in &types {
        let ext = rg.one_point_extension(&base, t).unwrap();
        assert!(ext.extends(&base));
        if t.coords[0] == 0 {
            assert_eq!(ext, base);
        } else {
            adjacency.push(ext.get(e, &[0, 1]).unwrap());
        }
    }
    adjacency.sort();
    assert_eq!(adjacency, [false, true]);

    // A type over another base is refused.
    let other = rg.consistent(&blank(&th, &["z"])).unwrap().unwrap().structure;
    assert!(rg.one_point_extension(&other, &types[1]).is_err());
}

/// Members on up to two points extending the empty base, for each theory.
fn small_members(name: &str) -> Vec<PartialStructure> {
    let eng = engine(name);
    let th = builtins::theory(name).unwrap();
    let mut out = Vec::new();
    for m in 0..=2 {
        out.extend(eng.enumerate_structures_named(&blank(&th, &[]), m, "c").unwrap());
    }
    out
}

fn pick<T: Clone>(v: &[T], i: usize) -> T {
    v[i % v.len()].clone()
}

/// Random partial structure over `n` points with the given fill pattern.
fn sprinkle(th: &Arc<TheorySpec>, n: usize, bits: &[u8]) -> PartialStructure {
    let ids: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
    let mut s = blank(th, &refs);
    let mut k = 0;
    for r in th.signature.ids() {
        for t in all_tuples(n, th.signature.arity(r)) {
            let b = bits[k % bits.len()];
            k += 1;
            s.set(r, &t, match b % 5 {
                0 => Some(true),
                1 => Some(false),
                _ => None,
            });
        }
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Two one-point extensions of a common base amalgamate with the new
    /// points kept distinct.
    #[test]
    fn strong_amalgamation(
        th_idx in 0usize..AMALGAM_THEORIES.len(),
        base_idx in any::<usize>(),
        left in any::<usize>(),
        right in any::<usize>(),
    ) {
        let name = AMALGAM_THEORIES[th_idx];
        let eng = engine(name);
        let bases: Vec<_> = small_members(name).into_iter().filter(|b| b.len() <= 2).collect();
        let base = pick(&bases, base_idx);
        let ext = eng.enumerate_structures_named(&base, 1, "n").unwrap();
        let a = pick(&ext, left);
        let mut b = pick(&ext, right);
        let n = base.len();
        b.rename_point(n, "m").unwrap();
        let mut joint = base.with_extra_points(vec![
            a.point(n).clone(),
            b.point(n).clone(),
        ]).unwrap();
        let amap: Vec<usize> = (0..=n).collect();
        let mut bmap: Vec<usize> = (0..n).collect();
        bmap.push(n + 1);
        prop_assert!(joint.absorb(&a, &amap));
        prop_assert!(joint.absorb(&b, &bmap));
        let done = eng.consistent(&joint).unwrap();
        prop_assert!(done.is_some(), "{} and {} do not amalgamate", a, b);
        let done = done.unwrap().structure;
        prop_assert!(done.induced(&amap) == a);
        prop_assert!(done.induced(&bmap) == b);
    }

    #[test]
    fn close_is_idempotent_and_monotone(
        th_idx in 0usize..AMALGAM_THEORIES.len(),
        n in 0usize..4,
        bits in proptest::collection::vec(any::<u8>(), 1..40),
        extra in proptest::collection::vec(any::<u8>(), 1..40),
    ) {
        let th = builtins::theory(AMALGAM_THEORIES[th_idx]).unwrap();
        let s = sprinkle(&th, n, &bits);
        let Some(c1) = close(&s, &th).structure().cloned() else { return Ok(()); };
        prop_assert!(c1.extends(&s));
        let c2 = close(&c1, &th);
        prop_assert_eq!(c2.structure(), Some(&c1));

        // A larger input closes to a larger structure, or to a contradiction.
        let mut t = s.clone();
        let more = sprinkle(&th, n, &extra);
        let map: Vec<usize> = (0..n).collect();
        if !t.absorb(&more, &map) {
            return Ok(());
        }
        if let Some(ct) = close(&t, &th).structure() {
            prop_assert!(ct.extends(&c1));
        }
    }

    /// Any one-point type over a substructure of a member is realized in
    /// some member extending it.
    #[test]
    fn genericity(
        th_idx in 0usize..AMALGAM_THEORIES.len(),
        a_idx in any::<usize>(),
        t_idx in any::<usize>(),
        drop_last in any::<bool>(),
    ) {
        let name = AMALGAM_THEORIES[th_idx];
        let eng = engine(name);
        let a = pick(&small_members(name), a_idx);
        let keep: Vec<usize> = (0..a.len() - usize::from(drop_last && !a.is_empty())).collect();
        let b = a.induced(&keep);
        let types = eng.enumerate_extensions(&b, 1).unwrap();
        let t = pick(&types, t_idx);
        let realized = eng.one_point_extension(&b, &t).unwrap();
        prop_assert!(eng.is_member(&realized).unwrap());
        if t.coords[0] < b.len() {
            return Ok(());
        }
        // Glue the new point onto A and complete.
        let mut joint = a.with_extra_points(vec![Point::new("#new", PointKind::FreshParameter)]).unwrap();
        let mut map = keep.clone();
        map.push(a.len());
        prop_assert!(joint.absorb(&realized, &map));
        prop_assert!(eng.is_consistent(&joint).unwrap());
    }
}
