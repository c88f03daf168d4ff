use tamedom_core::builtins;
use tamedom_core::domination::{
    check_domination, check_equidominance, refute_all_equidominance, refute_all_witnesses,
    search_witness, AmalgamBackend, Certificate, CheckOptions, DominationBackend, OrderBackend, SearchOutcome,
    Verdict,
};
use tamedom_core::order::cut_power;
use tamedom_core::schema::{rename, TypeSchema};

fn ty(theory: &str, name: &str) -> TypeSchema {
    builtins::type_schema(theory, name).unwrap()
}

fn backend(theory: &str) -> AmalgamBackend {
    AmalgamBackend::new(builtins::theory(theory).unwrap()).unwrap()
}

fn opts() -> CheckOptions {
    CheckOptions::default()
}

fn certificates_verify_amalgam(
    b: &AmalgamBackend,
    p: &TypeSchema,
    q: &TypeSchema,
    w: &<AmalgamBackend as DominationBackend>::Witness,
    v: &Verdict,
) {
    for c in v.certificates() {
        assert!(b.verify_domination_certificate(p, q, w, c).unwrap(), "{c:?}");
    }
}

#[test]
fn merged_witness_gives_domination() {
    let b = backend("counterexample");
    let (q1, q0) = (ty("counterexample", "q1"), ty("counterexample", "q0"));
    let ws = b.witnesses(&q1, &q0, 0).unwrap();
    let w = ws
        .iter()
        .find(|w| w.merges == [("z0".to_string(), "y".to_string())])
        .expect("witness merging y into z0");
    assert!(b.check_witness(&q1, &q0, w).unwrap());
    let v = check_domination(&b, &q1, &q0, w, &opts()).unwrap();
    assert!(v.is_entailed(), "{v:?}");
    certificates_verify_amalgam(&b, &q1, &q0, w, &v);

    // Merging into z1 works as well, since z1 shares z0's class.
    let w1 = ws
        .iter()
        .find(|w| w.merges == [("z1".to_string(), "y".to_string())])
        .unwrap();
    assert!(check_domination(&b, &q1, &q0, w1, &opts()).unwrap().is_entailed());
}

#[test]
fn generic_type_is_not_dominated_by_a_small_one() {
    let b = backend("counterexample");
    let (q0, p) = (ty("counterexample", "q0"), ty("counterexample", "p"));
    let out = search_witness(&b, &q0, &p, 1, &opts()).unwrap();
    assert!(matches!(out, SearchOutcome::Exhausted { base_budget: 1, .. }), "{out:?}");
    let rep = refute_all_witnesses(&b, &q0, &p, 1, &opts()).unwrap();
    assert!(rep.count() > 0 && rep.all_refuted());
    for c in &rep.candidates {
        certificates_verify_amalgam(&b, &q0, &p, &c.witness, &c.verdict);
    }
}

#[test]
fn realised_type_does_not_dominate() {
    let b = backend("random-graph");
    let (c, q) = (ty("random-graph", "c"), ty("random-graph", "q"));
    let rep = refute_all_witnesses(&b, &c, &q, 1, &opts()).unwrap();
    assert!(rep.count() > 0 && rep.all_refuted());
    // The other way round, the realised type is implied outright.
    let out = search_witness(&b, &q, &c, 0, &opts()).unwrap();
    assert!(out.found().is_some());
}

#[test]
fn random_graph_pair_is_not_equidominant() {
    let b = backend("random-graph");
    let (p, q) = (ty("random-graph", "p"), ty("random-graph", "q"));
    let rep = refute_all_equidominance(&b, &p, &q, 1, &opts()).unwrap();
    assert!(rep.count() > 0 && rep.all_refuted());
}

#[test]
fn type_is_equidominant_with_itself() {
    let b = backend("counterexample");
    let p = ty("counterexample", "p");
    let p2 = rename(&p, &|v| format!("{v}'"));
    let w = b
        .witnesses(&p, &p2, 0)
        .unwrap()
        .into_iter()
        .find(|w| w.merges.len() == 1)
        .unwrap();
    assert!(check_equidominance(&b, &p, &p2, &w, &opts()).unwrap().is_entailed());
}

#[test]
fn weak_orthogonality() {
    let b = backend("random-graph");
    let (p, q) = (ty("random-graph", "p"), ty("random-graph", "q"));
    let c = rename(&ty("random-graph", "c"), &|_| "w".into());
    let v = b.weakly_orthogonal(&p, &q, 1).unwrap();
    assert!(v.is_refuted(), "{v:?}");
    for cert in v.certificates() {
        assert!(b.verify_orthogonality_certificate(&p, &q, cert).unwrap());
    }
    for other in [&p, &q] {
        let v = b.weakly_orthogonal(&c, other, 1).unwrap();
        assert!(v.is_entailed(), "{v:?}");
        for cert in v.certificates() {
            assert!(b.verify_orthogonality_certificate(&c, other, cert).unwrap());
        }
    }
    // The restrictions say nothing about the edge between two copies.
    let p2 = rename(&p, &|v| format!("{v}'"));
    let v = b.weakly_orthogonal(&p, &p2, 1).unwrap();
    assert!(matches!(&v, Verdict::Refuted { counter: Certificate::Undecided { atom, .. }, .. } if atom == "E(x,x')"), "{v:?}");
}

#[test]
fn dlo_square_dominates_its_factor() {
    let b = OrderBackend;
    let p = builtins::cut_type("DLO", "p").unwrap();
    let p2 = cut_power(&p, 2).unwrap();
    let y = p.rename(&|_| "y".into());
    let out = search_witness(&b, &p2, &y, 1, &opts()).unwrap();
    let SearchOutcome::Found { witness, verdict, .. } = out else {
        panic!("no witness");
    };
    assert!(b.check_witness(&p2, &y, &witness).unwrap());
    for c in verdict.certificates() {
        assert!(b.verify_domination_certificate(&p2, &y, &witness, c).unwrap());
    }
}

#[test]
fn dlop_order_of_bits() {
    let b = OrderBackend;
    let p = builtins::cut_type("DLOP", "p").unwrap();
    let q = builtins::cut_type("DLOP", "q").unwrap();
    let ws = b.witnesses(&p, &q, 0).unwrap();
    // Distinct bits rule out x = y.
    assert!(ws.iter().all(|w| w.blocks.iter().all(|bl| bl.len() == 1)));
    for w in &ws {
        let v = check_domination(&b, &p, &q, w, &opts()).unwrap();
        assert!(!matches!(v, Verdict::ExhaustedAtBudget { .. }));
        for c in v.certificates() {
            assert!(b.verify_domination_certificate(&p, &q, w, c).unwrap());
        }
    }
}
