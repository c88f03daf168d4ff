//! Domination, equidominance, witness search and weak orthogonality, with
//! certificates that can be re-checked without the search.

mod amalgam;
mod order;

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

pub use amalgam::{AmalgamBackend, AmalgamWitness, AmalgamWitnessDto};
pub use order::{OrderBackend, OrderWitness};

use crate::error::Result;
use crate::logic::StructureDto;
use crate::order::OrderLit;

/// Budgets and target ordering for one domination check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOptions {
    /// Largest number of fresh parameters in a checked target; `None` uses
    /// the goal's largest wildcard count.
    pub param_budget: Option<usize>,
    /// Extra fresh points adjoined when re-checking a counter.
    pub probes: usize,
    /// Relation whose targets are checked first.
    pub focus: Option<String>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            param_budget: None,
            probes: 2,
            focus: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// The premise decides the target atom on `core` directly.
    Decided { target: String, core: StructureDto },
    /// `core` (premise restriction, witness, parameter type and the negated
    /// target) has no member completion. With `identified = (v, b)` the
    /// negated target is `v = b`, applied by merging the two points.
    Inconsistent {
        target: String,
        core: StructureDto,
        identified: Option<(String, String)>,
    },
    /// A total member satisfying the premise restriction and the witness in
    /// which the target fails. With `identified = (v, b)` the point `v` was
    /// merged into `b`.
    Counter {
        target: String,
        core: StructureDto,
        counter: StructureDto,
        identified: Option<(String, String)>,
    },
    OrderInconsistent {
        target: OrderLit,
        literals: Vec<OrderLit>,
    },
    OrderCounter {
        target: OrderLit,
        literals: Vec<OrderLit>,
        arrangement: Vec<Vec<String>>,
    },
    /// Both values of a mixed atom extend the two restrictions.
    Undecided {
        atom: String,
        with_true: StructureDto,
        with_false: StructureDto,
    },
    OrderUndecided {
        left: String,
        right: String,
        options: Vec<OrderLit>,
    },
}

impl Certificate {
    pub fn target(&self) -> String {
        match self {
            Certificate::Decided { target, .. }
            | Certificate::Inconsistent { target, .. }
            | Certificate::Counter { target, .. } => target.clone(),
            Certificate::OrderInconsistent { target, .. }
            | Certificate::OrderCounter { target, .. } => format!("{target:?}"),
            Certificate::Undecided { atom, .. } => atom.clone(),
            Certificate::OrderUndecided { left, right, .. } => format!("{left} ? {right}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeSummary {
    /// Number of extra fresh points tried, `1..=run`.
    pub run: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Entailed {
        certificates: Vec<Certificate>,
    },
    Refuted {
        counter: Certificate,
        probes: Option<ProbeSummary>,
    },
    ExhaustedAtBudget {
        base_budget: usize,
        param_budget: usize,
        candidates: usize,
    },
}

impl Verdict {
    pub fn is_entailed(&self) -> bool {
        matches!(self, Verdict::Entailed { .. })
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Entailed { .. } => "entailed",
            Verdict::Refuted { .. } => "refuted",
            Verdict::ExhaustedAtBudget { .. } => "exhausted-at-budget",
        }
    }

    pub fn certificates(&self) -> Vec<&Certificate> {
        match self {
            Verdict::Entailed { certificates } => certificates.iter().collect(),
            Verdict::Refuted { counter, .. } => vec![counter],
            Verdict::ExhaustedAtBudget { .. } => Vec::new(),
        }
    }
}

/// A theory backend for domination questions between its schema kind.
pub trait DominationBackend {
    type Schema: Debug;
    type Witness: Clone + Debug + Serialize;

    /// Every witness type over bases with exactly `base_size` points
    /// beyond the named constants, in deterministic order.
    fn witnesses(
        &self,
        p: &Self::Schema,
        q: &Self::Schema,
        base_size: usize,
    ) -> Result<Vec<Self::Witness>>;

    /// Whether `r` is a complete type over its base extending both
    /// restrictions (membership in `S_pq(A)`).
    fn check_witness(&self, p: &Self::Schema, q: &Self::Schema, r: &Self::Witness) -> Result<bool>;

    /// The same witness with the roles of the two schemas exchanged.
    fn swap(&self, w: &Self::Witness) -> Self::Witness;

    /// `p ∪ r ⊢ q`, target by target.
    fn check_domination(
        &self,
        p: &Self::Schema,
        q: &Self::Schema,
        r: &Self::Witness,
        opts: &CheckOptions,
    ) -> Result<Verdict>;

    fn weakly_orthogonal(
        &self,
        p: &Self::Schema,
        q: &Self::Schema,
        param_budget: usize,
    ) -> Result<Verdict>;

    /// Re-checks one certificate of `check_domination(p, q, r)`.
    fn verify_domination_certificate(
        &self,
        p: &Self::Schema,
        q: &Self::Schema,
        r: &Self::Witness,
        cert: &Certificate,
    ) -> Result<bool>;

    /// Re-checks one certificate of `weakly_orthogonal(p, q)`.
    fn verify_orthogonality_certificate(
        &self,
        p: &Self::Schema,
        q: &Self::Schema,
        cert: &Certificate,
    ) -> Result<bool>;
}

/// Both directions with one shared witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquiVerdict {
    pub forward: Verdict,
    pub backward: Verdict,
}

impl EquiVerdict {
    pub fn is_entailed(&self) -> bool {
        self.forward.is_entailed() && self.backward.is_entailed()
    }

    pub fn is_refuted(&self) -> bool {
        self.forward.is_refuted() || self.backward.is_refuted()
    }
}

pub fn check_domination<B: DominationBackend>(
    b: &B,
    p: &B::Schema,
    q: &B::Schema,
    r: &B::Witness,
    opts: &CheckOptions,
) -> Result<Verdict> {
    b.check_domination(p, q, r, opts)
}

pub fn check_equidominance<B: DominationBackend>(
    b: &B,
    p: &B::Schema,
    q: &B::Schema,
    r: &B::Witness,
    opts: &CheckOptions,
) -> Result<EquiVerdict> {
    let forward = b.check_domination(p, q, r, opts)?;
    let backward = b.check_domination(q, p, &b.swap(r), opts)?;
    Ok(EquiVerdict { forward, backward })
}

#[derive(Clone, Debug, Serialize)]
pub enum SearchOutcome<W> {
    Found { witness: W, verdict: Verdict, tried: usize },
    Exhausted { base_budget: usize, candidates: usize },
}

impl<W> SearchOutcome<W> {
    pub fn found(&self) -> Option<&W> {
        match self {
            SearchOutcome::Found { witness, .. } => Some(witness),
            SearchOutcome::Exhausted { .. } => None,
        }
    }
}

/// First witness (in enumeration order) under which `p` dominates `q`.
pub fn search_witness<B: DominationBackend>(
    b: &B,
    p: &B::Schema,
    q: &B::Schema,
    base_budget: usize,
    opts: &CheckOptions,
) -> Result<SearchOutcome<B::Witness>> {
    let quick = CheckOptions {
        probes: 0,
        ..opts.clone()
    };
    let mut tried = 0;
    for size in 0..=base_budget {
        for w in b.witnesses(p, q, size)? {
            tried += 1;
            let v = b.check_domination(p, q, &w, &quick)?;
            if v.is_entailed() {
                return Ok(SearchOutcome::Found {
                    witness: w,
                    verdict: v,
                    tried,
                });
            }
        }
    }
    Ok(SearchOutcome::Exhausted {
        base_budget,
        candidates: tried,
    })
}

/// As [`search_witness`], but one witness must work in both directions.
pub fn search_equidominance_witness<B: DominationBackend>(
    b: &B,
    p: &B::Schema,
    q: &B::Schema,
    base_budget: usize,
    opts: &CheckOptions,
) -> Result<SearchOutcome<B::Witness>> {
    let quick = CheckOptions {
        probes: 0,
        ..opts.clone()
    };
    let mut tried = 0;
    for size in 0..=base_budget {
        for w in b.witnesses(p, q, size)? {
            tried += 1;
            let v = check_equidominance(b, p, q, &w, &quick)?;
            if v.is_entailed() {
                return Ok(SearchOutcome::Found {
                    witness: w,
                    verdict: v.forward,
                    tried,
                });
            }
        }
    }
    Ok(SearchOutcome::Exhausted {
        base_budget,
        candidates: tried,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateResult<W> {
    pub base_size: usize,
    pub witness: W,
    /// The verdict is for the backward direction, under the swapped witness.
    pub reversed: bool,
    pub verdict: Verdict,
}

/// Outcome of checking every witness over bases up to `base_budget`. The
/// claim it supports is bounded by that budget.
#[derive(Clone, Debug, Serialize)]
pub struct RefutationReport<W> {
    pub base_budget: usize,
    pub candidates: Vec<CandidateResult<W>>,
}

impl<W> RefutationReport<W> {
    pub fn all_refuted(&self) -> bool {
        self.candidates.iter().all(|c| c.verdict.is_refuted())
    }

    pub fn count(&self) -> usize {
        self.candidates.len()
    }
}

pub fn refute_all_witnesses<B: DominationBackend>(
    b: &B,
    p: &B::Schema,
    q: &B::Schema,
    base_budget: usize,
    opts: &CheckOptions,
) -> Result<RefutationReport<B::Witness>> {
    let mut candidates = Vec::new();
    for size in 0..=base_budget {
        for w in b.witnesses(p, q, size)? {
            let verdict = b.check_domination(p, q, &w, opts)?;
            candidates.push(CandidateResult {
                base_size: size,
                witness: w,
                reversed: false,
                verdict,
            });
        }
    }
    Ok(RefutationReport {
        base_budget,
        candidates,
    })
}

/// Every shared witness fails in at least one direction. The recorded
/// verdict is the first failing direction (forward first).
pub fn refute_all_equidominance<B: DominationBackend>(
    b: &B,
    p: &B::Schema,
    q: &B::Schema,
    base_budget: usize,
    opts: &CheckOptions,
) -> Result<RefutationReport<B::Witness>> {
    let mut candidates = Vec::new();
    for size in 0..=base_budget {
        for w in b.witnesses(p, q, size)? {
            let fwd = b.check_domination(p, q, &w, opts)?;
            let (reversed, verdict) = if fwd.is_refuted() {
                (false, fwd)
            } else {
                (true, b.check_domination(q, p, &b.swap(&w), opts)?)
            };
            candidates.push(CandidateResult {
                base_size: size,
                witness: w,
                reversed,
                verdict,
            });
        }
    }
    Ok(RefutationReport {
        base_budget,
        candidates,
    })
}
