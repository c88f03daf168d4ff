//! Report format and re-verification.

use std::collections::HashMap;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context as _, Result};
use serde::{Deserialize, Serialize};
use tamedom_core::domination::{
    AmalgamWitness, AmalgamWitnessDto, Certificate, DominationBackend, OrderWitness, ProbeSummary,
};
use tamedom_core::logic::{Literal, PartialStructure, StructureDto};
use tamedom_core::order::class_invariant;
use tamedom_core::schema::tensor;

use crate::context::{Context, Loaded};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounded {
    pub base: usize,
    pub param: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Evidence {
    /// One domination check. With `reversed` the premise is the context's
    /// right schema; `witness` is in the orientation of the check.
    Domination {
        context: usize,
        reversed: bool,
        witness: serde_json::Value,
        certificate: Certificate,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        probes: Option<ProbeSummary>,
    },
    Orthogonality {
        context: usize,
        certificate: Certificate,
    },
    /// The product of the context's schemas has this internal literal.
    TensorInternal { context: usize, literal: String },
    ClassInvariant {
        context: usize,
        left: Vec<(String, Option<bool>)>,
        right: Vec<(String, Option<bool>)>,
    },
    /// Both values of `atom` extend `core` to a member.
    Undetermined {
        context: usize,
        core: StructureDto,
        atom: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub paper_anchor: String,
    pub statement: String,
    pub expected: String,
    pub verdict: String,
    pub pass: bool,
    pub bounded: Option<Bounded>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
    pub certificates: Vec<Evidence>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub contexts: Vec<Context>,
    pub claims: Vec<Claim>,
    pub pass: bool,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn new(scenario: &str) -> Self {
        Report {
            scenario: scenario.to_string(),
            contexts: Vec::new(),
            claims: Vec::new(),
            pass: false,
            elapsed_ms: 0,
        }
    }

    /// Index of `ctx`, adding it if new.
    pub fn context(&mut self, ctx: Context) -> usize {
        match self.contexts.iter().position(|c| *c == ctx) {
            Some(i) => i,
            None => {
                self.contexts.push(ctx);
                self.contexts.len() - 1
            }
        }
    }

    pub fn push(&mut self, claim: Claim) {
        self.claims.push(claim);
        self.pass = self.claims.iter().all(|c| c.pass);
    }

    /// The report without timing, for determinism checks.
    pub fn untimed(&self) -> Report {
        Report {
            elapsed_ms: 0,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOutcome {
    pub checked: usize,
    /// First failing certificate, if any.
    pub failure: Option<String>,
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

fn verify_evidence(ev: &Evidence, loaded: &mut HashMap<usize, Loaded>, report: &Report, cap: usize) -> Result<bool> {
    let ctx = match ev {
        Evidence::Domination { context, .. }
        | Evidence::Orthogonality { context, .. }
        | Evidence::TensorInternal { context, .. }
        | Evidence::ClassInvariant { context, .. }
        | Evidence::Undetermined { context, .. } => *context,
    };
    if !loaded.contains_key(&ctx) {
        let c = report
            .contexts
            .get(ctx)
            .ok_or_else(|| anyhow!("certificate refers to missing context {ctx}"))?;
        loaded.insert(ctx, c.load(cap).with_context(|| format!("context {ctx}"))?);
    }
    let l = &loaded[&ctx];
    Ok(match (ev, l) {
        (
            Evidence::Domination {
                reversed,
                witness,
                certificate,
                ..
            },
            Loaded::Amalgam { backend, left, right },
        ) => {
            let (p, q) = if *reversed { (right, left) } else { (left, right) };
            let dto: AmalgamWitnessDto = serde_json::from_value(witness.clone())?;
            let w = AmalgamWitness::from_dto(&p.theory, &dto)?;
            backend.check_witness(p, q, &w)? && backend.verify_domination_certificate(p, q, &w, certificate)?
        }
        (
            Evidence::Domination {
                reversed,
                witness,
                certificate,
                ..
            },
            Loaded::Order { backend, left, right },
        ) => {
            let (p, q) = if *reversed { (right, left) } else { (left, right) };
            let w: OrderWitness = serde_json::from_value(witness.clone())?;
            backend.check_witness(p, q, &w)? && backend.verify_domination_certificate(p, q, &w, certificate)?
        }
        (Evidence::Orthogonality { certificate, .. }, Loaded::Amalgam { backend, left, right }) => {
            backend.verify_orthogonality_certificate(left, right, certificate)?
        }
        (Evidence::Orthogonality { certificate, .. }, Loaded::Order { backend, left, right }) => {
            backend.verify_orthogonality_certificate(left, right, certificate)?
        }
        (Evidence::TensorInternal { literal, .. }, Loaded::Amalgam { left, right, .. }) => {
            let prod = tensor(left, right)?;
            let lit = Literal::from_str(literal)?;
            let real = prod.realize(&prod.constant_skeleton()?)?;
            let st = &real.structure;
            match st.holds(&lit) {
                Ok(v) => v == Some(true),
                Err(_) => false,
            }
        }
        (Evidence::ClassInvariant { left: l0, right: r0, .. }, Loaded::Order { left, right, .. }) => {
            class_invariant(left).into_iter().collect::<Vec<_>>() == *l0
                && class_invariant(right).into_iter().collect::<Vec<_>>() == *r0
        }
        (Evidence::Undetermined { core, atom, .. }, Loaded::Amalgam { backend, left, .. }) => {
            let st = PartialStructure::from_dto(left.theory.signature.clone(), core)?;
            let lit = Literal::from_str(atom)?;
            let (rel, t) = st.resolve_literal(&lit)?;
            if st.get(rel, &t).is_some() {
                return Ok(false);
            }
            let mut ok = true;
            for v in [false, true] {
                let mut s = st.clone();
                s.set(rel, &t, Some(v));
                ok &= backend.engine().is_consistent(&s)?;
            }
            ok
        }
        _ => bail!("certificate kind does not fit its context's backend"),
    })
}

/// Re-checks every embedded certificate and the report's pass flag.
pub fn verify_report(report: &Report, cap: usize) -> Result<VerifyOutcome> {
    let mut loaded = HashMap::new();
    let mut checked = 0;
    for (i, claim) in report.claims.iter().enumerate() {
        for (j, ev) in claim.certificates.iter().enumerate() {
            let ok = verify_evidence(ev, &mut loaded, report, cap)
                .with_context(|| format!("claim {i} (`{}`), certificate {j}", claim.paper_anchor))?;
            checked += 1;
            if !ok {
                return Ok(VerifyOutcome {
                    checked,
                    failure: Some(format!(
                        "claim {i} (`{}`), certificate {j} does not verify",
                        claim.paper_anchor
                    )),
                });
            }
        }
    }
    let all = report.claims.iter().all(|c| c.pass);
    if all != report.pass {
        return Ok(VerifyOutcome {
            checked,
            failure: Some("the report's pass flag disagrees with its claims".into()),
        });
    }
    Ok(VerifyOutcome { checked, failure: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn claim(pass: bool) -> Claim {
        Claim {
            paper_anchor: "a".into(),
            statement: String::new(),
            expected: "entailed".into(),
            verdict: if pass { "entailed" } else { "refuted" }.into(),
            pass,
            bounded: None,
            notes: Vec::new(),
            details: serde_json::Value::Null,
            certificates: Vec::new(),
        }
    }

    #[test]
    fn pass_flag_follows_claims() {
        let mut r = Report::new("s");
        r.push(claim(true));
        assert!(r.pass);
        r.push(claim(false));
        assert!(!r.pass);
        r.elapsed_ms = 7;
        assert_eq!(r.untimed().elapsed_ms, 0);
    }

    #[test]
    fn tampered_pass_flag_is_caught() {
        let mut r = Report::new("s");
        r.push(claim(false));
        r.pass = true;
        let out = verify_report(&r, 10).unwrap();
        assert!(!out.passed());
    }
}
