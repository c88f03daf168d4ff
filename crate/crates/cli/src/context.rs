//! Theory/schema pairs as embedded in reports, and resource caps.

use std::sync::Arc;

use anyhow::{anyhow, bail, Context as _, Result};
use serde::{Deserialize, Serialize};
use tamedom_core::domination::{AmalgamBackend, OrderBackend};
use tamedom_core::logic::{parse_theory, Backend, TheorySpec};
use tamedom_core::order::CutType;
use tamedom_core::schema::{parse_schema_file, SchemaItem, TypeSchema};

/// Default cap on the number of points of any structure handed to the
/// engine.
pub const DEFAULT_HARD_CAP: usize = 10;

/// Point cap from `TAMEDOM_HARD_CAP_POINTS`.
pub fn hard_cap() -> Result<usize> {
    match std::env::var("TAMEDOM_HARD_CAP_POINTS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| anyhow!("TAMEDOM_HARD_CAP_POINTS must be a number, got `{v}`")),
        Err(_) => Ok(DEFAULT_HARD_CAP),
    }
}

/// Budget overrides from the command line.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    pub base: Option<usize>,
    pub param: Option<usize>,
    pub probes: Option<usize>,
}

/// A theory and two schemas over it, as DSL text. Every certificate in a
/// report refers to one of these.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Context {
    pub theory: String,
    pub left: String,
    pub right: String,
}

pub enum Loaded {
    Amalgam {
        backend: AmalgamBackend,
        left: TypeSchema,
        right: TypeSchema,
    },
    Order {
        backend: OrderBackend,
        left: CutType,
        right: CutType,
    },
}

pub fn parse_single(text: &str, theory: &Arc<TheorySpec>) -> Result<SchemaItem> {
    let items = parse_schema_file(text, &|n| {
        if n == theory.name {
            Ok(theory.clone())
        } else {
            Err(tamedom_core::Error::UnknownName(n.to_string()))
        }
    })?;
    match <[SchemaItem; 1]>::try_from(items) {
        Ok([item]) => Ok(item),
        Err(v) => bail!("expected one schema, found {}", v.len()),
    }
}

impl Context {
    pub fn new(theory: &TheorySpec, left: &impl ToString, right: &impl ToString) -> Self {
        Context {
            theory: theory.pretty_print(),
            left: left.to_string(),
            right: right.to_string(),
        }
    }

    pub fn load(&self, cap: usize) -> Result<Loaded> {
        let theory = Arc::new(parse_theory(&self.theory).context("embedded theory")?);
        let left = parse_single(&self.left, &theory).context("embedded left schema")?;
        let right = parse_single(&self.right, &theory).context("embedded right schema")?;
        Ok(match (theory.backend, left, right) {
            (Backend::Amalgamation, SchemaItem::Type(left), SchemaItem::Type(right)) => Loaded::Amalgam {
                backend: AmalgamBackend::new(theory)?.with_point_cap(cap),
                left,
                right,
            },
            (Backend::DenseOrder(_), SchemaItem::Order(left), SchemaItem::Order(right)) => Loaded::Order {
                backend: OrderBackend,
                left,
                right,
            },
            _ => bail!("schema kinds do not match the theory backend"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tamedom_core::builtins;

    #[test]
    fn embedded_context_loads_back() {
        let th = builtins::theory("random-graph").unwrap();
        let p = builtins::type_schema("random-graph", "p").unwrap();
        let q = builtins::type_schema("random-graph", "q").unwrap();
        let ctx = Context::new(&th, &p, &q);
        match ctx.load(DEFAULT_HARD_CAP).unwrap() {
            Loaded::Amalgam { left, right, .. } => {
                assert_eq!(left.families, p.families);
                assert_eq!(right.vars, q.vars);
            }
            Loaded::Order { .. } => panic!("wrong backend"),
        }
    }

    #[test]
    fn mismatched_kinds_are_rejected() {
        let th = builtins::theory("DLO").unwrap();
        let p = builtins::type_schema("random-graph", "p").unwrap();
        assert!(Context::new(&th, &p, &p).load(DEFAULT_HARD_CAP).is_err());
    }
}
