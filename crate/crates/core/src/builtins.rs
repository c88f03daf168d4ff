//! Theories and schemas shipped with the library.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::logic::{parse_theory, TheorySpec};
use crate::order::CutType;
use crate::schema::{complete_schema, parse_schema_file, SchemaItem, TypeSchema};

/// Arity bound at which built-in schemas are completed and validated.
pub const COMPLETION_BOUND: usize = 2;

pub const COUNTEREXAMPLE_THY: &str = "\
theory counterexample
relation E 2
relation R2 2
relation R3 3
symmetric E
symmetric R2
symmetric R3
rule -> E(x,x)
rule E(x,y) -> E(y,x)
rule E(x,y) & E(y,z) -> E(x,z)
rule E(x,x2) & R2(x,y) -> R2(x2,y)
rule E(y,y2) & R2(x,y) -> R2(x,y2)
forbid R2(x,x)
forbid R3(x,y,z) & E(x,y)
forbid R3(x,y,z) & R2(x,y) & R2(y,z) & R2(x,z)
forbid R3(x,y,z) & !R2(x,y) & !R2(x,z)
";

pub const RANDOM_GRAPH_THY: &str = "\
theory random-graph
relation E 2
symmetric E
irreflexive E
";

pub const EQUALITY_THY: &str = "theory equality\n";

pub const EQUIVALENCE_THY: &str = "\
theory equivalence
relation E 2
symmetric E
rule -> E(x,x)
rule E(x,y) & E(y,z) -> E(x,z)
";

pub const DLO_THY: &str = "theory DLO\nbackend dlo\n";
pub const DLOP_THY: &str = "theory DLOP\nbackend dlop\n";

pub const COUNTEREXAMPLE_SCH: &str = "\
type p over counterexample vars x
E(x,*) := false
R2(x,*) := true
R3(x,*,*) := false

type q0 over counterexample vars y
R2(y,*) := false

type q1 over counterexample vars z0,z1
internal E(z0,z1)
internal z0 != z1
R2(z0,*) := false

type c over counterexample vars x
const c
realised x = c
";

pub const RANDOM_GRAPH_SCH: &str = "\
type p over random-graph vars x
E(x,*) := false

type q over random-graph vars y
E(y,*) := true

type c over random-graph vars x
const c
realised x = c
";

pub const EQUALITY_SCH: &str = "\
type t1 over equality vars x

type t2 over equality vars x1,x2

type t3 over equality vars x1,x2,x3

type c over equality vars x
const c
realised x = c
";

pub const EQUIVALENCE_SCH: &str = "\
type new over equivalence vars x
E(x,*) := false

type inb over equivalence vars x
const b
E(x,*u) := true if E(*u,b)
E(x,*) := false
";

pub const DLO_SCH: &str = "\
order-type p over DLO vars x
cut top from below extreme
layout top
x at cut top from below

order-type p1 over DLO vars x
cut c1 from below
cut c2 from above
layout c1 < c2
x at cut c1 from below

order-type p2 over DLO vars x
cut c1 from below
cut c2 from above
layout c1 < c2
x at cut c2 from above
";

pub const DLOP_SCH: &str = "\
order-type p over DLOP vars x
cut top from below extreme
layout top
x at cut top from below in P

order-type q over DLOP vars y
cut top from below extreme
layout top
y at cut top from below in notP
";

pub const THEORY_NAMES: [&str; 6] = [
    "counterexample",
    "random-graph",
    "equality",
    "equivalence",
    "DLO",
    "DLOP",
];

pub fn theory_source(name: &str) -> Option<&'static str> {
    Some(match name {
        "counterexample" => COUNTEREXAMPLE_THY,
        "random-graph" => RANDOM_GRAPH_THY,
        "equality" => EQUALITY_THY,
        "equivalence" => EQUIVALENCE_THY,
        "DLO" | "dlo" => DLO_THY,
        "DLOP" | "dlop" => DLOP_THY,
        _ => return None,
    })
}

pub fn schema_source(theory: &str) -> Option<&'static str> {
    Some(match theory {
        "counterexample" => COUNTEREXAMPLE_SCH,
        "random-graph" => RANDOM_GRAPH_SCH,
        "equality" => EQUALITY_SCH,
        "equivalence" => EQUIVALENCE_SCH,
        "DLO" | "dlo" => DLO_SCH,
        "DLOP" | "dlop" => DLOP_SCH,
        _ => return None,
    })
}

pub fn theory(name: &str) -> Result<Arc<TheorySpec>> {
    let src = theory_source(name).ok_or_else(|| Error::UnknownName(name.to_string()))?;
    parse_theory(src).map(Arc::new)
}

fn load(theory_name: &str) -> Result<Vec<SchemaItem>> {
    let src = schema_source(theory_name).ok_or_else(|| Error::UnknownName(theory_name.to_string()))?;
    let items = parse_schema_file(src, &|n| theory(n))?;
    items
        .into_iter()
        .map(|item| match item {
            SchemaItem::Type(t) => {
                let (done, report) = complete_schema(&t, COMPLETION_BOUND)?;
                if !report.passed() {
                    return Err(Error::InvalidSchema(format!(
                        "built-in `{}` does not complete: {:?}",
                        t.name, report.failures
                    )));
                }
                Ok(SchemaItem::Type(done))
            }
            order => Ok(order),
        })
        .collect()
}

/// Built-in schemas of a theory, in file order. Rule schemas are completed
/// at [`COMPLETION_BOUND`].
pub fn schemas(theory_name: &str) -> Result<Vec<SchemaItem>> {
    static CACHE: OnceLock<Mutex<BTreeMap<String, Vec<SchemaItem>>>> = OnceLock::new();
    let key = theory(theory_name)?.name.clone();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    if let Some(v) = cache.lock().expect("schema cache poisoned").get(&key) {
        return Ok(v.clone());
    }
    let v = load(theory_name)?;
    cache
        .lock()
        .expect("schema cache poisoned")
        .insert(key, v.clone());
    Ok(v)
}

pub fn schema(theory_name: &str, name: &str) -> Result<SchemaItem> {
    schemas(theory_name)?
        .into_iter()
        .find(|s| s.name() == name)
        .ok_or_else(|| Error::UnknownName(format!("{theory_name}/{name}")))
}

pub fn type_schema(theory_name: &str, name: &str) -> Result<TypeSchema> {
    match schema(theory_name, name)? {
        SchemaItem::Type(t) => Ok(t),
        SchemaItem::Order(_) => Err(Error::Invalid(format!("`{name}` is an order type"))),
    }
}

pub fn cut_type(theory_name: &str, name: &str) -> Result<CutType> {
    match schema(theory_name, name)? {
        SchemaItem::Order(t) => Ok(t),
        SchemaItem::Type(_) => Err(Error::Invalid(format!("`{name}` is a rule schema"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_loads() {
        for t in THEORY_NAMES {
            let items = schemas(t).unwrap();
            assert!(!items.is_empty(), "{t}");
        }
    }
}
