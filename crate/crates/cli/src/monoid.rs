//! Domination classes of tensor words over a few schemas, with the induced
//! order and product.

use anyhow::Result;
use serde::{Deserialize, Serialize};
use tamedom_core::builtins;
use tamedom_core::domination::{AmalgamBackend, Certificate, CheckOptions, DominationBackend, OrderBackend};
use tamedom_core::order::{cut_tensor, CutType};
use tamedom_core::schema::{rename, tensor, TypeSchema};

use crate::context::Context;

/// What the table needs from a backend beyond domination.
pub trait Algebra: DominationBackend {
    fn product(&self, a: &Self::Schema, b: &Self::Schema) -> Result<Self::Schema>;
    /// Appends `_{suffix}` to every variable (unless `suffix` is empty) and
    /// renames the schema.
    fn relabel(&self, s: &Self::Schema, suffix: &str, name: &str) -> Self::Schema;
    fn arity(&self, s: &Self::Schema) -> usize;
    fn name(&self, s: &Self::Schema) -> String;
    fn context(&self, a: &Self::Schema, b: &Self::Schema) -> Result<Context>;
}

impl Algebra for AmalgamBackend {
    fn product(&self, a: &TypeSchema, b: &TypeSchema) -> Result<TypeSchema> {
        Ok(tensor(a, b)?)
    }

    fn relabel(&self, s: &TypeSchema, suffix: &str, name: &str) -> TypeSchema {
        let mut t = if suffix.is_empty() {
            s.clone()
        } else {
            rename(s, &|v| format!("{v}_{suffix}"))
        };
        t.name = name.to_string();
        t
    }

    fn arity(&self, s: &TypeSchema) -> usize {
        s.arity()
    }

    fn name(&self, s: &TypeSchema) -> String {
        s.name.clone()
    }

    fn context(&self, a: &TypeSchema, b: &TypeSchema) -> Result<Context> {
        Ok(Context::new(&a.theory, a, b))
    }
}

impl Algebra for OrderBackend {
    fn product(&self, a: &CutType, b: &CutType) -> Result<CutType> {
        Ok(cut_tensor(a, b)?)
    }

    fn relabel(&self, s: &CutType, suffix: &str, name: &str) -> CutType {
        let mut t = if suffix.is_empty() {
            s.clone()
        } else {
            s.rename(&|v| format!("{v}_{suffix}"))
        };
        t.name = name.to_string();
        t
    }

    fn arity(&self, s: &CutType) -> usize {
        s.arity()
    }

    fn name(&self, s: &CutType) -> String {
        s.name.clone()
    }

    fn context(&self, a: &CutType, b: &CutType) -> Result<Context> {
        let theory = builtins::theory(a.universe.flavor.keyword())?;
        Ok(Context::new(&theory, a, b))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Element {
    /// Factor names joined by `*`, leftmost factor first.
    pub name: String,
    pub word: Vec<usize>,
    pub arity: usize,
    pub class: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidTable {
    pub factors: Vec<String>,
    pub max_arity: usize,
    pub base_budget: usize,
    pub elements: Vec<Element>,
    /// `dominates[i][j]`: a witness for element `i` dominating element `j`
    /// was found within the budget.
    pub dominates: Vec<Vec<bool>>,
    /// Element indices of each class, in order of first element.
    pub classes: Vec<Vec<usize>>,
    /// Class order; `None` where members disagree.
    pub order: Vec<Vec<Option<bool>>>,
    /// Class of the product; `None` when no pair of members fits the arity
    /// bound or members disagree.
    pub product: Vec<Vec<Option<usize>>>,
    /// Mutual domination is transitive on the elements and order and
    /// product do not depend on representatives.
    pub well_defined: bool,
}

impl MonoidTable {
    pub fn class_names(&self) -> Vec<String> {
        self.classes
            .iter()
            .map(|m| {
                let names: Vec<&str> = m.iter().map(|&i| self.elements[i].name.as_str()).collect();
                format!("[{}]", names.join(" ~ "))
            })
            .collect()
    }

    /// Plain-text rendering: classes, then the order and product tables.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let names = self.class_names();
        for (i, n) in names.iter().enumerate() {
            out.push_str(&format!("C{i} = {n}\n"));
        }
        let k = self.classes.len();
        out.push_str("\n>=_D   ");
        for j in 0..k {
            out.push_str(&format!("{:>5}", format!("C{j}")));
        }
        out.push('\n');
        for i in 0..k {
            out.push_str(&format!("{:<7}", format!("C{i}")));
            for j in 0..k {
                let c = match self.order[i][j] {
                    Some(true) => "y",
                    Some(false) => ".",
                    None => "?",
                };
                out.push_str(&format!("{c:>5}"));
            }
            out.push('\n');
        }
        out.push_str("\n(x)    ");
        for j in 0..k {
            out.push_str(&format!("{:>5}", format!("C{j}")));
        }
        out.push('\n');
        for i in 0..k {
            out.push_str(&format!("{:<7}", format!("C{i}")));
            for j in 0..k {
                let c = match self.product[i][j] {
                    Some(c) => format!("C{c}"),
                    None => "-".into(),
                };
                out.push_str(&format!("{c:>5}"));
            }
            out.push('\n');
        }
        if !self.well_defined {
            out.push_str("\nwarning: classes, order or product depend on representatives\n");
        }
        out
    }
}

/// Evidence for one table cell.
#[derive(Clone, Debug)]
pub struct CellEvidence {
    pub context: Context,
    pub witness: serde_json::Value,
    pub certificate: Certificate,
}

/// Words over `factors` of total arity at most `max_arity`, shortest first.
pub fn words(arities: &[usize], max_arity: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut frontier: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), 0)];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (w, a) in frontier {
            for (f, &fa) in arities.iter().enumerate() {
                if a + fa <= max_arity {
                    let mut v = w.clone();
                    v.push(f);
                    out.push(v.clone());
                    next.push((v, a + fa));
                }
            }
        }
        frontier = next;
    }
    out
}

/// Right-associated product of the word's factors, each with its variables
/// tagged by position.
fn build<B: Algebra>(b: &B, factors: &[B::Schema], word: &[usize], name: &str) -> Result<B::Schema> {
    let last = word.len() - 1;
    let mut acc = b.relabel(&factors[word[last]], &last.to_string(), name);
    for k in (0..last).rev() {
        let f = b.relabel(&factors[word[k]], &k.to_string(), name);
        acc = b.product(&f, &acc)?;
    }
    Ok(b.relabel(&acc, "", name))
}

/// Searches for a witness, recording entailed certificates if one is found
/// and every counter otherwise.
fn dominates<B: Algebra>(
    b: &B,
    p: &B::Schema,
    q: &B::Schema,
    base_budget: usize,
    opts: &CheckOptions,
    evidence: Option<&mut Vec<CellEvidence>>,
) -> Result<bool> {
    let mut counters = Vec::new();
    let ctx = b.context(p, q)?;
    for size in 0..=base_budget {
        for w in b.witnesses(p, q, size)? {
            let v = b.check_domination(p, q, &w, opts)?;
            let witness = serde_json::to_value(&w)?;
            if v.is_entailed() {
                if let Some(ev) = evidence {
                    for c in v.certificates() {
                        ev.push(CellEvidence {
                            context: ctx.clone(),
                            witness: witness.clone(),
                            certificate: c.clone(),
                        });
                    }
                }
                return Ok(true);
            }
            for c in v.certificates() {
                counters.push(CellEvidence {
                    context: ctx.clone(),
                    witness: witness.clone(),
                    certificate: c.clone(),
                });
            }
        }
    }
    if let Some(ev) = evidence {
        ev.extend(counters);
    }
    Ok(false)
}

pub fn monoid_table<B: Algebra>(
    b: &B,
    factors: &[B::Schema],
    max_arity: usize,
    base_budget: usize,
    opts: &CheckOptions,
    mut evidence: Option<&mut Vec<CellEvidence>>,
) -> Result<MonoidTable> {
    let arities: Vec<usize> = factors.iter().map(|f| b.arity(f)).collect();
    let fnames: Vec<String> = factors.iter().map(|f| b.name(f)).collect();
    let ws = words(&arities, max_arity);
    let mut schemas = Vec::new();
    let mut elements = Vec::new();
    for (i, w) in ws.iter().enumerate() {
        schemas.push(build(b, factors, w, &format!("m{i}"))?);
        elements.push(Element {
            name: w.iter().map(|&f| fnames[f].as_str()).collect::<Vec<_>>().join("*"),
            word: w.clone(),
            arity: w.iter().map(|&f| arities[f]).sum(),
            class: 0,
        });
    }
    let n = elements.len();
    let left: Vec<B::Schema> = schemas.iter().map(|s| b.relabel(s, "l", &format!("{}l", b.name(s)))).collect();
    let right: Vec<B::Schema> = schemas.iter().map(|s| b.relabel(s, "r", &format!("{}r", b.name(s)))).collect();
    let mut dom = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            dom[i][j] = dominates(b, &left[i], &right[j], base_budget, opts, evidence.as_deref_mut())?;
        }
    }
    let equiv = |i: usize, j: usize| dom[i][j] && dom[j][i];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut well_defined = true;
    for i in 0..n {
        match classes.iter().position(|c| equiv(c[0], i)) {
            Some(c) => {
                well_defined &= classes[c].iter().all(|&m| equiv(m, i));
                classes[c].push(i);
                elements[i].class = c;
            }
            None => {
                elements[i].class = classes.len();
                classes.push(vec![i]);
            }
        }
    }
    let k = classes.len();
    let mut order = vec![vec![None; k]; k];
    for ci in 0..k {
        for cj in 0..k {
            let vals: Vec<bool> = classes[ci]
                .iter()
                .flat_map(|&a| classes[cj].iter().map(move |&c| (a, c)))
                .map(|(a, c)| dom[a][c])
                .collect();
            if vals.iter().all(|&v| v == vals[0]) {
                order[ci][cj] = Some(vals[0]);
            } else {
                well_defined = false;
            }
        }
    }
    let mut product = vec![vec![None; k]; k];
    for ci in 0..k {
        for cj in 0..k {
            let mut seen: Vec<usize> = Vec::new();
            for &a in &classes[ci] {
                for &c in &classes[cj] {
                    let mut w = elements[a].word.clone();
                    w.extend(&elements[c].word);
                    if let Some(e) = elements.iter().find(|e| e.word == w) {
                        if !seen.contains(&e.class) {
                            seen.push(e.class);
                        }
                    }
                }
            }
            match seen.as_slice() {
                [] => {}
                [c] => product[ci][cj] = Some(*c),
                _ => well_defined = false,
            }
        }
    }
    Ok(MonoidTable {
        factors: fnames,
        max_arity,
        base_budget,
        elements,
        dominates: dom,
        classes,
        order,
        product,
        well_defined,
    })
}

/// Whether `table` is the structure described by `label` (class index of
/// a word), `ge` (order) and `add` (product), restricted to the words in
/// the table.
pub fn matches_model<L: PartialEq + Clone>(
    table: &MonoidTable,
    label: &dyn Fn(&[usize]) -> L,
    ge: &dyn Fn(&L, &L) -> bool,
    add: &dyn Fn(&L, &L) -> L,
) -> Result<(), String> {
    if !table.well_defined {
        return Err("table is not well defined".into());
    }
    let labels: Vec<L> = table.elements.iter().map(|e| label(&e.word)).collect();
    for (i, a) in table.elements.iter().enumerate() {
        for (j, b) in table.elements.iter().enumerate() {
            if (a.class == b.class) != (labels[i] == labels[j]) {
                return Err(format!("`{}` and `{}` are classified differently", a.name, b.name));
            }
            if table.dominates[i][j] != ge(&labels[i], &labels[j]) {
                return Err(format!("order disagrees on `{}` >= `{}`", a.name, b.name));
            }
            let sum = add(&labels[i], &labels[j]);
            if let Some(c) = table.product[a.class][b.class] {
                let rep = table.classes[c][0];
                if labels[rep] != sum {
                    return Err(format!("product of `{}` and `{}` lands in the wrong class", a.name, b.name));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_respect_arity() {
        let w = words(&[1, 2], 3);
        // [0], [1], [0,0], [0,1], [1,0], [0,0,0]
        assert_eq!(w.len(), 6);
        assert!(w.iter().all(|w| w.iter().map(|&f| [1, 2][f]).sum::<usize>() <= 3));
    }
}
