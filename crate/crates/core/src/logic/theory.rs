use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::lexer::{raw_conj, raw_lit, Cursor, RawArg, RawLit, Tok};
use super::signature::{RelId, Relation, Signature};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrderFlavor {
    Dlo,
    Dlop,
}

impl OrderFlavor {
    pub fn keyword(self) -> &'static str {
        match self {
            OrderFlavor::Dlo => "DLO",
            OrderFlavor::Dlop => "DLOP",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Backend {
    Amalgamation,
    DenseOrder(OrderFlavor),
}

/// Atom of a rule pattern; arguments index the rule's variable list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PatAtom {
    Rel(RelId, Vec<usize>),
    Eq(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PatLit {
    pub atom: PatAtom,
    pub positive: bool,
}

/// Horn rule `body -> head` with a positive relational head.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClosureRule {
    pub vars: Vec<String>,
    pub body: Vec<PatLit>,
    pub head: (RelId, Vec<usize>),
}

/// A conjunction that may not embed (non-injectively) into a member.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Forbidden {
    pub vars: Vec<String>,
    pub lits: Vec<PatLit>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TheorySpec {
    pub name: String,
    pub signature: Arc<Signature>,
    pub symmetric: BTreeSet<RelId>,
    pub irreflexive: BTreeSet<RelId>,
    pub rules: Vec<ClosureRule>,
    pub forbidden: Vec<Forbidden>,
    pub backend: Backend,
}

impl TheorySpec {
    pub fn is_symmetric(&self, r: RelId) -> bool {
        self.symmetric.contains(&r)
    }

    pub fn rel(&self, name: &str) -> Result<RelId> {
        self.signature
            .lookup(name)
            .ok_or_else(|| Error::UndeclaredRelation(name.to_string()))
    }

    pub fn require_amalgamation(&self) -> Result<()> {
        match self.backend {
            Backend::Amalgamation => Ok(()),
            Backend::DenseOrder(f) => Err(Error::Backend(format!(
                "theory `{}` uses the {} backend, expected an amalgamation theory",
                self.name,
                f.keyword()
            ))),
        }
    }

    /// Canonical DSL text; `parse_theory` inverts it.
    pub fn pretty_print(&self) -> String {
        self.to_string()
    }

    fn fmt_lit(&self, vars: &[String], l: &PatLit) -> String {
        match &l.atom {
            PatAtom::Rel(r, args) => {
                let a: Vec<&str> = args.iter().map(|&i| vars[i].as_str()).collect();
                format!(
                    "{}{}({})",
                    if l.positive { "" } else { "!" },
                    self.signature.name(*r),
                    a.join(",")
                )
            }
            PatAtom::Eq(a, b) => format!(
                "{} {} {}",
                vars[*a],
                if l.positive { "=" } else { "!=" },
                vars[*b]
            ),
        }
    }
}

impl fmt::Display for TheorySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "theory {}", self.name)?;
        if let Backend::DenseOrder(flavor) = self.backend {
            writeln!(f, "backend {}", flavor.keyword().to_lowercase())?;
        }
        for r in self.signature.relations() {
            writeln!(f, "relation {} {}", r.name, r.arity)?;
        }
        for r in &self.symmetric {
            writeln!(f, "symmetric {}", self.signature.name(*r))?;
        }
        for r in &self.irreflexive {
            writeln!(f, "irreflexive {}", self.signature.name(*r))?;
        }
        for rule in &self.rules {
            let body: Vec<String> = rule.body.iter().map(|l| self.fmt_lit(&rule.vars, l)).collect();
            let head = PatLit {
                atom: PatAtom::Rel(rule.head.0, rule.head.1.clone()),
                positive: true,
            };
            let head = self.fmt_lit(&rule.vars, &head);
            if body.is_empty() {
                writeln!(f, "rule -> {head}")?;
            } else {
                writeln!(f, "rule {} -> {head}", body.join(" & "))?;
            }
        }
        for fb in &self.forbidden {
            let lits: Vec<String> = fb.lits.iter().map(|l| self.fmt_lit(&fb.vars, l)).collect();
            writeln!(f, "forbid {}", lits.join(" & "))?;
        }
        Ok(())
    }
}

struct VarTable {
    names: Vec<String>,
}

impl VarTable {
    fn index(&mut self, name: &str) -> usize {
        if let Some(i) = self.names.iter().position(|n| n == name) {
            return i;
        }
        self.names.push(name.to_string());
        self.names.len() - 1
    }
}

fn pattern_lit(
    sig: &Signature,
    vars: &mut VarTable,
    raw: &RawLit,
    line: usize,
) -> Result<PatLit> {
    let mut args = Vec::with_capacity(raw.args.len());
    for a in &raw.args {
        match a {
            RawArg::Name(n) => args.push(vars.index(n)),
            RawArg::Wild(_) => {
                return Err(Error::Syntax {
                    line,
                    col: raw.col,
                    msg: "wildcards are not allowed in theory rules".into(),
                })
            }
        }
    }
    let atom = match &raw.rel {
        Some(name) => PatAtom::Rel(sig.resolve(name, args.len())?, args),
        None => PatAtom::Eq(args[0], args[1]),
    };
    Ok(PatLit {
        atom,
        positive: raw.positive,
    })
}

/// Parses the theory DSL.
pub fn parse_theory(text: &str) -> Result<TheorySpec> {
    let mut name = String::from("anonymous");
    let mut backend = Backend::Amalgamation;
    let mut relations: Vec<Relation> = Vec::new();
    let mut rest: Vec<(usize, Cursor, String)> = Vec::new();
    let mut seen_content = false;

    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let mut cur = Cursor::new(line, lineno)?;
        if cur.is_empty() {
            continue;
        }
        let kw = cur.ident("a keyword")?;
        match kw.as_str() {
            "theory" => {
                if seen_content {
                    return cur.error("`theory` must be the first line");
                }
                name = cur.ident("a theory name")?;
                cur.finish()?;
            }
            "backend" => {
                let b = cur.ident("a backend name")?;
                backend = match b.to_lowercase().as_str() {
                    "amalgamation" => Backend::Amalgamation,
                    "dlo" => Backend::DenseOrder(OrderFlavor::Dlo),
                    "dlop" => Backend::DenseOrder(OrderFlavor::Dlop),
                    _ => return cur.error(format!("unknown backend `{b}`")),
                };
                cur.finish()?;
            }
            "relation" => {
                let rname = cur.ident("a relation name")?;
                let arity = cur.number("an arity")?;
                cur.finish()?;
                if relations.iter().any(|r| r.name == rname) {
                    return Err(Error::DuplicateRelation(rname));
                }
                relations.push(Relation { name: rname, arity });
            }
            "symmetric" | "irreflexive" | "rule" | "forbid" => rest.push((lineno, cur, kw)),
            other => return cur.error(format!("unknown keyword `{other}`")),
        }
        seen_content = true;
    }

    let signature = Signature::new(relations)?;
    let mut spec = TheorySpec {
        name,
        signature: Arc::new(signature.clone()),
        symmetric: BTreeSet::new(),
        irreflexive: BTreeSet::new(),
        rules: Vec::new(),
        forbidden: Vec::new(),
        backend,
    };
    for (lineno, mut cur, kw) in rest {
        match kw.as_str() {
            "symmetric" | "irreflexive" => {
                let rname = cur.ident("a relation name")?;
                cur.finish()?;
                let r = signature
                    .lookup(&rname)
                    .ok_or(Error::UndeclaredRelation(rname))?;
                if kw == "symmetric" {
                    spec.symmetric.insert(r);
                } else {
                    spec.irreflexive.insert(r);
                }
            }
            "rule" => {
                let mut vars = VarTable { names: Vec::new() };
                let mut body = Vec::new();
                if !cur.eat(&Tok::Arrow) {
                    for raw in raw_conj(&mut cur)? {
                        body.push(pattern_lit(&signature, &mut vars, &raw, lineno)?);
                    }
                    cur.expect(&Tok::Arrow, "`->`")?;
                }
                let col = cur.col();
                let raw = raw_lit(&mut cur)?;
                cur.finish()?;
                let head = pattern_lit(&signature, &mut vars, &raw, lineno)?;
                let head = match head {
                    PatLit {
                        atom: PatAtom::Rel(r, args),
                        positive: true,
                    } => (r, args),
                    _ => {
                        return Err(Error::Syntax {
                            line: lineno,
                            col,
                            msg: "rule heads must be positive relational literals".into(),
                        })
                    }
                };
                spec.rules.push(ClosureRule {
                    vars: vars.names,
                    body,
                    head,
                });
            }
            "forbid" => {
                let mut vars = VarTable { names: Vec::new() };
                let lits = raw_conj(&mut cur)?
                    .iter()
                    .map(|raw| pattern_lit(&signature, &mut vars, raw, lineno))
                    .collect::<Result<Vec<_>>>()?;
                cur.finish()?;
                spec.forbidden.push(Forbidden {
                    vars: vars.names,
                    lits,
                });
            }
            _ => unreachable!(),
        }
    }
    if matches!(spec.backend, Backend::DenseOrder(_)) && !spec.signature.is_empty() {
        return Err(Error::Backend(
            "dense-order theories use the built-in order and predicate; declare no relations"
                .into(),
        ));
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_roundtrips() {
        let text = "theory g\nrelation E 2\nsymmetric E\nirreflexive E\nrule E(x,y) & x != y -> E(y,x)\nforbid E(x,y) & !E(y,x)\n";
        let t = parse_theory(text).unwrap();
        assert_eq!(t.rules.len(), 1);
        assert_eq!(t.forbidden.len(), 1);
        assert_eq!(t.pretty_print(), text);
        assert_eq!(parse_theory(&t.pretty_print()).unwrap(), t);
    }

    #[test]
    fn empty_theory() {
        let t = parse_theory("# pure equality\n").unwrap();
        assert_eq!(t.signature.len(), 0);
        assert!(t.rules.is_empty());
    }

    #[test]
    fn errors() {
        assert_eq!(
            parse_theory("relation E 2\nrelation E 2\n").unwrap_err(),
            Error::DuplicateRelation("E".into())
        );
        assert_eq!(
            parse_theory("relation E 2\nrule F(x) -> E(x,x)\n").unwrap_err(),
            Error::UndeclaredRelation("F".into())
        );
        assert!(matches!(
            parse_theory("relation E 2\nforbid E(x)\n").unwrap_err(),
            Error::ArityMismatch { expected: 2, found: 1, .. }
        ));
        assert!(matches!(
            parse_theory("relation E 2\nrule E(x,y) -> !E(y,x)\n").unwrap_err(),
            Error::Syntax { line: 2, .. }
        ));
        assert!(matches!(
            parse_theory("relation E 2\nforbid E(x,y) &\n").unwrap_err(),
            Error::Syntax { line: 2, col: 16, .. }
        ));
    }
}
