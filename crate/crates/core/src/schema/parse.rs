use std::sync::Arc;

use super::{canonical_order, Decision, GArg, GuardAtom, GuardLit, Pattern, Slot, TypeSchema};
use crate::error::{Error, Result};
use crate::logic::lexer::{raw_conj, raw_lit, Cursor, RawArg, Tok};
use crate::logic::{Backend, OrderFlavor, TheorySpec};
use crate::order::{parse_order_block, CutType};

/// One block of a schema file.
#[derive(Clone, Debug, PartialEq)]
pub enum SchemaItem {
    Type(TypeSchema),
    Order(CutType),
}

impl SchemaItem {
    pub fn name(&self) -> &str {
        match self {
            SchemaItem::Type(t) => &t.name,
            SchemaItem::Order(c) => &c.name,
        }
    }
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

/// Splits a file into blocks at `type` / `order-type` headers and parses
/// each. `resolve` maps the theory name in a `type` header to a theory.
pub fn parse_schema_file(
    text: &str,
    resolve: &dyn Fn(&str) -> Result<Arc<TheorySpec>>,
) -> Result<Vec<SchemaItem>> {
    let mut blocks: Vec<Vec<(usize, &str)>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let cur = Cursor::new(line, lineno)?;
        if cur.is_empty() {
            continue;
        }
        let first = line.split_whitespace().next().unwrap_or("");
        if first == "type" || first == "order" || first == "order-type" {
            blocks.push(Vec::new());
        }
        match blocks.last_mut() {
            Some(b) => b.push((lineno, line)),
            None => {
                return Err(syntax(
                    lineno,
                    1,
                    "expected a `type` or `order-type` header",
                ))
            }
        }
    }
    let mut out: Vec<SchemaItem> = Vec::new();
    for b in blocks {
        let item = if b[0].1.trim_start().starts_with("order-type") {
            SchemaItem::Order(parse_order_block(&b)?)
        } else {
            SchemaItem::Type(parse_type_block(&b, resolve)?)
        };
        if out.iter().any(|o| o.name() == item.name()) {
            return Err(Error::DuplicateName(item.name().to_string()));
        }
        out.push(item);
    }
    Ok(out)
}

/// Parses a single `type` block over the given theory.
pub fn parse_schema(text: &str, theory: &Arc<TheorySpec>) -> Result<TypeSchema> {
    let th = theory.clone();
    let resolve = move |name: &str| {
        if name.eq_ignore_ascii_case(&th.name) {
            Ok(th.clone())
        } else {
            Err(Error::UnknownName(name.to_string()))
        }
    };
    let mut items = parse_schema_file(text, &resolve)?;
    match (items.pop(), items.is_empty()) {
        (Some(SchemaItem::Type(t)), true) => Ok(t),
        _ => Err(Error::InvalidSchema(
            "expected exactly one `type` block".into(),
        )),
    }
}

fn parse_type_block(
    lines: &[(usize, &str)],
    resolve: &dyn Fn(&str) -> Result<Arc<TheorySpec>>,
) -> Result<TypeSchema> {
    let (hline, htext) = lines[0];
    let mut cur = Cursor::new(htext, hline)?;
    cur.expect(&Tok::Ident("type".into()), "`type`")?;
    let name = cur.ident("a type name")?;
    cur.expect(&Tok::Ident("over".into()), "`over`")?;
    let tcol = cur.col();
    let tname = cur.ident("a theory name")?;
    cur.expect(&Tok::Ident("vars".into()), "`vars`")?;
    let vars = cur.ident_list("a variable name")?;
    cur.finish()?;
    let theory = resolve(&tname).map_err(|e| match e {
        Error::UnknownName(n) => syntax(hline, tcol, format!("unknown theory `{n}`")),
        other => other,
    })?;
    if theory.backend != Backend::Amalgamation {
        let flavor = match theory.backend {
            Backend::DenseOrder(OrderFlavor::Dlo) => "DLO",
            _ => "DLOP",
        };
        return Err(syntax(
            hline,
            tcol,
            format!("{flavor} types are written as `order-type` blocks"),
        ));
    }
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].contains(v) {
            return Err(Error::DuplicateName(v.clone()));
        }
    }
    let mut s = TypeSchema::empty(&name, theory.clone(), vars);
    let sig = theory.signature.clone();

    // Constants and realised declarations first, so rules may precede them.
    let mut later = Vec::new();
    for &(lineno, text) in &lines[1..] {
        let mut cur = Cursor::new(text, lineno)?;
        let kw_col = cur.col();
        match cur.peek() {
            Some(Tok::Ident(k)) if k == "const" => {
                cur.next();
                for c in cur.ident_list("a constant name")? {
                    if s.constants.contains(&c) || s.vars.contains(&c) {
                        return Err(Error::DuplicateName(c));
                    }
                    s.constants.push(c);
                }
                cur.finish()?;
            }
            Some(Tok::Ident(k)) if k == "realised" || k == "realized" => {
                cur.next();
                let vcol = cur.col();
                let v = cur.ident("a variable")?;
                cur.expect(&Tok::Eq, "`=`")?;
                let c = cur.ident("a base constant")?;
                cur.finish()?;
                let vi = s
                    .var_index(&v)
                    .ok_or_else(|| syntax(lineno, vcol, format!("`{v}` is not a variable")))?;
                if s.vars.contains(&c) {
                    return Err(syntax(lineno, vcol, "a variable cannot be realised by a variable"));
                }
                let ci = match s.const_index(&c) {
                    Some(ci) => ci,
                    None => {
                        s.constants.push(c);
                        s.constants.len() - 1
                    }
                };
                if s.realised[vi].is_some() {
                    return Err(syntax(lineno, vcol, format!("`{v}` realised twice")));
                }
                s.realised[vi] = Some(ci);
            }
            Some(Tok::Ident(_)) => later.push((lineno, text, kw_col)),
            _ => return cur.error("expected a schema line"),
        }
    }
    for (lineno, text, _) in later {
        let mut cur = Cursor::new(text, lineno)?;
        if cur.keyword_is("fact") {
            cur.next();
            let lit = raw_lit(&mut cur)?;
            cur.finish()?;
            let mut args = Vec::new();
            for a in &lit.args {
                match a {
                    RawArg::Name(c) => args.push(
                        s.const_index(c)
                            .ok_or_else(|| syntax(lineno, lit.col, format!("`{c}` is not a constant")))?,
                    ),
                    RawArg::Wild(_) => return Err(syntax(lineno, lit.col, "facts mention constants only")),
                }
            }
            match &lit.rel {
                Some(r) => {
                    let r = sig.resolve(r, args.len())?;
                    s.facts.push((r, args, lit.positive));
                }
                None if lit.positive && args[0] != args[1] => {
                    return Err(syntax(lineno, lit.col, "distinct constants cannot be equal"))
                }
                None => {}
            }
            continue;
        }
        if cur.keyword_is("internal") {
            cur.next();
            let lit = raw_lit(&mut cur)?;
            cur.finish()?;
            let mut args = Vec::new();
            for a in &lit.args {
                let RawArg::Name(v) = a else {
                    return Err(syntax(lineno, lit.col, "internal atoms mention variables only"));
                };
                let vi = s
                    .var_index(v)
                    .filter(|&i| s.realised[i].is_none())
                    .ok_or_else(|| {
                        syntax(lineno, lit.col, format!("`{v}` is not a non-realised variable"))
                    })?;
                args.push(vi);
            }
            match &lit.rel {
                Some(r) => {
                    let r = sig.resolve(r, args.len())?;
                    if s.internal_value(r, &args) == Some(!lit.positive) {
                        return Err(syntax(lineno, lit.col, "contradicts an earlier internal atom"));
                    }
                    s.set_internal(r, &args, lit.positive);
                }
                None => {
                    if lit.positive || args[0] == args[1] {
                        return Err(syntax(
                            lineno,
                            lit.col,
                            "designated variables are pairwise distinct",
                        ));
                    }
                }
            }
            continue;
        }
        parse_rule_line(&mut s, &mut cur, lineno, text)?;
    }
    Ok(s)
}

fn parse_rule_line(s: &mut TypeSchema, cur: &mut Cursor, lineno: usize, text: &str) -> Result<()> {
    let sig = s.theory.signature.clone();
    let col = cur.col();
    let lit = raw_lit(cur)?;
    let Some(rel) = lit.rel.clone() else {
        return Err(syntax(lineno, col, "expected a rule `R(...) := value`"));
    };
    if !lit.positive {
        return Err(syntax(lineno, col, "rule heads are written without `!`"));
    }
    cur.expect(&Tok::Assign, "`:=`")?;
    let vcol = cur.col();
    let value = match cur.ident("`true` or `false`")?.as_str() {
        "true" => true,
        "false" => false,
        other => return Err(syntax(lineno, vcol, format!("expected `true` or `false`, found `{other}`"))),
    };
    let guard_raw = if cur.keyword_is("if") {
        cur.next();
        raw_conj(cur)?
    } else {
        Vec::new()
    };
    cur.finish()?;

    let r = sig.resolve(&rel, lit.args.len())?;
    let mut slots = Vec::new();
    let mut names: Vec<Option<String>> = Vec::new();
    for a in &lit.args {
        match a {
            RawArg::Name(v) => {
                let vi = s
                    .var_index(v)
                    .filter(|&i| s.realised[i].is_none())
                    .ok_or_else(|| {
                        syntax(
                            lineno,
                            col,
                            format!("slot `{v}` must be a non-realised designated variable or a wildcard"),
                        )
                    })?;
                slots.push(Slot::Var(vi));
                names.push(None);
            }
            RawArg::Wild(w) => {
                if let Some(w) = w {
                    if names.iter().any(|n| n.as_deref() == Some(w.as_str())) {
                        return Err(syntax(lineno, col, format!("wildcard `*{w}` used twice")));
                    }
                }
                slots.push(Slot::Wild);
                names.push(w.clone());
            }
        }
    }
    if !slots.iter().any(|x| matches!(x, Slot::Var(_))) {
        return Err(Error::NoDesignatedVariable(text.trim().to_string()));
    }
    if !slots.contains(&Slot::Wild) {
        return Err(syntax(lineno, col, "atoms among variables are written as `internal` lines"));
    }
    if slots.iter().filter(|x| **x == Slot::Wild).count() > 3 {
        return Err(syntax(lineno, col, "at most 3 wildcards per rule"));
    }
    let order = canonical_order(&slots, s.theory.is_symmetric(r));
    let mut pattern = Vec::new();
    let mut wild_names: Vec<Option<String>> = Vec::new();
    for i in order {
        pattern.push(slots[i]);
        if slots[i] == Slot::Wild {
            wild_names.push(names[i].clone());
        }
    }
    let resolve_arg = |a: &RawArg| -> Result<GArg> {
        match a {
            RawArg::Wild(Some(w)) => wild_names
                .iter()
                .position(|n| n.as_deref() == Some(w.as_str()))
                .map(GArg::Wild)
                .ok_or_else(|| Error::BadGuard(format!("*{w}"))),
            RawArg::Wild(None) => Err(Error::BadGuard("*".into())),
            RawArg::Name(c) => {
                if let Some(ci) = s.const_index(c) {
                    Ok(GArg::Const(ci))
                } else if let Some(ci) = s.var_index(c).and_then(|i| s.realised[i]) {
                    Ok(GArg::Const(ci))
                } else {
                    Err(Error::BadGuard(c.clone()))
                }
            }
        }
    };
    let mut guard = Vec::new();
    for g in &guard_raw {
        let args = g.args.iter().map(resolve_arg).collect::<Result<Vec<_>>>()?;
        let atom = match &g.rel {
            Some(name) => GuardAtom::Rel(sig.resolve(name, args.len())?, args),
            None => GuardAtom::Eq(args[0], args[1]),
        };
        guard.push(GuardLit {
            atom,
            positive: g.positive,
        });
    }
    let fam = s
        .families
        .entry(Pattern { rel: r, slots: pattern })
        .or_default();
    if fam.default.is_some() {
        return Err(syntax(lineno, col, "rule follows an unguarded default for the same pattern"));
    }
    if guard.is_empty() {
        fam.default = Some(value);
    } else {
        fam.decisions.push(Decision { guard, value });
    }
    Ok(())
}

