//! Dense linear orders (optionally with a dense-codense predicate) over a
//! finite universe skeleton of named points and invariant cuts.

mod consistency;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

pub use consistency::{dlo_consistent, dlo_realize, OrderLit, OrderScope, UPlace};

use crate::error::{Error, Result};
use crate::logic::lexer::{Cursor, Tok};
use crate::logic::OrderFlavor;

/// Which side of a cut has small cofinality. `FromBelow` means the small
/// side is on the right, so realizations approach the cut from below.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    FromBelow,
    FromAbove,
}

impl Side {
    fn keyword(self) -> &'static str {
        match self {
            Side::FromBelow => "below",
            Side::FromAbove => "above",
        }
    }
}

/// What lies on the small side of a cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CutKind {
    /// A small unnamed sequence of universe points.
    Generic,
    /// Nothing: the cut is at plus or minus infinity.
    Extreme,
    /// The neighbouring named point, with nothing in between.
    Adjacent,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Item {
    Point { name: String, bit: Option<bool> },
    Cut { name: String, side: Side, kind: CutKind },
}

impl Item {
    pub fn name(&self) -> &str {
        match self {
            Item::Point { name, .. } | Item::Cut { name, .. } => name,
        }
    }
}

/// Skeleton boundary: a named point or one wall of a cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Boundary {
    Point(usize),
    Lo(usize),
    Hi(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderUniverse {
    pub flavor: OrderFlavor,
    /// Items in increasing order.
    pub items: Vec<Item>,
}

impl OrderUniverse {
    pub fn new(flavor: OrderFlavor, items: Vec<Item>) -> Result<Self> {
        let u = OrderUniverse { flavor, items };
        u.check()?;
        Ok(u)
    }

    fn check(&self) -> Result<()> {
        let last = self.items.len().saturating_sub(1);
        for (i, it) in self.items.iter().enumerate() {
            if self.items[..i].iter().any(|o| o.name() == it.name()) {
                return Err(Error::DuplicateName(it.name().to_string()));
            }
            match it {
                Item::Point { name, bit } => {
                    if (self.flavor == OrderFlavor::Dlop) != bit.is_some() {
                        return Err(Error::Invalid(format!(
                            "point `{name}`: predicate bits are required in DLOP and absent in DLO"
                        )));
                    }
                }
                Item::Cut { name, side, kind } => {
                    let ok = match (kind, side) {
                        (CutKind::Generic, _) => true,
                        (CutKind::Extreme, Side::FromBelow) => i == last,
                        (CutKind::Extreme, Side::FromAbove) => i == 0,
                        (CutKind::Adjacent, Side::FromBelow) => {
                            matches!(self.items.get(i + 1), Some(Item::Point { .. }))
                        }
                        (CutKind::Adjacent, Side::FromAbove) => {
                            i > 0 && matches!(self.items[i - 1], Item::Point { .. })
                        }
                    };
                    if !ok {
                        return Err(Error::Invalid(format!(
                            "cut `{name}` is misplaced for its kind"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn item_index(&self, name: &str) -> Option<usize> {
        self.items.iter().position(|i| i.name() == name)
    }

    pub fn cut_index(&self, name: &str) -> Result<usize> {
        match self.item_index(name) {
            Some(i) if matches!(self.items[i], Item::Cut { .. }) => Ok(i),
            _ => Err(Error::UnknownName(name.to_string())),
        }
    }

    pub fn point_index(&self, name: &str) -> Result<usize> {
        match self.item_index(name) {
            Some(i) if matches!(self.items[i], Item::Point { .. }) => Ok(i),
            _ => Err(Error::UnknownName(name.to_string())),
        }
    }

    pub fn side(&self, cut: usize) -> Side {
        match &self.items[cut] {
            Item::Cut { side, .. } => *side,
            Item::Point { .. } => panic!("item {cut} is not a cut"),
        }
    }

    pub fn boundaries(&self) -> Vec<Boundary> {
        let mut out = Vec::new();
        for (i, it) in self.items.iter().enumerate() {
            match it {
                Item::Point { .. } => out.push(Boundary::Point(i)),
                Item::Cut { .. } => {
                    out.push(Boundary::Lo(i));
                    out.push(Boundary::Hi(i));
                }
            }
        }
        out
    }

    /// Slots (open regions between consecutive boundaries) that contain
    /// universe points. Slot `s` lies between boundary `s-1` and boundary `s`.
    pub fn open_slots(&self) -> Vec<usize> {
        let b = self.boundaries();
        (0..=b.len())
            .filter(|&s| {
                let left = if s > 0 { Some(b[s - 1]) } else { None };
                let right = b.get(s).copied();
                if let (Some(Boundary::Lo(_)), Some(Boundary::Hi(_))) = (left, right) {
                    return false;
                }
                if let Some(Boundary::Hi(c)) = left {
                    if let Item::Cut { side: Side::FromBelow, kind, .. } = &self.items[c] {
                        if *kind != CutKind::Generic {
                            return false;
                        }
                    }
                }
                if let Some(Boundary::Lo(c)) = right {
                    if let Item::Cut { side: Side::FromAbove, kind, .. } = &self.items[c] {
                        if *kind != CutKind::Generic {
                            return false;
                        }
                    }
                }
                true
            })
            .collect()
    }

    pub fn boundary_name(&self, b: Boundary) -> String {
        match b {
            Boundary::Point(i) => self.items[i].name().to_string(),
            Boundary::Lo(i) => format!("<{}", self.items[i].name()),
            Boundary::Hi(i) => format!("{}>", self.items[i].name()),
        }
    }

    fn universe_lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for it in &self.items {
            match it {
                Item::Point { name, bit } => out.push(match bit {
                    Some(b) => format!("point {name} in {}", bit_word(*b)),
                    None => format!("point {name}"),
                }),
                Item::Cut { name, side, kind } => {
                    let k = match kind {
                        CutKind::Generic => "",
                        CutKind::Extreme => " extreme",
                        CutKind::Adjacent => " adjacent",
                    };
                    out.push(format!("cut {name} from {}{k}", side.keyword()))
                }
            }
        }
        if !self.items.is_empty() {
            let names: Vec<&str> = self.items.iter().map(Item::name).collect();
            out.push(format!("layout {}", names.join(" < ")));
        }
        out
    }
}

fn bit_word(b: bool) -> &'static str {
    if b {
        "P"
    } else {
        "notP"
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Placement {
    /// Equal to the named point with this item index.
    Realised(usize),
    AtCut { cut: usize, bit: Option<bool> },
}

/// A global invariant type in a dense order: each variable is realised or
/// sits in an invariant cut; variables sharing a cut are totally ordered.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CutType {
    pub name: String,
    pub universe: Arc<OrderUniverse>,
    pub vars: Vec<String>,
    pub placement: Vec<Placement>,
    /// Variables at each cut, ascending.
    pub cut_orders: BTreeMap<usize, Vec<usize>>,
}

impl CutType {
    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn is_realised(&self) -> bool {
        self.placement.iter().all(|p| matches!(p, Placement::Realised(_)))
    }

    pub fn non_realised(&self) -> Vec<usize> {
        (0..self.vars.len())
            .filter(|&i| matches!(self.placement[i], Placement::AtCut { .. }))
            .collect()
    }

    /// Order literals this type imposes on its own variables, relative to the
    /// universe skeleton.
    pub fn literals(&self) -> Vec<OrderLit> {
        let u = &self.universe;
        let mut out = Vec::new();
        for (i, p) in self.placement.iter().enumerate() {
            let v = self.vars[i].clone();
            match p {
                Placement::Realised(a) => out.push(OrderLit::Eq(v, u.items[*a].name().to_string())),
                Placement::AtCut { cut, bit } => {
                    out.push(OrderLit::InCut(v.clone(), u.items[*cut].name().to_string()));
                    if let Some(b) = bit {
                        out.push(OrderLit::Pred(v, *b));
                    }
                }
            }
        }
        for vars in self.cut_orders.values() {
            for w in vars.windows(2) {
                out.push(OrderLit::Less(self.vars[w[0]].clone(), self.vars[w[1]].clone()));
            }
        }
        out
    }

    pub fn rename(&self, f: &dyn Fn(&str) -> String) -> CutType {
        CutType {
            vars: self.vars.iter().map(|v| f(v)).collect(),
            ..self.clone()
        }
    }
}

/// Product type: `q` keeps its placement and `p`'s variables sit closer to
/// each shared cut's small side than every variable of `q`.
pub fn cut_tensor(p: &CutType, q: &CutType) -> Result<CutType> {
    if p.universe != q.universe {
        return Err(Error::Invalid(format!(
            "`{}` and `{}` live over different universes",
            p.name, q.name
        )));
    }
    if let Some(v) = p.vars.iter().find(|v| q.vars.contains(v)) {
        return Err(Error::DuplicateName(v.clone()));
    }
    let off = p.vars.len();
    let mut vars = p.vars.clone();
    vars.extend(q.vars.iter().cloned());
    let mut placement = p.placement.clone();
    placement.extend(q.placement.iter().copied());
    let mut cut_orders = BTreeMap::new();
    let cuts: BTreeSet<usize> = p.cut_orders.keys().chain(q.cut_orders.keys()).copied().collect();
    for c in cuts {
        let pv: Vec<usize> = p.cut_orders.get(&c).cloned().unwrap_or_default();
        let qv: Vec<usize> = q
            .cut_orders
            .get(&c)
            .map(|v| v.iter().map(|i| i + off).collect())
            .unwrap_or_default();
        let order = match p.universe.side(c) {
            Side::FromBelow => qv.into_iter().chain(pv).collect(),
            Side::FromAbove => pv.into_iter().chain(qv).collect(),
        };
        cut_orders.insert(c, order);
    }
    Ok(CutType {
        name: format!("{}_{}", p.name, q.name),
        universe: p.universe.clone(),
        vars,
        placement,
        cut_orders,
    })
}

/// `p^n = p(x_{n-1}) ⊗ ... ⊗ p(x_0)`, right-associated.
pub fn cut_power(p: &CutType, n: usize) -> Result<CutType> {
    if n == 0 {
        return Err(Error::Invalid("powers start at 1".into()));
    }
    let mut acc = p.rename(&|v| format!("{v}_0"));
    for i in 1..n {
        let f = p.rename(&|v| format!("{v}_{i}"));
        acc = cut_tensor(&f, &acc)?;
    }
    acc.name = format!("{}_pow{n}", p.name);
    Ok(acc)
}

/// Cut (and predicate bit, in DLOP) of each non-realised coordinate.
pub fn class_invariant(p: &CutType) -> BTreeSet<(String, Option<bool>)> {
    p.placement
        .iter()
        .filter_map(|pl| match pl {
            Placement::AtCut { cut, bit } => {
                Some((p.universe.items[*cut].name().to_string(), *bit))
            }
            Placement::Realised(_) => None,
        })
        .collect()
}

impl fmt::Display for CutType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "order-type {} over {} vars {}",
            self.name,
            self.universe.flavor.keyword(),
            self.vars.join(",")
        )?;
        for l in self.universe.universe_lines() {
            writeln!(f, "{l}")?;
        }
        for (i, p) in self.placement.iter().enumerate() {
            match p {
                Placement::Realised(a) => {
                    writeln!(f, "{} = {}", self.vars[i], self.universe.items[*a].name())?
                }
                Placement::AtCut { cut, bit } => {
                    write!(
                        f,
                        "{} at cut {} from {}",
                        self.vars[i],
                        self.universe.items[*cut].name(),
                        self.universe.side(*cut).keyword()
                    )?;
                    match bit {
                        Some(b) => writeln!(f, " in {}", bit_word(*b))?,
                        None => writeln!(f)?,
                    }
                }
            }
        }
        for vars in self.cut_orders.values() {
            for w in vars.windows(2) {
                writeln!(f, "{} < {}", self.vars[w[0]], self.vars[w[1]])?;
            }
        }
        Ok(())
    }
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

fn parse_side(cur: &mut Cursor) -> Result<Side> {
    cur.expect_keyword("from")?;
    if cur.keyword("below") {
        Ok(Side::FromBelow)
    } else if cur.keyword("above") {
        Ok(Side::FromAbove)
    } else {
        cur.error("expected `below` or `above`")
    }
}

fn parse_bit(cur: &mut Cursor) -> Result<Option<bool>> {
    if !cur.keyword("in") {
        return Ok(None);
    }
    if cur.keyword("P") {
        Ok(Some(true))
    } else if cur.keyword("notP") {
        Ok(Some(false))
    } else {
        cur.error("expected `P` or `notP`")
    }
}

/// Parses one `order-type` block (lines numbered as in the file).
pub fn parse_order_block(lines: &[(usize, &str)]) -> Result<CutType> {
    let (hline, htext) = lines[0];
    let rest = htext
        .trim_start()
        .strip_prefix("order-type")
        .ok_or_else(|| syntax(hline, 1, "expected `order-type`"))?;
    let mut cur = Cursor::new(rest, hline)?;
    let name = cur.ident("a type name")?;
    cur.expect_keyword("over")?;
    let fcol = cur.col();
    let flavor = match cur.ident("DLO or DLOP")?.to_uppercase().as_str() {
        "DLO" => OrderFlavor::Dlo,
        "DLOP" => OrderFlavor::Dlop,
        other => return Err(syntax(hline, fcol, format!("unknown order theory `{other}`"))),
    };
    cur.expect_keyword("vars")?;
    let vars = cur.ident_list("a variable name")?;
    cur.finish()?;
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].contains(v) {
            return Err(Error::DuplicateName(v.clone()));
        }
    }

    let mut items: Vec<Item> = Vec::new();
    let mut layout: Option<(usize, Vec<String>)> = None;
    let mut var_lines = Vec::new();
    for &(lineno, text) in &lines[1..] {
        let mut cur = Cursor::new(text, lineno)?;
        if cur.keyword("point") {
            let n = cur.ident("a point name")?;
            let bit = parse_bit(&mut cur)?;
            cur.finish()?;
            items.push(Item::Point { name: n, bit });
        } else if cur.keyword("cut") {
            let n = cur.ident("a cut name")?;
            let side = parse_side(&mut cur)?;
            let kind = if cur.keyword("extreme") {
                CutKind::Extreme
            } else if cur.keyword("adjacent") {
                CutKind::Adjacent
            } else {
                CutKind::Generic
            };
            cur.finish()?;
            items.push(Item::Cut { name: n, side, kind });
        } else if cur.keyword("layout") {
            let mut names = vec![cur.ident("an item name")?];
            while cur.eat(&Tok::Lt) {
                names.push(cur.ident("an item name")?);
            }
            cur.finish()?;
            if layout.is_some() {
                return Err(syntax(lineno, 1, "layout given twice"));
            }
            layout = Some((lineno, names));
        } else {
            var_lines.push((lineno, text));
        }
    }
    let items = match layout {
        None => items,
        Some((lineno, names)) => {
            let mut ordered = Vec::new();
            for n in &names {
                let it = items
                    .iter()
                    .find(|i| i.name() == n)
                    .ok_or_else(|| syntax(lineno, 1, format!("layout names undeclared `{n}`")))?;
                if ordered.iter().any(|o: &Item| o.name() == n) {
                    return Err(syntax(lineno, 1, format!("`{n}` appears twice in the layout")));
                }
                ordered.push(it.clone());
            }
            if ordered.len() != items.len() {
                return Err(syntax(lineno, 1, "layout must list every point and cut"));
            }
            ordered
        }
    };
    let universe = Arc::new(OrderUniverse::new(flavor, items)?);

    let mut placement: Vec<Option<Placement>> = vec![None; vars.len()];
    let mut less: Vec<(usize, usize, usize)> = Vec::new();
    for (lineno, text) in var_lines {
        let mut cur = Cursor::new(text, lineno)?;
        let vcol = cur.col();
        let v = cur.ident("a variable")?;
        let vi = vars
            .iter()
            .position(|x| *x == v)
            .ok_or_else(|| syntax(lineno, vcol, format!("`{v}` is not a variable")))?;
        if cur.keyword("at") {
            cur.expect_keyword("cut")?;
            let ccol = cur.col();
            let c = cur.ident("a cut name")?;
            let side = parse_side(&mut cur)?;
            let bit = parse_bit(&mut cur)?;
            cur.finish()?;
            let ci = universe
                .cut_index(&c)
                .map_err(|_| syntax(lineno, ccol, format!("`{c}` is not a declared cut")))?;
            if universe.side(ci) != side {
                return Err(syntax(
                    lineno,
                    ccol,
                    format!("cut `{c}` is approached from the other side"),
                ));
            }
            if (flavor == OrderFlavor::Dlop) != bit.is_some() {
                return Err(syntax(
                    lineno,
                    ccol,
                    "predicate bits are required in DLOP and absent in DLO",
                ));
            }
            if placement[vi].replace(Placement::AtCut { cut: ci, bit }).is_some() {
                return Err(syntax(lineno, vcol, format!("`{v}` placed twice")));
            }
        } else if cur.eat(&Tok::Eq) {
            let pcol = cur.col();
            let a = cur.ident("a base point")?;
            cur.finish()?;
            let ai = universe
                .point_index(&a)
                .map_err(|_| syntax(lineno, pcol, format!("`{a}` is not a declared point")))?;
            if placement[vi].replace(Placement::Realised(ai)).is_some() {
                return Err(syntax(lineno, vcol, format!("`{v}` placed twice")));
            }
        } else if cur.eat(&Tok::Lt) {
            let wcol = cur.col();
            let w = cur.ident("a variable")?;
            cur.finish()?;
            let wi = vars
                .iter()
                .position(|x| *x == w)
                .ok_or_else(|| syntax(lineno, wcol, format!("`{w}` is not a variable")))?;
            less.push((lineno, vi, wi));
        } else {
            return cur.error("expected `at cut`, `=` or `<`");
        }
    }
    let placement: Vec<Placement> = placement
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            p.ok_or_else(|| Error::InvalidSchema(format!("variable `{}` is not placed", vars[i])))
        })
        .collect::<Result<_>>()?;

    let mut cut_orders: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, p) in placement.iter().enumerate() {
        if let Placement::AtCut { cut, .. } = p {
            cut_orders.entry(*cut).or_default().push(i);
        }
    }
    // Position of a variable relative to the skeleton, for cross-cut checks.
    let rank = |i: usize| match placement[i] {
        Placement::Realised(a) => 2 * a + 1,
        Placement::AtCut { cut, .. } => 2 * cut + 1,
    };
    let mut before: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &(lineno, a, b) in &less {
        let same_cut = matches!((placement[a], placement[b]),
            (Placement::AtCut { cut: c1, .. }, Placement::AtCut { cut: c2, .. }) if c1 == c2);
        if same_cut {
            before.insert((a, b));
        } else if rank(a) >= rank(b) {
            return Err(syntax(lineno, 1, format!("`{} < {}` contradicts the layout", vars[a], vars[b])));
        }
    }
    for list in cut_orders.values_mut() {
        // Transitive closure, then sort by the number of predecessors.
        let mut rel = before.clone();
        loop {
            let mut grew = false;
            let snapshot: Vec<(usize, usize)> = rel.iter().copied().collect();
            for &(a, b) in &snapshot {
                for &(c, d) in &snapshot {
                    if b == c && rel.insert((a, d)) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        for &a in list.iter() {
            if rel.contains(&(a, a)) {
                return Err(Error::InvalidSchema(format!(
                    "internal order of `{}` is cyclic",
                    vars[a]
                )));
            }
        }
        for (k, &a) in list.iter().enumerate() {
            for &b in &list[k + 1..] {
                if !rel.contains(&(a, b)) && !rel.contains(&(b, a)) {
                    return Err(Error::InvalidSchema(format!(
                        "`{}` and `{}` share a cut but their order is not given",
                        vars[a], vars[b]
                    )));
                }
            }
        }
        let snapshot = list.clone();
        list.sort_by_key(|&a| snapshot.iter().filter(|&&b| rel.contains(&(b, a))).count());
    }
    Ok(CutType {
        name,
        universe,
        vars,
        placement,
        cut_orders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(text: &str) -> Result<CutType> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| (i + 1, l))
            .collect();
        parse_order_block(&lines)
    }

    const TOP: &str = "order-type p over DLO vars x\ncut top from below extreme\nlayout top\nx at cut top from below\n";

    #[test]
    fn parses_and_prints() {
        let p = block(TOP).unwrap();
        assert_eq!(p.to_string(), TOP);
        assert_eq!(block(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn plus_infinity_square() {
        let p = block(TOP).unwrap();
        let p2 = cut_power(&p, 2).unwrap();
        assert_eq!(p2.vars, vec!["x_1", "x_0"]);
        // x_0 < x_1: the left factor is above.
        assert_eq!(p2.cut_orders[&0], vec![1, 0]);
        assert_eq!(class_invariant(&p2), class_invariant(&p));
    }

    #[test]
    fn from_above_puts_left_factor_below() {
        let src = "order-type p over DLO vars x\npoint a\ncut ap from above adjacent\nlayout a < ap\nx at cut ap from above\n";
        let p = block(src).unwrap();
        let q = p.rename(&|_| "y".into());
        let pq = cut_tensor(&p, &q).unwrap();
        assert_eq!(pq.cut_orders[&1], vec![0, 1]);
    }

    #[test]
    fn rejects_bad_blocks() {
        assert!(block("order-type p over DLO vars x\ncut top from below extreme\nx at cut top from above\n").is_err());
        assert!(block("order-type p over DLOP vars x\ncut top from below extreme\nx at cut top from below\n").is_err());
        assert!(block("order-type p over DLO vars x,y\ncut top from below extreme\nx at cut top from below\ny at cut top from below\n").is_err());
        assert!(block("order-type p over DLO vars x\ncut top from below extreme\npoint a\nlayout top < a\nx = a\n").is_err());
    }
}
