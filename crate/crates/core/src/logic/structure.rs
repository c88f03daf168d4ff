use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::signature::{RelId, Signature};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointKind {
    BaseConstant,
    DesignatedVariable,
    FreshParameter,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Point {
    pub id: String,
    pub kind: PointKind,
}

impl Point {
    pub fn new(id: impl Into<String>, kind: PointKind) -> Self {
        Point { id: id.into(), kind }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pred {
    Eq,
    Rel(String),
}

/// A ground literal over named points.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub pred: Pred,
    pub args: Vec<String>,
    pub positive: bool,
}

impl Literal {
    pub fn rel(name: &str, args: &[&str], positive: bool) -> Self {
        Literal {
            pred: Pred::Rel(name.to_string()),
            args: args.iter().map(|s| s.to_string()).collect(),
            positive,
        }
    }

    pub fn eq(a: &str, b: &str, positive: bool) -> Self {
        Literal {
            pred: Pred::Eq,
            args: vec![a.to_string(), b.to_string()],
            positive,
        }
    }

    pub fn negated(&self) -> Self {
        Literal {
            positive: !self.positive,
            ..self.clone()
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.pred {
            Pred::Eq => {
                let op = if self.positive { "=" } else { "!=" };
                write!(f, "{} {} {}", self.args[0], op, self.args[1])
            }
            Pred::Rel(name) => {
                if !self.positive {
                    write!(f, "!")?;
                }
                write!(f, "{}({})", name, self.args.join(","))
            }
        }
    }
}

impl FromStr for Literal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Invalid(format!("cannot read literal `{s}`"));
        if let Some(open) = s.find('(') {
            let (head, rest) = s.split_at(open);
            let (positive, name) = match head.strip_prefix('!') {
                Some(n) => (false, n.trim()),
                None => (true, head.trim()),
            };
            let inner = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(bad)?;
            if name.is_empty() {
                return Err(bad());
            }
            let args: Vec<String> = inner.split(',').map(|a| a.trim().to_string()).collect();
            if args.iter().any(|a| a.is_empty()) {
                return Err(bad());
            }
            return Ok(Literal {
                pred: Pred::Rel(name.to_string()),
                args,
                positive,
            });
        }
        let (a, b, positive) = if let Some((a, b)) = s.split_once("!=") {
            (a, b, false)
        } else if let Some((a, b)) = s.split_once('=') {
            (a, b, true)
        } else {
            return Err(bad());
        };
        let (a, b) = (a.trim(), b.trim());
        if a.is_empty() || b.is_empty() {
            return Err(bad());
        }
        Ok(Literal::eq(a, b, positive))
    }
}

/// Number of slot tuples of the given arity over `n` points.
pub fn tuple_count(n: usize, arity: usize) -> usize {
    n.pow(arity as u32)
}

/// Lexicographic index of a tuple.
pub fn encode_tuple(tuple: &[usize], n: usize) -> usize {
    tuple.iter().fold(0, |acc, &p| acc * n + p)
}

pub fn decode_tuple(mut index: usize, n: usize, arity: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
    out
}

/// All tuples of the given arity over `0..n`, in lexicographic order.
pub fn all_tuples(n: usize, arity: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..tuple_count(n, arity)).map(move |i| decode_tuple(i, n, arity))
}

/// Finitely many named points with a three-valued atom table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialStructure {
    sig: Arc<Signature>,
    points: Vec<Point>,
    tables: Vec<Vec<Option<bool>>>,
}

impl PartialStructure {
    pub fn new(sig: Arc<Signature>) -> Self {
        let tables = sig.ids().map(|r| vec![None; tuple_count(0, sig.arity(r))]).collect();
        PartialStructure {
            sig,
            points: Vec::new(),
            tables,
        }
    }

    pub fn with_points(sig: Arc<Signature>, points: Vec<Point>) -> Result<Self> {
        PartialStructure::new(sig).with_extra_points(points)
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn point_index(&self, id: &str) -> Option<usize> {
        self.points.iter().position(|p| p.id == id)
    }

    pub fn require_point(&self, id: &str) -> Result<usize> {
        self.point_index(id)
            .ok_or_else(|| Error::UnknownName(id.to_string()))
    }

    /// Returns a copy with `extra` appended; existing atoms keep their values.
    pub fn with_extra_points(&self, extra: Vec<Point>) -> Result<Self> {
        let mut points = self.points.clone();
        for p in extra {
            if points.iter().any(|q| q.id == p.id) {
                return Err(Error::DuplicateName(p.id));
            }
            points.push(p);
        }
        let old_n = self.points.len();
        let n = points.len();
        let mut tables = Vec::with_capacity(self.tables.len());
        for r in self.sig.ids() {
            let k = self.sig.arity(r);
            let mut t = vec![None; tuple_count(n, k)];
            if old_n > 0 {
                for (i, v) in self.tables[r.0].iter().enumerate() {
                    if v.is_some() {
                        let tuple = decode_tuple(i, old_n, k);
                        t[encode_tuple(&tuple, n)] = *v;
                    }
                }
            }
            tables.push(t);
        }
        Ok(PartialStructure {
            sig: self.sig.clone(),
            points,
            tables,
        })
    }

    pub fn add_point(&mut self, id: impl Into<String>, kind: PointKind) -> Result<usize> {
        *self = self.with_extra_points(vec![Point::new(id, kind)])?;
        Ok(self.points.len() - 1)
    }

    pub fn rename_point(&mut self, i: usize, id: impl Into<String>) -> Result<()> {
        let id = id.into();
        if self.points.iter().enumerate().any(|(j, p)| j != i && p.id == id) {
            return Err(Error::DuplicateName(id));
        }
        self.points[i].id = id;
        Ok(())
    }

    pub fn set_kind(&mut self, i: usize, kind: PointKind) {
        self.points[i].kind = kind;
    }

    pub fn get(&self, rel: RelId, tuple: &[usize]) -> Option<bool> {
        self.tables[rel.0][encode_tuple(tuple, self.points.len())]
    }

    pub fn set(&mut self, rel: RelId, tuple: &[usize], value: Option<bool>) {
        let n = self.points.len();
        self.tables[rel.0][encode_tuple(tuple, n)] = value;
    }

    pub fn table(&self, rel: RelId) -> &[Option<bool>] {
        &self.tables[rel.0]
    }

    pub fn table_mut(&mut self, rel: RelId) -> &mut [Option<bool>] {
        &mut self.tables[rel.0]
    }

    pub fn is_total(&self) -> bool {
        self.tables.iter().all(|t| t.iter().all(Option::is_some))
    }

    pub fn undecided(&self) -> Vec<(RelId, Vec<usize>)> {
        let n = self.points.len();
        let mut out = Vec::new();
        for r in self.sig.ids() {
            for (i, v) in self.tables[r.0].iter().enumerate() {
                if v.is_none() {
                    out.push((r, decode_tuple(i, n, self.sig.arity(r))));
                }
            }
        }
        out
    }

    pub fn undecided_count(&self) -> usize {
        self.tables.iter().map(|t| t.iter().filter(|v| v.is_none()).count()).sum()
    }

    pub fn literal(&self, rel: RelId, tuple: &[usize], positive: bool) -> Literal {
        Literal {
            pred: Pred::Rel(self.sig.name(rel).to_string()),
            args: tuple.iter().map(|&i| self.points[i].id.clone()).collect(),
            positive,
        }
    }

    pub fn atom_name(&self, rel: RelId, tuple: &[usize]) -> String {
        self.literal(rel, tuple, true).to_string()
    }

    /// Resolves a relational literal to (relation, point tuple).
    pub fn resolve_literal(&self, lit: &Literal) -> Result<(RelId, Vec<usize>)> {
        let name = match &lit.pred {
            Pred::Rel(name) => name,
            Pred::Eq => {
                return Err(Error::Invalid(format!(
                    "equality literal {lit} cannot be stored as an atom"
                )))
            }
        };
        let rel = self.sig.resolve(name, lit.args.len())?;
        let tuple = lit
            .args
            .iter()
            .map(|a| self.require_point(a))
            .collect::<Result<Vec<_>>>()?;
        Ok((rel, tuple))
    }

    /// Sets a relational literal; fails if it contradicts an already decided atom.
    pub fn assert_literal(&mut self, lit: &Literal) -> Result<()> {
        let (rel, tuple) = self.resolve_literal(lit)?;
        match self.get(rel, &tuple) {
            Some(v) if v != lit.positive => Err(Error::Invalid(format!(
                "literal {lit} contradicts the structure"
            ))),
            _ => {
                self.set(rel, &tuple, Some(lit.positive));
                Ok(())
            }
        }
    }

    /// Truth value of a literal; equality is point identity.
    pub fn holds(&self, lit: &Literal) -> Result<Option<bool>> {
        if lit.pred == Pred::Eq {
            let a = self.require_point(&lit.args[0])?;
            let b = self.require_point(&lit.args[1])?;
            return Ok(Some((a == b) == lit.positive));
        }
        let (rel, tuple) = self.resolve_literal(lit)?;
        Ok(self.get(rel, &tuple).map(|v| v == lit.positive))
    }

    pub fn decided_literals(&self) -> Vec<Literal> {
        let n = self.points.len();
        let mut out = Vec::new();
        for r in self.sig.ids() {
            for (i, v) in self.tables[r.0].iter().enumerate() {
                if let Some(v) = v {
                    out.push(self.literal(r, &decode_tuple(i, n, self.sig.arity(r)), *v));
                }
            }
        }
        out
    }

    /// Every decided relational literal whose points all lie in `tuple`.
    /// Fails if any such atom is undecided.
    pub fn qf_type(&self, tuple: &[usize]) -> Result<BTreeSet<Literal>> {
        let n = self.points.len();
        let mut inside = vec![false; n];
        for &p in tuple {
            if p >= n {
                return Err(Error::UnknownName(format!("point #{p}")));
            }
            inside[p] = true;
        }
        let members: Vec<usize> = (0..n).filter(|&i| inside[i]).collect();
        let mut out = BTreeSet::new();
        for r in self.sig.ids() {
            let k = self.sig.arity(r);
            for sub in all_tuples(members.len(), k) {
                let t: Vec<usize> = sub.iter().map(|&i| members[i]).collect();
                match self.get(r, &t) {
                    Some(v) => {
                        out.insert(self.literal(r, &t, v));
                    }
                    None => return Err(Error::UndecidedAtom(self.atom_name(r, &t))),
                }
            }
        }
        Ok(out)
    }

    /// Rebuilds a structure from points and relational literals.
    pub fn from_literals<'a>(
        sig: Arc<Signature>,
        points: Vec<Point>,
        lits: impl IntoIterator<Item = &'a Literal>,
    ) -> Result<Self> {
        let mut s = PartialStructure::with_points(sig, points)?;
        for l in lits {
            if l.pred == Pred::Eq {
                continue;
            }
            s.assert_literal(l)?;
        }
        Ok(s)
    }

    /// The substructure on `keep`, in that order.
    pub fn induced(&self, keep: &[usize]) -> PartialStructure {
        let points: Vec<Point> = keep.iter().map(|&i| self.points[i].clone()).collect();
        let m = keep.len();
        let tables = self
            .sig
            .ids()
            .map(|r| {
                let k = self.sig.arity(r);
                (0..tuple_count(m, k))
                    .map(|i| {
                        let t: Vec<usize> = decode_tuple(i, m, k).iter().map(|&j| keep[j]).collect();
                        self.get(r, &t)
                    })
                    .collect()
            })
            .collect();
        PartialStructure {
            sig: self.sig.clone(),
            points,
            tables,
        }
    }

    /// Identifies point `drop` with point `keep` and removes `drop`.
    /// Returns `None` if two decided atoms disagree after identification.
    pub fn merge(&self, keep: usize, drop: usize) -> Option<PartialStructure> {
        if keep == drop {
            return Some(self.clone());
        }
        let n = self.points.len();
        let map: Vec<usize> = (0..n)
            .map(|i| {
                let i = if i == drop { keep } else { i };
                if i > drop {
                    i - 1
                } else {
                    i
                }
            })
            .collect();
        let mut points = self.points.clone();
        points.remove(drop);
        let m = n - 1;
        let mut tables = Vec::with_capacity(self.tables.len());
        for r in self.sig.ids() {
            let k = self.sig.arity(r);
            let mut t: Vec<Option<bool>> = vec![None; tuple_count(m, k)];
            for (i, v) in self.tables[r.0].iter().enumerate() {
                let Some(v) = v else { continue };
                let old = decode_tuple(i, n, k);
                let new: Vec<usize> = old.iter().map(|&p| map[p]).collect();
                let slot = &mut t[encode_tuple(&new, m)];
                match slot {
                    Some(w) if w != v => return None,
                    _ => *slot = Some(*v),
                }
            }
            tables.push(t);
        }
        Some(PartialStructure {
            sig: self.sig.clone(),
            points,
            tables,
        })
    }

    /// Copies the decided atoms of `other` through the point map
    /// (`map[i]` is the image of other's point `i`). Returns false on a clash.
    pub fn absorb(&mut self, other: &PartialStructure, map: &[usize]) -> bool {
        let n = other.points.len();
        for r in self.sig.ids() {
            let k = self.sig.arity(r);
            for (i, v) in other.tables[r.0].iter().enumerate() {
                let Some(v) = v else { continue };
                let t: Vec<usize> = decode_tuple(i, n, k).iter().map(|&p| map[p]).collect();
                match self.get(r, &t) {
                    Some(w) if w != *v => return false,
                    Some(_) => {}
                    None => self.set(r, &t, Some(*v)),
                }
            }
        }
        true
    }

    /// True if every decided atom of `other` has the same value here
    /// (points matched by id).
    pub fn extends(&self, other: &PartialStructure) -> bool {
        let Some(map) = other
            .points
            .iter()
            .map(|p| self.point_index(&p.id))
            .collect::<Option<Vec<_>>>()
        else {
            return false;
        };
        let n = other.points.len();
        self.sig.ids().all(|r| {
            let k = self.sig.arity(r);
            other.tables[r.0].iter().enumerate().all(|(i, v)| match v {
                None => true,
                Some(v) => {
                    let t: Vec<usize> = decode_tuple(i, n, k).iter().map(|&p| map[p]).collect();
                    self.get(r, &t) == Some(*v)
                }
            })
        })
    }

    pub fn to_dto(&self) -> StructureDto {
        let mut tables = BTreeMap::new();
        for r in self.sig.ids() {
            let s: String = self.tables[r.0]
                .iter()
                .map(|v| match v {
                    Some(true) => '1',
                    Some(false) => '0',
                    None => '?',
                })
                .collect();
            tables.insert(self.sig.name(r).to_string(), s);
        }
        StructureDto {
            points: self.points.clone(),
            tables,
        }
    }

    pub fn from_dto(sig: Arc<Signature>, dto: &StructureDto) -> Result<Self> {
        let mut s = PartialStructure::with_points(sig.clone(), dto.points.clone())?;
        if dto.tables.len() != sig.len() {
            return Err(Error::Invalid("table count does not match the signature".into()));
        }
        for r in sig.ids() {
            let text = dto
                .tables
                .get(sig.name(r))
                .ok_or_else(|| Error::UndeclaredRelation(sig.name(r).to_string()))?;
            let want = tuple_count(s.len(), sig.arity(r));
            if text.chars().count() != want {
                return Err(Error::Invalid(format!(
                    "table for {} has {} entries, expected {want}",
                    sig.name(r),
                    text.chars().count()
                )));
            }
            for (i, c) in text.chars().enumerate() {
                s.tables[r.0][i] = match c {
                    '1' => Some(true),
                    '0' => Some(false),
                    '?' => None,
                    other => {
                        return Err(Error::Invalid(format!("bad table entry `{other}`")))
                    }
                };
            }
        }
        Ok(s)
    }
}

impl fmt::Display for PartialStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<&str> = self.points.iter().map(|p| p.id.as_str()).collect();
        write!(f, "{{{}}}", ids.join(","))?;
        for l in self.decided_literals() {
            write!(f, " {l}")?;
        }
        Ok(())
    }
}

/// Serializable form of a structure: one `0`/`1`/`?` string per relation,
/// indexed by lexicographic tuple order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureDto {
    pub points: Vec<Point>,
    pub tables: BTreeMap<String, String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::signature::Relation;

    fn graph_sig() -> Arc<Signature> {
        Arc::new(Signature::new(vec![Relation { name: "E".into(), arity: 2 }]).unwrap())
    }

    fn pts(ids: &[&str]) -> Vec<Point> {
        ids.iter().map(|i| Point::new(*i, PointKind::FreshParameter)).collect()
    }

    #[test]
    fn tuple_codes_roundtrip() {
        for i in 0..27 {
            assert_eq!(encode_tuple(&decode_tuple(i, 3, 3), 3), i);
        }
        assert_eq!(decode_tuple(5, 3, 2), vec![1, 2]);
    }

    #[test]
    fn literal_text_roundtrip() {
        for s in ["E(a,b)", "!R3(x,y,#0)", "a = b", "y != #1"] {
            let l: Literal = s.parse().unwrap();
            assert_eq!(l.to_string(), s);
        }
        assert!("E(a,)".parse::<Literal>().is_err());
    }

    #[test]
    fn qf_type_on_graph_edge() {
        let mut s = PartialStructure::with_points(graph_sig(), pts(&["a", "b"])).unwrap();
        let e = RelId(0);
        s.set(e, &[0, 1], Some(true));
        s.set(e, &[1, 0], Some(true));
        s.set(e, &[0, 0], Some(false));
        s.set(e, &[1, 1], Some(false));
        let t = s.qf_type(&[0, 1]).unwrap();
        assert!(t.contains(&Literal::rel("E", &["a", "b"], true)));
        assert!(t.contains(&Literal::rel("E", &["b", "a"], true)));
        s.set(e, &[1, 1], None);
        assert!(matches!(s.qf_type(&[0, 1]), Err(Error::UndecidedAtom(_))));
        assert_eq!(s.qf_type(&[0]).unwrap().len(), 1);
    }

    #[test]
    fn merge_detects_clash() {
        let mut s = PartialStructure::with_points(graph_sig(), pts(&["a", "b", "c"])).unwrap();
        let e = RelId(0);
        s.set(e, &[0, 2], Some(true));
        s.set(e, &[1, 2], Some(false));
        assert!(s.merge(0, 1).is_none());
        s.set(e, &[1, 2], Some(true));
        let m = s.merge(0, 1).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.get(e, &[0, 1]), Some(true));
    }

    #[test]
    fn extra_points_keep_atoms() {
        let mut s = PartialStructure::with_points(graph_sig(), pts(&["a", "b"])).unwrap();
        s.set(RelId(0), &[1, 0], Some(true));
        let t = s.with_extra_points(pts(&["c"])).unwrap();
        assert_eq!(t.get(RelId(0), &[1, 0]), Some(true));
        assert_eq!(t.get(RelId(0), &[2, 0]), None);
        assert!(t.extends(&s));
        let back = PartialStructure::from_dto(graph_sig(), &t.to_dto()).unwrap();
        assert_eq!(back, t);
    }
}
