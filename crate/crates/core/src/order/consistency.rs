//! Satisfiability of finite order diagrams over a universe skeleton.

use std::collections::{BTreeSet, HashMap};

use super::{Boundary, Item, OrderUniverse};
use crate::error::{Error, Result};
use crate::logic::OrderFlavor;
use serde::{Deserialize, Serialize};

/// Where an extra universe point sits relative to the skeleton.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UPlace {
    /// Strictly inside an open slot (see [`OrderUniverse::open_slots`]).
    Slot(usize),
    /// Equal to a named point.
    At(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrderLit {
    Less(String, String),
    Eq(String, String),
    Neq(String, String),
    /// The element lies in the named cut.
    InCut(String, String),
    Pred(String, bool),
    Place(String, UPlace),
}

/// The elements a diagram talks about: the universe's named points, extra
/// universe points and free elements of a larger model.
#[derive(Clone, Debug)]
pub struct OrderScope<'a> {
    pub universe: &'a OrderUniverse,
    pub upoints: Vec<String>,
    pub vars: Vec<String>,
}

pub fn dlo_consistent(scope: &OrderScope, lits: &[OrderLit]) -> Result<bool> {
    Ok(dlo_realize(scope, lits)?.is_some())
}

/// An arrangement of the diagram's elements (and cut walls `<c`, `c>`) into
/// ascending equality classes, or `None` if the diagram is unsatisfiable.
pub fn dlo_realize(scope: &OrderScope, lits: &[OrderLit]) -> Result<Option<Vec<Vec<String>>>> {
    let placed: BTreeSet<&str> = lits
        .iter()
        .filter_map(|l| match l {
            OrderLit::Place(u, _) => Some(u.as_str()),
            _ => None,
        })
        .collect();
    let unplaced: Vec<&String> = scope
        .upoints
        .iter()
        .filter(|u| !placed.contains(u.as_str()))
        .collect();
    let mut work = lits.to_vec();
    branch(scope, &unplaced, &mut work)
}

fn branch(
    scope: &OrderScope,
    unplaced: &[&String],
    lits: &mut Vec<OrderLit>,
) -> Result<Option<Vec<Vec<String>>>> {
    let Some((u, rest)) = unplaced.split_first() else {
        return solve(scope, lits);
    };
    let mut options: Vec<UPlace> = scope.universe.open_slots().into_iter().map(UPlace::Slot).collect();
    for it in &scope.universe.items {
        if let Item::Point { name, .. } = it {
            options.push(UPlace::At(name.clone()));
        }
    }
    for o in options {
        lits.push(OrderLit::Place((*u).clone(), o));
        let r = branch(scope, rest, lits)?;
        lits.pop();
        if r.is_some() {
            return Ok(r);
        }
    }
    Ok(None)
}

struct Uf(Vec<usize>);

impl Uf {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let n = self.0[y];
            self.0[y] = r;
            y = n;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[b.max(a)] = a.min(b);
        }
    }
}

fn solve(scope: &OrderScope, lits: &[OrderLit]) -> Result<Option<Vec<Vec<String>>>> {
    let u = scope.universe;
    let bounds = u.boundaries();
    let mut names: Vec<String> = bounds.iter().map(|b| u.boundary_name(*b)).collect();
    let nb = names.len();
    names.extend(scope.upoints.iter().cloned());
    names.extend(scope.vars.iter().cloned());
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.as_str(), i).is_some() {
            return Err(Error::DuplicateName(n.clone()));
        }
    }
    let node = |n: &str| -> Result<usize> {
        index
            .get(n)
            .copied()
            .ok_or_else(|| Error::UnknownName(n.to_string()))
    };
    let bound_of = |b: Boundary| bounds.iter().position(|x| *x == b).unwrap();
    let cut_walls = |c: &str| -> Result<(usize, usize)> {
        let ci = u.cut_index(c)?;
        Ok((bound_of(Boundary::Lo(ci)), bound_of(Boundary::Hi(ci))))
    };
    let open = u.open_slots();

    let n = names.len();
    let mut uf = Uf((0..n).collect());
    let mut edges: Vec<(usize, usize)> = (1..nb).map(|i| (i - 1, i)).collect();
    let mut neq = Vec::new();
    let mut bits: Vec<(usize, bool)> = Vec::new();
    for (i, b) in bounds.iter().enumerate() {
        if let Boundary::Point(p) = b {
            if let Item::Point { bit: Some(v), .. } = &u.items[*p] {
                bits.push((i, *v));
            }
        }
    }
    for l in lits {
        match l {
            OrderLit::Less(a, b) => edges.push((node(a)?, node(b)?)),
            OrderLit::Eq(a, b) => uf.union(node(a)?, node(b)?),
            OrderLit::Neq(a, b) => neq.push((node(a)?, node(b)?)),
            OrderLit::InCut(v, c) => {
                let (lo, hi) = cut_walls(c)?;
                let v = node(v)?;
                edges.push((lo, v));
                edges.push((v, hi));
            }
            OrderLit::Pred(v, b) => {
                if u.flavor == OrderFlavor::Dlo {
                    return Err(Error::Backend("DLO has no predicate".into()));
                }
                bits.push((node(v)?, *b));
            }
            OrderLit::Place(x, UPlace::At(a)) => {
                u.point_index(a)?;
                uf.union(node(x)?, node(a)?);
            }
            OrderLit::Place(x, UPlace::Slot(s)) => {
                if !open.contains(s) {
                    return Ok(None);
                }
                let x = node(x)?;
                if *s > 0 {
                    edges.push((s - 1, x));
                }
                if *s < nb {
                    edges.push((x, *s));
                }
            }
        }
    }
    for (a, b) in neq {
        if uf.find(a) == uf.find(b) {
            return Ok(None);
        }
    }
    let mut class_bit: HashMap<usize, bool> = HashMap::new();
    for (x, b) in bits {
        let r = uf.find(x);
        if *class_bit.entry(r).or_insert(b) != b {
            return Ok(None);
        }
    }
    // Kahn's algorithm over classes, smallest representative first.
    let reps: Vec<usize> = (0..n).map(|i| uf.find(i)).collect();
    let mut succ: HashMap<usize, BTreeSet<usize>> = HashMap::new();
    let mut indeg: HashMap<usize, usize> = reps.iter().map(|&r| (r, 0)).collect();
    for (a, b) in edges {
        let (a, b) = (reps[a], reps[b]);
        if a == b {
            return Ok(None);
        }
        if succ.entry(a).or_default().insert(b) {
            *indeg.get_mut(&b).unwrap() += 1;
        }
    }
    let mut ready: BTreeSet<usize> = indeg.iter().filter(|(_, &d)| d == 0).map(|(&r, _)| r).collect();
    let mut out = Vec::new();
    while let Some(r) = ready.pop_first() {
        out.push(
            (0..n)
                .filter(|&i| reps[i] == r)
                .map(|i| names[i].clone())
                .collect::<Vec<_>>(),
        );
        if let Some(s) = succ.get(&r) {
            for &b in s {
                let d = indeg.get_mut(&b).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.insert(b);
                }
            }
        }
    }
    if out.len() < indeg.len() {
        return Ok(None);
    }
    Ok(Some(out))
}
