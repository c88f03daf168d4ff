//! Domination between cut types in DLO and DLOP.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{Certificate, CheckOptions, DominationBackend, Verdict};
use crate::error::{Error, Result};
use crate::order::{
    dlo_consistent, dlo_realize, Boundary, CutType, Item, OrderLit, OrderScope, OrderUniverse,
    Placement, Side, UPlace,
};

/// Name of the fresh parameter in targets.
const FRESH: &str = "#0";

/// A complete type over `A` in the joined variables: `A` is the named points
/// plus `slots.len()` extra points in increasing order, and `blocks` lists
/// the non-realised variables in increasing order, equal within a block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderWitness {
    pub slots: Vec<usize>,
    pub left_vars: Vec<String>,
    pub right_vars: Vec<String>,
    pub blocks: Vec<Vec<String>>,
}

impl OrderWitness {
    pub fn base_size(&self) -> usize {
        self.slots.len()
    }

    pub fn upoints(&self) -> Vec<String> {
        (0..self.slots.len()).map(|i| format!("a{i}")).collect()
    }

    /// Literal form: the base points' placement and the variables' order.
    pub fn literals(&self) -> Vec<OrderLit> {
        let ups = self.upoints();
        let mut out: Vec<OrderLit> = ups
            .iter()
            .zip(&self.slots)
            .map(|(a, &s)| OrderLit::Place(a.clone(), UPlace::Slot(s)))
            .collect();
        for w in ups.windows(2) {
            out.push(OrderLit::Less(w[0].clone(), w[1].clone()));
        }
        for b in &self.blocks {
            for v in &b[1..] {
                out.push(OrderLit::Eq(b[0].clone(), v.clone()));
            }
        }
        for w in self.blocks.windows(2) {
            out.push(OrderLit::Less(w[0][0].clone(), w[1][0].clone()));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct OrderBackend;

fn same_universe<'a>(p: &'a CutType, q: &CutType) -> Result<&'a OrderUniverse> {
    if p.universe != q.universe {
        return Err(Error::Invalid(format!(
            "`{}` and `{}` live over different universes",
            p.name, q.name
        )));
    }
    if let Some(v) = p.vars.iter().find(|v| q.vars.contains(v)) {
        return Err(Error::DuplicateName(v.clone()));
    }
    Ok(&p.universe)
}

fn boundary_index(u: &OrderUniverse, b: Boundary) -> usize {
    u.boundaries().iter().position(|x| *x == b).unwrap()
}

/// Whether an element in slot `s` lies below the cut `cut`.
fn slot_below(u: &OrderUniverse, s: usize, cut: usize) -> bool {
    s <= boundary_index(u, Boundary::Lo(cut))
}

/// Ordered set partitions of `items` into blocks that are singletons or
/// pairs `{left, right}`.
fn arrangements(left: &[String], right: &[String]) -> Vec<Vec<Vec<String>>> {
    fn go(
        left: &[String],
        rest: &mut Vec<String>,
        cur: &mut Vec<Vec<String>>,
        out: &mut Vec<Vec<Vec<String>>>,
    ) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let a = rest.remove(i);
            cur.push(vec![a.clone()]);
            go(left, rest, cur, out);
            cur.pop();
            if left.contains(&a) {
                for j in 0..rest.len() {
                    if left.contains(&rest[j]) {
                        continue;
                    }
                    let b = rest.remove(j);
                    cur.push(vec![a.clone(), b.clone()]);
                    go(left, rest, cur, out);
                    cur.pop();
                    rest.insert(j, b);
                }
            }
            rest.insert(i, a);
        }
    }
    let mut all: Vec<String> = left.to_vec();
    all.extend(right.iter().cloned());
    let mut out = Vec::new();
    go(left, &mut all, &mut Vec::new(), &mut out);
    out
}

/// Nondecreasing sequences of length `m` over `slots`.
fn slot_choices(slots: &[usize], m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for prefix in slot_choices(slots, m - 1) {
        for &s in slots {
            if prefix.last().map_or(true, |&l| l <= s) {
                let mut v = prefix.clone();
                v.push(s);
                out.push(v);
            }
        }
    }
    out
}

fn scope<'a>(u: &'a OrderUniverse, p: &CutType, q: &CutType, upoints: Vec<String>) -> OrderScope<'a> {
    let mut vars = p.vars.clone();
    vars.extend(q.vars.iter().cloned());
    OrderScope {
        universe: u,
        upoints,
        vars,
    }
}

/// Alternatives whose disjunction is the negation of `target`.
fn negations(target: &OrderLit) -> Vec<OrderLit> {
    match target {
        OrderLit::Less(a, b) => vec![
            OrderLit::Less(b.clone(), a.clone()),
            OrderLit::Eq(a.clone(), b.clone()),
        ],
        OrderLit::Eq(a, b) => vec![OrderLit::Neq(a.clone(), b.clone())],
        OrderLit::Neq(a, b) => vec![OrderLit::Eq(a.clone(), b.clone())],
        _ => Vec::new(),
    }
}

/// A realization of `lits` plus one negation alternative, if any.
fn refute(sc: &OrderScope, lits: &[OrderLit], target: &OrderLit) -> Result<Option<Vec<Vec<String>>>> {
    for alt in negations(target) {
        let mut all = lits.to_vec();
        all.push(alt);
        if let Some(arr) = dlo_realize(sc, &all)? {
            return Ok(Some(arr));
        }
    }
    Ok(None)
}

impl OrderBackend {
    /// What the premise and the witness say: all of `p`, the base's
    /// placement, the variables' order, and the goal variables' relations to
    /// the base and their predicate bits.
    fn premise(&self, p: &CutType, q: &CutType, r: &OrderWitness) -> Vec<OrderLit> {
        let u = &*p.universe;
        let mut out = p.literals();
        out.extend(r.literals());
        let ups = r.upoints();
        for (i, pl) in q.placement.iter().enumerate() {
            let v = &q.vars[i];
            match pl {
                Placement::Realised(a) => out.push(OrderLit::Eq(v.clone(), u.items[*a].name().to_string())),
                Placement::AtCut { cut, bit } => {
                    for (k, it) in u.items.iter().enumerate() {
                        if let Item::Point { name, .. } = it {
                            out.push(if k < *cut {
                                OrderLit::Less(name.clone(), v.clone())
                            } else {
                                OrderLit::Less(v.clone(), name.clone())
                            });
                        }
                    }
                    for (a, &s) in ups.iter().zip(&r.slots) {
                        out.push(if slot_below(u, s, *cut) {
                            OrderLit::Less(a.clone(), v.clone())
                        } else {
                            OrderLit::Less(v.clone(), a.clone())
                        });
                    }
                    // Small sides of cuts are part of the base.
                    for (k, it) in u.items.iter().enumerate() {
                        if let Item::Cut { side, .. } = it {
                            let wall = match side {
                                Side::FromBelow => Boundary::Hi(k),
                                Side::FromAbove => Boundary::Lo(k),
                            };
                            let w = u.boundary_name(wall);
                            out.push(if boundary_index(u, wall) < boundary_index(u, Boundary::Hi(*cut)) {
                                OrderLit::Less(w, v.clone())
                            } else {
                                OrderLit::Less(v.clone(), w)
                            });
                        }
                    }
                    if let Some(b) = bit {
                        out.push(OrderLit::Pred(v.clone(), *b));
                    }
                }
            }
        }
        out
    }

    /// Placements of one fresh point relative to the base: its slot and the
    /// number of base points below it in that slot.
    fn fresh_placements(&self, u: &OrderUniverse, r: &OrderWitness) -> Vec<Vec<OrderLit>> {
        let ups = r.upoints();
        let mut out = Vec::new();
        for s in u.open_slots() {
            let inside: Vec<&String> = ups.iter().zip(&r.slots).filter(|(_, &t)| t == s).map(|(a, _)| a).collect();
            for pos in 0..=inside.len() {
                let mut lits = vec![OrderLit::Place(FRESH.to_string(), UPlace::Slot(s))];
                for (k, a) in inside.iter().enumerate() {
                    lits.push(if k < pos {
                        OrderLit::Less((*a).clone(), FRESH.to_string())
                    } else {
                        OrderLit::Less(FRESH.to_string(), (*a).clone())
                    });
                }
                out.push(lits);
            }
        }
        out
    }

    fn goal_target(&self, q: &CutType, var: usize, slot: usize) -> OrderLit {
        let Placement::AtCut { cut, .. } = q.placement[var] else {
            unreachable!("targets are for non-realised variables")
        };
        let v = q.vars[var].clone();
        if slot_below(&q.universe, slot, cut) {
            OrderLit::Less(FRESH.to_string(), v)
        } else {
            OrderLit::Less(v, FRESH.to_string())
        }
    }

    fn check_shape(&self, p: &CutType, q: &CutType, r: &OrderWitness) -> Result<()> {
        same_universe(p, q)?;
        if r.left_vars != p.vars || r.right_vars != q.vars {
            return Err(Error::Invalid(format!(
                "witness joins {:?} and {:?}, not `{}` and `{}`",
                r.left_vars, r.right_vars, p.name, q.name
            )));
        }
        Ok(())
    }
}

fn slot_of(lits: &[OrderLit]) -> Option<usize> {
    lits.iter().find_map(|l| match l {
        OrderLit::Place(x, UPlace::Slot(s)) if x == FRESH => Some(*s),
        _ => None,
    })
}

/// Whether an arrangement into ascending classes satisfies `lits` together
/// with the universe skeleton.
pub fn arrangement_satisfies(u: &OrderUniverse, arr: &[Vec<String>], lits: &[OrderLit]) -> bool {
    let pos = |n: &str| arr.iter().position(|c| c.iter().any(|x| x == n));
    let bounds = u.boundaries();
    let bpos: Vec<Option<usize>> = bounds.iter().map(|b| pos(&u.boundary_name(*b))).collect();
    if bpos.iter().any(Option::is_none) || bpos.windows(2).any(|w| w[0] >= w[1]) {
        return false;
    }
    let bit_of = |n: &str| -> Vec<bool> {
        let Some(c) = pos(n) else { return Vec::new() };
        let mut bits = Vec::new();
        for x in &arr[c] {
            if let Some(i) = u.item_index(x) {
                if let Item::Point { bit: Some(b), .. } = &u.items[i] {
                    bits.push(*b);
                }
            }
        }
        bits
    };
    let wall = |c: &str, hi: bool| -> Option<usize> {
        let ci = u.cut_index(c).ok()?;
        pos(&u.boundary_name(if hi { Boundary::Hi(ci) } else { Boundary::Lo(ci) }))
    };
    let mut preds: Vec<(String, bool)> = Vec::new();
    for l in lits {
        let ok = match l {
            OrderLit::Less(a, b) => matches!((pos(a), pos(b)), (Some(x), Some(y)) if x < y),
            OrderLit::Eq(a, b) => matches!((pos(a), pos(b)), (Some(x), Some(y)) if x == y),
            OrderLit::Neq(a, b) => matches!((pos(a), pos(b)), (Some(x), Some(y)) if x != y),
            OrderLit::InCut(v, c) => {
                matches!((wall(c, false), pos(v), wall(c, true)), (Some(a), Some(x), Some(b)) if a < x && x < b)
            }
            OrderLit::Pred(v, b) => {
                preds.push((v.clone(), *b));
                bit_of(v).iter().all(|x| x == b)
            }
            OrderLit::Place(x, UPlace::At(a)) => {
                u.point_index(a).is_ok() && matches!((pos(x), pos(a)), (Some(i), Some(j)) if i == j)
            }
            OrderLit::Place(x, UPlace::Slot(s)) => {
                let lo = if *s > 0 { bpos[*s - 1] } else { None };
                let hi = bpos.get(*s).copied().flatten();
                u.open_slots().contains(s)
                    && match pos(x) {
                        Some(i) => lo.map_or(true, |l| l < i) && hi.map_or(true, |h| i < h),
                        None => false,
                    }
            }
        };
        if !ok {
            return false;
        }
    }
    // Elements in one class must agree on the predicate.
    for (v, b) in &preds {
        for (w, c) in &preds {
            if b != c && pos(v) == pos(w) {
                return false;
            }
        }
    }
    true
}

impl DominationBackend for OrderBackend {
    type Schema = CutType;
    type Witness = OrderWitness;

    fn witnesses(&self, p: &CutType, q: &CutType, base_size: usize) -> Result<Vec<OrderWitness>> {
        let u = same_universe(p, q)?;
        let left: Vec<String> = p.non_realised().iter().map(|&i| p.vars[i].clone()).collect();
        let right: Vec<String> = q.non_realised().iter().map(|&i| q.vars[i].clone()).collect();
        let arrs = arrangements(&left, &right);
        let mut out = Vec::new();
        for slots in slot_choices(&u.open_slots(), base_size) {
            for blocks in &arrs {
                let w = OrderWitness {
                    slots: slots.clone(),
                    left_vars: p.vars.clone(),
                    right_vars: q.vars.clone(),
                    blocks: blocks.clone(),
                };
                let mut lits = p.literals();
                lits.extend(q.literals());
                lits.extend(w.literals());
                if dlo_consistent(&scope(u, p, q, w.upoints()), &lits)? {
                    out.push(w);
                }
            }
        }
        Ok(out)
    }

    fn check_witness(&self, p: &CutType, q: &CutType, r: &OrderWitness) -> Result<bool> {
        self.check_shape(p, q, r)?;
        let u = &*p.universe;
        let mut expected: Vec<&String> = p.non_realised().iter().map(|&i| &p.vars[i]).collect();
        expected.extend(q.non_realised().iter().map(|&i| &q.vars[i]));
        let mut listed: Vec<&String> = r.blocks.iter().flatten().collect();
        expected.sort();
        listed.sort();
        if expected != listed {
            return Ok(false);
        }
        for b in &r.blocks {
            let ok = match b.as_slice() {
                [_] => true,
                [x, y] => {
                    (p.vars.contains(x) && q.vars.contains(y)) || (q.vars.contains(x) && p.vars.contains(y))
                }
                _ => false,
            };
            if !ok {
                return Ok(false);
            }
        }
        let open = u.open_slots();
        if r.slots.iter().any(|s| !open.contains(s)) || r.slots.windows(2).any(|w| w[0] > w[1]) {
            return Ok(false);
        }
        let mut lits = p.literals();
        lits.extend(q.literals());
        lits.extend(r.literals());
        dlo_consistent(&scope(u, p, q, r.upoints()), &lits)
    }

    fn swap(&self, w: &OrderWitness) -> OrderWitness {
        OrderWitness {
            slots: w.slots.clone(),
            left_vars: w.right_vars.clone(),
            right_vars: w.left_vars.clone(),
            blocks: w.blocks.clone(),
        }
    }

    fn check_domination(&self, p: &CutType, q: &CutType, r: &OrderWitness, _opts: &CheckOptions) -> Result<Verdict> {
        self.check_shape(p, q, r)?;
        let u = &*p.universe;
        let premise = self.premise(p, q, r);
        let mut ups = r.upoints();
        ups.push(FRESH.to_string());
        let sc = scope(u, p, q, ups);
        let mut certificates = Vec::new();
        for var in q.non_realised() {
            for fresh in self.fresh_placements(u, r) {
                let target = self.goal_target(q, var, slot_of(&fresh).unwrap());
                let mut literals = premise.clone();
                literals.extend(fresh);
                if !dlo_consistent(&sc, &literals)? {
                    // The fresh point cannot sit there next to this witness.
                    continue;
                }
                match refute(&sc, &literals, &target)? {
                    Some(arrangement) => {
                        return Ok(Verdict::Refuted {
                            counter: Certificate::OrderCounter {
                                target,
                                literals,
                                arrangement,
                            },
                            probes: None,
                        })
                    }
                    None => certificates.push(Certificate::OrderInconsistent { target, literals }),
                }
            }
        }
        Ok(Verdict::Entailed { certificates })
    }

    fn weakly_orthogonal(&self, p: &CutType, q: &CutType, _param_budget: usize) -> Result<Verdict> {
        let u = same_universe(p, q)?;
        let sc = scope(u, p, q, Vec::new());
        let mut lits = p.literals();
        lits.extend(q.literals());
        let mut certificates = Vec::new();
        for i in p.non_realised() {
            for j in q.non_realised() {
                let (x, y) = (p.vars[i].clone(), q.vars[j].clone());
                let options = [
                    OrderLit::Less(x.clone(), y.clone()),
                    OrderLit::Eq(x.clone(), y.clone()),
                    OrderLit::Less(y.clone(), x.clone()),
                ];
                let mut live = Vec::new();
                for o in options {
                    let mut all = lits.clone();
                    all.push(o.clone());
                    if dlo_consistent(&sc, &all)? {
                        live.push(o);
                    }
                }
                match live.len() {
                    0 => {
                        return Err(Error::Invalid(format!(
                            "`{}` and `{}` have no common realization",
                            p.name, q.name
                        )))
                    }
                    1 => certificates.push(Certificate::OrderInconsistent {
                        target: live.pop().unwrap(),
                        literals: lits.clone(),
                    }),
                    _ => {
                        return Ok(Verdict::Refuted {
                            counter: Certificate::OrderUndecided {
                                left: x,
                                right: y,
                                options: live,
                            },
                            probes: None,
                        })
                    }
                }
            }
        }
        Ok(Verdict::Entailed { certificates })
    }

    fn verify_domination_certificate(
        &self,
        p: &CutType,
        q: &CutType,
        r: &OrderWitness,
        cert: &Certificate,
    ) -> Result<bool> {
        self.check_shape(p, q, r)?;
        let (target, literals) = match cert {
            Certificate::OrderInconsistent { target, literals } | Certificate::OrderCounter { target, literals, .. } => {
                (target, literals)
            }
            _ => return Ok(false),
        };
        let u = &*p.universe;
        // The literals are the premise plus one placement of the fresh point.
        let premise = self.premise(p, q, r);
        let fresh: HashSet<&OrderLit> = literals.iter().filter(|l| !premise.contains(l)).collect();
        let placements = self.fresh_placements(u, r);
        let Some(placed) = placements
            .iter()
            .find(|f| f.iter().collect::<HashSet<_>>() == fresh)
        else {
            return Ok(false);
        };
        if premise.iter().any(|l| !literals.contains(l)) {
            return Ok(false);
        }
        let slot = slot_of(placed).unwrap();
        let Some(var) = q.non_realised().into_iter().find(|&i| match target {
            OrderLit::Less(a, b) => (a == FRESH && *b == q.vars[i]) || (*a == q.vars[i] && b == FRESH),
            _ => false,
        }) else {
            return Ok(false);
        };
        if self.goal_target(q, var, slot) != *target {
            return Ok(false);
        }
        let mut ups = r.upoints();
        ups.push(FRESH.to_string());
        let sc = scope(u, p, q, ups);
        match cert {
            Certificate::OrderInconsistent { .. } => {
                Ok(dlo_consistent(&sc, literals)? && refute(&sc, literals, target)?.is_none())
            }
            Certificate::OrderCounter { arrangement, .. } => {
                let ok = negations(target).into_iter().any(|alt| {
                    let mut all = literals.clone();
                    all.push(alt);
                    arrangement_satisfies(u, arrangement, &all)
                });
                Ok(ok)
            }
            _ => unreachable!(),
        }
    }

    fn verify_orthogonality_certificate(&self, p: &CutType, q: &CutType, cert: &Certificate) -> Result<bool> {
        let u = same_universe(p, q)?;
        let sc = scope(u, p, q, Vec::new());
        let mut lits = p.literals();
        lits.extend(q.literals());
        match cert {
            Certificate::OrderInconsistent { target, literals } => {
                Ok(*literals == lits && dlo_consistent(&sc, &lits)? && refute(&sc, &lits, target)?.is_none())
            }
            Certificate::OrderUndecided { left, right, options } => {
                if options.len() < 2 {
                    return Ok(false);
                }
                for o in options {
                    let pair_ok = match o {
                        OrderLit::Less(a, b) | OrderLit::Eq(a, b) => {
                            (a == left && b == right) || (a == right && b == left)
                        }
                        _ => false,
                    };
                    let mut all = lits.clone();
                    all.push(o.clone());
                    if !pair_ok || !dlo_consistent(&sc, &all)? {
                        return Ok(false);
                    }
                }
                Ok(p.vars.contains(left) && q.vars.contains(right))
            }
            _ => Ok(false),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn arrangement_counts() {
        // One left and one right variable: x<y, x=y, y<x.
        assert_eq!(arrangements(&s(&["x"]), &s(&["y"])).len(), 3);
        // Ordered partitions of 3 with pairs only across sides: 6 + 2*3.
        assert_eq!(arrangements(&s(&["x"]), &s(&["y", "z"])).len(), 10);
    }

    #[test]
    fn slot_choices_are_multisets() {
        assert_eq!(slot_choices(&[0, 2], 2), vec![vec![0, 0], vec![0, 2], vec![2, 2]]);
    }
}
