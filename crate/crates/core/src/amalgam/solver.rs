//! Unit propagation plus chronological backtracking over a grounding.

use std::ops::ControlFlow;

use super::ground::{Grounding, Lit, Origin, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Reason {
    Given,
    Choice,
    Clause(u32),
}

pub(crate) struct Solver<'g> {
    pub g: &'g Grounding,
    pub val: Vec<Option<bool>>,
    pub reason: Vec<Reason>,
    pub trail: Vec<Var>,
    qhead: usize,
    pub first_value: bool,
}

impl<'g> Solver<'g> {
    pub fn new(g: &'g Grounding) -> Self {
        let nv = g.num_vars();
        Solver {
            g,
            val: vec![None; nv],
            reason: vec![Reason::Given; nv],
            trail: Vec::with_capacity(nv),
            qhead: 0,
            first_value: false,
        }
    }

    /// Records a given value; false if it clashes with an earlier one.
    pub fn give(&mut self, v: Var, value: bool) -> bool {
        self.assign(v, value, Reason::Given)
    }

    fn assign(&mut self, v: Var, value: bool, why: Reason) -> bool {
        match self.val[v as usize] {
            Some(w) => w == value,
            None => {
                self.val[v as usize] = Some(value);
                self.reason[v as usize] = why;
                self.trail.push(v);
                true
            }
        }
    }

    fn lit_value(&self, l: Lit) -> Option<bool> {
        self.val[l.var() as usize].map(|v| v == l.positive())
    }

    /// Checks one clause: Err on conflict, unit-assigns if possible.
    fn visit(&mut self, cid: u32) -> Result<(), u32> {
        let c = &self.g.clauses[cid as usize];
        let mut unassigned = None;
        let mut count = 0;
        for &l in &c.lits {
            match self.lit_value(l) {
                Some(true) => return Ok(()),
                Some(false) => {}
                None => {
                    count += 1;
                    unassigned = Some(l);
                }
            }
        }
        match count {
            0 => Err(cid),
            1 => {
                let l = unassigned.unwrap();
                self.assign(l.var(), l.positive(), Reason::Clause(cid));
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Full scan of all clauses, then propagation. Call once after `give`.
    pub fn start(&mut self) -> Result<(), u32> {
        if self.g.trivially_inconsistent {
            return Err(u32::MAX);
        }
        for cid in 0..self.g.clauses.len() as u32 {
            self.visit(cid)?;
        }
        self.propagate()
    }

    pub fn propagate(&mut self) -> Result<(), u32> {
        while self.qhead < self.trail.len() {
            let v = self.trail[self.qhead];
            self.qhead += 1;
            let value = self.val[v as usize].unwrap();
            let falsified = Lit::new(v, !value);
            let g = self.g;
            for &cid in &g.occurs[falsified.0 as usize] {
                self.visit(cid)?;
            }
        }
        Ok(())
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            self.val[v as usize] = None;
        }
        self.qhead = mark;
    }

    /// Depth-first search over unassigned variables in index order.
    /// `visit` sees each total assignment; `Break` stops the search.
    pub fn search(&mut self, from: usize, visit: &mut dyn FnMut(&Solver) -> ControlFlow<()>) -> ControlFlow<()> {
        let mut next = from;
        while next < self.val.len() && self.val[next].is_some() {
            next += 1;
        }
        if next == self.val.len() {
            return visit(self);
        }
        for value in [self.first_value, !self.first_value] {
            let mark = self.trail.len();
            self.assign(next as Var, value, Reason::Choice);
            if self.propagate().is_ok() {
                self.search(next + 1, visit)?;
            }
            self.undo(mark);
        }
        ControlFlow::Continue(())
    }

    pub fn origin(&self, v: Var) -> Option<Origin> {
        match self.reason[v as usize] {
            Reason::Clause(cid) => Some(self.g.clauses[cid as usize].origin),
            _ => None,
        }
    }
}
