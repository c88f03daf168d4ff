//! Ground clause form of a theory over a fixed number of points.

use smallvec::SmallVec;

use crate::logic::structure::{decode_tuple, encode_tuple, tuple_count};
use crate::logic::{PatAtom, PatLit, RelId, TheorySpec};

pub(crate) type Var = u32;

/// `var * 2 + (negative as u32)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Lit(pub u32);

impl Lit {
    pub fn new(var: Var, positive: bool) -> Self {
        Lit(var * 2 + u32::from(!positive))
    }
    pub fn var(self) -> Var {
        self.0 / 2
    }
    pub fn positive(self) -> bool {
        self.0 % 2 == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Rule(usize),
    Forbid(usize),
    Irreflexive,
}

#[derive(Clone, Debug)]
pub(crate) struct Clause {
    pub lits: SmallVec<[Lit; 4]>,
    pub origin: Origin,
}

#[derive(Debug)]
pub(crate) struct Grounding {
    pub n: usize,
    offsets: Vec<usize>,
    slot_var: Vec<Var>,
    /// Per variable: the relation and the tuple index of its smallest slot.
    pub var_rep: Vec<(RelId, usize)>,
    pub clauses: Vec<Clause>,
    /// Clause ids containing each literal code.
    pub occurs: Vec<Vec<u32>>,
    /// Set when some clause grounds to the empty clause.
    pub trivially_inconsistent: bool,
}

fn sorted(t: &[usize]) -> Vec<usize> {
    let mut s = t.to_vec();
    s.sort_unstable();
    s
}

fn for_each_binding(nvars: usize, n: usize, mut f: impl FnMut(&[usize])) {
    if nvars == 0 {
        f(&[]);
        return;
    }
    if n == 0 {
        return;
    }
    let mut b = vec![0usize; nvars];
    loop {
        f(&b);
        let mut i = nvars;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            b[i] += 1;
            if b[i] < n {
                break;
            }
            b[i] = 0;
        }
    }
}

impl Grounding {
    pub fn build(theory: &TheorySpec, n: usize) -> Grounding {
        let sig = &theory.signature;
        let mut offsets = Vec::new();
        let mut slot_var = Vec::new();
        let mut var_rep = Vec::new();
        for r in sig.ids() {
            let k = sig.arity(r);
            offsets.push(slot_var.len());
            let base = slot_var.len();
            for i in 0..tuple_count(n, k) {
                let t = decode_tuple(i, n, k);
                let rep = if theory.is_symmetric(r) {
                    encode_tuple(&sorted(&t), n)
                } else {
                    i
                };
                if rep == i {
                    slot_var.push(var_rep.len() as Var);
                    var_rep.push((r, i));
                } else {
                    let v = slot_var[base + rep];
                    slot_var.push(v);
                }
            }
        }
        let mut g = Grounding {
            n,
            offsets,
            slot_var,
            var_rep,
            clauses: Vec::new(),
            occurs: Vec::new(),
            trivially_inconsistent: false,
        };

        for (id, rule) in theory.rules.iter().enumerate() {
            let nv = rule.vars.len();
            for_each_binding(nv, n, |b| {
                let mut lits: SmallVec<[Lit; 4]> = SmallVec::new();
                for l in &rule.body {
                    match g.ground_lit(l, b) {
                        GroundLit::True => {}
                        GroundLit::False => return,
                        GroundLit::Atom(lit) => lits.push(Lit::new(lit.var(), !lit.positive())),
                    }
                }
                let head = g.var_of(rule.head.0, &rule.head.1.iter().map(|&i| b[i]).collect::<Vec<_>>());
                lits.push(Lit::new(head, true));
                g.add_clause(lits, Origin::Rule(id));
            });
        }
        for (id, fb) in theory.forbidden.iter().enumerate() {
            for_each_binding(fb.vars.len(), n, |b| {
                let mut lits: SmallVec<[Lit; 4]> = SmallVec::new();
                for l in &fb.lits {
                    match g.ground_lit(l, b) {
                        GroundLit::True => {}
                        GroundLit::False => return,
                        GroundLit::Atom(lit) => lits.push(Lit::new(lit.var(), !lit.positive())),
                    }
                }
                g.add_clause(lits, Origin::Forbid(id));
            });
        }
        for &r in &theory.irreflexive {
            let k = sig.arity(r);
            for t in (0..tuple_count(n, k)).map(|i| decode_tuple(i, n, k)) {
                if sorted(&t).windows(2).any(|w| w[0] == w[1]) {
                    let v = g.var_of(r, &t);
                    g.add_clause(SmallVec::from_slice(&[Lit::new(v, false)]), Origin::Irreflexive);
                }
            }
        }
        let mut occurs = vec![Vec::new(); g.var_rep.len() * 2];
        for (cid, c) in g.clauses.iter().enumerate() {
            for l in &c.lits {
                occurs[l.0 as usize].push(cid as u32);
            }
        }
        g.occurs = occurs;
        g
    }

    fn ground_lit(&self, l: &PatLit, b: &[usize]) -> GroundLit {
        match &l.atom {
            PatAtom::Eq(x, y) => {
                if (b[*x] == b[*y]) == l.positive {
                    GroundLit::True
                } else {
                    GroundLit::False
                }
            }
            PatAtom::Rel(r, args) => {
                let t: Vec<usize> = args.iter().map(|&i| b[i]).collect();
                GroundLit::Atom(Lit::new(self.var_of(*r, &t), l.positive))
            }
        }
    }

    fn add_clause(&mut self, mut lits: SmallVec<[Lit; 4]>, origin: Origin) {
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0].var() == w[1].var()) {
            return;
        }
        if lits.is_empty() {
            self.trivially_inconsistent = true;
        }
        self.clauses.push(Clause { lits, origin });
    }

    pub fn num_vars(&self) -> usize {
        self.var_rep.len()
    }

    pub fn var_of(&self, r: RelId, tuple: &[usize]) -> Var {
        self.slot_var[self.offsets[r.0] + encode_tuple(tuple, self.n)]
    }

    pub fn var_of_index(&self, r: RelId, tuple_index: usize) -> Var {
        self.slot_var[self.offsets[r.0] + tuple_index]
    }
}

enum GroundLit {
    True,
    False,
    Atom(Lit),
}
