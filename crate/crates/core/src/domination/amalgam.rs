//! Domination over amalgamation theories: witnesses are complete diagrams
//! over a small base in the joined variables.

use std::collections::{BTreeMap, HashMap};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize, Serializer};

use super::{Certificate, CheckOptions, DominationBackend, ProbeSummary, Verdict};
use crate::amalgam::{fresh_names, AmalgamEngine, QfType};
use crate::error::{Error, Result};
use crate::logic::structure::all_tuples;
use crate::logic::{Literal, Pred, PartialStructure, Point, PointKind, StructureDto, TheorySpec};
use crate::schema::{all_patterns, joint_skeleton, type_guard, AtomRule, Pattern, Slot, TypeSchema};

/// `r ∈ S_pq(A)`: the base `A` is the first `base_len` points of
/// `structure`; the remaining points are the joined variables. Merged
/// variables share a point.
#[derive(Clone, Debug, PartialEq)]
pub struct AmalgamWitness {
    pub base_len: usize,
    pub left_vars: Vec<String>,
    pub right_vars: Vec<String>,
    /// `(left, right)` variable pairs sharing a point.
    pub merges: Vec<(String, String)>,
    pub left_points: Vec<usize>,
    pub right_points: Vec<usize>,
    pub structure: PartialStructure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamWitnessDto {
    pub base_len: usize,
    pub left_vars: Vec<String>,
    pub right_vars: Vec<String>,
    pub merges: Vec<(String, String)>,
    pub left_points: Vec<usize>,
    pub right_points: Vec<usize>,
    pub structure: StructureDto,
}

impl AmalgamWitness {
    pub fn to_dto(&self) -> AmalgamWitnessDto {
        AmalgamWitnessDto {
            base_len: self.base_len,
            left_vars: self.left_vars.clone(),
            right_vars: self.right_vars.clone(),
            merges: self.merges.clone(),
            left_points: self.left_points.clone(),
            right_points: self.right_points.clone(),
            structure: self.structure.to_dto(),
        }
    }

    pub fn from_dto(theory: &TheorySpec, dto: &AmalgamWitnessDto) -> Result<Self> {
        let structure = PartialStructure::from_dto(theory.signature.clone(), &dto.structure)?;
        let n = structure.len();
        if dto.base_len > n
            || dto.left_points.len() != dto.left_vars.len()
            || dto.right_points.len() != dto.right_vars.len()
            || dto.left_points.iter().chain(&dto.right_points).any(|&i| i >= n)
        {
            return Err(Error::Invalid("malformed witness".into()));
        }
        Ok(AmalgamWitness {
            base_len: dto.base_len,
            left_vars: dto.left_vars.clone(),
            right_vars: dto.right_vars.clone(),
            merges: dto.merges.clone(),
            left_points: dto.left_points.clone(),
            right_points: dto.right_points.clone(),
            structure,
        })
    }

    /// Witness made from an explicit diagram, for hand-written witnesses.
    pub fn base(&self) -> PartialStructure {
        self.structure.induced(&(0..self.base_len).collect::<Vec<_>>())
    }
}

impl Serialize for AmalgamWitness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_dto().serialize(s)
    }
}

pub struct AmalgamBackend {
    engine: AmalgamEngine,
}

/// Injective partial maps from `0..nr` into `0..nl`, most merges first,
/// then those closest to the identity.
fn merge_maps(nl: usize, nr: usize) -> Vec<Vec<Option<usize>>> {
    fn go(nl: usize, nr: usize, cur: &mut Vec<Option<usize>>, out: &mut Vec<Vec<Option<usize>>>) {
        if cur.len() == nr {
            out.push(cur.clone());
            return;
        }
        for t in (0..nl).map(Some).chain([None]) {
            if t.is_some() && cur.contains(&t) {
                continue;
            }
            cur.push(t);
            go(nl, nr, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(nl, nr, &mut Vec::new(), &mut out);
    out.sort_by_key(|m| {
        let merges = m.iter().filter(|t| t.is_some()).count();
        let off = m.iter().enumerate().filter(|(j, t)| **t != Some(*j)).count();
        (std::cmp::Reverse(merges), off)
    });
    out
}

/// Point of each variable of `s` placed after `params`.
struct Placed {
    structure: PartialStructure,
    var_points: Vec<usize>,
}

/// Where a schema's variables sit in a structure under inspection.
struct Frame<'a> {
    schema: &'a TypeSchema,
    var_points: &'a [usize],
}

impl Frame<'_> {
    fn var_of(&self, n: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n];
        for i in self.schema.non_realised() {
            out[self.var_points[i]] = Some(i);
        }
        out
    }

    fn const_points(&self, st: &PartialStructure) -> Result<Vec<usize>> {
        self.schema.constants.iter().map(|c| st.require_point(c)).collect()
    }

    fn nr_points(&self) -> Vec<usize> {
        self.schema.non_realised().iter().map(|&i| self.var_points[i]).collect()
    }

    /// Decides (or, with `check`, compares) every atom with a variable point
    /// of the schema and no point of `skip`. Unresolvable guards are skipped
    /// when `lenient`. Returns false on a clash.
    fn apply(&self, st: &mut PartialStructure, skip: &[usize], lenient: bool, check: bool) -> Result<bool> {
        let n = st.len();
        let var_of = self.var_of(n);
        let consts = self.const_points(st)?;
        let sig = st.signature().clone();
        for r in sig.ids() {
            for t in all_tuples(n, sig.arity(r)) {
                if !t.iter().any(|&p| var_of[p].is_some()) || t.iter().any(|p| skip.contains(p)) {
                    continue;
                }
                let v = match self.schema.decide_atom(st, r, &t, &var_of, &consts) {
                    Ok(AtomRule::Decided(v)) => v,
                    Ok(AtomRule::Outside) => continue,
                    Ok(AtomRule::Uncovered) => {
                        if lenient {
                            continue;
                        }
                        return Err(Error::NoRuleMatches {
                            schema: self.schema.name.clone(),
                            atom: st.atom_name(r, &t),
                        });
                    }
                    Err(Error::GuardUnresolved(_)) if lenient => continue,
                    Err(e) => return Err(e),
                };
                match st.get(r, &t) {
                    Some(w) if w != v => return Ok(false),
                    Some(_) => {}
                    None if check => return Ok(false),
                    None => st.set(r, &t, Some(v)),
                }
            }
        }
        Ok(true)
    }
}

impl AmalgamBackend {
    pub fn new(theory: Arc<TheorySpec>) -> Result<Self> {
        Ok(AmalgamBackend {
            engine: AmalgamEngine::new(theory)?,
        })
    }

    pub fn with_point_cap(mut self, cap: usize) -> Self {
        self.engine = self.engine.with_point_cap(cap);
        self
    }

    pub fn engine(&self) -> &AmalgamEngine {
        &self.engine
    }

    fn joint_d0(&self, p: &TypeSchema, q: &TypeSchema) -> Result<PartialStructure> {
        let (joint, _) = joint_skeleton(p, q)?;
        joint.constant_diagram(&self.engine)
    }

    fn place(&self, s: &TypeSchema, params: &PartialStructure) -> Result<Placed> {
        let real = s.realize(params)?;
        Ok(Placed {
            structure: real.structure,
            var_points: real.var_points,
        })
    }

    /// The witness with its base and joined variables, merged according to
    /// `map` (right variable index to left variable index, both among the
    /// non-realised ones). `None` if the restrictions clash.
    fn joined(
        &self,
        p: &TypeSchema,
        q: &TypeSchema,
        base: &PartialStructure,
        map: &[Option<usize>],
    ) -> Result<Option<(PartialStructure, Vec<usize>, Vec<usize>, Vec<(String, String)>)>> {
        let lp = self.place(p, base)?;
        let rq = self.place(q, base)?;
        let b = base.len();
        let lnr = p.non_realised();
        let rnr = q.non_realised();
        let mut extra = Vec::new();
        let mut rmap: Vec<usize> = (0..b).collect();
        let mut next = lp.structure.len();
        let mut merges = Vec::new();
        for (j, &qi) in rnr.iter().enumerate() {
            match map[j] {
                Some(li) => {
                    let pi = lnr[li];
                    rmap.push(lp.var_points[pi]);
                    merges.push((p.vars[pi].clone(), q.vars[qi].clone()));
                }
                None => {
                    extra.push(Point::new(q.vars[qi].clone(), PointKind::DesignatedVariable));
                    rmap.push(next);
                    next += 1;
                }
            }
        }
        let mut st = lp.structure.with_extra_points(extra)?;
        if !st.absorb(&rq.structure, &rmap) {
            return Ok(None);
        }
        let right_points = rq.var_points.iter().map(|&v| rmap[v]).collect();
        Ok(Some((st, lp.var_points, right_points, merges)))
    }

    /// Fresh-parameter types over `base` with every coordinate new.
    fn fresh_types(&self, base: &PartialStructure, w: usize) -> Result<Vec<QfType>> {
        let b = base.len();
        Ok(self
            .engine
            .enumerate_extensions(base, w)?
            .into_iter()
            .filter(|t| t.coords.iter().all(|&c| c >= b))
            .collect())
    }

    /// Witness plus the fresh points of `tau` with their diagram over the
    /// base and the premise's decisions on them.
    fn core(
        &self,
        p: &TypeSchema,
        r: &AmalgamWitness,
        tau: &QfType,
        goal_points: &[usize],
    ) -> Result<(PartialStructure, Vec<usize>)> {
        let w = &r.structure;
        let b = r.base_len;
        let fresh: Vec<Point> = tau.structure.points()[b..].to_vec();
        let mut core = w.with_extra_points(fresh)?;
        let map: Vec<usize> = (0..tau.structure.len())
            .map(|i| if i < b { i } else { w.len() + i - b })
            .collect();
        if !core.absorb(&tau.structure, &map) {
            return Err(Error::Invalid("parameter type disagrees with the base".into()));
        }
        let frame = Frame {
            schema: p,
            var_points: &r.left_points,
        };
        if !frame.apply(&mut core, goal_points, false, false)? {
            return Err(Error::Invalid(
                "witness disagrees with the premise restriction".into(),
            ));
        }
        let coords = tau.coords.iter().map(|&c| map[c]).collect();
        Ok((core, coords))
    }

    /// What `p ∪ r` says about the witness plus `width` fresh points, one
    /// core per fresh parameter type. Goal points left unmerged get no
    /// premise atoms. Returns each core with the indices of its fresh points.
    pub fn premise_cores(
        &self,
        p: &TypeSchema,
        q: &TypeSchema,
        r: &AmalgamWitness,
        width: usize,
    ) -> Result<Vec<(PartialStructure, Vec<usize>)>> {
        self.check_shape(p, q, r)?;
        let goal_points = self.goal_unmerged(q, r);
        self.fresh_types(&r.base(), width)?
            .iter()
            .map(|tau| self.core(p, r, tau, &goal_points))
            .collect()
    }

    /// Points of `q`'s non-realised variables that `r` does not identify
    /// with a variable of `p`.
    pub fn unmerged_points(&self, q: &TypeSchema, r: &AmalgamWitness) -> Vec<usize> {
        self.goal_unmerged(q, r)
    }

    fn goal_unmerged(&self, q: &TypeSchema, r: &AmalgamWitness) -> Vec<usize> {
        q.non_realised()
            .iter()
            .map(|&j| r.right_points[j])
            .filter(|pt| !r.left_points.contains(pt))
            .collect()
    }

    fn probe(
        &self,
        p: &TypeSchema,
        r: &AmalgamWitness,
        core: &PartialStructure,
        goal_points: &[usize],
        probes: usize,
    ) -> Result<Option<ProbeSummary>> {
        if probes == 0 {
            return Ok(None);
        }
        let mut run = 0;
        let mut passed = true;
        for j in 1..=probes {
            if core.len() + j > self.engine.point_cap() {
                break;
            }
            let names = fresh_names(core, j, "#p");
            let pts = names
                .into_iter()
                .map(|n| Point::new(n, PointKind::FreshParameter))
                .collect();
            let mut st = core.with_extra_points(pts)?;
            let frame = Frame {
                schema: p,
                var_points: &r.left_points,
            };
            run = j;
            if !frame.apply(&mut st, goal_points, true, false)? || !self.engine.is_consistent(&st)? {
                passed = false;
                break;
            }
        }
        Ok(Some(ProbeSummary { run, passed }))
    }

    fn check_shape(&self, p: &TypeSchema, q: &TypeSchema, r: &AmalgamWitness) -> Result<()> {
        if r.left_vars != p.vars || r.right_vars != q.vars {
            return Err(Error::Invalid(format!(
                "witness joins {:?} and {:?}, not `{}` and `{}`",
                r.left_vars, r.right_vars, p.name, q.name
            )));
        }
        Ok(())
    }

    fn targets(&self, q: &TypeSchema, opts: &CheckOptions) -> Vec<Pattern> {
        let budget = opts.param_budget.unwrap_or(usize::MAX).min(q.max_wildcards());
        let focus = opts
            .focus
            .as_ref()
            .and_then(|f| q.theory.signature.lookup(f));
        let mut pats: Vec<Pattern> = all_patterns(q)
            .into_iter()
            .filter(|p| p.wild_count() <= budget)
            .collect();
        pats.sort_by_key(|p| Some(p.rel) != focus);
        pats
    }
}

impl DominationBackend for AmalgamBackend {
    type Schema = TypeSchema;
    type Witness = AmalgamWitness;

    fn witnesses(&self, p: &TypeSchema, q: &TypeSchema, base_size: usize) -> Result<Vec<AmalgamWitness>> {
        let d0 = self.joint_d0(p, q)?;
        let nl = p.non_realised().len();
        let nr = q.non_realised().len();
        let mut out = Vec::new();
        for base in self.engine.enumerate_structures_named(&d0, base_size, "a")? {
            for map in merge_maps(nl, nr) {
                let Some((st, lp, rp, merges)) = self.joined(p, q, &base, &map)? else {
                    continue;
                };
                for c in self.engine.completions(&st)? {
                    out.push(AmalgamWitness {
                        base_len: base.len(),
                        left_vars: p.vars.clone(),
                        right_vars: q.vars.clone(),
                        merges: merges.clone(),
                        left_points: lp.clone(),
                        right_points: rp.clone(),
                        structure: c,
                    });
                }
            }
        }
        Ok(out)
    }

    fn check_witness(&self, p: &TypeSchema, q: &TypeSchema, r: &AmalgamWitness) -> Result<bool> {
        self.check_shape(p, q, r)?;
        let st = &r.structure;
        if !st.is_total() || !self.engine.is_member(st)? {
            return Ok(false);
        }
        let base = r.base();
        let d0 = self.joint_d0(p, q)?;
        if d0.points().iter().enumerate().any(|(i, pt)| base.points().get(i) != Some(pt)) {
            return Ok(false);
        }
        // Variables sit after the base, shared exactly by the merged pairs.
        let mut seen = vec![false; st.len()];
        for (s, pts) in [(p, &r.left_points), (q, &r.right_points)] {
            for (i, &pt) in pts.iter().enumerate() {
                match s.realised[i] {
                    Some(c) => {
                        if base.point_index(&s.constants[c]) != Some(pt) {
                            return Ok(false);
                        }
                    }
                    None => {
                        if pt < r.base_len {
                            return Ok(false);
                        }
                        seen[pt] = true;
                    }
                }
            }
        }
        if seen[r.base_len..].iter().any(|s| !s) {
            return Ok(false);
        }
        for &i in &p.non_realised() {
            for &j in &q.non_realised() {
                let shared = r.left_points[i] == r.right_points[j];
                let listed = r.merges.contains(&(p.vars[i].clone(), q.vars[j].clone()));
                if shared != listed {
                    return Ok(false);
                }
            }
        }
        for (s, pts) in [(p, &r.left_points), (q, &r.right_points)] {
            let real = s.realize(&base)?;
            let mut map: Vec<usize> = (0..r.base_len).collect();
            map.extend(s.vars.iter().enumerate().filter(|(i, _)| s.realised[*i].is_none()).map(|(i, _)| pts[i]));
            if real.structure.len() != map.len() {
                return Err(Error::Invalid("unexpected realization shape".into()));
            }
            let mut copy = st.clone();
            if !copy.absorb(&real.structure, &map) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn swap(&self, w: &AmalgamWitness) -> AmalgamWitness {
        AmalgamWitness {
            base_len: w.base_len,
            left_vars: w.right_vars.clone(),
            right_vars: w.left_vars.clone(),
            merges: w.merges.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
            left_points: w.right_points.clone(),
            right_points: w.left_points.clone(),
            structure: w.structure.clone(),
        }
    }

    fn check_domination(
        &self,
        p: &TypeSchema,
        q: &TypeSchema,
        r: &AmalgamWitness,
        opts: &CheckOptions,
    ) -> Result<Verdict> {
        self.check_shape(p, q, r)?;
        let base = r.base();
        let goal_points = self.goal_unmerged(q, r);
        let goal = Frame {
            schema: q,
            var_points: &r.right_points,
        };
        let mut types: HashMap<usize, Vec<QfType>> = HashMap::new();
        let mut certificates = Vec::new();
        for pat in self.targets(q, opts) {
            let w = pat.wild_count();
            if !types.contains_key(&w) {
                types.insert(w, self.fresh_types(&base, w)?);
            }
            for tau in &types[&w] {
                let (mut core, coords) = self.core(p, r, tau, &goal_points)?;
                let mut k = 0;
                let t: Vec<usize> = pat
                    .slots
                    .iter()
                    .map(|s| match s {
                        Slot::Var(i) => r.right_points[*i],
                        Slot::Wild => {
                            k += 1;
                            coords[k - 1]
                        }
                    })
                    .collect();
                let var_of = goal.var_of(core.len());
                let consts = goal.const_points(&core)?;
                let v = match q.decide_atom(&core, pat.rel, &t, &var_of, &consts)? {
                    AtomRule::Decided(v) => v,
                    _ => {
                        return Err(Error::NoRuleMatches {
                            schema: q.name.clone(),
                            atom: core.atom_name(pat.rel, &t),
                        })
                    }
                };
                let target = core.literal(pat.rel, &t, v).to_string();
                match core.get(pat.rel, &t) {
                    Some(x) if x == v => {
                        certificates.push(Certificate::Decided {
                            target,
                            core: core.to_dto(),
                        });
                        continue;
                    }
                    Some(_) => {}
                    None => core.set(pat.rel, &t, Some(!v)),
                }
                match self.engine.consistent(&core)? {
                    Some(c) => {
                        let probes = self.probe(p, r, &core, &goal_points, opts.probes)?;
                        return Ok(Verdict::Refuted {
                            counter: Certificate::Counter {
                                target,
                                core: core.to_dto(),
                                counter: c.structure.to_dto(),
                                identified: None,
                            },
                            probes,
                        });
                    }
                    None => certificates.push(Certificate::Inconsistent {
                        target,
                        core: core.to_dto(),
                        identified: None,
                    }),
                }
            }
        }
        // Unmerged goal variables must avoid every parameter.
        if !goal_points.is_empty() {
            let ones = self.fresh_types(&base, 1)?;
            for &vp in &goal_points {
                for tau in &ones {
                    let (core, coords) = self.core(p, r, tau, &goal_points)?;
                    let b = coords[0];
                    let vname = core.point(vp).id.clone();
                    let bname = core.point(b).id.clone();
                    let target = Literal::eq(&vname, &bname, false).to_string();
                    let identified = Some((vname, bname));
                    let merged = core.merge(b, vp);
                    let counter = match &merged {
                        Some(m) => self.engine.consistent(m)?,
                        None => None,
                    };
                    match counter {
                        Some(c) => {
                            let probes = self.probe(p, r, &core, &goal_points, opts.probes)?;
                            return Ok(Verdict::Refuted {
                                counter: Certificate::Counter {
                                    target,
                                    core: core.to_dto(),
                                    counter: c.structure.to_dto(),
                                    identified,
                                },
                                probes,
                            });
                        }
                        None => certificates.push(Certificate::Inconsistent {
                            target,
                            core: core.to_dto(),
                            identified,
                        }),
                    }
                }
            }
        }
        Ok(Verdict::Entailed { certificates })
    }

    fn weakly_orthogonal(&self, p: &TypeSchema, q: &TypeSchema, param_budget: usize) -> Result<Verdict> {
        let (joint, _) = joint_skeleton(p, q)?;
        let d0 = joint.constant_diagram(&self.engine)?;
        let nx = p.vars.len();
        #[derive(Default)]
        struct Group {
            ruled_out: [Option<Certificate>; 2],
            example: Option<Certificate>,
        }
        let mut groups: BTreeMap<(Pattern, Vec<crate::schema::GuardLit>), Group> = BTreeMap::new();
        let mut eq_groups: BTreeMap<(usize, usize), Group> = BTreeMap::new();
        for m in 0..=param_budget {
            for base in self.engine.enumerate_structures_named(&d0, m, "a")? {
                let Some((st, lp, rp, _)) = self.joined(p, q, &base, &vec![None; q.non_realised().len()])? else {
                    continue;
                };
                if !self.engine.is_consistent(&st)? {
                    return Err(Error::Invalid(format!(
                        "`{}` and `{}` have no common realization",
                        p.name, q.name
                    )));
                }
                let mut points = lp.clone();
                points.extend(rp.iter().copied());
                let jf = Frame {
                    schema: &joint,
                    var_points: &points,
                };
                let var_of = jf.var_of(st.len());
                let consts = jf.const_points(&st)?;
                let sig = st.signature().clone();
                for r in sig.ids() {
                    for t in all_tuples(st.len(), sig.arity(r)) {
                        let mixed = t.iter().any(|&x| matches!(var_of[x], Some(i) if i < nx))
                            && t.iter().any(|&x| matches!(var_of[x], Some(i) if i >= nx));
                        if !mixed || st.get(r, &t).is_some() {
                            continue;
                        }
                        let slots: Vec<std::result::Result<usize, usize>> =
                            t.iter().map(|&x| var_of[x].ok_or(x)).collect();
                        let (pattern, binding) = joint.pattern_of(r, &slots);
                        let qt = QfType {
                            structure: base.clone(),
                            coords: binding,
                        };
                        let guard = type_guard(&joint.theory, &qt, &consts);
                        let g = groups.entry((pattern, guard)).or_default();
                        let mut ok = [false; 2];
                        let mut comps = [None, None];
                        for v in [false, true] {
                            let mut probe = st.clone();
                            probe.set(r, &t, Some(v));
                            match self.engine.consistent(&probe)? {
                                Some(c) => {
                                    ok[v as usize] = true;
                                    comps[v as usize] = Some(c.structure);
                                }
                                None => {
                                    if g.ruled_out[v as usize].is_none() {
                                        g.ruled_out[v as usize] = Some(Certificate::Inconsistent {
                                            target: st.literal(r, &t, !v).to_string(),
                                            core: probe.to_dto(),
                                            identified: None,
                                        });
                                    }
                                }
                            }
                        }
                        if ok[0] && ok[1] && g.example.is_none() {
                            g.example = Some(Certificate::Undecided {
                                atom: st.literal(r, &t, true).to_string(),
                                with_true: comps[1].take().unwrap().to_dto(),
                                with_false: comps[0].take().unwrap().to_dto(),
                            });
                        }
                    }
                }
                // Equalities between the two tuples.
                for &i in &p.non_realised() {
                    for &j in &q.non_realised() {
                        let (xp, yp) = (lp[i], rp[j]);
                        let g = eq_groups.entry((i, j)).or_default();
                        let xn = st.point(xp).id.clone();
                        let yn = st.point(yp).id.clone();
                        let merged = st.merge(xp, yp);
                        let with_true = match &merged {
                            Some(m) => self.engine.consistent(m)?,
                            None => None,
                        };
                        match with_true {
                            None => {
                                if g.ruled_out[1].is_none() {
                                    g.ruled_out[1] = Some(Certificate::Inconsistent {
                                        target: Literal::eq(&xn, &yn, false).to_string(),
                                        core: st.to_dto(),
                                        identified: Some((yn.clone(), xn.clone())),
                                    });
                                }
                            }
                            Some(c) => {
                                if g.example.is_none() {
                                    let other = self.engine.consistent(&st)?.expect("checked above");
                                    g.example = Some(Certificate::Undecided {
                                        atom: Literal::eq(&xn, &yn, true).to_string(),
                                        with_true: c.structure.to_dto(),
                                        with_false: other.structure.to_dto(),
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        let mut certificates = Vec::new();
        for g in groups.into_values().chain(eq_groups.into_values()) {
            match g.ruled_out {
                [None, None] => {
                    return Ok(Verdict::Refuted {
                        counter: g.example.expect("an undecided group has an example"),
                        probes: None,
                    })
                }
                [a, b] => certificates.extend(a.into_iter().chain(b)),
            }
        }
        Ok(Verdict::Entailed { certificates })
    }

    fn verify_domination_certificate(
        &self,
        p: &TypeSchema,
        q: &TypeSchema,
        r: &AmalgamWitness,
        cert: &Certificate,
    ) -> Result<bool> {
        self.check_shape(p, q, r)?;
        let sig = p.theory.signature.clone();
        let goal_points = self.goal_unmerged(q, r);
        let (target, core_dto, identified) = match cert {
            Certificate::Decided { target, core } => (target, core, None),
            Certificate::Inconsistent {
                target,
                core,
                identified,
            } => (target, core, identified.as_ref()),
            Certificate::Counter {
                target,
                core,
                identified,
                ..
            } => (target, core, identified.as_ref()),
            _ => return Ok(false),
        };
        let core = PartialStructure::from_dto(sig.clone(), core_dto)?;
        // The witness is a prefix of the core, and the parameters form a
        // member diagram together with the base.
        let w = &r.structure;
        if core.len() < w.len()
            || (0..w.len()).any(|i| core.point(i) != w.point(i))
            || core.induced(&(0..w.len()).collect::<Vec<_>>()) != *w
        {
            return Ok(false);
        }
        let params: Vec<usize> = (0..r.base_len).chain(w.len()..core.len()).collect();
        let pdiag = core.induced(&params);
        if !pdiag.is_total() || !self.engine.is_member(&pdiag)? {
            return Ok(false);
        }
        // Premise atoms are exactly the premise's decisions.
        let premise = Frame {
            schema: p,
            var_points: &r.left_points,
        };
        let mut replay = core.clone();
        if !premise.apply(&mut replay, &goal_points, false, true)? {
            return Ok(false);
        }
        // Apart from the witness, parameters and premise, at most the negated
        // target is decided.
        let mut extra = Vec::new();
        let lp_var = premise.var_of(core.len());
        for rel in sig.ids() {
            for t in all_tuples(core.len(), sig.arity(rel)) {
                if core.get(rel, &t).is_none() || t.iter().all(|&x| x < w.len()) {
                    continue;
                }
                let is_param = t.iter().all(|x| params.contains(x));
                let is_premise = t.iter().any(|&x| lp_var[x].is_some())
                    && !t.iter().any(|x| goal_points.contains(x));
                if !is_param && !is_premise {
                    extra.push((rel, t));
                }
            }
        }
        let goal = Frame {
            schema: q,
            var_points: &r.right_points,
        };
        if let Some((v, b)) = identified {
            if !extra.is_empty() || Literal::eq(v, b, false).to_string() != *target {
                return Ok(false);
            }
            let (vp, bp) = (core.require_point(v)?, core.require_point(b)?);
            if !goal_points.contains(&vp) || bp < w.len() {
                return Ok(false);
            }
            let merged = core.merge(bp, vp);
            return match cert {
                Certificate::Inconsistent { .. } => Ok(match merged {
                    None => true,
                    Some(m) => !self.engine.is_consistent(&m)?,
                }),
                Certificate::Counter { counter, .. } => {
                    let Some(m) = merged else { return Ok(false) };
                    let c = PartialStructure::from_dto(sig, counter)?;
                    Ok(c.is_total() && self.engine.is_member(&c)? && c.extends(&m))
                }
                _ => Ok(false),
            };
        }
        let lit = Literal::from_str(target)?;
        let (rel, t) = core.resolve_literal(&lit)?;
        let consts = goal.const_points(&core)?;
        let decided = q.decide_atom(&core, rel, &t, &goal.var_of(core.len()), &consts)?;
        if decided != AtomRule::Decided(lit.positive) {
            return Ok(false);
        }
        match cert {
            Certificate::Decided { .. } => Ok(extra.is_empty() && core.get(rel, &t) == Some(lit.positive)),
            Certificate::Inconsistent { .. } | Certificate::Counter { .. } => {
                let extra_ok = extra.iter().all(|(x, y)| *x == rel && *y == t);
                if !extra_ok || core.get(rel, &t) != Some(!lit.positive) {
                    return Ok(false);
                }
                match cert {
                    Certificate::Inconsistent { .. } => Ok(!self.engine.is_consistent(&core)?),
                    Certificate::Counter { counter, .. } => {
                        let c = PartialStructure::from_dto(sig, counter)?;
                        Ok(c.is_total() && self.engine.is_member(&c)? && c.extends(&core))
                    }
                    _ => unreachable!(),
                }
            }
            _ => Ok(false),
        }
    }

    fn verify_orthogonality_certificate(
        &self,
        p: &TypeSchema,
        q: &TypeSchema,
        cert: &Certificate,
    ) -> Result<bool> {
        let sig = p.theory.signature.clone();
        // Variable points by name; a variable missing from a structure was
        // merged into the one named by `alias`.
        let frames_hold = |st: &PartialStructure, alias: Option<(&str, &str)>| -> Result<bool> {
            let lookup = |name: &str| -> Result<usize> {
                match alias {
                    Some((from, to)) if from == name => st.require_point(to),
                    _ => st.require_point(name),
                }
            };
            for s in [p, q] {
                let mut pts = Vec::new();
                for (i, v) in s.vars.iter().enumerate() {
                    pts.push(match s.realised[i] {
                        Some(c) => st.require_point(&s.constants[c])?,
                        None => lookup(v)?,
                    });
                }
                let f = Frame {
                    schema: s,
                    var_points: &pts,
                };
                let other: Vec<usize> = if std::ptr::eq(s, p) {
                    q.non_realised().iter().map(|&j| lookup(&q.vars[j])).collect::<Result<_>>()?
                } else {
                    p.non_realised().iter().map(|&j| lookup(&p.vars[j])).collect::<Result<_>>()?
                };
                let own = f.nr_points();
                let skip: Vec<usize> = other.into_iter().filter(|x| !own.contains(x)).collect();
                let mut replay = st.clone();
                if !f.apply(&mut replay, &skip, false, true)? {
                    return Ok(false);
                }
            }
            Ok(true)
        };
        match cert {
            Certificate::Undecided {
                atom,
                with_true,
                with_false,
            } => {
                let lit = Literal::from_str(atom)?;
                let t = PartialStructure::from_dto(sig.clone(), with_true)?;
                let f = PartialStructure::from_dto(sig, with_false)?;
                for s in [&t, &f] {
                    if !s.is_total() || !self.engine.is_member(s)? {
                        return Ok(false);
                    }
                }
                if matches!(lit.pred, Pred::Rel(_)) {
                    let (rel, tt) = t.resolve_literal(&lit)?;
                    let (_, tf) = f.resolve_literal(&lit)?;
                    Ok(t.get(rel, &tt) == Some(true)
                        && f.get(rel, &tf) == Some(false)
                        && frames_hold(&t, None)?
                        && frames_hold(&f, None)?)
                } else {
                    let (x, y) = (&lit.args[0], &lit.args[1]);
                    Ok(t.point_index(y).is_none()
                        && f.point_index(y).is_some()
                        && frames_hold(&t, Some((y, x)))?
                        && frames_hold(&f, None)?)
                }
            }
            Certificate::Inconsistent {
                target,
                core,
                identified,
            } => {
                let st = PartialStructure::from_dto(sig, core)?;
                let lit = Literal::from_str(target)?;
                match identified {
                    Some((y, x)) => {
                        if !frames_hold(&st, None)? {
                            return Ok(false);
                        }
                        let (xp, yp) = (st.require_point(x)?, st.require_point(y)?);
                        Ok(match st.merge(xp, yp) {
                            None => true,
                            Some(m) => !self.engine.is_consistent(&m)?,
                        })
                    }
                    None => {
                        let (rel, t) = st.resolve_literal(&lit)?;
                        if st.get(rel, &t) != Some(!lit.positive) {
                            return Ok(false);
                        }
                        let mut without = st.clone();
                        without.set(rel, &t, None);
                        Ok(frames_hold(&without, None)? && !self.engine.is_consistent(&st)?)
                    }
                }
            }
            _ => Ok(false),
        }
    }
}
