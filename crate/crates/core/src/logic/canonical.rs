use super::signature::RelId;
use super::structure::{all_tuples, PartialStructure};
use crate::error::{Error, Result};

pub const CANONICAL_LIMIT: usize = 10;

/// Canonical form of a structure up to renaming of its non-fixed points.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    pub fixed: Vec<String>,
    pub free: usize,
    pub code: Vec<u8>,
}

/// Positions of tuples over `0..=j` whose largest entry is `j`.
fn layer(j: usize, arity: usize) -> Vec<Vec<usize>> {
    all_tuples(j + 1, arity)
        .filter(|t| t.iter().any(|&p| p == j))
        .collect()
}

fn value_code(v: Option<bool>) -> u8 {
    match v {
        Some(false) => 0,
        Some(true) => 1,
        None => 2,
    }
}

struct Search<'a> {
    s: &'a PartialStructure,
    layers: Vec<Vec<(RelId, Vec<usize>)>>,
    order: Vec<usize>,
    used: Vec<bool>,
    best: Option<(Vec<u8>, Vec<usize>)>,
}

impl Search<'_> {
    fn segment(&self, j: usize) -> Vec<u8> {
        self.layers[j]
            .iter()
            .map(|(r, t)| {
                let real: Vec<usize> = t.iter().map(|&p| self.order[p]).collect();
                value_code(self.s.get(*r, &real))
            })
            .collect()
    }

    fn run(&mut self, j: usize, code: &mut Vec<u8>, fixed: usize) {
        let n = self.s.len();
        if j == n {
            let better = match &self.best {
                None => true,
                Some((b, _)) => code.as_slice() < b.as_slice(),
            };
            if better {
                self.best = Some((code.clone(), self.order.clone()));
            }
            return;
        }
        let candidates: Vec<usize> = if j < fixed {
            vec![self.order[j]]
        } else {
            (0..n).filter(|&i| !self.used[i]).collect()
        };
        for c in candidates {
            let saved = self.order[j];
            self.order[j] = c;
            let seg = self.segment(j);
            let len = code.len();
            code.extend_from_slice(&seg);
            let pruned = match &self.best {
                Some((b, _)) => code.as_slice() > &b[..code.len()],
                None => false,
            };
            if !pruned {
                let was_used = self.used[c];
                self.used[c] = true;
                self.run(j + 1, code, fixed);
                self.used[c] = was_used;
            }
            code.truncate(len);
            self.order[j] = saved;
        }
    }
}

/// Canonical form and the point order realizing it (fixed points first,
/// sorted by id).
pub fn canonical_labeling(
    s: &PartialStructure,
    fixed: &[usize],
) -> Result<(CanonicalForm, Vec<usize>)> {
    let n = s.len();
    if n > CANONICAL_LIMIT {
        return Err(Error::SizeLimit {
            what: "structure".into(),
            found: n,
            limit: CANONICAL_LIMIT,
        });
    }
    let mut fixed: Vec<usize> = fixed.to_vec();
    fixed.sort_by(|&a, &b| s.point(a).id.cmp(&s.point(b).id));
    fixed.dedup();
    let sig = s.signature().clone();
    let layers: Vec<Vec<(RelId, Vec<usize>)>> = (0..n)
        .map(|j| {
            sig.ids()
                .flat_map(|r| layer(j, sig.arity(r)).into_iter().map(move |t| (r, t)))
                .collect()
        })
        .collect();
    let mut order = vec![0; n];
    let mut used = vec![false; n];
    for (j, &f) in fixed.iter().enumerate() {
        order[j] = f;
        used[f] = true;
    }
    let mut search = Search {
        s,
        layers,
        order,
        used,
        best: None,
    };
    let nfixed = fixed.len();
    search.run(0, &mut Vec::new(), nfixed);
    let (code, order) = search.best.expect("at least one labeling");
    let form = CanonicalForm {
        fixed: fixed.iter().map(|&i| s.point(i).id.clone()).collect(),
        free: n - nfixed,
        code,
    };
    Ok((form, order))
}

pub fn iso_canonical(s: &PartialStructure, fixed: &[usize]) -> Result<CanonicalForm> {
    canonical_labeling(s, fixed).map(|(f, _)| f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::signature::{Relation, Signature};
    use crate::logic::structure::{Point, PointKind};
    use std::sync::Arc;

    fn graph(ids: &[&str], edges: &[(usize, usize)]) -> PartialStructure {
        let sig = Arc::new(Signature::new(vec![Relation { name: "E".into(), arity: 2 }]).unwrap());
        let pts = ids.iter().map(|i| Point::new(*i, PointKind::FreshParameter)).collect();
        let mut s = PartialStructure::with_points(sig, pts).unwrap();
        for t in all_tuples(ids.len(), 2) {
            s.set(RelId(0), &t, Some(false));
        }
        for &(a, b) in edges {
            s.set(RelId(0), &[a, b], Some(true));
            s.set(RelId(0), &[b, a], Some(true));
        }
        s
    }

    #[test]
    fn single_point_is_itself() {
        let s = graph(&["a"], &[]);
        let f = iso_canonical(&s, &[]).unwrap();
        assert_eq!(f.code, vec![0]);
        assert_eq!(f.free, 1);
    }

    #[test]
    fn edge_between_different_names() {
        let s1 = graph(&["a", "b", "c"], &[(0, 1)]);
        let s2 = graph(&["a", "b", "c"], &[(1, 2)]);
        assert_eq!(iso_canonical(&s1, &[]).unwrap(), iso_canonical(&s2, &[]).unwrap());
        // With `a` fixed the edge touches the base in one and not the other.
        assert_ne!(iso_canonical(&s1, &[0]).unwrap(), iso_canonical(&s2, &[0]).unwrap());
    }

    #[test]
    fn limit_enforced() {
        let ids: Vec<String> = (0..11).map(|i| format!("p{i}")).collect();
        let refs: Vec<&str> = ids.iter().map(|s| s.as_str()).collect();
        let s = graph(&refs, &[]);
        assert!(matches!(iso_canonical(&s, &[]), Err(Error::SizeLimit { .. })));
    }
}
