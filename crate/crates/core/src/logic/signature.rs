use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ARITY: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RelId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Relation {
    pub name: String,
    pub arity: usize,
}

/// A finite relational signature. Relation ids are declaration positions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    relations: Vec<Relation>,
}

impl Signature {
    pub fn new(relations: Vec<Relation>) -> Result<Self> {
        let mut sig = Signature::default();
        for r in relations {
            sig.push(r)?;
        }
        Ok(sig)
    }

    pub fn empty() -> Self {
        Signature::default()
    }

    pub(crate) fn push(&mut self, rel: Relation) -> Result<RelId> {
        if self.lookup(&rel.name).is_some() {
            return Err(Error::DuplicateRelation(rel.name));
        }
        if rel.arity == 0 || rel.arity > MAX_ARITY {
            return Err(Error::BadArity {
                name: rel.name,
                arity: rel.arity,
            });
        }
        self.relations.push(rel);
        Ok(RelId(self.relations.len() - 1))
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn ids(&self) -> impl Iterator<Item = RelId> {
        (0..self.relations.len()).map(RelId)
    }

    pub fn arity(&self, id: RelId) -> usize {
        self.relations[id.0].arity
    }

    pub fn name(&self, id: RelId) -> &str {
        &self.relations[id.0].name
    }

    pub fn lookup(&self, name: &str) -> Option<RelId> {
        self.relations.iter().position(|r| r.name == name).map(RelId)
    }

    pub fn resolve(&self, name: &str, used_arity: usize) -> Result<RelId> {
        let id = self
            .lookup(name)
            .ok_or_else(|| Error::UndeclaredRelation(name.to_string()))?;
        let expected = self.arity(id);
        if expected != used_arity {
            return Err(Error::ArityMismatch {
                name: name.to_string(),
                expected,
                found: used_arity,
            });
        }
        Ok(id)
    }

    pub fn max_arity(&self) -> usize {
        self.relations.iter().map(|r| r.arity).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_bad_arity() {
        let e = Signature::new(vec![
            Relation { name: "E".into(), arity: 2 },
            Relation { name: "E".into(), arity: 2 },
        ]);
        assert_eq!(e, Err(Error::DuplicateRelation("E".into())));
        assert!(Signature::new(vec![Relation { name: "Q".into(), arity: 5 }]).is_err());
        assert!(Signature::new(vec![Relation { name: "Q".into(), arity: 0 }]).is_err());
    }
}
