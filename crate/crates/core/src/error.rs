use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("undeclared relation `{0}`")]
    UndeclaredRelation(String),
    #[error("relation `{name}` has arity {expected} but is used with {found} arguments")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("relation `{0}` declared twice")]
    DuplicateRelation(String),
    #[error("relation `{name}` has arity {arity}; arities must lie in 1..=4")]
    BadArity { name: String, arity: usize },
    #[error("rule `{0}` mentions no designated variable")]
    NoDesignatedVariable(String),
    #[error("guard references `{0}`, which is neither a named wildcard of the rule nor a base constant")]
    BadGuard(String),
    #[error("undecided atom {0}")]
    UndecidedAtom(String),
    #[error("{what} has {found} points; the limit is {limit}")]
    SizeLimit {
        what: String,
        found: usize,
        limit: usize,
    },
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("schema `{schema}` has no rule deciding {atom}")]
    NoRuleMatches { schema: String, atom: String },
    #[error("guard resolution undetermined: {0}")]
    GuardUnresolved(String),
    #[error("not realizable: {0}")]
    NotRealizable(String),
    #[error("wrong backend: {0}")]
    Backend(String),
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
