use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity {arity} exceeds the supported maximum {max}")]
    ArityTooLarge { arity: usize, max: usize },
    #[error("relations must have arity at least 1")]
    ZeroArity,
    #[error("pattern has {found} slots but the relation has arity {expected}")]
    PatternLength { expected: usize, found: usize },
    #[error("output variable {0} does not occur in the pattern")]
    DanglingOutput(usize),
    #[error("invalid tuple `{tuple}` for arity {arity}")]
    BadTuple { tuple: String, arity: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("relation `{relation}` has arity {expected} but is applied to {found} arguments")]
    ArityMismatch {
        relation: String,
        expected: usize,
        found: usize,
    },
    #[error("formula has no constraints")]
    EmptyFormula,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("assignment has {found} values but the formula has {expected} variables")]
    AssignmentLength { expected: usize, found: usize },
    #[error("{vars} variables exceed the brute-force bound {max}")]
    TooManyVariables { vars: usize, max: usize },
    #[error("assignment {0} is not a solution")]
    NotASolution(String),
    #[error("constraint {constraint} is not {class}")]
    ClassMismatch { constraint: usize, class: String },
    #[error("constraint {0} has no variables")]
    NoVariables(usize),
    #[error("relation set is empty")]
    EmptySet,
    #[error("relation set is not CPSS")]
    NotCpss,
    #[error("clause set contains positive unit clauses")]
    PositiveUnits,
    #[error("not a Horn clause set: {0}")]
    NotHorn(String),
    #[error("not a CNF({{P,N}}) formula: {0}")]
    NotPnFormula(String),
    #[error("formula has no P-constraint and is trivially satisfiable")]
    NoPConstraint,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}
