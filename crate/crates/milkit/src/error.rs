use thiserror::Error;

/// Errors surfaced by the engine and its front ends.
#[derive(Debug, Error)]
pub enum MilError {
    /// Malformed problem or hypothesis text; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A `#builtin` declaration names a predicate the registry does not know.
    #[error("unknown builtin predicate `{0}`")]
    UnknownBuiltin(String),

    /// A `#metarule` declaration names neither a library rule nor an inline definition.
    #[error("unknown meta-rule id `{0}`")]
    UnknownRuleId(String),

    /// The same meta-rule id was declared twice in one problem.
    #[error("duplicate meta-rule id `{0}`")]
    DuplicateMetaRule(String),

    /// An inline meta-rule violates the template shape (binary head whose
    /// variables both occur in the body, body of binary and unary atoms).
    #[error("invalid meta-rule `{id}`: {msg}")]
    InvalidMetaRule { id: String, msg: String },

    /// Examples must be binary atoms.
    #[error("example atom `{0}` is not binary")]
    NonBinaryExample(String),

    /// A problem without positive examples has nothing to learn.
    #[error("problem has no positive examples")]
    NoPositiveExamples,

    /// The requested strategy cannot run on this problem
    /// (e.g. state abstraction needs forward-chained meta-rules).
    #[error("strategy not applicable: {0}")]
    StrategyNotApplicable(String),

    /// A hard cap (deduced-atom budget, guard-universe size, sequence caps) was hit.
    #[error("resource limit exceeded: {0}")]
    ResourceExceeded(String),

    /// Wall-clock timeout.
    #[error("timed out")]
    Timeout,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, MilError>;
