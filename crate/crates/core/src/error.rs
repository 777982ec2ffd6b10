use thiserror::Error;

use crate::hypergraph::GyoStep;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("unknown builtin function {0:?}")]
    UnknownBuiltin(String),

    #[error("builtin {name} is not defined for arity {arity}")]
    BuiltinArity { name: String, arity: usize },

    #[error("table of arity {arity} needs {expected} values, got {found}")]
    TableLength {
        arity: usize,
        expected: usize,
        found: usize,
    },

    #[error("arity {0} is too large for an explicit table")]
    ArityTooLarge(usize),

    #[error("index {index} out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },

    #[error("normalization by zero")]
    ZeroScalar,

    #[error("cannot link a variable with itself (index {0})")]
    LinkSameIndex(usize),

    #[error("unknown variable {0:?}")]
    UnknownVariable(String),

    #[error("variable {0:?} declared twice")]
    DuplicateVariable(String),

    #[error("variable id {0} is not part of the instance")]
    VariableOutOfRange(usize),

    #[error("constraint {constraint} repeats variable {var:?} without being marked linked")]
    RepeatedVariable { constraint: usize, var: String },

    #[error("function of arity {arity} applied to {found} variables")]
    ArityMismatch { arity: usize, found: usize },

    #[error("hypergraph is not acyclic ({} reduction steps before getting stuck)", trace.len())]
    NotAcyclic { trace: Vec<GyoStep> },

    #[error("instance has {vars} variables, above the enumeration limit {limit}")]
    TooManyVariables { vars: usize, limit: usize },

    #[error("constraint {constraint} has {arity} distinct variables, above the table limit {limit}")]
    TableTooLarge {
        constraint: usize,
        arity: usize,
        limit: usize,
    },

    #[error("constraint {0} is not EQ2, XOR, unary or a scalar")]
    NotEdConstraint(usize),

    #[error("{0} requires tables that were not produced by linking")]
    LinkedTable(String),

    #[error("precondition of {gadget} violated: {violated}")]
    Precondition { gadget: String, violated: String },

    #[error("unknown gadget {0:?}")]
    UnknownGadget(String),

    #[error("gadget {gadget} does not realize its target: {detail}")]
    RealizationFailed { gadget: String, detail: String },

    #[error("gadget {0} has a cyclic hypergraph")]
    CyclicGadget(String),

    #[error("rewritten instance is not acyclic")]
    RewriteNotAcyclic {
        before: Vec<GyoStep>,
        after: Vec<GyoStep>,
    },

    #[error("function {0} is outside the supported set")]
    UnsupportedFunction(String),

    #[error("DIMACS line {line}: {msg}")]
    Dimacs { line: usize, msg: String },

    #[error("malformed circuit: {0}")]
    Circuit(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Stable snake_case name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::Json(_) => "json",
            Error::UnknownBuiltin(_) => "unknown_builtin",
            Error::BuiltinArity { .. } => "builtin_arity",
            Error::TableLength { .. } => "table_length",
            Error::ArityTooLarge(_) => "arity_too_large",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::ZeroScalar => "zero_scalar",
            Error::LinkSameIndex(_) => "link_same_index",
            Error::UnknownVariable(_) => "unknown_variable",
            Error::DuplicateVariable(_) => "duplicate_variable",
            Error::VariableOutOfRange(_) => "variable_out_of_range",
            Error::RepeatedVariable { .. } => "repeated_variable",
            Error::ArityMismatch { .. } => "arity_mismatch",
            Error::NotAcyclic { .. } => "not_acyclic",
            Error::TooManyVariables { .. } => "too_many_variables",
            Error::TableTooLarge { .. } => "table_too_large",
            Error::NotEdConstraint(_) => "not_ed_constraint",
            Error::LinkedTable(_) => "linked_table",
            Error::Precondition { .. } => "precondition",
            Error::UnknownGadget(_) => "unknown_gadget",
            Error::RealizationFailed { .. } => "realization_failed",
            Error::CyclicGadget(_) => "cyclic_gadget",
            Error::RewriteNotAcyclic { .. } => "rewrite_not_acyclic",
            Error::UnsupportedFunction(_) => "unsupported_function",
            Error::Dimacs { .. } => "dimacs",
            Error::Circuit(_) => "circuit",
            Error::Internal(_) => "internal",
        }
    }

    /// True for failures that point at a bug rather than at bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::Internal(_) | Error::RealizationFailed { .. } | Error::CyclicGadget(_)
        )
    }
}
