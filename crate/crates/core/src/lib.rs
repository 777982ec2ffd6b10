pub mod classify;
pub mod engine;
pub mod error;
pub mod frontends;
pub mod gadgets;
pub mod hypergraph;
pub mod instance;
pub mod json;
pub mod scalar;
pub mod table;

pub use error::{Error, Result};
pub use instance::{Constraint, Instance, VarId};
pub use scalar::ComplexRat;
pub use table::{builtin, Builtin, FuncTable, SymTable};
