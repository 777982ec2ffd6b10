pub mod circuit;
pub mod cnf2;

pub use circuit::{
    circuit_from_str, compile_circuit, count_subtrees, parse_bits, Circuit, CompileMode,
    CompiledCircuit, Gate, GateKind,
};
pub use cnf2::{
    count_2sat, implies_to_2cnf, parse_dimacs, translate_to_implies, Cnf2, Lit,
};
