//! Acyclic 2CNF formulas and their translations to and from instances over
//! Implies.

use std::fmt;

use serde::Serialize;

use crate::engine::{count, CountResult, MethodChoice};
use crate::error::{Error, Result};
use crate::gadgets::{nand_from_implies, or_from_implies, rewrite_instance};
use crate::hypergraph::require_acyclic;
use crate::instance::{Instance, VarId};
use crate::scalar::ComplexRat;
use crate::table::std_fns::*;
use crate::table::FuncTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Lit {
    /// 0-based variable index.
    pub var: usize,
    pub positive: bool,
}

impl Lit {
    pub fn pos(var: usize) -> Self {
        Lit { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Lit {
            var,
            positive: false,
        }
    }

    pub fn holds(self, assignment: &[bool]) -> bool {
        assignment[self.var] == self.positive
    }

    fn dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }
}

/// A conjunction of two-literal clauses. Unit clauses are stored as
/// `(l ∨ l)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cnf2 {
    pub num_vars: usize,
    pub clauses: Vec<[Lit; 2]>,
}

impl Cnf2 {
    pub fn new(num_vars: usize) -> Self {
        Cnf2 {
            num_vars,
            clauses: Vec::new(),
        }
    }

    pub fn add(&mut self, a: Lit, b: Lit) -> Result<()> {
        if a.var >= self.num_vars || b.var >= self.num_vars {
            return Err(Error::VariableOutOfRange(a.var.max(b.var)));
        }
        self.clauses.push([a, b]);
        Ok(())
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|[a, b]| a.holds(assignment) || b.holds(assignment))
    }

    /// Instance over {OR2, Implies, NAND2} plus unit and tautology unaries,
    /// on variables `x1..xn`. Its count is the number of models.
    pub fn to_instance(&self) -> Instance {
        let names: Vec<String> = (1..=self.num_vars).map(|i| format!("x{i}")).collect();
        let mut inst = Instance::with_vars(&names).expect("distinct names");
        for &[a, b] in &self.clauses {
            let (func, vars): (FuncTable, Vec<VarId>) = if a.var == b.var {
                match (a.positive, b.positive) {
                    (true, true) => (delta1(), vec![a.var]),
                    (false, false) => (delta0(), vec![a.var]),
                    _ => (one_one(), vec![a.var]),
                }
            } else {
                match (a.positive, b.positive) {
                    (true, true) => (or2(), vec![a.var, b.var]),
                    (false, true) => (implies(), vec![a.var, b.var]),
                    (true, false) => (implies(), vec![b.var, a.var]),
                    (false, false) => (nand2(), vec![a.var, b.var]),
                }
            };
            inst.push(func, &vars).expect("variables are in range");
        }
        inst
    }

    pub fn to_dimacs(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Cnf2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.num_vars, self.clauses.len())?;
        for [a, b] in &self.clauses {
            if a == b {
                writeln!(f, "{} 0", a.dimacs())?;
            } else {
                writeln!(f, "{} {} 0", a.dimacs(), b.dimacs())?;
            }
        }
        Ok(())
    }
}

fn one_one() -> FuncTable {
    FuncTable::from_ints(1, &[1, 1])
}

/// Parses the DIMACS subset: comment lines, one `p cnf n m` header, and
/// clauses of one or two literals each terminated by `0`.
pub fn parse_dimacs(text: &str) -> Result<Cnf2> {
    let err = |line: usize, msg: String| Error::Dimacs { line, msg };
    let mut cnf: Option<Cnf2> = None;
    let mut declared = 0usize;
    let mut pending: Vec<Lit> = Vec::new();
    let mut last_line = 0;
    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        last_line = line;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('c') {
            continue;
        }
        if t.starts_with('%') {
            break;
        }
        if t.starts_with('p') {
            if cnf.is_some() {
                return Err(err(line, "second problem line".into()));
            }
            let parts: Vec<&str> = t.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(err(line, format!("expected `p cnf <vars> <clauses>`, got {t:?}")));
            }
            let n = parts[2]
                .parse()
                .map_err(|_| err(line, format!("bad variable count {:?}", parts[2])))?;
            declared = parts[3]
                .parse()
                .map_err(|_| err(line, format!("bad clause count {:?}", parts[3])))?;
            cnf = Some(Cnf2::new(n));
            continue;
        }
        let Some(cnf) = cnf.as_mut() else {
            return Err(err(line, "clause before the problem line".into()));
        };
        for tok in t.split_whitespace() {
            let v: i64 = tok
                .parse()
                .map_err(|_| err(line, format!("bad literal {tok:?}")))?;
            if v == 0 {
                let clause = match pending.as_slice() {
                    [a] => [*a, *a],
                    [a, b] => [*a, *b],
                    other => {
                        return Err(err(
                            line,
                            format!("clause with {} literals; only 1 or 2 are allowed", other.len()),
                        ))
                    }
                };
                cnf.clauses.push(clause);
                pending.clear();
                continue;
            }
            let var = v.unsigned_abs() as usize - 1;
            if var >= cnf.num_vars {
                return Err(err(line, format!("literal {v} exceeds {} variables", cnf.num_vars)));
            }
            pending.push(Lit {
                var,
                positive: v > 0,
            });
        }
    }
    let cnf = cnf.ok_or_else(|| err(last_line, "missing problem line".into()))?;
    if !pending.is_empty() {
        return Err(err(last_line, "last clause is not terminated by 0".into()));
    }
    if cnf.clauses.len() != declared {
        return Err(err(
            last_line,
            format!("header declares {declared} clauses, found {}", cnf.clauses.len()),
        ));
    }
    Ok(cnf)
}

/// Model count of an acyclic formula.
pub fn count_2sat(cnf: &Cnf2, method: MethodChoice) -> Result<CountResult> {
    let inst = cnf.to_instance();
    require_acyclic(&inst)?;
    count(&inst, method)
}

fn is_unary_01(f: &FuncTable) -> bool {
    f.arity() == 1 && f.values().iter().all(|v| v.is_zero() || v.is_one())
}

/// Rewrites OR2 and NAND2 constraints into {Implies, u0}. Unaries with 0/1
/// entries pass through. `scalar · count(result) = count(inst)`.
pub fn translate_to_implies(inst: &Instance) -> Result<(Instance, ComplexRat)> {
    for f in inst.functions() {
        let ok = [or2(), nand2(), implies()].iter().any(|g| g.same_values(&f)) || is_unary_01(&f);
        if !ok {
            return Err(Error::UnsupportedFunction(f.label()));
        }
    }
    let mut cur = inst.clone();
    let mut scalar = ComplexRat::one();
    for (f, g) in [
        (or2(), or_from_implies(2)?),
        (nand2(), nand_from_implies(2)?),
    ] {
        let rw = rewrite_instance(&cur, &f, &g)?;
        scalar = &scalar * &rw.scalar;
        cur = rw.instance;
    }
    Ok((cur, scalar))
}

/// Formula over the same variables whose model count equals `count(inst)`,
/// for instances over Implies and the 0/1 unaries.
pub fn implies_to_2cnf(inst: &Instance) -> Result<Cnf2> {
    let mut cnf = Cnf2::new(inst.num_vars());
    let imp = implies();
    for c in inst.constraints() {
        let f = &c.func;
        if f.same_values(&imp) {
            cnf.add(Lit::neg(c.vars[0]), Lit::pos(c.vars[1]))?;
            continue;
        }
        if !is_unary_01(f) {
            return Err(Error::UnsupportedFunction(f.label()));
        }
        let u = c.vars[0];
        match (f.values()[0].is_one(), f.values()[1].is_one()) {
            (true, false) => cnf.add(Lit::neg(u), Lit::neg(u))?,
            (false, true) => cnf.add(Lit::pos(u), Lit::pos(u))?,
            (false, false) => {
                cnf.add(Lit::pos(u), Lit::pos(u))?;
                cnf.add(Lit::neg(u), Lit::neg(u))?;
            }
            (true, true) => cnf.add(Lit::pos(u), Lit::neg(u))?,
        }
    }
    Ok(cnf)
}
