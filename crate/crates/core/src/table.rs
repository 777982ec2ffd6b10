//! Constraint functions as explicit value tables.
//!
//! Inputs are ordered lexicographically with `x_1` as the most significant
//! bit, so a binary table reads `(f(00), f(01), f(10), f(11))`. All index
//! arguments are 0-based.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::ComplexRat;

/// Tables above this arity are refused outright.
pub const MAX_TABLE_ARITY: usize = 24;

/// Bit `i` of input index `idx` for a `k`-ary function.
#[inline]
pub fn bit(idx: usize, i: usize, k: usize) -> bool {
    (idx >> (k - 1 - i)) & 1 == 1
}

/// Index of an input tuple.
pub fn index_of(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

/// Input tuple of an index.
pub fn bits_of(idx: usize, k: usize) -> Vec<bool> {
    (0..k).map(|i| bit(idx, i, k)).collect()
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FuncTable {
    arity: usize,
    values: Vec<ComplexRat>,
    name: Option<String>,
    linked: bool,
}

impl FuncTable {
    pub fn new(arity: usize, values: Vec<ComplexRat>) -> Result<Self> {
        if arity > MAX_TABLE_ARITY {
            return Err(Error::ArityTooLarge(arity));
        }
        let expected = 1usize << arity;
        if values.len() != expected {
            return Err(Error::TableLength {
                arity,
                expected,
                found: values.len(),
            });
        }
        Ok(FuncTable {
            arity,
            values,
            name: None,
            linked: false,
        })
    }

    /// Table from small integer entries. Panics on a wrong length.
    pub fn from_ints(arity: usize, values: &[i64]) -> Self {
        FuncTable::new(arity, values.iter().map(|&v| ComplexRat::from(v)).collect())
            .expect("table length must be 2^arity")
    }

    /// Table from a closure over input tuples.
    pub fn from_fn(arity: usize, f: impl Fn(&[bool]) -> ComplexRat) -> Self {
        let values = (0..1usize << arity).map(|idx| f(&bits_of(idx, arity))).collect();
        FuncTable::new(arity, values).expect("length is 2^arity by construction")
    }

    /// 0/1 table of a relation.
    pub fn relation(arity: usize, r: impl Fn(&[bool]) -> bool) -> Self {
        FuncTable::from_fn(arity, |x| ComplexRat::from(r(x) as i64))
    }

    pub fn scalar(c: ComplexRat) -> Self {
        FuncTable::new(0, vec![c]).expect("one value for arity 0")
    }

    /// Binary table `(f00, f01, f10, f11)`.
    pub fn binary(f00: ComplexRat, f01: ComplexRat, f10: ComplexRat, f11: ComplexRat) -> Self {
        FuncTable::new(2, vec![f00, f01, f10, f11]).expect("four values")
    }

    /// Unary table `[f0, f1]`.
    pub fn unary(f0: ComplexRat, f1: ComplexRat) -> Self {
        FuncTable::new(1, vec![f0, f1]).expect("two values")
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn without_name(mut self) -> Self {
        self.name = None;
        self
    }

    pub(crate) fn with_linked(mut self, linked: bool) -> Self {
        self.linked = linked;
        self
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn values(&self) -> &[ComplexRat] {
        &self.values
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// A printable label: the name if present, otherwise the tuple.
    pub fn label(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => self.to_string(),
        }
    }

    /// Whether this table came out of a linking operation.
    pub fn is_linked(&self) -> bool {
        self.linked
    }

    pub fn value(&self, idx: usize) -> &ComplexRat {
        &self.values[idx]
    }

    pub fn eval(&self, bits: &[bool]) -> &ComplexRat {
        debug_assert_eq!(bits.len(), self.arity);
        &self.values[index_of(bits)]
    }

    /// Same arity and values; names and flags are ignored.
    pub fn same_values(&self, other: &FuncTable) -> bool {
        self.arity == other.arity && self.values == other.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(ComplexRat::is_zero)
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.arity {
            return Err(Error::IndexOutOfRange {
                index: i,
                arity: self.arity,
            });
        }
        Ok(())
    }

    fn derived(&self, arity: usize, values: Vec<ComplexRat>) -> FuncTable {
        FuncTable {
            arity,
            values,
            name: None,
            linked: self.linked,
        }
    }

    /// Fix `x_i = c`.
    pub fn pin(&self, i: usize, c: bool) -> Result<FuncTable> {
        self.check_index(i)?;
        let k = self.arity;
        let values = (0..1usize << (k - 1))
            .map(|r| self.values[insert_bit(r, i, k - 1, c)].clone())
            .collect();
        Ok(self.derived(k - 1, values))
    }

    /// Sum out `x_i`.
    pub fn project(&self, i: usize) -> Result<FuncTable> {
        self.check_index(i)?;
        let k = self.arity;
        let values = (0..1usize << (k - 1))
            .map(|r| {
                &self.values[insert_bit(r, i, k - 1, false)]
                    + &self.values[insert_bit(r, i, k - 1, true)]
            })
            .collect();
        Ok(self.derived(k - 1, values))
    }

    /// Multiply every entry by `lambda`, which must be nonzero.
    pub fn normalize(&self, lambda: &ComplexRat) -> Result<FuncTable> {
        if lambda.is_zero() {
            return Err(Error::ZeroScalar);
        }
        Ok(self.scale(lambda))
    }

    /// Entrywise scaling without the nonzero check.
    pub fn scale(&self, lambda: &ComplexRat) -> FuncTable {
        let values = self.values.iter().map(|v| v * lambda).collect();
        self.derived(self.arity, values)
    }

    /// Insert a dummy variable so that it sits after the first `after`
    /// original variables.
    pub fn expand(&self, after: usize) -> Result<FuncTable> {
        if after > self.arity {
            return Err(Error::IndexOutOfRange {
                index: after,
                arity: self.arity,
            });
        }
        let k = self.arity + 1;
        let values = (0..1usize << k)
            .map(|idx| self.values[remove_bit(idx, after, k)].clone())
            .collect();
        Ok(self.derived(k, values))
    }

    /// Identify `x_i` with `x_j` and drop position `i`. The result is flagged
    /// as linked.
    pub fn link(&self, i: usize, j: usize) -> Result<FuncTable> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Err(Error::LinkSameIndex(i));
        }
        let k = self.arity;
        let j_after = if j > i { j - 1 } else { j };
        let values = (0..1usize << (k - 1))
            .map(|r| {
                let c = bit(r, j_after, k - 1);
                self.values[insert_bit(r, i, k - 1, c)].clone()
            })
            .collect();
        Ok(self.derived(k - 1, values).with_linked(true))
    }

    /// Reorder variables: position `p` of the result reads original
    /// variable `perm[p]`.
    pub fn permute(&self, perm: &[usize]) -> Result<FuncTable> {
        let k = self.arity;
        let mut seen = vec![false; k];
        if perm.len() != k {
            return Err(Error::ArityMismatch {
                arity: k,
                found: perm.len(),
            });
        }
        for &p in perm {
            self.check_index(p)?;
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::Parse(format!("permutation repeats index {p}")));
            }
        }
        let values = (0..1usize << k)
            .map(|idx| {
                let mut orig = vec![false; k];
                for (pos, &src) in perm.iter().enumerate() {
                    orig[src] = bit(idx, pos, k);
                }
                self.values[index_of(&orig)].clone()
            })
            .collect();
        Ok(self.derived(k, values))
    }

    /// Entrywise product of two tables of the same arity.
    pub fn pointwise_mul(&self, other: &FuncTable) -> Result<FuncTable> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                arity: self.arity,
                found: other.arity,
            });
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Ok(self.derived(self.arity, values).with_linked(self.linked || other.linked))
    }

    /// Symmetric form if the value depends only on Hamming weight.
    pub fn to_sym(&self) -> Option<SymTable> {
        let mut by_weight: Vec<Option<ComplexRat>> = vec![None; self.arity + 1];
        for (idx, v) in self.values.iter().enumerate() {
            let w = idx.count_ones() as usize;
            match &by_weight[w] {
                None => by_weight[w] = Some(v.clone()),
                Some(prev) if prev == v => {}
                Some(_) => return None,
            }
        }
        Some(SymTable {
            values: by_weight.into_iter().map(Option::unwrap).collect(),
        })
    }
}

/// Insert bit `c` at position `i` into a `k`-bit index (positions counted
/// from the most significant end).
#[inline]
fn insert_bit(r: usize, i: usize, k: usize, c: bool) -> usize {
    let low_len = k - i;
    let high = r >> low_len;
    let low = r & ((1 << low_len) - 1);
    (((high << 1) | c as usize) << low_len) | low
}

/// Remove position `i` from a `k`-bit index.
#[inline]
fn remove_bit(idx: usize, i: usize, k: usize) -> usize {
    let low_len = k - 1 - i;
    let high = idx >> (low_len + 1);
    let low = idx & ((1 << low_len) - 1);
    (high << low_len) | low
}

impl fmt::Display for FuncTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(sym) = self.to_sym().filter(|_| self.arity <= 1) {
            return write!(f, "{sym}");
        }
        write!(f, "(")?;
        for (n, v) in self.values.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for FuncTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = &self.name {
            write!(f, "{n}=")?;
        }
        write!(f, "{self}")?;
        if self.linked {
            write!(f, " [linked]")?;
        }
        Ok(())
    }
}

/// Symmetric function `[a_0, …, a_k]`: value `a_w` on inputs of weight `w`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymTable {
    values: Vec<ComplexRat>,
}

impl SymTable {
    /// `values` must be nonempty; arity is `values.len() - 1`.
    pub fn new(values: Vec<ComplexRat>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Parse("symmetric table needs at least one value".into()));
        }
        Ok(SymTable { values })
    }

    pub fn from_ints(values: &[i64]) -> Self {
        SymTable::new(values.iter().map(|&v| ComplexRat::from(v)).collect())
            .expect("nonempty")
    }

    pub fn arity(&self) -> usize {
        self.values.len() - 1
    }

    pub fn by_weight(&self) -> &[ComplexRat] {
        &self.values
    }

    pub fn to_table(&self) -> Result<FuncTable> {
        let k = self.arity();
        if k > MAX_TABLE_ARITY {
            return Err(Error::ArityTooLarge(k));
        }
        Ok(FuncTable::from_fn(k, |x| {
            self.values[x.iter().filter(|&&b| b).count()].clone()
        }))
    }
}

impl fmt::Display for SymTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (n, v) in self.values.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for SymTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The named standard functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    Eq,
    Neq,
    Or,
    And,
    Nand,
    Xor,
    Implies,
    RImplies,
    Delta0,
    Delta1,
    One,
    /// `u_0 = [1,-1]`
    U0,
    /// `u_1 = [-1,1]`
    U1,
}

impl Builtin {
    pub const ALL: [Builtin; 13] = [
        Builtin::Eq,
        Builtin::Neq,
        Builtin::Or,
        Builtin::And,
        Builtin::Nand,
        Builtin::Xor,
        Builtin::Implies,
        Builtin::RImplies,
        Builtin::Delta0,
        Builtin::Delta1,
        Builtin::One,
        Builtin::U0,
        Builtin::U1,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Builtin::Eq => "EQ",
            Builtin::Neq => "NEQ",
            Builtin::Or => "OR",
            Builtin::And => "AND",
            Builtin::Nand => "NAND",
            Builtin::Xor => "XOR",
            Builtin::Implies => "Implies",
            Builtin::RImplies => "RImplies",
            Builtin::Delta0 => "Delta0",
            Builtin::Delta1 => "Delta1",
            Builtin::One => "ONE",
            Builtin::U0 => "u0",
            Builtin::U1 => "u1",
        }
    }

    /// Arity when it is fixed.
    pub fn fixed_arity(self) -> Option<usize> {
        match self {
            Builtin::Xor | Builtin::Implies | Builtin::RImplies => Some(2),
            Builtin::Delta0 | Builtin::Delta1 | Builtin::U0 | Builtin::U1 => Some(1),
            _ => None,
        }
    }

    /// NEQ is only meaningful as the binary disequality.
    fn accepts(self, k: usize) -> bool {
        match (self.fixed_arity(), self) {
            (Some(a), _) => a == k,
            (None, Builtin::Neq) => k == 2,
            (None, _) => k >= 1,
        }
    }

    pub fn table(self, k: usize) -> Result<FuncTable> {
        if !self.accepts(k) {
            return Err(Error::BuiltinArity {
                name: self.as_str().into(),
                arity: k,
            });
        }
        if k > MAX_TABLE_ARITY {
            return Err(Error::ArityTooLarge(k));
        }
        let ones = |x: &[bool]| x.iter().filter(|&&b| b).count();
        let t = match self {
            Builtin::Eq => FuncTable::relation(k, |x| x.iter().all(|&b| b == x[0])),
            Builtin::Neq | Builtin::Xor => FuncTable::relation(k, |x| x[0] != x[1]),
            Builtin::Or => FuncTable::relation(k, |x| x.iter().any(|&b| b)),
            Builtin::And => FuncTable::relation(k, |x| x.iter().all(|&b| b)),
            Builtin::Nand => FuncTable::relation(k, |x| !x.iter().all(|&b| b)),
            Builtin::Implies => FuncTable::relation(2, |x| !x[0] || x[1]),
            Builtin::RImplies => FuncTable::relation(2, |x| x[0] || !x[1]),
            Builtin::Delta0 => FuncTable::from_ints(1, &[1, 0]),
            Builtin::Delta1 => FuncTable::from_ints(1, &[0, 1]),
            Builtin::One => FuncTable::relation(k, |x| ones(x) == 1),
            Builtin::U0 => FuncTable::from_ints(1, &[1, -1]),
            Builtin::U1 => FuncTable::from_ints(1, &[-1, 1]),
        };
        let name = match self.fixed_arity() {
            Some(_) => self.as_str().to_string(),
            None => format!("{}_{k}", self.as_str()),
        };
        Ok(t.with_name(name))
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['_', '-'], "");
        let b = match key.as_str() {
            "eq" => Builtin::Eq,
            "neq" => Builtin::Neq,
            "or" => Builtin::Or,
            "and" => Builtin::And,
            "nand" => Builtin::Nand,
            "xor" => Builtin::Xor,
            "implies" | "imp" => Builtin::Implies,
            "rimplies" => Builtin::RImplies,
            "delta0" => Builtin::Delta0,
            "delta1" => Builtin::Delta1,
            "one" => Builtin::One,
            "u0" => Builtin::U0,
            "u1" => Builtin::U1,
            _ => return Err(Error::UnknownBuiltin(s.to_string())),
        };
        Ok(b)
    }
}

/// `builtin("OR", 3)` and friends.
pub fn builtin(name: &str, k: usize) -> Result<FuncTable> {
    name.parse::<Builtin>()?.table(k)
}

/// Shorthands for the functions that appear everywhere.
pub mod std_fns {
    use super::{Builtin, FuncTable};

    fn b(f: Builtin, k: usize) -> FuncTable {
        f.table(k).expect("standard arity")
    }

    pub fn eq(k: usize) -> FuncTable {
        b(Builtin::Eq, k)
    }
    pub fn or(k: usize) -> FuncTable {
        b(Builtin::Or, k)
    }
    pub fn and(k: usize) -> FuncTable {
        b(Builtin::And, k)
    }
    pub fn nand(k: usize) -> FuncTable {
        b(Builtin::Nand, k)
    }
    pub fn one(k: usize) -> FuncTable {
        b(Builtin::One, k)
    }
    pub fn xor() -> FuncTable {
        b(Builtin::Xor, 2)
    }
    pub fn implies() -> FuncTable {
        b(Builtin::Implies, 2)
    }
    pub fn rimplies() -> FuncTable {
        b(Builtin::RImplies, 2)
    }
    pub fn delta0() -> FuncTable {
        b(Builtin::Delta0, 1)
    }
    pub fn delta1() -> FuncTable {
        b(Builtin::Delta1, 1)
    }
    pub fn u0() -> FuncTable {
        b(Builtin::U0, 1)
    }
    pub fn u1() -> FuncTable {
        b(Builtin::U1, 1)
    }
    pub fn eq2() -> FuncTable {
        eq(2)
    }
    pub fn or2() -> FuncTable {
        or(2)
    }
    pub fn nand2() -> FuncTable {
        nand(2)
    }
}

#[cfg(test)]
mod tests {
    use super::std_fns::*;
    use super::*;

    fn ints(t: &FuncTable) -> Vec<String> {
        t.values().iter().map(|v| v.to_string()).collect()
    }

    fn t(k: usize, v: &[i64]) -> FuncTable {
        FuncTable::from_ints(k, v)
    }

    #[test]
    fn builtin_tables() {
        assert!(builtin("XOR", 2).unwrap().same_values(&t(2, &[0, 1, 1, 0])));
        assert!(builtin("EQ", 1).unwrap().same_values(&t(1, &[1, 1])));
        let one3 = builtin("ONE", 3).unwrap();
        let support: Vec<usize> = (0..8).filter(|&i| !one3.value(i).is_zero()).collect();
        assert_eq!(support, vec![0b001, 0b010, 0b100]);
        assert!(or2().same_values(&t(2, &[0, 1, 1, 1])));
        assert!(builtin("AND", 2).unwrap().same_values(&t(2, &[0, 0, 0, 1])));
        assert!(implies().same_values(&t(2, &[1, 1, 0, 1])));
        assert!(rimplies().same_values(&t(2, &[1, 0, 1, 1])));
        assert!(nand2().same_values(&t(2, &[1, 1, 1, 0])));
        assert!(builtin("NEQ", 2).unwrap().same_values(&xor()));
        assert_eq!(or(3).to_sym().unwrap(), SymTable::from_ints(&[0, 1, 1, 1]));
        assert_eq!(or2().name(), Some("OR_2"));
    }

    #[test]
    fn builtin_rejections() {
        assert!(matches!(builtin("FOO", 2), Err(Error::UnknownBuiltin(_))));
        assert!(matches!(builtin("XOR", 3), Err(Error::BuiltinArity { .. })));
        assert!(matches!(builtin("Delta1", 2), Err(Error::BuiltinArity { .. })));
        assert!(matches!(builtin("OR", 0), Err(Error::BuiltinArity { .. })));
        assert!(matches!(builtin("NEQ", 3), Err(Error::BuiltinArity { .. })));
    }

    #[test]
    fn pin_examples() {
        assert!(or2().pin(0, false).unwrap().same_values(&delta1()));
        assert!(or2().pin(0, true).unwrap().same_values(&t(1, &[1, 1])));
        // (1,a,b,c) with x_2 = 1 keeps (a, c)
        let f = t(2, &[1, 2, 3, 5]);
        assert!(f.pin(1, true).unwrap().same_values(&t(1, &[2, 5])));
        assert!(matches!(f.pin(2, true), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn project_examples() {
        assert!(or2().project(0).unwrap().same_values(&t(1, &[1, 2])));
        assert!(xor().project(1).unwrap().same_values(&t(1, &[1, 1])));
        let s = delta0().project(0).unwrap();
        assert_eq!(s.arity(), 0);
        assert_eq!(ints(&s), vec!["1"]);
    }

    #[test]
    fn normalize_expand_link() {
        assert!(or2()
            .normalize(&ComplexRat::from(-1))
            .unwrap()
            .same_values(&t(2, &[0, -1, -1, -1])));
        assert!(matches!(or2().normalize(&ComplexRat::zero()), Err(Error::ZeroScalar)));
        assert!(delta1().expand(1).unwrap().same_values(&t(2, &[0, 0, 1, 1])));
        assert!(delta1().expand(0).unwrap().same_values(&t(2, &[0, 1, 0, 1])));
        let l = xor().link(0, 1).unwrap();
        assert!(l.same_values(&t(1, &[0, 0])));
        assert!(l.is_linked());
        assert!(matches!(xor().link(1, 1), Err(Error::LinkSameIndex(1))));
    }

    #[test]
    fn link_keeps_the_right_positions() {
        // f(x1,x2,x3) = x1 + 2 x2 + 4 x3; link x3 := x1 gives g(x1,x2) = 5 x1 + 2 x2
        let f = FuncTable::from_fn(3, |x| {
            ComplexRat::from(x[0] as i64 + 2 * x[1] as i64 + 4 * x[2] as i64)
        });
        let g = f.link(2, 0).unwrap();
        assert!(g.same_values(&t(2, &[0, 2, 5, 7])));
        // link x1 := x3 gives g(x2,x3) = 2 x2 + 5 x3
        let g = f.link(0, 2).unwrap();
        assert!(g.same_values(&t(2, &[0, 5, 2, 7])));
    }

    #[test]
    fn permute_swaps() {
        let f = t(2, &[1, 2, 3, 4]);
        assert!(f.permute(&[1, 0]).unwrap().same_values(&t(2, &[1, 3, 2, 4])));
        assert!(implies().permute(&[1, 0]).unwrap().same_values(&rimplies()));
        assert!(f.permute(&[0, 0]).is_err());
    }

    #[test]
    fn sym_round_trip() {
        let s = SymTable::from_ints(&[3, -1, 0, 7]);
        let tab = s.to_table().unwrap();
        assert_eq!(tab.arity(), 3);
        assert_eq!(tab.to_sym().unwrap(), s);
        assert!(t(2, &[1, 2, 3, 4]).to_sym().is_none());
    }

    #[test]
    fn display_forms() {
        assert_eq!(delta1().to_string(), "[0,1]");
        assert_eq!(or2().to_string(), "(0,1,1,1)");
        assert_eq!(format!("{:?}", or2()), "OR_2=(0,1,1,1)");
    }
}
