//! Concrete gadgets. Every constructor returns a realization whose identity
//! can be checked with [`super::verify_realization`].

use crate::error::{Error, Result};
use crate::instance::VarId;
use crate::scalar::ComplexRat;
use crate::table::std_fns::*;
use crate::table::FuncTable;

use super::compose::transitive_compose;
use super::{GadgetBuilder, GadgetRealization};

/// Parameters for [`build`]. Only the ones a gadget needs are read.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GadgetParams {
    pub k: Option<usize>,
    pub a: Option<ComplexRat>,
    pub b: Option<ComplexRat>,
    pub c: Option<ComplexRat>,
}

impl GadgetParams {
    pub fn with_k(k: usize) -> Self {
        GadgetParams {
            k: Some(k),
            ..Self::default()
        }
    }

    pub fn with_ab(a: ComplexRat, b: ComplexRat) -> Self {
        GadgetParams {
            a: Some(a),
            b: Some(b),
            ..Self::default()
        }
    }

    fn get_k(&self, gadget: &str) -> Result<usize> {
        self.k.ok_or_else(|| precondition(gadget, "parameter k is required"))
    }

    fn get(&self, gadget: &str, which: &str) -> Result<ComplexRat> {
        let v = match which {
            "a" => &self.a,
            "b" => &self.b,
            _ => &self.c,
        };
        v.clone()
            .ok_or_else(|| precondition(gadget, &format!("parameter {which} is required")))
    }
}

fn precondition(gadget: &str, violated: &str) -> Error {
    Error::Precondition {
        gadget: gadget.to_string(),
        violated: violated.to_string(),
    }
}

fn c(n: i64) -> ComplexRat {
    ComplexRat::from(n)
}

fn q(p: i64, d: i64) -> ComplexRat {
    ComplexRat::ratio(p, d)
}

fn inv(x: &ComplexRat) -> ComplexRat {
    x.inv().expect("nonzero by precondition")
}

fn unary(f0: ComplexRat, f1: ComplexRat) -> FuncTable {
    FuncTable::unary(f0, f1)
}

/// Names accepted by [`build`], with the parameters each one reads.
pub fn names() -> &'static [(&'static str, &'static str)] {
    &[
        ("ImpliesFromORXOR", ""),
        ("EQ2FromImplies", ""),
        ("EQ3FromEQ2", ""),
        ("EQ2ViaXOR", ""),
        ("EQ3ViaXOR", ""),
        ("ANDkFromEQk", "k"),
        ("OR2FromNAND2", ""),
        ("NAND2FromOR2", ""),
        ("ORkFromImplies", "k"),
        ("NANDkFromImplies", "k"),
        ("ORkViaOR2XOR", "k"),
        ("NANDkViaOR2XOR", "k"),
        ("OR2FromF", "a b"),
        ("NAND2FromF", "a b"),
        ("NAND2FromNZ", "a b c"),
        ("NAND2FromAntiDG", "a b"),
        ("ONE", "k"),
        ("GateOR", "k"),
        ("FOR", ""),
        ("FAND", ""),
        ("FNOT", ""),
        ("XORTriangle", ""),
    ]
}

/// Builds a catalog gadget by name. Names are matched case-insensitively and
/// an optional `G_` prefix is ignored.
pub fn build(name: &str, p: &GadgetParams) -> Result<GadgetRealization> {
    let key = name.trim();
    let key = key
        .strip_prefix("G_")
        .or_else(|| key.strip_prefix("g_"))
        .unwrap_or(key);
    let canonical = names()
        .iter()
        .map(|(n, _)| *n)
        .find(|n| n.eq_ignore_ascii_case(key))
        .ok_or_else(|| Error::UnknownGadget(name.to_string()))?;
    match canonical {
        "ImpliesFromORXOR" => Ok(implies_from_or_xor()),
        "EQ2FromImplies" => Ok(eq2_from_implies()),
        "EQ3FromEQ2" => Ok(eq3_from_eq2()),
        "EQ2ViaXOR" => Ok(eq2_via_xor()),
        "EQ3ViaXOR" => Ok(eq3_via_xor()),
        "ANDkFromEQk" => and_from_eq(p.get_k(canonical)?),
        "OR2FromNAND2" => Ok(or2_from_nand2()),
        "NAND2FromOR2" => Ok(nand2_from_or2()),
        "ORkFromImplies" => or_from_implies(p.get_k(canonical)?),
        "NANDkFromImplies" => nand_from_implies(p.get_k(canonical)?),
        "ORkViaOR2XOR" => or_via_or2_xor(p.get_k(canonical)?),
        "NANDkViaOR2XOR" => nand_via_or2_xor(p.get_k(canonical)?),
        "OR2FromF" => or2_from_f(p.get(canonical, "a")?, p.get(canonical, "b")?),
        "NAND2FromF" => nand2_from_f(p.get(canonical, "a")?, p.get(canonical, "b")?),
        "NAND2FromNZ" => nand2_from_nz(
            p.get(canonical, "a")?,
            p.get(canonical, "b")?,
            p.get(canonical, "c")?,
        ),
        "NAND2FromAntiDG" => nand2_from_anti_dg(p.get(canonical, "a")?, p.get(canonical, "b")?),
        "ONE" => one_gadget(p.get_k(canonical)?),
        "GateOR" => gate_or(p.get_k(canonical)?),
        "FOR" => Ok(f_or()),
        "FAND" => Ok(f_and()),
        "FNOT" => Ok(f_not()),
        "XORTriangle" => Ok(xor_triangle()),
        _ => unreachable!("every catalog name is handled"),
    }
}

/// `Implies(x,y) = Σ_z OR2(z,y)·XOR(x,z)`.
pub(crate) fn implies_into(b: &mut GadgetBuilder, x: VarId, y: VarId) {
    let z = b.aux();
    b.add(or2(), &[z, y]).add(xor(), &[x, z]);
}

/// `EQ2(x,y) = Σ_t XOR(x,t)·XOR(t,y)`.
fn eq2_into(b: &mut GadgetBuilder, x: VarId, y: VarId) {
    let t = b.aux();
    b.add(xor(), &[x, t]).add(xor(), &[t, y]);
}

/// Exactly one of `p, q, r`, over {OR3, OR2, XOR, u0}.
fn one3_into(b: &mut GadgetBuilder, p: VarId, q: VarId, r: VarId) {
    // At most one of (v, q, r): at least two of their negations.
    let v = b.aux();
    let w: Vec<VarId> = (0..3).map(|_| b.aux()).collect();
    b.add(xor(), &[v, w[0]])
        .add(xor(), &[q, w[1]])
        .add(xor(), &[r, w[2]])
        .add(or(3), &[w[0], w[1], w[2]])
        .add(or2(), &[w[0], w[1]])
        .add(or2(), &[w[0], w[2]])
        .add(or2(), &[w[1], w[2]]);
    // p = 0 leaves [q + r = 1]; p = 1 leaves [q = r = 0].
    implies_into(b, p, v);
    b.add(u0(), &[p]).add(u0(), &[v]);
}

/// `T(p,c,s) = [s = p + c]`, which forces `p + c <= 1`.
fn t_into(b: &mut GadgetBuilder, p: VarId, c: VarId, s: VarId) {
    let t = b.aux();
    one3_into(b, p, c, t);
    b.add(xor(), &[t, s]);
}

pub fn implies_from_or_xor() -> GadgetRealization {
    let mut b = GadgetBuilder::new("ImpliesFromORXOR", implies());
    implies_into(&mut b, 0, 1);
    b.build()
}

pub fn eq2_from_implies() -> GadgetRealization {
    let mut b = GadgetBuilder::new("EQ2FromImplies", eq2());
    b.add(implies(), &[0, 1]).add(implies(), &[1, 0]);
    b.build()
}

pub fn eq3_from_eq2() -> GadgetRealization {
    let mut b = GadgetBuilder::new("EQ3FromEQ2", eq(3));
    b.add(eq2(), &[0, 1]).add(eq2(), &[1, 2]);
    b.build()
}

pub fn eq2_via_xor() -> GadgetRealization {
    let mut b = GadgetBuilder::new("EQ2ViaXOR", eq2());
    eq2_into(&mut b, 0, 1);
    b.build()
}

pub fn eq3_via_xor() -> GadgetRealization {
    let mut b = GadgetBuilder::new("EQ3ViaXOR", eq(3));
    eq2_into(&mut b, 0, 1);
    eq2_into(&mut b, 1, 2);
    b.build()
}

fn need_k(gadget: &str, k: usize, min: usize) -> Result<()> {
    if k < min {
        return Err(precondition(gadget, &format!("k >= {min}")));
    }
    Ok(())
}

/// `AND_k = EQ_k · Δ1(x_1)`.
pub fn and_from_eq(k: usize) -> Result<GadgetRealization> {
    need_k("ANDkFromEQk", k, 1)?;
    let vars: Vec<VarId> = (0..k).collect();
    let mut b = GadgetBuilder::new("ANDkFromEQk", and(k));
    b.add(eq(k), &vars).add(delta1(), &[0]);
    Ok(b.build())
}

/// `OR2(x,y) = Σ_z NAND2(x,z)·NAND2(y,z)·u0(z)`.
pub fn or2_from_nand2() -> GadgetRealization {
    let mut b = GadgetBuilder::new("OR2FromNAND2", or2());
    let z = b.aux();
    b.add(nand2(), &[0, z]).add(nand2(), &[1, z]).add(u0(), &[z]);
    b.build()
}

/// `NAND2(x,y) = -Σ_z OR2(x,z)·OR2(y,z)·u0(z)`.
pub fn nand2_from_or2() -> GadgetRealization {
    let mut b = GadgetBuilder::new("NAND2FromOR2", nand2());
    let z = b.aux();
    b.add(or2(), &[0, z]).add(or2(), &[1, z]).add(u0(), &[z]);
    b.lambda(c(-1));
    b.build()
}

/// `OR_k = -Σ_w u0(w)·Π_i Implies(x_i, w)`.
pub fn or_from_implies(k: usize) -> Result<GadgetRealization> {
    need_k("ORkFromImplies", k, 1)?;
    let mut b = GadgetBuilder::new("ORkFromImplies", or(k));
    let w = b.aux();
    b.add(u0(), &[w]);
    for i in 0..k {
        b.add(implies(), &[i, w]);
    }
    b.lambda(c(-1));
    Ok(b.build())
}

/// `NAND_k = Σ_z u0(z)·Π_i Implies(z, x_i)`.
pub fn nand_from_implies(k: usize) -> Result<GadgetRealization> {
    need_k("NANDkFromImplies", k, 1)?;
    let mut b = GadgetBuilder::new("NANDkFromImplies", nand(k));
    let z = b.aux();
    b.add(u0(), &[z]);
    for i in 0..k {
        b.add(implies(), &[z, i]);
    }
    Ok(b.build())
}

fn renamed(mut r: GadgetRealization, name: &str) -> GadgetRealization {
    r.name = name.to_string();
    r
}

pub fn or_via_or2_xor(k: usize) -> Result<GadgetRealization> {
    let r = transitive_compose(&or_from_implies(k)?, &implies_from_or_xor())?;
    Ok(renamed(r, "ORkViaOR2XOR"))
}

pub fn nand_via_or2_xor(k: usize) -> Result<GadgetRealization> {
    let r = transitive_compose(&nand_from_implies(k)?, &implies_from_or_xor())?;
    Ok(renamed(r, "NANDkViaOR2XOR"))
}

fn nonzero(gadget: &str, which: &str, v: &ComplexRat) -> Result<()> {
    if v.is_zero() {
        return Err(precondition(gadget, &format!("{which} != 0")));
    }
    Ok(())
}

/// OR2 from `f = (1, a, 0, b)` with `ab != 0`:
/// `OR2(x,y) = b^-2 Σ_z f(x,z) f(y,z) u(x) u(y) u'(z)`,
/// `u = [b/a, 1]`, `u' = [-a^2, 1]`.
pub fn or2_from_f(a: ComplexRat, bb: ComplexRat) -> Result<GadgetRealization> {
    let name = "OR2FromF";
    nonzero(name, "a", &a)?;
    nonzero(name, "b", &bb)?;
    let f = FuncTable::binary(c(1), a.clone(), c(0), bb.clone());
    let u = unary(bb.checked_div(&a).expect("a != 0"), c(1));
    let u2 = unary(-a.square(), c(1));
    let mut b = GadgetBuilder::new(name, or2());
    let z = b.aux();
    b.add(f.clone(), &[0, z])
        .add(f, &[1, z])
        .add(u.clone(), &[0])
        .add(u, &[1])
        .add(u2, &[z]);
    b.lambda(inv(&bb.square()));
    Ok(b.build())
}

/// NAND2 from `f = (0, a, b, 1)` with `ab != 0`:
/// `NAND2(x,y) = a^-2 Σ_z f(x,z) f(y,z) u(x) u(y) u'(z)`,
/// `u = [1, a]`, `u' = [-1/b^2, 1]`.
pub fn nand2_from_f(a: ComplexRat, bb: ComplexRat) -> Result<GadgetRealization> {
    let name = "NAND2FromF";
    nonzero(name, "a", &a)?;
    nonzero(name, "b", &bb)?;
    let f = FuncTable::binary(c(0), a.clone(), bb.clone(), c(1));
    let mut b = GadgetBuilder::new(name, nand2());
    let z = b.aux();
    nand2_from_f_into(&mut b, &f, &a, &bb, 0, 1, z);
    b.lambda(inv(&a.square()));
    Ok(b.build())
}

fn nand2_from_f_into(
    b: &mut GadgetBuilder,
    f: &FuncTable,
    a: &ComplexRat,
    bb: &ComplexRat,
    x: VarId,
    y: VarId,
    z: VarId,
) {
    let u = unary(c(1), a.clone());
    let u2 = unary(-inv(&bb.square()), c(1));
    b.add(f.clone(), &[x, z])
        .add(f.clone(), &[y, z])
        .add(u.clone(), &[x])
        .add(u, &[y])
        .add(u2, &[z]);
}

/// NAND2 from a nonzero `f = (1, a, b, c)` with `ab != ±c`.
///
/// `h(x,y) = Σ_z f(x,z) f(y,z) v(z)` with `v = [a^2, -1]` equals
/// `(ab-c)·(0, a, a, ab+c)`, so `h` rescales to `(0, t, t, 1)` with
/// `t = a/(ab+c)`, and that shape yields NAND2 as in [`nand2_from_f`].
pub fn nand2_from_nz(a: ComplexRat, bb: ComplexRat, cc: ComplexRat) -> Result<GadgetRealization> {
    let name = "NAND2FromNZ";
    nonzero(name, "a", &a)?;
    nonzero(name, "b", &bb)?;
    nonzero(name, "c", &cc)?;
    let ab = &a * &bb;
    let minus = &ab - &cc;
    let plus = &ab + &cc;
    if minus.is_zero() || plus.is_zero() {
        return Err(precondition(name, "ab != c and ab != -c"));
    }
    let f = FuncTable::binary(c(1), a.clone(), bb.clone(), cc.clone());
    let v = unary(a.square(), c(-1));
    let t = a.checked_div(&plus).expect("ab + c != 0");
    let lambda_h = inv(&(&minus * &plus));
    let u = unary(c(1), t.clone());
    let u2 = unary(-inv(&t.square()), c(1));

    let mut b = GadgetBuilder::new(name, nand2());
    let w = b.aux();
    for x in [0, 1] {
        let z = b.aux();
        b.add(f.clone(), &[x, z]).add(f.clone(), &[w, z]).add(v.clone(), &[z]);
        b.add(u.clone(), &[x]);
    }
    b.add(u2, &[w]);
    b.lambda(&lambda_h.square() * &inv(&t.square()));
    Ok(b.build())
}

/// NAND2 from `f = (1, a, b, -ab)` with `ab != 0`.
///
/// `f(p,q)·[1,1/b](p)·[1,1/a](q)` is the Hadamard matrix `H`, and
/// `diag(u) H diag(v) H diag(v') H diag(u')` is NAND2 for
/// `u = [1,5/4]`, `v = [3/2,-1/2]`, `v' = [1,2]`, `u' = [1/5,-1/3]`.
/// The normalizing unaries are merged into those four.
pub fn nand2_from_anti_dg(a: ComplexRat, bb: ComplexRat) -> Result<GadgetRealization> {
    let name = "NAND2FromAntiDG";
    nonzero(name, "a", &a)?;
    nonzero(name, "b", &bb)?;
    let ab = &a * &bb;
    let f = FuncTable::binary(c(1), a.clone(), bb.clone(), -&ab);
    let inv_a = inv(&a);
    let inv_b = inv(&bb);
    let inv_ab = inv(&ab);
    let mut b = GadgetBuilder::new(name, nand2());
    let z = b.aux();
    let w = b.aux();
    b.add(f.clone(), &[0, z])
        .add(f.clone(), &[z, w])
        .add(f, &[w, 1])
        .add(unary(c(1), &q(5, 4) * &inv_b), &[0])
        .add(unary(q(3, 2), &q(-1, 2) * &inv_ab), &[z])
        .add(unary(c(1), &c(2) * &inv_ab), &[w])
        .add(unary(q(1, 5), &q(-1, 3) * &inv_a), &[1]);
    Ok(b.build())
}

/// `ONE_k` over {OR3, OR2, XOR, u0, Δ1}. For `k >= 4` a chain of
/// `T(p,c,s) = [s = p + c]` carries the running sum.
pub fn one_gadget(k: usize) -> Result<GadgetRealization> {
    need_k("ONE", k, 1)?;
    let mut b = GadgetBuilder::new("ONE", one(k));
    match k {
        1 => {
            b.add(delta1(), &[0]);
        }
        2 => {
            b.add(xor(), &[0, 1]);
        }
        3 => one3_into(&mut b, 0, 1, 2),
        _ => {
            let mut s = 0;
            for i in 1..k - 1 {
                let next = b.aux();
                t_into(&mut b, s, i, next);
                s = next;
            }
            b.add(xor(), &[s, k - 1]);
        }
    }
    Ok(b.build())
}

/// Gate relation of an OR gate `g` with children `c_1..c_m`:
/// `g = 0` and all children 0, or `g = 1` and exactly one child 1.
pub fn gate_or_table(m: usize) -> FuncTable {
    FuncTable::relation(m + 1, |x| {
        let ones = x[1..].iter().filter(|&&b| b).count();
        if x[0] {
            ones == 1
        } else {
            ones == 0
        }
    })
    .with_name(format!("R_OR_{m}"))
}

/// [`gate_or_table`] over {OR3, OR2, XOR, u0}, as a chain of
/// `T(s_{i-1}, c_i, s_i)` with `s_1 = c_1` and `s_m = g`.
pub fn gate_or(m: usize) -> Result<GadgetRealization> {
    need_k("GateOR", m, 1)?;
    let mut b = GadgetBuilder::new("GateOR", gate_or_table(m));
    if m == 1 {
        eq2_into(&mut b, 0, 1);
        return Ok(b.build());
    }
    let mut s = 1;
    for i in 2..=m {
        let next = if i == m { 0 } else { b.aux() };
        t_into(&mut b, s, i, next);
        s = next;
    }
    Ok(b.build())
}

/// `[z = x OR y] = Σ_w OR3(x,y,w)·NAND2(z,w)·u1(z)·u0(w)`.
pub fn f_or() -> GadgetRealization {
    let target = FuncTable::relation(3, |x| x[2] == (x[0] || x[1])).with_name("F_OR");
    let mut b = GadgetBuilder::new("FOR", target);
    let w = b.aux();
    b.add(or(3), &[0, 1, w])
        .add(nand2(), &[2, w])
        .add(u1(), &[2])
        .add(u0(), &[w]);
    b.build()
}

/// `[z = x AND y] = -Σ_w NAND3(x,y,w)·OR2(z,w)·u0(w)·u0(z)`.
pub fn f_and() -> GadgetRealization {
    let target = FuncTable::relation(3, |x| x[2] == (x[0] && x[1])).with_name("F_AND");
    let mut b = GadgetBuilder::new("FAND", target);
    let w = b.aux();
    b.add(nand(3), &[0, 1, w])
        .add(or2(), &[2, w])
        .add(u0(), &[w])
        .add(u0(), &[2]);
    b.lambda(c(-1));
    b.build()
}

/// `[y = NOT x]` is XOR itself.
pub fn f_not() -> GadgetRealization {
    let target = xor().with_name("F_NOT");
    let mut b = GadgetBuilder::new("FNOT", target);
    b.add(xor(), &[0, 1]);
    b.build()
}

/// `XOR(x,y) = Σ_z OR2(x,z)·OR2(y,z)·OR2(x,y)·u1(z)`. The identity holds but
/// the three pairwise edges form a cycle, so this is not a gadget.
pub fn xor_triangle() -> GadgetRealization {
    let mut b = GadgetBuilder::new("XORTriangle", xor());
    let z = b.aux();
    b.add(or2(), &[0, z])
        .add(or2(), &[1, z])
        .add(or2(), &[0, 1])
        .add(u1(), &[z]);
    b.build()
}
