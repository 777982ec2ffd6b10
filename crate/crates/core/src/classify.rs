//! Membership tests for NZ, DG, ED, IM and the complexity verdicts built
//! on them.
//!
//! * NZ: no zero entry.
//! * DG: a product of unary functions.
//! * ED: a product of unary functions, `EQ2` and `XOR`.
//! * IM: a product of unary functions and `Implies`. Decided as "support
//!   closed under coordinatewise min and max" plus
//!   `f(x)·f(y) = f(x∧y)·f(x∨y)` on the support.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::ComplexRat;
use crate::table::{bit, FuncTable};

/// Nonzero inputs of a function, as table indices in ascending order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Support {
    pub arity: usize,
    pub tuples: Vec<usize>,
}

impl Support {
    pub fn contains(&self, idx: usize) -> bool {
        self.tuples.binary_search(&idx).is_ok()
    }

    pub fn is_full(&self) -> bool {
        self.tuples.len() == 1usize << self.arity
    }

    /// Tuples as bit strings, `x_1` first.
    pub fn to_strings(&self) -> Vec<String> {
        self.tuples
            .iter()
            .map(|&t| {
                (0..self.arity)
                    .map(|i| if bit(t, i, self.arity) { '1' } else { '0' })
                    .collect()
            })
            .collect()
    }
}

impl Serialize for Support {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

pub fn support(f: &FuncTable) -> Support {
    Support {
        arity: f.arity(),
        tuples: (0..f.values().len())
            .filter(|&i| !f.value(i).is_zero())
            .collect(),
    }
}

pub fn is_nz(f: &FuncTable) -> bool {
    f.values().iter().all(|v| !v.is_zero())
}

/// Every mode flattening has rank at most one.
pub fn is_dg(f: &FuncTable) -> bool {
    let k = f.arity();
    (0..k).all(|i| mode_rank_le_one(f, i))
}

fn mode_rank_le_one(f: &FuncTable, i: usize) -> bool {
    let k = f.arity();
    let stride = 1usize << (k - 1 - i);
    // pairs (row0[j], row1[j]) over the columns of the flattening
    let cols = (0..1usize << k).filter(|idx| idx & stride == 0);
    let pairs: Vec<(&ComplexRat, &ComplexRat)> =
        cols.map(|idx| (f.value(idx), f.value(idx | stride))).collect();
    let Some(&(p0, p1)) = pairs.iter().find(|(a, b)| !a.is_zero() || !b.is_zero()) else {
        return true;
    };
    pairs.iter().all(|&(a, b)| p0 * b == p1 * a)
}

/// `f = scalar · Π_i unaries[i](x_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgFactors {
    pub scalar: ComplexRat,
    pub unaries: Vec<[ComplexRat; 2]>,
}

impl DgFactors {
    pub fn eval(&self, bits: &[bool]) -> ComplexRat {
        let mut acc = self.scalar.clone();
        for (u, &b) in self.unaries.iter().zip(bits) {
            acc = &acc * &u[b as usize];
        }
        acc
    }
}

/// Unary factors of a degenerate function, verified against every entry.
pub fn degenerate_factors(f: &FuncTable) -> Option<DgFactors> {
    let k = f.arity();
    let Some(p) = (0..f.values().len()).find(|&i| !f.value(i).is_zero()) else {
        return Some(DgFactors {
            scalar: ComplexRat::zero(),
            unaries: vec![[ComplexRat::one(), ComplexRat::one()]; k],
        });
    };
    let fp = f.value(p).clone();
    let inv = fp.inv().expect("pivot is nonzero");
    let unaries: Vec<[ComplexRat; 2]> = (0..k)
        .map(|i| {
            let stride = 1usize << (k - 1 - i);
            let lo = f.value(p & !stride) * &inv;
            let hi = f.value(p | stride) * &inv;
            [lo, hi]
        })
        .collect();
    let fac = DgFactors {
        scalar: fp,
        unaries,
    };
    let ok = (0..f.values().len()).all(|idx| {
        let bits: Vec<bool> = (0..k).map(|i| bit(idx, i, k)).collect();
        fac.eval(&bits) == *f.value(idx)
    });
    ok.then_some(fac)
}

/// Signed union-find: each element stores its parent and the parity
/// relative to it.
struct SignedDsu {
    parent: Vec<usize>,
    parity: Vec<bool>,
}

impl SignedDsu {
    fn new(n: usize) -> Self {
        SignedDsu {
            parent: (0..n).collect(),
            parity: vec![false; n],
        }
    }

    /// Root and parity of `x` relative to it.
    fn find(&mut self, x: usize) -> (usize, bool) {
        if self.parent[x] == x {
            return (x, false);
        }
        let p = self.parent[x];
        let (r, pp) = self.find(p);
        self.parent[x] = r;
        self.parity[x] ^= pp;
        (r, self.parity[x])
    }

    /// Record `x ⊕ y = d`. The smaller root wins.
    fn union(&mut self, x: usize, y: usize, d: bool) {
        let (rx, px) = self.find(x);
        let (ry, py) = self.find(y);
        if rx == ry {
            return;
        }
        let (lo, hi) = if rx < ry { (rx, ry) } else { (ry, rx) };
        self.parent[hi] = lo;
        self.parity[hi] = px ^ py ^ d;
    }
}

/// `f = scalar · Π links · Π unaries`, where a link `(r, i, true)` is
/// `XOR(x_r, x_i)` and `(r, i, false)` is `EQ2(x_r, x_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdDecomposition {
    pub arity: usize,
    pub scalar: ComplexRat,
    pub links: Vec<(usize, usize, bool)>,
    pub unaries: Vec<(usize, [ComplexRat; 2])>,
}

impl EdDecomposition {
    pub fn eval(&self, bits: &[bool]) -> ComplexRat {
        if self.links.iter().any(|&(r, i, x)| (bits[r] != bits[i]) != x) {
            return ComplexRat::zero();
        }
        let mut acc = self.scalar.clone();
        for (v, u) in &self.unaries {
            acc = &acc * &u[bits[*v] as usize];
        }
        acc
    }
}

/// Decomposition into unaries, `EQ2` and `XOR`, or `None` outside ED.
pub fn ed_decompose(f: &FuncTable) -> Option<EdDecomposition> {
    let k = f.arity();
    let s = support(f);
    if s.tuples.is_empty() {
        return Some(EdDecomposition {
            arity: k,
            scalar: ComplexRat::zero(),
            links: Vec::new(),
            unaries: Vec::new(),
        });
    }
    let mut dsu = SignedDsu::new(k);
    for i in 0..k {
        for j in i + 1..k {
            let rel = |t: usize| bit(t, i, k) != bit(t, j, k);
            let first = rel(s.tuples[0]);
            if s.tuples.iter().all(|&t| rel(t) == first) {
                dsu.union(i, j, first);
            }
        }
    }
    let mut reps = Vec::new();
    let mut links = Vec::new();
    let mut comp = Vec::with_capacity(k);
    for i in 0..k {
        let (r, p) = dsu.find(i);
        comp.push((r, p));
        if r == i {
            reps.push(i);
        } else {
            links.push((r, i, p));
        }
    }
    let m = reps.len();
    let rep_pos = |r: usize| reps.binary_search(&r).expect("root is a representative");
    // collapsed function over the representatives
    let g = FuncTable::from_fn(m, |y| {
        let x: Vec<bool> = (0..k).map(|i| y[rep_pos(comp[i].0)] ^ comp[i].1).collect();
        f.eval(&x).clone()
    });
    let gs = support(&g);
    // collapsed support must be a product of its coordinate projections
    let mut proj = vec![[false; 2]; m];
    for &t in &gs.tuples {
        for (r, pr) in proj.iter_mut().enumerate() {
            pr[bit(t, r, m) as usize] = true;
        }
    }
    let product_size: usize = proj.iter().map(|p| p[0] as usize + p[1] as usize).product();
    if product_size != gs.tuples.len() {
        return None;
    }
    let fac = degenerate_factors(&g)?;
    Some(EdDecomposition {
        arity: k,
        scalar: fac.scalar,
        links,
        unaries: reps.iter().copied().zip(fac.unaries).collect(),
    })
}

pub fn is_ed(f: &FuncTable) -> bool {
    f.arity() <= 1 || ed_decompose(f).is_some()
}

/// Support closed under coordinatewise min and max.
pub fn has_imp_support(f: &FuncTable) -> bool {
    let s = support(f);
    s.tuples.iter().all(|&a| {
        s.tuples
            .iter()
            .all(|&b| s.contains(a & b) && s.contains(a | b))
    })
}

pub fn is_im(f: &FuncTable) -> bool {
    if !has_imp_support(f) {
        return false;
    }
    let s = support(f);
    s.tuples.iter().enumerate().all(|(n, &a)| {
        s.tuples[n + 1..].iter().all(|&b| {
            f.value(a) * f.value(b) == f.value(a & b) * f.value(a | b)
        })
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub nz: bool,
    pub dg: bool,
    pub ed: bool,
    pub imp_support: bool,
    pub im: bool,
}

pub fn membership(f: &FuncTable) -> Membership {
    Membership {
        nz: is_nz(f),
        dg: is_dg(f),
        ed: is_ed(f),
        imp_support: has_imp_support(f),
        im: is_im(f),
    }
}

/// Whether `XOR` may be used freely alongside the given functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    WithXor,
    NoXor,
}

impl std::str::FromStr for Mode {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "with-xor" => Ok(Mode::WithXor),
            "no-xor" => Ok(Mode::NoXor),
            _ => Err(crate::Error::Parse(format!("unknown mode {s:?}"))),
        }
    }
}

/// Ordered from easiest to hardest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tier {
    #[serde(rename = "Tractable_FLC")]
    TractableFlc,
    #[serde(rename = "Acyc2SAT_Hard")]
    Acyc2SatHard,
    #[serde(rename = "SharpLOGCFL_Hard")]
    SharpLogcflHard,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::TractableFlc => "Tractable_FLC",
            Tier::Acyc2SatHard => "Acyc2SAT_Hard",
            Tier::SharpLogcflHard => "SharpLOGCFL_Hard",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FunctionReport {
    pub label: String,
    pub arity: usize,
    pub support: Support,
    #[serde(flatten)]
    pub membership: Membership,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub index: usize,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub tier: Tier,
    pub mode: Mode,
    pub functions: Vec<FunctionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outside_ed: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outside_im: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub fn classify(fs: &[FuncTable], mode: Mode) -> Verdict {
    let functions: Vec<FunctionReport> = fs
        .iter()
        .map(|f| FunctionReport {
            label: f.label(),
            arity: f.arity(),
            support: support(f),
            membership: membership(f),
        })
        .collect();
    let first = |pred: &dyn Fn(&Membership) -> bool| {
        functions
            .iter()
            .position(|r| pred(&r.membership))
            .map(|index| Witness {
                index,
                label: functions[index].label.clone(),
            })
    };
    let outside_ed = first(&|m| !m.ed);
    let outside_im = match mode {
        Mode::NoXor => first(&|m| !m.im),
        Mode::WithXor => None,
    };
    let tier = match (&outside_ed, &outside_im, mode) {
        (None, _, _) => Tier::TractableFlc,
        (Some(_), _, Mode::WithXor) => Tier::SharpLogcflHard,
        (Some(_), None, Mode::NoXor) => Tier::Acyc2SatHard,
        (Some(_), Some(_), Mode::NoXor) => Tier::SharpLogcflHard,
    };
    let note = outside_ed
        .as_ref()
        .filter(|w| fs[w.index].arity() >= 3)
        .map(|_| "no explicit reduction chain is produced for witnesses of arity 3 or more".to_string());
    Verdict {
        tier,
        mode,
        functions,
        outside_ed,
        outside_im,
        note,
    }
}
