use serde::Serialize;

use crate::classify::{is_dg, is_nz};
use crate::error::{Error, Result};
use crate::scalar::ComplexRat;
use crate::table::{bit, FuncTable};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PinSearchResult {
    /// The two free positions, in the order they appear in `h`.
    pub kept: (usize, usize),
    /// `(position, value)` for every other position.
    pub pins: Vec<(usize, bool)>,
    pub lambda: ComplexRat,
    /// `λ · f` restricted by the pins: `(1, x, y, z)` with `xyz != 0` and
    /// `xy != z`.
    pub h: FuncTable,
}

/// Finds a pinning of all but two positions of a nonzero, non-degenerate
/// `f` that leaves a non-degenerate binary function, normalized so its
/// first entry is 1.
pub fn pin_search_binary(f: &FuncTable) -> Result<PinSearchResult> {
    let k = f.arity();
    let fail = |why: &str| Error::Precondition {
        gadget: "pin search".into(),
        violated: why.into(),
    };
    if k < 2 {
        return Err(fail("arity >= 2"));
    }
    if !is_nz(f) {
        return Err(fail("f has no zero entries"));
    }
    if is_dg(f) {
        return Err(fail("f is not degenerate"));
    }
    for i in 0..k {
        for j in i + 1..k {
            let rest: Vec<usize> = (0..k).filter(|&p| p != i && p != j).collect();
            for ctx in 0..1usize << rest.len() {
                let at = |a: bool, b: bool| {
                    let mut idx = 0usize;
                    for (n, &p) in rest.iter().enumerate() {
                        if bit(ctx, n, rest.len()) {
                            idx |= 1 << (k - 1 - p);
                        }
                    }
                    if a {
                        idx |= 1 << (k - 1 - i);
                    }
                    if b {
                        idx |= 1 << (k - 1 - j);
                    }
                    f.value(idx).clone()
                };
                let h00 = at(false, false);
                let lambda = h00.inv().expect("f is nonzero");
                let [x, y, z] = [at(false, true), at(true, false), at(true, true)].map(|v| &v * &lambda);
                if &x * &y != z {
                    let pins = rest
                        .iter()
                        .enumerate()
                        .map(|(n, &p)| (p, bit(ctx, n, rest.len())))
                        .collect();
                    return Ok(PinSearchResult {
                        kept: (i, j),
                        pins,
                        lambda,
                        h: FuncTable::binary(ComplexRat::one(), x, y, z),
                    });
                }
            }
        }
    }
    Err(Error::Internal(
        "nonzero non-degenerate function without a non-degenerate binary pinning".into(),
    ))
}
