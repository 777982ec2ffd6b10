mod common;

use acsp_core::engine::count_brute;
use acsp_core::gadgets::*;
use acsp_core::table::std_fns::*;
use acsp_core::{ComplexRat, Error, FuncTable, Instance};

use common::restrict;

fn c(n: i64) -> ComplexRat {
    ComplexRat::from(n)
}

fn verified(r: &GadgetRealization) -> Verification {
    verify_realization(r).unwrap()
}

#[test]
fn eq3_from_two_eq2() {
    let r = eq3_from_eq2();
    assert_eq!(r.num_aux, 0);
    assert_eq!(r.lambda, c(1));
    assert!(verified(&r).ok());
}

#[test]
fn or2_from_nand2_and_u0() {
    let r = or2_from_nand2();
    assert!(r.target.same_values(&or2()));
    assert_eq!(r.lambda, c(1));
    assert!(verified(&r).ok());
}

#[test]
fn xor_triangle_is_rejected_as_cyclic() {
    let v = verified(&xor_triangle());
    assert!(v.identity_holds);
    assert!(!v.acyclic);
    assert!(!v.ok());
}

#[test]
fn nand2_from_or2_has_negative_scalar() {
    let r = nand2_from_or2();
    assert_eq!(r.lambda, c(-1));
    for x in [[false, false], [false, true], [true, false], [true, true]] {
        assert_eq!(&r.evaluate(&x), nand2().eval(&x));
    }
    assert!(verified(&r).ok());
}

#[test]
fn or2_from_f_with_a1_b2() {
    let r = catalog_build("OR2FromF", &GadgetParams::with_ab(c(1), c(2))).unwrap();
    assert_eq!(r.lambda, ComplexRat::ratio(1, 4));
    let v = verified(&r);
    assert!(v.ok());
    assert_eq!(v.assignments, 8);
}

#[test]
fn nand2_from_nz_precondition_and_scalar() {
    let p = GadgetParams {
        k: None,
        a: Some(c(1)),
        b: Some(c(1)),
        c: Some(c(2)),
    };
    let r = catalog_build("NAND2FromNZ", &p).unwrap();
    assert!(verified(&r).ok());
    let bad = GadgetParams {
        c: Some(c(1)),
        ..p
    };
    assert!(matches!(
        catalog_build("NAND2FromNZ", &bad),
        Err(Error::Precondition { .. })
    ));
}

#[test]
fn parametric_gadgets_reject_zero_parameters() {
    for name in ["OR2FromF", "NAND2FromF", "NAND2FromAntiDG"] {
        let err = catalog_build(name, &GadgetParams::with_ab(c(0), c(1))).unwrap_err();
        assert!(matches!(err, Error::Precondition { .. }), "{name}: {err}");
    }
}

#[test]
fn catalog_names_all_build_and_verify() {
    for (name, params) in catalog_names() {
        if name.eq_ignore_ascii_case("XORTriangle") {
            continue;
        }
        let p = match *params {
            "" => GadgetParams::default(),
            "k" => GadgetParams::with_k(3),
            "a b" => GadgetParams::with_ab(c(2), ComplexRat::gaussian(1, 1)),
            _ => GadgetParams {
                k: None,
                a: Some(c(2)),
                b: Some(c(1)),
                c: Some(ComplexRat::i()),
            },
        };
        let r = catalog_build(name, &p).unwrap();
        assert!(verified(&r).ok(), "{name}");
    }
    assert!(matches!(
        catalog_build("NoSuchGadget", &GadgetParams::default()),
        Err(Error::UnknownGadget(_))
    ));
}

#[test]
fn or_k_through_implies_and_or_xor() {
    for k in 2..=4 {
        let r = transitive_compose(&or_from_implies(k).unwrap(), &implies_from_or_xor()).unwrap();
        assert!(r.target.same_values(&or(k)));
        let allowed = [or2(), xor(), u0()];
        for f in r.base_functions() {
            assert!(allowed.iter().any(|a| a.same_values(&f)), "{}", f.label());
        }
        assert!(verified(&r).ok());
    }
}

#[test]
fn compose_with_identity_is_neutral() {
    let mut b = GadgetBuilder::new("id", or2());
    let (x0, x1) = (b.x(0), b.x(1));
    b.add(or2(), &[x0, x1]);
    let id = b.build();
    let outer = nand2_from_or2();
    let r = transitive_compose(&outer, &id).unwrap();
    assert_eq!(r.lambda, outer.lambda);
    assert_eq!(r.num_aux, outer.num_aux);
    assert_eq!(r.base.len(), outer.base.len());
}

#[test]
fn or2_through_nand2_through_or2() {
    let r = transitive_compose(&or2_from_nand2(), &nand2_from_or2()).unwrap();
    assert_eq!(r.lambda, c(1));
    assert!(verified(&r).ok());
}

fn single(f: FuncTable) -> Instance {
    let mut inst = Instance::with_vars(&["x", "y"]).unwrap();
    inst.push(f, &[0, 1]).unwrap();
    inst
}

#[test]
fn rewrite_single_or2() {
    let rw = rewrite_instance(&single(or2()), &or2(), &or2_from_nand2()).unwrap();
    assert_eq!(rw.instance.len(), 3);
    assert_eq!(rw.scalar, c(1));
    assert_eq!(count_brute(&rw.instance).unwrap().count, c(3));
}

#[test]
fn rewrite_two_nand2() {
    let mut inst = Instance::with_vars(&["x", "y", "z"]).unwrap();
    inst.push(nand2(), &[0, 1]).unwrap();
    inst.push(nand2(), &[1, 2]).unwrap();
    let rw = rewrite_instance(&inst, &nand2(), &nand2_from_or2()).unwrap();
    assert_eq!(rw.occurrences, 2);
    assert_eq!(rw.scalar, c(1));
    assert_eq!(
        &rw.scalar * &count_brute(&rw.instance).unwrap().count,
        count_brute(&inst).unwrap().count
    );
}

#[test]
fn rewrite_without_occurrences_is_identity() {
    let inst = single(xor());
    let rw = rewrite_instance(&inst, &or2(), &or2_from_nand2()).unwrap();
    assert_eq!(rw.occurrences, 0);
    assert_eq!(rw.scalar, c(1));
    assert_eq!(rw.instance, inst);
}

#[test]
fn pin_search_on_binary_table() {
    let f = FuncTable::from_ints(2, &[1, 1, 1, -1]);
    let r = pin_search_binary(&f).unwrap();
    assert!(r.pins.is_empty());
    assert_eq!(r.lambda, c(1));
    assert!(r.h.same_values(&f));
}

#[test]
fn pin_search_rejects_zeros() {
    assert!(matches!(pin_search_binary(&eq2()), Err(Error::Precondition { .. })));
}

#[test]
fn pin_search_on_perturbed_arity_three() {
    // (1,1,1,-1) on the first two inputs times a nonconstant unary on the
    // third, with one entry nudged so the result is not a product.
    let mut values: Vec<ComplexRat> = FuncTable::from_ints(2, &[1, 1, 1, -1])
        .expand(2)
        .unwrap()
        .pointwise_mul(&FuncTable::from_ints(1, &[1, 2]).expand(0).unwrap().expand(0).unwrap())
        .unwrap()
        .values()
        .to_vec();
    values[5] = c(3);
    let f = FuncTable::new(3, values).unwrap();
    let r = pin_search_binary(&f).unwrap();
    let h = r.h.values();
    assert!(h[0].is_one());
    assert!(h.iter().all(|v| !v.is_zero()));
    assert_ne!(&h[1] * &h[2], h[3]);
    let expected: Vec<ComplexRat> = restrict(&f, r.kept, &r.pins)
        .iter()
        .map(|v| v * &r.lambda)
        .collect();
    assert_eq!(h, expected.as_slice());
}

/// `OR2(x, EQ(y, x_1..x_k))` as a product of `OR3` and `XOR` over
/// auxiliaries `u, z_1..z_k`. With `with_first_link` the factor
/// `XOR(x_1, z_1)` is included.
fn or_eq_expansion(k: usize, with_first_link: bool) -> GadgetRealization {
    let target = FuncTable::relation(k + 2, |v| v[0] || v[1..].iter().all(|&b| b == v[1]));
    let mut b = GadgetBuilder::new("OR2-EQ", target);
    let x = b.x(0);
    let y = b.x(1);
    let xs: Vec<usize> = (0..k).map(|i| b.x(i + 2)).collect();
    let u = b.aux();
    let zs: Vec<usize> = (0..k).map(|_| b.aux()).collect();
    b.add(or(3), &[x, u, xs[0]]);
    b.add(or(3), &[x, y, zs[0]]);
    b.add(xor(), &[y, u]);
    if with_first_link {
        b.add(xor(), &[xs[0], zs[0]]);
    }
    for i in 0..k - 1 {
        b.add(or(3), &[x, zs[i], xs[i + 1]]);
        b.add(or(3), &[x, xs[i], zs[i + 1]]);
        b.add(xor(), &[xs[i + 1], zs[i + 1]]);
    }
    b.build()
}

#[test]
fn or_of_equality_expands_into_or3_and_xor() {
    for k in 1..=3 {
        assert!(verified(&or_eq_expansion(k, true)).identity_holds, "k = {k}");
        // Without the link between x_1 and z_1 nothing ties z_1 down.
        let v = verified(&or_eq_expansion(k, false));
        assert!(!v.identity_holds, "k = {k}");
        assert!(v.counterexample.is_some());
    }
}

#[test]
fn gadget_json_round_trip() {
    let r = nand2_from_or2();
    let text = serde_json::to_string(&r).unwrap();
    let back = gadget_from_str(&text).unwrap();
    assert_eq!(back.lambda, r.lambda);
    assert_eq!(back.num_aux, r.num_aux);
    assert!(back.target.same_values(&r.target));
    assert!(verified(&back).ok());
}

#[test]
fn verification_limit_and_counting_fallback() {
    let r = and_from_eq(12).unwrap();
    let big = transitive_compose(&r, &eq_from_eq2_chain(12)).unwrap();
    assert!(big.num_vars() > 20);
    assert!(matches!(verify_realization(&big), Err(Error::TooManyVariables { .. })));
    assert!(verify_by_counting(&big).unwrap().ok());
}

/// `EQ_k` as a path of `EQ2` through `k - 2` extra copies per input.
fn eq_from_eq2_chain(k: usize) -> GadgetRealization {
    let mut b = GadgetBuilder::new("EQk-chain", eq(k));
    let mut prev = b.x(0);
    for i in 1..k {
        let y = b.aux();
        b.add(eq2(), &[prev, y]);
        b.add(eq2(), &[y, b.x(i)]);
        prev = b.x(i);
    }
    b.build()
}
