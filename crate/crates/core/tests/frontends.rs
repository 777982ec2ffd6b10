mod common;

use acsp_core::engine::{count_brute, count_join_tree, MethodChoice};
use acsp_core::frontends::*;
use acsp_core::gadgets::gate_or_table;
use acsp_core::table::std_fns::*;
use acsp_core::{ComplexRat, Error, FuncTable, Instance};
use num_bigint::BigUint;

use common::{brute_models, enumerate_subtrees, random_acyclic_cnf, random_circuit, rng};

fn c(n: i64) -> ComplexRat {
    ComplexRat::from(n)
}

fn count_of(text: &str) -> ComplexRat {
    count_2sat(&parse_dimacs(text).unwrap(), MethodChoice::Auto)
        .unwrap()
        .count
}

#[test]
fn single_or_clause() {
    assert_eq!(count_of("p cnf 2 1\n1 2 0\n"), c(3));
}

#[test]
fn chain_of_two_clauses() {
    assert_eq!(count_of("p cnf 3 2\n1 2 0\n-2 3 0\n"), c(4));
}

#[test]
fn parallel_clauses_collapse() {
    assert_eq!(count_of("c equivalence\np cnf 2 2\n-1 2 0\n-2 1 0\n"), c(2));
}

#[test]
fn cyclic_formula_is_rejected() {
    let cnf = parse_dimacs("p cnf 3 3\n1 2 0\n2 3 0\n3 1 0\n").unwrap();
    assert!(matches!(
        count_2sat(&cnf, MethodChoice::Auto),
        Err(Error::NotAcyclic { .. })
    ));
}

#[test]
fn malformed_dimacs() {
    for text in [
        "p cnf 2 2\n1 2 0\n",
        "p cnf 2 1\n1 3 0\n",
        "p cnf 3 1\n1 2 3 0\n",
        "p cnf 2 1\n0\n",
        "1 2 0\n",
    ] {
        assert!(parse_dimacs(text).is_err(), "{text:?}");
    }
}

#[test]
fn dimacs_round_trip() {
    let cnf = parse_dimacs("p cnf 3 2\n1 -2 0\n-3 2 0\n").unwrap();
    assert_eq!(parse_dimacs(&cnf.to_dimacs()).unwrap(), cnf);
}

fn pair(f: FuncTable) -> Instance {
    let mut inst = Instance::with_vars(&["x", "y"]).unwrap();
    inst.push(f, &[0, 1]).unwrap();
    inst
}

#[test]
fn translate_single_or2() {
    let (out, scalar) = translate_to_implies(&pair(or2())).unwrap();
    assert_eq!(scalar, c(-1));
    assert_eq!(count_brute(&out).unwrap().count, c(-3));
}

#[test]
fn translate_single_implies() {
    let inst = pair(implies());
    let (out, scalar) = translate_to_implies(&inst).unwrap();
    assert_eq!(scalar, c(1));
    assert_eq!(out, inst);
}

#[test]
fn translate_mixed_instance() {
    let mut inst = Instance::with_vars(&["a", "b", "c", "d"]).unwrap();
    inst.push(or2(), &[0, 1]).unwrap();
    inst.push(implies(), &[1, 2]).unwrap();
    inst.push(nand2(), &[2, 3]).unwrap();
    let (out, scalar) = translate_to_implies(&inst).unwrap();
    // OR2 contributes -1, NAND2 contributes 1.
    assert_eq!(scalar, c(-1));
    for con in out.constraints() {
        assert!(con.func.same_values(&implies()) || con.func.same_values(&u0()));
    }
    assert_eq!(
        &scalar * &count_join_tree(&out).unwrap().count,
        count_brute(&inst).unwrap().count
    );
}

#[test]
fn translate_rejects_other_functions() {
    assert!(translate_to_implies(&pair(xor())).is_err());
}

#[test]
fn implies_back_to_clauses() {
    let cnf = implies_to_2cnf(&pair(implies())).unwrap();
    assert_eq!(cnf.clauses, vec![[Lit::neg(0), Lit::pos(1)]]);
    assert_eq!(brute_models(&cnf), 3);

    let mut zero = Instance::with_vars(&["x"]).unwrap();
    zero.push(FuncTable::from_ints(1, &[0, 0]), &[0]).unwrap();
    assert_eq!(brute_models(&implies_to_2cnf(&zero).unwrap()), 0);

    let mut one = Instance::with_vars(&["x"]).unwrap();
    one.push(FuncTable::from_ints(1, &[1, 1]), &[0]).unwrap();
    assert_eq!(brute_models(&implies_to_2cnf(&one).unwrap()), 2);

    assert!(implies_to_2cnf(&pair(or2())).is_err());
}

#[test]
fn random_formulas_match_brute_force() {
    let mut r = rng(81);
    for _ in 0..200 {
        let cnf = random_acyclic_cnf(&mut r, 12);
        let want = c(brute_models(&cnf) as i64);
        for m in [MethodChoice::Auto, MethodChoice::JoinTree, MethodChoice::Brute] {
            assert_eq!(count_2sat(&cnf, m).unwrap().count, want);
        }
    }
}

fn input(id: usize, index: usize) -> Gate {
    Gate {
        id,
        level: 0,
        kind: GateKind::Input {
            index,
            negated: false,
        },
    }
}

fn or_of_two() -> Circuit {
    let gates = vec![
        input(1, 0),
        input(2, 1),
        Gate {
            id: 3,
            level: 1,
            kind: GateKind::Or(vec![1, 2]),
        },
    ];
    Circuit::new(2, gates, 3).unwrap()
}

fn and_of_two() -> Circuit {
    let gates = vec![
        input(1, 0),
        input(2, 1),
        Gate {
            id: 3,
            level: 1,
            kind: GateKind::And([1, 2]),
        },
    ];
    Circuit::new(2, gates, 3).unwrap()
}

fn depth_two() -> Circuit {
    let gates = vec![
        input(1, 0),
        input(2, 1),
        input(3, 1),
        input(4, 2),
        Gate {
            id: 5,
            level: 1,
            kind: GateKind::And([1, 2]),
        },
        Gate {
            id: 6,
            level: 1,
            kind: GateKind::And([3, 4]),
        },
        Gate {
            id: 7,
            level: 2,
            kind: GateKind::Or(vec![5, 6]),
        },
    ];
    Circuit::new(3, gates, 7).unwrap()
}

fn subtrees(c: &Circuit, bits: &str) -> BigUint {
    count_subtrees(c, &parse_bits(bits).unwrap()).unwrap()
}

#[test]
fn subtree_counts() {
    assert_eq!(subtrees(&or_of_two(), "11"), BigUint::from(2u32));
    assert_eq!(subtrees(&and_of_two(), "11"), BigUint::from(1u32));
    assert_eq!(subtrees(&and_of_two(), "10"), BigUint::from(0u32));
    assert_eq!(subtrees(&depth_two(), "111"), BigUint::from(2u32));
    assert_eq!(subtrees(&depth_two(), "110"), BigUint::from(1u32));
}

#[test]
fn compile_or_of_two_direct() {
    let x = parse_bits("11").unwrap();
    let out = compile_circuit(&or_of_two(), &x, CompileMode::Direct).unwrap();
    assert_eq!(&out.scalar * &count_brute(&out.instance).unwrap().count, c(2));
}

#[test]
fn compile_and_with_false_input() {
    let x = parse_bits("10").unwrap();
    for mode in [CompileMode::Direct, CompileMode::Strict] {
        let out = compile_circuit(&and_of_two(), &x, mode).unwrap();
        assert_eq!(count_join_tree(&out.instance).unwrap().count, c(0));
        assert!(out.instance.constraints().iter().any(|k| k.func.same_values(&delta0())));
    }
}

#[test]
fn strict_mode_uses_small_signature() {
    let allowed = [or(3), or2(), xor(), u0(), delta0(), delta1()];
    let mut r = rng(71);
    for _ in 0..40 {
        let circ = random_circuit(&mut r, 15, 4);
        let x = vec![true; circ.inputs()];
        let out = compile_circuit(&circ, &x, CompileMode::Strict).unwrap();
        for k in out.instance.constraints() {
            assert!(allowed.iter().any(|a| a.same_values(&k.func)), "{}", k.func.label());
        }
    }
}

#[test]
fn direct_mode_uses_gate_tables() {
    let x = parse_bits("111").unwrap();
    let out = compile_circuit(&depth_two(), &x, CompileMode::Direct).unwrap();
    let fs = out.instance.constraints();
    assert!(fs.iter().any(|k| k.func.same_values(&gate_or_table(2))));
    assert!(fs.iter().any(|k| k.func.same_values(&eq(3))));
    assert!(fs.iter().any(|k| k.func.same_values(&delta1())));
}

#[test]
fn random_circuits_agree_in_both_modes() {
    let mut r = rng(72);
    for _ in 0..150 {
        let circ = random_circuit(&mut r, 10, 4);
        for bits in 0..1u32 << circ.inputs() {
            let x: Vec<bool> = (0..circ.inputs()).map(|i| bits >> i & 1 == 1).collect();
            let truth = count_subtrees(&circ, &x).unwrap();
            if circ.gates().len() <= 8 {
                assert_eq!(BigUint::from(enumerate_subtrees(&circ, &x)), truth);
            }
            let want = ComplexRat::from(num_bigint::BigInt::from(truth));
            for mode in [CompileMode::Direct, CompileMode::Strict] {
                let out = compile_circuit(&circ, &x, mode).unwrap();
                assert_eq!(&out.scalar * &count_join_tree(&out.instance).unwrap().count, want);
            }
        }
    }
}

#[test]
fn malformed_circuits_are_rejected() {
    // OR over two inputs but at level 2.
    let gates = vec![
        input(1, 0),
        input(2, 1),
        Gate {
            id: 3,
            level: 2,
            kind: GateKind::Or(vec![1, 2]),
        },
    ];
    assert!(Circuit::new(2, gates, 3).is_err());
    // Shared child.
    let gates = vec![
        input(1, 0),
        Gate {
            id: 2,
            level: 1,
            kind: GateKind::And([1, 1]),
        },
    ];
    assert!(Circuit::new(1, gates, 2).is_err());
    // Input index out of range.
    assert!(Circuit::new(1, vec![input(1, 3)], 1).is_err());
    assert!(parse_bits("10a").is_err());
    assert!(count_subtrees(&and_of_two(), &[true]).is_err());
}

#[test]
fn circuit_json_round_trip() {
    let circ = depth_two();
    let text = serde_json::to_string(&circ).unwrap();
    assert_eq!(circuit_from_str(&text).unwrap(), circ);
}
