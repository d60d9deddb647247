mod support;

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use ramsey_forge::framework::{build_tree_instance, check_space_axioms, Axiom};
use ramsey_forge::fullsets::{enumerate_space, is_full, PartialVector};
use ramsey_forge::lp::{LpOutcome, RationalLp};
use ramsey_forge::maps::{enumerate_rigid_surjections, is_rigid_surjection};
use ramsey_forge::moore::{coloring_from_index, graft, graft_tuples, MooreProblem};
use ramsey_forge::tree::{binary_trees, enumerate_trees, norm_leq, OrderedTree};
use ramsey_forge::witness::{
    build_instance, decide_witness, decide_witness_with, naive_oracle, verify_bad_coloring, ColoringInstance,
    InstanceSpec, SearchOptions, Verdict,
};

/// Each new node hangs below some node on the rightmost branch, which is
/// exactly the freedom a preorder leaves.
fn arb_tree(max_nodes: usize) -> impl Strategy<Value = OrderedTree> {
    prop::collection::vec(any::<usize>(), 0..max_nodes).prop_map(|choices| {
        let mut parents = vec![None];
        let mut spine = vec![0usize];
        for (i, c) in choices.into_iter().enumerate() {
            let depth = c % spine.len();
            spine.truncate(depth + 1);
            parents.push(Some(spine[depth]));
            spine.push(i + 1);
        }
        OrderedTree::from_parents(parents).unwrap()
    })
}

fn arb_instance() -> impl Strategy<Value = ColoringInstance> {
    (1usize..=7, 1usize..=3).prop_flat_map(|(n, colors)| {
        prop::collection::vec(prop::collection::btree_set(0..n, 1..=n.min(4)), 0..6).prop_map(move |sets| {
            let induced: Vec<Vec<usize>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
            ColoringInstance::new(
                (0..n).map(|i| format!("x{i}")).collect(),
                (0..induced.len()).map(|i| format!("p{i}")).collect(),
                induced,
                colors,
            )
            .unwrap()
        })
    })
}

fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

proptest! {
    #[test]
    fn encoding_round_trips(t in arb_tree(12)) {
        let back = OrderedTree::decode(t.encode()).unwrap();
        prop_assert_eq!(back.parents(), t.parents());
        prop_assert_eq!(&back, &t);
    }

    #[test]
    fn preorder_rank_matches_the_case_definition(t in arb_tree(10)) {
        for v in 0..t.len() {
            for w in 0..t.len() {
                prop_assert_eq!(t.lex_compare(v, w).unwrap(), support::lex_by_cases(t.parents(), v, w));
            }
        }
    }

    #[test]
    fn meets_match_root_paths(t in arb_tree(10)) {
        for v in 0..t.len() {
            for w in 0..t.len() {
                prop_assert_eq!(t.meet(v, w).unwrap(), support::meet(t.parents(), v, w));
            }
        }
    }

    #[test]
    fn engine_matches_naive_oracle(inst in arb_instance()) {
        let engine = decide_witness(&inst, 1_000_000).unwrap();
        let oracle = naive_oracle(&inst, 1 << 16).unwrap();
        prop_assert_eq!(engine.verdict, oracle.verdict);
        if let Some(bad) = &engine.bad_coloring {
            prop_assert!(verify_bad_coloring(&inst, bad));
        }
        let plain = support::backtracking_bad_coloring(inst.smalls().len(), inst.induced(), inst.colors());
        prop_assert_eq!(plain.is_none(), engine.is_witness());
    }

    #[test]
    fn witnesses_survive_fewer_colors(inst in arb_instance()) {
        if inst.colors() > 1 && decide_witness(&inst, 1_000_000).unwrap().is_witness() {
            let fewer = inst.with_colors(inst.colors() - 1).unwrap();
            prop_assert!(decide_witness(&fewer, 1_000_000).unwrap().is_witness());
        }
    }

    #[test]
    fn bad_colorings_survive_placement_deletion(inst in arb_instance()) {
        let v = decide_witness(&inst, 1_000_000).unwrap();
        if let (Verdict::NotWitness, Some(bad)) = (v.verdict, v.bad_coloring) {
            for p in 0..inst.placements().len() {
                let smaller = inst.without_placement(p);
                prop_assert!(verify_bad_coloring(&smaller, &bad));
                prop_assert!(!decide_witness(&smaller, 1_000_000).unwrap().is_witness());
            }
        }
    }

    #[test]
    fn worker_count_does_not_change_verdicts(inst in arb_instance()) {
        let one = decide_witness_with(&inst, SearchOptions { budget: 1_000_000, workers: 1 }).unwrap();
        let four = decide_witness_with(&inst, SearchOptions { budget: 1_000_000, workers: 4 }).unwrap();
        prop_assert_eq!(one.verdict, four.verdict);
        prop_assert_eq!(one.bad_coloring, four.bad_coloring);
        prop_assert_eq!(one.stats.nodes, four.stats.nodes);
    }

    #[test]
    fn simplex_matches_fourier_motzkin(
        rows in prop::collection::vec(prop::collection::vec(-2i64..=2, 4), 1..=3),
        rhs in prop::collection::vec(-2i64..=2, 3),
    ) {
        let mut lp = RationalLp::new(4);
        for (r, &b) in rows.iter().zip(&rhs) {
            lp.add_row(r.iter().map(|&a| q(a)).collect(), q(b));
        }
        let fm = support::fourier_motzkin_feasible(&lp.rows, &lp.rhs);
        match lp.solve() {
            LpOutcome::Feasible(x) => {
                prop_assert!(fm);
                prop_assert!(lp.is_solution(&x));
            }
            LpOutcome::Infeasible => prop_assert!(!fm),
        }
    }

    #[test]
    fn moore_three_five_matches_fourier_motzkin(x in 0u64..1 << 14) {
        let problem = MooreProblem::new(3, 5).unwrap();
        let coloring = coloring_from_index(x, problem.trees.len());
        let lp = problem.lp(&coloring).unwrap();
        let simplex = problem.feasibility(&coloring).unwrap();
        prop_assert_eq!(simplex.is_feasible(), support::fourier_motzkin_feasible(&lp.rows, &lp.rhs));
    }
}

#[test]
fn norm_order_is_a_partial_order() {
    let trees: Vec<OrderedTree> = enumerate_trees(5, None).collect();
    for a in &trees {
        assert!(norm_leq(a, a));
        for b in &trees {
            if a != b {
                assert!(!(norm_leq(a, b) && norm_leq(b, a)), "{a} {b}");
            }
            for c in &trees {
                if norm_leq(a, b) && norm_leq(b, c) {
                    assert!(norm_leq(a, c), "{a} {b} {c}");
                }
            }
        }
    }
}

#[test]
fn rigid_surjections_compose() {
    let trees: Vec<OrderedTree> = enumerate_trees(4, None).collect();
    for t in &trees {
        for s in &trees {
            let fs = enumerate_rigid_surjections(t, s, false);
            for r in &trees {
                for g in enumerate_rigid_surjections(s, r, false) {
                    for f in &fs {
                        let gf = g.compose(f).unwrap();
                        assert!(is_rigid_surjection(&gf), "{g} after {f}");
                    }
                }
            }
        }
    }
}

#[test]
fn truncation_commutes_with_the_action_up_to_four_nodes() {
    let inst = build_tree_instance(4).unwrap();
    let report = check_space_axioms(&inst.space);
    for axiom in [Axiom::TruncationCommutes, Axiom::TruncationShrinksNorm] {
        let check = report.get(axiom).unwrap();
        assert!(check.passed, "{axiom:?} at {:?}", check.witness);
        assert!(check.cases > 0);
    }
}

#[test]
fn grafting_preserves_binarity_and_leaves() {
    for m in 1..=3 {
        for n in m..=5 {
            for t in binary_trees(m) {
                for u in graft_tuples(m, n) {
                    let g = graft(&t, &u).unwrap();
                    assert!(g.is_binary());
                    assert_eq!(g.leaves().len(), u.total_leaves());
                    assert_eq!(u.total_leaves(), n);
                }
            }
        }
    }
}

#[test]
fn moore_feasibility_ignores_color_swaps() {
    let problem = MooreProblem::new(3, 4).unwrap();
    for x in 0..1u64 << problem.trees.len() {
        let c = coloring_from_index(x, problem.trees.len());
        let swapped: Vec<bool> = c.iter().map(|b| !b).collect();
        assert_eq!(
            problem.feasibility(&c).unwrap().is_feasible(),
            problem.feasibility(&swapped).unwrap().is_feasible()
        );
    }
}

#[test]
fn gr_two_three_needs_six_points() {
    // Below m = 6 the engine's bad colorings are checked directly; at m = 6
    // the naive sweep is out of reach, so plain backtracking confirms that
    // no bad coloring exists.
    for m in 3..=5 {
        let inst = build_instance(&InstanceSpec::Gr { k: 2, l: 3, m }, 2).unwrap();
        let v = decide_witness(&inst, 10_000_000).unwrap();
        assert_eq!(v.verdict, Verdict::NotWitness, "m = {m}");
        assert!(verify_bad_coloring(&inst, v.bad_coloring.as_ref().unwrap()));
    }
    let inst = build_instance(&InstanceSpec::Gr { k: 2, l: 3, m: 6 }, 2).unwrap();
    assert!(decide_witness(&inst, 10_000_000).unwrap().is_witness());
    assert_eq!(support::backtracking_bad_coloring(inst.smalls().len(), inst.induced(), 2), None);
}

#[test]
fn engine_matches_backtracking_beyond_the_naive_cap() {
    let specs = [
        InstanceSpec::Gr { k: 2, l: 3, m: 5 },
        InstanceSpec::Gr { k: 2, l: 4, m: 6 },
        InstanceSpec::GrHomogeneous { k: 2, l: 4, m: 6 },
        InstanceSpec::Leeb {
            s: "(())".parse().unwrap(),
            t: "(()())".parse().unwrap(),
            u: "(((()))(()))".parse().unwrap(),
        },
        InstanceSpec::DualTree {
            s: "(())".parse().unwrap(),
            t: "((()))".parse().unwrap(),
            u: "(((((())))))".parse().unwrap(),
            sealed: false,
        },
    ];
    for spec in &specs {
        for colors in 2..=3 {
            let Ok(inst) = build_instance(spec, colors) else { continue };
            let engine = decide_witness(&inst, 50_000_000).unwrap();
            let plain = support::backtracking_bad_coloring(inst.smalls().len(), inst.induced(), colors);
            assert_eq!(engine.is_witness(), plain.is_none(), "{spec:?} at {colors} colors");
        }
    }
}

fn subsets_of(space: &[PartialVector]) -> impl Iterator<Item = (u32, Vec<PartialVector>)> + '_ {
    (0u32..1 << space.len()).map(move |mask| {
        let set = (0..space.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| space[i].clone())
            .collect();
        (mask, set)
    })
}

#[test]
fn fullness_is_monotone() {
    let space = enumerate_space(2, 1, 2).unwrap();
    let full: HashSet<u32> = subsets_of(&space)
        .filter(|(_, s)| is_full(s, 2, 1, 2).unwrap().is_some())
        .map(|(m, _)| m)
        .collect();
    for &m in &full {
        for i in 0..space.len() {
            assert!(full.contains(&(m | 1 << i)), "{m:08b} + {i}");
        }
    }
}

#[test]
fn fullness_is_translation_invariant() {
    let (n, l, p) = (2, 1, 3);
    let space = enumerate_space(n, l, p).unwrap();
    let shift = |v: &PartialVector, s: &[u8]| {
        PartialVector::new(
            p,
            v.entries().iter().zip(s).map(|(e, &si)| e.map(|x| (x + si) % p)).collect(),
        )
        .unwrap()
    };
    // A sample of subsets: every set of at most three elements.
    let mut sets: Vec<Vec<PartialVector>> = Vec::new();
    for a in 0..space.len() {
        for b in a..space.len() {
            for c in b..space.len() {
                let mut s = vec![space[a].clone(), space[b].clone(), space[c].clone()];
                s.dedup();
                sets.push(s);
            }
        }
    }
    for set in &sets {
        let base = is_full(set, n, l, p).unwrap().is_some();
        for s0 in 0..p {
            for s1 in 0..p {
                let moved: Vec<PartialVector> = set.iter().map(|v| shift(v, &[s0, s1])).collect();
                assert_eq!(is_full(&moved, n, l, p).unwrap().is_some(), base);
            }
        }
    }
}
