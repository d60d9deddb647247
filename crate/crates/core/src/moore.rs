//! Moore's convex-combination statement over binary trees.
//!
//! For a 2-coloring `c` of `𝕋_n` (binary trees with `n` leaves) the question
//! is whether some probability vector `α` over `m`-tuples of binary trees
//! with `n` leaves in total makes `Σ_Ū α_Ū c(T(Ū))` independent of
//! `T ∈ 𝕋_m`. Feasibility is decided exactly by [`crate::lp`].

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{LpOutcome, RationalLp};
use crate::tree::{binary_trees, OrderedTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MooreError {
    #[error("tree {tree} has {leaves} leaves but the tuple has {parts} parts")]
    Arity { tree: String, leaves: usize, parts: usize },
    #[error("{0} is not a binary tree")]
    NotBinary(String),
    #[error("no {m}-tuples of binary trees have {n} leaves in total")]
    NoTuples { m: usize, n: usize },
    #[error("need m >= 1, got m = {0}")]
    BadParameters(usize),
    #[error("coloring has {got} entries, expected {expected}")]
    ColoringLength { expected: usize, got: usize },
    #[error("2^{trees} colorings exceed the cap of {cap}")]
    CapExceeded { trees: usize, cap: u128 },
    #[error("thread pool: {0}")]
    Pool(String),
}

/// `(U_1, ..., U_m)`, each part a binary tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GraftTuple {
    parts: Vec<OrderedTree>,
}

impl GraftTuple {
    pub fn new(parts: Vec<OrderedTree>) -> Result<Self, MooreError> {
        if parts.is_empty() {
            return Err(MooreError::BadParameters(0));
        }
        if let Some(p) = parts.iter().find(|p| !p.is_binary()) {
            return Err(MooreError::NotBinary(p.to_string()));
        }
        Ok(GraftTuple { parts })
    }

    pub fn parts(&self) -> &[OrderedTree] {
        &self.parts
    }

    pub fn total_leaves(&self) -> usize {
        self.parts.iter().map(|p| p.leaves().len()).sum()
    }
}

impl fmt::Display for GraftTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.parts.iter().map(|p| p.encode()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Compositions of `n` into `m` positive parts, lexicographically.
fn compositions(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for first in 1..=left.saturating_sub(slots - 1) {
            cur.push(first);
            rec(left - first, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, m, &mut Vec::with_capacity(m), &mut out);
    out
}

/// All `m`-tuples of binary trees with `n` leaves in total, ordered by leaf
/// composition and then by the canonical strings of the parts.
pub fn graft_tuples(m: usize, n: usize) -> Vec<GraftTuple> {
    let by_leaves: Vec<Vec<OrderedTree>> = (0..=n).map(binary_trees).collect();
    let mut out = Vec::new();
    for comp in compositions(n, m) {
        let mut idx = vec![0usize; m];
        'odometer: loop {
            out.push(GraftTuple {
                parts: comp.iter().zip(&idx).map(|(&k, &i)| by_leaves[k][i].clone()).collect(),
            });
            for slot in (0..m).rev() {
                idx[slot] += 1;
                if idx[slot] < by_leaves[comp[slot]].len() {
                    continue 'odometer;
                }
                idx[slot] = 0;
            }
            break;
        }
    }
    out
}

/// `T(Ū)`: the root of `U_i` replaces the `i`-th leaf of `t` in `≤_T` order.
pub fn graft(t: &OrderedTree, u: &GraftTuple) -> Result<OrderedTree, MooreError> {
    if !t.is_binary() {
        return Err(MooreError::NotBinary(t.to_string()));
    }
    let leaves = t.leaves();
    if leaves.len() != u.parts.len() {
        return Err(MooreError::Arity {
            tree: t.to_string(),
            leaves: leaves.len(),
            parts: u.parts.len(),
        });
    }
    fn emit(t: &OrderedTree, v: usize, parts: &mut std::slice::Iter<'_, OrderedTree>, out: &mut String) {
        if t.is_leaf(v) {
            out.push_str(parts.next().expect("one part per leaf").encode());
            return;
        }
        out.push('(');
        for &c in t.children(v) {
            emit(t, c, parts, out);
        }
        out.push(')');
    }
    let mut code = String::new();
    emit(t, 0, &mut u.parts.iter(), &mut code);
    Ok(OrderedTree::decode(&code).expect("grafting balanced strings stays balanced"))
}

/// A feasibility verdict with an exact `α` on success.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<BigRational>),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

/// Everything about `(m, n)` that does not depend on the coloring.
#[derive(Debug, Clone)]
pub struct MooreProblem {
    pub m: usize,
    pub n: usize,
    /// `𝕋_m` in canonical-string order.
    pub small_trees: Vec<OrderedTree>,
    /// `𝕋_n` in canonical-string order; colorings are indexed by it.
    pub trees: Vec<OrderedTree>,
    pub tuples: Vec<GraftTuple>,
    /// `grafted[t][k]` is the index in `trees` of `small_trees[t](tuples[k])`.
    pub grafted: Vec<Vec<usize>>,
}

impl MooreProblem {
    pub fn new(m: usize, n: usize) -> Result<Self, MooreError> {
        if m == 0 {
            return Err(MooreError::BadParameters(m));
        }
        if n < m {
            return Err(MooreError::NoTuples { m, n });
        }
        let small_trees = binary_trees(m);
        let trees = binary_trees(n);
        let tuples = graft_tuples(m, n);
        let index: HashMap<&OrderedTree, usize> = trees.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let grafted = small_trees
            .iter()
            .map(|t| {
                tuples
                    .iter()
                    .map(|u| Ok(index[&graft(t, u)?]))
                    .collect::<Result<Vec<_>, MooreError>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MooreProblem {
            m,
            n,
            small_trees,
            trees,
            tuples,
            grafted,
        })
    }

    fn check_len(&self, coloring: &[bool]) -> Result<(), MooreError> {
        if coloring.len() != self.trees.len() {
            return Err(MooreError::ColoringLength {
                expected: self.trees.len(),
                got: coloring.len(),
            });
        }
        Ok(())
    }

    /// Variables `α_0, ..., α_{K-1}, λ`: one row `Σ_k c(T(Ū_k)) α_k - λ = 0`
    /// per `T ∈ 𝕋_m` and the normalization `Σ α = 1`.
    pub fn lp(&self, coloring: &[bool]) -> Result<RationalLp, MooreError> {
        self.check_len(coloring)?;
        let k = self.tuples.len();
        let mut lp = RationalLp::new(k + 1);
        let int = |v: i64| BigRational::from_integer(BigInt::from(v));
        for row in &self.grafted {
            let mut coeffs: Vec<BigRational> = row.iter().map(|&i| int(coloring[i] as i64)).collect();
            coeffs.push(int(-1));
            lp.add_row(coeffs, BigRational::zero());
        }
        let mut norm = vec![BigRational::one(); k];
        norm.push(BigRational::zero());
        lp.add_row(norm, BigRational::one());
        Ok(lp)
    }

    pub fn feasibility(&self, coloring: &[bool]) -> Result<Feasibility, MooreError> {
        Ok(match self.lp(coloring)?.solve() {
            LpOutcome::Feasible(mut x) => {
                x.pop();
                Feasibility::Feasible(x)
            }
            LpOutcome::Infeasible => Feasibility::Infeasible,
        })
    }

    /// `Σ_k α_k c(T(Ū_k))` for every `T ∈ 𝕋_m`.
    pub fn sums(&self, coloring: &[bool], alpha: &[BigRational]) -> Vec<BigRational> {
        self.grafted
            .iter()
            .map(|row| {
                row.iter()
                    .zip(alpha)
                    .filter(|(&i, _)| coloring[i])
                    .map(|(_, a)| a.clone())
                    .sum()
            })
            .collect()
    }

    /// Exact re-validation: `α ≥ 0`, `Σ α = 1` and constant sums.
    pub fn validate_alpha(&self, coloring: &[bool], alpha: &[BigRational]) -> bool {
        if alpha.len() != self.tuples.len() || alpha.iter().any(|a| *a < BigRational::zero()) {
            return false;
        }
        if alpha.iter().sum::<BigRational>() != BigRational::one() {
            return false;
        }
        let sums = self.sums(coloring, alpha);
        sums.windows(2).all(|w| w[0] == w[1])
    }
}

/// Bit `i` of `x` is the color of tree `i`.
pub fn coloring_from_index(x: u64, trees: usize) -> Vec<bool> {
    (0..trees).map(|i| x >> i & 1 == 1).collect()
}

/// Position `i` holds the color of tree `i`.
pub fn coloring_bitstring(coloring: &[bool]) -> String {
    coloring.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MooreVerdict {
    Holds,
    Counterexample,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MooreReport {
    pub m: usize,
    pub n: usize,
    pub colorings_checked: u64,
    pub verdict: MooreVerdict,
    /// Least failing coloring as a bitstring over `𝕋_n`.
    pub counterexample: Option<String>,
    /// `α` for the first feasible non-constant coloring (coloring `0` if
    /// none), as rational strings in tuple order.
    pub sample_alpha: Vec<String>,
}

/// Sweeps every 2-coloring of `𝕋_n` up to swapping the colors. Colorings
/// are integers in ascending order; only those with the color of the last
/// tree equal to 0 are visited, which picks the smaller of each
/// complementary pair.
pub fn moore_check(m: usize, n: usize, cap: u128, workers: usize) -> Result<MooreReport, MooreError> {
    let problem = MooreProblem::new(m, n)?;
    let trees = problem.trees.len();
    if trees >= 64 || (1u128 << trees) > cap {
        return Err(MooreError::CapExceeded { trees, cap });
    }
    let half: u64 = 1 << (trees - 1);
    let infeasible = |x: u64| -> bool {
        let c = coloring_from_index(x, trees);
        !problem.feasibility(&c).expect("coloring length matches").is_feasible()
    };
    let failure = if workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| MooreError::Pool(e.to_string()))?;
        pool.install(|| (0..half).into_par_iter().find_first(|&x| infeasible(x)))
    } else {
        (0..half).find(|&x| infeasible(x))
    };

    let mut sample = None;
    for x in 1..half {
        if let Feasibility::Feasible(a) = problem.feasibility(&coloring_from_index(x, trees))? {
            sample = Some(a);
            break;
        }
    }
    let sample = match sample {
        Some(a) => a,
        None => match problem.feasibility(&coloring_from_index(0, trees))? {
            Feasibility::Feasible(a) => a,
            Feasibility::Infeasible => unreachable!("a constant coloring is always feasible"),
        },
    };
    Ok(MooreReport {
        m,
        n,
        colorings_checked: half,
        verdict: if failure.is_some() {
            MooreVerdict::Counterexample
        } else {
            MooreVerdict::Holds
        },
        counterexample: failure.map(|x| coloring_bitstring(&coloring_from_index(x, trees))),
        sample_alpha: sample.iter().map(|a| a.to_string()).collect(),
    })
}
