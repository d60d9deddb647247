//! Independent oracles shared by the integration tests. Nothing here calls
//! into the algorithm it is used to check.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub fn catalan(n: usize) -> u64 {
    let mut c = vec![0u64; n + 1];
    c[0] = 1;
    for i in 1..=n {
        c[i] = (0..i).map(|j| c[j] * c[i - 1 - j]).sum();
    }
    c[n]
}

pub fn stirling2(n: usize, k: usize) -> u64 {
    let mut t = vec![vec![0u64; k + 1]; n + 1];
    t[0][0] = 1;
    for i in 1..=n {
        for j in 1..=k.min(i) {
            t[i][j] = j as u64 * t[i - 1][j] + t[i - 1][j - 1];
        }
    }
    t[n][k]
}

// ---------------------------------------------------------------------------
// Trees given only by parent arrays.

/// Path from the root down to `v`, inclusive.
pub fn root_path(parents: &[Option<usize>], v: usize) -> Vec<usize> {
    let mut path = vec![v];
    let mut cur = v;
    while let Some(p) = parents[cur] {
        path.push(p);
        cur = p;
    }
    path.reverse();
    path
}

pub fn is_ancestor(parents: &[Option<usize>], a: usize, b: usize) -> bool {
    root_path(parents, b).contains(&a)
}

pub fn meet(parents: &[Option<usize>], a: usize, b: usize) -> usize {
    let (pa, pb) = (root_path(parents, a), root_path(parents, b));
    let mut m = pa[0];
    for (x, y) in pa.iter().zip(&pb) {
        if x != y {
            break;
        }
        m = *x;
    }
    m
}

/// Children of `v` in their sibling order (ascending node number).
fn children(parents: &[Option<usize>], v: usize) -> Vec<usize> {
    (0..parents.len()).filter(|&c| parents[c] == Some(v)).collect()
}

/// `≤_T` from its definition: `v ≤ w` if `v` is a predecessor of `w`, or
/// else the branches towards them leave their meet through children in that
/// order.
pub fn lex_by_cases(parents: &[Option<usize>], v: usize, w: usize) -> Ordering {
    if v == w {
        return Ordering::Equal;
    }
    if is_ancestor(parents, v, w) {
        return Ordering::Less;
    }
    if is_ancestor(parents, w, v) {
        return Ordering::Greater;
    }
    let u = meet(parents, v, w);
    let (pv, pw) = (root_path(parents, v), root_path(parents, w));
    let depth = pv.iter().position(|&x| x == u).unwrap() + 1;
    let (cv, cw) = (pv[depth], pw[depth]);
    let order = children(parents, u);
    let iv = order.iter().position(|&c| c == cv).unwrap();
    let iw = order.iter().position(|&c| c == cw).unwrap();
    iv.cmp(&iw)
}

/// Meets, `≤`-monotonicity and root-to-root, checked directly.
pub fn is_morphism(src: &[Option<usize>], dst: &[Option<usize>], map: &[usize]) -> bool {
    if map[0] != 0 {
        return false;
    }
    for a in 0..src.len() {
        for b in 0..src.len() {
            if map[meet(src, a, b)] != meet(dst, map[a], map[b]) {
                return false;
            }
            if lex_by_cases(src, a, b) == Ordering::Less && lex_by_cases(dst, map[a], map[b]) == Ordering::Greater {
                return false;
            }
        }
    }
    true
}

/// All maps `[n] → [m]` as image vectors, first coordinate most significant.
pub fn all_functions(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|f| {
                (0..m).map(move |x| {
                    let mut g = f.clone();
                    g.push(x);
                    g
                })
            })
            .collect();
    }
    out
}

// ---------------------------------------------------------------------------
// Coloring search without propagation or heuristics.

/// Plain chronological backtracking over colorings of `smalls` objects in
/// index order. A placement is checked only once all of its objects are
/// colored. Returns a bad coloring if one exists.
pub fn backtracking_bad_coloring(smalls: usize, induced: &[Vec<usize>], colors: usize) -> Option<Vec<usize>> {
    // Placements grouped by their largest object, so each is tested once.
    let mut closing = vec![Vec::new(); smalls];
    for set in induced {
        if let Some(&last) = set.iter().max() {
            closing[last].push(set.clone());
        }
    }
    if induced.iter().any(|s| s.is_empty()) {
        return None;
    }
    let mut col = vec![0usize; smalls];
    fn go(i: usize, colors: usize, used: usize, col: &mut Vec<usize>, closing: &[Vec<Vec<usize>>]) -> bool {
        if i == col.len() {
            return true;
        }
        // Color-swap symmetry: the first use of each color is in order.
        for c in 0..colors.min(used + 1) {
            col[i] = c;
            let mono = closing[i].iter().any(|s| s.iter().all(|&x| col[x] == c));
            if !mono && go(i + 1, colors, used.max(c + 1), col, closing) {
                return true;
            }
        }
        false
    }
    go(0, colors, 0, &mut col, &closing).then_some(col)
}

// ---------------------------------------------------------------------------
// Fourier–Motzkin feasibility of `A x = b, x ≥ 0`.

fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Eliminates the equalities by substitution, then every remaining variable
/// by pairing positive and negative bounds.
pub fn fourier_motzkin_feasible(rows: &[Vec<BigRational>], rhs: &[BigRational]) -> bool {
    let n = rows.first().map_or(0, Vec::len);
    // Inequalities `a · x ≥ c`, starting from `x_j ≥ 0`.
    let mut ineqs: Vec<(Vec<BigRational>, BigRational)> = (0..n)
        .map(|j| {
            let mut a = vec![BigRational::zero(); n];
            a[j] = q(1);
            (a, BigRational::zero())
        })
        .collect();
    let mut eqs: Vec<(Vec<BigRational>, BigRational)> = rows.iter().cloned().zip(rhs.iter().cloned()).collect();
    while let Some((e, b)) = eqs.pop() {
        let Some(j) = (0..n).find(|&j| !e[j].is_zero()) else {
            if !b.is_zero() {
                return false;
            }
            continue;
        };
        let substitute = |(a, c): (Vec<BigRational>, BigRational)| {
            let k = &a[j] / &e[j];
            let a2: Vec<BigRational> = a.iter().zip(&e).map(|(ai, ei)| ai - &k * ei).collect();
            (a2, c - &k * &b)
        };
        eqs = eqs.into_iter().map(substitute).collect();
        ineqs = ineqs.into_iter().map(substitute).collect();
    }
    for j in 0..n {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for (a, c) in ineqs {
            if a[j].is_positive() {
                pos.push((a, c));
            } else if a[j].is_negative() {
                neg.push((a, c));
            } else {
                rest.push((a, c));
            }
        }
        for (ap, cp) in &pos {
            for (an, cn) in &neg {
                let (sp, sn) = (an[j].abs(), ap[j].clone());
                let a: Vec<BigRational> = ap.iter().zip(an).map(|(x, y)| x * &sp + y * &sn).collect();
                rest.push((a, cp * &sp + cn * &sn));
            }
        }
        let mut seen = HashSet::new();
        ineqs = rest.into_iter().filter(|r| seen.insert(r.clone())).collect();
    }
    ineqs.iter().all(|(_, c)| !c.is_positive())
}

// ---------------------------------------------------------------------------
// Full sets straight from the definition.

/// A partial vector as `(coordinate, value)` pairs, coordinates 1-based.
pub type Partial = Vec<(usize, u8)>;

fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &x in items {
        let more: Vec<Vec<usize>> = out
            .iter()
            .map(|s| {
                let mut t = s.clone();
                t.push(x);
                t
            })
            .collect();
        out.extend(more);
    }
    out
}

/// Whether some `h`, `a` with `|a| = n - l` and per-`r` supersets `a_r`
/// put `(r + h)↾a_r` in `set`.
pub fn full_by_definition(set: &HashSet<Partial>, n: usize, l: usize, p: u8) -> bool {
    let coords: Vec<usize> = (1..=n).collect();
    let all_subsets = subsets(&coords);
    let hs = all_functions(n, p as usize);
    hs.iter().any(|h| {
        all_subsets.iter().filter(|a| a.len() + l == n).any(|a| {
            (0..p).all(|r| {
                all_subsets.iter().filter(|ar| a.iter().all(|x| ar.contains(x))).any(|ar| {
                    let mut restricted: Partial = ar.iter().map(|&i| (i, (h[i - 1] as u8 + r) % p)).collect();
                    restricted.sort();
                    set.contains(&restricted)
                })
            })
        })
    })
}
