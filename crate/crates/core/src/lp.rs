//! Exact feasibility of `A x = b, x ≥ 0` over the rationals.
//!
//! Phase-one simplex with Bland's rule on a dense tableau of
//! [`BigRational`]s. There is no floating point anywhere.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Equality-constrained system `A x = b` with `x ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalLp {
    pub num_vars: usize,
    pub rows: Vec<Vec<BigRational>>,
    pub rhs: Vec<BigRational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    /// A basic feasible solution.
    Feasible(Vec<BigRational>),
    Infeasible,
}

impl RationalLp {
    pub fn new(num_vars: usize) -> Self {
        RationalLp {
            num_vars,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<BigRational>, rhs: BigRational) {
        assert_eq!(coeffs.len(), self.num_vars, "row width");
        self.rows.push(coeffs);
        self.rhs.push(rhs);
    }

    /// Whether `x` satisfies every row and is non-negative, exactly.
    pub fn is_solution(&self, x: &[BigRational]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|v| !v.is_negative())
            && self.rows.iter().zip(&self.rhs).all(|(row, b)| {
                let lhs: BigRational = row.iter().zip(x).map(|(a, v)| a * v).sum();
                lhs == *b
            })
    }

    pub fn solve(&self) -> LpOutcome {
        phase_one(self)
    }
}

/// Minimizes the sum of one artificial variable per row. The system is
/// feasible iff that minimum is zero.
fn phase_one(lp: &RationalLp) -> LpOutcome {
    let m = lp.rows.len();
    let n = lp.num_vars;
    let width = n + m;
    // tableau[i] = [coefficients of all n + m variables, rhs]
    let mut tableau: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for (i, (row, b)) in lp.rows.iter().zip(&lp.rhs).enumerate() {
        let flip = b.is_negative();
        let mut t: Vec<BigRational> = row.iter().map(|a| if flip { -a } else { a.clone() }).collect();
        t.extend((0..m).map(|k| if k == i { BigRational::one() } else { BigRational::zero() }));
        t.push(if flip { -b } else { b.clone() });
        tableau.push(t);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    // Reduced costs of the phase-one objective, plus its negated value last.
    let mut cost = vec![BigRational::zero(); width + 1];
    for t in &tableau {
        for j in 0..n {
            cost[j] -= &t[j];
        }
        cost[width] -= &t[width];
    }

    while let Some(enter) = (0..width).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for (i, t) in tableau.iter().enumerate() {
            if !t[enter].is_positive() {
                continue;
            }
            let ratio = &t[width] / &t[enter];
            let better = match &leave {
                None => true,
                Some((l, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*l]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let (r, _) = leave.expect("phase-one objective is bounded below by zero");
        pivot(&mut tableau, &mut cost, r, enter);
        basis[r] = enter;
    }

    if !cost[width].is_zero() {
        return LpOutcome::Infeasible;
    }
    let mut x = vec![BigRational::zero(); n];
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] = tableau[i][width].clone();
        }
    }
    LpOutcome::Feasible(x)
}

fn pivot(tableau: &mut [Vec<BigRational>], cost: &mut [BigRational], r: usize, c: usize) {
    let p = tableau[r][c].clone();
    for v in tableau[r].iter_mut() {
        *v /= &p;
    }
    let pivot_row = tableau[r].clone();
    let eliminate = |row: &mut Vec<BigRational>| {
        let factor = row[c].clone();
        if factor.is_zero() {
            return;
        }
        for (v, pv) in row.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *v -= &factor * pv;
            }
        }
    };
    for (i, row) in tableau.iter_mut().enumerate() {
        if i != r {
            eliminate(row);
        }
    }
    let mut cost_row = cost.to_vec();
    eliminate(&mut cost_row);
    cost.clone_from_slice(&cost_row);
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn lp(rows: &[&[i64]], rhs: &[i64]) -> RationalLp {
        let mut lp = RationalLp::new(rows[0].len());
        for (r, &b) in rows.iter().zip(rhs) {
            lp.add_row(r.iter().map(|&a| q(a, 1)).collect(), q(b, 1));
        }
        lp
    }

    #[test]
    fn simplex_feasible() {
        let p = lp(&[&[1, 1, 1], &[1, -1, 0]], &[1, 0]);
        let LpOutcome::Feasible(x) = p.solve() else { panic!() };
        assert!(p.is_solution(&x));
    }

    #[test]
    fn simplex_infeasible() {
        assert_eq!(lp(&[&[1, 1]], &[-1]).solve(), LpOutcome::Infeasible);
        assert_eq!(lp(&[&[1, 0], &[1, 0]], &[1, 2]).solve(), LpOutcome::Infeasible);
    }

    #[test]
    fn fractional_solution() {
        // 2x = 1 forces x = 1/2.
        let p = lp(&[&[2]], &[1]);
        assert_eq!(p.solve(), LpOutcome::Feasible(vec![q(1, 2)]));
    }

    #[test]
    fn redundant_rows_and_negative_rhs() {
        let p = lp(&[&[1, 1], &[2, 2], &[-1, 0]], &[3, 6, -1]);
        let LpOutcome::Feasible(x) = p.solve() else { panic!() };
        assert_eq!(x, vec![q(1, 1), q(2, 1)]);
    }
}
