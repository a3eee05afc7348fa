//! Exact Phase-1 simplex for `A w = b, w ≥ 0`.
//!
//! Dense tableau over [`Rational`] with Bland's rule. On infeasibility the
//! optimal Phase-1 dual is returned as a Farkas certificate `y` with
//! `Aᵀy ≤ 0` and `b·y > 0`.

use crate::rationals::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Feasibility {
    Feasible(Vec<Rational>),
    Infeasible(Vec<Rational>),
}

struct Tableau {
    /// `m` rows of `n + m` coefficients followed by the right-hand side.
    rows: Vec<Vec<Rational>>,
    /// Reduced costs for the `n + m` columns, then minus the objective value.
    cost: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v = &*v / &p;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i != row && !r[col].is_zero() {
                let f = r[col].clone();
                for (v, pv) in r.iter_mut().zip(&pivot_row) {
                    if !pv.is_zero() {
                        *v -= &(&f * pv);
                    }
                }
            }
        }
        if !self.cost[col].is_zero() {
            let f = self.cost[col].clone();
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &(&f * pv);
                }
            }
        }
        self.basis[row] = col;
    }
}

pub(crate) fn phase_one(a: &[Vec<Rational>], b: &[Rational]) -> Feasibility {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let width = n + m;

    // flip rows so that b ≥ 0
    let flipped: Vec<bool> = b.iter().map(Rational::is_negative).collect();
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let sign = if flipped[i] { -Rational::one() } else { Rational::one() };
        let mut row: Vec<Rational> = a[i].iter().map(|v| v * &sign).collect();
        row.extend((0..m).map(|j| if j == i { Rational::one() } else { Rational::zero() }));
        row.push(&b[i] * &sign);
        rows.push(row);
    }
    let mut cost = vec![Rational::zero(); width + 1];
    for row in &rows {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[width] -= &row[width];
    }
    let mut t = Tableau { rows, cost, basis: (n..width).collect() };

    while let Some(col) = (0..width).find(|&j| t.cost[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            let c = &t.rows[i][col];
            if c.is_positive() {
                let ratio = &t.rows[i][width] / c;
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && t.basis[i] < t.basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // Phase 1 is bounded below by 0, so a negative reduced cost always has a pivot row.
        let (row, _) = leave.expect("phase-one objective is bounded");
        t.pivot(row, col);
    }

    if t.cost[width].is_zero() {
        let mut w = vec![Rational::zero(); n];
        for (i, &j) in t.basis.iter().enumerate() {
            if j < n {
                w[j] = t.rows[i][width].clone();
            }
        }
        Feasibility::Feasible(w)
    } else {
        // reduced cost of artificial i is 1 − y_i for the flipped system
        let y = (0..m)
            .map(|i| {
                let yi = Rational::one() - &t.cost[n + i];
                if flipped[i] {
                    -yi
                } else {
                    yi
                }
            })
            .collect();
        Feasibility::Infeasible(y)
    }
}
