//! Exact two-phase simplex over ℚ with Bland's rule.
//!
//! Problems are in standard form: maximize c·x subject to A x = b, x ≥ 0.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal {
        value: BigRational,
        x: Vec<BigRational>,
    },
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &BigRational {
        &self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = &*v / &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = &*v - &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    fn reduced_cost(&self, cost: &[BigRational], j: usize) -> BigRational {
        let mut rc = cost[j].clone();
        for (i, &bi) in self.basis.iter().enumerate() {
            if !cost[bi].is_zero() && !self.rows[i][j].is_zero() {
                rc -= &cost[bi] * &self.rows[i][j];
            }
        }
        rc
    }

    /// Maximize `cost` over the columns in `allowed`; returns false if unbounded.
    fn optimize(&mut self, cost: &[BigRational], allowed: usize) -> bool {
        loop {
            let entering = (0..allowed)
                .filter(|j| !self.basis.contains(j))
                .find(|&j| self.reduced_cost(cost, j).is_positive());
            let Some(c) = entering else {
                return true;
            };
            let mut best: Option<(usize, BigRational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn objective(&self, cost: &[BigRational]) -> BigRational {
        self.basis
            .iter()
            .enumerate()
            .fold(BigRational::zero(), |acc, (i, &bi)| {
                acc + &cost[bi] * self.rhs(i)
            })
    }
}

/// Maximize c·x subject to A x = b, x ≥ 0.
pub fn maximize(a: &[Vec<BigRational>], b: &[BigRational], c: &[BigRational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    let ncols = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, (ai, bi)) in a.iter().zip(b).enumerate() {
        let neg = bi.is_negative();
        let mut row = vec![BigRational::zero(); ncols + 1];
        for (j, v) in ai.iter().enumerate() {
            row[j] = if neg { -v.clone() } else { v.clone() };
        }
        row[n + i] = BigRational::from_integer(1.into());
        row[ncols] = if neg { -bi.clone() } else { bi.clone() };
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        basis: (n..n + m).collect(),
        ncols,
    };
    // phase 1: maximize -(sum of artificials)
    let mut phase1 = vec![BigRational::zero(); ncols];
    for v in phase1.iter_mut().skip(n) {
        *v = BigRational::from_integer((-1).into());
    }
    t.optimize(&phase1, ncols);
    if t.objective(&phase1).is_negative() {
        return LpOutcome::Infeasible;
    }
    // drive artificials out of the basis, dropping redundant rows
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => {
                    t.pivot(i, j);
                    i += 1;
                }
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }
    let mut cost = c.to_vec();
    cost.resize(ncols, BigRational::zero());
    if !t.optimize(&cost, n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![BigRational::zero(); n];
    for (i, &bi) in t.basis.iter().enumerate() {
        if bi < n {
            x[bi] = t.rhs(i).clone();
        }
    }
    LpOutcome::Optimal {
        value: t.objective(&cost),
        x,
    }
}
