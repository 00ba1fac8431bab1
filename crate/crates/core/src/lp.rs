//! Exact two-phase simplex method over the rationals (Bland's rule).

use num::{Signed, Zero};

use crate::rational::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<Q>,
    pub value: Q,
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    rhs: Vec<Q>,
    cost: Vec<Q>,
    obj: Q,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, col: usize) {
        let inv = self.rows[r][col].recip();
        for x in self.rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        self.rhs[r] *= &inv;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][col].is_zero() {
                continue;
            }
            let f = self.rows[i][col].clone();
            for &j in &nz {
                let t = &f * &prow[j];
                self.rows[i][j] -= t;
            }
            self.rhs[i] -= &f * &prhs;
        }
        if !self.cost[col].is_zero() {
            let f = self.cost[col].clone();
            for &j in &nz {
                let t = &f * &prow[j];
                self.cost[j] -= t;
            }
            self.obj -= &f * &prhs;
        }
        self.basis[r] = col;
    }

    /// Runs Bland's rule over columns `< ncols`. Returns false if unbounded.
    fn optimize(&mut self, ncols: usize) -> bool {
        loop {
            let Some(col) = (0..ncols).find(|&j| self.cost[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Q)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, col),
            }
        }
    }
}

/// Minimizes `c.x` subject to `a x = b`, `x >= 0`.
pub fn minimize(a: &[Vec<Q>], b: &[Q], c: &[Q]) -> LpSolution {
    let m = a.len();
    let n = c.len();
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        assert_eq!(row.len(), n, "constraint row width");
        let neg = bi.is_negative();
        let mut r: Vec<Q> = row.iter().map(|x| if neg { -x.clone() } else { x.clone() }).collect();
        r.extend((0..m).map(|j| if i == j { Q::from_integer(1.into()) } else { Q::zero() }));
        rows.push(r);
        rhs.push(if neg { -bi.clone() } else { bi.clone() });
    }
    // Phase one: minimize the sum of artificials.
    let mut cost = vec![Q::zero(); n + m];
    let mut obj = Q::zero();
    for (r, bi) in rows.iter().zip(&rhs) {
        for j in 0..n {
            cost[j] -= &r[j];
        }
        obj -= bi;
    }
    let mut t = Tableau { rows, rhs, cost, obj, basis: (n..n + m).collect() };
    t.optimize(n + m);
    if !t.obj.is_zero() {
        return LpSolution { status: LpStatus::Infeasible, x: Vec::new(), value: Q::zero() };
    }
    // Drive artificials out of the basis; drop redundant rows.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            if let Some(col) = (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                t.pivot(i, col);
            } else {
                t.rows.remove(i);
                t.rhs.remove(i);
                t.basis.remove(i);
                continue;
            }
        }
        i += 1;
    }
    for r in t.rows.iter_mut() {
        r.truncate(n);
    }
    // Phase two.
    let mut cost = c.to_vec();
    let mut obj = Q::zero();
    for (r, (&bcol, bi)) in t.rows.iter().zip(t.basis.iter().zip(&t.rhs)) {
        let cb = c[bcol].clone();
        if cb.is_zero() {
            continue;
        }
        for j in 0..n {
            if !r[j].is_zero() {
                cost[j] -= &cb * &r[j];
            }
        }
        obj -= &cb * bi;
    }
    t.cost = cost;
    t.obj = obj;
    if !t.optimize(n) {
        return LpSolution { status: LpStatus::Unbounded, x: Vec::new(), value: Q::zero() };
    }
    let mut x = vec![Q::zero(); n];
    for (&bcol, bi) in t.basis.iter().zip(&t.rhs) {
        x[bcol] = bi.clone();
    }
    let value = -t.obj.clone();
    LpSolution { status: LpStatus::Optimal, x, value }
}

pub fn maximize(a: &[Vec<Q>], b: &[Q], c: &[Q]) -> LpSolution {
    let neg: Vec<Q> = c.iter().map(|x| -x.clone()).collect();
    let mut s = minimize(a, b, &neg);
    s.value = -s.value;
    s
}
