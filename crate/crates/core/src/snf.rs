//! Smith normal form over the integers.

use std::collections::{BTreeMap, BTreeSet};

use num::{BigInt, Integer, One, Signed, Zero};

/// Nonzero invariant factors of a sparse integer matrix given by columns of
/// `(row, value)` entries. Unit pivots are eliminated sparsely in machine
/// integers; whatever remains is finished densely over big integers.
pub fn invariant_factors(nrows: usize, columns: &[Vec<(usize, i64)>]) -> Vec<BigInt> {
    let mut rows: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); nrows];
    let mut cols: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); columns.len()];
    for (c, col) in columns.iter().enumerate() {
        for &(r, v) in col {
            if v != 0 {
                *rows[r].entry(c).or_insert(0) += v;
            }
        }
    }
    for (r, row) in rows.iter_mut().enumerate() {
        row.retain(|_, v| *v != 0);
        for &c in row.keys() {
            cols[c].insert(r);
        }
    }
    let mut units = 0usize;
    let mut progress = true;
    'outer: while progress {
        progress = false;
        for pc in 0..columns.len() {
            let Some(pr) = cols[pc].iter().copied().filter(|&r| rows[r][&pc].abs() == 1).min_by_key(|&r| rows[r].len())
            else {
                continue;
            };
            let unit = rows[pr][&pc];
            let prow: Vec<(usize, i64)> = rows[pr].iter().map(|(&c, &v)| (c, v)).collect();
            let others: Vec<usize> = cols[pc].iter().copied().filter(|&r| r != pr).collect();
            for r in others {
                let f = rows[r][&pc] * unit;
                let mut updated = Vec::with_capacity(prow.len());
                for &(c, v) in &prow {
                    let old = rows[r].get(&c).copied().unwrap_or(0);
                    match f.checked_mul(v).and_then(|fv| old.checked_sub(fv)).filter(|x| x.abs() < 1 << 40) {
                        Some(nv) => updated.push((c, nv)),
                        None => break 'outer,
                    }
                }
                for (c, nv) in updated {
                    if nv != 0 {
                        rows[r].insert(c, nv);
                    }
                    if nv == 0 {
                        rows[r].remove(&c);
                        cols[c].remove(&r);
                    } else {
                        cols[c].insert(r);
                    }
                }
            }
            for &(c, _) in &prow {
                cols[c].remove(&pr);
            }
            rows[pr].clear();
            units += 1;
            progress = true;
        }
    }
    let mut factors = vec![BigInt::one(); units];
    let live_rows: Vec<usize> = (0..nrows).filter(|&r| !rows[r].is_empty()).collect();
    let live_cols: Vec<usize> = (0..columns.len()).filter(|&c| !cols[c].is_empty()).collect();
    if !live_rows.is_empty() {
        let dense: Vec<Vec<BigInt>> = live_rows
            .iter()
            .map(|&r| live_cols.iter().map(|c| BigInt::from(rows[r].get(c).copied().unwrap_or(0))).collect())
            .collect();
        factors.extend(smith(dense).diagonal.into_iter().filter(|d| !d.is_zero()));
    }
    factors.sort();
    factors
}

/// `p * a * q = diag(diagonal)` with `p`, `q` unimodular and each diagonal
/// entry dividing the next.
#[derive(Clone, Debug)]
pub struct Smith {
    pub diagonal: Vec<BigInt>,
    pub p: Vec<Vec<BigInt>>,
    pub p_inv: Vec<Vec<BigInt>>,
    pub q: Vec<Vec<BigInt>>,
    pub q_inv: Vec<Vec<BigInt>>,
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

struct Work {
    a: Vec<Vec<BigInt>>,
    p: Vec<Vec<BigInt>>,
    p_inv: Vec<Vec<BigInt>>,
    q: Vec<Vec<BigInt>>,
    q_inv: Vec<Vec<BigInt>>,
    track: bool,
}

impl Work {
    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        let (s, d) = two(&mut self.a, src, dst);
        for (x, y) in d.iter_mut().zip(s.iter()) {
            *x += f * y;
        }
        if self.track {
            let (s, d) = two(&mut self.p, src, dst);
            for (x, y) in d.iter_mut().zip(s.iter()) {
                *x += f * y;
            }
            for row in self.p_inv.iter_mut() {
                let t = f * &row[dst];
                row[src] -= t;
            }
        }
    }

    /// col[dst] += f * col[src]
    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for row in self.a.iter_mut() {
            let t = f * &row[src];
            row[dst] += t;
        }
        if self.track {
            for row in self.q.iter_mut() {
                let t = f * &row[src];
                row[dst] += t;
            }
            let (s, d) = two(&mut self.q_inv, dst, src);
            for (x, y) in d.iter_mut().zip(s.iter()) {
                *x -= f * y;
            }
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        if self.track {
            self.p.swap(i, j);
            for row in self.p_inv.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in self.a.iter_mut() {
            row.swap(i, j);
        }
        if self.track {
            for row in self.q.iter_mut() {
                row.swap(i, j);
            }
            self.q_inv.swap(i, j);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -&*x;
        }
        if self.track {
            for x in self.p[i].iter_mut() {
                *x = -&*x;
            }
            for row in self.p_inv.iter_mut() {
                row[i] = -&row[i];
            }
        }
    }
}

/// Borrows `v[src]` immutably and `v[dst]` mutably.
fn two<T>(v: &mut [T], src: usize, dst: usize) -> (&T, &mut T) {
    assert_ne!(src, dst);
    if src < dst {
        let (a, b) = v.split_at_mut(dst);
        (&a[src], &mut b[0])
    } else {
        let (a, b) = v.split_at_mut(src);
        (&b[0], &mut a[dst])
    }
}

/// Dense Smith normal form with transforms.
pub fn smith_with_transforms(a: Vec<Vec<BigInt>>, ncols: usize) -> Smith {
    run(a, ncols, true)
}

/// Dense Smith normal form, diagonal only.
pub fn smith(a: Vec<Vec<BigInt>>) -> Smith {
    let n = a.first().map_or(0, |r| r.len());
    run(a, n, false)
}

fn run(a: Vec<Vec<BigInt>>, ncols: usize, track: bool) -> Smith {
    let m = a.len();
    let n = ncols;
    let mut w = Work {
        a,
        p: if track { identity(m) } else { Vec::new() },
        p_inv: if track { identity(m) } else { Vec::new() },
        q: if track { identity(n) } else { Vec::new() },
        q_inv: if track { identity(n) } else { Vec::new() },
        track,
    };
    let mut t = 0;
    while t < m.min(n) {
        // Smallest nonzero entry of the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !w.a[i][j].is_zero() && best.is_none_or(|(bi, bj)| w.a[i][j].abs() < w.a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        w.swap_rows(t, bi);
        w.swap_cols(t, bj);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if w.a[i][t].is_zero() {
                    continue;
                }
                let f = -w.a[i][t].div_floor(&w.a[t][t]);
                w.add_row(i, t, &f);
                if !w.a[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..n {
                if w.a[t][j].is_zero() {
                    continue;
                }
                let f = -w.a[t][j].div_floor(&w.a[t][t]);
                w.add_col(j, t, &f);
                if !w.a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                let mut best = (t, t);
                for i in t..m {
                    if !w.a[i][t].is_zero() && w.a[i][t].abs() < w.a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t..n {
                    if !w.a[t][j].is_zero() && w.a[t][j].abs() < w.a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                w.swap_rows(t, best.0);
                w.swap_cols(t, best.1);
                continue;
            }
            let piv = w.a[t][t].clone();
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !w.a[i][j].is_multiple_of(&piv)));
            match bad {
                Some(i) => w.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
        t += 1;
    }
    let diagonal = (0..m.min(n)).map(|i| w.a[i][i].clone()).collect();
    Smith { diagonal, p: w.p, p_inv: w.p_inv, q: w.q, q_inv: w.q_inv }
}

pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>], inner: usize, cols: usize) -> Vec<Vec<BigInt>> {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = BigInt::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            s += &row[k] * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn classic_example() {
        let a = big(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith(a).diagonal;
        assert_eq!(s, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
    }

    #[test]
    fn transforms_are_consistent() {
        let a = big(&[&[2, 4, 4, 1], &[-6, 6, 12, 0], &[10, -4, -16, 3]]);
        let s = smith_with_transforms(a.clone(), 4);
        let paq = mat_mul(&mat_mul(&s.p, &a, 3, 4), &s.q, 4, 4);
        for i in 0..3 {
            for j in 0..4 {
                let expect = if i == j { s.diagonal[i].clone() } else { BigInt::zero() };
                assert_eq!(paq[i][j], expect);
            }
        }
        assert_eq!(mat_mul(&s.p, &s.p_inv, 3, 3), identity(3));
        assert_eq!(mat_mul(&s.q, &s.q_inv, 4, 4), identity(4));
    }

    #[test]
    fn sparse_matches_dense() {
        // Boundary of the 2-simplex plus a torsion-producing column.
        let cols = vec![vec![(0, 1), (1, -1)], vec![(1, 1), (2, -1)], vec![(0, 2), (2, -2)]];
        let f = invariant_factors(3, &cols);
        let dense = smith(big(&[&[1, 0, 2], &[-1, 1, 0], &[0, -1, -2]])).diagonal;
        let dense: Vec<BigInt> = dense.into_iter().filter(|d| !d.is_zero()).collect();
        assert_eq!(f, dense);
    }
}
