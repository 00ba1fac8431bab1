//! Dense exact linear algebra over the rationals.

use num::Zero;

use crate::rational::Q;

/// Reduced row echelon form. Returns the pivot column of each nonzero row.
pub fn rref(m: &mut Vec<Vec<Q>>) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    pivots
}

pub fn rank(rows: &[Vec<Q>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

pub fn det(mut m: Vec<Vec<Q>>) -> Q {
    let n = m.len();
    let mut d = Q::from_integer(1.into());
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        let piv = m[c][c].clone();
        d *= &piv;
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &piv;
            for j in c..n {
                let t = &f * &m[c][j];
                m[i][j] -= t;
            }
        }
    }
    d
}

/// Some solution of `a x = b`, or `None` when the system is inconsistent.
pub fn solve(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let cols = a.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Q::zero(); cols];
    for (row, &c) in aug.iter().zip(&pivots) {
        x[c] = row[cols].clone();
    }
    Some(x)
}

/// Basis of `{x : a x = 0}`.
pub fn nullspace(a: &[Vec<Q>], cols: usize) -> Vec<Vec<Q>> {
    let mut m = a.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); cols];
            v[f] = Q::from_integer(1.into());
            for (row, &p) in m.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

pub fn inverse(a: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = a.len();
    let mut aug: Vec<Vec<Q>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::from_integer(1.into()) } else { Q::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec(a: &[Vec<Q>], x: &[Q]) -> Vec<Q> {
    a.iter().map(|row| crate::rational::dot(row, x)).collect()
}

/// Scales a nonzero vector so that its first nonzero entry is `+1`.
pub fn projective_normalize(v: &[Q]) -> Vec<Q> {
    let lead = v.iter().find(|x| !x.is_zero()).cloned().unwrap_or_else(|| Q::from_integer(1.into()));
    v.iter().map(|x| x / &lead).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Q>> {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn det_small() {
        assert_eq!(det(m(&[&[2, 1], &[1, 3]])), q(5));
        assert_eq!(det(m(&[&[0, 1], &[1, 0]])), q(-1));
        assert_eq!(det(m(&[&[1, 2], &[2, 4]])), q(0));
    }

    #[test]
    fn solve_and_nullspace() {
        let a = m(&[&[1, 1, 0], &[0, 1, 1]]);
        let x = solve(&a, &[q(2), q(3)]).unwrap();
        assert_eq!(mat_vec(&a, &x), vec![q(2), q(3)]);
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 1);
        assert_eq!(mat_vec(&a, &ns[0]), vec![q(0), q(0)]);
        assert!(solve(&m(&[&[1, 1], &[2, 2]]), &[q(1), q(3)]).is_none());
    }

    #[test]
    fn inverse_roundtrip() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(inv, vec![vec![q(1), q(-1)], vec![q(-1), q(2)]]);
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
        assert_eq!(projective_normalize(&[q(0), q(-2), q(4)]), vec![q(0), q(1), q(-2)]);
        let _ = qr(1, 2);
    }
}
