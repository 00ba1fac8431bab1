//! Sparse linear algebra over the prime field `Z/p`.

use std::collections::HashMap;

/// Sorted `(index, value)` pairs with values in `1..p`.
pub type SparseVec = Vec<(usize, u64)>;

pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a % p, p - 2, p)
}

pub fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

pub fn reduce_i64(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

/// `y + a * x` modulo `p`.
pub fn axpy(y: &SparseVec, a: u64, x: &SparseVec, p: u64) -> SparseVec {
    if a.is_multiple_of(p) {
        return y.clone();
    }
    let mut out = Vec::with_capacity(y.len() + x.len());
    let (mut i, mut j) = (0, 0);
    while i < y.len() || j < x.len() {
        let take_y = j >= x.len() || (i < y.len() && y[i].0 < x[j].0);
        let take_x = i >= y.len() || (j < x.len() && x[j].0 < y[i].0);
        if take_y {
            out.push(y[i]);
            i += 1;
        } else if take_x {
            out.push((x[j].0, a * x[j].1 % p));
            j += 1;
        } else {
            let v = (y[i].1 + a * x[j].1) % p;
            if v != 0 {
                out.push((y[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn from_dense(v: &[i64], p: u64) -> SparseVec {
    v.iter()
        .enumerate()
        .filter_map(|(i, &x)| {
            let r = reduce_i64(x, p);
            (r != 0).then_some((i, r))
        })
        .collect()
}

pub fn to_dense(v: &SparseVec, n: usize) -> Vec<i64> {
    let mut out = vec![0; n];
    for &(i, x) in v {
        out[i] = x as i64;
    }
    out
}

/// A reduced family of vectors indexed by their largest nonzero index, each
/// carrying a tag that is transformed alongside it.
#[derive(Clone, Debug)]
pub struct Echelon {
    p: u64,
    by_low: HashMap<usize, usize>,
    vecs: Vec<SparseVec>,
    tags: Vec<SparseVec>,
}

impl Echelon {
    pub fn new(p: u64) -> Self {
        Echelon { p, by_low: HashMap::new(), vecs: Vec::new(), tags: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.vecs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vecs.is_empty()
    }

    /// Subtracts multiples of stored vectors until the low entry is new.
    /// Returns `v - sum a_i w_i` and `tag - sum a_i t_i`.
    pub fn reduce(&self, mut v: SparseVec, mut tag: SparseVec) -> (SparseVec, SparseVec) {
        let p = self.p;
        while let Some(&(low, x)) = v.last() {
            let Some(&k) = self.by_low.get(&low) else { break };
            let w = &self.vecs[k];
            let a = (p - x * inv_mod(w.last().unwrap().1, p) % p) % p;
            v = axpy(&v, a, w, p);
            if !self.tags[k].is_empty() {
                tag = axpy(&tag, a, &self.tags[k], p);
            }
        }
        (v, tag)
    }

    /// Stores an already reduced nonzero vector.
    pub fn insert(&mut self, v: SparseVec, tag: SparseVec) {
        let low = v.last().expect("inserting a zero vector").0;
        debug_assert!(!self.by_low.contains_key(&low));
        self.by_low.insert(low, self.vecs.len());
        self.vecs.push(v);
        self.tags.push(tag);
    }

    /// Reduces and inserts; returns whether the rank grew.
    pub fn push(&mut self, v: SparseVec) -> bool {
        let (r, _) = self.reduce(v, Vec::new());
        if r.is_empty() {
            false
        } else {
            self.insert(r, Vec::new());
            true
        }
    }
}

/// Rank of the matrix with the given sparse columns.
pub fn rank(columns: &[SparseVec], p: u64) -> usize {
    let mut e = Echelon::new(p);
    columns.iter().filter(|c| e.push((*c).clone())).count()
}

/// A basis of the kernel of the matrix with the given columns, as sparse
/// vectors over the column index.
pub fn kernel(columns: &[SparseVec], p: u64) -> Vec<SparseVec> {
    let mut e = Echelon::new(p);
    let mut out = Vec::new();
    for (j, c) in columns.iter().enumerate() {
        let (r, t) = e.reduce(c.clone(), vec![(j, 1)]);
        if r.is_empty() {
            out.push(t);
        } else {
            e.insert(r, t);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverses() {
        for p in [2u64, 3, 5, 7] {
            for a in 1..p {
                assert_eq!(a * inv_mod(a, p) % p, 1);
            }
        }
    }

    #[test]
    fn rank_and_kernel() {
        // Columns (1,1,0), (0,1,1), (1,0,1): rank 2 mod 2, 3 mod 3.
        let cols = vec![vec![(0, 1), (1, 1)], vec![(1, 1), (2, 1)], vec![(0, 1), (2, 1)]];
        assert_eq!(rank(&cols, 2), 2);
        assert_eq!(rank(&cols, 3), 3);
        let k = kernel(&cols, 2);
        assert_eq!(k, vec![vec![(0, 1), (1, 1), (2, 1)]]);
        assert!(kernel(&cols, 3).is_empty());
    }
}
