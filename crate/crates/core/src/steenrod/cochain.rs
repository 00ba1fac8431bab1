//! Steenrod squares on mod-2 cochains via cup-i products.

use crate::cohomology::{is_cocycle, Cochain, Ring};
use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};

use super::algebra::{Op, SteenrodElement};

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            if n - j < k - cur.len() {
                break;
            }
            cur.push(j);
            rec(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Mod-2 cup-i product. On an ordered simplex `[v_0..v_n]` it sums over
/// cut points `j_0 < ... < j_i`; `a` reads the even intervals and `b` the
/// odd ones.
pub fn cup_i(k: &SimplicialComplex, a: &Cochain, b: &Cochain, i: usize) -> Result<Cochain> {
    if a.ring != Ring::Zp(2) || b.ring != Ring::Zp(2) {
        return Err(Error::RingMismatch("cup-i products are implemented mod 2".into()));
    }
    let (p, q) = (a.degree, b.degree);
    let Some(n) = (p + q).checked_sub(i) else {
        return Err(Error::input(format!("cup-{i} of degrees {p} and {q} is undefined")));
    };
    if n > k.dim() {
        return Ok(Cochain::new(n, a.ring, Vec::new()));
    }
    let cuts = subsets(n + 1, i + 1);
    let values = k
        .simplices(n)
        .iter()
        .map(|s| {
            let v = s.vertices();
            let mut acc = 0;
            for c in &cuts {
                let mut bounds = Vec::with_capacity(i + 3);
                bounds.push(0);
                bounds.extend_from_slice(c);
                bounds.push(n);
                let (mut fa, mut fb) = (Vec::new(), Vec::new());
                for (t, w) in bounds.windows(2).enumerate() {
                    let target = if t % 2 == 0 { &mut fa } else { &mut fb };
                    for &x in &v[w[0]..=w[1]] {
                        if target.last() != Some(&x) {
                            target.push(x);
                        }
                    }
                }
                if fa.len() != p + 1 || fb.len() != q + 1 {
                    continue;
                }
                let ia = k.index_of(&Simplex::from_sorted(fa)).expect("faces are simplices");
                let ib = k.index_of(&Simplex::from_sorted(fb)).expect("faces are simplices");
                acc += a.values[ia] * b.values[ib];
            }
            acc
        })
        .collect();
    Ok(Cochain::new(n, a.ring, values))
}

/// `Sq^i` of a mod-2 cocycle, as the cocycle `c cup_(n-i) c`.
pub fn sq(k: &SimplicialComplex, i: usize, c: &Cochain) -> Result<Cochain> {
    if c.ring != Ring::Zp(2) {
        return Err(Error::RingMismatch("Steenrod squares act on mod-2 cochains".into()));
    }
    if !is_cocycle(k, c)? {
        return Err(Error::NotACocycle);
    }
    let n = c.degree;
    let d = n + i;
    if i > n {
        let len = if d > k.dim() { 0 } else { k.count(d) };
        return Ok(Cochain::new(d, c.ring, vec![0; len]));
    }
    cup_i(k, c, c, n - i)
}

/// Action of a mod-2 Steenrod element on a cocycle, summed over terms.
pub fn apply(k: &SimplicialComplex, e: &SteenrodElement, c: &Cochain) -> Result<Vec<Cochain>> {
    if e.p != 2 {
        return Err(Error::input("only mod-2 elements act on cochains"));
    }
    // Terms may have different degrees, so the result is grouped by degree.
    let mut by_degree: std::collections::BTreeMap<usize, Cochain> = Default::default();
    for (word, coeff) in e.terms() {
        if coeff == 0 {
            continue;
        }
        let mut cur = c.clone();
        for op in word.iter().rev() {
            let Op::Sq(i) = *op else { unreachable!("mod-2 words contain only squares") };
            cur = sq(k, i as usize, &cur)?;
        }
        match by_degree.get_mut(&cur.degree) {
            Some(acc) => *acc = acc.add(&cur)?,
            None => {
                by_degree.insert(cur.degree, cur);
            }
        }
    }
    Ok(by_degree.into_values().collect())
}
