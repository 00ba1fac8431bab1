//! The mod-p Steenrod algebra: monomials, Adem rewriting and the admissible
//! basis.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A generator: `Sq^i` for p = 2, the Bockstein or `P^i` for odd p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Op {
    Sq(u32),
    B,
    P(u32),
}

pub type Word = Vec<Op>;

/// `C(n, k) mod p` by Lucas' theorem; zero outside `0 <= k <= n`.
pub fn binomial_mod(n: i64, k: i64, p: u64) -> u64 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let (mut n, mut k) = (n as u64, k as u64);
    let mut acc = 1u64;
    while n > 0 || k > 0 {
        let (a, b) = (n % p, k % p);
        if b > a {
            return 0;
        }
        acc = acc * small_binomial(a, b) % p;
        n /= p;
        k /= p;
    }
    acc
}

fn small_binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r as u64
}

fn sign(e: i64, p: u64) -> u64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        p - 1
    }
}

/// Degree of a word.
pub fn degree(word: &[Op], p: u64) -> u64 {
    word.iter()
        .map(|op| match *op {
            Op::Sq(i) => i as u64,
            Op::B => 1,
            Op::P(i) => 2 * i as u64 * (p - 1),
        })
        .sum()
}

/// Index `k` such that the pair starting at `word[k]` violates admissibility.
fn violations(word: &[Op], p: u64) -> Vec<usize> {
    let mut out = Vec::new();
    for k in 0..word.len() {
        match (word[k], word.get(k + 1), word.get(k + 2)) {
            (Op::Sq(a), Some(&Op::Sq(b)), _) if a < 2 * b => out.push(k),
            (Op::P(a), Some(&Op::P(b)), _) if (a as u64) < p * b as u64 => out.push(k),
            (Op::P(a), Some(&Op::B), Some(&Op::P(b))) if (a as u64) <= p * b as u64 => out.push(k),
            _ => {}
        }
    }
    out
}

pub fn is_admissible(word: &[Op], p: u64) -> bool {
    violations(word, p).is_empty()
}

/// Drops identity factors; `None` when the word vanishes (a repeated Bockstein).
fn normalize(word: Word) -> Option<Word> {
    let w: Word = word.into_iter().filter(|op| !matches!(op, Op::Sq(0) | Op::P(0))).collect();
    if w.windows(2).any(|x| x[0] == Op::B && x[1] == Op::B) {
        None
    } else {
        Some(w)
    }
}

/// Right-hand side of the Adem relation for the pair at `word[k]`, as
/// replacement fragments with coefficients.
fn adem(word: &[Op], k: usize, p: u64) -> (usize, Vec<(Word, u64)>) {
    let mut out = Vec::new();
    match (word[k], word[k + 1]) {
        (Op::Sq(a), Op::Sq(b)) => {
            let (a, b) = (a as i64, b as i64);
            for j in 0..=a / 2 {
                let c = binomial_mod(b - 1 - j, a - 2 * j, 2);
                if c != 0 {
                    out.push((vec![Op::Sq((a + b - j) as u32), Op::Sq(j as u32)], 1));
                }
            }
            (2, out)
        }
        (Op::P(a), Op::P(b)) => {
            let (a, b, pi) = (a as i64, b as i64, p as i64);
            for j in 0..=a / pi {
                let c = binomial_mod((pi - 1) * (b - j) - 1, a - pi * j, p) * sign(a + j, p) % p;
                if c != 0 {
                    out.push((vec![Op::P((a + b - j) as u32), Op::P(j as u32)], c));
                }
            }
            (2, out)
        }
        (Op::P(a), Op::B) => {
            let Op::P(b) = word[k + 2] else { unreachable!("violation implies P B P") };
            let (a, b, pi) = (a as i64, b as i64, p as i64);
            for j in 0..=a / pi {
                let c = binomial_mod((pi - 1) * (b - j), a - pi * j, p) * sign(a + j, p) % p;
                if c != 0 {
                    out.push((vec![Op::B, Op::P((a + b - j) as u32), Op::P(j as u32)], c));
                }
            }
            if a >= 1 {
                for j in 0..=(a - 1) / pi {
                    let c = binomial_mod((pi - 1) * (b - j) - 1, a - pi * j - 1, p) * sign(a + j - 1, p) % p;
                    if c != 0 {
                        out.push((vec![Op::P((a + b - j) as u32), Op::B, Op::P(j as u32)], c));
                    }
                }
            }
            (3, out)
        }
        _ => unreachable!("not a violating pair"),
    }
}

/// Which violation to rewrite first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RewriteOrder {
    Leftmost,
    Rightmost,
    Random(u64),
}

/// A homogeneous-or-not formal combination of monomials with coefficients in `Z/p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteenrodElement {
    pub p: u64,
    terms: BTreeMap<Word, u64>,
}

impl SteenrodElement {
    pub fn zero(p: u64) -> Self {
        SteenrodElement { p, terms: BTreeMap::new() }
    }

    pub fn one(p: u64) -> Self {
        Self::monomial(p, Vec::new()).unwrap()
    }

    pub fn monomial(p: u64, word: Word) -> Result<Self> {
        validate_word(&word, p)?;
        let mut e = Self::zero(p);
        e.add_term(word, 1);
        Ok(e)
    }

    /// `Sq^{i_1} ... Sq^{i_r}`.
    pub fn sq(word: &[u32]) -> Self {
        Self::monomial(2, word.iter().map(|&i| Op::Sq(i)).collect()).unwrap()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, u64)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, word: Word, coeff: u64) {
        let Some(word) = normalize(word) else { return };
        let e = self.terms.entry(word.clone()).or_insert(0);
        *e = (*e + coeff) % self.p;
        if *e == 0 {
            self.terms.remove(&word);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::RingMismatch(format!("Steenrod algebras at {} and {}", self.p, other.p)));
        }
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), c);
        }
        Ok(out)
    }

    /// Composition `self * other` (apply `other` first).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::RingMismatch(format!("Steenrod algebras at {} and {}", self.p, other.p)));
        }
        let mut out = Self::zero(self.p);
        for (a, x) in self.terms() {
            for (b, y) in other.terms() {
                let mut w = a.clone();
                w.extend_from_slice(b);
                out.add_term(w, x * y % self.p);
            }
        }
        Ok(out)
    }

    pub fn is_admissible(&self) -> bool {
        self.terms.keys().all(|w| is_admissible(w, self.p))
    }

    /// Degrees present among the terms.
    pub fn degrees(&self) -> Vec<u64> {
        let mut d: Vec<u64> = self.terms.keys().map(|w| degree(w, self.p)).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// Rewrites into the admissible basis with Adem relations.
    pub fn reduce(&self) -> Self {
        self.reduce_with(RewriteOrder::Leftmost)
    }

    pub fn reduce_with(&self, order: RewriteOrder) -> Self {
        let p = self.p;
        let mut rng = match order {
            RewriteOrder::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        let mut out = Self::zero(p);
        let mut work: Vec<(Word, u64)> = self.terms().map(|(w, c)| (w.clone(), c)).collect();
        while let Some((w, c)) = work.pop() {
            let v = violations(&w, p);
            if v.is_empty() {
                out.add_term(w, c);
                continue;
            }
            let k = match (&order, rng.as_mut()) {
                (RewriteOrder::Leftmost, _) => v[0],
                (RewriteOrder::Rightmost, _) => *v.last().unwrap(),
                (_, Some(r)) => *v.choose(r).unwrap(),
                _ => v[0],
            };
            let (width, replacements) = adem(&w, k, p);
            for (frag, x) in replacements {
                let mut nw = w[..k].to_vec();
                nw.extend(frag);
                nw.extend_from_slice(&w[k + width..]);
                if let Some(nw) = normalize(nw) {
                    work.push((nw, c * x % p));
                }
            }
        }
        out
    }
}

impl fmt::Display for SteenrodElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, &c)| {
                let body = if w.is_empty() { "1".to_string() } else { format_word(w) };
                if c == 1 {
                    body
                } else {
                    format!("{c} {body}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub fn format_word(w: &[Op]) -> String {
    w.iter()
        .map(|op| match op {
            Op::Sq(i) => format!("Sq{i}"),
            Op::B => "b".to_string(),
            Op::P(i) => format!("P{i}"),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn validate_word(word: &[Op], p: u64) -> Result<()> {
    for op in word {
        let ok = match op {
            Op::Sq(_) => p == 2,
            Op::B | Op::P(_) => p != 2,
        };
        if !ok {
            return Err(Error::input(format!("{op:?} is not a generator at p = {p}")));
        }
    }
    Ok(())
}

/// Parses `"1,2"` (mod 2) or `"b,P1,2"` (odd p; bare numbers mean `P^i`).
pub fn parse_word(s: &str, p: u64) -> Result<Word> {
    let mut w = Vec::new();
    for tok in s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
        let t = tok.trim();
        let op = if t.eq_ignore_ascii_case("b") {
            Op::B
        } else {
            let digits = t.trim_start_matches(|c: char| c.is_ascii_alphabetic() || c == '^');
            let prefix = &t[..t.len() - digits.len()];
            let i: u32 = digits.parse().map_err(|_| Error::input(format!("bad Steenrod token {t:?}")))?;
            match (prefix.to_ascii_lowercase().trim_end_matches('^'), p) {
                ("" | "sq", 2) => Op::Sq(i),
                ("" | "p", _) if p != 2 => Op::P(i),
                _ => return Err(Error::input(format!("bad Steenrod token {t:?} at p = {p}"))),
            }
        };
        w.push(op);
    }
    validate_word(&w, p)?;
    Ok(w)
}

/// Admissible mod-2 sequences of total degree `d`, in lexicographic order.
pub fn admissible_mod2(d: u32) -> Vec<Vec<u32>> {
    fn rec(remaining: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        for i in 1..=remaining.min(max) {
            // The tail after i has degree at most i - 1 (i/2 + i/4 + ...).
            if remaining - i > i {
                continue;
            }
            prefix.push(i);
            rec(remaining - i, i / 2, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, d, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Admissible odd-primary words of degree `d`.
pub fn admissible_odd(p: u64, d: u64) -> Vec<Word> {
    let q = 2 * (p - 1);
    fn rec(p: u64, q: u64, remaining: u64, last: Option<Op>, word: &mut Word, out: &mut Vec<Word>) {
        // Words are built right to left.
        if remaining == 0 {
            let mut w = word.clone();
            w.reverse();
            out.push(w);
        }
        if remaining >= 1 && last != Some(Op::B) {
            word.push(Op::B);
            rec(p, q, remaining - 1, Some(Op::B), word, out);
            word.pop();
        }
        // Next P^s must satisfy s >= p * s' + e for the P^{s'} (with e Bocksteins) to its right.
        let min_s = match (last, word.iter().rev().nth(1)) {
            (Some(Op::P(s)), _) => p * s as u64,
            (Some(Op::B), Some(&Op::P(s))) => p * s as u64 + 1,
            _ => 1,
        };
        let mut s = min_s.max(1);
        while s * q <= remaining {
            word.push(Op::P(s as u32));
            rec(p, q, remaining - s * q, Some(Op::P(s as u32)), word, out);
            word.pop();
            s += 1;
        }
    }
    let mut out = Vec::new();
    rec(p, q, d, None, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// `Sq^k(u v)` as the list of pairs `(i, k - i)` that survive the vanishing
/// `Sq^i u = 0` for `i > deg u`.
pub fn cartan_expand(k: u32, u_deg: u32, v_deg: u32) -> Vec<(u32, u32)> {
    (0..=k).filter(|&i| i <= u_deg && k - i <= v_deg).map(|i| (i, k - i)).collect()
}

/// The formal composite `b P^r`.
pub fn bockstein_power(p: u64, r: u32) -> Result<SteenrodElement> {
    if p == 2 {
        return Err(Error::input("the composite is defined for odd primes"));
    }
    SteenrodElement::monomial(p, vec![Op::B, Op::P(r)])
}
