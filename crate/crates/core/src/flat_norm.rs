//! Simplicial flat norm `min M(R) + M(S)` over `T = R + dS`.

use std::collections::BTreeMap;

use num::{BigInt, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::chains::Chain;
use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::lp::{self, LpStatus};
use crate::rational::{format_rational, q, to_f64, to_fixed, Q};

/// Objective weights are volumes rounded to multiples of `2^-WEIGHT_BITS`.
pub const WEIGHT_BITS: u32 = 80;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverStatus {
    /// LP optimum at an integral vertex: the integral flat norm.
    LpIntegral,
    /// LP optimum is fractional; the value is a lower bound.
    LpFractional,
    /// Exhaustive search within a coefficient bound.
    BruteForce,
}

impl SolverStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverStatus::LpIntegral => "lp-integral",
            SolverStatus::LpFractional => "lp-fractional",
            SolverStatus::BruteForce => "bruteforce",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    Integral { r: Chain, s: Chain },
    Fractional { r: BTreeMap<Simplex, Q>, s: BTreeMap<Simplex, Q> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlatDecomposition {
    /// Optimum of the rationalized objective.
    pub objective: Q,
    pub value: f64,
    pub mass_r: f64,
    pub mass_s: f64,
    pub witness: Witness,
    pub status: SolverStatus,
}

impl FlatDecomposition {
    pub fn integral(&self) -> Option<(&Chain, &Chain)> {
        match &self.witness {
            Witness::Integral { r, s } => Some((r, s)),
            Witness::Fractional { .. } => None,
        }
    }

    pub fn csv_header() -> &'static str {
        "value,massR,massS,status"
    }

    pub fn csv_row(&self) -> String {
        format!("{:.16e},{:.16e},{:.16e},{}", self.value, self.mass_r, self.mass_s, self.status.as_str())
    }

    /// Checks `T - R - dS = 0` exactly.
    pub fn check_identity(&self, t: &Chain) -> Result<()> {
        match &self.witness {
            Witness::Integral { r, s } => {
                let rest = t.sub(r)?;
                let rest = if s.is_zero() { rest } else { rest.sub(&s.boundary()?)? };
                if rest.is_zero() {
                    Ok(())
                } else {
                    Err(Error::invariant("T - R - dS is not zero"))
                }
            }
            Witness::Fractional { r, s } => {
                let mut acc: BTreeMap<Simplex, Q> = t.terms().map(|(x, c)| (x.clone(), q(c))).collect();
                for (x, c) in r {
                    *acc.entry(x.clone()).or_insert_with(Q::zero) -= c;
                }
                for (x, c) in s {
                    for (sign, f) in x.facets() {
                        *acc.entry(f).or_insert_with(Q::zero) -= c * q(sign);
                    }
                }
                if acc.values().all(|v| v.is_zero()) {
                    Ok(())
                } else {
                    Err(Error::invariant("T - R - dS is not zero"))
                }
            }
        }
    }
}

/// Per-simplex objective weights, `round(vol * 2^80)` as integers.
pub fn fixed_weights(k: &SimplicialComplex, d: usize) -> Vec<BigInt> {
    k.simplices(d).iter().map(|s| to_fixed(&k.volume(s).approx(), WEIGHT_BITS)).collect()
}

fn scale() -> Q {
    Q::from_integer(BigInt::one() << WEIGHT_BITS as usize)
}

struct Problem<'a> {
    k: &'a SimplicialComplex,
    dim: usize,
    t: Vec<i64>,
    wr: Vec<BigInt>,
    ws: Vec<BigInt>,
    /// Columns of the boundary `C_(k+1) -> C_k`.
    bd: Vec<Vec<(usize, i64)>>,
}

impl<'a> Problem<'a> {
    fn new(t: &Chain, k: &'a SimplicialComplex) -> Result<Self> {
        t.check_support(k)?;
        let dim = t.dim();
        let mut tv = vec![0i64; k.count(dim)];
        for (s, c) in t.terms() {
            tv[k.index_of(s).unwrap()] = c;
        }
        let (ws, bd) = if dim < k.dim() {
            let bd = k
                .simplices(dim + 1)
                .iter()
                .map(|s| s.facets().into_iter().map(|(sign, f)| (k.index_of(&f).unwrap(), sign)).collect())
                .collect();
            (fixed_weights(k, dim + 1), bd)
        } else {
            (Vec::new(), Vec::new())
        };
        Ok(Problem { k, dim, t: tv, wr: fixed_weights(k, dim), ws, bd })
    }

    fn chain_r(&self, r: &[i64]) -> Chain {
        let mut c = Chain::zero(self.dim);
        for (i, &x) in r.iter().enumerate() {
            c.add_term(self.k.simplices(self.dim)[i].clone(), x);
        }
        c
    }

    fn chain_s(&self, s: &[i64]) -> Chain {
        let mut c = Chain::zero(self.dim + 1);
        for (j, &x) in s.iter().enumerate() {
            c.add_term(self.k.simplices(self.dim + 1)[j].clone(), x);
        }
        c
    }

    fn r_of(&self, s: &[i64]) -> Vec<i64> {
        let mut r = self.t.clone();
        for (j, &x) in s.iter().enumerate() {
            for &(i, sign) in &self.bd[j] {
                r[i] -= sign * x;
            }
        }
        r
    }

    fn finish_integral(&self, s: &[i64], status: SolverStatus) -> FlatDecomposition {
        let r = self.r_of(s);
        let sc = scale();
        let objective = r.iter().zip(&self.wr).map(|(&x, w)| w * x.abs()).sum::<BigInt>()
            + s.iter().zip(&self.ws).map(|(&x, w)| w * x.abs()).sum::<BigInt>();
        let objective = Q::from_integer(objective) / sc;
        let rc = self.chain_r(&r);
        let scn = self.chain_s(s);
        let mass_r = rc.mass(self.k);
        let mass_s = scn.mass(self.k);
        FlatDecomposition {
            value: to_f64(&objective),
            objective,
            mass_r,
            mass_s,
            witness: Witness::Integral { r: rc, s: scn },
            status,
        }
    }
}

/// Tuning for [`flat_norm_lp`].
#[derive(Clone, Copy, Debug)]
pub struct LpOptions {
    /// Among optimal solutions pick the lexicographically smallest `S`.
    pub lexicographic_ties: bool,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions { lexicographic_ties: true }
    }
}

/// Flat norm by exact linear programming with `r = r+ - r-`, `s = s+ - s-`.
pub fn flat_norm_lp(t: &Chain, k: &SimplicialComplex) -> Result<FlatDecomposition> {
    flat_norm_lp_with(t, k, LpOptions::default())
}

pub fn flat_norm_lp_with(t: &Chain, k: &SimplicialComplex, opts: LpOptions) -> Result<FlatDecomposition> {
    let pb = Problem::new(t, k)?;
    let (nr, ns) = (pb.wr.len(), pb.ws.len());
    if t.is_zero() {
        return Ok(pb.finish_integral(&vec![0; ns], SolverStatus::LpIntegral));
    }
    // Columns: r+ (nr), r- (nr), s+ (ns), s- (ns).
    let n = 2 * nr + 2 * ns;
    let mut a = vec![vec![Q::zero(); n]; nr];
    for i in 0..nr {
        a[i][i] = q(1);
        a[i][nr + i] = q(-1);
    }
    for (j, col) in pb.bd.iter().enumerate() {
        for &(i, sign) in col {
            a[i][2 * nr + j] = q(sign);
            a[i][2 * nr + ns + j] = q(-sign);
        }
    }
    let b: Vec<Q> = pb.t.iter().map(|&x| q(x)).collect();
    let sc = scale();
    let mut c = Vec::with_capacity(n);
    for w in pb.wr.iter().chain(&pb.wr).chain(&pb.ws).chain(&pb.ws) {
        c.push(Q::from_integer(w.clone()) / &sc);
    }
    let sol = lp::minimize(&a, &b, &c);
    if sol.status != LpStatus::Optimal {
        return Err(Error::invariant(format!("flat norm LP ended {:?}", sol.status)));
    }
    let mut x = sol.x;
    let best = sol.value;
    if opts.lexicographic_ties && ns > 0 {
        let mut rows = a.clone();
        let mut rhs = b.clone();
        rows.push(c.clone());
        rhs.push(best.clone());
        for j in 0..ns {
            let mut obj = vec![Q::zero(); n];
            obj[2 * nr + j] = q(1);
            obj[2 * nr + ns + j] = q(-1);
            let s = lp::minimize(&rows, &rhs, &obj);
            if s.status != LpStatus::Optimal {
                return Err(Error::invariant("lexicographic refinement lost feasibility"));
            }
            let mut fix = vec![Q::zero(); n];
            fix[2 * nr + j] = q(1);
            fix[2 * nr + ns + j] = q(-1);
            rows.push(fix);
            rhs.push(s.value.clone());
            x = s.x;
        }
    }
    let s: Vec<Q> = (0..ns).map(|j| &x[2 * nr + j] - &x[2 * nr + ns + j]).collect();
    if s.iter().all(|v| v.is_integer()) {
        let si: Vec<i64> = s.iter().map(|v| v.to_integer().to_i64().expect("coefficient fits")).collect();
        let d = pb.finish_integral(&si, SolverStatus::LpIntegral);
        if d.objective != best {
            return Err(Error::invariant("integral witness does not attain the LP optimum"));
        }
        return Ok(d);
    }
    let r: Vec<Q> = (0..nr).map(|i| &x[i] - &x[nr + i]).collect();
    let rmap: BTreeMap<Simplex, Q> = r
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| (k.simplices(pb.dim)[i].clone(), v.clone()))
        .collect();
    let smap: BTreeMap<Simplex, Q> = s
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(j, v)| (k.simplices(pb.dim + 1)[j].clone(), v.clone()))
        .collect();
    let mass =
        |m: &BTreeMap<Simplex, Q>| -> f64 { m.iter().map(|(x, v)| to_f64(&(k.volume(x).approx() * v.abs()))).sum() };
    Ok(FlatDecomposition {
        value: to_f64(&best),
        objective: best,
        mass_r: mass(&rmap),
        mass_s: mass(&smap),
        witness: Witness::Fractional { r: rmap, s: smap },
        status: SolverStatus::LpFractional,
    })
}

/// Exhaustive search over integer `S` with `|s_j| <= bound`, visiting
/// coefficient vectors in lexicographic order so the first optimum found is
/// the lexicographically smallest.
pub fn flat_norm_bruteforce(
    t: &Chain,
    k: &SimplicialComplex,
    bound: i64,
    limits: &Limits,
) -> Result<FlatDecomposition> {
    let pb = Problem::new(t, k)?;
    let (nr, ns) = (pb.wr.len(), pb.ws.len());
    if nr + ns > limits.max_bruteforce_simplices {
        return Err(Error::guard(format!(
            "brute force needs {} simplices in dimensions {} and {}, limit {}",
            nr + ns,
            pb.dim,
            pb.dim + 1,
            limits.max_bruteforce_simplices
        )));
    }
    let tmax = pb.t.iter().map(|x| x.abs()).max().unwrap_or(0);
    if bound < tmax {
        return Err(Error::input(format!("coefficient bound {bound} is below max |t_i| = {tmax}")));
    }
    let to_i128 = |w: &BigInt| w.to_i128().ok_or_else(|| Error::guard("simplex volume too large for brute force"));
    let wr: Vec<i128> = pb.wr.iter().map(to_i128).collect::<Result<_>>()?;
    let ws: Vec<i128> = pb.ws.iter().map(to_i128).collect::<Result<_>>()?;
    // Row i of r is final once every coface up to `last[i]` is assigned.
    let mut last = vec![None; nr];
    for (j, col) in pb.bd.iter().enumerate() {
        for &(i, _) in col {
            last[i] = Some(j);
        }
    }
    let mut settles: Vec<Vec<usize>> = vec![Vec::new(); ns];
    let mut fixed_cost: i128 = 0;
    for i in 0..nr {
        match last[i] {
            Some(j) => settles[j].push(i),
            None => fixed_cost += wr[i] * pb.t[i].abs() as i128,
        }
    }
    struct Search<'s> {
        bound: i64,
        bd: &'s [Vec<(usize, i64)>],
        wr: &'s [i128],
        ws: &'s [i128],
        settles: &'s [Vec<usize>],
        r: Vec<i64>,
        s: Vec<i64>,
        best: Option<(i128, Vec<i64>)>,
        nodes: u64,
        max_nodes: u64,
    }
    impl Search<'_> {
        fn go(&mut self, j: usize, cost: i128) -> Result<()> {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Err(Error::guard(format!("brute force exceeded {} search nodes", self.max_nodes)));
            }
            if self.best.as_ref().is_some_and(|(b, _)| cost >= *b) {
                return Ok(());
            }
            if j == self.s.len() {
                self.best = Some((cost, self.s.clone()));
                return Ok(());
            }
            for x in -self.bound..=self.bound {
                for &(i, sign) in &self.bd[j] {
                    self.r[i] -= sign * x;
                }
                self.s[j] = x;
                let mut c = cost + self.ws[j] * x.abs() as i128;
                for &i in &self.settles[j] {
                    c += self.wr[i] * self.r[i].abs() as i128;
                }
                self.go(j + 1, c)?;
                for &(i, sign) in &self.bd[j] {
                    self.r[i] += sign * x;
                }
            }
            self.s[j] = 0;
            Ok(())
        }
    }
    let mut search = Search {
        bound,
        bd: &pb.bd,
        wr: &wr,
        ws: &ws,
        settles: &settles,
        r: pb.t.clone(),
        s: vec![0; ns],
        best: None,
        nodes: 0,
        max_nodes: limits.max_bruteforce_nodes,
    };
    search.go(0, fixed_cost)?;
    let (_, s) = search.best.expect("the search space is nonempty");
    Ok(pb.finish_integral(&s, SolverStatus::BruteForce))
}

/// Human-readable objective, exact.
pub fn objective_string(d: &FlatDecomposition) -> String {
    format_rational(&d.objective)
}

/// Locates the scale at which `F(d(lambda * triangle))` switches from the
/// perimeter to the area, by bisection on the witness.
pub fn crossover_bisection(triangle: [[i64; 2]; 3], lo: Q, hi: Q, iterations: usize) -> Result<Q> {
    let fills = |lambda: &Q| -> Result<bool> {
        let pts: Vec<crate::rational::RationalPoint> = triangle
            .iter()
            .map(|p| crate::rational::RationalPoint(p.iter().map(|&c| q(c) * lambda).collect()))
            .collect();
        let k = SimplicialComplex::from_facets(pts, &[vec![0, 1, 2]])?;
        let t = Chain::from_terms(1, &[(vec![1, 2], 1), (vec![0, 2], -1), (vec![0, 1], 1)])?;
        let d = flat_norm_lp_with(&t, &k, LpOptions { lexicographic_ties: false })?;
        let (_, s) = d.integral().ok_or_else(|| Error::invariant("fractional optimum on a single triangle"))?;
        Ok(!s.is_zero())
    };
    let (mut lo, mut hi) = (lo, hi);
    if fills(&lo)? == fills(&hi)? {
        return Err(Error::input("bisection interval does not bracket the crossover"));
    }
    let small_fills = fills(&lo)?;
    for _ in 0..iterations {
        let mid = (&lo + &hi) / q(2);
        if fills(&mid)? == small_fills {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / q(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::RationalPoint;

    fn triangle(scale: i64) -> SimplicialComplex {
        let p = vec![
            RationalPoint::from_ints(&[0, 0]),
            RationalPoint::from_ints(&[scale, 0]),
            RationalPoint::from_ints(&[0, scale]),
        ];
        SimplicialComplex::from_facets(p, &[vec![0, 1, 2]]).unwrap()
    }

    fn boundary() -> Chain {
        Chain::from_terms(2, &[(vec![0, 1, 2], 1)]).unwrap().boundary().unwrap()
    }

    #[test]
    fn zero_chain() {
        let k = triangle(1);
        let d = flat_norm_lp(&Chain::zero(1), &k).unwrap();
        assert_eq!(d.value, 0.0);
        let (r, s) = d.integral().unwrap();
        assert!(r.is_zero() && s.is_zero());
        let b = flat_norm_bruteforce(&Chain::zero(1), &k, 1, &Limits::default()).unwrap();
        assert_eq!(b.objective, Q::zero());
    }

    #[test]
    fn small_triangle_is_filled() {
        let k = triangle(1);
        let t = boundary();
        let d = flat_norm_lp(&t, &k).unwrap();
        assert_eq!(d.status, SolverStatus::LpIntegral);
        assert!((d.value - 0.5).abs() < 1e-15);
        let (r, s) = d.integral().unwrap();
        assert!(r.is_zero());
        assert_eq!(s.num_terms(), 1);
        d.check_identity(&t).unwrap();
    }

    #[test]
    fn large_triangle_is_not_filled() {
        let k = triangle(10);
        let t = boundary();
        let d = flat_norm_lp(&t, &k).unwrap();
        let perimeter = 20.0 + 200f64.sqrt();
        assert!((d.value - perimeter).abs() < 1e-12);
        assert!(d.integral().unwrap().1.is_zero());
        let b = flat_norm_bruteforce(&t, &k, 2, &Limits::default()).unwrap();
        assert_eq!(b.objective, d.objective);
    }

    #[test]
    fn guards() {
        let k = triangle(1);
        let t = boundary();
        let tight = Limits { max_bruteforce_simplices: 2, ..Limits::default() };
        assert!(matches!(flat_norm_bruteforce(&t, &k, 2, &tight), Err(Error::GuardExceeded(_))));
        assert!(matches!(flat_norm_bruteforce(&t.scale(3), &k, 2, &Limits::default()), Err(Error::InvalidInput(_))));
    }
}
