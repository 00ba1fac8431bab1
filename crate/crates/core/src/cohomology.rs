//! Simplicial homology and cohomology over `Z` and `Z/p`: groups, explicit
//! cocycle generators, cup products, Bocksteins and pullbacks.

use std::fmt;

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::complex::{Simplex, SimplicialComplex, SimplicialMap};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::modp::{self, Echelon, SparseVec};
use crate::snf;

/// Coefficient ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ring {
    Z,
    Zp(u64),
}

impl Ring {
    /// Parses `z`, `z2`, `z3`, ... (case-insensitive).
    pub fn parse(s: &str) -> Result<Ring> {
        let t = s.trim().to_ascii_lowercase();
        let rest = t.strip_prefix('z').ok_or_else(|| Error::input(format!("unknown coefficient ring {s:?}")))?;
        if rest.is_empty() {
            return Ok(Ring::Z);
        }
        let p: u64 = rest.parse().map_err(|_| Error::input(format!("unknown coefficient ring {s:?}")))?;
        Ring::prime(p)
    }

    pub fn prime(p: u64) -> Result<Ring> {
        if !(2..=1 << 31).contains(&p) || (2..).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(Error::input(format!("{p} is not a supported prime")));
        }
        Ok(Ring::Zp(p))
    }

    pub fn modulus(&self) -> Option<u64> {
        match self {
            Ring::Z => None,
            Ring::Zp(p) => Some(*p),
        }
    }

    pub fn reduce(&self, x: i64) -> i64 {
        match self {
            Ring::Z => x,
            Ring::Zp(p) => x.rem_euclid(*p as i64),
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Z => write!(f, "Z"),
            Ring::Zp(p) => write!(f, "Z{p}"),
        }
    }
}

/// A chain complex of free abelian groups with sparse integer boundaries.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    sizes: Vec<usize>,
    /// `boundary[k][j]` is the column of `d_k` for the j-th k-cell.
    boundary: Vec<Vec<Vec<(usize, i64)>>>,
}

impl ChainComplex {
    pub fn of(k: &SimplicialComplex) -> Self {
        Self::relative_by(k, |_| false).expect("empty subcomplex is always valid")
    }

    /// The quotient complex `C(K) / C(L)` for the subcomplex given by
    /// `in_sub`, which must be closed under faces.
    pub fn relative_by(k: &SimplicialComplex, in_sub: impl Fn(&Simplex) -> bool) -> Result<Self> {
        let top = k.dim();
        let mut local: Vec<Vec<Option<usize>>> = Vec::with_capacity(top + 1);
        let mut sizes = Vec::with_capacity(top + 1);
        for d in 0..=top {
            let mut next = 0;
            let ids = k
                .simplices(d)
                .iter()
                .map(|s| {
                    if in_sub(s) {
                        None
                    } else {
                        next += 1;
                        Some(next - 1)
                    }
                })
                .collect();
            local.push(ids);
            sizes.push(next);
        }
        for d in 1..=top {
            for (i, s) in k.simplices(d).iter().enumerate() {
                if local[d][i].is_none() {
                    for (_, f) in s.facets() {
                        if !in_sub(&f) {
                            return Err(Error::input(format!(
                                "subcomplex is not closed: contains {:?} but not its face {:?}",
                                s.vertices(),
                                f.vertices()
                            )));
                        }
                    }
                }
            }
        }
        let mut boundary = vec![Vec::new()];
        for d in 1..=top {
            let mut cols = Vec::with_capacity(sizes[d]);
            for (i, s) in k.simplices(d).iter().enumerate() {
                if local[d][i].is_none() {
                    continue;
                }
                let mut col: Vec<(usize, i64)> = s
                    .facets()
                    .into_iter()
                    .filter_map(|(sign, f)| {
                        let fi = k.index_of(&f).expect("complex is closed under faces");
                        local[d - 1][fi].map(|r| (r, sign))
                    })
                    .collect();
                col.sort_unstable();
                cols.push(col);
            }
            boundary.push(cols);
        }
        Ok(ChainComplex { sizes, boundary })
    }

    /// Relative complex for a subcomplex `l` whose vertices are located in
    /// `k` by their coordinates.
    pub fn relative(k: &SimplicialComplex, l: &SimplicialComplex) -> Result<Self> {
        let lookup: std::collections::HashMap<_, usize> =
            k.vertex_table().iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut members = std::collections::HashSet::new();
        for s in l.iter() {
            let mut ids = Vec::with_capacity(s.dim() + 1);
            for &v in s.vertices() {
                let p = l.vertex(v);
                ids.push(
                    *lookup.get(p).ok_or_else(|| Error::input(format!("vertex {p} of the subcomplex is not in K")))?,
                );
            }
            let t = Simplex::new(ids)?;
            if !k.contains(&t) {
                return Err(Error::input(format!("simplex {:?} of the subcomplex is not in K", t.vertices())));
            }
            members.insert(t);
        }
        Self::relative_by(k, |s| members.contains(s))
    }

    pub fn top_dim(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn size(&self, k: usize) -> usize {
        self.sizes.get(k).copied().unwrap_or(0)
    }

    /// Columns of `d_k: C_k -> C_(k-1)`; empty for `k = 0` or `k` out of range.
    pub fn boundary_columns(&self, k: usize) -> &[Vec<(usize, i64)>] {
        self.boundary.get(k).map_or(&[], |v| v.as_slice())
    }

    /// Dense matrix of `d_k` with rows indexed by (k-1)-cells.
    pub fn boundary_matrix(&self, k: usize) -> Vec<Vec<i64>> {
        if k == 0 {
            return Vec::new();
        }
        let mut m = vec![vec![0; self.size(k)]; self.size(k - 1)];
        for (j, col) in self.boundary_columns(k).iter().enumerate() {
            for &(i, v) in col {
                m[i][j] = v;
            }
        }
        m
    }

    /// Columns of the coboundary `C^k -> C^(k+1)`, i.e. rows of `d_(k+1)`.
    pub fn coboundary_columns(&self, k: usize) -> Vec<Vec<(usize, i64)>> {
        let mut cols = vec![Vec::new(); self.size(k)];
        for (j, col) in self.boundary_columns(k + 1).iter().enumerate() {
            for &(i, v) in col {
                cols[i].push((j, v));
            }
        }
        cols
    }

    /// Checks `d_k d_(k+1) = 0` for every k.
    pub fn check_d_squared(&self) -> Result<()> {
        for k in 1..self.top_dim() {
            for (j, col) in self.boundary_columns(k + 1).iter().enumerate() {
                let mut acc = std::collections::BTreeMap::new();
                for &(i, v) in col {
                    for &(r, w) in &self.boundary_columns(k)[i] {
                        *acc.entry(r).or_insert(0i64) += v * w;
                    }
                }
                if acc.values().any(|&x| x != 0) {
                    return Err(Error::invariant(format!("dd != 0 on cell {j} of dimension {}", k + 1)));
                }
            }
        }
        Ok(())
    }

    fn columns_mod(&self, cols: &[Vec<(usize, i64)>], p: u64) -> Vec<SparseVec> {
        cols.iter()
            .map(|c| {
                let mut v: SparseVec =
                    c.iter().filter_map(|&(i, x)| Some((i, modp::reduce_i64(x, p))).filter(|e| e.1 != 0)).collect();
                v.sort_unstable();
                v
            })
            .collect()
    }
}

/// One homology group: free rank plus torsion coefficients (integral case),
/// or a vector-space dimension (prime field case).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub rank: usize,
    pub torsion: Vec<u64>,
}

impl Group {
    pub fn free(rank: usize) -> Self {
        Group { rank, torsion: Vec::new() }
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    /// `0`, `Z`, `Z^2 + Z2`, `Z3^2`, ...
    pub fn describe(&self, ring: Ring) -> String {
        if self.is_trivial() {
            return "0".into();
        }
        let base = match ring {
            Ring::Z => "Z".to_string(),
            Ring::Zp(p) => format!("Z{p}"),
        };
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push(base),
            r => parts.push(format!("{base}^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z{t}"));
        }
        parts.join(" + ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyGroups {
    pub ring: Ring,
    pub groups: Vec<Group>,
}

impl HomologyGroups {
    pub fn betti(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.rank).collect()
    }

    pub fn get(&self, k: usize) -> Group {
        self.groups.get(k).cloned().unwrap_or_else(|| Group::free(0))
    }

    pub fn describe(&self) -> Vec<String> {
        self.groups.iter().map(|g| g.describe(self.ring)).collect()
    }

    /// Euler characteristic from the ranks.
    pub fn euler_characteristic(&self) -> i64 {
        self.groups.iter().enumerate().map(|(k, g)| if k % 2 == 0 { g.rank as i64 } else { -(g.rank as i64) }).sum()
    }

    /// Dimensions over `Z/p` predicted from integral groups.
    pub fn universal_coefficient_dims(&self, p: u64) -> Result<Vec<usize>> {
        if self.ring != Ring::Z {
            return Err(Error::RingMismatch("universal coefficients need integral groups".into()));
        }
        let ptors = |g: &Group| g.torsion.iter().filter(|&&t| t % p == 0).count();
        Ok((0..self.groups.len())
            .map(|k| self.groups[k].rank + ptors(&self.groups[k]) + if k > 0 { ptors(&self.groups[k - 1]) } else { 0 })
            .collect())
    }
}

fn to_u64(x: &BigInt) -> u64 {
    x.to_u64().expect("torsion coefficient fits in 64 bits")
}

/// Homology of a chain complex.
pub fn homology(cc: &ChainComplex, ring: Ring) -> HomologyGroups {
    let top = cc.top_dim();
    let mut ranks = vec![0usize; top + 2];
    let mut torsion: Vec<Vec<u64>> = vec![Vec::new(); top + 2];
    for k in 1..=top {
        let cols = cc.boundary_columns(k);
        match ring {
            Ring::Z => {
                let f = snf::invariant_factors(cc.size(k - 1), cols);
                ranks[k] = f.len();
                torsion[k - 1] = f.iter().filter(|d| !d.is_one()).map(to_u64).collect();
            }
            Ring::Zp(p) => ranks[k] = modp::rank(&cc.columns_mod(cols, p), p),
        }
    }
    let groups =
        (0..=top).map(|k| Group { rank: cc.size(k) - ranks[k] - ranks[k + 1], torsion: torsion[k].clone() }).collect();
    HomologyGroups { ring, groups }
}

pub fn homology_of(k: &SimplicialComplex, ring: Ring) -> HomologyGroups {
    homology(&ChainComplex::of(k), ring)
}

/// Cohomology groups, derived from homology by universal coefficients.
pub fn cohomology_groups(cc: &ChainComplex, ring: Ring) -> HomologyGroups {
    let h = homology(cc, ring);
    let groups = (0..h.groups.len())
        .map(|k| Group {
            rank: h.groups[k].rank,
            torsion: if k > 0 { h.groups[k - 1].torsion.clone() } else { Vec::new() },
        })
        .collect();
    HomologyGroups { ring, groups }
}

/// A cochain on the k-cells of a complex, in the complex's cell order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cochain {
    pub degree: usize,
    pub ring: Ring,
    pub values: Vec<i64>,
}

impl Cochain {
    pub fn new(degree: usize, ring: Ring, values: Vec<i64>) -> Self {
        let values = values.into_iter().map(|x| ring.reduce(x)).collect();
        Cochain { degree, ring, values }
    }

    pub fn zero(k: &SimplicialComplex, degree: usize, ring: Ring) -> Self {
        Cochain { degree, ring, values: vec![0; k.count(degree)] }
    }

    /// The constant 0-cochain 1, the unit for the cup product.
    pub fn unit(k: &SimplicialComplex, ring: Ring) -> Self {
        Cochain { degree: 0, ring, values: vec![1; k.count(0)] }
    }

    /// Indicator cochain of one simplex.
    pub fn indicator(k: &SimplicialComplex, s: &Simplex, ring: Ring) -> Result<Self> {
        let i = k.index_of(s).ok_or_else(|| Error::input(format!("{:?} is not a simplex", s.vertices())))?;
        let mut c = Self::zero(k, s.dim(), ring);
        c.values[i] = 1;
        Ok(c)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&x| x == 0)
    }

    fn compatible(&self, other: &Cochain) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(format!("{} vs {}", self.ring, other.ring)));
        }
        if self.degree != other.degree || self.values.len() != other.values.len() {
            return Err(Error::input("cochains live in different degrees"));
        }
        Ok(())
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        self.compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Cochain::new(self.degree, self.ring, values))
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain> {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, s: i64) -> Cochain {
        Cochain::new(self.degree, self.ring, self.values.iter().map(|x| x * s).collect())
    }

    /// Reduction of an integral cochain modulo `p`.
    pub fn reduce_mod(&self, p: u64) -> Result<Cochain> {
        Ok(Cochain::new(self.degree, Ring::prime(p)?, self.values.clone()))
    }

    /// Evaluation on a chain of the host complex.
    pub fn evaluate(&self, k: &SimplicialComplex, c: &crate::chains::Chain) -> Result<i64> {
        if c.dim() != self.degree {
            return Err(Error::input("chain and cochain degrees differ"));
        }
        let mut acc = 0i64;
        for (s, x) in c.terms() {
            let i = k.index_of(s).ok_or_else(|| Error::input(format!("{:?} is not a simplex", s.vertices())))?;
            acc += x * self.values[i];
        }
        Ok(self.ring.reduce(acc))
    }
}

fn check_host(k: &SimplicialComplex, c: &Cochain) -> Result<()> {
    if c.values.len() != k.count(c.degree) || (c.degree > k.dim() && !c.values.is_empty()) {
        return Err(Error::input(format!("cochain of degree {} does not match the complex", c.degree)));
    }
    Ok(())
}

pub fn coboundary(k: &SimplicialComplex, c: &Cochain) -> Result<Cochain> {
    check_host(k, c)?;
    let d = c.degree + 1;
    let values = if d > k.dim() {
        Vec::new()
    } else {
        k.simplices(d)
            .iter()
            .map(|s| s.facets().into_iter().map(|(sign, f)| sign * c.values[k.index_of(&f).unwrap()]).sum())
            .collect()
    };
    Ok(Cochain::new(d, c.ring, values))
}

pub fn is_cocycle(k: &SimplicialComplex, c: &Cochain) -> Result<bool> {
    Ok(coboundary(k, c)?.is_zero())
}

/// Front-face/back-face cup product on the canonical vertex order.
pub fn cup(k: &SimplicialComplex, a: &Cochain, b: &Cochain) -> Result<Cochain> {
    check_host(k, a)?;
    check_host(k, b)?;
    if a.ring != b.ring {
        return Err(Error::RingMismatch(format!("{} vs {}", a.ring, b.ring)));
    }
    let (i, j) = (a.degree, b.degree);
    let n = i + j;
    let values = if n > k.dim() {
        Vec::new()
    } else {
        k.simplices(n)
            .iter()
            .map(|s| {
                let v = s.vertices();
                let front = Simplex::from_sorted(v[..=i].to_vec());
                let back = Simplex::from_sorted(v[i..].to_vec());
                a.values[k.index_of(&front).unwrap()] * b.values[k.index_of(&back).unwrap()]
            })
            .collect()
    };
    Ok(Cochain::new(n, a.ring, values))
}

/// Bockstein of a mod-p cocycle: lift to integers, take the coboundary,
/// divide by p and reduce.
pub fn bockstein(k: &SimplicialComplex, c: &Cochain) -> Result<Cochain> {
    let p = c.ring.modulus().ok_or_else(|| Error::RingMismatch("the Bockstein needs Z/p coefficients".into()))?;
    bockstein_with_lift(k, c, &Cochain::new(c.degree, Ring::Z, c.values.clone()), p)
}

/// Bockstein computed from an explicit integral lift of `c`.
pub fn bockstein_with_lift(k: &SimplicialComplex, c: &Cochain, lift: &Cochain, p: u64) -> Result<Cochain> {
    if !is_cocycle(k, c)? {
        return Err(Error::NotACocycle);
    }
    if lift.ring != Ring::Z || lift.degree != c.degree || lift.reduce_mod(p)? != *c {
        return Err(Error::input("lift does not reduce to the given cochain"));
    }
    let d = coboundary(k, lift)?;
    let mut values = Vec::with_capacity(d.values.len());
    for x in d.values {
        if x % p as i64 != 0 {
            return Err(Error::invariant("coboundary of a lifted cocycle is not divisible by p"));
        }
        values.push(x / p as i64);
    }
    Ok(Cochain::new(d.degree, c.ring, values))
}

/// Pullback along a simplicial map `f: source -> target`.
pub fn pullback(
    f: &SimplicialMap,
    source: &SimplicialComplex,
    target: &SimplicialComplex,
    c: &Cochain,
) -> Result<Cochain> {
    check_host(target, c)?;
    let values = source
        .simplices(c.degree)
        .iter()
        .map(|s| match f.image(s) {
            Some((t, sign)) if t.dim() == c.degree => {
                sign * c.values[target.index_of(&t).expect("simplicial map images are simplices")]
            }
            _ => 0,
        })
        .collect();
    Ok(Cochain::new(c.degree, c.ring, values))
}

enum Coordinates {
    ModP { p: u64, echelon: Echelon },
    Integral { left: Vec<Vec<BigInt>>, px: Vec<Vec<BigInt>>, keep: Vec<usize>, orders: Vec<BigInt> },
}

/// Explicit cocycle generators of `H^k` together with a procedure that
/// expresses any cocycle in those generators.
pub struct CohomologyBasis {
    pub ring: Ring,
    pub degree: usize,
    pub group: Group,
    pub generators: Vec<Cochain>,
    /// Order of each generator; zero for free generators.
    pub orders: Vec<u64>,
    coboundary: Vec<Vec<(usize, i64)>>,
    coords: Coordinates,
}

impl fmt::Debug for CohomologyBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CohomologyBasis")
            .field("ring", &self.ring)
            .field("degree", &self.degree)
            .field("group", &self.group)
            .field("orders", &self.orders)
            .finish()
    }
}

impl CohomologyBasis {
    /// Coordinates of the class of a cocycle: integers for free generators,
    /// residues for torsion or prime-field generators.
    pub fn coordinates(&self, z: &Cochain) -> Result<Vec<i64>> {
        if z.ring != self.ring || z.degree != self.degree || z.values.len() != self.coboundary.len() {
            return Err(Error::RingMismatch(format!(
                "expected a degree {} cochain over {}, got degree {} over {}",
                self.degree, self.ring, z.degree, z.ring
            )));
        }
        let mut dz = std::collections::BTreeMap::new();
        for (i, col) in self.coboundary.iter().enumerate() {
            if z.values[i] != 0 {
                for &(r, v) in col {
                    *dz.entry(r).or_insert(0i64) += v * z.values[i];
                }
            }
        }
        if dz.values().any(|&x| self.ring.reduce(x) != 0) {
            return Err(Error::NotACocycle);
        }
        match &self.coords {
            Coordinates::ModP { p, echelon } => {
                let (rest, tag) = echelon.reduce(modp::from_dense(&z.values, *p), Vec::new());
                if !rest.is_empty() {
                    return Err(Error::invariant("cocycle not spanned by generators and coboundaries"));
                }
                let mut out = vec![0; self.generators.len()];
                for (g, x) in tag {
                    out[g] = ((*p - x) % *p) as i64;
                }
                Ok(out)
            }
            Coordinates::Integral { left, px, keep, orders } => {
                let y: Vec<BigInt> =
                    left.iter().map(|row| row.iter().zip(&z.values).map(|(a, &b)| a * BigInt::from(b)).sum()).collect();
                keep.iter()
                    .zip(orders)
                    .map(|(&i, d)| {
                        let mut c: BigInt = px[i].iter().zip(&y).map(|(a, b)| a * b).sum();
                        if !d.is_zero() {
                            c = c.mod_floor(d);
                        }
                        c.to_i64().ok_or_else(|| Error::invariant("class coordinate overflow"))
                    })
                    .collect()
            }
        }
    }

    pub fn is_coboundary(&self, z: &Cochain) -> Result<bool> {
        Ok(self.coordinates(z)?.iter().all(|&x| x == 0))
    }

    pub fn same_class(&self, a: &Cochain, b: &Cochain) -> Result<bool> {
        self.is_coboundary(&a.sub(b)?)
    }
}

/// Cohomology in one degree with explicit generators.
pub fn cohomology(cc: &ChainComplex, ring: Ring, degree: usize, limits: &Limits) -> Result<CohomologyBasis> {
    let coboundary = cc.coboundary_columns(degree);
    match ring {
        Ring::Zp(p) => Ok(cohomology_mod_p(cc, p, degree, coboundary)),
        Ring::Z => {
            let biggest = [degree.checked_sub(1).map_or(0, |d| cc.size(d)), cc.size(degree), cc.size(degree + 1)]
                .into_iter()
                .max()
                .unwrap();
            if biggest > limits.max_integral_generator_cells {
                return Err(Error::guard(format!(
                    "integral generators need {biggest} cells in one degree, limit {}",
                    limits.max_integral_generator_cells
                )));
            }
            Ok(cohomology_integral(cc, degree, coboundary))
        }
    }
}

/// All degrees, absolute complex.
pub fn cohomology_of(k: &SimplicialComplex, ring: Ring, limits: &Limits) -> Result<Vec<CohomologyBasis>> {
    let cc = ChainComplex::of(k);
    (0..=cc.top_dim()).map(|d| cohomology(&cc, ring, d, limits)).collect()
}

fn cohomology_mod_p(cc: &ChainComplex, p: u64, degree: usize, coboundary: Vec<Vec<(usize, i64)>>) -> CohomologyBasis {
    let ring = Ring::Zp(p);
    let n = cc.size(degree);
    let kernel = modp::kernel(&cc.columns_mod(&coboundary, p), p);
    let mut echelon = Echelon::new(p);
    if degree > 0 {
        for col in cc.columns_mod(&cc.coboundary_columns(degree - 1), p) {
            echelon.push(col);
        }
    }
    let mut generators = Vec::new();
    for z in kernel {
        let (rest, tag) = echelon.reduce(z.clone(), Vec::new());
        if rest.is_empty() {
            continue;
        }
        let g = generators.len();
        let tag = modp::axpy(&tag, 1, &vec![(g, 1)], p);
        echelon.insert(rest, tag);
        generators.push(Cochain::new(degree, ring, modp::to_dense(&z, n)));
    }
    let group = Group::free(generators.len());
    let orders = vec![p; generators.len()];
    CohomologyBasis { ring, degree, group, generators, orders, coboundary, coords: Coordinates::ModP { p, echelon } }
}

fn dense(cols: &[Vec<(usize, i64)>], nrows: usize) -> Vec<Vec<BigInt>> {
    let mut m = vec![vec![BigInt::zero(); cols.len()]; nrows];
    for (j, col) in cols.iter().enumerate() {
        for &(i, v) in col {
            m[i][j] += v;
        }
    }
    m
}

fn cohomology_integral(cc: &ChainComplex, degree: usize, coboundary: Vec<Vec<(usize, i64)>>) -> CohomologyBasis {
    let n = cc.size(degree);
    let b = dense(&coboundary, cc.size(degree + 1));
    let sb = snf::smith_with_transforms(b, n);
    let rb = sb.diagonal.iter().filter(|d| !d.is_zero()).count();
    let m = n - rb;
    let kmat: Vec<Vec<BigInt>> = (0..n).map(|i| sb.q[i][rb..].to_vec()).collect();
    let left: Vec<Vec<BigInt>> = sb.q_inv[rb..].to_vec();
    let prev = degree.checked_sub(1).map_or(0, |d| cc.size(d));
    let a = if degree > 0 { dense(&cc.coboundary_columns(degree - 1), n) } else { vec![Vec::new(); n] };
    let x = snf::mat_mul(&left, &a, n, prev);
    let sx = snf::smith_with_transforms(x, prev);
    let mut keep = Vec::new();
    let mut orders = Vec::new();
    let mut generators = Vec::new();
    let mut torsion = Vec::new();
    let mut rank = 0;
    let mut entries: Vec<(usize, BigInt)> = (0..m)
        .map(|i| (i, sx.diagonal.get(i).cloned().unwrap_or_else(BigInt::zero)))
        .filter(|(_, d)| !d.is_one())
        .collect();
    // Torsion generators first, in increasing order, then free ones.
    entries.sort_by_key(|(i, d)| (d.is_zero(), d.clone(), *i));
    for (i, d) in entries {
        let col: Vec<BigInt> = (0..m).map(|r| sx.p_inv[r][i].clone()).collect();
        let values: Vec<i64> = (0..n)
            .map(|r| {
                let v: BigInt = kmat[r].iter().zip(&col).map(|(a, b)| a * b).sum();
                let v = if d.is_zero() { v } else { v.mod_floor(&d) };
                v.to_i64().expect("generator entries fit in 64 bits")
            })
            .collect();
        generators.push(Cochain::new(degree, Ring::Z, values));
        if d.is_zero() {
            rank += 1;
        } else {
            torsion.push(to_u64(&d.abs()));
        }
        orders.push(to_u64(&d));
        keep.push(i);
    }
    let orders_big = orders.iter().map(|&o| BigInt::from(o)).collect();
    CohomologyBasis {
        ring: Ring::Z,
        degree,
        group: Group { rank, torsion },
        generators,
        orders,
        coboundary,
        coords: Coordinates::Integral { left, px: sx.p, keep, orders: orders_big },
    }
}
