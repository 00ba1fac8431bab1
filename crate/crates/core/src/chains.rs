//! Integer simplicial chains: boundary, mass, restriction and pushforward.

use std::collections::{BTreeMap, HashMap};

use num::{Signed, Zero};

use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::geometry::{self, AffineFrame};
use crate::linalg;
use crate::rational::{q, to_f64, RationalPoint, Q};

/// A finitely supported map from oriented k-simplices to nonzero integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    dim: usize,
    terms: BTreeMap<Simplex, i64>,
}

impl Chain {
    pub fn zero(dim: usize) -> Self {
        Chain { dim, terms: BTreeMap::new() }
    }

    /// Builds a chain from ordered vertex lists; reordering flips signs.
    pub fn from_terms(dim: usize, terms: &[(Vec<usize>, i64)]) -> Result<Self> {
        let mut c = Chain::zero(dim);
        for (verts, coeff) in terms {
            if verts.len() != dim + 1 {
                return Err(Error::input(format!("{verts:?} is not a {dim}-simplex")));
            }
            let (s, sign) = Simplex::oriented(verts)?;
            c.add_term(s, sign * coeff);
        }
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add_term(&mut self, s: Simplex, coeff: i64) {
        debug_assert_eq!(s.dim(), self.dim);
        if coeff == 0 {
            return;
        }
        let e = self.terms.entry(s.clone()).or_insert(0);
        *e += coeff;
        if *e == 0 {
            self.terms.remove(&s);
        }
    }

    pub fn coeff(&self, s: &Simplex) -> i64 {
        self.terms.get(s).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Simplex, i64)> {
        self.terms.iter().map(|(s, &c)| (s, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Chain) -> Result<Chain> {
        if self.dim != other.dim {
            return Err(Error::input("adding chains of different dimensions"));
        }
        let mut c = self.clone();
        for (s, v) in other.terms() {
            c.add_term(s.clone(), v);
        }
        Ok(c)
    }

    pub fn scale(&self, k: i64) -> Chain {
        let mut c = Chain::zero(self.dim);
        for (s, v) in self.terms() {
            c.add_term(s.clone(), v * k);
        }
        c
    }

    pub fn sub(&self, other: &Chain) -> Result<Chain> {
        self.add(&other.scale(-1))
    }

    /// Alternating-sum boundary; undefined for 0-chains.
    pub fn boundary(&self) -> Result<Chain> {
        if self.dim == 0 {
            return Err(Error::input("boundary of a 0-chain is undefined"));
        }
        let mut c = Chain::zero(self.dim - 1);
        for (s, v) in self.terms() {
            for (sign, f) in s.facets() {
                c.add_term(f, sign * v);
            }
        }
        Ok(c)
    }

    /// Checks every simplex of the support belongs to `k`.
    pub fn check_support(&self, k: &SimplicialComplex) -> Result<()> {
        for s in self.terms.keys() {
            if !k.contains(s) {
                return Err(Error::input(format!("simplex {:?} is not in the complex", s.vertices())));
            }
        }
        Ok(())
    }

    /// `sum |c| vol`, with volumes approximated to 128 significant bits.
    pub fn mass_hp(&self, k: &SimplicialComplex) -> Q {
        self.terms().map(|(s, v)| k.volume(s).approx() * q(v.abs())).sum()
    }

    pub fn mass(&self, k: &SimplicialComplex) -> f64 {
        to_f64(&self.mass_hp(k))
    }

    /// The terms whose simplex satisfies `keep`.
    pub fn restrict(&self, keep: impl Fn(&Simplex) -> bool) -> Chain {
        Chain {
            dim: self.dim,
            terms: self.terms.iter().filter(|(s, _)| keep(s)).map(|(s, &v)| (s.clone(), v)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub matrix: Vec<Vec<Q>>,
    pub translation: Vec<Q>,
}

impl AffineMap {
    pub fn apply(&self, p: &RationalPoint) -> RationalPoint {
        RationalPoint(
            linalg::mat_vec(&self.matrix, p.coords()).into_iter().zip(&self.translation).map(|(x, b)| x + b).collect(),
        )
    }

    pub fn scaling(n: usize, s: Q) -> Self {
        AffineMap {
            matrix: (0..n).map(|i| (0..n).map(|j| if i == j { s.clone() } else { q(0) }).collect()).collect(),
            translation: vec![q(0); n],
        }
    }
}

/// A map that is affine on each maximal simplex of its source complex.
#[derive(Clone, Debug)]
pub struct PLMap {
    pieces: BTreeMap<Simplex, AffineMap>,
}

impl PLMap {
    pub fn new(source: &SimplicialComplex, pieces: BTreeMap<Simplex, AffineMap>) -> Result<Self> {
        let tops = source.maximal_simplices();
        let mut image: HashMap<usize, RationalPoint> = HashMap::new();
        for t in &tops {
            let f = pieces.get(t).ok_or_else(|| Error::input(format!("no affine piece for {:?}", t.vertices())))?;
            for &v in t.vertices() {
                let y = f.apply(source.vertex(v));
                if let Some(prev) = image.get(&v) {
                    if *prev != y {
                        return Err(Error::input(format!("pieces disagree at vertex {v}")));
                    }
                } else {
                    image.insert(v, y);
                }
            }
        }
        Ok(PLMap { pieces })
    }

    pub fn global(source: &SimplicialComplex, f: AffineMap) -> Result<Self> {
        let pieces = source.maximal_simplices().into_iter().map(|t| (t, f.clone())).collect();
        Self::new(source, pieces)
    }

    /// The simplexwise-linear map with the given vertex images.
    pub fn from_vertex_images(source: &SimplicialComplex, images: &[RationalPoint]) -> Result<Self> {
        if images.len() != source.vertex_table().len() {
            return Err(Error::input("one image per vertex is required"));
        }
        let mut pieces = BTreeMap::new();
        for t in source.maximal_simplices() {
            pieces.insert(t.clone(), affine_through(source, &t, images)?);
        }
        Self::new(source, pieces)
    }

    fn image_points(&self, source: &SimplicialComplex, s: &Simplex) -> Result<Vec<RationalPoint>> {
        let (_, f) = self
            .pieces
            .iter()
            .find(|(t, _)| s.is_face_of(t))
            .ok_or_else(|| Error::input(format!("simplex {:?} is outside the map's domain", s.vertices())))?;
        Ok(s.vertices().iter().map(|&v| f.apply(source.vertex(v))).collect())
    }
}

fn affine_through(source: &SimplicialComplex, t: &Simplex, images: &[RationalPoint]) -> Result<AffineMap> {
    let pts = source.points(t);
    let n_in = source.ambient_dim();
    let n_out = images[0].dim();
    let rows: Vec<Vec<Q>> = pts
        .iter()
        .map(|p| {
            let mut r = p.coords().to_vec();
            r.push(q(1));
            r
        })
        .collect();
    let mut matrix = vec![vec![q(0); n_in]; n_out];
    let mut translation = vec![q(0); n_out];
    for o in 0..n_out {
        let rhs: Vec<Q> = t.vertices().iter().map(|&v| images[v].0[o].clone()).collect();
        let x = linalg::solve(&rows, &rhs).ok_or_else(|| Error::Degenerate("simplex vertices are dependent".into()))?;
        matrix[o] = x[..n_in].to_vec();
        translation[o] = x[n_in].clone();
    }
    Ok(AffineMap { matrix, translation })
}

/// Pushes a chain forward along a PL map into `target`. Each image simplex
/// must be a union of target simplices of the same dimension; images of lower
/// rank are dropped.
pub fn pushforward(c: &Chain, source: &SimplicialComplex, f: &PLMap, target: &SimplicialComplex) -> Result<Chain> {
    let k = c.dim();
    let mut out = Chain::zero(k);
    for (s, v) in c.terms() {
        let img = f.image_points(source, s)?;
        let refs: Vec<&RationalPoint> = img.iter().collect();
        if geometry::affine_rank(&refs) < k {
            continue;
        }
        let frame = AffineFrame::from_points(&refs);
        let img_det = geometry::oriented_chart_det(&refs, &frame).expect("image is in its own frame");
        let mut covered = Q::zero();
        for t in target.simplices(k) {
            let tp = target.points(t);
            if !tp.iter().all(|p| geometry::simplex_contains(&refs, p)) {
                continue;
            }
            let det = geometry::oriented_chart_det(&tp, &frame).expect("contained simplex is in the frame");
            covered += det.abs();
            let sign = if det.is_positive() == img_det.is_positive() { 1 } else { -1 };
            out.add_term(t.clone(), sign * v);
        }
        if covered != img_det.abs() {
            return Err(Error::input(format!(
                "image of simplex {:?} is not a union of target simplices",
                s.vertices()
            )));
        }
    }
    Ok(out)
}
