//! Simplices and finite geometric simplicial complexes with exact vertices.

use std::collections::{BTreeSet, HashMap};

use num::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, Volume};
use crate::rational::{RationalPoint, Q};

/// An unoriented simplex: strictly increasing vertex ids.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    pub fn new(mut v: Vec<usize>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::input("empty simplex"));
        }
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Degenerate(format!("repeated vertex in {v:?}")));
        }
        Ok(Simplex(v))
    }

    /// Canonical form of an ordered vertex list plus the sign of the sorting permutation.
    pub fn oriented(v: &[usize]) -> Result<(Self, i64)> {
        let mut inversions = 0usize;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                if v[i] > v[j] {
                    inversions += 1;
                }
            }
        }
        let s = Simplex::new(v.to_vec())?;
        Ok((s, if inversions.is_multiple_of(2) { 1 } else { -1 }))
    }

    pub fn from_sorted(v: Vec<usize>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Simplex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| other.contains_vertex(*v))
    }

    /// Codimension-one faces with their incidence signs `(-1)^i`.
    pub fn facets(&self) -> Vec<(i64, Simplex)> {
        if self.0.len() == 1 {
            return Vec::new();
        }
        (0..self.0.len())
            .map(|i| {
                let mut v = self.0.clone();
                v.remove(i);
                (if i % 2 == 0 { 1 } else { -1 }, Simplex(v))
            })
            .collect()
    }

    /// All nonempty faces, including the simplex itself.
    pub fn all_faces(&self) -> Vec<Simplex> {
        let n = self.0.len();
        (1u64..(1 << n))
            .map(|mask| Simplex((0..n).filter(|i| mask & (1 << i) != 0).map(|i| self.0[i]).collect()))
            .collect()
    }

    pub fn union(&self, other: &Simplex) -> Result<Simplex> {
        let mut v = self.0.clone();
        v.extend(other.0.iter().copied());
        v.sort_unstable();
        v.dedup();
        Simplex::new(v)
    }

    pub fn minus(&self, other: &Simplex) -> Vec<usize> {
        self.0.iter().copied().filter(|v| !other.contains_vertex(*v)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    ambient_dim: usize,
    vertices: Vec<RationalPoint>,
    simplices: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
}

impl SimplicialComplex {
    /// Builds the complex generated by `facets` (all faces are added).
    pub fn from_facets(vertices: Vec<RationalPoint>, facets: &[Vec<usize>]) -> Result<Self> {
        let mut all: BTreeSet<Simplex> = BTreeSet::new();
        for f in facets {
            let s = Simplex::new(f.clone())?;
            for face in s.all_faces() {
                all.insert(face);
            }
        }
        Self::build(vertices, all)
    }

    /// Builds from an explicit simplex list, which must be closed under faces.
    pub fn from_simplices(vertices: Vec<RationalPoint>, simplices: &[Vec<usize>]) -> Result<Self> {
        let mut all: BTreeSet<Simplex> = BTreeSet::new();
        for s in simplices {
            all.insert(Simplex::new(s.clone())?);
        }
        for v in 0..vertices.len() {
            all.insert(Simplex(vec![v]));
        }
        for s in &all {
            for (_, f) in s.facets() {
                if !all.contains(&f) {
                    return Err(Error::input(format!(
                        "face closure violated: {:?} is a face of {:?} but is not listed",
                        f.vertices(),
                        s.vertices()
                    )));
                }
            }
        }
        Self::build(vertices, all)
    }

    /// Realizes an abstract complex on the moment curve in `R^(2d+1)`.
    pub fn abstract_from_facets(n_vertices: usize, facets: &[Vec<usize>]) -> Result<Self> {
        let d = facets.iter().map(|f| f.len().saturating_sub(1)).max().unwrap_or(0);
        let n = 2 * d + 1;
        let vertices = (0..n_vertices)
            .map(|i| {
                let t = BigInt::from(i as i64 + 1);
                RationalPoint((1..=n).map(|e| Q::from_integer(num::pow(t.clone(), e))).collect())
            })
            .collect();
        Self::from_facets(vertices, facets)
    }

    fn build(vertices: Vec<RationalPoint>, all: BTreeSet<Simplex>) -> Result<Self> {
        let ambient_dim = vertices.first().map_or(0, |p| p.dim());
        if vertices.iter().any(|p| p.dim() != ambient_dim) {
            return Err(Error::input("vertices have mixed ambient dimensions"));
        }
        let mut seen = HashMap::new();
        for (i, p) in vertices.iter().enumerate() {
            if let Some(j) = seen.insert(p, i) {
                return Err(Error::input(format!("vertices {j} and {i} coincide at {p}")));
            }
        }
        let mut all = all;
        for v in 0..vertices.len() {
            all.insert(Simplex(vec![v]));
        }
        let top = all.iter().map(|s| s.dim()).max().unwrap_or(0);
        let mut simplices = vec![Vec::new(); top + 1];
        for s in all {
            if let Some(&bad) = s.0.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::input(format!("simplex {:?} references unknown vertex {bad}", s.0)));
            }
            simplices[s.dim()].push(s);
        }
        let index =
            simplices.iter().map(|list| list.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()).collect();
        let k = SimplicialComplex { ambient_dim, vertices, simplices, index };
        for list in &k.simplices {
            for s in list {
                if !geometry::affinely_independent(&k.points(s)) {
                    return Err(Error::Degenerate(format!("simplex {:?} is affinely dependent", s.0)));
                }
            }
        }
        Ok(k)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.simplices.len() - 1
    }

    pub fn vertex(&self, i: usize) -> &RationalPoint {
        &self.vertices[i]
    }

    pub fn vertex_table(&self) -> &[RationalPoint] {
        &self.vertices
    }

    pub fn simplices(&self, d: usize) -> &[Simplex] {
        self.simplices.get(d).map_or(&[], |v| v.as_slice())
    }

    pub fn count(&self, d: usize) -> usize {
        self.simplices(d).len()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.simplices.iter().map(|v| v.len()).collect()
    }

    pub fn num_simplices(&self) -> usize {
        self.simplices.iter().map(|v| v.len()).sum()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector().iter().enumerate().map(|(d, &n)| if d % 2 == 0 { n as i64 } else { -(n as i64) }).sum()
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s.dim())?.get(s).copied()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index_of(s).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter().flatten()
    }

    pub fn points(&self, s: &Simplex) -> Vec<&RationalPoint> {
        s.0.iter().map(|&v| &self.vertices[v]).collect()
    }

    pub fn volume(&self, s: &Simplex) -> Volume {
        geometry::simplex_volume(&self.points(s))
    }

    pub fn barycenter(&self, s: &Simplex) -> RationalPoint {
        RationalPoint::centroid(&self.points(s))
    }

    /// Simplices not properly contained in another simplex.
    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        let mut covered: BTreeSet<&Simplex> = BTreeSet::new();
        let mut out = Vec::new();
        for d in (0..self.simplices.len()).rev() {
            for s in &self.simplices[d] {
                if !covered.contains(s) {
                    out.push(s.clone());
                }
            }
            for s in &self.simplices[d] {
                if d > 0 {
                    for (_, f) in s.facets() {
                        if let Some(i) = self.index_of(&f) {
                            covered.insert(&self.simplices[d - 1][i]);
                        }
                    }
                }
            }
        }
        out.sort_by(|a, b| (a.dim(), a).cmp(&(b.dim(), b)));
        out
    }

    pub fn is_pure(&self) -> bool {
        self.maximal_simplices().iter().all(|s| s.dim() == self.dim())
    }

    pub fn skeleton(&self, k: usize) -> SimplicialComplex {
        let mut out = self.clone();
        out.simplices.truncate(k + 1);
        out.index.truncate(k + 1);
        out
    }

    /// Number of cofaces of codimension one, per simplex of dimension `d`.
    pub fn coface_counts(&self, d: usize) -> Vec<usize> {
        let mut counts = vec![0; self.count(d)];
        for s in self.simplices(d + 1) {
            for (_, f) in s.facets() {
                counts[self.index_of(&f).expect("closed under faces")] += 1;
            }
        }
        counts
    }

    /// Checks that the complex triangulates a closed manifold: pure, every
    /// codimension-one simplex has exactly two cofaces, vertex links connected.
    pub fn check_closed_manifold(&self) -> Result<()> {
        self.check_manifold(false)
    }

    /// As [`SimplicialComplex::check_closed_manifold`], but codimension-one
    /// simplices on the boundary may have a single coface.
    pub fn check_manifold_with_boundary(&self) -> Result<()> {
        self.check_manifold(true)
    }

    fn check_manifold(&self, boundary: bool) -> Result<()> {
        let n = self.dim();
        if n == 0 {
            return Err(Error::input("a 0-dimensional complex is not treated as a manifold"));
        }
        if !self.is_pure() {
            return Err(Error::input("complex is not pure"));
        }
        for (i, c) in self.coface_counts(n - 1).iter().enumerate() {
            if *c != 2 && !(boundary && *c == 1) {
                return Err(Error::input(format!(
                    "codimension-one simplex {:?} has {c} cofaces",
                    self.simplices(n - 1)[i].0
                )));
            }
        }
        if n >= 2 {
            for v in 0..self.vertices.len() {
                if !self.link_connected(v) {
                    return Err(Error::input(format!("link of vertex {v} is disconnected")));
                }
            }
        }
        Ok(())
    }

    fn link_connected(&self, v: usize) -> bool {
        let mut nbrs: Vec<usize> = Vec::new();
        for e in self.simplices(1) {
            if e.0[0] == v {
                nbrs.push(e.0[1]);
            } else if e.0[1] == v {
                nbrs.push(e.0[0]);
            }
        }
        if nbrs.is_empty() {
            return false;
        }
        let pos: HashMap<usize, usize> = nbrs.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let mut parent: Vec<usize> = (0..nbrs.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for t in self.simplices(2) {
            if !t.contains_vertex(v) {
                continue;
            }
            let rest: Vec<usize> = t.0.iter().copied().filter(|&u| u != v).collect();
            let (a, b) = (find(&mut parent, pos[&rest[0]]), find(&mut parent, pos[&rest[1]]));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        (0..nbrs.len()).all(|i| find(&mut parent, i) == root)
    }

    /// Barycentric subdivision. Vertex `i` of the result is the barycenter of
    /// `origin[i]`; simplices are flags ordered by increasing dimension.
    pub fn barycentric_subdivision(&self) -> Subdivision {
        let mut origin = Vec::new();
        let mut id: HashMap<&Simplex, usize> = HashMap::new();
        for list in &self.simplices {
            for s in list {
                id.insert(s, origin.len());
                origin.push(s.clone());
            }
        }
        let vertices: Vec<RationalPoint> = origin.iter().map(|s| self.barycenter(s)).collect();
        let mut chains: HashMap<usize, Vec<Vec<usize>>> = HashMap::new();
        let mut all: Vec<Vec<usize>> = Vec::new();
        for s in origin.iter() {
            let sid = id[s];
            let mut mine = vec![vec![sid]];
            for f in s.all_faces() {
                if f == *s {
                    continue;
                }
                for c in &chains[&id[&f]] {
                    let mut c2 = c.clone();
                    c2.push(sid);
                    mine.push(c2);
                }
            }
            all.extend(mine.iter().cloned());
            chains.insert(sid, mine);
        }
        let set: BTreeSet<Simplex> = all.into_iter().map(Simplex::from_sorted).collect();
        let complex = Self::build(vertices, set).expect("subdivision of a valid complex is valid");
        Subdivision { complex, origin }
    }

    /// The subcomplex of `Bs(K)` made of flags whose members all have
    /// dimension greater than `j`: the simplices disjoint from `Bs(K^j)`.
    pub fn full_subcomplex_complement(&self, j: usize) -> Subdivision {
        let bs = self.barycentric_subdivision();
        bs.restrict_to_origin(|s| s.dim() > j)
    }

    /// Dual `d`-skeleton of a closed `n`-manifold triangulation.
    pub fn dual_skeleton(&self, d: usize) -> Result<Subdivision> {
        self.check_closed_manifold()?;
        let n = self.dim();
        if d > n {
            return Err(Error::input(format!("dual skeleton dimension {d} exceeds {n}")));
        }
        if d == n {
            return Ok(self.barycentric_subdivision());
        }
        Ok(self.full_subcomplex_complement(n - d - 1))
    }

    /// Stellar subdivision of `s` at its barycenter.
    pub fn stellar_subdivide(&self, s: &Simplex) -> Result<SimplicialComplex> {
        if !self.contains(s) {
            return Err(Error::input(format!("{:?} is not a simplex of the complex", s.0)));
        }
        if s.dim() == 0 {
            return Ok(self.clone());
        }
        let mut vertices = self.vertices.clone();
        let b = vertices.len();
        vertices.push(self.barycenter(s));
        let mut facets = Vec::new();
        for m in self.maximal_simplices() {
            if s.is_face_of(&m) {
                for &v in s.vertices() {
                    let mut f: Vec<usize> = m.0.iter().copied().filter(|&u| u != v).collect();
                    f.push(b);
                    facets.push(f);
                }
            } else {
                facets.push(m.0.clone());
            }
        }
        Self::from_facets(vertices, &facets)
    }

    /// Pairwise geometric validity: any two simplices meet in a common face.
    /// Quadratic in the number of maximal simplices.
    pub fn check_geometric_intersections(&self) -> Result<()> {
        let tops = self.maximal_simplices();
        for i in 0..tops.len() {
            for j in i + 1..tops.len() {
                let a = self.points(&tops[i]);
                let b = self.points(&tops[j]);
                if !crate::polytope::simplices_meet_properly(&a, &b) {
                    return Err(Error::input(format!(
                        "simplices {:?} and {:?} intersect improperly",
                        tops[i].0, tops[j].0
                    )));
                }
            }
        }
        Ok(())
    }

    /// The same complex with vertex `v` renamed `perm[v]`, plus the
    /// isomorphism from the original.
    pub fn relabeled(&self, perm: &[usize]) -> Result<(SimplicialComplex, SimplicialMap)> {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
            return Err(Error::input("relabelling is not a permutation of the vertices"));
        }
        let mut vertices = vec![RationalPoint::zero(0); n];
        for (v, &w) in perm.iter().enumerate() {
            vertices[w] = self.vertices[v].clone();
        }
        let set = self.iter().map(|s| Simplex::new(s.0.iter().map(|&v| perm[v]).collect()).unwrap()).collect();
        let k = Self::build(vertices, set)?;
        let f = SimplicialMap::new(self, &k, perm.to_vec())?;
        Ok((k, f))
    }

    /// Smallest edge length, used for default neighbourhood radii.
    pub fn min_edge_length(&self) -> f64 {
        self.simplices(1).iter().map(|e| self.volume(e).to_f64()).fold(f64::INFINITY, f64::min)
    }
}

/// A derived complex with provenance: vertex `i` is the barycenter of `origin[i]`.
#[derive(Clone, Debug)]
pub struct Subdivision {
    pub complex: SimplicialComplex,
    pub origin: Vec<Simplex>,
}

impl Subdivision {
    /// Keeps the simplices all of whose vertices satisfy `keep` on their origin.
    pub fn restrict_to_origin(&self, keep: impl Fn(&Simplex) -> bool) -> Subdivision {
        let mut new_id = vec![usize::MAX; self.origin.len()];
        let mut vertices = Vec::new();
        let mut origin = Vec::new();
        for (i, o) in self.origin.iter().enumerate() {
            if keep(o) {
                new_id[i] = vertices.len();
                vertices.push(self.complex.vertex(i).clone());
                origin.push(o.clone());
            }
        }
        let mut set = BTreeSet::new();
        for s in self.complex.iter() {
            if s.0.iter().all(|&v| new_id[v] != usize::MAX) {
                set.insert(Simplex::from_sorted(s.0.iter().map(|&v| new_id[v]).collect()));
            }
        }
        let complex = SimplicialComplex::build(vertices, set).expect("restriction of a valid complex");
        Subdivision { complex, origin }
    }
}

/// A vertex map between complexes that sends simplices to simplices.
#[derive(Clone, Debug)]
pub struct SimplicialMap {
    pub vertex_map: Vec<usize>,
}

impl SimplicialMap {
    pub fn new(source: &SimplicialComplex, target: &SimplicialComplex, vertex_map: Vec<usize>) -> Result<Self> {
        if vertex_map.len() != source.vertex_table().len() {
            return Err(Error::input("vertex map has the wrong length"));
        }
        for s in source.iter() {
            let mut img: Vec<usize> = s.0.iter().map(|&v| vertex_map[v]).collect();
            img.sort_unstable();
            img.dedup();
            if !target.contains(&Simplex::from_sorted(img.clone())) {
                return Err(Error::input(format!("image {img:?} of {:?} is not a simplex", s.0)));
            }
        }
        Ok(SimplicialMap { vertex_map })
    }

    /// Image of an oriented simplex: `None` when it collapses, otherwise the
    /// canonical target simplex and the orientation sign.
    pub fn image(&self, s: &Simplex) -> Option<(Simplex, i64)> {
        let img: Vec<usize> = s.0.iter().map(|&v| self.vertex_map[v]).collect();
        Simplex::oriented(&img).ok()
    }
}
