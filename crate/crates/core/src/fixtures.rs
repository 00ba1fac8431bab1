//! Standard test complexes. Abstract triangulations are realized on the
//! moment curve, which puts every simplex in general position.

use std::collections::{BTreeMap, BTreeSet};

use crate::complex::{Simplex, SimplicialComplex, SimplicialMap};
use crate::error::{Error, Result};
use crate::rational::RationalPoint;

/// An abstract simplicial complex given by its maximal faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractComplex {
    pub n_vertices: usize,
    pub facets: Vec<Vec<usize>>,
}

impl AbstractComplex {
    pub fn new(n_vertices: usize, facets: Vec<Vec<usize>>) -> Self {
        let mut facets: Vec<Vec<usize>> = facets
            .into_iter()
            .map(|mut f| {
                f.sort_unstable();
                f
            })
            .collect();
        facets.sort();
        facets.dedup();
        AbstractComplex { n_vertices, facets }
    }

    /// Every face, grouped by dimension.
    pub fn faces(&self) -> Vec<BTreeSet<Vec<usize>>> {
        let top = self.facets.iter().map(|f| f.len()).max().unwrap_or(1) - 1;
        let mut out = vec![BTreeSet::new(); top + 1];
        for f in &self.facets {
            let n = f.len();
            for mask in 1u64..(1 << n) {
                let s: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| f[i]).collect();
                out[s.len() - 1].insert(s);
            }
        }
        out
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.faces().iter().map(|s| s.len()).collect()
    }

    pub fn realize(&self) -> Result<SimplicialComplex> {
        SimplicialComplex::abstract_from_facets(self.n_vertices, &self.facets)
    }

    /// Abstract barycentric subdivision. Vertices are the faces in
    /// (dimension, lexicographic) order; these are returned as labels.
    pub fn barycentric(&self) -> (AbstractComplex, Vec<Vec<usize>>) {
        let labels: Vec<Vec<usize>> = self.faces().into_iter().flatten().collect();
        let id: BTreeMap<&Vec<usize>, usize> = labels.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut tops = Vec::new();
        for f in &self.facets {
            for perm in permutations(f.len()) {
                // Flag: prefixes of the permutation, sorted.
                let mut flag = Vec::with_capacity(f.len());
                for k in 1..=f.len() {
                    let mut s: Vec<usize> = perm[..k].iter().map(|&i| f[i]).collect();
                    s.sort_unstable();
                    flag.push(id[&s]);
                }
                tops.push(flag);
            }
        }
        (AbstractComplex::new(labels.len(), tops), labels)
    }

    /// Quotient by the cyclic group generated by a free vertex permutation.
    /// Fails unless the quotient is again a simplicial complex with exactly
    /// `1/order` as many faces in each dimension.
    pub fn quotient(&self, generator: &[usize]) -> Result<(AbstractComplex, Vec<usize>)> {
        if generator.len() != self.n_vertices {
            return Err(Error::input("generator must permute all vertices"));
        }
        let mut orbit = vec![usize::MAX; self.n_vertices];
        let mut order = 0;
        let mut n_orbits = 0;
        for v in 0..self.n_vertices {
            if orbit[v] != usize::MAX {
                continue;
            }
            let mut u = v;
            let mut len = 0;
            loop {
                orbit[u] = n_orbits;
                u = generator[u];
                len += 1;
                if u == v {
                    break;
                }
                if orbit[u] != usize::MAX || len > self.n_vertices {
                    return Err(Error::input("generator is not a permutation"));
                }
            }
            if order != 0 && order != len {
                return Err(Error::input("group action is not free on vertices"));
            }
            order = len;
            n_orbits += 1;
        }
        let faces = self.faces();
        let mut quotient_faces = Vec::with_capacity(faces.len());
        for (d, fs) in faces.iter().enumerate() {
            let mut q = BTreeSet::new();
            for f in fs {
                let mut g: Vec<usize> = f.iter().map(|&v| orbit[v]).collect();
                g.sort_unstable();
                g.dedup();
                if g.len() != d + 1 {
                    return Err(Error::input(format!("face {f:?} has two vertices in one orbit")));
                }
                q.insert(g);
            }
            if q.len() * order != fs.len() {
                return Err(Error::input(format!("quotient identifies distinct orbits of {d}-faces")));
            }
            quotient_faces.push(q);
        }
        let tops = self.facets.iter().map(|f| f.iter().map(|&v| orbit[v]).collect()).collect();
        Ok((AbstractComplex::new(n_orbits, tops), orbit))
    }

    /// Staircase triangulation of the product; vertex `(u, v)` has id
    /// `u * other.n_vertices + v`.
    pub fn product(&self, other: &AbstractComplex) -> AbstractComplex {
        let m = other.n_vertices;
        let mut tops = Vec::new();
        for a in &self.facets {
            for b in &other.facets {
                let (p, q) = (a.len() - 1, b.len() - 1);
                // Monotone lattice paths from (0,0) to (p,q).
                for mask in 0u64..(1 << (p + q)) {
                    if mask.count_ones() as usize != q {
                        continue;
                    }
                    let (mut i, mut j) = (0, 0);
                    let mut s = vec![a[0] * m + b[0]];
                    for step in 0..p + q {
                        if mask >> step & 1 == 1 {
                            j += 1;
                        } else {
                            i += 1;
                        }
                        s.push(a[i] * m + b[j]);
                    }
                    tops.push(s);
                }
            }
        }
        AbstractComplex::new(self.n_vertices * m, tops)
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

fn pts(coords: &[&[i64]]) -> Vec<RationalPoint> {
    coords.iter().map(|c| RationalPoint::from_ints(c)).collect()
}

/// Boundary of a triangle in the plane.
pub fn circle() -> SimplicialComplex {
    SimplicialComplex::from_facets(pts(&[&[0, 0], &[1, 0], &[0, 1]]), &[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
}

/// Boundary of the standard tetrahedron.
pub fn sphere2() -> SimplicialComplex {
    SimplicialComplex::from_facets(
        pts(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]),
        &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
    )
    .unwrap()
}

/// Boundary of the standard 4-simplex.
pub fn sphere3() -> SimplicialComplex {
    let p = pts(&[&[0, 0, 0, 0], &[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
    let facets: Vec<Vec<usize>> = (0..5).map(|skip| (0..5).filter(|&v| v != skip).collect()).collect();
    SimplicialComplex::from_facets(p, &facets).unwrap()
}

pub fn torus_abstract() -> AbstractComplex {
    let mut f = Vec::new();
    for i in 0..7 {
        f.push(vec![i, (i + 1) % 7, (i + 3) % 7]);
        f.push(vec![i, (i + 2) % 7, (i + 3) % 7]);
    }
    AbstractComplex::new(7, f)
}

/// The 7-vertex torus.
pub fn torus() -> SimplicialComplex {
    torus_abstract().realize().unwrap()
}

pub fn rp2_abstract() -> AbstractComplex {
    let f =
        [[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 5, 1], [1, 2, 4], [2, 3, 5], [3, 4, 1], [4, 5, 2], [5, 1, 3]];
    AbstractComplex::new(6, f.iter().map(|t| t.to_vec()).collect())
}

/// The 6-vertex real projective plane.
pub fn rp2() -> SimplicialComplex {
    rp2_abstract().realize().unwrap()
}

/// Klein bottle from an `n x n` grid with one flipped identification.
pub fn klein_abstract(n: usize) -> AbstractComplex {
    let id = |x: usize, y: usize| -> usize {
        let (x, y) = if x == n { (0, (n - y % n) % n) } else { (x, y % n) };
        x * n + y
    };
    let mut f = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let (a, b, c, d) = (id(x, y), id(x + 1, y), id(x, y + 1), id(x + 1, y + 1));
            f.push(vec![a, b, d]);
            f.push(vec![a, c, d]);
        }
    }
    AbstractComplex::new(n * n, f)
}

pub fn klein_bottle() -> SimplicialComplex {
    klein_abstract(3).realize().unwrap()
}

/// Join of two hexagons, a 3-sphere: `a_i = i`, `b_j = 6 + j`.
pub fn hexagon_join() -> AbstractComplex {
    let mut f = Vec::new();
    for i in 0..6 {
        for j in 0..6 {
            f.push(vec![i, (i + 1) % 6, 6 + j, 6 + (j + 1) % 6]);
        }
    }
    AbstractComplex::new(12, f)
}

/// Lens space `L(3, q)` as the quotient of the subdivided hexagon join by
/// the rotation `a_i -> a_(i+2)`, `b_j -> b_(j+2q)`.
pub fn lens_abstract(q: usize) -> Result<AbstractComplex> {
    let join = hexagon_join();
    let (bs, labels) = join.barycentric();
    let rot = |v: usize| if v < 6 { (v + 2) % 6 } else { 6 + (v - 6 + 2 * q) % 6 };
    let index: BTreeMap<&Vec<usize>, usize> = labels.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let generator: Vec<usize> = labels
        .iter()
        .map(|s| {
            let mut t: Vec<usize> = s.iter().map(|&v| rot(v)).collect();
            t.sort_unstable();
            index[&t]
        })
        .collect();
    Ok(bs.quotient(&generator)?.0)
}

pub fn lens_space_3_1() -> SimplicialComplex {
    lens_abstract(1).unwrap().realize().unwrap()
}

/// Real projective space of dimension `n` as the antipodal quotient of the
/// subdivided boundary of the (n+1)-simplex.
pub fn rp_abstract(n: usize) -> Result<AbstractComplex> {
    let verts = n + 2;
    let facets: Vec<Vec<usize>> = (0..verts).map(|skip| (0..verts).filter(|&v| v != skip).collect()).collect();
    let sphere = AbstractComplex::new(verts, facets);
    let (bs, labels) = sphere.barycentric();
    let index: BTreeMap<&Vec<usize>, usize> = labels.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let generator: Vec<usize> = labels
        .iter()
        .map(|s| {
            let c: Vec<usize> = (0..verts).filter(|v| !s.contains(v)).collect();
            index[&c]
        })
        .collect();
    Ok(bs.quotient(&generator)?.0)
}

pub fn rp4() -> SimplicialComplex {
    rp_abstract(4).unwrap().realize().unwrap()
}

/// `RP^2 x RP^2` with its two coordinate projections onto `rp2()`.
pub fn rp2_squared() -> (SimplicialComplex, SimplicialMap, SimplicialMap) {
    let a = rp2_abstract();
    let prod = a.product(&a);
    let k = prod.realize().unwrap();
    let base = rp2();
    let n = a.n_vertices;
    let p1 = SimplicialMap::new(&k, &base, (0..n * n).map(|v| v / n).collect()).unwrap();
    let p2 = SimplicialMap::new(&k, &base, (0..n * n).map(|v| v % n).collect()).unwrap();
    (k, p1, p2)
}

/// A regular-ish hexagon coned from the origin; vertex 0 is the apex.
pub fn hexagon_disk() -> SimplicialComplex {
    let p = pts(&[&[0, 0], &[2, 0], &[1, 2], &[-1, 2], &[-2, 0], &[-1, -2], &[1, -2]]);
    let f: Vec<Vec<usize>> = (1..=6).map(|i| vec![0, i, i % 6 + 1]).collect();
    SimplicialComplex::from_facets(p, &f).unwrap()
}

/// The rim of `hexagon_disk()`.
pub fn hexagon_rim() -> SimplicialComplex {
    let p = pts(&[&[2, 0], &[1, 2], &[-1, 2], &[-2, 0], &[-1, -2], &[1, -2]]);
    let f: Vec<Vec<usize>> = (0..6).map(|i| vec![i, (i + 1) % 6]).collect();
    SimplicialComplex::from_facets(p, &f).unwrap()
}

/// Square annulus between `[-1,1]^2` and `[-2,2]^2`; vertices 0..4 are
/// the inner corners counterclockwise, 4..8 the outer ones.
pub fn annulus() -> SimplicialComplex {
    let p = pts(&[&[-1, -1], &[1, -1], &[1, 1], &[-1, 1], &[-2, -2], &[2, -2], &[2, 2], &[-2, 2]]);
    let mut f = Vec::new();
    for i in 0..4 {
        let j = (i + 1) % 4;
        f.push(vec![i, j, 4 + i]);
        f.push(vec![j, 4 + i, 4 + j]);
    }
    SimplicialComplex::from_facets(p, &f).unwrap()
}

/// Unit square split along the diagonal from `(0,0)` to `(1,1)`.
pub fn unit_square() -> SimplicialComplex {
    SimplicialComplex::from_facets(pts(&[&[0, 0], &[1, 0], &[1, 1], &[0, 1]]), &[vec![0, 1, 2], vec![0, 2, 3]]).unwrap()
}

/// Names accepted by [`by_name`].
pub const NAMES: &[&str] =
    &["circle", "s2", "s3", "torus", "rp2", "klein", "l31", "rp4", "rp2xrp2", "disk", "annulus", "square"];

pub fn by_name(name: &str) -> Result<SimplicialComplex> {
    Ok(match name {
        "circle" => circle(),
        "s2" => sphere2(),
        "s3" => sphere3(),
        "torus" => torus(),
        "rp2" => rp2(),
        "klein" => klein_bottle(),
        "l31" => lens_space_3_1(),
        "rp4" => rp4(),
        "rp2xrp2" => rp2_squared().0,
        "disk" => hexagon_disk(),
        "annulus" => annulus(),
        "square" => unit_square(),
        _ => return Err(Error::input(format!("unknown fixture {name:?}; known: {}", NAMES.join(", ")))),
    })
}

/// Shorthand for a canonical simplex from distinct vertex ids.
pub fn simplex(v: &[usize]) -> Simplex {
    Simplex::new(v.to_vec()).expect("distinct vertices")
}
