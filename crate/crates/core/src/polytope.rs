//! Convex polytopes in V-representation with exact face lattices, and the
//! barycentric-coning triangulation.

use std::collections::{BTreeSet, HashMap};

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::geometry::{self, AffineFrame};
use crate::limits::Limits;
use crate::linalg;
use crate::lp;
use crate::rational::{dot, q, RationalPoint, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    /// Sorted indices into the polytope's point list.
    pub vertices: Vec<usize>,
    pub dim: usize,
}

#[derive(Clone, Debug)]
pub struct Polytope {
    points: Vec<RationalPoint>,
    frame: AffineFrame,
    local: Vec<Vec<Q>>,
    faces: Vec<Vec<Face>>,
}

/// `{x : normal . x = offset}`; the positive side is `normal . x >= offset`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hyperplane {
    pub normal: Vec<Q>,
    pub offset: Q,
}

impl Hyperplane {
    pub fn eval(&self, p: &RationalPoint) -> Q {
        dot(&self.normal, p.coords()) - &self.offset
    }

    pub fn flipped(&self) -> Hyperplane {
        Hyperplane { normal: self.normal.iter().map(|x| -x.clone()).collect(), offset: -self.offset.clone() }
    }

    /// Canonical representative up to nonzero scaling (sign included).
    pub fn projective_key(&self) -> Vec<Q> {
        let mut v = self.normal.clone();
        v.push(self.offset.clone());
        linalg::projective_normalize(&v)
    }
}

impl Polytope {
    /// Builds a polytope whose points must all be extremal.
    pub fn new(points: Vec<RationalPoint>) -> Result<Self> {
        Self::with_limits(points, &Limits::default())
    }

    pub fn with_limits(points: Vec<RationalPoint>, limits: &Limits) -> Result<Self> {
        let p = Self::build(points, limits)?;
        let extremal: BTreeSet<usize> = p.faces[0].iter().map(|f| f.vertices[0]).collect();
        if let Some(bad) = (0..p.points.len()).find(|i| !extremal.contains(i)) {
            return Err(Error::input(format!("point {bad} {} is not extremal", p.points[bad])));
        }
        Ok(p)
    }

    /// Convex hull of arbitrary points; non-extremal and repeated points are dropped.
    pub fn hull(points: Vec<RationalPoint>) -> Result<Self> {
        Self::hull_with_limits(points, &Limits::default())
    }

    pub fn hull_with_limits(points: Vec<RationalPoint>, limits: &Limits) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let pts: Vec<RationalPoint> = points.into_iter().filter(|p| seen.insert(p.clone())).collect();
        let relaxed = Limits { max_polytope_points: usize::MAX, ..limits.clone() };
        let p = Self::build(pts, &relaxed)?;
        let mut keep: Vec<usize> = p.faces[0].iter().map(|f| f.vertices[0]).collect();
        keep.sort_unstable();
        if keep.len() == p.points.len() && p.points.len() <= limits.max_polytope_points {
            return Ok(p);
        }
        let pts = keep.into_iter().map(|i| p.points[i].clone()).collect();
        Self::with_limits(pts, limits)
    }

    fn build(points: Vec<RationalPoint>, limits: &Limits) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::input("polytope with no points"));
        }
        if points.len() > limits.max_polytope_points {
            return Err(Error::guard(format!(
                "{} points exceed the limit of {}",
                points.len(),
                limits.max_polytope_points
            )));
        }
        let n = points[0].dim();
        if points.iter().any(|p| p.dim() != n) {
            return Err(Error::input("points have mixed dimensions"));
        }
        let mut seen = BTreeSet::new();
        for (i, p) in points.iter().enumerate() {
            if !seen.insert(p) {
                return Err(Error::input(format!("point {i} is repeated")));
            }
        }
        let refs: Vec<&RationalPoint> = points.iter().collect();
        let frame = AffineFrame::from_points(&refs);
        let d = frame.dim();
        if d > limits.max_polytope_dim {
            return Err(Error::guard(format!("dimension {d} exceeds the limit of {}", limits.max_polytope_dim)));
        }
        let local: Vec<Vec<Q>> = points.iter().map(|p| frame.coords(p).expect("point in its own hull")).collect();
        let faces = face_lattice(&local, d);
        Ok(Polytope { points, frame, local, faces })
    }

    pub fn points(&self) -> &[RationalPoint] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.ambient_dim()
    }

    pub fn frame(&self) -> &AffineFrame {
        &self.frame
    }

    pub fn local_coords(&self) -> &[Vec<Q>] {
        &self.local
    }

    /// Faces of dimension `k`, ordered lexicographically by vertex ids.
    pub fn faces(&self, k: usize) -> &[Face] {
        self.faces.get(k).map_or(&[], |v| v.as_slice())
    }

    pub fn all_faces(&self) -> impl Iterator<Item = &Face> {
        self.faces.iter().flatten()
    }

    pub fn face_count(&self) -> Vec<usize> {
        self.faces.iter().map(|v| v.len()).collect()
    }

    pub fn is_simplex(&self) -> bool {
        self.points.len() == self.dim() + 1
    }

    pub fn face_points(&self, f: &Face) -> Vec<&RationalPoint> {
        f.vertices.iter().map(|&i| &self.points[i]).collect()
    }

    /// Mean of the extremal points of a face.
    pub fn face_barycenter(&self, f: &Face) -> RationalPoint {
        RationalPoint::centroid(&self.face_points(f))
    }

    pub fn barycenter(&self) -> RationalPoint {
        RationalPoint::centroid(&self.points.iter().collect::<Vec<_>>())
    }

    /// Facets of a face: the faces of one lower dimension it contains.
    pub fn subfacets(&self, f: &Face) -> Vec<&Face> {
        if f.dim == 0 {
            return Vec::new();
        }
        self.faces(f.dim - 1)
            .iter()
            .filter(|g| g.vertices.iter().all(|v| f.vertices.binary_search(v).is_ok()))
            .collect()
    }

    /// Supporting hyperplanes of the facets inside the affine hull, lifted to
    /// the ambient space perpendicular to the hull, oriented with the
    /// polytope on the positive side. Returns `(hull equations, facet halfspaces)`.
    pub fn hyperplanes(&self) -> (Vec<Hyperplane>, Vec<Hyperplane>) {
        let eqs: Vec<Hyperplane> = self
            .frame
            .normals()
            .into_iter()
            .map(|n| {
                let offset = dot(&n, self.points[0].coords());
                Hyperplane { normal: n, offset }
            })
            .collect();
        let d = self.dim();
        if d == 0 {
            return (eqs, Vec::new());
        }
        let center = self.barycenter();
        let mut halves = Vec::new();
        for f in self.faces(d - 1) {
            let fp = self.face_points(f);
            let dirs: Vec<Vec<Q>> = fp[1..].iter().map(|p| *p - fp[0]).collect();
            let mut w = &center - fp[0];
            // Remove the component of w along the facet directions.
            if !dirs.is_empty() {
                let ffr = AffineFrame::from_points(&fp);
                let rhs: Vec<Q> = ffr.basis().iter().map(|b| dot(b, &w)).collect();
                let gram: Vec<Vec<Q>> =
                    ffr.basis().iter().map(|u| ffr.basis().iter().map(|v| dot(u, v)).collect()).collect();
                let c = linalg::solve(&gram, &rhs).expect("independent facet basis");
                for (ci, b) in c.iter().zip(ffr.basis()) {
                    for (wi, bi) in w.iter_mut().zip(b) {
                        *wi -= ci * bi;
                    }
                }
            }
            let offset = dot(&w, fp[0].coords());
            halves.push(Hyperplane { normal: w, offset });
        }
        (eqs, halves)
    }

    /// The chart used for volumes: the identity for full-dimensional
    /// polytopes, otherwise the polytope's own affine frame.
    pub fn measure_frame(&self) -> AffineFrame {
        if self.dim() == self.ambient_dim() {
            AffineFrame::identity(self.dim())
        } else {
            self.frame.clone()
        }
    }

    /// Exact volume in [`Polytope::measure_frame`].
    pub fn chart_volume(&self) -> Q {
        let frame = self.measure_frame();
        let t = triangulate(self);
        t.simplices
            .iter()
            .map(|s| {
                let pts: Vec<&RationalPoint> = s.iter().map(|&v| &t.vertices[v].point).collect();
                geometry::chart_volume(&pts, &frame).expect("pieces lie in the hull")
            })
            .sum()
    }

    /// Intersection with the closed positive side of `h`; `None` if empty.
    pub fn clip(&self, h: &Hyperplane) -> Result<Option<Polytope>> {
        let s: Vec<Q> = self.points.iter().map(|p| h.eval(p)).collect();
        let mut pts: Vec<RationalPoint> =
            self.points.iter().zip(&s).filter(|(_, v)| !v.is_negative()).map(|(p, _)| p.clone()).collect();
        for e in self.faces(1) {
            let (a, b) = (e.vertices[0], e.vertices[1]);
            if (s[a].is_negative() && s[b].is_positive()) || (s[a].is_positive() && s[b].is_negative()) {
                let t = &s[a] / (&s[a] - &s[b]);
                let d = &self.points[b] - &self.points[a];
                let step: Vec<Q> = d.iter().map(|x| x * &t).collect();
                pts.push(&self.points[a] + &step[..]);
            }
        }
        if pts.is_empty() {
            return Ok(None);
        }
        let relaxed = Limits { max_polytope_points: usize::MAX, ..Limits::default() };
        Polytope::hull_with_limits(pts, &relaxed).map(Some)
    }

    /// Applies `x -> a x + b` to every point.
    pub fn map_affine(&self, a: &[Vec<Q>], b: &[Q]) -> Result<Polytope> {
        let pts = self
            .points
            .iter()
            .map(|p| RationalPoint(linalg::mat_vec(a, p.coords()).into_iter().zip(b).map(|(x, y)| x + y).collect()))
            .collect();
        Polytope::hull(pts)
    }
}

fn hyperplane_through(pts: &[&Vec<Q>], d: usize) -> (Vec<Q>, Q) {
    let diffs: Vec<Vec<Q>> = pts[1..].iter().map(|p| p.iter().zip(pts[0]).map(|(a, b)| a - b).collect()).collect();
    let ns = linalg::nullspace(&diffs, d);
    assert_eq!(ns.len(), 1, "hyperplane through independent points");
    let n = ns.into_iter().next().unwrap();
    let c = dot(&n, pts[0]);
    (n, c)
}

/// Supporting hyperplanes of the hull of full-dimensional points in `R^d`,
/// as `(normal, offset)` with the interior on the positive side.
fn hull_hyperplanes(pts: &[Vec<Q>], d: usize) -> Vec<(Vec<Q>, Q)> {
    if d == 1 {
        let min = pts.iter().map(|p| p[0].clone()).min().unwrap();
        let max = pts.iter().map(|p| p[0].clone()).max().unwrap();
        return vec![(vec![q(1)], min), (vec![q(-1)], -max)];
    }
    let mut init: Vec<usize> = vec![0];
    for i in 1..pts.len() {
        if init.len() == d + 1 {
            break;
        }
        let mut trial: Vec<Vec<Q>> =
            init[1..].iter().map(|&j| pts[j].iter().zip(&pts[init[0]]).map(|(a, b)| a - b).collect()).collect();
        trial.push(pts[i].iter().zip(&pts[init[0]]).map(|(a, b)| a - b).collect());
        if linalg::rank(&trial) == trial.len() {
            init.push(i);
        }
    }
    assert_eq!(init.len(), d + 1, "points are full-dimensional");
    let k = q((d + 1) as i64);
    let interior: Vec<Q> = (0..d).map(|c| init.iter().map(|&i| pts[i][c].clone()).sum::<Q>() / &k).collect();

    struct F {
        verts: Vec<usize>,
        n: Vec<Q>,
        c: Q,
        alive: bool,
    }
    let mut facets: Vec<F> = Vec::new();
    let mut ridges: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    let add = |verts: Vec<usize>, facets: &mut Vec<F>, ridges: &mut HashMap<Vec<usize>, Vec<usize>>| {
        let refs: Vec<&Vec<Q>> = verts.iter().map(|&i| &pts[i]).collect();
        let (mut n, mut c) = hyperplane_through(&refs, d);
        if dot(&n, &interior) < c {
            n = n.into_iter().map(|x| -x).collect();
            c = -c;
        }
        let id = facets.len();
        for skip in 0..verts.len() {
            let mut r = verts.clone();
            r.remove(skip);
            ridges.entry(r).or_default().push(id);
        }
        facets.push(F { verts, n, c, alive: true });
    };
    for skip in 0..=d {
        let mut v = init.clone();
        v.remove(skip);
        v.sort_unstable();
        add(v, &mut facets, &mut ridges);
    }
    for p in 0..pts.len() {
        if init.contains(&p) {
            continue;
        }
        let visible: Vec<usize> =
            (0..facets.len()).filter(|&f| facets[f].alive && dot(&facets[f].n, &pts[p]) < facets[f].c).collect();
        if visible.is_empty() {
            continue;
        }
        let vis: BTreeSet<usize> = visible.iter().copied().collect();
        let mut horizon = Vec::new();
        for &f in &visible {
            for skip in 0..facets[f].verts.len() {
                let mut r = facets[f].verts.clone();
                r.remove(skip);
                let other = ridges[&r].iter().copied().find(|&g| g != f && facets[g].alive);
                if let Some(g) = other {
                    if !vis.contains(&g) {
                        horizon.push(r);
                    }
                }
            }
        }
        for &f in &visible {
            facets[f].alive = false;
            for skip in 0..facets[f].verts.len() {
                let mut r = facets[f].verts.clone();
                r.remove(skip);
                if let Some(list) = ridges.get_mut(&r) {
                    list.retain(|&g| g != f);
                }
            }
        }
        for r in horizon {
            let mut v = r;
            v.push(p);
            v.sort_unstable();
            add(v, &mut facets, &mut ridges);
        }
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for f in facets.into_iter().filter(|f| f.alive) {
        let lead = f.n.iter().find(|x| !x.is_zero()).unwrap().abs();
        let n: Vec<Q> = f.n.iter().map(|x| x / &lead).collect();
        let c = &f.c / &lead;
        if seen.insert((n.clone(), c.clone())) {
            out.push((n, c));
        }
    }
    out
}

fn face_lattice(local: &[Vec<Q>], d: usize) -> Vec<Vec<Face>> {
    let all: Vec<usize> = (0..local.len()).collect();
    if d == 0 {
        return vec![vec![Face { vertices: vec![0], dim: 0 }]];
    }
    let planes = hull_hyperplanes(local, d);
    let facet_sets: Vec<Vec<usize>> =
        planes.iter().map(|(n, c)| (0..local.len()).filter(|&i| dot(n, &local[i]) == *c).collect()).collect();
    let mut sets: BTreeSet<Vec<usize>> = facet_sets.iter().cloned().collect();
    let mut queue: Vec<Vec<usize>> = facet_sets.clone();
    while let Some(a) = queue.pop() {
        for f in &facet_sets {
            let b: Vec<usize> = a.iter().copied().filter(|x| f.binary_search(x).is_ok()).collect();
            if !b.is_empty() && b != a && sets.insert(b.clone()) {
                queue.push(b);
            }
        }
    }
    sets.insert(all);
    let mut faces = vec![Vec::new(); d + 1];
    for s in sets {
        let pts: Vec<RationalPoint> = s.iter().map(|&i| RationalPoint(local[i].clone())).collect();
        let refs: Vec<&RationalPoint> = pts.iter().collect();
        let k = geometry::affine_rank(&refs);
        faces[k].push(Face { vertices: s, dim: k });
    }
    for list in faces.iter_mut() {
        list.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    }
    faces
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Extremal { index: usize },
    Barycenter { face: Vec<usize>, face_dim: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriVertex {
    pub point: RationalPoint,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolytopeTriangulation {
    pub dim: usize,
    pub vertices: Vec<TriVertex>,
    /// Top simplices as sorted indices into `vertices`.
    pub simplices: Vec<Vec<usize>>,
}

impl PolytopeTriangulation {
    pub fn simplex_points(&self, s: &[usize]) -> Vec<&RationalPoint> {
        s.iter().map(|&v| &self.vertices[v].point).collect()
    }

    /// The triangulation as a set of point sets, independent of labels.
    pub fn point_sets(&self) -> BTreeSet<BTreeSet<RationalPoint>> {
        self.simplices.iter().map(|s| s.iter().map(|&v| self.vertices[v].point.clone()).collect()).collect()
    }

    pub fn to_complex(&self) -> Result<SimplicialComplex> {
        SimplicialComplex::from_facets(self.vertices.iter().map(|v| v.point.clone()).collect(), &self.simplices)
    }
}

/// Triangulates every face in (dimension, vertex ids) order: simplex faces
/// stay whole, every other face is coned from its barycenter over the
/// triangulations of its facets.
pub fn triangulate(p: &Polytope) -> PolytopeTriangulation {
    let mut vertices: Vec<TriVertex> = p
        .points
        .iter()
        .enumerate()
        .map(|(i, pt)| TriVertex { point: pt.clone(), provenance: Provenance::Extremal { index: i } })
        .collect();
    let mut memo: HashMap<Vec<usize>, Vec<Vec<usize>>> = HashMap::new();
    for k in 0..=p.dim() {
        for f in p.faces(k) {
            let tri = if f.vertices.len() == k + 1 {
                vec![f.vertices.clone()]
            } else {
                let b = vertices.len();
                vertices.push(TriVertex {
                    point: p.face_barycenter(f),
                    provenance: Provenance::Barycenter { face: f.vertices.clone(), face_dim: k },
                });
                let mut out = Vec::new();
                for g in p.subfacets(f) {
                    for s in &memo[&g.vertices] {
                        let mut s2 = s.clone();
                        s2.push(b);
                        out.push(s2);
                    }
                }
                out
            };
            memo.insert(f.vertices.clone(), tri);
        }
    }
    let top = &p.faces(p.dim())[0];
    let simplices = memo.remove(&top.vertices).unwrap();
    PolytopeTriangulation { dim: p.dim(), vertices, simplices }
}

/// LP test that `conv(a) ∩ conv(b) ⊆ conv(common)`, where `common` are the
/// points shared by both lists and must span a face of each.
fn meet_within_common(a: &[&RationalPoint], b: &[&RationalPoint]) -> bool {
    let common: BTreeSet<&RationalPoint> = a.iter().filter(|p| b.contains(p)).copied().collect();
    if !bboxes_overlap(a, b) {
        return common.is_empty();
    }
    let n = a[0].dim();
    let (na, nb) = (a.len(), b.len());
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for c in 0..n {
        let mut r: Vec<Q> = a.iter().map(|p| p.0[c].clone()).collect();
        r.extend(b.iter().map(|p| -p.0[c].clone()));
        rows.push(r);
        rhs.push(q(0));
    }
    let mut ra = vec![q(1); na];
    ra.extend(vec![q(0); nb]);
    rows.push(ra);
    rhs.push(q(1));
    let mut rb = vec![q(0); na];
    rb.extend(vec![q(1); nb]);
    rows.push(rb);
    rhs.push(q(1));
    let mut obj: Vec<Q> = a.iter().map(|p| if common.contains(p) { q(0) } else { q(1) }).collect();
    obj.extend(vec![q(0); nb]);
    let sol = lp::maximize(&rows, &rhs, &obj);
    match sol.status {
        lp::LpStatus::Infeasible => common.is_empty(),
        lp::LpStatus::Optimal => sol.value.is_zero(),
        lp::LpStatus::Unbounded => false,
    }
}

fn bboxes_overlap(a: &[&RationalPoint], b: &[&RationalPoint]) -> bool {
    (0..a[0].dim()).all(|c| {
        let amin = a.iter().map(|p| &p.0[c]).min().unwrap();
        let amax = a.iter().map(|p| &p.0[c]).max().unwrap();
        let bmin = b.iter().map(|p| &p.0[c]).min().unwrap();
        let bmax = b.iter().map(|p| &p.0[c]).max().unwrap();
        amin <= bmax && bmin <= amax
    })
}

/// Whether two nondegenerate simplices meet in a common face (or not at all).
pub fn simplices_meet_properly(a: &[&RationalPoint], b: &[&RationalPoint]) -> bool {
    meet_within_common(a, b)
}

/// Whether two polytopes intersect in a common face of both (or are disjoint).
pub fn polytopes_meet_in_common_face(p: &Polytope, r: &Polytope) -> bool {
    let common: BTreeSet<&RationalPoint> = p.points.iter().filter(|x| r.points.contains(x)).collect();
    if !common.is_empty() {
        let is_face = |poly: &Polytope| {
            let idx: Vec<usize> = (0..poly.points.len()).filter(|&i| common.contains(&poly.points[i])).collect();
            poly.all_faces().any(|f| f.vertices == idx)
        };
        if !is_face(p) || !is_face(r) {
            return false;
        }
    }
    let a: Vec<&RationalPoint> = p.points.iter().collect();
    let b: Vec<&RationalPoint> = r.points.iter().collect();
    meet_within_common(&a, &b)
}

/// Union of two triangulations of polytopes meeting in a common face.
pub fn glue_triangulations(
    p: &Polytope,
    tp: &PolytopeTriangulation,
    r: &Polytope,
    tr: &PolytopeTriangulation,
) -> Result<SimplicialComplex> {
    if p.ambient_dim() != r.ambient_dim() {
        return Err(Error::input("polytopes live in different ambient spaces"));
    }
    if !polytopes_meet_in_common_face(p, r) {
        return Err(Error::input("polytopes do not intersect in a common face"));
    }
    let mut ids: HashMap<RationalPoint, usize> = HashMap::new();
    let mut pts: Vec<RationalPoint> = Vec::new();
    let mut facets = Vec::new();
    for t in [tp, tr] {
        for s in &t.simplices {
            let f: Vec<usize> = s
                .iter()
                .map(|&v| {
                    let pt = &t.vertices[v].point;
                    *ids.entry(pt.clone()).or_insert_with(|| {
                        pts.push(pt.clone());
                        pts.len() - 1
                    })
                })
                .collect();
            facets.push(f);
        }
    }
    SimplicialComplex::from_facets(pts, &facets)
}
