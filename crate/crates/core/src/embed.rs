//! Refining a triangulation until given convex polytopes are unions of
//! skeleton simplices.
//!
//! Each polytope is processed in input order. The top simplices meeting it in
//! a piece of full dimension are cut by one common arrangement of hyperplanes
//! (the affine hull equations and facet halfspaces of the polytope), the cells
//! are triangulated by barycentric coning, and every other simplex containing a
//! subdivided face is coned from its barycenter, lowest dimension first.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num::{Signed, Zero};
use serde::Serialize;

use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::geometry::{self, AffineFrame};
use crate::polytope::{simplices_meet_properly, triangulate, Hyperplane, Polytope};
use crate::rational::{dot, RationalPoint, Q};

type PointSimplex = Vec<RationalPoint>;

/// What one pass did for one polytope. Simplices are given by their points so
/// that plans stay meaningful across passes.
#[derive(Clone, Debug, Serialize)]
pub struct RefinementPlan {
    pub polytope: usize,
    pub already_embedded: bool,
    pub hyperplanes: usize,
    pub affected: Vec<PointSimplex>,
    /// Number of cells each affected top was cut into.
    pub splits: Vec<usize>,
    /// `frontier[j]`: the `j`-simplices subdivided by coning.
    pub frontier: Vec<Vec<PointSimplex>>,
}

#[derive(Clone, Debug)]
pub struct Refinement {
    pub complex: SimplicialComplex,
    pub plans: Vec<RefinementPlan>,
}

/// Cuts a full-dimensional polytope by each hyperplane in turn; a cell is
/// replaced by its two sides only when the hyperplane crosses its interior.
pub fn halfspace_split(cell: &Polytope, hyperplanes: &[Hyperplane]) -> Result<Vec<Polytope>> {
    if cell.dim() != cell.ambient_dim() {
        return Err(Error::input("the split cell must be full-dimensional"));
    }
    let mut cells = vec![cell.clone()];
    for h in hyperplanes {
        let mut next = Vec::with_capacity(cells.len());
        for c in cells {
            let (mut pos, mut neg) = (false, false);
            for p in c.points() {
                let s = h.eval(p);
                pos |= s.is_positive();
                neg |= s.is_negative();
            }
            if pos && neg {
                next.extend(c.clip(h)?);
                next.extend(c.clip(&h.flipped())?);
            } else {
                next.push(c);
            }
        }
        cells = next;
    }
    Ok(cells)
}

pub fn refine_to_embed(k: &SimplicialComplex, polys: &[Polytope]) -> Result<Refinement> {
    let mut current = k.clone();
    let mut plans = Vec::new();
    for (i, p) in polys.iter().enumerate() {
        let (next, plan) = embed_one(&current, i, p, "complex")?;
        current = next;
        plans.push(plan);
    }
    Ok(Refinement { complex: current, plans })
}

/// Refinement inside a triangulated PL manifold, possibly with boundary.
pub fn refine_in_polyhedron(k: &SimplicialComplex, polys: &[Polytope]) -> Result<Refinement> {
    k.check_manifold_with_boundary()?;
    let mut current = k.clone();
    let mut plans = Vec::new();
    for (i, p) in polys.iter().enumerate() {
        let (next, plan) = embed_one(&current, i, p, "polyhedron")?;
        current = next;
        plans.push(plan);
    }
    Ok(Refinement { complex: current, plans })
}

struct Membership {
    eqs: Vec<Hyperplane>,
    halves: Vec<Hyperplane>,
}

impl Membership {
    fn new(p: &Polytope) -> Self {
        let (eqs, halves) = p.hyperplanes();
        Membership { eqs, halves }
    }

    fn contains(&self, x: &RationalPoint) -> bool {
        self.eqs.iter().all(|h| h.eval(x).is_zero()) && self.halves.iter().all(|h| !h.eval(x).is_negative())
    }
}

pub fn polytope_contains(p: &Polytope, x: &RationalPoint) -> bool {
    Membership::new(p).contains(x)
}

/// Total chart volume (in the polytope's measure frame) of the simplices of
/// the polytope's dimension that lie inside it.
pub fn embedded_volume(k: &SimplicialComplex, p: &Polytope) -> Q {
    let m = p.dim();
    if m > k.dim() {
        return Q::zero();
    }
    let mem = Membership::new(p);
    let frame = p.measure_frame();
    k.simplices(m)
        .iter()
        .filter(|s| k.points(s).iter().all(|x| mem.contains(x)))
        .map(|s| geometry::chart_volume(&k.points(s), &frame).expect("inside the polytope's hull"))
        .sum()
}

pub fn is_embedded(k: &SimplicialComplex, p: &Polytope) -> bool {
    p.dim() <= k.dim() && embedded_volume(k, p) == p.chart_volume()
}

/// The simplices of dimension `dim P` of `k` contained in `p`.
pub fn embedded_simplices(k: &SimplicialComplex, p: &Polytope) -> Vec<Simplex> {
    let mem = Membership::new(p);
    k.simplices(p.dim()).iter().filter(|s| k.points(s).iter().all(|v| mem.contains(v))).cloned().collect()
}

/// Whether `x` lies in a simplex of dimension `dim P` of `k` contained in `p`.
pub fn in_embedded_union(k: &SimplicialComplex, p: &Polytope, x: &RationalPoint) -> bool {
    embedded_simplices(k, p).iter().any(|s| geometry::simplex_contains(&k.points(s), x))
}

/// The smallest simplex of `k` containing `x`.
pub fn carrier(k: &SimplicialComplex, x: &RationalPoint) -> Option<Simplex> {
    k.maximal_simplices().into_iter().find_map(|t| {
        let l = geometry::barycentric(&k.points(&t), x)?;
        if l.iter().any(|c| c.is_negative()) {
            return None;
        }
        let face = t.vertices().iter().zip(&l).filter(|(_, c)| !c.is_zero()).map(|(&v, _)| v).collect();
        Some(Simplex::from_sorted(face))
    })
}

/// Simplices of `input` disjoint from every affected top that do not survive
/// verbatim in the refinement.
pub fn locality_audit(input: &SimplicialComplex, out: &Refinement) -> Vec<Simplex> {
    let affected: Vec<&PointSimplex> = out.plans.iter().flat_map(|p| &p.affected).collect();
    let present: BTreeSet<BTreeSet<&RationalPoint>> =
        out.complex.iter().map(|s| out.complex.points(s).into_iter().collect()).collect();
    input
        .iter()
        .filter(|s| {
            let pts = input.points(s);
            let far = affected.iter().all(|t| {
                let t: Vec<&RationalPoint> = t.iter().collect();
                !pts.iter().any(|p| t.contains(p)) && simplices_meet_properly(&pts, &t)
            });
            far && !present.contains(&pts.iter().copied().collect())
        })
        .cloned()
        .collect()
}

fn restrict(h: &Hyperplane, frame: &AffineFrame) -> Option<Hyperplane> {
    let normal: Vec<Q> = frame.basis().iter().map(|b| dot(b, &h.normal)).collect();
    if normal.iter().all(Zero::is_zero) {
        return None;
    }
    let offset = &h.offset - dot(&h.normal, frame.origin().coords());
    Some(Hyperplane { normal, offset })
}

/// `p ∩ conv(pts)`, or `None` if empty.
fn intersect(p: &Polytope, pts: &[&RationalPoint]) -> Result<Option<Polytope>> {
    let t = Polytope::new(pts.iter().map(|x| (*x).clone()).collect())?;
    let (eqs, halves) = t.hyperplanes();
    let mut cur = p.clone();
    for h in eqs.iter().flat_map(|h| [h.clone(), h.flipped()]).chain(halves) {
        match cur.clip(&h)? {
            Some(c) => cur = c,
            None => return Ok(None),
        }
    }
    Ok(Some(cur))
}

fn volume_in(p: &Polytope, frame: &AffineFrame) -> Q {
    let t = triangulate(p);
    t.simplices
        .iter()
        .map(|s| geometry::chart_volume(&t.simplex_points(s), frame).expect("piece inside the hull"))
        .sum()
}

fn sorted(mut v: PointSimplex) -> PointSimplex {
    v.sort();
    v
}

fn escape_error(k: &SimplicialComplex, p: &Polytope, index: usize, what: &str) -> Error {
    let tops = k.maximal_simplices();
    let in_k = |x: &RationalPoint| tops.iter().any(|t| geometry::simplex_contains(&k.points(t), x));
    let candidate = p
        .points()
        .iter()
        .cloned()
        .chain(p.all_faces().map(|f| p.face_barycenter(f)))
        .find(|x| !in_k(x))
        .unwrap_or_else(|| p.barycenter());
    Error::input(format!("polytope {index} is not contained in the {what}: point {candidate} lies outside"))
}

fn embed_one(
    k: &SimplicialComplex,
    index: usize,
    p: &Polytope,
    what: &str,
) -> Result<(SimplicialComplex, RefinementPlan)> {
    if p.ambient_dim() != k.ambient_dim() {
        return Err(Error::input(format!(
            "polytope {index} lives in R^{} but the complex in R^{}",
            p.ambient_dim(),
            k.ambient_dim()
        )));
    }
    let m = p.dim();
    if m > k.dim() {
        return Err(Error::input(format!("polytope {index} has dimension {m} above the complex dimension")));
    }
    let mut plan = RefinementPlan {
        polytope: index,
        already_embedded: false,
        hyperplanes: 0,
        affected: Vec::new(),
        splits: Vec::new(),
        frontier: vec![Vec::new(); k.dim() + 1],
    };
    let total = p.chart_volume();
    if embedded_volume(k, p) == total {
        plan.already_embedded = true;
        return Ok((k.clone(), plan));
    }

    // Pieces of full dimension; pieces inside a shared face are counted once.
    let frame = p.measure_frame();
    let mut affected = Vec::new();
    let mut seen_pieces: BTreeSet<PointSimplex> = BTreeSet::new();
    let mut reached = Q::zero();
    for t in k.maximal_simplices() {
        if t.dim() < m {
            continue;
        }
        let Some(piece) = intersect(p, &k.points(&t))? else {
            continue;
        };
        if piece.dim() < m {
            continue;
        }
        if seen_pieces.insert(sorted(piece.points().to_vec())) {
            reached += volume_in(&piece, &frame);
        }
        affected.push(t);
    }
    if reached != total {
        return Err(escape_error(k, p, index, what));
    }

    let (eqs, halves) = p.hyperplanes();
    let mut keys = BTreeSet::new();
    let hyperplanes: Vec<Hyperplane> =
        eqs.into_iter().chain(halves).filter(|h| keys.insert(h.projective_key())).collect();
    plan.hyperplanes = hyperplanes.len();

    let mut subdiv: BTreeMap<Simplex, BTreeSet<PointSimplex>> = BTreeMap::new();
    for t in &affected {
        let pts: Vec<RationalPoint> = k.points(t).into_iter().cloned().collect();
        plan.affected.push(pts.clone());
        let refs: Vec<&RationalPoint> = pts.iter().collect();
        let tf = AffineFrame::from_points(&refs);
        let local = Polytope::new(pts.iter().map(|x| RationalPoint(tf.coords(x).expect("own frame"))).collect())?;
        let hs: Vec<Hyperplane> = hyperplanes.iter().filter_map(|h| restrict(h, &tf)).collect();
        let cells = halfspace_split(&local, &hs)?;
        plan.splits.push(cells.len());
        if cells.len() == 1 {
            continue;
        }
        let mut faces: BTreeSet<PointSimplex> = BTreeSet::new();
        for c in &cells {
            let tri = triangulate(c);
            for s in &tri.simplices {
                let lifted: Vec<RationalPoint> = s.iter().map(|&v| tf.lift(tri.vertices[v].point.coords())).collect();
                for mask in 1u32..(1 << lifted.len()) {
                    let f: PointSimplex =
                        (0..lifted.len()).filter(|i| mask & (1 << i) != 0).map(|i| lifted[i].clone()).collect();
                    faces.insert(sorted(f));
                }
            }
        }
        // Group the faces by the face of `t` whose relative interior they span.
        let mut groups: BTreeMap<Vec<usize>, BTreeSet<PointSimplex>> = BTreeMap::new();
        for f in faces {
            let mut support = BTreeSet::new();
            for x in &f {
                let c = tf.coords(x).expect("inside the top simplex");
                let s: Q = c.iter().sum();
                if s != Q::from_integer(1.into()) {
                    support.insert(0);
                }
                support.extend(c.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, _)| i + 1));
            }
            if support.len() == f.len() {
                let ids: Vec<usize> = support.into_iter().map(|i| t.vertices()[i]).collect();
                groups.entry(ids).or_default().insert(f);
            }
        }
        for (ids, pieces) in groups {
            let face = Simplex::from_sorted(ids);
            if pieces.len() == 1 {
                continue;
            }
            if let Some(prev) = subdiv.get(&face) {
                if *prev != pieces {
                    return Err(Error::invariant(format!(
                        "face {:?} is subdivided inconsistently by its cofaces",
                        face.vertices()
                    )));
                }
            } else {
                subdiv.insert(face, pieces);
            }
        }
    }

    // Cone every simplex that has a subdivided facet, lowest dimension first.
    for d in 1..=k.dim() {
        for s in k.simplices(d) {
            if subdiv.contains_key(s) {
                continue;
            }
            let facets = s.facets();
            if !facets.iter().any(|(_, f)| subdiv.contains_key(f)) {
                continue;
            }
            let b = k.barycenter(s);
            let mut pieces = BTreeSet::new();
            for (_, f) in &facets {
                let parts: Vec<PointSimplex> = match subdiv.get(f) {
                    Some(ps) => ps.iter().cloned().collect(),
                    None => vec![k.points(f).into_iter().cloned().collect()],
                };
                for mut part in parts {
                    part.push(b.clone());
                    pieces.insert(sorted(part));
                }
            }
            plan.frontier[d].push(k.points(s).into_iter().cloned().collect());
            subdiv.insert(s.clone(), pieces);
        }
    }

    let mut table = k.vertex_table().to_vec();
    let mut ids: HashMap<RationalPoint, usize> = table.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
    let mut facets = Vec::new();
    for t in k.maximal_simplices() {
        match subdiv.get(&t) {
            None => facets.push(t.vertices().to_vec()),
            Some(pieces) => {
                for piece in pieces {
                    let f: Vec<usize> = piece
                        .iter()
                        .map(|x| {
                            *ids.entry(x.clone()).or_insert_with(|| {
                                table.push(x.clone());
                                table.len() - 1
                            })
                        })
                        .collect();
                    facets.push(f);
                }
            }
        }
    }
    let out = SimplicialComplex::from_facets(table, &facets)?;
    if embedded_volume(&out, p) != total {
        return Err(Error::invariant(format!("polytope {index} is not a union of simplices after refinement")));
    }
    Ok((out, plan))
}
