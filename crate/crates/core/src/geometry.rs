//! Affine frames, exact simplex volumes and point/simplex predicates.

use num::{BigInt, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rational::{dot, q, sqrt_approx, to_f64, RationalPoint, Q};

/// An affine subspace given by an origin and independent direction vectors.
#[derive(Clone, Debug)]
pub struct AffineFrame {
    origin: RationalPoint,
    basis: Vec<Vec<Q>>,
    gram_inv: Vec<Vec<Q>>,
}

impl AffineFrame {
    pub fn new(origin: RationalPoint, basis: Vec<Vec<Q>>) -> Result<Self> {
        let gram: Vec<Vec<Q>> = basis.iter().map(|u| basis.iter().map(|v| dot(u, v)).collect()).collect();
        let gram_inv = if basis.is_empty() {
            Vec::new()
        } else {
            linalg::inverse(&gram).ok_or_else(|| Error::Degenerate("dependent frame directions".into()))?
        };
        Ok(AffineFrame { origin, basis, gram_inv })
    }

    /// The affine hull of `points`, with directions chosen greedily in input order.
    pub fn from_points(points: &[&RationalPoint]) -> Self {
        assert!(!points.is_empty(), "frame of an empty point set");
        let origin = points[0].clone();
        let mut basis: Vec<Vec<Q>> = Vec::new();
        for p in &points[1..] {
            let d = *p - &origin;
            let mut trial = basis.clone();
            trial.push(d.clone());
            if linalg::rank(&trial) == trial.len() {
                basis.push(d);
            }
        }
        AffineFrame::new(origin, basis).expect("greedy basis is independent")
    }

    pub fn identity(n: usize) -> Self {
        let basis = (0..n).map(|i| (0..n).map(|j| if i == j { q(1) } else { q(0) }).collect()).collect();
        AffineFrame::new(RationalPoint::zero(n), basis).expect("identity frame")
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.origin.dim()
    }

    pub fn origin(&self) -> &RationalPoint {
        &self.origin
    }

    pub fn basis(&self) -> &[Vec<Q>] {
        &self.basis
    }

    /// Chart coordinates of `p`, or `None` if `p` is off the subspace.
    pub fn coords(&self, p: &RationalPoint) -> Option<Vec<Q>> {
        let d = p - &self.origin;
        let rhs: Vec<Q> = self.basis.iter().map(|b| dot(b, &d)).collect();
        let c = linalg::mat_vec(&self.gram_inv, &rhs);
        if self.lift(&c) == *p {
            Some(c)
        } else {
            None
        }
    }

    pub fn lift(&self, c: &[Q]) -> RationalPoint {
        let mut out = self.origin.0.clone();
        for (ci, b) in c.iter().zip(&self.basis) {
            if ci.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(b) {
                *o += ci * x;
            }
        }
        RationalPoint(out)
    }

    /// Normals spanning the orthogonal complement of the direction space.
    pub fn normals(&self) -> Vec<Vec<Q>> {
        linalg::nullspace(&self.basis, self.ambient_dim())
    }

    pub fn contains(&self, p: &RationalPoint) -> bool {
        self.coords(p).is_some()
    }
}

/// A nonnegative real stored as its exact square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Volume {
    pub squared: Q,
}

impl Volume {
    pub fn zero() -> Self {
        Volume { squared: Q::zero() }
    }

    /// Rational approximation from below with at least 128 significant bits.
    pub fn approx(&self) -> Q {
        sqrt_approx(&self.squared, 128)
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.approx())
    }

    pub fn is_zero(&self) -> bool {
        self.squared.is_zero()
    }
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::from(1), |a, i| a * BigInt::from(i))
}

/// k-volume of the simplex spanned by `points`: `sqrt(det G) / k!`.
pub fn simplex_volume(points: &[&RationalPoint]) -> Volume {
    let k = points.len() - 1;
    if k == 0 {
        return Volume { squared: q(1) };
    }
    let edges: Vec<Vec<Q>> = points[1..].iter().map(|p| *p - points[0]).collect();
    let gram: Vec<Vec<Q>> = edges.iter().map(|u| edges.iter().map(|v| dot(u, v)).collect()).collect();
    let f = factorial(k);
    let squared = linalg::det(gram) / Q::from_integer(&f * &f);
    Volume { squared }
}

/// Exact volume measured in the coordinates of a chart of matching dimension.
pub fn chart_volume(points: &[&RationalPoint], frame: &AffineFrame) -> Result<Q> {
    let k = points.len() - 1;
    if frame.dim() != k {
        return Err(Error::input(format!("chart of dimension {} for a {k}-simplex", frame.dim())));
    }
    if k == 0 {
        return Ok(q(1));
    }
    let cs: Vec<Vec<Q>> = points
        .iter()
        .map(|p| frame.coords(p).ok_or_else(|| Error::input(format!("point {p} is not in the chart"))))
        .collect::<Result<_>>()?;
    let m: Vec<Vec<Q>> = cs[1..].iter().map(|c| c.iter().zip(&cs[0]).map(|(a, b)| a - b).collect()).collect();
    Ok(linalg::det(m).abs() / Q::from_integer(factorial(k)))
}

/// Signed chart volume, used to compare orientations inside a common chart.
pub fn oriented_chart_det(points: &[&RationalPoint], frame: &AffineFrame) -> Option<Q> {
    let cs: Vec<Vec<Q>> = points.iter().map(|p| frame.coords(p)).collect::<Option<_>>()?;
    let m: Vec<Vec<Q>> = cs[1..].iter().map(|c| c.iter().zip(&cs[0]).map(|(a, b)| a - b).collect()).collect();
    Some(linalg::det(m))
}

pub fn affinely_independent(points: &[&RationalPoint]) -> bool {
    if points.len() <= 1 {
        return true;
    }
    let edges: Vec<Vec<Q>> = points[1..].iter().map(|p| *p - points[0]).collect();
    linalg::rank(&edges) == edges.len()
}

pub fn affine_rank(points: &[&RationalPoint]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let edges: Vec<Vec<Q>> = points[1..].iter().map(|p| *p - points[0]).collect();
    linalg::rank(&edges)
}

/// Barycentric coordinates of `p` with respect to an affinely independent
/// point list, or `None` when `p` is off the affine hull.
pub fn barycentric(points: &[&RationalPoint], p: &RationalPoint) -> Option<Vec<Q>> {
    let frame = AffineFrame::new(points[0].clone(), points[1..].iter().map(|v| *v - points[0]).collect()).ok()?;
    let c = frame.coords(p)?;
    let s: Q = c.iter().sum();
    let mut out = vec![q(1) - s];
    out.extend(c);
    Some(out)
}

pub fn simplex_contains(points: &[&RationalPoint], p: &RationalPoint) -> bool {
    match barycentric(points, p) {
        Some(l) => l.iter().all(|x| !x.is_negative()),
        None => false,
    }
}

/// Exact squared Euclidean distance from `p` to the convex hull of an
/// affinely independent point list.
pub fn dist2_point_simplex(points: &[&RationalPoint], p: &RationalPoint) -> Q {
    let n = points.len();
    let mut best: Option<Q> = None;
    for mask in 1u32..(1 << n) {
        let face: Vec<&RationalPoint> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| points[i]).collect();
        let Some(d) = dist2_to_relative_interior(&face, p) else {
            continue;
        };
        if best.as_ref().is_none_or(|b| d < *b) {
            best = Some(d);
        }
    }
    best.expect("vertex faces always give a candidate")
}

fn dist2_to_relative_interior(face: &[&RationalPoint], p: &RationalPoint) -> Option<Q> {
    let o = face[0];
    let edges: Vec<Vec<Q>> = face[1..].iter().map(|v| *v - o).collect();
    let d = p - o;
    let lam = if edges.is_empty() {
        Vec::new()
    } else {
        let gram: Vec<Vec<Q>> = edges.iter().map(|u| edges.iter().map(|v| dot(u, v)).collect()).collect();
        let rhs: Vec<Q> = edges.iter().map(|u| dot(u, &d)).collect();
        linalg::solve(&gram, &rhs)?
    };
    let s: Q = lam.iter().sum();
    if lam.iter().any(|x| x.is_negative()) || s > q(1) {
        return None;
    }
    let mut proj = o.0.clone();
    for (l, e) in lam.iter().zip(&edges) {
        for (x, y) in proj.iter_mut().zip(e) {
            *x += l * y;
        }
    }
    let diff: Vec<Q> = p.0.iter().zip(&proj).map(|(a, b)| a - b).collect();
    Some(dot(&diff, &diff))
}

/// Floating-point distance from `p` to a simplex, used by sampling audits.
pub fn dist_point_simplex_f64(points: &[Vec<f64>], p: &[f64]) -> f64 {
    closest_point_simplex_f64(points, p).0
}

/// Floating-point distance and nearest point of a simplex.
pub fn closest_point_simplex_f64(points: &[Vec<f64>], p: &[f64]) -> (f64, Vec<f64>) {
    let n = points.len();
    let mut best = (f64::INFINITY, points[0].clone());
    for mask in 1u32..(1 << n) {
        let face: Vec<&Vec<f64>> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| &points[i]).collect();
        if let Some(proj) = project_rel_interior_f64(&face, p) {
            let d = p.iter().zip(&proj).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if d < best.0 {
                best = (d, proj);
            }
        }
    }
    best
}

fn project_rel_interior_f64(face: &[&Vec<f64>], p: &[f64]) -> Option<Vec<f64>> {
    let o = face[0];
    let k = face.len() - 1;
    let edges: Vec<Vec<f64>> = face[1..].iter().map(|v| v.iter().zip(o).map(|(a, b)| a - b).collect()).collect();
    let d: Vec<f64> = p.iter().zip(o).map(|(a, b)| a - b).collect();
    let dotf = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut gram: Vec<Vec<f64>> = edges.iter().map(|u| edges.iter().map(|v| dotf(u, v)).collect()).collect();
    let mut rhs: Vec<f64> = edges.iter().map(|u| dotf(u, &d)).collect();
    for c in 0..k {
        let piv = (c..k).max_by(|&a, &b| gram[a][c].abs().total_cmp(&gram[b][c].abs()))?;
        if gram[piv][c].abs() < 1e-300 {
            return None;
        }
        gram.swap(c, piv);
        rhs.swap(c, piv);
        for i in 0..k {
            if i == c {
                continue;
            }
            let f = gram[i][c] / gram[c][c];
            for j in c..k {
                gram[i][j] -= f * gram[c][j];
            }
            rhs[i] -= f * rhs[c];
        }
    }
    let lam: Vec<f64> = (0..k).map(|i| rhs[i] / gram[i][i]).collect();
    let s: f64 = lam.iter().sum();
    if lam.iter().any(|&x| x < 0.0) || s > 1.0 {
        return None;
    }
    let mut proj = o.clone();
    for (l, e) in lam.iter().zip(&edges) {
        for (x, y) in proj.iter_mut().zip(e) {
            *x += l * y;
        }
    }
    Some(proj)
}

pub fn factorial_u64(k: usize) -> u64 {
    factorial(k).to_u64().expect("small factorial")
}
