//! Numerical models of the deformation constructions: graded neighbourhoods
//! of skeleta, the piecewise linear and mollified radial profiles, the radial
//! squash map, a mollified boundary distance on the standard simplex and the
//! mass contraction of chains under a product-chart squash.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chains::Chain;
use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::geometry::{closest_point_simplex_f64, dist2_point_simplex};
use crate::rational::{from_f64, q, RationalPoint, Q};

/// `∫_{-1}^{1} exp(-1/(1-u²)) du`.
pub const BUMP_NORMALIZATION: f64 = 0.443_993_816_168_079_4;

const QUAD_TOL: f64 = 1e-12;

/// Union over `i <= j` of the open balls of radius `C0^-i δ` around the
/// `i`-simplices of the complex.
#[derive(Clone, Debug)]
pub struct GradedNeighborhood {
    complex: SimplicialComplex,
    j: usize,
    delta: Q,
    c0: Q,
    radii2: Vec<Q>,
}

impl GradedNeighborhood {
    /// Requires `δ > 0` and `C0 > 1` (any `C0 >= 1` when `j = 0`).
    pub fn new(complex: &SimplicialComplex, j: usize, delta: Q, c0: Q) -> Result<Self> {
        if j > 0 && c0 <= Q::one() {
            return Err(Error::input("the grading constant must exceed 1"));
        }
        Self::build(complex, j, delta, c0)
    }

    /// The degenerate grading `C0 = 1`, where all radii coincide.
    pub fn flat(complex: &SimplicialComplex, j: usize, delta: Q) -> Result<Self> {
        Self::build(complex, j, delta, Q::one())
    }

    /// `C0 = 4` and `δ` one eighth of the shortest edge.
    pub fn with_defaults(complex: &SimplicialComplex, j: usize) -> Result<Self> {
        let e = complex.min_edge_length();
        let e = if e.is_finite() { e } else { 1.0 };
        Self::new(complex, j, from_f64(e / 8.0)?, q(4))
    }

    fn build(complex: &SimplicialComplex, j: usize, delta: Q, c0: Q) -> Result<Self> {
        if !delta.is_positive() {
            return Err(Error::input("δ must be positive"));
        }
        if j > complex.dim() {
            return Err(Error::input(format!("skeleton index {j} exceeds the complex dimension {}", complex.dim())));
        }
        let mut radii2 = Vec::with_capacity(j + 1);
        let mut r = delta.clone();
        for _ in 0..=j {
            radii2.push(&r * &r);
            r /= &c0;
        }
        Ok(GradedNeighborhood { complex: complex.clone(), j, delta, c0, radii2 })
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn skeleton_index(&self) -> usize {
        self.j
    }

    pub fn delta(&self) -> &Q {
        &self.delta
    }

    pub fn c0(&self) -> &Q {
        &self.c0
    }

    /// Squared radius around the `i`-simplices.
    pub fn radius2(&self, i: usize) -> &Q {
        &self.radii2[i]
    }

    pub fn radius_f64(&self, i: usize) -> f64 {
        crate::rational::to_f64(&self.radii2[i]).sqrt()
    }

    pub fn contains(&self, p: &RationalPoint) -> bool {
        (0..=self.j).any(|i| {
            self.complex.simplices(i).iter().any(|s| dist2_point_simplex(&self.complex.points(s), p) < self.radii2[i])
        })
    }
}

pub fn v_delta_contains(n: &GradedNeighborhood, p: &RationalPoint) -> bool {
    n.contains(p)
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub requested: usize,
    pub boundary_points: usize,
    pub adversarial_points: usize,
    /// Largest number of balls of one dimension touching a single boundary point.
    pub max_touching: Vec<usize>,
    pub violations: usize,
    pub first_violation: Option<Vec<f64>>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

struct FloatSkeleton {
    simplices: Vec<Vec<Vec<Vec<f64>>>>,
    radii: Vec<f64>,
}

impl FloatSkeleton {
    fn new(n: &GradedNeighborhood) -> Self {
        let simplices = (0..=n.j)
            .map(|i| {
                n.complex
                    .simplices(i)
                    .iter()
                    .map(|s| n.complex.points(s).iter().map(|p| p.to_f64()).collect())
                    .collect()
            })
            .collect();
        let radii = (0..=n.j).map(|i| n.radius_f64(i)).collect();
        FloatSkeleton { simplices, radii }
    }

    /// Per-dimension touching counts, or `None` when `p` lies inside some ball.
    fn classify(&self, p: &[f64], tol: f64) -> Option<Vec<usize>> {
        let mut counts = vec![0; self.radii.len()];
        for (i, list) in self.simplices.iter().enumerate() {
            for s in list {
                let d = closest_point_simplex_f64(s, p).0;
                if d < self.radii[i] - tol {
                    return None;
                }
                if (d - self.radii[i]).abs() <= tol {
                    counts[i] += 1;
                }
            }
        }
        Some(counts)
    }
}

fn random_point_in(s: &[Vec<f64>], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let w: Vec<f64> = (0..s.len()).map(|_| -rng.gen_range(1e-12f64..1.0).ln()).collect();
    let tot: f64 = w.iter().sum();
    let mut p = vec![0.0; s[0].len()];
    for (wi, v) in w.iter().zip(s) {
        for (x, y) in p.iter_mut().zip(v) {
            *x += wi / tot * y;
        }
    }
    p
}

fn random_direction(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 1e-3 && r <= 1.0 {
            return u.into_iter().map(|x| x / r).collect();
        }
    }
}

/// A point on the sphere of radius `r` around `s`, along a random ray.
fn boundary_sample(s: &[Vec<f64>], r: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let q0 = random_point_in(s, rng);
    let u = random_direction(q0.len(), rng);
    let at = |t: f64| -> Vec<f64> { q0.iter().zip(&u).map(|(a, b)| a + t * b).collect() };
    let mut hi = r;
    while closest_point_simplex_f64(s, &at(hi)).0 < r {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if closest_point_simplex_f64(s, &at(mid)).0 < r {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    at(0.5 * (lo + hi))
}

/// Gauss-Newton search for a point at distance `r` from both simplices.
fn pair_boundary_point(a: &[Vec<f64>], b: &[Vec<f64>], r: f64, start: Vec<f64>) -> Option<Vec<f64>> {
    let mut x = start;
    for _ in 0..100 {
        let (da, pa) = closest_point_simplex_f64(a, &x);
        let (db, pb) = closest_point_simplex_f64(b, &x);
        if da < 1e-14 || db < 1e-14 {
            return None;
        }
        let f = [da - r, db - r];
        if f[0].abs().max(f[1].abs()) < 1e-13 * r.max(1e-300) {
            return Some(x);
        }
        let ga: Vec<f64> = x.iter().zip(&pa).map(|(xi, pi)| (xi - pi) / da).collect();
        let gb: Vec<f64> = x.iter().zip(&pb).map(|(xi, pi)| (xi - pi) / db).collect();
        let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(s, t)| s * t).sum::<f64>();
        let (aa, ab, bb) = (dot(&ga, &ga), dot(&ga, &gb), dot(&gb, &gb));
        let det = aa * bb - ab * ab;
        let (la, lb) = if det.abs() > 1e-12 {
            ((bb * f[0] - ab * f[1]) / det, (aa * f[1] - ab * f[0]) / det)
        } else {
            (f[0] / aa, 0.0)
        };
        for ((xi, gai), gbi) in x.iter_mut().zip(&ga).zip(&gb) {
            *xi -= la * gai + lb * gbi;
        }
    }
    None
}

/// Samples points of `∂V_δ` and counts, per dimension, the balls whose
/// boundary passes through each; two or more in one dimension is a violation.
/// Points equidistant from two adjacent simplices of one dimension are tried
/// first, then random rays fill the budget of `samples` boundary points.
pub fn boundary_regularity_audit(n: &GradedNeighborhood, samples: usize, seed: u64) -> AuditReport {
    let fs = FloatSkeleton::new(n);
    let tol = 1e-9 * n.radius_f64(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AuditReport {
        requested: samples,
        boundary_points: 0,
        adversarial_points: 0,
        max_touching: vec![0; n.j + 1],
        violations: 0,
        first_violation: None,
    };
    let record = |p: Vec<f64>, report: &mut AuditReport| -> bool {
        let Some(counts) = fs.classify(&p, tol) else {
            return false;
        };
        for (m, c) in report.max_touching.iter_mut().zip(&counts) {
            *m = (*m).max(*c);
        }
        if counts.iter().any(|&c| c >= 2) {
            report.violations += 1;
            report.first_violation.get_or_insert(p);
        }
        true
    };
    let dims: Vec<usize> = (0..=n.j).filter(|&i| !fs.simplices[i].is_empty()).collect();
    let mut pairs = Vec::new();
    for i in 0..=n.j {
        let list = n.complex.simplices(i);
        for a in 0..list.len() {
            for b in a + 1..list.len() {
                if list[a].vertices().iter().any(|v| list[b].contains_vertex(*v)) {
                    pairs.push((i, a, b));
                }
            }
        }
    }
    if !pairs.is_empty() {
        for t in 0..samples / 2 {
            let (i, a, b) = pairs[t % pairs.len()];
            let (sa, sb) = (&fs.simplices[i][a], &fs.simplices[i][b]);
            let r = fs.radii[i];
            let pa = random_point_in(sa, &mut rng);
            let pb = random_point_in(sb, &mut rng);
            let u = random_direction(pa.len(), &mut rng);
            let start: Vec<f64> = pa.iter().zip(&pb).zip(&u).map(|((x, y), d)| 0.5 * (x + y) + r * d).collect();
            if let Some(p) = pair_boundary_point(sa, sb, r, start) {
                if record(p, &mut report) {
                    report.adversarial_points += 1;
                }
            }
        }
    }
    let mut attempts = 0;
    while report.boundary_points + report.adversarial_points < samples && attempts < 50 * samples {
        attempts += 1;
        let i = dims[rng.gen_range(0..dims.len())];
        let s = &fs.simplices[i][rng.gen_range(0..fs.simplices[i].len())];
        let p = boundary_sample(s, fs.radii[i], &mut rng);
        if record(p, &mut report) {
            report.boundary_points += 1;
        }
    }
    report
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProfileParams {
    pub mu: f64,
    pub delta_a: f64,
    pub eta: f64,
}

impl ProfileParams {
    pub fn new(mu: f64, delta_a: f64, eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::input(format!("μ = {mu} is outside [0, 1]")));
        }
        if !(delta_a > 0.0 && eta > 0.0) {
            return Err(Error::input("δ_a and η must be positive"));
        }
        if 3.0 * delta_a >= eta {
            return Err(Error::input(format!("3δ_a = {} is not below η = {eta}", 3.0 * delta_a)));
        }
        Ok(ProfileParams { mu, delta_a, eta })
    }

    pub fn middle_slope(&self) -> f64 {
        (self.eta - self.delta_a - 2.0 * self.mu * self.delta_a) / (self.eta - 3.0 * self.delta_a)
    }

    pub fn slope_bound(&self) -> f64 {
        self.mu.max(self.eta / (self.eta - 3.0 * self.delta_a))
    }

    /// Half-width of the mollifying kernel.
    pub fn kernel_radius(&self) -> f64 {
        0.5 * self.delta_a
    }

    fn kinks(&self) -> [f64; 2] {
        [2.0 * self.delta_a, self.eta - self.delta_a]
    }
}

/// The piecewise linear profile, continued by `μt` for `t < 0`.
pub fn phi_profile(p: &ProfileParams, t: f64) -> f64 {
    let [a, b] = p.kinks();
    if t <= a {
        p.mu * t
    } else if t <= b {
        p.middle_slope() * (t - a) + 2.0 * p.mu * p.delta_a
    } else {
        t
    }
}

pub fn phi_derivative(p: &ProfileParams, t: f64) -> f64 {
    let [a, b] = p.kinks();
    if t < a {
        p.mu
    } else if t < b {
        p.middle_slope()
    } else {
        1.0
    }
}

/// The normalized bump kernel on `(-1, 1)`.
pub fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp() / BUMP_NORMALIZATION
    }
}

/// Pieces of `[t - ε, t + ε]` between the kinks of φ.
fn window_pieces(p: &ProfileParams, t: f64) -> Vec<(f64, f64)> {
    let eps = p.kernel_radius();
    let tol = 1e-12 * p.eta;
    let mut cuts = vec![t - eps];
    cuts.extend(p.kinks().into_iter().filter(|&k| k > t - eps + tol && k < t + eps - tol));
    cuts.push(t + eps);
    cuts.windows(2).map(|w| (w[0], w[1])).collect()
}

/// φ mollified at scale `δ_a/2`.
pub fn smooth_profile(p: &ProfileParams, t: f64) -> f64 {
    let pieces = window_pieces(p, t);
    if pieces.len() == 1 {
        return phi_profile(p, t);
    }
    let eps = p.kernel_radius();
    pieces
        .iter()
        .map(|&(lo, hi)| {
            quadrature::integrate(|x| phi_profile(p, x) * bump((t - x) / eps) / eps, lo, hi, QUAD_TOL).integral
        })
        .sum()
}

pub fn smooth_profile_derivative(p: &ProfileParams, t: f64) -> f64 {
    let pieces = window_pieces(p, t);
    if pieces.len() == 1 {
        return phi_derivative(p, t);
    }
    let eps = p.kernel_radius();
    pieces
        .iter()
        .map(|&(lo, hi)| {
            let slope = phi_derivative(p, 0.5 * (lo + hi));
            slope * quadrature::integrate(|x| bump((t - x) / eps) / eps, lo, hi, QUAD_TOL).integral
        })
        .sum()
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `ψ(|x|) x/|x|`, with `0 ↦ 0`.
pub fn radial_squash(p: &ProfileParams, x: &[f64]) -> Vec<f64> {
    let r = norm(x);
    if r == 0.0 {
        return vec![0.0; x.len()];
    }
    let s = smooth_profile(p, r) / r;
    x.iter().map(|v| v * s).collect()
}

/// `ψ'(r) x̂x̂ᵀ + ψ(r)/r (I - x̂x̂ᵀ)`.
pub fn radial_squash_jacobian(p: &ProfileParams, x: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let r = norm(x);
    if r == 0.0 {
        return (0..n).map(|i| (0..n).map(|j| if i == j { p.mu } else { 0.0 }).collect()).collect();
    }
    let d = smooth_profile_derivative(p, r);
    let t = smooth_profile(p, r) / r;
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let uu = x[i] * x[j] / (r * r);
                    d * uu + t * (if i == j { 1.0 } else { 0.0 } - uu)
                })
                .collect()
        })
        .collect()
}

/// Largest difference quotient of the radial squash over random pairs in the
/// ball of radius `1.5 η`.
pub fn sampled_lipschitz(p: &ProfileParams, dim: usize, pairs: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: f64 = 0.0;
    for _ in 0..pairs {
        let r = rng.gen_range(0.0..1.5 * p.eta);
        let x: Vec<f64> = random_direction(dim, &mut rng).into_iter().map(|v| v * r).collect();
        let h = rng.gen_range(1e-4..1e-1) * p.eta;
        let y: Vec<f64> = x.iter().zip(random_direction(dim, &mut rng)).map(|(a, b)| a + h * b).collect();
        let fx = radial_squash(p, &x);
        let fy = radial_squash(p, &y);
        let num = norm(&fx.iter().zip(&fy).map(|(a, b)| a - b).collect::<Vec<_>>());
        let den = norm(&x.iter().zip(&y).map(|(a, b)| a - b).collect::<Vec<_>>());
        best = best.max(num / den);
    }
    best
}

/// Mollification scale constant: the kernel radius on the `k`-th shell is
/// `c0 2^-k`, below the shell's inner distance `2^-k-2`.
pub const SHELL_MOLLIFIER_SCALE: f64 = 0.125;

/// Distance to the boundary of the standard simplex `conv{0, e_1, ..., e_m}`,
/// for points inside it.
pub fn dist_to_simplex_boundary(x: &[f64]) -> f64 {
    let m = x.len() as f64;
    let last = (1.0 - x.iter().sum::<f64>()) / m.sqrt();
    x.iter().copied().fold(last, f64::min)
}

fn in_standard_simplex(x: &[f64]) -> bool {
    x.iter().all(|&v| v >= 0.0) && x.iter().sum::<f64>() <= 1.0
}

fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Partition of unity in `s = -log2(d)`: shell 0 covers `d > 1/4`, shell
/// `k >= 1` covers `2^-k-2 < d < 2^-k`.
fn shell_weights(d: f64) -> Vec<(usize, f64)> {
    let s = -d.log2();
    let kmax = s.ceil().max(1.0) as usize + 1;
    let mut w: Vec<(usize, f64)> = Vec::new();
    let b0 = smooth_step(2.0 - s);
    if b0 > 0.0 {
        w.push((0, b0));
    }
    for k in 1..=kmax {
        let b = smooth_step(s - k as f64) * smooth_step(k as f64 + 2.0 - s);
        if b > 0.0 {
            w.push((k, b));
        }
    }
    let tot: f64 = w.iter().map(|(_, b)| b).sum();
    w.into_iter().map(|(k, b)| (k, b / tot)).collect()
}

struct BallRule {
    nodes: Vec<(Vec<f64>, f64)>,
}

impl BallRule {
    /// Tensor Gauss-Legendre nodes on `[-1,1]^m` weighted by the radial bump,
    /// symmetrized under `y -> -y` and normalized to total weight one.
    fn new(m: usize) -> Self {
        let gl = GaussLegendre::new(NonZeroUsize::new(12).unwrap());
        let one: Vec<(f64, f64)> = gl.as_node_weight_pairs().to_vec();
        let mut nodes: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), 1.0)];
        for _ in 0..m {
            nodes = nodes
                .into_iter()
                .flat_map(|(y, w)| {
                    one.iter().map(move |&(x, wx)| {
                        let mut y2 = y.clone();
                        y2.push(x);
                        (y2, w * wx)
                    })
                })
                .collect();
        }
        let mut out = Vec::new();
        for (y, w) in nodes {
            let r2: f64 = y.iter().map(|v| v * v).sum();
            if r2 < 1.0 {
                let k = w * (-1.0 / (1.0 - r2)).exp();
                out.push((y.iter().map(|v| -v).collect(), 0.5 * k));
                out.push((y, 0.5 * k));
            }
        }
        let tot: f64 = out.iter().map(|(_, w)| w).sum();
        BallRule { nodes: out.into_iter().map(|(y, w)| (y, w / tot)).collect() }
    }

    fn mollify(&self, x: &[f64], lambda: f64) -> f64 {
        self.nodes
            .iter()
            .map(|(y, w)| {
                let z: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - lambda * b).collect();
                w * dist_to_simplex_boundary(&z)
            })
            .sum()
    }
}

/// Shell-wise mollified boundary distance on the standard simplex in `R^m`.
pub fn simplex_dist_function(x: &[f64]) -> Result<f64> {
    if x.is_empty() || !in_standard_simplex(x) {
        return Err(Error::input("point is not in the standard simplex"));
    }
    let d = dist_to_simplex_boundary(x);
    if d == 0.0 {
        return Ok(0.0);
    }
    let rule = BallRule::new(x.len());
    Ok(shell_weights(d)
        .into_iter()
        .map(|(k, w)| w * rule.mollify(x, SHELL_MOLLIFIER_SCALE * 0.5f64.powi(k as i32)))
        .sum())
}

/// Signed affine distances to the facet hyperplanes of the standard simplex.
fn facet_distances(x: &[f64]) -> Vec<f64> {
    let m = x.len() as f64;
    let mut out = x.to_vec();
    out.push((1.0 - x.iter().sum::<f64>()) / m.sqrt());
    out
}

/// Points where every mollification window stays in the region on which the
/// boundary distance equals a single affine facet distance; there the
/// function agrees with the distance exactly.
pub fn in_certified_neighborhood(x: &[f64]) -> bool {
    if x.is_empty() || !in_standard_simplex(x) {
        return false;
    }
    let d = dist_to_simplex_boundary(x);
    if d <= 0.0 {
        return false;
    }
    let weights = shell_weights(d);
    let kmin = weights.iter().map(|(k, _)| *k).min().unwrap();
    let lambda = SHELL_MOLLIFIER_SCALE * 0.5f64.powi(kmin as i32);
    let mut a = facet_distances(x);
    a.sort_by(f64::total_cmp);
    a[0] > lambda && a[1] - a[0] > 2.0 * lambda
}

/// Radial squash of the normal coordinates in a flat product chart, with the
/// first `k` coordinates (tangent to the skeleton) scaled by `stretch`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProductSquash {
    pub k: usize,
    pub profile: ProfileParams,
    pub stretch: f64,
}

impl ProductSquash {
    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = p[..self.k].iter().map(|x| x * self.stretch).collect();
        out.extend(radial_squash(&self.profile, &p[self.k..]));
        out
    }

    pub fn jacobian(&self, p: &[f64]) -> Vec<Vec<f64>> {
        let n = p.len();
        let inner = radial_squash_jacobian(&self.profile, &p[self.k..]);
        let mut j = vec![vec![0.0; n]; n];
        for i in 0..self.k {
            j[i][i] = self.stretch;
        }
        for (a, row) in inner.iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                j[self.k + a][self.k + b] = *v;
            }
        }
        j
    }

    /// Distance from the skeleton plane, i.e. the norm of the normal part.
    pub fn normal_radius(&self, p: &[f64]) -> f64 {
        norm(&p[self.k..])
    }
}

/// The Grundmann-Möller rule of degree `2s+1` on the standard `n`-simplex:
/// barycentric nodes and weights summing to one.
pub fn grundmann_moller(n: usize, s: usize) -> Vec<(Vec<f64>, f64)> {
    let d = 2 * s + 1;
    let fact = |k: usize| (1..=k).map(|x| x as f64).product::<f64>();
    let mut out = Vec::new();
    for i in 0..=s {
        let denom = (d + n - 2 * i) as f64;
        let w = if i % 2 == 0 { 1.0 } else { -1.0 } * 2f64.powi(-(2 * s as i32)) * denom.powi(d as i32)
            / (fact(i) * fact(d + n - i))
            * fact(n);
        for beta in compositions(s - i, n + 1) {
            let node: Vec<f64> = beta.iter().map(|&b| (2 * b + 1) as f64 / denom).collect();
            out.push((node, w));
        }
    }
    out
}

/// All vectors of `parts` nonnegative integers summing to `total`.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn gram_det(cols: &[Vec<f64>]) -> f64 {
    let m = cols.len();
    let mut g: Vec<Vec<f64>> =
        (0..m).map(|i| (0..m).map(|j| cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum()).collect()).collect();
    let mut det = 1.0;
    for c in 0..m {
        let piv = (c..m).max_by(|&a, &b| g[a][c].abs().total_cmp(&g[b][c].abs())).unwrap();
        if g[piv][c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            g.swap(piv, c);
            det = -det;
        }
        det *= g[c][c];
        for i in c + 1..m {
            let f = g[i][c] / g[c][c];
            for j in c..m {
                g[i][j] -= f * g[c][j];
            }
        }
    }
    det
}

#[derive(Clone, Debug, Serialize)]
pub struct MassReport {
    pub m: usize,
    pub k: usize,
    pub gamma: f64,
    pub eps_a: f64,
    pub radius: f64,
    /// `‖Z‖(B_r(K^k))`.
    pub mass: f64,
    /// Mass of the pushforward of `Z ∟ B_r(K^k)`.
    pub pushed_mass: f64,
    pub ratio: f64,
    pub bound: f64,
}

/// Calibrated in flat product charts, where the normalized ratio measures 1
/// up to rounding.
pub const MASS_BOUND_CONSTANT: f64 = 1.0 + 1e-9;

/// Integrates the area-formula Jacobian of `phi` over the part of `z` within
/// distance `radius` of the skeleton plane.
pub fn mass_contraction_experiment(
    k: &SimplicialComplex,
    z: &Chain,
    phi: &ProductSquash,
    radius: f64,
) -> Result<MassReport> {
    let n = k.ambient_dim();
    let m = z.dim();
    if phi.k >= n || phi.k > m {
        return Err(Error::input(format!(
            "chart with {} tangent coordinates does not fit an {m}-chain in R^{n}",
            phi.k
        )));
    }
    z.check_support(k)?;
    let rule = grundmann_moller(m, 3);
    let (mut mass, mut pushed) = (0.0, 0.0);
    for (s, c) in z.terms() {
        let pts: Vec<Vec<f64>> = k.points(s).iter().map(|p| p.to_f64()).collect();
        let edges: Vec<Vec<f64>> =
            pts[1..].iter().map(|v| v.iter().zip(&pts[0]).map(|(a, b)| a - b).collect()).collect();
        let base = gram_det(&edges).sqrt();
        let vol = base / (1..=m).map(|x| x as f64).product::<f64>();
        let mult = c.unsigned_abs() as f64;
        for (bary, w) in &rule {
            let x: Vec<f64> = (0..n).map(|i| bary.iter().zip(&pts).map(|(l, p)| l * p[i]).sum::<f64>()).collect();
            if phi.normal_radius(&x) >= radius {
                continue;
            }
            let jac = phi.jacobian(&x);
            let images: Vec<Vec<f64>> = edges
                .iter()
                .map(|e| jac.iter().map(|row| row.iter().zip(e).map(|(a, b)| a * b).sum()).collect())
                .collect();
            let factor = gram_det(&images).max(0.0).sqrt() / base;
            mass += mult * w * vol;
            pushed += mult * w * vol * factor;
        }
    }
    if mass <= 0.0 {
        return Err(Error::input("the chain has no mass near the skeleton"));
    }
    let gamma = phi.profile.mu;
    let eps_a = phi.stretch - 1.0;
    let bound = MASS_BOUND_CONSTANT * phi.stretch.powi(phi.k as i32) * gamma.powi((m - phi.k) as i32);
    Ok(MassReport { m, k: phi.k, gamma, eps_a, radius, mass, pushed_mass: pushed, ratio: pushed / mass, bound })
}

/// A flat test chain: the Kuhn triangulation of `[-a, a]^m` placed on an
/// `m`-plane of `R^(m+1)` that contains the first `k` axes and tilts the
/// remaining directions into the normal space.
pub fn product_chart_chain(m: usize, k: usize, half_width: Q) -> Result<(SimplicialComplex, Chain)> {
    if k > m || m == 0 {
        return Err(Error::input("need 0 <= k <= m and m >= 1"));
    }
    let n = m + 1;
    // Column i of the embedding: e_i for i < k, otherwise e_i + e_{i+1}/2.
    let embed = |u: &[Q]| -> RationalPoint {
        let mut x = vec![q(0); n];
        for (i, ui) in u.iter().enumerate() {
            x[i] += ui;
            if i >= k {
                x[i + 1] += ui / q(2);
            }
        }
        RationalPoint(x)
    };
    let mut vertices = Vec::new();
    let mut index = std::collections::HashMap::new();
    let mut facets = Vec::new();
    let corners: Vec<Vec<i64>> = (0..1u32 << m).map(|b| (0..m).map(|i| ((b >> i) & 1) as i64).collect()).collect();
    for c in &corners {
        index.insert(c.clone(), vertices.len());
        let u: Vec<Q> = c.iter().map(|&b| &half_width * q(2 * b - 1)).collect();
        vertices.push(embed(&u));
    }
    for perm in permutations(m) {
        let mut cur = vec![0i64; m];
        let mut f = vec![index[&cur]];
        for &axis in &perm {
            cur[axis] = 1;
            f.push(index[&cur]);
        }
        facets.push(f);
    }
    let complex = SimplicialComplex::from_facets(vertices, &facets)?;
    let mut z = Chain::zero(m);
    for s in complex.simplices(m) {
        z.add_term(Simplex::from_sorted(s.vertices().to_vec()), 1);
    }
    Ok((complex, z))
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(m - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, m - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Least-squares slope of `log ratio` against `log γ`.
pub fn fit_gamma_exponent(samples: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = samples.iter().map(|(g, r)| (g.ln(), r.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qr;

    fn triangle() -> SimplicialComplex {
        SimplicialComplex::from_facets(
            vec![
                RationalPoint::from_ints(&[0, 0]),
                RationalPoint::from_ints(&[1, 0]),
                RationalPoint::from_ints(&[0, 1]),
            ],
            &[vec![0, 1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn vertices_are_inside_and_far_points_are_not() {
        let n = GradedNeighborhood::new(&triangle(), 1, qr(1, 20), q(4)).unwrap();
        assert!(n.contains(&RationalPoint::from_ints(&[1, 0])));
        assert!(!n.contains(&RationalPoint(vec![qr(-1, 10), qr(1, 2)])));
        assert!(GradedNeighborhood::new(&triangle(), 1, qr(1, 20), q(1)).is_err());
    }

    #[test]
    fn profile_endpoints() {
        let p = ProfileParams::new(0.25, 0.1, 1.0).unwrap();
        assert_eq!(phi_profile(&p, 0.0), 0.0);
        assert_eq!(phi_profile(&p, 2.0 * p.delta_a), 2.0 * p.mu * p.delta_a);
        assert_eq!(phi_profile(&p, 0.95), 0.95);
        assert!(ProfileParams::new(0.5, 0.4, 1.0).is_err());
        assert!(ProfileParams::new(1.5, 0.1, 1.0).is_err());
    }

    #[test]
    fn kernel_is_normalized() {
        let i = quadrature::integrate(bump, -1.0, 1.0, 1e-14).integral;
        assert!((i - 1.0).abs() < 1e-12, "{i}");
    }

    #[test]
    fn grundmann_moller_weights() {
        for n in 1..=3 {
            for s in 0..=3 {
                let w: f64 = grundmann_moller(n, s).iter().map(|(_, w)| w).sum();
                assert!((w - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shell_weights_sum_to_one() {
        for d in [0.5, 0.3, 0.2, 0.1, 1e-3, 1e-7] {
            let s: f64 = shell_weights(d).iter().map(|(_, w)| w).sum();
            assert!((s - 1.0).abs() < 1e-14);
        }
    }
}
