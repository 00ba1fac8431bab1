//! Acceptance suite: one line per criterion, nonzero exit on any failure.
//!
//! Run with `cargo test -p polytopo-cli --test acceptance`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use polytopo::chains::Chain;
use polytopo::cohomology::{
    bockstein, cohomology_of, cup, homology_of, pullback, Cochain, CohomologyBasis, Group, Ring,
};
use polytopo::complex::SimplicialComplex;
use polytopo::deform::{
    fit_gamma_exponent, mass_contraction_experiment, product_chart_chain, smooth_profile, ProductSquash, ProfileParams,
};
use polytopo::embed::{embedded_simplices, is_embedded, locality_audit, polytope_contains, refine_to_embed};
use polytopo::fixtures;
use polytopo::flat_norm::{crossover_bisection, flat_norm_bruteforce, flat_norm_lp, flat_norm_lp_with, LpOptions};
use polytopo::geometry;
use polytopo::limits::Limits;
use polytopo::linalg;
use polytopo::polytope::{glue_triangulations, polytopes_meet_in_common_face, triangulate, Polytope};
use polytopo::rational::{q, qr, to_f64, RationalPoint, Q};
use polytopo::steenrod::algebra::{admissible_mod2, cartan_expand, is_admissible, Op, RewriteOrder, SteenrodElement};
use polytopo::steenrod::sq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if let false = $cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

// ---------------------------------------------------------------- chains

fn random_chain(k: &SimplicialComplex, dim: usize, rng: &mut ChaCha8Rng, max: i64) -> Chain {
    let mut c = Chain::zero(dim);
    for s in k.simplices(dim) {
        if rng.gen_bool(0.5) {
            c.add_term(s.clone(), rng.gen_range(-max..=max));
        }
    }
    c
}

fn randomized_refinement(k: &SimplicialComplex, rng: &mut ChaCha8Rng) -> SimplicialComplex {
    let mut k = if rng.gen_bool(0.5) { k.barycentric_subdivision().complex } else { k.clone() };
    for _ in 0..rng.gen_range(1..=6) {
        let d = rng.gen_range(1..=k.dim());
        let s = k.simplices(d)[rng.gen_range(0..k.count(d))].clone();
        k = k.stellar_subdivide(&s).unwrap();
    }
    k
}

fn criterion_1() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let bases = [
        fixtures::unit_square(),
        fixtures::hexagon_disk(),
        fixtures::annulus(),
        fixtures::sphere2(),
        fixtures::torus(),
    ];
    let mut chains = 0;
    for k in &bases {
        for _ in 0..10 {
            let r = randomized_refinement(k, &mut rng);
            for _ in 0..20 {
                let d = rng.gen_range(2..=r.dim());
                let c = random_chain(&r, d, &mut rng, 9);
                let dd = ok(ok(c.boundary())?.boundary())?;
                ensure!(dd.is_zero(), "nonzero boundary of boundary on a refinement with f = {:?}", r.f_vector());
                chains += 1;
            }
        }
    }
    Ok(format!("{chains} chains"))
}

// -------------------------------------------------------------- polytopes

fn cube(d: usize) -> Polytope {
    let pts =
        (0..1i64 << d).map(|m| RationalPoint::from_ints(&(0..d).map(|i| (m >> i) & 1).collect::<Vec<_>>())).collect();
    Polytope::new(pts).unwrap()
}

fn random_polytope(rng: &mut ChaCha8Rng, d: usize, lifted: bool) -> Polytope {
    loop {
        let n = rng.gen_range(d + 1..=12);
        let pts: Vec<RationalPoint> = (0..n)
            .map(|_| RationalPoint((0..d).map(|_| qr(rng.gen_range(0..=8), rng.gen_range(1..=2))).collect()))
            .collect();
        let Ok(p) = Polytope::hull(pts) else { continue };
        if p.dim() != d || p.points().len() > 12 {
            continue;
        }
        if !lifted {
            return p;
        }
        let mut a: Vec<Vec<Q>> = (0..d).map(|i| (0..d).map(|j| q((i == j) as i64)).collect()).collect();
        a.push((0..d).map(|j| q(j as i64 + 1)).collect());
        let b: Vec<Q> = (0..=d).map(|i| qr(i as i64, 3)).collect();
        return p.map_affine(&a, &b).unwrap();
    }
}

/// Pulling triangulation from the smallest vertex of each face.
fn pulling(
    p: &Polytope,
    face: &[usize],
    dim: usize,
    memo: &mut HashMap<Vec<usize>, Vec<Vec<usize>>>,
) -> Vec<Vec<usize>> {
    if let Some(t) = memo.get(face) {
        return t.clone();
    }
    let out = if face.len() == dim + 1 {
        vec![face.to_vec()]
    } else {
        let v = face[0];
        let mut out = Vec::new();
        for g in p.faces(dim - 1) {
            if g.vertices.iter().all(|x| face.contains(x)) && !g.vertices.contains(&v) {
                for mut s in pulling(p, &g.vertices, dim - 1, memo) {
                    s.push(v);
                    s.sort_unstable();
                    out.push(s);
                }
            }
        }
        out
    };
    memo.insert(face.to_vec(), out.clone());
    out
}

fn pulling_volume(p: &Polytope) -> Q {
    let all: Vec<usize> = (0..p.points().len()).collect();
    let frame = p.measure_frame();
    pulling(p, &all, p.dim(), &mut HashMap::new())
        .iter()
        .map(|s| {
            let pts: Vec<&RationalPoint> = s.iter().map(|&i| &p.points()[i]).collect();
            geometry::chart_volume(&pts, &frame).unwrap()
        })
        .sum()
}

fn criterion_2() -> Check {
    let simplex = Polytope::new(vec![
        RationalPoint::from_ints(&[0, 0, 0]),
        RationalPoint::from_ints(&[1, 0, 0]),
        RationalPoint::from_ints(&[0, 1, 0]),
        RationalPoint::from_ints(&[0, 0, 1]),
    ])
    .unwrap();
    let counts = [
        triangulate(&simplex).simplices.len(),
        triangulate(&cube(2)).simplices.len(),
        triangulate(&cube(3)).simplices.len(),
    ];
    ensure!(counts == [1, 4, 24], "piece counts {counts:?}");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..50 {
        let p = random_polytope(&mut rng, 1 + i % 4, i % 5 == 0);
        let t = triangulate(&p);
        let frame = p.measure_frame();
        let mut total = q(0);
        for s in &t.simplices {
            let pts = t.simplex_points(s);
            ensure!(pts.iter().all(|x| polytope_contains(&p, x)), "piece outside polytope {i}");
            total += ok(geometry::chart_volume(&pts, &frame))?;
        }
        ensure!(total == pulling_volume(&p), "volume mismatch on polytope {i}");
        ok(ok(t.to_complex())?.check_geometric_intersections())?;
    }
    Ok("counts 1/4/24, 50 exact partitions".into())
}

fn random_affine(rng: &mut ChaCha8Rng, n_out: usize, n_in: usize) -> (Vec<Vec<Q>>, Vec<Q>) {
    loop {
        let a: Vec<Vec<Q>> =
            (0..n_out).map(|_| (0..n_in).map(|_| qr(rng.gen_range(-3..=3), rng.gen_range(1..=2))).collect()).collect();
        if linalg::rank(&a) == n_in {
            let b = (0..n_out).map(|_| qr(rng.gen_range(-5..=5), rng.gen_range(1..=3))).collect();
            return (a, b);
        }
    }
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..10 {
        let d = 1 + i % 3;
        let p = random_polytope(&mut rng, d, false);
        let sets = triangulate(&p).point_sets();
        for j in 0..100 {
            let n_out = d + rng.gen_range(0..=1);
            let (a, b) = random_affine(&mut rng, n_out, d);
            let apply = |x: &RationalPoint| {
                RationalPoint(linalg::mat_vec(&a, x.coords()).into_iter().zip(&b).map(|(u, v)| u + v).collect())
            };
            let mapped: BTreeSet<BTreeSet<RationalPoint>> =
                sets.iter().map(|s| s.iter().map(apply).collect()).collect();
            let image = ok(p.map_affine(&a, &b))?;
            ensure!(triangulate(&image).point_sets() == mapped, "polytope {i}, map {j}");
        }
    }
    Ok("1000 polytope/map pairs".into())
}

fn neighbour(p: &Polytope, rng: &mut ChaCha8Rng) -> Polytope {
    let d = p.dim();
    let (_, halves) = p.hyperplanes();
    let i = rng.gen_range(0..halves.len());
    let facet = &p.faces(d - 1)[i];
    loop {
        let mut pts: Vec<RationalPoint> = facet.vertices.iter().map(|&v| p.points()[v].clone()).collect();
        let target = pts.len() + rng.gen_range(1..=3);
        while pts.len() < target {
            let x = RationalPoint((0..d).map(|_| qr(rng.gen_range(-8..=16), 2)).collect());
            if halves[i].eval(&x) < q(0) {
                pts.push(x);
            }
        }
        if let Ok(r) = Polytope::hull(pts) {
            if r.dim() == d {
                return r;
            }
        }
    }
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..50 {
        let p = random_polytope(&mut rng, 2 + i % 2, false);
        let r = neighbour(&p, &mut rng);
        ensure!(polytopes_meet_in_common_face(&p, &r), "pair {i} not face-sharing");
        let k = ok(glue_triangulations(&p, &triangulate(&p), &r, &triangulate(&r)))?;
        ok(k.check_geometric_intersections()).map_err(|e| format!("pair {i}: {e}"))?;
    }
    Ok("50 glued pairs".into())
}

// --------------------------------------------------------------- embedding

fn grid(n: i64) -> SimplicialComplex {
    let mut pts = Vec::new();
    for y in 0..=n {
        for x in 0..=n {
            pts.push(RationalPoint::from_ints(&[x, y]));
        }
    }
    let id = |x: i64, y: i64| (y * (n + 1) + x) as usize;
    let mut f = Vec::new();
    for y in 0..n {
        for x in 0..n {
            f.push(vec![id(x, y), id(x + 1, y), id(x + 1, y + 1)]);
            f.push(vec![id(x, y), id(x + 1, y + 1), id(x, y + 1)]);
        }
    }
    SimplicialComplex::from_facets(pts, &f).unwrap()
}

fn embed_instance(rng: &mut ChaCha8Rng, triangle: bool) -> Polytope {
    let k = if triangle { 3 } else { 2 };
    loop {
        let pts: Vec<RationalPoint> =
            (0..k).map(|_| RationalPoint(vec![qr(rng.gen_range(0..=24), 8), qr(rng.gen_range(0..=24), 8)])).collect();
        if let Ok(p) = Polytope::new(pts) {
            if p.dim() == k - 1 {
                return p;
            }
        }
    }
}

fn samples(p: &Polytope, rng: &mut ChaCha8Rng, count: usize) -> Vec<RationalPoint> {
    let f = p.frame();
    let local = p.local_coords();
    (0..count)
        .map(|_| {
            let w: Vec<i64> = (0..local.len()).map(|_| rng.gen_range(-2..=10)).collect();
            let tot: i64 = w.iter().sum::<i64>().max(1);
            let mut c = vec![q(0); f.dim()];
            for (wi, l) in w.iter().zip(local) {
                for (ci, li) in c.iter_mut().zip(l) {
                    *ci += li * qr(*wi, tot);
                }
            }
            f.lift(&c)
        })
        .collect()
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let k = grid(3);
    for case in 0..30 {
        let p = embed_instance(&mut rng, case % 2 == 1);
        let r = ok(refine_to_embed(&k, std::slice::from_ref(&p)))?;
        ensure!(is_embedded(&r.complex, &p), "instance {case} not embedded");
        let pieces: Vec<Vec<&RationalPoint>> =
            embedded_simplices(&r.complex, &p).iter().map(|s| r.complex.points(s)).collect();
        for x in samples(&p, &mut rng, 1000) {
            let union = pieces.iter().any(|s| geometry::simplex_contains(s, &x));
            ensure!(union == polytope_contains(&p, &x), "instance {case}: membership differs at {x}");
        }
        let stray = locality_audit(&k, &r);
        ensure!(stray.is_empty(), "instance {case}: {} simplices refined outside the star", stray.len());
    }
    Ok("30 instances x 1000 samples".into())
}

// ---------------------------------------------------------------- homology

fn g(rank: usize, torsion: &[u64]) -> Group {
    Group { rank, torsion: torsion.to_vec() }
}

fn integral_oracle(name: &str) -> Vec<Group> {
    match name {
        "circle" => vec![g(1, &[]), g(1, &[])],
        "s2" => vec![g(1, &[]), g(0, &[]), g(1, &[])],
        "torus" => vec![g(1, &[]), g(2, &[]), g(1, &[])],
        "rp2" => vec![g(1, &[]), g(0, &[2]), g(0, &[])],
        "klein" => vec![g(1, &[]), g(1, &[2]), g(0, &[])],
        "l31" => vec![g(1, &[]), g(0, &[3]), g(0, &[]), g(1, &[])],
        _ => unreachable!(),
    }
}

fn modp_oracle(name: &str, p: u64) -> Vec<usize> {
    match (name, p) {
        ("circle", _) => vec![1, 1],
        ("s2", _) => vec![1, 0, 1],
        ("torus", _) => vec![1, 2, 1],
        ("rp2", 2) => vec![1, 1, 1],
        ("rp2", _) => vec![1, 0, 0],
        ("klein", 2) => vec![1, 2, 1],
        ("klein", _) => vec![1, 1, 0],
        ("l31", 3) => vec![1, 1, 1, 1],
        ("l31", _) => vec![1, 0, 0, 1],
        _ => unreachable!(),
    }
}

fn criterion_6() -> Check {
    for name in ["circle", "s2", "torus", "rp2", "klein", "l31"] {
        let k = ok(fixtures::by_name(name))?;
        let hz = homology_of(&k, Ring::Z);
        ensure!(hz.groups == integral_oracle(name), "{name} over Z: {:?}", hz.describe());
        for p in [2, 3, 5] {
            let hp = homology_of(&k, Ring::Zp(p));
            ensure!(hp.betti() == modp_oracle(name, p), "{name} mod {p}: {:?}", hp.betti());
            ensure!(hp.betti() == ok(hz.universal_coefficient_dims(p))?, "{name}: universal coefficients mod {p}");
        }
    }
    Ok("6 fixtures over Z, Z2, Z3, Z5".into())
}

// ------------------------------------------------------------------- duals

/// Expected complement of `Bs(K^j)` in `Bs(K)` for a closed `n`-manifold:
/// a connected wedge of `(n-j-1)`-spheres (points when `j = n-1`), with one
/// vertex per simplex above dimension `j` and one edge per such face pair.
fn complement_oracle(k: &SimplicialComplex, j: usize) -> (Vec<usize>, usize, usize) {
    let n = k.dim();
    let above: Vec<_> = (j + 1..=n).flat_map(|d| k.simplices(d).iter().cloned()).collect();
    let pairs = above.iter().map(|t| above.iter().filter(|s| s.dim() < t.dim() && s.is_face_of(t)).count()).sum();
    let chi: i64 = (j + 1..=n).map(|d| if (n - d).is_multiple_of(2) { 1 } else { -1 } * k.count(d) as i64).sum();
    let top = n - j - 1;
    let betti = if top == 0 {
        vec![chi as usize]
    } else {
        let mut b = vec![0; top + 1];
        b[0] = 1;
        b[top] = ((chi - 1) * if top.is_multiple_of(2) { 1 } else { -1 }) as usize;
        b
    };
    (betti, above.len(), pairs)
}

fn criterion_7() -> Check {
    let s2 = fixtures::sphere2();
    let s3 = fixtures::sphere3();
    let torus = fixtures::torus();
    let cases = [
        (&s2, "tetrahedron boundary", 0),
        (&torus, "torus", 0),
        (&torus, "torus", 1),
        (&s3, "4-simplex boundary", 0),
        (&s3, "4-simplex boundary", 1),
    ];
    ensure!(
        s2.f_vector() == [4, 6, 4] && torus.f_vector() == [7, 21, 14] && s3.f_vector() == [5, 10, 10, 5],
        "fixture sizes"
    );
    let mut notes = Vec::new();
    for (k, name, j) in cases {
        let c = k.full_subcomplex_complement(j).complex;
        let (betti, verts, edges) = complement_oracle(k, j);
        let got = homology_of(&c, Ring::Z);
        ensure!(got.betti() == betti, "{name}, j = {j}: betti {:?} vs {betti:?}", got.betti());
        ensure!(got.groups.iter().all(|g| g.torsion.is_empty()), "{name}: torsion in complement");
        ensure!(c.count(0) == verts && c.count(1) == edges, "{name}, j = {j}: f = {:?}", c.f_vector());
        if j + 1 == k.dim() - 1 {
            ensure!(c.dim() == 1, "{name}: complement is not a graph");
        }
        notes.push(format!("{name} j={j} b={betti:?}"));
    }
    let dual = ok(s2.dual_skeleton(1))?.complex;
    ensure!(homology_of(&dual, Ring::Z).betti() == [1, 3], "tetrahedron dual graph");
    Ok(notes.join("; "))
}

// --------------------------------------------------------------- flat norm

fn strip(n: i64) -> SimplicialComplex {
    let mut pts = Vec::new();
    for x in 0..=n {
        pts.push(RationalPoint::from_ints(&[x, 0]));
        pts.push(RationalPoint::from_ints(&[x, 1]));
    }
    let mut f = Vec::new();
    for x in 0..n as usize {
        let (a, b, c, d) = (2 * x, 2 * x + 2, 2 * x + 3, 2 * x + 1);
        f.push(vec![a, b, c]);
        f.push(vec![a, c, d]);
    }
    SimplicialComplex::from_facets(pts, &f).unwrap()
}

fn suite() -> Vec<(SimplicialComplex, Chain)> {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let complexes = [fixtures::unit_square(), fixtures::hexagon_disk(), fixtures::annulus(), strip(3)];
    let mut out = Vec::new();
    for (ci, k) in complexes.iter().enumerate() {
        for case in 0..10 {
            let t = match case % 3 {
                0 => random_chain(k, 2, &mut rng, 2).boundary().unwrap(),
                1 => random_chain(k, 1, &mut rng, 2),
                _ if ci == 0 => random_chain(k, 0, &mut rng, 2),
                _ => random_chain(k, 1, &mut rng, 1).add(&random_chain(k, 2, &mut rng, 1).boundary().unwrap()).unwrap(),
            };
            out.push((k.clone(), t));
        }
    }
    out
}

fn criterion_8() -> Check {
    let limits = Limits::default();
    let cases = suite();
    for (n, (k, t)) in cases.iter().enumerate() {
        ensure!(k.num_simplices() <= 30 || k.count(2) <= 30, "case {n} too large");
        let lp = ok(flat_norm_lp(t, k))?;
        let bound = t.terms().map(|(_, c)| c.abs()).max().unwrap_or(0).max(2);
        let bf = ok(flat_norm_bruteforce(t, k, bound, &limits))?;
        ensure!(lp.objective == bf.objective, "case {n}: LP {} vs brute force {}", lp.value, bf.value);
    }
    let analytic = 2.0 * (2.0 + 2f64.sqrt());
    let found = to_f64(&ok(crossover_bisection([[0, 0], [1, 0], [0, 1]], q(1), q(20), 40))?);
    let err = (found - analytic).abs() / analytic;
    ensure!(err < 0.01, "crossover {found} vs {analytic}");

    let fast = LpOptions { lexicographic_ties: false };
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let disk = fixtures::hexagon_disk();
    let annulus = fixtures::annulus();
    for i in 0..250 {
        let t = random_chain(&disk, 1, &mut rng, 3);
        let f = ok(flat_norm_lp_with(&t, &disk, fast))?.value;
        ensure!(f <= t.mass(&disk) * (1.0 + 1e-12) + 1e-12, "F(T) > M(T) on chain {i}");
        let s = random_chain(&annulus, 2, &mut rng, 3);
        let bs = ok(s.boundary())?;
        let f = ok(flat_norm_lp_with(&bs, &annulus, fast))?.value;
        ensure!(f <= s.mass(&annulus) * (1.0 + 1e-12) + 1e-12, "F(dS) > M(S) on chain {i}");
    }
    Ok(format!("40/40 exact, crossover error {err:.1e}, 500 inequality checks"))
}

// ---------------------------------------------------------------- steenrod

fn compositions(d: u32) -> Vec<Vec<u32>> {
    if d == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=d {
        for mut rest in compositions(d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Partitions of `n` into parts `2^k - 1`.
fn milnor_counts(n: usize) -> Vec<u64> {
    let mut c = vec![0u64; n + 1];
    c[0] = 1;
    for part in [1, 3, 7, 15] {
        for i in part..=n {
            c[i] += c[i - part];
        }
    }
    c
}

fn criterion_9() -> Check {
    ensure!(SteenrodElement::sq(&[1, 1]).reduce().is_zero(), "Sq1 Sq1");
    ensure!(SteenrodElement::sq(&[1, 2]).reduce() == SteenrodElement::sq(&[3]), "Sq1 Sq2");
    ensure!(SteenrodElement::sq(&[2, 2]).reduce() == SteenrodElement::sq(&[3, 1]), "Sq2 Sq2");
    let milnor = milnor_counts(12);
    for d in 0..=12u32 {
        let mut brute: Vec<Vec<u32>> = compositions(d)
            .into_iter()
            .filter(|w| is_admissible(&w.iter().map(|&i| Op::Sq(i)).collect::<Vec<_>>(), 2))
            .collect();
        brute.sort();
        ensure!(admissible_mod2(d) == brute, "admissible basis in degree {d}");
        ensure!(brute.len() as u64 == milnor[d as usize], "count in degree {d}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..500 {
        let mut w = Vec::new();
        let mut total = 0;
        for _ in 0..rng.gen_range(2..=5) {
            let room: u32 = 24 - total;
            if room == 0 {
                break;
            }
            let i = rng.gen_range(1..=room.min(9));
            total += i;
            w.push(i);
        }
        let e = SteenrodElement::sq(&w);
        let left = e.reduce_with(RewriteOrder::Leftmost);
        ensure!(left == e.reduce_with(RewriteOrder::Rightmost), "{w:?}: leftmost vs rightmost");
        ensure!(left == e.reduce_with(RewriteOrder::Random(rng.gen())), "{w:?}: leftmost vs random");
        ensure!(left.is_admissible(), "{w:?}: not admissible");
    }
    Ok("relations, degrees 0..=12, 500 words".into())
}

fn basis(k: &SimplicialComplex, ring: Ring) -> Result<Vec<CohomologyBasis>, String> {
    ok(cohomology_of(k, ring, &Limits::default()))
}

fn class(h: &[CohomologyBasis], c: &Cochain) -> Result<Vec<i64>, String> {
    match h.get(c.degree) {
        Some(b) => ok(b.coordinates(c)),
        None => Ok(Vec::new()),
    }
}

fn criterion_10() -> Check {
    const Z2: Ring = Ring::Zp(2);
    let mut classes = 0;
    for name in ["circle", "s2", "torus", "rp2", "klein", "l31", "rp4", "rp2xrp2"] {
        let k = ok(fixtures::by_name(name))?;
        let h = basis(&k, Z2)?;
        for b in &h {
            for c in &b.generators {
                ensure!(ok(b.same_class(&ok(sq(&k, 0, c))?, c))?, "{name}: Sq0 != id");
                if let Some(hb) = h.get(2 * c.degree) {
                    let top = ok(sq(&k, c.degree, c))?;
                    ensure!(ok(hb.same_class(&top, &ok(cup(&k, c, c))?))?, "{name}: top square != cup square");
                }
                classes += 1;
            }
        }
    }

    let rp2 = fixtures::rp2();
    let h = basis(&rp2, Z2)?;
    let x = &h[1].generators[0];
    let s1 = class(&h, &ok(sq(&rp2, 1, x))?)?;
    ensure!(s1 == class(&h, &ok(bockstein(&rp2, x))?)? && s1 == [1], "Sq1 vs Bockstein on RP2");

    let (k, p1, p2) = fixtures::rp2_squared();
    let hk = basis(&k, Z2)?;
    let x2 = ok(cup(&rp2, x, x))?;
    let mut gens = Vec::new();
    for f in [&p1, &p2] {
        gens.push(ok(pullback(f, &k, &rp2, x))?);
        gens.push(ok(pullback(f, &k, &rp2, &x2))?);
    }
    for u in &gens {
        for v in &gens {
            let uv = ok(cup(&k, u, v))?;
            let (du, dv) = (u.degree as u32, v.degree as u32);
            for kk in 0..=du + dv {
                let lhs = ok(sq(&k, kk as usize, &uv))?;
                let mut rhs = Cochain::new(lhs.degree, Z2, vec![0; lhs.values.len()]);
                for (i, j) in cartan_expand(kk, du, dv) {
                    rhs = ok(rhs.add(&ok(cup(&k, &ok(sq(&k, i as usize, u))?, &ok(sq(&k, j as usize, v))?))?))?;
                }
                let diff = class(&hk, &ok(lhs.sub(&rhs))?)?;
                ensure!(diff.iter().all(|&c| c == 0), "Cartan fails for Sq{kk} in degrees ({du},{dv})");
            }
        }
    }

    let l31 = fixtures::lens_space_3_1();
    let h3 = basis(&l31, Ring::Zp(3))?;
    let v = &h3[1].generators[0];
    let u = class(&h3, &ok(bockstein(&l31, v))?)?;
    ensure!(u.iter().any(|&c| c != 0), "Bockstein vanishes on L(3,1)");

    let torus = fixtures::torus();
    for p in [2, 3, 5] {
        let ht = basis(&torus, Ring::Zp(p))?;
        for d in 0..2 {
            for c in &ht[d].generators {
                ensure!(ok(ht[d + 1].is_coboundary(&ok(bockstein(&torus, c))?))?, "torus Bockstein mod {p}");
            }
        }
    }
    Ok(format!("{classes} mod-2 classes, Cartan on 16 products"))
}

// ------------------------------------------------------------- deformation

fn criterion_11() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_margin = f64::INFINITY;
    for _ in 0..20 {
        let eta = rng.gen_range(0.5..2.0);
        let delta_a = eta * rng.gen_range(0.02..0.32);
        let p = ok(ProfileParams::new(rng.gen_range(0.0..=1.0), delta_a, eta))?;
        let bound = p.mu.max(p.eta / (p.eta - 3.0 * p.delta_a));
        let n = 10_000;
        let h = 1.5 * p.eta / n as f64;
        let vals: Vec<f64> = (0..=n).map(|i| smooth_profile(&p, i as f64 * h)).collect();
        let slope = vals.windows(2).map(|w| (w[1] - w[0]) / h).fold(f64::MIN, f64::max);
        ensure!(slope <= bound + 1e-6, "slope {slope} > {bound} at {p:?}");
        worst_margin = worst_margin.min(bound - slope);
    }
    let mut fits = Vec::new();
    for (m, k) in [(2, 0), (2, 1), (3, 1)] {
        let (c, z) = ok(product_chart_chain(m, k, qr(1, 8)))?;
        let mut pts = Vec::new();
        for gamma in [0.5, 0.25, 0.125] {
            let phi = ProductSquash { k, profile: ok(ProfileParams::new(gamma, 0.2, 1.0))?, stretch: 1.05 };
            let r = ok(mass_contraction_experiment(&c, &z, &phi, 0.2))?;
            ensure!(r.ratio <= r.bound, "({m},{k}) gamma {gamma}: ratio {} > bound {}", r.ratio, r.bound);
            pts.push((gamma, r.ratio));
        }
        let slope = fit_gamma_exponent(&pts);
        let want = (m - k) as f64;
        ensure!((slope - want).abs() <= 0.05 * want, "({m},{k}): exponent {slope}");
        fits.push(format!("({m},{k})={slope:.3}"));
    }
    Ok(format!("min slope margin {worst_margin:.2e}; exponents {}", fits.join(" ")))
}

// --------------------------------------------------------------------- CLI

const CUBE: &str = r#"{"points": [["0","0","0"],["1","0","0"],["0","1","0"],["1","1","0"],
["0","0","1"],["1","0","1"],["0","1","1"],["1","1","1"]]}"#;
const SEGMENT: &str = r#"{"points": [["1/4","0"],["3/4","1/3"]]}"#;
const CHAIN: &str = r#"{"dim": 1, "terms": [{"simplex": [0, 1], "coeff": 1}, {"simplex": [1, 2], "coeff": -2}]}"#;

const SUITE: &[&[&str]] = &[
    &["fixture", "torus", "-o", "torus.json"],
    &["tri", "cube.json", "-o", "tri.json"],
    &["refine", "fixture:square", "seg.json", "-o", "refine.json"],
    &["homology", "torus.json", "--coeff", "z3", "-o", "homology.json"],
    &["flatnorm", "fixture:square", "chain.json", "-o", "flat.json"],
    &["flatnorm", "fixture:square", "chain.json", "--bruteforce", "2", "--csv", "-o", "flat_bf.csv"],
    &["steenrod", "reduce", "2,3", "-o", "reduce.json"],
    &["steenrod", "reduce", "P1,b,P1", "--prime", "3", "-o", "reduce3.json"],
    &["steenrod", "apply", "fixture:rp2", "--word", "1", "--degree", "1", "-o", "apply.json"],
    &["bockstein", "fixture:l31", "--prime", "3", "--degree", "1", "-o", "bockstein.json"],
    &["profile", "psi", "--mu", "0.3", "--delta-a", "0.1", "--eta", "1", "--samples", "201", "--csv", "-o", "psi.csv"],
    &["experiment", "squash", "--m", "2", "--k", "1", "-o", "squash.json"],
    &["experiment", "audit", "fixture:square", "--samples", "500", "-o", "audit.json"],
    &["subdivide", "torus.json", "-o", "bs.json"],
    &["dual", "fixture:s2", "--complement", "0", "-o", "dual.json"],
    &["validate", "bs.json"],
];

fn run_suite(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    for (name, text) in [("cube.json", CUBE), ("seg.json", SEGMENT), ("chain.json", CHAIN)] {
        ok(std::fs::write(dir.join(name), text))?;
    }
    let mut out = BTreeMap::new();
    for (i, args) in SUITE.iter().enumerate() {
        let o = ok(Command::new(env!("CARGO_BIN_EXE_polytopo"))
            .current_dir(dir)
            .env_remove("POLYTOPO_RECORD_TIMING")
            .args(["--seed", "17"])
            .args(*args)
            .output())?;
        ensure!(o.status.success(), "{:?} failed: {}", args, String::from_utf8_lossy(&o.stderr));
        out.insert(format!("{i:02}.stdout"), o.stdout);
    }
    for entry in ok(std::fs::read_dir(dir))? {
        let entry = ok(entry)?;
        out.insert(entry.file_name().to_string_lossy().into_owned(), ok(std::fs::read(entry.path()))?);
    }
    Ok(out)
}

fn criterion_12() -> Check {
    let mut runs = Vec::new();
    for _ in 0..3 {
        let dir = ok(tempfile::tempdir())?;
        runs.push(run_suite(dir.path())?);
    }
    let manifests = runs[0].keys().filter(|k| k.ends_with(".manifest.json")).count();
    ensure!(manifests + 1 == SUITE.len(), "expected a manifest per written artifact, found {manifests}");
    for (i, r) in runs.iter().enumerate().skip(1) {
        ensure!(r.keys().eq(runs[0].keys()), "run {i} produced a different file set");
        for (name, bytes) in r {
            ensure!(*bytes == runs[0][name], "run {i}: {name} differs");
        }
    }
    Ok(format!("{} commands, {} files identical across 3 runs", SUITE.len(), runs[0].len()))
}

// -------------------------------------------------------------------- main

struct Criterion {
    id: usize,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Check,
}

fn main() {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion { id: 1, name: "boundary soundness", budget: secs(30), run: criterion_1 },
        Criterion { id: 2, name: "polytope triangulation", budget: secs(60), run: criterion_2 },
        Criterion { id: 3, name: "affine naturality", budget: None, run: criterion_3 },
        Criterion { id: 4, name: "gluing along common faces", budget: None, run: criterion_4 },
        Criterion { id: 5, name: "skeleton embedding", budget: None, run: criterion_5 },
        Criterion { id: 6, name: "homology fixtures", budget: secs(30), run: criterion_6 },
        Criterion { id: 7, name: "dual complements", budget: None, run: criterion_7 },
        Criterion { id: 8, name: "flat norm", budget: secs(120), run: criterion_8 },
        Criterion { id: 9, name: "Steenrod algebra", budget: None, run: criterion_9 },
        Criterion { id: 10, name: "cochain operations", budget: secs(120), run: criterion_10 },
        Criterion { id: 11, name: "deformation numerics", budget: None, run: criterion_11 },
        Criterion { id: 12, name: "CLI determinism", budget: None, run: criterion_12 },
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for c in criteria.iter().filter(|c| only.is_none_or(|o| o == c.id)) {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let result = match (result, c.budget) {
            (Ok(_), Some(b)) if elapsed > b => {
                Err(format!("took {:.1}s, budget {}s", elapsed.as_secs_f64(), b.as_secs()))
            }
            (r, _) => r,
        };
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} criterion {:>2} {:<28} {:>7.2}s  {detail}", c.id, c.name, elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
