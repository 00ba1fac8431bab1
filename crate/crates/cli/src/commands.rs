use std::fmt::Write as _;

use polytopo::chains::Chain;
use polytopo::cohomology::{bockstein, cohomology, homology_of, ChainComplex, Cochain, CohomologyBasis, Ring};
use polytopo::complex::SimplicialComplex;
use polytopo::deform::{self, GradedNeighborhood, ProductSquash, ProfileParams};
use polytopo::embed::{refine_in_polyhedron, refine_to_embed};
use polytopo::flat_norm::{flat_norm_bruteforce, flat_norm_lp, objective_string, FlatDecomposition, Witness};
use polytopo::polytope::triangulate;
use polytopo::rational::{format_rational, from_f64, parse_rational, to_f64};
use polytopo::steenrod::{self, algebra::format_word, parse_word, SteenrodElement};
use polytopo::{fixtures, Error, Result};
use serde_json::{json, Value};

use crate::io::{self, chain_to_value, complex_to_value};
use crate::{Artifact, Cli, Command, Context, ExperimentKind, Output, ProfileKind, SteenrodAction};

pub fn dispatch<'a>(cli: &'a Cli, ctx: &mut Context) -> Result<(Artifact, &'a Output)> {
    match &cli.command {
        Command::Tri { polytope, out } => Ok((tri(ctx, polytope)?, out)),
        Command::Refine { complex, polytopes, polyhedron, out } => {
            Ok((refine(ctx, complex, polytopes, *polyhedron)?, out))
        }
        Command::Homology { complex, coeff, out } => Ok((homology(ctx, complex, coeff)?, out)),
        Command::Flatnorm { complex, chain, bruteforce, csv, out } => {
            Ok((flatnorm(ctx, complex, chain, *bruteforce, *csv)?, out))
        }
        Command::Steenrod { action: SteenrodAction::Reduce { word, prime, out } } => {
            Ok((steenrod_reduce(word, *prime)?, out))
        }
        Command::Steenrod { action: SteenrodAction::Apply { complex, word, degree, out } } => {
            Ok((steenrod_apply(ctx, complex, word, *degree)?, out))
        }
        Command::Bockstein { complex, prime, degree, out } => Ok((bockstein_cmd(ctx, complex, *prime, *degree)?, out)),
        Command::Profile { which, mu, delta_a, eta, samples, t_max, csv, out } => {
            let p = ProfileParams::new(*mu, *delta_a, *eta)?;
            Ok((profile(*which, &p, *samples, t_max.unwrap_or(1.5 * eta), *csv)?, out))
        }
        Command::Experiment {
            kind: ExperimentKind::Squash { m, k, gamma, eps_a, delta_a, eta, half_width, csv, out },
        } => Ok((squash(*m, *k, gamma, *eps_a, *delta_a, *eta, half_width, *csv)?, out)),
        Command::Experiment { kind: ExperimentKind::Audit { complex, j, c0, delta, samples, out } } => {
            Ok((audit(ctx, complex, *j, c0, delta.as_deref(), *samples, cli.seed)?, out))
        }
        Command::Subdivide { complex, times, out } => Ok((subdivide(ctx, complex, *times)?, out)),
        Command::Dual { complex, dim, complement, out } => Ok((dual(ctx, complex, *dim, *complement)?, out)),
        Command::Fixture { name, out } => Ok((Artifact::Json(complex_to_value(&fixtures::by_name(name)?)), out)),
        Command::Validate { .. } => Err(Error::invariant("validate is handled before dispatch")),
    }
}

fn load(ctx: &mut Context, input: &str) -> Result<SimplicialComplex> {
    ctx.record_input(input)?;
    io::load_complex(input)
}

fn tri(ctx: &mut Context, path: &str) -> Result<Artifact> {
    ctx.record_input(path)?;
    let polys = io::polytopes_from_json(&io::read_text(path)?, &ctx.limits)?;
    let [p] = polys.as_slice() else {
        return Err(Error::input(format!("expected one polytope, found {}", polys.len())));
    };
    Ok(Artifact::Json(complex_to_value(&triangulate(p).to_complex()?)))
}

fn refine(ctx: &mut Context, complex: &str, polytopes: &str, polyhedron: bool) -> Result<Artifact> {
    let k = load(ctx, complex)?;
    ctx.record_input(polytopes)?;
    let polys = io::polytopes_from_json(&io::read_text(polytopes)?, &ctx.limits)?;
    let r = if polyhedron { refine_in_polyhedron(&k, &polys)? } else { refine_to_embed(&k, &polys)? };
    let plans = serde_json::to_value(&r.plans).map_err(|e| Error::invariant(e.to_string()))?;
    Ok(Artifact::Json(json!({ "complex": complex_to_value(&r.complex), "plans": plans })))
}

fn homology(ctx: &mut Context, complex: &str, coeff: &str) -> Result<Artifact> {
    let ring = Ring::parse(coeff)?;
    let k = load(ctx, complex)?;
    let h = homology_of(&k, ring);
    let mut out = serde_json::Map::new();
    for (d, g) in h.describe().into_iter().enumerate() {
        out.insert(format!("H{d}"), Value::String(g));
    }
    Ok(Artifact::Json(Value::Object(out)))
}

fn fractional(m: &std::collections::BTreeMap<polytopo::complex::Simplex, polytopo::rational::Q>) -> Value {
    let terms: Vec<Value> =
        m.iter().map(|(s, x)| json!({ "simplex": s.vertices(), "coeff": format_rational(x) })).collect();
    Value::Array(terms)
}

fn flat_value(d: &FlatDecomposition) -> Value {
    let witness = match &d.witness {
        Witness::Integral { r, s } => json!({ "r": chain_to_value(r), "s": chain_to_value(s) }),
        Witness::Fractional { r, s } => json!({ "r": fractional(r), "s": fractional(s) }),
    };
    json!({
        "value": d.value,
        "objective": objective_string(d),
        "mass_r": d.mass_r,
        "mass_s": d.mass_s,
        "status": d.status.as_str(),
        "witness": witness,
    })
}

fn flatnorm(ctx: &mut Context, complex: &str, chain: &str, bound: Option<i64>, csv: bool) -> Result<Artifact> {
    let k = load(ctx, complex)?;
    ctx.record_input(chain)?;
    let t: Chain = io::chain_from_json(&io::read_text(chain)?)?;
    let d = match bound {
        Some(b) => flat_norm_bruteforce(&t, &k, b, &ctx.limits)?,
        None => flat_norm_lp(&t, &k)?,
    };
    d.check_identity(&t)?;
    Ok(if csv {
        Artifact::Csv(format!("{}\n{}\n", FlatDecomposition::csv_header(), d.csv_row()))
    } else {
        Artifact::Json(flat_value(&d))
    })
}

fn element_terms(e: &SteenrodElement) -> Value {
    Value::Array(e.terms().map(|(w, c)| json!({ "word": format_word(w), "coeff": c })).collect())
}

fn steenrod_reduce(word: &str, prime: u64) -> Result<Artifact> {
    Ring::prime(prime)?;
    let w = parse_word(word, prime)?;
    let e = SteenrodElement::monomial(prime, w.clone())?;
    let r = e.reduce();
    Ok(Artifact::Json(json!({
        "prime": prime,
        "input": format_word(&w),
        "degree": e.degrees(),
        "reduced": r.to_string(),
        "terms": element_terms(&r),
    })))
}

fn bases(ctx: &Context, k: &SimplicialComplex, ring: Ring) -> Result<Vec<CohomologyBasis>> {
    let cc = ChainComplex::of(k);
    (0..=k.dim()).map(|d| cohomology(&cc, ring, d, &ctx.limits)).collect()
}

/// Class coordinates, or an empty list above the top dimension.
fn class_of(h: &[CohomologyBasis], c: &Cochain) -> Result<Vec<i64>> {
    match h.get(c.degree) {
        Some(b) => b.coordinates(c),
        None => Ok(Vec::new()),
    }
}

fn steenrod_apply(ctx: &mut Context, complex: &str, word: &str, degree: usize) -> Result<Artifact> {
    let k = load(ctx, complex)?;
    let ring = Ring::Zp(2);
    let h = bases(ctx, &k, ring)?;
    let source = h.get(degree).ok_or_else(|| Error::input(format!("degree {degree} exceeds the complex dimension")))?;
    let e = SteenrodElement::monomial(2, parse_word(word, 2)?)?;
    let mut images = Vec::new();
    for (i, g) in source.generators.iter().enumerate() {
        let mut parts = Vec::new();
        for c in steenrod::apply(&k, &e, g)? {
            parts.push(json!({ "degree": c.degree, "class": class_of(&h, &c)? }));
        }
        images.push(json!({ "generator": i, "images": parts }));
    }
    Ok(Artifact::Json(json!({
        "word": format_word(&parse_word(word, 2)?),
        "reduced": e.reduce().to_string(),
        "degree": degree,
        "source": source.group.describe(ring),
        "results": images,
    })))
}

fn bockstein_cmd(ctx: &mut Context, complex: &str, prime: u64, degree: usize) -> Result<Artifact> {
    let ring = Ring::prime(prime)?;
    let k = load(ctx, complex)?;
    let h = bases(ctx, &k, ring)?;
    let source = h.get(degree).ok_or_else(|| Error::input(format!("degree {degree} exceeds the complex dimension")))?;
    let images: Vec<Value> =
        source.generators.iter().map(|g| Ok(Value::from(class_of(&h, &bockstein(&k, g)?)?))).collect::<Result<_>>()?;
    let target = h.get(degree + 1).map_or_else(|| "0".to_string(), |b| b.group.describe(ring));
    Ok(Artifact::Json(json!({
        "prime": prime,
        "degree": degree,
        "source": source.group.describe(ring),
        "target": target,
        "images": images,
    })))
}

fn profile(which: ProfileKind, p: &ProfileParams, samples: usize, t_max: f64, csv: bool) -> Result<Artifact> {
    if samples < 2 || t_max.is_nan() || t_max <= 0.0 {
        return Err(Error::input("need at least two samples on a positive interval"));
    }
    let name = match which {
        ProfileKind::Phi => "phi",
        ProfileKind::Psi => "psi",
    };
    let rows: Vec<(f64, f64)> = (0..samples)
        .map(|i| {
            let t = t_max * i as f64 / (samples - 1) as f64;
            let v = match which {
                ProfileKind::Phi => deform::phi_profile(p, t),
                ProfileKind::Psi => deform::smooth_profile(p, t),
            };
            (t, v)
        })
        .collect();
    if csv {
        let mut s = format!("t,{name}\n");
        for (t, v) in &rows {
            let _ = writeln!(s, "{t:.16e},{v:.16e}");
        }
        return Ok(Artifact::Csv(s));
    }
    Ok(Artifact::Json(json!({
        "profile": name,
        "params": p,
        "slope_bound": p.slope_bound(),
        "t": rows.iter().map(|r| r.0).collect::<Vec<_>>(),
        "values": rows.iter().map(|r| r.1).collect::<Vec<_>>(),
    })))
}

#[allow(clippy::too_many_arguments)]
fn squash(
    m: usize,
    k: usize,
    gammas: &[f64],
    eps_a: f64,
    delta_a: f64,
    eta: f64,
    half_width: &str,
    csv: bool,
) -> Result<Artifact> {
    let (complex, z) = deform::product_chart_chain(m, k, parse_rational(half_width)?)?;
    let mut reports = Vec::new();
    for &g in gammas {
        let phi = ProductSquash { k, profile: ProfileParams::new(g, delta_a, eta)?, stretch: 1.0 + eps_a };
        reports.push(deform::mass_contraction_experiment(&complex, &z, &phi, delta_a)?);
    }
    if csv {
        let mut s = String::from("gamma,mass,pushed_mass,ratio,bound\n");
        for r in &reports {
            let _ = writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.gamma, r.mass, r.pushed_mass, r.ratio, r.bound
            );
        }
        return Ok(Artifact::Csv(s));
    }
    let pts: Vec<(f64, f64)> = reports.iter().map(|r| (r.gamma, r.ratio)).collect();
    let exponent = if pts.len() >= 2 { Value::from(deform::fit_gamma_exponent(&pts)) } else { Value::Null };
    Ok(Artifact::Json(json!({
        "m": m,
        "k": k,
        "expected_exponent": m - k,
        "fitted_exponent": exponent,
        "within_bound": reports.iter().all(|r| r.ratio <= r.bound),
        "reports": serde_json::to_value(&reports).map_err(|e| Error::invariant(e.to_string()))?,
    })))
}

fn audit(
    ctx: &mut Context,
    complex: &str,
    j: usize,
    c0: &str,
    delta: Option<&str>,
    samples: usize,
    seed: u64,
) -> Result<Artifact> {
    let k = load(ctx, complex)?;
    let c0 = parse_rational(c0)?;
    let delta = match delta {
        Some(d) => parse_rational(d)?,
        None => from_f64(k.min_edge_length() / 8.0)?,
    };
    let n = if c0 == polytopo::rational::q(1) {
        GradedNeighborhood::flat(&k, j, delta)?
    } else {
        GradedNeighborhood::new(&k, j, delta, c0)?
    };
    let report = deform::boundary_regularity_audit(&n, samples, seed);
    Ok(Artifact::Json(json!({
        "j": j,
        "c0": format_rational(n.c0()),
        "delta": format_rational(n.delta()),
        "radii": (0..=j).map(|i| to_f64(n.radius2(i)).sqrt()).collect::<Vec<_>>(),
        "passed": report.passed(),
        "report": serde_json::to_value(&report).map_err(|e| Error::invariant(e.to_string()))?,
    })))
}

fn subdivide(ctx: &mut Context, complex: &str, times: usize) -> Result<Artifact> {
    let mut k = load(ctx, complex)?;
    for _ in 0..times {
        k = k.barycentric_subdivision().complex;
    }
    Ok(Artifact::Json(complex_to_value(&k)))
}

fn dual(ctx: &mut Context, complex: &str, dim: Option<usize>, complement: Option<usize>) -> Result<Artifact> {
    let k = load(ctx, complex)?;
    let sub = match (dim, complement) {
        (Some(d), _) => k.dual_skeleton(d)?,
        (None, Some(j)) => k.full_subcomplex_complement(j),
        (None, None) => return Err(Error::input("pass --dim or --complement")),
    };
    let origin: Vec<Value> = sub.origin.iter().map(|s| json!(s.vertices())).collect();
    let betti = homology_of(&sub.complex, Ring::Z).betti();
    Ok(Artifact::Json(json!({
        "complex": complex_to_value(&sub.complex),
        "origin": origin,
        "f_vector": sub.complex.f_vector(),
        "betti": betti,
    })))
}
