//! File formats: JSON complexes, chains and polytopes with `"p/q"` string
//! rationals, OFF surface import, and a canonical JSON writer.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use polytopo::chains::Chain;
use polytopo::complex::{Simplex, SimplicialComplex};
use polytopo::fixtures;
use polytopo::limits::Limits;
use polytopo::polytope::Polytope;
use polytopo::rational::{format_rational, parse_rational, RationalPoint};
use polytopo::{Error, Result};
use serde::Deserialize;
use serde_json::{json, Map, Value};

#[derive(Debug, Deserialize)]
struct ComplexFile {
    dim: usize,
    vertices: Vec<Vec<Value>>,
    #[serde(default)]
    simplices: BTreeMap<String, Vec<Vec<usize>>>,
}

#[derive(Debug, Deserialize)]
struct ChainFile {
    dim: usize,
    terms: Vec<TermFile>,
}

#[derive(Debug, Deserialize)]
struct TermFile {
    simplex: Vec<usize>,
    coeff: i64,
}

#[derive(Debug, Deserialize)]
struct PolytopeFile {
    points: Vec<Vec<Value>>,
}

#[derive(Debug, Deserialize)]
struct PolytopeListFile {
    polytopes: Vec<PolytopeFile>,
}

pub fn parse_json(text: &str) -> Result<Value> {
    Ok(serde_json::from_str(text)?)
}

fn coordinate(v: &Value) -> Result<polytopo::rational::Q> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        other => Err(Error::input(format!("bad coordinate {other}"))),
    }
}

fn point(raw: &[Value]) -> Result<RationalPoint> {
    Ok(RationalPoint(raw.iter().map(coordinate).collect::<Result<_>>()?))
}

fn from_value<T: serde::de::DeserializeOwned>(v: Value, what: &str) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::input(format!("not a {what} file: {e}")))
}

fn complex_from_parsed(f: ComplexFile) -> Result<SimplicialComplex> {
    let vertices: Vec<RationalPoint> = f.vertices.iter().map(|v| point(v)).collect::<Result<_>>()?;
    let mut simplices = Vec::new();
    for (key, list) in &f.simplices {
        let d: usize = key.parse().map_err(|_| Error::input(format!("bad dimension key {key:?}")))?;
        if d > f.dim {
            return Err(Error::input(format!("dimension key {d} exceeds dim {}", f.dim)));
        }
        for s in list {
            if s.len() != d + 1 {
                return Err(Error::input(format!("{s:?} listed under dimension {d}")));
            }
            simplices.push(s.clone());
        }
    }
    let k = SimplicialComplex::from_simplices(vertices, &simplices)?;
    if k.dim() != f.dim {
        return Err(Error::input(format!("declared dim {} but the complex has dimension {}", f.dim, k.dim())));
    }
    Ok(k)
}

/// Also accepts command output that wraps the complex under `"complex"`.
pub fn complex_from_json(text: &str) -> Result<SimplicialComplex> {
    let mut v = parse_json(text)?;
    if let Some(inner) = v.get_mut("complex") {
        v = inner.take();
    }
    complex_from_parsed(from_value(v, "complex")?)
}

pub fn complex_to_value(k: &SimplicialComplex) -> Value {
    let vertices: Vec<Value> = k.vertex_table().iter().map(|p| json!(p)).collect();
    let mut simplices = Map::new();
    for d in 0..=k.dim() {
        let list: Vec<Value> = k.simplices(d).iter().map(|s| json!(s.vertices())).collect();
        simplices.insert(d.to_string(), Value::Array(list));
    }
    json!({ "dim": k.dim(), "vertices": vertices, "simplices": simplices })
}

/// Object File Format: `OFF`, counts, vertex rows, then faces as
/// `n i_0 ... i_(n-1)`, each read as an `(n-1)`-simplex.
pub fn complex_from_off(text: &str) -> Result<SimplicialComplex> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let parse_err = |line: usize, message: String| Error::Parse { line, column: 1, message };
    let (first_line, first) = lines.next().ok_or_else(|| parse_err(1, "empty OFF file".into()))?;
    let counts_line = if first.eq_ignore_ascii_case("OFF") {
        lines.next().ok_or_else(|| parse_err(first_line, "missing counts".into()))?
    } else if let Some(rest) = first.strip_prefix("OFF") {
        (first_line, rest.trim())
    } else {
        (first_line, first)
    };
    let counts: Vec<usize> = counts_line
        .1
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(counts_line.0, format!("bad count {t:?}"))))
        .collect::<Result<_>>()?;
    if counts.len() < 2 {
        return Err(parse_err(counts_line.0, "expected vertex and face counts".into()));
    }
    let mut vertices = Vec::with_capacity(counts[0]);
    for _ in 0..counts[0] {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(counts_line.0, "too few vertex rows".into()))?;
        let coords = l.split_whitespace().map(parse_rational).collect::<Result<Vec<_>>>();
        vertices.push(RationalPoint(coords.map_err(|e| parse_err(ln, e.to_string()))?));
    }
    let mut faces = Vec::with_capacity(counts[1]);
    for _ in 0..counts[1] {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(counts_line.0, "too few face rows".into()))?;
        let nums: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(ln, format!("bad index {t:?}"))))
            .collect::<Result<_>>()?;
        let n = *nums.first().ok_or_else(|| parse_err(ln, "empty face row".into()))?;
        if nums.len() < n + 1 {
            return Err(parse_err(ln, format!("face declares {n} vertices but lists {}", nums.len() - 1)));
        }
        faces.push(nums[1..=n].to_vec());
    }
    SimplicialComplex::from_facets(vertices, &faces)
}

/// A complex from `fixture:NAME`, a `.off` file or a JSON file.
pub fn load_complex(input: &str) -> Result<SimplicialComplex> {
    if let Some(name) = input.strip_prefix("fixture:") {
        return fixtures::by_name(name);
    }
    let text = read_text(input)?;
    if Path::new(input).extension().is_some_and(|e| e.eq_ignore_ascii_case("off")) {
        complex_from_off(&text)
    } else {
        complex_from_json(&text)
    }
}

pub fn read_text(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::input(format!("cannot read {path}: {e}")))
}

pub fn chain_from_json(text: &str) -> Result<Chain> {
    let f: ChainFile = from_value(parse_json(text)?, "chain")?;
    let terms: Vec<(Vec<usize>, i64)> = f.terms.into_iter().map(|t| (t.simplex, t.coeff)).collect();
    Chain::from_terms(f.dim, &terms)
}

pub fn chain_to_value(c: &Chain) -> Value {
    let terms: Vec<Value> = c.terms().map(|(s, x)| json!({ "simplex": s.vertices(), "coeff": x })).collect();
    json!({ "dim": c.dim(), "terms": terms })
}

/// One polytope (`{"points": ...}`) or several (`{"polytopes": [...]}`).
pub fn polytopes_from_json(text: &str, limits: &Limits) -> Result<Vec<Polytope>> {
    let v = parse_json(text)?;
    let files = if v.get("polytopes").is_some() {
        from_value::<PolytopeListFile>(v, "polytope list")?.polytopes
    } else {
        vec![from_value::<PolytopeFile>(v, "polytope")?]
    };
    files
        .iter()
        .map(|f| Polytope::with_limits(f.points.iter().map(|p| point(p)).collect::<Result<_>>()?, limits))
        .collect()
}

/// Pretty JSON with sorted keys and floats at 17 significant digits.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) => {
            if n.is_f64() {
                let _ = write!(out, "{:.16e}", n.as_f64().unwrap());
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) if a.iter().all(|x| !x.is_array() && !x.is_object()) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(x, indent, out);
            }
            out.push(']');
        }
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(x, indent + 1, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            let keys: BTreeSet<&String> = m.keys().collect();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(&m[*k], indent + 1, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub kind: &'static str,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_value(&self) -> Value {
        let checks: Vec<Value> =
            self.checks.iter().map(|c| json!({ "name": c.name, "pass": c.pass, "detail": c.detail })).collect();
        json!({ "kind": self.kind, "pass": self.passed(), "checks": checks })
    }

    fn push(&mut self, name: &'static str, failure: Option<String>) {
        self.checks.push(Check { name, pass: failure.is_none(), detail: failure.unwrap_or_else(|| "ok".into()) });
    }
}

/// Checks the type invariants of a complex, chain or polytope file.
/// Malformed JSON is an error; failed invariants are reported.
pub fn validate(text: &str) -> Result<ValidationReport> {
    let v = parse_json(text)?;
    if v.get("simplices").is_some() || v.get("vertices").is_some() {
        Ok(validate_complex(from_value(v, "complex")?))
    } else if v.get("terms").is_some() {
        Ok(validate_chain(from_value(v, "chain")?))
    } else if v.get("points").is_some() || v.get("polytopes").is_some() {
        Ok(validate_polytopes(&v))
    } else {
        Err(Error::input("unrecognized file: expected a complex, chain or polytope"))
    }
}

fn first_error<T>(items: impl IntoIterator<Item = Result<T>>) -> Option<String> {
    items.into_iter().find_map(|r| r.err()).map(|e| e.to_string())
}

fn validate_complex(f: ComplexFile) -> ValidationReport {
    let mut r = ValidationReport { kind: "complex", checks: Vec::new() };
    let coords = first_error(f.vertices.iter().map(|v| point(v)));
    let ambient = f.vertices.first().map_or(0, |v| v.len());
    let coords = coords.or_else(|| {
        f.vertices.iter().position(|v| v.len() != ambient).map(|i| format!("vertex {i} has a different dimension"))
    });
    r.push("vertex coordinates", coords);
    let mut listed: BTreeSet<Vec<usize>> = (0..f.vertices.len()).map(|v| vec![v]).collect();
    let mut shape = None;
    for (key, list) in &f.simplices {
        let d = key.parse::<usize>().ok();
        for s in list {
            let mut sorted = s.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if d != Some(s.len().wrapping_sub(1)) || sorted.len() != s.len() {
                shape.get_or_insert(format!("{s:?} listed under key {key:?}"));
            } else if let Some(&bad) = s.iter().find(|&&x| x >= f.vertices.len()) {
                shape.get_or_insert(format!("{s:?} references unknown vertex {bad}"));
            } else {
                listed.insert(sorted);
            }
        }
    }
    r.push("simplex shape", shape);
    let mut closure = None;
    for s in &listed {
        if s.len() < 2 {
            continue;
        }
        for skip in 0..s.len() {
            let mut f = s.clone();
            f.remove(skip);
            if !listed.contains(&f) {
                closure.get_or_insert(format!("{f:?} is a face of {s:?} but is not listed"));
            }
        }
    }
    r.push("face closure", closure);
    let top = listed.iter().map(|s| s.len() - 1).max().unwrap_or(0);
    r.push(
        "declared dimension",
        (top != f.dim).then(|| format!("declared {} but the top simplex has dimension {top}", f.dim)),
    );
    if r.passed() {
        let geometric = complex_from_parsed(f).err().map(|e| e.to_string());
        r.push("geometric realization", geometric);
    }
    r
}

fn validate_chain(f: ChainFile) -> ValidationReport {
    let mut r = ValidationReport { kind: "chain", checks: Vec::new() };
    let zero = f.terms.iter().position(|t| t.coeff == 0).map(|i| format!("term {i} has coefficient 0"));
    r.push("nonzero coefficients", zero);
    let shape = f.terms.iter().find_map(|t| match Simplex::new(t.simplex.clone()) {
        Err(e) => Some(e.to_string()),
        Ok(s) if s.dim() != f.dim => Some(format!("{:?} is not a {}-simplex", t.simplex, f.dim)),
        Ok(_) => None,
    });
    r.push("simplex shape", shape);
    let mut seen = BTreeSet::new();
    let dup = f.terms.iter().find_map(|t| {
        let mut s = t.simplex.clone();
        s.sort_unstable();
        (!seen.insert(s)).then(|| format!("{:?} appears twice", t.simplex))
    });
    r.push("distinct simplices", dup);
    r
}

fn validate_polytopes(v: &Value) -> ValidationReport {
    let mut r = ValidationReport { kind: "polytope", checks: Vec::new() };
    let files: Result<Vec<PolytopeFile>> = if v.get("polytopes").is_some() {
        from_value::<PolytopeListFile>(v.clone(), "polytope list").map(|l| l.polytopes)
    } else {
        from_value::<PolytopeFile>(v.clone(), "polytope").map(|p| vec![p])
    };
    let files = match files {
        Ok(f) => f,
        Err(e) => {
            r.push("structure", Some(e.to_string()));
            return r;
        }
    };
    let points: Result<Vec<Vec<RationalPoint>>> =
        files.iter().map(|f| f.points.iter().map(|p| point(p)).collect()).collect();
    match points {
        Err(e) => r.push("point coordinates", Some(e.to_string())),
        Ok(sets) => {
            r.push("point coordinates", None);
            let extremal = sets.into_iter().enumerate().find_map(|(i, pts)| {
                Polytope::new(pts)
                    .err()
                    .map(|e| if files.len() > 1 { format!("polytope {i}: {e}") } else { e.to_string() })
            });
            r.push("extremality", extremal);
        }
    }
    r
}

pub fn rational_string(x: &polytopo::rational::Q) -> Value {
    Value::String(format_rational(x))
}
