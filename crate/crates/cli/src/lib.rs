//! Command-line front end for `polytopo`.

pub mod commands;
pub mod io;
pub mod manifest;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::time::Instant;

use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use polytopo::limits::Limits;
use polytopo::{Error, Result};
use serde_json::Value;

use manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "polytopo", version, about = "Exact simplicial geometry, flat norms and cohomology operations")]
pub struct Cli {
    /// Seed for every sampling stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
#[group(skip)]
pub struct Output {
    /// Artifact path; a manifest is written next to it. Defaults to stdout.
    #[arg(short, long)]
    pub output: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Triangulate a convex polytope.
    Tri {
        polytope: String,
        #[command(flatten)]
        out: Output,
    },
    /// Subdivide a complex until the given polytopes are unions of simplices.
    Refine {
        complex: String,
        polytopes: String,
        /// Treat the complex as a manifold polyhedron (possibly with boundary).
        #[arg(long)]
        polyhedron: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Homology groups.
    Homology {
        complex: String,
        /// z, z2, z3, z5, ...
        #[arg(long, default_value = "z")]
        coeff: String,
        #[command(flatten)]
        out: Output,
    },
    /// Flat norm of an integer chain.
    Flatnorm {
        complex: String,
        chain: String,
        /// Exhaustive search with this coefficient bound instead of the LP.
        #[arg(long)]
        bruteforce: Option<i64>,
        #[arg(long)]
        csv: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Steenrod algebra and its action on cohomology.
    Steenrod {
        #[command(subcommand)]
        action: SteenrodAction,
    },
    /// Bockstein of each generator of `H^d(K; Z/p)`.
    Bockstein {
        complex: String,
        #[arg(long, default_value_t = 2)]
        prime: u64,
        #[arg(long)]
        degree: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Sample the radial profiles.
    Profile {
        #[arg(value_enum)]
        which: ProfileKind,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        delta_a: f64,
        #[arg(long)]
        eta: f64,
        #[arg(long, default_value_t = 1001)]
        samples: usize,
        /// Right end of the grid; defaults to `1.5 η`.
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        csv: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Numerical experiments on the deformation maps.
    Experiment {
        #[command(subcommand)]
        kind: ExperimentKind,
    },
    /// Iterated barycentric subdivision.
    Subdivide {
        complex: String,
        #[arg(long, default_value_t = 1)]
        times: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Dual skeleton of a closed manifold, or the complement of `Bs(K^j)`.
    Dual {
        complex: String,
        #[arg(long, conflicts_with = "complement", required_unless_present = "complement")]
        dim: Option<usize>,
        #[arg(long)]
        complement: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Check the invariants of a complex, chain or polytope file.
    Validate { file: String },
    /// Write a built-in complex.
    Fixture {
        name: String,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Debug, Subcommand)]
pub enum SteenrodAction {
    /// Reduce a word to the admissible basis.
    Reduce {
        /// Comma separated, e.g. `2,2` or `b,P1`.
        word: String,
        #[arg(long, default_value_t = 2)]
        prime: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Apply a mod-2 word to each generator of `H^d(K; Z/2)`.
    Apply {
        complex: String,
        #[arg(long)]
        word: String,
        #[arg(long)]
        degree: usize,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExperimentKind {
    /// Mass ratio of a flat chain under a product-chart squash.
    Squash {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.25,0.125")]
        gamma: Vec<f64>,
        #[arg(long, default_value_t = 0.05)]
        eps_a: f64,
        #[arg(long, default_value_t = 0.2)]
        delta_a: f64,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        /// Half side of the chain's parameter cube.
        #[arg(long, default_value = "1/8")]
        half_width: String,
        #[arg(long)]
        csv: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Boundary regularity audit of a graded neighbourhood.
    Audit {
        complex: String,
        #[arg(long, default_value_t = 1)]
        j: usize,
        #[arg(long, default_value = "4")]
        c0: String,
        /// Defaults to one eighth of the shortest edge.
        #[arg(long)]
        delta: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProfileKind {
    Phi,
    Psi,
}

pub enum Artifact {
    Json(Value),
    Csv(String),
}

impl Artifact {
    pub fn render(&self) -> String {
        match self {
            Artifact::Json(v) => io::canonical_json(v),
            Artifact::Csv(s) => s.clone(),
        }
    }
}

/// Per-run state: size guards and the manifest under construction.
pub struct Context {
    pub limits: Limits,
    pub manifest: RunManifest,
}

impl Context {
    pub fn record_input(&mut self, input: &str) -> Result<()> {
        let bytes = if input.starts_with("fixture:") {
            input.as_bytes().to_vec()
        } else {
            std::fs::read(input).map_err(|e| Error::input(format!("cannot read {input}: {e}")))?
        };
        self.manifest.inputs.insert(input.to_string(), manifest::digest(&bytes));
        Ok(())
    }
}

fn collect_params(m: &ArgMatches, path: &mut Vec<String>, params: &mut BTreeMap<String, Value>) {
    for id in m.ids() {
        let id = id.as_str();
        if id == "output" || id == "seed" {
            continue;
        }
        if let Ok(Some(raw)) = m.try_get_raw(id) {
            let vals: Vec<String> = raw.map(|v| v.to_string_lossy().into_owned()).collect();
            let v = if vals.len() == 1 { Value::String(vals[0].clone()) } else { Value::from(vals) };
            params.insert(id.to_string(), v);
        }
    }
    if let Some((name, sub)) = m.subcommand() {
        path.push(name.to_string());
        collect_params(sub, path, params);
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match Cli::command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return 2;
        }
    };
    let mut path = Vec::new();
    let mut params = BTreeMap::new();
    collect_params(&matches, &mut path, &mut params);
    let mut ctx = Context {
        limits: Limits::from_env(),
        manifest: RunManifest { command: path.join(" "), params, seed: cli.seed, ..Default::default() },
    };
    match execute(&cli, &mut ctx) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, ctx: &mut Context) -> Result<i32> {
    let start = Instant::now();
    if let Command::Validate { file } = &cli.command {
        let report = io::validate(&io::read_text(file)?)?;
        print!("{}", io::canonical_json(&report.to_value()));
        return Ok(if report.passed() { 0 } else { 2 });
    }
    let (artifact, out) = commands::dispatch(cli, ctx)?;
    let body = artifact.render();
    match &out.output {
        Some(path) => {
            std::fs::write(path, &body)?;
            ctx.manifest.outputs.insert(path.clone(), manifest::digest(body.as_bytes()));
            if manifest::timing_enabled() {
                ctx.manifest.timing = Some(start.elapsed().as_secs_f64());
            }
            std::fs::write(format!("{path}.manifest.json"), io::canonical_json(&ctx.manifest.to_value()))?;
        }
        None => print!("{body}"),
    }
    Ok(0)
}
