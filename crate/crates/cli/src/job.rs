//! Command-line parsing into a validated [`JobSpec`].

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use convan::moreau::BoxSet;
use convan::{FnAtom, Grid};
use thiserror::Error;

/// Environment variable holding the default tolerance override.
pub const TOL_ENV: &str = "CONVAN_TOL";

#[derive(Debug, Error)]
pub enum UsageError {
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error("{0}")]
    Invalid(String),
}

impl UsageError {
    fn invalid(msg: impl Into<String>) -> Self {
        UsageError::Invalid(msg.into())
    }
}

#[derive(Debug, Parser)]
#[command(name = "convan", version, about = "Convex analysis on uniform grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Discrete Legendre–Fenchel conjugate
    Conjugate(ConjugateArgs),
    /// Conjugate of the conjugate, compared against the input
    Biconjugate(ConjugateArgs),
    /// Infimal convolution of two functions on a shared grid
    Infconv(InfconvArgs),
    /// Moreau envelope
    Envelope(EnvelopeArgs),
    /// Proximal points
    Prox(ProxArgs),
    /// Projection onto a box
    Project(ProjectArgs),
    /// Fitzpatrick function of a sampled operator graph
    Fitzpatrick(FitzpatrickArgs),
    /// Resolvent and Yosida approximation of a subdifferential
    Resolvent(ResolventArgs),
    /// Asplund averaging of two norms
    Renorm(RenormArgs),
    /// Coupon-collector objective in several forms
    Coupon(CouponArgs),
    /// Volume of unit l_p balls
    Volume(VolumeArgs),
    /// Gamma function, its product limit and the Beta integral
    Gamma(GammaArgs),
    /// Fenchel primal/dual values and their gap
    Duality(DualityArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Run the built-in golden examples for this subcommand
    #[arg(long)]
    selftest: bool,
    /// Tolerance override (default from CONVAN_TOL, then per command)
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<f64>,
    /// JSON report path (stdout when omitted)
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SourceArgs {
    /// Catalog atom name
    #[arg(long, conflicts_with = "input")]
    atom: Option<String>,
    /// Atom parameters, comma separated
    #[arg(long, allow_hyphen_values = true, requires = "atom")]
    params: Option<String>,
    /// Grid-function JSON file
    #[arg(long)]
    input: Option<PathBuf>,
    /// Sampling grid `lo:hi:count`, or two axes joined by `x`
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
}

#[derive(Debug, Args)]
struct SecondSourceArgs {
    /// Catalog atom name of the second function
    #[arg(long, conflicts_with = "input2")]
    atom2: Option<String>,
    /// Parameters of the second atom
    #[arg(long, allow_hyphen_values = true, requires = "atom2")]
    params2: Option<String>,
    /// Grid-function JSON file of the second function
    #[arg(long)]
    input2: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ConjugateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    source: SourceArgs,
    /// Dual grid (default: one covering every slope of the input)
    #[arg(long, allow_hyphen_values = true)]
    dual: Option<String>,
    /// Exact evaluation points, `x` or `x,y`; repeatable
    #[arg(long, allow_hyphen_values = true)]
    at: Vec<String>,
    /// Output file: CSV, or grid-function JSON for a `.json` path
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InfconvArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    second: SecondSourceArgs,
    /// Also check (f # g)* = f* + g* on this dual grid
    #[arg(long, allow_hyphen_values = true)]
    dual: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EnvelopeArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    lambda: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ProxArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    lambda: f64,
    /// Query points, `x` or `x,y`; repeatable
    #[arg(long, allow_hyphen_values = true)]
    at: Vec<String>,
}

#[derive(Debug, Args)]
struct ProjectArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Box `lo:hi` per axis, axes joined by `x`
    #[arg(long = "box", allow_hyphen_values = true)]
    bounds: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    at: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphMap {
    /// x* = x
    Identity,
    /// subdifferential of |x|, with five slopes sampled at 0
    Sign,
    /// planar quarter turn (x, y) -> (-y, x)
    Rotation,
    /// x* = -x, not monotone
    Negation,
}

#[derive(Debug, Args)]
struct FitzpatrickArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Operator graph JSON file `{"dim": d, "pairs": [[x, x*], ...]}`
    #[arg(long, conflicts_with = "map")]
    graph: Option<PathBuf>,
    /// Built-in map sampled at the nodes of `--grid`
    #[arg(long, value_enum)]
    map: Option<GraphMap>,
    #[arg(long, allow_hyphen_values = true, requires = "map")]
    grid: Option<String>,
    /// Query pairs `x/x*` (components comma separated); repeatable
    #[arg(long, allow_hyphen_values = true)]
    at: Vec<String>,
}

#[derive(Debug, Args)]
struct ResolventArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    lambda: f64,
    #[arg(long, allow_hyphen_values = true)]
    at: Vec<String>,
    /// Solve x + df(x) = z for this many evenly spaced targets z
    #[arg(long, default_value_t = 0)]
    targets: usize,
}

#[derive(Debug, Args)]
struct RenormArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Exponents of the two norms (1, 2 or inf)
    #[arg(long, default_value = "1,2")]
    norms: String,
    #[arg(long, default_value = "-4:4:321x-4:4:321", allow_hyphen_values = true)]
    grid: String,
    #[arg(long, default_value_t = 6)]
    steps: usize,
    /// Directory receiving p_<n>.csv and q_<n>.csv for every iterate
    #[arg(long)]
    dump: Option<PathBuf>,
    /// Node pairs for a strict-convexity probe of the last p (0 skips it)
    #[arg(long, default_value_t = 0)]
    probe_samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CouponForm {
    Perm,
    Ie,
    Integral,
    Exact,
    All,
}

#[derive(Debug, Args)]
struct CouponArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of coupons; must match the length of `--x` when both are given
    #[arg(long)]
    n: Option<usize>,
    /// Positive entries, comma separated (integers, decimals or a/b)
    #[arg(long)]
    x: Option<String>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    forms: Vec<CouponForm>,
    /// Seeded trials of the Hessian convexity probe (needs `--n`)
    #[arg(long, default_value_t = 0)]
    probe_trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct VolumeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Integer dimension
    #[arg(long, conflicts_with = "alpha")]
    n: Option<u32>,
    /// Real dimension
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Exponent, `inf` for the cube
    #[arg(long, allow_hyphen_values = true)]
    p: Option<f64>,
    /// Second exponent for the log-concavity comparison
    #[arg(long, requires = "lambda", allow_hyphen_values = true)]
    q: Option<f64>,
    #[arg(long, requires = "q", allow_hyphen_values = true)]
    lambda: Option<f64>,
}

#[derive(Debug, Args)]
struct GammaArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
    /// Factors in the product limit
    #[arg(long, default_value_t = 1_000_000)]
    terms: u64,
    /// Second Beta argument
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
}

#[derive(Debug, Args)]
struct DualityArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    second: SecondSourceArgs,
    /// Grid of the second function (default: the first grid)
    #[arg(long, allow_hyphen_values = true)]
    grid2: Option<String>,
    /// Linear map entries, row major (default: identity)
    #[arg(long, allow_hyphen_values = true)]
    map: Option<String>,
    /// Dual grid (default: one covering the slopes of the second function)
    #[arg(long, allow_hyphen_values = true)]
    dual: Option<String>,
}

/// Where a function comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum FnSource {
    Atom { atom: FnAtom, grid: Grid },
    File(PathBuf),
}

/// The subcommand of a job.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Conjugate,
    Biconjugate,
    Infconv,
    Envelope,
    Prox,
    Project,
    Fitzpatrick,
    Resolvent,
    Renorm,
    Coupon,
    Volume,
    Gamma,
    Duality,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Conjugate => "conjugate",
            Kind::Biconjugate => "biconjugate",
            Kind::Infconv => "infconv",
            Kind::Envelope => "envelope",
            Kind::Prox => "prox",
            Kind::Project => "project",
            Kind::Fitzpatrick => "fitzpatrick",
            Kind::Resolvent => "resolvent",
            Kind::Renorm => "renorm",
            Kind::Coupon => "coupon",
            Kind::Volume => "volume",
            Kind::Gamma => "gamma",
            Kind::Duality => "duality",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    File(PathBuf),
    Map { map: GraphMap, grid: Grid },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    Conjugate { f: FnSource, dual: Option<Grid>, at: Vec<Vec<f64>>, out: Option<PathBuf> },
    Biconjugate { f: FnSource, dual: Option<Grid>, out: Option<PathBuf> },
    Infconv { f: FnSource, g: FnSource, dual: Option<Grid>, out: Option<PathBuf> },
    Envelope { f: FnSource, lambda: f64, out: Option<PathBuf> },
    Prox { f: FnSource, lambda: f64, at: Vec<Vec<f64>> },
    Project { set: BoxSet, at: Vec<Vec<f64>> },
    Fitzpatrick { graph: GraphSource, at: Vec<(Vec<f64>, Vec<f64>)> },
    Resolvent { f: FnSource, lambda: f64, at: Vec<Vec<f64>>, targets: usize },
    Renorm { norms: [FnAtom; 2], grid: Grid, steps: usize, dump: Option<PathBuf>, probe_samples: usize, seed: u64 },
    Coupon { x: Option<Vec<String>>, n: Option<usize>, forms: Vec<CouponForm>, probe_trials: usize, seed: u64 },
    Volume { dim: VolumeDim, p: f64, compare: Option<(f64, f64)> },
    Gamma { x: f64, terms: u64, beta: Option<f64> },
    Duality { f: FnSource, g: FnSource, map: Option<Vec<f64>>, dual: Option<Grid> },
    SelfTest(Kind),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VolumeDim {
    Integer(u32),
    Real(f64),
}

/// A validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct JobSpec {
    pub kind: Kind,
    pub task: Task,
    /// Tolerance from `--tol`, else from the environment.
    pub tol: Option<f64>,
    pub report: Option<PathBuf>,
}

impl JobSpec {
    /// Parses `argv` (without the program name) and validates every input:
    /// atom names, grids, points, and that referenced files exist.
    pub fn parse_from<I, T>(argv: I) -> Result<JobSpec, UsageError>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let env_tol = std::env::var(TOL_ENV).ok();
        Self::parse_with_env(argv, env_tol.as_deref())
    }

    /// As [`JobSpec::parse_from`] with an explicit value for the tolerance
    /// variable.
    pub fn parse_with_env<I, T>(argv: I, env_tol: Option<&str>) -> Result<JobSpec, UsageError>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let args = std::iter::once(std::ffi::OsString::from("convan"))
            .chain(argv.into_iter().map(Into::into));
        let cli = Cli::try_parse_from(args)?;
        build(cli.command, env_tol)
    }
}

fn resolve_common(c: &CommonArgs, env_tol: Option<&str>) -> Result<(Option<f64>, Option<PathBuf>), UsageError> {
    let tol = match (c.tol, env_tol) {
        (Some(t), _) => Some(t),
        (None, Some(s)) => Some(
            s.trim()
                .parse::<f64>()
                .map_err(|_| UsageError::invalid(format!("{TOL_ENV} is not a number: `{s}`")))?,
        ),
        (None, None) => None,
    };
    if let Some(t) = tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(UsageError::invalid(format!("tolerance must be positive, got {t}")));
        }
    }
    Ok((tol, c.report.clone()))
}

fn build(cmd: Command, env_tol: Option<&str>) -> Result<JobSpec, UsageError> {
    let (kind, common) = match &cmd {
        Command::Conjugate(a) => (Kind::Conjugate, &a.common),
        Command::Biconjugate(a) => (Kind::Biconjugate, &a.common),
        Command::Infconv(a) => (Kind::Infconv, &a.common),
        Command::Envelope(a) => (Kind::Envelope, &a.common),
        Command::Prox(a) => (Kind::Prox, &a.common),
        Command::Project(a) => (Kind::Project, &a.common),
        Command::Fitzpatrick(a) => (Kind::Fitzpatrick, &a.common),
        Command::Resolvent(a) => (Kind::Resolvent, &a.common),
        Command::Renorm(a) => (Kind::Renorm, &a.common),
        Command::Coupon(a) => (Kind::Coupon, &a.common),
        Command::Volume(a) => (Kind::Volume, &a.common),
        Command::Gamma(a) => (Kind::Gamma, &a.common),
        Command::Duality(a) => (Kind::Duality, &a.common),
    };
    let (tol, report) = resolve_common(common, env_tol)?;
    let task = if common.selftest { Task::SelfTest(kind) } else { build_task(cmd)? };
    Ok(JobSpec { kind, task, tol, report })
}

fn build_task(cmd: Command) -> Result<Task, UsageError> {
    Ok(match cmd {
        Command::Conjugate(a) => Task::Conjugate {
            f: source(&a.source)?,
            dual: opt_grid(a.dual.as_deref())?,
            at: points(&a.at)?,
            out: a.out,
        },
        Command::Biconjugate(a) => {
            if !a.at.is_empty() {
                return Err(UsageError::invalid("--at is not used by biconjugate"));
            }
            Task::Biconjugate { f: source(&a.source)?, dual: opt_grid(a.dual.as_deref())?, out: a.out }
        }
        Command::Infconv(a) => {
            let f = source(&a.source)?;
            let g = second_source(&a.second, &a.source, None)?;
            Task::Infconv { f, g, dual: opt_grid(a.dual.as_deref())?, out: a.out }
        }
        Command::Envelope(a) => Task::Envelope { f: source(&a.source)?, lambda: lambda(a.lambda)?, out: a.out },
        Command::Prox(a) => {
            Task::Prox { f: source(&a.source)?, lambda: lambda(a.lambda)?, at: nonempty_points(&a.at)? }
        }
        Command::Project(a) => {
            let text = a.bounds.ok_or_else(|| UsageError::invalid("project needs --box"))?;
            let set = parse_box(&text)?;
            let at = nonempty_points(&a.at)?;
            Task::Project { set, at }
        }
        Command::Fitzpatrick(a) => {
            let graph = match (a.graph, a.map) {
                (Some(path), None) => GraphSource::File(existing(path)?),
                (None, Some(map)) => {
                    let text = a.grid.ok_or_else(|| UsageError::invalid("--map needs --grid"))?;
                    GraphSource::Map { map, grid: grid(&text)? }
                }
                _ => return Err(UsageError::invalid("fitzpatrick needs --graph or --map")),
            };
            let at = a.at.iter().map(|s| query_pair(s)).collect::<Result<Vec<_>, _>>()?;
            Task::Fitzpatrick { graph, at }
        }
        Command::Resolvent(a) => {
            if a.at.is_empty() && a.targets == 0 {
                return Err(UsageError::invalid("resolvent needs --at or --targets"));
            }
            Task::Resolvent {
                f: source(&a.source)?,
                lambda: lambda(a.lambda)?,
                at: points(&a.at)?,
                targets: a.targets,
            }
        }
        Command::Renorm(a) => {
            let exps = number_list(&a.norms)?;
            if exps.len() != 2 {
                return Err(UsageError::invalid(format!("--norms needs two exponents, got `{}`", a.norms)));
            }
            let atom = |p: f64| FnAtom::from_tag("normsq", &[p]).map_err(|e| UsageError::invalid(e.to_string()));
            Task::Renorm {
                norms: [atom(exps[0])?, atom(exps[1])?],
                grid: grid(&a.grid)?,
                steps: a.steps,
                dump: a.dump,
                probe_samples: a.probe_samples,
                seed: a.seed,
            }
        }
        Command::Coupon(a) => {
            let x: Option<Vec<String>> =
                a.x.as_ref().map(|s| s.split(',').map(|t| t.trim().to_string()).collect());
            if let Some(x) = &x {
                for t in x {
                    convan::special::parse_rational(t).map_err(|e| UsageError::invalid(e.to_string()))?;
                }
                if let Some(n) = a.n {
                    if n != x.len() {
                        return Err(UsageError::invalid(format!("--n {n} but --x has {} entries", x.len())));
                    }
                }
            }
            if x.is_none() && a.probe_trials == 0 {
                return Err(UsageError::invalid("coupon needs --x or --probe-trials"));
            }
            if a.probe_trials > 0 && a.n.is_none() {
                return Err(UsageError::invalid("--probe-trials needs --n"));
            }
            Task::Coupon { x, n: a.n, forms: a.forms, probe_trials: a.probe_trials, seed: a.seed }
        }
        Command::Volume(a) => {
            let dim = match (a.n, a.alpha) {
                (Some(n), None) => VolumeDim::Integer(n),
                (None, Some(al)) => VolumeDim::Real(al),
                _ => return Err(UsageError::invalid("volume needs --n or --alpha")),
            };
            let p = a.p.ok_or_else(|| UsageError::invalid("volume needs --p"))?;
            Task::Volume { dim, p, compare: a.q.zip(a.lambda) }
        }
        Command::Gamma(a) => {
            let x = a.x.ok_or_else(|| UsageError::invalid("gamma needs --x"))?;
            Task::Gamma { x, terms: a.terms, beta: a.beta }
        }
        Command::Duality(a) => {
            let f = source(&a.source)?;
            let g = second_source(&a.second, &a.source, a.grid2.as_deref())?;
            let map = a.map.as_deref().map(number_list).transpose()?;
            Task::Duality { f, g, map, dual: opt_grid(a.dual.as_deref())? }
        }
    })
}

fn existing(path: PathBuf) -> Result<PathBuf, UsageError> {
    if Path::new(&path).is_file() {
        Ok(path)
    } else {
        Err(UsageError::invalid(format!("file not found: {}", path.display())))
    }
}

fn grid(text: &str) -> Result<Grid, UsageError> {
    text.parse::<Grid>().map_err(|e| UsageError::invalid(e.to_string()))
}

fn opt_grid(text: Option<&str>) -> Result<Option<Grid>, UsageError> {
    text.map(grid).transpose()
}

fn lambda(v: f64) -> Result<f64, UsageError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(UsageError::invalid(format!("--lambda must be positive, got {v}")))
    }
}

fn number_list(text: &str) -> Result<Vec<f64>, UsageError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| UsageError::invalid(format!("malformed number `{t}` in `{text}`")))
        })
        .collect()
}

fn atom(name: &str, params: Option<&str>) -> Result<FnAtom, UsageError> {
    let params = params.map(number_list).transpose()?.unwrap_or_default();
    FnAtom::from_tag(name, &params).map_err(|e| UsageError::invalid(e.to_string()))
}

fn atom_on(name: &str, params: Option<&str>, grid_text: Option<&str>) -> Result<FnSource, UsageError> {
    let atom = atom(name, params)?;
    let text = grid_text.ok_or_else(|| UsageError::invalid("an --atom source needs --grid"))?;
    let grid = grid(text)?;
    if grid.dim() != atom.arity() {
        return Err(UsageError::invalid(format!(
            "atom `{name}` takes {} argument(s) but the grid has {} axes",
            atom.arity(),
            grid.dim()
        )));
    }
    Ok(FnSource::Atom { atom, grid })
}

fn source(s: &SourceArgs) -> Result<FnSource, UsageError> {
    match (&s.atom, &s.input) {
        (Some(name), None) => atom_on(name, s.params.as_deref(), s.grid.as_deref()),
        (None, Some(path)) => Ok(FnSource::File(existing(path.clone())?)),
        _ => Err(UsageError::invalid("give a function with --atom or --input")),
    }
}

fn second_source(s: &SecondSourceArgs, first: &SourceArgs, grid2: Option<&str>) -> Result<FnSource, UsageError> {
    match (&s.atom2, &s.input2) {
        (Some(name), None) => atom_on(name, s.params2.as_deref(), grid2.or(first.grid.as_deref())),
        (None, Some(path)) => Ok(FnSource::File(existing(path.clone())?)),
        _ => Err(UsageError::invalid("give the second function with --atom2 or --input2")),
    }
}

fn point(text: &str) -> Result<Vec<f64>, UsageError> {
    let p = number_list(text)?;
    if p.is_empty() || p.len() > 2 || p.iter().any(|v| !v.is_finite()) {
        return Err(UsageError::invalid(format!("a point has one or two finite components, got `{text}`")));
    }
    Ok(p)
}

fn points(texts: &[String]) -> Result<Vec<Vec<f64>>, UsageError> {
    texts.iter().map(|t| point(t)).collect()
}

fn nonempty_points(texts: &[String]) -> Result<Vec<Vec<f64>>, UsageError> {
    if texts.is_empty() {
        return Err(UsageError::invalid("at least one --at point is required"));
    }
    points(texts)
}

fn query_pair(text: &str) -> Result<(Vec<f64>, Vec<f64>), UsageError> {
    let (x, xs) = text
        .split_once('/')
        .ok_or_else(|| UsageError::invalid(format!("expected `x/x*`, got `{text}`")))?;
    let (x, xs) = (point(x)?, point(xs)?);
    if x.len() != xs.len() {
        return Err(UsageError::invalid(format!("`{text}` mixes dimensions")));
    }
    Ok((x, xs))
}

fn parse_box(text: &str) -> Result<BoxSet, UsageError> {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for part in text.split('x') {
        let bounds = part.split(':').collect::<Vec<_>>();
        let [a, b] = bounds.as_slice() else {
            return Err(UsageError::invalid(format!("expected lo:hi per axis, got `{part}`")));
        };
        let num = |t: &str| {
            t.trim().parse::<f64>().map_err(|_| UsageError::invalid(format!("malformed number `{t}`")))
        };
        lo.push(num(a)?);
        hi.push(num(b)?);
    }
    BoxSet::new(lo, hi).map_err(|e| UsageError::invalid(format!("bad box `{text}`: {e}")))
}
