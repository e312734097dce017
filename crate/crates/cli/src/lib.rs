//! Command-line driver: corpus generation, single norms and verification runs.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or configuration
//! error, 3 domain-margin error.

pub mod io;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use smlb::grid::{GridFunction, GridSpec, Region};
use smlb::norms::{
    besov1_seminorm, besov_seminorm, lp_lu_norm, lp_norm, space_norm, tl_seminorm, Exponent, LocalBallSums,
    LocalModuli, Order, SmoothnessParams, SpaceFamily, TQuadrature, TranslationLattice, WholeSpaceNorm,
};
use smlb::testlab::{default_corpus, generate, GeneratorSpec};
use smlb::verify::{Budgets, Corpus, Harness, SuiteReport, TheoremId, VerifyConfig, SUITES};
use smlb::windows::{make_window, windowed_lu_norm, WindowPreset};
use smlb::Error;

use crate::io::ReportFormat;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "smlb", version, about = "Moduli of smoothness and localized Besov / Lizorkin-Triebel norms on sampled functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a corpus manifest and one sample file per function.
    Gen(GenArgs),
    /// Compute one norm and print it as a JSON record.
    Norm(NormArgs),
    /// Run verification suites and write report files.
    Verify(VerifyArgs),
}

/// Grid, quadrature and lattice settings shared by all commands.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Grid spacing; accepts decimals, `1/1024` or `2^-10`.
    #[arg(long, default_value = "2^-10", value_parser = parse_positive)]
    pub dx: f64,
    /// Half-width L of the sample window [-L, L].
    #[arg(long = "half-width", short = 'L', default_value_t = 8.0)]
    pub half_width: f64,
    /// Quadrature levels per octave.
    #[arg(long, default_value_t = 4)]
    pub levels: u32,
    /// Quadrature depth in octaves.
    #[arg(long, default_value_t = 10)]
    pub depth: u32,
    /// Largest quadrature scale.
    #[arg(long = "t-max", default_value_t = 1.0)]
    pub t_max: f64,
    /// Lattice step for the translation sup; defaults to radius/8.
    #[arg(long = "lattice-step", value_parser = parse_positive)]
    pub lattice_step: Option<f64>,
    /// Translations range over [-span, span].
    #[arg(long = "lattice-span", default_value_t = 1.0)]
    pub lattice_span: f64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

impl RunConfig {
    pub fn grid(&self) -> smlb::Result<GridSpec> {
        GridSpec::new(self.dx, self.half_width)
    }

    pub fn quadrature(&self) -> smlb::Result<TQuadrature> {
        TQuadrature::new(self.t_max, self.levels, self.depth)
    }

    pub fn lattice(&self, ball: &Region) -> smlb::Result<TranslationLattice> {
        let step = self.lattice_step.unwrap_or(ball.radius / 8.0);
        TranslationLattice::new(-self.lattice_span, self.lattice_span, step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CorpusChoice {
    Default,
    Custom,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value = "default")]
    pub corpus: CorpusChoice,
    /// Functions of a custom corpus, as `id=kind:params` or `kind:params`.
    #[arg(long = "func")]
    pub funcs: Vec<String>,
    #[arg(long, short, default_value = "corpus")]
    pub out: PathBuf,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Space {
    Besov,
    Tl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Global,
    LuIntrinsic,
    LuWindowed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WindowChoice {
    Phi0,
    Phi1,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    /// Manifest id (with --manifest) or inline `kind:params`, e.g. `weier:s=0.5,J=10`.
    #[arg(long)]
    pub func: String,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub space: Space,
    #[arg(long)]
    pub s: f64,
    /// Integrability exponent; `inf` allowed.
    #[arg(long)]
    pub p: Exponent,
    /// Fine index; `inf` allowed.
    #[arg(long)]
    pub q: Exponent,
    #[arg(long, value_enum, default_value = "global")]
    pub mode: Mode,
    /// Region (global mode) or ball B (localized modes) as `center,radius`.
    #[arg(long, default_value = "0,1", value_parser = parse_region)]
    pub region: Region,
    /// Window for `lu-windowed`.
    #[arg(long, value_enum, default_value = "phi0")]
    pub window: WindowChoice,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// `identities`, `malpha`, `marchaud`, `T31`..`T34`, `P21`..`P23` or `all`.
    #[arg(long, default_value = "all", value_parser = parse_suite)]
    pub suite: String,
    /// Corpus manifest; the default corpus is generated when absent.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long, short, default_value = "reports")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "jsonl")]
    pub format: ReportFormat,
    /// Override a spread budget, e.g. `T31=40`.
    #[arg(long = "budget", value_parser = parse_budget)]
    pub budgets: Vec<(TheoremId, f64)>,
    /// Grid spacing of the phi_1 one-sided check.
    #[arg(long = "one-sided-dx", default_value = "2^-8", value_parser = parse_positive)]
    pub one_sided_dx: f64,
    /// Skip the phi_1 one-sided check.
    #[arg(long = "no-one-sided")]
    pub no_one_sided: bool,
    #[command(flatten)]
    pub run: RunConfig,
}

/// Parses `0.25`, `1/1024` or `2^-10` into a positive real.
pub fn parse_positive(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v = if let Some((b, e)) = s.split_once('^') {
        let b: f64 = b.trim().parse().map_err(|_| format!("bad base in {s:?}"))?;
        let e: f64 = e.trim().parse().map_err(|_| format!("bad exponent in {s:?}"))?;
        b.powf(e)
    } else if let Some((n, d)) = s.split_once('/') {
        let n: f64 = n.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let d: f64 = d.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        n / d
    } else {
        s.parse().map_err(|_| format!("not a number: {s:?}"))?
    };
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("expected a positive number, got {s:?}"))
    }
}

fn parse_region(s: &str) -> Result<Region, String> {
    let (c, r) = s.split_once(',').ok_or_else(|| format!("expected center,radius, got {s:?}"))?;
    let c: f64 = c.trim().parse().map_err(|_| format!("bad center in {s:?}"))?;
    let r: f64 = r.trim().parse().map_err(|_| format!("bad radius in {s:?}"))?;
    Region::new(c, r).map_err(|e| e.to_string())
}

fn parse_suite(s: &str) -> Result<String, String> {
    if s == "all" {
        return Ok(s.to_string());
    }
    SUITES
        .iter()
        .find(|n| n.eq_ignore_ascii_case(s))
        .map(|n| n.to_string())
        .ok_or_else(|| format!("unknown suite {s:?}; expected all or one of {}", SUITES.join(", ")))
}

fn parse_budget(s: &str) -> Result<(TheoremId, f64), String> {
    let (id, v) = s.split_once('=').ok_or_else(|| format!("expected ID=VALUE, got {s:?}"))?;
    let id: TheoremId = id.parse().map_err(|e: Error| e.to_string())?;
    Ok((id, parse_positive(v)?))
}

/// A failure with its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain(_) => EXIT_DOMAIN,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_domain_error() {
            CliError::Domain(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

/// Parses arguments, runs the command and returns the exit code. Output goes
/// to `stdout`; diagnostics go to standard error.
pub fn run<I, T>(args: I, stdout: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a, stdout),
        Command::Norm(a) => cmd_norm(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn split_func(text: &str) -> (Option<&str>, &str) {
    match text.split_once('=') {
        Some((id, rest)) if rest.contains(':') || !id.contains(':') && !id.contains(',') => (Some(id), rest),
        _ => (None, text),
    }
}

pub fn cmd_gen(a: &GenArgs, stdout: &mut dyn std::io::Write) -> Result<i32, CliError> {
    let grid = a.run.grid()?;
    let corpus = match a.corpus {
        CorpusChoice::Default => {
            if !a.funcs.is_empty() {
                return Err(CliError::Usage("--func is only used with --corpus custom".into()));
            }
            default_corpus(a.run.seed, &grid)
        }
        CorpusChoice::Custom => {
            if a.funcs.is_empty() {
                return Err(CliError::Usage("--corpus custom needs at least one --func".into()));
            }
            let mut out = Vec::new();
            for (i, text) in a.funcs.iter().enumerate() {
                let (id, spec_text) = split_func(text);
                let mut spec = GeneratorSpec::parse_inline(spec_text)?;
                if !spec_text.contains("seed=") {
                    spec.seed = a.run.seed;
                }
                out.push((id.map_or_else(|| format!("f{i}"), str::to_string), spec.pinned(&grid)));
            }
            out
        }
    };
    // Generate everything before touching the output directory.
    let mut files = Vec::new();
    for (id, spec) in &corpus {
        if id.is_empty() || id.contains(['/', '\\']) || id.starts_with('.') {
            return Err(CliError::Usage(format!("function id {id:?} is not a valid file name")));
        }
        let g = generate(spec, &grid)?;
        files.push((a.out.join(format!("{id}.smlb")), io::encode_samples(&g.samples)));
    }
    let records = io::manifest_records(&corpus, &grid)?;
    for (path, bytes) in &files {
        io::write_atomic(path, bytes)?;
    }
    io::write_atomic(&a.out.join("manifest.jsonl"), io::manifest_to_string(&records).as_bytes())?;
    let _ = writeln!(stdout, "wrote {} functions to {}", corpus.len(), a.out.display());
    Ok(EXIT_OK)
}

fn load_function(func: &str, manifest: Option<&Path>, run: &RunConfig) -> Result<(GridFunction, String), CliError> {
    if let Some(path) = manifest {
        let (grid, corpus) = io::read_manifest(path)?;
        if let Some((id, spec)) = corpus.iter().find(|(id, _)| id == func) {
            return Ok((generate(spec, &grid)?.samples, format!("{id} ({spec})")));
        }
        if !func.contains(':') && GeneratorSpec::parse_inline(func).is_err() {
            return Err(CliError::Usage(format!("no function {func:?} in {}", path.display())));
        }
    }
    let mut spec = GeneratorSpec::parse_inline(func)?;
    if !func.contains("seed=") {
        spec.seed = run.seed;
    }
    let grid = run.grid()?;
    Ok((generate(&spec, &grid)?.samples, spec.to_string()))
}

#[derive(Serialize)]
struct QuadratureInfo {
    t_max: f64,
    levels_per_octave: u32,
    depth: u32,
    t_min: f64,
    scales: usize,
}

#[derive(Serialize)]
struct NormRecord {
    func: String,
    space: &'static str,
    s: f64,
    p: Exponent,
    q: Exponent,
    mode: Mode,
    region: Region,
    dx: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    window: Option<&'static str>,
    /// The `L_p` part (global or localized).
    #[serde(skip_serializing_if = "Option::is_none")]
    lp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seminorm: Option<f64>,
    value: f64,
    quadrature: QuadratureInfo,
}

pub fn cmd_norm(a: &NormArgs, stdout: &mut dyn std::io::Write) -> Result<i32, CliError> {
    let family = match a.space {
        Space::Besov => SpaceFamily::Besov,
        Space::Tl => SpaceFamily::LizorkinTriebel,
    };
    let sp = SmoothnessParams::new(family, a.s, a.p, a.q)?;
    let tq = a.run.quadrature()?;
    let (f, func) = load_function(&a.func, a.manifest.as_deref(), &a.run)?;
    tq.check_spacing(f.spacing())?;
    let ball = a.region;
    let (lp, seminorm, value) = match a.mode {
        Mode::Global if sp.s > 1.0 => (None, None, space_norm(&f, &sp, &tq, &ball)?),
        Mode::Global => {
            let semi = match (family, sp.order()) {
                (SpaceFamily::Besov, Order::First) => besov_seminorm(&f, &sp, &tq, &ball)?,
                (SpaceFamily::Besov, Order::Second) => besov1_seminorm(&f, &sp, &tq, &ball)?,
                (SpaceFamily::LizorkinTriebel, order) => tl_seminorm(&f, &sp, &tq, &ball, order)?,
            };
            let lp = lp_norm(&f, sp.p, &ball)?;
            (Some(lp), Some(semi), lp + semi)
        }
        Mode::LuIntrinsic => {
            if sp.s > 1.0 {
                return Err(CliError::Usage("lu-intrinsic needs s <= 1".into()));
            }
            let lat = a.run.lattice(&ball)?;
            let semi = match family {
                SpaceFamily::Besov => LocalModuli::compute(&f, sp.p, sp.order(), &ball, &lat, &tq)?.sup_seminorm(sp.s, sp.q),
                SpaceFamily::LizorkinTriebel => {
                    LocalBallSums::compute(&f, sp.order(), &ball, &lat, &tq)?.sup_seminorm(sp.s, sp.p, sp.q)
                }
            };
            let lp = lp_lu_norm(&f, sp.p, &ball, &lat)?;
            (Some(lp), Some(semi), lp + semi)
        }
        Mode::LuWindowed => {
            if sp.s > 1.0 {
                return Err(CliError::Usage("lu-windowed needs s <= 1".into()));
            }
            let lat = a.run.lattice(&ball)?;
            let preset = match a.window {
                WindowChoice::Phi0 => WindowPreset::Phi0,
                WindowChoice::Phi1 => WindowPreset::Phi1,
            };
            let w = make_window(preset, &ball)?;
            let base = match family {
                SpaceFamily::Besov => WholeSpaceNorm::besov(sp, tq)?,
                SpaceFamily::LizorkinTriebel => WholeSpaceNorm::lizorkin_triebel(sp, tq, sp.order())?,
            };
            (None, None, windowed_lu_norm(&f, &w, &base, &lat)?)
        }
    };
    let record = NormRecord {
        func,
        space: match a.space {
            Space::Besov => "besov",
            Space::Tl => "tl",
        },
        s: sp.s,
        p: sp.p,
        q: sp.q,
        mode: a.mode,
        region: ball,
        dx: f.spacing(),
        window: (a.mode == Mode::LuWindowed).then_some(match a.window {
            WindowChoice::Phi0 => "phi0",
            WindowChoice::Phi1 => "phi1",
        }),
        lp,
        seminorm,
        value,
        quadrature: QuadratureInfo {
            t_max: tq.t_max,
            levels_per_octave: tq.levels_per_octave,
            depth: tq.depth,
            t_min: tq.t_min(),
            scales: tq.len(),
        },
    };
    let _ = writeln!(stdout, "{}", serde_json::to_string(&record).expect("record serializes"));
    Ok(EXIT_OK)
}

/// Builds the verification config from flags; the grid comes from the
/// manifest when one is given.
pub fn verify_config(a: &VerifyArgs, grid: GridSpec) -> Result<VerifyConfig, CliError> {
    let ball = Region::unit();
    let mut budgets = Budgets::default();
    for (id, v) in &a.budgets {
        match id {
            TheoremId::T31 => budgets.t31 = *v,
            TheoremId::T32 => budgets.t32 = *v,
            TheoremId::T33 => budgets.t33 = *v,
            TheoremId::T34 => budgets.t34 = *v,
            TheoremId::P21 => budgets.p21 = *v,
            TheoremId::P22 => budgets.p22 = *v,
            TheoremId::P23 => budgets.p23 = *v,
        }
    }
    let config = VerifyConfig {
        grid,
        quadrature: a.run.quadrature()?,
        ball,
        lattice: a.run.lattice(&ball)?,
        budgets,
        seed: a.run.seed,
        one_sided_spacing: (!a.no_one_sided).then_some(a.one_sided_dx.max(grid.spacing)),
    };
    config.validate()?;
    Ok(config)
}

pub fn cmd_verify(a: &VerifyArgs, stdout: &mut dyn std::io::Write) -> Result<i32, CliError> {
    let (grid, specs) = match &a.manifest {
        Some(path) => io::read_manifest(path)?,
        None => {
            let grid = a.run.grid()?;
            (grid, default_corpus(a.run.seed, &grid))
        }
    };
    let config = verify_config(a, grid)?;
    let corpus = Corpus::from_specs(specs, &grid)?;
    let mut harness = Harness::new(config, corpus)?;
    let reports: Vec<SuiteReport> = if a.suite == "all" { harness.run_all()? } else { harness.run_suite(&a.suite)? };
    let mut files = Vec::with_capacity(reports.len() + 1);
    for r in &reports {
        let body = match a.format {
            ReportFormat::Jsonl => io::report_jsonl(r),
            ReportFormat::Csv => io::report_csv(r)?,
        };
        files.push((a.out.join(format!("{}.{}", r.name(), a.format.extension())), body));
    }
    let table = io::summary_table(&reports);
    files.push((a.out.join("summary.txt"), table.clone()));
    for (path, body) in &files {
        io::write_atomic(path, body.as_bytes())?;
    }
    let _ = write!(stdout, "{table}");
    Ok(if reports.iter().all(SuiteReport::pass) { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

/// Applies `SMLB_THREADS` to the global thread pool.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("SMLB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Usage(format!("SMLB_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot configure {n} threads: {e}")))
}
