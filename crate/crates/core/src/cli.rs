//! Command-line front end.
//!
//! Exit codes: 0 success, 1 parse or configuration error, 2 check failed,
//! 3 computation error. Outputs go to stdout unless `--out DIR` is given.

use crate::boundary_r::{default_r_grid, BoundaryCurveR};
use crate::boundary_t::{uniform_thetas, BoundaryCurveT};
use crate::error::Error;
use crate::fmt_f64;
use crate::freepower::{PowerConfig, PowerResult, Prepared};
use crate::herglotz::Rep;
use crate::measures::{membership, Measure, Space};
use crate::oracle::oracle_density;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;

/// Bound on the scaled deviation used by `oracle-compare` for its exit status.
pub const ORACLE_TOL: f64 = 1e-3;

#[derive(Debug, Parser)]
#[command(name = "mfree", version, about = "Multiplicative free convolution powers on the half-line and the circle")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that the measure belongs to the admissible class.
    Check(Common),
    /// Extract the representation measure rho of log kappa.
    Rep(Common),
    /// Sample the boundary of the subordination domain.
    Boundary(Common),
    /// Density of the power.
    Density(Common),
    /// Atoms of the power.
    Atoms(Common),
    /// Support components of the power.
    Support(Common),
    /// Component counts over a list of t values.
    Sweep(Common),
    /// Maximum deviation between the density formula and the subordination oracle.
    OracleCompare(Common),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Measure JSON file.
    #[arg(long)]
    pub input: PathBuf,
    /// Power t >= 1.
    #[arg(long)]
    pub t: Option<f64>,
    /// Comma-separated ascending t values.
    #[arg(long, value_delimiter = ',')]
    pub t_list: Option<Vec<f64>>,
    /// Representation and boundary grid size.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Density nodes per piece of the boundary parametrization.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Offset from the boundary used by the oracle inversion.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Output directory; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON file with defaults for grid, nodes, eps and format; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    grid: Option<usize>,
    nodes: Option<usize>,
    eps: Option<f64>,
    format: Option<Format>,
}

/// Resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: &'static str,
    pub input: PathBuf,
    pub ts: Vec<f64>,
    pub grid: usize,
    pub nodes: usize,
    pub eps: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    fn power_config(&self) -> PowerConfig {
        PowerConfig { grid: self.grid, density_nodes: self.nodes }
    }

    fn single_t(&self) -> Result<f64, String> {
        match self.ts.as_slice() {
            [t] => Ok(*t),
            [] => Err(format!("{} needs --t", self.command)),
            _ => Err(format!("{} takes a single --t", self.command)),
        }
    }
}

fn resolve(name: &'static str, c: &Common) -> Result<RunConfig, String> {
    let file = match &c.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?;
            serde_json::from_str::<ConfigFile>(&text).map_err(|e| format!("malformed config {}: {e}", p.display()))?
        }
        None => ConfigFile::default(),
    };
    let defaults = PowerConfig::default();
    let ts = match (c.t, &c.t_list) {
        (Some(_), Some(_)) => return Err("give either --t or --t-list".into()),
        (Some(t), None) => vec![t],
        (None, Some(l)) => l.clone(),
        (None, None) => vec![],
    };
    let cfg = RunConfig {
        command: name,
        input: c.input.clone(),
        ts,
        grid: c.grid.or(file.grid).unwrap_or(defaults.grid),
        nodes: c.nodes.or(file.nodes).unwrap_or(defaults.density_nodes),
        eps: c.eps.or(file.eps).unwrap_or(1e-7),
        out: c.out.clone(),
        format: c.format.or(file.format).unwrap_or(Format::Csv),
    };
    if cfg.ts.iter().any(|&t| !(t >= 1.0 && t.is_finite())) {
        return Err("t values must be finite and at least 1".into());
    }
    if cfg.ts.windows(2).any(|w| w[1] <= w[0]) {
        return Err("--t-list must be strictly ascending".into());
    }
    if cfg.grid < 64 {
        return Err("--grid must be at least 64".into());
    }
    if cfg.nodes < 8 {
        return Err("--nodes must be at least 8".into());
    }
    if !(cfg.eps > 0.0 && cfg.eps < 1.0) {
        return Err("--eps must lie in (0, 1)".into());
    }
    Ok(cfg)
}

/// Failure of a command, mapped to an exit code.
enum Failure {
    Parse(String),
    Compute(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (name, common) = match &cli.command {
        Command::Check(c) => ("check", c),
        Command::Rep(c) => ("rep", c),
        Command::Boundary(c) => ("boundary", c),
        Command::Density(c) => ("density", c),
        Command::Atoms(c) => ("atoms", c),
        Command::Support(c) => ("support", c),
        Command::Sweep(c) => ("sweep", c),
        Command::OracleCompare(c) => ("oracle-compare", c),
    };
    let outcome = resolve(name, common).map_err(Failure::Parse).and_then(|cfg| dispatch(&cfg));
    match outcome {
        Ok(code) => code,
        Err(Failure::Parse(msg)) => {
            eprintln!("error: {msg}");
            EXIT_PARSE
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error [{name}]: {e}");
            EXIT_COMPUTE
        }
        Err(Failure::Io(e)) => {
            eprintln!("error [{name}]: {e}");
            EXIT_COMPUTE
        }
    }
}

fn load(cfg: &RunConfig) -> Result<Measure, Failure> {
    let text = std::fs::read_to_string(&cfg.input)
        .map_err(|e| Failure::Parse(format!("cannot read {}: {e}", cfg.input.display())))?;
    Measure::from_json(&text).map_err(|e| Failure::Parse(e.to_string()))
}

fn dispatch(cfg: &RunConfig) -> Result<i32, Failure> {
    let mu = load(cfg)?;
    match cfg.command {
        "check" => cmd_check(&mu),
        "rep" => cmd_rep(&mu, cfg),
        "boundary" => cmd_boundary(&mu, cfg),
        "density" | "atoms" | "support" => cmd_power(&mu, cfg),
        "sweep" => cmd_sweep(&mu, cfg),
        "oracle-compare" => cmd_oracle_compare(&mu, cfg),
        other => Err(Failure::Parse(format!("unknown command {other}"))),
    }
}

/// Write `body` to `dir/name` or to stdout.
fn emit(cfg: &RunConfig, stem: &str, body: &[u8]) -> Result<(), Failure> {
    match &cfg.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let ext = match cfg.format {
                Format::Csv => "csv",
                Format::Json => "json",
            };
            std::fs::write(dir.join(format!("{stem}.{ext}")), body)?;
        }
        None => std::io::stdout().write_all(body)?,
    }
    Ok(())
}

fn json_bytes(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

/// File stem carrying t, e.g. `density_t2` or `density_t1.5`.
fn stem(name: &str, t: f64) -> String {
    format!("{name}_t{t}")
}

fn cmd_check(mu: &Measure) -> Result<i32, Failure> {
    let report = membership(mu)?;
    let body = json!({
        "pass": report.pass,
        "reasons": report.reasons,
        "mean": report.mean,
        "zero_count": report.zero_count,
        "samples": report.samples,
    });
    std::io::stdout().write_all(&json_bytes(&body))?;
    Ok(if report.pass { EXIT_OK } else { EXIT_FAIL })
}

fn prepare(mu: &Measure, cfg: &RunConfig) -> Result<Prepared, Failure> {
    Ok(Prepared::new(mu, cfg.power_config())?)
}

fn cmd_rep(mu: &Measure, cfg: &RunConfig) -> Result<i32, Failure> {
    let p = prepare(mu, cfg)?;
    let body = match cfg.format {
        Format::Json => json_bytes(&match &p {
            Prepared::R { rep, .. } => Rep::R(rep.clone()).to_json(),
            Prepared::T { rep, .. } => Rep::T(rep.clone()).to_json(),
        }),
        Format::Csv => {
            let mut b = vec![];
            match &p {
                Prepared::R { rep, .. } => {
                    writeln!(b, "x,rho_density")?;
                    if let Some(d) = &rep.density {
                        for (x, v) in d.grid.iter().zip(&d.values) {
                            writeln!(b, "{},{}", fmt_f64(*x), fmt_f64(*v))?;
                        }
                    }
                }
                Prepared::T { rep, .. } => {
                    writeln!(b, "theta,rho_density")?;
                    for (x, v) in rep.grid().iter().zip(&rep.values) {
                        writeln!(b, "{},{}", fmt_f64(*x), fmt_f64(*v))?;
                    }
                }
            }
            b
        }
    };
    emit(cfg, "rep", &body)?;
    Ok(EXIT_OK)
}

fn cmd_boundary(mu: &Measure, cfg: &RunConfig) -> Result<i32, Failure> {
    let t = cfg.single_t().map_err(Failure::Parse)?;
    if t == 1.0 {
        return Err(Failure::Parse("boundary needs t > 1".into()));
    }
    let p = prepare(mu, cfg)?;
    let mut b = vec![];
    match &p {
        Prepared::R { mu, rep, .. } => {
            let curve = BoundaryCurveR::compute(mu, rep, t, default_r_grid(mu, cfg.grid))?;
            match cfg.format {
                Format::Csv => curve.write_csv(&mut b)?,
                Format::Json => {
                    b = json_bytes(&json!({
                        "t": t,
                        "r": curve.r_grid,
                        "A_t": curve.angles,
                        "g": curve.g.iter().map(|&g| finite_or_null(g)).collect::<Vec<_>>(),
                        "h_t": curve.h_values,
                        "vt_plus": curve.vt_plus.iter().map(|&(a, c)| [finite_or_null(a), finite_or_null(c)]).collect::<Vec<_>>(),
                    }))
                }
            }
        }
        Prepared::T { rep, .. } => {
            let curve = BoundaryCurveT::compute(rep, t, uniform_thetas(cfg.grid))?;
            match cfg.format {
                Format::Csv => curve.write_csv(&mut b)?,
                Format::Json => {
                    b = json_bytes(&json!({
                        "t": t,
                        "theta": curve.thetas,
                        "R_t": curve.radii,
                        "g": curve.g.iter().map(|&g| finite_or_null(g)).collect::<Vec<_>>(),
                        "arg_h_t": curve.h.iter().map(|h| h.arg()).collect::<Vec<_>>(),
                        "vt_plus": curve.vt_plus,
                    }))
                }
            }
        }
    }
    emit(cfg, &stem("boundary", t), &b)?;
    Ok(EXIT_OK)
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn cmd_power(mu: &Measure, cfg: &RunConfig) -> Result<i32, Failure> {
    let t = cfg.single_t().map_err(Failure::Parse)?;
    let r = prepare(mu, cfg)?.power(t)?;
    let body = match (cfg.command, cfg.format) {
        ("density", Format::Json) => json_bytes(&r.to_json()),
        ("density", Format::Csv) => {
            let mut b = vec![];
            r.write_density_csv(&mut b)?;
            b
        }
        ("atoms", Format::Json) => json_bytes(&json!({ "t": t, "atoms": r.atoms })),
        ("atoms", Format::Csv) => {
            let mut b = vec![];
            writeln!(b, "position,mass")?;
            for a in &r.atoms {
                writeln!(b, "{},{}", fmt_f64(a.pos), fmt_f64(a.mass))?;
            }
            b
        }
        (_, Format::Json) => json_bytes(&json!({
            "t": t,
            "components": r.components,
            "component_count": r.component_count,
            "mass_balance": r.mass_balance,
        })),
        (_, Format::Csv) => {
            let mut b = vec![];
            writeln!(b, "lo,hi")?;
            for &(lo, hi) in &r.components {
                writeln!(b, "{},{}", fmt_f64(lo), fmt_f64(hi))?;
            }
            b
        }
    };
    emit(cfg, &stem(cfg.command, t), &body)?;
    Ok(EXIT_OK)
}

fn cmd_sweep(mu: &Measure, cfg: &RunConfig) -> Result<i32, Failure> {
    if cfg.ts.is_empty() {
        return Err(Failure::Parse("sweep needs --t-list".into()));
    }
    let p = prepare(mu, cfg)?;
    let results: Vec<PowerResult> = cfg.ts.iter().map(|&t| p.power(t)).collect::<crate::Result<_>>()?;
    let body = match cfg.format {
        Format::Json => json_bytes(&json!({
            "t": cfg.ts,
            "component_count": results.iter().map(|r| r.component_count).collect::<Vec<_>>(),
            "mass_balance": results.iter().map(|r| r.mass_balance).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut b = vec![];
            writeln!(b, "t,component_count,mass_balance")?;
            for r in &results {
                writeln!(b, "{},{},{}", fmt_f64(r.t), r.component_count, fmt_f64(r.mass_balance))?;
            }
            b
        }
    };
    emit(cfg, "sweep", &body)?;
    Ok(EXIT_OK)
}

/// Samples of the formula density lying in the interior 80% of their component.
pub fn interior_samples(r: &PowerResult) -> Vec<(f64, f64)> {
    let mut out = vec![];
    for d in &r.density {
        let inside = r.components.iter().any(|&(a, b)| {
            if b - a <= 0.0 {
                return false;
            }
            match r.space {
                Space::Rplus => {
                    let (lo, hi) = (a + 0.1 * (b - a), b - 0.1 * (b - a));
                    d.location > lo && d.location < hi
                }
                Space::T => {
                    if b - a >= 2.0 * PI - 1e-12 {
                        return true;
                    }
                    let x = a + (d.location - a).rem_euclid(2.0 * PI);
                    x > a + 0.1 * (b - a) && x < b - 0.1 * (b - a)
                }
            }
        });
        if inside {
            out.push((d.location, d.value));
        }
    }
    out
}

/// Deviation between formula and oracle densities over the interior samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleDeviation {
    /// max |formula - oracle|.
    pub absolute: f64,
    /// max |formula - oracle| / max(1, oracle), bounded near density singularities.
    pub scaled: f64,
    pub samples: usize,
}

pub fn oracle_deviation(mu: &Measure, r: &PowerResult, eps: f64) -> crate::Result<OracleDeviation> {
    let s = interior_samples(r);
    let locs: Vec<f64> = s.iter().map(|v| v.0).collect();
    let o = oracle_density(mu, r.t, &locs, eps)?;
    let mut dev = OracleDeviation { absolute: 0.0, scaled: 0.0, samples: s.len() };
    for (a, b) in s.iter().zip(&o) {
        let d = (a.1 - b).abs();
        dev.absolute = dev.absolute.max(d);
        dev.scaled = dev.scaled.max(d / b.abs().max(1.0));
    }
    Ok(dev)
}

fn cmd_oracle_compare(mu: &Measure, cfg: &RunConfig) -> Result<i32, Failure> {
    let t = cfg.single_t().map_err(Failure::Parse)?;
    let r = prepare(mu, cfg)?.power(t)?;
    let dev = oracle_deviation(mu, &r, cfg.eps)?;
    let pass = dev.scaled <= ORACLE_TOL;
    let body = match cfg.format {
        Format::Json => json_bytes(&json!({
            "t": t,
            "eps": cfg.eps,
            "samples": dev.samples,
            "max_deviation": dev.absolute,
            "max_scaled_deviation": dev.scaled,
            "pass": pass,
        })),
        Format::Csv => {
            let mut b = vec![];
            writeln!(b, "t,eps,samples,max_deviation,max_scaled_deviation,pass")?;
            let (ft, fe) = (fmt_f64(t), fmt_f64(cfg.eps));
            writeln!(b, "{ft},{fe},{},{},{},{pass}", dev.samples, fmt_f64(dev.absolute), fmt_f64(dev.scaled))?;
            b
        }
    };
    emit(cfg, &stem("oracle_compare", t), &body)?;
    Ok(if pass { EXIT_OK } else { EXIT_FAIL })
}

/// Read a measure file, for tests and tools.
pub fn read_measure(path: &Path) -> crate::Result<Measure> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidMeasure(format!("{}: {e}", path.display())))?;
    Measure::from_json(&text)
}
