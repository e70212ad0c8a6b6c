//! `fuzzy`: table generation and verification for the fuzzy-sphere algebra.

mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::Config;
use fuzzy_core::{
    build_table, parse_half_int, parse_rational, run_verify, ParamPoint, Rational, Report, Suite, Table, TableKind,
    TableRequest, VerifyConfig,
};

/// Environment variable naming the directory for output files.
const OUT_DIR_ENV: &str = "FUZZY_OUT_DIR";

#[derive(Parser)]
#[command(name = "fuzzy", version, about = "Exact tables and checks for the Jordan-Schwinger fuzzy sphere")]
struct Cli {
    /// Flat `key = value` file; flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structure constants Xi(l1) Xi(l2) = sum c Xi(l).
    Structure(Common),
    /// Reduced matrix elements with m-independence checked.
    Reduced(Common),
    /// Closed-form norms and signs.
    Norms(Common),
    /// Hahn polynomial values.
    Hahn(Common),
    /// Clebsch-Gordan coefficients.
    Cg(Common),
    /// Classical-limit residuals against the rotation-matrix forms.
    Classical(Common),
    /// Run the property suites; exit code 0 iff every check passes.
    Verify(VerifyArgs),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Largest n, as a half-integer such as `3/2`.
    #[arg(long)]
    nmax: Option<String>,
    /// Deformation parameter, a rational.
    #[arg(long)]
    eps: Option<String>,
    /// Fuzzy level; sets Rh = eps (k + 1/2).
    #[arg(long)]
    k: Option<String>,
    /// Radius parameter Rh, a rational.
    #[arg(long)]
    rhat: Option<String>,
    /// Keep eps and Rh symbolic.
    #[arg(long)]
    symbolic: bool,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Raise the n_max cap; large values take a long time.
    #[arg(long, value_name = "NMAX")]
    override_cap: Option<String>,
}

#[derive(Args, Clone, Default)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Suite to run; repeat or separate with commas. All suites by default.
    #[arg(long)]
    suite: Vec<String>,
    /// Random triples for the associativity suite.
    #[arg(long)]
    triples: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Flags layered over the config file.
struct Settings<'a> {
    args: &'a Common,
    config: &'a Config,
}

impl Settings<'_> {
    fn get(&self, key: &str, flag: &Option<String>) -> Option<String> {
        flag.clone().or_else(|| self.config.get(key).map(str::to_string))
    }

    fn rational(&self, key: &str, flag: &Option<String>) -> Result<Option<Rational>> {
        self.get(key, flag).map(|s| parse_rational(&s).with_context(|| format!("--{key}"))).transpose()
    }

    fn half_int(&self, key: &str, flag: &Option<String>) -> Result<Option<i32>> {
        self.get(key, flag).map(|s| parse_half_int(&s).with_context(|| format!("--{key}"))).transpose()
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.config
            .get(key)
            .map(|s| s.parse::<T>().map_err(|e| anyhow!("config {key}: {e}")))
            .transpose()
    }

    fn symbolic(&self) -> Result<bool> {
        Ok(self.args.symbolic || self.parsed::<bool>("symbolic", None)?.unwrap_or(false))
    }

    fn format(&self, default: Format) -> Result<Format> {
        if let Some(f) = self.args.format {
            return Ok(f);
        }
        match self.config.get("format") {
            None => Ok(default),
            Some("csv") => Ok(Format::Csv),
            Some("json") => Ok(Format::Json),
            Some(other) => bail!("config format: expected csv or json, got {other:?}"),
        }
    }

    /// The point named by eps/k/rhat, if any was given.
    fn explicit_point(&self) -> Result<Option<ParamPoint>> {
        if self.symbolic()? {
            return Ok(Some(ParamPoint::symbolic()));
        }
        let eps = self.rational("eps", &self.args.eps)?;
        let k2 = self.half_int("k", &self.args.k)?;
        let rhat = self.rational("rhat", &self.args.rhat)?;
        if eps.is_none() && k2.is_none() && rhat.is_none() {
            return Ok(None);
        }
        let eps = eps.unwrap_or_else(|| Rational::from_integer(1.into()));
        let p = match (k2, rhat) {
            (Some(_), Some(_)) => bail!("give at most one of --k and --rhat"),
            (Some(k2), None) => ParamPoint::at_level(eps, k2)?,
            (None, Some(rh)) => ParamPoint::numeric(eps, rh)?,
            (None, None) => ParamPoint::numeric(eps, Rational::from_integer(1.into()))?,
        };
        Ok(Some(p))
    }

    fn out_path(&self, default_name: &str) -> Result<Option<PathBuf>> {
        let out = self.args.out.clone().or_else(|| self.config.get("out").map(PathBuf::from));
        let dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
        Ok(match (out, dir) {
            (Some(p), Some(d)) if p.is_relative() => Some(d.join(p)),
            (Some(p), _) => Some(p),
            (None, Some(d)) => Some(d.join(default_name)),
            (None, None) => None,
        })
    }
}

fn table_kind(c: &Command) -> Option<TableKind> {
    Some(match c {
        Command::Structure(_) => TableKind::Structure,
        Command::Reduced(_) => TableKind::Reduced,
        Command::Norms(_) => TableKind::Norms,
        Command::Hahn(_) => TableKind::Hahn,
        Command::Cg(_) => TableKind::Cg,
        Command::Classical(_) => TableKind::Classical,
        Command::Verify(_) => return None,
    })
}

fn kind_name(k: TableKind) -> &'static str {
    match k {
        TableKind::Structure => "structure",
        TableKind::Reduced => "reduced",
        TableKind::Norms => "norms",
        TableKind::Hahn => "hahn",
        TableKind::Cg => "cg",
        TableKind::Classical => "classical",
    }
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn csv_bytes(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(w.into_inner().map_err(|e| anyhow!("csv: {e}"))?)
}

fn render_table(t: &Table, f: Format) -> Result<Vec<u8>> {
    match f {
        Format::Csv => csv_bytes(&t.header, &t.rows),
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(&t.to_json())?;
            v.push(b'\n');
            Ok(v)
        }
    }
}

fn render_report(r: &Report, f: Format) -> Result<Vec<u8>> {
    match f {
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(r)?;
            v.push(b'\n');
            Ok(v)
        }
        Format::Csv => {
            let header: Vec<String> =
                ["suite", "property", "parameters", "pass", "residual"].iter().map(|s| s.to_string()).collect();
            let rows: Vec<Vec<String>> = r
                .checks
                .iter()
                .map(|c| vec![c.suite.clone(), c.property.clone(), c.parameters.clone(), c.pass.to_string(), c.residual.clone()])
                .collect();
            csv_bytes(&header, &rows)
        }
    }
}

fn run_table(kind: TableKind, s: &Settings) -> Result<()> {
    let n2_max = s.half_int("nmax", &s.args.nmax)?.unwrap_or(2);
    let points = match s.explicit_point()? {
        Some(p) => vec![p],
        None => vec![ParamPoint::at_level(Rational::from_integer(1.into()), 2)?],
    };
    let mut req = TableRequest::new(kind, n2_max, points);
    req.jobs = s.parsed("jobs", s.args.jobs)?;
    req.seed = s.parsed("seed", s.args.seed)?.unwrap_or(0);
    if let Some(cap) = s.half_int("override_cap", &s.args.override_cap)? {
        req.cap_n2 = cap;
    }
    let table = build_table(&req)?;
    let format = s.format(Format::Csv)?;
    let path = s.out_path(&format!("{}.{}", kind_name(kind), format.ext()))?;
    write_output(path.as_deref(), &render_table(&table, format)?)
}

fn run_verify_cmd(v: &VerifyArgs, s: &Settings) -> Result<bool> {
    let mut names: Vec<String> = v.suite.clone();
    if names.is_empty() {
        names.extend(s.config.get("suite").map(str::to_string));
    }
    let mut suites = Vec::new();
    for n in names.iter().flat_map(|n| n.split(',')).map(str::trim).filter(|n| !n.is_empty()) {
        suites.push(n.parse::<Suite>()?);
    }
    if suites.is_empty() {
        suites = Suite::ALL.to_vec();
    }
    let defaults = VerifyConfig::default();
    let cfg = VerifyConfig {
        seed: s.parsed("seed", s.args.seed)?.unwrap_or(defaults.seed),
        point: s.explicit_point()?,
        triples: s.parsed("triples", v.triples)?.unwrap_or(defaults.triples),
        jobs: s.parsed("jobs", s.args.jobs)?,
    };
    let report = run_verify(&suites, &cfg);
    let format = s.format(Format::Json)?;
    let path = s.out_path(&format!("verify.{}", format.ext()))?;
    write_output(path.as_deref(), &render_report(&report, format)?)?;
    let failed: Vec<_> = report.checks.iter().filter(|c| !c.pass).collect();
    for c in &failed {
        eprintln!("FAIL [{}] {} ({}): {}", c.suite, c.property, c.parameters, c.residual);
    }
    eprintln!("{} checks, {} failed", report.checks.len(), failed.len());
    Ok(report.pass)
}

fn run(cli: Cli) -> Result<bool> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(kind) = table_kind(&cli.command) {
        let args = match &cli.command {
            Command::Structure(a)
            | Command::Reduced(a)
            | Command::Norms(a)
            | Command::Hahn(a)
            | Command::Cg(a)
            | Command::Classical(a) => a,
            Command::Verify(_) => unreachable!(),
        };
        run_table(kind, &Settings { args, config: &config })?;
        return Ok(true);
    }
    let Command::Verify(v) = &cli.command else { unreachable!() };
    run_verify_cmd(v, &Settings { args: &v.common, config: &config })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
