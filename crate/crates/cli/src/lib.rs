//! The `powsum` command line, as a library so tests can drive it in-process.
//!
//! Exit codes: 0 when every check holds or a scan is clean, 1 when a check
//! fails or a scan finds a hit, 2 for usage and domain errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use powsum::arith::{rational_residue, Int};
use powsum::bernoulli::{shared_table, vsc_decompose};
use powsum::congruences::{sweep, BernoulliRoute, CheckerId, CongruenceCheck, Grid, SweepSummary};
use powsum::numtheory::classify;
use powsum::powersum::{powersum_direct, powersum_mod};
use powsum::scanner::{predicate_catalog, render, scan, Format, PredicateId, ScanOptions, DEFAULT_KMAX};

pub const EXIT_CLEAN: i32 = 0;
pub const EXIT_FOUND: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "powsum", version, about = "Power-sum congruence checks and conjecture scans")]
struct Cli {
    /// Output format: text, json or csv.
    #[arg(long, global = true)]
    format: Option<String>,

    /// Worker threads (default: POWSUM_JOBS, then the config file, then all cores).
    #[arg(long, global = true, env = "POWSUM_JOBS")]
    jobs: Option<usize>,

    /// TOML file with defaults for any of the flags above and below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a congruence checker over ranges of its parameters.
    Verify(VerifyArgs),
    /// Scan a range of n for a conjecture predicate.
    Scan(ScanArgs),
    /// Print Bernoulli numbers, optionally reduced modulo m.
    Bernoulli(BernoulliArgs),
    /// Print power sums S_k(n) = 1^k + ... + (n-1)^k.
    Powersum(PowersumArgs),
    /// Factor n and report primality, Carmichael and Giuga properties.
    Classify(ClassifyArgs),
    /// List checker and predicate ids with their parameters.
    List,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Checker id, e.g. thm1.1 or eq2.11.
    checker: String,
    /// Values of k: a single value, lo..hi or lo..=hi (both inclusive)
    #[arg(long)]
    k: Option<String>,
    /// Values of n
    #[arg(long)]
    n: Option<String>,
    /// Values of p; composite values are skipped
    #[arg(long)]
    p: Option<String>,
    /// Values of s
    #[arg(long)]
    s: Option<String>,
    /// Where Bernoulli sides come from: exact, modular or auto.
    #[arg(long)]
    route: Option<String>,
    /// Also list not-applicable and passing checks.
    #[arg(long)]
    verbose: bool,
}

#[derive(Debug, Args)]
struct ScanArgs {
    /// Predicate id, e.g. wolstenholme or giuga-composite.
    predicate: String,
    /// Inclusive range lo..hi.
    #[arg(long)]
    range: String,
    /// Checkpoint file; an existing one with the same configuration is resumed.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Largest k for conj2.17.
    #[arg(long)]
    kmax: Option<u64>,
    #[arg(long, hide = true)]
    stop_after_blocks: Option<u64>,
}

#[derive(Debug, Args)]
struct BernoulliArgs {
    /// Index or inclusive range of indices.
    index: String,
    /// Reduce modulo m instead of printing the rational.
    #[arg(long = "mod")]
    modulus: Option<String>,
    /// Print the von Staudt-Clausen decomposition (even indices >= 2).
    #[arg(long)]
    vsc: bool,
}

#[derive(Debug, Args)]
struct PowersumArgs {
    #[arg(long)]
    k: String,
    #[arg(long)]
    n: String,
    #[arg(long = "mod")]
    modulus: Option<String>,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[arg(required = true)]
    values: Vec<u64>,
}

/// Config-file keys; each mirrors a flag of the same name.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    format: Option<String>,
    jobs: Option<usize>,
    route: Option<String>,
    kmax: Option<u64>,
    checkpoint: Option<PathBuf>,
}

fn load_config(path: Option<&Path>) -> anyhow::Result<Config> {
    let Some(path) = path else { return Ok(Config::default()) };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Parses `v` or `lo..hi` (inclusive).
pub fn parse_range(s: &str) -> anyhow::Result<RangeInclusive<u64>> {
    let num = |t: &str| t.trim().parse::<u64>().map_err(|_| anyhow!("`{t}` is not a non-negative integer"));
    let r = match s.split_once("..") {
        Some((lo, hi)) => {
            let hi = hi.strip_prefix('=').unwrap_or(hi);
            num(lo)?..=num(hi)?
        }
        None => {
            let v = num(s)?;
            v..=v
        }
    };
    if r.start() > r.end() {
        bail!("empty range `{s}`");
    }
    Ok(r)
}

fn parse_route(s: &str) -> anyhow::Result<BernoulliRoute> {
    match s {
        "exact" => Ok(BernoulliRoute::Exact),
        "modular" => Ok(BernoulliRoute::Modular),
        "auto" => Ok(BernoulliRoute::default()),
        other => bail!("unknown route `{other}` (expected exact, modular or auto)"),
    }
}

/// Runs the command line `args` (including the program name), writing
/// results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_CLEAN };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_USAGE
        }
    }
}

struct Settings {
    format: Format,
    jobs: usize,
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<i32> {
    let config = load_config(cli.config.as_deref())?;
    let format = match cli.format.as_deref().or(config.format.as_deref()) {
        Some(f) => f.parse::<Format>()?,
        None => Format::Text,
    };
    let jobs = cli.jobs.or(config.jobs).unwrap_or_else(powsum::exec::default_jobs).max(1);
    let settings = Settings { format, jobs };
    let body = match cli.command {
        Command::Verify(a) => return verify(a, &config, &settings, out),
        Command::Scan(a) => return scan_cmd(a, &config, &settings, out, err),
        Command::Bernoulli(a) => bernoulli(a, &settings)?,
        Command::Powersum(a) => powersum(a, &settings)?,
        Command::Classify(a) => classify_cmd(a, &settings)?,
        Command::List => list(&settings)?,
    };
    out.write_all(body.as_bytes())?;
    Ok(EXIT_CLEAN)
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    #[serde(flatten)]
    summary: &'a SweepSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    checks: Option<&'a [CongruenceCheck]>,
}

fn opt_range(s: &Option<String>) -> anyhow::Result<Option<RangeInclusive<u64>>> {
    s.as_deref().map(parse_range).transpose()
}

fn verify(a: VerifyArgs, config: &Config, st: &Settings, out: &mut dyn Write) -> anyhow::Result<i32> {
    let id: CheckerId = a.checker.parse()?;
    let route = match a.route.as_deref().or(config.route.as_deref()) {
        Some(r) => parse_route(r)?,
        None => BernoulliRoute::default(),
    };
    let grid = Grid { k: opt_range(&a.k)?, n: opt_range(&a.n)?, p: opt_range(&a.p)?, s: opt_range(&a.s)? };
    let checks = sweep(id, &grid, st.jobs, route)?;
    if checks.is_empty() {
        anyhow::bail!("no parameter points for {id} in the given ranges (p is restricted to primes, cor1.2 to odd k)");
    }
    let summary = SweepSummary::new(id, &checks);
    let shown: Vec<&CongruenceCheck> = checks.iter().filter(|c| a.verbose || c.fails()).collect();
    let body = match st.format {
        Format::Json => {
            let report = VerifyReport { summary: &summary, checks: a.verbose.then_some(checks.as_slice()) };
            let mut s = serde_json::to_string_pretty(&report)?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from("checker,k,n,p,s,case,applicable,holds,lhs,rhs,modulus\n");
            for c in shown {
                let f = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
                let r = |v: &Option<powsum::arith::Residue>| v.as_ref().map(|x| x.value().to_string()).unwrap_or_default();
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    c.checker,
                    f(c.params.k),
                    f(c.params.n),
                    f(c.params.p),
                    f(c.params.s),
                    c.case.map(|t| format!("\"{t}\"")).unwrap_or_default(),
                    c.applicable,
                    c.holds,
                    r(&c.lhs),
                    r(&c.rhs),
                    c.modulus
                );
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for c in shown {
                let status = if c.fails() {
                    "FAIL"
                } else if c.holds {
                    "ok"
                } else {
                    "n/a"
                };
                let side = |v: &Option<powsum::arith::Residue>| v.as_ref().map_or("-".to_string(), |x| x.value().to_string());
                let _ = write!(s, "{status:<4} {} {} lhs={} rhs={} mod={}", c.checker, c.params, side(&c.lhs), side(&c.rhs), c.modulus);
                if let Some(t) = c.case {
                    let _ = write!(s, " [{t}]");
                }
                if let Some(n) = &c.note {
                    let _ = write!(s, " ({n})");
                }
                s.push('\n');
            }
            let _ = writeln!(
                s,
                "{}: {} checks, {} applicable, {} hold, {} not applicable, {} failures",
                id,
                summary.total,
                summary.applicable,
                summary.held,
                summary.not_applicable,
                summary.failures.len()
            );
            s
        }
    };
    out.write_all(body.as_bytes())?;
    Ok(if summary.clean() { EXIT_CLEAN } else { EXIT_FOUND })
}

fn scan_cmd(a: ScanArgs, config: &Config, st: &Settings, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<i32> {
    let predicate: PredicateId = a.predicate.parse()?;
    let range = parse_range(&a.range)?;
    let opts = ScanOptions {
        jobs: st.jobs,
        checkpoint: a.checkpoint.or_else(|| config.checkpoint.clone()),
        kmax: a.kmax.or(config.kmax).unwrap_or(DEFAULT_KMAX),
        stop_after_blocks: a.stop_after_blocks,
    };
    let report = scan(predicate, *range.start(), *range.end(), &opts)?;
    out.write_all(render(&report, st.format).as_bytes())?;
    let _ = writeln!(err, "{}: wall time {:.3} s", report.scan, report.wall_time.as_secs_f64());
    Ok(if report.hits.is_empty() { EXIT_CLEAN } else { EXIT_FOUND })
}

#[derive(Serialize)]
struct BernoulliRow {
    index: u64,
    #[serde(serialize_with = "powsum::arith::serialize_decimal")]
    numerator: Int,
    #[serde(serialize_with = "powsum::arith::serialize_decimal")]
    denominator: Int,
    #[serde(skip_serializing_if = "Option::is_none")]
    residue: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vsc_integer_part: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vsc_primes: Option<Vec<u64>>,
}

fn bernoulli(a: BernoulliArgs, st: &Settings) -> anyhow::Result<String> {
    let range = parse_range(&a.index)?;
    let modulus = a.modulus.as_deref().map(|m| m.parse::<Int>().map_err(|_| anyhow!("bad modulus `{m}`"))).transpose()?;
    let table = shared_table(*range.end());
    let mut rows = Vec::new();
    for i in range {
        let b = table.value(i)?;
        let residue = match &modulus {
            Some(m) => Some(rational_residue(b, m)?.value().to_string()),
            None => None,
        };
        let (vi, vp) = if a.vsc && i >= 2 && i % 2 == 0 {
            let d = vsc_decompose(i)?;
            (Some(d.integer_part.to_string()), Some(d.primes))
        } else {
            (None, None)
        };
        rows.push(BernoulliRow {
            index: i,
            numerator: b.numer().clone(),
            denominator: b.denom().clone(),
            residue,
            vsc_integer_part: vi,
            vsc_primes: vp,
        });
    }
    Ok(match st.format {
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
        Format::Csv => {
            let mut s = String::from("index,numerator,denominator,residue\n");
            for r in &rows {
                let _ = writeln!(s, "{},{},{},{}", r.index, r.numerator, r.denominator, r.residue.as_deref().unwrap_or(""));
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in &rows {
                let _ = write!(s, "B_{} = {}", r.index, r.numerator);
                if r.denominator != Int::from(1) {
                    let _ = write!(s, "/{}", r.denominator);
                }
                if let (Some(res), Some(m)) = (&r.residue, &modulus) {
                    let _ = write!(s, " ≡ {res} (mod {m})");
                }
                if let (Some(ip), Some(ps)) = (&r.vsc_integer_part, &r.vsc_primes) {
                    let ps: Vec<String> = ps.iter().map(|p| format!("1/{p}")).collect();
                    let _ = write!(s, " = {ip} - ({})", ps.join(" + "));
                }
                s.push('\n');
            }
            s
        }
    })
}

#[derive(Serialize)]
struct PowersumRow {
    k: u64,
    n: u64,
    #[serde(serialize_with = "powsum::arith::serialize_decimal")]
    value: Int,
    #[serde(skip_serializing_if = "Option::is_none")]
    modulus: Option<String>,
}

fn powersum(a: PowersumArgs, st: &Settings) -> anyhow::Result<String> {
    let ks = parse_range(&a.k)?;
    let ns = parse_range(&a.n)?;
    let modulus = a.modulus.as_deref().map(|m| m.parse::<Int>().map_err(|_| anyhow!("bad modulus `{m}`"))).transpose()?;
    let mut rows = Vec::new();
    for k in ks {
        for n in ns.clone() {
            let value = match &modulus {
                Some(m) => powersum_mod(k, n, m)?.value().clone(),
                None => {
                    if k > u32::MAX as u64 {
                        bail!("k = {k} is too large for an exact sum; pass --mod");
                    }
                    powersum_direct(k, n)
                }
            };
            rows.push(PowersumRow { k, n, value, modulus: modulus.as_ref().map(|m| m.to_string()) });
        }
    }
    Ok(match st.format {
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
        Format::Csv => {
            let mut s = String::from("k,n,value,modulus\n");
            for r in &rows {
                let _ = writeln!(s, "{},{},{},{}", r.k, r.n, r.value, r.modulus.as_deref().unwrap_or(""));
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in &rows {
                match &r.modulus {
                    Some(m) => {
                        let _ = writeln!(s, "S_{}({}) ≡ {} (mod {m})", r.k, r.n, r.value);
                    }
                    None => {
                        let _ = writeln!(s, "S_{}({}) = {}", r.k, r.n, r.value);
                    }
                }
            }
            s
        }
    })
}

#[derive(Serialize)]
struct CatalogEntry {
    kind: &'static str,
    id: String,
    params: Vec<&'static str>,
    description: &'static str,
}

fn list(st: &Settings) -> anyhow::Result<String> {
    let checkers = CheckerId::all().map(|id| CatalogEntry {
        kind: "checker",
        id: id.to_string(),
        params: id.params().iter().map(|p| p.flag()).collect(),
        description: id.description(),
    });
    let predicates = predicate_catalog().into_iter().map(|id| CatalogEntry {
        kind: "predicate",
        id: id.to_string(),
        params: vec!["range"],
        description: id.description(),
    });
    let entries: Vec<CatalogEntry> = checkers.chain(predicates).collect();
    Ok(match st.format {
        Format::Json => serde_json::to_string_pretty(&entries)? + "\n",
        Format::Csv => {
            let mut s = String::from("kind,id,params,description\n");
            for e in &entries {
                let _ = writeln!(s, "{},{},{},\"{}\"", e.kind, e.id, e.params.join(" "), e.description.replace('"', "\"\""));
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for (i, e) in entries.iter().enumerate() {
                if i == 0 || entries[i - 1].kind != e.kind {
                    let _ = writeln!(s, "{}{}s:", if i == 0 { "" } else { "\n" }, e.kind);
                }
                let _ = writeln!(s, "  {:<16} {:<14} {}", e.id, e.params.join(" "), e.description);
            }
            s
        }
    })
}

fn classify_cmd(a: ClassifyArgs, st: &Settings) -> anyhow::Result<String> {
    let profiles = a.values.iter().map(|&n| classify(n)).collect::<Result<Vec<_>, _>>()?;
    let yn = |b: bool| if b { "yes" } else { "no" };
    Ok(match st.format {
        Format::Json => serde_json::to_string_pretty(&profiles)? + "\n",
        Format::Csv => {
            let mut s = String::from("n,factorization,prime,squarefree,carmichael,giuga_number,giuga_congruence\n");
            for p in &profiles {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    p.n, p.factorization, p.is_prime, p.is_squarefree, p.is_carmichael, p.is_giuga_number, p.giuga_congruence_holds
                );
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for p in &profiles {
                let kind = if p.is_prime {
                    "prime"
                } else if p.n < 2 {
                    "unit"
                } else {
                    "composite"
                };
                let _ = writeln!(s, "{} = {} ({kind})", p.n, p.factorization);
                let _ = writeln!(s, "  squarefree:       {}", yn(p.is_squarefree));
                let _ = writeln!(s, "  carmichael:       {}", yn(p.is_carmichael));
                let _ = writeln!(s, "  giuga number:     {}", yn(p.is_giuga_number));
                let _ = writeln!(s, "  S_(n-1)(n) ≡ -1:  {}", yn(p.giuga_congruence_holds));
            }
            s
        }
    })
}
