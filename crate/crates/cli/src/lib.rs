//! Command-line front end: coefficient expansion, incongruence certificates,
//! progression scans and congruence checks.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 a verification found a
//! violation (or a certificate contradicted a verified congruence), 3 a
//! theorem precondition does not hold.

pub mod selftest;

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use incongru::scanner::{reconcile, scan, verify_congruence, Status, Verdict, Verification};
use incongru::sieve::certify;
use incongru::store::{cache_file_name, load_cache, save_cache, CacheEntry};
use incongru::{Error, FamilySpec, TruncatedSeries};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser, Debug)]
#[command(
    name = "incongru",
    version,
    about = "q-series congruence and incongruence toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print coefficients a(0..=depth)
    Expand(ExpandArgs),
    /// Incongruence certificate for (family, m, ell)
    Sieve(SieveArgs),
    /// Per-class scan for nonzero coefficients mod ell
    Scan(ScanArgs),
    /// Check a(m n + t) = 0 mod ell for n <= depth
    Verify(VerifyArgs),
    /// Sieve, scan and reconcile in one report
    Certify(CertifyArgs),
    /// Run the built-in regression suite
    Selftest(SelftestArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for cached coefficient runs
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExpandArgs {
    #[arg(long)]
    family: FamilySpec,
    #[arg(long)]
    depth: usize,
    /// Reduce coefficients mod this prime
    #[arg(long)]
    ell: Option<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct SieveArgs {
    #[arg(long)]
    family: FamilySpec,
    #[arg(long)]
    m: u64,
    #[arg(long)]
    ell: u64,
    /// Pinned seeds; repeat or comma-separate. Seeds are discovered per class otherwise.
    #[arg(long, value_delimiter = ',')]
    t0: Vec<u64>,
    /// Seed search reaches index m * depth + m - 1
    #[arg(long, default_value_t = 10)]
    depth: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long)]
    family: FamilySpec,
    #[arg(long)]
    m: u64,
    #[arg(long)]
    ell: u64,
    #[arg(long)]
    depth: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    family: FamilySpec,
    #[arg(long)]
    m: u64,
    #[arg(long)]
    t: u64,
    #[arg(long)]
    ell: u64,
    #[arg(long)]
    depth: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[arg(long)]
    family: FamilySpec,
    #[arg(long)]
    m: u64,
    #[arg(long)]
    ell: u64,
    #[arg(long)]
    depth: u64,
    /// Pinned seeds; repeat or comma-separate
    #[arg(long, value_delimiter = ',')]
    t0: Vec<u64>,
    /// Classes to verify as congruences before reconciling
    #[arg(long, value_delimiter = ',')]
    t: Vec<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value = "tsv")]
    format: Format,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::PreconditionNotMet(_)) => 3,
            _ => 1,
        }
    }
}

/// A finished report and the exit code it carries.
struct Report {
    text: String,
    code: i32,
}

impl Report {
    fn ok(text: String) -> Self {
        Report { text, code: 0 }
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let (result, dest) = match cli.command {
        Command::Expand(a) => (expand(&a), a.output.out),
        Command::Sieve(a) => (sieve(&a), a.output.out),
        Command::Scan(a) => (scan_cmd(&a), a.output.out),
        Command::Verify(a) => (verify(&a), a.output.out),
        Command::Certify(a) => (certify_cmd(&a), a.output.out),
        Command::Selftest(a) => (Ok(selftest_cmd(&a)), None),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    let written = match &dest {
        Some(path) => fs::write(path, &report.text).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        }),
        None => out
            .write_all(report.text.as_bytes())
            .map_err(|source| CliError::Write {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: {e}");
        return 1;
    }
    report.code
}

fn modulus_arg(ell: Option<u64>) -> Result<Option<u32>, CliError> {
    ell.map(incongru::series::check_modulus)
        .transpose()
        .map_err(CliError::from)
}

/// Coefficients up to `trunc`, read from or written to the cache directory
/// when one is given.
fn coefficients(
    family: &FamilySpec,
    trunc: usize,
    modulus: Option<u32>,
    cache: Option<&Path>,
) -> Result<TruncatedSeries, CliError> {
    let Some(dir) = cache else {
        return Ok(family.generate(trunc, modulus)?);
    };
    let path = dir.join(cache_file_name(family, modulus, trunc));
    if path.exists() {
        let entry = load_cache(&path)?;
        if &entry.family == family && entry.modulus() == modulus && entry.depth() == trunc {
            return Ok(entry.series());
        }
    }
    let series = family.generate(trunc, modulus)?;
    fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.to_path_buf(),
        source,
    })?;
    save_cache(&CacheEntry::new(family.clone(), &series), &path)?;
    Ok(series)
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json serializes");
    s.push('\n');
    s
}

fn check_m(m: u64) -> Result<(), CliError> {
    if m == 0 {
        return Err(CliError::Usage("--m must be at least 1".into()));
    }
    Ok(())
}

fn expand(a: &ExpandArgs) -> Result<Report, CliError> {
    let modulus = modulus_arg(a.ell)?;
    let s = coefficients(&a.family, a.depth, modulus, a.output.cache.as_deref())?;
    let c = s.coeffs();
    let mut text = String::new();
    match a.output.format {
        Format::Tsv => {
            text.push_str("n\tcoefficient\n");
            for n in 0..c.len() {
                writeln!(text, "{n}\t{}", c.display_at(n)).unwrap();
            }
        }
        Format::Json => {
            // Written by hand so exact coefficients stay JSON integers.
            let values: Vec<String> = (0..c.len()).map(|n| c.display_at(n)).collect();
            writeln!(text, "{{").unwrap();
            writeln!(text, "  \"coefficients\": [{}],", values.join(", ")).unwrap();
            writeln!(text, "  \"depth\": {},", a.depth).unwrap();
            writeln!(text, "  \"family\": {},", json!(a.family.to_string())).unwrap();
            writeln!(text, "  \"modulus\": {},", json!(modulus)).unwrap();
            writeln!(text, "  \"offset24\": {}", s.offset24()).unwrap();
            writeln!(text, "}}").unwrap();
        }
    }
    Ok(Report::ok(text))
}

fn sieve(a: &SieveArgs) -> Result<Report, CliError> {
    check_m(a.m)?;
    let mut trunc = a.m * a.depth + a.m - 1;
    if let Some(&max) = a.t0.iter().max() {
        trunc = trunc.max(max);
    }
    let coeffs = coefficients(&a.family, trunc as usize, None, a.output.cache.as_deref())?;
    let pinned = (!a.t0.is_empty()).then_some(a.t0.as_slice());
    let cert = certify(&a.family, &coeffs, a.m, a.ell, pinned)?;
    let text = match a.output.format {
        Format::Json => {
            let mut s = cert.to_json();
            s.push('\n');
            s
        }
        Format::Tsv => {
            let mut s = String::from("t\twitness_d\tseed\n");
            for p in &cert.prohibited {
                writeln!(s, "{}\t{}\t{}", p.t, p.witness_d, p.seed).unwrap();
            }
            s
        }
    };
    Ok(Report::ok(text))
}

fn scan_cmd(a: &ScanArgs) -> Result<Report, CliError> {
    check_m(a.m)?;
    let modulus = modulus_arg(Some(a.ell))?;
    let trunc = (a.m * a.depth + a.m - 1) as usize;
    let coeffs = coefficients(&a.family, trunc, modulus, a.output.cache.as_deref())?;
    let report = scan(&a.family, &coeffs, a.m, a.ell, a.depth)?;
    Ok(Report::ok(match a.output.format {
        Format::Json => report.to_json() + "\n",
        Format::Tsv => report.to_tsv(),
    }))
}

fn verify(a: &VerifyArgs) -> Result<Report, CliError> {
    check_m(a.m)?;
    if a.t >= a.m {
        return Err(CliError::Usage(format!(
            "--t {} is not in [0, {})",
            a.t, a.m
        )));
    }
    let modulus = modulus_arg(Some(a.ell))?;
    let trunc = (a.m * a.depth + a.t) as usize;
    let coeffs = coefficients(&a.family, trunc, modulus, a.output.cache.as_deref())?;
    let outcome = verify_congruence(&coeffs, a.m, a.t, a.ell, a.depth)?;
    let (result, n) = match outcome {
        Verification::Pass => ("pass", None),
        Verification::Violation { n } => ("violation", Some(n)),
    };
    let text = match a.output.format {
        Format::Json => {
            let mut v = json!({
                "family": a.family.to_string(),
                "m": a.m,
                "t": a.t,
                "ell": a.ell,
                "depth": a.depth,
                "result": result,
            });
            if let Some(n) = n {
                v["violation_n"] = json!(n);
            }
            pretty(&v)
        }
        Format::Tsv => format!(
            "family\tm\tt\tell\tdepth\tresult\tviolation_n\n{}\t{}\t{}\t{}\t{}\t{result}\t{}\n",
            a.family,
            a.m,
            a.t,
            a.ell,
            a.depth,
            n.map(|n| n.to_string()).unwrap_or_default()
        ),
    };
    Ok(Report {
        text,
        code: if n.is_some() { 2 } else { 0 },
    })
}

fn certify_cmd(a: &CertifyArgs) -> Result<Report, CliError> {
    check_m(a.m)?;
    if let Some(t) = a.t.iter().find(|&&t| t >= a.m) {
        return Err(CliError::Usage(format!("--t {t} is not in [0, {})", a.m)));
    }
    let mut trunc = a.m * a.depth + a.m - 1;
    if let Some(&max) = a.t0.iter().max() {
        trunc = trunc.max(max);
    }
    let coeffs = coefficients(&a.family, trunc as usize, None, a.output.cache.as_deref())?;
    let pinned = (!a.t0.is_empty()).then_some(a.t0.as_slice());
    let cert = certify(&a.family, &coeffs, a.m, a.ell, pinned)?;
    let report = scan(&a.family, &coeffs, a.m, a.ell, a.depth)?;
    let mut verified = Vec::new();
    for &t in &a.t {
        if verify_congruence(&coeffs, a.m, t, a.ell, a.depth)? == Verification::Pass {
            verified.push(t);
        }
    }
    verified.sort_unstable();
    verified.dedup();
    let rec = reconcile(&report, &cert, &verified)?;
    let code = if rec.verdict == Verdict::Contradiction {
        2
    } else {
        0
    };
    let text = match a.output.format {
        Format::Json => pretty(&json!({
            "certificate": cert,
            "scan": report,
            "verified": verified,
            "reconciliation": rec,
        })),
        Format::Tsv => {
            let mut s = String::from("t\tprohibited\twitness_d\tseed\tstatus\twitness_n\n");
            for class in &report.statuses {
                let p = cert.prohibited.iter().find(|p| p.t == class.t);
                let (status, n) = match class.status {
                    Status::WitnessedNonzero(n) => ("witnessed_nonzero", n.to_string()),
                    Status::Candidate(_) => ("candidate", String::new()),
                };
                writeln!(
                    s,
                    "{}\t{}\t{}\t{}\t{status}\t{n}",
                    class.t,
                    p.is_some(),
                    p.map(|p| p.witness_d.to_string()).unwrap_or_default(),
                    p.map(|p| p.seed.to_string()).unwrap_or_default(),
                )
                .unwrap();
            }
            writeln!(
                s,
                "# verdict\t{}",
                json!(rec.verdict).as_str().unwrap_or("")
            )
            .unwrap();
            s
        }
    };
    Ok(Report { text, code })
}

fn selftest_cmd(a: &SelftestArgs) -> Report {
    let results = selftest::run_all(a.seed);
    let all_pass = results.iter().all(|r| r.passed());
    let text = match a.format {
        Format::Tsv => {
            let mut s = String::new();
            for r in &results {
                writeln!(s, "{}", r.line()).unwrap();
            }
            writeln!(
                s,
                "selftest seed {}: {}",
                a.seed,
                if all_pass {
                    "all criteria pass"
                } else {
                    "FAILURES"
                }
            )
            .unwrap();
            s
        }
        Format::Json => pretty(&json!({
            "seed": a.seed,
            "pass": all_pass,
            "criteria": results.iter().map(|r| json!({
                "criterion": r.id,
                "name": r.name,
                "pass": r.passed(),
                "detail": r.detail(),
            })).collect::<Vec<_>>(),
        })),
    };
    Report {
        text,
        code: if all_pass { 0 } else { 2 },
    }
}
