use std::path::PathBuf;
use std::process::ExitCode;

use abram_core::formulas::cross_validate;
use abram_core::genfield::GenField;
use abram_core::quadfield::QuadField;
use abram_core::report::{format_detailed, format_text, ReportDocument};
use abram_core::scan::scan_range;
use abram_core::sramdriver::{sweep, SweepConfig};
use abram_core::{Error, FieldBackend};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Environment variable with resource bounds, e.g. `primes_above=16,exponent=1024,escalations=3`.
const LIMITS_VAR: &str = "ABRAM_LIMITS";

#[derive(Parser)]
#[command(
    name = "abram",
    version,
    about = "S-ramified abelian pro-p groups via ray class groups"
)]
struct Cli {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a quadratic field Q(sqrt d).
    Quad {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Sweep the field described by a fixture document.
    Poly {
        #[arg(long)]
        fixture: PathBuf,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Scan a real quadratic field for primes where it is not p-rational.
    Scan {
        #[arg(long)]
        d: i64,
        #[arg(long, default_value_t = 3)]
        pmin: u64,
        #[arg(long)]
        pmax: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print both sides of every formula identity for one prime.
    Check {
        #[arg(
            long,
            allow_hyphen_values = true,
            conflicts_with = "fixture",
            required_unless_present = "fixture"
        )]
        d: Option<i64>,
        #[arg(long)]
        fixture: Option<PathBuf>,
        #[arg(long)]
        p: u64,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// Smallest prime p.
    #[arg(long, default_value_t = 2)]
    bp: u64,
    /// Largest prime p.
    #[arg(long = "Bp", default_value_t = 50)]
    bq: u64,
    #[arg(long, default_value_t = 6)]
    n0: u32,
    /// Fixed exponent instead of n0 + floor(30/p).
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, default_value_t = 4)]
    delta: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Add per-subset classification lines and warnings to text output.
    #[arg(long)]
    detailed: bool,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Invalid(_) => 2,
        Error::Resource(_) | Error::Precision(_) => 3,
        Error::Fixture(_) => 4,
        Error::NotPrincipal | Error::Defect(_) => 1,
    }
}

fn apply_limits(cfg: &mut SweepConfig, spec: &str) -> Result<(), Error> {
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = item.split_once('=').ok_or_else(|| {
            Error::Invalid(format!("{LIMITS_VAR}: expected key=value, got {item:?}"))
        })?;
        let bad = |_| Error::Invalid(format!("{LIMITS_VAR}: bad value for {key}: {value:?}"));
        match key.trim() {
            "primes_above" => cfg.max_primes_above = value.trim().parse().map_err(bad)?,
            "exponent" => cfg.max_exponent = value.trim().parse().map_err(bad)?,
            "escalations" => cfg.max_escalations = value.trim().parse().map_err(bad)?,
            other => {
                return Err(Error::Invalid(format!(
                    "{LIMITS_VAR}: unknown key {other:?}"
                )))
            }
        }
    }
    Ok(())
}

fn base_config() -> Result<SweepConfig, Error> {
    let mut cfg = SweepConfig::default();
    if let Ok(spec) = std::env::var(LIMITS_VAR) {
        apply_limits(&mut cfg, &spec)?;
    }
    Ok(cfg)
}

fn run_sweep(field: &dyn FieldBackend, label: String, args: &SweepArgs) -> Result<u8, Error> {
    if args.bp > args.bq {
        return Err(Error::Invalid(format!(
            "empty prime range [{}, {}]",
            args.bp, args.bq
        )));
    }
    let mut cfg = base_config()?;
    cfg.primes = abram_core::arith::primes_in_range(args.bp, args.bq);
    cfg.n0 = args.n0;
    cfg.n = args.n;
    cfg.delta = args.delta;
    let doc = ReportDocument::new(label, cfg.n0, cfg.delta, sweep(field, &cfg)?);
    match args.format {
        Format::Json => println!("{}", doc.to_json()),
        Format::Text if args.detailed => print!("{}", format_detailed(&doc)),
        Format::Text => print!("{}", format_text(&doc)),
    }
    for w in &doc.warnings {
        eprintln!("warning: {w}");
    }
    let failed = doc
        .blocks
        .iter()
        .any(|b| b.error.is_some() || b.reports.iter().any(|r| r.error.is_some()));
    Ok(if failed { 3 } else { 0 })
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Quad { d, sweep } => {
            let k = QuadField::new(d)?;
            run_sweep(&k, k.descriptor(), &sweep)
        }
        Command::Poly { fixture, sweep } => {
            let f = GenField::load(&fixture)?;
            let label = format!("{} sha256:{}", f.descriptor(), f.fingerprint());
            run_sweep(f.as_ref(), label, &sweep)
        }
        Command::Scan {
            d,
            pmin,
            pmax,
            format,
        } => {
            let r = scan_range(d, pmin, pmax, &base_config()?)?;
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&r).expect("scan result serializes")
                ),
                Format::Text => {
                    println!("Q(sqrt({d})) p in [{pmin}, {pmax}]");
                    let suspects: Vec<String> = r.suspects.iter().map(|p| p.to_string()).collect();
                    println!("filter suspects: {}", suspects.join(", "));
                    for (p, why) in &r.skipped {
                        println!("bypassed filter: p={p} ({why})");
                    }
                    for ev in &r.evidence {
                        let t: Vec<String> = ev.torsion.iter().map(|x| x.to_string()).collect();
                        println!(
                            "p={} S=P n={} r~={} T=[{}]",
                            ev.p,
                            ev.n,
                            ev.r_tilde,
                            t.join(", ")
                        );
                    }
                    println!("{}", r.confirmed_line());
                }
            }
            for (p, e) in &r.failures {
                eprintln!("error: p={p}: {e}");
            }
            Ok(if r.failures.is_empty() { 0 } else { 3 })
        }
        Command::Check { d, fixture, p } => {
            let field: std::sync::Arc<dyn FieldBackend> = match (d, fixture) {
                (Some(d), _) => std::sync::Arc::new(QuadField::new(d)?),
                (None, Some(path)) => GenField::load(&path)?,
                (None, None) => {
                    return Err(Error::Invalid("one of --d, --fixture is required".into()))
                }
            };
            if !abram_core::arith::is_prime(p) {
                return Err(Error::Invalid(format!("{p} is not prime")));
            }
            let lines = cross_validate(field.as_ref(), p, &base_config()?)?;
            println!("{} p={p}", field.descriptor());
            for l in &lines {
                println!(
                    "{} S={}: formula={} pipeline={} {}",
                    l.identity,
                    l.subset,
                    l.formula,
                    l.pipeline,
                    if l.ok { "equal" } else { "MISMATCH" }
                );
            }
            Ok(if lines.iter().all(|l| l.ok) { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
