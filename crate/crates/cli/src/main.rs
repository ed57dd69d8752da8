//! `pdisc` — generate Korobov p-sets, compute periodic/plain L2
//! discrepancies by several methods, check exponential-sum bounds and emit
//! bound tables.
//!
//! Exit codes: 0 success, 1 validation error (bad flags, malformed input
//! files, non-prime p), 2 internal assertion failure (a guaranteed bound
//! reported as violated, which signals a bug rather than bad input).

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use pdisc::bounds;
use pdisc::discrepancy::{
    periodic_l2, periodic_l2_exact_sq, periodic_l2_fourier, periodic_l2_mc, periodic_l2_weighted,
    plain_l2_weighted, rms_shifted_l2_mc, DiscrepancyResult,
};
use pdisc::expsums::{for_each_weil_report, WeilStatus};
use pdisc::format::{parse_point_set, parse_weights, write_point_set, AnyPointSet};
use pdisc::korobov::{generate, is_prime, primes_up_to, PSetFamily};
use pdisc::pointset::{Points, WeightVector};

/// Default seed for every randomized subcommand; runs are reproducible
/// from their flags alone.
const DEFAULT_SEED: u64 = 42;

/// Default work budget for sweep cells, counted in N²·d kernel evaluations.
const DEFAULT_BUDGET: u128 = 2_000_000_000;

#[derive(Parser)]
#[command(name = "pdisc", version, about = "p-set discrepancy toolkit")]
struct Cli {
    /// Run single-threaded with a fixed serial order. Outputs are
    /// byte-reproducible in this mode (reductions are ordered, so the
    /// default mode produces the same bytes as well).
    #[arg(long, global = true)]
    deterministic: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a p-set and write the point-set text format.
    Gen(GenArgs),
    /// Compute a discrepancy of a point-set file.
    Disc(DiscArgs),
    /// Check Weil-type exponential-sum bounds over a frequency box (CSV).
    Weil(WeilArgs),
    /// Emit bound tables: the inverse-discrepancy table or a p-set bound check (CSV).
    Bounds(BoundsArgs),
    /// Verify the p-set discrepancy bound for one instance (JSON).
    Verify(VerifyArgs),
    /// Sweep the p-set bound over a (family, p, d) grid (CSV).
    Sweep(SweepArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    family: FamilyArg,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    d: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    #[value(name = "P", alias = "p")]
    P,
    #[value(name = "Q", alias = "q")]
    Q,
    #[value(name = "R", alias = "r")]
    R,
}

impl From<FamilyArg> for PSetFamily {
    fn from(f: FamilyArg) -> PSetFamily {
        match f {
            FamilyArg::P => PSetFamily::P,
            FamilyArg::Q => PSetFamily::Q,
            FamilyArg::R => PSetFamily::R,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    B2,
    Warnock,
    Fourier,
    Mc,
    #[value(name = "rms-shift")]
    RmsShift,
}

#[derive(Args)]
struct DiscArgs {
    #[arg(long)]
    method: MethodArg,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Frequency cutoff for the Fourier method.
    #[arg(long = "K", default_value_t = 64)]
    k_max: u32,
    /// Sample count for the mc and rms-shift methods.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Evaluate the pair sum in exact rational arithmetic (b2 method,
    /// rational sets, equal weights only).
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WeilArgs {
    #[arg(long)]
    family: FamilyArg,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    d: u32,
    #[arg(long)]
    hmax: i64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Table to emit; only `inverse` is defined.
    #[arg(long, conflicts_with = "check_thm1")]
    table: Option<String>,
    /// Check the p-set discrepancy bound over a prime/dimension grid.
    #[arg(long = "check-thm1")]
    check_thm1: bool,
    /// Dimensions, e.g. `1..12` or `1,2,5`.
    #[arg(long, default_value = "1..12")]
    d: String,
    /// Epsilon list for the inverse table.
    #[arg(long, default_value = "0.5,0.25,0.1")]
    eps: String,
    #[arg(long)]
    family: Option<FamilyArg>,
    #[arg(long, default_value_t = 23)]
    pmax: u64,
    #[arg(long, default_value_t = 5)]
    dmax: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Check the p-set periodic L2 discrepancy bound d·2^{-d/2}/√N.
    #[arg(long)]
    thm1: bool,
    #[arg(long)]
    family: FamilyArg,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    d: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated families, e.g. `P,Q,R`.
    #[arg(long, default_value = "P,Q,R")]
    families: String,
    #[arg(long, default_value_t = 13)]
    pmax: u64,
    #[arg(long, default_value_t = 5)]
    dmax: u32,
    /// Per-cell work cap in N²·d kernel evaluations; cells over budget
    /// are emitted with status BUDGET.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> std::process::ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return std::process::ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return std::process::ExitCode::from(1);
        }
    };
    configure_threads(cli.deterministic);
    match run(cli) {
        Ok(code) => std::process::ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let internal = e
                .downcast_ref::<pdisc::Error>()
                .map(|err| matches!(err, pdisc::Error::Internal(_)))
                .unwrap_or(false);
            std::process::ExitCode::from(if internal { 2 } else { 1 })
        }
    }
}

fn configure_threads(deterministic: bool) {
    let threads = if deterministic {
        Some(1)
    } else {
        std::env::var("QMC_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&n| n >= 1)
    };
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Disc(args) => cmd_disc(args, cli.deterministic),
        Command::Weil(args) => cmd_weil(args, cli.deterministic),
        Command::Bounds(args) => cmd_bounds(args, cli.deterministic),
        Command::Verify(args) => cmd_verify(args, cli.deterministic),
        Command::Sweep(args) => cmd_sweep(args, cli.deterministic),
    }
}

fn open_out(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            let file = fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
            Box::new(BufWriter::new(file))
        }
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

fn cmd_gen(args: GenArgs) -> anyhow::Result<u8> {
    let set = generate(args.family.into(), args.p, args.d as usize)?;
    let mut out = open_out(args.out.as_deref())?;
    out.write_all(write_point_set(&set).as_bytes())?;
    out.flush()?;
    Ok(0)
}

fn read_point_set(path: &Path) -> anyhow::Result<AnyPointSet> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_point_set(&text).with_context(|| format!("in {}", path.display()))
}

fn cmd_disc(args: DiscArgs, deterministic: bool) -> anyhow::Result<u8> {
    let set = read_point_set(&args.input)?;
    let weights = match &args.weights {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let w = parse_weights(&text)?;
            if w.len() != set.n_points() {
                bail!(
                    "weights file {} has {} entries for {} points",
                    path.display(),
                    w.len(),
                    set.n_points()
                );
            }
            Some(w)
        }
        None => None,
    };
    let equal = WeightVector::equal(set.n_points());
    let w = weights.as_ref().unwrap_or(&equal);

    let mut out = open_out(args.out.as_deref())?;
    let config = json!({
        "subcommand": "disc",
        "method": method_name(args.method),
        "in": args.input.display().to_string(),
        "weights": args.weights.as_ref().map(|p| p.display().to_string()),
        "K": args.k_max,
        "samples": args.samples,
        "seed": args.seed,
        "exact": args.exact,
        "deterministic": deterministic,
    });
    writeln!(out, "{}", json!({ "config": config }))?;

    if args.exact {
        if !matches!(args.method, MethodArg::B2) {
            bail!("--exact applies to --method b2 only");
        }
        if args.weights.is_some() {
            bail!("--exact supports equal weights only");
        }
        let rational = match &set {
            AnyPointSet::Rational(p) => p,
            AnyPointSet::Free(_) => {
                bail!("--exact needs a rational point set (header `d N D`)")
            }
        };
        let sq = periodic_l2_exact_sq(rational);
        let sq_f = num::ToPrimitive::to_f64(&sq).unwrap_or(f64::NAN);
        let n = set.n_points() as u64;
        let record = json!({
            "value": sq_f.max(0.0).sqrt(),
            "value_squared": sq_f,
            "method": "B2_EXACT",
            "n": n * n,
            "exact": sq.to_string(),
        });
        writeln!(out, "{record}")?;
        out.flush()?;
        return Ok(0);
    }

    let result: DiscrepancyResult = match args.method {
        MethodArg::B2 => {
            if args.weights.is_none() && set.n_points() > 0 {
                periodic_l2(&set)?
            } else {
                periodic_l2_weighted(&set, w)?
            }
        }
        MethodArg::Warnock => plain_l2_weighted(&set, w)?,
        MethodArg::Fourier => periodic_l2_fourier(&set, w, args.k_max)?,
        MethodArg::Mc => periodic_l2_mc(&set, w, args.samples, args.seed)?,
        MethodArg::RmsShift => rms_shifted_l2_mc(&set, w, args.samples, args.seed)?,
    };
    writeln!(out, "{}", serde_json::to_string(&result)?)?;
    out.flush()?;
    Ok(0)
}

fn method_name(m: MethodArg) -> &'static str {
    match m {
        MethodArg::B2 => "b2",
        MethodArg::Warnock => "warnock",
        MethodArg::Fourier => "fourier",
        MethodArg::Mc => "mc",
        MethodArg::RmsShift => "rms-shift",
    }
}

fn cmd_weil(args: WeilArgs, deterministic: bool) -> anyhow::Result<u8> {
    let family: PSetFamily = args.family.into();
    let mut out = open_out(args.out.as_deref())?;
    writeln!(
        out,
        "# config: subcommand=weil family={family} p={} d={} hmax={} deterministic={deterministic}",
        args.p, args.d, args.hmax
    )?;
    writeln!(out, "family,p,d,h,modulus,bound,status")?;
    let mut violations = 0u64;
    for_each_weil_report(family, args.p, args.d as usize, args.hmax, |r| {
        if r.status == WeilStatus::Fail {
            violations += 1;
        }
        let h: Vec<String> = r.h.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.family,
            r.p,
            r.d,
            h.join(";"),
            r.modulus_of_sum,
            r.bound,
            r.status
        );
    })?;
    out.flush()?;
    if violations > 0 {
        eprintln!("error: {violations} frequency vectors violated a guaranteed bound");
        return Ok(2);
    }
    Ok(0)
}

fn parse_dims(spec: &str) -> anyhow::Result<Vec<u32>> {
    if let Some((a, b)) = spec.split_once("..") {
        let lo: u32 = a.trim().parse().context("bad dimension range start")?;
        let hi: u32 = b.trim().parse().context("bad dimension range end")?;
        if lo == 0 || hi < lo {
            bail!("bad dimension range `{spec}`");
        }
        return Ok((lo..=hi).collect());
    }
    spec.split(',')
        .map(|t| {
            let d: u32 = t.trim().parse().with_context(|| format!("bad dimension `{t}`"))?;
            if d == 0 {
                bail!("dimension must be at least 1");
            }
            Ok(d)
        })
        .collect()
}

fn parse_eps_list(spec: &str) -> anyhow::Result<Vec<f64>> {
    spec.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .with_context(|| format!("bad eps `{t}`"))
        })
        .collect()
}

fn cmd_bounds(args: BoundsArgs, deterministic: bool) -> anyhow::Result<u8> {
    match (&args.table, args.check_thm1) {
        (Some(table), false) => {
            if table != "inverse" {
                bail!("unknown table `{table}` (expected `inverse`)");
            }
            let ds = parse_dims(&args.d)?;
            let epss = parse_eps_list(&args.eps)?;
            let rows = bounds::inverse_table(&ds, &epss)?;
            let mut out = open_out(args.out.as_deref())?;
            writeln!(
                out,
                "# config: subcommand=bounds table=inverse d={} eps={} deterministic={deterministic}",
                args.d, args.eps
            )?;
            writeln!(
                out,
                "d,eps,lower_equal,lower_posweights,weighted_base,weighted_intermediate,M,N_prime,upper"
            )?;
            for r in rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    r.d,
                    r.eps,
                    r.lower_equal,
                    r.lower_posweights,
                    r.weighted_base,
                    r.weighted_intermediate,
                    r.m,
                    r.n_prime,
                    r.upper
                )?;
            }
            out.flush()?;
            Ok(0)
        }
        (None, true) => {
            let family: PSetFamily = args
                .family
                .map(Into::into)
                .ok_or_else(|| anyhow::anyhow!("--check-thm1 requires --family"))?;
            let mut out = open_out(args.out.as_deref())?;
            writeln!(
                out,
                "# config: subcommand=bounds check-thm1 family={family} pmax={} dmax={} deterministic={deterministic}",
                args.pmax, args.dmax
            )?;
            let code = write_bound_rows(
                &mut out,
                &[family],
                args.pmax,
                args.dmax,
                u128::MAX,
            )?;
            out.flush()?;
            Ok(code)
        }
        _ => bail!("bounds needs exactly one of --table or --check-thm1"),
    }
}

fn cmd_verify(args: VerifyArgs, deterministic: bool) -> anyhow::Result<u8> {
    if !args.thm1 {
        bail!("verify requires --thm1");
    }
    if !is_prime(args.p) {
        bail!("--p {} is not prime", args.p);
    }
    let family: PSetFamily = args.family.into();
    let report = bounds::check_pset_bound(family, args.p, args.d)?;
    let mut out = open_out(args.out.as_deref())?;
    let config = json!({
        "subcommand": "verify",
        "check": "thm1",
        "family": family.to_string(),
        "p": args.p,
        "d": args.d,
        "deterministic": deterministic,
    });
    writeln!(out, "{}", json!({ "config": config }))?;
    writeln!(
        out,
        "{}",
        json!({ "value": report.value, "bound": report.bound, "pass": report.pass })
    )?;
    out.flush()?;
    if !report.pass {
        eprintln!(
            "error: guaranteed bound violated: value {} > bound {}",
            report.value, report.bound
        );
        return Ok(2);
    }
    Ok(0)
}

fn parse_families(spec: &str) -> anyhow::Result<Vec<PSetFamily>> {
    spec.split(',')
        .map(|t| t.trim().parse::<PSetFamily>().map_err(anyhow::Error::msg))
        .collect()
}

fn cmd_sweep(args: SweepArgs, deterministic: bool) -> anyhow::Result<u8> {
    let families = parse_families(&args.families)?;
    let mut out = open_out(args.out.as_deref())?;
    writeln!(
        out,
        "# config: subcommand=sweep families={} pmax={} dmax={} budget={} deterministic={deterministic}",
        args.families, args.pmax, args.dmax, args.budget
    )?;
    let code = write_bound_rows(&mut out, &families, args.pmax, args.dmax, args.budget)?;
    out.flush()?;
    Ok(code)
}

/// Emits `family,p,d,N,value,bound,ratio,pass` rows over the grid; rows
/// whose N²·d work estimate exceeds the budget carry `pass=BUDGET` with
/// empty value and ratio.
fn write_bound_rows(
    out: &mut dyn Write,
    families: &[PSetFamily],
    pmax: u64,
    dmax: u32,
    budget: u128,
) -> anyhow::Result<u8> {
    writeln!(out, "family,p,d,N,value,bound,ratio,pass")?;
    let mut failures = 0u64;
    for &family in families {
        for &p in &primes_up_to(pmax) {
            for d in 1..=dmax {
                let n = family.n_points(p);
                let work = (n as u128) * (n as u128) * (d as u128);
                if work > budget {
                    writeln!(
                        out,
                        "{family},{p},{d},{n},,{},,BUDGET",
                        bounds::pset_l2_bound(d, n)
                    )?;
                    continue;
                }
                let r = bounds::check_pset_bound(family, p, d)?;
                if !r.pass {
                    failures += 1;
                }
                writeln!(
                    out,
                    "{family},{p},{d},{n},{},{},{},{}",
                    r.value, r.bound, r.ratio, r.pass
                )?;
            }
        }
    }
    if failures > 0 {
        eprintln!("error: {failures} grid cells violated a guaranteed bound");
        return Ok(2);
    }
    Ok(0)
}
