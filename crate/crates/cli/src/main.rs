use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nodal_core::arith::Rational;
use nodal_core::checks::{self, CheckOutcome};
use nodal_core::integrand::Mode;
use nodal_core::localization::{count_nodal_with, LocalizationOptions, NodalCount};
use nodal_core::node_polynomials::{node_polynomial_cached, NodePolynomialRecord, PolynomialCache};
use nodal_core::weights::{Perturbation, Specialization};
use nodal_core::Error;

const SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "nodal", version, about = "Exact counts of nodal plane curves in P3 meeting general lines")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Plane mode: curves in P3 meeting lines, or curves in a fixed plane through points.
    #[arg(long, value_enum, default_value_t = ModeArg::P3, global = true)]
    mode: ModeArg,

    /// Explicit torus values λ0,λ1,λ2,λ3 (integers or p/q).
    #[arg(long = "spec", value_name = "L0,L1,L2,L3", global = true)]
    spec: Option<String>,

    /// Seed for the pseudorandom specialization pool.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..), global = true)]
    jobs: Option<u32>,

    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Directory for cached node polynomials.
    #[arg(long, env = "NODAL_CACHE_DIR", global = true)]
    cache_dir: Option<PathBuf>,

    /// Include wall-clock timings and timestamps in the output.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count δ-nodal degree-d curves.
    Count {
        #[arg(long)]
        delta: u32,
        #[arg(long)]
        degree: u32,
        /// Recompute every integral under a second specialization.
        #[arg(long)]
        verify: bool,
    },
    /// Reconstruct the node polynomial for δ nodes.
    Poly {
        #[arg(long)]
        delta: u32,
        /// Skip the second-specialization check.
        #[arg(long)]
        no_verify: bool,
    },
    /// Run the verification suite.
    Check {
        #[arg(long, value_enum)]
        only: Option<Section>,
        /// Deliberately break a weight convention (fault injection).
        #[arg(long, value_enum, hide = true)]
        perturb: Option<PerturbArg>,
    },
    /// List cached node polynomials.
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    P3,
    P2,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::P3 => Mode::P3,
            ModeArg::P2 => Mode::P2Fixed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Section {
    Calibration,
    Tables,
    Bps,
    Weights,
    Specialization,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PerturbArg {
    DualHyperplane,
    DualFiber,
    CellSign,
}

impl From<PerturbArg> for Perturbation {
    fn from(p: PerturbArg) -> Perturbation {
        match p {
            PerturbArg::DualHyperplane => Perturbation::DualHyperplane,
            PerturbArg::DualFiber => Perturbation::DualFiber,
            PerturbArg::CellSign => Perturbation::CellSign,
        }
    }
}

/// Failure classes, mapped to exit codes.
enum Failure {
    Verification(anyhow::Error),
    InvalidInput(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidSpec(_)
            | Error::InvalidSpecialization(_)
            | Error::InvalidPartition(_)
            | Error::NuUnavailable { .. }
            | Error::UnsupportedComponents(_) => Failure::InvalidInput(e.into()),
            other => Failure::Verification(other.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Verification(e)
    }
}

struct RunConfig {
    mode: Mode,
    specialization: Specialization,
    json: bool,
    timing: bool,
    cache: Option<PolynomialCache>,
}

impl RunConfig {
    fn from_cli(cli: &Cli) -> Result<Self, Failure> {
        let specialization = match (&cli.spec, cli.seed) {
            (Some(s), seed) => parse_spec(s, seed.unwrap_or(0)).map_err(Failure::InvalidInput)?,
            (None, Some(seed)) => Specialization::from_seed(seed),
            (None, None) => Specialization::default(),
        };
        Ok(RunConfig {
            mode: cli.mode.into(),
            specialization,
            json: cli.json,
            timing: cli.timing,
            cache: PolynomialCache::locate(cli.cache_dir.clone()),
        })
    }

    fn localization(&self, verify: bool) -> LocalizationOptions {
        LocalizationOptions {
            specialization: self.specialization.clone(),
            verify,
            ..Default::default()
        }
    }
}

fn parse_spec(s: &str, seed: u64) -> anyhow::Result<Specialization> {
    let values: Vec<Rational> = s
        .split(',')
        .map(|v| v.trim().parse::<Rational>().map_err(|e| anyhow!("--spec value {v:?}: {e}")))
        .collect::<anyhow::Result<_>>()?;
    let values: [Rational; 4] = values
        .try_into()
        .map_err(|_| anyhow!("--spec needs exactly four values"))?;
    Ok(Specialization::with_seed(values, seed)?)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs as usize)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Verification(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::InvalidInput(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` means the command ran but a check failed.
fn run(cli: &Cli) -> Result<bool, Failure> {
    let cfg = RunConfig::from_cli(cli)?;
    match &cli.command {
        Command::Count {
            delta,
            degree,
            verify,
        } => cmd_count(*delta, *degree, *verify, &cfg),
        Command::Poly { delta, no_verify } => cmd_poly(*delta, !no_verify, &cfg),
        Command::Check { only, perturb } => cmd_check(*only, perturb.map(Into::into), &cfg),
        Command::Table => cmd_table(&cfg),
    }
}

fn print_json(v: &Value) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(v).context("serializing output")?);
    Ok(())
}

fn count_json(c: &NodalCount, elapsed_ms: Option<u128>) -> Value {
    let integrals: Vec<Value> = c
        .integrals
        .iter()
        .map(|r| {
            json!({
                "i": r.i,
                "value": r.value,
                "fixed_points": r.fixed_point_count,
                "specialization": r.spec_used,
            })
        })
        .collect();
    let mut v = json!({
        "schema": SCHEMA,
        "command": "count",
        "delta": c.delta,
        "degree": c.d,
        "mode": c.mode,
        "value": c.value.to_string(),
        "bps": c.bps,
        "integrals": integrals,
        "fixed_point_count": c.fixed_point_count(),
        "verified": c.verification.is_some(),
    });
    if let Some(ms) = elapsed_ms {
        v["elapsed_ms"] = json!(ms);
    }
    v
}

fn cmd_count(delta: u32, degree: u32, verify: bool, cfg: &RunConfig) -> Result<bool, Failure> {
    let start = Instant::now();
    let c = count_nodal_with(delta, degree, cfg.mode, 0, &cfg.localization(verify))?;
    let elapsed = cfg.timing.then(|| start.elapsed().as_millis());
    if cfg.json {
        print_json(&count_json(&c, elapsed))?;
    } else {
        println!("{}", c.value);
        if let Some(ms) = elapsed {
            eprintln!(
                "{} fixed points, {ms} ms{}",
                c.fixed_point_count(),
                if verify { ", verified" } else { "" }
            );
        }
    }
    Ok(true)
}

fn poly_json(rec: &NodePolynomialRecord, cached: bool, timing: bool) -> anyhow::Result<Value> {
    let mut shown = rec.clone();
    if !timing {
        shown.timestamp_unix = None;
    }
    let mut v = serde_json::to_value(&shown)?;
    v["schema"] = json!(SCHEMA);
    v["command"] = json!("poly");
    if timing {
        v["cached"] = json!(cached);
    }
    Ok(v)
}

fn describe_poly(rec: &NodePolynomialRecord) {
    let range = |r: &[u32]| match (r.first(), r.last()) {
        (Some(a), Some(b)) => format!("{a}..{b}"),
        _ => "-".into(),
    };
    println!(
        "delta={} mode={} degree={} samples d={} checks d={}{}",
        rec.delta,
        rec.mode,
        rec.polynomial.degree().unwrap_or(0),
        range(&rec.sample_range),
        range(&rec.check_range),
        if rec.verified { " verified" } else { "" }
    );
    println!("unordered nodes: {}", rec.polynomial);
    println!("ordered nodes:   {}", rec.ordered);
}

fn cmd_poly(delta: u32, verify: bool, cfg: &RunConfig) -> Result<bool, Failure> {
    let start = Instant::now();
    let (rec, cached) =
        node_polynomial_cached(delta, cfg.mode, &cfg.localization(verify), cfg.cache.as_ref())?;
    if cfg.json {
        print_json(&poly_json(&rec, cached, cfg.timing)?)?;
    } else {
        describe_poly(&rec);
        if cfg.timing {
            eprintln!(
                "{} ms{}",
                start.elapsed().as_millis(),
                if cached { " (cached)" } else { "" }
            );
        }
    }
    Ok(true)
}

fn cmd_check(
    only: Option<Section>,
    perturb: Option<Perturbation>,
    cfg: &RunConfig,
) -> Result<bool, Failure> {
    let mut opts = cfg.localization(true);
    opts.perturbation = perturb.unwrap_or_default();
    let wanted = |s: Section| only.is_none_or(|o| o == s);
    let mut sections: Vec<(&str, Vec<CheckOutcome>)> = Vec::new();
    let mut all_passed = true;
    let mut run_section = |name: &'static str, outcomes: Vec<CheckOutcome>| -> bool {
        let ok = outcomes.iter().all(|o| o.passed);
        if !cfg.json {
            let passed = outcomes.iter().filter(|o| o.passed).count();
            println!("{name}: {passed}/{} passed", outcomes.len());
            for o in &outcomes {
                println!("  {} {:<28} {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
            }
        }
        sections.push((name, outcomes));
        all_passed &= ok;
        ok
    };

    let calibrated = if wanted(Section::Calibration) {
        let mut outcomes = checks::calibration(&opts);
        outcomes.extend(checks::smooth_calibration(&opts));
        run_section("calibration", outcomes)
    } else {
        true
    };
    if !calibrated {
        if !cfg.json {
            println!("calibration failed; remaining checks skipped");
        }
    } else {
        if wanted(Section::Tables) {
            run_section("tables", checks::tables(&opts));
        }
        if wanted(Section::Bps) {
            run_section("bps", vec![checks::bps_oracle(12, 40)]);
        }
        if wanted(Section::Weights) {
            run_section("weights", vec![checks::weights_oracle(5, &cfg.specialization)]);
        }
        if wanted(Section::Specialization) {
            run_section("specialization", checks::specialization_grid(3, 6, &opts));
        }
    }
    if cfg.json {
        let body: Vec<Value> = sections
            .iter()
            .map(|(name, outcomes)| json!({ "section": name, "outcomes": outcomes }))
            .collect();
        print_json(&json!({
            "schema": SCHEMA,
            "command": "check",
            "passed": all_passed,
            "sections": body,
        }))?;
    }
    Ok(all_passed)
}

fn cmd_table(cfg: &RunConfig) -> Result<bool, Failure> {
    let records = match &cfg.cache {
        Some(cache) => cache.list()?,
        None => {
            return Err(Failure::InvalidInput(anyhow!(
                "no cache directory (use --cache-dir or NODAL_CACHE_DIR)"
            )))
        }
    };
    if cfg.json {
        let rows: Vec<Value> = records
            .iter()
            .map(|r| poly_json(r, true, cfg.timing))
            .collect::<anyhow::Result<_>>()?;
        print_json(&json!({ "schema": SCHEMA, "command": "table", "records": rows }))?;
    } else if records.is_empty() {
        println!("no cached node polynomials");
    } else {
        for r in &records {
            describe_poly(r);
        }
    }
    Ok(true)
}
