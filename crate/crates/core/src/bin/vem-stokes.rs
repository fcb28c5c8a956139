use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use vem_stokes::harness::{
    dof_saving_table, emit_outputs, parse_element, run_convergence, run_equivalence, write_dof_table,
    ExperimentConfig, SchemeChoice, TestCase,
};
use vem_stokes::polybasis::SplitMode;
use vem_stokes::{Error, Result};

#[derive(Parser)]
#[command(name = "vem-stokes", version, about = "Divergence-free virtual elements for 2D Stokes flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence study of a manufactured solution.
    Run(RunArgs),
    /// Full versus reduced scheme discrepancy.
    Equivalence(RunArgs),
    /// Percentage of unknowns removed by the reduced scheme.
    DofTable(DofArgs),
}

/// Shared experiment options. Flags override values read from `--config`.
#[derive(Args, Debug, Default)]
struct Common {
    /// TOML file with any of: family, h, k, element, scheme, split, seed, lloyd, nu, test, out.
    #[arg(long)]
    config: Option<PathBuf>,
    /// V (Voronoi), T (criss-cross triangles), D (diagonal triangles), Q or file:PATH.
    #[arg(long)]
    family: Option<String>,
    /// Mesh sizes, e.g. 1/4,1/8 or 0.25,0.125.
    #[arg(long, value_delimiter = ',')]
    h: Option<Vec<String>>,
    /// Polynomial degrees.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    /// Seed of the Voronoi generator.
    #[arg(long)]
    seed: Option<u64>,
    /// Lloyd iterations of the Voronoi generator.
    #[arg(long)]
    lloyd: Option<usize>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Manufactured solution, 1 or 2.
    #[arg(long)]
    test: Option<u8>,
    /// new or classic.
    #[arg(long)]
    element: Option<String>,
    /// full, reduced or reduced-post.
    #[arg(long)]
    scheme: Option<String>,
    /// rotational or orthogonal complement of the gradients.
    #[arg(long)]
    split: Option<String>,
    /// Viscosity
    #[arg(long)]
    nu: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fail unless every fitted slope is within this distance of k.
    #[arg(long)]
    expect_slope: Option<f64>,
}

#[derive(Args, Debug)]
struct DofArgs {
    #[command(flatten)]
    common: Common,
    /// CSV output file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    family: Option<String>,
    h: Option<Vec<f64>>,
    k: Option<Vec<usize>>,
    element: Option<String>,
    scheme: Option<String>,
    split: Option<String>,
    seed: Option<u64>,
    lloyd: Option<usize>,
    nu: Option<f64>,
    test: Option<u8>,
    out: Option<PathBuf>,
}

fn read_config(path: Option<&Path>) -> Result<FileConfig> {
    let Some(path) = path else { return Ok(FileConfig::default()) };
    let text = std::fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn parse_h(s: &str) -> Result<f64> {
    let bad = || Error::Config(format!("cannot read mesh size '{s}'"));
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            Ok(a / b)
        }
        None => s.trim().parse().map_err(|_| bad()),
    }
}

fn parse_split(s: &str) -> Result<SplitMode> {
    match s {
        "rotational" => Ok(SplitMode::Rotational),
        "orthogonal" => Ok(SplitMode::Orthogonal),
        _ => Err(Error::Config(format!("unknown split '{s}' (expected rotational or orthogonal)"))),
    }
}

fn base_config(common: &Common, file: &FileConfig) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    if let Some(f) = common.family.as_ref().or(file.family.as_ref()) {
        cfg.family = f.parse()?;
    }
    match (&common.h, &file.h) {
        (Some(list), _) => cfg.hs = list.iter().map(|s| parse_h(s)).collect::<Result<_>>()?,
        (None, Some(list)) => cfg.hs = list.clone(),
        _ => {}
    }
    if let Some(k) = common.k.as_ref().or(file.k.as_ref()) {
        cfg.ks = k.clone();
    }
    cfg.seed = common.seed.or(file.seed).unwrap_or(cfg.seed);
    cfg.lloyd_iters = common.lloyd.or(file.lloyd).unwrap_or(cfg.lloyd_iters);
    Ok(cfg)
}

fn run_config(args: &RunArgs, file: &FileConfig) -> Result<ExperimentConfig> {
    let mut cfg = base_config(&args.common, file)?;
    if let Some(e) = args.element.as_ref().or(file.element.as_ref()) {
        cfg.element = parse_element(e)?;
        if cfg.element == vem_stokes::element::ElementKind::Classic {
            cfg.scheme = SchemeChoice::Full;
        }
    }
    if let Some(s) = args.scheme.as_ref().or(file.scheme.as_ref()) {
        cfg.scheme = s.parse()?;
    }
    if let Some(s) = args.split.as_ref().or(file.split.as_ref()) {
        cfg.split = parse_split(s)?;
    }
    cfg.nu = args.nu.or(file.nu).unwrap_or(cfg.nu);
    cfg.validate()?;
    Ok(cfg)
}

fn test_case(id: u8, nu: f64) -> Result<TestCase<f64>> {
    match id {
        1 => Ok(TestCase::test1(nu)),
        2 => Ok(TestCase::test2(nu)),
        _ => Err(Error::Config(format!("unknown test {id} (expected 1 or 2)"))),
    }
}

/// Relative divergence above which a divergence-free run is reported as failed.
const DIVERGENCE_BOUND: f64 = 1e-9;

fn run(args: RunArgs, equivalence: bool) -> Result<bool> {
    let file = read_config(args.common.config.as_deref())?;
    let cfg = run_config(&args, &file)?;
    let test = args.test.or(file.test).unwrap_or(if equivalence { 2 } else { 1 });
    let out = args.out.clone().or(file.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    log::info!("test {test}, output {}, {cfg:?}", out.display());
    let case = test_case(test, cfg.nu)?;
    let rows = if equivalence { run_equivalence(&cfg, &case)? } else { run_convergence(&cfg, &case)? };
    let mut ok = true;
    println!("family,h,k,scheme,ndof,delta_u,delta_p,eps_u,eps_p,maxdiv,slope_u,slope_p");
    let show = |v: Option<f64>| v.map(|x| format!("{x:.4e}")).unwrap_or_default();
    for r in &rows {
        println!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.family,
            r.h,
            r.k,
            r.scheme,
            r.ndof,
            show(r.delta_u),
            show(r.delta_p),
            show(r.eps_u),
            show(r.eps_p),
            show(r.maxdiv),
            r.slope_u.map(|s| format!("{s:.3}")).unwrap_or_default(),
            r.slope_p.map(|s| format!("{s:.3}")).unwrap_or_default(),
        );
        if let Some(tol) = args.expect_slope {
            for (name, s) in [("delta_u", r.slope_u), ("delta_p", r.slope_p)] {
                if let Some(s) = s.filter(|s| (s - r.k as f64).abs() > tol) {
                    eprintln!("slope of {name} for k = {} is {s:.3}, outside k +- {tol}", r.k);
                    ok = false;
                }
            }
        }
        for (name, e) in [("eps_u", r.eps_u), ("eps_p", r.eps_p)] {
            if let Some(e) = e.filter(|e| !(*e <= 1e-8)) {
                eprintln!("{name} = {e:.3e} on h = {} k = {}: full and reduced schemes disagree", r.h, r.k);
                ok = false;
            }
        }
    }
    if cfg.element == vem_stokes::element::ElementKind::DivFree {
        for r in rows.iter().filter(|r| r.maxdiv.is_some_and(|d| !(d <= DIVERGENCE_BOUND))) {
            eprintln!("divergence {:?} above {DIVERGENCE_BOUND:e} on h = {} k = {}", r.maxdiv, r.h, r.k);
            ok = false;
        }
    }
    let written = emit_outputs(&rows, &out)?;
    log::info!("wrote {} files to {}", written.len(), out.display());
    Ok(ok)
}

fn dof_table(args: DofArgs) -> Result<bool> {
    let file = read_config(args.common.config.as_deref())?;
    let mut cfg = base_config(&args.common, &file)?;
    if args.common.k.is_none() && file.k.is_none() {
        cfg.ks = vec![2, 3, 4, 5];
    }
    log::info!("{cfg:?}");
    let rows = dof_saving_table(&cfg)?;
    println!("family,h,k,saving,percent_constrained,percent_unconstrained");
    for r in &rows {
        println!("{},{},{},{},{:.3},{:.3}", r.family, r.h, r.k, r.saving, r.percent_constrained, r.percent_unconstrained);
    }
    if let Some(out) = args.out.or(file.out) {
        write_dof_table(&rows, out)?;
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a, false),
        Command::Equivalence(a) => run(a, true),
        Command::DofTable(a) => dof_table(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            let mut msg = e.to_string();
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                msg.push_str(&format!("\n  caused by: {s}"));
                src = s.source();
            }
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
