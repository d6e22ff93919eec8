//! `assocfam`: verify surfaces against the structure equations, sweep
//! generalized associate families, and classify their existence.
//!
//! Exit codes: 0 pass / definite outcome, 1 failed suite, 2 configuration
//! error, 3 undetermined classification.

use std::path::PathBuf;
use std::process::ExitCode;

use assocfam::catalog::make_surface_with;
use assocfam::classify::{classify, ClassifyTolerances};
use assocfam::compat::{residual_grid, ResidualReport};
use assocfam::family::{verify_family, FamilyLaw};
use assocfam::report::{
    family_sweep_csv, residual_report_csv, to_json, verdict_csv, write_atomic, FamilySweep,
};
use assocfam::surface::GridSpec;
use assocfam::{Error, Outcome};

const USAGE: &str = "\
usage: assocfam <command> [flags]

commands:
  verify     evaluate the structure-equation residual suite on a grid
  family     sweep a generalized associate family over theta values
  classify   decide whether an associate family can exist

flags:
  --space <descriptor>   E(kappa,tau) or W(eps,eps0,c,k,a=<warp>,I=[lo,hi])
  --surface <name>       catalog entry (see docs/catalog.md)
  --param k=v            entry parameter, repeatable
  --grid NxM             sample grid (default 21x21)
  --margin r             boundary margin fraction (default 0.05)
  --thetas a,b,c         family parameters in radians (family command)
  --law <law>            canonical | custom(F1=..,F2=..,lam=..,mu=..)
  --tol x                residual tolerance (default 1e-8)
  --tol-case x           case-split tolerance on |f| and |T| (default 1e-6)
  --out <path>           write the report file (default: stdout)
  --format json|csv      report format (default json)
";

#[derive(Debug, Clone, Copy, PartialEq)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug)]
struct RunConfig {
    command: String,
    space: Option<String>,
    surface: String,
    params: Vec<(String, String)>,
    grid: GridSpec,
    thetas: Vec<f64>,
    law: String,
    tol: f64,
    tol_case: f64,
    out: Option<PathBuf>,
    format: Format,
}

fn parse_args(args: &[String]) -> Result<RunConfig, String> {
    if args.is_empty() {
        return Err("missing command".into());
    }
    let command = args[0].clone();
    if !["verify", "family", "classify"].contains(&command.as_str()) {
        return Err(format!("unknown command {command:?}"));
    }
    let mut cfg = RunConfig {
        command,
        space: None,
        surface: String::new(),
        params: Vec::new(),
        grid: GridSpec::default(),
        thetas: vec![
            std::f64::consts::FRAC_PI_8,
            std::f64::consts::FRAC_PI_4,
            3.0 * std::f64::consts::FRAC_PI_8,
        ],
        law: "canonical".to_string(),
        tol: 1e-8,
        tol_case: 1e-6,
        out: None,
        format: Format::Json,
    };
    let mut it = args[1..].iter();
    while let Some(flag) = it.next() {
        let mut value = || {
            it.next()
                .cloned()
                .ok_or_else(|| format!("flag {flag} needs a value"))
        };
        match flag.as_str() {
            "--space" => cfg.space = Some(value()?),
            "--surface" => cfg.surface = value()?,
            "--param" => {
                let v = value()?;
                let (k, val) = v
                    .split_once('=')
                    .ok_or_else(|| format!("--param {v:?} is not key=value"))?;
                cfg.params.push((k.to_string(), val.to_string()));
            }
            "--grid" => {
                let v = value()?;
                let (nu, nv) = v
                    .split_once('x')
                    .ok_or_else(|| format!("--grid {v:?} is not NxM"))?;
                cfg.grid.nu = nu.parse().map_err(|_| format!("bad grid size {nu:?}"))?;
                cfg.grid.nv = nv.parse().map_err(|_| format!("bad grid size {nv:?}"))?;
                if cfg.grid.nu < 2 || cfg.grid.nv < 2 {
                    return Err("grid must be at least 2x2".into());
                }
            }
            "--margin" => {
                cfg.grid.margin = value()?
                    .parse()
                    .map_err(|_| "bad margin value".to_string())?;
                if !(0.0..0.5).contains(&cfg.grid.margin) {
                    return Err("margin must be in [0, 0.5)".into());
                }
            }
            "--thetas" => {
                let v = value()?;
                cfg.thetas = v
                    .split(',')
                    .map(|s| s.trim().parse::<f64>())
                    .collect::<Result<Vec<f64>, _>>()
                    .map_err(|_| format!("bad theta list {v:?}"))?;
                if cfg.thetas.is_empty() {
                    return Err("theta list is empty".into());
                }
            }
            "--law" => cfg.law = value()?,
            "--tol" => {
                cfg.tol = value()?.parse().map_err(|_| "bad tolerance".to_string())?;
                if cfg.tol <= 0.0 || !cfg.tol.is_finite() {
                    return Err("tolerance must be positive".into());
                }
            }
            "--tol-case" => {
                cfg.tol_case = value()?
                    .parse()
                    .map_err(|_| "bad case tolerance".to_string())?;
                if cfg.tol_case <= 0.0 || !cfg.tol_case.is_finite() {
                    return Err("case tolerance must be positive".into());
                }
            }
            "--out" => cfg.out = Some(PathBuf::from(value()?)),
            "--format" => {
                cfg.format = match value()?.as_str() {
                    "json" => Format::Json,
                    "csv" => Format::Csv,
                    other => return Err(format!("unknown format {other:?}")),
                }
            }
            other => return Err(format!("unknown flag {other:?}")),
        }
    }
    if cfg.surface.is_empty() {
        return Err("--surface is required".into());
    }
    Ok(cfg)
}

fn code_for(err: &Error) -> u8 {
    match err {
        Error::Parse(_)
        | Error::InvalidSpace(_)
        | Error::InvalidLaw(_)
        | Error::UnknownEntry(_)
        | Error::ParamOutOfRange(_) => 2,
        _ => 1,
    }
}

fn emit(cfg: &RunConfig, content: &str) -> Result<(), String> {
    match &cfg.out {
        Some(path) => write_atomic(path, content).map_err(|e| format!("write {path:?}: {e}")),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn summary_line(r: &ResidualReport) -> String {
    let cols: Vec<String> = r
        .equations
        .iter()
        .map(|e| format!("{}={:.3e}", e.name, e.max_abs))
        .collect();
    format!(
        "theta={} {} {}",
        r.theta.map(|t| format!("{t:.6}")).unwrap_or_else(|| "-".into()),
        if r.pass { "PASS" } else { "FAIL" },
        cols.join(" ")
    )
}

fn run() -> Result<u8, (u8, String)> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--help" || a == "-h") || args.is_empty() {
        eprint!("{USAGE}");
        return Ok(if args.is_empty() { 2 } else { 0 });
    }
    let cfg = parse_args(&args).map_err(|e| (2u8, format!("{e}\n\n{USAGE}")))?;

    let imm = make_surface_with(&cfg.surface, cfg.space.as_deref(), &cfg.params)
        .map_err(|e| (code_for(&e), e.to_string()))?;

    match cfg.command.as_str() {
        "verify" => {
            let report = residual_grid(&imm, &cfg.grid, cfg.tol);
            let content = match cfg.format {
                Format::Json => to_json(&report),
                Format::Csv => residual_report_csv(&report),
            };
            emit(&cfg, &content).map_err(|e| (2u8, e))?;
            if cfg.out.is_some() {
                println!("{}", summary_line(&report));
            }
            Ok(if report.pass { 0 } else { 1 })
        }
        "family" => {
            let law = FamilyLaw::parse(&cfg.law).map_err(|e| (2u8, e.to_string()))?;
            let reports = verify_family(&imm, &law, &cfg.thetas, &cfg.grid, cfg.tol)
                .map_err(|e| (code_for(&e), e.to_string()))?;
            let sweep = FamilySweep::new(law.to_string(), cfg.tol, reports);
            let content = match cfg.format {
                Format::Json => to_json(&sweep),
                Format::Csv => family_sweep_csv(&sweep),
            };
            emit(&cfg, &content).map_err(|e| (2u8, e))?;
            if cfg.out.is_some() {
                for m in &sweep.members {
                    println!("{}", summary_line(m));
                }
            }
            if sweep.pass {
                Ok(0)
            } else {
                if let Some(t) = sweep.first_failure_theta {
                    eprintln!("first failing theta: {t}");
                }
                Ok(1)
            }
        }
        "classify" => {
            let tols = ClassifyTolerances {
                suite: cfg.tol,
                case: cfg.tol_case,
                ..ClassifyTolerances::default()
            };
            let verdict =
                classify(&imm, &cfg.grid, &tols).map_err(|e| (code_for(&e), e.to_string()))?;
            let content = match cfg.format {
                Format::Json => to_json(&verdict),
                Format::Csv => verdict_csv(&verdict),
            };
            emit(&cfg, &content).map_err(|e| (2u8, e))?;
            if cfg.out.is_some() {
                println!(
                    "outcome={:?} case={:?}{}",
                    verdict.outcome,
                    verdict.case,
                    verdict
                        .obstruction
                        .as_ref()
                        .map(|o| format!(" obstruction={o}"))
                        .unwrap_or_default()
                );
            }
            Ok(if verdict.outcome == Outcome::Undetermined { 3 } else { 0 })
        }
        _ => unreachable!("validated in parse_args"),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err((code, msg)) => {
            eprintln!("assocfam: {msg}");
            ExitCode::from(code)
        }
    }
}
