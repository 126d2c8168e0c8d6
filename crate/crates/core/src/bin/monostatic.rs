use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use monostatic::catalog::{builtin_catalog, parse_entries, reproduce_all};
use monostatic::geometry::{convexity_ratio, mass_properties};
use monostatic::io::{read_stl, to_json, write_csv, write_report, write_stl};
use monostatic::metrics::compute_metrics;
use monostatic::optimizer::{
    beta_sweep, differential_evolution, feasibility_map, parse_grid, Bounds, OptimizationProblem, OracleSettings,
};
use monostatic::oracle::{ecs, DEFAULT_THRESHOLD};
use monostatic::surfaces::{canonical_body, generate_mesh, CanonicalBody};
use monostatic::{Error, RunConfig, SurfaceFamily, SurfaceSpec};

const EXIT_ARGS: u8 = 1;
const EXIT_SPEC: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_VALIDATION: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "monostatic", version, about = "Equilibrium counting for convex bodies")]
struct Cli {
    #[command(flatten)]
    oracle: OracleArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// Number of sampled gravity directions.
    #[arg(long, global = true, default_value_t = 5000)]
    directions: usize,
    /// Neighbours per direction in the descent graph.
    #[arg(long, global = true, default_value_t = 12)]
    knn: usize,
    /// Comma-separated merge thresholds as fractions of the height range.
    #[arg(long, global = true, default_value = "0.005,0.01,0.02,0.05,0.1")]
    thresholds: String,
    /// Mesh resolution THETAxPHI.
    #[arg(long, global = true, default_value = "100x200")]
    res: String,
    #[arg(long, global = true, default_value_t = monostatic::config::DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args, Debug, Clone)]
struct SpecArgs {
    /// sloan-linear-phase, sloan-eta-phase, extended-phase, radial-f3 or radial-f4.
    #[arg(long)]
    family: String,
    #[arg(long, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    coeff: f64,
    #[arg(long, default_value_t = 1)]
    harmonic: u32,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the mesh of a surface spec as binary STL.
    Generate {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Count equilibria of an STL mesh or a surface spec.
    Ecs {
        #[arg(long, conflicts_with = "family")]
        mesh: Option<PathBuf>,
        #[arg(long)]
        family: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        coeff: f64,
        #[arg(long, default_value_t = 1)]
        harmonic: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the canonical validation bodies.
    Validate {
        /// Tessellation resolution of the cylinder and capsule.
        #[arg(long, default_value_t = 32)]
        resolution: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// ECS, convexity and height range over a list of beta values.
    SweepBeta {
        #[arg(long)]
        family: String,
        #[arg(long, allow_hyphen_values = true)]
        betas: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        coeff: f64,
        #[arg(long, default_value_t = 1)]
        harmonic: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Feasibility map over a (beta, coeff) grid.
    Map {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 1)]
        harmonic: u32,
        /// A:B:STEP or a single value.
        #[arg(long, allow_hyphen_values = true)]
        beta_grid: String,
        #[arg(long, allow_hyphen_values = true)]
        coeff_grid: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Differential evolution towards a single equilibrium.
    Optimize {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 1)]
        harmonic: u32,
        /// BETA_LO:BETA_HI,COEFF_LO:COEFF_HI; a single value fixes the parameter.
        #[arg(long, allow_hyphen_values = true)]
        bounds: String,
        #[arg(long, default_value_t = 32)]
        population: usize,
        #[arg(long, default_value_t = 200)]
        generations: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reproduce the built-in catalog.
    Catalog {
        #[arg(long, default_value = "1-13")]
        entries: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Engineering metrics of an STL mesh.
    Metrics {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Lib(Error),
    Validation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = Result<(), Failure>;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Domain { .. } | Error::InsufficientData { .. } => EXIT_ARGS,
        Error::InvalidSpec(_) | Error::NonPositiveRadius { .. } => EXIT_SPEC,
        _ => EXIT_IO,
    }
}

fn report_error(code: u8, kind: &str, message: &str) -> ExitCode {
    eprintln!("{}", json!({ "error": kind, "message": message, "exit_code": code }));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            return report_error(EXIT_ARGS, "arguments", e.to_string().trim());
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => report_error(exit_code(&e), e.kind(), &e.to_string()),
        Err(Failure::Validation(msg)) => report_error(EXIT_VALIDATION, "validation", &msg),
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{p}` in `{s}`"))))
        .collect()
}

fn parse_res(s: &str) -> Result<(usize, usize), Error> {
    let bad = || Error::Parse(format!("resolution `{s}` is not THETAxPHI"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn parse_bounds(s: &str) -> Result<(Bounds, Bounds), Error> {
    let bad = || Error::Parse(format!("bounds `{s}` are not LO:HI,LO:HI"));
    let (b, c) = s.split_once(',').ok_or_else(bad)?;
    let one = |p: &str| -> Result<Bounds, Error> {
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad());
        match p.split_once(':') {
            Some((lo, hi)) => Ok(Bounds::new(num(lo)?, num(hi)?)),
            None => Ok(Bounds::fixed(num(p)?)),
        }
    };
    Ok((one(b)?, one(c)?))
}

fn fmt_count(c: Option<u64>) -> String {
    c.map_or_else(|| "none".into(), |v| v.to_string())
}

fn build_config(args: &OracleArgs) -> Result<RunConfig, Error> {
    let (n_theta, n_phi) = parse_res(&args.res)?;
    let config = RunConfig {
        directions: args.directions,
        knn: args.knn,
        thresholds: parse_list(&args.thresholds)?,
        n_theta,
        n_phi,
        seed: args.seed,
        ..RunConfig::default()
    };
    config.validate()?;
    Ok(config)
}

fn spec_of(family: &str, beta: f64, coeff: f64, harmonic: u32) -> Result<SurfaceSpec, Error> {
    let spec = SurfaceSpec::new(family.parse::<SurfaceFamily>()?, beta, coeff, harmonic);
    spec.validate()?;
    Ok(spec)
}

fn emit<T: Serialize>(config: &RunConfig, report: &T, out: Option<&Path>) -> CmdResult {
    match out {
        Some(p) => write_report(report, config, p)?,
        None => println!("{}", to_json(config, report)?),
    }
    Ok(())
}

fn warn(spec: &SurfaceSpec) {
    for w in spec.bound_warnings() {
        eprintln!("{}", json!({ "warning": w }));
    }
}

fn run(cli: Cli) -> CmdResult {
    let mut config = build_config(&cli.oracle)?;
    match cli.command {
        Command::Generate { spec, out } => {
            let spec = spec_of(&spec.family, spec.beta, spec.coeff, spec.harmonic)?;
            warn(&spec);
            let mesh = generate_mesh(&spec, config.n_theta, config.n_phi)?;
            let mass = mass_properties(&mesh)?;
            write_stl(&mesh, &out, &spec.summary())?;
            let summary = json!({
                "spec": spec,
                "vertices": mesh.vertices.len(),
                "triangles": mesh.triangles.len(),
                "volume": mass.volume,
                "com": mass.com,
                "path": out,
            });
            emit(&config, &summary, None)
        }
        Command::Ecs { mesh, family, beta, coeff, harmonic, out } => {
            let m = match (mesh, family) {
                (Some(path), _) => read_stl(&path)?,
                (None, Some(f)) => {
                    let beta = beta.ok_or_else(|| Error::Parse("--beta is required with --family".into()))?;
                    let spec = spec_of(&f, beta, coeff, harmonic)?;
                    warn(&spec);
                    generate_mesh(&spec, config.n_theta, config.n_phi)?
                }
                (None, None) => return Err(Error::Parse("give --mesh or --family".into()).into()),
            };
            let report = ecs(&m, &config.direction_set()?, &config.thresholds)?;
            emit(&config, &report, out.as_deref())
        }
        Command::Validate { resolution, out } => {
            let dirs = config.direction_set()?;
            let mut reports = serde_json::Map::new();
            for kind in CanonicalBody::ALL {
                let res = if kind == CanonicalBody::Sphere { config.n_theta } else { resolution };
                let mesh = canonical_body(kind, res)?;
                reports.insert(
                    kind.name().into(),
                    serde_json::to_value(ecs(&mesh, &dirs, &config.thresholds)?).map_err(Error::from)?,
                );
            }
            let count = |k: &str, key: &str| -> Option<usize> {
                reports[k][key].as_object()?.get(&format!("{DEFAULT_THRESHOLD}"))?.as_u64().map(|v| v as usize)
            };
            let cylinder = reports["cylinder"]["default_ecs"].as_u64();
            let capsule = reports["capsule"]["default_ecs"].as_u64();
            let pass = cylinder == Some(2) && capsule == Some(1);
            let summary = json!({
                "sphere": reports["sphere"]["default_ecs"],
                "cube": {
                    "fixpoint": count("cube", "merged_count_by_threshold"),
                    "single_pass": count("cube", "single_pass_count_by_threshold"),
                },
                "cylinder": cylinder,
                "capsule": capsule,
                "pass": pass,
                "reports": reports,
            });
            emit(&config, &summary, out.as_deref())?;
            if pass {
                Ok(())
            } else {
                Err(Failure::Validation(format!(
                    "expected cylinder = 2 and capsule = 1, got cylinder = {}, capsule = {}",
                    fmt_count(cylinder),
                    fmt_count(capsule)
                )))
            }
        }
        Command::SweepBeta { family, betas, coeff, harmonic, out } => {
            let template = spec_of(&family, 0.0, coeff, harmonic)?;
            let betas = parse_list(&betas)?;
            let rows = beta_sweep(&template, &betas, &OracleSettings::from_config(&config)?);
            write_csv(&rows, &out)?;
            emit(&config, &json!({ "rows": rows.len(), "path": out }), None)
        }
        Command::Map { family, harmonic, beta_grid, coeff_grid, out } => {
            let template = spec_of(&family, 0.0, 0.0, harmonic)?;
            let betas = parse_grid(&beta_grid)?;
            let coeffs = parse_grid(&coeff_grid)?;
            let map = feasibility_map(&template, &betas, &coeffs, &OracleSettings::from_config(&config)?)?;
            write_csv(&map.cells, &out)?;
            let summary = json!({
                "cells": map.cells.len(),
                "feasible_cells": map.cells.iter().filter(|c| c.feasible).count(),
                "component_count": map.component_count(),
                "components": map.components,
                "path": out,
            });
            emit(&config, &summary, None)
        }
        Command::Optimize { family, harmonic, bounds, population, generations, out } => {
            let (b, c) = parse_bounds(&bounds)?;
            let family: SurfaceFamily = family.parse()?;
            let mut problem = OptimizationProblem::new(family, harmonic, b, c, config.seed);
            problem.population = population;
            problem.generations = generations;
            problem.verify = RunConfig { azimuth_offset: problem.verify.azimuth_offset, ..config.clone() };
            if let Err(e) = problem.validate() {
                return Err(match e {
                    Error::Domain { .. } => Error::Parse(e.to_string()),
                    other => other,
                }
                .into());
            }
            let result = differential_evolution(&problem)?;
            write_report(&json!({ "problem": problem, "result": result }), &config, &out)?;
            emit(
                &config,
                &json!({
                    "status": result.status,
                    "best_spec": result.best_spec,
                    "best_objective": result.best_objective,
                    "verified": result.verification.passed,
                    "generations_run": result.generations_run,
                    "path": out,
                }),
                None,
            )
        }
        Command::Catalog { entries, out } => {
            let selected = parse_entries(&entries)?;
            fs::create_dir_all(&out).map_err(Error::from)?;
            config.output_dir = Some(out.clone());
            let all = builtin_catalog();
            let chosen: Vec<_> = all.into_iter().filter(|e| selected.contains(&e.index)).collect();
            let report = reproduce_all(&chosen, &OracleSettings::from_config(&config)?);
            for e in &report.entries {
                if let Ok(mesh) = generate_mesh(&e.spec, config.n_theta, config.n_phi) {
                    write_stl(&mesh, &out.join(format!("entry_{:02}.stl", e.index)), &e.spec.summary())?;
                }
            }
            write_report(&report, &config, &out.join("catalog.json"))?;
            let verdicts: Vec<_> = report
                .entries
                .iter()
                .map(|e| {
                    json!({
                        "index": e.index,
                        "ecs_all_one": e.verdict.as_ref().map(|v| v.ecs_all_one),
                        "all_pass": e.passed(),
                        "error": e.error,
                    })
                })
                .collect();
            emit(&config, &json!({ "entries": verdicts, "aggregate": report.aggregate }), None)
        }
        Command::Metrics { mesh, out } => {
            let m = read_stl(&mesh)?;
            let report = compute_metrics(&m, &config.direction_set()?)?;
            let ratio = convexity_ratio(&m)?;
            emit(&config, &json!({ "metrics": report, "convexity_ratio": ratio }), out.as_deref())
        }
    }
}
