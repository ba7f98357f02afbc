//! `lidstone`: solve, sweep and inspect the decoupled Lidstone FEM.

mod config;
mod error;
mod output;
mod parse;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use lidstone_fem::assembly::{ProblemCoefficients, StageTwoLoad};
use lidstone_fem::experiments::{max_error, run_sweep, Measurement, Source};
use lidstone_fem::mesh::{self, MeshKind, ShishkinParams, DEFAULT_SIGMA};
use lidstone_fem::oracle::ExactModel;
use lidstone_fem::solver::solve_fourth_order_with;

use crate::config::SweepLayer;
use crate::error::{with_flag, CliError, Result};
use crate::output::{csv_error, csv_writer, open_output, opt_sci, sci};
use crate::parse::List;

#[derive(Debug, Parser)]
#[command(name = "lidstone", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one problem and write nodal values as CSV.
    Solve(SolveArgs),
    /// Run an (epsilon, N, mesh) grid and write errors, rates and timings.
    Sweep(SweepArgs),
    /// Pretty-print a CSV file, optionally pivoted by series.
    Table(TableArgs),
    /// Write the mesh nodes as CSV.
    MeshDump(MeshDumpArgs),
}

#[derive(Debug, Args)]
struct MeshArgs {
    /// Shishkin constant sigma (>= 2).
    #[arg(long)]
    sigma: Option<f64>,
    /// Lower bound alpha of the convection coefficient.
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Debug, Args)]
struct ProblemArgs {
    /// Convection coefficient.
    #[arg(long)]
    a: Option<f64>,
    /// Reaction coefficient.
    #[arg(long)]
    b: Option<f64>,
    /// Source f = c0 + c1 x + c2 x^2 instead of f = 1.
    #[arg(long = "f-poly", value_name = "C0,C1,C2", value_parser = parse::poly)]
    f_poly: Option<[f64; 3]>,
    /// Error sampling: nodes or nodes+mid.
    #[arg(long, value_parser = parse::measurement)]
    measurement: Option<Measurement>,
    /// Second-stage load rule: lumped or consistent.
    #[arg(long)]
    load: Option<String>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    epsilon: f64,
    /// Number of intervals (even, >= 4).
    #[arg(long)]
    n: usize,
    /// uniform or shishkin.
    #[arg(long, default_value = "shishkin")]
    mesh: String,
    #[command(flatten)]
    mesh_args: MeshArgs,
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Comma-separated epsilons.
    #[arg(long, value_parser = parse::float_flag)]
    epsilon: Option<List<f64>>,
    /// Comma-separated interval counts, or START..END for a doubling sequence.
    #[arg(long, value_parser = parse::int_flag)]
    n: Option<List<usize>>,
    /// uniform, shishkin or both.
    #[arg(long, value_parser = parse::mesh_flag)]
    mesh: Option<List<MeshKind>>,
    #[command(flatten)]
    mesh_args: MeshArgs,
    #[command(flatten)]
    problem: ProblemArgs,
    /// Built-in grid: table1 .. table6 or epsilon-one.
    #[arg(long)]
    preset: Option<String>,
    /// JSON file with SweepConfig field names; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Timing repetitions per cell (median reported).
    #[arg(long)]
    repetitions: Option<usize>,
    /// Worker threads; 1 runs cells sequentially.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TableArgs {
    /// CSV file to display.
    input: PathBuf,
    /// Rows by N, one column per (epsilon, mesh) series.
    #[arg(long)]
    pivot: bool,
    /// Column shown in pivoted cells.
    #[arg(long, default_value = "max_error")]
    value: String,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MeshDumpArgs {
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    n: usize,
    /// uniform or shishkin.
    #[arg(long, default_value = "shishkin")]
    mesh: String,
    #[command(flatten)]
    mesh_args: MeshArgs,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn single_mesh(name: &str) -> Result<MeshKind> {
    name.parse::<MeshKind>().map_err(with_flag)
}

fn mesh_params(n: usize, epsilon: f64, args: &MeshArgs) -> Result<ShishkinParams> {
    let params = ShishkinParams::new(n, epsilon)
        .with_sigma(args.sigma.unwrap_or(DEFAULT_SIGMA))
        .with_alpha(args.alpha.unwrap_or(1.0));
    params.validate().map_err(with_flag)?;
    Ok(params)
}

fn load_rule(name: Option<&str>) -> Result<StageTwoLoad> {
    match name {
        Some(s) => s
            .parse::<StageTwoLoad>()
            .map_err(|_| CliError::flag("--load", format!("unknown load rule `{s}`"))),
        None => Ok(StageTwoLoad::default()),
    }
}

/// Exact solution of `-w'' = c0 + c1 x + c2 x^2`, `w(0) = w(1) = 0`.
fn poisson_exact(source: Source, x: f64) -> f64 {
    let [c0, c1, c2] = match source {
        Source::Model => [1.0, 0.0, 0.0],
        Source::Polynomial(c) => c,
    };
    let slope = c0 / 2.0 + c1 / 6.0 + c2 / 12.0;
    slope * x - c0 * x * x / 2.0 - c1 * x.powi(3) / 6.0 - c2 * x.powi(4) / 12.0
}

fn cmd_solve(args: &SolveArgs) -> Result<()> {
    let kind = single_mesh(&args.mesh)?;
    let params = mesh_params(args.n, args.epsilon, &args.mesh_args)?;
    let coeffs = ProblemCoefficients::new(
        args.epsilon,
        args.problem.a.unwrap_or(1.0),
        args.problem.b.unwrap_or(1.0),
    )
    .map_err(with_flag)?;
    let load = load_rule(args.problem.load.as_deref())?;
    let source = args
        .problem
        .f_poly
        .map_or(Source::Model, Source::Polynomial);
    let mesh = Arc::new(mesh::build(kind, &params).map_err(with_flag)?);

    let sol = solve_fourth_order_with(&mesh, &coeffs, |x| source.eval(x), load)?;
    let model = (coeffs.a == 1.0 && coeffs.b == 1.0 && source == Source::Model)
        .then(|| ExactModel::new(args.epsilon))
        .transpose()?;

    let mut w = csv_writer(open_output(args.output.as_deref())?);
    let ctx = "writing solution";
    w.write_record(["x", "u_exact", "u_fem", "w_exact", "w_fem"])
        .map_err(|e| csv_error(ctx, e))?;
    for (i, &x) in mesh.nodes().iter().enumerate() {
        w.write_record([
            sci(x),
            opt_sci(model.map(|m| m.u(x))),
            sci(sol.u.values()[i]),
            sci(poisson_exact(source, x)),
            sci(sol.w.values()[i]),
        ])
        .map_err(|e| csv_error(ctx, e))?;
    }
    w.flush().map_err(|e| CliError::io(ctx, e))?;

    if let Some(m) = model {
        let measurement = args.problem.measurement.unwrap_or_default();
        eprintln!(
            "max |u_exact - u_fem| = {}",
            sci(max_error(&sol.u, &m, measurement))
        );
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let mut layer = SweepLayer::default();
    if let Some(name) = &args.preset {
        layer = config::preset(name)?;
    }
    if let Some(path) = &args.config {
        layer = layer.merge(config::load_config(path)?);
    }
    let flags = SweepLayer {
        epsilons: args.epsilon.clone().map(|l| l.0),
        n_values: args.n.clone().map(|l| l.0),
        mesh_kinds: args
            .mesh
            .as_ref()
            .map(|ks| ks.0.iter().map(|k| k.as_str().to_string()).collect()),
        sigma: args.mesh_args.sigma,
        alpha: args.mesh_args.alpha,
        a: args.problem.a,
        b: args.problem.b,
        f_poly: args.problem.f_poly,
        measurement: args.problem.measurement.map(|m| match m {
            Measurement::NodesOnly => "nodes".to_string(),
            Measurement::NodesAndMidpoints => "nodes+mid".to_string(),
        }),
        stage_two_load: args.problem.load.clone(),
        repetitions: args.repetitions,
        assumption_constant: None,
        jobs: args.jobs,
    };
    let default_jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let sweep = layer.merge(flags).resolve(default_jobs)?;
    sweep.validate().map_err(with_flag)?;
    let records = run_sweep(&sweep).map_err(with_flag)?;
    output::write_sweep(open_output(args.output.as_deref())?, &records)
}

fn cmd_table(args: &TableArgs) -> Result<()> {
    let table = output::read_table(&args.input)?;
    let shown = if args.pivot {
        table.pivot(&args.value)?
    } else {
        table
    };
    let mut out = open_output(args.output.as_deref())?;
    out.write_all(shown.render().as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io("writing table", e))
}

fn cmd_mesh_dump(args: &MeshDumpArgs) -> Result<()> {
    let kind = single_mesh(&args.mesh)?;
    let params = mesh_params(args.n, args.epsilon, &args.mesh_args)?;
    let mesh = mesh::build(kind, &params).map_err(with_flag)?;
    let mut out = open_output(args.output.as_deref())?;
    let ctx = "writing mesh";
    if let Some(tau) = mesh.tau() {
        writeln!(out, "# tau={}", sci(tau)).map_err(|e| CliError::io(ctx, e))?;
    }
    let mut w = csv_writer(out);
    w.write_record(["index", "x"])
        .map_err(|e| csv_error(ctx, e))?;
    for (i, &x) in mesh.nodes().iter().enumerate() {
        w.write_record([i.to_string(), sci(x)])
            .map_err(|e| csv_error(ctx, e))?;
    }
    w.flush().map_err(|e| CliError::io(ctx, e))
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Table(a) => cmd_table(a),
        Command::MeshDump(a) => cmd_mesh_dump(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                error::EXIT_VALIDATION
            } else {
                0
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
