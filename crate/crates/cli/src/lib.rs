//! Command implementations behind the `biotfem` binary: configuration
//! parsing, dispatch to the solver and verification studies, and report
//! emission. Stdout carries human-readable tables; CSV/JSON files carry the
//! machine-readable mirrors.

mod config;

pub use config::{parse_config, Command, RunConfig};

use biotfem::assembly::{assemble_load, assemble_source, DiscreteOperators, MaterialParams};
use biotfem::elements::project_p0;
use biotfem::timestep::{compatible_initial_data, run_transient, TimeGrid};
use biotfem::verify::report::{
    cn_csv, cn_rows, report_csv, report_rows, stability_csv, trajectory_csv, write_csv_and_json,
    StabilityRow, TrajectoryRow,
};
use biotfem::verify::{
    builtin_case, cn_experiment, convergence_study, estimate_inf_sup_rt, estimate_inf_sup_sigma,
    korn_constant, locking_sweep, state_error, ConvergenceReport,
};
use biotfem::Discretization;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

#[derive(Debug)]
pub enum CliError {
    Config { key: String, message: String },
    Numerical { context: String, message: String },
    Io { context: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerical { .. } | CliError::Io { .. } => 3,
        }
    }

    /// One machine-readable line for stderr.
    pub fn machine_line(&self) -> String {
        match self {
            CliError::Config { key, message } => {
                format!("error: kind=config key={key} message=\"{message}\"")
            }
            CliError::Numerical { context, message } => {
                format!("error: kind=numerical context={context} message=\"{message}\"")
            }
            CliError::Io { context, message } => {
                format!("error: kind=io context={context} message=\"{message}\"")
            }
        }
    }
}

fn numerical(context: &str) -> impl Fn(biotfem::Error) -> CliError + '_ {
    move |e| CliError::Numerical {
        context: context.to_string(),
        message: e.to_string(),
    }
}

fn io_err(context: &str) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io {
        context: context.to_string(),
        message: e.to_string(),
    }
}

fn timestamp(cfg: &RunConfig) -> Option<u64> {
    if cfg.no_timestamp {
        None
    } else {
        Some(
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        )
    }
}

fn params(cfg: &RunConfig) -> Result<MaterialParams, CliError> {
    MaterialParams::new(cfg.mu, cfg.lambda, cfg.c0).map_err(|e| CliError::Config {
        key: "params".to_string(),
        message: e.to_string(),
    })
}

/// Runs the configured command; writes reports and prints tables.
pub fn execute(cfg: &RunConfig) -> Result<(), CliError> {
    match cfg.command {
        Command::Run => run_single(cfg),
        Command::Converge => run_converge(cfg),
        Command::InfSup => run_infsup(cfg),
        Command::Locking => run_locking(cfg),
        Command::CnExperiment => run_cn(cfg),
    }
}

fn run_single(cfg: &RunConfig) -> Result<(), CliError> {
    let case = builtin_case(&cfg.case, params(cfg)?).map_err(numerical("case"))?;
    let disc =
        Discretization::structured(cfg.n, &cfg.boundary).map_err(numerical("discretization"))?;
    let ops = DiscreteOperators::assemble(&disc, case.params);
    let p0 = project_p0(&disc, |x| case.pressure(x, 0.0));
    let f0 = assemble_load(&disc, |x| case.body_force(x, 0.0));
    let init = compatible_initial_data(&ops, &p0, &f0, 0.0).map_err(numerical("initial data"))?;
    let grid = TimeGrid::new(cfg.t0, cfg.steps);
    let states = run_transient(
        &ops,
        grid,
        init,
        |t| assemble_load(&disc, |x| case.body_force(x, t)),
        |t| assemble_source(&disc, |x| case.fluid_source(x, t)),
        cfg.scheme,
    )
    .map_err(numerical("transient"))?;

    let rows: Vec<TrajectoryRow> = states
        .iter()
        .enumerate()
        .map(|(step, s)| {
            let e = state_error(&disc, &case, s);
            TrajectoryRow {
                step,
                t: s.t,
                error_u_1h: e.u_h1,
                error_p_l2: e.p_l2,
                error_z_l2: e.z_l2,
            }
        })
        .collect();

    println!(
        "run: case={} n={} steps={} dt={:.6} scheme={:?}",
        cfg.case,
        cfg.n,
        cfg.steps,
        grid.dt(),
        cfg.scheme
    );
    if !cfg.boundary_is_default {
        println!("note: non-default boundary; error columns compare against the default-boundary exact solution");
    }
    let max_u = rows.iter().map(|r| r.error_u_1h).fold(0.0f64, f64::max);
    let max_p = rows.iter().map(|r| r.error_p_l2).fold(0.0f64, f64::max);
    let max_z = rows.iter().map(|r| r.error_z_l2).fold(0.0f64, f64::max);
    println!("max errors: u_1h {max_u:.6e}, p_l2 {max_p:.6e}, z_l2 {max_z:.6e}");

    let csv = trajectory_csv(&rows, timestamp(cfg));
    write_csv_and_json(&cfg.out, &csv, &rows).map_err(io_err("write report"))?;
    println!("wrote {} and JSON mirror", cfg.out.display());

    if let Some(path) = &cfg.dump_mesh {
        std::fs::write(path, disc.mesh.dump(Some(&disc.tags))).map_err(io_err("dump mesh"))?;
        println!("wrote {}", path.display());
    }
    if let Some(dir) = &cfg.dump_states {
        dump_states(dir, &states).map_err(io_err("dump states"))?;
        println!("wrote {} state files under {}", states.len(), dir.display());
    }
    Ok(())
}

fn dump_states(dir: &Path, states: &[biotfem::SystemState]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (step, s) in states.iter().enumerate() {
        let mut text = String::new();
        writeln!(text, "t {}", s.t).unwrap();
        for (name, field) in [("U", &s.u), ("Z", &s.z), ("P", &s.p)] {
            writeln!(text, "{name} {}", field.len()).unwrap();
            for v in field.iter() {
                writeln!(text, "{v:.17e}").unwrap();
            }
        }
        std::fs::write(dir.join(format!("state_{step:04}.txt")), text)?;
    }
    Ok(())
}

fn print_report_table(report: &ConvergenceReport) {
    println!(
        "case={} c0={} lambda={} T0={}",
        report.case, report.c0, report.lambda, report.t_final
    );
    println!(
        "{:>6} {:>10} {:>10} {:>13} {:>13} {:>13} {:>8} {:>8} {:>8}",
        "n", "h", "dt", "err_u_1h", "err_p_l2", "err_z_l2", "rate_u", "rate_p", "rate_z"
    );
    let rates = report.rates();
    for (level, rate) in report.levels.iter().zip(rates) {
        let fmt_rate = |r: Option<f64>| r.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into());
        println!(
            "{:>6} {:>10.4e} {:>10.4e} {:>13.6e} {:>13.6e} {:>13.6e} {:>8} {:>8} {:>8}",
            level.n,
            level.h,
            level.dt,
            level.errors.u_h1,
            level.errors.p_l2,
            level.errors.z_l2,
            fmt_rate(rate.map(|r| r[0])),
            fmt_rate(rate.map(|r| r[1])),
            fmt_rate(rate.map(|r| r[2])),
        );
    }
    for (n, msg) in &report.failures {
        println!("level {n} FAILED: {msg}");
    }
}

fn run_converge(cfg: &RunConfig) -> Result<(), CliError> {
    let case = builtin_case(&cfg.case, params(cfg)?).map_err(numerical("case"))?;
    let report = convergence_study(&case, &cfg.levels, cfg.t0, cfg.scheme);
    print_report_table(&report);

    let rows = report_rows(&[&report]);
    let csv = report_csv(&rows, timestamp(cfg));
    write_csv_and_json(&cfg.out, &csv, &rows).map_err(io_err("write report"))?;
    println!("wrote {} and JSON mirror", cfg.out.display());

    if !report.failures.is_empty() {
        return Err(CliError::Numerical {
            context: "converge".to_string(),
            message: format!("{} level(s) failed", report.failures.len()),
        });
    }
    Ok(())
}

fn run_infsup(cfg: &RunConfig) -> Result<(), CliError> {
    let mut rows = Vec::new();
    println!(
        "{:>6} {:>14} {:>14} {:>8} {:>12} {:>16}",
        "n", "beta_rt", "beta_sigma", "ker", "korn_c_k", "korn_lambda_max"
    );
    for &n in &cfg.levels {
        let disc =
            Discretization::structured(n, &cfg.boundary).map_err(numerical("discretization"))?;
        let rt = estimate_inf_sup_rt(&disc).map_err(numerical("infsup rt"))?;
        let sigma = estimate_inf_sup_sigma(&disc).map_err(numerical("infsup sigma"))?;
        let korn = korn_constant(&disc).map_err(numerical("korn"))?;
        println!(
            "{:>6} {:>14.8} {:>14.8} {:>8} {:>12.8} {:>16.12}",
            n, rt.beta, sigma.beta, sigma.kernel_dim, korn.c_k, korn.lambda_max
        );
        rows.push(StabilityRow {
            n,
            beta_rt: rt.beta,
            beta_sigma: sigma.beta,
            sigma_kernel_dim: sigma.kernel_dim,
            korn_c_k: korn.c_k,
            korn_lambda_max: korn.lambda_max,
        });
    }
    let csv = stability_csv(&rows, timestamp(cfg));
    write_csv_and_json(&cfg.out, &csv, &rows).map_err(io_err("write report"))?;
    println!("wrote {} and JSON mirror", cfg.out.display());
    Ok(())
}

fn run_locking(cfg: &RunConfig) -> Result<(), CliError> {
    let c0_values = [0.0, 1e-8, 1.0];
    let lambda_values = [1.0, 1e2, 1e6];
    let cells = locking_sweep(&cfg.levels, cfg.t0, &c0_values, &lambda_values);
    for cell in &cells {
        print_report_table(cell);
        println!();
    }
    let refs: Vec<&ConvergenceReport> = cells.iter().collect();
    let rows = report_rows(&refs);
    let csv = report_csv(&rows, timestamp(cfg));
    write_csv_and_json(&cfg.out, &csv, &rows).map_err(io_err("write report"))?;
    println!("wrote {} and JSON mirror", cfg.out.display());

    let failures: usize = cells.iter().map(|c| c.failures.len()).sum();
    if failures > 0 {
        return Err(CliError::Numerical {
            context: "locking".to_string(),
            message: format!("{failures} cell level(s) failed"),
        });
    }
    Ok(())
}

fn run_cn(cfg: &RunConfig) -> Result<(), CliError> {
    let case = builtin_case(&cfg.case, params(cfg)?).map_err(numerical("case"))?;
    let grid = TimeGrid::new(cfg.t0, cfg.steps);
    let exp =
        cn_experiment(&case, cfg.n, grid, cfg.incompatible).map_err(numerical("cn-experiment"))?;
    println!(
        "cn-experiment: case={} n={} steps={} (incompatible data {})",
        cfg.case,
        exp.n,
        exp.steps,
        if cfg.incompatible {
            "included"
        } else {
            "not included; pass --incompatible"
        }
    );
    println!(
        "{:>16} {:>14} {:>24} {:>20}",
        "scheme", "init", "step1_p_increment", "trajectory_max"
    );
    for row in &exp.rows {
        println!(
            "{:>16} {:>14} {:>24.10e} {:>20.10e}",
            row.scheme, row.init, row.step1_pressure_increment, row.trajectory_max_norm
        );
    }
    let rows = cn_rows(&exp);
    let csv = cn_csv(&rows, timestamp(cfg));
    write_csv_and_json(&cfg.out, &csv, &rows).map_err(io_err("write report"))?;
    println!("wrote {} and JSON mirror", cfg.out.display());
    Ok(())
}

pub const USAGE: &str = "\
usage: biotfem <command> [--key value]...

commands:
  run            single transient solve; writes per-step error trajectory
  converge       convergence study with dt = T0/n per level
  infsup         inf-sup and Korn constants per level
  locking        divfree convergence over the (c0, lambda) grid
  cn-experiment  backward Euler vs Crank-Nicolson initial-data experiment

common keys (flags --key value, or key=value lines in --config FILE):
  case (smooth|divfree), levels (comma list, doubling), n, steps, t0,
  mu, lambda, c0, boundary (default | gf=SIDES;gt=SIDES), scheme (be|cn),
  out (CSV path; JSON mirror written alongside), no-timestamp,
  incompatible (cn-experiment), dump-mesh PATH, dump-states DIR
";

/// Entry point shared by the binary and the integration tests.
pub fn main_with_args(args: &[String]) -> i32 {
    if args.is_empty() || args[0] == "--help" || args[0] == "help" {
        print!("{USAGE}");
        return if args.is_empty() { 2 } else { 0 };
    }
    let cfg = match parse_config(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("{}", e.machine_line());
            let _ = std::io::stderr().flush();
            return e.exit_code();
        }
    };
    match execute(&cfg) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.machine_line());
            let _ = std::io::stderr().flush();
            e.exit_code()
        }
    }
}
