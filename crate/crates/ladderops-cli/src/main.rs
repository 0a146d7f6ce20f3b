//! Scenario runner and figure reproducer for the ladder-operator dynamics
//! library.

mod output;
mod scenario;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ladderops::models::{PREDATOR, PREY};
use ladderops::FermiPP;

use output::{render_csv, render_svg, write_atomic};
use scenario::{deviation, run_all, Scenario, ScenarioError, Solver, PRESET_TABLE};

#[derive(Parser)]
#[command(
    name = "ladderops",
    version,
    about = "Exact, perturbative, and grid solvers for translation-ladder population models"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write a CSV trajectory table (optionally SVG).
    Run(RunArgs),
    /// Run the reference solver against the grid oracle and report deviations.
    Compare(CompareArgs),
    /// Emit the three stock panels (quadratic, two cubic variants) as CSV/SVG pairs.
    Figure1(Figure1Args),
    /// Fermionic two-mode baseline: closed form vs 4x4 matrix evolution.
    FermiBaseline(FermiArgs),
    /// List model presets and their aliases.
    ListModels,
}

#[derive(Args)]
struct RunArgs {
    /// Built-in scenario name (quadratic, cubic, gated, free, figure1-*).
    scenario: Option<String>,
    /// TOML scenario file; mutually exclusive with a named scenario.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the solver: exact | perturbative | grid | all.
    #[arg(long)]
    solver: Option<String>,
    /// Output CSV path (default derived from the scenario name).
    #[arg(long)]
    out: Option<String>,
    /// Also write an SVG plot next to the CSV.
    #[arg(long)]
    svg: bool,
    /// Second cubic coupling for three-agent presets (default 1).
    #[arg(long)]
    lambda2: Option<f64>,
}

#[derive(Args)]
struct CompareArgs {
    scenario: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    lambda2: Option<f64>,
}

#[derive(Args)]
struct Figure1Args {
    /// Directory for the three CSV/SVG pairs (default: output dir or `.`).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Second cubic coupling for the bottom panels (default 1).
    #[arg(long)]
    lambda2: Option<f64>,
}

#[derive(Args)]
struct FermiArgs {
    #[arg(long, default_value_t = 1.0)]
    omega1: f64,
    #[arg(long, default_value_t = 1.0)]
    omega3: f64,
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value_t = 1)]
    n1: u8,
    #[arg(long, default_value_t = 0)]
    n3: u8,
    #[arg(long, default_value_t = 20.0)]
    t_max: f64,
    #[arg(long, default_value_t = 400)]
    samples: usize,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    svg: bool,
}

/// Relative output paths land in `LADDEROPS_OUT_DIR` when it is set.
fn resolve_out(path: &str) -> PathBuf {
    let p = PathBuf::from(path);
    if p.is_relative() {
        if let Ok(dir) = std::env::var("LADDEROPS_OUT_DIR") {
            if !dir.is_empty() {
                return PathBuf::from(dir).join(p);
            }
        }
    }
    p
}

fn write_out(path: &Path, bytes: &[u8]) -> Result<(), String> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| format!("creating {}: {e}", parent.display()))?;
        }
    }
    write_atomic(path, bytes).map_err(|e| format!("writing {}: {e}", path.display()))
}

fn load_scenario(
    name: &Option<String>,
    config: &Option<PathBuf>,
    lambda2: Option<f64>,
) -> Result<(Scenario, String), ScenarioError> {
    match (name, config) {
        (Some(_), Some(_)) => Err(ScenarioError(
            "pass either a scenario name or --config, not both".into(),
        )),
        (_, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ScenarioError(format!("reading {}: {e}", path.display())))?;
            let mut s = Scenario::from_toml(&text)?;
            if let Some(l2) = lambda2 {
                if s.model.lambda2.is_none() {
                    return Err(ScenarioError(
                        "model.lambda2: --lambda2 only applies to three-agent presets".into(),
                    ));
                }
                s.model.lambda2 = Some(l2);
            }
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("run")
                .to_string();
            Ok((s, stem))
        }
        (name, None) => {
            let name = name.clone().unwrap_or_else(|| "quadratic".into());
            let mut s = Scenario::builtin(&name, lambda2)?;
            if lambda2.is_some() && s.model.lambda2.is_none() {
                return Err(ScenarioError(
                    "model.lambda2: --lambda2 only applies to three-agent presets".into(),
                ));
            }
            if let Some(l2) = lambda2 {
                if s.model.lambda2.is_some() {
                    s.model.lambda2 = Some(l2);
                }
            }
            Ok((s, name))
        }
    }
}

fn cmd_run(args: &RunArgs) -> Result<(), (u8, String)> {
    let conf_err = |e: ScenarioError| (2u8, e.0);
    let (mut scenario, stem) =
        load_scenario(&args.scenario, &args.config, args.lambda2).map_err(conf_err)?;
    if let Some(sol) = &args.solver {
        scenario.solver = sol.parse().map_err(conf_err)?;
    }
    if let Some(out) = &args.out {
        scenario.output.csv = Some(out.clone());
    }
    if args.svg && scenario.output.svg.is_none() {
        let csv = scenario.output.csv.clone().unwrap_or(format!("{stem}.csv"));
        scenario.output.svg = Some(csv.replace(".csv", "").to_string() + ".svg");
    }
    let preset = scenario.resolve_preset().map_err(conf_err)?;
    scenario.validate_solver(&preset).map_err(conf_err)?;
    scenario.state(&preset).map_err(conf_err)?;
    scenario.times().map_err(conf_err)?;
    scenario.grid_config(&preset).map_err(conf_err)?;

    let runs = run_all(&scenario, &preset).map_err(|e| (1u8, e.0))?;

    let csv_path = resolve_out(scenario.output.csv.as_deref().unwrap_or(&format!("{stem}.csv")));
    let csv = render_csv(&scenario, &preset, &runs);
    write_out(&csv_path, csv.as_bytes()).map_err(|e| (1u8, e))?;
    println!("wrote {}", csv_path.display());

    if let Some(svg_name) = &scenario.output.svg {
        let svg_path = resolve_out(svg_name);
        let svg = render_svg(&stem, &runs);
        write_out(&svg_path, svg.as_bytes()).map_err(|e| (1u8, e))?;
        println!("wrote {}", svg_path.display());
    }
    if let Some(dump_name) = &scenario.output.binary_dump {
        let prop = runs
            .iter()
            .find_map(|r| r.propagation.as_ref())
            .ok_or((2u8, "output.binary_dump requires a grid run".to_string()))?;
        let dump_path = resolve_out(dump_name);
        ladderops::write_trajectory(&dump_path, prop).map_err(|e| (1u8, e.to_string()))?;
        println!("wrote {}", dump_path.display());
    }

    for run in &runs {
        println!("{}: x1+x3 drift {:.3e}", run.solver, run.sum_drift());
        if let Some(prop) = &run.propagation {
            println!(
                "grid: {} cells, {} bytes per state, norm drift {:.3e}, boundary mass {:.3e}",
                prop.cell_count,
                prop.state_bytes,
                prop.max_norm_drift(),
                prop.max_boundary_mass()
            );
        }
    }
    if runs.len() == 2 {
        let (abs, rel) = deviation(&runs[0], &runs[1]);
        println!(
            "{} vs {}: max abs deviation {abs:.6e}, max rel deviation {rel:.6e}",
            runs[0].solver, runs[1].solver
        );
    }
    Ok(())
}

fn cmd_compare(args: &CompareArgs) -> Result<(), (u8, String)> {
    let conf_err = |e: ScenarioError| (2u8, e.0);
    let (mut scenario, name) =
        load_scenario(&args.scenario, &args.config, args.lambda2).map_err(conf_err)?;
    scenario.solver = Solver::All;
    let preset = scenario.resolve_preset().map_err(conf_err)?;
    let runs = run_all(&scenario, &preset).map_err(|e| (1u8, e.0))?;
    let (abs, rel) = deviation(&runs[0], &runs[1]);
    println!("scenario: {name} ({})", scenario.model.preset);
    println!(
        "samples: {} over [0, {}]",
        scenario.time.samples, scenario.time.t_max
    );
    println!("reference solver: {}", runs[0].solver);
    println!("max abs deviation: {abs:.6e}");
    println!("max rel deviation: {rel:.6e}");
    println!(
        "conservation drift: {} {:.3e}, grid {:.3e}",
        runs[0].solver,
        runs[0].sum_drift(),
        runs[1].sum_drift()
    );
    if let Some(prop) = &runs[1].propagation {
        println!(
            "grid: {} cells, {} bytes per state, norm drift {:.3e}, boundary mass {:.3e}",
            prop.cell_count,
            prop.state_bytes,
            prop.max_norm_drift(),
            prop.max_boundary_mass()
        );
    }
    Ok(())
}

fn cmd_figure1(args: &Figure1Args) -> Result<(), (u8, String)> {
    let dir = args
        .out_dir
        .clone()
        .unwrap_or_else(|| resolve_out("."));
    for name in ["figure1-top", "figure1-bottom-left", "figure1-bottom-right"] {
        let scenario = Scenario::builtin(name, args.lambda2).map_err(|e| (2u8, e.0))?;
        let preset = scenario.resolve_preset().map_err(|e| (2u8, e.0))?;
        let runs = run_all(&scenario, &preset).map_err(|e| (1u8, e.0))?;
        let csv_path = dir.join(format!("{name}.csv"));
        write_out(&csv_path, render_csv(&scenario, &preset, &runs).as_bytes())
            .map_err(|e| (1u8, e))?;
        let svg_path = dir.join(format!("{name}.svg"));
        write_out(&svg_path, render_svg(name, &runs).as_bytes()).map_err(|e| (1u8, e))?;
        println!("wrote {} and {}", csv_path.display(), svg_path.display());
    }
    Ok(())
}

fn cmd_fermi(args: &FermiArgs) -> Result<(), (u8, String)> {
    let model = FermiPP::new(args.omega1, args.omega3, args.lambda, args.n1, args.n3)
        .map_err(|e| (2u8, format!("fermi parameters: {e}")))?;
    if args.t_max.is_nan() || args.t_max <= 0.0 || args.samples < 2 {
        return Err((2u8, "t_max must be positive and samples at least 2".into()));
    }
    let times: Vec<f64> = (0..args.samples)
        .map(|i| args.t_max * i as f64 / (args.samples - 1) as f64)
        .collect();

    let mut csv = String::new();
    csv.push_str("# ladderops fermionic baseline\n");
    csv.push_str(&format!(
        "# omega1={} omega3={} lambda={} n1={} n3={} delta={:.12e}\n",
        args.omega1,
        args.omega3,
        args.lambda,
        args.n1,
        args.n3,
        model.delta()
    ));
    csv.push_str("t,n1,n3,sum,solver\n");
    let mut max_dev = 0.0f64;
    for &t in &times {
        let (c1, c3) = model.density(t);
        csv.push_str(&format!("{t:.12e},{c1:.12e},{c3:.12e},{:.12e},closed\n", c1 + c3));
    }
    for &t in &times {
        let (m1, m3) = model.density_via_matrices(t);
        let (c1, c3) = model.density(t);
        max_dev = max_dev.max((c1 - m1).abs()).max((c3 - m3).abs());
        csv.push_str(&format!("{t:.12e},{m1:.12e},{m3:.12e},{:.12e},matrix\n", m1 + m3));
    }
    csv.push_str(&format!("# closed vs matrix: max abs deviation {max_dev:.6e}\n"));

    let out = resolve_out(args.out.as_deref().unwrap_or("fermi-baseline.csv"));
    write_out(&out, csv.as_bytes()).map_err(|e| (1u8, e))?;
    println!("wrote {}", out.display());
    println!("closed vs matrix: max abs deviation {max_dev:.6e}");
    if args.svg {
        // reuse the trajectory plot machinery by relabeling densities
        let run = scenario::SolverRun {
            solver: "closed",
            times: times.clone(),
            columns: [
                (PREDATOR, times.iter().map(|&t| model.density(t).0).collect()),
                (PREY, times.iter().map(|&t| model.density(t).1).collect()),
            ]
            .into_iter()
            .collect(),
            propagation: None,
        };
        let svg_path = out.with_extension("svg");
        write_out(&svg_path, render_svg("fermi-baseline", &[run]).as_bytes())
            .map_err(|e| (1u8, e))?;
        println!("wrote {}", svg_path.display());
    }
    Ok(())
}

fn cmd_list_models() {
    println!("available presets (aliases share the same dynamics):");
    for (canon, alias, blurb) in PRESET_TABLE {
        if alias.is_empty() {
            println!("  {canon:<14} {blurb}");
        } else {
            println!("  {canon:<14} {blurb} (alias: {alias})");
        }
    }
    println!("\nscenario names for `run`/`compare`: quadratic, cubic, gated, free,");
    println!("figure1-top, figure1-bottom-left, figure1-bottom-right");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Figure1(args) => cmd_figure1(args),
        Command::FermiBaseline(args) => cmd_fermi(args),
        Command::ListModels => {
            cmd_list_models();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
