//! End-to-end behavior of the binary: reproducibility, flag/config
//! equivalence, alias presets, the binary dump, and error exits.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ladderops"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ladderops-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

const FREE_GRID: &str = r#"
solver = "grid"

[model]
preset = "free"
omega1 = 2.0
omega3 = 1.0

[initial]
k1 = 1.0
k3 = 2.0

[time]
t_max = 0.5
samples = 6

[grid]
dt = 0.005
"#;

fn data_rows(csv: &str) -> Vec<String> {
    csv.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(str::to_string)
        .collect()
}

#[test]
fn identical_config_gives_byte_identical_csv() {
    let dir = tmp_dir("repro");
    let cfg = write_config(&dir, "free.toml", FREE_GRID);
    let out_a = dir.join("a.csv");
    let out_b = dir.join("b.csv");
    run_ok(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_a.to_str().unwrap(),
    ]);
    run_ok(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_b.to_str().unwrap(),
    ]);
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    // the --out override lands in the echoed config, so compare modulo it
    let strip = |bytes: &[u8]| -> Vec<u8> {
        String::from_utf8(bytes.to_vec())
            .unwrap()
            .lines()
            .filter(|l| !l.contains("csv = "))
            .collect::<Vec<_>>()
            .join("\n")
            .into_bytes()
    };
    assert_eq!(strip(&a), strip(&b), "same config must give the same bytes");
}

#[test]
fn solver_flag_equals_config_field() {
    let dir = tmp_dir("flag-eq");
    let exact_cfg = write_config(&dir, "exact.toml", &FREE_GRID.replace("grid\"", "exact\""));
    let grid_cfg = write_config(&dir, "grid.toml", FREE_GRID);
    let from_flag = dir.join("flag.csv");
    let from_file = dir.join("file.csv");
    run_ok(&[
        "run",
        "--config",
        exact_cfg.to_str().unwrap(),
        "--solver",
        "grid",
        "--out",
        from_flag.to_str().unwrap(),
    ]);
    run_ok(&[
        "run",
        "--config",
        grid_cfg.to_str().unwrap(),
        "--out",
        from_file.to_str().unwrap(),
    ]);
    let a = std::fs::read_to_string(&from_flag).unwrap();
    let b = std::fs::read_to_string(&from_file).unwrap();
    assert_eq!(data_rows(&a), data_rows(&b));
    // and the effective solver is echoed in both headers
    assert!(a.contains("solver = \"grid\""));
    assert!(b.contains("solver = \"grid\""));
}

#[test]
fn alias_preset_shares_the_dynamics() {
    let dir = tmp_dir("alias");
    let canonical = write_config(
        &dir,
        "quad.toml",
        r#"
solver = "exact"

[model]
preset = "quadratic-pp"
omega1 = 3.0
omega3 = 1.0
lambda = 3.0

[initial]
k1 = 4.0
k3 = 4.0

[time]
t_max = 3.0
samples = 10
"#,
    );
    let alias_body = std::fs::read_to_string(&canonical)
        .unwrap()
        .replace("quadratic-pp", "love-affair");
    let alias = write_config(&dir, "love.toml", &alias_body);
    let out_a = dir.join("canonical.csv");
    let out_b = dir.join("alias.csv");
    run_ok(&["run", "--config", canonical.to_str().unwrap(), "--out", out_a.to_str().unwrap()]);
    run_ok(&["run", "--config", alias.to_str().unwrap(), "--out", out_b.to_str().unwrap()]);
    let csv_a = std::fs::read_to_string(out_a).unwrap();
    assert_eq!(data_rows(&csv_a), data_rows(&std::fs::read_to_string(out_b).unwrap()));

    // the echoed Hamiltonian is in the round-trip expression syntax
    let ham_line = csv_a
        .lines()
        .find(|l| l.starts_with("# hamiltonian: "))
        .expect("hamiltonian echoed");
    let expr: ladderops::OperatorExpr =
        ham_line.trim_start_matches("# hamiltonian: ").parse().unwrap();
    assert!(expr.is_hermitian());
    assert_eq!(expr.terms().len(), 4);
}

#[test]
fn binary_dump_round_trips_grid_means() {
    let dir = tmp_dir("dump");
    let dump_path = dir.join("traj.bin");
    let body = format!(
        "{FREE_GRID}\n[output]\nbinary_dump = \"{}\"\n",
        dump_path.display()
    );
    let cfg = write_config(&dir, "dump.toml", &body);
    let out_csv = dir.join("dump.csv");
    run_ok(&["run", "--config", cfg.to_str().unwrap(), "--out", out_csv.to_str().unwrap()]);
    let dump = ladderops::read_trajectory(&dump_path).unwrap();
    assert_eq!(dump.times.len(), 6);
    let csv = std::fs::read_to_string(&out_csv).unwrap();
    let rows = data_rows(&csv);
    // header row then six samples; x1 column must match the dump exactly
    for (i, row) in rows[1..].iter().enumerate() {
        let fields: Vec<&str> = row.split(',').collect();
        let x1: f64 = fields[1].parse().unwrap();
        let dumped = dump.means[&ladderops::models::PREDATOR][i];
        assert!((x1 - dumped).abs() < 1e-12);
    }
}

#[test]
fn svg_flag_writes_a_plot() {
    let dir = tmp_dir("svg");
    let cfg = write_config(&dir, "free.toml", FREE_GRID);
    let out_csv = dir.join("plot.csv");
    run_ok(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_csv.to_str().unwrap(),
        "--svg",
    ]);
    let svg = std::fs::read_to_string(dir.join("plot.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("<polyline"));
}

#[test]
fn unknown_config_field_names_the_field() {
    let dir = tmp_dir("badfield");
    let cfg = write_config(&dir, "bad.toml", &FREE_GRID.replace("omega1", "omega9"));
    let out = bin()
        .args(["run", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("omega9"), "stderr was: {stderr}");
}

#[test]
fn exact_solver_rejected_for_gated_preset() {
    let out = bin()
        .args(["run", "gated", "--solver", "exact"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("solver") && stderr.contains("gated"), "stderr: {stderr}");
    // and perturbative is rejected everywhere else
    let out = bin()
        .args(["run", "quadratic", "--solver", "perturbative"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn truncation_breach_is_a_diagnostic_failure() {
    let dir = tmp_dir("breach");
    let cfg = write_config(
        &dir,
        "breach.toml",
        r#"
solver = "grid"

[model]
preset = "quadratic-pp"
omega1 = 3.0
omega3 = 1.0
lambda = 3.0

[initial]
k1 = 6.0
k3 = 6.0

[time]
t_max = 2.0
samples = 5

[grid]
dt = 0.002
"#,
    );
    let out = bin()
        .args(["run", "--config", cfg.to_str().unwrap(), "--out"])
        .arg(dir.join("never.csv"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("truncation breach"), "stderr: {stderr}");
    assert!(!dir.join("never.csv").exists(), "no partial artifact on failure");
}

#[test]
fn lambda2_flag_only_for_three_agent_presets() {
    let out = bin()
        .args(["run", "quadratic", "--lambda2", "2.0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda2"));

    let dir = tmp_dir("lambda2");
    let out_csv = dir.join("cubic.csv");
    run_ok(&[
        "run",
        "cubic",
        "--lambda2",
        "0.5",
        "--out",
        out_csv.to_str().unwrap(),
    ]);
    let csv = std::fs::read_to_string(&out_csv).unwrap();
    assert!(csv.contains("lambda2 = 0.5"));
}

#[test]
fn solver_all_reports_a_comparison_row() {
    let dir = tmp_dir("all");
    let cfg = write_config(
        &dir,
        "quad.toml",
        r#"
solver = "all"

[model]
preset = "quadratic-pp"
omega1 = 3.0
omega3 = 1.0
lambda = 1.0

[initial]
k1 = 2.0
k3 = 2.0

[time]
t_max = 1.5
samples = 7

[grid]
cells_per_unit = 4
"#,
    );
    let out_csv = dir.join("all.csv");
    run_ok(&["run", "--config", cfg.to_str().unwrap(), "--out", out_csv.to_str().unwrap()]);
    let csv = std::fs::read_to_string(&out_csv).unwrap();
    let rows = data_rows(&csv);
    // header + 7 exact rows + 7 grid rows
    assert_eq!(rows.len(), 15);
    assert!(rows[1].ends_with(",exact") && rows[14].ends_with(",grid"));
    let compare_line = csv
        .lines()
        .find(|l| l.starts_with("# compare exact vs grid"))
        .expect("trailing comparison comment");
    let abs: f64 = compare_line
        .split("max abs deviation ")
        .nth(1)
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!(abs < 1e-3, "solvers disagree by {abs}");
}

#[test]
fn compare_reports_deviation_for_the_free_model() {
    let out = run_ok(&["compare", "free"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    let rel_line = stdout
        .lines()
        .find(|l| l.starts_with("max rel deviation:"))
        .expect("report has a relative deviation line");
    let rel: f64 = rel_line.split(':').nth(1).unwrap().trim().parse().unwrap();
    assert!(rel <= 1e-6, "free-model deviation {rel}");
    assert!(stdout.contains("conservation drift"));
}
