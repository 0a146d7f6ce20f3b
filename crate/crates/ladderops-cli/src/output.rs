//! CSV and SVG emission. Files are written to a temporary sibling and
//! renamed into place so readers never observe a partial artifact.

use std::io::Write;
use std::path::Path;

use ladderops::models::{MEDIATOR, PREDATOR, PREY};
use ladderops::ModeIndex;

use crate::scenario::{deviation, Preset, Scenario, SolverRun};

pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp{}",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out"),
        std::process::id()
    ));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}

fn mode_label(mode: ModeIndex) -> &'static str {
    match mode {
        m if m == PREDATOR => "x1",
        m if m == MEDIATOR => "x2",
        m if m == PREY => "x3",
        _ => "x?",
    }
}

/// CSV with `# `-prefixed header comments (echoing the effective config
/// and the assembled Hamiltonian), one row per sample per solver, and
/// trailing comparison/diagnostic comments. Deterministic for a fixed
/// scenario.
pub fn render_csv(scenario: &Scenario, preset: &Preset, runs: &[SolverRun]) -> String {
    let mut out = String::new();
    out.push_str("# ladderops trajectory table\n");
    out.push_str("# frequencies are radians per unit time\n");
    out.push_str(&format!("# hamiltonian: {}\n", preset.hamiltonian()));
    out.push_str("# effective config:\n");
    for line in scenario.to_toml().lines() {
        out.push_str("#   ");
        out.push_str(line);
        out.push('\n');
    }
    if let Some(prop) = runs.iter().find_map(|r| r.propagation.as_ref()) {
        out.push_str(&format!(
            "# grid: {} cells, {} bytes per state, max norm drift {:.3e}, max boundary mass {:.3e}\n",
            prop.cell_count,
            prop.state_bytes,
            prop.max_norm_drift(),
            prop.max_boundary_mass(),
        ));
    }

    let modes: Vec<ModeIndex> = runs[0].columns.keys().copied().collect();
    out.push('t');
    for &m in &modes {
        out.push(',');
        out.push_str(mode_label(m));
    }
    out.push_str(",sum,solver\n");

    for run in runs {
        for (i, &t) in run.times.iter().enumerate() {
            out.push_str(&format!("{t:.12e}"));
            for &m in &modes {
                out.push_str(&format!(",{:.12e}", run.columns[&m][i]));
            }
            let sum = run.columns[&PREDATOR][i] + run.columns[&PREY][i];
            out.push_str(&format!(",{sum:.12e},{}\n", run.solver));
        }
    }

    for run in runs {
        out.push_str(&format!(
            "# {}: x1+x3 drift {:.3e}\n",
            run.solver,
            run.sum_drift()
        ));
        // population readings should stay nonnegative; dips are worth a
        // note but are a feature of the model, not an error
        for (&m, series) in &run.columns {
            let min = series.iter().copied().fold(f64::INFINITY, f64::min);
            if min < 0.0 {
                out.push_str(&format!(
                    "# note: {} ({}) dips below zero (min {:.6})\n",
                    mode_label(m),
                    run.solver,
                    min
                ));
            }
        }
    }
    if runs.len() == 2 {
        let (abs, rel) = deviation(&runs[0], &runs[1]);
        out.push_str(&format!(
            "# compare {} vs {}: max abs deviation {:.6e}, max rel deviation {:.6e}\n",
            runs[0].solver, runs[1].solver, abs, rel
        ));
    }
    out
}

const SVG_W: f64 = 800.0;
const SVG_H: f64 = 500.0;
const MARGIN: f64 = 60.0;
const COLORS: &[&str] = &["#1f77b4", "#2ca02c", "#d62728", "#9467bd"];

/// Dependency-light line plot: axes, ticks, one polyline per series.
pub fn render_svg(title: &str, runs: &[SolverRun]) -> String {
    let run = &runs[0];
    let modes: Vec<ModeIndex> = run.columns.keys().copied().collect();
    let t_max = *run.times.last().unwrap_or(&1.0);
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for r in runs {
        for series in r.columns.values() {
            for &v in series {
                y_min = y_min.min(v);
                y_max = y_max.max(v);
            }
        }
    }
    if y_max <= y_min || y_max.is_nan() {
        y_max = y_min + 1.0;
    }
    let pad = 0.05 * (y_max - y_min);
    let (y_min, y_max) = (y_min - pad, y_max + pad);

    let x_of = |t: f64| MARGIN + (SVG_W - 2.0 * MARGIN) * t / t_max;
    let y_of = |v: f64| SVG_H - MARGIN - (SVG_H - 2.0 * MARGIN) * (v - y_min) / (y_max - y_min);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" \
         viewBox=\"0 0 {SVG_W} {SVG_H}\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{SVG_W}\" height=\"{SVG_H}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" \
         text-anchor=\"middle\">{title}</text>\n",
        SVG_W / 2.0
    ));
    // axes
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        b = SVG_H - MARGIN,
        r = SVG_W - MARGIN,
        t = MARGIN
    ));
    for i in 0..=5 {
        let frac = i as f64 / 5.0;
        let t = t_max * frac;
        let v = y_min + (y_max - y_min) * frac;
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{t:.2}</text>\n",
            x_of(t),
            SVG_H - MARGIN + 18.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">{v:.2}</text>\n",
            MARGIN - 6.0,
            y_of(v) + 4.0
        ));
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{}\" x2=\"{:.1}\" y2=\"{}\" stroke=\"#cccccc\"/>\n",
            x_of(t),
            MARGIN,
            x_of(t),
            SVG_H - MARGIN
        ));
    }

    let mut color = 0usize;
    for r in runs {
        let dash = if r.solver == "grid" { " stroke-dasharray=\"6 3\"" } else { "" };
        for &m in &modes {
            let series = &r.columns[&m];
            let mut points = String::new();
            for (i, &t) in r.times.iter().enumerate() {
                points.push_str(&format!("{:.2},{:.2} ", x_of(t), y_of(series[i])));
            }
            svg.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.6\"{dash} points=\"{}\"/>\n",
                COLORS[color % COLORS.len()],
                points.trim_end()
            ));
            let label_y = MARGIN + 16.0 * (color as f64 + 1.0);
            svg.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{label_y:.1}\" font-family=\"sans-serif\" font-size=\"12\" \
                 fill=\"{}\">{} ({})</text>\n",
                SVG_W - MARGIN + 6.0,
                COLORS[color % COLORS.len()],
                mode_label(m),
                r.solver
            ));
            color += 1;
        }
    }
    svg.push_str("</svg>\n");
    svg
}
