//! CSV, summary and plot files for a finished run.
//!
//! Files written by [`emit_outputs`], depending on the requested outputs:
//!
//! | file | when |
//! |------|------|
//! | `trajectory.csv` | trajectory |
//! | `amplitudes.csv` | trajectory (long format, `source` = analytic / oracle) |
//! | `components.csv` | components |
//! | `adiabaticity.csv` | adiabaticity, trajectory or comparison |
//! | `summary.txt`, `effective_config.toml` | always |
//! | `plot_<column>.svg` | one per `--plot` column |
//!
//! `trajectory.csv` columns, in order: see [`TRAJECTORY_COLUMNS`].

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::{to_toml, Config};
use crate::error::{Error, Result};
use crate::plot::{line_plot, Series};
use crate::scenarios::{RunBundle, SweepSpec, SweepTable};

/// Shortest representation that parses back to the same `f64`.
///
/// Rust's `Display` and `LowerExp` both print the shortest round-trip digits;
/// exponent form is used for very small and very large magnitudes only.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub const TRAJECTORY_COLUMNS: [&str; 25] = [
    "t",
    "a1_re_analytic",
    "a1_im_analytic",
    "a2_re_analytic",
    "a2_im_analytic",
    "a1_re_oracle",
    "a1_im_oracle",
    "a2_re_oracle",
    "a2_im_oracle",
    "p1_analytic",
    "p2_analytic",
    "p1_oracle",
    "p2_oracle",
    "cos_abs",
    "sin_abs",
    "omega_g_re",
    "omega_g_im",
    "omega_e_re",
    "omega_e_im",
    "p_g",
    "p_e",
    "p_g_virtual",
    "adiabaticity",
    "residual",
    "neglected_term",
];

/// A numeric table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W, label: &str) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::io(label, e);
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format_float(*v)))
                .map_err(io)?;
        }
        w.flush().map_err(|e| Error::io(label, e))
    }
}

fn missing(what: &str) -> Error {
    Error::InvalidScenario(format!(
        "the trajectory table needs the {what}, which this run did not produce"
    ))
}

/// The per-point trajectory table with [`TRAJECTORY_COLUMNS`].
pub fn trajectory_table(bundle: &RunBundle) -> Result<Table> {
    let analytic = bundle
        .analytic
        .as_ref()
        .ok_or_else(|| missing("analytic solution"))?;
    let oracle = bundle
        .oracle
        .as_ref()
        .ok_or_else(|| missing("oracle trajectory"))?;
    let adiabaticity = bundle
        .adiabaticity
        .as_ref()
        .ok_or_else(|| missing("adiabaticity report"))?;
    let residual = bundle
        .residual
        .as_ref()
        .ok_or_else(|| missing("normal-form residual"))?;
    let neglected = bundle
        .neglected
        .as_ref()
        .ok_or_else(|| missing("neglected-term ratio"))?;
    let pops = bundle
        .populations
        .as_ref()
        .ok_or_else(|| missing("dressed populations"))?;

    let rows = bundle
        .grid
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let [a1, a2] = analytic.amplitudes[i];
            let [o1, o2] = oracle.amplitudes[i];
            let s = &analytic.snapshots[i];
            vec![
                t,
                a1.re,
                a1.im,
                a2.re,
                a2.im,
                o1.re,
                o1.im,
                o2.re,
                o2.im,
                a1.norm_sqr(),
                a2.norm_sqr(),
                o1.norm_sqr(),
                o2.norm_sqr(),
                s.mixing.cos_half.norm(),
                s.mixing.sin_half.norm(),
                s.frequencies.ground.re,
                s.frequencies.ground.im,
                s.frequencies.excited.re,
                s.frequencies.excited.im,
                pops.ground[i],
                pops.excited[i],
                pops.virtual_ground[i],
                adiabaticity.governing[i],
                residual[i],
                neglected[i],
            ]
        })
        .collect();
    Ok(Table {
        columns: TRAJECTORY_COLUMNS.iter().map(|c| c.to_string()).collect(),
        rows,
    })
}

const COMPONENT_NAMES: [&str; 4] = ["g_real", "g_virtual", "e_real", "e_virtual"];

/// Accumulated phases and weights of the four dressed-state components.
pub fn components_table(bundle: &RunBundle) -> Option<Table> {
    let comps = bundle.components.as_ref()?;
    let mut columns = vec![
        "t".to_string(),
        "optical_phase".into(),
        "carrier_phase".into(),
    ];
    for name in COMPONENT_NAMES {
        columns.extend([
            format!("{name}_phase_re"),
            format!("{name}_phase_im"),
            format!("{name}_weight"),
        ]);
    }
    let rows = comps
        .points
        .iter()
        .map(|p| {
            let mut row = vec![p.t, p.optical_phase, p.carrier_phase];
            for c in [
                &p.ground_real,
                &p.ground_virtual,
                &p.excited_real,
                &p.excited_virtual,
            ] {
                row.extend([c.phase.re, c.phase.im, c.weight]);
            }
            row
        })
        .collect();
    Some(Table { columns, rows })
}

/// Both trajectories in one long table: source, t, a1_re, a1_im, a2_re, a2_im.
pub fn write_amplitudes<W: Write>(bundle: &RunBundle, out: W, label: &str) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::io(label, e);
    w.write_record(["source", "t", "a1_re", "a1_im", "a2_re", "a2_im"])
        .map_err(io)?;
    let sources = [
        ("analytic", bundle.analytic.as_ref().map(|a| &a.amplitudes)),
        ("oracle", bundle.oracle.as_ref().map(|o| &o.amplitudes)),
    ];
    for (source, amps) in sources {
        let Some(amps) = amps else { continue };
        for (t, [a1, a2]) in bundle.grid.iter().zip(amps) {
            let mut row = vec![source.to_string(), format_float(*t)];
            row.extend([a1.re, a1.im, a2.re, a2.im].map(format_float));
            w.write_record(&row).map_err(io)?;
        }
    }
    w.flush().map_err(|e| Error::io(label, e))
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

/// Plain-text report of the run. Contains no timings, so it is reproducible.
pub fn summary(bundle: &RunBundle) -> String {
    let s = &bundle.scenario;
    let mut out = String::new();
    let _ = writeln!(out, "scenario: {}", s.name);
    if let Some(d) = &s.description {
        let _ = writeln!(out, "description: {d}");
    }
    let (a, b) = (bundle.grid[0], bundle.grid[bundle.grid.len() - 1]);
    let _ = writeln!(
        out,
        "grid: {} points on [{}, {}]",
        bundle.grid.len(),
        format_float(a),
        format_float(b)
    );
    let _ = writeln!(
        out,
        "detuning: {}  peak rabi: {}  gamma': {}  gamma'': {}",
        format_float(s.pulse.detuning),
        format_float(s.pulse.peak()),
        format_float(s.system.gamma_decay),
        format_float(s.system.gamma_shift)
    );

    if let Some(r) = &bundle.adiabaticity {
        let _ = writeln!(out, "\n[adiabaticity]");
        let _ = writeln!(out, "margin: {}", format_float(r.margin));
        let _ = writeln!(out, "strict margin: {}", format_float(r.strict_margin));
        for (n, k) in r.ratios.keys() {
            let _ = writeln!(
                out,
                "peak ratio n={n} k={k}: {}",
                format_float(r.peak(*n, *k).unwrap_or(0.0))
            );
        }
        let _ = writeln!(
            out,
            "peak standard condition: {}",
            format_float(max_of(&r.standard))
        );
        let _ = writeln!(
            out,
            "peak born-fock condition: {}",
            format_float(max_of(&r.born_fock))
        );
        if !r.underflow.is_empty() {
            let _ = writeln!(out, "envelope below floor at {} points", r.underflow.len());
        }
    }

    if let Some(an) = &bundle.analytic {
        let defect = an
            .snapshots
            .iter()
            .map(|s| s.mixing.identity_defect().norm())
            .fold(0.0, f64::max);
        let _ = writeln!(out, "\n[analytic]");
        let _ = writeln!(out, "constants: {} {}", an.constants[0], an.constants[1]);
        let _ = writeln!(out, "max |cos^2 + sin^2 - 1|: {}", format_float(defect));
        let _ = writeln!(out, "branch warnings: {}", an.warnings.len());
        for w in an.warnings.iter().take(5) {
            let _ = writeln!(out, "  t = {}: {:?}", format_float(w.t), w.issue);
        }
    }

    if let Some(o) = &bundle.oracle {
        let _ = writeln!(out, "\n[oracle]");
        let _ = writeln!(
            out,
            "method: {:?}  rel_tol: {}  abs_tol: {}",
            o.method,
            format_float(o.rel_tol),
            format_float(o.abs_tol)
        );
        let _ = writeln!(
            out,
            "steps accepted: {}  rejected: {}  rhs evaluations: {}",
            o.stats.accepted, o.stats.rejected, o.stats.evaluations
        );
        let _ = writeln!(
            out,
            "final norm: {}",
            format_float(o.norm[o.norm.len() - 1])
        );
    }

    if let Some(c) = &bundle.comparison {
        let _ = writeln!(out, "\n[comparison]");
        let _ = writeln!(out, "max |a1 error|: {}", format_float(c.max_error[0]));
        let _ = writeln!(out, "max |a2 error|: {}", format_float(c.max_error[1]));
        let _ = writeln!(out, "rms |a1 error|: {}", format_float(c.rms_error[0]));
        let _ = writeln!(out, "rms |a2 error|: {}", format_float(c.rms_error[1]));
        let _ = writeln!(
            out,
            "max population error: {}",
            format_float(c.max_population_error)
        );
        if let Some(p) = c.final_phase_error {
            let _ = writeln!(out, "final a1 phase error: {}", format_float(p));
        }
    }

    if let (Some(r), Some(n)) = (&bundle.residual, &bundle.neglected) {
        let _ = writeln!(out, "\n[normal form]");
        let _ = writeln!(out, "max relative residual: {}", format_float(max_of(r)));
        let _ = writeln!(out, "max neglected-term ratio: {}", format_float(max_of(n)));
    }

    if let Some(p) = &bundle.populations {
        let _ = writeln!(out, "\n[dressed populations] (from {})", p.source);
        let _ = writeln!(out, "max p_E: {}", format_float(p.max_excited));
        let _ = writeln!(out, "max p(G virtual): {}", format_float(p.max_virtual));
        let _ = writeln!(out, "ratio: {}", format_float(p.ratio));
        let threshold = s.numerics.virtual_ratio_threshold;
        let _ = writeln!(
            out,
            "real excited much weaker than virtual ground (ratio < {}): {}",
            format_float(threshold),
            if p.ratio < threshold { "yes" } else { "no" }
        );
    }
    out
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn csv_file(path: &Path, f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    write_file(path, &buf)
}

fn plot_file_name(column: &str) -> String {
    let clean: String = column
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("plot_{clean}.svg")
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes every file for `bundle` into `dir` and returns their paths.
///
/// `plot` names columns of the trajectory or adiabaticity table to draw
/// against t, one SVG each; an empty list writes no SVG files.
pub fn emit_outputs(bundle: &RunBundle, dir: &Path, plot: &[String]) -> Result<Vec<PathBuf>> {
    let trajectory = match bundle
        .scenario
        .outputs
        .contains(&crate::scenarios::Output::Trajectory)
    {
        true => Some(trajectory_table(bundle)?),
        false => None,
    };
    let adiabaticity = bundle.adiabaticity.as_ref().map(|r| {
        let mut buf = Vec::new();
        r.write_csv(&mut buf).map(|_| buf)
    });
    let adiabaticity = adiabaticity.transpose()?;

    let lookup = |name: &str| -> Option<Vec<f64>> {
        if let Some(v) = trajectory.as_ref().and_then(|t| t.column(name)) {
            return Some(v);
        }
        let r = bundle.adiabaticity.as_ref()?;
        match name {
            "governing" => Some(r.governing.clone()),
            "standard" => Some(r.standard.clone()),
            "born_fock" => Some(r.born_fock.clone()),
            _ => r
                .ratios
                .iter()
                .find(|((n, k), _)| name == format!("ratio_n{n}_k{k}"))
                .map(|(_, v)| v.clone()),
        }
    };
    let mut plots = Vec::new();
    for column in plot {
        let values = lookup(column).ok_or_else(|| {
            Error::Config(format!(
                "cannot plot `{column}`: no such column in this run's tables"
            ))
        })?;
        plots.push((column, values));
    }

    create_dir(dir)?;
    let mut written = Vec::new();
    let mut emit = |name: &str, bytes: &[u8]| -> Result<()> {
        let path = dir.join(name);
        write_file(&path, bytes)?;
        written.push(path);
        Ok(())
    };

    if let Some(t) = &trajectory {
        let mut buf = Vec::new();
        t.write_csv(&mut buf, "trajectory.csv")?;
        emit("trajectory.csv", &buf)?;
        let mut buf = Vec::new();
        write_amplitudes(bundle, &mut buf, "amplitudes.csv")?;
        emit("amplitudes.csv", &buf)?;
    }
    if let Some(c) = components_table(bundle) {
        let mut buf = Vec::new();
        c.write_csv(&mut buf, "components.csv")?;
        emit("components.csv", &buf)?;
    }
    if let Some(buf) = &adiabaticity {
        emit("adiabaticity.csv", buf)?;
    }
    emit("summary.txt", summary(bundle).as_bytes())?;
    let config = to_toml(&Config::Scenario(bundle.scenario.clone()))?;
    emit("effective_config.toml", config.as_bytes())?;

    for (column, values) in &plots {
        let svg = line_plot(
            &format!("{}: {}", bundle.scenario.name, column),
            "t",
            &bundle.grid,
            &[Series {
                label: column,
                values,
            }],
        );
        emit(&plot_file_name(column), svg.as_bytes())?;
    }
    Ok(written)
}

/// Axis value, one column per metric, and the error message of failed points.
pub fn write_sweep_csv<W: Write>(table: &SweepTable, out: W, label: &str) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::io(label, e);
    let mut header = vec![table.axis.clone()];
    header.extend(table.metrics.iter().map(|m| m.name().to_string()));
    header.push("error".into());
    w.write_record(&header).map_err(io)?;
    for p in &table.points {
        let mut row = vec![format_float(p.value)];
        row.extend(
            p.metrics
                .iter()
                .map(|m| m.map(format_float).unwrap_or_default()),
        );
        row.push(p.error.clone().unwrap_or_default());
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::io(label, e))
}

/// `sweep.csv`, `effective_config.toml` and one SVG per plotted metric.
pub fn emit_sweep(
    table: &SweepTable,
    spec: &SweepSpec,
    dir: &Path,
    plot: &[String],
) -> Result<Vec<PathBuf>> {
    let mut series = Vec::new();
    for column in plot {
        let j = table
            .metrics
            .iter()
            .position(|m| m.name() == column || m.name().replace('_', "-") == *column)
            .ok_or_else(|| {
                Error::Config(format!(
                    "cannot plot `{column}`: not one of the sweep metrics"
                ))
            })?;
        let values: Vec<f64> = table
            .points
            .iter()
            .map(|p| p.metrics[j].unwrap_or(f64::NAN))
            .collect();
        series.push((column, values));
    }

    create_dir(dir)?;
    let mut written = Vec::new();
    let path = dir.join("sweep.csv");
    csv_file(&path, |buf| write_sweep_csv(table, buf, "sweep.csv"))?;
    written.push(path);
    let path = dir.join("effective_config.toml");
    write_file(&path, to_toml(&Config::Sweep(spec.clone()))?.as_bytes())?;
    written.push(path);

    let x: Vec<f64> = table.points.iter().map(|p| p.value).collect();
    for (column, values) in &series {
        let svg = line_plot(
            &format!("{}: {} vs {}", spec.base.name, column, table.axis),
            &table.axis,
            &x,
            &[Series {
                label: column,
                values,
            }],
        );
        let path = dir.join(plot_file_name(column));
        write_file(&path, svg.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}
