use std::path::{Path, PathBuf};
use std::sync::Arc;

use capflow::{
    ball_curvatures, cap_matching_volume, run, Config, Graph, Grid, Output, Record, Termination,
};
use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::config::Regime;
use crate::error::{CliError, CliResult};
use crate::plots::{line_plot, Curve};

pub const SERIES_FILE: &str = "series.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, Default)]
pub struct EmitOptions {
    pub plots: bool,
    pub snapshots: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: Config,
    pub version: String,
    pub started: String,
    pub finished: String,
    pub regime: Regime,
    pub termination: Termination,
    pub final_record: Record,
    pub samples: usize,
    pub files: Vec<PathBuf>,
}

impl RunManifest {
    pub fn aborted(&self) -> bool {
        matches!(self.termination, Termination::Aborted(_))
    }
}

#[derive(Serialize)]
struct ProfileRow {
    beta: f64,
    u: f64,
    rho: f64,
    kappa_beta: f64,
    kappa_tan: f64,
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// `count` sample indices spread evenly over `0..len`, always including the last.
pub fn snapshot_indices(count: usize, len: usize) -> Vec<usize> {
    if count == 0 || len == 0 {
        return Vec::new();
    }
    if count == 1 {
        return vec![len - 1];
    }
    let mut idx: Vec<usize> = (0..count)
        .map(|k| ((k * (len - 1)) as f64 / (count - 1) as f64).round() as usize)
        .collect();
    idx.dedup();
    idx
}

fn write_csv<S: Serialize>(path: &Path, rows: impl IntoIterator<Item = S>) -> CliResult<()> {
    let csv_err = |source| CliError::Csv { path: path.to_path_buf(), source };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::write(path, e))
}

fn snapshot_graph(config: &Config, grid: &Arc<Grid>, profile: &[f64]) -> CliResult<Graph> {
    let mut g = Graph::new(grid.clone(), profile.to_vec(), config.theta)?
        .with_boundary_sign(config.boundary_sign);
    g.impose_ghosts();
    Ok(g)
}

fn write_snapshot(path: &Path, graph: &Graph) -> CliResult<()> {
    let k = ball_curvatures(graph)?;
    let rows = graph.grid().nodes().iter().zip(graph.u()).enumerate().map(|(j, (b, u))| {
        ProfileRow { beta: *b, u: *u, rho: u.exp(), kappa_beta: k.kappa_beta[j], kappa_tan: k.kappa_tan[j] }
    });
    write_csv(path, rows)
}

fn emit_plots(
    config: &Config,
    output: &Output,
    grid: &Grid,
    shown: &[usize],
    out: &Path,
    files: &mut Vec<PathBuf>,
) -> CliResult<()> {
    let nodes = grid.nodes();
    let curves: Vec<Curve> = shown
        .iter()
        .map(|&i| {
            let s = &output.samples[i];
            Curve {
                label: format!("t = {:.4}", s.record.t),
                points: nodes.iter().zip(&s.profile).map(|(b, u)| (*b, u.exp())).collect(),
            }
        })
        .collect();
    let volume = output.samples[0].record.volume;
    // the overlay is omitted when no cap of this angle encloses the initial volume
    let cap = cap_matching_volume(volume, config.theta, config.n).ok().map(|cap| Curve {
        label: format!("volume-matched cap, R = {:.5}", cap.radius()),
        points: nodes.iter().map(|b| (*b, cap.profile(*b))).collect(),
    });
    let path = out.join("profiles.svg");
    line_plot(&path, "rho(beta)", ("beta", "rho"), &curves, cap.as_ref())?;
    files.push(path);

    let series = |label: &str, f: fn(&Record) -> f64| Curve {
        label: label.to_string(),
        points: output.records().map(|r| (r.t, f(r))).collect(),
    };
    let path = out.join("energy.svg");
    line_plot(&path, "energy", ("t", "E"), &[series("E(t)", |r| r.energy)], None)?;
    files.push(path);
    let path = out.join("volume.svg");
    line_plot(&path, "enclosed volume", ("t", "Vol"), &[series("Vol(t)", |r| r.volume)], None)?;
    files.push(path);
    Ok(())
}

/// Runs the flow and writes the series, optional snapshots and plots, and the manifest into `out`.
pub fn run_and_emit(config: &Config, out: &Path, opts: EmitOptions) -> CliResult<RunManifest> {
    config.validate()?;
    let started = now();
    let output = run(config)?;
    std::fs::create_dir_all(out).map_err(|e| CliError::write(out, e))?;
    let mut files = Vec::new();

    let series = out.join(SERIES_FILE);
    write_csv(&series, output.records())?;
    files.push(series);

    let grid = Arc::new(config.grid()?);
    let picked = snapshot_indices(opts.snapshots, output.samples.len());
    for (k, &i) in picked.iter().enumerate() {
        let graph = snapshot_graph(config, &grid, &output.samples[i].profile)?;
        let path = out.join(format!("snapshot_{k:03}.csv"));
        write_snapshot(&path, &graph)?;
        files.push(path);
    }

    if opts.plots {
        let shown = if picked.is_empty() {
            snapshot_indices(2, output.samples.len())
        } else {
            picked.clone()
        };
        emit_plots(config, &output, &grid, &shown, out, &mut files)?;
    }

    let manifest_path = out.join(MANIFEST_FILE);
    files.push(manifest_path.clone());
    let manifest = RunManifest {
        config: config.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        started,
        finished: now(),
        regime: Regime::of(config),
        termination: output.termination.clone(),
        final_record: output.final_record().clone(),
        samples: output.samples.len(),
        files,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&manifest_path, text + "\n").map_err(|e| CliError::write(&manifest_path, e))?;
    Ok(manifest)
}
