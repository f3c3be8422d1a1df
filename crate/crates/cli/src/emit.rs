//! CSV, SVG and metadata writers.
//!
//! Every file is rendered in memory first, so a failed run leaves no
//! partial output behind.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::run::{CapacityRow, DofRow, Table};
use crate::spec::{spec_err, SweepKind, SweepSpec};
use crate::svg::{render, Plot, Series};
use crate::{CliError, VERSION};

/// CSV text with a header line and one line per row.
pub fn csv_bytes<R: Serialize>(rows: &[R]) -> Result<Vec<u8>, CliError> {
    if rows.is_empty() {
        return Err(spec_err("no rows to emit"));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner()
        .map_err(|e| CliError::Numerical(format!("csv buffer: {e}")))
}

pub fn emit_csv<R: Serialize>(rows: &[R], path: &Path) -> Result<(), CliError> {
    let bytes = csv_bytes(rows)?;
    write(path, &bytes)
}

pub fn read_csv<R: DeserializeOwned>(path: &Path) -> Result<Vec<R>, CliError> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(CliError::from)).collect()
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn freq_label(f: f64) -> String {
    if f >= 1e9 {
        format!("{} GHz", f / 1e9)
    } else {
        format!("{} MHz", f / 1e6)
    }
}

fn by_frequency<R>(rows: &[R], f: impl Fn(&R) -> f64, xy: impl Fn(&R) -> (f64, f64)) -> Vec<Series> {
    let mut series: Vec<(f64, Series)> = Vec::new();
    for r in rows {
        let key = f(r);
        match series.iter_mut().find(|(k, _)| *k == key) {
            Some((_, s)) => s.points.push(xy(r)),
            None => series.push((
                key,
                Series {
                    label: freq_label(key),
                    points: vec![xy(r)],
                },
            )),
        }
    }
    series.into_iter().map(|(_, s)| s).collect()
}

/// Line plot of a sweep, one series per frequency.
pub fn plot_for(kind: SweepKind, table: &Table) -> Option<Plot> {
    match (kind, table) {
        (SweepKind::DofVsDistance, Table::Dof(rows)) => Some(Plot {
            title: "Evanescent DoF gain against distance".into(),
            x_label: "distance z (m)".into(),
            y_label: "DoF improvement (%)".into(),
            log_x: true,
            series: by_frequency(rows, |r: &DofRow| r.f_hz, |r| (r.z_m, r.gain_pct)),
        }),
        (SweepKind::DofVsPowerRatio, Table::Dof(rows)) => Some(Plot {
            title: "Evanescent DoF gain against power ratio".into(),
            x_label: "P_send / P_noise (dB)".into(),
            y_label: "DoF improvement (%)".into(),
            log_x: false,
            series: by_frequency(rows, |r: &DofRow| r.f_hz, |r| (r.ratio_db, r.gain_pct)),
        }),
        (SweepKind::CapacityVsDistance, Table::Capacity(rows)) => Some(Plot {
            title: "Capacity improvement against distance".into(),
            x_label: "distance z (m)".into(),
            y_label: "capacity improvement (%)".into(),
            log_x: true,
            series: by_frequency(
                rows,
                |r: &CapacityRow| r.f_hz,
                |r| (r.z_m, r.improvement_pct),
            ),
        }),
        _ => None,
    }
}

#[derive(Serialize)]
struct Metadata<'a> {
    tool: &'static str,
    version: &'static str,
    rows: usize,
    conventions: BTreeMap<&'static str, String>,
    spec: &'a SweepSpec,
}

/// Sidecar TOML: the resolved spec plus the modelling conventions in force.
pub fn metadata(spec: &SweepSpec, rows: usize) -> String {
    let mut c = BTreeMap::new();
    c.insert(
        "speed_of_light",
        if spec.radiation.exact_speed_of_light {
            "299792458 m/s".into()
        } else {
            "3e8 m/s".into()
        },
    );
    c.insert("dof_far", "planar: pi*Lx*Ly/lambda^2".into());
    c.insert(
        "sigma",
        "amplitude: H_a = Sigma (.) W, entry power Sigma^2".into(),
    );
    c.insert(
        "power_normalization",
        "per-mode: snr/n_inner for both runs; evanescent modes add power".into(),
    );
    c.insert("seeds", "trial t uses seed + t in both runs (paired)".into());
    c.insert(
        "mode_window",
        match spec.run.window {
            crate::spec::WindowName::HalfWavelength => {
                "harmonics resolvable by a lambda/2 grid over the aperture".into()
            }
            crate::spec::WindowName::Unbounded => "full noise-floor ellipse".into(),
        },
    );
    toml::to_string(&Metadata {
        tool: "hmimo",
        version: VERSION,
        rows,
        conventions: c,
        spec,
    })
    .expect("metadata serialises to TOML")
}

fn table_csv(table: &Table) -> Result<Vec<u8>, CliError> {
    match table {
        Table::Dof(r) => csv_bytes(r),
        Table::Capacity(r) => csv_bytes(r),
        Table::Lattice(r) => csv_bytes(r),
        Table::Entries(r) => csv_bytes(r),
    }
}

/// Write the requested formats plus the metadata sidecar into `dir`.
pub fn write_outputs(spec: &SweepSpec, table: &Table, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    if table.is_empty() {
        return Err(spec_err("no rows to emit"));
    }
    let stem = spec.stem();
    let mut files: Vec<(PathBuf, Vec<u8>)> = Vec::new();
    if spec.output.format.csv() {
        files.push((dir.join(format!("{stem}.csv")), table_csv(table)?));
    }
    if spec.output.format.svg() {
        let plot = plot_for(spec.kind, table)
            .ok_or_else(|| spec_err(format!("{} has no plot", spec.kind.command())))?;
        files.push((dir.join(format!("{stem}.svg")), render(&plot).into_bytes()));
    }
    files.push((
        dir.join(format!("{stem}.meta.toml")),
        metadata(spec, table.len()).into_bytes(),
    ));
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    for (path, bytes) in &files {
        write(path, bytes)?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}
