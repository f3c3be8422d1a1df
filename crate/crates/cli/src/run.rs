//! Sweep drivers. Each returns rows in spec order.

use hmimo::capacity::{paired_capacity_with, InnerSpectra, ModeWindow, Scenario};
use hmimo::dof::{dof_planar, gain_fraction, kz_max, LinkBudget};
use hmimo::lattice::{build_support, Aperture, Radiation, Region, SpectralSupport};
use hmimo::synthesis::{sample_field, variance_profile, AntennaGrid, Position};
use serde::{Deserialize, Serialize};

use crate::spec::{SweepKind, SweepSpec};
use crate::{spec::spec_err, CliError, VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DofRow {
    pub f_hz: f64,
    pub z_m: f64,
    #[serde(rename = "D_m")]
    pub d_m: f64,
    pub ratio_db: f64,
    pub kz_max: f64,
    /// Planar far-field DoF `πLxLy/λ²`.
    pub dof_far: f64,
    pub n_inner: usize,
    pub n_outer: usize,
    /// `100·n_outer/n_inner` on the wavenumber lattice.
    pub lattice_gain_pct: f64,
    pub gain_pct: f64,
    pub seed: u64,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityRow {
    pub f_hz: f64,
    pub z_m: f64,
    #[serde(rename = "D_m")]
    pub d_m: f64,
    pub ratio_db: f64,
    pub snr_db: f64,
    pub n_inner: usize,
    pub n_outer: usize,
    pub c_far: f64,
    pub c_far_se: f64,
    pub c_near: f64,
    pub c_near_se: f64,
    pub improvement_pct: f64,
    pub improvement_se: f64,
    pub n_trials: usize,
    pub seed: u64,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeRow {
    pub lx: i64,
    pub ly: i64,
    pub kx: f64,
    pub ky: f64,
    pub re_gamma: f64,
    pub im_gamma: f64,
    pub region: String,
}

/// One complex matrix or grid entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryRow {
    pub row: usize,
    pub col: usize,
    pub re: f64,
    pub im: f64,
}

/// Rows of one run.
#[derive(Debug, Clone, PartialEq)]
pub enum Table {
    Dof(Vec<DofRow>),
    Capacity(Vec<CapacityRow>),
    Lattice(Vec<LatticeRow>),
    Entries(Vec<EntryRow>),
}

impl Table {
    pub fn len(&self) -> usize {
        match self {
            Table::Dof(r) => r.len(),
            Table::Capacity(r) => r.len(),
            Table::Lattice(r) => r.len(),
            Table::Entries(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn expect_kind(spec: &SweepSpec, kind: SweepKind) -> Result<(), CliError> {
    if spec.kind != kind {
        return Err(spec_err(format!(
            "spec is for {}, not {}",
            spec.kind.command(),
            kind.command()
        )));
    }
    spec.validate()
}

fn finite(values: &[f64], what: &str) -> Result<(), CliError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("non-finite value in {what}")))
    }
}

fn aperture(spec: &SweepSpec, r: &Radiation) -> Result<Aperture, CliError> {
    Ok(Aperture::square(spec.aperture.side(r))?)
}

fn dof_row(spec: &SweepSpec, r: &Radiation, ratio_db: f64, z: f64) -> Result<DofRow, CliError> {
    let a = aperture(spec, r)?;
    let budget = LinkBudget::from_db(ratio_db, z)?;
    let floor = kz_max(&budget);
    let support = build_support(&a, r, floor.kz_max)?;
    let counts = support.count_summary()?;
    let row = DofRow {
        f_hz: r.frequency_hz(),
        z_m: z,
        d_m: a.max_dimension(),
        ratio_db,
        kz_max: floor.kz_max,
        dof_far: dof_planar(&a, r),
        n_inner: counts.n_inner,
        n_outer: counts.n_outer,
        lattice_gain_pct: 100.0 * counts.lattice_gain,
        gain_pct: 100.0 * gain_fraction(&budget, r),
        seed: spec.run.seed,
        version: VERSION.to_string(),
    };
    finite(
        &[row.kz_max, row.dof_far, row.lattice_gain_pct, row.gain_pct],
        "DoF row",
    )?;
    Ok(row)
}

/// Gain against distance at the budget's fixed power ratio.
pub fn run_dof_vs_distance(spec: &SweepSpec) -> Result<Vec<DofRow>, CliError> {
    expect_kind(spec, SweepKind::DofVsDistance)?;
    let zs = spec.sweep.as_ref().expect("validated").values();
    let mut rows = Vec::new();
    for r in spec.radiation.radiations()? {
        for &z in &zs {
            rows.push(dof_row(spec, &r, spec.budget.ratio_db, z)?);
        }
    }
    Ok(rows)
}

/// Gain against power ratio (dB) at the budget's fixed distance.
pub fn run_dof_vs_power(spec: &SweepSpec) -> Result<Vec<DofRow>, CliError> {
    expect_kind(spec, SweepKind::DofVsPowerRatio)?;
    let ratios = spec.sweep.as_ref().expect("validated").values();
    let mut rows = Vec::new();
    for r in spec.radiation.radiations()? {
        for &db in &ratios {
            rows.push(dof_row(spec, &r, db, spec.budget.distance_m)?);
        }
    }
    Ok(rows)
}

/// Paired far/near capacity for every frequency and distance.
pub fn run_capacity_vs_distance(spec: &SweepSpec) -> Result<Vec<CapacityRow>, CliError> {
    run_capacity_vs_distance_with(spec, |_| {})
}

/// [`run_capacity_vs_distance`], calling `progress` after every row.
pub fn run_capacity_vs_distance_with(
    spec: &SweepSpec,
    mut progress: impl FnMut(&CapacityRow),
) -> Result<Vec<CapacityRow>, CliError> {
    expect_kind(spec, SweepKind::CapacityVsDistance)?;
    let zs = spec.sweep.as_ref().expect("validated").values();
    let (n, seed) = (spec.run.trials, spec.run.seed);
    let snr = 10f64.powf(spec.run.snr_db / 10.0);
    let mut caches: Vec<InnerSpectra> = Vec::new();
    let mut rows = Vec::new();
    for r in spec.radiation.radiations()? {
        let a = aperture(spec, &r)?;
        for &z in &zs {
            let budget = LinkBudget::from_db(spec.budget.ratio_db, z)?.with_snr(snr)?;
            let scenario = Scenario::symmetric(
                &a,
                &r,
                &budget,
                spec.run.profile.into(),
                spec.run.window.into(),
            )?;
            let cache = match caches.iter().position(|c| c.matches(&scenario, n, seed)) {
                Some(i) => &caches[i],
                None => {
                    caches.push(InnerSpectra::compute(&scenario, n, seed)?);
                    caches.last().expect("just pushed")
                }
            };
            let p = paired_capacity_with(&scenario, cache, n, seed)?;
            let row = CapacityRow {
                f_hz: r.frequency_hz(),
                z_m: z,
                d_m: a.max_dimension(),
                ratio_db: spec.budget.ratio_db,
                snr_db: spec.run.snr_db,
                n_inner: scenario.tx_support.n_inner(),
                n_outer: scenario.tx_support.n_outer(),
                c_far: p.far.mean_bits,
                c_far_se: p.far.std_error,
                c_near: p.near.mean_bits,
                c_near_se: p.near.std_error,
                improvement_pct: p.improvement.percent,
                improvement_se: p.improvement.std_error,
                n_trials: n,
                seed,
                version: VERSION.to_string(),
            };
            finite(
                &[
                    row.c_far,
                    row.c_far_se,
                    row.c_near,
                    row.c_near_se,
                    row.improvement_pct,
                    row.improvement_se,
                ],
                "capacity row",
            )?;
            progress(&row);
            rows.push(row);
        }
    }
    Ok(rows)
}

fn single_radiation(spec: &SweepSpec) -> Result<Radiation, CliError> {
    Ok(spec.radiation.radiations()?.remove(0))
}

fn windowed_support(spec: &SweepSpec, r: &Radiation) -> Result<SpectralSupport, CliError> {
    let a = aperture(spec, r)?;
    let budget = LinkBudget::from_db(spec.budget.ratio_db, spec.budget.distance_m)?;
    let full = build_support(&a, r, kz_max(&budget).kz_max)?;
    Ok(match ModeWindow::from(spec.run.window) {
        ModeWindow::HalfWavelengthGrid => {
            let (hx, hy) = AntennaGrid::half_wavelength(&a, r, 0.0).resolvable_half_width();
            full.within_window(hx, hy)
        }
        ModeWindow::Explicit(hx, hy) => full.within_window(hx, hy),
        ModeWindow::Unbounded => full,
    })
}

/// Every lattice point of the budget's support, in support order.
///
/// The dump ignores the mode window: it lists the full noise-floor ellipse.
pub fn lattice_dump(spec: &SweepSpec) -> Result<Vec<LatticeRow>, CliError> {
    expect_kind(spec, SweepKind::LatticeDump)?;
    let r = single_radiation(spec)?;
    let a = aperture(spec, &r)?;
    let budget = LinkBudget::from_db(spec.budget.ratio_db, spec.budget.distance_m)?;
    let support = build_support(&a, &r, kz_max(&budget).kz_max)?;
    Ok(support
        .points()
        .iter()
        .map(|p| LatticeRow {
            lx: p.lx,
            ly: p.ly,
            kx: p.kx,
            ky: p.ky,
            re_gamma: p.gamma.re,
            im_gamma: p.gamma.im,
            region: match p.region {
                Region::Inner => "inner",
                Region::Outer => "outer",
            }
            .to_string(),
        })
        .collect())
}

/// One field realisation on the `[grid]`; `row` indexes y and `col` x.
pub fn field_sample(spec: &SweepSpec) -> Result<Vec<EntryRow>, CliError> {
    expect_kind(spec, SweepKind::FieldSample)?;
    let r = single_radiation(spec)?;
    let g = spec.grid.as_ref().expect("validated");
    let support = windowed_support(spec, &r)?;
    let profile = variance_profile(&support, spec.run.profile.into())?;
    let step = g.spacing_wavelengths * r.wavelength();
    let positions: Vec<Position> = (0..g.ny)
        .flat_map(|row| {
            (0..g.nx).map(move |col| Position::new(col as f64 * step, row as f64 * step, g.z_m))
        })
        .collect();
    let field = sample_field(&support, &profile, &positions, spec.run.seed)?;
    let rows: Vec<EntryRow> = field
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| EntryRow {
            row: i / g.nx,
            col: i % g.nx,
            re: v.re,
            im: v.im,
        })
        .collect();
    finite(
        &rows.iter().flat_map(|e| [e.re, e.im]).collect::<Vec<_>>(),
        "field sample",
    )?;
    Ok(rows)
}

/// One shifted angular channel `H̃` at `rz = budget.distance_m`.
pub fn channel_sample(spec: &SweepSpec) -> Result<Vec<EntryRow>, CliError> {
    expect_kind(spec, SweepKind::ChannelSample)?;
    let r = single_radiation(spec)?;
    let a = aperture(spec, &r)?;
    let budget = LinkBudget::from_db(spec.budget.ratio_db, spec.budget.distance_m)?;
    let scenario = Scenario::symmetric(
        &a,
        &r,
        &budget,
        spec.run.profile.into(),
        spec.run.window.into(),
    )?;
    let h = scenario.draw(spec.run.seed)?;
    let m = &h.matrix;
    let rows: Vec<EntryRow> = (0..m.nrows())
        .flat_map(|i| {
            (0..m.ncols()).map(move |j| EntryRow {
                row: i,
                col: j,
                re: m[(i, j)].re,
                im: m[(i, j)].im,
            })
        })
        .collect();
    finite(
        &rows.iter().flat_map(|e| [e.re, e.im]).collect::<Vec<_>>(),
        "channel sample",
    )?;
    Ok(rows)
}

/// Dispatch on `spec.kind`.
pub fn run(spec: &SweepSpec) -> Result<Table, CliError> {
    Ok(match spec.kind {
        SweepKind::DofVsDistance => Table::Dof(run_dof_vs_distance(spec)?),
        SweepKind::DofVsPowerRatio => Table::Dof(run_dof_vs_power(spec)?),
        SweepKind::CapacityVsDistance => Table::Capacity(run_capacity_vs_distance(spec)?),
        SweepKind::LatticeDump => Table::Lattice(lattice_dump(spec)?),
        SweepKind::FieldSample => Table::Entries(field_sample(spec)?),
        SweepKind::ChannelSample => Table::Entries(channel_sample(spec)?),
    })
}
