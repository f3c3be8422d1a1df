//! Sweep specification files.
//!
//! A spec is a TOML document with a top-level `kind` and the sections
//! `[aperture]`, `[radiation]`, `[budget]`, `[sweep]`, `[run]`, `[grid]` and
//! `[output]`. Missing sections take the defaults of the kind, so a file
//! holding only `kind = "capacity-vs-distance"` runs the reference capacity sweep.

use std::path::PathBuf;

use hmimo::capacity::ModeWindow;
use hmimo::lattice::{Radiation, SpeedOfLight};
use hmimo::synthesis::ProfileModel;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    DofVsDistance,
    DofVsPowerRatio,
    CapacityVsDistance,
    LatticeDump,
    FieldSample,
    ChannelSample,
}

impl SweepKind {
    pub const ALL: [SweepKind; 6] = [
        SweepKind::DofVsDistance,
        SweepKind::DofVsPowerRatio,
        SweepKind::CapacityVsDistance,
        SweepKind::LatticeDump,
        SweepKind::FieldSample,
        SweepKind::ChannelSample,
    ];

    /// Subcommand name, also the default output file stem.
    pub fn command(self) -> &'static str {
        match self {
            SweepKind::DofVsDistance => "dof-distance",
            SweepKind::DofVsPowerRatio => "dof-power",
            SweepKind::CapacityVsDistance => "capacity-distance",
            SweepKind::LatticeDump => "lattice",
            SweepKind::FieldSample => "field-sample",
            SweepKind::ChannelSample => "channel-sample",
        }
    }

    pub fn is_sweep(self) -> bool {
        matches!(
            self,
            SweepKind::DofVsDistance | SweepKind::DofVsPowerRatio | SweepKind::CapacityVsDistance
        )
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// Swept axis: `count` points from `min` to `max` inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i + 1 == self.count {
                    return self.max;
                }
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + t * (self.max - self.min),
                    Spacing::Log => self.min * (self.max / self.min).powf(t),
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.count < 2 {
            return Err(spec_err(format!("sweep.count must be at least 2, got {}", self.count)));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(spec_err(format!(
                "sweep needs finite min < max, got {} and {}",
                self.min, self.max
            )));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return Err(spec_err("log spacing requires sweep.min > 0"));
        }
        Ok(())
    }
}

/// Square aperture, given in metres or in wavelengths (one of the two).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApertureSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side_wavelengths: Option<f64>,
}

impl ApertureSpec {
    pub fn side(&self, radiation: &Radiation) -> f64 {
        match (self.side_m, self.side_wavelengths) {
            (Some(m), _) => m,
            (None, Some(w)) => w * radiation.wavelength(),
            (None, None) => f64::NAN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiationSpec {
    pub frequencies_hz: Vec<f64>,
    /// Use c = 299 792 458 m/s instead of 3·10⁸ m/s.
    #[serde(default)]
    pub exact_speed_of_light: bool,
}

impl RadiationSpec {
    pub fn speed_of_light(&self) -> SpeedOfLight {
        if self.exact_speed_of_light {
            SpeedOfLight::Exact
        } else {
            SpeedOfLight::Rounded
        }
    }

    pub fn radiations(&self) -> Result<Vec<Radiation>, CliError> {
        self.frequencies_hz
            .iter()
            .map(|f| Radiation::from_frequency_with(*f, self.speed_of_light()).map_err(CliError::from))
            .collect()
    }
}

/// Fixed link budget; the swept axis overrides one of the two fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSpec {
    pub ratio_db: f64,
    pub distance_m: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileName {
    #[default]
    Uniform,
    Isotropic,
}

impl From<ProfileName> for ProfileModel {
    fn from(p: ProfileName) -> Self {
        match p {
            ProfileName::Uniform => ProfileModel::Uniform,
            ProfileName::Isotropic => ProfileModel::Isotropic,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowName {
    #[default]
    HalfWavelength,
    Unbounded,
}

impl From<WindowName> for ModeWindow {
    fn from(w: WindowName) -> Self {
        match w {
            WindowName::HalfWavelength => ModeWindow::HalfWavelengthGrid,
            WindowName::Unbounded => ModeWindow::Unbounded,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub seed: u64,
    pub trials: usize,
    pub snr_db: f64,
    #[serde(default)]
    pub profile: ProfileName,
    #[serde(default)]
    pub window: WindowName,
}

/// Sampling grid for `field-sample`: `nx × ny` points at height `z_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub spacing_wavelengths: f64,
    pub z_m: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    #[serde(alias = "svg-lines")]
    Svg,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn svg(self) -> bool {
        matches!(self, Format::Svg | Format::Both)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stem: Option<String>,
    #[serde(default)]
    pub format: Format,
}

/// Everything needed to reproduce one output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub aperture: ApertureSpec,
    pub radiation: RadiationSpec,
    pub budget: BudgetSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Axis>,
    pub run: RunSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

// Partial file form: every section optional, merged over the defaults.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    kind: SweepKind,
    aperture: Option<ApertureSpec>,
    radiation: Option<RadiationSpec>,
    budget: Option<BudgetSpec>,
    sweep: Option<Axis>,
    run: Option<RunSpec>,
    grid: Option<GridSpec>,
    output: Option<OutputSpec>,
}

/// Values from the command line that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub snr_db: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

pub(crate) fn spec_err(msg: impl Into<String>) -> CliError {
    CliError::Spec(msg.into())
}

const REFERENCE_RATIO_DB: f64 = 125.56;

impl SweepSpec {
    /// Defaults of each kind: the 0.5 m, 3 GHz reference link for the DoF
    /// sweeps and a 10λ array at three frequencies for the capacity sweep.
    pub fn defaults(kind: SweepKind) -> Self {
        let reference_link = RadiationSpec {
            frequencies_hz: vec![3e9],
            exact_speed_of_light: false,
        };
        let run = RunSpec {
            seed: 1,
            trials: 500,
            snr_db: 10.0,
            profile: ProfileName::Uniform,
            window: WindowName::HalfWavelength,
        };
        let metres = |m| ApertureSpec {
            side_m: Some(m),
            side_wavelengths: None,
        };
        let wavelengths = |w| ApertureSpec {
            side_m: None,
            side_wavelengths: Some(w),
        };
        let budget = |ratio_db, distance_m| BudgetSpec { ratio_db, distance_m };
        let base = SweepSpec {
            kind,
            aperture: metres(0.5),
            radiation: reference_link,
            budget: budget(REFERENCE_RATIO_DB, 0.5),
            sweep: None,
            run,
            grid: None,
            output: OutputSpec::default(),
        };
        match kind {
            SweepKind::DofVsDistance => SweepSpec {
                sweep: Some(Axis {
                    min: 0.05,
                    max: 5.0,
                    count: 21,
                    spacing: Spacing::Log,
                }),
                ..base
            },
            SweepKind::DofVsPowerRatio => SweepSpec {
                sweep: Some(Axis {
                    min: 0.0,
                    max: 160.0,
                    count: 33,
                    spacing: Spacing::Linear,
                }),
                ..base
            },
            SweepKind::CapacityVsDistance => SweepSpec {
                aperture: wavelengths(10.0),
                radiation: RadiationSpec {
                    frequencies_hz: vec![3e8, 9e8, 3e9],
                    exact_speed_of_light: false,
                },
                sweep: Some(Axis {
                    min: 0.01,
                    max: 1.0,
                    count: 25,
                    spacing: Spacing::Log,
                }),
                ..base
            },
            SweepKind::LatticeDump => base,
            SweepKind::FieldSample => SweepSpec {
                aperture: wavelengths(40.0),
                budget: budget(0.0, 0.5),
                run: RunSpec {
                    profile: ProfileName::Isotropic,
                    window: WindowName::Unbounded,
                    ..base.run
                },
                grid: Some(GridSpec {
                    nx: 9,
                    ny: 9,
                    spacing_wavelengths: 0.25,
                    z_m: 0.0,
                }),
                ..base
            },
            SweepKind::ChannelSample => SweepSpec {
                aperture: wavelengths(10.0),
                budget: budget(REFERENCE_RATIO_DB, 0.05),
                ..base
            },
        }
    }

    /// Parse a spec file, filling absent sections from the kind's defaults.
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let file: SpecFile =
            toml::from_str(text).map_err(|e| spec_err(format!("cannot parse spec: {e}")))?;
        let d = SweepSpec::defaults(file.kind);
        let spec = SweepSpec {
            kind: file.kind,
            aperture: file.aperture.unwrap_or(d.aperture),
            radiation: file.radiation.unwrap_or(d.radiation),
            budget: file.budget.unwrap_or(d.budget),
            sweep: file.sweep.or(d.sweep),
            run: file.run.unwrap_or(d.run),
            grid: file.grid.or(d.grid),
            output: file.output.unwrap_or(d.output),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec serialises to TOML")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.run.seed = seed;
        }
        if let Some(trials) = o.trials {
            self.run.trials = trials;
        }
        if let Some(snr_db) = o.snr_db {
            self.run.snr_db = snr_db;
        }
        if let Some(out) = &o.out {
            self.output.dir = Some(out.clone());
        }
        if let Some(format) = o.format {
            self.output.format = format;
        }
    }

    pub fn stem(&self) -> String {
        self.output
            .stem
            .clone()
            .unwrap_or_else(|| self.kind.command().to_string())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fs = &self.radiation.frequencies_hz;
        if fs.is_empty() {
            return Err(spec_err("radiation.frequencies_hz is empty"));
        }
        if let Some(f) = fs.iter().find(|f| !(f.is_finite() && **f > 0.0)) {
            return Err(spec_err(format!("frequency must be positive, got {f}")));
        }
        if !self.kind.is_sweep() && fs.len() != 1 {
            return Err(spec_err(format!(
                "{} takes exactly one frequency",
                self.kind.command()
            )));
        }
        let a = &self.aperture;
        match (a.side_m, a.side_wavelengths) {
            (Some(v), None) | (None, Some(v)) if v.is_finite() && v > 0.0 => {}
            (Some(_), Some(_)) => {
                return Err(spec_err("give aperture.side_m or aperture.side_wavelengths, not both"))
            }
            (None, None) => return Err(spec_err("aperture side is missing")),
            _ => return Err(spec_err("aperture side must be positive")),
        }
        let b = &self.budget;
        if !b.ratio_db.is_finite() {
            return Err(spec_err("budget.ratio_db must be finite"));
        }
        if !(b.distance_m.is_finite() && b.distance_m > 0.0) {
            return Err(spec_err(format!(
                "budget.distance_m must be positive, got {}",
                b.distance_m
            )));
        }
        if !self.run.snr_db.is_finite() {
            return Err(spec_err("run.snr_db must be finite"));
        }
        if self.kind.is_sweep() {
            let axis = self
                .sweep
                .as_ref()
                .ok_or_else(|| spec_err(format!("{} needs a [sweep] section", self.kind.command())))?;
            axis.validate()?;
            if matches!(self.kind, SweepKind::DofVsDistance | SweepKind::CapacityVsDistance)
                && axis.min <= 0.0
            {
                return Err(spec_err("distances must be positive"));
            }
        }
        if self.kind == SweepKind::CapacityVsDistance {
            if self.run.trials == 0 {
                return Err(spec_err("run.trials must be at least 1"));
            }
            if b.ratio_db < 0.0 {
                return Err(spec_err(format!(
                    "budget below the noise floor ({} dB)",
                    b.ratio_db
                )));
            }
        }
        if self.kind == SweepKind::FieldSample {
            let g = self
                .grid
                .as_ref()
                .ok_or_else(|| spec_err("field-sample needs a [grid] section"))?;
            if g.nx == 0 || g.ny == 0 {
                return Err(spec_err("grid must have at least one point per axis"));
            }
            if !(g.spacing_wavelengths.is_finite() && g.spacing_wavelengths > 0.0) {
                return Err(spec_err("grid.spacing_wavelengths must be positive"));
            }
            if !g.z_m.is_finite() {
                return Err(spec_err("grid.z_m must be finite"));
            }
        }
        if !self.kind.is_sweep() && self.output.format.svg() {
            return Err(spec_err(format!(
                "{} writes CSV only",
                self.kind.command()
            )));
        }
        if let Some(stem) = &self.output.stem {
            if stem.is_empty() || stem.contains(['/', '\\']) {
                return Err(spec_err(format!("invalid output stem {stem:?}")));
            }
        }
        Ok(())
    }
}
