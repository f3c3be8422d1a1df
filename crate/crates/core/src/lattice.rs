//! Wavenumber lattice of a rectangular aperture.
//!
//! An aperture of side lengths `Lx × Ly` supports the transverse harmonics
//! `kx = 2π·lx/Lx`, `ky = 2π·ly/Ly` for integer `(lx, ly)`. Harmonics with
//! `kx² + ky² ≤ κ²` propagate ([`Region::Inner`]); those outside the disk
//! are evanescent ([`Region::Outer`]) and are kept only up to the annulus
//! radius `t = √(κ² + kz_max²)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Speed of light used when converting a frequency into a wavelength.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SpeedOfLight {
    /// `3·10⁸ m/s`, so that 3 GHz is exactly 0.1 m.
    #[default]
    Rounded,
    /// `299 792 458 m/s`.
    Exact,
}

impl SpeedOfLight {
    pub fn value(self) -> f64 {
        match self {
            SpeedOfLight::Rounded => 3.0e8,
            SpeedOfLight::Exact => 299_792_458.0,
        }
    }
}

/// Monochromatic radiation: frequency, wavelength and wavenumber `κ = 2π/λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Radiation {
    frequency_hz: f64,
    wavelength: f64,
    wavenumber: f64,
}

impl Radiation {
    pub fn from_frequency(frequency_hz: f64) -> Result<Self> {
        Self::from_frequency_with(frequency_hz, SpeedOfLight::Rounded)
    }

    pub fn from_frequency_with(frequency_hz: f64, c: SpeedOfLight) -> Result<Self> {
        if !(frequency_hz.is_finite() && frequency_hz > 0.0) {
            return Err(invalid("frequency", format!("must be positive, got {frequency_hz}")));
        }
        let wavelength = c.value() / frequency_hz;
        Ok(Self {
            frequency_hz,
            wavelength,
            wavenumber: 2.0 * PI / wavelength,
        })
    }

    /// Radiation with the given wavelength, frequency derived with the rounded `c`.
    pub fn from_wavelength(wavelength: f64) -> Result<Self> {
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(invalid("wavelength", format!("must be positive, got {wavelength}")));
        }
        Ok(Self {
            frequency_hz: SpeedOfLight::Rounded.value() / wavelength,
            wavelength,
            wavenumber: 2.0 * PI / wavelength,
        })
    }

    pub fn frequency_hz(&self) -> f64 {
        self.frequency_hz
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// `κ = 2π/λ` in rad/m.
    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }
}

/// Rectangular aperture (planar when `lz = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aperture {
    lx: f64,
    ly: f64,
    lz: f64,
}

impl Aperture {
    pub fn new(lx: f64, ly: f64, lz: f64) -> Result<Self> {
        for (name, v) in [("lx", lx), ("ly", ly)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        if !(lz.is_finite() && lz >= 0.0) {
            return Err(invalid("lz", format!("must be nonnegative, got {lz}")));
        }
        Ok(Self { lx, ly, lz })
    }

    pub fn planar(lx: f64, ly: f64) -> Result<Self> {
        Self::new(lx, ly, 0.0)
    }

    pub fn square(side: f64) -> Result<Self> {
        Self::new(side, side, 0.0)
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    pub fn lz(&self) -> f64 {
        self.lz
    }

    /// Maximum linear dimension `D`, the largest side length.
    pub fn max_dimension(&self) -> f64 {
        self.lx.max(self.ly).max(self.lz)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// Propagating: inside (or on) the radius-κ disk, real `γ`.
    Inner,
    /// Evanescent: outside the disk, imaginary `γ`.
    Outer,
}

/// Longitudinal wavenumber `γ = √(κ² − kx² − ky²)`.
///
/// The branch is real and nonnegative inside the disk and `+j√(kx²+ky²−κ²)`
/// outside it, so that `e^{jγz}` decays for `z > 0`.
pub fn gamma(kx: f64, ky: f64, kappa: f64) -> Complex64 {
    let d = kappa * kappa - kx * kx - ky * ky;
    if d >= 0.0 {
        Complex64::new(d.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-d).sqrt())
    }
}

/// One lattice harmonic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavenumberPoint {
    pub lx: i64,
    pub ly: i64,
    pub kx: f64,
    pub ky: f64,
    pub gamma: Complex64,
    pub region: Region,
}

impl WavenumberPoint {
    /// Complex propagation factor `e^{jγz}`.
    pub fn propagation(&self, z: f64) -> Complex64 {
        (Complex64::i() * self.gamma * z).exp()
    }
}

// Relative slack for points that sit on a boundary up to rounding.
const BOUNDARY_EPS: f64 = 1e-12;

/// Lattice points of one aperture at one frequency.
///
/// Points are ordered row-major by `(lx, ly)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSupport {
    points: Vec<WavenumberPoint>,
    kappa: f64,
    kz_max: f64,
    lx_len: f64,
    ly_len: f64,
    n_inner: usize,
    n_outer: usize,
}

/// Counts of a support and the discrete evanescent gain `n_outer / n_inner`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountSummary {
    pub n_inner: usize,
    pub n_outer: usize,
    pub lattice_gain: f64,
}

/// Enumerate all lattice points with `kx² + ky² ≤ κ² + kz_max²`.
pub fn build_support(
    aperture: &Aperture,
    radiation: &Radiation,
    kz_max: f64,
) -> Result<SpectralSupport> {
    if !(kz_max.is_finite() && kz_max >= 0.0) {
        return Err(invalid("kz_max", format!("must be nonnegative, got {kz_max}")));
    }
    let kappa = radiation.wavenumber();
    let (lx_len, ly_len) = (aperture.lx(), aperture.ly());

    // Work in index space: q = (lx/ax)² + (ly/ay)² with ax = Lx/λ, so that
    // kx² + ky² = κ²·q and the disk is q ≤ 1.
    let ax = lx_len * kappa / (2.0 * PI);
    let ay = ly_len * kappa / (2.0 * PI);
    let outer_q = 1.0 + (kz_max / kappa).powi(2);
    let max_lx = (ax * outer_q.sqrt() * (1.0 + BOUNDARY_EPS)).floor() as i64;

    let mut points = Vec::new();
    let mut n_inner = 0;
    for lx in -max_lx..=max_lx {
        let qx = (lx as f64 / ax).powi(2);
        let rem = (outer_q - qx).max(0.0);
        let max_ly = (ay * rem.sqrt() * (1.0 + BOUNDARY_EPS)).floor() as i64;
        for ly in -max_ly..=max_ly {
            let q = qx + (ly as f64 / ay).powi(2);
            if q > outer_q * (1.0 + BOUNDARY_EPS) {
                continue;
            }
            let (region, gamma) = if q <= 1.0 + BOUNDARY_EPS {
                (Region::Inner, Complex64::new(kappa * (1.0 - q).max(0.0).sqrt(), 0.0))
            } else {
                (Region::Outer, Complex64::new(0.0, kappa * (q - 1.0).sqrt()))
            };
            if region == Region::Inner {
                n_inner += 1;
            }
            points.push(WavenumberPoint {
                lx,
                ly,
                kx: 2.0 * PI * lx as f64 / lx_len,
                ky: 2.0 * PI * ly as f64 / ly_len,
                gamma,
                region,
            });
        }
    }
    let n_outer = points.len() - n_inner;
    Ok(SpectralSupport {
        points,
        kappa,
        kz_max,
        lx_len,
        ly_len,
        n_inner,
        n_outer,
    })
}

impl SpectralSupport {
    pub fn points(&self) -> &[WavenumberPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn kz_max(&self) -> f64 {
        self.kz_max
    }

    /// Aperture side lengths `(Lx, Ly)` the lattice was built for.
    pub fn side_lengths(&self) -> (f64, f64) {
        (self.lx_len, self.ly_len)
    }

    pub fn n_inner(&self) -> usize {
        self.n_inner
    }

    pub fn n_outer(&self) -> usize {
        self.n_outer
    }

    /// Radius `t` of the outer ellipse, `t² = κ² + kz_max²`.
    pub fn outer_radius(&self) -> f64 {
        self.kappa.hypot(self.kz_max)
    }

    pub fn regions(&self) -> Vec<Region> {
        self.points.iter().map(|p| p.region).collect()
    }

    pub fn gammas(&self) -> Vec<Complex64> {
        self.points.iter().map(|p| p.gamma).collect()
    }

    pub fn count_summary(&self) -> Result<CountSummary> {
        count_summary(self)
    }

    /// Keep only the points accepted by `keep`, preserving order.
    pub fn subset(&self, mut keep: impl FnMut(&WavenumberPoint) -> bool) -> SpectralSupport {
        let points: Vec<_> = self.points.iter().copied().filter(|p| keep(p)).collect();
        let n_inner = points.iter().filter(|p| p.region == Region::Inner).count();
        SpectralSupport {
            n_outer: points.len() - n_inner,
            n_inner,
            points,
            ..*self
        }
    }

    /// Restrict to `|lx| ≤ half_x`, `|ly| ≤ half_y`, the harmonics an
    /// antenna grid with `2·half + 1` elements per axis can resolve.
    pub fn within_window(&self, half_x: i64, half_y: i64) -> SpectralSupport {
        self.subset(|p| p.lx.abs() <= half_x && p.ly.abs() <= half_y)
    }

    /// The propagating part only (as if `kz_max = 0`).
    pub fn inner_only(&self) -> SpectralSupport {
        let mut s = self.subset(|p| p.region == Region::Inner);
        s.kz_max = 0.0;
        s
    }
}

/// Counts and `lattice_gain = n_outer / n_inner`.
pub fn count_summary(support: &SpectralSupport) -> Result<CountSummary> {
    if support.n_inner == 0 {
        return Err(Error::EmptyInnerRegion);
    }
    Ok(CountSummary {
        n_inner: support.n_inner,
        n_outer: support.n_outer,
        lattice_gain: support.n_outer as f64 / support.n_inner as f64,
    })
}
