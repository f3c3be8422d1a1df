use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::lattice::{Region, SpectralSupport};

/// Spectral weighting of the lattice harmonics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ProfileModel {
    /// Unit variance on every harmonic, propagating and evanescent alike.
    #[default]
    Uniform,
    /// Isotropic scattering: the 2D spectrum `∝ 1/|γ|` integrated over each
    /// lattice cell.
    Isotropic,
}

/// Per-harmonic variances `σ²` aligned with a support's point order.
///
/// The same numbers define the amplitude profile `σ = √σ²` that multiplies
/// the white angular coefficients, see [`couple_sigma`](super::couple_sigma).
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceProfile {
    sigma2: Vec<f64>,
    regions: Vec<Region>,
    model: ProfileModel,
    kz_max: f64,
}

impl VarianceProfile {
    /// Profile from explicit variances. Entries must be finite and `≥ 0`.
    pub fn from_variances(support: &SpectralSupport, sigma2: Vec<f64>) -> Result<Self> {
        if sigma2.len() != support.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} variances for {} lattice points",
                sigma2.len(),
                support.len()
            )));
        }
        if let Some(bad) = sigma2.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(crate::error::invalid(
                "sigma2",
                format!("variances must be finite and nonnegative, got {bad}"),
            ));
        }
        Ok(Self {
            sigma2,
            regions: support.regions(),
            model: ProfileModel::Uniform,
            kz_max: support.kz_max(),
        })
    }

    pub fn variances(&self) -> &[f64] {
        &self.sigma2
    }

    pub fn amplitudes(&self) -> Vec<f64> {
        self.sigma2.iter().map(|v| v.sqrt()).collect()
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn model(&self) -> ProfileModel {
        self.model
    }

    pub fn kz_max(&self) -> f64 {
        self.kz_max
    }

    pub fn len(&self) -> usize {
        self.sigma2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma2.is_empty()
    }

    /// Sum of the Inner variances.
    pub fn inner_power(&self) -> f64 {
        self.sigma2
            .iter()
            .zip(&self.regions)
            .filter(|(_, r)| **r == Region::Inner)
            .map(|(v, _)| v)
            .sum()
    }

    /// Drop every Outer entry (the far-field view of the same profile).
    pub fn inner_only(&self) -> VarianceProfile {
        let (sigma2, regions) = self
            .sigma2
            .iter()
            .zip(&self.regions)
            .filter(|(_, r)| **r == Region::Inner)
            .map(|(v, r)| (*v, *r))
            .unzip();
        VarianceProfile {
            sigma2,
            regions,
            model: self.model,
            kz_max: 0.0,
        }
    }
}

/// Build the variance profile of `support` under `model`.
///
/// Isotropic variances are normalised so the Inner entries average 1; Outer
/// entries share the same scale factor.
pub fn variance_profile(support: &SpectralSupport, model: ProfileModel) -> Result<VarianceProfile> {
    if support.is_empty() {
        return Err(Error::Empty("spectral support"));
    }
    let sigma2 = match model {
        ProfileModel::Uniform => vec![1.0; support.len()],
        ProfileModel::Isotropic => isotropic_cell_weights(support)?,
    };
    Ok(VarianceProfile {
        sigma2,
        regions: support.regions(),
        model,
        kz_max: support.kz_max(),
    })
}

// Samples per cell width along each quadrature axis, and a cap on the
// total number of samples per region.
const SAMPLES_PER_CELL: f64 = 32.0;
const MAX_SAMPLES: f64 = 3.0e7;

/// Cell integrals of `1/|γ|` for every point of the support.
///
/// The integrable edge singularity is removed by change of variables. On
/// the disk, `k = κ·sin θ` turns `k dk dφ / γ` into `κ·sin θ dθ dφ`; on the
/// annulus, `v = Im γ` turns `k dk dφ / Im γ` into `dv dφ`. Each sample is
/// credited to the nearest lattice point of its own region, so slivers of
/// the disk that fall into an Outer point's cell still count as propagating
/// power (and vice versa).
fn isotropic_cell_weights(support: &SpectralSupport) -> Result<Vec<f64>> {
    if support.n_inner() == 0 {
        return Err(Error::EmptyInnerRegion);
    }
    let kappa = support.kappa();
    let (lx_len, ly_len) = support.side_lengths();
    let dk = 2.0 * PI / lx_len.max(ly_len);
    let owner = OwnerGrid::new(support);
    let mut weights = vec![0.0; support.len()];

    // Disk.
    let n_theta = SAMPLES_PER_CELL * FRAC_PI_2 * kappa / dk + 64.0;
    let n_phi = SAMPLES_PER_CELL * 2.0 * PI * kappa / dk + 256.0;
    let (n_theta, n_phi) = capped(n_theta, n_phi);
    let d_theta = FRAC_PI_2 / n_theta as f64;
    let d_phi = 2.0 * PI / n_phi as f64;
    let trig: Vec<(f64, f64)> = (0..n_phi)
        .map(|j| ((j as f64 + 0.5) * d_phi).sin_cos())
        .map(|(s, c)| (c, s))
        .collect();
    for i in 0..n_theta {
        let theta = (i as f64 + 0.5) * d_theta;
        let k = kappa * theta.sin();
        let w = kappa * theta.sin() * d_theta * d_phi;
        for &(c, s) in &trig {
            if let Some(idx) = owner.nearest(k * c, k * s, Region::Inner) {
                weights[idx] += w;
            }
        }
    }

    // Annulus.
    let kz = support.kz_max();
    if kz > 0.0 && support.n_outer() > 0 {
        let t = support.outer_radius();
        let n_v = SAMPLES_PER_CELL * kz / dk + 64.0;
        let n_phi = SAMPLES_PER_CELL * 2.0 * PI * t / dk + 256.0;
        let (n_v, n_phi) = capped(n_v, n_phi);
        let d_v = kz / n_v as f64;
        let d_phi = 2.0 * PI / n_phi as f64;
        let w = d_v * d_phi;
        let trig: Vec<(f64, f64)> = (0..n_phi)
            .map(|j| ((j as f64 + 0.5) * d_phi).sin_cos())
            .map(|(s, c)| (c, s))
            .collect();
        for i in 0..n_v {
            let v = (i as f64 + 0.5) * d_v;
            let k = kappa.hypot(v);
            for &(c, s) in &trig {
                if let Some(idx) = owner.nearest(k * c, k * s, Region::Outer) {
                    weights[idx] += w;
                }
            }
        }
    }

    let inner_sum: f64 = weights
        .iter()
        .zip(support.points())
        .filter(|(_, p)| p.region == Region::Inner)
        .map(|(w, _)| w)
        .sum();
    let scale = support.n_inner() as f64 / inner_sum;
    weights.iter_mut().for_each(|w| *w *= scale);
    Ok(weights)
}

fn capped(a: f64, b: f64) -> (usize, usize) {
    let total = a * b;
    let shrink = if total > MAX_SAMPLES {
        (MAX_SAMPLES / total).sqrt()
    } else {
        1.0
    };
    ((a * shrink).ceil() as usize, (b * shrink).ceil() as usize)
}

/// Dense `(lx, ly) → point index` table with nearest-point lookup.
struct OwnerGrid {
    max_lx: i64,
    max_ly: i64,
    cells: Vec<Option<(usize, Region)>>,
    dkx: f64,
    dky: f64,
}

impl OwnerGrid {
    fn new(support: &SpectralSupport) -> Self {
        let max_lx = support.points().iter().map(|p| p.lx.abs()).max().unwrap_or(0) + 3;
        let max_ly = support.points().iter().map(|p| p.ly.abs()).max().unwrap_or(0) + 3;
        let width = (2 * max_ly + 1) as usize;
        let mut cells = vec![None; (2 * max_lx + 1) as usize * width];
        for (i, p) in support.points().iter().enumerate() {
            let at = (p.lx + max_lx) as usize * width + (p.ly + max_ly) as usize;
            cells[at] = Some((i, p.region));
        }
        let (lx_len, ly_len) = support.side_lengths();
        Self {
            max_lx,
            max_ly,
            cells,
            dkx: 2.0 * PI / lx_len,
            dky: 2.0 * PI / ly_len,
        }
    }

    fn get(&self, lx: i64, ly: i64) -> Option<(usize, Region)> {
        if lx.abs() > self.max_lx || ly.abs() > self.max_ly {
            return None;
        }
        let width = (2 * self.max_ly + 1) as usize;
        self.cells[(lx + self.max_lx) as usize * width + (ly + self.max_ly) as usize]
    }

    /// Index of the point of `region` nearest to `(kx, ky)`.
    fn nearest(&self, kx: f64, ky: f64, region: Region) -> Option<usize> {
        let fx = kx / self.dkx;
        let fy = ky / self.dky;
        let (cx, cy) = (fx.round() as i64, fy.round() as i64);
        if let Some((idx, r)) = self.get(cx, cy) {
            if r == region {
                return Some(idx);
            }
        }
        let mut best: Option<(f64, usize)> = None;
        for dx in -2..=2 {
            for dy in -2..=2 {
                if let Some((idx, r)) = self.get(cx + dx, cy + dy) {
                    if r != region {
                        continue;
                    }
                    let ex = ((cx + dx) as f64 - fx) * self.dkx;
                    let ey = ((cy + dy) as f64 - fy) * self.dky;
                    let d = ex * ex + ey * ey;
                    if best.map_or(true, |(bd, _)| d < bd) {
                        best = Some((d, idx));
                    }
                }
            }
        }
        best.map(|(_, idx)| idx)
    }
}
