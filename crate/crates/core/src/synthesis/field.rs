use std::sync::Arc;

use num_complex::Complex64;

use super::{Position, VarianceProfile};
use crate::error::{Error, Result};
use crate::lattice::SpectralSupport;
use crate::rng;

/// One realisation of the scalar field on a set of positions.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub positions: Arc<[Position]>,
    pub values: Vec<Complex64>,
    pub seed: u64,
}

/// Precomputed plane-wave basis for repeated field draws on a fixed grid.
///
/// Each realisation is
/// `h(p) = c·Σ_i σ_i·W_i·e^{j(kx_i·x + ky_i·y + γ_i·|z|)}` with independent
/// `W_i ~ CN(0, 1)` and `c = 1/√(Σ_inner σ²)`, so the propagating part has
/// unit variance at `z = 0`. Negative heights use the mirrored branch
/// `h₋`, which decays away from the plane just like `h₊`.
#[derive(Debug, Clone)]
pub struct FieldSampler {
    positions: Arc<[Position]>,
    // basis[p * n_modes + i]
    basis: Vec<Complex64>,
    n_modes: usize,
}

impl FieldSampler {
    pub fn new(
        support: &SpectralSupport,
        profile: &VarianceProfile,
        positions: &[Position],
    ) -> Result<Self> {
        if profile.len() != support.len() {
            return Err(Error::DimensionMismatch(format!(
                "profile of {} entries for {} lattice points",
                profile.len(),
                support.len()
            )));
        }
        let inner_power = profile.inner_power();
        if inner_power <= 0.0 {
            return Err(Error::EmptyInnerRegion);
        }
        let norm = inner_power.sqrt().recip();
        let amps = profile.amplitudes();
        let n_modes = support.len();
        let j = Complex64::i();
        let mut basis = Vec::with_capacity(positions.len() * n_modes);
        for p in positions {
            for (pt, a) in support.points().iter().zip(&amps) {
                let phase = j * (pt.kx * p.x + pt.ky * p.y) + j * pt.gamma * p.z.abs();
                basis.push(phase.exp() * (a * norm));
            }
        }
        Ok(Self {
            positions: positions.into(),
            basis,
            n_modes,
        })
    }

    pub fn sample(&self, seed: u64) -> FieldGrid {
        let mut rng = rng::stream(seed, 0);
        let w: Vec<Complex64> = (0..self.n_modes)
            .map(|_| rng::complex_gaussian(&mut rng))
            .collect();
        let values = self
            .basis
            .chunks_exact(self.n_modes.max(1))
            .take(self.positions.len())
            .map(|row| row.iter().zip(&w).map(|(b, w)| b * w).sum())
            .collect();
        FieldGrid {
            positions: self.positions.clone(),
            values: if self.n_modes == 0 {
                vec![Complex64::new(0.0, 0.0); self.positions.len()]
            } else {
                values
            },
            seed,
        }
    }
}

/// Single field realisation, see [`FieldSampler`].
pub fn sample_field(
    support: &SpectralSupport,
    profile: &VarianceProfile,
    grid: &[Position],
    seed: u64,
) -> Result<FieldGrid> {
    Ok(FieldSampler::new(support, profile, grid)?.sample(seed))
}

/// Spatial displacement `(dx, dy, dz)` in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lag {
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
}

impl Lag {
    pub fn new(dx: f64, dy: f64, dz: f64) -> Self {
        Self { dx, dy, dz }
    }
}

/// Normalised autocorrelation estimate at one lag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutocorrelationEstimate {
    pub lag: Lag,
    /// `ĉ(lag)/ĉ(0)`.
    pub value: Complex64,
    /// Standard errors of the real and imaginary parts across realisations.
    pub std_error_re: f64,
    pub std_error_im: f64,
    /// Position pairs per realisation.
    pub n_pairs: usize,
}

pub const MIN_ENSEMBLE: usize = 100;

/// Average `h*(p)·h(p + lag)` over positions and realisations, divided by
/// the zero-lag average.
///
/// Standard errors treat realisations as independent and linearise the
/// ratio (delta method).
pub fn estimate_autocorrelation(
    fields: &[FieldGrid],
    lags: &[Lag],
) -> Result<Vec<AutocorrelationEstimate>> {
    if fields.len() < MIN_ENSEMBLE {
        return Err(Error::EnsembleTooSmall {
            got: fields.len(),
            need: MIN_ENSEMBLE,
        });
    }
    let positions = &fields[0].positions;
    if fields.iter().any(|f| f.positions != *positions) {
        return Err(Error::DimensionMismatch(
            "realisations sampled on different grids".into(),
        ));
    }
    let scale = positions
        .iter()
        .map(|p| p.x.abs().max(p.y.abs()).max(p.z.abs()))
        .fold(0.0, f64::max)
        .max(1.0);
    let tol = 1e-9 * scale;

    let zero_pairs: Vec<(usize, usize)> = (0..positions.len()).map(|i| (i, i)).collect();
    let zero: Vec<f64> = fields
        .iter()
        .map(|f| pair_mean(f, &zero_pairs).re)
        .collect();
    let zero_mean = mean(&zero);

    lags.iter()
        .map(|lag| {
            let pairs = pairs_for(positions, *lag, tol);
            if pairs.is_empty() {
                return Err(Error::LagOffGrid(lag.dx, lag.dy, lag.dz));
            }
            let per: Vec<Complex64> = fields.iter().map(|f| pair_mean(f, &pairs)).collect();
            let re: Vec<f64> = per.iter().map(|c| c.re).collect();
            let im: Vec<f64> = per.iter().map(|c| c.im).collect();
            let value = Complex64::new(mean(&re), mean(&im)) / zero_mean;
            Ok(AutocorrelationEstimate {
                lag: *lag,
                value,
                std_error_re: ratio_std_error(&re, &zero, value.re),
                std_error_im: ratio_std_error(&im, &zero, value.im),
                n_pairs: pairs.len(),
            })
        })
        .collect()
}

fn pairs_for(positions: &[Position], lag: Lag, tol: f64) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for (i, p) in positions.iter().enumerate() {
        let target = Position::new(p.x + lag.dx, p.y + lag.dy, p.z + lag.dz);
        if let Some(j) = positions.iter().position(|q| {
            (q.x - target.x).abs() <= tol
                && (q.y - target.y).abs() <= tol
                && (q.z - target.z).abs() <= tol
        }) {
            pairs.push((i, j));
        }
    }
    pairs
}

fn pair_mean(field: &FieldGrid, pairs: &[(usize, usize)]) -> Complex64 {
    let sum: Complex64 = pairs
        .iter()
        .map(|&(i, j)| field.values[i].conj() * field.values[j])
        .sum();
    sum / pairs.len() as f64
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

// Delta-method standard error of mean(a)/mean(b) with ratio r.
fn ratio_std_error(a: &[f64], b: &[f64], r: f64) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (mean(a), mean(b));
    let resid: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - ma) - r * (y - mb))
        .collect();
    let var = resid.iter().map(|d| d * d).sum::<f64>() / (n - 1.0);
    (var / n).sqrt() / mb.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_support, Aperture, Radiation};
    use crate::synthesis::{variance_profile, ProfileModel};

    #[test]
    fn broadside_wave_is_constant_in_plane() {
        let r = Radiation::from_wavelength(0.1).unwrap();
        let s = build_support(&Aperture::square(0.05).unwrap(), &r, 0.0).unwrap();
        assert_eq!(s.len(), 1);
        let p = variance_profile(&s, ProfileModel::Uniform).unwrap();
        let grid: Vec<_> = (0..5)
            .map(|i| Position::new(0.013 * i as f64, 0.007 * i as f64, 0.0))
            .collect();
        let f = sample_field(&s, &p, &grid, 4).unwrap();
        for v in &f.values {
            assert!((v - f.values[0]).norm() < 1e-14);
        }
    }

    #[test]
    fn small_ensembles_and_off_grid_lags_are_rejected() {
        let r = Radiation::from_wavelength(0.1).unwrap();
        let s = build_support(&Aperture::square(0.3).unwrap(), &r, 0.0).unwrap();
        let p = variance_profile(&s, ProfileModel::Uniform).unwrap();
        let grid = [Position::new(0.0, 0.0, 0.0), Position::new(0.025, 0.0, 0.0)];
        let sampler = FieldSampler::new(&s, &p, &grid).unwrap();
        let few: Vec<_> = (0..10).map(|k| sampler.sample(k)).collect();
        assert!(matches!(
            estimate_autocorrelation(&few, &[Lag::new(0.0, 0.0, 0.0)]),
            Err(Error::EnsembleTooSmall { got: 10, .. })
        ));
        let many: Vec<_> = (0..100).map(|k| sampler.sample(k)).collect();
        assert!(matches!(
            estimate_autocorrelation(&many, &[Lag::new(0.01, 0.0, 0.0)]),
            Err(Error::LagOffGrid(..))
        ));
        let est = estimate_autocorrelation(&many, &[Lag::new(0.0, 0.0, 0.0)]).unwrap();
        assert_eq!(est[0].value, Complex64::new(1.0, 0.0));
    }
}
