//! Ergodic capacity of the angular channel under uniform input power.
//!
//! With receive-only CSI the input covariance is `I/n_s` and a single
//! realisation carries `Σ_i log₂(1 + (snr/n_s)·λ_i(H̃·H̃ᴴ))` bits/s/Hz.
//! [`ergodic_capacity`] averages this over independent draws of `H_a`.
//!
//! Because the coupling matrix has no cross terms between propagating and
//! evanescent modes, `H̃` is block diagonal up to a permutation, and its
//! spectrum is the union of the spectra of the Inner and Outer blocks. The
//! engine works block by block. The Inner block is propagated by a
//! diagonal unitary, which leaves its spectrum unchanged, so it is
//! evaluated unshifted and is shared between the near-field run and the
//! far-field baseline of the same seed.

use faer::{Mat, MatRef, Side};
use num_complex::Complex64;

use crate::dof::{kz_max, LinkBudget};
use crate::error::{invalid, Error, Result};
use crate::lattice::{build_support, Aperture, Radiation, Region, SpectralSupport};
use crate::synthesis::{
    apply_shift, block_stream, couple_sigma, draw_angular, variance_profile, white_block,
    AngularChannel, AntennaGrid, CoupledSigma, ProfileModel, VarianceProfile,
};

/// Monte Carlo capacity estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityEstimate {
    pub mean_bits: f64,
    pub std_error: f64,
    pub n_trials: usize,
    pub snr: f64,
    pub n_s: usize,
    pub n_r: usize,
}

impl CapacityEstimate {
    fn from_trials(trials: &[f64], snr: f64, n_s: usize, n_r: usize) -> Self {
        let (mean_bits, std_error) = mean_and_se(trials);
        Self {
            mean_bits,
            std_error,
            n_trials: trials.len(),
            snr,
            n_s,
            n_r,
        }
    }
}

/// How the transmit power is spread when evanescent modes are added.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum PowerNormalization {
    /// Every source mode gets `snr/n_s,far`, with `n_s,far` the number of
    /// propagating source modes; evanescent modes add power on top.
    #[default]
    PerMode,
    /// The total power is fixed: each mode gets `snr/n_s` with `n_s` the
    /// total number of source modes of the scenario.
    TotalPower,
}

/// Eigenvalues of `M·Mᴴ` (or of `Mᴴ·M`, whichever is smaller), unclamped.
///
/// The smaller Gram matrix has the same nonzero spectrum; the missing
/// zeros contribute nothing to capacity.
pub fn gram_eigenvalues(m: MatRef<'_, Complex64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    let gram = if m.nrows() <= m.ncols() {
        m * m.adjoint()
    } else {
        m.adjoint() * m
    };
    gram.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::EigenFailure)
}

fn capacity_from_eigenvalues(eigs: &[f64], snr_per_mode: f64) -> f64 {
    eigs.iter()
        .map(|l| (snr_per_mode * l.max(0.0)).ln_1p())
        .sum::<f64>()
        / std::f64::consts::LN_2
}

/// `Σ_i log₂(1 + (snr/n_s)·λ_i(H̃·H̃ᴴ))` for one realisation.
pub fn logdet_capacity(h: &AngularChannel, snr: f64, n_s: usize) -> Result<f64> {
    if !(snr.is_finite() && snr >= 0.0) {
        return Err(invalid("snr", format!("must be nonnegative, got {snr}")));
    }
    if n_s == 0 {
        return Err(invalid("n_s", "must be at least 1"));
    }
    if h
        .matrix
        .col_iter()
        .any(|c| c.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())))
    {
        return Err(Error::NonFinite("channel matrix"));
    }
    let eigs = gram_eigenvalues(h.matrix.as_ref())?;
    Ok(capacity_from_eigenvalues(&eigs, snr / n_s as f64))
}

/// Which lattice harmonics the arrays can use.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ModeWindow {
    /// Every harmonic inside the noise-floor ellipse.
    Unbounded,
    /// Harmonics resolvable by a `λ/2`-spaced grid over the aperture.
    #[default]
    HalfWavelengthGrid,
    /// `|lx| ≤ .0`, `|ly| ≤ .1`.
    Explicit(i64, i64),
}

/// A point-to-point link in the wavenumber domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub rx_support: SpectralSupport,
    pub tx_support: SpectralSupport,
    pub rx_profile: VarianceProfile,
    pub tx_profile: VarianceProfile,
    pub snr: f64,
    pub rz: f64,
    pub sz: f64,
    pub normalization: PowerNormalization,
}

impl Scenario {
    pub fn new(
        rx_support: SpectralSupport,
        tx_support: SpectralSupport,
        rx_profile: VarianceProfile,
        tx_profile: VarianceProfile,
        snr: f64,
        rz: f64,
        sz: f64,
    ) -> Result<Self> {
        if rx_profile.len() != rx_support.len() || tx_profile.len() != tx_support.len() {
            return Err(Error::DimensionMismatch(
                "variance profile does not match its support".into(),
            ));
        }
        if rx_support.is_empty() || tx_support.is_empty() {
            return Err(Error::Empty("spectral support"));
        }
        if !(snr.is_finite() && snr >= 0.0) {
            return Err(invalid("snr", format!("must be nonnegative, got {snr}")));
        }
        for z in [rz, sz] {
            if z < 0.0 || z.is_nan() {
                return Err(Error::NegativeDistance(z));
            }
        }
        Ok(Self {
            rx_support,
            tx_support,
            rx_profile,
            tx_profile,
            snr,
            rz,
            sz,
            normalization: PowerNormalization::default(),
        })
    }

    /// Identical square-lattice arrays at distance `budget.distance()`, the
    /// annulus truncated at the budget's noise floor and restricted to
    /// `window`. The source plane is `sz = 0`.
    pub fn symmetric(
        aperture: &Aperture,
        radiation: &Radiation,
        budget: &LinkBudget,
        model: ProfileModel,
        window: ModeWindow,
    ) -> Result<Self> {
        let floor = kz_max(budget);
        let full = build_support(aperture, radiation, floor.kz_max)?;
        let support = match window {
            ModeWindow::Unbounded => full,
            ModeWindow::HalfWavelengthGrid => {
                let grid = AntennaGrid::half_wavelength(aperture, radiation, 0.0);
                let (hx, hy) = grid.resolvable_half_width();
                full.within_window(hx, hy)
            }
            ModeWindow::Explicit(hx, hy) => full.within_window(hx, hy),
        };
        let profile = variance_profile(&support, model)?;
        Self::new(
            support.clone(),
            support,
            profile.clone(),
            profile,
            budget.snr(),
            budget.distance(),
            0.0,
        )
    }

    pub fn with_normalization(mut self, normalization: PowerNormalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn with_snr(mut self, snr: f64) -> Self {
        self.snr = snr;
        self
    }

    /// Same link with every evanescent mode removed.
    pub fn far_field(&self) -> Scenario {
        Scenario {
            rx_support: self.rx_support.inner_only(),
            tx_support: self.tx_support.inner_only(),
            rx_profile: self.rx_profile.inner_only(),
            tx_profile: self.tx_profile.inner_only(),
            ..self.clone()
        }
    }

    /// `n_s` in the per-mode SNR `snr/n_s`.
    pub fn power_modes(&self) -> usize {
        match self.normalization {
            PowerNormalization::PerMode => self.tx_support.n_inner(),
            PowerNormalization::TotalPower => self.tx_support.len(),
        }
    }

    pub fn sigma(&self) -> Result<CoupledSigma> {
        couple_sigma(&self.rx_profile, &self.tx_profile)
    }

    /// Full shifted channel `H̃` for one seed.
    pub fn draw(&self, seed: u64) -> Result<AngularChannel> {
        let h = draw_angular(&self.sigma()?, seed);
        apply_shift(
            &h,
            &self.rx_support.gammas(),
            &self.tx_support.gammas(),
            self.rz,
            self.sz,
        )
    }

    fn region_indices(profile: &VarianceProfile, region: Region) -> Vec<usize> {
        (0..profile.len())
            .filter(|&i| profile.regions()[i] == region)
            .collect()
    }

    /// Spectrum of the Inner block of `H̃` for one seed.
    fn inner_spectrum(&self, seed: u64) -> Result<Vec<f64>> {
        let rows = Self::region_indices(&self.rx_profile, Region::Inner);
        let cols = Self::region_indices(&self.tx_profile, Region::Inner);
        let (ar, as_) = (self.rx_profile.amplitudes(), self.tx_profile.amplitudes());
        let w = white_block(
            rows.len(),
            cols.len(),
            seed,
            block_stream(Region::Inner, Region::Inner),
        );
        let block = Mat::from_fn(rows.len(), cols.len(), |a, b| {
            w[(a, b)] * (ar[rows[a]] * as_[cols[b]])
        });
        gram_eigenvalues(block.as_ref())
    }

    /// Spectrum of the shifted Outer block of `H̃` for one seed.
    fn outer_spectrum(&self, seed: u64) -> Result<Vec<f64>> {
        let rows = Self::region_indices(&self.rx_profile, Region::Outer);
        let cols = Self::region_indices(&self.tx_profile, Region::Outer);
        if rows.is_empty() || cols.is_empty() {
            return Ok(Vec::new());
        }
        let (ar, as_) = (self.rx_profile.amplitudes(), self.tx_profile.amplitudes());
        let (gr, gs) = (self.rx_support.gammas(), self.tx_support.gammas());
        let j = Complex64::i();
        let fr: Vec<Complex64> = rows
            .iter()
            .map(|&i| (j * gr[i] * self.rz).exp() * ar[i])
            .collect();
        let fs: Vec<Complex64> = cols
            .iter()
            .map(|&i| (-j * gs[i] * self.sz).exp() * as_[i])
            .collect();
        let w = white_block(
            rows.len(),
            cols.len(),
            seed,
            block_stream(Region::Outer, Region::Outer),
        );
        let block = Mat::from_fn(rows.len(), cols.len(), |a, b| fr[a] * w[(a, b)] * fs[b]);
        gram_eigenvalues(block.as_ref())
    }
}

fn check_trials(n_trials: usize) -> Result<()> {
    if n_trials == 0 {
        return Err(invalid("n_trials", "must be at least 1"));
    }
    Ok(())
}

fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed.wrapping_add(trial as u64)
}

/// Ergodic capacity of `scenario` over `n_trials` draws with seeds
/// `seed, seed + 1, …`.
pub fn ergodic_capacity(scenario: &Scenario, n_trials: usize, seed: u64) -> Result<CapacityEstimate> {
    check_trials(n_trials)?;
    let snr_per_mode = scenario.snr / scenario.power_modes().max(1) as f64;
    let trials = (0..n_trials)
        .map(|t| {
            let s = trial_seed(seed, t);
            let inner = scenario.inner_spectrum(s)?;
            let outer = scenario.outer_spectrum(s)?;
            Ok(capacity_from_eigenvalues(&inner, snr_per_mode)
                + capacity_from_eigenvalues(&outer, snr_per_mode))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(CapacityEstimate::from_trials(
        &trials,
        scenario.snr,
        scenario.tx_support.len(),
        scenario.rx_support.len(),
    ))
}

/// Capacity of the same link restricted to propagating modes.
pub fn far_field_baseline(
    scenario: &Scenario,
    n_trials: usize,
    seed: u64,
) -> Result<CapacityEstimate> {
    ergodic_capacity(&scenario.far_field(), n_trials, seed)
}

/// Relative capacity gain in percent with a standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Improvement {
    pub percent: f64,
    pub std_error: f64,
}

/// `100·(near − far)/far`, standard errors propagated as independent.
pub fn improvement(near: &CapacityEstimate, far: &CapacityEstimate) -> Result<Improvement> {
    if !(far.mean_bits > 0.0) {
        return Err(Error::NonPositiveBaseline(far.mean_bits));
    }
    let f = far.mean_bits;
    let n = near.mean_bits;
    let percent = 100.0 * (n - f) / f;
    let rel = ((near.std_error / f).powi(2) + (n * far.std_error / (f * f)).powi(2)).sqrt();
    Ok(Improvement {
        percent,
        std_error: 100.0 * rel,
    })
}

/// Near-field and far-field capacity from common seeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedComparison {
    pub far: CapacityEstimate,
    pub near: CapacityEstimate,
    /// Improvement with a standard error from the per-trial differences.
    pub improvement: Improvement,
}

/// Per-trial spectra of the propagating block, reusable across links that
/// share the Inner profiles (e.g. a distance sweep).
#[derive(Debug, Clone, PartialEq)]
pub struct InnerSpectra {
    seed: u64,
    rx_amplitudes: Vec<f64>,
    tx_amplitudes: Vec<f64>,
    trials: Vec<Vec<f64>>,
}

impl InnerSpectra {
    pub fn compute(scenario: &Scenario, n_trials: usize, seed: u64) -> Result<Self> {
        check_trials(n_trials)?;
        let trials = (0..n_trials)
            .map(|t| scenario.inner_spectrum(trial_seed(seed, t)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            seed,
            rx_amplitudes: scenario.rx_profile.inner_only().amplitudes(),
            tx_amplitudes: scenario.tx_profile.inner_only().amplitudes(),
            trials,
        })
    }

    /// Whether these spectra are the Inner spectra of `scenario` at `seed`.
    pub fn matches(&self, scenario: &Scenario, n_trials: usize, seed: u64) -> bool {
        self.seed == seed
            && self.trials.len() == n_trials
            && self.rx_amplitudes == scenario.rx_profile.inner_only().amplitudes()
            && self.tx_amplitudes == scenario.tx_profile.inner_only().amplitudes()
    }
}

/// Paired near/far comparison over `n_trials` common seeds.
pub fn paired_capacity(scenario: &Scenario, n_trials: usize, seed: u64) -> Result<PairedComparison> {
    let inner = InnerSpectra::compute(scenario, n_trials, seed)?;
    paired_capacity_with(scenario, &inner, n_trials, seed)
}

/// [`paired_capacity`] reusing precomputed Inner spectra.
pub fn paired_capacity_with(
    scenario: &Scenario,
    inner: &InnerSpectra,
    n_trials: usize,
    seed: u64,
) -> Result<PairedComparison> {
    check_trials(n_trials)?;
    if !inner.matches(scenario, n_trials, seed) {
        return Err(Error::DimensionMismatch(
            "precomputed inner spectra belong to a different link or seed".into(),
        ));
    }
    let far_scenario = scenario.far_field();
    let far_snr = scenario.snr / far_scenario.power_modes().max(1) as f64;
    let near_snr = scenario.snr / scenario.power_modes().max(1) as f64;

    let mut far = Vec::with_capacity(n_trials);
    let mut near = Vec::with_capacity(n_trials);
    for (t, inner_eigs) in inner.trials.iter().enumerate() {
        let outer_eigs = scenario.outer_spectrum(trial_seed(seed, t))?;
        far.push(capacity_from_eigenvalues(inner_eigs, far_snr));
        near.push(
            capacity_from_eigenvalues(inner_eigs, near_snr)
                + capacity_from_eigenvalues(&outer_eigs, near_snr),
        );
    }
    let far_est = CapacityEstimate::from_trials(
        &far,
        scenario.snr,
        far_scenario.tx_support.len(),
        far_scenario.rx_support.len(),
    );
    let near_est = CapacityEstimate::from_trials(
        &near,
        scenario.snr,
        scenario.tx_support.len(),
        scenario.rx_support.len(),
    );
    if !(far_est.mean_bits > 0.0) {
        return Err(Error::NonPositiveBaseline(far_est.mean_bits));
    }
    let diff: Vec<f64> = near.iter().zip(&far).map(|(n, f)| n - f).collect();
    let (mean_diff, _) = mean_and_se(&diff);
    let ratio = mean_diff / far_est.mean_bits;
    Ok(PairedComparison {
        far: far_est,
        near: near_est,
        improvement: Improvement {
            percent: 100.0 * ratio,
            std_error: 100.0 * ratio_std_error(&diff, &far, ratio),
        },
    })
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

// Delta-method standard error of mean(a)/mean(b) at ratio r.
fn ratio_std_error(a: &[f64], b: &[f64], r: f64) -> f64 {
    if a.len() < 2 {
        return 0.0;
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let var = a
        .iter()
        .zip(b)
        .map(|(x, y)| ((x - ma) - r * (y - mb)).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    (var / n).sqrt() / mb.abs()
}
