//! Closed-form degrees of freedom.
//!
//! Far-field DoF counts the lattice points in the radius-κ disk through its
//! area (`π·Lx·Ly/λ²` for a plane, twice that for a thin volume). Near the
//! source, evanescent components whose received power still exceeds the
//! noise floor enlarge the disk to radius `t = √(κ² + kz²)`, where
//!
//! ```text
//! kz = ln(P_send / P_noise) / (2z)
//! ```
//!
//! is the deepest decay constant that survives a distance `z`. The extra DoF
//! is the far-field DoF times the area ratio `(t² − κ²)/κ² = (kz/κ)²`.

use std::f64::consts::{LN_10, PI};

use crate::error::{invalid, Error, Result};
use crate::lattice::{Aperture, Radiation};

/// Transmit-to-noise power ratio, link distance and SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    power_ratio_db: f64,
    distance_z: f64,
    snr: f64,
}

impl LinkBudget {
    /// Budget from a power ratio `10·log₁₀(P_send/P_noise)` in dB and a
    /// distance in metres. The capacity SNR defaults to 10 dB.
    pub fn from_db(power_ratio_db: f64, distance_z: f64) -> Result<Self> {
        if !power_ratio_db.is_finite() {
            return Err(invalid("power_ratio_db", "must be finite"));
        }
        if !(distance_z.is_finite() && distance_z > 0.0) {
            return Err(invalid("distance_z", format!("must be positive, got {distance_z}")));
        }
        Ok(Self {
            power_ratio_db,
            distance_z,
            snr: 10.0,
        })
    }

    pub fn with_snr(mut self, snr: f64) -> Result<Self> {
        if !(snr.is_finite() && snr >= 0.0) {
            return Err(invalid("snr", format!("must be nonnegative, got {snr}")));
        }
        self.snr = snr;
        Ok(self)
    }

    pub fn with_snr_db(self, snr_db: f64) -> Result<Self> {
        self.with_snr(10f64.powf(snr_db / 10.0))
    }

    pub fn with_distance(self, distance_z: f64) -> Result<Self> {
        Ok(Self::from_db(self.power_ratio_db, distance_z)?.with_snr(self.snr)?)
    }

    pub fn power_ratio_db(&self) -> f64 {
        self.power_ratio_db
    }

    pub fn power_ratio_linear(&self) -> f64 {
        10f64.powf(self.power_ratio_db / 10.0)
    }

    /// `ln(P_send/P_noise)`, computed from the dB value without overflow.
    pub fn ln_power_ratio(&self) -> f64 {
        self.power_ratio_db * LN_10 / 10.0
    }

    pub fn distance(&self) -> f64 {
        self.distance_z
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }
}

/// Planar far-field DoF `η₂ = π·Lx·Ly/λ²`. `Lz` is ignored.
pub fn dof_planar(aperture: &Aperture, radiation: &Radiation) -> f64 {
    PI * aperture.lx() * aperture.ly() / radiation.wavelength().powi(2)
}

/// Volumetric far-field DoF `η₃ = 2π·Lx·Ly/λ²`.
///
/// Each harmonic contributes the two independent standing components
/// `e^{±jγz}`, so the count doubles but does not grow with `Lz`. Only
/// defined for thin volumes, `0 < Lz < min(Lx, Ly)`.
pub fn dof_volumetric(aperture: &Aperture, radiation: &Radiation) -> Result<f64> {
    let min_side = aperture.lx().min(aperture.ly());
    if aperture.lz() <= 0.0 || aperture.lz() >= min_side {
        return Err(Error::RegimeViolation(format!(
            "volumetric DoF needs 0 < Lz < min(Lx, Ly) = {min_side} m, got Lz = {} m",
            aperture.lz()
        )));
    }
    Ok(2.0 * dof_planar(aperture, radiation))
}

/// Rayleigh distance `2D²/λ`.
pub fn rayleigh_distance(max_dimension: f64, radiation: &Radiation) -> f64 {
    2.0 * max_dimension * max_dimension / radiation.wavelength()
}

/// Largest usable evanescent decay constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseFloor {
    /// `kz` in rad/m; zero when the budget is below the noise.
    pub kz_max: f64,
    /// Set when `P_send < P_noise`: no evanescent mode reaches the receiver.
    pub below_noise: bool,
}

/// `kz = ln(P_send/P_noise)/(2z)`, clamped to zero below the noise floor.
pub fn kz_max(budget: &LinkBudget) -> NoiseFloor {
    let ln_ratio = budget.ln_power_ratio();
    if ln_ratio < 0.0 {
        NoiseFloor {
            kz_max: 0.0,
            below_noise: true,
        }
    } else {
        NoiseFloor {
            kz_max: ln_ratio / (2.0 * budget.distance()),
            below_noise: false,
        }
    }
}

/// Far-field, evanescent and total DoF at one link budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DofReport {
    pub dof_far_field: f64,
    pub kz_max: f64,
    /// `(kz/κ)²`, the relative DoF gain.
    pub gain_fraction: f64,
    pub dof_evanescent: f64,
    pub dof_total: f64,
    pub below_noise: bool,
}

/// Relative evanescent gain `λ²·ln²(P_send/P_noise)/(4πz)²`.
pub fn gain_fraction(budget: &LinkBudget, radiation: &Radiation) -> f64 {
    let floor = kz_max(budget);
    if floor.below_noise {
        return 0.0;
    }
    let ln_ratio = budget.ln_power_ratio();
    (radiation.wavelength() * ln_ratio / (4.0 * PI * budget.distance())).powi(2)
}

/// Extra DoF contributed by evanescent waves on top of `dof_far_field`.
pub fn evanescent_dof(
    dof_far_field: f64,
    budget: &LinkBudget,
    radiation: &Radiation,
) -> Result<DofReport> {
    if !(dof_far_field.is_finite() && dof_far_field > 0.0) {
        return Err(invalid(
            "dof_far_field",
            format!("must be positive, got {dof_far_field}"),
        ));
    }
    let floor = kz_max(budget);
    let gain = gain_fraction(budget, radiation);
    Ok(DofReport {
        dof_far_field,
        kz_max: floor.kz_max,
        gain_fraction: gain,
        dof_evanescent: dof_far_field * gain,
        dof_total: dof_far_field * (1.0 + gain),
        below_noise: floor.below_noise,
    })
}

/// Power ratio (dB) at which the gain reaches `target` at distance `z`.
///
/// Solved by bisection on the gain formula, which is increasing in the
/// ratio above 0 dB. Returns the ratio to within `1e-9` dB.
pub fn power_ratio_for_gain(target: f64, distance_z: f64, radiation: &Radiation) -> Result<f64> {
    if !(target.is_finite() && target > 0.0) {
        return Err(invalid("target", format!("must be positive, got {target}")));
    }
    let gain_at = |db: f64| -> Result<f64> {
        Ok(gain_fraction(&LinkBudget::from_db(db, distance_z)?, radiation))
    };
    let mut lo = 0.0;
    let mut hi = 10.0;
    while gain_at(hi)? < target {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::RegimeViolation(format!(
                "gain {target} not reachable at z = {distance_z} m"
            )));
        }
    }
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if gain_at(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_link() -> (LinkBudget, Radiation) {
        (
            LinkBudget::from_db(125.56, 0.5).unwrap(),
            Radiation::from_frequency(3e9).unwrap(),
        )
    }

    #[test]
    fn planar_and_volumetric() {
        let r = Radiation::from_wavelength(0.1).unwrap();
        let a = Aperture::new(1.0, 1.0, 0.2).unwrap();
        assert!((dof_planar(&a, &r) - 314.159_265_358_979).abs() < 1e-9);
        assert!((dof_volumetric(&a, &r).unwrap() - 628.318_530_717_958).abs() < 1e-9);

        let cell = Aperture::square(0.1).unwrap();
        assert!((dof_planar(&cell, &r) - PI).abs() < 1e-12);

        let half = Radiation::from_wavelength(0.05).unwrap();
        let ratio = dof_planar(&a, &half) / dof_planar(&a, &r);
        assert!((ratio - 4.0).abs() < 1e-12);
    }

    #[test]
    fn volumetric_regime() {
        let r = Radiation::from_wavelength(0.1).unwrap();
        let thin = Aperture::new(1.0, 1.0, 0.1).unwrap();
        let thick = Aperture::new(1.0, 1.0, 0.3).unwrap();
        assert_eq!(
            dof_volumetric(&thin, &r).unwrap(),
            dof_volumetric(&thick, &r).unwrap()
        );
        assert!(matches!(
            dof_volumetric(&Aperture::new(1.0, 1.0, 1.0).unwrap(), &r),
            Err(Error::RegimeViolation(_))
        ));
        assert!(matches!(
            dof_volumetric(&Aperture::square(1.0).unwrap(), &r),
            Err(Error::RegimeViolation(_))
        ));
    }

    #[test]
    fn rayleigh() {
        let five_ghz = Radiation::from_frequency(5e9).unwrap();
        assert!((rayleigh_distance(1.0, &five_ghz) - 33.333).abs() < 1e-3);
        let r = Radiation::from_wavelength(0.1).unwrap();
        assert!((rayleigh_distance(0.5, &r) - 5.0).abs() < 1e-12);
        assert!((rayleigh_distance(1.0, &r) / rayleigh_distance(0.5, &r) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn kz_from_reference_link() {
        let (b, _) = reference_link();
        let f = kz_max(&b);
        assert!(!f.below_noise);
        assert!((f.kz_max - 28.911).abs() < 1e-3);

        let zero = LinkBudget::from_db(0.0, 3.0).unwrap();
        assert_eq!(kz_max(&zero).kz_max, 0.0);

        let far = b.with_distance(1.0).unwrap();
        assert!((kz_max(&far).kz_max * 2.0 - f.kz_max).abs() < 1e-12);
    }

    #[test]
    fn below_noise_is_flagged_not_an_error() {
        let r = Radiation::from_frequency(3e9).unwrap();
        let b = LinkBudget::from_db(-3.0, 0.5).unwrap();
        let f = kz_max(&b);
        assert!(f.below_noise);
        assert_eq!(f.kz_max, 0.0);
        let rep = evanescent_dof(10.0, &b, &r).unwrap();
        assert_eq!(rep.gain_fraction, 0.0);
        assert!(rep.below_noise);
    }

    #[test]
    fn gain_at_reference_link() {
        let (b, r) = reference_link();
        let rep = evanescent_dof(100.0, &b, &r).unwrap();
        assert!((rep.gain_fraction - 0.21172).abs() / 0.21172 < 1e-4);
        let kz_form = (rep.kz_max / r.wavenumber()).powi(2);
        assert!((rep.gain_fraction - kz_form).abs() <= 1e-15 * kz_form.max(1.0));
        assert!((rep.dof_total - 100.0 * (1.0 + rep.gain_fraction)).abs() < 1e-12);

        let at_rayleigh = evanescent_dof(100.0, &b.with_distance(5.0).unwrap(), &r).unwrap();
        assert!((at_rayleigh.gain_fraction / rep.gain_fraction - 0.01).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_far_field_dof() {
        let (b, r) = reference_link();
        assert!(evanescent_dof(0.0, &b, &r).is_err());
    }

    #[test]
    fn crossing_thirty_percent() {
        let (_, r) = reference_link();
        let db = power_ratio_for_gain(0.30, 0.5, &r).unwrap();
        assert!((db - 149.46).abs() < 0.01, "{db}");
    }
}
