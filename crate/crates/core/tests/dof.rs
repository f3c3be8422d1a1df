use std::f64::consts::PI;

use hmimo::dof::{
    dof_planar, dof_volumetric, evanescent_dof, gain_fraction, kz_max, power_ratio_for_gain,
    rayleigh_distance, LinkBudget,
};
use hmimo::lattice::{Aperture, Radiation};
use proptest::prelude::*;

fn reference_link() -> (Radiation, LinkBudget) {
    (
        Radiation::from_frequency(3e9).unwrap(),
        LinkBudget::from_db(125.56, 0.5).unwrap(),
    )
}

// ln(10^(dB/10)) / (2z) written out from scratch.
fn kz_oracle(db: f64, z: f64) -> f64 {
    db / 10.0 * 10f64.ln() / (2.0 * z)
}

#[test]
fn reference_link_noise_floor_and_gain() {
    let (r, b) = reference_link();
    let kz = kz_max(&b).kz_max;
    assert!((kz - 28.911).abs() < 5e-4);
    assert!((kz - kz_oracle(125.56, 0.5)).abs() < 1e-12);
    let g = gain_fraction(&b, &r);
    assert!((g / (kz / r.wavenumber()).powi(2) - 1.0).abs() < 1e-12);
    assert!((g / 0.211726 - 1.0).abs() < 5e-6);
}

#[test]
fn reference_link_far_field_quantities() {
    let r = Radiation::from_frequency(3e9).unwrap();
    let a = Aperture::square(0.5).unwrap();
    assert!((dof_planar(&a, &r) - PI * 25.0).abs() < 1e-9);
    assert!((rayleigh_distance(0.5, &r) - 5.0).abs() < 1e-12);
    let thick = Aperture::new(0.5, 0.5, 0.1).unwrap();
    assert!((dof_volumetric(&thick, &r).unwrap() - 2.0 * PI * 25.0).abs() < 1e-9);
    assert!(dof_volumetric(&Aperture::new(0.5, 0.5, 0.6).unwrap(), &r).is_err());
}

#[test]
fn thirty_percent_crossing() {
    let (r, _) = reference_link();
    let db = power_ratio_for_gain(0.30, 0.5, &r).unwrap();
    // (kz/κ)² = 0.3 → ln ρ = 2z·κ·√0.3.
    let oracle = 10.0 * (2.0 * 0.5 * r.wavenumber() * 0.3f64.sqrt()) / 10f64.ln();
    assert!((db - oracle).abs() < 1e-6);
    assert!((db - 149.5).abs() < 0.1);
}

#[test]
fn below_noise_gives_no_gain() {
    let (r, _) = reference_link();
    let b = LinkBudget::from_db(-3.0, 0.5).unwrap();
    let rep = evanescent_dof(78.5, &b, &r).unwrap();
    assert!(rep.below_noise);
    assert_eq!((rep.kz_max, rep.gain_fraction, rep.dof_evanescent), (0.0, 0.0, 0.0));
}

proptest! {
    #[test]
    fn inverse_square_law(db in 1.0f64..200.0, z in 0.01f64..10.0, s in 1.1f64..20.0) {
        let r = Radiation::from_frequency(3e9).unwrap();
        let near = gain_fraction(&LinkBudget::from_db(db, z).unwrap(), &r);
        let far = gain_fraction(&LinkBudget::from_db(db, z * s).unwrap(), &r);
        prop_assert!(far < near);
        prop_assert!((far * s * s / near - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gain_grows_with_power(a in 0.0f64..200.0, d in 0.01f64..50.0, z in 0.01f64..5.0) {
        let r = Radiation::from_frequency(9e8).unwrap();
        let lo = gain_fraction(&LinkBudget::from_db(a, z).unwrap(), &r);
        let hi = gain_fraction(&LinkBudget::from_db(a + d, z).unwrap(), &r);
        prop_assert!(hi > lo);
    }

    #[test]
    fn report_is_consistent(far in 1.0f64..1e4, db in 0.0f64..200.0, z in 0.01f64..5.0) {
        let r = Radiation::from_frequency(3e9).unwrap();
        let rep = evanescent_dof(far, &LinkBudget::from_db(db, z).unwrap(), &r).unwrap();
        prop_assert!((rep.dof_total - rep.dof_far_field - rep.dof_evanescent).abs() < 1e-9 * rep.dof_total);
        prop_assert!((rep.dof_evanescent - far * rep.gain_fraction).abs() < 1e-9 * far.max(1.0));
        prop_assert!((rep.kz_max - kz_oracle(db, z)).abs() < 1e-9 * rep.kz_max.max(1.0));
    }

    #[test]
    fn crossing_inverts_gain(target in 0.01f64..2.0, z in 0.05f64..5.0) {
        let r = Radiation::from_frequency(3e9).unwrap();
        let db = power_ratio_for_gain(target, z, &r).unwrap();
        let g = gain_fraction(&LinkBudget::from_db(db, z).unwrap(), &r);
        prop_assert!((g / target - 1.0).abs() < 1e-8);
    }
}
