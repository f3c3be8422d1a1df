use std::collections::HashSet;
use std::f64::consts::PI;

use hmimo::lattice::{build_support, gamma, Aperture, Radiation, Region};
use proptest::prelude::*;

// Count integer pairs inside the ellipses directly in wavenumber space.
fn brute_force(lx_len: f64, ly_len: f64, lambda: f64, kz: f64) -> (usize, usize) {
    let kappa = 2.0 * PI / lambda;
    let outer2 = kappa * kappa + kz * kz;
    let tol = 1e-9 * outer2;
    let reach = (outer2.sqrt() * lx_len.max(ly_len) / (2.0 * PI)).ceil() as i64 + 1;
    let (mut inner, mut outer) = (0, 0);
    for a in -reach..=reach {
        for b in -reach..=reach {
            let kx = 2.0 * PI * a as f64 / lx_len;
            let ky = 2.0 * PI * b as f64 / ly_len;
            let k2 = kx * kx + ky * ky;
            if k2 <= kappa * kappa + tol {
                inner += 1;
            } else if k2 <= outer2 + tol {
                outer += 1;
            }
        }
    }
    (inner, outer)
}

#[test]
fn ten_wavelength_square_has_317_propagating_points() {
    let r = Radiation::from_wavelength(0.1).unwrap();
    let s = build_support(&Aperture::square(1.0).unwrap(), &r, 0.0).unwrap();
    assert_eq!(s.n_inner(), 317);
    assert_eq!(brute_force(1.0, 1.0, 0.1, 0.0).0, 317);
}

#[test]
fn reference_link_support_counts_match_brute_force() {
    let r = Radiation::from_frequency(3e9).unwrap();
    let a = Aperture::square(0.5).unwrap();
    let kz = 28.911;
    let s = build_support(&a, &r, kz).unwrap();
    assert_eq!((s.n_inner(), s.n_outer()), brute_force(0.5, 0.5, 0.1, kz));
}

#[test]
fn supports_are_symmetric_and_row_major() {
    let r = Radiation::from_wavelength(0.1).unwrap();
    let s = build_support(&Aperture::planar(0.73, 0.41).unwrap(), &r, 30.0).unwrap();
    let set: HashSet<(i64, i64)> = s.points().iter().map(|p| (p.lx, p.ly)).collect();
    for p in s.points() {
        assert!(set.contains(&(-p.lx, p.ly)));
        assert!(set.contains(&(p.lx, -p.ly)));
    }
    let keys: Vec<_> = s.points().iter().map(|p| (p.lx, p.ly)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn inner_density_approaches_disk_area() {
    // n_inner / (π (L/λ)²) → 1 as the aperture grows.
    let r = Radiation::from_wavelength(1.0).unwrap();
    let mut last = f64::INFINITY;
    for side in [5.0, 20.0, 80.0] {
        let s = build_support(&Aperture::square(side).unwrap(), &r, 0.0).unwrap();
        let err = (s.n_inner() as f64 / (PI * side * side) - 1.0).abs();
        assert!(err < 2.0 / side, "side {side}: {err}");
        assert!(err <= last + 1e-3);
        last = err;
    }
}

#[test]
fn lattice_gain_tracks_continuum_ratio() {
    let r = Radiation::from_wavelength(0.1).unwrap();
    let s = build_support(&Aperture::square(1.0).unwrap(), &r, 0.46013 * r.wavenumber()).unwrap();
    let summary = s.count_summary().unwrap();
    let continuum = 0.46013f64.powi(2);
    assert!((summary.lattice_gain - continuum).abs() <= 4.0 / (summary.n_inner as f64).sqrt());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn counts_match_brute_force(lx in 0.05f64..0.9, ly in 0.05f64..0.9, kz in 0.0f64..80.0) {
        let r = Radiation::from_wavelength(0.1).unwrap();
        let s = build_support(&Aperture::planar(lx, ly).unwrap(), &r, kz).unwrap();
        prop_assert_eq!((s.n_inner(), s.n_outer()), brute_force(lx, ly, 0.1, kz));
    }

    #[test]
    fn supports_nest_in_kz(side in 0.1f64..0.8, a in 0.0f64..60.0, b in 0.0f64..60.0) {
        let r = Radiation::from_wavelength(0.1).unwrap();
        let ap = Aperture::square(side).unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        let small = build_support(&ap, &r, lo).unwrap();
        let big = build_support(&ap, &r, hi).unwrap();
        let set: HashSet<(i64, i64)> = big.points().iter().map(|p| (p.lx, p.ly)).collect();
        prop_assert!(small.points().iter().all(|p| set.contains(&(p.lx, p.ly))));
        prop_assert_eq!(small.n_inner(), big.n_inner());
    }

    #[test]
    fn every_point_solves_the_dispersion_relation(side in 0.1f64..0.8, kz in 0.0f64..60.0) {
        let r = Radiation::from_wavelength(0.1).unwrap();
        let kappa = r.wavenumber();
        let s = build_support(&Aperture::square(side).unwrap(), &r, kz).unwrap();
        for p in s.points() {
            let g2 = p.gamma * p.gamma;
            let resid = p.kx * p.kx + p.ky * p.ky + g2.re - kappa * kappa;
            prop_assert!(resid.abs() < 1e-9 * kappa * kappa);
            prop_assert!(g2.im.abs() < 1e-9 * kappa * kappa);
            match p.region {
                Region::Inner => prop_assert!(p.gamma.im == 0.0 && p.gamma.re >= 0.0),
                Region::Outer => prop_assert!(p.gamma.re == 0.0 && p.gamma.im > 0.0),
            }
        }
    }

    #[test]
    fn gamma_branch_decays(kx in -300.0f64..300.0, ky in -300.0f64..300.0) {
        let g = gamma(kx, ky, 62.8);
        prop_assert!(g.re >= 0.0 && g.im >= 0.0);
        prop_assert!((hmimo::Complex64::i() * g * 1.0).exp().norm() <= 1.0 + 1e-15);
    }
}
