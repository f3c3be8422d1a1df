use std::f64::consts::{FRAC_PI_2, PI};

use hmimo::lattice::{build_support, Aperture, Radiation, Region, SpectralSupport};
use hmimo::synthesis::{
    apply_shift, couple_sigma, draw_angular, estimate_autocorrelation, harmonics_matrix,
    sample_field, spatial_channel, variance_profile, AntennaGrid, FieldSampler, Lag, Position,
    ProfileModel, VarianceProfile,
};
use hmimo::Complex64;

fn support(side_wl: f64, kz_over_kappa: f64) -> (Radiation, SpectralSupport) {
    let r = Radiation::from_wavelength(0.1).unwrap();
    let s = build_support(
        &Aperture::square(side_wl * 0.1).unwrap(),
        &r,
        kz_over_kappa * r.wavenumber(),
    )
    .unwrap();
    (r, s)
}

#[test]
fn hadamard_power_matches_sigma_squared() {
    let (_, s) = support(1.0, 0.5);
    let s = s.subset(|p| p.lx == 0);
    let sigma2: Vec<f64> = (0..s.len()).map(|i| 0.5 + i as f64).collect();
    let p = VarianceProfile::from_variances(&s, sigma2).unwrap();
    let sigma = couple_sigma(&p, &p).unwrap();
    let n = 100_000;
    let (nr, ns) = (sigma.nrows(), sigma.ncols());
    let mut sum = vec![0.0; nr * ns];
    let mut sum2 = vec![0.0; nr * ns];
    for seed in 0..n {
        let h = draw_angular(&sigma, seed);
        for i in 0..nr {
            for j in 0..ns {
                let v = h.matrix[(i, j)].norm_sqr();
                sum[i * ns + j] += v;
                sum2[i * ns + j] += v * v;
            }
        }
    }
    for i in 0..nr {
        for j in 0..ns {
            let target = sigma.matrix()[(i, j)].powi(2);
            let m = sum[i * ns + j] / n as f64;
            let var = sum2[i * ns + j] / n as f64 - m * m;
            let se = (var / n as f64).sqrt();
            if target == 0.0 {
                assert_eq!(m, 0.0);
            } else {
                assert!((m - target).abs() <= 3.0 * se, "({i},{j}) {m} vs {target}");
            }
        }
    }
}

#[test]
fn cross_region_entries_vanish_and_rank_is_at_most_two() {
    let (_, s) = support(3.0, 0.6);
    let p = variance_profile(&s, ProfileModel::Isotropic).unwrap();
    let sigma = couple_sigma(&p, &p).unwrap();
    let m = sigma.matrix();
    let regions = s.regions();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if regions[i] != regions[j] {
                assert_eq!(m[(i, j)], 0.0);
            }
        }
    }
    let sv = m.singular_values().unwrap();
    let tol = 1e-12 * sv[0];
    assert!(sv.iter().filter(|v| **v > tol).count() <= 2);
}

#[test]
fn outer_modes_decay_with_distance() {
    let (_, s) = support(2.0, 0.8);
    let p = variance_profile(&s, ProfileModel::Uniform).unwrap();
    let h = draw_angular(&couple_sigma(&p, &p).unwrap(), 3);
    let g = s.gammas();
    let mut last = vec![1.0; s.len()];
    for rz in [0.0, 0.01, 0.05, 0.2] {
        let t = apply_shift(&h, &g, &g, rz, 0.0).unwrap();
        for (i, pt) in s.points().iter().enumerate() {
            let ratio = t.matrix[(i, i)].norm() / h.matrix[(i, i)].norm();
            match pt.region {
                Region::Inner => assert!((ratio - 1.0).abs() < 1e-12),
                Region::Outer => {
                    assert!((ratio - (-pt.gamma.im * rz).exp()).abs() < 1e-12);
                    assert!(ratio <= last[i] && (rz == 0.0 || ratio < last[i]));
                }
            }
            last[i] = ratio;
        }
    }
}

#[test]
fn plane_waves_satisfy_helmholtz() {
    let (r, s) = support(2.0, 0.7);
    let kappa = r.wavenumber();
    let wave = |pt: &hmimo::lattice::WavenumberPoint, x: f64, y: f64, z: f64| {
        (Complex64::i() * (pt.kx * x + pt.ky * y) + Complex64::i() * pt.gamma * z).exp()
    };
    let (x, y, z) = (0.013, -0.021, 0.004);
    for h in [1e-3, 5e-4] {
        let mut worst: f64 = 0.0;
        for pt in s.points() {
            let c = wave(pt, x, y, z);
            let lap = (wave(pt, x + h, y, z) + wave(pt, x - h, y, z)
                + wave(pt, x, y + h, z)
                + wave(pt, x, y - h, z)
                + wave(pt, x, y, z + h)
                + wave(pt, x, y, z - h)
                - c * 6.0)
                / (h * h);
            let resid = (lap + c * kappa * kappa).norm() / c.norm();
            worst = worst.max(resid / (kappa * kappa));
        }
        // Second-order stencil: relative residual ~ (k h)² / 12.
        let bound = 4.0 * (kappa * h).powi(2) / 12.0;
        assert!(worst < bound, "h = {h}: {worst} vs {bound}");
    }
}

#[test]
fn half_wavelength_grid_is_nearly_semi_unitary() {
    let (r, s) = support(5.0, 0.0);
    let a = Aperture::square(0.5).unwrap();
    let grid = AntennaGrid::half_wavelength(&a, &r, 0.0);
    assert!(grid.positions.len() >= s.len());
    let phi = harmonics_matrix(&s, &grid.positions);
    let g = phi.adjoint() * &phi;
    for i in 0..s.len() {
        for j in 0..s.len() {
            let target = if i == j { 1.0 } else { 0.0 };
            assert!((g[(i, j)] - target).norm() < 0.05, "({i},{j}) {}", g[(i, j)]);
        }
    }
}

#[test]
fn spatial_channel_is_periodic_in_the_aperture() {
    let (_, s) = support(3.0, 0.5);
    let p = variance_profile(&s, ProfileModel::Uniform).unwrap();
    let h = draw_angular(&couple_sigma(&p, &p).unwrap(), 11);
    let rx: Vec<Position> = (0..7)
        .map(|i| Position::new(0.03 * i as f64, 0.017 * i as f64, 0.0))
        .collect();
    let shifted: Vec<Position> = rx.iter().map(|q| Position::new(q.x + 0.3, q.y, q.z)).collect();
    let tx = [Position::new(0.1, 0.2, 0.0), Position::new(0.05, 0.0, 0.0)];
    let a = spatial_channel(&h, &s, &s, &rx, &tx).unwrap();
    let b = spatial_channel(&h, &s, &s, &shifted, &tx).unwrap();
    for i in 0..rx.len() {
        for j in 0..tx.len() {
            assert!((a[(i, j)].norm() - b[(i, j)].norm()).abs() < 1e-9);
        }
    }
    assert!(spatial_channel(&h, &s, &s, &[], &tx).is_err());
}

// Midpoint-rule integral of 1/√(κ² − k²) over the square cell of (lx, ly),
// on a Cartesian grid fine enough that the integrand is smooth there.
fn cell_oracle(kappa: f64, dk: f64, lx: i64, ly: i64) -> f64 {
    let n = 800;
    let h = dk / n as f64;
    let mut sum = 0.0;
    for a in 0..n {
        for b in 0..n {
            let kx = (lx as f64 - 0.5) * dk + (a as f64 + 0.5) * h;
            let ky = (ly as f64 - 0.5) * dk + (b as f64 + 0.5) * h;
            let d = kappa * kappa - kx * kx - ky * ky;
            assert!(d > 0.0);
            sum += h * h / d.sqrt();
        }
    }
    sum
}

#[test]
fn isotropic_weights_follow_cell_integrals() {
    let (r, s) = support(10.0, 0.0);
    let p = variance_profile(&s, ProfileModel::Isotropic).unwrap();
    let kappa = r.wavenumber();
    let dk = 2.0 * PI / 1.0;
    let at = |lx, ly| {
        s.points()
            .iter()
            .position(|q| (q.lx, q.ly) == (lx, ly))
            .unwrap()
    };
    let v = p.variances();
    let (c, mid, edge) = (v[at(0, 0)], v[at(9, 0)], v[at(10, 0)]);
    let oracle = cell_oracle(kappa, dk, 9, 0) / cell_oracle(kappa, dk, 0, 0);
    assert!((mid / c / oracle - 1.0).abs() < 0.01, "{} vs {oracle}", mid / c);
    assert!(edge > mid && mid > c);
}

#[test]
fn isotropic_total_matches_hemisphere_integral() {
    // ∫∫_disk dk/γ = 2πκ, the solid-angle measure of the hemisphere.
    let (r, s) = support(6.0, 0.0);
    let p = variance_profile(&s, ProfileModel::Isotropic).unwrap();
    let kappa = r.wavenumber();
    let dk = 2.0 * PI / 0.6;
    let cell = cell_oracle(kappa, dk, 0, 0);
    let total = p.inner_power() / p.variances()[s.len() / 2] * cell;
    assert!((total / (2.0 * PI * kappa) - 1.0).abs() < 0.01);
}

#[test]
fn field_has_zero_mean_and_unit_variance() {
    let (_, s) = support(6.0, 0.0);
    let p = variance_profile(&s, ProfileModel::Isotropic).unwrap();
    let grid = [Position::new(0.0, 0.0, 0.0), Position::new(0.21, 0.37, 0.0)];
    let sampler = FieldSampler::new(&s, &p, &grid).unwrap();
    let n = 10_000;
    for k in 0..grid.len() {
        let vals: Vec<Complex64> = (0..n).map(|seed| sampler.sample(seed).values[k]).collect();
        let mean = vals.iter().sum::<Complex64>() / n as f64;
        let pw: Vec<f64> = vals.iter().map(|v| v.norm_sqr()).collect();
        let m2 = pw.iter().sum::<f64>() / n as f64;
        let se2 = (pw.iter().map(|x| (x - m2).powi(2)).sum::<f64>() / (n - 1) as f64 / n as f64).sqrt();
        let se_mean = (m2 / 2.0 / n as f64).sqrt();
        assert!(mean.re.abs() < 3.0 * se_mean && mean.im.abs() < 3.0 * se_mean);
        assert!((m2 - 1.0).abs() < 3.0 * se2, "variance {m2} ± {se2}");
    }
}

#[test]
fn field_draws_are_reproducible() {
    let (_, s) = support(2.0, 0.5);
    let p = variance_profile(&s, ProfileModel::Uniform).unwrap();
    let grid = [Position::new(0.01, 0.02, 0.03)];
    let a = sample_field(&s, &p, &grid, 9).unwrap();
    let b = sample_field(&s, &p, &grid, 9).unwrap();
    assert_eq!(a, b);
}

#[test]
fn autocorrelation_follows_sinc_at_short_lags() {
    let (r, s) = support(10.0, 0.0);
    let p = variance_profile(&s, ProfileModel::Isotropic).unwrap();
    let step = r.wavelength() / 4.0;
    let grid: Vec<Position> = (0..5)
        .flat_map(|i| (0..5).map(move |j| Position::new(i as f64 * step, j as f64 * step, 0.0)))
        .collect();
    let sampler = FieldSampler::new(&s, &p, &grid).unwrap();
    let fields: Vec<_> = (0..2000).map(|seed| sampler.sample(seed)).collect();
    let lags = [Lag::new(0.0, 0.0, 0.0), Lag::new(step, 0.0, 0.0), Lag::new(0.0, 2.0 * step, 0.0)];
    let est = estimate_autocorrelation(&fields, &lags).unwrap();
    let kappa = r.wavenumber();
    for e in &est {
        let d = (e.lag.dx.powi(2) + e.lag.dy.powi(2)).sqrt();
        let target = if d == 0.0 { 1.0 } else { (kappa * d).sin() / (kappa * d) };
        // The 10λ lattice biases the estimate by a few thousandths.
        assert!(
            (e.value.re - target).abs() <= 3.0 * e.std_error_re + 0.01,
            "lag {d}: {} vs {target}",
            e.value.re
        );
    }
    assert!((est[1].value.re - 1.0 / FRAC_PI_2).abs() < 0.05);
}

#[test]
fn evanescent_part_vanishes_far_from_the_plane() {
    let (_, s) = support(4.0, 1.0);
    let with_outer = variance_profile(&s, ProfileModel::Uniform).unwrap();
    let sigma2 = s
        .regions()
        .iter()
        .map(|r| if *r == Region::Outer { 0.0 } else { 1.0 })
        .collect();
    let without = VarianceProfile::from_variances(&s, sigma2).unwrap();
    let field = |p: &VarianceProfile, z: f64| {
        sample_field(&s, p, &[Position::new(0.02, 0.01, z)], 5).unwrap().values[0]
    };
    let gap = |z| (field(&with_outer, z) - field(&without, z)).norm();
    let slowest = s
        .points()
        .iter()
        .filter(|p| p.region == Region::Outer)
        .map(|p| p.gamma.im)
        .fold(f64::INFINITY, f64::min);
    let z = 25.0 / slowest;
    assert!(gap(0.0) > 0.1);
    assert!(gap(z) < 1e-9 * s.n_outer() as f64 * gap(0.0).max(1.0));
}
