use faer::Mat;
use num_complex::Complex64;

use super::CoupledSigma;
use crate::error::{Error, Result};
use crate::lattice::{Aperture, Radiation, Region, SpectralSupport};
use crate::rng;

/// Complex `n_r × n_s` matrix coupling source harmonics to receive harmonics.
///
/// `shifted == false` is the angular matrix `H_a`; `true` is
/// `H̃ = e^{jΓ_r}·H_a·e^{−jΓ_s}` after propagation to the planes `rz`, `sz`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularChannel {
    pub matrix: Mat<Complex64>,
    pub shifted: bool,
    pub rz: f64,
    pub sz: f64,
}

impl AngularChannel {
    pub fn unshifted(matrix: Mat<Complex64>) -> Self {
        Self {
            matrix,
            shifted: false,
            rz: 0.0,
            sz: 0.0,
        }
    }
}

// RNG stream per (receive region, source region) block, so that the
// propagating block is identical whether or not evanescent modes exist.
pub(crate) fn block_stream(row: Region, col: Region) -> u64 {
    match (row, col) {
        (Region::Inner, Region::Inner) => 0,
        (Region::Outer, Region::Outer) => 1,
        (Region::Inner, Region::Outer) => 2,
        (Region::Outer, Region::Inner) => 3,
    }
}

/// Row-major white complex Gaussian block on one RNG stream.
pub(crate) fn white_block(rows: usize, cols: usize, seed: u64, stream: u64) -> Mat<Complex64> {
    let mut rng = rng::stream(seed, stream);
    let mut m = Mat::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = rng::complex_gaussian(&mut rng);
        }
    }
    m
}

/// Draw `H_a = Σ ⊙ W` with `W` i.i.d. `CN(0, 1)`; deterministic in `seed`.
///
/// Each region block of `W` comes from its own random stream and is filled
/// row-major over the rows and columns of that block.
pub fn draw_angular(sigma: &CoupledSigma, seed: u64) -> AngularChannel {
    let (nr, ns) = (sigma.nrows(), sigma.ncols());
    let s = sigma.matrix();
    let mut h = Mat::zeros(nr, ns);
    for row_region in [Region::Inner, Region::Outer] {
        let rows: Vec<usize> = (0..nr)
            .filter(|&i| sigma.row_regions()[i] == row_region)
            .collect();
        for col_region in [Region::Inner, Region::Outer] {
            let cols: Vec<usize> = (0..ns)
                .filter(|&j| sigma.col_regions()[j] == col_region)
                .collect();
            let live = rows
                .iter()
                .any(|&i| cols.iter().any(|&j| s[(i, j)] != 0.0));
            if !live {
                continue;
            }
            let w = white_block(
                rows.len(),
                cols.len(),
                seed,
                block_stream(row_region, col_region),
            );
            for (bi, &i) in rows.iter().enumerate() {
                for (bj, &j) in cols.iter().enumerate() {
                    h[(i, j)] = w[(bi, bj)] * s[(i, j)];
                }
            }
        }
    }
    AngularChannel::unshifted(h)
}

/// Propagate to the receive plane `rz` and source plane `sz`:
/// `H̃[i, j] = e^{jγ_r(i)·rz}·H_a[i, j]·e^{−jγ_s(j)·sz}`.
///
/// Propagating modes pick up pure phases; evanescent receive modes are
/// attenuated by `e^{−Im γ·rz}`.
pub fn apply_shift(
    h: &AngularChannel,
    gamma_r: &[Complex64],
    gamma_s: &[Complex64],
    rz: f64,
    sz: f64,
) -> Result<AngularChannel> {
    for z in [rz, sz] {
        if z < 0.0 || z.is_nan() {
            return Err(Error::NegativeDistance(z));
        }
    }
    let (nr, ns) = (h.matrix.nrows(), h.matrix.ncols());
    if gamma_r.len() != nr || gamma_s.len() != ns {
        return Err(Error::DimensionMismatch(format!(
            "shift of a {nr}x{ns} channel with {} receive and {} source wavenumbers",
            gamma_r.len(),
            gamma_s.len()
        )));
    }
    let j = Complex64::i();
    let fr: Vec<Complex64> = gamma_r.iter().map(|g| (j * g * rz).exp()).collect();
    let fs: Vec<Complex64> = gamma_s.iter().map(|g| (-j * g * sz).exp()).collect();
    Ok(AngularChannel {
        matrix: Mat::from_fn(nr, ns, |a, b| fr[a] * h.matrix[(a, b)] * fs[b]),
        shifted: true,
        rz,
        sz,
    })
}

/// Antenna or field sample position in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

/// Rectangular antenna grid covering one period of the aperture.
#[derive(Debug, Clone, PartialEq)]
pub struct AntennaGrid {
    pub nx: usize,
    pub ny: usize,
    /// Row-major: index `row·nx + col`, rows along `y`.
    pub positions: Vec<Position>,
}

impl AntennaGrid {
    /// Grid with spacing at most `λ/2`: `⌊2L/λ⌋ + 1` equispaced elements on
    /// `[0, L)` per axis, at height `z`.
    pub fn half_wavelength(aperture: &Aperture, radiation: &Radiation, z: f64) -> Self {
        let count = |len: f64| (2.0 * len / radiation.wavelength() + 1e-9).floor() as usize + 1;
        Self::regular(aperture, count(aperture.lx()), count(aperture.ly()), z)
    }

    /// `nx × ny` equispaced elements on `[0, Lx) × [0, Ly)`.
    pub fn regular(aperture: &Aperture, nx: usize, ny: usize, z: f64) -> Self {
        let (dx, dy) = (aperture.lx() / nx as f64, aperture.ly() / ny as f64);
        let positions = (0..ny)
            .flat_map(|r| (0..nx).map(move |c| Position::new(c as f64 * dx, r as f64 * dy, z)))
            .collect();
        Self { nx, ny, positions }
    }

    /// Largest `|lx|`, `|ly|` whose harmonics the grid resolves without
    /// aliasing.
    pub fn resolvable_half_width(&self) -> (i64, i64) {
        (((self.nx - 1) / 2) as i64, ((self.ny - 1) / 2) as i64)
    }
}

/// Fourier harmonics matrix `Φ[p, i] = e^{j(kx_i·x_p + ky_i·y_p)}/√N`.
pub fn harmonics_matrix(support: &SpectralSupport, positions: &[Position]) -> Mat<Complex64> {
    let norm = 1.0 / (positions.len() as f64).sqrt();
    let pts = support.points();
    Mat::from_fn(positions.len(), pts.len(), |p, i| {
        let phase = pts[i].kx * positions[p].x + pts[i].ky * positions[p].y;
        Complex64::from_polar(norm, phase)
    })
}

/// Spatial channel `H = Φ_r·H̃·Φ_sᴴ` between antenna positions.
///
/// The longitudinal factors `e^{jγz}` already live in `H̃`; `Φ` carries only
/// the transverse harmonics.
pub fn spatial_channel(
    h_tilde: &AngularChannel,
    rx_support: &SpectralSupport,
    tx_support: &SpectralSupport,
    rx_positions: &[Position],
    tx_positions: &[Position],
) -> Result<Mat<Complex64>> {
    if rx_positions.is_empty() || tx_positions.is_empty() {
        return Err(Error::Empty("antenna positions"));
    }
    if h_tilde.matrix.nrows() != rx_support.len() || h_tilde.matrix.ncols() != tx_support.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} channel for {} receive and {} source harmonics",
            h_tilde.matrix.nrows(),
            h_tilde.matrix.ncols(),
            rx_support.len(),
            tx_support.len()
        )));
    }
    let phi_r = harmonics_matrix(rx_support, rx_positions);
    let phi_s = harmonics_matrix(tx_support, tx_positions);
    Ok(&phi_r * &h_tilde.matrix * phi_s.adjoint())
}
