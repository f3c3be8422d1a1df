//! Random channel and field synthesis in the wavenumber domain.
//!
//! The angular channel `H_a = Σ ⊙ W` couples source harmonics to receive
//! harmonics with i.i.d. complex Gaussian `W` and a separable amplitude
//! matrix `Σ`. Propagation to the antenna planes multiplies by
//! `e^{jγz}` per harmonic ([`apply_shift`]); the spatial channel follows by
//! projecting onto Fourier harmonics ([`spatial_channel`]).

mod angular;
mod field;
mod profile;
mod sigma;

pub use angular::{
    apply_shift, draw_angular, harmonics_matrix, spatial_channel, AngularChannel, AntennaGrid,
    Position,
};
pub(crate) use angular::{block_stream, white_block};
pub use field::{
    estimate_autocorrelation, sample_field, AutocorrelationEstimate, FieldGrid, FieldSampler, Lag,
    MIN_ENSEMBLE,
};
pub use profile::{variance_profile, ProfileModel, VarianceProfile};
pub use sigma::{couple_sigma, couple_sigma_full, CoupledSigma, RankStructure};
