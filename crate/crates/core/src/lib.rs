//! Degrees of freedom and ergodic capacity of near-field holographic MIMO
//! links, including the evanescent part of the wavenumber spectrum.
//!
//! The crate is organised bottom-up:
//!
//! - [`lattice`] enumerates the 2D wavenumber lattice of a rectangular
//!   aperture and splits it into the propagating disk and the evanescent
//!   annulus.
//! - [`dof`] holds the closed-form degrees-of-freedom results: far-field
//!   planar/volumetric counts, the Rayleigh distance, the noise-floor
//!   wavenumber and the evanescent gain.
//! - [`synthesis`] draws random channels in the wavenumber domain and
//!   synthesises scalar field realisations.
//! - [`capacity`] estimates ergodic capacity by Monte Carlo and compares
//!   near-field against far-field links.
//!
//! ```
//! use hmimo::dof::{evanescent_dof, LinkBudget};
//! use hmimo::lattice::Radiation;
//!
//! let radiation = Radiation::from_frequency(3.0e9)?;
//! let budget = LinkBudget::from_db(125.56, 0.5)?;
//! let report = evanescent_dof(100.0, &budget, &radiation)?;
//! assert!((report.gain_fraction - 0.21172).abs() < 1e-5);
//! # Ok::<(), hmimo::Error>(())
//! ```

pub mod capacity;
pub mod dof;
mod error;
pub mod lattice;
mod rng;
pub mod synthesis;

pub use error::{Error, Result};

pub use faer;
pub use num_complex::Complex64;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/lattice.md")]
    mod lattice {}
    #[doc = include_str!("../../../book/src/dof.md")]
    mod dof {}
    #[doc = include_str!("../../../book/src/synthesis.md")]
    mod synthesis {}
    #[doc = include_str!("../../../book/src/capacity.md")]
    mod capacity {}
}
