//! Full-duplex Tx/Rx linear array toolkit.
//!
//! Builds collinear Tx/Rx geometries (partitioned, interleaved and nested
//! families), synthesizes their self-interference (SI) channel under a
//! spherical-wave model, and measures what each geometry costs and buys:
//! SI singular spectrum and spectral norm, beampattern resolution and grating
//! lobes, and the contiguous extent of the sum co-array.
//!
//! Distances are in half-wavelength units throughout.
//!
//! ```
//! use fdarray::{geometry::generate_interleaved, si::si_matrix, spectral::svd_spectrum};
//!
//! let layout = generate_interleaved(2, 1).unwrap();
//! let h = si_matrix(&layout, 1.0).unwrap();
//! let spectrum = svd_spectrum(&h.h).unwrap();
//! assert!((spectrum.sigmas[0] - 1.720759).abs() < 1e-6);
//! ```

pub mod beampattern;
pub mod coarray;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod geometry;
pub mod io;
pub mod si;
pub mod spectral;
pub mod svd;

pub use error::{Error, Result};
pub use exec::Execution;
pub use geometry::{ArrayGeometry, Family, FamilyParams, FullDuplexLayout, Position};
pub use si::SiChannelMatrix;
pub use spectral::SingularSpectrum;

pub use num_complex::Complex64;
