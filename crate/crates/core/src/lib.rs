//! Far-field diffraction of single-photon emitters through slits and gratings,
//! and the N-photon intensity correlations that beat the classical fringe
//! period.
//!
//! The building blocks, bottom up:
//!
//! - [`geometry`]: apertures, emitters, detector layouts.
//! - [`diffraction`]: the closed-form far-field amplitude and the grating sum.
//! - [`quadrature`]: a Fresnel-integral cross-check of the closed form.
//! - [`permanent`] and [`correlation`]: G^(N) from the amplitude permanent.
//! - [`analysis`]: fringe frequency, zeros and visibility of sampled scans.
//! - [`config`], [`scan`], [`output`]: the batch driver used by the CLI.
//!
//! ```
//! use subrayleigh::config::{ScanConfig, Scenario};
//! use subrayleigh::scan::run_scan;
//!
//! let config = ScanConfig { steps: 256, ..ScanConfig::for_scenario(Scenario::G2Mirror) };
//! let result = run_scan(&config)?;
//! assert!((result.metadata.frequency_ratio - 2.0).abs() < 0.02);
//! # Ok::<(), subrayleigh::Error>(())
//! ```

pub mod analysis;
pub mod config;
pub mod correlation;
pub mod diffraction;
pub mod error;
pub mod geometry;
pub mod output;
pub mod permanent;
pub mod quadrature;
pub mod scan;
pub mod units;

pub use num_complex::Complex64;

pub use analysis::{FringeReport, SampledSignal};
pub use config::{ScanConfig, Scenario};
pub use error::{Error, ErrorClass, Result};
pub use geometry::{
    Aperture, DetectorLayout, EmitterArray, Geometry, PlacementStrategy, Transverse,
};
