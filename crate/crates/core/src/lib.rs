//! Real spectra of PT-symmetric, purely imaginary step potentials on a
//! circle of circumference 4 with periodic boundary conditions.
//!
//! The pipeline is: build a [`CirclePotential`], evaluate a secular function
//! of the parameter `t` (with `E = s² - t²`, `2st = Z`), locate its real roots
//! with [`find_roots`], and turn them into a [`SpectrumReport`].

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod format;
pub mod potential;
pub mod roots;
pub mod secular;
pub mod solve;
pub mod spectrum;

pub use error::{Error, Result};
pub use potential::{asymptotic_pt_imag, CirclePotential, Segment};
pub use roots::{find_roots, Detection, RootRecord, RootSearch, Sample, ScanConfig};
pub use secular::{
    ExplicitSecular, LogScaledValue, Matching, MonodromySecular, SecularFunction, SpectralPoint,
};
pub use solve::{property_sweep, solve, Backend, PropertySweep, SolveOptions, SpectrumRun};
pub use spectrum::{analyze_series, EnergyLevel, SpectrumReport};
