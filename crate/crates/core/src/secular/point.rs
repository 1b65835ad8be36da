use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spectral parameters tied together by `2st = Z` and `E = s² - t²`.
///
/// `kappa = s - it` is the wavenumber in `+iZ` segments; its conjugate
/// belongs to `-iZ` segments. The branch is fixed by `s, t > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub z: f64,
    pub t: f64,
    pub s: f64,
    pub kappa: Complex64,
    pub energy: f64,
}

impl SpectralPoint {
    pub fn new(z: f64, t: f64) -> Result<Self> {
        if !(z > 0.0) || !z.is_finite() {
            return Err(Error::domain(format!(
                "coupling Z must be positive, got {z}"
            )));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::domain(format!(
                "parameter t must be positive, got {t}"
            )));
        }
        let s = z / (2.0 * t);
        Ok(SpectralPoint {
            z,
            t,
            s,
            kappa: Complex64::new(s, -t),
            energy: energy_of(z, t),
        })
    }

    /// Wavenumber for a segment whose imaginary part has the given sign.
    pub fn kappa_for(&self, im: f64) -> Complex64 {
        if im >= 0.0 {
            self.kappa
        } else {
            self.kappa.conj()
        }
    }
}

/// `E = s² - t²` with `s = Z / 2t`. Every energy in the crate goes through here
/// so recomputation is bit-identical.
pub fn energy_of(z: f64, t: f64) -> f64 {
    let s = z / (2.0 * t);
    s * s - t * t
}
