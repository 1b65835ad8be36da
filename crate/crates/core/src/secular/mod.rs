//! Secular functions whose real roots `t_n` give the spectrum.
//!
//! Two independent routes are provided: the generic monodromy `2 - tr T`
//! for any segment layout, and the explicit 8×8 matching determinant for the
//! double well. Both return [`LogScaledValue`]s so root searches stay
//! well-posed where the functions grow like `1/t⁴`.

mod explicit;
mod logscaled;
mod point;
mod transfer;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use explicit::{build_q, log_det, secular_explicit, Matrix8};
pub use logscaled::LogScaledValue;
pub use point::{energy_of, SpectralPoint};
pub use transfer::{monodromy, segment_propagator, TransferMatrix2};

use crate::error::{Error, Result};
use crate::potential::CirclePotential;

/// Default bound on the relative imaginary part of a secular value.
pub const DEFAULT_REALITY_TOL: f64 = 1e-8;

/// How the wavefunction is joined at the origin of the double well.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Matching {
    /// `ψ` and `ψ'` continuous at every segment boundary.
    Continuous,
    /// `(ψ, ψ')` picks up the unimodular factor `cos κ* / cos κ` across
    /// `s = 0`, matching the cosine-weighted origin rows of the 8×8 matching
    /// matrix. Only defined for the four-segment double well.
    OriginTwist,
}

impl Matching {
    /// `OriginTwist` for the double well, `Continuous` otherwise.
    pub fn default_for(pot: &CirclePotential) -> Matching {
        if pot.len() == 4 {
            Matching::OriginTwist
        } else {
            Matching::Continuous
        }
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Matching::Continuous => "continuous",
            Matching::OriginTwist => "origin-twist",
        })
    }
}

impl FromStr for Matching {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "continuous" => Ok(Matching::Continuous),
            "origin-twist" | "twist" => Ok(Matching::OriginTwist),
            other => Err(Error::Parse(format!("unknown matching rule {other:?}"))),
        }
    }
}

/// `2 - tr T` (or `2 Re r - tr T` under the origin twist), with `T` the
/// monodromy of `pot` at `t`. The logscale of `T` is folded into the result.
pub fn secular_monodromy(
    pot: &CirclePotential,
    z: f64,
    t: f64,
    matching: Matching,
    reality_tol: f64,
) -> Result<LogScaledValue> {
    let point = SpectralPoint::new(z, t)?;
    let total = monodromy(pot, &point)?;
    let offset = match matching {
        Matching::Continuous => 2.0,
        Matching::OriginTwist => {
            if pot.len() != 4 {
                return Err(Error::domain(format!(
                    "origin-twist matching needs the four-segment double well, got {} segments",
                    pot.len()
                )));
            }
            2.0 * origin_twist(point.kappa).re
        }
    };
    let unit = (-total.logscale).exp();
    let g = Complex64::new(offset * unit, 0.0) - total.scaled_trace();
    if g.im.abs() > reality_tol * (unit + g.re.abs()) {
        return Err(Error::NonReal {
            t,
            z,
            imag: g.im.abs() * total.logscale.exp(),
            tol: reality_tol,
        });
    }
    Ok(LogScaledValue::from_scaled(g.re, total.logscale))
}

/// `cos κ* / cos κ`; unimodular for real-coefficient `cos`.
pub fn origin_twist(kappa: Complex64) -> Complex64 {
    kappa.conj().cos() / kappa.cos()
}

/// A real-valued function of `t` whose sign changes mark spectral roots.
pub trait SecularFunction: Sync {
    fn coupling(&self) -> f64;
    fn eval(&self, t: f64) -> Result<LogScaledValue>;
}

/// Monodromy route over an arbitrary validated potential.
#[derive(Debug, Clone)]
pub struct MonodromySecular {
    pub potential: CirclePotential,
    pub matching: Matching,
    pub reality_tol: f64,
}

impl MonodromySecular {
    pub fn new(potential: CirclePotential) -> Self {
        let matching = Matching::default_for(&potential);
        MonodromySecular {
            potential,
            matching,
            reality_tol: DEFAULT_REALITY_TOL,
        }
    }

    pub fn with_matching(mut self, matching: Matching) -> Self {
        self.matching = matching;
        self
    }

    pub fn with_reality_tol(mut self, tol: f64) -> Self {
        self.reality_tol = tol;
        self
    }
}

impl SecularFunction for MonodromySecular {
    fn coupling(&self) -> f64 {
        self.potential.coupling()
    }

    fn eval(&self, t: f64) -> Result<LogScaledValue> {
        secular_monodromy(
            &self.potential,
            self.potential.coupling(),
            t,
            self.matching,
            self.reality_tol,
        )
    }
}

/// Explicit 8×8 determinant route; double well only.
#[derive(Debug, Clone, Copy)]
pub struct ExplicitSecular {
    pub z: f64,
    pub reality_tol: f64,
}

impl ExplicitSecular {
    pub fn new(z: f64) -> Result<Self> {
        if !(z > 0.0) || !z.is_finite() {
            return Err(Error::domain(format!(
                "coupling Z must be positive, got {z}"
            )));
        }
        Ok(ExplicitSecular {
            z,
            reality_tol: DEFAULT_REALITY_TOL,
        })
    }

    pub fn with_reality_tol(mut self, tol: f64) -> Self {
        self.reality_tol = tol;
        self
    }
}

impl SecularFunction for ExplicitSecular {
    fn coupling(&self) -> f64 {
        self.z
    }

    fn eval(&self, t: f64) -> Result<LogScaledValue> {
        secular_explicit(self.z, t, self.reality_tol)
    }
}

/// Wraps a plain closure, mainly for tests and ad-hoc functions.
pub struct FnSecular<F> {
    pub z: f64,
    pub f: F,
}

impl<F> SecularFunction for FnSecular<F>
where
    F: Fn(f64) -> f64 + Sync,
{
    fn coupling(&self) -> f64 {
        self.z
    }

    fn eval(&self, t: f64) -> Result<LogScaledValue> {
        Ok(LogScaledValue::from_f64((self.f)(t)))
    }
}

impl<S: SecularFunction + ?Sized> SecularFunction for &S {
    fn coupling(&self) -> f64 {
        (**self).coupling()
    }

    fn eval(&self, t: f64) -> Result<LogScaledValue> {
        (**self).eval(t)
    }
}

impl<S: SecularFunction + ?Sized + Send> SecularFunction for Box<S> {
    fn coupling(&self) -> f64 {
        (**self).coupling()
    }

    fn eval(&self, t: f64) -> Result<LogScaledValue> {
        (**self).eval(t)
    }
}
