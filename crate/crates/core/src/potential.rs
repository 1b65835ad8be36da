//! Piecewise-constant, purely imaginary potentials on a circle of
//! circumference 4, parametrized by `s ∈ (-2, 2)`.
//!
//! The square-well family places `4M` segments of width `h = 1/M` around the
//! circle, alternating `+iZ` (starting at `s = -2`) and `-iZ`. Segment
//! boundaries are half-open on the right: a boundary point belongs to the
//! segment that starts there.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Length of the periodic coordinate domain.
pub const CIRCUMFERENCE: f64 = 4.0;
/// Left edge of the first segment.
pub const START: f64 = -2.0;

const WIDTH_SUM_TOL: f64 = 1e-12;

/// One constant piece of the potential. `im` is the signed imaginary part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub width: f64,
    pub im: f64,
}

impl Segment {
    pub fn value(&self) -> Complex64 {
        Complex64::new(0.0, self.im)
    }
}

/// Purely imaginary step potential covering the circle `[-2, 2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PotentialJson", into = "PotentialJson")]
pub struct CirclePotential {
    coupling: f64,
    segments: Vec<Segment>,
}

#[derive(Serialize, Deserialize)]
struct PotentialJson {
    circumference: f64,
    start: f64,
    segments: Vec<Segment>,
}

impl From<CirclePotential> for PotentialJson {
    fn from(p: CirclePotential) -> Self {
        PotentialJson {
            circumference: CIRCUMFERENCE,
            start: START,
            segments: p.segments,
        }
    }
}

impl TryFrom<PotentialJson> for CirclePotential {
    type Error = Error;

    fn try_from(raw: PotentialJson) -> Result<Self> {
        if raw.circumference != CIRCUMFERENCE || raw.start != START {
            return Err(Error::domain(format!(
                "only circumference {CIRCUMFERENCE} starting at {START} is supported, got {} at {}",
                raw.circumference, raw.start
            )));
        }
        CirclePotential::from_segments(raw.segments)
    }
}

impl CirclePotential {
    /// Builds the alternating `±iZ` family with `4M` wells of width `1/M`.
    pub fn square_well(m: usize, z: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("well count M must be at least 1"));
        }
        if !(z > 0.0) || !z.is_finite() {
            return Err(Error::domain(format!(
                "coupling Z must be positive, got {z}"
            )));
        }
        let h = 1.0 / m as f64;
        let segments = (0..4 * m)
            .map(|j| Segment {
                width: h,
                im: if j % 2 == 0 { z } else { -z },
            })
            .collect();
        let pot = CirclePotential {
            coupling: z,
            segments,
        };
        pot.validate()?;
        Ok(pot)
    }

    /// Builds a potential from arbitrary segments. All segments must share
    /// the same magnitude `|im|`, which becomes the coupling.
    pub fn from_segments(segments: Vec<Segment>) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| Error::domain("a potential needs at least one segment"))?;
        let pot = CirclePotential {
            coupling: first.im.abs(),
            segments,
        };
        pot.validate()?;
        Ok(pot)
    }

    /// Checks widths, coverage, uniform coupling and PT symmetry.
    pub fn validate(&self) -> Result<()> {
        let z = self.coupling;
        if !(z > 0.0) || !z.is_finite() {
            return Err(Error::domain(format!(
                "coupling Z must be positive, got {z}"
            )));
        }
        for (j, seg) in self.segments.iter().enumerate() {
            if !(seg.width > 0.0) || !seg.width.is_finite() {
                return Err(Error::domain(format!(
                    "segment {j} has non-positive width {}",
                    seg.width
                )));
            }
            if ((seg.im.abs() - z) / z).abs() > 1e-12 {
                return Err(Error::domain(format!(
                    "segment {j} has magnitude {} but coupling is {z}",
                    seg.im.abs()
                )));
            }
        }
        let total: f64 = self.segments.iter().map(|s| s.width).sum();
        if (total - CIRCUMFERENCE).abs() > WIDTH_SUM_TOL {
            return Err(Error::domain(format!(
                "segment widths sum to {total}, expected {CIRCUMFERENCE}"
            )));
        }
        if !self.is_pt_symmetric(1024) {
            return Err(Error::domain("potential violates V(-s) = conj V(s)"));
        }
        Ok(())
    }

    /// Samples `V(-s) == conj V(s)` on an interior grid that avoids the
    /// measure-zero boundary points.
    pub fn is_pt_symmetric(&self, samples: usize) -> bool {
        let boundaries = self.boundaries();
        let step = CIRCUMFERENCE / samples as f64;
        (0..samples)
            .map(|j| START + (j as f64 + 0.5) * step)
            .filter(|s| {
                boundaries
                    .iter()
                    .all(|b| (b - s).abs() > 1e-9 && (b + s).abs() > 1e-9)
            })
            .all(|s| self.value_at(-s) == self.value_at(s).conj())
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Left edges of all segments followed by the closing point `2`.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut edges = Vec::with_capacity(self.segments.len() + 1);
        let mut x = START;
        edges.push(x);
        for seg in &self.segments {
            x += seg.width;
            edges.push(x);
        }
        edges
    }

    pub fn midpoints(&self) -> Vec<f64> {
        let edges = self.boundaries();
        edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Potential value at `s`, with `s` reduced onto `[-2, 2)`.
    pub fn value_at(&self, s: f64) -> Complex64 {
        let x = (s - START).rem_euclid(CIRCUMFERENCE);
        let mut left = 0.0;
        for seg in &self.segments {
            if x < left + seg.width {
                return seg.value();
            }
            left += seg.width;
        }
        // Only reachable through accumulated rounding at the closing edge.
        self.segments[self.segments.len() - 1].value()
    }

    /// Cyclically relabels the segments so that segment `k` becomes the first.
    pub fn rotate_segments(&self, k: isize) -> CirclePotential {
        let n = self.segments.len();
        let shift = k.rem_euclid(n as isize) as usize;
        let mut segments = self.segments.clone();
        segments.rotate_left(shift);
        CirclePotential {
            coupling: self.coupling,
            segments,
        }
    }

    /// Mirror image `s -> -s` combined with complex conjugation of every value.
    pub fn reversed_conjugate(&self) -> CirclePotential {
        let segments = self
            .segments
            .iter()
            .rev()
            .map(|seg| Segment {
                width: seg.width,
                im: -seg.im,
            })
            .collect();
        CirclePotential {
            coupling: self.coupling,
            segments,
        }
    }

    /// Number of wells `M` if this is a member of the square-well family.
    pub fn well_count(&self) -> Option<usize> {
        let n = self.segments.len();
        if !n.is_multiple_of(4) {
            return None;
        }
        let m = n / 4;
        let h = 1.0 / m as f64;
        let regular = self.segments.iter().all(|s| (s.width - h).abs() <= 1e-12)
            && self.segments.windows(2).all(|w| w[0].im == -w[1].im);
        regular.then_some(m)
    }
}

/// Leading large-`alpha` shape `e^{-2Mα} (-cos πMs + i sin πMs)` of the
/// shifted Pöschl-Teller angular potential. Reference shape only.
pub fn asymptotic_pt_imag(m: usize, alpha: f64, s: f64) -> Complex64 {
    let m = m as f64;
    let scale = (-2.0 * m * alpha).exp();
    let phase = PI * m * s;
    Complex64::new(-scale * phase.cos(), scale * phase.sin())
}
