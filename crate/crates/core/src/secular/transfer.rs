use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::point::SpectralPoint;
use crate::error::{Error, Result};
use crate::potential::CirclePotential;

const KAPPA_FLOOR: f64 = 1e-150;

/// 2×2 complex matrix acting on `(ψ, ψ')`, stored as `e^logscale · [[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferMatrix2 {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    pub logscale: f64,
}

impl TransferMatrix2 {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        TransferMatrix2 {
            a: one,
            b: zero,
            c: zero,
            d: one,
            logscale: 0.0,
        }
    }

    pub fn from_entries(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        TransferMatrix2 {
            a,
            b,
            c,
            d,
            logscale: 0.0,
        }
    }

    /// Moves the largest entry magnitude into `logscale`.
    pub fn normalized(mut self) -> Self {
        let peak = [self.a, self.b, self.c, self.d]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if peak > 0.0 && peak.is_finite() {
            let inv = 1.0 / peak;
            self.a *= inv;
            self.b *= inv;
            self.c *= inv;
            self.d *= inv;
            self.logscale += peak.ln();
        }
        self
    }

    /// Determinant of the stored (scaled) entries.
    pub fn scaled_det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// Determinant of the represented matrix.
    pub fn det(&self) -> Complex64 {
        self.scaled_det() * (2.0 * self.logscale).exp()
    }

    pub fn scaled_trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn trace(&self) -> Complex64 {
        self.scaled_trace() * self.logscale.exp()
    }

    /// `det(T - 1)` computed directly from the entries.
    pub fn det_minus_identity(&self) -> Complex64 {
        let k = self.logscale.exp();
        let one = Complex64::new(1.0, 0.0);
        (self.a * k - one) * (self.d * k - one) - self.b * self.c * k * k
    }

    pub fn entries(&self) -> [Complex64; 4] {
        let k = self.logscale.exp();
        [self.a * k, self.b * k, self.c * k, self.d * k]
    }
}

impl Mul for TransferMatrix2 {
    type Output = TransferMatrix2;

    /// Matrix product, renormalized so entries stay O(1).
    fn mul(self, rhs: TransferMatrix2) -> TransferMatrix2 {
        TransferMatrix2 {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
            logscale: self.logscale + rhs.logscale,
        }
        .normalized()
    }
}

/// Maps `(ψ, ψ')` across a constant segment of the given width:
/// `[[cos κd, sin κd / κ], [-κ sin κd, cos κd]]`.
pub fn segment_propagator(width: f64, kappa: Complex64) -> Result<TransferMatrix2> {
    if !(width > 0.0) || !width.is_finite() {
        return Err(Error::domain(format!(
            "segment width must be positive, got {width}"
        )));
    }
    if kappa.norm() < KAPPA_FLOOR {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        return Ok(TransferMatrix2::from_entries(
            one,
            Complex64::new(width, 0.0),
            zero,
            one,
        ));
    }
    let phase = kappa * width;
    let (sin, cos) = (phase.sin(), phase.cos());
    Ok(TransferMatrix2::from_entries(cos, sin / kappa, -kappa * sin, cos).normalized())
}

/// Ordered product of segment propagators once around the circle, starting
/// at `s = -2`. Segments with `+iZ` use `κ`, segments with `-iZ` use `κ*`.
pub fn monodromy(pot: &CirclePotential, point: &SpectralPoint) -> Result<TransferMatrix2> {
    let z = point.z;
    let mut total = TransferMatrix2::identity();
    for (j, seg) in pot.segments().iter().enumerate() {
        if ((seg.im.abs() - z) / z).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "segment {j} has |V| = {} but the spectral point has Z = {z}",
                seg.im.abs()
            )));
        }
        let step = segment_propagator(seg.width, point.kappa_for(seg.im))?;
        total = step * total;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn thin_segment_is_identity() {
        let p = segment_propagator(1e-12, c(1.0, 0.0)).unwrap();
        let [a, b, cc, d] = p.entries();
        assert!(close(a, c(1.0, 0.0), 1e-11));
        assert!(close(b, c(0.0, 0.0), 1e-11));
        assert!(close(cc, c(0.0, 0.0), 1e-11));
        assert!(close(d, c(1.0, 0.0), 1e-11));
    }

    #[test]
    fn half_period_rotation() {
        let p = segment_propagator(1.0, c(PI, 0.0)).unwrap();
        let [a, b, cc, d] = p.entries();
        assert!(close(a, c(-1.0, 0.0), 1e-12));
        assert!(close(b, c(0.0, 0.0), 1e-12));
        assert!(close(cc, c(0.0, 0.0), 1e-12));
        assert!(close(d, c(-1.0, 0.0), 1e-12));
    }

    #[test]
    fn propagator_is_unimodular() {
        let p = segment_propagator(0.7, c(1.3, -0.4)).unwrap();
        assert!(close(p.det(), c(1.0, 0.0), 1e-12));
    }

    #[test]
    fn tiny_kappa_uses_limit() {
        let p = segment_propagator(0.5, c(1e-200, 0.0)).unwrap();
        let [a, b, cc, d] = p.entries();
        assert_eq!(a, c(1.0, 0.0));
        assert_eq!(b, c(0.5, 0.0));
        assert_eq!(cc, c(0.0, 0.0));
        assert_eq!(d, c(1.0, 0.0));
    }

    #[test]
    fn rejects_non_positive_width() {
        assert!(segment_propagator(0.0, c(1.0, 0.0)).is_err());
        assert!(segment_propagator(-1.0, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn det_minus_identity_matches_trace_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            // random unit-determinant matrix: a d - b c = 1
            let a = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let b = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let cc = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let d = (c(1.0, 0.0) + b * cc) / a;
            let m = TransferMatrix2::from_entries(a, b, cc, d);
            let lhs = m.det_minus_identity();
            let rhs = c(2.0, 0.0) - m.trace();
            let scale = 1.0 + rhs.norm() + (a.norm() * d.norm()).max(b.norm() * cc.norm());
            assert!((lhs - rhs).norm() <= 1e-10 * scale, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn normalization_keeps_value() {
        let m = TransferMatrix2::from_entries(c(1e8, 1.0), c(2.0, 0.0), c(0.0, 3e7), c(4.0, 0.0));
        let before = m.entries();
        let n = m.normalized();
        let peak = [n.a, n.b, n.c, n.d]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!((peak - 1.0).abs() < 1e-15);
        for (x, y) in before.iter().zip(n.entries()) {
            assert!((x - y).norm() <= 1e-15 * x.norm().max(1.0) * 1e8);
        }
    }

    #[test]
    fn double_well_has_four_alternating_steps() {
        let pot = CirclePotential::square_well(1, 1.0).unwrap();
        let pt = SpectralPoint::new(1.0, 0.45).unwrap();
        let mut manual = TransferMatrix2::identity();
        for k in [pt.kappa, pt.kappa.conj(), pt.kappa, pt.kappa.conj()] {
            manual = segment_propagator(1.0, k).unwrap() * manual;
        }
        let t = monodromy(&pot, &pt).unwrap();
        assert!(close(t.trace(), manual.trace(), 1e-13));
    }

    #[test]
    fn free_limit_trace() {
        let z = 1e-12;
        let pot = CirclePotential::square_well(1, z).unwrap();
        let pt = SpectralPoint::new(z, 5e-13).unwrap();
        assert!((pt.s - 1.0).abs() < 1e-12);
        let tr = monodromy(&pot, &pt).unwrap().trace();
        assert!(close(tr, c(2.0 * (4.0 * pt.s).cos(), 0.0), 1e-10));
    }

    #[test]
    fn monodromy_is_unimodular() {
        let pot = CirclePotential::square_well(3, 1.0).unwrap();
        let pt = SpectralPoint::new(1.0, 0.2).unwrap();
        let t = monodromy(&pot, &pt).unwrap();
        assert!(close(t.det(), c(1.0, 0.0), 1e-10));
    }

    #[test]
    fn coupling_mismatch_is_rejected() {
        let pot = CirclePotential::square_well(1, 1.0).unwrap();
        let pt = SpectralPoint::new(2.0, 0.3).unwrap();
        assert!(matches!(monodromy(&pot, &pt), Err(Error::Domain(_))));
    }
}
