//! The 8×8 matching determinant for the double well (`M = 1`).
//!
//! Unknowns are ordered `(A, B)` per interval: far-left `(-2,-1)`,
//! near-left `(-1,0)`, near-right `(0,1)`, far-right `(1,2)`, with
//! `ψ_j(x) = A_j sin κ_j x + B_j cos κ_j x` in the global coordinate.
//! Rows are grouped in pairs: the junction at `x = -1`, the junction at
//! `x = 0`, the junction at `x = 1`, and the closure `ψ(2) = ψ(-2)`.
//!
//! The origin rows carry `cos κ` weights rather than plain continuity. The
//! closed form of this determinant vanishes exactly where
//! `2 Re(cos κ*/cos κ) = tr T` for the plain-continuity monodromy `T`, which
//! is what [`Matching::OriginTwist`](super::Matching::OriginTwist) evaluates.

use num_complex::Complex64;

use super::logscaled::LogScaledValue;
use super::point::SpectralPoint;
use crate::error::{Error, Result};

pub type Matrix8 = [[Complex64; 8]; 8];

/// Matching matrix at `κ = Z/2t - it`.
pub fn build_q(z: f64, t: f64) -> Result<Matrix8> {
    let point = SpectralPoint::new(z, t)?;
    Ok(q_at(point.kappa))
}

pub(crate) fn q_at(k: Complex64) -> Matrix8 {
    let zero = Complex64::new(0.0, 0.0);
    let mut q = [[zero; 8]; 8];
    let mut set = |row: usize, col: usize, v: Complex64| q[row - 1][col - 1] = v;

    let k2 = 2.0 * k;
    let neg_sin = -k.sin();
    let cos = k.cos();
    let k_cos = k * k.cos();
    let k_sin = k * k.sin();

    // Q11 = -Q*13 = -Q55 = Q*57 = -sin κ
    set(1, 1, neg_sin);
    set(1, 3, -neg_sin.conj());
    set(5, 5, -neg_sin);
    set(5, 7, neg_sin.conj());

    // Q12 = -Q*14 = Q*34 = -Q36 = Q56 = -Q*58 = cos κ
    set(1, 2, cos);
    set(1, 4, -cos.conj());
    set(3, 4, cos.conj());
    set(3, 6, -cos);
    set(5, 6, cos);
    set(5, 8, -cos.conj());

    // Q21 = -Q*23 = Q*43 = -Q45 = Q65 = -Q*67 = κ cos κ
    set(2, 1, k_cos);
    set(2, 3, -k_cos.conj());
    set(4, 3, k_cos.conj());
    set(4, 5, -k_cos);
    set(6, 5, k_cos);
    set(6, 7, -k_cos.conj());

    // Q22 = -Q*24 = -Q66 = Q*68 = κ sin κ
    set(2, 2, k_sin);
    set(2, 4, -k_sin.conj());
    set(6, 6, -k_sin);
    set(6, 8, k_sin.conj());

    // Q71 = Q*77 = -sin 2κ,  Q72 = -Q*78 = cos 2κ
    let v = -k2.sin();
    set(7, 1, v);
    set(7, 7, v.conj());
    let v = k2.cos();
    set(7, 2, v);
    set(7, 8, -v.conj());

    // Q81 = -Q*87 = κ cos 2κ,  Q82 = Q*88 = κ sin 2κ
    let v = k * k2.cos();
    set(8, 1, v);
    set(8, 7, -v.conj());
    let v = k * k2.sin();
    set(8, 2, v);
    set(8, 8, v.conj());

    q
}

/// Determinant of an 8×8 complex matrix as `(log|det|, det/|det|)`, by LU
/// with partial pivoting. A singular matrix gives `(-inf, 0)`.
pub fn log_det(mut m: Matrix8) -> (f64, Complex64) {
    let n = 8;
    let mut logmag = 0.0;
    let mut phase = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))
            .unwrap_or(col);
        let pivot = m[pivot_row][col];
        let size = pivot.norm();
        if size == 0.0 {
            return (f64::NEG_INFINITY, Complex64::new(0.0, 0.0));
        }
        if pivot_row != col {
            m.swap(pivot_row, col);
            phase = -phase;
        }
        logmag += size.ln();
        phase *= pivot / size;
        for row in col + 1..n {
            let factor = m[row][col] / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            let pivot_row = m[col];
            for (entry, &above) in m[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *entry -= factor * above;
            }
        }
    }
    (logmag, phase)
}

/// `det Q(Z, t)` as a real log-scaled value. The imaginary part must stay
/// below `reality_tol` times the Hadamard bound `Π ‖row‖`.
pub fn secular_explicit(z: f64, t: f64, reality_tol: f64) -> Result<LogScaledValue> {
    let q = build_q(z, t)?;
    let hadamard: f64 = q
        .iter()
        .map(|row| row.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt().ln())
        .sum();
    let (logmag, phase) = log_det(q);
    if logmag == f64::NEG_INFINITY {
        return Ok(LogScaledValue::ZERO);
    }
    let imag_log = phase.im.abs().ln() + logmag;
    if imag_log > reality_tol.ln() + hadamard {
        return Err(Error::NonReal {
            t,
            z,
            imag: imag_log.exp(),
            tol: reality_tol,
        });
    }
    Ok(LogScaledValue::from_scaled(phase.re, logmag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-8;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn transcribed_entries() {
        let q = build_q(1.0, 0.5).unwrap();
        let k = c(1.0, -0.5);
        assert_eq!(q[0][0], -k.sin());
        assert!((q[0][2] - k.conj().sin()).norm() < 1e-15);
        assert!((q[0][2] + q[0][0].conj()).norm() < 1e-15);
        assert!((q[7][0] - k * (2.0 * k).cos()).norm() < 1e-15);
        assert!((q[7][6] + q[7][0].conj()).norm() < 1e-15);
    }

    #[test]
    fn sparsity_pattern() {
        let q = build_q(1.0, 0.37).unwrap();
        let nonzero = |row: usize| -> Vec<usize> {
            (0..8)
                .filter(|&j| q[row - 1][j] != c(0.0, 0.0))
                .map(|j| j + 1)
                .collect()
        };
        assert_eq!(nonzero(1), vec![1, 2, 3, 4]);
        assert_eq!(nonzero(2), vec![1, 2, 3, 4]);
        assert_eq!(nonzero(3), vec![4, 6]);
        assert_eq!(nonzero(4), vec![3, 5]);
        assert_eq!(nonzero(5), vec![5, 6, 7, 8]);
        assert_eq!(nonzero(6), vec![5, 6, 7, 8]);
        assert_eq!(nonzero(7), vec![1, 2, 7, 8]);
        assert_eq!(nonzero(8), vec![1, 2, 7, 8]);
    }

    /// Complex conjugation of Q equals Q with columns mapped by the parity
    /// involution (far-left ↔ far-right, near-left ↔ near-right, sine
    /// coefficients flipping sign) and rows permuted with signs.
    #[test]
    fn conjugation_involution() {
        let col_map = [
            (7, -1.0),
            (8, 1.0),
            (5, -1.0),
            (6, 1.0),
            (3, -1.0),
            (4, 1.0),
            (1, -1.0),
            (2, 1.0),
        ];
        let row_partner = [5, 6, 3, 4, 1, 2, 7, 8];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let z = rng.gen_range(0.05..5.0);
            let t = rng.gen_range(0.05..2.0);
            let q = build_q(z, t).unwrap();
            for i in 0..8 {
                // row i of conj(Q) with columns remapped
                let mut mapped = [c(0.0, 0.0); 8];
                for (j, &(to, sign)) in col_map.iter().enumerate() {
                    mapped[to - 1] = q[i][j].conj() * sign;
                }
                let partner = &q[row_partner[i] - 1];
                let plus = (0..8)
                    .all(|j| (mapped[j] - partner[j]).norm() < 1e-12 * (1.0 + partner[j].norm()));
                let minus = (0..8)
                    .all(|j| (mapped[j] + partner[j]).norm() < 1e-12 * (1.0 + partner[j].norm()));
                assert!(plus || minus, "row {} at z={z} t={t}", i + 1);
            }
        }
    }

    #[test]
    fn log_det_matches_cofactor_small_cases() {
        let mut m = [[c(0.0, 0.0); 8]; 8];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = c(i as f64 + 1.0, 0.0);
        }
        m.swap(0, 1);
        let (lm, ph) = log_det(m);
        assert!((lm - 40320f64.ln()).abs() < 1e-12);
        assert!((ph - c(-1.0, 0.0)).norm() < 1e-15);

        let mut s = [[c(0.0, 0.0); 8]; 8];
        s[0][0] = c(1.0, 0.0);
        assert_eq!(log_det(s).0, f64::NEG_INFINITY);
    }

    #[test]
    fn ground_root_brackets() {
        let t0 = 0.6564195696;
        let lo = secular_explicit(1.0, t0 - 1e-8, TOL).unwrap();
        let hi = secular_explicit(1.0, t0 + 1e-8, TOL).unwrap();
        assert!(lo.straddles(hi));
        let lo = secular_explicit(0.1, 0.2219819562 - 1e-8, TOL).unwrap();
        let hi = secular_explicit(0.1, 0.2219819562 + 1e-8, TOL).unwrap();
        assert!(lo.straddles(hi));
    }

    #[test]
    fn small_t_growth_is_quartic() {
        // t⁴ det Q tends to 1/8 at s = π(j + 1/4); reference values from an
        // independent dense LU (numpy) of the same matrix.
        for (j, expected) in [
            (6u32, 0.12508149523640166),
            (10, 0.1250301977394352),
            (16, 0.12501200025859283),
        ] {
            let t = 1.0 / (2.0 * std::f64::consts::PI * (j as f64 + 0.25));
            let f = secular_explicit(1.0, t, TOL).unwrap();
            assert_eq!(f.sign, 1);
            let scaled = (f.logmag + 4.0 * t.ln()).exp();
            assert!(
                (scaled - expected).abs() < 1e-9,
                "t={t}: {scaled} vs {expected}"
            );
        }
    }

    #[test]
    fn near_root_dip() {
        let t1 = 0.3934710177;
        let at_root = secular_explicit(1.0, t1, TOL).unwrap().logmag;
        let peak = (0..=200)
            .map(|j| 0.35 + 0.1 * j as f64 / 200.0)
            .map(|t| secular_explicit(1.0, t, TOL).unwrap().logmag)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(peak - at_root > 6.0 * std::f64::consts::LN_10);
    }
}
