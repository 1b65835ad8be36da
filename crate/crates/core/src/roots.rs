//! Real-root search for secular functions of `t`.
//!
//! Roots are found in two ways. Adjacent samples of opposite sign give a
//! bracket that is bisected. Quasi-degenerate pairs usually hide between two
//! samples of equal sign, where they show up as a deep local minimum
//! ("bump") in `L(t) = log|F(t)|`; such windows are re-sampled at 16× finer
//! spacing until the pair separates, the minimum turns out to be a resolved
//! nonzero dip, or the resolution floor is reached.

use std::f64::consts::PI;

use log::{debug, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::secular::{energy_of, LogScaledValue, SecularFunction};

/// Pairs closer than this in `t` are reported as one unresolved doublet.
pub const DOUBLET_FLOOR: f64 = 1e-12;
/// Refinement factor per level.
const REFINE_FACTOR: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub initial_samples: usize,
    pub max_refine_depth: usize,
    /// Relative bracket width at which bisection stops.
    pub t_tol: f64,
    /// Depth, in log units, a minimum of `L(t)` must reach below both
    /// flanking maxima to count as a bump.
    pub bump_drop: f64,
}

impl ScanConfig {
    pub fn new(t_min: f64, t_max: f64) -> Self {
        ScanConfig {
            t_min,
            t_max,
            initial_samples: 2048,
            max_refine_depth: 12,
            t_tol: 1e-13,
            bump_drop: 3.0,
        }
    }

    /// Scan range for the lowest `n_levels` levels at coupling `z`.
    ///
    /// The lower end comes from free-particle counting on circumference 4,
    /// `E_max = 1.5 (π (n + 2) / 4)²`, mapped through `t = Z / 2√E`.
    pub fn for_levels(z: f64, n_levels: usize) -> Self {
        let t_max = 5.0 * z.sqrt().max(1.0);
        let e_max = max_energy(n_levels);
        ScanConfig::new(z / (2.0 * e_max.sqrt()), t_max)
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.initial_samples = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_min > 0.0) || !self.t_min.is_finite() || !self.t_max.is_finite() {
            return Err(Error::contract(format!(
                "scan bounds must be positive and finite, got [{}, {}]",
                self.t_min, self.t_max
            )));
        }
        if !(self.t_min < self.t_max) {
            return Err(Error::contract(format!(
                "scan needs t_min < t_max, got [{}, {}]",
                self.t_min, self.t_max
            )));
        }
        if self.initial_samples < 16 {
            return Err(Error::contract(format!(
                "at least 16 samples are required, got {}",
                self.initial_samples
            )));
        }
        if !(self.t_tol > 0.0) || !(self.bump_drop > 0.0) {
            return Err(Error::contract("t_tol and bump_drop must be positive"));
        }
        Ok(())
    }
}

/// Upper energy used to size the default scan.
pub fn max_energy(n_levels: usize) -> f64 {
    let k = PI * (n_levels as f64 + 2.0) / 4.0;
    1.5 * k * k
}

/// One evaluation of a secular function: `L(t)` plus the sign of `F(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub sign: i8,
    pub logmag: f64,
}

impl Sample {
    fn value(&self) -> LogScaledValue {
        LogScaledValue {
            sign: self.sign,
            logmag: self.logmag,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detection {
    SignChange,
    BumpRefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootRecord {
    pub t: f64,
    pub residual_logmag: f64,
    pub bracket_width: f64,
    pub detection: Detection,
    /// Two roots closer than the resolution floor, reported once.
    pub unresolved_doublet: bool,
}

impl RootRecord {
    /// Number of levels this record stands for.
    pub fn multiplicity(&self) -> usize {
        if self.unresolved_doublet {
            2
        } else {
            1
        }
    }
}

/// A candidate quasi-degenerate pair: two sample cells around a deep minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpWindow {
    pub t_lo: f64,
    pub t_hi: f64,
    pub t_center: f64,
    pub logmag: f64,
}

/// Evaluates `f` at every abscissa, in parallel, preserving order.
pub fn sample_at<F: SecularFunction + ?Sized>(f: &F, ts: &[f64]) -> Result<Vec<Sample>> {
    ts.par_iter()
        .map(|&t| {
            f.eval(t)
                .map(|v| Sample {
                    t,
                    sign: v.sign,
                    logmag: v.logmag,
                })
                .map_err(|e| Error::at(t, e))
        })
        .collect()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|j| if j + 1 == n { hi } else { lo + step * j as f64 })
        .collect()
}

/// `initial_samples` evaluations uniformly spaced over `[t_min, t_max]`.
pub fn scan_secular<F: SecularFunction + ?Sized>(f: &F, cfg: &ScanConfig) -> Result<Vec<Sample>> {
    cfg.validate()?;
    sample_at(f, &linspace(cfg.t_min, cfg.t_max, cfg.initial_samples))
}

/// Uniform within each octave of `[t_min, t_max]`, `samples` points per octave.
fn octave_grid(t_min: f64, t_max: f64, samples: usize) -> Vec<f64> {
    let octaves = (t_max / t_min).log2().ceil().max(1.0) as usize;
    let ratio = (t_max / t_min).powf(1.0 / octaves as f64);
    let mut grid = Vec::with_capacity(octaves * samples);
    let mut lo = t_min;
    for k in 0..octaves {
        let hi = if k + 1 == octaves { t_max } else { lo * ratio };
        let piece = linspace(lo, hi, samples);
        let skip = usize::from(k > 0);
        grid.extend_from_slice(&piece[skip..]);
        lo = hi;
    }
    grid
}

/// Bisects a sign-change bracket down to relative width `t_tol`.
pub fn bisect<F: SecularFunction + ?Sized>(
    f: &F,
    bracket: (f64, f64),
    t_tol: f64,
) -> Result<RootRecord> {
    let (mut lo, mut hi) = if bracket.0 <= bracket.1 {
        bracket
    } else {
        (bracket.1, bracket.0)
    };
    let eval = |t: f64| f.eval(t).map_err(|e| Error::at(t, e));
    let mut f_lo = eval(lo)?;
    let mut f_hi = eval(hi)?;
    if !f_lo.straddles(f_hi) {
        return Err(Error::contract(format!(
            "bisection bracket [{lo}, {hi}] has signs {} and {}",
            f_lo.sign, f_hi.sign
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= t_tol * lo.abs().max(hi.abs()) || mid <= lo || mid >= hi {
            break;
        }
        let f_mid = eval(mid)?;
        if f_mid.is_zero() {
            return Ok(RootRecord {
                t: mid,
                residual_logmag: f64::NEG_INFINITY,
                bracket_width: hi - lo,
                detection: Detection::SignChange,
                unresolved_doublet: false,
            });
        }
        if f_mid.straddles(f_lo) {
            hi = mid;
            f_hi = f_mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    let f_mid = eval(mid)?;
    let (t, residual) = [(lo, f_lo), (mid, f_mid), (hi, f_hi)]
        .into_iter()
        .min_by(|a, b| a.1.cmp_magnitude(&b.1))
        .map(|(t, v)| (t, v.logmag))
        .unwrap_or((mid, f_mid.logmag));
    Ok(RootRecord {
        t,
        residual_logmag: residual,
        bracket_width: settle_width(f, t, residual, hi - lo)?,
        detection: Detection::SignChange,
        unresolved_doublet: false,
    })
}

/// Widens `width` until `|f(t ± width)|` is no smaller than the residual at
/// `t`. Near a root the final bracket sits inside the rounding-noise band of
/// `f`; the widened bracket reports that band instead.
fn settle_width<F: SecularFunction + ?Sized>(
    f: &F,
    t: f64,
    residual: f64,
    width: f64,
) -> Result<f64> {
    let mut width = width.max(f64::EPSILON * t);
    for _ in 0..64 {
        let dominated = [t - width, t + width]
            .into_iter()
            .try_fold(true, |ok, edge| {
                f.eval(edge)
                    .map(|v| ok && v.logmag >= residual)
                    .map_err(|e| Error::at(edge, e))
            })?;
        if dominated {
            break;
        }
        width *= 2.0;
    }
    Ok(width)
}

/// Roots from sign changes (and exact zeros) between consecutive samples.
fn sign_change_roots<F: SecularFunction + ?Sized>(
    f: &F,
    samples: &[Sample],
    t_tol: f64,
    detection: Detection,
) -> Result<Vec<RootRecord>> {
    let mut brackets = Vec::new();
    let mut exact = Vec::new();
    for (j, s) in samples.iter().enumerate() {
        if s.sign == 0 {
            exact.push(RootRecord {
                t: s.t,
                residual_logmag: f64::NEG_INFINITY,
                bracket_width: 0.0,
                detection,
                unresolved_doublet: false,
            });
            continue;
        }
        if let Some(prev) = samples[..j].last() {
            if prev.value().straddles(s.value()) {
                brackets.push((prev.t, s.t));
            }
        }
    }
    let mut roots: Vec<RootRecord> = brackets
        .par_iter()
        .map(|&b| {
            bisect(f, b, t_tol).map(|mut r| {
                r.detection = detection;
                r
            })
        })
        .collect::<Result<_>>()?;
    roots.extend(exact);
    Ok(roots)
}

fn has_sign_change(samples: &[Sample]) -> bool {
    samples
        .windows(2)
        .any(|w| w[0].value().straddles(w[1].value()) || w[0].sign == 0 || w[1].sign == 0)
}

/// Deep local minima of `L(t)` without a sign change in their two-cell window.
pub fn detect_bumps(samples: &[Sample], cfg: &ScanConfig) -> Vec<BumpWindow> {
    let n = samples.len();
    let mut windows = Vec::new();
    if n < 3 {
        return windows;
    }
    let logmag = |j: usize| samples[j].logmag;
    for i in 1..n - 1 {
        let here = logmag(i);
        if !(here < logmag(i - 1) && here <= logmag(i + 1)) {
            continue;
        }
        if has_sign_change(&samples[i - 1..=i + 1]) {
            continue;
        }
        let mut left = i;
        while left > 0 && logmag(left - 1) >= logmag(left) {
            left -= 1;
        }
        let mut right = i;
        while right + 1 < n && logmag(right + 1) >= logmag(right) {
            right += 1;
        }
        if logmag(left) - here >= cfg.bump_drop && logmag(right) - here >= cfg.bump_drop {
            windows.push(BumpWindow {
                t_lo: samples[i - 1].t,
                t_hi: samples[i + 1].t,
                t_center: samples[i].t,
                logmag: here,
            });
        }
    }
    windows
}

/// Three equally spaced samples around a minimum of `|F|`. Returns true when
/// the interpolating parabola bottoms out at a nonzero value already close
/// to the smallest sample: the dip is resolved and does not reach zero.
fn resolved_nonzero_minimum(trio: &[Sample]) -> bool {
    let peak = trio
        .iter()
        .map(|s| s.logmag)
        .fold(f64::NEG_INFINITY, f64::max);
    let g: Vec<f64> = trio
        .iter()
        .map(|s| s.sign as f64 * (s.logmag - peak).exp())
        .collect();
    let curvature = 0.5 * (g[0] + g[2] - 2.0 * g[1]);
    let slope = 0.5 * (g[2] - g[0]);
    if g[1] == 0.0 || curvature * g[1] <= 0.0 {
        // not a minimum of |F| at this resolution
        return false;
    }
    let vertex = g[1] - slope * slope / (4.0 * curvature);
    vertex * g[1] > 0.0 && vertex.abs() >= 0.5 * g[1].abs()
}

/// Re-samples a bump window at 16× resolution until it separates into
/// sign-change roots, proves to be a nonzero dip, or hits the floor.
pub fn refine_bump<F: SecularFunction + ?Sized>(
    f: &F,
    window: &BumpWindow,
    cfg: &ScanConfig,
) -> Result<Vec<RootRecord>> {
    let (mut lo, mut hi) = (window.t_lo, window.t_hi);
    let mut best = Sample {
        t: window.t_center,
        sign: 0,
        logmag: window.logmag,
    };
    for depth in 0..cfg.max_refine_depth {
        let samples = sample_at(f, &linspace(lo, hi, 2 * REFINE_FACTOR + 1))?;
        if has_sign_change(&samples) {
            debug!(
                "bump near t = {} split at depth {}",
                window.t_center,
                depth + 1
            );
            return sign_change_roots(f, &samples, cfg.t_tol, Detection::BumpRefined);
        }
        let i = (1..samples.len() - 1)
            .min_by(|&a, &b| samples[a].logmag.total_cmp(&samples[b].logmag))
            .unwrap_or(REFINE_FACTOR);
        best = samples[i];
        if resolved_nonzero_minimum(&samples[i - 1..=i + 1]) {
            debug!("bump near t = {} is a nonzero dip", window.t_center);
            return Ok(Vec::new());
        }
        lo = samples[i - 1].t;
        hi = samples[i + 1].t;
        if hi - lo <= DOUBLET_FLOOR {
            break;
        }
    }
    Ok(vec![RootRecord {
        t: best.t,
        residual_logmag: best.logmag,
        bracket_width: settle_width(f, best.t, best.logmag, hi - lo)?,
        detection: Detection::BumpRefined,
        unresolved_doublet: true,
    }])
}

/// Levels the search could not account for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageWarning {
    pub requested: usize,
    pub found: usize,
    /// Energy interval `[E_lo, E_hi]` scanned without finding the missing levels.
    pub uncovered_energy: (f64, f64),
}

impl std::fmt::Display for CoverageWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "found {} of {} requested levels; nothing further in E ∈ [{:.6}, {:.6}]",
            self.found, self.requested, self.uncovered_energy.0, self.uncovered_energy.1
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSearch {
    /// Roots in descending `t`, i.e. ascending energy.
    pub roots: Vec<RootRecord>,
    pub config: ScanConfig,
    pub warning: Option<CoverageWarning>,
}

impl RootSearch {
    pub fn level_count(&self) -> usize {
        self.roots.iter().map(RootRecord::multiplicity).sum()
    }
}

/// All roots in the configured range, ordered by descending `t`.
///
/// The range is scanned octave by octave, `initial_samples` points each.
pub fn find_roots<F: SecularFunction + ?Sized>(
    f: &F,
    n_levels: usize,
    overrides: Option<ScanConfig>,
) -> Result<RootSearch> {
    if n_levels == 0 {
        return Err(Error::contract("at least one level must be requested"));
    }
    let z = f.coupling();
    let cfg = overrides.unwrap_or_else(|| ScanConfig::for_levels(z, n_levels));
    cfg.validate()?;

    let grid = octave_grid(cfg.t_min, cfg.t_max, cfg.initial_samples);
    let samples = sample_at(f, &grid)?;
    let mut roots = sign_change_roots(f, &samples, cfg.t_tol, Detection::SignChange)?;

    let bumps = detect_bumps(&samples, &cfg);
    let refined: Vec<Vec<RootRecord>> = bumps
        .par_iter()
        .map(|w| refine_bump(f, w, &cfg))
        .collect::<Result<_>>()?;
    roots.extend(refined.into_iter().flatten());

    roots.sort_by(|a, b| b.t.total_cmp(&a.t));
    roots.dedup_by(|later, kept| (kept.t - later.t).abs() <= 4.0 * cfg.t_tol * kept.t);

    let mut search = RootSearch {
        roots,
        config: cfg,
        warning: None,
    };
    let found = search.level_count();
    if found < n_levels {
        let e_lo = search
            .roots
            .last()
            .map(|r| energy_of(z, r.t))
            .unwrap_or_else(|| energy_of(z, cfg.t_max));
        let warning = CoverageWarning {
            requested: n_levels,
            found,
            uncovered_energy: (e_lo, energy_of(z, cfg.t_min)),
        };
        warn!("{warning}");
        search.warning = Some(warning);
    }
    Ok(search)
}
