//! End-to-end drivers: potential → secular function → roots → report, plus
//! the cross-backend and weak-coupling checks.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::CirclePotential;
use crate::roots::{find_roots, CoverageWarning, RootRecord, ScanConfig};
use crate::secular::{
    monodromy, secular_monodromy, segment_propagator, ExplicitSecular, Matching, MonodromySecular,
    SecularFunction, SpectralPoint, DEFAULT_REALITY_TOL,
};
use crate::spectrum::{analyze_series, energies_from_roots, SpectrumReport, DEFAULT_QUASI_TOL};

/// Largest root discrepancy tolerated between the two secular routes.
pub const AGREEMENT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Monodromy,
    Explicit,
    Both,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Monodromy => "monodromy",
            Backend::Explicit => "explicit",
            Backend::Both => "both",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monodromy" => Ok(Backend::Monodromy),
            "explicit" => Ok(Backend::Explicit),
            "both" => Ok(Backend::Both),
            other => Err(Error::Parse(format!("unknown backend {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub z: f64,
    pub m: usize,
    pub levels: usize,
    pub backend: Backend,
    /// `None` picks [`Matching::default_for`] the potential.
    pub matching: Option<Matching>,
    pub scan: Option<ScanConfig>,
    pub reality_tol: f64,
    pub quasi_tol: f64,
}

impl SolveOptions {
    pub fn new(z: f64, m: usize, levels: usize) -> Self {
        SolveOptions {
            z,
            m,
            levels,
            backend: Backend::Monodromy,
            matching: None,
            scan: None,
            reality_tol: DEFAULT_REALITY_TOL,
            quasi_tol: DEFAULT_QUASI_TOL,
        }
    }

    pub fn backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn matching(mut self, matching: Matching) -> Self {
        self.matching = Some(matching);
        self
    }

    pub fn scan(mut self, cfg: ScanConfig) -> Self {
        self.scan = Some(cfg);
        self
    }

    fn check(&self) -> Result<()> {
        if self.levels == 0 {
            return Err(Error::domain("at least one level must be requested"));
        }
        if self.backend != Backend::Monodromy && self.m != 1 {
            return Err(Error::domain(format!(
                "{} backend requires M=1",
                self.backend
            )));
        }
        Ok(())
    }

    fn monodromy_secular(&self) -> Result<MonodromySecular> {
        let pot = CirclePotential::square_well(self.m, self.z)?;
        let matching = self.matching.unwrap_or_else(|| Matching::default_for(&pot));
        Ok(MonodromySecular::new(pot)
            .with_matching(matching)
            .with_reality_tol(self.reality_tol))
    }

    fn explicit_secular(&self) -> Result<ExplicitSecular> {
        Ok(ExplicitSecular::new(self.z)?.with_reality_tol(self.reality_tol))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRun {
    pub report: SpectrumReport,
    /// Every root found in the scan range, descending in `t`.
    pub roots: Vec<RootRecord>,
    pub warning: Option<CoverageWarning>,
}

/// Lowest `opts.levels` levels of the square-well family.
pub fn solve(opts: &SolveOptions) -> Result<SpectrumRun> {
    CirclePotential::square_well(opts.m, opts.z)?;
    opts.check()?;
    let search = match opts.backend {
        Backend::Monodromy => find_roots(&opts.monodromy_secular()?, opts.levels, opts.scan)?,
        Backend::Explicit => find_roots(&opts.explicit_secular()?, opts.levels, opts.scan)?,
        Backend::Both => {
            let mono = find_roots(&opts.monodromy_secular()?, opts.levels, opts.scan)?;
            let expl = find_roots(&opts.explicit_secular()?, opts.levels, opts.scan)?;
            let a: Vec<f64> = mono.roots.iter().map(|r| r.t).collect();
            let b: Vec<f64> = expl.roots.iter().map(|r| r.t).collect();
            if let Some(dt) = pairwise_gap(&a, &b).filter(|&dt| dt <= AGREEMENT_TOL) {
                log::info!("backends agree on {} roots, max |Δt| = {dt:.2e}", a.len());
            } else {
                return Err(Error::contract(format!(
                    "backends disagree: monodromy found {} roots, explicit {}",
                    a.len(),
                    b.len()
                )));
            }
            mono
        }
    };
    let mut levels = energies_from_roots(&search.roots, opts.z)?;
    levels.truncate(opts.levels);
    let report = analyze_series(&levels, opts.z, opts.m, opts.quasi_tol);
    Ok(SpectrumRun {
        report,
        roots: search.roots,
        warning: search.warning,
    })
}

/// Largest `|a_i - b_i|` when both lists have equal length.
fn pairwise_gap(a: &[f64], b: &[f64]) -> Option<f64> {
    (a.len() == b.len()).then(|| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    })
}

/// Root sets of the explicit determinant and the monodromy on one interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub z: f64,
    pub matching: Matching,
    pub t_range: (f64, f64),
    pub explicit: Vec<f64>,
    pub monodromy: Vec<f64>,
    /// `None` when the root counts differ.
    pub max_dt: Option<f64>,
}

impl Agreement {
    pub fn holds(&self, tol: f64) -> bool {
        !self.explicit.is_empty() && self.max_dt.is_some_and(|dt| dt <= tol)
    }
}

fn roots_in<F: SecularFunction>(f: &F, cfg: ScanConfig) -> Result<Vec<f64>> {
    let search = find_roots(f, 1, Some(cfg))?;
    // unresolved doublets count twice so multiplicities must match as well
    Ok(search
        .roots
        .iter()
        .flat_map(|r| std::iter::repeat_n(r.t, r.multiplicity()))
        .collect())
}

/// Double-well roots of both routes on `[t_lo, t_hi]`, paired in order.
pub fn backend_agreement(z: f64, t_lo: f64, t_hi: f64, matching: Matching) -> Result<Agreement> {
    let pot = CirclePotential::square_well(1, z)?;
    let mono = MonodromySecular::new(pot).with_matching(matching);
    let expl = ExplicitSecular::new(z)?;
    let cfg = ScanConfig::new(t_lo, t_hi);
    let explicit = roots_in(&expl, cfg)?;
    let monodromy = roots_in(&mono, cfg)?;
    let max_dt = pairwise_gap(&explicit, &monodromy);
    Ok(Agreement {
        z,
        matching,
        t_range: (t_lo, t_hi),
        explicit,
        monodromy,
        max_dt,
    })
}

/// `(πm/2)²` with every `m ≥ 1` twice: the free spectrum on circumference 4.
pub fn free_levels(count: usize) -> Vec<f64> {
    std::iter::once(0.0)
        .chain((1..).flat_map(|m| {
            let e = (PI * m as f64 / 2.0).powi(2);
            [e, e]
        }))
        .take(count)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeLimitCheck {
    pub z: f64,
    pub computed: Vec<f64>,
    pub expected: Vec<f64>,
    /// Largest deviation; infinite when levels are missing.
    pub max_dev: f64,
    pub tol: f64,
}

impl FreeLimitCheck {
    pub fn passed(&self) -> bool {
        self.computed.len() == self.expected.len() && self.max_dev <= self.tol
    }
}

/// Compares the lowest `count` double-well levels at weak coupling with the
/// free spectrum.
pub fn free_limit_check(
    z: f64,
    count: usize,
    matching: Option<Matching>,
    tol: f64,
) -> Result<FreeLimitCheck> {
    let mut opts = SolveOptions::new(z, 1, count);
    opts.matching = matching;
    let run = solve(&opts)?;
    let computed = run.report.energies();
    let expected = free_levels(count);
    let max_dev = if computed.len() < expected.len() {
        f64::INFINITY
    } else {
        computed
            .iter()
            .zip(&expected)
            .map(|(c, e)| (c - e).abs())
            .fold(0.0, f64::max)
    };
    Ok(FreeLimitCheck {
        z,
        computed,
        expected,
        max_dev,
        tol,
    })
}

/// Worst-case structural checks of one potential over a set of `t` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertySweep {
    pub points: usize,
    /// Largest `|det P - 1|` over every segment propagator, and of the
    /// monodromy relative to its scale.
    pub max_wronskian: f64,
    /// Largest trace change under cyclic relabelling, relative to the
    /// monodromy scale.
    pub max_rotation: f64,
    /// `(t, message)` for every evaluation whose secular value was not real.
    pub reality_failures: Vec<(f64, String)>,
}

impl PropertySweep {
    pub fn holds(&self, tol: f64) -> bool {
        self.max_wronskian <= tol && self.max_rotation <= tol && self.reality_failures.is_empty()
    }
}

/// Unimodularity, trace cyclicity and reality of the secular function for
/// `pot` at each `t`, under every matching the potential supports.
pub fn property_sweep(
    pot: &CirclePotential,
    ts: &[f64],
    reality_tol: f64,
) -> Result<PropertySweep> {
    let z = pot.coupling();
    let rotations: Vec<CirclePotential> = (1..pot.len() as isize)
        .map(|k| pot.rotate_segments(k))
        .collect();
    let matchings: &[Matching] = if pot.len() == 4 {
        &[Matching::Continuous, Matching::OriginTwist]
    } else {
        &[Matching::Continuous]
    };
    let mut sweep = PropertySweep {
        points: ts.len(),
        max_wronskian: 0.0,
        max_rotation: 0.0,
        reality_failures: Vec::new(),
    };
    for &t in ts {
        let point = SpectralPoint::new(z, t)?;
        for seg in pot.segments() {
            let p = segment_propagator(seg.width, point.kappa_for(seg.im))?;
            sweep.max_wronskian = sweep.max_wronskian.max((p.det() - 1.0).norm());
        }
        let total = monodromy(pot, &point)?;
        let unit = (-2.0 * total.logscale).exp();
        sweep.max_wronskian = sweep
            .max_wronskian
            .max((total.scaled_det() - unit).norm() / unit.max(1.0));
        let scale = total.logscale.exp().max(total.trace().norm());
        for rotated in &rotations {
            let r = monodromy(rotated, &point)?;
            sweep.max_rotation = sweep
                .max_rotation
                .max((r.trace() - total.trace()).norm() / scale);
        }
        for &matching in matchings {
            if let Err(e) = secular_monodromy(pot, z, t, matching, reality_tol) {
                sweep.reality_failures.push((t, e.to_string()));
            }
        }
    }
    Ok(sweep)
}
