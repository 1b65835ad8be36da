//! Energy levels, difference tables and quasi-degenerate pairs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::RootRecord;
use crate::secular::energy_of;

/// Relative gap below which neighbouring levels count as quasi-degenerate.
pub const DEFAULT_QUASI_TOL: f64 = 2e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyLevel {
    pub n: usize,
    pub t: f64,
    pub s: f64,
    pub energy: f64,
    pub series: u8,
    pub doublet_partner: Option<usize>,
}

/// One entry of a difference table, keyed by level index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffRow {
    pub n: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiPair {
    pub lower: usize,
    pub upper: usize,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub z: f64,
    pub m: usize,
    pub levels: Vec<EnergyLevel>,
    /// `Δ_n = E_n - E_{n-1}`, n ≥ 1.
    pub delta1: Vec<DiffRow>,
    /// `Δ_n - Δ_{n-4}` at even n ≥ 6.
    pub even_second: Vec<DiffRow>,
    /// `Δ_n - Δ_{n-2}` at odd n ≥ 3.
    pub odd_second: Vec<DiffRow>,
    /// `Δ_n - 2Δ_{n-4} + Δ_{n-8}` at odd n ≥ 9.
    pub odd_third: Vec<DiffRow>,
    /// `Δ_n - 2Δ_{n-2} + Δ_{n-4}` at odd n ≥ 5: the change between
    /// consecutive odd second differences.
    pub odd_third_consecutive: Vec<DiffRow>,
    pub quasi_pairs: Vec<QuasiPair>,
    /// Root doublets `(t_{2k-1}, t_{2k})`, k ≥ 1, as level index pairs.
    pub root_doublets: Vec<(usize, usize)>,
}

/// Levels in ascending energy from roots in strictly descending `t`.
///
/// An unresolved doublet becomes two consecutive levels with equal `t` and `E`.
pub fn energies_from_roots(roots: &[RootRecord], z: f64) -> Result<Vec<EnergyLevel>> {
    if let Some(w) = roots.windows(2).find(|w| !(w[0].t > w[1].t)) {
        return Err(Error::contract(format!(
            "roots must be strictly decreasing in t, got {} then {}",
            w[0].t, w[1].t
        )));
    }
    let mut levels = Vec::with_capacity(roots.len() + 4);
    for root in roots {
        let first = levels.len();
        for k in 0..root.multiplicity() {
            let n = first + k;
            levels.push(EnergyLevel {
                n,
                t: root.t,
                s: z / (2.0 * root.t),
                energy: energy_of(z, root.t),
                series: (n % 4) as u8,
                doublet_partner: None,
            });
        }
        if root.unresolved_doublet {
            levels[first].doublet_partner = Some(first + 1);
            levels[first + 1].doublet_partner = Some(first);
        }
    }
    Ok(levels)
}

pub fn first_differences(levels: &[EnergyLevel]) -> Vec<DiffRow> {
    levels
        .windows(2)
        .map(|w| DiffRow {
            n: w[1].n,
            value: w[1].energy - w[0].energy,
        })
        .collect()
}

/// Consecutive levels whose gap is below `quasi_tol · max(1, E_n)`.
pub fn quasi_degenerate_pairs(levels: &[EnergyLevel], quasi_tol: f64) -> Vec<QuasiPair> {
    levels
        .windows(2)
        .filter_map(|w| {
            let gap = w[1].energy - w[0].energy;
            (gap < quasi_tol * w[1].energy.max(1.0)).then_some(QuasiPair {
                lower: w[0].n,
                upper: w[1].n,
                gap,
            })
        })
        .collect()
}

/// Builds the difference tables, series labels and doublet bookkeeping.
/// Short inputs give truncated tables.
pub fn analyze_series(levels: &[EnergyLevel], z: f64, m: usize, quasi_tol: f64) -> SpectrumReport {
    let mut levels: Vec<EnergyLevel> = levels
        .iter()
        .enumerate()
        .map(|(n, l)| EnergyLevel {
            n,
            series: (n % 4) as u8,
            ..*l
        })
        .collect();
    let delta1 = first_differences(&levels);
    // delta[n] = Δ_n; index 0 unused
    let delta: Vec<Option<f64>> = std::iter::once(None)
        .chain(delta1.iter().map(|d| Some(d.value)))
        .collect();
    let d = |n: isize| -> Option<f64> {
        if n >= 1 {
            delta.get(n as usize).copied().flatten()
        } else {
            None
        }
    };
    let table = |parity: usize, from: usize, rule: &dyn Fn(isize) -> Option<f64>| -> Vec<DiffRow> {
        (from..delta.len())
            .filter(|n| n % 2 == parity)
            .filter_map(|n| rule(n as isize).map(|value| DiffRow { n, value }))
            .collect()
    };
    let even_second = table(0, 6, &|n| Some(d(n)? - d(n - 4)?));
    let odd_second = table(1, 3, &|n| Some(d(n)? - d(n - 2)?));
    let odd_third = table(1, 9, &|n| Some(d(n)? - 2.0 * d(n - 4)? + d(n - 8)?));
    let odd_third_consecutive = table(1, 5, &|n| Some(d(n)? - 2.0 * d(n - 2)? + d(n - 4)?));

    let quasi_pairs = quasi_degenerate_pairs(&levels, quasi_tol);
    for p in &quasi_pairs {
        levels[p.lower].doublet_partner.get_or_insert(p.upper);
        levels[p.upper].doublet_partner.get_or_insert(p.lower);
    }
    let root_doublets = (1..)
        .map(|k| (2 * k - 1, 2 * k))
        .take_while(|&(_, b)| b < levels.len())
        .collect();

    SpectrumReport {
        z,
        m,
        levels,
        delta1,
        even_second,
        odd_second,
        odd_third,
        odd_third_consecutive,
        quasi_pairs,
        root_doublets,
    }
}

impl SpectrumReport {
    pub fn lookup(rows: &[DiffRow], n: usize) -> Option<f64> {
        rows.iter().find(|r| r.n == n).map(|r| r.value)
    }

    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    /// Recomputes every derived table from the stored levels.
    pub fn reanalyzed(&self, quasi_tol: f64) -> SpectrumReport {
        let bare: Vec<EnergyLevel> = self
            .levels
            .iter()
            .map(|l| EnergyLevel {
                doublet_partner: None,
                ..*l
            })
            .collect();
        analyze_series(&bare, self.z, self.m, quasi_tol)
    }
}
