use std::fmt::Write as _;
use std::io::Write as _;

use ptcircle::format::{self, num};
use ptcircle::roots::{scan_secular, ScanConfig};
use ptcircle::secular::{ExplicitSecular, DEFAULT_REALITY_TOL};
use ptcircle::solve::{backend_agreement, free_limit_check, property_sweep, solve, SolveOptions};
use ptcircle::spectrum::{DiffRow, SpectrumReport};
use ptcircle::{Backend, CirclePotential, Error, Matching, MonodromySecular, Result};
use serde_json::json;

use crate::{
    AnalyzeArgs, Format, Output, PotentialArgs, Range, ScanArgs, Solver, SpectrumArgs, ValidateArgs,
};

/// Overrides the secular reality tolerance.
const TOL_ENV: &str = "PT_CIRCLE_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Failure = 1,
    Partial = 2,
}

pub fn reality_tol() -> Result<f64> {
    match std::env::var(TOL_ENV) {
        Err(_) => Ok(DEFAULT_REALITY_TOL),
        Ok(raw) => match raw.trim().parse::<f64>() {
            Ok(tol) if tol > 0.0 && tol.is_finite() => Ok(tol),
            _ => Err(Error::Parse(format!(
                "{TOL_ENV} must be a positive number, got {raw:?}"
            ))),
        },
    }
}

fn emit(out: &Output, text: &str) -> Result<()> {
    match &out.output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn check_backend(backend: Backend, m: usize) -> Result<()> {
    if backend != Backend::Monodromy && m != 1 {
        return Err(Error::Domain(format!("{backend} backend requires M=1")));
    }
    Ok(())
}

fn scan_config(z: f64, levels: usize, range: &Range) -> Result<ScanConfig> {
    let mut cfg = ScanConfig::for_levels(z, levels.max(1));
    if let Some(t) = range.t_min {
        cfg.t_min = t;
    }
    if let Some(t) = range.t_max {
        cfg.t_max = t;
    }
    if let Some(n) = range.samples {
        cfg.initial_samples = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn monodromy_secular(z: f64, m: usize, solver: &Solver, tol: f64) -> Result<MonodromySecular> {
    let pot = CirclePotential::square_well(m, z)?;
    let matching = solver
        .matching
        .unwrap_or_else(|| Matching::default_for(&pot));
    Ok(MonodromySecular::new(pot)
        .with_matching(matching)
        .with_reality_tol(tol))
}

pub fn spectrum(args: &SpectrumArgs, tol: f64) -> Result<Status> {
    let (z, m) = (args.model.z, args.model.m);
    CirclePotential::square_well(m, z)?;
    check_backend(args.solver.backend, m)?;
    let mut opts = SolveOptions::new(z, m, args.levels).backend(args.solver.backend);
    opts.matching = args.solver.matching;
    opts.reality_tol = tol;
    if args.range.t_min.is_some() || args.range.t_max.is_some() || args.range.samples.is_some() {
        opts = opts.scan(scan_config(z, args.levels, &args.range)?);
    }
    let run = solve(&opts)?;
    let text = match args.output.format {
        Format::Csv => format::spectrum_csv(&run.report),
        Format::Json => format::spectrum_json(&run.report)?,
    };
    emit(&args.output, &text)?;
    Ok(match run.warning {
        Some(w) => {
            eprintln!("warning: {w}");
            Status::Partial
        }
        None => Status::Success,
    })
}

pub fn scan(args: &ScanArgs, tol: f64) -> Result<Status> {
    let (z, m) = (args.model.z, args.model.m);
    CirclePotential::square_well(m, z)?;
    check_backend(args.solver.backend, m)?;
    let cfg = scan_config(z, args.levels, &args.range)?;
    let explicit =
        || -> Result<_> { scan_secular(&ExplicitSecular::new(z)?.with_reality_tol(tol), &cfg) };
    let mono = || -> Result<_> { scan_secular(&monodromy_secular(z, m, &args.solver, tol)?, &cfg) };
    let text = match (args.solver.backend, args.output.format) {
        (Backend::Monodromy, Format::Csv) => format::scan_csv(&mono()?),
        (Backend::Monodromy, Format::Json) => format::scan_json(&mono()?)?,
        (Backend::Explicit, Format::Csv) => format::scan_csv(&explicit()?),
        (Backend::Explicit, Format::Json) => format::scan_json(&explicit()?)?,
        (Backend::Both, Format::Csv) => format::scan_pair_csv(&mono()?, &explicit()?),
        (Backend::Both, Format::Json) => {
            let a: serde_json::Value = serde_json::from_str(&format::scan_json(&mono()?)?)?;
            let b: serde_json::Value = serde_json::from_str(&format::scan_json(&explicit()?)?)?;
            serde_json::to_string_pretty(&json!({ "monodromy": a, "explicit": b }))? + "\n"
        }
    };
    emit(&args.output, &text)?;
    Ok(Status::Success)
}

pub fn potential(args: &PotentialArgs) -> Result<Status> {
    let pot = CirclePotential::square_well(args.model.m, args.model.z)?;
    if args.samples == 0 {
        return Err(Error::Domain("at least one sample is required".into()));
    }
    let text = match args.output.format {
        Format::Csv => format::potential_csv(&pot, args.samples),
        Format::Json => format::potential_json(&pot)?,
    };
    emit(&args.output, &text)?;
    Ok(Status::Success)
}

pub fn analyze(args: &AnalyzeArgs) -> Result<Status> {
    let text = std::fs::read_to_string(&args.input)?;
    let report = format::read_spectrum_json(&text)?.reanalyzed(args.quasi_tol);
    // the literal third difference first appears at n = 9
    if report.levels.len() < 10 {
        eprintln!(
            "notice: {} levels given; difference tables are truncated (10 needed for all tables)",
            report.levels.len()
        );
    }
    let out = match args.output.format {
        Format::Csv => analysis_csv(&report),
        Format::Json => {
            let value = json!({
                "z": report.z,
                "m": report.m,
                "levels": report.levels.len(),
                "delta1": report.delta1,
                "even_second": report.even_second,
                "odd_second": report.odd_second,
                "odd_third": report.odd_third,
                "odd_third_consecutive": report.odd_third_consecutive,
                "quasi_pairs": report.quasi_pairs,
            });
            serde_json::to_string_pretty(&value)? + "\n"
        }
    };
    emit(&args.output, &out)?;
    Ok(Status::Success)
}

/// `table,n,value` rows; quasi pairs appear as `quasi_gap` keyed by the
/// upper level.
fn analysis_csv(report: &SpectrumReport) -> String {
    let mut out = String::from("table,n,value\n");
    let tables: [(&str, &[DiffRow]); 5] = [
        ("delta1", &report.delta1),
        ("even_second", &report.even_second),
        ("odd_second", &report.odd_second),
        ("odd_third", &report.odd_third),
        ("odd_third_consecutive", &report.odd_third_consecutive),
    ];
    for (name, rows) in tables {
        for r in rows {
            let _ = writeln!(out, "{name},{},{}", r.n, num(r.value));
        }
    }
    for p in &report.quasi_pairs {
        let _ = writeln!(out, "quasi_gap,{},{}", p.upper, num(p.gap));
    }
    out
}

struct Check {
    name: &'static str,
    passed: bool,
    metric: f64,
    tol: f64,
    detail: String,
}

pub fn validate(args: &ValidateArgs, tol: f64) -> Result<Status> {
    let (z, m) = (args.model.z, args.model.m);
    let pot = CirclePotential::square_well(m, z)?;
    check_backend(args.solver.backend, m)?;
    let mut checks = Vec::new();

    let ts: Vec<f64> = (0..400).map(|j| 0.02 + 1.98 * j as f64 / 399.0).collect();
    let sweep = property_sweep(&pot, &ts, tol)?;
    checks.push(Check {
        name: "properties",
        passed: sweep.holds(1e-10),
        metric: sweep.max_wronskian.max(sweep.max_rotation),
        tol: 1e-10,
        detail: format!(
            "max |det-1| {:.1e}, max rotation drift {:.1e}, {} non-real evaluations",
            sweep.max_wronskian,
            sweep.max_rotation,
            sweep.reality_failures.len()
        ),
    });

    if m == 1 {
        let matching = args.solver.matching.unwrap_or(Matching::OriginTwist);
        let cfg = ScanConfig::for_levels(z, 10);
        let a = backend_agreement(z, cfg.t_min, cfg.t_max, matching)?;
        let agreement_tol = ptcircle::solve::AGREEMENT_TOL;
        checks.push(Check {
            name: "cross_backend",
            passed: a.holds(agreement_tol),
            metric: a.max_dt.unwrap_or(f64::INFINITY),
            tol: agreement_tol,
            detail: format!(
                "{} explicit and {} monodromy roots on [{:.3e}, {:.3e}] ({matching})",
                a.explicit.len(),
                a.monodromy.len(),
                cfg.t_min,
                cfg.t_max
            ),
        });
        if z <= 1e-3 {
            let free = free_limit_check(z, 5, args.solver.matching, 1e-3)?;
            let levels: Vec<String> = free.computed.iter().map(|e| format!("{e:.6}")).collect();
            checks.push(Check {
                name: "free_limit",
                passed: free.passed(),
                metric: free.max_dev,
                tol: free.tol,
                detail: format!("lowest levels [{}]", levels.join(" ")),
            });
        }
    }

    let text = match args.output.format {
        Format::Csv => {
            let mut out = String::from("check,passed,metric,tolerance,detail\n");
            for c in &checks {
                let _ = writeln!(
                    out,
                    "{},{},{},{},\"{}\"",
                    c.name,
                    c.passed,
                    num(c.metric),
                    num(c.tol),
                    c.detail.replace('"', "'")
                );
            }
            out
        }
        Format::Json => {
            let rows: Vec<_> = checks
                .iter()
                .map(|c| {
                    json!({
                        "check": c.name,
                        "passed": c.passed,
                        "metric": if c.metric.is_finite() { Some(c.metric) } else { None },
                        "tolerance": c.tol,
                        "detail": c.detail,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&rows)? + "\n"
        }
    };
    emit(&args.output, &text)?;
    for c in checks.iter().filter(|c| !c.passed) {
        eprintln!("validation failed: {}: {}", c.name, c.detail);
    }
    Ok(if checks.iter().all(|c| c.passed) {
        Status::Success
    } else {
        Status::Failure
    })
}
