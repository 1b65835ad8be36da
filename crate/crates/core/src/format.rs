//! CSV and JSON emitters.
//!
//! CSV is comma separated with a header row and LF line endings. Numbers are
//! written with 12 significant digits in lowercase e-notation, so parsing a
//! file and writing it again reproduces it byte for byte.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{CirclePotential, CIRCUMFERENCE, START};
use crate::roots::Sample;
use crate::spectrum::SpectrumReport;

/// `x` with 12 significant digits, e.g. `1.49312338600e-1`.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else if x.is_nan() {
        "nan".to_owned()
    } else if x > 0.0 {
        "inf".to_owned()
    } else {
        "-inf".to_owned()
    }
}

fn parse_num(field: &str) -> Result<f64> {
    match field {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        other => other
            .parse()
            .map_err(|_| Error::Parse(format!("not a number: {other:?}"))),
    }
}

/// One spectrum CSV row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub n: usize,
    pub t: f64,
    pub s: f64,
    pub energy: f64,
    pub delta1: Option<f64>,
    pub series: u8,
    pub doublet_partner: Option<usize>,
}

pub const SPECTRUM_HEADER: &str = "n,t,s,E,delta1,series,doublet_partner";

pub fn spectrum_rows(report: &SpectrumReport) -> Vec<SpectrumRow> {
    report
        .levels
        .iter()
        .map(|l| SpectrumRow {
            n: l.n,
            t: l.t,
            s: l.s,
            energy: l.energy,
            delta1: SpectrumReport::lookup(&report.delta1, l.n),
            series: l.series,
            doublet_partner: l.doublet_partner,
        })
        .collect()
}

pub fn write_spectrum_csv(rows: &[SpectrumRow]) -> String {
    let mut out = String::from(SPECTRUM_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n,
            num(r.t),
            num(r.s),
            num(r.energy),
            r.delta1.map(num).unwrap_or_default(),
            r.series,
            r.doublet_partner.map(|p| p.to_string()).unwrap_or_default()
        );
    }
    out
}

pub fn spectrum_csv(report: &SpectrumReport) -> String {
    write_spectrum_csv(&spectrum_rows(report))
}

pub fn read_spectrum_csv(text: &str) -> Result<Vec<SpectrumRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(SPECTRUM_HEADER) => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header {SPECTRUM_HEADER:?}, got {other:?}"
            )))
        }
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(Error::Parse(format!("expected 7 fields in {line:?}")));
            }
            let int = |s: &str| -> Result<usize> {
                s.parse()
                    .map_err(|_| Error::Parse(format!("not an index: {s:?}")))
            };
            Ok(SpectrumRow {
                n: int(f[0])?,
                t: parse_num(f[1])?,
                s: parse_num(f[2])?,
                energy: parse_num(f[3])?,
                delta1: if f[4].is_empty() {
                    None
                } else {
                    Some(parse_num(f[4])?)
                },
                series: f[5]
                    .parse()
                    .map_err(|_| Error::Parse(format!("not a series label: {:?}", f[5])))?,
                doublet_partner: if f[6].is_empty() {
                    None
                } else {
                    Some(int(f[6])?)
                },
            })
        })
        .collect()
}

pub fn spectrum_json(report: &SpectrumReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)? + "\n")
}

pub fn read_spectrum_json(text: &str) -> Result<SpectrumReport> {
    Ok(serde_json::from_str(text)?)
}

pub fn scan_csv(samples: &[Sample]) -> String {
    let mut out = String::from("t,sign,logmag\n");
    for s in samples {
        let _ = writeln!(out, "{},{},{}", num(s.t), s.sign, num(s.logmag));
    }
    out
}

/// Scan samples side by side for two backends evaluated on the same grid.
pub fn scan_pair_csv(a: &[Sample], b: &[Sample]) -> String {
    let mut out = String::from("t,sign,logmag,sign_explicit,logmag_explicit\n");
    for (x, y) in a.iter().zip(b) {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            num(x.t),
            x.sign,
            num(x.logmag),
            y.sign,
            num(y.logmag)
        );
    }
    out
}

pub fn scan_json(samples: &[Sample]) -> Result<String> {
    // -inf is not representable in JSON; exact zeros carry logmag null
    let rows: Vec<serde_json::Value> = samples
        .iter()
        .map(|s| {
            serde_json::json!({
                "t": s.t,
                "sign": s.sign,
                "logmag": if s.logmag.is_finite() { Some(s.logmag) } else { None },
            })
        })
        .collect();
    Ok(serde_json::to_string_pretty(&rows)? + "\n")
}

/// `Im V` at `samples` cell midpoints, followed by one row per segment edge.
///
/// Columns: `s,im_V,kind` with `kind` either `sample` or `boundary`. A
/// boundary row carries the value of the segment that starts there.
pub fn potential_csv(pot: &CirclePotential, samples: usize) -> String {
    let mut out = String::from("s,im_V,kind\n");
    let step = CIRCUMFERENCE / samples as f64;
    for j in 0..samples {
        let s = START + (j as f64 + 0.5) * step;
        let _ = writeln!(out, "{},{},sample", num(s), num(pot.value_at(s).im));
    }
    let edges = pot.boundaries();
    for (edge, seg) in edges.iter().zip(pot.segments()) {
        let _ = writeln!(out, "{},{},boundary", num(*edge), num(seg.im));
    }
    out
}

pub fn potential_json(pot: &CirclePotential) -> Result<String> {
    Ok(serde_json::to_string_pretty(pot)? + "\n")
}
