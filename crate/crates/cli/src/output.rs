//! CSV tables and the JSON verdict record.
//!
//! Numbers use Rust's shortest round-trip formatting, so identical runs give
//! byte-identical files. Missing values are empty fields; unbounded ratios
//! are written as `inf`.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use curveasym_core::arclength::ArcTrace;
use curveasym_core::asymptote::{LimsupEstimate, RatioTrace};
use curveasym_core::meanvalue::MeanValueTrace;
use curveasym_core::support::ExtReal;

use crate::CliError;

pub const TRACE_HEADER: [&str; 8] = [
    "t",
    "D",
    "DS",
    "DT",
    "ratio_support",
    "ratio_tangent",
    "unbounded",
    "truncation_bound",
];
pub const MEANVALUE_HEADER: [&str; 5] = ["x", "tau", "ratio_h", "ratio_t", "residual"];
pub const ARC_HEADER: [&str; 6] = ["t", "L", "LS", "LT", "ratio_Ls", "ratio_Lt"];

fn num(v: f64) -> String {
    let m = v.abs();
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else if m != 0.0 && !(1e-4..1e15).contains(&m) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn ext(v: Option<ExtReal>) -> String {
    match v {
        Some(ExtReal::Finite(x)) => num(x),
        Some(ExtReal::Unbounded) => "inf".into(),
        None => String::new(),
    }
}

/// Opens `path`, or standard output when `path` is `None`.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => {
            Box::new(File::create(p).map_err(|e| CliError::Input(format!("cannot create {}: {e}", p.display())))?)
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn table<W: Write>(out: W, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()
        .map_err(|e| CliError::Input(format!("cannot write CSV: {e}")))?;
    Ok(())
}

/// One row per successful chord, in sequence order.
pub fn write_trace<W: Write>(out: W, trace: &RatioTrace) -> Result<(), CliError> {
    table(
        out,
        &TRACE_HEADER,
        trace.samples.iter().filter(|s| s.is_ok()).map(|s| {
            vec![
                num(s.t),
                num(s.d),
                ext(s.ds),
                ext(s.dt),
                ext(s.ratio_support),
                ext(s.ratio_tangent),
                s.unbounded.to_string(),
                num(s.truncation_bound),
            ]
        }),
    )
}

pub fn write_meanvalue<W: Write>(out: W, trace: &MeanValueTrace) -> Result<(), CliError> {
    table(
        out,
        &MEANVALUE_HEADER,
        trace
            .results()
            .map(|r| vec![num(r.x), num(r.tau), num(r.ratio_h), num(r.ratio_t), num(r.residual)]),
    )
}

pub fn write_arc<W: Write>(out: W, trace: &ArcTrace) -> Result<(), CliError> {
    table(
        out,
        &ARC_HEADER,
        trace.samples.iter().filter(|s| s.error.is_none()).map(|s| {
            vec![
                num(s.t),
                num(s.l),
                opt(s.ls),
                opt(s.lt),
                opt(s.ratio_ls),
                opt(s.ratio_lt),
            ]
        }),
    )
}

/// A sample that could not be computed.
#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub at: f64,
    pub error: String,
}

/// The machine-readable verdict record.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    /// Tail estimate of the monitored ratio; `null` when unbounded.
    pub estimate: Option<f64>,
    pub bound: f64,
    pub verdict: String,
    pub window: usize,
    pub trend: String,
    /// Tail estimate of the tangent ratio, for curve traces that have one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tangent_estimate: Option<f64>,
    pub rows: usize,
    pub failures: Vec<Failure>,
}

impl Summary {
    pub fn new(est: &LimsupEstimate, bound: f64, verdict: impl ToString, rows: usize, failures: Vec<Failure>) -> Self {
        Summary {
            estimate: est.value.finite(),
            bound,
            verdict: verdict.to_string(),
            window: est.window,
            trend: est.trend.to_string(),
            tangent_estimate: None,
            rows,
            failures,
        }
    }

    /// Human-readable lines for the error stream.
    pub fn describe(&self) -> String {
        let est = self.estimate.map_or("unbounded".to_string(), |v| format!("{v:.10}"));
        let mut s = format!(
            "estimate {est} ({}, window {}), bound {:.10}: {}; {} rows",
            self.trend, self.window, self.bound, self.verdict, self.rows
        );
        if let Some(t) = self.tangent_estimate {
            s.push_str(&format!("; tangent estimate {t:.10}"));
        }
        for f in &self.failures {
            s.push_str(&format!("\n  failed at {}: {}", f.at, f.error));
        }
        s
    }

    pub fn write_json(&self, path: Option<&Path>) -> Result<(), CliError> {
        let mut out = sink(path)?;
        serde_json::to_writer_pretty(&mut out, self)
            .map_err(|e| CliError::Input(format!("cannot write summary: {e}")))?;
        writeln!(out).map_err(|e| CliError::Input(format!("cannot write summary: {e}")))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        assert_eq!(num(0.1), "0.1");
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(num(1.5e-300), "1.5e-300");
        assert_eq!(ext(Some(ExtReal::Unbounded)), "inf");
        assert_eq!(opt(None), "");
        let x = 0.45593812776599624;
        assert_eq!(num(x).parse::<f64>().unwrap(), x);
    }
}
