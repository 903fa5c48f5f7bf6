//! Arc-length versions of the support/tangent ratios, and the test whether
//! `L(t)/D(t) → 1` as `t → a`.
//!
//! The arc-length bounds are unproven, so a low tail is never
//! reported as a counterexample: the harness refines and then reports the
//! case as unresolved.

use std::f64::consts::E;
use std::fmt;

use rayon::prelude::*;

use crate::asymptote::{check_bound, limsup_estimate, LimsupEstimate, Verdict};
use crate::curve::Curve;
use crate::support::{analyze_chord, ExtReal, MarkedPoint, PointKind, SetSelection, SupportConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcConfig {
    pub support: SupportConfig,
    /// Arc-length error target relative to `D(t)`.
    pub rel_tol: f64,
    pub window: usize,
    pub epsilon: f64,
    /// How many times the grid may be refined (4× each) before a low tail is
    /// reported as unresolved.
    pub refine_budget: u32,
}

impl Default for ArcConfig {
    fn default() -> Self {
        ArcConfig {
            support: SupportConfig::default(),
            rel_tol: 1e-10,
            window: 8,
            epsilon: 1e-3,
            refine_budget: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArcSample {
    pub t: f64,
    pub d: f64,
    /// `L(t)`, measured from the start (from the cutoff when `a = −∞`).
    pub l: f64,
    /// `sup{L(τ) | τ ∈ S(t)}`.
    pub ls: Option<f64>,
    /// `sup{L(τ) | τ ∈ T(t)}`.
    pub lt: Option<f64>,
    pub ratio_ls: Option<f64>,
    pub ratio_lt: Option<f64>,
    pub error: Option<Error>,
}

impl ArcSample {
    fn failed(t: f64, e: Error) -> Self {
        ArcSample {
            t,
            d: f64::NAN,
            l: f64::NAN,
            ls: None,
            lt: None,
            ratio_ls: None,
            ratio_lt: None,
            error: Some(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcVerdict {
    Holds,
    /// Below the bound even after refinement; not a counterexample.
    Unresolved,
}

impl fmt::Display for ArcVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArcVerdict::Holds => "holds",
            ArcVerdict::Unresolved => "unresolved",
        })
    }
}

#[derive(Debug, Clone)]
pub struct ArcTrace {
    pub samples: Vec<ArcSample>,
    pub support_estimate: Option<LimsupEstimate>,
    pub tangent_estimate: Option<LimsupEstimate>,
    pub verdict: ArcVerdict,
    /// Grid size of the final pass.
    pub n_grid: usize,
}

/// Largest parameter of a set; a plateau contributes its right end.
fn largest_tau(points: &[MarkedPoint]) -> Option<f64> {
    points
        .iter()
        .map(|p| {
            if p.kind == PointKind::Plateau {
                p.bracket.1
            } else {
                p.tau
            }
        })
        .reduce(f64::max)
}

fn arc_sample(curve: &Curve, t: f64, cfg: &ArcConfig) -> Result<ArcSample> {
    let sets = if curve.has_derivative() {
        SetSelection::BOTH
    } else {
        SetSelection::SUPPORT
    };
    let report = analyze_chord(curve, t, &cfg.support, sets)?;
    let Some(frame) = curve.chord_frame(t)? else {
        return Err(Error::Resolution(format!("chord at t = {t} has zero length")));
    };
    // lengths in units of D(t), so they survive when D(t) underflows
    let left = report.a_eff - t;
    let length = |tau: f64| -> Result<f64> {
        let s = tau - t;
        if s <= left {
            Ok(0.0)
        } else {
            frame.arc_length_from(left, s, cfg.rel_tol)
        }
    };
    let l = length(t)?;
    let ls = largest_tau(&report.support).map(length).transpose()?;
    let lt = largest_tau(&report.tangent).map(length).transpose()?;
    let ratio = |v: Option<f64>| v.map(|v| if l > 0.0 { v / l } else { 1.0 });
    let d = report.d_t;
    Ok(ArcSample {
        t,
        d,
        l: l * d,
        ls: ls.map(|v| v * d),
        lt: lt.map(|v| v * d),
        ratio_ls: ratio(ls),
        ratio_lt: ratio(lt),
        error: None,
    })
}

fn estimate(samples: &[ArcSample], pick: fn(&ArcSample) -> Option<f64>, window: usize) -> Option<LimsupEstimate> {
    let series: Vec<ExtReal> = samples.iter().filter_map(pick).map(ExtReal::Finite).collect();
    limsup_estimate(&series, window).ok()
}

/// Traces the arc-length ratios along `seq`. A tail below `1/e − ε` triggers
/// up to `refine_budget` grid refinements before the result is reported as
/// unresolved.
pub fn arc_ratio_trace(curve: &Curve, seq: &[f64], cfg: &ArcConfig) -> ArcTrace {
    let mut cfg = *cfg;
    let mut pass = 0;
    loop {
        let samples: Vec<ArcSample> = seq
            .par_iter()
            .map(|&t| arc_sample(curve, t, &cfg).unwrap_or_else(|e| ArcSample::failed(t, e)))
            .collect();
        let support_estimate = estimate(&samples, |s| s.ratio_ls, cfg.window);
        let tangent_estimate = estimate(&samples, |s| s.ratio_lt, cfg.window);
        let low = [support_estimate, tangent_estimate]
            .iter()
            .flatten()
            .any(|e| check_bound(e, 1.0 / E, cfg.epsilon) != Verdict::Holds);
        let missing = support_estimate.is_none();
        if (!low && !missing) || pass >= cfg.refine_budget {
            let verdict = if low || missing {
                ArcVerdict::Unresolved
            } else {
                ArcVerdict::Holds
            };
            return ArcTrace {
                samples,
                support_estimate,
                tangent_estimate,
                verdict,
                n_grid: cfg.support.n_grid,
            };
        }
        pass += 1;
        cfg.support.n_grid *= 4;
    }
}

/// `L(t)/D(t)` along a sequence with a verdict on whether it tends to 1.
#[derive(Debug, Clone)]
pub struct Eq6Report {
    /// `(t, L(t), D(t), L/D)`; failed samples are dropped and counted.
    pub samples: Vec<(f64, f64, f64, f64)>,
    pub failures: usize,
    /// Range of `L/D` over the tail window.
    pub tail_range: (f64, f64),
    pub band: f64,
    /// Every tail value lies within `band` of 1.
    pub tends_to_one: bool,
}

/// Checks `L(t) ∼ D(t)` on the last `window` samples of `seq`.
pub fn eq6_check(curve: &Curve, seq: &[f64], window: usize, band: f64, cfg: &ArcConfig) -> Result<Eq6Report> {
    let rows: Vec<Result<(f64, f64, f64, f64)>> = seq
        .par_iter()
        .map(|&t| {
            let frame = curve
                .chord_frame(t)?
                .ok_or_else(|| Error::Resolution(format!("chord at t = {t} has zero length")))?;
            let left = cfg.support.left_end(curve, t) - t;
            let ratio = frame.arc_length_from(left, 0.0, cfg.rel_tol)?;
            let d = frame.chord_length();
            Ok((t, ratio * d, d, ratio))
        })
        .collect();
    let failures = rows.iter().filter(|r| r.is_err()).count();
    let samples: Vec<_> = rows.into_iter().filter_map(|r| r.ok()).collect();
    if samples.len() < window || window == 0 {
        return Err(Error::Input(format!(
            "need at least {window} successful samples, got {}",
            samples.len()
        )));
    }
    let tail = &samples[samples.len() - window..];
    let lo = tail.iter().map(|s| s.3).fold(f64::INFINITY, f64::min);
    let hi = tail.iter().map(|s| s.3).fold(f64::NEG_INFINITY, f64::max);
    Ok(Eq6Report {
        tends_to_one: (lo - 1.0).abs() <= band && (hi - 1.0).abs() <= band,
        samples,
        failures,
        tail_range: (lo, hi),
        band,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptote::{make_sequence, SequenceSpec};
    use crate::catalog;
    use crate::curve::{real_fn, Domain};

    fn geometric(curve: &Curve, t0: f64, count: usize) -> Vec<f64> {
        make_sequence(
            &SequenceSpec::GeometricToFinite {
                a: 0.0,
                t0,
                r: 0.7,
                count,
            },
            curve.domain(),
        )
        .unwrap()
    }

    #[test]
    fn segment_ratios_are_one() {
        let c = Curve::cartesian(
            real_fn(|t| t),
            real_fn(|t| 2.0 * t),
            Domain::new(0.0, 2.0).unwrap(),
            None,
        )
        .unwrap()
        .with_xy_derivative(real_fn(|_| 1.0), real_fn(|_| 2.0));
        let tr = arc_ratio_trace(&c, &geometric(&c, 1.0, 10), &ArcConfig::default());
        for s in &tr.samples {
            assert!((s.ratio_ls.unwrap() - 1.0).abs() < 1e-9);
            assert!((s.ratio_lt.unwrap() - 1.0).abs() < 1e-9);
        }
        let r = eq6_check(&c, &geometric(&c, 1.0, 10), 5, 1e-12, &ArcConfig::default()).unwrap();
        assert!(r.tends_to_one);
    }

    #[test]
    fn circle_support_sits_at_arc_midpoint() {
        let c = Curve::cartesian(
            real_fn(f64::sin),
            real_fn(|t| 2.0 * (0.5 * t).sin().powi(2)),
            Domain::new(0.0, 6.0).unwrap(),
            None,
        )
        .unwrap()
        .with_xy_derivative(real_fn(f64::cos), real_fn(f64::sin));
        let tr = arc_ratio_trace(
            &c,
            &[2.0, 1.0, 0.5],
            &ArcConfig {
                window: 3,
                ..Default::default()
            },
        );
        for s in &tr.samples {
            assert!((s.ratio_ls.unwrap() - 0.5).abs() < 1e-9, "{s:?}");
        }
        assert_eq!(tr.verdict, ArcVerdict::Holds);
    }

    #[test]
    fn log_spiral_arc_ratio_and_eq6() {
        let c = catalog::log_spiral(1.0).unwrap();
        let seq = [-1.0, -2.0, -4.0, -8.0];
        let tr = arc_ratio_trace(
            &c,
            &seq,
            &ArcConfig {
                window: 3,
                ..Default::default()
            },
        );
        for s in &tr.samples {
            assert!((s.ratio_ls.unwrap() - (-std::f64::consts::FRAC_PI_4).exp()).abs() < 1e-9);
        }
        let r = eq6_check(&c, &seq, 3, 1e-4, &ArcConfig::default()).unwrap();
        assert!(!r.tends_to_one);
        assert!((r.tail_range.0 - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn polygon_lengths() {
        let c = catalog::polygonal_spiral(0.2).unwrap();
        let h = std::f64::consts::PI / 3.0;
        // one edge between consecutive vertices
        let l = c.arc_length(0.0, h, 1e-12).unwrap();
        let (p, q) = (c.eval_point(0.0).unwrap(), c.eval_point(h).unwrap());
        assert!((l - (q - p).norm()).abs() < 1e-12);
        let tr = arc_ratio_trace(
            &c,
            &[-1.0, -1.5, -2.25, -3.375],
            &ArcConfig {
                window: 3,
                ..Default::default()
            },
        );
        assert!(tr.samples.iter().all(|s| s.error.is_none()));
    }
}
