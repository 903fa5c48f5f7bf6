//! Ratio traces along sequences `t_k → a` and tail estimates of their upper limit.

use std::f64::consts::E;
use std::fmt;

use rayon::prelude::*;

use crate::curve::{Curve, Domain};
use crate::expr::arccot;
use crate::support::{analyze_chord, ExtReal, SetSelection, SupportConfig};
use crate::{Error, Result};

/// Default ratio of the geometric sequence toward a finite `a`.
pub const DEFAULT_GEOMETRIC_RATIO: f64 = 0.7;
pub const DEFAULT_GEOMETRIC_COUNT: usize = 48;
/// Default growth factor of the sequence toward `a = −∞`.
pub const DEFAULT_EXPONENTIAL_FACTOR: f64 = 1.5;
pub const DEFAULT_EXPONENTIAL_COUNT: usize = 32;
pub const DEFAULT_WINDOW: usize = 8;

/// Relative change between tail halves below which a trend counts as flat.
const FLAT_TOL: f64 = 1e-9;

/// How the parameter approaches the start of the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SequenceSpec {
    /// `t_k = a + (t0 − a)·r^k` with `0 < r < 1`.
    GeometricToFinite { a: f64, t0: f64, r: f64, count: usize },
    /// `t_k = −T0·s^k` with `T0 > 0`, `s > 1`.
    ExponentialToMinusInf { t0: f64, s: f64, count: usize },
}

impl SequenceSpec {
    pub fn count(&self) -> usize {
        match *self {
            SequenceSpec::GeometricToFinite { count, .. } | SequenceSpec::ExponentialToMinusInf { count, .. } => count,
        }
    }

    /// The default sequence for a domain, starting at `t0`.
    pub fn default_for(domain: Domain, t0: f64) -> Self {
        if domain.a().is_finite() {
            SequenceSpec::GeometricToFinite {
                a: domain.a(),
                t0,
                r: DEFAULT_GEOMETRIC_RATIO,
                count: DEFAULT_GEOMETRIC_COUNT,
            }
        } else {
            SequenceSpec::ExponentialToMinusInf {
                t0: -t0,
                s: DEFAULT_EXPONENTIAL_FACTOR,
                count: DEFAULT_EXPONENTIAL_COUNT,
            }
        }
    }
}

/// Expands a sequence spec and checks every term lies in the open domain.
pub fn make_sequence(spec: &SequenceSpec, domain: Domain) -> Result<Vec<f64>> {
    let ts: Vec<f64> = match *spec {
        SequenceSpec::GeometricToFinite { a, t0, r, count } => {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::Input(format!("geometric ratio must lie in (0, 1), got {r}")));
            }
            if a != domain.a() {
                return Err(Error::Input(format!(
                    "sequence limit {a} differs from the domain start {}",
                    domain.a()
                )));
            }
            (0..count).map(|k| a + (t0 - a) * r.powi(k as i32)).collect()
        }
        SequenceSpec::ExponentialToMinusInf { t0, s, count } => {
            if domain.a() != f64::NEG_INFINITY {
                return Err(Error::Input("an exponential sequence needs a = -inf".into()));
            }
            if !(s > 1.0) || !(t0 > 0.0) {
                return Err(Error::Input(format!("need T0 > 0 and s > 1, got T0 = {t0}, s = {s}")));
            }
            (0..count).map(|k| -t0 * s.powi(k as i32)).collect()
        }
    };
    if ts.is_empty() {
        return Err(Error::Input("sequence count must be positive".into()));
    }
    for (k, &t) in ts.iter().enumerate() {
        if !t.is_finite() || !domain.contains_open(t) {
            return Err(Error::Input(format!("sequence term t_{k} = {t} leaves the domain")));
        }
        if k > 0 && !(t < ts[k - 1]) {
            return Err(Error::Input(format!("sequence stalls at t_{k} = {t}")));
        }
    }
    Ok(ts)
}

/// One chord of a ratio trace.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioSample {
    pub t: f64,
    pub d: f64,
    pub ds: Option<ExtReal>,
    pub dt: Option<ExtReal>,
    pub ratio_support: Option<ExtReal>,
    pub ratio_tangent: Option<ExtReal>,
    pub unbounded: bool,
    pub truncation_bound: f64,
    /// Set when the chord analysis failed; the other fields are then empty.
    pub error: Option<Error>,
}

impl RatioSample {
    fn failed(t: f64, error: Error) -> Self {
        RatioSample {
            t,
            d: f64::NAN,
            ds: None,
            dt: None,
            ratio_support: None,
            ratio_tangent: None,
            unbounded: false,
            truncation_bound: f64::NAN,
            error: Some(error),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

/// Which ratio a series is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioKind {
    Support,
    Tangent,
}

impl fmt::Display for RatioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RatioKind::Support => "support",
            RatioKind::Tangent => "tangent",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RatioTrace {
    pub samples: Vec<RatioSample>,
}

impl RatioTrace {
    pub fn failures(&self) -> impl Iterator<Item = &RatioSample> {
        self.samples.iter().filter(|s| !s.is_ok())
    }

    /// The requested ratio of every successful sample, in sequence order.
    pub fn series(&self, kind: RatioKind) -> Vec<ExtReal> {
        self.samples
            .iter()
            .filter_map(|s| match kind {
                RatioKind::Support => s.ratio_support,
                RatioKind::Tangent => s.ratio_tangent,
            })
            .collect()
    }

    pub fn has_tangent(&self) -> bool {
        self.samples.iter().any(|s| s.ratio_tangent.is_some())
    }
}

/// Computes support and (when the curve is differentiable) tangent ratios at
/// every `t_k`, in parallel. Failed chords stay in the trace, flagged.
pub fn ratio_trace(curve: &Curve, seq: &[f64], cfg: &SupportConfig) -> RatioTrace {
    let sets = if curve.has_derivative() {
        SetSelection::BOTH
    } else {
        SetSelection::SUPPORT
    };
    let samples = seq
        .par_iter()
        .map(|&t| match analyze_chord(curve, t, cfg, sets) {
            Ok(r) => RatioSample {
                t,
                d: r.d_t,
                ds: r.ds,
                dt: r.dt_sup,
                ratio_support: r.ratio_support,
                ratio_tangent: r.ratio_tangent,
                unbounded: r.degenerate,
                truncation_bound: r.truncation_bound,
                error: None,
            },
            Err(e) => RatioSample::failed(t, e),
        })
        .collect();
    RatioTrace { samples }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Rising,
    Falling,
    Flat,
}

impl fmt::Display for Trend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trend::Rising => "rising",
            Trend::Falling => "falling",
            Trend::Flat => "flat",
        })
    }
}

/// Tail-window surrogate for `lim sup` of a ratio series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimsupEstimate {
    pub value: ExtReal,
    pub window: usize,
    pub trend: Trend,
    pub all_samples_max: ExtReal,
}

/// Max over the last `window` values; the trend compares the maxima of the
/// older and newer halves of that window.
pub fn limsup_estimate(values: &[ExtReal], window: usize) -> Result<LimsupEstimate> {
    if window < 3 {
        return Err(Error::Input(format!("window must be at least 3, got {window}")));
    }
    if values.len() < window {
        return Err(Error::Input(format!(
            "need at least {window} samples, got {}",
            values.len()
        )));
    }
    let fold = |xs: &[ExtReal]| xs.iter().copied().reduce(ExtReal::max).expect("non-empty");
    let tail = &values[values.len() - window..];
    let value = fold(tail);
    let half = window / 2;
    let older = fold(&tail[..half]);
    let newer = fold(&tail[half..]);
    let trend = match (older, newer) {
        (ExtReal::Finite(o), ExtReal::Finite(n)) => {
            if (n - o).abs() <= FLAT_TOL * o.abs().max(1.0) {
                Trend::Flat
            } else if n > o {
                Trend::Rising
            } else {
                Trend::Falling
            }
        }
        (ExtReal::Unbounded, ExtReal::Unbounded) => Trend::Flat,
        (_, ExtReal::Unbounded) => Trend::Rising,
        (ExtReal::Unbounded, _) => Trend::Falling,
    };
    Ok(LimsupEstimate {
        value,
        window,
        trend,
        all_samples_max: fold(values),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    /// Below the bound with a settled tail. For a proved bound this means the
    /// resolution was insufficient, not that the bound fails.
    Violated,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Compares an estimate with a lower bound.
pub fn check_bound(est: &LimsupEstimate, bound: f64, epsilon: f64) -> Verdict {
    match est.value {
        ExtReal::Unbounded => Verdict::Holds,
        ExtReal::Finite(v) if v >= bound - epsilon => Verdict::Holds,
        ExtReal::Finite(_) if est.trend == Trend::Rising => Verdict::Inconclusive,
        ExtReal::Finite(_) => Verdict::Violated,
    }
}

/// Compares an estimate with the universal lower bound `1/e`.
pub fn check_universal_bound(est: &LimsupEstimate, epsilon: f64) -> Verdict {
    check_bound(est, 1.0 / E, epsilon)
}

/// Families with a known ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedForm {
    /// `ρ = e^{αt}`: `e^{−α·arccot α}`.
    LogSpiral,
    /// `ρ = t^α`: `(1 + 1/α)^{−α}`.
    PowerSpiral,
}

pub fn closed_form_ratio(example: ClosedForm, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Input(format!("alpha must be positive, got {alpha}")));
    }
    Ok(match example {
        ClosedForm::LogSpiral => (-alpha * arccot(alpha)).exp(),
        ClosedForm::PowerSpiral => (-alpha * (1.0 / alpha).ln_1p()).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::real_fn;
    use std::f64::consts::FRAC_PI_4;

    fn fin(xs: &[f64]) -> Vec<ExtReal> {
        xs.iter().map(|&x| ExtReal::Finite(x)).collect()
    }

    #[test]
    fn sequences() {
        let dom = Domain::new(0.0, 2.0).unwrap();
        let spec = SequenceSpec::GeometricToFinite {
            a: 0.0,
            t0: 1.0,
            r: 0.5,
            count: 4,
        };
        assert_eq!(make_sequence(&spec, dom).unwrap(), vec![1.0, 0.5, 0.25, 0.125]);
        let inf = Domain::new(f64::NEG_INFINITY, 0.0).unwrap();
        let spec = SequenceSpec::ExponentialToMinusInf {
            t0: 10.0,
            s: 2.0,
            count: 3,
        };
        assert_eq!(make_sequence(&spec, inf).unwrap(), vec![-10.0, -20.0, -40.0]);
        let bad = SequenceSpec::GeometricToFinite {
            a: 0.0,
            t0: 2.0,
            r: 0.5,
            count: 4,
        };
        assert!(make_sequence(&bad, dom).unwrap_err().is_input());
        let bad = SequenceSpec::GeometricToFinite {
            a: 0.0,
            t0: 1.0,
            r: 1.5,
            count: 4,
        };
        assert!(make_sequence(&bad, dom).is_err());
    }

    #[test]
    fn limsup_and_trend() {
        let flat = limsup_estimate(&fin(&[0.455_938; 10]), 8).unwrap();
        assert_eq!(flat.trend, Trend::Flat);
        assert_eq!(flat.value, ExtReal::Finite(0.455_938));

        let falling: Vec<f64> = (0..20).map(|k| 0.5 + 0.1 * 0.5f64.powi(k)).collect();
        let est = limsup_estimate(&fin(&falling), 8).unwrap();
        assert_eq!(est.trend, Trend::Falling);
        assert_eq!(est.value, ExtReal::Finite(falling[12]));
        assert_eq!(est.all_samples_max, ExtReal::Finite(0.6));

        let mut with_inf = fin(&[0.4; 9]);
        with_inf[7] = ExtReal::Unbounded;
        assert!(limsup_estimate(&with_inf, 5).unwrap().value.is_unbounded());
        assert!(limsup_estimate(&fin(&[0.4; 4]), 5).is_err());
        assert!(limsup_estimate(&fin(&[0.4; 4]), 2).is_err());
    }

    #[test]
    fn verdicts() {
        let est = |v: f64, trend| LimsupEstimate {
            value: ExtReal::Finite(v),
            window: 8,
            trend,
            all_samples_max: ExtReal::Finite(v),
        };
        assert_eq!(check_universal_bound(&est(0.4559, Trend::Flat), 1e-3), Verdict::Holds);
        assert_eq!(
            check_universal_bound(&est(0.30, Trend::Rising), 1e-3),
            Verdict::Inconclusive
        );
        assert_eq!(check_universal_bound(&est(0.30, Trend::Flat), 1e-3), Verdict::Violated);
        assert_eq!(
            check_universal_bound(&est(0.30, Trend::Falling), 1e-3),
            Verdict::Violated
        );
    }

    #[test]
    fn closed_forms() {
        let r = closed_form_ratio(ClosedForm::LogSpiral, 1.0).unwrap();
        assert!((r - (-FRAC_PI_4).exp()).abs() < 1e-15);
        assert!((closed_form_ratio(ClosedForm::PowerSpiral, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((closed_form_ratio(ClosedForm::PowerSpiral, 2.0).unwrap() - 4.0 / 9.0).abs() < 1e-15);
        assert!((closed_form_ratio(ClosedForm::LogSpiral, 100.0).unwrap() - 1.0 / E).abs() < 2e-2);
        assert!(closed_form_ratio(ClosedForm::LogSpiral, 0.0).unwrap_err().is_input());
    }

    #[test]
    fn spiral_trace_is_constant() {
        let c = Curve::polar_log(real_fn(|t| t), Domain::new(f64::NEG_INFINITY, f64::INFINITY).unwrap())
            .unwrap()
            .with_log_derivative(real_fn(|_| 1.0));
        let seq = make_sequence(
            &SequenceSpec::ExponentialToMinusInf {
                t0: 1.0,
                s: 1.5,
                count: 10,
            },
            c.domain(),
        )
        .unwrap();
        let trace = ratio_trace(&c, &seq, &SupportConfig::default());
        assert_eq!(trace.failures().count(), 0);
        let want = (-FRAC_PI_4).exp();
        for kind in [RatioKind::Support, RatioKind::Tangent] {
            for r in trace.series(kind) {
                assert!((r.finite().unwrap() - want).abs() < 1e-9);
            }
        }
    }
}
