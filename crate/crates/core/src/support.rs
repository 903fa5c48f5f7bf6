//! Support and tangent points of a curve with respect to the chord
//! `[γ(a), γ(t)]`, and the distances `DS(t)`, `DT(t)`.
//!
//! A point `γ(τ)` supports the chord when `τ` is a local extremum of
//! `Φ(τ) = (γ(t) − γ(a)) × (γ(τ) − γ(a))`; it is a tangent point when
//! `γ′(τ)` is collinear with the chord. Both sets are located on a sampled
//! grid over `(a_eff, t]` and refined: support points by ternary search on
//! `Φ` (derivative-free), tangent points by bisection on the tangency
//! residual. All work happens in the chord frame of [`ChordFrame`], so the
//! ratios `DS/D` and `DT/D` are computed directly rather than as quotients
//! of tiny or huge numbers.

use std::f64::consts::PI;
use std::fmt;

use crate::curve::{ChordFrame, Curve, DerivativeSource, Vec2};
use crate::error::{Error, Result};
use crate::numeric::{self, ExtremumKind, GridRoot};

/// A real number or the unbounded marker used for degenerate chords.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Unbounded,
}

impl ExtReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Unbounded => None,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, ExtReal::Unbounded)
    }

    /// Total order with `Unbounded` above every finite value.
    pub fn max(self, other: ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a.max(b)),
            _ => ExtReal::Unbounded,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Unbounded => f.write_str("inf"),
        }
    }
}

/// Scan and refinement settings for one chord.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportConfig {
    /// Uniform grid steps over `(a_eff, t]`.
    pub n_grid: usize,
    /// Refinement bracket width; `None` means `1e-10 · (t − a_eff)`.
    pub refine_tol: Option<f64>,
    /// Relative threshold below which successive `Φ` samples count as equal.
    pub plateau_eps: f64,
    /// Relative threshold below which the tangency residual counts as zero;
    /// `None` picks `1e-12` for analytic and `1e-8` for numeric derivatives.
    pub tangent_eps: Option<f64>,
    /// Window width `t − a_eff` used when `a = −∞`.
    pub left_cutoff: f64,
    /// Number of geometric grid points clustered next to `τ = t`.
    pub cluster: usize,
}

impl Default for SupportConfig {
    fn default() -> Self {
        SupportConfig {
            n_grid: 4096,
            refine_tol: None,
            plateau_eps: 1e-13,
            tangent_eps: None,
            left_cutoff: 8.0 * PI,
            cluster: 30,
        }
    }
}

impl SupportConfig {
    pub fn with_grid(n_grid: usize) -> Self {
        SupportConfig {
            n_grid,
            ..Default::default()
        }
    }

    /// Effective left end of the scanned window for the chord at `t`.
    pub fn left_end(&self, curve: &Curve, t: f64) -> f64 {
        let a = curve.domain().a();
        if a.is_finite() {
            a
        } else {
            t - self.left_cutoff
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_grid < 16 {
            return Err(Error::Input(format!("n_grid must be at least 16, got {}", self.n_grid)));
        }
        if !(self.left_cutoff > 0.0 && self.left_cutoff.is_finite()) {
            return Err(Error::Input(format!(
                "left cutoff must be positive, got {}",
                self.left_cutoff
            )));
        }
        if let Some(tol) = self.refine_tol {
            if !(tol > 0.0) {
                return Err(Error::Input(format!("refine_tol must be positive, got {tol}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointKind {
    SupportMax,
    SupportMin,
    TangentRoot,
    /// A run of parameters that all qualify (constant `Φ`, or tangent
    /// direction along the chord over an interval).
    Plateau,
}

/// A parameter in `S(t)` or `T(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkedPoint {
    pub tau: f64,
    /// `τ − t`, carried at full precision.
    pub offset: f64,
    pub kind: PointKind,
    /// `D(τ)`.
    pub d_tau: f64,
    /// `D(τ)/D(t)`.
    pub relative_distance: f64,
    /// Support points: width of the final refinement bracket. Tangent roots:
    /// sine of the angle between `γ′(τ)` and the chord. Plateaus: zero.
    pub residual: f64,
    /// Parameter bracket containing `τ` (the whole run for plateaus).
    pub bracket: (f64, f64),
}

/// Support and/or tangent sets for one chord.
#[derive(Debug, Clone, PartialEq)]
pub struct ChordReport {
    pub t: f64,
    /// `D(t)`.
    pub d_t: f64,
    /// Left end of the scanned window.
    pub a_eff: f64,
    pub grid_points: usize,
    /// `D(t) = 0`: every `τ ∈ (a, t]` qualifies and the ratios are unbounded.
    pub degenerate: bool,
    pub support: Vec<MarkedPoint>,
    pub tangent: Vec<MarkedPoint>,
    /// `DS(t)`, when the support set was computed.
    pub ds: Option<ExtReal>,
    /// `DT(t)`, when the tangent set was computed.
    pub dt_sup: Option<ExtReal>,
    /// `DS(t)/D(t)`.
    pub ratio_support: Option<ExtReal>,
    /// `DT(t)/D(t)`.
    pub ratio_tangent: Option<ExtReal>,
    /// `D(a_eff)/D(t)` when `a = −∞` (what a curve with `D` increasing in `τ`
    /// could still hide beyond the cutoff), zero otherwise.
    pub truncation_bound: f64,
}

impl ChordReport {
    /// Support points followed by tangent points.
    pub fn points(&self) -> impl Iterator<Item = &MarkedPoint> {
        self.support.iter().chain(self.tangent.iter())
    }
}

/// `Φ(τ) = (γ(t) − γ(a)) × (γ(τ) − γ(a))`.
pub fn phi_value(curve: &Curve, t: f64, tau: f64) -> Result<f64> {
    let dom = curve.domain();
    dom.check_open(t)?;
    if !(tau > dom.a() && tau <= t) {
        return Err(Error::Input(format!(
            "tau = {tau} must lie in (a, t] = ({}, {t}]",
            dom.a()
        )));
    }
    let o = curve.start_point();
    let chord = curve.eval_point(t)? - o;
    Ok(chord.cross(curve.eval_point(tau)? - o))
}

/// Which sets [`analyze_chord`] should build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetSelection {
    pub support: bool,
    pub tangent: bool,
}

impl SetSelection {
    pub const SUPPORT: SetSelection = SetSelection {
        support: true,
        tangent: false,
    };
    pub const TANGENT: SetSelection = SetSelection {
        support: false,
        tangent: true,
    };
    pub const BOTH: SetSelection = SetSelection {
        support: true,
        tangent: true,
    };
}

/// `S(t)` and `DS(t)`.
pub fn find_support_set(curve: &Curve, t: f64, cfg: &SupportConfig) -> Result<ChordReport> {
    analyze_chord(curve, t, cfg, SetSelection::SUPPORT)
}

/// `T(t)` and `DT(t)`. Tangency roots of even multiplicity (no sign change)
/// are only found when they land on a grid sample.
pub fn find_tangent_set(curve: &Curve, t: f64, cfg: &SupportConfig) -> Result<ChordReport> {
    analyze_chord(curve, t, cfg, SetSelection::TANGENT)
}

struct Scan<'c> {
    frame: ChordFrame<'c>,
    offsets: Vec<f64>,
    /// Offset of `τ = a` when `a` is finite (first grid sample), else `None`.
    start_offset: Option<f64>,
    refine_tol: f64,
    deriv_step: f64,
    plateau_eps: f64,
    tangent_eps: f64,
    right_room: f64,
    /// Spacing of the uniform part of the grid.
    uniform_step: f64,
}

impl Scan<'_> {
    fn marked(&self, offset: f64, kind: PointKind, residual: f64, bracket: (f64, f64)) -> Result<MarkedPoint> {
        let rel = self.frame.relative_distance(offset)?;
        let t = self.frame.t();
        Ok(MarkedPoint {
            tau: t + offset,
            offset,
            kind,
            d_tau: rel * self.frame.chord_length(),
            relative_distance: rel,
            residual,
            bracket: (t + bracket.0, t + bracket.1),
        })
    }

    fn plateau(&self, first: usize, last: usize) -> Result<MarkedPoint> {
        let mut best = (f64::NEG_INFINITY, self.offsets[last]);
        for &s in &self.offsets[first..=last] {
            if Some(s) == self.start_offset {
                continue;
            }
            let r = self.frame.relative_distance(s)?;
            if r > best.0 {
                best = (r, s);
            }
        }
        self.marked(
            best.1,
            PointKind::Plateau,
            0.0,
            (self.offsets[first], self.offsets[last]),
        )
    }

    fn tangency(&self, s: f64) -> Result<f64> {
        Ok(self.frame.velocity(s, self.deriv_step)?.y)
    }

    fn refine_extremum(&self, lo: f64, hi: f64, maximize: bool, polish: bool) -> Result<(f64, f64)> {
        let (mut a, mut b) =
            numeric::ternary_search(|s| Ok(self.frame.point(s)?.y), lo, hi, maximize, self.refine_tol)?;
        if polish {
            // Tangency polish: Φ′ vanishes at a smooth extremum, and the
            // residual is resolvable far below the ternary noise floor.
            let inner = |s: f64| -> Option<f64> {
                if self.start_offset == Some(s) {
                    return None;
                }
                self.tangency(s).ok()
            };
            // The ternary bracket can sit just off the root when Φ is flat at
            // rounding level, so widen it until the residual changes sign.
            let mut w = (b - a).max(f64::EPSILON * a.abs().max(b.abs()));
            loop {
                let pa = (a - w).max(lo);
                let pb = (b + w).min(hi);
                if let (Some(ra), Some(rb)) = (inner(pa), inner(pb)) {
                    if ra != 0.0 && rb != 0.0 && ra.signum() != rb.signum() {
                        if let Ok(root) = numeric::bisect(|s| self.tangency(s), pa, pb, ra, rb) {
                            let ulp = f64::EPSILON * root.abs().max(f64::MIN_POSITIVE);
                            a = root - ulp;
                            b = root + ulp;
                        }
                        break;
                    }
                }
                if pa <= lo && pb >= hi {
                    break;
                }
                w *= 4.0;
            }
        }
        Ok((0.5 * (a + b), b - a))
    }

    fn support_points(&self, values: &[f64], scales: &[f64], polish: bool) -> Result<Vec<MarkedPoint>> {
        let n = self.offsets.len();
        let mut out = Vec::new();
        let grid = (self.offsets.as_slice(), self.uniform_step);
        for ext in numeric::scan_extrema_on(values, scales, self.plateau_eps, Some(grid)) {
            match ext.kind {
                ExtremumKind::Plateau => out.push(self.plateau(ext.first, ext.last)?),
                kind => {
                    let (lo, hi) = (self.offsets[ext.first - 1], self.offsets[ext.last + 1]);
                    let maximize = kind == ExtremumKind::Max;
                    let (s, width) = self.refine_extremum(lo, hi, maximize, polish)?;
                    let pk = if maximize {
                        PointKind::SupportMax
                    } else {
                        PointKind::SupportMin
                    };
                    out.push(self.marked(s, pk, width, (lo, hi))?);
                }
            }
        }
        // τ = t is a support point only if Φ has a two-sided extremum there,
        // which needs a probe beyond t.
        if n >= 2 && self.right_room > 0.0 {
            let eps = self.plateau_eps;
            let last = values[n - 1];
            // Skip the flat tail the cluster produces when Φ is quadratic at t.
            let mut k = n - 2;
            while k > 0 && (last - values[k]).abs() <= eps * scales[k].max(scales[n - 1]) {
                k -= 1;
            }
            let gap = self.offsets[n - 1] - self.offsets[k];
            let probe = gap.min(0.5 * self.right_room);
            let (p, terms) = self.frame.point_with_scale(probe)?;
            let left = last - values[k];
            let left_scale = scales[n - 1].max(scales[k]);
            let right = p.y - last;
            let right_scale = scales[n - 1].max(noise_scale(p, terms));
            let left_up = left > eps * left_scale;
            let left_down = left < -eps * left_scale;
            let right_up = right > eps * right_scale;
            let right_down = right < -eps * right_scale;
            let kind = if left_up && right_down {
                Some(PointKind::SupportMax)
            } else if left_down && right_up {
                Some(PointKind::SupportMin)
            } else {
                None
            };
            if let Some(kind) = kind {
                // A trailing plateau ending at t is subsumed by the endpoint.
                if k < n - 2 {
                    let t0 = self.frame.t() + self.offsets[k];
                    out.retain(|p| !(p.kind == PointKind::Plateau && p.bracket.0 >= t0));
                }
                out.push(self.marked(0.0, kind, 0.0, (self.offsets[k], probe))?);
            }
        }
        Ok(out)
    }

    fn tangent_points(&self) -> Result<Vec<MarkedPoint>> {
        let skip = usize::from(self.start_offset.is_some());
        let offsets = &self.offsets[skip..];
        let mut values = Vec::with_capacity(offsets.len());
        let mut scales = Vec::with_capacity(offsets.len());
        for &s in offsets {
            let (v, terms) = self.frame.velocity_with_scale(s, self.deriv_step)?;
            values.push(v.y);
            scales.push(noise_scale(v, terms));
        }
        let mut out = Vec::new();
        for root in numeric::scan_roots(&values, &scales, self.tangent_eps) {
            match root {
                GridRoot::Bracket(i) => {
                    let s = numeric::bisect(
                        |s| self.tangency(s),
                        offsets[i],
                        offsets[i + 1],
                        values[i],
                        values[i + 1],
                    )?;
                    out.push(self.tangent_root(s, (offsets[i], offsets[i + 1]))?);
                }
                GridRoot::Sample(i) => {
                    let (lo, hi) = (i.saturating_sub(1), (i + 1).min(offsets.len() - 1));
                    let crossing = lo < i && hi > i && values[lo] * values[hi] < 0.0;
                    let s = if crossing {
                        numeric::bisect(|s| self.tangency(s), offsets[lo], offsets[hi], values[lo], values[hi])?
                    } else {
                        offsets[i]
                    };
                    out.push(self.tangent_root(s, (offsets[lo], offsets[hi]))?);
                }
                GridRoot::Run(i, j) => out.push(self.plateau(i + skip, j + skip)?),
            }
        }
        Ok(out)
    }

    fn tangent_root(&self, s: f64, bracket: (f64, f64)) -> Result<MarkedPoint> {
        let v = self.frame.velocity(s, self.deriv_step)?;
        let n = v.norm();
        let residual = if n > 0.0 { (v.y / n).abs() } else { 0.0 };
        self.marked(s, PointKind::TangentRoot, residual, bracket)
    }
}

/// Rounding scale of a chord-frame `Φ` sample: the size of the terms it is
/// computed from. A point off the start lying exactly on the chord line gets
/// a tiny positive scale so that a collinear stretch reads as flat, not void.
fn noise_scale(p: Vec2, terms: f64) -> f64 {
    if terms > 0.0 || p.norm() == 0.0 {
        terms
    } else {
        f64::MIN_POSITIVE
    }
}

fn sup_ratio(points: &[MarkedPoint]) -> Option<f64> {
    points
        .iter()
        .map(|p| p.relative_distance)
        .fold(None, |m, r| Some(m.map_or(r, |m: f64| m.max(r))))
}

/// Builds the requested sets for the chord at `t`.
pub fn analyze_chord(curve: &Curve, t: f64, cfg: &SupportConfig, sets: SetSelection) -> Result<ChordReport> {
    cfg.validate()?;
    let dom = curve.domain();
    dom.check_open(t)?;
    if sets.tangent && !curve.has_derivative() {
        return Err(Error::Capability("tangent set needs a differentiable curve".into()));
    }
    let a_eff = cfg.left_end(curve, t);
    if !(a_eff < t) {
        return Err(Error::Input(format!("empty window ({a_eff}, {t}]")));
    }
    let window = t - a_eff;
    let start_offset = dom.a().is_finite().then_some(a_eff - t);
    let offsets = numeric::graded_grid(a_eff - t, 0.0, cfg.n_grid, cfg.cluster);

    let Some(frame) = curve.chord_frame(t)? else {
        return degenerate_report(curve, t, a_eff, &offsets, start_offset, sets);
    };

    let tangent_eps = cfg.tangent_eps.unwrap_or(match curve.derivative_source() {
        DerivativeSource::Analytic => 1e-12,
        _ => 1e-8,
    });
    let scan = Scan {
        frame,
        start_offset,
        refine_tol: cfg.refine_tol.unwrap_or(1e-10 * window),
        deriv_step: 1e-6 * window,
        plateau_eps: cfg.plateau_eps,
        tangent_eps,
        right_room: if dom.b().is_finite() {
            dom.b() - t
        } else {
            f64::INFINITY
        },
        uniform_step: window / cfg.n_grid as f64,
        offsets,
    };

    let mut report = ChordReport {
        t,
        d_t: frame.chord_length(),
        a_eff,
        grid_points: scan.offsets.len(),
        degenerate: false,
        support: Vec::new(),
        tangent: Vec::new(),
        ds: None,
        dt_sup: None,
        ratio_support: None,
        ratio_tangent: None,
        truncation_bound: if start_offset.is_some() {
            0.0
        } else {
            frame.relative_distance(a_eff - t)?
        },
    };

    if sets.support {
        let mut values = Vec::with_capacity(scan.offsets.len());
        let mut scales = Vec::with_capacity(scan.offsets.len());
        for &s in &scan.offsets {
            let (p, terms) = frame.point_with_scale(s)?;
            values.push(p.y);
            scales.push(noise_scale(p, terms));
        }
        let pts = scan.support_points(&values, &scales, curve.has_derivative())?;
        if pts.is_empty() {
            return Err(Error::Resolution(format!(
                "no support point resolved for the chord at t = {t}; increase n_grid (now {})",
                cfg.n_grid
            )));
        }
        let r = sup_ratio(&pts).unwrap_or(0.0);
        report.ratio_support = Some(ExtReal::Finite(r));
        report.ds = Some(ExtReal::Finite(r * report.d_t));
        report.support = pts;
    }
    if sets.tangent {
        let pts = scan.tangent_points()?;
        if pts.is_empty() {
            return Err(Error::Resolution(format!(
                "no tangent point resolved for the chord at t = {t}; increase n_grid (now {})",
                cfg.n_grid
            )));
        }
        let r = sup_ratio(&pts).unwrap_or(0.0);
        report.ratio_tangent = Some(ExtReal::Finite(r));
        report.dt_sup = Some(ExtReal::Finite(r * report.d_t));
        report.tangent = pts;
    }
    Ok(report)
}

fn degenerate_report(
    curve: &Curve,
    t: f64,
    a_eff: f64,
    offsets: &[f64],
    start_offset: Option<f64>,
    sets: SetSelection,
) -> Result<ChordReport> {
    // Every τ ∈ (a, t] qualifies; report one plateau at the farthest sample.
    let mut best = (f64::NEG_INFINITY, t);
    for &s in offsets {
        if Some(s) == start_offset {
            continue;
        }
        let d = curve.distance_from_start(t + s)?;
        if d > best.0 {
            best = (d, t + s);
        }
    }
    let plateau = MarkedPoint {
        tau: best.1,
        offset: best.1 - t,
        kind: PointKind::Plateau,
        d_tau: best.0,
        relative_distance: f64::INFINITY,
        residual: 0.0,
        bracket: (a_eff, t),
    };
    let pick = |on: bool| on.then_some(ExtReal::Unbounded);
    Ok(ChordReport {
        t,
        d_t: 0.0,
        a_eff,
        grid_points: offsets.len(),
        degenerate: true,
        support: if sets.support { vec![plateau] } else { Vec::new() },
        tangent: if sets.tangent { vec![plateau] } else { Vec::new() },
        ds: pick(sets.support),
        dt_sup: pick(sets.tangent),
        ratio_support: pick(sets.support),
        ratio_tangent: pick(sets.tangent),
        truncation_bound: 0.0,
    })
}

/// Solutions `τ ∈ (a_eff, t]` of `ρ(τ)cos(t−τ) − ρ′(τ)sin(t−τ) = 0` for a
/// polar curve, largest first, at most `n_max` of them.
pub fn tangent_set_polar(curve: &Curve, t: f64, n_max: usize, cfg: &SupportConfig) -> Result<Vec<f64>> {
    Ok(tangent_offsets_polar(curve, t, n_max, cfg)?
        .into_iter()
        .map(|s| t + s)
        .collect())
}

/// As [`tangent_set_polar`], returning offsets `τ − t` at full precision.
pub fn tangent_offsets_polar(curve: &Curve, t: f64, n_max: usize, cfg: &SupportConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let dom = curve.domain();
    dom.check_open(t)?;
    if curve.kind() != crate::curve::CurveKind::Polar {
        return Err(Error::Capability("tangent_set_polar needs a polar curve".into()));
    }
    let a_eff = cfg.left_end(curve, t);
    let window = t - a_eff;
    let h = 1e-6 * window;
    let Some(frame) = curve.chord_frame(t)? else {
        return Err(Error::Input(format!("rho({t}) = 0: the chord is degenerate")));
    };
    let offsets = numeric::graded_grid(a_eff - t, 0.0, cfg.n_grid, cfg.cluster);
    let skip = usize::from(dom.a().is_finite());
    let offsets = &offsets[skip..];
    let residual = |s: f64| -> Result<f64> {
        let (q, dq) = frame.radius_and_slope(s, h)?;
        // t − τ = −s
        Ok(q * s.cos() + dq * s.sin())
    };
    let mut values = Vec::with_capacity(offsets.len());
    let mut scales = Vec::with_capacity(offsets.len());
    for &s in offsets {
        let (q, dq) = frame.radius_and_slope(s, h)?;
        values.push(q * s.cos() + dq * s.sin());
        scales.push(q.abs() + dq.abs());
    }
    let mut roots = Vec::new();
    for r in numeric::scan_roots(&values, &scales, 1e-14) {
        match r {
            GridRoot::Bracket(i) => roots.push(numeric::bisect(
                residual,
                offsets[i],
                offsets[i + 1],
                values[i],
                values[i + 1],
            )?),
            GridRoot::Sample(i) => {
                let crossing = i > 0 && i + 1 < offsets.len() && values[i - 1] * values[i + 1] < 0.0;
                if crossing {
                    roots.push(numeric::bisect(
                        residual,
                        offsets[i - 1],
                        offsets[i + 1],
                        values[i - 1],
                        values[i + 1],
                    )?);
                } else {
                    roots.push(offsets[i]);
                }
            }
            GridRoot::Run(i, j) => roots.extend_from_slice(&offsets[i..=j]),
        }
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    roots.dedup();
    roots.truncate(n_max);
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{real_fn, Domain, Vec2};
    use crate::expr::arccot;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn spiral(alpha: f64) -> Curve {
        Curve::polar_log(
            real_fn(move |t| alpha * t),
            Domain::new(f64::NEG_INFINITY, f64::INFINITY).unwrap(),
        )
        .unwrap()
        .with_log_derivative(real_fn(move |_| alpha))
        .with_log_increment(std::sync::Arc::new(move |_, s| alpha * s))
    }

    fn ray() -> Curve {
        Curve::cartesian(real_fn(|t| t), real_fn(|_| 0.0), Domain::new(0.0, 10.0).unwrap(), None).unwrap()
    }

    #[test]
    fn phi_examples() {
        let c = Curve::cartesian(
            real_fn(|t| t.cos() - 1.0),
            real_fn(f64::sin),
            Domain::new(0.0, 10.0).unwrap(),
            None,
        )
        .unwrap();
        assert_eq!(phi_value(&c, 1.3, 1.3).unwrap(), 0.0);
        let expected = (FRAC_PI_2.cos() - 1.0) * FRAC_PI_4.sin() - FRAC_PI_2.sin() * (FRAC_PI_4.cos() - 1.0);
        assert!((phi_value(&c, FRAC_PI_2, FRAC_PI_4).unwrap() - expected).abs() < 1e-15);
        for tau in [0.1, 1.0, 2.5] {
            assert_eq!(phi_value(&ray(), 3.0, tau).unwrap(), 0.0);
        }
        assert!(phi_value(&ray(), 3.0, 4.0).is_err());
        assert!(phi_value(&ray(), 3.0, 0.0).is_err());
    }

    #[test]
    fn spiral_support_points_follow_closed_form() {
        let r = find_support_set(&spiral(1.0), 0.0, &SupportConfig::default()).unwrap();
        let mut taus: Vec<f64> = r.support.iter().map(|p| p.tau).collect();
        taus.sort_by(|a, b| b.total_cmp(a));
        assert_eq!(taus.len(), 8);
        for (n, tau) in taus.iter().enumerate() {
            assert!((tau - (-FRAC_PI_4 - PI * n as f64)).abs() < 1e-9, "n={n} tau={tau}");
        }
        let ratio = r.ratio_support.unwrap().finite().unwrap();
        assert!((ratio - (-FRAC_PI_4).exp()).abs() < 1e-12);
        assert!(r.truncation_bound < 1.3e-11);
    }

    #[test]
    fn spiral_tangent_set_and_ratio() {
        let r = find_tangent_set(&spiral(1.0), 0.0, &SupportConfig::default()).unwrap();
        assert_eq!(r.tangent.len(), 8);
        let ratio = r.ratio_tangent.unwrap().finite().unwrap();
        assert!((ratio - 0.455_938_127_765_996).abs() < 1e-12);
        assert!(r.tangent.iter().all(|p| p.residual < 1e-12));
    }

    #[test]
    fn ray_is_one_plateau() {
        let r = analyze_chord(&ray(), 3.0, &SupportConfig::default(), SetSelection::BOTH).unwrap();
        assert_eq!(r.support.len(), 1);
        assert_eq!(r.support[0].kind, PointKind::Plateau);
        assert_eq!(r.support[0].bracket, (0.0, 3.0));
        assert_eq!(r.ratio_support, Some(ExtReal::Finite(1.0)));
        assert_eq!(r.tangent.len(), 1);
        assert_eq!(r.tangent[0].kind, PointKind::Plateau);
        assert_eq!(r.ratio_tangent, Some(ExtReal::Finite(1.0)));
    }

    #[test]
    fn circle_tangent_count() {
        let c = Curve::cartesian(
            real_fn(f64::sin),
            real_fn(|t| 1.0 - t.cos()),
            Domain::new(0.0, 10.0).unwrap(),
            None,
        )
        .unwrap()
        .with_xy_derivative(real_fn(f64::cos), real_fn(f64::sin));
        let r = find_tangent_set(&c, PI, &SupportConfig::default()).unwrap();
        assert_eq!(r.tangent.len(), 1);
        assert!((r.tangent[0].tau - FRAC_PI_2).abs() < 1e-12);
        let s = find_support_set(&c, PI, &SupportConfig::default()).unwrap();
        assert_eq!(s.support.len(), 1);
        assert_eq!(s.support[0].kind, PointKind::SupportMin);
        assert!((s.support[0].tau - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn degenerate_chord_is_unbounded() {
        // closed loop returning exactly to the start at t = 2
        let c = Curve::cartesian(
            real_fn(|t| t * (2.0 - t)),
            real_fn(|t| t * (2.0 - t) * (1.0 - t)),
            Domain::new(0.0, 3.0).unwrap(),
            None,
        )
        .unwrap();
        let r = analyze_chord(&c, 2.0, &SupportConfig::default(), SetSelection::BOTH).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.ds, Some(ExtReal::Unbounded));
        assert_eq!(r.dt_sup, Some(ExtReal::Unbounded));
        assert!(r.support[0].d_tau > 0.0);
    }

    #[test]
    fn endpoint_counts_only_for_two_sided_extremum() {
        // y = (t−1)² touches the chord direction at t = 1 from one side only,
        // while for the parabola chord at t the endpoint is a plain crossing.
        let parabola = Curve::graph(real_fn(|t| t * t), Domain::new(0.0, 5.0).unwrap(), None).unwrap();
        let r = find_support_set(&parabola, 1.0, &SupportConfig::default()).unwrap();
        assert!(r.support.iter().all(|p| p.offset != 0.0));
        assert_eq!(r.support.len(), 1);
        assert!((r.support[0].tau - 0.5).abs() < 1e-9);

        // Curve that is tangent to its chord at τ = t: Φ has a two-sided max there.
        let c = Curve::cartesian(
            real_fn(|t| t),
            real_fn(|t| t * (t - 1.0) * (t - 1.0)),
            Domain::new(0.0, 5.0).unwrap(),
            None,
        )
        .unwrap();
        let r = find_support_set(&c, 1.0, &SupportConfig::default()).unwrap();
        assert!(r.support.iter().any(|p| p.offset == 0.0));
        assert_eq!(r.ratio_support, Some(ExtReal::Finite(1.0)));
    }

    #[test]
    fn rejects_bad_config_and_capability() {
        let cfg = SupportConfig::with_grid(8);
        assert!(matches!(find_support_set(&ray(), 1.0, &cfg), Err(Error::Input(_))));
        let c = ray().non_differentiable();
        assert!(matches!(
            find_tangent_set(&c, 1.0, &SupportConfig::default()),
            Err(Error::Capability(_))
        ));
        assert!(find_support_set(&ray(), 11.0, &SupportConfig::default()).is_err());
    }

    #[test]
    fn polar_equation_examples() {
        let cfg = SupportConfig::default();
        let taus = tangent_set_polar(&spiral(2.0), 0.5, 3, &cfg).unwrap();
        assert_eq!(taus.len(), 3);
        for (n, tau) in taus.iter().enumerate() {
            assert!((tau - (0.5 - arccot(2.0) - PI * n as f64)).abs() < 1e-12);
        }

        let alpha = 1.5;
        let c = Curve::polar(real_fn(move |t| t.powf(alpha)), Domain::new(0.0, 20.0).unwrap())
            .unwrap()
            .with_rho_derivative(real_fn(move |t| alpha * t.powf(alpha - 1.0)));
        let t = 8.0;
        let taus = tangent_set_polar(&c, t, 10, &cfg).unwrap();
        assert!(taus.len() >= 2);
        for tau in &taus {
            let n = ((t - tau - arccot(alpha / tau)) / PI).round();
            assert!((t - (tau + arccot(alpha / tau) + PI * n)).abs() <= 1e-9);
        }

        let circle = Curve::polar(real_fn(|_| 1.0), Domain::new(f64::NEG_INFINITY, 10.0).unwrap())
            .unwrap()
            .with_rho_derivative(real_fn(|_| 0.0));
        let taus = tangent_set_polar(&circle, 1.0, 1, &cfg).unwrap();
        assert!((taus[0] - (1.0 - FRAC_PI_2)).abs() < 1e-12);
        assert!(tangent_set_polar(&ray(), 1.0, 1, &cfg).is_err());
    }

    #[test]
    fn marked_distance_matches_curve() {
        let c = Curve::cartesian(
            real_fn(|t| t),
            real_fn(|t| t * t * t - t),
            Domain::new(0.0, 5.0).unwrap(),
            Some(Vec2::ZERO),
        )
        .unwrap();
        let r = analyze_chord(&c, 1.2, &SupportConfig::default(), SetSelection::BOTH).unwrap();
        for p in r.points() {
            let d = c.distance_from_start(p.tau).unwrap();
            assert!((p.d_tau - d).abs() <= 1e-12 * d.max(1e-300));
            assert!(p.tau > 0.0 && p.tau <= 1.2);
        }
    }
}
