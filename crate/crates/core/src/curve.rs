//! Planar parametric curves on a half-open parameter interval `[a, b)`.
//!
//! A [`Curve`] bundles evaluators in one of three shapes (Cartesian, polar
//! about the start point, or the graph of a function), the domain, and the
//! designated start point `γ(a)`. Curves are immutable and cheap to clone.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numeric::{self, SimpsonOptions};

/// Real function of one variable.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Increment `(t, s) -> φ(t + s) − φ(t)` of a log-radius, supplied when the
/// naive difference would cancel catastrophically.
pub type IncrementFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Wraps a closure as a [`RealFn`].
pub fn real_fn<F>(f: F) -> RealFn
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    Arc::new(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

/// Points and vectors share one representation.
pub type Point2 = Vec2;

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn scale(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

/// Parameter interval `[a, b)`; `a` may be `-∞` and `b` may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    a: f64,
    b: f64,
}

impl Domain {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_nan() || b.is_nan() || !(a < b) || a == f64::INFINITY || b == f64::NEG_INFINITY {
            return Err(Error::Input(format!("invalid domain [{a}, {b})")));
        }
        Ok(Domain { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn start_is_finite(&self) -> bool {
        self.a.is_finite()
    }

    /// `t ∈ (a, b)`.
    pub fn contains_open(&self, t: f64) -> bool {
        t.is_finite() && self.a < t && t < self.b
    }

    pub(crate) fn check_open(&self, t: f64) -> Result<()> {
        if self.contains_open(t) {
            Ok(())
        } else {
            Err(Error::Input(format!(
                "parameter {t} outside the open domain ({}, {})",
                self.a, self.b
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Cartesian,
    Polar,
    Graph,
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveKind::Cartesian => "cartesian",
            CurveKind::Polar => "polar",
            CurveKind::Graph => "graph",
        })
    }
}

/// Where derivatives come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeSource {
    Analytic,
    Numeric,
    /// The curve is declared non-differentiable; tangent sets are unavailable.
    Unavailable,
}

#[derive(Clone)]
enum Radius {
    Direct {
        rho: RealFn,
        drho: Option<RealFn>,
    },
    Log {
        phi: RealFn,
        dphi: Option<RealFn>,
        increment: Option<IncrementFn>,
    },
}

#[derive(Clone)]
enum Shape {
    Cartesian {
        x: RealFn,
        y: RealFn,
        dx: Option<RealFn>,
        dy: Option<RealFn>,
    },
    Polar(Radius),
    Graph {
        f: RealFn,
        df: Option<RealFn>,
    },
}

/// Immutable planar curve.
#[derive(Clone)]
pub struct Curve {
    shape: Shape,
    domain: Domain,
    start: Point2,
    differentiable: bool,
}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Curve")
            .field("kind", &self.kind())
            .field("domain", &self.domain)
            .field("start", &self.start)
            .field("derivative", &self.derivative_source())
            .finish()
    }
}

fn finite(v: f64, what: &str, t: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::DomainEval(format!("{what} is not finite at t = {t}")))
    }
}

impl Curve {
    /// `γ(t) = (x(t), y(t))`. The start point is required when `a = −∞`;
    /// for finite `a` it defaults to `(x(a), y(a))`.
    pub fn cartesian(x: RealFn, y: RealFn, domain: Domain, start: Option<Point2>) -> Result<Self> {
        let start = match start {
            Some(p) => p,
            None if domain.start_is_finite() => Vec2::new(x(domain.a), y(domain.a)),
            None => return Err(Error::Input("a start point must be supplied when a = -inf".into())),
        };
        Self::build(
            Shape::Cartesian {
                x,
                y,
                dx: None,
                dy: None,
            },
            domain,
            start,
        )
    }

    /// Polar curve about the start point with the polar angle as parameter:
    /// `γ(t) = ρ(t)(cos t, sin t)`, start at the pole. For finite `a`, `ρ(a)`
    /// must vanish.
    pub fn polar(rho: RealFn, domain: Domain) -> Result<Self> {
        if domain.start_is_finite() {
            let r0 = rho(domain.a);
            if !(r0.abs() <= 1e-12) {
                return Err(Error::Input(format!(
                    "polar curve must start at the pole: rho(a) = {r0}"
                )));
            }
        }
        Self::build(Shape::Polar(Radius::Direct { rho, drho: None }), domain, Vec2::ZERO)
    }

    /// Polar curve given by its log-radius `φ = ln ρ`. Needed when `ρ` spans
    /// more decades than an `f64` can hold across one chord.
    pub fn polar_log(phi: RealFn, domain: Domain) -> Result<Self> {
        Self::build(
            Shape::Polar(Radius::Log {
                phi,
                dphi: None,
                increment: None,
            }),
            domain,
            Vec2::ZERO,
        )
    }

    /// Graph of a function, `γ(t) = (t, f(t))`.
    pub fn graph(f: RealFn, domain: Domain, start: Option<Point2>) -> Result<Self> {
        let start = match start {
            Some(p) => p,
            None if domain.start_is_finite() => Vec2::new(domain.a, f(domain.a)),
            None => return Err(Error::Input("a start point must be supplied when a = -inf".into())),
        };
        Self::build(Shape::Graph { f, df: None }, domain, start)
    }

    fn build(shape: Shape, domain: Domain, start: Point2) -> Result<Self> {
        if !start.is_finite() {
            return Err(Error::Input(format!("start point {start:?} is not finite")));
        }
        Ok(Curve {
            shape,
            domain,
            start,
            differentiable: true,
        })
    }

    /// Attaches analytic derivatives `x′, y′` (Cartesian curves).
    pub fn with_xy_derivative(mut self, dx_fn: RealFn, dy_fn: RealFn) -> Self {
        if let Shape::Cartesian { dx, dy, .. } = &mut self.shape {
            *dx = Some(dx_fn);
            *dy = Some(dy_fn);
        }
        self
    }

    /// Attaches `ρ′` (polar curves given by `ρ`).
    pub fn with_rho_derivative(mut self, d: RealFn) -> Self {
        if let Shape::Polar(Radius::Direct { drho, .. }) = &mut self.shape {
            *drho = Some(d);
        }
        self
    }

    /// Attaches `φ′` (polar curves given by `φ = ln ρ`).
    pub fn with_log_derivative(mut self, d: RealFn) -> Self {
        if let Shape::Polar(Radius::Log { dphi, .. }) = &mut self.shape {
            *dphi = Some(d);
        }
        self
    }

    /// Attaches an accurate increment `φ(t + s) − φ(t)`.
    pub fn with_log_increment(mut self, inc: IncrementFn) -> Self {
        if let Shape::Polar(Radius::Log { increment, .. }) = &mut self.shape {
            *increment = Some(inc);
        }
        self
    }

    /// Attaches `f′` (graph curves).
    pub fn with_graph_derivative(mut self, d: RealFn) -> Self {
        if let Shape::Graph { df, .. } = &mut self.shape {
            *df = Some(d);
        }
        self
    }

    /// Declares the curve non-differentiable; tangent-set operations then
    /// fail with a capability error.
    pub fn non_differentiable(mut self) -> Self {
        self.differentiable = false;
        self
    }

    pub fn kind(&self) -> CurveKind {
        match self.shape {
            Shape::Cartesian { .. } => CurveKind::Cartesian,
            Shape::Polar(_) => CurveKind::Polar,
            Shape::Graph { .. } => CurveKind::Graph,
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn start_point(&self) -> Point2 {
        self.start
    }

    pub fn derivative_source(&self) -> DerivativeSource {
        if !self.differentiable {
            return DerivativeSource::Unavailable;
        }
        let analytic = match &self.shape {
            Shape::Cartesian { dx, dy, .. } => dx.is_some() && dy.is_some(),
            Shape::Polar(Radius::Direct { drho, .. }) => drho.is_some(),
            Shape::Polar(Radius::Log { dphi, .. }) => dphi.is_some(),
            Shape::Graph { df, .. } => df.is_some(),
        };
        if analytic {
            DerivativeSource::Analytic
        } else {
            DerivativeSource::Numeric
        }
    }

    pub fn has_derivative(&self) -> bool {
        self.derivative_source() != DerivativeSource::Unavailable
    }

    /// Default numerical derivative step at `t`.
    pub fn default_step(t: f64) -> f64 {
        1e-6_f64.max(1e-6 * t.abs())
    }

    fn check_eval(&self, t: f64) -> Result<()> {
        if t == self.domain.a && self.domain.start_is_finite() {
            return Ok(());
        }
        self.domain.check_open(t)
    }

    /// Position `γ(t)`; `t = a` (finite) returns the start point.
    pub fn eval_point(&self, t: f64) -> Result<Point2> {
        self.check_eval(t)?;
        if t == self.domain.a {
            return Ok(self.start);
        }
        self.point_unchecked(t)
    }

    fn point_unchecked(&self, t: f64) -> Result<Point2> {
        let p = match &self.shape {
            Shape::Cartesian { x, y, .. } => Vec2::new(x(t), y(t)),
            Shape::Polar(r) => {
                let rho = match r {
                    Radius::Direct { rho, .. } => rho(t),
                    Radius::Log { phi, .. } => phi(t).exp(),
                };
                let rho = finite(rho, "rho", t)?;
                Vec2::new(rho * t.cos(), rho * t.sin())
            }
            Shape::Graph { f, .. } => Vec2::new(t, f(t)),
        };
        if !p.is_finite() {
            return Err(Error::DomainEval(format!("curve point is not finite at t = {t}")));
        }
        Ok(p)
    }

    /// `γ′(t)`: analytic when available, otherwise a central difference with
    /// step `h` clipped to keep the stencil inside `(a, b)`.
    pub fn eval_derivative(&self, t: f64, h: f64) -> Result<Vec2> {
        self.domain.check_open(t)?;
        if !self.differentiable {
            return Err(Error::Capability("curve is declared non-differentiable".into()));
        }
        if let Some(v) = self.analytic_derivative(t)? {
            return Ok(v);
        }
        let (lo, hi) = (self.domain.a, self.domain.b);
        let step = numeric::clip_step(t, h, lo, hi)?;
        let p1 = self.point_unchecked(t + step)?;
        let p0 = self.point_unchecked(t - step)?;
        Ok((p1 - p0).scale(0.5 / step))
    }

    fn analytic_derivative(&self, t: f64) -> Result<Option<Vec2>> {
        let v = match &self.shape {
            Shape::Cartesian {
                dx: Some(dx),
                dy: Some(dy),
                ..
            } => Vec2::new(dx(t), dy(t)),
            Shape::Polar(Radius::Direct { rho, drho: Some(drho) }) => {
                let (r, dr) = (rho(t), drho(t));
                let (s, c) = t.sin_cos();
                Vec2::new(dr * c - r * s, dr * s + r * c)
            }
            Shape::Polar(Radius::Log {
                phi, dphi: Some(dphi), ..
            }) => {
                let r = phi(t).exp();
                let dp = dphi(t);
                let (s, c) = t.sin_cos();
                Vec2::new(r * (dp * c - s), r * (dp * s + c))
            }
            Shape::Graph { df: Some(df), .. } => Vec2::new(1.0, df(t)),
            _ => return Ok(None),
        };
        if !v.is_finite() {
            return Err(Error::DomainEval(format!("derivative is not finite at t = {t}")));
        }
        Ok(Some(v))
    }

    /// `D(t) = |γ(t) − γ(a)|`; for polar curves this is `|ρ(t)|`.
    pub fn distance_from_start(&self, t: f64) -> Result<f64> {
        self.check_eval(t)?;
        if t == self.domain.a {
            return Ok(0.0);
        }
        match &self.shape {
            Shape::Polar(Radius::Direct { rho, .. }) => Ok(finite(rho(t), "rho", t)?.abs()),
            Shape::Polar(Radius::Log { phi, .. }) => Ok(finite(phi(t), "phi", t)?.exp()),
            _ => Ok((self.point_unchecked(t)? - self.start).norm()),
        }
    }

    /// Speed `|γ′(t)|`, used as the arc-length integrand.
    fn speed(&self, t: f64, h: f64) -> Result<f64> {
        Ok(self.eval_derivative(t, h)?.norm())
    }

    /// Arc length of `γ` over `[t0, t1]` by adaptive Simpson to absolute
    /// tolerance `tol`.
    pub fn arc_length(&self, t0: f64, t1: f64, tol: f64) -> Result<f64> {
        if !(t0 < t1) {
            return Err(Error::Input(format!("arc length needs t0 < t1, got [{t0}, {t1}]")));
        }
        self.domain.check_open(t0)?;
        self.domain.check_open(t1)?;
        if !self.differentiable {
            return polygon_length(|t| self.point_unchecked(t), t0, t1, tol);
        }
        let h = 1e-6 * (t1 - t0);
        let q = numeric::adaptive_simpson(|s| self.speed(s, h), t0, t1, SimpsonOptions::with_tol(tol))?;
        Ok(q.value)
    }

    /// Arc length from the start of the curve to `t`: for finite `a` the
    /// first `10⁻¹²` of the window is replaced by its chord; for infinite `a`
    /// integration starts at `left` (the caller's cutoff).
    pub fn arc_length_from(&self, left: f64, t: f64, tol: f64) -> Result<f64> {
        if self.domain.start_is_finite() && left <= self.domain.a {
            let a = self.domain.a;
            let t0 = a + 1e-12 * (t - a);
            let head = self.distance_from_start(t0)?;
            Ok(head + self.arc_length(t0, t, tol)?)
        } else {
            self.arc_length(left, t, tol)
        }
    }

    /// Chord frame for the chord `[γ(a), γ(t)]`, or `None` when `D(t) = 0`.
    pub fn chord_frame(&self, t: f64) -> Result<Option<ChordFrame<'_>>> {
        self.domain.check_open(t)?;
        let frame = match &self.shape {
            Shape::Polar(Radius::Direct { rho, .. }) => {
                let r = finite(rho(t), "rho", t)?;
                if r == 0.0 {
                    return Ok(None);
                }
                ChordFrame {
                    curve: self,
                    t,
                    scale: r,
                    dir: Vec2::new(1.0, 0.0),
                }
            }
            Shape::Polar(Radius::Log { phi, .. }) => {
                let p = finite(phi(t), "phi", t)?;
                ChordFrame {
                    curve: self,
                    t,
                    scale: p.exp(),
                    dir: Vec2::new(1.0, 0.0),
                }
            }
            _ => {
                let v = self.point_unchecked(t)? - self.start;
                let d = v.norm();
                if d == 0.0 {
                    return Ok(None);
                }
                ChordFrame {
                    curve: self,
                    t,
                    scale: d,
                    dir: v.scale(1.0 / d),
                }
            }
        };
        Ok(Some(frame))
    }
}

/// Length of inscribed polygons of `point` over `[t0, t1]`: the interval is
/// split into equal panels, then each chord is bisected until splitting it
/// changes the length by at most its share of `tol`. Used for curves
/// without a derivative.
fn polygon_length<F>(point: F, t0: f64, t1: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<Vec2>,
{
    const PANELS: usize = 256;
    const MAX_DEPTH: u32 = 50;
    // gaps left open at forced leaves (a kink keeps the gap linear in the width)
    let mut open_gap = 0.0f64;
    let mut total = 0.0;
    let mut stack = Vec::new();
    let width = (t1 - t0) / PANELS as f64;
    let mut left = (t0, point(t0)?);
    for k in 1..=PANELS {
        let r = if k == PANELS { t1 } else { t0 + width * k as f64 };
        let right = (r, point(r)?);
        stack.push((left.0, right.0, left.1, right.1, tol / PANELS as f64, 0u32));
        left = right;
    }
    while let Some((l, r, pl, pr, share, depth)) = stack.pop() {
        let m = 0.5 * (l + r);
        let pm = point(m)?;
        let whole = (pr - pl).norm();
        let split = (pm - pl).norm() + (pr - pm).norm();
        let gap = split - whole;
        if gap <= share || depth >= MAX_DEPTH || m <= l || m >= r {
            if gap > share {
                open_gap += gap;
            }
            total += split;
            continue;
        }
        stack.push((m, r, pm, pr, 0.5 * share, depth + 1));
        stack.push((l, m, pl, pm, 0.5 * share, depth + 1));
    }
    if open_gap > tol {
        return Err(Error::Accuracy {
            estimate: total,
            error: open_gap,
        });
    }
    Ok(total)
}

/// View of a curve relative to one chord `[γ(a), γ(t)]`.
///
/// Positions are parameterised by the offset `s = τ − t`, translated to the
/// start point, rotated so the chord points along `+x`, and divided by
/// `D(t)`. Then `Φ(τ)/D(t)² = point(s).y` and the tangency residual
/// `(γ(t)−γ(a)) × γ′(τ) / D(t)` is `velocity(s).y`. Polar curves are
/// handled in closed form (the chord direction is the polar angle `t`), so
/// ratios stay accurate even when `D(t)` itself under- or overflows.
#[derive(Clone, Copy)]
pub struct ChordFrame<'c> {
    curve: &'c Curve,
    t: f64,
    /// `D(t)`; may have underflowed to zero for log-radius curves.
    scale: f64,
    dir: Vec2,
}

impl<'c> ChordFrame<'c> {
    pub fn t(&self) -> f64 {
        self.t
    }

    /// `D(t)`.
    pub fn chord_length(&self) -> f64 {
        self.scale
    }

    pub fn curve(&self) -> &'c Curve {
        self.curve
    }

    /// Arc length over offsets `[s0, s1]` in units of `D(t)`.
    pub fn arc_length(&self, s0: f64, s1: f64, tol: f64) -> Result<f64> {
        if !(s0 < s1) {
            return Err(Error::Input(format!("arc length needs s0 < s1, got [{s0}, {s1}]")));
        }
        if !self.curve.differentiable {
            return polygon_length(|s| self.point(s), s0, s1, tol);
        }
        let h = 1e-6 * (s1 - s0);
        let speed = |s: f64| Ok(self.velocity(s, h)?.norm());
        Ok(numeric::adaptive_simpson(speed, s0, s1, SimpsonOptions::with_tol(tol))?.value)
    }

    /// Arc length from the left end `s_left` (the start itself when `a` is
    /// finite and `s_left` reaches it) to offset `s`, in units of `D(t)`.
    /// As for [`Curve::arc_length_from`], the first `10⁻¹²` of a window that
    /// starts at a finite `a` is replaced by its chord.
    pub fn arc_length_from(&self, s_left: f64, s: f64, tol: f64) -> Result<f64> {
        let dom = self.curve.domain;
        if dom.start_is_finite() && s_left <= dom.a - self.t {
            let left = dom.a - self.t;
            let head = left + 1e-12 * (s - left);
            Ok(self.relative_distance(head)? + self.arc_length(head, s, tol)?)
        } else {
            self.arc_length(s_left, s, tol)
        }
    }

    /// `ρ(t + s)/ρ(t)` for polar curves.
    fn radius_ratio(&self, radius: &Radius, s: f64) -> Result<f64> {
        let tau = self.t + s;
        match radius {
            Radius::Direct { rho, .. } => Ok(finite(rho(tau), "rho", tau)? / self.scale),
            Radius::Log { phi, increment, .. } => {
                let inc = match increment {
                    Some(inc) => inc(self.t, s),
                    None => phi(tau) - phi(self.t),
                };
                Ok(finite(inc, "phi increment", tau)?.exp())
            }
        }
    }

    /// Relative position at offset `s`; `τ = a` (finite) maps to the origin.
    pub fn point(&self, s: f64) -> Result<Vec2> {
        let tau = self.t + s;
        if tau == self.curve.domain.a && self.curve.domain.start_is_finite() {
            return Ok(Vec2::ZERO);
        }
        match &self.curve.shape {
            Shape::Polar(radius) => {
                let q = self.radius_ratio(radius, s)?;
                let (sn, cs) = s.sin_cos();
                Ok(Vec2::new(q * cs, q * sn))
            }
            _ => {
                let p = (self.curve.point_unchecked(tau)? - self.curve.start).scale(1.0 / self.scale);
                Ok(Vec2::new(p.dot(self.dir), self.dir.cross(p)))
            }
        }
    }

    /// [`point`](Self::point) together with the magnitude of the terms its
    /// `y` is computed from, which sets the rounding level of `y`.
    pub fn point_with_scale(&self, s: f64) -> Result<(Vec2, f64)> {
        let tau = self.t + s;
        if tau == self.curve.domain.a && self.curve.domain.start_is_finite() {
            return Ok((Vec2::ZERO, 0.0));
        }
        match &self.curve.shape {
            Shape::Polar(_) => {
                let p = self.point(s)?;
                Ok((p, p.y.abs()))
            }
            _ => {
                let p = (self.curve.point_unchecked(tau)? - self.curve.start).scale(1.0 / self.scale);
                let terms = (self.dir.x * p.y).abs() + (self.dir.y * p.x).abs();
                Ok((Vec2::new(p.dot(self.dir), self.dir.cross(p)), terms))
            }
        }
    }

    /// `D(τ)/D(t)` at offset `s`.
    pub fn relative_distance(&self, s: f64) -> Result<f64> {
        match &self.curve.shape {
            Shape::Polar(radius) => {
                let tau = self.t + s;
                if tau == self.curve.domain.a && self.curve.domain.start_is_finite() {
                    return Ok(0.0);
                }
                Ok(self.radius_ratio(radius, s)?.abs())
            }
            _ => Ok(self.point(s)?.norm()),
        }
    }

    /// `(ρ(τ)/ρ(t), ρ′(τ)/ρ(t))` at `τ = t + s` for polar curves; `ρ′` falls
    /// back to a central difference with step `h`.
    pub fn radius_and_slope(&self, s: f64, h: f64) -> Result<(f64, f64)> {
        let Shape::Polar(radius) = &self.curve.shape else {
            return Err(Error::Capability("curve is not given in polar form".into()));
        };
        let tau = self.t + s;
        let dom = self.curve.domain;
        if !dom.contains_open(tau) {
            return Err(Error::Input(format!("offset {s} leaves the domain")));
        }
        let q = self.radius_ratio(radius, s)?;
        let dq = match radius {
            Radius::Direct { drho: Some(drho), .. } => finite(drho(tau), "rho'", tau)? / self.scale,
            Radius::Log { dphi: Some(dphi), .. } => finite(dphi(tau), "phi'", tau)? * q,
            _ => {
                let step = numeric::clip_step(s, h, dom.a - self.t, dom.b - self.t)
                    .map_err(|_| Error::Stencil { t: tau, h })?;
                (self.radius_ratio(radius, s + step)? - self.radius_ratio(radius, s - step)?) / (2.0 * step)
            }
        };
        Ok((q, dq))
    }

    /// Derivative of [`point`](Self::point) with respect to `s`. Numerical
    /// fallback uses step `h` in `s`, clipped to the open domain.
    pub fn velocity(&self, s: f64, h: f64) -> Result<Vec2> {
        Ok(self.velocity_with_scale(s, h)?.0)
    }

    /// [`velocity`](Self::velocity) with the rounding scale of its `y`: the
    /// magnitude of its terms for analytic derivatives, `|v|` otherwise.
    pub fn velocity_with_scale(&self, s: f64, h: f64) -> Result<(Vec2, f64)> {
        let tau = self.t + s;
        let dom = self.curve.domain;
        if !self.curve.differentiable {
            return Err(Error::Capability("curve is declared non-differentiable".into()));
        }
        if !dom.contains_open(tau) {
            return Err(Error::Input(format!("offset {s} leaves the domain")));
        }
        match &self.curve.shape {
            Shape::Polar(radius) => {
                let analytic_q = match radius {
                    Radius::Direct { drho: Some(drho), .. } => Some(finite(drho(tau), "rho'", tau)? / self.scale),
                    Radius::Log { dphi: Some(dphi), .. } => {
                        Some(finite(dphi(tau), "phi'", tau)? * self.radius_ratio(radius, s)?)
                    }
                    _ => None,
                };
                if let Some(dq) = analytic_q {
                    let q = self.radius_ratio(radius, s)?;
                    let (sn, cs) = s.sin_cos();
                    let terms = (dq * sn).abs() + (q * cs).abs();
                    return Ok((Vec2::new(dq * cs - q * sn, dq * sn + q * cs), terms));
                }
            }
            _ => {
                if let Some(v) = self.curve.analytic_derivative(tau)? {
                    let v = v.scale(1.0 / self.scale);
                    let terms = (self.dir.x * v.y).abs() + (self.dir.y * v.x).abs();
                    return Ok((Vec2::new(v.dot(self.dir), self.dir.cross(v)), terms));
                }
            }
        }
        let step =
            numeric::clip_step(s, h, dom.a - self.t, dom.b - self.t).map_err(|_| Error::Stencil { t: tau, h })?;
        let p1 = self.point(s + step)?;
        let p0 = self.point(s - step)?;
        let v = (p1 - p0).scale(0.5 / step);
        Ok((v, v.norm()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn spiral(alpha: f64) -> Curve {
        Curve::polar(
            real_fn(move |t| (alpha * t).exp()),
            Domain::new(f64::NEG_INFINITY, f64::INFINITY).unwrap(),
        )
        .unwrap()
        .with_rho_derivative(real_fn(move |t| alpha * (alpha * t).exp()))
    }

    fn circle() -> Curve {
        Curve::cartesian(
            real_fn(f64::cos),
            real_fn(f64::sin),
            Domain::new(0.0, 10.0).unwrap(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn eval_point_examples() {
        let p = spiral(1.0).eval_point(0.0).unwrap();
        assert!((p.x - 1.0).abs() < 1e-15 && p.y.abs() < 1e-15);
        let p = circle().eval_point(0.0).unwrap();
        assert_eq!(p, Vec2::new(1.0, 0.0));
        let c = Curve::polar(real_fn(|t| t), Domain::new(0.0, 10.0).unwrap()).unwrap();
        let p = c.eval_point(FRAC_PI_2).unwrap();
        assert!(p.x.abs() < 1e-15 && (p.y - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn eval_point_rejects_outside_domain() {
        assert!(matches!(circle().eval_point(-1.0), Err(Error::Input(_))));
        assert!(matches!(circle().eval_point(10.0), Err(Error::Input(_))));
        assert!(matches!(circle().eval_point(f64::NAN), Err(Error::Input(_))));
    }

    #[test]
    fn derivative_examples() {
        let c = Curve::cartesian(
            real_fn(|t| t),
            real_fn(|t| t * t),
            Domain::new(-5.0, 5.0).unwrap(),
            None,
        )
        .unwrap();
        let d = c.eval_derivative(1.0, 1e-5).unwrap();
        assert!((d.x - 1.0).abs() < 1e-9 && (d.y - 2.0).abs() < 1e-9);
        let k = Curve::cartesian(real_fn(|_| 1.0), real_fn(|_| 1.0), Domain::new(0.0, 5.0).unwrap(), None).unwrap();
        assert_eq!(k.eval_derivative(1.0, 1e-6).unwrap(), Vec2::ZERO);
    }

    #[test]
    fn spiral_analytic_matches_numeric() {
        let analytic = spiral(1.0).eval_derivative(0.0, 1e-4).unwrap();
        let numeric = Curve::polar(
            real_fn(f64::exp),
            Domain::new(f64::NEG_INFINITY, f64::INFINITY).unwrap(),
        )
        .unwrap()
        .eval_derivative(0.0, 1e-4)
        .unwrap();
        assert!((analytic.x - numeric.x).abs() < 1e-6);
        assert!((analytic.y - numeric.y).abs() < 1e-6);
        assert!((analytic.x - 1.0).abs() < 1e-15 && (analytic.y - 1.0).abs() < 1e-15);
    }

    #[test]
    fn stencil_error_near_boundary() {
        let c = circle();
        assert!(matches!(c.eval_derivative(1e-300, 1e-6), Err(Error::Stencil { .. })));
    }

    #[test]
    fn non_differentiable_curve_refuses_derivative() {
        let c = circle().non_differentiable();
        assert!(matches!(c.eval_derivative(1.0, 1e-6), Err(Error::Capability(_))));
    }

    #[test]
    fn distance_examples() {
        assert!((spiral(1.0).distance_from_start(1.0).unwrap() - std::f64::consts::E).abs() < 1e-15);
        let ray = Curve::cartesian(real_fn(|t| t), real_fn(|_| 0.0), Domain::new(0.0, 10.0).unwrap(), None).unwrap();
        assert_eq!(ray.distance_from_start(3.0).unwrap(), 3.0);
        assert_eq!(ray.distance_from_start(0.0).unwrap(), 0.0);
        assert!(ray.distance_from_start(1e-12).unwrap() < 1e-11);
    }

    #[test]
    fn arc_length_examples() {
        let q = circle().arc_length(1e-9, FRAC_PI_2, 1e-10).unwrap();
        assert!((q - (FRAC_PI_2 - 1e-9)).abs() < 1e-9);
        let seg = Curve::cartesian(
            real_fn(|t| t),
            real_fn(|t| 2.0 * t),
            Domain::new(-1.0, 2.0).unwrap(),
            None,
        )
        .unwrap();
        assert!((seg.arc_length(0.0, 1.0, 1e-10).unwrap() - 5f64.sqrt()).abs() < 1e-9);
        let l = spiral(1.0).arc_length(-20.0, 0.0, 1e-10).unwrap();
        assert!((l - 2f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn arc_length_rejects_reversed_interval() {
        assert!(circle().arc_length(1.0, 0.5, 1e-9).is_err());
    }

    #[test]
    fn polar_must_start_at_pole() {
        assert!(Curve::polar(real_fn(|t| t + 1.0), Domain::new(0.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn minus_infinity_requires_start() {
        let d = Domain::new(f64::NEG_INFINITY, 0.0).unwrap();
        assert!(Curve::cartesian(real_fn(f64::exp), real_fn(|_| 0.0), d, None).is_err());
        assert!(Curve::cartesian(real_fn(f64::exp), real_fn(|_| 0.0), d, Some(Vec2::ZERO)).is_ok());
    }

    #[test]
    fn chord_frame_rotates_chord_to_x_axis() {
        let c = circle();
        let f = c.chord_frame(FRAC_PI_2).unwrap().unwrap();
        let p = f.point(0.0).unwrap();
        assert!((p.x - 1.0).abs() < 1e-15 && p.y.abs() < 1e-15);
        // Φ(τ)/D(t)² equals point(s).y
        let tau = FRAC_PI_4;
        let chord = c.eval_point(FRAC_PI_2).unwrap() - c.start_point();
        let phi = chord.cross(c.eval_point(tau).unwrap() - c.start_point());
        let rel = f.point(tau - FRAC_PI_2).unwrap().y;
        assert!((phi / chord.dot(chord) - rel).abs() < 1e-15);
    }

    #[test]
    fn degenerate_chord_has_no_frame() {
        let loop_exact = Curve::cartesian(
            real_fn(|t| if t == 2.0 { 1.0 } else { t.cos() }),
            real_fn(|t| if t == 2.0 { 0.0 } else { t.sin() }),
            Domain::new(0.0, 10.0).unwrap(),
            None,
        )
        .unwrap();
        assert!(loop_exact.chord_frame(2.0).unwrap().is_none());
    }

    #[test]
    fn log_polar_frame_survives_underflow() {
        let c = Curve::polar_log(real_fn(|t| -t * t), Domain::new(f64::NEG_INFINITY, 0.0).unwrap())
            .unwrap()
            .with_log_derivative(real_fn(|t| -2.0 * t));
        let f = c.chord_frame(-1.0e4).unwrap().unwrap();
        assert_eq!(f.chord_length(), 0.0);
        let r = f.relative_distance(-1e-5).unwrap();
        assert!((r - (-(1.0e4 + 1e-5f64).powi(2) + 1.0e8).exp()).abs() < 1e-6);
    }
}
