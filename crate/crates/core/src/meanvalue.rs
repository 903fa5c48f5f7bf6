//! Largest mean-value points of the Cauchy, Lagrange and weighted integral
//! mean value theorems, and their relative position as `x → a`.

use std::f64::consts::E;

use rayon::prelude::*;

use crate::asymptote::{check_bound, limsup_estimate, LimsupEstimate, Verdict};
use crate::curve::{real_fn, RealFn};
use crate::numeric::{self, ExtremumKind, SimpsonOptions};
use crate::support::ExtReal;
use crate::{Error, Result};

/// Scan and solver settings shared by the mean-value solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Uniform grid steps over `(a, x]`.
    pub n_grid: usize,
    /// Geometric grid points clustered next to `x`.
    pub cluster: usize,
    /// Relative residual at or below which a sample counts as an exact solution.
    pub tol: f64,
    /// Quadrature error target, relative to the integration length.
    pub quad_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            n_grid: 4096,
            cluster: 30,
            tol: 1e-12,
            quad_tol: 1e-12,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if self.n_grid < 16 {
            return Err(Error::Input(format!("n_grid must be at least 16, got {}", self.n_grid)));
        }
        if !(self.tol > 0.0 && self.quad_tol > 0.0) {
            return Err(Error::Input("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Two functions on `[a, b)` with `h` increasing, plus optional derivatives.
#[derive(Clone)]
pub struct FunctionPair {
    pub g: RealFn,
    pub h: RealFn,
    pub dg: Option<RealFn>,
    pub dh: Option<RealFn>,
    pub a: f64,
}

impl std::fmt::Debug for FunctionPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FunctionPair")
            .field("a", &self.a)
            .field("dg", &self.dg.is_some())
            .field("dh", &self.dh.is_some())
            .finish()
    }
}

impl FunctionPair {
    pub fn new(g: RealFn, h: RealFn, a: f64) -> Self {
        FunctionPair {
            g,
            h,
            dg: None,
            dh: None,
            a,
        }
    }

    /// The Lagrange case `h(t) = t`.
    pub fn lagrange(g: RealFn, dg: RealFn, a: f64) -> Self {
        FunctionPair {
            g,
            h: real_fn(|t| t),
            dg: Some(dg),
            dh: Some(real_fn(|_| 1.0)),
            a,
        }
    }

    pub fn with_derivatives(mut self, dg: RealFn, dh: RealFn) -> Self {
        self.dg = Some(dg);
        self.dh = Some(dh);
        self
    }

    fn check_x(&self, x: f64) -> Result<()> {
        if !(x > self.a && x.is_finite()) {
            return Err(Error::Input(format!("x = {x} must exceed a = {}", self.a)));
        }
        Ok(())
    }

    /// Checks that `h` is increasing on `n` uniform samples of `[a, x]`.
    pub fn check_increasing(&self, x: f64, n: usize) -> Result<()> {
        self.check_x(x)?;
        let n = n.max(2);
        let vals: Vec<f64> = (0..=n)
            .map(|i| (self.h)(self.a + (x - self.a) * i as f64 / n as f64))
            .collect();
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (i, w) in vals.windows(2).enumerate() {
            if !(w[1] > w[0] - 1e-14 * scale) {
                return Err(Error::Input(format!("h is not increasing near sample {i} of [a, {x}]")));
            }
        }
        Ok(())
    }

    /// Change of `(g(x) − g(a))/(h(x) − h(a))` between the last two of `xs`
    /// relative to the largest quotient seen; a value that does not shrink
    /// as `xs` approaches `a` suggests the limit at `a` does not exist.
    pub fn quotient_drift(&self, xs: &[f64]) -> Result<f64> {
        let (ga, ha) = (eval(&self.g, self.a, "g")?, eval(&self.h, self.a, "h")?);
        let mut q = Vec::with_capacity(xs.len());
        for &x in xs {
            q.push((eval(&self.g, x, "g")? - ga) / (eval(&self.h, x, "h")? - ha));
        }
        let n = q.len();
        if n < 2 {
            return Ok(0.0);
        }
        let size = q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if size == 0.0 {
            return Ok(0.0);
        }
        Ok((q[n - 1] - q[n - 2]).abs() / size)
    }
}

fn eval(f: &RealFn, t: f64, what: &str) -> Result<f64> {
    let v = f(t);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::DomainEval(format!("{what} is not finite at {t}")))
    }
}

/// A located mean-value point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanValueResult {
    pub x: f64,
    pub tau: f64,
    /// Defining-equation residual at `tau`, relative to the size of its terms.
    pub residual: f64,
    /// `(h(τ) − h(a))/(h(x) − h(a))`.
    pub ratio_h: f64,
    /// `(τ − a)/(x − a)`.
    pub ratio_t: f64,
}

fn result(pair_h: Option<(&RealFn, f64)>, a: f64, x: f64, tau: f64, residual: f64) -> Result<MeanValueResult> {
    let ratio_t = (tau - a) / (x - a);
    let ratio_h = match pair_h {
        Some((h, ha)) => (eval(h, tau, "h")? - ha) / (eval(h, x, "h")? - ha),
        None => ratio_t,
    };
    Ok(MeanValueResult {
        x,
        tau,
        residual,
        ratio_h,
        ratio_t,
    })
}

/// Largest root of a residual on `(a, x]`, scanning leftward from `x`.
///
/// `r` returns the residual and the size of its terms. A sample whose
/// residual is within `tol` of its terms is taken as an exact solution. The
/// reported residual is relative to the largest term size on the grid, which
/// stays meaningful when one side of the equation vanishes identically.
fn largest_root<F>(r: F, a: f64, x: f64, cfg: &SolverConfig) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<(f64, f64)> + Sync,
{
    let grid = numeric::graded_grid(a, x, cfg.n_grid, cfg.cluster);
    let samples: Vec<(f64, f64)> = grid[1..].par_iter().map(|&t| r(t)).collect::<Result<_>>()?;
    let relative = |(v, s): (f64, f64)| if s > 0.0 { v.abs() / s } else { 0.0 };
    let scale = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    let reported = |v: f64| if scale > 0.0 { v.abs() / scale } else { 0.0 };
    let pts = &grid[1..];
    for i in (0..pts.len()).rev() {
        if relative(samples[i]) <= cfg.tol {
            return Ok((pts[i], reported(samples[i].0)));
        }
        if i + 1 < pts.len() && samples[i].0.signum() != samples[i + 1].0.signum() {
            let root = numeric::bisect(|t| Ok(r(t)?.0), pts[i], pts[i + 1], samples[i].0, samples[i + 1].0)?;
            return Ok((root, reported(r(root)?.0)));
        }
    }
    Err(Error::Resolution(format!(
        "no sign change of the residual on (a, {x}]; increase n_grid (now {})",
        cfg.n_grid
    )))
}

/// `μ(x)`: the largest extremum point of
/// `Ψ(t) = (g(x) − g(a))(h(t) − h(a)) − (h(x) − h(a))(g(t) − g(a))` on `(a, x)`.
///
/// When `Ψ` vanishes identically every point qualifies and `μ(x) = x`.
pub fn mu_point(pair: &FunctionPair, x: f64, cfg: &SolverConfig) -> Result<MeanValueResult> {
    cfg.validate()?;
    pair.check_x(x)?;
    let a = pair.a;
    let (ga, ha) = (eval(&pair.g, a, "g")?, eval(&pair.h, a, "h")?);
    let (gx, hx) = (eval(&pair.g, x, "g")? - ga, eval(&pair.h, x, "h")? - ha);
    let psi = |t: f64| -> Result<(f64, f64)> {
        let (g, h) = (eval(&pair.g, t, "g")? - ga, eval(&pair.h, t, "h")? - ha);
        Ok((gx * h - hx * g, (gx * h).abs() + (hx * g).abs()))
    };
    let grid = numeric::graded_grid(a, x, cfg.n_grid, cfg.cluster);
    let samples: Vec<(f64, f64)> = grid.par_iter().map(|&t| psi(t)).collect::<Result<_>>()?;
    let values: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let scales: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let uniform = (x - a) / cfg.n_grid as f64;
    let exts = numeric::scan_extrema_on(&values, &scales, 1e-13, Some((&grid, uniform)));
    let Some(last) = exts.last() else {
        return Err(Error::Resolution(format!(
            "no extremum of Psi resolved on (a, {x}); increase n_grid"
        )));
    };
    let h_fn = Some((&pair.h, ha));
    if last.kind == ExtremumKind::Plateau {
        let tau = if last.last == grid.len() - 1 {
            x
        } else {
            grid[last.last]
        };
        return result(h_fn, a, x, tau, 0.0);
    }
    let (lo, hi) = (grid[last.first - 1], grid[last.last + 1]);
    let maximize = last.kind == ExtremumKind::Max;
    let width = cfg.tol * (x - a);
    let (l, r) = numeric::ternary_search(|t| Ok(psi(t)?.0), lo, hi, maximize, width)?;
    let mut tau = 0.5 * (l + r);
    // Ψ′ is the Cauchy residual; polish on it when derivatives are known.
    if let (Some(dg), Some(dh)) = (&pair.dg, &pair.dh) {
        let d = |t: f64| -> Result<f64> { Ok(gx * eval(dh, t, "h'")? - hx * eval(dg, t, "g'")?) };
        if let (Ok(dl), Ok(dr)) = (d(lo), d(hi)) {
            if dl.signum() != dr.signum() && dl != 0.0 && dr != 0.0 {
                tau = numeric::bisect(d, lo, hi, dl, dr)?;
            }
        }
    }
    result(h_fn, a, x, tau, (r - l) / (x - a))
}

/// `ξ(x)`: the largest `τ ∈ (a, x]` with
/// `g′(τ)(h(x) − h(a)) = h′(τ)(g(x) − g(a))`.
pub fn xi_cauchy(pair: &FunctionPair, x: f64, cfg: &SolverConfig) -> Result<MeanValueResult> {
    cfg.validate()?;
    pair.check_x(x)?;
    let (Some(dg), Some(dh)) = (&pair.dg, &pair.dh) else {
        return Err(Error::Capability("the Cauchy point needs g' and h'".into()));
    };
    let a = pair.a;
    let (ga, ha) = (eval(&pair.g, a, "g")?, eval(&pair.h, a, "h")?);
    let (gx, hx) = (eval(&pair.g, x, "g")? - ga, eval(&pair.h, x, "h")? - ha);
    let residual = |t: f64| -> Result<(f64, f64)> {
        let (p, q) = (eval(dg, t, "g'")? * hx, eval(dh, t, "h'")? * gx);
        Ok((p - q, p.abs() + q.abs()))
    };
    let (tau, res) = largest_root(residual, a, x, cfg)?;
    result(Some((&pair.h, ha)), a, x, tau, res)
}

/// `ξ(x)` for Lagrange's theorem: the largest `τ` with `g′(τ)(x − a) = g(x) − g(a)`.
pub fn xi_lagrange(g: &RealFn, dg: &RealFn, a: f64, x: f64, cfg: &SolverConfig) -> Result<MeanValueResult> {
    xi_cauchy(&FunctionPair::lagrange(g.clone(), dg.clone(), a), x, cfg)
}

/// `∫_lo^hi f` by adaptive Simpson with error target `quad_tol · (hi − lo)`.
pub fn integrate<F>(f: F, lo: f64, hi: f64, quad_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let opts = SimpsonOptions::with_tol(quad_tol * (hi - lo).abs());
    Ok(numeric::adaptive_simpson(|t| Ok(f(t)), lo, hi, opts)?.value)
}

/// `η(x)`: the largest `τ ∈ (0, x]` with `f(τ)·∫₀ˣ w = ∫₀ˣ w f`.
pub fn eta_integral(f: &RealFn, w: &RealFn, x: f64, cfg: &SolverConfig) -> Result<MeanValueResult> {
    cfg.validate()?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Input(format!("x = {x} must be positive")));
    }
    let mass = integrate(|t| w(t), 0.0, x, cfg.quad_tol)?;
    if !(mass > 0.0) {
        return Err(Error::Input(format!("weight has no mass on [0, {x}]")));
    }
    let mean = integrate(|t| w(t) * f(t), 0.0, x, cfg.quad_tol)? / mass;
    let residual = |t: f64| -> Result<(f64, f64)> {
        let v = eval(f, t, "f")?;
        Ok((v - mean, v.abs().max(mean.abs())))
    };
    let (tau, res) = largest_root(residual, 0.0, x, cfg)?;
    result(None, 0.0, x, tau, res)
}

/// Tail-window surrogate of an essential upper limit, valid when the sampled
/// quotient is piecewise continuous (measure-zero exceptions are invisible).
#[derive(Debug, Clone, PartialEq)]
pub struct CEstimate {
    pub value: f64,
    pub samples_used: usize,
    pub sup_grid: Vec<(f64, f64)>,
    /// Points where the quotient could not be formed.
    pub skipped: Vec<f64>,
    /// Always set: the estimate assumes a piecewise continuous quotient.
    pub continuity_assumed: bool,
}

fn tail_estimate(points: Vec<(f64, f64)>, skipped: Vec<f64>, window: usize) -> Result<CEstimate> {
    let values: Vec<ExtReal> = points.iter().map(|p| ExtReal::Finite(p.1)).collect();
    let est = limsup_estimate(&values, window.min(values.len()).max(3))?;
    Ok(CEstimate {
        value: est.value.finite().unwrap_or(f64::INFINITY),
        samples_used: points.len(),
        sup_grid: points,
        skipped,
        continuity_assumed: true,
    })
}

/// Samples `(h(x) − h(a))/((x − a)h′(x))` along `seq`.
pub fn estimate_c(h: &RealFn, dh: &RealFn, a: f64, seq: &[f64], window: usize) -> Result<CEstimate> {
    let ha = eval(h, a, "h")?;
    let mut pts = Vec::new();
    let mut skipped = Vec::new();
    for &x in seq {
        let d = dh(x);
        let v = h(x);
        if d == 0.0 || !d.is_finite() || !v.is_finite() {
            skipped.push(x);
            continue;
        }
        pts.push((x, (v - ha) / ((x - a) * d)));
    }
    tail_estimate(pts, skipped, window)
}

/// Samples `∫₀ˣ w / (x w(x))` along `seq`.
pub fn estimate_c_weight(w: &RealFn, seq: &[f64], window: usize, quad_tol: f64) -> Result<CEstimate> {
    let mut pts = Vec::new();
    let mut skipped = Vec::new();
    for &x in seq {
        let wx = w(x);
        if wx == 0.0 || !wx.is_finite() {
            skipped.push(x);
            continue;
        }
        pts.push((x, integrate(|t| w(t), 0.0, x, quad_tol)? / (x * wx)));
    }
    tail_estimate(pts, skipped, window)
}

/// Which mean-value point a trace follows.
#[derive(Clone)]
pub enum Problem {
    /// `μ(x)`; compared with `1/e` through `ratio_h`.
    Mu(FunctionPair),
    /// Cauchy `ξ(x)`; compared with `1/e` through `ratio_h`.
    Cauchy(FunctionPair),
    /// Weighted integral `η(x)` on `[0, x]`; compared with `e^{−C}` through `ratio_t`.
    Integral { f: RealFn, w: RealFn },
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Problem::Mu(p) => f.debug_tuple("Mu").field(p).finish(),
            Problem::Cauchy(p) => f.debug_tuple("Cauchy").field(p).finish(),
            Problem::Integral { .. } => f.write_str("Integral"),
        }
    }
}

/// Per-`x` results with the tail estimate of the monitored ratio.
#[derive(Debug, Clone)]
pub struct MeanValueTrace {
    pub samples: Vec<(f64, Result<MeanValueResult>)>,
    pub estimate: LimsupEstimate,
    /// `C` when the bound is `e^{−C}`.
    pub c: Option<CEstimate>,
    pub bound: f64,
    pub verdict: Verdict,
}

impl MeanValueTrace {
    pub fn results(&self) -> impl Iterator<Item = &MeanValueResult> {
        self.samples.iter().filter_map(|(_, r)| r.as_ref().ok())
    }
}

/// Runs `problem` along `seq` (toward `a`) and checks the tail of the
/// monitored ratio against the applicable lower bound.
pub fn meanvalue_trace(
    problem: &Problem,
    seq: &[f64],
    cfg: &SolverConfig,
    window: usize,
    epsilon: f64,
) -> Result<MeanValueTrace> {
    let samples: Vec<(f64, Result<MeanValueResult>)> = seq
        .par_iter()
        .map(|&x| {
            let r = match problem {
                Problem::Mu(p) => mu_point(p, x, cfg),
                Problem::Cauchy(p) => xi_cauchy(p, x, cfg),
                Problem::Integral { f, w } => eta_integral(f, w, x, cfg),
            };
            (x, r)
        })
        .collect();
    let (series, c, bound): (Vec<ExtReal>, Option<CEstimate>, f64) = match problem {
        Problem::Mu(_) | Problem::Cauchy(_) => (
            samples
                .iter()
                .filter_map(|(_, r)| r.as_ref().ok())
                .map(|r| ExtReal::Finite(r.ratio_h))
                .collect(),
            None,
            1.0 / E,
        ),
        Problem::Integral { w, .. } => {
            let c = estimate_c_weight(w, seq, window, cfg.quad_tol)?;
            let bound = (-c.value).exp();
            (
                samples
                    .iter()
                    .filter_map(|(_, r)| r.as_ref().ok())
                    .map(|r| ExtReal::Finite(r.ratio_t))
                    .collect(),
                Some(c),
                bound,
            )
        }
    };
    if series.len() < window && seq.len() >= window {
        let first = samples
            .iter()
            .find_map(|(x, r)| r.as_ref().err().map(|e| format!("x = {x}: {e}")));
        return Err(Error::Resolution(format!(
            "only {} of {} samples succeeded; first failure at {}",
            series.len(),
            seq.len(),
            first.unwrap_or_default()
        )));
    }
    let estimate = limsup_estimate(&series, window)?;
    let verdict = check_bound(&estimate, bound, epsilon);
    Ok(MeanValueTrace {
        samples,
        estimate,
        c,
        bound,
        verdict,
    })
}

/// `g(x) = (h(x) − h(a))^{1+α}` with `h(t) = t`, `a = 0`.
pub fn remark41(alpha: f64) -> FunctionPair {
    FunctionPair::lagrange(
        real_fn(move |t| t.powf(1.0 + alpha)),
        real_fn(move |t| (1.0 + alpha) * t.powf(alpha)),
        0.0,
    )
}

/// Integrand `−1/ln t` of the extremal function, extended by `0` at `t = 0`.
pub fn extremal_integrand(t: f64) -> f64 {
    if t <= 1e-300 {
        0.0
    } else {
        -1.0 / t.ln()
    }
}

/// `g(x) = −∫₀ˣ dt/ln t` on `[0, 1)`: the Lagrange case in which the bound
/// `1/e` is attained. `g` is evaluated by quadrature with relative error
/// target `quad_tol`; a failed quadrature yields NaN.
pub fn lagrange_extremal(quad_tol: f64) -> FunctionPair {
    FunctionPair::lagrange(
        real_fn(move |x| {
            if x <= 0.0 {
                return 0.0;
            }
            integrate(extremal_integrand, 0.0, x, quad_tol).unwrap_or(f64::NAN)
        }),
        real_fn(extremal_integrand),
        0.0,
    )
}

/// `f(t) = t` with weight `w(t) = t^β`.
pub fn power_weight(beta: f64) -> Problem {
    Problem::Integral {
        f: real_fn(|t| t),
        w: real_fn(move |t| t.powf(beta)),
    }
}
