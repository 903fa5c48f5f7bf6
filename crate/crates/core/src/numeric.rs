//! Scalar numerical kernels shared by the curve, support and mean-value code:
//! adaptive Simpson quadrature, bracketed bisection, ternary search, and a
//! sign-pattern extremum scanner for sampled functions.

use crate::error::{Error, Result};

/// Adaptive Simpson parameters.
#[derive(Debug, Clone, Copy)]
pub struct SimpsonOptions {
    /// Absolute error target for the whole integral.
    pub tol: f64,
    /// Maximum bisection depth of any panel.
    pub max_depth: u32,
    /// Number of equal panels the interval is split into before adapting.
    pub initial_panels: usize,
    /// Hard cap on integrand evaluations.
    pub max_evals: usize,
}

impl Default for SimpsonOptions {
    fn default() -> Self {
        SimpsonOptions {
            tol: 1e-9,
            max_depth: 60,
            initial_panels: 8,
            max_evals: 4_000_000,
        }
    }
}

impl SimpsonOptions {
    pub fn with_tol(tol: f64) -> Self {
        SimpsonOptions {
            tol,
            ..Default::default()
        }
    }
}

/// Outcome of a converged quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

struct SimpsonState<'f> {
    f: &'f mut dyn FnMut(f64) -> Result<f64>,
    evals: usize,
    max_evals: usize,
    max_depth: u32,
    converged: bool,
}

impl SimpsonState<'_> {
    fn eval(&mut self, x: f64) -> Result<f64> {
        self.evals += 1;
        let v = (self.f)(x)?;
        if !v.is_finite() {
            return Err(Error::DomainEval(format!("integrand is not finite at {x}")));
        }
        Ok(v)
    }

    #[allow(clippy::too_many_arguments)]
    fn panel(
        &mut self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<(f64, f64)> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let h = b - a;
        let left = h / 12.0 * (fa + 4.0 * flm + fm);
        let right = h / 12.0 * (fm + 4.0 * frm + fb);
        let both = left + right;
        let delta = both - whole;
        let err = delta.abs() / 15.0;
        // Rounding floor: once the correction is at the noise level of the
        // panel sum, further splitting cannot help.
        let noise = 64.0 * f64::EPSILON * (left.abs() + right.abs());
        if err <= tol || delta.abs() <= noise || lm <= a || rm >= b {
            return Ok((both + delta / 15.0, err));
        }
        if depth >= self.max_depth || self.evals >= self.max_evals {
            self.converged = false;
            return Ok((both + delta / 15.0, err));
        }
        let (l, el) = self.panel(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?;
        let (r, er) = self.panel(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?;
        Ok((l + r, el + er))
    }
}

/// Integrates `f` over `[a, b]` by adaptive Simpson with Richardson correction.
///
/// Fails with [`Error::Accuracy`] (carrying the best estimate) when the depth
/// or evaluation cap is hit before the tolerance is met.
pub fn adaptive_simpson<F>(mut f: F, a: f64, b: f64, opts: SimpsonOptions) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Input(format!("quadrature bounds must be finite: [{a}, {b}]")));
    }
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
            evals: 0,
        });
    }
    if a > b {
        let q = adaptive_simpson(f, b, a, opts)?;
        return Ok(Quadrature { value: -q.value, ..q });
    }
    let panels = opts.initial_panels.max(1);
    let mut state = SimpsonState {
        f: &mut f,
        evals: 0,
        max_evals: opts.max_evals,
        max_depth: opts.max_depth,
        converged: true,
    };
    let width = (b - a) / panels as f64;
    let panel_tol = opts.tol / panels as f64;
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut left = a;
    let mut f_left = state.eval(a)?;
    for k in 0..panels {
        let right = if k + 1 == panels { b } else { a + width * (k + 1) as f64 };
        let mid = 0.5 * (left + right);
        let f_mid = state.eval(mid)?;
        let f_right = state.eval(right)?;
        let whole = (right - left) / 6.0 * (f_left + 4.0 * f_mid + f_right);
        let (v, e) = state.panel(left, right, f_left, f_mid, f_right, whole, panel_tol, 0)?;
        total += v;
        total_err += e;
        left = right;
        f_left = f_right;
    }
    if !state.converged && total_err > opts.tol {
        return Err(Error::Accuracy {
            estimate: total,
            error: total_err,
        });
    }
    Ok(Quadrature {
        value: total,
        error: total_err,
        evals: state.evals,
    })
}

/// Bisection on a bracket with `f(lo)` and `f(hi)` of opposite sign.
///
/// Runs to floating-point resolution of the bracket (or until an exact zero is
/// hit) and returns the endpoint with the smaller residual.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, mut f_lo: f64, mut f_hi: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Resolution(format!(
            "bisection bracket [{lo}, {hi}] does not change sign"
        )));
    }
    for _ in 0..2200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
    }
    Ok(if f_lo.abs() <= f_hi.abs() { lo } else { hi })
}

/// Ternary search for a local extremum of a unimodal function on `[lo, hi]`,
/// stopping once the bracket is narrower than `width`. Returns the final bracket.
pub fn ternary_search<F>(mut f: F, mut lo: f64, mut hi: f64, maximize: bool, width: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let sign = if maximize { 1.0 } else { -1.0 };
    let width = width.max(0.0);
    for _ in 0..400 {
        if hi - lo <= width {
            break;
        }
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if !(lo < m1 && m1 < m2 && m2 < hi) {
            break;
        }
        let f1 = sign * f(m1)?;
        let f2 = sign * f(m2)?;
        if f1 < f2 {
            lo = m1;
        } else if f1 > f2 {
            hi = m2;
        } else {
            lo = m1;
            hi = m2;
        }
    }
    Ok((lo, hi))
}

/// Central difference with the step clipped so the stencil stays inside the
/// open interval `(lo, hi)`.
pub fn central_difference<F>(mut f: F, x: f64, h: f64, lo: f64, hi: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let step = clip_step(x, h, lo, hi)?;
    Ok((f(x + step)? - f(x - step)?) / (2.0 * step))
}

pub(crate) fn clip_step(x: f64, h: f64, lo: f64, hi: f64) -> Result<f64> {
    let room = ((x - lo) * 0.5).min((hi - x) * 0.5);
    let step = h.min(room);
    let floor = 16.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE.sqrt());
    if !(step > floor) || !step.is_finite() {
        return Err(Error::Stencil { t: x, h });
    }
    Ok(step)
}

/// What a sampled difference looks like at the plateau threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Up,
    Down,
    Flat,
    /// Both samples carry zero magnitude (e.g. underflow); no information.
    Void,
}

/// Classification of a sampled local extremum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Max,
    Min,
    /// A run of samples equal within the plateau threshold.
    Plateau,
}

/// A local extremum located on a sampled grid, by sample index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridExtremum {
    pub kind: ExtremumKind,
    /// Index of the extremal sample (for plateaus, the first sample of the run).
    pub first: usize,
    /// Last sample index of a plateau run; equals `first` for strict extrema.
    pub last: usize,
}

/// Detects local extrema of sampled values by the sign pattern of successive
/// differences.
///
/// A difference `|v[i+1] - v[i]| <= eps * max(scale[i], scale[i+1])` is flat;
/// maximal flat runs become plateaus. When both scales are zero the step
/// carries no information and breaks any pattern. The first and last samples
/// are never reported as strict extrema; callers handle the boundaries.
pub fn scan_extrema(values: &[f64], scales: &[f64], eps: f64) -> Vec<GridExtremum> {
    scan_extrema_on(values, scales, eps, None)
}

/// [`scan_extrema`] on a non-uniform grid: flat runs narrower than
/// `min_width` in parameter are treated as unresolved rather than as
/// plateaus, and the steps on either side decide whether the run holds a
/// strict extremum (reported with `first..=last` spanning the run).
pub fn scan_extrema_on(values: &[f64], scales: &[f64], eps: f64, grid: Option<(&[f64], f64)>) -> Vec<GridExtremum> {
    debug_assert_eq!(values.len(), scales.len());
    let n = values.len();
    if n < 2 {
        return Vec::new();
    }
    let steps: Vec<Step> = (0..n - 1)
        .map(|i| {
            let s = scales[i].max(scales[i + 1]);
            let d = values[i + 1] - values[i];
            if s <= 0.0 && d == 0.0 {
                Step::Void
            } else if d.abs() <= eps * s {
                Step::Flat
            } else if d > 0.0 {
                Step::Up
            } else {
                Step::Down
            }
        })
        .collect();

    let mut out = Vec::new();
    let mut i = 0;
    while i < steps.len() {
        match steps[i] {
            Step::Flat => {
                let start = i;
                while i < steps.len() && steps[i] == Step::Flat {
                    i += 1;
                }
                let narrow = grid.is_some_and(|(x, w)| x[i] - x[start] < w);
                if !narrow {
                    out.push(GridExtremum {
                        kind: ExtremumKind::Plateau,
                        first: start,
                        last: i,
                    });
                } else if start > 0 && i < steps.len() {
                    let kind = match (steps[start - 1], steps[i]) {
                        (Step::Up, Step::Down) => Some(ExtremumKind::Max),
                        (Step::Down, Step::Up) => Some(ExtremumKind::Min),
                        _ => None,
                    };
                    if let Some(kind) = kind {
                        out.push(GridExtremum {
                            kind,
                            first: start,
                            last: i,
                        });
                    }
                }
            }
            Step::Up | Step::Down => {
                if i + 1 < steps.len() {
                    let next = steps[i + 1];
                    let kind = match (steps[i], next) {
                        (Step::Up, Step::Down) => Some(ExtremumKind::Max),
                        (Step::Down, Step::Up) => Some(ExtremumKind::Min),
                        _ => None,
                    };
                    if let Some(kind) = kind {
                        out.push(GridExtremum {
                            kind,
                            first: i + 1,
                            last: i + 1,
                        });
                    }
                }
                i += 1;
            }
            Step::Void => i += 1,
        }
    }
    out
}

/// A sign change or exact zero of sampled values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridRoot {
    /// `values[i]` and `values[i + 1]` have strictly opposite signs.
    Bracket(usize),
    /// A single sample at the zero threshold.
    Sample(usize),
    /// A run of consecutive samples at the zero threshold.
    Run(usize, usize),
}

/// Locates sign changes and zero runs of sampled values. A sample is zero when
/// `|v| <= eps * scale`; a sample with zero scale is skipped.
pub fn scan_roots(values: &[f64], scales: &[f64], eps: f64) -> Vec<GridRoot> {
    #[derive(Clone, Copy, PartialEq)]
    enum Sign {
        Pos,
        Neg,
        Zero,
        Void,
    }
    let signs: Vec<Sign> = values
        .iter()
        .zip(scales)
        .map(|(&v, &s)| {
            if s <= 0.0 {
                Sign::Void
            } else if v.abs() <= eps * s {
                Sign::Zero
            } else if v > 0.0 {
                Sign::Pos
            } else {
                Sign::Neg
            }
        })
        .collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < signs.len() {
        match signs[i] {
            Sign::Zero => {
                let start = i;
                while i < signs.len() && signs[i] == Sign::Zero {
                    i += 1;
                }
                if i - start == 1 {
                    out.push(GridRoot::Sample(start));
                } else {
                    out.push(GridRoot::Run(start, i - 1));
                }
            }
            Sign::Pos | Sign::Neg => {
                if i + 1 < signs.len() {
                    let next = signs[i + 1];
                    if (signs[i] == Sign::Pos && next == Sign::Neg) || (signs[i] == Sign::Neg && next == Sign::Pos) {
                        out.push(GridRoot::Bracket(i));
                    }
                }
                i += 1;
            }
            Sign::Void => i += 1,
        }
    }
    out
}

/// Grid on `(lo, hi]`: `n` uniform steps plus a geometric cluster of points
/// approaching `hi`, so features much narrower than the uniform spacing next
/// to the right endpoint are still sampled. The first entry is `lo` itself.
pub fn graded_grid(lo: f64, hi: f64, n: usize, cluster: usize) -> Vec<f64> {
    let n = n.max(1);
    let h = (hi - lo) / n as f64;
    let mut pts: Vec<f64> = (0..=n).map(|i| if i == n { hi } else { lo + h * i as f64 }).collect();
    let min_gap = 64.0 * f64::EPSILON * hi.abs().max(lo.abs()).max(f64::MIN_POSITIVE);
    let mut step = h;
    let mut extra = Vec::new();
    for _ in 0..cluster {
        step *= 0.5;
        if step < min_gap {
            break;
        }
        extra.push(hi - step);
    }
    pts.pop();
    pts.extend(extra);
    pts.push(hi);
    pts.dedup();
    pts
}
