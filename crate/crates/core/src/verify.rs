//! The acceptance suite: reproduction of every closed-form number, the
//! universal-bound sweep, and invariant checks, each with a runtime budget.

use std::f64::consts::E;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arclength::{eq6_check, ArcConfig};
use crate::asymptote::{
    check_universal_bound, closed_form_ratio, limsup_estimate, make_sequence, ratio_trace, ClosedForm, RatioKind,
    Verdict,
};
use crate::catalog::{self, Family};
use crate::curve::{real_fn, Curve, Domain};
use crate::meanvalue::{
    estimate_c_weight, eta_integral, lagrange_extremal, mu_point, power_weight, remark41, xi_cauchy, FunctionPair,
    Problem, SolverConfig,
};
use crate::support::{analyze_chord, find_support_set, phi_value, PointKind, SetSelection, SupportConfig};
use crate::Result;

/// Result of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl Outcome {
    /// One-line summary, e.g. `[PASS] 1 log spiral ...`.
    pub fn line(&self) -> String {
        format!(
            "[{}] {} {} ({:.2}s of {}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }
}

pub const CRITERIA: [(u8, &str, u64); 9] = [
    (1, "log spiral ratios equal e^(-alpha arccot alpha)", 10),
    (2, "power spiral tail estimate equals (1+1/alpha)^(-alpha)", 10),
    (3, "exp(-t^2) spiral ratios decrease toward 1/e", 20),
    (4, "universal 1/e bound on the catalog", 60),
    (5, "Cauchy points of the extremal power family", 5),
    (6, "Lagrange points of the extremal integral function", 10),
    (7, "weighted integral mean value with power weights", 5),
    (8, "property suites and brute-force oracle", 120),
    (9, "arc length versus chord length", 20),
];

/// Runs one criterion by number (1 to 9).
pub fn run(id: u8) -> Option<Outcome> {
    let &(_, name, secs) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let res = match id {
        1 => log_spiral_ratios(),
        2 => power_spiral_ratios(),
        3 => gaussian_spiral_ratios(),
        4 => catalog_bound(),
        5 => remark_family(),
        6 => lagrange_extremal_case(),
        7 => power_weights(),
        8 => properties(),
        9 => arc_versus_chord(),
        _ => return None,
    };
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(secs);
    let (ok, detail) = match res {
        Ok((ok, detail)) => (ok, detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let (passed, detail) = if ok && elapsed > budget {
        (false, format!("{detail}; over the time budget"))
    } else {
        (ok, detail)
    };
    Some(Outcome {
        id,
        name,
        passed,
        detail,
        elapsed,
        budget,
    })
}

/// Runs all criteria in order.
pub fn run_all() -> Vec<Outcome> {
    CRITERIA.iter().filter_map(|c| run(c.0)).collect()
}

type Check = Result<(bool, String)>;

fn trace_for(fam: &Family) -> Result<crate::asymptote::RatioTrace> {
    let seq = make_sequence(&fam.sequence, fam.curve.domain())?;
    Ok(ratio_trace(&fam.curve, &seq, &fam.config))
}

fn finite_series(trace: &crate::asymptote::RatioTrace, kind: RatioKind) -> Vec<f64> {
    trace
        .series(kind)
        .iter()
        .map(|r| r.finite().unwrap_or(f64::INFINITY))
        .collect()
}

fn log_spiral_ratios() -> Check {
    let mut worst = 0.0f64;
    let mut failures = 0;
    for alpha in [0.5, 1.0, 2.0, 5.0] {
        let fam = catalog::ex1(alpha)?;
        let want = closed_form_ratio(ClosedForm::LogSpiral, alpha)?;
        let trace = trace_for(&fam)?;
        failures += trace.failures().count();
        for kind in [RatioKind::Support, RatioKind::Tangent] {
            let s = finite_series(&trace, kind);
            failures += fam.sequence.count() - s.len();
            for r in s {
                worst = worst.max((r - want).abs());
            }
        }
    }
    Ok((
        failures == 0 && worst <= 1e-5,
        format!("max deviation {worst:.2e}, failed samples {failures}"),
    ))
}

fn power_spiral_ratios() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for alpha in [1.0, 2.0] {
        let fam = catalog::ex2(alpha)?;
        let want = closed_form_ratio(ClosedForm::PowerSpiral, alpha)?;
        let trace = trace_for(&fam)?;
        for kind in [RatioKind::Support, RatioKind::Tangent] {
            let est = limsup_estimate(&trace.series(kind), 8)?;
            let v = est.value.finite().unwrap_or(f64::INFINITY);
            ok &= (v - want).abs() <= 1e-3 && trace.failures().count() == 0;
            parts.push(format!("alpha={alpha} {kind} {v:.6} ({})", est.trend));
        }
    }
    Ok((ok, parts.join(", ")))
}

fn gaussian_spiral_ratios() -> Check {
    let fam = catalog::ex3(2.0)?;
    let trace = trace_for(&fam)?;
    let mut ok = trace.failures().count() == 0;
    let mut parts = Vec::new();
    for kind in [RatioKind::Support, RatioKind::Tangent] {
        let s = finite_series(&trace, kind);
        ok &= s.len() == 20;
        let last = *s.last().unwrap_or(&f64::NAN);
        let tail = &s[s.len().saturating_sub(10)..];
        let monotone = tail.windows(2).all(|w| w[1] < w[0]);
        let above = s.iter().all(|&r| r > 1.0 / E);
        ok &= (last - 1.0 / E).abs() < 0.05 && monotone && above;
        parts.push(format!("{kind}: last {last:.10}, decreasing over last 10: {monotone}"));
    }
    Ok((ok, parts.join("; ")))
}

fn catalog_bound() -> Check {
    let cat = catalog::catalog()?;
    let results: Vec<Result<(String, Vec<Verdict>)>> = cat
        .par_iter()
        .map(|fam| {
            let trace = trace_for(fam)?;
            let mut verdicts = Vec::new();
            for kind in [RatioKind::Support, RatioKind::Tangent] {
                let s = trace.series(kind);
                if s.is_empty() {
                    continue;
                }
                verdicts.push(check_universal_bound(&limsup_estimate(&s, 8)?, 1e-3));
            }
            Ok((fam.name.clone(), verdicts))
        })
        .collect();
    let mut bad = Vec::new();
    for r in results {
        let (name, verdicts) = r?;
        if verdicts.is_empty() || verdicts.iter().any(|v| *v != Verdict::Holds) {
            bad.push(name);
        }
    }
    Ok((
        bad.is_empty() && cat.len() >= 10,
        if bad.is_empty() {
            format!("{} families, all hold", cat.len())
        } else {
            format!("not holding: {}", bad.join(", "))
        },
    ))
}

fn remark_family() -> Check {
    let cfg = SolverConfig::default();
    let xs: Vec<f64> = (0..=6).map(|k| 10f64.powi(-k)).collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for alpha in [1.0f64, 3.0] {
        let want = (1.0 / (1.0 + alpha)).powf(1.0 / alpha);
        let pair = remark41(alpha);
        let ratios: Vec<f64> = xs
            .iter()
            .map(|&x| xi_cauchy(&pair, x, &cfg).map(|r| r.ratio_h))
            .collect::<Result<_>>()?;
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let dev = (hi - want).abs().max((lo - want).abs());
        ok &= hi - lo <= 1e-9 && dev <= 1e-9;
        parts.push(format!("alpha={alpha}: spread {:.1e}, deviation {dev:.1e}", hi - lo));
    }
    Ok((ok, parts.join("; ")))
}

fn lagrange_extremal_case() -> Check {
    let cfg = SolverConfig::default();
    let pair = lagrange_extremal(cfg.quad_tol);
    let xs: Vec<f64> = (4..=10).map(|k| 10f64.powi(-k)).collect();
    let ratios: Vec<f64> = xs
        .par_iter()
        .map(|&x| xi_cauchy(&pair, x, &cfg).map(|r| r.ratio_t))
        .collect::<Result<_>>()?;
    let decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
    let last = ratios[ratios.len() - 1];
    let band = 2.0 / xs[xs.len() - 1].ln().abs();
    let above = ratios.iter().all(|&r| r >= 1.0 / E - 1e-6);
    Ok((
        decreasing && (last - 1.0 / E).abs() <= band && above,
        format!(
            "xi/x from {:.6} to {last:.6}, decreasing: {decreasing}, band {band:.4}",
            ratios[0]
        ),
    ))
}

fn power_weights() -> Check {
    let cfg = SolverConfig::default();
    let xs: Vec<f64> = (0..8).map(|k| 0.5f64.powi(k)).collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for beta in [0.0f64, 1.0, 2.0] {
        let want = (beta + 1.0) / (beta + 2.0);
        let Problem::Integral { f, w } = power_weight(beta) else {
            unreachable!()
        };
        let mut dev = 0.0f64;
        for &x in &xs {
            dev = dev.max((eta_integral(&f, &w, x, &cfg)?.ratio_t - want).abs());
        }
        let c = estimate_c_weight(&w, &xs, 8, cfg.quad_tol)?;
        let c_dev = (c.value - 1.0 / (beta + 1.0)).abs();
        let bound = (-1.0 / (beta + 1.0)).exp();
        ok &= dev <= 1e-9 && c_dev <= 1e-9 && want >= bound;
        parts.push(format!(
            "beta={beta}: eta/x dev {dev:.1e}, C dev {c_dev:.1e}, {want:.4} >= {bound:.4}"
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn arc_versus_chord() -> Check {
    let cfg = ArcConfig::default();
    let cat = catalog::catalog()?;
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["parabola", "cubic", "circle"] {
        let fam = cat.iter().find(|f| f.name == name).expect("catalog entry");
        let seq = make_sequence(&fam.sequence, fam.curve.domain())?;
        let r = eq6_check(&fam.curve, &seq, 8, 1e-4, &cfg)?;
        ok &= r.tends_to_one;
        parts.push(format!("{name} L/D in [{:.8}, {:.8}]", r.tail_range.0, r.tail_range.1));
    }
    let spiral = catalog::ex1(1.0)?;
    let seq = make_sequence(&spiral.sequence, spiral.curve.domain())?;
    let r = eq6_check(&spiral.curve, &seq, seq.len(), 1e-4, &cfg)?;
    let dev = (r.tail_range.0 - 2f64.sqrt())
        .abs()
        .max((r.tail_range.1 - 2f64.sqrt()).abs());
    ok &= dev <= 1e-6 && !r.tends_to_one;
    parts.push(format!("log spiral L/D - sqrt2 within {dev:.1e}"));
    Ok((ok, parts.join("; ")))
}

// ---------------------------------------------------------------------------
// criterion 8

/// A randomly drawn smooth test curve on `[0, 3)`.
#[derive(Debug, Clone, Copy)]
pub struct RandomCurve {
    pub trig: bool,
    pub c: [f64; 4],
}

impl RandomCurve {
    pub fn draw(rng: &mut impl Rng, trig: bool) -> Self {
        let mut c = [0.0; 4];
        for v in &mut c {
            *v = rng.gen_range(-1.0..1.0);
        }
        if trig {
            c[1] = rng.gen_range(2.0..6.0);
        }
        RandomCurve { trig, c }
    }

    fn xy(&self, t: f64) -> (f64, f64, f64, f64) {
        let [c0, c1, c2, c3] = self.c;
        if self.trig {
            // x = t + c0 t²/4, y = sin(c1 t + c2) − sin c2 + c3 t
            let x = t + 0.25 * c0 * t * t;
            let y = (c1 * t + c2).sin() - c2.sin() + c3 * t;
            (x, y, 1.0 + 0.5 * c0 * t, c1 * (c1 * t + c2).cos() + c3)
        } else {
            // x = t + c0 t²/4, y = c1 t + 2 c2 t² + c3 t³ − t³/2... kept cubic
            let x = t + 0.25 * c0 * t * t;
            let y = c1 * t + 2.0 * c2 * t * t + (c3 - 0.5) * t * t * t;
            (x, y, 1.0 + 0.5 * c0 * t, c1 + 4.0 * c2 * t + 3.0 * (c3 - 0.5) * t * t)
        }
    }

    pub fn curve(&self) -> Curve {
        let (a, b, c, d) = (*self, *self, *self, *self);
        Curve::cartesian(
            real_fn(move |t| a.xy(t).0),
            real_fn(move |t| b.xy(t).1),
            Domain::new(0.0, 3.0).expect("valid domain"),
            None,
        )
        .expect("finite start")
        .with_xy_derivative(real_fn(move |t| c.xy(t).2), real_fn(move |t| d.xy(t).3))
    }
}

/// Strict local extrema of `Φ` on `n` uniform points of `(a, t)`, refined
/// by a three-point parabola.
pub fn brute_force_support(curve: &Curve, t: f64, n: usize) -> Result<Vec<f64>> {
    let a = curve.domain().a();
    let h = (t - a) / n as f64;
    let phi: Vec<f64> = (1..n)
        .map(|i| phi_value(curve, t, a + h * i as f64))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for i in 1..phi.len() - 1 {
        let (l, m, r) = (phi[i - 1], phi[i], phi[i + 1]);
        if (m > l && m > r) || (m < l && m < r) {
            let denom = l - 2.0 * m + r;
            let shift = if denom != 0.0 { 0.5 * (l - r) / denom } else { 0.0 };
            out.push(a + h * ((i + 1) as f64 + shift.clamp(-1.0, 1.0)));
        }
    }
    Ok(out)
}

fn oracle_check(seed: u64) -> Result<(usize, usize, f64, Vec<String>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<(RandomCurve, f64)> = (0..20)
        .map(|k| {
            let c = RandomCurve::draw(&mut rng, k % 2 == 1);
            (c, rng.gen_range(1.5..2.9))
        })
        .collect();
    let rows: Vec<Result<(usize, f64, Option<String>)>> = draws
        .par_iter()
        .enumerate()
        .map(|(k, (rc, t))| {
            let curve = rc.curve();
            let brute = brute_force_support(&curve, *t, 1_000_000)?;
            let report = find_support_set(&curve, *t, &SupportConfig::default())?;
            let found: Vec<f64> = report
                .support
                .iter()
                .filter(|p| p.offset != 0.0 && p.kind != PointKind::Plateau)
                .map(|p| p.tau)
                .collect();
            let mut worst = 0.0f64;
            for &b in &brute {
                let d = found.iter().map(|f| (f - b).abs()).fold(f64::INFINITY, f64::min);
                worst = worst.max(d);
            }
            let problem = (found.len() != brute.len() || worst > 1e-6).then(|| {
                format!(
                    "curve {k}: {} found vs {} brute, worst {worst:.1e}",
                    found.len(),
                    brute.len()
                )
            });
            Ok((brute.len(), worst, problem))
        })
        .collect();
    let (mut matched, mut worst) = (0, 0.0f64);
    let mut problems = Vec::new();
    for r in rows {
        let (n, w, p) = r?;
        matched += n;
        worst = worst.max(w);
        problems.extend(p);
    }
    Ok((draws.len(), matched, worst, problems))
}

fn taus(curve: &Curve, t: f64, sets: SetSelection) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let r = analyze_chord(curve, t, &SupportConfig::default(), sets)?;
    let mut s: Vec<f64> = r.support.iter().map(|p| p.tau).collect();
    let mut tg: Vec<f64> = r.tangent.iter().map(|p| p.tau).collect();
    s.sort_by(f64::total_cmp);
    tg.sort_by(f64::total_cmp);
    Ok((s, tg, r.ratio_support.and_then(|x| x.finite()).unwrap_or(f64::NAN)))
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn invariance_check(rc: &RandomCurve, t: f64) -> Result<Vec<String>> {
    let mut problems = Vec::new();
    let base = rc.curve();
    let (s0, t0, r0) = taus(&base, t, SetSelection::BOTH)?;

    // S ⊆ T: each strict support point is a tangency root
    for s in &s0 {
        if !t0.iter().any(|x| (x - s).abs() <= 1e-8) && (*s - t).abs() > 0.0 {
            problems.push(format!("support point {s} has no tangent root"));
        }
    }

    // rotation + translation, and scaling about the start
    let (th, dx, dy, lam) = (0.7f64, 3.0, -2.0, 4.5);
    let (sn, cs) = th.sin_cos();
    let rot = move |p: (f64, f64)| (cs * p.0 - sn * p.1 + dx, sn * p.0 + cs * p.1 + dy);
    let (a1, a2, a3, a4) = (*rc, *rc, *rc, *rc);
    let moved = Curve::cartesian(
        real_fn(move |t| {
            let q = a1.xy(t);
            rot((q.0, q.1)).0
        }),
        real_fn(move |t| {
            let q = a2.xy(t);
            rot((q.0, q.1)).1
        }),
        Domain::new(0.0, 3.0)?,
        None,
    )?
    .with_xy_derivative(
        real_fn(move |t| {
            let q = a3.xy(t);
            cs * q.2 - sn * q.3
        }),
        real_fn(move |t| {
            let q = a4.xy(t);
            sn * q.2 + cs * q.3
        }),
    );
    let (s1, t1, r1) = taus(&moved, t, SetSelection::BOTH)?;
    if max_gap(&s0, &s1) > 1e-8 || max_gap(&t0, &t1) > 1e-8 || (r0 - r1).abs() > 1e-9 {
        problems.push("Euclidean motion changed the sets".into());
    }
    let (b1, b2, b3, b4) = (*rc, *rc, *rc, *rc);
    let scaled = Curve::cartesian(
        real_fn(move |t| lam * b1.xy(t).0),
        real_fn(move |t| lam * b2.xy(t).1),
        Domain::new(0.0, 3.0)?,
        None,
    )?
    .with_xy_derivative(real_fn(move |t| lam * b3.xy(t).2), real_fn(move |t| lam * b4.xy(t).3));
    let (s2, t2, r2) = taus(&scaled, t, SetSelection::BOTH)?;
    if max_gap(&s0, &s2) > 1e-8 || max_gap(&t0, &t2) > 1e-8 || (r0 - r2).abs() > 1e-9 {
        problems.push("scaling changed the sets".into());
    }

    // reparameterization τ = u + u²/4 maps (0, 2) onto (0, 3)
    let phi = |u: f64| u + 0.25 * u * u;
    let u_t = 2.0 * ((1.0 + t).sqrt() - 1.0);
    let (c1, c2, c3, c4) = (*rc, *rc, *rc, *rc);
    let re = Curve::cartesian(
        real_fn(move |u| c1.xy(phi(u)).0),
        real_fn(move |u| c2.xy(phi(u)).1),
        Domain::new(0.0, 2.0)?,
        None,
    )?
    .with_xy_derivative(
        real_fn(move |u| c3.xy(phi(u)).2 * (1.0 + 0.5 * u)),
        real_fn(move |u| c4.xy(phi(u)).3 * (1.0 + 0.5 * u)),
    );
    let (s3, t3, r3) = taus(&re, u_t, SetSelection::BOTH)?;
    let s3: Vec<f64> = s3.iter().map(|&u| phi(u)).collect();
    let t3: Vec<f64> = t3.iter().map(|&u| phi(u)).collect();
    if max_gap(&s0, &s3) > 1e-7 || max_gap(&t0, &t3) > 1e-7 || (r0 - r3).abs() > 1e-9 {
        problems.push("reparameterization changed the point sets".into());
    }

    // Φ vanishes at both ends of the chord
    if phi_value(&base, t, t)? != 0.0 || phi_value(&base, t, 1e-12)?.abs() > 1e-9 {
        problems.push("Phi does not vanish at the chord ends".into());
    }

    // arc length: additivity and chord bound
    let tol = 1e-9;
    let (p, q, r) = (0.2, 0.2 + 0.5 * (t - 0.2), t);
    let (lpq, lqr, lpr) = (
        base.arc_length(p, q, tol)?,
        base.arc_length(q, r, tol)?,
        base.arc_length(p, r, tol)?,
    );
    if (lpq + lqr - lpr).abs() > 3.0 * tol {
        problems.push(format!("arc length not additive: {:.2e}", lpq + lqr - lpr));
    }
    let chord = (base.eval_point(r)? - base.eval_point(p)?).norm();
    if lpr < chord - tol {
        problems.push("arc length below chord".into());
    }
    Ok(problems)
}

fn meanvalue_check() -> Result<Vec<String>> {
    let cfg = SolverConfig::default();
    let pairs = [
        FunctionPair::lagrange(real_fn(f64::sin), real_fn(f64::cos), 0.0),
        FunctionPair::lagrange(real_fn(|t| t * t * t - t), real_fn(|t| 3.0 * t * t - 1.0), 0.0),
        FunctionPair::new(real_fn(f64::exp), real_fn(|t| t + t * t), 0.0)
            .with_derivatives(real_fn(f64::exp), real_fn(|t| 1.0 + 2.0 * t)),
        FunctionPair::new(real_fn(|t| (3.0 * t).sin() + t), real_fn(|t| t.powi(3) + t), 0.0)
            .with_derivatives(real_fn(|t| 3.0 * (3.0 * t).cos() + 1.0), real_fn(|t| 3.0 * t * t + 1.0)),
    ];
    let mut problems = Vec::new();
    for (k, pair) in pairs.iter().enumerate() {
        for x in [0.5, 1.0, 2.0] {
            let xi = xi_cauchy(pair, x, &cfg)?;
            let mu = mu_point(pair, x, &cfg)?;
            if xi.residual > 1e-9 {
                problems.push(format!("pair {k} x={x}: xi residual {:.1e}", xi.residual));
            }
            if xi.tau < mu.tau - 1e-8 * x {
                problems.push(format!("pair {k} x={x}: xi {} below mu {}", xi.tau, mu.tau));
            }
            let (dg, dh) = (pair.dg.clone().expect("dg"), pair.dh.clone().expect("dh"));
            let (gx, hx) = ((pair.g)(x) - (pair.g)(0.0), (pair.h)(x) - (pair.h)(0.0));
            let resid = |t: f64| dg(t) * hx - dh(t) * gx;
            // no larger solution on a 10⁴-point grid above each point
            for (what, tau, gap) in [("xi", xi.tau, 1e-9 * x), ("mu", mu.tau, 1e-7 * x)] {
                let lo = tau + gap;
                if lo >= x {
                    continue;
                }
                let first = resid(lo).signum();
                let flips = (1..=10_000).any(|i| resid(lo + (x - lo) * i as f64 / 10_000.0).signum() != first);
                if flips {
                    problems.push(format!("pair {k} x={x}: a larger {what} exists"));
                }
            }
        }
    }
    Ok(problems)
}

fn properties() -> Check {
    let (n, matched, worst, mut problems) = oracle_check(20_240_601)?;
    if matched < n {
        problems.push(format!("only {matched} extrema on {n} curves; the oracle is too weak"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..6 {
        let rc = RandomCurve::draw(&mut rng, k % 2 == 0);
        let t = rng.gen_range(1.5..2.9);
        problems.extend(invariance_check(&rc, t)?.into_iter().map(|p| format!("curve {k}: {p}")));
    }
    problems.extend(meanvalue_check()?);
    let detail = if problems.is_empty() {
        format!("oracle matched {matched} extrema on {n} curves, worst tau gap {worst:.1e}; invariance, arc length and mean-value checks clean")
    } else {
        problems.join("; ")
    };
    Ok((problems.is_empty(), detail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Vec2;

    #[test]
    fn brute_force_finds_parabola_vertex() {
        let c = Curve::graph(real_fn(|t| t * t), Domain::new(0.0, 3.0).unwrap(), None).unwrap();
        let b = brute_force_support(&c, 2.0, 10_000).unwrap();
        assert_eq!(b.len(), 1);
        assert!((b[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn random_curves_start_at_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for trig in [false, true] {
            let c = RandomCurve::draw(&mut rng, trig).curve();
            assert_eq!(c.start_point(), Vec2::ZERO);
        }
    }

    #[test]
    fn unknown_criterion() {
        assert!(run(10).is_none());
    }
}
