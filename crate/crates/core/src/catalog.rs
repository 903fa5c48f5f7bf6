//! Built-in curve families with pinned constants and default sequences.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::asymptote::{closed_form_ratio, ClosedForm, SequenceSpec};
use crate::curve::{real_fn, Curve, Domain, Vec2};
use crate::support::SupportConfig;
use crate::Result;

/// A named curve with the sequence it is traced along.
#[derive(Debug, Clone)]
pub struct Family {
    pub name: String,
    pub curve: Curve,
    pub sequence: SequenceSpec,
    /// Limit of the ratios when known in closed form.
    pub expected: Option<f64>,
    pub config: SupportConfig,
}

fn whole_line() -> Domain {
    Domain::new(f64::NEG_INFINITY, f64::INFINITY).expect("valid domain")
}

fn geometric(t0: f64) -> SequenceSpec {
    SequenceSpec::GeometricToFinite {
        a: 0.0,
        t0,
        r: 0.7,
        count: 48,
    }
}

/// Logarithmic spiral `ρ = e^{αt}` on `(−∞, ∞)`, held as `ln ρ = αt`.
pub fn log_spiral(alpha: f64) -> Result<Curve> {
    Ok(Curve::polar_log(real_fn(move |t| alpha * t), whole_line())?
        .with_log_derivative(real_fn(move |_| alpha))
        .with_log_increment(Arc::new(move |_, s| alpha * s)))
}

/// Power spiral `ρ = t^α` on `(0, ∞)`.
pub fn power_spiral(alpha: f64) -> Result<Curve> {
    Ok(
        Curve::polar(real_fn(move |t| t.powf(alpha)), Domain::new(0.0, f64::INFINITY)?)?
            .with_rho_derivative(real_fn(move |t| alpha * t.powf(alpha - 1.0))),
    )
}

/// `ρ = e^{−(−t)^l}` on `(−∞, 0)`, approaching the pole as `t → −∞`.
pub fn gaussian_spiral(l: f64) -> Result<Curve> {
    Ok(
        Curve::polar_log(real_fn(move |t| -(-t).powf(l)), Domain::new(f64::NEG_INFINITY, 0.0)?)?
            .with_log_derivative(real_fn(move |t| l * (-t).powf(l - 1.0)))
            .with_log_increment(Arc::new(move |t, s| -(-t).powf(l) * (l * (s / t).ln_1p()).exp_m1())),
    )
}

/// `ρ = e^t (2 + sin 3t)`: a spiral whose radius oscillates within each turn.
pub fn wobbly_spiral() -> Result<Curve> {
    let g = |t: f64| (2.0 + (3.0 * t).sin()).ln();
    Ok(Curve::polar_log(real_fn(move |t| t + g(t)), whole_line())?
        .with_log_derivative(real_fn(|t| 1.0 + 3.0 * (3.0 * t).cos() / (2.0 + (3.0 * t).sin())))
        .with_log_increment(Arc::new(move |t, s| s + g(t + s) - g(t))))
}

/// Polygon through `e^{c k}(cos kh, sin kh)` with `h = π/3`, linear between
/// vertices; continuous but not differentiable.
pub fn polygonal_spiral(c: f64) -> Result<Curve> {
    let h = PI / 3.0;
    let vertex = move |k: f64| {
        let r = (c * k).exp();
        Vec2::new(r * (k * h).cos(), r * (k * h).sin())
    };
    let at = move |t: f64| {
        let u = t / h;
        let k = u.floor();
        let w = u - k;
        let (p, q) = (vertex(k), vertex(k + 1.0));
        Vec2::new(p.x + w * (q.x - p.x), p.y + w * (q.y - p.y))
    };
    Ok(Curve::cartesian(
        real_fn(move |t| at(t).x),
        real_fn(move |t| at(t).y),
        whole_line(),
        Some(Vec2::ZERO),
    )?
    .non_differentiable())
}

fn graph(f: fn(f64) -> f64, df: fn(f64) -> f64, b: f64) -> Result<Curve> {
    Ok(Curve::graph(real_fn(f), Domain::new(0.0, b)?, Some(Vec2::ZERO))?.with_graph_derivative(real_fn(df)))
}

fn family(name: &str, curve: Curve, sequence: SequenceSpec, expected: Option<f64>) -> Family {
    Family {
        name: name.to_string(),
        curve,
        sequence,
        expected,
        config: SupportConfig::default(),
    }
}

pub fn ex1(alpha: f64) -> Result<Family> {
    Ok(family(
        &format!("ex1-alpha{alpha}"),
        log_spiral(alpha)?,
        SequenceSpec::ExponentialToMinusInf {
            t0: 1.0,
            s: 1.5,
            count: 32,
        },
        Some(closed_form_ratio(ClosedForm::LogSpiral, alpha)?),
    ))
}

pub fn ex2(alpha: f64) -> Result<Family> {
    Ok(family(
        &format!("ex2-alpha{alpha}"),
        power_spiral(alpha)?,
        geometric(1.0),
        Some(closed_form_ratio(ClosedForm::PowerSpiral, alpha)?),
    ))
}

pub fn ex3(l: f64) -> Result<Family> {
    Ok(family(
        &format!("ex3-l{l}"),
        gaussian_spiral(l)?,
        SequenceSpec::ExponentialToMinusInf {
            t0: 5.0,
            s: 1.5,
            count: 20,
        },
        Some((-1.0f64).exp()),
    ))
}

/// The full catalog used by the universal-bound sweep.
pub fn catalog() -> Result<Vec<Family>> {
    let mut out = Vec::new();
    for alpha in [0.5, 1.0, 2.0, 5.0] {
        out.push(ex1(alpha)?);
    }
    for alpha in [1.0, 2.0] {
        out.push(ex2(alpha)?);
    }
    out.push(ex3(2.0)?);
    out.push(family(
        "parabola",
        graph(|t| t * t, |t| 2.0 * t, 4.0)?,
        geometric(1.0),
        Some(0.5),
    ));
    out.push(family(
        "cubic",
        graph(|t| t * t * t, |t| 3.0 * t * t, 4.0)?,
        geometric(1.0),
        Some(1.0 / 3f64.sqrt()),
    ));
    out.push(family(
        "quartic",
        graph(|t| t.powi(4), |t| 4.0 * t.powi(3), 4.0)?,
        geometric(1.0),
        Some(0.25f64.powf(1.0 / 3.0)),
    ));
    // 1 − cos t written without cancellation
    let circle = Curve::cartesian(
        real_fn(f64::sin),
        real_fn(|t| 2.0 * (0.5 * t).sin().powi(2)),
        Domain::new(0.0, 6.0)?,
        None,
    )?
    .with_xy_derivative(real_fn(f64::cos), real_fn(f64::sin));
    out.push(family("circle", circle, geometric(3.0), Some(0.5)));
    out.push(family(
        "log-oscillating",
        graph(
            |t| t * t * (2.0 + t.ln().sin()),
            |t| t * (4.0 + 2.0 * t.ln().sin() + t.ln().cos()),
            1.0,
        )?,
        SequenceSpec::GeometricToFinite {
            a: 0.0,
            t0: 0.5,
            r: 0.7,
            count: 48,
        },
        None,
    ));
    out.push(family(
        "wobbly-spiral",
        wobbly_spiral()?,
        SequenceSpec::ExponentialToMinusInf {
            t0: 1.0,
            s: 1.5,
            count: 32,
        },
        None,
    ));
    out.push(family(
        "polygonal-spiral",
        polygonal_spiral(0.2)?,
        SequenceSpec::ExponentialToMinusInf {
            t0: 1.0,
            s: 1.5,
            count: 16,
        },
        None,
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_large_enough_and_evaluable() {
        let cat = catalog().unwrap();
        assert!(cat.len() >= 10);
        for fam in &cat {
            let t = match fam.sequence {
                SequenceSpec::GeometricToFinite { t0, .. } => t0,
                SequenceSpec::ExponentialToMinusInf { t0, .. } => -t0,
            };
            assert!(fam.curve.eval_point(t).unwrap().is_finite(), "{}", fam.name);
        }
    }

    #[test]
    fn gaussian_spiral_increment_is_accurate() {
        let c = gaussian_spiral(2.0).unwrap();
        let d = c.distance_from_start(-3.0).unwrap();
        assert!((d - (-9.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn polygon_passes_through_vertices() {
        let c = polygonal_spiral(0.2).unwrap();
        let p = c.eval_point(PI / 3.0).unwrap();
        let r = 0.2f64.exp();
        assert!((p.x - r * 0.5).abs() < 1e-12 && (p.y - r * 0.75f64.sqrt()).abs() < 1e-12);
    }
}
