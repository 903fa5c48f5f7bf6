//! Line-oriented `key = value` experiment files.
//!
//! Blank lines and lines starting with `#` are ignored. Every key may appear
//! once; a key the experiment does not use is an error.

use std::collections::BTreeMap;
use std::path::Path;

use curveasym_core::asymptote::{SequenceSpec, DEFAULT_WINDOW};
use curveasym_core::curve::{Curve, Domain, RealFn, Vec2};
use curveasym_core::expr;
use curveasym_core::meanvalue::{FunctionPair, Problem, SolverConfig};
use curveasym_core::support::SupportConfig;

use crate::CliError;

/// Keys accepted for curve experiments (`analyze`, `arclength`).
const CURVE_KEYS: &[&str] = &[
    "kind",
    "x",
    "y",
    "rho",
    "f",
    "dx",
    "dy",
    "drho",
    "df",
    "a",
    "b",
    "start",
    "sequence.mode",
    "sequence.t0",
    "sequence.r",
    "sequence.s",
    "sequence.count",
    "grid.n",
    "refine_tol",
    "window",
    "epsilon",
    "left_cutoff",
];

/// Keys accepted for mean-value experiments.
const MEANVALUE_KEYS: &[&str] = &[
    "problem", "g", "h", "dg", "dh", "f", "w", "a", "x0", "xmin", "count", "grid.n", "tol", "quad_tol", "window",
    "epsilon",
];

#[derive(Debug, Clone)]
pub struct KeyValues {
    source: String,
    map: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, source: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Input(format!("{source}:{}: expected `key = value`", n + 1)));
            };
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || v.is_empty() {
                return Err(CliError::Input(format!("{source}:{}: empty key or value", n + 1)));
            }
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(CliError::Input(format!("{source}:{}: duplicate key `{k}`", n + 1)));
            }
        }
        Ok(KeyValues {
            source: source.to_string(),
            map,
        })
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        let unknown: Vec<&str> = self
            .map
            .keys()
            .map(String::as_str)
            .filter(|k| !allowed.contains(k))
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(CliError::Input(format!(
                "{}: unknown key(s): {}",
                self.source,
                unknown.join(", ")
            )))
        }
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str, CliError> {
        self.get(key)
            .ok_or_else(|| CliError::Input(format!("{}: missing key `{key}`", self.source)))
    }

    fn number(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.get(key)
            .map(|v| parse_number(v).map_err(|e| self.bad(key, &e)))
            .transpose()
    }

    fn count(&self, key: &str) -> Result<Option<usize>, CliError> {
        self.get(key)
            .map(|v| v.parse::<usize>().map_err(|e| self.bad(key, &e.to_string())))
            .transpose()
    }

    fn expr(&self, key: &str) -> Result<Option<RealFn>, CliError> {
        self.get(key)
            .map(|v| {
                expr::parse(v)
                    .map(|e| e.into_real_fn())
                    .map_err(|e| self.bad(key, &e.to_string()))
            })
            .transpose()
    }

    fn bad(&self, key: &str, why: &str) -> CliError {
        CliError::Input(format!("{}: bad value for `{key}`: {why}", self.source))
    }
}

/// Numbers accept `inf`/`-inf` and constant expressions such as `8*pi`.
fn parse_number(v: &str) -> Result<f64, String> {
    match v {
        "inf" | "+inf" => return Ok(f64::INFINITY),
        "-inf" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    if let Ok(x) = v.parse::<f64>() {
        return Ok(x);
    }
    let e = expr::parse(v).map_err(|e| e.to_string())?;
    e.eval(0.0).map_err(|e| e.to_string())
}

/// A curve experiment: the curve, the sequence toward `a`, and settings.
#[derive(Debug, Clone)]
pub struct CurveExperiment {
    pub curve: Curve,
    pub sequence: SequenceSpec,
    pub support: SupportConfig,
    pub window: usize,
    pub epsilon: f64,
}

impl CurveExperiment {
    pub fn from_config(kv: &KeyValues) -> Result<Self, CliError> {
        kv.check_keys(CURVE_KEYS)?;
        let a = kv.number("a")?.unwrap_or(0.0);
        let b = kv.number("b")?.unwrap_or(f64::INFINITY);
        let domain = Domain::new(a, b)?;
        let start = kv
            .get("start")
            .map(|v| {
                let parts: Vec<&str> = v.split(',').map(str::trim).collect();
                match parts.as_slice() {
                    [x, y] => Ok(Vec2::new(
                        parse_number(x).map_err(|e| kv.bad("start", &e))?,
                        parse_number(y).map_err(|e| kv.bad("start", &e))?,
                    )),
                    _ => Err(kv.bad("start", "expected `x, y`")),
                }
            })
            .transpose()?;
        let kind = kv.require("kind")?;
        let curve = match kind {
            "cartesian" => {
                let (Some(x), Some(y)) = (kv.expr("x")?, kv.expr("y")?) else {
                    return Err(CliError::Input(format!(
                        "{}: cartesian curves need `x` and `y`",
                        kv.source
                    )));
                };
                let c = Curve::cartesian(x, y, domain, start)?;
                match (kv.expr("dx")?, kv.expr("dy")?) {
                    (Some(dx), Some(dy)) => c.with_xy_derivative(dx, dy),
                    (None, None) => c,
                    _ => {
                        return Err(CliError::Input(format!(
                            "{}: give both `dx` and `dy` or neither",
                            kv.source
                        )))
                    }
                }
            }
            "polar" => {
                let rho = kv
                    .expr("rho")?
                    .ok_or_else(|| CliError::Input(format!("{}: polar curves need `rho`", kv.source)))?;
                if start.is_some() {
                    return Err(kv.bad("start", "polar curves start at the pole"));
                }
                let c = Curve::polar(rho, domain)?;
                match kv.expr("drho")? {
                    Some(d) => c.with_rho_derivative(d),
                    None => c,
                }
            }
            "graph" => {
                let f = kv
                    .expr("f")?
                    .ok_or_else(|| CliError::Input(format!("{}: graph curves need `f`", kv.source)))?;
                let c = Curve::graph(f, domain, start)?;
                match kv.expr("df")? {
                    Some(d) => c.with_graph_derivative(d),
                    None => c,
                }
            }
            other => return Err(kv.bad("kind", &format!("`{other}` is not cartesian, polar or graph"))),
        };
        for (key, used_by) in [
            ("x", "cartesian"),
            ("y", "cartesian"),
            ("dx", "cartesian"),
            ("dy", "cartesian"),
            ("rho", "polar"),
            ("drho", "polar"),
            ("f", "graph"),
            ("df", "graph"),
        ] {
            if kv.get(key).is_some() && kind != used_by {
                return Err(kv.bad(key, &format!("only used by {used_by} curves")));
            }
        }

        let mode = kv
            .get("sequence.mode")
            .unwrap_or(if a.is_finite() { "geometric" } else { "exponential" });
        let count = kv.count("sequence.count")?;
        let sequence = match mode {
            "geometric" => {
                if !a.is_finite() {
                    return Err(kv.bad("sequence.mode", "geometric sequences need a finite `a`"));
                }
                let t0 = match kv.number("sequence.t0")? {
                    Some(t0) => t0,
                    None if b.is_finite() => a + 0.5 * (b - a),
                    None => a + 1.0,
                };
                SequenceSpec::GeometricToFinite {
                    a,
                    t0,
                    r: kv.number("sequence.r")?.unwrap_or(0.7),
                    count: count.unwrap_or(48),
                }
            }
            "exponential" => {
                if a.is_finite() {
                    return Err(kv.bad("sequence.mode", "exponential sequences need `a = -inf`"));
                }
                SequenceSpec::ExponentialToMinusInf {
                    t0: kv.number("sequence.t0")?.unwrap_or(1.0),
                    s: kv.number("sequence.s")?.unwrap_or(1.5),
                    count: count.unwrap_or(32),
                }
            }
            other => return Err(kv.bad("sequence.mode", &format!("`{other}` is not geometric or exponential"))),
        };
        if mode == "geometric" && kv.get("sequence.s").is_some() {
            return Err(kv.bad("sequence.s", "only used by exponential sequences"));
        }
        if mode == "exponential" && kv.get("sequence.r").is_some() {
            return Err(kv.bad("sequence.r", "only used by geometric sequences"));
        }

        let mut support = SupportConfig::default();
        if let Some(n) = kv.count("grid.n")? {
            support.n_grid = n;
        }
        support.refine_tol = kv.number("refine_tol")?;
        if let Some(c) = kv.number("left_cutoff")? {
            support.left_cutoff = c;
        }
        Ok(CurveExperiment {
            curve,
            sequence,
            support,
            window: kv.count("window")?.unwrap_or(DEFAULT_WINDOW),
            epsilon: kv.number("epsilon")?.unwrap_or(1e-3),
        })
    }
}

/// A mean-value experiment along `x_k → a`.
#[derive(Debug, Clone)]
pub struct MeanValueExperiment {
    pub problem: Problem,
    pub xs: Vec<f64>,
    pub solver: SolverConfig,
    pub window: usize,
    pub epsilon: f64,
}

/// `count` log-spaced points from `x0` down to `xmin`, both above `a`.
pub fn log_spaced(a: f64, x0: f64, xmin: f64, count: usize) -> Result<Vec<f64>, CliError> {
    if !(x0 > xmin && xmin > a) || count < 2 {
        return Err(CliError::Input(format!(
            "need a < xmin < x0 and at least 2 points (a = {a}, xmin = {xmin}, x0 = {x0}, count = {count})"
        )));
    }
    let ratio = ((xmin - a) / (x0 - a)).powf(1.0 / (count - 1) as f64);
    Ok((0..count)
        .map(|k| {
            if k + 1 == count {
                xmin
            } else {
                a + (x0 - a) * ratio.powi(k as i32)
            }
        })
        .collect())
}

impl MeanValueExperiment {
    pub fn from_config(kv: &KeyValues) -> Result<Self, CliError> {
        kv.check_keys(MEANVALUE_KEYS)?;
        let kind = kv.require("problem")?;
        let a = kv.number("a")?.unwrap_or(0.0);
        let need = |key: &str| -> Result<RealFn, CliError> {
            kv.expr(key)?
                .ok_or_else(|| CliError::Input(format!("{}: `{kind}` needs `{key}`", kv.source)))
        };
        let pair = |lagrange: bool| -> Result<FunctionPair, CliError> {
            let g = need("g")?;
            if lagrange {
                return Ok(FunctionPair::lagrange(g, need("dg")?, a));
            }
            let p = FunctionPair::new(g, need("h")?, a);
            Ok(match (kv.expr("dg")?, kv.expr("dh")?) {
                (Some(dg), Some(dh)) => p.with_derivatives(dg, dh),
                (None, None) => p,
                _ => {
                    return Err(CliError::Input(format!(
                        "{}: give both `dg` and `dh` or neither",
                        kv.source
                    )))
                }
            })
        };
        let (problem, used): (Problem, &[&str]) = match kind {
            "mu" => (Problem::Mu(pair(false)?), &["g", "h", "dg", "dh"]),
            "cauchy" => (Problem::Cauchy(pair(false)?), &["g", "h", "dg", "dh"]),
            "lagrange" => (Problem::Cauchy(pair(true)?), &["g", "dg"]),
            "integral" => {
                if a != 0.0 {
                    return Err(kv.bad("a", "integral problems live on [0, x]"));
                }
                (
                    Problem::Integral {
                        f: need("f")?,
                        w: need("w")?,
                    },
                    &["f", "w"],
                )
            }
            other => return Err(kv.bad("problem", &format!("`{other}` is not mu, cauchy, lagrange or integral"))),
        };
        for key in ["g", "h", "dg", "dh", "f", "w"] {
            if kv.get(key).is_some() && !used.contains(&key) {
                return Err(kv.bad(key, &format!("not used by `{kind}` problems")));
            }
        }
        let x0 = kv.number("x0")?.unwrap_or(a + 1.0);
        let xmin = kv.number("xmin")?.unwrap_or(a + (x0 - a) * 1e-6);
        let xs = log_spaced(a, x0, xmin, kv.count("count")?.unwrap_or(16))?;
        let mut solver = SolverConfig::default();
        if let Some(n) = kv.count("grid.n")? {
            solver.n_grid = n;
        }
        if let Some(t) = kv.number("tol")? {
            solver.tol = t;
        }
        if let Some(q) = kv.number("quad_tol")? {
            solver.quad_tol = q;
        }
        Ok(MeanValueExperiment {
            problem,
            xs,
            solver,
            window: kv.count("window")?.unwrap_or(DEFAULT_WINDOW),
            epsilon: kv.number("epsilon")?.unwrap_or(1e-3),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_constants() {
        let kv = KeyValues::parse(
            "# spiral\nkind = polar\nrho = exp(t)\na = -inf\nleft_cutoff = 8*pi\n",
            "t",
        )
        .unwrap();
        let ex = CurveExperiment::from_config(&kv).unwrap();
        assert!((ex.support.left_cutoff - 8.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!(matches!(
            ex.sequence,
            SequenceSpec::ExponentialToMinusInf { count: 32, .. }
        ));
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        let kv = KeyValues::parse("kind = graph\nf = t^2\ncolour = red\n", "t").unwrap();
        assert!(matches!(CurveExperiment::from_config(&kv), Err(CliError::Input(_))));
        assert!(KeyValues::parse("a = 1\na = 2\n", "t").is_err());
    }

    #[test]
    fn rejects_keys_of_another_kind() {
        let kv = KeyValues::parse("kind = graph\nf = t^2\nrho = t\n", "t").unwrap();
        assert!(CurveExperiment::from_config(&kv).is_err());
    }

    #[test]
    fn log_spaced_hits_both_ends() {
        let xs = log_spaced(0.0, 1.0, 1e-4, 5).unwrap();
        assert_eq!(xs[0], 1.0);
        assert_eq!(xs[4], 1e-4);
        assert!((xs[2] - 1e-2).abs() < 1e-15);
    }
}
