//! Parameter sweeps over protocol configurations, figure presets and the
//! deterministic CSV writer.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::par::{map_ordered, Parallelism};
use crate::protocol::{
    find_threshold, metric, run_fock_protocol, run_gaussian_protocol, Engine, Parameter,
    ProtocolConfig,
};

/// Significant digits of every number written to a sweep CSV.
pub const CSV_SIGNIFICANT_DIGITS: usize = 12;

/// Margin applied to a discovered threshold when sizing a preset axis.
pub const AXIS_MARGIN: f64 = 1.5;

/// Grid points of the Gaussian figure presets.
pub const GAUSSIAN_POINTS: usize = 41;

/// Grid points of the Fock figure preset.
pub const FOCK_POINTS: usize = 21;

#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Values(Vec<f64>),
    Linear { lo: f64, hi: f64, n: usize },
    Log { lo: f64, hi: f64, n: usize },
}

impl Grid {
    /// The grid points; non-empty, finite and strictly monotone.
    pub fn values(&self) -> Result<Vec<f64>> {
        let spaced = |lo: f64, hi: f64, n: usize, map: &dyn Fn(f64) -> f64| -> Vec<f64> {
            if n == 1 {
                return vec![lo];
            }
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        map(hi)
                    } else {
                        map(lo + (hi - lo) * i as f64 / (n - 1) as f64)
                    }
                })
                .collect()
        };
        let values = match *self {
            Grid::Values(ref v) => v.clone(),
            Grid::Linear { lo, hi, n } => spaced(lo, hi, n, &|t| t),
            Grid::Log { lo, hi, n } => {
                if !(lo > 0.0 && hi > 0.0) {
                    return Err(Error::Parse(format!(
                        "log grid needs positive ends, got [{lo}, {hi}]"
                    )));
                }
                let mut v = spaced(lo.ln(), hi.ln(), n, &f64::exp);
                // Pin the ends exactly rather than through exp(ln(.)).
                v[0] = lo;
                if let Some(last) = v.last_mut() {
                    if n > 1 {
                        *last = hi;
                    }
                }
                v
            }
        };
        if values.is_empty() {
            return Err(Error::Parse("grid is empty".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Parse(format!("grid value {bad} is not finite")));
        }
        let increasing = values.windows(2).all(|w| w[0] < w[1]);
        let decreasing = values.windows(2).all(|w| w[0] > w[1]);
        if !(increasing || decreasing) {
            return Err(Error::Parse("grid must be strictly monotone".into()));
        }
        Ok(values)
    }

    /// `linear lo hi n`, `log lo hi n` or `values v1,v2,...`.
    pub fn parse(text: &str) -> Result<Grid> {
        let mut words = text.split_whitespace();
        let kind = words
            .next()
            .ok_or_else(|| Error::Parse("empty grid".into()))?;
        let rest: Vec<&str> = words.collect();
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::Parse(format!("'{s}' is not a number")))
        };
        match kind {
            "linear" | "log" => {
                if rest.len() != 3 {
                    return Err(Error::Parse(format!(
                        "'{kind}' grid needs lo hi n, got '{text}'"
                    )));
                }
                let (lo, hi) = (num(rest[0])?, num(rest[1])?);
                let n = rest[2]
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("'{}' is not a point count", rest[2])))?;
                Ok(if kind == "linear" {
                    Grid::Linear { lo, hi, n }
                } else {
                    Grid::Log { lo, hi, n }
                })
            }
            "values" => Ok(Grid::Values(parse_list(&rest.join(" "))?)),
            other => Err(Error::Parse(format!("unknown grid kind '{other}'"))),
        }
    }

    fn describe(&self) -> String {
        match self {
            Grid::Values(v) => format!(
                "values {}",
                v.iter()
                    .map(|x| format_number(*x, CSV_SIGNIFICANT_DIGITS))
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            Grid::Linear { lo, hi, n } => format!("linear {lo} {hi} {n}"),
            Grid::Log { lo, hi, n } => format!("log {lo} {hi} {n}"),
        }
    }
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .map_err(|_| Error::Parse(format!("'{s}' is not a number")))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub param: Parameter,
    pub grid: Grid,
}

impl Axis {
    /// `<parameter> <grid>`, e.g. `y linear 0 1 41`.
    pub fn parse(text: &str) -> Result<Axis> {
        let text = text.trim();
        let (name, grid) = text.split_once(char::is_whitespace).ok_or_else(|| {
            Error::Parse(format!("axis needs '<parameter> <grid>', got '{text}'"))
        })?;
        Ok(Axis {
            param: name.parse()?,
            grid: Grid::parse(grid)?,
        })
    }
}

/// One metric column per value of `param`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub param: Parameter,
    pub values: Vec<f64>,
}

impl Series {
    /// `<parameter> v1,v2,...`.
    pub fn parse(text: &str) -> Result<Series> {
        let text = text.trim();
        let (name, values) = text.split_once(char::is_whitespace).ok_or_else(|| {
            Error::Parse(format!(
                "series needs '<parameter> v1,v2,...', got '{text}'"
            ))
        })?;
        let values = parse_list(values)?;
        if values.is_empty() {
            return Err(Error::Parse("series has no values".into()));
        }
        Ok(Series {
            param: name.parse()?,
            values,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: ProtocolConfig,
    pub axis1: Axis,
    pub axis2: Option<Axis>,
    pub series: Option<Series>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.axis1.grid.values()?;
        let mut used = vec![self.axis1.param];
        if let Some(a2) = &self.axis2 {
            a2.grid.values()?;
            used.push(a2.param);
        }
        if let Some(s) = &self.series {
            used.push(s.param);
        }
        for (i, p) in used.iter().enumerate() {
            if used[..i].contains(p) {
                return Err(Error::Parse(format!("parameter {p} is swept twice")));
            }
        }
        Ok(())
    }

    /// Apply `key = value` lines: protocol keys go to the base config,
    /// `axis1`, `axis2` and `series` describe the sweep.
    pub fn apply_kv(&mut self, text: &str) -> Result<()> {
        for (key, value) in crate::protocol::parse_kv(text)? {
            self.set_key(&key, &value)?;
        }
        Ok(())
    }

    pub fn set_key(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "axis1" => self.axis1 = Axis::parse(value)?,
            "axis2" => self.axis2 = Some(Axis::parse(value)?),
            "series" => self.series = Some(Series::parse(value)?),
            _ => self.base.set_key(key, value)?,
        }
        Ok(())
    }

    /// Build a spec from a document that must define at least `axis1`.
    pub fn from_kv(text: &str) -> Result<SweepSpec> {
        let pairs = crate::protocol::parse_kv(text)?;
        let axis1 = pairs
            .iter()
            .find(|(k, _)| k == "axis1")
            .ok_or_else(|| Error::Parse("sweep config needs an 'axis1' line".into()))?;
        let mut spec = SweepSpec {
            base: ProtocolConfig::default(),
            axis1: Axis::parse(&axis1.1)?,
            axis2: None,
            series: None,
        };
        for (k, v) in &pairs {
            spec.set_key(k, v)?;
        }
        Ok(spec)
    }

    pub fn to_kv_string(&self) -> String {
        let mut out = self.base.to_kv_string();
        let _ = writeln!(
            out,
            "axis1 = {} {}",
            self.axis1.param,
            self.axis1.grid.describe()
        );
        if let Some(a) = &self.axis2 {
            let _ = writeln!(out, "axis2 = {} {}", a.param, a.grid.describe());
        }
        if let Some(s) = &self.series {
            let values: Vec<String> = s.values.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "series = {} {}", s.param, values.join(","));
        }
        out
    }
}

/// `%.{sig}g`-style formatting: fixed notation for moderate exponents,
/// scientific otherwise, trailing zeros removed, locale-independent.
pub fn format_number(v: f64, sig: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, v);
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -5 || exp >= sig as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{v:.decimals$}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub csv: String,
    pub warnings: Vec<String>,
}

fn metric_name(engine: Engine) -> &'static str {
    match engine {
        Engine::Gaussian => "E_N",
        Engine::Fock => "concurrence",
    }
}

fn evaluate(config: &ProtocolConfig) -> Result<(f64, Vec<String>)> {
    match config.engine {
        Engine::Gaussian => Ok((run_gaussian_protocol(config)?.e_n, Vec::new())),
        Engine::Fock => {
            let out = run_fock_protocol(config)?;
            Ok((out.concurrence, out.warnings))
        }
    }
}

/// Evaluate every grid point and write the CSV. Rows follow `axis1`
/// within `axis2`; the output does not depend on `parallelism`.
pub fn run_sweep(spec: &SweepSpec, parallelism: Parallelism) -> Result<SweepOutput> {
    spec.validate()?;
    let fmt = |v: f64| format_number(v, CSV_SIGNIFICANT_DIGITS);
    let values1 = spec.axis1.grid.values()?;
    let values2 = match &spec.axis2 {
        Some(a) => Some(a.grid.values()?),
        None => None,
    };
    let series_values: Vec<Option<f64>> = match &spec.series {
        Some(s) => s.values.iter().copied().map(Some).collect(),
        None => vec![None],
    };

    let outer: Vec<Option<f64>> = match &values2 {
        Some(v) => v.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let mut points = Vec::new();
    for &v2 in &outer {
        for &v1 in &values1 {
            for &s in &series_values {
                points.push((v2, v1, s));
            }
        }
    }

    let coordinates = |(v2, v1, s): (Option<f64>, f64, Option<f64>)| {
        let mut parts = Vec::new();
        if let (Some(a), Some(v)) = (&spec.axis2, v2) {
            parts.push(format!("{}={}", a.param, fmt(v)));
        }
        parts.push(format!("{}={}", spec.axis1.param, fmt(v1)));
        if let (Some(ser), Some(v)) = (&spec.series, s) {
            parts.push(format!("{}={}", ser.param, fmt(v)));
        }
        parts.join(", ")
    };

    let results = map_ordered(&points, parallelism, |&(v2, v1, s)| {
        let mut cfg = spec.base;
        if let (Some(a), Some(v)) = (&spec.axis2, v2) {
            cfg.set(a.param, v);
        }
        cfg.set(spec.axis1.param, v1);
        if let (Some(ser), Some(v)) = (&spec.series, s) {
            cfg.set(ser.param, v);
        }
        evaluate(&cfg)
    });

    let mut warnings = Vec::new();
    let mut metrics = Vec::with_capacity(points.len());
    for (&point, result) in points.iter().zip(results) {
        let (m, w) = result.map_err(|e| e.context(format!("at {}", coordinates(point))))?;
        warnings.extend(
            w.into_iter()
                .map(|w| format!("{}: {w}", coordinates(point))),
        );
        metrics.push(m);
    }

    let name = metric_name(spec.base.engine);
    let mut header: Vec<String> = Vec::new();
    if let Some(a) = &spec.axis2 {
        header.push(a.param.to_string());
    }
    header.push(spec.axis1.param.to_string());
    match &spec.series {
        Some(s) => header.extend(
            s.values
                .iter()
                .map(|v| format!("{name}[{}={}]", s.param, fmt(*v))),
        ),
        None => header.push(name.to_string()),
    }
    let mut csv = header.join(",");
    csv.push('\n');
    let per_row = series_values.len();
    for (row, chunk) in metrics.chunks(per_row).enumerate() {
        let (v2, v1, _) = points[row * per_row];
        let mut cells = Vec::with_capacity(per_row + 2);
        if let Some(v) = v2 {
            cells.push(fmt(v));
        }
        cells.push(fmt(v1));
        cells.extend(chunk.iter().map(|&m| fmt(m)));
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    Ok(SweepOutput { csv, warnings })
}

/// Figure preset names accepted by [`preset`].
pub const PRESET_NAMES: [&str; 5] = ["fig2", "fig3", "fig4", "fig5", "figA1"];

/// Caption parameters of each figure, before any axis discovery.
pub fn preset_base(name: &str) -> Result<ProtocolConfig> {
    let common = ProtocolConfig::default();
    match name {
        "fig2" | "fig3" | "fig4" | "fig5" => Ok(common),
        "figA1" => Ok(ProtocolConfig {
            engine: Engine::Fock,
            eta_c: 1.0,
            truncation_override: true,
            ..common
        }),
        other => Err(Error::Parse(format!(
            "unknown preset '{other}' (known: {})",
            PRESET_NAMES.join(", ")
        ))),
    }
}

/// Largest threshold of `param` over the series values, searching upward
/// from `lo` and growing the upper end by `growth` until the entanglement
/// vanishes there.
fn largest_threshold(
    base: &ProtocolConfig,
    param: Parameter,
    series: &Series,
    lo: f64,
    hi: f64,
    growth: f64,
    rel_tol: f64,
) -> Result<f64> {
    let mut largest: f64 = lo;
    for &s in &series.values {
        let cfg = base.with(series.param, s);
        let mut top = hi;
        while metric(&cfg.with(param, top))? > 0.0 {
            if growth <= 1.0 || top > 1e12 {
                return Err(Error::Bracket(format!(
                    "{param}: entanglement survives up to {top} for {}={s}",
                    series.param
                )));
            }
            top *= growth;
        }
        let t = find_threshold(&cfg, param, lo, top, rel_tol * top)?;
        largest = largest.max(t);
    }
    Ok(largest)
}

/// Fully populated sweep for a figure. Axis ends that the figures do not
/// state are set to `1.5 ×` the largest threshold over the series.
pub fn preset(name: &str) -> Result<SweepSpec> {
    let base = preset_base(name)?;
    let spec = match name {
        "fig2" => {
            let series = Series {
                param: Parameter::NIn,
                values: vec![0.0, 1.0, 10.0],
            };
            let top = largest_threshold(&base, Parameter::Y, &series, 0.0, 1.0, 1.0, 1e-5)?;
            SweepSpec {
                base,
                axis1: Axis {
                    param: Parameter::Y,
                    grid: Grid::Linear {
                        lo: 0.0,
                        hi: (AXIS_MARGIN * top).min(1.0),
                        n: GAUSSIAN_POINTS,
                    },
                },
                axis2: None,
                series: Some(series),
            }
        }
        "fig3" | "figA1" => {
            let series = Series {
                param: Parameter::Sigma,
                values: vec![0.005, 0.01, 0.02],
            };
            let (n, tol) = if name == "fig3" {
                (GAUSSIAN_POINTS, 1e-6)
            } else {
                (FOCK_POINTS, 1e-3)
            };
            let top = largest_threshold(
                &base,
                Parameter::DisplacementPhotons,
                &series,
                0.0,
                1e3,
                10.0,
                tol,
            )?;
            SweepSpec {
                base,
                axis1: Axis {
                    param: Parameter::DisplacementPhotons,
                    grid: Grid::Log {
                        lo: 1.0,
                        hi: AXIS_MARGIN * top,
                        n,
                    },
                },
                axis2: None,
                series: Some(series),
            }
        }
        "fig4" => {
            let series = Series {
                param: Parameter::NTh,
                values: vec![1.0, 5.0, 10.0],
            };
            let top = largest_threshold(&base, Parameter::X, &series, 0.0, 0.1, 2.0, 1e-5)?;
            SweepSpec {
                base,
                axis1: Axis {
                    param: Parameter::X,
                    grid: Grid::Linear {
                        lo: 0.0,
                        hi: AXIS_MARGIN * top,
                        n: GAUSSIAN_POINTS,
                    },
                },
                axis2: None,
                series: Some(series),
            }
        }
        "fig5" => SweepSpec {
            base,
            axis1: Axis {
                param: Parameter::Eta1,
                grid: Grid::Linear {
                    lo: 0.0,
                    hi: 1.0,
                    n: GAUSSIAN_POINTS,
                },
            },
            axis2: None,
            series: Some(Series {
                param: Parameter::Eta2,
                values: vec![0.6, 0.8, 1.0],
            }),
        },
        _ => unreachable!("preset_base rejects unknown names"),
    };
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.0, 12), "0");
        assert_eq!(format_number(1.0, 12), "1");
        assert_eq!(format_number(0.1, 12), "0.1");
        assert_eq!(format_number(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_number(5000.0, 12), "5000");
        assert_eq!(format_number(1e-7, 12), "1e-07");
        assert_eq!(format_number(1.5e13, 12), "1.5e+13");
        assert_eq!(format_number(-2.5e-3, 12), "-0.0025");
        assert_eq!(format_number(123456.789, 6), "123457");
        assert_eq!(format_number(999999.5, 6), "1e+06");
    }

    #[test]
    fn grids() {
        assert_eq!(
            Grid::Linear {
                lo: 0.0,
                hi: 1.0,
                n: 3
            }
            .values()
            .unwrap(),
            vec![0.0, 0.5, 1.0]
        );
        let log = Grid::Log {
            lo: 1.0,
            hi: 100.0,
            n: 3,
        }
        .values()
        .unwrap();
        assert_eq!(log[0], 1.0);
        assert!((log[1] - 10.0).abs() < 1e-12);
        assert_eq!(log[2], 100.0);
        assert_eq!(
            Grid::Linear {
                lo: 2.0,
                hi: 2.0,
                n: 1
            }
            .values()
            .unwrap(),
            vec![2.0]
        );
        assert!(Grid::Values(vec![]).values().is_err());
        assert!(Grid::Values(vec![1.0, 1.0]).values().is_err());
        assert!(Grid::Linear {
            lo: 0.0,
            hi: 1.0,
            n: 0
        }
        .values()
        .is_err());
        assert!(Grid::Log {
            lo: 0.0,
            hi: 1.0,
            n: 3
        }
        .values()
        .is_err());
        assert_eq!(
            Grid::parse("values 3, 2,1").unwrap(),
            Grid::Values(vec![3.0, 2.0, 1.0])
        );
        assert!(Grid::parse("cubic 0 1 3").is_err());
    }

    #[test]
    fn single_point_ideal_sweep() {
        let spec = SweepSpec {
            base: ProtocolConfig::ideal(0.5),
            axis1: Axis {
                param: Parameter::R,
                grid: Grid::Linear {
                    lo: 0.5,
                    hi: 0.5,
                    n: 1,
                },
            },
            axis2: None,
            series: None,
        };
        let out = run_sweep(&spec, Parallelism::Sequential).unwrap();
        assert_eq!(out.csv, "r,E_N\n0.5,1\n");
    }

    #[test]
    fn two_axis_layout() {
        let spec = SweepSpec::from_kv(
            "axis1 = y values 0.1,0.2\naxis2 = x values 0,0.01\nseries = N_in 0,1\n",
        )
        .unwrap();
        let out = run_sweep(&spec, Parallelism::Threads(3)).unwrap();
        let lines: Vec<&str> = out.csv.lines().collect();
        assert_eq!(lines[0], "x,y,E_N[N_in=0],E_N[N_in=1]");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("0,0.1,"));
        assert!(lines[2].starts_with("0,0.2,"));
        assert!(lines[3].starts_with("0.01,0.1,"));
    }

    #[test]
    fn failing_point_reports_coordinates() {
        let spec = SweepSpec::from_kv("axis1 = eta1 values 0.5,1.5\n").unwrap();
        match run_sweep(&spec, Parallelism::Sequential) {
            Err(Error::Domain(m)) => assert!(m.contains("eta1=1.5"), "{m}"),
            other => panic!("expected a domain error, got {other:?}"),
        }
    }

    #[test]
    fn spec_round_trip() {
        let spec =
            SweepSpec::from_kv("y = 0.2\naxis1 = N_D log 1 1e6 7\nseries = sigma 0.005,0.01\n")
                .unwrap();
        let back = SweepSpec::from_kv(&spec.to_kv_string()).unwrap();
        assert_eq!(back, spec);
        assert!(SweepSpec::from_kv("y = 0.2\n").is_err());
        assert!(SweepSpec::from_kv("axis1 = y values 0.1\nseries = y 0.1\n")
            .unwrap()
            .validate()
            .is_err());
    }

    #[test]
    fn unknown_preset() {
        assert!(matches!(preset("fig7"), Err(Error::Parse(_))));
    }
}
