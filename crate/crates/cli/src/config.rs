//! Scenario files: TOML with `[scenario]`, `[spec]`, `[grid]`, `[initial]`,
//! `[outputs]`, `[diagnostics]`, `[safeguards]` and `[sweep]` tables.
//!
//! Numeric fields accept plain numbers or short expressions such as
//! `"pi/4"`, `"-3*pi/8"` or `"7/3"`.

use expanse_core::classifier::ProblemSpec;
use expanse_core::solver::{Nonlinearity, Safeguards, Sign};
use expanse_core::{GridSpec, InitialCondition, ScaleFactorParams};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: field `{field}`: {message}")]
    Field { path: String, field: String, message: String },
}

/// A real number written either literally or as a small product/quotient
/// expression over numbers, `pi` and `e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Num(pub f64);

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            F(f64),
            I(i64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::F(x) => Ok(Num(x)),
            Raw::I(x) => Ok(Num(x as f64)),
            Raw::S(s) => eval_expr(&s).map(Num).map_err(serde::de::Error::custom),
        }
    }
}

/// Evaluates `[-]atom (('*'|'/') atom)*` with atoms being numbers, `pi` or `e`.
pub fn eval_expr(src: &str) -> Result<f64, String> {
    let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(&s)),
    };
    if body.is_empty() {
        return Err(format!("empty expression {src:?}"));
    }
    let mut value = 1.0;
    let mut op = '*';
    let mut start = 0;
    let bytes: Vec<char> = body.chars().collect();
    for i in 0..=bytes.len() {
        let at_end = i == bytes.len();
        if at_end || bytes[i] == '*' || bytes[i] == '/' {
            let atom: String = bytes[start..i].iter().collect();
            let x = match atom.as_str() {
                "pi" | "π" => std::f64::consts::PI,
                "e" => std::f64::consts::E,
                a => a.parse::<f64>().map_err(|_| format!("cannot parse {a:?} in {src:?}"))?,
            };
            value = if op == '*' { value * x } else { value / x };
            if !at_end {
                op = bytes[i];
                start = i + 1;
            }
        }
    }
    Ok(if neg { -value } else { value })
}

fn de_opt_num<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
    Option::<Num>::deserialize(d).map(|o| o.map(|n| n.0))
}

fn de_num<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Num::deserialize(d).map(|n| n.0)
}

/// `s_end`: a number or `"horizon"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SEnd {
    Value(f64),
    #[serde(serialize_with = "ser_horizon")]
    Horizon,
}

fn ser_horizon<S: serde::Serializer>(s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str("horizon")
}

impl<'de> Deserialize<'de> for SEnd {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            F(f64),
            I(i64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::F(x) => Ok(SEnd::Value(x)),
            Raw::I(x) => Ok(SEnd::Value(x as f64)),
            Raw::S(s) if s == "horizon" => Ok(SEnd::Horizon),
            Raw::S(s) => eval_expr(&s).map(SEnd::Value).map_err(serde::de::Error::custom),
        }
    }
}

/// `λ`: a real number or a `[re, im]` pair.
fn de_lambda<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Pair([Num; 2]),
        Real(Num),
    }
    Ok(match Raw::deserialize(d)? {
        Raw::Pair([re, im]) => Complex64::new(re.0, im.0),
        Raw::Real(re) => Complex64::new(re.0, 0.0),
    })
}

fn de_sign<'de, D: Deserializer<'de>>(d: D) -> Result<Sign, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        I(i64),
        F(f64),
        S(String),
    }
    let v = match Raw::deserialize(d)? {
        Raw::I(i) => i as f64,
        Raw::F(f) => f,
        Raw::S(s) => match s.as_str() {
            "+" | "plus" | "+1" => 1.0,
            "-" | "minus" | "-1" => -1.0,
            other => return Err(serde::de::Error::custom(format!("sign must be \"+\" or \"-\", got {other:?}"))),
        },
    };
    Sign::from_value(v).map_err(serde::de::Error::custom)
}

fn default_one() -> f64 {
    1.0
}

fn default_sign() -> Sign {
    Sign::Plus
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub name: String,
    #[serde(default)]
    pub s_end: Option<SEnd>,
    #[serde(default, deserialize_with = "de_opt_num")]
    pub step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecSection {
    pub n: u32,
    #[serde(default, deserialize_with = "de_num")]
    pub sigma: f64,
    #[serde(default = "default_one", deserialize_with = "de_num")]
    pub a0: f64,
    #[serde(default, deserialize_with = "de_num")]
    pub a1: f64,
    #[serde(deserialize_with = "de_lambda")]
    pub lambda: Complex64,
    #[serde(default, deserialize_with = "de_num")]
    pub omega: f64,
    #[serde(default = "default_sign", deserialize_with = "de_sign")]
    pub sign: Sign,
    #[serde(deserialize_with = "de_num")]
    pub p: f64,
    #[serde(default, deserialize_with = "de_num")]
    pub mu0: f64,
    #[serde(default = "default_one", deserialize_with = "de_num")]
    pub m: f64,
    #[serde(default = "default_one", deserialize_with = "de_num")]
    pub hbar: f64,
    #[serde(default)]
    pub nonlinearity: Nonlinearity,
}

impl SpecSection {
    pub fn background(&self) -> ScaleFactorParams {
        ScaleFactorParams {
            n: self.n,
            sigma: self.sigma,
            a0: self.a0,
            a1: self.a1,
        }
    }

    pub fn problem(&self) -> ProblemSpec {
        ProblemSpec {
            background: self.background(),
            lambda: self.lambda,
            omega: self.omega,
            sign: self.sign,
            p: self.p,
            mu0: self.mu0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default)]
    pub dim: Option<usize>,
    pub points: usize,
    #[serde(deserialize_with = "de_num")]
    pub length: f64,
    #[serde(default)]
    pub center: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsSection {
    #[serde(default = "default_true")]
    pub records: bool,
    /// Snapshot every k accepted steps; 0 disables snapshots.
    #[serde(default)]
    pub snapshot_every: u64,
    #[serde(default)]
    pub plots: bool,
}

impl Default for OutputsSection {
    fn default() -> Self {
        Self {
            records: true,
            snapshot_every: 0,
            plots: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSection {
    #[serde(default = "default_one", deserialize_with = "de_num")]
    pub k0: f64,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        Self { k0: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SafeguardsSection {
    #[serde(default, deserialize_with = "de_opt_num")]
    pub amp_factor: Option<f64>,
    #[serde(default, deserialize_with = "de_opt_num")]
    pub denom_guard: Option<f64>,
}

impl SafeguardsSection {
    pub fn resolve(&self) -> Safeguards {
        let d = Safeguards::default();
        Safeguards {
            amp_factor: self.amp_factor.unwrap_or(d.amp_factor),
            denom_guard: self.denom_guard.unwrap_or(d.denom_guard),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub param: String,
    #[serde(default)]
    pub values: Option<Vec<Num>>,
    /// `[start, stop, count]`.
    #[serde(default)]
    pub linspace: Option<(Num, Num, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub max_points: Option<usize>,
    #[serde(default)]
    pub simulate: bool,
    #[serde(default)]
    pub x: Option<SweepAxis>,
    #[serde(default)]
    pub y: Option<SweepAxis>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub scenario: ScenarioSection,
    pub spec: SpecSection,
    #[serde(default)]
    pub grid: Option<GridSection>,
    #[serde(default)]
    pub initial: Option<InitialCondition>,
    #[serde(default)]
    pub outputs: OutputsSection,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
    #[serde(default)]
    pub safeguards: Option<SafeguardsSection>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

impl Scenario {
    pub fn from_str(src: &str, path: &str) -> Result<Self, ConfigError> {
        toml::from_str(src).map_err(|e| ConfigError::Parse {
            path: path.to_string(),
            message: e.to_string().trim_end().to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let display = path.display().to_string();
        let src = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: display.clone(),
            source,
        })?;
        Self::from_str(&src, &display)
    }

    pub fn field_error(&self, field: &str, message: impl Into<String>) -> ConfigError {
        ConfigError::Field {
            path: self.scenario.name.clone(),
            field: field.to_string(),
            message: message.into(),
        }
    }

    pub fn grid_spec(&self) -> Result<GridSpec, ConfigError> {
        let g = self
            .grid
            .as_ref()
            .ok_or_else(|| self.field_error("grid", "missing [grid] table"))?;
        let dim = g.dim.unwrap_or(self.spec.n as usize);
        let center = g.center.clone().unwrap_or_else(|| vec![0.0; dim]);
        let grid = GridSpec {
            dim,
            points_per_axis: g.points,
            box_length: g.length,
            center,
        };
        grid.validate().map_err(|e| self.field_error("grid", e.to_string()))?;
        Ok(grid)
    }

    pub fn initial(&self) -> Result<&InitialCondition, ConfigError> {
        self.initial
            .as_ref()
            .ok_or_else(|| self.field_error("initial", "missing [initial] table"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[scenario]
name = "t"
s_end = 1.0
step = 1e-3

[spec]
n = 1
lambda = -1
omega = "pi/4"
p = 3

[grid]
points = 64
length = 20

[initial]
kind = "gaussian"
width = 1.0
amplitude = 2.0
"#;

    #[test]
    fn expressions() {
        assert_eq!(eval_expr("pi/4").unwrap(), std::f64::consts::FRAC_PI_4);
        assert_eq!(eval_expr("-3*pi/8").unwrap(), -3.0 * std::f64::consts::PI / 8.0);
        assert_eq!(eval_expr("7/3").unwrap(), 7.0 / 3.0);
        assert_eq!(eval_expr("1e-3").unwrap(), 1e-3);
        assert_eq!(eval_expr("2.5e-1*4").unwrap(), 1.0);
        assert_eq!(eval_expr("2*e/2").unwrap(), std::f64::consts::E);
        assert!(eval_expr("foo").is_err());
    }

    #[test]
    fn parses_base() {
        let s = Scenario::from_str(BASE, "base.toml").unwrap();
        assert_eq!(s.spec.omega, std::f64::consts::FRAC_PI_4);
        assert_eq!(s.spec.lambda, Complex64::new(-1.0, 0.0));
        assert_eq!(s.spec.sign, Sign::Plus);
        assert_eq!(s.grid_spec().unwrap().dim, 1);
        assert!(matches!(s.initial().unwrap(), InitialCondition::Gaussian { .. }));
    }

    #[test]
    fn missing_p_is_named() {
        let src = BASE.replace("p = 3\n", "");
        let err = Scenario::from_str(&src, "x.toml").unwrap_err().to_string();
        assert!(err.contains("`p`"), "{err}");
    }

    #[test]
    fn complex_lambda_and_horizon() {
        let src = BASE
            .replace("lambda = -1", "lambda = [1, \"1/2\"]")
            .replace("s_end = 1.0", "s_end = \"horizon\"")
            .replace("omega = \"pi/4\"", "omega = \"-pi/4\"\nsign = \"-\"");
        let s = Scenario::from_str(&src, "x.toml").unwrap();
        assert_eq!(s.spec.lambda, Complex64::new(1.0, 0.5));
        assert_eq!(s.scenario.s_end, Some(SEnd::Horizon));
        assert_eq!(s.spec.sign, Sign::Minus);
    }

    #[test]
    fn unknown_field_rejected() {
        let src = BASE.replace("p = 3", "p = 3\nq = 4");
        assert!(Scenario::from_str(&src, "x.toml").is_err());
    }
}
