//! Regime classification: critical powers, the small-data conditions of the
//! local/global existence theorem, the hypotheses of the large-data
//! corollaries, and closed forms of `A = ‖a²w^{p−1}‖_{L^{q(μ₀)}_s}`.

use crate::error::{Error, Result};
use crate::extended::Extended;
use crate::quadrature::integrate;
use crate::scale_factor::{ScaleFactor, ScaleFactorParams};
use crate::solver::{check_sign_omega, Sign};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Relative tolerance for equalities such as `p = p(μ₀)`.
const THRESHOLD_EQ_TOL: f64 = 1e-12;

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= THRESHOLD_EQ_TOL * a.abs().max(b.abs()).max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub background: ScaleFactorParams,
    pub lambda: Complex64,
    pub omega: f64,
    pub sign: Sign,
    pub p: f64,
    pub mu0: f64,
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        self.background.validate()?;
        check_sign_omega(self.sign, self.omega)?;
        let n = self.background.n as f64;
        if !(self.mu0 >= 0.0 && self.mu0 < 0.5 * n) {
            return Err(Error::invalid("mu0", format!("must lie in [0, n/2) = [0, {}), got {}", 0.5 * n, self.mu0)));
        }
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(Error::invalid("p", format!("must be ≥ 1, got {}", self.p)));
        }
        Ok(())
    }

    fn n(&self) -> f64 {
        self.background.n as f64
    }

    fn a1(&self) -> f64 {
        self.background.a1
    }

    fn sigma(&self) -> f64 {
        self.background.sigma
    }

    fn dispersive(&self) -> bool {
        (2.0 * self.omega).sin().abs() < 1e-14
    }
}

/// `p(μ₀) = 1 + 4/(n − 2μ₀)`.
pub fn p_crit(n: u32, mu0: f64) -> f64 {
    1.0 + 4.0 / (n as f64 - 2.0 * mu0)
}

/// `p₁(μ₀)` for σ ≠ −1.
pub fn p1_crit(n: u32, mu0: f64, sigma: f64) -> Option<f64> {
    if sigma == -1.0 {
        return None;
    }
    let n = n as f64;
    let r = 4.0 / (n - 2.0 * mu0);
    Some(1.0 + r / (1.0 + r * 2.0 * mu0 / (n * (1.0 + sigma))))
}

/// `p₀ = 2/sin²2ω − 1`; infinite when `sin 2ω = 0`.
pub fn p0_crit(omega: f64) -> Extended {
    let s = (2.0 * omega).sin();
    if s.abs() < 1e-14 {
        Extended::Infinite
    } else {
        Extended::Finite(2.0 / (s * s) - 1.0)
    }
}

/// `q(μ₀)` from `1/q = 1 − (p−1)(n−2μ₀)/4`; `None` when `p > p(μ₀)`.
pub fn q_mu0(n: u32, mu0: f64, p: f64) -> Option<Extended> {
    let inv = 1.0 - (p - 1.0) * (n as f64 - 2.0 * mu0) / 4.0;
    if near(p, p_crit(n, mu0)) || inv == 0.0 {
        Some(Extended::Infinite)
    } else if inv > 0.0 {
        Some(Extended::Finite(1.0 / inv))
    } else {
        None
    }
}

/// `1 + 4/(n−2)`, infinite for `n ≤ 2`.
fn energy_critical(n: f64) -> f64 {
    if n <= 2.0 {
        f64::INFINITY
    } else {
        1.0 + 4.0 / (n - 2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    I,
    Ii,
    Iii,
    Iv,
    V,
    Vi,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::I => "(i)",
            Condition::Ii => "(ii)",
            Condition::Iii => "(iii)",
            Condition::Iv => "(iv)",
            Condition::V => "(v)",
            Condition::Vi => "(vi)",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Verdict {
    pub local_wellposed: bool,
    pub local_reason: String,
    /// Conditions (i)–(vi) that hold; small data is global when non-empty.
    pub fired: Vec<Condition>,
    pub small_data_global: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub p_crit: f64,
    pub p1_crit: Option<f64>,
    pub p0_crit: Extended,
    pub q_mu0: Option<Extended>,
    pub t0: Extended,
    pub s0: Extended,
}

pub fn thresholds(spec: &ProblemSpec) -> Thresholds {
    let n = spec.background.n;
    Thresholds {
        p_crit: p_crit(n, spec.mu0),
        p1_crit: p1_crit(n, spec.mu0, spec.sigma()),
        p0_crit: p0_crit(spec.omega),
        q_mu0: q_mu0(n, spec.mu0, spec.p),
        t0: spec.background.horizon_t0(),
        s0: spec.background.horizon_s0(),
    }
}

fn is_odd_integer(p: f64) -> bool {
    p.fract() == 0.0 && (p as i64).rem_euclid(2) == 1
}

/// Local applicability and the small-data conditions (i)–(vi).
pub fn theorem1_verdict(spec: &ProblemSpec) -> Result<Theorem1Verdict> {
    spec.validate()?;
    let n = spec.background.n;
    let (p, mu0, a1, sigma) = (spec.p, spec.mu0, spec.a1(), spec.sigma());
    let pc = p_crit(n, mu0);
    let at_crit = near(p, pc);
    let local_reason = if p > pc && !at_crit {
        format!("p = {p} exceeds p(μ0) = {pc}")
    } else if !is_odd_integer(p) && !(mu0 < p) {
        format!("μ0 = {mu0} must be below p = {p} when p is not an odd integer")
    } else {
        String::new()
    };
    let local_wellposed = local_reason.is_empty();
    let mut fired = Vec::new();
    if local_wellposed {
        let below = p > 1.0 && p < pc && !at_crit;
        if mu0 == 0.0 && at_crit {
            fired.push(Condition::I);
        }
        if mu0 > 0.0 && at_crit && a1 >= 0.0 {
            fired.push(Condition::Ii);
        }
        if below && a1 > 0.0 && sigma < -1.0 {
            fired.push(Condition::Iii);
        }
        if let Some(p1) = p1_crit(n, mu0, sigma) {
            if p > 1.0 && p < p1 && !near(p, p1) && a1 < 0.0 && sigma > -1.0 {
                fired.push(Condition::Iv);
            }
            if p > p1 && !near(p, p1) && below && a1 > 0.0 && sigma > -1.0 {
                fired.push(Condition::V);
            }
        }
        if mu0 > 0.0 && below && a1 > 0.0 && sigma == -1.0 {
            fired.push(Condition::Vi);
        }
    }
    Ok(Theorem1Verdict {
        local_reason: if local_wellposed {
            "1 ≤ p ≤ p(μ0) and regularity hypotheses hold".into()
        } else {
            local_reason
        },
        small_data_global: !fired.is_empty(),
        local_wellposed,
        fired,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergySign {
    Negative,
    NonNegative,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Global,
    BlowUp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryCheck {
    /// Corollary number, 1–4.
    pub number: u8,
    pub outcome: Outcome,
    pub satisfied: Vec<String>,
    pub violated: Vec<String>,
    pub unverifiable: Vec<String>,
}

impl CorollaryCheck {
    fn new(number: u8, outcome: Outcome) -> Self {
        Self {
            number,
            outcome,
            satisfied: Vec::new(),
            violated: Vec::new(),
            unverifiable: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, label: impl Into<String>) {
        if ok {
            self.satisfied.push(label.into());
        } else {
            self.violated.push(label.into());
        }
    }

    /// Every hypothesis holds and none is left unverified.
    pub fn applies(&self) -> bool {
        self.violated.is_empty() && self.unverifiable.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryVerdict {
    pub checks: Vec<CorollaryCheck>,
}

impl CorollaryVerdict {
    /// The first corollary whose hypotheses all hold.
    pub fn conclusion(&self) -> Option<&CorollaryCheck> {
        self.checks.iter().find(|c| c.applies())
    }
}

/// Evaluates the hypotheses of the four large-data corollaries literally.
pub fn corollary_verdict(spec: &ProblemSpec, energy: EnergySign, has_weighted_l2: Option<bool>) -> Result<CorollaryVerdict> {
    spec.validate()?;
    let n = spec.n();
    let (p, mu0, a1) = (spec.p, spec.mu0, spec.a1());
    let lam = spec.lambda;
    let real = lam.im == 0.0;
    let local = theorem1_verdict(spec)?.local_wellposed;
    let s0_inf = !spec.background.horizon_s0().is_finite();
    let p_h1 = energy_critical(n);
    let l2crit = 1.0 + 4.0 / n;
    let disp = spec.dispersive();

    let energy_neg = |c: &mut CorollaryCheck| match energy {
        EnergySign::Negative => c.satisfied.push("E(u0) < 0".into()),
        EnergySign::NonNegative => c.violated.push("E(u0) < 0".into()),
        EnergySign::Unknown => c.unverifiable.push("E(u0) < 0".into()),
    };
    let common = |c: &mut CorollaryCheck| {
        c.check(real, "λ real");
        c.check(local, "local well-posedness hypotheses");
    };

    let mut c1 = CorollaryCheck::new(1, Outcome::Global);
    common(&mut c1);
    c1.check(real && lam.re > 0.0, "λ > 0");
    if mu0 == 0.0 {
        c1.satisfied.push("μ0 ∈ {0, 1}".into());
        c1.check(p >= 1.0 && p < l2crit, "1 ≤ p < 1 + 4/n");
    } else if mu0 == 1.0 {
        c1.satisfied.push("μ0 ∈ {0, 1}".into());
        c1.check(p >= 1.0 && p < p_h1, "1 ≤ p < 1 + 4/(n−2)");
        c1.check(a1 * (p - 1.0 - 4.0 / n) >= 0.0, "a1(p−1−4/n) ≥ 0");
    } else {
        c1.violated.push("μ0 ∈ {0, 1}".into());
    }

    let mut c2 = CorollaryCheck::new(2, Outcome::Global);
    common(&mut c2);
    c2.check(mu0 == 1.0, "μ0 = 1");
    c2.check(real && lam.re < 0.0, "λ < 0");
    c2.check(a1 >= 0.0, "a1 ≥ 0");
    c2.check(p >= 1.0 && p < l2crit, "1 ≤ p < 1 + 4/n");
    c2.check(disp, "ω ∈ {0, π/2}");

    let mut c3 = CorollaryCheck::new(3, Outcome::BlowUp);
    common(&mut c3);
    c3.check(mu0 == 1.0, "μ0 = 1");
    c3.check(real && lam.re < 0.0, "λ < 0");
    c3.check(!disp, "ω ∉ {0, π/2}");
    let p0 = p0_crit(spec.omega).to_f64();
    c3.check(p > p0 && p <= p_h1, "p0 < p ≤ 1 + 4/(n−2)");
    c3.check(a1 * (p - 1.0 - 4.0 / n) <= 0.0, "a1(p−1−4/n) ≤ 0");
    c3.check(s0_inf, "S0 = ∞");
    energy_neg(&mut c3);

    let mut c4 = CorollaryCheck::new(4, Outcome::BlowUp);
    common(&mut c4);
    c4.check(mu0 == 1.0, "μ0 = 1");
    c4.check(real && lam.re < 0.0, "λ < 0");
    c4.check(disp, "ω ∈ {0, π/2}");
    c4.check(p >= l2crit && p <= p_h1, "1 + 4/n ≤ p ≤ 1 + 4/(n−2)");
    c4.check(a1 <= 0.0, "a1 ≤ 0");
    c4.check(s0_inf, "S0 = ∞");
    match has_weighted_l2 {
        Some(true) => c4.satisfied.push("‖|x|u0‖ < ∞".into()),
        Some(false) => c4.violated.push("‖|x|u0‖ < ∞".into()),
        None => c4.unverifiable.push("‖|x|u0‖ < ∞".into()),
    }
    energy_neg(&mut c4);

    Ok(CorollaryVerdict {
        checks: vec![c1, c2, c3, c4],
    })
}

/// Window over which `A` is taken.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Window {
    /// `(0, S)` in s-time.
    S(Extended),
    /// `(0, T)` in t-time.
    T(Extended),
}

/// Endpoint `T` of a window, checked against the background lifetime.
fn window_t(sf: &ScaleFactor, window: Window) -> Result<Extended> {
    match window {
        Window::T(t) => {
            match (t, sf.t0) {
                (Extended::Finite(t), t0) if t >= 0.0 && (t0.exceeds(t) || t0.finite() == Some(t)) => {}
                (Extended::Infinite, Extended::Infinite) => {}
                _ => return Err(Error::domain(format!("window T = {t} outside [0, T0 = {}]", sf.t0))),
            }
            Ok(t)
        }
        Window::S(s) => match (s, sf.s0) {
            (Extended::Finite(s), s0) if s0.finite() == Some(s) => Ok(sf.t0),
            (Extended::Finite(s), _) => Ok(Extended::Finite(sf.s_to_time(s)?)),
            (Extended::Infinite, Extended::Infinite) => Ok(sf.t0),
            _ => Err(Error::domain(format!("window S = {s} outside [0, S0 = {}]", sf.s0))),
        },
    }
}

/// `U = 1 + n a₁(1+σ)T/(2a₀)`, with `U(∞) = ∞` and `U(T₀) = 0`.
fn u_of(params: &ScaleFactorParams, t: Extended, t0: Extended) -> f64 {
    let nsig = params.n as f64 * (1.0 + params.sigma);
    match t {
        Extended::Infinite => f64::INFINITY,
        Extended::Finite(t) if t0.finite() == Some(t) => 0.0,
        Extended::Finite(t) => 1.0 + nsig * params.a1 * t / (2.0 * params.a0),
    }
}

/// `x^e` on the extended half-line, with `0^{neg} = ∞^{pos} = ∞`.
fn ext_pow(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        x.powf(e)
    }
}

/// `A = ‖a²w^{p−1}‖_{L^{q(μ₀)}((0,S))}` in closed form. Infinite values are
/// returned as [`Extended::Infinite`].
pub fn eval_a(spec: &ProblemSpec, window: Window) -> Result<Extended> {
    spec.validate()?;
    let params = spec.background;
    let sf = ScaleFactor::new(params)?;
    let n = spec.n();
    let (p, mu0, a0, a1, sigma) = (spec.p, spec.mu0, params.a0, params.a1, params.sigma);
    let q = q_mu0(params.n, mu0, p)
        .ok_or_else(|| Error::invalid("p", format!("A is defined for p ≤ p(μ0) = {}", p_crit(params.n, mu0))))?;
    let t = window_t(&sf, window)?;
    if t == Extended::Finite(0.0) {
        return Ok(Extended::Finite(0.0));
    }
    let Extended::Finite(q) = q else {
        // p = p(μ₀): sup of a²w^{p−1} = a₀²(a₀/a)^{4μ₀/(n−2μ₀)}
        let value = if a1 >= 0.0 || mu0 == 0.0 {
            a0 * a0
        } else if sigma != -1.0 {
            let u = u_of(&params, t, sf.t0);
            a0 * a0 * ext_pow(u, -8.0 * mu0 / (n * (1.0 + sigma) * (n - 2.0 * mu0)))
        } else {
            let tt = t.to_f64();
            a0 * a0 * (-4.0 * mu0 * a1 * tt / (a0 * (n - 2.0 * mu0))).exp()
        };
        return Ok(Extended::from_f64(value));
    };
    let pref = a0.powf((p - 1.0) * (n - 2.0 * mu0) * q / 2.0);
    let aq = if a1 == 0.0 {
        pref * t.to_f64()
    } else if sigma != -1.0 {
        let alpha = 2.0 * (p - 1.0) * mu0 * q / (n * (1.0 + sigma));
        let u = u_of(&params, t, sf.t0);
        let lead = 2.0 * a0 / (n * a1 * (1.0 + sigma));
        if alpha_is_one(spec) {
            pref * lead * u.ln()
        } else {
            pref * lead / (1.0 - alpha) * (ext_pow(u, 1.0 - alpha) - 1.0)
        }
    } else {
        let beta = a1 * (p - 1.0) * mu0 * q / a0;
        if beta == 0.0 {
            pref * t.to_f64()
        } else {
            // (1 − e^{−βT})/β = −expm1(−βT)/β
            let tt = t.to_f64();
            if tt.is_infinite() {
                if beta > 0.0 {
                    pref / beta
                } else {
                    f64::INFINITY
                }
            } else {
                pref * -(-beta * tt).exp_m1() / beta
            }
        }
    };
    if aq.is_nan() {
        return Err(Error::Singular(format!("A^q evaluated to NaN for {spec:?}")));
    }
    Ok(Extended::from_f64(aq.abs().powf(1.0 / q)))
}

/// `α = 1` exactly when `p = p₁(μ₀)`, `μ₀ ≠ 0` and `σ > −1`.
fn alpha_is_one(spec: &ProblemSpec) -> bool {
    let sigma = spec.sigma();
    spec.mu0 != 0.0
        && sigma > -1.0
        && p1_crit(spec.background.n, spec.mu0, sigma).is_some_and(|p1| near(spec.p, p1))
}

/// `A` by direct quadrature of `(a²w^{p−1})^q` over `(0, S)`; for `p = p(μ₀)`
/// the supremum over the window endpoints (the weight is monotone in `s`).
pub fn eval_a_quadrature(spec: &ProblemSpec, s_end: f64) -> Result<f64> {
    spec.validate()?;
    let sf = ScaleFactor::new(spec.background)?;
    let p = spec.p;
    let q = q_mu0(spec.background.n, spec.mu0, p)
        .ok_or_else(|| Error::invalid("p", "A is defined for p ≤ p(μ0)"))?;
    let g = |s: f64| sf.nonlinear_weight(s, p);
    match q {
        Extended::Infinite => Ok(g(0.0)?.max(g(s_end)?)),
        Extended::Finite(q) => {
            g(s_end)?;
            let v = integrate(|s| g(s).map(|x| x.powf(q)).unwrap_or(f64::NAN), 0.0, s_end, 0.0, 1e-13);
            Ok(v.powf(1.0 / q))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub spec: ProblemSpec,
    pub thresholds: Thresholds,
    pub theorem1: Theorem1Verdict,
    pub corollaries: CorollaryVerdict,
    /// `A` over the full window `(0, S₀)`; `None` when `p > p(μ₀)`.
    pub a_full_window: Option<Extended>,
}

pub fn classify(spec: &ProblemSpec, energy: EnergySign, has_weighted_l2: Option<bool>) -> Result<RegimeReport> {
    let theorem1 = theorem1_verdict(spec)?;
    let a_full_window = match eval_a(spec, Window::S(spec.background.horizon_s0())) {
        Ok(v) => Some(v),
        Err(Error::InvalidParameter { name: "p", .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(RegimeReport {
        spec: *spec,
        thresholds: thresholds(spec),
        theorem1,
        corollaries: corollary_verdict(spec, energy, has_weighted_l2)?,
        a_full_window,
    })
}

impl RegimeReport {
    /// Label of the small-data verdict: fired conditions or "local only".
    pub fn fired_label(&self) -> String {
        if !self.theorem1.local_wellposed {
            "not-applicable".into()
        } else if self.theorem1.fired.is_empty() {
            "local only".into()
        } else {
            self.theorem1.fired.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
        }
    }

    pub fn corollary_label(&self) -> String {
        match self.corollaries.conclusion() {
            Some(c) => format!(
                "cor{}-{}",
                c.number,
                match c.outcome {
                    Outcome::Global => "global",
                    Outcome::BlowUp => "blowup",
                }
            ),
            None => "none".into(),
        }
    }

    /// `key = value` lines.
    pub fn to_kv(&self) -> String {
        let t = &self.thresholds;
        let opt = |v: Option<f64>| v.map_or("none".to_string(), |x| format!("{x}"));
        let mut out = vec![
            format!("p_crit = {}", t.p_crit),
            format!("p1_crit = {}", opt(t.p1_crit)),
            format!("p0_crit = {}", t.p0_crit),
            format!("q_mu0 = {}", t.q_mu0.map_or("none".into(), |q| q.to_string())),
            format!("T0 = {}", t.t0),
            format!("S0 = {}", t.s0),
            format!("local_wellposed = {}", self.theorem1.local_wellposed),
            format!("local_reason = {}", self.theorem1.local_reason),
            format!("fired_condition = {}", self.fired_label()),
            format!("small_data_global = {}", self.theorem1.small_data_global),
            format!("A_inf = {}", self.a_full_window.map_or("none".into(), |a| a.to_string())),
            format!("corollary = {}", self.corollary_label()),
        ];
        for c in &self.corollaries.checks {
            out.push(format!("cor{}.satisfied = {}", c.number, c.satisfied.join("; ")));
            out.push(format!("cor{}.violated = {}", c.number, c.violated.join("; ")));
            out.push(format!("cor{}.unverifiable = {}", c.number, c.unverifiable.join("; ")));
        }
        out.join("\n") + "\n"
    }
}

impl fmt::Display for RegimeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = &self.thresholds;
        let s = &self.spec;
        writeln!(
            f,
            "spec: n={} sigma={} a0={} a1={} lambda={} omega={} sign={:+} p={} mu0={}",
            s.background.n,
            s.background.sigma,
            s.background.a0,
            s.background.a1,
            s.lambda,
            s.omega,
            s.sign.value(),
            s.p,
            s.mu0
        )?;
        writeln!(f, "thresholds:")?;
        writeln!(f, "  p(mu0)  = {}", t.p_crit)?;
        match t.p1_crit {
            Some(p1) => writeln!(f, "  p1(mu0) = {p1}")?,
            None => writeln!(f, "  p1(mu0) = undefined (sigma = -1)")?,
        }
        writeln!(f, "  p0      = {}", t.p0_crit)?;
        match t.q_mu0 {
            Some(q) => writeln!(f, "  q(mu0)  = {q}")?,
            None => writeln!(f, "  q(mu0)  = undefined (p > p(mu0))")?,
        }
        writeln!(f, "  T0 = {}, S0 = {}", t.t0, t.s0)?;
        writeln!(
            f,
            "local well-posedness: {} ({})",
            if self.theorem1.local_wellposed { "yes" } else { "no" },
            self.theorem1.local_reason
        )?;
        if self.theorem1.fired.is_empty() {
            writeln!(f, "small data: {}", self.fired_label())?;
        } else {
            writeln!(f, "small data: global, {} fired", self.fired_label())?;
        }
        match self.a_full_window {
            Some(a) => writeln!(f, "A over (0, S0): {a}")?,
            None => writeln!(f, "A over (0, S0): undefined")?,
        }
        for c in &self.corollaries.checks {
            let head = match c.outcome {
                Outcome::Global => "global",
                Outcome::BlowUp => "blow-up",
            };
            let state = if c.applies() {
                "applies"
            } else if c.violated.is_empty() {
                "undecided"
            } else {
                "not applicable"
            };
            writeln!(f, "corollary {} ({head}): {state}", c.number)?;
            if !c.violated.is_empty() {
                writeln!(f, "  violated: {}", c.violated.join("; "))?;
            }
            if !c.unverifiable.is_empty() {
                writeln!(f, "  unverifiable here: {}", c.unverifiable.join("; "))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn spec(n: u32, sigma: f64, a1: f64, p: f64, mu0: f64) -> ProblemSpec {
        ProblemSpec {
            background: ScaleFactorParams::new(n, sigma, 1.0, a1).unwrap(),
            lambda: Complex64::new(1.0, 0.0),
            omega: 0.0,
            sign: Sign::Plus,
            p,
            mu0,
        }
    }

    #[test]
    fn threshold_values() {
        assert!((p_crit(3, 0.0) - 7.0 / 3.0).abs() < 1e-15);
        assert!((p1_crit(3, 1.0, 0.0).unwrap() - 23.0 / 11.0).abs() < 1e-14);
        assert_eq!(p0_crit(FRAC_PI_4), Extended::Finite(1.0));
        assert_eq!(p0_crit(0.0), Extended::Infinite);
        assert_eq!(q_mu0(3, 0.0, 7.0 / 3.0), Some(Extended::Infinite));
        assert_eq!(q_mu0(3, 0.0, 3.0), None);
        assert_eq!(p1_crit(3, 0.5, -1.0), None);
    }

    #[test]
    fn conditions_fire() {
        let v = theorem1_verdict(&spec(3, 0.0, 0.7, 7.0 / 3.0, 0.0)).unwrap();
        assert_eq!(v.fired, vec![Condition::I]);
        let v = theorem1_verdict(&spec(3, -1.0, 1.0, 2.0, 1.0)).unwrap();
        assert_eq!(v.fired, vec![Condition::Vi]);
        let v = theorem1_verdict(&spec(3, 0.0, 0.0, 1.5, 1.0)).unwrap();
        assert!(v.local_wellposed && v.fired.is_empty());
        let v = theorem1_verdict(&spec(3, 0.0, 1.0, 2.2, 1.0)).unwrap();
        assert_eq!(v.fired, vec![Condition::V]);
        let v = theorem1_verdict(&spec(3, 0.0, -1.0, 2.0, 1.0)).unwrap();
        assert_eq!(v.fired, vec![Condition::Iv]);
        let v = theorem1_verdict(&spec(3, -2.0, 1.0, 2.0, 1.0)).unwrap();
        assert_eq!(v.fired, vec![Condition::Iii]);
        let v = theorem1_verdict(&spec(3, 0.0, 1.0, 5.0, 1.0)).unwrap();
        assert_eq!(v.fired, vec![Condition::Ii]);
    }

    #[test]
    fn local_hypotheses() {
        let v = theorem1_verdict(&spec(3, 0.0, 0.0, 3.0, 0.0)).unwrap();
        assert!(!v.local_wellposed);
        // μ₀ ≥ p with p not odd
        let v = theorem1_verdict(&spec(5, 0.0, 0.0, 1.5, 2.0)).unwrap();
        assert!(!v.local_wellposed);
        let mut bad = spec(3, 0.0, 0.0, 2.0, 1.0);
        bad.omega = -0.3;
        assert!(theorem1_verdict(&bad).is_err());
        assert!(theorem1_verdict(&spec(3, 0.0, 0.0, 2.0, 1.5)).is_err());
    }

    #[test]
    fn corollaries() {
        let s = spec(3, 0.0, 0.0, 2.0, 0.0);
        let v = corollary_verdict(&s, EnergySign::Unknown, None).unwrap();
        assert_eq!(v.conclusion().unwrap().number, 1);

        let mut s = spec(3, 0.0, 0.5, 1.5, 1.0);
        s.lambda = Complex64::new(-1.0, 0.0);
        let v = corollary_verdict(&s, EnergySign::Unknown, None).unwrap();
        assert_eq!(v.conclusion().unwrap().number, 2);

        let mut s = spec(3, 0.0, 0.0, 1.0, 1.0);
        s.lambda = Complex64::new(-1.0, 0.0);
        s.omega = FRAC_PI_4;
        let v = corollary_verdict(&s, EnergySign::Negative, None).unwrap();
        assert!(v.checks[2].violated.iter().any(|h| h.contains("p0 < p")));

        let mut s = spec(3, 0.0, 0.0, 3.0, 1.0);
        s.lambda = Complex64::new(-1.0, 0.0);
        let v = corollary_verdict(&s, EnergySign::Negative, Some(true)).unwrap();
        assert_eq!(v.conclusion().unwrap().number, 4);
        let v = corollary_verdict(&s, EnergySign::Negative, None).unwrap();
        assert!(v.conclusion().is_none());
        assert_eq!(v.checks[3].unverifiable.len(), 1);

        let mut s = spec(3, 0.0, 0.0, 2.0, 0.0);
        s.lambda = Complex64::new(1.0, 0.5);
        let v = corollary_verdict(&s, EnergySign::Unknown, None).unwrap();
        assert!(v.conclusion().is_none());
    }

    #[test]
    fn a_closed_form_cases() {
        // p = p(μ₀), a₁ ≥ 0
        let s = spec(3, 0.0, 1.0, 5.0, 1.0);
        assert_eq!(eval_a(&s, Window::T(Extended::Finite(3.0))).unwrap(), Extended::Finite(1.0));
        // a₁ = 0: A^q = T
        let s = spec(3, 0.0, 0.0, 2.0, 1.0);
        let q = q_mu0(3, 1.0, 2.0).unwrap().to_f64();
        let a = eval_a(&s, Window::T(Extended::Finite(2.5))).unwrap().to_f64();
        assert!((a.powf(q) - 2.5).abs() < 1e-12);
        // σ = −1, β > 0: finite over the infinite window
        let s = spec(3, -1.0, 1.0, 2.0, 1.0);
        let beta = (2.0 - 1.0) * q;
        let a = eval_a(&s, Window::T(Extended::Infinite)).unwrap().to_f64();
        assert!((a.powf(q) - 1.0 / beta).abs() < 1e-12);
        // α = 1 branch at p = p₁
        let p1 = p1_crit(3, 1.0, 0.0).unwrap();
        let s = spec(3, 0.0, 1.0, p1, 1.0);
        assert!(alpha_is_one(&s));
        assert_eq!(eval_a(&s, Window::S(Extended::Finite(2.0))).unwrap(), Extended::Infinite);
        let a = eval_a(&s, Window::S(Extended::Finite(1.5))).unwrap().to_f64();
        let quad = eval_a_quadrature(&s, 1.5).unwrap();
        assert!((a - quad).abs() < 1e-8 * quad);
    }

    #[test]
    fn report_text() {
        let s = spec(3, -1.0, 1.0, 2.0, 1.0);
        let r = classify(&s, EnergySign::Unknown, None).unwrap();
        assert!(r.to_kv().contains("fired_condition = (vi)"));
        assert!(r.a_full_window.unwrap().is_finite());
        let r = classify(&spec(3, 0.0, 0.0, 1.5, 1.0), EnergySign::Unknown, None).unwrap();
        assert!(r.to_string().contains("local only"));
    }
}
