//! Split-step pseudospectral integration of the evolution equation
//!
//! `±i(2m/ħ)∂ₛu + e^{−2iω}Δu − λe^{−2iω}a(s)²w(s)^{p−1}|u|^{p−1}u = 0`
//!
//! on a periodic box. The linear part is propagated exactly in Fourier space
//! and the pointwise nonlinear part by its exact scalar solution.

use crate::error::{Error, Result};
use crate::extended::Extended;
use crate::grid::{GridSpec, Spectral};
use crate::scale_factor::ScaleFactor;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// Values of `sin 2ω`, `cos 2ω` closer than this to zero are snapped to zero.
const TRIG_SNAP: f64 = 1e-14;

/// Horizon clamps stop this fraction short of `S₀`.
const HORIZON_MARGIN: f64 = 1e-9;

/// RK4 substeps per nonlinear step for the gauge-variant term.
const GAUGE_VARIANT_SUBSTEPS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_value(v: f64) -> Result<Self> {
        if v == 1.0 {
            Ok(Sign::Plus)
        } else if v == -1.0 {
            Ok(Sign::Minus)
        } else {
            Err(Error::invalid("sign", format!("must be +1 or -1, got {v}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Nonlinearity {
    /// `λ|u|^{p−1}u` weighted by `a²w^{p−1}`.
    #[default]
    GaugeInvariant,
    /// `λ(a²/w)|uw|^p`.
    GaugeVariant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Safeguards {
    /// Blow-up is flagged once `max|u|` exceeds this multiple of the initial maximum.
    pub amp_factor: f64,
    /// Blow-up is flagged when the Bernoulli denominator of a nonlinear substep
    /// falls to this value or below.
    pub denom_guard: f64,
}

impl Default for Safeguards {
    fn default() -> Self {
        Self {
            amp_factor: 1e6,
            denom_guard: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub sign: Sign,
    pub omega: f64,
    pub lambda: Complex64,
    pub p: f64,
    pub m_mass: f64,
    pub hbar: f64,
    pub background: ScaleFactor,
    pub nonlinearity: Nonlinearity,
    pub step: f64,
    pub safeguards: Safeguards,
    /// Hard cap on accepted steps in [`Solver::evolve`].
    pub max_steps: Option<u64>,
}

impl SolverConfig {
    /// Schrödinger defaults (`+`, ω = 0, m = ħ = 1) on the given background.
    pub fn new(background: ScaleFactor, lambda: f64, p: f64, step: f64) -> Self {
        Self {
            sign: Sign::Plus,
            omega: 0.0,
            lambda: Complex64::new(lambda, 0.0),
            p,
            m_mass: 1.0,
            hbar: 1.0,
            background,
            nonlinearity: Nonlinearity::GaugeInvariant,
            step,
            safeguards: Safeguards::default(),
            max_steps: None,
        }
    }

    pub fn with_omega(mut self, sign: Sign, omega: f64) -> Self {
        self.sign = sign;
        self.omega = omega;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_sign_omega(self.sign, self.omega)?;
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(Error::invalid("p", format!("must be ≥ 1, got {}", self.p)));
        }
        if !(self.m_mass > 0.0) || !(self.hbar > 0.0) {
            return Err(Error::invalid("m/hbar", "must be positive"));
        }
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::invalid("step", "must be positive and finite"));
        }
        if !self.lambda.re.is_finite() || !self.lambda.im.is_finite() {
            return Err(Error::invalid("lambda", "must be finite"));
        }
        let sg = &self.safeguards;
        if !(sg.amp_factor > 1.0) || !(sg.denom_guard > 0.0 && sg.denom_guard < 1.0) {
            return Err(Error::invalid(
                "safeguards",
                "need amp_factor > 1 and 0 < denom_guard < 1",
            ));
        }
        Ok(())
    }

    /// `sin 2ω`, exactly zero at ω ∈ {0, ±π/2}.
    pub fn sin_two_omega(&self) -> f64 {
        snap((2.0 * self.omega).sin())
    }

    pub fn cos_two_omega(&self) -> f64 {
        snap((2.0 * self.omega).cos())
    }

    /// `e^{−2iω}`.
    pub fn phase(&self) -> Complex64 {
        Complex64::new(self.cos_two_omega(), -self.sin_two_omega())
    }

    /// Linear symbol `z` with `∂ₛû = −z|ξ|²û`.
    pub fn linear_symbol(&self) -> Complex64 {
        Complex64::new(0.0, self.sign.value() * self.hbar / (2.0 * self.m_mass)) * self.phase()
    }

    /// Nonlinear coefficient `c(s)` with `∂ₛu = c|u|^{p−1}u`.
    pub fn nonlinear_coefficient(&self, s: f64) -> Result<Complex64> {
        let g = self.background.nonlinear_weight(s, self.p)?;
        Ok(-self.linear_symbol() * self.lambda * g)
    }
}

fn snap(x: f64) -> f64 {
    if x.abs() < TRIG_SNAP {
        0.0
    } else {
        x
    }
}

/// Admissibility of the `(±, ω)` pair: `0 ≤ ±ω ≤ π/2`, `ω ≠ −π/2`.
pub fn check_sign_omega(sign: Sign, omega: f64) -> Result<()> {
    let so = sign.value() * omega;
    if !omega.is_finite() || omega <= -FRAC_PI_2 - TRIG_SNAP || omega > FRAC_PI_2 + TRIG_SNAP {
        return Err(Error::invalid("omega", format!("must lie in (−π/2, π/2], got {omega}")));
    }
    if so < -TRIG_SNAP || so > FRAC_PI_2 + TRIG_SNAP || (omega + FRAC_PI_2).abs() <= TRIG_SNAP {
        return Err(Error::invalid(
            "omega",
            format!("sign {:+} is incompatible with ω = {omega}: need 0 ≤ ±ω ≤ π/2", sign.value()),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Status {
    Running,
    ReachedHorizon,
    /// Blow-up detected somewhere in `(s_lo, s_hi]`.
    BlownUp { s_lo: f64, s_hi: f64, cause: BlowUpCause },
    Finished,
    /// The step cap was hit before `s_end`.
    StepLimit,
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Running => "running",
            Status::ReachedHorizon => "reached-horizon",
            Status::BlownUp { .. } => "blown-up",
            Status::Finished => "finished",
            Status::StepLimit => "step-limit",
        }
    }

    pub fn is_blown_up(&self) -> bool {
        matches!(self, Status::BlownUp { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlowUpCause {
    BernoulliDenominator,
    AmplitudeThreshold,
    NonFinite,
}

#[derive(Debug, Clone)]
pub struct FieldState {
    pub grid: GridSpec,
    pub s_now: f64,
    pub u: Vec<Complex64>,
    pub status: Status,
    pub steps: u64,
}

impl FieldState {
    pub fn new(grid: GridSpec, u: Vec<Complex64>) -> Result<Self> {
        grid.validate()?;
        if u.len() != grid.len() {
            return Err(Error::invalid("u0", format!("expected {} samples, got {}", grid.len(), u.len())));
        }
        if u.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::invalid("u0", "contains non-finite values"));
        }
        Ok(Self {
            grid,
            s_now: 0.0,
            u,
            status: Status::Running,
            steps: 0,
        })
    }

    pub fn max_amp(&self) -> f64 {
        max_amp(&self.u)
    }
}

pub fn max_amp(u: &[Complex64]) -> f64 {
    u.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Outcome of a pointwise nonlinear substep that failed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowUpSignal {
    pub cause: BlowUpCause,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveSummary {
    pub status: Status,
    pub s_final: f64,
    pub steps: u64,
    pub initial_max_amp: f64,
    pub final_max_amp: f64,
}

/// A configured evolution on one grid. Holds FFT plans and the cached
/// full-step multiplier; shareable read-only across threads.
#[derive(Debug, Clone)]
pub struct Solver {
    cfg: SolverConfig,
    spectral: Spectral,
    symbol: Complex64,
    half_step: Vec<Complex64>,
}

impl Solver {
    pub fn new(cfg: SolverConfig, grid: &GridSpec) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.background.n() as usize;
        if n != grid.dim {
            return Err(Error::invalid(
                "grid.dim",
                format!("grid dimension {} differs from spatial dimension n = {n}", grid.dim),
            ));
        }
        let spectral = Spectral::new(grid)?;
        let symbol = cfg.linear_symbol();
        let half_step = multipliers(&spectral, symbol, 0.5 * cfg.step);
        Ok(Self {
            cfg,
            spectral,
            symbol,
            half_step,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn grid(&self) -> &GridSpec {
        self.spectral.grid()
    }

    fn multipliers_for(&self, ds: f64) -> std::borrow::Cow<'_, [Complex64]> {
        if ds == 0.5 * self.cfg.step {
            std::borrow::Cow::Borrowed(&self.half_step)
        } else {
            std::borrow::Cow::Owned(multipliers(&self.spectral, self.symbol, ds))
        }
    }

    /// Exact linear flow over `ds`: each Fourier mode is multiplied by `exp(−z|ξ|²ds)`.
    pub fn linear_half_step(&self, u: &mut [Complex64], ds: f64) {
        if ds == 0.0 {
            return;
        }
        let mult = self.multipliers_for(ds);
        self.spectral.forward(u);
        u.iter_mut().zip(mult.iter()).for_each(|(v, m)| *v *= m);
        self.spectral.inverse(u);
    }

    /// Exact pointwise nonlinear flow over `ds`, coefficient frozen at `s_mid`.
    pub fn nonlinear_step(&self, u: &mut [Complex64], s_mid: f64, ds: f64) -> Result<std::result::Result<(), BlowUpSignal>> {
        if self.cfg.lambda == Complex64::new(0.0, 0.0) || ds == 0.0 {
            return Ok(Ok(()));
        }
        let c = self.cfg.nonlinear_coefficient(s_mid)?;
        Ok(match self.cfg.nonlinearity {
            Nonlinearity::GaugeInvariant => bernoulli_flow(u, c, self.cfg.p, ds, self.cfg.safeguards.denom_guard),
            Nonlinearity::GaugeVariant => gauge_variant_flow(u, c, self.cfg.p, ds),
        })
    }

    /// One Strang step `L(ds/2)∘N(ds)∘L(ds/2)` of nominal size `cfg.step`,
    /// clamped to stop short of `S₀`. A rejected step leaves `state.u` untouched.
    pub fn strang_step(&self, state: &mut FieldState) -> Result<()> {
        let ds = self.clamp_to_horizon(state.s_now, self.cfg.step);
        self.step_by(state, ds.0, ds.1)
    }

    /// Clamped step size and whether the clamp engaged.
    fn clamp_to_horizon(&self, s_now: f64, ds: f64) -> (f64, bool) {
        match self.cfg.background.s0 {
            Extended::Finite(s0) if s_now + ds >= s0 * (1.0 - HORIZON_MARGIN) => {
                ((s0 - s_now) * (1.0 - HORIZON_MARGIN), true)
            }
            _ => (ds, false),
        }
    }

    fn step_by(&self, state: &mut FieldState, ds: f64, hits_horizon: bool) -> Result<()> {
        if state.status != Status::Running {
            return Err(Error::invalid("state", format!("cannot step a {} state", state.status.label())));
        }
        let s_lo = state.s_now;
        let mut work = state.u.clone();
        self.linear_half_step(&mut work, 0.5 * ds);
        if let Err(sig) = self.nonlinear_step(&mut work, s_lo + 0.5 * ds, ds)? {
            state.status = Status::BlownUp {
                s_lo,
                s_hi: s_lo + ds,
                cause: sig.cause,
            };
            return Ok(());
        }
        self.linear_half_step(&mut work, 0.5 * ds);
        if work.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            state.status = Status::BlownUp {
                s_lo,
                s_hi: s_lo + ds,
                cause: BlowUpCause::NonFinite,
            };
            return Ok(());
        }
        state.u = work;
        state.s_now = s_lo + ds;
        state.steps += 1;
        if hits_horizon {
            state.status = Status::ReachedHorizon;
        }
        Ok(())
    }

    /// Steps from `state` to `s_end` (or the horizon), calling `observer` on
    /// the initial state and after every accepted step.
    pub fn evolve<F>(&self, state: &mut FieldState, s_end: f64, mut observer: F) -> Result<EvolveSummary>
    where
        F: FnMut(&FieldState),
    {
        if state.grid != *self.grid() {
            return Err(Error::invalid("state", "grid differs from the solver's grid"));
        }
        if !(s_end >= state.s_now) || s_end.is_nan() {
            return Err(Error::invalid("s_end", format!("must be ≥ s_now = {}", state.s_now)));
        }
        if s_end.is_infinite() {
            return Err(Error::invalid("s_end", "must be finite"));
        }
        let s0 = self.cfg.background.s0;
        if !(s0.exceeds(s_end) || s0.finite() == Some(s_end)) {
            return Err(Error::invalid("s_end", format!("{s_end} lies beyond the horizon S0 = {s0}")));
        }
        let initial_max_amp = state.max_amp();
        let amp_threshold = self.cfg.safeguards.amp_factor * initial_max_amp.max(f64::MIN_POSITIVE);
        let s_start = state.s_now;
        let ds = self.cfg.step;
        observer(state);
        let mut k: u64 = 0;
        while state.status == Status::Running {
            if state.s_now >= s_end {
                state.status = Status::Finished;
                break;
            }
            if let Some(cap) = self.cfg.max_steps {
                if state.steps >= cap {
                    state.status = Status::StepLimit;
                    break;
                }
            }
            // full steps land on s_start + k·ds; the last one absorbs the remainder
            let target = s_start + (k + 1) as f64 * ds;
            let mut this_ds = if target >= s_end - 1e-9 * ds { s_end - state.s_now } else { ds };
            let (clamped, hits) = self.clamp_to_horizon(state.s_now, this_ds);
            this_ds = clamped;
            let s_before = state.s_now;
            self.step_by(state, this_ds, hits)?;
            if state.status.is_blown_up() {
                break;
            }
            if this_ds == ds {
                state.s_now = target;
            }
            k += 1;
            let amp = state.max_amp();
            observer(state);
            if amp > amp_threshold {
                state.status = Status::BlownUp {
                    s_lo: s_before,
                    s_hi: state.s_now,
                    cause: BlowUpCause::AmplitudeThreshold,
                };
            }
        }
        Ok(EvolveSummary {
            status: state.status,
            s_final: state.s_now,
            steps: state.steps,
            initial_max_amp,
            final_max_amp: state.max_amp(),
        })
    }

    /// `∂ₛu` from the equation's right-hand side at time `s`.
    pub fn rhs(&self, u: &[Complex64], s: f64) -> Result<Vec<Complex64>> {
        let lap = self.spectral.laplacian(u);
        let z = self.symbol;
        let c = if self.cfg.lambda == Complex64::new(0.0, 0.0) {
            Complex64::new(0.0, 0.0)
        } else {
            self.cfg.nonlinear_coefficient(s)?
        };
        let p = self.cfg.p;
        Ok(u
            .iter()
            .zip(&lap)
            .map(|(v, l)| {
                let nl = match self.cfg.nonlinearity {
                    Nonlinearity::GaugeInvariant => power_term(*v, p),
                    Nonlinearity::GaugeVariant => Complex64::new(v.norm().powf(p), 0.0),
                };
                z * l + c * nl
            })
            .collect())
    }
}

/// `|v|^{p−1}v`, with `0` at `v = 0`.
fn power_term(v: Complex64, p: f64) -> Complex64 {
    let r = v.norm();
    if r == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        v * r.powf(p - 1.0)
    }
}

fn multipliers(spectral: &Spectral, z: Complex64, ds: f64) -> Vec<Complex64> {
    let mult: Vec<Complex64> = spectral.k_sq().iter().map(|k2| (-z * k2 * ds).exp()).collect();
    debug_assert!(mult.iter().all(|m| m.norm() <= 1.0 + 1e-12), "linear multiplier must be a contraction");
    mult
}

/// `−ln(1 − x)/x`, continuous at `x = 0`.
fn log_ratio(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0 + 0.5 * x
    } else {
        -(-x).ln_1p() / x
    }
}

/// Exact solution of `v' = c|v|^{p−1}v` over `ds`, applied pointwise.
fn bernoulli_flow(u: &mut [Complex64], c: Complex64, p: f64, ds: f64, guard: f64) -> std::result::Result<(), BlowUpSignal> {
    if p == 1.0 {
        let f = (c * ds).exp();
        u.iter_mut().for_each(|v| *v *= f);
        return Ok(());
    }
    let q = p - 1.0;
    // check every point before mutating so a rejected step leaves u intact
    let mut factors = Vec::with_capacity(u.len());
    for v in u.iter() {
        let rho_q = v.norm().powf(q);
        let x = q * c.re * rho_q * ds;
        let denom = 1.0 - x;
        if denom <= guard {
            return Err(BlowUpSignal {
                cause: BlowUpCause::BernoulliDenominator,
            });
        }
        let modulus = denom.powf(-1.0 / q);
        let theta = c.im * rho_q * ds * log_ratio(x);
        factors.push(Complex64::from_polar(modulus, theta));
    }
    u.iter_mut().zip(factors).for_each(|(v, f)| *v *= f);
    Ok(())
}

/// RK4 substeps of `v' = c|v|^p` pointwise.
fn gauge_variant_flow(u: &mut [Complex64], c: Complex64, p: f64, ds: f64) -> std::result::Result<(), BlowUpSignal> {
    let h = ds / GAUGE_VARIANT_SUBSTEPS as f64;
    let f = |v: Complex64| c * v.norm().powf(p);
    for v in u.iter_mut() {
        let mut y = *v;
        for _ in 0..GAUGE_VARIANT_SUBSTEPS {
            let k1 = f(y);
            let k2 = f(y + k1 * (0.5 * h));
            let k3 = f(y + k2 * (0.5 * h));
            let k4 = f(y + k3 * h);
            y += (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0);
        }
        if !y.re.is_finite() || !y.im.is_finite() {
            return Err(BlowUpSignal {
                cause: BlowUpCause::NonFinite,
            });
        }
        *v = y;
    }
    Ok(())
}
