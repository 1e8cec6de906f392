//! Power-law / exponential scale factors of a uniform isotropic background,
//! the associated weight `w(t)`, and the change of time variable
//! `s(t) = ∫₀ᵗ a(τ)⁻² dτ` together with its inverse.
//!
//! All closed forms are written through `ln_1p`/`exp_m1` so that they stay
//! accurate when the expansion rate is tiny compared to `1/t`.

use crate::error::{Error, Result};
use crate::extended::Extended;
use serde::{Deserialize, Serialize};

/// Background parameters: spatial dimension, equation-of-state parameter and
/// the initial scale and expansion rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleFactorParams {
    pub n: u32,
    pub sigma: f64,
    pub a0: f64,
    pub a1: f64,
}

/// `|2β − 1|` below this selects the logarithmic branch of `s(t)`.
const LOG_BRANCH_EPS: f64 = 1e-12;
/// `|κ_r|` below this is treated as a static background.
const STATIC_RATE_EPS: f64 = 1e-300;

impl ScaleFactorParams {
    pub fn new(n: u32, sigma: f64, a0: f64, a1: f64) -> Result<Self> {
        let params = Self { n, sigma, a0, a1 };
        params.validate()?;
        Ok(params)
    }

    /// Static background `a ≡ 1` in dimension `n`.
    pub fn flat(n: u32) -> Self {
        Self {
            n,
            sigma: 0.0,
            a0: 1.0,
            a1: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::invalid("n", "spatial dimension must be at least 1"));
        }
        if !(self.a0 > 0.0) || !self.a0.is_finite() {
            return Err(Error::invalid("a0", format!("must be positive, got {}", self.a0)));
        }
        if !self.sigma.is_finite() || !self.a1.is_finite() {
            return Err(Error::invalid("sigma/a1", "must be finite"));
        }
        Ok(())
    }

    pub fn is_exponential(&self) -> bool {
        self.sigma == -1.0
    }

    /// `n(1+σ)`.
    fn nsig(&self) -> f64 {
        self.n as f64 * (1.0 + self.sigma)
    }

    /// Lifetime `T₀` of the background in t-time.
    pub fn horizon_t0(&self) -> Extended {
        if (1.0 + self.sigma) * self.a1 >= 0.0 {
            Extended::Infinite
        } else {
            Extended::Finite(-2.0 * self.a0 / (self.nsig() * self.a1))
        }
    }

    /// Horizon `S₀ = s(T₀)` in s-time.
    pub fn horizon_s0(&self) -> Extended {
        horizon_s0(self)
    }
}

/// Horizon `S₀`: `2/(a₀a₁(4−n(1+σ)))` when `a₁(4−n(1+σ)) > 0`, infinite otherwise.
pub fn horizon_s0(params: &ScaleFactorParams) -> Extended {
    let gap = 4.0 - params.nsig();
    if params.a1 * gap > 0.0 {
        Extended::Finite(2.0 / (params.a0 * params.a1 * gap))
    } else {
        Extended::Infinite
    }
}

/// `(e^{c·l} − 1)/c`, continuous at `c = 0`.
fn expm1_over(c: f64, l: f64) -> f64 {
    if c == 0.0 {
        l
    } else {
        (c * l).exp_m1() / c
    }
}

/// A background with its derived rates cached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleFactor {
    pub params: ScaleFactorParams,
    /// `κ_r = n(1+σ)a₁/(2a₀)`; for σ = −1 this is zero and `a1/a0` drives the exponential.
    pub kappa_rate: f64,
    /// `β = 2/(n(1+σ))`; `NaN` for σ = −1.
    pub beta_exp: f64,
    pub t0: Extended,
    pub s0: Extended,
}

impl ScaleFactor {
    pub fn new(params: ScaleFactorParams) -> Result<Self> {
        params.validate()?;
        let (kappa_rate, beta_exp) = if params.is_exponential() {
            (0.0, f64::NAN)
        } else {
            let nsig = params.nsig();
            (nsig * params.a1 / (2.0 * params.a0), 2.0 / nsig)
        };
        Ok(Self {
            params,
            kappa_rate,
            beta_exp,
            t0: params.horizon_t0(),
            s0: horizon_s0(&params),
        })
    }

    /// Constant background `a ≡ 1`.
    pub fn flat(n: u32) -> Self {
        Self::new(ScaleFactorParams::flat(n)).expect("flat background is valid")
    }

    pub fn n(&self) -> u32 {
        self.params.n
    }

    pub fn is_static(&self) -> bool {
        self.params.a1 == 0.0 || (!self.params.is_exponential() && self.kappa_rate.abs() < STATIC_RATE_EPS)
    }

    fn check_t(&self, t: f64) -> Result<()> {
        if !(t >= 0.0) || !self.t0.exceeds(t) {
            return Err(Error::domain(format!("t = {t} outside [0, T0 = {})", self.t0)));
        }
        Ok(())
    }

    fn check_s(&self, s: f64) -> Result<()> {
        if !(s >= 0.0) || !self.s0.exceeds(s) {
            return Err(Error::domain(format!("s = {s} outside [0, S0 = {})", self.s0)));
        }
        Ok(())
    }

    /// `1 − 2β` for σ ≠ −1.
    fn log_gap(&self) -> f64 {
        1.0 - 2.0 * self.beta_exp
    }

    /// Scale factor `a(t)`.
    pub fn eval_a(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.a_unchecked(t))
    }

    fn a_unchecked(&self, t: f64) -> f64 {
        let p = &self.params;
        if p.is_exponential() {
            p.a0 * (p.a1 * t / p.a0).exp()
        } else if self.is_static() {
            p.a0
        } else {
            p.a0 * (self.beta_exp * (self.kappa_rate * t).ln_1p()).exp()
        }
    }

    /// Weight `w(t) = (a₀/a(t))^{n/2}`.
    pub fn eval_w(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.w_from_a(self.a_unchecked(t)))
    }

    fn w_from_a(&self, a: f64) -> f64 {
        (self.params.a0 / a).powf(0.5 * self.params.n as f64)
    }

    /// `da/dt` at time `t`.
    pub fn eval_dadt(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        let p = &self.params;
        let a = self.a_unchecked(t);
        Ok(if p.is_exponential() {
            a * p.a1 / p.a0
        } else if self.is_static() {
            0.0
        } else {
            a * (p.a1 / p.a0) / (1.0 + self.kappa_rate * t)
        })
    }

    /// Change of variable `s(t) = ∫₀ᵗ a(τ)⁻² dτ` in closed form.
    pub fn time_to_s(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        let p = &self.params;
        let a0sq = p.a0 * p.a0;
        if p.a1 == 0.0 {
            return Ok(t / a0sq);
        }
        if p.is_exponential() {
            let r = -2.0 * p.a1 / p.a0;
            // (1 − e^{−2a₁t/a₀})/(2a₀a₁) written as −expm1(r t)/(a₀² · (−r))
            return Ok((r * t).exp_m1() / (a0sq * r));
        }
        if self.kappa_rate.abs() < STATIC_RATE_EPS {
            return Ok(t / a0sq);
        }
        let kappa = self.kappa_rate;
        let l = (kappa * t).ln_1p();
        let gap = self.log_gap();
        let gap = if gap.abs() < LOG_BRANCH_EPS { 0.0 } else { gap };
        Ok(expm1_over(gap, l) / (a0sq * kappa))
    }

    /// Inverse of [`ScaleFactor::time_to_s`].
    pub fn s_to_time(&self, s: f64) -> Result<f64> {
        self.check_s(s)?;
        let p = &self.params;
        let a0sq = p.a0 * p.a0;
        if p.a1 == 0.0 {
            return Ok(s * a0sq);
        }
        if p.is_exponential() {
            let r = -2.0 * p.a1 / p.a0;
            return Ok((a0sq * r * s).ln_1p() / r);
        }
        if self.kappa_rate.abs() < STATIC_RATE_EPS {
            return Ok(s * a0sq);
        }
        let kappa = self.kappa_rate;
        let gap = self.log_gap();
        let y = a0sq * kappa * s;
        let l = if gap.abs() < LOG_BRANCH_EPS {
            y
        } else {
            (gap * y).ln_1p() / gap
        };
        Ok(l.exp_m1() / kappa)
    }

    /// `a(s) = a(t(s))`.
    pub fn a_at_s(&self, s: f64) -> Result<f64> {
        let t = self.s_to_time(s)?;
        Ok(self.a_unchecked(t))
    }

    /// `w(s) = w(t(s))`.
    pub fn w_at_s(&self, s: f64) -> Result<f64> {
        let a = self.a_at_s(s)?;
        Ok(self.w_from_a(a))
    }

    /// `da/ds = a² · da/dt`.
    pub fn dads_at_s(&self, s: f64) -> Result<f64> {
        let t = self.s_to_time(s)?;
        let a = self.a_unchecked(t);
        Ok(a * a * self.eval_dadt(t)?)
    }

    /// Nonlinear coefficient `a(s)² w(s)^{p−1}` of the evolution equation.
    pub fn nonlinear_weight(&self, s: f64, p: f64) -> Result<f64> {
        let a = self.a_at_s(s)?;
        Ok(a * a * self.w_from_a(a).powf(p - 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use std::f64::consts::E;

    fn sf(n: u32, sigma: f64, a0: f64, a1: f64) -> ScaleFactor {
        ScaleFactor::new(ScaleFactorParams::new(n, sigma, a0, a1).unwrap()).unwrap()
    }

    #[test]
    fn static_background() {
        let b = sf(3, 0.0, 1.7, 0.0);
        assert_eq!(b.eval_a(12.0).unwrap(), 1.7);
        assert_eq!(b.eval_w(3.0).unwrap(), 1.0);
        let one = sf(2, 0.3, 1.0, 0.0);
        assert_eq!(one.time_to_s(5.0).unwrap(), 5.0);
        assert_eq!(one.s_to_time(5.0).unwrap(), 5.0);
        assert_eq!(one.s0, Extended::Infinite);
    }

    #[test]
    fn power_law_values() {
        // n(1+σ)a₁t/(2a₀) = 3 at t = 2, exponent 2/3.
        let b = sf(3, 0.0, 1.0, 1.0);
        let a = b.eval_a(2.0).unwrap();
        assert!((a - 4f64.powf(2.0 / 3.0)).abs() < 1e-14);
        // n = 4: a(1) = 3^{1/2}, w = 1/a² = 1/3.
        let b4 = sf(4, 0.0, 1.0, 1.0);
        assert!((b4.eval_w(1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        // n = 2, t = 3/2: a = (1 + 3/2), w = 1/a.
        let b2 = sf(2, 0.0, 1.0, 1.0);
        assert!((b2.eval_w(1.5).unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn exponential_values() {
        let b = sf(3, -1.0, 2.0, 1.0);
        assert!((b.eval_a(2.0).unwrap() - 2.0 * E).abs() < 1e-14);
        let b1 = sf(3, -1.0, 1.0, 1.0);
        let expected = (1.0 - (-2f64).exp()) / 2.0;
        assert!((b1.time_to_s(1.0).unwrap() - expected).abs() < 1e-15);
        assert!((b1.s_to_time(expected).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(b1.s0, Extended::Finite(0.5));
    }

    #[test]
    fn horizons() {
        assert_eq!(sf(3, 0.0, 1.0, 1.0).s0, Extended::Finite(2.0));
        assert_eq!(sf(3, 0.0, 1.0, 0.0).s0, Extended::Infinite);
        // Big-Rip: a₁ > 0, σ < −1 has finite T₀.
        let rip = sf(3, -2.0, 1.0, 1.0);
        assert_eq!(rip.t0, Extended::Finite(2.0 / 3.0));
        assert!(rip.eval_a(2.0 / 3.0).is_err());
        assert!(rip.eval_a(-1.0).is_err());
        // radiation-like n(1+σ) = 4: logarithmic, infinite horizon
        assert_eq!(sf(3, 1.0 / 3.0, 1.0, 1.0).s0, Extended::Infinite);
    }

    #[test]
    fn s_past_horizon_is_rejected() {
        let b = sf(3, 0.0, 1.0, 1.0);
        assert!(b.s_to_time(2.0).is_err());
        assert!(b.s_to_time(1.999).is_ok());
    }

    #[test]
    fn log_branch_matches_quadrature() {
        let b = sf(4, 0.0, 1.3, 0.7);
        assert!(b.log_gap().abs() < 1e-15);
        let t = 3.0;
        let q = integrate(|x| b.eval_a(x).unwrap().powi(-2), 0.0, t, 1e-15, 1e-14);
        let s = b.time_to_s(t).unwrap();
        assert!(((s - q) / q).abs() < 1e-12);
    }

    #[test]
    fn tiny_rate_no_cancellation() {
        let b = sf(3, 0.0, 1.0, 1e-14);
        let s = b.time_to_s(1.0).unwrap();
        assert!((s - 1.0).abs() < 1e-13);
        assert!((b.s_to_time(s).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn conformal_power_removes_scale() {
        // p = 1 + 4/n: a^{2 − n(p−1)/2} = 1, so the nonlinear weight is a₀^{n(p−1)/2}.
        let b = sf(2, 0.5, 1.5, 0.8);
        let p = 3.0;
        for &s in &[0.0, 0.1, 0.4] {
            let g = b.nonlinear_weight(s, p).unwrap();
            assert!((g - 1.5f64.powf(2.0)).abs() < 1e-12);
        }
    }
}
