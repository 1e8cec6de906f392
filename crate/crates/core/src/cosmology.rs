//! Closed-form scale solutions `b(x⁰)` of the (1+n)-dimensional Friedmann
//! equations, residual checkers for the Einstein-equation consequences, the
//! spatial isotropy profile `f(r)` and the generalized coupling `κ`.

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Sign of the spatial curvature ratio `k²/q²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Curvature {
    Flat,
    Positive,
    Negative,
}

/// Expanding (`+`) or contracting (`−`) branch of a `±` closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Expanding,
    Contracting,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Expanding => 1.0,
            Branch::Contracting => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Fluid with `p̃ = σρ̃c²`; `b` is the power-law / exponential family.
    EquationOfState { sigma: f64 },
    /// `ρ = Λ = 0`: `b = b(0) ± √(−k²/q²) x⁰`.
    MinkowskiMilne { branch: Branch },
    /// `ρ = 0`, `Λ < 0`: `b = |k²/(q²L)|^{1/2} sin(|L|^{1/2} x⁰)`.
    NegativeLambda,
    /// `ρ = 0`, `Λ > 0`.
    DeSitter { curvature: Curvature, branch: Branch },
    /// `ρ > 0`, `Λ = 0`; flat case is closed form, curved cases parametric.
    MatterOnly { curvature: Curvature, branch: Branch },
    /// `ρ > 0`, `Λ > 0`; only the static solution has a closed form.
    MatterWithLambda,
}

/// A (1+n)-dimensional homogeneous cosmology: `(∂₀b)² = R b^{2−n} + L b² − k²/q²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosmologyModel {
    pub kind: ModelKind,
    pub n: u32,
    /// `R = 2κρc²bⁿ/(n(n−1))`, conserved.
    pub r_const: f64,
    /// `L = 2Λ/(n(n−1))`.
    pub l_const: f64,
    /// `k²/q²`, required real.
    pub curvature_ratio: f64,
    pub b0: f64,
    pub db0: f64,
}

/// Long-time behaviour of a matter + Λ universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatterLambdaFate {
    Static,
    TendsToInfinity,
    TendsToStatic,
    VanishesInFiniteTime,
}

impl CosmologyModel {
    pub fn equation_of_state(n: u32, sigma: f64, b0: f64, db0: f64) -> Self {
        Self {
            kind: ModelKind::EquationOfState { sigma },
            n,
            r_const: 0.0,
            l_const: 0.0,
            curvature_ratio: 0.0,
            b0,
            db0,
        }
    }

    /// Einstein static universe: `k²/q² > 0`, `L = L₀`, `b ≡ b∗`.
    pub fn einstein_static(n: u32, r_const: f64, curvature_ratio: f64) -> Self {
        let l0 = static_lambda_threshold(n, r_const, curvature_ratio);
        Self {
            kind: ModelKind::MatterWithLambda,
            n,
            r_const,
            l_const: l0,
            curvature_ratio,
            b0: static_radius(n, r_const, l0),
            db0: 0.0,
        }
    }

    /// Friedmann right-hand side `R b^{2−n} + L b² − k²/q²`.
    pub fn friedmann_rhs(&self, b: f64) -> f64 {
        let n = self.n as f64;
        self.r_const * b.powf(2.0 - n) + self.l_const * b * b - self.curvature_ratio
    }

    fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::invalid("n", "must be at least 1"));
        }
        match self.kind {
            ModelKind::EquationOfState { .. } => {
                if !(self.b0 > 0.0) {
                    return Err(Error::invalid("b0", "must be positive"));
                }
            }
            ModelKind::MinkowskiMilne { .. } => {
                if self.curvature_ratio > 0.0 {
                    return Err(Error::invalid("curvature_ratio", "needs k²/q² ≤ 0 when ρ = Λ = 0"));
                }
            }
            ModelKind::NegativeLambda => {
                if !(self.l_const < 0.0) || self.curvature_ratio > 0.0 {
                    return Err(Error::invalid("l_const", "needs L < 0 and k²/q² ≤ 0"));
                }
            }
            ModelKind::DeSitter { curvature, .. } => {
                if !(self.l_const > 0.0) {
                    return Err(Error::invalid("l_const", "de Sitter needs L > 0"));
                }
                check_curvature(curvature, self.curvature_ratio)?;
            }
            ModelKind::MatterOnly { curvature, .. } => {
                if !(self.r_const > 0.0) {
                    return Err(Error::invalid("r_const", "matter models need R > 0"));
                }
                if curvature != Curvature::Flat && self.n < 3 {
                    return Err(Error::invalid("n", "curved matter models need n ≥ 3"));
                }
                check_curvature(curvature, self.curvature_ratio)?;
            }
            ModelKind::MatterWithLambda => {
                if !(self.r_const > 0.0) || !(self.l_const > 0.0) {
                    return Err(Error::invalid("r_const", "matter + Λ needs R > 0 and L > 0"));
                }
            }
        }
        Ok(())
    }

    /// Right end of the maximal domain in `x⁰` (infinite for eternal models).
    pub fn max_x0(&self) -> Result<f64> {
        self.validate()?;
        let n = self.n as f64;
        Ok(match self.kind {
            ModelKind::EquationOfState { sigma } => {
                let nsig = n * (1.0 + sigma);
                if sigma == -1.0 || nsig * self.db0 >= 0.0 {
                    f64::INFINITY
                } else {
                    -2.0 * self.b0 / (nsig * self.db0)
                }
            }
            ModelKind::MinkowskiMilne { branch } => {
                let rate = (-self.curvature_ratio).sqrt();
                if branch == Branch::Contracting && rate > 0.0 {
                    self.b0 / rate
                } else {
                    f64::INFINITY
                }
            }
            ModelKind::NegativeLambda => PI / self.l_const.abs().sqrt(),
            ModelKind::DeSitter { .. } => f64::INFINITY,
            ModelKind::MatterOnly { curvature, branch } => match curvature {
                Curvature::Flat => {
                    if branch == Branch::Contracting {
                        2.0 * self.b0.powf(n / 2.0) / (n * self.r_const.sqrt())
                    } else {
                        f64::INFINITY
                    }
                }
                Curvature::Positive => self.parametric_x0(PI),
                Curvature::Negative => f64::INFINITY,
            },
            ModelKind::MatterWithLambda => f64::INFINITY,
        })
    }

    /// Left end of the domain: models that start from `b = 0` exclude `x⁰ = 0`.
    pub fn starts_singular(&self) -> bool {
        match self.kind {
            ModelKind::NegativeLambda => true,
            ModelKind::DeSitter { curvature, .. } => curvature == Curvature::Negative,
            ModelKind::MatterOnly { curvature, .. } => curvature != Curvature::Flat,
            _ => false,
        }
    }

    /// `x⁰` reached at parameter `θ` in the parametric Friedmann solutions.
    fn parametric_x0(&self, theta: f64) -> f64 {
        let n = self.n as f64;
        let k = self.curvature_ratio.abs();
        let e = 1.0 / (n - 2.0);
        let integrand = |th: f64| match self.kind {
            ModelKind::MatterOnly {
                curvature: Curvature::Negative,
                ..
            } => th.sinh().powi(2).powf(e),
            _ => th.sin().powi(2).powf(e),
        };
        let integral = integrate(integrand, 0.0, theta, 1e-15, 1e-13);
        2.0 * integral / (k.powf(0.5 + e) * self.r_const.powf(-e) * (n - 2.0))
    }

    fn parametric_theta(&self, x0: f64) -> f64 {
        // bracket then bisect the monotone map θ ↦ x⁰(θ)
        let (mut lo, mut hi) = (0.0, 1.0);
        match self.kind {
            ModelKind::MatterOnly {
                curvature: Curvature::Positive,
                ..
            } => hi = PI,
            _ => {
                while self.parametric_x0(hi) < x0 {
                    lo = hi;
                    hi *= 2.0;
                }
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.parametric_x0(mid) < x0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-14 * hi.max(1.0) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Scale solution `b(x⁰)`.
    pub fn eval_b(&self, x0: f64) -> Result<f64> {
        let max = self.max_x0()?;
        let singular_start = self.starts_singular();
        if !(x0 >= 0.0) || x0 >= max || (singular_start && x0 == 0.0) {
            return Err(Error::domain(format!("x0 = {x0} outside the model domain (0, {max})")));
        }
        let n = self.n as f64;
        let k = self.curvature_ratio;
        let l = self.l_const;
        let b = match self.kind {
            ModelKind::EquationOfState { sigma } => {
                if sigma == -1.0 {
                    self.b0 * (self.db0 * x0 / self.b0).exp()
                } else {
                    let nsig = n * (1.0 + sigma);
                    self.b0 * ((2.0 / nsig) * (nsig * self.db0 * x0 / (2.0 * self.b0)).ln_1p()).exp()
                }
            }
            ModelKind::MinkowskiMilne { branch } => self.b0 + branch.sign() * (-k).sqrt() * x0,
            ModelKind::NegativeLambda => (k / l).abs().sqrt() * (l.abs().sqrt() * x0).sin(),
            ModelKind::DeSitter { curvature, branch } => match curvature {
                Curvature::Flat => self.b0 * (branch.sign() * l.sqrt() * x0).exp(),
                Curvature::Positive => (k / l).sqrt() * (l.sqrt() * x0).cosh(),
                Curvature::Negative => (k / l).abs().sqrt() * (l.sqrt() * x0).sinh(),
            },
            ModelKind::MatterOnly { curvature, branch } => match curvature {
                Curvature::Flat => {
                    let base = self.b0.powf(n / 2.0) + branch.sign() * n * self.r_const.sqrt() * x0 / 2.0;
                    base.powf(2.0 / n)
                }
                Curvature::Positive => {
                    let theta = self.parametric_theta(x0);
                    (self.r_const * (1.0 - (2.0 * theta).cos()) / (2.0 * k)).powf(1.0 / (n - 2.0))
                }
                Curvature::Negative => {
                    let theta = self.parametric_theta(x0);
                    (self.r_const * ((2.0 * theta).cosh() - 1.0) / (2.0 * k.abs())).powf(1.0 / (n - 2.0))
                }
            },
            ModelKind::MatterWithLambda => {
                if self.is_einstein_static() {
                    self.b0
                } else {
                    return Err(Error::Unsupported(
                        "matter + Λ has a closed form only for the static solution; use matter_lambda_fate"
                            .into(),
                    ));
                }
            }
        };
        Ok(b)
    }

    fn is_einstein_static(&self) -> bool {
        if self.kind != ModelKind::MatterWithLambda || !(self.curvature_ratio > 0.0) || self.n < 3 {
            return false;
        }
        let l0 = static_lambda_threshold(self.n, self.r_const, self.curvature_ratio);
        let bstar = static_radius(self.n, self.r_const, self.l_const);
        (self.l_const - l0).abs() <= 1e-12 * l0 && (self.b0 - bstar).abs() <= 1e-12 * bstar
    }

    /// Step for finite differences, `base` times the local length scale; the
    /// five-point stencil must stay inside the domain.
    fn fd_step(&self, x0: f64, max: f64, base: f64) -> Result<f64> {
        let mut scale: f64 = 1.0;
        if max.is_finite() {
            scale = scale.min(0.1 * (max - x0));
        }
        if self.starts_singular() {
            scale = scale.min(0.1 * x0);
        }
        let h = base * scale;
        let left = x0 - 2.0 * h;
        let blocked = left < 0.0 || (self.starts_singular() && left <= 0.0) || x0 + 2.0 * h >= max;
        if blocked {
            return Err(Error::domain(format!("x0 = {x0} too close to the domain boundary")));
        }
        Ok(h)
    }

    fn derivatives(&self, x0: f64) -> Result<(f64, f64, f64)> {
        let max = self.max_x0()?;
        let f = |x: f64| self.eval_b(x);
        let h = self.fd_step(x0, max, 1e-3)?;
        let (m2, m1, c, p1, p2) = (f(x0 - 2.0 * h)?, f(x0 - h)?, f(x0)?, f(x0 + h)?, f(x0 + 2.0 * h)?);
        let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
        // Second differences lose two digits more to rounding, so use a wider stencil when it fits.
        let h = self.fd_step(x0, max, 1e-2).unwrap_or(h);
        let (m2, m1, p1, p2) = (f(x0 - 2.0 * h)?, f(x0 - h)?, f(x0 + h)?, f(x0 + 2.0 * h)?);
        let d2 = (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
        Ok((c, d1, d2))
    }

    /// `κρ̃c²` for the equation-of-state family, from `b` alone.
    fn eos_density(&self, sigma: f64, b: f64) -> f64 {
        let n = self.n as f64;
        let nsig = n * (1.0 + sigma);
        0.5 * (n - 1.0) * n * self.db0 * self.db0 * self.b0.powf(nsig - 2.0) * b.powf(-nsig)
    }

    /// `|(∂₀b)² − (R b^{2−n} + L b² − k²/q²)|` with `∂₀b` from 4th-order central
    /// differences. For the equation-of-state family the right-hand side is
    /// `(2κc²/(n(n−1))) ρ̃ b²`.
    pub fn friedmann_residual(&self, x0: f64) -> Result<f64> {
        let (b, db, _) = self.derivatives(x0)?;
        let rhs = match self.kind {
            ModelKind::EquationOfState { sigma } => {
                let n = self.n as f64;
                2.0 / (n * (n - 1.0)) * self.eos_density(sigma, b) * b * b
            }
            _ => self.friedmann_rhs(b),
        };
        Ok((db * db - rhs).abs())
    }

    fn require_eos(&self) -> Result<f64> {
        match self.kind {
            ModelKind::EquationOfState { sigma } => Ok(sigma),
            _ => Err(Error::NotApplicable("residual defined for the equation-of-state family".into())),
        }
    }

    /// Residual of `∂₀²b/b = −(2/(n−1))·((n−2+nσ)/(2n))·κρ̃c²`.
    pub fn raychaudhuri_residual(&self, x0: f64, sigma: f64) -> Result<f64> {
        let own = self.require_eos()?;
        if own != sigma {
            return Err(Error::invalid("sigma", format!("model has σ = {own}, asked for {sigma}")));
        }
        if self.db0 == 0.0 {
            return Ok(0.0);
        }
        let n = self.n as f64;
        let (b, _, d2) = self.derivatives(x0)?;
        let rhs = -(2.0 / (n - 1.0)) * ((n - 2.0 + n * sigma) / (2.0 * n)) * self.eos_density(sigma, b);
        Ok((d2 / b - rhs).abs())
    }

    /// Residual of `∂₀(ρ̃c²bⁿ) + p̃ ∂₀bⁿ = 0` with `p̃ = σρ̃c²`, relative to
    /// `|ρ̃c² ∂₀bⁿ|`. Evaluated for `κρ̃c²` so that the coupling
    /// constant drops out.
    pub fn mass_conservation_residual(&self, x0: f64, sigma: f64) -> Result<f64> {
        let own = self.require_eos()?;
        if own != sigma {
            return Err(Error::invalid("sigma", format!("model has σ = {own}, asked for {sigma}")));
        }
        let n = self.n as f64;
        let max = self.max_x0()?;
        let h = self.fd_step(x0, max, 1e-3)?;
        let energy = |x: f64| -> Result<f64> {
            let b = self.eval_b(x)?;
            Ok(self.eos_density(sigma, b) * b.powf(n))
        };
        let volume = |x: f64| -> Result<f64> { Ok(self.eval_b(x)?.powf(n)) };
        let d = |g: &dyn Fn(f64) -> Result<f64>| -> Result<f64> {
            Ok((g(x0 - 2.0 * h)? - 8.0 * g(x0 - h)? + 8.0 * g(x0 + h)? - g(x0 + 2.0 * h)?) / (12.0 * h))
        };
        let b = self.eval_b(x0)?;
        let density = self.eos_density(sigma, b);
        let dv = d(&volume)?;
        let residual = (d(&energy)? + sigma * density * dv).abs();
        let scale = (density * dv).abs();
        Ok(if scale == 0.0 { residual } else { residual / scale })
    }

    /// Qualitative fate of a matter + Λ universe, by integrating
    /// `b'' = ((2−n)/2) R b^{1−n} + L b` from `b(0)` on the expanding branch.
    pub fn matter_lambda_fate(&self) -> Result<MatterLambdaFate> {
        if self.kind != ModelKind::MatterWithLambda {
            return Err(Error::NotApplicable("fate classification is for matter + Λ models".into()));
        }
        self.validate()?;
        if self.is_einstein_static() {
            return Ok(MatterLambdaFate::Static);
        }
        let f0 = self.friedmann_rhs(self.b0);
        if f0 < -1e-12 {
            return Err(Error::domain(format!(
                "b(0) = {} lies in the forbidden band (∂₀b)² < 0",
                self.b0
            )));
        }
        let n = self.n as f64;
        let accel = |b: f64| 0.5 * (2.0 - n) * self.r_const * b.powf(1.0 - n) + self.l_const * b;
        let bstar = (self.curvature_ratio > 0.0).then(|| static_radius(self.n, self.r_const, self.l_const));
        let scale = bstar.unwrap_or(self.b0).max(self.b0);
        let tau = 1.0 / self.l_const.sqrt();
        let mut h = 1e-3 * tau;
        let x_end = 500.0 * tau;
        let (mut b, mut v, mut x) = (self.b0, f0.max(0.0).sqrt(), 0.0);
        while x < x_end {
            let k1 = (v, accel(b));
            let k2 = (v + 0.5 * h * k1.1, accel(b + 0.5 * h * k1.0));
            let k3 = (v + 0.5 * h * k2.1, accel(b + 0.5 * h * k2.0));
            let k4 = (v + h * k3.1, accel(b + h * k3.0));
            b += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            v += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            x += h;
            if !(b > 1e-6 * scale) {
                return Ok(MatterLambdaFate::VanishesInFiniteTime);
            }
            if b > 1e6 * scale {
                return Ok(MatterLambdaFate::TendsToInfinity);
            }
            if let Some(bs) = bstar {
                if (b - bs).abs() < 1e-5 * bs && v.abs() < 1e-5 * bs / tau {
                    return Ok(MatterLambdaFate::TendsToStatic);
                }
            }
            if v < 0.0 {
                h = h.min(b / (100.0 * v.abs()));
            }
        }
        Ok(MatterLambdaFate::TendsToStatic)
    }
}

fn check_curvature(c: Curvature, ratio: f64) -> Result<()> {
    let ok = match c {
        Curvature::Flat => ratio == 0.0,
        Curvature::Positive => ratio > 0.0,
        Curvature::Negative => ratio < 0.0,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::invalid("curvature_ratio", format!("{ratio} inconsistent with {c:?}")))
    }
}

/// Threshold `L₀ = (k²/2q²)^{n/(n−2)} R^{−2/(n−2)}` separating the matter + Λ subcases.
pub fn static_lambda_threshold(n: u32, r_const: f64, curvature_ratio: f64) -> f64 {
    let n = n as f64;
    (0.5 * curvature_ratio).powf(n / (n - 2.0)) * r_const.powf(-2.0 / (n - 2.0))
}

/// Static radius `b∗ = (R/L)^{1/n}`.
pub fn static_radius(n: u32, r_const: f64, l_const: f64) -> f64 {
    (r_const / l_const).powf(1.0 / n as f64)
}

/// Conformally flat spatial profile `e^{f(r)} = q²(1 + k²r²/4)^{−2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropyProfile {
    pub q_complex: Complex64,
    pub k_complex: Complex64,
}

impl IsotropyProfile {
    pub fn new(q: Complex64, k: Complex64) -> Result<Self> {
        if q.norm() == 0.0 {
            return Err(Error::invalid("q", "must be nonzero"));
        }
        Ok(Self {
            q_complex: q,
            k_complex: k,
        })
    }

    fn denominator(&self, r: f64) -> Result<Complex64> {
        let k2 = self.k_complex * self.k_complex;
        let d = 1.0 + k2 * r * r / 4.0;
        if d.norm() <= 1e-14 {
            return Err(Error::Singular(format!("1 + k²r²/4 vanishes at r = {r}")));
        }
        Ok(d)
    }

    /// `(f, f′, f″)` from `f = ln q² − 2 ln(1 + k²r²/4)`.
    pub fn derivatives(&self, r: f64) -> Result<(Complex64, Complex64, Complex64)> {
        let k2 = self.k_complex * self.k_complex;
        let d = self.denominator(r)?;
        let f = (self.q_complex * self.q_complex).ln() - 2.0 * d.ln();
        let f1 = -k2 * r / d;
        let f2 = (-k2 + k2 * k2 * r * r / 4.0) / (d * d);
        Ok((f, f1, f2))
    }

    /// `|f″ − f′/r − (f′)²/2|`.
    pub fn isotropy_residual(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::domain(format!("r = {r} must be positive")));
        }
        let (_, f1, f2) = self.derivatives(r)?;
        Ok((f2 - f1 / r - f1 * f1 / 2.0).norm())
    }
}

/// `Γ(n/2)` for integer `n ≥ 1`, via the integer and half-integer recurrences.
fn gamma_half(n: u32) -> f64 {
    if n % 2 == 0 {
        (1..n / 2).map(|k| k as f64).product()
    } else {
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while x < n as f64 / 2.0 - 0.25 {
            g *= x;
            x += 1.0;
        }
        g
    }
}

/// Generalized gravitational coupling `κ = 2(n−1)π^{n/2}G / ((n−2)Γ(n/2)c⁴)`.
pub fn eval_kappa(n: u32, g_newton: f64, c: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::domain(format!("κ is defined for n ≥ 3, got {n}")));
    }
    if !(g_newton > 0.0) || !(c > 0.0) {
        return Err(Error::invalid("G/c", "must be positive"));
    }
    if n == 3 {
        return Ok(8.0 * PI * g_newton / c.powi(4));
    }
    let nf = n as f64;
    Ok(2.0 * (nf - 1.0) * PI.powf(nf / 2.0) * g_newton / ((nf - 2.0) * gamma_half(n) * c.powi(4)))
}

/// Named models for configuration files.
pub fn catalogue() -> Vec<(&'static str, CosmologyModel)> {
    let base = |kind, r, l, k, b0, db0| CosmologyModel {
        kind,
        n: 3,
        r_const: r,
        l_const: l,
        curvature_ratio: k,
        b0,
        db0,
    };
    vec![
        ("dust", CosmologyModel::equation_of_state(3, 0.0, 1.0, 1.0)),
        ("radiation", CosmologyModel::equation_of_state(3, 1.0 / 3.0, 1.0, 1.0)),
        ("stiff-4d", CosmologyModel::equation_of_state(4, 1.0, 1.0, 0.5)),
        ("dark-energy", CosmologyModel::equation_of_state(3, -1.0, 1.0, 1.0)),
        ("phantom", CosmologyModel::equation_of_state(3, -1.5, 1.0, 0.2)),
        (
            "minkowski",
            base(ModelKind::MinkowskiMilne { branch: Branch::Expanding }, 0.0, 0.0, 0.0, 1.0, 0.0),
        ),
        (
            "milne",
            base(ModelKind::MinkowskiMilne { branch: Branch::Expanding }, 0.0, 0.0, -1.0, 1.0, 1.0),
        ),
        ("anti-de-sitter", base(ModelKind::NegativeLambda, 0.0, -1.0, -1.0, 0.0, 1.0)),
        (
            "de-sitter-flat",
            base(
                ModelKind::DeSitter {
                    curvature: Curvature::Flat,
                    branch: Branch::Expanding,
                },
                0.0,
                1.0,
                0.0,
                1.0,
                1.0,
            ),
        ),
        (
            "de-sitter-closed",
            base(
                ModelKind::DeSitter {
                    curvature: Curvature::Positive,
                    branch: Branch::Expanding,
                },
                0.0,
                1.0,
                1.0,
                1.0,
                0.0,
            ),
        ),
        (
            "de-sitter-open",
            base(
                ModelKind::DeSitter {
                    curvature: Curvature::Negative,
                    branch: Branch::Expanding,
                },
                0.0,
                1.0,
                -1.0,
                0.0,
                1.0,
            ),
        ),
        (
            "einstein-de-sitter",
            base(
                ModelKind::MatterOnly {
                    curvature: Curvature::Flat,
                    branch: Branch::Expanding,
                },
                1.0,
                0.0,
                0.0,
                1.0,
                1.0,
            ),
        ),
        (
            "friedmann-closed",
            base(
                ModelKind::MatterOnly {
                    curvature: Curvature::Positive,
                    branch: Branch::Expanding,
                },
                1.0,
                0.0,
                1.0,
                0.0,
                0.0,
            ),
        ),
        (
            "friedmann-open",
            base(
                ModelKind::MatterOnly {
                    curvature: Curvature::Negative,
                    branch: Branch::Expanding,
                },
                1.0,
                0.0,
                -1.0,
                0.0,
                0.0,
            ),
        ),
        ("einstein-static", CosmologyModel::einstein_static(3, 1.0, 1.0)),
    ]
}

pub fn model_by_name(name: &str) -> Option<CosmologyModel> {
    catalogue().into_iter().find(|(k, _)| *k == name).map(|(_, m)| m)
}

/// Sample interior points of a model's domain, avoiding the edges.
pub fn interior_points(model: &CosmologyModel, count: usize) -> Result<Vec<f64>> {
    let max = model.max_x0()?;
    let (lo, hi) = if max.is_finite() {
        (0.05 * max, 0.95 * max)
    } else {
        (0.05, 3.0)
    };
    Ok((0..count)
        .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / count as f64)
        .collect())
}
