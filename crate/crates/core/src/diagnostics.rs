//! Charge, energy, virial and concavity functionals along a trajectory, and
//! the residuals of the identities they satisfy.

use crate::error::{Error, Result};
use crate::solver::{FieldState, Nonlinearity, Solver, SolverConfig};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// One row of diagnostics. Identity terms that do not apply to the run
/// (gauge-variant nonlinearity, complex λ) are `NaN`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub s: f64,
    /// `(m/ħ)‖u‖₂²`.
    pub charge: f64,
    pub grad_sq: f64,
    /// `∫(a²/w²)V₀(uw) = g·λ/(p+1)·∫|u|^{p+1}`.
    pub potential: f64,
    pub energy: f64,
    pub charge_residual: f64,
    pub energy_residual: f64,
    /// `∫₀ˢ∫I`.
    pub i_accum: f64,
    /// `∫|x|²|u|²`.
    pub virial2: f64,
    pub heisenberg_slack: f64,
    pub k_value: f64,
    pub max_amp: f64,
    pub raw: RawTerms,
}

/// Per-record ingredients from which every balance can be recomputed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawTerms {
    pub l2_sq: f64,
    /// `∫|u|^{p+1}`.
    pub nonlin_integral: f64,
    /// Nonlinear weight `g(s) = a²w^{p−1}`.
    pub weight: f64,
    /// `‖∂ₛu‖₂²` with `∂ₛu` from the equation's right-hand side.
    pub ds_u_sq: f64,
    /// `∂ₛ‖u‖₂² = 2Re⟨u, ∂ₛu⟩`.
    pub dl2_ds: f64,
    /// `∫I` at this instant.
    pub i_total: f64,
    /// `∂ₛV₂` from the momentum form; `NaN` for ω ∉ {0, π/2}.
    pub virial_rate: f64,
    /// `‖|x|u‖₂`.
    pub x_norm: f64,
}

/// Trapezoid accumulator over possibly non-uniform abscissae.
#[derive(Debug, Clone, Copy, Default)]
struct Trapezoid {
    prev: Option<(f64, f64)>,
    total: f64,
}

impl Trapezoid {
    fn push(&mut self, s: f64, f: f64) -> f64 {
        if let Some((s0, f0)) = self.prev {
            self.total += 0.5 * (s - s0) * (f0 + f);
        }
        self.prev = Some((s, f));
        self.total
    }
}

/// Whether the charge and energy identities are meaningful for `cfg`.
pub fn identities_apply(cfg: &SolverConfig) -> bool {
    cfg.nonlinearity == Nonlinearity::GaugeInvariant && cfg.lambda.im == 0.0
}

fn require_identities(cfg: &SolverConfig) -> Result<()> {
    if cfg.nonlinearity == Nonlinearity::GaugeVariant {
        return Err(Error::NotApplicable(
            "the gauge-variant nonlinearity does not satisfy Im(z̄V₁(z)) = 0".into(),
        ));
    }
    if cfg.lambda.im != 0.0 {
        return Err(Error::NotApplicable("balance identities need real λ".into()));
    }
    Ok(())
}

/// `ω ∈ {0, π/2}` up to the snapping used by the solver.
pub fn is_dispersive(cfg: &SolverConfig) -> bool {
    cfg.sin_two_omega() == 0.0
}

/// Evaluates functionals of a field at time `s` for a given solver.
pub struct Probe<'a> {
    solver: &'a Solver,
    coords: Vec<[f64; 3]>,
}

impl<'a> Probe<'a> {
    pub fn new(solver: &'a Solver) -> Self {
        let grid = solver.grid();
        let coords = grid
            .points()
            .into_iter()
            .map(|mut x| {
                for a in 0..grid.dim {
                    x[a] -= grid.center[a];
                }
                x
            })
            .collect();
        Self { solver, coords }
    }

    pub fn raw(&self, u: &[Complex64], s: f64) -> Result<(RawTerms, f64)> {
        let cfg = self.solver.config();
        let sp = self.solver.spectral();
        let grid = sp.grid();
        let dv = grid.cell_volume();
        let p = cfg.p;
        let l2_sq = sp.l2_sq(u);
        let grad_sq = sp.grad_sq(u);
        let nonlin_integral = dv * u.iter().map(|v| v.norm().powf(p + 1.0)).sum::<f64>();
        let weight = cfg.background.nonlinear_weight(s, p)?;
        let dsu = self.solver.rhs(u, s)?;
        let ds_u_sq = sp.l2_sq(&dsu);
        let dl2_ds = 2.0 * dv * u.iter().zip(&dsu).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
        let i_total = if identities_apply(cfg) {
            i_term(cfg, s, cfg.lambda.re * nonlin_integral)?
        } else {
            f64::NAN
        };
        let x_sq: f64 = dv
            * u.iter()
                .zip(&self.coords)
                .map(|(v, x)| (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) * v.norm_sqr())
                .sum::<f64>();
        let virial_rate = if is_dispersive(cfg) {
            let mut im_sum = 0.0;
            for a in 0..grid.dim {
                let du = sp.partial(u, a);
                im_sum += u
                    .iter()
                    .zip(&du)
                    .zip(&self.coords)
                    .map(|((v, d), x)| x[a] * (v.conj() * d).im)
                    .sum::<f64>();
            }
            cfg.sign.value() * 2.0 * cfg.hbar / cfg.m_mass * cfg.cos_two_omega() * dv * im_sum
        } else {
            f64::NAN
        };
        Ok((
            RawTerms {
                l2_sq,
                nonlin_integral,
                weight,
                ds_u_sq,
                dl2_ds,
                i_total,
                virial_rate,
                x_norm: x_sq.sqrt(),
            },
            grad_sq,
        ))
    }
}

/// `∫I dx = (n/2a₀ⁿ)a^{n+1}(da/ds)(p−1−4/n)·λ∫|u|^{p+1}w^{p+1}/(p+1)`, given
/// `lambda_nonlin = λ∫|u|^{p+1}`.
pub fn i_term(cfg: &SolverConfig, s: f64, lambda_nonlin: f64) -> Result<f64> {
    let bg = &cfg.background;
    let n = bg.n() as f64;
    let a0 = bg.params.a0;
    let p = cfg.p;
    let dads = bg.dads_at_s(s)?;
    if dads == 0.0 {
        return Ok(0.0);
    }
    let a = bg.a_at_s(s)?;
    let w = bg.w_at_s(s)?;
    Ok(n / (2.0 * a0.powf(n)) * a.powf(n + 1.0) * dads * (p - 1.0 - 4.0 / n) * lambda_nonlin * w.powf(p + 1.0)
        / (p + 1.0))
}

/// Online diagnostics: one [`DiagnosticsRecord`] per observed state.
pub struct Tracker<'a> {
    probe: Probe<'a>,
    k0: f64,
    charge0: Option<f64>,
    energy0: Option<f64>,
    charge_dissipation: Trapezoid,
    energy_dissipation: Trapezoid,
    i_integral: Trapezoid,
    k_integral: Trapezoid,
    records: Vec<DiagnosticsRecord>,
}

impl<'a> Tracker<'a> {
    pub fn new(solver: &'a Solver, k0: f64) -> Self {
        Self {
            probe: Probe::new(solver),
            k0,
            charge0: None,
            energy0: None,
            charge_dissipation: Trapezoid::default(),
            energy_dissipation: Trapezoid::default(),
            i_integral: Trapezoid::default(),
            k_integral: Trapezoid::default(),
            records: Vec::new(),
        }
    }

    pub fn observe(&mut self, state: &FieldState) -> Result<DiagnosticsRecord> {
        let s = state.s_now;
        let (raw, grad_sq) = self.probe.raw(&state.u, s)?;
        let solver: &'a Solver = self.probe.solver;
        let k0 = self.k0;
        let rec = assemble(solver.config(), s, grad_sq, raw, state.max_amp(), self, k0);
        self.records.push(rec);
        Ok(rec)
    }

    pub fn records(&self) -> &[DiagnosticsRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<DiagnosticsRecord> {
        self.records
    }
}

fn assemble(
    cfg: &SolverConfig,
    s: f64,
    grad_sq: f64,
    raw: RawTerms,
    amp: f64,
    acc: &mut Tracker<'_>,
    k0: f64,
) -> DiagnosticsRecord {
    let m_over_h = cfg.m_mass / cfg.hbar;
    let charge = m_over_h * raw.l2_sq;
    let applies = identities_apply(cfg);
    let lam = cfg.lambda.re;
    let potential = if applies {
        raw.weight * lam / (cfg.p + 1.0) * raw.nonlin_integral
    } else {
        f64::NAN
    };
    let energy = 0.5 * grad_sq + potential;
    let s2w = cfg.sin_two_omega();
    let sign = cfg.sign.value();

    let charge0 = *acc.charge0.get_or_insert(charge);
    let energy0 = *acc.energy0.get_or_insert(energy);
    let dissipation = acc
        .charge_dissipation
        .push(s, grad_sq + lam * raw.weight * raw.nonlin_integral);
    let e_diss = acc.energy_dissipation.push(s, raw.ds_u_sq);
    let i_accum = acc.i_integral.push(s, raw.i_total);
    let k_value = acc.k_integral.push(s, raw.l2_sq) + k0;

    let (charge_residual, energy_residual) = if applies {
        (
            charge + sign * s2w * dissipation - charge0,
            energy + sign * 2.0 * s2w / (cfg.hbar / cfg.m_mass) * e_diss + i_accum - energy0,
        )
    } else {
        (f64::NAN, f64::NAN)
    };
    let n = cfg.background.n() as f64;
    DiagnosticsRecord {
        s,
        charge,
        grad_sq,
        potential,
        energy,
        charge_residual,
        energy_residual,
        i_accum,
        virial2: raw.x_norm * raw.x_norm,
        heisenberg_slack: 2.0 / n * grad_sq.sqrt() * raw.x_norm - raw.l2_sq,
        k_value,
        max_amp: amp,
        raw,
    }
}

/// Charge-identity residuals recomputed from a record series.
pub fn charge_balance(cfg: &SolverConfig, records: &[DiagnosticsRecord]) -> Result<Vec<f64>> {
    require_identities(cfg)?;
    let mut trap = Trapezoid::default();
    let Some(first) = records.first() else {
        return Ok(Vec::new());
    };
    let s2w = cfg.sin_two_omega() * cfg.sign.value();
    Ok(records
        .iter()
        .map(|r| {
            let d = trap.push(r.s, r.grad_sq + cfg.lambda.re * r.raw.weight * r.raw.nonlin_integral);
            r.charge + s2w * d - first.charge
        })
        .collect())
}

/// Energy-identity residuals recomputed from a record series.
pub fn energy_balance(cfg: &SolverConfig, records: &[DiagnosticsRecord]) -> Result<Vec<f64>> {
    require_identities(cfg)?;
    let Some(first) = records.first() else {
        return Ok(Vec::new());
    };
    let coef = cfg.sign.value() * 2.0 * cfg.m_mass * cfg.sin_two_omega() / cfg.hbar;
    let mut diss = Trapezoid::default();
    let mut itg = Trapezoid::default();
    Ok(records
        .iter()
        .map(|r| {
            let d = diss.push(r.s, r.raw.ds_u_sq);
            let i = itg.push(r.s, r.raw.i_total);
            r.energy + coef * d + i - first.energy
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VirialSeries {
    pub s: Vec<f64>,
    pub v2: Vec<f64>,
    pub dv2: Vec<f64>,
    /// Second differences of `V₂`; `NaN` at the first and last record.
    pub d2v2: Vec<f64>,
    /// `(ħ/m)²n(p−1)E(s)`.
    pub bound: Vec<f64>,
    /// `bound − ∂ₛ²V₂`.
    pub slack: Vec<f64>,
}

pub fn virial_watch(cfg: &SolverConfig, records: &[DiagnosticsRecord]) -> Result<VirialSeries> {
    if !is_dispersive(cfg) {
        return Err(Error::NotApplicable(format!(
            "virial identities are only checked for ω ∈ {{0, π/2}}, got ω = {}",
            cfg.omega
        )));
    }
    let n = cfg.background.n() as f64;
    let hm = cfg.hbar / cfg.m_mass;
    let s: Vec<f64> = records.iter().map(|r| r.s).collect();
    let v2: Vec<f64> = records.iter().map(|r| r.virial2).collect();
    let d2v2 = second_differences(&s, &v2);
    let bound: Vec<f64> = records.iter().map(|r| hm * hm * n * (cfg.p - 1.0) * r.energy).collect();
    let slack = bound.iter().zip(&d2v2).map(|(b, d)| b - d).collect();
    Ok(VirialSeries {
        dv2: records.iter().map(|r| r.raw.virial_rate).collect(),
        s,
        v2,
        d2v2,
        bound,
        slack,
    })
}

/// Three-point second derivative on a non-uniform mesh.
pub fn second_differences(s: &[f64], v: &[f64]) -> Vec<f64> {
    let mut out = vec![f64::NAN; v.len()];
    for j in 1..v.len().saturating_sub(1) {
        let h0 = s[j] - s[j - 1];
        let h1 = s[j + 1] - s[j];
        out[j] = 2.0 * (h0 * v[j + 1] - (h0 + h1) * v[j] + h1 * v[j - 1]) / (h0 * h1 * (h0 + h1));
    }
    out
}

/// First `s > 0` at which `v + v′s + ½·curv·s² = 0`, if `curv < 0`.
pub fn virial_zero_bound(v: f64, dv: f64, curv: f64) -> Option<f64> {
    if !(curv < 0.0) {
        return None;
    }
    let disc = dv * dv - 2.0 * curv * v;
    Some((-dv - disc.sqrt()) / curv)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcavityReport {
    pub k0: f64,
    pub alpha: f64,
    pub k_series: Vec<f64>,
    /// `K″K − (1+α)K′²` per record.
    pub certificate: Vec<f64>,
    pub certificate_positive: bool,
    /// `K₀/(α‖u₀‖₂²)`.
    pub s1: f64,
    pub warnings: Vec<String>,
}

/// Concavity functional `K(s) = ∫₀ˢ‖u‖₂² + K₀` and its certificate.
pub fn concavity_watch(
    cfg: &SolverConfig,
    records: &[DiagnosticsRecord],
    k0: f64,
    alpha: f64,
) -> Result<ConcavityReport> {
    if !(k0 > 0.0) || !(alpha > 0.0) {
        return Err(Error::invalid("k0/alpha", "must be positive"));
    }
    let first = records
        .first()
        .ok_or_else(|| Error::invalid("records", "empty trajectory"))?;
    let mut warnings = concavity_preconditions(cfg, first.energy);
    let mut trap = Trapezoid::default();
    let mut k_series = Vec::with_capacity(records.len());
    let mut certificate = Vec::with_capacity(records.len());
    for r in records {
        let k = trap.push(r.s, r.raw.l2_sq) + k0;
        k_series.push(k);
        certificate.push(r.raw.dl2_ds * k - (1.0 + alpha) * r.raw.l2_sq * r.raw.l2_sq);
    }
    let certificate_positive = certificate.iter().all(|c| *c > 0.0);
    if !certificate_positive {
        warnings.push(format!("certificate not positive for K0 = {k0}, α = {alpha}"));
    }
    Ok(ConcavityReport {
        k0,
        alpha,
        k_series,
        certificate,
        certificate_positive,
        s1: k0 / (alpha * first.raw.l2_sq),
        warnings,
    })
}

/// Unmet blow-up hypotheses for the concavity argument, as warnings.
pub fn concavity_preconditions(cfg: &SolverConfig, e0: f64) -> Vec<String> {
    let mut w = Vec::new();
    let n = cfg.background.n() as f64;
    let s2 = cfg.sin_two_omega();
    if s2 == 0.0 {
        w.push("ω ∈ {0, π/2}: no dissipation".to_string());
    } else {
        let p0 = 2.0 / (s2 * s2) - 1.0;
        if !(cfg.p > p0) {
            w.push(format!("p = {} does not exceed p0 = {p0}", cfg.p));
        }
    }
    if !(e0 < 0.0) {
        w.push(format!("E(0) = {e0} is not negative"));
    }
    if cfg.lambda.re * cfg.background.params.a1 * (cfg.p - 1.0 - 4.0 / n) < 0.0 {
        w.push("λa₁(p−1−4/n) < 0".to_string());
    }
    w
}

/// Searches a `(K₀, α)` grid for a positive certificate with `s_detect ≤ S₁`.
pub fn concavity_scan(
    cfg: &SolverConfig,
    records: &[DiagnosticsRecord],
    s_detect: f64,
    k0_grid: &[f64],
    alpha_grid: &[f64],
) -> Result<Option<ConcavityReport>> {
    for &k0 in k0_grid {
        for &alpha in alpha_grid {
            let rep = concavity_watch(cfg, records, k0, alpha)?;
            if rep.certificate_positive && s_detect <= rep.s1 {
                return Ok(Some(rep));
            }
        }
    }
    Ok(None)
}

/// `count` logarithmically spaced values from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|j| (a + (b - a) * j as f64 / (count - 1) as f64).exp())
        .collect()
}

/// A-priori bound on `‖∇u‖₂` in one dimension for runs whose energy is
/// nonincreasing and whose charge is at most `l2_sq`.
///
/// Uses `|u|∞² ≤ ‖u‖₂²/L + ‖u‖₂‖u′‖₂` on a periodic interval of length `L`
/// to control `∫|u|^{p+1}`, and returns the largest `X` with
/// `½X² ≤ E₀ + (|λ|g_max/(p+1))·M·(M/L + √M·X)^{(p−1)/2}`.
pub fn gradient_bound(
    n: u32,
    lambda: f64,
    p: f64,
    l2_sq: f64,
    e0: f64,
    g_max: f64,
    box_length: f64,
) -> Result<f64> {
    if n != 1 {
        return Err(Error::NotApplicable("the gradient bound is implemented for n = 1".into()));
    }
    if lambda >= 0.0 {
        if e0 < 0.0 {
            return Err(Error::invalid("e0", "defocusing energy cannot be negative"));
        }
        return Ok((2.0 * e0).sqrt());
    }
    if !(p < 5.0) {
        return Err(Error::NotApplicable("the bound needs p < 1 + 4/n".into()));
    }
    let m = l2_sq;
    let c = lambda.abs() * g_max / (p + 1.0) * m;
    let excess = |x: f64| 0.5 * x * x - e0 - c * (m / box_length + m.sqrt() * x).powf(0.5 * (p - 1.0));
    let mut hi = 1.0;
    while excess(hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Singular("gradient bound did not close".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Convenience: evolve while tracking diagnostics.
pub fn evolve_tracked(
    solver: &Solver,
    state: &mut FieldState,
    s_end: f64,
    k0: f64,
) -> Result<(crate::solver::EvolveSummary, Vec<DiagnosticsRecord>)> {
    let mut tracker = Tracker::new(solver, k0);
    let mut failure = None;
    let summary = solver.evolve(state, s_end, |st| {
        if failure.is_none() {
            if let Err(e) = tracker.observe(st) {
                failure = Some(e);
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((summary, tracker.into_records()))
}
