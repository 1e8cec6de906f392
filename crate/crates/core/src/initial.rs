//! Initial-condition generators, addressable by name.

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialCondition {
    /// `A·exp(−|x − x_c|²/(2 width²))·exp(i k·x)`.
    Gaussian {
        width: f64,
        amplitude: f64,
        #[serde(default)]
        phase_ramp: Vec<f64>,
        #[serde(default)]
        offset: Vec<f64>,
    },
    /// `A·exp(−(|x| − radius)²/width²)`, with an optional vortex winding in the
    /// first two axes.
    Ring {
        radius: f64,
        width: f64,
        amplitude: f64,
        #[serde(default)]
        winding: i32,
    },
    /// Random trigonometric polynomial with all modes `|m| ≤ cutoff` (mode
    /// numbers, not angular wavenumbers), normalized so that `max|u| = amplitude`
    /// on the grid. The function is independent of the grid resolution.
    RandomBandLimited {
        seed: u64,
        cutoff: u32,
        amplitude: f64,
    },
    /// Random field whose spectrum decays like `(1+|m|²)^{−decay/2}` up to
    /// the grid's Nyquist mode; resolution-dependent by construction.
    RandomRough {
        seed: u64,
        decay: f64,
        amplitude: f64,
    },
}

impl InitialCondition {
    pub fn gaussian(width: f64, amplitude: f64) -> Self {
        InitialCondition::Gaussian {
            width,
            amplitude,
            phase_ramp: Vec::new(),
            offset: Vec::new(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            InitialCondition::Gaussian { .. } => "gaussian",
            InitialCondition::Ring { .. } => "ring",
            InitialCondition::RandomBandLimited { .. } => "random-band-limited",
            InitialCondition::RandomRough { .. } => "random-rough",
        }
    }

    pub fn with_seed(self, new_seed: u64) -> Self {
        match self {
            InitialCondition::RandomBandLimited { cutoff, amplitude, .. } => InitialCondition::RandomBandLimited {
                seed: new_seed,
                cutoff,
                amplitude,
            },
            InitialCondition::RandomRough { decay, amplitude, .. } => InitialCondition::RandomRough {
                seed: new_seed,
                decay,
                amplitude,
            },
            other => other,
        }
    }

    pub fn generate(&self, grid: &GridSpec) -> Result<Vec<Complex64>> {
        grid.validate()?;
        let points = grid.points();
        let d = grid.dim;
        match self {
            InitialCondition::Gaussian {
                width,
                amplitude,
                phase_ramp,
                offset,
            } => {
                if !(*width > 0.0) {
                    return Err(Error::invalid("initial.width", "must be positive"));
                }
                let ramp = pad(phase_ramp, d, "initial.phase_ramp")?;
                let off = pad(offset, d, "initial.offset")?;
                Ok(points
                    .iter()
                    .map(|x| {
                        let (mut r2, mut phase) = (0.0, 0.0);
                        for a in 0..d {
                            r2 += (x[a] - off[a]).powi(2);
                            phase += ramp[a] * x[a];
                        }
                        Complex64::from_polar(amplitude * (-r2 / (2.0 * width * width)).exp(), phase)
                    })
                    .collect())
            }
            InitialCondition::Ring {
                radius,
                width,
                amplitude,
                winding,
            } => {
                if !(*width > 0.0) || !(*radius >= 0.0) {
                    return Err(Error::invalid("initial.width", "ring needs width > 0, radius ≥ 0"));
                }
                Ok(points
                    .iter()
                    .map(|x| {
                        let r = x[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
                        let theta = if d >= 2 { x[1].atan2(x[0]) } else { 0.0 };
                        let env = amplitude * (-((r - radius) / width).powi(2)).exp();
                        Complex64::from_polar(env, *winding as f64 * theta)
                    })
                    .collect())
            }
            InitialCondition::RandomBandLimited { seed, cutoff, amplitude } => {
                let modes = mode_list(d, *cutoff as i64);
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let coeffs: Vec<Complex64> = modes
                    .iter()
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                let u = synthesize(grid, &points, &modes, &coeffs);
                Ok(normalize_max(u, *amplitude))
            }
            InitialCondition::RandomRough { seed, decay, amplitude } => {
                let half = grid.points_per_axis as i64 / 2 - 1;
                let modes = mode_list(d, half);
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let coeffs: Vec<Complex64> = modes
                    .iter()
                    .map(|m| {
                        let m2: i64 = m.iter().map(|v| v * v).sum();
                        let env = (1.0 + m2 as f64).powf(-decay / 2.0);
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * env
                    })
                    .collect();
                let u = synthesize(grid, &points, &modes, &coeffs);
                Ok(normalize_max(u, *amplitude))
            }
        }
    }
}

fn pad(v: &[f64], d: usize, name: &'static str) -> Result<[f64; 3]> {
    let mut out = [0.0; 3];
    match v.len() {
        0 => {}
        1 => out[0] = v[0],
        n if n == d => out[..d].copy_from_slice(v),
        _ => return Err(Error::invalid(name, format!("expected {d} components"))),
    }
    Ok(out)
}

/// All integer mode vectors with every component in `[-cutoff, cutoff]`, in a
/// fixed lexicographic order.
fn mode_list(d: usize, cutoff: i64) -> Vec<[i64; 3]> {
    let range: Vec<i64> = (-cutoff..=cutoff).collect();
    let mut out = Vec::new();
    for &a in &range {
        if d == 1 {
            out.push([a, 0, 0]);
            continue;
        }
        for &b in &range {
            if d == 2 {
                out.push([a, b, 0]);
                continue;
            }
            for &c in &range {
                out.push([a, b, c]);
            }
        }
    }
    out
}

fn synthesize(grid: &GridSpec, points: &[[f64; 3]], modes: &[[i64; 3]], coeffs: &[Complex64]) -> Vec<Complex64> {
    let k0 = 2.0 * PI / grid.box_length;
    points
        .iter()
        .map(|x| {
            modes
                .iter()
                .zip(coeffs)
                .map(|(m, c)| {
                    let phase: f64 = (0..grid.dim).map(|a| m[a] as f64 * k0 * x[a]).sum();
                    c * Complex64::from_polar(1.0, phase)
                })
                .sum()
        })
        .collect()
}

fn normalize_max(mut u: Vec<Complex64>, amplitude: f64) -> Vec<Complex64> {
    let max = u.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if max > 0.0 {
        let s = amplitude / max;
        u.iter_mut().for_each(|v| *v *= s);
    }
    u
}
