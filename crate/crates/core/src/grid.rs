//! Periodic grids and the spectral machinery on them.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// A periodic box `[c − L/2, c + L/2)^d` sampled with `N` points per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub points_per_axis: usize,
    pub box_length: f64,
    /// Box centre, one coordinate per axis.
    pub center: Vec<f64>,
}

impl GridSpec {
    pub fn new(dim: usize, points_per_axis: usize, box_length: f64) -> Result<Self> {
        let grid = Self {
            dim,
            points_per_axis,
            box_length,
            center: vec![0.0; dim],
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn with_center(mut self, center: Vec<f64>) -> Result<Self> {
        self.center = center;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::invalid("grid.dim", format!("must be 1, 2 or 3, got {}", self.dim)));
        }
        let n = self.points_per_axis;
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::invalid(
                "grid.points",
                format!("must be a power of two ≥ 8, got {n}"),
            ));
        }
        if !(self.box_length > 0.0) || !self.box_length.is_finite() {
            return Err(Error::invalid("grid.length", "must be positive"));
        }
        if self.center.len() != self.dim {
            return Err(Error::invalid("grid.center", "needs one coordinate per axis"));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.points_per_axis as f64
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Volume element `h^d` of a grid cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// 1-D coordinates along `axis`.
    pub fn axis_coords(&self, axis: usize) -> Vec<f64> {
        let h = self.spacing();
        let lo = self.center[axis] - 0.5 * self.box_length;
        (0..self.points_per_axis).map(|j| lo + j as f64 * h).collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.points_per_axis as i64;
        let dk = 2.0 * PI / self.box_length;
        (0..n)
            .map(|j| if j < n / 2 { j } else { j - n })
            .map(|j| j as f64 * dk)
            .collect()
    }

    /// Multi-index of a flat row-major index; axis 0 varies slowest.
    pub fn unravel(&self, mut idx: usize) -> [usize; 3] {
        let n = self.points_per_axis;
        let mut out = [0; 3];
        for axis in (0..self.dim).rev() {
            out[axis] = idx % n;
            idx /= n;
        }
        out
    }

    /// Physical coordinates of every grid point, flattened.
    pub fn points(&self) -> Vec<[f64; 3]> {
        let axes: Vec<Vec<f64>> = (0..self.dim).map(|a| self.axis_coords(a)).collect();
        (0..self.len())
            .map(|i| {
                let m = self.unravel(i);
                let mut x = [0.0; 3];
                for a in 0..self.dim {
                    x[a] = axes[a][m[a]];
                }
                x
            })
            .collect()
    }
}

/// FFT plans and cached wavenumber tables for one grid. Plans are shared
/// read-only, so one `Spectral` may back several evolutions.
#[derive(Clone)]
pub struct Spectral {
    grid: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// `|ξ|²` per flat index.
    k_sq: Vec<f64>,
    /// Wavenumber per axis per flat index.
    k_axes: Vec<Vec<f64>>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: &GridSpec) -> Result<Self> {
        grid.validate()?;
        let mut planner = FftPlanner::new();
        let n = grid.points_per_axis;
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let k = grid.wavenumbers();
        let len = grid.len();
        let mut k_axes = vec![vec![0.0; len]; grid.dim];
        let mut k_sq = vec![0.0; len];
        for i in 0..len {
            let m = grid.unravel(i);
            for a in 0..grid.dim {
                let ka = k[m[a]];
                k_axes[a][i] = ka;
                k_sq[i] += ka * ka;
            }
        }
        Ok(Self {
            grid: grid.clone(),
            forward,
            inverse,
            k_sq,
            k_axes,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn k_sq(&self) -> &[f64] {
        &self.k_sq
    }

    pub fn k_axis(&self, axis: usize) -> &[f64] {
        &self.k_axes[axis]
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.grid.points_per_axis;
        let dim = self.grid.dim;
        assert_eq!(data.len(), self.grid.len());
        if dim == 1 {
            plan.process(data);
            return;
        }
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        for axis in 0..dim {
            let stride = n.pow((dim - 1 - axis) as u32);
            let block = stride * n;
            for base in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    let start = base + offset;
                    for (j, v) in line.iter_mut().enumerate() {
                        *v = data[start + j * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (j, v) in line.iter().enumerate() {
                        data[start + j * stride] = *v;
                    }
                }
            }
        }
    }

    /// Unnormalized forward DFT over all axes.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    /// Inverse DFT over all axes, normalized so that `inverse ∘ forward = id`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
        let scale = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|v| *v *= scale);
    }

    /// `∫|u|²` by the grid rule.
    pub fn l2_sq(&self, u: &[Complex64]) -> f64 {
        self.grid.cell_volume() * u.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    /// `‖∇u‖₂²` via Parseval on the spectral derivative.
    pub fn grad_sq_from_hat(&self, u_hat: &[Complex64]) -> f64 {
        let weight = self.grid.cell_volume() / u_hat.len() as f64;
        weight
            * u_hat
                .iter()
                .zip(&self.k_sq)
                .map(|(v, k2)| k2 * v.norm_sqr())
                .sum::<f64>()
    }

    pub fn grad_sq(&self, u: &[Complex64]) -> f64 {
        let mut hat = u.to_vec();
        self.forward(&mut hat);
        self.grad_sq_from_hat(&hat)
    }

    /// Spectral Laplacian `Δu`.
    pub fn laplacian(&self, u: &[Complex64]) -> Vec<Complex64> {
        let mut hat = u.to_vec();
        self.forward(&mut hat);
        hat.iter_mut().zip(&self.k_sq).for_each(|(v, k2)| *v *= -k2);
        self.inverse(&mut hat);
        hat
    }

    /// Spectral partial derivative along `axis`.
    pub fn partial(&self, u: &[Complex64], axis: usize) -> Vec<Complex64> {
        let mut hat = u.to_vec();
        self.forward(&mut hat);
        let n = self.grid.points_per_axis as f64;
        let nyquist = std::f64::consts::PI * n / self.grid.box_length;
        hat.iter_mut().zip(&self.k_axes[axis]).for_each(|(v, &k)| {
            // odd derivative: drop the unpaired Nyquist mode
            if (k.abs() - nyquist).abs() < 1e-9 * nyquist {
                *v = Complex64::new(0.0, 0.0);
            } else {
                *v *= Complex64::new(0.0, k);
            }
        });
        self.inverse(&mut hat);
        hat
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(1, 100, 1.0).is_err());
        assert!(GridSpec::new(1, 4, 1.0).is_err());
        assert!(GridSpec::new(4, 8, 1.0).is_err());
        assert!(GridSpec::new(2, 16, 0.0).is_err());
        assert!(GridSpec::new(2, 16, 1.0).unwrap().with_center(vec![0.0]).is_err());
    }

    #[test]
    fn round_trip_2d() {
        let g = GridSpec::new(2, 16, 5.0).unwrap();
        let sp = Spectral::new(&g).unwrap();
        let orig: Vec<Complex64> = (0..g.len())
            .map(|i| Complex64::new((i as f64).sin(), (0.3 * i as f64).cos()))
            .collect();
        let mut v = orig.clone();
        sp.forward(&mut v);
        sp.inverse(&mut v);
        for (a, b) in v.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn laplacian_of_plane_wave_3d() {
        let g = GridSpec::new(3, 8, 2.0 * PI).unwrap();
        let sp = Spectral::new(&g).unwrap();
        let u: Vec<Complex64> = g
            .points()
            .iter()
            .map(|x| Complex64::new(0.0, x[0] + 2.0 * x[1] - x[2]).exp())
            .collect();
        let lap = sp.laplacian(&u);
        for (l, v) in lap.iter().zip(&u) {
            assert!((l + 6.0 * v).norm() < 1e-11);
        }
        let dx = sp.partial(&u, 1);
        for (d, v) in dx.iter().zip(&u) {
            assert!((d - Complex64::new(0.0, 2.0) * v).norm() < 1e-11);
        }
        assert!((sp.grad_sq(&u) - 6.0 * sp.l2_sq(&u)).abs() < 1e-9);
    }

    #[test]
    fn coordinates_are_box_centred() {
        let g = GridSpec::new(1, 8, 4.0).unwrap().with_center(vec![1.0]).unwrap();
        let x = g.axis_coords(0);
        assert_eq!(x[0], -1.0);
        assert_eq!(x[4], 1.0);
    }
}
