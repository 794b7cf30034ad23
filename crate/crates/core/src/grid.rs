//! Periodic spatial grids with spectral transforms (d = 1 or 3).

use crate::{C64, Error, Result};
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Uniform periodic grid on [0, L)^d with 2^k points per axis.
#[derive(Clone)]
pub struct SpatialGrid {
    pub dim: usize,
    pub points_per_axis: usize,
    pub length: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpatialGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpatialGrid")
            .field("dim", &self.dim)
            .field("points_per_axis", &self.points_per_axis)
            .field("length", &self.length)
            .finish()
    }
}

impl SpatialGrid {
    pub fn new(dim: usize, points_per_axis: usize, length: f64) -> Result<Self> {
        if dim != 1 && dim != 3 {
            return Err(Error::domain("SpatialGrid: dimension must be 1 or 3"));
        }
        if !points_per_axis.is_power_of_two() {
            return Err(Error::domain("SpatialGrid: points per axis must be a power of two"));
        }
        if length <= 0.0 {
            return Err(Error::domain("SpatialGrid: box length must be positive"));
        }
        let mut planner = FftPlanner::new();
        Ok(SpatialGrid {
            dim,
            points_per_axis,
            length,
            fwd: planner.plan_fft_forward(points_per_axis),
            inv: planner.plan_fft_inverse(points_per_axis),
        })
    }

    pub fn total_points(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn dx(&self) -> f64 {
        self.length / self.points_per_axis as f64
    }

    /// Volume element dx^d.
    pub fn dv(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    /// Coordinates along one axis.
    pub fn axis_coords(&self) -> Vec<f64> {
        (0..self.points_per_axis).map(|i| i as f64 * self.dx()).collect()
    }

    /// Angular wavenumber for FFT bin i along one axis.
    pub fn axis_wavenumber(&self, i: usize) -> f64 {
        let n = self.points_per_axis;
        let k = if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
        2.0 * std::f64::consts::PI * k / self.length
    }

    /// |k|^2 for every grid point in FFT layout.
    pub fn k_squared(&self) -> Vec<f64> {
        let n = self.points_per_axis;
        match self.dim {
            1 => (0..n).map(|i| self.axis_wavenumber(i).powi(2)).collect(),
            3 => {
                let ax: Vec<f64> = (0..n).map(|i| self.axis_wavenumber(i)).collect();
                let mut out = Vec::with_capacity(n * n * n);
                for i in 0..n {
                    for j in 0..n {
                        for l in 0..n {
                            out.push(ax[i] * ax[i] + ax[j] * ax[j] + ax[l] * ax[l]);
                        }
                    }
                }
                out
            }
            _ => unreachable!(),
        }
    }

    /// In-place forward FFT (unnormalized).
    pub fn fft_forward(&self, data: &mut [C64]) {
        self.fft(data, true)
    }

    /// In-place inverse FFT, normalized by 1/total_points.
    pub fn fft_inverse(&self, data: &mut [C64]) {
        self.fft(data, false);
        let scale = 1.0 / self.total_points() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    fn fft(&self, data: &mut [C64], forward: bool) {
        let n = self.points_per_axis;
        assert_eq!(data.len(), self.total_points());
        let plan = if forward { &self.fwd } else { &self.inv };
        match self.dim {
            1 => plan.process(data),
            3 => {
                // Axis 2 (contiguous rows).
                for chunk in data.chunks_exact_mut(n) {
                    plan.process(chunk);
                }
                // Axes 0 and 1 via gather/scatter.
                let mut buf = vec![C64::default(); n];
                for i in 0..n {
                    for l in 0..n {
                        for j in 0..n {
                            buf[j] = data[(i * n + j) * n + l];
                        }
                        plan.process(&mut buf);
                        for j in 0..n {
                            data[(i * n + j) * n + l] = buf[j];
                        }
                    }
                }
                for j in 0..n {
                    for l in 0..n {
                        for i in 0..n {
                            buf[i] = data[(i * n + j) * n + l];
                        }
                        plan.process(&mut buf);
                        for i in 0..n {
                            data[(i * n + j) * n + l] = buf[i];
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
    }

    /// Discrete L2 norm: sqrt(sum |psi|^2 dv).
    pub fn l2_norm(&self, psi: &[C64]) -> f64 {
        (psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.dv()).sqrt()
    }

    pub fn inner(&self, a: &[C64], b: &[C64]) -> C64 {
        let mut acc = C64::default();
        for (x, y) in a.iter().zip(b) {
            acc += x.conj() * y;
        }
        acc * self.dv()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fft_roundtrip_1d() {
        let g = SpatialGrid::new(1, 64, 4.0).unwrap();
        let mut data: Vec<C64> =
            (0..64).map(|i| C64::new((i as f64 * 0.3).sin(), (i as f64 * 0.11).cos())).collect();
        let orig = data.clone();
        g.fft_forward(&mut data);
        g.fft_inverse(&mut data);
        let err: f64 = data.iter().zip(&orig).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn fft_roundtrip_3d_and_planewave() {
        let g = SpatialGrid::new(3, 8, 2.0).unwrap();
        let n = 8;
        let k1 = g.axis_wavenumber(3);
        let mut data = vec![C64::default(); g.total_points()];
        let xs = g.axis_coords();
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    data[(i * n + j) * n + l] = C64::new(0.0, k1 * xs[j]).exp();
                }
            }
        }
        g.fft_forward(&mut data);
        // Only the (0, 3, 0) bin should be populated.
        let idx = (0 * n + 3) * n + 0;
        let total: f64 = data.iter().map(|z| z.norm()).sum();
        assert!((data[idx].norm() - total).abs() < 1e-6 * total);
    }

    #[test]
    fn parseval_norm() {
        let g = SpatialGrid::new(1, 128, 5.0).unwrap();
        let psi: Vec<C64> = (0..128).map(|i| C64::new((i as f64 * 0.2).cos(), 0.1)).collect();
        let n_x = g.l2_norm(&psi);
        let mut hat = psi.clone();
        g.fft_forward(&mut hat);
        let n_k = (hat.iter().map(|z| z.norm_sqr()).sum::<f64>() * g.dv() / g.total_points() as f64)
            .sqrt();
        assert!((n_x - n_k).abs() < 1e-12);
    }
}
