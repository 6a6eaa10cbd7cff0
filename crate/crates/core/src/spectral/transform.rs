use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::SpectralGrid;

/// Planned forward/inverse transforms between stored coefficients
/// (`1/L`-normalised, ascending modes) and samples on `grid.points()`.
#[derive(Clone)]
pub struct Transform {
    grid: SpectralGrid,
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Transform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transform").field("grid", &self.grid).field("n", &self.n).finish()
    }
}

impl Transform {
    pub fn new(grid: &SpectralGrid) -> Self {
        let n = grid.fft_len();
        let mut planner = FftPlanner::new();
        Transform { grid: grid.clone(), n, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Coefficients to point values `u(x_j) = sum_m c_m e^{i xi_m x_j}`.
    pub fn to_physical(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut buf = self.spread(coeffs);
        self.inverse.process(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }

    /// Point values to all `2K + 1` coefficients, `c_m = (1/n) sum_j u_j e^{-i xi_m x_j}`.
    pub fn from_physical(&self, values: &[f64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.n);
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        self.gather(&buf)
    }

    /// Coefficients of the pointwise square, truncated to `|m| <= limit`.
    /// Exact (alias free) for inputs supported in `|m| <= dealias_cutoff`.
    pub fn square(&self, coeffs: &[Complex64], limit: usize) -> Vec<Complex64> {
        let mut buf = self.spread(coeffs);
        self.inverse.process(&mut buf);
        for z in buf.iter_mut() {
            *z = Complex64::new(z.re * z.re, 0.0);
        }
        self.forward.process(&mut buf);
        let mut out = self.gather(&buf);
        let k = self.grid.modes() as i64;
        for m in -k..=k {
            if m.unsigned_abs() as usize > limit {
                out[self.grid.slot(m)] = Complex64::new(0.0, 0.0);
            }
        }
        out
    }

    fn spread(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(coeffs.len(), self.grid.len());
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n];
        let k = self.grid.modes() as i64;
        for m in -k..=k {
            buf[m.rem_euclid(self.n as i64) as usize] = coeffs[self.grid.slot(m)];
        }
        buf
    }

    fn gather(&self, buf: &[Complex64]) -> Vec<Complex64> {
        let scale = 1.0 / self.n as f64;
        let k = self.grid.modes() as i64;
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for m in -k..=k {
            let z = buf[m.rem_euclid(self.n as i64) as usize] * scale;
            out[self.grid.slot(m)] = z;
        }
        // exact conjugate symmetry for real input
        out[self.grid.slot(0)].im = 0.0;
        for m in 1..=k {
            let avg = 0.5 * (out[self.grid.slot(m)] + out[self.grid.slot(-m)].conj());
            out[self.grid.slot(m)] = avg;
            out[self.grid.slot(-m)] = avg.conj();
        }
        out
    }
}
