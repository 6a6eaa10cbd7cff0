use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{dispersion_symbol, Transform};

use super::solver::nonlinear_coeffs;
use super::trajectory::Trajectory;

/// Largest `L^2` norm over recorded times of
/// `u(t) - W(t) u_0 + int_0^t W(t - s) (u^2)_x(s) ds`,
/// with the integral evaluated by the trapezoid rule on the recorded times.
pub fn duhamel_residual(traj: &Trajectory) -> Result<f64> {
    if traj.len() < 3 {
        return Err(Error::InsufficientSamples { needed: 3, got: traj.len() });
    }
    let grid = traj.grid();
    let params = traj.params();
    let cfg = traj.config();
    let tr = Transform::new(grid);
    let limit = if cfg.dealias { grid.dealias_cutoff() } else { grid.modes() };
    let k = grid.modes() as i64;
    let n = grid.len();
    let p: Vec<f64> = (-k..=k).map(|m| dispersion_symbol(params, grid.wavenumber(m))).collect();

    // Work in the interaction picture: v(t) = W(-t) u(t), g(t) = W(-t) N(u(t)),
    // so that v(t) - v(0) - int_0^t g = 0 and the norm is unchanged by W(t).
    let pull_back = |t: f64, c: &[Complex64]| -> Vec<Complex64> {
        c.iter().zip(&p).map(|(z, &pm)| z * Complex64::from_polar(1.0, -t * pm)).collect()
    };
    let integrand = |t: f64, c: &[Complex64]| -> Vec<Complex64> {
        if cfg.nonlinear {
            pull_back(t, &nonlinear_coeffs(&tr, c, limit))
        } else {
            vec![Complex64::new(0.0, 0.0); n]
        }
    };

    let times = traj.times();
    let states = traj.states();
    let v0 = pull_back(times[0], states[0].coeffs());
    let mut g_prev = integrand(times[0], states[0].coeffs());
    let mut integral = vec![Complex64::new(0.0, 0.0); n];
    let mut worst = 0.0f64;
    for i in 1..states.len() {
        let h = times[i] - times[i - 1];
        let g = integrand(times[i], states[i].coeffs());
        for j in 0..n {
            integral[j] += 0.5 * h * (g_prev[j] + g[j]);
        }
        let v = pull_back(times[i], states[i].coeffs());
        let r: f64 = (0..n).map(|j| (v[j] - v0[j] - integral[j]).norm_sqr()).sum();
        worst = worst.max((grid.length() * r).sqrt());
        g_prev = g;
    }
    Ok(worst)
}
