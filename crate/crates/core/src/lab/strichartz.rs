use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{BoundCheckReport, WorstCase};
use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::spectral::SymbolParams;

/// Spatial sample points used for the sup and the `L^p_x` quadratures.
pub const STRICHARTZ_X_SAMPLES: usize = 512;
/// Time samples on `[0, 1]` used for the maximal functions.
pub const STRICHARTZ_T_SAMPLES: usize = 512;
/// Random modes per trial function.
pub const STRICHARTZ_MODES: usize = 32;

/// Mixed norms of a free wave `W(t) phi` over `x in [0, L)`, `t in [0, 1]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MixedNorms {
    /// `||W(t) phi||_{L_x^inf L_t^2}`, time integral exact, sup over the x samples.
    pub smoothing: f64,
    /// `||W(t) phi||_{L_x^2 L_t^inf}`, sup over the t samples.
    pub maximal_l2: f64,
    /// `||W(t) phi||_{L_x^4 L_t^inf}`, sup over the t samples.
    pub maximal_l4: f64,
}

/// `int_0^1 e^{i w t} dt`.
pub(crate) fn unit_time_integral(w: f64) -> Complex64 {
    if w.abs() < 1e-6 {
        Complex64::new(1.0 - w * w / 6.0, w / 2.0)
    } else {
        (Complex64::from_polar(1.0, w) - 1.0) / Complex64::new(0.0, w)
    }
}

/// Mixed norms of `w(x, t) = sum_m c_m e^{i (xi_m x + p(xi_m) t)}` on a torus of length `length`.
///
/// `modes` holds `(xi, c)` pairs. The `L_t^2` integral uses the exact Gram
/// matrix of the time exponentials; the maximal norms sample `t` uniformly,
/// so all three values are lower estimates of the continuum sup.
pub fn free_mixed_norms(
    params: &SymbolParams,
    length: f64,
    modes: &[(f64, Complex64)],
    nx: usize,
    nt: usize,
) -> MixedNorms {
    if modes.iter().all(|(_, c)| *c == Complex64::new(0.0, 0.0)) {
        return MixedNorms::default();
    }
    let p: Vec<f64> = modes.iter().map(|(xi, _)| params.p(*xi)).collect();
    let n = modes.len();
    let mut gram = vec![Complex64::new(0.0, 0.0); n * n];
    for a in 0..n {
        for b in 0..n {
            gram[a * n + b] = modes[a].1 * modes[b].1.conj() * unit_time_integral(p[a] - p[b]);
        }
    }
    let xs: Vec<f64> = (0..nx).map(|i| length * i as f64 / nx as f64).collect();
    let smoothing = xs
        .par_iter()
        .map(|&x| {
            let e: Vec<Complex64> = modes.iter().map(|(xi, _)| Complex64::from_polar(1.0, xi * x)).collect();
            let mut q = 0.0;
            for a in 0..n {
                for b in 0..n {
                    q += (gram[a * n + b] * e[a] * e[b].conj()).re;
                }
            }
            q.max(0.0).sqrt()
        })
        .reduce(|| 0.0, f64::max);
    let sup_t: Vec<f64> = xs
        .par_iter()
        .map(|&x| {
            let base: Vec<Complex64> = modes.iter().map(|(xi, c)| c * Complex64::from_polar(1.0, xi * x)).collect();
            (0..=nt)
                .map(|q| {
                    let t = q as f64 / nt as f64;
                    base.iter().zip(&p).map(|(b, pk)| b * Complex64::from_polar(1.0, pk * t)).sum::<Complex64>().norm()
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let h = length / nx as f64;
    MixedNorms {
        smoothing,
        maximal_l2: (h * sup_t.iter().map(|v| v * v).sum::<f64>()).sqrt(),
        maximal_l4: (h * sup_t.iter().map(|v| v.powi(4)).sum::<f64>()).powf(0.25),
    }
}

/// Gaussian coefficients on `count` distinct integer modes of `I_k` (random signs),
/// normalised to unit `L^2` norm on the `2 pi` torus.
pub fn random_band_modes<R: Rng>(k: u32, count: usize, rng: &mut R) -> Vec<(f64, Complex64)> {
    let lo = 1usize << (k - 1);
    let width = 3 * lo + 1;
    let picks = sample(rng, width, count.min(width)).into_vec();
    let mut modes: Vec<(f64, Complex64)> = picks
        .into_iter()
        .map(|i| {
            let m = (lo + i) as f64;
            let xi = if rng.random::<bool>() { m } else { -m };
            let c = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            (xi, c)
        })
        .collect();
    let norm = (TAU * modes.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>()).sqrt();
    for (_, c) in &mut modes {
        *c /= norm;
    }
    modes
}

/// Free-evolution estimates on the `2 pi` torus for random unit data on `I_k`.
///
/// The recorded ratio is `||W(t) phi||_{L_x^inf L_t^2} / 2^{-k}`; the maximal-function
/// ratios against `2^{3k/4}` and `2^{k/4}` go to `details`. On a torus there is no
/// local smoothing, so these ratios are compared across `k` rather than to a constant.
pub fn strichartz_probe(params: &SymbolParams, k: u32, trials: usize, seed: u64) -> Result<BoundCheckReport> {
    if !(10..=24).contains(&k) {
        return Err(Error::invalid(format!("dyadic index {k} outside 10..=24")));
    }
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    let norms: Vec<MixedNorms> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let modes = random_band_modes(k, STRICHARTZ_MODES, &mut seeded(seed, t as u64));
            free_mixed_norms(params, TAU, &modes, STRICHARTZ_X_SAMPLES, STRICHARTZ_T_SAMPLES)
        })
        .collect();
    let scale = 2f64.powi(k as i32);
    let mut report = BoundCheckReport::trend(format!("strichartz-k{k}"), seed)
        .with_budget("trials", trials as f64)
        .with_budget("modes", STRICHARTZ_MODES as f64)
        .with_budget("x_samples", STRICHARTZ_X_SAMPLES as f64)
        .with_budget("t_samples", STRICHARTZ_T_SAMPLES as f64);
    for n in &norms {
        report.record(n.smoothing * scale, || WorstCase::Parameter(k as f64));
    }
    let mean = |f: fn(&MixedNorms) -> f64| norms.iter().map(f).sum::<f64>() / trials as f64;
    let max = |f: fn(&MixedNorms) -> f64| norms.iter().map(f).fold(0.0, f64::max);
    report.detail("k", k as f64);
    report.detail("smoothing_mean", mean(|n| n.smoothing));
    report.detail("maximal_l2_mean", mean(|n| n.maximal_l2));
    report.detail("maximal_l4_mean", mean(|n| n.maximal_l4));
    report.detail("maximal_l2_ratio", max(|n| n.maximal_l2) / scale.powf(0.75));
    report.detail("maximal_l4_ratio", max(|n| n.maximal_l4) / scale.powf(0.25));
    report.detail("torus_length", TAU);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_integral_matches_closed_form() {
        assert_eq!(unit_time_integral(0.0), Complex64::new(1.0, 0.0));
        let w: f64 = 3.0;
        let direct = Complex64::new(w.sin() / w, (1.0 - w.cos()) / w);
        assert!((unit_time_integral(w) - direct).norm() < 1e-15);
        let small = 1e-7;
        let series = unit_time_integral(small);
        assert!((series - Complex64::new(1.0, small / 2.0)).norm() < 1e-14);
    }

    #[test]
    fn single_mode_is_exact() {
        let p = SymbolParams::airy();
        let c = Complex64::new(0.3, -0.4);
        let n = free_mixed_norms(&p, TAU, &[(17.0, c)], 64, 64);
        assert!((n.smoothing - 0.5).abs() < 1e-14);
        assert!((n.maximal_l2 - 0.5 * TAU.sqrt()).abs() < 1e-13);
        assert!((n.maximal_l4 - 0.5 * TAU.powf(0.25)).abs() < 1e-13);
    }

    #[test]
    fn zero_field_gives_zero() {
        let p = SymbolParams::airy();
        let z = Complex64::new(0.0, 0.0);
        assert_eq!(free_mixed_norms(&p, TAU, &[(3.0, z), (5.0, z)], 16, 16), MixedNorms::default());
    }

    #[test]
    fn band_modes_are_normalised_and_localised() {
        let modes = random_band_modes(10, 32, &mut seeded(2, 0));
        assert_eq!(modes.len(), 32);
        let norm2: f64 = TAU * modes.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>();
        assert!((norm2 - 1.0).abs() < 1e-12);
        assert!(modes.iter().all(|(xi, _)| (512.0..=2048.0).contains(&xi.abs())));
    }

    #[test]
    fn smoothing_norm_tracks_half_within_factor_three() {
        let p = SymbolParams::airy();
        let a = strichartz_probe(&p, 10, 4, 11).unwrap();
        let b = strichartz_probe(&p, 11, 4, 11).unwrap();
        let r = b.details["smoothing_mean"] / a.details["smoothing_mean"];
        assert!(r > 0.5 / 3.0 && r < 0.5 * 3.0, "ratio {r}");
        assert_eq!(a.violations_at_c, 0);
    }
}
