use rand::Rng;

use super::report::{BoundCheckReport, WorstCase};
use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::spectral::SymbolParams;

/// Allowed factor between `|sum p(xi_i)|` and `3 |xi_1 xi_2 xi_3|`.
pub const RESONANCE_FACTOR: f64 = 8.0;

/// `sum p(xi_i)` over a triple.
pub fn resonance_sum(params: &SymbolParams, xi: [f64; 3]) -> f64 {
    xi.iter().map(|&x| params.p(x)).sum()
}

fn log_uniform<R: Rng>(lo: f64, hi: f64, rng: &mut R) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi / lo).ln()).exp()
}

fn signed<R: Rng>(x: f64, rng: &mut R) -> f64 {
    if rng.random::<bool>() {
        x
    } else {
        -x
    }
}

/// Samples high-frequency triples on `{sum xi = 0, sum tau = 0}` and checks
///
/// * the pigeonhole bound `max |tau_i - p(xi_i)| >= |sum p(xi_i)| / 3`, which is exact,
/// * `|sum p(xi_i)|` within [`RESONANCE_FACTOR`] of `3 |xi_1 xi_2 xi_3|` (needs `beta = 1`, `|alpha| <= 1`).
///
/// The fitted constant is the largest of `r` and `1/r`, `r = |sum p| / (3 |xi_1 xi_2 xi_3|)`;
/// pigeonhole failures are reported in `details["pigeonhole_failures"]` and also
/// count as violations.
pub fn resonance_check(params: &SymbolParams, samples: usize, seed: u64) -> Result<BoundCheckReport> {
    if params.beta != 1.0 || params.alpha.abs() > 1.0 {
        return Err(Error::invalid("resonance check needs beta = 1 and |alpha| <= 1"));
    }
    let mut rng = seeded(seed, 0);
    let mut report = BoundCheckReport::new("resonance", seed, RESONANCE_FACTOR).with_budget("samples", samples as f64);
    let mut pigeonhole_failures = 0usize;
    while report.samples < samples {
        let a = signed(log_uniform(16.0, 4096.0, &mut rng), &mut rng);
        let b = signed(log_uniform(16.0, 4096.0, &mut rng), &mut rng);
        let xi = [a, b, -a - b];
        if xi[2].abs() < 16.0 {
            continue;
        }
        let total = resonance_sum(params, xi);
        let scale = total.abs().max(1.0);
        let s1 = signed(log_uniform(1e-3, 4.0, &mut rng), &mut rng) * scale;
        let s2 = signed(log_uniform(1e-3, 4.0, &mut rng), &mut rng) * scale;
        let tau1 = params.p(xi[0]) + s1;
        let tau2 = params.p(xi[1]) + s2;
        let tau = [tau1, tau2, -tau1 - tau2];
        let modulation = (0..3).map(|i| (tau[i] - params.p(xi[i])).abs()).fold(0.0, f64::max);
        let pigeonhole_ok = modulation >= total.abs() / 3.0 * (1.0 - 1e-12);
        if !pigeonhole_ok {
            pigeonhole_failures += 1;
        }
        let r = total.abs() / (3.0 * (xi[0] * xi[1] * xi[2]).abs());
        let ratio = if pigeonhole_ok { r.max(1.0 / r) } else { f64::INFINITY };
        report.record(ratio, || WorstCase::Tuple(xi.to_vec()));
    }
    report.detail("pigeonhole_failures", pigeonhole_failures as f64);
    report.detail("alpha", params.alpha);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imethod::{h_k, v_k};

    #[test]
    fn cubic_example() {
        let p = SymbolParams::airy();
        assert_eq!(resonance_sum(&p, [1.0, 2.0, -3.0]), -18.0);
        assert_eq!(3.0 * 1.0 * 2.0 * -3.0, -18.0);
    }

    #[test]
    fn hilbert_term_example() {
        let p = SymbolParams::new(1.0, 1.0, 0.0).unwrap();
        let x = [1.0, 2.0, -3.0];
        // sum p = Im(v3 - h3) computed independently.
        let expected = v_k(&x) - h_k(&x, 1.0);
        assert_eq!(expected, -14.0);
        assert_eq!(resonance_sum(&p, x), expected);
        assert!((18.0f64 / 14.0) < RESONANCE_FACTOR);
    }

    #[test]
    fn gamma_cancels_on_the_hyperplane() {
        let p = SymbolParams::new(0.5, 1.0, 0.0).unwrap();
        let q = p.with_gamma(7.0);
        let x = [5.0, -12.0, 7.0];
        assert!((resonance_sum(&p, x) - resonance_sum(&q, x)).abs() < 1e-9);
    }

    #[test]
    fn sampled_bounds_hold() {
        for alpha in [0.0, 0.5, -1.0] {
            let p = SymbolParams::relaxed(alpha, 1.0, 0.0).unwrap();
            let r = resonance_check(&p, 20_000, 4).unwrap();
            assert!(r.passed(), "{r:?}");
            assert_eq!(r.details["pigeonhole_failures"], 0.0);
        }
    }

    #[test]
    fn deterministic() {
        let p = SymbolParams::airy();
        let a = resonance_check(&p, 500, 9).unwrap().to_json().unwrap();
        let b = resonance_check(&p, 500, 9).unwrap().to_json().unwrap();
        assert_eq!(a, b);
    }
}
