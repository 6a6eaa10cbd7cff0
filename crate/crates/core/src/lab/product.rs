use std::collections::HashMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::report::{BoundCheckReport, WorstCase};
use super::strichartz::unit_time_integral;
use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::spectral::SymbolParams;

/// Modes per input function.
pub const PRODUCT_MODES: usize = 12;

/// One free wave on the `2 pi` torus as `(integer mode, coefficient)` pairs.
pub type Wave = Vec<(i64, Complex64)>;

/// `int_0^1 int_0^{2 pi} prod_i W(t) phi_i dx dt` for five free waves.
///
/// Only mode quintets with `sum m_i = 0` contribute; each contributes
/// `2 pi prod c_i int_0^1 e^{i t sum p(m_i)} dt`.
pub fn quintet_integral(params: &SymbolParams, waves: &[Wave; 5]) -> Complex64 {
    let last: HashMap<i64, Complex64> = waves[4].iter().copied().collect();
    let mut total = Complex64::new(0.0, 0.0);
    for &(m1, c1) in &waves[0] {
        for &(m2, c2) in &waves[1] {
            for &(m3, c3) in &waves[2] {
                for &(m4, c4) in &waves[3] {
                    let m5 = -(m1 + m2 + m3 + m4);
                    if let Some(&c5) = last.get(&m5) {
                        let omega: f64 = [m1, m2, m3, m4, m5].iter().map(|&m| params.p(m as f64)).sum();
                        total += c1 * c2 * c3 * c4 * c5 * unit_time_integral(omega);
                    }
                }
            }
        }
    }
    total * TAU
}

/// `2^{(5/12)(k_1+k_2+k_3)} 2^{-k_4-k_5}`.
pub fn product_bound(ks: [u32; 5]) -> f64 {
    let low = (ks[0] + ks[1] + ks[2]) as f64;
    2f64.powf(5.0 / 12.0 * low - (ks[3] + ks[4]) as f64)
}

/// Positive half of `I_k`; the zero mode is left out of `I_0` since it makes
/// every quintet with `m_1 = m_2 = m_3 = 0` exactly resonant on the torus.
fn band(k: u32) -> (i64, i64) {
    if k == 0 {
        (1, 2)
    } else {
        (1 << (k - 1), 1 << (k + 1))
    }
}

fn gaussian_wave<R: Rng>(modes: Vec<i64>, rng: &mut R) -> Wave {
    let mut w: Wave = modes
        .into_iter()
        .map(|m| (m, Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))))
        .collect();
    let norm = (TAU * w.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>()).sqrt();
    for (_, c) in &mut w {
        *c /= norm;
    }
    w
}

/// A random quintet: inputs 1 to 4 on the positive halves of their bands, input 5
/// on the negative half of `I_{k_5}` at modes reachable as `-(m_1 + ... + m_4)`.
/// Every input has unit `L^2` norm.
pub fn random_quintet<R: Rng>(ks: [u32; 5], count: usize, rng: &mut R) -> [Wave; 5] {
    let mut supports: Vec<Vec<i64>> = ks[..4]
        .iter()
        .map(|&k| {
            let (lo, hi) = band(k);
            let width = (hi - lo + 1) as usize;
            sample(rng, width, count.min(width)).into_iter().map(|i| lo + i as i64).collect()
        })
        .collect();
    let (lo5, hi5) = band(ks[4]);
    let mut reachable = Vec::new();
    for &a in &supports[0] {
        for &b in &supports[1] {
            for &c in &supports[2] {
                for &d in &supports[3] {
                    let s = a + b + c + d;
                    if (lo5..=hi5).contains(&s) {
                        reachable.push(-s);
                    }
                }
            }
        }
    }
    reachable.sort_unstable();
    reachable.dedup();
    let last = if reachable.is_empty() {
        vec![-lo5]
    } else {
        let picks = sample(rng, reachable.len(), count.min(reachable.len()));
        picks.into_iter().map(|i| reachable[i]).collect()
    };
    supports.push(last);
    let mut waves = supports.into_iter().map(|s| gaussian_wave(s, rng));
    std::array::from_fn(|_| waves.next().expect("five supports"))
}

/// Random localized free-wave quintets against `2^{(5/12)(k_1+k_2+k_3)} 2^{-k_4-k_5}`.
///
/// Frequencies are taken on the integer lattice of the `2 pi` torus, so this is a
/// trend-level check: compare `details["mean_integral"]` across `k_4, k_5`.
pub fn product_estimate_probe(
    params: &SymbolParams,
    ks: [u32; 5],
    trials: usize,
    seed: u64,
) -> Result<BoundCheckReport> {
    if ks.windows(2).any(|w| w[0] > w[1]) || ks[3] < 10 || ks[4] > 24 {
        return Err(Error::invalid(format!("need 0 <= k1 <= ... <= k5 <= 24 and k4 >= 10, got {ks:?}")));
    }
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let waves = random_quintet(ks, PRODUCT_MODES, &mut seeded(seed, t as u64));
            quintet_integral(params, &waves).norm()
        })
        .collect();
    let bound = product_bound(ks);
    let mut report =
        BoundCheckReport::trend(format!("product-{}-{}-{}-{}-{}", ks[0], ks[1], ks[2], ks[3], ks[4]), seed)
            .with_budget("trials", trials as f64)
            .with_budget("modes", PRODUCT_MODES as f64);
    for &v in &values {
        report.record(v / bound, || WorstCase::Tuple(ks.iter().map(|&k| k as f64).collect()));
    }
    let mean = values.iter().sum::<f64>() / trials as f64;
    report.detail("mean_integral", mean);
    report.detail("mean_ratio", mean / bound);
    report.detail("bound", bound);
    Ok(report)
}
