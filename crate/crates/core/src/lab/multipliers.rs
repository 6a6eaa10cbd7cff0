use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::report::{BoundCheckReport, WorstCase};
use crate::error::{Error, Result};
use crate::imethod::{Corrections, IMultiplier, SquaredSymbol};
use crate::imethod::{PAIRS4, PAIRS5};
use crate::rng::seeded;
use crate::spectral::SymbolParams;

/// The three pointwise multiplier bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplierBound {
    /// `|sigma3| <= C m^2(lambda) / mu^2` with `lambda`, `mu` the smallest and largest `|xi_i|`.
    Sigma3,
    /// `|M4| / |v4 - h4| <= C m^2(min(N_i, N_jk)) / prod (N + N_i)`.
    M4,
    /// `|M5| <= C [m^2(N_*45) N_45 / ((N + N_1)(N + N_2)(N + N_3)(N + N_45))]_sym`.
    M5,
}

impl MultiplierBound {
    pub fn arity(self) -> usize {
        match self {
            MultiplierBound::Sigma3 => 3,
            MultiplierBound::M4 => 4,
            MultiplierBound::M5 => 5,
        }
    }

    /// Constant fitted on seeded samples with `N = 8`, `s = -3/4`, `alpha = 1/2`, plus a margin.
    pub fn stored_constant(self) -> f64 {
        match self {
            MultiplierBound::Sigma3 => SIGMA3_CONSTANT,
            MultiplierBound::M4 => M4_CONSTANT,
            MultiplierBound::M5 => M5_CONSTANT,
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            MultiplierBound::Sigma3 => "sigma3-zeroth-order",
            MultiplierBound::M4 => "m4-over-resonance",
            MultiplierBound::M5 => "m5",
        }
    }

    /// `|value| / bound` at one hyperplane tuple.
    pub fn ratio<S: SquaredSymbol>(self, corr: &Corrections<S>, x: &[f64]) -> f64 {
        let m2 = |xi: f64| corr.symbol().m2(xi);
        let n = corr.symbol().flat_radius();
        let a: Vec<f64> = x.iter().map(|v| v.abs()).collect();
        match self {
            MultiplierBound::Sigma3 => {
                let v = corr.sigma3_value([x[0], x[1], x[2]]).abs();
                let lo = a.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = a.iter().cloned().fold(0.0, f64::max);
                v / (m2(lo) / (hi * hi))
            }
            MultiplierBound::M4 => {
                let v = corr.sigma4_value([x[0], x[1], x[2], x[3]]).abs();
                let mut lo = a.iter().cloned().fold(f64::INFINITY, f64::min);
                for &(p, q, _, _) in &PAIRS4 {
                    lo = lo.min((x[p] + x[q]).abs());
                }
                let den: f64 = a.iter().map(|v| n + v).product();
                v / (m2(lo) / den)
            }
            MultiplierBound::M5 => {
                let v = corr.m5_value([x[0], x[1], x[2], x[3], x[4]]).abs();
                let mut bound = 0.0;
                for &(p, q, r, d, e) in &PAIRS5 {
                    let n45 = (x[d] + x[e]).abs();
                    let lo = [a[p], a[q], a[r], n45, (x[p] + x[q]).abs(), (x[p] + x[r]).abs(), (x[q] + x[r]).abs()]
                        .into_iter()
                        .fold(f64::INFINITY, f64::min);
                    bound += m2(lo) * n45 / ((n + a[p]) * (n + a[q]) * (n + a[r]) * (n + n45));
                }
                bound /= PAIRS5.len() as f64;
                if v == 0.0 {
                    0.0
                } else {
                    v / bound
                }
            }
        }
    }
}

pub const SIGMA3_CONSTANT: f64 = 1.0;
pub const M4_CONSTANT: f64 = 2.0;
pub const M5_CONSTANT: f64 = 4.0;

fn magnitude<R: Rng>(lo: i64, hi: i64, rng: &mut R) -> i64 {
    let (a, b) = ((lo as f64).ln(), ((hi + 1) as f64).ln());
    ((a + rng.random::<f64>() * (b - a)).exp().floor() as i64).clamp(lo, hi)
}

fn signed<R: Rng>(x: i64, rng: &mut R) -> i64 {
    if rng.random::<bool>() {
        x
    } else {
        -x
    }
}

/// A random integer tuple on `sum = 0` with `1 <= |x_i| <= max_mode`.
///
/// A third of the draws are generic, a third contain a nearly cancelling pair and
/// a third cluster all entries around one magnitude, so that the near-resonant
/// corners are visited.
pub fn sample_hyperplane_tuple<R: Rng>(k: usize, max_mode: i64, rng: &mut R) -> Vec<f64> {
    loop {
        let mut x: Vec<i64> = Vec::with_capacity(k);
        match rng.random_range(0..3) {
            0 => {
                for _ in 0..k - 1 {
                    x.push(signed(magnitude(1, max_mode, rng), rng));
                }
            }
            1 => {
                let a = signed(magnitude(1, max_mode, rng), rng);
                let d = signed(magnitude(1, a.abs(), rng), rng);
                x.push(a);
                x.push(-a + d);
                for _ in 0..k.saturating_sub(3) {
                    x.push(signed(magnitude(1, max_mode, rng), rng));
                }
            }
            _ => {
                let b = magnitude(1, max_mode, rng);
                for _ in 0..k - 1 {
                    let d = magnitude(1, b.max(2) / 2, rng) * rng.random_range(0..2);
                    x.push(signed(b + d, rng));
                }
            }
        }
        x.truncate(k - 1);
        let last = -x.iter().sum::<i64>();
        if last == 0 || last.abs() > max_mode || x.iter().any(|v| *v == 0 || v.abs() > max_mode) {
            continue;
        }
        x.push(last);
        x.shuffle(rng);
        return x.into_iter().map(|v| v as f64).collect();
    }
}

/// Monte Carlo check of one multiplier bound on integer wavenumbers `|xi| <= max_mode`.
pub fn multiplier_bound_check(
    bound: MultiplierBound,
    im: IMultiplier,
    params: &SymbolParams,
    max_mode: usize,
    samples: usize,
    seed: u64,
) -> Result<BoundCheckReport> {
    if max_mode < 2 {
        return Err(Error::invalid("max_mode must be at least 2"));
    }
    let corr = Corrections::new(im, params)?;
    let mut rng = seeded(seed, bound.arity() as u64);
    let mut report = BoundCheckReport::new(bound.id(), seed, bound.stored_constant())
        .with_budget("samples", samples as f64)
        .with_budget("max_mode", max_mode as f64);
    for _ in 0..samples {
        let x = sample_hyperplane_tuple(bound.arity(), max_mode as i64, &mut rng);
        let r = bound.ratio(&corr, &x);
        report.record(r, || WorstCase::Tuple(x.clone()));
    }
    report.detail("n", im.n());
    report.detail("s", im.s());
    report.detail("alpha", params.alpha);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuples_lie_on_the_hyperplane() {
        let mut rng = seeded(1, 0);
        for k in 3..=5 {
            for _ in 0..2000 {
                let x = sample_hyperplane_tuple(k, 64, &mut rng);
                assert_eq!(x.len(), k);
                assert_eq!(x.iter().sum::<f64>(), 0.0);
                assert!(x.iter().all(|v| *v != 0.0 && v.abs() <= 64.0));
            }
        }
    }

    #[test]
    fn low_frequency_tuples_give_zero_ratio() {
        let p = SymbolParams::new(0.5, 1.0, 0.0).unwrap();
        let corr = Corrections::new(IMultiplier::new(8.0, -0.75).unwrap(), &p).unwrap();
        assert_eq!(MultiplierBound::Sigma3.ratio(&corr, &[1.0, 2.0, -3.0]), 0.0);
        assert_eq!(MultiplierBound::M4.ratio(&corr, &[1.0, 2.0, -4.0, 1.0]), 0.0);
        assert_eq!(MultiplierBound::M5.ratio(&corr, &[1.0, 2.0, -4.0, 1.0, 0.0]), 0.0);
    }

    #[test]
    fn deterministic_reports() {
        let p = SymbolParams::new(0.5, 1.0, 0.0).unwrap();
        let im = IMultiplier::new(8.0, -0.75).unwrap();
        let a = multiplier_bound_check(MultiplierBound::M4, im, &p, 64, 300, 7).unwrap();
        let b = multiplier_bound_check(MultiplierBound::M4, im, &p, 64, 300, 7).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }
}
