use rayon::prelude::*;

use super::report::{BoundCheckReport, WorstCase};
use crate::error::{Error, Result};
use crate::imethod::{e2, Corrections, EnergyFunctionals, IMultiplier};
use crate::rng::seeded;
use crate::spectral::{random_power_law, RealField, SpectralGrid, SymbolParams};

/// Constant for `|E4 - E2| <= C (||Iu||^3 + ||Iu||^4)`, fitted on seeded fields with a margin.
pub const EDIFF_CONSTANT: f64 = 1e-3;

/// Amplitudes `||I u||` at which every field is evaluated.
pub const EDIFF_AMPLITUDES: [f64; 5] = [1e-2, 3e-2, 1e-1, 3e-1, 1.0];

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    cov / var
}

/// Field family of the check: random phases, `|c| ~ <xi>^{-1/2}` on `1 <= |m| <= K/4`,
/// scaled to `||I u|| = 1`.
pub fn ediff_field(im: &IMultiplier, grid: &SpectralGrid, seed: u64, index: u64) -> RealField {
    let u = random_power_law(grid, grid.modes() / 4, 0.5, 1.0, &mut seeded(seed, index));
    let norm = e2(im, &u).sqrt();
    u.scaled(1.0 / norm)
}

/// Per-field cubic and quartic corrections at each amplitude.
#[derive(Clone, Debug)]
struct FieldSample {
    lambda3: Vec<f64>,
    lambda4: Vec<f64>,
}

/// Checks `|E_I^4 - E_I^2| <= C (||Iu||^3 + ||Iu||^4)` over `fields` seeded random fields,
/// each evaluated at the amplitudes [`EDIFF_AMPLITUDES`].
///
/// `details` carries the smallest log-log slopes of `|Lambda_3(sigma3)|` and
/// `|Lambda_4(sigma4)|` against the amplitude (3 and 4 for exact homogeneity).
pub fn ediff_check(
    im: IMultiplier,
    params: &SymbolParams,
    grid: &SpectralGrid,
    fields: usize,
    seed: u64,
) -> Result<BoundCheckReport> {
    if fields == 0 {
        return Err(Error::invalid("ediff_check needs at least one field"));
    }
    let corr = Corrections::new(im, params)?.tabulated(grid, 4 * grid.modes());
    let f = EnergyFunctionals::new(&corr);
    let samples: Vec<FieldSample> = (0..fields as u64)
        .into_par_iter()
        .map(|i| {
            let base = ediff_field(&im, grid, seed, i);
            let mut s = FieldSample { lambda3: vec![], lambda4: vec![] };
            for &a in &EDIFF_AMPLITUDES {
                let u = base.scaled(a);
                s.lambda3.push(f.lambda3_sigma3(&u).re);
                s.lambda4.push(f.lambda4_sigma4(&u).re);
            }
            s
        })
        .collect();
    let mut report =
        BoundCheckReport::new("e4-minus-e2", seed, EDIFF_CONSTANT).with_budget("fields", fields as f64).with_grid(grid);
    let mut slope3 = f64::INFINITY;
    let mut slope4 = f64::INFINITY;
    for s in &samples {
        for (i, &a) in EDIFF_AMPLITUDES.iter().enumerate() {
            let diff = (s.lambda3[i] + s.lambda4[i]).abs();
            report.record(diff / (a.powi(3) + a.powi(4)), || WorstCase::Parameter(a));
        }
        let abs3: Vec<f64> = s.lambda3.iter().map(|v| v.abs()).collect();
        let abs4: Vec<f64> = s.lambda4.iter().map(|v| v.abs()).collect();
        if abs3.iter().all(|v| *v > 0.0) {
            slope3 = slope3.min(log_slope(&EDIFF_AMPLITUDES, &abs3));
        }
        if abs4.iter().all(|v| *v > 0.0) {
            slope4 = slope4.min(log_slope(&EDIFF_AMPLITUDES, &abs4));
        }
    }
    report.detail("cubic_slope_min", slope3);
    report.detail("quartic_slope_min", slope4);
    report.detail("n", im.n());
    report.detail("s", im.s());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powi(3)).collect();
        assert!((log_slope(&x, &y) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn small_check_is_homogeneous() {
        let g = SpectralGrid::new(32, 2.0 * std::f64::consts::PI).unwrap();
        let p = SymbolParams::new(0.5, 1.0, 0.0).unwrap();
        let im = IMultiplier::new(2.0, -0.75).unwrap();
        let r = ediff_check(im, &p, &g, 4, 3).unwrap();
        assert!((r.details["cubic_slope_min"] - 3.0).abs() < 1e-9);
        assert!((r.details["quartic_slope_min"] - 4.0).abs() < 1e-9);
        assert!(r.fitted_constant > 0.0);
    }
}
