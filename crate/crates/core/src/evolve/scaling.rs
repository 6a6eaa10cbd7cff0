use crate::error::{Error, Result};
use crate::spectral::{RealField, SpectralGrid, SymbolParams};

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::ScaleMismatch { lambda, reason: "scale must be positive and finite".into() })
    }
}

/// `lambda^2 u(lambda x)` on the grid of period `L / lambda` with the same modes.
pub fn rescale_field(u: &RealField, lambda: f64) -> Result<RealField> {
    check_lambda(lambda)?;
    let grid = u.grid().rescaled(lambda)?;
    u.scaled(lambda * lambda).with_grid(grid)
}

/// `(lambda alpha, beta, lambda^2 gamma)`.
pub fn rescale_params(params: &SymbolParams, lambda: f64) -> SymbolParams {
    params.rescaled(lambda)
}

/// `lambda^2 u(lambda x)` resampled onto `target`, whose period must be an integer
/// multiple of `L / lambda`; every active mode must land inside the target's dealias cutoff.
pub fn rescale_onto(u: &RealField, lambda: f64, target: &SpectralGrid) -> Result<RealField> {
    check_lambda(lambda)?;
    let ratio = target.length() * lambda / u.grid().length();
    let r = ratio.round();
    if r < 1.0 || (ratio - r).abs() > 1e-9 * ratio {
        return Err(Error::ScaleMismatch {
            lambda,
            reason: format!("target period is {ratio} times the rescaled period, not an integer multiple"),
        });
    }
    let r = r as i64;
    let support = u.support_radius() as i64;
    if support * r > target.dealias_cutoff() as i64 {
        return Err(Error::ScaleMismatch {
            lambda,
            reason: format!(
                "active mode {support} maps to {} beyond the target cutoff {}",
                support * r,
                target.dealias_cutoff()
            ),
        });
    }
    let mut out = RealField::zeros(target);
    for m in 0..=support {
        out.set_mode(m * r, u.coeff(m) * (lambda * lambda));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::spectral::{random_gaussian, sobolev_norm};

    #[test]
    fn unit_scale_is_identity() {
        let g = SpectralGrid::new(16, 5.0).unwrap();
        let u = random_gaussian(&g, 10, &mut seeded(1, 0));
        assert_eq!(rescale_field(&u, 1.0).unwrap(), u);
        let p = SymbolParams::new(0.4, 1.0, 0.7).unwrap();
        assert_eq!(rescale_params(&p, 1.0), p);
    }

    #[test]
    fn sobolev_scaling_inequality() {
        let g = SpectralGrid::new(64, 20.0).unwrap();
        for seed in 0..10 {
            let u = random_gaussian(&g, 40, &mut seeded(seed, 3));
            for lambda in [0.9, 0.5, 0.1, 0.01] {
                let s = -0.75;
                let lhs = sobolev_norm(&rescale_field(&u, lambda).unwrap(), s);
                let rhs = (lambda.powf(s + 1.5) + lambda.powf(1.5)) * sobolev_norm(&u, s);
                assert!(lhs <= rhs, "lambda {lambda}: {lhs} > {rhs}");
            }
        }
    }

    #[test]
    fn resampling_requires_integer_ratio_and_room() {
        let g = SpectralGrid::new(32, 10.0).unwrap();
        let u = random_gaussian(&g, 8, &mut seeded(2, 0));
        let target = SpectralGrid::new(64, 40.0).unwrap();
        let v = rescale_onto(&u, 0.5, &target).unwrap();
        assert_eq!(v.coeff(16), u.coeff(8) * 0.25);
        assert!(matches!(rescale_onto(&u, 0.3, &target), Err(Error::ScaleMismatch { .. })));
        assert!(matches!(rescale_onto(&u, 0.125, &target), Err(Error::ScaleMismatch { .. })));
        assert!(rescale_field(&u, -1.0).is_err());
    }
}
