use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::RealField;
use crate::error::{Error, Result};

/// Coefficients of `u_t - gamma u_x + alpha H u_xx + beta u_xxx + (u^2)_x = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Set when built through [`SymbolParams::relaxed`] with `alpha * beta == 0`.
    #[serde(default)]
    pub degenerate: bool,
}

impl SymbolParams {
    /// Requires `alpha * beta != 0`.
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        check_finite(alpha, beta, gamma)?;
        if alpha * beta == 0.0 {
            return Err(Error::invalid(format!("need alpha * beta != 0 (alpha = {alpha}, beta = {beta})")));
        }
        Ok(SymbolParams { alpha, beta, gamma, degenerate: false })
    }

    /// Accepts any finite coefficients; a vanishing `alpha * beta` is flagged.
    pub fn relaxed(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        check_finite(alpha, beta, gamma)?;
        Ok(SymbolParams { alpha, beta, gamma, degenerate: alpha * beta == 0.0 })
    }

    /// Pure Airy dispersion `p = xi^3`.
    pub fn airy() -> Self {
        SymbolParams { alpha: 0.0, beta: 1.0, gamma: 0.0, degenerate: true }
    }

    /// Parameters of the rescaled problem: `(lambda alpha, beta, lambda^2 gamma)`.
    pub fn rescaled(&self, lambda: f64) -> SymbolParams {
        SymbolParams {
            alpha: lambda * self.alpha,
            beta: self.beta,
            gamma: lambda * lambda * self.gamma,
            degenerate: self.degenerate,
        }
    }

    /// Divides by `beta` (the substitution `v(x, t) = u(x, t / beta) / beta`),
    /// giving `(alpha / beta, 1, gamma / beta)`.
    pub fn normalized(&self) -> Result<SymbolParams> {
        if self.beta == 0.0 {
            return Err(Error::invalid("cannot normalise with beta = 0"));
        }
        Ok(SymbolParams {
            alpha: self.alpha / self.beta,
            beta: 1.0,
            gamma: self.gamma / self.beta,
            degenerate: self.degenerate,
        })
    }

    /// True when `beta = 1`, `|alpha| <= 1` and `|gamma| <= 1`.
    pub fn is_normalized(&self) -> bool {
        self.beta == 1.0 && self.alpha.abs() <= 1.0 && self.gamma.abs() <= 1.0
    }

    pub fn with_gamma(&self, gamma: f64) -> SymbolParams {
        SymbolParams { gamma, ..*self }
    }

    pub fn p(&self, xi: f64) -> f64 {
        dispersion_symbol(self, xi)
    }
}

fn check_finite(alpha: f64, beta: f64, gamma: f64) -> Result<()> {
    if [alpha, beta, gamma].iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid("symbol coefficients must be finite"))
    }
}

/// `p(xi) = beta xi^3 - alpha xi |xi| + gamma xi`.
#[inline]
pub fn dispersion_symbol(params: &SymbolParams, xi: f64) -> f64 {
    params.beta * xi * xi * xi - params.alpha * xi * xi.abs() + params.gamma * xi
}

/// Hilbert transform, symbol `-i sgn(xi)` with `sgn(0) = 0`.
pub fn hilbert_transform(f: &RealField) -> RealField {
    f.apply_symbol(|xi| if xi > 0.0 { Complex64::new(0.0, -1.0) } else { Complex64::new(0.0, 0.0) })
}

/// Free evolution `W(t)`: multiplies each coefficient by `exp(i t p(xi))`.
pub fn free_propagator(f: &RealField, t: f64, params: &SymbolParams) -> RealField {
    f.apply_symbol(|xi| Complex64::from_polar(1.0, t * dispersion_symbol(params, xi)))
}

/// `d/dx`, symbol `i xi`.
pub fn derivative(f: &RealField) -> RealField {
    f.apply_symbol(|xi| Complex64::new(0.0, xi))
}
