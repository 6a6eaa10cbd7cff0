use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default smallness parameter.
pub const DEFAULT_EPS0: f64 = 0.05;

/// Largest dyadic exponent tried when solving for `N`.
const MAX_DYADIC_EXPONENT: u32 = 60;

/// Scaling and iteration parameters for reaching time `T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GwpPlan {
    pub t_target: f64,
    pub s: f64,
    pub phi_norm: f64,
    pub eps0: f64,
    pub n: f64,
    pub lambda: f64,
    /// Unit steps of the rescaled problem, `ceil(lambda^{-3} T)`.
    pub steps: usize,
}

fn rational(s: f64) -> Result<Ratio<i64>> {
    Ratio::approximate_float(s).ok_or_else(|| Error::invalid(format!("cannot represent s = {s} as a ratio")))
}

fn check_regularity(s: f64) -> Result<()> {
    if !s.is_finite() {
        return Err(Error::invalid("s must be finite"));
    }
    if s < -0.75 {
        return Err(Error::InfeasiblePlan(format!("s = {s} is below -3/4")));
    }
    if s > 0.0 {
        return Err(Error::invalid(format!("s = {s} is above 0")));
    }
    Ok(())
}

/// Exponent of `T` in `N(T)`: `4 (3 + 2s) / (45 + 54s)`.
pub fn n_exponent(s: f64) -> Result<Ratio<i64>> {
    check_regularity(s)?;
    let s = rational(s)?;
    let two = Ratio::from_integer(2);
    Ok(Ratio::from_integer(4) * (Ratio::from_integer(3) + two * s)
        / (Ratio::from_integer(45) + Ratio::from_integer(54) * s))
}

/// Exponent of `N` in `lambda(N)`: `2s / (3 + 2s)`.
pub fn lambda_exponent(s: f64) -> Result<Ratio<i64>> {
    check_regularity(s)?;
    let s = rational(s)?;
    let two = Ratio::from_integer(2);
    Ok(two * s / (Ratio::from_integer(3) + two * s))
}

/// `lambda = (eps0 / (N^{-s} ||phi||_{H^s}))^{2 / (3 + 2s)}`, capped at 1.
pub fn scaling_lambda(n: f64, s: f64, phi_norm: f64, eps0: f64) -> f64 {
    if phi_norm == 0.0 {
        return 1.0;
    }
    let lambda = (eps0 / (n.powf(-s) * phi_norm)).powf(2.0 / (3.0 + 2.0 * s));
    lambda.min(1.0)
}

fn validate(t: f64, s: f64, phi_norm: f64, eps0: f64) -> Result<()> {
    check_regularity(s)?;
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::invalid("target time must be positive"));
    }
    if !(eps0 > 0.0 && eps0 < 1.0) {
        return Err(Error::invalid("eps0 must lie in (0, 1)"));
    }
    if !(phi_norm.is_finite() && phi_norm >= 0.0) {
        return Err(Error::invalid("data norm must be finite and nonnegative"));
    }
    Ok(())
}

impl GwpPlan {
    /// Plan with a prescribed `N`; `lambda` and `M` follow from it.
    pub fn with_n(t: f64, s: f64, phi_norm: f64, eps0: f64, n: f64) -> Result<GwpPlan> {
        validate(t, s, phi_norm, eps0)?;
        if !(n.is_finite() && n >= 1.0) {
            return Err(Error::invalid("N must be at least 1"));
        }
        let lambda = scaling_lambda(n, s, phi_norm, eps0);
        let steps = (t / lambda.powi(3)).ceil() as usize;
        Ok(GwpPlan { t_target: t, s, phi_norm, eps0, n, lambda, steps })
    }

    /// Rescaled time horizon `lambda^{-3} T`.
    pub fn rescaled_time(&self) -> f64 {
        self.t_target / self.lambda.powi(3)
    }

    /// Whether `N^{15/4} > lambda^{-3} T`.
    pub fn satisfies_increment_budget(&self) -> bool {
        self.n.powf(3.75) > self.rescaled_time()
    }

    /// `eps0^5 N^{-15/4}`, the scale of one unit-step increment of `E_I^4`.
    pub fn increment_scale(&self) -> f64 {
        self.eps0.powi(5) * self.n.powf(-3.75)
    }
}

/// Smallest dyadic `N` with `N^{15/4} > lambda(N)^{-3} T`, found by bisection on the exponent.
pub fn select_scaling(t: f64, s: f64, phi_norm: f64, eps0: f64) -> Result<GwpPlan> {
    validate(t, s, phi_norm, eps0)?;
    let holds =
        |e: u32| GwpPlan::with_n(t, s, phi_norm, eps0, 2f64.powi(e as i32)).map(|p| p.satisfies_increment_budget());
    if !holds(MAX_DYADIC_EXPONENT)? {
        return Err(Error::InfeasiblePlan(format!("no dyadic N up to 2^{MAX_DYADIC_EXPONENT} reaches T = {t}")));
    }
    let (mut lo, mut hi) = (0u32, MAX_DYADIC_EXPONENT);
    if holds(lo)? {
        hi = lo;
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if holds(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let plan = GwpPlan::with_n(t, s, phi_norm, eps0, 2f64.powi(hi as i32))?;
    if !(plan.satisfies_increment_budget() && plan.lambda > 0.0 && plan.lambda <= 1.0) {
        return Err(Error::InfeasiblePlan(format!("selected plan violates its constraints: {plan:?}")));
    }
    Ok(plan)
}
