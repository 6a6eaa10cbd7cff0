use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{SpectralGrid, SymbolParams};

use super::multiplier::{IMultiplier, SquaredSymbol, TabulatedSymbol};

/// Relative size below which a denominator counts as resonant.
pub const RESONANCE_EPS: f64 = 1e-12;

/// `v_k = i sum xi_j^3`, returned as the imaginary part.
pub fn v_k(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x * x * x).sum()
}

/// `h_k = i alpha sum xi_j |xi_j|`, returned as the imaginary part.
pub fn h_k(xs: &[f64], alpha: f64) -> f64 {
    alpha * xs.iter().map(|x| x * x.abs()).sum::<f64>()
}

fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

fn check_hyperplane(xs: &[f64]) -> Result<()> {
    let sum: f64 = xs.iter().sum();
    if sum.abs() > 1e-9 * max_abs(xs).max(1.0) {
        Err(Error::OffHyperplane { sum: sum.abs() })
    } else {
        Ok(())
    }
}

/// Correction multipliers of the modified energies.
///
/// With `c` the coupling of the quadratic term (the equation is
/// `u_t = ... - (c/2) (u^2)_x`), the multipliers are
/// `M3 = -i c [m(x1) m(x2+x3) (x2+x3)]_sym = (i c / 3) sum m^2(x_j) x_j`,
/// `sigma3 = M3 / (h3 - v3)`, `M4 = -i (3c/2) [sigma3(x1, x2, x3+x4)(x3+x4)]_sym`,
/// `sigma4 = M4 / (h4 - v4)` and `M5 = -i (2c) [sigma4(x1, x2, x3, x4+x5)(x4+x5)]_sym`.
/// The Benjamin equation as written here has `c = 2`.
///
/// The `*_value` methods never fail: resonant tuples give 0, and a product
/// `sigma(.., 0) * 0` is 0. The imaginary multipliers are returned as their
/// imaginary parts.
#[derive(Clone, Debug)]
pub struct Corrections<S = IMultiplier> {
    symbol: S,
    alpha: f64,
    coupling: f64,
    n: f64,
    pair_cutoff: f64,
}

impl Corrections<IMultiplier> {
    /// Requires normalised parameters (`beta = 1`, `|alpha| <= 1`).
    pub fn new(im: IMultiplier, params: &SymbolParams) -> Result<Self> {
        if params.beta != 1.0 || params.alpha.abs() > 1.0 {
            return Err(Error::invalid(format!(
                "corrections need beta = 1 and |alpha| <= 1, got beta = {}, alpha = {}",
                params.beta, params.alpha
            )));
        }
        Ok(Corrections { symbol: im, alpha: params.alpha, coupling: 2.0, n: im.n(), pair_cutoff: f64::INFINITY })
    }

    /// Same multipliers with `m^2` read from a lattice table.
    pub fn tabulated(&self, grid: &SpectralGrid, max_mode: usize) -> Corrections<TabulatedSymbol> {
        Corrections {
            symbol: self.symbol.tabulate(grid, max_mode),
            alpha: self.alpha,
            coupling: self.coupling,
            n: self.n,
            pair_cutoff: self.pair_cutoff,
        }
    }
}

impl<S: SquaredSymbol> Corrections<S> {
    /// Replaces the quadratic coupling (default 2).
    pub fn with_coupling(mut self, c: f64) -> Self {
        self.coupling = c;
        self
    }

    /// Drops pair sums with `|x_a + x_b| > cutoff` from `M4` and `M5`, matching a
    /// solver that truncates `u^2` at that wavenumber. Without it the discrete
    /// flow leaves a residual term in `d/dt E_I^4`.
    pub fn with_pair_cutoff(mut self, cutoff: f64) -> Self {
        self.pair_cutoff = cutoff;
        self
    }

    pub fn pair_cutoff(&self) -> f64 {
        self.pair_cutoff
    }

    #[inline]
    fn keeps(&self, eta: f64) -> bool {
        eta != 0.0 && eta.abs() <= self.pair_cutoff * (1.0 + 1e-12)
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn symbol(&self) -> &S {
        &self.symbol
    }

    /// `Im M3` on the hyperplane.
    #[inline]
    pub fn m3_value(&self, x: [f64; 3]) -> f64 {
        if max_abs(&x) <= self.n {
            return 0.0;
        }
        let s = &self.symbol;
        self.coupling / 3.0 * (s.m2(x[0]) * x[0] + s.m2(x[1]) * x[1] + s.m2(x[2]) * x[2])
    }

    /// `Im (h3 - v3) = -3 x1 x2 x3 (1 - 2 alpha / (3 |x|_max))`.
    #[inline]
    pub fn resonance3(&self, x: [f64; 3]) -> f64 {
        let mx = max_abs(&x);
        -3.0 * x[0] * x[1] * x[2] * (1.0 - 2.0 * self.alpha / (3.0 * mx))
    }

    #[inline]
    pub fn sigma3_value(&self, x: [f64; 3]) -> f64 {
        let mx = max_abs(&x);
        if mx <= self.n {
            return 0.0;
        }
        let den = self.resonance3(x);
        if den.abs() < RESONANCE_EPS * mx * mx * mx {
            return 0.0;
        }
        self.m3_value(x) / den
    }

    /// Whether every entry and every pair sum of `x` lies in the region where `m = 1`;
    /// there every `sigma3` factor of `M4` vanishes.
    #[inline]
    fn flat4(&self, x: &[f64; 4]) -> bool {
        max_abs(x) <= self.n
            && (x[0] + x[1]).abs() <= self.n
            && (x[0] + x[2]).abs() <= self.n
            && (x[0] + x[3]).abs() <= self.n
    }

    /// `Im M4`, symmetrised over the six pair groupings.
    #[inline]
    pub fn m4_value(&self, x: [f64; 4]) -> f64 {
        if self.flat4(&x) {
            return 0.0;
        }
        let mut acc = 0.0;
        for &(a, b, c, d) in &PAIRS4 {
            let eta = x[c] + x[d];
            if self.keeps(eta) {
                acc += self.sigma3_value([x[a], x[b], eta]) * eta;
            }
        }
        -1.5 * self.coupling * acc / 6.0
    }

    /// `Im (h4 - v4)`, using `sum x^3 = -3 (x1+x2)(x1+x3)(x2+x3)` on the hyperplane.
    #[inline]
    pub fn resonance4(&self, x: [f64; 4]) -> f64 {
        h_k(&x, self.alpha) + 3.0 * (x[0] + x[1]) * (x[0] + x[2]) * (x[1] + x[2])
    }

    #[inline]
    pub fn sigma4_value(&self, x: [f64; 4]) -> f64 {
        if self.flat4(&x) {
            return 0.0;
        }
        let mx = max_abs(&x);
        let den = self.resonance4(x);
        if den.abs() < RESONANCE_EPS * mx * mx * mx {
            return 0.0;
        }
        self.m4_value(x) / den
    }

    /// `Im M5`, symmetrised over the ten pair groupings.
    pub fn m5_value(&self, x: [f64; 5]) -> f64 {
        if max_abs(&x) <= self.n {
            let pair_max = PAIRS5.iter().map(|p| (x[p.3] + x[p.4]).abs()).fold(0.0f64, f64::max);
            if pair_max <= self.n {
                return 0.0;
            }
        }
        let mut acc = 0.0;
        for &(a, b, c, d, e) in &PAIRS5 {
            let eta = x[d] + x[e];
            if self.keeps(eta) {
                acc += self.sigma4_value([x[a], x[b], x[c], eta]) * eta;
            }
        }
        -2.0 * self.coupling * acc / 10.0
    }

    pub fn m3(&self, x: [f64; 3]) -> Result<Complex64> {
        check_hyperplane(&x)?;
        Ok(Complex64::new(0.0, self.m3_value(x)))
    }

    /// Fails with `ResonantDenominator` when some `x_j` vanishes above the flat region.
    pub fn sigma3(&self, x: [f64; 3]) -> Result<f64> {
        check_hyperplane(&x)?;
        let mx = max_abs(&x);
        if mx <= self.n {
            return Ok(0.0);
        }
        let den = self.resonance3(x);
        let threshold = RESONANCE_EPS * mx * mx * mx;
        if den.abs() < threshold {
            return Err(Error::ResonantDenominator { value: den.abs(), threshold });
        }
        Ok(self.m3_value(x) / den)
    }

    /// Fails when a single wavenumber vanishes above the flat region; a vanishing
    /// pair sum contributes 0.
    pub fn m4(&self, x: [f64; 4]) -> Result<Complex64> {
        check_hyperplane(&x)?;
        if !self.flat4(&x) {
            let threshold = RESONANCE_EPS * max_abs(&x);
            if let Some(z) = x.iter().find(|v| v.abs() < threshold) {
                return Err(Error::ResonantDenominator { value: z.abs(), threshold });
            }
        }
        Ok(Complex64::new(0.0, self.m4_value(x)))
    }

    pub fn sigma4(&self, x: [f64; 4]) -> Result<f64> {
        let m4 = self.m4(x)?;
        if self.flat4(&x) {
            return Ok(0.0);
        }
        let mx = max_abs(&x);
        let den = self.resonance4(x);
        let threshold = RESONANCE_EPS * mx * mx * mx;
        if den.abs() < threshold {
            return Err(Error::ResonantDenominator { value: den.abs(), threshold });
        }
        Ok(m4.im / den)
    }

    pub fn m5(&self, x: [f64; 5]) -> Result<Complex64> {
        check_hyperplane(&x)?;
        for &(a, b, c, d, e) in &PAIRS5 {
            let y = [x[a], x[b], x[c], x[d] + x[e]];
            let mx = max_abs(&y);
            if self.flat4(&y) || y[3] == 0.0 {
                continue;
            }
            let den = self.resonance4(y);
            let threshold = RESONANCE_EPS * mx * mx * mx;
            if den.abs() < threshold {
                return Err(Error::ResonantDenominator { value: den.abs(), threshold });
            }
        }
        Ok(Complex64::new(0.0, self.m5_value(x)))
    }
}

/// `(a, b, c, d)`: `sigma3(x_a, x_b, x_c + x_d)` for each unordered pair `{c, d}`.
pub(crate) const PAIRS4: [(usize, usize, usize, usize); 6] =
    [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2), (1, 2, 0, 3), (1, 3, 0, 2), (2, 3, 0, 1)];

/// `(a, b, c, d, e)`: `sigma4(x_a, x_b, x_c, x_d + x_e)` for each unordered pair `{d, e}`.
pub(crate) const PAIRS5: [(usize, usize, usize, usize, usize); 10] = [
    (2, 3, 4, 0, 1),
    (1, 3, 4, 0, 2),
    (1, 2, 4, 0, 3),
    (1, 2, 3, 0, 4),
    (0, 3, 4, 1, 2),
    (0, 2, 4, 1, 3),
    (0, 2, 3, 1, 4),
    (0, 1, 4, 2, 3),
    (0, 1, 3, 2, 4),
    (0, 1, 2, 3, 4),
];
