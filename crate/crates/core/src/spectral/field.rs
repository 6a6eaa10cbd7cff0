use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::grid::SpectralGrid;
use super::transform::Transform;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A real periodic function held as Fourier coefficients
/// `c(xi) = (1/L) int_0^L u(x) e^{-i xi x} dx`, one per mode `-K..=K`.
///
/// Coefficients are kept exactly conjugate-symmetric, `c(-xi) = conj c(xi)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealField {
    grid: SpectralGrid,
    coeffs: Vec<Complex64>,
}

impl RealField {
    /// Validates length and conjugate symmetry (defect <= 1e-12 of the largest
    /// coefficient), then stores the exactly symmetrised coefficients.
    pub fn new(grid: SpectralGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::invalid(format!("expected {} coefficients, got {}", grid.len(), coeffs.len())));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::invalid("non-finite coefficient"));
        }
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let k = grid.modes() as i64;
        let mut defect = coeffs[grid.slot(0)].im.abs();
        for m in 1..=k {
            let d = (coeffs[grid.slot(m)] - coeffs[grid.slot(-m)].conj()).norm();
            defect = defect.max(d);
        }
        if defect > 1e-12 * scale.max(f64::MIN_POSITIVE) && defect > 0.0 {
            return Err(Error::NotConjugateSymmetric { defect });
        }
        let mut f = RealField { grid, coeffs };
        f.symmetrize();
        Ok(f)
    }

    pub fn zeros(grid: &SpectralGrid) -> Self {
        RealField { grid: grid.clone(), coeffs: vec![ZERO; grid.len()] }
    }

    /// Builds from coefficients on `m >= 0`; the negative side is mirrored.
    pub fn from_nonnegative_modes(grid: &SpectralGrid, half: &[Complex64]) -> Result<Self> {
        if half.len() != grid.modes() + 1 {
            return Err(Error::invalid(format!(
                "expected {} nonnegative-mode coefficients, got {}",
                grid.modes() + 1,
                half.len()
            )));
        }
        let mut f = RealField::zeros(grid);
        for (m, &c) in half.iter().enumerate() {
            f.set_mode(m as i64, c);
        }
        Ok(f)
    }

    /// `a e^{i xi_m x} + conj(a) e^{-i xi_m x}`; for `m = 0` only the real part of `a` is kept.
    pub fn single_mode(grid: &SpectralGrid, m: i64, a: Complex64) -> Self {
        let mut f = RealField::zeros(grid);
        f.set_mode(m, a);
        f
    }

    /// Samples `u` on the physical grid and transforms.
    pub fn from_physical_fn(grid: &SpectralGrid, u: impl Fn(f64) -> f64) -> Self {
        let tr = Transform::new(grid);
        let values: Vec<f64> = grid.points().into_iter().map(u).collect();
        RealField { grid: grid.clone(), coeffs: tr.from_physical(&values) }
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    #[inline]
    pub fn coeff(&self, m: i64) -> Complex64 {
        if m.unsigned_abs() as usize > self.grid.modes() {
            ZERO
        } else {
            self.coeffs[self.grid.slot(m)]
        }
    }

    /// Sets mode `m` and its mirror `-m`.
    pub fn set_mode(&mut self, m: i64, a: Complex64) {
        assert!(m.unsigned_abs() as usize <= self.grid.modes(), "mode {m} outside grid");
        if m == 0 {
            self.coeffs[self.grid.slot(0)] = Complex64::new(a.re, 0.0);
        } else {
            let m = m.abs() * m.signum();
            let (pos, val) = if m > 0 { (m, a) } else { (-m, a.conj()) };
            self.coeffs[self.grid.slot(pos)] = val;
            self.coeffs[self.grid.slot(-pos)] = val.conj();
        }
    }

    pub fn to_physical(&self) -> Vec<f64> {
        Transform::new(&self.grid).to_physical(&self.coeffs)
    }

    /// Applies a Hermitian symbol (`s(-xi) = conj s(xi)`) mode by mode.
    /// The symbol is evaluated on `xi >= 0` only and mirrored, so the
    /// output is exactly conjugate-symmetric.
    pub fn apply_symbol(&self, symbol: impl Fn(f64) -> Complex64) -> RealField {
        let mut out = RealField::zeros(&self.grid);
        let k = self.grid.modes() as i64;
        let s0 = symbol(0.0);
        out.coeffs[self.grid.slot(0)] = Complex64::new((s0 * self.coeff(0)).re, 0.0);
        for m in 1..=k {
            let v = symbol(self.grid.wavenumber(m)) * self.coeff(m);
            out.coeffs[self.grid.slot(m)] = v;
            out.coeffs[self.grid.slot(-m)] = v.conj();
        }
        out
    }

    /// Applies a real even symbol.
    pub fn apply_real_symbol(&self, symbol: impl Fn(f64) -> f64) -> RealField {
        self.apply_symbol(|xi| Complex64::new(symbol(xi), 0.0))
    }

    pub fn scaled(&self, a: f64) -> RealField {
        RealField { grid: self.grid.clone(), coeffs: self.coeffs.iter().map(|c| c * a).collect() }
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &RealField) -> Result<RealField> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(RealField {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| x + y * a).collect(),
        })
    }

    pub fn sub(&self, other: &RealField) -> Result<RealField> {
        self.axpy(-1.0, other)
    }

    /// Same coefficients on a different grid of identical mode count.
    pub fn with_grid(&self, grid: SpectralGrid) -> Result<RealField> {
        if grid.modes() != self.grid.modes() {
            return Err(Error::GridMismatch);
        }
        Ok(RealField { grid, coeffs: self.coeffs.clone() })
    }

    /// Largest `|m|` with a nonzero coefficient (0 for the zero field).
    pub fn support_radius(&self) -> usize {
        let k = self.grid.modes() as i64;
        (0..=k).rev().find(|&m| self.coeff(m) != ZERO).unwrap_or(0) as usize
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Zeroes every mode with `|m| > cutoff`.
    pub fn truncate(&mut self, cutoff: usize) {
        let k = self.grid.modes() as i64;
        for m in -k..=k {
            if m.unsigned_abs() as usize > cutoff {
                self.coeffs[self.grid.slot(m)] = ZERO;
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.to_physical().iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Mean value `c(0)`.
    pub fn mean(&self) -> f64 {
        self.coeff(0).re
    }

    /// Largest conjugate-symmetry defect; zero for every field built through this type.
    pub fn symmetry_defect(&self) -> f64 {
        let k = self.grid.modes() as i64;
        let mut d = self.coeff(0).im.abs();
        for m in 1..=k {
            d = d.max((self.coeff(m) - self.coeff(-m).conj()).norm());
        }
        d
    }

    pub(crate) fn from_parts_unchecked(grid: SpectralGrid, coeffs: Vec<Complex64>) -> RealField {
        debug_assert_eq!(coeffs.len(), grid.len());
        RealField { grid, coeffs }
    }

    pub(crate) fn symmetrize(&mut self) {
        let k = self.grid.modes() as i64;
        let s0 = self.grid.slot(0);
        self.coeffs[s0].im = 0.0;
        for m in 1..=k {
            let (p, n) = (self.grid.slot(m), self.grid.slot(-m));
            let avg = 0.5 * (self.coeffs[p] + self.coeffs[n].conj());
            self.coeffs[p] = avg;
            self.coeffs[n] = avg.conj();
        }
    }
}

/// Random field with `|c(xi)| = amp * <xi>^{-decay}` and uniformly random phases,
/// supported on `1 <= |m| <= band` (mean zero).
pub fn random_power_law<R: Rng + ?Sized>(
    grid: &SpectralGrid,
    band: usize,
    decay: f64,
    amp: f64,
    rng: &mut R,
) -> RealField {
    let band = band.min(grid.modes());
    let mut f = RealField::zeros(grid);
    for m in 1..=band as i64 {
        let xi = grid.wavenumber(m);
        let theta: f64 = rng.random::<f64>() * std::f64::consts::TAU;
        let mag = amp * (1.0 + xi * xi).powf(-decay / 2.0);
        f.set_mode(m, Complex64::from_polar(mag, theta));
    }
    f
}

/// Random field with independent complex Gaussian coefficients on `1 <= |m| <= band`.
pub fn random_gaussian<R: Rng + ?Sized>(grid: &SpectralGrid, band: usize, rng: &mut R) -> RealField {
    let band = band.min(grid.modes());
    let mut f = RealField::zeros(grid);
    for m in 1..=band as i64 {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        f.set_mode(m, Complex64::new(re, im));
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn rejects_asymmetric_coefficients() {
        let g = SpectralGrid::new(4, 1.0).unwrap();
        let mut c = vec![ZERO; g.len()];
        c[g.slot(1)] = Complex64::new(1.0, 1.0);
        c[g.slot(-1)] = Complex64::new(1.0, 1.0);
        assert!(matches!(RealField::new(g.clone(), c), Err(Error::NotConjugateSymmetric { .. })));
        let mut c = vec![ZERO; g.len()];
        c[g.slot(1)] = Complex64::new(1.0, 1.0);
        c[g.slot(-1)] = Complex64::new(1.0, -1.0);
        assert!(RealField::new(g, c).is_ok());
    }

    #[test]
    fn physical_round_trip() {
        let g = SpectralGrid::new(16, 2.0 * std::f64::consts::PI).unwrap();
        let f = random_gaussian(&g, 16, &mut seeded(3, 0));
        let back = RealField::from_physical_fn(&g, {
            let vals = f.to_physical();
            let pts = g.points();
            move |x| {
                let j = pts.iter().position(|&p| p == x).unwrap();
                vals[j]
            }
        });
        for (a, b) in f.coeffs().iter().zip(back.coeffs()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn cosine_has_two_half_coefficients() {
        let g = SpectralGrid::new(8, 2.0 * std::f64::consts::PI).unwrap();
        let f = RealField::from_physical_fn(&g, |x| (3.0 * x).cos());
        assert!((f.coeff(3).re - 0.5).abs() < 1e-14);
        assert!((f.coeff(-3).re - 0.5).abs() < 1e-14);
        let g3 = RealField::single_mode(&g, 3, Complex64::new(0.5, 0.0));
        assert_eq!(g3.support_radius(), 3);
    }
}
