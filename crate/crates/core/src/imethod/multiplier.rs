use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{RealField, SpectralGrid};

/// Anything that can supply `m^2(xi)` for an even multiplier equal to 1 on `|xi| <= N`.
pub trait SquaredSymbol: Sync {
    fn m2(&self, xi: f64) -> f64;
    /// The radius `N` below which `m = 1`.
    fn flat_radius(&self) -> f64;
}

/// The I-operator symbol: `m = 1` on `|xi| <= N`, `m = (|xi| / N)^s` on `|xi| >= 2N`,
/// and `log m = s ln2 q(t)` in between with `t = log2(|xi| / N)` and the quintic
/// `q(t) = 6t^3 - 8t^4 + 3t^5`, which matches both branches to second order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IMultiplier {
    n: f64,
    s: f64,
}

#[inline]
fn q(t: f64) -> f64 {
    t * t * t * (6.0 - 8.0 * t + 3.0 * t * t)
}
#[inline]
fn dq(t: f64) -> f64 {
    t * t * (18.0 - 32.0 * t + 15.0 * t * t)
}
#[inline]
fn d2q(t: f64) -> f64 {
    t * (36.0 - 96.0 * t + 60.0 * t * t)
}

impl IMultiplier {
    /// `N >= 1` (possibly infinite, giving the identity) and `-3/4 <= s <= 0`.
    pub fn new(n: f64, s: f64) -> Result<Self> {
        if !(n >= 1.0) {
            return Err(Error::invalid(format!("N must be at least 1, got {n}")));
        }
        if !(-0.75..=0.0).contains(&s) {
            return Err(Error::invalid(format!("s must lie in [-3/4, 0], got {s}")));
        }
        Ok(IMultiplier { n, s })
    }

    pub fn identity() -> Self {
        IMultiplier { n: f64::INFINITY, s: 0.0 }
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// `log m^2` as a function of `a = |xi|`, with its first two derivatives in `a`.
    fn log_m2(&self, a: f64) -> (f64, f64, f64) {
        if a <= self.n || self.s == 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let s2 = 2.0 * self.s;
        if a >= 2.0 * self.n {
            return (s2 * (a / self.n).ln(), s2 / a, -s2 / (a * a));
        }
        let t = (a / self.n).ln() / LN_2;
        let g = s2 * LN_2 * q(t);
        let g1 = s2 * dq(t) / a;
        let g2 = s2 * (d2q(t) / LN_2 - dq(t)) / (a * a);
        (g, g1, g2)
    }

    pub fn eval(&self, xi: f64) -> f64 {
        let a = xi.abs();
        if a <= self.n || self.s == 0.0 {
            1.0
        } else if a >= 2.0 * self.n {
            (a / self.n).powf(self.s)
        } else {
            (0.5 * self.log_m2(a).0).exp()
        }
    }

    pub fn eval_m2(&self, xi: f64) -> f64 {
        let m = self.eval(xi);
        m * m
    }

    /// `(m^2)'(xi)`.
    pub fn dm2(&self, xi: f64) -> f64 {
        let (_, g1, _) = self.log_m2(xi.abs());
        self.eval_m2(xi) * g1 * xi.signum()
    }

    /// `(m^2)''(xi)`.
    pub fn d2m2(&self, xi: f64) -> f64 {
        let (_, g1, g2) = self.log_m2(xi.abs());
        self.eval_m2(xi) * (g2 + g1 * g1)
    }

    /// `I u`, the mode-wise product with `m`.
    pub fn apply(&self, u: &RealField) -> RealField {
        u.apply_real_symbol(|xi| self.eval(xi))
    }

    /// Lookup table of `m^2` on the lattice of `grid` up to mode `max_mode`.
    pub fn tabulate(&self, grid: &SpectralGrid, max_mode: usize) -> TabulatedSymbol {
        let dk = grid.dk();
        TabulatedSymbol { exact: *self, dk, table: (0..=max_mode).map(|j| self.eval_m2(j as f64 * dk)).collect() }
    }
}

impl SquaredSymbol for IMultiplier {
    #[inline]
    fn m2(&self, xi: f64) -> f64 {
        self.eval_m2(xi)
    }
    fn flat_radius(&self) -> f64 {
        self.n
    }
}

/// `m^2` tabulated on a wavenumber lattice; off-lattice or out-of-range
/// arguments fall back to the exact formula.
#[derive(Clone, Debug)]
pub struct TabulatedSymbol {
    exact: IMultiplier,
    dk: f64,
    table: Vec<f64>,
}

impl SquaredSymbol for TabulatedSymbol {
    #[inline]
    fn m2(&self, xi: f64) -> f64 {
        let x = xi.abs() / self.dk;
        let j = x.round();
        if (x - j).abs() < 1e-9 && (j as usize) < self.table.len() {
            self.table[j as usize]
        } else {
            self.exact.eval_m2(xi)
        }
    }
    fn flat_radius(&self) -> f64 {
        self.exact.n
    }
}

/// `E_I^2 = ||I u||^2 = L sum m^2 |c|^2`.
pub fn e2<S: SquaredSymbol + ?Sized>(symbol: &S, u: &RealField) -> f64 {
    let g = u.grid();
    let k = g.modes() as i64;
    let mut acc = 0.0;
    for m in -k..=k {
        let c = u.coeff(m);
        if c.re != 0.0 || c.im != 0.0 {
            acc += symbol.m2(g.wavenumber(m)) * c.norm_sqr();
        }
    }
    g.length() * acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_values() {
        let m = IMultiplier::new(16.0, -0.75).unwrap();
        assert_eq!(m.eval(8.0), 1.0);
        assert!((m.eval(64.0) - 4f64.powf(-0.75)).abs() < 1e-15);
        assert!((m.eval(64.0) - 0.353553).abs() < 1e-6);
        for xi in [3.0, 17.0, 20.5, 31.9, 100.0] {
            assert_eq!(m.eval(xi), m.eval(-xi));
        }
        assert_eq!(IMultiplier::new(16.0, 0.0).unwrap().eval(1e6), 1.0);
    }

    #[test]
    fn smooth_and_monotone_across_transition() {
        let m = IMultiplier::new(10.0, -0.6).unwrap();
        let mut prev = 1.0;
        for i in 0..=4000 {
            let xi = 5.0 + i as f64 * 0.01;
            let v = m.eval(xi);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
        let h = 1e-5;
        for xi in [10.0, 20.0, 13.7, 18.2, 40.0] {
            let fd1 = (m.eval_m2(xi + h) - m.eval_m2(xi - h)) / (2.0 * h);
            let fd2 = (m.eval_m2(xi + h) - 2.0 * m.eval_m2(xi) + m.eval_m2(xi - h)) / (h * h);
            assert!((fd1 - m.dm2(xi)).abs() < 1e-7, "xi = {xi}");
            assert!((fd2 - m.d2m2(xi)).abs() < 1e-4, "xi = {xi}");
        }
    }

    #[test]
    fn table_agrees_with_exact() {
        let g = SpectralGrid::new(64, 2.0 * std::f64::consts::PI).unwrap();
        let m = IMultiplier::new(8.0, -0.5).unwrap();
        let t = m.tabulate(&g, 256);
        for j in -300i64..=300 {
            let xi = g.wavenumber(j);
            assert_eq!(t.m2(xi), m.eval_m2(xi));
        }
        assert_eq!(t.m2(12.3), m.eval_m2(12.3));
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(IMultiplier::new(0.5, -0.5).is_err());
        assert!(IMultiplier::new(4.0, -0.9).is_err());
        assert!(IMultiplier::new(4.0, 0.1).is_err());
    }
}
