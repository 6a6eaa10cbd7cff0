use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral::{RealField, Transform};

use super::corrections::Corrections;
use super::multiplier::SquaredSymbol;

/// Largest number of summed tuples accepted by [`lambda_k`].
pub const TUPLE_BUDGET: usize = 300_000_000;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Nonzero modes of a field as `(m, xi, c)`.
fn support(u: &RealField) -> Vec<(i64, f64, Complex64)> {
    let g = u.grid();
    let k = g.modes() as i64;
    (-k..=k)
        .filter_map(|m| {
            let c = u.coeff(m);
            (c != ZERO).then(|| (m, g.wavenumber(m), c))
        })
        .collect()
}

/// `L sum_{xi_1 + ... + xi_k = 0} mult(xi) prod c_j(xi_j)` over the retained modes,
/// for `k = fields.len()` in `2..=5`. The last index is fixed by the constraint.
pub fn lambda_k<F>(mult: F, fields: &[&RealField]) -> Result<Complex64>
where
    F: Fn(&[f64]) -> Complex64 + Sync + Send,
{
    let k = fields.len();
    if !(2..=5).contains(&k) {
        return Err(Error::invalid(format!("lambda_k needs 2 to 5 fields, got {k}")));
    }
    let grid = fields[0].grid();
    if fields.iter().any(|f| !f.grid().same_as(grid)) {
        return Err(Error::GridMismatch);
    }
    let lists: Vec<_> = fields[..k - 1].iter().map(|f| support(f)).collect();
    let needed = lists.iter().map(|l| l.len()).product::<usize>();
    if needed > TUPLE_BUDGET {
        return Err(Error::BudgetExceeded { what: "hyperplane tuples", needed, limit: TUPLE_BUDGET });
    }
    let last = fields[k - 1];
    let dk = grid.dk();
    let partial: Vec<Complex64> = lists[0]
        .par_iter()
        .map(|&(m0, x0, c0)| {
            let mut xs = [0.0; 5];
            xs[0] = x0;
            let mut acc = ZERO;
            nest(1, k, &lists, last, m0, c0, &mut xs, dk, &mult, &mut acc);
            acc
        })
        .collect();
    Ok(partial.into_iter().sum::<Complex64>() * grid.length())
}

#[allow(clippy::too_many_arguments)]
fn nest<F: Fn(&[f64]) -> Complex64>(
    depth: usize,
    k: usize,
    lists: &[Vec<(i64, f64, Complex64)>],
    last: &RealField,
    msum: i64,
    prod: Complex64,
    xs: &mut [f64; 5],
    dk: f64,
    mult: &F,
    acc: &mut Complex64,
) {
    if depth == k - 1 {
        let c = last.coeff(-msum);
        if c != ZERO {
            xs[depth] = -(msum as f64) * dk;
            *acc += mult(&xs[..k]) * prod * c;
        }
        return;
    }
    for &(m, x, c) in &lists[depth] {
        xs[depth] = x;
        nest(depth + 1, k, lists, last, msum + m, prod * c, xs, dk, mult, acc);
    }
}

/// Pair coefficients `w = (u^2)^` truncated to `|m| <= limit`, as used by the solver.
pub fn pair_coefficients(u: &RealField, limit: usize) -> RealField {
    let tr = Transform::new(u.grid());
    let mut w = RealField::zeros(u.grid());
    let sq = tr.square(u.coeffs(), limit);
    let k = u.grid().modes() as i64;
    for m in 0..=k {
        w.set_mode(m, sq[u.grid().slot(m)]);
    }
    w
}

/// Builds the terms of a same-field hyperplane sum in parallel over the first index,
/// then adds the partial sums in a fixed order.
fn reduce_ordered<T: Sync>(items: &[T], f: impl Fn(&T) -> Complex64 + Sync + Send) -> Complex64 {
    let partial: Vec<Complex64> = items.par_iter().map(f).collect();
    partial.into_iter().sum()
}

/// Same-field functionals of the modified energies and their time derivatives.
pub struct EnergyFunctionals<'a, S> {
    corr: &'a Corrections<S>,
}

impl<'a, S: SquaredSymbol> EnergyFunctionals<'a, S> {
    pub fn new(corr: &'a Corrections<S>) -> Self {
        EnergyFunctionals { corr }
    }

    /// `Lambda_3(sigma3; u, u, u)`.
    pub fn lambda3_sigma3(&self, u: &RealField) -> Complex64 {
        let sup = support(u);
        let dk = u.grid().dk();
        let acc = reduce_ordered(&sup, |&(ma, xa, ca)| {
            let mut acc = ZERO;
            for &(mb, xb, cb) in &sup {
                let c = u.coeff(-ma - mb);
                if c != ZERO {
                    let xc = -((ma + mb) as f64) * dk;
                    acc += ca * cb * c * self.corr.sigma3_value([xa, xb, xc]);
                }
            }
            acc
        });
        acc * u.grid().length()
    }

    /// `Lambda_4(sigma4; u, u, u, u)`.
    pub fn lambda4_sigma4(&self, u: &RealField) -> Complex64 {
        let sup = support(u);
        let dk = u.grid().dk();
        let acc = reduce_ordered(&sup, |&(ma, xa, ca)| {
            let mut acc = ZERO;
            for &(mb, xb, cb) in &sup {
                let cab = ca * cb;
                for &(mc, xc, cc) in &sup {
                    let cd = u.coeff(-ma - mb - mc);
                    if cd != ZERO {
                        let xd = -((ma + mb + mc) as f64) * dk;
                        acc += cab * cc * cd * self.corr.sigma4_value([xa, xb, xc, xd]);
                    }
                }
            }
            acc
        });
        acc * u.grid().length()
    }

    /// `Lambda_3(M3)` with the quadratic factor truncated to `|m| <= limit`.
    pub fn flux3(&self, u: &RealField, limit: usize) -> Complex64 {
        let w = pair_coefficients(u, limit);
        let s = self.corr.symbol();
        let mut acc = ZERO;
        for (ma, xa, ca) in support(u) {
            let cw = w.coeff(-ma);
            acc += ca * cw * (s.m2(xa) * -xa);
        }
        Complex64::new(0.0, -self.corr.coupling()) * acc * u.grid().length()
    }

    /// `Lambda_4(M4)` in the form `-i (3c/2) L sum sigma3(x1, x2, eta) eta c1 c2 w(eta)`.
    pub fn flux4(&self, u: &RealField, limit: usize) -> Complex64 {
        let w = pair_coefficients(u, limit);
        let sup = support(u);
        let dk = u.grid().dk();
        let acc = reduce_ordered(&sup, |&(ma, xa, ca)| {
            let mut acc = ZERO;
            for &(mb, xb, cb) in &sup {
                let me = -ma - mb;
                let cw = w.coeff(me);
                if cw != ZERO && me != 0 {
                    let eta = me as f64 * dk;
                    acc += ca * cb * cw * (self.corr.sigma3_value([xa, xb, eta]) * eta);
                }
            }
            acc
        });
        Complex64::new(0.0, -1.5 * self.corr.coupling()) * acc * u.grid().length()
    }

    /// `Lambda_5(M5)` in the form `-2ic L sum sigma4(x1, x2, x3, eta) eta c1 c2 c3 w(eta)`.
    pub fn flux5(&self, u: &RealField, limit: usize) -> Complex64 {
        let w = pair_coefficients(u, limit);
        let sup = support(u);
        let dk = u.grid().dk();
        let acc = reduce_ordered(&sup, |&(ma, xa, ca)| {
            let mut acc = ZERO;
            for &(mb, xb, cb) in &sup {
                let cab = ca * cb;
                for &(mc, xc, cc) in &sup {
                    let me = -ma - mb - mc;
                    let cw = w.coeff(me);
                    if cw != ZERO && me != 0 {
                        let eta = me as f64 * dk;
                        acc += cab * cc * cw * (self.corr.sigma4_value([xa, xb, xc, eta]) * eta);
                    }
                }
            }
            acc
        });
        Complex64::new(0.0, -2.0 * self.corr.coupling()) * acc * u.grid().length()
    }
}
