use serde::{Deserialize, Serialize};

use super::field::RealField;

/// `(L sum (1 + xi^2)^s |c(xi)|^2)^{1/2}`; at `s = 0` this is the `L^2` norm.
pub fn sobolev_norm(f: &RealField, s: f64) -> f64 {
    let g = f.grid();
    let k = g.modes() as i64;
    let mut acc = 0.0;
    for m in -k..=k {
        let c = f.coeff(m);
        let n2 = c.norm_sqr();
        if n2 != 0.0 {
            let xi = g.wavenumber(m);
            acc += (1.0 + xi * xi).powf(s) * n2;
        }
    }
    (g.length() * acc).sqrt()
}

pub fn l2_norm(f: &RealField) -> f64 {
    let g = f.grid();
    (g.length() * f.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
}

/// `L^2` norm by quadrature of the point values.
pub fn l2_norm_physical(f: &RealField) -> f64 {
    let v = f.to_physical();
    let h = f.grid().length() / v.len() as f64;
    (h * v.iter().map(|x| x * x).sum::<f64>()).sqrt()
}

/// `int u dx = L c(0)`.
pub fn momentum(f: &RealField) -> f64 {
    f.grid().length() * f.mean()
}

/// A bundle of norms of one field or trajectory.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub l2: f64,
    /// `(s, ||f||_{H^s})` pairs.
    pub sobolev: Vec<(f64, f64)>,
    pub fbar: Option<f64>,
    pub xbar0: Option<f64>,
}

impl NormReport {
    pub fn of(f: &RealField, exponents: &[f64]) -> NormReport {
        NormReport {
            l2: l2_norm(f),
            sobolev: exponents.iter().map(|&s| (s, sobolev_norm(f, s))).collect(),
            fbar: None,
            xbar0: None,
        }
    }

    pub fn sobolev_at(&self, s: f64) -> Option<f64> {
        self.sobolev.iter().find(|(e, _)| *e == s).map(|(_, v)| *v)
    }
}
