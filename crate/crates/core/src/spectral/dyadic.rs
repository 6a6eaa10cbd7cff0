use super::field::RealField;

const INNER: f64 = 1.25;
const OUTER: f64 = 1.6;

/// Quintic smoothstep, `C^2` with vanishing first and second derivatives at both ends.
#[inline]
pub fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
}

/// Base bump: 1 on `|xi| <= 5/4`, 0 on `|xi| >= 8/5`, quintic smoothstep between.
#[inline]
pub fn eta0(xi: f64) -> f64 {
    let a = xi.abs();
    if a <= INNER {
        1.0
    } else if a >= OUTER {
        0.0
    } else {
        1.0 - smoothstep((a - INNER) / (OUTER - INNER))
    }
}

/// `eta_0` for `k = 0`, otherwise `eta_0(xi / 2^k) - eta_0(xi / 2^(k-1))`.
/// For `k >= 1` the support is `5/8 * 2^k <= |xi| <= 8/5 * 2^k`.
#[inline]
pub fn eta_bump(xi: f64, k: i32) -> f64 {
    if k <= 0 {
        return eta0(xi);
    }
    let s = (2.0f64).powi(k);
    (eta0(xi / s) - eta0(2.0 * xi / s)).max(0.0)
}

/// Littlewood-Paley piece `P_k f`.
pub fn project_dyadic(f: &RealField, k: u32) -> RealField {
    f.apply_real_symbol(|xi| eta_bump(xi, k as i32))
}

/// Smallest `k` with `eta_j(xi) = 0` for every `j > k` at every `|xi| <= xi_max`.
pub fn covering_index(xi_max: f64) -> u32 {
    let mut k = 0u32;
    while OUTER * 2f64.powi(k as i32 - 1) <= xi_max {
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::spectral::{random_gaussian, SpectralGrid};
    use num_complex::Complex64;

    #[test]
    fn bump_endpoints() {
        assert_eq!(eta0(1.0), 1.0);
        assert_eq!(eta0(1.25), 1.0);
        assert_eq!(eta0(2.0), 0.0);
        assert_eq!(eta0(1.6), 0.0);
        assert!(eta0(1.4) > 0.0 && eta0(1.4) < 1.0);
    }

    #[test]
    fn partition_of_unity_and_positivity() {
        for i in 0..20_000 {
            let xi = i as f64 * 0.0137;
            let kmax = covering_index(xi) + 1;
            let s: f64 = (0..=kmax as i32).map(|k| eta_bump(xi, k)).sum();
            assert!((s - 1.0).abs() < 1e-12, "xi = {xi}");
            for k in 0..=kmax as i32 {
                assert!(eta_bump(xi, k) >= 0.0);
            }
        }
    }

    #[test]
    fn bump_is_c2_across_transition() {
        let h = 1e-4;
        for &x in &[INNER, OUTER] {
            let d2 = |c: f64| (eta0(c + h) - 2.0 * eta0(c) + eta0(c - h)) / (h * h);
            assert!(d2(x).abs() < 0.1);
        }
    }

    #[test]
    fn single_mode_at_three_splits_between_two_pieces() {
        let g = SpectralGrid::new(8, 2.0 * std::f64::consts::PI).unwrap();
        let f = RealField::single_mode(&g, 3, Complex64::new(1.0, 0.0));
        let w1 = eta0(1.5) - eta0(3.0);
        let w2 = eta0(0.75) - eta0(1.5);
        assert!((w1 + w2 - 1.0).abs() < 1e-15);
        let p1 = project_dyadic(&f, 1);
        let p2 = project_dyadic(&f, 2);
        assert!((p1.coeff(3).re - w1).abs() < 1e-15);
        assert!((p2.coeff(3).re - w2).abs() < 1e-15);
        for k in [0u32, 3, 4, 5] {
            assert!(project_dyadic(&f, k).is_zero());
        }
    }

    #[test]
    fn projections_sum_to_identity_and_separate() {
        let g = SpectralGrid::new(64, 2.0 * std::f64::consts::PI).unwrap();
        let f = random_gaussian(&g, 64, &mut seeded(11, 0));
        let kmax = covering_index(g.max_wavenumber()) + 1;
        let mut acc = RealField::zeros(&g);
        for k in 0..=kmax {
            acc = acc.axpy(1.0, &project_dyadic(&f, k)).unwrap();
        }
        for (a, b) in acc.coeffs().iter().zip(f.coeffs()) {
            assert!((a - b).norm() < 1e-12);
        }
        for k in 0..kmax {
            for j in (k + 2)..=kmax {
                assert!(project_dyadic(&project_dyadic(&f, k), j).is_zero());
            }
        }
    }
}
