use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic domain `[0, L)` resolved by the Fourier modes `m = -K..=K`,
/// i.e. wavenumbers `xi_m = 2 pi m / L`.
///
/// Nonlinear products are truncated to `|m| <= dealias_cutoff`
/// (two thirds of `K` unless set explicitly).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    modes: usize,
    length: f64,
    dealias_cutoff: usize,
}

impl Default for SpectralGrid {
    fn default() -> Self {
        SpectralGrid::new(256, 64.0 * PI).expect("default grid is valid")
    }
}

impl SpectralGrid {
    pub fn new(modes: usize, length: f64) -> Result<Self> {
        Self::with_cutoff(modes, length, 2 * modes / 3)
    }

    pub fn with_cutoff(modes: usize, length: f64, dealias_cutoff: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::invalid("grid needs at least one mode"));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::invalid(format!("grid length must be positive, got {length}")));
        }
        if dealias_cutoff > modes {
            return Err(Error::invalid(format!("dealias cutoff {dealias_cutoff} exceeds mode count {modes}")));
        }
        Ok(SpectralGrid { modes, length, dealias_cutoff })
    }

    /// Number of retained modes per sign (`K`).
    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dealias_cutoff(&self) -> usize {
        self.dealias_cutoff
    }

    /// Number of stored coefficients, `2K + 1`.
    pub fn len(&self) -> usize {
        2 * self.modes + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Wavenumber spacing `2 pi / L`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn wavenumber(&self, m: i64) -> f64 {
        m as f64 * self.dk()
    }

    /// All wavenumbers in ascending order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let k = self.modes as i64;
        (-k..=k).map(|m| self.wavenumber(m)).collect()
    }

    /// Storage slot of mode `m`; modes are stored in ascending order.
    #[inline]
    pub fn slot(&self, m: i64) -> usize {
        debug_assert!(m.unsigned_abs() as usize <= self.modes);
        (m + self.modes as i64) as usize
    }

    #[inline]
    pub fn mode_of_slot(&self, slot: usize) -> i64 {
        slot as i64 - self.modes as i64
    }

    pub fn cutoff_wavenumber(&self) -> f64 {
        self.wavenumber(self.dealias_cutoff as i64)
    }

    pub fn max_wavenumber(&self) -> f64 {
        self.wavenumber(self.modes as i64)
    }

    /// Physical grid size used for transforms: the smallest `2^a 3^b >= 2K + 1`.
    pub fn fft_len(&self) -> usize {
        smooth_len(self.len())
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.fft_len();
        let h = self.length / n as f64;
        (0..n).map(|j| j as f64 * h).collect()
    }

    /// Same modes and cutoff on the period `L / lambda`.
    pub fn rescaled(&self, lambda: f64) -> Result<SpectralGrid> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::invalid(format!("scale must be positive, got {lambda}")));
        }
        SpectralGrid::with_cutoff(self.modes, self.length / lambda, self.dealias_cutoff)
    }

    /// Grids agree when mode count, cutoff and period all match (period to 1e-12 relative).
    pub fn same_as(&self, other: &SpectralGrid) -> bool {
        self.modes == other.modes
            && self.dealias_cutoff == other.dealias_cutoff
            && (self.length - other.length).abs() <= 1e-12 * self.length.max(other.length)
    }
}

fn smooth_len(min: usize) -> usize {
    let mut best = usize::MAX;
    let mut p2 = 1usize;
    while p2 < 2 * min {
        let mut n = p2;
        loop {
            if n >= min {
                best = best.min(n);
                break;
            }
            n *= 3;
        }
        p2 *= 2;
    }
    best
}
