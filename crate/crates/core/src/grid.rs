//! Cubic collocation grid on the periodic box `[0, 2pi)^3`.
//!
//! The domain edge is fixed at `2pi` so wavenumbers are the signed integers
//! in `[-n/2, n/2)` per axis. Real-space storage is component-major with
//! `index = ((z*n) + y)*n + x` (x fastest); spectral storage uses the same
//! layout with axis index `i` carrying wavenumber `i` for `i < n/2` and
//! `i - n` otherwise.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Domain edge length, fixed at `2pi`.
pub const DOMAIN_EDGE: f64 = 2.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    n: usize,
}

impl Grid {
    /// A grid with `n` points per axis; `n` must be a power of two, `n >= 8`.
    pub fn new(n: usize) -> Result<Self> {
        if !n.is_power_of_two() || n < 8 {
            return Err(Error::InvalidGridSize(n));
        }
        Ok(Grid { n })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of grid points (`n^3`).
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// De-aliasing bound of the 2/3 rule: modes with any `|k_i| > floor(n/3)`
    /// are dropped after nonlinear products.
    #[inline]
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }

    /// Grid spacing `2pi / n`.
    #[inline]
    pub fn spacing(&self) -> f64 {
        DOMAIN_EDGE / self.n as f64
    }

    /// Volume of one grid cell, `(2pi/n)^3`.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        let h = self.spacing();
        h * h * h
    }

    /// Box volume `(2pi)^3`.
    #[inline]
    pub fn volume(&self) -> f64 {
        DOMAIN_EDGE * DOMAIN_EDGE * DOMAIN_EDGE
    }

    /// Signed integer wavenumber carried by axis index `idx`.
    #[inline]
    pub fn wavenumber(&self, idx: usize) -> i64 {
        if idx < self.n / 2 {
            idx as i64
        } else {
            idx as i64 - self.n as i64
        }
    }

    /// Per-axis wavenumber table, indexed by axis index.
    pub fn axis_wavenumbers(&self) -> Vec<i64> {
        (0..self.n).map(|i| self.wavenumber(i)).collect()
    }

    /// Flat index of the point or mode at axis indices `(iz, iy, ix)`.
    #[inline]
    pub fn index(&self, iz: usize, iy: usize, ix: usize) -> usize {
        (iz * self.n + iy) * self.n + ix
    }

    /// Axis index carrying wavenumber `-k` for the one carrying `k`.
    #[inline]
    pub fn conjugate_index(&self, idx: usize) -> usize {
        if idx == 0 {
            0
        } else {
            self.n - idx
        }
    }

    /// Real-space coordinate of axis index `i`.
    #[inline]
    pub fn coordinate(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(0).is_err());
        assert!(Grid::new(4).is_err());
        assert!(Grid::new(12).is_err());
        assert!(Grid::new(8).is_ok());
        assert!(Grid::new(64).is_ok());
    }

    #[test]
    fn wavenumbers_cover_signed_range() {
        let g = Grid::new(8).unwrap();
        let ks: Vec<i64> = g.axis_wavenumbers();
        assert_eq!(ks, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert_eq!(g.dealias_cutoff(), 2);
    }

    #[test]
    fn conjugate_index_pairs_negated_wavenumbers() {
        let g = Grid::new(16).unwrap();
        for i in 0..16 {
            let j = g.conjugate_index(i);
            if i != 8 {
                // the Nyquist index has no positive partner
                assert_eq!(g.wavenumber(j), -g.wavenumber(i));
            }
        }
    }
}
