//! Mode-wise regularisation filters relating the advected momentum `v` to the
//! advecting velocity `u` through `v = symbol(k) * u`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    /// `u = v`.
    Identity,
    /// Helmholtz smoothing `v = (1 - alpha^2 Lap) u`, symbol `1 + alpha^2 |k|^2`.
    Helmholtz,
    /// Fractional smoothing `v = u + alpha^{2 theta} (-Lap)^theta u`,
    /// symbol `1 + alpha^{2 theta} |k|^{2 theta}`.
    Fractional,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub kind: FilterKind,
    /// Regularisation length scale, `alpha >= 0`.
    pub alpha: f64,
    /// Fractional order, used by `Fractional` only; `theta` in (0, 1].
    pub theta: f64,
}

impl FilterSpec {
    pub fn identity() -> Self {
        FilterSpec {
            kind: FilterKind::Identity,
            alpha: 0.0,
            theta: 1.0,
        }
    }

    pub fn helmholtz(alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidFilter(format!(
                "alpha must be finite and non-negative, got {alpha}"
            )));
        }
        Ok(FilterSpec {
            kind: FilterKind::Helmholtz,
            alpha,
            theta: 1.0,
        })
    }

    pub fn fractional(alpha: f64, theta: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidFilter(format!(
                "alpha must be finite and non-negative, got {alpha}"
            )));
        }
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::InvalidFilter(format!(
                "fractional order theta must lie in (0, 1], got {theta}"
            )));
        }
        Ok(FilterSpec {
            kind: FilterKind::Fractional,
            alpha,
            theta,
        })
    }

    /// Filter symbol at squared wavenumber `ksq = |k|^2`; always `>= 1`, so
    /// the inverse filter is unconditionally stable.
    #[inline]
    pub fn symbol(&self, ksq: f64) -> f64 {
        match self.kind {
            FilterKind::Identity => 1.0,
            FilterKind::Helmholtz => 1.0 + self.alpha * self.alpha * ksq,
            FilterKind::Fractional => {
                1.0 + self.alpha.powf(2.0 * self.theta) * ksq.powf(self.theta)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helmholtz_symbol_values() {
        let f = FilterSpec::helmholtz(1.0).unwrap();
        assert_eq!(f.symbol(1.0), 2.0);
        let f0 = FilterSpec::helmholtz(0.0).unwrap();
        assert_eq!(f0.symbol(17.0), 1.0);
    }

    #[test]
    fn fractional_symbol_values() {
        // theta = 1/2, alpha = 1, |k| = 2: symbol = 1 + |k| = 3.
        let f = FilterSpec::fractional(1.0, 0.5).unwrap();
        assert!((f.symbol(4.0) - 3.0).abs() < 1e-15);
        assert!(FilterSpec::fractional(1.0, 0.0).is_err());
        assert!(FilterSpec::fractional(1.0, -0.2).is_err());
        assert!(FilterSpec::fractional(1.0, 1.5).is_err());
    }

    #[test]
    fn symbol_never_below_one() {
        let specs = [
            FilterSpec::identity(),
            FilterSpec::helmholtz(0.3).unwrap(),
            FilterSpec::fractional(0.7, 0.25).unwrap(),
        ];
        for spec in specs {
            for ksq in [0.0, 0.5, 1.0, 9.0, 1024.0] {
                assert!(spec.symbol(ksq) >= 1.0);
            }
        }
    }
}
