//! Machine-readable threshold tables for energy conservation and the
//! fractional-regularisation exponent law. Table values are stored as exact
//! fractions; every bound is strict.

use crate::error::{Error, Result};
use crate::models::ModelKind;

/// Exact rational with normalised positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Frac {
    num: i64,
    den: i64,
}

impl Frac {
    pub const fn raw(num: i64, den: i64) -> Self {
        Frac { num, den }
    }

    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i64;
        Frac {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn sub(&self, other: Frac) -> Frac {
        Frac::new(self.num * other.den - other.num * self.den, self.den * other.den)
    }

    pub fn add(&self, other: Frac) -> Frac {
        Frac::new(self.num * other.den + other.num * self.den, self.den * other.den)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if a == 0 && b == 0 {
        return 1;
    }
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

impl std::fmt::Display for Frac {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// A one-sided regularity bound; every bound in the tables is exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bound {
    pub value: Frac,
    pub strict: bool,
}

impl Bound {
    fn strict(num: i64, den: i64) -> Self {
        Bound {
            value: Frac::new(num, den),
            strict: true,
        }
    }
}

/// Besov-index condition sufficient for conservation of the model's energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesovCondition {
    /// `s > bound` for the single regularity index.
    Single { s: Bound },
    /// MHD pair rule: `s > 0`, `r > 0` and `s + 2r > 1`.
    Pair { s: Bound, r: Bound, sum: Bound },
}

/// Sufficient Besov (and Hoelder) index for energy conservation.
pub fn onsager_besov_threshold(model: ModelKind) -> BesovCondition {
    match model {
        ModelKind::Euler => BesovCondition::Single {
            s: Bound::strict(1, 3),
        },
        ModelKind::LerayAlpha => BesovCondition::Single {
            s: Bound::strict(0, 1),
        },
        ModelKind::EulerAlpha | ModelKind::ModifiedLerayAlpha | ModelKind::ClarkAlpha => {
            BesovCondition::Single {
                s: Bound::strict(1, 1),
            }
        }
        ModelKind::MhdLerayAlpha => BesovCondition::Pair {
            s: Bound::strict(0, 1),
            r: Bound::strict(0, 1),
            sum: Bound::strict(1, 1),
        },
    }
}

/// Sobolev-space thresholds for energy conservation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SobolevCondition {
    /// Thresholds on `u` (absent for Euler) and on `v`.
    UV { u: Option<Bound>, v: Bound },
    /// MHD: `v in H^s`, `B in H^r` with `s, r > 1/2` and `s + 2r > 5/2`.
    Pair { s: Bound, r: Bound, sum: Bound },
}

pub fn onsager_sobolev_threshold(model: ModelKind) -> SobolevCondition {
    match model {
        ModelKind::Euler => SobolevCondition::UV {
            u: None,
            v: Bound::strict(5, 6),
        },
        ModelKind::LerayAlpha => SobolevCondition::UV {
            u: Some(Bound::strict(5, 2)),
            v: Bound::strict(1, 2),
        },
        ModelKind::EulerAlpha | ModelKind::ModifiedLerayAlpha | ModelKind::ClarkAlpha => {
            SobolevCondition::UV {
                u: Some(Bound::strict(3, 2)),
                v: Bound::strict(-1, 2),
            }
        }
        ModelKind::MhdLerayAlpha => SobolevCondition::Pair {
            s: Bound::strict(1, 2),
            r: Bound::strict(1, 2),
            sum: Bound::strict(5, 2),
        },
    }
}

/// Hoelder threshold for the fractionally regularised model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalExponent {
    pub gamma: f64,
    /// Set for `theta > 1/2`, where the threshold is only known to be at
    /// most zero.
    pub at_most: bool,
}

/// `gamma = 1/3 - (2/3) theta` for `theta <= 1/2`, clamped to zero above;
/// the linear law `3 gamma + 2 theta = 1`.
pub fn fractional_onsager_exponent(theta: f64) -> Result<FractionalExponent> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::InvalidTheta(theta));
    }
    if theta > 0.5 {
        Ok(FractionalExponent {
            gamma: 0.0,
            at_most: true,
        })
    } else {
        Ok(FractionalExponent {
            gamma: (1.0 - 2.0 * theta) / 3.0,
            at_most: false,
        })
    }
}

/// MHD regularity trade-off: conservation holds when `s > 0`, `r > 0` and
/// `s + 2r > 1`.
pub fn mhd_tradeoff_check(s: f64, r: f64) -> bool {
    s > 0.0 && r > 0.0 && s + 2.0 * r > 1.0
}
