//! Radial mollifiers with analytic gradients, and the spherical quadrature
//! used to discretise the `xi`-integrals of the defect terms.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_deriv(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Normalised radial profile shapes on `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MollifierProfile {
    /// `exp(-1 / (1 - r^2))` for `r < 1`; the standard smooth bump.
    Bump,
    /// `(1 - r^2)^4` for `r < 1`; a C^3 polynomial alternative used for
    /// mollifier-independence checks.
    Quartic,
}

impl MollifierProfile {
    /// Unnormalised profile value.
    fn shape(&self, r: f64) -> f64 {
        if r >= 1.0 {
            return 0.0;
        }
        match self {
            MollifierProfile::Bump => (-1.0 / (1.0 - r * r)).exp(),
            MollifierProfile::Quartic => {
                let q = 1.0 - r * r;
                q * q * q * q
            }
        }
    }

    /// Radial derivative of the unnormalised profile.
    fn shape_deriv(&self, r: f64) -> f64 {
        if r >= 1.0 {
            return 0.0;
        }
        match self {
            MollifierProfile::Bump => {
                let q = 1.0 - r * r;
                self.shape(r) * (-2.0 * r / (q * q))
            }
            MollifierProfile::Quartic => {
                let q = 1.0 - r * r;
                -8.0 * r * q * q * q
            }
        }
    }

    /// Constant `c` making `int_{R^3} c * shape(|x|) dx = 1`.
    fn normalisation(&self) -> f64 {
        let mut integral = 0.0;
        for (x, w) in gauss_legendre(64) {
            let r = 0.5 * (x + 1.0);
            integral += 0.5 * w * self.shape(r) * r * r;
        }
        1.0 / (4.0 * PI * integral)
    }
}

/// Unit-mass radial bump `phi_eps(x) = eps^-3 phi(x / eps)` with support in
/// the ball of radius `eps` and analytic gradient
/// `grad phi_eps(x) = eps^-4 (grad phi)(x / eps)`.
#[derive(Debug, Clone, Copy)]
pub struct Mollifier {
    pub profile: MollifierProfile,
    pub epsilon: f64,
    norm: f64,
}

impl Mollifier {
    pub fn new(profile: MollifierProfile, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidMollifierScale(epsilon));
        }
        Ok(Mollifier {
            profile,
            epsilon,
            norm: profile.normalisation(),
        })
    }

    /// `phi_eps` at radius `r`.
    pub fn value(&self, r: f64) -> f64 {
        let e = self.epsilon;
        self.norm / (e * e * e) * self.profile.shape(r / e)
    }

    /// Signed radial derivative `d phi_eps / dr` at radius `r`; the gradient
    /// is this times the unit radial vector.
    pub fn radial_deriv(&self, r: f64) -> f64 {
        let e = self.epsilon;
        self.norm / (e * e * e * e) * self.profile.shape_deriv(r / e)
    }

    /// Total mass by radial quadrature; equals 1 to quadrature accuracy.
    pub fn mass(&self) -> f64 {
        let mut total = 0.0;
        for (x, w) in gauss_legendre(64) {
            let r = 0.5 * self.epsilon * (x + 1.0);
            total += 0.5 * self.epsilon * w * self.value(r) * r * r;
        }
        4.0 * PI * total
    }

    /// Fourier symbol `phi_eps_hat(|k|) = 4 pi int phi(r) r^2 sinc(|k| r) dr`;
    /// multiplying coefficients by this realises convolution with `phi_eps`.
    pub fn fourier_symbol(&self, kmag: f64) -> f64 {
        let mut total = 0.0;
        for (x, w) in gauss_legendre(48) {
            let r = 0.5 * self.epsilon * (x + 1.0);
            let sinc = if kmag * r == 0.0 {
                1.0
            } else {
                (kmag * r).sin() / (kmag * r)
            };
            total += 0.5 * self.epsilon * w * self.value(r) * r * r * sinc;
        }
        4.0 * PI * total
    }
}

/// Quadrature rule for `int_{|xi| < eps} grad phi_eps(xi) . (...) d xi` in
/// spherical form: Gauss-Legendre in radius crossed with a fixed
/// antipodally-paired direction set whose weights sum to `4 pi`.
#[derive(Debug, Clone)]
pub struct XiQuadrature {
    pub n_radial: usize,
    /// Unit directions with their solid-angle weights.
    pub directions: Vec<([f64; 3], f64)>,
}

impl XiQuadrature {
    /// The default rule: 16 radial nodes and the 26 normalised nonzero
    /// offsets of the `{-1,0,1}^3` stencil, carrying the octahedral class
    /// weights (1/21 axes, 4/105 edges, 9/280 corners, times `4 pi`) that
    /// make the spherical rule exact through degree 7.
    pub fn standard() -> Self {
        Self::with_radial(16)
    }

    pub fn with_radial(n_radial: usize) -> Self {
        let directions = stencil_directions()
            .into_iter()
            .map(|d| {
                let nonzero = d.iter().filter(|&&c| c != 0.0).count();
                let class_weight = match nonzero {
                    1 => 1.0 / 21.0,
                    2 => 4.0 / 105.0,
                    _ => 9.0 / 280.0,
                };
                (d, 4.0 * PI * class_weight)
            })
            .collect();
        XiQuadrature {
            n_radial,
            directions,
        }
    }

    /// A rule over an explicit direction set with equal weights.
    pub fn equal_weight(n_radial: usize, dirs: Vec<[f64; 3]>) -> Self {
        let w = 4.0 * PI / dirs.len() as f64;
        XiQuadrature {
            n_radial,
            directions: dirs.into_iter().map(|d| (d, w)).collect(),
        }
    }

    /// Radial nodes and weights mapped onto `(0, eps)`.
    pub fn radial_nodes(&self, epsilon: f64) -> Vec<(f64, f64)> {
        gauss_legendre(self.n_radial)
            .into_iter()
            .map(|(x, w)| (0.5 * epsilon * (x + 1.0), 0.5 * epsilon * w))
            .collect()
    }
}

/// The 26 nonzero offsets of `{-1,0,1}^3`, normalised, ordered so each
/// direction is immediately followed by its antipode.
pub fn stencil_directions() -> Vec<[f64; 3]> {
    let mut dirs = Vec::with_capacity(26);
    for dz in -1i64..=1 {
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                if (dx, dy, dz) == (0, 0, 0) {
                    continue;
                }
                // keep one representative per antipodal pair
                let canonical = dz > 0 || (dz == 0 && (dy > 0 || (dy == 0 && dx > 0)));
                if !canonical {
                    continue;
                }
                let norm = ((dx * dx + dy * dy + dz * dz) as f64).sqrt();
                let d = [dx as f64 / norm, dy as f64 / norm, dz as f64 / norm];
                dirs.push(d);
                dirs.push([-d[0], -d[1], -d[2]]);
            }
        }
    }
    dirs
}
