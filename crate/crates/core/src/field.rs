//! Fourier representation of periodic fields on `[0, 2pi)^3`: transforms,
//! exact off-grid shifts, Leray projection, differential operators, norms and
//! the diagnostic pressure solve.
//!
//! All operations are pure functions of their inputs; fields are plain values
//! and safe to move between threads.

use crate::error::Result;
use crate::fft::{backward_real_batch, fft3, forward_real_batch, Direction};
use crate::filter::FilterSpec;
use crate::grid::Grid;
use num_complex::Complex64;

/// Scalar field stored as complex Fourier coefficients.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub grid: Grid,
    pub hat: Vec<Complex64>,
}

/// Divergence-free-capable vector field stored as Fourier coefficients,
/// the universal carrier for `u`, `v` and `B`.
#[derive(Debug, Clone)]
pub struct SpectralVectorField {
    pub grid: Grid,
    pub hat: [Vec<Complex64>; 3],
}

/// Rank-2 field holding all nine first derivatives of a vector field;
/// component `k*3 + j` is `d_k w_j`.
#[derive(Debug, Clone)]
pub struct TensorField {
    pub grid: Grid,
    pub hat: Vec<Vec<Complex64>>,
}

/// Neumaier-compensated accumulator; keeps spectral energy reductions at
/// the round-off of individual terms rather than of the running total.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, t: f64) {
        let next = self.sum + t;
        if self.sum.abs() >= t.abs() {
            self.comp += (self.sum - next) + t;
        } else {
            self.comp += (t - next) + self.sum;
        }
        self.sum = next;
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

pub(crate) fn compensated_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::new();
    for t in terms {
        acc.add(t);
    }
    acc.total()
}

/// Per-axis phase tables `e^{i k xi}` realising an exact spectral shift.
pub(crate) fn shift_phases(grid: &Grid, xi: [f64; 3]) -> [Vec<Complex64>; 3] {
    let build = |x: f64| -> Vec<Complex64> {
        (0..grid.n())
            .map(|i| {
                let arg = grid.wavenumber(i) as f64 * x;
                Complex64::new(arg.cos(), arg.sin())
            })
            .collect()
    };
    [build(xi[0]), build(xi[1]), build(xi[2])]
}

fn apply_phases(
    grid: &Grid,
    hat: &[Complex64],
    phases: &[Vec<Complex64>; 3],
    subtract_identity: bool,
) -> Vec<Complex64> {
    let n = grid.n();
    let mut out = vec![Complex64::default(); hat.len()];
    for iz in 0..n {
        let pz = phases[2][iz];
        for iy in 0..n {
            let pzy = pz * phases[1][iy];
            let row = grid.index(iz, iy, 0);
            for ix in 0..n {
                let mut p = pzy * phases[0][ix];
                if subtract_identity {
                    p -= Complex64::new(1.0, 0.0);
                }
                out[row + ix] = hat[row + ix] * p;
            }
        }
    }
    out
}

pub(crate) fn samples_from_hat(grid: &Grid, hat: &[Complex64]) -> Vec<f64> {
    let mut buf = hat.to_vec();
    fft3(&mut buf, grid.n(), Direction::Backward);
    buf.into_iter().map(|c| c.re).collect()
}

pub(crate) fn hat_from_samples(grid: &Grid, samples: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = samples
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .collect();
    fft3(&mut buf, grid.n(), Direction::Forward);
    buf
}

/// Zero every coefficient with any `|k_i|` above the 2/3-rule cutoff.
pub(crate) fn dealias_hat(grid: &Grid, hat: &mut [Complex64]) {
    let n = grid.n();
    let cut = grid.dealias_cutoff();
    let keep: Vec<bool> = (0..n).map(|i| grid.wavenumber(i).abs() <= cut).collect();
    for iz in 0..n {
        for iy in 0..n {
            let kz_ok = keep[iz] && keep[iy];
            let row = grid.index(iz, iy, 0);
            for ix in 0..n {
                if !(kz_ok && keep[ix]) {
                    hat[row + ix] = Complex64::default();
                }
            }
        }
    }
}

impl ScalarField {
    pub fn zero(grid: Grid) -> Self {
        ScalarField {
            grid,
            hat: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn from_samples(grid: Grid, samples: &[f64]) -> Self {
        ScalarField {
            grid,
            hat: hat_from_samples(&grid, samples),
        }
    }

    pub fn to_samples(&self) -> Vec<f64> {
        samples_from_hat(&self.grid, &self.hat)
    }

    /// `||w||_{L^2}^2` over the box via Parseval.
    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.volume() * compensated_sum(self.hat.iter().map(|c| c.norm_sqr()))
    }

    pub fn shift(&self, xi: [f64; 3]) -> Self {
        let phases = shift_phases(&self.grid, xi);
        ScalarField {
            grid: self.grid,
            hat: apply_phases(&self.grid, &self.hat, &phases, false),
        }
    }

    pub fn dealias(&mut self) {
        dealias_hat(&self.grid, &mut self.hat);
    }
}

impl SpectralVectorField {
    pub fn zero(grid: Grid) -> Self {
        let z = vec![Complex64::default(); grid.len()];
        SpectralVectorField {
            grid,
            hat: [z.clone(), z.clone(), z],
        }
    }

    /// Forward transform of three real component sample arrays.
    pub fn from_samples(grid: Grid, samples: [&[f64]; 3]) -> Self {
        let mut hats = forward_real_batch(grid.n(), &samples);
        let c2 = hats.pop().expect("three components");
        let c1 = hats.pop().expect("three components");
        let c0 = hats.pop().expect("three components");
        SpectralVectorField {
            grid,
            hat: [c0, c1, c2],
        }
    }

    /// Backward transform to real component sample arrays.
    pub fn to_samples(&self) -> [Vec<f64>; 3] {
        let mut out = backward_real_batch(
            self.grid.n(),
            &[&self.hat[0], &self.hat[1], &self.hat[2]],
        );
        let c2 = out.pop().expect("three components");
        let c1 = out.pop().expect("three components");
        let c0 = out.pop().expect("three components");
        [c0, c1, c2]
    }

    /// Exact spectral shift: coefficients pick up `e^{i k.xi}`; exact for
    /// band-limited fields at any `xi`, on or off the grid.
    pub fn shift(&self, xi: [f64; 3]) -> Self {
        let phases = shift_phases(&self.grid, xi);
        SpectralVectorField {
            grid: self.grid,
            hat: [
                apply_phases(&self.grid, &self.hat[0], &phases, false),
                apply_phases(&self.grid, &self.hat[1], &phases, false),
                apply_phases(&self.grid, &self.hat[2], &phases, false),
            ],
        }
    }

    /// Real-space samples of the increment `w(x + xi) - w(x)`, formed
    /// spectrally as `(e^{i k.xi} - 1) w_hat(k)`.
    pub fn increment_samples(&self, xi: [f64; 3]) -> [Vec<f64>; 3] {
        let phases = shift_phases(&self.grid, xi);
        let deltas: Vec<Vec<Complex64>> = self
            .hat
            .iter()
            .map(|hat| apply_phases(&self.grid, hat, &phases, true))
            .collect();
        let refs: Vec<&[Complex64]> = deltas.iter().map(|d| d.as_slice()).collect();
        let mut out = backward_real_batch(self.grid.n(), &refs);
        let c2 = out.pop().expect("three components");
        let c1 = out.pop().expect("three components");
        let c0 = out.pop().expect("three components");
        [c0, c1, c2]
    }

    /// Remove the gradient part: `c(k) <- c(k) - k (k.c(k)) / |k|^2` for
    /// `k != 0`; the mean mode is left unchanged.
    pub fn leray_project(&self) -> Self {
        let mut out = self.clone();
        out.leray_project_in_place();
        out
    }

    pub fn leray_project_in_place(&mut self) {
        let n = self.grid.n();
        let ks = self.grid.axis_wavenumbers();
        for iz in 0..n {
            let kz = ks[iz] as f64;
            for iy in 0..n {
                let ky = ks[iy] as f64;
                let row = self.grid.index(iz, iy, 0);
                for ix in 0..n {
                    let kx = ks[ix] as f64;
                    let ksq = kx * kx + ky * ky + kz * kz;
                    if ksq == 0.0 {
                        continue;
                    }
                    let idx = row + ix;
                    let dot = kx * self.hat[0][idx]
                        + ky * self.hat[1][idx]
                        + kz * self.hat[2][idx];
                    let f = dot / ksq;
                    self.hat[0][idx] -= kx * f;
                    self.hat[1][idx] -= ky * f;
                    self.hat[2][idx] -= kz * f;
                }
            }
        }
    }

    /// Spectral divergence `i k . c(k)`.
    pub fn divergence(&self) -> ScalarField {
        let n = self.grid.n();
        let ks = self.grid.axis_wavenumbers();
        let mut hat = vec![Complex64::default(); self.grid.len()];
        for iz in 0..n {
            let kz = ks[iz] as f64;
            for iy in 0..n {
                let ky = ks[iy] as f64;
                let row = self.grid.index(iz, iy, 0);
                for ix in 0..n {
                    let kx = ks[ix] as f64;
                    let idx = row + ix;
                    let dot = kx * self.hat[0][idx]
                        + ky * self.hat[1][idx]
                        + kz * self.hat[2][idx];
                    hat[idx] = Complex64::new(0.0, 1.0) * dot;
                }
            }
        }
        ScalarField {
            grid: self.grid,
            hat,
        }
    }

    /// All nine derivatives `d_k w_j` by spectral differentiation.
    pub fn gradient(&self) -> TensorField {
        let n = self.grid.n();
        let ks = self.grid.axis_wavenumbers();
        let mut hat: Vec<Vec<Complex64>> =
            (0..9).map(|_| vec![Complex64::default(); self.grid.len()]).collect();
        for iz in 0..n {
            let kz = ks[iz] as f64;
            for iy in 0..n {
                let ky = ks[iy] as f64;
                let row = self.grid.index(iz, iy, 0);
                for ix in 0..n {
                    let kx = ks[ix] as f64;
                    let idx = row + ix;
                    let ik = [
                        Complex64::new(0.0, kx),
                        Complex64::new(0.0, ky),
                        Complex64::new(0.0, kz),
                    ];
                    for (axis, ik_axis) in ik.iter().enumerate() {
                        for j in 0..3 {
                            hat[axis * 3 + j][idx] = ik_axis * self.hat[j][idx];
                        }
                    }
                }
            }
        }
        TensorField {
            grid: self.grid,
            hat,
        }
    }

    /// `||w||_{L^2}^2` via Parseval.
    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.volume()
            * compensated_sum(
                self.hat
                    .iter()
                    .flat_map(|comp| comp.iter().map(|c| c.norm_sqr())),
            )
    }

    /// `||w||_{L^2}^2 + alpha^2 ||grad w||_{L^2}^2`.
    pub fn h1_alpha_norm_sq(&self, alpha: f64) -> f64 {
        let n = self.grid.n();
        let ks = self.grid.axis_wavenumbers();
        let mut acc = CompensatedSum::new();
        for iz in 0..n {
            let kz = ks[iz] as f64;
            for iy in 0..n {
                let ky = ks[iy] as f64;
                let row = self.grid.index(iz, iy, 0);
                for ix in 0..n {
                    let kx = ks[ix] as f64;
                    let ksq = kx * kx + ky * ky + kz * kz;
                    let idx = row + ix;
                    let e = self.hat[0][idx].norm_sqr()
                        + self.hat[1][idx].norm_sqr()
                        + self.hat[2][idx].norm_sqr();
                    acc.add((1.0 + alpha * alpha * ksq) * e);
                }
            }
        }
        self.grid.volume() * acc.total()
    }

    pub fn dealias(&mut self) {
        for comp in self.hat.iter_mut() {
            dealias_hat(&self.grid, comp);
        }
    }

    /// Largest coefficient magnitude of the spectral divergence.
    pub fn max_divergence(&self) -> f64 {
        self.divergence()
            .hat
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Largest violation of Hermitian symmetry `c(-k) = conj(c(k))`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n();
        let mut worst = 0.0f64;
        for comp in &self.hat {
            for iz in 0..n {
                let jz = self.grid.conjugate_index(iz);
                for iy in 0..n {
                    let jy = self.grid.conjugate_index(iy);
                    for ix in 0..n {
                        let jx = self.grid.conjugate_index(ix);
                        let a = comp[self.grid.index(iz, iy, ix)];
                        let b = comp[self.grid.index(jz, jy, jx)];
                        worst = worst.max((a - b.conj()).norm());
                    }
                }
            }
        }
        worst
    }
}

impl TensorField {
    pub fn to_samples(&self) -> Vec<Vec<f64>> {
        let refs: Vec<&[Complex64]> = self.hat.iter().map(|h| h.as_slice()).collect();
        backward_real_batch(self.grid.n(), &refs)
    }

    /// Real-space increments of all nine components at displacement `xi`.
    pub fn increment_samples(&self, xi: [f64; 3]) -> Vec<Vec<f64>> {
        let phases = shift_phases(&self.grid, xi);
        let deltas: Vec<Vec<Complex64>> = self
            .hat
            .iter()
            .map(|h| apply_phases(&self.grid, h, &phases, true))
            .collect();
        let refs: Vec<&[Complex64]> = deltas.iter().map(|d| d.as_slice()).collect();
        backward_real_batch(self.grid.n(), &refs)
    }
}

/// Real `L^2` inner product of two vector fields over the box,
/// `vol * sum_k Re(conj(a) b)`.
pub fn l2_inner(a: &SpectralVectorField, b: &SpectralVectorField) -> f64 {
    debug_assert_eq!(a.grid, b.grid);
    let terms = (0..3).flat_map(|comp| {
        a.hat[comp]
            .iter()
            .zip(b.hat[comp].iter())
            .map(|(x, y)| x.re * y.re + x.im * y.im)
    });
    a.grid.volume() * compensated_sum(terms)
}

/// Apply the filter symbol: `u -> v` with `v(k) = symbol(k) u(k)`.
pub fn apply_filter(spec: &FilterSpec, u: &SpectralVectorField) -> SpectralVectorField {
    map_symbol(spec, u, false)
}

/// Invert the filter symbol: `v -> u` with `u(k) = v(k) / symbol(k)`; the
/// divergence-free property is preserved because the symbol is scalar.
pub fn apply_inverse_filter(spec: &FilterSpec, v: &SpectralVectorField) -> SpectralVectorField {
    map_symbol(spec, v, true)
}

fn map_symbol(spec: &FilterSpec, w: &SpectralVectorField, invert: bool) -> SpectralVectorField {
    let grid = w.grid;
    let n = grid.n();
    let ks = grid.axis_wavenumbers();
    let mut out = w.clone();
    for iz in 0..n {
        let kz = ks[iz] as f64;
        for iy in 0..n {
            let ky = ks[iy] as f64;
            let row = grid.index(iz, iy, 0);
            for ix in 0..n {
                let kx = ks[ix] as f64;
                let s = spec.symbol(kx * kx + ky * ky + kz * kz);
                let f = if invert { 1.0 / s } else { s };
                let idx = row + ix;
                out.hat[0][idx] *= f;
                out.hat[1][idx] *= f;
                out.hat[2][idx] *= f;
            }
        }
    }
    out
}

/// Diagnostic pressure for the advective tensor `u (x) v`, solving
/// `Lap p = -(grad (x) grad) : (u (x) v)` with zero mean:
/// `p(k) = -(k (x) k : (u (x) v)^(k)) / |k|^2`, `p(0) = 0`.
pub fn solve_pressure(u: &SpectralVectorField, v: &SpectralVectorField) -> Result<ScalarField> {
    let grid = u.grid;
    let n = grid.n();
    let us = u.to_samples();
    let vs = v.to_samples();
    // nine advective products, transformed in packed pairs
    let products: Vec<Vec<f64>> = (0..9)
        .map(|m| {
            let (i, j) = (m / 3, m % 3);
            us[i].iter().zip(vs[j].iter()).map(|(&a, &b)| a * b).collect()
        })
        .collect();
    let refs: Vec<&[f64]> = products.iter().map(|p| p.as_slice()).collect();
    let t_hat = forward_real_batch(grid.n(), &refs);
    let ks = grid.axis_wavenumbers();
    let mut p = ScalarField::zero(grid);
    for iz in 0..n {
        let kz = ks[iz] as f64;
        for iy in 0..n {
            let ky = ks[iy] as f64;
            let row = grid.index(iz, iy, 0);
            for ix in 0..n {
                let kx = ks[ix] as f64;
                let ksq = kx * kx + ky * ky + kz * kz;
                if ksq == 0.0 {
                    continue;
                }
                let k = [kx, ky, kz];
                let idx = row + ix;
                let mut contracted = Complex64::default();
                for i in 0..3 {
                    for j in 0..3 {
                        contracted += k[i] * k[j] * t_hat[i * 3 + j][idx];
                    }
                }
                p.hat[idx] = -contracted / ksq;
            }
        }
    }
    Ok(p)
}
