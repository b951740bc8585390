//! Deterministic generators of divergence-free test fields, including rough
//! power-law fields realising a target Hoelder exponent.

use crate::error::{Error, Result};
use crate::field::SpectralVectorField;
use crate::grid::Grid;
use num_complex::Complex64;
use std::f64::consts::PI;

/// splitmix64; the single RNG used anywhere in the crate. Identical seeds
/// give identical fields on every platform.
#[derive(Debug, Clone)]
pub struct SeededRng {
    state: u64,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Standard Gaussian pair by Box-Muller.
    pub fn next_gaussian_pair(&mut self) -> (f64, f64) {
        let mut u1 = self.next_f64();
        while u1 == 0.0 {
            u1 = self.next_f64();
        }
        let u2 = self.next_f64();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * PI * u2;
        (radius * angle.cos(), radius * angle.sin())
    }
}

/// Independent stream for one (mode, component) pair, so draws do not depend
/// on the enumeration order of modes.
fn mode_rng(seed: u64, mode_index: usize, component: usize) -> SeededRng {
    let mixed = seed
        ^ (mode_index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ (component as u64 + 1).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    SeededRng::new(mixed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SynthKind {
    /// `u = (sin x cos y cos z, -cos x sin y cos z, 0)`, analytically
    /// divergence-free.
    TaylorGreen,
    /// iid Gaussian coefficients on the shell `kmin <= |k| <= kmax`,
    /// projected and Hermitian-symmetrised.
    BandLimitedRandom { kmin: i64, kmax: i64 },
    /// Coefficient magnitude `|k|^-(h + 3/2)` with seeded uniform phases on
    /// `1 <= |k| <= dealias cutoff`, realising Hoelder exponent `h`.
    PowerLawRough { h: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub kind: SynthKind,
    /// Taylor-Green: pointwise amplitude factor. Random kinds: target
    /// `L^2` norm after projection.
    pub amplitude: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn taylor_green(amplitude: f64) -> Self {
        SynthSpec {
            kind: SynthKind::TaylorGreen,
            amplitude,
            seed: 0,
        }
    }

    pub fn band_limited_random(kmin: i64, kmax: i64, amplitude: f64, seed: u64) -> Self {
        SynthSpec {
            kind: SynthKind::BandLimitedRandom { kmin, kmax },
            amplitude,
            seed,
        }
    }

    pub fn power_law_rough(h: f64, amplitude: f64, seed: u64) -> Self {
        SynthSpec {
            kind: SynthKind::PowerLawRough { h },
            amplitude,
            seed,
        }
    }
}

/// Generate the field described by `spec` on `grid`. Every output is
/// Hermitian-symmetric and divergence-free.
pub fn generate(spec: &SynthSpec, grid: Grid) -> Result<SpectralVectorField> {
    match spec.kind {
        SynthKind::TaylorGreen => Ok(taylor_green(grid, spec.amplitude)),
        SynthKind::BandLimitedRandom { kmin, kmax } => {
            band_limited(grid, kmin, kmax, spec.amplitude, spec.seed)
        }
        SynthKind::PowerLawRough { h } => power_law(grid, h, spec.amplitude, spec.seed),
    }
}

fn taylor_green(grid: Grid, amplitude: f64) -> SpectralVectorField {
    let mut w = SpectralVectorField::zero(grid);
    let n = grid.n();
    // sin x cos y cos z expands over the eight modes k = (+-1, +-1, +-1)
    // with coefficients -i k_x / 8 on component x and +i k_y / 8 on y.
    for sz in [1i64, -1] {
        for sy in [1i64, -1] {
            for sx in [1i64, -1] {
                let iz = if sz == 1 { 1 } else { n - 1 };
                let iy = if sy == 1 { 1 } else { n - 1 };
                let ix = if sx == 1 { 1 } else { n - 1 };
                let idx = grid.index(iz, iy, ix);
                w.hat[0][idx] = Complex64::new(0.0, -(sx as f64) * amplitude / 8.0);
                w.hat[1][idx] = Complex64::new(0.0, (sy as f64) * amplitude / 8.0);
            }
        }
    }
    w
}

fn shell_norm(k: [i64; 3]) -> f64 {
    ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt()
}

fn band_limited(
    grid: Grid,
    kmin: i64,
    kmax: i64,
    amplitude: f64,
    seed: u64,
) -> Result<SpectralVectorField> {
    let cutoff = grid.dealias_cutoff();
    if kmin < 1 || kmax < kmin || kmax > cutoff {
        return Err(Error::BandOutsideGrid {
            kmin,
            kmax,
            cutoff,
            n: grid.n(),
        });
    }
    let n = grid.n();
    let mut w = SpectralVectorField::zero(grid);
    for iz in 0..n {
        let kz = grid.wavenumber(iz);
        for iy in 0..n {
            let ky = grid.wavenumber(iy);
            for ix in 0..n {
                let kx = grid.wavenumber(ix);
                let mag = shell_norm([kx, ky, kz]);
                if mag < kmin as f64 || mag > kmax as f64 {
                    continue;
                }
                let idx = grid.index(iz, iy, ix);
                for comp in 0..3 {
                    let mut rng = mode_rng(seed, idx, comp);
                    let (re, im) = rng.next_gaussian_pair();
                    w.hat[comp][idx] = Complex64::new(re, im);
                }
            }
        }
    }
    w.leray_project_in_place();
    hermitian_symmetrise(&mut w);
    normalise_l2(&mut w, amplitude);
    Ok(w)
}

fn power_law(grid: Grid, h: f64, amplitude: f64, seed: u64) -> Result<SpectralVectorField> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::InvalidHoelderExponent(h));
    }
    let cutoff = grid.dealias_cutoff();
    let n = grid.n();
    let mut w = SpectralVectorField::zero(grid);
    let exponent = -(h + 1.5);
    for iz in 0..n {
        let kz = grid.wavenumber(iz);
        for iy in 0..n {
            let ky = grid.wavenumber(iy);
            for ix in 0..n {
                let kx = grid.wavenumber(ix);
                if !canonical_half_space([kx, ky, kz]) {
                    continue;
                }
                if kx.abs() > cutoff || ky.abs() > cutoff || kz.abs() > cutoff {
                    continue;
                }
                let mag = shell_norm([kx, ky, kz]);
                if mag < 1.0 || mag > cutoff as f64 {
                    continue;
                }
                let idx = grid.index(iz, iy, ix);
                let mirror = grid.index(
                    grid.conjugate_index(iz),
                    grid.conjugate_index(iy),
                    grid.conjugate_index(ix),
                );
                let magnitude = mag.powf(exponent);
                for comp in 0..3 {
                    let mut rng = mode_rng(seed, idx, comp);
                    let phase = 2.0 * PI * rng.next_f64();
                    let c = Complex64::new(phase.cos(), phase.sin()) * magnitude;
                    w.hat[comp][idx] = c;
                    w.hat[comp][mirror] = c.conj();
                }
            }
        }
    }
    w.leray_project_in_place();
    normalise_l2(&mut w, amplitude);
    Ok(w)
}

/// Keep one representative of each `{k, -k}` pair: lexicographic on
/// `(kz, ky, kx)` with the first nonzero entry positive.
fn canonical_half_space(k: [i64; 3]) -> bool {
    if k[2] != 0 {
        return k[2] > 0;
    }
    if k[1] != 0 {
        return k[1] > 0;
    }
    k[0] > 0
}

fn hermitian_symmetrise(w: &mut SpectralVectorField) {
    let grid = w.grid;
    let n = grid.n();
    for comp in 0..3 {
        for iz in 0..n {
            let jz = grid.conjugate_index(iz);
            for iy in 0..n {
                let jy = grid.conjugate_index(iy);
                for ix in 0..n {
                    let jx = grid.conjugate_index(ix);
                    let a = grid.index(iz, iy, ix);
                    let b = grid.index(jz, jy, jx);
                    if a > b {
                        continue;
                    }
                    let avg = 0.5 * (w.hat[comp][a] + w.hat[comp][b].conj());
                    w.hat[comp][a] = avg;
                    w.hat[comp][b] = avg.conj();
                }
            }
        }
    }
}

fn normalise_l2(w: &mut SpectralVectorField, target: f64) {
    let norm = w.l2_norm_sq().sqrt();
    if norm == 0.0 {
        return;
    }
    let scale = target / norm;
    for comp in w.hat.iter_mut() {
        for c in comp.iter_mut() {
            *c *= scale;
        }
    }
}
