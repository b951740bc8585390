//! Shared oracle helpers for integration tests: direct DFT synthesis and
//! analysis, independent of the library transform path.

#![allow(dead_code)]

use aol_core::{Grid, SpectralVectorField, SynthSpec};
use num_complex::Complex64;

pub fn dft_samples(grid: &Grid, hat: &[Complex64]) -> Vec<f64> {
    let n = grid.n();
    let mut out = vec![0.0f64; grid.len()];
    for iz in 0..n {
        for iy in 0..n {
            for ix in 0..n {
                let x = grid.coordinate(ix);
                let y = grid.coordinate(iy);
                let z = grid.coordinate(iz);
                let mut acc = Complex64::default();
                for jz in 0..n {
                    let kz = grid.wavenumber(jz) as f64;
                    for jy in 0..n {
                        let ky = grid.wavenumber(jy) as f64;
                        for jx in 0..n {
                            let kx = grid.wavenumber(jx) as f64;
                            let phase = kx * x + ky * y + kz * z;
                            acc += hat[grid.index(jz, jy, jx)]
                                * Complex64::new(phase.cos(), phase.sin());
                        }
                    }
                }
                out[grid.index(iz, iy, ix)] = acc.re;
            }
        }
    }
    out
}

pub fn dft_coeff(grid: &Grid, samples: &[f64], k: [i64; 3]) -> Complex64 {
    let n = grid.n();
    let mut acc = Complex64::default();
    for iz in 0..n {
        for iy in 0..n {
            for ix in 0..n {
                let phase = -(k[0] as f64 * grid.coordinate(ix)
                    + k[1] as f64 * grid.coordinate(iy)
                    + k[2] as f64 * grid.coordinate(iz));
                acc += samples[grid.index(iz, iy, ix)] * Complex64::new(phase.cos(), phase.sin());
            }
        }
    }
    acc / grid.len() as f64
}

pub fn axis_index(grid: &Grid, k: i64) -> usize {
    if k >= 0 {
        k as usize
    } else {
        (grid.n() as i64 + k) as usize
    }
}

pub fn mode_index(grid: &Grid, k: [i64; 3]) -> usize {
    grid.index(
        axis_index(grid, k[2]),
        axis_index(grid, k[1]),
        axis_index(grid, k[0]),
    )
}

/// `sin(x) e_y` assembled from its two Fourier modes.
pub fn sin_x_ey(grid: Grid) -> SpectralVectorField {
    let mut w = SpectralVectorField::zero(grid);
    w.hat[1][mode_index(&grid, [1, 0, 0])] = Complex64::new(0.0, -0.5);
    w.hat[1][mode_index(&grid, [-1, 0, 0])] = Complex64::new(0.0, 0.5);
    w
}

/// `sin(y) e_x`, a steady parallel shear for every model.
pub fn shear_sin_y_ex(grid: Grid) -> SpectralVectorField {
    let mut w = SpectralVectorField::zero(grid);
    w.hat[0][mode_index(&grid, [0, 1, 0])] = Complex64::new(0.0, -0.5);
    w.hat[0][mode_index(&grid, [0, -1, 0])] = Complex64::new(0.0, 0.5);
    w
}

pub fn seeded_field(grid: Grid, seed: u64) -> SpectralVectorField {
    aol_core::generate(&SynthSpec::band_limited_random(1, 2, 1.0, seed), grid).unwrap()
}
