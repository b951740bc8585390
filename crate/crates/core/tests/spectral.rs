//! Spectral-core contracts checked against independent dense-DFT oracles.

use aol_core::{
    apply_inverse_filter, l2_inner, solve_pressure, FilterSpec, Grid, SpectralVectorField,
    SynthSpec,
};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

/// Direct DFT synthesis, independent of the library transform path.
fn dft_samples(grid: &Grid, hat: &[Complex64]) -> Vec<f64> {
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

/// Direct DFT analysis of one mode.
fn dft_coeff(grid: &Grid, samples: &[f64], k: [i64; 3]) -> Complex64 {
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

fn axis_index(grid: &Grid, k: i64) -> usize {
    if k >= 0 {
        k as usize
    } else {
        (grid.n() as i64 + k) as usize
    }
}

fn mode_index(grid: &Grid, k: [i64; 3]) -> usize {
    grid.index(
        axis_index(grid, k[2]),
        axis_index(grid, k[1]),
        axis_index(grid, k[0]),
    )
}

fn sin_x_ey(grid: Grid) -> SpectralVectorField {
    let mut w = SpectralVectorField::zero(grid);
    w.hat[1][mode_index(&grid, [1, 0, 0])] = Complex64::new(0.0, -0.5);
    w.hat[1][mode_index(&grid, [-1, 0, 0])] = Complex64::new(0.0, 0.5);
    w
}

fn seeded_field(grid: Grid, seed: u64) -> SpectralVectorField {
    aol_core::generate(&SynthSpec::band_limited_random(1, 2, 1.0, seed), grid).unwrap()
}

#[test]
fn transform_zero_and_forced_mode() {
    let grid = Grid::new(8).unwrap();
    let zeros = vec![0.0; grid.len()];
    let w = SpectralVectorField::from_samples(grid, [&zeros, &zeros, &zeros]);
    assert!(w.hat.iter().all(|c| c.iter().all(|z| z.norm() == 0.0)));

    // samples of sin(x) e_y force coefficients -i/2 and +i/2 at k = (+-1,0,0)
    let n = grid.n();
    let mut sy = vec![0.0; grid.len()];
    for iz in 0..n {
        for iy in 0..n {
            for ix in 0..n {
                sy[grid.index(iz, iy, ix)] = grid.coordinate(ix).sin();
            }
        }
    }
    let w = SpectralVectorField::from_samples(grid, [&zeros, &sy, &zeros]);
    let plus = w.hat[1][mode_index(&grid, [1, 0, 0])];
    let minus = w.hat[1][mode_index(&grid, [-1, 0, 0])];
    assert!((plus - Complex64::new(0.0, -0.5)).norm() < 1e-12);
    assert!((minus - Complex64::new(0.0, 0.5)).norm() < 1e-12);
}

#[test]
fn transform_round_trip_and_parseval() {
    let grid = Grid::new(8).unwrap();
    let w = seeded_field(grid, 17);
    let samples = w.to_samples();
    let back = SpectralVectorField::from_samples(
        grid,
        [&samples[0], &samples[1], &samples[2]],
    );
    for comp in 0..3 {
        for (a, b) in w.hat[comp].iter().zip(back.hat[comp].iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
    // Parseval: cell-weighted sample energy equals vol * sum |c|^2
    let quadrature: f64 = samples
        .iter()
        .flat_map(|c| c.iter())
        .map(|&x| x * x)
        .sum::<f64>()
        * grid.cell_volume();
    let spectral = w.l2_norm_sq();
    assert!((quadrature - spectral).abs() <= 1e-10 * spectral.abs());
}

#[test]
fn inverse_filter_examples() {
    let grid = Grid::new(8).unwrap();
    let mut v = SpectralVectorField::zero(grid);
    v.hat[1][mode_index(&grid, [1, 0, 0])] = Complex64::new(1.0, 0.0);
    let u = apply_inverse_filter(&FilterSpec::helmholtz(1.0).unwrap(), &v);
    assert!((u.hat[1][mode_index(&grid, [1, 0, 0])] - Complex64::new(0.5, 0.0)).norm() < 1e-15);

    let u0 = apply_inverse_filter(&FilterSpec::helmholtz(0.0).unwrap(), &v);
    for comp in 0..3 {
        assert_eq!(u0.hat[comp], v.hat[comp]);
    }

    let mut v2 = SpectralVectorField::zero(grid);
    v2.hat[0][mode_index(&grid, [2, 0, 0])] = Complex64::new(1.0, 0.0);
    let u2 = apply_inverse_filter(&FilterSpec::fractional(1.0, 0.5).unwrap(), &v2);
    let got = u2.hat[0][mode_index(&grid, [2, 0, 0])];
    assert!((got - Complex64::new(1.0 / 3.0, 0.0)).norm() < 1e-15);
}

#[test]
fn leray_projector_examples() {
    let grid = Grid::new(8).unwrap();
    // pure gradient mode: w(k) parallel to k dies
    let mut w = SpectralVectorField::zero(grid);
    let idx = mode_index(&grid, [1, 2, 0]);
    w.hat[0][idx] = Complex64::new(1.0, 0.5);
    w.hat[1][idx] = Complex64::new(2.0, 1.0);
    let p = w.leray_project();
    assert!(p.hat[0][idx].norm() < 1e-15);
    assert!(p.hat[1][idx].norm() < 1e-15);

    // divergence-free input unchanged
    let w = seeded_field(grid, 3);
    let p = w.leray_project();
    for comp in 0..3 {
        for (a, b) in w.hat[comp].iter().zip(p.hat[comp].iter()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    // k = (1,0,0), w = (1,1,0) -> (0,1,0)
    let mut w = SpectralVectorField::zero(grid);
    let idx = mode_index(&grid, [1, 0, 0]);
    w.hat[0][idx] = Complex64::new(1.0, 0.0);
    w.hat[1][idx] = Complex64::new(1.0, 0.0);
    let p = w.leray_project();
    assert!(p.hat[0][idx].norm() < 1e-15);
    assert!((p.hat[1][idx] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
}

#[test]
fn pressure_examples_and_dense_oracle() {
    let grid = Grid::new(8).unwrap();
    // parallel shear u = v = sin(y) e_x gives p = 0
    let mut shear = SpectralVectorField::zero(grid);
    shear.hat[0][mode_index(&grid, [0, 1, 0])] = Complex64::new(0.0, -0.5);
    shear.hat[0][mode_index(&grid, [0, -1, 0])] = Complex64::new(0.0, 0.5);
    let p = solve_pressure(&shear, &shear).unwrap();
    assert!(p.hat.iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-14);

    let u = seeded_field(grid, 5);
    let v = seeded_field(grid, 6);
    let p = solve_pressure(&u, &v).unwrap();
    // mean is pinned to zero
    assert_eq!(p.hat[0], Complex64::new(0.0, 0.0));

    // dense oracle: pointwise products from direct DFT synthesis, direct DFT
    // analysis per mode, Laplacian inverted mode-by-mode
    let us: Vec<Vec<f64>> = u.hat.iter().map(|h| dft_samples(&grid, h)).collect();
    let vs: Vec<Vec<f64>> = v.hat.iter().map(|h| dft_samples(&grid, h)).collect();
    let n = grid.n();
    let mut max_err = 0.0f64;
    let mut max_mag = 0.0f64;
    for jz in 0..n {
        for jy in 0..n {
            for jx in 0..n {
                let k = [
                    grid.wavenumber(jx),
                    grid.wavenumber(jy),
                    grid.wavenumber(jz),
                ];
                let ksq = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
                if ksq == 0.0 {
                    continue;
                }
                let mut contracted = Complex64::default();
                for i in 0..3 {
                    for j in 0..3 {
                        let t: Vec<f64> = us[i]
                            .iter()
                            .zip(vs[j].iter())
                            .map(|(&a, &b)| a * b)
                            .collect();
                        contracted += k[i] as f64 * k[j] as f64 * dft_coeff(&grid, &t, k);
                    }
                }
                let expected = -contracted / ksq;
                let got = p.hat[grid.index(jz, jy, jx)];
                max_err = max_err.max((got - expected).norm());
                max_mag = max_mag.max(expected.norm());
            }
        }
    }
    assert!(
        max_err <= 1e-10 * max_mag.max(1e-30),
        "pressure oracle mismatch: err {max_err}, scale {max_mag}"
    );
}

#[test]
fn shift_examples() {
    let grid = Grid::new(16).unwrap();
    let w = sin_x_ey(grid);

    let same = w.shift([0.0, 0.0, 0.0]);
    for comp in 0..3 {
        for (a, b) in w.hat[comp].iter().zip(same.hat[comp].iter()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    // half-period shift flips the sign
    let flipped = w.shift([PI, 0.0, 0.0]);
    let s = flipped.to_samples();
    let n = grid.n();
    for ix in 0..n {
        let expected = -grid.coordinate(ix).sin();
        assert!((s[1][grid.index(0, 0, ix)] - expected).abs() < 1e-12);
    }

    // off-grid shift matches the analytic evaluation
    let moved = w.shift([0.3, 0.0, 0.0]);
    let s = moved.to_samples();
    for iz in 0..n {
        for iy in 0..n {
            for ix in 0..n {
                let expected = (grid.coordinate(ix) + 0.3).sin();
                assert!((s[1][grid.index(iz, iy, ix)] - expected).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn norm_examples() {
    let grid = Grid::new(16).unwrap();
    let w = sin_x_ey(grid);
    let vol = grid.volume();
    // quadrature oracle over direct DFT samples
    let s = dft_samples(&grid, &w.hat[1]);
    let quad: f64 = s.iter().map(|&x| x * x).sum::<f64>() * grid.cell_volume();
    assert!((w.l2_norm_sq() - vol / 2.0).abs() < 1e-10 * vol);
    assert!((quad - vol / 2.0).abs() < 1e-10 * vol);
    assert!((w.h1_alpha_norm_sq(1.0) - vol).abs() < 1e-10 * vol);

    let z = SpectralVectorField::zero(grid);
    assert_eq!(z.l2_norm_sq(), 0.0);
    assert_eq!(z.h1_alpha_norm_sq(1.0), 0.0);

    // l2_inner agrees with the norm on equal arguments
    assert!((l2_inner(&w, &w) - w.l2_norm_sq()).abs() < 1e-12 * vol);
}

#[test]
fn gradient_and_divergence_are_spectral_derivatives() {
    let grid = Grid::new(16).unwrap();
    let w = sin_x_ey(grid);
    let grad = w.gradient();
    // d_x w_y = cos(x)
    let gxy = &grad.hat[0 * 3 + 1];
    let s = aol_core::ScalarField {
        grid,
        hat: gxy.clone(),
    }
    .to_samples();
    for ix in 0..grid.n() {
        let expected = grid.coordinate(ix).cos();
        assert!((s[grid.index(0, 0, ix)] - expected).abs() < 1e-12);
    }
    assert!(w.max_divergence() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn projector_is_idempotent(seed in 0u64..1000) {
        let grid = Grid::new(8).unwrap();
        let mut w = seeded_field(grid, seed);
        // perturb away from divergence-free so the first projection acts
        w.hat[0][mode_index(&grid, [1, 1, 0])] += Complex64::new(0.3, -0.2);
        let once = w.leray_project();
        let twice = once.leray_project();
        for comp in 0..3 {
            for (a, b) in once.hat[comp].iter().zip(twice.hat[comp].iter()) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }
        prop_assert!(once.max_divergence() < 1e-12);
    }

    #[test]
    fn filter_shrinks_every_mode(seed in 0u64..1000, alpha in 0.0f64..3.0, theta in 0.05f64..1.0) {
        let grid = Grid::new(8).unwrap();
        let v = seeded_field(grid, seed);
        for spec in [FilterSpec::helmholtz(alpha).unwrap(), FilterSpec::fractional(alpha, theta).unwrap()] {
            let u = apply_inverse_filter(&spec, &v);
            for comp in 0..3 {
                for (a, b) in u.hat[comp].iter().zip(v.hat[comp].iter()) {
                    prop_assert!(a.norm() <= b.norm() + 1e-15);
                }
            }
        }
    }

    #[test]
    fn shift_group_law(seed in 0u64..1000, x1 in -1.0f64..1.0, y1 in -1.0f64..1.0, z2 in -1.0f64..1.0) {
        let grid = Grid::new(8).unwrap();
        let w = seeded_field(grid, seed);
        let a = w.shift([x1, y1, 0.0]).shift([0.2, 0.0, z2]);
        let b = w.shift([x1 + 0.2, y1, z2]);
        for comp in 0..3 {
            for (p, q) in a.hat[comp].iter().zip(b.hat[comp].iter()) {
                prop_assert!((p - q).norm() < 1e-12);
            }
        }
    }
}
