//! Model right-hand sides against a dense convolution oracle, RK4 order,
//! conserved quantities and simulation behaviour.

mod common;

use aol_core::{
    apply_filter, conserved_pairing, conserved_quantity, generate, rhs, run_simulation,
    step_rk4, Error, FilterSpec, Grid, ModelKind, ModelState, SpectralVectorField, SynthSpec,
};
use common::*;
use num_complex::Complex64;

fn state_for(kind: ModelKind, grid: Grid, alpha: f64, seed: u64) -> ModelState {
    let filter = if kind == ModelKind::Euler {
        FilterSpec::identity()
    } else {
        FilterSpec::helmholtz(alpha).unwrap()
    };
    let v = seeded_field(grid, seed);
    let b = if kind.requires_magnetic() {
        Some(seeded_field(grid, seed + 1000))
    } else {
        None
    };
    ModelState::new(kind, v, b, filter).unwrap()
}

/// Dense-route tendency: pointwise products of direct-DFT samples, direct
/// DFT analysis, manual de-aliasing and manual projection.
fn oracle_tendency(state: &ModelState) -> (SpectralVectorField, Option<SpectralVectorField>) {
    let grid = state.grid();
    let n = grid.n();
    let npts = grid.len();
    let alpha = state.filter.alpha;

    let u_hat = state.velocity();
    let u: Vec<Vec<f64>> = u_hat.hat.iter().map(|h| dft_samples(&grid, h)).collect();
    let v: Vec<Vec<f64>> = state.v.hat.iter().map(|h| dft_samples(&grid, h)).collect();
    let b: Option<Vec<Vec<f64>>> = state
        .b
        .as_ref()
        .map(|bf| bf.hat.iter().map(|h| dft_samples(&grid, h)).collect());

    // real-space velocity gradient d_i u_j via direct synthesis of i k_i u_j
    let mut grad_u = vec![vec![0.0f64; npts]; 9];
    for i in 0..3 {
        for j in 0..3 {
            let mut hat = vec![Complex64::default(); npts];
            for iz in 0..n {
                for iy in 0..n {
                    for ix in 0..n {
                        let k = [
                            grid.wavenumber(ix) as f64,
                            grid.wavenumber(iy) as f64,
                            grid.wavenumber(iz) as f64,
                        ];
                        let idx = grid.index(iz, iy, ix);
                        hat[idx] = Complex64::new(0.0, k[i]) * u_hat.hat[j][idx];
                    }
                }
            }
            grad_u[i * 3 + j] = dft_samples(&grid, &hat);
        }
    }

    // advective tensor t[i][j] and the extra vector term per model
    let mut tensor = vec![vec![0.0f64; npts]; 9];
    let mut extra = vec![vec![0.0f64; npts]; 3];
    let mut induction: Option<Vec<Vec<f64>>> = None;
    match state.kind {
        ModelKind::Euler => {
            for i in 0..3 {
                for j in 0..3 {
                    for idx in 0..npts {
                        tensor[i * 3 + j][idx] = u[i][idx] * u[j][idx];
                    }
                }
            }
        }
        ModelKind::LerayAlpha => {
            for i in 0..3 {
                for j in 0..3 {
                    for idx in 0..npts {
                        tensor[i * 3 + j][idx] = u[i][idx] * v[j][idx];
                    }
                }
            }
        }
        ModelKind::ModifiedLerayAlpha => {
            for i in 0..3 {
                for j in 0..3 {
                    for idx in 0..npts {
                        tensor[i * 3 + j][idx] = v[i][idx] * u[j][idx];
                    }
                }
            }
        }
        ModelKind::EulerAlpha => {
            for i in 0..3 {
                for j in 0..3 {
                    for idx in 0..npts {
                        tensor[i * 3 + j][idx] = u[i][idx] * v[j][idx];
                    }
                }
            }
            for j in 0..3 {
                for m in 0..3 {
                    for idx in 0..npts {
                        extra[j][idx] += v[m][idx] * grad_u[j * 3 + m][idx];
                    }
                }
            }
        }
        ModelKind::ClarkAlpha => {
            for i in 0..3 {
                for j in 0..3 {
                    for idx in 0..npts {
                        let mut g = 0.0;
                        for k in 0..3 {
                            g += grad_u[i * 3 + k][idx] * grad_u[j * 3 + k][idx];
                        }
                        tensor[i * 3 + j][idx] = u[i][idx] * v[j][idx] + v[i][idx] * u[j][idx]
                            - u[i][idx] * u[j][idx]
                            - alpha * alpha * g;
                    }
                }
            }
        }
        ModelKind::MhdLerayAlpha => {
            let bs = b.as_ref().unwrap();
            let mut ind = vec![vec![0.0f64; npts]; 9];
            for i in 0..3 {
                for j in 0..3 {
                    for idx in 0..npts {
                        tensor[i * 3 + j][idx] = u[i][idx] * v[j][idx] - bs[i][idx] * bs[j][idx];
                        ind[i * 3 + j][idx] = u[i][idx] * bs[j][idx] - bs[i][idx] * v[j][idx];
                    }
                }
            }
            induction = Some(ind);
        }
    }

    let assemble = |tensor: &[Vec<f64>], extra: Option<&[Vec<f64>]>| -> SpectralVectorField {
        let mut out = SpectralVectorField::zero(grid);
        let cut = grid.dealias_cutoff();
        for iz in 0..n {
            for iy in 0..n {
                for ix in 0..n {
                    let k = [
                        grid.wavenumber(ix),
                        grid.wavenumber(iy),
                        grid.wavenumber(iz),
                    ];
                    if k.iter().any(|&c| c.abs() > cut) {
                        continue; // manual 2/3-rule truncation
                    }
                    let idx = grid.index(iz, iy, ix);
                    let kf = [k[0] as f64, k[1] as f64, k[2] as f64];
                    let mut nvec = [Complex64::default(); 3];
                    for j in 0..3 {
                        let mut acc = Complex64::default();
                        for i in 0..3 {
                            let t = dft_coeff(&grid, &tensor[i * 3 + j], k);
                            acc += Complex64::new(0.0, kf[i]) * t;
                        }
                        if let Some(ex) = extra {
                            acc += dft_coeff(&grid, &ex[j], k);
                        }
                        nvec[j] = acc;
                    }
                    // manual Leray projection of the negated nonlinearity
                    let ksq = kf[0] * kf[0] + kf[1] * kf[1] + kf[2] * kf[2];
                    if ksq > 0.0 {
                        let dot = kf[0] * nvec[0] + kf[1] * nvec[1] + kf[2] * nvec[2];
                        for j in 0..3 {
                            nvec[j] -= kf[j] * dot / ksq;
                        }
                    }
                    for j in 0..3 {
                        out.hat[j][idx] = -nvec[j];
                    }
                }
            }
        }
        out
    };

    let dv = assemble(
        &tensor,
        if state.kind == ModelKind::EulerAlpha {
            Some(&extra)
        } else {
            None
        },
    );
    let db = induction.map(|ind| assemble(&ind, None));
    (dv, db)
}

fn max_coeff_diff(a: &SpectralVectorField, b: &SpectralVectorField) -> (f64, f64) {
    let mut err = 0.0f64;
    let mut scale = 0.0f64;
    for comp in 0..3 {
        for (x, y) in a.hat[comp].iter().zip(b.hat[comp].iter()) {
            err = err.max((x - y).norm());
            scale = scale.max(y.norm());
        }
    }
    (err, scale)
}

#[test]
fn rhs_matches_dense_oracle_for_every_model() {
    let grid = Grid::new(8).unwrap();
    for kind in ModelKind::all() {
        let state = state_for(kind, grid, 0.5, 42);
        let t = rhs(&state).unwrap();
        let (dv_oracle, db_oracle) = oracle_tendency(&state);
        let (err, scale) = max_coeff_diff(&t.dv, &dv_oracle);
        assert!(
            err <= 1e-10 * scale.max(1e-12),
            "{kind}: dv mismatch {err:.3e} at scale {scale:.3e}"
        );
        if let Some(dbo) = db_oracle {
            let (err, scale) = max_coeff_diff(t.db.as_ref().unwrap(), &dbo);
            assert!(
                err <= 1e-10 * scale.max(1e-12),
                "{kind}: db mismatch {err:.3e} at scale {scale:.3e}"
            );
        }
    }
}

#[test]
fn zero_state_has_zero_tendency() {
    let grid = Grid::new(8).unwrap();
    for kind in ModelKind::all() {
        let v = SpectralVectorField::zero(grid);
        let b = kind
            .requires_magnetic()
            .then(|| SpectralVectorField::zero(grid));
        let state =
            ModelState::new(kind, v, b, FilterSpec::helmholtz(0.7).unwrap()).unwrap();
        let t = rhs(&state).unwrap();
        assert_eq!(t.dv.l2_norm_sq(), 0.0);
        let stepped = step_rk4(&state, 1e-2).unwrap();
        assert_eq!(stepped.v.l2_norm_sq(), 0.0);
    }
}

#[test]
fn steady_shear_is_a_fixed_point() {
    let grid = Grid::new(16).unwrap();
    let v = shear_sin_y_ex(grid);
    let state = ModelState::new(
        ModelKind::LerayAlpha,
        v,
        None,
        FilterSpec::helmholtz(1.0).unwrap(),
    )
    .unwrap();
    let t = rhs(&state).unwrap();
    assert!(t.dv.l2_norm_sq().sqrt() < 1e-13);
    let stepped = step_rk4(&state, 0.01).unwrap();
    let (err, _) = max_coeff_diff(&stepped.v, &state.v);
    assert!(err < 1e-12);
}

#[test]
fn magnetic_field_mismatch_is_rejected() {
    let grid = Grid::new(8).unwrap();
    let v = seeded_field(grid, 1);
    let err = ModelState::new(
        ModelKind::MhdLerayAlpha,
        v.clone(),
        None,
        FilterSpec::helmholtz(0.5).unwrap(),
    )
    .unwrap_err();
    assert!(matches!(err, Error::MagneticFieldMismatch { .. }));
    let err = ModelState::new(
        ModelKind::LerayAlpha,
        v.clone(),
        Some(v),
        FilterSpec::helmholtz(0.5).unwrap(),
    )
    .unwrap_err();
    assert!(matches!(err, Error::MagneticFieldMismatch { .. }));
}

#[test]
fn rk4_self_convergence_order() {
    let grid = Grid::new(16).unwrap();
    let v = generate(&SynthSpec::taylor_green(1.0), grid).unwrap();
    let state = ModelState::new(
        ModelKind::LerayAlpha,
        v,
        None,
        FilterSpec::helmholtz(0.5).unwrap(),
    )
    .unwrap();

    let advance = |dt: f64, steps: usize| -> SpectralVectorField {
        let mut s = state.clone();
        for _ in 0..steps {
            s = step_rk4(&s, dt).unwrap();
        }
        s.v
    };
    let coarse = advance(0.1, 4);
    let medium = advance(0.05, 8);
    let fine = advance(0.025, 16);
    let e1 = max_coeff_diff(&coarse, &medium).0;
    let e2 = max_coeff_diff(&medium, &fine).0;
    let order = (e1 / e2).log2();
    assert!(
        order >= 3.5,
        "observed temporal order {order:.2} (e1 {e1:.3e}, e2 {e2:.3e})"
    );
}

#[test]
fn conserved_quantity_examples() {
    let grid = Grid::new(16).unwrap();
    let vol = grid.volume();

    let zero = ModelState::new(
        ModelKind::LerayAlpha,
        SpectralVectorField::zero(grid),
        None,
        FilterSpec::helmholtz(1.0).unwrap(),
    )
    .unwrap();
    assert_eq!(conserved_quantity(&zero), 0.0);

    let leray = ModelState::new(
        ModelKind::LerayAlpha,
        sin_x_ey(grid),
        None,
        FilterSpec::helmholtz(1.0).unwrap(),
    )
    .unwrap();
    assert!((conserved_quantity(&leray) - vol / 2.0).abs() < 1e-10 * vol);

    // v such that u = sin(x) e_y under alpha = 1
    let filter = FilterSpec::helmholtz(1.0).unwrap();
    let v = apply_filter(&filter, &sin_x_ey(grid));
    let ea = ModelState::new(ModelKind::EulerAlpha, v, None, filter).unwrap();
    assert!((conserved_quantity(&ea) - vol).abs() < 1e-10 * vol);
}

#[test]
fn tendency_is_orthogonal_in_the_conserved_pairing() {
    let grid = Grid::new(16).unwrap();
    for kind in ModelKind::all() {
        for seed in [11, 12, 13] {
            let state = state_for(kind, grid, 0.5, seed);
            let t = rhs(&state).unwrap();
            let pairing = conserved_pairing(&state, &t);
            let scale = state.v.l2_norm_sq().sqrt() * t.dv.l2_norm_sq().sqrt();
            assert!(
                pairing.abs() <= 1e-9 * scale,
                "{kind} seed {seed}: pairing {pairing:.3e} vs scale {scale:.3e}"
            );
        }
    }
}

#[test]
fn alpha_zero_collapses_onto_euler() {
    let grid = Grid::new(8).unwrap();
    let v = seeded_field(grid, 99);
    let filter = FilterSpec::helmholtz(0.0).unwrap();
    let euler = rhs(&ModelState::new(ModelKind::Euler, v.clone(), None, FilterSpec::identity()).unwrap())
        .unwrap();
    for kind in [
        ModelKind::LerayAlpha,
        ModelKind::EulerAlpha,
        ModelKind::ModifiedLerayAlpha,
        ModelKind::ClarkAlpha,
    ] {
        let t = rhs(&ModelState::new(kind, v.clone(), None, filter).unwrap()).unwrap();
        let (err, scale) = max_coeff_diff(&t.dv, &euler.dv);
        assert!(
            err <= 1e-12 * scale.max(1.0),
            "{kind} at alpha=0 differs from euler by {err:.3e}"
        );
    }
}

#[test]
fn simulation_conserves_on_steady_shear_and_zero_field() {
    let grid = Grid::new(16).unwrap();
    let shear = ModelState::new(
        ModelKind::LerayAlpha,
        shear_sin_y_ex(grid),
        None,
        FilterSpec::helmholtz(0.5).unwrap(),
    )
    .unwrap();
    let traj = run_simulation(&shear, 0.02, 0.4, 5, 0).unwrap();
    assert!(traj.max_relative_drift() <= 1e-12);

    let zero = ModelState::new(
        ModelKind::LerayAlpha,
        SpectralVectorField::zero(grid),
        None,
        FilterSpec::helmholtz(0.5).unwrap(),
    )
    .unwrap();
    let traj = run_simulation(&zero, 0.02, 0.2, 1, 0).unwrap();
    assert!(traj.energies.iter().all(|&e| e == 0.0));
}

#[test]
fn halving_dt_shrinks_energy_drift_eightfold() {
    let grid = Grid::new(16).unwrap();
    let v = generate(&SynthSpec::band_limited_random(1, 3, 30.0, 5), grid).unwrap();
    let state = ModelState::new(
        ModelKind::LerayAlpha,
        v,
        None,
        FilterSpec::helmholtz(0.5).unwrap(),
    )
    .unwrap();
    let coarse = run_simulation(&state, 0.02, 1.0, 10, 0).unwrap();
    let fine = run_simulation(&state, 0.01, 1.0, 20, 0).unwrap();
    let d1 = coarse.max_relative_drift();
    let d2 = fine.max_relative_drift();
    assert!(
        d1 >= 8.0 * d2,
        "drift ratio {:.2} (coarse {d1:.3e}, fine {d2:.3e})",
        d1 / d2
    );
}

#[test]
fn divergence_free_is_preserved_by_stepping() {
    let grid = Grid::new(16).unwrap();
    for kind in [ModelKind::EulerAlpha, ModelKind::MhdLerayAlpha] {
        let mut state = state_for(kind, grid, 0.5, 21);
        for _ in 0..5 {
            state = step_rk4(&state, 0.02).unwrap();
        }
        assert!(state.v.max_divergence() < 1e-11, "{kind} v divergence");
        if let Some(b) = &state.b {
            assert!(b.max_divergence() < 1e-11, "{kind} b divergence");
        }
    }
}

#[test]
fn runaway_simulation_reports_blow_up() {
    let grid = Grid::new(8).unwrap();
    let v = generate(&SynthSpec::band_limited_random(1, 2, 2000.0, 8), grid).unwrap();
    let state = ModelState::new(
        ModelKind::Euler,
        v,
        None,
        FilterSpec::identity(),
    )
    .unwrap();
    let err = run_simulation(&state, 0.25, 10.0, 1, 0);
    match err {
        Err((Error::BlowUp { time, .. }, partial)) => {
            assert!(time > 0.0);
            assert!(!partial.energies.is_empty());
        }
        other => panic!("expected blow-up, got {other:?}"),
    }
}
