//! Increment, defect, structure-function and energy-balance diagnostics on
//! analytically solvable cases.

mod common;

use aol_core::{
    apply_inverse_filter, besov_exponent_estimate, catalog, defect_estimate, defect_series_batch,
    energy_balance_residual, fit_power_law, generate, sigma_probe, stencil_directions,
    step_rk4, structure_function, DefectFields, DefectLabel, Error, FilterSpec, Grid, ModelKind,
    ModelState, Mollifier, MollifierProfile, Role, SpectralVectorField, StructureFunctionTable,
    SynthSpec, XiQuadrature,
};
use common::*;
use num_complex::Complex64;
use std::f64::consts::PI;

fn constant_field(grid: Grid, value: [f64; 3]) -> SpectralVectorField {
    let mut w = SpectralVectorField::zero(grid);
    for comp in 0..3 {
        w.hat[comp][0] = Complex64::new(value[comp], 0.0);
    }
    w
}

#[test]
fn increment_examples() {
    let grid = Grid::new(16).unwrap();
    let c = constant_field(grid, [1.0, -2.0, 0.5]);
    let d = c.increment_samples([0.7, -0.3, 0.1]);
    assert!(d.iter().flatten().all(|&x| x.abs() < 1e-14));

    let w = sin_x_ey(grid);
    let d = w.increment_samples([0.0, 0.0, 0.0]);
    assert!(d.iter().flatten().all(|&x| x.abs() < 1e-14));

    // half-period increment of sin(x) e_y is -2 sin(x) e_y
    let d = w.increment_samples([PI, 0.0, 0.0]);
    for ix in 0..grid.n() {
        let expected = -2.0 * grid.coordinate(ix).sin();
        assert!((d[1][grid.index(0, 0, ix)] - expected).abs() < 1e-12);
    }
}

#[test]
fn defects_vanish_on_constant_role_fields() {
    let grid = Grid::new(16).unwrap();
    let quad = XiQuadrature::standard();
    let moll = Mollifier::new(MollifierProfile::Bump, 0.6).unwrap();

    // all fields constant: every increment is identically zero
    let fields = DefectFields::new(
        constant_field(grid, [1.0, 0.0, 0.0]),
        constant_field(grid, [0.0, 1.0, 0.0]),
        None,
    );
    let v = defect_estimate(&catalog(DefectLabel::D1), &fields, &moll, &quad).unwrap();
    assert_eq!(v, 0.0);

    // D1 with constant v (any u): |delta v|^2 = 0 annihilates the integrand
    let fields = DefectFields::new(
        seeded_field(grid, 4),
        constant_field(grid, [0.3, 0.0, 0.0]),
        None,
    );
    let v = defect_estimate(&catalog(DefectLabel::D1), &fields, &moll, &quad).unwrap();
    assert_eq!(v, 0.0);
}

#[test]
fn defect_estimate_rejects_unresolvable_scales() {
    let grid = Grid::new(16).unwrap();
    let fields = DefectFields::new(seeded_field(grid, 1), seeded_field(grid, 2), None);
    let quad = XiQuadrature::standard();
    for eps in [0.2, 3.2] {
        let moll = Mollifier::new(MollifierProfile::Bump, eps).unwrap();
        let err = defect_estimate(&catalog(DefectLabel::D2), &fields, &moll, &quad).unwrap_err();
        assert!(matches!(err, Error::EpsilonOutOfRange { .. }), "eps {eps}");
    }
    // magnetic labels need B
    let moll = Mollifier::new(MollifierProfile::Bump, 0.6).unwrap();
    let err = defect_estimate(&catalog(DefectLabel::D10), &fields, &moll, &quad).unwrap_err();
    assert!(matches!(err, Error::DefectNeedsMagneticField { .. }));
}

/// The estimate is invariant under the change of variables `xi = eps z`:
/// assembling the same rule from unit-ball nodes with the Jacobian made
/// explicit reproduces the value.
#[test]
fn defect_estimate_survives_unit_ball_reparametrisation() {
    let grid = Grid::new(16).unwrap();
    let v = seeded_field(grid, 9);
    let u = apply_inverse_filter(&FilterSpec::helmholtz(0.5).unwrap(), &v);
    let fields = DefectFields::new(u.clone(), v.clone(), None);
    let eps = 0.8;
    let quad = XiQuadrature::standard();
    let moll = Mollifier::new(MollifierProfile::Bump, eps).unwrap();
    let spec = catalog(DefectLabel::D1);
    let direct = defect_estimate(&spec, &fields, &moll, &quad).unwrap();

    // unit-ball route: grad phi_eps(eps z) = eps^-4 (grad phi)(z), volume
    // element eps^3 dz; the moll_unit derivative at radius s supplies
    // (grad phi)(z) through eps^4 * radial_deriv(eps s).
    let moll_unit = Mollifier::new(MollifierProfile::Bump, 1.0).unwrap();
    let mut total = 0.0;
    let unit_rule = XiQuadrature::standard();
    for (s, w) in unit_rule.radial_nodes(1.0) {
        for &(dir, w_dir) in &unit_rule.directions {
            let xi = [eps * s * dir[0], eps * s * dir[1], eps * s * dir[2]];
            let du = u.increment_samples(xi);
            let dv = v.increment_samples(xi);
            let mut inner = 0.0;
            for idx in 0..grid.len() {
                let radial = dir[0] * du[0][idx] + dir[1] * du[1][idx] + dir[2] * du[2][idx];
                let q = dv[0][idx] * dv[0][idx] + dv[1][idx] * dv[1][idx] + dv[2][idx] * dv[2][idx];
                inner += radial * q;
            }
            inner *= grid.cell_volume();
            // eps^3 (volume) * eps^-4 (gradient scale) = eps^-1, absorbed by
            // evaluating the eps-scaled mollifier at radius eps*s
            total += spec.prefactor * w * w_dir * s * s * moll_unit.radial_deriv(s) / eps
                * inner;
        }
    }
    assert!(
        (direct - total).abs() <= 1e-10 * direct.abs().max(1e-12),
        "direct {direct:.6e} vs reparametrised {total:.6e}"
    );
}

#[test]
fn smooth_fields_give_quadratic_defect_decay() {
    // a pure Taylor-Green field has only the eight (+-1,+-1,+-1) modes, and
    // no three of them sum to zero, so every cubic defect integral vanishes
    // identically; a short evolution closes triads while staying smooth
    let grid = Grid::new(16).unwrap();
    let v0 = generate(&SynthSpec::taylor_green(1.0), grid).unwrap();
    let mut state = ModelState::new(
        ModelKind::LerayAlpha,
        v0,
        None,
        FilterSpec::helmholtz(0.5).unwrap(),
    )
    .unwrap();
    for _ in 0..6 {
        state = step_rk4(&state, 0.05).unwrap();
    }
    let u = state.velocity();
    let fields = DefectFields::new(u, state.v.clone(), None);
    let ladder = [1.0, 0.8, 0.64, 0.51, 0.41];
    let specs = [catalog(DefectLabel::D1), catalog(DefectLabel::D2)];
    let series = defect_series_batch(
        &specs,
        &fields,
        &[MollifierProfile::Bump],
        &ladder,
        &XiQuadrature::standard(),
        false,
    )
    .unwrap();
    for s in &series[0] {
        let slope = s.slope.expect("nondegenerate series");
        assert!(slope >= 1.7, "{}: slope {slope:.2}", s.label);
    }
}

#[test]
fn degenerate_series_reports_no_slope() {
    let grid = Grid::new(16).unwrap();
    let fields = DefectFields::new(
        constant_field(grid, [1.0, 0.0, 0.0]),
        constant_field(grid, [0.0, 1.0, 0.0]),
        None,
    );
    let series = defect_series_batch(
        &[catalog(DefectLabel::D1)],
        &fields,
        &[MollifierProfile::Bump],
        &[0.9, 0.7, 0.5],
        &XiQuadrature::standard(),
        false,
    )
    .unwrap();
    assert!(series[0][0].values.iter().all(|&v| v == 0.0));
    assert!(series[0][0].slope.is_none());
}

#[test]
fn structure_function_matches_trig_identity() {
    let grid = Grid::new(16).unwrap();
    let w = sin_x_ey(grid);
    let radii = [0.3, 0.7, 1.1, 2.0];
    let table = structure_function(&w, 2, &radii, &[[1.0, 0.0, 0.0]]).unwrap();
    for (&r, &v) in table.radii.iter().zip(table.values.iter()) {
        let expected = 1.0 - r.cos();
        assert!(
            (v - expected).abs() < 1e-12,
            "S2({r}) = {v} vs {expected}"
        );
    }

    // constant field: all moments vanish
    let c = constant_field(grid, [0.4, 0.4, 0.0]);
    let table = structure_function(&c, 3, &radii, &stencil_directions()).unwrap();
    assert!(table.values.iter().all(|&v| v.abs() < 1e-28));
}

#[test]
fn moment_orders_obey_hoelder_ordering() {
    let grid = Grid::new(16).unwrap();
    let w = seeded_field(grid, 33);
    let radii = [0.4, 0.8, 1.4];
    let dirs = stencil_directions();
    let s2 = structure_function(&w, 2, &radii, &dirs).unwrap();
    let s3 = structure_function(&w, 3, &radii, &dirs).unwrap();
    for (a, b) in s2.values.iter().zip(s3.values.iter()) {
        assert!(a.sqrt() <= b.cbrt() + 1e-12);
    }
}

#[test]
fn slope_fit_recovers_exact_power_laws() {
    let radii: Vec<f64> = (1..=8).map(|i| 0.1 * i as f64).collect();
    let h = 0.4;
    let table = StructureFunctionTable {
        p: 3,
        radii: radii.clone(),
        values: radii.iter().map(|r| r.powf(3.0 * h)).collect(),
    };
    let fit = fit_power_law(&table, (0.05, 1.0)).unwrap();
    assert!((fit.exponent - 3.0 * h).abs() < 1e-12);
    assert!(fit.r2 > 1.0 - 1e-12);

    let constant = StructureFunctionTable {
        p: 3,
        radii: radii.clone(),
        values: vec![2.5; radii.len()],
    };
    let fit = fit_power_law(&constant, (0.05, 1.0)).unwrap();
    assert!(fit.exponent.abs() < 1e-12);

    let degenerate = StructureFunctionTable {
        p: 3,
        radii,
        values: vec![0.0; 8],
    };
    assert!(matches!(
        fit_power_law(&degenerate, (0.05, 1.0)),
        Err(Error::DegenerateFit(_))
    ));
}

#[test]
fn besov_estimate_tracks_the_generator_exponent() {
    let grid = Grid::new(32).unwrap();
    let w = generate(&SynthSpec::power_law_rough(0.5, 1.0, 2), grid).unwrap();
    let radii: Vec<f64> = (1..=10).map(|i| 0.35 + 0.12 * i as f64).collect();
    let est = besov_exponent_estimate(&w, &radii, &stencil_directions(), (0.3, 1.7)).unwrap();
    assert!(
        est.s > 0.2 && est.s < 0.8,
        "fitted s = {:.3} should be near 0.5",
        est.s
    );
}

#[test]
fn sigma_probe_trends() {
    let grid = Grid::new(16).unwrap();
    let radii: Vec<f64> = (1..=8).map(|i| 0.25 * i as f64).collect();
    let dirs = stencil_directions();

    // constant fields: sigma identically zero counts as vanishing
    let fields = DefectFields::new(
        constant_field(grid, [1.0, 0.0, 0.0]),
        constant_field(grid, [0.0, 1.0, 0.0]),
        None,
    );
    let probe = sigma_probe(&fields, (Role::U, Role::V, Role::V), &radii, &dirs).unwrap();
    assert!(probe.sigmas.iter().all(|&s| s == 0.0));
    assert!(probe.trend_vanishing);

    // smooth band-limited Leray roles: sigma ~ r^2 vanishes
    let v = seeded_field(grid, 12);
    let u = apply_inverse_filter(&FilterSpec::helmholtz(0.5).unwrap(), &v);
    let fields = DefectFields::new(u, v, None);
    let probe = sigma_probe(&fields, (Role::U, Role::V, Role::V), &radii, &dirs).unwrap();
    assert!(probe.trend_vanishing);
    // log-log slope of sigma(r) should sit near 2 for Lipschitz fields
    let table = StructureFunctionTable {
        p: 1,
        radii: radii.clone(),
        values: probe.sigmas.clone(),
    };
    let fit = fit_power_law(&table, (0.2, 1.3)).unwrap();
    assert!(
        (fit.exponent - 2.0).abs() < 0.5,
        "sigma slope {:.2}",
        fit.exponent
    );
}

#[test]
fn balance_residual_vanishes_on_steady_shear() {
    let grid = Grid::new(16).unwrap();
    let state = ModelState::new(
        ModelKind::LerayAlpha,
        shear_sin_y_ex(grid),
        None,
        FilterSpec::helmholtz(0.5).unwrap(),
    )
    .unwrap();
    let dt = 0.05;
    let s1 = step_rk4(&state, dt).unwrap();
    let s2 = step_rk4(&s1, dt).unwrap();
    let moll = Mollifier::new(MollifierProfile::Bump, 0.8).unwrap();
    let r = energy_balance_residual(&[state, s1, s2], dt, &moll).unwrap();
    assert!(r <= 1e-8, "steady-shear residual {r:.3e}");
}

#[test]
fn balance_residual_needs_three_leray_snapshots() {
    let grid = Grid::new(16).unwrap();
    let state = ModelState::new(
        ModelKind::LerayAlpha,
        shear_sin_y_ex(grid),
        None,
        FilterSpec::helmholtz(0.5).unwrap(),
    )
    .unwrap();
    let moll = Mollifier::new(MollifierProfile::Bump, 0.8).unwrap();
    let err =
        energy_balance_residual(&[state.clone(), state.clone()], 0.1, &moll).unwrap_err();
    assert!(matches!(err, Error::TooFewSnapshots(2)));

    let euler = ModelState::new(
        ModelKind::Euler,
        shear_sin_y_ex(grid),
        None,
        FilterSpec::identity(),
    )
    .unwrap();
    let err = energy_balance_residual(&[euler.clone(), euler.clone(), euler], 0.1, &moll)
        .unwrap_err();
    assert!(matches!(err, Error::WrongModelForBalance(_)));
}

#[test]
fn balance_residual_converges_in_dt() {
    let grid = Grid::new(16).unwrap();
    let v = generate(&SynthSpec::taylor_green(1.0), grid).unwrap();
    let state = ModelState::new(
        ModelKind::LerayAlpha,
        v,
        None,
        FilterSpec::helmholtz(0.5).unwrap(),
    )
    .unwrap();
    let moll = Mollifier::new(MollifierProfile::Bump, 0.9).unwrap();

    let residual_at = |dt: f64| -> f64 {
        let s1 = step_rk4(&state, dt).unwrap();
        let s2 = step_rk4(&s1, dt).unwrap();
        energy_balance_residual(&[state.clone(), s1, s2], dt, &moll).unwrap()
    };
    let coarse = residual_at(0.1);
    let fine = residual_at(0.05);
    assert!(
        coarse >= 4.0 * fine,
        "residual ratio {:.2} (coarse {coarse:.3e}, fine {fine:.3e})",
        coarse / fine
    );
}
