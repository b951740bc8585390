//! Acceptance suites behind the `verify` subcommand: each criterion runs at
//! its pinned tolerance and reports one pass/fail line.

use crate::config::parse_config;
use crate::snapshot::{read_snapshot, write_snapshot, Snapshot};
use aol_core::{
    apply_inverse_filter, catalog, conserved_pairing, defect_estimates, defect_series_batch,
    fractional_onsager_exponent, generate, mhd_tradeoff_check, onsager_besov_threshold,
    onsager_sobolev_threshold, rhs, run_simulation, sigma_probe, step_rk4, BesovCondition,
    Bound, DefectFields, DefectLabel, FilterSpec, Frac, Grid, ModelKind, ModelState, Mollifier,
    MollifierProfile, Role, SobolevCondition, SynthSpec, XiQuadrature,
};
use rayon::prelude::*;
use std::f64::consts::PI;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub criterion: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} {} — {} [{:.1}s]",
            if self.passed { "PASS" } else { "FAIL" },
            self.criterion,
            self.detail,
            self.seconds
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Conservation,
    Orthogonality,
    DefectOracle,
    SmoothDefects,
    RoughScaling,
    Regularity,
    Exponents,
    MollifierIndependence,
    Nesting,
    Plumbing,
    All,
}

impl Suite {
    pub fn names() -> &'static [(&'static str, Suite)] {
        &[
            ("conservation", Suite::Conservation),
            ("orthogonality", Suite::Orthogonality),
            ("defect-oracle", Suite::DefectOracle),
            ("smooth-defects", Suite::SmoothDefects),
            ("rough-scaling", Suite::RoughScaling),
            ("regularity", Suite::Regularity),
            ("exponents", Suite::Exponents),
            ("mollifier-independence", Suite::MollifierIndependence),
            ("nesting", Suite::Nesting),
            ("plumbing", Suite::Plumbing),
            ("all", Suite::All),
        ]
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::names()
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, s)| *s)
    }
}

pub fn run_suite(suite: Suite) -> Vec<CriterionResult> {
    match suite {
        Suite::Conservation => conservation(),
        Suite::Orthogonality => orthogonality(),
        Suite::DefectOracle => defect_oracle(),
        Suite::SmoothDefects => smooth_defects(),
        Suite::RoughScaling => rough_scaling(),
        Suite::Regularity => regularity(),
        Suite::Exponents => exponent_tables(),
        Suite::MollifierIndependence => mollifier_independence(),
        Suite::Nesting => nesting(),
        Suite::Plumbing => plumbing(),
        Suite::All => {
            let mut out = Vec::new();
            for (_, s) in Suite::names() {
                if *s != Suite::All {
                    out.extend(run_suite(*s));
                }
            }
            out
        }
    }
}

fn timed<F: FnOnce() -> (bool, String)>(criterion: &str, f: F) -> CriterionResult {
    let start = Instant::now();
    let (passed, detail) = f();
    CriterionResult {
        criterion: criterion.to_string(),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn conservation_state(kind: ModelKind, grid: Grid) -> ModelState {
    // amplitudes chosen so the RK4 energy drift sits far above the f64
    // floor at dt = 2e-3 yet orders of magnitude under the 1e-7 gate
    let amp = match kind {
        ModelKind::Euler => 30.0,
        ModelKind::LerayAlpha => 50.0,
        ModelKind::EulerAlpha => 60.0,
        ModelKind::ModifiedLerayAlpha => 150.0,
        ModelKind::ClarkAlpha => 50.0,
        ModelKind::MhdLerayAlpha => 30.0,
    };
    let filter = if kind == ModelKind::Euler {
        FilterSpec::identity()
    } else {
        FilterSpec::helmholtz(0.5).expect("valid alpha")
    };
    let v = generate(&SynthSpec::band_limited_random(1, 4, amp, 7), grid).expect("valid band");
    let b = kind
        .requires_magnetic()
        .then(|| generate(&SynthSpec::band_limited_random(1, 4, amp, 8), grid).expect("valid"));
    ModelState::new(kind, v, b, filter).expect("valid state")
}

/// Criterion 1: semi-discrete conservation. n = 32, band-limited random
/// init (kmax = 4, seed = 7), alpha = 0.5, RK4 dt = 2e-3 to T = 2; relative
/// drift <= 1e-7 and halving dt reduces drift by >= 8x.
fn conservation() -> Vec<CriterionResult> {
    let grid = Grid::new(32).expect("valid grid");
    ModelKind::all()
        .into_par_iter()
        .map(|kind| {
            timed(&format!("criterion-1 conservation ({kind})"), || {
                let state = conservation_state(kind, grid);
                let coarse = match run_simulation(&state, 2e-3, 2.0, 50, 0) {
                    Ok(t) => t,
                    Err((e, _)) => return (false, format!("blow-up in coarse run: {e}")),
                };
                let fine = match run_simulation(&state, 1e-3, 2.0, 100, 0) {
                    Ok(t) => t,
                    Err((e, _)) => return (false, format!("blow-up in fine run: {e}")),
                };
                let d1 = coarse.max_relative_drift();
                let d2 = fine.max_relative_drift();
                let ratio = if d2 > 0.0 { d1 / d2 } else { f64::INFINITY };
                let passed = d1 <= 1e-7 && ratio >= 8.0;
                (
                    passed,
                    format!(
                        "drift {d1:.3e} (gate 1e-7), halving ratio {ratio:.1} (gate 8); runtime target 60s/model"
                    ),
                )
            })
        })
        .collect()
}

/// Criterion 2: tendency orthogonality in the conserved pairing on 20
/// seeded random states per model, relative tolerance 1e-9.
fn orthogonality() -> Vec<CriterionResult> {
    let grid = Grid::new(16).expect("valid grid");
    ModelKind::all()
        .into_par_iter()
        .map(|kind| {
            timed(&format!("criterion-2 orthogonality ({kind})"), || {
                let mut worst = 0.0f64;
                for seed in 100..120u64 {
                    let filter = if kind == ModelKind::Euler {
                        FilterSpec::identity()
                    } else {
                        FilterSpec::helmholtz(0.5).expect("valid alpha")
                    };
                    let v = generate(&SynthSpec::band_limited_random(1, 4, 1.0, seed), grid)
                        .expect("valid band");
                    let b = kind.requires_magnetic().then(|| {
                        generate(&SynthSpec::band_limited_random(1, 4, 1.0, seed + 500), grid)
                            .expect("valid band")
                    });
                    let state = ModelState::new(kind, v, b, filter).expect("valid state");
                    let t = rhs(&state).expect("rhs");
                    let pairing = conserved_pairing(&state, &t);
                    let state_norm = match kind {
                        ModelKind::EulerAlpha
                        | ModelKind::ModifiedLerayAlpha
                        | ModelKind::ClarkAlpha => state.velocity().l2_norm_sq().sqrt(),
                        _ => (state.v.l2_norm_sq()
                            + state.b.as_ref().map_or(0.0, |b| b.l2_norm_sq()))
                        .sqrt(),
                    };
                    let tend_norm = (t.dv.l2_norm_sq()
                        + t.db.as_ref().map_or(0.0, |db| db.l2_norm_sq()))
                    .sqrt();
                    let scale = state_norm * tend_norm;
                    if scale > 0.0 {
                        worst = worst.max(pairing.abs() / scale);
                    }
                }
                (
                    worst <= 1e-9,
                    format!("worst relative pairing {worst:.3e} over 20 states (gate 1e-9)"),
                )
            })
        })
        .collect()
}

/// Reference fields for the defect-term criteria: a Leray-alpha style
/// bundle on the given grid.
fn oracle_fields(grid: Grid) -> DefectFields {
    let v = generate(&SynthSpec::band_limited_random(1, 2, 1.0, 301), grid).expect("valid");
    let b = generate(&SynthSpec::band_limited_random(1, 2, 1.0, 302), grid).expect("valid");
    let u = apply_inverse_filter(&FilterSpec::helmholtz(0.5).expect("valid"), &v);
    DefectFields::new(u, v, Some(b))
}

/// Dense brute-force route for every defect term: midpoint rule over a
/// 48^3 xi-lattice covering the eps-ball, spectral shifts for increments,
/// exact grid sums in x.
fn dense_lattice_oracle(fields: &DefectFields, moll: &Mollifier, cells: usize) -> Vec<f64> {
    let grid = fields.grid();
    let eps = moll.epsilon;
    let specs: Vec<_> = DefectLabel::all().into_iter().map(catalog).collect();
    let grad_u = fields.u.gradient();
    let h = 2.0 * eps / cells as f64;
    let cell_x = grid.cell_volume();
    let npts = grid.len();

    // midpoints along one axis
    let coords: Vec<f64> = (0..cells).map(|i| -eps + (i as f64 + 0.5) * h).collect();

    let partials: Vec<Vec<f64>> = coords
        .par_iter()
        .map(|&zx| {
            let mut acc = vec![0.0f64; specs.len()];
            for &zy in &coords {
                for &zxx in &coords {
                    let xi = [zxx, zy, zx];
                    let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
                    if r >= eps || r == 0.0 {
                        continue;
                    }
                    let weight = moll.radial_deriv(r) * h * h * h;
                    let dir = [xi[0] / r, xi[1] / r, xi[2] / r];
                    let du = fields.u.increment_samples(xi);
                    let dv = fields.v.increment_samples(xi);
                    let db = fields.b.as_ref().expect("oracle has B").increment_samples(xi);
                    let dg = grad_u.increment_samples(xi);
                    for (si, spec) in specs.iter().enumerate() {
                        let pick = |role: Role| -> &[Vec<f64>; 3] {
                            match role {
                                Role::U => &du,
                                Role::V => &dv,
                                Role::B => &db,
                                Role::GradU => unreachable!("handled separately"),
                            }
                        };
                        let mut integral = 0.0;
                        match spec.pattern {
                            aol_core::Pattern::P1 => {
                                let da = pick(spec.field_a);
                                if spec.field_b == Role::GradU {
                                    for idx in 0..npts {
                                        let radial = dir[0] * da[0][idx]
                                            + dir[1] * da[1][idx]
                                            + dir[2] * da[2][idx];
                                        let mut q = 0.0;
                                        for comp in &dg {
                                            q += comp[idx] * comp[idx];
                                        }
                                        integral += radial * q;
                                    }
                                } else {
                                    let dbv = pick(spec.field_b);
                                    let dcv = pick(spec.field_c);
                                    for idx in 0..npts {
                                        let radial = dir[0] * da[0][idx]
                                            + dir[1] * da[1][idx]
                                            + dir[2] * da[2][idx];
                                        let q = dbv[0][idx] * dcv[0][idx]
                                            + dbv[1][idx] * dcv[1][idx]
                                            + dbv[2][idx] * dcv[2][idx];
                                        integral += radial * q;
                                    }
                                }
                            }
                            aol_core::Pattern::P3 => {
                                for idx in 0..npts {
                                    let mut val = 0.0;
                                    for k in 0..3 {
                                        let mut a_k = 0.0;
                                        let mut b_k = 0.0;
                                        for i in 0..3 {
                                            let g = dg[k * 3 + i][idx];
                                            a_k += dir[i] * g;
                                            b_k += du[i][idx] * g;
                                        }
                                        val += a_k * b_k;
                                    }
                                    integral += val;
                                }
                            }
                        }
                        acc[si] += spec.prefactor * weight * integral * cell_x;
                    }
                }
            }
            acc
        })
        .collect();

    let mut totals = vec![0.0f64; specs.len()];
    for p in partials {
        for (t, v) in totals.iter_mut().zip(p.iter()) {
            *t += v;
        }
    }
    totals
}

/// Criterion 3: every estimator D1..D11 matches the dense lattice oracle
/// within 1% relative on n = 8 seeded fields at eps = 0.8.
fn defect_oracle() -> Vec<CriterionResult> {
    vec![timed("criterion-3 defect oracle equivalence", || {
        let grid = Grid::new(8).expect("valid grid");
        let fields = oracle_fields(grid);
        let moll = Mollifier::new(MollifierProfile::Bump, 0.8).expect("valid eps");
        let quad = XiQuadrature::standard(); // n_r = 16, the 26-direction set
        let specs: Vec<_> = DefectLabel::all().into_iter().map(catalog).collect();
        let estimates = match defect_estimates(&specs, &fields, &moll, &quad) {
            Ok(v) => v,
            Err(e) => return (false, format!("estimator failed: {e}")),
        };
        let oracle = dense_lattice_oracle(&fields, &moll, 48);
        let mut worst = 0.0f64;
        let mut lines = Vec::new();
        for ((spec, est), orc) in specs.iter().zip(&estimates).zip(&oracle) {
            let rel = (est - orc).abs() / orc.abs().max(1e-30);
            worst = worst.max(rel);
            lines.push(format!("{} {rel:.2e}", spec.label));
        }
        (
            worst <= 0.01,
            format!("worst relative error {worst:.3e} (gate 1e-2): {}", lines.join(", ")),
        )
    })]
}

/// A smooth but triad-closed field: Taylor-Green evolved briefly under
/// Leray-alpha (a pure TG field has no closed wavevector triads, so all its
/// cubic defect integrals vanish identically).
fn evolved_taylor_green(grid: Grid, steps: usize, dt: f64) -> ModelState {
    let v = generate(&SynthSpec::taylor_green(1.0), grid).expect("valid");
    let mut state = ModelState::new(
        ModelKind::LerayAlpha,
        v,
        None,
        FilterSpec::helmholtz(0.5).expect("valid"),
    )
    .expect("valid state");
    for _ in 0..steps {
        state = step_rk4(&state, dt).expect("stable step");
    }
    state
}

/// Criterion 4: smooth-field defect vanishing; D1, D2, D3 series slopes
/// >= 1.7 on n = 32 Taylor-Green fields.
fn smooth_defects() -> Vec<CriterionResult> {
    vec![timed("criterion-4 smooth-field defect vanishing", || {
        let grid = Grid::new(32).expect("valid grid");
        let state = evolved_taylor_green(grid, 6, 0.05);
        let fields = DefectFields::new(state.velocity(), state.v.clone(), None);
        let ladder = [0.9, 0.72, 0.58, 0.46, 0.37];
        let specs = [
            catalog(DefectLabel::D1),
            catalog(DefectLabel::D2),
            catalog(DefectLabel::D3),
        ];
        let series = match defect_series_batch(
            &specs,
            &fields,
            &[MollifierProfile::Bump],
            &ladder,
            &XiQuadrature::standard(),
            false,
        ) {
            Ok(s) => s,
            Err(e) => return (false, format!("series failed: {e}")),
        };
        let mut passed = true;
        let mut parts = Vec::new();
        for s in &series[0] {
            match s.slope {
                Some(slope) => {
                    passed &= slope >= 1.7;
                    parts.push(format!("{} slope {slope:.2}", s.label));
                }
                None => {
                    passed = false;
                    parts.push(format!("{} degenerate", s.label));
                }
            }
        }
        (
            passed,
            format!("{} (gate 1.7, theory eps^2); runtime target 30s", parts.join(", ")),
        )
    })]
}

/// The criterion-5 rough field: power-law v with Hoelder target h on n=64.
fn rough_leray_fields(h: f64, seed: u64) -> DefectFields {
    let grid = Grid::new(64).expect("valid grid");
    let v = generate(&SynthSpec::power_law_rough(h, 1.0, seed), grid).expect("valid");
    let u = apply_inverse_filter(&FilterSpec::helmholtz(1.0).expect("valid"), &v);
    DefectFields::new(u, v, None)
}

fn criterion5_ladder() -> Vec<f64> {
    // geometric, pi/4 down to 4*spacing(n=64) = pi/8
    aol_core::default_epsilon_ladder(&Grid::new(64).expect("valid")).expect("nondegenerate")
}

/// Criterion 5: rough-field scaling. D1 slope >= 2h - 0.3 = 0.3 for the
/// h = 0.3 field under Leray-alpha roles; for h = 0.1 under Euler roles the
/// sigma-probe trend flag is false.
fn rough_scaling() -> Vec<CriterionResult> {
    let first = timed("criterion-5a rough-field D1 slope", || {
        let fields = rough_leray_fields(0.3, 1);
        let ladder = criterion5_ladder();
        let series = match defect_series_batch(
            &[catalog(DefectLabel::D1)],
            &fields,
            &[MollifierProfile::Bump],
            &ladder,
            &XiQuadrature::standard(),
            false,
        ) {
            Ok(s) => s,
            Err(e) => return (false, format!("series failed: {e}")),
        };
        match series[0][0].slope {
            Some(slope) => (
                slope >= 0.3,
                format!("D1 slope {slope:.3} (gate 2h - 0.3 = 0.3); runtime target 2min"),
            ),
            None => (false, "degenerate series".into()),
        }
    });
    let second = timed("criterion-5b sigma-probe growth (euler roles)", || {
        let grid = Grid::new(64).expect("valid grid");
        let w = generate(&SynthSpec::power_law_rough(0.1, 1.0, 1), grid).expect("valid");
        let fields = DefectFields::new(w.clone(), w, None);
        let radii: Vec<f64> = (0..8)
            .map(|i| 0.2 * (PI / 2.0 / 0.2f64).powf(i as f64 / 7.0))
            .collect();
        let probe = match sigma_probe(
            &fields,
            (Role::U, Role::V, Role::V),
            &radii,
            &aol_core::stencil_directions(),
        ) {
            Ok(p) => p,
            Err(e) => return (false, format!("probe failed: {e}")),
        };
        (
            !probe.trend_vanishing,
            format!(
                "trend_vanishing = {} (sigma grows like r^(3h-1), h = 0.1)",
                probe.trend_vanishing
            ),
        )
    });
    vec![first, second]
}

/// Criterion 6: regularity estimator. h = 0.5 gives fitted zeta_3/3 in
/// [0.35, 0.65] for seeds 1..3, monotone in h in {0.3, 0.5, 0.7} per seed.
fn regularity() -> Vec<CriterionResult> {
    let grid = Grid::new(64).expect("valid grid");
    let radii: Vec<f64> = (0..10)
        .map(|i| 0.25 * (1.6 / 0.25f64).powf(i as f64 / 9.0))
        .collect();
    let window = (0.2, 1.7);
    let dirs = aol_core::stencil_directions();
    [1u64, 2, 3]
        .into_par_iter()
        .map(|seed| {
            timed(&format!("criterion-6 regularity estimator (seed {seed})"), || {
                let mut fitted = Vec::new();
                for h in [0.3, 0.5, 0.7] {
                    let w = generate(&SynthSpec::power_law_rough(h, 1.0, seed), grid)
                        .expect("valid");
                    let est = match aol_core::besov_exponent_estimate(&w, &radii, &dirs, window)
                    {
                        Ok(e) => e,
                        Err(e) => return (false, format!("fit failed: {e}")),
                    };
                    fitted.push(est.s);
                }
                let in_band = fitted[1] >= 0.35 && fitted[1] <= 0.65;
                let monotone = fitted[0] < fitted[1] && fitted[1] < fitted[2];
                (
                    in_band && monotone,
                    format!(
                        "s(0.3) = {:.3}, s(0.5) = {:.3} (band [0.35, 0.65]), s(0.7) = {:.3}, monotone {}",
                        fitted[0], fitted[1], fitted[2], monotone
                    ),
                )
            })
        })
        .collect()
}

/// Criterion 7: threshold tables and the fractional exponent law, exactly.
fn exponent_tables() -> Vec<CriterionResult> {
    vec![timed("criterion-7 exponent tables", || {
        let strict = |num: i64, den: i64| Bound {
            value: Frac::new(num, den),
            strict: true,
        };
        let mut ok = true;
        let mut notes = Vec::new();

        let besov_expect = [
            (ModelKind::Euler, BesovCondition::Single { s: strict(1, 3) }),
            (ModelKind::LerayAlpha, BesovCondition::Single { s: strict(0, 1) }),
            (ModelKind::EulerAlpha, BesovCondition::Single { s: strict(1, 1) }),
            (
                ModelKind::ModifiedLerayAlpha,
                BesovCondition::Single { s: strict(1, 1) },
            ),
            (ModelKind::ClarkAlpha, BesovCondition::Single { s: strict(1, 1) }),
            (
                ModelKind::MhdLerayAlpha,
                BesovCondition::Pair {
                    s: strict(0, 1),
                    r: strict(0, 1),
                    sum: strict(1, 1),
                },
            ),
        ];
        for (kind, expect) in besov_expect {
            if onsager_besov_threshold(kind) != expect {
                ok = false;
                notes.push(format!("besov mismatch for {kind}"));
            }
        }

        let sobolev_expect = [
            (
                ModelKind::Euler,
                SobolevCondition::UV {
                    u: None,
                    v: strict(5, 6),
                },
            ),
            (
                ModelKind::LerayAlpha,
                SobolevCondition::UV {
                    u: Some(strict(5, 2)),
                    v: strict(1, 2),
                },
            ),
            (
                ModelKind::EulerAlpha,
                SobolevCondition::UV {
                    u: Some(strict(3, 2)),
                    v: strict(-1, 2),
                },
            ),
            (
                ModelKind::ModifiedLerayAlpha,
                SobolevCondition::UV {
                    u: Some(strict(3, 2)),
                    v: strict(-1, 2),
                },
            ),
            (
                ModelKind::ClarkAlpha,
                SobolevCondition::UV {
                    u: Some(strict(3, 2)),
                    v: strict(-1, 2),
                },
            ),
            (
                ModelKind::MhdLerayAlpha,
                SobolevCondition::Pair {
                    s: strict(1, 2),
                    r: strict(1, 2),
                    sum: strict(5, 2),
                },
            ),
        ];
        for (kind, expect) in sobolev_expect {
            if onsager_sobolev_threshold(kind) != expect {
                ok = false;
                notes.push(format!("sobolev mismatch for {kind}"));
            }
        }

        // fractional law: limit 1/3, exact 1/6 at 1/4, exact 0 at 1/2
        let near_zero = fractional_onsager_exponent(1e-9).expect("valid theta").gamma;
        if (near_zero - 1.0 / 3.0).abs() > 1e-8 {
            ok = false;
            notes.push(format!("gamma(theta->0) = {near_zero}"));
        }
        let quarter = fractional_onsager_exponent(0.25).expect("valid theta").gamma;
        if quarter != 1.0 / 6.0 {
            ok = false;
            notes.push(format!("gamma(1/4) = {quarter} != 1/6"));
        }
        let half = fractional_onsager_exponent(0.5).expect("valid theta").gamma;
        if half != 0.0 {
            ok = false;
            notes.push(format!("gamma(1/2) = {half} != 0"));
        }

        // 20-point MHD trade-off truth table, expectations enumerated by hand
        let table: [(f64, f64, bool); 20] = [
            (0.5, 0.3, true),
            (0.2, 0.2, false),
            (1.0, 0.0, false),
            (0.0, 1.0, false),
            (0.01, 0.5, true),
            (0.9, 0.1, true),
            (0.9, 0.05, false),
            (0.3, 0.3, false),
            (0.3, 0.36, true),
            (2.0, 0.01, true),
            (-0.1, 1.0, false),
            (0.1, -0.2, false),
            (0.05, 0.47, false),
            (0.05, 0.48, true),
            (0.5, 0.25, false),
            (0.5, 0.26, true),
            (1.5, 0.4, true),
            (0.01, 0.01, false),
            (0.98, 0.006, false),
            (0.2, 0.45, true),
        ];
        for (s, r, expect) in table {
            if mhd_tradeoff_check(s, r) != expect {
                ok = false;
                notes.push(format!("mhd_tradeoff_check({s}, {r}) != {expect}"));
            }
        }

        let detail = if notes.is_empty() {
            "tables exact, fractional law exact, 20-point trade-off table exact".into()
        } else {
            notes.join("; ")
        };
        (ok, detail)
    })]
}

/// Criterion 8: mollifier independence; D1 slopes under the bump and
/// quartic profiles agree within +-0.2 on the criterion-5 field.
fn mollifier_independence() -> Vec<CriterionResult> {
    vec![timed("criterion-8 mollifier independence", || {
        let fields = rough_leray_fields(0.3, 1);
        let ladder = criterion5_ladder();
        let series = match defect_series_batch(
            &[catalog(DefectLabel::D1)],
            &fields,
            &[MollifierProfile::Bump, MollifierProfile::Quartic],
            &ladder,
            &XiQuadrature::standard(),
            false,
        ) {
            Ok(s) => s,
            Err(e) => return (false, format!("series failed: {e}")),
        };
        let bump = series[0][0].slope;
        let quartic = series[1][0].slope;
        match (bump, quartic) {
            (Some(a), Some(b)) => (
                (a - b).abs() <= 0.2,
                format!("bump slope {a:.3}, quartic slope {b:.3}, gap {:.3} (gate 0.2)", (a - b).abs()),
            ),
            _ => (false, "degenerate series".into()),
        }
    })]
}

/// Criterion 9: alpha = 0 collapses every hydrodynamic alpha-model tendency
/// onto the Euler tendency to 1e-12.
fn nesting() -> Vec<CriterionResult> {
    vec![timed("criterion-9 model nesting at alpha = 0", || {
        let grid = Grid::new(16).expect("valid grid");
        let mut worst = 0.0f64;
        for seed in [41u64, 42, 43] {
            let v = generate(&SynthSpec::band_limited_random(1, 4, 1.0, seed), grid)
                .expect("valid");
            let euler = rhs(&ModelState::new(
                ModelKind::Euler,
                v.clone(),
                None,
                FilterSpec::identity(),
            )
            .expect("valid"))
            .expect("rhs");
            let zero_alpha = FilterSpec::helmholtz(0.0).expect("valid");
            for kind in [
                ModelKind::LerayAlpha,
                ModelKind::EulerAlpha,
                ModelKind::ModifiedLerayAlpha,
                ModelKind::ClarkAlpha,
            ] {
                let t = rhs(&ModelState::new(kind, v.clone(), None, zero_alpha)
                    .expect("valid"))
                .expect("rhs");
                for comp in 0..3 {
                    for (a, b) in t.dv.hat[comp].iter().zip(euler.dv.hat[comp].iter()) {
                        worst = worst.max((a - b).norm());
                    }
                }
            }
        }
        (
            worst <= 1e-12,
            format!("largest tendency deviation {worst:.3e} (gate 1e-12)"),
        )
    })]
}

/// Criterion 10: plumbing; snapshot round trips bit-exactly, config
/// validation rejects model/diagnostic mismatches, exit codes mapped.
fn plumbing() -> Vec<CriterionResult> {
    vec![timed("criterion-10 plumbing", || {
        let mut ok = true;
        let mut notes = Vec::new();

        // bit-exact snapshot round trip (hydro and MHD)
        let grid = Grid::new(8).expect("valid grid");
        let dir = std::env::temp_dir().join(format!("aol-verify-{}", std::process::id()));
        if let Err(e) = std::fs::create_dir_all(&dir) {
            return (false, format!("tempdir failed: {e}"));
        }
        for kind in [ModelKind::LerayAlpha, ModelKind::MhdLerayAlpha] {
            let v = generate(&SynthSpec::band_limited_random(1, 2, 1.0, 77), grid)
                .expect("valid");
            let b = kind.requires_magnetic().then(|| {
                generate(&SynthSpec::band_limited_random(1, 2, 1.0, 78), grid).expect("valid")
            });
            let mut state = ModelState::new(
                kind,
                v,
                b,
                FilterSpec::helmholtz(0.5).expect("valid"),
            )
            .expect("valid state");
            state.time = 1.25;
            let path = dir.join(format!("{kind}.aol"));
            let before = Snapshot::from_state(&state);
            if let Err(e) = write_snapshot(&state, &path) {
                return (false, format!("write failed: {e}"));
            }
            match read_snapshot(&path) {
                Ok(after) => {
                    let bits_equal = before.samples.len() == after.samples.len()
                        && before
                            .samples
                            .iter()
                            .zip(after.samples.iter())
                            .all(|(a, b)| a.to_bits() == b.to_bits())
                        && before.time == after.time
                        && before.alpha == after.alpha;
                    if !bits_equal {
                        ok = false;
                        notes.push(format!("{kind}: round trip not bit-exact"));
                    }
                }
                Err(e) => {
                    ok = false;
                    notes.push(format!("{kind}: read failed: {e}"));
                }
            }
        }
        let _ = std::fs::remove_dir_all(&dir);

        // config validation: D9 without MHD is rejected with a named rule
        let bad = r#"
model = "euler"
n = 16
seed = 1
[init]
kind = "taylor_green"
[time]
dt = 0.01
t_end = 0.1
[diagnostics]
defects = ["D9"]
"#;
        match parse_config(bad) {
            Err(e) => {
                let msg = e.to_string();
                if !msg.contains("D9 requires mhd_leray_alpha") {
                    ok = false;
                    notes.push(format!("unexpected rejection message: {msg}"));
                }
            }
            Ok(_) => {
                ok = false;
                notes.push("euler + D9 config accepted".into());
            }
        }

        // exit-code mapping
        let codes = [
            (crate::error::CliError::Config("x".into()).exit_code(), 2),
            (
                crate::error::CliError::BlowUp {
                    time: 1.0,
                    reason: "x".into(),
                }
                .exit_code(),
                3,
            ),
            (
                crate::error::CliError::Verification {
                    failed: 1,
                    total: 2,
                }
                .exit_code(),
                4,
            ),
        ];
        for (got, want) in codes {
            if got != want {
                ok = false;
                notes.push(format!("exit code {got} != {want}"));
            }
        }

        let detail = if notes.is_empty() {
            "snapshot round trip bit-exact; config mismatches rejected; exit codes 2/3/4 mapped"
                .into()
        } else {
            notes.join("; ")
        };
        (ok, detail)
    })]
}
