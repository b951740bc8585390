//! Right-hand sides of the six inviscid models in projected spectral form,
//! a fixed-step RK4 integrator and per-model conserved-quantity evaluation.
//!
//! The evolved variable is always the momentum `v` (plus `B` for MHD); the
//! advecting velocity `u` is derived through the inverse filter and never
//! stored. Nonlinear products are formed pointwise in real space and
//! de-aliased by the 2/3 rule before projection, which keeps the
//! semi-discrete conservation identities exact to round-off.

use crate::error::{Error, Result};
use crate::fft::forward_real_batch;
use crate::field::{apply_inverse_filter, l2_inner, SpectralVectorField};
use crate::filter::FilterSpec;
use crate::grid::Grid;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Euler,
    LerayAlpha,
    EulerAlpha,
    ModifiedLerayAlpha,
    ClarkAlpha,
    MhdLerayAlpha,
}

impl ModelKind {
    pub fn all() -> [ModelKind; 6] {
        [
            ModelKind::Euler,
            ModelKind::LerayAlpha,
            ModelKind::EulerAlpha,
            ModelKind::ModifiedLerayAlpha,
            ModelKind::ClarkAlpha,
            ModelKind::MhdLerayAlpha,
        ]
    }

    pub fn requires_magnetic(&self) -> bool {
        matches!(self, ModelKind::MhdLerayAlpha)
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Euler => "euler",
            ModelKind::LerayAlpha => "leray_alpha",
            ModelKind::EulerAlpha => "euler_alpha",
            ModelKind::ModifiedLerayAlpha => "modified_leray_alpha",
            ModelKind::ClarkAlpha => "clark_alpha",
            ModelKind::MhdLerayAlpha => "mhd_leray_alpha",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::all()
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown model `{s}`")))
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-model state bundle advanced by the integrator.
#[derive(Debug, Clone)]
pub struct ModelState {
    pub kind: ModelKind,
    pub v: SpectralVectorField,
    /// Magnetic field, `MhdLerayAlpha` only.
    pub b: Option<SpectralVectorField>,
    pub filter: FilterSpec,
    pub time: f64,
}

impl ModelState {
    pub fn new(
        kind: ModelKind,
        v: SpectralVectorField,
        b: Option<SpectralVectorField>,
        filter: FilterSpec,
    ) -> Result<Self> {
        let state = ModelState {
            kind,
            v,
            b,
            filter,
            time: 0.0,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn validate(&self) -> Result<()> {
        match (self.kind.requires_magnetic(), self.b.is_some()) {
            (true, false) => Err(Error::MagneticFieldMismatch {
                kind: self.kind.name(),
                expectation: "requires",
            }),
            (false, true) => Err(Error::MagneticFieldMismatch {
                kind: self.kind.name(),
                expectation: "does not carry",
            }),
            _ => Ok(()),
        }
    }

    /// The advecting velocity `u = filter^{-1} v`; for Euler, `u = v`.
    pub fn velocity(&self) -> SpectralVectorField {
        if self.kind == ModelKind::Euler {
            self.v.clone()
        } else {
            apply_inverse_filter(&self.filter, &self.v)
        }
    }

    pub fn grid(&self) -> Grid {
        self.v.grid
    }
}

/// Projected, de-aliased model tendency.
#[derive(Debug, Clone)]
pub struct Tendency {
    pub dv: SpectralVectorField,
    pub db: Option<SpectralVectorField>,
}

fn forward_tensor(grid: &Grid, products: &[Vec<f64>]) -> Vec<Vec<Complex64>> {
    let refs: Vec<&[f64]> = products.iter().map(|p| p.as_slice()).collect();
    forward_real_batch(grid.n(), &refs)
}

/// `out_j = -i k_i t_hat[i*3+j]`, the (negated) spectral divergence of a
/// rank-2 advective tensor.
fn neg_tensor_divergence(grid: &Grid, t_hat: &[Vec<Complex64>]) -> SpectralVectorField {
    let n = grid.n();
    let ks = grid.axis_wavenumbers();
    let mut out = SpectralVectorField::zero(*grid);
    for iz in 0..n {
        let kz = ks[iz] as f64;
        for iy in 0..n {
            let ky = ks[iy] as f64;
            let row = grid.index(iz, iy, 0);
            for ix in 0..n {
                let kx = ks[ix] as f64;
                let idx = row + ix;
                for j in 0..3 {
                    let dot = kx * t_hat[j][idx] + ky * t_hat[3 + j][idx] + kz * t_hat[6 + j][idx];
                    out.hat[j][idx] = Complex64::new(dot.im, -dot.re); // -i * dot
                }
            }
        }
    }
    out
}

fn gradient_samples(w: &SpectralVectorField) -> Vec<Vec<f64>> {
    w.gradient().to_samples()
}

/// Model tendency `dv = -P[nonlinearity]` (and `db` for MHD), with `P` the
/// Leray projector; pressure and the MHD `1/2 grad |B|^2` term are
/// annihilated by `P` and never formed.
pub fn rhs(state: &ModelState) -> Result<Tendency> {
    state.validate()?;
    let grid = state.grid();
    let u_hat = state.velocity();
    let u = u_hat.to_samples();

    let tendency = match state.kind {
        ModelKind::Euler => {
            let products: Vec<Vec<f64>> = (0..9)
                .map(|m| {
                    let (i, j) = (m / 3, m % 3);
                    u[i].iter().zip(u[j].iter()).map(|(&a, &b)| a * b).collect()
                })
                .collect();
            let t_hat = forward_tensor(&grid, &products);
            Tendency {
                dv: neg_tensor_divergence(&grid, &t_hat),
                db: None,
            }
        }
        ModelKind::LerayAlpha | ModelKind::ModifiedLerayAlpha => {
            let v = state.v.to_samples();
            // Leray: d_i (u_i v_j); modified Leray: d_i (v_i u_j)
            let (adv, car) = match state.kind {
                ModelKind::LerayAlpha => (&u, &v),
                _ => (&v, &u),
            };
            let products: Vec<Vec<f64>> = (0..9)
                .map(|m| {
                    let (i, j) = (m / 3, m % 3);
                    adv[i]
                        .iter()
                        .zip(car[j].iter())
                        .map(|(&a, &b)| a * b)
                        .collect()
                })
                .collect();
            let t_hat = forward_tensor(&grid, &products);
            Tendency {
                dv: neg_tensor_divergence(&grid, &t_hat),
                db: None,
            }
        }
        ModelKind::EulerAlpha => {
            let v = state.v.to_samples();
            let gu = gradient_samples(&u_hat);
            // nine advective products plus the three components of
            // sum_m v_m d_j u_m, transformed in one packed batch
            let mut fields: Vec<Vec<f64>> = (0..9)
                .map(|m| {
                    let (i, j) = (m / 3, m % 3);
                    u[i].iter().zip(v[j].iter()).map(|(&a, &b)| a * b).collect()
                })
                .collect();
            for j in 0..3 {
                let mut s = vec![0.0f64; grid.len()];
                for m in 0..3 {
                    let g = &gu[j * 3 + m]; // d_j u_m
                    for (acc, (&vm, &gm)) in s.iter_mut().zip(v[m].iter().zip(g.iter())) {
                        *acc += vm * gm;
                    }
                }
                fields.push(s);
            }
            let refs: Vec<&[f64]> = fields.iter().map(|f| f.as_slice()).collect();
            let mut hats = forward_real_batch(grid.n(), &refs);
            let extra: Vec<Vec<Complex64>> = hats.split_off(9);
            let mut dv = neg_tensor_divergence(&grid, &hats);
            for j in 0..3 {
                for (d, src) in dv.hat[j].iter_mut().zip(extra[j].iter()) {
                    *d -= src;
                }
            }
            Tendency { dv, db: None }
        }
        ModelKind::ClarkAlpha => {
            let v = state.v.to_samples();
            let gu = gradient_samples(&u_hat);
            let alpha_sq = state.filter.alpha * state.filter.alpha;
            // fused tensor u_i v_j + v_i u_j - u_i u_j - alpha^2 d_i u_k d_j u_k
            let products: Vec<Vec<f64>> = (0..9)
                .map(|m| {
                    let (i, j) = (m / 3, m % 3);
                    (0..grid.len())
                        .map(|idx| {
                            let mut grad_term = 0.0;
                            for k in 0..3 {
                                grad_term += gu[i * 3 + k][idx] * gu[j * 3 + k][idx];
                            }
                            u[i][idx] * v[j][idx] + v[i][idx] * u[j][idx]
                                - u[i][idx] * u[j][idx]
                                - alpha_sq * grad_term
                        })
                        .collect()
                })
                .collect();
            let t_hat = forward_tensor(&grid, &products);
            Tendency {
                dv: neg_tensor_divergence(&grid, &t_hat),
                db: None,
            }
        }
        ModelKind::MhdLerayAlpha => {
            let v = state.v.to_samples();
            let b = state
                .b
                .as_ref()
                .expect("validated above")
                .to_samples();
            let mut fields: Vec<Vec<f64>> = Vec::with_capacity(18);
            for m in 0..9 {
                let (i, j) = (m / 3, m % 3);
                fields.push(
                    (0..grid.len())
                        .map(|idx| u[i][idx] * v[j][idx] - b[i][idx] * b[j][idx])
                        .collect(),
                );
            }
            for m in 0..9 {
                let (i, j) = (m / 3, m % 3);
                fields.push(
                    (0..grid.len())
                        .map(|idx| u[i][idx] * b[j][idx] - b[i][idx] * v[j][idx])
                        .collect(),
                );
            }
            let refs: Vec<&[f64]> = fields.iter().map(|f| f.as_slice()).collect();
            let mut hats = forward_real_batch(grid.n(), &refs);
            let g_hat = hats.split_off(9);
            Tendency {
                dv: neg_tensor_divergence(&grid, &hats),
                db: Some(neg_tensor_divergence(&grid, &g_hat)),
            }
        }
    };

    let mut tendency = tendency;
    tendency.dv.dealias();
    tendency.dv.leray_project_in_place();
    if let Some(db) = tendency.db.as_mut() {
        db.dealias();
        db.leray_project_in_place();
    }
    Ok(tendency)
}

fn axpy_field(
    base: &SpectralVectorField,
    coeff: f64,
    delta: &SpectralVectorField,
) -> SpectralVectorField {
    let mut out = base.clone();
    for comp in 0..3 {
        for (o, d) in out.hat[comp].iter_mut().zip(delta.hat[comp].iter()) {
            *o += coeff * d;
        }
    }
    out
}

fn state_plus(state: &ModelState, coeff: f64, t: &Tendency) -> ModelState {
    ModelState {
        kind: state.kind,
        v: axpy_field(&state.v, coeff, &t.dv),
        b: match (&state.b, &t.db) {
            (Some(b), Some(db)) => Some(axpy_field(b, coeff, db)),
            (Some(b), None) => Some(b.clone()),
            _ => None,
        },
        filter: state.filter,
        time: state.time,
    }
}

fn is_finite(field: &SpectralVectorField) -> bool {
    field
        .hat
        .iter()
        .all(|comp| comp.iter().all(|c| c.re.is_finite() && c.im.is_finite()))
}

/// One classical fourth-order Runge-Kutta step of size `dt`.
pub fn step_rk4(state: &ModelState, dt: f64) -> Result<ModelState> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidTimeStep(dt));
    }
    let k1 = rhs(state)?;
    let k2 = rhs(&state_plus(state, 0.5 * dt, &k1))?;
    let k3 = rhs(&state_plus(state, 0.5 * dt, &k2))?;
    let k4 = rhs(&state_plus(state, dt, &k3))?;

    let mut next = state.clone();
    let sixth = dt / 6.0;
    for comp in 0..3 {
        for idx in 0..state.grid().len() {
            next.v.hat[comp][idx] += sixth
                * (k1.dv.hat[comp][idx]
                    + 2.0 * k2.dv.hat[comp][idx]
                    + 2.0 * k3.dv.hat[comp][idx]
                    + k4.dv.hat[comp][idx]);
        }
    }
    if let Some(b) = next.b.as_mut() {
        let stages = [
            k1.db.as_ref().expect("mhd tendency carries db"),
            k2.db.as_ref().expect("mhd tendency carries db"),
            k3.db.as_ref().expect("mhd tendency carries db"),
            k4.db.as_ref().expect("mhd tendency carries db"),
        ];
        for comp in 0..3 {
            for idx in 0..state.grid().len() {
                b.hat[comp][idx] += sixth
                    * (stages[0].hat[comp][idx]
                        + 2.0 * stages[1].hat[comp][idx]
                        + 2.0 * stages[2].hat[comp][idx]
                        + stages[3].hat[comp][idx]);
            }
        }
    }
    next.time = state.time + dt;

    let finite = is_finite(&next.v) && next.b.as_ref().map_or(true, is_finite);
    if !finite {
        return Err(Error::BlowUp {
            time: next.time,
            reason: "non-finite coefficients after RK4 step".into(),
        });
    }
    Ok(next)
}

/// The model's conserved energy-like quantity:
/// `||v||^2` for Euler and Leray-alpha, `||u||^2 + alpha^2 ||grad u||^2`
/// for the H^1 family, `||v||^2 + ||B||^2` for MHD.
pub fn conserved_quantity(state: &ModelState) -> f64 {
    match state.kind {
        ModelKind::Euler | ModelKind::LerayAlpha => state.v.l2_norm_sq(),
        ModelKind::EulerAlpha | ModelKind::ModifiedLerayAlpha | ModelKind::ClarkAlpha => {
            let u = state.velocity();
            u.h1_alpha_norm_sq(state.filter.alpha)
        }
        ModelKind::MhdLerayAlpha => {
            state.v.l2_norm_sq()
                + state
                    .b
                    .as_ref()
                    .map(|b| b.l2_norm_sq())
                    .unwrap_or_default()
        }
    }
}

/// Inner product of the state against a tendency in the model's conserved
/// pairing; the semi-discrete system keeps this at zero (round-off only).
pub fn conserved_pairing(state: &ModelState, t: &Tendency) -> f64 {
    match state.kind {
        ModelKind::Euler | ModelKind::LerayAlpha => l2_inner(&state.v, &t.dv),
        ModelKind::EulerAlpha | ModelKind::ModifiedLerayAlpha | ModelKind::ClarkAlpha => {
            // d/dt <u, v> = 2 <u, dv> when v = filter(u) with a real symbol
            l2_inner(&state.velocity(), &t.dv)
        }
        ModelKind::MhdLerayAlpha => {
            l2_inner(&state.v, &t.dv)
                + match (&state.b, &t.db) {
                    (Some(b), Some(db)) => l2_inner(b, db),
                    _ => 0.0,
                }
        }
    }
}

/// Energy time series plus optional snapshots from a fixed-step run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub energies: Vec<f64>,
    pub snapshots: Vec<ModelState>,
}

impl Trajectory {
    /// Largest `|E(t) - E(0)| / E(0)` over the recorded series.
    pub fn max_relative_drift(&self) -> f64 {
        let e0 = self.energies.first().copied().unwrap_or(0.0);
        if e0 == 0.0 {
            return 0.0;
        }
        self.energies
            .iter()
            .map(|e| ((e - e0) / e0).abs())
            .fold(0.0, f64::max)
    }
}

/// Advance `state` to `t_end` with fixed step `dt`, recording the conserved
/// quantity every `energy_cadence` steps and a snapshot every
/// `snapshot_cadence` steps (0 disables snapshots). Blow-up (non-finite
/// state or a conserved-quantity jump above 10%) aborts with the partial
/// trajectory attached.
pub fn run_simulation(
    state: &ModelState,
    dt: f64,
    t_end: f64,
    energy_cadence: usize,
    snapshot_cadence: usize,
) -> std::result::Result<Trajectory, (Error, Trajectory)> {
    let mut traj = Trajectory {
        times: Vec::new(),
        energies: Vec::new(),
        snapshots: Vec::new(),
    };
    if !(dt > 0.0) || !(t_end > 0.0) {
        return Err((Error::InvalidTimeStep(dt.min(t_end)), traj));
    }
    let steps = (t_end / dt).round().max(1.0) as usize;
    let cadence = energy_cadence.max(1);

    let mut current = state.clone();
    let e0 = conserved_quantity(&current);
    traj.times.push(current.time);
    traj.energies.push(e0);
    if snapshot_cadence > 0 {
        traj.snapshots.push(current.clone());
    }

    for step in 1..=steps {
        current = match step_rk4(&current, dt) {
            Ok(s) => s,
            Err(e) => return Err((e, traj)),
        };
        let record_energy = step % cadence == 0 || step == steps;
        if record_energy {
            let e = conserved_quantity(&current);
            if !e.is_finite() || (e0 != 0.0 && ((e - e0) / e0).abs() > 0.10) {
                let err = Error::BlowUp {
                    time: current.time,
                    reason: format!("conserved quantity moved from {e0:.6e} to {e:.6e}"),
                };
                return Err((err, traj));
            }
            traj.times.push(current.time);
            traj.energies.push(e);
        }
        if snapshot_cadence > 0 && (step % snapshot_cadence == 0 || step == steps) {
            traj.snapshots.push(current.clone());
        }
    }
    Ok(traj)
}
