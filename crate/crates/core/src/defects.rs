//! The eleven energy-flux defect terms, estimated through two generic
//! contraction kernels over a mollifier-weighted `xi`-quadrature.
//!
//! Pattern `P1` computes `pref * int int d_i phi_eps(xi) da_i (db . dc) dxi dx`
//! where the `b`/`c` slots may carry the flattened velocity gradient; pattern
//! `P3` computes `int int d_i phi_eps(xi) du_j d(d_k u_i) d(d_k u_j) dxi dx`.
//! Increments are exact spectral shifts, the `x`-average is an exact grid
//! sum, and `grad phi_eps` is evaluated analytically at every node.

use crate::error::{Error, Result};
use crate::fft::{fft3, Direction};
use crate::field::{SpectralVectorField, TensorField};
use crate::grid::Grid;
use crate::mollifier::{Mollifier, MollifierProfile, XiQuadrature};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DefectLabel {
    D1,
    D2,
    D3,
    D4,
    D5,
    D6,
    D7,
    D8,
    D9,
    D10,
    D11,
}

impl DefectLabel {
    pub fn all() -> [DefectLabel; 11] {
        use DefectLabel::*;
        [D1, D2, D3, D4, D5, D6, D7, D8, D9, D10, D11]
    }

    pub fn name(&self) -> &'static str {
        use DefectLabel::*;
        match self {
            D1 => "D1",
            D2 => "D2",
            D3 => "D3",
            D4 => "D4",
            D5 => "D5",
            D6 => "D6",
            D7 => "D7",
            D8 => "D8",
            D9 => "D9",
            D10 => "D10",
            D11 => "D11",
        }
    }

    /// D9-D11 involve the magnetic field and are defined for MHD only.
    pub fn requires_magnetic(&self) -> bool {
        use DefectLabel::*;
        matches!(self, D9 | D10 | D11)
    }
}

impl std::str::FromStr for DefectLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DefectLabel::all()
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown defect label `{s}`")))
    }
}

impl std::fmt::Display for DefectLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Field slot of a contraction pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    U,
    V,
    B,
    /// The nine components of `grad u`, flattened into the inner product.
    GradU,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    P1,
    P3,
}

/// Contraction-pattern description of one defect term.
#[derive(Debug, Clone, Copy)]
pub struct DefectSpec {
    pub label: DefectLabel,
    pub pattern: Pattern,
    pub field_a: Role,
    pub field_b: Role,
    pub field_c: Role,
    pub prefactor: f64,
}

/// The catalog of all eleven defect terms. D3/D8 and D5/D7 are identical
/// integrands arising in different models; the labels are kept, the kernels
/// shared.
pub fn catalog(label: DefectLabel) -> DefectSpec {
    use DefectLabel::*;
    let (pattern, a, b, c, pref) = match label {
        D1 => (Pattern::P1, Role::U, Role::V, Role::V, 0.5),
        D2 => (Pattern::P1, Role::U, Role::U, Role::U, 0.5),
        D3 => (Pattern::P1, Role::U, Role::GradU, Role::GradU, 1.0),
        D4 => (Pattern::P1, Role::U, Role::U, Role::U, 0.5),
        D5 => (Pattern::P3, Role::U, Role::GradU, Role::GradU, 1.0),
        D6 => (Pattern::P1, Role::U, Role::U, Role::U, 0.5),
        D7 => (Pattern::P3, Role::U, Role::GradU, Role::GradU, 1.0),
        D8 => (Pattern::P1, Role::U, Role::GradU, Role::GradU, 1.0),
        D9 => (Pattern::P1, Role::U, Role::V, Role::V, 0.5),
        D10 => (Pattern::P1, Role::U, Role::B, Role::B, 0.5),
        D11 => (Pattern::P1, Role::B, Role::B, Role::V, 1.0),
    };
    DefectSpec {
        label,
        pattern,
        field_a: a,
        field_b: b,
        field_c: c,
        prefactor: pref,
    }
}

/// The field bundle defect estimates are evaluated on; `u` is the filtered
/// velocity, `v` the momentum, `b` the optional magnetic field.
#[derive(Debug, Clone)]
pub struct DefectFields {
    pub u: SpectralVectorField,
    pub v: SpectralVectorField,
    pub b: Option<SpectralVectorField>,
}

impl DefectFields {
    pub fn new(
        u: SpectralVectorField,
        v: SpectralVectorField,
        b: Option<SpectralVectorField>,
    ) -> Self {
        DefectFields { u, v, b }
    }

    pub fn grid(&self) -> Grid {
        self.u.grid
    }

    fn vector(&self, role: Role) -> Result<&SpectralVectorField> {
        match role {
            Role::U => Ok(&self.u),
            Role::V => Ok(&self.v),
            Role::B => self.b.as_ref().ok_or(Error::DefectNeedsMagneticField {
                label: "B-role defect",
            }),
            Role::GradU => Err(Error::Config(
                "grad_u cannot occupy the contracted slot of P1".into(),
            )),
        }
    }
}

/// Estimated space-integrated defect values over a ladder of scales.
#[derive(Debug, Clone)]
pub struct DefectSeries {
    pub label: DefectLabel,
    pub epsilons: Vec<f64>,
    pub values: Vec<f64>,
    /// Fitted `d log|value| / d log eps`; `None` when the series is
    /// degenerate (all values at round-off zero).
    pub slope: Option<f64>,
}

fn validate_epsilon(grid: &Grid, epsilon: f64) -> Result<()> {
    let min = grid.spacing();
    let max = PI;
    if !(epsilon > min && epsilon < max) {
        return Err(Error::EpsilonOutOfRange {
            epsilon,
            min,
            max,
            n: grid.n(),
        });
    }
    Ok(())
}

fn validate_specs(specs: &[DefectSpec], fields: &DefectFields) -> Result<()> {
    for spec in specs {
        if spec.label.requires_magnetic() && fields.b.is_none() {
            return Err(Error::DefectNeedsMagneticField {
                label: spec.label.name(),
            });
        }
        if spec.pattern == Pattern::P1 {
            let bg = spec.field_b == Role::GradU;
            let cg = spec.field_c == Role::GradU;
            if bg != cg {
                return Err(Error::Config(
                    "P1 requires the b and c slots to be both vectors or both gradients".into(),
                ));
            }
            if spec.field_a == Role::GradU {
                return Err(Error::Config(
                    "P1 requires a vector field in the a slot".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Per-node cache of real-space increments; vectors and the gradient live in
/// separate slots so kernels can hold both at once.
struct NodeIncrements<'f> {
    fields: &'f DefectFields,
    grad_u: Option<&'f TensorField>,
    xi: [f64; 3],
    du: Option<[Vec<f64>; 3]>,
    dv: Option<[Vec<f64>; 3]>,
    db: Option<[Vec<f64>; 3]>,
    dg: Option<Vec<Vec<f64>>>,
}

impl<'f> NodeIncrements<'f> {
    fn new(fields: &'f DefectFields, grad_u: Option<&'f TensorField>, xi: [f64; 3]) -> Self {
        NodeIncrements {
            fields,
            grad_u,
            xi,
            du: None,
            dv: None,
            db: None,
            dg: None,
        }
    }

    fn ensure_vector(&mut self, role: Role) {
        let (slot, field) = match role {
            Role::U => (&mut self.du, &self.fields.u),
            Role::V => (&mut self.dv, &self.fields.v),
            Role::B => (
                &mut self.db,
                self.fields.b.as_ref().expect("validated earlier"),
            ),
            Role::GradU => unreachable!("vector roles only"),
        };
        if slot.is_none() {
            *slot = Some(field.increment_samples(self.xi));
        }
    }

    fn vector(&self, role: Role) -> &[Vec<f64>; 3] {
        match role {
            Role::U => self.du.as_ref().expect("ensure_vector first"),
            Role::V => self.dv.as_ref().expect("ensure_vector first"),
            Role::B => self.db.as_ref().expect("ensure_vector first"),
            Role::GradU => unreachable!("vector roles only"),
        }
    }

    fn has_vector(&self, role: Role) -> bool {
        match role {
            Role::U => self.du.is_some(),
            Role::V => self.dv.is_some(),
            Role::B => self.db.is_some(),
            Role::GradU => self.dg.is_some(),
        }
    }

    fn ensure_gradient(&mut self) {
        if self.dg.is_none() {
            let grad = self.grad_u.expect("gradient prepared when needed");
            self.dg = Some(grad.increment_samples(self.xi));
        }
    }

    fn gradient(&self) -> &[Vec<f64>] {
        self.dg.as_deref().expect("ensure_gradient first")
    }
}

/// `sum_x (db . dc)(x)` accumulated into `q` for the P1 inner product.
fn fill_bc_product(inc: &mut NodeIncrements, spec: &DefectSpec, q: &mut [f64]) {
    if spec.field_b == Role::GradU {
        inc.ensure_gradient();
        for comp in inc.gradient() {
            for (acc, &g) in q.iter_mut().zip(comp.iter()) {
                *acc += g * g;
            }
        }
    } else if spec.field_b == spec.field_c {
        inc.ensure_vector(spec.field_b);
        for comp in inc.vector(spec.field_b) {
            for (acc, &w) in q.iter_mut().zip(comp.iter()) {
                *acc += w * w;
            }
        }
    } else {
        inc.ensure_vector(spec.field_b);
        inc.ensure_vector(spec.field_c);
        let db = inc.vector(spec.field_b);
        let dc = inc.vector(spec.field_c);
        for comp in 0..3 {
            for ((acc, &x), &y) in q.iter_mut().zip(db[comp].iter()).zip(dc[comp].iter()) {
                *acc += x * y;
            }
        }
    }
}

/// `int (xihat . da)(db . dc) dx` via a grid sum (pattern P1, plain route).
fn p1_plain(inc: &mut NodeIncrements, spec: &DefectSpec, dir: [f64; 3], cell: f64) -> f64 {
    let npts = inc.fields.grid().len();
    let mut q = vec![0.0f64; npts];
    fill_bc_product(inc, spec, &mut q);
    inc.ensure_vector(spec.field_a);
    let da = inc.vector(spec.field_a);
    let mut total = 0.0;
    for idx in 0..npts {
        let radial = dir[0] * da[0][idx] + dir[1] * da[1][idx] + dir[2] * da[2][idx];
        total += radial * q[idx];
    }
    total * cell
}

/// Same integral with the `a`-increment kept spectral: one forward transform
/// of `(db . dc)` instead of materialising `da`, via Parseval.
fn p1_spectral_a(inc: &mut NodeIncrements, spec: &DefectSpec, dir: [f64; 3]) -> Result<f64> {
    let grid = inc.fields.grid();
    let npts = grid.len();
    let mut q = vec![0.0f64; npts];
    fill_bc_product(inc, spec, &mut q);
    let mut q_hat: Vec<Complex64> = q.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
    fft3(&mut q_hat, grid.n(), Direction::Forward);

    let a_hat = &inc.fields.vector(spec.field_a)?.hat;
    let phases = crate::field::shift_phases(&grid, inc.xi);
    let n = grid.n();
    let mut total = 0.0;
    for iz in 0..n {
        let pz = phases[2][iz];
        for iy in 0..n {
            let pzy = pz * phases[1][iy];
            let row = grid.index(iz, iy, 0);
            for ix in 0..n {
                let idx = row + ix;
                let p = pzy * phases[0][ix] - Complex64::new(1.0, 0.0);
                let adot =
                    dir[0] * a_hat[0][idx] + dir[1] * a_hat[1][idx] + dir[2] * a_hat[2][idx];
                let f = p * adot;
                // Re(conj(f) q_hat)
                total += f.re * q_hat[idx].re + f.im * q_hat[idx].im;
            }
        }
    }
    Ok(total * grid.volume())
}

/// `int du_j d(d_k u_i) d(d_k u_j) xihat_i dx` (pattern P3).
fn p3_value(inc: &mut NodeIncrements, dir: [f64; 3], cell: f64) -> f64 {
    let npts = inc.fields.grid().len();
    inc.ensure_gradient();
    inc.ensure_vector(Role::U);
    let dg = inc.gradient();
    let du = inc.vector(Role::U);
    let mut total = 0.0;
    for idx in 0..npts {
        let mut acc = 0.0;
        for k in 0..3 {
            // A_k = xihat_i dg[k*3+i], B_k = du_j dg[k*3+j]
            let mut a_k = 0.0;
            let mut b_k = 0.0;
            for i in 0..3 {
                let g = dg[k * 3 + i][idx];
                a_k += dir[i] * g;
                b_k += du[i][idx] * g;
            }
            acc += a_k * b_k;
        }
        total += acc;
    }
    total * cell
}

fn spec_needs_gradient(spec: &DefectSpec) -> bool {
    spec.pattern == Pattern::P3 || spec.field_b == Role::GradU || spec.field_c == Role::GradU
}

/// The profile-independent inner integral `F_spec(xi)` for every spec at one
/// quadrature node.
fn node_inner_integrals(
    specs: &[DefectSpec],
    fields: &DefectFields,
    grad_u: Option<&TensorField>,
    r: f64,
    dir: [f64; 3],
) -> Result<Vec<f64>> {
    let xi = [r * dir[0], r * dir[1], r * dir[2]];
    let cell = fields.grid().cell_volume();
    let mut inc = NodeIncrements::new(fields, grad_u, xi);
    let mut out = Vec::with_capacity(specs.len());
    for spec in specs {
        let value = match spec.pattern {
            Pattern::P3 => p3_value(&mut inc, dir, cell),
            Pattern::P1 => {
                // keeping `da` spectral saves transforms unless it is already
                // materialised for another spec
                let spectral_route = spec.field_b == spec.field_c
                    && spec.field_a != spec.field_b
                    && !inc.has_vector(spec.field_a);
                if spectral_route {
                    p1_spectral_a(&mut inc, spec, dir)?
                } else {
                    p1_plain(&mut inc, spec, dir, cell)
                }
            }
        };
        out.push(value);
    }
    Ok(out)
}

/// All quadrature nodes for one scale, as
/// `(r, radial_weight * direction_weight, direction)`.
fn nodes_for(quad: &XiQuadrature, epsilon: f64) -> Vec<(f64, f64, [f64; 3])> {
    let mut nodes = Vec::with_capacity(quad.n_radial * quad.directions.len());
    for (r, w) in quad.radial_nodes(epsilon) {
        for (dir, w_dir) in &quad.directions {
            nodes.push((r, w * w_dir, *dir));
        }
    }
    nodes
}

/// Inner integrals for every node, evaluated in parallel; summation happens
/// later in fixed node order, so results are reproducible bit-for-bit.
fn all_node_integrals(
    specs: &[DefectSpec],
    fields: &DefectFields,
    grad_u: Option<&TensorField>,
    nodes: &[(f64, f64, [f64; 3])],
) -> Result<Vec<Vec<f64>>> {
    nodes
        .par_iter()
        .map(|&(r, _, dir)| node_inner_integrals(specs, fields, grad_u, r, dir))
        .collect()
}

fn weighted_sum(
    specs: &[DefectSpec],
    nodes: &[(f64, f64, [f64; 3])],
    integrals: &[Vec<f64>],
    moll: &Mollifier,
) -> Vec<f64> {
    let mut out = vec![0.0f64; specs.len()];
    for (node, vals) in nodes.iter().zip(integrals.iter()) {
        let (r, w, _) = *node;
        let weight = w * r * r * moll.radial_deriv(r);
        for (acc, (&f, spec)) in out.iter_mut().zip(vals.iter().zip(specs.iter())) {
            *acc += spec.prefactor * weight * f;
        }
    }
    out
}

/// Space-integrated defect estimates for several terms at one scale,
/// sharing shifted fields between terms.
pub fn defect_estimates(
    specs: &[DefectSpec],
    fields: &DefectFields,
    moll: &Mollifier,
    quad: &XiQuadrature,
) -> Result<Vec<f64>> {
    validate_epsilon(&fields.grid(), moll.epsilon)?;
    validate_specs(specs, fields)?;
    let grad_u = if specs.iter().any(spec_needs_gradient) {
        Some(fields.u.gradient())
    } else {
        None
    };
    let nodes = nodes_for(quad, moll.epsilon);
    let integrals = all_node_integrals(specs, fields, grad_u.as_ref(), &nodes)?;
    Ok(weighted_sum(specs, &nodes, &integrals, moll))
}

/// Space-integrated estimate of a single defect term at scale `moll.epsilon`.
pub fn defect_estimate(
    spec: &DefectSpec,
    fields: &DefectFields,
    moll: &Mollifier,
    quad: &XiQuadrature,
) -> Result<f64> {
    Ok(defect_estimates(std::slice::from_ref(spec), fields, moll, quad)?[0])
}

/// Pointwise defect field `D_eps(x)` (used by the energy-balance residual).
pub fn defect_local_field(
    spec: &DefectSpec,
    fields: &DefectFields,
    moll: &Mollifier,
    quad: &XiQuadrature,
) -> Result<Vec<f64>> {
    validate_epsilon(&fields.grid(), moll.epsilon)?;
    validate_specs(std::slice::from_ref(spec), fields)?;
    let grad_u = if spec_needs_gradient(spec) {
        Some(fields.u.gradient())
    } else {
        None
    };
    let grid = fields.grid();
    let npts = grid.len();
    let mut field = vec![0.0f64; npts];
    let mut q = vec![0.0f64; npts];
    for (r, w) in quad.radial_nodes(moll.epsilon) {
        for (dir, w_dir) in &quad.directions {
            let dir = *dir;
            let xi = [r * dir[0], r * dir[1], r * dir[2]];
            let mut inc = NodeIncrements::new(fields, grad_u.as_ref(), xi);
            let weight = spec.prefactor * w * w_dir * r * r * moll.radial_deriv(r);
            match spec.pattern {
                Pattern::P3 => {
                    inc.ensure_gradient();
                    inc.ensure_vector(Role::U);
                    let dg = inc.gradient();
                    let du = inc.vector(Role::U);
                    for idx in 0..npts {
                        let mut acc = 0.0;
                        for k in 0..3 {
                            let mut a_k = 0.0;
                            let mut b_k = 0.0;
                            for i in 0..3 {
                                let g = dg[k * 3 + i][idx];
                                a_k += dir[i] * g;
                                b_k += du[i][idx] * g;
                            }
                            acc += a_k * b_k;
                        }
                        field[idx] += weight * acc;
                    }
                }
                Pattern::P1 => {
                    q.iter_mut().for_each(|x| *x = 0.0);
                    fill_bc_product(&mut inc, spec, &mut q);
                    inc.ensure_vector(spec.field_a);
                    let da = inc.vector(spec.field_a);
                    for idx in 0..npts {
                        let radial =
                            dir[0] * da[0][idx] + dir[1] * da[1][idx] + dir[2] * da[2][idx];
                        field[idx] += weight * radial * q[idx];
                    }
                }
            }
        }
    }
    Ok(field)
}

/// Geometric default ladder: 8 scales from `pi/4` down to
/// `max(4 * spacing, pi/64)`. Errors when the grid is too coarse for the
/// default to span a nondegenerate range.
pub fn default_epsilon_ladder(grid: &Grid) -> Result<Vec<f64>> {
    let hi = PI / 4.0;
    let lo = (4.0 * grid.spacing()).max(PI / 64.0);
    if lo >= hi {
        return Err(Error::Config(format!(
            "default epsilon ladder degenerates for n = {}; pass an explicit ladder",
            grid.n()
        )));
    }
    let count = 8;
    let ratio = (lo / hi).powf(1.0 / (count - 1) as f64);
    Ok((0..count).map(|i| hi * ratio.powi(i as i32)).collect())
}

fn log_log_slope(epsilons: &[f64], values: &[f64]) -> Option<f64> {
    let mut pts = Vec::new();
    for (&e, &v) in epsilons.iter().zip(values.iter()) {
        if v.abs() > 1e-60 {
            pts.push((e.ln(), v.abs().ln()));
        }
    }
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = m * sxx - sx * sx;
    if denom == 0.0 {
        return None;
    }
    Some((m * sxy - sx * sy) / denom)
}

/// Defect estimates over a strictly decreasing ladder, one series per
/// requested profile and spec (outer index: profile). The expensive inner
/// integrals are computed once per scale and reused across profiles.
pub fn defect_series_batch(
    specs: &[DefectSpec],
    fields: &DefectFields,
    profiles: &[MollifierProfile],
    epsilons: &[f64],
    quad: &XiQuadrature,
    refine: bool,
) -> Result<Vec<Vec<DefectSeries>>> {
    if epsilons.len() < 2 {
        return Err(Error::Config(
            "epsilon ladder needs at least two scales".into(),
        ));
    }
    if !epsilons.windows(2).all(|w| w[0] > w[1]) {
        return Err(Error::Config(
            "epsilon ladder must be strictly decreasing".into(),
        ));
    }
    validate_specs(specs, fields)?;
    for &eps in epsilons {
        validate_epsilon(&fields.grid(), eps)?;
    }
    let grad_u = if specs.iter().any(spec_needs_gradient) {
        Some(fields.u.gradient())
    } else {
        None
    };

    // values[profile][spec][rung]
    let mut values: Vec<Vec<Vec<f64>>> =
        vec![vec![vec![0.0; epsilons.len()]; specs.len()]; profiles.len()];

    for (rung, &eps) in epsilons.iter().enumerate() {
        let mollifiers: Vec<Mollifier> = profiles
            .iter()
            .map(|&p| Mollifier::new(p, eps))
            .collect::<Result<_>>()?;
        let eval = |n_radial: usize| -> Result<Vec<Vec<f64>>> {
            let rule = XiQuadrature {
                n_radial,
                directions: quad.directions.clone(),
            };
            let nodes = nodes_for(&rule, eps);
            let integrals = all_node_integrals(specs, fields, grad_u.as_ref(), &nodes)?;
            Ok(mollifiers
                .iter()
                .map(|m| weighted_sum(specs, &nodes, &integrals, m))
                .collect())
        };
        let mut n_radial = quad.n_radial;
        let mut current = eval(n_radial)?;
        if refine {
            // double the radial count until every estimate moves < 0.5%
            while n_radial < 128 {
                n_radial *= 2;
                let finer = eval(n_radial)?;
                let converged = finer.iter().zip(current.iter()).all(|(fa, ca)| {
                    fa.iter()
                        .zip(ca.iter())
                        .all(|(&f, &c)| (f - c).abs() <= (0.005 * f.abs()).max(1e-16))
                });
                current = finer;
                if converged {
                    break;
                }
            }
        }
        for (pi, per_spec) in current.iter().enumerate() {
            for (si, &v) in per_spec.iter().enumerate() {
                values[pi][si][rung] = v;
            }
        }
    }

    Ok(values
        .into_iter()
        .map(|per_profile| {
            per_profile
                .into_iter()
                .zip(specs.iter())
                .map(|(vals, spec)| DefectSeries {
                    label: spec.label,
                    epsilons: epsilons.to_vec(),
                    slope: log_log_slope(epsilons, &vals),
                    values: vals,
                })
                .collect()
        })
        .collect())
}

/// Series for a single defect term under one profile.
pub fn defect_series(
    spec: &DefectSpec,
    fields: &DefectFields,
    profile: MollifierProfile,
    epsilons: &[f64],
    quad: &XiQuadrature,
    refine: bool,
) -> Result<DefectSeries> {
    let mut batches = defect_series_batch(
        std::slice::from_ref(spec),
        fields,
        &[profile],
        epsilons,
        quad,
        refine,
    )?;
    Ok(batches.remove(0).remove(0))
}
