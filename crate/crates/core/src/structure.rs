//! Structure functions, scaling-exponent fits and the sigma-condition probe.

use crate::defects::{DefectFields, Role};
use crate::error::{Error, Result};
use crate::field::SpectralVectorField;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Volume- and direction-averaged p-th moments of `|dw|` over displacement
/// radii.
#[derive(Debug, Clone)]
pub struct StructureFunctionTable {
    pub p: u32,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

/// Least-squares power-law fit in log-log coordinates.
#[derive(Debug, Clone, Copy)]
pub struct SlopeFit {
    pub exponent: f64,
    pub r2: f64,
    pub window: (f64, f64),
}

/// Structure-function based stand-in for the Besov regularity index.
#[derive(Debug, Clone, Copy)]
pub struct BesovEstimate {
    pub zeta3: SlopeFit,
    /// `s ~ zeta_3 / 3`.
    pub s: f64,
}

/// Ratios `sigma(r) = [dir-averaged int |da||db||dc| dx] / r` probing the
/// vanishing condition that forces a defect term to zero.
#[derive(Debug, Clone)]
pub struct SigmaProbe {
    pub radii: Vec<f64>,
    pub sigmas: Vec<f64>,
    /// True when sigma at the smallest quartile of radii sits below sigma at
    /// the largest quartile, the empirical signature of `sigma -> 0`.
    pub trend_vanishing: bool,
}

fn validate_radii(radii: &[f64]) -> Result<()> {
    for &r in radii {
        if !(r > 0.0 && r <= PI) {
            return Err(Error::RadiusOutOfRange(r));
        }
    }
    Ok(())
}

/// `S_p(r)`: the volume-averaged `p`-th moment of the increment magnitude,
/// averaged over the given displacement directions.
pub fn structure_function(
    w: &SpectralVectorField,
    p: u32,
    radii: &[f64],
    directions: &[[f64; 3]],
) -> Result<StructureFunctionTable> {
    if !(1..=3).contains(&p) {
        return Err(Error::InvalidMomentOrder(p));
    }
    validate_radii(radii)?;
    let npts = w.grid.len() as f64;
    let values: Vec<f64> = radii
        .par_iter()
        .map(|&r| {
            let mut dir_sum = 0.0;
            for dir in directions {
                let xi = [r * dir[0], r * dir[1], r * dir[2]];
                let d = w.increment_samples(xi);
                let mut moment = 0.0;
                for idx in 0..d[0].len() {
                    let magsq =
                        d[0][idx] * d[0][idx] + d[1][idx] * d[1][idx] + d[2][idx] * d[2][idx];
                    moment += match p {
                        1 => magsq.sqrt(),
                        2 => magsq,
                        _ => magsq * magsq.sqrt(),
                    };
                }
                dir_sum += moment / npts;
            }
            dir_sum / directions.len() as f64
        })
        .collect();
    Ok(StructureFunctionTable {
        p,
        radii: radii.to_vec(),
        values,
    })
}

/// Power-law fit of table values against radius over `window`, ignoring
/// values below 1e-14.
pub fn fit_power_law(table: &StructureFunctionTable, window: (f64, f64)) -> Result<SlopeFit> {
    let pts: Vec<(f64, f64)> = table
        .radii
        .iter()
        .zip(table.values.iter())
        .filter(|(&r, &v)| r >= window.0 && r <= window.1 && v > 1e-14)
        .map(|(&r, &v)| (r.ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "only {} usable radii in window [{}, {}]",
            pts.len(),
            window.0,
            window.1
        )));
    }
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let syy: f64 = pts.iter().map(|p| p.1 * p.1).sum();
    let denom = m * sxx - sx * sx;
    if denom == 0.0 {
        return Err(Error::DegenerateFit("zero radius spread".into()));
    }
    let slope = (m * sxy - sx * sy) / denom;
    let ss_tot = syy - sy * sy / m;
    let intercept = (sy - slope * sx) / m;
    let ss_res: f64 = pts
        .iter()
        .map(|&(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    let r2 = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    Ok(SlopeFit {
        exponent: slope,
        r2,
        window,
    })
}

/// Fit `zeta_3` from `S_3(r)` over `window` and report `s ~ zeta_3 / 3`.
pub fn besov_exponent_estimate(
    w: &SpectralVectorField,
    radii: &[f64],
    directions: &[[f64; 3]],
    window: (f64, f64),
) -> Result<BesovEstimate> {
    let table = structure_function(w, 3, radii, directions)?;
    let zeta3 = fit_power_law(&table, window)?;
    Ok(BesovEstimate {
        zeta3,
        s: zeta3.exponent / 3.0,
    })
}

fn magnitude_samples(inc: &[Vec<f64>]) -> Vec<f64> {
    let npts = inc[0].len();
    let mut out = vec![0.0f64; npts];
    for comp in inc {
        for (acc, &x) in out.iter_mut().zip(comp.iter()) {
            *acc += x * x;
        }
    }
    out.iter_mut().for_each(|x| *x = x.sqrt());
    out
}

/// Probe `sigma_k(r) = [dir-avg int |da||db||dc| dx] / r` for the role
/// triple of a defect term; gradient roles use the Frobenius magnitude.
pub fn sigma_probe(
    fields: &DefectFields,
    roles: (Role, Role, Role),
    radii: &[f64],
    directions: &[[f64; 3]],
) -> Result<SigmaProbe> {
    validate_radii(radii)?;
    let grid = fields.grid();
    let cell = grid.cell_volume();
    let grad = if [roles.0, roles.1, roles.2].contains(&Role::GradU) {
        Some(fields.u.gradient())
    } else {
        None
    };
    let role_mag = |role: Role, xi: [f64; 3]| -> Result<Vec<f64>> {
        Ok(match role {
            Role::U => magnitude_samples(&fields.u.increment_samples(xi)),
            Role::V => magnitude_samples(&fields.v.increment_samples(xi)),
            Role::B => magnitude_samples(
                &fields
                    .b
                    .as_ref()
                    .ok_or(Error::DefectNeedsMagneticField { label: "sigma" })?
                    .increment_samples(xi),
            ),
            Role::GradU => magnitude_samples(
                &grad
                    .as_ref()
                    .expect("gradient prepared above")
                    .increment_samples(xi),
            ),
        })
    };

    let sigmas: Vec<f64> = radii
        .par_iter()
        .map(|&r| -> Result<f64> {
            let mut dir_sum = 0.0;
            for dir in directions {
                let xi = [r * dir[0], r * dir[1], r * dir[2]];
                let ma = role_mag(roles.0, xi)?;
                let mb = role_mag(roles.1, xi)?;
                let mc = role_mag(roles.2, xi)?;
                let mut integral = 0.0;
                for idx in 0..ma.len() {
                    integral += ma[idx] * mb[idx] * mc[idx];
                }
                dir_sum += integral * cell;
            }
            Ok(dir_sum / directions.len() as f64 / r)
        })
        .collect::<Result<_>>()?;

    // order radii ascending for the quartile comparison
    let mut order: Vec<usize> = (0..radii.len()).collect();
    order.sort_by(|&a, &b| radii[a].partial_cmp(&radii[b]).unwrap());
    let q = (radii.len() / 4).max(1);
    let small: f64 = order[..q].iter().map(|&i| sigmas[i]).sum::<f64>() / q as f64;
    let large: f64 =
        order[order.len() - q..].iter().map(|&i| sigmas[i]).sum::<f64>() / q as f64;
    Ok(SigmaProbe {
        radii: radii.to_vec(),
        sigmas,
        // non-strict so the identically-zero probe of constant fields counts
        // as vanishing
        trend_vanishing: small <= large,
    })
}

/// Geometric radius ladder spanning the resolved increment range.
pub fn default_radii(grid: &crate::grid::Grid, count: usize) -> Vec<f64> {
    let lo: f64 = 2.0 * grid.spacing();
    let hi: f64 = PI / 2.0;
    let count = count.max(2);
    let ratio = (hi / lo).powf(1.0 / (count - 1) as f64);
    (0..count).map(|i| lo * ratio.powi(i as i32)).collect()
}
