//! Mollified local energy-balance residual for Leray-alpha snapshot triples.
//!
//! At a fixed mollification scale the balance reads
//!
//! `dt(v . v^eps) + div((v . v^eps) u) - 1/2 div((|v|^2)^eps u)
//!  + 1/2 div((|v|^2 u)^eps) + div(p^eps v + p v^eps) + D_{1,eps} = 0`,
//!
//! exactly in the semi-discrete limit. Every term is assembled spectrally at
//! scale `eps`; the defect enters through its exact mollified-product local
//! form, so the reported `L^2` norm is pure time-discretisation error for
//! smooth resolved fields (centered-difference time derivative) and vanishes
//! as `dt, eps -> 0`.

use crate::error::{Error, Result};
use crate::fft::{backward_real_batch, forward_real_batch};
use crate::field::{solve_pressure, SpectralVectorField};
use crate::grid::Grid;
use crate::models::{ModelKind, ModelState};
use crate::mollifier::Mollifier;
use num_complex::Complex64;

/// Mollification symbol per integer `|k|^2`, indexed by `ksq`.
fn mollify_table(grid: &Grid, moll: &Mollifier) -> Vec<f64> {
    let half = grid.n() as i64 / 2;
    let max_ksq = (3 * half * half) as usize;
    (0..=max_ksq)
        .map(|ksq| moll.fourier_symbol((ksq as f64).sqrt()))
        .collect()
}

fn mollify_hat(grid: &Grid, hat: &[Complex64], table: &[f64]) -> Vec<Complex64> {
    let n = grid.n();
    let ks = grid.axis_wavenumbers();
    let mut out = hat.to_vec();
    for iz in 0..n {
        let kz = ks[iz];
        for iy in 0..n {
            let ky = ks[iy];
            let row = grid.index(iz, iy, 0);
            for ix in 0..n {
                let kx = ks[ix];
                let ksq = (kx * kx + ky * ky + kz * kz) as usize;
                out[row + ix] *= table[ksq];
            }
        }
    }
    out
}

/// `i k_axis * hat`, one spectral derivative.
fn derivative_hat(grid: &Grid, hat: &[Complex64], axis: usize) -> Vec<Complex64> {
    let n = grid.n();
    let ks = grid.axis_wavenumbers();
    let mut out = vec![Complex64::default(); grid.len()];
    for iz in 0..n {
        for iy in 0..n {
            let row = grid.index(iz, iy, 0);
            for ix in 0..n {
                let k = match axis {
                    0 => ks[ix],
                    1 => ks[iy],
                    _ => ks[iz],
                } as f64;
                let idx = row + ix;
                out[idx] = Complex64::new(0.0, k) * hat[idx];
            }
        }
    }
    out
}

fn divergence_hat(grid: &Grid, hats: &[&[Complex64]; 3]) -> Vec<Complex64> {
    let n = grid.n();
    let ks = grid.axis_wavenumbers();
    let mut out = vec![Complex64::default(); grid.len()];
    for iz in 0..n {
        let kz = ks[iz] as f64;
        for iy in 0..n {
            let ky = ks[iy] as f64;
            let row = grid.index(iz, iy, 0);
            for ix in 0..n {
                let kx = ks[ix] as f64;
                let idx = row + ix;
                let dot = kx * hats[0][idx] + ky * hats[1][idx] + kz * hats[2][idx];
                out[idx] = Complex64::new(0.0, 1.0) * dot;
            }
        }
    }
    out
}

fn dot3(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0f64; a[0].len()];
    for comp in 0..3 {
        for ((acc, &x), &y) in out.iter_mut().zip(a[comp].iter()).zip(b[comp].iter()) {
            *acc += x * y;
        }
    }
    out
}

fn add_assign(acc: &mut [f64], term: &[f64], scale: f64) {
    for (a, &t) in acc.iter_mut().zip(term.iter()) {
        *a += scale * t;
    }
}

fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b.iter()).map(|(&x, &y)| x * y).collect()
}

fn real_divergence_of_flux(grid: &Grid, flux: &[Vec<f64>]) -> Vec<f64> {
    let refs: Vec<&[f64]> = flux.iter().map(|f| f.as_slice()).collect();
    let hats = forward_real_batch(grid.n(), &refs);
    let div = divergence_hat(grid, &[&hats[0], &hats[1], &hats[2]]);
    backward_real_batch(grid.n(), &[div.as_slice()]).remove(0)
}

/// Pointwise `D_{1,eps}(x)` for Leray-alpha roles through the exact
/// mollified-product identity
/// `D_{1,eps} = -1/2 d_i(u_i v_j v_j)^eps + 1/2 u_i d_i(v_j v_j)^eps
///  + v_j d_i(v_j u_i)^eps - u_i v_j d_i v_j^eps`,
/// free of xi-quadrature error.
pub fn leray_defect_local_exact(
    u_hat: &SpectralVectorField,
    v_hat: &SpectralVectorField,
    moll: &Mollifier,
) -> Vec<f64> {
    let grid = u_hat.grid;
    let n = grid.n();
    let npts = grid.len();
    let table = mollify_table(&grid, moll);

    let u: Vec<Vec<f64>> = u_hat.to_samples().into();
    let v: Vec<Vec<f64>> = v_hat.to_samples().into();
    let vsq = dot3(&v, &v);

    // (u_i v_j)^eps, nine mollified products
    let products: Vec<Vec<f64>> = (0..9)
        .map(|m| {
            let (i, j) = (m / 3, m % 3);
            mul(&u[i], &v[j])
        })
        .collect();
    let refs: Vec<&[f64]> = products.iter().map(|p| p.as_slice()).collect();
    let w_eps_hat: Vec<Vec<Complex64>> = forward_real_batch(n, &refs)
        .into_iter()
        .map(|h| mollify_hat(&grid, &h, &table))
        .collect();

    // -1/2 d_i(u_i |v|^2)^eps
    let flux: Vec<Vec<f64>> = (0..3).map(|c| mul(&vsq, &u[c])).collect();
    let flux_refs: Vec<&[f64]> = flux.iter().map(|f| f.as_slice()).collect();
    let flux_eps: Vec<Vec<Complex64>> = forward_real_batch(n, &flux_refs)
        .into_iter()
        .map(|h| mollify_hat(&grid, &h, &table))
        .collect();
    let div = divergence_hat(&grid, &[&flux_eps[0], &flux_eps[1], &flux_eps[2]]);
    let div_real = backward_real_batch(n, &[div.as_slice()]).remove(0);
    let mut out: Vec<f64> = div_real.iter().map(|&x| -0.5 * x).collect();

    // +1/2 u_i d_i((|v|^2)^eps)
    let vsq_eps_hat = {
        let h = forward_real_batch(n, &[vsq.as_slice()]).remove(0);
        mollify_hat(&grid, &h, &table)
    };
    let grads: Vec<Vec<Complex64>> = (0..3)
        .map(|axis| derivative_hat(&grid, &vsq_eps_hat, axis))
        .collect();
    let grad_refs: Vec<&[Complex64]> = grads.iter().map(|g| g.as_slice()).collect();
    let grad_real = backward_real_batch(n, &grad_refs);
    for i in 0..3 {
        for idx in 0..npts {
            out[idx] += 0.5 * u[i][idx] * grad_real[i][idx];
        }
    }

    // + v_j d_i((v_j u_i)^eps), divergence over the advecting index
    for j in 0..3 {
        let cols: [&[Complex64]; 3] = [&w_eps_hat[j], &w_eps_hat[3 + j], &w_eps_hat[6 + j]];
        let div = divergence_hat(&grid, &cols);
        let div_real = backward_real_batch(n, &[div.as_slice()]).remove(0);
        for idx in 0..npts {
            out[idx] += v[j][idx] * div_real[idx];
        }
    }

    // - u_i v_j d_i(v_j^eps)
    let v_eps_hat: Vec<Vec<Complex64>> = v_hat
        .hat
        .iter()
        .map(|h| mollify_hat(&grid, h, &table))
        .collect();
    let mut deriv_hats: Vec<Vec<Complex64>> = Vec::with_capacity(9);
    for i in 0..3 {
        for j in 0..3 {
            deriv_hats.push(derivative_hat(&grid, &v_eps_hat[j], i));
        }
    }
    let deriv_refs: Vec<&[Complex64]> = deriv_hats.iter().map(|d| d.as_slice()).collect();
    let deriv_real = backward_real_batch(n, &deriv_refs);
    for i in 0..3 {
        for j in 0..3 {
            let g = &deriv_real[i * 3 + j];
            for idx in 0..npts {
                out[idx] -= u[i][idx] * v[j][idx] * g[idx];
            }
        }
    }
    out
}

/// `L^2` norm of the mollified energy-balance residual assembled from the
/// first three consecutive snapshots (spacing `dt`); the residual is
/// evaluated at the middle snapshot.
pub fn energy_balance_residual(
    snapshots: &[ModelState],
    dt: f64,
    moll: &Mollifier,
) -> Result<f64> {
    if snapshots.len() < 3 {
        return Err(Error::TooFewSnapshots(snapshots.len()));
    }
    for s in &snapshots[..3] {
        if s.kind != ModelKind::LerayAlpha {
            return Err(Error::WrongModelForBalance(s.kind.name()));
        }
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidTimeStep(dt));
    }
    let prev = &snapshots[0];
    let mid = &snapshots[1];
    let next = &snapshots[2];
    let grid = mid.grid();
    let n = grid.n();
    let table = mollify_table(&grid, moll);

    let real3 = |w: &SpectralVectorField| -> Vec<Vec<f64>> { w.to_samples().into() };
    let mollified3 = |w: &SpectralVectorField| -> Vec<Vec<f64>> {
        let hats: Vec<Vec<Complex64>> = w
            .hat
            .iter()
            .map(|h| mollify_hat(&grid, h, &table))
            .collect();
        let refs: Vec<&[Complex64]> = hats.iter().map(|h| h.as_slice()).collect();
        backward_real_batch(n, &refs)
    };

    // centered difference of v . v^eps
    let q_at = |s: &ModelState| -> Vec<f64> { dot3(&real3(&s.v), &mollified3(&s.v)) };
    let q_prev = q_at(prev);
    let q_next = q_at(next);
    let mut residual: Vec<f64> = q_next
        .iter()
        .zip(q_prev.iter())
        .map(|(&a, &b)| (a - b) / (2.0 * dt))
        .collect();

    let u_hat = mid.velocity();
    let u = real3(&u_hat);
    let v = real3(&mid.v);
    let v_eps = mollified3(&mid.v);
    let vsq = dot3(&v, &v);

    // div((v . v^eps) u)
    let vv_eps = dot3(&v, &v_eps);
    let flux1: Vec<Vec<f64>> = (0..3).map(|c| mul(&vv_eps, &u[c])).collect();
    add_assign(&mut residual, &real_divergence_of_flux(&grid, &flux1), 1.0);

    // -1/2 div((|v|^2)^eps u)
    let vsq_eps = {
        let h = forward_real_batch(n, &[vsq.as_slice()]).remove(0);
        let h = mollify_hat(&grid, &h, &table);
        backward_real_batch(n, &[h.as_slice()]).remove(0)
    };
    let flux2: Vec<Vec<f64>> = (0..3).map(|c| mul(&vsq_eps, &u[c])).collect();
    add_assign(&mut residual, &real_divergence_of_flux(&grid, &flux2), -0.5);

    // +1/2 div((|v|^2 u)^eps)
    let flux3: Vec<Vec<f64>> = (0..3).map(|c| mul(&vsq, &u[c])).collect();
    let flux3_refs: Vec<&[f64]> = flux3.iter().map(|f| f.as_slice()).collect();
    let flux3_eps: Vec<Vec<Complex64>> = forward_real_batch(n, &flux3_refs)
        .into_iter()
        .map(|h| mollify_hat(&grid, &h, &table))
        .collect();
    let div3 = divergence_hat(&grid, &[&flux3_eps[0], &flux3_eps[1], &flux3_eps[2]]);
    add_assign(
        &mut residual,
        &backward_real_batch(n, &[div3.as_slice()])[0],
        0.5,
    );

    // div(p^eps v + p v^eps)
    let p = solve_pressure(&u_hat, &mid.v)?;
    let p_samples = p.to_samples();
    let p_eps = {
        let h = mollify_hat(&grid, &p.hat, &table);
        backward_real_batch(n, &[h.as_slice()]).remove(0)
    };
    let flux4: Vec<Vec<f64>> = (0..3)
        .map(|c| {
            p_eps
                .iter()
                .zip(v[c].iter())
                .zip(p_samples.iter().zip(v_eps[c].iter()))
                .map(|((&pe, &vc), (&pp, &vec))| pe * vc + pp * vec)
                .collect()
        })
        .collect();
    add_assign(&mut residual, &real_divergence_of_flux(&grid, &flux4), 1.0);

    // + D_{1,eps} in the exact local form
    let d1 = leray_defect_local_exact(&u_hat, &mid.v, moll);
    add_assign(&mut residual, &d1, 1.0);

    let cell = grid.cell_volume();
    Ok((residual.iter().map(|&x| x * x).sum::<f64>() * cell).sqrt())
}
