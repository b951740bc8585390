//! In-place 3-D complex FFTs on the cubic grid, batched per axis.
//!
//! Convention: `forward` maps samples to coefficients with a `1/n^3` factor,
//! so a unit-amplitude mode `e^{ik.x}` has coefficient 1; `backward` is the
//! plain synthesis sum. Plans are cached per grid size behind a mutex and the
//! cached handles are safe to use from any thread.

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Clone)]
struct Plans {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> Plans {
    static CACHE: OnceLock<Mutex<HashMap<usize, Plans>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Plans {
                fwd: planner.plan_fft(n, FftDirection::Forward),
                inv: planner.plan_fft(n, FftDirection::Inverse),
            }
        })
        .clone()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// In-place 3-D FFT of a flat `n^3` buffer laid out z-major, x fastest.
pub fn fft3(data: &mut [Complex64], n: usize, dir: Direction) {
    assert_eq!(data.len(), n * n * n, "buffer does not match grid");
    let plans = plans(n);
    let plan = match dir {
        Direction::Forward => plans.fwd,
        Direction::Backward => plans.inv,
    };
    let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
    let n2 = n * n;

    // x-axis: lines are contiguous, one batched call over the whole buffer.
    plan.process_with_scratch(data, &mut scratch);

    // y-axis: transpose each z-slab so y-lines become contiguous.
    let mut slab = vec![Complex64::default(); n2];
    for iz in 0..n {
        let s = &mut data[iz * n2..(iz + 1) * n2];
        for iy in 0..n {
            for ix in 0..n {
                slab[ix * n + iy] = s[iy * n + ix];
            }
        }
        plan.process_with_scratch(&mut slab, &mut scratch);
        for ix in 0..n {
            for iy in 0..n {
                s[iy * n + ix] = slab[ix * n + iy];
            }
        }
    }

    // z-axis: full x<->z transpose, batched lines, transpose back.
    let mut cube = vec![Complex64::default(); data.len()];
    for iz in 0..n {
        for iy in 0..n {
            let row = &data[(iz * n + iy) * n..(iz * n + iy + 1) * n];
            for (ix, value) in row.iter().enumerate() {
                cube[(ix * n + iy) * n + iz] = *value;
            }
        }
    }
    plan.process_with_scratch(&mut cube, &mut scratch);
    for ix in 0..n {
        for iy in 0..n {
            let row = &cube[(ix * n + iy) * n..(ix * n + iy + 1) * n];
            for (iz, value) in row.iter().enumerate() {
                data[(iz * n + iy) * n + ix] = *value;
            }
        }
    }

    if let Direction::Forward = dir {
        let scale = 1.0 / (n2 * n) as f64;
        for c in data.iter_mut() {
            *c *= scale;
        }
    }
}

/// Forward transforms of a batch of real sample arrays, packing two real
/// fields into one complex transform: for `h = f + i g` with `f`, `g` real,
/// `f_hat(k) = (h(k) + conj(h(-k)))/2` and `g_hat(k) = -i (h(k) - conj(h(-k)))/2`.
pub fn forward_real_batch(n: usize, inputs: &[&[f64]]) -> Vec<Vec<Complex64>> {
    let len = n * n * n;
    let mut out = Vec::with_capacity(inputs.len());
    let mut iter = inputs.chunks_exact(2);
    for pair in &mut iter {
        let mut buf: Vec<Complex64> = pair[0]
            .iter()
            .zip(pair[1].iter())
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect();
        fft3(&mut buf, n, Direction::Forward);
        let mut f_hat = vec![Complex64::default(); len];
        let mut g_hat = vec![Complex64::default(); len];
        split_packed_spectra(n, &buf, &mut f_hat, &mut g_hat);
        out.push(f_hat);
        out.push(g_hat);
    }
    if let [last] = iter.remainder() {
        let mut buf: Vec<Complex64> = last.iter().map(|&a| Complex64::new(a, 0.0)).collect();
        fft3(&mut buf, n, Direction::Forward);
        out.push(buf);
    }
    out
}

/// Backward transforms of a batch of Hermitian spectra to real samples,
/// packing two per complex transform (`ifft(a + i b)` is `a_real + i b_real`).
pub fn backward_real_batch(n: usize, inputs: &[&[Complex64]]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(inputs.len());
    let mut iter = inputs.chunks_exact(2);
    for pair in &mut iter {
        let mut buf: Vec<Complex64> = pair[0]
            .iter()
            .zip(pair[1].iter())
            .map(|(&a, &b)| a + Complex64::new(0.0, 1.0) * b)
            .collect();
        fft3(&mut buf, n, Direction::Backward);
        out.push(buf.iter().map(|c| c.re).collect());
        out.push(buf.iter().map(|c| c.im).collect());
    }
    if let [last] = iter.remainder() {
        let mut buf = last.to_vec();
        fft3(&mut buf, n, Direction::Backward);
        out.push(buf.iter().map(|c| c.re).collect());
    }
    out
}

fn split_packed_spectra(
    n: usize,
    packed: &[Complex64],
    f_hat: &mut [Complex64],
    g_hat: &mut [Complex64],
) {
    let conj_idx = |i: usize| if i == 0 { 0 } else { n - i };
    for iz in 0..n {
        let jz = conj_idx(iz);
        for iy in 0..n {
            let jy = conj_idx(iy);
            let row = (iz * n + iy) * n;
            let mirror_row = (jz * n + jy) * n;
            for ix in 0..n {
                let idx = row + ix;
                let mirror = mirror_row + conj_idx(ix);
                let h = packed[idx];
                let hc = packed[mirror].conj();
                f_hat[idx] = 0.5 * (h + hc);
                let d = h - hc;
                g_hat[idx] = Complex64::new(0.5 * d.im, -0.5 * d.re);
            }
        }
    }
}
