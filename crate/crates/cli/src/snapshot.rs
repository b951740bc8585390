//! Binary snapshot files: magic `AOL1`, version, grid size, component count,
//! filter scalars, time, then little-endian f64 samples, component-major
//! with `index = ((z*n) + y)*n + x`. Round trips are bit-identical.

use aol_core::{FilterKind, FilterSpec, Grid, ModelKind, ModelState, SpectralVectorField};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"AOL1";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("bad magic {0:?}, not an AOL1 snapshot")]
    BadMagic([u8; 4]),

    #[error("unsupported snapshot version {0}")]
    UnsupportedVersion(u32),

    #[error("invalid component count {0} (want 3 or 6)")]
    BadComponentCount(u32),

    #[error("invalid grid size {0}")]
    BadGridSize(u32),

    #[error("truncated payload: expected {expected} bytes, got {actual}")]
    Truncated { expected: usize, actual: usize },

    #[error("non-finite payload value at sample {index}")]
    NonFinitePayload { index: usize },

    #[error("snapshot carries {found} components but model {model} needs {needed}")]
    ComponentMismatch {
        found: u32,
        model: &'static str,
        needed: u32,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

type Result<T> = std::result::Result<T, SnapshotError>;

/// Decoded snapshot: header scalars plus the real-space payload.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub n: u32,
    pub ncomp: u32,
    pub alpha: f64,
    pub theta: f64,
    pub time: f64,
    /// `ncomp * n^3` samples, component-major.
    pub samples: Vec<f64>,
}

impl Snapshot {
    pub fn from_state(state: &ModelState) -> Self {
        let n = state.grid().n() as u32;
        let ncomp = if state.b.is_some() { 6 } else { 3 };
        let mut samples = Vec::with_capacity(ncomp as usize * state.grid().len());
        for comp in state.v.to_samples() {
            samples.extend_from_slice(&comp);
        }
        if let Some(b) = &state.b {
            for comp in b.to_samples() {
                samples.extend_from_slice(&comp);
            }
        }
        let (alpha, theta) = match state.filter.kind {
            FilterKind::Identity => (0.0, 1.0),
            FilterKind::Helmholtz => (state.filter.alpha, 1.0),
            FilterKind::Fractional => (state.filter.alpha, state.filter.theta),
        };
        Snapshot {
            n,
            ncomp,
            alpha,
            theta,
            time: state.time,
            samples,
        }
    }

    /// Reassemble a model state; the model kind is supplied by the caller
    /// (it is not part of the format), the filter is reconstructed from the
    /// stored scalars.
    pub fn into_state(self, kind: ModelKind) -> Result<ModelState> {
        let filter = if self.alpha == 0.0 {
            FilterSpec::identity()
        } else if self.theta == 1.0 {
            FilterSpec::helmholtz(self.alpha).expect("stored alpha is finite")
        } else {
            FilterSpec::fractional(self.alpha, self.theta).expect("stored scalars are valid")
        };
        let needed = if kind.requires_magnetic() { 6 } else { 3 };
        if self.ncomp != needed {
            return Err(SnapshotError::ComponentMismatch {
                found: self.ncomp,
                model: kind.name(),
                needed,
            });
        }
        let grid = Grid::new(self.n as usize)
            .map_err(|_| SnapshotError::BadGridSize(self.n))?;
        let npts = grid.len();
        let comp = |c: usize| -> &[f64] { &self.samples[c * npts..(c + 1) * npts] };
        let v = SpectralVectorField::from_samples(grid, [comp(0), comp(1), comp(2)]);
        let b = if self.ncomp == 6 {
            Some(SpectralVectorField::from_samples(
                grid,
                [comp(3), comp(4), comp(5)],
            ))
        } else {
            None
        };
        let mut state = ModelState::new(kind, v, b, filter)
            .map_err(|e| SnapshotError::Io(std::io::Error::other(e.to_string())))?;
        state.time = self.time;
        Ok(state)
    }
}

pub fn write_snapshot(state: &ModelState, path: &Path) -> Result<()> {
    let snap = Snapshot::from_state(state);
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&snap.n.to_le_bytes())?;
    w.write_all(&snap.ncomp.to_le_bytes())?;
    w.write_all(&snap.alpha.to_le_bytes())?;
    w.write_all(&snap.theta.to_le_bytes())?;
    w.write_all(&snap.time.to_le_bytes())?;
    for &x in &snap.samples {
        w.write_all(&x.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if magic != MAGIC {
        return Err(SnapshotError::BadMagic(magic));
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf)?;
    let version = u32::from_le_bytes(u32buf);
    if version != VERSION {
        return Err(SnapshotError::UnsupportedVersion(version));
    }
    r.read_exact(&mut u32buf)?;
    let n = u32::from_le_bytes(u32buf);
    r.read_exact(&mut u32buf)?;
    let ncomp = u32::from_le_bytes(u32buf);
    if ncomp != 3 && ncomp != 6 {
        return Err(SnapshotError::BadComponentCount(ncomp));
    }
    if n < 8 || !n.is_power_of_two() {
        return Err(SnapshotError::BadGridSize(n));
    }
    let mut f64buf = [0u8; 8];
    r.read_exact(&mut f64buf)?;
    let alpha = f64::from_le_bytes(f64buf);
    r.read_exact(&mut f64buf)?;
    let theta = f64::from_le_bytes(f64buf);
    r.read_exact(&mut f64buf)?;
    let time = f64::from_le_bytes(f64buf);

    let expected = ncomp as usize * (n as usize).pow(3) * 8;
    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    if payload.len() != expected {
        return Err(SnapshotError::Truncated {
            expected,
            actual: payload.len(),
        });
    }
    let mut samples = Vec::with_capacity(expected / 8);
    for (i, chunk) in payload.chunks_exact(8).enumerate() {
        let x = f64::from_le_bytes(chunk.try_into().expect("chunk of 8"));
        if !x.is_finite() {
            return Err(SnapshotError::NonFinitePayload { index: i });
        }
        samples.push(x);
    }
    Ok(Snapshot {
        n,
        ncomp,
        alpha,
        theta,
        time,
        samples,
    })
}
