//! Pseudo-spectral laboratory for the inviscid subgrid-scale alpha-models of
//! turbulence on the periodic box `[0, 2pi)^3`: model dynamics with exact
//! semi-discrete conservation, mollifier-based defect-term estimators,
//! structure-function regularity diagnostics and the conservation-threshold
//! tables.

pub mod balance;
pub mod defects;
pub mod error;
pub mod fft;
pub mod field;
pub mod filter;
pub mod grid;
pub mod models;
pub mod mollifier;
pub mod structure;
pub mod synth;

pub mod exponents;

pub use error::{Error, Result};
pub use field::{
    apply_filter, apply_inverse_filter, l2_inner, solve_pressure, CompensatedSum, ScalarField,
    SpectralVectorField, TensorField,
};
pub use filter::{FilterKind, FilterSpec};
pub use grid::Grid;
pub use models::{
    conserved_pairing, conserved_quantity, rhs, run_simulation, step_rk4, ModelKind, ModelState,
    Tendency, Trajectory,
};
pub use synth::{generate, SeededRng, SynthKind, SynthSpec};

pub use defects::{
    catalog, default_epsilon_ladder, defect_estimate, defect_estimates, defect_local_field,
    defect_series, defect_series_batch, DefectFields, DefectLabel, DefectSeries, DefectSpec,
    Pattern, Role,
};
pub use mollifier::{gauss_legendre, stencil_directions, Mollifier, MollifierProfile, XiQuadrature};
pub use structure::{
    besov_exponent_estimate, default_radii, fit_power_law, sigma_probe, structure_function,
    BesovEstimate, SigmaProbe, SlopeFit, StructureFunctionTable,
};

pub use balance::{energy_balance_residual, leray_defect_local_exact};
pub use exponents::{
    fractional_onsager_exponent, mhd_tradeoff_check, onsager_besov_threshold,
    onsager_sobolev_threshold, BesovCondition, Bound, Frac, FractionalExponent, SobolevCondition,
};
