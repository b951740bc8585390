//! TOML run configuration: one document drives simulation, diagnostics and
//! outputs. Unknown keys are rejected with their location.

use crate::error::{CliError, Result};
use aol_core::{
    generate, DefectLabel, FilterKind, FilterSpec, Grid, ModelKind, ModelState,
    MollifierProfile, SynthKind, SynthSpec,
};
use serde::Deserialize;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub model: String,
    pub n: usize,
    #[serde(default)]
    pub alpha: f64,
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub filter: Option<FilterSection>,
    pub init: InitSection,
    /// Magnetic initial field, `mhd_leray_alpha` only.
    #[serde(default)]
    pub init_b: Option<InitSection>,
    pub time: TimeSection,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSection {
    pub kind: String,
    #[serde(default)]
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSection {
    pub kind: String,
    #[serde(default)]
    pub kmin: Option<i64>,
    #[serde(default)]
    pub kmax: Option<i64>,
    #[serde(default)]
    pub h: Option<f64>,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    /// Defaults to the top-level seed.
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_amplitude() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub dt: f64,
    pub t_end: f64,
    /// Steps between stored snapshots; 0 disables snapshots.
    #[serde(default)]
    pub snapshot_cadence: usize,
    /// Steps between energy records.
    #[serde(default = "default_energy_cadence")]
    pub energy_cadence: usize,
}

fn default_energy_cadence() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSection {
    #[serde(default)]
    pub defects: Vec<String>,
    /// Explicit mollification ladder (strictly decreasing); defaults to the
    /// geometric ladder when omitted.
    #[serde(default)]
    pub epsilons: Option<Vec<f64>>,
    #[serde(default = "default_profile")]
    pub mollifier: String,
    /// Radial-refinement doubling for defect series.
    #[serde(default = "default_refine")]
    pub refine: bool,
    #[serde(default = "default_structure_p")]
    pub structure_p: Vec<u32>,
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
    /// Log-log fit window for the structure-function slope.
    #[serde(default)]
    pub fit_window: Option<(f64, f64)>,
}

fn default_profile() -> String {
    "bump".into()
}

fn default_refine() -> bool {
    true
}

fn default_structure_p() -> Vec<u32> {
    vec![3]
}

/// Fully validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ModelKind,
    pub grid: Grid,
    pub alpha: f64,
    pub seed: u64,
    pub filter: FilterSpec,
    pub init: SynthSpec,
    pub init_b: Option<SynthSpec>,
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_cadence: usize,
    pub energy_cadence: usize,
    pub defects: Vec<DefectLabel>,
    pub epsilons: Option<Vec<f64>>,
    pub mollifier: MollifierProfile,
    pub refine: bool,
    pub structure_p: Vec<u32>,
    pub radii: Option<Vec<f64>>,
    pub fit_window: Option<(f64, f64)>,
    pub output_dir: PathBuf,
    /// FNV-1a hash of the raw document, recorded in every output.
    pub config_hash: u64,
}

pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x1000_0000_01b3);
    }
    hash
}

fn parse_synth(section: &InitSection, default_seed: u64, path: &str) -> Result<SynthSpec> {
    let seed = section.seed.unwrap_or(default_seed);
    let kind = match section.kind.as_str() {
        "taylor_green" => SynthKind::TaylorGreen,
        "band_limited_random" => {
            let kmin = section.kmin.ok_or_else(|| {
                CliError::Config(format!("{path}: band_limited_random requires kmin"))
            })?;
            let kmax = section.kmax.ok_or_else(|| {
                CliError::Config(format!("{path}: band_limited_random requires kmax"))
            })?;
            SynthKind::BandLimitedRandom { kmin, kmax }
        }
        "power_law_rough" => {
            let h = section.h.ok_or_else(|| {
                CliError::Config(format!("{path}: power_law_rough requires h"))
            })?;
            SynthKind::PowerLawRough { h }
        }
        other => {
            return Err(CliError::Config(format!(
                "{path}.kind: unknown generator `{other}`"
            )))
        }
    };
    Ok(SynthSpec {
        kind,
        amplitude: section.amplitude,
        seed,
    })
}

/// Parse and validate a configuration document.
pub fn parse_config(document: &str) -> Result<RunConfig> {
    let file: RunConfigFile =
        toml::from_str(document).map_err(|e| CliError::Config(e.to_string()))?;

    let model = ModelKind::from_str(&file.model)
        .map_err(|e| CliError::Config(format!("model: {e}")))?;
    let grid = Grid::new(file.n).map_err(|e| CliError::Config(format!("n: {e}")))?;

    let filter = match &file.filter {
        None => {
            if model == ModelKind::Euler {
                FilterSpec::identity()
            } else {
                FilterSpec::helmholtz(file.alpha)
                    .map_err(|e| CliError::Config(format!("alpha: {e}")))?
            }
        }
        Some(section) => match section.kind.as_str() {
            "identity" => FilterSpec::identity(),
            "helmholtz" => FilterSpec::helmholtz(file.alpha)
                .map_err(|e| CliError::Config(format!("alpha: {e}")))?,
            "fractional" => {
                let theta = section.theta.ok_or_else(|| {
                    CliError::Config("filter: fractional kind requires theta".into())
                })?;
                FilterSpec::fractional(file.alpha, theta)
                    .map_err(|e| CliError::Config(format!("filter: {e}")))?
            }
            other => {
                return Err(CliError::Config(format!(
                    "filter.kind: unknown filter `{other}`"
                )))
            }
        },
    };
    if filter.kind == FilterKind::Fractional && model != ModelKind::LerayAlpha {
        return Err(CliError::Config(format!(
            "filter: the fractional regularisation is defined for leray_alpha, not {model}"
        )));
    }
    if model == ModelKind::Euler && filter.kind != FilterKind::Identity {
        return Err(CliError::Config(
            "filter: euler advects with u = v; use the identity filter".into(),
        ));
    }

    if model.requires_magnetic() && file.init_b.is_none() {
        return Err(CliError::Config(
            "init_b: mhd_leray_alpha requires a magnetic initial field".into(),
        ));
    }
    if !model.requires_magnetic() && file.init_b.is_some() {
        return Err(CliError::Config(format!(
            "init_b: {model} does not carry a magnetic field"
        )));
    }

    let mut defects = Vec::new();
    for name in &file.diagnostics.defects {
        let label = DefectLabel::from_str(name)
            .map_err(|e| CliError::Config(format!("diagnostics.defects: {e}")))?;
        if label.requires_magnetic() && !model.requires_magnetic() {
            return Err(CliError::Config(format!(
                "diagnostics.defects: {label} requires mhd_leray_alpha"
            )));
        }
        defects.push(label);
    }

    let mollifier = match file.diagnostics.mollifier.as_str() {
        "bump" => MollifierProfile::Bump,
        "quartic" => MollifierProfile::Quartic,
        other => {
            return Err(CliError::Config(format!(
                "diagnostics.mollifier: unknown profile `{other}`"
            )))
        }
    };

    for p in &file.diagnostics.structure_p {
        if !(1..=3).contains(p) {
            return Err(CliError::Config(format!(
                "diagnostics.structure_p: order {p} outside 1..=3"
            )));
        }
    }
    if let Some(eps) = &file.diagnostics.epsilons {
        if !eps.windows(2).all(|w| w[0] > w[1]) {
            return Err(CliError::Config(
                "diagnostics.epsilons: ladder must be strictly decreasing".into(),
            ));
        }
    }

    if !(file.time.dt > 0.0) || !(file.time.t_end > 0.0) {
        return Err(CliError::Config(
            "time: dt and t_end must be positive".into(),
        ));
    }

    let init = parse_synth(&file.init, file.seed, "init")?;
    let init_b = file
        .init_b
        .as_ref()
        .map(|s| parse_synth(s, file.seed.wrapping_add(1), "init_b"))
        .transpose()?;

    Ok(RunConfig {
        model,
        grid,
        alpha: file.alpha,
        seed: file.seed,
        filter,
        init,
        init_b,
        dt: file.time.dt,
        t_end: file.time.t_end,
        snapshot_cadence: file.time.snapshot_cadence,
        energy_cadence: file.time.energy_cadence.max(1),
        defects,
        epsilons: file.diagnostics.epsilons,
        mollifier,
        refine: file.diagnostics.refine,
        structure_p: file.diagnostics.structure_p,
        radii: file.diagnostics.radii,
        fit_window: file.diagnostics.fit_window,
        output_dir: file.output_dir,
        config_hash: fnv1a(document.as_bytes()),
    })
}

impl RunConfig {
    /// Build the initial model state from the generators.
    pub fn initial_state(&self) -> Result<ModelState> {
        let v = generate(&self.init, self.grid)?;
        let b = self
            .init_b
            .as_ref()
            .map(|spec| generate(spec, self.grid))
            .transpose()?;
        Ok(ModelState::new(self.model, v, b, self.filter)?)
    }
}
