//! Subcommand implementations: simulate, defect, structure, exponents.

use crate::config::RunConfig;
use crate::csvio;
use crate::error::{CliError, Result};
use crate::snapshot::write_snapshot;
use aol_core::{
    catalog, default_epsilon_ladder, default_radii, defect_series_batch, fit_power_law,
    onsager_besov_threshold, onsager_sobolev_threshold, run_simulation, stencil_directions,
    structure_function, BesovCondition, DefectFields, ModelKind, SobolevCondition, Trajectory,
    XiQuadrature,
};
use std::path::PathBuf;
use std::str::FromStr;

/// Run the configured simulation; writes `energy.csv` and cadence snapshots
/// into the output directory. On blow-up the partial series is still
/// written before the error propagates.
pub fn simulate(config: &RunConfig) -> Result<PathBuf> {
    let state = config.initial_state()?;
    std::fs::create_dir_all(&config.output_dir)?;
    let outcome = run_simulation(
        &state,
        config.dt,
        config.t_end,
        config.energy_cadence,
        config.snapshot_cadence,
    );
    let (trajectory, failure) = match outcome {
        Ok(t) => (t, None),
        Err((e, partial)) => (partial, Some(e)),
    };
    let path = config.output_dir.join("energy.csv");
    write_energy_csv(&path, config, &trajectory)?;
    write_snapshots(config, &trajectory)?;
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(path),
    }
}

fn write_energy_csv(
    path: &std::path::Path,
    config: &RunConfig,
    trajectory: &Trajectory,
) -> Result<()> {
    let mut w = csvio::create(path, config.config_hash)?;
    w.write_record(["time", "energy", "relative_drift"])
        .map_err(|e| CliError::Config(e.to_string()))?;
    let e0 = trajectory.energies.first().copied().unwrap_or(0.0);
    for (t, e) in trajectory.times.iter().zip(trajectory.energies.iter()) {
        let drift = if e0 != 0.0 { (e - e0) / e0 } else { 0.0 };
        w.write_record([
            format!("{t:.12e}"),
            format!("{e:.15e}"),
            format!("{drift:.6e}"),
        ])
        .map_err(|e| CliError::Config(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn write_snapshots(config: &RunConfig, trajectory: &Trajectory) -> Result<()> {
    for (i, state) in trajectory.snapshots.iter().enumerate() {
        let path = config.output_dir.join(format!("snapshot_{i:06}.aol"));
        write_snapshot(state, &path)?;
    }
    Ok(())
}

/// Defect-series estimates on the configured initial fields; writes
/// `defects.csv` with one row per (label, scale) and the fitted slope.
pub fn defect(config: &RunConfig) -> Result<PathBuf> {
    if config.defects.is_empty() {
        return Err(CliError::Config(
            "diagnostics.defects: no defect labels requested".into(),
        ));
    }
    let state = config.initial_state()?;
    let fields = DefectFields::new(state.velocity(), state.v.clone(), state.b.clone());
    let ladder = match &config.epsilons {
        Some(l) => l.clone(),
        None => default_epsilon_ladder(&config.grid)
            .map_err(|e| CliError::Config(e.to_string()))?,
    };
    let specs: Vec<_> = config.defects.iter().map(|&l| catalog(l)).collect();
    let series = defect_series_batch(
        &specs,
        &fields,
        &[config.mollifier],
        &ladder,
        &XiQuadrature::standard(),
        config.refine,
    )?;

    std::fs::create_dir_all(&config.output_dir)?;
    let path = config.output_dir.join("defects.csv");
    let mut w = csvio::create(&path, config.config_hash)?;
    w.write_record(["label", "epsilon", "value", "slope"])
        .map_err(|e| CliError::Config(e.to_string()))?;
    for s in &series[0] {
        let slope = s
            .slope
            .map(|v| format!("{v:.6e}"))
            .unwrap_or_else(|| "degenerate".into());
        for (&eps, &value) in s.epsilons.iter().zip(s.values.iter()) {
            w.write_record([
                s.label.name().to_string(),
                format!("{eps:.6e}"),
                format!("{value:.12e}"),
                slope.clone(),
            ])
            .map_err(|e| CliError::Config(e.to_string()))?;
        }
        let slope_text = s
            .slope
            .map(|v| format!("{v:.3}"))
            .unwrap_or_else(|| "degenerate".into());
        println!("{}: slope {}", s.label, slope_text);
    }
    w.flush()?;
    Ok(path)
}

/// Structure functions of the configured initial momentum field; writes
/// `structure.csv` and prints the fit summary.
pub fn structure(config: &RunConfig) -> Result<PathBuf> {
    let state = config.initial_state()?;
    let radii = match &config.radii {
        Some(r) => r.clone(),
        None => default_radii(&config.grid, 10),
    };
    let dirs = stencil_directions();

    std::fs::create_dir_all(&config.output_dir)?;
    let path = config.output_dir.join("structure.csv");
    let mut w = csvio::create(&path, config.config_hash)?;
    w.write_record(["p", "r", "value"])
        .map_err(|e| CliError::Config(e.to_string()))?;
    let window = config.fit_window.unwrap_or((
        radii.iter().cloned().fold(f64::INFINITY, f64::min),
        radii.iter().cloned().fold(0.0, f64::max),
    ));
    for &p in &config.structure_p {
        let table = structure_function(&state.v, p, &radii, &dirs)?;
        for (&r, &value) in table.radii.iter().zip(table.values.iter()) {
            w.write_record([
                p.to_string(),
                format!("{r:.6e}"),
                format!("{value:.12e}"),
            ])
            .map_err(|e| CliError::Config(e.to_string()))?;
        }
        match fit_power_law(&table, window) {
            Ok(fit) => {
                let mut line = format!(
                    "S_{p}: zeta_{p} = {:.4} (r2 = {:.4}, window [{:.3}, {:.3}])",
                    fit.exponent, fit.r2, window.0, window.1
                );
                if p == 3 {
                    line.push_str(&format!(", s ~ zeta_3/3 = {:.4}", fit.exponent / 3.0));
                }
                println!("{line}");
            }
            Err(e) => println!("S_{p}: fit unavailable ({e})"),
        }
    }
    w.flush()?;
    Ok(path)
}

fn sobolev_text(value: aol_core::Frac) -> String {
    format!("H^{{{value}}}")
}

/// Threshold table lines for one model, e.g.
/// `besov: s > 0; sobolev: u H^{5/2}, v H^{1/2}`.
pub fn exponents_line(model: ModelKind) -> String {
    let besov = match onsager_besov_threshold(model) {
        BesovCondition::Single { s } => format!("s > {}", s.value),
        BesovCondition::Pair { s, r, sum } => format!(
            "s > {}, r > {}, s + 2r > {}",
            s.value, r.value, sum.value
        ),
    };
    let sobolev = match onsager_sobolev_threshold(model) {
        SobolevCondition::UV { u, v } => match u {
            Some(u) => format!("u {}, v {}", sobolev_text(u.value), sobolev_text(v.value)),
            None => format!("v {}", sobolev_text(v.value)),
        },
        SobolevCondition::Pair { s, r: _, sum } => format!(
            "v H^s, B H^r with s, r > {} and s + 2r > {}",
            s.value, sum.value
        ),
    };
    format!("besov: {besov}; sobolev: {sobolev}")
}

/// The `exponents` subcommand: one line for a single model, the full tables
/// as CSV for `all`.
pub fn exponents(model_name: &str) -> Result<String> {
    if model_name == "all" {
        let mut out = String::from("model,besov,sobolev\n");
        for kind in ModelKind::all() {
            let line = exponents_line(kind);
            let (besov, sobolev) = line
                .strip_prefix("besov: ")
                .and_then(|r| r.split_once("; sobolev: "))
                .expect("exponents_line format");
            out.push_str(&format!("{kind},\"{besov}\",\"{sobolev}\"\n"));
        }
        return Ok(out);
    }
    let kind = ModelKind::from_str(model_name)
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(exponents_line(kind))
}
