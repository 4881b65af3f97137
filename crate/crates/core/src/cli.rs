//! Batch front end: manifest loading, the `run`, `compare`, and `thermal`
//! pipelines, and the output writers. The `chiplet-cosim` binary is a thin
//! argument parser over these functions.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::config::{load_config_file, SystemConfig};
use crate::cosim::{run, Mode, RunOptions};
use crate::error::{ConfigError, SimError};
use crate::models::builtin_library;
use crate::power::PowerTrace;
use crate::report::{write_flow_log, write_net_trace};
use crate::thermal::{build_thermal_model, steady_state_solve, transient_solve, ThermalModel};
use crate::workload::{generate_workload, DnnModel, ModelLibrary};

/// Which artifacts a run writes.
#[derive(Debug, Clone, Copy, Default)]
pub struct EmitSet {
    pub report: bool,
    pub flows: bool,
    pub power: bool,
    pub thermal: bool,
    pub debug_trace: bool,
}

impl EmitSet {
    pub fn parse(list: &str) -> Result<EmitSet, ConfigError> {
        let mut set = EmitSet::default();
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item {
                "report" => set.report = true,
                "flows" => set.flows = true,
                "power" => set.power = true,
                "thermal" => set.thermal = true,
                "debug-trace" => set.debug_trace = true,
                other => {
                    return Err(ConfigError::field(
                        "--emit",
                        format!("unknown artifact `{other}` (expected report, flows, power, thermal, debug-trace)"),
                    ))
                }
            }
        }
        Ok(set)
    }
}

/// Everything one run needs; the seed lands in every output for reproducibility.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub config_path: PathBuf,
    pub workload_path: PathBuf,
    pub mode: Mode,
    pub pipelined: bool,
    pub weight_stationary: bool,
    pub inferences: Option<u32>,
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
    pub emit: EmitSet,
}

/// Workload spec document: a model mix over a library plus stream parameters.
#[derive(Debug, Clone, Deserialize)]
pub struct WorkloadSpec {
    /// Path to a model library JSON, relative to the spec file. Omitted means
    /// the built-in library.
    #[serde(default)]
    pub library: Option<String>,
    pub count: u32,
    pub mix: Vec<MixEntry>,
    pub inferences: u32,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct MixEntry {
    pub name: String,
    pub weight: f64,
}

pub fn load_workload_spec(path: &Path) -> Result<(WorkloadSpec, ModelLibrary), ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let spec: WorkloadSpec = serde_json::from_str(&text)?;
    let library = match &spec.library {
        None => builtin_library(),
        Some(rel) => {
            let lib_path = path.parent().unwrap_or(Path::new(".")).join(rel);
            let lib_text = fs::read_to_string(&lib_path).map_err(|source| ConfigError::Io {
                path: lib_path.display().to_string(),
                source,
            })?;
            ModelLibrary::from_json(&lib_text)?
        }
    };
    Ok((spec, library))
}

pub fn build_workload(
    spec: &WorkloadSpec,
    library: &ModelLibrary,
    inferences_override: Option<u32>,
    seed_override: Option<u64>,
) -> Result<(Vec<DnnModel>, u64), ConfigError> {
    let mix: Vec<(String, f64)> = spec.mix.iter().map(|m| (m.name.clone(), m.weight)).collect();
    let seed = seed_override.unwrap_or(spec.seed);
    let inferences = inferences_override.unwrap_or(spec.inferences);
    let workload = generate_workload(library, spec.count, &mix, inferences, seed)?;
    Ok((workload, seed))
}

fn output_header(config: &SystemConfig, seed: u64) -> String {
    format!(
        "# seed={seed} config_hash={} version={}",
        config.content_hash(),
        env!("CARGO_PKG_VERSION")
    )
}

fn write_file(path: &Path, write: impl FnOnce(&mut fs::File) -> std::io::Result<()>) -> Result<(), ConfigError> {
    let mut file = fs::File::create(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    write(&mut file).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_thermal_outputs(
    model: &ThermalModel,
    trace: &PowerTrace,
    config: &SystemConfig,
    out_dir: &Path,
    header: &str,
) -> Result<(), SimError> {
    let mean_power = trace.mean_power_per_chiplet();
    let steady = steady_state_solve(model, &mean_power)?;

    // Cap the transient output at ~200 sampled instants.
    let every = (trace.bin_count() / 200).max(1);
    let states = transient_solve(model, trace, every)?;

    write_file(&out_dir.join("thermal_transient.csv"), |f| {
        writeln!(f, "{header}")?;
        writeln!(f, "time_us,node_id,kelvin")?;
        for state in &states {
            for node in 0..model.node_count() {
                writeln!(
                    f,
                    "{},{},{:.6}",
                    state.time_ns / 1000,
                    node,
                    state.absolute(model, node)
                )?;
            }
        }
        Ok(())
    })?;

    write_file(&out_dir.join("thermal_steady.csv"), |f| {
        writeln!(f, "{header}")?;
        writeln!(f, "node_id,kelvin")?;
        for node in 0..model.node_count() {
            writeln!(f, "{},{:.6}", node, steady.absolute(model, node))?;
        }
        Ok(())
    })?;

    let final_state = states.last();
    write_file(&out_dir.join("heatmap.csv"), |f| {
        writeln!(f, "{header}")?;
        writeln!(f, "chiplet_id,col,row,steady_kelvin,final_kelvin")?;
        let steady_per_chiplet = model.per_chiplet_delta(&steady);
        let final_per_chiplet = final_state.map(|s| model.per_chiplet_delta(s));
        for chiplet in &config.chiplets {
            let i = chiplet.id as usize;
            let fin = final_per_chiplet.as_ref().map_or(model.ambient_kelvin, |d| {
                model.ambient_kelvin + d[i]
            });
            writeln!(
                f,
                "{},{},{},{:.6},{:.6}",
                chiplet.id,
                chiplet.grid_pos.0,
                chiplet.grid_pos.1,
                model.ambient_kelvin + steady_per_chiplet[i],
                fin
            )?;
        }
        Ok(())
    })?;
    Ok(())
}

/// Execute one run end to end and write the requested outputs.
/// Returns the process exit code: 0, or 3 when the workload contained models
/// that can never map onto this system.
pub fn cmd_run(manifest: &RunManifest) -> Result<i32, SimError> {
    let config = load_config_file(&manifest.config_path)?;
    let (spec, library) = load_workload_spec(&manifest.workload_path)?;
    let (workload, seed) = build_workload(&spec, &library, manifest.inferences, manifest.seed)?;

    let opts = RunOptions {
        mode: manifest.mode,
        pipelined: manifest.pipelined,
        weight_stationary: manifest.weight_stationary,
        seed,
        collect_power: manifest.emit.power || manifest.emit.thermal,
        debug_net_trace: manifest.emit.debug_trace,
        ..Default::default()
    };
    let output = run(&config, &workload, &opts)?;

    fs::create_dir_all(&manifest.out_dir).map_err(|source| ConfigError::Io {
        path: manifest.out_dir.display().to_string(),
        source,
    })?;
    let header = output_header(&config, seed);

    if manifest.emit.report {
        write_file(&manifest.out_dir.join("report.json"), |f| {
            f.write_all(output.report.to_json().as_bytes())
        })?;
    }
    if manifest.emit.flows {
        write_file(&manifest.out_dir.join("flows.csv"), |f| {
            write_flow_log(&output.flows, f, &header)
        })?;
    }
    if manifest.emit.power {
        if let Some(trace) = &output.power {
            write_file(&manifest.out_dir.join("power.csv"), |f| {
                trace.write_csv(f, &header)
            })?;
        }
    }
    if manifest.emit.thermal {
        if let Some(trace) = &output.power {
            let model = build_thermal_model(&config)?;
            write_thermal_outputs(&model, trace, &config, &manifest.out_dir, &header)?;
        }
    }
    if manifest.emit.debug_trace {
        if let Some(rows) = &output.net_trace {
            write_file(&manifest.out_dir.join("net_trace.csv"), |f| {
                write_net_trace(rows, f, &header)
            })?;
        }
    }

    for skipped in &output.report.skipped_models {
        eprintln!(
            "warning: model {} ({}) skipped: {}",
            skipped.id, skipped.name, skipped.reason
        );
    }
    Ok(if output.report.skipped_models.is_empty() { 0 } else { 3 })
}

/// Run cosim plus both baselines across an inference-count sweep and emit a
/// comparison CSV of mean latencies and underestimation factors per model.
pub fn cmd_compare(manifest: &RunManifest, sweep: &[u32]) -> Result<i32, SimError> {
    let config = load_config_file(&manifest.config_path)?;
    let (spec, library) = load_workload_spec(&manifest.workload_path)?;
    fs::create_dir_all(&manifest.out_dir).map_err(|source| ConfigError::Io {
        path: manifest.out_dir.display().to_string(),
        source,
    })?;

    let mut rows: Vec<(u32, String, f64, f64, f64)> = Vec::new();
    let mut seed = manifest.seed.unwrap_or(spec.seed);
    for &inferences in sweep {
        let (workload, used_seed) =
            build_workload(&spec, &library, Some(inferences), manifest.seed)?;
        seed = used_seed;
        let mut latencies: Vec<Vec<(String, f64)>> = Vec::new();
        for mode in [Mode::Cosim, Mode::Decoupled, Mode::CommOnly] {
            let opts = RunOptions {
                mode,
                pipelined: manifest.pipelined,
                weight_stationary: manifest.weight_stationary,
                seed: used_seed,
                ..Default::default()
            };
            let output = run(&config, &workload, &opts)?;
            latencies.push(output.report.mean_latency_by_name());
        }
        let (cosim, decoupled, comm_only) = (&latencies[0], &latencies[1], &latencies[2]);
        for (i, (name, cosim_ns)) in cosim.iter().enumerate() {
            rows.push((
                inferences,
                name.clone(),
                *cosim_ns,
                decoupled[i].1,
                comm_only[i].1,
            ));
        }
    }

    let header = output_header(&config, seed);
    write_file(&manifest.out_dir.join("compare.csv"), |f| {
        writeln!(f, "{header}")?;
        writeln!(
            f,
            "inferences,model,cosim_ns,decoupled_ns,comm_only_ns,underestimation_decoupled_pct,underestimation_comm_only_pct"
        )?;
        for (inferences, name, cosim, decoupled, comm_only) in &rows {
            writeln!(
                f,
                "{},{},{:.0},{:.0},{:.0},{:.2},{:.2}",
                inferences,
                name,
                cosim,
                decoupled,
                comm_only,
                (cosim / decoupled - 1.0) * 100.0,
                (cosim / comm_only - 1.0) * 100.0,
            )?;
        }
        Ok(())
    })?;
    Ok(0)
}

/// Thermal analysis of an existing power trace.
pub fn cmd_thermal(config_path: &Path, trace_path: &Path, out_dir: &Path) -> Result<i32, SimError> {
    let config = load_config_file(config_path)?;
    let text = fs::read_to_string(trace_path).map_err(|source| ConfigError::Io {
        path: trace_path.display().to_string(),
        source,
    })?;
    let trace = PowerTrace::from_csv(&text)?;
    if trace.chiplet_count() != config.chiplets.len() {
        return Err(ConfigError::field(
            "power trace",
            format!(
                "trace covers {} chiplets but the config defines {}",
                trace.chiplet_count(),
                config.chiplets.len()
            ),
        )
        .into());
    }
    fs::create_dir_all(out_dir).map_err(|source| ConfigError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let model = build_thermal_model(&config)?;
    // The trace does not carry the seed; hash-only header.
    let header = format!(
        "# seed=unknown config_hash={} version={}",
        config.content_hash(),
        env!("CARGO_PKG_VERSION")
    );
    write_thermal_outputs(&model, &trace, &config, out_dir, &header)?;
    Ok(0)
}

/// Map an error to the documented process exit code: 2 for configuration and
/// input problems, 1 for internal failures.
pub fn exit_code_for(err: &SimError) -> i32 {
    match err {
        SimError::Config(_) => 2,
        _ => 1,
    }
}
