//! Simulation report structures and time-series writers.
//!
//! Reports serialize to JSON deterministically: identical runs with the same
//! seed produce byte-identical documents, so no wall-clock data lives here.

use std::io::Write;

use serde::Serialize;

use crate::network::{Flow, LinkUtilization, SourceAggregate};
use crate::Nanos;

#[derive(Debug, Clone, Serialize)]
pub struct ReportMeta {
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
    pub mode: String,
    pub pipelined: bool,
    pub weight_stationary: bool,
    pub model_count: u32,
    pub sim_end_ns: Nanos,
}

#[derive(Debug, Clone, Serialize)]
pub struct LayerBreakdown {
    pub layer: u32,
    /// Total compute occupancy of this layer across all inferences.
    pub compute_ns: u64,
    /// Total time the layer's outgoing activations spent in the network.
    pub comm_ns: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelReport {
    pub id: u64,
    pub name: String,
    pub arrival_index: u32,
    pub inferences: u32,
    pub skip_count: u32,
    pub segments: u32,
    pub mapped_ns: Nanos,
    pub completed_ns: Nanos,
    pub end_to_end_ns: Nanos,
    pub layers: Vec<LayerBreakdown>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SkippedModel {
    pub id: u64,
    pub name: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct NetworkReport {
    pub flows_total: u64,
    pub flows_local: u64,
    pub flits_injected: u64,
    pub flits_delivered: u64,
    pub total_flit_hops: u64,
    pub mean_link_utilization: f64,
    pub per_link: Vec<LinkUtilization>,
    pub per_source: Vec<SourceAggregate>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub compute_joules: f64,
    pub network_joules: f64,
    pub static_joules: f64,
    pub total_joules: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowReport {
    pub warmup_ns: Nanos,
    pub cooldown_ns: Nanos,
    pub window_start_ns: Nanos,
    pub window_end_ns: Nanos,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub meta: ReportMeta,
    pub models: Vec<ModelReport>,
    pub skipped_models: Vec<SkippedModel>,
    pub network: NetworkReport,
    pub energy: EnergyReport,
    pub window: WindowReport,
}

impl SimulationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn model_by_id(&self, id: u64) -> Option<&ModelReport> {
        self.models.iter().find(|m| m.id == id)
    }

    /// Mean end-to-end latency per model name, name-sorted.
    pub fn mean_latency_by_name(&self) -> Vec<(String, f64)> {
        let mut sums: std::collections::BTreeMap<&str, (f64, u64)> = Default::default();
        for m in &self.models {
            let entry = sums.entry(&m.name).or_default();
            entry.0 += m.end_to_end_ns as f64;
            entry.1 += 1;
        }
        sums.into_iter()
            .map(|(name, (sum, n))| (name.to_string(), sum / n as f64))
            .collect()
    }
}

/// Flow log CSV: one row per flow, local flows included (complete == inject).
pub fn write_flow_log(flows: &[Flow], mut out: impl Write, header: &str) -> std::io::Result<()> {
    writeln!(out, "{header}")?;
    writeln!(out, "flow_id,model,layer,inference,src,dst,bytes,inject_ns,complete_ns")?;
    for f in flows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            f.id,
            f.model_id,
            f.layer_idx,
            f.inference_idx,
            f.src,
            f.dst,
            f.bytes,
            f.inject_time,
            f.complete_time.map_or(String::from(""), |t| t.to_string()),
        )?;
    }
    Ok(())
}

/// Debug network trace CSV: (cycle, link, flits granted).
pub fn write_net_trace(
    rows: &[(u64, u32, u32)],
    mut out: impl Write,
    header: &str,
) -> std::io::Result<()> {
    writeln!(out, "{header}")?;
    writeln!(out, "cycle,link,flits")?;
    for &(cycle, link, flits) in rows {
        writeln!(out, "{cycle},{link},{flits}")?;
    }
    Ok(())
}
