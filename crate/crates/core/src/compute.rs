//! Per-segment compute evaluation behind a pluggable backend interface.
//!
//! A backend answers one question: how long does this segment take on this
//! chiplet, and what does it cost in energy? The shipped analytical backend
//! divides MAC count by sustained throughput. Backend resolution happens per
//! chiplet `type_tag`, so heterogeneous systems evaluate each chiplet with
//! its own parameters, and an external simulator can slot in behind the same
//! interface without touching the coordinator.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::config::{ChipletSpec, SystemConfig};
use crate::error::ConfigError;
use crate::mapper::SegmentAssignment;

/// Latency, energy, and average power of one segment execution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComputeResult {
    /// Integer nanoseconds, at least 1.
    pub latency_ns: u64,
    pub energy_joules: f64,
    pub avg_power_watts: f64,
}

pub trait ComputeBackend: Send + Sync {
    fn name(&self) -> &'static str;

    /// Pure and side-effect free; safe to evaluate segments concurrently or
    /// ahead of time.
    fn simulate_segment(&self, segment: &SegmentAssignment, chiplet: &ChipletSpec) -> ComputeResult;
}

/// Names a backend for one chiplet type, with optional parameter overrides
/// taking precedence over the per-chiplet values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BackendDescriptor {
    pub type_tag: String,
    pub name: String,
    #[serde(default)]
    pub throughput: Option<f64>,
    #[serde(default)]
    pub energy_per_mac: Option<f64>,
}

/// MAC-throughput model: latency = ceil(macs / throughput), energy =
/// macs * energy_per_mac, constant power over the segment duration.
#[derive(Debug, Default)]
pub struct AnalyticalBackend {
    pub throughput_override: Option<f64>,
    pub energy_per_mac_override: Option<f64>,
}

impl ComputeBackend for AnalyticalBackend {
    fn name(&self) -> &'static str {
        "analytical"
    }

    fn simulate_segment(&self, segment: &SegmentAssignment, chiplet: &ChipletSpec) -> ComputeResult {
        if segment.macs == 0 {
            // Zero-work segments (pooling) take one quantum and no energy.
            return ComputeResult {
                latency_ns: 1,
                energy_joules: 0.0,
                avg_power_watts: 0.0,
            };
        }
        let throughput = self.throughput_override.unwrap_or(chiplet.throughput);
        let energy_per_mac = self.energy_per_mac_override.unwrap_or(chiplet.energy_per_mac);
        let latency_ns = ((segment.macs as f64 * 1.0e9 / throughput).ceil() as u64).max(1);
        let energy_joules = segment.macs as f64 * energy_per_mac;
        ComputeResult {
            latency_ns,
            energy_joules,
            avg_power_watts: energy_joules / (latency_ns as f64 * 1.0e-9),
        }
    }
}

/// Maps every chiplet `type_tag` in the system to exactly one backend.
/// Unknown tags fail here, at configuration time, not mid-simulation.
pub struct BackendRegistry {
    by_tag: BTreeMap<String, Arc<dyn ComputeBackend>>,
}

impl BackendRegistry {
    /// Registry with the analytical backend behind every tag in the system,
    /// applying any per-tag overrides.
    pub fn analytical(
        config: &SystemConfig,
        descriptors: &[BackendDescriptor],
    ) -> Result<BackendRegistry, ConfigError> {
        let mut by_tag: BTreeMap<String, Arc<dyn ComputeBackend>> = BTreeMap::new();
        for desc in descriptors {
            if desc.name != "analytical" {
                return Err(ConfigError::field(
                    "backends",
                    format!("unknown backend `{}` for tag `{}`", desc.name, desc.type_tag),
                ));
            }
            by_tag.insert(
                desc.type_tag.clone(),
                Arc::new(AnalyticalBackend {
                    throughput_override: desc.throughput,
                    energy_per_mac_override: desc.energy_per_mac,
                }),
            );
        }
        for chiplet in &config.chiplets {
            by_tag
                .entry(chiplet.type_tag.clone())
                .or_insert_with(|| Arc::new(AnalyticalBackend::default()));
        }
        Ok(BackendRegistry { by_tag })
    }

    pub fn resolve(&self, type_tag: &str) -> Result<&Arc<dyn ComputeBackend>, ConfigError> {
        self.by_tag
            .get(type_tag)
            .ok_or_else(|| ConfigError::UnknownTypeTag(type_tag.to_string()))
    }

    /// Validate that every chiplet in the system resolves.
    pub fn check_coverage(&self, config: &SystemConfig) -> Result<(), ConfigError> {
        for chiplet in config.compute_chiplets() {
            self.resolve(&chiplet.type_tag)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::load_config;
    use crate::ChipletId;

    fn chiplet(throughput: f64, energy_per_mac: f64) -> ChipletSpec {
        ChipletSpec {
            id: 0,
            type_tag: "imc-a".to_string(),
            grid_pos: (0, 0),
            phys_pos: (0.0, 0.0, 4.0, 4.0),
            mem_capacity: 1 << 20,
            throughput,
            energy_per_mac,
            static_power: 0.0,
            io_role: false,
        }
    }

    fn segment(macs: u64) -> SegmentAssignment {
        SegmentAssignment {
            model_id: 0,
            layer_idx: 0,
            segment_idx: 0,
            chiplet_id: 0 as ChipletId,
            fraction: 1.0,
            weight_bytes: 0,
            macs,
        }
    }

    #[test]
    fn latency_is_macs_over_throughput() {
        let backend = AnalyticalBackend::default();
        let r = backend.simulate_segment(&segment(1_000_000_000), &chiplet(1.0e12, 2.0e-12));
        assert_eq!(r.latency_ns, 1_000_000); // 1 ms
        assert!((r.energy_joules - 1.0e9 * 2.0e-12).abs() < 1e-15);
        // avg_power * latency recovers energy
        let recovered = r.avg_power_watts * r.latency_ns as f64 * 1e-9;
        assert!((recovered - r.energy_joules).abs() <= 1e-4 * r.energy_joules);
    }

    #[test]
    fn zero_macs_takes_one_quantum() {
        let backend = AnalyticalBackend::default();
        let r = backend.simulate_segment(&segment(0), &chiplet(1.0e12, 2.0e-12));
        assert_eq!(r.latency_ns, 1);
        assert_eq!(r.energy_joules, 0.0);
    }

    #[test]
    fn half_fraction_of_layer_halves_latency() {
        // 6912-MAC layer split in half on a 1e9 MAC/s chiplet
        let backend = AnalyticalBackend::default();
        let r = backend.simulate_segment(&segment(3456), &chiplet(1.0e9, 1.0e-12));
        assert_eq!(r.latency_ns, 3456);
    }

    #[test]
    fn latency_monotone_in_macs_and_throughput() {
        let backend = AnalyticalBackend::default();
        let mut last = 0;
        for macs in [1u64, 10, 1000, 12345, 99_999] {
            let r = backend.simulate_segment(&segment(macs), &chiplet(3.0e9, 1.0e-12));
            assert!(r.latency_ns >= last);
            last = r.latency_ns;
        }
        let slow = backend.simulate_segment(&segment(50_000), &chiplet(1.0e9, 1.0e-12));
        let fast = backend.simulate_segment(&segment(50_000), &chiplet(4.0e9, 1.0e-12));
        assert!(fast.latency_ns <= slow.latency_ns);
    }

    #[test]
    fn equal_split_latency_within_one_ns_of_whole_over_k() {
        let backend = AnalyticalBackend::default();
        let chip = chiplet(7.0e8, 1.0e-12);
        for k in [2u64, 3, 5] {
            let whole = backend.simulate_segment(&segment(100_000), &chip).latency_ns;
            let part = backend.simulate_segment(&segment(100_000 / k), &chip).latency_ns;
            let ideal = whole / k;
            assert!(part.abs_diff(ideal) <= 1, "k={k}: {part} vs {ideal}");
        }
    }

    fn hetero_config() -> SystemConfig {
        let doc = r#"{
            "mesh": {
                "width": 2, "height": 1,
                "templates": [
                    {"type_tag": "imc-a", "mem_capacity": 1000, "throughput": 1e12,
                     "energy_per_mac": 1e-12, "static_power": 0.0},
                    {"type_tag": "imc-b", "mem_capacity": 1000, "throughput": 2e12,
                     "energy_per_mac": 5e-13, "static_power": 0.0}
                ]
            },
            "link_template": { "bandwidth": 1, "latency": 1 }
        }"#;
        load_config(doc).unwrap()
    }

    #[test]
    fn heterogeneous_tags_resolve_independently() {
        let config = hetero_config();
        let registry = BackendRegistry::analytical(&config, &[]).unwrap();
        registry.check_coverage(&config).unwrap();
        let a = registry.resolve("imc-a").unwrap();
        let b = registry.resolve("imc-b").unwrap();
        let seg = segment(1_000_000);
        let ra = a.simulate_segment(&seg, config.chiplet(0));
        let rb = b.simulate_segment(&seg, config.chiplet(1));
        assert_eq!(ra.latency_ns, 2 * rb.latency_ns);
    }

    #[test]
    fn unknown_tag_fails_at_validation() {
        let config = hetero_config();
        let registry = BackendRegistry::analytical(&config, &[]).unwrap();
        match registry.resolve("imc-z").err() {
            Some(ConfigError::UnknownTypeTag(tag)) => assert_eq!(tag, "imc-z"),
            other => panic!("expected UnknownTypeTag, got {other:?}"),
        }
    }

    #[test]
    fn descriptor_overrides_apply() {
        let config = hetero_config();
        let descriptors = vec![BackendDescriptor {
            type_tag: "imc-a".to_string(),
            name: "analytical".to_string(),
            throughput: Some(5.0e11),
            energy_per_mac: None,
        }];
        let registry = BackendRegistry::analytical(&config, &descriptors).unwrap();
        let r = registry
            .resolve("imc-a")
            .unwrap()
            .simulate_segment(&segment(1_000_000), config.chiplet(0));
        assert_eq!(r.latency_ns, 2000);
    }

    #[test]
    fn segment_energy_is_additive() {
        let backend = AnalyticalBackend::default();
        let chip = chiplet(1.0e9, 3.0e-13);
        let total: f64 = [3000u64, 2000, 1912]
            .iter()
            .map(|&m| backend.simulate_segment(&segment(m), &chip).energy_joules)
            .sum();
        assert!((total - 6912.0 * 3.0e-13).abs() < 1e-18);
    }
}
