//! Shared test infrastructure: the brute-force network oracle and helpers
//! for building small configs and randomized traffic cases.
#![allow(dead_code)] // each test binary uses a different subset

pub mod oracle;

use chiplet_cosim::config::{load_config, SystemConfig};
use chiplet_cosim::network::{Flow, NetworkState};
use chiplet_cosim::routing::{compute_routes, RoutingTable};
use chiplet_cosim::{ChipletId, Cycle, Nanos};

/// Mesh config with explicit network parameters and statistics windows off.
pub fn mesh_config(
    width: u32,
    height: u32,
    bandwidth: u32,
    link_latency: u32,
    router_latency: u32,
    buffer_depth: u32,
) -> SystemConfig {
    let doc = format!(
        r#"{{
            "mesh": {{
                "width": {width}, "height": {height},
                "templates": [{{"type_tag": "a", "mem_capacity": 1048576,
                    "throughput": 1e9, "energy_per_mac": 1e-12, "static_power": 0.0}}]
            }},
            "link_template": {{ "bandwidth": {bandwidth}, "latency": {link_latency} }},
            "timing": {{ "router_latency": {router_latency}, "buffer_depth": {buffer_depth},
                         "flit_bytes": 16, "max_packet_flits": 16, "warmup": 0, "cooldown": 0 }}
        }}"#
    );
    load_config(&doc).unwrap()
}

pub fn test_flow(id: u64, src: ChipletId, dst: ChipletId, bytes: u64, inject_ns: Nanos) -> Flow {
    Flow {
        id,
        model_id: 0,
        layer_idx: 0,
        inference_idx: 0,
        src,
        dst,
        bytes,
        inject_time: inject_ns,
        complete_time: None,
    }
}

/// Drive the production simulator until every flow completes; returns each
/// flow's completion cycle keyed by flow id.
pub fn run_production(
    config: &SystemConfig,
    routes: &RoutingTable,
    flows: Vec<Flow>,
) -> std::collections::HashMap<u64, Cycle> {
    let mut net = NetworkState::new(config, routes);
    let expected = flows.len();
    net.inject_flows(flows).unwrap();
    let mut done = std::collections::HashMap::new();
    loop {
        let completions = net.advance(None);
        if completions.is_empty() {
            break;
        }
        for c in completions {
            done.insert(c.flow_id, c.cycle);
        }
    }
    net.check_invariants();
    assert_eq!(done.len(), expected, "production run left flows pending");
    done
}

/// Run the same flow set through the brute-force oracle.
pub fn run_oracle(
    config: &SystemConfig,
    routes: &RoutingTable,
    flows: &[Flow],
) -> std::collections::HashMap<u64, Cycle> {
    let oracle_flows: Vec<oracle::OracleFlow> = flows
        .iter()
        .map(|f| oracle::OracleFlow {
            id: f.id,
            src: f.src,
            dst: f.dst,
            flits: f.bytes.div_ceil(config.flit_bytes as u64),
            inject_cycle: f.inject_time.div_ceil(config.cycle_period),
        })
        .collect();
    oracle::walk(config, routes, &oracle_flows)
}

/// Compare production and oracle on one case, panicking with context on any
/// per-flow mismatch.
pub fn assert_bit_exact(config: &SystemConfig, flows: Vec<Flow>, label: &str) {
    let routes = compute_routes(config);
    let oracle = run_oracle(config, &routes, &flows);
    let production = run_production(config, &routes, flows);
    for (flow_id, cycle) in &production {
        assert_eq!(
            oracle.get(flow_id),
            Some(cycle),
            "{label}: flow {flow_id} completed at {cycle} (production) vs {:?} (oracle)",
            oracle.get(flow_id)
        );
    }
    assert_eq!(oracle.len(), production.len(), "{label}: flow count mismatch");
}
