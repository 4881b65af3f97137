//! Brute-force reference walker for the cycle-level network contract.
//!
//! Every flit is an explicit record; every cycle recomputes arrivals,
//! injection fill, and switch allocation from first principles with no
//! incremental state, no event skipping, and credit headroom derived from
//! buffer and pipe occupancy rather than maintained counters. Slow on
//! purpose: its only job is to be an obviously faithful reading of the
//! contract that the production simulator must match bit for bit.

use std::collections::HashMap;

use chiplet_cosim::config::SystemConfig;
use chiplet_cosim::routing::RoutingTable;
use chiplet_cosim::{ChipletId, Cycle};

pub struct OracleFlow {
    pub id: u64,
    pub src: ChipletId,
    pub dst: ChipletId,
    pub flits: u64,
    pub inject_cycle: Cycle,
}

#[derive(Clone, Copy, PartialEq)]
enum Place {
    Unqueued,
    SourceQueue,
    Buffer { entry: Cycle },
    Pipe { arrive: Cycle },
    Delivered,
}

struct FlitRec {
    flow: usize,
    hop: usize,
    place: Place,
}

pub fn walk(
    config: &SystemConfig,
    routes: &RoutingTable,
    flows: &[OracleFlow],
) -> HashMap<u64, Cycle> {
    let n = config.chiplets.len();
    let depth = config.buffer_depth as usize;
    let router_latency = config.router_latency as u64;
    let packet_flits = config.max_packet_flits as u64;

    // Port layout mirrors the declaration order contract: input port 0 is the
    // local injection port, then incoming links by link index; output port 0
    // is ejection, then outgoing links by link index.
    let mut in_ports: Vec<Vec<usize>> = vec![Vec::new(); n]; // link idx per port (after local)
    let mut out_ports: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (idx, link) in config.links.iter().enumerate() {
        in_ports[link.dst as usize].push(idx);
        out_ports[link.src as usize].push(idx);
    }

    // All flits materialized up front.
    let mut flits: Vec<FlitRec> = Vec::new();
    let mut flow_ranges = Vec::new();
    for (f_idx, flow) in flows.iter().enumerate() {
        let start = flits.len();
        for _ in 0..flow.flits {
            flits.push(FlitRec { flow: f_idx, hop: 0, place: Place::Unqueued });
        }
        flow_ranges.push(start..flits.len());
    }
    let route_of = |f_idx: usize| routes.route(flows[f_idx].src, flows[f_idx].dst);

    // Explicit FIFOs hold flit indices.
    let mut buffers: Vec<Vec<Vec<usize>>> =
        (0..n).map(|r| vec![Vec::new(); in_ports[r].len() + 1]).collect();
    let mut pipes: Vec<Vec<usize>> = vec![Vec::new(); config.links.len()];
    // Source queues hold (flow, next flit cursor).
    let mut src_queues: Vec<Vec<(usize, u64)>> = vec![Vec::new(); n];
    let mut rr: Vec<Vec<usize>> = (0..n).map(|r| vec![0; out_ports[r].len() + 1]).collect();
    let mut delivered: Vec<u64> = vec![0; flows.len()];
    let mut completions: HashMap<u64, Cycle> = HashMap::new();

    let limit = 1_000_000u64;
    for t in 0..limit {
        if completions.len() == flows.len() {
            break;
        }

        // 1. Injections due this cycle enter their source queues, flow order.
        for (f_idx, flow) in flows.iter().enumerate() {
            if flow.inject_cycle <= t
                && flits[flow_ranges[f_idx].start].place == Place::Unqueued
            {
                for i in flow_ranges[f_idx].clone() {
                    flits[i].place = Place::SourceQueue;
                }
                src_queues[flow.src as usize].push((f_idx, 0));
            }
        }

        // 2. Link arrivals append to the tail of the downstream buffer.
        for (link_idx, link) in config.links.iter().enumerate() {
            let port = 1 + in_ports[link.dst as usize]
                .iter()
                .position(|&l| l == link_idx)
                .unwrap();
            let mut remaining = Vec::new();
            for &flit_idx in &pipes[link_idx] {
                let Place::Pipe { arrive } = flits[flit_idx].place else { unreachable!() };
                if arrive <= t {
                    flits[flit_idx].place = Place::Buffer { entry: t };
                    buffers[link.dst as usize][port].push(flit_idx);
                } else {
                    remaining.push(flit_idx);
                }
            }
            pipes[link_idx] = remaining;
        }

        // 3. Source fill: flows at one source rotate at packet boundaries.
        for src in 0..n {
            while !src_queues[src].is_empty() && buffers[src][0].len() < depth {
                let (f_idx, cursor) = src_queues[src][0];
                let flit_idx = flow_ranges[f_idx].start + cursor as usize;
                flits[flit_idx].place = Place::Buffer { entry: t };
                buffers[src][0].push(flit_idx);
                let next = cursor + 1;
                if next == flows[f_idx].flits {
                    src_queues[src].remove(0);
                } else {
                    src_queues[src][0].1 = next;
                    if next % packet_flits == 0 && src_queues[src].len() > 1 {
                        let entry = src_queues[src].remove(0);
                        src_queues[src].push(entry);
                    }
                }
            }
        }

        // 4. Switch allocation. Credit headroom per link is derived from
        //    occupancy at this point in the cycle and only decremented by
        //    this cycle's grants; dequeues become visible next cycle.
        let mut headroom: Vec<usize> = config
            .links
            .iter()
            .enumerate()
            .map(|(idx, link)| {
                let port = 1 + in_ports[link.dst as usize]
                    .iter()
                    .position(|&l| l == idx)
                    .unwrap();
                depth - buffers[link.dst as usize][port].len() - pipes[idx].len()
            })
            .collect();

        for r in 0..n {
            let n_inputs = buffers[r].len();
            for out in 0..out_ports[r].len() + 1 {
                let (link_idx, bandwidth) = if out == 0 {
                    (None, 1)
                } else {
                    let l = out_ports[r][out - 1];
                    (Some(l), config.links[l].bandwidth)
                };
                for _ in 0..bandwidth {
                    if let Some(l) = link_idx {
                        if headroom[l] == 0 {
                            break;
                        }
                    }
                    // one round-robin scan for a grantable head flit
                    let mut granted = None;
                    for offset in 0..n_inputs {
                        let port = (rr[r][out] + offset) % n_inputs;
                        let Some(&head) = buffers[r][port].first() else { continue };
                        let Place::Buffer { entry } = flits[head].place else { unreachable!() };
                        if entry + router_latency > t {
                            continue;
                        }
                        let route = route_of(flits[head].flow);
                        let wants_local = flits[head].hop == route.len();
                        let wanted_link = if wants_local {
                            None
                        } else {
                            let next = route[flits[head].hop];
                            Some(
                                out_ports[r]
                                    .iter()
                                    .copied()
                                    .find(|&l| config.links[l].dst == next)
                                    .expect("route follows declared links"),
                            )
                        };
                        if wanted_link == link_idx {
                            granted = Some((port, head));
                            break;
                        }
                    }
                    let Some((port, head)) = granted else { break };
                    buffers[r][port].remove(0);
                    rr[r][out] = (port + 1) % n_inputs;
                    match link_idx {
                        None => {
                            flits[head].place = Place::Delivered;
                            let flow = flits[head].flow;
                            delivered[flow] += 1;
                            if delivered[flow] == flows[flow].flits {
                                completions.insert(flows[flow].id, t);
                            }
                        }
                        Some(l) => {
                            headroom[l] -= 1;
                            flits[head].hop += 1;
                            flits[head].place =
                                Place::Pipe { arrive: t + config.links[l].latency as u64 };
                            pipes[l].push(head);
                        }
                    }
                }
            }
        }

        // 5. A drained network resets its arbitration pointers.
        let any_resident = flits.iter().any(|f| {
            matches!(f.place, Place::Buffer { .. } | Place::Pipe { .. } | Place::SourceQueue)
        });
        if !any_resident {
            for router in &mut rr {
                for pointer in router.iter_mut() {
                    *pointer = 0;
                }
            }
        }
    }
    assert_eq!(
        completions.len(),
        flows.len(),
        "oracle hit the cycle limit with flows outstanding"
    );
    completions
}
