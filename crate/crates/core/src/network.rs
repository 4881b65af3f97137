//! Cycle-level network-on-interposer simulator.
//!
//! Flits of wormhole packets move through per-port FIFO input buffers under
//! credit-based backpressure. Each cycle, every output port grants up to
//! `bandwidth` flits, round-robin across competing input ports with a
//! per-output pointer that advances past the granted port. A flit becomes
//! switchable `router_latency` cycles after it was written into a buffer and
//! arrives at the next buffer `link latency` cycles after the grant.
//!
//! The state is persistent: flows inject at any simulation time into whatever
//! traffic is already in flight, which realizes the pause/merge/resume
//! coordination of the co-simulation without re-simulating history. Credits
//! freed by a dequeue become visible to granting routers on the following
//! cycle, so per-cycle behavior is independent of router processing order.
//! A fully drained network returns to its initial arbitration state, which
//! makes behavior a function of the injected traffic alone.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::config::SystemConfig;
use crate::error::SimError;
use crate::routing::RoutingTable;
use crate::{ChipletId, Cycle, Nanos};

/// One chiplet-to-chiplet transfer belonging to a model's layer transition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flow {
    pub id: u64,
    pub model_id: u64,
    pub layer_idx: u32,
    pub inference_idx: u32,
    pub src: ChipletId,
    pub dst: ChipletId,
    pub bytes: u64,
    pub inject_time: Nanos,
    pub complete_time: Option<Nanos>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowCompletion {
    pub flow_id: u64,
    pub cycle: Cycle,
    pub time_ns: Nanos,
}

#[derive(Debug, Clone, Copy)]
struct Flit {
    /// Dense index into the flow table.
    flow: u32,
    /// Position of the next hop in the flow's route; `route.len()` ejects.
    hop: u16,
    /// Flit sequence number within the flow; the packet index is
    /// `seq / max_packet_flits`.
    seq: u64,
    /// Cycle this flit was written into its current buffer.
    entry: Cycle,
}

struct InputPort {
    buffer: VecDeque<Flit>,
    /// Upstream link to credit on dequeue; `None` for the local port.
    fed_by: Option<u32>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum OutputTarget {
    Local,
    Link(u32),
}

struct OutputPort {
    target: OutputTarget,
    bandwidth: u32,
    /// Round-robin pointer: input port index scanned first.
    rr: usize,
}

struct Router {
    inputs: Vec<InputPort>,
    outputs: Vec<OutputPort>,
    /// neighbor chiplet -> output port index
    out_by_neighbor: Vec<(ChipletId, usize)>,
    /// input port index fed by each incoming link, for arrivals
    occupancy: u32,
}

struct LinkState {
    dst: ChipletId,
    dst_port: usize,
    latency: u32,
    credits: u32,
    in_flight: VecDeque<(Cycle, Flit)>,
    flits_total: u64,
    last_busy: Cycle,
    /// Sparse (bin, busy-cycle-count) series at power-bin granularity.
    busy_bins: Vec<(u64, u32)>,
}

struct FlowState {
    flow: Flow,
    route: Arc<Vec<ChipletId>>,
    total_flits: u64,
    delivered: u64,
    complete_cycle: Option<Cycle>,
}

/// Per-source packet cursor: flits of a flow leave the source queue in order,
/// and the queue itself is FIFO across flows.
struct SourceEntry {
    flow: u32,
    next_seq: u64,
    total_flits: u64,
}

/// Aggregate statistics for one source chiplet.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SourceAggregate {
    pub chiplet: ChipletId,
    pub flows_injected: u64,
    pub bytes_injected: u64,
    pub flows_completed: u64,
    pub mean_latency_ns: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LinkUtilization {
    pub src: ChipletId,
    pub dst: ChipletId,
    pub flits: u64,
    /// Busy fraction of the measurement window (0 when the window is empty).
    pub utilization: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowStatsReport {
    pub per_link: Vec<LinkUtilization>,
    pub per_source: Vec<SourceAggregate>,
    pub flows_completed: u64,
    pub flows_pending: u64,
}

#[derive(Debug, Clone)]
pub struct NetworkEnergyReport {
    pub total_joules: f64,
    pub total_flit_hops: u64,
    /// Joules attributed to the chiplet co-located with each traversing router.
    pub per_chiplet_joules: Vec<f64>,
}

pub struct NetworkState {
    cycle_period: u64,
    flit_bytes: u32,
    router_latency: u32,
    buffer_depth: u32,
    max_packet_flits: u32,
    energy_per_flit_hop: f64,
    cycles_per_bin: u64,

    routers: Vec<Router>,
    links: Vec<LinkState>,
    routes: RoutingTable,
    flows: Vec<FlowState>,
    src_queues: Vec<VecDeque<SourceEntry>>,
    /// Future injections as (inject cycle, flow index), min-heap.
    pending: std::collections::BinaryHeap<std::cmp::Reverse<(Cycle, u32)>>,

    /// Next unprocessed cycle.
    current_cycle: Cycle,
    /// Flits in input buffers or on links.
    flits_active: u64,
    /// Flits waiting in source queues.
    src_flits: u64,
    /// Flits of flows still on the pending heap.
    heap_flits: u64,
    completions: Vec<FlowCompletion>,
    credit_returns: Vec<u32>,

    window: (Cycle, Cycle),
    total_flits_injected: u64,
    total_flits_delivered: u64,
    total_flit_hops: u64,
    /// Per chiplet: sparse (bin, hop-count) series in bin order.
    hop_bins: Vec<Vec<(u64, u64)>>,
    hops_per_chiplet: Vec<u64>,

    /// Debug recording of per-flow delivery order (flow, seq).
    record_deliveries: bool,
    delivery_log: Vec<(Cycle, u32, u64)>,
    /// Optional per-cycle link trace rows (cycle, link, flits granted).
    trace: Option<Vec<(Cycle, u32, u32)>>,
}

impl NetworkState {
    pub fn new(config: &SystemConfig, routes: &RoutingTable) -> NetworkState {
        let n = config.chiplets.len();
        let mut routers: Vec<Router> = (0..n)
            .map(|_| Router {
                inputs: vec![InputPort { buffer: VecDeque::new(), fed_by: None }],
                outputs: vec![OutputPort { target: OutputTarget::Local, bandwidth: 1, rr: 0 }],
                out_by_neighbor: Vec::new(),
                occupancy: 0,
            })
            .collect();
        let mut links = Vec::with_capacity(config.links.len());
        for (idx, spec) in config.links.iter().enumerate() {
            let dst_router = &mut routers[spec.dst as usize];
            let dst_port = dst_router.inputs.len();
            dst_router.inputs.push(InputPort {
                buffer: VecDeque::new(),
                fed_by: Some(idx as u32),
            });
            let src_router = &mut routers[spec.src as usize];
            let out_idx = src_router.outputs.len();
            src_router.outputs.push(OutputPort {
                target: OutputTarget::Link(idx as u32),
                bandwidth: spec.bandwidth,
                rr: 0,
            });
            src_router.out_by_neighbor.push((spec.dst, out_idx));
            links.push(LinkState {
                dst: spec.dst,
                dst_port,
                latency: spec.latency,
                credits: config.buffer_depth,
                in_flight: VecDeque::new(),
                flits_total: 0,
                last_busy: Cycle::MAX,
                busy_bins: Vec::new(),
            });
        }
        NetworkState {
            cycle_period: config.cycle_period,
            flit_bytes: config.flit_bytes,
            router_latency: config.router_latency,
            buffer_depth: config.buffer_depth,
            max_packet_flits: config.max_packet_flits,
            energy_per_flit_hop: config.energy_per_flit_hop,
            cycles_per_bin: config.time_step * 1000 / config.cycle_period,
            routers,
            links,
            routes: routes.clone(),
            flows: Vec::new(),
            src_queues: (0..n).map(|_| VecDeque::new()).collect(),
            pending: std::collections::BinaryHeap::new(),
            current_cycle: 0,
            flits_active: 0,
            src_flits: 0,
            heap_flits: 0,
            completions: Vec::new(),
            credit_returns: Vec::new(),
            window: (0, Cycle::MAX),
            total_flits_injected: 0,
            total_flits_delivered: 0,
            total_flit_hops: 0,
            hop_bins: vec![Vec::new(); n],
            hops_per_chiplet: vec![0; n],
            record_deliveries: false,
            delivery_log: Vec::new(),
            trace: None,
        }
    }

    pub fn current_cycle(&self) -> Cycle {
        self.current_cycle
    }

    pub fn current_time_ns(&self) -> Nanos {
        self.current_cycle * self.cycle_period
    }

    pub fn cycle_period(&self) -> u64 {
        self.cycle_period
    }

    /// True while any flit is buffered, in flight, queued, or scheduled.
    pub fn has_work(&self) -> bool {
        self.flits_active > 0 || self.src_flits > 0 || self.heap_flits > 0
    }

    pub fn set_measurement_window(&mut self, start: Cycle, end: Cycle) {
        self.window = (start, end);
    }

    pub fn enable_delivery_recording(&mut self) {
        self.record_deliveries = true;
    }

    pub fn enable_trace(&mut self) {
        self.trace = Some(Vec::new());
    }

    pub fn take_trace(&mut self) -> Vec<(Cycle, u32, u32)> {
        self.trace.take().unwrap_or_default()
    }

    pub fn delivery_log(&self) -> &[(Cycle, u32, u64)] {
        &self.delivery_log
    }

    pub fn flow(&self, idx: usize) -> &Flow {
        &self.flows[idx].flow
    }

    pub fn flow_count(&self) -> usize {
        self.flows.len()
    }

    /// Queue flows for injection. Flows are decomposed into packets of at most
    /// `max_packet_flits` flits and enter their source queues in call order.
    pub fn inject_flows(&mut self, flows: Vec<Flow>) -> Result<(), SimError> {
        for flow in flows {
            if flow.src == flow.dst {
                return Err(SimError::LocalFlow { flow: flow.id, chiplet: flow.src });
            }
            if flow.bytes == 0 {
                return Err(SimError::Scheduling(format!("flow {} has zero bytes", flow.id)));
            }
            let inject_cycle = flow.inject_time.div_ceil(self.cycle_period);
            if inject_cycle < self.current_cycle {
                return Err(SimError::Scheduling(format!(
                    "flow {} injected in the past (cycle {inject_cycle} < {})",
                    flow.id, self.current_cycle
                )));
            }
            let total_flits = flow.bytes.div_ceil(self.flit_bytes as u64);
            let route = self.routes.route(flow.src, flow.dst).clone();
            let idx = self.flows.len() as u32;
            let src = flow.src as usize;
            self.flows.push(FlowState {
                flow,
                route,
                total_flits,
                delivered: 0,
                complete_cycle: None,
            });
            self.total_flits_injected += total_flits;
            if inject_cycle <= self.current_cycle {
                self.src_flits += total_flits;
                self.src_queues[src].push_back(SourceEntry {
                    flow: idx,
                    next_seq: 0,
                    total_flits,
                });
            } else {
                self.heap_flits += total_flits;
                self.pending.push(std::cmp::Reverse((inject_cycle, idx)));
            }
        }
        Ok(())
    }

    /// Simulate forward. Stops after the first cycle that completes one or
    /// more flows, or once `current_cycle` reaches `until`, whichever comes
    /// first. `None` runs until the first completion (returning empty only if
    /// the network runs out of work).
    pub fn advance(&mut self, until: Option<Cycle>) -> Vec<FlowCompletion> {
        self.completions.clear();
        loop {
            if let Some(u) = until {
                if self.current_cycle >= u {
                    break;
                }
            }
            if !self.has_work() {
                if let Some(u) = until {
                    // Nothing in the network: jump the clock.
                    self.current_cycle = self.current_cycle.max(u);
                }
                break;
            }
            let worked = self.step();
            if !self.completions.is_empty() {
                break;
            }
            if !worked {
                // Stall: nothing can happen before the next wake point.
                if let Some(wake) = self.next_wake() {
                    debug_assert!(wake >= self.current_cycle, "wake {wake} in the past");
                    let cap = until.unwrap_or(Cycle::MAX);
                    if wake > self.current_cycle {
                        self.current_cycle = wake.min(cap);
                    }
                }
            }
        }
        std::mem::take(&mut self.completions)
    }

    /// Process one cycle; returns whether any state changed.
    fn step(&mut self) -> bool {
        let t = self.current_cycle;
        self.current_cycle = t + 1;
        let mut worked = false;

        // Due injections move from the pending heap into source queues.
        while let Some(&std::cmp::Reverse((cycle, flow))) = self.pending.peek() {
            if cycle > t {
                break;
            }
            self.pending.pop();
            let state = &self.flows[flow as usize];
            self.heap_flits -= state.total_flits;
            self.src_flits += state.total_flits;
            self.src_queues[state.flow.src as usize].push_back(SourceEntry {
                flow,
                next_seq: 0,
                total_flits: state.total_flits,
            });
            worked = true;
        }

        // Link arrivals append to downstream buffers. Credits were consumed at
        // grant time, so space is guaranteed.
        for link_idx in 0..self.links.len() {
            loop {
                let link = &mut self.links[link_idx];
                match link.in_flight.front() {
                    Some(&(arrival, _)) if arrival <= t => {
                        let (_, mut flit) = link.in_flight.pop_front().unwrap();
                        flit.entry = t;
                        let router = &mut self.routers[link.dst as usize];
                        let port = &mut router.inputs[link.dst_port];
                        debug_assert!(port.buffer.len() < self.buffer_depth as usize);
                        port.buffer.push_back(flit);
                        router.occupancy += 1;
                        worked = true;
                    }
                    _ => break,
                }
            }
        }

        // Source queues drain into local input buffers while space remains.
        // Flows sharing a source interleave at packet granularity, which
        // bounds head-of-line blocking behind a large flow to one packet.
        let packet_flits = self.max_packet_flits as u64;
        for src in 0..self.src_queues.len() {
            if self.src_queues[src].is_empty() {
                continue;
            }
            let router = &mut self.routers[src];
            'fill: while router.inputs[0].buffer.len() < self.buffer_depth as usize {
                let Some(entry) = self.src_queues[src].front_mut() else {
                    break;
                };
                // exhausted = 1, packet boundary = 2
                let boundary;
                loop {
                    if router.inputs[0].buffer.len() >= self.buffer_depth as usize {
                        break 'fill;
                    }
                    let flit = Flit {
                        flow: entry.flow,
                        hop: 0,
                        seq: entry.next_seq,
                        entry: t,
                    };
                    entry.next_seq += 1;
                    router.inputs[0].buffer.push_back(flit);
                    router.occupancy += 1;
                    self.src_flits -= 1;
                    self.flits_active += 1;
                    worked = true;
                    if entry.next_seq == entry.total_flits {
                        boundary = 1;
                        break;
                    }
                    if entry.next_seq % packet_flits == 0 {
                        boundary = 2;
                        break;
                    }
                }
                match boundary {
                    1 => {
                        self.src_queues[src].pop_front();
                    }
                    2 => {
                        if self.src_queues[src].len() > 1 {
                            let entry = self.src_queues[src].pop_front().unwrap();
                            self.src_queues[src].push_back(entry);
                        }
                    }
                    _ => {}
                }
            }
        }

        // Switch allocation. Grants consume credits immediately; credits freed
        // by dequeues are returned after every router has been processed, so
        // they become usable next cycle.
        self.credit_returns.clear();
        for r in 0..self.routers.len() {
            if self.routers[r].occupancy == 0 {
                continue;
            }
            for out_idx in 0..self.routers[r].outputs.len() {
                let (target, bandwidth) = {
                    let out = &self.routers[r].outputs[out_idx];
                    (out.target, out.bandwidth)
                };
                let mut link_granted = 0u32;
                for _ in 0..bandwidth {
                    let Some(in_idx) = self.scan_for_grant(r, out_idx, target, t) else {
                        break;
                    };
                    let router = &mut self.routers[r];
                    let flit = router.inputs[in_idx].buffer.pop_front().unwrap();
                    router.occupancy -= 1;
                    router.outputs[out_idx].rr = (in_idx + 1) % router.inputs.len();
                    if let Some(upstream) = router.inputs[in_idx].fed_by {
                        self.credit_returns.push(upstream);
                    }
                    match target {
                        OutputTarget::Local => self.deliver(flit, t),
                        OutputTarget::Link(l) => {
                            let link = &mut self.links[l as usize];
                            link.credits -= 1;
                            let mut moved = flit;
                            moved.hop += 1;
                            link.in_flight.push_back((t + link.latency as u64, moved));
                            link.flits_total += 1;
                            link_granted += 1;
                            if link.last_busy != t {
                                link.last_busy = t;
                                Self::bump_bin_u32(&mut link.busy_bins, t / self.cycles_per_bin);
                            }
                            self.total_flit_hops += 1;
                            self.hops_per_chiplet[r] += 1;
                            Self::bump_bin_u64(&mut self.hop_bins[r], t / self.cycles_per_bin);
                        }
                    }
                    worked = true;
                }
                if link_granted > 0 {
                    if let (OutputTarget::Link(l), Some(trace)) = (target, self.trace.as_mut()) {
                        trace.push((t, l, link_granted));
                    }
                }
            }
        }
        for i in 0..self.credit_returns.len() {
            let l = self.credit_returns[i] as usize;
            self.links[l].credits += 1;
        }

        // A drained network returns to its initial arbitration state.
        if self.flits_active == 0 && self.src_flits == 0 {
            for router in &mut self.routers {
                for out in &mut router.outputs {
                    out.rr = 0;
                }
            }
        }
        worked
    }

    /// One round-robin scan for a grantable head flit. Returns the input port.
    fn scan_for_grant(
        &self,
        r: usize,
        out_idx: usize,
        target: OutputTarget,
        t: Cycle,
    ) -> Option<usize> {
        if let OutputTarget::Link(l) = target {
            if self.links[l as usize].credits == 0 {
                return None;
            }
        }
        let router = &self.routers[r];
        let n_inputs = router.inputs.len();
        let start = router.outputs[out_idx].rr;
        for offset in 0..n_inputs {
            let in_idx = (start + offset) % n_inputs;
            let Some(head) = router.inputs[in_idx].buffer.front() else {
                continue;
            };
            if head.entry + self.router_latency as u64 > t {
                continue;
            }
            let flow = &self.flows[head.flow as usize];
            let wanted = if (head.hop as usize) == flow.route.len() {
                OutputTarget::Local
            } else {
                let next = flow.route[head.hop as usize];
                let port = router
                    .out_by_neighbor
                    .iter()
                    .find(|&&(nbr, _)| nbr == next)
                    .map(|&(_, p)| p)
                    .expect("route uses a declared link");
                router.outputs[port].target
            };
            if wanted == target {
                return Some(in_idx);
            }
        }
        None
    }

    fn deliver(&mut self, flit: Flit, t: Cycle) {
        self.flits_active -= 1;
        self.total_flits_delivered += 1;
        if self.record_deliveries {
            self.delivery_log.push((t, flit.flow, flit.seq));
        }
        let state = &mut self.flows[flit.flow as usize];
        state.delivered += 1;
        debug_assert!(state.delivered <= state.total_flits);
        if state.delivered == state.total_flits {
            state.complete_cycle = Some(t);
            let time_ns = t * self.cycle_period;
            state.flow.complete_time = Some(time_ns);
            self.completions.push(FlowCompletion {
                flow_id: state.flow.id,
                cycle: t,
                time_ns,
            });
        }
    }

    fn bump_bin_u64(bins: &mut Vec<(u64, u64)>, bin: u64) {
        match bins.last_mut() {
            Some(last) if last.0 == bin => last.1 += 1,
            _ => bins.push((bin, 1)),
        }
    }

    fn bump_bin_u32(bins: &mut Vec<(u64, u32)>, bin: u64) {
        match bins.last_mut() {
            Some(last) if last.0 == bin => last.1 += 1,
            _ => bins.push((bin, 1)),
        }
    }

    /// Earliest future cycle at which anything can change state. Heads that
    /// are already switchable but credit-blocked are not wake sources: their
    /// progress hangs off an arrival or a downstream eligibility, both of
    /// which are counted here.
    fn next_wake(&self) -> Option<Cycle> {
        let mut wake = Cycle::MAX;
        if let Some(&std::cmp::Reverse((cycle, _))) = self.pending.peek() {
            wake = wake.min(cycle);
        }
        for link in &self.links {
            if let Some(&(arrival, _)) = link.in_flight.front() {
                wake = wake.min(arrival);
            }
        }
        for router in &self.routers {
            if router.occupancy == 0 {
                continue;
            }
            for port in &router.inputs {
                if let Some(head) = port.buffer.front() {
                    let ready = head.entry + self.router_latency as u64;
                    if ready > self.current_cycle {
                        wake = wake.min(ready);
                    }
                }
            }
        }
        (wake != Cycle::MAX).then_some(wake)
    }

    /// Flit conservation and credit identity; used by tests after any advance.
    pub fn check_invariants(&self) {
        let buffered: u64 = self
            .routers
            .iter()
            .map(|r| r.inputs.iter().map(|p| p.buffer.len() as u64).sum::<u64>())
            .sum();
        let in_flight: u64 = self.links.iter().map(|l| l.in_flight.len() as u64).sum();
        assert_eq!(buffered + in_flight, self.flits_active, "flit conservation");
        assert_eq!(
            self.total_flits_injected,
            self.total_flits_delivered + self.flits_active + self.src_flits + self.heap_flits,
            "injected = delivered + active + queued"
        );
        for link in &self.links {
            let occupied = self.routers[link.dst as usize].inputs[link.dst_port].buffer.len();
            assert_eq!(
                link.credits as u64 + link.in_flight.len() as u64 + occupied as u64,
                self.buffer_depth as u64,
                "credit identity on link to {}",
                link.dst
            );
        }
    }

    // -- statistics ---------------------------------------------------------

    pub fn completed_flows(&self) -> impl Iterator<Item = &Flow> {
        self.flows
            .iter()
            .filter(|f| f.complete_cycle.is_some())
            .map(|f| &f.flow)
    }

    pub fn all_flows(&self) -> impl Iterator<Item = &Flow> {
        self.flows.iter().map(|f| &f.flow)
    }

    /// Per-flow latency comes straight off the flow records; link utilization
    /// is busy cycles over the measurement window.
    pub fn flow_stats(&self, config: &SystemConfig) -> FlowStatsReport {
        let (w_start, w_end) = self.window;
        let span = w_end.saturating_sub(w_start);
        let per_link = self
            .links
            .iter()
            .zip(&config.links)
            .map(|(state, spec)| {
                let busy = self.window_sum_u32(&state.busy_bins, w_start, w_end);
                LinkUtilization {
                    src: spec.src,
                    dst: spec.dst,
                    flits: state.flits_total,
                    utilization: if span == 0 { 0.0 } else { busy as f64 / span as f64 },
                }
            })
            .collect();

        let mut per_source: Vec<SourceAggregate> = (0..self.routers.len())
            .map(|i| SourceAggregate { chiplet: i as ChipletId, ..Default::default() })
            .collect();
        for state in &self.flows {
            let agg = &mut per_source[state.flow.src as usize];
            agg.flows_injected += 1;
            agg.bytes_injected += state.flow.bytes;
            if let Some(done) = state.flow.complete_time {
                agg.flows_completed += 1;
                agg.mean_latency_ns += (done - state.flow.inject_time) as f64;
            }
        }
        for agg in &mut per_source {
            if agg.flows_completed > 0 {
                agg.mean_latency_ns /= agg.flows_completed as f64;
            }
        }
        let completed = self.flows.iter().filter(|f| f.complete_cycle.is_some()).count() as u64;
        FlowStatsReport {
            per_link,
            per_source,
            flows_completed: completed,
            flows_pending: self.flows.len() as u64 - completed,
        }
    }

    fn window_sum_u32(&self, bins: &[(u64, u32)], w_start: Cycle, w_end: Cycle) -> u64 {
        // Bin granularity is coarser than a cycle; include bins whose start
        // cycle falls inside the window.
        bins.iter()
            .filter(|&&(bin, _)| {
                let start = bin * self.cycles_per_bin;
                start >= w_start && start < w_end
            })
            .map(|&(_, c)| c as u64)
            .sum()
    }

    /// Total flit-hop energy and its per-chiplet attribution.
    pub fn network_energy(&self) -> NetworkEnergyReport {
        NetworkEnergyReport {
            total_joules: self.total_flit_hops as f64 * self.energy_per_flit_hop,
            total_flit_hops: self.total_flit_hops,
            per_chiplet_joules: self
                .hops_per_chiplet
                .iter()
                .map(|&h| h as f64 * self.energy_per_flit_hop)
                .collect(),
        }
    }

    /// Per-chiplet hop counts by power bin, for the power trace.
    pub fn hop_bins(&self) -> &[Vec<(u64, u64)>] {
        &self.hop_bins
    }

    pub fn energy_per_flit_hop(&self) -> f64 {
        self.energy_per_flit_hop
    }

    pub fn total_flits(&self) -> (u64, u64) {
        (self.total_flits_injected, self.total_flits_delivered)
    }
}
