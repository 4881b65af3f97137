//! System description: chiplets, NoI topology, link parameters, timing and
//! power constants, thermal package properties.
//!
//! Configs load from a JSON document with sections
//! `{chiplets | mesh, links | link_template, timing, power, thermal}`.
//! Field names inside each section match the type definitions verbatim.
//! A loaded [`SystemConfig`] is immutable and fully validated: ids are dense,
//! footprints do not overlap, every chiplet pair is reachable, and the routing
//! derived from the topology is deadlock-free.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::routing;
use crate::ChipletId;

/// One chiplet: position, compute capability, memory, and power constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChipletSpec {
    pub id: ChipletId,
    pub type_tag: String,
    /// (col, row) on the logical grid.
    pub grid_pos: (u32, u32),
    /// (x_mm, y_mm, width_mm, height_mm) physical footprint.
    pub phys_pos: (f64, f64, f64, f64),
    /// Weight storage capacity in bytes.
    pub mem_capacity: u64,
    /// Sustained MACs per second.
    pub throughput: f64,
    /// Joules per MAC.
    pub energy_per_mac: f64,
    /// Watts drawn independent of activity.
    pub static_power: f64,
    /// I/O chiplets host weights but run no compute.
    #[serde(default)]
    pub io_role: bool,
}

impl ChipletSpec {
    pub fn is_compute(&self) -> bool {
        !self.io_role
    }
}

/// A directed link. Declare the reverse direction separately; the two may
/// carry different bandwidths (asymmetric read/write fabrics).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkSpec {
    pub src: ChipletId,
    pub dst: ChipletId,
    /// Flits accepted per cycle.
    pub bandwidth: u32,
    /// Traversal latency in cycles.
    pub latency: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyKind {
    Mesh,
    Custom,
}

/// Material properties of one package layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerMaterial {
    pub thickness_mm: f64,
    /// W / (m K)
    pub conductivity: f64,
    /// J / (m^3 K)
    pub heat_capacity: f64,
}

/// Thermal package description. Shipped defaults are representative
/// (silicon dies and interposer under a copper spreader), not measured values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalParams {
    pub active: LayerMaterial,
    pub interposer: LayerMaterial,
    pub spreader: LayerMaterial,
    /// Passive-layer grid resolution (nodes per side).
    pub interposer_grid: u32,
    pub spreader_grid: u32,
    /// Total spreader-to-ambient conductance in W/K, split across nodes by area.
    pub ambient_conductance: f64,
    pub ambient_kelvin: f64,
}

impl Default for ThermalParams {
    fn default() -> Self {
        ThermalParams {
            active: LayerMaterial {
                thickness_mm: 0.3,
                conductivity: 120.0,
                heat_capacity: 1.65e6,
            },
            interposer: LayerMaterial {
                thickness_mm: 0.5,
                conductivity: 120.0,
                heat_capacity: 1.65e6,
            },
            spreader: LayerMaterial {
                thickness_mm: 2.0,
                conductivity: 400.0,
                heat_capacity: 3.45e6,
            },
            interposer_grid: 10,
            spreader_grid: 10,
            ambient_conductance: 2.0,
            ambient_kelvin: 318.0,
        }
    }
}

/// Fully validated system description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub chiplets: Vec<ChipletSpec>,
    pub links: Vec<LinkSpec>,
    pub topology_kind: TopologyKind,
    /// Nanoseconds per network cycle.
    pub cycle_period: u64,
    pub flit_bytes: u32,
    /// Cycles a flit spends in an input buffer before it may be switched.
    pub router_latency: u32,
    /// Input buffer capacity in flits.
    pub buffer_depth: u32,
    /// Flows are packetized into packets of at most this many flits.
    pub max_packet_flits: u32,
    pub energy_per_flit_hop: f64,
    /// Power bin width in microseconds.
    pub time_step: u64,
    /// Microseconds excluded from statistics at the start of the run.
    pub warmup: u64,
    /// Microseconds excluded from statistics at the end of the run.
    pub cooldown: u64,
    pub thermal: ThermalParams,
    /// Mapping strategy selected by name.
    pub mapping: String,
}

impl SystemConfig {
    pub fn chiplet_count(&self) -> usize {
        self.chiplets.len()
    }

    pub fn chiplet(&self, id: ChipletId) -> &ChipletSpec {
        &self.chiplets[id as usize]
    }

    pub fn compute_chiplets(&self) -> impl Iterator<Item = &ChipletSpec> {
        self.chiplets.iter().filter(|c| c.is_compute())
    }

    pub fn io_chiplets(&self) -> impl Iterator<Item = &ChipletSpec> {
        self.chiplets.iter().filter(|c| c.io_role)
    }

    /// Total weight capacity of compute chiplets.
    pub fn total_compute_capacity(&self) -> u64 {
        self.compute_chiplets().map(|c| c.mem_capacity).sum()
    }

    /// Canonical JSON form. `load_config(serialize(c)) == c` for every valid config.
    pub fn serialize(&self) -> String {
        serde_json::to_string_pretty(&ConfigDoc::from_config(self))
            .expect("config serialization cannot fail")
    }

    /// SHA-256 of the canonical serialized form, hex encoded.
    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        hasher.update(self.serialize().as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

// ---------------------------------------------------------------------------
// JSON document schema
// ---------------------------------------------------------------------------

fn default_cycle_period() -> u64 {
    1
}
fn default_flit_bytes() -> u32 {
    16
}
fn default_router_latency() -> u32 {
    2
}
fn default_buffer_depth() -> u32 {
    8
}
fn default_max_packet_flits() -> u32 {
    16
}
fn default_time_step() -> u64 {
    1
}
fn default_window() -> u64 {
    1000
}
fn default_mapping() -> String {
    "nearest-neighbor".to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TimingSection {
    #[serde(default = "default_cycle_period")]
    cycle_period: u64,
    #[serde(default = "default_flit_bytes")]
    flit_bytes: u32,
    #[serde(default = "default_router_latency")]
    router_latency: u32,
    #[serde(default = "default_buffer_depth")]
    buffer_depth: u32,
    #[serde(default = "default_max_packet_flits")]
    max_packet_flits: u32,
    #[serde(default = "default_time_step")]
    time_step: u64,
    #[serde(default = "default_window")]
    warmup: u64,
    #[serde(default = "default_window")]
    cooldown: u64,
}

impl Default for TimingSection {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

fn default_energy_per_flit_hop() -> f64 {
    2.0e-10
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PowerSection {
    #[serde(default = "default_energy_per_flit_hop")]
    energy_per_flit_hop: f64,
}

impl Default for PowerSection {
    fn default() -> Self {
        PowerSection {
            energy_per_flit_hop: default_energy_per_flit_hop(),
        }
    }
}

/// Per-chiplet template used by the mesh shorthand. All generated chiplets
/// share these parameters; two templates lay out as a checkerboard.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChipletTemplate {
    pub type_tag: String,
    pub mem_capacity: u64,
    pub throughput: f64,
    pub energy_per_mac: f64,
    pub static_power: f64,
    #[serde(default = "default_die_mm")]
    pub width_mm: f64,
    #[serde(default = "default_die_mm")]
    pub height_mm: f64,
}

fn default_die_mm() -> f64 {
    4.0
}

fn default_pitch() -> (f64, f64) {
    (5.0, 5.0)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshShorthand {
    pub width: u32,
    pub height: u32,
    /// One template for a homogeneous mesh; two for an alternating
    /// (checkerboard) composition where each chiplet is neighbored by
    /// chiplets of the other type.
    pub templates: Vec<ChipletTemplate>,
    #[serde(default = "default_pitch")]
    pub pitch_mm: (f64, f64),
    /// Designate the four corner chiplets as I/O chiplets.
    #[serde(default)]
    pub io_corners: bool,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LinkTemplate {
    pub bandwidth: u32,
    pub latency: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ConfigDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    chiplets: Option<Vec<ChipletSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mesh: Option<MeshShorthand>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    links: Option<Vec<LinkSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    link_template: Option<LinkTemplate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    topology_kind: Option<TopologyKind>,
    #[serde(default)]
    timing: TimingSection,
    #[serde(default)]
    power: PowerSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    thermal: Option<ThermalParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mapping: Option<String>,
}

impl ConfigDoc {
    fn from_config(config: &SystemConfig) -> ConfigDoc {
        ConfigDoc {
            chiplets: Some(config.chiplets.clone()),
            mesh: None,
            links: Some(config.links.clone()),
            link_template: None,
            topology_kind: Some(config.topology_kind),
            timing: TimingSection {
                cycle_period: config.cycle_period,
                flit_bytes: config.flit_bytes,
                router_latency: config.router_latency,
                buffer_depth: config.buffer_depth,
                max_packet_flits: config.max_packet_flits,
                time_step: config.time_step,
                warmup: config.warmup,
                cooldown: config.cooldown,
            },
            power: PowerSection {
                energy_per_flit_hop: config.energy_per_flit_hop,
            },
            thermal: Some(config.thermal.clone()),
            mapping: Some(config.mapping.clone()),
        }
    }
}

// ---------------------------------------------------------------------------
// Mesh construction
// ---------------------------------------------------------------------------

/// Expand a mesh shorthand into chiplets and bidirectional 4-neighbor links.
/// A `width x height` mesh yields `width*height` chiplets and
/// `2 * (2*width*height - width - height)` directed links.
pub fn build_mesh(
    mesh: &MeshShorthand,
    link_template: &LinkTemplate,
) -> Result<(Vec<ChipletSpec>, Vec<LinkSpec>), ConfigError> {
    if mesh.width < 1 || mesh.height < 1 {
        return Err(ConfigError::field("mesh.width/height", "must be >= 1"));
    }
    match mesh.templates.len() {
        1 | 2 => {}
        n => {
            return Err(ConfigError::field(
                "mesh.templates",
                format!("expected 1 (homogeneous) or 2 (checkerboard) templates, got {n}"),
            ))
        }
    }
    let (px, py) = mesh.pitch_mm;
    let mut chiplets = Vec::with_capacity((mesh.width * mesh.height) as usize);
    for row in 0..mesh.height {
        for col in 0..mesh.width {
            let id = row * mesh.width + col;
            let tpl = &mesh.templates[((col + row) as usize) % mesh.templates.len()];
            let corner = (col == 0 || col == mesh.width - 1) && (row == 0 || row == mesh.height - 1);
            chiplets.push(ChipletSpec {
                id,
                type_tag: tpl.type_tag.clone(),
                grid_pos: (col, row),
                phys_pos: (col as f64 * px, row as f64 * py, tpl.width_mm, tpl.height_mm),
                mem_capacity: tpl.mem_capacity,
                throughput: tpl.throughput,
                energy_per_mac: tpl.energy_per_mac,
                static_power: tpl.static_power,
                io_role: mesh.io_corners && corner,
            });
        }
    }
    let mut links = Vec::new();
    let idx = |col: u32, row: u32| row * mesh.width + col;
    for row in 0..mesh.height {
        for col in 0..mesh.width {
            if col + 1 < mesh.width {
                links.push(LinkSpec {
                    src: idx(col, row),
                    dst: idx(col + 1, row),
                    bandwidth: link_template.bandwidth,
                    latency: link_template.latency,
                });
                links.push(LinkSpec {
                    src: idx(col + 1, row),
                    dst: idx(col, row),
                    bandwidth: link_template.bandwidth,
                    latency: link_template.latency,
                });
            }
            if row + 1 < mesh.height {
                links.push(LinkSpec {
                    src: idx(col, row),
                    dst: idx(col, row + 1),
                    bandwidth: link_template.bandwidth,
                    latency: link_template.latency,
                });
                links.push(LinkSpec {
                    src: idx(col, row + 1),
                    dst: idx(col, row),
                    bandwidth: link_template.bandwidth,
                    latency: link_template.latency,
                });
            }
        }
    }
    Ok((chiplets, links))
}

// ---------------------------------------------------------------------------
// Loading and validation
// ---------------------------------------------------------------------------

/// Parse and validate a config document.
pub fn load_config(text: &str) -> Result<SystemConfig, ConfigError> {
    let doc: ConfigDoc = serde_json::from_str(text)?;

    let (chiplets, links, inferred_kind) = match (&doc.chiplets, &doc.mesh) {
        (Some(_), Some(_)) => {
            return Err(ConfigError::field(
                "chiplets/mesh",
                "give either an explicit chiplet list or a mesh shorthand, not both",
            ))
        }
        (None, None) => {
            return Err(ConfigError::field(
                "chiplets",
                "config must contain `chiplets` or `mesh`",
            ))
        }
        (Some(chiplets), None) => {
            let links = match (&doc.links, &doc.link_template) {
                (Some(links), None) => links.clone(),
                _ => {
                    return Err(ConfigError::field(
                        "links",
                        "explicit chiplet lists require an explicit `links` list",
                    ))
                }
            };
            (chiplets.clone(), links, TopologyKind::Custom)
        }
        (None, Some(mesh)) => {
            let tpl = doc.link_template.ok_or_else(|| {
                ConfigError::field("link_template", "mesh shorthand requires a `link_template`")
            })?;
            if doc.links.is_some() {
                return Err(ConfigError::field(
                    "links",
                    "mesh shorthand does not accept an explicit `links` list",
                ));
            }
            let (chiplets, links) = build_mesh(mesh, &tpl)?;
            (chiplets, links, TopologyKind::Mesh)
        }
    };

    let topology_kind = doc.topology_kind.unwrap_or(inferred_kind);

    let timing = doc.timing;
    if timing.cycle_period < 1 {
        return Err(ConfigError::field("timing.cycle_period", "must be >= 1 ns"));
    }
    if timing.flit_bytes < 1 {
        return Err(ConfigError::field("timing.flit_bytes", "must be >= 1"));
    }
    if timing.router_latency < 1 {
        return Err(ConfigError::field("timing.router_latency", "must be >= 1 cycle"));
    }
    if timing.buffer_depth < 1 {
        return Err(ConfigError::field("timing.buffer_depth", "must be >= 1 flit"));
    }
    if timing.max_packet_flits < 1 {
        return Err(ConfigError::field("timing.max_packet_flits", "must be >= 1"));
    }
    if timing.time_step < 1 {
        return Err(ConfigError::field("timing.time_step", "must be >= 1 us"));
    }
    if timing.time_step * 1000 % timing.cycle_period != 0 {
        return Err(ConfigError::field(
            "timing.time_step",
            "power bin width must be a whole number of network cycles",
        ));
    }

    let thermal = doc.thermal.unwrap_or_default();
    if thermal.ambient_conductance <= 0.0 {
        return Err(ConfigError::field(
            "thermal.ambient_conductance",
            "must be positive",
        ));
    }
    for (name, m) in [
        ("thermal.active", &thermal.active),
        ("thermal.interposer", &thermal.interposer),
        ("thermal.spreader", &thermal.spreader),
    ] {
        if m.thickness_mm <= 0.0 || m.conductivity <= 0.0 || m.heat_capacity <= 0.0 {
            return Err(ConfigError::field(
                name,
                "thickness, conductivity and heat capacity must be positive",
            ));
        }
    }
    if thermal.interposer_grid < 1 || thermal.spreader_grid < 1 {
        return Err(ConfigError::field(
            "thermal.interposer_grid/spreader_grid",
            "must be >= 1",
        ));
    }

    let config = SystemConfig {
        chiplets,
        links,
        topology_kind,
        cycle_period: timing.cycle_period,
        flit_bytes: timing.flit_bytes,
        router_latency: timing.router_latency,
        buffer_depth: timing.buffer_depth,
        max_packet_flits: timing.max_packet_flits,
        energy_per_flit_hop: doc.power.energy_per_flit_hop,
        time_step: timing.time_step,
        warmup: timing.warmup,
        cooldown: timing.cooldown,
        thermal,
        mapping: doc.mapping.unwrap_or_else(default_mapping),
    };
    validate(&config)?;
    Ok(config)
}

pub fn load_config_file(path: &Path) -> Result<SystemConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_config(&text)
}

fn validate(config: &SystemConfig) -> Result<(), ConfigError> {
    let n = config.chiplets.len();
    if n == 0 {
        return Err(ConfigError::field("chiplets", "at least one chiplet required"));
    }

    // Dense, unique ids; the rest of the simulator indexes by id directly.
    let mut seen = vec![false; n];
    for c in &config.chiplets {
        let i = c.id as usize;
        if i >= n || seen[i] {
            return Err(ConfigError::field(
                format!("chiplets[{}].id", c.id),
                format!("ids must be unique and form 0..{n}"),
            ));
        }
        seen[i] = true;
    }
    if config.chiplets.iter().enumerate().any(|(i, c)| c.id as usize != i) {
        return Err(ConfigError::field(
            "chiplets",
            "chiplet list must be sorted by id",
        ));
    }

    for c in &config.chiplets {
        if c.mem_capacity == 0 {
            return Err(ConfigError::field(
                format!("chiplets[{}].mem_capacity", c.id),
                "must be positive",
            ));
        }
        if c.is_compute() && c.throughput <= 0.0 {
            return Err(ConfigError::field(
                format!("chiplets[{}].throughput", c.id),
                "must be positive for compute chiplets",
            ));
        }
        if c.energy_per_mac < 0.0 {
            return Err(ConfigError::field(
                format!("chiplets[{}].energy_per_mac", c.id),
                "must be non-negative",
            ));
        }
        if c.static_power < 0.0 {
            return Err(ConfigError::field(
                format!("chiplets[{}].static_power", c.id),
                "must be non-negative",
            ));
        }
        let (_, _, w, h) = c.phys_pos;
        if w <= 0.0 || h <= 0.0 {
            return Err(ConfigError::field(
                format!("chiplets[{}].phys_pos", c.id),
                "width and height must be positive",
            ));
        }
    }

    // Footprint overlap: strict interior intersection is an error.
    for a in &config.chiplets {
        for b in &config.chiplets {
            if a.id >= b.id {
                continue;
            }
            let (ax, ay, aw, ah) = a.phys_pos;
            let (bx, by, bw, bh) = b.phys_pos;
            if ax < bx + bw && bx < ax + aw && ay < by + bh && by < ay + ah {
                return Err(ConfigError::OverlappingFootprints { a: a.id, b: b.id });
            }
        }
    }

    let mut pair_seen = std::collections::HashSet::new();
    for (i, l) in config.links.iter().enumerate() {
        if l.src as usize >= n || l.dst as usize >= n {
            return Err(ConfigError::field(
                format!("links[{i}]"),
                "src/dst must reference existing chiplet ids",
            ));
        }
        if l.src == l.dst {
            return Err(ConfigError::field(format!("links[{i}]"), "self-links are not allowed"));
        }
        if !pair_seen.insert((l.src, l.dst)) {
            return Err(ConfigError::field(
                format!("links[{i}]"),
                format!("duplicate link {} -> {}", l.src, l.dst),
            ));
        }
        if l.bandwidth < 1 {
            return Err(ConfigError::field(
                format!("links[{i}].bandwidth"),
                "must be >= 1 flit/cycle",
            ));
        }
        if l.latency < 1 {
            return Err(ConfigError::field(
                format!("links[{i}].latency"),
                "must be >= 1 cycle",
            ));
        }
    }

    if n > 1 {
        check_strong_connectivity(config)?;
    }

    if config.topology_kind == TopologyKind::Mesh {
        check_mesh_shape(config)?;
    }

    // Routing must exist and be deadlock-free before the config is accepted.
    let routes = routing::compute_routes(config);
    routing::check_channel_dependencies(config, &routes)?;

    Ok(())
}

fn check_strong_connectivity(config: &SystemConfig) -> Result<(), ConfigError> {
    let n = config.chiplets.len();
    let mut fwd = vec![Vec::new(); n];
    let mut rev = vec![Vec::new(); n];
    for l in &config.links {
        fwd[l.src as usize].push(l.dst as usize);
        rev[l.dst as usize].push(l.src as usize);
    }
    for (adj, flipped) in [(&fwd, false), (&rev, true)] {
        let mut visited = vec![false; n];
        let mut stack = vec![0usize];
        visited[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !visited[v] {
                    visited[v] = true;
                    stack.push(v);
                }
            }
        }
        if let Some(unreached) = visited.iter().position(|v| !v) {
            let (from, to) = if flipped { (unreached, 0) } else { (0, unreached) };
            return Err(ConfigError::Disconnected {
                from: from as u32,
                to: to as u32,
            });
        }
    }
    Ok(())
}

/// A mesh-kind config must be a complete grid with exactly the 4-neighbor
/// link set, otherwise dimension-order routing is not well defined.
fn check_mesh_shape(config: &SystemConfig) -> Result<(), ConfigError> {
    let n = config.chiplets.len();
    let width = config.chiplets.iter().map(|c| c.grid_pos.0).max().unwrap() + 1;
    let height = config.chiplets.iter().map(|c| c.grid_pos.1).max().unwrap() + 1;
    if (width * height) as usize != n {
        return Err(ConfigError::field(
            "topology_kind",
            "mesh requires a complete width x height grid of chiplets",
        ));
    }
    let mut grid = vec![None; n];
    for c in &config.chiplets {
        let slot = (c.grid_pos.1 * width + c.grid_pos.0) as usize;
        if grid[slot].replace(c.id).is_some() {
            return Err(ConfigError::field(
                format!("chiplets[{}].grid_pos", c.id),
                "duplicate grid position in mesh",
            ));
        }
    }
    let expected = 2 * (2 * width * height - width - height) as usize;
    if config.links.len() != expected {
        return Err(ConfigError::field(
            "links",
            format!("mesh topology expects exactly {expected} directed 4-neighbor links"),
        ));
    }
    for l in &config.links {
        let a = config.chiplet(l.src).grid_pos;
        let b = config.chiplet(l.dst).grid_pos;
        let manhattan = a.0.abs_diff(b.0) + a.1.abs_diff(b.1);
        if manhattan != 1 {
            return Err(ConfigError::field(
                "links",
                format!("mesh link {} -> {} is not a grid neighbor pair", l.src, l.dst),
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn mesh_doc(width: u32, height: u32) -> String {
        format!(
            r#"{{
                "mesh": {{
                    "width": {width},
                    "height": {height},
                    "templates": [{{
                        "type_tag": "imc-a",
                        "mem_capacity": 4194304,
                        "throughput": 2.0e13,
                        "energy_per_mac": 8.0e-13,
                        "static_power": 0.05
                    }}]
                }},
                "link_template": {{ "bandwidth": 1, "latency": 1 }},
                "timing": {{ "warmup": 0, "cooldown": 0 }}
            }}"#
        )
    }

    #[test]
    fn mesh_10x10_has_100_chiplets_and_360_links() {
        let config = load_config(&mesh_doc(10, 10)).unwrap();
        assert_eq!(config.chiplets.len(), 100);
        assert_eq!(config.links.len(), 360);
        assert_eq!(config.topology_kind, TopologyKind::Mesh);
    }

    #[test]
    fn degenerate_1x1_mesh() {
        let config = load_config(&mesh_doc(1, 1)).unwrap();
        assert_eq!(config.chiplets.len(), 1);
        assert!(config.links.is_empty());
    }

    #[test]
    fn mesh_2x2_has_8_directed_links() {
        let config = load_config(&mesh_doc(2, 2)).unwrap();
        assert_eq!(config.chiplets.len(), 4);
        assert_eq!(config.links.len(), 8);
    }

    #[test]
    fn alternating_types_split_evenly() {
        let doc = r#"{
            "mesh": {
                "width": 10, "height": 10,
                "templates": [
                    {"type_tag": "imc-a", "mem_capacity": 4194304, "throughput": 2.0e13,
                     "energy_per_mac": 8.0e-13, "static_power": 0.05},
                    {"type_tag": "imc-b", "mem_capacity": 8388608, "throughput": 5.0e12,
                     "energy_per_mac": 4.0e-13, "static_power": 0.08}
                ]
            },
            "link_template": { "bandwidth": 1, "latency": 1 }
        }"#;
        let config = load_config(doc).unwrap();
        let a = config.chiplets.iter().filter(|c| c.type_tag == "imc-a").count();
        let b = config.chiplets.iter().filter(|c| c.type_tag == "imc-b").count();
        assert_eq!((a, b), (50, 50));
        // checkerboard: every 4-neighbor pair mixes types
        for l in &config.links {
            assert_ne!(
                config.chiplet(l.src).type_tag,
                config.chiplet(l.dst).type_tag
            );
        }
    }

    #[test]
    fn unreachable_island_rejected() {
        let doc = r#"{
            "chiplets": [
                {"id": 0, "type_tag": "a", "grid_pos": [0,0], "phys_pos": [0,0,4,4],
                 "mem_capacity": 1000, "throughput": 1e9, "energy_per_mac": 1e-12, "static_power": 0.0},
                {"id": 1, "type_tag": "a", "grid_pos": [1,0], "phys_pos": [5,0,4,4],
                 "mem_capacity": 1000, "throughput": 1e9, "energy_per_mac": 1e-12, "static_power": 0.0},
                {"id": 2, "type_tag": "a", "grid_pos": [2,0], "phys_pos": [10,0,4,4],
                 "mem_capacity": 1000, "throughput": 1e9, "energy_per_mac": 1e-12, "static_power": 0.0}
            ],
            "links": [
                {"src": 0, "dst": 1, "bandwidth": 1, "latency": 1},
                {"src": 1, "dst": 0, "bandwidth": 1, "latency": 1}
            ]
        }"#;
        match load_config(doc) {
            Err(ConfigError::Disconnected { .. }) => {}
            other => panic!("expected Disconnected, got {other:?}"),
        }
    }

    #[test]
    fn overlapping_footprints_rejected() {
        let doc = r#"{
            "chiplets": [
                {"id": 0, "type_tag": "a", "grid_pos": [0,0], "phys_pos": [0,0,4,4],
                 "mem_capacity": 1000, "throughput": 1e9, "energy_per_mac": 1e-12, "static_power": 0.0},
                {"id": 1, "type_tag": "a", "grid_pos": [1,0], "phys_pos": [2,2,4,4],
                 "mem_capacity": 1000, "throughput": 1e9, "energy_per_mac": 1e-12, "static_power": 0.0}
            ],
            "links": [
                {"src": 0, "dst": 1, "bandwidth": 1, "latency": 1},
                {"src": 1, "dst": 0, "bandwidth": 1, "latency": 1}
            ]
        }"#;
        match load_config(doc) {
            Err(ConfigError::OverlappingFootprints { a: 0, b: 1 }) => {}
            other => panic!("expected footprint overlap, got {other:?}"),
        }
    }

    #[test]
    fn nonpositive_parameter_names_field() {
        let doc = mesh_doc(2, 2).replace("\"throughput\": 2.0e13", "\"throughput\": 0.0");
        let err = load_config(&doc).unwrap_err();
        assert!(err.to_string().contains("throughput"), "{err}");
    }

    #[test]
    fn serialize_roundtrip_is_identity() {
        let config = load_config(&mesh_doc(3, 2)).unwrap();
        let reloaded = load_config(&config.serialize()).unwrap();
        assert_eq!(config, reloaded);
        assert_eq!(config.content_hash(), reloaded.content_hash());
    }

    #[test]
    fn io_corners_marked() {
        let doc = mesh_doc(4, 4).replace("\"templates\"", "\"io_corners\": true, \"templates\"");
        let config = load_config(&doc).unwrap();
        let io: Vec<u32> = config.io_chiplets().map(|c| c.id).collect();
        assert_eq!(io, vec![0, 3, 12, 15]);
    }
}
