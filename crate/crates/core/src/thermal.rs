//! Compact RC thermal model of the package.
//!
//! The package is discretized into a finite-difference RC network: a 2x2 node
//! grid per chiplet in the active layer (capturing intra-chiplet gradients),
//! and configurable coarser grids for the interposer below and the heat
//! spreader above. Lateral conductances couple adjacent nodes within a layer,
//! vertical conductances couple the stack under each chiplet, and the spreader
//! sinks to a single ambient node. Steady state solves `G T = P`; transients
//! step the power-bin grid with backward Euler, which is unconditionally
//! stable for stiff RC networks at microsecond bins.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::config::SystemConfig;
use crate::error::ConfigError;
use crate::power::PowerTrace;
use crate::Nanos;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ThermalLayer {
    Active,
    Interposer,
    Spreader,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThermalNode {
    pub layer: ThermalLayer,
    /// Center position in mm.
    pub position: (f64, f64),
    pub volume_m3: f64,
}

/// Assembled RC network. `conductance` carries the full G matrix including
/// each node's ambient coupling on the diagonal; `ambient_coupling` keeps the
/// ambient terms separate for heat-balance checks.
pub struct ThermalModel {
    pub nodes: Vec<ThermalNode>,
    pub conductance: DMatrix<f64>,
    pub capacitance: DVector<f64>,
    pub ambient_coupling: DVector<f64>,
    pub ambient_kelvin: f64,
    /// Chiplet -> indices of its active-layer nodes.
    pub chiplet_nodes: Vec<Vec<usize>>,
}

/// Node temperatures in kelvin above ambient at one instant.
#[derive(Debug, Clone)]
pub struct ThermalState {
    pub time_ns: Nanos,
    pub temps: DVector<f64>,
}

impl ThermalState {
    pub fn absolute(&self, model: &ThermalModel, node: usize) -> f64 {
        model.ambient_kelvin + self.temps[node]
    }
}

impl ThermalModel {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Physical realizability: symmetric G, non-positive off-diagonals,
    /// diagonally dominant rows.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let n = self.node_count();
        for i in 0..n {
            let mut off = 0.0;
            for j in 0..n {
                if i == j {
                    continue;
                }
                let g = self.conductance[(i, j)];
                if g > 1e-12 {
                    return Err(ConfigError::field(
                        "thermal",
                        format!("positive off-diagonal conductance at ({i},{j})"),
                    ));
                }
                if (g - self.conductance[(j, i)]).abs() > 1e-9 * g.abs().max(1.0) {
                    return Err(ConfigError::field(
                        "thermal",
                        format!("conductance matrix not symmetric at ({i},{j})"),
                    ));
                }
                off += g.abs();
            }
            if self.conductance[(i, i)] + 1e-9 < off {
                return Err(ConfigError::field(
                    "thermal",
                    format!("row {i} not diagonally dominant"),
                ));
            }
            if self.capacitance[i] <= 0.0 {
                return Err(ConfigError::field("thermal", format!("node {i} has no capacitance")));
            }
        }
        if self.ambient_coupling.iter().all(|&g| g <= 0.0) {
            return Err(ConfigError::field("thermal", "no path to ambient"));
        }
        Ok(())
    }

    /// Expand per-chiplet power into the node power vector (even split over
    /// each chiplet's active nodes).
    pub fn node_power(&self, power_per_chiplet: &[f64]) -> DVector<f64> {
        let mut p = DVector::zeros(self.node_count());
        for (chiplet, nodes) in self.chiplet_nodes.iter().enumerate() {
            let share = power_per_chiplet.get(chiplet).copied().unwrap_or(0.0) / nodes.len() as f64;
            for &node in nodes {
                p[node] += share;
            }
        }
        p
    }

    /// Mean temperature above ambient of each chiplet's active nodes.
    pub fn per_chiplet_delta(&self, state: &ThermalState) -> Vec<f64> {
        self.chiplet_nodes
            .iter()
            .map(|nodes| nodes.iter().map(|&n| state.temps[n]).sum::<f64>() / nodes.len() as f64)
            .collect()
    }
}

/// Build the package RC network from the system config.
pub fn build_thermal_model(config: &SystemConfig) -> Result<ThermalModel, ConfigError> {
    let params = &config.thermal;
    let mm = 1e-3;

    // Package bounding box over all chiplet footprints.
    let mut x0 = f64::INFINITY;
    let mut y0 = f64::INFINITY;
    let mut x1 = f64::NEG_INFINITY;
    let mut y1 = f64::NEG_INFINITY;
    for c in &config.chiplets {
        let (x, y, w, h) = c.phys_pos;
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x + w);
        y1 = y1.max(y + h);
    }

    let mut nodes = Vec::new();
    let mut couplings: Vec<(usize, usize, f64)> = Vec::new();
    let mut chiplet_nodes = Vec::with_capacity(config.chiplets.len());

    // Active layer: 2x2 nodes per chiplet, laterally coupled within the die.
    let t_a = params.active.thickness_mm * mm;
    for c in &config.chiplets {
        let (x, y, w, h) = c.phys_pos;
        let base = nodes.len();
        for qy in 0..2 {
            for qx in 0..2 {
                nodes.push(ThermalNode {
                    layer: ThermalLayer::Active,
                    position: (
                        x + w * (0.25 + 0.5 * qx as f64),
                        y + h * (0.25 + 0.5 * qy as f64),
                    ),
                    volume_m3: (w / 2.0 * mm) * (h / 2.0 * mm) * t_a,
                });
            }
        }
        // lateral: pairs (0,1),(2,3) along x and (0,2),(1,3) along y
        let gx = params.active.conductivity * (h / 2.0 * mm) * t_a / (w / 2.0 * mm);
        let gy = params.active.conductivity * (w / 2.0 * mm) * t_a / (h / 2.0 * mm);
        couplings.push((base, base + 1, gx));
        couplings.push((base + 2, base + 3, gx));
        couplings.push((base, base + 2, gy));
        couplings.push((base + 1, base + 3, gy));
        chiplet_nodes.push((base..base + 4).collect::<Vec<_>>());
    }

    // Passive layers: uniform grids over the bounding box.
    let mut grid_layer = |layer: ThermalLayer, grid: u32, material: &crate::config::LayerMaterial| {
        let base = nodes.len();
        let cw = (x1 - x0) / grid as f64;
        let ch = (y1 - y0) / grid as f64;
        let t = material.thickness_mm * mm;
        for gy in 0..grid {
            for gx in 0..grid {
                nodes.push(ThermalNode {
                    layer,
                    position: (
                        x0 + cw * (gx as f64 + 0.5),
                        y0 + ch * (gy as f64 + 0.5),
                    ),
                    volume_m3: (cw * mm) * (ch * mm) * t,
                });
            }
        }
        let g_lat_x = material.conductivity * (ch * mm) * t / (cw * mm);
        let g_lat_y = material.conductivity * (cw * mm) * t / (ch * mm);
        for gy in 0..grid {
            for gx in 0..grid {
                let here = base + (gy * grid + gx) as usize;
                if gx + 1 < grid {
                    couplings.push((here, here + 1, g_lat_x));
                }
                if gy + 1 < grid {
                    couplings.push((here, here + grid as usize, g_lat_y));
                }
            }
        }
        (base, cw, ch)
    };

    let (ibase, icw, ich) = grid_layer(ThermalLayer::Interposer, params.interposer_grid, &params.interposer);
    let (sbase, scw, sch) = grid_layer(ThermalLayer::Spreader, params.spreader_grid, &params.spreader);

    // Vertical couplings: each active node to the passive cell containing its
    // center, with series half-thickness resistances.
    let cell_of = |pos: (f64, f64), base: usize, grid: u32, cw: f64, ch: f64| -> usize {
        let gx = (((pos.0 - x0) / cw) as i64).clamp(0, grid as i64 - 1) as usize;
        let gy = (((pos.1 - y0) / ch) as i64).clamp(0, grid as i64 - 1) as usize;
        base + gy * grid as usize + gx
    };
    for (c, chiplet) in config.chiplets.iter().enumerate() {
        let (_, _, w, h) = chiplet.phys_pos;
        let area = (w / 2.0 * mm) * (h / 2.0 * mm);
        let r_ai = (params.active.thickness_mm * mm / 2.0) / (params.active.conductivity * area)
            + (params.interposer.thickness_mm * mm / 2.0) / (params.interposer.conductivity * area);
        let r_as = (params.active.thickness_mm * mm / 2.0) / (params.active.conductivity * area)
            + (params.spreader.thickness_mm * mm / 2.0) / (params.spreader.conductivity * area);
        for &node in &chiplet_nodes[c] {
            let pos = nodes[node].position;
            let below = cell_of(pos, ibase, params.interposer_grid, icw, ich);
            let above = cell_of(pos, sbase, params.spreader_grid, scw, sch);
            couplings.push((node, below, 1.0 / r_ai));
            couplings.push((node, above, 1.0 / r_as));
        }
    }

    // Ambient sink above the spreader, split by node area (uniform grid).
    let n = nodes.len();
    let spreader_cells = (params.spreader_grid * params.spreader_grid) as usize;
    let mut ambient_coupling = DVector::zeros(n);
    for i in 0..spreader_cells {
        ambient_coupling[sbase + i] = params.ambient_conductance / spreader_cells as f64;
    }

    let mut conductance = DMatrix::zeros(n, n);
    for &(a, b, g) in &couplings {
        conductance[(a, b)] -= g;
        conductance[(b, a)] -= g;
        conductance[(a, a)] += g;
        conductance[(b, b)] += g;
    }
    for i in 0..n {
        conductance[(i, i)] += ambient_coupling[i];
    }

    let mut capacitance = DVector::zeros(n);
    for (i, node) in nodes.iter().enumerate() {
        let material = match node.layer {
            ThermalLayer::Active => &params.active,
            ThermalLayer::Interposer => &params.interposer,
            ThermalLayer::Spreader => &params.spreader,
        };
        capacitance[i] = material.heat_capacity * node.volume_m3;
    }

    let model = ThermalModel {
        nodes,
        conductance,
        capacitance,
        ambient_coupling,
        ambient_kelvin: params.ambient_kelvin,
        chiplet_nodes,
    };
    model.validate()?;
    Ok(model)
}

/// Solve `G T = P` for the steady-state temperature rise.
pub fn steady_state_solve(
    model: &ThermalModel,
    power_per_chiplet: &[f64],
) -> Result<ThermalState, ConfigError> {
    let p = model.node_power(power_per_chiplet);
    let lu = model.conductance.clone().lu();
    let temps = lu
        .solve(&p)
        .ok_or_else(|| ConfigError::field("thermal", "singular conductance matrix (no ambient path)"))?;
    let residual = (&model.conductance * &temps - &p).amax();
    let bound = 1e-9 * p.amax().max(f64::MIN_POSITIVE);
    if residual > bound {
        return Err(ConfigError::field(
            "thermal",
            format!("steady solve residual {residual:e} exceeds {bound:e}"),
        ));
    }
    Ok(ThermalState { time_ns: 0, temps })
}

/// Backward-Euler transient over the power-bin grid: one implicit step per
/// bin, `(C/dt + G) T' = C/dt T + P`. Returns the state at every
/// `output_every`-th bin boundary plus the final one.
pub fn transient_solve(
    model: &ThermalModel,
    trace: &PowerTrace,
    output_every: usize,
) -> Result<Vec<ThermalState>, ConfigError> {
    let n = model.node_count();
    let dt = trace.bin_width_us as f64 * 1e-6;
    let c_over_dt = &model.capacitance / dt;
    let mut system = model.conductance.clone();
    for i in 0..n {
        system[(i, i)] += c_over_dt[i];
    }
    let lu = system.lu();

    let every = output_every.max(1);
    let bins = trace.bin_count();
    let mut temps = DVector::zeros(n);
    let mut states = Vec::with_capacity(bins / every + 1);
    let mut chiplet_power = vec![0.0; trace.chiplet_count()];
    for bin in 0..bins {
        for (c, p) in chiplet_power.iter_mut().enumerate() {
            *p = trace.samples[c][bin];
        }
        let p = model.node_power(&chiplet_power);
        let rhs = temps.component_mul(&c_over_dt) + p;
        temps = lu
            .solve(&rhs)
            .ok_or_else(|| ConfigError::field("thermal", "singular transient system"))?;
        if (bin + 1) % every == 0 || bin + 1 == bins {
            states.push(ThermalState {
                time_ns: (bin as u64 + 1) * trace.bin_width_ns(),
                temps: temps.clone(),
            });
        }
    }
    Ok(states)
}
