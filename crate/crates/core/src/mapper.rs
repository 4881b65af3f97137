//! Layer-to-chiplet placement with segmentation and occupancy tracking.
//!
//! A layer that does not fit one chiplet splits into the fewest segments that
//! the free capacities can hold. Candidate chiplets are ranked by hop distance
//! from the previous layer's centroid (nearest-neighbor placement), and a
//! whole model places atomically: either every layer maps or occupancy is
//! untouched.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::SystemConfig;
use crate::error::{ConfigError, SimError};
use crate::routing::RoutingTable;
use crate::workload::{DnnModel, LayerStats};
use crate::ChipletId;

/// One segment of one layer placed on one chiplet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentAssignment {
    pub model_id: u64,
    pub layer_idx: u32,
    pub segment_idx: u32,
    pub chiplet_id: ChipletId,
    /// Share of the layer carried by this segment, in (0, 1].
    pub fraction: f64,
    pub weight_bytes: u64,
    pub macs: u64,
}

/// Returned when a model cannot currently be placed; the model is re-queued.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NotMappable;

/// Per-chiplet memory occupancy plus the set of resident segments.
#[derive(Debug, Clone)]
pub struct OccupancyState {
    used: Vec<u64>,
    capacity: Vec<u64>,
    resident: BTreeMap<(u64, u32, u32), (ChipletId, u64)>,
}

impl OccupancyState {
    pub fn new(config: &SystemConfig) -> Self {
        OccupancyState {
            used: vec![0; config.chiplets.len()],
            capacity: config.chiplets.iter().map(|c| c.mem_capacity).collect(),
            resident: BTreeMap::new(),
        }
    }

    pub fn used_bytes(&self, chiplet: ChipletId) -> u64 {
        self.used[chiplet as usize]
    }

    pub fn free_bytes(&self, chiplet: ChipletId) -> u64 {
        self.capacity[chiplet as usize] - self.used[chiplet as usize]
    }

    /// Free memory of every compute chiplet, id order.
    pub fn free_compute(&self, config: &SystemConfig) -> Vec<(ChipletId, u64)> {
        config
            .compute_chiplets()
            .map(|c| (c.id, self.free_bytes(c.id)))
            .collect()
    }

    /// Commit a full model placement. Capacity was checked during placement;
    /// exceeding it here is an internal error.
    pub fn commit(&mut self, assignments: &[SegmentAssignment]) -> Result<(), SimError> {
        for a in assignments {
            let i = a.chiplet_id as usize;
            if self.used[i] + a.weight_bytes > self.capacity[i] {
                return Err(SimError::Internal(format!(
                    "placement overflows chiplet {}: {} + {} > {}",
                    a.chiplet_id, self.used[i], a.weight_bytes, self.capacity[i]
                )));
            }
        }
        for a in assignments {
            self.used[a.chiplet_id as usize] += a.weight_bytes;
            self.resident.insert(
                (a.model_id, a.layer_idx, a.segment_idx),
                (a.chiplet_id, a.weight_bytes),
            );
        }
        Ok(())
    }

    /// Release a model's segments, restoring occupancy exactly. Releasing a
    /// segment that is not resident signals a coordinator bug.
    pub fn release(&mut self, assignments: &[SegmentAssignment]) -> Result<(), SimError> {
        for a in assignments {
            let key = (a.model_id, a.layer_idx, a.segment_idx);
            match self.resident.remove(&key) {
                Some((chiplet, bytes)) if chiplet == a.chiplet_id && bytes == a.weight_bytes => {
                    self.used[chiplet as usize] -= bytes;
                }
                _ => {
                    return Err(SimError::Internal(format!(
                        "release of non-resident segment (model {}, layer {}, segment {})",
                        a.model_id, a.layer_idx, a.segment_idx
                    )))
                }
            }
        }
        Ok(())
    }

    pub fn resident_segments(&self) -> usize {
        self.resident.len()
    }
}

/// Split one layer's weights over the candidate chiplets.
///
/// `candidates` arrive in the caller's preference order (nearest first) with
/// their free capacities. The split uses the minimal segment count `k` that
/// the capacities allow, selects chiplets greedily in preference order while
/// keeping a k-segment completion feasible, then fills the chosen chiplets
/// largest-capacity-first. Zero-weight layers occupy a single segment on the
/// most-preferred candidate.
pub fn segment_layer(
    stats: &LayerStats,
    candidates: &[(ChipletId, u64)],
) -> Result<Vec<(ChipletId, u64)>, NotMappable> {
    let weight = stats.weight_bytes;
    if weight == 0 {
        let &(chiplet, _) = candidates.first().ok_or(NotMappable)?;
        return Ok(vec![(chiplet, 0)]);
    }
    let usable: Vec<(ChipletId, u64)> = candidates
        .iter()
        .copied()
        .filter(|&(_, free)| free > 0)
        .collect();
    let total: u64 = usable.iter().map(|&(_, f)| f).sum();
    if total < weight {
        return Err(NotMappable);
    }

    // Minimal k: smallest count of largest capacities covering the weight.
    let mut caps: Vec<u64> = usable.iter().map(|&(_, f)| f).collect();
    caps.sort_unstable_by(|a, b| b.cmp(a));
    let mut k = 0usize;
    let mut covered = 0u64;
    while covered < weight {
        covered += caps[k];
        k += 1;
    }

    // Walk candidates in preference order; take one whenever the remaining
    // slots can still be completed from the largest capacities further down.
    let mut chosen: Vec<(ChipletId, u64)> = Vec::with_capacity(k);
    let mut chosen_sum = 0u64;
    for (i, &(chiplet, free)) in usable.iter().enumerate() {
        if chosen.len() == k {
            break;
        }
        let slots_left = k - chosen.len() - 1;
        let mut rest: Vec<u64> = usable[i + 1..].iter().map(|&(_, f)| f).collect();
        rest.sort_unstable_by(|a, b| b.cmp(a));
        let best_completion: u64 = rest.iter().take(slots_left).sum();
        if chosen_sum + free + best_completion >= weight {
            chosen.push((chiplet, free));
            chosen_sum += free;
        }
    }
    debug_assert_eq!(chosen.len(), k);
    debug_assert!(chosen_sum >= weight);

    // Fill largest-capacity-first within the chosen set; preference order
    // breaks capacity ties.
    let mut fill_order: Vec<usize> = (0..chosen.len()).collect();
    fill_order.sort_by(|&a, &b| chosen[b].1.cmp(&chosen[a].1).then(a.cmp(&b)));
    let mut split = vec![0u64; chosen.len()];
    let mut remaining = weight;
    for &i in &fill_order {
        let take = remaining.min(chosen[i].1);
        split[i] = take;
        remaining -= take;
    }
    debug_assert_eq!(remaining, 0);
    Ok(chosen
        .iter()
        .zip(split)
        .map(|(&(chiplet, _), bytes)| (chiplet, bytes))
        .collect())
}

/// Replaceable placement policy, selected by name in the config.
pub trait MappingStrategy {
    fn name(&self) -> &'static str;

    /// Place every layer of `model` or leave occupancy semantics unchanged
    /// (the returned assignments are committed by the caller).
    fn place_model(
        &self,
        model: &DnnModel,
        stats: &[LayerStats],
        occupancy: &OccupancyState,
        config: &SystemConfig,
        routes: &RoutingTable,
    ) -> Result<Vec<Vec<SegmentAssignment>>, NotMappable>;
}

pub fn strategy_by_name(name: &str) -> Result<Box<dyn MappingStrategy>, ConfigError> {
    match name {
        "nearest-neighbor" => Ok(Box::new(NearestNeighbor)),
        other => Err(ConfigError::UnknownStrategy(other.to_string())),
    }
}

/// Nearest-neighbor placement: layer 0 spreads from the chiplet with the most
/// free memory; each subsequent layer ranks candidates by hop distance from
/// the centroid of the previous layer's chiplets.
pub struct NearestNeighbor;

impl NearestNeighbor {
    /// Grid centroid of the previous layer's segments, rounded to the nearest
    /// grid point, then resolved to the closest actual chiplet.
    fn reference_chiplet(
        prev: &[SegmentAssignment],
        config: &SystemConfig,
    ) -> ChipletId {
        let n = prev.len() as f64;
        let (sum_c, sum_r) = prev.iter().fold((0.0, 0.0), |(c, r), a| {
            let g = config.chiplet(a.chiplet_id).grid_pos;
            (c + g.0 as f64, r + g.1 as f64)
        });
        let target = ((sum_c / n).round() as u32, (sum_r / n).round() as u32);
        config
            .chiplets
            .iter()
            .min_by_key(|c| {
                let d = c.grid_pos.0.abs_diff(target.0) + c.grid_pos.1.abs_diff(target.1);
                (d, c.id)
            })
            .unwrap()
            .id
    }
}

impl MappingStrategy for NearestNeighbor {
    fn name(&self) -> &'static str {
        "nearest-neighbor"
    }

    fn place_model(
        &self,
        model: &DnnModel,
        stats: &[LayerStats],
        occupancy: &OccupancyState,
        config: &SystemConfig,
        routes: &RoutingTable,
    ) -> Result<Vec<Vec<SegmentAssignment>>, NotMappable> {
        // Working copy of free capacities so the whole placement is atomic.
        let mut free: Vec<(ChipletId, u64)> = occupancy.free_compute(config);
        if free.is_empty() {
            return Err(NotMappable);
        }
        let mut placed: Vec<Vec<SegmentAssignment>> = Vec::with_capacity(model.layers.len());

        for (layer_idx, layer_stats) in stats.iter().enumerate() {
            let reference = match placed.last() {
                None => {
                    // Seed: most free memory, ties by lowest id.
                    free.iter()
                        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
                        .unwrap()
                        .0
                }
                Some(prev) => Self::reference_chiplet(prev, config),
            };
            let mut candidates = free.clone();
            candidates.sort_by_key(|&(id, _)| (routes.hops(reference, id), id));

            let split = segment_layer(layer_stats, &candidates)?;
            let layer_weight: u64 = layer_stats.weight_bytes;
            let mut assignments = Vec::with_capacity(split.len());
            let mut cum_bytes = 0u64;
            let mut cum_macs = 0u64;
            for (segment_idx, &(chiplet, bytes)) in split.iter().enumerate() {
                // Integer MAC split proportional to bytes via prefix rounding,
                // so segment MACs sum exactly to the layer total.
                let macs = if layer_weight == 0 {
                    layer_stats.macs
                } else {
                    let prefix = (layer_stats.macs as u128 * (cum_bytes + bytes) as u128
                        / layer_weight as u128) as u64;
                    let m = prefix - cum_macs;
                    cum_macs = prefix;
                    m
                };
                cum_bytes += bytes;
                let fraction = if layer_weight == 0 {
                    1.0
                } else {
                    bytes as f64 / layer_weight as f64
                };
                assignments.push(SegmentAssignment {
                    model_id: model.id,
                    layer_idx: layer_idx as u32,
                    segment_idx: segment_idx as u32,
                    chiplet_id: chiplet,
                    fraction,
                    weight_bytes: bytes,
                    macs,
                });
                let slot = free.iter_mut().find(|(id, _)| *id == chiplet).unwrap();
                slot.1 -= bytes;
            }
            placed.push(assignments);
        }
        Ok(placed)
    }
}
