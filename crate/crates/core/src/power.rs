//! Microsecond-resolution power traces.
//!
//! Compute events spread their energy uniformly over their duration and
//! integrate pro-rata into overlapping bins; network flit-hop energy lands in
//! the bin containing the hop's cycle. Static power is added to every bin for
//! as long as the chiplet exists. The binning conserves energy: the sum of
//! samples times the bin width equals the sum of attributed event energies.

use std::io::Write;

use crate::error::ConfigError;
use crate::{ChipletId, Nanos};

/// One rectangular energy pulse: `energy_joules` spread over `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyEvent {
    pub chiplet: ChipletId,
    pub start_ns: Nanos,
    pub end_ns: Nanos,
    pub energy_joules: f64,
}

/// Per-chiplet power samples on a uniform bin grid starting at t = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerTrace {
    pub bin_width_us: u64,
    /// samples[chiplet][bin] in watts.
    pub samples: Vec<Vec<f64>>,
}

impl PowerTrace {
    pub fn chiplet_count(&self) -> usize {
        self.samples.len()
    }

    pub fn bin_count(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    pub fn bin_width_ns(&self) -> u64 {
        self.bin_width_us * 1000
    }

    /// Power of one chiplet in one bin (0 outside the trace).
    pub fn power(&self, chiplet: usize, bin: usize) -> f64 {
        self.samples
            .get(chiplet)
            .and_then(|s| s.get(bin))
            .copied()
            .unwrap_or(0.0)
    }

    /// Integral of the whole trace in joules.
    pub fn total_energy_joules(&self) -> f64 {
        let dt = self.bin_width_us as f64 * 1e-6;
        self.samples
            .iter()
            .map(|s| s.iter().sum::<f64>() * dt)
            .sum()
    }

    /// Per-chiplet mean power over the trace.
    pub fn mean_power_per_chiplet(&self) -> Vec<f64> {
        let bins = self.bin_count().max(1) as f64;
        self.samples.iter().map(|s| s.iter().sum::<f64>() / bins).collect()
    }

    pub fn write_csv(&self, mut out: impl Write, header: &str) -> std::io::Result<()> {
        writeln!(out, "{header}")?;
        writeln!(out, "# bin_width_us={}", self.bin_width_us)?;
        writeln!(out, "bin_start_us,chiplet_id,watts")?;
        for bin in 0..self.bin_count() {
            for (chiplet, series) in self.samples.iter().enumerate() {
                writeln!(out, "{},{},{}", bin as u64 * self.bin_width_us, chiplet, series[bin])?;
            }
        }
        Ok(())
    }

    /// Parse the CSV form written by [`PowerTrace::write_csv`].
    pub fn from_csv(text: &str) -> Result<PowerTrace, ConfigError> {
        let mut bin_width_us = None;
        let mut rows: Vec<(u64, usize, f64)> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(value) = rest.trim().strip_prefix("bin_width_us=") {
                    bin_width_us = Some(value.parse().map_err(|_| {
                        ConfigError::field("bin_width_us", "not an integer")
                    })?);
                }
                continue;
            }
            if line.starts_with("bin_start_us") {
                continue;
            }
            let mut parts = line.split(',');
            let (a, b, c) = (parts.next(), parts.next(), parts.next());
            let (Some(a), Some(b), Some(c)) = (a, b, c) else {
                return Err(ConfigError::field("power trace", format!("bad row `{line}`")));
            };
            let start: u64 = a.trim().parse().map_err(|_| ConfigError::field("bin_start_us", "not an integer"))?;
            let chiplet: usize = b.trim().parse().map_err(|_| ConfigError::field("chiplet_id", "not an integer"))?;
            let watts: f64 = c.trim().parse().map_err(|_| ConfigError::field("watts", "not a number"))?;
            rows.push((start, chiplet, watts));
        }
        let bin_width_us =
            bin_width_us.ok_or_else(|| ConfigError::field("power trace", "missing `# bin_width_us=` header"))?;
        if rows.is_empty() {
            return Ok(PowerTrace { bin_width_us, samples: Vec::new() });
        }
        let chiplets = rows.iter().map(|r| r.1).max().unwrap() + 1;
        let bins = rows.iter().map(|r| (r.0 / bin_width_us) as usize).max().unwrap() + 1;
        let mut samples = vec![vec![0.0; bins]; chiplets];
        for (start, chiplet, watts) in rows {
            samples[chiplet][(start / bin_width_us) as usize] = watts;
        }
        Ok(PowerTrace { bin_width_us, samples })
    }
}

/// Bin compute and network energy into a per-chiplet power trace.
///
/// `network_hop_bins` holds per-chiplet `(bin, flit-hops)` pairs as produced
/// by the network simulator; `span_ns` extends the trace (typically to the end
/// of the simulation) so static power covers idle tail time as well.
pub fn bin_power(
    compute_events: &[EnergyEvent],
    network_hop_bins: &[Vec<(u64, u64)>],
    energy_per_flit_hop: f64,
    static_power: &[f64],
    span_ns: Nanos,
    bin_width_us: u64,
) -> PowerTrace {
    let width_ns = bin_width_us * 1000;
    let chiplets = static_power.len();
    let mut last_ns = span_ns;
    for e in compute_events {
        last_ns = last_ns.max(e.end_ns);
    }
    for bins in network_hop_bins {
        if let Some(&(bin, _)) = bins.last() {
            last_ns = last_ns.max((bin + 1) * width_ns);
        }
    }
    let n_bins = (last_ns.div_ceil(width_ns)).max(1) as usize;
    let mut energy = vec![vec![0.0f64; n_bins]; chiplets];

    for e in compute_events {
        debug_assert!(e.end_ns > e.start_ns);
        let duration = (e.end_ns - e.start_ns) as f64;
        let first = (e.start_ns / width_ns) as usize;
        let last = ((e.end_ns - 1) / width_ns) as usize;
        for bin in first..=last {
            let bin_start = bin as u64 * width_ns;
            let bin_end = bin_start + width_ns;
            let overlap = e.end_ns.min(bin_end) - e.start_ns.max(bin_start);
            energy[e.chiplet as usize][bin] += e.energy_joules * overlap as f64 / duration;
        }
    }

    for (chiplet, bins) in network_hop_bins.iter().enumerate() {
        for &(bin, hops) in bins {
            energy[chiplet][bin as usize] += hops as f64 * energy_per_flit_hop;
        }
    }

    let dt = bin_width_us as f64 * 1e-6;
    let mut samples = energy;
    for (chiplet, series) in samples.iter_mut().enumerate() {
        for value in series.iter_mut() {
            *value = *value / dt + static_power[chiplet];
        }
    }
    PowerTrace { bin_width_us, samples }
}
