//! Joint MCS and packet-count allocation for layered multicast.
//!
//! Layer `ℓ` is sent with MCS `m_ℓ` (1-based) and `N_ℓ` coded packets. A
//! solution must satisfy:
//!
//! * ordering: `m_1 < m_2 < … < m_Λ`;
//! * coverage: at least `Û_ℓ` users decode layers `1..=ℓ` with probability `≥ p̂`;
//! * frame capacity: peak per-frame load `S(N) ≤ Ŝ`;
//! * deadline: `T(N) ≤ T̂` frames.
//!
//! The load is `Σ N_ℓ · c(m_ℓ)` resource units (or `Σ N_ℓ` in packet
//! mode). Packets are spread evenly over `T(N) = ⌈load / Ŝ⌉` frames and
//! `S(N)` is the busiest frame: `max(⌈load / T⌉, largest single-packet cost)`.

mod brute;
mod heuristic;
mod synthetic;

pub use brute::{brute_force_solve, search_space_size, SEARCH_SPACE_LIMIT};
pub use heuristic::heuristic_solve;
pub use synthetic::{logistic_erasure_table, random_micro_instance, MicroInstanceSpec};

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::{decode_prob_after_sent, layered_prefix_prob_mc};
use crate::codec::MAX_GENERATION_SIZE;
use crate::field::Field;
use crate::seed;
use crate::uep::{LayerProfile, WindowScheme};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrapError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("search space of {size} candidates exceeds the limit of {limit}")]
    SearchSpace { size: u128, limit: u128 },
}

/// Objective to minimise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Utility {
    /// `Σ N_ℓ`
    #[default]
    TotalPackets,
    /// `Σ N_ℓ · c(m_ℓ)`
    TotalResourceUnits,
}

/// What `frame_capacity` counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapacityUnit {
    #[default]
    ResourceUnits,
    Packets,
}

/// Per-MCS packet costs and per-user erasure rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McsTable {
    /// `c(1)..c(M)`: resource units per coded packet, strictly decreasing.
    pub costs: Vec<u64>,
    /// `erasure[u][m - 1]`, non-decreasing in `m`.
    pub erasure: Vec<Vec<f64>>,
}

impl McsTable {
    pub fn mcs_count(&self) -> usize {
        self.costs.len()
    }

    pub fn users(&self) -> usize {
        self.erasure.len()
    }

    /// Cost of MCS `m` (1-based).
    pub fn cost(&self, m: usize) -> u64 {
        self.costs[m - 1]
    }

    /// Erasure rate of user `u` at MCS `m` (1-based).
    pub fn eps(&self, u: usize, m: usize) -> f64 {
        self.erasure[u][m - 1]
    }

    pub fn validate(&self) -> Result<(), GrapError> {
        let bad = |msg: String| Err(GrapError::InvalidInstance(msg));
        if self.costs.is_empty() {
            return bad("at least one MCS is required".into());
        }
        if self.costs.contains(&0) {
            return bad("MCS costs must be positive".into());
        }
        if self.costs.windows(2).any(|w| w[1] >= w[0]) {
            return bad(format!("MCS costs must be strictly decreasing, got {:?}", self.costs));
        }
        for (u, row) in self.erasure.iter().enumerate() {
            if row.len() != self.costs.len() {
                return bad(format!("user {} has {} erasure entries for {} MCS", u + 1, row.len(), self.costs.len()));
            }
            if row.iter().any(|e| !(0.0..=1.0).contains(e)) {
                return bad(format!("user {} has an erasure rate outside [0, 1]", u + 1));
            }
            if row.windows(2).any(|w| w[1] < w[0]) {
                return bad(format!("user {} erasure rates must be non-decreasing in the MCS index", u + 1));
            }
        }
        Ok(())
    }
}

fn default_max_packets() -> u64 {
    1000
}

fn default_ew_trials() -> u64 {
    2000
}

/// A resource-allocation problem instance, usually read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrapInstance {
    /// `k_1..k_Λ`
    pub layer_sizes: Vec<usize>,
    pub field_order: u16,
    pub scheme: WindowScheme,
    pub mcs: McsTable,
    /// `Û_1..Û_Λ`, non-increasing.
    pub target_users: Vec<usize>,
    /// `p̂`
    pub prob_threshold: f64,
    /// `Ŝ`
    pub frame_capacity: u64,
    /// `T̂`, in frames.
    pub deadline: u64,
    #[serde(default)]
    pub utility: Utility,
    #[serde(default)]
    pub capacity_unit: CapacityUnit,
    /// Upper bound on any `N_ℓ` considered by the heuristic.
    #[serde(default = "default_max_packets")]
    pub max_packets_per_layer: u64,
    /// Monte-Carlo trials per EW coverage estimate.
    #[serde(default = "default_ew_trials")]
    pub ew_trials: u64,
    /// Seed for EW coverage estimates.
    #[serde(default)]
    pub seed: u64,
}

impl GrapInstance {
    pub fn from_toml(text: &str) -> Result<GrapInstance, GrapError> {
        let inst: GrapInstance = toml::from_str(text).map_err(|e| GrapError::InvalidInstance(e.to_string()))?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("instance serializes")
    }

    pub fn num_layers(&self) -> usize {
        self.layer_sizes.len()
    }

    pub fn users(&self) -> usize {
        self.mcs.users()
    }

    pub fn profile(&self) -> LayerProfile {
        LayerProfile::new(self.layer_sizes.clone()).expect("validated instance")
    }

    pub fn validate(&self) -> Result<(), GrapError> {
        let bad = |msg: String| Err(GrapError::InvalidInstance(msg));
        LayerProfile::new(self.layer_sizes.clone()).map_err(|e| GrapError::InvalidInstance(e.to_string()))?;
        let k: usize = self.layer_sizes.iter().sum();
        if k > MAX_GENERATION_SIZE {
            return bad(format!("layers sum to {k} packets, above the generation limit {MAX_GENERATION_SIZE}"));
        }
        Field::new(self.field_order).map_err(|e| GrapError::InvalidInstance(e.to_string()))?;
        self.mcs.validate()?;
        if self.num_layers() > self.mcs.mcs_count() {
            return bad(format!(
                "{} layers need strictly increasing MCS indices but only {} MCS exist",
                self.num_layers(),
                self.mcs.mcs_count()
            ));
        }
        if self.target_users.len() != self.num_layers() {
            return bad(format!("{} target user counts for {} layers", self.target_users.len(), self.num_layers()));
        }
        if self.target_users.windows(2).any(|w| w[1] > w[0]) {
            return bad("target user counts must be non-increasing across layers".into());
        }
        if !(self.prob_threshold > 0.0 && self.prob_threshold < 1.0) {
            return bad(format!("prob_threshold must lie in (0, 1), got {}", self.prob_threshold));
        }
        if self.frame_capacity == 0 || self.deadline == 0 {
            return bad("frame_capacity and deadline must be at least 1".into());
        }
        if self.ew_trials == 0 {
            return bad("ew_trials must be at least 1".into());
        }
        Ok(())
    }

    /// Per-packet load of MCS `m` in the capacity unit.
    pub fn unit_load(&self, m: usize) -> u64 {
        match self.capacity_unit {
            CapacityUnit::ResourceUnits => self.mcs.cost(m),
            CapacityUnit::Packets => 1,
        }
    }

    /// Total load `Σ N_ℓ · unit(m_ℓ)`.
    pub fn load(&self, mcs: &[usize], packets: &[u64]) -> u64 {
        mcs.iter().zip(packets).map(|(&m, &n)| n * self.unit_load(m)).sum()
    }

    /// `T(N)`: frames needed.
    pub fn frames(&self, mcs: &[usize], packets: &[u64]) -> u64 {
        self.load(mcs, packets).div_ceil(self.frame_capacity)
    }

    /// `S(N)`: busiest frame under even spreading.
    pub fn peak_frame_load(&self, mcs: &[usize], packets: &[u64]) -> u64 {
        let load = self.load(mcs, packets);
        if load == 0 {
            return 0;
        }
        let frames = load.div_ceil(self.frame_capacity);
        let largest = mcs.iter().zip(packets).filter(|(_, &n)| n > 0).map(|(&m, _)| self.unit_load(m)).max().unwrap_or(0);
        load.div_ceil(frames).max(largest)
    }

    pub fn objective(&self, mcs: &[usize], packets: &[u64]) -> u64 {
        match self.utility {
            Utility::TotalPackets => packets.iter().sum(),
            Utility::TotalResourceUnits => mcs.iter().zip(packets).map(|(&m, &n)| n * self.mcs.cost(m)).sum(),
        }
    }

    fn check_dims(&self, mcs: &[usize], packets: &[u64]) -> Result<(), GrapError> {
        let l = self.num_layers();
        if mcs.len() != l || packets.len() != l {
            return Err(GrapError::Dimension(format!(
                "{} MCS indices and {} packet counts for {} layers",
                mcs.len(),
                packets.len(),
                l
            )));
        }
        if let Some(&m) = mcs.iter().find(|&&m| m == 0 || m > self.mcs.mcs_count()) {
            return Err(GrapError::Dimension(format!("MCS index {m} outside 1..={}", self.mcs.mcs_count())));
        }
        Ok(())
    }
}

/// The constraint a solution fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    McsOrdering,
    Coverage,
    FrameCapacity,
    Deadline,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::McsOrdering => "mcs_ordering",
            Constraint::Coverage => "coverage",
            Constraint::FrameCapacity => "frame_capacity",
            Constraint::Deadline => "deadline",
        })
    }
}

/// Per-constraint verdict with margins.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub ordering_ok: bool,
    /// `U_ℓ` for each layer.
    pub coverage: Vec<usize>,
    pub coverage_ok: bool,
    pub load: u64,
    /// `S(N)`
    pub peak_frame_load: u64,
    pub capacity_ok: bool,
    /// `T(N)`
    pub frames: u64,
    pub deadline_ok: bool,
    pub objective: u64,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.ordering_ok && self.coverage_ok && self.capacity_ok && self.deadline_ok
    }

    pub fn violations(&self) -> Vec<Constraint> {
        [
            (self.ordering_ok, Constraint::McsOrdering),
            (self.coverage_ok, Constraint::Coverage),
            (self.capacity_ok, Constraint::FrameCapacity),
            (self.deadline_ok, Constraint::Deadline),
        ]
        .into_iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, c)| c)
        .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrapSolution {
    /// `m_1..m_Λ`, 1-based; 0 where the solver stopped before choosing.
    pub mcs: Vec<usize>,
    /// `N_1..N_Λ`
    pub packets: Vec<u64>,
    pub feasible: bool,
    pub objective: u64,
    /// `U_1..U_Λ`
    pub per_layer_coverage: Vec<usize>,
    /// First failing constraint when infeasible.
    pub violated: Option<Constraint>,
}

impl GrapSolution {
    fn infeasible(inst: &GrapInstance, mcs: Vec<usize>, packets: Vec<u64>, c: Constraint) -> GrapSolution {
        GrapSolution {
            mcs,
            packets,
            feasible: false,
            objective: 0,
            per_layer_coverage: vec![0; inst.num_layers()],
            violated: Some(c),
        }
    }

    fn from_report(mcs: Vec<usize>, packets: Vec<u64>, r: &FeasibilityReport) -> GrapSolution {
        GrapSolution {
            mcs,
            packets,
            feasible: r.feasible(),
            objective: r.objective,
            per_layer_coverage: r.coverage.clone(),
            violated: r.violations().first().copied(),
        }
    }
}

type EwKey = (usize, Vec<usize>, Vec<u64>);

/// Evaluates `U_ℓ`. EW estimates are cached per (user, m, N) and use a seed
/// derived from the instance seed and `(m, N)`, so repeated queries agree.
pub struct CoverageModel<'a> {
    inst: &'a GrapInstance,
    ew_cache: RefCell<HashMap<EwKey, Vec<f64>>>,
}

impl<'a> CoverageModel<'a> {
    pub fn new(inst: &'a GrapInstance) -> CoverageModel<'a> {
        CoverageModel { inst, ew_cache: RefCell::new(HashMap::new()) }
    }

    pub fn instance(&self) -> &GrapInstance {
        self.inst
    }

    /// Prefix decoding probabilities of user `u`; conservative (estimate
    /// minus half-width) under EW.
    pub fn user_prefix_probs(&self, u: usize, mcs: &[usize], packets: &[u64]) -> Vec<f64> {
        let inst = self.inst;
        let eps: Vec<f64> = mcs.iter().map(|&m| inst.mcs.eps(u, m)).collect();
        match inst.scheme {
            WindowScheme::Now => {
                let mut acc = 1.0;
                inst.layer_sizes
                    .iter()
                    .zip(packets)
                    .zip(&eps)
                    .map(|((&k, &n), &e)| {
                        acc *= decode_prob_after_sent(n, k, inst.field_order, e);
                        acc
                    })
                    .collect()
            }
            WindowScheme::Ew => {
                let key = (u, mcs.to_vec(), packets.to_vec());
                if let Some(hit) = self.ew_cache.borrow().get(&key) {
                    return hit.clone();
                }
                let path: Vec<u64> = std::iter::once(seed::label::INSTANCE)
                    .chain(mcs.iter().map(|&m| m as u64))
                    .chain(packets.iter().copied())
                    .collect();
                let est = layered_prefix_prob_mc(
                    WindowScheme::Ew,
                    packets,
                    &inst.profile(),
                    inst.field_order,
                    &eps,
                    inst.ew_trials,
                    seed::derive(inst.seed, &path),
                )
                .expect("validated instance");
                let probs: Vec<f64> = est.iter().map(|e| (e.mean - e.half_width).max(0.0)).collect();
                self.ew_cache.borrow_mut().insert(key, probs.clone());
                probs
            }
        }
    }

    /// `U_1..U_Λ`.
    pub fn coverage(&self, mcs: &[usize], packets: &[u64]) -> Vec<usize> {
        let mut counts = vec![0usize; self.inst.num_layers()];
        for u in 0..self.inst.users() {
            for (l, p) in self.user_prefix_probs(u, mcs, packets).into_iter().enumerate() {
                if p >= self.inst.prob_threshold {
                    counts[l] += 1;
                }
            }
        }
        counts
    }

    /// Whether every layer reaches its target.
    pub fn covers(&self, mcs: &[usize], packets: &[u64]) -> bool {
        self.coverage(mcs, packets).iter().zip(&self.inst.target_users).all(|(u, t)| u >= t)
    }

    pub fn check(&self, mcs: &[usize], packets: &[u64]) -> Result<FeasibilityReport, GrapError> {
        let inst = self.inst;
        inst.check_dims(mcs, packets)?;
        let coverage = self.coverage(mcs, packets);
        let peak = inst.peak_frame_load(mcs, packets);
        let frames = inst.frames(mcs, packets);
        Ok(FeasibilityReport {
            ordering_ok: mcs.windows(2).all(|w| w[0] < w[1]),
            coverage_ok: coverage.iter().zip(&inst.target_users).all(|(u, t)| u >= t),
            coverage,
            load: inst.load(mcs, packets),
            peak_frame_load: peak,
            capacity_ok: peak <= inst.frame_capacity,
            frames,
            deadline_ok: frames <= inst.deadline,
            objective: inst.objective(mcs, packets),
        })
    }
}

/// `U_ℓ` for every layer.
pub fn coverage(inst: &GrapInstance, mcs: &[usize], packets: &[u64]) -> Result<Vec<usize>, GrapError> {
    inst.check_dims(mcs, packets)?;
    Ok(CoverageModel::new(inst).coverage(mcs, packets))
}

/// Evaluates every constraint for `(mcs, packets)`.
pub fn check_feasibility(inst: &GrapInstance, mcs: &[usize], packets: &[u64]) -> Result<FeasibilityReport, GrapError> {
    CoverageModel::new(inst).check(mcs, packets)
}
