use rand::Rng;

use super::{CapacityUnit, GrapInstance, McsTable, Utility};
use crate::seed;
use crate::uep::WindowScheme;

/// Per-user erasure curves `ε_{u,m} = 1 / (1 + exp(-slope · (m - c_u)))`,
/// where the midpoint `c_u` is drawn uniformly from `[1, M + 1]`. Each row
/// is non-decreasing in `m`.
pub fn logistic_erasure_table<R: Rng + ?Sized>(users: usize, mcs_count: usize, slope: f64, rng: &mut R) -> Vec<Vec<f64>> {
    (0..users)
        .map(|_| {
            let centre = rng.gen_range(1.0..=mcs_count as f64 + 1.0);
            (1..=mcs_count).map(|m| 1.0 / (1.0 + (-slope * (m as f64 - centre)).exp())).collect()
        })
        .collect()
}

/// Bounds for [`random_micro_instance`].
#[derive(Debug, Clone, PartialEq)]
pub struct MicroInstanceSpec {
    pub max_layers: usize,
    pub max_mcs: usize,
    pub max_users: usize,
    pub max_layer_size: usize,
    /// Used as `max_packets_per_layer`.
    pub max_packets: u64,
    pub scheme: WindowScheme,
}

impl Default for MicroInstanceSpec {
    fn default() -> Self {
        MicroInstanceSpec {
            max_layers: 2,
            max_mcs: 4,
            max_users: 5,
            max_layer_size: 4,
            max_packets: 40,
            scheme: WindowScheme::Now,
        }
    }
}

/// A small random instance, reproducible from `seed`.
pub fn random_micro_instance(spec: &MicroInstanceSpec, instance_seed: u64) -> GrapInstance {
    let mut rng = seed::stream(instance_seed, &[seed::label::INSTANCE]);
    let layers = rng.gen_range(1..=spec.max_layers);
    let mcs_count = rng.gen_range(layers.max(2)..=spec.max_mcs.max(layers.max(2)));
    let users = rng.gen_range(1..=spec.max_users);
    let layer_sizes: Vec<usize> = (0..layers).map(|_| rng.gen_range(1..=spec.max_layer_size)).collect();
    let field_order = [2u16, 4, 16, 256][rng.gen_range(0..4)];

    // strictly decreasing costs
    let mut costs = vec![0u64; mcs_count];
    let mut c = 1;
    for slot in costs.iter_mut().rev() {
        c += rng.gen_range(0..=2);
        *slot = c;
        c += 1;
    }
    let erasure = logistic_erasure_table(users, mcs_count, rng.gen_range(0.8..2.5), &mut rng);

    let mut target_users: Vec<usize> = (0..layers).map(|_| rng.gen_range(0..=users)).collect();
    target_users.sort_unstable_by(|a, b| b.cmp(a));

    GrapInstance {
        layer_sizes,
        field_order,
        scheme: spec.scheme,
        mcs: McsTable { costs, erasure },
        target_users,
        prob_threshold: [0.6, 0.75, 0.9][rng.gen_range(0..3)],
        frame_capacity: rng.gen_range(4..=40),
        deadline: rng.gen_range(1..=6),
        utility: if rng.gen_bool(0.5) { Utility::TotalPackets } else { Utility::TotalResourceUnits },
        capacity_unit: if rng.gen_bool(0.8) { CapacityUnit::ResourceUnits } else { CapacityUnit::Packets },
        max_packets_per_layer: spec.max_packets,
        ew_trials: 400,
        seed: instance_seed,
    }
}
