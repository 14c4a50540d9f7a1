use super::{Constraint, CoverageModel, GrapError, GrapInstance, GrapSolution};
use crate::analytics::decode_prob_after_sent;
use crate::uep::WindowScheme;

/// Largest `N_ℓ` worth considering at MCS `m`: what the whole deadline
/// budget `Ŝ · T̂` could carry, capped by `max_packets_per_layer`.
fn packet_cap(inst: &GrapInstance, m: usize) -> u64 {
    (inst.frame_capacity * inst.deadline / inst.unit_load(m)).min(inst.max_packets_per_layer)
}

/// Users for whom layer `l` (0-based) at MCS `m` can reach `p̂` within the packet cap.
fn attainable_users(inst: &GrapInstance, l: usize, m: usize) -> usize {
    let cap = packet_cap(inst, m);
    let k = match inst.scheme {
        WindowScheme::Now => inst.layer_sizes[l],
        WindowScheme::Ew => inst.layer_sizes[..=l].iter().sum(),
    };
    (0..inst.users())
        .filter(|&u| decode_prob_after_sent(cap, k, inst.field_order, inst.mcs.eps(u, m)) >= inst.prob_threshold)
        .count()
}

/// Two-step heuristic.
///
/// 1. MCS allocation, top layer first: each layer takes the highest MCS
///    below the next layer's for which at least `Û_ℓ` users could reach `p̂`
///    with at most [`packet_cap`] packets on that layer alone.
/// 2. Packet optimisation: start every layer at its cap, then lower each
///    `N_ℓ` in turn to the smallest value keeping every coverage target,
///    by binary search.
///
/// The result is re-checked against all constraints; any returned
/// feasible solution passes [`super::check_feasibility`].
pub fn heuristic_solve(inst: &GrapInstance) -> Result<GrapSolution, GrapError> {
    inst.validate()?;
    let layers = inst.num_layers();
    let mut mcs = vec![0usize; layers];

    for l in (0..layers).rev() {
        let hi = if l + 1 == layers { inst.mcs.mcs_count() } else { mcs[l + 1] - 1 };
        let lo = l + 1;
        match (lo..=hi).rev().find(|&m| attainable_users(inst, l, m) >= inst.target_users[l]) {
            Some(m) => mcs[l] = m,
            None => return Ok(GrapSolution::infeasible(inst, mcs, vec![0; layers], Constraint::Coverage)),
        }
    }

    let model = CoverageModel::new(inst);
    let mut packets: Vec<u64> = mcs.iter().map(|&m| packet_cap(inst, m)).collect();
    if !model.covers(&mcs, &packets) {
        return Ok(GrapSolution::infeasible(inst, mcs, packets, Constraint::Coverage));
    }
    for l in 0..layers {
        // invariant: the current value at `hi` covers
        let (mut lo, mut hi) = (0u64, packets[l]);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            packets[l] = mid;
            if model.covers(&mcs, &packets) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        packets[l] = hi;
    }

    let report = model.check(&mcs, &packets)?;
    Ok(GrapSolution::from_report(mcs, packets, &report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grap::tests::base_instance;
    use crate::grap::{check_feasibility, McsTable};

    #[test]
    fn single_lossless_layer_takes_top_mcs_and_k_packets() {
        let mut i = base_instance();
        i.layer_sizes = vec![5];
        i.target_users = vec![1];
        i.mcs = McsTable { costs: vec![3, 2, 1], erasure: vec![vec![0.0; 3]] };
        i.prob_threshold = 0.99;
        let s = heuristic_solve(&i).unwrap();
        assert!(s.feasible);
        assert_eq!(s.mcs, vec![3]);
        assert_eq!(s.packets, vec![5]);
    }

    #[test]
    fn minimal_n_matches_closed_form() {
        let mut i = base_instance();
        i.layer_sizes = vec![4];
        i.target_users = vec![1];
        i.field_order = 2;
        i.mcs = McsTable { costs: vec![2, 1], erasure: vec![vec![0.2, 0.2]] };
        i.prob_threshold = 0.95;
        let s = heuristic_solve(&i).unwrap();
        let expect = (0..).find(|&n| decode_prob_after_sent(n, 4, 2, 0.2) >= 0.95).unwrap();
        assert_eq!(s.packets, vec![expect]);
        assert_eq!(s.mcs, vec![2]);
    }

    #[test]
    fn too_many_target_users() {
        let mut i = base_instance();
        i.target_users = vec![4, 4];
        let s = heuristic_solve(&i).unwrap();
        assert!(!s.feasible);
        assert_eq!(s.violated, Some(Constraint::Coverage));
    }

    #[test]
    fn feasible_output_passes_check() {
        let i = base_instance();
        let s = heuristic_solve(&i).unwrap();
        assert!(s.feasible, "{s:?}");
        let r = check_feasibility(&i, &s.mcs, &s.packets).unwrap();
        assert!(r.feasible());
        assert_eq!(r.objective, s.objective);
        assert!(s.mcs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn tight_deadline_is_flagged() {
        let mut i = base_instance();
        i.frame_capacity = 6;
        i.deadline = 2;
        let s = heuristic_solve(&i).unwrap();
        assert!(!s.feasible);
    }

    #[test]
    fn ew_heuristic_is_checked() {
        let mut i = base_instance();
        i.scheme = WindowScheme::Ew;
        let s = heuristic_solve(&i).unwrap();
        if s.feasible {
            assert!(check_feasibility(&i, &s.mcs, &s.packets).unwrap().feasible());
        }
    }
}
