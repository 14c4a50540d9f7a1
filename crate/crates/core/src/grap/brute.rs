use super::{CoverageModel, GrapError, GrapInstance, GrapSolution};

/// Largest number of `(m, N)` candidates [`brute_force_solve`] will enumerate.
pub const SEARCH_SPACE_LIMIT: u128 = 10_000_000;

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `C(M, Λ) · (n_max + 1)^Λ`.
pub fn search_space_size(inst: &GrapInstance, n_max: u64) -> u128 {
    let l = inst.num_layers() as u32;
    binomial(inst.mcs.mcs_count() as u128, l as u128).saturating_mul((n_max as u128 + 1).saturating_pow(l))
}

/// Advances `v` to the next strictly increasing vector over `1..=top`.
fn next_combination(v: &mut [usize], top: usize) -> bool {
    let l = v.len();
    for i in (0..l).rev() {
        if v[i] < top - (l - 1 - i) {
            v[i] += 1;
            for j in i + 1..l {
                v[j] = v[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Advances `v` through `0..=n_max` per entry in lexicographic order.
fn next_counts(v: &mut [u64], n_max: u64) -> bool {
    for i in (0..v.len()).rev() {
        if v[i] < n_max {
            v[i] += 1;
            return true;
        }
        v[i] = 0;
    }
    false
}

/// Exhaustive search over strictly increasing `m` and `N ∈ [0, n_max]^Λ`.
///
/// Candidates are visited in lexicographic `(m, N)` order and a candidate
/// replaces the incumbent only with a strictly smaller objective, so ties
/// go to the lexicographically smallest pair.
pub fn brute_force_solve(inst: &GrapInstance, n_max: u64) -> Result<GrapSolution, GrapError> {
    inst.validate()?;
    let size = search_space_size(inst, n_max);
    if size > SEARCH_SPACE_LIMIT {
        return Err(GrapError::SearchSpace { size, limit: SEARCH_SPACE_LIMIT });
    }
    let layers = inst.num_layers();
    let model = CoverageModel::new(inst);
    let mut best: Option<(u64, Vec<usize>, Vec<u64>)> = None;

    let mut mcs: Vec<usize> = (1..=layers).collect();
    loop {
        let mut packets = vec![0u64; layers];
        loop {
            let obj = inst.objective(&mcs, &packets);
            let better = best.as_ref().is_none_or(|(b, _, _)| obj < *b);
            if better
                && inst.peak_frame_load(&mcs, &packets) <= inst.frame_capacity
                && inst.frames(&mcs, &packets) <= inst.deadline
                && model.covers(&mcs, &packets)
            {
                best = Some((obj, mcs.clone(), packets.clone()));
            }
            if !next_counts(&mut packets, n_max) {
                break;
            }
        }
        if !next_combination(&mut mcs, inst.mcs.mcs_count()) {
            break;
        }
    }

    Ok(match best {
        Some((_, m, n)) => {
            let report = model.check(&m, &n)?;
            GrapSolution::from_report(m, n, &report)
        }
        None => GrapSolution {
            mcs: vec![0; layers],
            packets: vec![0; layers],
            feasible: false,
            objective: 0,
            per_layer_coverage: vec![0; layers],
            violated: None,
        },
    })
}
