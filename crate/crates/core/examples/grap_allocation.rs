//! MCS and packet allocation for layered multicast, heuristic vs exhaustive search.

use rlnc::grap::{brute_force_solve, check_feasibility, heuristic_solve, CapacityUnit, GrapInstance, McsTable, Utility};
use rlnc::uep::WindowScheme;

fn main() {
    let inst = GrapInstance {
        layer_sizes: vec![3, 5],
        field_order: 16,
        scheme: WindowScheme::Now,
        mcs: McsTable {
            costs: vec![6, 4, 3, 2],
            erasure: vec![
                vec![0.01, 0.05, 0.1, 0.3],
                vec![0.05, 0.1, 0.3, 0.6],
                vec![0.1, 0.2, 0.5, 0.9],
                vec![0.2, 0.4, 0.8, 0.99],
            ],
        },
        target_users: vec![4, 2],
        prob_threshold: 0.9,
        frame_capacity: 60,
        deadline: 2,
        utility: Utility::TotalResourceUnits,
        capacity_unit: CapacityUnit::ResourceUnits,
        max_packets_per_layer: 40,
        ew_trials: 2000,
        seed: 0,
    };

    let h = heuristic_solve(&inst).unwrap();
    let b = brute_force_solve(&inst, 25).unwrap();
    for (name, s) in [("heuristic", &h), ("brute force", &b)] {
        println!("{name}: feasible {}, mcs {:?}, packets {:?}, objective {}, coverage {:?}", s.feasible, s.mcs, s.packets, s.objective, s.per_layer_coverage);
    }
    let report = check_feasibility(&inst, &h.mcs, &h.packets).unwrap();
    println!("heuristic check: peak frame load {} of {}, {} frames of {}", report.peak_frame_load, inst.frame_capacity, report.frames, inst.deadline);

    let mut ew = inst.clone();
    ew.scheme = WindowScheme::Ew;
    let s = heuristic_solve(&ew).unwrap();
    println!("EW heuristic: feasible {}, mcs {:?}, packets {:?}, objective {}", s.feasible, s.mcs, s.packets, s.objective);
}
