//! Mirror, split and weighted duplication over two lossy legs.

use rlnc::codec::{CodingMode, EncoderConfig};
use rlnc::dupsim::{compare_policies, BlockParams, DupPolicy, LegConfig, UepSetup};
use rlnc::field::Field;
use rlnc::uep::{LayerProfile, WindowScheme};

fn main() {
    let params = BlockParams { k: 16, payload_len: 16, encoder: EncoderConfig::new(Field::gf256(), CodingMode::Standard, 0) };
    let seeds: Vec<u64> = (0..300).collect();
    let scenarios = [
        ("symmetric", [LegConfig::new(0.2, 1), LegConfig::new(0.2, 1)]),
        ("asymmetric", [LegConfig::new(0.05, 1), LegConfig::new(0.5, 1)]),
    ];
    for (name, legs) in scenarios {
        let policies = [DupPolicy::Mirror, DupPolicy::SplitRoundRobin, DupPolicy::weighted_by_delivery(&legs)];
        println!("{name} legs:");
        for s in compare_policies(&params, &legs, &policies, None, &seeds, 1600).unwrap() {
            println!(
                "  {:<18} slots {:.2} +- {:.2}, overhead {:.2}",
                s.policy.name(),
                s.slots.mean,
                s.slots.half_width,
                s.overhead.mean
            );
        }
    }

    let uep = UepSetup { layers: LayerProfile::new(vec![4, 12]).unwrap(), scheme: WindowScheme::Ew, distribution: vec![0.4, 0.6] };
    let legs = scenarios[0].1;
    let s = &compare_policies(&params, &legs, &[DupPolicy::SplitRoundRobin], Some(&uep), &seeds, 1600).unwrap()[0];
    println!("layered EW payload, split: slots {:.2} +- {:.2}", s.slots.mean, s.slots.half_width);
}
