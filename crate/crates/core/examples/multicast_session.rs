//! One encoder, several receivers on independent erasure channels.

use rlnc::channel::{run_fixed_n, run_until_decoded, ReceiverSpec};
use rlnc::codec::{CodingMode, EncoderConfig, SourceBlock};
use rlnc::field::Field;
use rand::SeedableRng;

fn main() {
    let field = Field::gf256();
    let block = SourceBlock::random(0, 16, 32, &field, &mut rand_chacha::ChaCha8Rng::seed_from_u64(0)).unwrap();
    let cfg = EncoderConfig::new(field, CodingMode::Systematic, 0);
    let receivers = ReceiverSpec::from_eps(&[0.0, 0.1, 0.3, 0.5]);

    let report = run_until_decoded(&block, &cfg, &receivers, 1600, 42).unwrap();
    println!("until decoded: {} slots, overhead {:.2}", report.slots, report.overhead_ratio);
    for r in &report.receivers {
        println!("  receiver {} (eps {}): decoded after {:?} slots, {} packets received", r.id, r.eps, r.slots_to_decode, r.packets_received);
    }

    let fixed = run_fixed_n(&block, &cfg, &receivers, 24, 42).unwrap();
    let decoded: Vec<bool> = fixed.receivers.iter().map(|r| r.decoded).collect();
    println!("fixed N = 24: decoded {decoded:?}");
}
