//! Unequal error protection: layer recovery under NOW and EW windows.

use rlnc::analytics::{layered_decode_prob_now_per_layer, layered_prefix_prob_mc};
use rlnc::codec::{CodingMode, EncoderConfig, SourceBlock};
use rlnc::field::Field;
use rlnc::uep::{LayerProfile, UepDecoder, UepEncoder, WindowDistribution, WindowScheme};
use rand::SeedableRng;

fn main() {
    let field = Field::new(16).unwrap();
    let profile = LayerProfile::new(vec![2, 4, 6]).unwrap();
    let block = SourceBlock::random(0, profile.k(), 8, &field, &mut rand_chacha::ChaCha8Rng::seed_from_u64(3)).unwrap();
    let dist = WindowDistribution::new(vec![0.5, 0.3, 0.2]).unwrap();

    for scheme in [WindowScheme::Now, WindowScheme::Ew] {
        let cfg = EncoderConfig::new(field.clone(), CodingMode::Standard, 11);
        let mut enc = UepEncoder::new(&block, profile.clone(), scheme, dist.clone(), cfg).unwrap();
        let mut dec = UepDecoder::new(field.clone(), profile.clone(), scheme, 8, 0).unwrap();
        let mut milestones = Vec::new();
        let mut sent = 0;
        while !dec.is_complete() {
            dec.absorb(&enc.next_packet()).unwrap();
            sent += 1;
            if milestones.len() < dec.recovered_layers() {
                milestones.resize(dec.recovered_layers(), sent);
            }
        }
        println!("{scheme:?}: layers 1.. recovered after {milestones:?} packets");
    }

    // probability of decoding the first l layers with 4 packets per window at 20% loss
    let n = [4, 4, 4];
    let now = layered_decode_prob_now_per_layer(&n, profile.sizes(), 16, &[0.2; 3]).unwrap();
    let ew = layered_prefix_prob_mc(WindowScheme::Ew, &n, &profile, 16, &[0.2; 3], 20_000, 5).unwrap();
    for l in 0..3 {
        println!("layer {}: NOW per-layer {:.4}, EW P(l* >= {}) {:.4} +- {:.4}", l + 1, now[l], l + 1, ew[l].mean, ew[l].half_width);
    }
}
