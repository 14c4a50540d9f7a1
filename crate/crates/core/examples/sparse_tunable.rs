//! Coefficient density of sparse and tunable-sparse encoders, and the cost in
//! extra packets compared with dense coding.

use rlnc::codec::{CodingMode, Decoder, Encoder, EncoderConfig, SourceBlock};
use rlnc::field::Field;
use rand::SeedableRng;

fn packets_needed(mode: CodingMode, seeds: u64) -> f64 {
    let f = Field::gf256();
    let mut total = 0;
    for s in 0..seeds {
        let block = SourceBlock::random(0, 32, 8, &f, &mut rand_chacha::ChaCha8Rng::seed_from_u64(s)).unwrap();
        let mut enc = Encoder::new(&block, EncoderConfig::new(f.clone(), mode, s)).unwrap();
        let mut dec = Decoder::for_block(f.clone(), &block);
        while !dec.is_complete() {
            dec.absorb(&enc.next_packet()).unwrap();
        }
        total += dec.received();
    }
    total as f64 / seeds as f64
}

fn main() {
    let modes = [
        CodingMode::Standard,
        CodingMode::Sparse { t: 0.7 },
        CodingMode::Sparse { t: 0.9 },
        CodingMode::TunableSparse { t_start: 0.9, t_end: 0.5, ramp_len: 32 },
    ];
    for mode in modes {
        let density: Vec<String> = [1, 16, 32, 64]
            .iter()
            .map(|&i| format!("{:.2}", 1.0 - mode.zero_probability(i).unwrap_or(0.0)))
            .collect();
        println!("{mode:?}: density at packets 1/16/32/64 = {density:?}, mean packets to decode K=32: {:.2}", packets_needed(mode, 200));
    }
}
