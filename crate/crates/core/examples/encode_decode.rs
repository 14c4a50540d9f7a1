//! Split a byte stream into generations, encode, lose some packets, decode.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rlnc::codec::{make_generations, reassemble, CodingMode, Decoder, Encoder, EncoderConfig};
use rlnc::field::Field;

fn main() {
    let field = Field::new(16).unwrap();
    let message = b"Random linear network coding turns every packet into an equally useful one.".repeat(20);
    let gens = make_generations(&message, 10, 32, &field).unwrap();
    println!("{} bytes -> {} generations of K = 10", message.len(), gens.blocks.len());

    let cfg = EncoderConfig::new(field.clone(), CodingMode::Standard, 7);
    let mut channel = ChaCha8Rng::seed_from_u64(1);
    let mut recovered = Vec::new();
    for block in &gens.blocks {
        let mut enc = Encoder::new(block, cfg.clone()).unwrap();
        let mut dec = Decoder::for_block(field.clone(), block);
        let mut sent = 0;
        while !dec.is_complete() {
            let pkt = enc.next_packet();
            sent += 1;
            if channel.gen_bool(0.3) {
                continue;
            }
            dec.absorb(&pkt).unwrap();
        }
        println!("generation {}: {sent} sent, {} received", block.generation_id, dec.received());
        recovered.push(dec.try_recover().unwrap());
    }
    let out = reassemble(&recovered, &field, gens.original_len);
    assert_eq!(out, message);
    println!("recovered {} bytes intact", out.len());
}
