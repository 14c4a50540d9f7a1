//! Serialize coded packets to the byte format and read them back.

use rlnc::codec::wire::{decode_packet, encode_packet, read_container, write_container, HEADER_LEN};
use rlnc::codec::{make_generations, CodingMode, Encoder, EncoderConfig};
use rlnc::field::Field;

fn main() {
    let field = Field::new(4).unwrap();
    let gens = make_generations(b"tiny message", 4, 8, &field).unwrap();
    let mut enc = Encoder::new(&gens.blocks[0], EncoderConfig::new(field.clone(), CodingMode::Standard, 1)).unwrap();
    let pkt = enc.next_packet();

    let bytes = encode_packet(&field, &pkt).unwrap();
    println!("packet: {} bytes ({HEADER_LEN}-byte header)", bytes.len());
    println!("  {:02x?}", bytes);
    let (header, back, used) = decode_packet(&bytes).unwrap();
    assert_eq!(back, pkt);
    println!("  header {header:?}, consumed {used} bytes");

    let packets: Vec<_> = enc.take(6).collect();
    let file = write_container(&field, gens.original_len, &packets).unwrap();
    let (len, read) = read_container(&file).unwrap();
    println!("container: {} bytes, original length {len}, {} packets", file.len(), read.len());
}
