//! Table-driven arithmetic in the four supported fields.

use rlnc::field::{pack_symbols, unpack_symbols, Field};

fn main() {
    for q in [2u16, 4, 16, 256] {
        let f = Field::new(q).unwrap();
        let a = (q - 1) as u8;
        let b = (q / 2) as u8;
        println!(
            "{f:?}: {a} + {b} = {}, {a} * {b} = {}, 1/{a} = {}",
            f.add(a, b),
            f.mul(a, b),
            f.inv(a).unwrap()
        );
    }

    // row operations used by the decoder
    let f = Field::gf256();
    let mut row = vec![1u8, 2, 3, 4];
    f.axpy(0x53, &[9, 8, 7, 6], &mut row).unwrap();
    println!("row after axpy: {row:?}");

    // GF(4) symbols are packed four to a byte
    let symbols = [3u8, 0, 1, 2, 2, 1];
    let packed = pack_symbols(&symbols, 2);
    println!("packed {symbols:?} -> {packed:02x?} -> {:?}", unpack_symbols(&packed, 2, symbols.len()));
}
