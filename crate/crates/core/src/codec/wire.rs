//! Byte-exact packet serialization.
//!
//! ```text
//! offset size field
//! 0      4    magic "RLNC"
//! 4      1    version (1)
//! 5      1    log2(q)
//! 6      2    K              (u16 LE)
//! 8      4    payload_len    (u32 LE, in symbols)
//! 12     4    generation_id  (u32 LE)
//! 16     1    window_id
//! 17     ..   coding vector  (K symbols, bit-packed LSB-first when q < 256)
//! ..     ..   payload        (payload_len symbols, packed the same way)
//! ```
//!
//! A packet file is a container: the original byte length as `u64` LE,
//! followed by back-to-back packets.

use thiserror::Error;

use super::CodedPacket;
use crate::field::{pack_symbols, packed_len, unpack_symbols, Field, FieldError};

pub const MAGIC: [u8; 4] = *b"RLNC";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 17;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WireError {
    #[error("bad magic {0:02x?}")]
    BadMagic([u8; 4]),
    #[error("unsupported wire version {0}")]
    BadVersion(u8),
    #[error("truncated input: needed {needed} bytes, {available} available")]
    Truncated { needed: usize, available: usize },
    #[error("packet geometry does not fit the header: {0}")]
    Geometry(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Parsed packet header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub field_bits: u8,
    pub k: u16,
    pub payload_len: u32,
    pub generation_id: u32,
    pub window_id: u8,
}

impl Header {
    pub fn packet_len(&self) -> usize {
        HEADER_LEN
            + packed_len(self.k as usize, self.field_bits)
            + packed_len(self.payload_len as usize, self.field_bits)
    }
}

/// Serializes one packet.
pub fn encode_packet(field: &Field, pkt: &CodedPacket) -> Result<Vec<u8>, WireError> {
    let k = u16::try_from(pkt.coding_vector.len())
        .map_err(|_| WireError::Geometry(format!("K = {} exceeds u16", pkt.coding_vector.len())))?;
    let payload_len = u32::try_from(pkt.payload.len())
        .map_err(|_| WireError::Geometry(format!("payload_len = {} exceeds u32", pkt.payload.len())))?;
    for &s in pkt.coding_vector.iter().chain(&pkt.payload) {
        field.element(s)?;
    }
    let bits = field.bits();
    let mut out = Vec::with_capacity(HEADER_LEN + pkt.coding_vector.len() + pkt.payload.len());
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(bits);
    out.extend_from_slice(&k.to_le_bytes());
    out.extend_from_slice(&payload_len.to_le_bytes());
    out.extend_from_slice(&pkt.generation_id.to_le_bytes());
    out.push(pkt.window_id);
    out.extend_from_slice(&pack_symbols(&pkt.coding_vector, bits));
    out.extend_from_slice(&pack_symbols(&pkt.payload, bits));
    Ok(out)
}

/// Parses the header at the start of `bytes`.
pub fn decode_header(bytes: &[u8]) -> Result<Header, WireError> {
    if bytes.len() < HEADER_LEN {
        return Err(WireError::Truncated { needed: HEADER_LEN, available: bytes.len() });
    }
    let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(WireError::BadMagic(magic));
    }
    if bytes[4] != VERSION {
        return Err(WireError::BadVersion(bytes[4]));
    }
    let field_bits = bytes[5];
    Field::from_bits(field_bits)?;
    Ok(Header {
        field_bits,
        k: u16::from_le_bytes(bytes[6..8].try_into().unwrap()),
        payload_len: u32::from_le_bytes(bytes[8..12].try_into().unwrap()),
        generation_id: u32::from_le_bytes(bytes[12..16].try_into().unwrap()),
        window_id: bytes[16],
    })
}

/// Parses one packet; returns it with the number of bytes consumed.
pub fn decode_packet(bytes: &[u8]) -> Result<(Header, CodedPacket, usize), WireError> {
    let header = decode_header(bytes)?;
    if header.k == 0 || header.payload_len == 0 {
        return Err(WireError::Geometry(format!("K = {}, payload_len = {}", header.k, header.payload_len)));
    }
    let total = header.packet_len();
    if bytes.len() < total {
        return Err(WireError::Truncated { needed: total, available: bytes.len() });
    }
    let bits = header.field_bits;
    let cv_len = packed_len(header.k as usize, bits);
    let body = &bytes[HEADER_LEN..total];
    let pkt = CodedPacket {
        generation_id: header.generation_id,
        window_id: header.window_id,
        coding_vector: unpack_symbols(&body[..cv_len], bits, header.k as usize),
        payload: unpack_symbols(&body[cv_len..], bits, header.payload_len as usize),
    };
    Ok((header, pkt, total))
}

/// Writes a packet container.
pub fn write_container(field: &Field, original_len: u64, packets: &[CodedPacket]) -> Result<Vec<u8>, WireError> {
    let mut out = original_len.to_le_bytes().to_vec();
    for p in packets {
        out.extend_from_slice(&encode_packet(field, p)?);
    }
    Ok(out)
}

/// Reads a packet container: original length and every packet with its header.
pub fn read_container(bytes: &[u8]) -> Result<(u64, Vec<(Header, CodedPacket)>), WireError> {
    if bytes.len() < 8 {
        return Err(WireError::Truncated { needed: 8, available: bytes.len() });
    }
    let original_len = u64::from_le_bytes(bytes[..8].try_into().unwrap());
    let mut rest = &bytes[8..];
    let mut packets = Vec::new();
    while !rest.is_empty() {
        let (h, p, used) = decode_packet(rest)?;
        packets.push((h, p));
        rest = &rest[used..];
    }
    Ok((original_len, packets))
}
