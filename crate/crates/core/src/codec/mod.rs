//! Generation-based RLNC encoder and on-line Gaussian-elimination decoder.
//!
//! A byte stream is cut into generations ([`SourceBlock`]) of `K` packets of
//! `payload_len` field symbols each. An [`Encoder`] emits [`CodedPacket`]s
//! whose payload is `Σ g_j · s_j` for a sampled coding vector `g`; a
//! [`Decoder`] reduces every arriving packet against its stored rows and
//! reports whether it was innovative.

mod decoder;
mod encoder;
pub mod wire;

pub use decoder::{Absorbed, Decoder};
pub use encoder::{combine, CodingMode, Encoder, EncoderConfig};
pub(crate) use encoder::{coefficient_stream, sample_coefficients};

use thiserror::Error;

use crate::field::{pack_symbols, packed_len, unpack_symbols, Field, FieldError};

/// Largest supported generation size.
pub const MAX_GENERATION_SIZE: usize = 1024;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodecError {
    #[error("generation size must be in 1..={MAX_GENERATION_SIZE}, got {0}")]
    GenerationSize(usize),
    #[error("payload length must be at least 1 symbol")]
    EmptyPayload,
    #[error("payload of {payload_len} symbols of {bits} bits is not a whole number of bytes")]
    UnalignedPayload { payload_len: usize, bits: u8 },
    #[error("source block rows must all have {expected} symbols, row {row} has {got}")]
    RaggedBlock { expected: usize, row: usize, got: usize },
    #[error("invalid coding mode: {0}")]
    InvalidMode(String),
    #[error("packet belongs to generation {got}, decoder expects {expected}")]
    GenerationMismatch { expected: u32, got: u32 },
    #[error("coding vector has {got} symbols, expected {expected}")]
    CodingVectorLength { expected: usize, got: usize },
    #[error("payload has {got} symbols, expected {expected}")]
    PayloadLength { expected: usize, got: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// One generation: `K` source packets of `payload_len` symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceBlock {
    pub generation_id: u32,
    packets: Vec<Vec<u8>>,
    payload_len: usize,
}

impl SourceBlock {
    pub fn new(generation_id: u32, packets: Vec<Vec<u8>>) -> Result<SourceBlock, CodecError> {
        let k = packets.len();
        if k == 0 || k > MAX_GENERATION_SIZE {
            return Err(CodecError::GenerationSize(k));
        }
        let payload_len = packets[0].len();
        if payload_len == 0 {
            return Err(CodecError::EmptyPayload);
        }
        if let Some((row, p)) = packets.iter().enumerate().find(|(_, p)| p.len() != payload_len) {
            return Err(CodecError::RaggedBlock { expected: payload_len, row, got: p.len() });
        }
        Ok(SourceBlock { generation_id, packets, payload_len })
    }

    /// A block of uniformly random symbols, for simulations where content is irrelevant.
    pub fn random<R: rand::Rng>(
        generation_id: u32,
        k: usize,
        payload_len: usize,
        field: &Field,
        rng: &mut R,
    ) -> Result<SourceBlock, CodecError> {
        let q = field.order();
        let packets = (0..k)
            .map(|_| (0..payload_len).map(|_| rng.gen_range(0..q) as u8).collect())
            .collect();
        SourceBlock::new(generation_id, packets)
    }

    pub fn k(&self) -> usize {
        self.packets.len()
    }

    pub fn payload_len(&self) -> usize {
        self.payload_len
    }

    pub fn packet(&self, j: usize) -> &[u8] {
        &self.packets[j]
    }

    pub fn packets(&self) -> &[Vec<u8>] {
        &self.packets
    }
}

/// A coded packet: coding vector `g_i` and payload `c_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedPacket {
    pub generation_id: u32,
    /// 0 for non-layered coding, otherwise the 1-based window index.
    pub window_id: u8,
    pub coding_vector: Vec<u8>,
    pub payload: Vec<u8>,
}

/// A byte stream split into generations, with the original length kept for reassembly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generations {
    pub blocks: Vec<SourceBlock>,
    pub original_len: u64,
    pub field: Field,
}

impl Generations {
    /// Concatenates all generations and truncates the zero padding.
    pub fn reassemble(&self) -> Vec<u8> {
        reassemble(&self.blocks, &self.field, self.original_len)
    }
}

/// Bytes carried by one generation.
pub fn generation_bytes(k: usize, payload_len: usize, field: &Field) -> usize {
    k * packed_len(payload_len, field.bits())
}

fn check_geometry(k: usize, payload_len: usize, field: &Field) -> Result<(), CodecError> {
    if k == 0 || k > MAX_GENERATION_SIZE {
        return Err(CodecError::GenerationSize(k));
    }
    if payload_len == 0 {
        return Err(CodecError::EmptyPayload);
    }
    if !(payload_len * field.bits() as usize).is_multiple_of(8) {
        return Err(CodecError::UnalignedPayload { payload_len, bits: field.bits() });
    }
    Ok(())
}

/// Splits `data` into consecutive generations of `k` packets.
///
/// For sub-byte fields every byte expands into `8 / log2(q)` symbols, so
/// `payload_len · log2(q)` must be a multiple of 8. The last generation is
/// zero-padded. An empty stream yields no generations.
pub fn make_generations(
    data: &[u8],
    k: usize,
    payload_len: usize,
    field: &Field,
) -> Result<Generations, CodecError> {
    check_geometry(k, payload_len, field)?;
    let bits = field.bits();
    let pkt_bytes = packed_len(payload_len, bits);
    let gen_bytes = k * pkt_bytes;
    let blocks = data
        .chunks(gen_bytes)
        .enumerate()
        .map(|(g, chunk)| {
            let packets = (0..k)
                .map(|j| {
                    let mut bytes = vec![0u8; pkt_bytes];
                    let start = (j * pkt_bytes).min(chunk.len());
                    let end = ((j + 1) * pkt_bytes).min(chunk.len());
                    bytes[..end - start].copy_from_slice(&chunk[start..end]);
                    unpack_symbols(&bytes, bits, payload_len)
                })
                .collect();
            SourceBlock::new(g as u32, packets)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Generations { blocks, original_len: data.len() as u64, field: field.clone() })
}

/// Inverse of [`make_generations`].
pub fn reassemble(blocks: &[SourceBlock], field: &Field, original_len: u64) -> Vec<u8> {
    let mut out: Vec<u8> = blocks
        .iter()
        .flat_map(|b| b.packets().iter().flat_map(|p| pack_symbols(p, field.bits())))
        .collect();
    out.truncate(original_len as usize);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_full_generations() {
        let f = Field::gf256();
        let data: Vec<u8> = (0..2 * 4 * 8).map(|i| i as u8).collect();
        let g = make_generations(&data, 4, 8, &f).unwrap();
        assert_eq!(g.blocks.len(), 2);
        assert_eq!(g.blocks[1].generation_id, 1);
        assert_eq!(g.blocks[1].packet(0)[0], 32);
        assert_eq!(g.reassemble(), data);
    }

    #[test]
    fn single_byte_is_padded() {
        let f = Field::gf256();
        let g = make_generations(&[0xAB], 4, 8, &f).unwrap();
        assert_eq!(g.blocks.len(), 1);
        assert_eq!(g.original_len, 1);
        let flat: Vec<u8> = g.blocks[0].packets().concat();
        assert_eq!(flat.len(), 32);
        assert_eq!(flat[0], 0xAB);
        assert_eq!(flat.iter().skip(1).filter(|&&b| b == 0).count(), 31);
    }

    #[test]
    fn empty_stream_has_no_generations() {
        let g = make_generations(&[], 4, 8, &Field::gf2()).unwrap();
        assert!(g.blocks.is_empty());
        assert!(g.reassemble().is_empty());
    }

    #[test]
    fn geometry_is_validated() {
        let f = Field::gf2();
        assert_eq!(make_generations(&[1], 0, 8, &f), Err(CodecError::GenerationSize(0)));
        assert_eq!(make_generations(&[1], 1025, 8, &f), Err(CodecError::GenerationSize(1025)));
        assert_eq!(make_generations(&[1], 4, 0, &f), Err(CodecError::EmptyPayload));
        assert_eq!(
            make_generations(&[1], 4, 12, &f),
            Err(CodecError::UnalignedPayload { payload_len: 12, bits: 1 })
        );
    }

    #[test]
    fn ragged_block_rejected() {
        assert!(matches!(
            SourceBlock::new(0, vec![vec![1, 2], vec![3]]),
            Err(CodecError::RaggedBlock { row: 1, .. })
        ));
    }

    proptest! {
        #[test]
        fn generations_roundtrip(
            data in proptest::collection::vec(any::<u8>(), 0..600),
            k in 1usize..9,
            qi in 0usize..4,
            units in 1usize..5,
        ) {
            let f = Field::new([2u16, 4, 16, 256][qi]).unwrap();
            // payload_len in symbols chosen so it fills whole bytes
            let payload_len = units * 8 / f.bits() as usize;
            let g = make_generations(&data, k, payload_len, &f).unwrap();
            prop_assert_eq!(g.reassemble(), data);
        }
    }
}
