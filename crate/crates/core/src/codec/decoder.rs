use super::{CodecError, CodedPacket, SourceBlock};
use crate::field::Field;

/// Outcome of absorbing one packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Absorbed {
    pub innovative: bool,
    pub rank: usize,
}

/// On-line Gaussian-elimination decoder for one generation.
///
/// Rows are kept in reduced row-echelon form and indexed by pivot column:
/// every pivot column holds exactly one nonzero entry (a 1). Each row stores
/// the coding vector followed by the payload so both are reduced together.
#[derive(Debug, Clone)]
pub struct Decoder {
    field: Field,
    k: usize,
    payload_len: usize,
    generation_id: u32,
    rows: Vec<Option<Vec<u8>>>,
    rank: usize,
    received: u64,
}

impl Decoder {
    pub fn new(field: Field, k: usize, payload_len: usize, generation_id: u32) -> Result<Decoder, CodecError> {
        if k == 0 || k > super::MAX_GENERATION_SIZE {
            return Err(CodecError::GenerationSize(k));
        }
        if payload_len == 0 {
            return Err(CodecError::EmptyPayload);
        }
        Ok(Decoder { field, k, payload_len, generation_id, rows: vec![None; k], rank: 0, received: 0 })
    }

    /// Decoder matching a block's geometry.
    pub fn for_block(field: Field, block: &SourceBlock) -> Decoder {
        Decoder::new(field, block.k(), block.payload_len(), block.generation_id)
            .expect("a valid block has a valid geometry")
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn payload_len(&self) -> usize {
        self.payload_len
    }

    pub fn generation_id(&self) -> u32 {
        self.generation_id
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn received(&self) -> u64 {
        self.received
    }

    pub fn is_complete(&self) -> bool {
        self.rank == self.k
    }

    pub fn absorb(&mut self, pkt: &CodedPacket) -> Result<Absorbed, CodecError> {
        if pkt.generation_id != self.generation_id {
            return Err(CodecError::GenerationMismatch { expected: self.generation_id, got: pkt.generation_id });
        }
        self.absorb_parts(&pkt.coding_vector, &pkt.payload)
    }

    /// Absorbs a raw (coding vector, payload) pair.
    pub fn absorb_parts(&mut self, coding_vector: &[u8], payload: &[u8]) -> Result<Absorbed, CodecError> {
        if coding_vector.len() != self.k {
            return Err(CodecError::CodingVectorLength { expected: self.k, got: coding_vector.len() });
        }
        if payload.len() != self.payload_len {
            return Err(CodecError::PayloadLength { expected: self.payload_len, got: payload.len() });
        }
        for &g in coding_vector.iter().chain(payload) {
            self.field.element(g)?;
        }
        self.received += 1;
        if self.is_complete() {
            return Ok(Absorbed { innovative: false, rank: self.rank });
        }

        let mut row = Vec::with_capacity(self.k + self.payload_len);
        row.extend_from_slice(coding_vector);
        row.extend_from_slice(payload);

        // Forward reduction. Stored rows are zero left of their pivot and in
        // every other pivot column, so one pass in column order suffices.
        let mut pivot = None;
        for col in 0..self.k {
            let c = row[col];
            if c == 0 {
                continue;
            }
            match &self.rows[col] {
                Some(existing) => self.field.axpy_unchecked(c, existing, &mut row),
                None => {
                    if pivot.is_none() {
                        pivot = Some(col);
                    }
                }
            }
        }
        let Some(p) = pivot else {
            return Ok(Absorbed { innovative: false, rank: self.rank });
        };

        let lead = self.field.inv(row[p]).expect("pivot entry is nonzero");
        self.field.scale(lead, &mut row);

        // Back-substitute to clear column p from the existing rows.
        for existing in self.rows.iter_mut().flatten() {
            let c = existing[p];
            if c != 0 {
                self.field.axpy_unchecked(c, &row, existing);
            }
        }
        self.rows[p] = Some(row);
        self.rank += 1;
        Ok(Absorbed { innovative: true, rank: self.rank })
    }

    /// Whether source packet `j` is individually decoded.
    ///
    /// In reduced row-echelon form `e_j` lies in the row space exactly when
    /// the row with pivot `j` has no other nonzero coefficient.
    pub fn is_source_recovered(&self, j: usize) -> bool {
        match self.rows.get(j) {
            Some(Some(row)) => row[..self.k].iter().enumerate().all(|(c, &v)| c == j || v == 0),
            _ => false,
        }
    }

    /// The decoded source packet `j`, available before full rank when its row is fully reduced.
    pub fn source_packet(&self, j: usize) -> Option<&[u8]> {
        if self.is_source_recovered(j) {
            self.rows[j].as_deref().map(|r| &r[self.k..])
        } else {
            None
        }
    }

    /// Columns that currently hold a pivot.
    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().enumerate().filter_map(|(c, r)| r.as_ref().map(|_| c))
    }

    /// The decoded block once the rank reaches `K`.
    pub fn try_recover(&self) -> Option<SourceBlock> {
        if !self.is_complete() {
            return None;
        }
        let packets = self
            .rows
            .iter()
            .map(|r| r.as_ref().expect("full rank has every pivot")[self.k..].to_vec())
            .collect();
        Some(SourceBlock::new(self.generation_id, packets).expect("decoded geometry is valid"))
    }
}
