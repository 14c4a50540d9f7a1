use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CodecError, CodedPacket, SourceBlock};
use crate::field::Field;
use crate::seed;

/// How coding coefficients are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CodingMode {
    /// i.i.d. uniform over the field.
    Standard,
    /// The first `K` packets are the source packets; later ones are standard.
    Systematic,
    /// Each coefficient is zero with probability `t`, otherwise uniform over
    /// the nonzero elements.
    Sparse { t: f64 },
    /// Sparse sampling whose zero probability moves linearly from `t_start`
    /// to `t_end` over the first `ramp_len` packets and then stays at `t_end`.
    TunableSparse { t_start: f64, t_end: f64, ramp_len: u32 },
}

impl CodingMode {
    pub fn validate(&self) -> Result<(), CodecError> {
        let in_range = |t: f64| (0.0..1.0).contains(&t);
        match *self {
            CodingMode::Standard | CodingMode::Systematic => Ok(()),
            CodingMode::Sparse { t } if in_range(t) => Ok(()),
            CodingMode::Sparse { t } => {
                Err(CodecError::InvalidMode(format!("sparsity t = {t} must lie in [0, 1)")))
            }
            CodingMode::TunableSparse { t_start, t_end, .. }
                if in_range(t_start) && in_range(t_end) && t_end <= t_start =>
            {
                Ok(())
            }
            CodingMode::TunableSparse { t_start, t_end, .. } => Err(CodecError::InvalidMode(format!(
                "tunable sparsity needs 1 > t_start >= t_end >= 0, got t_start = {t_start}, t_end = {t_end}"
            ))),
        }
    }

    /// Zero probability for the `index`-th packet (1-based), or `None` for
    /// uniform sampling.
    pub fn zero_probability(&self, index: u64) -> Option<f64> {
        match *self {
            CodingMode::Standard | CodingMode::Systematic => None,
            CodingMode::Sparse { t } => Some(t),
            CodingMode::TunableSparse { t_start, t_end, ramp_len } => {
                if ramp_len == 0 {
                    return Some(t_end);
                }
                let progress = ((index.saturating_sub(1)) as f64 / ramp_len as f64).min(1.0);
                Some(t_start + (t_end - t_start) * progress)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncoderConfig {
    pub field: Field,
    pub mode: CodingMode,
    pub seed: u64,
    /// Redraw all-zero coding vectors (on by default). Turn off to get the
    /// plain i.i.d. law assumed by the closed-form decoding probabilities.
    pub resample_zero: bool,
}

impl EncoderConfig {
    pub fn new(field: Field, mode: CodingMode, seed: u64) -> EncoderConfig {
        EncoderConfig { field, mode, seed, resample_zero: true }
    }

    pub fn with_seed(&self, seed: u64) -> EncoderConfig {
        EncoderConfig { seed, ..self.clone() }
    }

    pub fn with_resample_zero(self, resample_zero: bool) -> EncoderConfig {
        EncoderConfig { resample_zero, ..self }
    }
}

/// Fills `out` with coefficients. With `resample_zero` an all-zero draw is
/// thrown away and redrawn.
pub(crate) fn sample_coefficients(
    rng: &mut ChaCha8Rng,
    field: &Field,
    zero_prob: Option<f64>,
    resample_zero: bool,
    out: &mut [u8],
) {
    if out.is_empty() {
        return;
    }
    let q = field.order();
    loop {
        match zero_prob {
            None => out.iter_mut().for_each(|g| *g = rng.gen_range(0..q) as u8),
            Some(t) => out.iter_mut().for_each(|g| {
                *g = if rng.gen::<f64>() < t { 0 } else { rng.gen_range(1..q) as u8 };
            }),
        }
        if !resample_zero || out.iter().any(|&g| g != 0) {
            return;
        }
    }
}

/// `Σ_j coeffs[j] · s_j` over the block's packets.
pub fn combine(field: &Field, block: &SourceBlock, coeffs: &[u8]) -> Vec<u8> {
    let mut payload = vec![0u8; block.payload_len()];
    for (j, &g) in coeffs.iter().enumerate() {
        field.axpy_unchecked(g, block.packet(j), &mut payload);
    }
    payload
}

/// Rateless encoder over one generation.
#[derive(Debug)]
pub struct Encoder<'a> {
    block: &'a SourceBlock,
    cfg: EncoderConfig,
    rng: ChaCha8Rng,
    emitted: u64,
}

impl<'a> Encoder<'a> {
    pub fn new(block: &'a SourceBlock, cfg: EncoderConfig) -> Result<Encoder<'a>, CodecError> {
        cfg.mode.validate()?;
        for &s in block.packets().iter().flatten() {
            cfg.field.element(s)?;
        }
        let rng = coefficient_stream(cfg.seed, block.generation_id);
        Ok(Encoder { block, cfg, rng, emitted: 0 })
    }

    pub fn config(&self) -> &EncoderConfig {
        &self.cfg
    }

    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    pub fn block(&self) -> &SourceBlock {
        self.block
    }

    /// Produces the next coded packet.
    pub fn next_packet(&mut self) -> CodedPacket {
        self.emitted += 1;
        let i = self.emitted;
        let k = self.block.k();
        let mut coding_vector = vec![0u8; k];
        if self.cfg.mode == CodingMode::Systematic && i as usize <= k {
            let j = i as usize - 1;
            coding_vector[j] = 1;
            return CodedPacket {
                generation_id: self.block.generation_id,
                window_id: 0,
                coding_vector,
                payload: self.block.packet(j).to_vec(),
            };
        }
        sample_coefficients(
            &mut self.rng,
            &self.cfg.field,
            self.cfg.mode.zero_probability(i),
            self.cfg.resample_zero,
            &mut coding_vector,
        );
        let payload = combine(&self.cfg.field, self.block, &coding_vector);
        CodedPacket { generation_id: self.block.generation_id, window_id: 0, coding_vector, payload }
    }
}

impl Iterator for Encoder<'_> {
    type Item = CodedPacket;

    fn next(&mut self) -> Option<CodedPacket> {
        Some(self.next_packet())
    }
}

pub(crate) fn coefficient_stream(seed: u64, generation_id: u32) -> ChaCha8Rng {
    seed::stream(seed, &[seed::label::COEFFICIENTS, generation_id as u64])
}
