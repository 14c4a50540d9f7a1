//! Seeded packet-erasure channels and multicast session simulation.
//!
//! Every receiver draws its erasures from its own stream derived from the
//! session seed and its id, so adding or removing receivers never changes
//! what the others see.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{CodecError, CodedPacket, Decoder, Encoder, EncoderConfig, SourceBlock};
use crate::seed;

/// Default `max_slots` multiplier: `run_until_decoded` stops after `100 · K` slots.
pub const DEFAULT_MAX_SLOTS_PER_SOURCE: u64 = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("erasure probability {0} outside [0, 1]")]
    InvalidErasure(f64),
    #[error("max_slots must be at least 1")]
    NoSlots,
    #[error("duplicate receiver id {0}")]
    DuplicateReceiver(u32),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

/// A receiver's channel parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReceiverSpec {
    pub id: u32,
    pub eps: f64,
}

impl ReceiverSpec {
    pub fn new(id: u32, eps: f64) -> ReceiverSpec {
        ReceiverSpec { id, eps }
    }

    /// Receivers `0..eps.len()` with the given erasure rates.
    pub fn from_eps(eps: &[f64]) -> Vec<ReceiverSpec> {
        eps.iter().enumerate().map(|(i, &e)| ReceiverSpec::new(i as u32, e)).collect()
    }
}

/// A receiver behind an independent erasure channel, with its own decoder.
#[derive(Debug, Clone)]
pub struct Receiver {
    pub id: u32,
    pub eps: f64,
    pub decoder: Decoder,
    erasures: ChaCha8Rng,
    active: bool,
    slots_sent: u64,
    packets_received: u64,
    slots_to_decode: Option<u64>,
}

impl Receiver {
    pub fn new(spec: ReceiverSpec, decoder: Decoder, session_seed: u64) -> Result<Receiver, ChannelError> {
        if !(0.0..=1.0).contains(&spec.eps) {
            return Err(ChannelError::InvalidErasure(spec.eps));
        }
        Ok(Receiver {
            id: spec.id,
            eps: spec.eps,
            decoder,
            erasures: seed::stream(session_seed, &[seed::label::ERASURE, spec.id as u64]),
            active: true,
            slots_sent: 0,
            packets_received: 0,
            slots_to_decode: None,
        })
    }

    /// Whether the receiver is still listening.
    pub fn is_active(&self) -> bool {
        self.active
    }

    /// One channel use: true when the packet gets through.
    pub fn draw_delivery(&mut self) -> bool {
        self.erasures.gen::<f64>() >= self.eps
    }

    pub fn outcome(&self) -> ReceiverOutcome {
        ReceiverOutcome {
            id: self.id,
            eps: self.eps,
            slots_sent: self.slots_sent,
            packets_received: self.packets_received,
            rank: self.decoder.rank(),
            decoded: self.decoder.is_complete(),
            slots_to_decode: self.slots_to_decode,
        }
    }
}

/// Sends `pkt` to every active receiver; returns which ones received it.
/// Inactive receivers are skipped and draw nothing.
pub fn transmit_slot(pkt: &CodedPacket, receivers: &mut [Receiver]) -> Result<Vec<bool>, ChannelError> {
    let mut delivered = Vec::with_capacity(receivers.len());
    for r in receivers.iter_mut() {
        if !r.active {
            delivered.push(false);
            continue;
        }
        r.slots_sent += 1;
        let got = r.draw_delivery();
        if got {
            r.packets_received += 1;
            r.decoder.absorb(pkt)?;
            if r.slots_to_decode.is_none() && r.decoder.is_complete() {
                r.slots_to_decode = Some(r.slots_sent);
            }
        }
        delivered.push(got);
    }
    Ok(delivered)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReceiverOutcome {
    pub id: u32,
    pub eps: f64,
    pub slots_sent: u64,
    pub packets_received: u64,
    pub rank: usize,
    pub decoded: bool,
    pub slots_to_decode: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionReport {
    pub receivers: Vec<ReceiverOutcome>,
    /// Slots used by the session.
    pub slots: u64,
    /// `slots / K`.
    pub overhead_ratio: f64,
    /// True when `run_until_decoded` hit `max_slots` with receivers still undecoded.
    pub exhausted: bool,
}

impl SessionReport {
    pub fn all_decoded(&self) -> bool {
        self.receivers.iter().all(|r| r.decoded)
    }
}

fn build_receivers(block: &SourceBlock, cfg: &EncoderConfig, specs: &[ReceiverSpec], seed: u64) -> Result<Vec<Receiver>, ChannelError> {
    let mut seen = std::collections::BTreeSet::new();
    specs
        .iter()
        .map(|&s| {
            if !seen.insert(s.id) {
                return Err(ChannelError::DuplicateReceiver(s.id));
            }
            Receiver::new(s, Decoder::for_block(cfg.field.clone(), block), seed)
        })
        .collect()
}

fn session_encoder<'a>(block: &'a SourceBlock, cfg: &EncoderConfig, seed: u64) -> Result<Encoder<'a>, ChannelError> {
    let cfg = cfg.with_seed(seed::derive(seed, &[seed::label::ENCODER]));
    Ok(Encoder::new(block, cfg)?)
}

fn report(receivers: &[Receiver], slots: u64, k: usize, exhausted: bool) -> SessionReport {
    SessionReport {
        receivers: receivers.iter().map(Receiver::outcome).collect(),
        slots,
        overhead_ratio: slots as f64 / k as f64,
        exhausted,
    }
}

/// Sends exactly `n` coded packets with no feedback.
///
/// The encoder seed in `cfg` is replaced by one derived from `seed`, so the
/// whole session is a function of `seed` alone.
pub fn run_fixed_n(
    block: &SourceBlock,
    cfg: &EncoderConfig,
    receivers: &[ReceiverSpec],
    n: u64,
    seed: u64,
) -> Result<SessionReport, ChannelError> {
    let mut enc = session_encoder(block, cfg, seed)?;
    let mut rx = build_receivers(block, cfg, receivers, seed)?;
    for _ in 0..n {
        transmit_slot(&enc.next_packet(), &mut rx)?;
    }
    Ok(report(&rx, n, block.k(), false))
}

/// Rateless delivery with ideal per-slot feedback: a receiver leaves as soon
/// as it reaches full rank, and the session ends when everyone has decoded or
/// `max_slots` is reached.
pub fn run_until_decoded(
    block: &SourceBlock,
    cfg: &EncoderConfig,
    receivers: &[ReceiverSpec],
    max_slots: u64,
    seed: u64,
) -> Result<SessionReport, ChannelError> {
    if max_slots == 0 {
        return Err(ChannelError::NoSlots);
    }
    let mut enc = session_encoder(block, cfg, seed)?;
    let mut rx = build_receivers(block, cfg, receivers, seed)?;
    let mut slots = 0;
    while slots < max_slots && rx.iter().any(|r| r.active) {
        slots += 1;
        transmit_slot(&enc.next_packet(), &mut rx)?;
        for r in rx.iter_mut() {
            if r.decoder.is_complete() {
                r.active = false;
            }
        }
    }
    let exhausted = rx.iter().any(|r| !r.decoder.is_complete());
    Ok(report(&rx, slots, block.k(), exhausted))
}

/// `run_until_decoded` with the default safety bound of `100 · K` slots.
pub fn run_until_decoded_default(
    block: &SourceBlock,
    cfg: &EncoderConfig,
    receivers: &[ReceiverSpec],
    seed: u64,
) -> Result<SessionReport, ChannelError> {
    run_until_decoded(block, cfg, receivers, DEFAULT_MAX_SLOTS_PER_SOURCE * block.k() as u64, seed)
}
