//! Coded packet duplication over two parallel erasure legs.
//!
//! One generation is delivered over two legs sharing a slot clock. Each leg
//! has its own erasure rate and per-slot capacity, and its own encoder with
//! an independent coefficient stream. A single joint decoder absorbs
//! whatever arrives on either leg. Policies decide which packets go where:
//!
//! * `mirror`: every slot draws `max(c_1, c_2)` packets from leg 1's encoder
//!   and leg `i` carries the first `c_i` of them, so the legs carry copies.
//! * `split_round_robin`: each leg sends `c_i` fresh packets from its own
//!   encoder, interleaved leg 1, leg 2, leg 1, ...
//! * `weighted`: the pooled per-slot budget `c_1 + c_2` is shared between
//!   the legs by smooth weighted round robin.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::Estimate;
use crate::codec::{CodecError, CodedPacket, Decoder, Encoder, EncoderConfig, SourceBlock};
use crate::field::Field;
use crate::seed;
use crate::uep::{LayerProfile, UepDecoder, UepEncoder, UepError, WindowDistribution, WindowScheme};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DupError {
    #[error("leg {leg}: erasure probability {eps} outside [0, 1]")]
    InvalidErasure { leg: usize, eps: f64 },
    #[error("leg {0}: packets_per_slot must be at least 1")]
    NoCapacity(usize),
    #[error("weights must be positive and finite, got {0:?}")]
    InvalidWeights([f64; 2]),
    #[error("max_slots must be at least 1")]
    NoSlots,
    #[error("at least one seed is required")]
    NoSeeds,
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Uep(#[from] UepError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegConfig {
    pub eps: f64,
    pub packets_per_slot: u32,
}

impl LegConfig {
    pub fn new(eps: f64, packets_per_slot: u32) -> LegConfig {
        LegConfig { eps, packets_per_slot }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DupPolicy {
    Mirror,
    SplitRoundRobin,
    Weighted { weights: [f64; 2] },
}

impl DupPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            DupPolicy::Mirror => "mirror",
            DupPolicy::SplitRoundRobin => "split_round_robin",
            DupPolicy::Weighted { .. } => "weighted",
        }
    }

    /// Weights proportional to each leg's delivery rate `1 - ε_i`.
    pub fn weighted_by_delivery(legs: &[LegConfig; 2]) -> DupPolicy {
        DupPolicy::Weighted { weights: [1.0 - legs[0].eps, 1.0 - legs[1].eps] }
    }

    fn validate(&self) -> Result<(), DupError> {
        if let DupPolicy::Weighted { weights } = *self {
            if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                return Err(DupError::InvalidWeights(weights));
            }
        }
        Ok(())
    }
}

/// Layered payload: the encoders draw windows from `distribution`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UepSetup {
    pub layers: LayerProfile,
    pub scheme: WindowScheme,
    pub distribution: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DupRunReport {
    pub slots_to_decode: Option<u64>,
    /// Slots used by the run.
    pub slots: u64,
    pub packets_sent: [u64; 2],
    pub packets_received: [u64; 2],
    /// Total sent over `K`.
    pub overhead_ratio: f64,
    pub decoded: bool,
    /// Layers `1..=ℓ*` recovered; `1` or `0` for a single-layer run.
    pub recovered_layers: usize,
    pub exhausted: bool,
}

enum Source<'a> {
    Plain(Encoder<'a>),
    Layered(UepEncoder<'a>),
}

impl Source<'_> {
    fn next(&mut self) -> CodedPacket {
        match self {
            Source::Plain(e) => e.next_packet(),
            Source::Layered(e) => e.next_packet(),
        }
    }
}

enum Sink {
    Plain(Decoder),
    Layered(UepDecoder),
}

impl Sink {
    fn absorb(&mut self, pkt: &CodedPacket) -> Result<(), DupError> {
        match self {
            Sink::Plain(d) => {
                d.absorb(pkt)?;
            }
            Sink::Layered(d) => {
                d.absorb(pkt)?;
            }
        }
        Ok(())
    }

    fn is_complete(&self) -> bool {
        match self {
            Sink::Plain(d) => d.is_complete(),
            Sink::Layered(d) => d.is_complete(),
        }
    }

    fn recovered_layers(&self) -> usize {
        match self {
            Sink::Plain(d) => d.is_complete() as usize,
            Sink::Layered(d) => d.recovered_layers(),
        }
    }
}

fn make_source<'a>(
    block: &'a SourceBlock,
    cfg: &EncoderConfig,
    uep: Option<&UepSetup>,
    encoder_seed: u64,
) -> Result<Source<'a>, DupError> {
    let cfg = cfg.with_seed(encoder_seed);
    Ok(match uep {
        None => Source::Plain(Encoder::new(block, cfg)?),
        Some(u) => Source::Layered(UepEncoder::new(
            block,
            u.layers.clone(),
            u.scheme,
            WindowDistribution::new(u.distribution.clone())?,
            cfg,
        )?),
    })
}

/// Smooth weighted round robin over two legs.
struct Wrr {
    weights: [f64; 2],
    current: [f64; 2],
}

impl Wrr {
    fn new(weights: [f64; 2]) -> Wrr {
        let total = weights[0] + weights[1];
        Wrr { weights: [weights[0] / total, weights[1] / total], current: [0.0; 2] }
    }

    fn pick(&mut self) -> usize {
        self.current[0] += self.weights[0];
        self.current[1] += self.weights[1];
        let leg = if self.current[1] > self.current[0] { 1 } else { 0 };
        self.current[leg] -= 1.0;
        leg
    }
}

/// Delivers one generation over two legs until full rank or `max_slots`.
pub fn run_duplication(
    block: &SourceBlock,
    cfg: &EncoderConfig,
    legs: &[LegConfig; 2],
    policy: DupPolicy,
    uep: Option<&UepSetup>,
    max_slots: u64,
    seed: u64,
) -> Result<DupRunReport, DupError> {
    for (i, leg) in legs.iter().enumerate() {
        if !(0.0..=1.0).contains(&leg.eps) {
            return Err(DupError::InvalidErasure { leg: i + 1, eps: leg.eps });
        }
        if leg.packets_per_slot == 0 {
            return Err(DupError::NoCapacity(i + 1));
        }
    }
    policy.validate()?;
    if max_slots == 0 {
        return Err(DupError::NoSlots);
    }

    let mut sources = [
        make_source(block, cfg, uep, seed::derive(seed, &[seed::label::ENCODER, 1]))?,
        make_source(block, cfg, uep, seed::derive(seed, &[seed::label::ENCODER, 2]))?,
    ];
    let mut sink = match uep {
        None => Sink::Plain(Decoder::for_block(cfg.field.clone(), block)),
        Some(u) => Sink::Layered(UepDecoder::new(
            cfg.field.clone(),
            u.layers.clone(),
            u.scheme,
            block.payload_len(),
            block.generation_id,
        )?),
    };
    let mut erasures: [ChaCha8Rng; 2] =
        [1u64, 2].map(|leg| seed::stream(seed, &[seed::label::ERASURE, leg]));
    let mut wrr = match policy {
        DupPolicy::Weighted { weights } => Some(Wrr::new(weights)),
        _ => None,
    };
    let caps = [legs[0].packets_per_slot as usize, legs[1].packets_per_slot as usize];

    let mut sent = [0u64; 2];
    let mut received = [0u64; 2];
    let mut slots = 0;
    let mut slots_to_decode = None;
    let mut slot_plan: Vec<(usize, CodedPacket)> = Vec::new();

    while slots < max_slots && slots_to_decode.is_none() {
        slots += 1;
        slot_plan.clear();
        match policy {
            DupPolicy::Mirror => {
                for j in 0..caps[0].max(caps[1]) {
                    let pkt = sources[0].next();
                    for leg in 0..2 {
                        if j < caps[leg] {
                            slot_plan.push((leg, pkt.clone()));
                        }
                    }
                }
            }
            DupPolicy::SplitRoundRobin => {
                for j in 0..caps[0].max(caps[1]) {
                    for leg in 0..2 {
                        if j < caps[leg] {
                            slot_plan.push((leg, sources[leg].next()));
                        }
                    }
                }
            }
            DupPolicy::Weighted { .. } => {
                let wrr = wrr.as_mut().expect("weighted policy has a scheduler");
                for _ in 0..caps[0] + caps[1] {
                    let leg = wrr.pick();
                    slot_plan.push((leg, sources[leg].next()));
                }
            }
        }
        for (leg, pkt) in &slot_plan {
            sent[*leg] += 1;
            if erasures[*leg].gen::<f64>() >= legs[*leg].eps {
                received[*leg] += 1;
                sink.absorb(pkt)?;
            }
        }
        if sink.is_complete() {
            slots_to_decode = Some(slots);
        }
    }

    let decoded = slots_to_decode.is_some();
    Ok(DupRunReport {
        slots_to_decode,
        slots,
        packets_sent: sent,
        packets_received: received,
        overhead_ratio: (sent[0] + sent[1]) as f64 / block.k() as f64,
        decoded,
        recovered_layers: sink.recovered_layers(),
        exhausted: !decoded,
    })
}

/// Block and coding parameters for a policy comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockParams {
    pub k: usize,
    pub payload_len: usize,
    pub encoder: EncoderConfig,
}

/// Summary of one policy over a seed set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicySummary {
    pub policy: DupPolicy,
    pub runs: Vec<DupRunReport>,
    /// Mean slots to decode over decoded runs.
    pub slots: Estimate,
    pub overhead: Estimate,
    pub decoded_fraction: f64,
}

/// The block a seed uses in [`compare_policies`].
pub fn seeded_block(field: &Field, k: usize, payload_len: usize, seed: u64) -> Result<SourceBlock, DupError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(seed, &[seed::label::SOURCE_DATA]));
    Ok(SourceBlock::random(0, k, payload_len, field, &mut rng)?)
}

/// Runs every policy on the same per-seed blocks and channel seeds.
pub fn compare_policies(
    params: &BlockParams,
    legs: &[LegConfig; 2],
    policies: &[DupPolicy],
    uep: Option<&UepSetup>,
    seeds: &[u64],
    max_slots: u64,
) -> Result<Vec<PolicySummary>, DupError> {
    if seeds.is_empty() {
        return Err(DupError::NoSeeds);
    }
    policies
        .iter()
        .map(|&policy| {
            let runs = seeds
                .par_iter()
                .map(|&s| {
                    let block = seeded_block(&params.encoder.field, params.k, params.payload_len, s)?;
                    run_duplication(&block, &params.encoder, legs, policy, uep, max_slots, s)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let decoded: Vec<f64> = runs.iter().filter_map(|r| r.slots_to_decode.map(|x| x as f64)).collect();
            let overhead: Vec<f64> = runs.iter().map(|r| r.overhead_ratio).collect();
            Ok(PolicySummary {
                policy,
                slots: if decoded.is_empty() {
                    Estimate { mean: f64::NAN, half_width: f64::NAN, trials: 0 }
                } else {
                    Estimate::from_samples(&decoded)
                },
                overhead: Estimate::from_samples(&overhead),
                decoded_fraction: decoded.len() as f64 / runs.len() as f64,
                runs,
            })
        })
        .collect()
}
