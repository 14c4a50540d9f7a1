//! Unequal error protection over layered source blocks.
//!
//! The `K` packets of a generation are split into `Λ` layers of sizes
//! `k_1..k_Λ`. Each coded packet is drawn from one window, chosen by a
//! [`WindowDistribution`]:
//!
//! * NOW (non-overlapping windows): window `i` is layer `i`.
//! * EW (expanding windows): window `i` is layers `1..=i`.
//!
//! Windows are 0-based in the API and 1-based on the wire (`window_id`),
//! where 0 means "not layered".

use std::ops::Range;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{coefficient_stream, sample_coefficients};
use crate::codec::{combine, Absorbed, CodecError, CodedPacket, CodingMode, Decoder, EncoderConfig, SourceBlock};
use crate::field::Field;
use crate::seed;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UepError {
    #[error("invalid layer profile: {0}")]
    InvalidProfile(String),
    #[error("invalid window distribution: {0}")]
    InvalidDistribution(String),
    #[error("window {0} does not exist")]
    UnknownWindow(usize),
    #[error("packet coding vector has support outside window {0}")]
    SupportOutsideWindow(usize),
    #[error("systematic coding is not defined for layered windows")]
    SystematicUnsupported,
    #[error(transparent)]
    Codec(#[from] CodecError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowScheme {
    Now,
    Ew,
}

/// Layer sizes `k_1..k_Λ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct LayerProfile {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
}

impl TryFrom<Vec<usize>> for LayerProfile {
    type Error = UepError;

    fn try_from(sizes: Vec<usize>) -> Result<Self, UepError> {
        LayerProfile::new(sizes)
    }
}

impl From<LayerProfile> for Vec<usize> {
    fn from(p: LayerProfile) -> Vec<usize> {
        p.sizes
    }
}

impl LayerProfile {
    pub fn new(sizes: Vec<usize>) -> Result<LayerProfile, UepError> {
        if sizes.is_empty() {
            return Err(UepError::InvalidProfile("at least one layer is required".into()));
        }
        if sizes.len() > u8::MAX as usize {
            return Err(UepError::InvalidProfile(format!("{} layers exceed the wire limit of 255", sizes.len())));
        }
        if let Some(i) = sizes.iter().position(|&k| k == 0) {
            return Err(UepError::InvalidProfile(format!("layer {} is empty", i + 1)));
        }
        let offsets = sizes
            .iter()
            .scan(0, |acc, &k| {
                let start = *acc;
                *acc += k;
                Some(start)
            })
            .collect();
        Ok(LayerProfile { sizes, offsets })
    }

    /// A single layer spanning the whole generation.
    pub fn single(k: usize) -> LayerProfile {
        LayerProfile::new(vec![k]).expect("k >= 1")
    }

    pub fn num_layers(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Generation size `K = Σ k_i`.
    pub fn k(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Source-packet positions of layer `i` (0-based).
    pub fn layer_range(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i] + self.sizes[i]
    }
}

impl WindowScheme {
    /// Source-packet positions covered by window `w` (0-based).
    pub fn window_range(&self, profile: &LayerProfile, w: usize) -> Range<usize> {
        let layer = profile.layer_range(w);
        match self {
            WindowScheme::Now => layer,
            WindowScheme::Ew => 0..layer.end,
        }
    }
}

/// Window selection probabilities `p_1..p_Λ`.
#[derive(Debug, Clone)]
pub struct WindowDistribution {
    probs: Vec<f64>,
    index: WeightedIndex<f64>,
}

impl PartialEq for WindowDistribution {
    fn eq(&self, other: &Self) -> bool {
        self.probs == other.probs
    }
}

impl WindowDistribution {
    pub fn new(probs: Vec<f64>) -> Result<WindowDistribution, UepError> {
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(UepError::InvalidDistribution(format!("negative or non-finite entry in {probs:?}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(UepError::InvalidDistribution(format!("entries sum to {sum}, not 1")));
        }
        let index = WeightedIndex::new(&probs).map_err(|e| UepError::InvalidDistribution(e.to_string()))?;
        Ok(WindowDistribution { probs, index })
    }

    pub fn uniform(windows: usize) -> WindowDistribution {
        WindowDistribution::new(vec![1.0 / windows as f64; windows]).expect("uniform distribution is valid")
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Draws a window index (0-based) with probability `p_i`.
pub fn select_window<R: Rng + ?Sized>(dist: &WindowDistribution, rng: &mut R) -> usize {
    dist.index.sample(rng)
}

/// Layered encoder over one generation.
///
/// Coefficients come from the same stream a plain [`crate::codec::Encoder`]
/// would use with the same seed, and window choices from a separate stream,
/// so a one-layer session emits exactly the plain encoder's packets.
#[derive(Debug)]
pub struct UepEncoder<'a> {
    block: &'a SourceBlock,
    profile: LayerProfile,
    scheme: WindowScheme,
    dist: WindowDistribution,
    cfg: EncoderConfig,
    coeff_rng: ChaCha8Rng,
    window_rng: ChaCha8Rng,
    emitted: u64,
}

impl<'a> UepEncoder<'a> {
    pub fn new(
        block: &'a SourceBlock,
        profile: LayerProfile,
        scheme: WindowScheme,
        dist: WindowDistribution,
        cfg: EncoderConfig,
    ) -> Result<UepEncoder<'a>, UepError> {
        if profile.k() != block.k() {
            return Err(UepError::InvalidProfile(format!(
                "layers sum to {} but the block has {} packets",
                profile.k(),
                block.k()
            )));
        }
        if dist.len() != profile.num_layers() {
            return Err(UepError::InvalidDistribution(format!(
                "{} probabilities for {} windows",
                dist.len(),
                profile.num_layers()
            )));
        }
        if cfg.mode == CodingMode::Systematic {
            return Err(UepError::SystematicUnsupported);
        }
        cfg.mode.validate()?;
        let coeff_rng = coefficient_stream(cfg.seed, block.generation_id);
        let window_rng = seed::stream(cfg.seed, &[seed::label::WINDOWS, block.generation_id as u64]);
        Ok(UepEncoder { block, profile, scheme, dist, cfg, coeff_rng, window_rng, emitted: 0 })
    }

    pub fn profile(&self) -> &LayerProfile {
        &self.profile
    }

    pub fn scheme(&self) -> WindowScheme {
        self.scheme
    }

    /// Selects a window from the distribution and encodes over it.
    pub fn next_packet(&mut self) -> CodedPacket {
        let w = select_window(&self.dist, &mut self.window_rng);
        self.next_packet_in_window(w)
    }

    /// Encodes over window `w` (0-based) without drawing a window.
    pub fn next_packet_in_window(&mut self, w: usize) -> CodedPacket {
        assert!(w < self.profile.num_layers(), "window {w} out of range");
        self.emitted += 1;
        let range = self.scheme.window_range(&self.profile, w);
        let mut coding_vector = vec![0u8; self.block.k()];
        sample_coefficients(
            &mut self.coeff_rng,
            &self.cfg.field,
            self.cfg.mode.zero_probability(self.emitted),
            self.cfg.resample_zero,
            &mut coding_vector[range],
        );
        let payload = combine(&self.cfg.field, self.block, &coding_vector);
        CodedPacket { generation_id: self.block.generation_id, window_id: (w + 1) as u8, coding_vector, payload }
    }
}

impl Iterator for UepEncoder<'_> {
    type Item = CodedPacket;

    fn next(&mut self) -> Option<CodedPacket> {
        Some(self.next_packet())
    }
}

/// Receiver side of a layered session.
///
/// NOW runs one independent decoder per layer. EW runs a single joint
/// decoder over all `K` columns, so packets from larger windows also help
/// the smaller ones.
#[derive(Debug, Clone)]
pub struct UepDecoder {
    profile: LayerProfile,
    scheme: WindowScheme,
    inner: Inner,
}

#[derive(Debug, Clone)]
enum Inner {
    Now(Vec<Decoder>),
    Ew(Decoder),
}

impl UepDecoder {
    pub fn new(
        field: Field,
        profile: LayerProfile,
        scheme: WindowScheme,
        payload_len: usize,
        generation_id: u32,
    ) -> Result<UepDecoder, UepError> {
        let inner = match scheme {
            WindowScheme::Now => Inner::Now(
                profile
                    .sizes()
                    .iter()
                    .map(|&k| Decoder::new(field.clone(), k, payload_len, generation_id))
                    .collect::<Result<_, _>>()?,
            ),
            WindowScheme::Ew => Inner::Ew(Decoder::new(field, profile.k(), payload_len, generation_id)?),
        };
        Ok(UepDecoder { profile, scheme, inner })
    }

    pub fn profile(&self) -> &LayerProfile {
        &self.profile
    }

    pub fn scheme(&self) -> WindowScheme {
        self.scheme
    }

    /// Absorbs a layered packet. The returned rank is that of the decoder
    /// the packet went to (the layer's sub-decoder for NOW).
    pub fn absorb(&mut self, pkt: &CodedPacket) -> Result<Absorbed, UepError> {
        let k = self.profile.k();
        if pkt.coding_vector.len() != k {
            return Err(CodecError::CodingVectorLength { expected: k, got: pkt.coding_vector.len() }.into());
        }
        let w = (pkt.window_id as usize)
            .checked_sub(1)
            .filter(|&w| w < self.profile.num_layers())
            .ok_or(UepError::UnknownWindow(pkt.window_id as usize))?;
        let range = self.scheme.window_range(&self.profile, w);
        if pkt.coding_vector[..range.start].iter().chain(&pkt.coding_vector[range.end..]).any(|&g| g != 0) {
            return Err(UepError::SupportOutsideWindow(w));
        }
        match &mut self.inner {
            Inner::Now(layers) => {
                let dec = &mut layers[w];
                if pkt.generation_id != dec.generation_id() {
                    return Err(CodecError::GenerationMismatch {
                        expected: dec.generation_id(),
                        got: pkt.generation_id,
                    }
                    .into());
                }
                Ok(dec.absorb_parts(&pkt.coding_vector[range], &pkt.payload)?)
            }
            Inner::Ew(dec) => Ok(dec.absorb(pkt)?),
        }
    }

    /// Per-layer decoded flags, without the prefix requirement.
    pub fn layer_flags(&self) -> Vec<bool> {
        (0..self.profile.num_layers())
            .map(|i| match &self.inner {
                Inner::Now(layers) => layers[i].is_complete(),
                Inner::Ew(dec) => self.profile.layer_range(i).all(|j| dec.is_source_recovered(j)),
            })
            .collect()
    }

    /// `ℓ*`: the number of leading layers that are all decoded.
    pub fn recovered_layers(&self) -> usize {
        self.layer_flags().iter().take_while(|&&ok| ok).count()
    }

    /// Whether every source packet of window `w` is decoded.
    pub fn window_recovered(&self, w: usize) -> bool {
        let flags = self.layer_flags();
        match self.scheme {
            WindowScheme::Now => flags[w],
            WindowScheme::Ew => flags[..=w].iter().all(|&f| f),
        }
    }

    pub fn is_complete(&self) -> bool {
        match &self.inner {
            Inner::Now(layers) => layers.iter().all(Decoder::is_complete),
            Inner::Ew(dec) => dec.is_complete(),
        }
    }

    /// Total rank across the sub-decoders.
    pub fn rank(&self) -> usize {
        match &self.inner {
            Inner::Now(layers) => layers.iter().map(Decoder::rank).sum(),
            Inner::Ew(dec) => dec.rank(),
        }
    }

    /// Decoded packets of layer `i`, if that layer is decoded.
    pub fn layer_packets(&self, i: usize) -> Option<Vec<Vec<u8>>> {
        match &self.inner {
            Inner::Now(layers) => layers[i].try_recover().map(|b| b.packets().to_vec()),
            Inner::Ew(dec) => {
                self.profile.layer_range(i).map(|j| dec.source_packet(j).map(<[u8]>::to_vec)).collect()
            }
        }
    }

    /// The whole block once every layer is decoded.
    pub fn try_recover(&self) -> Option<SourceBlock> {
        match &self.inner {
            Inner::Ew(dec) => dec.try_recover(),
            Inner::Now(layers) => {
                let gen = layers[0].generation_id();
                let mut packets = Vec::with_capacity(self.profile.k());
                for l in layers {
                    packets.extend(l.try_recover()?.packets().iter().cloned());
                }
                SourceBlock::new(gen, packets).ok()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::Encoder;
    use rand::SeedableRng;

    fn setup(sizes: &[usize], q: u16, seed: u64) -> (Field, SourceBlock, LayerProfile) {
        let f = Field::new(q).unwrap();
        let profile = LayerProfile::new(sizes.to_vec()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = SourceBlock::random(0, profile.k(), 6, &f, &mut rng).unwrap();
        (f, b, profile)
    }

    fn reference_rank(field: &Field, mut m: Vec<Vec<u8>>) -> usize {
        let cols = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
            m.swap(rank, p);
            for r in rank + 1..m.len() {
                if m[r][c] != 0 {
                    let f = field.div(m[r][c], m[rank][c]).unwrap();
                    for x in 0..cols {
                        m[r][x] ^= field.mul(f, m[rank][x]);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Source packet j is solvable iff appending e_j does not raise the rank.
    fn oracle_prefix(field: &Field, profile: &LayerProfile, rows: &[Vec<u8>]) -> usize {
        let k = profile.k();
        let base = reference_rank(field, rows.to_vec());
        let solvable = |j: usize| {
            let mut m = rows.to_vec();
            let mut e = vec![0u8; k];
            e[j] = 1;
            m.push(e);
            reference_rank(field, m) == base
        };
        (0..profile.num_layers()).take_while(|&i| profile.layer_range(i).all(solvable)).count()
    }

    #[test]
    fn profile_validation() {
        assert!(LayerProfile::new(vec![]).is_err());
        assert!(LayerProfile::new(vec![2, 0]).is_err());
        let p = LayerProfile::new(vec![2, 3, 1]).unwrap();
        assert_eq!(p.k(), 6);
        assert_eq!(p.layer_range(1), 2..5);
        assert_eq!(WindowScheme::Ew.window_range(&p, 1), 0..5);
        assert_eq!(WindowScheme::Now.window_range(&p, 2), 5..6);
    }

    #[test]
    fn distribution_validation() {
        assert!(WindowDistribution::new(vec![0.5, 0.4]).is_err());
        assert!(WindowDistribution::new(vec![1.5, -0.5]).is_err());
        assert!(WindowDistribution::new(vec![0.5, 0.5 + 1e-12]).is_ok());
    }

    #[test]
    fn degenerate_distributions() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let first = WindowDistribution::new(vec![1.0, 0.0, 0.0]).unwrap();
        assert!((0..1000).all(|_| select_window(&first, &mut rng) == 0));
        let skip = WindowDistribution::new(vec![0.5, 0.0, 0.5]).unwrap();
        assert!((0..10_000).all(|_| select_window(&skip, &mut rng) != 1));
    }

    #[test]
    fn uniform_selection_frequencies() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let d = WindowDistribution::uniform(4);
        let n = 100_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            counts[select_window(&d, &mut rng)] += 1;
        }
        let sigma = (0.25 * 0.75 / n as f64).sqrt();
        for c in counts {
            assert!((c as f64 / n as f64 - 0.25).abs() < 4.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn support_stays_inside_window() {
        for scheme in [WindowScheme::Now, WindowScheme::Ew] {
            let (f, b, p) = setup(&[2, 3, 4], 16, 3);
            let cfg = EncoderConfig::new(f.clone(), CodingMode::Sparse { t: 0.3 }, 9);
            let enc = UepEncoder::new(&b, p.clone(), scheme, WindowDistribution::uniform(3), cfg).unwrap();
            for pkt in enc.take(300) {
                let w = pkt.window_id as usize - 1;
                let r = scheme.window_range(&p, w);
                assert!(pkt.coding_vector.iter().enumerate().all(|(j, &g)| g == 0 || r.contains(&j)));
                let naive: Vec<u8> = (0..b.payload_len())
                    .map(|x| r.clone().fold(0, |acc, j| f.add(acc, f.mul(pkt.coding_vector[j], b.packet(j)[x]))))
                    .collect();
                assert_eq!(pkt.payload, naive);
            }
        }
    }

    #[test]
    fn nothing_absorbed_means_no_layers() {
        for scheme in [WindowScheme::Now, WindowScheme::Ew] {
            let d = UepDecoder::new(Field::gf2(), LayerProfile::new(vec![1, 2]).unwrap(), scheme, 4, 0).unwrap();
            assert_eq!(d.recovered_layers(), 0);
        }
    }

    #[test]
    fn ew_prefix_matches_linear_algebra_oracle() {
        let mut seed_rng = ChaCha8Rng::seed_from_u64(4);
        for trial in 0..200u64 {
            let q = if trial % 2 == 0 { 2 } else { 4 };
            let (f, b, p) = setup(&[2, 2, 3], q, trial);
            let dist = WindowDistribution::new(vec![0.4, 0.3, 0.3]).unwrap();
            let cfg = EncoderConfig::new(f.clone(), CodingMode::Standard, rand::Rng::gen(&mut seed_rng));
            let mut enc = UepEncoder::new(&b, p.clone(), WindowScheme::Ew, dist, cfg).unwrap();
            let mut dec = UepDecoder::new(f.clone(), p.clone(), WindowScheme::Ew, b.payload_len(), 0).unwrap();
            let mut rows = Vec::new();
            let mut prev = 0;
            for _ in 0..10 {
                let pkt = enc.next_packet();
                dec.absorb(&pkt).unwrap();
                rows.push(pkt.coding_vector.clone());
                let l = dec.recovered_layers();
                assert_eq!(l, oracle_prefix(&f, &p, &rows), "trial {trial}");
                assert!(l >= prev);
                prev = l;
                for i in 0..l {
                    assert_eq!(dec.layer_packets(i).unwrap(), b.packets()[p.layer_range(i)].to_vec());
                }
            }
        }
    }

    #[test]
    fn now_layers_decode_independently() {
        let (f, b, p) = setup(&[3, 2], 256, 5);
        let cfg = EncoderConfig::new(f.clone(), CodingMode::Standard, 1);
        let mut enc = UepEncoder::new(&b, p.clone(), WindowScheme::Now, WindowDistribution::uniform(2), cfg).unwrap();
        let mut dec = UepDecoder::new(f, p, WindowScheme::Now, b.payload_len(), 0).unwrap();
        // layer 2 alone: flags show it but the prefix stays 0
        for _ in 0..2 {
            dec.absorb(&enc.next_packet_in_window(1)).unwrap();
        }
        assert_eq!(dec.layer_flags(), vec![false, true]);
        assert_eq!(dec.recovered_layers(), 0);
        for _ in 0..3 {
            dec.absorb(&enc.next_packet_in_window(0)).unwrap();
        }
        assert_eq!(dec.recovered_layers(), 2);
        assert_eq!(dec.try_recover().unwrap(), b);
    }

    #[test]
    fn one_layer_reduces_to_standard() {
        let (f, b, _) = setup(&[7], 256, 6);
        let cfg = EncoderConfig::new(f.clone(), CodingMode::Sparse { t: 0.5 }, 42);
        let plain: Vec<_> = Encoder::new(&b, cfg.clone()).unwrap().take(20).collect();
        for scheme in [WindowScheme::Now, WindowScheme::Ew] {
            let enc =
                UepEncoder::new(&b, LayerProfile::single(7), scheme, WindowDistribution::uniform(1), cfg.clone())
                    .unwrap();
            let layered: Vec<_> = enc.take(20).collect();
            for (a, l) in plain.iter().zip(&layered) {
                assert_eq!(a.coding_vector, l.coding_vector);
                assert_eq!(a.payload, l.payload);
                assert_eq!(l.window_id, 1);
            }
        }
    }

    #[test]
    fn rejects_bad_packets() {
        let p = LayerProfile::new(vec![2, 2]).unwrap();
        let mut dec = UepDecoder::new(Field::gf256(), p, WindowScheme::Now, 1, 0).unwrap();
        let pkt = |w, cv: Vec<u8>| CodedPacket { generation_id: 0, window_id: w, coding_vector: cv, payload: vec![0] };
        assert_eq!(dec.absorb(&pkt(0, vec![1, 0, 0, 0])), Err(UepError::UnknownWindow(0)));
        assert_eq!(dec.absorb(&pkt(3, vec![1, 0, 0, 0])), Err(UepError::UnknownWindow(3)));
        assert_eq!(dec.absorb(&pkt(1, vec![1, 0, 1, 0])), Err(UepError::SupportOutsideWindow(0)));
        assert!(dec.absorb(&pkt(2, vec![0, 0, 1, 0])).unwrap().innovative);
    }
}
