//! Decoding-probability formulas and Monte-Carlo estimators.
//!
//! With `n` received packets of a random `n × K` coding matrix over GF(q),
//! the probability of full rank is
//!
//! ```text
//! P_d(n) = 0                                   if n < K
//!        = Π_{j=0}^{K-1} (1 - q^(j-n))         otherwise
//! ```
//!
//! and after `N` transmissions over an erasure channel with loss rate `ε`,
//!
//! ```text
//! P_d(N) = Σ_{n=K}^{N} C(N, n) ε^(N-n) (1-ε)^n P_d(n).
//! ```
//!
//! Binomial weights are evaluated in log space so `N` in the thousands is fine.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::codec::{CodecError, CodingMode, Decoder, Encoder, EncoderConfig, SourceBlock};
use crate::field::{Field, FieldError};
use crate::seed;
use crate::uep::{LayerProfile, UepDecoder, UepEncoder, UepError, WindowDistribution, WindowScheme};

/// Series are truncated once the remaining mass is below this bound.
pub const SERIES_TAIL_TOLERANCE: f64 = 1e-12;

/// Default Monte-Carlo trial count.
pub const DEFAULT_TRIALS: u64 = 100_000;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticsError {
    #[error("erasure probability {0} outside [0, 1]")]
    InvalidErasure(f64),
    #[error("decoding delay diverges when every packet is erased")]
    DelayDiverges,
    #[error("at least one trial is required")]
    NoTrials,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Uep(#[from] UepError),
}

/// Monte-Carlo estimate with a 95% normal-approximation half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub half_width: f64,
    pub trials: u64,
}

impl Estimate {
    pub fn from_samples(samples: &[f64]) -> Estimate {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = if samples.len() > 1 {
            samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Estimate { mean, half_width: Z95 * (var / n).sqrt(), trials: samples.len() as u64 }
    }

    pub fn proportion(successes: u64, trials: u64) -> Estimate {
        let p = successes as f64 / trials as f64;
        Estimate { mean: p, half_width: Z95 * (p * (1.0 - p) / trials as f64).sqrt(), trials }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        self.half_width / Z95
    }

    /// Lower end of the 95% interval.
    pub fn lower(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width
    }
}

fn check_eps(eps: f64) -> Result<(), AnalyticsError> {
    if (0.0..=1.0).contains(&eps) {
        Ok(())
    } else {
        Err(AnalyticsError::InvalidErasure(eps))
    }
}

/// `P_d(n)`: probability that `n` received random packets have rank `K` over GF(q).
pub fn decode_prob_given_received(n: u64, k: usize, q: u16) -> f64 {
    debug_assert!(q >= 2 && k >= 1);
    if n < k as u64 {
        return 0.0;
    }
    let q = q as f64;
    (0..k).map(|j| 1.0 - q.powf(j as f64 - n as f64)).product()
}

/// `p_d(n) = P_d(n) - P_d(n-1)`: probability that full rank is first reached at the `n`-th packet.
pub fn decode_prob_pdf(n: u64, k: usize, q: u16) -> f64 {
    if n == 0 {
        return decode_prob_given_received(0, k, q);
    }
    (decode_prob_given_received(n, k, q) - decode_prob_given_received(n - 1, k, q)).max(0.0)
}

fn ln_factorials(n: u64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for i in 1..=n {
        acc += (i as f64).ln();
        out.push(acc);
    }
    out
}

/// `P_d(N)` after `N` transmissions over an erasure channel with loss rate `eps`.
pub fn decode_prob_after_sent(big_n: u64, k: usize, q: u16, eps: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&eps));
    if big_n < k as u64 || eps >= 1.0 {
        return 0.0;
    }
    if eps <= 0.0 {
        return decode_prob_given_received(big_n, k, q);
    }
    let lf = ln_factorials(big_n);
    let (ln_e, ln_s) = (eps.ln(), (1.0 - eps).ln());
    let total: f64 = (k as u64..=big_n)
        .map(|n| {
            let ln_w = lf[big_n as usize] - lf[n as usize] - lf[(big_n - n) as usize]
                + (big_n - n) as f64 * ln_e
                + n as f64 * ln_s;
            ln_w.exp() * decode_prob_given_received(n, k, q)
        })
        .sum();
    total.clamp(0.0, 1.0)
}

/// `P_o(N) = 1 - P_d(N)`.
pub fn outage_prob(big_n: u64, k: usize, q: u16, eps: f64) -> f64 {
    1.0 - decode_prob_after_sent(big_n, k, q, eps)
}

/// `E[n]` received packets until full rank, `Σ n p_d(n)`, summed until the
/// remaining mass `1 - P_d(n)` drops below [`SERIES_TAIL_TOLERANCE`].
///
/// Over an erasure channel every slot delivers with probability `1 - ε`, so
/// the expected number of slots is this value divided by `1 - ε`.
pub fn mean_packets_to_decode(k: usize, q: u16) -> f64 {
    let mut n = k as u64;
    let mut mean = 0.0;
    loop {
        mean += n as f64 * decode_prob_pdf(n, k, q);
        if 1.0 - decode_prob_given_received(n, k, q) < SERIES_TAIL_TOLERANCE {
            return mean;
        }
        n += 1;
    }
}

fn trial_seed(master: u64, trial: u64) -> u64 {
    seed::derive(master, &[seed::label::TRIAL, trial])
}

/// Monte-Carlo average decoding delay: slots until a receiver behind an
/// erasure channel with loss `eps` first reaches rank `K` under standard RLNC.
///
/// Coding vectors follow the plain i.i.d. uniform law (all-zero vectors are
/// sent, not redrawn), the same law the closed forms assume.
pub fn avg_decoding_delay_mc(k: usize, q: u16, eps: f64, trials: u64, seed: u64) -> Result<Estimate, AnalyticsError> {
    check_eps(eps)?;
    if eps >= 1.0 {
        return Err(AnalyticsError::DelayDiverges);
    }
    if trials == 0 {
        return Err(AnalyticsError::NoTrials);
    }
    let field = Field::new(q)?;
    Decoder::new(field.clone(), k, 1, 0)?;
    let samples: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = trial_seed(seed, t);
            let mut data_rng = ChaCha8Rng::seed_from_u64(s);
            let block = SourceBlock::random(0, k, 1, &field, &mut data_rng).expect("validated geometry");
            let cfg = EncoderConfig::new(field.clone(), CodingMode::Standard, s).with_resample_zero(false);
            let mut enc = Encoder::new(&block, cfg).expect("standard mode is valid");
            let mut dec = Decoder::for_block(field.clone(), &block);
            let mut erasures = seed::stream(s, &[seed::label::ERASURE, 0]);
            let mut slots = 0u64;
            while !dec.is_complete() {
                slots += 1;
                let pkt = enc.next_packet();
                if erasures.gen::<f64>() >= eps {
                    dec.absorb(&pkt).expect("encoder output fits the decoder");
                }
            }
            slots as f64
        })
        .collect();
    Ok(Estimate::from_samples(&samples))
}

/// NOW prefix probabilities `Π_{i≤ℓ} P_d(N_i; k_i, ε_i)` for `ℓ = 1..Λ`,
/// with a separate erasure rate per layer.
pub fn layered_decode_prob_now_per_layer(
    per_layer_n: &[u64],
    layer_ks: &[usize],
    q: u16,
    eps: &[f64],
) -> Result<Vec<f64>, AnalyticsError> {
    if per_layer_n.len() != layer_ks.len() || eps.len() != layer_ks.len() {
        return Err(AnalyticsError::Dimension(format!(
            "{} packet counts, {} layer sizes, {} erasure rates",
            per_layer_n.len(),
            layer_ks.len(),
            eps.len()
        )));
    }
    for &e in eps {
        check_eps(e)?;
    }
    Ok(per_layer_n
        .iter()
        .zip(layer_ks)
        .zip(eps)
        .scan(1.0, |acc, ((&n, &k), &e)| {
            *acc *= decode_prob_after_sent(n, k, q, e);
            Some(*acc)
        })
        .collect())
}

/// NOW prefix probabilities with one erasure rate for every layer.
pub fn layered_decode_prob_now(
    per_layer_n: &[u64],
    layer_ks: &[usize],
    q: u16,
    eps: f64,
) -> Result<Vec<f64>, AnalyticsError> {
    layered_decode_prob_now_per_layer(per_layer_n, layer_ks, q, &vec![eps; layer_ks.len()])
}

/// Monte-Carlo estimate of `P(ℓ* ≥ ℓ)` for `ℓ = 1..Λ` when window `i`
/// contributes exactly `N_i` transmissions, each erased with probability
/// `eps[i]`. Works for both window schemes; the receiver is a
/// [`UepDecoder`], which is the ground truth for layer recovery. Coding
/// vectors follow the plain i.i.d. law as in [`avg_decoding_delay_mc`].
pub fn layered_prefix_prob_mc(
    scheme: WindowScheme,
    per_window_n: &[u64],
    profile: &LayerProfile,
    q: u16,
    eps: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<Estimate>, AnalyticsError> {
    let layers = profile.num_layers();
    if per_window_n.len() != layers || eps.len() != layers {
        return Err(AnalyticsError::Dimension(format!(
            "{} packet counts and {} erasure rates for {} windows",
            per_window_n.len(),
            eps.len(),
            layers
        )));
    }
    for &e in eps {
        check_eps(e)?;
    }
    if trials == 0 {
        return Err(AnalyticsError::NoTrials);
    }
    let field = Field::new(q)?;
    let k = profile.k();
    Decoder::new(field.clone(), k, 1, 0)?;

    let prefixes: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = trial_seed(seed, t);
            let mut data_rng = ChaCha8Rng::seed_from_u64(s);
            let block = SourceBlock::random(0, k, 1, &field, &mut data_rng).expect("validated geometry");
            let cfg = EncoderConfig::new(field.clone(), CodingMode::Standard, s).with_resample_zero(false);
            let mut enc =
                UepEncoder::new(&block, profile.clone(), scheme, WindowDistribution::uniform(layers), cfg)
                    .expect("validated profile");
            let mut dec = UepDecoder::new(field.clone(), profile.clone(), scheme, 1, 0).expect("validated profile");
            let mut erasures = seed::stream(s, &[seed::label::ERASURE, 0]);
            for (w, &n) in per_window_n.iter().enumerate() {
                for _ in 0..n {
                    let pkt = enc.next_packet_in_window(w);
                    if erasures.gen::<f64>() >= eps[w] {
                        dec.absorb(&pkt).expect("encoder output fits the decoder");
                    }
                }
            }
            dec.recovered_layers()
        })
        .collect();

    let mut at_least = vec![0u64; layers + 1];
    for l in prefixes {
        for c in at_least.iter_mut().take(l + 1) {
            *c += 1;
        }
    }
    Ok((1..=layers).map(|l| Estimate::proportion(at_least[l], trials)).collect())
}

/// EW prefix probabilities `P(ℓ* ≥ ℓ)` by Monte Carlo with a joint decoder.
pub fn layered_decode_prob_ew_mc(
    per_window_n: &[u64],
    profile: &LayerProfile,
    q: u16,
    eps: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<Estimate>, AnalyticsError> {
    layered_prefix_prob_mc(WindowScheme::Ew, per_window_n, profile, q, eps, trials, seed)
}
