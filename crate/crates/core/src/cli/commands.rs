use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{csv_preamble, invalid, CliError, ModeName, PolicyName, SchemeName};
use crate::analytics::{avg_decoding_delay_mc, decode_prob_given_received, outage_prob};
use crate::channel::{run_fixed_n, run_until_decoded, ReceiverSpec, DEFAULT_MAX_SLOTS_PER_SOURCE};
use crate::codec::wire::{read_container, write_container};
use crate::codec::{
    generation_bytes, make_generations, reassemble, CodingMode, Decoder, Encoder, EncoderConfig, SourceBlock,
};
use crate::dupsim::{compare_policies, BlockParams, DupPolicy, LegConfig, UepSetup};
use crate::field::Field;
use crate::grap::{brute_force_solve, heuristic_solve, CoverageModel, GrapInstance, GrapSolution};
use crate::seed;
use crate::uep::{LayerProfile, WindowDistribution, WindowScheme};

fn yes() -> bool {
    true
}

fn field(order: u16) -> Result<Field, CliError> {
    Field::new(order).map_err(|e| invalid(format!("field_order: {e}")))
}

fn coding_mode(
    mode: ModeName,
    sparsity: Option<f64>,
    t_start: Option<f64>,
    t_end: Option<f64>,
    ramp_len: Option<u32>,
) -> Result<CodingMode, CliError> {
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| invalid(format!("mode needs `{name}`")));
    let m = match mode {
        ModeName::Standard => CodingMode::Standard,
        ModeName::Systematic => CodingMode::Systematic,
        ModeName::Sparse => CodingMode::Sparse { t: need(sparsity, "sparsity")? },
        ModeName::TunableSparse => CodingMode::TunableSparse {
            t_start: need(t_start, "t_start")?,
            t_end: need(t_end, "t_end")?,
            ramp_len: ramp_len.ok_or_else(|| invalid("mode needs `ramp_len`"))?,
        },
    };
    m.validate().map_err(invalid)?;
    Ok(m)
}

fn check_geometry(k: usize, payload_len: usize, f: &Field) -> Result<(), CliError> {
    make_generations(&[], k, payload_len, f).map(|_| ()).map_err(invalid)
}

fn check_eps(name: &str, eps: f64) -> Result<(), CliError> {
    if (0.0..=1.0).contains(&eps) {
        Ok(())
    } else {
        Err(invalid(format!("{name}: erasure probability {eps} outside [0, 1]")))
    }
}

fn session_seeds(seeds: &Option<Vec<u64>>, runs: u64) -> Result<Vec<u64>, CliError> {
    let list = match seeds {
        Some(s) => s.clone(),
        None => (0..runs).collect(),
    };
    if list.is_empty() {
        return Err(invalid("at least one run is required (`runs` or `seeds`)"));
    }
    Ok(list)
}

fn session_seed(master: u64, s: u64) -> u64 {
    seed::derive(master, &[seed::label::TRIAL, s])
}

fn random_block(f: &Field, k: usize, payload_len: usize, session: u64) -> SourceBlock {
    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(session, &[seed::label::SOURCE_DATA]));
    SourceBlock::random(0, k, payload_len, f, &mut rng).expect("validated geometry")
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncodeConfig {
    pub input: PathBuf,
    #[serde(default = "EncodeConfig::default_k")]
    pub k: usize,
    #[serde(default = "EncodeConfig::default_payload_len")]
    pub payload_len: usize,
    #[serde(default)]
    pub extra_packets: u64,
    #[serde(default = "default_field_order")]
    pub field_order: u16,
    #[serde(default)]
    pub mode: ModeName,
    pub sparsity: Option<f64>,
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
    pub ramp_len: Option<u32>,
    #[serde(default = "yes")]
    pub resample_zero: bool,
    #[serde(default)]
    pub seed: u64,
}

fn default_field_order() -> u16 {
    256
}

impl EncodeConfig {
    fn default_k() -> usize {
        16
    }

    fn default_payload_len() -> usize {
        64
    }
}

pub(super) fn encode(c: &EncodeConfig) -> Result<Vec<u8>, CliError> {
    let f = field(c.field_order)?;
    let mode = coding_mode(c.mode, c.sparsity, c.t_start, c.t_end, c.ramp_len)?;
    check_geometry(c.k, c.payload_len, &f)?;
    let data = std::fs::read(&c.input).map_err(|e| invalid(format!("cannot read {}: {e}", c.input.display())))?;

    let gens = make_generations(&data, c.k, c.payload_len, &f).map_err(invalid)?;
    let cfg = EncoderConfig::new(f.clone(), mode, seed::derive(c.seed, &[seed::label::ENCODER]))
        .with_resample_zero(c.resample_zero);
    let per_gen = c.k as u64 + c.extra_packets;
    let mut packets = Vec::new();
    for block in &gens.blocks {
        let enc = Encoder::new(block, cfg.clone()).map_err(invalid)?;
        packets.extend(enc.take(per_gen as usize));
    }
    write_container(&f, gens.original_len, &packets).map_err(|e| CliError::Runtime(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecodeConfig {
    pub input: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

pub(super) fn decode(c: &DecodeConfig) -> Result<Vec<u8>, CliError> {
    let bytes = std::fs::read(&c.input).map_err(|e| invalid(format!("cannot read {}: {e}", c.input.display())))?;
    let corrupt = |msg: String| CliError::Runtime(format!("corrupt packet file: {msg}"));
    let (original_len, packets) = read_container(&bytes).map_err(|e| corrupt(e.to_string()))?;
    let Some((first, _)) = packets.first() else {
        if original_len == 0 {
            return Ok(Vec::new());
        }
        return Err(CliError::Runtime(format!("no packets for {original_len} bytes of content")));
    };
    let h = *first;
    if let Some((other, _)) = packets
        .iter()
        .find(|(o, _)| (o.field_bits, o.k, o.payload_len) != (h.field_bits, h.k, h.payload_len))
    {
        return Err(corrupt(format!("mixed packet geometry {h:?} and {other:?}")));
    }
    let f = Field::from_bits(h.field_bits).map_err(|e| corrupt(e.to_string()))?;
    let (k, payload_len) = (h.k as usize, h.payload_len as usize);
    let gen_bytes = generation_bytes(k, payload_len, &f) as u64;
    let generations = original_len.div_ceil(gen_bytes);

    let mut decoders: BTreeMap<u32, Decoder> = BTreeMap::new();
    for (_, pkt) in &packets {
        if pkt.generation_id as u64 >= generations {
            return Err(corrupt(format!(
                "packet for generation {} but the content spans {generations} generations",
                pkt.generation_id
            )));
        }
        let dec = decoders.entry(pkt.generation_id).or_insert_with(|| {
            Decoder::new(f.clone(), k, payload_len, pkt.generation_id).expect("header geometry checked")
        });
        dec.absorb(pkt).map_err(|e| corrupt(e.to_string()))?;
    }

    let mut deficits = Vec::new();
    let mut blocks = Vec::with_capacity(generations as usize);
    for g in 0..generations as u32 {
        match decoders.get(&g).and_then(Decoder::try_recover) {
            Some(b) => blocks.push(b),
            None => {
                let rank = decoders.get(&g).map_or(0, Decoder::rank);
                deficits.push(format!("generation {g}: rank {rank} of {k} (deficit {})", k - rank));
            }
        }
    }
    if !deficits.is_empty() {
        return Err(CliError::Runtime(format!("cannot decode:\n{}", deficits.join("\n"))));
    }
    Ok(reassemble(&blocks, &f, original_len))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeConfig {
    #[serde(default = "AnalyzeConfig::default_k")]
    pub k: usize,
    #[serde(default = "AnalyzeConfig::default_field_order")]
    pub field_order: u16,
    #[serde(default = "AnalyzeConfig::default_eps")]
    pub eps: Vec<f64>,
    pub n_min: Option<u64>,
    pub n_max: Option<u64>,
    #[serde(default = "AnalyzeConfig::default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
}

impl AnalyzeConfig {
    fn default_k() -> usize {
        8
    }

    fn default_field_order() -> u16 {
        2
    }

    fn default_eps() -> Vec<f64> {
        vec![0.0]
    }

    fn default_trials() -> u64 {
        crate::analytics::DEFAULT_TRIALS
    }
}

/// Columns: `n, K, q, eps, N, pd, po, mean_delay, ci95`. Each row uses the
/// sweep value for both `n` and `N`: `pd` is the decoding probability given
/// `n` received packets and `po` the outage probability after `N` sent over
/// the row's erasure channel. The delay columns are Monte-Carlo estimates
/// per `(K, q, eps)` and stay empty when `trials = 0` or `eps = 1`.
pub(super) fn analyze(c: &AnalyzeConfig) -> Result<Vec<u8>, CliError> {
    field(c.field_order)?;
    if c.k == 0 || c.k > crate::codec::MAX_GENERATION_SIZE {
        return Err(invalid(format!("k must be in 1..={}", crate::codec::MAX_GENERATION_SIZE)));
    }
    if c.eps.is_empty() {
        return Err(invalid("eps: at least one value is required"));
    }
    for &e in &c.eps {
        check_eps("eps", e)?;
    }
    let n_min = c.n_min.unwrap_or(1);
    let n_max = c.n_max.unwrap_or(2 * c.k as u64);
    if n_min > n_max {
        return Err(invalid(format!("n_min = {n_min} exceeds n_max = {n_max}")));
    }

    let delays: Vec<Option<(f64, f64)>> = c
        .eps
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            if c.trials == 0 || e >= 1.0 {
                return Ok(None);
            }
            let s = seed::derive(c.seed, &[seed::label::TRIAL, i as u64]);
            let est = avg_decoding_delay_mc(c.k, c.field_order, e, c.trials, s).map_err(invalid)?;
            Ok(Some((est.mean, est.half_width)))
        })
        .collect::<Result<_, CliError>>()?;

    let mut out = csv_preamble("analyze", c.seed, c);
    out.push_str("n,K,q,eps,N,pd,po,mean_delay,ci95\n");
    for (e, delay) in c.eps.iter().zip(&delays) {
        for n in n_min..=n_max {
            let pd = decode_prob_given_received(n, c.k, c.field_order);
            let po = outage_prob(n, c.k, c.field_order, *e);
            let _ = writeln!(
                out,
                "{n},{},{},{e},{n},{pd},{po},{},{}",
                c.k,
                c.field_order,
                opt(delay.map(|d| d.0)),
                opt(delay.map(|d| d.1))
            );
        }
    }
    Ok(out.into_bytes())
}

fn default_sim_k() -> usize {
    16
}

fn default_sim_payload() -> usize {
    16
}

fn default_runs() -> u64 {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MulticastConfig {
    #[serde(default = "default_sim_k")]
    pub k: usize,
    #[serde(default = "default_sim_payload")]
    pub payload_len: usize,
    #[serde(default = "MulticastConfig::default_eps")]
    pub eps: Vec<f64>,
    pub n: Option<u64>,
    pub max_slots: Option<u64>,
    #[serde(default = "default_runs")]
    pub runs: u64,
    pub seeds: Option<Vec<u64>>,
    #[serde(default = "default_field_order")]
    pub field_order: u16,
    #[serde(default)]
    pub mode: ModeName,
    pub sparsity: Option<f64>,
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
    pub ramp_len: Option<u32>,
    #[serde(default = "yes")]
    pub resample_zero: bool,
    #[serde(default)]
    pub seed: u64,
}

impl MulticastConfig {
    fn default_eps() -> Vec<f64> {
        vec![0.1]
    }
}

pub(super) fn multicast(c: &MulticastConfig) -> Result<Vec<u8>, CliError> {
    let f = field(c.field_order)?;
    let mode = coding_mode(c.mode, c.sparsity, c.t_start, c.t_end, c.ramp_len)?;
    check_geometry(c.k, c.payload_len, &f)?;
    if c.eps.is_empty() {
        return Err(invalid("eps: at least one receiver is required"));
    }
    for &e in &c.eps {
        check_eps("eps", e)?;
    }
    let max_slots = c.max_slots.unwrap_or(DEFAULT_MAX_SLOTS_PER_SOURCE * c.k as u64);
    if max_slots == 0 {
        return Err(invalid("max_slots must be at least 1"));
    }
    let seeds = session_seeds(&c.seeds, c.runs)?;
    let cfg = EncoderConfig::new(f.clone(), mode, 0).with_resample_zero(c.resample_zero);
    let receivers = ReceiverSpec::from_eps(&c.eps);

    let reports = seeds
        .par_iter()
        .map(|&s| {
            let session = session_seed(c.seed, s);
            let block = random_block(&f, c.k, c.payload_len, session);
            match c.n {
                Some(n) => run_fixed_n(&block, &cfg, &receivers, n, session),
                None => run_until_decoded(&block, &cfg, &receivers, max_slots, session),
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Runtime(e.to_string()))?;

    let mut out = csv_preamble("simulate multicast", c.seed, c);
    out.push_str(
        "seed,receiver,eps,slots_sent,packets_received,rank,decoded,slots_to_decode,session_slots,overhead_ratio,exhausted\n",
    );
    for (s, rep) in seeds.iter().zip(&reports) {
        for r in &rep.receivers {
            let _ = writeln!(
                out,
                "{s},{},{},{},{},{},{},{},{},{},{}",
                r.id,
                r.eps,
                r.slots_sent,
                r.packets_received,
                r.rank,
                r.decoded,
                opt(r.slots_to_decode),
                rep.slots,
                rep.overhead_ratio,
                rep.exhausted
            );
        }
    }
    Ok(out.into_bytes())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DuplicationConfig {
    #[serde(default = "default_sim_k")]
    pub k: usize,
    #[serde(default = "default_sim_payload")]
    pub payload_len: usize,
    #[serde(default = "DuplicationConfig::default_eps")]
    pub leg1_eps: f64,
    #[serde(default = "DuplicationConfig::default_eps")]
    pub leg2_eps: f64,
    #[serde(default = "DuplicationConfig::default_capacity")]
    pub leg1_capacity: u32,
    #[serde(default = "DuplicationConfig::default_capacity")]
    pub leg2_capacity: u32,
    #[serde(default = "DuplicationConfig::default_policies")]
    pub policies: Vec<PolicyName>,
    pub weights: Option<Vec<f64>>,
    pub layers: Option<Vec<usize>>,
    #[serde(default = "DuplicationConfig::default_scheme")]
    pub scheme: SchemeName,
    pub distribution: Option<Vec<f64>>,
    pub max_slots: Option<u64>,
    #[serde(default = "DuplicationConfig::default_runs")]
    pub runs: u64,
    pub seeds: Option<Vec<u64>>,
    #[serde(default = "default_field_order")]
    pub field_order: u16,
    #[serde(default)]
    pub mode: ModeName,
    pub sparsity: Option<f64>,
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
    pub ramp_len: Option<u32>,
    #[serde(default = "yes")]
    pub resample_zero: bool,
    #[serde(default)]
    pub seed: u64,
}

impl DuplicationConfig {
    fn default_eps() -> f64 {
        0.2
    }

    fn default_capacity() -> u32 {
        1
    }

    fn default_policies() -> Vec<PolicyName> {
        vec![PolicyName::Mirror, PolicyName::SplitRoundRobin, PolicyName::Weighted]
    }

    fn default_scheme() -> SchemeName {
        SchemeName::Ew
    }

    fn default_runs() -> u64 {
        200
    }
}

pub(super) fn duplication(c: &DuplicationConfig) -> Result<Vec<u8>, CliError> {
    let f = field(c.field_order)?;
    let mode = coding_mode(c.mode, c.sparsity, c.t_start, c.t_end, c.ramp_len)?;
    check_geometry(c.k, c.payload_len, &f)?;
    check_eps("leg1_eps", c.leg1_eps)?;
    check_eps("leg2_eps", c.leg2_eps)?;
    if c.leg1_capacity == 0 || c.leg2_capacity == 0 {
        return Err(invalid("leg capacities must be at least 1"));
    }
    let legs = [LegConfig::new(c.leg1_eps, c.leg1_capacity), LegConfig::new(c.leg2_eps, c.leg2_capacity)];
    if c.policies.is_empty() {
        return Err(invalid("policies: at least one policy is required"));
    }
    let weights = match &c.weights {
        Some(w) if w.len() == 2 && w.iter().all(|x| x.is_finite() && *x > 0.0) => Some([w[0], w[1]]),
        Some(w) => return Err(invalid(format!("weights: need two positive values, got {w:?}"))),
        None => None,
    };
    let policies: Vec<DupPolicy> = c
        .policies
        .iter()
        .map(|p| match p {
            PolicyName::Mirror => Ok(DupPolicy::Mirror),
            PolicyName::SplitRoundRobin => Ok(DupPolicy::SplitRoundRobin),
            PolicyName::Weighted => match weights {
                Some(w) => Ok(DupPolicy::Weighted { weights: w }),
                None if legs.iter().all(|l| l.eps < 1.0) => Ok(DupPolicy::weighted_by_delivery(&legs)),
                None => Err(invalid("weights: a dead leg needs explicit weights")),
            },
        })
        .collect::<Result<_, _>>()?;
    let uep = match &c.layers {
        None => None,
        Some(sizes) => {
            let layers = LayerProfile::new(sizes.clone()).map_err(|e| invalid(format!("layers: {e}")))?;
            if layers.k() != c.k {
                return Err(invalid(format!("layers: sizes sum to {} but k = {}", layers.k(), c.k)));
            }
            if mode == CodingMode::Systematic {
                return Err(invalid("mode: systematic coding cannot be combined with layers"));
            }
            let distribution = c.distribution.clone().unwrap_or_else(|| {
                WindowDistribution::uniform(layers.num_layers()).probs().to_vec()
            });
            WindowDistribution::new(distribution.clone()).map_err(|e| invalid(format!("distribution: {e}")))?;
            if distribution.len() != layers.num_layers() {
                return Err(invalid("distribution: one probability per layer is required"));
            }
            let scheme = match c.scheme {
                SchemeName::Now => WindowScheme::Now,
                SchemeName::Ew => WindowScheme::Ew,
            };
            Some(UepSetup { layers, scheme, distribution })
        }
    };
    let max_slots = c.max_slots.unwrap_or(DEFAULT_MAX_SLOTS_PER_SOURCE * c.k as u64);
    if max_slots == 0 {
        return Err(invalid("max_slots must be at least 1"));
    }
    let seeds = session_seeds(&c.seeds, c.runs)?;
    let sessions: Vec<u64> = seeds.iter().map(|&s| session_seed(c.seed, s)).collect();
    let params = BlockParams {
        k: c.k,
        payload_len: c.payload_len,
        encoder: EncoderConfig::new(f, mode, 0).with_resample_zero(c.resample_zero),
    };
    let table = compare_policies(&params, &legs, &policies, uep.as_ref(), &sessions, max_slots)
        .map_err(|e| CliError::Runtime(e.to_string()))?;

    let mut out = csv_preamble("simulate duplication", c.seed, c);
    out.push_str(
        "kind,policy,seed,decoded,slots_to_decode,slots_ci95,slots,packets_sent_1,packets_sent_2,\
         packets_received_1,packets_received_2,overhead_ratio,recovered_layers\n",
    );
    for summary in &table {
        let name = summary.policy.name();
        for (s, r) in seeds.iter().zip(&summary.runs) {
            let _ = writeln!(
                out,
                "run,{name},{s},{},{},,{},{},{},{},{},{},{}",
                r.decoded,
                opt(r.slots_to_decode),
                r.slots,
                r.packets_sent[0],
                r.packets_sent[1],
                r.packets_received[0],
                r.packets_received[1],
                r.overhead_ratio,
                r.recovered_layers
            );
        }
    }
    for summary in &table {
        let _ = writeln!(
            out,
            "summary,{},,{},{},{},,,,,,{},",
            summary.policy.name(),
            summary.decoded_fraction,
            summary.slots.mean,
            summary.slots.half_width,
            summary.overhead.mean
        );
    }
    Ok(out.into_bytes())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrapSolveConfig {
    pub instance: PathBuf,
    #[serde(default)]
    pub oracle: bool,
    #[serde(default = "GrapSolveConfig::default_n_max")]
    pub n_max: u64,
    /// Overrides the instance seed when given.
    pub seed: Option<u64>,
}

impl GrapSolveConfig {
    fn default_n_max() -> u64 {
        40
    }
}

fn solution_rows(out: &mut String, solver: &str, inst: &GrapInstance, s: &GrapSolution) {
    let _ = writeln!(out, "{solver},feasible,{},,{}", s.feasible, s.feasible);
    let _ = writeln!(out, "{solver},objective,{},,", s.objective);
    let _ = writeln!(out, "{solver},violated,{},,", opt(s.violated));
    for l in 0..inst.num_layers() {
        let _ = writeln!(out, "{solver},mcs_{},{},,", l + 1, s.mcs[l]);
        let _ = writeln!(out, "{solver},packets_{},{},,", l + 1, s.packets[l]);
    }
    if s.mcs.iter().all(|&m| m > 0) {
        let r = CoverageModel::new(inst).check(&s.mcs, &s.packets).expect("solver output has valid dimensions");
        for l in 0..inst.num_layers() {
            let (u, t) = (r.coverage[l], inst.target_users[l]);
            let _ = writeln!(out, "{solver},coverage_{},{u},{t},{}", l + 1, u >= t);
        }
        let _ = writeln!(out, "{solver},mcs_ordering,,,{}", r.ordering_ok);
        let _ = writeln!(out, "{solver},peak_frame_load,{},{},{}", r.peak_frame_load, inst.frame_capacity, r.capacity_ok);
        let _ = writeln!(out, "{solver},frames,{},{},{}", r.frames, inst.deadline, r.deadline_ok);
    }
}

pub(super) fn grap_solve(c: &GrapSolveConfig) -> Result<(Vec<u8>, Result<(), CliError>), CliError> {
    let text = std::fs::read_to_string(&c.instance)
        .map_err(|e| invalid(format!("cannot read {}: {e}", c.instance.display())))?;
    let mut inst = GrapInstance::from_toml(&text).map_err(invalid)?;
    if let Some(s) = c.seed {
        inst.seed = s;
    }
    if c.oracle {
        let size = crate::grap::search_space_size(&inst, c.n_max);
        if size > crate::grap::SEARCH_SPACE_LIMIT {
            return Err(invalid(format!(
                "n_max: search space of {size} candidates exceeds {}",
                crate::grap::SEARCH_SPACE_LIMIT
            )));
        }
    }

    let heuristic = heuristic_solve(&inst).map_err(invalid)?;
    let oracle = if c.oracle { Some(brute_force_solve(&inst, c.n_max).map_err(invalid)?) } else { None };

    let mut out = csv_preamble("grap solve", inst.seed, c);
    for line in inst.to_toml().lines().filter(|l| !l.is_empty()) {
        out.push_str("# instance: ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str("solver,item,value,bound,ok\n");
    solution_rows(&mut out, "heuristic", &inst, &heuristic);
    if let Some(b) = &oracle {
        solution_rows(&mut out, "brute_force", &inst, b);
        if heuristic.feasible && b.feasible {
            let _ = writeln!(out, "comparison,objective_gap,{},,{}", heuristic.objective - b.objective, heuristic.objective == b.objective);
        }
    }

    let primary = oracle.as_ref().unwrap_or(&heuristic);
    let status = if primary.feasible {
        Ok(())
    } else {
        Err(CliError::Infeasible(format!(
            "no feasible allocation found{}",
            primary.violated.map(|v| format!(" ({v} constraint)")).unwrap_or_default()
        )))
    };
    Ok((out.into_bytes(), status))
}
