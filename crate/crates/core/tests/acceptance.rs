//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use rlnc::analytics::{decode_prob_after_sent, decode_prob_given_received, layered_decode_prob_ew_mc, Estimate};
use rlnc::channel::{run_fixed_n, run_until_decoded, ReceiverSpec};
use rlnc::codec::{make_generations, CodingMode, Decoder, Encoder, EncoderConfig, SourceBlock};
use rlnc::dupsim::{compare_policies, BlockParams, DupPolicy, LegConfig};
use rlnc::field::{reference_mul, Field};
use rlnc::grap::{brute_force_solve, heuristic_solve, random_micro_instance, GrapInstance, MicroInstanceSpec};
use rlnc::uep::{LayerProfile, UepDecoder, UepEncoder, WindowDistribution, WindowScheme};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn criterion_1() -> Outcome {
    let f = Field::gf256();
    for a in 0..=255u8 {
        for b in 0..=255u8 {
            let got = f.mul(a, b);
            let want = reference_mul(a, b, 0x11B, 8);
            ensure(got == want, format!("GF(256) {a} * {b} = {got}, oracle {want}"))?;
        }
    }
    for q in [2u16, 4, 16] {
        let f = Field::new(q).unwrap();
        let els: Vec<u8> = (0..q).map(|x| x as u8).collect();
        for &a in &els {
            ensure(f.add(a, 0) == a && f.mul(a, 1) == a, format!("GF({q}) identity fails at {a}"))?;
            ensure(f.add(a, a) == 0, format!("GF({q}) additive inverse fails at {a}"))?;
            if a != 0 {
                let inv = f.inv(a).unwrap();
                ensure(f.mul(a, inv) == 1, format!("GF({q}) inverse fails at {a}"))?;
            }
            for &b in &els {
                ensure(f.add(a, b) == f.add(b, a), format!("GF({q}) + not commutative"))?;
                ensure(f.mul(a, b) == f.mul(b, a), format!("GF({q}) * not commutative"))?;
                ensure(f.mul(a, b) < q as u8 || q == 256, format!("GF({q}) product out of range"))?;
                for &c in &els {
                    ensure(f.add(f.add(a, b), c) == f.add(a, f.add(b, c)), format!("GF({q}) + not associative"))?;
                    ensure(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)), format!("GF({q}) * not associative"))?;
                    ensure(
                        f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)),
                        format!("GF({q}) not distributive at ({a}, {b}, {c})"),
                    )?;
                }
            }
        }
    }
    Ok("65536 GF(256) products match the oracle; axioms hold for q = 2, 4, 16".into())
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut systematic_checked = 0;
    for trial in 0..1000u64 {
        let q = if rng.gen_bool(0.5) { 2 } else { 256 };
        let f = Field::new(q).unwrap();
        let k = rng.gen_range(1..=64);
        let payload_len = if q == 2 { 8 * rng.gen_range(1..=32) } else { rng.gen_range(1..=256) };
        let gen_bytes = k * payload_len * f.bits() as usize / 8;
        let len = rng.gen_range(0..=2 * gen_bytes + 1);
        let data: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
        let mode = match rng.gen_range(0..4) {
            0 => CodingMode::Standard,
            1 => CodingMode::Systematic,
            2 => CodingMode::Sparse { t: rng.gen_range(0.0..0.9) },
            _ => CodingMode::TunableSparse { t_start: 0.8, t_end: 0.2, ramp_len: k as u32 },
        };
        let gens = make_generations(&data, k, payload_len, &f).map_err(|e| e.to_string())?;
        let cfg = EncoderConfig::new(f.clone(), mode, trial);
        let mut blocks = Vec::new();
        for block in &gens.blocks {
            let mut enc = Encoder::new(block, cfg.clone()).map_err(|e| e.to_string())?;
            let mut dec = Decoder::for_block(f.clone(), block);
            let mut sent = 0u64;
            while !dec.is_complete() {
                let pkt = enc.next_packet();
                if mode == CodingMode::Systematic && (sent as usize) < k {
                    let j = sent as usize;
                    ensure(pkt.payload == block.packet(j), format!("trial {trial}: systematic packet {j} differs"))?;
                    ensure(
                        pkt.coding_vector.iter().enumerate().all(|(i, &c)| c == (i == j) as u8),
                        format!("trial {trial}: systematic coding vector {j} is not a unit vector"),
                    )?;
                    systematic_checked += 1;
                }
                dec.absorb(&pkt).map_err(|e| e.to_string())?;
                sent += 1;
                ensure(sent < 100 * k as u64 + 100, format!("trial {trial}: no full rank"))?;
            }
            blocks.push(dec.try_recover().ok_or("complete decoder without block")?);
        }
        let out = rlnc::codec::reassemble(&blocks, &f, gens.original_len);
        ensure(out == data, format!("trial {trial}: roundtrip mismatch"))?;
    }
    Ok(format!("1000 roundtrips byte-exact; {systematic_checked} systematic prefix packets verified"))
}

/// Rank of a GF(2) matrix whose rows are bitmasks.
fn gf2_rank(mut rows: Vec<u32>) -> usize {
    let mut rank = 0;
    for bit in 0..32 {
        let mask = 1u32 << bit;
        if let Some(p) = (rank..rows.len()).find(|&i| rows[i] & mask != 0) {
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (i, r) in rows.iter_mut().enumerate() {
                if i != rank && *r & mask != 0 {
                    *r ^= pivot;
                }
            }
            rank += 1;
        }
    }
    rank
}

fn criterion_3() -> Outcome {
    let mut checked = 0;
    for k in 1..=3usize {
        for n in 0..=6u32 {
            let total = 1u64 << (n as usize * k);
            let full = (0..total)
                .filter(|&bits| {
                    let rows = (0..n).map(|r| ((bits >> (r as usize * k)) & ((1 << k) - 1)) as u32).collect();
                    gf2_rank(rows) == k
                })
                .count() as u64;
            let enumerated = Ratio::new(full, total);
            let mut closed = Ratio::from_integer(1u64);
            for j in 0..k as u32 {
                if j >= n {
                    closed = Ratio::from_integer(0);
                    break;
                }
                let den = 1u64 << (n - j);
                closed *= Ratio::new(den - 1, den);
            }
            ensure(closed == enumerated, format!("K={k} n={n}: closed form {closed}, enumeration {enumerated}"))?;
            let float = decode_prob_given_received(n as u64, k, 2);
            let exact = *closed.numer() as f64 / *closed.denom() as f64;
            ensure(float == exact, format!("K={k} n={n}: library gives {float}, exact {exact}"))?;
            checked += 1;
        }
    }
    ensure(decode_prob_given_received(2, 2, 2) == 0.375, "P_d(2; K=2, q=2) != 0.375")?;
    Ok(format!("{checked} (K, n) points exact; P_d(2; K=2, q=2) = 0.375"))
}

fn criterion_4() -> Outcome {
    const SESSIONS: u64 = 100_000;
    let f = Field::gf2();
    let cfg = EncoderConfig::new(f.clone(), CodingMode::Standard, 0).with_resample_zero(false);
    let mut worst: f64 = 0.0;
    for eps in [0.1, 0.3, 0.5] {
        for big_n in [8u64, 12, 16, 24] {
            let decoded: u64 = (0..SESSIONS)
                .into_par_iter()
                .map(|s| {
                    let mut rng = ChaCha8Rng::seed_from_u64(s ^ (big_n << 40) ^ ((eps * 10.0) as u64) << 50);
                    let block = SourceBlock::random(0, 8, 8, &f, &mut rng).unwrap();
                    let rep = run_fixed_n(&block, &cfg, &[ReceiverSpec::new(0, eps)], big_n, rng.gen()).unwrap();
                    rep.receivers[0].decoded as u64
                })
                .sum();
            let p = decode_prob_after_sent(big_n, 8, 2, eps);
            let freq = decoded as f64 / SESSIONS as f64;
            let sigma = (p * (1.0 - p) / SESSIONS as f64).sqrt();
            let z = if sigma > 0.0 { (freq - p).abs() / sigma } else { (freq - p).abs() * f64::INFINITY };
            worst = worst.max(if z.is_nan() { 0.0 } else { z });
            ensure(
                (freq - p).abs() <= 3.0 * sigma,
                format!("eps={eps} N={big_n}: frequency {freq}, closed form {p}, {z:.2} sigma"),
            )?;
        }
    }
    Ok(format!("12 grid points within 3 sigma (worst {worst:.2} sigma)"))
}

fn criterion_5() -> Outcome {
    const DRAWS: usize = 100_000;
    const K: usize = 10;
    let f = Field::gf256();
    let chi = ChiSquared::new(254.0).unwrap();
    let block = SourceBlock::new(0, vec![vec![0u8; 1]; K]).unwrap();
    let mut details = Vec::new();
    for t in [0.3, 0.7, 0.9] {
        let cfg = EncoderConfig::new(f.clone(), CodingMode::Sparse { t }, 5).with_resample_zero(false);
        let mut enc = Encoder::new(&block, cfg).map_err(|e| e.to_string())?;
        let mut counts = [0u64; 256];
        for _ in 0..DRAWS / K {
            for c in enc.next_packet().coding_vector {
                counts[c as usize] += 1;
            }
        }
        let zero_rate = counts[0] as f64 / DRAWS as f64;
        let sigma = (t * (1.0 - t) / DRAWS as f64).sqrt();
        ensure(
            (zero_rate - t).abs() <= 4.0 * sigma,
            format!("t={t}: zero rate {zero_rate}, {:.2} sigma", (zero_rate - t).abs() / sigma),
        )?;
        let nonzero: u64 = counts[1..].iter().sum();
        let expected = nonzero as f64 / 255.0;
        let stat: f64 = counts[1..].iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        let p_value = 1.0 - chi.cdf(stat);
        ensure(p_value > 1e-3, format!("t={t}: nonzero values fail uniformity, p = {p_value:.2e}"))?;
        details.push(format!("t={t}: zero rate {zero_rate:.4}, chi2 p={p_value:.3}"));
    }
    Ok(details.join("; "))
}

/// Dimension of `rowspace(rows) ∩ span(e_0..e_{end})` equals `end` exactly
/// when every source packet of `0..end` is decodable.
fn prefix_decodable(f: &Field, rows: &[Vec<u8>], end: usize) -> bool {
    let rank = |cols: std::ops::Range<usize>| {
        let mut m: Vec<Vec<u8>> = rows.iter().map(|r| r[cols.clone()].to_vec()).collect();
        let width = cols.len();
        let mut rank = 0;
        for c in 0..width {
            let Some(p) = (rank..m.len()).find(|&i| m[i][c] != 0) else { continue };
            m.swap(rank, p);
            let inv = f.inv(m[rank][c]).unwrap();
            f.scale(inv, &mut m[rank]);
            let pivot = m[rank].clone();
            for (i, r) in m.iter_mut().enumerate() {
                if i != rank && r[c] != 0 {
                    let coeff = r[c];
                    f.axpy(coeff, &pivot, r).unwrap();
                }
            }
            rank += 1;
        }
        rank
    };
    let k = rows.first().map_or(0, Vec::len);
    if rows.is_empty() {
        return end == 0;
    }
    rank(0..k) - rank(end..k) == end
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checks = 0u64;
    for session in 0..500u64 {
        let q = [2u16, 4, 16, 256][rng.gen_range(0..4)];
        let f = Field::new(q).unwrap();
        let layers = rng.gen_range(1..=4);
        let sizes: Vec<usize> = (0..layers).map(|_| rng.gen_range(1..=5)).collect();
        let profile = LayerProfile::new(sizes).unwrap();
        let raw: Vec<f64> = (0..layers).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let dist = WindowDistribution::new(raw.iter().map(|w| w / total).collect()).unwrap();
        let eps = rng.gen_range(0.0..0.6);
        let payload_len = 8;
        let block = SourceBlock::random(0, profile.k(), payload_len, &f, &mut rng).unwrap();
        let cfg = EncoderConfig::new(f.clone(), CodingMode::Standard, session);
        let mut enc = UepEncoder::new(&block, profile.clone(), WindowScheme::Ew, dist, cfg).map_err(|e| e.to_string())?;
        let mut dec = UepDecoder::new(f.clone(), profile.clone(), WindowScheme::Ew, payload_len, 0).unwrap();
        let mut rows = Vec::new();
        for _ in 0..3 * profile.k() {
            let pkt = enc.next_packet();
            if rng.gen::<f64>() < eps {
                continue;
            }
            rows.push(pkt.coding_vector.clone());
            dec.absorb(&pkt).map_err(|e| e.to_string())?;
            for w in 0..layers {
                let end = profile.layer_range(w).end;
                let oracle = prefix_decodable(&f, &rows, end);
                ensure(
                    dec.window_recovered(w) == oracle,
                    format!("session {session}: window {w} recovered = {}, oracle {oracle}", dec.window_recovered(w)),
                )?;
                if dec.window_recovered(w) {
                    ensure(dec.recovered_layers() > w, format!("session {session}: window {w} without its prefix"))?;
                }
                checks += 1;
            }
        }
    }

    for (ks, n, eps) in [(vec![2, 3, 3], vec![3, 4, 4], 0.2), (vec![4, 4], vec![5, 5], 0.3), (vec![1, 1, 1, 1], vec![1, 1, 2, 2], 0.1)] {
        let profile = LayerProfile::new(ks).unwrap();
        let est = layered_decode_prob_ew_mc(&n, &profile, 4, &vec![eps; n.len()], 4000, 66).map_err(|e| e.to_string())?;
        ensure(est.windows(2).all(|w| w[0].mean >= w[1].mean), format!("prefix probabilities not monotone: {est:?}"))?;
    }

    const SEEDS: u64 = 10_000;
    let f = Field::new(4).unwrap();
    let k = 8;
    let slots = |layered: bool, s: u64| -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let block = SourceBlock::random(0, k, 4, &f, &mut rng).unwrap();
        let cfg = EncoderConfig::new(f.clone(), CodingMode::Standard, rng.gen());
        let mut erasure = ChaCha8Rng::seed_from_u64(rng.gen());
        let mut next: Box<dyn FnMut() -> rlnc::codec::CodedPacket> = if layered {
            let mut enc = UepEncoder::new(&block, LayerProfile::single(k), WindowScheme::Ew, WindowDistribution::uniform(1), cfg)
                .unwrap();
            Box::new(move || enc.next_packet())
        } else {
            let mut enc = Encoder::new(&block, cfg).unwrap();
            Box::new(move || enc.next_packet())
        };
        let mut dec = Decoder::for_block(f.clone(), &block);
        let mut t = 0;
        while !dec.is_complete() {
            t += 1;
            let pkt = next();
            if erasure.gen::<f64>() >= 0.2 {
                let mut p = pkt;
                p.window_id = 0;
                dec.absorb(&p).unwrap();
            }
        }
        t
    };
    let layered: Vec<u64> = (0..SEEDS).into_par_iter().map(|s| slots(true, s)).collect();
    let plain_same: Vec<u64> = (0..SEEDS).into_par_iter().map(|s| slots(false, s)).collect();
    let plain_other: Vec<u64> = (SEEDS..2 * SEEDS).into_par_iter().map(|s| slots(false, s)).collect();
    ensure(layered == plain_same, "one-layer UEP differs from plain coding on identical seeds")?;
    let (stat, df) = homogeneity(&layered, &plain_other);
    let p_value = 1.0 - ChiSquared::new(df as f64).unwrap().cdf(stat);
    ensure(p_value > 1e-3, format!("one-layer UEP vs plain: chi2 homogeneity p = {p_value:.2e}"))?;
    Ok(format!("{checks} window checks agree with the rank oracle; one-layer UEP homogeneity p={p_value:.3}"))
}

/// Two-sample chi-square homogeneity statistic over pooled bins with at least
/// 5 expected counts per sample.
fn homogeneity(a: &[u64], b: &[u64]) -> (f64, usize) {
    let max = *a.iter().chain(b).max().unwrap();
    let mut ca = vec![0f64; max as usize + 1];
    let mut cb = vec![0f64; max as usize + 1];
    a.iter().for_each(|&x| ca[x as usize] += 1.0);
    b.iter().for_each(|&x| cb[x as usize] += 1.0);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (x, y) in ca.iter().zip(&cb) {
        acc.0 += x;
        acc.1 += y;
        let pooled = acc.0 + acc.1;
        if pooled * na.min(nb) / (na + nb) >= 5.0 {
            bins.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if let Some(last) = bins.last_mut() {
        last.0 += acc.0;
        last.1 += acc.1;
    }
    let stat = bins
        .iter()
        .map(|&(x, y)| {
            let p = (x + y) / (na + nb);
            (x - na * p).powi(2) / (na * p) + (y - nb * p).powi(2) / (nb * p)
        })
        .sum();
    (stat, bins.len().saturating_sub(1).max(1))
}

/// Success probability after `big_n` transmissions, summed directly.
fn success_prob(big_n: u64, k: usize, q: u16, eps: f64) -> f64 {
    let mut total = 0.0;
    for n in k as u64..=big_n {
        let mut binom = 1.0;
        for i in 0..n {
            binom *= (big_n - i) as f64 / (i + 1) as f64;
        }
        let full: f64 = (0..k).map(|j| 1.0 - (q as f64).powf(j as f64 - n as f64)).product();
        total += binom * (1.0 - eps).powi(n as i32) * eps.powi((big_n - n) as i32) * full;
    }
    total
}

/// Recomputes every constraint from the instance data alone.
fn verify(inst: &GrapInstance, mcs: &[usize], packets: &[u64]) -> Result<(), String> {
    ensure(mcs.windows(2).all(|w| w[0] < w[1]), format!("MCS {mcs:?} not strictly increasing"))?;
    ensure(mcs.iter().all(|&m| (1..=inst.mcs.costs.len()).contains(&m)), "MCS index out of range")?;
    for (l, &target) in inst.target_users.iter().enumerate() {
        let covered = (0..inst.mcs.erasure.len())
            .filter(|&u| {
                (0..=l)
                    .map(|i| success_prob(packets[i], inst.layer_sizes[i], inst.field_order, inst.mcs.erasure[u][mcs[i] - 1]))
                    .product::<f64>()
                    >= inst.prob_threshold - 1e-9
            })
            .count();
        ensure(covered >= target, format!("layer {}: {covered} users covered, target {target}", l + 1))?;
    }
    let unit = |m: usize| match inst.capacity_unit {
        rlnc::grap::CapacityUnit::ResourceUnits => inst.mcs.costs[m - 1],
        rlnc::grap::CapacityUnit::Packets => 1,
    };
    let load: u64 = mcs.iter().zip(packets).map(|(&m, &n)| n * unit(m)).sum();
    let frames = load.div_ceil(inst.frame_capacity);
    ensure(frames <= inst.deadline, format!("{frames} frames exceed deadline {}", inst.deadline))?;
    if load > 0 {
        let largest = mcs.iter().zip(packets).filter(|(_, &n)| n > 0).map(|(&m, _)| unit(m)).max().unwrap();
        let peak = load.div_ceil(frames).max(largest);
        ensure(peak <= inst.frame_capacity, format!("peak frame load {peak} exceeds {}", inst.frame_capacity))?;
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    let spec = MicroInstanceSpec::default();
    let (mut feasible, mut equal, mut both) = (0, 0, 0);
    for s in 0..50u64 {
        let inst = random_micro_instance(&spec, 7_000 + s);
        let h = heuristic_solve(&inst).map_err(|e| e.to_string())?;
        let b = brute_force_solve(&inst, 40).map_err(|e| e.to_string())?;
        if h.feasible {
            feasible += 1;
            verify(&inst, &h.mcs, &h.packets).map_err(|e| format!("instance {s}: heuristic solution fails: {e}"))?;
            ensure(b.feasible, format!("instance {s}: heuristic feasible but brute force is not"))?;
        }
        if b.feasible {
            verify(&inst, &b.mcs, &b.packets).map_err(|e| format!("instance {s}: brute-force solution fails: {e}"))?;
        }
        if h.feasible && b.feasible {
            both += 1;
            ensure(
                h.objective >= b.objective,
                format!("instance {s}: heuristic {} below optimum {}", h.objective, b.objective),
            )?;
            equal += (h.objective == b.objective) as u32;
        }
    }
    Ok(format!(
        "{feasible}/50 heuristic solutions feasible and re-verified; optimum matched on {equal}/{both} ({:.0}%)",
        if both > 0 { 100.0 * equal as f64 / both as f64 } else { 0.0 }
    ))
}

fn criterion_8() -> Outcome {
    let f = Field::gf256();
    let params = BlockParams { k: 16, payload_len: 16, encoder: EncoderConfig::new(f.clone(), CodingMode::Standard, 0) };
    let seeds: Vec<u64> = (0..400).collect();
    let legs = [LegConfig::new(0.2, 1), LegConfig::new(0.2, 1)];
    let table = compare_policies(&params, &legs, &[DupPolicy::Mirror, DupPolicy::SplitRoundRobin], None, &seeds, 1600)
        .map_err(|e| e.to_string())?;
    let (mirror, split) = (&table[0].slots, &table[1].slots);
    ensure(table.iter().all(|t| t.decoded_fraction == 1.0), "not every run decoded")?;
    ensure(split.mean <= mirror.mean, format!("split mean {} above mirror mean {}", split.mean, mirror.mean))?;
    ensure(split.upper() < mirror.lower(), format!("CIs overlap: split {split:?}, mirror {mirror:?}"))?;

    let dead = [LegConfig::new(0.2, 1), LegConfig::new(1.0, 1)];
    let many: Vec<u64> = (0..4000).collect();
    let dead_mirror = compare_policies(&params, &dead, &[DupPolicy::Mirror], None, &many, 1600).map_err(|e| e.to_string())?;
    let single: Vec<f64> = many
        .par_iter()
        .map(|&s| {
            let block = rlnc::dupsim::seeded_block(&f, 16, 16, s + 1_000_000).unwrap();
            let rep = run_until_decoded(&block, &params.encoder, &[ReceiverSpec::new(0, 0.2)], 1600, s + 1_000_000).unwrap();
            rep.receivers[0].slots_to_decode.unwrap() as f64
        })
        .collect();
    let single = Estimate::from_samples(&single);
    let dm = &dead_mirror[0].slots;
    let z = (dm.mean - single.mean).abs() / (dm.std_error().powi(2) + single.std_error().powi(2)).sqrt();
    ensure(z <= 3.0, format!("dead-leg mirror {} vs single channel {} ({z:.2} sigma)", dm.mean, single.mean))?;
    Ok(format!(
        "split {:.2} [{:.2}, {:.2}] vs mirror {:.2} [{:.2}, {:.2}]; dead-leg mirror {:.3} vs single {:.3} ({z:.2} sigma)",
        split.mean,
        split.lower(),
        split.upper(),
        mirror.mean,
        mirror.lower(),
        mirror.upper(),
        dm.mean,
        single.mean
    ))
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let data: Vec<u8> = (0..5000).map(|_| rng.gen()).collect();
    std::fs::write(path("input.bin"), &data).unwrap();
    let mut inst = random_micro_instance(&MicroInstanceSpec::default(), 3);
    inst.scheme = WindowScheme::Ew;
    std::fs::write(path("instance.toml"), inst.to_toml()).unwrap();
    std::fs::write(path("analyze.toml"), "k = 4\nfield_order = 2\neps = [0.1, 0.3]\n").unwrap();

    let commands: Vec<(&str, Vec<String>)> = vec![
        ("encode", vec!["encode".into(), path("input.bin"), "-k".into(), "8".into(), "--payload-len".into(), "32".into()]),
        ("analyze", vec!["analyze".into(), "--config".into(), path("analyze.toml"), "--trials".into(), "2000".into()]),
        ("simulate multicast", "simulate multicast -k 8 --eps 0.1,0.3,0.5 --runs 50".split(' ').map(String::from).collect()),
        ("simulate duplication", "simulate duplication -k 8 --runs 50 --layers 4,4".split(' ').map(String::from).collect()),
        ("grap solve", vec!["grap".into(), "solve".into(), path("instance.toml"), "--oracle".into(), "--n-max".into(), "10".into()]),
    ];
    let run = |name: &str, args: &[String], out: &str| -> Result<(i32, Vec<u8>), String> {
        let mut argv = vec!["rlnc".to_string(), "--seed".into(), "42".into(), "--out".into(), out.into()];
        argv.extend_from_slice(args);
        let code = rlnc::cli::main_with_args(&argv);
        let bytes = std::fs::read(out).map_err(|e| format!("{name}: no output ({e}), exit {code}"))?;
        Ok((code, bytes))
    };
    let mut summary = Vec::new();
    for (name, args) in &commands {
        let (c1, first) = run(name, args, &path("a.out"))?;
        let (c2, second) = run(name, args, &path("b.out"))?;
        ensure(c1 == c2 && (c1 == 0 || (*name == "grap solve" && c1 == 3)), format!("{name}: exit codes {c1}, {c2}"))?;
        ensure(first == second, format!("{name}: outputs differ"))?;
        summary.push(format!("{name} ({} B)", first.len()));
        if *name == "encode" {
            std::fs::copy(path("a.out"), path("packets.rlnc")).unwrap();
        }
    }
    let decode = vec!["decode".to_string(), path("packets.rlnc")];
    let (c1, first) = run("decode", &decode, &path("a.out"))?;
    let (c2, second) = run("decode", &decode, &path("b.out"))?;
    ensure(c1 == 0 && c2 == 0 && first == second, "decode: runs differ or fail")?;
    ensure(first == data, "decode: output differs from the encoded input")?;
    summary.push(format!("decode ({} B)", first.len()));
    Ok(format!("identical outputs: {}", summary.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 9] = [
        ("field exactness", criterion_1, 5),
        ("codec roundtrip", criterion_2, 60),
        ("decoding probability vs enumeration", criterion_3, 10),
        ("decoding probability vs Monte Carlo", criterion_4, 180),
        ("sparse sampling law", criterion_5, 30),
        ("layered window semantics", criterion_6, 120),
        ("allocation heuristic vs exhaustive optimum", criterion_7, 300),
        ("coded duplication advantage", criterion_8, 120),
        ("CLI determinism", criterion_9, 60),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > Duration::from_secs(*budget) => Err(format!("took {elapsed:.1?}, budget {budget} s")),
            o => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} [{elapsed:.1?}] {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} [{elapsed:.1?}] {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
