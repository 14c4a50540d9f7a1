//! Closed-form decoding and outage probabilities and a Monte-Carlo delay estimate.

use rlnc::analytics::{avg_decoding_delay_mc, decode_prob_after_sent, decode_prob_given_received, mean_packets_to_decode, outage_prob};

fn main() {
    let k = 8;
    println!("q    P_d(K)   P_d(K+2)  E[packets]");
    for q in [2u16, 4, 16, 256] {
        println!(
            "{q:<4} {:.5}  {:.5}   {:.4}",
            decode_prob_given_received(k as u64, k, q),
            decode_prob_given_received(k as u64 + 2, k, q),
            mean_packets_to_decode(k, q)
        );
    }

    println!("\nN   P(decode | N sent, eps=0.2)   outage");
    for n in [8u64, 10, 12, 16] {
        println!("{n:<3} {:.6}                      {:.2e}", decode_prob_after_sent(n, k, 2, 0.2), outage_prob(n, k, 2, 0.2));
    }

    let est = avg_decoding_delay_mc(k, 2, 0.2, 50_000, 1).unwrap();
    println!(
        "\nmean slots to decode (q=2, eps=0.2): {:.3} +- {:.3}; closed form {:.3}",
        est.mean,
        est.half_width,
        mean_packets_to_decode(k, 2) / 0.8
    );
}
