//! Relay XOR detection: exact and soft-minimum LLRs on noisy sum/difference
//! streams, and how often their decisions agree.
//!
//! ```bash
//! cargo run --release --example xor_detection
//! ```

use irspnc::detect::{approx_llr_xor, decide_xor, exact_llr_xor, RelayObservation};
use irspnc::model::{substream, SymbolPair};
use irspnc::C64;
use rand_distr::{Distribution, StandardNormal};

fn main() -> irspnc::Result<()> {
    let mut rng = substream(9, &[]);
    let (s1, s2) = (0.7, 0.9);
    let n = 100_000;
    let (mut agree, mut err_exact, mut err_soft) = (0, 0, 0);
    for k in 0..n {
        let s = SymbolPair::random(&mut rng, 1.0);
        let [u, d] = s.sum_difference();
        let n1: f64 = StandardNormal.sample(&mut rng);
        let n2: f64 = StandardNormal.sample(&mut rng);
        let obs = RelayObservation::new([C64::from(u + s1 * n1), C64::from(d + s2 * n2)], [s1 * s1, s2 * s2], 1.0)?;
        let (le, ls) = (exact_llr_xor(&obs), approx_llr_xor(&obs));
        if k < 5 {
            println!("x⊕ = {:+}  exact {le:+.3}  soft-min {ls:+.3}", s.xor_symbol);
        }
        agree += (decide_xor(le) == decide_xor(ls)) as usize;
        err_exact += (decide_xor(le) != s.xor_symbol) as usize;
        err_soft += (decide_xor(ls) != s.xor_symbol) as usize;
    }
    println!("decision agreement {:.4}", agree as f64 / n as f64);
    println!("BER exact {:.4}, soft-min {:.4}", err_exact as f64 / n as f64, err_soft as f64 / n as f64);
    Ok(())
}
