//! Closed-form relay XOR BER next to the exact soft-minimum detector error,
//! and the odd-error combination at D1.
//!
//! ```bash
//! cargo run --release --example ber_closed_forms
//! ```

use irspnc::analysis::{d1_ber_combine, link_ber, relay_xor_ber, softmin_xor_ber_exact, LinkBerSet};

fn main() -> irspnc::Result<()> {
    println!("{:>6} {:>6} {:>12} {:>12}", "σ1", "σ2", "closed form", "exact");
    for (s1, s2) in [(0.5, 0.5), (0.8, 0.8), (0.8, 1.0), (1.0, 1.0), (1.5, 1.5), (0.3, 1.2)] {
        println!(
            "{s1:>6} {s2:>6} {:>12.6} {:>12.6}",
            relay_xor_ber(s1, s2, 1.0),
            softmin_xor_ber_exact(s1, s2, 1.0)
        );
    }
    let links = LinkBerSet::new(relay_xor_ber(0.5, 0.5, 1.0), link_ber(0.1, 1.0), link_ber(0.05, 1.0))?;
    println!("{links:?}");
    println!("P(D1 wrong) = {:.6}", d1_ber_combine(&links));
    Ok(())
}
