//! Draws one Rayleigh realization, forms the effective channel for a few
//! phase profiles and pushes a symbol pair through the relay front end.
//!
//! ```bash
//! cargo run --release --example channel_model
//! ```

use irspnc::model::{
    effective_channel, gen_channels, relay_receive, substream, sum_difference_matrix, PhaseProfile,
    SymbolPair, SystemParams,
};
use irspnc::irsopt::random_phases;

fn main() -> irspnc::Result<()> {
    let params = SystemParams::from_snr_db(10.0, 8)?;
    let mut rng = substream(42, &[]);
    let ch = gen_channels(&params, &mut rng);

    let d = sum_difference_matrix();
    println!("D·D = {}", d * d);

    let direct = ch.h_ur.norm();
    let ones = effective_channel(&ch, &PhaseProfile::ones(8))?;
    let rand = effective_channel(&ch, &random_phases(8, &mut rng))?;
    println!("‖H‖_F  direct only {direct:.3}  all-ones {:.3}  random {:.3}", ones.norm(), rand.norm());

    let s = SymbolPair::from_bits(0, 1, params.amplitude());
    let r = relay_receive(&ones, &s.as_vector(), &params, &mut rng);
    println!("x = {:?}, x⊕ = {:+}", s.symbols, s.xor_symbol);
    println!("r = [{:.3}, {:.3}]", r[0], r[1]);
    Ok(())
}
