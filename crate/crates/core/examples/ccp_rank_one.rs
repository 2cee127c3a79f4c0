//! The rank-one penalty loop: picks the penalty weight automatically, then
//! shows the penalised objective and rank gap per iteration.
//!
//! ```bash
//! cargo run --release --example ccp_rank_one
//! ```

use irspnc::beamform::{assemble_lifted_objective, mmse_beamformer};
use irspnc::irsopt::{ccp_optimize, SolverConfig};
use irspnc::model::{effective_channel, gen_channels, substream, PhaseProfile, SystemParams};

fn main() -> irspnc::Result<()> {
    let m = 8;
    let params = SystemParams::from_snr_db(-5.0, m)?;
    let ch = gen_channels(&params, &mut substream(11, &[]));
    let start = PhaseProfile::ones(m);
    let g = mmse_beamformer(&effective_channel(&ch, &start)?, &params)?;
    let obj = assemble_lifted_objective(&g, &ch, &params)?;

    let out = ccp_optimize(&obj, &SolverConfig::default(), &start)?;
    println!("γ = {:.3e}, {} iterations, converged: {}", out.gamma, out.iterations, out.converged);
    for (k, f) in out.history.iter().enumerate() {
        println!("{k:>3}  penalised objective {f:.8}");
    }
    println!("relative rank gap {:.2e}", out.v.relative_rank_gap()?);
    Ok(())
}
