//! One convexified penalty subproblem, solved by ADMM over unit-diagonal PSD
//! matrices, for a single-element IRS where the answer can be checked by
//! brute force.
//!
//! ```bash
//! cargo run --release --example inner_sdp
//! ```

use irspnc::beamform::{assemble_lifted_objective, mmse_beamformer};
use irspnc::irsopt::{extract_phases, solve_inner_sdp, LiftedMatrix, SolverConfig};
use irspnc::model::{effective_channel, gen_channels, substream, PhaseProfile, SystemParams};

fn main() -> irspnc::Result<()> {
    let params = SystemParams::from_snr_db(0.0, 1)?;
    let ch = gen_channels(&params, &mut substream(3, &[]));
    let start = PhaseProfile::ones(1);
    let g = mmse_beamformer(&effective_channel(&ch, &start)?, &params)?;
    let obj = assemble_lifted_objective(&g, &ch, &params)?;

    let v0 = LiftedMatrix::from_phases(&start);
    let v = solve_inner_sdp(&obj, 0.0, &v0, &SolverConfig::default())?;
    let theta = extract_phases(&v).angles()[0];
    println!("SDP objective {:.6} at θ = {theta:.4} rad", obj.value(v.as_matrix()));

    let (best, at) = (0..3600)
        .map(|k| k as f64 * std::f64::consts::TAU / 3600.0)
        .map(|t| (obj.value(LiftedMatrix::from_phases(&PhaseProfile::from_angles(&[t])).as_matrix()), t))
        .fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a });
    println!("grid minimum  {best:.6} at θ = {at:.4} rad");
    Ok(())
}
