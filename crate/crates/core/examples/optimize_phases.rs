//! Alternating optimisation of the IRS phases and the relay receiver for one
//! realization, against random and no-IRS baselines.
//!
//! ```bash
//! cargo run --release --example optimize_phases [M] [SNR_DB]
//! ```

use irspnc::beamform::{mmse_beamformer, mse_exact};
use irspnc::irsopt::{alternating_optimize, quantize_phases, random_phases, SolverConfig};
use irspnc::model::{effective_channel, gen_channels, substream, PhaseProfile, SystemParams};

fn main() -> irspnc::Result<()> {
    let mut args = std::env::args().skip(1);
    let m: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(16);
    let snr: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(-10.0);
    let params = SystemParams::from_snr_db(snr, m)?;
    let mut rng = substream(5, &[]);
    let ch = gen_channels(&params, &mut rng);

    let cfg = SolverConfig { sdp_tol: 1e-4, ..SolverConfig::default() };
    let t0 = std::time::Instant::now();
    let out = alternating_optimize(&ch, &params, &cfg)?;
    println!("M = {m}, SNR = {snr} dB: {} outer rounds in {:.2?}", out.outer_iterations, t0.elapsed());
    for (k, mse) in out.mse_history.iter().enumerate() {
        println!("  round {k:>2}  MSE {mse:.5}");
    }

    let mse_of = |v: &PhaseProfile| -> irspnc::Result<f64> {
        let h = effective_channel(&ch, v)?;
        Ok(mse_exact(&mmse_beamformer(&h, &params)?, &h, &params))
    };
    let no_irs = ch.without_irs();
    let h0 = effective_channel(&no_irs, &PhaseProfile::ones(m))?;
    println!("optimal   {:.5}", out.mse);
    println!("quantized {:.5}", mse_of(&quantize_phases(&out.phases))?);
    println!("random    {:.5}", mse_of(&random_phases(m, &mut rng))?);
    println!("no IRS    {:.5}", mse_exact(&mmse_beamformer(&h0, &params)?, &h0, &params));
    Ok(())
}
