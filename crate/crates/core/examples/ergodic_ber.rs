//! Channel-averaged BER for one scenario through the full per-realization
//! pipeline (phase design, receiver, analytic and simulated BER).
//!
//! ```bash
//! cargo run --release --example ergodic_ber
//! ```

use irspnc::analysis::{ergodic_ber, BerTarget, DetectionOptions, PhaseMode, Scenario, Scheme};
use irspnc::irsopt::SolverConfig;
use irspnc::model::{substream, SystemParams};

fn main() -> irspnc::Result<()> {
    for mode in [PhaseMode::None, PhaseMode::Random, PhaseMode::Optimal] {
        let scenario = Scenario {
            params: SystemParams::from_snr_db(-5.0, 8)?,
            phase_mode: mode,
            scheme: Scheme::Pnc,
            target: BerTarget::Relay,
            detection: DetectionOptions::default(),
            solver: SolverConfig { sdp_tol: 1e-4, ..SolverConfig::default() },
            trials: 5_000,
        };
        let out = ergodic_ber(&scenario, 20, &mut substream(1, &[]))?;
        let mc = out.monte_carlo.expect("trials > 0");
        println!(
            "{mode:>9}: analytic {:.4} ± {:.4}   MC {:.4} ± {:.4}   ({} skipped)",
            out.analytic.mean, out.analytic.std_error, mc.mean, mc.std_error, out.skipped
        );
    }
    Ok(())
}
