//! Relay BER against SNR for M = 32 and all phase modes, written as `.dat`
//! tables. The optimal-versus-random SNR gap at BER 1e-2 is printed.
//!
//! ```bash
//! cargo run --release --example fig_relay_ber_vs_snr [REALIZATIONS] [OUT_DIR]
//! ```

use irspnc::analysis::{BerTarget, PhaseMode, Scheme};
use irspnc::harness::{crossing, parse_snr_range, run_and_write, Experiment, ExperimentConfig};

fn main() -> irspnc::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut cfg = ExperimentConfig::preset(Experiment::BerRelayVsSnr);
    cfg.n_realizations = args.next().and_then(|a| a.parse().ok()).unwrap_or(20);
    cfg.output_path = args.next().unwrap_or_else(|| "out/relay".into()).into();
    cfg.snr_db_range = parse_snr_range("-30:21:3")?;
    cfg.solver.sdp_tol = 1e-4;

    let (curves, files) = run_and_write(&cfg, 0)?;
    for f in &files {
        println!("wrote {}", f.display());
    }
    let at = |mode| {
        let s = curves.find(Scheme::Pnc, mode, BerTarget::Relay).unwrap();
        let xs: Vec<f64> = s.points.iter().map(|p| p.x).collect();
        let ys: Vec<f64> = s.points.iter().map(|p| p.analytic.map_or(f64::NAN, |a| a.mean)).collect();
        crossing(&xs, &ys, 1e-2)
    };
    if let (Some(opt), Some(rnd)) = (at(PhaseMode::Optimal), at(PhaseMode::Random)) {
        println!("BER 1e-2: optimal {opt:.2} dB, random {rnd:.2} dB, gain {:.2} dB", rnd - opt);
    }
    Ok(())
}
