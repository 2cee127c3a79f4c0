//! End-to-end BER at D1 for PNC with each phase mode and the NNC baseline.
//!
//! ```bash
//! cargo run --release --example fig_d1_ber_vs_snr [REALIZATIONS] [OUT_DIR]
//! ```

use irspnc::analysis::{PhaseMode, Scheme};
use irspnc::harness::{run_and_write, Experiment, ExperimentConfig};

fn main() -> irspnc::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut cfg = ExperimentConfig::preset(Experiment::BerD1VsSnr);
    cfg.n_realizations = args.next().and_then(|a| a.parse().ok()).unwrap_or(20);
    cfg.output_path = args.next().unwrap_or_else(|| "out/d1".into()).into();
    cfg.trials_per_realization = 20_000;
    cfg.phase_mode = vec![PhaseMode::Optimal, PhaseMode::Random, PhaseMode::None];
    cfg.scheme = vec![Scheme::Pnc, Scheme::Nnc];
    cfg.solver.sdp_tol = 1e-4;

    let (curves, files) = run_and_write(&cfg, 0)?;
    println!("{} files under {}", files.len(), cfg.output_path.display());
    for s in &curves.series {
        let last = s.points.last().unwrap();
        println!(
            "{} {:>9}: BER at {} dB = {:.3e}",
            s.scheme,
            s.mode,
            last.x,
            last.analytic.map_or(f64::NAN, |a| a.mean)
        );
    }
    Ok(())
}
