//! Relay BER at −15 dB against the number of IRS elements.
//!
//! ```bash
//! cargo run --release --example fig_ber_vs_m [REALIZATIONS] [OUT_DIR]
//! ```

use irspnc::analysis::PhaseMode;
use irspnc::harness::{run_and_write, Experiment, ExperimentConfig};

fn main() -> irspnc::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut cfg = ExperimentConfig::preset(Experiment::BerVsM);
    cfg.n_realizations = args.next().and_then(|a| a.parse().ok()).unwrap_or(10);
    cfg.output_path = args.next().unwrap_or_else(|| "out/vs-m".into()).into();
    cfg.m_list = vec![8, 16, 32, 64];
    cfg.phase_mode = vec![PhaseMode::Optimal, PhaseMode::Random, PhaseMode::None];
    cfg.solver.sdp_tol = 1e-4;

    let (curves, _) = run_and_write(&cfg, 0)?;
    for s in &curves.series {
        print!("{:>8}:", s.mode);
        for p in &s.points {
            print!("  M={} {:.2e}", p.x, p.analytic.map_or(f64::NAN, |a| a.mean));
        }
        println!();
    }
    Ok(())
}
