//! Runs a small sweep, then replays it from its manifest on a different
//! number of threads and checks the data files are byte-identical.
//!
//! ```bash
//! cargo run --release --example replay_manifest
//! ```

use irspnc::analysis::PhaseMode;
use irspnc::harness::{parse_snr_range, replay, run_and_write, Experiment, ExperimentConfig, MANIFEST_FILE};

fn main() -> irspnc::Result<()> {
    let root = std::env::temp_dir().join("irspnc-replay-demo");
    let mut cfg = ExperimentConfig::preset(Experiment::BerRelayVsSnr);
    cfg.snr_db_range = parse_snr_range("-10:10:5")?;
    cfg.m_list = vec![4];
    cfg.phase_mode = vec![PhaseMode::Optimal, PhaseMode::Random];
    cfg.n_realizations = 8;
    cfg.trials_per_realization = 2_000;
    cfg.solver.sdp_tol = 1e-4;
    cfg.output_path = root.join("first");

    let (_, files) = run_and_write(&cfg, 1)?;
    let again = root.join("replayed");
    replay(&cfg.output_path.join(MANIFEST_FILE), Some(&again), 4)?;
    for f in files {
        let name = f.file_name().unwrap();
        let same = std::fs::read(&f)? == std::fs::read(again.join(name))?;
        println!("{:<40} {}", name.to_string_lossy(), if same { "identical" } else { "DIFFERENT" });
    }
    Ok(())
}
