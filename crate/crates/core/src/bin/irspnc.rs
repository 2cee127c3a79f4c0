use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use irspnc::analysis::{LlrKind, PhaseMode, Scheme};
use irspnc::beamform::BeamformerKind;
use irspnc::detect::{NoiseConvention, StreamScaling};
use irspnc::harness::{
    self, parse_snr_range, CurveSet, Experiment, ExperimentConfig, MAX_FAILURE_RATE,
};
use irspnc::irsopt::Gamma;
use irspnc::Error;

/// BER sweeps for IRS-assisted physical-layer network coding.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Relay XOR BER against SNR.
    BerRelayVsSnr(RunArgs),
    /// Relay XOR BER against the number of IRS elements.
    BerVsM(RunArgs),
    /// BER at destination D1 against SNR.
    BerD1VsSnr(RunArgs),
    /// One (SNR, M) point, relay and D1.
    Single(RunArgs),
    /// Re-run the config stored in a run manifest.
    Replay {
        manifest: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML or JSON config; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// IRS sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<usize>>,
    /// `A:B:STEP`, a value, or a comma list (`inf` allowed).
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<String>,
    #[arg(long, value_delimiter = ',')]
    phase_mode: Option<Vec<PhaseMode>>,
    #[arg(long, value_delimiter = ',')]
    scheme: Option<Vec<Scheme>>,
    /// Monte-Carlo trials per realization.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    beamformer: Option<BeamformerKind>,
    #[arg(long)]
    noise_convention: Option<NoiseConvention>,
    #[arg(long)]
    stream_scaling: Option<StreamScaling>,
    #[arg(long)]
    llr: Option<LlrKind>,
    /// `auto` or a fixed penalty weight.
    #[arg(long)]
    gamma: Option<Gamma>,
    /// Inner SDP relative tolerance.
    #[arg(long)]
    sdp_tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores). Does not affect results.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl RunArgs {
    fn config(&self, experiment: Experiment) -> irspnc::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::preset(experiment),
        };
        if cfg.experiment != experiment {
            return Err(Error::InvalidConfig(format!(
                "config is for `{}`, command is `{experiment}`",
                cfg.experiment
            )));
        }
        if let Some(m) = &self.m {
            cfg.m_list = m.clone();
        }
        if let Some(s) = &self.snr_db {
            cfg.snr_db_range = parse_snr_range(s)?;
        }
        if let Some(p) = &self.phase_mode {
            cfg.phase_mode = p.clone();
        }
        if let Some(s) = &self.scheme {
            cfg.scheme = s.clone();
        }
        set(&mut cfg.trials_per_realization, self.trials);
        set(&mut cfg.n_realizations, self.realizations);
        set(&mut cfg.seed, self.seed);
        set(&mut cfg.beamformer, self.beamformer);
        set(&mut cfg.noise_convention, self.noise_convention);
        set(&mut cfg.stream_scaling, self.stream_scaling);
        set(&mut cfg.llr, self.llr);
        set(&mut cfg.solver.gamma, self.gamma);
        set(&mut cfg.solver.sdp_tol, self.sdp_tol);
        if let Some(out) = &self.out {
            cfg.output_path = out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn report(curves: &CurveSet, files: &[PathBuf]) -> ExitCode {
    for f in files {
        println!("{}", f.display());
    }
    let capped: usize = curves.series.iter().flat_map(|s| &s.points).map(|p| p.outer_capped).sum();
    eprintln!(
        "optimisations: {} ({} failed, {} hit the outer cap across series)",
        curves.optimizations, curves.optimization_failures, capped
    );
    if curves.failure_rate() > MAX_FAILURE_RATE {
        eprintln!(
            "error: {:.1}% of phase optimisations failed",
            100.0 * curves.failure_rate()
        );
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Replay { manifest, out, threads } => harness::replay(&manifest, out.as_deref(), threads),
        cmd => {
            let (experiment, args) = match cmd {
                Command::BerRelayVsSnr(a) => (Experiment::BerRelayVsSnr, a),
                Command::BerVsM(a) => (Experiment::BerVsM, a),
                Command::BerD1VsSnr(a) => (Experiment::BerD1VsSnr, a),
                Command::Single(a) => (Experiment::Single, a),
                Command::Replay { .. } => unreachable!(),
            };
            args.config(experiment)
                .and_then(|cfg| harness::run_and_write(&cfg, args.threads))
        }
    };
    match result {
        Ok((curves, files)) => report(&curves, &files),
        Err(e @ Error::InvalidConfig(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
