use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Experiment, ExperimentConfig, SnrDb};
use crate::analysis::{
    evaluate_realization, BerTarget, Estimate, PhaseDesign, PhaseMode, RealizationBer, Scheme,
};
use crate::irsopt::alternating_optimize;
use crate::model::{gen_channels, substream, SystemParams};
use crate::Result;

// Substream tags. Channels and random phases depend only on (M, realization)
// so every SNR point and phase mode sees the same draws; noise is keyed by the
// SNR value too, but never by mode, scheme or position in the sweep, so runs
// with different grids or mode lists still share draws where they overlap.
const TAG_CHANNEL: u64 = 0;
const TAG_PHASES: u64 = 1;
const TAG_NOISE: u64 = 2;

/// One curve: a (scheme, phase mode, target) combination across the sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub scheme: Scheme,
    pub mode: PhaseMode,
    pub target: BerTarget,
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// SNR in dB or `M`, depending on the experiment.
    pub x: f64,
    /// `None` when every realization at this point failed.
    pub analytic: Option<Estimate>,
    pub monte_carlo: Option<Estimate>,
    pub mc_errors: u64,
    pub used: usize,
    pub skipped: usize,
    pub outer_capped: usize,
}

impl CurvePoint {
    /// Fewer than 100 simulated errors: the MC value is statistically weak.
    pub fn low_count(&self) -> bool {
        self.mc_errors < super::MIN_ERRORS
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSet {
    pub experiment: Experiment,
    pub series: Vec<Series>,
    /// Phase optimisations attempted / failed over the whole run.
    pub optimizations: usize,
    pub optimization_failures: usize,
}

impl CurveSet {
    pub fn failure_rate(&self) -> f64 {
        self.optimization_failures as f64 / self.optimizations.max(1) as f64
    }

    pub fn find(&self, scheme: Scheme, mode: PhaseMode, target: BerTarget) -> Option<&Series> {
        self.series
            .iter()
            .find(|s| s.scheme == scheme && s.mode == mode && s.target == target)
    }
}

#[derive(Debug, Clone, Copy)]
struct SweepPoint {
    snr: SnrDb,
    m: usize,
    m_index: usize,
}

fn sweep_points(cfg: &ExperimentConfig) -> Vec<SweepPoint> {
    let mut pts = Vec::new();
    for (m_index, &m) in cfg.m_list.iter().enumerate() {
        for &snr in &cfg.snr_db_range {
            pts.push(SweepPoint { snr, m, m_index });
        }
    }
    pts
}

fn sweep_x(experiment: Experiment, p: &SweepPoint) -> f64 {
    match experiment {
        Experiment::BerVsM => p.m as f64,
        _ => p.snr.0,
    }
}

type SeriesKey = (Scheme, PhaseMode, BerTarget);

struct TaskResult {
    optimized: bool,
    optimization_failed: bool,
    /// `None` where the realization was skipped for that series.
    per_series: Vec<Option<(RealizationBer, bool)>>,
}

/// Runs the experiment's sweep on the current rayon pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<CurveSet> {
    run_sweep(cfg, cfg.experiment.targets())
}

/// [`run_experiment`] with explicit BER targets, so that relay and `D1`
/// curves can share one set of phase optimisations.
pub fn run_sweep(cfg: &ExperimentConfig, targets: &[BerTarget]) -> Result<CurveSet> {
    cfg.validate()?;
    let keys: Vec<SeriesKey> = cfg
        .scheme
        .iter()
        .flat_map(|&s| cfg.phase_mode.iter().flat_map(move |&m| targets.iter().map(move |&t| (s, m, t))))
        .collect();
    let points = sweep_points(cfg);
    let n = cfg.n_realizations;
    let tasks: Vec<(usize, usize)> = (0..points.len()).flat_map(|p| (0..n).map(move |i| (p, i))).collect();

    let results: Vec<TaskResult> = tasks
        .par_iter()
        .map(|&(p, i)| run_task(cfg, &points[p], i, &keys))
        .collect::<Result<_>>()?;

    let mut series: Vec<Series> = keys
        .iter()
        .map(|&(scheme, mode, target)| Series {
            scheme,
            mode,
            target,
            points: Vec::with_capacity(points.len()),
        })
        .collect();
    for (p, pt) in points.iter().enumerate() {
        let chunk = &results[p * n..(p + 1) * n];
        for (k, s) in series.iter_mut().enumerate() {
            let (mut analytic, mut mc) = (Vec::new(), Vec::new());
            let (mut errors, mut skipped, mut capped) = (0, 0, 0);
            for r in chunk {
                match &r.per_series[k] {
                    Some((ber, was_capped)) => {
                        analytic.push(ber.analytic);
                        mc.extend(ber.mc());
                        errors += ber.mc_errors;
                        capped += *was_capped as usize;
                    }
                    None => skipped += 1,
                }
            }
            s.points.push(CurvePoint {
                x: sweep_x(cfg.experiment, pt),
                analytic: Estimate::from_samples(&analytic),
                monte_carlo: Estimate::from_samples(&mc),
                mc_errors: errors,
                used: analytic.len(),
                skipped,
                outer_capped: capped,
            });
        }
    }
    Ok(CurveSet {
        experiment: cfg.experiment,
        series,
        optimizations: results.iter().filter(|r| r.optimized).count(),
        optimization_failures: results.iter().filter(|r| r.optimization_failed).count(),
    })
}

fn run_task(
    cfg: &ExperimentConfig,
    pt: &SweepPoint,
    i: usize,
    keys: &[SeriesKey],
) -> Result<TaskResult> {
    let noise_var = if pt.snr.0 == f64::INFINITY {
        0.0
    } else {
        cfg.p_tx * 10f64.powf(-pt.snr.0 / 10.0)
    };
    let params = SystemParams::new(cfg.p_tx, noise_var, pt.m)?;
    let (m_idx, i) = (pt.m_index as u64, i as u64);
    let ch = gen_channels(&params, &mut substream(cfg.seed, &[TAG_CHANNEL, m_idx, i]));

    let optimized = cfg.phase_mode.iter().any(|m| m.needs_optimization());
    let optimal = if optimized {
        match alternating_optimize(&ch, &params, &cfg.solver) {
            Ok(out) => Some(Ok((out.phases, !out.converged))),
            Err(e) if e.is_realization_failure() => Some(Err(e)),
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let detection = cfg.detection();
    let mut per_series = Vec::with_capacity(keys.len());
    for &(scheme, mode, target) in keys {
        let opt = match (&optimal, mode.needs_optimization()) {
            (Some(Err(_)), true) => {
                per_series.push(None);
                continue;
            }
            (Some(Ok((v, capped))), true) => Some((v, *capped)),
            _ => None,
        };
        let design = PhaseDesign::for_mode(mode, pt.m, opt, &mut substream(cfg.seed, &[TAG_PHASES, m_idx, i]));
        let mut noise = substream(cfg.seed, &[TAG_NOISE, m_idx, pt.snr.0.to_bits(), i]);
        let r = evaluate_realization(
            &ch,
            design.phases.as_ref(),
            &params,
            scheme,
            target,
            &detection,
            cfg.trials_per_realization,
            &mut noise,
        );
        per_series.push(match r {
            Ok(ber) => Some((ber, design.outer_capped)),
            Err(e) if e.is_realization_failure() => None,
            Err(e) => return Err(e),
        });
    }
    Ok(TaskResult {
        optimized,
        optimization_failed: matches!(optimal, Some(Err(_))),
        per_series,
    })
}

/// SNR at which a decreasing curve crosses `level`, by linear interpolation of
/// `log10(BER)` between neighbouring points. `None` if it never crosses.
pub fn crossing(xs: &[f64], ys: &[f64], level: f64) -> Option<f64> {
    let target = level.log10();
    xs.windows(2).zip(ys.windows(2)).find_map(|(x, y)| {
        if y[0] >= level && y[1] < level && y[1] > 0.0 {
            let (l0, l1) = (y[0].log10(), y[1].log10());
            Some(x[0] + (target - l0) / (l1 - l0) * (x[1] - x[0]))
        } else if y[0] >= level && y[1] <= 0.0 {
            Some(x[1])
        } else {
            None
        }
    })
}
