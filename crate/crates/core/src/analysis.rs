//! Closed-form BERs and the per-realization BER pipeline.
//!
//! Closed forms take detection-level noise: standard deviations or variances
//! that already follow the chosen [`NoiseConvention`]. The pipeline applies the
//! convention itself.

use nalgebra::Vector2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::beamform::{beamformer, symbol_mmse_matrix, BeamformerKind};
use crate::detect::{
    approx_llr_xor, decide_bpsk, decide_xor, dest_link_transmit, exact_llr_xor, fixed,
    link_noise_variance, nnc_detect_with, xor_combine, NoiseConvention, RelayFrontEnd,
    StreamScaling, VARIANCE_FLOOR,
};
use crate::irsopt::{alternating_optimize, quantize_phases, random_phases, SolverConfig};
use crate::model::{
    complex_normal, effective_channel, gen_channels, substream, ChannelRealization, PhaseProfile,
    SymbolPair, SystemParams,
};
use crate::numerics::q_function;
use crate::{CMatrix, Error, Result, C64};

/// Relay XOR error probability of the soft-minimum detector, approximated by
/// a sum of Q-function products and clamped to `[0, 1]`.
///
/// `s1`, `s2` are the detection standard deviations of the two streams and
/// `a` the symbol amplitude. The expression is homogeneous in `σ/a`.
pub fn relay_xor_ber(s1: f64, s2: f64, a: f64) -> f64 {
    let floor = VARIANCE_FLOOR.sqrt();
    let (s1, s2) = (s1.max(floor), s2.max(floor));
    let r21 = (s2 / s1).powi(2);
    let r12 = (s1 / s2).powi(2);
    let p = 0.5 * (q_function(-2.0 * a / s2) + q_function(-2.0 * a / s1))
        * q_function(a * (1.0 + r21).sqrt() / s2)
        + q_function(2.0 * a / s2) * q_function(a * (r21 - 3.0) / (s2 * (1.0 + r21).sqrt()))
        + q_function(2.0 * a / s1) * q_function(a * (r12 - 3.0) / (s1 * (1.0 + r12).sqrt()));
    p.clamp(0.0, 1.0)
}

/// Exact error probability of the soft-minimum XOR detector with independent
/// Gaussian streams of standard deviation `s1`, `s2`, by one-dimensional
/// quadrature. Reference for [`relay_xor_ber`].
pub fn softmin_xor_ber_exact(s1: f64, s2: f64, a: f64) -> f64 {
    let floor = VARIANCE_FLOOR.sqrt();
    let (s1, s2) = (s1.max(floor), s2.max(floor));
    0.5 * (softmin_error(s1, s2, a) + softmin_error(s2, s1, a))
}

// One stream is N(0, sz²) (its symbol pair cancels), the other N(2a, ss²).
// An error occurs when the zero-mean stream looks more like ±2a than the
// other one does, after weighting by the variances.
fn softmin_error(sz: f64, ss: f64, a: f64) -> f64 {
    let (vz, vs) = (sz * sz, ss * ss);
    let tail = |y: f64| {
        let t = a - vz * (a - y.abs()) / vs;
        if t <= 0.0 {
            1.0
        } else {
            2.0 * q_function(t / sz)
        }
    };
    let density = |y: f64| {
        (-(y - 2.0 * a).powi(2) / (2.0 * vs)).exp() / (ss * (2.0 * std::f64::consts::PI).sqrt())
    };
    let (lo, hi) = (2.0 * a - 12.0 * ss, 2.0 * a + 12.0 * ss);
    // Split at the kinks of the integrand.
    let mut cuts = vec![lo, hi];
    let knee = a * (1.0 - vs / vz);
    for c in [0.0, knee, -knee] {
        if c > lo && c < hi {
            cuts.push(c);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2).map(|w| simpson(|y| density(y) * tail(y), w[0], w[1], 2000)).sum()
}

fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (hi - lo) / n as f64;
    let mut s = f(lo) + f(hi);
    for k in 1..n {
        s += f(lo + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// BPSK error probability on a channel-inverted link, `Q(a/σ)` with
/// `noise_var` the detection variance.
pub fn link_ber(noise_var: f64, a: f64) -> f64 {
    if noise_var <= 0.0 {
        return if a > 0.0 { 0.0 } else { 0.5 };
    }
    q_function(a / noise_var.sqrt())
}

/// Per-link error probabilities seen by `D1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBerSet {
    /// XOR detection at the relay.
    pub p_xor_relay: f64,
    /// `S1 → D1` direct link.
    pub p_s1_d1: f64,
    /// Relay broadcast to `D1`.
    pub p_r_d1: f64,
}

impl LinkBerSet {
    pub fn new(p_xor_relay: f64, p_s1_d1: f64, p_r_d1: f64) -> Result<Self> {
        for p in [p_xor_relay, p_s1_d1, p_r_d1] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
            }
        }
        Ok(Self {
            p_xor_relay,
            p_s1_d1,
            p_r_d1,
        })
    }
}

/// `D1` recovers `x2` wrongly iff an odd number of the three links err.
pub fn d1_ber_combine(bers: &LinkBerSet) -> f64 {
    let (p, q, s) = (bers.p_s1_d1, bers.p_r_d1, bers.p_xor_relay);
    p * (1.0 - q) * (1.0 - s) + p * q * s + (1.0 - p) * q * (1.0 - s) + (1.0 - p) * (1.0 - q) * s
}

/// NNC relay XOR error probability: per-symbol sign errors after the MMSE
/// estimator, averaged over the interfering symbol, combined as if the two
/// decisions erred independently.
pub fn nnc_xor_ber(h: &CMatrix, params: &SystemParams, convention: NoiseConvention) -> Result<f64> {
    let gx = symbol_mmse_matrix(h, params)?;
    let b = &gx * h;
    let a = params.amplitude();
    let mut p = [0.0; 2];
    for (i, pi) in p.iter_mut().enumerate() {
        let j = 1 - i;
        let row_gain = gx.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>();
        let var = convention.detection_variance(params.noise_var * row_gain);
        let (own, other) = (b[(i, i)].re, b[(i, j)].re);
        *pi = 0.5 * (link_ber_shifted(a * (own + other), var) + link_ber_shifted(a * (own - other), var));
    }
    Ok(p[0] + p[1] - 2.0 * p[0] * p[1])
}

// Q(m/σ) with the noiseless limit handled.
fn link_ber_shifted(mean: f64, var: f64) -> f64 {
    if var <= 0.0 {
        return if mean > 0.0 { 0.0 } else if mean < 0.0 { 1.0 } else { 0.5 };
    }
    q_function(mean / var.sqrt())
}

/// IRS configuration policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseMode {
    /// Alternating optimisation.
    Optimal,
    /// Optimal phases rounded to `±1`.
    Quantized,
    /// Uniform random phases.
    Random,
    /// No reflected path.
    None,
}

impl PhaseMode {
    pub const ALL: [PhaseMode; 4] = [Self::Optimal, Self::Quantized, Self::Random, Self::None];

    pub fn needs_optimization(self) -> bool {
        matches!(self, Self::Optimal | Self::Quantized)
    }
}

impl std::str::FromStr for PhaseMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "optimal" => Ok(Self::Optimal),
            "quantized" => Ok(Self::Quantized),
            "random" => Ok(Self::Random),
            "none" => Ok(Self::None),
            _ => Err(Error::InvalidConfig(format!("unknown phase mode `{s}`"))),
        }
    }
}

impl std::fmt::Display for PhaseMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Optimal => "optimal",
            Self::Quantized => "quantized",
            Self::Random => "random",
            Self::None => "none",
        })
    }
}

/// Relay coding scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Detect the XOR directly from the sum/difference streams.
    Pnc,
    /// Detect both symbols, then XOR.
    Nnc,
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pnc" => Ok(Self::Pnc),
            "nnc" => Ok(Self::Nnc),
            _ => Err(Error::InvalidConfig(format!("unknown scheme `{s}`"))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Pnc => "pnc",
            Self::Nnc => "nnc",
        })
    }
}

/// Where the error is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BerTarget {
    /// XOR decision at the relay.
    Relay,
    /// `x2` recovered at `D1`.
    D1,
}

/// Relay XOR statistic used in simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LlrKind {
    Exact,
    /// The detector whose error rate the closed form approximates.
    #[default]
    SoftMin,
}

impl std::str::FromStr for LlrKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "soft-min" => Ok(Self::SoftMin),
            _ => Err(Error::InvalidConfig(format!("unknown LLR kind `{s}`"))),
        }
    }
}

/// Receiver-side choices shared by the analytic and simulated paths.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DetectionOptions {
    pub beamformer: BeamformerKind,
    pub noise_convention: NoiseConvention,
    pub stream_scaling: StreamScaling,
    pub llr: LlrKind,
}

/// BER of one channel realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealizationBer {
    pub analytic: f64,
    pub mc_errors: u64,
    pub mc_trials: u64,
}

impl RealizationBer {
    pub fn mc(&self) -> Option<f64> {
        (self.mc_trials > 0).then(|| self.mc_errors as f64 / self.mc_trials as f64)
    }
}

/// Output of the phase design step for one realization.
#[derive(Debug, Clone)]
pub struct PhaseDesign {
    /// `None` means the reflected path is removed.
    pub phases: Option<PhaseProfile>,
    /// The alternating loop stopped at its iteration cap.
    pub outer_capped: bool,
}

impl PhaseDesign {
    /// Phases for `mode` given an already optimised profile (required for
    /// the optimal and quantized modes).
    pub fn for_mode<R: Rng + ?Sized>(
        mode: PhaseMode,
        m: usize,
        optimal: Option<(&PhaseProfile, bool)>,
        rng: &mut R,
    ) -> Self {
        let need = || optimal.expect("optimised phases required for this mode");
        match mode {
            PhaseMode::Optimal => Self {
                phases: Some(need().0.clone()),
                outer_capped: need().1,
            },
            PhaseMode::Quantized => Self {
                phases: Some(quantize_phases(need().0)),
                outer_capped: need().1,
            },
            PhaseMode::Random => Self {
                phases: Some(random_phases(m, rng)),
                outer_capped: false,
            },
            PhaseMode::None => Self {
                phases: None,
                outer_capped: false,
            },
        }
    }
}

/// Runs the phase policy on one realization.
pub fn design_phases<R: Rng + ?Sized>(
    mode: PhaseMode,
    ch: &ChannelRealization,
    params: &SystemParams,
    solver: &SolverConfig,
    rng: &mut R,
) -> Result<PhaseDesign> {
    let opt = if mode.needs_optimization() {
        let out = alternating_optimize(ch, params, solver)?;
        Some((out.phases, !out.converged))
    } else {
        None
    };
    Ok(PhaseDesign::for_mode(
        mode,
        ch.m_elements(),
        opt.as_ref().map(|(v, c)| (v, *c)),
        rng,
    ))
}

/// Effective source-to-relay channel for a design (`None` drops the IRS).
pub fn relay_channel(ch: &ChannelRealization, phases: Option<&PhaseProfile>) -> Result<CMatrix> {
    match phases {
        Some(v) => effective_channel(ch, v),
        None => Ok(ch.h_ur.clone()),
    }
}

/// Analytic and (if `trials > 0`) simulated BER of one realization with the
/// given phases.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_realization<R: Rng + ?Sized>(
    ch: &ChannelRealization,
    phases: Option<&PhaseProfile>,
    params: &SystemParams,
    scheme: Scheme,
    target: BerTarget,
    opts: &DetectionOptions,
    trials: u64,
    rng: &mut R,
) -> Result<RealizationBer> {
    let h = relay_channel(ch, phases)?;
    let a = params.amplitude();
    let relay = RelayDetector::new(&h, params, scheme, opts)?;
    let links = match target {
        BerTarget::Relay => None,
        BerTarget::D1 => Some(D1Links::new(ch, params, opts.noise_convention)?),
    };
    let analytic = match &links {
        None => relay.analytic,
        Some(l) => d1_ber_combine(&LinkBerSet::new(
            relay.analytic,
            link_ber(l.s1_var, a),
            link_ber(l.r_var, a),
        )?),
    };

    let h2 = fixed(&h);
    let mut errors = 0;
    for _ in 0..trials {
        let s = SymbolPair::random(rng, a);
        let mut r = h2 * Vector2::new(C64::from(s.symbols[0]), C64::from(s.symbols[1]));
        for z in r.iter_mut() {
            *z += complex_normal(rng, params.noise_var) + params.noise_mean;
        }
        let x_xor = relay.detect(&r);
        let wrong = match &links {
            None => x_xor != s.xor_symbol,
            Some(l) => {
                let x1 = sign(s.symbols[0]);
                let x2 = sign(s.symbols[1]);
                let conv = opts.noise_convention;
                let at_d1 = dest_link_transmit(x_xor, a, &l.h_r, params.noise_var, conv, rng)?;
                let direct = dest_link_transmit(x1, a, &l.h_s1, params.noise_var, conv, rng)?;
                xor_combine(decide_bpsk(&direct), decide_bpsk(&at_d1)) != x2
            }
        };
        errors += wrong as u64;
    }
    Ok(RealizationBer {
        analytic,
        mc_errors: errors,
        mc_trials: trials,
    })
}

fn sign(x: f64) -> i8 {
    if x >= 0.0 {
        1
    } else {
        -1
    }
}

enum RelayRule {
    Pnc(RelayFrontEnd),
    Nnc(nalgebra::Matrix2<C64>),
}

struct RelayDetector {
    rule: RelayRule,
    llr: LlrKind,
    analytic: f64,
}

impl RelayDetector {
    fn new(h: &CMatrix, params: &SystemParams, scheme: Scheme, opts: &DetectionOptions) -> Result<Self> {
        let (rule, analytic) = match scheme {
            Scheme::Pnc => {
                let g = beamformer(opts.beamformer, h, params)?;
                let fe = RelayFrontEnd::new(g, h, params, opts.noise_convention, opts.stream_scaling);
                let [v1, v2] = fe.stream_vars;
                let p = relay_xor_ber(v1.sqrt(), v2.sqrt(), fe.amplitude);
                (RelayRule::Pnc(fe), p)
            }
            Scheme::Nnc => {
                let p = nnc_xor_ber(h, params, opts.noise_convention)?;
                (RelayRule::Nnc(fixed(&symbol_mmse_matrix(h, params)?)), p)
            }
        };
        Ok(Self {
            rule,
            llr: opts.llr,
            analytic,
        })
    }

    fn detect(&self, r: &Vector2<C64>) -> i8 {
        match &self.rule {
            RelayRule::Pnc(fe) => {
                let obs = fe.observe(r);
                decide_xor(match self.llr {
                    LlrKind::Exact => exact_llr_xor(&obs),
                    LlrKind::SoftMin => approx_llr_xor(&obs),
                })
            }
            RelayRule::Nnc(gx) => nnc_detect_with(gx, r),
        }
    }
}

struct D1Links {
    h_s1: [C64; 1],
    h_r: Vec<C64>,
    s1_var: f64,
    r_var: f64,
}

impl D1Links {
    fn new(ch: &ChannelRealization, params: &SystemParams, conv: NoiseConvention) -> Result<Self> {
        let h_s1 = [ch.h_s1_d1];
        let h_r: Vec<C64> = ch.h_r_d1.iter().copied().collect();
        Ok(Self {
            s1_var: link_noise_variance(&h_s1, params.noise_var, conv)?,
            r_var: link_noise_variance(&h_r, params.noise_var, conv)?,
            h_s1,
            h_r,
        })
    }
}

/// Mean and standard error of per-realization values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    /// Zero for a single sample.
    pub std_error: f64,
}

impl Estimate {
    pub fn from_samples(x: &[f64]) -> Option<Self> {
        let n = x.len();
        if n == 0 {
            return None;
        }
        let mean = x.iter().sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Some(Self { mean, std_error })
    }
}

/// Everything that defines one ergodic BER point.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: SystemParams,
    pub phase_mode: PhaseMode,
    pub scheme: Scheme,
    pub target: BerTarget,
    pub detection: DetectionOptions,
    pub solver: SolverConfig,
    /// Monte-Carlo trials per realization; 0 gives analytic only.
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErgodicBer {
    pub analytic: Estimate,
    pub monte_carlo: Option<Estimate>,
    /// Total simulated errors over all realizations.
    pub mc_errors: u64,
    pub used: usize,
    /// Realizations dropped because a numerical step failed.
    pub skipped: usize,
    /// Realizations whose optimisation stopped at the outer cap (kept).
    pub outer_capped: usize,
}

impl ErgodicBer {
    pub fn skip_rate(&self) -> f64 {
        self.skipped as f64 / (self.used + self.skipped).max(1) as f64
    }
}

impl Error {
    /// Numerical failures that drop one realization rather than the run.
    pub fn is_realization_failure(&self) -> bool {
        matches!(
            self,
            Error::SdpNonConvergence(_)
                | Error::GammaRangeExhausted { .. }
                | Error::EigenNonConvergence(_)
                | Error::Singular(_)
                | Error::ZeroChannel(_)
        )
    }
}

/// Channel-averaged BER over `n_realizations` draws. Realization `i` uses
/// independent streams derived from one seed drawn from `rng`, so the channel,
/// phase and noise draws do not depend on the phase mode.
pub fn ergodic_ber<R: Rng + ?Sized>(scenario: &Scenario, n_realizations: usize, rng: &mut R) -> Result<ErgodicBer> {
    if n_realizations == 0 {
        return Err(Error::InvalidParameter("n_realizations must be >= 1".into()));
    }
    scenario.solver.validate()?;
    let seed: u64 = rng.random();
    let mut analytic = Vec::with_capacity(n_realizations);
    let mut mc = Vec::with_capacity(n_realizations);
    let (mut mc_errors, mut skipped, mut capped) = (0, 0, 0);
    for i in 0..n_realizations as u64 {
        match realization_ber(scenario, seed, i) {
            Ok((r, was_capped)) => {
                analytic.push(r.analytic);
                if let Some(p) = r.mc() {
                    mc.push(p);
                }
                mc_errors += r.mc_errors;
                capped += was_capped as usize;
            }
            Err(e) if e.is_realization_failure() => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let Some(analytic_est) = Estimate::from_samples(&analytic) else {
        return Err(Error::InvalidParameter(format!(
            "all {n_realizations} realizations failed"
        )));
    };
    Ok(ErgodicBer {
        analytic: analytic_est,
        monte_carlo: Estimate::from_samples(&mc),
        mc_errors,
        used: analytic.len(),
        skipped,
        outer_capped: capped,
    })
}

fn realization_ber(s: &Scenario, seed: u64, i: u64) -> Result<(RealizationBer, bool)> {
    let ch = gen_channels(&s.params, &mut substream(seed, &[i, 0]));
    let design = design_phases(s.phase_mode, &ch, &s.params, &s.solver, &mut substream(seed, &[i, 1]))?;
    let ber = evaluate_realization(
        &ch,
        design.phases.as_ref(),
        &s.params,
        s.scheme,
        s.target,
        &s.detection,
        s.trials,
        &mut substream(seed, &[i, 2]),
    )?;
    Ok((ber, design.outer_capped))
}
