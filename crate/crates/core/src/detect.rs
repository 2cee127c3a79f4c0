//! XOR detection at the relay, destination links and the NNC baseline.
//!
//! Every detection statistic is a real part. Under [`NoiseConvention::RealPart`]
//! the variance entering LLRs and Q-arguments is the variance of that real
//! part, i.e. half the complex variance; [`NoiseConvention::Complex`] uses the
//! complex variance unchanged.

use nalgebra::{Matrix2, Vector2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::beamform::{stream_noise_variances, symbol_mmse_matrix, Beamformer};
use crate::model::{complex_normal, sum_difference_complex, SystemParams};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Variances below this are treated as this value so that noiseless
/// observations give finite (saturated) LLRs.
pub const VARIANCE_FLOOR: f64 = 1e-30;
/// Channel gains below this make channel inversion undefined.
pub const ZERO_CHANNEL: f64 = 1e-12;
const GAIN_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseConvention {
    /// Variance of the real part (half the complex variance).
    #[default]
    RealPart,
    /// Complex variance, as in the literal closed forms.
    Complex,
}

impl NoiseConvention {
    /// Maps a complex noise variance to the variance used by detectors and
    /// closed-form BERs.
    pub fn detection_variance(self, complex_var: f64) -> f64 {
        match self {
            Self::RealPart => 0.5 * complex_var,
            Self::Complex => complex_var,
        }
    }
}

impl std::str::FromStr for NoiseConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real-part" => Ok(Self::RealPart),
            "complex" => Ok(Self::Complex),
            _ => Err(Error::InvalidConfig(format!("unknown noise convention `{s}`"))),
        }
    }
}

impl std::fmt::Display for NoiseConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::RealPart => "real-part",
            Self::Complex => "complex",
        })
    }
}

/// How the two relay streams are normalised before detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StreamScaling {
    /// Divide stream `i` (and its noise level) by its useful gain
    /// `Re((G·H·D⁻¹)_ii)`, so that detection thresholds sit at `±2a`, and
    /// count the residual leakage of the other stream as extra noise.
    #[default]
    Unbiased,
    /// Use `G·r` as is.
    Raw,
}

impl std::str::FromStr for StreamScaling {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unbiased" => Ok(Self::Unbiased),
            "raw" => Ok(Self::Raw),
            _ => Err(Error::InvalidConfig(format!("unknown stream scaling `{s}`"))),
        }
    }
}

impl std::fmt::Display for StreamScaling {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Unbiased => "unbiased",
            Self::Raw => "raw",
        })
    }
}

/// Post-receiver sum and difference streams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayObservation {
    pub y: [C64; 2],
    /// Detection variances `(σ1², σ2²)`.
    pub stream_vars: [f64; 2],
    pub amplitude: f64,
}

impl RelayObservation {
    pub fn new(y: [C64; 2], stream_vars: [f64; 2], amplitude: f64) -> Result<Self> {
        if stream_vars.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "stream variances must be >= 0, got {stream_vars:?}"
            )));
        }
        Ok(Self {
            y,
            stream_vars,
            amplitude,
        })
    }

    fn vars(&self) -> [f64; 2] {
        self.stream_vars.map(|v| v.max(VARIANCE_FLOOR))
    }
}

/// `log cosh z` without overflow.
fn log_cosh(z: f64) -> f64 {
    let a = z.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Two-stream XOR LLR, positive favouring "bits differ".
///
/// `L = 2a²(1/σ1² − 1/σ2²) + log cosh(2a·ŷ2/σ2²) − log cosh(2a·ŷ1/σ1²)`
/// with `ŷi = Re yi`.
pub fn exact_llr_xor(obs: &RelayObservation) -> f64 {
    let a = obs.amplitude;
    let [v1, v2] = obs.vars();
    let (y1, y2) = (obs.y[0].re, obs.y[1].re);
    2.0 * a * a * (1.0 / v1 - 1.0 / v2) + log_cosh(2.0 * a * y2 / v2) - log_cosh(2.0 * a * y1 / v1)
}

/// Soft-minimum approximation of [`exact_llr_xor`]:
/// `Σi (−1)^(i+1) min over x ∈ {±2a} of (x² − 2ŷi·x)/(2σi²)`.
pub fn approx_llr_xor(obs: &RelayObservation) -> f64 {
    let a = obs.amplitude;
    let [v1, v2] = obs.vars();
    let term = |y: f64, v: f64| 2.0 * a * (a - y.abs()) / v;
    term(obs.y[0].re, v1) - term(obs.y[1].re, v2)
}

/// `+1` iff `L ≥ 0`.
pub fn decide_xor(llr: f64) -> i8 {
    if llr >= 0.0 {
        1
    } else {
        -1
    }
}

/// Per-realization relay front end: receiver, stream gains and variances.
#[derive(Debug, Clone)]
pub struct RelayFrontEnd {
    g: Matrix2<C64>,
    /// Divisors applied to each stream.
    pub gains: [f64; 2],
    /// Detection variances after scaling.
    pub stream_vars: [f64; 2],
    pub amplitude: f64,
}

impl RelayFrontEnd {
    pub fn new(
        g: Beamformer,
        h: &CMatrix,
        params: &SystemParams,
        convention: NoiseConvention,
        scaling: StreamScaling,
    ) -> Self {
        let raw_vars = stream_noise_variances(&g, params.noise_var)
            .map(|v| convention.detection_variance(v));
        let a = params.amplitude();
        let (gains, stream_vars) = match scaling {
            StreamScaling::Raw => ([1.0, 1.0], raw_vars),
            StreamScaling::Unbiased => {
                // D⁻¹ = D/2.
                let eff = &g.g * h * sum_difference_complex() * C64::from(0.5);
                let gains = [eff[(0, 0)].re.max(GAIN_FLOOR), eff[(1, 1)].re.max(GAIN_FLOOR)];
                // The other stream's target (0 or ±2a, mean square 2a²)
                // leaks through Re(G·H·D⁻¹)_ij.
                let vars = [0, 1].map(|i| {
                    let leak = eff[(i, 1 - i)].re / gains[i];
                    raw_vars[i] / (gains[i] * gains[i]) + 2.0 * a * a * leak * leak
                });
                (gains, vars)
            }
        };
        Self {
            g: fixed(&g.g),
            gains,
            stream_vars,
            amplitude: params.amplitude(),
        }
    }

    pub fn observe(&self, r: &Vector2<C64>) -> RelayObservation {
        let y = self.g * r;
        RelayObservation {
            y: [y[0] / self.gains[0], y[1] / self.gains[1]],
            stream_vars: self.stream_vars,
            amplitude: self.amplitude,
        }
    }
}

/// Copies a 2×2 dynamic matrix into a fixed-size one.
pub fn fixed(m: &CMatrix) -> Matrix2<C64> {
    Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

/// Real decision statistic on a channel-inverted point-to-point link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkObservation {
    pub y: f64,
    /// Detection variance of `y`.
    pub noise_var: f64,
    pub amplitude: f64,
}

/// Detection variance after channel inversion, `σ²/‖h‖²` under the chosen
/// convention.
pub fn link_noise_variance(h: &[C64], noise_var: f64, convention: NoiseConvention) -> Result<f64> {
    let gain = h.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if gain.sqrt() < ZERO_CHANNEL {
        return Err(Error::ZeroChannel(gain.sqrt()));
    }
    Ok(convention.detection_variance(noise_var / gain))
}

/// Sends `symbol·a` over a channel-inverted link with gain vector `h` (one
/// entry for a scalar link, one per transmit antenna otherwise).
pub fn dest_link_transmit<R: Rng + ?Sized>(
    symbol: i8,
    amplitude: f64,
    h: &[C64],
    noise_var: f64,
    convention: NoiseConvention,
    rng: &mut R,
) -> Result<LinkObservation> {
    let det_var = link_noise_variance(h, noise_var, convention)?;
    let gain = h.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let n = complex_normal(rng, noise_var / gain);
    Ok(LinkObservation {
        y: f64::from(symbol) * amplitude + n.re,
        noise_var: det_var,
        amplitude,
    })
}

/// `+1` iff `ŷ ≥ 0`.
pub fn decide_bpsk(obs: &LinkObservation) -> i8 {
    if obs.y >= 0.0 {
        1
    } else {
        -1
    }
}

/// Recovers `x̂2` from `x̂1` and the XOR symbol: `x̂2 = −x̂1·x̂⊕`.
pub fn xor_combine(x1: i8, x_xor: i8) -> i8 {
    -x1 * x_xor
}

/// XOR symbol of two detected BPSK symbols.
pub fn xor_of_symbols(x1: i8, x2: i8) -> i8 {
    -x1 * x2
}

/// NNC relay: MMSE estimate of `x`, per-stream sign decisions, then XOR.
pub fn nnc_relay_detect(r: &CVector, h: &CMatrix, params: &SystemParams) -> Result<i8> {
    let r = Vector2::new(r[0], r[1]);
    Ok(nnc_detect_with(&fixed(&symbol_mmse_matrix(h, params)?), &r))
}

/// [`nnc_relay_detect`] with a precomputed estimator matrix.
pub fn nnc_detect_with(gx: &Matrix2<C64>, r: &Vector2<C64>) -> i8 {
    let est = gx * r;
    let sign = |z: C64| if z.re >= 0.0 { 1 } else { -1 };
    xor_of_symbols(sign(est[0]), sign(est[1]))
}
