use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::analysis::{BerTarget, DetectionOptions, LlrKind, PhaseMode, Scheme};
use crate::beamform::BeamformerKind;
use crate::detect::{NoiseConvention, StreamScaling};
use crate::irsopt::SolverConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    /// Ergodic relay XOR BER against SNR at fixed `M`.
    BerRelayVsSnr,
    /// Ergodic relay XOR BER against `M` at fixed SNR.
    BerVsM,
    /// Ergodic `D1` BER against SNR at fixed `M`.
    BerD1VsSnr,
    /// One (SNR, M) point, relay and `D1`.
    Single,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::BerRelayVsSnr => "ber-relay-vs-snr",
            Self::BerVsM => "ber-vs-m",
            Self::BerD1VsSnr => "ber-d1-vs-snr",
            Self::Single => "single",
        }
    }

    pub fn targets(self) -> &'static [BerTarget] {
        match self {
            Self::BerRelayVsSnr | Self::BerVsM => &[BerTarget::Relay],
            Self::BerD1VsSnr => &[BerTarget::D1],
            Self::Single => &[BerTarget::Relay, BerTarget::D1],
        }
    }
}

impl std::str::FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [Self::BerRelayVsSnr, Self::BerVsM, Self::BerD1VsSnr, Self::Single]
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown experiment `{s}`")))
    }
}

impl std::fmt::Display for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// SNR in dB; `+∞` (written `"inf"`) means a noiseless relay and links.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SnrDb(pub f64);

impl Serialize for SnrDb {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for SnrDb {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Value(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Value(x) => Ok(Self(x)),
            Repr::Text(t) if t == "inf" => Ok(Self(f64::INFINITY)),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("bad SNR `{t}`"))),
        }
    }
}

/// Parses `A:B:STEP` (inclusive), a single value, or a comma-separated list.
pub fn parse_snr_range(s: &str) -> Result<Vec<SnrDb>> {
    let bad = || Error::InvalidConfig(format!("bad SNR range `{s}`"));
    let num = |t: &str| -> Result<f64> {
        match t.trim() {
            "inf" => Ok(f64::INFINITY),
            t => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(a.is_finite() && b.is_finite() && step > 0.0 && step.is_finite() && b >= a) {
                return Err(bad());
            }
            let n = ((b - a) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|k| SnrDb(a + k as f64 * step)).collect())
        }
        [_] => s.split(',').map(|t| num(t).map(SnrDb)).collect(),
        _ => Err(bad()),
    }
}

fn one_or_many<'de, D, T>(d: D) -> std::result::Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(match Repr::deserialize(d)? {
        Repr::One(x) => vec![x],
        Repr::Many(v) => v,
    })
}

/// Everything that determines a run's output. Written verbatim into the run
/// manifest, so a manifest is itself a valid config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub snr_db_range: Vec<SnrDb>,
    pub m_list: Vec<usize>,
    #[serde(deserialize_with = "one_or_many")]
    pub phase_mode: Vec<PhaseMode>,
    #[serde(deserialize_with = "one_or_many")]
    pub scheme: Vec<Scheme>,
    pub trials_per_realization: u64,
    pub n_realizations: usize,
    pub seed: u64,
    /// Transmit power; the SNR sweep sets `σ² = P·10^(−SNR/10)`.
    pub p_tx: f64,
    pub beamformer: BeamformerKind,
    pub noise_convention: NoiseConvention,
    pub stream_scaling: StreamScaling,
    pub llr: LlrKind,
    pub solver: SolverConfig,
    pub output_path: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::preset(Experiment::Single)
    }
}

impl ExperimentConfig {
    /// Defaults for each experiment.
    pub fn preset(experiment: Experiment) -> Self {
        let snr = |a: i32, b: i32, step: usize| (a..=b).step_by(step).map(|x| SnrDb(x as f64)).collect();
        let (snr_db_range, m_list, scheme, trials) = match experiment {
            Experiment::BerRelayVsSnr => (snr(-30, 20, 2), vec![32], vec![Scheme::Pnc], 10_000),
            Experiment::BerVsM => (
                vec![SnrDb(-15.0)],
                vec![8, 16, 32, 64, 128, 256],
                vec![Scheme::Pnc],
                10_000,
            ),
            Experiment::BerD1VsSnr => (
                snr(-10, 20, 2),
                vec![32],
                vec![Scheme::Pnc, Scheme::Nnc],
                100_000,
            ),
            Experiment::Single => (vec![SnrDb(10.0)], vec![32], vec![Scheme::Pnc], 10_000),
        };
        Self {
            experiment,
            snr_db_range,
            m_list,
            phase_mode: PhaseMode::ALL.to_vec(),
            scheme,
            trials_per_realization: trials,
            n_realizations: 200,
            seed: 1,
            p_tx: 1.0,
            beamformer: BeamformerKind::default(),
            noise_convention: NoiseConvention::default(),
            stream_scaling: StreamScaling::default(),
            llr: LlrKind::default(),
            solver: SolverConfig::default(),
            output_path: PathBuf::from("out"),
        }
    }

    /// Reads TOML, or JSON when the extension is `.json`. Missing fields take
    /// the preset of the file's `experiment`.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let value: serde_json::Value = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(e.to_string()))?
        } else {
            let t: toml::Value = toml::from_str(&text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
            serde_json::to_value(t)?
        };
        Self::from_value(value)
    }

    pub(crate) fn from_value(value: serde_json::Value) -> Result<Self> {
        let experiment = match value.get("experiment") {
            Some(e) => serde_json::from_value(e.clone()).map_err(|e| Error::InvalidConfig(e.to_string()))?,
            None => Experiment::Single,
        };
        let mut merged = serde_json::to_value(Self::preset(experiment))?;
        if let (Some(base), serde_json::Value::Object(over)) = (merged.as_object_mut(), value) {
            for (k, v) in over {
                match (base.get_mut(&k), v) {
                    (Some(serde_json::Value::Object(b)), serde_json::Value::Object(o)) if k == "solver" => {
                        b.extend(o);
                    }
                    (_, v) => {
                        base.insert(k, v);
                    }
                }
            }
        }
        let cfg: Self = serde_json::from_value(merged).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn detection(&self) -> DetectionOptions {
        DetectionOptions {
            beamformer: self.beamformer,
            noise_convention: self.noise_convention,
            stream_scaling: self.stream_scaling,
            llr: self.llr,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.trials_per_realization == 0 {
            return bad("trials_per_realization must be >= 1".into());
        }
        if self.n_realizations == 0 {
            return bad("n_realizations must be >= 1".into());
        }
        if self.snr_db_range.is_empty() || self.m_list.is_empty() {
            return bad("snr_db_range and m_list must be non-empty".into());
        }
        if let Some(s) = self.snr_db_range.iter().find(|s| s.0.is_nan() || s.0 == f64::NEG_INFINITY) {
            return bad(format!("SNR values must be finite or `inf`, got {}", s.0));
        }
        if self.m_list.contains(&0) {
            return bad("m_list entries must be >= 1".into());
        }
        if self.phase_mode.is_empty() || self.scheme.is_empty() {
            return bad("phase_mode and scheme must be non-empty".into());
        }
        if !(self.p_tx > 0.0 && self.p_tx.is_finite()) {
            return bad(format!("p_tx must be > 0, got {}", self.p_tx));
        }
        match self.experiment {
            Experiment::BerRelayVsSnr | Experiment::BerD1VsSnr if self.m_list.len() != 1 => {
                bad(format!("{} sweeps SNR; give exactly one M", self.experiment))
            }
            Experiment::BerVsM if self.snr_db_range.len() != 1 => {
                bad("ber-vs-m sweeps M; give exactly one SNR".into())
            }
            Experiment::Single if self.m_list.len() != 1 || self.snr_db_range.len() != 1 => {
                bad("single needs exactly one SNR and one M".into())
            }
            _ => self.solver.validate(),
        }
    }
}
