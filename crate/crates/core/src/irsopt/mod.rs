//! IRS phase-profile design.
//!
//! For a fixed relay receiver the MSE is a Hermitian quadratic form in
//! `w = [v; 1]`. Lifting to `V = w·wᴴ` turns it into `tr(A·V)` over PSD
//! matrices with unit diagonal and rank one. The rank constraint is replaced
//! by the penalty `γ(tr V − λ₁(V))`, whose concave part is linearised around
//! the previous iterate; each linearised problem is a unit-diagonal SDP solved
//! by ADMM ([`solve_inner_sdp`]). [`ccp_optimize`] iterates these solves and
//! [`alternating_optimize`] interleaves them with closed-form receiver updates.

mod alternating;
mod ccp;
mod phases;
mod sdp;

use serde::{Deserialize, Serialize};

use crate::model::PhaseProfile;
use crate::numerics::{hermitian_eig, HermitianMatrix};
use crate::{CMatrix, CVector, Error, Result, C64};

pub use alternating::{alternating_optimize, alternating_optimize_from, AlternatingOutcome};
pub use ccp::{
    ccp_optimize, ccp_optimize_with_gamma, choose_gamma, choose_gamma_from, penalized_objective,
    CcpOutcome, RANK_GAP_TOL,
};
pub use phases::{extract_phases, quantize_phases, random_phases};
pub use sdp::{solve_inner_sdp, InnerSolution};

/// Feasibility tolerance on the diagonal and on the smallest eigenvalue.
pub const LIFTED_TOL: f64 = 1e-8;

/// `(M+1)×(M+1)` PSD matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedMatrix(HermitianMatrix);

impl LiftedMatrix {
    pub fn new(v: HermitianMatrix) -> Result<Self> {
        let n = v.dim();
        if n < 2 {
            return Err(Error::DimensionMismatch(format!(
                "lifted matrix must be at least 2x2, got {n}x{n}"
            )));
        }
        let m = v.as_matrix();
        if let Some(k) = (0..n).find(|&k| (m[(k, k)] - C64::new(1.0, 0.0)).norm() > LIFTED_TOL) {
            return Err(Error::InvalidParameter(format!(
                "lifted matrix diagonal entry {k} is {}",
                m[(k, k)]
            )));
        }
        let min_eig = hermitian_eig(&v)?.values[n - 1];
        if min_eig < -LIFTED_TOL {
            return Err(Error::InvalidParameter(format!(
                "lifted matrix is not PSD (min eigenvalue {min_eig:e})"
            )));
        }
        Ok(Self(v))
    }

    /// `[v; 1][vᴴ 1]`.
    pub fn from_phases(v: &PhaseProfile) -> Self {
        let w = lift_vector(v);
        let mut outer = &w * w.adjoint();
        for k in 0..outer.nrows() {
            outer[(k, k)] = C64::new(1.0, 0.0);
        }
        Self(HermitianMatrix::symmetrized(outer).expect("outer product is square"))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Number of IRS elements, `dim − 1`.
    pub fn m_elements(&self) -> usize {
        self.dim() - 1
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn as_matrix(&self) -> &CMatrix {
        self.0.as_matrix()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// `tr V − λ₁(V)`; zero exactly when `V` has rank at most one.
    pub fn rank_gap(&self) -> Result<f64> {
        let top = hermitian_eig(&self.0)?.top_value();
        Ok(self.trace() - top)
    }

    /// Rank gap relative to the trace.
    pub fn relative_rank_gap(&self) -> Result<f64> {
        Ok(self.rank_gap()? / self.trace())
    }
}

/// `[v; 1]`.
pub fn lift_vector(v: &PhaseProfile) -> CVector {
    let m = v.len();
    CVector::from_fn(m + 1, |k, _| {
        if k < m {
            v.as_vector()[k]
        } else {
            C64::new(1.0, 0.0)
        }
    })
}

/// Penalty weight policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gamma {
    /// Bisection for the smallest weight giving a rank-one output.
    Auto,
    Fixed(f64),
}

impl std::str::FromStr for Gamma {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Self::Auto);
        }
        match s.parse::<f64>() {
            Ok(g) if g >= 0.0 && g.is_finite() => Ok(Self::Fixed(g)),
            _ => Err(Error::InvalidConfig(format!(
                "gamma must be `auto` or a finite value >= 0, got `{s}`"
            ))),
        }
    }
}

impl std::fmt::Display for Gamma {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Auto => f.write_str("auto"),
            Self::Fixed(g) => write!(f, "{g}"),
        }
    }
}

impl Serialize for Gamma {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Auto => s.serialize_str("auto"),
            Self::Fixed(g) => s.serialize_f64(*g),
        }
    }
}

impl<'de> Deserialize<'de> for Gamma {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Value(f64),
        }
        match Repr::deserialize(d)? {
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
            Repr::Value(g) if g >= 0.0 && g.is_finite() => Ok(Self::Fixed(g)),
            Repr::Value(g) => Err(serde::de::Error::custom(format!("bad gamma {g}"))),
        }
    }
}

/// Tolerances and caps for the phase optimiser.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub gamma: Gamma,
    /// Stop threshold on `‖V_k − V_{k−1}‖²_F` (CCP) and on the squared change of
    /// `(v, G)` (alternating loop).
    pub delta: f64,
    /// CCP iteration cap.
    pub iter_max: usize,
    /// ADMM relative residual tolerance.
    pub sdp_tol: f64,
    pub sdp_iter_max: usize,
    /// Alternating-loop iteration cap.
    pub outer_iter_max: usize,
    /// Bisection range for [`Gamma::Auto`], as multiples of `‖A‖_F`.
    pub gamma_range: [f64; 2],
    /// Stretch each accepted phase update along its direction while the MSE
    /// keeps improving. Off gives the plain alternating loop.
    pub extrapolate: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gamma: Gamma::Auto,
            delta: 1e-4,
            iter_max: 50,
            sdp_tol: 1e-6,
            sdp_iter_max: 5000,
            outer_iter_max: 30,
            gamma_range: [1e-3, 1e3],
            extrapolate: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidConfig(format!("solver: {what}")));
        if !(self.delta > 0.0) {
            return bad("delta must be > 0");
        }
        if !(self.sdp_tol > 0.0) {
            return bad("sdp_tol must be > 0");
        }
        if self.iter_max == 0 || self.sdp_iter_max == 0 || self.outer_iter_max == 0 {
            return bad("iteration caps must be >= 1");
        }
        let [lo, hi] = self.gamma_range;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return bad("gamma_range must satisfy 0 < lo <= hi");
        }
        Ok(())
    }
}
