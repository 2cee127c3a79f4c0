//! Convex-concave loop on the rank-penalised lifted problem.

use super::sdp::{solve_linearized, AdmmWarmStart};
use super::{Gamma, LiftedMatrix, SolverConfig};
use crate::beamform::LiftedObjective;
use crate::model::PhaseProfile;
use crate::numerics::hermitian_eig;
use crate::{Error, Result};

/// Relative rank gap `(tr V − λ₁)/tr V` accepted as rank one.
pub const RANK_GAP_TOL: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct CcpOutcome {
    pub v: LiftedMatrix,
    pub gamma: f64,
    pub iterations: usize,
    /// Whether the step criterion was met before `iter_max`.
    pub converged: bool,
    /// Penalised objective at the start point and after each iteration.
    pub history: Vec<f64>,
    pub sdp_iterations: usize,
}

/// `tr(A·V) + c0 + γ(tr V − λ₁(V))`.
pub fn penalized_objective(obj: &LiftedObjective, gamma: f64, v: &LiftedMatrix) -> Result<f64> {
    Ok(obj.value(v.as_matrix()) + gamma * v.rank_gap()?)
}

/// Runs the loop from `v_init`, resolving `cfg.gamma` first.
pub fn ccp_optimize(
    obj: &LiftedObjective,
    cfg: &SolverConfig,
    v_init: &PhaseProfile,
) -> Result<CcpOutcome> {
    let gamma = match cfg.gamma {
        Gamma::Fixed(g) => g,
        Gamma::Auto => choose_gamma_from(obj, cfg, v_init)?,
    };
    ccp_optimize_with_gamma(obj, gamma, cfg, &LiftedMatrix::from_phases(v_init))
}

pub fn ccp_optimize_with_gamma(
    obj: &LiftedObjective,
    gamma: f64,
    cfg: &SolverConfig,
    v_init: &LiftedMatrix,
) -> Result<CcpOutcome> {
    ccp_run(obj, gamma, cfg, v_init, &mut None)
}

/// As [`ccp_optimize_with_gamma`], seeding the first ADMM solve with `warm`
/// and leaving the final ADMM state there.
pub(crate) fn ccp_run(
    obj: &LiftedObjective,
    gamma: f64,
    cfg: &SolverConfig,
    v_init: &LiftedMatrix,
    warm: &mut Option<AdmmWarmStart>,
) -> Result<CcpOutcome> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma must be finite and >= 0, got {gamma}")));
    }
    let mut v = v_init.clone();
    let mut history = vec![penalized_objective(obj, gamma, &v)?];
    let mut sdp_iterations = 0;
    for iter in 1..=cfg.iter_max {
        let u1 = hermitian_eig(v.as_hermitian())?.top_vector();
        let step = solve_linearized(obj, gamma, &v, &u1, cfg, warm)?;
        sdp_iterations += step.iterations;
        let change = (step.v.as_matrix() - v.as_matrix()).norm_squared();
        v = step.v;
        history.push(penalized_objective(obj, gamma, &v)?);
        if change <= cfg.delta {
            return Ok(CcpOutcome {
                v,
                gamma,
                iterations: iter,
                converged: true,
                history,
                sdp_iterations,
            });
        }
    }
    Ok(CcpOutcome {
        v,
        gamma,
        iterations: cfg.iter_max,
        converged: false,
        history,
        sdp_iterations,
    })
}

/// [`choose_gamma_from`] starting at the all-ones profile.
pub fn choose_gamma(obj: &LiftedObjective, cfg: &SolverConfig) -> Result<f64> {
    choose_gamma_from(obj, cfg, &PhaseProfile::ones(obj.dim() - 1))
}

/// Geometric bisection for the smallest `γ` (within a factor of two) in
/// `gamma_range·‖A‖_F` whose loop output has relative rank gap at most
/// [`RANK_GAP_TOL`].
pub fn choose_gamma_from(
    obj: &LiftedObjective,
    cfg: &SolverConfig,
    v_init: &PhaseProfile,
) -> Result<f64> {
    select_gamma(obj, cfg, v_init).map(|out| out.gamma)
}

/// Bisection behind [`choose_gamma_from`], returning the loop run at the
/// chosen weight.
pub(crate) fn select_gamma(
    obj: &LiftedObjective,
    cfg: &SolverConfig,
    v_init: &PhaseProfile,
) -> Result<CcpOutcome> {
    let scale = match obj.a.as_matrix().norm() {
        s if s > 0.0 => s,
        _ => 1.0,
    };
    let start = LiftedMatrix::from_phases(v_init);
    let run = |gamma: f64| -> Result<(CcpOutcome, bool)> {
        let out = ccp_optimize_with_gamma(obj, gamma, cfg, &start)?;
        let ok = out.v.relative_rank_gap()? <= RANK_GAP_TOL;
        Ok((out, ok))
    };
    let (mut lo, mut hi) = (cfg.gamma_range[0] * scale, cfg.gamma_range[1] * scale);
    let (mut best, ok) = run(hi)?;
    if !ok {
        return Err(Error::GammaRangeExhausted {
            gamma_hi: hi,
            rank_gap: best.v.relative_rank_gap()?,
        });
    }
    let (at_lo, ok) = run(lo)?;
    if ok {
        return Ok(at_lo);
    }
    while hi / lo > 2.0 {
        let mid = (lo * hi).sqrt();
        let (out, ok) = run(mid)?;
        if ok {
            hi = mid;
            best = out;
        } else {
            lo = mid;
        }
    }
    Ok(best)
}
