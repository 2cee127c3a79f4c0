//! Alternating minimisation over the receiver `G` and the phases `v`.

use super::ccp::{ccp_run, select_gamma};
use super::{extract_phases, Gamma, LiftedMatrix, SolverConfig};
use crate::beamform::{assemble_lifted_objective, mmse_beamformer, mse_exact, Beamformer};
use crate::model::{effective_channel, ChannelRealization, PhaseProfile, SystemParams};
use crate::Result;
use std::f64::consts::PI;

const MAX_EXTRAPOLATION: f64 = 256.0;

#[derive(Debug, Clone)]
pub struct AlternatingOutcome {
    pub phases: PhaseProfile,
    pub beamformer: Beamformer,
    /// Exact MSE of the returned pair.
    pub mse: f64,
    /// Penalty weight of the last inner loop.
    pub gamma: f64,
    pub outer_iterations: usize,
    /// `false` when the outer cap was hit; the best pair found is returned.
    pub converged: bool,
    /// Exact MSE after each receiver update, starting with the initial phases.
    pub mse_history: Vec<f64>,
}

/// Alternating optimisation from the all-ones profile.
pub fn alternating_optimize(
    ch: &ChannelRealization,
    params: &SystemParams,
    cfg: &SolverConfig,
) -> Result<AlternatingOutcome> {
    alternating_optimize_from(ch, params, cfg, &PhaseProfile::ones(ch.m_elements()))
}

/// Each round sets `G` to the MMSE receiver for `H(v)`, runs the penalised
/// loop for that `G` starting at `v`, and keeps the extracted phases only if
/// they lower the exact MSE. With `cfg.extrapolate` the accepted phase step is
/// then stretched by powers of two while that keeps lowering the MSE with a
/// re-optimised receiver. Stops once
/// `‖Δv‖² + ‖ΔG‖²_F < delta`. With [`Gamma::Auto`] the weight is re-selected
/// for every round's objective and held fixed within that round's loop.
pub fn alternating_optimize_from(
    ch: &ChannelRealization,
    params: &SystemParams,
    cfg: &SolverConfig,
    v_init: &PhaseProfile,
) -> Result<AlternatingOutcome> {
    cfg.validate()?;
    ch.check_dims()?;
    let mut v = v_init.clone();
    let mut g = mmse_beamformer(&effective_channel(ch, &v)?, params)?;
    let mut mse = mse_exact(&g, &effective_channel(ch, &v)?, params);
    let mut mse_history = vec![mse];
    let mut gamma = 0.0;

    let mut warm = None;
    for outer in 1..=cfg.outer_iter_max {
        let obj = assemble_lifted_objective(&g, ch, params)?;
        let ccp = match cfg.gamma {
            Gamma::Fixed(x) => ccp_run(&obj, x, cfg, &LiftedMatrix::from_phases(&v), &mut warm)?,
            Gamma::Auto => select_gamma(&obj, cfg, &v)?,
        };
        gamma = ccp.gamma;
        let candidate = extract_phases(&ccp.v);
        let cand_mse = mse_exact(&g, &effective_channel(ch, &candidate)?, params);
        let v_next = if cand_mse >= mse {
            v.clone()
        } else if cfg.extrapolate {
            extrapolate(ch, params, &v, &candidate)?
        } else {
            candidate
        };

        let h_next = effective_channel(ch, &v_next)?;
        let g_next = mmse_beamformer(&h_next, params)?;
        let step = (v_next.as_vector() - v.as_vector()).norm_squared()
            + (&g_next.g - &g.g).norm_squared();
        v = v_next;
        g = g_next;
        mse = mse_exact(&g, &h_next, params);
        mse_history.push(mse);
        if step < cfg.delta {
            return Ok(AlternatingOutcome {
                phases: v,
                beamformer: g,
                mse,
                gamma,
                outer_iterations: outer,
                converged: true,
                mse_history,
            });
        }
    }
    Ok(AlternatingOutcome {
        phases: v,
        beamformer: g,
        mse,
        gamma,
        outer_iterations: cfg.outer_iter_max,
        converged: false,
        mse_history,
    })
}

/// MSE with the receiver re-optimised for `v`.
fn concentrated_mse(ch: &ChannelRealization, params: &SystemParams, v: &PhaseProfile) -> Result<f64> {
    let h = effective_channel(ch, v)?;
    Ok(mse_exact(&mmse_beamformer(&h, params)?, &h, params))
}

/// Doubles the phase step `v → candidate` while the receiver-optimised MSE
/// keeps dropping.
fn extrapolate(
    ch: &ChannelRealization,
    params: &SystemParams,
    v: &PhaseProfile,
    candidate: &PhaseProfile,
) -> Result<PhaseProfile> {
    let base = v.angles();
    let step: Vec<f64> = candidate
        .angles()
        .iter()
        .zip(&base)
        .map(|(c, b)| (c - b + PI).rem_euclid(2.0 * PI) - PI)
        .collect();
    let at = |t: f64| {
        let theta: Vec<f64> = base.iter().zip(&step).map(|(b, d)| b + t * d).collect();
        PhaseProfile::from_angles(&theta)
    };
    let mut best = candidate.clone();
    let mut best_mse = concentrated_mse(ch, params, &best)?;
    let mut t = 2.0;
    while t <= MAX_EXTRAPOLATION {
        let trial = at(t);
        let trial_mse = concentrated_mse(ch, params, &trial)?;
        if trial_mse >= best_mse {
            break;
        }
        best = trial;
        best_mse = trial_mse;
        t *= 2.0;
    }
    Ok(best)
}
