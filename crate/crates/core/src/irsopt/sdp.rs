//! ADMM for `min Re tr(C·V)` subject to `diag(V) = 1`, `V ⪰ 0`.
//!
//! Splitting `V = X = Z` with `X` on the affine unit-diagonal set and `Z` on
//! the PSD cone:
//!
//! ```text
//! X ← Z − U − C/ρ, then diag(X) ← 1
//! Z ← Π_psd(X + U)
//! U ← U + X − Z
//! ```
//!
//! `ρ` is rebalanced from the ratio of primal and dual residuals. The returned
//! point is `Z` rescaled to unit diagonal, which keeps it exactly PSD.

use super::{LiftedMatrix, SolverConfig};
use crate::beamform::LiftedObjective;
use crate::error::SdpFailure;
use crate::numerics::{hermitian_eig, hermitian_part, psd_project, trace_product, HermitianMatrix};
use crate::{CMatrix, CVector, Error, Result, C64};

const ABS_TOL_FACTOR: f64 = 1e-2;
const BALANCE_EVERY: usize = 10;
const BALANCE_RATIO: f64 = 10.0;
const RHO_STEP: f64 = 2.0;
// Freezing ρ after a bounded number of changes restores the fixed-ρ
// convergence guarantee.
const MAX_RHO_UPDATES: usize = 50;
const MIN_DIAG: f64 = 1e-12;

/// Output of one linearised solve.
#[derive(Debug, Clone)]
pub struct InnerSolution {
    pub v: LiftedMatrix,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// `true` when the ADMM point did not improve on the previous iterate and
    /// the previous iterate was returned instead.
    pub kept_previous: bool,
}

/// Dual state carried between consecutive solves of slowly changing problems.
#[derive(Debug, Clone)]
pub(crate) struct AdmmWarmStart {
    u: CMatrix,
    rho: f64,
}

/// Solves the convexified penalty problem
/// `min tr(A·V) + γ(tr V − tr(V·u₁u₁ᴴ))` over unit-diagonal PSD `V`, with `u₁`
/// the top eigenvector of `v_prev`.
pub fn solve_inner_sdp(
    obj: &LiftedObjective,
    gamma: f64,
    v_prev: &LiftedMatrix,
    cfg: &SolverConfig,
) -> Result<LiftedMatrix> {
    let u1 = hermitian_eig(v_prev.as_hermitian())?.top_vector();
    solve_linearized(obj, gamma, v_prev, &u1, cfg, &mut None).map(|s| s.v)
}

/// Cost matrix `A + γ(I − u₁u₁ᴴ)` of the linearised problem.
pub(crate) fn linearized_cost(obj: &LiftedObjective, gamma: f64, u1: &CVector) -> CMatrix {
    let n = obj.dim();
    let penalty = CMatrix::identity(n, n) - u1 * u1.adjoint();
    hermitian_part(&(obj.a.as_matrix() + penalty * C64::from(gamma)))
}

pub(crate) fn solve_linearized(
    obj: &LiftedObjective,
    gamma: f64,
    v_prev: &LiftedMatrix,
    u1: &CVector,
    cfg: &SolverConfig,
    warm: &mut Option<AdmmWarmStart>,
) -> Result<InnerSolution> {
    if obj.dim() != v_prev.dim() {
        return Err(Error::DimensionMismatch(format!(
            "objective is {0}x{0}, iterate is {1}x{1}",
            obj.dim(),
            v_prev.dim()
        )));
    }
    let cost = linearized_cost(obj, gamma, u1);
    let run = admm_unit_diagonal(&cost, v_prev.as_matrix(), cfg, warm)?;
    let candidate = rescale_to_unit_diagonal(run.z);
    let prev_value = trace_product(&cost, v_prev.as_matrix()).re;
    let value = trace_product(&cost, &candidate).re;
    if value > prev_value {
        return Ok(InnerSolution {
            v: v_prev.clone(),
            iterations: run.iterations,
            primal_residual: run.primal,
            dual_residual: run.dual,
            kept_previous: true,
        });
    }
    let v = LiftedMatrix::new(HermitianMatrix::symmetrized(candidate)?)?;
    Ok(InnerSolution {
        v,
        iterations: run.iterations,
        primal_residual: run.primal,
        dual_residual: run.dual,
        kept_previous: false,
    })
}

struct AdmmRun {
    z: CMatrix,
    iterations: usize,
    primal: f64,
    dual: f64,
}

fn admm_unit_diagonal(
    cost: &CMatrix,
    start: &CMatrix,
    cfg: &SolverConfig,
    warm: &mut Option<AdmmWarmStart>,
) -> Result<AdmmRun> {
    let n = cost.nrows();
    let nf = n as f64;
    let cost_norm = cost.norm();
    let (mut u, mut rho) = match warm.take() {
        Some(w) if w.u.nrows() == n => (w.u, w.rho),
        _ => {
            let rho = (cost_norm / nf).max(1e-8);
            (dual_guess(cost, start)? / C64::from(-rho), rho)
        }
    };
    let mut z = start.clone();
    let eps_abs = cfg.sdp_tol * ABS_TOL_FACTOR * nf;
    let (mut primal, mut dual) = (f64::INFINITY, f64::INFINITY);
    let mut rho_updates = 0;

    for it in 1..=cfg.sdp_iter_max {
        let mut x = &z - &u - cost * C64::from(1.0 / rho);
        for k in 0..n {
            x[(k, k)] = C64::new(1.0, 0.0);
        }
        let z_old = std::mem::replace(
            &mut z,
            psd_project(&HermitianMatrix::symmetrized(&x + &u)?)?.into_inner(),
        );
        let gap = &x - &z;
        u += &gap;

        primal = gap.norm();
        dual = rho * (&z - &z_old).norm();
        let eps_pri = eps_abs + cfg.sdp_tol * x.norm().max(z.norm());
        let eps_dual = eps_abs + cfg.sdp_tol * (rho * u.norm()).max(cost_norm);
        if primal <= eps_pri && dual <= eps_dual {
            *warm = Some(AdmmWarmStart { u, rho });
            return Ok(AdmmRun {
                z,
                iterations: it,
                primal,
                dual,
            });
        }
        if it % BALANCE_EVERY == 0 && rho_updates < MAX_RHO_UPDATES {
            let (p, d) = (primal / eps_pri, dual / eps_dual);
            if p > BALANCE_RATIO * d {
                rho *= RHO_STEP;
                u /= C64::from(RHO_STEP);
                rho_updates += 1;
            } else if d > BALANCE_RATIO * p {
                rho /= RHO_STEP;
                u *= C64::from(RHO_STEP);
                rho_updates += 1;
            }
        }
    }
    Err(Error::SdpNonConvergence(Box::new(SdpFailure {
        last_iterate: z,
        primal_residual: primal,
        dual_residual: dual,
        iterations: cfg.sdp_iter_max,
    })))
}

/// PSD part of `C − Diag(y)` with `y_k = Re((C·V)_kk)`: the cone multiplier
/// that would certify `V` optimal if `V` were rank one and optimal.
fn dual_guess(cost: &CMatrix, v: &CMatrix) -> Result<CMatrix> {
    let cv = cost * v;
    let mut s = cost.clone();
    for k in 0..s.nrows() {
        s[(k, k)] -= cv[(k, k)].re;
    }
    Ok(psd_project(&HermitianMatrix::symmetrized(s)?)?.into_inner())
}

/// `D^{-1/2}·Z·D^{-1/2}` with `D = diag(Z)`; rows with a vanishing diagonal
/// become unit coordinate rows.
fn rescale_to_unit_diagonal(mut z: CMatrix) -> CMatrix {
    let n = z.nrows();
    let scale: Vec<Option<f64>> = (0..n)
        .map(|k| {
            let d = z[(k, k)].re;
            (d > MIN_DIAG).then(|| 1.0 / d.sqrt())
        })
        .collect();
    for i in 0..n {
        for j in 0..n {
            z[(i, j)] = match (scale[i], scale[j]) {
                _ if i == j => C64::new(1.0, 0.0),
                (Some(si), Some(sj)) => z[(i, j)] * (si * sj),
                _ => C64::new(0.0, 0.0),
            };
        }
    }
    z
}
