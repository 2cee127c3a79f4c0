//! Relay receiver design and MSE bookkeeping.
//!
//! The relay estimates the sum/difference vector `x̃ = D·x` with a linear
//! operator `y = G·r`. For a fixed effective channel `H` the MSE
//!
//! ```text
//! MSE(G) = tr(G (P·H·Hᴴ + σ²I) Gᴴ) − 2·Re tr(G·P·H·Dᴴ) + 2P·Ns
//! ```
//!
//! is a convex quadratic in `G` with minimiser `G* = P·D·Hᴴ(P·H·Hᴴ + σ²I)⁻¹`.
//! For a fixed `G` the same MSE is a Hermitian quadratic form in the lifted
//! vector `[v; 1]`, which is what [`assemble_lifted_objective`] builds.

use serde::{Deserialize, Serialize};

use crate::model::{sum_difference_complex, ChannelRealization, SystemParams, N_SOURCES};
use crate::numerics::{hermitian_eig, trace_product, HermitianMatrix};
use crate::{CMatrix, CVector, Error, Result, C64};

const SINGULAR_RCOND: f64 = 1e-13;

/// `Ns × Nr` linear receiver applied to the relay's received vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    pub g: CMatrix,
}

impl Beamformer {
    pub fn new(g: CMatrix) -> Result<Self> {
        if g.shape() != (N_SOURCES, crate::model::N_RELAY_ANTENNAS) {
            return Err(Error::DimensionMismatch(format!(
                "beamformer must be 2x2, got {:?}",
                g.shape()
            )));
        }
        if g.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("beamformer has non-finite entries".into()));
        }
        Ok(Self { g })
    }

    pub fn zeros() -> Self {
        Self {
            g: CMatrix::zeros(N_SOURCES, crate::model::N_RELAY_ANTENNAS),
        }
    }

    pub fn apply(&self, r: &CVector) -> CVector {
        &self.g * r
    }
}

/// Which closed form the relay uses for `G`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BeamformerKind {
    /// `P·D·Hᴴ(P·H·Hᴴ + σ²I)⁻¹`, the exact MSE minimiser for the target `D·x`.
    #[default]
    TrueMmse,
    /// `(P·Hᴴ·H + σ²I)⁻¹·P·Hᴴ`: estimates `x` rather than `D·x`; kept for comparison.
    SymbolMmse,
}

impl std::str::FromStr for BeamformerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "true-mmse" => Ok(Self::TrueMmse),
            "symbol-mmse" => Ok(Self::SymbolMmse),
            _ => Err(Error::InvalidConfig(format!("unknown beamformer `{s}`"))),
        }
    }
}

impl std::fmt::Display for BeamformerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::TrueMmse => "true-mmse",
            Self::SymbolMmse => "symbol-mmse",
        })
    }
}

/// Closed-form MMSE receiver for the sum/difference target.
pub fn mmse_beamformer(h: &CMatrix, params: &SystemParams) -> Result<Beamformer> {
    beamformer(BeamformerKind::TrueMmse, h, params)
}

pub fn beamformer(kind: BeamformerKind, h: &CMatrix, params: &SystemParams) -> Result<Beamformer> {
    check_channel(h)?;
    let p = C64::from(params.p_tx);
    let noise = C64::from(params.noise_var);
    let g = match kind {
        BeamformerKind::TrueMmse => {
            let nr = h.nrows();
            let r = h * h.adjoint() * p + CMatrix::identity(nr, nr) * noise;
            let r_inv = invert_hermitian_pd(r)?;
            sum_difference_complex() * h.adjoint() * r_inv * p
        }
        BeamformerKind::SymbolMmse => {
            let ns = h.ncols();
            let gram = h.adjoint() * h * p + CMatrix::identity(ns, ns) * noise;
            invert_hermitian_pd(gram)? * h.adjoint() * p
        }
    };
    Beamformer::new(g)
}

/// Plain MMSE estimator of `x` itself, `P·Hᴴ(P·H·Hᴴ + σ²I)⁻¹`.
pub fn symbol_mmse_matrix(h: &CMatrix, params: &SystemParams) -> Result<CMatrix> {
    check_channel(h)?;
    let nr = h.nrows();
    let r = h * h.adjoint() * C64::from(params.p_tx)
        + CMatrix::identity(nr, nr) * C64::from(params.noise_var);
    Ok(h.adjoint() * invert_hermitian_pd(r)? * C64::from(params.p_tx))
}

fn check_channel(h: &CMatrix) -> Result<()> {
    if h.shape() != (crate::model::N_RELAY_ANTENNAS, N_SOURCES) {
        return Err(Error::DimensionMismatch(format!(
            "effective channel must be 2x2, got {:?}",
            h.shape()
        )));
    }
    Ok(())
}

fn invert_hermitian_pd(m: CMatrix) -> Result<CMatrix> {
    let herm = HermitianMatrix::symmetrized(m)?;
    let eig = hermitian_eig(&herm)?;
    let n = eig.values.len();
    let (hi, lo) = (eig.values[0], eig.values[n - 1]);
    if !(hi > 0.0) || lo <= SINGULAR_RCOND * hi {
        return Err(Error::Singular("receiver covariance is rank deficient"));
    }
    Ok(eig.reconstruct_with(|l| 1.0 / l))
}

/// `tr(G(P·H·Hᴴ + σ²I)Gᴴ) − 2·Re tr(G·P·H·Dᴴ) + 2P·Ns` (zero-mean noise).
pub fn mse_exact(g: &Beamformer, h: &CMatrix, params: &SystemParams) -> f64 {
    let p = params.p_tx;
    let gh = &g.g * h;
    let signal = gh.norm_squared() * p;
    let noise = g.g.norm_squared() * params.noise_var;
    let cross = trace_product(&gh, &sum_difference_complex().adjoint()).re;
    signal + noise - 2.0 * p * cross + 2.0 * p * N_SOURCES as f64
}

/// Post-receiver noise variance per stream, `σ²·{G·Gᴴ}_ii`.
pub fn stream_noise_variances(g: &Beamformer, noise_var: f64) -> [f64; 2] {
    let row = |i: usize| g.g.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>();
    [row(0) * noise_var, row(1) * noise_var]
}

/// The MSE for fixed `G` written as `tr(A·V) + c0` with `V = [v; 1][vᴴ 1]`.
#[derive(Debug, Clone)]
pub struct LiftedObjective {
    pub a: HermitianMatrix,
    pub c0: f64,
}

impl LiftedObjective {
    /// `(M+1)`.
    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// `Re tr(A·V) + c0`.
    pub fn value(&self, v: &CMatrix) -> f64 {
        self.a.trace_product(v) + self.c0
    }

    /// Value at a rank-one lifted point `w = [v; 1]` without forming `V`.
    pub fn value_at(&self, w: &CVector) -> f64 {
        (w.adjoint() * self.a.as_matrix() * w)[(0, 0)].re + self.c0
    }
}

/// Builds `A` and `c0` such that `tr(A·V(v)) + c0 = mse_exact(G, H(v))`.
///
/// Column `i` of `H(v)` is `b_i = Φ_i·v + h_ur,i = B_i·[v; 1]` with
/// `Φ_i = H_ir·diag(H_ui[:, i])`, so the quadratic part is
/// `P·Σ B_iᴴGᴴG·B_i` and the linear part `−2P·Re Σ d_iᴴ·G·B_i·w` is folded into
/// the last row and column of `A`.
pub fn assemble_lifted_objective(
    g: &Beamformer,
    ch: &ChannelRealization,
    params: &SystemParams,
) -> Result<LiftedObjective> {
    ch.check_dims()?;
    if g.g.shape() != (N_SOURCES, ch.h_ir.nrows()) {
        return Err(Error::DimensionMismatch(format!(
            "beamformer {:?} does not match {} relay antennas",
            g.g.shape(),
            ch.h_ir.nrows()
        )));
    }
    let m = ch.m_elements();
    let n = m + 1;
    let p = params.p_tx;
    let d = sum_difference_complex();
    let ghg = g.g.adjoint() * &g.g;
    let mut a = CMatrix::zeros(n, n);
    for i in 0..N_SOURCES {
        let mut b = CMatrix::zeros(ch.h_ir.nrows(), n);
        for j in 0..ch.h_ir.nrows() {
            for k in 0..m {
                b[(j, k)] = ch.h_ir[(j, k)] * ch.h_ui[(k, i)];
            }
            b[(j, m)] = ch.h_ur[(j, i)];
        }
        a += b.adjoint() * &ghg * &b * C64::from(p);
        let c: CVector = b.adjoint() * g.g.adjoint() * d.column(i);
        for k in 0..n {
            a[(m, k)] -= c[k].conj() * p;
            a[(k, m)] -= c[k] * p;
        }
    }
    let c0 = params.noise_var * g.g.norm_squared() + 2.0 * p * N_SOURCES as f64;
    Ok(LiftedObjective {
        a: HermitianMatrix::symmetrized(a)?,
        c0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        complex_normal, effective_channel, gen_channels, relay_receive, substream, PhaseProfile,
        SymbolPair,
    };
    use nalgebra::RowDVector;
    use rand::Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn random_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng, 1.0))
    }

    fn lifted(v: &PhaseProfile) -> CMatrix {
        let m = v.len();
        let w = CVector::from_fn(m + 1, |k, _| if k < m { v.as_vector()[k] } else { c(1.0) });
        &w * w.adjoint()
    }

    #[test]
    fn identity_channel_beamformer_is_half_d() {
        let params = SystemParams::new(1.0, 1.0, 1).unwrap();
        let g = mmse_beamformer(&CMatrix::identity(2, 2), &params).unwrap();
        let expect = sum_difference_complex() * c(0.5);
        assert!((g.g - expect).norm() < 1e-14);
    }

    #[test]
    fn zero_forcing_limit() {
        let mut rng = substream(1, &[]);
        let h = random_matrix(2, 2, &mut rng);
        let params = SystemParams::new(1.0, 1e-12, 1).unwrap();
        let g = mmse_beamformer(&h, &params).unwrap();
        let zf = sum_difference_complex() * h.clone().try_inverse().unwrap();
        assert!((&g.g - zf).norm() < 1e-8);
        assert!((&g.g * &h - sum_difference_complex()).norm() < 1e-8);
    }

    #[test]
    fn singular_noiseless_system_is_rejected() {
        let params = SystemParams::new(1.0, 0.0, 1).unwrap();
        let h = CMatrix::from_element(2, 2, c(1.0));
        assert!(matches!(mmse_beamformer(&h, &params), Err(Error::Singular(_))));
        assert!(matches!(
            beamformer(BeamformerKind::SymbolMmse, &h, &params),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn mmse_is_local_minimum() {
        let mut rng = substream(2, &[]);
        let params = SystemParams::new(1.0, 0.3, 1).unwrap();
        for _ in 0..5 {
            let h = random_matrix(2, 2, &mut rng);
            let g = mmse_beamformer(&h, &params).unwrap();
            let best = mse_exact(&g, &h, &params);
            for _ in 0..1000 {
                let delta = random_matrix(2, 2, &mut rng) * c(1e-3);
                let pert = Beamformer::new(&g.g + delta).unwrap();
                assert!(best <= mse_exact(&pert, &h, &params) + 1e-9 * best.abs());
            }
        }
    }

    #[test]
    fn symbol_mmse_is_d_inverse_times_true_mmse() {
        let mut rng = substream(3, &[]);
        let params = SystemParams::new(2.0, 0.4, 1).unwrap();
        let h = random_matrix(2, 2, &mut rng);
        let gx = beamformer(BeamformerKind::SymbolMmse, &h, &params).unwrap();
        let gs = mmse_beamformer(&h, &params).unwrap();
        // Push-through: (P·HᴴH + σ²I)⁻¹·P·Hᴴ = P·Hᴴ(P·HHᴴ + σ²I)⁻¹.
        let push = symbol_mmse_matrix(&h, &params).unwrap();
        assert!((&gx.g - &push).norm() < 1e-10);
        assert!((sum_difference_complex() * &gx.g - &gs.g).norm() < 1e-10);
        // The symbol estimator is not stationary for the D·x target.
        assert!(mse_exact(&gs, &h, &params) < mse_exact(&gx, &h, &params));
    }

    #[test]
    fn mse_hand_values() {
        let params = SystemParams::new(1.5, 0.7, 1).unwrap();
        let h = CMatrix::identity(2, 2);
        assert!((mse_exact(&Beamformer::zeros(), &h, &params) - 4.0 * 1.5).abs() < 1e-14);

        let params = SystemParams::new(1.0, 1.0, 1).unwrap();
        let g = mmse_beamformer(&h, &params).unwrap();
        assert!((mse_exact(&g, &h, &params) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn mse_matches_sample_average() {
        let mut rng = substream(4, &[]);
        let params = SystemParams::new(1.0, 0.5, 1).unwrap();
        let h = random_matrix(2, 2, &mut rng);
        for g in [
            mmse_beamformer(&h, &params).unwrap(),
            Beamformer::new(random_matrix(2, 2, &mut rng)).unwrap(),
        ] {
            let n = 200_000;
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..n {
                let s = SymbolPair::random(&mut rng, params.amplitude());
                let r = relay_receive(&h, &s.as_vector(), &params, &mut rng);
                let y = g.apply(&r);
                let t = s.sum_difference();
                let e = (y[0] - c(t[0])).norm_sqr() + (y[1] - c(t[1])).norm_sqr();
                sum += e;
                sum_sq += e * e;
            }
            let nf = n as f64;
            let mean = sum / nf;
            let se = ((sum_sq / nf - mean * mean) / nf).sqrt();
            let exact = mse_exact(&g, &h, &params);
            assert!((mean - exact).abs() < 3.0 * se, "{mean} vs {exact} (se {se})");
        }
    }

    #[test]
    fn stream_variances() {
        let g = Beamformer::new(CMatrix::identity(2, 2)).unwrap();
        assert_eq!(stream_noise_variances(&g, 0.3), [0.3, 0.3]);
        let g = Beamformer::new(sum_difference_complex() * c(0.5)).unwrap();
        let v = stream_noise_variances(&g, 0.8);
        assert!((v[0] - 0.4).abs() < 1e-15 && (v[1] - 0.4).abs() < 1e-15);

        let mut rng = substream(5, &[]);
        let g = Beamformer::new(random_matrix(2, 2, &mut rng)).unwrap();
        let sigma2 = 0.6;
        let expect = stream_noise_variances(&g, sigma2);
        let n = 100_000;
        let mut acc = [0.0; 2];
        for _ in 0..n {
            let noise = CVector::from_fn(2, |_, _| complex_normal(&mut rng, sigma2));
            let out = g.apply(&noise);
            acc[0] += out[0].norm_sqr();
            acc[1] += out[1].norm_sqr();
        }
        for i in 0..2 {
            let emp = acc[i] / n as f64;
            assert!((emp / expect[i] - 1.0).abs() < 0.02, "{emp} vs {}", expect[i]);
        }
    }

    #[test]
    fn lifted_objective_matches_exact_mse() {
        let mut rng = substream(6, &[]);
        let params = SystemParams::new(1.0, 0.2, 6).unwrap();
        let ch = gen_channels(&params, &mut rng);
        let h0 = effective_channel(&ch, &PhaseProfile::ones(6)).unwrap();
        let g = mmse_beamformer(&h0, &params).unwrap();
        let obj = assemble_lifted_objective(&g, &ch, &params).unwrap();
        for _ in 0..20 {
            let theta: Vec<f64> = (0..6).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect();
            let v = PhaseProfile::from_angles(&theta);
            let exact = mse_exact(&g, &effective_channel(&ch, &v).unwrap(), &params);
            let lifted_val = obj.value(&lifted(&v));
            assert!((lifted_val - exact).abs() <= 1e-8 * exact.abs(), "{lifted_val} vs {exact}");
        }
    }

    #[test]
    fn lifted_objective_constant_without_irs() {
        let mut rng = substream(7, &[]);
        let params = SystemParams::new(1.0, 0.2, 4).unwrap();
        let ch = gen_channels(&params, &mut rng).without_irs();
        let g = Beamformer::new(random_matrix(2, 2, &mut rng)).unwrap();
        let obj = assemble_lifted_objective(&g, &ch, &params).unwrap();
        let base = obj.value(&lifted(&PhaseProfile::ones(4)));
        for _ in 0..10 {
            let theta: Vec<f64> = (0..4).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect();
            let val = obj.value(&lifted(&PhaseProfile::from_angles(&theta)));
            assert!((val - base).abs() < 1e-12 * base.abs());
        }
    }

    #[test]
    fn lifted_objective_hand_expansion_m1() {
        // All-ones channels, G = I, P = σ² = 1: H(v) = (1 + v)·J and
        // MSE = 10 + 4·Re v, i.e. A = [[4, 2], [2, 0]], c0 = 6.
        let one = c(1.0);
        let ch = ChannelRealization {
            h_ir: CMatrix::from_element(2, 1, one),
            h_ui: CMatrix::from_element(1, 2, one),
            h_ur: CMatrix::from_element(2, 2, one),
            h_s1_d1: one,
            h_r_d1: RowDVector::from_element(2, one),
        };
        let params = SystemParams::new(1.0, 1.0, 1).unwrap();
        let g = Beamformer::new(CMatrix::identity(2, 2)).unwrap();
        let obj = assemble_lifted_objective(&g, &ch, &params).unwrap();
        let expect = CMatrix::from_row_slice(2, 2, &[c(4.0), c(2.0), c(2.0), c(0.0)]);
        assert!((obj.a.as_matrix() - expect).norm() < 1e-14);
        assert!((obj.c0 - 6.0).abs() < 1e-14);
    }

    #[test]
    fn symmetrisation_does_not_change_objective() {
        let mut rng = substream(8, &[]);
        let params = SystemParams::new(1.0, 0.5, 3).unwrap();
        let ch = gen_channels(&params, &mut rng);
        let g = Beamformer::new(random_matrix(2, 2, &mut rng)).unwrap();
        let obj = assemble_lifted_objective(&g, &ch, &params).unwrap();
        // Perturb by an anti-Hermitian part; Re tr(·V) must be unchanged on Hermitian V.
        let k = random_matrix(4, 4, &mut rng);
        let skew = (&k - k.adjoint()) * c(0.5);
        let raw = obj.a.as_matrix() + &skew;
        let v = lifted(&PhaseProfile::from_angles(&[0.1, 2.0, 4.0]));
        let t1 = trace_product(&raw, &v).re;
        let t2 = obj.a.trace_product(&v);
        assert!((t1 - t2).abs() <= 1e-10 * t2.abs().max(1.0));
    }
}
