//! System parameters, channel realizations and forward propagation.
//!
//! Bits map to symbols as `0 → +a`, `1 → -a`, with `a = √P`. The XOR symbol is
//! `+1` exactly when the two bits differ, which is the hypothesis under which
//! the sum stream `x1 + x2` is zero.

use nalgebra::{Matrix2, RowDVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{CMatrix, CVector, Error, Result, C64};

/// Number of sources.
pub const N_SOURCES: usize = 2;
/// Number of relay antennas.
pub const N_RELAY_ANTENNAS: usize = 2;

const UNIT_MODULUS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Per-source transmit power `P`.
    pub p_tx: f64,
    /// Relay noise variance `σ²` (complex, per antenna).
    pub noise_var: f64,
    /// Relay noise mean `μ`. The closed-form BERs assume zero.
    pub noise_mean: C64,
    /// Number of IRS elements `M`.
    pub m_elements: usize,
}

impl SystemParams {
    pub fn new(p_tx: f64, noise_var: f64, m_elements: usize) -> Result<Self> {
        if !(p_tx > 0.0 && p_tx.is_finite()) {
            return Err(Error::InvalidParameter(format!("p_tx must be > 0, got {p_tx}")));
        }
        if !(noise_var >= 0.0 && noise_var.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise_var must be finite and >= 0, got {noise_var}"
            )));
        }
        if m_elements == 0 {
            return Err(Error::InvalidParameter("m_elements must be >= 1".into()));
        }
        Ok(Self {
            p_tx,
            noise_var,
            noise_mean: C64::new(0.0, 0.0),
            m_elements,
        })
    }

    /// `P = 1`, `σ² = 10^(-snr_db/10)`. `+∞` dB gives a noiseless relay.
    pub fn from_snr_db(snr_db: f64, m_elements: usize) -> Result<Self> {
        if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
            return Err(Error::InvalidParameter(format!("bad SNR {snr_db} dB")));
        }
        Self::new(1.0, 10f64.powf(-snr_db / 10.0), m_elements)
    }

    pub fn with_noise_mean(mut self, mu: C64) -> Self {
        self.noise_mean = mu;
        self
    }

    /// BPSK amplitude `a = √P`.
    pub fn amplitude(&self) -> f64 {
        self.p_tx.sqrt()
    }

    pub fn n_sources(&self) -> usize {
        N_SOURCES
    }

    pub fn n_relay_antennas(&self) -> usize {
        N_RELAY_ANTENNAS
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * (self.p_tx / self.noise_var).log10()
    }
}

/// One block-static draw of every fading coefficient in the network.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// IRS → relay, `Nr × M`.
    pub h_ir: CMatrix,
    /// Sources → IRS, `M × Ns`.
    pub h_ui: CMatrix,
    /// Sources → relay direct, `Nr × Ns`.
    pub h_ur: CMatrix,
    /// `S1 → D1`.
    pub h_s1_d1: C64,
    /// Relay → `D1`, `1 × Nr`.
    pub h_r_d1: RowDVector<C64>,
}

impl ChannelRealization {
    pub fn m_elements(&self) -> usize {
        self.h_ir.ncols()
    }

    pub fn check_dims(&self) -> Result<()> {
        let m = self.h_ir.ncols();
        let ok = self.h_ir.nrows() == N_RELAY_ANTENNAS
            && self.h_ui.shape() == (m, N_SOURCES)
            && self.h_ur.shape() == (N_RELAY_ANTENNAS, N_SOURCES)
            && self.h_r_d1.ncols() == N_RELAY_ANTENNAS;
        if ok {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "channel shapes h_ir {:?}, h_ui {:?}, h_ur {:?}, h_r_d1 {:?}",
                self.h_ir.shape(),
                self.h_ui.shape(),
                self.h_ur.shape(),
                self.h_r_d1.shape()
            )))
        }
    }

    /// Same realization with the reflected path removed.
    pub fn without_irs(&self) -> Self {
        let mut ch = self.clone();
        ch.h_ir.fill(C64::new(0.0, 0.0));
        ch
    }
}

/// IRS configuration: `v_m = e^{jθ_m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile(CVector);

impl PhaseProfile {
    pub fn new(v: CVector) -> Result<Self> {
        if let Some((m, z)) = v
            .iter()
            .enumerate()
            .find(|(_, z)| (z.norm() - 1.0).abs() > UNIT_MODULUS_TOL)
        {
            return Err(Error::InvalidParameter(format!(
                "phase entry {m} has modulus {} (must be 1)",
                z.norm()
            )));
        }
        Ok(Self(v))
    }

    pub fn from_angles(theta: &[f64]) -> Self {
        Self(CVector::from_iterator(
            theta.len(),
            theta.iter().map(|&t| C64::from_polar(1.0, t)),
        ))
    }

    /// All phases zero.
    pub fn ones(m: usize) -> Self {
        Self(CVector::from_element(m, C64::new(1.0, 0.0)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_vector(&self) -> &CVector {
        &self.0
    }

    /// Angles in `[0, 2π)`.
    pub fn angles(&self) -> Vec<f64> {
        self.0
            .iter()
            .map(|z| z.arg().rem_euclid(std::f64::consts::TAU))
            .collect()
    }
}

/// Two source bits, their BPSK symbols and the XOR symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolPair {
    pub bits: [u8; 2],
    pub symbols: [f64; 2],
    /// `+1` iff the bits differ.
    pub xor_symbol: i8,
}

impl SymbolPair {
    pub fn from_bits(b1: u8, b2: u8, amplitude: f64) -> Self {
        debug_assert!(b1 <= 1 && b2 <= 1);
        Self {
            bits: [b1, b2],
            symbols: [bit_to_symbol(b1, amplitude), bit_to_symbol(b2, amplitude)],
            xor_symbol: if b1 != b2 { 1 } else { -1 },
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, amplitude: f64) -> Self {
        let b1 = rng.random::<bool>() as u8;
        let b2 = rng.random::<bool>() as u8;
        Self::from_bits(b1, b2, amplitude)
    }

    pub fn as_vector(&self) -> CVector {
        CVector::from_iterator(2, self.symbols.iter().map(|&s| C64::from(s)))
    }

    /// `(x1 + x2, x1 - x2)`.
    pub fn sum_difference(&self) -> [f64; 2] {
        [
            self.symbols[0] + self.symbols[1],
            self.symbols[0] - self.symbols[1],
        ]
    }
}

/// `0 → +a`, `1 → -a`.
pub fn bit_to_symbol(bit: u8, amplitude: f64) -> f64 {
    if bit == 0 {
        amplitude
    } else {
        -amplitude
    }
}

/// One Rayleigh draw; every entry is `CN(0, 1)`.
///
/// Entries are drawn in a fixed order (`h_ir`, `h_ui`, `h_ur`, `h_s1_d1`,
/// `h_r_d1`, each column-major) so that a given stream always yields the same
/// realization and the IRS matrices are consumed even when the IRS is unused.
pub fn gen_channels<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> ChannelRealization {
    let m = params.m_elements;
    let h_ir = random_cn_matrix(N_RELAY_ANTENNAS, m, rng);
    let h_ui = random_cn_matrix(m, N_SOURCES, rng);
    let h_ur = random_cn_matrix(N_RELAY_ANTENNAS, N_SOURCES, rng);
    let h_s1_d1 = complex_normal(rng, 1.0);
    let h_r_d1 = RowDVector::from_iterator(
        N_RELAY_ANTENNAS,
        (0..N_RELAY_ANTENNAS).map(|_| complex_normal(rng, 1.0)),
    );
    ChannelRealization {
        h_ir,
        h_ui,
        h_ur,
        h_s1_d1,
        h_r_d1,
    }
}

fn random_cn_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    for z in m.iter_mut() {
        *z = complex_normal(rng, 1.0);
    }
    m
}

/// Circularly-symmetric `CN(0, var)` sample.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, var: f64) -> C64 {
    let s = (0.5 * var).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(s * re, s * im)
}

/// `H = H_ir·diag(v)·H_ui + H_ur`.
pub fn effective_channel(ch: &ChannelRealization, v: &PhaseProfile) -> Result<CMatrix> {
    effective_channel_raw(ch, v.as_vector())
}

/// [`effective_channel`] for an arbitrary (not necessarily unit-modulus) `v`.
pub fn effective_channel_raw(ch: &ChannelRealization, v: &CVector) -> Result<CMatrix> {
    ch.check_dims()?;
    if v.len() != ch.m_elements() {
        return Err(Error::DimensionMismatch(format!(
            "phase profile has {} entries, IRS has {}",
            v.len(),
            ch.m_elements()
        )));
    }
    let mut scaled = ch.h_ir.clone();
    for (m, mut col) in scaled.column_iter_mut().enumerate() {
        col *= v[m];
    }
    Ok(scaled * &ch.h_ui + &ch.h_ur)
}

/// `D = [[1, 1], [1, -1]]`, so that `D·x = (x1 + x2, x1 - x2)` and `D·D = 2I`.
pub fn sum_difference_matrix() -> Matrix2<f64> {
    Matrix2::new(1.0, 1.0, 1.0, -1.0)
}

/// `D` as a dynamic complex matrix.
pub fn sum_difference_complex() -> CMatrix {
    let d = sum_difference_matrix();
    CMatrix::from_fn(2, 2, |i, j| C64::from(d[(i, j)]))
}

/// `r = H·x + n` with `n_j ~ CN(μ, σ²)` i.i.d.
pub fn relay_receive<R: Rng + ?Sized>(
    h: &CMatrix,
    x: &CVector,
    params: &SystemParams,
    rng: &mut R,
) -> CVector {
    let mut r = h * x;
    for z in r.iter_mut() {
        *z += complex_normal(rng, params.noise_var) + params.noise_mean;
    }
    r
}

/// Deterministic independent stream for the task identified by `path` under
/// `seed`. Used to give every (sweep point, realization, purpose) its own
/// random numbers so results do not depend on scheduling.
pub fn substream(seed: u64, path: &[u64]) -> ChaCha8Rng {
    let mut state = splitmix64(seed ^ 0x6a09_e667_f3bc_c909);
    for &p in path {
        state = splitmix64(state ^ splitmix64(p.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    }
    ChaCha8Rng::seed_from_u64(state)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
