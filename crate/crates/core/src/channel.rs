//! Phase shift followed by Markovian phase diffusion, and purifications of
//! the resulting state.
//!
//! The channel maps `ρ_mn → ρ_mn exp(-iφ(m-n) - β²(m-n)²)`. Every
//! purification here carries its φ-derivative, which defines the generator
//! `Ĥ_{S,E}` through `i d|Φ>/dφ = Ĥ|Φ>`.

use nalgebra::SVD;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c, frobenius_norm, partial_trace_outer, resolve_rank_tol, ComplexMatrix, ComplexVector,
    DensityMatrix, Subsystem, C64,
};
use crate::probe::{Cutoff, ProbeState};

/// Weighted environment leakage accepted by the automatic env cutoff.
pub const ENV_AUTO_LEAKAGE: f64 = 1e-12;
/// Environment leakage above which a fixed env cutoff is rejected.
pub const ENV_FATAL_LEAKAGE: f64 = 1e-8;
/// Residual diagonal at which the pivoted Cholesky factorization stops.
pub const FACTOR_TOL: f64 = 1e-15;
pub const DEFAULT_FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Phase shift φ (radians), the estimated parameter.
    pub phi: f64,
    /// Diffusion strength β².
    pub beta2: f64,
    /// Number of repetitions ν.
    pub nu: u32,
}

impl ChannelParams {
    pub fn new(phi: f64, beta2: f64, nu: u32) -> Result<Self> {
        if !phi.is_finite() || !beta2.is_finite() || beta2 < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "need finite phi and beta2 ≥ 0, got phi={phi}, beta2={beta2}"
            )));
        }
        if nu == 0 {
            return Err(Error::InvalidArgument("nu must be at least 1".into()));
        }
        Ok(Self { phi, beta2, nu })
    }

    pub fn beta(&self) -> f64 {
        self.beta2.sqrt()
    }
}

/// `exp(-iφ(m-n) - β²(m-n)²)`
pub fn dephasing_factor(m: usize, n: usize, params: &ChannelParams) -> C64 {
    let d = m as f64 - n as f64;
    C64::from_polar((-params.beta2 * d * d).exp(), -params.phi * d)
}

/// Applies the channel entrywise to any Fock-basis operator.
pub fn apply_dephasing(rho: &ComplexMatrix, params: &ChannelParams) -> ComplexMatrix {
    ComplexMatrix::from_fn(rho.nrows(), rho.ncols(), |m, n| {
        rho[(m, n)] * dephasing_factor(m, n, params)
    })
}

pub fn dephased_state(psi: &ProbeState, params: &ChannelParams) -> DensityMatrix {
    let a = psi.amplitudes();
    let d = a.len();
    DensityMatrix::from_trusted(ComplexMatrix::from_fn(d, d, |m, n| {
        a[m] * a[n].conj() * dephasing_factor(m, n, params)
    }))
}

/// `dρ/dφ`: entry `(m, n)` of the dephased state times `-i(m-n)`.
pub fn dephased_state_derivative(psi: &ProbeState, params: &ChannelParams) -> ComplexMatrix {
    let a = psi.amplitudes();
    let d = a.len();
    ComplexMatrix::from_fn(d, d, |m, n| {
        a[m] * a[n].conj() * dephasing_factor(m, n, params) * c(0.0, -(m as f64 - n as f64))
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PurificationKind {
    /// Radiation-pressure mirror model; environment in a truncated Fock basis.
    Mirror { beta: f64, env_cutoff: usize },
    /// Pivoted-Cholesky factor of the dephased state; environment basis is
    /// the factor's column space and `Ĥ = n̂_S ⊗ 1`.
    Factored,
    /// Eigen-decomposition purification with finite-difference derivative.
    Spectral { fd_step: f64 },
}

/// Pure state on `S⊗E` (S-major) together with its φ-derivative.
#[derive(Debug, Clone)]
pub struct Purification {
    pub dim_s: usize,
    pub dim_e: usize,
    pub state: ComplexVector,
    pub derivative: ComplexVector,
    pub kind: PurificationKind,
    /// Norm discarded by environment truncation (mirror model only).
    pub env_leakage: f64,
    /// Nearly degenerate eigenvalues inside the finite-difference window.
    pub eigen_crossing: bool,
}

impl Purification {
    /// `Tr_E |Φ><Φ|`
    pub fn reduced_system(&self) -> DensityMatrix {
        DensityMatrix::from_trusted(partial_trace_outer(
            &self.state,
            &self.state,
            Subsystem::E,
            self.dim_s,
            self.dim_e,
        ))
    }

    /// `Tr_S |Φ><Φ|`
    pub fn reduced_environment(&self) -> DensityMatrix {
        DensityMatrix::from_trusted(partial_trace_outer(
            &self.state,
            &self.state,
            Subsystem::S,
            self.dim_s,
            self.dim_e,
        ))
    }

    /// `Re <Φ|dΦ>`, zero for a norm-preserving family.
    pub fn norm_drift(&self) -> f64 {
        self.state.dotc(&self.derivative).re
    }
}

fn number_generator_derivative(state: &ComplexVector, dim_e: usize) -> ComplexVector {
    ComplexVector::from_fn(state.len(), |k, _| state[k] * c(0.0, -((k / dim_e) as f64)))
}

/// Log-magnitudes of `<k|i a>` for `k < len` (the phase is `i^k`).
fn coherent_log_weights(a: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    if a == 0.0 {
        out.push(0.0);
        out.resize(len, f64::NEG_INFINITY);
        return out;
    }
    let mut lw = -a * a / 2.0;
    out.push(lw);
    for k in 1..len {
        lw += a.ln() - 0.5 * (k as f64).ln();
        out.push(lw);
    }
    out
}

fn i_pow(k: usize) -> C64 {
    match k % 4 {
        0 => c(1.0, 0.0),
        1 => c(0.0, 1.0),
        2 => c(-1.0, 0.0),
        _ => c(0.0, -1.0),
    }
}

/// Environment state `e^{i 2β n x̂}|0> = |i√2 β n>` on `len` Fock levels.
pub fn mirror_env_state(beta: f64, n: usize, len: usize) -> ComplexVector {
    let a = std::f64::consts::SQRT_2 * beta * n as f64;
    let lw = coherent_log_weights(a, len);
    ComplexVector::from_fn(len, |k, _| i_pow(k) * lw[k].exp())
}

fn env_leakage(psi: &ProbeState, beta: f64, len: usize) -> f64 {
    let amps = psi.amplitudes();
    (0..psi.cutoff())
        .filter(|&n| amps[n].norm_sqr() > 0.0)
        .map(|n| {
            let a = std::f64::consts::SQRT_2 * beta * n as f64;
            let kept: f64 = coherent_log_weights(a, len)
                .iter()
                .map(|lw| (2.0 * lw).exp())
                .sum();
            amps[n].norm_sqr() * (1.0 - kept).max(0.0)
        })
        .sum()
}

/// Smallest environment dimension meeting both the `a² + 6a + 10` rule
/// (with `a² = 2β² n_max²`) and the automatic leakage target.
pub fn auto_env_cutoff(psi: &ProbeState, beta2: f64) -> usize {
    let n_max = psi.max_populated_level() as f64;
    let a2 = 2.0 * beta2 * n_max * n_max;
    let mut len = (a2 + 6.0 * a2.sqrt() + 10.0).ceil() as usize;
    let beta = beta2.sqrt();
    while env_leakage(psi, beta, len) > ENV_AUTO_LEAKAGE {
        len += (len / 8).max(4);
    }
    len
}

/// Smallest environment dimension (at least the automatic one) whose top
/// Fock level carries amplitude at most `edge_tol` in every branch,
/// `max_n |c_n| |<len-1|env_n>| ≤ edge_tol`. Closed forms built from the
/// truncated ladder operator err by about this amount.
pub fn env_cutoff_for_edge(psi: &ProbeState, beta2: f64, edge_tol: f64) -> usize {
    let beta = beta2.sqrt();
    let amps = psi.amplitudes();
    let edge = |len: usize| {
        (0..psi.cutoff())
            .filter(|&n| amps[n].norm_sqr() > 0.0)
            .map(|n| {
                let a = std::f64::consts::SQRT_2 * beta * n as f64;
                amps[n].norm() * coherent_log_weights(a, len)[len - 1].exp()
            })
            .fold(0.0, f64::max)
    };
    let mut len = auto_env_cutoff(psi, beta2);
    while edge(len) > edge_tol {
        len += (len / 8).max(4);
    }
    len
}

/// Mirror-model purification `e^{-iφn̂_S} e^{i2β n̂_S x̂_E} |ψ>|0_E>`, with
/// `Ĥ_{S,E} = n̂_S ⊗ 1`.
pub fn mirror_purification(
    psi: &ProbeState,
    params: &ChannelParams,
    env_cutoff: Cutoff,
) -> Result<Purification> {
    let beta = params.beta();
    let dim_e = match env_cutoff {
        Cutoff::Auto => auto_env_cutoff(psi, params.beta2),
        Cutoff::Fixed(n) => {
            let leak = env_leakage(psi, beta, n);
            if leak > ENV_FATAL_LEAKAGE {
                return Err(Error::Truncation {
                    what: "environment",
                    cutoff: n,
                    leakage: leak,
                    suggested: auto_env_cutoff(psi, params.beta2),
                });
            }
            n
        }
    };
    let dim_s = psi.cutoff();
    let amps = psi.amplitudes();
    let mut state = ComplexVector::zeros(dim_s * dim_e);
    for s in 0..dim_s {
        if amps[s].norm_sqr() == 0.0 {
            continue;
        }
        let weight = amps[s] * C64::from_polar(1.0, -params.phi * s as f64);
        let env = mirror_env_state(beta, s, dim_e);
        state
            .rows_mut(s * dim_e, dim_e)
            .copy_from(&env.map(|z| z * weight));
    }
    let norm = state.norm();
    let env_leakage = (1.0 - norm * norm).max(0.0);
    state.unscale_mut(norm);
    let derivative = number_generator_derivative(&state, dim_e);
    Ok(Purification {
        dim_s,
        dim_e,
        state,
        derivative,
        kind: PurificationKind::Mirror {
            beta,
            env_cutoff: dim_e,
        },
        env_leakage,
        eigen_crossing: false,
    })
}

/// Pivoted Cholesky factor `L` (`n × r`) with `A ≈ L L†`, for a Hermitian PSD
/// matrix given by its diagonal and a column oracle.
pub fn pivoted_cholesky(
    diag: &[f64],
    column: impl Fn(usize) -> ComplexVector,
    tol: f64,
) -> ComplexMatrix {
    let n = diag.len();
    let mut resid = diag.to_vec();
    let mut cols: Vec<ComplexVector> = Vec::new();
    while let Some((p, &dp)) = resid.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) {
        if dp <= tol || cols.len() == n {
            break;
        }
        let mut col = column(p);
        for l in &cols {
            let w = l[p].conj();
            col.axpy(-w, l, c(1.0, 0.0));
        }
        let sd = dp.sqrt();
        col.unscale_mut(sd);
        col[p] = c(sd, 0.0);
        for i in 0..n {
            resid[i] -= col[i].norm_sqr();
        }
        resid[p] = 0.0;
        cols.push(col);
    }
    if cols.is_empty() {
        return ComplexMatrix::zeros(n, 0);
    }
    ComplexMatrix::from_columns(&cols)
}

/// Purification from a pivoted-Cholesky factor `B` of the dephased state,
/// `|Φ> = Σ_k B_{:,k} ⊗ |k>`. The channel is phase covariant, so
/// `B(φ') = e^{-i(φ'-φ)n̂} B(φ)` and the derivative is exact:
/// `d|Φ>/dφ = -i (n̂ ⊗ 1)|Φ>`. The environment dimension equals the
/// numerical rank of the state.
pub fn factored_purification(psi: &ProbeState, params: &ChannelParams) -> Purification {
    let a = psi.amplitudes();
    let dim_s = a.len();
    let diag: Vec<f64> = a.iter().map(|z| z.norm_sqr()).collect();
    let factor = pivoted_cholesky(
        &diag,
        |p| {
            ComplexVector::from_fn(dim_s, |m, _| {
                a[m] * a[p].conj() * dephasing_factor(m, p, params)
            })
        },
        FACTOR_TOL,
    );
    let dim_e = factor.ncols().max(1);
    let mut state = ComplexVector::zeros(dim_s * dim_e);
    for s in 0..dim_s {
        for k in 0..factor.ncols() {
            state[s * dim_e + k] = factor[(s, k)];
        }
    }
    let norm = state.norm();
    state.unscale_mut(norm);
    let derivative = number_generator_derivative(&state, dim_e);
    Purification {
        dim_s,
        dim_e,
        state,
        derivative,
        kind: PurificationKind::Factored,
        env_leakage: 0.0,
        eigen_crossing: false,
    }
}

/// `√λ_k` scaled support eigenvectors of `m`, the `rank` largest.
fn support_factor(m: &ComplexMatrix, rank: usize) -> (ComplexMatrix, Vec<f64>) {
    let eig = DensityMatrix::from_trusted(m.clone()).eig();
    let d = eig.dim();
    let mut b = ComplexMatrix::zeros(d, rank);
    let mut lams = Vec::with_capacity(rank);
    for (j, k) in (d - rank..d).enumerate() {
        let l = eig.eigenvalues[k].max(0.0);
        lams.push(l);
        b.set_column(j, &eig.eigenvectors.column(k).scale(l.sqrt()));
    }
    (b, lams)
}

/// Rotates the environment side of `b` (columns) to best match `target`
/// (orthogonal Procrustes): `b Q` with `Q = polar(b† target)`.
fn align_environment(b: &ComplexMatrix, target: &ComplexMatrix) -> ComplexMatrix {
    let m = b.adjoint() * target;
    let svd = SVD::new(m, true, true);
    let q = svd.u.expect("u requested") * svd.v_t.expect("v_t requested");
    b * q
}

/// Purification `Σ_k √λ_k |e_k>|k>` from the eigendecomposition of `rho`,
/// with its derivative by central differences of `rho ± fd_step·drho`.
///
/// Eigenvectors are defined only up to phases (and rotations inside
/// degenerate subspaces), so each shifted factor is aligned to the central
/// one by a unitary on `E` before differencing. Eigenvalues at or below
/// `rank_tol` are dropped from all three factors.
pub fn spectral_purification(
    rho: &DensityMatrix,
    rho_derivative: &ComplexMatrix,
    fd_step: f64,
    rank_tol: Option<f64>,
) -> Result<Purification> {
    if !(fd_step > 1e-8 && fd_step < 1e-3) {
        return Err(Error::InvalidArgument(format!(
            "fd_step must lie in (1e-8, 1e-3), got {fd_step}"
        )));
    }
    let d = rho.dim();
    if rho_derivative.nrows() != d || rho_derivative.ncols() != d {
        return Err(Error::Dimension(
            "rho and its derivative differ in shape".into(),
        ));
    }
    let eig = rho.eig();
    let tol = resolve_rank_tol(rank_tol, &eig);
    let rank = eig.eigenvalues.iter().filter(|&&l| l > tol).count().max(1);
    let support = &eig.eigenvalues[d - rank..];
    let scale = frobenius_norm(rho_derivative).max(1.0);
    let eigen_crossing = support
        .windows(2)
        .any(|w| w[1] - w[0] < 10.0 * fd_step * scale);
    if eigen_crossing {
        log::warn!("spectral purification: eigenvalue gap inside the finite-difference window");
    }

    let (b0, _) = support_factor(rho.matrix(), rank);
    let shifted = |sign: f64| {
        let m = rho.matrix() + rho_derivative.scale(sign * fd_step);
        let (b, _) = support_factor(&((&m + m.adjoint()).scale(0.5)), rank);
        align_environment(&b, &b0)
    };
    let b_plus = shifted(1.0);
    let b_minus = shifted(-1.0);
    let db = (b_plus - b_minus).unscale(2.0 * fd_step);

    let flatten =
        |b: &ComplexMatrix| ComplexVector::from_fn(d * rank, |k, _| b[(k / rank, k % rank)]);
    let mut state = flatten(&b0);
    let norm = state.norm();
    state.unscale_mut(norm);
    let derivative = flatten(&db).unscale(norm);
    Ok(Purification {
        dim_s: d,
        dim_e: rank,
        state,
        derivative,
        kind: PurificationKind::Spectral { fd_step },
        env_leakage: 0.0,
        eigen_crossing,
    })
}
