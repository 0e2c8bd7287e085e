//! Closed-form bounds for phase estimation under phase diffusion.
//!
//! Erasing part of the leaked information with `ĥ_E = λ p̂_E/(2β)` gives
//! `C_Q(λ) = (1-λ)² 4Δn² + λ²/(2β²)`, minimized at
//! `λ_opt = 8Δn²β²/(1 + 8Δn²β²)` where `C_Q = [1/(4Δn²) + 2β²]⁻¹`. For
//! Gaussian probes `Δn² ≤ 2N(N+1)` turns this into a bound on the mean
//! photon number alone.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::probe::PhotonStatistics;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaChoice {
    Optimal,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParametricBound {
    pub lambda: f64,
    /// `C_Q` at `lambda`.
    pub cq: f64,
    pub lambda_opt: f64,
    pub cq_opt: f64,
    /// `δφ ≥ 1/√(ν C_Q^opt)`, radians at the given ν.
    pub delta_phi_floor: f64,
    /// `δφ·√ν`, independent of ν.
    pub delta_phi_floor_sqrt_nu: f64,
    /// `Δn² = 0`: the probe carries no phase information at all.
    pub zero_variance: bool,
}

/// `(1-λ)² 4Δn² + λ²/(2β²)`; at `β² = 0` any `λ ≠ 0` costs infinitely much.
pub fn cq_lambda(var_n: f64, beta2: f64, lambda: f64) -> f64 {
    let noise = if lambda == 0.0 {
        0.0
    } else if beta2 == 0.0 {
        f64::INFINITY
    } else {
        lambda * lambda / (2.0 * beta2)
    };
    (1.0 - lambda).powi(2) * 4.0 * var_n + noise
}

pub fn lambda_opt(var_n: f64, beta2: f64) -> f64 {
    let x = 8.0 * var_n * beta2;
    x / (1.0 + x)
}

pub fn parametric_bound(
    stats: &PhotonStatistics,
    beta2: f64,
    lambda: LambdaChoice,
    nu: u32,
) -> Result<ParametricBound> {
    let var_n = stats.var_n;
    if !(var_n >= 0.0) || !(beta2 >= 0.0) || nu == 0 {
        return Err(Error::InvalidArgument(format!(
            "need var_n ≥ 0, beta2 ≥ 0, nu ≥ 1; got {var_n}, {beta2}, {nu}"
        )));
    }
    let lam_opt = lambda_opt(var_n, beta2);
    let zero_variance = var_n == 0.0;
    let cq_opt = if zero_variance {
        0.0
    } else {
        1.0 / (1.0 / (4.0 * var_n) + 2.0 * beta2)
    };
    let lambda = match lambda {
        LambdaChoice::Optimal => lam_opt,
        LambdaChoice::Fixed(l) => l,
    };
    let sqrt_nu_floor = if zero_variance {
        f64::INFINITY
    } else {
        (1.0 / (4.0 * var_n) + 2.0 * beta2).sqrt()
    };
    Ok(ParametricBound {
        lambda,
        cq: cq_lambda(var_n, beta2, lambda),
        lambda_opt: lam_opt,
        cq_opt,
        delta_phi_floor: sqrt_nu_floor / (nu as f64).sqrt(),
        delta_phi_floor_sqrt_nu: sqrt_nu_floor,
        zero_variance,
    })
}

/// `C_Q^max = [2β² + 1/(8N(N+1))]⁻¹`, zero for `N = 0`.
pub fn gaussian_bound(n_mean: f64, beta2: f64) -> f64 {
    if n_mean <= 0.0 {
        return 0.0;
    }
    1.0 / (2.0 * beta2 + 1.0 / (8.0 * n_mean * (n_mean + 1.0)))
}

/// `8N(N+1)`, the noiseless Gaussian optimum.
pub fn noiseless_gaussian_bound(n_mean: f64) -> f64 {
    8.0 * n_mean * (n_mean + 1.0)
}
