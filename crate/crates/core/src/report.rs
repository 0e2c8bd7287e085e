//! One (probe, β², ν) point evaluated by every route.

use serde::{Deserialize, Serialize};

use crate::bounds::{gaussian_bound, parametric_bound, LambdaChoice};
use crate::channel::{
    dephased_state, dephased_state_derivative, factored_purification, mirror_purification,
    ChannelParams, Purification,
};
use crate::error::Result;
use crate::probe::{Cutoff, ProbeState};
use crate::qfi::{optimal_h, qfi_sld_oracle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PurificationRoute {
    /// Mirror model with a Fock-truncated environment.
    Mirror,
    /// Pivoted-Cholesky factor of the dephased state.
    #[default]
    Factored,
}

#[derive(Debug, Clone, Copy)]
pub struct PointOptions {
    pub route: PurificationRoute,
    pub env_cutoff: Cutoff,
    /// Support threshold for both the oracle and the anticommutator solve.
    pub rank_tol: Option<f64>,
    /// Skip the dense eigensolve of the system state.
    pub with_oracle: bool,
}

impl Default for PointOptions {
    fn default() -> Self {
        Self {
            route: PurificationRoute::Factored,
            env_cutoff: Cutoff::Auto,
            rank_tol: None,
            with_oracle: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub n_mean: f64,
    pub var_n: f64,
    pub beta2: f64,
    pub nu: u32,
    pub lambda_opt: f64,
    pub cq_parametric_opt: f64,
    pub cq_max_gaussian: f64,
    pub qfi_oracle: f64,
    pub qfi_variational: f64,
    pub delta_phi_floor: f64,
    pub delta_phi_floor_sqrt_nu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub cutoff: usize,
    pub env_dim: usize,
    pub env_rank: usize,
    pub sylvester_residual: f64,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointReport {
    pub bound: BoundReport,
    pub diagnostics: Diagnostics,
}

pub fn purify(
    psi: &ProbeState,
    params: &ChannelParams,
    route: PurificationRoute,
    env_cutoff: Cutoff,
) -> Result<Purification> {
    match route {
        PurificationRoute::Mirror => mirror_purification(psi, params, env_cutoff),
        PurificationRoute::Factored => Ok(factored_purification(psi, params)),
    }
}

pub fn evaluate_point(
    psi: &ProbeState,
    params: &ChannelParams,
    opts: &PointOptions,
) -> Result<PointReport> {
    let stats = psi.statistics();
    let parametric = parametric_bound(&stats, params.beta2, LambdaChoice::Optimal, params.nu)?;
    let mut flags = Vec::new();
    if psi.truncation_flagged() {
        flags.push("probe_truncated".to_string());
    }
    if parametric.zero_variance {
        flags.push("zero_variance".to_string());
    }

    let qfi_oracle = if opts.with_oracle {
        let rho = dephased_state(psi, params);
        let drho = dephased_state_derivative(psi, params);
        let sld = qfi_sld_oracle(&rho, &drho, opts.rank_tol)?;
        if sld.unreachable {
            flags.push("sld_unreachable".to_string());
        }
        sld.value
    } else {
        f64::NAN
    };

    let p = purify(psi, params, opts.route, opts.env_cutoff)?;
    if p.env_leakage > crate::channel::ENV_AUTO_LEAKAGE {
        flags.push("env_leakage".to_string());
    }
    let var = optimal_h(&p, opts.rank_tol)?;
    if var.unreachable_flag {
        flags.push("unreachable_information".to_string());
    }
    if var.identity_gap > crate::qfi::IDENTITY_TOL {
        flags.push("variational_not_stationary".to_string());
    }

    Ok(PointReport {
        bound: BoundReport {
            n_mean: stats.mean_n,
            var_n: stats.var_n,
            beta2: params.beta2,
            nu: params.nu,
            lambda_opt: parametric.lambda_opt,
            cq_parametric_opt: parametric.cq_opt,
            cq_max_gaussian: gaussian_bound(stats.mean_n, params.beta2),
            qfi_oracle,
            qfi_variational: var.qfi,
            delta_phi_floor: parametric.delta_phi_floor,
            delta_phi_floor_sqrt_nu: parametric.delta_phi_floor_sqrt_nu,
        },
        diagnostics: Diagnostics {
            cutoff: psi.cutoff(),
            env_dim: p.dim_e,
            env_rank: var.env_rank,
            sylvester_residual: var.residual,
            flags,
        },
    })
}
