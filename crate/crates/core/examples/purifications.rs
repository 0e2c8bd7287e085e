//! Three purifications of the same dephased state. Their raw `C_Q` differ;
//! the variational minimum does not.

use qfi_bounds::channel::{
    dephased_state, dephased_state_derivative, factored_purification, mirror_purification,
    spectral_purification, ChannelParams, DEFAULT_FD_STEP,
};
use qfi_bounds::linalg::C64;
use qfi_bounds::probe::{coherent, Cutoff};
use qfi_bounds::qfi::optimal_h;

fn main() -> qfi_bounds::Result<()> {
    let psi = coherent(C64::new(1.0, 0.0), Cutoff::Fixed(24));
    let params = ChannelParams::new(0.0, 0.05, 1)?;
    let rho = dephased_state(&psi, &params);
    let drho = dephased_state_derivative(&psi, &params);

    let routes = [
        ("mirror", mirror_purification(&psi, &params, Cutoff::Auto)?),
        ("factored", factored_purification(&psi, &params)),
        (
            "spectral",
            spectral_purification(&rho, &drho, DEFAULT_FD_STEP, Some(1e-14))?,
        ),
    ];
    for (name, p) in &routes {
        let v = optimal_h(p, None)?;
        println!(
            "{name:<9} dim E={:<4} C_Q raw={:.8} Var(h)={:.8} F_Q={:.8}",
            p.dim_e, v.cq_raw, v.var_h_opt, v.qfi
        );
    }
    Ok(())
}
