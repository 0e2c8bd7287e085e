//! The variational minimum over purifications equals the SLD value.

use qfi_bounds::channel::{
    dephased_state, dephased_state_derivative, factored_purification, mirror_purification,
    ChannelParams,
};
use qfi_bounds::linalg::C64;
use qfi_bounds::probe::{coherent, squeezed_vacuum, Cutoff};
use qfi_bounds::qfi::{optimal_h, qfi_sld_oracle};

fn main() -> qfi_bounds::Result<()> {
    let probes = [
        coherent(C64::new(1.0, 0.0), Cutoff::Fixed(40)),
        squeezed_vacuum(0.8, Cutoff::Auto)?,
    ];
    for psi in &probes {
        for beta2 in [1e-3, 1e-2, 1e-1] {
            let params = ChannelParams::new(0.0, beta2, 1)?;
            let oracle = qfi_sld_oracle(
                &dephased_state(psi, &params),
                &dephased_state_derivative(psi, &params),
                None,
            )?
            .value;
            let factored = optimal_h(&factored_purification(psi, &params), None)?;
            let mirror = optimal_h(&mirror_purification(psi, &params, Cutoff::Auto)?, None)?;
            println!(
                "{:<28} beta2={beta2:<6} sld={oracle:.10} factored={:.10} (E rank {}) mirror={:.10} (C_Q raw {:.4})",
                psi.label(),
                factored.qfi,
                factored.env_rank,
                mirror.qfi,
                mirror.cq_raw,
            );
        }
    }
    Ok(())
}
