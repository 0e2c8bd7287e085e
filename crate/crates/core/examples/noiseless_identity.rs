//! Without diffusion every route returns `4Δn²`.

use qfi_bounds::channel::{
    dephased_state, dephased_state_derivative, mirror_purification, ChannelParams,
};
use qfi_bounds::linalg::C64;
use qfi_bounds::probe::{coherent, fock_superposition, squeezed_vacuum, Cutoff};
use qfi_bounds::qfi::{optimal_h, qfi_pure, qfi_sld_oracle};

fn main() -> qfi_bounds::Result<()> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let probes = vec![
        coherent(C64::new(2f64.sqrt(), 0.0), Cutoff::Auto),
        squeezed_vacuum(2f64.sqrt().asinh(), Cutoff::Auto)?,
        fock_superposition(&[(0, C64::new(h, 0.0)), (4, C64::new(h, 0.0))], 5)?,
    ];
    let params = ChannelParams::new(0.0, 0.0, 1)?;

    println!(
        "{:<44} {:>10} {:>10} {:>10} {:>10}",
        "probe", "4 var_n", "pure", "sld", "variational"
    );
    for psi in &probes {
        let p = mirror_purification(psi, &params, Cutoff::Auto)?;
        let rho = dephased_state(psi, &params);
        let drho = dephased_state_derivative(psi, &params);
        println!(
            "{:<44} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            psi.label(),
            4.0 * psi.statistics().var_n,
            qfi_pure(&p),
            qfi_sld_oracle(&rho, &drho, None)?.value,
            optimal_h(&p, None)?.qfi,
        );
    }
    Ok(())
}
