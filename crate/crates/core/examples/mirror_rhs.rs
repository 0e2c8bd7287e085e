//! For the mirror model the right-hand side of the anticommutator equation
//! has a closed form in the environment ladder operators.

use qfi_bounds::channel::{env_cutoff_for_edge, mirror_purification, ChannelParams};
use qfi_bounds::linalg::{frobenius_norm, C64};
use qfi_bounds::probe::{coherent, Cutoff};
use qfi_bounds::qfi::{analytic_rhs_mirror, environment_rhs};

fn main() -> qfi_bounds::Result<()> {
    let psi = coherent(C64::new(1.0, 0.0), Cutoff::Auto);
    for beta2 in [1e-3, 5e-2, 0.2] {
        let env = Cutoff::Fixed(env_cutoff_for_edge(&psi, beta2, 1e-12));
        let p = mirror_purification(&psi, &ChannelParams::new(0.3, beta2, 1)?, env)?;
        let generic = environment_rhs(&p);
        let closed = analytic_rhs_mirror(&p, beta2.sqrt())?;
        let diff = (generic.matrix() - closed.matrix())
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()));
        println!(
            "beta2={beta2:<6} env dim={:<4} |R|_F={:.6}  max entry difference={diff:.2e}",
            p.dim_e,
            frobenius_norm(generic.matrix())
        );
    }
    Ok(())
}
