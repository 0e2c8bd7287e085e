//! Classical Fisher information of a few measurements against the QFI.

use qfi_bounds::channel::{dephased_state, dephased_state_derivative, ChannelParams};
use qfi_bounds::linalg::C64;
use qfi_bounds::probe::{coherent, Cutoff};
use qfi_bounds::qfi::{classical_fisher, qfi_sld_oracle, Povm, DEFAULT_PROB_FLOOR};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qfi_bounds::Result<()> {
    let psi = coherent(C64::new(1.0, 0.0), Cutoff::Auto);
    let params = ChannelParams::new(0.0, 0.02, 1)?;
    let rho = dephased_state(&psi, &params);
    let drho = dephased_state_derivative(&psi, &params);
    let d = rho.dim();
    println!("F_Q = {:.6}", qfi_sld_oracle(&rho, &drho, None)?.value);

    let fisher =
        |povm: &Povm| classical_fisher(&rho, &drho, povm, DEFAULT_PROB_FLOOR).map(|f| f.value);
    println!(
        "photon counting  F = {:.6}",
        fisher(&Povm::photon_number(d))?
    );
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for k in 0..5 {
        let proj = Povm::random_projective(d, &mut rng);
        println!(
            "random basis {k}   F = {:.6}  (3 bins: {:.6})",
            fisher(&proj)?,
            fisher(&proj.coarse_grained(3))?
        );
    }
    println!(
        "random 8-outcome F = {:.6}",
        fisher(&Povm::random(d, 8, &mut rng)?)?
    );
    Ok(())
}
