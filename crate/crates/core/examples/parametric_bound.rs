//! The closed-form bound: optimal erasure fraction, `C_Q^opt` and the
//! precision floor, and how the floor saturates at `1/(2β²)`.

use qfi_bounds::bounds::{parametric_bound, LambdaChoice};
use qfi_bounds::probe::PhotonStatistics;

fn main() -> qfi_bounds::Result<()> {
    let beta2 = 0.05;
    let nu = 100;
    println!(
        "beta2 = {beta2}, nu = {nu}, noise floor 1/(2 beta2) = {}",
        1.0 / (2.0 * beta2)
    );
    println!(
        "{:>10} {:>10} {:>12} {:>12}",
        "var_n", "lambda", "C_Q^opt", "dphi floor"
    );
    for var_n in [0.25, 1.0, 10.0, 100.0, 1e4, 1e6] {
        let stats = PhotonStatistics {
            mean_n: var_n,
            var_n,
        };
        let b = parametric_bound(&stats, beta2, LambdaChoice::Optimal, nu)?;
        println!(
            "{var_n:>10} {:>10.6} {:>12.6} {:>12.6}",
            b.lambda_opt, b.cq_opt, b.delta_phi_floor
        );
    }
    Ok(())
}
