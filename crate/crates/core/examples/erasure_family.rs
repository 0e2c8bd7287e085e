//! Scans the one-parameter environment generator `ĥ = λ p̂_E/(2β)` on the
//! mirror purification and compares with `(1-λ)² 4Δn² + λ²/(2β²)`.

use qfi_bounds::bounds::{cq_lambda, lambda_opt};
use qfi_bounds::channel::{mirror_purification, ChannelParams};
use qfi_bounds::linalg::C64;
use qfi_bounds::probe::{coherent, Cutoff};
use qfi_bounds::qfi::{cq_of_purification, momentum_family_h, optimal_h};

fn main() -> qfi_bounds::Result<()> {
    let beta2 = 0.01;
    let psi = coherent(C64::new(2f64.sqrt(), 0.0), Cutoff::Auto);
    let var_n = psi.statistics().var_n;
    let p = mirror_purification(&psi, &ChannelParams::new(0.0, beta2, 1)?, Cutoff::Auto)?;

    let best = lambda_opt(var_n, beta2);
    println!("lambda_opt = {best:.6}, environment dim = {}", p.dim_e);
    for k in 0..=10 {
        let lambda = k as f64 / 10.0;
        let h = momentum_family_h(p.dim_e, beta2.sqrt(), lambda)?;
        println!(
            "lambda={lambda:.1}  C_Q={:.8}  closed form={:.8}",
            cq_of_purification(&p, Some(&h))?,
            cq_lambda(var_n, beta2, lambda)
        );
    }
    println!("full optimum over all h: {:.8}", optimal_h(&p, None)?.qfi);
    Ok(())
}
