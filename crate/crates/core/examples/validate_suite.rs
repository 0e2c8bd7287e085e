//! Runs the invariant suite, then again with a deliberately coarse support
//! threshold in the variational solve.

use qfi_bounds::validate::{run_validation, ValidateOptions};

fn main() {
    println!("{}\n", run_validation(&ValidateOptions::default()));
    let coarse = ValidateOptions {
        variational_rank_tol: Some(1e-2),
        ..ValidateOptions::default()
    };
    println!("{}", run_validation(&coarse));
}
