//! Best Gaussian QFI against the analytic Gaussian bound on a small grid.

use qfi_bounds::output::{render, OutputFormat};
use qfi_bounds::scan::{fig1, ScanConfig};

fn main() -> qfi_bounds::Result<()> {
    let cfg = ScanConfig {
        n_grid: vec![1.0, 5.0, 10.0, 20.0],
        beta2_grid: vec![5e-4, 5e-6],
        ..ScanConfig::default()
    };
    let rows = fig1(&cfg)?;
    print!("{}", render(&rows, OutputFormat::Csv)?);
    Ok(())
}
