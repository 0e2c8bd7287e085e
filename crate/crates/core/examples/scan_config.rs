//! Drives a scan from a TOML config and emits JSON.

use qfi_bounds::output::render;
use qfi_bounds::scan::{run_scan, ScanConfig};

const CONFIG: &str = r#"
state_family = "displaced_squeezed"
N_grid = [0.5, 2.0, 4.0]
beta2_grid = [1e-2, 1e-1]
squeeze_fraction = 0.3
output_format = "json"
"#;

fn main() -> qfi_bounds::Result<()> {
    let cfg = ScanConfig::from_toml_str(CONFIG)?;
    let rows = run_scan(&cfg)?;
    print!("{}", render(&rows, cfg.output_format)?);
    Ok(())
}
