//! Photon statistics of the probe families and the Gaussian variance limit
//! `Δn² ≤ 2N(N+1)`, reached by squeezed vacuum.

use qfi_bounds::linalg::C64;
use qfi_bounds::probe::{coherent, gaussian_with_mean, squeezed_vacuum, Cutoff};

fn main() -> qfi_bounds::Result<()> {
    let n = 4.0;
    let show = |label: &str, s: qfi_bounds::probe::PhotonStatistics, cutoff: usize| {
        println!(
            "{label:<22} N={:.6} var={:>10.6} 2N(N+1)={:>8.3} cutoff={cutoff}",
            s.mean_n,
            s.var_n,
            2.0 * s.mean_n * (s.mean_n + 1.0)
        )
    };
    let c = coherent(C64::new(2.0, 0.0), Cutoff::Auto);
    show("coherent", c.statistics(), c.cutoff());
    let sv = squeezed_vacuum(f64::sqrt(n).asinh(), Cutoff::Auto)?;
    show("squeezed vacuum", sv.statistics(), sv.cutoff());
    for f in [0.1, 0.5, 0.9] {
        let g = gaussian_with_mean(n, f, Cutoff::Auto)?;
        show(
            &format!("displaced squeezed f={f}"),
            g.statistics(),
            g.cutoff(),
        );
    }
    Ok(())
}
