//! Invariant suite behind the `validate` subcommand.
//!
//! Every property reports its worst case against a fixed tolerance. The
//! channel and the support threshold of the variational solve can be
//! replaced, which is how the suite's own sensitivity is tested.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{cq_lambda, lambda_opt, parametric_bound, LambdaChoice};
use crate::channel::{
    apply_dephasing, dephased_state, dephased_state_derivative, env_cutoff_for_edge,
    factored_purification, mirror_purification, ChannelParams, Purification,
};
use crate::error::Result;
use crate::linalg::{c, ComplexMatrix};
use crate::probe::{
    coherent, displaced_squeezed, fock_superposition, squeezed_vacuum, Cutoff, ProbeState,
};
use crate::qfi::{
    analytic_rhs_mirror, classical_fisher, cq_of_purification, environment_rhs, momentum_family_h,
    optimal_h, qfi_pure, qfi_sld_oracle, Povm, DEFAULT_PROB_FLOOR,
};

pub type ChannelFn = fn(&ComplexMatrix, &ChannelParams) -> ComplexMatrix;

#[derive(Debug, Clone, Copy)]
pub struct ValidateOptions {
    pub seed: u64,
    /// Support threshold for the anticommutator solve (`None`: relative
    /// default).
    pub variational_rank_tol: Option<f64>,
    /// Channel under test in the composition-law property.
    pub channel: ChannelFn,
    pub povm_samples: usize,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            variational_rank_tol: None,
            channel: apply_dephasing,
            povm_samples: 50,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PropertyResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl fmt::Display for PropertyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<28} worst={:.3e} tol={:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.worst,
            self.tolerance
        )?;
        if !self.detail.is_empty() {
            write!(f, "  {}", self.detail)?;
        }
        Ok(())
    }
}

/// Tracks the worst value of an error measure and where it occurred.
struct Worst {
    name: &'static str,
    tolerance: f64,
    value: f64,
    at: String,
    error: Option<String>,
}

impl Worst {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            value: 0.0,
            at: String::new(),
            error: None,
        }
    }

    fn record(&mut self, value: f64, at: impl FnOnce() -> String) {
        if !(value <= self.value) {
            self.value = value;
            self.at = at();
        }
    }

    fn fail(&mut self, e: impl fmt::Display) {
        self.error.get_or_insert_with(|| e.to_string());
    }

    fn finish(self) -> PropertyResult {
        let passed = self.error.is_none() && self.value <= self.tolerance;
        let detail = match self.error {
            Some(e) => format!("error: {e}"),
            None if self.at.is_empty() => String::new(),
            None => format!("at {}", self.at),
        };
        PropertyResult {
            name: self.name,
            passed,
            worst: self.value,
            tolerance: self.tolerance,
            detail,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub results: Vec<PropertyResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn get(&self, name: &str) -> Option<&PropertyResult> {
        self.results.iter().find(|r| r.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            writeln!(f, "{r}")?;
        }
        let failed = self.results.iter().filter(|r| !r.passed).count();
        write!(f, "{} properties, {failed} failed", self.results.len())
    }
}

/// Probe cutoff used by the grid; the heaviest probe (squeezed, N = 2)
/// leaks below 1e-6 there.
pub const GRID_CUTOFF: usize = 64;
pub const GRID_BETA2: [f64; 3] = [1e-3, 1e-2, 1e-1];

/// Coherent (N ∈ {0.5, 1, 2, 5, 10}), squeezed vacuum (N ∈ {0.5, 2}) and
/// `(|0> + |4>)/√2`.
pub fn grid_probes() -> Vec<ProbeState> {
    let cut = Cutoff::Fixed(GRID_CUTOFF);
    let mut out: Vec<ProbeState> = [0.5f64, 1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|n| coherent(c(n.sqrt(), 0.0), cut))
        .collect();
    for n in [0.5f64, 2.0] {
        out.push(squeezed_vacuum(n.sqrt().asinh(), cut).expect("fits the grid cutoff"));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    out.push(fock_superposition(&[(0, c(h, 0.0)), (4, c(h, 0.0))], 5).expect("levels fit"));
    out
}

fn params(phi: f64, beta2: f64) -> ChannelParams {
    ChannelParams::new(phi, beta2, 1).expect("valid channel parameters")
}

fn max_entry_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
}

fn oracle(psi: &ProbeState, p: &ChannelParams) -> Result<f64> {
    let rho = dephased_state(psi, p);
    let drho = dephased_state_derivative(psi, p);
    Ok(qfi_sld_oracle(&rho, &drho, None)?.value)
}

/// Two dephasing steps compose into one, and the composite agrees with the
/// reduced state of the mirror-model dilation. The second clause pins the
/// sign of the exponent, which the composition law alone cannot see.
fn composition_law(opts: &ValidateOptions) -> PropertyResult {
    const COMPOSITION_TOL: f64 = 1e-12;
    const DILATION_TOL: f64 = 1e-9;
    let mut w = Worst::new("composition_law", 1.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let probes = [
        coherent(c(1.0, 0.3), Cutoff::Fixed(20)),
        fock_superposition(&[(0, c(h, 0.0)), (4, c(0.0, h))], 6).expect("levels fit"),
    ];
    let steps = [((0.3, 0.02), (0.5, 0.05)), ((-0.2, 1e-3), (1.1, 0.1))];
    for psi in &probes {
        let rho0 = psi.density_matrix();
        for &((phi1, b1), (phi2, b2)) in &steps {
            let twice = (opts.channel)(
                &(opts.channel)(rho0.matrix(), &params(phi1, b1)),
                &params(phi2, b2),
            );
            let total = params(phi1 + phi2, b1 + b2);
            let once = (opts.channel)(rho0.matrix(), &total);
            w.record(max_entry_diff(&twice, &once) / COMPOSITION_TOL, || {
                format!("{} (composition)", psi.label())
            });
            match mirror_purification(psi, &total, Cutoff::Auto) {
                Ok(p) => w.record(
                    max_entry_diff(&twice, p.reduced_system().matrix()) / DILATION_TOL,
                    || format!("{} (dilation)", psi.label()),
                ),
                Err(e) => w.fail(e),
            }
        }
    }
    let mut r = w.finish();
    r.detail = format!(
        "errors in units of 1e-12 (composition) and 1e-9 (dilation); {}",
        r.detail
    );
    r
}

fn purification_invariants(probes: &[ProbeState]) -> PropertyResult {
    let mut w = Worst::new("purification_invariants", 1e-9);
    for psi in probes {
        for &b in &GRID_BETA2 {
            let pr = params(0.4, b);
            let rho = dephased_state(psi, &pr);
            let mut check = |p: &Purification, route: &str| {
                let d = max_entry_diff(p.reduced_system().matrix(), rho.matrix())
                    .max((p.state.norm() - 1.0).abs())
                    .max(p.norm_drift().abs());
                w.record(d, || format!("{} beta2={b} {route}", psi.label()));
            };
            check(&factored_purification(psi, &pr), "factored");
            if b <= 1e-2 {
                match mirror_purification(psi, &pr, Cutoff::Auto) {
                    Ok(p) => check(&p, "mirror"),
                    Err(e) => w.fail(e),
                }
            }
        }
    }
    w.finish()
}

fn noiseless_identity(probes: &[ProbeState], opts: &ValidateOptions) -> PropertyResult {
    let mut w = Worst::new("noiseless_identity", 1e-8);
    for psi in probes {
        let pr = params(0.0, 0.0);
        let want = 4.0 * psi.statistics().var_n;
        let outcome = (|| -> Result<[f64; 3]> {
            let p = mirror_purification(psi, &pr, Cutoff::Auto)?;
            let var = optimal_h(&p, opts.variational_rank_tol)?.qfi;
            Ok([qfi_pure(&p), oracle(psi, &pr)?, var])
        })();
        match outcome {
            Ok(vals) => {
                for v in vals {
                    w.record((v - want).abs() / want.max(1e-300), || psi.label().into());
                }
            }
            Err(e) => w.fail(e),
        }
    }
    w.finish()
}

struct GridPoint {
    label: String,
    beta2: f64,
    var_n: f64,
    oracle: f64,
    variational: f64,
    residual_ratio: f64,
    covariance_gap: f64,
    gauge_gap: f64,
    cq_opt: f64,
}

fn evaluate_grid(probes: &[ProbeState], opts: &ValidateOptions) -> Vec<Result<GridPoint>> {
    let mut out = Vec::new();
    for psi in probes {
        for &beta2 in &GRID_BETA2 {
            out.push((|| {
                let pr = params(0.0, beta2);
                let p = factored_purification(psi, &pr);
                let v = optimal_h(&p, opts.variational_rank_tol)?;
                let r_norm = crate::linalg::frobenius_norm(environment_rhs(&p).matrix());
                let mut gauge_gap: f64 = 0.0;
                for shift in [-1.0, 1.0, 10.0] {
                    let cq = cq_of_purification(&p, Some(&v.h_opt.shifted(shift)))?;
                    gauge_gap = gauge_gap.max((cq - v.cq_at_opt).abs() / v.cq_at_opt.max(1.0));
                }
                let stats = psi.statistics();
                Ok(GridPoint {
                    label: psi.label().to_string(),
                    beta2,
                    var_n: stats.var_n,
                    oracle: oracle(psi, &pr)?,
                    variational: v.qfi,
                    residual_ratio: v.residual / r_norm.max(1.0),
                    covariance_gap: (v.covariance - v.var_h_opt).abs() / v.var_h_opt.max(1.0),
                    gauge_gap,
                    cq_opt: parametric_bound(&stats, beta2, LambdaChoice::Optimal, 1)?.cq_opt,
                })
            })());
        }
    }
    out
}

fn grid_property(
    name: &'static str,
    tolerance: f64,
    grid: &[Result<GridPoint>],
    measure: impl Fn(&GridPoint) -> f64,
) -> PropertyResult {
    let mut w = Worst::new(name, tolerance);
    for g in grid {
        match g {
            Ok(g) => w.record(measure(g), || format!("{} beta2={}", g.label, g.beta2)),
            Err(e) => w.fail(e),
        }
    }
    w.finish()
}

fn rhs_consistency(probes: &[ProbeState]) -> PropertyResult {
    let mut w = Worst::new("rhs_closed_form", 1e-9);
    for psi in probes {
        for &b in &GRID_BETA2 {
            let env = Cutoff::Fixed(env_cutoff_for_edge(psi, b, 1e-12));
            let outcome = mirror_purification(psi, &params(0.2, b), env).and_then(|p| {
                let closed = analytic_rhs_mirror(&p, b.sqrt())?;
                Ok(max_entry_diff(
                    environment_rhs(&p).matrix(),
                    closed.matrix(),
                ))
            });
            match outcome {
                Ok(d) => w.record(d, || format!("{} beta2={b}", psi.label())),
                Err(e) => w.fail(e),
            }
        }
    }
    w.finish()
}

fn lambda_family() -> PropertyResult {
    let mut w = Worst::new("lambda_family", 1e-6);
    let beta2 = 0.01;
    let psi = coherent(c(2f64.sqrt(), 0.0), Cutoff::Auto);
    let var_n = psi.statistics().var_n;
    match mirror_purification(&psi, &params(0.0, beta2), Cutoff::Auto) {
        Ok(p) => {
            for lambda in [0.0, 0.25, 0.5, lambda_opt(var_n, beta2), 1.0] {
                let want = cq_lambda(var_n, beta2, lambda);
                match momentum_family_h(p.dim_e, beta2.sqrt(), lambda)
                    .and_then(|h| cq_of_purification(&p, Some(&h)))
                {
                    Ok(cq) => w.record((cq - want).abs() / want, || format!("lambda={lambda}")),
                    Err(e) => w.fail(e),
                }
            }
        }
        Err(e) => w.fail(e),
    }
    w.finish()
}

/// Probes with number variance 1, 100 and 10⁴ (`(|0> + |n>)/√2`) plus
/// coherent and squeezed states, all at β² = 0.05.
fn noise_floor() -> PropertyResult {
    let beta2 = 0.05;
    let floor = 1.0 / (2.0 * beta2);
    let mut w = Worst::new("noise_floor", -1e-6);
    w.value = f64::NEG_INFINITY;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut probes: Vec<ProbeState> = [2usize, 20, 200]
        .iter()
        .map(|&n| fock_superposition(&[(0, c(h, 0.0)), (n, c(h, 0.0))], n + 1).expect("fits"))
        .collect();
    probes.push(coherent(c(10.0, 0.0), Cutoff::Auto));
    probes.push(squeezed_vacuum(2f64.sqrt().asinh(), Cutoff::Auto).expect("auto cutoff"));
    for psi in &probes {
        match oracle(psi, &params(0.0, beta2)) {
            Ok(f) => w.record(f - floor, || psi.label().into()),
            Err(e) => w.fail(e),
        }
    }
    let mut r = w.finish();
    r.detail = format!("qfi - 1/(2 beta2); {}", r.detail);
    r
}

fn monotone_in_noise(probes: &[ProbeState]) -> PropertyResult {
    let mut w = Worst::new("monotone_in_noise", 1e-9);
    let grid = [0.0, 1e-3, 1e-2, 1e-1, 1.0];
    for psi in probes {
        let mut prev: Option<f64> = None;
        for &b in &grid {
            match oracle(psi, &params(0.0, b)) {
                Ok(f) => {
                    if let Some(p) = prev {
                        w.record((f - p) / p.max(1.0), || {
                            format!("{} beta2={b}", psi.label())
                        });
                    }
                    prev = Some(f);
                }
                Err(e) => w.fail(e),
            }
        }
    }
    w.finish()
}

fn classical_below_quantum(opts: &ValidateOptions) -> PropertyResult {
    let mut w = Worst::new("classical_fisher_bound", 1e-9);
    w.value = f64::NEG_INFINITY;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let psi = coherent(c(1.0, 0.0), Cutoff::Auto);
    let pr = params(0.0, 0.02);
    let rho = dephased_state(&psi, &pr);
    let drho = dephased_state_derivative(&psi, &pr);
    let f = match qfi_sld_oracle(&rho, &drho, None) {
        Ok(f) => f.value,
        Err(e) => {
            w.fail(e);
            return w.finish();
        }
    };
    let d = rho.dim();
    for k in 0..opts.povm_samples {
        let povm = match k % 3 {
            0 => Ok(Povm::random_projective(d, &mut rng)),
            1 => Povm::random(d, 8, &mut rng),
            _ => {
                let bins = rng.random_range(2..d);
                Ok(Povm::random_projective(d, &mut rng).coarse_grained(bins))
            }
        };
        match povm.and_then(|m| classical_fisher(&rho, &drho, &m, DEFAULT_PROB_FLOOR)) {
            Ok(cf) => w.record(cf.value - f, || format!("sample {k}")),
            Err(e) => w.fail(e),
        }
    }
    let mut r = w.finish();
    r.detail = format!(
        "F_classical - F_Q over {} POVMs; {}",
        opts.povm_samples, r.detail
    );
    r
}

fn gaussian_variance_bound(opts: &ValidateOptions) -> PropertyResult {
    let mut w = Worst::new("gaussian_variance_bound", 0.0);
    w.value = f64::NEG_INFINITY;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
    for _ in 0..200 {
        let alpha = c(rng.random_range(-2.5..2.5), rng.random_range(-2.5..2.5));
        let r = rng.random_range(0.0..1.2);
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        match displaced_squeezed(alpha, r, theta, Cutoff::Auto) {
            Ok(psi) => {
                let s = psi.statistics();
                let slack = 1e-6 * (1.0 + s.mean_n * s.mean_n);
                w.record(s.var_n - 2.0 * s.mean_n * (s.mean_n + 1.0) - slack, || {
                    psi.label().into()
                });
            }
            Err(e) => w.fail(e),
        }
    }
    let mut r = w.finish();
    r.detail = format!("var_n - 2N(N+1) - slack; {}", r.detail);
    r
}

pub fn run_validation(opts: &ValidateOptions) -> ValidationReport {
    let probes = grid_probes();
    let grid = evaluate_grid(&probes, opts);
    let results = vec![
        composition_law(opts),
        purification_invariants(&probes),
        noiseless_identity(&probes, opts),
        grid_property("oracle_equivalence", 1e-6, &grid, |g| {
            (g.variational - g.oracle).abs() / g.oracle.max(1.0)
        }),
        grid_property("oracle_below_parametric", 1e-6, &grid, |g| {
            g.oracle / g.cq_opt.max(f64::MIN_POSITIVE) - 1.0
        }),
        grid_property("parametric_below_trivial", 1e-9, &grid, |g| {
            g.cq_opt / (4.0 * g.var_n).max(f64::MIN_POSITIVE) - 1.0
        }),
        grid_property("sylvester_residual", 1e-10, &grid, |g| g.residual_ratio),
        grid_property("gauge_invariance", 1e-10, &grid, |g| g.gauge_gap),
        grid_property("covariance_identity", 1e-8, &grid, |g| g.covariance_gap),
        rhs_consistency(&probes),
        lambda_family(),
        noise_floor(),
        monotone_in_noise(&probes),
        classical_below_quantum(opts),
        gaussian_variance_bound(opts),
    ];
    ValidationReport { results }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flipped(rho: &ComplexMatrix, p: &ChannelParams) -> ComplexMatrix {
        ComplexMatrix::from_fn(rho.nrows(), rho.ncols(), |m, n| {
            let d = m as f64 - n as f64;
            rho[(m, n)] * (c(p.beta2 * d * d, -p.phi * d)).exp()
        })
    }

    #[test]
    fn sign_flip_breaks_composition() {
        let opts = ValidateOptions {
            channel: flipped,
            ..ValidateOptions::default()
        };
        let r = composition_law(&opts);
        assert!(!r.passed, "{r}");
        assert!(composition_law(&ValidateOptions::default()).passed);
    }

    #[test]
    fn lambda_family_and_floor() {
        assert!(lambda_family().passed);
        assert!(noise_floor().passed, "{}", noise_floor());
    }
}
