//! Grid scans over mean photon number and diffusion strength.
//!
//! Rows are computed independently (possibly on several threads) and emitted
//! in grid order, `beta2_grid` outer and `N_grid` inner, so a sub-grid
//! reproduces the matching rows of the full grid exactly.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bounds::{gaussian_bound, noiseless_gaussian_bound};
use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::linalg::{c, C64};
use crate::output::{Cell, OutputFormat, Record};
use crate::probe::{coherent, fock, gaussian_with_mean, squeezed_vacuum, Cutoff, ProbeState};
use crate::qfi::optimal_h;
use crate::report::{evaluate_point, purify, PointOptions, PointReport, PurificationRoute};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum StateFamily {
    #[default]
    Coherent,
    SqueezedVacuum,
    /// Displaced squeezed state at fixed mean photon number with
    /// `squeeze_fraction` of it in squeezing.
    DisplacedSqueezed,
    Fock,
    CustomAmplitudes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub state_family: StateFamily,
    #[serde(rename = "N_grid", alias = "n_grid")]
    pub n_grid: Vec<f64>,
    pub beta2_grid: Vec<f64>,
    pub nu: u32,
    pub cutoff: Cutoff,
    pub env_cutoff: Cutoff,
    /// Points over the squeezing fraction `[0, 1]` in `fig1`.
    pub gaussian_scan_resolution: usize,
    pub output_format: OutputFormat,
    pub seed: u64,
    pub phi: f64,
    pub squeeze_fraction: f64,
    /// `[re, im]` pairs for `custom_amplitudes`.
    pub amplitudes: Vec<[f64; 2]>,
    pub purification: PurificationRoute,
    /// Also evaluate the SLD oracle (one dense eigensolve on S per point).
    pub with_oracle: bool,
    /// Fill `wall_time_ms`; off by default so output is reproducible byte
    /// for byte.
    pub record_timing: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            state_family: StateFamily::Coherent,
            n_grid: (1..=30).map(f64::from).collect(),
            beta2_grid: vec![5e-4, 5e-5, 5e-6],
            nu: 1,
            cutoff: Cutoff::Auto,
            env_cutoff: Cutoff::Auto,
            gaussian_scan_resolution: 21,
            output_format: OutputFormat::Csv,
            seed: 0,
            phi: 0.0,
            squeeze_fraction: 0.5,
            amplitudes: Vec::new(),
            purification: PurificationRoute::Factored,
            with_oracle: true,
            record_timing: false,
        }
    }
}

pub const MIN_GAUSSIAN_RESOLUTION: usize = 21;

impl ScanConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.beta2_grid.is_empty() {
            return bad("beta2_grid is empty".into());
        }
        if self.n_grid.is_empty() && self.state_family != StateFamily::CustomAmplitudes {
            return bad("N_grid is empty".into());
        }
        if let Some(x) = self.n_grid.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return bad(format!("N_grid entries must be finite and ≥ 0, got {x}"));
        }
        if let Some(x) = self
            .beta2_grid
            .iter()
            .find(|x| !(x.is_finite() && **x >= 0.0))
        {
            return bad(format!(
                "beta2_grid entries must be finite and ≥ 0, got {x}"
            ));
        }
        if self.nu == 0 {
            return bad("nu must be ≥ 1".into());
        }
        if !self.phi.is_finite() {
            return bad("phi must be finite".into());
        }
        if !(0.0..=1.0).contains(&self.squeeze_fraction) {
            return bad(format!(
                "squeeze_fraction must lie in [0, 1], got {}",
                self.squeeze_fraction
            ));
        }
        if self.state_family == StateFamily::Fock {
            if let Some(x) = self.n_grid.iter().find(|x| x.fract() != 0.0) {
                return bad(format!("fock probes need integer N, got {x}"));
            }
        }
        if self.state_family == StateFamily::CustomAmplitudes && self.amplitudes.is_empty() {
            return bad("custom_amplitudes needs a nonempty `amplitudes` list".into());
        }
        Ok(())
    }

    /// Probe of the configured family with mean photon number `n`
    /// (`custom_amplitudes` ignores `n`).
    pub fn probe(&self, n: f64) -> Result<ProbeState> {
        match self.state_family {
            StateFamily::Coherent => Ok(coherent(c(n.sqrt(), 0.0), self.cutoff)),
            StateFamily::SqueezedVacuum => squeezed_vacuum(n.sqrt().asinh(), self.cutoff),
            StateFamily::DisplacedSqueezed => {
                gaussian_with_mean(n, self.squeeze_fraction, self.cutoff)
            }
            StateFamily::Fock => {
                let level = n as usize;
                let cutoff = match self.cutoff {
                    Cutoff::Auto => level + 1,
                    Cutoff::Fixed(k) => k,
                };
                fock(level, cutoff)
            }
            StateFamily::CustomAmplitudes => {
                let amps: Vec<C64> = self.amplitudes.iter().map(|&[re, im]| c(re, im)).collect();
                let psi = ProbeState::custom(amps, "custom")?;
                Ok(match self.cutoff {
                    Cutoff::Fixed(k) => psi.padded(k),
                    Cutoff::Auto => psi,
                })
            }
        }
    }

    fn n_points(&self) -> Vec<f64> {
        if self.state_family == StateFamily::CustomAmplitudes {
            vec![f64::NAN]
        } else {
            self.n_grid.clone()
        }
    }

    fn point_options(&self) -> PointOptions {
        PointOptions {
            route: self.purification,
            env_cutoff: self.env_cutoff,
            rank_tol: None,
            with_oracle: self.with_oracle,
        }
    }
}

/// Evaluates `f` on every item, on up to `available_parallelism` threads,
/// returning results in input order.
fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync) -> Vec<U> {
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(items.len());
    if workers <= 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<U>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= items.len() {
                    break;
                }
                let out = f(&items[k]);
                slots.lock().expect("worker panicked")[k] = Some(out);
            });
        }
    });
    slots
        .into_inner()
        .expect("worker panicked")
        .into_iter()
        .map(|u| u.expect("every slot filled"))
        .collect()
}

fn error_flag(e: &Error) -> String {
    match e {
        Error::Truncation {
            what, suggested, ..
        } => {
            format!("{what}_truncation(suggested_cutoff={suggested})")
        }
        other => format!("error({other})"),
    }
}

fn elapsed_ms(start: Instant, record: bool) -> f64 {
    if record {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        f64::NAN
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub state: String,
    /// Requested mean photon number (`NaN` for custom amplitudes).
    pub n_target: f64,
    pub n_mean: f64,
    pub var_n: f64,
    pub beta2: f64,
    pub nu: u32,
    pub lambda_opt: f64,
    pub cq_parametric_opt: f64,
    pub cq_max_gaussian: f64,
    pub qfi_oracle: f64,
    pub qfi_variational: f64,
    pub delta_phi_floor: f64,
    pub delta_phi_floor_sqrt_nu: f64,
    pub cutoff: usize,
    pub env_dim: usize,
    pub env_rank: usize,
    pub sylvester_residual: f64,
    pub flags: Vec<String>,
    pub wall_time_ms: f64,
}

impl ScanRow {
    pub fn from_report(state: &str, n_target: f64, r: &PointReport, wall_time_ms: f64) -> Self {
        let b = &r.bound;
        let d = &r.diagnostics;
        Self {
            state: state.to_string(),
            n_target,
            n_mean: b.n_mean,
            var_n: b.var_n,
            beta2: b.beta2,
            nu: b.nu,
            lambda_opt: b.lambda_opt,
            cq_parametric_opt: b.cq_parametric_opt,
            cq_max_gaussian: b.cq_max_gaussian,
            qfi_oracle: b.qfi_oracle,
            qfi_variational: b.qfi_variational,
            delta_phi_floor: b.delta_phi_floor,
            delta_phi_floor_sqrt_nu: b.delta_phi_floor_sqrt_nu,
            cutoff: d.cutoff,
            env_dim: d.env_dim,
            env_rank: d.env_rank,
            sylvester_residual: d.sylvester_residual,
            flags: d.flags.clone(),
            wall_time_ms,
        }
    }

    fn failed(
        state: &str,
        n_target: f64,
        beta2: f64,
        nu: u32,
        e: &Error,
        wall_time_ms: f64,
    ) -> Self {
        Self {
            state: state.to_string(),
            n_target,
            n_mean: f64::NAN,
            var_n: f64::NAN,
            beta2,
            nu,
            lambda_opt: f64::NAN,
            cq_parametric_opt: f64::NAN,
            cq_max_gaussian: gaussian_bound(n_target, beta2),
            qfi_oracle: f64::NAN,
            qfi_variational: f64::NAN,
            delta_phi_floor: f64::NAN,
            delta_phi_floor_sqrt_nu: f64::NAN,
            cutoff: 0,
            env_dim: 0,
            env_rank: 0,
            sylvester_residual: f64::NAN,
            flags: vec![error_flag(e)],
            wall_time_ms,
        }
    }

    pub fn is_failed(&self) -> bool {
        self.flags
            .iter()
            .any(|f| f.contains("truncation(") || f.starts_with("error("))
    }
}

impl Record for ScanRow {
    const FIELDS: &'static [&'static str] = &[
        "state",
        "n_target",
        "n_mean",
        "var_n",
        "beta2",
        "nu",
        "lambda_opt",
        "cq_parametric_opt",
        "cq_max_gaussian",
        "qfi_oracle",
        "qfi_variational",
        "delta_phi_floor",
        "delta_phi_floor_sqrt_nu",
        "cutoff",
        "env_dim",
        "env_rank",
        "sylvester_residual",
        "flags",
        "wall_time_ms",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Text(self.state.clone()),
            Cell::Num(self.n_target),
            Cell::Num(self.n_mean),
            Cell::Num(self.var_n),
            Cell::Num(self.beta2),
            Cell::Int(self.nu.into()),
            Cell::Num(self.lambda_opt),
            Cell::Num(self.cq_parametric_opt),
            Cell::Num(self.cq_max_gaussian),
            Cell::Num(self.qfi_oracle),
            Cell::Num(self.qfi_variational),
            Cell::Num(self.delta_phi_floor),
            Cell::Num(self.delta_phi_floor_sqrt_nu),
            Cell::Int(self.cutoff as u64),
            Cell::Int(self.env_dim as u64),
            Cell::Int(self.env_rank as u64),
            Cell::Num(self.sylvester_residual),
            Cell::Text(self.flags.join(";")),
            Cell::Num(self.wall_time_ms),
        ]
    }
}

/// Evaluates every (N, β²) point of the configured family. Failing points
/// become flagged rows; only an invalid config is an error.
pub fn run_scan(cfg: &ScanConfig) -> Result<Vec<ScanRow>> {
    cfg.validate()?;
    let opts = cfg.point_options();
    let family = serde_json::to_value(cfg.state_family)?;
    let family = family.as_str().unwrap_or("custom");
    let per_n = par_map(&cfg.n_points(), |&n| {
        let start = Instant::now();
        let probe = cfg.probe(n);
        let probe_ms = start.elapsed().as_secs_f64() * 1e3;
        cfg.beta2_grid
            .iter()
            .map(|&beta2| {
                let start = Instant::now();
                let label = match &probe {
                    Ok(psi) => psi.label().to_string(),
                    Err(_) => family.to_string(),
                };
                let evaluated = probe.as_ref().map_err(clone_error).and_then(|psi| {
                    let params = ChannelParams::new(cfg.phi, beta2, cfg.nu)?;
                    evaluate_point(psi, &params, &opts)
                });
                let ms = elapsed_ms(start, cfg.record_timing)
                    + if cfg.record_timing { probe_ms } else { 0.0 };
                match evaluated {
                    Ok(report) => ScanRow::from_report(&label, n, &report, ms),
                    Err(e) => ScanRow::failed(&label, n, beta2, cfg.nu, &e, ms),
                }
            })
            .collect::<Vec<_>>()
    });
    Ok(transpose(per_n))
}

/// `[n][beta2]` to rows ordered `beta2` outer, `n` inner.
fn transpose<R>(per_n: Vec<Vec<R>>) -> Vec<R> {
    let n_beta = per_n.first().map_or(0, Vec::len);
    let mut columns: Vec<std::vec::IntoIter<R>> = per_n.into_iter().map(Vec::into_iter).collect();
    let mut rows = Vec::with_capacity(columns.len() * n_beta);
    for _ in 0..n_beta {
        for col in columns.iter_mut() {
            rows.extend(col.next());
        }
    }
    rows
}

// `Error` holds io errors and is not `Clone`; the probe error is shared by
// all β² of one N, so rebuild the variants that can occur there.
fn clone_error(e: &Error) -> Error {
    match e {
        Error::Truncation {
            what,
            cutoff,
            leakage,
            suggested,
        } => Error::Truncation {
            what,
            cutoff: *cutoff,
            leakage: *leakage,
            suggested: *suggested,
        },
        other => Error::InvalidArgument(other.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig1Row {
    pub n: f64,
    pub beta2: f64,
    /// `[2β² + 1/(8N(N+1))]⁻¹`
    pub cq_max: f64,
    /// `8N(N+1)`
    pub noiseless: f64,
    /// Largest variational QFI over the displaced-squeezed family at this N.
    pub qfi_best_gaussian: f64,
    /// Squeezing fraction `sinh²r / N` of the best probe.
    pub best_fraction: f64,
    pub ratio: f64,
    pub cutoff: usize,
    pub env_rank: usize,
    /// Largest anticommutator residual over the family.
    pub sylvester_residual: f64,
    pub flags: Vec<String>,
    pub wall_time_ms: f64,
}

impl Record for Fig1Row {
    const FIELDS: &'static [&'static str] = &[
        "n",
        "beta2",
        "cq_max",
        "noiseless",
        "qfi_best_gaussian",
        "best_fraction",
        "ratio",
        "cutoff",
        "env_rank",
        "sylvester_residual",
        "flags",
        "wall_time_ms",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Num(self.n),
            Cell::Num(self.beta2),
            Cell::Num(self.cq_max),
            Cell::Num(self.noiseless),
            Cell::Num(self.qfi_best_gaussian),
            Cell::Num(self.best_fraction),
            Cell::Num(self.ratio),
            Cell::Int(self.cutoff as u64),
            Cell::Int(self.env_rank as u64),
            Cell::Num(self.sylvester_residual),
            Cell::Text(self.flags.join(";")),
            Cell::Num(self.wall_time_ms),
        ]
    }
}

/// Squeezing fractions `k/(res-1)`, `k = 0..res`.
pub fn squeeze_fractions(resolution: usize) -> Vec<f64> {
    let last = (resolution.max(2) - 1) as f64;
    (0..resolution.max(2)).map(|k| k as f64 / last).collect()
}

struct Best {
    qfi: f64,
    fraction: f64,
    cutoff: usize,
    env_rank: usize,
    residual: f64,
    flags: Vec<String>,
    ms: f64,
}

fn fig1_for_n(cfg: &ScanConfig, n: f64) -> Vec<Best> {
    let mut best: Vec<Best> = cfg
        .beta2_grid
        .iter()
        .map(|_| Best {
            qfi: f64::NAN,
            fraction: f64::NAN,
            cutoff: 0,
            env_rank: 0,
            residual: 0.0,
            flags: Vec::new(),
            ms: 0.0,
        })
        .collect();
    for f in squeeze_fractions(cfg.gaussian_scan_resolution) {
        let start = Instant::now();
        let psi = gaussian_with_mean(n, f, cfg.cutoff);
        let probe_ms = start.elapsed().as_secs_f64() * 1e3 / cfg.beta2_grid.len() as f64;
        for (slot, &beta2) in best.iter_mut().zip(&cfg.beta2_grid) {
            let start = Instant::now();
            let outcome = psi.as_ref().map_err(clone_error).and_then(|psi| {
                let params = ChannelParams::new(cfg.phi, beta2, cfg.nu)?;
                let p = purify(psi, &params, cfg.purification, cfg.env_cutoff)?;
                Ok((optimal_h(&p, None)?, psi.cutoff(), psi.truncation_flagged()))
            });
            slot.ms += start.elapsed().as_secs_f64() * 1e3 + probe_ms;
            match outcome {
                Ok((v, cutoff, truncated)) => {
                    slot.residual = slot.residual.max(v.residual);
                    if truncated {
                        slot.flags.push(format!("probe_truncated(f={f})"));
                    }
                    if !(v.qfi <= slot.qfi) {
                        slot.qfi = v.qfi;
                        slot.fraction = f;
                        slot.cutoff = cutoff;
                        slot.env_rank = v.env_rank;
                    }
                }
                Err(e) => slot.flags.push(format!("{}@f={f}", error_flag(&e))),
            }
        }
    }
    best
}

/// Best Gaussian QFI against the analytic bound for every (N, β²), with the
/// bound and monotonicity checks applied as row flags.
pub fn fig1(cfg: &ScanConfig) -> Result<Vec<Fig1Row>> {
    cfg.validate()?;
    if cfg.gaussian_scan_resolution < MIN_GAUSSIAN_RESOLUTION {
        return Err(Error::Config(format!(
            "gaussian_scan_resolution must be ≥ {MIN_GAUSSIAN_RESOLUTION}, got {}",
            cfg.gaussian_scan_resolution
        )));
    }
    let per_n = par_map(&cfg.n_grid, |&n| {
        fig1_for_n(cfg, n)
            .into_iter()
            .zip(&cfg.beta2_grid)
            .map(|(b, &beta2)| {
                let cq_max = gaussian_bound(n, beta2);
                Fig1Row {
                    n,
                    beta2,
                    cq_max,
                    noiseless: noiseless_gaussian_bound(n),
                    qfi_best_gaussian: b.qfi,
                    best_fraction: b.fraction,
                    ratio: b.qfi / cq_max,
                    cutoff: b.cutoff,
                    env_rank: b.env_rank,
                    sylvester_residual: b.residual,
                    flags: b.flags,
                    wall_time_ms: if cfg.record_timing { b.ms } else { f64::NAN },
                }
            })
            .collect::<Vec<_>>()
    });
    let mut rows = transpose(per_n);
    check_fig1(&mut rows);
    Ok(rows)
}

/// Flags rows that break `qfi ≤ C_Q^max` or the monotone trends of the
/// analytic columns (increasing in N, decreasing in β²).
pub fn check_fig1(rows: &mut [Fig1Row]) {
    for r in rows.iter_mut() {
        if r.qfi_best_gaussian > r.cq_max * (1.0 + 1e-6) {
            r.flags.push("exceeds_cq_max".into());
        }
    }
    for i in 0..rows.len() {
        for j in 0..rows.len() {
            let (a, b) = (&rows[i], &rows[j]);
            let more_n = a.beta2 == b.beta2 && b.n > a.n;
            let more_noise = a.n == b.n && b.beta2 > a.beta2;
            let bad = (more_n && (b.cq_max < a.cq_max || b.noiseless < a.noiseless))
                || (more_noise && b.cq_max > a.cq_max);
            if bad && !rows[j].flags.iter().any(|f| f == "non_monotone") {
                rows[j].flags.push("non_monotone".into());
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_round_trips_toml() {
        let cfg = ScanConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        assert!(text.contains("N_grid"));
        assert_eq!(ScanConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn partial_config_keeps_defaults() {
        let cfg = ScanConfig::from_toml_str(
            "state_family = \"squeezed_vacuum\"\nN_grid = [1.0, 2.0]\ncutoff = 80\nenv_cutoff = \"auto\"",
        )
        .unwrap();
        assert_eq!(cfg.state_family, StateFamily::SqueezedVacuum);
        assert_eq!(cfg.cutoff, Cutoff::Fixed(80));
        assert_eq!(cfg.beta2_grid, vec![5e-4, 5e-5, 5e-6]);
        assert!(ScanConfig::from_toml_str("bogus = 1").is_err());
    }

    #[test]
    fn validation_rejects_bad_grids() {
        let mut cfg = ScanConfig {
            beta2_grid: vec![],
            ..ScanConfig::default()
        };
        assert!(cfg.validate().is_err());
        cfg.beta2_grid = vec![-1e-3];
        assert!(cfg.validate().is_err());
        cfg.beta2_grid = vec![1e-3];
        cfg.n_grid = vec![f64::NAN];
        assert!(cfg.validate().is_err());
        cfg.n_grid = vec![1.5];
        cfg.state_family = StateFamily::Fock;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn row_order_and_sub_grid_independence() {
        let cfg = ScanConfig {
            n_grid: vec![0.5, 2.0],
            beta2_grid: vec![1e-2, 1e-1],
            ..ScanConfig::default()
        };
        let rows = run_scan(&cfg).unwrap();
        let order: Vec<_> = rows.iter().map(|r| (r.beta2, r.n_target)).collect();
        assert_eq!(order, [(1e-2, 0.5), (1e-2, 2.0), (1e-1, 0.5), (1e-1, 2.0)]);
        let sub = run_scan(&ScanConfig {
            n_grid: vec![2.0],
            beta2_grid: vec![1e-1],
            ..cfg.clone()
        })
        .unwrap();
        assert_eq!(
            crate::output::render_csv(&sub).unwrap(),
            crate::output::render_csv(&rows[3..]).unwrap()
        );
    }

    #[test]
    fn truncated_point_is_flagged_and_scan_continues() {
        let cfg = ScanConfig {
            state_family: StateFamily::SqueezedVacuum,
            n_grid: vec![0.1, 5.0],
            beta2_grid: vec![1e-2],
            cutoff: Cutoff::Fixed(12),
            ..ScanConfig::default()
        };
        let rows = run_scan(&cfg).unwrap();
        assert!(!rows[0].is_failed());
        assert!(rows[1].is_failed());
        assert!(rows[1].flags[0].starts_with("probe_truncation"));
    }

    #[test]
    fn fig1_small_grid() {
        let cfg = ScanConfig {
            n_grid: vec![1.0, 2.0],
            beta2_grid: vec![5e-4, 5e-2],
            ..ScanConfig::default()
        };
        let rows = fig1(&cfg).unwrap();
        assert_eq!(rows.len(), 4);
        for r in &rows {
            assert!(r.flags.is_empty(), "{:?}", r.flags);
            assert!(r.qfi_best_gaussian <= r.cq_max * (1.0 + 1e-6));
            assert!(r.qfi_best_gaussian > 0.0);
        }
        assert!(fig1(&ScanConfig {
            gaussian_scan_resolution: 5,
            ..cfg
        })
        .is_err());
    }

    #[test]
    fn monotone_check_flags_inversions() {
        let row = |n: f64, cq_max: f64| Fig1Row {
            n,
            beta2: 1e-3,
            cq_max,
            noiseless: noiseless_gaussian_bound(n),
            qfi_best_gaussian: 0.0,
            best_fraction: 0.0,
            ratio: 0.0,
            cutoff: 0,
            env_rank: 0,
            sylvester_residual: 0.0,
            flags: vec![],
            wall_time_ms: f64::NAN,
        };
        let mut rows = vec![row(1.0, 10.0), row(2.0, 5.0)];
        check_fig1(&mut rows);
        assert_eq!(rows[1].flags, ["non_monotone"]);
        assert!(rows[0].flags.is_empty());
    }
}
