//! Probe states in a truncated Fock basis and their photon-number statistics.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, ComplexVector, DensityMatrix, C64};

/// Tail weight accepted by the automatic cutoff search.
pub const AUTO_TAIL_TOL: f64 = 1e-12;
/// Discarded norm (or, with an unknown tail, weight on the top two levels)
/// above which a state is flagged as truncated.
pub const EDGE_FLAG_TOL: f64 = 1e-8;
/// Discarded norm above which squeezed constructions fail.
pub const FATAL_LEAKAGE: f64 = 1e-4;
pub const MAX_AUTO_CUTOFF: usize = 20_000;

/// Fock-space dimension: a fixed number of levels or chosen automatically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Cutoff {
    #[default]
    Auto,
    Fixed(usize),
}

impl FromStr for Cutoff {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Cutoff::Auto);
        }
        match s.parse::<usize>() {
            Ok(0) => Err("cutoff must be positive".into()),
            Ok(n) => Ok(Cutoff::Fixed(n)),
            Err(_) => Err(format!("expected a positive integer or `auto`, got `{s}`")),
        }
    }
}

impl fmt::Display for Cutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cutoff::Auto => f.write_str("auto"),
            Cutoff::Fixed(n) => write!(f, "{n}"),
        }
    }
}

impl Serialize for Cutoff {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cutoff::Auto => s.serialize_str("auto"),
            Cutoff::Fixed(n) => s.serialize_u64(*n as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Cutoff {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(usize),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(0) => Err(serde::de::Error::custom("cutoff must be positive")),
            Repr::Int(n) => Ok(Cutoff::Fixed(n)),
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Normalized pure state `Σ c_n |n>` on levels `0..cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeState {
    amplitudes: ComplexVector,
    label: String,
    /// Discarded norm when the constructor knows the tail exactly.
    leakage: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhotonStatistics {
    pub mean_n: f64,
    pub var_n: f64,
}

impl ProbeState {
    fn from_raw(
        mut amplitudes: ComplexVector,
        label: String,
        leakage: Option<f64>,
    ) -> Result<Self> {
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidArgument(format!(
                "{label}: non-finite amplitude"
            )));
        }
        let norm = amplitudes.norm();
        if !(norm > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "{label}: zero amplitude vector"
            )));
        }
        amplitudes.unscale_mut(norm);
        Ok(Self {
            amplitudes,
            label,
            leakage: leakage.map(|l| l.max(0.0)),
        })
    }

    /// Normalizes arbitrary user amplitudes; nothing is assumed about the tail.
    pub fn custom(amplitudes: Vec<C64>, label: impl Into<String>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument("empty amplitude list".into()));
        }
        Self::from_raw(ComplexVector::from_vec(amplitudes), label.into(), None)
    }

    pub fn cutoff(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Norm discarded by the truncation before renormalization.
    /// Zero when unknown (custom amplitudes).
    pub fn leakage(&self) -> f64 {
        self.leakage.unwrap_or(0.0)
    }

    /// Largest weight among the two top levels (two, so that parity-sparse
    /// states such as squeezed vacuum are caught).
    pub fn edge_weight(&self) -> f64 {
        let n = self.cutoff();
        (n.saturating_sub(2)..n)
            .map(|k| self.amplitudes[k].norm_sqr())
            .fold(0.0, f64::max)
    }

    /// Known leakage above [`EDGE_FLAG_TOL`], or for custom amplitudes
    /// (unknown tail) an edge weight above it.
    pub fn truncation_flagged(&self) -> bool {
        match self.leakage {
            Some(l) => l > EDGE_FLAG_TOL,
            None => self.edge_weight() > EDGE_FLAG_TOL,
        }
    }

    /// Highest level carrying nonzero amplitude.
    pub fn max_populated_level(&self) -> usize {
        (0..self.cutoff())
            .rev()
            .find(|&k| self.amplitudes[k] != c(0.0, 0.0))
            .unwrap_or(0)
    }

    pub fn statistics(&self) -> PhotonStatistics {
        photon_statistics(self)
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        DensityMatrix::from_pure(&self.amplitudes)
    }

    /// Same state on a larger (or equal) Fock space.
    pub fn padded(&self, cutoff: usize) -> Self {
        let mut amps = ComplexVector::zeros(cutoff.max(self.cutoff()));
        amps.rows_mut(0, self.cutoff()).copy_from(&self.amplitudes);
        Self {
            amplitudes: amps,
            label: self.label.clone(),
            leakage: self.leakage,
        }
    }
}

/// Mean and variance of `n̂`; the variance uses a centred second pass.
pub fn photon_statistics(psi: &ProbeState) -> PhotonStatistics {
    let weights = psi.amplitudes.iter().map(|z| z.norm_sqr());
    let mean_n: f64 = weights.clone().enumerate().map(|(n, w)| n as f64 * w).sum();
    let var_n: f64 = weights
        .enumerate()
        .map(|(n, w)| (n as f64 - mean_n).powi(2) * w)
        .sum();
    PhotonStatistics {
        mean_n,
        var_n: var_n.max(0.0),
    }
}

/// Minimum cutoff for a coherent state of amplitude `alpha`.
pub fn coherent_min_cutoff(alpha: f64) -> usize {
    (alpha * alpha + 8.0 * alpha + 10.0).ceil() as usize
}

/// Exact Fock amplitudes of `D(alpha) S(r e^{iθ}) |0>` via the three-term
/// recursion of the annihilation-operator eigen-equation
/// `(a cosh r + a† e^{iθ} sinh r)|ψ> = γ|ψ>`. Values are carried with a
/// separate log scale so that large displacements do not underflow.
struct GaussianSeries {
    scaled: Vec<C64>,
    log_scale: f64,
    phase0: C64,
    gamma: C64,
    cross: C64,
    cosh_r: f64,
    mass_scaled: f64,
}

impl GaussianSeries {
    const RESCALE: f64 = 1e100;

    fn new(alpha: C64, r: f64, theta: f64) -> Self {
        let eith = C64::from_polar(1.0, theta);
        let (sh, ch) = (r.sinh(), r.cosh());
        let z = -alpha.norm_sqr() / 2.0 - alpha.conj() * alpha.conj() * eith * r.tanh() / 2.0;
        Self {
            scaled: vec![c(1.0, 0.0)],
            log_scale: z.re - 0.5 * ch.ln(),
            phase0: C64::from_polar(1.0, z.im),
            gamma: alpha * ch + alpha.conj() * eith * sh,
            cross: eith * sh,
            cosh_r: ch,
            mass_scaled: 1.0,
        }
    }

    fn mass(&self) -> f64 {
        (2.0 * self.log_scale + self.mass_scaled.ln()).exp()
    }

    fn push(&mut self) {
        let n = self.scaled.len() - 1;
        let prev = if n == 0 {
            c(0.0, 0.0)
        } else {
            self.scaled[n - 1]
        };
        let next = (self.gamma * self.scaled[n] - self.cross * (n as f64).sqrt() * prev)
            / (self.cosh_r * ((n + 1) as f64).sqrt());
        self.scaled.push(next);
        self.mass_scaled += next.norm_sqr();
        if next.norm() > Self::RESCALE {
            for s in &mut self.scaled {
                *s /= Self::RESCALE;
            }
            self.mass_scaled /= Self::RESCALE * Self::RESCALE;
            self.log_scale += Self::RESCALE.ln();
        }
    }

    fn extend_to(&mut self, len: usize) {
        while self.scaled.len() < len {
            self.push();
        }
    }

    /// Smallest length whose tail weight is at most `tol`.
    fn extend_until_tail(&mut self, tol: f64) -> Option<usize> {
        while 1.0 - self.mass() > tol {
            if self.scaled.len() >= MAX_AUTO_CUTOFF {
                return None;
            }
            self.push();
        }
        Some(self.scaled.len())
    }

    fn amplitudes(&self, len: usize) -> ComplexVector {
        let scale = self.log_scale.exp();
        ComplexVector::from_iterator(
            len,
            self.scaled[..len].iter().map(|s| s * scale * self.phase0),
        )
    }

    fn leakage(&self, len: usize) -> f64 {
        let partial: f64 = self.scaled[..len].iter().map(|s| s.norm_sqr()).sum();
        (1.0 - (2.0 * self.log_scale + partial.ln()).exp()).max(0.0)
    }
}

fn auto_gaussian_cutoff(alpha: C64, r: f64, theta: f64) -> Result<usize> {
    let mut series = GaussianSeries::new(alpha, r, theta);
    let tail = series
        .extend_until_tail(AUTO_TAIL_TOL)
        .ok_or_else(|| Error::Truncation {
            what: "probe",
            cutoff: MAX_AUTO_CUTOFF,
            leakage: 1.0 - series.mass(),
            suggested: MAX_AUTO_CUTOFF,
        })?;
    Ok(tail.max(coherent_min_cutoff(alpha.norm())))
}

fn gaussian_state(
    alpha: C64,
    r: f64,
    theta: f64,
    cutoff: Cutoff,
    label: String,
) -> Result<ProbeState> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() || !r.is_finite() || !theta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "{label}: non-finite parameter"
        )));
    }
    let len = match cutoff {
        Cutoff::Auto => auto_gaussian_cutoff(alpha, r, theta)?,
        Cutoff::Fixed(n) => n,
    };
    let mut series = GaussianSeries::new(alpha, r, theta);
    series.extend_to(len);
    let leakage = series.leakage(len);
    if leakage > FATAL_LEAKAGE {
        return Err(Error::Truncation {
            what: "probe",
            cutoff: len,
            leakage,
            suggested: auto_gaussian_cutoff(alpha, r, theta)?,
        });
    }
    let state = ProbeState::from_raw(series.amplitudes(len), label, Some(leakage))?;
    if state.truncation_flagged() {
        log::warn!(
            "{}: edge weight {:.2e} at cutoff {len}",
            state.label,
            state.edge_weight()
        );
    }
    Ok(state)
}

/// Coherent state `|alpha>`. A cutoff below `|α|² + 8|α| + 10` is raised.
pub fn coherent(alpha: C64, cutoff: Cutoff) -> ProbeState {
    let min = coherent_min_cutoff(alpha.norm());
    let len = match cutoff {
        Cutoff::Auto => min,
        Cutoff::Fixed(n) if n < min => {
            log::info!("coherent cutoff raised from {n} to {min}");
            min
        }
        Cutoff::Fixed(n) => n,
    };
    let mut series = GaussianSeries::new(alpha, 0.0, 0.0);
    series.extend_to(len);
    let leakage = series.leakage(len);
    ProbeState::from_raw(
        series.amplitudes(len),
        format!("coherent(alpha={alpha})"),
        Some(leakage),
    )
    .expect("coherent amplitudes are finite and nonzero")
}

/// Squeezed vacuum `S(r)|0>`: amplitudes `∝ (-tanh r)^m √((2m)!)/(2^m m!)`
/// on level `2m`.
pub fn squeezed_vacuum(r: f64, cutoff: Cutoff) -> Result<ProbeState> {
    gaussian_state(
        c(0.0, 0.0),
        r,
        0.0,
        cutoff,
        format!("squeezed_vacuum(r={r})"),
    )
}

/// `D(alpha) S(r e^{i phi_sq}) |0>`.
pub fn displaced_squeezed(alpha: C64, r: f64, phi_sq: f64, cutoff: Cutoff) -> Result<ProbeState> {
    gaussian_state(
        alpha,
        r,
        phi_sq,
        cutoff,
        format!("displaced_squeezed(alpha={alpha},r={r},phi_sq={phi_sq})"),
    )
}

/// Displaced squeezed state with mean photon number `n_mean`, a fraction
/// `squeeze_fraction` of it in squeezing (`sinh² r = f N`), real displacement
/// and the squeezing axis oriented to maximize the number variance.
pub fn gaussian_with_mean(
    n_mean: f64,
    squeeze_fraction: f64,
    cutoff: Cutoff,
) -> Result<ProbeState> {
    if !(n_mean >= 0.0) || !(0.0..=1.0).contains(&squeeze_fraction) {
        return Err(Error::InvalidArgument(format!(
            "need N ≥ 0 and squeeze fraction in [0,1], got N={n_mean}, f={squeeze_fraction}"
        )));
    }
    let squeezed = squeeze_fraction * n_mean;
    let alpha = ((1.0 - squeeze_fraction) * n_mean).max(0.0).sqrt();
    let r = squeezed.sqrt().asinh();
    let mut state = displaced_squeezed(c(alpha, 0.0), r, std::f64::consts::PI, cutoff)?;
    state.label = format!("gaussian(N={n_mean},f={squeeze_fraction})");
    Ok(state)
}

pub fn fock(n: usize, cutoff: usize) -> Result<ProbeState> {
    fock_superposition(&[(n, c(1.0, 0.0))], cutoff)
}

/// Normalized superposition `Σ w_k |n_k>`.
pub fn fock_superposition(levels: &[(usize, C64)], cutoff: usize) -> Result<ProbeState> {
    let mut amps = ComplexVector::zeros(cutoff);
    for &(n, w) in levels {
        if n >= cutoff {
            return Err(Error::InvalidArgument(format!(
                "Fock level {n} does not fit below cutoff {cutoff}"
            )));
        }
        amps[n] += w;
    }
    let label = match levels {
        [(n, _)] => format!("fock({n})"),
        _ => format!(
            "fock_superposition({})",
            levels
                .iter()
                .map(|(n, _)| n.to_string())
                .collect::<Vec<_>>()
                .join("+")
        ),
    };
    ProbeState::from_raw(amps, label, Some(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn direct_stats(amps: &[f64]) -> (f64, f64) {
        let norm: f64 = amps.iter().sum();
        let mean: f64 = amps
            .iter()
            .enumerate()
            .map(|(n, w)| n as f64 * w)
            .sum::<f64>()
            / norm;
        let second: f64 = amps
            .iter()
            .enumerate()
            .map(|(n, w)| (n * n) as f64 * w)
            .sum::<f64>()
            / norm;
        (mean, second - mean * mean)
    }

    #[test]
    fn vacuum_cases() {
        for psi in [
            coherent(c(0.0, 0.0), Cutoff::Auto),
            squeezed_vacuum(0.0, Cutoff::Auto).unwrap(),
            fock(0, 5).unwrap(),
        ] {
            let s = psi.statistics();
            assert_eq!((s.mean_n, s.var_n), (0.0, 0.0));
            assert!(close(psi.amplitudes()[0].norm(), 1.0, 1e-15));
        }
    }

    #[test]
    fn coherent_poisson_statistics() {
        let s = coherent(c(1.0, 0.0), Cutoff::Fixed(40)).statistics();
        assert!(close(s.mean_n, 1.0, 1e-9) && close(s.var_n, 1.0, 1e-9));
        let s = coherent(c(2.0, 0.0), Cutoff::Auto).statistics();
        assert!(close(s.mean_n, 4.0, 1e-8) && close(s.var_n, 4.0, 1e-8));

        // Poisson weights summed independently
        let lam: f64 = 30.0;
        let mut w = vec![(-lam).exp()];
        for n in 1..200 {
            let prev = w[n - 1];
            w.push(prev * lam / n as f64);
        }
        let (mean, var) = direct_stats(&w);
        let s = coherent(c(lam.sqrt(), 0.0), Cutoff::Auto).statistics();
        assert!(close(s.mean_n, mean, 1e-6) && close(s.mean_n, 30.0, 1e-6));
        assert!(close(s.var_n, var, 1e-6));
    }

    #[test]
    fn coherent_cutoff_is_raised() {
        let psi = coherent(c(3.0, 0.0), Cutoff::Fixed(5));
        assert_eq!(psi.cutoff(), coherent_min_cutoff(3.0));
    }

    #[test]
    fn large_displacement_does_not_underflow() {
        let psi = coherent(c(40.0, 0.0), Cutoff::Auto);
        let s = psi.statistics();
        assert!(close(s.mean_n, 1600.0, 1e-6));
        assert!(psi.leakage() < 1e-12);
    }

    #[test]
    fn squeezed_vacuum_closed_form() {
        let r: f64 = 0.5;
        let psi = squeezed_vacuum(r, Cutoff::Fixed(60)).unwrap();
        // (-tanh r)^m sqrt((2m)!)/(2^m m!) / sqrt(cosh r)
        let mut w = vec![0.0; 60];
        let mut a = 1.0 / r.cosh().sqrt();
        for m in 0..30 {
            if m > 0 {
                a *= -r.tanh() * ((2 * m * (2 * m - 1)) as f64).sqrt() / (2 * m) as f64;
            }
            w[2 * m] = a * a;
            assert!(close(psi.amplitudes()[2 * m].re, a, 1e-13));
            assert!(close(psi.amplitudes()[2 * m + 1].norm(), 0.0, 1e-15));
        }
        let (mean, _) = direct_stats(&w);
        let s = psi.statistics();
        assert!(close(s.mean_n, mean, 1e-10));
        assert!(close(s.mean_n, r.sinh().powi(2), 1e-8));
    }

    #[test]
    fn squeezed_vacuum_saturates_gaussian_variance_bound() {
        for n in [0.5_f64, 2.0, 10.0] {
            let r = n.sqrt().asinh();
            let s = squeezed_vacuum(r, Cutoff::Auto).unwrap().statistics();
            let bound = 2.0 * n * (n + 1.0);
            assert!(
                ((s.var_n - bound) / bound).abs() < 1e-6,
                "N={n}: {} vs {bound}",
                s.var_n
            );
        }
    }

    #[test]
    fn squeezed_truncation_is_fatal() {
        match squeezed_vacuum(2.0, Cutoff::Fixed(20)) {
            Err(Error::Truncation { suggested, .. }) => assert!(suggested > 20),
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn fock_and_superposition() {
        let s = fock(3, 6).unwrap().statistics();
        assert_eq!((s.mean_n, s.var_n), (3.0, 0.0));
        assert!(fock(6, 6).is_err());
        for n in [1usize, 4, 9] {
            let psi = fock_superposition(&[(0, c(1.0, 0.0)), (n, c(1.0, 0.0))], n + 1).unwrap();
            let s = psi.statistics();
            assert!(close(s.var_n, (n * n) as f64 / 4.0, 1e-12));
        }
    }

    #[test]
    fn displaced_squeezed_consistency() {
        let a = displaced_squeezed(c(0.0, 0.0), 0.4, 0.0, Cutoff::Fixed(50)).unwrap();
        let b = squeezed_vacuum(0.4, Cutoff::Fixed(50)).unwrap();
        assert!((a.amplitudes() - b.amplitudes()).norm() < 1e-14);

        let a = displaced_squeezed(c(1.2, -0.3), 0.0, 0.7, Cutoff::Fixed(40)).unwrap();
        let b = coherent(c(1.2, -0.3), Cutoff::Fixed(40));
        assert!((a.amplitudes() - b.amplitudes()).norm() < 1e-14);

        let s = displaced_squeezed(c(1.0, 0.0), 0.3, 0.0, Cutoff::Auto)
            .unwrap()
            .statistics();
        assert!(close(s.mean_n, 1.0 + 0.3f64.sinh().powi(2), 1e-6));
    }

    #[test]
    fn variance_maximizing_orientation() {
        let along = displaced_squeezed(c(2.0, 0.0), 0.5, 0.0, Cutoff::Auto)
            .unwrap()
            .statistics();
        let anti = displaced_squeezed(c(2.0, 0.0), 0.5, std::f64::consts::PI, Cutoff::Auto)
            .unwrap()
            .statistics();
        assert!(anti.var_n > along.var_n);
        // |α|² e^{2r} + 2 sinh²r cosh²r
        let expected = 4.0 * (1.0f64).exp() + 0.5 * (1.0f64).sinh().powi(2);
        assert!(close(anti.var_n, expected, 1e-8));
    }

    #[test]
    fn gaussian_with_mean_hits_target() {
        for f in [0.0, 0.3, 1.0] {
            let s = gaussian_with_mean(5.0, f, Cutoff::Auto)
                .unwrap()
                .statistics();
            assert!(close(s.mean_n, 5.0, 1e-8), "f={f}: {}", s.mean_n);
        }
    }

    #[test]
    fn cutoff_parsing() {
        assert_eq!("auto".parse::<Cutoff>().unwrap(), Cutoff::Auto);
        assert_eq!("64".parse::<Cutoff>().unwrap(), Cutoff::Fixed(64));
        assert!("0".parse::<Cutoff>().is_err());
        assert!("x".parse::<Cutoff>().is_err());
    }
}
