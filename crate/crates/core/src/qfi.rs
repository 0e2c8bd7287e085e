//! Quantum Fisher information by three routes: the pure-state formula, the
//! symmetric-logarithmic-derivative oracle on the reduced state, and the
//! variational minimization over purifications, plus the classical Fisher
//! information of a measurement.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::{Purification, PurificationKind};
use crate::error::{Error, Result};
use crate::linalg::{
    as_coefficients, c, check_hermitian, frobenius_norm, from_coefficients, hybrid,
    partial_trace_outer, resolve_rank_tol, solve_anticommutator_in, ComplexMatrix, ComplexVector,
    DensityMatrix, EigenDecomposition, HermitianOperator, Subsystem, C64,
};

/// `4 [<dψ|dψ> - |<dψ|ψ>|²]` for a normalized family.
/// Evaluated as `4 ‖dψ - <ψ|dψ> ψ‖²`, which avoids the cancellation
/// between the two terms when `|<dψ|ψ>|` is large.
fn pure_state_qfi(state: &ComplexVector, derivative: &ComplexVector) -> f64 {
    let overlap = state.dotc(derivative);
    let mut v = derivative.clone();
    v.axpy(-overlap, state, c(1.0, 0.0));
    4.0 * v.norm_squared()
}

/// QFI of the pure state on `S⊗E` (for a system-only pure state use
/// `dim_e = 1`).
pub fn qfi_pure(p: &Purification) -> f64 {
    pure_state_qfi(&p.state, &p.derivative)
}

#[derive(Debug, Clone, Copy)]
pub struct SldQfi {
    pub value: f64,
    /// `dρ` has weight where `ρ` vanishes (information the support cannot
    /// carry); the value is computed on the support only.
    pub unreachable: bool,
    pub rank_tol: f64,
}

/// `F_Q = Σ_{λ_i+λ_j > tol} 2|<i|dρ|j>|² / (λ_i + λ_j)` in the eigenbasis of
/// `ρ`.
pub fn qfi_sld_oracle(
    rho: &DensityMatrix,
    drho: &ComplexMatrix,
    rank_tol: Option<f64>,
) -> Result<SldQfi> {
    if drho.nrows() != rho.dim() || drho.ncols() != rho.dim() {
        return Err(Error::Dimension(format!(
            "rho is {0}x{0}, drho is {1}x{2}",
            rho.dim(),
            drho.nrows(),
            drho.ncols()
        )));
    }
    check_hermitian(drho, 1e-10)?;
    let eig = rho.eig();
    Ok(sld_from_eig(&eig, drho, rank_tol))
}

fn sld_from_eig(eig: &EigenDecomposition, drho: &ComplexMatrix, rank_tol: Option<f64>) -> SldQfi {
    let tol = resolve_rank_tol(rank_tol, eig);
    let lam = &eig.eigenvalues;
    let d = eig.to_eigenbasis(drho);
    let mut value = 0.0;
    let mut outside = 0.0;
    for j in 0..lam.len() {
        for i in 0..lam.len() {
            let s = lam[i] + lam[j];
            if s > tol {
                value += 2.0 * d[(i, j)].norm_sqr() / s;
            } else {
                outside += d[(i, j)].norm_sqr();
            }
        }
    }
    SldQfi {
        value,
        unreachable: outside.sqrt() > hybrid(1e-9, frobenius_norm(drho)),
        rank_tol: tol,
    }
}

/// Positive operator-valued measure on the system.
#[derive(Debug, Clone)]
pub struct Povm {
    elements: Vec<HermitianOperator>,
}

impl Povm {
    /// Checks positivity (1e-10) and completeness (1e-9 per entry).
    pub fn new(elements: Vec<HermitianOperator>) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(Error::InvalidPovm("no elements".into()));
        };
        let d = first.dim();
        let mut sum = ComplexMatrix::zeros(d, d);
        for (k, e) in elements.iter().enumerate() {
            if e.dim() != d {
                return Err(Error::InvalidPovm(format!(
                    "element {k} has dimension {}",
                    e.dim()
                )));
            }
            let low = e.eig().eigenvalues[0];
            if low < -1e-10 {
                return Err(Error::InvalidPovm(format!(
                    "element {k} has negative eigenvalue {low:.3e}"
                )));
            }
            sum += e.matrix();
        }
        let defect = (sum - ComplexMatrix::identity(d, d))
            .iter()
            .fold(0.0, |m: f64, z| m.max(z.norm()));
        if defect > 1e-9 {
            return Err(Error::InvalidPovm(format!(
                "elements sum to identity only within {defect:.3e}"
            )));
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn trivial(dim: usize) -> Self {
        Self {
            elements: vec![HermitianOperator::identity(dim)],
        }
    }

    /// Projectors onto Fock states.
    pub fn photon_number(dim: usize) -> Self {
        let elements = (0..dim)
            .map(|n| {
                let mut d = vec![0.0; dim];
                d[n] = 1.0;
                HermitianOperator::from_real_diagonal(&d)
            })
            .collect();
        Self { elements }
    }

    /// Rank-one projectors onto the columns of a random unitary (QR of a
    /// complex Gaussian matrix).
    pub fn random_projective<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let g = DMatrix::from_fn(dim, dim, |_, _| gaussian_c64(rng));
        let q = g.qr().q();
        let elements = (0..dim)
            .map(|k| {
                let v = q.column(k).into_owned();
                HermitianOperator::from_hermitian_part(&(&v * v.adjoint()))
            })
            .collect();
        Self { elements }
    }

    /// `E_k = S^{-1/2} A_k S^{-1/2}` with random low-rank PSD `A_k = G_k G_k†` and
    /// `S = Σ A_k`.
    pub fn random<R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidPovm("count must be positive".into()));
        }
        // enough rank that the elements generically span the space
        let rank = dim.div_ceil(count) + 1;
        let raw: Vec<ComplexMatrix> = (0..count)
            .map(|_| {
                let g = DMatrix::from_fn(dim, rank, |_, _| gaussian_c64(rng));
                &g * g.adjoint()
            })
            .collect();
        let total = raw
            .iter()
            .fold(ComplexMatrix::zeros(dim, dim), |acc, a| acc + a);
        let eig = HermitianOperator::from_hermitian_part(&total).eig();
        if eig.eigenvalues[0] <= 1e-12 * eig.max_eigenvalue() {
            return Err(Error::InvalidPovm(
                "random elements do not span the space".into(),
            ));
        }
        let inv_sqrt = eig.map_eigenvalues(|l| 1.0 / l.sqrt());
        let elements = raw
            .iter()
            .map(|a| HermitianOperator::from_hermitian_part(&(&inv_sqrt * a * &inv_sqrt)))
            .collect();
        Self::new(elements)
    }

    /// Merges consecutive elements into `bins` groups.
    pub fn coarse_grained(&self, bins: usize) -> Self {
        let bins = bins.clamp(1, self.elements.len());
        let d = self.dim();
        let mut merged = vec![ComplexMatrix::zeros(d, d); bins];
        for (k, e) in self.elements.iter().enumerate() {
            merged[k * bins / self.elements.len()] += e.matrix();
        }
        Self {
            elements: merged
                .iter()
                .map(HermitianOperator::from_hermitian_part)
                .collect(),
        }
    }
}

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    a.iter().zip(b.transpose().iter()).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, Copy)]
pub struct ClassicalFisher {
    pub value: f64,
    /// Some outcome has `p_k ≤ prob_floor` but `|dp_k| > √prob_floor`.
    pub divergent: bool,
}

pub const DEFAULT_PROB_FLOOR: f64 = 1e-12;

/// `F = Σ_k (dp_k)² / p_k` with `p_k = Tr[ρ E_k]`, `dp_k = Tr[dρ E_k]`.
pub fn classical_fisher(
    rho: &DensityMatrix,
    drho: &ComplexMatrix,
    povm: &Povm,
    prob_floor: f64,
) -> Result<ClassicalFisher> {
    if povm.dim() != rho.dim() || drho.nrows() != rho.dim() {
        return Err(Error::Dimension(
            "POVM, rho and drho must share a dimension".into(),
        ));
    }
    let mut value = 0.0;
    let mut divergent = false;
    for e in povm.elements() {
        let p = trace_product(rho.matrix(), e.matrix()).re;
        let dp = trace_product(drho, e.matrix()).re;
        if p > prob_floor {
            value += dp * dp / p;
        } else if dp.abs() > prob_floor.sqrt() {
            divergent = true;
        }
    }
    Ok(ClassicalFisher { value, divergent })
}

fn check_env_operator(p: &Purification, h: &HermitianOperator) -> Result<()> {
    if h.dim() != p.dim_e {
        return Err(Error::Dimension(format!(
            "h acts on dimension {} but the environment has {}",
            h.dim(),
            p.dim_e
        )));
    }
    Ok(())
}

/// `(1 ⊗ h)|v>` on `S⊗E`.
fn apply_env(
    v: &ComplexVector,
    h: &HermitianOperator,
    dim_s: usize,
    dim_e: usize,
) -> ComplexVector {
    from_coefficients(&(as_coefficients(v, dim_s, dim_e) * h.matrix().transpose()))
}

/// `C_Q = 4 Var_Φ(Ĥ - ĥ_E)`, evaluated as the pure-state QFI of
/// `|dΦ'> = |dΦ> + i(1 ⊗ h)|Φ>`. `h = None` means `ĥ_E = 0`.
pub fn cq_of_purification(p: &Purification, h: Option<&HermitianOperator>) -> Result<f64> {
    let Some(h) = h else {
        return Ok(pure_state_qfi(&p.state, &p.derivative));
    };
    check_env_operator(p, h)?;
    let h_phi = apply_env(&p.state, h, p.dim_s, p.dim_e);
    let shifted = &p.derivative + h_phi * c(0.0, 1.0);
    Ok(pure_state_qfi(&p.state, &shifted))
}

/// `Tr_S D[ρ_{S,E}]` with `D = (i/2)(|dΦ><Φ| - |Φ><dΦ|)`.
pub fn environment_rhs(p: &Purification) -> HermitianOperator {
    let a = partial_trace_outer(&p.derivative, &p.state, Subsystem::S, p.dim_s, p.dim_e);
    let b = partial_trace_outer(&p.state, &p.derivative, Subsystem::S, p.dim_s, p.dim_e);
    HermitianOperator::from_hermitian_part(&((a - b) * c(0.0, 0.5)))
}

#[derive(Debug, Clone)]
pub struct VariationalResult {
    /// `C_Q` of the purification as given (`ĥ_E = 0`).
    pub cq_raw: f64,
    pub h_opt: HermitianOperator,
    pub var_h_opt: f64,
    /// `cq_raw - 4 Var(ĥ_opt)`.
    pub qfi: f64,
    /// `C_Q` re-evaluated with `ĥ_opt` plugged in.
    pub cq_at_opt: f64,
    /// `Cov(Ĥ, ĥ_opt)`, equal to `Var(ĥ_opt)` at the optimum.
    pub covariance: f64,
    /// `|qfi - cq_at_opt| / max(1, cq_raw)`. Above [`IDENTITY_TOL`] the
    /// solve did not reach the minimum (typically a support threshold that
    /// discards real weight) and `qfi` is not a trustworthy value.
    pub identity_gap: f64,
    pub residual: f64,
    pub unreachable_flag: bool,
    pub rank_tol: f64,
    /// Number of environment eigenvalues above `rank_tol`.
    pub env_rank: usize,
}

pub const IDENTITY_TOL: f64 = 1e-8;

/// Solves `(ĥ ρ_E + ρ_E ĥ)/2 = Tr_S D[ρ_{S,E}]` for the optimal environment
/// generator and returns `F_Q = C_Q - 4 Var(ĥ_opt)`.
pub fn optimal_h(p: &Purification, rank_tol: Option<f64>) -> Result<VariationalResult> {
    let (ds, de) = (p.dim_s, p.dim_e);
    let rho_e = DensityMatrix::from_trusted(partial_trace_outer(
        &p.state,
        &p.state,
        Subsystem::S,
        ds,
        de,
    ));
    let rhs = environment_rhs(p);
    let eig = rho_e.eig();
    let sol = solve_anticommutator_in(&eig, &rhs, rank_tol);
    let r_norm = frobenius_norm(rhs.matrix());
    let tolerance = hybrid(1e-10, r_norm);
    if sol.residual > tolerance {
        return Err(Error::SylvesterResidual {
            residual: sol.residual,
            tolerance,
        });
    }
    if sol.unreachable {
        log::warn!(
            "environment RHS has weight {:.3e} outside the support of rho_E",
            sol.unreachable_norm
        );
    }

    // gauge: <h> = <H>
    let mean_big_h = (p.state.dotc(&p.derivative) * c(0.0, 1.0)).re;
    let h0 = sol.h;
    let mean_h0 = trace_product(rho_e.matrix(), h0.matrix()).re;
    let h_opt = h0.shifted(mean_big_h - mean_h0);

    let h_phi = apply_env(&p.state, &h_opt, ds, de);
    let mean_h = p.state.dotc(&h_phi).re;
    let var_h_opt = (h_phi.norm_squared() - mean_h * mean_h).max(0.0);
    // <H h> = <HΦ|hΦ> with HΦ = i dΦ
    let big_h_phi = &p.derivative * c(0.0, 1.0);
    let covariance = big_h_phi.dotc(&h_phi).re - mean_big_h * mean_h;

    let cq_raw = cq_of_purification(p, None)?;
    let cq_at_opt = cq_of_purification(p, Some(&h_opt))?;
    let mut qfi = cq_raw - 4.0 * var_h_opt;
    let scale = cq_raw.max(1.0);
    if qfi < 0.0 && qfi > -1e-9 * scale {
        qfi = 0.0;
    }
    let identity_gap = (qfi - cq_at_opt).abs() / scale;
    if identity_gap > IDENTITY_TOL {
        log::warn!("C_Q - 4Var(h) = {qfi} but C_Q(h) = {cq_at_opt}: h is not a stationary point");
    }
    Ok(VariationalResult {
        cq_raw,
        h_opt,
        var_h_opt,
        qfi,
        cq_at_opt,
        covariance,
        identity_gap,
        residual: sol.residual,
        unreachable_flag: sol.unreachable,
        rank_tol: sol.rank_tol,
        env_rank: eig
            .eigenvalues
            .iter()
            .filter(|&&l| 2.0 * l > sol.rank_tol)
            .count(),
    })
}

/// Truncated annihilation operator `b` on `dim` Fock levels.
pub fn annihilation(dim: usize) -> ComplexMatrix {
    let mut b = ComplexMatrix::zeros(dim, dim);
    for k in 1..dim {
        b[(k - 1, k)] = c((k as f64).sqrt(), 0.0);
    }
    b
}

/// Dimensionless momentum `p̂ = (b - b†)/(i√2)` in a truncated Fock basis.
pub fn momentum(dim: usize) -> HermitianOperator {
    let b = annihilation(dim);
    HermitianOperator::from_hermitian_part(
        &((&b - b.adjoint()) * c(0.0, -std::f64::consts::FRAC_1_SQRT_2)),
    )
}

/// `ĥ_E = λ p̂_E / (2β)`, the generator of `e^{iφλ p̂_E/(2β)}`.
pub fn momentum_family_h(dim_e: usize, beta: f64, lambda: f64) -> Result<HermitianOperator> {
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument(
            "momentum family needs beta > 0".into(),
        ));
    }
    Ok(momentum(dim_e).scaled(lambda / (2.0 * beta)))
}

/// Closed form of the environment RHS for the mirror model:
/// `[-i b̂/(2√2β)] ρ_E + i ρ_E [b̂†/(2√2β)]`.
pub fn analytic_rhs_mirror(p: &Purification, beta: f64) -> Result<HermitianOperator> {
    if !matches!(p.kind, PurificationKind::Mirror { .. }) {
        return Err(Error::InvalidArgument(
            "closed-form RHS requires a mirror-model purification".into(),
        ));
    }
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument(
            "closed-form RHS is singular at beta = 0".into(),
        ));
    }
    let rho_e = p.reduced_environment();
    let rho_e = rho_e.matrix();
    let de = p.dim_e;
    let k = 1.0 / (2.0 * std::f64::consts::SQRT_2 * beta);
    // b is bidiagonal: (b ρ)_{ij} = √(i+1) ρ_{i+1,j}
    let left = ComplexMatrix::from_fn(de, de, |i, j| {
        if i + 1 < de {
            rho_e[(i + 1, j)] * c(0.0, -k * ((i + 1) as f64).sqrt())
        } else {
            c(0.0, 0.0)
        }
    });
    Ok(HermitianOperator::from_hermitian_part(
        &(&left + left.adjoint()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{cq_lambda, lambda_opt};
    use crate::channel::{
        dephased_state, dephased_state_derivative, env_cutoff_for_edge, factored_purification,
        mirror_purification, spectral_purification, ChannelParams, DEFAULT_FD_STEP,
    };
    use crate::probe::{coherent, fock, fock_superposition, squeezed_vacuum, Cutoff, ProbeState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(beta2: f64) -> ChannelParams {
        ChannelParams::new(0.3, beta2, 1).unwrap()
    }

    fn oracle(psi: &ProbeState, beta2: f64) -> f64 {
        let pr = params(beta2);
        qfi_sld_oracle(
            &dephased_state(psi, &pr),
            &dephased_state_derivative(psi, &pr),
            None,
        )
        .unwrap()
        .value
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1.0)
    }

    #[test]
    fn pure_state_routes() {
        let psi = coherent(c(1.5, 0.0), Cutoff::Auto);
        let p = mirror_purification(&psi, &params(0.0), Cutoff::Auto).unwrap();
        assert!(rel(qfi_pure(&p), 4.0 * 2.25) < 1e-9);
        assert!(rel(oracle(&psi, 0.0), qfi_pure(&p)) < 1e-9);

        let p = mirror_purification(&fock(4, 8).unwrap(), &params(0.0), Cutoff::Auto).unwrap();
        assert!(qfi_pure(&p) < 1e-12);

        let mut frozen = p.clone();
        frozen.derivative.fill(c(0.0, 0.0));
        assert_eq!(qfi_pure(&frozen), 0.0);
    }

    #[test]
    fn oracle_zero_derivative() {
        let rho = DensityMatrix::from_pure(coherent(c(1.0, 0.0), Cutoff::Fixed(20)).amplitudes());
        let sld = qfi_sld_oracle(&rho, &ComplexMatrix::zeros(20, 20), None).unwrap();
        assert_eq!(sld.value, 0.0);
        assert!(!sld.unreachable);
    }

    #[test]
    fn variational_matches_oracle() {
        for (psi, beta2) in [
            (coherent(c(1.0, 0.0), Cutoff::Fixed(40)), 0.05),
            (coherent(c(2f64.sqrt(), 0.0), Cutoff::Auto), 0.05),
            (squeezed_vacuum(0.6, Cutoff::Auto).unwrap(), 0.01),
        ] {
            let f = oracle(&psi, beta2);
            for p in [
                mirror_purification(&psi, &params(beta2), Cutoff::Auto).unwrap(),
                factored_purification(&psi, &params(beta2)),
            ] {
                let v = optimal_h(&p, None).unwrap();
                assert!(rel(v.qfi, f) < 1e-6, "{} vs {f}", v.qfi);
                assert!(rel(v.cq_at_opt, f) < 1e-6);
                assert!(v.qfi <= v.cq_raw * (1.0 + 1e-12));
                assert!((v.covariance - v.var_h_opt).abs() <= 1e-8 * v.var_h_opt.max(1.0));
            }
        }
    }

    #[test]
    fn noiseless_and_number_state_limits() {
        let psi = coherent(c(1.0, 0.0), Cutoff::Auto);
        let p = mirror_purification(&psi, &params(0.0), Cutoff::Auto).unwrap();
        let v = optimal_h(&p, None).unwrap();
        assert!(rel(v.qfi, 4.0) < 1e-8);
        assert!(v.var_h_opt < 1e-12);

        let p = mirror_purification(&fock(3, 6).unwrap(), &params(0.2), Cutoff::Auto).unwrap();
        assert!(optimal_h(&p, None).unwrap().qfi.abs() < 1e-12);
    }

    #[test]
    fn mirror_trivial_bound_is_number_variance() {
        let psi = squeezed_vacuum(0.4, Cutoff::Auto).unwrap();
        let p = mirror_purification(&psi, &params(0.03), Cutoff::Auto).unwrap();
        let var_n = psi.statistics().var_n;
        assert!(rel(cq_of_purification(&p, None).unwrap(), 4.0 * var_n) < 1e-9);
        for shift in [-1.0, 1.0, 10.0] {
            let h = HermitianOperator::identity(p.dim_e).scaled(shift);
            let cq = cq_of_purification(&p, Some(&h)).unwrap();
            assert!(rel(cq, 4.0 * var_n) < 1e-9);
        }
    }

    #[test]
    fn gauge_shift_leaves_optimum() {
        let psi = coherent(c(1.2, 0.4), Cutoff::Auto);
        let p = factored_purification(&psi, &params(0.02));
        let v = optimal_h(&p, None).unwrap();
        for shift in [-1.0, 1.0, 10.0] {
            let cq = cq_of_purification(&p, Some(&v.h_opt.shifted(shift))).unwrap();
            assert!((cq - v.qfi).abs() <= 1e-10 * v.qfi.max(1.0));
        }
    }

    #[test]
    fn analytic_rhs_matches_partial_trace() {
        for psi in [
            coherent(c(1.0, 0.0), Cutoff::Auto),
            coherent(c(0.0, 0.0), Cutoff::Fixed(4)),
            fock_superposition(&[(0, c(1.0, 0.0)), (4, c(0.0, 1.0))], 6).unwrap(),
        ] {
            let env = Cutoff::Fixed(env_cutoff_for_edge(&psi, 0.05, 1e-12));
            let p = mirror_purification(&psi, &params(0.05), env).unwrap();
            assert_eq!(p.dim_e, env.to_string().parse::<usize>().unwrap());
            let generic = environment_rhs(&p);
            let closed = analytic_rhs_mirror(&p, 0.05f64.sqrt()).unwrap();
            let diff = (generic.matrix() - closed.matrix())
                .iter()
                .fold(0.0, |m: f64, z| m.max(z.norm()));
            assert!(diff < 1e-9, "{diff}");
            check_hermitian(closed.matrix(), 1e-12).unwrap();
        }
        let vac = mirror_purification(
            &coherent(c(0.0, 0.0), Cutoff::Fixed(3)),
            &params(0.05),
            Cutoff::Auto,
        )
        .unwrap();
        assert!(frobenius_norm(analytic_rhs_mirror(&vac, 0.2).unwrap().matrix()) < 1e-15);
        assert!(analytic_rhs_mirror(&vac, 0.0).is_err());
        let fac = factored_purification(&coherent(c(1.0, 0.0), Cutoff::Auto), &params(0.05));
        assert!(analytic_rhs_mirror(&fac, 0.2).is_err());
    }

    #[test]
    fn lambda_family_reproduces_closed_form() {
        let beta2 = 0.01;
        let psi = coherent(c(2f64.sqrt(), 0.0), Cutoff::Auto);
        let var_n = psi.statistics().var_n;
        let p = mirror_purification(&psi, &params(beta2), Cutoff::Auto).unwrap();
        for lambda in [0.0, 0.25, 0.5, lambda_opt(var_n, beta2), 1.0] {
            let h = momentum_family_h(p.dim_e, beta2.sqrt(), lambda).unwrap();
            let cq = cq_of_purification(&p, Some(&h)).unwrap();
            let want = cq_lambda(var_n, beta2, lambda);
            assert!(
                (cq - want).abs() / want < 1e-6,
                "lambda {lambda}: {cq} vs {want}"
            );
        }
    }

    #[test]
    fn spectral_purification_agrees_with_mirror() {
        let psi = coherent(c(1.0, 0.0), Cutoff::Fixed(24));
        let pr = params(0.05);
        let rho = dephased_state(&psi, &pr);
        let drho = dephased_state_derivative(&psi, &pr);
        let spectral = spectral_purification(&rho, &drho, DEFAULT_FD_STEP, Some(1e-14)).unwrap();
        let mirror = mirror_purification(&psi, &pr, Cutoff::Auto).unwrap();
        let a = optimal_h(&spectral, Some(1e-14)).unwrap().qfi;
        let b = optimal_h(&mirror, None).unwrap().qfi;
        assert!((a - b).abs() / b < 1e-4, "{a} vs {b}");
    }

    #[test]
    fn classical_fisher_bounds() {
        let psi = coherent(c(1.0, 0.0), Cutoff::Fixed(12));
        let pr = params(0.02);
        let rho = dephased_state(&psi, &pr);
        let drho = dephased_state_derivative(&psi, &pr);
        let d = rho.dim();
        let f = qfi_sld_oracle(&rho, &drho, None).unwrap().value;

        let none = classical_fisher(&rho, &drho, &Povm::trivial(d), DEFAULT_PROB_FLOOR).unwrap();
        assert!(none.value.abs() < 1e-12);
        let counting =
            classical_fisher(&rho, &drho, &Povm::photon_number(d), DEFAULT_PROB_FLOOR).unwrap();
        assert!(counting.value.abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let general = Povm::random(d, 8, &mut rng).unwrap();
        assert!(
            classical_fisher(&rho, &drho, &general, DEFAULT_PROB_FLOOR)
                .unwrap()
                .value
                <= f + 1e-9
        );
        let proj = Povm::random_projective(d, &mut rng);
        let fp = classical_fisher(&rho, &drho, &proj, DEFAULT_PROB_FLOOR)
            .unwrap()
            .value;
        assert!(fp <= f + 1e-9 && fp > 0.0);
        let coarse =
            classical_fisher(&rho, &drho, &proj.coarse_grained(3), DEFAULT_PROB_FLOOR).unwrap();
        assert!(coarse.value <= fp + 1e-9);
    }

    #[test]
    fn povm_validation() {
        let half = HermitianOperator::identity(2).scaled(0.5);
        assert!(Povm::new(vec![half.clone()]).is_err());
        assert!(Povm::new(vec![half.clone(), half]).is_ok());
        assert!(Povm::new(vec![
            HermitianOperator::from_real_diagonal(&[2.0, 1.0]),
            HermitianOperator::from_real_diagonal(&[-1.0, 0.0])
        ])
        .is_err());
    }

    #[test]
    fn ladder_operators() {
        let b = annihilation(4);
        let comm = &b * b.adjoint() - b.adjoint() * &b;
        for k in 0..3 {
            assert!((comm[(k, k)] - c(1.0, 0.0)).norm() < 1e-14);
        }
        check_hermitian(momentum(5).matrix(), 1e-15).unwrap();
        assert!(momentum_family_h(3, 0.0, 0.5).is_err());
    }
}
