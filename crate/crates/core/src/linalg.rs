//! Dense complex matrix primitives.
//!
//! Composite systems use the S-major index convention everywhere: a basis
//! state `|s>_S |e>_E` lives at index `s * dim_e + e`. A state vector on
//! `S⊗E` therefore reshapes to a `dim_s × dim_e` matrix whose rows are
//! indexed by `s`.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Per-entry Hermiticity tolerance, scaled by `max(1, max |H_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;
/// Default support threshold for `rho`, relative to its largest eigenvalue.
pub const DEFAULT_RELATIVE_RANK_TOL: f64 = 1e-12;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn hybrid(tol: f64, scale: f64) -> f64 {
    tol * scale.max(1.0)
}

fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Returns the entry pair with the largest Hermiticity defect if it exceeds
/// `tol · max(1, max |m_ij|)`.
pub fn check_hermitian(m: &ComplexMatrix, tol: f64) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    let mut worst = (0, 0, 0.0);
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            if d > worst.2 {
                worst = (i, j, d);
            }
        }
    }
    if worst.2 > hybrid(tol, max_abs(m)) {
        return Err(Error::NotHermitian {
            row: worst.0,
            col: worst.1,
            deviation: worst.2,
        });
    }
    Ok(())
}

fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// A Hermitian matrix. Construction checks the Hermiticity invariant and then
/// stores the exact Hermitian part.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator(ComplexMatrix);

impl HermitianOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        check_hermitian(&m, HERMITIAN_TOL)?;
        Ok(Self(hermitian_part(&m)))
    }

    /// Takes `(m + m†)/2` without checking.
    pub fn from_hermitian_part(m: &ComplexMatrix) -> Self {
        Self(hermitian_part(m))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self(ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(
            diag.len(),
            diag.iter().map(|&x| c(x, 0.0)),
        )))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(ComplexMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// `self + shift · 1`
    pub fn shifted(&self, shift: f64) -> Self {
        let mut m = self.0.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += c(shift, 0.0);
        }
        Self(m)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.scale(factor))
    }

    pub fn eig(&self) -> EigenDecomposition {
        eig_unchecked(&self.0)
    }

    /// `<v|H|v>`, real part only.
    pub fn expectation(&self, v: &ComplexVector) -> f64 {
        v.dotc(&(&self.0 * v)).re
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Validates all three invariants (the PSD check costs an eigensolve).
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        check_hermitian(&m, HERMITIAN_TOL)?;
        let m = hermitian_part(&m);
        let tr = m.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
        }
        let low = eig_unchecked(&m).eigenvalues[0];
        if low < -PSD_TOL {
            return Err(Error::InvalidDensity(format!(
                "smallest eigenvalue {low:.3e} is negative"
            )));
        }
        Ok(Self(m))
    }

    /// `|v><v| / <v|v>`
    pub fn from_pure(v: &ComplexVector) -> Self {
        let n2 = v.norm_squared();
        Self((v * v.adjoint()).unscale(n2))
    }

    /// For matrices that are density matrices by construction (reduced
    /// states of normalized vectors); only the Hermitian part is taken.
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        Self(hermitian_part(&m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn eig(&self) -> EigenDecomposition {
        eig_unchecked(&self.0)
    }

    pub fn purity(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Eigenvalues in ascending order with the matching eigenvectors as the
/// columns of a unitary matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `V diag(f(λ)) V†`
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            let fj = f(l);
            scaled.column_mut(j).scale_mut(fj);
        }
        scaled * v.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_eigenvalues(|l| l)
    }

    /// Matrix of `m` in the eigenbasis: `V† m V`.
    pub fn to_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.eigenvectors.adjoint() * m * &self.eigenvectors
    }

    pub fn from_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        &self.eigenvectors * m * self.eigenvectors.adjoint()
    }
}

fn eig_unchecked(m: &ComplexMatrix) -> EigenDecomposition {
    let n = m.nrows();
    if n == 0 {
        return EigenDecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: ComplexMatrix::zeros(0, 0),
        };
    }
    let se = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &se.eigenvectors.column(src));
    }
    EigenDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    check_hermitian(m, HERMITIAN_TOL)?;
    Ok(eig_unchecked(&hermitian_part(m)))
}

pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Resolves an optional absolute support threshold against the spectrum.
pub fn resolve_rank_tol(rank_tol: Option<f64>, eig: &EigenDecomposition) -> f64 {
    rank_tol
        .unwrap_or_else(|| DEFAULT_RELATIVE_RANK_TOL * eig.max_eigenvalue().max(f64::MIN_POSITIVE))
}

/// Solution of `(h·rho + rho·h)/2 = R` restricted to the support of `rho`.
#[derive(Debug, Clone)]
pub struct AnticommutatorSolution {
    pub h: HermitianOperator,
    /// Frobenius residual over eigenbasis pairs with `λ_i + λ_j > rank_tol`.
    pub residual: f64,
    /// Frobenius norm of `R` over the pairs that were zeroed.
    pub unreachable_norm: f64,
    /// `R` has weight outside the support of `rho`.
    pub unreachable: bool,
    pub rank_tol: f64,
}

/// Solves the anticommutator (Sylvester) equation `(h rho + rho h)/2 = R`.
///
/// In the eigenbasis of `rho`, `h_ij = 2 R_ij / (λ_i + λ_j)` whenever
/// `λ_i + λ_j > rank_tol` and `h_ij = 0` otherwise. `rank_tol = None` means
/// `1e-12 · λ_max`.
pub fn solve_anticommutator(
    rho: &DensityMatrix,
    r: &HermitianOperator,
    rank_tol: Option<f64>,
) -> Result<AnticommutatorSolution> {
    if rho.dim() != r.dim() {
        return Err(Error::Dimension(format!(
            "rho is {0}x{0} but R is {1}x{1}",
            rho.dim(),
            r.dim()
        )));
    }
    if let Some(t) = rank_tol {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "rank_tol must be positive, got {t}"
            )));
        }
    }
    let eig = rho.eig();
    Ok(solve_anticommutator_in(&eig, r, rank_tol))
}

pub(crate) fn solve_anticommutator_in(
    eig: &EigenDecomposition,
    r: &HermitianOperator,
    rank_tol: Option<f64>,
) -> AnticommutatorSolution {
    let tol = resolve_rank_tol(rank_tol, eig);
    let lam = &eig.eigenvalues;
    let n = lam.len();
    let r_eb = eig.to_eigenbasis(r.matrix());
    let mut h_eb = ComplexMatrix::zeros(n, n);
    let mut unreachable2 = 0.0;
    for j in 0..n {
        for i in 0..n {
            let s = lam[i] + lam[j];
            if s > tol {
                h_eb[(i, j)] = r_eb[(i, j)] * (2.0 / s);
            } else {
                unreachable2 += r_eb[(i, j)].norm_sqr();
            }
        }
    }
    let h = HermitianOperator::from_hermitian_part(&eig.from_eigenbasis(&h_eb));

    // residual of the back-transformed solution, measured on the support pairs
    let rho = eig.reconstruct();
    let lhs = (h.matrix() * &rho + &rho * h.matrix()).scale(0.5) - r.matrix();
    let lhs_eb = eig.to_eigenbasis(&lhs);
    let mut residual2 = 0.0;
    for j in 0..n {
        for i in 0..n {
            if lam[i] + lam[j] > tol {
                residual2 += lhs_eb[(i, j)].norm_sqr();
            }
        }
    }
    let unreachable_norm = unreachable2.sqrt();
    let r_norm = frobenius_norm(r.matrix());
    AnticommutatorSolution {
        h,
        residual: residual2.sqrt(),
        unreachable_norm,
        unreachable: unreachable_norm > hybrid(1e-10, r_norm),
        rank_tol: tol,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    S,
    E,
}

/// Partial trace of an operator on `S⊗E`; `trace_out` names the discarded
/// factor.
pub fn partial_trace(
    m: &ComplexMatrix,
    trace_out: Subsystem,
    dim_s: usize,
    dim_e: usize,
) -> Result<ComplexMatrix> {
    let d = dim_s * dim_e;
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::Dimension(format!(
            "operator is {}x{}, expected {d}x{d} for dim_S={dim_s}, dim_E={dim_e}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(match trace_out {
        Subsystem::E => ComplexMatrix::from_fn(dim_s, dim_s, |s, t| {
            (0..dim_e).map(|e| m[(s * dim_e + e, t * dim_e + e)]).sum()
        }),
        Subsystem::S => ComplexMatrix::from_fn(dim_e, dim_e, |e, f| {
            (0..dim_s).map(|s| m[(s * dim_e + e, s * dim_e + f)]).sum()
        }),
    })
}

/// Views a composite vector as its `dim_s × dim_e` coefficient matrix.
pub fn as_coefficients(v: &ComplexVector, dim_s: usize, dim_e: usize) -> ComplexMatrix {
    debug_assert_eq!(v.len(), dim_s * dim_e);
    ComplexMatrix::from_row_slice(dim_s, dim_e, v.as_slice())
}

pub fn from_coefficients(m: &ComplexMatrix) -> ComplexVector {
    ComplexVector::from_iterator(m.len(), m.transpose().iter().copied())
}

/// Partial trace of `|a><b|` without forming the composite operator.
pub fn partial_trace_outer(
    a: &ComplexVector,
    b: &ComplexVector,
    trace_out: Subsystem,
    dim_s: usize,
    dim_e: usize,
) -> ComplexMatrix {
    let ma = as_coefficients(a, dim_s, dim_e);
    let mb = as_coefficients(b, dim_s, dim_e);
    match trace_out {
        Subsystem::E => &ma * mb.adjoint(),
        Subsystem::S => ma.transpose() * mb.map(|z| z.conj()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: usize, cols: usize, data: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| c(x, 0.0)))
    }

    #[test]
    fn eig_identity_and_diagonal() {
        let e = hermitian_eig(&ComplexMatrix::identity(3, 3)).unwrap();
        assert!(e.eigenvalues.iter().all(|&l| (l - 1.0).abs() < 1e-14));

        let e = hermitian_eig(&real(2, 2, &[2.0, 0.0, 0.0, -1.0])).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 2.0).abs() < 1e-14);
        assert!((e.eigenvectors[(1, 0)].norm() - 1.0).abs() < 1e-14);
        assert!((e.eigenvectors[(0, 1)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_pauli_x_residual() {
        let x = real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let e = hermitian_eig(&x).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
        for k in 0..2 {
            let v = e.eigenvectors.column(k).into_owned();
            let res = &x * &v - v.scale(e.eigenvalues[k]);
            assert!(res.norm() < 1e-12);
            // (1, ∓1)/√2 up to phase
            assert!((v[0].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn eig_rejects_non_hermitian_naming_pair() {
        let m = real(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.5, 0.0, 0.0, 1.0]);
        match hermitian_eig(&m) {
            Err(Error::NotHermitian { row, col, .. }) => assert_eq!((row, col), (1, 2)),
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn anticommutator_maximally_mixed() {
        let rho = DensityMatrix::new(ComplexMatrix::identity(4, 4).unscale(4.0)).unwrap();
        let mut r = ComplexMatrix::zeros(4, 4);
        r[(0, 1)] = c(0.3, -0.2);
        r[(1, 0)] = c(0.3, 0.2);
        r[(2, 2)] = c(1.5, 0.0);
        r[(3, 0)] = c(0.0, 0.7);
        r[(0, 3)] = c(0.0, -0.7);
        let r = HermitianOperator::new(r).unwrap();
        let sol = solve_anticommutator(&rho, &r, None).unwrap();
        let diff = sol.h.matrix() - r.matrix().scale(4.0);
        assert!(frobenius_norm(&diff) < 1e-12);
        assert!(!sol.unreachable);
    }

    #[test]
    fn anticommutator_two_level() {
        let rho = DensityMatrix::new(real(2, 2, &[0.75, 0.0, 0.0, 0.25])).unwrap();
        let r = HermitianOperator::new(real(2, 2, &[0.0, 0.25, 0.25, 0.0])).unwrap();
        let sol = solve_anticommutator(&rho, &r, None).unwrap();
        let expected = real(2, 2, &[0.0, 0.5, 0.5, 0.0]);
        assert!(frobenius_norm(&(sol.h.matrix() - expected)) < 1e-12);
        let h = sol.h.matrix();
        let res = (h * rho.matrix() + rho.matrix() * h).scale(0.5) - r.matrix();
        assert!(frobenius_norm(&res) < 1e-12);
        assert!(sol.residual < 1e-12);
    }

    #[test]
    fn anticommutator_support_restriction() {
        let rho = DensityMatrix::new(real(2, 2, &[1.0, 0.0, 0.0, 0.0])).unwrap();
        let r = HermitianOperator::new(real(2, 2, &[0.5, 0.0, 0.0, 0.0])).unwrap();
        let sol = solve_anticommutator(&rho, &r, Some(1e-12)).unwrap();
        // (h rho + rho h)/2 = h_00 on the support, so h_00 = R_00
        assert!(frobenius_norm(&(sol.h.matrix() - real(2, 2, &[0.5, 0.0, 0.0, 0.0]))) < 1e-14);
        assert!(sol.residual < 1e-14);
        assert!(!sol.unreachable);
    }

    #[test]
    fn anticommutator_flags_unreachable_information() {
        let rho = DensityMatrix::new(real(2, 2, &[1.0, 0.0, 0.0, 0.0])).unwrap();
        let r = HermitianOperator::new(real(2, 2, &[0.0, 0.0, 0.0, 0.3])).unwrap();
        let sol = solve_anticommutator(&rho, &r, None).unwrap();
        assert!(sol.unreachable);
        assert!(frobenius_norm(sol.h.matrix()) < 1e-14);
    }

    #[test]
    fn anticommutator_rejects_mismatch_and_bad_tol() {
        let rho = DensityMatrix::new(ComplexMatrix::identity(2, 2).unscale(2.0)).unwrap();
        assert!(solve_anticommutator(&rho, &HermitianOperator::zeros(3), None).is_err());
        assert!(solve_anticommutator(&rho, &HermitianOperator::zeros(2), Some(0.0)).is_err());
    }

    #[test]
    fn partial_trace_product_and_bell() {
        let ket0 = real(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let sigma = real(3, 3, &[0.5, 0.1, 0.0, 0.1, 0.3, 0.0, 0.0, 0.0, 0.2]);
        let prod = kron(&ket0, &sigma);
        let red = partial_trace(&prod, Subsystem::E, 2, 3).unwrap();
        assert!(frobenius_norm(&(red - &ket0)) < 1e-15);
        let red_e = partial_trace(&prod, Subsystem::S, 2, 3).unwrap();
        assert!(frobenius_norm(&(red_e - &sigma)) < 1e-15);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = ComplexVector::from_vec(vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]);
        let proj = &bell * bell.adjoint();
        let red = partial_trace(&proj, Subsystem::E, 2, 2).unwrap();
        assert!(frobenius_norm(&(red - ComplexMatrix::identity(2, 2).scale(0.5))) < 1e-15);
        assert!(partial_trace(&proj, Subsystem::E, 3, 2).is_err());
    }

    #[test]
    fn partial_trace_outer_matches_full() {
        let a = ComplexVector::from_fn(6, |i, _| c(i as f64 * 0.3 - 0.5, 0.1 * i as f64));
        let b = ComplexVector::from_fn(6, |i, _| c(1.0 / (1.0 + i as f64), -0.2 * i as f64));
        let full = &a * b.adjoint();
        for sub in [Subsystem::S, Subsystem::E] {
            let direct = partial_trace(&full, sub, 2, 3).unwrap();
            let fast = partial_trace_outer(&a, &b, sub, 2, 3);
            assert!(frobenius_norm(&(direct - fast)) < 1e-14);
        }
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(frobenius_norm(&ComplexMatrix::zeros(3, 3)), 0.0);
        assert!((frobenius_norm(&ComplexMatrix::identity(4, 4)) - 2.0).abs() < 1e-15);
        assert!((frobenius_norm(&real(2, 2, &[3.0, 4.0, 0.0, 0.0])) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(real(2, 2, &[0.5, 0.0, 0.0, 0.6])).is_err());
        assert!(DensityMatrix::new(real(2, 2, &[1.2, 0.0, 0.0, -0.2])).is_err());
        assert!(DensityMatrix::new(real(2, 2, &[0.5, 0.5, 0.5, 0.5])).is_ok());
    }
}
