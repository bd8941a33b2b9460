//! Dense complex matrices for one- and two-qubit operators.
//!
//! Matrices are stored inline (no heap) with dimension 2 or 4. Two-qubit
//! operators use the basis order `|target, ancilla>`, so that index 0 is
//! `|00>`, 1 is `|01>`, 2 is `|10>` and 3 is `|11>`.

use alloc::format;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
// Test builds link std, whose inherent float methods shadow the trait.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Tolerance for Hermiticity, trace and unitarity checks.
pub const STRUCTURAL_TOL: f64 = 1e-12;
/// Tolerance for the smallest eigenvalue of a density operator.
pub const SPECTRAL_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const MAX_ENTRIES: usize = 16;

/// Square complex matrix of dimension 2 or 4, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: [Complex64; MAX_ENTRIES],
}

impl ComplexMatrix {
    /// Zero matrix. Panics unless `dim` is 2 or 4.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim == 2 || dim == 4, "matrix dimension must be 2 or 4, got {dim}");
        ComplexMatrix { dim, entries: [ZERO; MAX_ENTRIES] }
    }

    /// Identity matrix. Panics unless `dim` is 2 or 4.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_row_major(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::invalid(format!("matrix dimension must be 2 or 4, got {dim}")));
        }
        if entries.len() != dim * dim {
            return Err(Error::invalid(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let mut m = Self::zeros(dim);
        m.entries[..dim * dim].copy_from_slice(entries);
        Ok(m)
    }

    pub fn from_rows2(rows: [[Complex64; 2]; 2]) -> Self {
        let mut m = Self::zeros(2);
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                m[(r, c)] = v;
            }
        }
        m
    }

    pub fn from_rows4(rows: [[Complex64; 4]; 4]) -> Self {
        let mut m = Self::zeros(4);
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                m[(r, c)] = v;
            }
        }
        m
    }

    /// Real diagonal matrix. Panics unless `diag` has length 2 or 4.
    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Projector `|k><k|` onto a computational basis state.
    pub fn basis_projector(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dimension {dim}");
        let mut m = Self::zeros(dim);
        m[(k, k)] = ONE;
        m
    }

    /// Outer product `|a><b|`.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::invalid("outer product of vectors with different lengths"));
        }
        let mut m = Self::try_zeros(a.len())?;
        for (r, ar) in a.iter().enumerate() {
            for (c, bc) in b.iter().enumerate() {
                m[(r, c)] = ar * bc.conj();
            }
        }
        Ok(m)
    }

    fn try_zeros(dim: usize) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::invalid(format!("matrix dimension must be 2 or 4, got {dim}")));
        }
        Ok(Self::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major view of the `dim * dim` entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries[..self.dim * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                m[(r, c)] = self[(c, r)].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut m = *self;
        m.entries.iter_mut().for_each(|v| *v *= s);
        m
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        self.same_dim(rhs)?;
        let n = self.dim;
        let mut m = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    m[(r, c)] += a * rhs[(k, c)];
                }
            }
        }
        Ok(m)
    }

    /// Matrix-vector product. Panics on a length mismatch.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "vector length does not match matrix dimension");
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self[(r, c)] * v[c]).sum())
            .collect()
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Largest modulus among off-diagonal entries.
    pub fn off_diagonal_norm(&self) -> f64 {
        let mut worst = 0.0;
        for r in 0..self.dim {
            for c in 0..self.dim {
                if r != c {
                    worst = f64::max(worst, self[(r, c)].norm());
                }
            }
        }
        worst
    }

    pub fn real_diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self[(i, i)].re).collect()
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::invalid(format!(
                "dimension mismatch: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        assert!(r < self.dim && c < self.dim, "index ({r}, {c}) out of bounds");
        &self.entries[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        assert!(r < self.dim && c < self.dim, "index ({r}, {c}) out of bounds");
        &mut self.entries[r * self.dim + c]
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on a dimension mismatch; use [`ComplexMatrix::checked_mul`] otherwise.
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        self.checked_mul(&rhs).expect("matrix product dimension mismatch")
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(mut self, rhs: ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        self.entries.iter_mut().zip(rhs.entries.iter()).for_each(|(a, b)| *a += b);
        self
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(mut self, rhs: ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        self.entries.iter_mut().zip(rhs.entries.iter()).for_each(|(a, b)| *a -= b);
        self
    }
}

/// Hermitian, unit-trace, positive-semidefinite state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityOperator(ComplexMatrix);

impl DensityOperator {
    /// Validates `matrix` at [`STRUCTURAL_TOL`] and [`SPECTRAL_TOL`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let report = validate_density(&matrix, STRUCTURAL_TOL);
        if !report.passes_with(STRUCTURAL_TOL, SPECTRAL_TOL) {
            return Err(Error::invalid(format!("not a density operator: {report:?}")));
        }
        Ok(DensityOperator(matrix))
    }

    /// Pure state `|psi><psi|`; `psi` is normalized first.
    pub fn from_pure(psi: &[Complex64]) -> Result<Self> {
        let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::invalid("state vector has zero or non-finite norm"));
        }
        let psi: Vec<Complex64> = psi.iter().map(|a| a / norm).collect();
        Self::new(ComplexMatrix::outer(&psi, &psi)?)
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    /// Skips validation. Callers guarantee the invariants hold mathematically.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        DensityOperator(matrix)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    /// Population of basis state `k`.
    pub fn population(&self, k: usize) -> f64 {
        self.0[(k, k)].re
    }

    pub fn validate(&self) -> ValidityReport {
        validate_density(&self.0, STRUCTURAL_TOL)
    }
}

/// Unitary gate or pulse propagator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateMatrix(ComplexMatrix);

impl GateMatrix {
    /// Checks `U^dag U = I` at [`STRUCTURAL_TOL`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let defect = unitarity_defect(&matrix);
        if defect > STRUCTURAL_TOL {
            return Err(Error::invalid(format!("matrix is not unitary (defect {defect:e})")));
        }
        Ok(GateMatrix(matrix))
    }

    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        GateMatrix(matrix)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn adjoint(&self) -> Self {
        GateMatrix(self.0.adjoint())
    }

    /// `self * other`: `other` acts first.
    pub fn then_after(&self, other: &GateMatrix) -> Result<GateMatrix> {
        Ok(GateMatrix(self.0.checked_mul(&other.0)?))
    }

    /// Composes gates listed in time order.
    pub fn sequence(gates: &[GateMatrix]) -> Result<GateMatrix> {
        let (first, rest) = gates
            .split_first()
            .ok_or_else(|| Error::invalid("empty gate sequence"))?;
        rest.iter().try_fold(*first, |acc, g| g.then_after(&acc))
    }

    pub fn apply_ket(&self, psi: &[Complex64]) -> Vec<Complex64> {
        self.0.mul_vec(psi)
    }
}

impl Mul for GateMatrix {
    type Output = GateMatrix;

    fn mul(self, rhs: GateMatrix) -> GateMatrix {
        GateMatrix(self.0 * rhs.0)
    }
}

/// `max |U^dag U - I|`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    (u.adjoint() * *u).max_abs_diff(&ComplexMatrix::identity(u.dim))
}

/// Kronecker product `a ⊗ b` of two single-qubit operators. The first factor
/// acts on the target, the second on the ancilla.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim != 2 || b.dim != 2 {
        return Err(Error::invalid(format!(
            "tensor needs two 2x2 factors, got {}x{} and {}x{}",
            a.dim, a.dim, b.dim, b.dim
        )));
    }
    let mut m = ComplexMatrix::zeros(4);
    for ar in 0..2 {
        for ac in 0..2 {
            let x = a[(ar, ac)];
            for br in 0..2 {
                for bc in 0..2 {
                    m[(2 * ar + br, 2 * ac + bc)] = x * b[(br, bc)];
                }
            }
        }
    }
    Ok(m)
}

/// Product state `rho_t ⊗ rho_a`.
pub fn tensor_density(target: &DensityOperator, ancilla: &DensityOperator) -> Result<DensityOperator> {
    Ok(DensityOperator(tensor(&target.0, &ancilla.0)?))
}

/// `a ⊗ b` for gates.
pub fn tensor_gates(a: &GateMatrix, b: &GateMatrix) -> Result<GateMatrix> {
    Ok(GateMatrix(tensor(&a.0, &b.0)?))
}

/// Traces out the ancilla (second factor) of a two-qubit state.
pub fn partial_trace_ancilla(rho: &DensityOperator) -> Result<DensityOperator> {
    if rho.dim() != 4 {
        return Err(Error::invalid(format!(
            "partial trace needs a 4x4 state, got {}x{}",
            rho.dim(),
            rho.dim()
        )));
    }
    let m = &rho.0;
    let mut out = ComplexMatrix::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = (0..2).map(|k| m[(2 * i + k, 2 * j + k)]).sum();
        }
    }
    Ok(DensityOperator(out))
}

/// `U rho U^dag`.
pub fn apply_unitary(rho: &DensityOperator, u: &GateMatrix) -> Result<DensityOperator> {
    let m = u.0.checked_mul(&rho.0)?.checked_mul(&u.0.adjoint())?;
    Ok(DensityOperator(m))
}

/// `tr(obs rho)` for a Hermitian observable.
pub fn expectation(rho: &DensityOperator, obs: &ComplexMatrix) -> Result<f64> {
    if obs.dim != rho.dim() {
        return Err(Error::invalid(format!(
            "observable is {}x{} but state is {}x{}",
            obs.dim,
            obs.dim,
            rho.dim(),
            rho.dim()
        )));
    }
    let defect = obs.hermiticity_defect();
    if defect > STRUCTURAL_TOL {
        return Err(Error::invalid(format!("observable is not Hermitian (defect {defect:e})")));
    }
    let value = obs.checked_mul(&rho.0)?.trace();
    debug_assert!(
        value.im.abs() <= STRUCTURAL_TOL,
        "imaginary residual {} in expectation value",
        value.im
    );
    Ok(value.re)
}

/// Outcome of [`validate_density`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidityReport {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
    pub passed: bool,
}

impl ValidityReport {
    /// Re-judges the report with separate structural and spectral tolerances.
    pub fn passes_with(&self, structural: f64, spectral: f64) -> bool {
        self.hermiticity_defect <= structural
            && self.trace_defect <= structural
            && self.min_eigenvalue >= -spectral
    }
}

/// Reports how far `rho` is from being a density operator. Passes iff every
/// defect is within `tol`.
pub fn validate_density(rho: &ComplexMatrix, tol: f64) -> ValidityReport {
    let hermiticity_defect = rho.hermiticity_defect();
    let trace_defect = (rho.trace() - ONE).norm();
    // Eigenvalues of the Hermitian part; the anti-Hermitian part is already
    // accounted for by the Hermiticity defect.
    let herm = (*rho + rho.adjoint()).scale_real(0.5);
    let min_eigenvalue = hermitian_eigenvalues(&herm)
        .first()
        .copied()
        .unwrap_or(f64::NAN);
    let mut report = ValidityReport {
        hermiticity_defect,
        trace_defect,
        min_eigenvalue,
        passed: false,
    };
    report.passed = report.passes_with(tol, tol);
    report
}

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// The `n x n` Hermitian matrix `A + iB` is embedded as the real symmetric
/// `2n x 2n` matrix `[[A, -B], [B, A]]`, whose spectrum is that of the
/// original with every eigenvalue doubled; cyclic Jacobi rotations then
/// diagonalize it.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.dim;
    let size = 2 * n;
    let mut a = [[0.0f64; 8]; 8];
    for r in 0..n {
        for c in 0..n {
            let v = m[(r, c)];
            a[r][c] = v.re;
            a[r + n][c + n] = v.re;
            a[r][c + n] = -v.im;
            a[r + n][c] = v.im;
        }
    }
    jacobi_symmetric(&mut a, size);
    let mut eig: Vec<f64> = (0..size).map(|i| a[i][i]).collect();
    eig.sort_by(|x, y| x.total_cmp(y));
    // Each eigenvalue appears twice; keep one of every pair.
    eig.into_iter().step_by(2).collect()
}

#[allow(clippy::needless_range_loop)]
fn jacobi_symmetric(a: &mut [[f64; 8]; 8], n: usize) {
    const MAX_SWEEPS: usize = 64;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum();
        if off < 1e-30 {
            return;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut().take(n) {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
}
