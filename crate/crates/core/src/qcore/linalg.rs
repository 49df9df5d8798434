//! Dense complex linear algebra on small Hermitian operators.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Elementwise symmetry tolerance for Hermitian inputs.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues below this magnitude are treated as exact zeros by the
/// matrix functions of PSD operators.
pub const ZERO_EIGENVALUE: f64 = 1e-14;

const EIG_EPS: f64 = f64::EPSILON;
const EIG_MAX_ITERS: usize = 10_000;

pub(crate) const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues non-increasing.
///
/// Column `k` of `vectors` is the eigenvector of `values[k]`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Rebuild `V f(diag) V^dagger`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &v) in self.values.iter().enumerate() {
            let fv = f(v);
            if fv == 0.0 {
                continue;
            }
            let col = self.vectors.column(k);
            for j in 0..n {
                let cj = col[j].conj() * fv;
                for i in 0..n {
                    out[(i, j)] += col[i] * cj;
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|v| v)
    }

    pub fn min_value(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }
}

/// Largest elementwise deviation from Hermiticity.
pub fn hermitian_deviation(a: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(A + A^dagger) / 2`.
pub fn hermitize(a: &ComplexMatrix) -> ComplexMatrix {
    (a + a.adjoint()) * c(0.5, 0.0)
}

/// Hermitian eigendecomposition with descending eigenvalues.
///
/// Ties keep the solver's original index order. Inputs whose symmetry
/// deviation exceeds [`HERMITIAN_TOL`] are rejected.
pub fn eig_hermitian(a: &ComplexMatrix) -> Result<Eigen> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let dev = hermitian_deviation(a);
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    eigh(&hermitize(a))
}

/// Eigendecomposition of a matrix known to be Hermitian up to rounding.
/// The input is symmetrised first.
pub(crate) fn eigh(a: &ComplexMatrix) -> Result<Eigen> {
    let n = a.nrows();
    let sym = hermitize(a);
    let eig = SymmetricEigen::try_new(sym, EIG_EPS, EIG_MAX_ITERS)
        .ok_or_else(|| Error::NumericalFailure("Hermitian eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    // stable sort: equal eigenvalues keep their original index order
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(Eigen { values, vectors })
}

/// Eigenvalues only, descending.
pub(crate) fn eigvalsh(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let sym = hermitize(a);
    let mut vals: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure("non-finite eigenvalue".into()));
    }
    vals.sort_by(|a, b| b.total_cmp(a));
    Ok(vals)
}

pub(crate) fn min_eigenvalue(a: &ComplexMatrix) -> Result<f64> {
    Ok(*eigvalsh(a)?.last().expect("non-empty matrix"))
}

/// `f(A)` for a PSD matrix: eigenvalues in `(-clamp, 0)` are set to zero and
/// those below [`ZERO_EIGENVALUE`] are treated as zero.
pub(crate) fn psd_fn(
    a: &ComplexMatrix,
    clamp: f64,
    f: impl Fn(f64) -> f64,
) -> Result<ComplexMatrix> {
    let eig = eigh(a)?;
    if eig.min_value() < -clamp {
        return Err(Error::NumericalFailure(format!(
            "matrix function of a non-PSD operator (min eigenvalue {:e})",
            eig.min_value()
        )));
    }
    Ok(eig.map(|v| if v <= ZERO_EIGENVALUE { 0.0 } else { f(v) }))
}

pub fn sqrtm_psd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    psd_fn(a, 1e-10, f64::sqrt)
}

/// `exp(i H)` for Hermitian `H`.
pub fn expm_i_hermitian(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eigh(h)?;
    let n = eig.dim();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &v) in eig.values.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, v);
        let col = eig.vectors.column(k);
        for j in 0..n {
            let cj = col[j].conj() * phase;
            for i in 0..n {
                out[(i, j)] += col[i] * cj;
            }
        }
    }
    Ok(out)
}

/// Kronecker product.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// `U A U^dagger`.
pub fn conjugate(u: &ComplexMatrix, a: &ComplexMatrix) -> ComplexMatrix {
    u * a * u.adjoint()
}

/// Real part of `tr(A B)`.
pub fn trace_product_re(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            acc += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    acc
}

pub fn outer(v: &ComplexVector) -> ComplexMatrix {
    v * v.adjoint()
}

/// Max deviation of `U^dagger U` from the identity.
pub fn unitarity_deviation(u: &ComplexMatrix) -> f64 {
    let n = u.nrows();
    let g = u.adjoint() * u;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}

/// Completes a unit vector to an orthonormal basis by Gram–Schmidt against
/// the canonical basis. Column 0 of the result is `v` itself; each further
/// column comes from the canonical vector with the largest residual.
pub fn complete_basis(v: &ComplexVector) -> ComplexMatrix {
    let n = v.len();
    let mut cols: Vec<ComplexVector> = Vec::with_capacity(n);
    cols.push(v.normalize());
    let mut used = vec![false; n];
    while cols.len() < n {
        let mut best: Option<(usize, ComplexVector, f64)> = None;
        for k in (0..n).filter(|&k| !used[k]) {
            let mut e = ComplexVector::zeros(n);
            e[k] = ONE;
            // two passes keep the basis orthonormal to rounding
            for _ in 0..2 {
                for q in &cols {
                    let proj = q.dotc(&e);
                    e -= q * proj;
                }
            }
            let norm = e.norm();
            if best.as_ref().is_none_or(|b| norm > b.2) {
                best = Some((k, e, norm));
            }
        }
        let (k, e, norm) = best.expect("a canonical vector remains");
        used[k] = true;
        cols.push(e / c(norm, 0.0));
    }
    ComplexMatrix::from_columns(&cols)
}
