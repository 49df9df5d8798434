//! Bipartite states, spectra and the partial transpose.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::linalg::{
    c, eigh, hermitian_deviation, hermitize, outer, ComplexMatrix, ComplexVector, Eigen,
    HERMITIAN_TOL,
};
use crate::error::{Error, Result};

/// Trace tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted for a density matrix.
pub const PSD_TOL: f64 = 1e-10;

/// Local dimensions `(m, n)` of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub m: usize,
    pub n: usize,
}

impl Dims {
    pub const fn new(m: usize, n: usize) -> Self {
        Self { m, n }
    }

    pub const fn total(&self) -> usize {
        self.m * self.n
    }

    /// `d` for a qubit-qudit system `2 x d` (either order), if it is one.
    pub fn qubit_qudit(&self) -> Option<usize> {
        match (self.m, self.n) {
            (2, d) | (d, 2) if d >= 2 => Some(d),
            _ => None,
        }
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.m, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Ordered eigenvalue tuple of a state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub const SUM_TOL: f64 = 1e-12;

    /// Validating constructor: non-increasing, within `[0, 1]`, unit sum.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSpectrum("empty".into()));
        }
        if let Some(w) = values.windows(2).find(|w| w[0] < w[1]) {
            return Err(Error::InvalidSpectrum(format!(
                "not non-increasing ({} < {})",
                w[0], w[1]
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidSpectrum(format!("value {v} outside [0, 1]")));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::InvalidSpectrum(format!("sum is {sum}")));
        }
        Ok(Self { values })
    }

    /// Sorts descending and clamps rounding-level negatives (down to
    /// `-PSD_TOL`) to zero.
    pub fn from_eigenvalues(mut values: Vec<f64>) -> Result<Self> {
        values.sort_by(|a, b| b.total_cmp(a));
        for v in values.iter_mut() {
            if *v < 0.0 {
                if *v < -PSD_TOL {
                    return Err(Error::InvalidSpectrum(format!("negative eigenvalue {v:e}")));
                }
                *v = 0.0;
            }
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSpectrum(format!("sum is {sum}")));
        }
        Ok(Self { values })
    }

    /// Internal constructor for spectra produced by our own constructions.
    pub(crate) fn from_raw(values: Vec<f64>) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] >= w[1] - 1e-15));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// 1-based access, matching the usual `lambda_k` labelling.
    pub fn at(&self, k: usize) -> f64 {
        self.values[k - 1]
    }

    pub fn largest(&self) -> f64 {
        self.values[0]
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> f64 {
        self.values
            .iter()
            .filter(|&&v| v > 0.0)
            .map(|&v| -v * v.log2())
            .sum()
    }

    pub fn max_deviation(&self, other: &Spectrum) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Unit vector in a bipartite Hilbert space.
#[derive(Debug, Clone)]
pub struct PureState {
    dims: Dims,
    amplitudes: ComplexVector,
}

impl PureState {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(amplitudes: ComplexVector, dims: Dims) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for a {dims} system",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::InvalidState(format!("norm is {norm}, expected 1")));
        }
        Ok(Self { dims, amplitudes })
    }

    /// Normalises the given vector.
    pub fn normalized(amplitudes: ComplexVector, dims: Dims) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite vector".into()));
        }
        Self::new(amplitudes / c(norm, 0.0), dims)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix::from_parts(hermitize(&outer(&self.amplitudes)), self.dims)
    }

    /// Reduced state of subsystem A (tracing out B).
    pub fn reduced_a(&self) -> ComplexMatrix {
        partial_trace_b(&outer(&self.amplitudes), self.dims)
    }
}

/// Hermitian, PSD, unit-trace operator on `C^m (x) C^n`.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    dims: Dims,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validating constructor.
    pub fn new(mat: ComplexMatrix, dims: Dims) -> Result<Self> {
        let n = dims.total();
        if mat.nrows() != n || mat.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for a {dims} system",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let dev = hermitian_deviation(&mat);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let mat = hermitize(&mat);
        let min = super::linalg::min_eigenvalue(&mat)?;
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (min eigenvalue {min:e})"
            )));
        }
        Ok(Self { dims, mat })
    }

    /// Wraps a matrix produced by a trusted construction; symmetrises it and
    /// renormalises the trace.
    pub(crate) fn from_parts(mat: ComplexMatrix, dims: Dims) -> Self {
        let mut mat = hermitize(&mat);
        let tr = mat.trace().re;
        if tr != 0.0 && (tr - 1.0).abs() > 0.0 {
            mat /= c(tr, 0.0);
        }
        Self { dims, mat }
    }

    pub fn maximally_mixed(dims: Dims) -> Self {
        let n = dims.total();
        Self::from_parts(ComplexMatrix::identity(n, n) * c(1.0 / n as f64, 0.0), dims)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.total()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn eig(&self) -> Result<Eigen> {
        eigh(&self.mat)
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        Spectrum::from_eigenvalues(super::linalg::eigvalsh(&self.mat)?)
    }

    pub fn entropy(&self) -> Result<f64> {
        Ok(self.spectrum()?.entropy())
    }

    pub fn partial_transpose(&self, sub: Subsystem) -> ComplexMatrix {
        partial_transpose_matrix(&self.mat, self.dims, sub)
            .expect("density matrix dims are consistent")
    }

    /// Smallest eigenvalue of the partial transpose on B.
    pub fn pt_min_eigenvalue(&self) -> Result<f64> {
        super::linalg::min_eigenvalue(&self.partial_transpose(Subsystem::B))
    }

    /// `U rho U^dagger`.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Self {
        Self::from_parts(super::linalg::conjugate(u, &self.mat), self.dims)
    }

    /// `w * self + (1 - w) * other`.
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> Result<Self> {
        ensure_same_dims(self, other)?;
        Ok(Self::from_parts(
            &self.mat * c(w, 0.0) + &other.mat * c(1.0 - w, 0.0),
            self.dims,
        ))
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (&self.mat - &other.mat).camax()
    }
}

pub(crate) fn ensure_same_dims(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dims != b.dims {
        return Err(Error::DimensionMismatch(format!(
            "{} vs {}",
            a.dims, b.dims
        )));
    }
    Ok(())
}

/// Partial transpose of an operator on `C^m (x) C^n`.
///
/// Basis index of `|i>|j>` is `i * n + j`.
pub fn partial_transpose_matrix(
    mat: &ComplexMatrix,
    dims: Dims,
    sub: Subsystem,
) -> Result<ComplexMatrix> {
    let total = dims.total();
    if mat.nrows() != total || mat.ncols() != total {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix for a {dims} system",
            mat.nrows(),
            mat.ncols()
        )));
    }
    let (m, n) = (dims.m, dims.n);
    let mut out = ComplexMatrix::zeros(total, total);
    for i in 0..m {
        for j in 0..n {
            for k in 0..m {
                for l in 0..n {
                    let v = mat[(i * n + j, k * n + l)];
                    match sub {
                        Subsystem::B => out[(i * n + l, k * n + j)] = v,
                        Subsystem::A => out[(k * n + j, i * n + l)] = v,
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `tr_B` of an operator on `C^m (x) C^n`.
pub fn partial_trace_b(mat: &ComplexMatrix, dims: Dims) -> ComplexMatrix {
    let (m, n) = (dims.m, dims.n);
    ComplexMatrix::from_fn(m, m, |i, k| {
        (0..n).map(|j| mat[(i * n + j, k * n + j)]).sum()
    })
}

/// `tr_A` of an operator on `C^m (x) C^n`.
pub fn partial_trace_a(mat: &ComplexMatrix, dims: Dims) -> ComplexMatrix {
    let (m, n) = (dims.m, dims.n);
    ComplexMatrix::from_fn(n, n, |j, l| {
        (0..m).map(|i| mat[(i * n + j, i * n + l)]).sum()
    })
}
