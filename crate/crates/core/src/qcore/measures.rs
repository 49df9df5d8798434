//! Distances and divergences between density matrices.
//!
//! Entropic quantities are in bits. Fidelity uses the squared convention
//! `F = (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`, so that `F(|a>, sigma) = <a|sigma|a>`.

use super::linalg::{eigh, eigvalsh, sqrtm_psd};
use super::state::{ensure_same_dims, DensityMatrix};
use crate::error::{Error, Result};

/// Eigenvalues below this are exact zeros for the relative entropy.
pub const RELENT_ZERO: f64 = 1e-12;
/// Largest weight of `rho` allowed in the kernel of `sigma`.
pub const SUPPORT_TOL: f64 = 1e-8;

/// Uhlmann fidelity (squared convention), in `[0, 1]`.
///
/// Computed as the squared trace norm of `sqrt(rho) sqrt(sigma)`, which keeps
/// rank-deficient inputs well conditioned.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    ensure_same_dims(rho, sigma)?;
    let a = sqrtm_psd(rho.matrix())? * sqrtm_psd(sigma.matrix())?;
    let svd = a
        .try_svd(false, false, f64::EPSILON, 10_000)
        .ok_or_else(|| {
            Error::NumericalFailure("singular value decomposition did not converge".into())
        })?;
    let root: f64 = svd.singular_values.iter().sum();
    Ok((root * root).clamp(0.0, 1.0))
}

/// `2 - 2 sqrt(F)`, the squared Bures metric.
pub fn bures_measure(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok((2.0 - 2.0 * fidelity(rho, sigma)?.sqrt()).max(0.0))
}

/// Bures metric `sqrt(2 - 2 sqrt(F))`.
pub fn bures_metric(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(bures_measure(rho, sigma)?.sqrt())
}

/// `S(rho || sigma) = tr rho (log2 rho - log2 sigma)`.
///
/// Returns [`Error::SupportViolation`] when `rho` has weight above
/// [`SUPPORT_TOL`] on the kernel of `sigma` (the divergence is infinite).
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    ensure_same_dims(rho, sigma)?;
    let r = eigh(rho.matrix())?;
    let s = eigh(sigma.matrix())?;
    let n = r.dim();

    let mut neg_entropy = 0.0;
    for &a in &r.values {
        if a > RELENT_ZERO {
            neg_entropy += a * a.log2();
        }
    }

    // weights <s_j| rho |s_j>
    let mut cross = 0.0;
    let mut leak = 0.0;
    for (j, &sv) in s.values.iter().enumerate() {
        let sj = s.vectors.column(j);
        let mut w = 0.0;
        for (i, &a) in r.values.iter().enumerate() {
            if a <= RELENT_ZERO {
                continue;
            }
            let overlap = r.vectors.column(i).dotc(&sj).norm_sqr();
            w += a * overlap;
        }
        if sv <= RELENT_ZERO {
            leak += w;
        } else {
            cross -= w * sv.log2();
        }
    }
    debug_assert_eq!(s.values.len(), n);
    if leak > SUPPORT_TOL {
        return Err(Error::SupportViolation { leak });
    }
    Ok((neg_entropy + cross).max(0.0))
}

/// `1/2 tr|rho - sigma|`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    ensure_same_dims(rho, sigma)?;
    let diff = rho.matrix() - sigma.matrix();
    Ok(0.5 * eigvalsh(&diff)?.iter().map(|v| v.abs()).sum::<f64>())
}

/// Frobenius norm `||rho - sigma||_2`.
pub fn hilbert_schmidt_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    ensure_same_dims(rho, sigma)?;
    Ok((rho.matrix() - sigma.matrix()).norm())
}
