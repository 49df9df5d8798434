//! The metric family `d_p`, the segment property of nearest AS states, and
//! the resulting upper bound on entanglement.

use serde::{Deserialize, Serialize};

use crate::as_geometry::{qubit_qudit_dim, state_verdict};
use crate::error::{Error, Result};
use crate::nas_distance::{nas_numeric, DistanceKind, NumericConfig};
use crate::qcore::linalg::{c, eigh, hermitize, psd_fn, ComplexMatrix};
use crate::qcore::state::ensure_same_dims;
use crate::qcore::{partial_transpose_matrix, trace_distance, DensityMatrix, Dims, Subsystem};

/// `d_p(rho, sigma) = [tr|rho^{1/p} - sigma^{1/p}|^p]^{1/p}` for `p >= 2`, and
/// `d_1 = 1/2 tr|rho - sigma|`.
pub fn dp_metric(rho: &DensityMatrix, sigma: &DensityMatrix, p: u32) -> Result<f64> {
    ensure_same_dims(rho, sigma)?;
    if p == 0 {
        return Err(Error::ParamOutOfRange("p must be >= 1".into()));
    }
    if p == 1 {
        return trace_distance(rho, sigma);
    }
    let q = 1.0 / p as f64;
    let a = psd_fn(rho.matrix(), 1e-10, |v| v.powf(q))?;
    let b = psd_fn(sigma.matrix(), 1e-10, |v| v.powf(q))?;
    let eig = eigh(&hermitize(&(a - b)))?;
    Ok(eig
        .values
        .iter()
        .map(|e| e.abs().powi(p as i32))
        .sum::<f64>()
        .powf(q))
}

/// `rho_x = x rho + (1 - x) sigma`.
#[derive(Debug, Clone)]
pub struct SegmentPoint {
    pub x: f64,
    pub state: DensityMatrix,
}

impl SegmentPoint {
    pub fn new(rho: &DensityMatrix, nearest: &DensityMatrix, x: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::ParamOutOfRange(format!("x = {x} not in [0, 1]")));
        }
        Ok(Self {
            x,
            state: rho.mix(nearest, x)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentCheck {
    pub x: f64,
    /// `|D(rho, s) - D(rho, rho_x) - D(rho_x, s)|` with `s` the nearest AS state.
    pub additivity_residual: f64,
    /// `D(rho_x, s)`.
    pub distance_to_nearest: f64,
    /// Measure of `rho_x` from a fresh minimisation.
    pub remeasured: f64,
    /// Trace distance between the fresh minimiser and `s`.
    pub minimizer_shift: f64,
}

#[derive(Debug, Clone)]
pub struct SegmentReport {
    pub p: u32,
    pub nearest_as: DensityMatrix,
    pub measure: f64,
    pub checks: Vec<SegmentCheck>,
}

impl SegmentReport {
    pub fn max_residual(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.additivity_residual)
            .fold(0.0, f64::max)
    }

    /// Largest `|remeasured - D(rho_x, s)|`.
    pub fn max_value_gap(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| (c.remeasured - c.distance_to_nearest).abs())
            .fold(0.0, f64::max)
    }
}

/// Additivity of `d_p` along the segment from `rho` to its nearest AS
/// state, and re-minimisation at each `rho_x`.
pub fn verify_segment_property(
    rho: &DensityMatrix,
    p: u32,
    xs: &[f64],
    cfg: &NumericConfig,
) -> Result<SegmentReport> {
    if rho.dims() != Dims::new(2, 2) {
        return Err(Error::Unsupported(format!(
            "segment checks run in 2 x 2, got {}",
            rho.dims()
        )));
    }
    if state_verdict(rho, cfg.as_tol)?.is_as {
        return Err(Error::InvalidState(
            "segment checks need a non-AS state".into(),
        ));
    }
    let kind = DistanceKind::SchattenP(p);
    let res = nas_numeric(rho, kind, cfg)?;
    let nearest = res
        .nearest_as()
        .cloned()
        .expect("distance measures carry a nearest AS state");
    let total = dp_metric(rho, &nearest, p)?;
    let checks = xs
        .iter()
        .map(|&x| {
            let point = SegmentPoint::new(rho, &nearest, x)?;
            let to_rho = dp_metric(rho, &point.state, p)?;
            let to_nearest = dp_metric(&point.state, &nearest, p)?;
            let again = nas_numeric(&point.state, kind, cfg)?;
            let shift = trace_distance(again.nearest_as().expect("nearest AS state"), &nearest)?;
            Ok(SegmentCheck {
                x,
                additivity_residual: (total - to_rho - to_nearest).abs(),
                distance_to_nearest: to_nearest,
                remeasured: again.value,
                minimizer_shift: shift,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SegmentReport {
        p,
        nearest_as: nearest,
        measure: res.value,
        checks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementBound {
    /// Largest `x` with `rho_x` PPT.
    pub x_star: f64,
    /// `N(rho) - N(rho_{x*})`.
    pub bound: f64,
    pub measure: f64,
    pub measure_at_x_star: f64,
    /// `lambda_min(rho_{x*}^{T_B})`.
    pub boundary_pt_min: f64,
}

/// `lambda_min` of the partial transpose along the segment.
fn pt_min_along(rho: &DensityMatrix, nearest: &DensityMatrix, x: f64) -> Result<f64> {
    rho.mix(nearest, x)?.pt_min_eigenvalue()
}

pub const X_STAR_TOL: f64 = 1e-8;

/// Upper bound on the `d_p` distance of `rho` to the separable set from the
/// point where the segment towards its nearest AS state becomes PPT.
pub fn entanglement_upper_bound(
    rho: &DensityMatrix,
    p: u32,
    cfg: &NumericConfig,
) -> Result<EntanglementBound> {
    let d = qubit_qudit_dim(rho.dims())?;
    if d > 3 {
        return Err(Error::Unsupported(format!(
            "PPT decides separability only in 2 x 2 and 2 x 3, got {}",
            rho.dims()
        )));
    }
    let pt = rho.pt_min_eigenvalue()?;
    if pt >= -X_STAR_TOL {
        return Err(Error::NotEntangled(pt));
    }
    let kind = DistanceKind::SchattenP(p);
    let res = nas_numeric(rho, kind, cfg)?;
    let nearest = res.nearest_as().cloned().expect("nearest AS state");

    let g = |x: f64| pt_min_along(rho, &nearest, x);
    let g0 = g(0.0)?;
    if g0 < -X_STAR_TOL {
        return Err(Error::NumericalFailure(format!(
            "nearest AS state is not PPT (lambda_min = {g0:e})"
        )));
    }
    // bracket the last sign change, falling back to a fine grid if needed
    let coarse: Vec<f64> = (0..=100)
        .map(|i| g(i as f64 / 100.0))
        .collect::<Result<_>>()?;
    let monotone = coarse.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let steps = if monotone { 100 } else { 10_000 };
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut prev = g0;
    #[allow(clippy::needless_range_loop)]
    for i in 1..=steps {
        let x = i as f64 / steps as f64;
        let v = if monotone { coarse[i] } else { g(x)? };
        if prev >= 0.0 && v < 0.0 {
            lo = (i - 1) as f64 / steps as f64;
            hi = x;
        }
        prev = v;
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if g(mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x_star = lo;
    let boundary = rho.mix(&nearest, x_star)?;
    let at_star = nas_numeric(&boundary, kind, cfg)?.value;
    Ok(EntanglementBound {
        x_star,
        bound: res.value - at_star,
        measure: res.value,
        measure_at_x_star: at_star,
        boundary_pt_min: boundary.pt_min_eigenvalue()?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmmConfig {
    pub max_iters: usize,
    pub tol: f64,
    /// Proximal step.
    pub step: f64,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            tol: 1e-11,
            step: 0.05,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PptDistance {
    /// `1/2 tr|rho - sigma|` at the returned feasible `sigma`.
    pub value: f64,
    pub closest: DensityMatrix,
    pub iterations: usize,
}

fn eig_map(a: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    Ok(eigh(&hermitize(a))?.map(f))
}

/// Euclidean projection of `v` onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &x) in u.iter().enumerate() {
        cumsum += x;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

fn project_states(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eigh(&hermitize(a))?;
    let w = project_simplex(&eig.values);
    let mut e = eig;
    e.values = w;
    Ok(e.reconstruct())
}

fn project_ppt_cone(a: &ComplexMatrix, dims: Dims) -> Result<ComplexMatrix> {
    let pt = partial_transpose_matrix(a, dims, Subsystem::B)?;
    let clipped = eig_map(&pt, |v| v.max(0.0))?;
    partial_transpose_matrix(&clipped, dims, Subsystem::B)
}

/// Trace distance from `rho` to the set of PPT states, by three-block
/// consensus ADMM; the returned state is made exactly feasible by mixing in
/// the maximally mixed state.
pub fn ppt_distance(rho: &DensityMatrix, cfg: &AdmmConfig) -> Result<PptDistance> {
    let dims = rho.dims();
    let n = dims.total();
    let r = rho.matrix();
    let t = cfg.step;
    let zero = ComplexMatrix::zeros(n, n);
    let mut z = r.clone();
    let mut us = [zero.clone(), zero.clone(), zero];
    let mut iterations = 0;
    for it in 0..cfg.max_iters {
        iterations = it + 1;
        let x0 = {
            let v = &z - &us[0];
            r + eig_map(&(v - r), |e| e.signum() * (e.abs() - 0.5 * t).max(0.0))?
        };
        let x1 = project_states(&(&z - &us[1]))?;
        let x2 = project_ppt_cone(&(&z - &us[2]), dims)?;
        let xs = [x0, x1, x2];
        let mut z_new = ComplexMatrix::zeros(n, n);
        for (x, u) in xs.iter().zip(&us) {
            z_new += x + u;
        }
        z_new /= c(3.0, 0.0);
        let mut primal: f64 = 0.0;
        for (x, u) in xs.iter().zip(us.iter_mut()) {
            let diff = x - &z_new;
            primal = primal.max(diff.norm());
            *u += diff;
        }
        let dual = (&z_new - &z).norm();
        z = z_new;
        if primal < cfg.tol && dual < cfg.tol {
            break;
        }
    }

    let mut sigma = project_states(&z)?;
    let pt_min =
        crate::qcore::linalg::eigvalsh(&partial_transpose_matrix(&sigma, dims, Subsystem::B)?)?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
    if pt_min < 0.0 {
        let eps = -pt_min;
        let s = eps / (eps + 1.0 / n as f64);
        sigma = sigma * c(1.0 - s, 0.0) + ComplexMatrix::identity(n, n) * c(s / n as f64, 0.0);
    }
    let closest = DensityMatrix::from_parts(sigma, dims);
    let value = trace_distance(rho, &closest)?;
    Ok(PptDistance {
        value,
        closest,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::bures_metric;
    use crate::states::{max_entangled, random_density, werner, WernerParams};
    use std::f64::consts::FRAC_PI_4;

    fn diag(v: &[f64]) -> DensityMatrix {
        let m =
            ComplexMatrix::from_fn(4, 4, |i, j| if i == j { c(v[i], 0.0) } else { c(0.0, 0.0) });
        DensityMatrix::new(m, Dims::new(2, 2)).unwrap()
    }

    #[test]
    fn d1_uses_half_trace_norm() {
        let v = dp_metric(&diag(&[1.0, 0.0, 0.0, 0.0]), &diag(&[0.25; 4]), 1).unwrap();
        assert!((v - 0.75).abs() < 1e-14);
    }

    #[test]
    fn d2_equals_bures_for_commuting_states() {
        let a = diag(&[0.4, 0.3, 0.2, 0.1]);
        let b = diag(&[0.1, 0.2, 0.3, 0.4]);
        let d2 = dp_metric(&a, &b, 2).unwrap();
        assert!((d2 - bures_metric(&a, &b).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn d2_dominates_bures_in_general() {
        for seed in 0..20 {
            let a = random_density(Dims::new(2, 2), 4, seed).unwrap();
            let b = random_density(Dims::new(2, 2), 4, seed + 100).unwrap();
            assert!(dp_metric(&a, &b, 2).unwrap() >= bures_metric(&a, &b).unwrap() - 1e-12);
        }
    }

    #[test]
    fn dp_zero_and_errors() {
        let a = random_density(Dims::new(2, 3), 6, 5).unwrap();
        for p in 1..=3 {
            assert!(dp_metric(&a, &a, p).unwrap() < 1e-7);
        }
        assert!(dp_metric(&a, &a, 0).is_err());
        let b = DensityMatrix::maximally_mixed(Dims::new(2, 2));
        assert!(matches!(
            dp_metric(&a, &b, 2),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn simplex_projection() {
        let w = project_simplex(&[0.5, 0.6, -0.2, 0.1]);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(w.iter().all(|&x| x >= 0.0));
        assert_eq!(project_simplex(&[0.25; 4]), vec![0.25; 4]);
    }

    #[test]
    fn ppt_distance_of_isotropic_family() {
        let bell = max_entangled(2).unwrap().projector();
        let r = ppt_distance(&bell, &AdmmConfig::default()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-6, "{}", r.value);
        assert!(r.closest.pt_min_eigenvalue().unwrap() >= -1e-14);

        let w = werner(&WernerParams::new(0.8, FRAC_PI_4, 0.0).unwrap()).unwrap();
        let r = ppt_distance(&w, &AdmmConfig::default()).unwrap();
        assert!(
            (r.value - (3.0 * 0.8 - 1.0) / 4.0).abs() < 1e-6,
            "{}",
            r.value
        );
    }

    #[test]
    fn bell_state_bound_exceeds_ppt_distance() {
        let bell = max_entangled(2).unwrap().projector();
        let cfg = NumericConfig::default();
        let b = entanglement_upper_bound(&bell, 1, &cfg).unwrap();
        assert!(b.boundary_pt_min.abs() < 1e-8);
        let e = ppt_distance(&bell, &AdmmConfig::default()).unwrap().value;
        assert!(b.bound >= e - 1e-4, "{} < {}", b.bound, e);
        let mixed = DensityMatrix::maximally_mixed(Dims::new(2, 2));
        assert!(matches!(
            entanglement_upper_bound(&mixed, 1, &cfg),
            Err(Error::NotEntangled(_))
        ));
    }
}
