//! Constructors for the state families used throughout the crate.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::as_geometry::Classification;
use crate::error::{Error, Result};
use crate::qcore::haar::{ginibre, rng_from_seed};
use crate::qcore::linalg::{c, outer, ComplexMatrix, ComplexVector};
use crate::qcore::{DensityMatrix, Dims, PureState};

/// Distance in `p` within which a Werner state is reported as `Boundary`.
pub const WERNER_BOUNDARY_TOL: f64 = 1e-9;

/// Modified Werner state `p |xi><xi| + (1 - p) I/4` with
/// `|xi> = cos(gamma)|00> + e^{i phi} sin(gamma)|11>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WernerParams {
    pub p: f64,
    pub gamma: f64,
    pub phi: f64,
}

impl WernerParams {
    pub fn new(p: f64, gamma: f64, phi: f64) -> Result<Self> {
        let params = Self { p, gamma, phi };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::ParamOutOfRange(format!(
                "p = {} not in [0, 1]",
                self.p
            )));
        }
        if !(0.0..=PI).contains(&self.gamma) {
            return Err(Error::ParamOutOfRange(format!(
                "gamma = {} not in [0, pi]",
                self.gamma
            )));
        }
        if !(0.0..=TAU).contains(&self.phi) {
            return Err(Error::ParamOutOfRange(format!(
                "phi = {} not in [0, 2 pi]",
                self.phi
            )));
        }
        Ok(())
    }

    /// The pure component `|xi>`.
    pub fn xi(&self) -> ComplexVector {
        let mut v = ComplexVector::zeros(4);
        v[0] = c(self.gamma.cos(), 0.0);
        v[3] = num_complex::Complex64::from_polar(self.gamma.sin(), self.phi);
        v
    }

    /// Largest and (threefold) remaining eigenvalue.
    pub fn eigenvalues(&self) -> (f64, f64) {
        ((1.0 + 3.0 * self.p) / 4.0, (1.0 - self.p) / 4.0)
    }

    /// `p` above which the state is entangled: `1 / (1 + 2|sin 2 gamma|)`.
    pub fn entanglement_threshold(&self) -> f64 {
        1.0 / (1.0 + 2.0 * (2.0 * self.gamma).sin().abs())
    }
}

/// `p` at and below which the Werner family is absolutely separable.
pub const WERNER_AS_THRESHOLD: f64 = 1.0 / 3.0;

pub fn werner(params: &WernerParams) -> Result<DensityMatrix> {
    params.validate()?;
    let p = params.p;
    let mat =
        outer(&params.xi()) * c(p, 0.0) + ComplexMatrix::identity(4, 4) * c((1.0 - p) / 4.0, 0.0);
    DensityMatrix::new(mat, Dims::new(2, 2))
}

/// Closed-form classification of a Werner state by its two thresholds.
pub fn classify_werner(params: &WernerParams) -> Result<Classification> {
    params.validate()?;
    let p = params.p;
    let ent = params.entanglement_threshold();
    // a product |xi> puts the entanglement threshold at p = 1, out of reach
    let product = (2.0 * params.gamma).sin().abs() < 1e-15;
    if (p - WERNER_AS_THRESHOLD).abs() <= WERNER_BOUNDARY_TOL
        || (!product && (p - ent).abs() <= WERNER_BOUNDARY_TOL)
    {
        return Ok(Classification::Boundary);
    }
    Ok(if p <= WERNER_AS_THRESHOLD {
        Classification::As
    } else if !product && p > ent {
        Classification::Entangled
    } else {
        Classification::NonAsSeparable
    })
}

/// `(1/sqrt d) sum_i |ii>` in `d x d`.
pub fn max_entangled(d: usize) -> Result<PureState> {
    if d < 2 {
        return Err(Error::BadDimension(format!("d = {d}, need d >= 2")));
    }
    let mut v = ComplexVector::zeros(d * d);
    let a = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        v[i * d + i] = c(a, 0.0);
    }
    PureState::normalized(v, Dims::new(d, d))
}

/// Random density matrix `G G^dagger / tr(G G^dagger)` with `G` an
/// `mn x rank` complex Ginibre matrix.
pub fn random_density(dims: Dims, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let n = dims.total();
    if rank == 0 || rank > n {
        return Err(Error::BadRank { rank, dim: n });
    }
    let mut rng = rng_from_seed(seed);
    let g = ginibre(n, rank, &mut rng);
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::new(crate::qcore::linalg::hermitize(&(w / c(tr, 0.0))), dims)
}

/// Random pure state from a normalised Ginibre column.
pub fn random_pure(dims: Dims, seed: u64) -> Result<PureState> {
    let mut rng = rng_from_seed(seed);
    let g = ginibre(dims.total(), 1, &mut rng);
    PureState::normalized(g.column(0).into_owned(), dims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn werner_limits() {
        let mixed = werner(&WernerParams::new(0.0, 0.3, 1.0).unwrap()).unwrap();
        assert!(mixed.max_abs_diff(&DensityMatrix::maximally_mixed(Dims::new(2, 2))) < 1e-15);

        let pure = werner(&WernerParams::new(1.0, FRAC_PI_4, 0.0).unwrap()).unwrap();
        let bell = max_entangled(2).unwrap().projector();
        assert!(pure.max_abs_diff(&bell) < 1e-15);
    }

    #[test]
    fn werner_spectrum_at_one_third() {
        let rho = werner(&WernerParams::new(1.0 / 3.0, 0.7, 2.0).unwrap()).unwrap();
        let s = rho.spectrum().unwrap();
        let expected = [0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0];
        for (a, b) in s.values().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn werner_rejects_out_of_range() {
        assert!(matches!(
            WernerParams::new(1.1, 0.0, 0.0),
            Err(Error::ParamOutOfRange(_))
        ));
        assert!(matches!(
            WernerParams::new(0.5, -0.1, 0.0),
            Err(Error::ParamOutOfRange(_))
        ));
        assert!(matches!(
            WernerParams::new(0.5, 0.1, 7.0),
            Err(Error::ParamOutOfRange(_))
        ));
        let bad = WernerParams {
            p: -0.5,
            gamma: 0.0,
            phi: 0.0,
        };
        assert!(werner(&bad).is_err());
        assert!(classify_werner(&bad).is_err());
    }

    #[test]
    fn werner_classification_examples() {
        let cls = |p, g| classify_werner(&WernerParams::new(p, g, 0.0).unwrap()).unwrap();
        assert_eq!(cls(0.2, FRAC_PI_4), Classification::As);
        assert_eq!(cls(0.9, FRAC_PI_4), Classification::Entangled);
        assert_eq!(cls(0.4, PI / 12.0), Classification::NonAsSeparable);
        assert_eq!(cls(1.0 / 3.0, PI / 12.0), Classification::Boundary);
        assert_eq!(cls(0.5, PI / 12.0), Classification::Boundary);
        // product |xi>: never entangled
        assert_eq!(cls(1.0, 0.0), Classification::NonAsSeparable);
        assert_eq!(cls(0.3, PI / 2.0), Classification::As);
    }

    #[test]
    fn max_entangled_d3_amplitudes() {
        let s = max_entangled(3).unwrap();
        let a = 1.0 / 3f64.sqrt();
        for (k, z) in s.amplitudes().iter().enumerate() {
            let expected = if k % 4 == 0 { a } else { 0.0 };
            assert!((z.re - expected).abs() < 1e-15 && z.im == 0.0);
        }
        assert!(matches!(max_entangled(1), Err(Error::BadDimension(_))));
    }

    #[test]
    fn random_density_rank_and_determinism() {
        let dims = Dims::new(2, 3);
        let pure = random_density(dims, 1, 5).unwrap();
        assert!((pure.spectrum().unwrap().largest() - 1.0).abs() < 1e-10);
        let a = random_density(dims, 6, 11).unwrap();
        let b = random_density(dims, 6, 11).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        assert!(matches!(
            random_density(dims, 0, 1),
            Err(Error::BadRank { .. })
        ));
        assert!(matches!(
            random_density(dims, 7, 1),
            Err(Error::BadRank { .. })
        ));
    }
}
