//! Geometry of the absolutely separable (AS) set in `2 x d`.
//!
//! A `2 x d` state is AS iff its ordered spectrum satisfies
//! `l_1 - l_{2d-1} - 2 sqrt(l_{2d} l_{2d-2}) <= 0`, with equality on the
//! boundary of the set. The criterion is a convex function of the spectrum,
//! so the AS spectra form a convex set around the flat spectrum and every
//! ray leaving the flat spectrum crosses the boundary exactly once.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::haar::{haar_unitary_with, rng_from_seed};
use crate::qcore::linalg::{c, complete_basis, unitarity_deviation, ComplexMatrix, ZERO};
use crate::qcore::{DensityMatrix, Dims, PureState, Spectrum};

/// Default tolerance on the criterion value.
pub const DEFAULT_AS_TOL: f64 = 1e-9;

/// Outcome of the spectral AS test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsVerdict {
    pub is_as: bool,
    /// `l_1 - l_{2d-1} - 2 sqrt(l_{2d} l_{2d-2})`.
    pub criterion_value: f64,
    pub on_boundary: bool,
}

/// Coarse classification of a bipartite state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    #[serde(rename = "AS")]
    As,
    #[serde(rename = "NonAS-Separable")]
    NonAsSeparable,
    /// Not AS and PPT in a dimension where PPT does not imply separability.
    #[serde(rename = "NonAS-PPT")]
    NonAsPpt,
    #[serde(rename = "Entangled")]
    Entangled,
    #[serde(rename = "Boundary")]
    Boundary,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::As => "AS",
            Self::NonAsSeparable => "NonAS-Separable",
            Self::NonAsPpt => "NonAS-PPT",
            Self::Entangled => "Entangled",
            Self::Boundary => "Boundary",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Criterion scalar for an ordered spectrum of length `2d`.
pub fn criterion(values: &[f64]) -> f64 {
    let n = values.len();
    debug_assert!(n >= 4 && n.is_multiple_of(2));
    let l = |k: usize| values[k - 1].max(0.0);
    l(1) - l(n - 1) - 2.0 * (l(n) * l(n - 2)).sqrt()
}

pub fn is_absolutely_separable(spec: &Spectrum, d: usize, tol: f64) -> Result<AsVerdict> {
    if d < 2 {
        return Err(Error::BadDimension(format!("d = {d}, need d >= 2")));
    }
    if spec.len() != 2 * d {
        return Err(Error::WrongLength {
            got: spec.len(),
            expected: 2 * d,
        });
    }
    let value = criterion(spec.values());
    Ok(AsVerdict {
        is_as: value <= tol,
        criterion_value: value,
        on_boundary: value.abs() <= tol,
    })
}

/// `d` of a `2 x d` (or `d x 2`) state; anything else is unsupported.
pub fn qubit_qudit_dim(dims: Dims) -> Result<usize> {
    dims.qubit_qudit().ok_or_else(|| {
        Error::Unsupported(format!(
            "the spectral AS criterion is only available for 2 x d systems, got {dims}"
        ))
    })
}

/// Spectral AS test of a state.
pub fn state_verdict(rho: &DensityMatrix, tol: f64) -> Result<AsVerdict> {
    let d = qubit_qudit_dim(rho.dims())?;
    is_absolutely_separable(&rho.spectrum()?, d, tol)
}

/// Verdict plus the quantities it was derived from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateClassification {
    pub verdict: Classification,
    pub criterion_value: f64,
    pub pt_min_eigenvalue: f64,
}

/// AS test combined with the PPT test.
///
/// In `2 x 2` and `2 x 3` PPT is equivalent to separability; in larger `d` a
/// non-AS PPT state is reported as [`Classification::NonAsPpt`].
pub fn classify_state(rho: &DensityMatrix, tol: f64) -> Result<StateClassification> {
    let d = qubit_qudit_dim(rho.dims())?;
    let verdict = is_absolutely_separable(&rho.spectrum()?, d, tol)?;
    let pt_min = rho.pt_min_eigenvalue()?;
    let class = if verdict.on_boundary {
        Classification::Boundary
    } else if verdict.is_as {
        Classification::As
    } else if pt_min < -tol {
        Classification::Entangled
    } else if d <= 3 {
        Classification::NonAsSeparable
    } else {
        Classification::NonAsPpt
    };
    Ok(StateClassification {
        verdict: class,
        criterion_value: verdict.criterion_value,
        pt_min_eigenvalue: pt_min,
    })
}

/// `(1/(2d), 3/(2(d+1)))`: `l_1` of a boundary spectrum lies in `(low, high]`.
pub fn lambda1_bounds(d: usize) -> (f64, f64) {
    let d = d as f64;
    (1.0 / (2.0 * d), 3.0 / (2.0 * (d + 1.0)))
}

/// Nested coordinates `a_1 .. a_{2d-1}` of an ordered spectrum:
/// `l_k = a_k prod_{i<k} (1 - a_i)` and `l_{2d} = prod_i (1 - a_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCoords {
    a: Vec<f64>,
}

const COORD_TOL: f64 = 1e-12;

impl BoundaryCoords {
    /// Feasible interval of `a_i` (1-based) given `a_{i-1}`.
    pub fn interval(i: usize, d: usize, prev: Option<f64>) -> (f64, f64) {
        let lo = 1.0 / (2 * d - i + 1) as f64;
        let hi = match prev {
            None => 1.0,
            Some(p) if p >= 0.5 => 1.0,
            Some(p) => (p / (1.0 - p)).min(1.0),
        };
        (lo, hi)
    }

    pub fn new(a: Vec<f64>, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::BadDimension(format!("d = {d}, need d >= 2")));
        }
        if a.len() != 2 * d - 1 {
            return Err(Error::WrongLength {
                got: a.len(),
                expected: 2 * d - 1,
            });
        }
        let mut prev = None;
        for (k, &ai) in a.iter().enumerate() {
            let (lo, hi) = Self::interval(k + 1, d, prev);
            if !(ai >= lo - COORD_TOL && ai <= hi + COORD_TOL) {
                return Err(Error::InfeasibleCoords(format!(
                    "a_{} = {ai} outside [{lo}, {hi}]",
                    k + 1
                )));
            }
            prev = Some(ai);
        }
        Ok(Self { a })
    }

    /// Maps a point of the unit box `[0, 1]^{2d-1}` onto feasible coordinates,
    /// each `s_i` interpolating its nested interval.
    pub fn from_unit_box(s: &[f64], d: usize) -> Self {
        let mut a = Vec::with_capacity(s.len());
        let mut prev = None;
        for (k, &si) in s.iter().enumerate() {
            let (lo, hi) = Self::interval(k + 1, d, prev);
            let ai = lo + si.clamp(0.0, 1.0) * (hi - lo).max(0.0);
            a.push(ai);
            prev = Some(ai);
        }
        Self { a }
    }

    /// Inverse of [`Self::from_unit_box`] where the interval is non-degenerate.
    pub fn to_unit_box(&self, d: usize) -> Vec<f64> {
        let mut prev = None;
        self.a
            .iter()
            .enumerate()
            .map(|(k, &ai)| {
                let (lo, hi) = Self::interval(k + 1, d, prev);
                prev = Some(ai);
                if hi - lo > 1e-15 {
                    ((ai - lo) / (hi - lo)).clamp(0.0, 1.0)
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Coordinates of an ordered spectrum of length `2d`.
    pub fn from_spectrum(spec: &Spectrum) -> Result<Self> {
        let n = spec.len();
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::WrongLength {
                got: n,
                expected: 2 * (n / 2).max(2),
            });
        }
        let mut remaining = 1.0;
        let mut a = Vec::with_capacity(n - 1);
        for &l in &spec.values()[..n - 1] {
            let ai = if remaining > 1e-300 {
                (l / remaining).clamp(0.0, 1.0)
            } else {
                1.0
            };
            a.push(ai);
            remaining -= l;
        }
        Self::new(a.clone(), n / 2).or_else(|_| {
            // rounding can push a coordinate just outside its interval
            let s = Self { a }.to_unit_box(n / 2);
            Ok(Self::from_unit_box(&s, n / 2))
        })
    }

    /// Flat tail with `a_1` given: `l_1 = a_1`, all other `l_k` equal.
    pub fn flat_tail(a1: f64, d: usize) -> Result<Self> {
        let mut a = vec![a1];
        for i in 2..2 * d {
            a.push(1.0 / (2 * d - i + 1) as f64);
        }
        Self::new(a, d)
    }

    pub fn values(&self) -> &[f64] {
        &self.a
    }

    /// Ordered spectrum `l_k = a_k prod_{i<k} (1 - a_i)`.
    pub fn spectrum(&self) -> Spectrum {
        let mut out = Vec::with_capacity(self.a.len() + 1);
        let mut rest = 1.0;
        for &ai in &self.a {
            out.push(ai * rest);
            rest *= 1.0 - ai;
        }
        out.push(rest);
        // enforce ordering against rounding
        for k in 1..out.len() {
            if out[k] > out[k - 1] {
                out[k] = out[k - 1];
            }
        }
        Spectrum::from_raw(out)
    }
}

/// Spectrum from nested coordinates, optionally pushed radially (away from
/// the flat spectrum) onto the AS boundary.
pub fn boundary_spectrum(coords: &BoundaryCoords, d: usize, project: bool) -> Result<Spectrum> {
    if coords.values().len() != 2 * d - 1 {
        return Err(Error::WrongLength {
            got: coords.values().len(),
            expected: 2 * d - 1,
        });
    }
    let spec = coords.spectrum();
    if project {
        project_to_boundary(spec.values())
    } else {
        Ok(spec)
    }
}

/// Point where the ray from the flat spectrum through `direction` meets the
/// AS boundary. `direction` must be ordered, sum to one and not be flat.
pub fn project_to_boundary(direction: &[f64]) -> Result<Spectrum> {
    let n = direction.len();
    let u = 1.0 / n as f64;
    let last = direction[n - 1];
    let spread = direction[0] - last;
    if spread <= 1e-14 {
        return Err(Error::InfeasibleCoords(
            "the flat spectrum is strictly inside the AS set; no boundary point along it".into(),
        ));
    }
    let at = |t: f64| -> Vec<f64> {
        direction
            .iter()
            .map(|&m| (u + t * (m - u)).max(0.0))
            .collect()
    };
    // spectrum stays non-negative up to t_max, where the smallest entry hits 0
    let t_max = if last < u {
        u / (u - last)
    } else {
        f64::INFINITY
    };
    let (mut lo, mut hi) = (0.0, t_max.min(1e12));
    if criterion(&at(hi)) < 0.0 {
        return Err(Error::NumericalFailure(
            "boundary not bracketed along ray".into(),
        ));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if criterion(&at(mid)) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut values = at(lo);
    let sum: f64 = values.iter().sum();
    values.iter_mut().for_each(|v| *v /= sum);
    Ok(Spectrum::from_raw(values))
}

/// AS state closest to the pure state `|alpha>` for the relative entropy and
/// Bures measures: `|alpha>` carries weight `3/(2d+2)` and its orthogonal
/// complement the flat tail `1/(2d+2)`.
pub fn nearest_as_pure(alpha: &PureState, d: usize) -> Result<DensityMatrix> {
    if alpha.dims().qubit_qudit() != Some(d) {
        return Err(Error::BadDimension(format!(
            "state lives in {}, expected 2 x {d}",
            alpha.dims()
        )));
    }
    let n = 2 * d;
    let basis = complete_basis(alpha.amplitudes());
    let top = 3.0 / (2 * d + 2) as f64;
    let tail = 1.0 / (2 * d + 2) as f64;
    let mut weights = vec![tail; n];
    weights[0] = top;
    Ok(DensityMatrix::from_parts(
        diag_in_basis(&basis, &weights),
        alpha.dims(),
    ))
}

/// `sum_k w_k |b_k><b_k|` for the columns `b_k` of `basis`.
pub(crate) fn diag_in_basis(basis: &ComplexMatrix, weights: &[f64]) -> ComplexMatrix {
    let n = basis.nrows();
    let mut scaled = basis.clone();
    for (k, &w) in weights.iter().enumerate() {
        for i in 0..n {
            scaled[(i, k)] *= w;
        }
    }
    &scaled * basis.adjoint()
}

/// `rho -> sum_i p_i U_i rho U_i^dagger`.
#[derive(Debug, Clone)]
pub struct MixedUnitaryChannel {
    weights: Vec<f64>,
    unitaries: Vec<ComplexMatrix>,
}

impl MixedUnitaryChannel {
    pub const WEIGHT_TOL: f64 = 1e-12;
    pub const UNITARY_TOL: f64 = 1e-10;

    pub fn new(weights: Vec<f64>, unitaries: Vec<ComplexMatrix>) -> Result<Self> {
        if weights.is_empty() || weights.len() != unitaries.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} unitaries",
                weights.len(),
                unitaries.len()
            )));
        }
        if weights.iter().any(|&w| w.is_nan() || w < 0.0) {
            return Err(Error::ParamOutOfRange("negative channel weight".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > Self::WEIGHT_TOL {
            return Err(Error::ParamOutOfRange(format!("weights sum to {sum}")));
        }
        let dim = unitaries[0].nrows();
        for u in &unitaries {
            if u.nrows() != dim || u.ncols() != dim {
                return Err(Error::DimensionMismatch(
                    "unitaries of different sizes".into(),
                ));
            }
            let dev = unitarity_deviation(u);
            if dev > Self::UNITARY_TOL {
                return Err(Error::ParamOutOfRange(format!(
                    "operator is not unitary ({dev:e})"
                )));
            }
        }
        Ok(Self { weights, unitaries })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            weights: vec![1.0],
            unitaries: vec![ComplexMatrix::identity(dim, dim)],
        }
    }

    pub fn single(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![1.0], vec![u])
    }

    /// `k` Haar unitaries with flat-Dirichlet weights.
    pub fn random(dim: usize, k: usize, seed: u64) -> Self {
        assert!(k >= 1);
        let mut rng = rng_from_seed(seed);
        let mut weights: Vec<f64> = (0..k)
            .map(|_| -rng.random::<f64>().max(1e-300).ln())
            .collect();
        let sum: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= sum);
        let unitaries = (0..k).map(|_| haar_unitary_with(dim, &mut rng)).collect();
        Self { weights, unitaries }
    }

    pub fn dim(&self) -> usize {
        self.unitaries[0].nrows()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn unitaries(&self) -> &[ComplexMatrix] {
        &self.unitaries
    }
}

pub fn apply_channel(ch: &MixedUnitaryChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if ch.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "channel acts on dimension {}, state has dimension {}",
            ch.dim(),
            rho.dim()
        )));
    }
    let n = rho.dim();
    let mut out = ComplexMatrix::from_element(n, n, ZERO);
    for (w, u) in ch.weights.iter().zip(&ch.unitaries) {
        out += u * rho.matrix() * u.adjoint() * c(*w, 0.0);
    }
    Ok(DensityMatrix::from_parts(out, rho.dims()))
}

/// Random AS state: a random boundary spectrum pulled towards the flat
/// spectrum by a random factor, in a Haar-random eigenbasis.
pub fn sample_as_state(dims: Dims, seed: u64) -> Result<DensityMatrix> {
    let d = qubit_qudit_dim(dims)?;
    let mut rng = rng_from_seed(seed);
    let boundary = sample_boundary_spectrum(d, &mut rng);
    let shrink: f64 = rng.random();
    let u = 1.0 / (2 * d) as f64;
    let values: Vec<f64> = boundary
        .values()
        .iter()
        .map(|&l| u + shrink * (l - u))
        .collect();
    let basis = haar_unitary_with(2 * d, &mut rng);
    Ok(DensityMatrix::from_parts(
        diag_in_basis(&basis, &values),
        dims,
    ))
}

/// Random point of the AS boundary from uniformly drawn nested coordinates.
pub fn sample_boundary_spectrum<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Spectrum {
    loop {
        let s: Vec<f64> = (0..2 * d - 1).map(|_| rng.random::<f64>()).collect();
        let coords = BoundaryCoords::from_unit_box(&s, d);
        if let Ok(spec) = boundary_spectrum(&coords, d, true) {
            return spec;
        }
    }
}
