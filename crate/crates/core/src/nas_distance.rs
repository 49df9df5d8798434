//! Distance-based measures of non-absolute separability.
//!
//! `N(rho) = min D(rho, sigma)` over AS states `sigma`. For non-AS inputs the
//! minimum lies on the AS boundary, so the numerical minimiser searches over
//! boundary spectra, either in the eigenbasis of `rho` ("aligned") or with an
//! additional unitary rotation of that basis ("full").

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::as_geometry::{
    apply_channel, boundary_spectrum, diag_in_basis, is_absolutely_separable, lambda1_bounds,
    project_to_boundary, qubit_qudit_dim, BoundaryCoords, MixedUnitaryChannel, DEFAULT_AS_TOL,
};
use crate::error::{Error, Result};
use crate::metric_bounds::dp_metric;
use crate::nas_witness::WitnessCertificate;
use crate::optim::{minimize, Bounds, NelderMead};
use crate::qcore::haar::rng_from_seed;
use crate::qcore::linalg::{
    c, complete_basis, eigvalsh, expm_i_hermitian, ComplexMatrix, ZERO, ZERO_EIGENVALUE,
};
use crate::qcore::{
    bures_measure, hilbert_schmidt_distance, relative_entropy, trace_distance, DensityMatrix,
    Spectrum,
};
use crate::states::{werner, WernerParams, WERNER_AS_THRESHOLD};

/// Largest `d` accepted by the numerical minimiser.
pub const MAX_NUMERIC_D: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistanceKind {
    /// Relative entropy in bits.
    RelativeEntropy,
    /// `2 - 2 sqrt(F)`.
    Bures,
    HilbertSchmidt,
    /// `1/2 tr|rho - sigma|`.
    TraceDistance,
    /// The metric `d_p` of [`dp_metric`].
    SchattenP(u32),
}

impl DistanceKind {
    /// `SchattenP(1)` is the trace distance.
    pub fn canonical(self) -> Self {
        match self {
            Self::SchattenP(1) => Self::TraceDistance,
            k => k,
        }
    }

    fn validate(self) -> Result<()> {
        match self {
            Self::SchattenP(0) => Err(Error::ParamOutOfRange("Schatten index must be >= 1".into())),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RelativeEntropy => f.write_str("relent"),
            Self::Bures => f.write_str("bures"),
            Self::HilbertSchmidt => f.write_str("hs"),
            Self::TraceDistance => f.write_str("trace"),
            Self::SchattenP(p) => write!(f, "d{p}"),
        }
    }
}

impl FromStr for DistanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relent" => Ok(Self::RelativeEntropy),
            "bures" => Ok(Self::Bures),
            "hs" => Ok(Self::HilbertSchmidt),
            "trace" => Ok(Self::TraceDistance),
            _ => s
                .strip_prefix('d')
                .and_then(|p| p.parse::<u32>().ok())
                .filter(|&p| p >= 1)
                .map(Self::SchattenP)
                .ok_or_else(|| Error::UnsupportedKind(format!("unknown distance '{s}'"))),
        }
    }
}

/// `D(rho, sigma)` for the given kind.
pub fn distance(kind: DistanceKind, rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    kind.validate()?;
    match kind.canonical() {
        DistanceKind::RelativeEntropy => relative_entropy(rho, sigma),
        DistanceKind::Bures => bures_measure(rho, sigma),
        DistanceKind::HilbertSchmidt => hilbert_schmidt_distance(rho, sigma),
        DistanceKind::TraceDistance => trace_distance(rho, sigma),
        DistanceKind::SchattenP(p) => dp_metric(rho, sigma, p),
    }
}

/// Distance between two commuting states given by their paired eigenvalues.
pub fn commuting_distance(kind: DistanceKind, alpha: &[f64], lambda: &[f64]) -> f64 {
    match kind.canonical() {
        DistanceKind::RelativeEntropy => {
            let mut acc = 0.0;
            for (&a, &l) in alpha.iter().zip(lambda) {
                if a <= 1e-12 {
                    continue;
                }
                if l <= 1e-12 {
                    return f64::INFINITY;
                }
                acc += a * (a / l).log2();
            }
            acc.max(0.0)
        }
        DistanceKind::Bures => {
            let root: f64 = alpha
                .iter()
                .zip(lambda)
                .map(|(a, l)| (a * l).max(0.0).sqrt())
                .sum();
            (2.0 - 2.0 * root.min(1.0)).max(0.0)
        }
        DistanceKind::HilbertSchmidt => alpha
            .iter()
            .zip(lambda)
            .map(|(a, l)| (a - l).powi(2))
            .sum::<f64>()
            .sqrt(),
        DistanceKind::TraceDistance => {
            0.5 * alpha
                .iter()
                .zip(lambda)
                .map(|(a, l)| (a - l).abs())
                .sum::<f64>()
        }
        DistanceKind::SchattenP(p) => {
            let q = 1.0 / p as f64;
            let s: f64 = alpha
                .iter()
                .zip(lambda)
                .map(|(a, l)| {
                    (a.max(0.0).powf(q) - l.max(0.0).powf(q))
                        .abs()
                        .powi(p as i32)
                })
                .sum();
            s.powf(q)
        }
    }
}

/// Distance between `diag(alpha)` and `W diag(lambda) W^dagger`.
fn rotated_distance(kind: DistanceKind, alpha: &[f64], w: &ComplexMatrix, lambda: &[f64]) -> f64 {
    let n = alpha.len();
    let rotated = |f: &dyn Fn(f64) -> f64| -> ComplexMatrix {
        let mut scaled = w.clone();
        for (k, &l) in lambda.iter().enumerate() {
            let v = f(l.max(0.0));
            for i in 0..n {
                scaled[(i, k)] *= v;
            }
        }
        &scaled * w.adjoint()
    };
    let diag_minus = |f: &dyn Fn(f64) -> f64, m: ComplexMatrix| -> ComplexMatrix {
        let mut out = -m;
        for (i, &a) in alpha.iter().enumerate() {
            out[(i, i)] += c(f(a.max(0.0)), 0.0);
        }
        out
    };
    let abs_eigs = |m: &ComplexMatrix| -> Option<Vec<f64>> {
        eigvalsh(m)
            .ok()
            .map(|v| v.into_iter().map(f64::abs).collect())
    };
    match kind.canonical() {
        DistanceKind::RelativeEntropy => {
            let mut acc = 0.0;
            for &a in alpha {
                if a > 1e-12 {
                    acc += a * a.log2();
                }
            }
            for (j, &l) in lambda.iter().enumerate() {
                let weight: f64 = (0..n)
                    .map(|i| alpha[i].max(0.0) * w[(i, j)].norm_sqr())
                    .sum();
                if weight <= 1e-14 {
                    continue;
                }
                if l <= 1e-12 {
                    return f64::INFINITY;
                }
                acc -= weight * l.log2();
            }
            acc.max(0.0)
        }
        DistanceKind::Bures => {
            let mut m = w.clone();
            for i in 0..n {
                let sa = alpha[i].max(0.0).sqrt();
                for j in 0..n {
                    m[(i, j)] *= sa * lambda[j].max(0.0).sqrt();
                }
            }
            match m.try_svd(false, false, f64::EPSILON, 10_000) {
                Some(svd) => (2.0 - 2.0 * svd.singular_values.sum().min(1.0)).max(0.0),
                None => f64::INFINITY,
            }
        }
        DistanceKind::HilbertSchmidt => diag_minus(&|x| x, rotated(&|x| x)).norm(),
        DistanceKind::TraceDistance => match abs_eigs(&diag_minus(&|x| x, rotated(&|x| x))) {
            Some(v) => 0.5 * v.iter().sum::<f64>(),
            None => f64::INFINITY,
        },
        DistanceKind::SchattenP(p) => {
            let q = 1.0 / p as f64;
            let pw = move |x: f64| x.powf(q);
            match abs_eigs(&diag_minus(&pw, rotated(&pw))) {
                Some(v) => v.iter().map(|e| e.powi(p as i32)).sum::<f64>().powf(q),
                None => f64::INFINITY,
            }
        }
    }
}

/// How a measure value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    ClosedForm,
    /// Boundary spectra in the eigenbasis of the input.
    ConjectureAligned,
    /// Boundary spectra and a rotated eigenbasis.
    FullNumeric,
    /// Grid search and simplex refinement over nonlocal unitaries.
    GridRefine,
    /// Smallest eigenvalue of the partial transpose.
    PtEigenvector,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::ClosedForm => "ClosedForm",
            Self::ConjectureAligned => "ConjectureAligned",
            Self::FullNumeric => "FullNumeric",
            Self::GridRefine => "GridRefine",
            Self::PtEigenvector => "PtEigenvector",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub enum Certificate {
    NearestAs(DensityMatrix),
    Witness(Box<WitnessCertificate>),
}

#[derive(Debug, Clone)]
pub struct NasResult {
    pub value: f64,
    pub method: Method,
    /// Aligned minus full value when both searches ran.
    pub gap_estimate: Option<f64>,
    pub certificate: Certificate,
}

impl NasResult {
    pub fn nearest_as(&self) -> Option<&DensityMatrix> {
        match &self.certificate {
            Certificate::NearestAs(rho) => Some(rho),
            Certificate::Witness(_) => None,
        }
    }

    pub fn witness(&self) -> Option<&WitnessCertificate> {
        match &self.certificate {
            Certificate::Witness(w) => Some(w),
            Certificate::NearestAs(_) => None,
        }
    }
}

/// `log2((2d + 2)/3)`, the relative-entropy measure of any pure `2 x d` state.
pub fn nas_pure_relent(d: usize) -> f64 {
    ((2 * d + 2) as f64 / 3.0).log2()
}

/// `2 - 2 sqrt(3/(2d + 2))`, the Bures measure of any pure `2 x d` state.
pub fn nas_pure_bures(d: usize) -> f64 {
    2.0 - 2.0 * (3.0 / (2 * d + 2) as f64).sqrt()
}

/// Relative-entropy measure of a Werner state with noise weight `p`.
pub fn werner_relent(p: f64) -> f64 {
    if p <= WERNER_AS_THRESHOLD {
        return 0.0;
    }
    let top = (1.0 + 3.0 * p) / 4.0;
    let rest = (1.0 - p) / 4.0;
    let entropy = Spectrum::from_raw(vec![top, rest, rest, rest]).entropy();
    (6f64.log2() - top * 3f64.log2() - entropy).max(0.0)
}

/// Bures measure of a Werner state with noise weight `p`.
pub fn werner_bures(p: f64) -> f64 {
    if p <= WERNER_AS_THRESHOLD {
        return 0.0;
    }
    (2.0 - (((1.0 + 3.0 * p) / 2.0).sqrt() + (1.5 * (1.0 - p)).sqrt())).max(0.0)
}

pub fn nas_werner(params: &WernerParams, kind: DistanceKind) -> Result<NasResult> {
    let value_of: fn(f64) -> f64 = match kind {
        DistanceKind::RelativeEntropy => werner_relent,
        DistanceKind::Bures => werner_bures,
        other => {
            return Err(Error::UnsupportedKind(format!(
                "no Werner closed form for the {other} distance"
            )))
        }
    };
    let rho = werner(params)?;
    if params.p <= WERNER_AS_THRESHOLD {
        return Ok(NasResult {
            value: 0.0,
            method: Method::ClosedForm,
            gap_estimate: None,
            certificate: Certificate::NearestAs(rho),
        });
    }
    let basis = complete_basis(&params.xi());
    let sixth = 1.0 / 6.0;
    let nearest = DensityMatrix::from_parts(
        diag_in_basis(&basis, &[0.5, sixth, sixth, sixth]),
        rho.dims(),
    );
    Ok(NasResult {
        value: value_of(params.p),
        method: Method::ClosedForm,
        gap_estimate: None,
        certificate: Certificate::NearestAs(nearest),
    })
}

/// Distance to the AS state sharing the eigenbasis of `rho` with the
/// flat-tail boundary spectrum `(3, 1, ..., 1)/(2d + 2)`.
pub fn nas_upper_bound(rho: &DensityMatrix, kind: DistanceKind) -> Result<f64> {
    let d = qubit_qudit_dim(rho.dims())?;
    let spec = rho.spectrum()?;
    let a1 = spec.largest();
    let dd = (2 * d + 2) as f64;
    match kind {
        DistanceKind::RelativeEntropy => Ok(dd.log2() - a1 * 3f64.log2() - spec.entropy()),
        DistanceKind::Bures => {
            let tr_sqrt: f64 = spec
                .values()
                .iter()
                .filter(|&&v| v > ZERO_EIGENVALUE)
                .map(|v| v.sqrt())
                .sum();
            Ok(2.0 - 2.0 * (tr_sqrt + (3f64.sqrt() - 1.0) * a1.sqrt()) / dd.sqrt())
        }
        other => Err(Error::UnsupportedKind(format!(
            "no upper bound for the {other} distance"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NumericMode {
    Aligned,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericConfig {
    pub max_iters: usize,
    pub restarts: usize,
    pub tol: f64,
    pub seed: u64,
    pub mode: NumericMode,
    /// Criterion tolerance for deciding that the input is already AS.
    pub as_tol: f64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            restarts: 8,
            tol: 1e-8,
            seed: 0,
            mode: NumericMode::Full,
            as_tol: DEFAULT_AS_TOL,
        }
    }
}

impl NumericConfig {
    pub fn aligned() -> Self {
        Self {
            mode: NumericMode::Aligned,
            ..Self::default()
        }
    }

    fn local(&self) -> NelderMead {
        NelderMead {
            max_iters: self.max_iters,
            tol: self.tol,
            polish_restarts: 2,
        }
    }
}

struct Aligned {
    value: f64,
    spectrum: Vec<f64>,
    converged: bool,
}

fn spectrum_from_box(s: &[f64], d: usize) -> Option<Vec<f64>> {
    let coords = BoundaryCoords::from_unit_box(s, d);
    boundary_spectrum(&coords, d, true)
        .ok()
        .map(|sp| sp.values().to_vec())
}

fn minimize_aligned(kind: DistanceKind, alpha: &[f64], d: usize, cfg: &NumericConfig) -> Aligned {
    let dim = 2 * d - 1;
    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(cfg.restarts.max(2));
    if let Ok(spec) = project_to_boundary(alpha) {
        if let Ok(coords) = BoundaryCoords::from_spectrum(&spec) {
            starts.push(coords.to_unit_box(d));
        }
    }
    if let Ok(coords) = BoundaryCoords::flat_tail(lambda1_bounds(d).1, d) {
        starts.push(coords.to_unit_box(d));
    }
    let mut rng = rng_from_seed(cfg.seed);
    while starts.len() < cfg.restarts.max(2) {
        starts.push((0..dim).map(|_| rng.random::<f64>()).collect());
    }

    let local = cfg.local();
    let bounds = Bounds::unit(dim);
    let step = vec![0.1; dim];
    let runs: Vec<_> = starts
        .par_iter()
        .map(|x0| {
            let f = |s: &[f64]| match spectrum_from_box(s, d) {
                Some(l) => commuting_distance(kind, alpha, &l),
                None => f64::INFINITY,
            };
            minimize(f, x0, &step, &bounds, &local)
        })
        .collect();
    let converged = runs.iter().any(|r| r.converged);
    let best = runs
        .into_iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least two starts");
    let spectrum =
        spectrum_from_box(&best.x, d).unwrap_or_else(|| vec![1.0 / (2 * d) as f64; 2 * d]);
    Aligned {
        value: best.value,
        spectrum,
        converged,
    }
}

/// Hermitian generator with zero diagonal from `n(n-1)` reals.
fn generator(theta: &[f64], n: usize) -> ComplexMatrix {
    let mut h = ComplexMatrix::from_element(n, n, ZERO);
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            let z = c(theta[k], theta[k + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 2;
        }
    }
    h
}

fn rotation(theta: &[f64], n: usize) -> Option<ComplexMatrix> {
    if theta.iter().all(|&t| t == 0.0) {
        return Some(ComplexMatrix::identity(n, n));
    }
    expm_i_hermitian(&generator(theta, n)).ok()
}

/// Minimum distance from `rho` to the AS set.
pub fn nas_numeric(
    rho: &DensityMatrix,
    kind: DistanceKind,
    cfg: &NumericConfig,
) -> Result<NasResult> {
    kind.validate()?;
    let d = qubit_qudit_dim(rho.dims())?;
    if d > MAX_NUMERIC_D {
        return Err(Error::Unsupported(format!(
            "numerical minimisation is limited to 2 x d with d <= {MAX_NUMERIC_D}"
        )));
    }
    let method = match cfg.mode {
        NumericMode::Aligned => Method::ConjectureAligned,
        NumericMode::Full => Method::FullNumeric,
    };
    let eig = rho.eig()?;
    let spec = Spectrum::from_eigenvalues(eig.values.clone())?;
    let alpha = spec.values().to_vec();
    if is_absolutely_separable(&spec, d, cfg.as_tol)?.is_as {
        return Ok(NasResult {
            value: 0.0,
            method,
            gap_estimate: (cfg.mode == NumericMode::Full).then_some(0.0),
            certificate: Certificate::NearestAs(rho.clone()),
        });
    }

    let aligned = minimize_aligned(kind, &alpha, d, cfg);
    if !aligned.converged || !aligned.value.is_finite() {
        return Err(Error::ConvergenceFailure {
            best: aligned.value,
        });
    }
    let v = &eig.vectors;
    let aligned_state = DensityMatrix::from_parts(diag_in_basis(v, &aligned.spectrum), rho.dims());
    let aligned_value = distance(kind, rho, &aligned_state)?;
    if cfg.mode == NumericMode::Aligned {
        return Ok(NasResult {
            value: aligned_value,
            method,
            gap_estimate: None,
            certificate: Certificate::NearestAs(aligned_state),
        });
    }

    let n = 2 * d;
    let n_theta = n * (n - 1);
    let coords0 = BoundaryCoords::from_spectrum(&Spectrum::from_raw(aligned.spectrum.clone()))?;
    let mut x0 = coords0.to_unit_box(d);
    x0.extend(std::iter::repeat_n(0.0, n_theta));
    let bounds = Bounds::unit(2 * d - 1).concat(Bounds::uniform(
        n_theta,
        -std::f64::consts::PI,
        std::f64::consts::PI,
    ));
    let mut step = vec![0.02; 2 * d - 1];
    step.extend(std::iter::repeat_n(0.05, n_theta));

    let objective = |x: &[f64]| -> f64 {
        let (s, theta) = x.split_at(2 * d - 1);
        let (Some(l), Some(w)) = (spectrum_from_box(s, d), rotation(theta, n)) else {
            return f64::INFINITY;
        };
        rotated_distance(kind, &alpha, &w, &l)
    };
    let mut rng = rng_from_seed(cfg.seed ^ 0x5eed);
    let mut perturbed = x0.clone();
    for t in perturbed.iter_mut().skip(2 * d - 1) {
        *t = 0.3 * (rng.random::<f64>() - 0.5);
    }
    let local = cfg.local();
    let runs: Vec<_> = [x0, perturbed]
        .par_iter()
        .map(|start| minimize(objective, start, &step, &bounds, &local))
        .collect();
    let best = runs
        .into_iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("two runs");

    let mut nearest = aligned_state.clone();
    let mut value = aligned_value;
    if best.value < aligned.value {
        let (s, theta) = best.x.split_at(2 * d - 1);
        if let (Some(l), Some(w)) = (spectrum_from_box(s, d), rotation(theta, n)) {
            let candidate = DensityMatrix::from_parts(diag_in_basis(&(v * w), &l), rho.dims());
            let cv = distance(kind, rho, &candidate)?;
            if cv < value {
                value = cv;
                nearest = candidate;
            }
        }
    }
    // interior points along the ray to the flat state
    let flat = DensityMatrix::maximally_mixed(rho.dims());
    for t in [0.25, 0.5, 0.75] {
        let candidate = nearest.mix(&flat, t)?;
        if let Ok(cv) = distance(kind, rho, &candidate) {
            if cv < value {
                value = cv;
                nearest = candidate;
            }
        }
    }
    Ok(NasResult {
        value,
        method,
        gap_estimate: Some(aligned_value - value),
        certificate: Certificate::NearestAs(nearest),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub before: f64,
    pub after: f64,
    /// `before - after`; non-negative when the measure did not increase.
    pub slack: f64,
}

/// Measure of `rho` and of its image under `ch`.
pub fn verify_monotonicity(
    rho: &DensityMatrix,
    ch: &MixedUnitaryChannel,
    kind: DistanceKind,
    cfg: &NumericConfig,
) -> Result<MonotonicityReport> {
    let out = apply_channel(ch, rho)?;
    let before = nas_numeric(rho, kind, cfg)?.value;
    let after = nas_numeric(&out, kind, cfg)?.value;
    Ok(MonotonicityReport {
        before,
        after,
        slack: before - after,
    })
}
