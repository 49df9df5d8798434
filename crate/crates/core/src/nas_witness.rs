//! Witness-based measure of non-absolute separability.
//!
//! `N^W(rho) = max[0, -min_{U, W} tr(U^dagger W U rho)]` over witnesses
//! `W = |phi><phi|^{T_B}`. For fixed `U` the inner minimum is the smallest
//! eigenvalue of `(U rho U^dagger)^{T_B}`. In `2 x 2` the search over `U`
//! runs over the canonical nonlocal family
//! `exp[i(a1 XX + a2 YY + a3 ZZ)]`, both on the input and on a
//! standardised copy whose eigenvectors are a fixed reference basis.

use std::f64::consts::FRAC_PI_2;

use nalgebra::Matrix4;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nas_distance::{Certificate, Method, NasResult};
use crate::optim::{minimize, Bounds, NelderMead};
use crate::qcore::linalg::{
    c, complete_basis, eigh, hermitian_deviation, hermitize, outer, ComplexMatrix, ComplexVector,
    HERMITIAN_TOL, ZERO,
};
use crate::qcore::{partial_transpose_matrix, DensityMatrix, Dims, PureState, Spectrum, Subsystem};
use crate::states::{max_entangled, WernerParams};

/// `lambda_min(rho^{T_B})` at or above `-NPT_TOL` counts as PPT.
pub const NPT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    /// `|phi><phi|^{T_B}` for the lowest eigenvector of the named state's partial transpose.
    FromPtEigenvector(String),
    Explicit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessOperator {
    mat: ComplexMatrix,
    provenance: Provenance,
}

impl WitnessOperator {
    pub fn new(mat: ComplexMatrix, provenance: Provenance) -> Result<Self> {
        let dev = hermitian_deviation(&mat);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { mat, provenance })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// `tr(W rho)`.
    pub fn expectation(&self, rho: &DensityMatrix) -> f64 {
        crate::qcore::linalg::trace_product_re(&self.mat, rho.matrix())
    }

    /// `U^dagger W U`.
    pub fn conjugated_by_adjoint(&self, u: &ComplexMatrix) -> Self {
        Self {
            mat: u.adjoint() * &self.mat * u,
            provenance: self.provenance.clone(),
        }
    }
}

/// Parameters of `exp[i(a1 XX + a2 YY + a3 ZZ)]`, each in `[0, pi/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlocalUnitaryParams {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl NonlocalUnitaryParams {
    pub fn new(a1: f64, a2: f64, a3: f64) -> Result<Self> {
        for (name, v) in [("a1", a1), ("a2", a2), ("a3", a3)] {
            if !(0.0..=FRAC_PI_2).contains(&v) {
                return Err(Error::ParamOutOfRange(format!(
                    "{name} = {v} not in [0, pi/2]"
                )));
            }
        }
        Ok(Self { a1, a2, a3 })
    }

    fn phases(&self) -> [f64; 4] {
        let (a1, a2, a3) = (self.a1, self.a2, self.a3);
        // eigenvalues of the generator on Phi+, Phi-, Psi+, Psi-
        [a1 - a2 + a3, -a1 + a2 + a3, a1 + a2 - a3, -a1 - a2 - a3]
    }
}

/// Columns: `Phi+, Phi-, Psi+, Psi-`.
fn bell_basis() -> Matrix4<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (p, m, z) = (c(s, 0.0), c(-s, 0.0), ZERO);
    Matrix4::new(
        p, p, z, z, //
        z, z, p, p, //
        z, z, p, m, //
        p, m, z, z,
    )
}

/// Eigenvectors for `lambda_1..lambda_4` in the standardised frame:
/// `Phi+, |01>, Phi-, |10>`.
fn reference_basis() -> Matrix4<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (p, m, o, z) = (c(s, 0.0), c(-s, 0.0), c(1.0, 0.0), ZERO);
    Matrix4::new(
        p, z, p, z, //
        z, o, z, z, //
        z, z, z, o, //
        p, z, m, z,
    )
}

fn canonical4(params: &NonlocalUnitaryParams) -> Matrix4<Complex64> {
    let b = bell_basis();
    let ph = params.phases();
    let mut scaled = b;
    for (k, &t) in ph.iter().enumerate() {
        let z = Complex64::from_polar(1.0, t);
        for i in 0..4 {
            scaled[(i, k)] *= z;
        }
    }
    scaled * b.adjoint()
}

pub fn canonical_unitary(params: &NonlocalUnitaryParams) -> Result<ComplexMatrix> {
    NonlocalUnitaryParams::new(params.a1, params.a2, params.a3)?;
    Ok(to_dynamic(&canonical4(params)))
}

fn to_dynamic(m: &Matrix4<Complex64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(4, 4, |i, j| m[(i, j)])
}

fn to_fixed(m: &ComplexMatrix) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| m[(i, j)])
}

fn pt_b4(x: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|r, s| {
        let (i, l) = (r / 2, r % 2);
        let (k, j) = (s / 2, s % 2);
        x[(i * 2 + j, k * 2 + l)]
    })
}

/// `(value, eigenvector)` of the lowest eigenpair of a partial transpose.
fn pt_lowest(mat: &ComplexMatrix, dims: Dims) -> Result<(f64, ComplexVector)> {
    let pt = partial_transpose_matrix(mat, dims, Subsystem::B)?;
    let eig = eigh(&pt)?;
    let k = eig.dim() - 1;
    Ok((eig.values[k], eig.vectors.column(k).into_owned()))
}

/// Optimal witness `|phi><phi|^{T_B}` of an NPT state.
pub fn optimal_witness_from_ppt(rho: &DensityMatrix) -> Result<WitnessOperator> {
    let (min, phi) = pt_lowest(rho.matrix(), rho.dims())?;
    if min >= -NPT_TOL {
        return Err(Error::NotNpt(min));
    }
    let w = partial_transpose_matrix(&outer(&phi), rho.dims(), Subsystem::B)?;
    WitnessOperator::new(
        w,
        Provenance::FromPtEigenvector(format!("{} state", rho.dims())),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessConfig {
    /// Grid points per parameter on `[0, pi/2]`.
    pub grid: usize,
    /// Number of best grid cells refined by Nelder–Mead.
    pub refine_starts: usize,
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        Self {
            grid: 40,
            refine_starts: 5,
            tol: 1e-10,
            max_iters: 2000,
        }
    }
}

/// Optimal unitary and witness behind a witness-based value.
#[derive(Debug, Clone)]
pub struct WitnessCertificate {
    /// Full unitary applied to the input.
    pub unitary: ComplexMatrix,
    /// Canonical parameters, when the unitary contains a canonical factor.
    pub params: Option<NonlocalUnitaryParams>,
    /// `U^dagger W U`.
    pub witness: WitnessOperator,
    /// `tr(U^dagger W U rho)`.
    pub expectation: f64,
}

struct GridBest {
    params: NonlocalUnitaryParams,
    min_eig: f64,
}

/// `min_a lambda_min((U(a) rho U(a)^dagger)^{T_B})` by grid and refinement.
fn search_canonical(rho: &Matrix4<Complex64>, cfg: &WitnessConfig) -> GridBest {
    let b = bell_basis();
    let in_bell = b.adjoint() * rho * b;
    let objective = move |a: &[f64]| -> f64 {
        let p = NonlocalUnitaryParams {
            a1: a[0],
            a2: a[1],
            a3: a[2],
        };
        let ph = p.phases();
        let rotated =
            Matrix4::from_fn(|j, k| in_bell[(j, k)] * Complex64::from_polar(1.0, ph[j] - ph[k]));
        let x = b * rotated * b.adjoint();
        pt_b4(&x).symmetric_eigenvalues().min()
    };

    let g = cfg.grid.max(2);
    let axis: Vec<f64> = (0..g)
        .map(|i| FRAC_PI_2 * i as f64 / (g - 1) as f64)
        .collect();
    let mut cells: Vec<(f64, [f64; 3])> = (0..g * g * g)
        .into_par_iter()
        .map(|idx| {
            let a = [axis[idx / (g * g)], axis[(idx / g) % g], axis[idx % g]];
            (objective(&a), a)
        })
        .collect();
    cells.sort_by(|x, y| x.0.total_cmp(&y.0));

    let local = NelderMead {
        max_iters: cfg.max_iters,
        tol: cfg.tol,
        polish_restarts: 2,
    };
    let bounds = Bounds::uniform(3, 0.0, FRAC_PI_2);
    let step = [FRAC_PI_2 / (g - 1) as f64; 3];
    let refined: Vec<_> = cells
        .iter()
        .take(cfg.refine_starts.max(1))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|(_, a)| minimize(objective, a, &step, &bounds, &local))
        .collect();
    let best = refined
        .into_iter()
        .min_by(|x, y| x.value.total_cmp(&y.value))
        .expect("one start");
    let (grid_value, grid_a) = cells[0];
    let (min_eig, a) = if best.value <= grid_value {
        (best.value, [best.x[0], best.x[1], best.x[2]])
    } else {
        (grid_value, grid_a)
    };
    GridBest {
        params: NonlocalUnitaryParams {
            a1: a[0],
            a2: a[1],
            a3: a[2],
        },
        min_eig,
    }
}

fn certificate_for(
    rho: &DensityMatrix,
    u: ComplexMatrix,
    params: Option<NonlocalUnitaryParams>,
) -> Result<WitnessCertificate> {
    let rotated = &u * rho.matrix() * u.adjoint();
    let (_, phi) = pt_lowest(&rotated, rho.dims())?;
    let w = partial_transpose_matrix(&outer(&phi), rho.dims(), Subsystem::B)?;
    let tilde = hermitize(&(u.adjoint() * w * &u));
    let witness = WitnessOperator::new(
        tilde,
        Provenance::FromPtEigenvector("U rho U^dagger".into()),
    )?;
    let expectation = witness.expectation(rho);
    Ok(WitnessCertificate {
        unitary: u,
        params,
        witness,
        expectation,
    })
}

/// Witness-based measure: grid search in `2 x 2`, analytic for pure `d x d`.
pub fn nas_witness_measure(rho: &DensityMatrix, cfg: &WitnessConfig) -> Result<NasResult> {
    let dims = rho.dims();
    if dims == Dims::new(2, 2) {
        return two_qubit_measure(rho, cfg);
    }
    if dims.m == dims.n {
        let eig = rho.eig()?;
        if eig.values[0] >= 1.0 - 1e-10 {
            let alpha = PureState::normalized(eig.vectors.column(0).into_owned(), dims)?;
            return nas_witness_pure(&alpha);
        }
    }
    Err(Error::Unsupported(format!(
        "the witness-based measure is available for 2 x 2 states and pure d x d states, got a mixed {dims} state"
    )))
}

fn two_qubit_measure(rho: &DensityMatrix, cfg: &WitnessConfig) -> Result<NasResult> {
    let direct = search_canonical(&to_fixed(rho.matrix()), cfg);

    // standardised copy U0 rho U0^dagger with U0 = R V^dagger
    let eig = rho.eig()?;
    let u0 = reference_basis() * to_fixed(&eig.vectors).adjoint();
    let standard = u0 * to_fixed(rho.matrix()) * u0.adjoint();
    let via_standard = search_canonical(&standard, cfg);

    let (best, u) = if via_standard.min_eig < direct.min_eig {
        let u = canonical4(&via_standard.params) * u0;
        (via_standard, u)
    } else {
        let u = canonical4(&direct.params);
        (direct, u)
    };
    let cert = certificate_for(rho, to_dynamic(&u), Some(best.params))?;
    Ok(NasResult {
        value: (-best.min_eig).max(0.0),
        method: Method::GridRefine,
        gap_estimate: None,
        certificate: Certificate::Witness(Box::new(cert)),
    })
}

/// Pure `d x d` state: rotate onto the maximally entangled state and take
/// the lowest eigenvalue of its partial transpose, giving `1/d`.
pub fn nas_witness_pure(alpha: &PureState) -> Result<NasResult> {
    let dims = alpha.dims();
    if dims.m != dims.n {
        return Err(Error::BadDimension(format!(
            "expected a d x d state, got {dims}"
        )));
    }
    let mes = max_entangled(dims.m)?;
    let u = complete_basis(mes.amplitudes()) * complete_basis(alpha.amplitudes()).adjoint();
    let rho = alpha.projector();
    let cert = certificate_for(&rho, u, None)?;
    Ok(NasResult {
        value: (-cert.expectation).max(0.0),
        method: Method::PtEigenvector,
        gap_estimate: None,
        certificate: Certificate::Witness(Box::new(cert)),
    })
}

/// `max[0, (3p - 1)/4]`.
pub fn nas_witness_werner(params: &WernerParams) -> Result<f64> {
    params.validate()?;
    Ok(((3.0 * params.p - 1.0) / 4.0).max(0.0))
}

/// Two-qubit witness measure from the spectrum alone:
/// `max[0, (sqrt((l1 - l3)^2 + (l2 - l4)^2) - l2 - l4)/2]`.
pub fn two_qubit_spectral_value(spec: &Spectrum) -> Result<f64> {
    if spec.len() != 4 {
        return Err(Error::WrongLength {
            got: spec.len(),
            expected: 4,
        });
    }
    let l = spec.values();
    Ok((0.5 * ((l[0] - l[2]).hypot(l[1] - l[3]) - l[1] - l[3])).max(0.0))
}

/// The candidate `max[0, (l1 - l3 - 2 sqrt(l2 l4))/2]`; it agrees with
/// [`two_qubit_spectral_value`] when `l2 = l4` and has the same zero set.
pub fn conjectured_spectral_value(spec: &Spectrum) -> Result<f64> {
    if spec.len() != 4 {
        return Err(Error::WrongLength {
            got: spec.len(),
            expected: 4,
        });
    }
    let l = spec.values();
    Ok((0.5 * (l[0] - l[2] - 2.0 * (l[1] * l[3]).sqrt())).max(0.0))
}
