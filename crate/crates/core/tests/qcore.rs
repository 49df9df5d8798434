use nasq_core::qcore::linalg::{eig_hermitian, hermitian_deviation, kron, outer};
use nasq_core::qcore::{
    bures_measure, fidelity, haar_random_unitary, relative_entropy, trace_distance, ComplexMatrix,
    ComplexVector, DensityMatrix, Dims, PureState, Subsystem,
};
use nasq_core::states::{max_entangled, random_density, werner, WernerParams};
use nasq_core::Error;
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_4;

fn ket(dims: Dims, idx: usize) -> PureState {
    let mut v = ComplexVector::zeros(dims.total());
    v[idx] = Complex64::new(1.0, 0.0);
    PureState::new(v, dims).unwrap()
}

fn bell() -> DensityMatrix {
    max_entangled(2).unwrap().projector()
}

#[test]
fn eig_examples() {
    let mm = DensityMatrix::maximally_mixed(Dims::new(2, 2));
    assert!(mm
        .spectrum()
        .unwrap()
        .values()
        .iter()
        .all(|&v| (v - 0.25).abs() < 1e-15));

    let s = bell().spectrum().unwrap();
    assert!((s.at(1) - 1.0).abs() < 1e-12);
    assert!(s.values()[1..].iter().all(|v| v.abs() < 1e-12));

    let w = werner(&WernerParams::new(0.5, FRAC_PI_4, 0.0).unwrap()).unwrap();
    let s = w.spectrum().unwrap();
    for (got, want) in s.values().iter().zip([0.625, 0.125, 0.125, 0.125]) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn eig_reconstructs_and_is_orthonormal() {
    for seed in 0..20 {
        let rho = random_density(Dims::new(2, 3), 4, seed).unwrap();
        let e = eig_hermitian(rho.matrix()).unwrap();
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        let gram = e.vectors.adjoint() * &e.vectors;
        assert!((gram - ComplexMatrix::identity(6, 6)).camax() < 1e-10);
        assert!((e.reconstruct() - rho.matrix()).camax() < 1e-10);
    }
}

#[test]
fn eig_rejects_non_hermitian() {
    let mut m = ComplexMatrix::identity(2, 2);
    m[(0, 1)] = Complex64::new(0.1, 0.0);
    assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian(_))));
}

#[test]
fn partial_transpose_examples() {
    let p00 = ket(Dims::new(2, 2), 0).projector();
    assert!((p00.partial_transpose(Subsystem::B) - p00.matrix()).camax() < 1e-15);

    let pt = bell().partial_transpose(Subsystem::B);
    let e = eig_hermitian(&pt).unwrap();
    assert!((e.min_value() + 0.5).abs() < 1e-12);

    let diag = DensityMatrix::new(
        ComplexMatrix::from_diagonal(&ComplexVector::from_vec(
            [0.4, 0.3, 0.2, 0.1]
                .map(|v| Complex64::new(v, 0.0))
                .to_vec(),
        )),
        Dims::new(2, 2),
    )
    .unwrap();
    for sub in [Subsystem::A, Subsystem::B] {
        assert!((diag.partial_transpose(sub) - diag.matrix()).camax() < 1e-15);
    }
}

#[test]
fn partial_transpose_is_an_involution() {
    for (seed, dims) in [
        (1, Dims::new(2, 2)),
        (2, Dims::new(2, 3)),
        (3, Dims::new(3, 2)),
        (4, Dims::new(2, 4)),
    ] {
        let rho = random_density(dims, dims.total(), seed).unwrap();
        for sub in [Subsystem::A, Subsystem::B] {
            let once = rho.partial_transpose(sub);
            assert!(hermitian_deviation(&once) < 1e-14);
            assert!((once.trace().re - 1.0).abs() < 1e-14);
            let twice = nasq_core::qcore::partial_transpose_matrix(&once, dims, sub).unwrap();
            assert!((twice - rho.matrix()).camax() < 1e-14);
        }
    }
}

#[test]
fn fidelity_examples() {
    let rho = random_density(Dims::new(2, 2), 3, 5).unwrap();
    assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-10);

    let a = ket(Dims::new(2, 2), 0).projector();
    let b = ket(Dims::new(2, 2), 3).projector();
    assert!(fidelity(&a, &b).unwrap() < 1e-12);

    let phi = max_entangled(2).unwrap();
    let nearest = nasq_core::as_geometry::nearest_as_pure(&phi, 2).unwrap();
    assert!((fidelity(&phi.projector(), &nearest).unwrap() - 0.5).abs() < 1e-10);
}

#[test]
fn fidelity_is_symmetric_and_matches_pure_overlap() {
    for seed in 0..20 {
        let r = random_density(Dims::new(2, 3), 1 + seed as usize % 6, seed).unwrap();
        let s = random_density(Dims::new(2, 3), 6, seed + 100).unwrap();
        assert!((fidelity(&r, &s).unwrap() - fidelity(&s, &r).unwrap()).abs() < 1e-10);

        let alpha = nasq_core::states::random_pure(Dims::new(2, 3), seed).unwrap();
        let v = alpha.amplitudes();
        let overlap = (v.adjoint() * s.matrix() * v)[(0, 0)].re;
        assert!((fidelity(&alpha.projector(), &s).unwrap() - overlap).abs() < 1e-10);
    }
}

#[test]
fn relative_entropy_examples() {
    let rho = random_density(Dims::new(2, 2), 4, 9).unwrap();
    assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-10);

    let phi = max_entangled(2).unwrap();
    let nearest = nasq_core::as_geometry::nearest_as_pure(&phi, 2).unwrap();
    assert!((relative_entropy(&phi.projector(), &nearest).unwrap() - 1.0).abs() < 1e-10);

    // I/4 against a Werner state: both diagonal in the Werner eigenbasis
    let w = werner(&WernerParams::new(0.5, FRAC_PI_4, 0.0).unwrap()).unwrap();
    let mm = DensityMatrix::maximally_mixed(Dims::new(2, 2));
    let expected: f64 = [0.625f64, 0.125, 0.125, 0.125]
        .iter()
        .map(|&l| 0.25 * (0.25f64.log2() - l.log2()))
        .sum();
    assert!((relative_entropy(&mm, &w).unwrap() - expected).abs() < 1e-12);
}

#[test]
fn relative_entropy_support_violation() {
    let a = ket(Dims::new(2, 2), 0).projector();
    let b = ket(Dims::new(2, 2), 1).projector();
    assert!(matches!(
        relative_entropy(&a, &b),
        Err(Error::SupportViolation { .. })
    ));
}

#[test]
fn haar_examples() {
    let u = haar_random_unitary(1, 3);
    assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-14);
    assert_eq!(haar_random_unitary(4, 7), haar_random_unitary(4, 7));
    let u = haar_random_unitary(6, 11);
    assert!((u.adjoint() * &u - ComplexMatrix::identity(6, 6)).camax() < 1e-10);
}

/// `E|U_00|^2 = 1/n` and `E|U_00|^4 = 2/(n(n+1))` for Haar unitaries.
#[test]
fn haar_entry_moments() {
    let n = 4;
    let samples = 1000;
    let xs: Vec<f64> = (0..samples)
        .map(|s| haar_random_unitary(n, s).column(0)[0].norm_sqr())
        .collect();
    let mean = xs.iter().sum::<f64>() / samples as f64;
    let second = 2.0 / (n * (n + 1)) as f64;
    let sd = (second - 1.0 / (n * n) as f64).sqrt() / (samples as f64).sqrt();
    assert!((mean - 0.25).abs() < 3.0 * sd, "mean {mean}, sd {sd}");
}

#[test]
fn distances_are_unitarily_invariant() {
    for seed in 0..200u64 {
        let dims = if seed % 2 == 0 {
            Dims::new(2, 2)
        } else {
            Dims::new(2, 3)
        };
        let n = dims.total();
        let r = random_density(dims, n, seed).unwrap();
        let s = random_density(dims, n, seed + 10_000).unwrap();
        let u = haar_random_unitary(n, seed + 20_000);
        let (ru, su) = (r.conjugated(&u), s.conjugated(&u));
        let pairs = [
            (
                relative_entropy(&r, &s).unwrap(),
                relative_entropy(&ru, &su).unwrap(),
            ),
            (
                bures_measure(&r, &s).unwrap(),
                bures_measure(&ru, &su).unwrap(),
            ),
            (
                trace_distance(&r, &s).unwrap(),
                trace_distance(&ru, &su).unwrap(),
            ),
        ];
        for (a, b) in pairs {
            assert!((a - b).abs() <= 1e-8, "seed {seed}: {a} vs {b}");
        }
    }
}

#[test]
fn distances_are_jointly_convex() {
    let dims = Dims::new(2, 2);
    for seed in 0..200u64 {
        let a = [0.25, 0.5, 0.75][seed as usize % 3];
        let st = |k: u64| random_density(dims, 4, seed * 4 + k).unwrap();
        let (r1, r2, s1, s2) = (st(0), st(1), st(2), st(3));
        let rm = r1.mix(&r2, a).unwrap();
        let sm = s1.mix(&s2, a).unwrap();
        type Dist = fn(&DensityMatrix, &DensityMatrix) -> nasq_core::Result<f64>;
        for d in [relative_entropy as Dist, bures_measure, trace_distance] {
            let lhs = d(&rm, &sm).unwrap();
            let rhs = a * d(&r1, &s1).unwrap() + (1.0 - a) * d(&r2, &s2).unwrap();
            assert!(lhs <= rhs + 1e-8, "seed {seed}: {lhs} > {rhs}");
        }
    }
}

#[test]
fn spectrum_is_unitarily_invariant() {
    for seed in 0..50 {
        let rho = random_density(Dims::new(2, 4), 5, seed).unwrap();
        let u = haar_random_unitary(8, seed + 1);
        let dev = rho
            .spectrum()
            .unwrap()
            .max_deviation(&rho.conjugated(&u).spectrum().unwrap());
        assert!(dev < 1e-9);
    }
}

#[test]
fn kron_of_products_is_product_state() {
    let a = outer(&ComplexVector::from_vec(vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
    ]));
    let b = outer(&ComplexVector::from_vec(vec![
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
    ]));
    let ab = DensityMatrix::new(kron(&a, &b), Dims::new(2, 2)).unwrap();
    assert!((ab.matrix()[(1, 1)].re - 1.0).abs() < 1e-15);
}
