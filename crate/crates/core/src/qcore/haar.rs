//! Haar-distributed unitaries from QR of complex Ginibre matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::linalg::{c, ComplexMatrix};

/// Seeded generator used everywhere randomness enters the crate.
pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `rows x cols` matrix of i.i.d. standard complex normals, `E|z|^2 = 1`.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re * s, im * s)
    })
}

/// Haar-random unitary drawn from `rng`.
pub fn haar_unitary_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    assert!(dim >= 1, "unitary dimension must be at least 1");
    let qr = ginibre(dim, dim, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    // fix the phases of R's diagonal so that Q is Haar distributed
    for j in 0..dim {
        let d = r[(j, j)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { c(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Deterministic Haar-random unitary for a given seed.
pub fn haar_random_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    haar_unitary_with(dim, &mut rng_from_seed(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::unitarity_deviation;

    #[test]
    fn one_dimensional_unitary_is_a_phase() {
        let u = haar_random_unitary(1, 3);
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn seeded_unitaries_are_deterministic_and_unitary() {
        let a = haar_random_unitary(4, 7);
        let b = haar_random_unitary(4, 7);
        assert_eq!(a, b);
        assert!(unitarity_deviation(&a) < 1e-10);
        assert_ne!(a, haar_random_unitary(4, 8));
    }
}
