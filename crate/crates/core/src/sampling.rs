//! Random draws for property tests and verification suites.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::hilbert::StateVector;
use crate::linalg::{c, CMatrix, CMatrix2, CVector};
use crate::quaternionic::{Euler, Quaternion, S7Params};

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Haar-random pure state of `dim` levels.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> StateVector {
    loop {
        let z = CVector::from_fn(dim, |_, _| c(normal(rng), normal(rng)));
        if let Ok(s) = StateVector::normalize(z) {
            return s;
        }
    }
}

/// Gaussian-unitary-ensemble matrix with unit off-diagonal variance.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let a = CMatrix::from_fn(dim, dim, |_, _| c(normal(rng), normal(rng)));
    (&a + a.adjoint()) * c(0.5, 0.0)
}

/// Haar-random `SU(2)` element in the standard form.
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> CMatrix2 {
    random_quaternion(rng).unit().expect("nonzero with probability one").to_standard()
}

/// Quaternion with Gaussian components.
pub fn random_quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    Quaternion::from_components([normal(rng), normal(rng), normal(rng), normal(rng)])
}

/// Uniform point on the unit 2-sphere.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v = [normal(rng), normal(rng), normal(rng)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-12 {
            return v.map(|x| x / n);
        }
    }
}

pub fn random_euler<R: Rng + ?Sized>(rng: &mut R) -> Euler {
    Euler::new(rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..4.0 * PI))
}

/// `S^7` point with the given `theta` and random `u`, `v`.
pub fn random_s7_at<R: Rng + ?Sized>(rng: &mut R, theta: f64) -> S7Params {
    S7Params {
        theta,
        u: random_euler(rng),
        v: random_euler(rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermiticity_defect, unitarity_defect2};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn draws_have_their_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for dim in 2..7 {
            assert!((random_state(&mut rng, dim).norm() - 1.0).abs() < 1e-14);
            assert_eq!(hermiticity_defect(&random_hermitian(&mut rng, dim)), 0.0);
        }
        let u = random_su2(&mut rng);
        assert!(unitarity_defect2(&u) < 1e-14);
        assert!((u.determinant() - 1.0).norm() < 1e-14);
        let v = random_unit_vector(&mut rng);
        assert!((v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn seeded_draws_repeat() {
        let a = random_state(&mut ChaCha8Rng::seed_from_u64(9), 5);
        let b = random_state(&mut ChaCha8Rng::seed_from_u64(9), 5);
        assert_eq!(a, b);
    }
}
