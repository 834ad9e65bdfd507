//! Small dense complex linear algebra used throughout the crate.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;

use crate::{tolerances, Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type CMatrix2 = Matrix2<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Pauli matrices `(sigma^1, sigma^2, sigma^3)`.
pub fn pauli() -> [CMatrix2; 3] {
    [
        CMatrix2::new(ZERO, ONE, ONE, ZERO),
        CMatrix2::new(ZERO, -I, I, ZERO),
        CMatrix2::new(ONE, ZERO, ZERO, -ONE),
    ]
}

/// Largest entry modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff2(a: &CMatrix2, b: &CMatrix2) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest entry modulus of `H - H^dagger`.
pub fn hermiticity_defect(h: &CMatrix) -> f64 {
    let n = h.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn ensure_hermitian(h: &CMatrix) -> Result<()> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            actual: h.ncols(),
        });
    }
    let deviation = hermiticity_defect(h);
    if deviation > tolerances::HERMITICITY {
        return Err(Error::NonHermitian { deviation });
    }
    Ok(())
}

/// `max |U^dagger U - I|` entrywise.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let prod = u.adjoint() * u;
    max_abs_diff(&prod, &CMatrix::identity(u.nrows(), u.ncols()))
}

pub fn unitarity_defect2(u: &CMatrix2) -> f64 {
    max_abs_diff2(&(u.adjoint() * u), &CMatrix2::identity())
}

/// `<a|b>` with the bra conjugated.
pub fn inner(a: &CVector, b: &CVector) -> Complex64 {
    a.dotc(b)
}

/// `<psi|M|psi>`.
pub fn expectation(m: &CMatrix, psi: &CVector) -> Complex64 {
    psi.dotc(&(m * psi))
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn to_dynamic(m: &CMatrix2) -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| m[(i, j)])
}

/// Multiplies `candidate` by the global phase that best aligns its
/// largest-modulus entry with the corresponding entry of `reference`.
pub fn align_global_phase(reference: &CMatrix, candidate: &CMatrix) -> CMatrix {
    assert_eq!(reference.shape(), candidate.shape());
    let (idx, _) = reference
        .iter()
        .enumerate()
        .fold((0, -1.0), |best, (k, z)| if z.norm() > best.1 { (k, z.norm()) } else { best });
    let r = reference.as_slice()[idx];
    let s = candidate.as_slice()[idx];
    if s.norm() == 0.0 {
        return candidate.clone();
    }
    let phase = (r * s.conj()).arg();
    candidate * Complex64::from_polar(1.0, phase)
}

/// Phase-insensitive distance between two matrices.
pub fn max_abs_diff_mod_phase(reference: &CMatrix, candidate: &CMatrix) -> f64 {
    max_abs_diff(reference, &align_global_phase(reference, candidate))
}

/// Time-step exponential `exp(-i H dt / hbar)`.
pub fn unitary_step(h: &CMatrix, dt: f64, hbar: f64) -> CMatrix {
    (h * c(0.0, -dt / hbar)).exp()
}

/// Wraps an angle to `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    use std::f64::consts::PI;
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Neumaier compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<T: IntoIterator<Item = f64>>(iter: T) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        let [s1, s2, s3] = pauli();
        assert!(max_abs_diff2(&(s1 * s2), &(s3 * I)) < 1e-15);
        assert!(max_abs_diff2(&(s1 * s1), &CMatrix2::identity()) < 1e-15);
    }

    #[test]
    fn wrap_angle_range() {
        use std::f64::consts::PI;
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        let s: CompensatedSum = xs.iter().copied().collect();
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn global_phase_alignment() {
        let a = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.5), c(0.2, 0.0), c(0.0, -1.0)]);
        let b = &a * Complex64::from_polar(1.0, 0.7);
        assert!(max_abs_diff_mod_phase(&a, &b) < 1e-15);
        assert!(max_abs_diff(&a, &b) > 0.1);
    }

    #[test]
    fn unitary_step_is_unitary() {
        let h = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.3, -0.2), c(0.3, 0.2), c(-0.5, 0.0)]);
        let u = unitary_step(&h, 0.7, 1.0);
        assert!(unitarity_defect(&u) < 1e-14);
        assert!(ensure_hermitian(&h).is_ok());
        let bad = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(ensure_hermitian(&bad), Err(Error::NonHermitian { .. })));
    }
}
