//! Quaternionic Hopf coordinates for `(2K+2)`-level systems.
//!
//! A quaternion is stored as the 2x2 complex matrix
//!
//! ```text
//! q = x0 I + x1 e1 + x2 e2 + x3 e3,   e_k = -i sigma^k,
//! ```
//!
//! and amplitude pairs `(z^a, z^{a+K+1})` map to `q^a` through
//! `x0 + i x1 = z^a`, `x2 + i x3 = z^{a+K+1}`. The inverse map is
//! `z = Tr(P^- q)`, `z' = Tr(P^+ (i sigma^2) q)` with `P^(+-) = (I +- sigma^1)/2`.
//! Multiplying the state by `i` is left multiplication by `e1`, so right
//! multiplication by a unit quaternion is a unitary map of the state.
//!
//! Charts use the left quotient `h^a = (Q^eta)^-1 Q^a` and the fiber
//! `Q^eta / |Q^eta|`, so `Q^a = fiber h^a / sqrt(sum |h|^2)`.

mod instanton;
mod transport;

pub use instanton::{bpst_connection, second_chern_s4, s3_density, to_quaternionic_frame, wz_three_form, Euler, S7Params};
pub use transport::{
    effective_hamiltonian, fiber_reconstruction_check, nonabelian_connection, nonabelian_holonomy,
    nonabelian_overlap_check, quaternionic_connection, su2_exp, FiberCheck, NonAbelianOverlap, SU2Holonomy,
};

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::hilbert::StateVector;
use crate::linalg::{c, max_abs_diff2, pauli, CMatrix2, CVector, I};
use crate::{tolerances, Error, Result};

/// Element of `H` in the 2x2 complex representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion(pub CMatrix2);

impl Quaternion {
    pub fn from_components(x: [f64; 4]) -> Self {
        Self::from_complex_pair(c(x[0], x[1]), c(x[2], x[3]))
    }

    /// `z = x0 + i x1`, `w = x2 + i x3`.
    pub fn from_complex_pair(z: Complex64, w: Complex64) -> Self {
        Self(CMatrix2::new(c(z.re, -w.im), c(-w.re, -z.im), c(w.re, -z.im), c(z.re, w.im)))
    }

    /// Image of the standard unit-quaternion matrix `[[z, w], [-w*, z*]]`.
    /// This is an algebra isomorphism onto the stored representation.
    pub fn from_standard(m: &CMatrix2) -> Self {
        Self::from_complex_pair(m[(0, 0)], m[(0, 1)])
    }

    /// Inverse of [`Quaternion::from_standard`].
    pub fn to_standard(&self) -> CMatrix2 {
        let (z, w) = self.complex_pair();
        CMatrix2::new(z, w, -w.conj(), z.conj())
    }

    pub fn identity() -> Self {
        Self(CMatrix2::identity())
    }

    pub fn zero() -> Self {
        Self(CMatrix2::zeros())
    }

    /// `e1, e2, e3`.
    pub fn units() -> [Self; 3] {
        pauli().map(|s| Self(s * (-I)))
    }

    pub fn components(&self) -> [f64; 4] {
        let (z, w) = self.complex_pair();
        [z.re, z.im, w.re, w.im]
    }

    /// `(Tr(P^- q), Tr(P^+ i sigma^2 q))`.
    pub fn complex_pair(&self) -> (Complex64, Complex64) {
        let q = &self.0;
        let z = 0.5 * (q[(0, 0)] + q[(1, 1)] - q[(0, 1)] - q[(1, 0)]);
        let w = 0.5 * (q[(1, 0)] + q[(1, 1)] - q[(0, 0)] - q[(0, 1)]);
        (z, w)
    }

    /// `|q|^2 = det q = Tr(q q^dagger) / 2`.
    pub fn norm_sqr(&self) -> f64 {
        0.5 * self.0.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Quaternion conjugate, the matrix adjoint.
    pub fn conj(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > tolerances::ZERO_NORM) {
            return Err(Error::ZeroVector { norm: n.sqrt() });
        }
        Ok(Self(self.0.adjoint() / c(n, 0.0)))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0 * c(s, 0.0))
    }

    /// `q / |q|`.
    pub fn unit(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > tolerances::ZERO_NORM) {
            return Err(Error::ZeroVector { norm: n });
        }
        Ok(self.scale(1.0 / n))
    }

    /// Largest deviation of `q^dagger q` from `|q|^2 I`.
    pub fn representation_defect(&self) -> f64 {
        max_abs_diff2(&(self.0.adjoint() * self.0), &(CMatrix2::identity() * c(self.norm_sqr(), 0.0)))
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: Quaternion) -> Quaternion {
        Quaternion(self.0 * rhs.0)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, rhs: Quaternion) -> Quaternion {
        Quaternion(self.0 + rhs.0)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, rhs: Quaternion) -> Quaternion {
        Quaternion(self.0 - rhs.0)
    }
}

/// `P^- = (I - sigma^1)/2`.
pub fn projector_minus() -> CMatrix2 {
    CMatrix2::new(c(0.5, 0.0), c(-0.5, 0.0), c(-0.5, 0.0), c(0.5, 0.0))
}

/// `P^+ = (I + sigma^1)/2`.
pub fn projector_plus() -> CMatrix2 {
    CMatrix2::new(c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0))
}

/// Inhomogeneous `HP^K` coordinates and the unit-quaternion fiber.
#[derive(Debug, Clone, PartialEq)]
pub struct HPChartPoint {
    pub patch: usize,
    /// `h[patch]` is the identity.
    pub h: Vec<Quaternion>,
    pub fiber: Quaternion,
}

impl HPChartPoint {
    /// `sqrt(Tr(sum h h^dagger) / 2)`.
    pub fn h_norm(&self) -> f64 {
        self.h.iter().map(Quaternion::norm_sqr).sum::<f64>().sqrt()
    }

    /// `h^a / sqrt(sum |h|^2)`.
    pub fn normalized_h(&self) -> Vec<Quaternion> {
        let n = self.h_norm();
        self.h.iter().map(|q| q.scale(1.0 / n)).collect()
    }
}

/// `Q^a` with `z^a` and `z^{a+K+1}` packed together. Fails on odd lengths.
pub fn quaternions_from_state(state: &StateVector) -> Result<Vec<Quaternion>> {
    let amps = state.amplitudes();
    let n = amps.len();
    if !n.is_multiple_of(2) {
        return Err(Error::OddDimension(n));
    }
    let half = n / 2;
    let q: Vec<Quaternion> = (0..half).map(|a| Quaternion::from_complex_pair(amps[a], amps[a + half])).collect();
    let norm = q.iter().map(Quaternion::norm_sqr).sum::<f64>().sqrt();
    Ok(q.into_iter().map(|x| x.scale(1.0 / norm)).collect())
}

/// Amplitudes `Tr(P^- Q^a)` and `Tr(P^+ i sigma^2 Q^a)` from raw quaternions.
pub fn amplitudes_from_quaternions(q: &[Quaternion]) -> CVector {
    let half = q.len();
    let mut out = CVector::zeros(2 * half);
    for (a, x) in q.iter().enumerate() {
        let (z, w) = x.complex_pair();
        out[a] = z;
        out[a + half] = w;
    }
    out
}

/// `Q -> |Psi>`, normalizing.
pub fn state_from_raw_quaternions(q: &[Quaternion]) -> Result<StateVector> {
    StateVector::normalize(amplitudes_from_quaternions(q))
}

/// `|Psi> = sum [Tr(P^- q h^a)|a> + Tr(P^+ (i sigma^2) q h^a)|a+K+1>] / sqrt(sum |h|^2)`.
pub fn state_from_quaternions(fiber: &Quaternion, h: &[Quaternion]) -> Result<StateVector> {
    let q: Vec<Quaternion> = h.iter().map(|x| *fiber * *x).collect();
    state_from_raw_quaternions(&q)
}

/// `h^a = (Q^patch)^-1 Q^a`, fiber `Q^patch / |Q^patch|`.
pub fn hp_project(q: &[Quaternion], patch: usize) -> Result<HPChartPoint> {
    if patch >= q.len() {
        return Err(Error::PatchOutOfRange { patch, dim: q.len() });
    }
    let modulus = q[patch].norm();
    if modulus <= tolerances::CHART_SINGULAR {
        return Err(Error::ChartSingular { patch, modulus });
    }
    let inv = q[patch].inverse()?;
    let mut h: Vec<Quaternion> = q.iter().map(|x| inv * *x).collect();
    h[patch] = Quaternion::identity();
    Ok(HPChartPoint {
        patch,
        h,
        fiber: q[patch].unit()?,
    })
}

/// Index of the largest `|Q^a|`, lowest on ties.
pub fn select_hp_chart(q: &[Quaternion]) -> usize {
    let mut best = 0;
    for (a, x) in q.iter().enumerate().skip(1) {
        if x.norm() > q[best].norm() {
            best = a;
        }
    }
    best
}

/// `sum_a Tr(Q_a^dagger P^- R_a)`, the complex inner product of the states.
pub fn quaternionic_inner(q: &[Quaternion], r: &[Quaternion]) -> Complex64 {
    let p = projector_minus();
    q.iter().zip(r).map(|(a, b)| (a.0.adjoint() * p * b.0).trace()).sum()
}

/// `|Psi^perp> = sum Tr(P^- (sigma^2/i) Q^a)|a> + Tr(P^+ Q^a)|a+K+1>`,
/// i.e. the state of `e2 Q`.
pub fn perpendicular_state(state: &StateVector) -> Result<StateVector> {
    let q = quaternions_from_state(state)?;
    let e2 = Quaternion::units()[1];
    let rotated: Vec<Quaternion> = q.iter().map(|x| e2 * *x).collect();
    state_from_raw_quaternions(&rotated)
}
