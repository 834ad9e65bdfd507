//! Four-level states on `S^7` with `Q^0 = u cos(theta/2)`, `Q^1 = u v sin(theta/2)`,
//! the BPST form of their connection, and the winding of `v`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::Quaternion;
use crate::hilbert::StateVector;
use crate::linalg::{c, CMatrix2, I};
use crate::quadrature::{self, Axis};
use crate::{Error, Result};

/// Euler angles of
/// `[[e^{i(g+b)/2} cos(a/2), e^{i(g-b)/2} sin(a/2)], [-e^{-i(g-b)/2} sin(a/2), e^{-i(g+b)/2} cos(a/2)]]`,
/// which equals `exp(i g sigma^3/2) exp(i a sigma^2/2) exp(i b sigma^3/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Euler {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

fn rot3(angle: f64) -> CMatrix2 {
    let e = Complex64::from_polar(1.0, angle / 2.0);
    CMatrix2::new(e, c(0.0, 0.0), c(0.0, 0.0), e.conj())
}

fn rot2(angle: f64) -> CMatrix2 {
    let (s, co) = (angle / 2.0).sin_cos();
    CMatrix2::new(c(co, 0.0), c(s, 0.0), c(-s, 0.0), c(co, 0.0))
}

fn half_i_sigma3() -> CMatrix2 {
    CMatrix2::new(c(0.0, 0.5), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -0.5))
}

fn half_i_sigma2() -> CMatrix2 {
    CMatrix2::new(c(0.0, 0.0), c(0.5, 0.0), c(-0.5, 0.0), c(0.0, 0.0))
}

impl Euler {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }

    /// The `SU(2)` matrix in the standard `[[z, w], [-w*, z*]]` form.
    pub fn matrix(&self) -> CMatrix2 {
        rot3(self.gamma) * rot2(self.alpha) * rot3(self.beta)
    }

    /// `(dv/dalpha, dv/dbeta, dv/dgamma)`.
    pub fn partials(&self) -> [CMatrix2; 3] {
        let g = rot3(self.gamma);
        let a = rot2(self.alpha);
        let b = rot3(self.beta);
        let v = g * a * b;
        [g * half_i_sigma2() * a * b, v * half_i_sigma3(), half_i_sigma3() * v]
    }
}

/// Parameters `(theta, u, v)` of a point of `S^7`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct S7Params {
    pub theta: f64,
    pub u: Euler,
    pub v: Euler,
}

impl S7Params {
    /// `(Q^0, Q^1) = (u cos(theta/2), u v sin(theta/2))` in the stored representation.
    pub fn quaternions(&self) -> [Quaternion; 2] {
        let u = Quaternion::from_standard(&self.u.matrix());
        let v = Quaternion::from_standard(&self.v.matrix());
        let (s, co) = (self.theta / 2.0).sin_cos();
        [u.scale(co), (u * v).scale(s)]
    }

    /// Amplitudes `(C^0, C^1, C^2, C^3)`.
    pub fn state(&self) -> StateVector {
        let q = self.quaternions();
        StateVector::normalize(super::amplitudes_from_quaternions(&q)).expect("unit quaternions give a unit state")
    }

    /// `h^1 = v tan(theta/2)` and its derivative along `dv` (`theta` fixed).
    pub fn chart(&self, dv: &CMatrix2) -> ([Quaternion; 2], [Quaternion; 2]) {
        let t = (self.theta / 2.0).tan();
        let v = Quaternion::from_standard(&self.v.matrix());
        let dv = Quaternion(to_quaternionic_frame(dv));
        ([Quaternion::identity(), v.scale(t)], [Quaternion::zero(), dv.scale(t)])
    }

    /// `sin^2(theta/2) = |x|^2 / (|x|^2 + Lambda^2)` at distance `|x|` from an
    /// instanton of size `Lambda`.
    pub fn theta_from_radius(x: f64, lambda: f64) -> f64 {
        2.0 * (x * x / (x * x + lambda * lambda)).sqrt().asin()
    }
}

/// Carries a matrix in the standard quaternion frame to the stored one,
/// `X -> g X g` with `g = (sigma^1 - sigma^3)/sqrt(2)`.
pub fn to_quaternionic_frame(m: &CMatrix2) -> CMatrix2 {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let g = CMatrix2::new(c(-r, 0.0), c(r, 0.0), c(r, 0.0), c(r, 0.0));
    g * m * g
}

/// `-i sin^2(theta/2) dv v^dagger`, expressed in the stored frame.
pub fn bpst_connection(s: &S7Params, dv: &CMatrix2) -> CMatrix2 {
    let v = s.v.matrix();
    let a = dv * v.adjoint() * (-I * (s.theta / 2.0).sin().powi(2));
    to_quaternionic_frame(&a)
}

/// `Tr(omega ^ omega ^ omega)` on three tangent vectors, `omega = dv v^dagger`:
/// `sum_perm sign Tr(omega_a omega_b omega_c) = 3 Tr(omega_1 [omega_2, omega_3])`.
pub fn wz_three_form(v: &CMatrix2, dv: &[CMatrix2; 3]) -> f64 {
    let vd = v.adjoint();
    let w: Vec<CMatrix2> = dv.iter().map(|d| d * vd).collect();
    let comm = w[1] * w[2] - w[2] * w[1];
    3.0 * (w[0] * comm).trace().re
}

/// Density of `Tr(dv v^dagger)^3` on `dalpha ^ dbeta ^ dgamma`.
pub fn s3_density(e: &Euler) -> f64 {
    wz_three_form(&e.matrix(), &e.partials())
}

/// `(1/24 pi^2) int Tr(dv v^dagger)^3` over `alpha in [0, pi]`,
/// `beta in [0, 2 pi)`, `gamma in [0, 4 pi)` by the midpoint rule on `cells^3`.
pub fn second_chern_s4(cells: usize) -> Result<f64> {
    if cells < 2 {
        return Err(Error::InvalidParameter(format!("S^3 grid needs at least 2 cells, got {cells}")));
    }
    let axes = [
        Axis::midpoint(0.0, PI, cells),
        Axis::midpoint(0.0, 2.0 * PI, cells),
        Axis::midpoint(0.0, 4.0 * PI, cells),
    ];
    let total = quadrature::integrate(&axes, |x| s3_density(&Euler::new(x[0], x[1], x[2])));
    Ok(total / (24.0 * PI * PI))
}
