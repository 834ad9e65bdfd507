//! Worked systems with closed-form phases: the two-level oscillator, the
//! spin-1/2 rotating field started in `|+1/2>`, and three spin-1 settings.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;

use num_complex::Complex64;

use crate::evolution::{ConstantHamiltonian, Hamiltonian, RotatingFieldHamiltonian, RotatingFieldParams, Spin};
use crate::hilbert::StateVector;
use crate::linalg::{c, CMatrix, CVector};
use crate::Result;

/// `H = diag(hbar omega/2, 3 hbar omega/2)` started at `(cos(theta/2), sin(theta/2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillator {
    pub theta: f64,
    pub omega: f64,
}

impl Oscillator {
    pub fn new(theta: f64, omega: f64) -> Self {
        Self { theta, omega }
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    pub fn hamiltonian(&self, hbar: f64) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_vec(vec![
            c(hbar * self.omega / 2.0, 0.0),
            c(1.5 * hbar * self.omega, 0.0),
        ]))
    }

    pub fn shared_hamiltonian(&self, hbar: f64) -> Arc<dyn Hamiltonian> {
        Arc::new(ConstantHamiltonian(self.hamiltonian(hbar)))
    }

    pub fn initial_state(&self) -> StateVector {
        let (s, co) = (self.theta / 2.0).sin_cos();
        StateVector::from_slice(&[c(co, 0.0), c(s, 0.0)]).expect("unit vector")
    }

    /// `e^{-i omega t/2} (cos(theta/2), sin(theta/2) e^{-i omega t})`.
    pub fn state(&self, t: f64) -> StateVector {
        let (s, co) = (self.theta / 2.0).sin_cos();
        let g = Complex64::from_polar(1.0, -self.omega * t / 2.0);
        let e = Complex64::from_polar(1.0, -self.omega * t);
        StateVector::from_slice(&[g * co, g * e * s]).expect("unit vector")
    }

    /// `int_0^t A = -omega t sin^2(theta/2)`; `pi (cos(theta) - 1)` over one period.
    pub fn geometric_phase(&self, t: f64) -> f64 {
        -self.omega * t * (self.theta / 2.0).sin().powi(2)
    }

    /// `omega t (1/2 + sin^2(theta/2))`; `(2 - cos(theta)) pi` over one period.
    pub fn dynamical_phase(&self, t: f64) -> f64 {
        self.omega * t * (0.5 + (self.theta / 2.0).sin().powi(2))
    }
}

/// Spin 1/2 in the rotating field, started at `(1, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinHalfField {
    pub params: RotatingFieldParams,
}

impl SpinHalfField {
    pub fn new(larmor: f64, alpha: f64, omega: f64) -> Result<Self> {
        Ok(Self {
            params: RotatingFieldParams::new(Spin::half(), larmor, alpha, omega)?,
        })
    }

    pub fn shared_hamiltonian(&self, hbar: f64) -> Arc<dyn Hamiltonian> {
        RotatingFieldHamiltonian::shared(self.params, hbar)
    }

    pub fn initial_state(&self) -> StateVector {
        StateVector::basis(2, 0).expect("two levels")
    }

    fn angles(&self) -> (f64, f64, f64) {
        (self.params.beta(), self.params.vartheta(), self.params.omega)
    }

    /// `A / dt` in chart 1 (`zeta = c^0 / c^1`).
    pub fn connection_rate(&self, t: f64) -> f64 {
        let (b, v, w) = self.angles();
        0.25 * (2.0 * v * b.cos() - w * (3.0 + (2.0 * b).cos() + 2.0 * (v * t).cos() * b.sin().powi(2)))
    }

    /// `(1/hbar) <Psi|H|Psi>`.
    pub fn energy(&self, t: f64) -> f64 {
        let (b, v, w) = self.angles();
        0.5 * (-v * b.cos() + w * b.cos().powi(2) + w * (v * t).cos() * b.sin().powi(2))
    }

    /// `A / dt + <H>/hbar`, identically `-omega/2`.
    pub fn total_rate(&self) -> f64 {
        -self.params.omega / 2.0
    }

    /// `<Psi(T)|Psi(t)>` in closed form.
    pub fn overlap(&self, t: f64, period: f64) -> Complex64 {
        let (b, v, w) = self.angles();
        let (st, ct) = (v * t / 2.0).sin_cos();
        let (sp, cp) = (v * period / 2.0).sin_cos();
        let first = Complex64::from_polar(1.0, t * w) * (b.sin().powi(2) * st * sp);
        let second = Complex64::from_polar(1.0, period * w) * (c(ct, b.cos() * st) * c(cp, -b.cos() * sp));
        Complex64::from_polar(1.0, -(t + period) * w / 2.0) * (first + second)
    }

    /// `(1 + zeta-bar(T) zeta(t)) / sqrt((1 + |zeta(T)|^2)(1 + |zeta(t)|^2))` in
    /// chart 1, continued smoothly through the zeros of `c^1`. The chart quotient
    /// itself carries an extra `sign(sin(vartheta t/2) sin(vartheta T/2))`.
    pub fn chart_overlap(&self, t: f64, period: f64) -> Complex64 {
        let (b, v, w) = self.angles();
        let (st, ct) = (v * t / 2.0).sin_cos();
        let (sp, cp) = (v * period / 2.0).sin_cos();
        let lead = c(b.sin().powi(2) * st * sp, 0.0);
        lead + Complex64::from_polar(1.0, -(t - period) * w) * (c(b.cos() * st, -ct) * c(b.cos() * sp, cp))
    }

    /// `int_t^T (A + <H> dt/hbar)`.
    pub fn phase_integral(&self, t: f64, period: f64) -> f64 {
        self.total_rate() * (period - t)
    }
}

/// Spin-1 settings with the field frequency and tilt fixed by `omega/(mu B/hbar)`
/// and `vartheta/(mu B/hbar)`; `mu B/hbar = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QutritCase {
    /// `vartheta = 5 omega`, `tan(beta) = 1`, one field period.
    One,
    /// `vartheta = sqrt(5/2) omega` over `2 sqrt(2) pi / omega`.
    Two,
    /// `vartheta = sqrt(5/2) omega` over thirty field periods.
    Three,
}

impl QutritCase {
    pub fn all() -> [QutritCase; 3] {
        [QutritCase::One, QutritCase::Two, QutritCase::Three]
    }

    pub fn label(self) -> &'static str {
        match self {
            QutritCase::One => "paper-1",
            QutritCase::Two => "paper-2",
            QutritCase::Three => "paper-3",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Self::all().into_iter().find(|k| k.label() == s)
    }

    /// `(omega, vartheta)` in units of `mu B / hbar`.
    pub fn frequencies(self) -> (f64, f64) {
        match self {
            QutritCase::One => {
                let w = 1.0 / (26.0 - 5.0 * 2.0_f64.sqrt()).sqrt();
                (w, 5.0 * w)
            }
            QutritCase::Two | QutritCase::Three => {
                let w = 1.0 / (3.5 - 5.0_f64.sqrt()).sqrt();
                (w, (2.5_f64).sqrt() * w)
            }
        }
    }

    /// Field parameters with `mu B / hbar = 1`. The tilt follows from
    /// `vartheta^2 = 1 + 2 omega cos(alpha) + omega^2`.
    pub fn params(self) -> RotatingFieldParams {
        let (w, v) = self.frequencies();
        let cos_alpha = (v * v - 1.0 - w * w) / (2.0 * w);
        RotatingFieldParams::new(Spin::one(), 1.0, cos_alpha.acos(), w).expect("valid case parameters")
    }

    pub fn period(self) -> f64 {
        let w = self.frequencies().0;
        match self {
            QutritCase::One => 2.0 * PI / w,
            QutritCase::Two => 2.0 * 2.0_f64.sqrt() * PI / w,
            QutritCase::Three => 30.0 * 2.0 * PI / w,
        }
    }

    /// `(0, 1/sqrt(2), 1/sqrt(2))` in the `m = 1, 0, -1` basis.
    pub fn initial_state(self) -> StateVector {
        StateVector::from_slice(&[c(0.0, 0.0), c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).expect("unit vector")
    }
}
