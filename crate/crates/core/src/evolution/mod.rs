//! Time evolution: Hamiltonian handles, sampled trajectories, the fixed-step
//! Schrödinger integrator and the time-ordered propagator.

mod spin;

pub use spin::{
    analytic_evolution_spin1, analytic_evolution_spin_half, analytic_evolution_spin_j,
    angular_momentum_matrices, derived_angles, periodicity_check, rotating_field_hamiltonian,
    DerivedAngles, Periodicity, RotatingFieldHamiltonian, RotatingFieldParams, Spin,
};

use std::fmt;
use std::sync::Arc;

use crate::hilbert::StateVector;
use crate::linalg::{self, CMatrix, CVector};
use crate::{tolerances, Error, Result};

/// Default value of the reduced Planck constant.
pub const HBAR: f64 = 1.0;

/// A possibly time-dependent Hermitian operator `H(t)`.
pub trait Hamiltonian: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn at(&self, t: f64) -> CMatrix;
}

/// `H(t) = H`.
#[derive(Debug, Clone)]
pub struct ConstantHamiltonian(pub CMatrix);

impl Hamiltonian for ConstantHamiltonian {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn at(&self, _t: f64) -> CMatrix {
        self.0.clone()
    }
}

/// `H(t) = H0 + sin(omega t) H1`.
#[derive(Debug, Clone)]
pub struct SinusoidalHamiltonian {
    pub h0: CMatrix,
    pub h1: CMatrix,
    pub omega: f64,
}

impl Hamiltonian for SinusoidalHamiltonian {
    fn dim(&self) -> usize {
        self.h0.nrows()
    }

    fn at(&self, t: f64) -> CMatrix {
        &self.h0 + &self.h1 * linalg::c((self.omega * t).sin(), 0.0)
    }
}

/// Time-ordered samples `(t_k, Psi(t_k))`, optionally tagged with the
/// Hamiltonian that generated them.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<StateVector>,
    hamiltonian: Option<Arc<dyn Hamiltonian>>,
    hbar: f64,
    norm_drift: f64,
}

impl Trajectory {
    /// Builds a trajectory from explicit samples (no Hamiltonian attached).
    pub fn from_samples(times: Vec<f64>, states: Vec<StateVector>) -> Result<Self> {
        Self::build(times, states, None, HBAR, 0.0)
    }

    pub fn with_hamiltonian(
        times: Vec<f64>,
        states: Vec<StateVector>,
        hamiltonian: Arc<dyn Hamiltonian>,
        hbar: f64,
    ) -> Result<Self> {
        Self::build(times, states, Some(hamiltonian), hbar, 0.0)
    }

    fn build(
        times: Vec<f64>,
        states: Vec<StateVector>,
        hamiltonian: Option<Arc<dyn Hamiltonian>>,
        hbar: f64,
        norm_drift: f64,
    ) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                actual: states.len(),
            });
        }
        if times.is_empty() {
            return Err(Error::TooFewSamples { needed: 1, actual: 0 });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("trajectory times must be strictly increasing".into()));
        }
        if !(hbar > 0.0) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        let dim = states[0].dim();
        for s in &states {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: s.dim(),
                });
            }
            if (s.norm() - 1.0).abs() > tolerances::TRAJECTORY_NORMALIZATION {
                return Err(Error::InvalidParameter(format!("trajectory state has norm {}", s.norm())));
            }
        }
        if let Some(h) = &hamiltonian {
            if h.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: h.dim(),
                });
            }
        }
        Ok(Self {
            times,
            states,
            hamiltonian,
            hbar,
            norm_drift,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn hamiltonian(&self) -> Option<&Arc<dyn Hamiltonian>> {
        self.hamiltonian.as_ref()
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Accumulated `|  |Psi| - 1 |` removed by per-step renormalization.
    pub fn norm_drift(&self) -> f64 {
        self.norm_drift
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn first(&self) -> &StateVector {
        &self.states[0]
    }

    pub fn last(&self) -> &StateVector {
        self.states.last().expect("non-empty trajectory")
    }

    /// Samples `0..=end` as a new trajectory.
    pub fn truncated(&self, end: usize) -> Trajectory {
        Trajectory {
            times: self.times[..=end].to_vec(),
            states: self.states[..=end].to_vec(),
            hamiltonian: self.hamiltonian.clone(),
            hbar: self.hbar,
            norm_drift: self.norm_drift,
        }
    }

    /// Applies `Psi(t) -> exp(i chi(t)) Psi(t)` sample-wise.
    pub fn with_time_dependent_phase(&self, chi: impl Fn(f64) -> f64) -> Trajectory {
        let states = self
            .times
            .iter()
            .zip(&self.states)
            .map(|(&t, s)| s.with_global_phase(chi(t)))
            .collect();
        Trajectory {
            times: self.times.clone(),
            states,
            hamiltonian: None,
            hbar: self.hbar,
            norm_drift: self.norm_drift,
        }
    }
}

fn schrodinger_rhs(h: &CMatrix, psi: &CVector, hbar: f64) -> CVector {
    (h * psi) * linalg::c(0.0, -1.0 / hbar)
}

fn checked_at(h: &dyn Hamiltonian, t: f64) -> Result<CMatrix> {
    let m = h.at(t);
    linalg::ensure_hermitian(&m)?;
    Ok(m)
}

/// Integrates `i hbar dPsi/dt = H(t) Psi` from `t = 0` to `t_final` with
/// `steps` classical RK4 steps, renormalizing after every step.
pub fn integrate_schrodinger(
    hamiltonian: Arc<dyn Hamiltonian>,
    psi0: &StateVector,
    t_final: f64,
    steps: usize,
    hbar: f64,
) -> Result<Trajectory> {
    if steps < 10 {
        return Err(Error::InvalidParameter(format!("steps must be >= 10, got {steps}")));
    }
    if !(t_final > 0.0) || !t_final.is_finite() {
        return Err(Error::InvalidParameter(format!("final time must be positive, got {t_final}")));
    }
    if hamiltonian.dim() != psi0.dim() {
        return Err(Error::DimensionMismatch {
            expected: psi0.dim(),
            actual: hamiltonian.dim(),
        });
    }
    let dt = t_final / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut psi = psi0.amplitudes().clone();
    let mut drift = 0.0;
    times.push(0.0);
    states.push(psi0.clone());

    let mut h_start = checked_at(hamiltonian.as_ref(), 0.0)?;
    for k in 0..steps {
        let t = k as f64 * dt;
        let h_mid = checked_at(hamiltonian.as_ref(), t + 0.5 * dt)?;
        let t_next = if k + 1 == steps { t_final } else { (k + 1) as f64 * dt };
        let h_end = checked_at(hamiltonian.as_ref(), t_next)?;

        let k1 = schrodinger_rhs(&h_start, &psi, hbar);
        let k2 = schrodinger_rhs(&h_mid, &(&psi + &k1 * linalg::c(0.5 * dt, 0.0)), hbar);
        let k3 = schrodinger_rhs(&h_mid, &(&psi + &k2 * linalg::c(0.5 * dt, 0.0)), hbar);
        let k4 = schrodinger_rhs(&h_end, &(&psi + &k3 * linalg::c(dt, 0.0)), hbar);
        psi += (k1 + k2 * linalg::c(2.0, 0.0) + k3 * linalg::c(2.0, 0.0) + k4) * linalg::c(dt / 6.0, 0.0);

        let norm = psi.norm();
        drift += (norm - 1.0).abs();
        psi.unscale_mut(norm);
        times.push(t_next);
        states.push(StateVector::normalize(psi.clone())?);
        h_start = h_end;
    }
    Trajectory::build(times, states, Some(hamiltonian), hbar, drift)
}

/// `T exp(-i/hbar int_0^t H)` as a product of midpoint exponentials
/// `exp(-i H(t_k + dt/2) dt / hbar)`.
pub fn time_ordered_propagator(
    hamiltonian: &dyn Hamiltonian,
    t_final: f64,
    steps: usize,
    hbar: f64,
) -> Result<CMatrix> {
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be positive".into()));
    }
    let n = hamiltonian.dim();
    let dt = t_final / steps as f64;
    let mut u = CMatrix::identity(n, n);
    for k in 0..steps {
        let h = checked_at(hamiltonian, (k as f64 + 0.5) * dt)?;
        u = linalg::unitary_step(&h, dt, hbar) * u;
    }
    Ok(u)
}

/// `<Psi(t_k)| J_i |Psi(t_k)>` for each sample.
pub fn expectation_j(traj: &Trajectory, j: &[CMatrix; 3]) -> Result<Vec<[f64; 3]>> {
    for m in j {
        if m.nrows() != traj.dim() || m.ncols() != traj.dim() {
            return Err(Error::DimensionMismatch {
                expected: traj.dim(),
                actual: m.nrows(),
            });
        }
    }
    Ok(traj
        .states()
        .iter()
        .map(|s| {
            let psi = s.amplitudes();
            [
                linalg::expectation(&j[0], psi).re,
                linalg::expectation(&j[1], psi).re,
                linalg::expectation(&j[2], psi).re,
            ]
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn oscillator(omega: f64, hbar: f64) -> Arc<dyn Hamiltonian> {
        let h = CMatrix::from_diagonal(&CVector::from_column_slice(&[
            c(0.5 * hbar * omega, 0.0),
            c(1.5 * hbar * omega, 0.0),
        ]));
        Arc::new(ConstantHamiltonian(h))
    }

    #[test]
    fn zero_hamiltonian_is_stationary() {
        let h: Arc<dyn Hamiltonian> = Arc::new(ConstantHamiltonian(CMatrix::zeros(3, 3)));
        let psi = StateVector::from_slice(&[c(0.3, 0.1), c(-0.2, 0.5), c(0.7, 0.0)]).unwrap();
        let traj = integrate_schrodinger(h, &psi, 2.0, 50, HBAR).unwrap();
        for s in traj.states() {
            assert!(s.max_abs_diff(&psi) < 1e-15);
        }
    }

    #[test]
    fn oscillator_matches_closed_form() {
        let (omega, theta, hbar) = (1.3, 0.8_f64, 1.0);
        let psi = StateVector::from_slice(&[c((theta / 2.0).cos(), 0.0), c((theta / 2.0).sin(), 0.0)]).unwrap();
        let traj = integrate_schrodinger(oscillator(omega, hbar), &psi, 5.0, 10_000, hbar).unwrap();
        for (t, s) in traj.times().iter().zip(traj.states()) {
            let g = num_complex::Complex64::from_polar(1.0, -omega * t / 2.0);
            let expected = [
                g * (theta / 2.0).cos(),
                g * num_complex::Complex64::from_polar((theta / 2.0).sin(), -omega * t),
            ];
            assert!((s.amplitudes()[0] - expected[0]).norm() < 1e-8);
            assert!((s.amplitudes()[1] - expected[1]).norm() < 1e-8);
        }
        assert!(traj.norm_drift() < 1e-8);
    }

    #[test]
    fn hbar_scales_out_of_oscillator_dynamics() {
        let psi = StateVector::from_slice(&[c(0.6, 0.0), c(0.8, 0.0)]).unwrap();
        let a = integrate_schrodinger(oscillator(1.0, 1.0), &psi, 1.0, 100, 1.0).unwrap();
        let b = integrate_schrodinger(oscillator(1.0, 0.25), &psi, 1.0, 100, 0.25).unwrap();
        assert!(a.last().max_abs_diff(b.last()) < 1e-13);
    }

    #[test]
    fn integrator_rejects_bad_input() {
        let psi = StateVector::from_slice(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(
            integrate_schrodinger(oscillator(1.0, 1.0), &psi, 1.0, 5, HBAR),
            Err(Error::InvalidParameter(_))
        ));
        let bad: Arc<dyn Hamiltonian> = Arc::new(ConstantHamiltonian(CMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        )));
        assert!(matches!(
            integrate_schrodinger(bad, &psi, 1.0, 10, HBAR),
            Err(Error::NonHermitian { .. })
        ));
    }

    #[test]
    fn propagator_of_constant_hamiltonian_is_exact() {
        let h = oscillator(2.0, 1.0);
        let u = time_ordered_propagator(h.as_ref(), 0.7, 3, 1.0).unwrap();
        assert!((u[(0, 0)] - num_complex::Complex64::from_polar(1.0, -0.7)).norm() < 1e-14);
        assert!((u[(1, 1)] - num_complex::Complex64::from_polar(1.0, -2.1)).norm() < 1e-14);
    }

    #[test]
    fn trajectory_validation() {
        let s = StateVector::basis(2, 0).unwrap();
        assert!(Trajectory::from_samples(vec![0.0, 0.0], vec![s.clone(), s.clone()]).is_err());
        assert!(Trajectory::from_samples(vec![0.0], vec![]).is_err());
        assert!(Trajectory::from_samples(vec![0.0, 1.0], vec![s.clone(), s]).is_ok());
    }
}
