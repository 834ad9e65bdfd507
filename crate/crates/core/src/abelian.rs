//! The Kähler connection `A = Im(zeta-bar . d zeta) / |zeta|^2` on `CP^N`,
//! its line integrals along sampled trajectories, the phase budget
//!
//! ```text
//! phi(T) - phi(0) = -int A - (1/hbar) int <Psi|H|Psi> dt
//! ```
//!
//! and the overlap identity
//!
//! ```text
//! <Psi(T)|Psi(0)> = [zeta-bar(T) . zeta(0) / |zeta(T)| |zeta(0)|] exp(i int A + (i/hbar) int <H> dt).
//! ```
//!
//! Line integrals use, per sample interval, the rule
//! `Im(zeta-bar_a . zeta_b) / |(zeta_a + zeta_b)/2|^2`, which depends on
//! chart coordinates only (no phase unwrapping) and whose error expansion is
//! even in the step. Pairs of intervals are Richardson-combined, giving a
//! fourth-order rule. At a chart switch `eta -> xi` the accumulated integral
//! is shifted by `-arg(c^xi / c^eta)`, so that the budget above holds with
//! `phi(0)` read in the starting chart and `phi(T)` in the final one.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::evolution::{Hamiltonian, Trajectory};
use crate::hilbert::StateVector;
use crate::linalg::{self, c, wrap_angle, CMatrix, CVector, CompensatedSum};
use crate::quadrature::{self, Axis};
use crate::{tolerances, Error, Result};

/// Chart choice along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PatchPolicy {
    /// Always use this chart; singular samples are an error.
    Fixed(usize),
    /// Start in the largest-amplitude chart and move to the largest one
    /// whenever the current amplitude drops below the switching threshold.
    #[default]
    Auto,
}

/// Instantaneous `A / dt` along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionSample {
    pub time: f64,
    pub a_value: f64,
    pub patch: usize,
}

/// Decomposition of the fiber-phase change along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseBreakdown {
    /// `int A`, including the chart-switch shifts.
    pub geometric: f64,
    /// `(1/hbar) int <Psi|H|Psi> dt`.
    pub dynamical: f64,
    /// Unwrapped `phi(T) - phi(0)`, read from the sampled states.
    pub total_fiber: f64,
    pub start_patch: usize,
    pub end_patch: usize,
    pub switches: usize,
}

impl PhaseBreakdown {
    /// `total_fiber + geometric + dynamical`, zero up to quadrature error.
    pub fn residual(&self) -> f64 {
        self.total_fiber + self.geometric + self.dynamical
    }
}

/// Both sides of the overlap identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub error: f64,
}

/// `-i (zeta-bar . dzeta - zeta . dzeta-bar) / (2 zeta-bar . zeta)` before
/// discarding the (vanishing) imaginary part.
pub fn kahler_connection_complex(zeta: &CVector, dzeta: &CVector) -> Complex64 {
    let a = zeta.dotc(dzeta);
    let b = dzeta.dotc(zeta);
    c(0.0, -1.0) * (a - b) / (2.0 * zeta.norm_squared())
}

/// The Kähler connection evaluated on the tangent vector `dzeta`.
pub fn kahler_connection(zeta: &CVector, dzeta: &CVector) -> f64 {
    zeta.dotc(dzeta).im / zeta.norm_squared()
}

fn pivot(state: &CVector, patch: usize) -> Result<Complex64> {
    if patch >= state.len() {
        return Err(Error::PatchOutOfRange { patch, dim: state.len() });
    }
    let p = state[patch];
    if p.norm() <= tolerances::CHART_SINGULAR {
        return Err(Error::ChartSingular {
            patch,
            modulus: p.norm(),
        });
    }
    Ok(p)
}

fn chart_coords(state: &CVector, patch: usize) -> Result<CVector> {
    let p = pivot(state, patch)?;
    Ok(state / p)
}

/// `A / dt` at a state `c` moving with velocity `c_dot`, in chart `patch`.
pub fn connection_rate(state: &CVector, velocity: &CVector, patch: usize) -> Result<f64> {
    let p = pivot(state, patch)?;
    let pdot = velocity[patch];
    let zeta = state / p;
    let zeta_dot = (velocity * p - state * pdot) / (p * p);
    Ok(kahler_connection(&zeta, &zeta_dot))
}

/// One interval of the chart-difference rule.
fn interval_term(a: &CVector, b: &CVector) -> f64 {
    let mid = (a + b) * c(0.5, 0.0);
    a.dotc(b).im / mid.norm_squared()
}

/// Quadrature element: two intervals (`k..=k+2`) or a final single interval.
#[derive(Debug, Clone, Copy)]
struct Element {
    start: usize,
    end: usize,
}

fn elements(len: usize) -> Vec<Element> {
    let mut out = Vec::with_capacity(len / 2 + 1);
    let mut k = 0;
    while k + 2 < len {
        out.push(Element { start: k, end: k + 2 });
        k += 2;
    }
    if k + 1 < len {
        out.push(Element { start: k, end: k + 1 });
    }
    out
}

fn min_modulus(states: &[StateVector], patch: usize) -> f64 {
    states.iter().map(|s| s.amplitudes()[patch].norm()).fold(f64::INFINITY, f64::min)
}

fn best_patch(states: &[StateVector]) -> usize {
    let dim = states[0].dim();
    (0..dim)
        .map(|p| (p, min_modulus(states, p)))
        .fold((0, -1.0), |best, (p, m)| if m > best.1 { (p, m) } else { best })
        .0
}

/// Chart assigned to each quadrature element.
fn element_patches(traj: &Trajectory, policy: PatchPolicy, els: &[Element]) -> Result<Vec<usize>> {
    let states = traj.states();
    let mut out = Vec::with_capacity(els.len());
    match policy {
        PatchPolicy::Fixed(patch) => {
            for el in els {
                for s in &states[el.start..=el.end] {
                    pivot(s.amplitudes(), patch)?;
                }
                out.push(patch);
            }
        }
        PatchPolicy::Auto => {
            let mut current = crate::hilbert::select_chart(&states[0]);
            for el in els {
                let window = &states[el.start..=el.end];
                if min_modulus(window, current) < tolerances::AUTO_PATCH_SWITCH {
                    current = best_patch(window);
                }
                let modulus = min_modulus(window, current);
                if modulus <= tolerances::CHART_SINGULAR {
                    return Err(Error::ChartSingular { patch: current, modulus });
                }
                out.push(current);
            }
        }
    }
    Ok(out)
}

/// `arg(c^to / c^from)` at one sample.
fn switch_phase(state: &StateVector, from: usize, to: usize) -> f64 {
    let a = state.amplitudes();
    (a[to] / a[from]).arg()
}

struct LineIntegral {
    geometric: f64,
    total_fiber: f64,
    start_patch: usize,
    end_patch: usize,
    switches: usize,
}

fn line_integral(traj: &Trajectory, policy: PatchPolicy) -> Result<LineIntegral> {
    if traj.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            actual: traj.len(),
        });
    }
    let times = traj.times();
    let states = traj.states();
    let els = elements(traj.len());
    let patches = element_patches(traj, policy, &els)?;

    let mut geometric = CompensatedSum::new();
    let mut fiber = CompensatedSum::new();
    let mut switches = 0;
    for (i, (el, &patch)) in els.iter().zip(&patches).enumerate() {
        if i > 0 && patches[i - 1] != patch {
            let jump = switch_phase(&states[el.start], patches[i - 1], patch);
            geometric.add(-jump);
            fiber.add(jump);
            switches += 1;
        }
        let zeta: Vec<CVector> = states[el.start..=el.end]
            .iter()
            .map(|s| chart_coords(s.amplitudes(), patch))
            .collect::<Result<_>>()?;
        for k in el.start..el.end {
            let a = states[k].amplitudes()[patch];
            let b = states[k + 1].amplitudes()[patch];
            fiber.add((b / a).arg());
        }
        if zeta.len() == 3 {
            let fine = interval_term(&zeta[0], &zeta[1]) + interval_term(&zeta[1], &zeta[2]);
            let coarse = interval_term(&zeta[0], &zeta[2]);
            let h0 = times[el.start + 1] - times[el.start];
            let h1 = times[el.end] - times[el.start + 1];
            let l3 = (h0 + h1).powi(3);
            let w = l3 / (l3 - h0.powi(3) - h1.powi(3));
            geometric.add(w * fine + (1.0 - w) * coarse);
        } else {
            geometric.add(interval_term(&zeta[0], &zeta[1]));
        }
    }
    Ok(LineIntegral {
        geometric: geometric.value(),
        total_fiber: fiber.value(),
        start_patch: patches[0],
        end_patch: *patches.last().expect("non-empty"),
        switches,
    })
}

/// `int A` along `traj`, with chart-switch shifts.
pub fn connection_line_integral(traj: &Trajectory, policy: PatchPolicy) -> Result<f64> {
    Ok(line_integral(traj, policy)?.geometric)
}

/// Pointwise `A / dt`. Uses `dPsi/dt = -i H Psi / hbar` when the trajectory
/// carries its Hamiltonian, otherwise centered differences of the samples.
pub fn connection_samples(traj: &Trajectory, policy: PatchPolicy) -> Result<Vec<ConnectionSample>> {
    let times = traj.times();
    let states = traj.states();
    let n = traj.len();
    if traj.hamiltonian().is_none() && n < 2 {
        return Err(Error::TooFewSamples { needed: 2, actual: n });
    }
    let mut current = match policy {
        PatchPolicy::Fixed(p) => p,
        PatchPolicy::Auto => crate::hilbert::select_chart(&states[0]),
    };
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let psi = states[k].amplitudes();
        if policy == PatchPolicy::Auto && psi[current].norm() < tolerances::AUTO_PATCH_SWITCH {
            current = crate::hilbert::select_chart(&states[k]);
        }
        let velocity = match traj.hamiltonian() {
            Some(h) => {
                let m = h.at(times[k]);
                linalg::ensure_hermitian(&m)?;
                (m * psi) * c(0.0, -1.0 / traj.hbar())
            }
            None => {
                let (lo, hi) = (k.saturating_sub(1), (k + 1).min(n - 1));
                let a = states[lo].amplitudes();
                let b = states[hi].amplitudes();
                (b - a) / c(times[hi] - times[lo], 0.0)
            }
        };
        out.push(ConnectionSample {
            time: times[k],
            a_value: connection_rate(psi, &velocity, current)?,
            patch: current,
        });
    }
    Ok(out)
}

/// `(1/hbar) <Psi(t_k)|H(t_k)|Psi(t_k)>` at every sample.
pub fn energy_samples(traj: &Trajectory, hamiltonian: &dyn Hamiltonian) -> Result<Vec<f64>> {
    if hamiltonian.dim() != traj.dim() {
        return Err(Error::DimensionMismatch {
            expected: traj.dim(),
            actual: hamiltonian.dim(),
        });
    }
    traj.times()
        .iter()
        .zip(traj.states())
        .map(|(&t, s)| {
            let h: CMatrix = hamiltonian.at(t);
            linalg::ensure_hermitian(&h)?;
            Ok(linalg::expectation(&h, s.amplitudes()).re / traj.hbar())
        })
        .collect()
}

/// `(1/hbar) int <Psi|H|Psi> dt` by composite Simpson over the samples.
pub fn dynamical_phase(traj: &Trajectory, hamiltonian: &dyn Hamiltonian) -> Result<f64> {
    let e = energy_samples(traj, hamiltonian)?;
    if traj.len() < 2 {
        return Ok(0.0);
    }
    quadrature::simpson(traj.times(), &e)
}

pub fn phase_breakdown(traj: &Trajectory, hamiltonian: &dyn Hamiltonian, policy: PatchPolicy) -> Result<PhaseBreakdown> {
    let li = line_integral(traj, policy)?;
    Ok(PhaseBreakdown {
        geometric: li.geometric,
        dynamical: dynamical_phase(traj, hamiltonian)?,
        total_fiber: li.total_fiber,
        start_patch: li.start_patch,
        end_patch: li.end_patch,
        switches: li.switches,
    })
}

/// Chart regular at both ends, maximizing the smaller of the two amplitudes.
fn common_patch(a: &StateVector, b: &StateVector) -> Result<usize> {
    let p = best_patch(&[a.clone(), b.clone()]);
    let modulus = a.amplitudes()[p].norm().min(b.amplitudes()[p].norm());
    if modulus <= tolerances::CHART_SINGULAR {
        return Err(Error::ChartSingular { patch: p, modulus });
    }
    Ok(p)
}

/// `int A` re-expressed with both endpoints read in chart `patch`.
fn geometric_in_patch(traj: &Trajectory, li: &LineIntegral, patch: usize) -> f64 {
    li.geometric - switch_phase(traj.last(), li.end_patch, patch) + switch_phase(traj.first(), li.start_patch, patch)
}

/// Direct overlap `<Psi(T)|Psi(0)>` against the phase-integral formula.
pub fn overlap_identity_check(traj: &Trajectory, hamiltonian: &dyn Hamiltonian) -> Result<OverlapCheck> {
    let first = traj.first();
    let last = traj.last();
    let lhs = last.inner(first);
    let patch = common_patch(first, last)?;
    let z0 = chart_coords(first.amplitudes(), patch)?;
    let z1 = chart_coords(last.amplitudes(), patch)?;
    let projective = z1.dotc(&z0) / (z0.norm() * z1.norm());
    let exponent = if traj.len() < 2 {
        0.0
    } else {
        let li = line_integral(traj, PatchPolicy::Auto)?;
        geometric_in_patch(traj, &li, patch) + dynamical_phase(traj, hamiltonian)?
    };
    let rhs = projective * Complex64::from_polar(1.0, exponent);
    Ok(OverlapCheck {
        lhs,
        rhs,
        error: (lhs - rhs).norm(),
    })
}

/// `||zeta(T) - zeta(0)|| / ||zeta(0)||` in the chart of the initial state.
pub fn closure_gap(traj: &Trajectory) -> Result<f64> {
    let patch = crate::hilbert::select_chart(traj.first());
    let z0 = chart_coords(traj.first().amplitudes(), patch)?;
    let z1 = chart_coords(traj.last().amplitudes(), patch)?;
    Ok((&z1 - &z0).norm() / z0.norm())
}

/// `arg exp(i oint A)` for a path closed in `CP^N`, in `(-pi, pi]`.
pub fn geometric_phase_closed(traj: &Trajectory) -> Result<f64> {
    let gap = closure_gap(traj)?;
    if gap > tolerances::CLOSURE {
        return Err(Error::NotClosed { gap });
    }
    let li = line_integral(traj, PatchPolicy::Auto)?;
    Ok(wrap_angle(geometric_in_patch(traj, &li, li.start_patch)))
}

/// Qubit chart coordinates `(1, exp(i phi) tan(theta/2))`.
pub fn qubit_zeta(theta: f64, phi: f64) -> CVector {
    CVector::from_column_slice(&[c(1.0, 0.0), Complex64::from_polar((theta / 2.0).tan(), phi)])
}

/// `(1/2 pi) int F` with the monopole curvature `F = (1/2) sin(theta) dtheta dphi`.
pub fn chern_number_cp1(theta: Axis, phi: Axis) -> Result<f64> {
    if theta.cells < 16 || phi.cells < 16 {
        return Err(Error::InvalidParameter(format!(
            "CP^1 grid needs at least 16x16 cells, got {}x{}",
            theta.cells, phi.cells
        )));
    }
    Ok(quadrature::integrate(&[theta, phi], |p| 0.5 * p[0].sin()) / (2.0 * PI))
}

/// Full-sphere `CP^1` grid with two Gauss nodes per cell.
pub fn cp1_sphere(n: usize) -> (Axis, Axis) {
    (Axis::gauss2(0.0, PI, n), Axis::gauss2(0.0, 2.0 * PI, n))
}

/// `oint A` around the latitude `theta` (chart 0), using `n` samples.
pub fn latitude_holonomy(theta: f64, n: usize) -> f64 {
    let pts: Vec<CVector> = (0..=n).map(|k| qubit_zeta(theta, 2.0 * PI * k as f64 / n as f64)).collect();
    pts.windows(2).map(|w| interval_term(&w[0], &w[1])).collect::<CompensatedSum>().value()
}

/// Flux of `F` through the polar cap `[0, theta]`.
pub fn cap_flux(theta: f64, cells: usize) -> f64 {
    quadrature::integrate(&[Axis::gauss2(0.0, theta, cells), Axis::gauss2(0.0, 2.0 * PI, cells)], |p| {
        0.5 * p[0].sin()
    })
}

/// Angles on `S^5`; `gamma` is the combination `phi_3 - chi + phi`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CP2Point {
    pub theta1: f64,
    pub theta2: f64,
    pub phi: f64,
    pub gamma: f64,
}

/// `zeta = (1, exp(2 i phi) tan(theta1/2) cos(theta2/2), exp(i gamma) tan(theta1/2) sin(theta2/2))`.
pub fn cp2_zeta(p: &CP2Point) -> CVector {
    let t = (p.theta1 / 2.0).tan();
    CVector::from_column_slice(&[
        c(1.0, 0.0),
        Complex64::from_polar(t * (p.theta2 / 2.0).cos(), 2.0 * p.phi),
        Complex64::from_polar(t * (p.theta2 / 2.0).sin(), p.gamma),
    ])
}

/// `d zeta` along the tangent `dp`.
pub fn cp2_dzeta(p: &CP2Point, dp: &CP2Point) -> CVector {
    let t = (p.theta1 / 2.0).tan();
    let dt = 0.5 / (p.theta1 / 2.0).cos().powi(2);
    let (s2, c2) = (p.theta2 / 2.0).sin_cos();
    let e1 = Complex64::from_polar(1.0, 2.0 * p.phi);
    let e2 = Complex64::from_polar(1.0, p.gamma);
    let d1 = e1 * (dt * c2 * dp.theta1 - 0.5 * t * s2 * dp.theta2) + e1 * c(0.0, 2.0 * dp.phi) * (t * c2);
    let d2 = e2 * (dt * s2 * dp.theta1 + 0.5 * t * c2 * dp.theta2) + e2 * c(0.0, dp.gamma) * (t * s2);
    CVector::from_column_slice(&[c(0.0, 0.0), d1, d2])
}

/// `A = (1/4)(1 - cos theta1) [d(2 phi + gamma) + cos(theta2) d(2 phi - gamma)]`.
pub fn cp2_connection(p: &CP2Point, dp: &CP2Point) -> f64 {
    0.25 * (1.0 - p.theta1.cos())
        * ((2.0 * dp.phi + dp.gamma) + p.theta2.cos() * (2.0 * dp.phi - dp.gamma))
}

/// Partial derivatives `(dP/dtheta1, dP/dtheta2, dQ/dtheta1, dQ/dtheta2)` of
/// the components in `A = P dphi + Q dgamma`.
pub fn cp2_connection_partials(p: &CP2Point) -> [f64; 4] {
    let (s1, c1) = p.theta1.sin_cos();
    let (s2, c2) = p.theta2.sin_cos();
    [
        0.5 * s1 * (1.0 + c2),
        -0.5 * (1.0 - c1) * s2,
        0.25 * s1 * (1.0 - c2),
        0.25 * (1.0 - c1) * s2,
    ]
}

/// Coefficient of `dtheta1 ^ dphi ^ dtheta2 ^ dgamma` in `F ^ F`.
pub fn cp2_ff_density(p: &CP2Point) -> f64 {
    let [p1, p2, q1, q2] = cp2_connection_partials(p);
    2.0 * (p1 * q2 - p2 * q1)
}

/// `(1/4 pi^2) int F ^ F` by the midpoint rule on `cells^4` over
/// `theta1, theta2 in [0, pi]`, `phi in [0, pi)`, `gamma in [0, 2 pi)`.
///
/// `zeta^1` depends on `2 phi`, so `phi` covers `CP^2` once on `[0, pi)`.
pub fn cp2_second_chern(cells: usize) -> Result<f64> {
    if cells < 2 {
        return Err(Error::InvalidParameter(format!("CP^2 grid needs at least 2 cells, got {cells}")));
    }
    let axes = [
        Axis::midpoint(0.0, PI, cells),
        Axis::midpoint(0.0, PI, cells),
        Axis::midpoint(0.0, PI, cells),
        Axis::midpoint(0.0, 2.0 * PI, cells),
    ];
    let total = quadrature::integrate(&axes, |x| {
        cp2_ff_density(&CP2Point {
            theta1: x[0],
            phi: x[1],
            theta2: x[2],
            gamma: x[3],
        })
    });
    Ok(total / (4.0 * PI * PI))
}
