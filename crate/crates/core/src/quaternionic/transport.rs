//! `SU(2)` connection, holonomy and fiber transport.
//!
//! With `Q^a = fiber k^a`, `k^a = h^a / sqrt(sum |h|^2)`, Schrödinger
//! evolution moves the fiber as
//!
//! ```text
//! fiber(T) = T exp((i/hbar) int Heff dt) fiber(0) [T exp(-i int A)]^dagger
//! ```
//!
//! where `A = (h dh^dagger - dh h^dagger) / (i Tr(h h^dagger))` (summed over
//! components) and `Heff` is the 2x2 matrix built from `<Psi|H|Psi>` and
//! `<Psi^perp|H|Psi>` along the trajectory. Time-ordered products keep later
//! factors on the left.

use num_complex::Complex64;

use super::{hp_project, perpendicular_state, projector_minus, quaternions_from_state, select_hp_chart, HPChartPoint, Quaternion};
use crate::evolution::{Hamiltonian, Trajectory};
use crate::hilbert::StateVector;
use crate::linalg::{self, c, max_abs_diff2, CMatrix, CMatrix2, I};
use crate::{tolerances, Error, Result};

/// Quaternionic Kähler connection `(dh h^dagger - h dh^dagger) / (i Tr(h h^dagger))`.
/// Hermitian and traceless.
pub fn quaternionic_connection(h: &[Quaternion], dh: &[Quaternion]) -> CMatrix2 {
    -nonabelian_connection(h, dh)
}

/// `(h dh^dagger - dh h^dagger) / (i Tr(h h^dagger))`, the negative of
/// [`quaternionic_connection`]; holonomies are `T exp(-i int A)`.
pub fn nonabelian_connection(h: &[Quaternion], dh: &[Quaternion]) -> CMatrix2 {
    let mut num = CMatrix2::zeros();
    let mut tr = 0.0;
    for (x, d) in h.iter().zip(dh) {
        let y = x.0 * d.0.adjoint();
        num += y - y.adjoint();
        tr += 2.0 * x.norm_sqr();
    }
    num * (-I / tr)
}

fn pauli_coordinates(m: &CMatrix2) -> [f64; 3] {
    let off = 0.5 * (m[(1, 0)] + m[(0, 1)].conj());
    [off.re, off.im, 0.5 * (m[(0, 0)] - m[(1, 1)]).re]
}

/// `exp(i M)` for a traceless Hermitian 2x2 `M`, in closed form.
pub fn su2_exp(m: &CMatrix2) -> CMatrix2 {
    let a = pauli_coordinates(m);
    let r = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    let sinc = if r < 1e-8 { 1.0 - r * r / 6.0 } else { r.sin() / r };
    let s = c(0.0, sinc);
    CMatrix2::new(
        c(r.cos(), 0.0) + s * a[2],
        s * c(a[0], -a[1]),
        s * c(a[0], a[1]),
        c(r.cos(), 0.0) - s * a[2],
    )
}

/// Accumulated `T exp(-i int A)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SU2Holonomy {
    pub matrix: CMatrix2,
}

impl SU2Holonomy {
    pub fn det(&self) -> Complex64 {
        self.matrix.determinant()
    }

    pub fn unitarity_defect(&self) -> f64 {
        linalg::unitarity_defect2(&self.matrix)
    }

    /// Half rotation angle `phi` of the conjugacy class, `Tr = 2 cos(phi)`.
    pub fn class_angle(&self) -> f64 {
        (0.5 * self.matrix.trace().re).clamp(-1.0, 1.0).acos()
    }
}

fn midpoint_connection(a: &[Quaternion], b: &[Quaternion]) -> CMatrix2 {
    let mid: Vec<Quaternion> = a.iter().zip(b).map(|(x, y)| (*x + *y).scale(0.5)).collect();
    let diff: Vec<Quaternion> = a.iter().zip(b).map(|(x, y)| *y - *x).collect();
    nonabelian_connection(&mid, &diff)
}

/// `T exp(-i int A)` along chart points of one patch, one midpoint factor per interval.
pub fn nonabelian_holonomy(points: &[HPChartPoint]) -> Result<SU2Holonomy> {
    if points.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            actual: points.len(),
        });
    }
    let patch = points[0].patch;
    let mut v = CMatrix2::identity();
    for w in points.windows(2) {
        if w[1].patch != patch {
            return Err(Error::InvalidParameter("holonomy points must share one chart".into()));
        }
        v = su2_exp(&(-midpoint_connection(&w[0].h, &w[1].h))) * v;
    }
    Ok(SU2Holonomy { matrix: v })
}

/// `Heff = <H> sigma^1 - Im<perp|H|Psi> sigma^2 + Re<perp|H|Psi> sigma^3`.
pub fn effective_hamiltonian(psi: &StateVector, psi_perp: &StateVector, h: &CMatrix) -> Result<CMatrix2> {
    linalg::ensure_hermitian(h)?;
    if h.nrows() != psi.dim() || psi_perp.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: psi.dim(),
            actual: h.nrows(),
        });
    }
    let h_psi = h * psi.amplitudes();
    let e = psi.amplitudes().dotc(&h_psi).re;
    let b = psi_perp.amplitudes().dotc(&h_psi);
    Ok(CMatrix2::new(c(b.re, 0.0), c(e, b.im), c(e, -b.im), c(-b.re, 0.0)))
}

struct Transport {
    /// `T exp((i/hbar) int Heff dt)`.
    left: CMatrix2,
    /// `T exp(-i int A)` with chart-switch corrections.
    right: CMatrix2,
    start: HPChartPoint,
    end: HPChartPoint,
}

fn effective_at(state: &StateVector, h: &CMatrix) -> Result<CMatrix2> {
    effective_hamiltonian(state, &perpendicular_state(state)?, h)
}

fn transport(traj: &Trajectory, hamiltonian: &dyn Hamiltonian) -> Result<Transport> {
    if hamiltonian.dim() != traj.dim() {
        return Err(Error::DimensionMismatch {
            expected: traj.dim(),
            actual: hamiltonian.dim(),
        });
    }
    let times = traj.times();
    let states = traj.states();
    let quats: Vec<Vec<Quaternion>> = states.iter().map(quaternions_from_state).collect::<Result<_>>()?;

    let mut patch = select_hp_chart(&quats[0]);
    let mut point = hp_project(&quats[0], patch)?;
    let start = point.clone();
    let mut left = CMatrix2::identity();
    let mut right = CMatrix2::identity();
    let mut heff = effective_at(&states[0], &hamiltonian.at(times[0]))?;
    for k in 1..traj.len() {
        let q = &quats[k];
        if q[patch].norm() < tolerances::AUTO_PATCH_SWITCH {
            // Switch at the previous sample: fiber_new = fiber_old g enters as g^dagger.
            patch = select_hp_chart(q);
            let prev = hp_project(&quats[k - 1], patch)?;
            let g = point.fiber.0.adjoint() * prev.fiber.0;
            right = g.adjoint() * right;
            point = prev;
        }
        let next = hp_project(q, patch)?;
        right = su2_exp(&(-midpoint_connection(&point.h, &next.h))) * right;

        let heff_next = effective_at(&states[k], &hamiltonian.at(times[k]))?;
        let dt = times[k] - times[k - 1];
        left = su2_exp(&((heff + heff_next) * c(0.5 * dt / traj.hbar(), 0.0))) * left;
        heff = heff_next;
        point = next;
    }
    Ok(Transport {
        left,
        right,
        start,
        end: point,
    })
}

/// Both sides of the non-Abelian overlap identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonAbelianOverlap {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub error: f64,
}

/// `<Psi(T)|Psi(0)>` against
/// `sum_a Tr(k^a(T)^dagger V fiber(0)^dagger L^dagger P^- fiber(0) k^a(0))`.
pub fn nonabelian_overlap_check(traj: &Trajectory, hamiltonian: &dyn Hamiltonian) -> Result<NonAbelianOverlap> {
    let lhs = traj.last().inner(traj.first());
    let t = transport(traj, hamiltonian)?;
    let q0 = t.start.fiber.0;
    let middle = t.right * q0.adjoint() * t.left.adjoint() * projector_minus() * q0;
    let rhs = t
        .end
        .normalized_h()
        .iter()
        .zip(t.start.normalized_h())
        .map(|(kt, k0)| (kt.0.adjoint() * middle * k0.0).trace())
        .sum();
    Ok(NonAbelianOverlap {
        lhs,
        rhs,
        error: (lhs - rhs).norm(),
    })
}

/// Transported fiber against the fiber read from the final state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberCheck {
    pub predicted: CMatrix2,
    pub actual: CMatrix2,
    pub error: f64,
    pub holonomy: SU2Holonomy,
}

pub fn fiber_reconstruction_check(traj: &Trajectory, hamiltonian: &dyn Hamiltonian) -> Result<FiberCheck> {
    let t = transport(traj, hamiltonian)?;
    let predicted = t.left * t.start.fiber.0 * t.right.adjoint();
    let actual = t.end.fiber.0;
    Ok(FiberCheck {
        predicted,
        actual,
        error: max_abs_diff2(&predicted, &actual),
        holonomy: SU2Holonomy { matrix: t.right },
    })
}
