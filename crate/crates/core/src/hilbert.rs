//! Pure states of `(N+1)`-level systems and their `CP^N` chart coordinates.
//!
//! A normalized amplitude vector `c` is a point of `S^{2N+1}`. In the chart
//! `U_eta` (where `c^eta != 0`) it is described by inhomogeneous coordinates
//! `zeta^a = c^a / c^eta` together with the fiber phase `arg c^eta`:
//!
//! ```text
//! c^a = exp(i phi_eta) zeta^a / |zeta|
//! ```
//!
//! Everything here is a pure function over immutable values.

use num_complex::Complex64;

use crate::linalg::{wrap_angle, CVector};
use crate::{tolerances, Error, Result};

/// Normalized complex amplitudes `c^a`, `a = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    /// Normalizes `z`. Fails on vectors shorter than 2 or with vanishing norm.
    pub fn normalize(z: CVector) -> Result<Self> {
        if z.len() < 2 {
            return Err(Error::TooShort(z.len()));
        }
        let norm = z.norm();
        if !(norm >= tolerances::ZERO_NORM) {
            return Err(Error::ZeroVector { norm });
        }
        Ok(Self {
            amplitudes: z.unscale(norm),
        })
    }

    pub fn from_slice(z: &[Complex64]) -> Result<Self> {
        Self::normalize(CVector::from_column_slice(z))
    }

    /// Basis vector `|k>` of an `n`-level system.
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::PatchOutOfRange { patch: k, dim: n });
        }
        let mut z = CVector::zeros(n);
        z[k] = Complex64::new(1.0, 0.0);
        Self::normalize(z)
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    /// Number of levels `N+1`.
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `exp(i chi) |self>`.
    pub fn with_global_phase(&self, chi: f64) -> Self {
        Self {
            amplitudes: &self.amplitudes * Complex64::from_polar(1.0, chi),
        }
    }

    /// Largest entry modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Inhomogeneous `CP^N` coordinates in chart `patch` plus the fiber phase.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    pub patch: usize,
    /// `zeta[patch] == 1` exactly.
    pub zeta: CVector,
    /// `arg c^patch` in `(-pi, pi]`.
    pub fiber_phase: f64,
}

impl ChartPoint {
    /// `sum |zeta^a|^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.zeta.norm_squared()
    }
}

/// Complex scaling `z^xi / z^eta = R exp(i phi)` between overlapping charts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionFunction {
    pub modulus: f64,
    pub phase: f64,
}

impl TransitionFunction {
    pub fn from_complex(z: Complex64) -> Self {
        let (modulus, phase) = z.to_polar();
        Self { modulus, phase }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.modulus, self.phase)
    }
}

fn check_patch(patch: usize, dim: usize) -> Result<()> {
    if patch >= dim {
        return Err(Error::PatchOutOfRange { patch, dim });
    }
    Ok(())
}

/// `z / |z|`; thin wrapper over [`StateVector::normalize`].
pub fn normalize(z: CVector) -> Result<StateVector> {
    StateVector::normalize(z)
}

/// Projects `c` to chart `patch`: `zeta^a = c^a / c^patch`, phase `arg c^patch`.
pub fn hopf_project(c: &StateVector, patch: usize) -> Result<ChartPoint> {
    check_patch(patch, c.dim())?;
    let pivot = c.amplitudes[patch];
    let modulus = pivot.norm();
    if modulus <= tolerances::CHART_SINGULAR {
        return Err(Error::ChartSingular { patch, modulus });
    }
    let mut zeta = c.amplitudes.map(|a| a / pivot);
    zeta[patch] = Complex64::new(1.0, 0.0);
    Ok(ChartPoint {
        patch,
        zeta,
        fiber_phase: pivot.arg(),
    })
}

/// Re-expresses `p` in chart `new_patch`, returning the transition function
/// `zeta_old^{new_patch} = c^{new} / c^{old}`.
pub fn chart_transition(p: &ChartPoint, new_patch: usize) -> Result<(ChartPoint, TransitionFunction)> {
    check_patch(new_patch, p.zeta.len())?;
    let pivot = p.zeta[new_patch];
    // |c^new| = |zeta^new| / |zeta|
    let modulus = pivot.norm() / p.zeta.norm();
    if modulus <= tolerances::CHART_SINGULAR {
        return Err(Error::ChartSingular {
            patch: new_patch,
            modulus,
        });
    }
    let mut zeta = p.zeta.map(|a| a / pivot);
    zeta[new_patch] = Complex64::new(1.0, 0.0);
    let transition = TransitionFunction::from_complex(pivot);
    Ok((
        ChartPoint {
            patch: new_patch,
            zeta,
            fiber_phase: wrap_angle(p.fiber_phase + transition.phase),
        },
        transition,
    ))
}

/// Inverse of [`hopf_project`]: `c = exp(i phi) zeta / |zeta|`.
pub fn reconstruct_state(p: &ChartPoint) -> StateVector {
    let scale = Complex64::from_polar(1.0 / p.zeta.norm(), p.fiber_phase);
    StateVector {
        amplitudes: &p.zeta * scale,
    }
}

/// Index of the largest-modulus amplitude, lowest index on ties.
pub fn select_chart(c: &StateVector) -> usize {
    let mut best = 0;
    let mut best_mod = c.amplitudes[0].norm();
    for (k, a) in c.amplitudes.iter().enumerate().skip(1) {
        if a.norm() > best_mod {
            best = k;
            best_mod = a.norm();
        }
    }
    best
}
