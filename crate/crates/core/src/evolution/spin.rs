//! Spin-J particle in a magnetic field of strength `B` tilted by `alpha` and
//! rotating about the z axis at angular velocity `omega`.
//!
//! With `V = exp(i omega t J_3)` the Hamiltonian is `H(t) = V^dagger H(0) V`
//! and the propagator factorizes as
//!
//! ```text
//! U(t) = V^dagger exp{ i [Omega tan(beta) J_1 + Omega J_3] t }
//!      = exp(-i omega t J_z) exp(-i gamma J_z) exp(-i beta' J_y) exp(-i alpha' J_z)
//! ```
//!
//! where `Omega = (mu B / hbar) cos(alpha) + omega`,
//! `Omega tan(beta) = (mu B / hbar) sin(alpha)` and the time-dependent Euler
//! angles `(gamma, beta', alpha')` follow from [`derived_angles`].
//!
//! Matrices are in the `|J, M>` basis with index 0 holding `M = J`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::Hamiltonian;
use crate::linalg::{c, CMatrix, ONE, ZERO};
use crate::{tolerances, Error, Result};

/// Spin quantum number stored as `2J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Spin {
    twice_j: u32,
}

impl Spin {
    pub fn from_twice(twice_j: u32) -> Result<Self> {
        if twice_j == 0 {
            return Err(Error::InvalidParameter("spin must be at least 1/2".into()));
        }
        if twice_j as usize + 1 > tolerances::MAX_SPIN_DIMENSION {
            return Err(Error::DimensionTooLarge { twice_j });
        }
        Ok(Self { twice_j })
    }

    /// Parses a half-integer such as `0.5`, `1` or `1.5`.
    pub fn from_f64(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !(twice >= 0.5) || (twice - twice.round()).abs() > 1e-9 || twice > 1e6 {
            return Err(Error::InvalidParameter(format!("J = {j} is not a positive half-integer")));
        }
        Self::from_twice(twice.round() as u32)
    }

    pub const fn half() -> Self {
        Self { twice_j: 1 }
    }

    pub const fn one() -> Self {
        Self { twice_j: 2 }
    }

    pub fn twice_j(self) -> u32 {
        self.twice_j
    }

    pub fn j(self) -> f64 {
        self.twice_j as f64 / 2.0
    }

    pub fn dim(self) -> usize {
        self.twice_j as usize + 1
    }

    /// Magnetic quantum number of basis index `k`.
    pub fn m(self, k: usize) -> f64 {
        self.j() - k as f64
    }
}

/// `(J_1, J_2, J_3)` including the factor `hbar`.
pub fn angular_momentum_matrices(spin: Spin, hbar: f64) -> [CMatrix; 3] {
    let n = spin.dim();
    let j = spin.j();
    let mut j_plus = CMatrix::zeros(n, n);
    // J+ |M> = hbar sqrt(J(J+1) - M(M+1)) |M+1>; index k-1 carries M+1.
    for k in 1..n {
        let m = spin.m(k);
        j_plus[(k - 1, k)] = c(hbar * (j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let j_minus = j_plus.adjoint();
    let j1 = (&j_plus + &j_minus) * c(0.5, 0.0);
    let j2 = (&j_plus - &j_minus) * c(0.0, -0.5);
    let j3 = CMatrix::from_fn(n, n, |r, col| if r == col { c(hbar * spin.m(r), 0.0) } else { ZERO });
    [j1, j2, j3]
}

/// Field parameters: spin, Larmor frequency `mu B / hbar`, tilt `alpha`,
/// rotation frequency `omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatingFieldParams {
    pub spin: Spin,
    pub larmor: f64,
    pub alpha: f64,
    pub omega: f64,
}

impl RotatingFieldParams {
    pub fn new(spin: Spin, larmor: f64, alpha: f64, omega: f64) -> Result<Self> {
        let p = Self {
            spin,
            larmor,
            alpha,
            omega,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.larmor > 0.0) || !self.larmor.is_finite() {
            return Err(Error::InvalidParameter(format!("larmor frequency must be positive, got {}", self.larmor)));
        }
        if !(0.0..=PI).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!("alpha must lie in [0, pi], got {}", self.alpha)));
        }
        if !self.omega.is_finite() {
            return Err(Error::InvalidParameter("omega must be finite".into()));
        }
        Ok(())
    }

    /// `Omega = (mu B/hbar) cos(alpha) + omega`.
    pub fn big_omega(&self) -> f64 {
        self.larmor * self.alpha.cos() + self.omega
    }

    /// `beta` in `[0, pi]` with `Omega tan(beta) = (mu B/hbar) sin(alpha)`.
    pub fn beta(&self) -> f64 {
        (self.larmor * self.alpha.sin()).atan2(self.big_omega())
    }

    /// `vartheta = Omega / cos(beta)`, the nutation frequency (non-negative).
    pub fn vartheta(&self) -> f64 {
        self.big_omega() / self.beta().cos()
    }
}

/// `H(t) = -mu B (sin(a) cos(wt) J_1 + sin(a) sin(wt) J_2 + cos(a) J_3)`.
pub fn rotating_field_hamiltonian(p: &RotatingFieldParams, t: f64, hbar: f64) -> CMatrix {
    let [j1, j2, j3] = angular_momentum_matrices(p.spin, hbar);
    field_hamiltonian(p, t, &[j1, j2, j3])
}

fn field_hamiltonian(p: &RotatingFieldParams, t: f64, j: &[CMatrix; 3]) -> CMatrix {
    let (sa, ca) = p.alpha.sin_cos();
    let (swt, cwt) = (p.omega * t).sin_cos();
    (&j[0] * c(sa * cwt, 0.0) + &j[1] * c(sa * swt, 0.0) + &j[2] * c(ca, 0.0)) * c(-p.larmor, 0.0)
}

/// [`Hamiltonian`] handle for the rotating field with cached spin matrices.
#[derive(Debug, Clone)]
pub struct RotatingFieldHamiltonian {
    params: RotatingFieldParams,
    j: [CMatrix; 3],
}

impl RotatingFieldHamiltonian {
    pub fn new(params: RotatingFieldParams, hbar: f64) -> Self {
        Self {
            params,
            j: angular_momentum_matrices(params.spin, hbar),
        }
    }

    pub fn shared(params: RotatingFieldParams, hbar: f64) -> Arc<dyn Hamiltonian> {
        Arc::new(Self::new(params, hbar))
    }

    pub fn params(&self) -> &RotatingFieldParams {
        &self.params
    }

    pub fn spin_matrices(&self) -> &[CMatrix; 3] {
        &self.j
    }
}

impl Hamiltonian for RotatingFieldHamiltonian {
    fn dim(&self) -> usize {
        self.params.spin.dim()
    }

    fn at(&self, t: f64) -> CMatrix {
        field_hamiltonian(&self.params, t, &self.j)
    }
}

/// Frequencies and Euler angles of the rotating-field propagator at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedAngles {
    pub big_omega: f64,
    pub beta: f64,
    pub vartheta: f64,
    pub beta_prime: f64,
    pub gamma: f64,
    pub alpha_prime: f64,
    /// `sin(beta'/2)`, may be negative.
    pub sin_half_beta_prime: f64,
    /// `cos(beta'/2)`, strictly positive.
    pub cos_half_beta_prime: f64,
}

pub fn derived_angles(p: &RotatingFieldParams, t: f64) -> Result<DerivedAngles> {
    let big_omega = p.big_omega();
    let beta = p.beta();
    let cos_beta = beta.cos();
    if cos_beta.abs() < tolerances::DEGENERATE_BETA {
        return Err(Error::DegenerateBeta { cos_beta });
    }
    let vartheta = big_omega / cos_beta;
    let (s, co) = (0.5 * vartheta * t).sin_cos();
    let sin_half = beta.sin() * s;
    let cos_half = (co * co + cos_beta * cos_beta * s * s).sqrt();
    let sin_gamma = co / cos_half;
    let cos_gamma = cos_beta * s / cos_half;
    let gamma = sin_gamma.atan2(cos_gamma);
    Ok(DerivedAngles {
        big_omega,
        beta,
        vartheta,
        beta_prime: 2.0 * sin_half.atan2(cos_half),
        gamma,
        alpha_prime: gamma - PI,
        sin_half_beta_prime: sin_half,
        cos_half_beta_prime: cos_half,
    })
}

fn factorial_table(n: usize) -> Vec<f64> {
    let mut f = vec![1.0; n + 1];
    for k in 1..=n {
        f[k] = f[k - 1] * k as f64;
    }
    f
}

/// Closed-form spin-J propagator assembled entrywise from the Euler angles:
///
/// ```text
/// U_{MM'} = exp(-i[M omega t + (M+M') gamma]) cos(b/2)^{M+M'} sin(b/2)^{M-M'}
///           (-1)^{M-M'} exp(i M' pi) sqrt[(J-M)!(J-M')!/((J+M)!(J+M')!)]
///           sum_n (-1)^n (J+M+n)! / ((J-M-n)! (M-M'+n)! n!) sin(b/2)^{2n}
/// ```
///
/// with `b = beta'` and `1/k! = 0` for negative `k`.
pub fn analytic_evolution_spin_j(p: &RotatingFieldParams, t: f64) -> Result<CMatrix> {
    p.validate()?;
    let a = derived_angles(p, t)?;
    let spin = p.spin;
    let two_j = spin.twice_j() as i64;
    let n = spin.dim();
    let fact = factorial_table(2 * two_j as usize + 1);
    let fact_of = |k: i64| -> Option<f64> { (k >= 0).then(|| fact[k as usize]) };
    let (s, co) = (a.sin_half_beta_prime, a.cos_half_beta_prime);

    let mut u = CMatrix::zeros(n, n);
    for row in 0..n {
        for col in 0..n {
            let m = spin.m(row);
            let mp = spin.m(col);
            // integer offsets: J+M, J-M, J+M', J-M', M-M'
            let j_plus_m = two_j - row as i64;
            let j_minus_m = row as i64;
            let j_plus_mp = two_j - col as i64;
            let j_minus_mp = col as i64;
            let m_minus_mp = col as i64 - row as i64;

            let mut series = 0.0;
            for k in 0..=two_j {
                let denom = match (fact_of(j_minus_m - k), fact_of(m_minus_mp + k)) {
                    (Some(x), Some(y)) => x * y * fact[k as usize],
                    _ => continue,
                };
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                // sin(b/2)^{M-M'} folded into the series: exponent M-M'+2n >= 0 here.
                let power = (m_minus_mp + 2 * k) as i32;
                series += sign * fact[(j_plus_m + k) as usize] / denom * s.powi(power);
            }
            if series == 0.0 {
                continue;
            }
            let norm = (fact[j_minus_m as usize] * fact[j_minus_mp as usize]
                / (fact[j_plus_m as usize] * fact[j_plus_mp as usize]))
                .sqrt();
            let sign = if m_minus_mp.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let cos_power = co.powi((j_plus_m + j_plus_mp - two_j) as i32);
            let phase = Complex64::from_polar(1.0, -(m * p.omega * t + (m + mp) * a.gamma) + mp * PI);
            u[(row, col)] = phase * (cos_power * sign * norm * series);
        }
    }
    Ok(u)
}

/// Hard-coded 2x2 closed form of the spin-1/2 propagator.
pub fn analytic_evolution_spin_half(p: &RotatingFieldParams, t: f64) -> Result<CMatrix> {
    if p.spin != Spin::half() {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: p.spin.dim(),
        });
    }
    let a = derived_angles(p, t)?;
    let (s, co) = (0.5 * a.vartheta * t).sin_cos();
    let (sb, cb) = a.beta.sin_cos();
    let em = Complex64::from_polar(1.0, -0.5 * p.omega * t);
    let ep = em.conj();
    Ok(CMatrix::from_row_slice(
        2,
        2,
        &[
            em * c(co, cb * s),
            em * c(0.0, sb * s),
            ep * c(0.0, sb * s),
            ep * c(co, -cb * s),
        ],
    ))
}

/// Hard-coded 3x3 closed form of the spin-1 propagator.
pub fn analytic_evolution_spin1(p: &RotatingFieldParams, t: f64) -> Result<CMatrix> {
    if p.spin != Spin::one() {
        return Err(Error::DimensionMismatch {
            expected: 3,
            actual: p.spin.dim(),
        });
    }
    let a = derived_angles(p, t)?;
    let (g, wt) = (a.gamma, p.omega * t);
    let cos2 = a.cos_half_beta_prime.powi(2);
    let sin2 = a.sin_half_beta_prime.powi(2);
    let sin_bp = a.beta_prime.sin();
    let cos_bp = a.beta_prime.cos();
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    let e = |phase: f64| Complex64::from_polar(1.0, phase);
    Ok(CMatrix::from_row_slice(
        3,
        3,
        &[
            -e(-(2.0 * g + wt)) * cos2,
            -e(-(g + wt)) * (r2 * sin_bp),
            -e(-wt) * sin2,
            -e(-g) * (r2 * sin_bp),
            ONE * cos_bp,
            e(g) * (r2 * sin_bp),
            -e(wt) * sin2,
            e(g + wt) * (r2 * sin_bp),
            -e(2.0 * g + wt) * cos2,
        ],
    ))
}

/// Outcome of [`periodicity_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Periodicity {
    pub closed: bool,
    /// `vartheta T / 2 pi` when closed.
    pub m: Option<i64>,
}

/// Tests `omega T = 2 pi` and `vartheta T = 2 m pi` (integer `m >= 1`), each
/// within `tol` after dividing by `2 pi`.
pub fn periodicity_check(p: &RotatingFieldParams, period: f64, tol: f64) -> Result<Periodicity> {
    if !(period > 0.0) {
        return Err(Error::InvalidParameter(format!("period must be positive, got {period}")));
    }
    let turns = p.omega * period / (2.0 * PI);
    let nutations = p.vartheta() * period / (2.0 * PI);
    let m = nutations.round();
    let closed = (turns - 1.0).abs() <= tol && (nutations - m).abs() <= tol && m >= 1.0;
    Ok(Periodicity {
        closed,
        m: closed.then_some(m as i64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, unitarity_defect};

    fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
        a * b - b * a
    }

    #[test]
    fn spin_half_matrices_are_half_pauli() {
        let [j1, j2, j3] = angular_momentum_matrices(Spin::half(), 1.0);
        let [s1, s2, s3] = crate::linalg::pauli();
        for (j, s) in [(j1, s1), (j2, s2), (j3, s3)] {
            assert!(max_abs_diff(&j, &(crate::linalg::to_dynamic(&s) * c(0.5, 0.0))) < 1e-15);
        }
    }

    #[test]
    fn spin_one_j3_and_commutators() {
        let hbar = 0.7;
        let [j1, j2, j3] = angular_momentum_matrices(Spin::one(), hbar);
        let diag: Vec<_> = (0..3).map(|k| j3[(k, k)].re).collect();
        assert_eq!(diag, vec![hbar, 0.0, -hbar]);
        assert!(max_abs_diff(&commutator(&j1, &j2), &(&j3 * c(0.0, hbar))) < 1e-12);
    }

    #[test]
    fn casimir_spin_three_halves() {
        let spin = Spin::from_f64(1.5).unwrap();
        let [j1, j2, j3] = angular_momentum_matrices(spin, 1.0);
        let casimir = &j1 * &j1 + &j2 * &j2 + &j3 * &j3;
        assert!(max_abs_diff(&casimir, &(CMatrix::identity(4, 4) * c(3.75, 0.0))) < 1e-12);
    }

    #[test]
    fn spin_limits() {
        assert!(matches!(Spin::from_twice(64), Err(Error::DimensionTooLarge { .. })));
        assert!(Spin::from_twice(63).is_ok());
        assert!(Spin::from_f64(0.3).is_err());
    }

    #[test]
    fn hamiltonian_at_zero_and_untilted() {
        let p = RotatingFieldParams::new(Spin::one(), 1.3, 0.4, 0.9).unwrap();
        let [j1, _, j3] = angular_momentum_matrices(Spin::one(), 1.0);
        let h0 = (&j1 * c(0.4_f64.sin(), 0.0) + &j3 * c(0.4_f64.cos(), 0.0)) * c(-1.3, 0.0);
        assert!(max_abs_diff(&rotating_field_hamiltonian(&p, 0.0, 1.0), &h0) < 1e-15);

        let q = RotatingFieldParams::new(Spin::one(), 1.3, 0.0, 0.9).unwrap();
        let a = rotating_field_hamiltonian(&q, 0.0, 1.0);
        let b = rotating_field_hamiltonian(&q, 2.7, 1.0);
        assert!(max_abs_diff(&a, &b) < 1e-15);
    }

    #[test]
    fn hamiltonian_is_rotated_initial_hamiltonian() {
        let p = RotatingFieldParams::new(Spin::from_f64(1.5).unwrap(), 0.8, 1.1, 1.7).unwrap();
        let [_, _, j3] = angular_momentum_matrices(p.spin, 1.0);
        for &t in &[0.3, 1.9, -2.2] {
            let v = (&j3 * c(0.0, p.omega * t)).exp();
            let conj = v.adjoint() * rotating_field_hamiltonian(&p, 0.0, 1.0) * &v;
            assert!(max_abs_diff(&conj, &rotating_field_hamiltonian(&p, t, 1.0)) < 1e-12);
        }
    }

    #[test]
    fn euler_angles_at_origin() {
        let p = RotatingFieldParams::new(Spin::half(), 1.0, 0.6, 0.4).unwrap();
        let a = derived_angles(&p, 0.0).unwrap();
        assert_eq!(a.beta_prime, 0.0);
        assert!((a.gamma - PI / 2.0).abs() < 1e-15);
        assert!((a.alpha_prime - (a.gamma - PI)).abs() < 1e-15);
        assert!((a.big_omega * a.beta.tan() - p.larmor * p.alpha.sin()).abs() < 1e-12);
        assert!((a.vartheta - a.big_omega / a.beta.cos()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_beta_is_rejected() {
        // Omega = 0 puts beta at pi/2.
        let p = RotatingFieldParams::new(Spin::half(), 1.0, PI, 1.0).unwrap();
        assert!(matches!(derived_angles(&p, 0.5), Err(Error::DegenerateBeta { .. })));
    }

    #[test]
    fn closed_forms_at_origin_are_identity() {
        let p = RotatingFieldParams::new(Spin::one(), 1.0, 0.7, 0.3).unwrap();
        let id = CMatrix::identity(3, 3);
        assert!(max_abs_diff(&analytic_evolution_spin1(&p, 0.0).unwrap(), &id) < 1e-14);
        assert!(max_abs_diff(&analytic_evolution_spin_j(&p, 0.0).unwrap(), &id) < 1e-14);
        let q = RotatingFieldParams { spin: Spin::half(), ..p };
        assert!(max_abs_diff(&analytic_evolution_spin_half(&q, 0.0).unwrap(), &CMatrix::identity(2, 2)) < 1e-14);
    }

    #[test]
    fn spin_half_untilted_is_diagonal() {
        // alpha = 0 gives beta = 0 and U = diag(e^{-i(w - v)t/2}, e^{i(w - v)t/2}).
        let p = RotatingFieldParams::new(Spin::half(), 1.4, 0.0, 0.5).unwrap();
        let t = 1.7;
        let v = p.vartheta();
        let u = analytic_evolution_spin_half(&p, t).unwrap();
        assert!((u[(0, 0)] - Complex64::from_polar(1.0, -(p.omega - v) * t / 2.0)).norm() < 1e-14);
        assert!((u[(1, 1)] - Complex64::from_polar(1.0, (p.omega - v) * t / 2.0)).norm() < 1e-14);
        assert!(u[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn spin_j_series_matches_exponential_factorization() {
        for twice_j in 1..=6 {
            let p = RotatingFieldParams::new(Spin::from_twice(twice_j).unwrap(), 1.2, 0.9, 0.7).unwrap();
            let [j1, _, j3] = angular_momentum_matrices(p.spin, 1.0);
            let t = 2.3;
            let v_dag = (&j3 * c(0.0, -p.omega * t)).exp();
            let gen = (&j1 * c(p.big_omega() * p.beta().tan(), 0.0) + &j3 * c(p.big_omega(), 0.0)) * c(0.0, t);
            let expected = v_dag * gen.exp();
            let u = analytic_evolution_spin_j(&p, t).unwrap();
            assert!(max_abs_diff(&u, &expected) < 1e-10, "2J = {twice_j}: {}", max_abs_diff(&u, &expected));
            assert!(unitarity_defect(&u) < 1e-10);
        }
    }

    #[test]
    fn hard_coded_forms_agree_with_series() {
        for &t in &[0.4, 1.3, 5.9] {
            let p = RotatingFieldParams::new(Spin::one(), 0.9, 1.2, 0.35).unwrap();
            let d = max_abs_diff(&analytic_evolution_spin1(&p, t).unwrap(), &analytic_evolution_spin_j(&p, t).unwrap());
            assert!(d < 1e-12, "spin 1 at t = {t}: {d}");
            let q = RotatingFieldParams { spin: Spin::half(), ..p };
            let d = max_abs_diff(&analytic_evolution_spin_half(&q, t).unwrap(), &analytic_evolution_spin_j(&q, t).unwrap());
            assert!(d < 1e-12, "spin 1/2 at t = {t}: {d}");
        }
    }

    #[test]
    fn periodicity_examples() {
        let p = RotatingFieldParams::new(Spin::one(), 1.0, 0.0, 0.5).unwrap();
        // alpha = 0: vartheta = larmor + omega = 1.5 = 3 omega.
        let r = periodicity_check(&p, 2.0 * PI / p.omega, 1e-9).unwrap();
        assert_eq!(r, Periodicity { closed: true, m: Some(3) });
        let r = periodicity_check(&p, 1.0, 1e-9).unwrap();
        assert!(!r.closed && r.m.is_none());
    }
}
