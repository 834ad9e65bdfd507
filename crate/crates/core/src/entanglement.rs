//! Two-qubit pure states, the CHSH operator and the map between the
//! bipartite coefficients `c_ij` and four-level amplitudes `C^a`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::hilbert::StateVector;
use crate::linalg::{c, pauli, CMatrix2, CVector, I, ONE};
use crate::quaternionic::S7Params;
use crate::tolerances::NORMALIZATION;
use crate::{Error, Result};

pub type CMatrix4 = Matrix4<Complex64>;

/// `|Psi> = c_ij |i>|j>`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    coeffs: CMatrix2,
}

impl BipartiteState {
    pub fn normalize(coeffs: CMatrix2) -> Result<Self> {
        let n = coeffs.norm();
        if n <= crate::tolerances::ZERO_NORM {
            return Err(Error::ZeroVector { norm: n });
        }
        Ok(Self { coeffs: coeffs / c(n, 0.0) })
    }

    /// From the product basis `(|00>, |01>, |10>, |11>)`.
    pub fn from_product_basis(v: &StateVector) -> Result<Self> {
        let a = v.amplitudes();
        if a.len() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, actual: a.len() });
        }
        Self::normalize(CMatrix2::new(a[0], a[1], a[2], a[3]))
    }

    pub fn coeffs(&self) -> &CMatrix2 {
        &self.coeffs
    }

    pub fn det(&self) -> Complex64 {
        self.coeffs.determinant()
    }

    pub fn product_basis(&self) -> CVector {
        let m = &self.coeffs;
        CVector::from_vec(vec![m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]])
    }

    /// `c -> a c b^T`, i.e. `(a (x) b)` on the product basis.
    pub fn local_transform(&self, a: &CMatrix2, b: &CMatrix2) -> Self {
        Self { coeffs: a * self.coeffs * b.transpose() }
    }
}

/// Unit directions `r`, `s` on the first qubit and `t`, `u` on the second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CHSHDirections {
    pub r: [f64; 3],
    pub s: [f64; 3],
    pub t: [f64; 3],
    pub u: [f64; 3],
}

impl CHSHDirections {
    pub fn new(r: [f64; 3], s: [f64; 3], t: [f64; 3], u: [f64; 3]) -> Result<Self> {
        for (name, v) in [("r", r), ("s", s), ("t", t), ("u", u)] {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (n - 1.0).abs() > NORMALIZATION {
                return Err(Error::InvalidParameter(format!("direction {name} has norm {n}")));
            }
        }
        Ok(Self { r, s, t, u })
    }

    /// Optimal settings for the Bell state `(|00> + |11>)/sqrt(2)`.
    pub fn tsirelson() -> Self {
        Self {
            r: [0.0, 0.0, 1.0],
            s: [1.0, 0.0, 0.0],
            t: [FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2],
            u: [-FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2],
        }
    }
}

/// `n . sigma`.
pub fn sigma_dot(n: &[f64; 3]) -> CMatrix2 {
    let [s1, s2, s3] = pauli();
    s1 * c(n[0], 0.0) + s2 * c(n[1], 0.0) + s3 * c(n[2], 0.0)
}

pub fn kron2(a: &CMatrix2, b: &CMatrix2) -> CMatrix4 {
    CMatrix4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

/// `(R + S) (x) T + (R - S) (x) U`.
pub fn chsh_operator(d: &CHSHDirections) -> CMatrix4 {
    let (r, s) = (sigma_dot(&d.r), sigma_dot(&d.s));
    kron2(&(r + s), &sigma_dot(&d.t)) + kron2(&(r - s), &sigma_dot(&d.u))
}

pub fn chsh_expectation(b: &BipartiteState, d: &CHSHDirections) -> f64 {
    let v = b.product_basis();
    let op = chsh_operator(d);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            acc += v[i].conj() * op[(i, j)] * v[j];
        }
    }
    acc.re
}

/// `2 sqrt(1 + 4 |det c|^2)`.
pub fn chsh_max(b: &BipartiteState) -> f64 {
    2.0 * (1.0 + 4.0 * b.det().norm_sqr()).sqrt()
}

/// Correlation tensor `T_jk = <sigma_j (x) sigma_k>`.
pub fn correlation_tensor(b: &BipartiteState) -> [[f64; 3]; 3] {
    let p = pauli();
    let m = b.coeffs();
    let mut t = [[0.0; 3]; 3];
    for (j, row) in t.iter_mut().enumerate() {
        for (k, x) in row.iter_mut().enumerate() {
            *x = (m.adjoint() * p[j] * m * p[k].transpose()).trace().re;
        }
    }
    t
}

fn spherical(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

fn norm3(v: &[f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn icosahedron() -> Vec<(f64, f64)> {
    let z = 1.0 / 5.0_f64.sqrt();
    let polar = z.acos();
    let mut v = vec![(0.0, 0.0), (PI, 0.0)];
    for k in 0..5 {
        let phi = 2.0 * PI * k as f64 / 5.0;
        v.push((polar, phi));
        v.push((PI - polar, phi + PI / 5.0));
    }
    v
}

/// Best CHSH value for fixed `r`, `s`, with `t`, `u` chosen optimally.
fn best_for_rs(tensor: &[[f64; 3]; 3], r: &[f64; 3], s: &[f64; 3]) -> (f64, [f64; 3], [f64; 3]) {
    let mut wp = [0.0; 3];
    let mut wm = [0.0; 3];
    for k in 0..3 {
        for j in 0..3 {
            wp[k] += (r[j] + s[j]) * tensor[j][k];
            wm[k] += (r[j] - s[j]) * tensor[j][k];
        }
    }
    let (np, nm) = (norm3(&wp), norm3(&wm));
    let unit = |w: [f64; 3], n: f64| if n > 0.0 { w.map(|x| x / n) } else { [0.0, 0.0, 1.0] };
    (np + nm, unit(wp, np), unit(wm, nm))
}

fn golden_max(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, iters: usize) -> f64 {
    let g = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    if f1 > f2 { x1 } else { x2 }
}

/// Numerical maximum of `<CHSH>` over all directions: a 12-point sphere grid
/// for `r` and `s`, then coordinate-wise golden-section refinement. `t` and `u`
/// are optimized in closed form for each `(r, s)`.
pub fn chsh_oracle_max(b: &BipartiteState) -> (f64, CHSHDirections) {
    let tensor = correlation_tensor(b);
    let value = |x: &[f64; 4]| best_for_rs(&tensor, &spherical(x[0], x[1]), &spherical(x[2], x[3])).0;
    let grid = icosahedron();
    let mut starts: Vec<([f64; 4], f64)> = Vec::with_capacity(grid.len() * grid.len());
    for &(t1, p1) in &grid {
        for &(t2, p2) in &grid {
            let x = [t1, p1, t2, p2];
            starts.push((x, value(&x)));
        }
    }
    starts.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut best = starts[0];
    for &(mut x, _) in starts.iter().take(4) {
        let mut width = PI / 2.0;
        for _ in 0..40 {
            for k in 0..4 {
                let center = x[k];
                let f = |y: f64| {
                    let mut z = x;
                    z[k] = y;
                    value(&z)
                };
                x[k] = golden_max(&f, center - width, center + width, 30);
            }
            width *= 0.7;
        }
        let v = value(&x);
        if v > best.1 {
            best = (x, v);
        }
    }
    let (r, s) = (spherical(best.0[0], best.0[1]), spherical(best.0[2], best.0[3]));
    let (v, t, u) = best_for_rs(&tensor, &r, &s);
    (v, CHSHDirections { r, s, t, u })
}

/// `U~^a = u^a sigma^a / sqrt(2)` with `sigma^0 = 1` and `u = (i, 1, i, 1)`.
pub fn composite_basis() -> [CMatrix2; 4] {
    let [s1, s2, s3] = pauli();
    let k = c(FRAC_1_SQRT_2, 0.0);
    [CMatrix2::identity() * I * k, s1 * ONE * k, s2 * I * k, s3 * ONE * k]
}

/// `c_ij = sum_a U~^a_ij C^a`.
pub fn bipartite_from_composite(state: &StateVector) -> Result<BipartiteState> {
    let a = state.amplitudes();
    if a.len() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, actual: a.len() });
    }
    let basis = composite_basis();
    let mut m = CMatrix2::zeros();
    for (u, x) in basis.iter().zip(a.iter()) {
        m += u * *x;
    }
    BipartiteState::normalize(m)
}

/// `(1/2) cos(theta)`.
pub fn det_c_from_theta(s: &S7Params) -> f64 {
    0.5 * s.theta.cos()
}

/// `det c` of the four-level state of `s` under the fixed basis map.
pub fn det_c_direct(s: &S7Params) -> Complex64 {
    bipartite_from_composite(&s.state()).expect("four amplitudes").det()
}

/// `(1/2)(|C^0|^2 + |C^2|^2 - |C^1|^2 - |C^3|^2)`, the determinant obtained when
/// the phase of each `C^a` is absorbed into its basis element.
pub fn det_c_moduli(state: &StateVector) -> f64 {
    let a = state.amplitudes();
    0.5 * (a[0].norm_sqr() + a[2].norm_sqr() - a[1].norm_sqr() - a[3].norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternionic::Euler;
    use crate::sampling::{random_euler, random_state, random_su2, random_unit_vector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bell() -> BipartiteState {
        BipartiteState::normalize(CMatrix2::new(ONE, c(0.0, 0.0), c(0.0, 0.0), ONE)).unwrap()
    }

    fn random_bipartite(rng: &mut ChaCha8Rng) -> BipartiteState {
        BipartiteState::from_product_basis(&random_state(rng, 4)).unwrap()
    }

    #[test]
    fn equal_first_directions_collapse() {
        let r = [0.6, 0.0, 0.8];
        let d = CHSHDirections::new(r, r, [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]).unwrap();
        let expected = kron2(&sigma_dot(&r), &sigma_dot(&d.t)) * c(2.0, 0.0);
        assert!((chsh_operator(&d) - expected).norm() < 1e-15);
    }

    #[test]
    fn tsirelson_bound_on_bell_state() {
        let v = chsh_expectation(&bell(), &CHSHDirections::tsirelson());
        assert!((v - 2.0 * 2.0_f64.sqrt()).abs() < 1e-14);
        assert!((chsh_max(&bell()) - 2.0 * 2.0_f64.sqrt()).abs() < 1e-15);
        let product = BipartiteState::normalize(CMatrix2::new(ONE, ONE, c(0.0, 0.0), c(0.0, 0.0))).unwrap();
        assert!((chsh_max(&product) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn spectrum_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let d = CHSHDirections::new(
                random_unit_vector(&mut rng),
                random_unit_vector(&mut rng),
                random_unit_vector(&mut rng),
                random_unit_vector(&mut rng),
            )
            .unwrap();
            let op = chsh_operator(&d);
            assert!((op - op.adjoint()).norm() < 1e-14);
            let mut ev: Vec<f64> = op.symmetric_eigenvalues().iter().copied().collect();
            ev.sort_by(f64::total_cmp);
            for k in 0..2 {
                assert!((ev[k] + ev[3 - k]).abs() < 1e-12, "{ev:?}");
            }
        }
    }

    #[test]
    fn closed_form_inner_maximum_matches_direct_expectation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let b = random_bipartite(&mut rng);
        let (v, d) = chsh_oracle_max(&b);
        assert!((chsh_expectation(&b, &d) - v).abs() < 1e-12);
    }

    #[test]
    fn oracle_matches_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let b = random_bipartite(&mut rng);
            let (v, _) = chsh_oracle_max(&b);
            assert!((v - chsh_max(&b)).abs() < 1e-6, "{v} vs {}", chsh_max(&b));
        }
        let (v, _) = chsh_oracle_max(&bell());
        assert!((v - 2.0 * 2.0_f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn random_directions_stay_below_maximum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = random_bipartite(&mut rng);
        let bound = chsh_max(&b);
        for _ in 0..2000 {
            let d = CHSHDirections {
                r: random_unit_vector(&mut rng),
                s: random_unit_vector(&mut rng),
                t: random_unit_vector(&mut rng),
                u: random_unit_vector(&mut rng),
            };
            assert!(chsh_expectation(&b, &d) <= bound + 1e-12);
        }
    }

    #[test]
    fn composite_basis_is_orthonormal() {
        let u = composite_basis();
        for a in 0..4 {
            for b in 0..4 {
                let t = (u[a] * u[b].adjoint()).trace();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((t - c(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn basis_map_preserves_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let s = random_state(&mut rng, 4);
            let basis = composite_basis();
            let a = s.amplitudes();
            let m: CMatrix2 = basis.iter().zip(a.iter()).map(|(u, x)| u * *x).sum();
            assert!((m.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn local_unitaries_keep_determinant_modulus() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let b = random_bipartite(&mut rng);
            let moved = b.local_transform(&random_su2(&mut rng), &random_su2(&mut rng));
            assert!((moved.det().norm() - b.det().norm()).abs() < 1e-12);
            assert!(b.det().norm() <= 0.5 + 1e-12);
        }
    }

    #[test]
    fn s7_amplitudes_match_explicit_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let s = S7Params {
            theta: 1.1,
            u: random_euler(&mut rng),
            v: random_euler(&mut rng),
        };
        let (u, v) = (s.u, s.v);
        let e = |x: f64| Complex64::from_polar(1.0, x / 2.0);
        let (ct, st) = ((s.theta / 2.0).cos(), (s.theta / 2.0).sin());
        let (c1, s1) = ((u.alpha / 2.0).cos(), (u.alpha / 2.0).sin());
        let (c2, s2) = ((v.alpha / 2.0).cos(), (v.alpha / 2.0).sin());
        let (g1, b1, g2, b2) = (u.gamma, u.beta, v.gamma, v.beta);
        let expected = [
            e(g1 + b1) * ct * c1,
            (e(g1 + g2 + b1 + b2) * c1 * c2 - e(g1 - g2 - b1 + b2) * s1 * s2) * st,
            e(g1 - b1) * ct * s1,
            (e(g1 + g2 + b1 - b2) * c1 * s2 + e(g1 - g2 - b1 - b2) * s1 * c2) * st,
        ];
        let a = s.state();
        for (k, (x, y)) in a.amplitudes().iter().zip(expected).enumerate() {
            assert!((x - y).norm() < 1e-14, "C^{k}");
        }
        assert!((det_c_moduli(&a) - det_c_from_theta(&s)).abs() < 1e-14);
    }

    #[test]
    fn direct_determinant_depends_on_phases() {
        let base = S7Params {
            theta: 0.0,
            u: Euler::new(0.0, 0.0, 0.0),
            v: Euler::default(),
        };
        assert!((det_c_direct(&base) - c(-0.5, 0.0)).norm() < 1e-15);
        let tilted = S7Params { u: Euler::new(PI / 2.0, 0.0, 0.0), ..base };
        assert!(det_c_direct(&tilted).norm() < 1e-15);
    }
}
