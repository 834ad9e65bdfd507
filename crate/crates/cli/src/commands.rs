use std::f64::consts::PI;
use std::sync::Arc;

use hopfphase::abelian::{
    chern_number_cp1, closure_gap, connection_rate, connection_samples, cp1_sphere, cp2_second_chern, energy_samples,
    overlap_identity_check, phase_breakdown, PatchPolicy,
};
use hopfphase::entanglement::{
    bipartite_from_composite, chsh_max, chsh_oracle_max, det_c_from_theta, det_c_moduli, BipartiteState,
};
use hopfphase::evolution::{
    analytic_evolution_spin1, analytic_evolution_spin_half, analytic_evolution_spin_j, angular_momentum_matrices,
    expectation_j, integrate_schrodinger, time_ordered_propagator, Hamiltonian,
    RotatingFieldHamiltonian, RotatingFieldParams, SinusoidalHamiltonian, Spin, Trajectory, HBAR,
};
use hopfphase::hilbert::StateVector;
use hopfphase::linalg::{c, expectation, max_abs_diff, max_abs_diff_mod_phase, CMatrix};
use hopfphase::quaternionic::{
    bpst_connection, fiber_reconstruction_check, nonabelian_overlap_check, quaternionic_connection, second_chern_s4,
    Euler, S7Params,
};
use hopfphase::sampling::{random_euler, random_hermitian, random_s7_at, random_state};
use hopfphase::systems::{Oscillator, QutritCase, SpinHalfField};
use hopfphase::tolerances::AUTO_PATCH_SWITCH;
use hopfphase::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::Value;

use crate::config::{parse_sweep, Params};
use crate::report::{num, Reference, Report, Table};
use crate::CliError;

const OSC_GEOMETRIC: &str = "oscillator loop: int A = pi (cos(theta) - 1)";
const OSC_DYNAMICAL: &str = "oscillator loop: dynamical phase (2 - cos(theta)) pi";
const OSC_OVERLAP: &str = "oscillator: Psi(2 pi/omega) = exp(-i pi) Psi(0)";
const OSC_STATE: &str = "oscillator closed-form state exp(-i omega t/2)(cos, sin exp(-i omega t))";
const OVERLAP_IDENTITY: &str = "overlap = zeta overlap x exp(i int A + (i/hbar) int <H> dt)";
const SPIN_HALF_SUM: &str = "spin 1/2 from |+>: A + <H> dt/hbar = -(omega/2) dt";
const SPIN_HALF_OVERLAP: &str = "spin 1/2 closed-form <Psi(T)|Psi(0)>";
const SPIN_J_SERIES: &str = "rotating-field propagator: Wigner-d series in (beta', gamma, alpha')";
const CLOSURE: &str = "closed CP^N path iff omega T = 2 pi and vartheta T = 2 m pi";
const CP1: &str = "monopole charge (1/2 pi) int F = 1";
const CP2: &str = "(1/4 pi^2) int F ^ F = 1 on CP^2";
const S4: &str = "BPST second Chern number (1/24 pi^2) int Tr(dv v^dagger)^3 = 1";
const BPST: &str = "A = -i sin^2(theta/2) dv v^dagger on S^7";
const NONABELIAN: &str = "SU(2) overlap = sum Tr(k(T)^dagger V q0^dagger L^dagger P^- q0 k(0))";
const FIBER: &str = "SU(2) fiber transport q(T) = L q(0) V^dagger";
const DET_C: &str = "det c = (1/2) cos(theta) for Q^0 = u cos(theta/2), Q^1 = u v sin(theta/2)";
const CHSH_FORMULA: &str = "max <CHSH> = 2 sqrt(1 + 4 |det c|^2)";
const CHSH_ORACLE: &str = "direction search over r, s, t, u";

fn spin_of(j: f64) -> Result<Spin, CliError> {
    Spin::from_f64(j).map_err(CliError::from)
}

fn j_matrices(dim: usize) -> Result<[CMatrix; 3], CliError> {
    Ok(angular_momentum_matrices(Spin::from_twice(dim as u32 - 1)?, HBAR))
}

fn j_gap(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn trajectory_table(traj: &Trajectory, h: &dyn Hamiltonian) -> Result<Table, CliError> {
    let dim = traj.dim();
    let j = expectation_j(traj, &j_matrices(dim)?)?;
    let a = connection_samples(traj, PatchPolicy::Auto)?;
    let e = energy_samples(traj, h)?;
    let mut columns = vec!["t".to_string()];
    for k in 0..dim {
        columns.push(format!("re_{k}"));
        columns.push(format!("im_{k}"));
    }
    columns.extend(["j1", "j2", "j3", "a", "patch", "energy"].map(String::from));
    let rows = (0..traj.len())
        .map(|i| {
            let mut row = vec![traj.times()[i]];
            for z in traj.states()[i].amplitudes().iter() {
                row.push(z.re);
                row.push(z.im);
            }
            row.extend(j[i]);
            row.extend([a[i].a_value, a[i].patch as f64, e[i]]);
            row
        })
        .collect();
    Ok(Table { columns, rows })
}

pub fn evolve(p: &Params) -> Result<Report, CliError> {
    match p.system.as_deref().unwrap_or("spin") {
        "oscillator" => evolve_oscillator(p),
        "spin" => evolve_spin(p),
        other => Err(CliError::Config(format!("unknown system {other:?} for evolve"))),
    }
}

fn evolve_oscillator(p: &Params) -> Result<Report, CliError> {
    let o = Oscillator::new(p.theta.unwrap_or(PI / 2.0), p.omega.unwrap_or(1.0));
    let t_final = p.t_final.unwrap_or(o.period());
    let steps = p.steps_or(2000)?;
    let h = o.shared_hamiltonian(HBAR);
    let traj = integrate_schrodinger(h.clone(), &o.initial_state(), t_final, steps, HBAR)?;
    let worst = traj
        .times()
        .iter()
        .zip(traj.states())
        .map(|(t, s)| s.max_abs_diff(&o.state(*t)))
        .fold(0.0, f64::max);
    let mut r = Report::new("evolve/oscillator");
    r.input_f("theta", o.theta)
        .input_f("omega", o.omega)
        .input_f("t_final", t_final)
        .input("steps", steps);
    r.value_f("norm_drift", traj.norm_drift());
    r.check(Reference::bound("state_error", worst, 1e-8, OSC_STATE));
    r.table = Some(trajectory_table(&traj, h.as_ref())?);
    Ok(r)
}

fn evolve_spin(p: &Params) -> Result<Report, CliError> {
    let case = match p.case.as_deref() {
        None => None,
        Some(s) => Some(QutritCase::from_label(s).ok_or_else(|| CliError::Config(format!("unknown case {s:?}")))?),
    };
    let (params, psi0, t_final, default_steps) = match case {
        Some(k) => {
            if p.j.is_some_and(|j| j != 1.0) {
                return Err(CliError::Config("preset cases are spin 1".into()));
            }
            let steps = if k == QutritCase::Three { 60_000 } else { 8000 };
            (k.params(), k.initial_state(), p.t_final.unwrap_or(k.period()), steps)
        }
        None => {
            let spin = spin_of(p.j.unwrap_or(0.5))?;
            let params =
                RotatingFieldParams::new(spin, p.larmor.unwrap_or(1.2), p.alpha.unwrap_or(0.8), p.omega.unwrap_or(0.9))?;
            let t = p.t_final.unwrap_or(4.0 * PI / params.omega);
            (params, StateVector::basis(spin.dim(), 0)?, t, 20_000)
        }
    };
    let steps = p.steps_or(default_steps)?;
    let h = RotatingFieldHamiltonian::shared(params, HBAR);
    let traj = integrate_schrodinger(h.clone(), &psi0, t_final, steps, HBAR)?;
    let mut r = Report::new("evolve/spin");
    r.input_f("j", params.spin.j())
        .input_f("larmor", params.larmor)
        .input_f("alpha", params.alpha)
        .input_f("omega", params.omega)
        .input_f("t_final", t_final)
        .input("steps", steps);
    if let Some(k) = case {
        r.input("case", k.label());
    }
    r.value_f("beta", params.beta())
        .value_f("vartheta", params.vartheta())
        .value_f("norm_drift", traj.norm_drift());

    let stride = (traj.len() / 64).max(1);
    let mut worst: f64 = 0.0;
    for (t, s) in traj.times().iter().zip(traj.states()).step_by(stride) {
        let exact = analytic_evolution_spin_j(&params, *t)? * psi0.amplitudes();
        let a = CMatrix::from_column_slice(exact.len(), 1, exact.as_slice());
        let b = CMatrix::from_column_slice(exact.len(), 1, s.amplitudes().as_slice());
        worst = worst.max(max_abs_diff_mod_phase(&a, &b));
    }
    r.check(Reference::bound("series_vs_integrator", worst, 1e-7, SPIN_J_SERIES));

    let table = trajectory_table(&traj, h.as_ref())?;
    let first: [f64; 3] = table.rows[0][1 + 2 * traj.dim()..4 + 2 * traj.dim()].try_into().expect("three columns");
    let last_row = &table.rows[table.rows.len() - 1];
    let last: [f64; 3] = last_row[1 + 2 * traj.dim()..4 + 2 * traj.dim()].try_into().expect("three columns");
    let zeta_gap = closure_gap(&traj)?;
    let jgap = j_gap(&first, &last);
    r.value_f("closure_gap", zeta_gap).value_f("j_endpoint_gap", jgap);
    match case {
        Some(QutritCase::One) => {
            r.check(Reference::bound("closure_gap", zeta_gap, 1e-6, CLOSURE));
            r.check(Reference::bound("j_endpoint_gap", jgap, 1e-6, CLOSURE));
        }
        Some(_) => {
            r.check(Reference::above("closure_gap", zeta_gap, 1e-2, CLOSURE));
            r.check(Reference::above("j_endpoint_gap", jgap, 1e-2, CLOSURE));
        }
        None => {}
    }
    r.table = Some(table);
    Ok(r)
}

pub fn phase(p: &Params) -> Result<Report, CliError> {
    if p.random {
        return phase_random(p);
    }
    match p.system.as_deref().unwrap_or("oscillator") {
        "oscillator" => phase_oscillator(p),
        "spin" => phase_spin(p),
        "random" => phase_random(p),
        other => Err(CliError::Config(format!("unknown system {other:?} for phase"))),
    }
}

fn phase_oscillator(p: &Params) -> Result<Report, CliError> {
    let o = Oscillator::new(p.theta.unwrap_or(PI / 2.0), p.omega.unwrap_or(1.0));
    let steps = p.steps_or(2000)?;
    let h = o.shared_hamiltonian(HBAR);
    let t = o.period();
    let traj = integrate_schrodinger(h.clone(), &o.initial_state(), t, steps, HBAR)?;
    let b = phase_breakdown(&traj, h.as_ref(), PatchPolicy::Auto)?;
    let check = overlap_identity_check(&traj, h.as_ref())?;
    let mut r = Report::new("phase/oscillator");
    r.input_f("theta", o.theta).input_f("omega", o.omega).input("steps", steps);
    r.value_f("geometric", b.geometric)
        .value_f("dynamical", b.dynamical)
        .value_f("total_fiber", b.total_fiber)
        .value_f("residual", b.residual())
        .value("overlap", crate::report::complex(check.lhs))
        .value_f("overlap_phase", check.lhs.arg());
    r.check(Reference::scalar("geometric", b.geometric, o.geometric_phase(t), 1e-6, OSC_GEOMETRIC));
    r.check(Reference::scalar("dynamical", b.dynamical, o.dynamical_phase(t), 1e-6, OSC_DYNAMICAL));
    r.check(Reference::complex("overlap", check.lhs, Complex64::from_polar(1.0, -PI), 1e-8, OSC_OVERLAP));
    r.check(Reference::bound("overlap_identity", check.error, 1e-8, OVERLAP_IDENTITY));
    Ok(r)
}

fn phase_spin(p: &Params) -> Result<Report, CliError> {
    if p.j.is_some_and(|j| j != 0.5) {
        return Err(CliError::Config("phase --system spin uses spin 1/2".into()));
    }
    let s = SpinHalfField::new(p.larmor.unwrap_or(1.2), p.alpha.unwrap_or(0.8), p.omega.unwrap_or(0.9))?;
    let steps = p.steps_or(80_000)?;
    let t_final = p.t_final.unwrap_or(4.0 * PI / s.params.omega);
    let h = s.shared_hamiltonian(HBAR);
    let traj = integrate_schrodinger(h.clone(), &s.initial_state(), t_final, steps, HBAR)?;
    let mut worst: f64 = 0.0;
    let mut used = 0usize;
    for (t, state) in traj.times().iter().zip(traj.states()).skip(1) {
        let psi = state.amplitudes();
        if psi[1].norm() < AUTO_PATCH_SWITCH {
            continue;
        }
        used += 1;
        let hm = h.at(*t);
        let velocity = (&hm * psi) * c(0.0, -1.0 / HBAR);
        let a = connection_rate(psi, &velocity, 1)?;
        worst = worst.max((a + expectation(&hm, psi).re / HBAR - s.total_rate()).abs());
    }
    let check = overlap_identity_check(&traj, h.as_ref())?;
    let mut r = Report::new("phase/spin");
    r.input_f("larmor", s.params.larmor)
        .input_f("alpha", s.params.alpha)
        .input_f("omega", s.params.omega)
        .input_f("t_final", t_final)
        .input("steps", steps);
    r.value_f("beta", s.params.beta())
        .value_f("vartheta", s.params.vartheta())
        .value("regular_samples", used)
        .value("overlap", crate::report::complex(check.lhs));
    r.check(Reference::bound("rate_sum_deviation", worst, 1e-7, SPIN_HALF_SUM));
    r.check(Reference::complex("overlap", check.lhs, s.overlap(0.0, t_final), 1e-8, SPIN_HALF_OVERLAP));
    r.check(Reference::bound("overlap_identity", check.error, 1e-8, OVERLAP_IDENTITY));
    Ok(r)
}

fn random_hamiltonian(rng: &mut ChaCha8Rng, dim: usize) -> Arc<dyn Hamiltonian> {
    Arc::new(SinusoidalHamiltonian {
        h0: random_hermitian(rng, dim),
        h1: random_hermitian(rng, dim),
        omega: 1.7,
    })
}

/// Errors of one random draw: `(overlap, fiber)`; `fiber` is zero for U(1).
pub fn random_trial(seed: u64, dim: usize, steps: usize, nonabelian: bool) -> Result<(f64, f64), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = random_hamiltonian(&mut rng, dim);
    let psi0 = random_state(&mut rng, dim);
    let traj = integrate_schrodinger(h.clone(), &psi0, 1.0, steps, HBAR)?;
    if nonabelian {
        let o = nonabelian_overlap_check(&traj, h.as_ref())?;
        let f = fiber_reconstruction_check(&traj, h.as_ref())?;
        Ok((o.error, f.error))
    } else {
        Ok((overlap_identity_check(&traj, h.as_ref())?.error, 0.0))
    }
}

fn phase_random(p: &Params) -> Result<Report, CliError> {
    let dim = p.dim.unwrap_or(4);
    if dim < 2 {
        return Err(CliError::Config(format!("--dim must be at least 2, got {dim}")));
    }
    if p.nonabelian && !dim.is_multiple_of(2) {
        return Err(CliError::Config(format!("--nonabelian needs an even --dim, got {dim}")));
    }
    let trials = p.trials.unwrap_or(100);
    let steps = p.steps_or(10_000)?;
    let seed = p.seed();
    let results: Vec<(f64, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| random_trial(seed.wrapping_add(i), dim, steps, p.nonabelian))
        .collect::<Result<_, _>>()?;
    let max_overlap = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let max_fiber = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let mut r = Report::new(if p.nonabelian { "phase/random-su2" } else { "phase/random-u1" });
    r.input("dim", dim).input("trials", trials).input("steps", steps).input("seed", seed);
    r.value_f("max_overlap_error", max_overlap);
    if p.nonabelian {
        r.value_f("max_fiber_error", max_fiber);
        r.check(Reference::bound("max_overlap_error", max_overlap, 1e-6, NONABELIAN));
        r.check(Reference::bound("max_fiber_error", max_fiber, 1e-6, FIBER));
    } else {
        r.check(Reference::bound("max_overlap_error", max_overlap, 1e-8, OVERLAP_IDENTITY));
    }
    r.table = Some(Table {
        columns: ["trial", "seed", "overlap_error", "fiber_error"].map(String::from).to_vec(),
        rows: results
            .iter()
            .enumerate()
            .map(|(i, e)| vec![i as f64, seed.wrapping_add(i as u64) as f64, e.0, e.1])
            .collect(),
    });
    Ok(r)
}

pub fn chern(p: &Params) -> Result<Report, CliError> {
    let target = p.target.as_deref().unwrap_or("all");
    let targets: Vec<&str> = match target {
        "all" => vec!["cp1", "cp2", "s4"],
        "cp1" | "cp2" | "s4" => vec![target],
        other => return Err(CliError::Config(format!("unknown target {other:?}"))),
    };
    let mut r = Report::new("chern");
    r.input("target", target);
    let mut rows = Vec::new();
    for t in targets {
        let (default, coarsest, tol, prov, code) = match t {
            "cp1" => (64, 16, 1e-6, CP1, 1.0),
            "cp2" => (24, 8, 1e-2, CP2, 2.0),
            _ => (32, 8, 1e-2, S4, 3.0),
        };
        let grid = p.grid_or(default)?;
        let run = |n: usize| -> Result<f64, CliError> {
            Ok(match t {
                "cp1" => {
                    let (a, b) = cp1_sphere(n);
                    chern_number_cp1(a, b)?
                }
                "cp2" => cp2_second_chern(n)?,
                _ => second_chern_s4(n)?,
            })
        };
        let mut last = f64::NAN;
        for n in [grid / 4, grid / 2, grid] {
            if n < coarsest && n < grid {
                continue;
            }
            last = run(n)?;
            rows.push(vec![code, n as f64, last, (last - 1.0).abs()]);
        }
        r.input(&format!("{t}_grid"), grid);
        r.value_f(t, last);
        r.check(Reference::scalar(t, last, 1.0, tol, prov));
    }
    r.table = Some(Table {
        columns: ["target", "grid", "value", "error"].map(String::from).to_vec(),
        rows,
    });
    Ok(r)
}

fn s7_point(theta: f64, rng: Option<&mut ChaCha8Rng>) -> S7Params {
    match rng {
        Some(r) => random_s7_at(r, theta),
        None => S7Params {
            theta,
            u: Euler::default(),
            v: Euler::default(),
        },
    }
}

struct EntangleRow {
    det: Complex64,
    moduli: f64,
    chsh: f64,
}

fn entangle_row(theta: f64, rng: Option<&mut ChaCha8Rng>) -> Result<EntangleRow, CliError> {
    let s = s7_point(theta, rng);
    let four = s.state();
    let b = bipartite_from_composite(&four)?;
    Ok(EntangleRow {
        det: b.det(),
        moduli: det_c_moduli(&four),
        chsh: chsh_max(&b),
    })
}

pub fn entangle(p: &Params) -> Result<Report, CliError> {
    let seed = p.seed();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = Report::new("entangle");
    r.input("random_frames", p.random).input("seed", seed);
    if let Some(sweep) = &p.sweep {
        let thetas = parse_sweep(sweep)?;
        r.input("sweep", sweep.clone());
        let mut rows = Vec::new();
        let (mut worst_det, mut worst_abs): (f64, f64) = (0.0, 0.0);
        for th in thetas {
            let e = entangle_row(th, p.random.then_some(&mut rng))?;
            let expected = 0.5 * th.cos();
            worst_det = worst_det.max((e.det - c(expected, 0.0)).norm());
            worst_abs = worst_abs.max((e.det.norm() - expected.abs()).abs());
            rows.push(vec![th, e.det.re, e.det.im, e.det.norm(), expected, expected.abs(), e.moduli, e.chsh]);
        }
        r.check(Reference::bound("det_c_max_error", worst_det, 1e-10, DET_C));
        r.check(Reference::bound("abs_det_c_max_error", worst_abs, 1e-10, DET_C));
        r.table = Some(Table {
            columns: ["theta", "det_re", "det_im", "det_abs", "half_cos", "half_abs_cos", "det_moduli", "chsh_max"]
                .map(String::from)
                .to_vec(),
            rows,
        });
        return Ok(r);
    }
    let theta = p.theta.unwrap_or(0.0);
    r.input_f("theta", theta);
    let s = s7_point(theta, p.random.then_some(&mut rng));
    r.value(
        "u",
        Value::Array(vec![num(s.u.alpha), num(s.u.beta), num(s.u.gamma)]),
    )
    .value("v", Value::Array(vec![num(s.v.alpha), num(s.v.beta), num(s.v.gamma)]));
    let four = s.state();
    let b = bipartite_from_composite(&four)?;
    let det = b.det();
    let expected = det_c_from_theta(&s);
    let (oracle, _) = chsh_oracle_max(&b);
    r.value("det_c", crate::report::complex(det))
        .value_f("det_c_moduli", det_c_moduli(&four))
        .value_f("chsh_max", chsh_max(&b))
        .value_f("chsh_oracle", oracle);
    r.check(Reference::complex("det_c", det, c(expected, 0.0), 1e-10, DET_C));
    r.check(Reference::scalar("abs_det_c", det.norm(), expected.abs(), 1e-10, DET_C));
    r.check(Reference::scalar(
        "chsh_max",
        chsh_max(&b),
        2.0 * (1.0 + 4.0 * expected * expected).sqrt(),
        1e-10,
        CHSH_FORMULA,
    ));
    r.check(Reference::scalar("chsh_oracle", oracle, chsh_max(&b), 1e-3, CHSH_ORACLE));
    Ok(r)
}

fn merge(into: &mut Report, prefix: &str, from: Report) {
    for mut x in from.references {
        x.name = format!("{prefix}.{}", x.name);
        into.references.push(x);
    }
}

pub fn verify_all(p: &Params) -> Result<Report, CliError> {
    let seed = p.seed();
    let trials = p.trials.unwrap_or(20);
    let mut r = Report::new("verify-all");
    r.input("seed", seed).input("trials", trials);

    merge(&mut r, "oscillator", phase_oscillator(&Params::default())?);
    merge(&mut r, "spin_half", phase_spin(&Params::default())?);

    let mut worst: f64 = 0.0;
    for twice in 1..=3 {
        let params = RotatingFieldParams::new(Spin::from_twice(twice)?, 1.4, 0.7, 0.5)?;
        let h = RotatingFieldHamiltonian::new(params, HBAR);
        let exact = analytic_evolution_spin_j(&params, 1.3)?;
        let numeric = time_ordered_propagator(&h, 1.3, 4000, HBAR)?;
        worst = worst.max(max_abs_diff_mod_phase(&exact, &numeric));
    }
    r.check(Reference::bound("evolution.series_vs_numeric", worst, 1e-7, SPIN_J_SERIES));
    let mut closed: f64 = 0.0;
    for (twice, f) in [
        (1, analytic_evolution_spin_half as fn(&RotatingFieldParams, f64) -> hopfphase::Result<CMatrix>),
        (2, analytic_evolution_spin1),
    ] {
        let params = RotatingFieldParams::new(Spin::from_twice(twice)?, 0.9, 1.2, 0.4)?;
        for t in [0.3, 2.1, 5.0] {
            closed = closed.max(max_abs_diff(&f(&params, t)?, &analytic_evolution_spin_j(&params, t)?));
        }
    }
    r.check(Reference::bound("evolution.closed_forms", closed, 1e-10, SPIN_J_SERIES));

    for k in QutritCase::all() {
        let q = Params {
            case: Some(k.label().into()),
            ..Params::default()
        };
        merge(&mut r, &format!("qutrit.{}", k.label()), evolve_spin(&q)?);
    }
    merge(&mut r, "chern", chern(&Params::default())?);

    for dim in 2..=6 {
        let q = Params {
            random: true,
            dim: Some(dim),
            trials: Some(trials),
            seed: Some(seed),
            ..Params::default()
        };
        merge(&mut r, &format!("u1.dim{dim}"), phase_random(&q)?);
    }
    for dim in [4, 6, 8] {
        let q = Params {
            random: true,
            nonabelian: true,
            dim: Some(dim),
            trials: Some(trials.div_ceil(2)),
            seed: Some(seed),
            ..Params::default()
        };
        merge(&mut r, &format!("su2.dim{dim}"), phase_random(&q)?);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bpst: f64 = 0.0;
    for _ in 0..1000 {
        let theta = rng.random_range(0.0..PI);
        let s = random_s7_at(&mut rng, theta);
        let d = s.v.partials();
        let dv = d[0] * c(rng.random_range(-1.0..1.0), 0.0)
            + d[1] * c(rng.random_range(-1.0..1.0), 0.0)
            + d[2] * c(rng.random_range(-1.0..1.0), 0.0);
        let (h, dh) = s.chart(&dv);
        bpst = bpst.max(hopfphase::linalg::max_abs_diff2(&quaternionic_connection(&h, &dh), &bpst_connection(&s, &dv)));
    }
    r.check(Reference::bound("bpst", bpst, 1e-10, BPST));

    let theta = 1.0;
    let dets: Vec<f64> = (0..1000)
        .map(|_| {
            let s = S7Params {
                theta,
                u: random_euler(&mut rng),
                v: random_euler(&mut rng),
            };
            bipartite_from_composite(&s.state()).map(|b| b.det().re)
        })
        .collect::<Result<_, _>>()?;
    let spread = dets.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - dets.iter().cloned().fold(f64::INFINITY, f64::min);
    r.check(Reference::bound("entangle.det_c_spread", spread, 1e-10, DET_C));
    let mut chsh: f64 = 0.0;
    for _ in 0..100 {
        let b = BipartiteState::from_product_basis(&random_state(&mut rng, 4))?;
        chsh = chsh.max((chsh_oracle_max(&b).0 - chsh_max(&b)).abs());
    }
    r.check(Reference::bound("entangle.chsh_oracle", chsh, 1e-3, CHSH_ORACLE));
    Ok(r)
}
