use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use hopfphase::abelian::{
    chern_number_cp1, closure_gap, connection_rate, cp1_sphere, cp2_second_chern, overlap_identity_check,
    phase_breakdown, PatchPolicy,
};
use hopfphase::entanglement::{
    bipartite_from_composite, chsh_expectation, chsh_oracle_max, BipartiteState, CHSHDirections,
};
use hopfphase::evolution::{
    analytic_evolution_spin1, analytic_evolution_spin_half, analytic_evolution_spin_j, angular_momentum_matrices,
    expectation_j, integrate_schrodinger, time_ordered_propagator, Hamiltonian, RotatingFieldHamiltonian,
    RotatingFieldParams, SinusoidalHamiltonian, Spin, HBAR,
};
use hopfphase::hilbert::{hopf_project, reconstruct_state, select_chart, StateVector};
use hopfphase::linalg::{
    c, expectation, hermiticity_defect, max_abs_diff, max_abs_diff2, max_abs_diff_mod_phase, unitarity_defect,
    CMatrix, CMatrix2, I,
};
use hopfphase::quaternionic::{
    fiber_reconstruction_check, hp_project, nonabelian_overlap_check, quaternionic_connection, quaternions_from_state,
    second_chern_s4, to_quaternionic_frame, S7Params,
};
use hopfphase::sampling::{random_euler, random_hermitian, random_s7_at, random_state};
use hopfphase::systems::{Oscillator, QutritCase, SpinHalfField};
use hopfphase::tolerances::AUTO_PATCH_SWITCH;
use hopfphase::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn timed(budget: Option<f64>, f: impl FnOnce() -> Outcome) -> (Outcome, Duration, bool) {
    let start = Instant::now();
    let o = f();
    let elapsed = start.elapsed();
    let in_time = budget.is_none_or(|b| elapsed.as_secs_f64() < b);
    (o, elapsed, in_time)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_sinusoidal(r: &mut ChaCha8Rng, dim: usize) -> Arc<dyn Hamiltonian> {
    Arc::new(SinusoidalHamiltonian {
        h0: random_hermitian(r, dim),
        h1: random_hermitian(r, dim),
        omega: 1.7,
    })
}

fn oscillator() -> Outcome {
    let o = Oscillator::new(PI / 2.0, 1.3);
    let h = o.shared_hamiltonian(HBAR);
    let traj = integrate_schrodinger(h.clone(), &o.initial_state(), 2.0 * PI / o.omega, 2000, HBAR).unwrap();
    let b = phase_breakdown(&traj, h.as_ref(), PatchPolicy::Auto).unwrap();
    let overlap = traj.last().inner(traj.first()).conj();
    let e_geo = (b.geometric + PI).abs();
    let e_dyn = (b.dynamical - 2.0 * PI).abs();
    let e_ov = (overlap - Complex64::from_polar(1.0, -PI)).norm();
    outcome(
        e_geo < 1e-6 && e_dyn < 1e-6 && e_ov < 1e-8,
        format!("|int A + pi| {e_geo:.2e}, |dyn - 2pi| {e_dyn:.2e}, |overlap + 1| {e_ov:.2e}"),
    )
}

fn spin_half() -> Outcome {
    let (larmor, alpha, omega) = (1.2, 0.8, 0.9);
    let s = SpinHalfField::new(larmor, alpha, omega).unwrap();
    let t_final = 4.0 * PI / omega;
    let h = s.shared_hamiltonian(HBAR);
    let traj = integrate_schrodinger(h.clone(), &s.initial_state(), t_final, 80_000, HBAR).unwrap();
    let (mut numeric, mut used) = (0.0f64, 0usize);
    for (t, state) in traj.times().iter().zip(traj.states()).skip(1) {
        let psi = state.amplitudes();
        if psi[1].norm() < AUTO_PATCH_SWITCH {
            continue;
        }
        used += 1;
        let hm = h.at(*t);
        let velocity = (&hm * psi) * c(0.0, -1.0 / HBAR);
        let a = connection_rate(psi, &velocity, 1).unwrap();
        numeric = numeric.max((a + expectation(&hm, psi).re / HBAR + omega / 2.0).abs());
    }
    let coverage = used as f64 / (traj.len() - 1) as f64;
    let closed = (1..=4000)
        .map(|k| t_final * k as f64 / 4000.0)
        .map(|t| (s.connection_rate(t) + s.energy(t) / HBAR + omega / 2.0).abs())
        .fold(0.0, f64::max);
    let check = overlap_identity_check(&traj, h.as_ref()).unwrap();
    let e_exact = (check.lhs - s.overlap(0.0, t_final)).norm();
    outcome(
        numeric < 1e-7 && closed < 1e-7 && coverage > 0.8 && check.error < 1e-8 && e_exact < 1e-8,
        format!(
            "rate sum {numeric:.2e} on {:.0}% of samples, closed form {closed:.2e}, identity {:.2e}, closed-form overlap {e_exact:.2e}",
            100.0 * coverage,
            check.error
        ),
    )
}

fn evolution() -> Outcome {
    let mut series: f64 = 0.0;
    let mut rk4: f64 = 0.0;
    for twice in 1..=3 {
        let p = RotatingFieldParams::new(Spin::from_twice(twice).unwrap(), 1.4, 0.7, 0.5).unwrap();
        let h = RotatingFieldHamiltonian::new(p, HBAR);
        for t in [0.4, 1.7, 3.1] {
            let exact = analytic_evolution_spin_j(&p, t).unwrap();
            let numeric = time_ordered_propagator(&h, t, 4000, HBAR).unwrap();
            series = series.max(max_abs_diff_mod_phase(&exact, &numeric));
        }
        let dim = p.spin.dim();
        let t = 2.3;
        let exact = analytic_evolution_spin_j(&p, t).unwrap();
        let mut columns = CMatrix::zeros(dim, dim);
        for k in 0..dim {
            let traj = integrate_schrodinger(
                RotatingFieldHamiltonian::shared(p, HBAR),
                &StateVector::basis(dim, k).unwrap(),
                t,
                4000,
                HBAR,
            )
            .unwrap();
            columns.set_column(k, traj.last().amplitudes());
        }
        rk4 = rk4.max(max_abs_diff_mod_phase(&exact, &columns));
    }
    let mut closed: f64 = 0.0;
    type Closed = fn(&RotatingFieldParams, f64) -> hopfphase::Result<CMatrix>;
    for (twice, f) in [(1, analytic_evolution_spin_half as Closed), (2, analytic_evolution_spin1)] {
        for (larmor, alpha, omega) in [(0.9, 1.2, 0.4), (1.3, 0.3, 1.1)] {
            let p = RotatingFieldParams::new(Spin::from_twice(twice).unwrap(), larmor, alpha, omega).unwrap();
            for t in [0.3, 2.1, 5.0] {
                closed = closed.max(max_abs_diff(&f(&p, t).unwrap(), &analytic_evolution_spin_j(&p, t).unwrap()));
            }
        }
    }
    outcome(
        series < 1e-7 && rk4 < 1e-7 && closed < 1e-10,
        format!("series vs time-ordered {series:.2e}, vs RK4 {rk4:.2e}, closed forms vs series {closed:.2e}"),
    )
}

fn qutrit_gaps(case: QutritCase, steps: usize) -> (f64, f64) {
    let traj = integrate_schrodinger(
        RotatingFieldHamiltonian::shared(case.params(), HBAR),
        &case.initial_state(),
        case.period(),
        steps,
        HBAR,
    )
    .unwrap();
    let j = expectation_j(&traj, &angular_momentum_matrices(Spin::one(), HBAR)).unwrap();
    let (a, b) = (j[0], j[j.len() - 1]);
    let gap = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
    (closure_gap(&traj).unwrap(), gap)
}

fn qutrit() -> Outcome {
    let p = QutritCase::One.params();
    let ratio_ok = (p.beta().tan() - 1.0).abs() < 1e-12 && (p.vartheta() - 5.0 * p.omega).abs() < 1e-12;
    let one = qutrit_gaps(QutritCase::One, 8000);
    let two = qutrit_gaps(QutritCase::Two, 8000);
    let three = qutrit_gaps(QutritCase::Three, 60_000);
    outcome(
        ratio_ok && one.0 < 1e-6 && one.1 < 1e-6 && two.0.min(two.1) > 1e-2 && three.0.min(three.1) > 1e-2,
        format!(
            "case 1 gaps {:.2e}/{:.2e}, case 2 {:.3}/{:.3}, case 3 {:.3}/{:.3}",
            one.0, one.1, two.0, two.1, three.0, three.1
        ),
    )
}

fn chern() -> Outcome {
    let (theta, phi) = cp1_sphere(64);
    let cp1 = chern_number_cp1(theta, phi).unwrap();
    let cp2 = cp2_second_chern(24).unwrap();
    let s4 = second_chern_s4(32).unwrap();
    outcome(
        (cp1 - 1.0).abs() < 1e-6 && (cp2 - 1.0).abs() < 1e-2 && (s4 - 1.0).abs() < 1e-2,
        format!("CP1 {cp1:.10}, CP2 {cp2:.6}, S4 {s4:.6}"),
    )
}

fn abelian_suite() -> Outcome {
    let mut worst = Vec::new();
    for dim in 2..=6 {
        let e = (0..100u64)
            .into_par_iter()
            .map(|i| {
                let mut r = rng(1000 * dim as u64 + i);
                let h = random_sinusoidal(&mut r, dim);
                let psi0 = random_state(&mut r, dim);
                let traj = integrate_schrodinger(h.clone(), &psi0, 1.0, 10_000, HBAR).unwrap();
                overlap_identity_check(&traj, h.as_ref()).unwrap().error
            })
            .reduce(|| 0.0, f64::max);
        worst.push(e);
    }
    let max = worst.iter().cloned().fold(0.0, f64::max);
    outcome(
        max < 1e-8,
        format!("500 draws, worst per dimension 2..6: {}", worst.iter().map(|e| format!("{e:.1e}")).collect::<Vec<_>>().join(" ")),
    )
}

fn nonabelian_suite() -> Outcome {
    let mut rows = Vec::new();
    for dim in [4usize, 6, 8] {
        let (o, f) = (0..50u64)
            .into_par_iter()
            .map(|i| {
                let mut r = rng(7000 * dim as u64 + i);
                let h = random_sinusoidal(&mut r, dim);
                let psi0 = random_state(&mut r, dim);
                let traj = integrate_schrodinger(h.clone(), &psi0, 1.0, 10_000, HBAR).unwrap();
                let o = nonabelian_overlap_check(&traj, h.as_ref()).unwrap().error;
                let f = fiber_reconstruction_check(&traj, h.as_ref()).unwrap().error;
                (o, f)
            })
            .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
        rows.push((dim, o, f));
    }
    let pass = rows.iter().all(|r| r.1 < 1e-6 && r.2 < 1e-6);
    outcome(
        pass,
        format!(
            "150 draws, overlap/fiber {}",
            rows.iter().map(|r| format!("dim{} {:.1e}/{:.1e}", r.0, r.1, r.2)).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn bpst() -> Outcome {
    let mut r = rng(42);
    let (mut worst, mut chart): (f64, f64) = (0.0, 0.0);
    for _ in 0..1000 {
        let theta = r.random_range(0.05..PI - 0.05);
        let s = random_s7_at(&mut r, theta);
        let d = s.v.partials();
        let dv = d[0] * c(r.random_range(-1.0..1.0), 0.0)
            + d[1] * c(r.random_range(-1.0..1.0), 0.0)
            + d[2] * c(r.random_range(-1.0..1.0), 0.0);
        let (h, dh) = s.chart(&dv);
        let p = hp_project(&quaternions_from_state(&s.state()).unwrap(), 0).unwrap();
        chart = chart.max(max_abs_diff2(&p.h[1].0, &h[1].0));
        let v: CMatrix2 = s.v.matrix();
        let expected = to_quaternionic_frame(&(dv * v.adjoint() * (-I * (theta / 2.0).sin().powi(2))));
        worst = worst.max(max_abs_diff2(&quaternionic_connection(&h, &dh), &expected));
    }
    outcome(
        worst < 1e-10 && chart < 1e-10,
        format!("1000 draws, connection {worst:.2e}, chart vs projected state {chart:.2e}"),
    )
}

fn entanglement() -> Outcome {
    let mut r = rng(9);
    let mut spread: f64 = 0.0;
    let mut theta_gap: f64 = 0.0;
    for k in 0..10 {
        let theta = PI * (k as f64 + 0.5) / 10.0;
        let dets: Vec<Complex64> = (0..100)
            .map(|_| {
                let s = S7Params {
                    theta,
                    u: random_euler(&mut r),
                    v: random_euler(&mut r),
                };
                bipartite_from_composite(&s.state()).unwrap().det()
            })
            .collect();
        for a in &dets {
            theta_gap = theta_gap.max((a - c(0.5 * theta.cos(), 0.0)).norm());
            for b in &dets {
                spread = spread.max((a - b).norm());
            }
        }
    }
    let mut oracle: f64 = 0.0;
    let mut attained: f64 = 0.0;
    for _ in 0..100 {
        let b = BipartiteState::from_product_basis(&random_state(&mut r, 4)).unwrap();
        let formula = 2.0 * (1.0 + 4.0 * b.det().norm_sqr()).sqrt();
        let (best, dirs): (f64, CHSHDirections) = chsh_oracle_max(&b);
        oracle = oracle.max((best - formula).abs());
        attained = attained.max((chsh_expectation(&b, &dirs) - best).abs());
    }
    outcome(
        spread < 1e-10 && theta_gap < 1e-10 && oracle < 1e-3 && attained < 1e-9,
        format!(
            "det c spread {spread:.3e}, max |det c - cos(theta)/2| {theta_gap:.3e} over 1000 draws; CHSH oracle {oracle:.2e} on 100 states"
        ),
    )
}

fn run_cli(args: &[&str], threads: &str) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_hopfphase"))
        .args(args)
        .env("HOPFPHASE_THREADS", threads)
        .output()
        .expect("binary runs");
    (out.stdout, out.status.code().unwrap_or(-1))
}

fn cli_file(args: &[&str], threads: &str, dir: &Path, name: &str) -> Vec<u8> {
    let path = dir.join(name);
    let mut all: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    all.extend(["--out", &p]);
    let (_, code) = run_cli(&all, threads);
    assert!(code == 0 || code == 1, "unexpected exit {code}");
    std::fs::read(path).unwrap()
}

fn structural() -> Outcome {
    let mut r = rng(5);
    let mut defects: Vec<(&str, f64)> = Vec::new();

    let mut unitary: f64 = 0.0;
    for twice in 1..=6 {
        let p = RotatingFieldParams::new(Spin::from_twice(twice).unwrap(), 1.1, 0.9, 0.6).unwrap();
        for t in [0.5, 3.3] {
            unitary = unitary.max(unitarity_defect(&analytic_evolution_spin_j(&p, t).unwrap()));
        }
    }
    defects.push(("propagator unitarity", unitary));

    let mut algebra: f64 = 0.0;
    for twice in 1..=6 {
        let [jx, jy, jz] = angular_momentum_matrices(Spin::from_twice(twice).unwrap(), HBAR);
        let comm = &jx * &jy - &jy * &jx - &jz * I;
        algebra = algebra.max(comm.iter().map(|z| z.norm()).fold(0.0, f64::max));
        for m in [&jx, &jy, &jz] {
            algebra = algebra.max(hermiticity_defect(m)).max(m.trace().norm());
        }
    }
    defects.push(("spin algebra, hermiticity, trace", algebra));

    let mut norm: f64 = 0.0;
    let mut charts: f64 = 0.0;
    let mut traceless: f64 = 0.0;
    for dim in [2usize, 4, 6] {
        let h = random_sinusoidal(&mut r, dim);
        let psi0 = random_state(&mut r, dim);
        let traj = integrate_schrodinger(h, &psi0, 1.0, 500, HBAR).unwrap();
        for s in traj.states() {
            norm = norm.max((s.norm() - 1.0).abs());
            let p = hopf_project(s, select_chart(s)).unwrap();
            charts = charts.max(reconstruct_state(&p).max_abs_diff(s));
        }
        if dim % 2 == 0 {
            let q = quaternions_from_state(traj.last()).unwrap();
            let p = hp_project(&q, 0).unwrap();
            let dh: Vec<_> = (0..q.len()).map(|_| hopfphase::sampling::random_quaternion(&mut r)).collect();
            let a = quaternionic_connection(&p.h, &dh);
            traceless = traceless.max(a.trace().norm()).max(max_abs_diff2(&a, &a.adjoint()));
        }
    }
    defects.push(("state normalization", norm));
    defects.push(("chart round trip", charts));
    defects.push(("SU(2) connection trace/hermiticity", traceless));
    let invariants_ok = defects.iter().all(|d| d.1 < 1e-10);

    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 3] = [
        &["phase", "--random", "--dim", "4", "--trials", "12", "--steps", "2000", "--seed", "11"],
        &["phase", "--random", "--nonabelian", "--dim", "4", "--trials", "6", "--steps", "1000", "--seed", "3"],
        &["entangle", "--random", "--sweep", "0:pi:9", "--seed", "5"],
    ];
    let mut identical = true;
    for (i, args) in runs.iter().enumerate() {
        let a = cli_file(args, "1", dir.path(), &format!("a{i}.json"));
        let b = cli_file(args, "4", dir.path(), &format!("b{i}.json"));
        let csv_a = cli_file(args, "2", dir.path(), &format!("a{i}.csv"));
        let csv_b = cli_file(args, "3", dir.path(), &format!("b{i}.csv"));
        let (stdout, _) = run_cli(args, "2");
        identical &= !a.is_empty() && a == b && csv_a == csv_b && stdout == a;
    }
    outcome(
        invariants_ok && identical,
        format!(
            "{}; CLI byte-identical across runs and thread counts: {identical}",
            defects.iter().map(|d| format!("{} {:.1e}", d.0, d.1)).collect::<Vec<_>>().join(", ")
        ),
    )
}

type Criterion = (&'static str, Option<f64>, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("oscillator phases", Some(1.0), oscillator),
        ("spin-1/2 rotating field", Some(5.0), spin_half),
        ("spin-J propagator", Some(10.0), evolution),
        ("qutrit periodicity", Some(10.0), qutrit),
        ("Chern numbers", Some(120.0), chern),
        ("U(1) overlap identity", Some(60.0), abelian_suite),
        ("SU(2) overlap identity", Some(120.0), nonabelian_suite),
        ("BPST connection", Some(5.0), bpst),
        ("entanglement relation", Some(60.0), entanglement),
        ("structural invariants", None, structural),
    ];
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let (o, elapsed, in_time) = timed(*budget, f);
        let pass = o.pass && in_time;
        if !pass {
            failed += 1;
        }
        let budget = budget.map(|b| format!(" (budget {b:.0} s)")).unwrap_or_default();
        println!(
            "{} {:>2} {name}: {} [{:.2} s{budget}]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
