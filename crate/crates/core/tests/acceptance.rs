//! Acceptance checks for the solver, one line per criterion.
//!
//! Runs with its own harness so every line is printed whether or not it
//! passes; the process exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use lidstone_fem::assembly::{assemble_cdr, ProblemCoefficients, StageTwoLoad};
use lidstone_fem::experiments::{
    convergence_rate, doubling, max_error, run_sweep, timing_scaling, Measurement, RunRecord,
    SweepConfig,
};
use lidstone_fem::mesh::{self, MeshKind, ShishkinParams};
use lidstone_fem::oracle::{exact_f, exact_w, make_exact_model};
use lidstone_fem::solver::{
    assemble_cdr_system, assemble_poisson_system, solve_fourth_order, solve_poisson,
};
use lidstone_fem::tridiag::{inf_norm, TridiagonalMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

fn model_error(kind: MeshKind, n: usize, eps: f64) -> f64 {
    let params = ShishkinParams::new(n, eps);
    let mesh = Arc::new(mesh::build(kind, &params).expect("valid mesh"));
    let coeffs = ProblemCoefficients::model(eps).expect("valid coefficients");
    let sol = solve_fourth_order(&mesh, &coeffs, exact_f).expect("solve");
    let model = make_exact_model(eps).expect("model");
    max_error(&sol.u, &model, Measurement::NodesOnly)
}

fn within_factor(value: f64, reference: f64, factor: f64) -> bool {
    value > 0.0 && value <= reference * factor && value >= reference / factor
}

fn shishkin_errors() -> Check {
    let targets = [(16, 0.0040), (64, 2.5e-4), (256, 1.6e-5)];
    let mut worst = 1.0f64;
    let mut failures = Vec::new();
    for eps in [1e-10, 1e-8, 1e-6] {
        for (n, reference) in targets {
            let err = model_error(MeshKind::Shishkin, n, eps);
            let ratio = err / reference;
            worst = worst.max(ratio.max(1.0 / ratio));
            if !within_factor(err, reference, 2.0) {
                failures.push(format!("eps={eps:e} N={n} err={err:.4e} ref={reference:e}"));
            }
        }
    }
    if failures.is_empty() {
        Ok(format!("worst ratio to reference {worst:.3}"))
    } else {
        Err(failures.join("; "))
    }
}

fn shishkin_rates() -> Check {
    let ns = doubling(16, 256);
    let errors: Vec<f64> = ns
        .iter()
        .map(|&n| model_error(MeshKind::Shishkin, n, 1e-10))
        .collect();
    let mut rates = Vec::new();
    for (k, pair) in errors.windows(2).enumerate() {
        let rate = convergence_rate(pair[1], pair[0]).ok_or("undefined rate")?;
        rates.push((ns[k + 1], rate));
    }
    let text = rates
        .iter()
        .map(|(n, r)| format!("N={n}:{r:.4}"))
        .collect::<Vec<_>>()
        .join(" ");
    if rates.iter().all(|&(_, r)| (1.80..=2.10).contains(&r)) {
        Ok(text)
    } else {
        Err(text)
    }
}

fn uniform_failure() -> Check {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    let mut outside = Vec::new();
    for n in doubling(4, 8192) {
        let err = model_error(MeshKind::Uniform, n, 1e-10);
        lo = lo.min(err);
        hi = hi.max(err);
        if !(1e-2..=1e-1).contains(&err) {
            outside.push(format!("N={n}:{err:.4e}"));
        }
    }
    let summary = format!("errors in [{lo:.4e}, {hi:.4e}]");
    if outside.is_empty() {
        Ok(summary)
    } else {
        Err(format!(
            "{summary}; outside [1e-2, 1e-1]: {}",
            outside.join(" ")
        ))
    }
}

fn epsilon_one() -> Check {
    let e16 = model_error(MeshKind::Uniform, 16, 1.0);
    let e1024 = model_error(MeshKind::Uniform, 1024, 1.0);
    let mut failures = Vec::new();
    if !within_factor(e16, 4.9304e-5, 2.0) {
        failures.push(format!("N=16 err={e16:.4e}"));
    }
    if !within_factor(e1024, 1.0613e-8, 2.0) {
        failures.push(format!("N=1024 err={e1024:.4e}"));
    }
    let ns = doubling(32, 8192);
    let errors: Vec<f64> = ns
        .iter()
        .map(|&n| model_error(MeshKind::Uniform, n, 1.0))
        .collect();
    let mut worst = 0.0f64;
    for (k, pair) in errors.windows(2).enumerate() {
        let rate = convergence_rate(pair[1], pair[0]).ok_or("undefined rate")?;
        worst = worst.max((rate - 2.0).abs());
        if (rate - 2.0).abs() > 0.05 {
            failures.push(format!("N={} rate={rate:.4}", ns[k + 1]));
        }
    }
    let summary = format!("N=16 {e16:.4e}, N=1024 {e1024:.4e}, max |R-2| {worst:.4}");
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; {}", failures.join("; ")))
    }
}

fn oracle_consistency() -> Check {
    let mut worst_bc = 0.0f64;
    let mut worst_root = 0.0f64;
    let mut worst_ode = 0.0f64;
    for eps in [1.0, 1e-2, 1e-4, 1e-6, 1e-8, 1e-10] {
        let m = make_exact_model(eps).map_err(|e| e.to_string())?;
        for r in m.root_residuals() {
            worst_root = worst_root.max(r.abs());
        }
        worst_bc = worst_bc.max(m.u(0.0).abs()).max(m.u(1.0).abs());
        for i in 0..=100 {
            worst_ode = worst_ode.max(m.stage_two_residual(i as f64 / 100.0).abs());
        }
    }
    let summary =
        format!("root {worst_root:.2e}, boundary {worst_bc:.2e}, substitution {worst_ode:.2e}");
    if worst_root <= 1e-10 && worst_bc <= 1e-10 && worst_ode <= 1e-9 {
        Ok(summary)
    } else {
        Err(summary)
    }
}

/// `(eps/h) S - C + (h/6) M` with `S = tridiag(-1, 2, -1)`,
/// `C = tridiag(-1, 0, 1)/2` and `M = tridiag(1, 4, 1)`, entry by entry.
fn reference_cdr(n_interior: usize, eps: f64, h: f64, i: usize, j: usize) -> f64 {
    let s = match i.abs_diff(j) {
        0 => 2.0,
        1 => -1.0,
        _ => 0.0,
    };
    let c = if j == i + 1 {
        0.5
    } else if j + 1 == i {
        -0.5
    } else {
        0.0
    };
    let m = match i.abs_diff(j) {
        0 => 4.0,
        1 => 1.0,
        _ => 0.0,
    };
    debug_assert!(i < n_interior && j < n_interior);
    eps / h * s - c + h / 6.0 * m
}

fn matrix_fidelity() -> Check {
    let mut worst = 0.0f64;
    for n in [4, 8, 16] {
        let mesh = mesh::build_uniform(n).map_err(|e| e.to_string())?;
        let h = 1.0 / n as f64;
        for eps in [1.0, 1e-4] {
            let coeffs = ProblemCoefficients::model(eps).map_err(|e| e.to_string())?;
            let a = assemble_cdr(&mesh, &coeffs).map_err(|e| e.to_string())?;
            let dense = a.to_dense();
            for (i, row) in dense.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    worst = worst.max((v - reference_cdr(n - 1, eps, h, i, j)).abs());
                }
            }
        }
    }
    let summary = format!("max entry difference {worst:.2e}");
    if worst <= 1e-13 {
        Ok(summary)
    } else {
        Err(summary)
    }
}

/// Gaussian elimination with partial pivoting on a dense copy.
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| a[x][k].abs().total_cmp(&a[y][k].abs()))
            .expect("non-empty");
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let factor = a[i][k] / a[k][k];
            if factor == 0.0 {
                continue;
            }
            for j in k..n {
                a[i][j] -= factor * a[k][j];
            }
            b[i] -= factor * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let tail: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - tail) / a[i][i];
    }
    x
}

fn solver_correctness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst_rel = 0.0f64;
    for _ in 0..100 {
        let n: usize = rng.gen_range(1..=256);
        let sub: Vec<f64> = (0..n.saturating_sub(1))
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let sup: Vec<f64> = (0..n.saturating_sub(1))
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let diag: Vec<f64> = (0..n)
            .map(|i| {
                let off = sub.get(i.wrapping_sub(1)).map_or(0.0, |v| v.abs())
                    + sup.get(i).map_or(0.0, |v| v.abs());
                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                sign * (off + rng.gen_range(0.1..2.0))
            })
            .collect();
        let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let a = TridiagonalMatrix::new(sub, diag, sup).map_err(|e| e.to_string())?;
        let x = a.solve(&rhs).map_err(|e| e.to_string())?;
        let reference = dense_solve(a.to_dense(), rhs);
        let diff: Vec<f64> = x.iter().zip(&reference).map(|(p, q)| p - q).collect();
        worst_rel = worst_rel.max(inf_norm(&diff) / inf_norm(&reference).max(f64::MIN_POSITIVE));
    }

    let mut worst_residual = 0.0f64;
    for eps in [1.0, 1e-2, 1e-4, 1e-6, 1e-8, 1e-10] {
        for kind in [MeshKind::Uniform, MeshKind::Shishkin] {
            for n in doubling(4, 8192) {
                let mesh = Arc::new(
                    mesh::build(kind, &ShishkinParams::new(n, eps)).map_err(|e| e.to_string())?,
                );
                let poisson = assemble_poisson_system(&mesh, exact_f);
                let w = solve_poisson(&mesh, exact_f).map_err(|e| e.to_string())?;
                let coeffs = ProblemCoefficients::model(eps).map_err(|e| e.to_string())?;
                let cdr = assemble_cdr_system(&mesh, &coeffs, &w, StageTwoLoad::default())
                    .map_err(|e| e.to_string())?;
                for system in [&poisson, &cdr] {
                    let x = system
                        .matrix
                        .solve(&system.rhs)
                        .map_err(|e| e.to_string())?;
                    let r = system
                        .matrix
                        .residual_norm(&x, &system.rhs)
                        .map_err(|e| e.to_string())?;
                    worst_residual = worst_residual.max(r / (1.0 + inf_norm(&system.rhs)));
                }
            }
        }
    }
    let summary = format!(
        "dense-oracle relative error {worst_rel:.2e}, scaled FEM residual {worst_residual:.2e}"
    );
    if worst_rel <= 1e-12 && worst_residual <= 1e-10 {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn total_seconds(r: &RunRecord) -> f64 {
    r.assembly_seconds + r.solve_seconds
}

fn linear_time() -> Check {
    let config = SweepConfig {
        epsilons: vec![1e-8],
        n_values: vec![1 << 12, 1 << 14, 1 << 16, 1 << 18, 1 << 20],
        mesh_kinds: vec![MeshKind::Uniform, MeshKind::Shishkin],
        repetitions: 5,
        jobs: 1,
        ..SweepConfig::default()
    };
    let records = run_sweep(&config).map_err(|e| e.to_string())?;
    let (uniform, shishkin): (Vec<RunRecord>, Vec<RunRecord>) = records
        .into_iter()
        .partition(|r| r.mesh_kind == MeshKind::Uniform);
    let slope_u = timing_scaling(&uniform).map_err(|e| e.to_string())?;
    let slope_s = timing_scaling(&shishkin).map_err(|e| e.to_string())?;
    let mut worst_ratio = 1.0f64;
    for (u, s) in uniform.iter().zip(&shishkin) {
        let ratio = total_seconds(s) / total_seconds(u);
        worst_ratio = worst_ratio.max(ratio.max(1.0 / ratio));
    }
    let summary = format!(
        "slope uniform {slope_u:.3}, shishkin {slope_s:.3}; worst runtime ratio {worst_ratio:.2}"
    );
    if slope_u <= 1.3 && slope_s <= 1.3 && worst_ratio < 2.0 {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn nodal_exactness() -> Check {
    let mut worst = 0.0f64;
    for kind in [MeshKind::Uniform, MeshKind::Shishkin] {
        for eps in [1.0, 1e-4, 1e-8, 1e-10] {
            for n in doubling(4, 8192) {
                let mesh = Arc::new(
                    mesh::build(kind, &ShishkinParams::new(n, eps)).map_err(|e| e.to_string())?,
                );
                let w = solve_poisson(&mesh, exact_f).map_err(|e| e.to_string())?;
                for (x, v) in mesh.nodes().iter().zip(w.values()) {
                    let exact = exact_w(*x).map_err(|e| e.to_string())?;
                    worst = worst.max((exact - v).abs());
                }
            }
        }
    }
    let summary = format!("max nodal error {worst:.2e}");
    if worst <= 1e-12 {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "shishkin errors within factor 2",
            limit: Duration::from_secs(5),
            run: shishkin_errors,
        },
        Criterion {
            id: 2,
            name: "shishkin rates in [1.80, 2.10]",
            limit: Duration::from_secs(10),
            run: shishkin_rates,
        },
        Criterion {
            id: 3,
            name: "uniform error stays in [1e-2, 1e-1]",
            limit: Duration::from_secs(30),
            run: uniform_failure,
        },
        Criterion {
            id: 4,
            name: "eps=1 second-order convergence",
            limit: Duration::from_secs(10),
            run: epsilon_one,
        },
        Criterion {
            id: 5,
            name: "closed-form oracle consistency",
            limit: Duration::from_secs(1),
            run: oracle_consistency,
        },
        Criterion {
            id: 6,
            name: "uniform matrix equals stencil form",
            limit: Duration::from_secs(1),
            run: matrix_fidelity,
        },
        Criterion {
            id: 7,
            name: "tridiagonal solve and residuals",
            limit: Duration::from_secs(5),
            run: solver_correctness,
        },
        Criterion {
            id: 8,
            name: "linear solve-time scaling",
            limit: Duration::from_secs(60),
            run: linear_time,
        },
        Criterion {
            id: 9,
            name: "poisson stage nodally exact",
            limit: Duration::from_secs(1),
            run: nodal_exactness,
        },
    ];

    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= c.limit => (true, d),
            Ok(d) => (
                false,
                format!("{d}; runtime {elapsed:.2?} over {:?}", c.limit),
            ),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {} {:<40} {} ({:.2?}) {}",
            c.id,
            c.name,
            if ok { "PASS" } else { "FAIL" },
            elapsed,
            detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
