//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report is always printed, and
//! exits non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use bottomless::bounds::{
    closed_form_theta0, epsilon_bound, iterate_w_max, optimal_bound, simple_bound, w_true, BoundInputs,
    IterationOptions, MaximizationScheme,
};
use bottomless::exactstate::{local_energy, numerical_local_energy, GaussianState};
use bottomless::fdsolver::{
    assemble_hamiltonian, confinement_scan, lowest_eigenvalues, EigenOptions, GridPolicy, GridSpec, ScanOptions,
    Verdict,
};
use bottomless::potential::{evaluate, extract_section, Window};
use bottomless::{Couplings, GreekParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn timed(limit: Duration, elapsed: Duration) -> Result<(), String> {
    if elapsed < limit {
        Ok(())
    } else {
        Err(format!("took {elapsed:?}, limit {limit:?}"))
    }
}

fn couplings(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Couplings {
    GreekParams::new(alpha, beta, gamma, delta)
        .unwrap()
        .to_couplings()
        .unwrap()
}

/// First row index whose maximum is within `tol` of `target`.
fn rows_to_reach(maxima: &[f64], target: f64, tol: f64) -> Option<usize> {
    maxima.iter().position(|m| (m - target).abs() < tol)
}

fn table_one_a() -> Outcome {
    let start = Instant::now();
    let trace = iterate_w_max(1.0, 0.4, &IterationOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let r1 = trace.rows[1];
    let maxima: Vec<f64> = trace.rows.iter().map(|r| r.maximum).collect();
    let reached = rows_to_reach(&maxima, 1.14109612, 1e-7);
    let ok = (r1.eta - 0.895).abs() < 5e-4
        && (r1.theta - 1.0464).abs() < 5e-5
        && (r1.maximum - 1.14059).abs() < 5e-6
        && (trace.final_bound - 1.14109612).abs() < 1e-7
        && reached.is_some_and(|n| n <= 6);
    timed(Duration::from_millis(1), elapsed)?;
    check(
        ok,
        format!(
            "row 1 = ({:.7}, {:.7}, {:.7}), limit {:.10} reached at row {:?}, {elapsed:?}",
            r1.eta, r1.theta, r1.maximum, trace.final_bound, reached
        ),
    )
}

fn table_one_b() -> Outcome {
    let trace = iterate_w_max(2.0, 0.4, &IterationOptions::default()).map_err(|e| e.to_string())?;
    let theta0 = trace.rows[0].theta;
    let maxima: Vec<f64> = trace.rows.iter().map(|r| r.maximum).collect();
    let reached = rows_to_reach(&maxima, 2.0739853, 1e-6);
    let ok = (trace.final_bound - 2.0739853).abs() < 1e-6
        && (theta0 - 1.677).abs() < 5e-4
        && reached.is_some_and(|n| n <= 6);
    check(
        ok,
        format!(
            "theta_0 = {theta0:.7}, limit {:.10} reached at row {:?}",
            trace.final_bound, reached
        ),
    )
}

fn closed_form_endpoints() -> Outcome {
    let near_zero = closed_form_theta0(1e-12).map_err(|e| e.to_string())?;
    let half = closed_form_theta0(0.5).map_err(|e| e.to_string())?;
    let ok = (near_zero - 0.5).abs() < 1e-5 && (half - 0.438691).abs() < 1e-5;
    check(ok, format!("rho2 -> 0: {near_zero:.8}, rho2 = 1/2: {half:.8}"))
}

fn substitution_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let gamma = rng.random_range(0.1..3.0);
        let rho2 = rng.random_range(0.01..0.49);
        let delta = 2.0 * gamma * rho2;
        let sum_ab = rng.random_range(-4.0..4.0);
        let eta = rng.random_range(0.01..0.99);
        let b = BoundInputs::new(sum_ab, gamma, delta).unwrap();
        let eps = 2.0 * rho2 * eta;
        let lhs = epsilon_bound(&b, eps).map_err(|e| e.to_string())?;
        // both sides written out here, independently of the library formulas
        let direct = sum_ab * (1.0 - eps) + 2.0 * ((delta - gamma * eps) * (2.0 * eps - eps * eps)).sqrt();
        let sinh = -(1.0 / (2.0 * gamma)).sqrt() * sum_ab / 2.0;
        let w = eta * sinh + (eta * (1.0 - eta) * (1.0 - rho2 * eta)).sqrt();
        let rhs = sum_ab + 2.0f64.powf(1.5) * delta / gamma.sqrt() * w;
        let via_library = sum_ab + 2.0f64.powf(1.5) * delta / gamma.sqrt() * w_true(eta, sinh, rho2);
        let scale = lhs.abs().max(rhs.abs()).max(1e-300);
        worst = worst
            .max((lhs - rhs).abs() / scale)
            .max((direct - rhs).abs() / scale)
            .max((via_library - rhs).abs() / scale);
    }
    check(worst < 1e-12, format!("max relative deviation {worst:.3e} over 1000 samples"))
}

fn minorant_chain() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let opts = IterationOptions::default();
    let mut violations = 0;
    for _ in 0..1000 {
        let alpha = rng.random_range(-3.0..3.0);
        let beta = rng.random_range(-3.0..3.0);
        let gamma = rng.random_range(0.1..3.0);
        let delta = gamma * rng.random_range(0.001..0.999);
        let b = BoundInputs::from_greek(&GreekParams::new(alpha, beta, gamma, delta).unwrap()).unwrap();
        let simple = simple_bound(&b).map_err(|e| e.to_string())?;
        let iterate = optimal_bound(&b, MaximizationScheme::FixedPoint, &opts)
            .map_err(|e| e.to_string())?
            .value;
        let oracle = optimal_bound(&b, MaximizationScheme::Oracle, &opts)
            .map_err(|e| e.to_string())?
            .value;
        // only rounding slack between the three evaluations
        let slack = 1e-12 * oracle.abs().max(1.0);
        if !(simple <= iterate + slack && iterate <= oracle + slack) {
            violations += 1;
        }
    }
    check(violations == 0, format!("{violations} violations over 1000 samples"))
}

/// `(Hψ)/ψ = ΔS − |∇S|² + V` with `∇S`, `ΔS` from central differences of the
/// exponent. `S` is quadratic in each variable separately, so the
/// differences are exact up to rounding at a coarse step.
fn exponent_oracle(alpha: f64, beta: f64, gamma: f64, c: &Couplings, x: f64, y: f64) -> f64 {
    let s = |x: f64, y: f64| 0.5 * (alpha * x * x + beta * y * y + gamma * x * x * y * y);
    let h = 0.125;
    let sx = (s(x + h, y) - s(x - h, y)) / (2.0 * h);
    let sy = (s(x, y + h) - s(x, y - h)) / (2.0 * h);
    let sxx = (s(x + h, y) - 2.0 * s(x, y) + s(x - h, y)) / (h * h);
    let syy = (s(x, y + h) - 2.0 * s(x, y) + s(x, y - h)) / (h * h);
    sxx + syy - (sx * sx + sy * sy) + evaluate(c, x, y)
}

fn critical_exactness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    let mut worst_stencil = 0.0f64;
    for _ in 0..1000 {
        let alpha = rng.random_range(0.2..2.0);
        let beta = rng.random_range(0.2..2.0);
        let gamma = rng.random_range(0.2..2.0);
        let c = couplings(alpha, beta, gamma, 0.0);
        let state = GaussianState::new(alpha, beta, gamma);
        let x = rng.random_range(-1.0..1.0);
        let y = rng.random_range(-1.0..1.0);
        let e = local_energy(&state, 0.0, x, y);
        worst = worst.max((exponent_oracle(alpha, beta, gamma, &c, x, y) - (alpha + beta)).abs());
        worst = worst.max((e - (alpha + beta)).abs());
        worst_stencil = worst_stencil.max((numerical_local_energy(&state, &c, x, y, 1e-3) - (alpha + beta)).abs());
    }
    if !(worst < 1e-10 && worst_stencil < 1e-10) {
        return Err(format!(
            "local energy deviates by {worst:.3e} (exponent oracle), {worst_stencil:.3e} (stencil)"
        ));
    }

    let c = couplings(1.0, 1.0, 1.0, 0.0);
    let solve = |n| {
        let h = assemble_hamiltonian(&c, &GridSpec::new(7.0, n).unwrap()).unwrap();
        lowest_eigenvalues(&h, 1, &EigenOptions::default()).unwrap()
    };
    let coarse = solve(201);
    let fine = solve(401);
    let elapsed = start.elapsed();
    let err_coarse = coarse.eigenvalues[0] - 2.0;
    let err_fine = fine.eigenvalues[0] - 2.0;
    let ratio = err_coarse / err_fine;
    timed(Duration::from_secs(60), elapsed)?;
    check(
        coarse.converged && fine.converged && err_coarse.abs() < 5e-3 && (3.5..4.5).contains(&ratio),
        format!(
            "local energy to {worst:.1e}/{worst_stencil:.1e}; E0 = {:.7} (n=201), {:.7} (n=401), error ratio {ratio:.3}, {elapsed:.1?}",
            coarse.eigenvalues[0], fine.eigenvalues[0]
        ),
    )
}

/// `k`-th eigenvalue (from 0) of the symmetric tridiagonal matrix with
/// diagonal `d` and constant off-diagonal `e`, by Sturm-count bisection.
fn tridiagonal_eigenvalue(d: &[f64], e: f64, k: usize) -> f64 {
    let below = |x: f64| {
        let mut count = 0;
        let mut q = 1.0;
        for (i, &di) in d.iter().enumerate() {
            let prev = if i == 0 { 0.0 } else { e * e / q };
            q = di - x - prev;
            if q == 0.0 {
                q = -1e-300;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    let reach = d.iter().fold(0.0f64, |m, v| m.max(v.abs())) + 2.0 * e.abs();
    let (mut lo, mut hi) = (-reach, reach);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if below(mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn harmonic_sanity() -> Outcome {
    let start = Instant::now();
    let grid = GridSpec::new(8.0, 161).unwrap();
    let h = assemble_hamiltonian(&Couplings::new(1.0, 1.0, 0.0, 0.0), &grid).map_err(|e| e.to_string())?;
    let r = lowest_eigenvalues(&h, 3, &EigenOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    timed(Duration::from_secs(30), elapsed)?;

    // the operator separates: each 2-D level is a sum of two 1-D levels
    let step = grid.spacing();
    let diag: Vec<f64> = (0..grid.points)
        .map(|i| 2.0 / (step * step) + grid.coord(i).powi(2))
        .collect();
    let e0 = tridiagonal_eigenvalue(&diag, -1.0 / (step * step), 0);
    let e1 = tridiagonal_eigenvalue(&diag, -1.0 / (step * step), 1);
    let discrete = [2.0 * e0, e0 + e1, e0 + e1];
    let solver_gap = r
        .eigenvalues
        .iter()
        .zip(discrete)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let errors: Vec<String> = r
        .eigenvalues
        .iter()
        .zip([2.0, 4.0, 4.0])
        .map(|(a, b)| format!("{:.2e}", a - b))
        .collect();
    let worst = r
        .eigenvalues
        .iter()
        .zip([2.0, 4.0, 4.0])
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    check(
        r.converged && worst < 2e-3,
        format!(
            "eigenvalues {:.6?}, errors [{}] (limit 2e-3); exact discrete levels {:.6?}, solver deviation {solver_gap:.1e}, {elapsed:.1?}",
            r.eigenvalues,
            errors.join(", "),
            discrete
        ),
    )
}

fn simple_bound_check() -> Outcome {
    let c = couplings(0.0, 0.0, 1.1, 0.1);
    let solve = |l| {
        let h = assemble_hamiltonian(&c, &GridSpec::with_spacing(l, 0.05).unwrap()).unwrap();
        lowest_eigenvalues(&h, 1, &EigenOptions::default()).unwrap()
    };
    let small = solve(8.0);
    let large = solve(12.0);
    let (e8, e12) = (small.eigenvalues[0], large.eigenvalues[0]);
    check(
        small.converged && large.converged && e8 >= -1e-2 && e12 >= -1e-2 && (e8 - e12).abs() < 1e-2,
        format!("E0(L=8) = {e8:.8}, E0(L=12) = {e12:.8}"),
    )
}

fn collapse_detector() -> Outcome {
    let opts = ScanOptions {
        policy: GridPolicy::FixedSpacing(0.05),
        ..Default::default()
    };
    let boxes = [6.0, 10.0, 14.0];
    let down = confinement_scan(&couplings(0.0, 0.0, 1.1, -0.1), &boxes, &opts).map_err(|e| e.to_string())?;
    let up = confinement_scan(&couplings(0.0, 0.0, 1.1, 0.1), &boxes, &opts).map_err(|e| e.to_string())?;
    let falling: Vec<f64> = down.ground_energies.iter().map(|p| p.ground_energy).collect();
    let steady: Vec<f64> = up.ground_energies.iter().map(|p| p.ground_energy).collect();
    let drops_ok = falling.windows(2).all(|w| w[0] - w[1] > 1e-2);
    check(
        down.verdict == Verdict::Collapsing && drops_ok && up.verdict == Verdict::Confined,
        format!(
            "delta=-0.1: {} {falling:.4?}; delta=+0.1: {} {steady:.6?}",
            down.verdict, up.verdict
        ),
    )
}

fn contour_residual() -> Outcome {
    let c = Couplings::new(-1.0, -1.0, 0.0, 1.21);
    let w = Window::square(10.0, 401).map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    for energy in [-2.25, -6.25, -12.25, -20.25] {
        let set = extract_section(&c, energy, &w).map_err(|e| e.to_string())?;
        let tol = 1e-6 * energy.abs().max(1.0);
        let verts: Vec<(f64, f64)> = set.vertices().collect();
        let worst = verts
            .iter()
            .map(|&(x, y)| (evaluate(&c, x, y) - energy).abs())
            .fold(0.0, f64::max);
        // every mirrored vertex coincides with an emitted one
        let asymmetry = verts
            .iter()
            .map(|&(x, y)| {
                verts
                    .iter()
                    .map(|&(u, v)| (u - y).abs().max((v - x).abs()))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        if verts.is_empty() || worst > tol || asymmetry > 1e-9 {
            return Err(format!(
                "E = {energy}: {} vertices, residual {worst:.2e}, asymmetry {asymmetry:.2e}",
                verts.len()
            ));
        }
        notes.push(format!("E={energy}: {} pts, {worst:.1e}", verts.len()));
    }
    Ok(notes.join("; "))
}

fn assembled_bound() -> Outcome {
    let b = BoundInputs::new(-2.0 * 2.2f64.sqrt(), 1.1, 0.88).map_err(|e| e.to_string())?;
    let r = optimal_bound(&b, MaximizationScheme::FixedPoint, &IterationOptions::default())
        .map_err(|e| e.to_string())?;
    // prefactor 2^{3/2}·0.88/√1.1 times the converged W of the first table
    let expected = -2.0 * 2.2f64.sqrt() + 2.0f64.powf(1.5) * 0.88 / 1.1f64.sqrt() * 1.14109612;
    check(
        (r.value - (-0.2584489)).abs() < 1e-5 && (expected - (-0.2584489)).abs() < 1e-7,
        format!("value {:.7}, recomputed assembly {expected:.7}", r.value),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("table 1(a) golden trace", table_one_a),
        ("table 1(b) golden trace", table_one_b),
        ("closed form endpoints", closed_form_endpoints),
        ("substitution identity", substitution_identity),
        ("minorant chain", minorant_chain),
        ("critical-surface exactness", critical_exactness),
        ("harmonic sanity", harmonic_sanity),
        ("simple bound on the grid", simple_bound_check),
        ("collapse detector", collapse_detector),
        ("contour residual", contour_residual),
        ("assembled bound value", assembled_bound),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
