use std::fmt::Write as _;

use bottomless::bounds::{
    closed_theta0_bound, epsilon_bound, optimal_bound, simple_bound, BoundInputs, BoundMethod, BoundReport,
    IterationOptions, MaximizationScheme,
};
use bottomless::exactstate::{local_energy, numerical_local_energy, GaussianState};
use bottomless::fdsolver::{
    confinement_scan, lowest_eigenvalues, EigenOptions, GridHamiltonian, GridPolicy, GridSpec, ScanOptions,
};
use bottomless::params::{classify_regime, minimal_split};
use bottomless::potential::{extract_section, Window};
use bottomless::{Couplings, GreekParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::documents::*;
use crate::{
    BoundArgs, BoundFormat, ContourArgs, CouplingArgs, Failure, Method, Output, ParamsArgs, ScanArgs, SolverArgs,
    SpectrumArgs, VerifyArgs,
};

type CmdResult = Result<Output, Failure>;

fn json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("payload serializes");
    s.push('\n');
    s
}

fn done(payload: String) -> CmdResult {
    Ok(Output {
        payload,
        converged: true,
    })
}

fn domain(msg: impl Into<String>) -> Failure {
    Failure::Domain(msg.into())
}

fn four(v: &[f64]) -> (f64, f64, f64, f64) {
    (v[0], v[1], v[2], v[3])
}

fn resolve(c: &CouplingArgs) -> Result<(Couplings, Option<GreekParams>), Failure> {
    if let Some(v) = &c.abcd {
        let (a, b, cc, d) = four(v);
        let couplings = Couplings::new(a, b, cc, d);
        return Ok((couplings, couplings.to_greek().ok()));
    }
    match (c.alpha, c.beta, c.gamma, c.delta) {
        (Some(alpha), Some(beta), Some(gamma), Some(delta)) => {
            let g = GreekParams::new(alpha, beta, gamma, delta)?;
            Ok((g.to_couplings()?, Some(g)))
        }
        _ => Err(domain(
            "give the potential as --abcd A B C D or with all of --alpha --beta --gamma --delta",
        )),
    }
}

fn eigen_options(s: &SolverArgs) -> EigenOptions {
    EigenOptions {
        eig_tol: s.eig_tol,
        max_restarts: s.max_restarts,
        seed: s.seed,
        ..EigenOptions::default()
    }
}

fn solver_doc(s: &SolverArgs) -> SolverDoc {
    SolverDoc {
        eig_tol: s.eig_tol,
        max_restarts: s.max_restarts,
        seed: s.seed,
        generator: GENERATOR,
    }
}

pub fn params(a: &ParamsArgs) -> CmdResult {
    let (couplings, greek) = if let Some(v) = &a.from_abcd {
        let (aa, b, c, d) = four(v);
        let couplings = Couplings::new(aa, b, c, d);
        (couplings, couplings.to_greek()?)
    } else {
        let (alpha, beta, gamma, delta) = four(a.from_greek.as_deref().expect("clap enforces one form"));
        let g = GreekParams::new(alpha, beta, gamma, delta)?;
        (g.to_couplings()?, g)
    };
    done(json(&ParamsDoc {
        header: Header::new("bottomless.params"),
        couplings,
        greek,
        regime: classify_regime(&greek),
        m_min: minimal_split(&greek).ok().map(|s| s.m_min),
    }))
}

fn bound_inputs(a: &BoundArgs) -> Result<BoundInputs, Failure> {
    if let (Some(sinh), Some(rho2)) = (a.sinh_theta, a.rho2) {
        return Ok(BoundInputs::from_theta_rho2(sinh, rho2, a.gamma.unwrap_or(1.0))?);
    }
    match (a.alpha, a.beta, a.gamma, a.delta) {
        (Some(alpha), Some(beta), Some(gamma), Some(delta)) => {
            Ok(BoundInputs::from_greek(&GreekParams::new(alpha, beta, gamma, delta)?)?)
        }
        _ => Err(domain(
            "give --alpha --beta --gamma --delta, or --sinh-theta and --rho2 (with optional --gamma)",
        )),
    }
}

pub fn bound(a: &BoundArgs) -> CmdResult {
    let b = bound_inputs(a)?;
    let opts = IterationOptions {
        eta0: a.eta0,
        tol: a.tol,
        max_iter: a.max_iter,
    };
    let report = match a.method {
        Method::Simple => BoundReport {
            method: BoundMethod::Simple,
            value: simple_bound(&b)?,
            w_max: None,
            argmax: None,
            trace: None,
        },
        Method::Eps => {
            let eps = a.eps.ok_or_else(|| domain("--method eps needs --eps"))?;
            // validity first, so delta <= 0 reports as such
            simple_bound(&b)?;
            BoundReport {
                method: BoundMethod::Epsilon,
                value: epsilon_bound(&b, eps)?,
                w_max: None,
                argmax: Some(eps),
                trace: None,
            }
        }
        Method::Closed0 => closed_theta0_bound(&b)?,
        Method::Iterate => optimal_bound(&b, MaximizationScheme::FixedPoint, &opts)?,
        Method::Oracle => optimal_bound(&b, MaximizationScheme::Oracle, &opts)?,
    };
    let converged = report.trace.as_ref().map_or(true, |t| t.converged);
    let payload = match a.format {
        BoundFormat::Json => json(&BoundDoc {
            header: Header::new("bottomless.bound"),
            inputs: (&b).into(),
            report,
        }),
        BoundFormat::Table1 => {
            let trace = report
                .trace
                .as_ref()
                .ok_or_else(|| domain("--format table1 needs an iteration trace (--method iterate with rho2 < 1/2)"))?;
            let mut s = String::from("iteration\teta_n\ttheta_n\tmaximum\n");
            for r in &trace.rows {
                writeln!(s, "{}\t{:.8}\t{:.7}\t{:.8}", r.iteration, r.eta, r.theta, r.maximum).unwrap();
            }
            s
        }
    };
    Ok(Output { payload, converged })
}

pub fn spectrum(a: &SpectrumArgs) -> CmdResult {
    let (couplings, greek) = resolve(&a.couplings)?;
    let grid = match a.grid {
        Some(n) => GridSpec::new(a.half_width, n)?,
        None => GridSpec::with_spacing(a.half_width, a.spacing)?,
    };
    let h = GridHamiltonian::assemble(&couplings, &grid, a.solver.max_unknowns)?;
    let r = lowest_eigenvalues(&h, a.num_eigs, &eigen_options(&a.solver))?;
    let doc = SpectrumDoc {
        header: Header::new("bottomless.spectrum"),
        couplings,
        greek,
        grid: GridDoc {
            half_width: grid.half_width,
            points: grid.points,
            spacing: grid.spacing(),
            unknowns: grid.unknowns(),
        },
        solver: solver_doc(&a.solver),
        residual_stats: ResidualStats::of(&r.residual_norms),
        eigenvalues: r.eigenvalues,
        residual_norms: r.residual_norms,
        iterations: r.iterations,
        operator_applications: r.operator_applications,
        factorizations: r.factorizations,
        shift: r.shift,
        converged: r.converged,
    };
    Ok(Output {
        payload: json(&doc),
        converged: doc.converged,
    })
}

pub fn scan(a: &ScanArgs) -> CmdResult {
    let (couplings, greek) = resolve(&a.couplings)?;
    let (policy, grid_policy, grid_parameter) = match a.grid {
        Some(n) => (GridPolicy::FixedPoints(n), "fixed_points", n as f64),
        None => (GridPolicy::FixedSpacing(a.spacing), "fixed_spacing", a.spacing),
    };
    let opts = ScanOptions {
        policy,
        scan_tol: a.scan_tol,
        eigen: eigen_options(&a.solver),
        max_unknowns: a.solver.max_unknowns,
    };
    let v = confinement_scan(&couplings, &a.boxes, &opts)?;
    let residuals: Vec<f64> = v.ground_energies.iter().map(|p| p.residual).collect();
    let converged = v.ground_energies.iter().all(|p| p.converged);
    let doc = ScanDoc {
        header: Header::new("bottomless.scan"),
        couplings,
        greek,
        grid_policy,
        grid_parameter,
        scan_tol: a.scan_tol,
        solver: solver_doc(&a.solver),
        verdict: v.verdict,
        ground_energies: v.ground_energies,
        residual_stats: ResidualStats::of(&residuals),
        converged,
    };
    Ok(Output {
        payload: json(&doc),
        converged,
    })
}

pub fn contour(a: &ContourArgs) -> CmdResult {
    let (aa, b, c, d) = four(&a.abcd);
    let couplings = Couplings::new(aa, b, c, d);
    let window = Window::square(a.window, a.resolution)?;
    let set = extract_section(&couplings, a.energy, &window)?;
    let mut buf = Vec::new();
    set.write_csv(&mut buf).expect("writing to memory");
    done(String::from_utf8(buf).expect("CSV is ASCII"))
}

pub fn verify_exact(a: &VerifyArgs) -> CmdResult {
    let greek = GreekParams::new(a.alpha, a.beta, a.gamma, a.delta)?;
    let couplings = greek.to_couplings()?;
    if a.samples == 0 {
        return Err(domain("--samples must be at least 1"));
    }
    if !(a.radius > 0.0 && a.radius.is_finite()) || !(a.step > 0.0 && a.step.is_finite()) {
        return Err(domain("--radius and --step must be positive"));
    }
    let state = GaussianState::from_greek(&greek);
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut residuals = Vec::with_capacity(a.samples);
    let mut deviation = 0.0f64;
    for _ in 0..a.samples {
        let x = rng.random_range(-a.radius..=a.radius);
        let y = rng.random_range(-a.radius..=a.radius);
        let closed = local_energy(&state, greek.delta, x, y);
        residuals.push((numerical_local_energy(&state, &couplings, x, y, a.step) - closed).abs());
        deviation = deviation.max((closed - greek.sum_ab()).abs());
    }
    done(json(&VerifyDoc {
        header: Header::new("bottomless.verify_exact"),
        greek,
        couplings,
        samples: a.samples,
        seed: a.seed,
        generator: GENERATOR,
        radius: a.radius,
        step: a.step,
        residual_stats: ResidualStats::of(&residuals),
        max_deviation_from_sum: deviation,
        normalizable: state.is_normalizable(),
    }))
}
