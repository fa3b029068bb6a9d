//! Lower bounds on the ground-state energy for `δ > 0`.
//!
//! All bounds descend from the one-parameter family
//!
//! `E₀ ≥ (α+β)(1−ε) + 2√((δ−γε)(2ε−ε²))`,  `0 < ε ≤ min(1, δ/γ)`.
//!
//! Substituting `ε = 2ρ²η` with `ρ² = δ/(2γ)` rewrites the family as
//! `(α+β) + 2^{3/2} δ γ^{−1/2} W(η, θ)` where
//! `W(η, θ) = η sinh θ + √(η(1−η)(1−ρ²η))` and
//! `sinh θ = −√(1/(2γ)) (α+β)/2`. Maximizing `W` over `η ∈ (0, 1)` gives the
//! best bound of the family. Two maximizers are provided: the fixed-point
//! scheme that freezes `√(1−ρ²η)` at the previous iterate
//! ([`iterate_w_max`]) and a plain golden-section search ([`w_oracle`]).
//!
//! The fixed point of the frozen-factor scheme is *not* the stationary point
//! of `W`; it evaluates `W` slightly to the right of the true maximizer, so
//! the bound it produces is valid but a little weaker than the oracle's.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::GreekParams;
use crate::search::golden_max;

/// Bracket width used by both golden-section oracles.
pub const ORACLE_WIDTH: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub sum_ab: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl BoundInputs {
    pub fn new(sum_ab: f64, gamma: f64, delta: f64) -> Result<Self> {
        if !(sum_ab.is_finite() && gamma.is_finite() && delta.is_finite()) {
            return Err(Error::domain("bound inputs must be finite"));
        }
        if !(gamma > 0.0) {
            return Err(Error::domain(format!("gamma must be positive, got {gamma}")));
        }
        Ok(BoundInputs {
            sum_ab,
            gamma,
            delta,
        })
    }

    pub fn from_greek(g: &GreekParams) -> Result<Self> {
        Self::new(g.sum_ab(), g.gamma, g.delta)
    }

    /// Inverts `ρ² = δ/(2γ)` and the `sinh θ` definition at a chosen `γ`.
    pub fn from_theta_rho2(sinh_theta: f64, rho2: f64, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::domain(format!("gamma must be positive, got {gamma}")));
        }
        Self::new(
            -2.0 * (2.0 * gamma).sqrt() * sinh_theta,
            gamma,
            2.0 * gamma * rho2,
        )
    }

    pub fn rho2(&self) -> f64 {
        self.delta / (2.0 * self.gamma)
    }

    pub fn sinh_theta(&self) -> f64 {
        0.0 - (1.0 / (2.0 * self.gamma)).sqrt() * self.sum_ab / 2.0
    }

    pub fn theta(&self) -> f64 {
        self.sinh_theta().asinh()
    }

    /// `2^{3/2} δ γ^{−1/2}`, the scale between `W` and an energy.
    pub fn prefactor(&self) -> f64 {
        2.0f64.powf(1.5) * self.delta / self.gamma.sqrt()
    }

    /// Upper end of the admissible `ε` range, `min(1, δ/γ)`.
    pub fn epsilon_max(&self) -> f64 {
        (self.delta / self.gamma).min(1.0)
    }

    fn require_positive_delta(&self) -> Result<()> {
        if self.delta > 0.0 {
            Ok(())
        } else {
            Err(Error::BoundNotValid { delta: self.delta })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundMethod {
    Simple,
    Epsilon,
    ClosedTheta0,
    Iterative,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaximizationScheme {
    FixedPoint,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub eta: f64,
    pub theta: f64,
    /// `W(η_n, θ)` with the true (unfrozen) objective.
    pub maximum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub rows: Vec<TraceRow>,
    pub converged: bool,
    pub final_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationOptions {
    pub eta0: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for IterationOptions {
    fn default() -> Self {
        IterationOptions {
            eta0: 1.0,
            tol: 1e-8,
            max_iter: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub method: BoundMethod,
    /// Lower bound on the ground-state energy.
    pub value: f64,
    /// The `W` value entering `value`, when the method goes through `W`.
    pub w_max: Option<f64>,
    /// Maximizing `η` (or `ε` for the epsilon methods).
    pub argmax: Option<f64>,
    pub trace: Option<IterationTrace>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonOptimum {
    pub epsilon: f64,
    pub value: f64,
}

pub fn simple_bound(b: &BoundInputs) -> Result<f64> {
    b.require_positive_delta()?;
    Ok(b.sum_ab)
}

pub fn epsilon_bound(b: &BoundInputs, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    if eps > b.delta / b.gamma {
        return Err(Error::domain(format!(
            "epsilon = {eps} exceeds delta/gamma = {} (negative radicand)",
            b.delta / b.gamma
        )));
    }
    Ok(epsilon_family(b, eps))
}

// Unchecked evaluation; rounding at ε = δ/γ can leave a tiny negative factor.
fn epsilon_family(b: &BoundInputs, eps: f64) -> f64 {
    let slack = (b.delta - b.gamma * eps).max(0.0);
    b.sum_ab * (1.0 - eps) + 2.0 * (slack * (2.0 * eps - eps * eps)).sqrt()
}

/// `W(η, θ) = η sinh θ + √(η(1−η)(1−ρ²η))`, parametrized by `sinh θ`.
///
/// Panics if `η ∉ [0, 1]` or `ρ² ∉ [0, 1]`.
pub fn w_true(eta: f64, sinh_theta: f64, rho2: f64) -> f64 {
    assert!((0.0..=1.0).contains(&eta), "eta = {eta} outside [0, 1]");
    assert!((0.0..=1.0).contains(&rho2), "rho2 = {rho2} outside [0, 1]");
    let radicand = eta * (1.0 - eta) * (1.0 - rho2 * eta);
    debug_assert!(radicand >= 0.0);
    eta * sinh_theta + radicand.sqrt()
}

/// Maximum of `W(·, 0)` in closed form.
pub fn closed_form_theta0(rho2: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&rho2) {
        return Err(Error::domain(format!("rho2 must lie in [0, 1/2], got {rho2}")));
    }
    let r4 = rho2 * rho2;
    let f = (1.0 - rho2 + r4).sqrt();
    Ok(((f + rho2) * (f + 1.0) / (f + rho2 + 1.0).powi(3)).sqrt())
}

/// Frozen-factor fixed-point maximization of `W`.
///
/// Each step replaces `√(1−ρ²η)` by its value at the current iterate `η_n`,
/// giving `sinh θ_n = sinh θ / √(1−ρ²η_n)`; the simplified objective
/// `η sinh θ_n + √(η(1−η))` peaks at `η_{n+1} = e^{θ_n}/(2 cosh θ_n)`.
/// Row `n` records `η_n`, `θ_n` and the true `W(η_n, θ)`. The iteration
/// stops once `|η_{n+1} − η_n| < tol`, appending the row for `η_{n+1}`.
pub fn iterate_w_max(sinh_theta: f64, rho2: f64, opts: &IterationOptions) -> Result<IterationTrace> {
    if !sinh_theta.is_finite() {
        return Err(Error::domain("sinh(theta) must be finite"));
    }
    if !(0.0..=0.5).contains(&rho2) {
        return Err(Error::domain(format!("rho2 must lie in [0, 1/2], got {rho2}")));
    }
    if !(opts.eta0 > 0.0 && opts.eta0 <= 1.0) {
        return Err(Error::domain(format!("eta0 must lie in (0, 1], got {}", opts.eta0)));
    }
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(Error::domain("tol must be positive and max_iter at least 1"));
    }

    let row = |n: usize, eta: f64| {
        let theta = (sinh_theta / (1.0 - rho2 * eta).sqrt()).asinh();
        TraceRow {
            iteration: n,
            eta,
            theta,
            maximum: w_true(eta, sinh_theta, rho2),
        }
    };

    let mut rows = Vec::with_capacity(opts.max_iter + 1);
    let mut current = row(0, opts.eta0);
    let mut converged = false;
    for n in 0..opts.max_iter {
        let t = current.theta;
        // e^t / (2 cosh t), written to avoid overflow for large |t|
        let next_eta = 1.0 / (1.0 + (-2.0 * t).exp());
        let step = (next_eta - current.eta).abs();
        rows.push(current);
        current = row(n + 1, next_eta);
        if step < opts.tol {
            converged = true;
            break;
        }
    }
    rows.push(current);
    let final_bound = current.maximum;
    Ok(IterationTrace {
        rows,
        converged,
        final_bound,
    })
}

/// Golden-section maximum of `W(·, θ)` over `[0, 1]`: `(η*, W*)`.
pub fn w_oracle(sinh_theta: f64, rho2: f64) -> Result<(f64, f64)> {
    if !sinh_theta.is_finite() {
        return Err(Error::domain("sinh(theta) must be finite"));
    }
    if !(0.0..=1.0).contains(&rho2) {
        return Err(Error::domain(format!("rho2 must lie in [0, 1], got {rho2}")));
    }
    let m = golden_max(|eta| w_true(eta, sinh_theta, rho2), 0.0, 1.0, ORACLE_WIDTH);
    Ok((m.argmax, m.value))
}

/// Direct golden-section maximization of the ε-family over
/// `(0, min(1, δ/γ)]`. Independent of the `W` reformulation.
pub fn epsilon_oracle(b: &BoundInputs) -> Result<EpsilonOptimum> {
    b.require_positive_delta()?;
    let m = golden_max(|eps| epsilon_family(b, eps), 0.0, b.epsilon_max(), ORACLE_WIDTH);
    Ok(EpsilonOptimum {
        epsilon: m.argmax,
        value: m.value,
    })
}

/// `(α+β) + 2^{3/2}δγ^{−1/2}·max W(η, 0)`; only defined when `α+β = 0`.
pub fn closed_theta0_bound(b: &BoundInputs) -> Result<BoundReport> {
    b.require_positive_delta()?;
    if b.sum_ab != 0.0 {
        return Err(Error::domain(format!(
            "the closed form needs theta = 0, i.e. alpha + beta = 0 (got {})",
            b.sum_ab
        )));
    }
    let w = closed_form_theta0(b.rho2())?;
    Ok(BoundReport {
        method: BoundMethod::ClosedTheta0,
        value: b.sum_ab + b.prefactor() * w,
        w_max: Some(w),
        argmax: None,
        trace: None,
    })
}

/// Best bound of the ε-family via the `W` reformulation.
///
/// For `ρ² ≥ 1/2` (`δ ≥ γ`) the reformulation leaves its domain and the
/// result falls back to [`epsilon_oracle`], reported as [`BoundMethod::Oracle`].
pub fn optimal_bound(
    b: &BoundInputs,
    scheme: MaximizationScheme,
    opts: &IterationOptions,
) -> Result<BoundReport> {
    b.require_positive_delta()?;
    let rho2 = b.rho2();
    if rho2 >= 0.5 {
        let opt = epsilon_oracle(b)?;
        return Ok(BoundReport {
            method: BoundMethod::Oracle,
            value: opt.value,
            w_max: None,
            argmax: Some(opt.epsilon),
            trace: None,
        });
    }
    let sinh_theta = b.sinh_theta();
    match scheme {
        MaximizationScheme::FixedPoint => {
            let trace = iterate_w_max(sinh_theta, rho2, opts)?;
            let last = trace.rows.last().copied();
            Ok(BoundReport {
                method: BoundMethod::Iterative,
                value: b.sum_ab + b.prefactor() * trace.final_bound,
                w_max: Some(trace.final_bound),
                argmax: last.map(|r| r.eta),
                trace: Some(trace),
            })
        }
        MaximizationScheme::Oracle => {
            let (eta, w) = w_oracle(sinh_theta, rho2)?;
            Ok(BoundReport {
                method: BoundMethod::Oracle,
                value: b.sum_ab + b.prefactor() * w,
                w_max: Some(w),
                argmax: Some(eta),
                trace: None,
            })
        }
    }
}
