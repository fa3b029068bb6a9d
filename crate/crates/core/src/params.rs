//! Coupling parametrizations of the sextic potential
//!
//! `V(x, y) = A x² + B y² + C x²y² + D (x²y⁴ + x⁴y²)`
//!
//! and the reparametrization `γ = √D`, `C = 2γ(α + β)`, `A = α² − γ + δ`,
//! `B = β² − γ + δ`. With this assignment the Hamiltonian splits as a sum of
//! two shifted oscillators in `x` and `y` plus `(δ − γ)(x² + y²)`, which is
//! what makes `δ > 0` the confinement criterion.
//!
//! Note the assignment pairs `α` with `A` (the `x²` coupling). Pairing `α`
//! with `B` instead breaks both the inverse map below and the exactness of
//! the gaussian ground state at `δ = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `|δ|` below which a parameter set is labelled critical.
pub const CRITICAL_DELTA_TOL: f64 = 1e-14;

/// Raw couplings `(A, B, C, D)` of the potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "D")]
    pub d: f64,
}

impl Couplings {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Couplings { a, b, c, d }
    }

    /// `C / (2√D)`, which equals `α + β` whenever `D > 0`.
    pub fn simple_bound_anchor(&self) -> Option<f64> {
        (self.d > 0.0).then(|| self.c / (2.0 * self.d.sqrt()))
    }

    pub fn to_greek(&self) -> Result<GreekParams> {
        couplings_to_greek(self)
    }
}

/// Reparametrized couplings `(α, β, γ, δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreekParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl GreekParams {
    /// Builds a parameter set, rejecting `γ ≤ 0` and non-finite input.
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let g = GreekParams {
            alpha,
            beta,
            gamma,
            delta,
        };
        g.check()?;
        Ok(g)
    }

    fn check(&self) -> Result<()> {
        if ![self.alpha, self.beta, self.gamma, self.delta]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::domain("greek parameters must be finite"));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::domain(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    pub fn sum_ab(&self) -> f64 {
        self.alpha + self.beta
    }

    /// `ρ² = δ / (2γ)`.
    pub fn rho2(&self) -> f64 {
        self.delta / (2.0 * self.gamma)
    }

    /// `sinh θ = −√(1/(2γ)) · (α + β)/2`.
    pub fn sinh_theta(&self) -> f64 {
        // written as a difference so that α + β = 0 gives +0, not −0
        0.0 - (1.0 / (2.0 * self.gamma)).sqrt() * self.sum_ab() / 2.0
    }

    pub fn theta(&self) -> f64 {
        self.sinh_theta().asinh()
    }

    pub fn to_couplings(&self) -> Result<Couplings> {
        greek_to_couplings(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeLabel {
    /// `δ > 0` and both quadratic couplings non-negative.
    ClassicallyConfining,
    /// `δ > 0` but the potential falls to −∞ along an axis.
    BottomlessConfining,
    /// `δ = 0` (within [`CRITICAL_DELTA_TOL`]).
    Critical,
    /// `δ < 0`: the spectrum is unbounded below.
    Collapsing,
}

impl RegimeLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeLabel::ClassicallyConfining => "ClassicallyConfining",
            RegimeLabel::BottomlessConfining => "BottomlessConfining",
            RegimeLabel::Critical => "Critical",
            RegimeLabel::Collapsing => "Collapsing",
        }
    }
}

impl std::fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Smallest admissible split parameter `M` of the Hamiltonian
/// `H = −(1/M)Δ + [−((M−1)/M)Δ + V]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitParameter {
    pub m_min: f64,
}

/// The separable oscillator `offset − (1/M)Δ + coupling·(x² + y²)` that
/// bounds `H` from below for a given split `M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinorantOscillator {
    pub split: f64,
    /// Quadratic coupling `k(M) = (√((M−1)/M) − 1)γ + δ`.
    pub coupling: f64,
    /// Constant `√((M−1)/M)(α + β)`.
    pub offset: f64,
}

impl MinorantOscillator {
    /// Ground energy of the minorant, `offset + 2√(k/M)`, when `k ≥ 0`.
    pub fn ground_energy(&self) -> Option<f64> {
        (self.coupling >= 0.0).then(|| self.offset + 2.0 * (self.coupling / self.split).sqrt())
    }
}

pub fn greek_to_couplings(g: &GreekParams) -> Result<Couplings> {
    g.check()?;
    let GreekParams {
        alpha,
        beta,
        gamma,
        delta,
    } = *g;
    Ok(Couplings {
        a: alpha * alpha - gamma + delta,
        b: beta * beta - gamma + delta,
        c: 2.0 * gamma * (alpha + beta),
        d: gamma * gamma,
    })
}

pub fn couplings_to_greek(c: &Couplings) -> Result<GreekParams> {
    if ![c.a, c.b, c.c, c.d].iter().all(|v| v.is_finite()) {
        return Err(Error::domain("couplings must be finite"));
    }
    if !(c.d > 0.0) {
        return Err(Error::domain(format!("D must be positive, got {}", c.d)));
    }
    if c.c == 0.0 {
        return Err(Error::SingularInverse);
    }
    let gamma = c.d.sqrt();
    let half_sum = c.c / (4.0 * gamma);
    let half_diff = gamma * (c.a - c.b) / c.c;
    let alpha = half_sum + half_diff;
    let beta = half_sum - half_diff;
    let delta = c.a + gamma - alpha * alpha;
    Ok(GreekParams {
        alpha,
        beta,
        gamma,
        delta,
    })
}

pub fn classify_regime(g: &GreekParams) -> RegimeLabel {
    if g.delta.abs() <= CRITICAL_DELTA_TOL {
        return RegimeLabel::Critical;
    }
    if g.delta < 0.0 {
        return RegimeLabel::Collapsing;
    }
    let a = g.alpha * g.alpha - g.gamma + g.delta;
    let b = g.beta * g.beta - g.gamma + g.delta;
    if a < 0.0 || b < 0.0 {
        RegimeLabel::BottomlessConfining
    } else {
        RegimeLabel::ClassicallyConfining
    }
}

/// Smallest `M ≥ 1` with `M + √(M(M−1)) ≥ γ/δ`.
pub fn minimal_split(g: &GreekParams) -> Result<SplitParameter> {
    g.check()?;
    if !(g.delta > 0.0) {
        return Err(Error::NoMinorant { delta: g.delta });
    }
    let s = g.gamma / g.delta;
    let m_min = if s > 1.0 { s * s / (2.0 * s - 1.0) } else { 1.0 };
    Ok(SplitParameter { m_min })
}

pub fn minorant_oscillator(g: &GreekParams, split: f64) -> Result<MinorantOscillator> {
    g.check()?;
    if !(g.delta > 0.0) {
        return Err(Error::NoMinorant { delta: g.delta });
    }
    if !(split > 1.0) || !split.is_finite() {
        return Err(Error::domain(format!(
            "split parameter M must be finite and > 1, got {split}"
        )));
    }
    let root = ((split - 1.0) / split).sqrt();
    Ok(MinorantOscillator {
        split,
        coupling: (root - 1.0) * g.gamma + g.delta,
        offset: root * g.sum_ab(),
    })
}
