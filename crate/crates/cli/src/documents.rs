//! Versioned JSON payloads. Field names are stable within a schema version;
//! docs/formats.md describes each one.

use bottomless::bounds::{BoundInputs, BoundReport};
use bottomless::fdsolver::{ScanPoint, Verdict};
use bottomless::{Couplings, GreekParams, RegimeLabel};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// Generator behind every seeded draw, recorded in the payloads.
pub const GENERATOR: &str = "ChaCha8 (rand_chacha), seeded with seed_from_u64";

#[derive(Serialize)]
pub struct Header {
    pub schema: &'static str,
    pub version: u32,
}

impl Header {
    pub fn new(schema: &'static str) -> Self {
        Header {
            schema,
            version: SCHEMA_VERSION,
        }
    }
}

#[derive(Serialize)]
pub struct ParamsDoc {
    #[serde(flatten)]
    pub header: Header,
    pub couplings: Couplings,
    pub greek: GreekParams,
    pub regime: RegimeLabel,
    /// Smallest split parameter of the harmonic minorant; null unless delta > 0.
    pub m_min: Option<f64>,
}

#[derive(Serialize)]
pub struct BoundDoc {
    #[serde(flatten)]
    pub header: Header,
    pub inputs: BoundInputsDoc,
    pub report: BoundReport,
}

#[derive(Serialize)]
pub struct BoundInputsDoc {
    pub sum_ab: f64,
    pub gamma: f64,
    pub delta: f64,
    pub rho2: f64,
    pub sinh_theta: f64,
    pub prefactor: f64,
}

impl From<&BoundInputs> for BoundInputsDoc {
    fn from(b: &BoundInputs) -> Self {
        BoundInputsDoc {
            sum_ab: b.sum_ab,
            gamma: b.gamma,
            delta: b.delta,
            rho2: b.rho2(),
            sinh_theta: b.sinh_theta(),
            prefactor: b.prefactor(),
        }
    }
}

#[derive(Serialize)]
pub struct GridDoc {
    pub half_width: f64,
    pub points: usize,
    pub spacing: f64,
    pub unknowns: usize,
}

#[derive(Serialize)]
pub struct SolverDoc {
    pub eig_tol: f64,
    pub max_restarts: usize,
    pub seed: u64,
    pub generator: &'static str,
}

#[derive(Serialize)]
pub struct ResidualStats {
    pub max: f64,
    pub mean: f64,
}

impl ResidualStats {
    pub fn of(values: &[f64]) -> Self {
        let max = values.iter().copied().fold(0.0, f64::max);
        let mean = if values.is_empty() {
            0.0
        } else {
            values.iter().sum::<f64>() / values.len() as f64
        };
        ResidualStats { max, mean }
    }
}

#[derive(Serialize)]
pub struct SpectrumDoc {
    #[serde(flatten)]
    pub header: Header,
    pub couplings: Couplings,
    pub greek: Option<GreekParams>,
    pub grid: GridDoc,
    pub solver: SolverDoc,
    pub eigenvalues: Vec<f64>,
    pub residual_norms: Vec<f64>,
    pub residual_stats: ResidualStats,
    pub iterations: usize,
    pub operator_applications: usize,
    pub factorizations: usize,
    pub shift: f64,
    pub converged: bool,
}

#[derive(Serialize)]
pub struct ScanDoc {
    #[serde(flatten)]
    pub header: Header,
    pub couplings: Couplings,
    pub greek: Option<GreekParams>,
    /// "fixed_spacing" or "fixed_points".
    pub grid_policy: &'static str,
    pub grid_parameter: f64,
    pub scan_tol: f64,
    pub solver: SolverDoc,
    pub verdict: Verdict,
    pub ground_energies: Vec<ScanPoint>,
    pub residual_stats: ResidualStats,
    pub converged: bool,
}

#[derive(Serialize)]
pub struct VerifyDoc {
    #[serde(flatten)]
    pub header: Header,
    pub greek: GreekParams,
    pub couplings: Couplings,
    pub samples: usize,
    pub seed: u64,
    pub generator: &'static str,
    pub radius: f64,
    pub step: f64,
    /// `|stencil (Hψ)/ψ − closed form|` over the sample.
    pub residual_stats: ResidualStats,
    /// Largest `|closed form − (alpha + beta)|`; zero exactly when delta = 0.
    pub max_deviation_from_sum: f64,
    pub normalizable: bool,
}
