use serde::{Deserialize, Serialize};

use super::{lowest_eigenvalues, EigenOptions, GridHamiltonian, GridSpec, DEFAULT_MAX_UNKNOWNS};
use crate::error::{Error, Result};
use crate::params::Couplings;

/// How the grid follows the box size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum GridPolicy {
    /// Keep `h` (at most) fixed so the discretization error is comparable
    /// across boxes; `n` grows with `L`.
    FixedSpacing(f64),
    /// Same `n` for every box.
    FixedPoints(usize),
}

impl GridPolicy {
    pub fn grid(&self, half_width: f64) -> Result<GridSpec> {
        match *self {
            GridPolicy::FixedSpacing(h) => GridSpec::with_spacing(half_width, h),
            GridPolicy::FixedPoints(n) => GridSpec::new(half_width, n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub policy: GridPolicy,
    /// Absolute energy tolerance separating "settled" from "still moving".
    pub scan_tol: f64,
    pub eigen: EigenOptions,
    pub max_unknowns: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            policy: GridPolicy::FixedSpacing(0.05),
            scan_tol: 1e-2,
            eigen: EigenOptions::default(),
            max_unknowns: DEFAULT_MAX_UNKNOWNS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Confined,
    Collapsing,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Confined => "Confined",
            Verdict::Collapsing => "Collapsing",
            Verdict::Inconclusive => "Inconclusive",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub half_width: f64,
    pub points: usize,
    pub spacing: f64,
    pub ground_energy: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfinementVerdict {
    pub verdict: Verdict,
    pub ground_energies: Vec<ScanPoint>,
}

/// Ground energy on a sequence of growing boxes and the resulting verdict.
///
/// `Collapsing` needs the energy to drop by more than `scan_tol` at every
/// step. `Confined` needs the last step below `scan_tol` and the step sizes
/// non-increasing; steps already below `scan_tol · 10⁻³` count as settled,
/// so round-off jitter between converged boxes cannot break monotonicity.
/// Anything else, or any unconverged solve, is `Inconclusive`.
pub fn confinement_scan(c: &Couplings, boxes: &[f64], opts: &ScanOptions) -> Result<ConfinementVerdict> {
    if boxes.len() < 3 {
        return Err(Error::domain(format!(
            "a scan needs at least 3 box sizes, got {}",
            boxes.len()
        )));
    }
    if boxes.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain("box sizes must be strictly ascending"));
    }
    if !(opts.scan_tol > 0.0) {
        return Err(Error::domain("scan_tol must be positive"));
    }
    let grids = boxes
        .iter()
        .map(|&l| opts.policy.grid(l))
        .collect::<Result<Vec<_>>>()?;

    let mut table = Vec::with_capacity(grids.len());
    for grid in grids {
        let h = GridHamiltonian::assemble(c, &grid, opts.max_unknowns)?;
        let r = lowest_eigenvalues(&h, 1, &opts.eigen)?;
        table.push(ScanPoint {
            half_width: grid.half_width,
            points: grid.points,
            spacing: grid.spacing(),
            ground_energy: r.eigenvalues[0],
            residual: r.residual_norms[0],
            iterations: r.iterations,
            converged: r.converged,
        });
    }
    let energies: Vec<f64> = table.iter().map(|p| p.ground_energy).collect();
    let verdict = if table.iter().all(|p| p.converged) {
        classify(&energies, opts.scan_tol)
    } else {
        Verdict::Inconclusive
    };
    Ok(ConfinementVerdict {
        verdict,
        ground_energies: table,
    })
}

fn classify(energies: &[f64], tol: f64) -> Verdict {
    let drops: Vec<f64> = energies.windows(2).map(|w| w[0] - w[1]).collect();
    if drops.iter().all(|&d| d > tol) {
        return Verdict::Collapsing;
    }
    let noise = tol * 1e-3;
    let gaps: Vec<f64> = drops.iter().map(|d| d.abs()).collect();
    let settled = gaps.last().is_some_and(|&g| g < tol);
    let shrinking = gaps.windows(2).all(|w| w[1] <= w[0] || w[1] < noise);
    if settled && shrinking {
        Verdict::Confined
    } else {
        Verdict::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_rules() {
        assert_eq!(classify(&[0.0, -0.5, -2.0], 1e-2), Verdict::Collapsing);
        assert_eq!(classify(&[1.0, 0.995, 0.994], 1e-2), Verdict::Confined);
        assert_eq!(classify(&[2.1, 2.001, 2.0], 1e-2), Verdict::Confined);
        assert_eq!(classify(&[2.0, 2.0, 2.0 + 1e-9], 1e-2), Verdict::Confined);
        assert_eq!(classify(&[2.0, 1.999, 1.9], 1e-2), Verdict::Inconclusive);
        // big drop then a small one: not collapsing at every step, not settled
        assert_eq!(classify(&[0.0, -1.0, -1.005, -1.1], 1e-2), Verdict::Inconclusive);
    }

    #[test]
    fn rejects_bad_box_lists() {
        let c = Couplings::new(1.0, 1.0, 0.0, 0.0);
        let o = ScanOptions::default();
        assert!(confinement_scan(&c, &[2.0, 3.0], &o).is_err());
        assert!(confinement_scan(&c, &[2.0, 4.0, 3.0], &o).is_err());
        assert!(confinement_scan(&c, &[2.0, 2.0, 3.0], &o).is_err());
    }

    #[test]
    fn harmonic_scan_is_confined() {
        let c = Couplings::new(1.0, 1.0, 0.0, 0.0);
        let o = ScanOptions {
            policy: GridPolicy::FixedSpacing(0.2),
            ..Default::default()
        };
        let v = confinement_scan(&c, &[5.0, 6.0, 7.0], &o).unwrap();
        assert_eq!(v.verdict, Verdict::Confined);
        for p in &v.ground_energies {
            assert!((p.ground_energy - 2.0).abs() < 2e-2, "{p:?}");
        }
    }

    #[test]
    fn unconverged_scan_is_inconclusive() {
        let c = Couplings::new(1.0, 1.0, 0.0, 0.0);
        let o = ScanOptions {
            policy: GridPolicy::FixedPoints(31),
            eigen: EigenOptions {
                max_restarts: 1,
                krylov_blocks: 2,
                eig_tol: 1e-15,
                ..Default::default()
            },
            ..Default::default()
        };
        let v = confinement_scan(&c, &[5.0, 6.0, 7.0], &o).unwrap();
        assert_eq!(v.verdict, Verdict::Inconclusive);
    }
}
