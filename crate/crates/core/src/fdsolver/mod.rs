//! Finite-difference discretization of `H = −∂²/∂x² − ∂²/∂y² + V` on the
//! Dirichlet box `[−L, L]²` and its lowest eigenvalues.
//!
//! The plane is truncated to a box with the wavefunction pinned to zero on
//! the boundary. For `δ > 0` the ground state decays fast enough that the
//! box size barely matters; for `δ < 0` the box is what keeps the spectrum
//! bounded, so the ground energy keeps falling as the box opens. Scanning
//! the box size ([`confinement_scan`]) turns that into a collapse detector.

mod eigen;
mod scan;

pub use eigen::{lowest_eigenvalues, EigenOptions, SpectrumResult};
pub use scan::{confinement_scan, ConfinementVerdict, GridPolicy, ScanOptions, ScanPoint, Verdict};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Couplings;
use crate::potential::evaluate;

/// Default cap on the number of grid unknowns `n²`.
pub const DEFAULT_MAX_UNKNOWNS: usize = 1_000_000;

/// Smallest admissible number of interior points per axis.
pub const MIN_POINTS: usize = 31;

/// Uniform grid of `n` interior points per axis on `[−L, L]`, spacing
/// `h = 2L/(n + 1)`. `n` is odd so the origin is a node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub half_width: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::domain(format!(
                "box half-width must be positive, got {half_width}"
            )));
        }
        if points < MIN_POINTS || points % 2 == 0 {
            return Err(Error::domain(format!(
                "grid needs an odd number of points >= {MIN_POINTS}, got {points}"
            )));
        }
        Ok(GridSpec { half_width, points })
    }

    /// Coarsest admissible grid on `[−L, L]` whose spacing does not exceed
    /// `spacing`.
    pub fn with_spacing(half_width: f64, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::domain(format!("spacing must be positive, got {spacing}")));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::domain(format!(
                "box half-width must be positive, got {half_width}"
            )));
        }
        let cells = (2.0 * half_width / spacing - 1e-9).ceil().max(2.0) as usize;
        let mut points = cells - 1;
        if points % 2 == 0 {
            points += 1;
        }
        Self::new(half_width, points.max(MIN_POINTS))
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points as f64 + 1.0)
    }

    pub fn unknowns(&self) -> usize {
        self.points * self.points
    }

    /// Coordinate of interior node `i`; exactly zero at the centre node and
    /// antisymmetric about it.
    pub fn coord(&self, i: usize) -> f64 {
        let centre = (self.points / 2) as isize;
        (i as isize - centre) as f64 * self.spacing()
    }
}

/// Anything that can multiply a vector.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// The discretized Hamiltonian: the five-point Laplacian stencil
/// `(4, −1, −1, −1, −1)/h²` plus the nodal potential on the diagonal.
///
/// Unknown `k = i·n + j` sits at `(x_i, y_j)`.
#[derive(Debug, Clone)]
pub struct GridHamiltonian {
    grid: GridSpec,
    couplings: Couplings,
    potential: Vec<f64>,
    inv_h2: f64,
}

/// [`GridHamiltonian::assemble`] with the default unknowns cap.
pub fn assemble_hamiltonian(c: &Couplings, grid: &GridSpec) -> Result<GridHamiltonian> {
    GridHamiltonian::assemble(c, grid, DEFAULT_MAX_UNKNOWNS)
}

impl GridHamiltonian {
    pub fn assemble(c: &Couplings, grid: &GridSpec, max_unknowns: usize) -> Result<Self> {
        let grid = GridSpec::new(grid.half_width, grid.points)?;
        if grid.unknowns() > max_unknowns {
            return Err(Error::Resource {
                unknowns: grid.unknowns(),
                cap: max_unknowns,
            });
        }
        let n = grid.points;
        let coords: Vec<f64> = (0..n).map(|i| grid.coord(i)).collect();
        let mut potential = Vec::with_capacity(n * n);
        for &x in &coords {
            potential.extend(coords.iter().map(|&y| evaluate(c, x, y)));
        }
        let h = grid.spacing();
        Ok(GridHamiltonian {
            grid,
            couplings: *c,
            potential,
            inv_h2: 1.0 / (h * h),
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn couplings(&self) -> &Couplings {
        &self.couplings
    }

    /// Nodal potential values, laid out like the unknowns.
    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn diagonal(&self, k: usize) -> f64 {
        4.0 * self.inv_h2 + self.potential[k]
    }

    /// Off-diagonal stencil weight `−1/h²`.
    pub fn coupling_weight(&self) -> f64 {
        -self.inv_h2
    }

    /// Lower bound on the spectrum: the Laplacian part is positive definite,
    /// so `H ≥ min V` over the nodes.
    pub fn spectrum_floor(&self) -> f64 {
        self.potential.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Column pattern of the lower triangle of `H − shift·I`, row indices
    /// ascending within each column: `(column pointers, row indices, values)`.
    pub fn lower_triangle(&self, shift: f64) -> (Vec<usize>, Vec<usize>, Vec<f64>) {
        let n = self.grid.points;
        let dim = n * n;
        let off = -self.inv_h2;
        let mut col_ptr = Vec::with_capacity(dim + 1);
        let mut rows = Vec::with_capacity(3 * dim);
        let mut vals = Vec::with_capacity(3 * dim);
        col_ptr.push(0);
        for k in 0..dim {
            let (i, j) = (k / n, k % n);
            rows.push(k);
            vals.push(self.diagonal(k) - shift);
            if j + 1 < n {
                rows.push(k + 1);
                vals.push(off);
            }
            if i + 1 < n {
                rows.push(k + n);
                vals.push(off);
            }
            col_ptr.push(rows.len());
        }
        (col_ptr, rows, vals)
    }

    pub fn rayleigh_quotient(&self, v: &[f64]) -> f64 {
        let mut hv = vec![0.0; v.len()];
        self.apply(v, &mut hv);
        dot(v, &hv) / dot(v, v)
    }
}

impl LinearOperator for GridHamiltonian {
    fn dim(&self) -> usize {
        self.potential.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.grid.points;
        let w = self.inv_h2;
        for i in 0..n {
            for j in 0..n {
                let k = i * n + j;
                let mut neighbours = 0.0;
                if i > 0 {
                    neighbours += x[k - n];
                }
                if i + 1 < n {
                    neighbours += x[k + n];
                }
                if j > 0 {
                    neighbours += x[k - 1];
                }
                if j + 1 < n {
                    neighbours += x[k + 1];
                }
                y[k] = self.diagonal(k) * x[k] - w * neighbours;
            }
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(5.0, 30).is_err());
        assert!(GridSpec::new(5.0, 32).is_err());
        assert!(GridSpec::new(0.0, 31).is_err());
        let g = GridSpec::new(8.0, 161).unwrap();
        assert_eq!(g.coord(80), 0.0);
        assert_eq!(g.coord(0), -g.coord(160));
        assert!((g.spacing() - 16.0 / 162.0).abs() < 1e-15);
    }

    #[test]
    fn grid_from_spacing() {
        for (l, expect) in [(6.0, 239), (10.0, 399), (14.0, 559), (8.0, 319), (12.0, 479)] {
            let g = GridSpec::with_spacing(l, 0.05).unwrap();
            assert_eq!(g.points, expect, "L = {l}");
            assert!(g.spacing() <= 0.05 + 1e-12);
        }
        assert_eq!(GridSpec::with_spacing(1.0, 0.5).unwrap().points, MIN_POINTS);
    }

    #[test]
    fn resource_cap() {
        let g = GridSpec::new(5.0, 101).unwrap();
        let err = GridHamiltonian::assemble(&Couplings::new(1.0, 1.0, 0.0, 0.0), &g, 10_000);
        assert_eq!(
            err.unwrap_err(),
            Error::Resource {
                unknowns: 10_201,
                cap: 10_000
            }
        );
    }

    #[test]
    fn stencil_rows_and_diagonal() {
        let c = Couplings::new(-1.0, 0.5, 0.3, 1.21);
        let g = GridSpec::new(3.0, 31).unwrap();
        let h = assemble_hamiltonian(&c, &g).unwrap();
        let n = g.points;
        // an interior row of the Laplacian part sums to zero
        let k = 10 * n + 12;
        let row_sum = h.diagonal(k) - h.potential()[k] + 4.0 * h.coupling_weight();
        assert!(row_sum.abs() < 1e-12);
        for (i, j) in [(0, 0), (3, 17), (15, 15), (30, 2)] {
            let v = evaluate(&c, g.coord(i), g.coord(j));
            assert_eq!(h.potential()[i * n + j], v);
        }
        // at most five nonzeros per row; matvec on unit vectors counts them
        let mut e = vec![0.0; n * n];
        let mut col = vec![0.0; n * n];
        e[k] = 1.0;
        h.apply(&e, &mut col);
        assert_eq!(col.iter().filter(|v| **v != 0.0).count(), 5);
        e[k] = 0.0;
        e[0] = 1.0;
        h.apply(&e, &mut col);
        assert_eq!(col.iter().filter(|v| **v != 0.0).count(), 3);
    }

    #[test]
    fn operator_symmetric() {
        let c = Couplings::new(-1.0, -1.0, 0.0, 1.21);
        let g = GridSpec::new(4.0, 41).unwrap();
        let h = assemble_hamiltonian(&c, &g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v: Vec<f64> = (0..h.dim()).map(|_| rng.random::<f64>() - 0.5).collect();
        let w: Vec<f64> = (0..h.dim()).map(|_| rng.random::<f64>() - 0.5).collect();
        let (mut hv, mut hw) = (vec![0.0; h.dim()], vec![0.0; h.dim()]);
        h.apply(&v, &mut hv);
        h.apply(&w, &mut hw);
        let (a, b) = (dot(&hv, &w), dot(&v, &hw));
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn lower_triangle_matches_matvec() {
        let c = Couplings::new(0.4, -0.2, 0.1, 0.3);
        let g = GridSpec::new(2.0, 31).unwrap();
        let h = assemble_hamiltonian(&c, &g).unwrap();
        let (ptr, rows, vals) = h.lower_triangle(0.0);
        let dim = h.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        let mut y = vec![0.0; dim];
        for col in 0..dim {
            for p in ptr[col]..ptr[col + 1] {
                let r = rows[p];
                y[r] += vals[p] * x[col];
                if r != col {
                    y[col] += vals[p] * x[r];
                }
            }
        }
        let mut hx = vec![0.0; dim];
        h.apply(&x, &mut hx);
        for (a, b) in y.iter().zip(&hx) {
            assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
        }
    }
}
