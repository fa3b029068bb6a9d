use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::llt::factor::LltRegularization;
use faer::sparse::linalg::cholesky::{factorize_symbolic_cholesky, LltRef, SymbolicCholesky};
use faer::sparse::{SparseColMat, SymbolicSparseColMat};
use faer::{Conj, Mat, MatMut, Par, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{dot, GridHamiltonian, GridSpec, LinearOperator};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    /// Target for `‖Hv − λv‖` with `‖v‖ = 1`.
    pub eig_tol: f64,
    /// Restart budget of the block Krylov iteration.
    pub max_restarts: usize,
    /// Block vectors kept beyond the `k` requested.
    pub guard_vectors: usize,
    /// Blocks per Krylov basis before a restart.
    pub krylov_blocks: usize,
    /// Seed of the ChaCha8 stream for the starting block.
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            eig_tol: 1e-8,
            max_restarts: 100,
            guard_vectors: 3,
            krylov_blocks: 6,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub residual_norms: Vec<f64>,
    pub grid: GridSpec,
    /// Block Krylov restarts performed.
    pub iterations: usize,
    /// Shifted solves performed.
    pub operator_applications: usize,
    /// Sparse Cholesky factorizations attempted, one per shift.
    pub factorizations: usize,
    /// Final spectral shift `σ` of the inverted operator `(H − σ)^{-1}`.
    pub shift: f64,
    pub converged: bool,
    /// Normalized eigenvector of the lowest eigenvalue.
    #[serde(skip)]
    pub ground_state: Option<Vec<f64>>,
}

/// `x ↦ (H − σ)^{-1} x` through a sparse Cholesky factor.
struct ShiftInvert {
    symbolic: SymbolicCholesky<usize>,
    values: Vec<f64>,
    dim: usize,
}

impl ShiftInvert {
    /// `None` when `H − σ` is not positive definite, i.e. `σ ≥ λ₀`.
    fn new(h: &GridHamiltonian, shift: f64) -> Result<Option<Self>> {
        let dim = h.dim();
        let (col_ptr, rows, vals) = h.lower_triangle(shift);
        let pattern = SymbolicSparseColMat::new_checked(dim, dim, col_ptr, None, rows);
        let matrix = SparseColMat::new(pattern, vals);
        let symbolic = factorize_symbolic_cholesky(
            matrix.symbolic(),
            Side::Lower,
            Default::default(),
            Default::default(),
        )
        .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        let mut values = vec![0.0; symbolic.len_val()];
        let par = Par::Seq;
        let mut buffer =
            MemBuffer::try_new(symbolic.factorize_numeric_llt_scratch::<f64>(par, Default::default()))
                .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        let factored = symbolic.factorize_numeric_llt(
                &mut values,
                matrix.as_ref(),
                Side::Lower,
                LltRegularization::default(),
                par,
                MemStack::new(&mut buffer),
                Default::default(),
            );
        if factored.is_err() {
            return Ok(None);
        }
        Ok(Some(ShiftInvert {
            symbolic,
            values,
            dim,
        }))
    }
}

impl LinearOperator for ShiftInvert {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
        let par = Par::Seq;
        let mut buffer = MemBuffer::new(self.symbolic.solve_in_place_scratch::<f64>(1, par));
        let rhs = MatMut::from_column_major_slice_mut(y, self.dim, 1);
        LltRef::new(&self.symbolic, &self.values).solve_in_place_with_conj(
            Conj::No,
            rhs,
            par,
            MemStack::new(&mut buffer),
        );
    }
}

/// Orthonormal basis built block by block, with the Rayleigh–Ritz matrix
/// `T = Qᵀ A Q` accumulated from the first Gram–Schmidt pass.
struct KrylovBasis {
    vectors: Vec<Vec<f64>>,
    projected: Vec<Vec<f64>>,
}

impl KrylovBasis {
    fn with_capacity(cap: usize) -> Self {
        KrylovBasis {
            vectors: Vec::with_capacity(cap),
            projected: vec![vec![0.0; cap]; cap],
        }
    }

    fn len(&self) -> usize {
        self.vectors.len()
    }

    fn project_out(&self, w: &mut [f64]) -> Vec<f64> {
        let coeffs: Vec<f64> = self.vectors.iter().map(|q| dot(q, w)).collect();
        for (q, c) in self.vectors.iter().zip(&coeffs) {
            axpy(-c, q, w);
        }
        coeffs
    }

    /// Orthogonalizes `w` against the basis twice and appends it, unless it
    /// collapses; returns whether it was kept.
    fn push(&mut self, mut w: Vec<f64>) -> bool {
        let before = norm(&w);
        self.project_out(&mut w);
        self.project_out(&mut w);
        let after = norm(&w);
        if !(after > 1e-10 * before) || after == 0.0 {
            return false;
        }
        scale(1.0 / after, &mut w);
        self.vectors.push(w);
        true
    }
}

/// Lowest `k` eigenpairs of the grid Hamiltonian.
///
/// Runs a restarted block Krylov iteration with Rayleigh–Ritz extraction on
/// `(H − σ)^{-1}`. The first shift `σ = min V − 1` makes `H − σ` positive
/// definite. After each restart `σ` moves up to just below the lowest Ritz
/// value, which speeds convergence a lot when `min V` lies far below `λ₀`.
/// Ritz values only bound `λ₀` from above, so the move is guarded by the
/// factorization itself: a Cholesky breakdown proves `σ ≥ λ₀`, and the
/// shift is bisected back toward the last good one.
/// Ritz vectors are accepted once every residual `‖Hv − λv‖` (measured with
/// `H` itself, `λ` its Rayleigh quotient) drops below `eig_tol`. Running out
/// of restarts returns the current estimates with `converged = false`.
pub fn lowest_eigenvalues(h: &GridHamiltonian, k: usize, opts: &EigenOptions) -> Result<SpectrumResult> {
    let dim = h.dim();
    if k == 0 {
        return Err(Error::domain("need at least one eigenvalue"));
    }
    let block = k + opts.guard_vectors.max(1);
    if block * 4 > dim {
        return Err(Error::domain(format!(
            "{k} eigenvalues requested from a {dim}-dimensional operator"
        )));
    }
    if !(opts.eig_tol > 0.0) || opts.krylov_blocks < 2 {
        return Err(Error::domain("eig_tol must be positive and krylov_blocks at least 2"));
    }

    let mut shift = h.spectrum_floor() - 1.0;
    let mut op = ShiftInvert::new(h, shift)?.ok_or_else(|| {
        Error::Factorization(format!("H - ({shift}) is not positive definite"))
    })?;
    let mut factorizations = 1usize;
    let mut rejected_shift = f64::INFINITY;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let random_vector = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..dim).map(|_| rng.random::<f64>() - 0.5).collect()
    };

    let mut current: Vec<Vec<f64>> = (0..block).map(|_| random_vector(&mut rng)).collect();
    let mut applications = 0usize;
    let mut restarts = 0usize;
    let mut hv = vec![0.0; dim];
    let mut estimates: Vec<(f64, f64)> = Vec::new();
    let mut converged = false;

    while restarts < opts.max_restarts {
        restarts += 1;
        let cap = block * opts.krylov_blocks;
        let mut basis = KrylovBasis::with_capacity(cap);
        for v in current.drain(..) {
            if !basis.push(v) {
                let fresh = random_vector(&mut rng);
                basis.push(fresh);
            }
        }
        let mut start = 0;
        for b in 0..opts.krylov_blocks {
            let end = basis.len();
            let mut next = Vec::with_capacity(end - start);
            for j in start..end {
                let mut w = vec![0.0; dim];
                op.apply(&basis.vectors[j], &mut w);
                applications += 1;
                let coeffs = basis.project_out(&mut w);
                for (i, c) in coeffs.into_iter().enumerate() {
                    basis.projected[i][j] = c;
                    basis.projected[j][i] = c;
                }
                next.push(w);
            }
            if b + 1 == opts.krylov_blocks {
                break;
            }
            start = end;
            for w in next {
                if basis.len() < cap && !basis.push(w) {
                    // exhausted direction: keep the basis growing
                    let fresh = random_vector(&mut rng);
                    basis.push(fresh);
                }
            }
            if basis.len() == end {
                break;
            }
        }

        // every basis vector has been multiplied, so T is complete
        let s = basis.len();
        let t = Mat::<f64>::from_fn(s, s, |i, j| 0.5 * (basis.projected[i][j] + basis.projected[j][i]));
        let evd = t
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Factorization(format!("Rayleigh-Ritz eigensolve failed: {e:?}")))?;
        let u = evd.U();

        // largest Ritz values of the inverse are the lowest of H
        current = (0..block.min(s))
            .map(|c| {
                let col = s - 1 - c;
                let mut x = vec![0.0; dim];
                for i in 0..s {
                    axpy(u[(i, col)], &basis.vectors[i], &mut x);
                }
                let n = norm(&x);
                scale(1.0 / n, &mut x);
                x
            })
            .collect();

        estimates = current[..k]
            .iter()
            .map(|x| {
                h.apply(x, &mut hv);
                let lambda = dot(x, &hv);
                axpy(-lambda, x, &mut hv);
                (lambda, norm(&hv))
            })
            .collect();
        if estimates.iter().all(|(_, r)| *r <= opts.eig_tol) {
            converged = true;
            break;
        }

        // Ritz values of H implied by those of the inverse, all upper bounds
        let ritz: Vec<f64> = (0..block.min(s)).map(|c| shift + 1.0 / evd.S()[s - 1 - c]).collect();
        let lowest = ritz[0];
        let spread = (ritz[ritz.len() - 1] - lowest).max(1e-3 * lowest.abs().max(1.0));
        let mut candidate = lowest - 0.1 * spread;
        if candidate >= rejected_shift {
            candidate = 0.5 * (shift + rejected_shift);
        }
        if candidate > shift + 0.5 * (lowest - shift) {
            for _ in 0..3 {
                factorizations += 1;
                if let Some(next) = ShiftInvert::new(h, candidate)? {
                    op = next;
                    shift = candidate;
                    break;
                }
                rejected_shift = candidate;
                candidate = 0.5 * (shift + candidate);
            }
        }
    }

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| estimates[a].0.total_cmp(&estimates[b].0));
    let ground_state = order.first().map(|&i| current[i].clone());
    Ok(SpectrumResult {
        eigenvalues: order.iter().map(|&i| estimates[i].0).collect(),
        residual_norms: order.iter().map(|&i| estimates[i].1).collect(),
        grid: *h.grid(),
        iterations: restarts,
        operator_applications: applications,
        factorizations,
        shift,
        converged,
        ground_state,
    })
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

fn scale(a: f64, x: &mut [f64]) {
    for v in x {
        *v *= a;
    }
}
