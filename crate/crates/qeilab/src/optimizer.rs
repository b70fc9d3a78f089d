//! Sharp one-particle lower bound: smallest eigenvalue of the discretized
//! energy-density form, with grid-refinement convergence control.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{assemble, KernelMatrix, PolynomialP, RapidityGrid, StateVector};
use crate::models::Model;
use crate::testfn::{Convention, TestFunction};

const RESIDUAL_TOL: f64 = 1e-10;

/// Result of one dense Hermitian eigensolve.
#[derive(Debug, Clone)]
pub struct MinEigenpair {
    pub lambda: f64,
    pub state: StateVector,
    pub degenerate: bool,
    pub residual: f64,
}

/// Smallest eigenvalue and a unit-norm eigenvector of the kernel matrix.
///
/// Real matrices (every built-in model with a centered test function) take a
/// real symmetric solve; genuinely complex Hermitian matrices are embedded
/// as the 2n x 2n real symmetric [[X, -Y], [Y, X]].
pub fn min_eigenpair(k: &KernelMatrix) -> Result<MinEigenpair> {
    let n = k.len();
    let m = k.matrix();
    let sup = k.sup_norm();
    let max_im = m.iter().map(|c| c.im.abs()).fold(0.0, f64::max);

    // the real embedding doubles every eigenvalue
    let mut multiplicity = 1;
    let (eigenvalues, vectors): (Vec<f64>, Vec<DVector<Complex64>>) = if sup == 0.0 {
        (vec![0.0; n], (0..n).map(|i| unit_vector(n, i)).collect())
    } else if max_im <= 1e-13 * sup {
        let a = DMatrix::from_fn(n, n, |i, j| m[(i, j)].re);
        let eig = a.symmetric_eigen();
        let vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
        let vecs = (0..n)
            .map(|c| DVector::from_iterator(n, eig.eigenvectors.column(c).iter().map(|&x| Complex64::new(x, 0.0))))
            .collect();
        (vals, vecs)
    } else {
        multiplicity = 2;
        let b = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
            let (bi, ii) = (i / n, i % n);
            let (bj, jj) = (j / n, j % n);
            let z = m[(ii, jj)];
            match (bi, bj) {
                (0, 0) | (1, 1) => z.re,
                (0, 1) => -z.im,
                _ => z.im,
            }
        });
        let eig = b.symmetric_eigen();
        let vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
        let vecs = (0..2 * n)
            .map(|c| {
                DVector::from_iterator(
                    n,
                    (0..n).map(|i| Complex64::new(eig.eigenvectors[(i, c)], eig.eigenvectors[(n + i, c)])),
                )
            })
            .collect();
        (vals, vecs)
    };

    let lambda = eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let tie_tol = 1e-12 * lambda.abs().max(1.0);
    let candidates: Vec<usize> =
        (0..eigenvalues.len()).filter(|&i| eigenvalues[i] - lambda <= tie_tol).collect();
    let degenerate = candidates.len() > multiplicity;

    // tie-break on the component at the node nearest theta = 0
    let center = k
        .grid()
        .nodes()
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let best = candidates
        .iter()
        .max_by(|&&a, &&b| vectors[a][center].norm().total_cmp(&vectors[b][center].norm()))
        .copied()
        .unwrap_or(0);
    let mut phi = vectors[best].clone();
    let norm = phi.norm();
    if norm > 0.0 {
        phi /= Complex64::new(norm, 0.0);
    }

    let residual = (m * &phi - phi.map(|c| c * lambda)).norm();
    let frob = m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let tol = RESIDUAL_TOL * frob.max(1e-300);
    if sup > 0.0 && residual > tol {
        return Err(Error::EigenFailure { residual, tol });
    }
    Ok(MinEigenpair { lambda, state: StateVector(phi), degenerate, residual })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LadderStage {
    pub cutoff: f64,
    pub n: usize,
    pub lambda: f64,
}

/// Converged lower bound: lambda_min realizes -c_g restricted to
/// one-particle states.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergedBound {
    pub lambda_min: f64,
    pub ladder: Vec<LadderStage>,
    /// |lambda_last - lambda_previous|; absent for a single-stage ladder
    pub error_estimate: Option<f64>,
    pub converged: bool,
    pub degenerate: bool,
    #[serde(skip)]
    pub witness: StateVector,
    #[serde(skip)]
    pub grid: RapidityGrid,
}

impl ConvergedBound {
    /// Witness wave function phi(theta_i) = coeff_i / sqrt(w_i), as CSV rows
    /// (theta, Re phi, Im phi).
    pub fn export_witness_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["theta", "re_phi", "im_phi"])?;
        for (i, (&t, &wt)) in self.grid.nodes().iter().zip(self.grid.weights()).enumerate() {
            let phi = self.witness.0[i] / wt.sqrt();
            w.write_record([t.to_string(), format!("{:e}", phi.re), format!("{:e}", phi.im)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Fraction of the witness norm within one rapidity unit of the cutoff.
fn boundary_mass(grid: &RapidityGrid, phi: &StateVector) -> f64 {
    let cut = grid.cutoff() - 1.0;
    let total = phi.0.norm_squared();
    if total == 0.0 {
        return 0.0;
    }
    grid.nodes()
        .iter()
        .zip(phi.0.iter())
        .filter(|(t, _)| t.abs() > cut)
        .map(|(_, c)| c.norm_sqr())
        .sum::<f64>()
        / total
}

/// Runs assemble + min_eigenpair along a refining grid ladder.
///
/// If the final witness carries more than 1e-8 of its norm near the cutoff,
/// the ladder is extended with a larger cutoff (at most twice) before
/// convergence is judged.
pub fn best_constant(
    model: &Model,
    p: &PolynomialP,
    g: &TestFunction,
    conv: Convention,
    tolerance: f64,
    ladder: &[(f64, usize)],
) -> Result<ConvergedBound> {
    if ladder.is_empty() {
        return Err(Error::InvalidParameter("grid ladder must not be empty".into()));
    }
    if !(tolerance > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let mut stages: Vec<(f64, usize)> = ladder.to_vec();
    let mut results: Vec<LadderStage> = Vec::new();
    let mut last: Option<(MinEigenpair, RapidityGrid)> = None;
    let mut extensions = 0;
    let mut i = 0;
    while i < stages.len() {
        let (cutoff, n) = stages[i];
        let grid = RapidityGrid::gauss_legendre(cutoff, n)?;
        let k = assemble(model, p, g, conv, &grid)?;
        let pair = min_eigenpair(&k)?;
        results.push(LadderStage { cutoff, n, lambda: pair.lambda });
        let at_end = i + 1 == stages.len();
        if at_end && boundary_mass(&grid, &pair.state) >= 1e-8 && extensions < 2 {
            stages.push((cutoff + 4.0, n));
            extensions += 1;
        }
        last = Some((pair, grid));
        i += 1;
    }
    let (pair, grid) = last.expect("ladder is non-empty");
    let error_estimate = (results.len() >= 2)
        .then(|| (results[results.len() - 1].lambda - results[results.len() - 2].lambda).abs());
    let converged =
        error_estimate.is_some_and(|e| e < tolerance * pair.lambda.abs().max(1.0));
    Ok(ConvergedBound {
        lambda_min: pair.lambda,
        ladder: results,
        error_estimate,
        converged,
        degenerate: pair.degenerate,
        witness: pair.state,
        grid,
    })
}

fn unit_vector(n: usize, i: usize) -> DVector<Complex64> {
    let mut v = DVector::from_element(n, Complex64::new(0.0, 0.0));
    v[i] = Complex64::new(1.0, 0.0);
    v
}
