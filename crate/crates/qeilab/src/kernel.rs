//! The one-particle stress-tensor kernel and its Hermitian discretization.
//!
//! The (alpha, beta) kernel factorizes as
//! F_free(theta, eta) * P(cosh(theta - eta)) * F_min(theta - eta + i pi)
//! * gsq~(mu cosh theta - mu cosh eta); only the (0,0) component is
//!   discretized, since the energy density is the object of interest.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::Model;
use crate::quad::gauss_legendre_unit;
use crate::testfn::{Convention, TestFunction};

/// A real polynomial in x = cosh(theta - eta) with P(1) = 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolynomialP {
    /// coefficients, lowest degree first
    coeffs: Vec<f64>,
}

impl PolynomialP {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("polynomial needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("polynomial coefficients must be finite".into()));
        }
        let at_one: f64 = coeffs.iter().sum();
        if (at_one - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("P(1) must equal 1, got {at_one}")));
        }
        Ok(PolynomialP { coeffs })
    }

    /// P = 1.
    pub fn one() -> Self {
        PolynomialP { coeffs: vec![1.0] }
    }

    /// P(x) = (1 - alpha) + alpha x, the admissible linear family.
    pub fn linear(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter("alpha must be finite".into()));
        }
        Ok(PolynomialP { coeffs: vec![1.0 - alpha, alpha] })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| *c != 0.0).unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }
}

/// Gauss-Legendre discretization of the rapidity line, truncated to
/// [-cutoff, cutoff].
#[derive(Debug, Clone, Serialize)]
pub struct RapidityGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    cutoff: f64,
}

impl RapidityGrid {
    pub fn gauss_legendre(cutoff: f64, n: usize) -> Result<Self> {
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid cutoff must be positive, got {cutoff}")));
        }
        if n < 2 {
            return Err(Error::InvalidParameter(format!("grid needs >= 2 nodes, got {n}")));
        }
        let (x, w) = gauss_legendre_unit(n)?;
        Ok(RapidityGrid {
            nodes: x.iter().map(|x| x * cutoff).collect(),
            weights: w.iter().map(|w| w * cutoff).collect(),
            cutoff,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }
}

/// One-particle wave function sampled on a grid; component i holds
/// phi(theta_i) * sqrt(w_i).
#[derive(Debug, Clone)]
pub struct StateVector(pub DVector<Complex64>);

impl StateVector {
    pub fn zeros(n: usize) -> Self {
        StateVector(DVector::from_element(n, Complex64::new(0.0, 0.0)))
    }

    /// Samples a smooth function phi(theta) on the grid, with quadrature
    /// weighting folded in.
    pub fn from_function<F: Fn(f64) -> Complex64>(grid: &RapidityGrid, phi: F) -> Self {
        let v = DVector::from_iterator(
            grid.len(),
            grid.nodes().iter().zip(grid.weights()).map(|(&t, &w)| phi(t) * w.sqrt()),
        );
        StateVector(v)
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        StateVector(self.0.map(|c| c / n))
    }
}

/// Everything needed to reproduce an assembled matrix.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub model: String,
    pub mass: f64,
    pub polynomial: Vec<f64>,
    pub test_function: String,
    pub convention: Convention,
    pub cutoff: f64,
    pub n: usize,
}

/// Hermitian discretization M_ij = sqrt(w_i w_j) F^{00}(theta_i, theta_j).
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    matrix: DMatrix<Complex64>,
    grid: RapidityGrid,
    provenance: Provenance,
    /// max_ij |M_ij - conj(M_ji)| / max|M| before symmetrization
    hermiticity_defect: f64,
}

impl KernelMatrix {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn grid(&self) -> &RapidityGrid {
        &self.grid
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.hermiticity_defect
    }

    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.nrows() == 0
    }

    /// Largest entry magnitude; the norm used in the tolerance checks.
    pub fn sup_norm(&self) -> f64 {
        self.matrix.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Writes entries as CSV rows (i, j, Re, Im) with a JSON provenance
    /// sidecar next to it.
    pub fn export_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["i", "j", "re", "im"])?;
        for i in 0..self.matrix.nrows() {
            for j in 0..self.matrix.ncols() {
                let v = self.matrix[(i, j)];
                w.write_record([i.to_string(), j.to_string(), format!("{:e}", v.re), format!("{:e}", v.im)])?;
            }
        }
        w.flush()?;
        let sidecar = path.with_extension("provenance.json");
        std::fs::write(sidecar, serde_json::to_vec_pretty(&self.provenance)?)?;
        Ok(())
    }
}

/// The (alpha, beta) entry of the free stress-tensor kernel matrix.
pub fn f_free(mu: f64, alpha: usize, beta: usize, theta: f64, eta: f64) -> Result<f64> {
    if alpha > 1 || beta > 1 {
        return Err(Error::InvalidParameter(format!("tensor indices must be 0 or 1, got ({alpha},{beta})")));
    }
    let pref = mu * mu / (2.0 * std::f64::consts::PI);
    let s = 0.5 * (theta + eta);
    Ok(match (alpha, beta) {
        (0, 0) => pref * s.cosh() * s.cosh(),
        (1, 1) => pref * s.sinh() * s.sinh(),
        _ => 0.5 * pref * (theta + eta).sinh(),
    })
}

/// F_P(theta) = P(cosh theta) * F_min(theta + i pi).
pub fn f_p(model: &Model, p: &PolynomialP, theta: f64) -> Result<Complex64> {
    Ok(model.fmin_shifted(theta)? * p.eval(theta.cosh()))
}

/// One kernel value: free factor times F_P times the g² transform at the
/// energy transfer mu cosh theta - mu cosh eta.
#[allow(clippy::too_many_arguments)]
pub fn kernel_element(
    model: &Model,
    p: &PolynomialP,
    g: &TestFunction,
    conv: Convention,
    alpha: usize,
    beta: usize,
    theta: f64,
    eta: f64,
) -> Result<Complex64> {
    let mu = model.mass();
    let free = f_free(mu, alpha, beta, theta, eta)?;
    let fp = f_p(model, p, theta - eta)?;
    let gsq = g.fourier_gsq(mu * (theta.cosh() - eta.cosh()), conv)?;
    Ok(fp * gsq * free)
}

const HERMITICITY_TOL: f64 = 1e-10;

/// Assembles the (0,0) kernel into a Hermitian matrix on the grid.
///
/// Rows are filled in parallel; the result is symmetrized by averaging with
/// its conjugate transpose, and the pre-averaging defect must stay below
/// 1e-10 relative or the model evaluator is considered broken.
pub fn assemble(
    model: &Model,
    p: &PolynomialP,
    g: &TestFunction,
    conv: Convention,
    grid: &RapidityGrid,
) -> Result<KernelMatrix> {
    let n = grid.len();
    let nodes = grid.nodes();
    let weights = grid.weights();
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| -> Result<Vec<Complex64>> {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let v = kernel_element(model, p, g, conv, 0, 0, nodes[i], nodes[j])?;
                row.push(v * (weights[i] * weights[j]).sqrt());
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);

    let max_abs = m.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut defect = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            defect = defect.max(d);
        }
    }
    let defect = if max_abs > 0.0 { defect / max_abs } else { 0.0 };
    if defect > HERMITICITY_TOL {
        return Err(Error::HermiticityDefect { defect, tol: HERMITICITY_TOL });
    }
    for i in 0..n {
        for j in 0..i {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
        m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
    }

    let provenance = Provenance {
        model: model.name().to_string(),
        mass: model.mass(),
        polynomial: p.coeffs().to_vec(),
        test_function: format!("{g:?}"),
        convention: conv,
        cutoff: grid.cutoff(),
        n,
    };
    Ok(KernelMatrix { matrix: m, grid: grid.clone(), provenance, hermiticity_defect: defect })
}

/// phi* M phi; the imaginary part must vanish to tolerance and is discarded.
pub fn quadratic_form(k: &KernelMatrix, phi: &StateVector) -> Result<f64> {
    if phi.0.len() != k.len() {
        return Err(Error::DimensionMismatch { expected: k.len(), got: phi.0.len() });
    }
    let mphi = k.matrix() * &phi.0;
    let val: Complex64 = phi.0.iter().zip(mphi.iter()).map(|(a, b)| a.conj() * b).sum();
    let norm2 = phi.0.norm_squared();
    let tol = 1e-10 * k.sup_norm().max(1e-300) * (k.len() as f64) * norm2.max(1e-300);
    if val.im.abs() > tol {
        return Err(Error::NonRealResult { imag: val.im.abs(), tol });
    }
    Ok(val.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn polynomial_constraint() {
        assert!(PolynomialP::new(vec![0.5, 0.6]).is_err());
        let p = PolynomialP::new(vec![0.6, 0.4]).unwrap();
        assert_relative_eq!(p.eval(1.0), 1.0, max_relative = 1e-15);
        assert_eq!(p.degree(), 1);
        assert_eq!(PolynomialP::one().degree(), 0);
        let q = PolynomialP::linear(0.4).unwrap();
        assert_eq!(q.coeffs(), &[0.6, 0.4]);
    }

    #[test]
    fn grid_properties() {
        let g = RapidityGrid::gauss_legendre(1.0, 2).unwrap();
        let r = 1.0 / 3.0_f64.sqrt();
        assert_relative_eq!(g.nodes()[1], r, max_relative = 1e-14);
        assert_relative_eq!(g.weights()[0], 1.0, max_relative = 1e-14);
        let g = RapidityGrid::gauss_legendre(8.0, 33).unwrap();
        let total: f64 = g.weights().iter().sum();
        assert_relative_eq!(total, 16.0, max_relative = 1e-13);
        for i in 0..g.len() {
            assert_eq!(g.nodes()[i], -g.nodes()[g.len() - 1 - i]);
        }
        assert!(RapidityGrid::gauss_legendre(0.0, 8).is_err());
        assert!(RapidityGrid::gauss_legendre(8.0, 1).is_err());
    }

    #[test]
    fn free_kernel_entries() {
        assert_relative_eq!(f_free(1.0, 0, 0, 0.0, 0.0).unwrap(), 1.0 / (2.0 * PI), max_relative = 1e-15);
        assert_eq!(f_free(1.0, 1, 1, 0.0, 0.0).unwrap(), 0.0);
        let a = f_free(1.0, 0, 1, 0.7, -0.2).unwrap();
        let b = f_free(1.0, 1, 0, 0.7, -0.2).unwrap();
        assert_eq!(a, b);
        assert!(f_free(1.0, 2, 0, 0.0, 0.0).is_err());
    }

    #[test]
    fn f_p_values() {
        let ising = Model::ising(1.0).unwrap();
        let p1 = PolynomialP::one();
        assert_relative_eq!(f_p(&ising, &p1, 0.0).unwrap().re, 1.0, max_relative = 1e-15);
        assert_relative_eq!(f_p(&ising, &p1, 2.0).unwrap().re, 1.0f64.cosh(), max_relative = 1e-15);

        let free = Model::free(1.0).unwrap();
        assert_eq!(f_p(&free, &p1, 123.0).unwrap(), Complex64::new(1.0, 0.0));
        let lin = PolynomialP::linear(0.4).unwrap();
        assert_relative_eq!(
            f_p(&free, &lin, 1.0).unwrap().re,
            0.6 + 0.4 * 1.0f64.cosh(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn kernel_element_diagonal_reduction() {
        // at theta = eta the P and F_min factors drop out for every model
        let g = TestFunction::gaussian(1.0, 0.0).unwrap();
        let models = [Model::free(1.0).unwrap(), Model::ising(1.0).unwrap()];
        let p = PolynomialP::linear(0.3).unwrap();
        for m in &models {
            for th in [0.0, 1.3, -2.0] {
                let v = kernel_element(m, &p, &g, Convention::Plain, 0, 0, th, th).unwrap();
                let expect = f_free(1.0, 0, 0, th, th).unwrap()
                    * g.fourier_gsq(0.0, Convention::Plain).unwrap().re;
                assert_relative_eq!(v.re, expect, max_relative = 1e-13);
                assert_eq!(v.im, 0.0);
            }
        }
        // concrete value at the origin: (1/2pi) sqrt(pi)
        let v = kernel_element(
            &models[0],
            &PolynomialP::one(),
            &g,
            Convention::Plain,
            0,
            0,
            0.0,
            0.0,
        )
        .unwrap();
        assert_relative_eq!(v.re, PI.sqrt() / (2.0 * PI), max_relative = 1e-14);
    }

    #[test]
    fn kernel_element_conjugation() {
        let g = TestFunction::gaussian(1.0, 0.4).unwrap();
        let m = Model::ising(1.0).unwrap();
        let p = PolynomialP::one();
        for (th, eta) in [(0.3, -1.2), (2.0, 0.5)] {
            let a = kernel_element(&m, &p, &g, Convention::Plain, 0, 0, th, eta).unwrap();
            let b = kernel_element(&m, &p, &g, Convention::Plain, 0, 0, eta, th).unwrap();
            assert!((a - b.conj()).norm() <= 1e-13 * a.norm());
        }
    }

    #[test]
    fn assemble_single_node_grid() {
        // n = 2 grid collapses each entry to sqrt(w_i w_j) * kernel value
        let g = TestFunction::gaussian(1.0, 0.0).unwrap();
        let m = Model::ising(1.0).unwrap();
        let grid = RapidityGrid::gauss_legendre(1e-9, 2).unwrap();
        let k = assemble(&m, &PolynomialP::one(), &g, Convention::Plain, &grid).unwrap();
        // both nodes sit essentially at theta = 0 with weight ~1e-9 each
        let expect = 1e-9 * PI.sqrt() / (2.0 * PI);
        assert_relative_eq!(k.matrix()[(0, 0)].re, expect, max_relative = 1e-6);
    }

    #[test]
    fn assemble_hermitian_and_real_diagonal() {
        let g = TestFunction::gaussian(1.0, 0.7).unwrap();
        let models =
            [Model::free(1.0).unwrap(), Model::ising(1.0).unwrap(), Model::sinh_gordon(1.0, 0.7).unwrap()];
        let grid = RapidityGrid::gauss_legendre(4.0, 24).unwrap();
        for m in &models {
            let k = assemble(m, &PolynomialP::one(), &g, Convention::Plain, &grid).unwrap();
            assert!(k.hermiticity_defect() < 1e-10, "{}", m.name());
            for i in 0..k.len() {
                assert_eq!(k.matrix()[(i, i)].im, 0.0);
                for j in 0..k.len() {
                    assert_eq!(k.matrix()[(i, j)], k.matrix()[(j, i)].conj());
                }
            }
        }
    }

    #[test]
    fn zero_test_function_gives_zero_matrix() {
        let g = TestFunction::gaussian(1.0, 0.0).unwrap().scaled(0.0);
        let m = Model::free(1.0).unwrap();
        let grid = RapidityGrid::gauss_legendre(4.0, 8).unwrap();
        let k = assemble(&m, &PolynomialP::one(), &g, Convention::Plain, &grid).unwrap();
        assert_eq!(k.sup_norm(), 0.0);
    }

    #[test]
    fn quadratic_form_basics() {
        let g = TestFunction::gaussian(1.0, 0.0).unwrap();
        let m = Model::free(1.0).unwrap();
        let grid = RapidityGrid::gauss_legendre(4.0, 16).unwrap();
        let k = assemble(&m, &PolynomialP::one(), &g, Convention::Plain, &grid).unwrap();
        let zero = StateVector::zeros(16);
        assert_eq!(quadratic_form(&k, &zero).unwrap(), 0.0);
        let phi = StateVector::from_function(&grid, |t| Complex64::new((-t * t).exp(), 0.0));
        let v = quadratic_form(&k, &phi).unwrap();
        assert!(v > 0.0);
        let wrong = StateVector::zeros(4);
        assert!(matches!(
            quadratic_form(&k, &wrong),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn export_csv_with_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let g = TestFunction::gaussian(1.0, 0.0).unwrap();
        let m = Model::free(1.0).unwrap();
        let grid = RapidityGrid::gauss_legendre(2.0, 4).unwrap();
        let k = assemble(&m, &PolynomialP::one(), &g, Convention::Plain, &grid).unwrap();
        let path = dir.path().join("kernel.csv");
        k.export_csv(&path).unwrap();
        assert!(path.exists());
        assert!(dir.path().join("kernel.provenance.json").exists());
        let text = std::fs::read_to_string(dir.path().join("kernel.provenance.json")).unwrap();
        assert!(text.contains("\"model\": \"free\""));
    }
}
