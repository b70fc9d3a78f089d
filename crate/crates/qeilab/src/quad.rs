//! Quadrature primitives: Gauss-Legendre rules and adaptive Simpson panels.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on [-1, 1], found by Newton iteration on
/// the Legendre recurrence. Nodes come out strictly increasing and exactly
/// symmetric about 0 (negative half mirrored from the positive half).
pub fn gauss_legendre_unit(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 1 {
        return Err(Error::InvalidParameter("Gauss-Legendre order must be >= 1".into()));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess for the i-th root from the top.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_pair(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (p2, d2) = legendre_pair(n, x);
                dp = d2;
                x -= p2 / d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x is the (n-1-i)-th node in increasing order; mirror to the lower half.
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok((nodes, weights))
}

/// P_n(x) and P_n'(x) via the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive Simpson over [a, b] for a complex-valued integrand.
///
/// `initial_panels` seeds the subdivision; pass roughly one panel per
/// oscillation period for oscillatory integrands. Returns the value and an
/// error estimate; errs if the estimate misses `tol_abs`.
pub fn adaptive_simpson_complex<F>(
    f: F,
    a: f64,
    b: f64,
    tol_abs: f64,
    initial_panels: usize,
    context: &str,
) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Complex64,
{
    let panels = initial_panels.max(1);
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let width = (b - a) / panels as f64;
    for i in 0..panels {
        let pa = a + i as f64 * width;
        let pb = if i + 1 == panels { b } else { pa + width };
        let fa = f(pa);
        let fm = f(0.5 * (pa + pb));
        let fb = f(pb);
        let whole = simpson(fa, fm, fb, pb - pa);
        let (v, e) = panel(&f, pa, pb, fa, fm, fb, whole, tol_abs * (pb - pa) / (b - a), 50);
        total += v;
        err += e;
    }
    if err > tol_abs.max(1e-15 * total.norm()) * 10.0 {
        return Err(Error::QuadratureNonConvergence { estimate: err, context: context.into() });
    }
    Ok((total, err))
}

/// Real-valued convenience wrapper around [`adaptive_simpson_complex`].
pub fn adaptive_simpson<F>(
    f: F,
    a: f64,
    b: f64,
    tol_abs: f64,
    initial_panels: usize,
    context: &str,
) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let (v, e) =
        adaptive_simpson_complex(|x| Complex64::new(f(x), 0.0), a, b, tol_abs, initial_panels, context)?;
    Ok((v.re, e))
}

fn simpson(fa: Complex64, fm: Complex64, fb: Complex64, h: f64) -> Complex64 {
    (fa + fm * 4.0 + fb) * (h / 6.0)
}

#[allow(clippy::too_many_arguments)]
fn panel<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: usize,
) -> (Complex64, f64)
where
    F: Fn(f64) -> Complex64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if delta.norm() <= 15.0 * tol || depth == 0 {
        return (left + right + delta / 15.0, delta.norm() / 15.0);
    }
    let (lv, le) = panel(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
    let (rv, re_) = panel(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    (lv + rv, le + re_)
}
