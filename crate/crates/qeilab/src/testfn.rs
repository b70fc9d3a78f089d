//! Real smearing functions g and pointwise spectral data for g and g².
//!
//! One transform convention is used everywhere. The default is
//! f~(w) = int dt e^{iwt} f(t) with no 2pi prefactor; the alternative
//! (2pi)^{-1/2}-normalized convention is kept behind [`Convention`] for the
//! calibration run of the `verify` command.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson_complex;

const SQRT_2PI: f64 = 2.5066282746310002;

/// Fourier transform normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// f~(w) = int dt e^{iwt} f(t)
    #[default]
    Plain,
    /// f~(w) = (2pi)^{-1/2} int dt e^{iwt} f(t)
    Normalized,
}

impl Convention {
    fn factor(self) -> f64 {
        match self {
            Convention::Plain => 1.0,
            Convention::Normalized => 1.0 / SQRT_2PI,
        }
    }
}

/// One spectral evaluation point: the transform value at a real argument.
#[derive(Debug, Clone, Copy)]
pub struct SpectralSample {
    pub argument: f64,
    pub value: Complex64,
}

/// A real-valued smearing function.
///
/// Immutable after construction; all evaluations are pure.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    /// amplitude * exp(-(t-center)^2 / (2 sigma^2))
    Gaussian { sigma: f64, center: f64, amplitude: f64 },
    /// amplitude * exp(-1/(1-x^2)) with x = (t-center)/sigma, supported on
    /// [center-sigma, center+sigma].
    Bump { sigma: f64, center: f64, amplitude: f64 },
    /// Uniformly sampled values, trapezoid-integrated. Lower accuracy than
    /// the analytic kinds.
    Tabulated { t0: f64, dt: f64, values: Vec<f64>, amplitude: f64 },
}

impl TestFunction {
    pub fn gaussian(sigma: f64, center: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("gaussian width must be positive, got {sigma}")));
        }
        Ok(TestFunction::Gaussian { sigma, center, amplitude: 1.0 })
    }

    pub fn bump(sigma: f64, center: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("bump width must be positive, got {sigma}")));
        }
        Ok(TestFunction::Bump { sigma, center, amplitude: 1.0 })
    }

    /// Ingests a two-column CSV (t, g(t)); uniform spacing required, header
    /// line optional.
    pub fn tabulated_from_csv<P: AsRef<Path>>(path: P) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(false)
            .trim(csv::Trim::All)
            .from_path(path)?;
        let mut ts = Vec::new();
        let mut gs = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() < 2 {
                return Err(Error::InvalidParameter(format!("CSV row {i} has fewer than 2 columns")));
            }
            let t: f64 = match rec[0].parse() {
                Ok(v) => v,
                // permit a single header line
                Err(_) if i == 0 => continue,
                Err(e) => return Err(Error::InvalidParameter(format!("CSV row {i}: {e}"))),
            };
            let g: f64 = rec[1]
                .parse()
                .map_err(|e| Error::InvalidParameter(format!("CSV row {i}: {e}")))?;
            ts.push(t);
            gs.push(g);
        }
        Self::tabulated(ts, gs)
    }

    pub fn tabulated(ts: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if ts.len() < 2 || ts.len() != values.len() {
            return Err(Error::InvalidParameter("tabulated function needs >= 2 (t, g) samples".into()));
        }
        let dt = ts[1] - ts[0];
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter("tabulated t values must be increasing".into()));
        }
        for i in 1..ts.len() {
            let step = ts[i] - ts[i - 1];
            if (step - dt).abs() > 1e-9 * dt.max(1.0) {
                return Err(Error::InvalidParameter(format!(
                    "tabulated spacing is not uniform at row {i}: {step} vs {dt}"
                )));
            }
        }
        Ok(TestFunction::Tabulated { t0: ts[0], dt, values, amplitude: 1.0 })
    }

    /// Returns s * g.
    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        let amp = match &mut out {
            TestFunction::Gaussian { amplitude, .. }
            | TestFunction::Bump { amplitude, .. }
            | TestFunction::Tabulated { amplitude, .. } => amplitude,
        };
        *amp *= s;
        out
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TestFunction::Gaussian { sigma, center, amplitude } => {
                let u = (t - center) / sigma;
                amplitude * (-0.5 * u * u).exp()
            }
            TestFunction::Bump { sigma, center, amplitude } => {
                let x = (t - center) / sigma;
                if x.abs() < 1.0 {
                    amplitude * (-1.0 / (1.0 - x * x)).exp()
                } else {
                    0.0
                }
            }
            TestFunction::Tabulated { t0, dt, values, amplitude } => {
                // linear interpolation inside the table, zero outside
                let s = (t - t0) / dt;
                if s < 0.0 || s > (values.len() - 1) as f64 {
                    return 0.0;
                }
                let i = (s.floor() as usize).min(values.len() - 2);
                let f = s - i as f64;
                amplitude * (values[i] * (1.0 - f) + values[i + 1] * f)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            TestFunction::Gaussian { amplitude, .. } | TestFunction::Bump { amplitude, .. } => {
                *amplitude == 0.0
            }
            TestFunction::Tabulated { values, amplitude, .. } => {
                *amplitude == 0.0 || values.iter().all(|v| *v == 0.0)
            }
        }
    }

    /// g~(w) under the given convention.
    pub fn fourier_g(&self, omega: f64, conv: Convention) -> Result<Complex64> {
        match *self {
            TestFunction::Gaussian { sigma, center, amplitude } => {
                let mag = amplitude * sigma * SQRT_2PI * (-0.5 * sigma * sigma * omega * omega).exp();
                Ok(phase(omega * center) * (mag * conv.factor()))
            }
            _ => self.transform_numeric(omega, conv, false),
        }
    }

    /// Transform of g² at argument k, same convention.
    pub fn fourier_gsq(&self, k: f64, conv: Convention) -> Result<Complex64> {
        match *self {
            TestFunction::Gaussian { sigma, center, amplitude } => {
                // g^2 is a gaussian of width sigma/sqrt(2) and amplitude^2
                let mag = amplitude * amplitude
                    * sigma
                    * std::f64::consts::PI.sqrt()
                    * (-0.25 * sigma * sigma * k * k).exp();
                Ok(phase(k * center) * (mag * conv.factor()))
            }
            _ => self.transform_numeric(k, conv, true),
        }
    }

    fn transform_numeric(&self, omega: f64, conv: Convention, square: bool) -> Result<Complex64> {
        let (a, b) = match *self {
            TestFunction::Gaussian { .. } => unreachable!("gaussian uses the closed form"),
            TestFunction::Bump { sigma, center, .. } => (center - sigma, center + sigma),
            TestFunction::Tabulated { t0, dt, ref values, amplitude } => {
                // trapezoid rule straight over the table
                let mut sum = Complex64::new(0.0, 0.0);
                let n = values.len();
                for (j, &v) in values.iter().enumerate() {
                    let t = t0 + j as f64 * dt;
                    let g = amplitude * v;
                    let g = if square { g * g } else { g };
                    let c = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                    sum += phase(omega * t) * (c * g * dt);
                }
                return Ok(sum * conv.factor());
            }
        };
        // one panel per half-period keeps the oscillatory integrand resolved
        let panels = (8.0 + omega.abs() * (b - a) / std::f64::consts::PI).ceil() as usize;
        let f = |t: f64| {
            let g = self.eval(t);
            let g = if square { g * g } else { g };
            phase(omega * t) * g
        };
        let (v, _) = adaptive_simpson_complex(f, a, b, 1e-10, panels, "test-function transform")?;
        Ok(v * conv.factor())
    }
}

fn phase(x: f64) -> Complex64 {
    Complex64::new(0.0, x).exp()
}
