//! Registry of integrable models: mass, two-particle scattering function S2,
//! and the minimal solution F_min on the shifted line zeta = theta + i pi.
//!
//! Built-in data: free field F_min = 1, S2 = 1; Ising F_min(zeta) =
//! -i sinh(zeta/2), S2 = -1; sinh-Gordon from the standard integral
//! representation, with S2(theta) = (sinh theta - i sin(pi B/2)) /
//! (sinh theta + i sin(pi B/2)).

use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;

/// Large-theta limit of F_min(theta + i pi).
///
/// The infinite case is a tagged sentinel; no floating-point infinity enters
/// arithmetic downstream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Asymptote {
    Finite(f64),
    Infinite,
}

#[derive(Debug, Clone)]
enum ModelKind {
    Free,
    Ising,
    SinhGordon {
        b: f64,
        /// cached value of int_0^inf dt/t g(t)/sinh(t); the asymptote is exp(c0/2)
        c0: f64,
    },
    /// Tabulated F_min(theta + i pi) on a uniform theta grid, with a declared
    /// finite asymptote used outside the table range.
    Custom { theta0: f64, dtheta: f64, values: Vec<Complex64>, asymptote: f64 },
}

/// An integrable model with one species of scalar particles.
///
/// Immutable after registration; evaluators are pure and safe to share
/// across threads.
#[derive(Debug, Clone)]
pub struct Model {
    name: String,
    mass: f64,
    kind: ModelKind,
}

impl Model {
    pub fn free(mass: f64) -> Result<Self> {
        check_mass(mass)?;
        Ok(Model { name: "free".into(), mass, kind: ModelKind::Free })
    }

    pub fn ising(mass: f64) -> Result<Self> {
        check_mass(mass)?;
        Ok(Model { name: "ising".into(), mass, kind: ModelKind::Ising })
    }

    pub fn sinh_gordon(mass: f64, b: f64) -> Result<Self> {
        check_mass(mass)?;
        if !(b > 0.0 && b < 2.0) {
            return Err(Error::InvalidModel(format!("sinh-Gordon coupling B must be in (0,2), got {b}")));
        }
        let c0 = sg_c0(b)?;
        Ok(Model { name: format!("sinh_gordon(B={b})"), mass, kind: ModelKind::SinhGordon { b, c0 } })
    }

    /// Registers a custom model from samples of F_min(theta + i pi) on a
    /// uniform grid. Normalization and conjugation symmetry are enforced at
    /// registration time by sampling the table.
    pub fn custom(
        name: &str,
        mass: f64,
        thetas: Vec<f64>,
        values: Vec<Complex64>,
        asymptote: f64,
    ) -> Result<Self> {
        check_mass(mass)?;
        if thetas.len() < 2 || thetas.len() != values.len() {
            return Err(Error::InvalidModel("custom F_min table needs >= 2 rows".into()));
        }
        let dtheta = thetas[1] - thetas[0];
        if !(dtheta > 0.0) {
            return Err(Error::InvalidModel("custom F_min table must have increasing theta".into()));
        }
        for i in 1..thetas.len() {
            if (thetas[i] - thetas[i - 1] - dtheta).abs() > 1e-9 * dtheta.max(1.0) {
                return Err(Error::InvalidModel(format!("custom F_min grid not uniform at row {i}")));
            }
        }
        if !(asymptote.is_finite() && asymptote != 0.0) {
            return Err(Error::InvalidModel("custom asymptote must be finite and non-zero".into()));
        }
        let model = Model {
            name: name.into(),
            mass,
            kind: ModelKind::Custom { theta0: thetas[0], dtheta, values, asymptote },
        };
        model.check_custom_invariants()?;
        Ok(model)
    }

    /// Custom model from CSV rows (theta, Re F_min, Im F_min).
    pub fn custom_from_csv<P: AsRef<Path>>(name: &str, mass: f64, path: P, asymptote: f64) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)?;
        let mut thetas = Vec::new();
        let mut values = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() < 3 {
                return Err(Error::InvalidModel(format!("F_min CSV row {i} has fewer than 3 columns")));
            }
            let th: f64 = match rec[0].parse() {
                Ok(v) => v,
                Err(_) if i == 0 => continue,
                Err(e) => return Err(Error::InvalidModel(format!("F_min CSV row {i}: {e}"))),
            };
            let re: f64 =
                rec[1].parse().map_err(|e| Error::InvalidModel(format!("F_min CSV row {i}: {e}")))?;
            let im: f64 =
                rec[2].parse().map_err(|e| Error::InvalidModel(format!("F_min CSV row {i}: {e}")))?;
            thetas.push(th);
            values.push(Complex64::new(re, im));
        }
        Model::custom(name, mass, thetas, values, asymptote)
    }

    fn check_custom_invariants(&self) -> Result<()> {
        let ModelKind::Custom { theta0, dtheta, ref values, .. } = self.kind else { unreachable!() };
        let n = values.len();
        let theta_end = theta0 + dtheta * (n - 1) as f64;
        if theta0 > 0.0 || theta_end < 0.0 {
            return Err(Error::InvalidModel("custom F_min table must contain theta = 0".into()));
        }
        let at0 = self.fmin_shifted(0.0)?;
        if (at0 - Complex64::new(1.0, 0.0)).norm() > 1e-6 {
            return Err(Error::InvalidModel(format!("custom F_min(i pi) = {at0} is not normalized to 1")));
        }
        // conjugation symmetry wherever both signs are inside the table
        let hi = theta_end.min(-theta0);
        let samples = 101;
        for j in 0..samples {
            let th = hi * j as f64 / (samples - 1) as f64;
            let a = self.fmin_shifted(th)?;
            let b = self.fmin_shifted(-th)?;
            if (a - b.conj()).norm() > 1e-8 * a.norm().max(1e-8) {
                return Err(Error::InvalidModel(format!(
                    "custom F_min violates conjugation symmetry at theta = {th}"
                )));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// F_min(theta + i pi) for real theta.
    pub fn fmin_shifted(&self, theta: f64) -> Result<Complex64> {
        match self.kind {
            ModelKind::Free => Ok(Complex64::new(1.0, 0.0)),
            // -i sinh((theta + i pi)/2) = cosh(theta/2)
            ModelKind::Ising => Ok(Complex64::new((0.5 * theta).cosh(), 0.0)),
            ModelKind::SinhGordon { b, .. } => Ok(Complex64::new(sg_fmin_shifted(b, theta)?, 0.0)),
            ModelKind::Custom { theta0, dtheta, ref values, asymptote } => {
                let s = (theta - theta0) / dtheta;
                if s < 0.0 || s > (values.len() - 1) as f64 {
                    return Ok(Complex64::new(asymptote, 0.0));
                }
                let i = (s.floor() as usize).min(values.len() - 2);
                let f = s - i as f64;
                Ok(values[i] * (1.0 - f) + values[i + 1] * f)
            }
        }
    }

    /// F_min(theta) on the real line. Used by the Watson consistency check;
    /// not available for table-backed custom models.
    pub fn fmin_real_line(&self, theta: f64) -> Result<Complex64> {
        match self.kind {
            ModelKind::Free => Ok(Complex64::new(1.0, 0.0)),
            ModelKind::Ising => Ok(Complex64::new(0.0, -1.0) * Complex64::new(0.5 * theta, 0.0).sinh()),
            ModelKind::SinhGordon { b, c0 } => sg_fmin_real_line(b, c0, theta),
            ModelKind::Custom { .. } => Err(Error::InvalidModel(
                "custom models supply F_min on the shifted line only".into(),
            )),
        }
    }

    /// lim_{theta -> inf} F_min(theta + i pi).
    pub fn fmin_asymptote(&self) -> Result<Asymptote> {
        match self.kind {
            ModelKind::Free => Ok(Asymptote::Finite(1.0)),
            ModelKind::Ising => Ok(Asymptote::Infinite),
            ModelKind::SinhGordon { c0, .. } => Ok(Asymptote::Finite((0.5 * c0).exp())),
            ModelKind::Custom { asymptote, .. } => {
                // numerical limit estimate from the evaluator itself
                let samples: Vec<f64> = [10.0, 20.0, 40.0]
                    .iter()
                    .map(|&t| self.fmin_shifted(t).map(|v| v.re))
                    .collect::<Result<_>>()?;
                let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let spread = (hi - lo) / lo.abs().max(1e-300);
                if spread > 1e-6 {
                    return Err(Error::InconclusiveAsymptote { spread });
                }
                Ok(Asymptote::Finite(asymptote))
            }
        }
    }

    /// Two-particle scattering function S2(theta).
    pub fn s2(&self, theta: f64) -> Result<Complex64> {
        match self.kind {
            ModelKind::Free => Ok(Complex64::new(1.0, 0.0)),
            ModelKind::Ising => Ok(Complex64::new(-1.0, 0.0)),
            ModelKind::SinhGordon { b, .. } => {
                let s = (0.5 * std::f64::consts::PI * b).sin();
                let sh = theta.sinh();
                Ok(Complex64::new(sh, -s) / Complex64::new(sh, s))
            }
            ModelKind::Custom { .. } => {
                Err(Error::InvalidModel("custom models do not carry an S2 evaluator".into()))
            }
        }
    }
}

fn check_mass(mass: f64) -> Result<()> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::InvalidModel(format!("mass must be positive, got {mass}")));
    }
    Ok(())
}

// ---- sinh-Gordon minimal solution ----------------------------------------
//
// With g(t) = 4 sinh(tB/4) sinh(t(2-B)/4) / cosh(t/2) one has
//   S2(theta) = exp[ int_0^inf dt/t g(t) sinh(t theta / (i pi)) ]
// and the minimal solution
//   F_min(zeta) = exp[ int_0^inf dt/t h(t) sin^2( t (i pi - zeta) / (2 pi) ) ],
// where h(t) = g(t)/sinh(t). On the shifted line zeta = theta + i pi the
// sin^2 argument is real and the integral converges absolutely. On the real
// line the oscillatory part is summed in closed form (it is exactly the
// scattering phase), leaving an absolutely convergent remainder.

/// h(t)/t = g(t)/(t sinh t), with the small-t limit B(2-B)/4 taken explicitly.
fn sg_h_over_t(b: f64, t: f64) -> f64 {
    if t < 1e-6 {
        return 0.25 * b * (2.0 - b);
    }
    4.0 * (0.25 * b * t).sinh() * (0.25 * (2.0 - b) * t).sinh() / ((0.5 * t).cosh() * t.sinh() * t)
}

/// int_0^inf dt h(t)/t; twice the log of the asymptote.
fn sg_c0(b: f64) -> Result<f64> {
    let (v, _) = adaptive_simpson(|t| sg_h_over_t(b, t), 0.0, 80.0, 1e-13, 32, "sinh-Gordon c0")?;
    Ok(v)
}

fn sg_fmin_shifted(b: f64, theta: f64) -> Result<f64> {
    let omega = theta.abs() / (2.0 * std::f64::consts::PI);
    let upper = 80.0;
    let panels = 16 + (2.0 * omega * upper).ceil() as usize;
    let f = |t: f64| {
        let s = (t * theta / (2.0 * std::f64::consts::PI)).sin();
        sg_h_over_t(b, t) * s * s
    };
    let (v, _) = adaptive_simpson(f, 0.0, upper, 1e-12, panels, "sinh-Gordon F_min")?;
    Ok(v.exp())
}

fn sg_fmin_real_line(b: f64, c0: f64, theta: f64) -> Result<Complex64> {
    if theta == 0.0 {
        // F_min(0) = 0: Watson's equation with S2(0) = -1 forces a zero
        return Ok(Complex64::new(0.0, 0.0));
    }
    let a = theta / std::f64::consts::PI;
    let s = (0.5 * std::f64::consts::PI * b).sin();
    // remainder kernel decays like exp(-min(B,2-B) t/2)
    let decay = 0.5 * b.min(2.0 - b);
    let upper = (80.0 / decay).min(4000.0);
    let panels = 32 + (a.abs() * upper / std::f64::consts::PI).ceil() as usize;
    let f = |t: f64| {
        let r = if t < 1e-6 {
            0.25 * b * (2.0 - b) - 2.0
        } else {
            (sg_h_over_t(b, t) * t * t.cosh() - 2.0 * (1.0 - (-t).exp())) / t
        };
        r * (a * t).cos()
    };
    let (j, _) = adaptive_simpson(f, 0.0, upper, 1e-11, panels, "sinh-Gordon F_min real line")?;
    let log_mod = 0.5 * c0 - 0.5 * (j + ((1.0 + a * a) / (a * a)).ln());
    let phase = -(s / theta.sinh()).atan();
    Ok(Complex64::from_polar(log_mod.exp(), phase))
}
