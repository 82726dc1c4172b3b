//! Daubechies wavelets and dyadic systems on the grid.

pub mod cascade;
pub mod filters;
pub mod system;

use std::sync::Arc;

use crate::error::{LabError, Result};

pub use cascade::{cascade_evaluate, CascadeSamples, DEFAULT_LEVELS};
pub use system::{
    dyadic_element, reconstruct, wavelet_coefficients, CoefficientTable, DyadicSystem, Element,
    ElementKind, Window,
};

/// Radial exponential envelope `W(s) = C e^{-δs}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Majorant {
    pub c: f64,
    pub delta: f64,
}

impl Majorant {
    pub fn eval(&self, s: f64) -> f64 {
        self.c * (-self.delta * s.abs()).exp()
    }

    /// `∫₀^∞ s W(s) ds = C/δ²`.
    pub fn first_moment(&self) -> f64 {
        self.c / (self.delta * self.delta)
    }
}

#[derive(Debug)]
struct Inner {
    name: String,
    filter: Vec<f64>,
    samples: CascadeSamples,
    majorant: Majorant,
}

/// A Daubechies wavelet with dyadic samples of `φ`, `ψ` (and `ψ'` from db3 on).
/// Cheap to clone.
#[derive(Debug, Clone)]
pub struct Wavelet(Arc<Inner>);

impl Wavelet {
    pub fn new(name: &str) -> Result<Self> {
        Self::with_levels(name, DEFAULT_LEVELS)
    }

    pub fn with_levels(name: &str, levels: usize) -> Result<Self> {
        let filter = filters::daubechies(name)?;
        let samples = cascade_evaluate(&filter, levels, cascade::has_derivative(filter.len()))?;
        let mut w = Inner {
            name: name.to_string(),
            filter,
            samples,
            majorant: Majorant { c: 1.0, delta: 1.0 },
        };
        w.majorant = fit_envelope(&w)?;
        Ok(Wavelet(Arc::new(w)))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn filter(&self) -> &[f64] {
        &self.0.filter
    }

    /// Right end of the support `[0, L-1]` of `φ` and `ψ`.
    pub fn support_len(&self) -> f64 {
        (self.0.filter.len() - 1) as f64
    }

    pub fn samples(&self) -> &CascadeSamples {
        &self.0.samples
    }

    pub fn majorant(&self) -> Majorant {
        self.0.majorant
    }

    pub fn is_c1(&self) -> bool {
        self.0.samples.dpsi.is_some()
    }

    pub fn psi(&self, x: f64) -> f64 {
        let s = &self.0.samples;
        self.interpolate(&s.psi, s.dpsi.as_deref(), x)
    }

    pub fn phi(&self, x: f64) -> f64 {
        let s = &self.0.samples;
        self.interpolate(&s.phi, s.dphi.as_deref(), x)
    }

    pub fn dpsi(&self, x: f64) -> Result<f64> {
        let s = &self.0.samples;
        let d = s.dpsi.as_deref().ok_or_else(|| {
            LabError::UnsupportedRegularity(format!("{} has no derivative", self.name()))
        })?;
        Ok(self.linear(d, x))
    }

    fn linear(&self, v: &[f64], x: f64) -> f64 {
        let inv = (self.0.samples.levels as f64).exp2();
        let t = x * inv;
        if t < 0.0 || t >= (v.len() - 1) as f64 {
            return 0.0;
        }
        let i = t.floor() as usize;
        let f = t - i as f64;
        v[i] * (1.0 - f) + v[i + 1] * f
    }

    /// Cubic Hermite with exact slopes when available, a left-closed step for
    /// Haar and linear interpolation otherwise.
    fn interpolate(&self, v: &[f64], dv: Option<&[f64]>, x: f64) -> f64 {
        let s = &self.0.samples;
        let inv = (s.levels as f64).exp2();
        let t = x * inv;
        if t < 0.0 || t >= (v.len() - 1) as f64 {
            return 0.0;
        }
        let i = t.floor() as usize;
        let f = t - i as f64;
        if self.0.filter.len() == 2 {
            return v[i];
        }
        match dv {
            Some(d) => {
                let step = s.step();
                let (p0, p1) = (v[i], v[i + 1]);
                let (m0, m1) = (d[i] * step, d[i + 1] * step);
                let f2 = f * f;
                let f3 = f2 * f;
                (2.0 * f3 - 3.0 * f2 + 1.0) * p0
                    + (f3 - 2.0 * f2 + f) * m0
                    + (-2.0 * f3 + 3.0 * f2) * p1
                    + (f3 - f2) * m1
            }
            None => v[i] * (1.0 - f) + v[i + 1] * f,
        }
    }
}

/// Largest `max(|ψ|, |ψ'|)` over the mesh nodes at distance `≥ s` from the origin,
/// on the mesh itself.
fn envelope_values(s: &CascadeSamples) -> Vec<f64> {
    s.psi
        .iter()
        .enumerate()
        .map(|(m, v)| {
            let d = s.dpsi.as_ref().map_or(0.0, |d| d[m].abs());
            v.abs().max(d)
        })
        .collect()
}

fn fit_envelope(w: &Inner) -> Result<Majorant> {
    let s = &w.samples;
    let step = s.step();
    let values = envelope_values(s);
    // Nonincreasing hull from the right: E(x) = max_{y ≥ x} |value(y)|.
    let mut hull = values.clone();
    for m in (0..hull.len() - 1).rev() {
        hull[m] = hull[m].max(hull[m + 1]);
    }
    let floor = hull[0] * 1e-6;
    let pts: Vec<(f64, f64)> = hull
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > floor)
        .map(|(m, v)| (m as f64 * step, v.ln()))
        .collect();
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |a, p| {
        (a.0 + (p.0 - mx) * (p.1 - my), a.1 + (p.0 - mx) * (p.0 - mx))
    });
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let delta = (-slope).max(0.05);
    let mut m = Majorant {
        c: (my - slope * mx).exp(),
        delta,
    };
    for _ in 0..3 {
        let worst = majorant_violation(s, &values, m);
        if worst <= 1.0 {
            return Ok(m);
        }
        m.c *= worst * (1.0 + 1e-9);
    }
    Err(LabError::Fit(format!(
        "majorant for {} still violated after 3 widenings",
        w.name
    )))
}

/// `max value/W(x)` over the mesh; at most 1 when `W` dominates.
fn majorant_violation(s: &CascadeSamples, values: &[f64], m: Majorant) -> f64 {
    let step = s.step();
    values
        .iter()
        .enumerate()
        .map(|(i, v)| v / m.eval(i as f64 * step))
        .fold(0.0, f64::max)
}

/// Fitted `(C, δ)` such that `|ψ(x)|, |ψ'(x)| ≤ C e^{-δ|x|}` on the cascade mesh.
pub fn fit_majorant(w: &Wavelet) -> Majorant {
    w.majorant()
}

/// Number of mesh nodes where `m` fails to dominate `|ψ|` (and `|ψ'|` when present).
pub fn majorant_violations(w: &Wavelet, m: Majorant) -> usize {
    let s = w.samples();
    let step = s.step();
    envelope_values(s)
        .iter()
        .enumerate()
        .filter(|(i, v)| **v > m.eval(*i as f64 * step))
        .count()
}
