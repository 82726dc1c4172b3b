//! Uniform symmetric grids and the Fourier pair
//!
//! ```text
//! (Ff)(x)    = ∫ f(t) e^{itx} dt
//! (F⁻¹g)(t)  = (2π)⁻¹ ∫ g(x) e^{-itx} dx
//! ```
//!
//! A grid of `N` nodes on `[-T, T)` has spacing `h = 2T/N`. Its dual grid has
//! spacing `π/T` and half-width `Nπ/(2T)`, so the dual of the dual is the
//! original grid. With nodes `x_n = -T + nh` and frequencies
//! `ω_k = -Ω + kπ/T`, the Riemann sum of the forward integral collapses to
//! `h (-1)^k Σ_n (-1)^n f_n e^{2πink/N}` for every power of two `N ≥ 4`,
//! which is an unnormalized inverse DFT with alternating-sign phase
//! corrections. The inverse transform is the matching forward DFT, and the
//! round trip is exact up to rounding.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{LabError, Result};

/// Default truncation radius.
pub const DEFAULT_HALF_WIDTH: f64 = 32.0;
/// Default number of nodes.
pub const DEFAULT_COUNT: usize = 1 << 14;
/// Default tolerance on the relative L² mass in the outer tenth of the window.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    half_width: f64,
    count: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            half_width: DEFAULT_HALF_WIDTH,
            count: DEFAULT_COUNT,
        }
    }
}

impl Grid {
    pub fn new(half_width: f64, count: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(LabError::Config(format!(
                "grid half-width must be positive and finite, got {half_width}"
            )));
        }
        if count < 4 || !count.is_power_of_two() {
            return Err(LabError::Config(format!(
                "grid count must be a power of two ≥ 4, got {count}"
            )));
        }
        Ok(Grid { half_width, count })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.count as f64
    }

    #[inline]
    pub fn node(&self, n: usize) -> f64 {
        -self.half_width + n as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.spacing();
        let t = self.half_width;
        (0..self.count).map(move |n| -t + n as f64 * h)
    }

    /// Frequency grid matching this spatial grid.
    pub fn dual(&self) -> Grid {
        Grid {
            half_width: self.count as f64 * PI / (2.0 * self.half_width),
            count: self.count,
        }
    }

    /// Index of the node nearest to `x`, if `x` lies in `[-T, T)`.
    pub fn nearest_index(&self, x: f64) -> Option<usize> {
        let t = (x + self.half_width) / self.spacing();
        let n = t.round();
        if n < 0.0 || n >= self.count as f64 || !t.is_finite() {
            None
        } else {
            Some(n as usize)
        }
    }

    /// Index of the node at `x = 0`.
    pub fn origin_index(&self) -> usize {
        self.count / 2
    }

    pub(crate) fn same_as(&self, other: &Grid) -> bool {
        self.count == other.count
            && (self.half_width - other.half_width).abs() <= 1e-12 * self.half_width
    }
}

/// Complex samples on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.count() {
            return Err(LabError::Config(format!(
                "expected {} samples, got {}",
                grid.count(),
                values.len()
            )));
        }
        if let Some(n) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(LabError::Domain(format!("non-finite sample at index {n}")));
        }
        Ok(SampledFunction { grid, values })
    }

    /// Constructor for internal paths whose values are finite by construction.
    pub(crate) fn from_parts(grid: Grid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.count());
        SampledFunction { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        SampledFunction {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.count()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        SampledFunction {
            grid,
            values: grid.nodes().map(f).collect(),
        }
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let values = self
            .grid
            .nodes()
            .zip(&self.values)
            .map(|(x, &v)| f(x, v))
            .collect();
        SampledFunction {
            grid: self.grid,
            values,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|_, v| c * v)
    }

    /// Pointwise `self + c·other`.
    pub fn add_scaled(&self, c: Complex64, other: &SampledFunction) -> Self {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + c * b)
            .collect();
        SampledFunction {
            grid: self.grid,
            values,
        }
    }

    pub fn sub(&self, other: &SampledFunction) -> Self {
        self.add_scaled(Complex64::new(-1.0, 0.0), other)
    }

    pub fn mul(&self, other: &SampledFunction) -> Self {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        SampledFunction {
            grid: self.grid,
            values,
        }
    }

    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// `∫ f conj(g)` by the Riemann sum with node weights `h`.
    pub fn inner(&self, other: &SampledFunction) -> Complex64 {
        let h = self.grid.spacing();
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
            * h
    }

    /// `∫ f` by the Riemann sum.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.grid.spacing()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.spacing()).sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum::<f64>() * self.grid.spacing()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Fraction of the squared L² mass carried by nodes with `|x| > 0.9 T`.
    pub fn tail_fraction(&self) -> f64 {
        let total: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let edge = 0.9 * self.grid.half_width();
        let tail: f64 = self
            .grid
            .nodes()
            .zip(&self.values)
            .filter(|(x, _)| x.abs() > edge)
            .map(|(_, v)| v.norm_sqr())
            .sum();
        tail / total
    }
}

/// Result of a forward or inverse transform together with its truncation diagnostic.
#[derive(Debug, Clone)]
pub struct Transformed {
    pub samples: SampledFunction,
    /// Relative L² mass of the input near the window edges.
    pub tail_fraction: f64,
}

impl Transformed {
    /// `true` when the input was not negligible near `±T`.
    pub fn truncation_warning(&self, tolerance: f64) -> bool {
        self.tail_fraction > tolerance
    }
}

struct PlanPair {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> Arc<PlanPair> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<PlanPair>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(PlanPair {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

#[inline]
fn alternate(buf: &mut [Complex64]) {
    for v in buf.iter_mut().skip(1).step_by(2) {
        *v = -*v;
    }
}

/// Forward transform of raw samples on `grid`; output lives on `grid.dual()`.
pub(crate) fn forward_in_place(grid: &Grid, buf: &mut [Complex64]) {
    alternate(buf);
    plans(buf.len()).inverse.process(buf);
    alternate(buf);
    let h = grid.spacing();
    for v in buf.iter_mut() {
        *v *= h;
    }
}

/// Inverse transform of raw samples on `grid.dual()`; output lives on `grid`.
pub(crate) fn inverse_in_place(grid: &Grid, buf: &mut [Complex64]) {
    alternate(buf);
    plans(buf.len()).forward.process(buf);
    alternate(buf);
    let scale = 1.0 / (2.0 * grid.half_width());
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Samples of `∫ f(t) e^{itx} dt` on the dual grid.
pub fn fourier_transform(f: &SampledFunction) -> Transformed {
    let mut buf = f.values.clone();
    forward_in_place(&f.grid, &mut buf);
    Transformed {
        samples: SampledFunction::from_parts(f.grid.dual(), buf),
        tail_fraction: f.tail_fraction(),
    }
}

/// Samples of `(2π)⁻¹ ∫ g(x) e^{-itx} dx` on the dual of `g`'s grid.
pub fn inverse_fourier_transform(g: &SampledFunction) -> Transformed {
    let spatial = g.grid.dual();
    let mut buf = g.values.clone();
    inverse_in_place(&spatial, &mut buf);
    Transformed {
        samples: SampledFunction::from_parts(spatial, buf),
        tail_fraction: g.tail_fraction(),
    }
}

/// `e_λ f` with `e_λ(x) = e^{iλx}`.
pub fn modulate(f: &SampledFunction, lambda: f64) -> SampledFunction {
    if lambda == 0.0 {
        return f.clone();
    }
    f.map(|x, v| v * Complex64::from_polar(1.0, lambda * x))
}
