//! Fourier multipliers `W⁰(a) = F⁻¹ a F` and the Cauchy singular integral.
//!
//! On the grid `W⁰(a)` is a diagonal operator in the discrete Fourier basis,
//! so compositions and translation invariance hold exactly. With the forward
//! kernel `e^{+itx}`, the Cauchy operator
//! `(Sf)(x) = (πi)⁻¹ p.v.∫ f(t)/(t - x) dt` has symbol `σ(ω) = -sign ω`;
//! the PV quadrature cross-check in the tests pins this sign.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{LabError, Result};
use crate::grid::{forward_in_place, inverse_in_place, Grid, SampledFunction};
use crate::linop::LinearOperator;
use crate::spaces::{operator_norm_estimate, NormEstimate, NormEstimateOptions, SpaceSpec};

/// Symbol sampled on a frequency grid, with cached total variation.
#[derive(Debug, Clone)]
pub struct Symbol {
    name: String,
    samples: SampledFunction,
    limit_at_infinity: Option<Complex64>,
    total_variation: f64,
}

impl Symbol {
    /// `samples` live on the frequency grid, i.e. the dual of the spatial grid.
    pub fn new(name: impl Into<String>, samples: SampledFunction, limit_at_infinity: Option<Complex64>) -> Self {
        let total_variation = discrete_variation(samples.values());
        Symbol {
            name: name.into(),
            samples,
            limit_at_infinity,
            total_variation,
        }
    }

    /// Samples `a(ω)` on the dual of `spatial`.
    pub fn from_fn(
        name: impl Into<String>,
        spatial: &Grid,
        limit_at_infinity: Option<Complex64>,
        a: impl Fn(f64) -> Complex64,
    ) -> Self {
        Self::new(name, SampledFunction::from_fn(spatial.dual(), a), limit_at_infinity)
    }

    pub fn constant(spatial: &Grid, c: Complex64) -> Self {
        Self::from_fn(format!("const:{c}"), spatial, Some(c), |_| c)
    }

    /// Reads `ω re [im]` rows, interpolated linearly onto the frequency grid and
    /// held constant beyond the first and last rows.
    pub fn from_file(path: &Path, spatial: &Grid) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut rows: Vec<(f64, Complex64)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<f64> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| LabError::Parse(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
            match cols.as_slice() {
                [w, re] => rows.push((*w, Complex64::new(*re, 0.0))),
                [w, re, im] => rows.push((*w, Complex64::new(*re, *im))),
                _ => {
                    return Err(LabError::Parse(format!(
                        "{}:{}: expected 2 or 3 columns",
                        path.display(),
                        lineno + 1
                    )))
                }
            }
        }
        if rows.is_empty() {
            return Err(LabError::Parse(format!("{}: no symbol rows", path.display())));
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        let rows = Arc::new(rows);
        let r = rows.clone();
        Ok(Self::from_fn(path.display().to_string(), spatial, None, move |w| {
            let i = r.partition_point(|p| p.0 <= w);
            if i == 0 {
                r[0].1
            } else if i == r.len() {
                r[r.len() - 1].1
            } else {
                let (w0, a0) = r[i - 1];
                let (w1, a1) = r[i];
                a0 + (a1 - a0) * ((w - w0) / (w1 - w0))
            }
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn samples(&self) -> &SampledFunction {
        &self.samples
    }

    pub fn limit_at_infinity(&self) -> Option<Complex64> {
        self.limit_at_infinity
    }

    /// Largest distance between the two boundary samples and the declared limit.
    pub fn limit_gap(&self) -> Option<f64> {
        let l = self.limit_at_infinity?;
        let v = self.samples.values();
        Some((v[0] - l).norm().max((v[v.len() - 1] - l).norm()))
    }

    pub fn total_variation(&self) -> f64 {
        self.total_variation
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.sup_norm()
    }

    /// `‖a‖_V = ‖a‖_∞ + V(a)`.
    pub fn v_norm(&self) -> f64 {
        self.sup_norm() + self.total_variation
    }

    /// Spatial grid the symbol acts on.
    pub fn spatial_grid(&self) -> Grid {
        self.samples.grid().dual()
    }

    pub fn product(&self, other: &Symbol) -> Symbol {
        let limit = match (self.limit_at_infinity, other.limit_at_infinity) {
            (Some(a), Some(b)) => Some(a * b),
            _ => None,
        };
        Symbol::new(
            format!("{}*{}", self.name, other.name),
            self.samples.mul(&other.samples),
            limit,
        )
    }

    /// `a(· + τ)` with `τ` an integer number of frequency steps.
    pub fn shifted(&self, steps: i64) -> Symbol {
        let v = self.samples.values();
        let n = v.len() as i64;
        let edge = |i: i64| v[i.clamp(0, n - 1) as usize];
        let shifted: Vec<Complex64> = (0..n).map(|k| edge(k + steps)).collect();
        Symbol::new(
            format!("{}(+{steps})", self.name),
            SampledFunction::from_parts(*self.samples.grid(), shifted),
            self.limit_at_infinity,
        )
    }
}

fn discrete_variation(v: &[Complex64]) -> f64 {
    v.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

/// `V(a)`, the variation over the frequency grid.
pub fn total_variation(a: &Symbol) -> f64 {
    discrete_variation(a.samples.values())
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn bump(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

fn sign(w: f64) -> f64 {
    if w > 0.0 {
        1.0
    } else if w < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Unit-height sawtooth with teeth of width 2 on `[-8, 8)`, zero outside.
fn sawtooth(w: f64) -> f64 {
    if (-8.0..8.0).contains(&w) {
        (w + 8.0).rem_euclid(2.0) / 2.0
    } else {
        0.0
    }
}

/// Names accepted by [`named_symbol`].
pub const NAMED: [&str; 4] = ["sign", "arctan", "bump", "sawtooth-BV"];

/// Built-in symbols by name.
pub fn named_symbol(name: &str, spatial: &Grid) -> Result<Symbol> {
    let zero = Some(c(0.0));
    Ok(match name {
        "sign" => Symbol::from_fn("sign", spatial, None, |w| c(sign(w))),
        "arctan" => Symbol::from_fn("arctan", spatial, None, |w| c(w.atan())),
        "bump" => Symbol::from_fn("bump", spatial, zero, |w| c(bump(w / 4.0))),
        "sawtooth-BV" => Symbol::from_fn("sawtooth-BV", spatial, zero, |w| c(sawtooth(w))),
        "cauchy" => cauchy_symbol(spatial),
        _ => {
            return Err(LabError::Config(format!(
                "unknown symbol {name:?}; expected one of {}",
                NAMED.join(", ")
            )))
        }
    })
}

/// The 20 symbols of bounded variation used for the Stechkin battery.
/// Jumps sit between grid nodes so that the discrete variation is exact.
pub fn bv_battery(spatial: &Grid) -> Vec<Symbol> {
    let d = spatial.dual().spacing();
    let mid = |w: f64| (w / d).floor() * d + 0.5 * d;
    let zero = Some(c(0.0));
    let mut out: Vec<Symbol> = NAMED
        .iter()
        .map(|n| named_symbol(n, spatial).expect("built-in symbol"))
        .collect();
    let step1 = mid(1.0);
    let lo = mid(-1.0);
    let hi = mid(1.0);
    let extra: Vec<(&str, Option<Complex64>, Box<dyn Fn(f64) -> Complex64>)> = vec![
        ("cauchy", None, Box::new(|w| c(-sign(w)))),
        ("tanh", None, Box::new(|w: f64| c(w.tanh()))),
        ("tanh3", None, Box::new(|w: f64| c((3.0 * w).tanh()))),
        ("band", zero, Box::new(move |w| c(if w > lo && w < hi { 1.0 } else { 0.0 }))),
        ("heaviside-1", None, Box::new(move |w| c(if w > step1 { 1.0 } else { 0.0 }))),
        ("gauss", zero, Box::new(|w: f64| c((-w * w).exp()))),
        ("lorentz", zero, Box::new(|w: f64| c(1.0 / (1.0 + w * w)))),
        ("sign-decay", zero, Box::new(|w: f64| c(sign(w) * (-w.abs()).exp()))),
        ("smooth-step", None, Box::new(|w: f64| c(0.5 + w.atan() / PI))),
        (
            "staircase",
            None,
            Box::new(move |w| c([mid(-2.0), mid(0.5), mid(3.0)].iter().filter(|&&s| w > s).count() as f64 / 3.0)),
        ),
        ("hat", zero, Box::new(|w: f64| c((1.0 - w.abs() / 3.0).max(0.0)))),
        ("chirp-bump", zero, Box::new(|w: f64| Complex64::from_polar(bump(w / 6.0), w))),
        ("phase-step", None, Box::new(|w: f64| if w > 0.0 { Complex64::new(0.0, 1.0) } else { c(1.0) })),
        ("constant", Some(c(2.0)), Box::new(|_| c(2.0))),
        ("i-constant", Some(Complex64::new(0.0, -1.0)), Box::new(|_| Complex64::new(0.0, -1.0))),
        ("sawtooth-fine", zero, Box::new(|w: f64| c(0.5 * sawtooth(2.0 * w)))),
    ];
    for (name, limit, f) in extra {
        out.push(Symbol::from_fn(name, spatial, limit, f));
    }
    out
}

/// `W⁰(a)` as a linear operator on its spatial grid.
#[derive(Debug, Clone)]
pub struct W0Operator {
    grid: Grid,
    symbol: Vec<Complex64>,
}

impl W0Operator {
    pub fn new(a: &Symbol) -> Self {
        W0Operator {
            grid: a.spatial_grid(),
            symbol: a.samples.values().to_vec(),
        }
    }

    fn run(&self, x: &[Complex64], conj: bool) -> Vec<Complex64> {
        let mut buf = x.to_vec();
        forward_in_place(&self.grid, &mut buf);
        for (b, s) in buf.iter_mut().zip(&self.symbol) {
            *b *= if conj { s.conj() } else { *s };
        }
        inverse_in_place(&self.grid, &mut buf);
        buf
    }
}

impl LinearOperator for W0Operator {
    fn dim(&self) -> usize {
        self.grid.count()
    }
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.run(x, false)
    }
    /// `F` is a multiple of a unitary matrix, so the adjoint of `W⁰(a)` is `W⁰(ā)`.
    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        self.run(y, true)
    }
}

fn check_compatible(a: &Symbol, f: &SampledFunction) -> Result<()> {
    if !a.spatial_grid().same_as(f.grid()) {
        return Err(LabError::Config(format!(
            "symbol grid (T = {}, N = {}) does not match the function grid (T = {}, N = {})",
            a.spatial_grid().half_width(),
            a.spatial_grid().count(),
            f.grid().half_width(),
            f.grid().count()
        )));
    }
    Ok(())
}

pub fn apply_w0(a: &Symbol, f: &SampledFunction) -> Result<SampledFunction> {
    check_compatible(a, f)?;
    Ok(SampledFunction::from_parts(*f.grid(), W0Operator::new(a).apply(f.values())))
}

/// `c_{L^p}`: `tan(π/2p)` for `p ≤ 2`, `cot(π/2p)` for `p ≥ 2`.
pub fn stechkin_constant(p: f64) -> f64 {
    let t = PI / (2.0 * p);
    if p <= 2.0 {
        t.tan()
    } else {
        1.0 / t.tan()
    }
}

#[derive(Debug, Clone)]
pub struct StechkinReport {
    /// Certified lower bound for `‖W⁰(a)‖`.
    pub lhs: f64,
    /// `c_{L^p} ‖a‖_V` for Lebesgue specs, `None` otherwise.
    pub rhs: Option<f64>,
    pub v_norm: f64,
    /// `lhs / ‖a‖_V`, the empirical constant for the spec.
    pub empirical_constant: f64,
}

impl StechkinReport {
    pub fn holds(&self, tolerance: f64) -> Option<bool> {
        self.rhs.map(|r| self.lhs <= r * (1.0 + tolerance))
    }
}

pub fn stechkin_check(a: &Symbol, spec: &SpaceSpec, opts: &NormEstimateOptions) -> Result<StechkinReport> {
    let lhs = multiplier_norm_estimate(a, spec, opts)?.value;
    let v_norm = a.v_norm();
    let rhs = match spec {
        SpaceSpec::Lebesgue { p } => Some(stechkin_constant(*p) * v_norm),
        _ => None,
    };
    Ok(StechkinReport {
        lhs,
        rhs,
        v_norm,
        empirical_constant: if v_norm > 0.0 { lhs / v_norm } else { 0.0 },
    })
}

pub fn multiplier_norm_estimate(a: &Symbol, spec: &SpaceSpec, opts: &NormEstimateOptions) -> Result<NormEstimate> {
    let grid = a.spatial_grid();
    operator_norm_estimate(&W0Operator::new(a), &grid, spec, opts)
}

/// `σ(ω) = -sign ω`, with `σ(0) = 0`.
pub fn cauchy_symbol(spatial: &Grid) -> Symbol {
    Symbol::from_fn("cauchy", spatial, None, |w| c(-sign(w)))
}

pub fn cauchy_singular_multiplier(f: &SampledFunction) -> SampledFunction {
    let a = cauchy_symbol(f.grid());
    SampledFunction::from_parts(*f.grid(), W0Operator::new(&a).apply(f.values()))
}

/// Symmetric-exclusion PV quadrature of `(πi)⁻¹ p.v.∫ f(t)/(t - x) dt`.
///
/// Off the cell of `x_m` the integrand is sampled at the nodes, which gives
/// `Σ_{n≠m} f_n/(n - m)` (the spacing cancels). On the excluded cell the odd
/// part of the kernel cancels and the remainder is `h f'(x_m)`, taken as a
/// central difference. The sum over `n` is a linear correlation evaluated by a
/// zero-padded FFT.
pub fn cauchy_singular_pv(f: &SampledFunction) -> SampledFunction {
    let v = f.values();
    let n = v.len();
    let len = 2 * n;
    let zero = Complex64::new(0.0, 0.0);
    // corr[m] = Σ_n f_n k(n - m) with k(d) = 1/d, k(0) = 0.
    // Written as a convolution with the reflected kernel r(d) = k(-d) = -1/d.
    let mut a = vec![zero; len];
    a[..n].copy_from_slice(v);
    let mut b = vec![zero; len];
    for d in 1..n {
        b[d] = c(-1.0 / d as f64);
        b[len - d] = c(1.0 / d as f64);
    }
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    inv.process(&mut a);
    let scale = 1.0 / len as f64;
    let factor = Complex64::new(0.0, -1.0 / PI);
    let out: Vec<Complex64> = (0..n)
        .map(|m| {
            let left = if m > 0 { v[m - 1] } else { zero };
            let right = if m + 1 < n { v[m + 1] } else { zero };
            factor * (a[m] * scale + 0.5 * (right - left))
        })
        .collect();
    SampledFunction::from_parts(*f.grid(), out)
}
