//! Concrete Banach function norms on the grid.
//!
//! Three families are supported:
//!
//! * `Lp:p`: `‖f‖ = (∫|f|^p)^{1/p}`;
//! * `WLp:p:γ`: `‖f‖ = ‖ |x|^γ f ‖_p` with `-1/p < γ < 1 - 1/p`;
//! * `VLp:name`: the Luxemburg norm `inf{λ > 0 : ∫(|f|/λ)^{p(x)} ≤ 1}`.
//!
//! The weight sits on the function rather than on the measure, so the
//! associate of `WLp:p:γ` is `WLp:p':-γ` and Hölder's inequality holds with
//! constant 1. On the cell containing `x = 0` the weight `|x|^{γp}` is
//! replaced by its exact cell average, which keeps the weight finite for
//! negative `γ` and preserves Hölder exactly at the discrete level.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{LabError, Result};
use crate::grid::{Grid, SampledFunction};
use crate::linop::LinearOperator;
use crate::par;
use crate::rng::{stream_rng, streams};

/// Tolerance on the Luxemburg modular.
pub const MODULAR_TOLERANCE: f64 = 1e-12;
/// Default number of restarts for [`operator_norm_estimate`].
pub const DEFAULT_RESTARTS: usize = 32;

/// A variable exponent `p(·)` together with its essential bounds.
#[derive(Clone)]
pub struct Exponent {
    label: String,
    profile: Profile,
    lower: f64,
    upper: f64,
}

#[derive(Clone)]
enum Profile {
    Gauss,
    Table(Arc<Vec<(f64, f64)>>),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    Conjugate(Box<Exponent>),
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Exponent({}, [{}, {}])",
            self.label, self.lower, self.upper
        )
    }
}

impl PartialEq for Exponent {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label && close(self.lower, other.lower) && close(self.upper, other.upper)
    }
}

impl Exponent {
    /// `p(x) = 2 + e^{-x²/8}`, taking values in `(2, 3]`.
    pub fn gauss() -> Self {
        Exponent {
            label: "gauss".into(),
            profile: Profile::Gauss,
            lower: 2.0,
            upper: 3.0,
        }
    }

    /// Exponent given by a closure; `lower` and `upper` are its declared bounds,
    /// checked against the samples whenever the exponent is used on a grid.
    pub fn custom(
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        lower: f64,
        upper: f64,
    ) -> Result<Self> {
        let e = Exponent {
            label: label.into(),
            profile: Profile::Custom(Arc::new(f)),
            lower,
            upper,
        };
        e.validate()?;
        Ok(e)
    }

    /// Piecewise linear exponent through `(x, p)` knots, constant outside them.
    pub fn table(label: impl Into<String>, mut knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(LabError::Config("exponent table is empty".into()));
        }
        if knots.iter().any(|(x, p)| !x.is_finite() || !p.is_finite()) {
            return Err(LabError::Config("exponent table has non-finite entries".into()));
        }
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        let lower = knots.iter().map(|k| k.1).fold(f64::INFINITY, f64::min);
        let upper = knots.iter().map(|k| k.1).fold(f64::NEG_INFINITY, f64::max);
        let e = Exponent {
            label: label.into(),
            profile: Profile::Table(Arc::new(knots)),
            lower,
            upper,
        };
        e.validate()?;
        Ok(e)
    }

    /// Reads a two-column `x p` text file; `#` starts a comment.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut knots = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(LabError::Parse(format!(
                    "{}:{}: expected two columns",
                    path.display(),
                    lineno + 1
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|e| {
                    LabError::Parse(format!("{}:{}: {e}", path.display(), lineno + 1))
                })
            };
            knots.push((parse(cols[0])?, parse(cols[1])?));
        }
        Self::table(path.display().to_string(), knots)
    }

    fn validate(&self) -> Result<()> {
        if !(self.lower > 1.0 && self.upper.is_finite() && self.lower <= self.upper) {
            return Err(LabError::Config(format!(
                "variable exponent {} needs 1 < p- <= p+ < inf, got [{}, {}]",
                self.label, self.lower, self.upper
            )));
        }
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `(ess inf p, ess sup p)`.
    pub fn bounds(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.profile {
            Profile::Gauss => 2.0 + (-x * x / 8.0).exp(),
            Profile::Custom(f) => f(x),
            Profile::Conjugate(e) => {
                let p = e.eval(x);
                p / (p - 1.0)
            }
            Profile::Table(knots) => {
                let i = knots.partition_point(|k| k.0 <= x);
                if i == 0 {
                    knots[0].1
                } else if i == knots.len() {
                    knots[knots.len() - 1].1
                } else {
                    let (x0, p0) = knots[i - 1];
                    let (x1, p1) = knots[i];
                    p0 + (p1 - p0) * (x - x0) / (x1 - x0)
                }
            }
        }
    }

    /// Pointwise conjugate `p' = p/(p-1)`.
    pub fn conjugate(&self) -> Exponent {
        if let Profile::Conjugate(inner) = &self.profile {
            return (**inner).clone();
        }
        Exponent {
            label: format!("{}'", self.label),
            profile: Profile::Conjugate(Box::new(self.clone())),
            lower: conjugate(self.upper),
            upper: conjugate(self.lower),
        }
    }
}

pub fn conjugate(p: f64) -> f64 {
    1.0 / (1.0 - 1.0 / p)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Equality is up to relative `1e-12` in the real parameters, so that
/// taking the associate twice compares equal despite rounding.
#[derive(Debug, Clone)]
pub enum SpaceSpec {
    Lebesgue { p: f64 },
    WeightedLebesgue { p: f64, gamma: f64 },
    VariableLebesgue(Exponent),
}

impl PartialEq for SpaceSpec {
    fn eq(&self, other: &Self) -> bool {
        use SpaceSpec::*;
        match (self, other) {
            (Lebesgue { p: a }, Lebesgue { p: b }) => close(*a, *b),
            (WeightedLebesgue { p: a, gamma: g }, WeightedLebesgue { p: b, gamma: k }) => {
                close(*a, *b) && close(*g, *k)
            }
            (VariableLebesgue(a), VariableLebesgue(b)) => a == b,
            _ => false,
        }
    }
}

impl SpaceSpec {
    pub fn lebesgue(p: f64) -> Result<Self> {
        let s = SpaceSpec::Lebesgue { p };
        s.validate()?;
        Ok(s)
    }

    pub fn weighted(p: f64, gamma: f64) -> Result<Self> {
        let s = SpaceSpec::WeightedLebesgue { p, gamma };
        s.validate()?;
        Ok(s)
    }

    pub fn variable(e: Exponent) -> Result<Self> {
        let s = SpaceSpec::VariableLebesgue(e);
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let check_p = |p: f64| {
            if p > 1.0 && p.is_finite() {
                Ok(())
            } else {
                Err(LabError::Config(format!("exponent must satisfy 1 < p < inf, got {p}")))
            }
        };
        match self {
            SpaceSpec::Lebesgue { p } => check_p(*p),
            SpaceSpec::WeightedLebesgue { p, gamma } => {
                check_p(*p)?;
                if !(*gamma > -1.0 / p && *gamma < 1.0 - 1.0 / p) {
                    return Err(LabError::Config(format!(
                        "power weight |x|^{gamma} is outside the A_p range for p = {p}"
                    )));
                }
                Ok(())
            }
            SpaceSpec::VariableLebesgue(e) => e.validate(),
        }
    }

    /// Associate space; an involution on specs.
    pub fn associate(&self) -> SpaceSpec {
        match self {
            SpaceSpec::Lebesgue { p } => SpaceSpec::Lebesgue { p: conjugate(*p) },
            SpaceSpec::WeightedLebesgue { p, gamma } => SpaceSpec::WeightedLebesgue {
                p: conjugate(*p),
                gamma: -gamma,
            },
            SpaceSpec::VariableLebesgue(e) => SpaceSpec::VariableLebesgue(e.conjugate()),
        }
    }

    /// `(p-, p+)`.
    pub fn exponent_bounds(&self) -> (f64, f64) {
        match self {
            SpaceSpec::Lebesgue { p } | SpaceSpec::WeightedLebesgue { p, .. } => (*p, *p),
            SpaceSpec::VariableLebesgue(e) => e.bounds(),
        }
    }

    /// Constant in `∫|fg| ≤ C ‖f‖_X ‖g‖_{X'}`.
    pub fn holder_constant(&self) -> f64 {
        match self {
            SpaceSpec::VariableLebesgue(e) => {
                let (lo, hi) = e.bounds();
                1.0 / lo + 1.0 / conjugate(hi)
            }
            _ => 1.0,
        }
    }

    pub fn is_l2(&self) -> bool {
        matches!(self, SpaceSpec::Lebesgue { p } if *p == 2.0)
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Lebesgue { p } => write!(f, "Lp:{p}"),
            SpaceSpec::WeightedLebesgue { p, gamma } => write!(f, "WLp:{p}:{gamma}"),
            SpaceSpec::VariableLebesgue(e) => write!(f, "VLp:{}", e.label()),
        }
    }
}

fn parse_real(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || LabError::Parse(format!("not a number: {s:?}"));
    if let Some((a, b)) = s.split_once('/') {
        let a: f64 = a.trim().parse().map_err(|_| bad())?;
        let b: f64 = b.trim().parse().map_err(|_| bad())?;
        Ok(a / b)
    } else {
        s.parse().map_err(|_| bad())
    }
}

impl FromStr for SpaceSpec {
    type Err = LabError;

    /// Accepts `Lp:4`, `Lp:4/3`, `WLp:2:0.25`, `VLp:gauss`, `VLp:gauss'` and
    /// `VLp:<path>` for a two-column exponent table.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| LabError::Parse(format!("space spec {s:?} has no ':'")))?;
        match kind {
            "Lp" => SpaceSpec::lebesgue(parse_real(rest)?),
            "WLp" => {
                let (p, g) = rest
                    .split_once(':')
                    .ok_or_else(|| LabError::Parse(format!("expected WLp:p:gamma, got {s:?}")))?;
                SpaceSpec::weighted(parse_real(p)?, parse_real(g)?)
            }
            "VLp" => {
                let (name, conj) = match rest.strip_suffix('\'') {
                    Some(n) => (n, true),
                    None => (rest, false),
                };
                let e = if name == "gauss" {
                    Exponent::gauss()
                } else {
                    Exponent::from_file(Path::new(name))?
                };
                SpaceSpec::variable(if conj { e.conjugate() } else { e })
            }
            _ => Err(LabError::Parse(format!("unknown space family {kind:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMethod {
    DirectQuadrature,
    LuxemburgBisection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport {
    pub value: f64,
    pub method: NormMethod,
    /// `|modular - 1|` for Luxemburg norms, 0 for direct quadrature.
    pub residual: f64,
}

#[derive(Debug, Clone)]
enum Exponents {
    Constant(f64),
    Variable(Vec<f64>),
}

/// A space spec frozen on a grid: `ρ(f) = Σ c_n |f_n|^{p_n}` plus the norm it induces.
#[derive(Debug, Clone)]
pub struct SpaceGeometry {
    coef: Vec<f64>,
    exps: Exponents,
}

impl SpaceGeometry {
    pub fn new(grid: &Grid, spec: &SpaceSpec) -> Result<Self> {
        spec.validate()?;
        let h = grid.spacing();
        let n = grid.count();
        match spec {
            SpaceSpec::Lebesgue { p } => Ok(SpaceGeometry {
                coef: vec![h; n],
                exps: Exponents::Constant(*p),
            }),
            SpaceSpec::WeightedLebesgue { p, gamma } => {
                let gp = gamma * p;
                let coef = grid
                    .nodes()
                    .map(|x| {
                        if x.abs() < 0.5 * h {
                            h * (0.5 * h).powf(gp) / (gp + 1.0)
                        } else {
                            h * x.abs().powf(gp)
                        }
                    })
                    .collect();
                Ok(SpaceGeometry {
                    coef,
                    exps: Exponents::Constant(*p),
                })
            }
            SpaceSpec::VariableLebesgue(e) => {
                let (lo, hi) = e.bounds();
                let ps: Vec<f64> = grid.nodes().map(|x| e.eval(x)).collect();
                if let Some(bad) = ps
                    .iter()
                    .find(|&&p| !(p >= lo - 1e-12 && p <= hi + 1e-12))
                {
                    return Err(LabError::Config(format!(
                        "exponent {} takes value {bad} outside its declared range [{lo}, {hi}]",
                        e.label()
                    )));
                }
                Ok(SpaceGeometry {
                    coef: vec![h; n],
                    exps: Exponents::Variable(ps),
                })
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.coef.len()
    }

    pub fn norm(&self, f: &[Complex64]) -> NormReport {
        match &self.exps {
            Exponents::Constant(p) => {
                let s: f64 = self
                    .coef
                    .iter()
                    .zip(f)
                    .map(|(c, v)| c * v.norm().powf(*p))
                    .sum();
                NormReport {
                    value: s.powf(1.0 / p),
                    method: NormMethod::DirectQuadrature,
                    residual: 0.0,
                }
            }
            Exponents::Variable(ps) => {
                let amps: Vec<f64> = f.iter().map(|v| v.norm()).collect();
                let (value, residual) = solve_modular(&self.coef, &amps, ps);
                NormReport {
                    value,
                    method: NormMethod::LuxemburgBisection,
                    residual,
                }
            }
        }
    }

    pub fn norm_value(&self, f: &[Complex64]) -> f64 {
        self.norm(f).value
    }

    /// Supporting functional of the norm at `y`: `Re⟨g, y⟩ = ‖y‖` and `‖g‖_* = 1`.
    fn gradient(&self, y: &[Complex64], ny: f64) -> Vec<Complex64> {
        let zero = Complex64::new(0.0, 0.0);
        match &self.exps {
            Exponents::Constant(p) => {
                let scale = ny.powf(p - 1.0);
                self.coef
                    .iter()
                    .zip(y)
                    .map(|(c, v)| {
                        let a = v.norm();
                        if a == 0.0 {
                            zero
                        } else {
                            v / a * (c * a.powf(p - 1.0) / scale)
                        }
                    })
                    .collect()
            }
            Exponents::Variable(ps) => {
                let mut denom = 0.0;
                let mut g: Vec<Complex64> = Vec::with_capacity(y.len());
                for ((c, v), p) in self.coef.iter().zip(y).zip(ps) {
                    let a = v.norm();
                    if a == 0.0 {
                        g.push(zero);
                        continue;
                    }
                    let u = a / ny;
                    let up = u.powf(p - 1.0);
                    denom += c * p * up * u;
                    g.push(v / a * (c * p * up));
                }
                g.iter().map(|v| v / denom).collect()
            }
        }
    }

    /// Unit vector `x` maximizing `Re⟨z, x⟩`.
    fn maximizer(&self, z: &[Complex64]) -> Vec<Complex64> {
        let zero = Complex64::new(0.0, 0.0);
        let mut x: Vec<Complex64> = match &self.exps {
            Exponents::Constant(p) => {
                let q = 1.0 / (p - 1.0);
                self.coef
                    .iter()
                    .zip(z)
                    .map(|(c, v)| {
                        let a = v.norm();
                        if a == 0.0 {
                            zero
                        } else {
                            v / a * (a / c).powf(q)
                        }
                    })
                    .collect()
            }
            Exponents::Variable(ps) => {
                // |x_n| = (|z_n| / (μ c_n p_n))^{1/(p_n - 1)}, with μ fixed by ρ(x) = 1:
                // Σ c_n (a_n/μ)^{q_n} = 1 where a_n = |z_n|/(c_n p_n), q_n = p_n/(p_n - 1).
                let amps: Vec<f64> = self
                    .coef
                    .iter()
                    .zip(z)
                    .zip(ps)
                    .map(|((c, v), p)| v.norm() / (c * p))
                    .collect();
                let qs: Vec<f64> = ps.iter().map(|&p| conjugate(p)).collect();
                let (mu, _) = solve_modular(&self.coef, &amps, &qs);
                z.iter()
                    .zip(&amps)
                    .zip(ps)
                    .map(|((v, a), p)| {
                        let r = v.norm();
                        if r == 0.0 || mu == 0.0 {
                            zero
                        } else {
                            v / r * (a / mu).powf(1.0 / (p - 1.0))
                        }
                    })
                    .collect()
            }
        };
        let n = self.norm_value(&x);
        if n > 0.0 {
            for v in x.iter_mut() {
                *v /= n;
            }
        }
        x
    }
}

/// Solves `Σ c_n (a_n/λ)^{p_n} = 1` for `λ`; returns `(λ, |modular - 1|)`.
///
/// The modular is a sum of exponentials in `s = ln λ`, so `ln m(s)` is convex
/// and decreasing. Newton steps on `ln m` are kept inside a shrinking bracket
/// and replaced by bisection whenever they leave it.
fn solve_modular(c: &[f64], a: &[f64], p: &[f64]) -> (f64, f64) {
    let amax = a.iter().copied().fold(0.0, f64::max);
    if amax == 0.0 {
        return (0.0, 0.0);
    }
    let eval = |s: f64| -> (f64, f64) {
        let mut m = 0.0;
        let mut dm = 0.0;
        for ((c, a), p) in c.iter().zip(a).zip(p) {
            if *a > 0.0 {
                let t = c * ((a.ln() - s) * p).exp();
                m += t;
                dm -= p * t;
            }
        }
        (m, dm)
    };
    let mut lo = amax.ln() - 1.0;
    let mut hi = amax.ln() + 1.0;
    while eval(lo).0 < 1.0 {
        lo -= (hi - lo).max(1.0);
    }
    while eval(hi).0 > 1.0 {
        hi += (hi - lo).max(1.0);
    }
    let mut s = 0.5 * (lo + hi);
    let mut residual = f64::INFINITY;
    for _ in 0..200 {
        let (m, dm) = eval(s);
        residual = (m - 1.0).abs();
        if residual <= MODULAR_TOLERANCE {
            break;
        }
        if m > 1.0 {
            lo = s;
        } else {
            hi = s;
        }
        let newton = s - m.ln() * m / dm;
        s = if newton > lo && newton < hi && newton.is_finite() {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-15 * s.abs().max(1.0) {
            residual = (eval(s).0 - 1.0).abs();
            break;
        }
    }
    (s.exp(), residual)
}

/// `‖f‖_X`.
pub fn norm(f: &SampledFunction, spec: &SpaceSpec) -> Result<NormReport> {
    let report = SpaceGeometry::new(f.grid(), spec)?.norm(f.values());
    if report.method == NormMethod::LuxemburgBisection && report.residual > 1e3 * MODULAR_TOLERANCE
    {
        return Err(LabError::invariant(
            "function_spaces",
            format!("Luxemburg solve stalled with residual {}", report.residual),
        ));
    }
    Ok(report)
}

pub fn associate_space(spec: &SpaceSpec) -> Result<SpaceSpec> {
    spec.validate()?;
    Ok(spec.associate())
}

/// `∫|fg| / (‖f‖_X ‖g‖_{X'})`.
pub fn holder_check(f: &SampledFunction, g: &SampledFunction, spec: &SpaceSpec) -> Result<f64> {
    if !f.grid().same_as(g.grid()) {
        return Err(LabError::Config("Hölder pair lives on different grids".into()));
    }
    let h = f.grid().spacing();
    let num: f64 = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| (a * b).norm())
        .sum::<f64>()
        * h;
    let den = norm(f, spec)?.value * norm(g, &spec.associate())?.value;
    if den == 0.0 {
        if num == 0.0 {
            return Ok(0.0);
        }
        return Err(LabError::Undefined("Hölder ratio with zero norm".into()));
    }
    Ok(num / den)
}

#[derive(Debug, Clone, Copy)]
pub struct NormEstimateOptions {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Stop a restart once the relative gain per step drops below this.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for NormEstimateOptions {
    fn default() -> Self {
        NormEstimateOptions {
            restarts: DEFAULT_RESTARTS,
            max_iterations: 300,
            tolerance: 1e-10,
            seed: 0,
        }
    }
}

impl NormEstimateOptions {
    pub fn with_restarts(restarts: usize, seed: u64) -> Self {
        NormEstimateOptions {
            restarts,
            seed,
            ..Default::default()
        }
    }
}

/// Certified lower bound for `‖A‖_{X→X}` with the vector achieving it.
#[derive(Debug, Clone)]
pub struct NormEstimate {
    pub value: f64,
    pub witness: Vec<Complex64>,
    /// Whether the best restart met the tolerance before the iteration cap.
    pub converged: bool,
    pub iterations: usize,
}

fn start_vector(n: usize, restart: usize, seed: u64) -> Vec<Complex64> {
    if restart == 0 {
        // Deterministic: a smooth off-centre bump with a linear phase tilt.
        return (0..n)
            .map(|i| {
                let t = (i as f64 + 0.5) / n as f64 - 0.45;
                Complex64::from_polar((-40.0 * t * t).exp() + 1e-3, 3.0 * t)
            })
            .collect();
    }
    let mut rng = stream_rng(seed, streams::RESTART, restart as u64);
    (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

fn power_iteration(
    op: &dyn LinearOperator,
    geo: &SpaceGeometry,
    start: Vec<Complex64>,
    opts: &NormEstimateOptions,
) -> NormEstimate {
    let mut x = start;
    let nx = geo.norm_value(&x);
    if nx == 0.0 {
        return NormEstimate {
            value: 0.0,
            witness: x,
            converged: true,
            iterations: 0,
        };
    }
    x.iter_mut().for_each(|v| *v /= nx);
    let mut best = NormEstimate {
        value: 0.0,
        witness: x.clone(),
        converged: false,
        iterations: 0,
    };
    for it in 1..=opts.max_iterations {
        let y = op.apply(&x);
        let ny = geo.norm_value(&y);
        let ratio = ny / geo.norm_value(&x);
        let gain = ratio - best.value;
        if ratio > best.value {
            best.value = ratio;
            best.witness = x.clone();
        }
        best.iterations = it;
        if ny == 0.0 {
            best.converged = true;
            break;
        }
        if it > 1 && gain <= opts.tolerance * best.value {
            best.converged = true;
            break;
        }
        let g = geo.gradient(&y, ny);
        let z = op.apply_adjoint(&g);
        let next = geo.maximizer(&z);
        if next.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
            best.converged = true;
            break;
        }
        x = next;
    }
    best
}

/// Generalized power iteration for `‖A‖` on `X`, best over `restarts` starts.
///
/// Restart 0 starts from a fixed vector and restart `r ≥ 1` from a Gaussian
/// vector drawn from `derive_seed(seed, RESTART, r)`, so the estimate is
/// nondecreasing in the number of restarts.
pub fn operator_norm_estimate(
    op: &dyn LinearOperator,
    grid: &Grid,
    spec: &SpaceSpec,
    opts: &NormEstimateOptions,
) -> Result<NormEstimate> {
    if op.dim() != grid.count() {
        return Err(LabError::Config(format!(
            "operator dimension {} does not match grid count {}",
            op.dim(),
            grid.count()
        )));
    }
    let geo = SpaceGeometry::new(grid, spec)?;
    Ok(estimate_with_geometry(op, &geo, opts))
}

pub(crate) fn estimate_with_geometry(
    op: &dyn LinearOperator,
    geo: &SpaceGeometry,
    opts: &NormEstimateOptions,
) -> NormEstimate {
    let n = op.dim();
    let runs = par::map_indexed(opts.restarts.max(1), |r| {
        power_iteration(op, geo, start_vector(n, r, opts.seed), opts)
    });
    runs.into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("at least one restart")
}

/// Matrix-free norm estimate for an operator on a raw coordinate space with `p`-norm weights.
pub fn estimate_on_coordinates(
    op: &dyn LinearOperator,
    weights: &[f64],
    p: f64,
    opts: &NormEstimateOptions,
) -> NormEstimate {
    let geo = SpaceGeometry {
        coef: weights.to_vec(),
        exps: Exponents::Constant(p),
    };
    estimate_with_geometry(op, &geo, opts)
}
