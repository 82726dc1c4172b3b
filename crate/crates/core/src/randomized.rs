//! Sign-randomized wavelet kernels and operators.
//!
//! For a dyadic system `{e_i}` and signs `ε_i ∈ {±1}`,
//!
//! ```text
//! K_ε(x, y) = Σ ε_i e_i(x) e_i(y),     T_ε f = Σ ε_i ⟨f, e_i⟩ e_i,
//! (Vf)(x)   = (Σ |⟨f, e_i⟩ e_i(x)|²)^{1/2}.
//! ```
//!
//! `T_ε` is applied in factored form, `Ψᵀ diag(ε) Ψ h`, which is the same
//! matrix as the dense kernel matrix but costs one analysis and one
//! synthesis per application. The wavelets are real, so the matrix is real
//! symmetric.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{LabError, Result};
use crate::grid::{Grid, SampledFunction};
use crate::linop::LinearOperator;
use crate::maximal::{local_sharp_max_at, maximal_at, IntervalFamily, Kernel};
use crate::par;
use crate::rng::{stream_rng, streams, LabRng};
use crate::spaces::{norm, operator_norm_estimate, NormEstimateOptions, SpaceSpec};
use crate::wavelets::{DyadicSystem, ElementKind};

/// Khintchine constant for the lower inequality with Rademacher signs.
pub const KHINTCHINE_L: f64 = std::f64::consts::SQRT_2;

/// One sign per element of a [`DyadicSystem`], in element order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignSequence {
    entries: Vec<i8>,
}

impl SignSequence {
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        if let Some(bad) = entries.iter().find(|e| **e != 1 && **e != -1) {
            return Err(LabError::Config(format!("sign entry {bad} is not ±1")));
        }
        Ok(SignSequence { entries })
    }

    pub fn all_plus(n: usize) -> Self {
        SignSequence { entries: vec![1; n] }
    }

    pub fn random(n: usize, rng: &mut LabRng) -> Self {
        SignSequence {
            entries: (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect(),
        }
    }

    /// Draw `index` of the sign stream under `seed`.
    pub fn seeded(n: usize, seed: u64, index: u64) -> Self {
        Self::random(n, &mut stream_rng(seed, streams::SIGNS, index))
    }

    /// The `index`-th of the `2^n` sign patterns, bit `i` set meaning `-1`.
    pub fn enumerate(n: usize, index: u64) -> Self {
        SignSequence {
            entries: (0..n).map(|i| if index >> i & 1 == 1 { -1 } else { 1 }).collect(),
        }
    }

    pub fn negated(&self) -> Self {
        SignSequence {
            entries: self.entries.iter().map(|e| -e).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.entries[i] as f64
    }
}

fn check_len(sys: &DyadicSystem, eps: &SignSequence) -> Result<()> {
    if sys.len() != eps.len() {
        return Err(LabError::Config(format!(
            "sign sequence has {} entries for a window of {} elements",
            eps.len(),
            sys.len()
        )));
    }
    Ok(())
}

/// Elements of `sys` whose support contains `x`, with their values at `x`.
fn active_at(sys: &DyadicSystem, x: f64) -> Vec<(usize, f64)> {
    let w = sys.wavelet();
    let len = w.support_len();
    let mut levels: Vec<(ElementKind, i32)> = sys.elements().iter().map(|e| (e.kind, e.j)).collect();
    levels.sort_unstable();
    levels.dedup();
    let mut out = Vec::new();
    for (kind, j) in levels {
        let scale = (j as f64).exp2();
        let u = scale * x;
        let k_lo = (u - len).floor() as i64;
        let k_hi = u.floor() as i64;
        for k in k_lo..=k_hi {
            if let Some(i) = sys.position(kind, j, k) {
                let arg = u - k as f64;
                let v = scale.sqrt()
                    * match kind {
                        ElementKind::Wavelet => w.psi(arg),
                        ElementKind::Scaling => w.phi(arg),
                    };
                if v != 0.0 {
                    out.push((i, v));
                }
            }
        }
    }
    out
}

/// `K_ε` as a [`Kernel`].
pub struct WaveletKernel<'a> {
    pub system: &'a DyadicSystem,
    pub signs: &'a SignSequence,
}

impl<'a> WaveletKernel<'a> {
    pub fn new(system: &'a DyadicSystem, signs: &'a SignSequence) -> Result<Self> {
        check_len(system, signs)?;
        Ok(WaveletKernel { system, signs })
    }
}

impl Kernel for WaveletKernel<'_> {
    fn eval(&self, x: f64, y: f64) -> Complex64 {
        let ax = active_at(self.system, x);
        let ay = active_at(self.system, y);
        let mut s = 0.0;
        for (i, vx) in &ax {
            if let Some((_, vy)) = ay.iter().find(|(m, _)| m == i) {
                s += self.signs.get(*i) * vx * vy;
            }
        }
        Complex64::new(s, 0.0)
    }

    fn row(&self, z: f64, grid: &Grid) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); grid.count()];
        let elements = self.system.elements();
        for (i, v) in active_at(self.system, z) {
            let e = &elements[i];
            let c = self.signs.get(i) * v;
            for (o, ev) in out[e.start..e.end()].iter_mut().zip(&e.values) {
                o.re += c * ev;
            }
        }
        out
    }
}

/// `K_ε(x, y)` off the diagonal.
pub fn kernel_k_eps(sys: &DyadicSystem, eps: &SignSequence, x: f64, y: f64) -> Result<Complex64> {
    if x == y {
        return Err(LabError::Domain(format!("K_eps is not evaluated on the diagonal (x = y = {x})")));
    }
    Ok(WaveletKernel::new(sys, eps)?.eval(x, y))
}

/// `T_ε` on grid vectors.
pub struct TEpsOperator<'a> {
    pub system: &'a DyadicSystem,
    pub signs: &'a SignSequence,
}

impl<'a> TEpsOperator<'a> {
    pub fn new(system: &'a DyadicSystem, signs: &'a SignSequence) -> Result<Self> {
        check_len(system, signs)?;
        Ok(TEpsOperator { system, signs })
    }
}

impl LinearOperator for TEpsOperator<'_> {
    fn dim(&self) -> usize {
        self.system.grid().count()
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut c = self.system.coefficients(x);
        for (i, v) in c.iter_mut().enumerate() {
            *v *= self.signs.get(i);
        }
        self.system.synthesize(&c)
    }

    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        self.apply(y)
    }
}

pub fn apply_t_eps(f: &SampledFunction, sys: &DyadicSystem, eps: &SignSequence) -> Result<SampledFunction> {
    if !f.grid().same_as(sys.grid()) {
        return Err(LabError::Config("function and window live on different grids".into()));
    }
    let op = TEpsOperator::new(sys, eps)?;
    Ok(SampledFunction::from_parts(*f.grid(), op.apply(f.values())))
}

/// `(Vf)(x)` at every grid node.
pub fn square_function_v(f: &SampledFunction, sys: &DyadicSystem) -> SampledFunction {
    let coefs = sys.coefficients(f.values());
    let mut acc = vec![0.0; f.len()];
    for (e, c) in sys.elements().iter().zip(&coefs) {
        let c2 = c.norm_sqr();
        if c2 == 0.0 {
            continue;
        }
        for (a, v) in acc[e.start..e.end()].iter_mut().zip(&e.values) {
            *a += c2 * v * v;
        }
    }
    SampledFunction::from_parts(
        *f.grid(),
        acc.into_iter().map(|a| Complex64::new(a.sqrt(), 0.0)).collect(),
    )
}

/// Terms `⟨f, e_i⟩ e_i(x_m)` at the grid node `m`.
pub fn terms_at(f: &SampledFunction, sys: &DyadicSystem, m: usize) -> Vec<Complex64> {
    let h = sys.grid().spacing();
    sys.elements()
        .iter()
        .filter(|e| m >= e.start && m < e.end())
        .map(|e| e.pair(f.values(), h) * e.values[m - e.start])
        .collect()
}

/// Empirical standard-kernel constants.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Per-draw values of `(Ĉ₁, Ĉ₂, Ĉ₃)`, one per sign draw.
    pub per_draw: Vec<(f64, f64, f64)>,
}

impl KernelConstants {
    /// `(max - min)/max` of `Ĉ₂` across draws.
    pub fn c2_spread(&self) -> f64 {
        let (lo, hi) = self
            .per_draw
            .iter()
            .fold((f64::INFINITY, 0.0f64), |a, d| (a.0.min(d.1), a.1.max(d.1)));
        if hi == 0.0 {
            0.0
        } else {
            (hi - lo) / hi
        }
    }
}

/// Number of sign draws used by [`standard_kernel_constants`].
pub const KERNEL_SIGN_DRAWS: usize = 16;

type Products = Vec<(usize, f64)>;

fn products(a: &[(usize, f64)], b: &[(usize, f64)]) -> Products {
    a.iter()
        .filter_map(|(i, va)| b.iter().find(|(m, _)| m == i).map(|(_, vb)| (*i, va * vb)))
        .collect()
}

fn signed_sum(p: &Products, eps: &SignSequence) -> f64 {
    p.iter().map(|(i, v)| eps.get(*i) * v).sum()
}

/// Suprema of
///
/// ```text
/// |K(x,y)| |x-y|,
/// |K(z,y) - K(x,y)| |x-y|² / |z-x|,
/// |K(y,z) - K(y,x)| |x-y|² / |z-x|,       |z-x| ≤ |x-y|/2,
/// ```
///
/// over `sample_count` random tuples and [`KERNEL_SIGN_DRAWS`] sign draws.
/// Half of the tuples put `x` in the support of a randomly chosen element
/// and use log-uniform distances `|x - y|` so that the near-diagonal regime
/// is sampled at every scale; the rest are uniform pairs in the window's
/// support. Each draw's best tuples for each constant are then refined by a
/// local compass search. The same tuples are used for every draw.
pub fn standard_kernel_constants(sys: &DyadicSystem, sample_count: usize, seed: u64) -> Result<KernelConstants> {
    if sample_count < 1000 {
        return Err(LabError::Config(format!("sample_count = {sample_count} is below 1000")));
    }
    if sys.is_empty() {
        return Err(LabError::Config("empty window".into()));
    }
    let grid = sys.grid();
    let lo = grid.node(sys.elements().iter().map(|e| e.start).min().unwrap_or(0));
    let hi = grid.node(sys.elements().iter().map(|e| e.end()).max().unwrap_or(1) - 1);
    let finest = sys.elements().iter().map(|e| e.j).max().unwrap_or(0);
    let d_min = (-(finest as f64)).exp2() * 1e-3;
    let d_max = hi - lo;
    let tuples: Vec<(f64, f64, f64)> = par::map_indexed(sample_count, |t| {
        let mut rng = stream_rng(seed, streams::KERNEL_SAMPLES, t as u64);
        loop {
            let (x, y) = if t % 2 == 0 {
                let e = &sys.elements()[rng.random_range(0..sys.len())];
                let (a, b) = (grid.node(e.start), grid.node(e.end() - 1));
                let d = d_min * (d_max / d_min).powf(rng.random::<f64>());
                let x = a + (b - a) * rng.random::<f64>();
                let y = if rng.random::<bool>() { x + d } else { x - d };
                (x, y)
            } else {
                (lo + (hi - lo) * rng.random::<f64>(), lo + (hi - lo) * rng.random::<f64>())
            };
            if y < lo || y > hi || x == y {
                continue;
            }
            let half = 0.5 * (x - y).abs();
            let dz = half * (1e-3f64).powf(rng.random::<f64>());
            let z = if rng.random::<bool>() { x + dz } else { x - dz };
            return (x, y, z);
        }
    });
    // K(x,y), K(z,y), K(y,z), K(y,x) share products per tuple; K is symmetric
    // for real wavelets so only two distinct product lists are needed.
    let prepared: Vec<(f64, f64, Products, Products)> = par::map_indexed(tuples.len(), |t| {
        let (x, y, z) = tuples[t];
        let ax = active_at(sys, x);
        let ay = active_at(sys, y);
        let az = active_at(sys, z);
        ((x - y).abs(), (z - x).abs(), products(&ax, &ay), products(&az, &ay))
    });
    let per_draw: Vec<(f64, f64, f64)> = par::map_indexed(KERNEL_SIGN_DRAWS, |d| {
        let eps = SignSequence::seeded(sys.len(), seed, d as u64);
                let mut sizes = Vec::with_capacity(prepared.len());
        let mut smooths = Vec::with_capacity(prepared.len());
        for (t, (dxy, dzx, pxy, pzy)) in prepared.iter().enumerate() {
            let kxy = signed_sum(pxy, &eps);
            let kzy = signed_sum(pzy, &eps);
            sizes.push((kxy.abs() * dxy, t));
            smooths.push(((kzy - kxy).abs() * dxy * dxy / dzx, t));
        }
        let kernel = |x: f64, y: f64| signed_sum(&products(&active_at(sys, x), &active_at(sys, y)), &eps);
        let size = top(&mut sizes)
            .map(|(v, t)| {
                let (x, y, _) = tuples[t];
                polish([x, y - x, 0.0], v, lo, hi, |x, d, _| kernel(x, x + d).abs() * d.abs())
            })
            .fold(0.0, f64::max);
        let smooth = top(&mut smooths)
            .map(|(v, t)| {
                let (x, y, z) = tuples[t];
                polish([x, y - x, z - x], v, lo, hi, |x, d, t| {
                    (kernel(x + t, x + d) - kernel(x, x + d)).abs() * d * d / t.abs()
                })
            })
            .fold(0.0, f64::max);
        // K(y, z) - K(y, x) equals K(z, y) - K(x, y) by symmetry.
        (size, smooth, smooth)
    });
    let fold = |f: fn(&(f64, f64, f64)) -> f64| per_draw.iter().map(f).fold(0.0, f64::max);
    Ok(KernelConstants {
        c1: fold(|d| d.0),
        c2: fold(|d| d.1),
        c3: fold(|d| d.2),
        per_draw,
    })
}

/// Starting tuples refined per draw and constant.
const POLISH_STARTS: usize = 16;

fn top(v: &mut [(f64, usize)]) -> impl Iterator<Item = (f64, usize)> + '_ {
    v.sort_unstable_by(|a, b| b.0.total_cmp(&a.0));
    v.iter().take(POLISH_STARTS).copied()
}

/// Compass search from the sampled maximiser of `g(x, d, t)`, where the
/// tuple is `(x, x + d, x + t)` with `0 < |t| ≤ |d|/2` and every point in
/// `[lo, hi]`. Steps are relative to `|d|` and `|t|`.
fn polish(start: [f64; 3], value: f64, lo: f64, hi: f64, g: impl Fn(f64, f64, f64) -> f64) -> f64 {
    let admissible = |p: &[f64; 3]| {
        let inside = |u: f64| (lo..=hi).contains(&u);
        let [x, d, t] = *p;
        d != 0.0 && inside(x) && inside(x + d) && inside(x + t) && (start[2] == 0.0 || (t != 0.0 && t.abs() <= 0.5 * d.abs()))
    };
    let (mut p, mut best) = (start, value);
    let mut step = 0.1;
    for _ in 0..200 {
        if step < 1e-6 {
            break;
        }
        let scale = [p[1].abs(), p[1].abs(), p[2].abs()];
        let mut moved = false;
        for axis in 0..3 {
            if start[2] == 0.0 && axis == 2 {
                continue;
            }
            for sign in [1.0, -1.0] {
                let mut q = p;
                q[axis] += sign * step * scale[axis];
                if admissible(&q) {
                    let v = g(q[0], q[1], q[2]);
                    if v > best {
                        (p, best, moved) = (q, v, true);
                    }
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    best
}

/// `sup_λ λ |{|T_ε f| > λ}| / ‖f‖₁`.
///
/// The distribution function of a sampled function is a step function, so the
/// sup over all `λ` is attained in the limit `λ ↑ g_(m)` for the `m`-th largest
/// value `g_(m)` and equals `max_m m h g_(m)`.
pub fn weak11_estimate(sys: &DyadicSystem, eps: &SignSequence, f: &SampledFunction) -> Result<f64> {
    let l1 = f.l1_norm();
    if l1 == 0.0 {
        return Err(LabError::Undefined("‖f‖₁ = 0".into()));
    }
    let tf = apply_t_eps(f, sys, eps)?;
    Ok(weak_quasinorm(&tf) / l1)
}

/// `sup_λ λ |{|g| > λ}|`.
pub fn weak_quasinorm(g: &SampledFunction) -> f64 {
    let mut v = g.abs();
    v.sort_by(|a, b| b.total_cmp(a));
    let h = g.grid().spacing();
    v.iter()
        .enumerate()
        .map(|(m, val)| (m + 1) as f64 * h * val)
        .fold(0.0, f64::max)
}

/// `(T_ε f)_s^#(x₀) / (Mf)(x₀)`.
pub fn sharp_vs_maximal_ratio(
    sys: &DyadicSystem,
    eps: &SignSequence,
    f: &SampledFunction,
    s: f64,
    family: &IntervalFamily,
) -> Result<f64> {
    let mf = maximal_at(f, family.anchor)?;
    if mf == 0.0 {
        return Err(LabError::Undefined("(Mf)(x0) = 0".into()));
    }
    let tf = apply_t_eps(f, sys, eps)?;
    Ok(local_sharp_max_at(&tf, s, family)? / mf)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KhintchineReport {
    /// `(Vf)(x)`.
    pub lhs: f64,
    /// Monte Carlo mean of `|T_ε f(x)|`.
    pub mean: f64,
    pub standard_error: f64,
    /// `L · mean`.
    pub rhs: f64,
}

impl KhintchineReport {
    /// `lhs ≤ L (mean + 3 se)`.
    pub fn holds(&self) -> bool {
        self.lhs <= KHINTCHINE_L * (self.mean + 3.0 * self.standard_error) + 1e-14 * self.lhs
    }
}

/// Monte Carlo check of `(Vf)(x) ≤ L ∫ |T_ε f(x)| dμ(ε)` at the node nearest `x`.
pub fn khintchine_domination(
    f: &SampledFunction,
    sys: &DyadicSystem,
    x: f64,
    trials: usize,
    seed: u64,
) -> Result<KhintchineReport> {
    if trials < 1000 {
        return Err(LabError::Config(format!("trials = {trials} is below 1000")));
    }
    let m = f
        .grid()
        .nearest_index(x)
        .ok_or_else(|| LabError::Domain(format!("x = {x} is outside the grid")))?;
    let terms = terms_at(f, sys, m);
    Ok(khintchine_monte_carlo(&terms, trials, seed))
}

pub fn khintchine_monte_carlo(terms: &[Complex64], trials: usize, seed: u64) -> KhintchineReport {
    let lhs = terms.iter().map(|t| t.norm_sqr()).sum::<f64>().sqrt();
    let mut rng = stream_rng(seed, streams::MONTE_CARLO, 0);
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for _ in 0..trials {
        let v: Complex64 = terms
            .iter()
            .map(|t| if rng.random::<bool>() { *t } else { -*t })
            .sum();
        let a = v.norm();
        sum += a;
        sum2 += a * a;
    }
    let n = trials as f64;
    let mean = sum / n;
    let var = ((sum2 / n - mean * mean) * n / (n - 1.0)).max(0.0);
    KhintchineReport {
        lhs,
        mean,
        standard_error: (var / n).sqrt(),
        rhs: KHINTCHINE_L * mean,
    }
}

/// Exact mean over all `2^n` sign patterns, `n ≤ 16`.
pub fn khintchine_exhaustive(terms: &[Complex64]) -> Result<KhintchineReport> {
    if terms.len() > 16 {
        return Err(LabError::Config(format!(
            "exhaustive enumeration is limited to 16 terms, got {}",
            terms.len()
        )));
    }
    let lhs = terms.iter().map(|t| t.norm_sqr()).sum::<f64>().sqrt();
    let count = 1u64 << terms.len();
    let total: f64 = (0..count)
        .map(|p| {
            terms
                .iter()
                .enumerate()
                .map(|(i, t)| if p >> i & 1 == 1 { -*t } else { *t })
                .sum::<Complex64>()
                .norm()
        })
        .sum();
    let mean = total / count as f64;
    Ok(KhintchineReport {
        lhs,
        mean,
        standard_error: 0.0,
        rhs: KHINTCHINE_L * mean,
    })
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    /// `max_t ‖T_{ε_t}‖`.
    pub n_hat: f64,
    pub per_trial: Vec<f64>,
}

impl SweepReport {
    /// `N̂` over the first `trials` trials.
    pub fn prefix_max(&self, trials: usize) -> f64 {
        self.per_trial[..trials.min(self.per_trial.len())]
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }
}

/// `‖Σ ε_i ⟨f, ψ_i⟩ ψ_i‖_X / ‖f‖_X` for `draws` sign draws, draw `d` using
/// `SignSequence::seeded(len, seed, d)`.
pub fn unconditionality_probe(
    f: &SampledFunction,
    sys: &DyadicSystem,
    spec: &SpaceSpec,
    draws: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let nf = norm(f, spec)?.value;
    if nf == 0.0 {
        return Err(LabError::Undefined("‖f‖ = 0".into()));
    }
    let ratios = par::map_indexed(draws, |d| {
        let eps = SignSequence::seeded(sys.len(), seed, d as u64);
        Ok(norm(&apply_t_eps(f, sys, &eps)?, spec)?.value / nf)
    });
    ratios.into_iter().collect()
}

/// Operator norms of `T_ε` on `spec` for `trials` sign draws.
///
/// Trial `t` uses signs `derive_seed(seed, SIGNS, t)` and restart seeds
/// `derive_seed(seed, TRIAL, t)`, so the first `n` trials of a longer sweep
/// coincide with a sweep of length `n`.
pub fn uniform_bound_sweep(
    sys: &DyadicSystem,
    spec: &SpaceSpec,
    trials: usize,
    seed: u64,
    restarts: usize,
) -> Result<SweepReport> {
    if trials == 0 {
        return Err(LabError::Config("uniform_bound_sweep needs at least one trial".into()));
    }
    let grid = *sys.grid();
    let per_trial: Result<Vec<f64>> = (0..trials)
        .map(|t| {
            let eps = SignSequence::seeded(sys.len(), seed, t as u64);
            let op = TEpsOperator::new(sys, &eps)?;
            let opts = NormEstimateOptions {
                restarts,
                max_iterations: 100,
                tolerance: 1e-8,
                seed: crate::rng::derive_seed(seed, streams::TRIAL, t as u64),
            };
            Ok(operator_norm_estimate(&op, &grid, spec, &opts)?.value)
        })
        .collect();
    let per_trial = per_trial?;
    Ok(SweepReport {
        n_hat: per_trial.iter().copied().fold(0.0, f64::max),
        per_trial,
    })
}
