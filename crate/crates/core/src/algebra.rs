//! Finite-rank operators, the factorization `T₁ = aW⁰(c)bI`, finite-rank
//! approximation in a wavelet basis, and compactness diagnostics.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::grid::{fourier_transform, Grid, SampledFunction};
use crate::linop::{leading_singular_values, Composition, Difference, LinearOperator, Multiplication};
use crate::multipliers::{named_symbol, Symbol, W0Operator};
use crate::spaces::{norm, operator_norm_estimate, NormEstimateOptions, SpaceSpec};
use crate::wavelets::{DyadicSystem, Wavelet, Window};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `f ↦ Σ_j a_j ∫ b_j f`.
#[derive(Debug, Clone)]
pub struct FiniteRankOperator {
    terms: Vec<(SampledFunction, SampledFunction)>,
}

impl FiniteRankOperator {
    pub fn new(terms: Vec<(SampledFunction, SampledFunction)>) -> Result<Self> {
        let Some((a0, _)) = terms.first() else {
            return Err(LabError::Config("finite-rank operator needs at least one term".into()));
        };
        let g = *a0.grid();
        if terms.iter().any(|(a, b)| !a.grid().same_as(&g) || !b.grid().same_as(&g)) {
            return Err(LabError::Config("finite-rank terms live on different grids".into()));
        }
        Ok(FiniteRankOperator { terms })
    }

    pub fn rank_one(a: SampledFunction, b: SampledFunction) -> Result<Self> {
        Self::new(vec![(a, b)])
    }

    pub fn terms(&self) -> &[(SampledFunction, SampledFunction)] {
        &self.terms
    }

    pub fn grid(&self) -> &Grid {
        self.terms[0].0.grid()
    }

    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    pub fn apply_to(&self, f: &SampledFunction) -> Result<SampledFunction> {
        if !f.grid().same_as(self.grid()) {
            return Err(LabError::Config("function grid differs from the operator grid".into()));
        }
        Ok(SampledFunction::from_parts(*f.grid(), self.apply(f.values())))
    }
}

fn bilinear(b: &[Complex64], f: &[Complex64], h: f64) -> Complex64 {
    b.iter().zip(f).map(|(u, v)| u * v).sum::<Complex64>() * h
}

impl LinearOperator for FiniteRankOperator {
    fn dim(&self) -> usize {
        self.grid().count()
    }
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let h = self.grid().spacing();
        let mut out = vec![ZERO; x.len()];
        for (a, b) in &self.terms {
            let s = bilinear(b.values(), x, h);
            for (o, v) in out.iter_mut().zip(a.values()) {
                *o += v * s;
            }
        }
        out
    }
    /// The matrix is `h Σ a_j b_jᵀ`, so the adjoint is `h Σ b̄_j a_j*`.
    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        let h = self.grid().spacing();
        let mut out = vec![ZERO; y.len()];
        for (a, b) in &self.terms {
            let s: Complex64 = a.values().iter().zip(y).map(|(u, v)| u.conj() * v).sum::<Complex64>() * h;
            for (o, v) in out.iter_mut().zip(b.values()) {
                *o += v.conj() * s;
            }
        }
        out
    }
}

/// `a(x) ∫ b(y) f(y) dy`.
pub fn rank_one_apply(a: &SampledFunction, b: &SampledFunction, f: &SampledFunction) -> Result<SampledFunction> {
    FiniteRankOperator::rank_one(a.clone(), b.clone())?.apply_to(f)
}

/// Localized Gaussian smoother
/// `K(x, y) = exp(-(x-y)²/2σ²) exp(-(x²+y²)/2L²)`.
///
/// The convolution factor is applied as a multiplier with the exact transform
/// `σ√(2π) e^{-σ²ω²/2}`; against direct quadrature the differences are the
/// periodization and aliasing tails of the Gaussian.
#[derive(Debug, Clone)]
pub struct GaussianKernelOperator {
    sigma: f64,
    envelope: f64,
    conv: Arc<W0Operator>,
    weight: Vec<Complex64>,
}

impl GaussianKernelOperator {
    pub fn new(grid: Grid, sigma: f64, envelope: f64) -> Result<Self> {
        if !(sigma > 0.0 && envelope > 0.0) {
            return Err(LabError::Config("Gaussian kernel widths must be positive".into()));
        }
        let symbol = Symbol::from_fn("gauss", &grid, Some(ZERO), |w| {
            Complex64::new(sigma * (2.0 * PI).sqrt() * (-0.5 * (sigma * w).powi(2)).exp(), 0.0)
        });
        let weight = grid
            .nodes()
            .map(|x| Complex64::new((-0.5 * (x / envelope).powi(2)).exp(), 0.0))
            .collect();
        Ok(GaussianKernelOperator {
            sigma,
            envelope,
            conv: Arc::new(W0Operator::new(&symbol)),
            weight,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn envelope(&self) -> f64 {
        self.envelope
    }

    pub fn kernel(&self, x: f64, y: f64) -> f64 {
        let d = (x - y) / self.sigma;
        (-0.5 * d * d).exp() * (-0.5 * (x * x + y * y) / (self.envelope * self.envelope)).exp()
    }
}

impl LinearOperator for GaussianKernelOperator {
    fn dim(&self) -> usize {
        self.weight.len()
    }
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let wx: Vec<Complex64> = x.iter().zip(&self.weight).map(|(v, w)| v * w).collect();
        let mut out = self.conv.apply(&wx);
        for (o, w) in out.iter_mut().zip(&self.weight) {
            *o *= w;
        }
        out
    }
    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        self.apply(y)
    }
}

/// `f ↦ Σ d_i ⟨f, ψ_i⟩ ψ_i` over a dyadic system, with the summable diagonal
/// `d = 2^{-|j|} (1 + |k|)^{-2}`.
#[derive(Debug, Clone)]
pub struct DiagonalWaveletMultiplier {
    system: DyadicSystem,
    diagonal: Vec<f64>,
}

impl DiagonalWaveletMultiplier {
    pub fn new(system: DyadicSystem) -> Result<Self> {
        if system.is_empty() {
            return Err(LabError::Config("empty window".into()));
        }
        let diagonal = system
            .elements()
            .iter()
            .map(|e| (-(e.j.abs() as f64)).exp2() / (1.0 + e.k.unsigned_abs() as f64).powi(2))
            .collect();
        Ok(DiagonalWaveletMultiplier { system, diagonal })
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn system(&self) -> &DyadicSystem {
        &self.system
    }
}

impl LinearOperator for DiagonalWaveletMultiplier {
    fn dim(&self) -> usize {
        self.system.grid().count()
    }
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut c = self.system.coefficients(x);
        for (v, d) in c.iter_mut().zip(&self.diagonal) {
            *v *= d;
        }
        self.system.synthesize(&c)
    }
    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        self.apply(y)
    }
}

/// Normalized cumulative distribution of the unit bump `e^{1-1/(1-t²)}` on `[-1, 1]`.
struct BumpCdf {
    values: Vec<f64>,
    total: f64,
}

const BUMP_PANELS: usize = 2048;

fn bump_shape(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

fn bump_cdf() -> &'static BumpCdf {
    static CDF: OnceLock<BumpCdf> = OnceLock::new();
    CDF.get_or_init(|| {
        // 5-point Gauss-Legendre per panel.
        const X: [f64; 5] = [
            -0.906_179_845_938_664,
            -0.538_469_310_105_683,
            0.0,
            0.538_469_310_105_683,
            0.906_179_845_938_664,
        ];
        const W: [f64; 5] = [
            0.236_926_885_056_189,
            0.478_628_670_499_366,
            0.568_888_888_888_889,
            0.478_628_670_499_366,
            0.236_926_885_056_189,
        ];
        let dx = 2.0 / BUMP_PANELS as f64;
        let mut values = Vec::with_capacity(BUMP_PANELS + 1);
        let mut acc = 0.0;
        values.push(0.0);
        for p in 0..BUMP_PANELS {
            let mid = -1.0 + (p as f64 + 0.5) * dx;
            acc += X
                .iter()
                .zip(&W)
                .map(|(x, w)| w * bump_shape(mid + 0.5 * dx * x))
                .sum::<f64>()
                * 0.5
                * dx;
            values.push(acc);
        }
        BumpCdf { values, total: acc }
    })
}

/// `∫_{-∞}^t β` for the unit-mass bump `β` supported in `[-1, 1]`;
/// exactly 0 and 1 outside the support.
fn bump_integral(t: f64) -> f64 {
    if t <= -1.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let cdf = bump_cdf();
    let dx = 2.0 / BUMP_PANELS as f64;
    let s = (t + 1.0) / dx;
    let i = (s.floor() as usize).min(BUMP_PANELS - 1);
    let f = s - i as f64;
    let (x0, x1) = (-1.0 + i as f64 * dx, -1.0 + (i + 1) as f64 * dx);
    let (p0, p1) = (cdf.values[i], cdf.values[i + 1]);
    let (m0, m1) = (bump_shape(x0) * dx, bump_shape(x1) * dx);
    let f2 = f * f;
    let f3 = f2 * f;
    let v = (2.0 * f3 - 3.0 * f2 + 1.0) * p0 + (f3 - 2.0 * f2 + f) * m0 + (-2.0 * f3 + 3.0 * f2) * p1 + (f3 - f2) * m1;
    v / cdf.total
}

/// `e^{1-1/(1-t²)}` with `t = (x - centre)/radius`, peak value 1.
pub fn bump(grid: Grid, centre: f64, radius: f64) -> SampledFunction {
    SampledFunction::from_real_fn(grid, |x| bump_shape((x - centre) / radius))
}

/// `χ_{[lo, hi]} ∗ β_r`: equal to 1 on `[lo + r, hi - r]`, supported in `[lo - r, hi + r]`.
pub fn mollified_indicator(grid: Grid, lo: f64, hi: f64, radius: f64) -> SampledFunction {
    SampledFunction::from_real_fn(grid, |x| plateau_value(x, lo, hi, radius))
}

fn plateau_value(x: f64, lo: f64, hi: f64, radius: f64) -> f64 {
    bump_integral((x - lo) / radius) - bump_integral((x - hi) / radius)
}

/// Smallest `R` with `|f(x)| ≤ 1e-12 ‖f‖_∞` for `|x| > R`.
pub fn support_radius(f: &SampledFunction) -> f64 {
    let threshold = 1e-12 * f.sup_norm();
    f.grid()
        .nodes()
        .zip(f.values())
        .filter(|(_, v)| v.norm() > threshold)
        .map(|(x, _)| x.abs())
        .fold(0.0, f64::max)
}

/// `c = Fh` with `h ≡ 1` on `[-R, R]`, so that `aW⁰(c)(bf) = a ∫ bf`.
#[derive(Debug, Clone)]
pub struct FactorizationWitness {
    pub c: Symbol,
    pub h: SampledFunction,
    pub difference_set_radius: f64,
}

impl FactorizationWitness {
    /// `W⁰(c)g`, which equals the convolution `h ∗ g` on the grid.
    pub fn convolve(&self, g: &SampledFunction) -> Result<SampledFunction> {
        crate::multipliers::apply_w0(&self.c, g)
    }

    /// `a · W⁰(c)(b f)`.
    pub fn apply(&self, a: &SampledFunction, b: &SampledFunction, f: &SampledFunction) -> Result<SampledFunction> {
        Ok(a.mul(&self.convolve(&b.mul(f))?))
    }
}

/// Plateau `h = χ_{[-(R+m/2), R+m/2]} ∗ β_{m/2}` with `R = R_a + R_b`, and `c = Fh`.
pub fn factor_rank_one(a: &SampledFunction, b: &SampledFunction, margin: f64) -> Result<FactorizationWitness> {
    if !(margin > 0.0) {
        return Err(LabError::Config("margin must be positive".into()));
    }
    if !a.grid().same_as(b.grid()) {
        return Err(LabError::Config("a and b live on different grids".into()));
    }
    let grid = *a.grid();
    let r = support_radius(a) + support_radius(b);
    if r + margin >= grid.half_width() {
        return Err(LabError::Domain(format!(
            "plateau radius {r} plus margin {margin} does not fit in [-{t}, {t}]",
            t = grid.half_width()
        )));
    }
    let edge = r + 0.5 * margin;
    let h = mollified_indicator(grid, -edge, edge, 0.5 * margin);
    let c = Symbol::new("plateau", fourier_transform(&h).samples, Some(ZERO));
    Ok(FactorizationWitness {
        c,
        h,
        difference_set_radius: r,
    })
}

/// The bundled `(a, b)` pairs for factorization checks.
pub fn factorization_battery(grid: Grid) -> Vec<(String, SampledFunction, SampledFunction)> {
    let chirp = bump(grid, -1.0, 1.5).map(|x, v| v * Complex64::from_polar(1.0, 2.0 * x));
    vec![
        ("bump:bump".into(), bump(grid, 0.0, 1.0), bump(grid, 0.0, 1.0)),
        ("shifted".into(), bump(grid, -2.0, 1.0), bump(grid, 3.0, 0.5)),
        (
            "indicator".into(),
            mollified_indicator(grid, 0.0, 1.0, 0.1),
            mollified_indicator(grid, 0.0, 1.0, 0.1),
        ),
        ("chirp".into(), chirp, bump(grid, 1.0, 2.0)),
    ]
}

/// Orthonormal basis of the leading elements of a dyadic system, by modified
/// Gram-Schmidt in the system order so that the spans are nested.
#[derive(Debug, Clone)]
pub struct OrderedBasis {
    grid: Grid,
    vectors: Vec<Vec<f64>>,
}

impl OrderedBasis {
    pub fn new(sys: &DyadicSystem, n: usize) -> Result<Self> {
        if n > sys.len() {
            return Err(LabError::Config(format!(
                "n = {n} exceeds the {} elements of the window",
                sys.len()
            )));
        }
        let grid = *sys.grid();
        let h = grid.spacing();
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(n);
        for e in &sys.elements()[..n] {
            let mut v = vec![0.0; grid.count()];
            v[e.start..e.end()].copy_from_slice(&e.values);
            for _ in 0..2 {
                for q in &vectors {
                    let d: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() * h;
                    for (x, y) in v.iter_mut().zip(q) {
                        *x -= d * y;
                    }
                }
            }
            let len = (v.iter().map(|x| x * x).sum::<f64>() * h).sqrt();
            if len < 1e-8 {
                return Err(LabError::invariant("operator_algebra", "dyadic elements are linearly dependent"));
            }
            v.iter_mut().for_each(|x| *x /= len);
            vectors.push(v);
        }
        Ok(OrderedBasis { grid, vectors })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    fn vector(&self, i: usize) -> SampledFunction {
        SampledFunction::from_parts(self.grid, self.vectors[i].iter().map(|x| Complex64::new(*x, 0.0)).collect())
    }

    /// `P_n f` for `n ≤ len`.
    pub fn project(&self, n: usize, f: &[Complex64]) -> Vec<Complex64> {
        let h = self.grid.spacing();
        let mut out = vec![ZERO; f.len()];
        for q in &self.vectors[..n] {
            let d: Complex64 = q.iter().zip(f).map(|(a, b)| b * a).sum::<Complex64>() * h;
            for (o, x) in out.iter_mut().zip(q) {
                *o += d * x;
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct FiniteRankApproximation {
    pub n: usize,
    pub approx: FiniteRankOperator,
    pub error: f64,
}

/// `P_n K P_n` for each `n` in `ns`, with `error = ‖K - P_n K P_n‖` on `spec`.
/// `K` is applied once per basis vector and the compressions share one basis.
pub fn finite_rank_sweep(
    k: &dyn LinearOperator,
    sys: &DyadicSystem,
    ns: &[usize],
    spec: &SpaceSpec,
    opts: &NormEstimateOptions,
) -> Result<Vec<FiniteRankApproximation>> {
    let grid = *sys.grid();
    if k.dim() != grid.count() {
        return Err(LabError::Config("operator dimension differs from the grid".into()));
    }
    let n_max = ns.iter().copied().max().unwrap_or(0);
    if n_max == 0 {
        return Err(LabError::Config("n must be at least 1".into()));
    }
    let basis = OrderedBasis::new(sys, n_max)?;
    let h = grid.spacing();
    let images: Vec<Vec<Complex64>> = crate::par::map_indexed(n_max, |l| k.apply(basis.vector(l).values()));
    // m[i][l] = ⟨K q_l, q_i⟩
    let m: Vec<Vec<Complex64>> = (0..n_max)
        .map(|i| {
            images
                .iter()
                .map(|kq| basis.vectors[i].iter().zip(kq).map(|(q, v)| v * q).sum::<Complex64>() * h)
                .collect()
        })
        .collect();
    ns.iter()
        .map(|&n| {
            if n == 0 {
                return Err(LabError::Config("n must be at least 1".into()));
            }
            let terms = (0..n)
                .map(|i| {
                    let mut b = vec![ZERO; grid.count()];
                    for (l, q) in basis.vectors[..n].iter().enumerate() {
                        let c = m[i][l];
                        for (x, y) in b.iter_mut().zip(q) {
                            *x += c * y;
                        }
                    }
                    (basis.vector(i), SampledFunction::from_parts(grid, b))
                })
                .collect();
            let approx = FiniteRankOperator::new(terms)?;
            let error = operator_norm_estimate(&Difference(k, &approx), &grid, spec, opts)?.value;
            Ok(FiniteRankApproximation { n, approx, error })
        })
        .collect()
}

pub fn finite_rank_approximation(
    k: &dyn LinearOperator,
    sys: &DyadicSystem,
    n: usize,
    spec: &SpaceSpec,
    opts: &NormEstimateOptions,
) -> Result<FiniteRankApproximation> {
    Ok(finite_rank_sweep(k, sys, &[n], spec, opts)?.remove(0))
}

/// `‖e_h K e_{-h} f‖` for each `h` of the ladder, with `e_h = e^{ihx}`.
pub fn modulation_conjugation_test(
    k: &dyn LinearOperator,
    f: &SampledFunction,
    ladder: &[f64],
    spec: &SpaceSpec,
) -> Result<Vec<f64>> {
    let grid = *f.grid();
    if k.dim() != grid.count() {
        return Err(LabError::Config("operator dimension differs from the grid".into()));
    }
    if ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LabError::Config("modulation ladder must be increasing".into()));
    }
    let nyquist = grid.dual().half_width();
    if let Some(h) = ladder.iter().find(|h| h.abs() >= nyquist) {
        return Err(LabError::Domain(format!(
            "modulation {h} aliases on this grid (Nyquist frequency {nyquist})"
        )));
    }
    ladder
        .iter()
        .map(|&h| {
            let phase: Vec<Complex64> = grid.nodes().map(|x| Complex64::from_polar(1.0, h * x)).collect();
            let g: Vec<Complex64> = f.values().iter().zip(&phase).map(|(v, e)| v * e.conj()).collect();
            let kg = k.apply(&g);
            let out: Vec<Complex64> = kg.iter().zip(&phase).map(|(v, e)| v * e).collect();
            Ok(norm(&SampledFunction::from_parts(grid, out), spec)?.value)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct CommutatorReport {
    pub singular_values: Vec<f64>,
    /// `α` in `s_k ≈ C k^{-α}`, fitted over the values above `1e-14 s_1`.
    pub decay_exponent: Option<f64>,
}

impl CommutatorReport {
    /// `s_1 / s_last`.
    pub fn drop(&self) -> f64 {
        match (self.singular_values.first(), self.singular_values.last()) {
            (Some(a), Some(b)) if *b > 0.0 => a / b,
            (Some(a), Some(_)) if *a > 0.0 => f64::INFINITY,
            _ => 1.0,
        }
    }
}

pub const COMMUTATOR_SINGULAR_VALUES: usize = 64;

/// Leading singular values of `[aI, W⁰(σ)] = aW⁰(σ) - W⁰(σ)aI`.
/// Singular values are Euclidean, so only `L²` is accepted.
pub fn commutator_compactness_probe(
    a: &SampledFunction,
    sigma: &Symbol,
    spec: &SpaceSpec,
    seed: u64,
) -> Result<CommutatorReport> {
    if !spec.is_l2() {
        return Err(LabError::Config(format!(
            "singular values are defined on L² only, got {spec}"
        )));
    }
    if !sigma.spatial_grid().same_as(a.grid()) {
        return Err(LabError::Config("symbol and multiplier live on different grids".into()));
    }
    let w = W0Operator::new(sigma);
    let m = Multiplication {
        values: a.values().to_vec(),
    };
    let comm = Difference(Composition(&m, &w), Composition(&w, &m));
    let s = leading_singular_values(&comm, COMMUTATOR_SINGULAR_VALUES, 4, seed);
    Ok(CommutatorReport {
        decay_exponent: decay_exponent(&s),
        singular_values: s,
    })
}

fn decay_exponent(s: &[f64]) -> Option<f64> {
    let top = *s.first()?;
    let pts: Vec<(f64, f64)> = s
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 1e-14 * top && top > 0.0)
        .map(|(k, v)| (((k + 1) as f64).ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(-sxy / sxx)
}

/// Spatial multiplier profiles for `mult:<name>`.
pub fn named_profile(name: &str, grid: Grid) -> Result<SampledFunction> {
    Ok(match name {
        "signa" => SampledFunction::from_real_fn(grid, |x| (2.0 * x).tanh()),
        "bump" => bump(grid, 0.0, 1.0),
        "gauss" => SampledFunction::from_real_fn(grid, |x| (-x * x).exp()),
        "one" => SampledFunction::from_real_fn(grid, |_| 1.0),
        _ => {
            return Err(LabError::Config(format!(
                "unknown profile {name:?}; expected signa, bump, gauss or one"
            )))
        }
    })
}

/// Operators by configuration name: `rank1:<a>:<b>`, `gauss:σ=<s>`,
/// `mult:<profile>`, `conv:<symbol>` and `diag:<wavelet>`.
pub fn named_operator(name: &str, grid: Grid) -> Result<Box<dyn LinearOperator + Send>> {
    let parts: Vec<&str> = name.split(':').collect();
    Ok(match parts.as_slice() {
        ["rank1", a, b] => Box::new(FiniteRankOperator::rank_one(named_profile(a, grid)?, named_profile(b, grid)?)?),
        ["gauss", rest] => {
            let sigma = rest
                .strip_prefix("σ=")
                .or_else(|| rest.strip_prefix("sigma="))
                .ok_or_else(|| LabError::Config(format!("expected gauss:σ=<width>, got {name:?}")))?
                .parse::<f64>()
                .map_err(|e| LabError::Config(format!("{name:?}: {e}")))?;
            Box::new(GaussianKernelOperator::new(grid, sigma, 2.0)?)
        }
        ["mult", p] => Box::new(Multiplication {
            values: named_profile(p, grid)?.into_values(),
        }),
        ["conv", s] => Box::new(W0Operator::new(&named_symbol(s, &grid)?)),
        ["diag", w] => Box::new(DiagonalWaveletMultiplier::new(DyadicSystem::new(
            &Wavelet::new(w)?,
            Window::symmetric(4, 8),
            &grid,
        )?)?),
        _ => return Err(LabError::Config(format!("unknown operator {name:?}"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelets::{Wavelet, Window};

    fn grid() -> Grid {
        Grid::new(32.0, 1 << 12).unwrap()
    }

    #[test]
    fn bump_integral_is_a_cdf() {
        assert_eq!(bump_integral(-1.0), 0.0);
        assert_eq!(bump_integral(1.0), 1.0);
        assert!((bump_integral(0.0) - 0.5).abs() < 1e-14);
        assert!((bump_integral(0.3) + bump_integral(-0.3) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_one_basics() {
        let g = grid();
        let a = bump(g, -5.0, 1.0);
        let b = bump(g, 5.0, 1.0);
        let f = bump(g, -5.0, 1.0);
        assert_eq!(rank_one_apply(&a, &b, &f).unwrap().sup_norm(), 0.0);
        let ind = mollified_indicator(g, 0.0, 1.0, 0.01);
        let t = rank_one_apply(&ind, &ind, &ind).unwrap();
        assert!(t.sub(&ind).sup_norm() < 0.01);
    }

    #[test]
    fn adjoint_matches_inner_products() {
        let g = Grid::new(8.0, 256).unwrap();
        let op = FiniteRankOperator::new(vec![
            (bump(g, 0.0, 1.0), bump(g, 1.0, 2.0).map(|x, v| v * Complex64::new(0.0, x))),
            (bump(g, -1.0, 1.0).scale(Complex64::new(1.0, 2.0)), bump(g, 0.0, 3.0)),
        ])
        .unwrap();
        let x: Vec<Complex64> = (0..256).map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let y: Vec<Complex64> = (0..256).map(|i| Complex64::new((i as f64 * 0.7).cos(), 0.1 * i as f64)).collect();
        let lhs: Complex64 = op.apply(&x).iter().zip(&y).map(|(a, b)| a * b.conj()).sum();
        let rhs: Complex64 = x.iter().zip(op.apply_adjoint(&y)).map(|(a, b)| a * b.conj()).sum();
        assert!((lhs - rhs).norm() < 1e-10 * lhs.norm());
    }

    #[test]
    fn factorization_reproduces_rank_one() {
        let g = grid();
        let a = bump(g, 0.0, 1.0);
        let b = bump(g, 0.0, 1.0);
        let wit = factor_rank_one(&a, &b, 1.0).unwrap();
        let r = wit.difference_set_radius;
        for (x, v) in g.nodes().zip(wit.h.values()) {
            if x.abs() <= r {
                assert!((v.re - 1.0).abs() < 1e-12 && v.im == 0.0);
            }
        }
        let f = SampledFunction::from_real_fn(g, |x| (3.0 * x).sin() + x * x);
        let lhs = rank_one_apply(&a, &b, &f).unwrap();
        let rhs = wit.apply(&a, &b, &f).unwrap();
        assert!(lhs.sub(&rhs).l2_norm() < 1e-10 * f.l2_norm());
        assert!(factor_rank_one(&bump(g, 20.0, 1.0), &b, 12.0).is_err());
    }

    #[test]
    fn gaussian_kernel_matches_direct_quadrature() {
        // On [-16, 16] the periodization tail of both Gaussian factors is below 1e-15.
        let g = Grid::new(16.0, 512).unwrap();
        let k = GaussianKernelOperator::new(g, 1.0, 2.0).unwrap();
        let f = SampledFunction::from_real_fn(g, |x| (x * 0.7).cos());
        let out = k.apply(f.values());
        let h = g.spacing();
        for m in [100usize, 256, 400] {
            let xm = g.node(m);
            let direct: f64 = g.nodes().zip(f.values()).map(|(y, v)| k.kernel(xm, y) * v.re).sum::<f64>() * h;
            assert!((out[m] - direct).norm() < 1e-13, "{m}: {}", (out[m] - direct).norm());
        }
    }

    #[test]
    fn projection_is_nested_and_idempotent() {
        let g = Grid::new(32.0, 1 << 11).unwrap();
        let sys = DyadicSystem::new(&Wavelet::new("db4").unwrap(), Window::mra(0, 2), &g).unwrap();
        let basis = OrderedBasis::new(&sys, 40).unwrap();
        let f: Vec<Complex64> = (0..g.count()).map(|i| Complex64::new(((i * i) % 17) as f64, 0.0)).collect();
        let p10 = basis.project(10, &f);
        let p40p10 = basis.project(40, &p10);
        let diff = p10.iter().zip(&p40p10).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12);
        assert!(OrderedBasis::new(&sys, sys.len() + 1).is_err());
    }

    #[test]
    fn multiplication_is_invariant_under_modulation() {
        let g = grid();
        let a = Multiplication {
            values: named_profile("signa", g).unwrap().into_values(),
        };
        let f = bump(g, 0.5, 2.0);
        let curve = modulation_conjugation_test(&a, &f, &[0.0, 10.0, 50.0], &SpaceSpec::lebesgue(2.0).unwrap()).unwrap();
        for v in &curve {
            assert!((v - curve[0]).abs() < 1e-12 * curve[0]);
        }
        assert!(modulation_conjugation_test(&a, &f, &[0.0, 1e4], &SpaceSpec::lebesgue(2.0).unwrap()).is_err());
        assert!(modulation_conjugation_test(&a, &f, &[1.0, 0.0], &SpaceSpec::lebesgue(2.0).unwrap()).is_err());
    }

    #[test]
    fn commutator_with_scalars_vanishes() {
        let g = Grid::new(16.0, 512).unwrap();
        let one = named_profile("one", g).unwrap();
        let sign = named_symbol("sign", &g).unwrap();
        let r = commutator_compactness_probe(&one, &sign, &SpaceSpec::lebesgue(2.0).unwrap(), 1).unwrap();
        assert!(r.singular_values[0] < 1e-12);
        assert!(commutator_compactness_probe(&one, &sign, &SpaceSpec::lebesgue(4.0).unwrap(), 1).is_err());
    }

    #[test]
    fn named_operators_parse() {
        let g = Grid::new(8.0, 256).unwrap();
        for n in ["rank1:bump:bump", "gauss:σ=1", "mult:signa", "conv:sign"] {
            assert_eq!(named_operator(n, g).unwrap().dim(), 256);
        }
        let wide = Grid::new(32.0, 1 << 12).unwrap();
        assert_eq!(named_operator("diag:db6", wide).unwrap().dim(), 1 << 12);
        assert!(named_operator("gauss:1", g).is_err());
        assert!(named_operator("conv:nope", g).is_err());
    }
}
