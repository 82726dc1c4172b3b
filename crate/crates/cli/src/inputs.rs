//! Random test inputs shared by experiments and acceptance checks.

use lab_core::rng::LabRng;
use lab_core::wavelets::DyadicSystem;
use lab_core::{Complex64, Grid, SampledFunction};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

fn normal(rng: &mut LabRng) -> f64 {
    StandardNormal.sample(rng)
}

/// `terms` random Gaussian coefficients on random elements of `sys`.
pub fn random_span(sys: &DyadicSystem, terms: usize, rng: &mut LabRng) -> SampledFunction {
    let mut coefs = vec![Complex64::new(0.0, 0.0); sys.len()];
    for _ in 0..terms {
        let i = rng.random_range(0..sys.len());
        coefs[i] += Complex64::new(normal(rng), normal(rng));
    }
    SampledFunction::new(*sys.grid(), sys.synthesize(&coefs)).expect("synthesis has grid length")
}

/// A sum of three modulated Gaussian bumps centred in the middle half of the grid.
pub fn random_smooth(grid: Grid, rng: &mut LabRng) -> SampledFunction {
    let reach = 0.25 * grid.half_width();
    let bumps: Vec<(f64, f64, Complex64, f64)> = (0..3)
        .map(|_| {
            let centre = rng.random_range(-reach..reach);
            let width = rng.random_range(0.3..2.0);
            let amp = Complex64::new(normal(rng), normal(rng));
            let freq = rng.random_range(-2.0..2.0);
            (centre, width, amp, freq)
        })
        .collect();
    SampledFunction::from_fn(grid, |x| {
        bumps
            .iter()
            .map(|(c, w, a, k)| a * (-((x - c) / w).powi(2) / 2.0).exp() * Complex64::from_polar(1.0, k * x))
            .sum()
    })
}

/// A Gaussian packet `e^{-(x-c)²/2w²} e^{iλx}` with `|λ| ∈ [4, 12]`, whose
/// spectrum stays away from the jump of the Cauchy symbol at `0`.
pub fn random_packet(grid: Grid, rng: &mut LabRng) -> SampledFunction {
    let centre = rng.random_range(-4.0..4.0);
    let speed: f64 = rng.random_range(4.0..12.0);
    // |λ|·width ≥ 4 keeps the spectrum away from ω = 0.
    let width = rng.random_range((4.0 / speed).max(0.6)..2.0);
    let lambda = speed * if rng.random::<bool>() { 1.0 } else { -1.0 };
    SampledFunction::from_fn(grid, |x| {
        Complex64::from_polar((-((x - centre) / width).powi(2) / 2.0).exp(), lambda * x)
    })
}

/// A uniform point of the middle half of the grid.
pub fn random_point(grid: Grid, rng: &mut LabRng) -> f64 {
    let reach = 0.5 * grid.half_width();
    rng.random_range(-reach..reach)
}
