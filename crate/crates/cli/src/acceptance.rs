//! The ten acceptance criteria. Each check returns a verdict line plus detail
//! lines; criteria known to be out of reach carry an analysis of why.

use std::time::Instant;

use lab_core::algebra::{
    bump, factor_rank_one, factorization_battery, finite_rank_sweep, modulation_conjugation_test, named_operator,
    rank_one_apply, GaussianKernelOperator,
};
use lab_core::multipliers::{bv_battery, cauchy_symbol, stechkin_check, stechkin_constant, W0Operator};
use lab_core::randomized::{khintchine_exhaustive, uniform_bound_sweep, unconditionality_probe, KHINTCHINE_L};
use lab_core::rng::stream_rng;
use lab_core::spaces::{norm, operator_norm_estimate, NormEstimateOptions};
use lab_core::wavelets::{DyadicSystem, Wavelet, Window};
use lab_core::{Complex64, Grid, SampledFunction, SpaceSpec};
use rand_distr::{Distribution, StandardNormal};

use crate::config::ExperimentConfig;
use crate::inputs::random_span;
use crate::registry;
use crate::CliError;

#[derive(Debug, Clone)]
pub struct Verdict {
    pub id: usize,
    pub title: &'static str,
    pub pass: bool,
    pub summary: String,
    pub details: Vec<String>,
    /// Named parts of the criterion; `pass` is their conjunction.
    pub checks: Vec<(&'static str, bool)>,
    /// Present when the criterion cannot be met by this method; explains why.
    pub analysis: Option<String>,
}

pub struct Criterion {
    pub id: usize,
    pub title: &'static str,
    pub check: fn() -> Result<Verdict, CliError>,
}

pub const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, title: "Stechkin exact-constant battery", check: stechkin },
    Criterion { id: 2, title: "Cauchy operator norm", check: cauchy },
    Criterion { id: 3, title: "L² isometry of T_{K_ε}", check: isometry },
    Criterion { id: 4, title: "uniform-boundedness signature", check: uniform_bound },
    Criterion { id: 5, title: "Khintchine domination", check: khintchine },
    Criterion { id: 6, title: "wavelet basis round trip", check: wavelet_basis },
    Criterion { id: 7, title: "rank-one factorization", check: factorization },
    Criterion { id: 8, title: "compactness diagnostics", check: compactness },
    Criterion { id: 9, title: "sharp-maximal pointwise bound", check: sharp_maximal },
    Criterion { id: 10, title: "standard kernel and Condition (D)", check: condition_d },
];

fn verdict(id: usize, pass: bool, summary: String, details: Vec<String>) -> Verdict {
    let title = CRITERIA.iter().find(|c| c.id == id).map(|c| c.title).unwrap_or("");
    Verdict {
        id,
        title,
        pass,
        summary,
        details,
        checks: vec![("all", pass)],
        analysis: None,
    }
}

fn max(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

fn run(name: &str, overrides: &[(&str, &str)]) -> Result<crate::report::Outcome, CliError> {
    let e = registry::find(name).expect("registered experiment");
    let mut cfg: ExperimentConfig = e.config();
    for (k, v) in overrides {
        cfg.set(k, v)?;
    }
    (e.run)(&cfg)
}

fn stechkin() -> Result<Verdict, CliError> {
    let start = Instant::now();
    let g = Grid::new(32.0, 1 << 12)?;
    let opts = NormEstimateOptions::with_restarts(4, 1);
    let battery = bv_battery(&g);
    let mut details = Vec::new();
    let mut violations = 0;
    let mut checks = 0;
    for p in [4.0 / 3.0, 2.0, 3.0, 4.0] {
        let spec = SpaceSpec::lebesgue(p)?;
        let mut worst: f64 = 0.0;
        for a in &battery {
            let r = stechkin_check(a, &spec, &opts)?;
            checks += 1;
            if r.holds(1e-9) != Some(true) {
                violations += 1;
            }
            worst = worst.max(r.lhs / r.rhs.unwrap_or(f64::INFINITY));
        }
        details.push(format!("p = {p:.4}: c_p = {:.6}, max lhs/rhs = {worst:.6}", stechkin_constant(p)));
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(verdict(
        1,
        violations == 0 && secs < 600.0,
        format!("{violations} violations in {checks} checks, {secs:.1} s at N = 4096"),
        details,
    ))
}

fn cauchy() -> Result<Verdict, CliError> {
    let exact = stechkin_constant(4.0);
    let l4 = SpaceSpec::lebesgue(4.0)?;
    let opts = NormEstimateOptions::with_restarts(8, 1);
    let mut ladder = Vec::new();
    for n in [10u32, 12, 14] {
        let g = Grid::new(32.0, 1 << n)?;
        let est = operator_norm_estimate(&W0Operator::new(&cauchy_symbol(&g)), &g, &l4, &opts)?;
        ladder.push(((1usize << n) as f64, est.value));
    }
    let value = ladder.last().map(|l| l.1).unwrap_or(0.0);
    let reached = value >= 0.97 * exact;
    let ceiling = ladder.iter().all(|l| l.1 <= exact * (1.0 + 1e-3));
    let g = Grid::new(32.0, 1 << 12)?;
    let mut worst: f64 = 0.0;
    for t in 0..20 {
        let f = crate::inputs::random_packet(g, &mut stream_rng(1, 201, t));
        let pv = lab_core::multipliers::cauchy_singular_pv(&f);
        let mult = lab_core::multipliers::cauchy_singular_multiplier(&f);
        worst = worst.max(mult.sub(&pv).l2_norm() / pv.l2_norm());
    }
    let agree = worst < 1e-3;
    // Fit value = c (1 - a / ln N) by least squares in a.
    let a = {
        let xs: Vec<(f64, f64)> = ladder.iter().map(|(n, v)| (1.0 / n.ln(), 1.0 - v / exact)).collect();
        xs.iter().map(|(x, y)| x * y).sum::<f64>() / xs.iter().map(|(x, _)| x * x).sum::<f64>()
    };
    let mut details: Vec<String> = ladder
        .iter()
        .map(|(n, v)| format!("N = {n:>6}: estimate {v:.6} = {:.4} cot(π/8)", v / exact))
        .collect();
    details.push(format!(
        "never above cot(π/8)(1 + 1e-3): {ceiling}; PV vs multiplier worst relative L² difference {worst:.2e} over 20 packets"
    ));
    let mut v = verdict(
        2,
        reached && ceiling && agree,
        format!("estimate {value:.6} vs target 0.97 cot(π/8) = {:.6}", 0.97 * exact),
        details,
    );
    v.checks = vec![("reach", reached), ("ceiling", ceiling), ("pv agreement", agree)];
    if !reached {
        v.analysis = Some(format!(
            "The extremal functions for S on L⁴ are |x|^(-1/4)-type power singularities; on a grid of N \
             nodes the best discrete vector only resolves them between scales h and T, so the attainable ratio \
             is about cot(π/8)(1 - a/ln N). The fit over N = 1024, 4096, 16384 gives a = {a:.3}, so 0.97 cot(π/8) \
             would need ln N ≈ {:.0}, i.e. N ≈ 10^{:.0}. The estimate is a certified lower bound, stays below the \
             exact norm and agrees with the principal-value implementation; only the 97% reach is out of range.",
            a / 0.03,
            a / 0.03 / std::f64::consts::LN_10
        ));
    }
    Ok(v)
}

fn isometry() -> Result<Verdict, CliError> {
    let out = run("isometry-l2", &[("trials", "256")])?;
    let worst = max(out.rows.iter().map(|r| r.value));
    Ok(verdict(
        3,
        out.passed() && out.rows.len() == 256,
        format!("256 draws, max |‖T_ε f‖₂/‖f‖₂ - 1| = {worst:.2e} (bound 1e-3)"),
        vec![],
    ))
}

fn uniform_bound() -> Result<Verdict, CliError> {
    let g = Grid::new(16.0, 1 << 11)?;
    let sys = DyadicSystem::new(&Wavelet::new("db6")?, Window::symmetric(2, 4), &g)?;
    let mut details = Vec::new();
    let mut pass = true;
    for spec in ["Lp:4", "WLp:4:0.25", "VLp:gauss"] {
        let s: SpaceSpec = spec.parse()?;
        let sweep = uniform_bound_sweep(&sys, &s, 256, 1, 2)?;
        let half = sweep.prefix_max(128);
        let change = (sweep.n_hat - half).abs() / half;
        pass &= change < 0.1;
        details.push(format!("{spec}: N̂(128) = {half:.6}, N̂(256) = {:.6}, change {change:.2e}", sweep.n_hat));
    }
    Ok(verdict(4, pass, "N̂ changes by < 10% from 128 to 256 trials on all three spaces".into(), details))
}

fn khintchine() -> Result<Verdict, CliError> {
    let out = run("khintchine", &[("trials", "50")])?;
    let domination: Vec<_> = out.rows.iter().filter(|r| r.metric == "square_function").collect();
    let held = domination.iter().filter(|r| r.pass() == Some(true)).count();
    let c = Complex64::new(1.0, 0.0);
    let two = khintchine_exhaustive(&[c, c])?;
    let gap = (two.lhs - KHINTCHINE_L * two.mean).abs();
    let slack = domination.iter().map(|r| r.value / r.bound.unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
    Ok(verdict(
        5,
        held == domination.len() && domination.len() == 50 && gap < 1e-10,
        format!("{held}/50 points dominated (max lhs/rhs {slack:.4}); two-term equality gap {gap:.1e}"),
        vec![],
    ))
}

fn wavelet_basis() -> Result<Verdict, CliError> {
    let g = Grid::new(32.0, 1 << 14)?;
    let sys = DyadicSystem::new(&Wavelet::new("db6")?, Window::symmetric(8, 8), &g)?;
    let specs: Vec<(&str, SpaceSpec)> = vec![
        ("Lp:2", SpaceSpec::lebesgue(2.0)?),
        ("Lp:4", SpaceSpec::lebesgue(4.0)?),
        ("VLp:gauss", "VLp:gauss".parse()?),
    ];
    let mut worst = [0.0f64; 3];
    for t in 0..10 {
        let f = random_span(&sys, 12, &mut stream_rng(1, 301, t));
        let back = SampledFunction::new(g, sys.synthesize(&sys.coefficients(f.values())))?;
        for (w, (_, s)) in worst.iter_mut().zip(&specs) {
            *w = w.max(norm(&back.sub(&f), s)?.value / norm(&f, s)?.value);
        }
    }
    let mut pass = worst[0] < 1e-4 && worst[1] < 1e-2 && worst[2] < 1e-2;
    let mut details = vec![format!(
        "{} elements; reconstruction error L² {:.2e}, L⁴ {:.2e}, variable {:.2e}",
        sys.len(),
        worst[0],
        worst[1],
        worst[2]
    )];
    let f = random_span(&sys, 24, &mut stream_rng(1, 302, 0));
    for (name, s) in [
        ("Lp:4", SpaceSpec::lebesgue(4.0)?),
        ("WLp:4:0.25", "WLp:4:0.25".parse()?),
        ("VLp:gauss", "VLp:gauss".parse()?),
    ] {
        let r = unconditionality_probe(&f, &sys, &s, 200, 7)?;
        let b = max(r[..100].iter().copied());
        let late = max(r[100..].iter().copied());
        let ok = r.iter().all(|v| v.is_finite()) && late <= 1.1 * b;
        pass &= ok;
        details.push(format!("{name}: B(100) = {b:.4}, max over draws 101-200 = {late:.4}"));
    }
    Ok(verdict(6, pass, "window J = K = 8 reconstruction and 200-draw sign-flip probe".into(), details))
}

fn factorization() -> Result<Verdict, CliError> {
    let g = Grid::new(16.0, 1 << 12)?;
    let mut worst: f64 = 0.0;
    for (pair, (_, a, b)) in factorization_battery(g).into_iter().enumerate() {
        let wit = factor_rank_one(&a, &b, 1.0)?;
        for t in 0..20 {
            let mut rng = stream_rng(1, 401, (pair * 20 + t) as u64);
            let v: Vec<Complex64> = (0..g.count())
                .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
                .collect();
            let f = SampledFunction::new(g, v)?;
            let lhs = rank_one_apply(&a, &b, &f)?;
            worst = worst.max(lhs.sub(&wit.apply(&a, &b, &f)?).l2_norm() / f.l2_norm());
        }
    }
    // Plateau identity: (h ∗ g)(x) = ∫ g for x in supp a when supp g ⊂ supp b.
    let a = bump(g, 0.0, 1.0);
    let b = bump(g, 0.5, 1.5);
    let wit = factor_rank_one(&a, &b, 1.0)?;
    let inside = |f: &SampledFunction| {
        let cut = 1e-12 * f.sup_norm();
        f.values().iter().map(|v| v.norm() > cut).collect::<Vec<_>>()
    };
    let (in_a, in_b) = (inside(&a), inside(&b));
    let mut plateau: f64 = 0.0;
    for t in 0..5 {
        let mut rng = stream_rng(1, 402, t);
        let v: Vec<Complex64> = in_b
            .iter()
            .map(|&m| if m { Complex64::new(StandardNormal.sample(&mut rng), 0.0) } else { Complex64::new(0.0, 0.0) })
            .collect();
        let gf = SampledFunction::new(g, v)?;
        let conv = wit.convolve(&gf)?;
        let total = gf.integral();
        for (c, m) in conv.values().iter().zip(&in_a) {
            if *m {
                plateau = plateau.max((c - total).norm() / gf.l1_norm());
            }
        }
    }
    Ok(verdict(
        7,
        worst <= 1e-4 && plateau <= 1e-8,
        format!("worst residual {worst:.2e}·‖f‖₂ over 4 pairs x 20 inputs; plateau defect {plateau:.2e}·‖g‖₁"),
        vec![],
    ))
}

fn compactness() -> Result<Verdict, CliError> {
    let g = Grid::new(16.0, 1 << 12)?;
    let l2 = SpaceSpec::lebesgue(2.0)?;
    let f = SampledFunction::from_real_fn(g, |x| (-(x - 0.3).powi(2)).exp());
    let ladder = [0.0, 5.0, 10.0, 20.0, 50.0];
    let mult = named_operator("mult:signa", g)?;
    let flat = modulation_conjugation_test(&mult, &f, &ladder, &l2)?;
    let spread = flat.iter().map(|v| (v - flat[0]).abs() / flat[0]).fold(0.0, f64::max);
    let rank1 = named_operator("rank1:bump:bump", g)?;
    let curve = modulation_conjugation_test(&rank1, &f, &ladder, &l2)?;
    let decay = curve[4] / curve[0];
    let g2 = Grid::new(32.0, 1 << 13)?;
    let sys = DyadicSystem::new(&Wavelet::new("db6")?, Window::mra(0, 3), &g2)?;
    let gauss = GaussianKernelOperator::new(g2, 1.0, 2.0)?;
    let opts = NormEstimateOptions {
        max_iterations: 100,
        tolerance: 1e-8,
        ..NormEstimateOptions::with_restarts(4, 1)
    };
    let sweep = finite_rank_sweep(&gauss, &sys, &[16, 64, 256], &l2, &opts)?;
    let e: Vec<f64> = sweep.iter().map(|s| s.error).collect();
    let monotone = e.windows(2).all(|w| w[1] <= w[0]);
    Ok(verdict(
        8,
        spread <= 1e-12 && decay < 0.01 && monotone && e[0] >= 10.0 * e[2],
        format!("aI curve spread {spread:.1e}; rank-one h=50/h=0 = {decay:.2e}; Gaussian errors {:.2e}, {:.2e}, {:.2e}", e[0], e[1], e[2]),
        vec![],
    ))
}

fn sharp_maximal() -> Result<Verdict, CliError> {
    let out = run("sharp-maximal", &[("trials", "200")])?;
    let half = out.constants["c_s_half"];
    let all = out.constants["c_s"];
    let change = (all - half) / half;
    Ok(verdict(
        9,
        change <= 0.2,
        format!("sup ratio over 100 draws {half:.4}, over 200 draws {all:.4}, change {change:.2e}"),
        vec![],
    ))
}

fn condition_d() -> Result<Verdict, CliError> {
    let out = run("condition-d", &[("trials", "50")])?;
    let c_d = out.constants["c_d"];
    let worst = max(out.rows.iter().map(|r| r.value));
    Ok(verdict(
        10,
        out.passed() && out.rows.len() == 50,
        format!("max ratio {worst:.4} vs 8Ĉ₂·1.1 = {:.4} over 50 probes", 1.1 * c_d),
        vec![format!("Ĉ₂ = {:.4}", out.constants["c2"])],
    ))
}

impl Verdict {
    /// `criterion N [PASS|FAIL] title: summary`.
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} [{}] {}: {}",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.title,
            self.summary
        )
    }
}

/// Runs every criterion, printing the verdict line, details and any analysis
/// as each finishes.
pub fn run_all(mut print: impl FnMut(&str)) -> Vec<Verdict> {
    CRITERIA
        .iter()
        .map(|c| {
            let start = Instant::now();
            let v = (c.check)().unwrap_or_else(|e| Verdict {
                id: c.id,
                title: c.title,
                pass: false,
                summary: format!("error: {e}"),
                details: vec![],
                checks: vec![("error", false)],
                analysis: None,
            });
            print(&format!("{} ({:.1} s)", v.line(), start.elapsed().as_secs_f64()));
            for d in &v.details {
                print(&format!("    {d}"));
            }
            if let Some(a) = &v.analysis {
                print(&format!("    analysis: {a}"));
            }
            v
        })
        .collect()
}
