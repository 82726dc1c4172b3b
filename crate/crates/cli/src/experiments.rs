//! Experiment bodies. Each reads its parameters from the configuration,
//! derives every random input from `(seed, stream, index)` and returns rows
//! in trial order.

use lab_core::algebra::{
    commutator_compactness_probe, factor_rank_one, factorization_battery, finite_rank_sweep, modulation_conjugation_test,
    named_operator, named_profile, rank_one_apply,
};
use lab_core::maximal::{condition_d_ratio, maximal_norm_ratio, IntervalFamily, DEFAULT_RATIO};
use lab_core::multipliers::{
    bv_battery, cauchy_singular_multiplier, cauchy_singular_pv, cauchy_symbol, named_symbol, stechkin_check,
    stechkin_constant, Symbol, W0Operator,
};
use lab_core::randomized::{
    apply_t_eps, khintchine_domination, khintchine_exhaustive, sharp_vs_maximal_ratio, square_function_v,
    standard_kernel_constants, unconditionality_probe, uniform_bound_sweep, weak11_estimate, SignSequence, WaveletKernel,
    KHINTCHINE_L,
};
use lab_core::rng::stream_rng;
use lab_core::spaces::{holder_check, norm, operator_norm_estimate, NormEstimateOptions};
use lab_core::wavelets::{DyadicSystem, Wavelet, Window};
use lab_core::{Complex64, SampledFunction, SpaceSpec};
use rand::Rng;

use crate::config::ExperimentConfig;
use crate::inputs::{random_packet, random_smooth, random_span};
use crate::report::{Outcome, ReportRow};
use crate::CliError;

type Res = Result<Outcome, CliError>;

/// Input streams, disjoint from the library's internal ones.
mod streams {
    pub const INPUT: u64 = 101;
    pub const SIGNS: u64 = 102;
}

pub fn system(cfg: &ExperimentConfig) -> Result<DyadicSystem, CliError> {
    let sys = DyadicSystem::new(
        &Wavelet::new(&cfg.wavelet)?,
        Window::symmetric(cfg.window.0, cfg.window.1),
        &cfg.grid()?,
    )?;
    if sys.is_empty() {
        return Err(CliError::Usage(format!(
            "window {:?} has no element resolved on grid {:?}",
            cfg.window, cfg.grid
        )));
    }
    Ok(sys)
}

pub fn norm_options(cfg: &ExperimentConfig, stream: u64) -> Result<NormEstimateOptions, CliError> {
    Ok(NormEstimateOptions {
        restarts: cfg.param("restarts", 4)?,
        max_iterations: cfg.param("max_iterations", 300)?,
        tolerance: cfg.tolerance("power", 1e-10),
        seed: lab_core::rng::derive_seed(cfg.seed, stream, 0),
    })
}

/// Support of the window as an interval of the line.
pub fn window_extent(sys: &DyadicSystem) -> (f64, f64) {
    let g = sys.grid();
    let lo = sys.elements().iter().map(|e| e.start).min().unwrap_or(0);
    let hi = sys.elements().iter().map(|e| e.end()).max().unwrap_or(1) - 1;
    (g.node(lo), g.node(hi))
}

fn lebesgue_exponent(spec: &SpaceSpec) -> Option<f64> {
    match spec {
        SpaceSpec::Lebesgue { p } => Some(*p),
        _ => None,
    }
}

pub fn stechkin(cfg: &ExperimentConfig) -> Res {
    let g = cfg.grid()?;
    let opts = norm_options(cfg, 1)?;
    let symbols = match cfg.param_str("symbol", "battery") {
        "battery" => bv_battery(&g),
        path if std::path::Path::new(path).is_file() => vec![Symbol::from_file(std::path::Path::new(path), &g)?],
        name => vec![named_symbol(name, &g)?],
    };
    let tol = cfg.tolerance("ratio", 1e-9);
    let mut out = Outcome::default();
    let mut worst: f64 = 0.0;
    for (i, a) in symbols.iter().enumerate() {
        let r = stechkin_check(a, &cfg.space, &opts)?;
        let row = match r.rhs {
            Some(rhs) => ReportRow::bounded(format!("norm[{}]", a.name()), r.lhs, rhs).tolerance(tol),
            None => ReportRow::measured(format!("norm[{}]", a.name()), r.lhs),
        };
        out.push(row.trial(i));
        worst = worst.max(r.empirical_constant);
    }
    out.constant("empirical_constant", worst);
    if let Some(p) = lebesgue_exponent(&cfg.space) {
        out.constant("stechkin_constant", stechkin_constant(p));
    } else {
        out.note("no closed-form Stechkin constant for this space; only the empirical constant is reported");
    }
    Ok(out)
}

pub fn cauchy_norm(cfg: &ExperimentConfig) -> Res {
    let g = cfg.grid()?;
    let p = lebesgue_exponent(&cfg.space)
        .ok_or_else(|| CliError::Usage("cauchy-norm needs a Lebesgue space Lp:p".into()))?;
    let opts = norm_options(cfg, 1)?;
    let w = W0Operator::new(&cauchy_symbol(&g));
    let est = operator_norm_estimate(&w, &g, &cfg.space, &opts)?;
    let exact = stechkin_constant(p);
    let reach = cfg.tolerance("reach", 0.97);
    let mut out = Outcome::default();
    out.push(ReportRow::bounded("norm", est.value, exact).tolerance(cfg.tolerance("ceiling", 1e-3)));
    out.push(ReportRow::bounded("target_over_estimate", reach * exact / est.value, 1.0));
    out.constant("norm_estimate", est.value);
    out.constant("exact_norm", exact);
    out.constant("iterations", est.iterations as f64);
    Ok(out)
}

pub fn cauchy_pv(cfg: &ExperimentConfig) -> Res {
    let g = cfg.grid()?;
    let tol = cfg.tolerance("agreement", 1e-3);
    let mut out = Outcome::default();
    let mut worst: f64 = 0.0;
    for t in 0..cfg.trials {
        let f = random_packet(g, &mut stream_rng(cfg.seed, streams::INPUT, t as u64));
        let pv = cauchy_singular_pv(&f);
        let mult = cauchy_singular_multiplier(&f);
        let rel = mult.sub(&pv).l2_norm() / pv.l2_norm();
        worst = worst.max(rel);
        out.push(ReportRow::bounded("relative_difference", rel, tol).trial(t));
    }
    out.constant("worst_relative_difference", worst);
    Ok(out)
}

pub fn isometry(cfg: &ExperimentConfig) -> Res {
    let sys = system(cfg)?;
    let terms: usize = cfg.param("terms", 8)?;
    let tol = cfg.tolerance("isometry", 1e-3);
    let l2 = SpaceSpec::lebesgue(2.0)?;
    let mut out = Outcome::default();
    for t in 0..cfg.trials {
        let f = random_span(&sys, terms, &mut stream_rng(cfg.seed, streams::INPUT, t as u64));
        let eps = SignSequence::seeded(sys.len(), cfg.seed, t as u64);
        let ratio = norm(&apply_t_eps(&f, &sys, &eps)?, &l2)?.value / norm(&f, &l2)?.value;
        out.push(ReportRow::bounded("isometry_defect", (ratio - 1.0).abs(), tol).trial(t));
    }
    Ok(out)
}

pub fn uniform_bound(cfg: &ExperimentConfig) -> Res {
    let sys = system(cfg)?;
    let restarts: usize = cfg.param("restarts", 2)?;
    let sweep = uniform_bound_sweep(&sys, &cfg.space, cfg.trials, cfg.seed, restarts)?;
    let mut out = Outcome::default();
    for (t, v) in sweep.per_trial.iter().enumerate() {
        out.push(ReportRow::measured("norm", *v).trial(t));
    }
    let half = sweep.prefix_max(cfg.trials.div_ceil(2));
    out.push(ReportRow::measured("n_hat_half", half));
    out.push(ReportRow::measured("n_hat", sweep.n_hat));
    out.push(ReportRow::bounded("relative_change", (sweep.n_hat - half).abs() / half, cfg.tolerance("stability", 0.1)));
    out.constant("n_hat", sweep.n_hat);
    Ok(out)
}

pub fn khintchine(cfg: &ExperimentConfig) -> Res {
    let sys = system(cfg)?;
    let (lo, hi) = window_extent(&sys);
    let draws: usize = cfg.param("sign_draws", 4000)?;
    let terms: usize = cfg.param("terms", 8)?;
    let mut out = Outcome::default();
    for t in 0..cfg.trials {
        let mut rng = stream_rng(cfg.seed, streams::INPUT, t as u64);
        let f = random_span(&sys, terms, &mut rng);
        let x = rng.random_range(lo..hi);
        let r = khintchine_domination(&f, &sys, x, draws, lab_core::rng::derive_seed(cfg.seed, streams::SIGNS, t as u64))?;
        let bound = KHINTCHINE_L * (r.mean + 3.0 * r.standard_error);
        out.push(ReportRow::bounded("square_function", r.lhs, bound).tolerance(1e-14).trial(t));
    }
    let c = Complex64::new(0.8, -0.6);
    let two = khintchine_exhaustive(&[c, c])?;
    out.push(ReportRow::bounded("sharpness_gap", (two.lhs - KHINTCHINE_L * two.mean).abs(), 1e-10));
    out.constant("khintchine_l", KHINTCHINE_L);
    Ok(out)
}

pub fn square_function(cfg: &ExperimentConfig) -> Res {
    let sys = system(cfg)?;
    let restarts: usize = cfg.param("restarts", 2)?;
    let sweep_trials: usize = cfg.param("sweep_trials", 128)?;
    let n_hat = uniform_bound_sweep(&sys, &cfg.space, sweep_trials, cfg.seed, restarts)?.n_hat;
    let terms: usize = cfg.param("terms", 8)?;
    let mut out = Outcome::default();
    for t in 0..cfg.trials {
        let f = random_span(&sys, terms, &mut stream_rng(cfg.seed, streams::INPUT, t as u64));
        let vf = square_function_v(&f, &sys);
        let nf = norm(&f, &cfg.space)?.value;
        let ratio = norm(&vf, &cfg.space)?.value / nf;
        out.push(ReportRow::bounded("v_ratio", ratio, KHINTCHINE_L * n_hat).trial(t));
    }
    out.constant("n_hat", n_hat);
    Ok(out)
}

pub fn wavelet_roundtrip(cfg: &ExperimentConfig) -> Res {
    let sys = system(cfg)?;
    let terms: usize = cfg.param("terms", 8)?;
    let l2 = SpaceSpec::lebesgue(2.0)?;
    let mut out = Outcome::default();
    for t in 0..cfg.trials {
        let f = random_span(&sys, terms, &mut stream_rng(cfg.seed, streams::INPUT, t as u64));
        let back = SampledFunction::new(*sys.grid(), sys.synthesize(&sys.coefficients(f.values())))?;
        let diff = back.sub(&f);
        let e2 = norm(&diff, &l2)?.value / norm(&f, &l2)?.value;
        let ex = norm(&diff, &cfg.space)?.value / norm(&f, &cfg.space)?.value;
        out.push(ReportRow::bounded("error_l2", e2, cfg.tolerance("l2", 1e-4)).trial(t));
        out.push(ReportRow::bounded("error_space", ex, cfg.tolerance("space", 1e-2)).trial(t));
    }
    out.constant("window_elements", sys.len() as f64);
    Ok(out)
}

/// Sign-flip ratios for one input; the constant fitted on the first half of
/// the draws must bound the second half within the `stability` tolerance.
pub fn unconditionality(cfg: &ExperimentConfig) -> Res {
    let sys = system(cfg)?;
    let terms: usize = cfg.param("terms", 16)?;
    let f = random_span(&sys, terms, &mut stream_rng(cfg.seed, streams::INPUT, 0));
    let ratios = unconditionality_probe(&f, &sys, &cfg.space, cfg.trials, cfg.seed)?;
    let half = cfg.trials.div_ceil(2);
    let b = ratios[..half].iter().copied().fold(0.0, f64::max);
    let mut out = Outcome::default();
    for (t, r) in ratios.iter().enumerate() {
        let row = if t < half {
            ReportRow::measured("ratio", *r)
        } else {
            ReportRow::bounded("ratio", *r, b).tolerance(cfg.tolerance("stability", 0.1))
        };
        out.push(row.trial(t));
    }
    out.constant("b_first_half", b);
    out.constant("b", ratios.iter().copied().fold(0.0, f64::max));
    Ok(out)
}

pub fn kernel_constants(cfg: &ExperimentConfig) -> Res {
    let sys = system(cfg)?;
    let samples: usize = cfg.param("samples", 4000)?;
    let a = standard_kernel_constants(&sys, samples, cfg.seed)?;
    let b = standard_kernel_constants(&sys, 2 * samples, cfg.seed)?;
    let tol = cfg.tolerance("stability", 0.1);
    let mut out = Outcome::default();
    for (d, v) in a.per_draw.iter().enumerate() {
        out.push(ReportRow::measured("c1", v.0).trial(d));
        out.push(ReportRow::measured("c2", v.1).trial(d));
        out.push(ReportRow::measured("c3", v.2).trial(d));
    }
    for (name, x, y) in [("c1", a.c1, b.c1), ("c2", a.c2, b.c2), ("c3", a.c3, b.c3)] {
        out.push(ReportRow::bounded(format!("{name}_doubling_change"), (y - x).abs() / y, tol));
        out.constant(name, y);
    }
    out.push(ReportRow::measured("c2_spread", b.c2_spread()));
    Ok(out)
}

/// Condition (D) ratios for `K_ε` against `8 Ĉ₂` with cutoff `N = 2`.
pub fn condition_d(cfg: &ExperimentConfig) -> Res {
    let sys = system(cfg)?;
    let g = *sys.grid();
    let samples: usize = cfg.param("samples", 4000)?;
    let c2 = standard_kernel_constants(&sys, samples, cfg.seed)?.c2;
    let bound = 8.0 * c2;
    let (lo, hi) = window_extent(&sys);
    let r_max: f64 = cfg.param("r_max", 2.0)?;
    let mut out = Outcome::default();
    for t in 0..cfg.trials {
        let mut rng = stream_rng(cfg.seed, streams::INPUT, t as u64);
        let f = random_smooth(g, &mut rng);
        let x0 = rng.random_range(lo..hi);
        let eps = SignSequence::seeded(sys.len(), lab_core::rng::derive_seed(cfg.seed, streams::SIGNS, 0), t as u64);
        let k = WaveletKernel::new(&sys, &eps)?;
        let fam = IntervalFamily::new(x0, 4.0 * g.spacing(), r_max, 1.5, &g)?;
        let ratio = condition_d_ratio(&k, &f, &fam, 2.0)?;
        out.push(ReportRow::bounded("d_ratio", ratio, bound).tolerance(cfg.tolerance("d", 0.1)).trial(t));
    }
    out.constant("c2", c2);
    out.constant("c_d", bound);
    Ok(out)
}

/// `(T_ε f)^#_s(x₀) / (Mf)(x₀)`; the sup over the first half of the trials must
/// match the sup over all of them within the `stability` tolerance.
pub fn sharp_maximal(cfg: &ExperimentConfig) -> Res {
    let sys = system(cfg)?;
    let g = *sys.grid();
    let s: f64 = cfg.param("s", 0.5)?;
    let (lo, hi) = window_extent(&sys);
    let mut out = Outcome::default();
    let mut ratios = Vec::with_capacity(cfg.trials);
    for t in 0..cfg.trials {
        let mut rng = stream_rng(cfg.seed, streams::INPUT, t as u64);
        let f = random_smooth(g, &mut rng);
        let x0 = rng.random_range(lo..hi);
        let eps = SignSequence::seeded(sys.len(), lab_core::rng::derive_seed(cfg.seed, streams::SIGNS, 0), t as u64);
        let fam = IntervalFamily::new(x0, g.spacing(), 0.25 * (hi - lo), DEFAULT_RATIO, &g)?;
        let r = sharp_vs_maximal_ratio(&sys, &eps, &f, s, &fam)?;
        ratios.push(r);
        out.push(ReportRow::measured("ratio", r).trial(t));
    }
    let half = ratios[..cfg.trials.div_ceil(2)].iter().copied().fold(0.0, f64::max);
    let all = ratios.iter().copied().fold(0.0, f64::max);
    out.push(ReportRow::bounded("sup_relative_change", (all - half) / half, cfg.tolerance("stability", 0.2)));
    out.constant("c_s", all);
    out.constant("c_s_half", half);
    Ok(out)
}

pub fn weak_type(cfg: &ExperimentConfig) -> Res {
    let sys = system(cfg)?;
    let g = *sys.grid();
    let mut out = Outcome::default();
    let mut worst: f64 = 0.0;
    for t in 0..cfg.trials {
        let f = random_smooth(g, &mut stream_rng(cfg.seed, streams::INPUT, t as u64));
        let eps = SignSequence::seeded(sys.len(), cfg.seed, t as u64);
        let r = weak11_estimate(&sys, &eps, &f)?;
        worst = worst.max(r);
        out.push(ReportRow::measured("weak11_ratio", r).trial(t));
    }
    out.constant("c11", worst);
    Ok(out)
}

pub fn maximal_bounded(cfg: &ExperimentConfig) -> Res {
    let g = cfg.grid()?;
    let mut out = Outcome::default();
    let mut worst: f64 = 0.0;
    for t in 0..cfg.trials {
        let f = random_smooth(g, &mut stream_rng(cfg.seed, streams::INPUT, t as u64));
        let r = maximal_norm_ratio(&f, &cfg.space)?;
        let ra = maximal_norm_ratio(&f, &cfg.space.associate())?;
        worst = worst.max(r).max(ra);
        out.push(ReportRow::measured("ratio", r).trial(t));
        out.push(ReportRow::measured("ratio_associate", ra).trial(t));
    }
    out.constant("m_bound", worst);
    Ok(out)
}

pub fn holder(cfg: &ExperimentConfig) -> Res {
    let g = cfg.grid()?;
    let bound = cfg.space.holder_constant();
    let mut out = Outcome::default();
    for t in 0..cfg.trials {
        let mut rng = stream_rng(cfg.seed, streams::INPUT, t as u64);
        let f = random_smooth(g, &mut rng);
        let h = random_smooth(g, &mut rng);
        let r = holder_check(&f, &h, &cfg.space)?;
        out.push(ReportRow::bounded("holder_ratio", r, bound).tolerance(1e-9).trial(t));
    }
    out.constant("holder_constant", bound);
    Ok(out)
}

pub fn factorization(cfg: &ExperimentConfig) -> Res {
    let g = cfg.grid()?;
    let margin: f64 = cfg.param("margin", 1.0)?;
    let tol = cfg.tolerance("residual", 1e-4);
    let mut out = Outcome::default();
    for (pair, (name, a, b)) in factorization_battery(g).into_iter().enumerate() {
        let wit = factor_rank_one(&a, &b, margin)?;
        for t in 0..cfg.trials {
            let f = random_smooth(g, &mut stream_rng(cfg.seed, streams::INPUT, (pair * cfg.trials + t) as u64));
            let lhs = rank_one_apply(&a, &b, &f)?;
            let rhs = wit.apply(&a, &b, &f)?;
            let r = lhs.sub(&rhs).l2_norm() / f.l2_norm();
            out.push(ReportRow::bounded(format!("residual[{name}]"), r, tol).trial(t));
        }
        out.constant(&format!("variation[{name}]"), wit.c.total_variation());
    }
    Ok(out)
}

fn ladder(cfg: &ExperimentConfig) -> Result<Vec<f64>, CliError> {
    cfg.param_str("ladder", "0,5,10,20,50")
        .split(',')
        .map(|v| v.trim().parse().map_err(|_| CliError::Usage(format!("ladder entry {v:?} is not a number"))))
        .collect()
}

pub fn modulation_conjugation(cfg: &ExperimentConfig) -> Res {
    let g = cfg.grid()?;
    let op = named_operator(cfg.param_str("operator", "rank1:bump:bump"), g)?;
    let f = SampledFunction::from_real_fn(g, |x| (-(x - 0.3).powi(2)).exp());
    let hs = ladder(cfg)?;
    let curve = modulation_conjugation_test(&op, &f, &hs, &cfg.space)?;
    let mut out = Outcome::default();
    for (t, (h, v)) in hs.iter().zip(&curve).enumerate() {
        out.push(ReportRow::measured(format!("norm[h={h}]"), *v).trial(t));
    }
    if let (Some(first), Some(last)) = (curve.first(), curve.last()) {
        out.constant("decay", if *first > 0.0 { last / first } else { 0.0 });
    }
    Ok(out)
}

pub fn finite_rank(cfg: &ExperimentConfig) -> Res {
    let g = cfg.grid()?;
    let op = named_operator(cfg.param_str("operator", "gauss:σ=1"), g)?;
    let j_max: i32 = cfg.param("j_max", 3)?;
    let sys = DyadicSystem::new(&Wavelet::new(&cfg.wavelet)?, Window::mra(0, j_max), &g)?;
    let ns: Vec<usize> = cfg
        .param_str("ranks", "16,64,256")
        .split(',')
        .map(|v| v.trim().parse().map_err(|_| CliError::Usage(format!("rank {v:?} is not an integer"))))
        .collect::<Result<_, _>>()?;
    let opts = NormEstimateOptions {
        max_iterations: cfg.param("max_iterations", 100)?,
        tolerance: cfg.tolerance("power", 1e-8),
        ..norm_options(cfg, 1)?
    };
    let sweep = finite_rank_sweep(&op, &sys, &ns, &cfg.space, &opts)?;
    let mut out = Outcome::default();
    for (t, s) in sweep.iter().enumerate() {
        let row = match t {
            0 => ReportRow::measured(format!("error[n={}]", s.n), s.error),
            _ => ReportRow::bounded(format!("error[n={}]", s.n), s.error, sweep[t - 1].error).tolerance(1e-9),
        };
        out.push(row.trial(t));
    }
    if let (Some(a), Some(b)) = (sweep.first(), sweep.last()) {
        out.constant("total_decay", a.error / b.error);
    }
    out.constant("window_elements", sys.len() as f64);
    Ok(out)
}

pub fn commutator(cfg: &ExperimentConfig) -> Res {
    let g = cfg.grid()?;
    let a = named_profile(cfg.param_str("profile", "signa"), g)?;
    let sigma = match cfg.param_str("symbol", "mollified-sign") {
        "mollified-sign" => Symbol::from_fn("mollified-sign", &g, None, |w| Complex64::new(w.tanh(), 0.0)),
        name => named_symbol(name, &g)?,
    };
    let report = commutator_compactness_probe(&a, &sigma, &cfg.space, cfg.seed)?;
    let mut out = Outcome::default();
    for (k, s) in report.singular_values.iter().enumerate() {
        out.push(ReportRow::measured("singular_value", *s).trial(k));
    }
    out.constant("drop", report.drop());
    if let Some(e) = report.decay_exponent {
        out.constant("decay_exponent", e);
    }
    out.note("reported as evidence only; no compactness verdict");
    Ok(out)
}
