use lab_core::maximal::*;
use lab_core::randomized::{SignSequence, WaveletKernel};
use lab_core::wavelets::{DyadicSystem, Wavelet, Window};
use lab_core::{Complex64, Grid, SampledFunction, SpaceSpec};
use proptest::prelude::*;

fn small() -> Grid {
    Grid::new(4.0, 256).unwrap()
}

fn bumps(g: Grid, a: [f64; 3]) -> SampledFunction {
    SampledFunction::from_fn(g, move |x| {
        Complex64::new((-(x - a[0]).powi(2)).exp() + a[1] * (-(x - a[2]).powi(2) * 4.0).exp(), 0.3 * (x * a[2]).sin())
    })
}

#[test]
fn maximal_of_an_indicator_away_from_it() {
    let g = Grid::new(8.0, 1024).unwrap();
    let f = SampledFunction::from_real_fn(g, |x| if (0.0..1.0).contains(&x) { 1.0 } else { 0.0 });
    let at2 = maximal_at(&f, 2.0).unwrap();
    assert!((at2 - 0.5).abs() < 2.0 * g.spacing(), "{at2}");
    let mf = hardy_littlewood_max(&f);
    for (a, b) in mf.values().iter().zip(f.values()) {
        assert!(a.re >= b.norm());
    }
    let m2 = g.nearest_index(2.0).unwrap();
    assert!((mf.values()[m2].re - at2).abs() < 1e-15);
}

/// Direct search over intervals `[a, b] ∋ 0` and a grid of constants.
fn brute_sharp_step(g: &Grid, s: f64) -> f64 {
    let f: Vec<f64> = g.nodes().map(|x| if x >= 0.0 { 1.0 } else { 0.0 }).collect();
    let m = g.nearest_index(0.0).unwrap();
    let mut best: f64 = 0.0;
    for left in 0..=40 {
        for right in 0..=40 {
            let slice = &f[m - left..=m + right];
            let n = slice.len() as f64;
            let inf = (0..=1000)
                .map(|k| k as f64 / 1000.0)
                .map(|c| slice.iter().map(|v| (v - c).abs().powf(s)).sum::<f64>() / n)
                .fold(f64::INFINITY, f64::min);
            best = best.max(inf.powf(1.0 / s));
        }
    }
    best
}

#[test]
fn sharp_maximal_of_a_step_matches_brute_force() {
    let g = Grid::new(8.0, 1024).unwrap();
    let f = SampledFunction::from_real_fn(g, |x| if x >= 0.0 { 1.0 } else { 0.0 });
    let fam = IntervalFamily::new(0.0, g.spacing(), 1.0, DEFAULT_RATIO, &g).unwrap();
    let v = local_sharp_max_at(&f, 0.5, &fam).unwrap();
    let oracle = brute_sharp_step(&g, 0.5);
    assert!((v - oracle).abs() < 1e-3, "{v} vs {oracle}");
    assert!(local_sharp_max_at(&f, 1.0, &fam).is_err());
}

#[test]
fn noncentered_sharp_is_within_the_doubling_factor() {
    let g = Grid::new(8.0, 1024).unwrap();
    let ratio = 2f64.powf(0.25);
    let s = 0.5;
    for (i, a) in [[0.3, 0.8, -1.0], [-1.0, 2.0, 0.5], [0.0, -0.5, 2.0]].into_iter().enumerate() {
        let f = bumps(g, a);
        let real = SampledFunction::from_real_fn(g, |x| (2.0 * x + a[0]).sin() * (-x * x / 4.0).exp());
        for u in [f, real] {
            let x0 = 0.37 * i as f64;
            let q = IntervalFamily::new(x0, 8.0 * g.spacing(), 1.0, ratio, &g).unwrap();
            let c = IntervalFamily::new(x0, 8.0 * g.spacing(), 2.0, ratio, &g).unwrap();
            let nc = local_sharp_max_at(&u, s, &q).unwrap();
            let ce = local_sharp_max_centered_at(&u, s, &c).unwrap();
            let bound = (2.0 + 1.0 / 16.0f64).powf(1.0 / s) * 1.02;
            assert!(nc <= bound * ce, "{nc} > {bound} × {ce}");
        }
    }
}

#[test]
fn oscillation_of_the_linear_kernel() {
    let k = |x: f64, _y: f64| Complex64::new(x, 0.0);
    for (a, b) in [(0.0, 1.0), (-2.0, 1.0)] {
        let v = kernel_oscillation(&k, (a, b), 5.0).unwrap();
        assert!((v - (b - a) / 3.0).abs() < 1e-3 * (b - a));
    }
    let flat = |_x: f64, y: f64| Complex64::new(y, 0.0);
    assert_eq!(kernel_oscillation(&flat, (0.0, 1.0), 3.0).unwrap(), 0.0);
    assert!(kernel_oscillation(&k, (0.0, 1.0), 0.5).is_err());
}

#[test]
fn condition_d_separates_smooth_and_rough_kernels() {
    let g = Grid::new(16.0, 1024).unwrap();
    let f = SampledFunction::from_real_fn(g, |x| (-(x - 6.0).powi(2)).exp() + (-(x + 6.0).powi(2)).exp());
    let k = |x: f64, _y: f64| Complex64::new(x, 0.0);
    let narrow = IntervalFamily::new(0.0, g.spacing(), 0.5, DEFAULT_RATIO, &g).unwrap();
    let wide = IntervalFamily::new(0.0, g.spacing(), 2.0, DEFAULT_RATIO, &g).unwrap();
    let rn = condition_d_ratio(&k, &f, &narrow, 2.0).unwrap();
    let rw = condition_d_ratio(&k, &f, &wide, 2.0).unwrap();
    assert!(rw > 3.0 * rn, "{rn} {rw}");
    let far = IntervalFamily::new(0.0, g.spacing(), g.spacing(), DEFAULT_RATIO, &g).unwrap();
    let local = SampledFunction::from_real_fn(g, |x| if x.abs() < 0.5 * g.spacing() { 1.0 } else { 0.0 });
    assert_eq!(condition_d_ratio(&k, &local, &far, 2.0).unwrap(), 0.0);
}

#[test]
fn wavelet_kernel_oscillation_decays_like_inverse_square() {
    let g = Grid::new(32.0, 1 << 14).unwrap();
    let sys = DyadicSystem::new(&Wavelet::new("db6").unwrap(), Window::symmetric(6, 64), &g).unwrap();
    let eps = SignSequence::seeded(sys.len(), 4, 0);
    let k = WaveletKernel::new(&sys, &eps).unwrap();
    // One decade below the coarsest scale of the window, where the scale sum is complete.
    let r = 0.05;
    let pts: Vec<(f64, f64)> = (0..=20)
        .map(|i| 0.5 * 10f64.powf(i as f64 / 20.0))
        .map(|d| {
            // Average over a few anchors to smooth the scale staircase.
            let v: f64 = (0..8)
                .map(|a| {
                    let x0 = -4.0 + a as f64;
                    kernel_oscillation(&k, (x0 - r, x0 + r), x0 + d).unwrap()
                })
                .sum();
            (d.ln(), (v / 8.0).ln())
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope + 2.0).abs() < 0.2, "slope {slope}");
}

#[test]
fn maximal_operator_is_bounded_on_the_bundled_spaces() {
    let g = small();
    for spec in [
        SpaceSpec::lebesgue(4.0).unwrap(),
        SpaceSpec::weighted(2.0, 0.25).unwrap(),
        SpaceSpec::variable(lab_core::spaces::Exponent::gauss()).unwrap(),
    ] {
        let worst = (0..20)
            .map(|i| {
                let t = i as f64 / 20.0;
                maximal_norm_ratio(&bumps(g, [2.0 * t - 1.0, 3.0 * t, 1.0 - t]), &spec).unwrap()
            })
            .fold(0.0, f64::max);
        assert!(worst.is_finite() && worst >= 1.0, "{spec}: {worst}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sublinear_and_homogeneous(a in [-2.0f64..2.0, -1.0f64..1.0, -2.0f64..2.0], b in [-2.0f64..2.0, -1.0f64..1.0, -2.0f64..2.0], c in -3.0f64..3.0) {
        let g = small();
        let (f, h) = (bumps(g, a), bumps(g, b));
        let mf = hardy_littlewood_max(&f);
        let mh = hardy_littlewood_max(&h);
        let msum = hardy_littlewood_max(&f.add_scaled(Complex64::new(1.0, 0.0), &h));
        for i in 0..g.count() {
            prop_assert!(msum.values()[i].re <= mf.values()[i].re + mh.values()[i].re + 1e-10);
        }
        let mc = hardy_littlewood_max(&f.scale(Complex64::new(c, 0.0)));
        for i in 0..g.count() {
            prop_assert!((mc.values()[i].re - c.abs() * mf.values()[i].re).abs() <= 1e-12 * mf.values()[i].re.max(1.0));
        }
    }

    #[test]
    fn sharp_ignores_constants(a in [-2.0f64..2.0, -1.0f64..1.0, -2.0f64..2.0], c0 in -5.0f64..5.0, x0 in -2.0f64..2.0) {
        let g = small();
        let f = SampledFunction::from_real_fn(g, |x| (x * a[0]).sin() + a[1] * x.cos() + a[2]);
        let fam = IntervalFamily::new(x0, 2.0 * g.spacing(), 2.0, DEFAULT_RATIO, &g).unwrap();
        let v = local_sharp_max_at(&f, 0.5, &fam).unwrap();
        let w = local_sharp_max_at(&f.map(|_, z| z + c0), 0.5, &fam).unwrap();
        prop_assert!((v - w).abs() <= 1e-9 * v.max(1e-12));
    }
}
