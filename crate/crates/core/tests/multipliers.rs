use lab_core::grid::{fourier_transform, modulate};
use lab_core::multipliers::*;
use lab_core::spaces::NormEstimateOptions;
use lab_core::{Complex64, Grid, SampledFunction, SpaceSpec};
use proptest::prelude::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn grid() -> Grid {
    Grid::new(32.0, 1 << 12).unwrap()
}

fn rel(a: &SampledFunction, b: &SampledFunction) -> f64 {
    a.sub(b).l2_norm() / b.l2_norm()
}

fn packet(g: Grid, centre: f64, width: f64, lambda: f64) -> SampledFunction {
    let env = SampledFunction::from_real_fn(g, |x| (-(x - centre).powi(2) / (2.0 * width * width)).exp());
    modulate(&env, lambda)
}

#[test]
fn composition_is_the_product_symbol() {
    let g = grid();
    let f = packet(g, 0.5, 1.0, 1.0);
    for (a, b) in [("sign", "arctan"), ("bump", "sawtooth-BV")] {
        let a = named_symbol(a, &g).unwrap();
        let b = named_symbol(b, &g).unwrap();
        let lhs = apply_w0(&a, &apply_w0(&b, &f).unwrap()).unwrap();
        let rhs = apply_w0(&a.product(&b), &f).unwrap();
        assert!(lhs.sub(&rhs).sup_norm() < 1e-8);
    }
}

#[test]
fn commutes_with_grid_shifts() {
    let g = grid();
    let f = packet(g, -1.0, 0.7, 3.0);
    let a = named_symbol("sawtooth-BV", &g).unwrap();
    let shift = |u: &SampledFunction, s: usize| {
        let v = u.values();
        let n = v.len();
        SampledFunction::new(g, (0..n).map(|i| v[(i + n - s) % n]).collect()).unwrap()
    };
    let lhs = shift(&apply_w0(&a, &f).unwrap(), 91);
    let rhs = apply_w0(&a, &shift(&f, 91)).unwrap();
    assert!(lhs.sub(&rhs).sup_norm() < 1e-8);
}

#[test]
fn band_projection_removes_outside_energy() {
    let g = grid();
    let f = SampledFunction::from_real_fn(g, |x| (-x * x / 2.0).exp());
    let d = g.dual().spacing();
    let edge = (1.0 / d).floor() * d + 0.5 * d;
    let band = Symbol::from_fn("band", &g, Some(c(0.0)), |w| c(if w.abs() < edge { 1.0 } else { 0.0 }));
    let out = fourier_transform(&apply_w0(&band, &f).unwrap()).samples;
    let outside: f64 = out
        .grid()
        .nodes()
        .zip(out.values())
        .filter(|(w, _)| w.abs() > edge)
        .map(|(_, v)| v.norm_sqr())
        .sum();
    assert!(outside * d < 1e-10);
}

#[test]
fn stechkin_examples() {
    let g = grid();
    let opts = NormEstimateOptions::with_restarts(4, 11);
    let sign = named_symbol("sign", &g).unwrap();
    let l2 = SpaceSpec::lebesgue(2.0).unwrap();
    let r = stechkin_check(&sign, &l2, &opts).unwrap();
    assert!((r.v_norm - 3.0).abs() < 1e-12);
    assert!((r.rhs.unwrap() - 3.0).abs() < 1e-12);
    assert!(r.lhs > 0.99 && r.lhs <= 1.0 + 1e-9, "{}", r.lhs);
    assert_eq!(r.holds(1e-9), Some(true));
    let k = Symbol::constant(&g, Complex64::new(0.0, 2.5));
    let r = stechkin_check(&k, &SpaceSpec::lebesgue(4.0).unwrap(), &opts).unwrap();
    assert!((r.lhs - 2.5).abs() < 1e-8);
    let w = SpaceSpec::weighted(2.0, 0.25).unwrap();
    let r = stechkin_check(&sign, &w, &opts).unwrap();
    assert!(r.rhs.is_none() && r.empirical_constant > 0.0);
}

#[test]
fn multiplier_norms_on_l2_match_sup() {
    let g = grid();
    let opts = NormEstimateOptions::with_restarts(4, 5);
    let l2 = SpaceSpec::lebesgue(2.0).unwrap();
    let one = Symbol::constant(&g, c(1.0));
    assert!((multiplier_norm_estimate(&one, &l2, &opts).unwrap().value - 1.0).abs() < 1e-8);
    for s in [
        Symbol::from_fn("lorentz", &g, Some(c(0.0)), |w| c(2.0 / (1.0 + (w - 3.0).powi(2)))),
        Symbol::from_fn("phase", &g, None, |w| Complex64::from_polar(1.0 + 0.5 * w.atan(), w / 4.0)),
    ] {
        let est = multiplier_norm_estimate(&s, &l2, &opts).unwrap().value;
        let sup = s.sup_norm();
        assert!(est <= sup * (1.0 + 1e-9) && est >= 0.99 * sup, "{}: {est} vs {sup}", s.name());
    }
}

#[test]
fn submultiplicative_on_pairs() {
    let g = Grid::new(32.0, 1 << 10).unwrap();
    let opts = NormEstimateOptions::with_restarts(3, 2);
    let l4 = SpaceSpec::lebesgue(4.0).unwrap();
    let battery = bv_battery(&g);
    let est = |s: &Symbol| multiplier_norm_estimate(s, &l4, &opts).unwrap().value;
    for (i, j) in [(0, 1), (1, 2), (2, 3), (4, 9), (5, 7)] {
        let (a, b) = (&battery[i], &battery[j]);
        assert!(est(&a.product(b)) <= est(a) * est(b) * 1.05, "{} {}", a.name(), b.name());
    }
}

#[test]
fn cauchy_is_an_l2_isometry_and_an_involution() {
    let g = Grid::new(32.0, 1 << 13).unwrap();
    let f = packet(g, 0.0, 1.0, 6.0).add_scaled(c(0.5), &packet(g, 2.0, 1.5, -5.0));
    let sf = cauchy_singular_multiplier(&f);
    assert!((sf.l2_norm() - f.l2_norm()).abs() < 1e-6 * f.l2_norm());
    let ssf = cauchy_singular_pv(&cauchy_singular_pv(&f));
    assert!(rel(&ssf, &f) < 1e-3, "{}", rel(&ssf, &f));
}

#[test]
fn pv_quadrature_converges_on_the_lorentzian() {
    // p.v.∫ dt/((1+t²)(t-x)) = -πx/(1+x²) by residues, so Sf = i x/(1+x²).
    let g = Grid::new(512.0, 1 << 18).unwrap();
    let f = SampledFunction::from_real_fn(g, |t| 1.0 / (1.0 + t * t));
    let s = cauchy_singular_pv(&f);
    for x in [-3.0, -0.5, 0.25, 1.0, 2.0] {
        let m = g.nearest_index(x).unwrap();
        let xm = g.node(m);
        let expected = Complex64::new(0.0, 1.0) * (xm / (1.0 + xm * xm));
        assert!((s.values()[m] - expected).norm() < 1e-4, "x = {xm}: {} vs {expected}", s.values()[m]);
    }
}

#[test]
fn symbol_file_round_trip() {
    let g = grid();
    let dir = std::env::temp_dir().join(format!("lab-symbol-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ramp.txt");
    std::fs::write(&path, "# ramp\n-2 0\n2 1\n").unwrap();
    let s = Symbol::from_file(&path, &g).unwrap();
    assert!((s.total_variation() - 1.0).abs() < 1e-12);
    std::fs::write(&path, "1 2 3 4\n").unwrap();
    assert!(Symbol::from_file(&path, &g).is_err());
    std::fs::remove_dir_all(&dir).ok();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn multiplier_agrees_with_pv_quadrature(
        centre in -4.0f64..4.0,
        spread in 0.0f64..1.0,
        lambda in 4.0f64..12.0,
        negative in any::<bool>(),
    ) {
        // λ·width ≥ 4 keeps the spectrum off ω = 0, where the truncated
        // principal-value integral and the periodic multiplier part ways.
        let lo = (4.0 / lambda).max(0.6);
        let width = lo + spread * (2.0 - lo);
        let g = Grid::new(32.0, 1 << 12).unwrap();
        let f = packet(g, centre, width, if negative { -lambda } else { lambda });
        let pv = cauchy_singular_pv(&f);
        let mult = cauchy_singular_multiplier(&f);
        prop_assert!(rel(&mult, &pv) < 1e-3);
    }

    #[test]
    fn battery_variation_is_cached_exactly(i in 0usize..20) {
        let g = Grid::new(32.0, 1 << 10).unwrap();
        let s = &bv_battery(&g)[i];
        prop_assert!((s.total_variation() - total_variation(s)).abs() < 1e-10);
        prop_assert!(s.v_norm() >= s.sup_norm());
    }
}
