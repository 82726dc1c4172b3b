use lab_core::wavelets::filters::NAMES;
use lab_core::wavelets::*;
use lab_core::{Complex64, Grid, SampledFunction};
use proptest::prelude::*;

fn grid() -> Grid {
    Grid::new(32.0, 1 << 14).unwrap()
}

fn db6() -> Wavelet {
    Wavelet::new("db6").unwrap()
}

#[test]
fn single_element_has_a_single_coefficient() {
    let (w, g) = (db6(), grid());
    let f = dyadic_element(&w, 2, 3, &g).unwrap();
    let t = wavelet_coefficients(&f, &w, 8, 8).unwrap();
    for (key, c) in t.keys.iter().zip(&t.entries) {
        if (key.1, key.2) == (2, 3) {
            assert!((c - Complex64::new(1.0, 0.0)).norm() < 1e-4);
        } else {
            assert!(c.norm() < 1e-4, "{key:?}: {c}");
        }
    }
    assert!(wavelet_coefficients(&SampledFunction::zeros(g), &w, 8, 8).unwrap().energy() == 0.0);
}

#[test]
fn round_trip_of_a_window_combination() {
    let (w, g) = (db6(), grid());
    let f = dyadic_element(&w, 1, 2, &g)
        .unwrap()
        .add_scaled(Complex64::new(0.5, 0.0), &dyadic_element(&w, -1, 0, &g).unwrap());
    let t = wavelet_coefficients(&f, &w, 8, 8).unwrap();
    assert!((t.energy() - f.l2_norm().powi(2)).abs() < 1e-3 * f.l2_norm().powi(2));
    let back = reconstruct(&t, &w, &g).unwrap();
    assert!(back.sub(&f).l2_norm() < 1e-4);
}

#[test]
fn gaussian_reconstruction_improves_with_the_window() {
    let (w, g) = (db6(), grid());
    let f = SampledFunction::from_real_fn(g, |x| (-x * x).exp());
    let l4 = lab_core::SpaceSpec::lebesgue(4.0).unwrap();
    let mut prev = f64::INFINITY;
    for j_max in [0, 1, 2, 3] {
        let sys = DyadicSystem::new(&w, Window::mra(0, j_max), &g).unwrap();
        let back = SampledFunction::new(g, sys.synthesize(&sys.coefficients(f.values()))).unwrap();
        let err = lab_core::spaces::norm(&back.sub(&f), &l4).unwrap().value;
        assert!(err < prev, "j_max = {j_max}: {err} ≥ {prev}");
        prev = err;
    }
    assert!(prev < 1e-2, "{prev}");
}

#[test]
fn vanishing_moments_for_every_filter() {
    for name in NAMES.iter().filter(|n| n.starts_with("db")) {
        let w = Wavelet::new(name).unwrap();
        let s = w.samples();
        let h = s.step();
        let order: i32 = name[2..].parse().unwrap();
        for m in 0..order {
            let terms = s.psi.iter().enumerate().map(|(i, v)| (i as f64 * h).powi(m) * v);
            let (sum, scale) = terms.fold((0.0, 0.0), |(a, b), t| (a + t, b + t.abs()));
            assert!((sum * h).abs() < 1e-6 * (scale * h).max(1.0), "{name}, m = {m}");
        }
        let integral: f64 = s.psi.iter().sum::<f64>() * h;
        assert!(integral.abs() < 1e-8);
    }
}

#[test]
fn db6_majorant_holds_on_a_fine_mesh() {
    let w = Wavelet::with_levels("db6", 13).unwrap();
    assert!(w.samples().psi.len() >= 1 << 16);
    assert_eq!(majorant_violations(&w, fit_majorant(&w)), 0);
    assert!(w.is_c1());
    assert!(Wavelet::new("haar").unwrap().dpsi(0.3).is_err());
}

#[test]
fn window_gram_matrix_is_near_identity() {
    let sys = DyadicSystem::new(&db6(), Window::mra(0, 3), &grid()).unwrap();
    let (diag, off) = sys.gram_deviation();
    assert!(diag < 1e-3 && off < 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn parseval_on_window_span(coefs in proptest::collection::vec(-2.0f64..2.0, 6), picks in proptest::collection::vec(0usize..400, 6)) {
        let g = Grid::new(32.0, 1 << 13).unwrap();
        let sys = DyadicSystem::new(&db6(), Window::symmetric(8, 8), &g).unwrap();
        let mut c = vec![Complex64::new(0.0, 0.0); sys.len()];
        for (a, p) in coefs.iter().zip(&picks) {
            c[p % sys.len()] += Complex64::new(*a, 0.0);
        }
        let f = SampledFunction::new(g, sys.synthesize(&c)).unwrap();
        let energy: f64 = sys.coefficients(f.values()).iter().map(|z| z.norm_sqr()).sum();
        let n2 = f.l2_norm().powi(2);
        prop_assert!((energy - n2).abs() <= 1e-3 * n2.max(1e-12));
    }
}
