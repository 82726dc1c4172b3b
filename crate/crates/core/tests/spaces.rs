use lab_core::linop::DenseMatrix;
use lab_core::spaces::*;
use lab_core::{Complex64, Grid, LinearOperator, SampledFunction, SpaceSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn specs() -> Vec<SpaceSpec> {
    vec![
        SpaceSpec::lebesgue(4.0).unwrap(),
        SpaceSpec::lebesgue(4.0 / 3.0).unwrap(),
        SpaceSpec::weighted(2.0, 0.25).unwrap(),
        SpaceSpec::weighted(3.0, -0.2).unwrap(),
        SpaceSpec::variable(Exponent::gauss()).unwrap(),
        SpaceSpec::variable(Exponent::gauss().conjugate()).unwrap(),
    ]
}

fn grid() -> Grid {
    Grid::new(8.0, 512).unwrap()
}

fn smooth(g: Grid, a: [f64; 4]) -> SampledFunction {
    SampledFunction::from_fn(g, move |x| {
        let env = (-(x - a[0]).powi(2) / (1.0 + a[1].abs())).exp();
        Complex64::from_polar(env * (1.0 + a[2] * x.sin()), a[3] * x)
    })
}

fn coeffs() -> impl Strategy<Value = [f64; 4]> {
    [-3.0f64..3.0, 0.0f64..4.0, -0.9f64..0.9, -5.0f64..5.0]
}

#[test]
fn spec_level_associates() {
    for s in specs() {
        assert_eq!(s.associate().associate(), s);
        assert_eq!(associate_space(&s).unwrap(), s.associate());
    }
    assert_eq!(SpaceSpec::lebesgue(4.0).unwrap().associate(), SpaceSpec::lebesgue(4.0 / 3.0).unwrap());
    assert_eq!(
        SpaceSpec::weighted(2.0, 0.25).unwrap().associate(),
        SpaceSpec::weighted(2.0, -0.25).unwrap()
    );
    assert!(SpaceSpec::weighted(2.0, 0.6).is_err());
    assert!(SpaceSpec::lebesgue(1.0).is_err());
}

#[test]
fn holder_sweeps() {
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let draw = |rng: &mut ChaCha8Rng| {
        smooth(g, [rng.random_range(-3.0..3.0), rng.random_range(0.0..4.0), rng.random_range(-0.9..0.9), rng.random_range(-5.0..5.0)])
    };
    let l4 = SpaceSpec::lebesgue(4.0).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (f, h) = (draw(&mut rng), draw(&mut rng));
        worst = worst.max(holder_check(&f, &h, &l4).unwrap());
    }
    assert!(worst <= 1.0 + 1e-9, "{worst}");
    let w = SpaceSpec::weighted(2.0, 0.25).unwrap();
    for _ in 0..100 {
        let (f, h) = (draw(&mut rng), draw(&mut rng));
        assert!(holder_check(&f, &h, &w).unwrap() <= 1.0 + 1e-9);
    }
    let v = SpaceSpec::variable(Exponent::gauss()).unwrap();
    for _ in 0..100 {
        let (f, h) = (draw(&mut rng), draw(&mut rng));
        assert!(holder_check(&f, &h, &v).unwrap() <= v.holder_constant() + 1e-9);
    }
}

#[test]
fn truncations_increase_to_the_norm() {
    let g = grid();
    let f = smooth(g, [0.5, 3.0, 0.3, 1.0]);
    for s in specs() {
        let full = norm(&f, &s).unwrap().value;
        let mut prev = 0.0;
        for n in 1..=8 {
            let fnn = f.map(|x, v| if x.abs() <= n as f64 { v } else { Complex64::new(0.0, 0.0) });
            let v = norm(&fnn, &s).unwrap().value;
            assert!(v >= prev - 1e-12, "{s}: not monotone at n = {n}");
            prev = v;
        }
        assert!((prev - full).abs() < 1e-10 * full.max(1.0), "{s}");
    }
}

/// Nonnegative matrices attain their p-norm on the positive orthant, where a
/// pattern search gives an independent value.
fn brute_p_norm(a: &[[f64; 5]; 5], p: f64, rng: &mut ChaCha8Rng) -> f64 {
    let ratio = |x: &[f64; 5]| {
        let nx: f64 = x.iter().map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p);
        let ny: f64 = a
            .iter()
            .map(|row| row.iter().zip(x).map(|(u, v)| u * v).sum::<f64>().powf(p))
            .sum::<f64>()
            .powf(1.0 / p);
        ny / nx
    };
    let mut best = [1.0; 5];
    let mut best_v = ratio(&best);
    for _ in 0..20000 {
        let x: [f64; 5] = std::array::from_fn(|_| rng.random_range(0.0..1.0));
        let v = ratio(&x);
        if v > best_v {
            best_v = v;
            best = x;
        }
    }
    let mut step = 0.1;
    while step > 1e-12 {
        let mut moved = false;
        for i in 0..5 {
            for s in [step, -step] {
                let mut y = best;
                y[i] = (y[i] + s).max(0.0);
                let v = ratio(&y);
                if v > best_v {
                    best_v = v;
                    best = y;
                    moved = true;
                }
            }
        }
        if !moved {
            step /= 2.0;
        }
    }
    best_v
}

#[test]
fn power_iteration_matches_brute_force_on_small_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..6 {
        let a: [[f64; 5]; 5] = std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(0.0..1.0)));
        let m = DenseMatrix::from_fn(5, |i, j| Complex64::new(a[i][j], 0.0));
        for p in [1.5, 3.0, 4.0] {
            let est = estimate_on_coordinates(&m, &[1.0; 5], p, &NormEstimateOptions::with_restarts(8, trial)).value;
            let brute = brute_p_norm(&a, p, &mut rng);
            assert!(est <= brute * (1.0 + 1e-8), "p = {p}: {est} > {brute}");
            assert!(est >= brute * (1.0 - 1e-6), "p = {p}: {est} < {brute}");
        }
    }
}

#[test]
fn restarts_never_lower_the_estimate() {
    let g = Grid::new(8.0, 256).unwrap();
    let d: Vec<Complex64> = (0..256).map(|i| Complex64::new(1.0 + ((i * 37) % 11) as f64 / 10.0, 0.0)).collect();
    let op = DenseMatrix::diagonal(&d);
    let spec = SpaceSpec::lebesgue(3.0).unwrap();
    let mut prev = 0.0;
    for r in [1, 2, 4, 8] {
        let v = operator_norm_estimate(&op, &g, &spec, &NormEstimateOptions::with_restarts(r, 9)).unwrap().value;
        assert!(v >= prev);
        prev = v;
    }
    assert!((prev - 2.0).abs() < 1e-8);
    assert_eq!(op.dim(), 256);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn norm_axioms(a in coeffs(), b in coeffs(), scale in -4.0f64..4.0, which in 0usize..6) {
        let g = grid();
        let s = &specs()[which];
        let f = smooth(g, a);
        let h = smooth(g, b);
        let nf = norm(&f, s).unwrap().value;
        let nh = norm(&h, s).unwrap().value;
        let c = Complex64::new(scale, 0.5 * scale);
        let ncf = norm(&f.scale(c), s).unwrap().value;
        prop_assert!((ncf - c.norm() * nf).abs() <= 1e-12 * nf.max(1.0) * c.norm().max(1.0));
        let nsum = norm(&f.add_scaled(Complex64::new(1.0, 0.0), &h), s).unwrap().value;
        prop_assert!(nsum <= nf + nh + 1e-10);
        let smaller = f.map(|x, v| v * (0.5 + 0.5 * x.cos()));
        prop_assert!(norm(&smaller, s).unwrap().value <= nf + 1e-12);
    }
}
