use lab_core::grid::{Grid, SampledFunction};
use lab_core::maximal::local_sharp_max;
use lab_wasm::{maximal_view, multiplier_view, wavelet_view, HALF_WIDTH, SHAPES, SHARP_POINTS};

#[test]
fn envelope_dominates_the_wavelet() {
    for name in ["db3", "db6"] {
        let v = wavelet_view(name, 801).unwrap();
        assert_eq!(v.violations(), 0);
        assert!(v.c() > 0.0 && v.delta() > 0.0);
        for (p, e) in v.psi().iter().zip(v.envelope()) {
            assert!(p.abs() <= e * 1.01, "{name}: |ψ| = {p} above {e}");
        }
    }
}

#[test]
fn unknown_wavelet_is_an_error() {
    assert!(wavelet_view("db99", 10).is_err());
}

#[test]
fn multiplier_respects_the_bound() {
    let v = multiplier_view("sign", 2.0, 256).unwrap();
    assert_eq!(v.x().len(), 256);
    assert!((v.x()[0] + HALF_WIDTH).abs() < 1e-12);
    assert!((v.lower() - 1.0).abs() < 1e-6, "{}", v.lower());
    assert!((v.bound() - 3.0).abs() < 1e-9);
    // sign is unimodular except at ω = 0, so only the mean component is lost.
    let n = v.input().len() as f64;
    let e_in: f64 = v.input().iter().map(|a| a * a).sum();
    let mean: f64 = v.input().iter().sum::<f64>();
    let e_out: f64 = v.output_re().iter().zip(v.output_im()).map(|(a, b)| a * a + b * b).sum();
    assert!((e_in - mean * mean / n - e_out).abs() < 1e-9 * e_in);

    let v = multiplier_view("arctan", 4.0, 256).unwrap();
    assert!(v.lower() <= v.bound() * (1.0 + 1e-3));
    assert!(multiplier_view("nope", 2.0, 256).is_err());
    assert!(multiplier_view("sign", 0.5, 256).is_err());
}

#[test]
fn maximal_function_dominates() {
    for name in SHAPES {
        let v = maximal_view(name, 0.25, 256).unwrap();
        for (f, m) in v.f().iter().zip(v.maximal()) {
            assert!(m >= f * (1.0 - 1e-12), "{name}");
        }
        assert_eq!(v.sharp_x().len(), 256usize.div_ceil(256 / SHARP_POINTS));
        assert!(v.sharp().iter().all(|s| *s >= 0.0 && s.is_finite()));
    }
    assert!(maximal_view("nope", 0.25, 256).is_err());
    assert!(maximal_view("step", 1.5, 256).is_err());
}

#[test]
fn subsampled_sharp_function_matches_the_full_one() {
    let v = maximal_view("packet", 0.5, 256).unwrap();
    let g = Grid::new(HALF_WIDTH, 256).unwrap();
    let f = SampledFunction::from_real_fn(g, |x| (-x * x / 2.0).exp() * (4.0 * x).cos());
    let full = local_sharp_max(&f, 0.5).unwrap();
    let stride = 256 / SHARP_POINTS;
    for (i, s) in v.sharp().iter().enumerate() {
        assert!((s - full.values()[i * stride].re).abs() < 1e-12);
    }
}
