use lab_core::maximal::IntervalFamily;
use lab_core::randomized::*;
use lab_core::wavelets::{dyadic_element, DyadicSystem, Wavelet, Window};
use lab_core::{Complex64, Grid, SampledFunction, SpaceSpec};
use proptest::prelude::*;

fn grid() -> Grid {
    Grid::new(16.0, 1 << 11).unwrap()
}

fn system() -> DyadicSystem {
    DyadicSystem::new(&Wavelet::new("db6").unwrap(), Window::symmetric(2, 4), &grid()).unwrap()
}

fn span(sys: &DyadicSystem, coefs: &[(usize, f64)]) -> SampledFunction {
    let mut c = vec![Complex64::new(0.0, 0.0); sys.len()];
    for (i, v) in coefs {
        c[i % sys.len()] += Complex64::new(*v, 0.0);
    }
    SampledFunction::new(*sys.grid(), sys.synthesize(&c)).unwrap()
}

fn rel(a: &SampledFunction, b: &SampledFunction) -> f64 {
    a.sub(b).l2_norm() / b.l2_norm()
}

#[test]
fn all_plus_is_the_identity_on_the_span_and_signs_are_involutive() {
    let sys = system();
    let f = span(&sys, &[(0, 1.0), (7, -0.5), (20, 2.0), (33, 0.25)]);
    let plus = SignSequence::all_plus(sys.len());
    assert!(rel(&apply_t_eps(&f, &sys, &plus).unwrap(), &f) < 1e-3);
    let eps = SignSequence::seeded(sys.len(), 8, 1);
    let twice = apply_t_eps(&apply_t_eps(&f, &sys, &eps).unwrap(), &sys, &eps).unwrap();
    assert!(rel(&twice, &f) < 2e-3);
}

#[test]
fn kernel_reproduces_window_elements() {
    let sys = system();
    let g = *sys.grid();
    let plus = SignSequence::all_plus(sys.len());
    let e = &sys.elements()[5];
    let psi = e.to_sampled(g);
    let h = g.spacing();
    for x in [-1.3, 0.4, 2.2] {
        let m = g.nearest_index(x).unwrap();
        let xm = g.node(m);
        let integral: Complex64 = g
            .nodes()
            .zip(psi.values())
            .filter(|(y, _)| *y != xm)
            .map(|(y, v)| kernel_k_eps(&sys, &plus, xm, y).unwrap() * v)
            .sum::<Complex64>()
            * h;
        assert!((integral - psi.values()[m]).norm() < 1e-3, "x = {xm}");
    }
    let eps = SignSequence::seeded(sys.len(), 2, 0);
    let a = kernel_k_eps(&sys, &eps, 0.3, 1.7).unwrap();
    let b = kernel_k_eps(&sys, &eps.negated(), 0.3, 1.7).unwrap();
    assert_eq!(a, -b);
    assert!(kernel_k_eps(&sys, &eps, 0.3, 0.3).is_err());
}

#[test]
fn square_function_properties() {
    let sys = system();
    let g = *sys.grid();
    let e = sys.elements()[0].to_sampled(g);
    let v = square_function_v(&e, &sys);
    for (a, b) in v.values().iter().zip(e.values()) {
        assert!((a.re - b.norm()).abs() < 1e-3);
    }
    let f = span(&sys, &[(1, 1.0), (4, -2.0), (11, 0.7)]);
    let vf = square_function_v(&f, &sys);
    let v3 = square_function_v(&f.scale(Complex64::new(0.0, -3.0)), &sys);
    for (a, b) in vf.values().iter().zip(v3.values()) {
        assert!((b.re - 3.0 * a.re).abs() <= 1e-12 * a.re.max(1.0));
    }
    for m in (0..g.count()).step_by(37) {
        for t in terms_at(&f, &sys, m) {
            assert!(vf.values()[m].re >= t.norm() * (1.0 - 1e-15));
        }
    }
}

#[test]
fn weak_type_estimates() {
    let sys = system();
    let g = *sys.grid();
    let f = span(&sys, &[(2, 1.0), (9, 1.0), (15, -1.0)]);
    let eps = SignSequence::seeded(sys.len(), 1, 3);
    let r1 = weak11_estimate(&sys, &eps, &f).unwrap();
    let r2 = weak11_estimate(&sys, &eps, &f.scale(Complex64::new(2.0, 0.0))).unwrap();
    assert_eq!(r1, r2);
    let plus = SignSequence::all_plus(sys.len());
    // λ |{|f| > λ}| ≤ ‖f‖₂²/λ, so the sup is at most ‖f‖₂ |supp|^{1/2}; use the crude form
    // sup_λ λ|{|g|>λ}| ≤ ‖g‖₂ (2T)^{1/2}.
    let tf = apply_t_eps(&f, &sys, &plus).unwrap();
    let cheb = tf.l2_norm() * (2.0 * g.half_width()).sqrt() / f.l1_norm();
    assert!(weak11_estimate(&sys, &plus, &f).unwrap() <= cheb * (1.0 + 1e-12));
    let spike = SampledFunction::from_real_fn(g, |x| if x.abs() < 0.5 * g.spacing() { 1.0 } else { 0.0 });
    let smooth = SampledFunction::from_real_fn(g, |x| (-x * x).exp());
    let rs = weak11_estimate(&sys, &eps, &spike).unwrap();
    let rm = weak11_estimate(&sys, &eps, &smooth).unwrap();
    assert!(rs <= 2.0 * rm.max(rs / 2.0) && rs < 2.0 * rm.max(1.0), "{rs} vs {rm}");
    assert!(weak11_estimate(&sys, &eps, &SampledFunction::zeros(g)).is_err());
}

#[test]
fn sharp_ratio_is_homogeneous() {
    let sys = system();
    let g = *sys.grid();
    let f = span(&sys, &[(3, 1.0), (12, 0.5)]);
    let eps = SignSequence::seeded(sys.len(), 5, 0);
    let fam = IntervalFamily::new(0.7, g.spacing(), 4.0, 1.25, &g).unwrap();
    let a = sharp_vs_maximal_ratio(&sys, &eps, &f, 0.5, &fam).unwrap();
    let b = sharp_vs_maximal_ratio(&sys, &eps, &f.scale(Complex64::new(-4.0, 0.0)), 0.5, &fam).unwrap();
    assert!((a - b).abs() <= 1e-9 * a);
    assert!(a.is_finite() && a > 0.0);
}

#[test]
fn khintchine_cases() {
    let sys = system();
    let f = span(&sys, &[(0, 1.0), (1, 1.0), (6, -0.3)]);
    let r = khintchine_domination(&f, &sys, 0.2, 4000, 9).unwrap();
    assert!(r.holds(), "{r:?}");
    let z = khintchine_domination(&SampledFunction::zeros(*sys.grid()), &sys, 0.2, 1000, 9).unwrap();
    assert_eq!((z.lhs, z.rhs), (0.0, 0.0));
    let two = khintchine_exhaustive(&[Complex64::new(0.4, -0.3); 2]).unwrap();
    assert!((two.lhs - KHINTCHINE_L * two.mean).abs() < 1e-10);
    assert!(khintchine_domination(&f, &sys, 0.2, 10, 9).is_err());
}

#[test]
fn haar_kernel_size_constant_matches_closed_form() {
    let g = Grid::new(4.0, 1 << 10).unwrap();
    let w = Wavelet::new("haar").unwrap();
    let sys = DyadicSystem::new(&w, Window { j_min: 0, j_max: 0, k_bounds: Some((0, 0)), scaling: None }, &g).unwrap();
    assert_eq!(sys.len(), 1);
    // K(x,y) = ψ(x)ψ(y) with |ψ| = 1 on [0,1), so sup |K||x-y| = 1.
    let k = standard_kernel_constants(&sys, 20000, 4).unwrap();
    assert!((k.c1 - 1.0).abs() < 0.05, "{}", k.c1);
}

#[test]
fn kernel_constants_are_stable_and_sign_blind() {
    let g = Grid::new(32.0, 1 << 12).unwrap();
    let sys = DyadicSystem::new(&Wavelet::new("db6").unwrap(), Window::symmetric(6, 6), &g).unwrap();
    let a = standard_kernel_constants(&sys, 2000, 1).unwrap();
    let b = standard_kernel_constants(&sys, 4000, 1).unwrap();
    assert!((b.c2 - a.c2).abs() <= 0.1 * b.c2, "{} vs {}", a.c2, b.c2);
    assert!((b.c1 - a.c1).abs() <= 0.1 * b.c1);
    assert_eq!(a.c2, a.c3);
    // The per-draw suprema settle near 21..26 (spread about 0.19) and stay there
    // as the sample grows; the bound is uniform in ε but not constant.
    let c = standard_kernel_constants(&sys, 32000, 1).unwrap();
    assert!(c.c2_spread() < 0.25, "{}", c.c2_spread());
    assert!(c.per_draw.iter().all(|d| d.1 <= c.c2 && d.1 >= 0.75 * c.c2));
}

#[test]
fn sweep_on_l2_is_one_and_negation_is_free() {
    let sys = system();
    let l2 = SpaceSpec::lebesgue(2.0).unwrap();
    let r = uniform_bound_sweep(&sys, &l2, 8, 3, 2).unwrap();
    assert!((r.n_hat - 1.0).abs() < 1e-2, "{}", r.n_hat);
    assert_eq!(r.prefix_max(4), r.per_trial[..4].iter().copied().fold(0.0, f64::max));
    let g = *sys.grid();
    let eps = SignSequence::seeded(sys.len(), 3, 0);
    let opts = lab_core::spaces::NormEstimateOptions::with_restarts(2, 1);
    let l4 = SpaceSpec::lebesgue(4.0).unwrap();
    let a = lab_core::spaces::operator_norm_estimate(&TEpsOperator::new(&sys, &eps).unwrap(), &g, &l4, &opts).unwrap();
    let b = lab_core::spaces::operator_norm_estimate(&TEpsOperator::new(&sys, &eps.negated()).unwrap(), &g, &l4, &opts).unwrap();
    assert_eq!(a.value, b.value);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn t_eps_is_an_isometry_on_the_span(
        coefs in proptest::collection::vec((0usize..500, -2.0f64..2.0), 1..8),
        seed in any::<u64>(),
    ) {
        let sys = system();
        let f = span(&sys, &coefs);
        prop_assume!(f.l2_norm() > 1e-6);
        let eps = SignSequence::seeded(sys.len(), seed, 0);
        let r = apply_t_eps(&f, &sys, &eps).unwrap().l2_norm() / f.l2_norm();
        prop_assert!((0.999..=1.001).contains(&r));
    }
}

#[test]
fn single_element_helpers() {
    let g = grid();
    let w = Wavelet::new("db6").unwrap();
    assert!(dyadic_element(&w, 0, 0, &g).unwrap().l2_norm() > 0.99);
}

#[test]
fn unconditionality_probe_on_l2_is_flat() {
    let sys = system();
    let f = span(&sys, &[(0, 1.0), (5, -1.0), (9, 0.5), (30, 2.0)]);
    let l2 = SpaceSpec::lebesgue(2.0).unwrap();
    let r = unconditionality_probe(&f, &sys, &l2, 20, 4).unwrap();
    assert!(r.iter().all(|v| (v - 1.0).abs() < 1e-3));
    let l4 = SpaceSpec::lebesgue(4.0).unwrap();
    let r4 = unconditionality_probe(&f, &sys, &l4, 20, 4).unwrap();
    assert_eq!(r4, unconditionality_probe(&f, &sys, &l4, 20, 4).unwrap());
    assert!(r4.iter().all(|v| v.is_finite() && *v > 0.0));
    assert!(unconditionality_probe(&SampledFunction::zeros(*sys.grid()), &sys, &l2, 2, 0).is_err());
}
