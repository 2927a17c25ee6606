use brlab::calculus::{heat, kernel, square_tdelta, tdelta_l2_constant, OperatorHandle, TGrid};
use brlab::symbols::{br_symbol, bumps, subordination_check};
use brlab::{ArgumentKind, MetricMeasureSpace, SlopeFit, SpectralModel, Symbol};
use proptest::prelude::*;
use std::sync::OnceLock;

fn torus() -> &'static SpectralModel {
    static M: OnceLock<SpectralModel> = OnceLock::new();
    M.get_or_init(|| SpectralModel::torus(1, 16, 48).unwrap())
}

fn interval() -> &'static SpectralModel {
    static M: OnceLock<SpectralModel> = OnceLock::new();
    M.get_or_init(|| SpectralModel::interval_dirichlet(16, 48).unwrap())
}

fn rel_gap(a: &brlab::Field, b: &brlab::Field) -> f64 {
    a.sub(b).max_abs() / a.max_abs().max(b.max_abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn heat_composes_in_quadrature(s in 0.01f64..1.0, t in 0.01f64..1.0, seed in 0u64..1000, on_torus: bool) {
        let m = if on_torus { torus() } else { interval() };
        let f = m.random_band_limited(seed, false);
        let two_steps = heat(m, s).unwrap().apply(&heat(m, t).unwrap().apply(&f).unwrap()).unwrap();
        let one_step = heat(m, s.hypot(t)).unwrap().apply(&f).unwrap();
        prop_assert!(rel_gap(&two_steps, &one_step) < 1e-12);
    }

    #[test]
    fn composition_multiplies_symbols(alpha in 0.0f64..3.0, r in 1.0f64..6.0, t in 0.0f64..2.0, seed in 0u64..1000) {
        let m = torus();
        let a = OperatorHandle::from_symbol(m, &br_symbol(alpha, r).unwrap()).unwrap();
        let b = heat(m, t).unwrap();
        let f = m.random_band_limited(seed, false);
        let lhs = a.compose(&b).apply(&f).unwrap();
        let rhs = a.apply(&b.apply(&f).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).max_abs() <= 1e-12 * f.max_abs().max(1.0));
    }

    #[test]
    fn kernel_path_matches_spectral_path(t in 0.05f64..1.0, seed in 0u64..1000) {
        let m = interval();
        let sym = Symbol::real("heat", ArgumentKind::OfL, None, move |l| (-t * t * l).exp());
        let k = kernel(m, &sym, 1 << 20).unwrap();
        let f = m.random_band_limited(seed, false);
        let spectral = heat(m, t).unwrap().apply(&f).unwrap();
        prop_assert!(rel_gap(&k.apply(&f).unwrap(), &spectral) < 1e-10);
        prop_assert!(k.hermitian_defect() < 1e-10);
    }

    #[test]
    fn band_limited_fields_round_trip(seed in 0u64..10_000, on_torus: bool) {
        let m = if on_torus { torus() } else { interval() };
        let f = m.random_band_limited(seed, false);
        let back = m.synthesis(&m.analysis(&f).unwrap()).unwrap();
        prop_assert!(rel_gap(&back, &f) < 1e-10);
    }

    #[test]
    fn subordination_residual_is_tiny(rho in -0.4f64..2.0, gap in 0.55f64..3.0, r in 0.5f64..3.0) {
        let grid: Vec<f64> = (0..7).map(|i| (r * i as f64 / 6.0).min(r)).collect();
        prop_assert!(subordination_check(rho + gap, rho, r, &grid).unwrap() <= 1e-8);
    }

    #[test]
    fn power_laws_fit_exactly(e in -3.0f64..3.0, c in 0.1f64..10.0) {
        let xs: Vec<f64> = (0..8).map(|i| 2f64.powi(i)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| c * x.powf(e)).collect();
        let fit = SlopeFit::from_points(&xs, &ys).unwrap();
        prop_assert!((fit.exponent - e).abs() < 1e-10);
        prop_assert!(fit.stderr < 1e-8);
    }

    #[test]
    fn nets_are_exact_on_uniform_grids(n in 16usize..96, cells in 2.0f64..12.0, two_d: bool) {
        let s = if two_d {
            MetricMeasureSpace::torus_grid(2, n / 4 + 4).unwrap()
        } else {
            MetricMeasureSpace::torus_grid(1, n).unwrap()
        };
        let net = s.build_net(cells * s.distance(0, 1)).unwrap();
        prop_assert_eq!(s.net_violations(&net), 0);
        prop_assert!(s.overlap_count(&net) <= 41usize.pow(s.dim() as u32));
    }
}

#[test]
fn square_function_l2_law_on_interval() {
    let m = interval();
    let phi = bumps::mollifier_symbol();
    for delta in [0.25, 0.0625] {
        let want = tdelta_l2_constant(delta, &phi).unwrap();
        let grid = TGrid::for_model(m, delta, 64.0);
        for seed in 0..4 {
            let f = m.random_band_limited(seed, true);
            let t = square_tdelta(m, delta, &phi, &f, &grid).unwrap();
            let got = m.space().lp_norm(&t, 2.0).unwrap() / m.space().lp_norm(&f, 2.0).unwrap();
            assert!((got - want).abs() < 1e-6, "delta {delta}: {got} vs {want}");
        }
    }
}

#[test]
fn zeroth_order_riesz_mean_is_the_spectral_projection() {
    let m = torus();
    let f = m.random_band_limited(3, false);
    let r = 5.5;
    let mean = OperatorHandle::from_symbol(m, &br_symbol(0.0, r).unwrap()).unwrap().apply(&f).unwrap();
    let c = m.analysis(&f).unwrap();
    let mut kept = c.clone();
    for (k, l) in m.eigenvalues().iter().enumerate() {
        if *l >= r * r {
            kept.0[k] = num_complex::Complex64::new(0.0, 0.0);
        }
    }
    let proj = m.synthesis(&kept).unwrap();
    assert!(rel_gap(&mean, &proj) < 1e-12);
}
