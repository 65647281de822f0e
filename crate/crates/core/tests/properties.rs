//! Cross-module invariants: random-sample identities and the unitarity suite.

use luttinger_core::kernels::{kernel_b, kernel_u, pv_identity_xy};
use luttinger_core::operators::*;
use luttinger_core::quadrature::{gauss_legendre, integrate_adaptive, integrate_real, integrate_with, pv_limit, PvSchedule, QuadOptions};
use luttinger_core::specfun::{i0, j0, kelvin_k};
use luttinger_core::wavefunction::{fourier, Grid, Wavefunction};
use luttinger_core::C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn i0_on_imaginary_axis_is_j0(x in -30.0f64..30.0) {
        prop_assert!((i0(C64::new(0.0, x)) - j0(x)).norm() < 1e-10);
    }

    #[test]
    fn b_kernel_matches_pv_identity(x in -50.0f64..50.0, y in -50.0f64..50.0) {
        prop_assert!((kernel_b(x, y) - pv_identity_xy(x, y) / (2.0 * PI)).norm() < 1e-14);
    }
}

fn test_integrand(p: [f64; 4]) -> impl Fn(f64) -> C64 {
    move |x: f64| C64::new((p[0] * x).sin() * (-p[1] * x * x).exp(), p[2] / (1.0 + (x - p[3]).powi(2)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadrature_is_additive(
        p in prop::array::uniform4(0.1f64..3.0),
        a in -4.0f64..0.0,
        len in 0.5f64..8.0,
        frac in 0.05f64..0.95,
    ) {
        let f = test_integrand(p);
        let (b, c) = (a + len, a + frac * len);
        let whole = integrate_adaptive(&f, a, b, 1e-11).unwrap();
        let left = integrate_adaptive(&f, a, c, 1e-11).unwrap();
        let right = integrate_adaptive(&f, c, b, 1e-11).unwrap();
        let gap = (left.value + right.value - whole.value).norm();
        let budget = left.err_estimate + right.err_estimate + whole.err_estimate
            + 8.0 * f64::EPSILON * (left.value.norm() + right.value.norm() + whole.value.norm());
        prop_assert!(gap <= budget, "gap {gap:e} > {budget:e}");
    }

    #[test]
    fn quadrature_is_linear(
        p in prop::array::uniform4(0.1f64..3.0),
        q in prop::array::uniform4(0.1f64..3.0),
        alpha in -3.0f64..3.0,
        beta in -3.0f64..3.0,
    ) {
        let (f, g) = (test_integrand(p), test_integrand(q));
        let h = |x: f64| f(x) * alpha + g(x) * beta;
        // fixed panels: linear up to rounding
        let (xs, ws) = gauss_legendre(40, -2.0, 3.0);
        let rule = |u: &dyn Fn(f64) -> C64| xs.iter().zip(&ws).fold(C64::new(0.0, 0.0), |s, (x, w)| s + u(*x) * *w);
        let lhs = rule(&h);
        let rhs = rule(&f) * alpha + rule(&g) * beta;
        prop_assert!((lhs - rhs).norm() < 1e-13 * (1.0 + lhs.norm()));
        // adaptive: within the error estimates
        let ia = integrate_adaptive(&h, -2.0, 3.0, 1e-12).unwrap();
        let fa = integrate_adaptive(&f, -2.0, 3.0, 1e-12).unwrap();
        let ga = integrate_adaptive(&g, -2.0, 3.0, 1e-12).unwrap();
        let budget = ia.err_estimate + alpha.abs() * fa.err_estimate + beta.abs() * ga.err_estimate + 1e-14;
        prop_assert!((ia.value - fa.value * alpha - ga.value * beta).norm() <= budget);
    }
}

#[test]
fn kelvin_functions_are_square_integrable() {
    let (v, err) = integrate_real(|x| kelvin_k(x).norm_sqr(), 0.0, f64::INFINITY, 1e-10).unwrap();
    assert!(v.is_finite() && v > 0.0 && err < 1e-9, "{v} ± {err}");
    // the tail beyond 40 is below e^{−√2·40}
    let (tail, _) = integrate_real(|x| kelvin_k(x).norm_sqr(), 40.0, f64::INFINITY, 1e-14).unwrap();
    assert!(tail < 1e-24);
}

#[test]
fn fourier_matches_direct_quadrature() {
    let psi_fn = |x: f64| C64::new(1.0, 0.3) * x * (-(x - 0.5).powi(2) / 2.0).exp();
    let g = Grid::uniform(-20.0, 20.0, 2001).unwrap();
    let psi = Wavefunction::from_fn(&g, psi_fn);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut ks: Vec<f64> = (0..20).map(|_| rng.gen_range(-6.0..6.0)).collect();
    ks.sort_by(f64::total_cmp);
    let out = fourier(&psi, &Grid::from_points(ks.clone()).unwrap());
    let opts = QuadOptions::with_tol(1e-13).panel_width(1.0);
    for (k, v) in ks.iter().zip(&out.values) {
        let direct = integrate_with(|x| psi_fn(x) * C64::from_polar(1.0, -k * x), -20.0, 20.0, &opts).unwrap().value
            / (2.0 * PI).sqrt();
        assert!((v - direct).norm() < 1e-7, "k={k}: {v} vs {direct}");
    }
}

#[test]
fn plancherel_on_hermite_states() {
    let g = Grid::uniform(-25.0, 25.0, 2501).unwrap();
    let kg = Grid::uniform(-25.0, 25.0, 2501).unwrap();
    for n in 0..5 {
        // Hermite functions by the three-term recurrence
        let h = |x: f64| {
            let (mut a, mut b) = (0.0, PI.powf(-0.25) * (-x * x / 2.0).exp());
            for k in 0..n {
                let c = x * (2.0 / (k as f64 + 1.0)).sqrt() * b - (k as f64 / (k as f64 + 1.0)).sqrt() * a;
                a = b;
                b = c;
            }
            C64::new(b, 0.0)
        };
        let psi = Wavefunction::from_fn(&g, |x| h(x) * C64::from_polar(1.0, 0.7 * x));
        let f = fourier(&psi, &kg);
        assert!((f.norm() - psi.norm()).abs() < 1e-6, "n={n}");
        assert!((psi.norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn pv_oracle_matches_closed_form_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..25 {
        let (x, y): (f64, f64) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let f = move |u: f64| C64::from_polar(1.0, x * u - y / u) / u;
        let v = pv_limit(f, &PvSchedule::scaled(x.abs(), y.abs()), 1e-6).unwrap();
        let closed = pv_identity_xy(x, y);
        assert!((v - closed).norm() < 1e-4, "({x}, {y}): {v} vs {closed}");
    }
}

#[test]
fn propagator_kernel_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let tau: f64 = rng.gen_range(-10.0..10.0);
        let (x, y) = (rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
        if tau == 0.0 {
            continue;
        }
        assert!(tau.abs() * kernel_u(tau, x, y).unwrap().norm() <= 1.0 + 1e-12);
    }
}

#[test]
fn core_action_on_zero_is_kappa1() {
    let p = ThermalParams::new(1.3).unwrap();
    let g = Grid::uniform(-4.01, 6.0, 1001).unwrap();
    let k = kappa_functions(p);
    let out = apply_ht_core(p, &Wavefunction::zeros(&g), C64::new(1.0, 0.0)).unwrap();
    for (x, v) in g.points().iter().zip(&out.values) {
        assert_eq!(*v, C64::new(k.kappa1(*x).unwrap(), 0.0));
    }
}

/// The five canonical states of the unitarity suite.
fn canonical(g: &Grid) -> Vec<Wavefunction> {
    let fs: [Box<dyn Fn(f64) -> C64>; 5] = [
        Box::new(|x| C64::new((-x * x / 2.0).exp(), 0.0)),
        Box::new(|x| C64::from_polar((-(x - 1.5f64).powi(2) / 0.72).exp(), 0.8 * x)),
        Box::new(|x| C64::new(x * (-x * x / 2.0).exp(), 0.0)),
        Box::new(|x| C64::new(1.0, x) * (-(x + 1.0f64).powi(2) / 2.0).exp()),
        Box::new(|x| C64::from_polar(1.0 / x.cosh(), 0.3 * x)),
    ];
    fs.iter().map(|f| Wavefunction::from_fn(g, f).normalized().unwrap()).collect()
}

#[test]
fn unitarity_suite() {
    let rel = |a: &Wavefunction, b: &Wavefunction| (a.norm() - b.norm()).abs();

    // I on an I-invariant grid
    let g = Grid::log_symmetric(0.0, 1e-6, 1e6, 1500).unwrap();
    for psi in canonical(&g) {
        assert!(rel(&involution_i(&psi), &psi) < 1e-6);
        assert!(rel(&phase_l(1.7, &psi), &psi) < 1e-15);
    }
    // S_λ is a grid shift
    let p = ThermalParams::new(0.9).unwrap();
    let g = Grid::uniform(-20.0, 20.0, 1601).unwrap();
    for psi in canonical(&g) {
        assert!(rel(&translate_s(p, &psi).unwrap(), &psi) < 1e-15);
    }
    // V_θ(t)
    let g = Grid::uniform(-30.0, 30.0, 12001).unwrap();
    for psi in canonical(&g) {
        let v = propagate_v(FlowParams::new(0.8, 0.05).unwrap(), &psi);
        assert!(rel(&v, &psi) < 1e-6, "{}", rel(&v, &psi));
    }
    // U_T(t) on the square-root grid
    let o = HtOptions::default();
    let g = Grid::square_root(p.critical_point(), o.t_max, o.nodes).unwrap();
    for psi in canonical(&g) {
        let u = propagate_ht(p, 0.3, &psi, HtBackend::Conjugation, &o).unwrap();
        assert!(rel(&u, &psi) < 1e-5, "{}", rel(&u, &psi));
    }
    // N_θ on a log grid wide enough for the 1/x tail of 𝐇ψ
    let g = Grid::log_symmetric(0.0, 1e-4, 1e6, 1200).unwrap();
    for psi in canonical(&g) {
        let n = intertwiner_n(2.1, &psi);
        assert!(rel(&n, &psi) < 1e-4, "{}", rel(&n, &psi));
    }
}
