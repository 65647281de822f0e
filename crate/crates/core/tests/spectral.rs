use luttinger_core::operators::involution_i;
use luttinger_core::quadrature::integrate_real;
use luttinger_core::spectral::*;
use luttinger_core::wavefunction::{Grid, Wavefunction};
use luttinger_core::C64;
use std::f64::consts::PI;

fn inverted_gaussian(n_side: usize) -> Wavefunction {
    // I-invariant grid (min_offset·max_offset = 1); Iφ ~ φ(0)/x, so the span must
    // reach far enough that the lost tail 2φ(0)²/max_offset is negligible
    let g = Grid::log_symmetric(0.0, 1e-9, 1e9, n_side).unwrap();
    let phi = Wavefunction::from_fn(&g, |x| C64::new((-x * x / 2.0).exp() / PI.powf(0.25), 0.0));
    involution_i(&phi)
}

#[test]
fn density_of_inverted_gaussian() {
    let psi = inverted_gaussian(2000);
    let energies: Vec<f64> = (0..=800).map(|i| -8.0 + 0.02 * i as f64).collect();
    let d = spectral_density_pi(0.0, &psi, &energies).unwrap();
    assert!(d.warning.is_none(), "{:?}", d.warning);
    for (e, v) in d.energies.iter().zip(&d.density) {
        let exact = (-e * e).exp() / PI.sqrt();
        assert!((v - exact).abs() < 1e-6, "ε={e}: {v} vs {exact}");
    }
    assert!((d.quadrature_mass - 1.0).abs() < 1e-4, "{}", d.quadrature_mass);
    assert!((d.total_mass - 1.0).abs() < 1e-4);
}

#[test]
fn mass_is_theta_invariant() {
    let psi = inverted_gaussian(2000).map(|x, v| v * C64::from_polar(1.0, 0.3 / (x.abs() + 0.1)));
    let energies: Vec<f64> = (0..=1600).map(|i| -16.0 + 0.02 * i as f64).collect();
    let masses: Vec<f64> = [0.0, PI / 3.0, PI]
        .iter()
        .map(|&t| spectral_density_pi(t, &psi, &energies).unwrap().total_mass)
        .collect();
    for m in &masses {
        assert!((m - masses[0]).abs() < 1e-10);
    }
    for &t in &[0.0, PI / 3.0, PI] {
        assert_eq!(idos_interval(t, 1.1, 0.5, 2.0).unwrap(), idos_interval(0.0, 1.1, 0.5, 2.0).unwrap());
    }
}

#[test]
fn unnormalized_input_is_flagged() {
    let psi = inverted_gaussian(300).scaled(C64::new(2.0, 0.0));
    let d = spectral_density_pi(0.0, &psi, &[-1.0, 0.0, 1.0]).unwrap();
    assert!(d.warning.is_some());
    assert!((d.total_mass - 1.0).abs() < 1e-3);
}

#[test]
fn localization_scaling_at_twenty_pairs() {
    let mut count = 0;
    for &x in &[-7.0, -2.5, -0.3, 0.2, 1.0, 4.0, 9.5f64] {
        for &ell in &[0.1, 1.0, 3.0f64] {
            let (a, b) = if x > 0.0 { (x, x + ell) } else { (x - ell, x) };
            let direct = idos_interval(0.0, 2.2, a, b).unwrap();
            let loc = idos_localized(2.2, x, ell).unwrap();
            assert!((direct - loc).abs() <= 1e-15 * direct.abs(), "({x}, {ell})");
            count += 1;
        }
    }
    assert!(count >= 20);
}

#[test]
fn laplacian_dos_integrates_to_idos() {
    for &e in &[0.25f64, 1.0, 7.0] {
        // t = √ε′ removes the endpoint singularity
        let (v, _) = integrate_real(|t| dos_laplacian(t * t).unwrap() * 2.0 * t, 0.0, e.sqrt(), 1e-12).unwrap();
        assert!((v - idos_laplacian(e).unwrap()).abs() < 1e-8);
        assert!((idos_laplacian(e).unwrap() - 2.0 * idos_p(e.sqrt())).abs() < 1e-15);
    }
}
