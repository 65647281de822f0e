//! Spectral measures of Π_θ and the densities of states of p, p² and Π_θ.
//!
//! States of negative energy are counted negatively: every IDOS below is odd in ε.

use crate::error::{domain, Result};
use crate::operators::{involution_i, phase_l};
use crate::wavefunction::{fourier, Grid, Wavefunction};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensity {
    pub energies: Vec<f64>,
    pub density: Vec<f64>,
    /// ‖L_θ*Iψ‖² by position-space Plancherel; exactly θ-independent.
    pub total_mass: f64,
    /// Trapezoid integral of `density` over `energies`.
    pub quadrature_mass: f64,
    pub warning: Option<String>,
}

/// μ_ψ^θ(dε)/dε = |F(L_θ* I ψ)(ε)|².
///
/// The state is normalized first; a warning records the original norm if it
/// was off by more than 1e-8. An I-invariant grid (log-symmetric about 0 with
/// min_offset·max_offset = 1) makes the involution exact.
pub fn spectral_density_pi(theta: f64, psi: &Wavefunction, energies: &[f64]) -> Result<SpectralDensity> {
    let out = Grid::from_points(energies.to_vec())?;
    let n = psi.norm();
    let mut warning = None;
    let psi = if (n - 1.0).abs() > 1e-8 {
        warning = Some(format!("input norm {n:.6e}; normalized before use"));
        psi.normalized()?
    } else {
        psi.clone()
    };
    let chi = phase_l(-theta, &involution_i(&psi));
    if let Some(w) = chi.meta.get("warning") {
        warning = Some(match warning {
            Some(prev) => format!("{prev}; {w}"),
            None => w.clone(),
        });
    }
    let ft = fourier(&chi, &out);
    if let Some(w) = ft.meta.get("warning") {
        warning = Some(match warning {
            Some(prev) => format!("{prev}; {w}"),
            None => w.clone(),
        });
    }
    let density: Vec<f64> = ft.values.iter().map(C64::norm_sqr).collect();
    let quadrature_mass = density.iter().zip(out.weights()).map(|(d, w)| d * w).sum();
    Ok(SpectralDensity { energies: energies.to_vec(), density, total_mass: chi.norm_sqr(), quadrature_mass, warning })
}

/// IDOS of p: ε/(2π).
pub fn idos_p(eps: f64) -> f64 {
    eps / (2.0 * PI)
}

/// sgn(ε)/|Λ|·Tr(P_ε^θ Q_Λ) = ε/(2π·a·b) for Λ = [a, b] with ab > 0; θ-independent.
pub fn idos_interval(_theta: f64, eps: f64, a: f64, b: f64) -> Result<f64> {
    if !(a * b > 0.0) || !(b > a) {
        return Err(domain(format!("interval [{a}, {b}] must satisfy a < b and ab > 0")));
    }
    Ok(eps / (2.0 * PI * a * b))
}

/// The same number obtained through the involution: I maps Q_[a,b] to
/// Q_[1/b,1/a], where p has IDOS ε/(2π), rescaled by the volume ratio.
pub fn idos_interval_via_transform(eps: f64, a: f64, b: f64) -> Result<f64> {
    if !(a * b > 0.0) || !(b > a) {
        return Err(domain(format!("interval [{a}, {b}] must satisfy a < b and ab > 0")));
    }
    Ok((1.0 / a - 1.0 / b) / (b - a) * idos_p(eps))
}

/// IDOS over Λ_{x,ℓ} = [x, x+ℓ] (x > 0) or [x−ℓ, x] (x < 0): ε/(2π(x² + |x|ℓ)).
pub fn idos_localized(eps: f64, x: f64, ell: f64) -> Result<f64> {
    if x == 0.0 || !(ell > 0.0) {
        return Err(domain("localization needs x ≠ 0 and ℓ > 0"));
    }
    Ok(eps / (2.0 * PI * (x * x + x.abs() * ell)))
}

/// Truncated Fourier-basis sum with its tail bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumSum {
    pub value: f64,
    pub tail_bound: f64,
}

/// g_L(ε) ≈ (1/2π) Σ_{|n|≤N} sinc²(εL − πn).
///
/// With a = εL/π the neglected terms are bounded by
/// (1/2π)(sin(εL)/π)²·2/(N − |a|) when N > |a|.
pub fn idos_momentum_sum(eps: f64, l: f64, n_max: usize) -> Result<MomentumSum> {
    if !(l > 0.0) || n_max == 0 {
        return Err(domain("momentum sum needs L > 0 and n_max ≥ 1"));
    }
    let el = eps * l;
    let n = n_max as i64;
    let mut s = 0.0;
    // small terms first
    for k in (0..=n).rev() {
        for m in if k == 0 { vec![0] } else { vec![k, -k] } {
            let u = el - PI * m as f64;
            s += if u == 0.0 { 1.0 } else { (u.sin() / u).powi(2) };
        }
    }
    let a = el / PI;
    let tail = if (n_max as f64) > a.abs() {
        (el.sin() / PI).powi(2) * 2.0 / (n_max as f64 - a.abs()) / (2.0 * PI)
    } else {
        f64::INFINITY
    };
    Ok(MomentumSum { value: s / (2.0 * PI), tail_bound: tail })
}

/// pv-IDOS of Π_θ: ε/(2π) for every θ.
pub fn pv_idos(_theta: f64, eps: f64) -> f64 {
    idos_p(eps)
}

/// The pv-IDOS before the limit: L/(2(L²−1))·sgn(ε)·Tr(P_ε Q′_L) with
/// Q′_L = Q_[−L,L] − Q_[−1/L,1/L], assembled from the interval traces.
pub fn pv_idos_window(theta: f64, eps: f64, l: f64) -> Result<f64> {
    if !(l > 1.0) {
        return Err(domain("the pv window needs L > 1"));
    }
    let inv = 1.0 / l;
    // sgn(ε)·Tr(P Q_Λ) = |Λ|·𝒩_Λ(ε)
    let right = (l - inv) * idos_interval(theta, eps, inv, l)?;
    let left = (l - inv) * idos_interval(theta, eps, -l, -inv)?;
    Ok(l / (2.0 * (l * l - 1.0)) * (right + left))
}

/// DOS of p²: 1/(2π√ε), ε > 0.
pub fn dos_laplacian(eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(domain(format!("the Laplacian DOS needs ε > 0, got {eps}")));
    }
    Ok(1.0 / (2.0 * PI * eps.sqrt()))
}

/// IDOS of p²: √ε/π = 2·𝒩^p(√ε), ε ≥ 0.
pub fn idos_laplacian(eps: f64) -> Result<f64> {
    if !(eps >= 0.0) {
        return Err(domain(format!("the Laplacian IDOS needs ε ≥ 0, got {eps}")));
    }
    Ok(2.0 * idos_p(eps.sqrt()))
}
