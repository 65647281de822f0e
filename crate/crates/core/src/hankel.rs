//! Generalized eigenfunctions of `T = −x d²/dx² − d/dx` and the Hankel-type
//! transform they generate.
//!
//! In the variable `t = √|x|` the transform becomes the self-reciprocal
//! order-zero Hankel transform `𝓗g(τ) = ∫₀^∞ J₀(2τt) g(t) 2t dt`, which is what
//! [`HankelNodes`] discretizes.

use crate::error::{domain, Error, Result};
use crate::kernels::Branch;
use crate::quadrature::{gauss_legendre, integrate_with, QuadOptions};
use crate::specfun::j0;
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Support {
    NonNegative,
    NonPositive,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenFunction {
    pub k: f64,
    pub support: Support,
}

impl EigenFunction {
    pub fn new(k: f64) -> Self {
        let support = if k > 0.0 {
            Support::NonNegative
        } else if k < 0.0 {
            Support::NonPositive
        } else {
            Support::All
        };
        Self { k, support }
    }

    pub fn eval(&self, x: f64) -> f64 {
        eigenfunction_psi_k(self.k, x)
    }
}

/// ψ_k(x) = χ(x)·J₀(2√|kx|), with χ the indicator of the half-line of sgn k; ψ₀ ≡ 1.
pub fn eigenfunction_psi_k(k: f64, x: f64) -> f64 {
    if k == 0.0 {
        return 1.0;
    }
    if (k > 0.0 && x < 0.0) || (k < 0.0 && x > 0.0) {
        return 0.0;
    }
    j0(2.0 * (k * x).abs().sqrt())
}

/// `(H±f)(x) = ∫₀^∞ J₀(2√(kx)) f(±k) dk`, x ≥ 0.
///
/// With u = 2√(kx) the integrand becomes `J₀(u) f(±u²/4x) u/(2x)`; the
/// oscillating part is integrated on panels of width π, the rest through
/// the tail map of the adaptive driver.
pub fn hankel_transform<F: Fn(f64) -> C64>(f: F, branch: Branch, x: f64, tol: f64) -> Result<C64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(domain(format!("hankel_transform needs x ≥ 0, got {x}")));
    }
    let s = match branch {
        Branch::Plus => 1.0,
        Branch::Minus => -1.0,
    };
    if x == 0.0 {
        return Ok(integrate_with(|k| f(s * k), 0.0, f64::INFINITY, &QuadOptions::with_tol(tol))?.value);
    }
    let g = |u: f64| f(s * u * u / (4.0 * x)) * (j0(u) * u / (2.0 * x));
    let split = 60.0;
    let head = integrate_with(&g, 0.0, split, &QuadOptions { abs_tol: tol / 2.0, ..QuadOptions::default() }.panel_width(PI))?;
    let tail = integrate_with(&g, split, f64::INFINITY, &QuadOptions { abs_tol: tol / 2.0, ..QuadOptions::default() })?;
    Ok(head.value + tail.value)
}

/// Discrete 𝓗 on the Gauss–Legendre nodes of [0, t_max].
#[derive(Debug, Clone)]
pub struct HankelNodes {
    pub t: Vec<f64>,
    /// Measure weights `2 t_j w_j`.
    pub mu: Vec<f64>,
    /// `J₀(2 t_i t_j)`, row-major.
    kernel: Vec<f64>,
}

impl HankelNodes {
    pub fn new(t_max: f64, n: usize) -> Result<Self> {
        if !(t_max > 0.0) || n == 0 {
            return Err(domain("HankelNodes needs t_max > 0 and n ≥ 1"));
        }
        let (t, w) = gauss_legendre(n, 0.0, t_max);
        let mu: Vec<f64> = t.iter().zip(&w).map(|(t, w)| 2.0 * t * w).collect();
        let mut kernel = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = j0(2.0 * t[i] * t[j]);
                kernel[i * n + j] = v;
                kernel[j * n + i] = v;
            }
        }
        Ok(Self { t, mu, kernel })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// (𝓗g)(t_i) = Σ_j J₀(2t_it_j) g_j μ_j.
    pub fn apply(&self, g: &[C64]) -> Result<Vec<C64>> {
        let n = self.len();
        if g.len() != n {
            return Err(Error::Shape(format!("{} samples for {n} nodes", g.len())));
        }
        let gm: Vec<C64> = g.iter().zip(&self.mu).map(|(g, m)| g * m).collect();
        Ok((0..n)
            .map(|i| {
                let row = &self.kernel[i * n..(i + 1) * n];
                row.iter().zip(&gm).fold(C64::new(0.0, 0.0), |s, (k, v)| s + v * k)
            })
            .collect())
    }
}

/// `∫ ψ_k(x) φ(x) dx` for the packet `φ = ∫ w(s) ψ_s ds`, where
/// `w(s) = exp(−(s−k′)²/(2·width²))` on the half-line of k′.
///
/// By the δ-normalization of ψ_k the exact value is w(k); numerically it is
/// `𝓗[𝓗[w(σ²)]](√|k|)`, both passes on fixed composite Gauss–Legendre nodes.
pub fn orthonormality_smoothed(k: f64, k_prime: f64, width: f64) -> Result<C64> {
    if !(width > 0.0) || !width.is_finite() {
        return Err(domain("width must be positive"));
    }
    if k == 0.0 || k_prime == 0.0 {
        return Err(domain("orthonormality_smoothed needs k, k′ ≠ 0"));
    }
    if k.signum() != k_prime.signum() {
        return Ok(C64::new(0.0, 0.0));
    }
    let (ka, kpa) = (k.abs(), k_prime.abs());
    // support of w in σ: |σ² − k′| ≤ 9·width
    let s_hi = (kpa + 9.0 * width).sqrt();
    let s_lo = (kpa - 9.0 * width).max(0.0).sqrt();
    // in t the packet is a Gaussian envelope of scale ~ σ/width
    let t_max = 8.0 * s_hi / width + 4.0;
    let s_nodes = composite_gl(s_lo, s_hi, PI / (2.0 * t_max));
    let t_nodes = composite_gl(0.0, t_max, PI / (2.0 * (ka.sqrt() + s_hi)));
    let ws: Vec<(f64, f64)> = s_nodes
        .iter()
        .map(|&(s, w)| (s, w * 2.0 * s * (-(s * s - kpa).powi(2) / (2.0 * width * width)).exp()))
        .collect();
    let rk = ka.sqrt();
    let total: f64 = t_nodes
        .iter()
        .map(|&(t, wt)| {
            let packet: f64 = ws.iter().map(|&(s, w)| w * j0(2.0 * s * t)).sum();
            wt * 2.0 * t * j0(2.0 * rk * t) * packet
        })
        .sum();
    Ok(C64::new(total, 0.0))
}

fn composite_gl(a: f64, b: f64, max_width: f64) -> Vec<(f64, f64)> {
    let panels = ((b - a) / max_width).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let (x, w) = gauss_legendre(16, 0.0, h);
    (0..panels)
        .flat_map(|p| {
            let o = a + p as f64 * h;
            x.iter().zip(&w).map(move |(x, w)| (o + x, *w)).collect::<Vec<_>>()
        })
        .collect()
}

/// Options for [`resolvent_via_expansion`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionOptions {
    /// Cutoff K of the k-integral; `None` means `4·10⁴/max(|x|, |y|, 1)`.
    pub k_cutoff: Option<f64>,
    pub tol: f64,
}

impl Default for ExpansionOptions {
    fn default() -> Self {
        Self { k_cutoff: None, tol: 1e-6 }
    }
}

/// Result of the eigen-expansion with its certified remainder bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionResult {
    pub value: C64,
    /// Bound on the neglected tail beyond the leading-order correction plus quadrature error.
    pub remainder_bound: f64,
    pub k_cutoff: f64,
}

/// `∫ ψ_k(x)ψ_k(y)/(k − α) dk`.
///
/// In t = √|k| the finite part is `2∫₀^T t J₀(2ta)J₀(2tb)/(σt² − α) dt`
/// (a = √|x|, b = √|y|, σ the common sign). Beyond T the Bessel product is
/// replaced by its leading Hankel asymptotics and integrated in closed
/// form along a rotated path; the rest of the tail is bounded with
/// `|J₀(z) − lead(z)| ≤ √(2/(πz))/(8z)`.
pub fn resolvent_via_expansion(alpha: C64, x: f64, y: f64, opts: &ExpansionOptions) -> Result<ExpansionResult> {
    if alpha.im == 0.0 {
        return Err(domain("α must be non-real"));
    }
    let sx = crate::sgn(x);
    let sy = crate::sgn(y);
    if sx * sy < 0.0 {
        return Ok(ExpansionResult { value: C64::new(0.0, 0.0), remainder_bound: 0.0, k_cutoff: 0.0 });
    }
    if x == 0.0 && y == 0.0 {
        return Err(domain("the expansion diverges at x = y = 0"));
    }
    let sigma = if sx != 0.0 { sx } else { sy };
    let k_cut = opts.k_cutoff.unwrap_or(4.0e4 / x.abs().max(y.abs()).max(1.0));
    let big_t = k_cut.sqrt();
    let (a, b) = (x.abs().sqrt(), y.abs().sqrt());
    let freq = 2.0 * (a + b);
    let quad = integrate_with(
        |t| C64::new(2.0 * t * j0(2.0 * t * a) * j0(2.0 * t * b), 0.0) / (sigma * t * t - alpha),
        0.0,
        big_t,
        &QuadOptions {
            abs_tol: opts.tol * 0.25,
            rel_tol: 0.0,
            max_panels: 200_000,
            max_panel_width: Some((PI / freq.max(1e-3)).min(1.0)),
        },
    )?;
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let (tail, bound) = if lo == 0.0 {
        // J₀(2t·0) = 1: one oscillating factor, amplitude (2/σ)(πb)^{-1/2} t^{-3/2}
        let amp = 2.0 / (sigma * (PI * hi).sqrt());
        let lead = amp * (C64::from_polar(1.0, -PI / 4.0) * osc_tail(2.0 * hi, big_t, 1.5)?).re;
        let rem = (2.0 / (PI * hi).sqrt()) / (16.0 * hi) * (2.0 / 2.5) * big_t.powf(-2.5)
            + 2.0 * alpha.norm() / (PI * hi).sqrt() / (big_t * big_t - alpha.norm()).max(1e-300) * (2.0 / 1.5) * big_t.powf(-1.5) / big_t;
        (C64::new(lead, 0.0), rem)
    } else {
        // 2t·J₀(2ta)J₀(2tb)/(σt²) ≈ (σ/(π√(ab))) [cos(ω₋t) + sin(ω₊t)]/t²
        let c = sigma / (PI * (a * b).sqrt());
        let wm = 2.0 * (a - b).abs();
        let wp = 2.0 * (a + b);
        let lead = c * (osc_tail(wm, big_t, 2.0)?.re + osc_tail(wp, big_t, 2.0)?.im);
        let ab = (a * b).sqrt();
        let rem = (1.0 / (16.0 * PI * ab * big_t * big_t)) * (1.0 / a + 1.0 / b)
            + 2.0 * alpha.norm() / (3.0 * PI * ab * big_t.powi(3)) * big_t * big_t / (big_t * big_t - alpha.norm()).max(1e-300);
        (C64::new(lead, 0.0), rem)
    };
    let remainder_bound = bound + quad.err_estimate;
    if !(remainder_bound <= opts.tol.max(1e-15) * 1e3) {
        return Err(Error::Accuracy { tol: opts.tol, value: quad.value + tail, err: remainder_bound });
    }
    Ok(ExpansionResult { value: quad.value + tail, remainder_bound, k_cutoff: k_cut })
}

/// `∫_T^∞ e^{iωt} t^{−p} dt` for ω ≥ 0, p > 1, via the path t = T + iu.
fn osc_tail(omega: f64, big_t: f64, p: f64) -> Result<C64> {
    if omega == 0.0 {
        return Ok(C64::new(big_t.powf(1.0 - p) / (p - 1.0), 0.0));
    }
    let r = integrate_with(
        |u| (-omega * u).exp() * C64::new(big_t, u).powf(-p),
        0.0,
        f64::INFINITY,
        &QuadOptions { abs_tol: 1e-16, rel_tol: 1e-13, max_panels: 10_000, max_panel_width: None },
    )?;
    Ok(C64::new(0.0, 1.0) * C64::from_polar(1.0, omega * big_t) * r.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenfunction_support_and_value_at_origin() {
        assert_eq!(eigenfunction_psi_k(3.0, 0.0), 1.0);
        assert_eq!(eigenfunction_psi_k(-3.0, 0.0), 1.0);
        assert_eq!(eigenfunction_psi_k(1.0, -2.0), 0.0);
        assert_eq!(eigenfunction_psi_k(-1.0, 2.0), 0.0);
        assert_eq!(eigenfunction_psi_k(0.0, -7.0), 1.0);
        assert_eq!(EigenFunction::new(-0.1).support, Support::NonPositive);
    }

    #[test]
    fn bessel_ode_residual() {
        // x ψ″ + ψ′ + kψ = 0 by fourth-order central differences
        for &(k, x) in &[(1.0, 2.0), (-0.5, -3.0), (2.5, 0.7)] {
            let h = 1e-3;
            let f = |x: f64| eigenfunction_psi_k(k, x);
            let d1 = (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
            let d2 = (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h * h);
            let r = x * d2 + d1 + k * f(x);
            assert!(r.abs() < 1e-6, "k={k} x={x}: residual {r}");
        }
    }

    #[test]
    fn exponential_is_self_reciprocal() {
        for &x in &[0.0, 0.3, 1.0, 4.0] {
            let v = hankel_transform(|k| C64::new((-k).exp(), 0.0), Branch::Plus, x, 1e-11).unwrap();
            assert!((v.re - (-x).exp()).abs() < 1e-9, "x={x}: {v}");
        }
        let z = hankel_transform(|_| C64::new(0.0, 0.0), Branch::Minus, 1.0, 1e-12).unwrap();
        assert_eq!(z, C64::new(0.0, 0.0));
    }

    #[test]
    fn discrete_transform_is_nearly_involutive() {
        let h = HankelNodes::new(8.0, 600).unwrap();
        let g: Vec<C64> = h.t.iter().map(|t| C64::new((-t * t).exp() * (1.0 + t * t), 0.0)).collect();
        let back = h.apply(&h.apply(&g).unwrap()).unwrap();
        let err = g.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn smoothed_orthonormality() {
        assert_eq!(orthonormality_smoothed(1.0, -1.0, 0.1).unwrap(), C64::new(0.0, 0.0));
        for &w in &[0.5, 0.25, 0.125] {
            let same = orthonormality_smoothed(1.0, 1.0, w).unwrap();
            assert!((same.re - 1.0).abs() < 1e-6, "width {w}: {same}");
        }
        let off = orthonormality_smoothed(1.0, 2.0, 0.125).unwrap();
        assert!(off.norm() < 0.05, "{off}");
        // packet profile reproduced off-centre
        let v = orthonormality_smoothed(-1.2, -1.0, 0.25).unwrap();
        assert!((v.re - (-0.32f64).exp()).abs() < 1e-6, "{v}");
    }

    #[test]
    fn expansion_symmetries() {
        let o = ExpansionOptions::default();
        let v = resolvent_via_expansion(C64::new(0.0, 1.0), 1.0, -2.0, &o).unwrap();
        assert_eq!(v.value, C64::new(0.0, 0.0));
        let a = resolvent_via_expansion(C64::new(0.5, 1.0), 1.0, 2.0, &o).unwrap().value;
        let b = resolvent_via_expansion(C64::new(0.5, -1.0), 1.0, 2.0, &o).unwrap().value;
        assert!((a - b.conj()).norm() < 1e-9);
        assert!(resolvent_via_expansion(C64::new(0.5, 1.0), 0.0, 0.0, &o).is_err());
    }

    #[test]
    fn second_closed_form_pair() {
        // k e^{−k} ↦ (1 − x) e^{−x}
        for i in 0..10 {
            let x = 0.37 * i as f64;
            let v = hankel_transform(|k| C64::new(k * (-k).exp(), 0.0), Branch::Plus, x, 1e-11).unwrap();
            assert!((v.re - (1.0 - x) * (-x).exp()).abs() < 1e-8, "x={x}: {v}");
        }
    }

    #[test]
    fn expansion_matches_closed_kernel_and_laplace() {
        use crate::kernels::{kernel_z, kernel_z_laplace, DEFAULT_VARIANT};
        let o = ExpansionOptions::default();
        for &(a, x, y) in &[((0.0, 1.0), 1.0, 2.0), ((1.0, 0.5), 0.4, 2.3), ((-0.7, -1.0), -1.0, -0.4), ((0.3, 2.0), 1e-3, 1.0)] {
            let alpha = C64::new(a.0, a.1);
            let e = resolvent_via_expansion(alpha, x, y, &o).unwrap();
            let z = kernel_z(alpha, x, y, DEFAULT_VARIANT).unwrap();
            let l = kernel_z_laplace(alpha, x, y, 1e-9).unwrap();
            assert!((e.value - z).norm() < 1e-4, "α={alpha} ({x},{y}): {} vs {z}", e.value);
            assert!((e.value - l).norm() < 1e-4);
            assert!(e.remainder_bound < 1e-4);
        }
        // on the support edge the expansion gives the one-sided limit; the closed
        // kernel carries sgn(0) = 0 and returns the two-sided average
        let alpha = C64::new(0.3, 2.0);
        let e = resolvent_via_expansion(alpha, 0.0, 1.0, &o).unwrap().value;
        let right = kernel_z(alpha, 1e-12, 1.0, DEFAULT_VARIANT).unwrap();
        let edge = kernel_z(alpha, 0.0, 1.0, DEFAULT_VARIANT).unwrap();
        assert!((e - right).norm() < 1e-4, "{e} vs {right}");
        assert!((edge - right * 0.5).norm() < 1e-4);
    }
}
