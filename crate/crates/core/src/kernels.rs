//! Closed-form integral kernels and their numerical oracles.

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate_with, laplace_transform_ray, QuadOptions};
use crate::specfun::{bessel_k0, i0, j0, j0_complex_scaled};
use crate::{heaviside, sgn, C64, I};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, PI};

/// Sign conventions used throughout: sgn(0) = 0 and Θ(0) = 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignConvention {
    pub sgn0: f64,
    pub theta0: f64,
}

pub const SIGN_CONVENTION: SignConvention = SignConvention { sgn0: 0.0, theta0: 0.5 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

/// `P∫ G_s^±(u) du` with `G_s^±(u) = e^{is(u ± 1/u)}/u`.
pub fn pv_identity_g(s: f64, branch: Branch) -> C64 {
    match branch {
        Branch::Plus => I * (2.0 * PI * sgn(s) * j0(2.0 * s.abs())),
        Branch::Minus => C64::new(0.0, 0.0),
    }
}

/// `P∫ e^{ixu − iy/u}/u du = 2πi·(sgn x − sgn y)/2·J₀(2√|xy|)`.
pub fn pv_identity_xy(x: f64, y: f64) -> C64 {
    // J₀ through the modified Bessel route, independent of kernel_b
    let jv = i0(C64::new(0.0, 2.0 * (x * y).abs().sqrt())).re;
    I * (PI * (sgn(x) - sgn(y)) * jv)
}

/// 𝔹(x, y) = i·(sgn x − sgn y)/2·J₀(2√|xy|).
pub fn kernel_b(x: f64, y: f64) -> C64 {
    let s = 0.5 * (sgn(x) - sgn(y));
    if s == 0.0 {
        return C64::new(0.0, 0.0);
    }
    I * (s * j0(2.0 * (x * y).abs().sqrt()))
}

/// 𝕌_τ(x, y) = (sgn x + sgn y)/(2iτ)·e^{i(x+y)/τ}·J₀(2√|xy|/τ).
pub fn kernel_u(tau: f64, x: f64, y: f64) -> Result<C64> {
    if tau == 0.0 || !tau.is_finite() {
        return Err(domain(format!("kernel_u needs finite τ ≠ 0, got {tau}")));
    }
    let s = sgn(x) + sgn(y);
    if s == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let phase = C64::from_polar(1.0, (x + y) / tau);
    Ok(phase * j0(2.0 * (x * y).abs().sqrt() / tau) * (s / 2.0) / (I * tau))
}

/// Analytic continuation of 𝕌_τ(x, y) to complex τ, computed with an
/// exponent-scaled J₀ so that large |1/τ| does not overflow.
pub fn kernel_u_complex(tau: C64, x: f64, y: f64) -> C64 {
    let s = sgn(x) + sgn(y);
    if s == 0.0 || tau == C64::new(0.0, 0.0) {
        return C64::new(0.0, 0.0);
    }
    let inv = tau.inv();
    let w = inv * (2.0 * (x * y).abs().sqrt());
    let expo = I * inv * (x + y) + w.im.abs();
    expo.exp() * j0_complex_scaled(w) * (s / 2.0) / (I * tau)
}

/// Which closed form is used for F_α.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FVariant {
    /// Both Bessel factors at min{|x|,|y|}, phase from sgn(x) alone.
    Printed,
    /// I₀ at min{|x|,|y|}, K₀ at max{|x|,|y|}, phase from the common sign.
    MinMax,
}

/// Variant shipped as default; confirmed by [`select_variant`].
pub const DEFAULT_VARIANT: FVariant = FVariant::MinMax;

fn check_alpha(alpha: C64) -> Result<()> {
    if !(alpha.im != 0.0 && alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(domain(format!("α must be finite and non-real, got {alpha}")));
    }
    Ok(())
}

/// F_α(x, y); for Im α < 0 the value is `conj F_ᾱ(x, y)`.
pub fn kernel_f_alpha(alpha: C64, x: f64, y: f64, variant: FVariant) -> Result<C64> {
    check_alpha(alpha)?;
    if alpha.im < 0.0 {
        return kernel_f_alpha(alpha.conj(), x, y, variant).map(|v| v.conj());
    }
    let r = alpha.norm();
    let phi = alpha.arg();
    let (lo, hi) = (x.abs().min(y.abs()), x.abs().max(y.abs()));
    match variant {
        FVariant::Printed => {
            let ph = C64::from_polar(1.0, phi / 2.0 - FRAC_PI_4 * (sgn(x) + 1.0));
            let z = ph * (2.0 * (r * lo).sqrt());
            Ok(i0(z) * bessel_k0(z)?)
        }
        FVariant::MinMax => {
            let ph = C64::from_polar(1.0, phi / 2.0 - FRAC_PI_4 * (sgn(x + y) + 1.0));
            let zi = ph * (2.0 * (r * lo).sqrt());
            let zk = ph * (2.0 * (r * hi).sqrt());
            Ok(i0(zi) * bessel_k0(zk)?)
        }
    }
}

/// ℤ_α(x, y) = (sgn x + sgn y)·F_α(x, y).
pub fn kernel_z(alpha: C64, x: f64, y: f64, variant: FVariant) -> Result<C64> {
    check_alpha(alpha)?;
    let s = sgn(x) + sgn(y);
    if s == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    Ok(kernel_f_alpha(alpha, x, y, variant)? * s)
}

/// Quadrature oracle for ℤ_α: `i∫₀^∞ e^{iατ}𝕌_τ dτ` for Im α > 0 and
/// `−i∫₀^∞ e^{−iατ}𝕌_{−τ} dτ` for Im α < 0, each along a rotated ray on which
/// the integrand decays at both ends.
pub fn kernel_z_laplace(alpha: C64, x: f64, y: f64, tol: f64) -> Result<C64> {
    check_alpha(alpha)?;
    if sgn(x) + sgn(y) == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let bound = ((x + y).abs() + 2.0 * (x * y).abs().sqrt()).exp();
    let upper = alpha.im > 0.0;
    let phi = if upper { alpha.arg() } else { (-alpha).arg() };
    let forward = x + y > 0.0;
    // the ray must keep both e^{±iατ} and the kernel factor e^{i(x+y)/τ}J₀(·/τ) bounded
    let psi = if forward == upper { -phi / 2.0 } else { (PI - phi) / 2.0 };
    if upper {
        Ok(laplace_transform_ray(|t| kernel_u_complex(t, x, y), alpha, psi, bound, tol)?.value)
    } else {
        let v = laplace_transform_ray(|t| kernel_u_complex(-t, x, y), -alpha, psi, bound, tol)?.value;
        Ok(-v)
    }
}

/// One lattice point of a variant conformance run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConformanceEntry {
    pub alpha: [f64; 2],
    pub x: f64,
    pub y: f64,
    pub oracle: [f64; 2],
    pub printed: Option<[f64; 2]>,
    pub minmax: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConformanceReport {
    pub tolerance: f64,
    pub entries: Vec<ConformanceEntry>,
    pub max_dev_printed: f64,
    pub max_dev_minmax: f64,
    pub selected: Option<FVariant>,
}

pub const CONFORMANCE_LATTICE: [f64; 5] = [-2.0, -0.7, 0.4, 1.0, 2.3];

/// Compares both F_α variants with the Laplace oracle on the 5×5 lattice and
/// selects the one within `tol` everywhere (MinMax preferred on a tie).
pub fn select_variant(alphas: &[C64], tol: f64) -> Result<ConformanceReport> {
    let c = |v: C64| [v.re, v.im];
    let mut entries = Vec::new();
    let (mut dp, mut dm) = (0.0f64, 0.0f64);
    for &a in alphas {
        for &x in &CONFORMANCE_LATTICE {
            for &y in &CONFORMANCE_LATTICE {
                let oracle = kernel_z_laplace(a, x, y, tol * 1e-2)?;
                let p = kernel_z(a, x, y, FVariant::Printed).ok();
                let m = kernel_z(a, x, y, FVariant::MinMax).ok();
                dp = dp.max(p.map_or(f64::INFINITY, |v| (v - oracle).norm()));
                dm = dm.max(m.map_or(f64::INFINITY, |v| (v - oracle).norm()));
                entries.push(ConformanceEntry { alpha: c(a), x, y, oracle: c(oracle), printed: p.map(c), minmax: m.map(c) });
            }
        }
    }
    let selected = if dm <= tol {
        Some(FVariant::MinMax)
    } else if dp <= tol {
        Some(FVariant::Printed)
    } else {
        None
    };
    Ok(ConformanceReport { tolerance: tol, entries, max_dev_printed: dp, max_dev_minmax: dm, selected })
}

/// Green function of p = −i d/dx: `±iΘ(±(x−y))e^{iε(x−y)}e^{−δ|x−y|}` at ζ = ε ± iδ.
pub fn kernel_green_p(zeta: C64, x: f64, y: f64) -> Result<C64> {
    if zeta.im == 0.0 || !zeta.im.is_finite() {
        return Err(domain(format!("kernel_green_p needs non-real ζ, got {zeta}")));
    }
    let s = sgn(zeta.im);
    let d = x - y;
    let th = heaviside(s * d);
    if th == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    Ok(I * s * th * C64::from_polar((-zeta.im.abs() * d.abs()).exp(), zeta.re * d))
}

/// Resolvent kernel of Π_θ at ζ = ε ± iδ.
pub fn kernel_resolvent_pi(theta: f64, zeta: C64, x: f64, y: f64) -> Result<C64> {
    if x == 0.0 || y == 0.0 {
        return Err(Error::Pole("resolvent kernel of Π_θ is singular on x = 0 and y = 0".into()));
    }
    let g = kernel_green_p(zeta, 1.0 / x, 1.0 / y)?;
    Ok(C64::from_polar(1.0, (sgn(x) - sgn(y)) * theta / 2.0) * g / (x * y))
}

/// Where a kernel is singular or discontinuous.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SingularLocus {
    XZero,
    YZero,
    Diagonal,
}

/// Decay of |K(x, y)| as |y| → ∞ at fixed x.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecayClass {
    /// Like |y|^{−1/4}: oscillatory, not absolutely integrable.
    Oscillatory,
    /// Exponential decay.
    Exponential,
    /// Like |y|^{−2} or faster.
    Algebraic,
}

/// Evaluable kernel with metadata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Kernel {
    B,
    U { tau: f64 },
    Z { alpha: [f64; 2], variant: FVariant },
    GreenP { zeta: [f64; 2] },
    ResolventPi { theta: f64, zeta: [f64; 2] },
}

impl Kernel {
    pub fn eval(&self, x: f64, y: f64) -> Result<C64> {
        match *self {
            Kernel::B => Ok(kernel_b(x, y)),
            Kernel::U { tau } => kernel_u(tau, x, y),
            Kernel::Z { alpha, variant } => kernel_z(C64::new(alpha[0], alpha[1]), x, y, variant),
            Kernel::GreenP { zeta } => kernel_green_p(C64::new(zeta[0], zeta[1]), x, y),
            Kernel::ResolventPi { theta, zeta } => kernel_resolvent_pi(theta, C64::new(zeta[0], zeta[1]), x, y),
        }
    }

    pub fn singular_locus(&self) -> Vec<SingularLocus> {
        use SingularLocus::*;
        match self {
            Kernel::B | Kernel::U { .. } => vec![XZero, YZero],
            Kernel::Z { .. } => vec![XZero, YZero, Diagonal],
            Kernel::GreenP { .. } => vec![Diagonal],
            Kernel::ResolventPi { .. } => vec![XZero, YZero, Diagonal],
        }
    }

    pub fn decay(&self) -> DecayClass {
        match self {
            Kernel::B | Kernel::U { .. } => DecayClass::Oscillatory,
            Kernel::Z { .. } | Kernel::GreenP { .. } => DecayClass::Exponential,
            Kernel::ResolventPi { .. } => DecayClass::Algebraic,
        }
    }

    /// `∫_lo^hi K(x, y) f(y) dy`, with panel breaks at the singular locus.
    pub fn apply_at<F: Fn(f64) -> C64>(&self, f: F, x: f64, lo: f64, hi: f64, tol: f64) -> Result<C64> {
        let mut cuts = vec![lo, hi];
        for l in self.singular_locus() {
            let c = match l {
                SingularLocus::YZero => 0.0,
                SingularLocus::Diagonal => x,
                SingularLocus::XZero => continue,
            };
            if c > lo && c < hi {
                cuts.push(c);
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let opts = QuadOptions { abs_tol: tol / cuts.len() as f64, rel_tol: 0.0, max_panels: 200_000, max_panel_width: None };
        let mut acc = C64::new(0.0, 0.0);
        for p in cuts.windows(2) {
            let g = |y: f64| self.eval(x, y).map(|k| k * f(y)).unwrap_or(C64::new(0.0, 0.0));
            acc += integrate_with(g, p[0], p[1], &opts)?.value;
        }
        Ok(acc)
    }
}
