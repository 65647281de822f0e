//! Zeroth-order Bessel-type functions.
//!
//! J₀ and I₀ use a power series summed in double-double arithmetic below the
//! crossover and the Hankel asymptotic expansion above it; the extra precision
//! in the series removes the cancellation that otherwise limits the crossover
//! to small arguments. K₀ uses its ascending series near the origin, a
//! trapezoid rule on a Gaussian-weighted integral in the middle range, and the
//! asymptotic expansion for large |z|.

use crate::error::{domain, Error, Result};
use crate::C64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Evaluation parameters of one special function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalDomain {
    /// Switch point between the series and the asymptotic expansion.
    pub crossover: f64,
    /// Hard cap on series terms.
    pub series_terms: usize,
    pub target_rel_tol: f64,
}

impl EvalDomain {
    pub fn new(crossover: f64, series_terms: usize, target_rel_tol: f64) -> Result<Self> {
        if !(crossover > 0.0) || series_terms == 0 {
            return Err(domain("crossover and series_terms must be positive"));
        }
        if !(target_rel_tol > 0.0 && target_rel_tol <= 1e-6) {
            return Err(domain("target_rel_tol must lie in (0, 1e-6]"));
        }
        Ok(Self { crossover, series_terms, target_rel_tol })
    }
}

pub const J0_DOMAIN: EvalDomain = EvalDomain { crossover: 25.0, series_terms: 150, target_rel_tol: 1e-13 };
pub const I0_DOMAIN: EvalDomain = EvalDomain { crossover: 25.0, series_terms: 150, target_rel_tol: 1e-13 };
/// For K₀ the crossover is where the asymptotic expansion takes over from quadrature.
pub const K0_DOMAIN: EvalDomain = EvalDomain { crossover: 30.0, series_terms: 60, target_rel_tol: 1e-12 };
/// Radius below which K₀ is summed from its ascending series.
pub const K0_SERIES_RADIUS: f64 = 2.0;

// ---------------------------------------------------------------------------
// double-double arithmetic, just enough for the ascending series

#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    fn prod(a: f64, b: f64) -> Dd {
        let (hi, lo) = two_prod(a, b);
        Dd { hi, lo }
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    fn div(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        let (p, pe) = two_prod(q1, b);
        let (s, e) = two_sum(self.hi, -p);
        let e = e - pe + self.lo;
        let q2 = (s + e) / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

#[derive(Debug, Clone, Copy)]
struct Cdd {
    re: Dd,
    im: Dd,
}

impl Cdd {
    fn mul(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    fn add(self, o: Cdd) -> Cdd {
        Cdd { re: self.re.add(o.re), im: self.im.add(o.im) }
    }

    fn div(self, b: f64) -> Cdd {
        Cdd { re: self.re.div(b), im: self.im.div(b) }
    }

    fn abs_hi(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }

    fn value(self) -> C64 {
        C64::new(self.re.value(), self.im.value())
    }
}

// ---------------------------------------------------------------------------
// J₀

/// J₀(x) for real x.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain(format!("bessel_j0: non-finite argument {x}")));
    }
    Ok(j0(x))
}

/// Infallible J₀; NaN in, NaN out.
#[inline]
pub fn j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= J0_DOMAIN.crossover {
        j0_series(ax)
    } else {
        j0_asymptotic(ax)
    }
}

pub(crate) fn j0_series(x: f64) -> f64 {
    let w = Dd::prod(x, x).div(-4.0);
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    let mut peak = 1.0f64;
    for k in 1..=J0_DOMAIN.series_terms {
        let kk = k as f64;
        term = term.mul(w).div(kk * kk);
        sum = sum.add(term);
        peak = peak.max(term.hi.abs());
        if kk * kk > w.hi.abs() && term.hi.abs() < 1e-30 * peak {
            break;
        }
    }
    sum.value()
}

/// Hankel expansion: returns (P, Q) with J₀ = √(2/πx)(P cos χ − Q sin χ), χ = x − π/4.
fn hankel_pq(x: f64) -> (f64, f64) {
    let mut p = 1.0;
    let mut q = 0.0;
    let mut t = 1.0f64;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        t *= -(odd * odd) / (8.0 * kf * x);
        if t.abs() > last || t.abs() < 1e-18 {
            break;
        }
        last = t.abs();
        // a_k/x^k with alternating signs per parity
        match k % 4 {
            1 => q += t,
            2 => p -= t,
            3 => q -= t,
            _ => p += t,
        }
    }
    (p, q)
}

pub(crate) fn j0_asymptotic(x: f64) -> f64 {
    let (p, q) = hankel_pq(x);
    let (s, c) = x.sin_cos();
    let cos_chi = (c + s) * std::f64::consts::FRAC_1_SQRT_2;
    let sin_chi = (s - c) * std::f64::consts::FRAC_1_SQRT_2;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

// ---------------------------------------------------------------------------
// I₀

/// I₀(z) for complex z.
pub fn bessel_i0(z: C64) -> Result<C64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(domain(format!("bessel_i0: non-finite argument {z}")));
    }
    Ok(i0(z))
}

/// Infallible I₀.
pub fn i0(z: C64) -> C64 {
    if z.norm() <= I0_DOMAIN.crossover {
        i0_series(z)
    } else {
        i0_scaled_asymptotic(z) * z.re.abs().exp()
    }
}

/// e^{−|Re z|} I₀(z), free of overflow for large |Re z|.
pub fn i0_scaled(z: C64) -> C64 {
    if z.norm() <= I0_DOMAIN.crossover {
        i0_series(z) * (-z.re.abs()).exp()
    } else {
        i0_scaled_asymptotic(z)
    }
}

/// J₀ at complex argument through J₀(w) = I₀(iw).
pub fn j0_complex(w: C64) -> C64 {
    i0(C64::new(-w.im, w.re))
}

/// e^{−|Im w|} J₀(w).
pub fn j0_complex_scaled(w: C64) -> C64 {
    i0_scaled(C64::new(-w.im, w.re))
}

pub(crate) fn i0_series(z: C64) -> C64 {
    let (a, b) = (z.re, z.im);
    let w = Cdd {
        re: Dd::prod(a, a).sub(Dd::prod(b, b)).div(4.0),
        im: Dd::prod(a, b).div(2.0),
    };
    let wabs = w.abs_hi();
    let mut term = Cdd { re: Dd::ONE, im: Dd::ZERO };
    let mut sum = term;
    let mut scale = 1.0f64;
    for k in 1..=I0_DOMAIN.series_terms {
        let kk = k as f64;
        term = term.mul(w).div(kk * kk);
        sum = sum.add(term);
        let th = term.abs_hi();
        scale = scale.max(th);
        if kk * kk > wabs && th < 1e-30 * scale {
            break;
        }
    }
    sum.value()
}

fn i0_scaled_asymptotic(z: C64) -> C64 {
    // I₀ is even; work in the right half-plane.
    let z = if z.re < 0.0 { -z } else { z };
    let s = if z.im >= 0.0 { 1.0 } else { -1.0 };
    let mut sum_dom = C64::new(1.0, 0.0); // Σ (−1)^k a_k / z^k
    let mut sum_sub = C64::new(1.0, 0.0); // Σ a_k / z^k
    let mut t = C64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        t = t * (-(odd * odd) / (8.0 * kf)) / z;
        let tn = t.norm();
        if tn > last || tn < 1e-18 {
            break;
        }
        last = tn;
        sum_sub += t;
        sum_dom += if k % 2 == 0 { t } else { -t };
    }
    let root = (2.0 * PI * z).sqrt();
    // e^{z − Re z} and e^{−z − Re z}
    let dom = C64::new(0.0, z.im).exp();
    let sub = (-z - z.re).exp();
    (dom * sum_dom + C64::new(0.0, s) * sub * sum_sub) / root
}

// ---------------------------------------------------------------------------
// K₀

/// K₀(z) on the principal branch.
pub fn bessel_k0(z: C64) -> Result<C64> {
    check_k0_arg(z)?;
    Ok(k0(z))
}

/// e^{z} K₀(z) on the principal branch.
pub fn bessel_k0_scaled(z: C64) -> Result<C64> {
    check_k0_arg(z)?;
    Ok(k0_scaled(z))
}

fn check_k0_arg(z: C64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(domain(format!("bessel_k0: non-finite argument {z}")));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::Pole("bessel_k0 at z = 0".into()));
    }
    if z.im == 0.0 && z.re < 0.0 {
        return Err(domain(format!("bessel_k0: {z} lies on the branch cut")));
    }
    Ok(())
}

/// Infallible K₀; callers guarantee a valid argument.
pub fn k0(z: C64) -> C64 {
    k0_scaled(z) * (-z).exp()
}

/// Infallible e^{z} K₀(z).
pub fn k0_scaled(z: C64) -> C64 {
    let r = z.norm();
    if r <= K0_SERIES_RADIUS {
        return k0_series(z) * z.exp();
    }
    if z.re < 0.0 {
        // K₀(w e^{±iπ}) = K₀(w) ∓ iπ I₀(w) with w = −z in the right half-plane
        let w = -z;
        let s = if z.im >= 0.0 { 1.0 } else { -1.0 };
        let kpart = k0_scaled_right(w) * (-2.0 * w).exp();
        let ipart = C64::new(0.0, -s * PI) * i0_scaled(w) * C64::new(0.0, -w.im).exp();
        return kpart + ipart;
    }
    k0_scaled_right(z)
}

fn k0_scaled_right(z: C64) -> C64 {
    if z.norm() > K0_DOMAIN.crossover {
        k0_scaled_asymptotic(z)
    } else {
        k0_scaled_quadrature(z)
    }
}

pub(crate) fn k0_series(z: C64) -> C64 {
    let w = z * z / 4.0;
    let mut term = C64::new(1.0, 0.0);
    let mut i_sum = term;
    let mut h_sum = C64::new(0.0, 0.0);
    let mut harmonic = 0.0;
    for k in 1..=K0_DOMAIN.series_terms {
        let kf = k as f64;
        term = term * w / (kf * kf);
        harmonic += 1.0 / kf;
        i_sum += term;
        h_sum += term * harmonic;
        if term.norm() < 1e-18 {
            break;
        }
    }
    -((z / 2.0).ln() + EULER_GAMMA) * i_sum + h_sum
}

/// Rotating the Laplace-type representation K₀(z) = ∫₁^∞ e^{−zu}(u²−1)^{−1/2} du
/// onto the ray u = 1 + v² e^{−iβ}/|z| gives
/// e^{z}K₀(z) = 2 e^{−iβ/2}|z|^{−1/2} ∫₀^∞ e^{−v²}(2 + v²e^{−iβ}/|z|)^{−1/2} dv,
/// an analytic even integrand for which the trapezoid rule converges geometrically.
pub(crate) fn k0_scaled_quadrature(z: C64) -> C64 {
    let r = z.norm();
    let beta = z.arg();
    let rot = C64::from_polar(1.0 / r, -beta);
    let h = 0.0625;
    let mut sum = C64::new(0.0, 0.0);
    for j in (1..=104).rev() {
        let v = j as f64 * h;
        let v2 = v * v;
        sum += (-v2).exp() / (2.0 + v2 * rot).sqrt();
    }
    sum += 0.5 / C64::new(2.0, 0.0).sqrt();
    C64::from_polar(2.0 / r.sqrt(), -0.5 * beta) * sum * h
}

fn k0_scaled_asymptotic(z: C64) -> C64 {
    let mut sum = C64::new(1.0, 0.0);
    let mut t = C64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        t = t * (-(odd * odd) / (8.0 * kf)) / z;
        let tn = t.norm();
        if tn > last || tn < 1e-18 {
            break;
        }
        last = tn;
        sum += t;
    }
    (C64::new(FRAC_PI_2, 0.0) / z).sqrt() * sum
}

// ---------------------------------------------------------------------------
// Kelvin functions

/// ker(x) + i kei(x) = K₀(x e^{iπ/4}) for x > 0.
pub fn kelvin_k(x: f64) -> C64 {
    k0(C64::from_polar(x, FRAC_PI_4))
}

/// ker(x), x > 0.
pub fn kelvin_ker(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(domain(format!("kelvin_ker: argument {x} outside [0, ∞)")));
    }
    if x == 0.0 {
        return Err(Error::Pole("ker diverges logarithmically at 0".into()));
    }
    Ok(kelvin_k(x).re)
}

/// kei(x), x ≥ 0, with kei(0) = −π/4.
pub fn kelvin_kei(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(domain(format!("kelvin_kei: argument {x} outside [0, ∞)")));
    }
    if x == 0.0 {
        return Ok(-FRAC_PI_4);
    }
    Ok(kelvin_k(x).im)
}
