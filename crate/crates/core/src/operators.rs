//! Unitary maps between the momentum picture and the thermal Hamiltonian,
//! the Möbius flow and the propagators it generates.

use crate::error::{domain, Error, Result};
use crate::hankel::HankelNodes;
use crate::kernels::kernel_u;
use crate::quadrature::gauss_legendre;
use crate::specfun::{j0, kelvin_kei, kelvin_ker};
use crate::wavefunction::{Grid, GridKind, Wavefunction};
use crate::{sgn, C64, I};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowParams {
    theta: f64,
    pub t: f64,
}

impl FlowParams {
    /// θ is reduced to [0, 2π).
    pub fn new(theta: f64, t: f64) -> Result<Self> {
        if !theta.is_finite() || !t.is_finite() {
            return Err(domain("flow parameters must be finite"));
        }
        Ok(Self { theta: theta.rem_euclid(TAU), t })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalParams {
    lambda: f64,
}

impl ThermalParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(domain(format!("λ must be positive, got {lambda}")));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Critical point x_c = −1/λ.
    pub fn critical_point(&self) -> f64 {
        -1.0 / self.lambda
    }
}

/// A point of ℝ ∪ {∞}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtReal {
    Finite(f64),
    Infinity,
}

/// f_t(x) = x/(1 − tx), with f_t(1/t) = ∞ and f_t(∞) = −1/t (∞ when t = 0).
pub fn flow_f(t: f64, x: ExtReal) -> ExtReal {
    match x {
        ExtReal::Infinity => {
            if t == 0.0 {
                ExtReal::Infinity
            } else {
                ExtReal::Finite(-1.0 / t)
            }
        }
        ExtReal::Finite(x) => {
            let d = 1.0 - t * x;
            if d == 0.0 {
                ExtReal::Infinity
            } else {
                ExtReal::Finite(x / d)
            }
        }
    }
}

/// (Iψ)(x) = ψ(1/x)/x, resampled on ψ's own grid.
///
/// A `warning` entry is attached when the resampled norm drifts by more than
/// 1e-6 (relative), which signals that the grid does not resolve ψ near 0 or ∞.
pub fn involution_i(psi: &Wavefunction) -> Wavefunction {
    involution_i_onto(psi, &psi.grid)
}

pub fn involution_i_onto(psi: &Wavefunction, out: &Grid) -> Wavefunction {
    let mut w = Wavefunction::from_fn(out, |x| if x == 0.0 { C64::new(0.0, 0.0) } else { psi.sample(1.0 / x) / x });
    w.meta = psi.meta.clone();
    let (n0, n1) = (psi.norm_sqr(), w.norm_sqr());
    if n0 > 0.0 && ((n1 - n0) / n0).abs() > 1e-6 {
        w.meta.insert("warning".into(), format!("involution changed the squared norm by {:.3e}", n1 - n0));
    }
    w
}

/// (L_θψ)(x) = e^{i sgn(x)θ/2}ψ(x).
pub fn phase_l(theta: f64, psi: &Wavefunction) -> Wavefunction {
    psi.map(|x, v| v * C64::from_polar(1.0, sgn(x) * theta / 2.0))
}

/// (S_λψ)(x) = ψ(x − 1/λ), realized by translating the grid.
pub fn translate_s(params: ThermalParams, psi: &Wavefunction) -> Result<Wavefunction> {
    shift(psi, 1.0 / params.lambda)
}

/// S_λ* : ψ ↦ ψ(· + 1/λ).
pub fn translate_s_adjoint(params: ThermalParams, psi: &Wavefunction) -> Result<Wavefunction> {
    shift(psi, -1.0 / params.lambda)
}

fn shift(psi: &Wavefunction, d: f64) -> Result<Wavefunction> {
    let mut w = Wavefunction::new(psi.grid.shifted(d)?, psi.values.clone())?;
    w.meta = psi.meta.clone();
    Ok(w)
}

/// (V_θ(t)ψ)(x) = e^{i(θ/2)(1 − sgn(1 − tx))sgn x}·ψ(f_t(x))/(1 − tx), on ψ's grid.
///
/// Grid points on the pole x = 1/t are set to zero. The squared-norm deficit
/// of the output is recorded under `mass_loss`.
pub fn propagate_v(flow: FlowParams, psi: &Wavefunction) -> Wavefunction {
    let mut w = psi.map(|x, _| v_action(flow, |y| psi.sample(y), x));
    w.meta.insert("mass_loss".into(), format!("{:.6e}", psi.norm_sqr() - w.norm_sqr()));
    w
}

/// (V_θ(t)f)(x) for an evaluable f, exact up to rounding; zero on the pole.
pub fn v_action<F: Fn(f64) -> C64>(flow: FlowParams, f: F, x: f64) -> C64 {
    let (theta, t) = (flow.theta, flow.t);
    let d = 1.0 - t * x;
    if d == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let phase = C64::from_polar(1.0, 0.5 * theta * (1.0 - sgn(d)) * sgn(x));
    phase * f(x / d) / d
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HtBackend {
    /// S_λ*·B·e^{iλtx}·B·S_λ with B discretized in t = √|x − x_c|.
    Conjugation,
    /// Direct quadrature against 𝕌_{λt}(x + 1/λ, y + 1/λ).
    Kernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HtOptions {
    /// Half-width of the t-window; covers |x − x_c| ≤ t_max².
    pub t_max: f64,
    /// Gauss–Legendre nodes in t.
    pub nodes: usize,
}

impl Default for HtOptions {
    fn default() -> Self {
        Self { t_max: 14.0, nodes: 900 }
    }
}

/// U_T(t)ψ evaluated on ψ's grid.
pub fn propagate_ht(
    params: ThermalParams,
    t: f64,
    psi: &Wavefunction,
    backend: HtBackend,
    opts: &HtOptions,
) -> Result<Wavefunction> {
    if !t.is_finite() {
        return Err(domain("t must be finite"));
    }
    match backend {
        HtBackend::Conjugation => propagate_conjugation(params, t, psi, opts),
        HtBackend::Kernel => {
            if t == 0.0 {
                return Err(domain("the kernel backend needs t ≠ 0"));
            }
            propagate_kernel(params, t, psi)
        }
    }
}

fn propagate_conjugation(params: ThermalParams, t: f64, psi: &Wavefunction, opts: &HtOptions) -> Result<Wavefunction> {
    let c = params.critical_point();
    let h = HankelNodes::new(opts.t_max, opts.nodes)?;
    let gp: Vec<C64> = h.t.iter().map(|t| psi.sample(c + t * t)).collect();
    let gm: Vec<C64> = h.t.iter().map(|t| psi.sample(c - t * t)).collect();
    let tau = params.lambda * t;
    let hp = h.apply(&gm)?;
    let hm = h.apply(&gp)?;
    // (Bg)₊ = i𝓗g₋, (Bg)₋ = −i𝓗g₊, then the chirp e^{iτx′}, x′ = ±t²
    let mp: Vec<C64> = hp.iter().zip(&h.t).zip(&h.mu).map(|((v, t), m)| I * v * C64::from_polar(1.0, tau * t * t) * m).collect();
    let mm: Vec<C64> = hm.iter().zip(&h.t).zip(&h.mu).map(|((v, t), m)| -I * v * C64::from_polar(1.0, -tau * t * t) * m).collect();
    let sum = |side: &[C64], s: f64| -> C64 {
        side.iter().zip(&h.t).fold(C64::new(0.0, 0.0), |acc, (v, t)| acc + v * j0(2.0 * s * t))
    };
    let mut out = psi.map(|x, _| {
        let xp = x - c;
        if xp > 0.0 {
            I * sum(&mm, xp.sqrt())
        } else if xp < 0.0 {
            -I * sum(&mp, (-xp).sqrt())
        } else {
            0.5 * I * (sum(&mm, 0.0) - sum(&mp, 0.0))
        }
    });
    let tm2 = opts.t_max * opts.t_max;
    let (lo, hi) = psi.grid.span();
    if lo < c - tm2 || hi > c + tm2 {
        let outside: f64 = psi
            .grid
            .points()
            .iter()
            .zip(&psi.values)
            .zip(psi.grid.weights())
            .filter(|((x, _), _)| (*x - c).abs() > tm2)
            .map(|((_, v), w)| v.norm_sqr() * w)
            .sum();
        out.meta.insert("window_mass_loss".into(), format!("{outside:.6e}"));
    }
    Ok(out)
}

fn propagate_kernel(params: ThermalParams, t: f64, psi: &Wavefunction) -> Result<Wavefunction> {
    let c = params.critical_point();
    let tau = params.lambda * t;
    let pts = psi.grid.points();
    let (gx, gw) = gauss_legendre(8, 0.0, 1.0);
    // cells between grid nodes, split at the kernel discontinuity y = x_c
    let mut cells = Vec::with_capacity(pts.len());
    for w in pts.windows(2) {
        if w[0] < c && c < w[1] {
            cells.push((w[0], c));
            cells.push((c, w[1]));
        } else {
            cells.push((w[0], w[1]));
        }
    }
    let mut values = Vec::with_capacity(pts.len());
    for &x in pts {
        let xs = x - c;
        let mut acc = C64::new(0.0, 0.0);
        for &(a, b) in &cells {
            let ys = ((a - c).abs()).min((b - c).abs()).max(1e-300);
            let rate = (1.0 + (xs.abs() / ys).sqrt()) / tau.abs();
            let m = ((rate * (b - a) / 2.0).ceil() as usize).clamp(1, 64);
            let hw = (b - a) / m as f64;
            for p in 0..m {
                let o = a + p as f64 * hw;
                for (u, w) in gx.iter().zip(&gw) {
                    let y = o + u * hw;
                    acc += kernel_u(tau, xs, y - c)? * psi.sample(y) * (w * hw);
                }
            }
        }
        values.push(acc);
    }
    let mut out = Wavefunction::new(psi.grid.clone(), values)?;
    out.meta = psi.meta.clone();
    Ok(out)
}

/// κ₀ and κ₁ for a given λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaFunctions {
    pub params: ThermalParams,
}

pub fn kappa_functions(params: ThermalParams) -> KappaFunctions {
    KappaFunctions { params }
}

impl KappaFunctions {
    /// κ₀(x) = −√(8/π)·sgn(x + 1/λ)·kei(2√|x + 1/λ|); zero at x_c.
    pub fn kappa0(&self, x: f64) -> f64 {
        let s = x + 1.0 / self.params.lambda;
        let kei = kelvin_kei(2.0 * s.abs().sqrt()).unwrap_or(0.0);
        -(8.0 / PI).sqrt() * sgn(s) * kei
    }

    /// κ₁(x) = √(8/π)·ker(2√|x + 1/λ|); pole at x_c.
    pub fn kappa1(&self, x: f64) -> Result<f64> {
        let s = x + 1.0 / self.params.lambda;
        if s == 0.0 {
            return Err(Error::Pole(format!("κ₁ diverges at x_c = {x}")));
        }
        Ok((8.0 / PI).sqrt() * kelvin_ker(2.0 * s.abs().sqrt())?)
    }
}

/// Finite-difference derivatives of order 4 on a uniform grid.
fn derivatives(v: &[C64], h: f64) -> (Vec<C64>, Vec<C64>, f64) {
    let n = v.len();
    let mut d1 = vec![C64::new(0.0, 0.0); n];
    let mut d2 = vec![C64::new(0.0, 0.0); n];
    let mut coarse: f64 = 0.0;
    for i in 0..n {
        let (a, b) = if i < 2 {
            (0, 0)
        } else if i + 2 >= n {
            (n - 6, 0)
        } else {
            (i - 2, 1)
        };
        if b == 1 {
            let f = |k: usize| v[a + k];
            d1[i] = (f(0) - f(1) * 8.0 + f(3) * 8.0 - f(4)) / (12.0 * h);
            d2[i] = (-f(0) + f(1) * 16.0 - f(2) * 30.0 + f(3) * 16.0 - f(4)) / (12.0 * h * h);
            let low = (f(1) - f(2) * 2.0 + f(3)) / (h * h);
            coarse = coarse.max((d2[i] - low).norm());
        } else {
            // one-sided six-point stencils at the two ends
            let (base, dir) = if i < 2 { (0usize, 1.0) } else { (n - 1, -1.0) };
            let off = if i < 2 { i } else { n - 1 - i };
            let f = |k: usize| if dir > 0.0 { v[base + k] } else { v[base - k] };
            let (c1, c2) = one_sided(off);
            d1[i] = (0..6).fold(C64::new(0.0, 0.0), |s, k| s + f(k) * c1[k]) * (dir / h);
            d2[i] = (0..6).fold(C64::new(0.0, 0.0), |s, k| s + f(k) * c2[k]) / (h * h);
        }
    }
    let scale = d2.iter().map(|d| d.norm()).fold(0.0, f64::max);
    (d1, d2, if scale > 0.0 { coarse / scale } else { 0.0 })
}

/// Stencil weights on nodes 0..5 for derivatives at node `off` ∈ {0, 1}.
fn one_sided(off: usize) -> ([f64; 6], [f64; 6]) {
    // Lagrange differentiation on equispaced nodes, precomputed
    match off {
        0 => (
            [-137.0 / 60.0, 5.0, -5.0, 10.0 / 3.0, -5.0 / 4.0, 1.0 / 5.0],
            [15.0 / 4.0, -77.0 / 6.0, 107.0 / 6.0, -13.0, 61.0 / 12.0, -5.0 / 6.0],
        ),
        _ => (
            [-1.0 / 5.0, -13.0 / 12.0, 2.0, -1.0, 1.0 / 3.0, -1.0 / 20.0],
            [5.0 / 6.0, -5.0 / 4.0, -1.0 / 3.0, 7.0 / 6.0, -1.0 / 2.0, 1.0 / 12.0],
        ),
    }
}

/// H_Tψ + c·κ₁ = −(1 + λx)ψ″ − λψ′ + c·κ₁ on a uniform grid.
///
/// Fails with an accuracy error when second- and fourth-order estimates of
/// ψ″ differ by more than 1% of max|ψ″|, and with a pole error when a grid
/// point sits on x_c while c ≠ 0.
pub fn apply_ht_core(params: ThermalParams, psi: &Wavefunction, c: C64) -> Result<Wavefunction> {
    let h = match psi.grid.kind() {
        GridKind::Uniform => psi.grid.spacing().unwrap_or(0.0),
        _ => return Err(domain("apply_ht_core needs a uniform grid")),
    };
    if psi.grid.len() < 6 {
        return Err(domain("apply_ht_core needs at least six grid points"));
    }
    let (d1, d2, coarse) = derivatives(&psi.values, h);
    if coarse > 1e-2 {
        return Err(Error::Accuracy { tol: 1e-2, value: C64::new(coarse, 0.0), err: coarse });
    }
    let lam = params.lambda;
    let kap = kappa_functions(params);
    let mut values = Vec::with_capacity(psi.grid.len());
    for (i, &x) in psi.grid.points().iter().enumerate() {
        let mut v = -(d2[i] * (1.0 + lam * x)) - d1[i] * lam;
        if c != C64::new(0.0, 0.0) {
            v += c * kap.kappa1(x)?;
        }
        values.push(v);
    }
    let mut out = Wavefunction::new(psi.grid.clone(), values)?;
    out.meta = psi.meta.clone();
    Ok(out)
}

/// Deficiency data of the momentum-type operator for the extension angle θ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeficiencyVectors {
    pub theta: f64,
}

pub fn deficiency_vectors(theta: f64) -> DeficiencyVectors {
    DeficiencyVectors { theta }
}

impl DeficiencyVectors {
    /// η_θ(x) = e^{−|x|}e^{i sgn(x)θ/2}.
    pub fn eta(&self, x: f64) -> C64 {
        C64::from_polar((-x.abs()).exp(), sgn(x) * self.theta / 2.0)
    }

    /// ζ_θ(x) = (1/x)e^{−1/|x|}e^{i sgn(x)θ/2}, with ζ_θ(0) = 0.
    pub fn zeta(&self, x: f64) -> C64 {
        if x == 0.0 {
            return C64::new(0.0, 0.0);
        }
        C64::from_polar((-1.0 / x.abs()).exp() / x, sgn(x) * self.theta / 2.0)
    }

    /// φ₊ = √2·e^{−x} on x > 0.
    pub fn phi_plus(x: f64) -> f64 {
        if x > 0.0 {
            2f64.sqrt() * (-x).exp()
        } else {
            0.0
        }
    }

    /// φ₋ = √2·e^{x} on x < 0.
    pub fn phi_minus(x: f64) -> f64 {
        Self::phi_plus(-x)
    }
}

/// max |xψ(x)| over the outer 10% of the grid span: small values indicate
/// the decay lim xψ(x) = 0 required of the core domain.
pub fn decay_diagnostic(psi: &Wavefunction) -> f64 {
    let (lo, hi) = psi.grid.span();
    let r = lo.abs().max(hi.abs());
    psi.grid
        .points()
        .iter()
        .zip(&psi.values)
        .filter(|(x, _)| x.abs() >= 0.9 * r)
        .map(|(x, v)| (x * v).norm())
        .fold(0.0, f64::max)
}

/// (𝐇ψ)(x) = (1/π) PV∫ψ(y)/(x − y) dy at one point.
///
/// Folded as (1/π)∫₀^∞ [ψ(x − u) − ψ(x + u)]/u du, which is regular at u = 0;
/// panels break at every grid node seen from x, where the interpolant kinks.
pub fn hilbert_transform_at(psi: &Wavefunction, x: f64) -> C64 {
    let mut breaks: Vec<f64> = psi.grid.points().iter().map(|p| (p - x).abs()).collect();
    breaks.push(0.0);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
    let (gx, gw) = gauss_legendre(6, 0.0, 1.0);
    let mut acc = C64::new(0.0, 0.0);
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let h = b - a;
        for (u, wt) in gx.iter().zip(&gw) {
            let u = a + u * h;
            acc += (psi.sample(x - u) - psi.sample(x + u)) * (wt * h / u);
        }
    }
    acc / PI
}

pub fn hilbert_transform(psi: &Wavefunction) -> Wavefunction {
    let mut out = psi.map(|x, _| hilbert_transform_at(psi, x));
    out.meta = psi.meta.clone();
    out
}

/// N_θ = cos(θ/2) − sin(θ/2)·𝐇.
pub fn intertwiner_n(theta: f64, psi: &Wavefunction) -> Wavefunction {
    let (s, c) = (theta / 2.0).sin_cos();
    if s == 0.0 {
        return psi.scaled(C64::new(c, 0.0));
    }
    let h = hilbert_transform(psi);
    let mut out = psi.map(|_, v| v * c);
    for (o, hv) in out.values.iter_mut().zip(&h.values) {
        *o -= hv * s;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(grid: &Grid, x0: f64, p: f64) -> Wavefunction {
        Wavefunction::from_fn(grid, |x| C64::from_polar((-(x - x0).powi(2) / 2.0).exp() / PI.powf(0.25), p * x))
    }

    #[test]
    fn flow_conventions() {
        assert_eq!(flow_f(0.0, ExtReal::Finite(3.0)), ExtReal::Finite(3.0));
        assert_eq!(flow_f(0.5, ExtReal::Finite(2.0)), ExtReal::Infinity);
        assert_eq!(flow_f(0.5, ExtReal::Infinity), ExtReal::Finite(-2.0));
        assert_eq!(flow_f(0.0, ExtReal::Infinity), ExtReal::Infinity);
        assert!((FlowParams::new(-1.0, 0.0).unwrap().theta() - (TAU - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn involution_support_and_norm() {
        let g = Grid::uniform(0.2, 3.0, 5601).unwrap();
        let bump = |x: f64| if x > 1.0 && x < 2.0 { ((x - 1.0) * (2.0 - x)).powi(3) } else { 0.0 };
        let psi = Wavefunction::from_fn(&g, |x| C64::new(bump(x), 0.0));
        let ip = involution_i(&psi);
        for (&x, v) in g.points().iter().zip(&ip.values) {
            if !(0.5..=1.0).contains(&x) {
                assert!(v.norm() < 1e-12, "x={x}: {v}");
            }
        }
        assert!((ip.norm() - psi.norm()).abs() < 1e-6);
        let back = involution_i(&ip);
        assert!(back.distance(&psi).unwrap() < 1e-6);
    }

    #[test]
    fn phase_and_translation() {
        let g = Grid::uniform(-6.0, 6.0, 601).unwrap();
        let psi = gaussian(&g, 0.3, 1.0);
        assert_eq!(phase_l(0.0, &psi), psi);
        let l = phase_l(1.3, &psi);
        for (a, b) in l.values.iter().zip(&psi.values) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
        assert!(phase_l(-1.3, &l).distance(&psi).unwrap() < 1e-14);
        let p = ThermalParams::new(2.0).unwrap();
        let s = translate_s(p, &psi).unwrap();
        assert_eq!(s.norm(), psi.norm());
        assert!((s.sample(0.8) - psi.sample(0.3)).norm() < 1e-12);
        let back = translate_s_adjoint(p, &s).unwrap();
        assert!(back.grid.points().iter().zip(g.points()).all(|(a, b)| (a - b).abs() < 1e-14));
        assert_eq!(back.values, psi.values);
    }

    #[test]
    fn v_group_prefactor_at_pi() {
        let g = Grid::uniform(-8.0, 8.0, 3201).unwrap();
        let psi = gaussian(&g, 0.5, 0.7);
        let v = propagate_v(FlowParams::new(PI, 0.2).unwrap(), &psi);
        for (&x, val) in g.points().iter().zip(&v.values).step_by(37) {
            let d = 1.0 - 0.2 * x;
            let expect = psi.sample(x / d) / d.abs();
            assert!((val - expect).norm() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn kappa_jump_and_pole() {
        let k = kappa_functions(ThermalParams::new(2.0).unwrap());
        let xc = -0.5;
        let jump = k.kappa0(xc + 1e-14) - k.kappa0(xc - 1e-14);
        assert!((jump - 2.0 * (8.0 / PI).sqrt() * PI / 4.0).abs() < 1e-5, "{jump}");
        assert!(matches!(k.kappa1(xc), Err(Error::Pole(_))));
        assert!(k.kappa1(xc + 1e-3).unwrap() > k.kappa1(xc + 1e-1).unwrap());
    }

    #[test]
    fn core_action_on_gaussian() {
        let p = ThermalParams::new(0.7).unwrap();
        let g = Grid::uniform(-10.0, 10.0, 2001).unwrap();
        let psi = Wavefunction::from_fn(&g, |x| C64::new((-x * x / 2.0).exp(), 0.0));
        let out = apply_ht_core(p, &psi, C64::new(0.0, 0.0)).unwrap();
        for (&x, v) in g.points().iter().zip(&out.values) {
            let e = (-x * x / 2.0).exp();
            let exact = -(1.0 + 0.7 * x) * (x * x - 1.0) * e + 0.7 * x * e;
            assert!((v.re - exact).abs() < 1e-6, "x={x}: {} vs {exact}", v.re);
        }
        let zero = Wavefunction::zeros(&Grid::uniform(-0.9, 3.0, 40).unwrap());
        let k = apply_ht_core(p, &zero, C64::new(1.0, 0.0)).unwrap();
        let kap = kappa_functions(p);
        for (&x, v) in zero.grid.points().iter().zip(&k.values) {
            assert_eq!(v.re, kap.kappa1(x).unwrap());
        }
        let coarse = Grid::uniform(-10.0, 10.0, 25).unwrap();
        let rough = Wavefunction::from_fn(&coarse, |x| C64::new((-4.0 * x * x).exp(), 0.0));
        assert!(matches!(apply_ht_core(p, &rough, C64::new(0.0, 0.0)), Err(Error::Accuracy { .. })));
    }

    #[test]
    fn deficiency_vector_shapes() {
        let d = deficiency_vectors(0.8);
        let norm: f64 = (0..200_000).map(|i| (i as f64 + 0.5) * 1e-4).map(|x| DeficiencyVectors::phi_plus(x).powi(2) * 1e-4).sum();
        assert!((norm - 1.0).abs() < 1e-6);
        assert!(d.zeta(1e-3).norm() < 1e-300);
        let big = 1e8;
        assert!((d.zeta(big) * big - C64::from_polar(1.0, 0.4)).norm() < 1e-7);
        assert!((d.zeta(-big) * -big - C64::from_polar(1.0, -0.4)).norm() < 1e-7);
        // −iη′ = iη on x > 0 and −iη on x < 0
        let h = 1e-4;
        for &x in &[0.7, -1.3] {
            let dd = (d.eta(x - 2.0 * h) - d.eta(x - h) * 8.0 + d.eta(x + h) * 8.0 - d.eta(x + 2.0 * h)) / (12.0 * h);
            let lhs = -I * dd;
            assert!((lhs - I * sgn(x) * d.eta(x)).norm() < 1e-10);
        }
    }

    #[test]
    fn hilbert_pair() {
        let g = Grid::log_symmetric(0.0, 1e-3, 2e3, 700).unwrap();
        let psi = Wavefunction::from_fn(&g, |x| C64::new(1.0 / (1.0 + x * x), 0.0));
        for &x in &[-3.0, -0.4, 0.0, 0.5, 2.0] {
            let v = hilbert_transform_at(&psi, x);
            assert!((v.re - x / (1.0 + x * x)).abs() < 1e-3, "x={x}: {v}");
        }
    }
}
