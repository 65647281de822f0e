//! Scattering by a convolution potential, studied through the equivalent
//! momentum pair (p, p_g = p + M) where M(x) = (√(2π)/λ)·ĝ(1/x).

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate_with, QuadOptions};
use crate::wavefunction::Wavefunction;
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// The Fourier transform ĝ of the convolution kernel.
#[derive(Clone)]
pub enum GHat {
    Zero,
    /// s²e^{−s²}
    GaussianS2,
    /// s⁴e^{−s²}
    GaussianS4,
    /// s²/(1 + s²)²
    Lorentzian,
    /// |s|e^{−s²}: violates the |s|^{3/2} decay at the origin.
    LinearViolating,
    /// Cubic interpolation of sorted samples, continued as c·s² into the origin
    /// cell; zero outside the sampled range.
    Tabulated(Vec<(f64, C64)>),
    Custom(Arc<dyn Fn(f64) -> C64 + Send + Sync>),
}

impl fmt::Debug for GHat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GHat::Tabulated(v) => write!(f, "Tabulated({} samples)", v.len()),
            GHat::Custom(_) => write!(f, "Custom"),
            other => write!(f, "{}", other.name()),
        }
    }
}

impl GHat {
    pub const PRESETS: [&'static str; 5] = ["zero", "gaussian_s2", "gaussian_s4", "lorentzian", "linear_violating"];

    pub fn preset(name: &str) -> Result<Self> {
        Ok(match name {
            "zero" => GHat::Zero,
            "gaussian_s2" => GHat::GaussianS2,
            "gaussian_s4" => GHat::GaussianS4,
            "lorentzian" => GHat::Lorentzian,
            "linear_violating" => GHat::LinearViolating,
            _ => return Err(domain(format!("unknown ĝ preset '{name}'; expected one of {:?}", Self::PRESETS))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            GHat::Zero => "zero",
            GHat::GaussianS2 => "gaussian_s2",
            GHat::GaussianS4 => "gaussian_s4",
            GHat::Lorentzian => "lorentzian",
            GHat::LinearViolating => "linear_violating",
            GHat::Tabulated(_) => "tabulated",
            GHat::Custom(_) => "custom",
        }
    }

    pub fn tabulated(mut samples: Vec<(f64, C64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(domain("a tabulated ĝ needs at least two samples"));
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        if samples.windows(2).any(|w| w[0].0 == w[1].0) || samples.iter().any(|s| !s.0.is_finite()) {
            return Err(domain("tabulated ĝ abscissae must be finite and distinct"));
        }
        Ok(GHat::Tabulated(samples))
    }

    pub fn eval(&self, s: f64) -> C64 {
        let r = |v: f64| C64::new(v, 0.0);
        match self {
            GHat::Zero => r(0.0),
            GHat::GaussianS2 => r(s * s * (-s * s).exp()),
            GHat::GaussianS4 => r(s.powi(4) * (-s * s).exp()),
            GHat::Lorentzian => r(s * s / (1.0 + s * s).powi(2)),
            GHat::LinearViolating => r(s.abs() * (-s * s).exp()),
            GHat::Tabulated(v) => {
                if !(s >= v[0].0 && s <= v[v.len() - 1].0) {
                    return r(0.0);
                }
                // the decay hypothesis is imposed inside the innermost cells:
                // continue as c·s² from the nearest nonzero node on the same side
                let inner = if s > 0.0 {
                    v.iter().find(|p| p.0 > 0.0)
                } else {
                    v.iter().rev().find(|p| p.0 < 0.0)
                };
                if s == 0.0 {
                    return r(0.0);
                }
                if let Some(&(sn, gn)) = inner {
                    if s.abs() < sn.abs() {
                        return gn * (s / sn).powi(2);
                    }
                }
                // cubic Lagrange on the four nearest nodes (fewer near short tables)
                let n = v.len();
                let i = v.partition_point(|p| p.0 <= s).clamp(1, n - 1);
                let lo = i.saturating_sub(2).min(n.saturating_sub(4));
                let hi = (lo + 4).min(n);
                let mut acc = C64::new(0.0, 0.0);
                for j in lo..hi {
                    let mut w = 1.0;
                    for k in lo..hi {
                        if k != j {
                            w *= (s - v[k].0) / (v[j].0 - v[k].0);
                        }
                    }
                    acc += v[j].1 * w;
                }
                acc
            }
            GHat::Custom(f) => f(s),
        }
    }

    /// ∫ ĝ(s)/s² ds in closed form, where known.
    pub fn exact_integral(&self) -> Option<f64> {
        match self {
            GHat::Zero => Some(0.0),
            GHat::GaussianS2 => Some(PI.sqrt()),
            GHat::GaussianS4 => Some(PI.sqrt() / 2.0),
            GHat::Lorentzian => Some(PI / 2.0),
            _ => None,
        }
    }

    /// (ε₀, C) with |ĝ(s)| ≤ C|s|^{3/2} for |s| < ε₀, where known.
    pub fn known_decay(&self) -> Option<(f64, f64)> {
        match self {
            GHat::Zero | GHat::GaussianS2 | GHat::GaussianS4 | GHat::Lorentzian => Some((1.0, 1.0)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scatterer {
    pub g_hat: GHat,
    lambda: f64,
    /// (ε₀, C) with |ĝ(s)| ≤ C|s|^{3/2} for |s| < ε₀.
    pub decay: Option<(f64, f64)>,
}

impl Scatterer {
    pub fn new(g_hat: GHat, lambda: f64, decay: Option<(f64, f64)>) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(domain(format!("λ must be positive, got {lambda}")));
        }
        if let Some((e, c)) = decay {
            if !(e > 0.0 && c > 0.0) {
                return Err(domain("decay constants must be positive"));
            }
            // spot-check the bound on a geometric ladder towards 0
            for k in 0..40 {
                let s = e * 0.7f64.powi(k);
                for s in [s, -s] {
                    if g_hat.eval(s).norm() > c * s.abs().powf(1.5) * (1.0 + 1e-12) {
                        return Err(domain(format!("|ĝ({s})| exceeds C|s|^(3/2)")));
                    }
                }
            }
        }
        Ok(Self { g_hat, lambda, decay })
    }

    /// A preset with its known decay constants attached.
    pub fn preset(name: &str, lambda: f64) -> Result<Self> {
        let g = GHat::preset(name)?;
        let d = g.known_decay();
        Self::new(g, lambda, d)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    fn prefactor(&self) -> f64 {
        (2.0 * PI).sqrt() / self.lambda
    }
}

/// M(x) = (√(2π)/λ)·ĝ(1/x). At x = 0 the Riemann–Lebesgue limit 0 is returned
/// when decay constants are known; otherwise the point is reported as singular.
pub fn potential_m(sc: &Scatterer, x: f64) -> Result<C64> {
    if x == 0.0 {
        return match sc.decay {
            Some(_) => Ok(C64::new(0.0, 0.0)),
            None => Err(domain("M is singular at x = 0 without a decay hypothesis")),
        };
    }
    Ok(sc.g_hat.eval(1.0 / x) * sc.prefactor())
}

fn m_or_zero(sc: &Scatterer, x: f64) -> C64 {
    if x == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        sc.g_hat.eval(1.0 / x) * sc.prefactor()
    }
}

fn phase_opts() -> QuadOptions {
    QuadOptions { abs_tol: 1e-12, rel_tol: 1e-12, max_panels: 50_000, max_panel_width: Some(4.0) }
}

/// ∫_a^b M(s) ds.
pub fn potential_integral(sc: &Scatterer, a: f64, b: f64) -> Result<C64> {
    if a == b || matches!(sc.g_hat, GHat::Zero) {
        return Ok(C64::new(0.0, 0.0));
    }
    Ok(integrate_with(|s| m_or_zero(sc, s), a, b, &phase_opts())?.value)
}

/// (e^{−itp_g}f)(x) = exp(−i∫_{x−t}^{x} M)·f(x − t) for an evaluable f.
pub fn evolve_pg_at<F: Fn(f64) -> C64>(sc: &Scatterer, t: f64, f: F, x: f64) -> Result<C64> {
    let phase = potential_integral(sc, x - t, x)?;
    Ok((-C64::new(0.0, 1.0) * phase).exp() * f(x - t))
}

/// e^{−itp_g}ψ on ψ's grid; ψ is translated by interpolation.
pub fn evolve_pg(sc: &Scatterer, t: f64, psi: &Wavefunction) -> Result<Wavefunction> {
    let mut values = Vec::with_capacity(psi.grid.len());
    for &x in psi.grid.points() {
        values.push(evolve_pg_at(sc, t, |y| psi.sample(y), x)?);
    }
    let mut out = Wavefunction::new(psi.grid.clone(), values)?;
    out.meta = psi.meta.clone();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Times at which e^{iTp_g}e^{−iTp} is evaluated, and the extrapolation used to
/// reach T → ±∞.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterSchedule {
    pub times: Vec<f64>,
    pub tol: f64,
    /// Powers of u = 1/|x ± T| in the tail model of the accumulated phase.
    pub exponents: Vec<f64>,
}

impl Default for ScatterSchedule {
    fn default() -> Self {
        Self { times: vec![25.0, 50.0, 100.0, 200.0, 400.0], tol: 1e-5, exponents: vec![1.0, 2.0, 3.0] }
    }
}

/// Finite-time approximant e^{iTp_g}e^{−iTp}ψ = exp(i∫_x^{x+T} M)·ψ, signed T.
pub fn wave_operator_finite(sc: &Scatterer, t: f64, psi: &Wavefunction) -> Result<Wavefunction> {
    let mut values = Vec::with_capacity(psi.grid.len());
    for (&x, &v) in psi.grid.points().iter().zip(&psi.values) {
        let ph = potential_integral(sc, x, x + t)?;
        values.push((C64::new(0.0, 1.0) * ph).exp() * v);
    }
    Wavefunction::new(psi.grid.clone(), values)
}

/// Ω±ψ = lim_{T→±∞} e^{iTp_g}e^{−iTp}ψ.
///
/// For each x the phase ∫_x^{x±T} M is accumulated along the schedule and
/// extrapolated to T = ∞ by fitting L + Σ c_k u^{p_k}, u = 1/|x ± T|. Fits on
/// the first and last (#exponents + 1) times must give states within `tol`
/// of each other; otherwise the limit is not certified and a convergence
/// error is returned. The later fit is returned.
pub fn wave_operator_num(sc: &Scatterer, sign: Sign, psi: &Wavefunction, schedule: &ScatterSchedule) -> Result<Wavefunction> {
    let m = schedule.exponents.len() + 1;
    let times = &schedule.times;
    if times.len() < m + 1 || !times.windows(2).all(|w| w[1] > w[0]) || !(times[0] > 0.0) {
        return Err(domain(format!("schedule needs at least {} increasing positive times", m + 1)));
    }
    let sg = sign.value();
    let mut early = Vec::with_capacity(psi.grid.len());
    let mut late = Vec::with_capacity(psi.grid.len());
    for &x in psi.grid.points() {
        let mut acc = C64::new(0.0, 0.0);
        let mut prev = x;
        let mut phases = Vec::with_capacity(times.len());
        for &t in times {
            let end = x + sg * t;
            acc += potential_integral(sc, prev, end)?;
            prev = end;
            phases.push(acc);
        }
        let u: Vec<f64> = times.iter().map(|t| 1.0 / (x + sg * t).abs()).collect();
        let n = times.len();
        early.push(extrapolate(&u[..m], &phases[..m], &schedule.exponents)?);
        late.push(extrapolate(&u[n - m..], &phases[n - m..], &schedule.exponents)?);
    }
    // Ω⁺: exp(+i∫_x^∞ M); Ω⁻: exp(−i∫_{−∞}^x M) = exp(+i∫_x^{−∞} M)
    let phase_state = |ph: &[C64]| -> Result<Wavefunction> {
        let vals = ph.iter().zip(&psi.values).map(|(p, v)| (C64::new(0.0, 1.0) * p).exp() * v).collect();
        Wavefunction::new(psi.grid.clone(), vals)
    };
    let a = phase_state(&early)?;
    let mut b = phase_state(&late)?;
    let spread = a.distance(&b)?;
    if !(spread < schedule.tol) {
        return Err(Error::Convergence(format!(
            "wave operator not Cauchy: extrapolations differ by {spread:.3e} (tol {:.1e})",
            schedule.tol
        )));
    }
    b.meta = psi.meta.clone();
    b.meta.insert("cauchy_spread".into(), format!("{spread:.3e}"));
    Ok(b)
}

/// Value at u = 0 of the interpolant L + Σ c_k u^{p_k} through (u_j, y_j).
fn extrapolate(u: &[f64], y: &[C64], exps: &[f64]) -> Result<C64> {
    let n = u.len();
    let mut a: Vec<Vec<f64>> = u.iter().map(|&ui| std::iter::once(1.0).chain(exps.iter().map(|p| ui.powf(*p))).collect()).collect();
    let mut b: Vec<C64> = y.to_vec();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap_or(col);
        if a[piv][col].abs() < 1e-300 {
            return Err(Error::Convergence("degenerate extrapolation nodes".into()));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            let bc = b[col];
            b[r] -= bc * f;
        }
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s -= x[c] * a[r][c];
        }
        x[r] = s / a[r][r];
    }
    Ok(x[0])
}

/// S = exp(−i(√(2π)/λ)∫ ĝ(s)/s² ds).
///
/// Near the origin s = ±u² turns the integrand into 2ĝ(±u²)/u³, bounded by 2C
/// under the decay hypothesis; a quadrature failure there is reported as a
/// domain error since it signals a non-integrable singularity.
pub fn s_matrix_closed(sc: &Scatterer) -> Result<C64> {
    if matches!(sc.g_hat, GHat::Zero) {
        return Ok(C64::new(1.0, 0.0));
    }
    let e0 = sc.decay.map(|d| d.0).unwrap_or(1.0);
    let g = |s: f64| sc.g_hat.eval(s);
    let opts = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-13, max_panels: 20_000, max_panel_width: None };
    let sing = |e: Error| match e {
        Error::Accuracy { .. } => domain("∫ĝ(s)/s² ds does not converge at s = 0; the decay hypothesis fails"),
        e => e,
    };
    let ru = e0.sqrt();
    let inner = integrate_with(|u| (g(u * u) + g(-u * u)) * (2.0 / (u * u * u)), 0.0, ru, &opts).map_err(sing)?;
    let right = integrate_with(|s| g(s) / (s * s), e0, f64::INFINITY, &opts).map_err(sing)?;
    let left = integrate_with(|s| g(s) / (s * s), f64::NEG_INFINITY, -e0, &opts).map_err(sing)?;
    let total = inner.value + right.value + left.value;
    Ok((-C64::new(0.0, 1.0) * total * sc.prefactor()).exp())
}

/// ⟨Ω⁺ψ, Ω⁻ψ⟩/‖ψ‖².
pub fn s_matrix_num(sc: &Scatterer, psi: &Wavefunction, schedule: &ScatterSchedule) -> Result<C64> {
    let n2 = psi.norm_sqr();
    if !(n2 > 0.0) {
        return Err(domain("probe state must be nonzero"));
    }
    let p = wave_operator_num(sc, Sign::Plus, psi, schedule)?;
    let m = wave_operator_num(sc, Sign::Minus, psi, schedule)?;
    Ok(p.inner(&m)? / n2)
}
