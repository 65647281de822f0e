//! Classical dynamics of H(x, p) = (1 + λγ·x)p²/(2m) in ℝ^d: Hamilton
//! equations, the thermal force, closed-form solutions in the three regimes
//! and a fixed-step RK4 integrator to check them against.

use crate::error::{domain, Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalConfig {
    pub m: f64,
    pub lambda: f64,
    pub gamma: Vec<f64>,
    /// Initial position ϱ.
    pub rho0: Vec<f64>,
    /// Initial momentum ℘.
    pub wp0: Vec<f64>,
}

impl Default for ClassicalConfig {
    fn default() -> Self {
        Self { m: 1.0, lambda: 1.0, gamma: vec![1.0, 0.0, 0.0], rho0: vec![0.0; 3], wp0: vec![0.3, 0.8, 0.0] }
    }
}

impl ClassicalConfig {
    pub fn new(m: f64, lambda: f64, gamma: Vec<f64>, rho0: Vec<f64>, wp0: Vec<f64>) -> Result<Self> {
        let c = Self { m, lambda, gamma, rho0, wp0 };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0 && self.m.is_finite()) {
            return Err(domain(format!("mass must be positive, got {}", self.m)));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(domain(format!("λ must be positive, got {}", self.lambda)));
        }
        let d = self.gamma.len();
        if d == 0 || self.rho0.len() != d || self.wp0.len() != d {
            return Err(Error::Shape(format!(
                "gamma, rho0, wp0 must share a positive dimension (got {}, {}, {})",
                d,
                self.rho0.len(),
                self.wp0.len()
            )));
        }
        if (norm(&self.gamma) - 1.0).abs() > 1e-12 {
            return Err(domain(format!("|gamma| must be 1, got {}", norm(&self.gamma))));
        }
        if self.rho0.iter().chain(&self.wp0).any(|v| !v.is_finite()) {
            return Err(domain("initial data must be finite"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// ℓ = 1/λ.
    pub fn ell(&self) -> f64 {
        1.0 / self.lambda
    }

    pub fn initial_state(&self) -> ClassicalState {
        ClassicalState { t: 0.0, x: self.rho0.clone(), p: self.wp0.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalState {
    pub t: f64,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// a + s·b
fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(u, v)| u + s * v).collect()
}

fn transverse(gamma: &[f64], v: &[f64]) -> Vec<f64> {
    axpy(v, -dot(gamma, v), gamma)
}

/// E = (1 + λγ·x)p²/(2m).
pub fn energy(cfg: &ClassicalConfig, s: &ClassicalState) -> f64 {
    (1.0 + cfg.lambda * dot(&cfg.gamma, &s.x)) * dot(&s.p, &s.p) / (2.0 * cfg.m)
}

/// ℘_⊥ = |p − (γ·p)γ|.
pub fn transverse_momentum(cfg: &ClassicalConfig, s: &ClassicalState) -> f64 {
    norm(&transverse(&cfg.gamma, &s.p))
}

/// (ẋ, ṗ) = ((1 + λγ·x)p/m, −λ(p²/2m)γ).
pub fn hamilton_rhs(cfg: &ClassicalConfig, s: &ClassicalState) -> (Vec<f64>, Vec<f64>) {
    let c = (1.0 + cfg.lambda * dot(&cfg.gamma, &s.x)) / cfg.m;
    let k = -cfg.lambda * dot(&s.p, &s.p) / (2.0 * cfg.m);
    (s.p.iter().map(|v| c * v).collect(), cfg.gamma.iter().map(|g| k * g).collect())
}

/// Completes γ to an orthonormal basis: Gram–Schmidt over the canonical
/// vectors in order, skipping near-dependent ones. The result is (e₁, …, e_{d−1}).
pub fn orthonormal_completion(gamma: &[f64]) -> Result<Vec<Vec<f64>>> {
    let d = gamma.len();
    if d == 0 || (norm(gamma) - 1.0).abs() > 1e-12 {
        return Err(domain("gamma must be a unit vector"));
    }
    let mut basis: Vec<Vec<f64>> = vec![gamma.to_vec()];
    for i in 0..d {
        if basis.len() == d {
            break;
        }
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        // two passes for orthogonality to roundoff
        for _ in 0..2 {
            for b in &basis {
                v = axpy(&v, -dot(b, &v), b);
            }
        }
        let n = norm(&v);
        if n > 0.5 / (d as f64).sqrt() {
            basis.push(v.iter().map(|c| c / n).collect());
        }
    }
    basis.remove(0);
    Ok(basis)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// ℘_⊥ ≠ 0: planar, periodic in the γ direction.
    Generic,
    /// ℘_⊥ = 0, ℘ ≠ 0: motion along γ only.
    OneDimensional,
    /// ℘ = 0: at rest.
    Exceptional,
}

/// Constants of motion and derived quantities of a configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Invariants {
    pub regime: Regime,
    /// ϱ₀ = γ·ϱ
    pub rho_par: f64,
    /// ℘₀ = γ·℘
    pub wp_par: f64,
    pub wp_perp: f64,
    /// Unit direction of the transverse momentum (generic regime).
    pub nu: Option<Vec<f64>>,
    /// φ = arctan(℘₀/℘_⊥) (generic regime).
    pub phi: f64,
    pub e0: f64,
}

pub fn invariants(cfg: &ClassicalConfig) -> Invariants {
    let s = cfg.initial_state();
    let wp_par = dot(&cfg.gamma, &cfg.wp0);
    let tr = transverse(&cfg.gamma, &cfg.wp0);
    let wp_perp = norm(&tr);
    let pn = norm(&cfg.wp0);
    let regime = if pn == 0.0 {
        Regime::Exceptional
    } else if wp_perp <= 1e-14 * pn {
        Regime::OneDimensional
    } else {
        Regime::Generic
    };
    let (nu, phi) = match regime {
        Regime::Generic => (Some(tr.iter().map(|v| v / wp_perp).collect()), (wp_par / wp_perp).atan()),
        _ => (None, 0.0),
    };
    Invariants { regime, rho_par: dot(&cfg.gamma, &cfg.rho0), wp_par, wp_perp, nu, phi, e0: energy(cfg, &s) }
}

fn is_pole(arg: f64, scale: f64) -> bool {
    arg.abs() <= 8.0 * f64::EPSILON * scale
}

/// Position on the closed-form trajectory; finite at critical times too.
pub fn closed_form_position(cfg: &ClassicalConfig, t: f64) -> Vec<f64> {
    let inv = invariants(cfg);
    let ell = cfg.ell();
    match inv.regime {
        Regime::Exceptional => cfg.rho0.clone(),
        Regime::OneDimensional => {
            let s = inv.wp_par * t / (2.0 * cfg.m) + ell;
            let dx = (ell + inv.rho_par) / (ell * ell) * s * s - ell - inv.rho_par;
            axpy(&cfg.rho0, dx, &cfg.gamma)
        }
        Regime::Generic => {
            let nu = inv.nu.as_ref().expect("generic regime has ν");
            let w = cfg.lambda * inv.wp_perp / (2.0 * cfg.m);
            let arg = inv.phi - w * t;
            let cphi = inv.phi.cos();
            let a = (ell + inv.rho_par) / (cphi * cphi);
            let f0 = arg.cos().powi(2) - cphi * cphi;
            let fp = w * t - 0.5 * ((2.0 * arg).sin() - (2.0 * inv.phi).sin());
            let x = axpy(&cfg.rho0, a * f0, &cfg.gamma);
            axpy(&x, a * fp, nu)
        }
    }
}

/// Closed-form state at time t. The momentum diverges at critical times,
/// where a critical-time error is returned ([`closed_form_position`] stays finite).
pub fn closed_form_trajectory(cfg: &ClassicalConfig, t: f64) -> Result<ClassicalState> {
    cfg.validate()?;
    let inv = invariants(cfg);
    let ell = cfg.ell();
    let x = closed_form_position(cfg, t);
    let p = match inv.regime {
        Regime::Exceptional => vec![0.0; cfg.dim()],
        Regime::OneDimensional => {
            let u = inv.wp_par * t / (2.0 * cfg.m);
            let s = u + ell;
            if is_pole(s, ell.max(u.abs())) {
                return Err(Error::CriticalTime(t));
            }
            let tr = transverse(&cfg.gamma, &cfg.wp0);
            axpy(&tr, ell * inv.wp_par / s, &cfg.gamma)
        }
        Regime::Generic => {
            let w = cfg.lambda * inv.wp_perp / (2.0 * cfg.m);
            let arg = inv.phi - w * t;
            // distance of arg to the nearest odd multiple of π/2
            let off = arg - PI * ((arg / PI - 0.5).round() + 0.5);
            if is_pole(off, arg.abs().max(1.0)) {
                return Err(Error::CriticalTime(t));
            }
            let tr = transverse(&cfg.gamma, &cfg.wp0);
            axpy(&tr, inv.wp_perp * arg.tan(), &cfg.gamma)
        }
    };
    Ok(ClassicalState { t, x, p })
}

/// x₀ recovered from p₀ through energy conservation:
/// x₀ = (℘₀² + ℘_⊥²)/(p₀² + ℘_⊥²)·(ℓ + ϱ₀) − ℓ.
pub fn x0_from_p0(cfg: &ClassicalConfig, p0: f64) -> Result<f64> {
    let inv = invariants(cfg);
    let den = p0 * p0 + inv.wp_perp * inv.wp_perp;
    if den == 0.0 {
        return Err(domain("x₀ is not determined by p₀ when p = 0"));
    }
    let ell = cfg.ell();
    Ok((inv.wp_par.powi(2) + inv.wp_perp.powi(2)) / den * (ell + inv.rho_par) - ell)
}

fn mass_factor(cfg: &ClassicalConfig, x: &[f64]) -> Result<f64> {
    let f = 1.0 + cfg.lambda * dot(&cfg.gamma, x);
    if f == 0.0 {
        return Err(Error::Pole("x lies on the critical plane, where m_T diverges".into()));
    }
    Ok(f)
}

/// F_T = m_T(x)[(γ·ẋ)ẋ − (ẋ²/2)γ] with m_T = m/(1 + λγ·x); m ẍ = λF_T.
pub fn thermal_force(cfg: &ClassicalConfig, x: &[f64], xdot: &[f64]) -> Result<Vec<f64>> {
    let mt = cfg.m / mass_factor(cfg, x)?;
    let gv = dot(&cfg.gamma, xdot);
    let v2 = dot(xdot, xdot);
    Ok(xdot.iter().zip(&cfg.gamma).map(|(v, g)| mt * (gv * v - 0.5 * v2 * g)).collect())
}

/// Splits F_T(x, p) into a gradient part and the reaction R_T = (d(γ·x)/dt)·p.
///
/// The gradient part is −(1 + λγ·x)∇T_γ = −(m/m_T)(p²/2m)γ; the bare −∇T_γ
/// misses the factor 1 + λγ·x and does not sum to F_T off the plane γ·x = 0.
pub fn force_decomposition(cfg: &ClassicalConfig, x: &[f64], p: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let f = mass_factor(cfg, x)?;
    let k = dot(p, p) / (2.0 * cfg.m);
    let grad: Vec<f64> = cfg.gamma.iter().map(|g| -f * k * g).collect();
    let x0dot = f * dot(&cfg.gamma, p) / cfg.m;
    let react = p.iter().map(|v| x0dot * v).collect();
    Ok((grad, react))
}

/// F_T in the basis (γ, e₁, …, e_{d−1}) of [`orthonormal_completion`], from the
/// conserved quantities: F₀ = E₀ − (1 + λx₀)℘_⊥²/m, F_j = (1 + λx₀)p₀℘_j/m.
pub fn thermal_force_components(cfg: &ClassicalConfig, s: &ClassicalState) -> Result<Vec<f64>> {
    let inv = invariants(cfg);
    let f = mass_factor(cfg, &s.x)?;
    let p0 = dot(&cfg.gamma, &s.p);
    let mut out = vec![inv.e0 - f * inv.wp_perp.powi(2) / cfg.m];
    for e in orthonormal_completion(&cfg.gamma)? {
        out.push(f * p0 * dot(&e, &cfg.wp0) / cfg.m);
    }
    Ok(out)
}

/// The hyperplane {x : normal·x = offset}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Hyperplane {
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Planes {
    /// Ξ_c: γ·x = −ℓ
    pub critical: Hyperplane,
    /// Ξ_e: γ·x = ϱ₀ + (℘₀/℘_⊥)²(ℓ + ϱ₀)
    pub extremal: Hyperplane,
}

pub fn critical_plane(cfg: &ClassicalConfig) -> Hyperplane {
    Hyperplane { normal: cfg.gamma.clone(), offset: -cfg.ell() }
}

pub fn planes(cfg: &ClassicalConfig) -> Result<Planes> {
    let inv = invariants(cfg);
    if inv.regime != Regime::Generic {
        return Err(domain("the extremal plane needs ℘_⊥ ≠ 0 (one-dimensional or exceptional regime)"));
    }
    let r = inv.wp_par / inv.wp_perp;
    Ok(Planes {
        critical: critical_plane(cfg),
        extremal: Hyperplane { normal: cfg.gamma.clone(), offset: inv.rho_par + r * r * (cfg.ell() + inv.rho_par) },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalTimes {
    pub t_c: f64,
    /// Present in the generic regime only.
    pub period: Option<f64>,
    /// First extremal time t_e = 2φℓm/℘_⊥ (generic regime).
    pub t_e: Option<f64>,
}

/// Generic: t_c = (2φ − π)ℓm/℘_⊥, T = 2πℓm/℘_⊥. One-dimensional: t_c = −2mℓ/℘₀.
pub fn critical_times(cfg: &ClassicalConfig) -> Result<CriticalTimes> {
    let inv = invariants(cfg);
    let lm = cfg.ell() * cfg.m;
    match inv.regime {
        Regime::Generic => Ok(CriticalTimes {
            t_c: (2.0 * inv.phi - PI) * lm / inv.wp_perp,
            period: Some(2.0 * PI * lm / inv.wp_perp),
            t_e: Some(2.0 * inv.phi * lm / inv.wp_perp),
        }),
        Regime::OneDimensional => Ok(CriticalTimes { t_c: -2.0 * lm / inv.wp_par, period: None, t_e: None }),
        Regime::Exceptional => Err(domain("no critical time: the particle is at rest")),
    }
}

/// q = (1/λ)log(x + 1/λ), valid for x > −ℓ.
pub fn x_to_q(lambda: f64, x: f64) -> Result<f64> {
    let a = x + 1.0 / lambda;
    if !(a > 0.0) {
        return Err(domain(format!("x = {x} is outside the chart x > −ℓ")));
    }
    Ok(a.ln() / lambda)
}

/// x = e^{λq} − 1/λ.
pub fn q_to_x(lambda: f64, q: f64) -> f64 {
    (lambda * q).exp() - 1.0 / lambda
}

/// One-dimensional solution in the chart q: q(t) = q₀ + (2/λ)log(1 + q̇₀λt/2),
/// q̇(t) = q̇₀/(1 + q̇₀λt/2), with q̇₀ = ℘₀/m.
pub fn lagrangian_q_solution(cfg: &ClassicalConfig, t: f64) -> Result<(f64, f64)> {
    let inv = invariants(cfg);
    if inv.regime == Regime::Generic {
        return Err(domain("the q chart describes the one-dimensional regime (℘_⊥ = 0)"));
    }
    let q0 = x_to_q(cfg.lambda, inv.rho_par)?;
    let qd0 = inv.wp_par / cfg.m;
    let a = 1.0 + qd0 * cfg.lambda * t / 2.0;
    if !(a > 0.0) {
        return Err(domain(format!("t = {t} leaves the chart (past the critical time)")));
    }
    Ok((q0 + 2.0 / cfg.lambda * a.ln(), qd0 / a))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<ClassicalState>,
}

impl Trajectory {
    /// CSV columns t, x0.., p0.., E, p_perp.
    pub fn write_csv<W: Write>(&self, cfg: &ClassicalConfig, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let d = cfg.dim();
        let mut header = vec!["t".to_string()];
        header.extend((0..d).map(|i| format!("x{i}")));
        header.extend((0..d).map(|i| format!("p{i}")));
        header.push("E".into());
        header.push("p_perp".into());
        w.write_record(&header).map_err(csv_err)?;
        for s in &self.states {
            let mut row = vec![s.t];
            row.extend(&s.x);
            row.extend(&s.p);
            row.push(energy(cfg, s));
            row.push(transverse_momentum(cfg, s));
            w.write_record(row.iter().map(|v| format!("{v:.17e}"))).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Momentum norm beyond which integration stops.
pub const BLOW_UP_GUARD: f64 = 1e8;

/// Fixed-step RK4 from `s0` to `t_end` (either direction). The step is
/// shrunk to land on t_end exactly.
pub fn integrate_rk4(cfg: &ClassicalConfig, s0: &ClassicalState, t_end: f64, dt: f64) -> Result<Trajectory> {
    cfg.validate()?;
    if !(dt > 0.0) || !t_end.is_finite() {
        return Err(domain("RK4 needs dt > 0 and a finite end time"));
    }
    let d = cfg.dim();
    if s0.x.len() != d || s0.p.len() != d {
        return Err(Error::Shape("state dimension differs from the configuration".into()));
    }
    let span = t_end - s0.t;
    let n = ((span.abs() / dt).ceil() as usize).max(1);
    let h = span / n as f64;
    let mut states = Vec::with_capacity(n + 1);
    states.push(s0.clone());
    let mut cur = s0.clone();
    for i in 1..=n {
        let at = |s: &ClassicalState, k: &(Vec<f64>, Vec<f64>), c: f64| ClassicalState {
            t: s.t,
            x: axpy(&s.x, c, &k.0),
            p: axpy(&s.p, c, &k.1),
        };
        let k1 = hamilton_rhs(cfg, &cur);
        let k2 = hamilton_rhs(cfg, &at(&cur, &k1, h / 2.0));
        let k3 = hamilton_rhs(cfg, &at(&cur, &k2, h / 2.0));
        let k4 = hamilton_rhs(cfg, &at(&cur, &k3, h));
        let comb = |a: &[f64], b: &[f64], c: &[f64], e: &[f64], base: &[f64]| -> Vec<f64> {
            (0..d).map(|j| base[j] + h / 6.0 * (a[j] + 2.0 * b[j] + 2.0 * c[j] + e[j])).collect()
        };
        let next = ClassicalState {
            t: s0.t + h * i as f64,
            x: comb(&k1.0, &k2.0, &k3.0, &k4.0, &cur.x),
            p: comb(&k1.1, &k2.1, &k3.1, &k4.1, &cur.p),
        };
        let pn = norm(&next.p);
        if !(pn <= BLOW_UP_GUARD) || next.x.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp { t: cur.t, p_norm: pn, x: cur.x, p: cur.p });
        }
        states.push(next.clone());
        cur = next;
    }
    Ok(Trajectory { states })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg2(rho: [f64; 2], wp: [f64; 2]) -> ClassicalConfig {
        ClassicalConfig::new(1.3, 0.7, vec![1.0, 0.0], rho.to_vec(), wp.to_vec()).unwrap()
    }

    #[test]
    fn energy_and_rhs_examples() {
        let c = cfg2([0.0, 0.0], [0.4, 0.9]);
        let on_plane = ClassicalState { t: 0.0, x: vec![-c.ell(), 2.0], p: vec![3.0, -1.0] };
        assert_eq!(energy(&c, &on_plane), 0.0);
        let (xd, pd) = hamilton_rhs(&c, &on_plane);
        assert!(xd.iter().all(|v| *v == 0.0) && pd[0] != 0.0);
        let rest = ClassicalState { t: 0.0, x: vec![0.3, 0.1], p: vec![0.0, 0.0] };
        assert_eq!(energy(&c, &rest), 0.0);
        assert_eq!(hamilton_rhs(&c, &rest), (vec![0.0, 0.0], vec![0.0, 0.0]));
        for &r in &[-3.0, -1.0, 0.5] {
            let e = invariants(&cfg2([r, 0.0], [0.2, 0.3])).e0;
            assert_eq!(e.signum(), (1.0 + 0.7 * r).signum());
        }
    }

    #[test]
    fn completion_is_orthonormal() {
        let g = vec![0.48, -0.6, 0.64];
        let e = orthonormal_completion(&g).unwrap();
        assert_eq!(e.len(), 2);
        let mut all = vec![g];
        all.extend(e);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&all[i], &all[j]) - want).abs() < 1e-15);
            }
        }
        assert_eq!(orthonormal_completion(&[1.0, 0.0, 0.0]).unwrap(), vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
    }

    #[test]
    fn critical_time_error_and_limits() {
        let c = cfg2([0.2, 0.0], [0.5, 0.0]);
        let tc = critical_times(&c).unwrap().t_c;
        assert!(matches!(closed_form_trajectory(&c, tc), Err(Error::CriticalTime(_))));
        assert!((closed_form_position(&c, tc)[0] + c.ell()).abs() < 1e-12);
        let g = cfg2([0.2, 0.0], [0.5, 0.6]);
        let ct = critical_times(&g).unwrap();
        assert!(matches!(closed_form_trajectory(&g, ct.t_c + ct.period.unwrap()), Err(Error::CriticalTime(_))));
        assert!(closed_form_trajectory(&g, ct.t_c + 1e-6).is_ok());
    }
}
