use crate::Checks;
use luttinger_core::classical::*;
use luttinger_core::hankel::{resolvent_via_expansion, ExpansionOptions};
use luttinger_core::kernels::*;
use luttinger_core::operators::*;
use luttinger_core::quadrature::{integrate_pv_window, integrate_with, pv_limit, PVWindow, PvSchedule, QuadOptions};
use luttinger_core::scattering::*;
use luttinger_core::specfun::{i0, j0, kelvin_kei, kelvin_ker};
use luttinger_core::spectral::*;
use luttinger_core::wavefunction::{Grid, Wavefunction};
use luttinger_core::{Error, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// The five canonical states, normalized on `g`.
pub fn canonical_states(g: &Grid) -> Vec<Wavefunction> {
    let fs: [Box<dyn Fn(f64) -> C64>; 5] = [
        Box::new(|x| C64::new((-x * x / 2.0).exp(), 0.0)),
        Box::new(|x| C64::from_polar((-(x - 1.5f64).powi(2) / 0.72).exp(), 0.8 * x)),
        Box::new(|x| C64::new(x * (-x * x / 2.0).exp(), 0.0)),
        Box::new(|x| C64::new(1.0, x) * (-(x + 1.0f64).powi(2) / 2.0).exp()),
        Box::new(|x| C64::from_polar(1.0 / x.cosh(), 0.3 * x)),
    ];
    fs.iter().map(|f| Wavefunction::from_fn(g, f).normalized().expect("nonzero state")).collect()
}

fn norm_gap(a: &Wavefunction, b: &Wavefunction) -> f64 {
    (a.norm() - b.norm()).abs()
}

pub(crate) fn special_functions(seed: u64, c: &mut Checks) {
    match kelvin_kei(0.0) {
        Ok(v) => c.le("|kei(0) + π/4|", (v + PI / 4.0).abs(), 1e-12),
        Err(e) => c.error("kei(0)", e),
    }
    let mut r = rng(seed, 1);
    for _ in 0..200 {
        let x: f64 = r.gen_range(-30.0..30.0);
        c.worst("max |I₀(ix) − J₀(x)| over 200 samples", (i0(C64::new(0.0, x)) - j0(x)).norm(), 1e-10);
    }
}

pub(crate) fn principal_values(seed: u64, c: &mut Checks) {
    let mut r = rng(seed, 2);
    for _ in 0..25 {
        let (x, y): (f64, f64) = (r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0));
        let f = move |u: f64| C64::from_polar(1.0, x * u - y / u) / u;
        match pv_limit(f, &PvSchedule::scaled(x.abs(), y.abs()), 1e-6) {
            Ok(v) => c.worst("max |Δ| over 25 (x, y)", (v - pv_identity_xy(x, y)).norm(), 1e-4),
            Err(e) => c.error(format!("pv at ({x}, {y})"), e),
        }
    }
    let windows = [PVWindow { outer: 10.0, inner: 0.1 }, PVWindow { outer: 50.0, inner: 0.02 }, PVWindow { outer: 200.0, inner: 1e-3 }];
    for _ in 0..10 {
        let s: f64 = r.gen_range(-3.0..3.0);
        for (branch, sg) in [(Branch::Plus, 1.0), (Branch::Minus, -1.0)] {
            let f = move |u: f64| C64::from_polar(1.0, s * (u + sg / u)) / u;
            match pv_limit(f, &PvSchedule::scaled(s.abs(), s.abs()), 1e-6) {
                Ok(v) => c.worst("max |Δ| over 10 s, both branches", (v - pv_identity_g(s, branch)).norm(), 1e-4),
                Err(e) => c.error(format!("pv of G at s = {s}"), e),
            }
            for w in windows {
                match integrate_pv_window(f, w, 1e-11) {
                    Ok(q) => c.worst("max windowed modulus − 4π", q.value.norm() - 4.0 * PI, 1e-9),
                    Err(e) => c.error(format!("window ({}, {}) at s = {s}", w.outer, w.inner), e),
                }
            }
        }
    }
}

pub(crate) fn kelvin_integrals(_seed: u64, c: &mut Checks) {
    let xs: [f64; 10] = [0.3, 0.8, 1.7, 3.0, 5.5, -0.25, -0.9, -2.0, -3.5, -6.0];
    let opts = QuadOptions { abs_tol: 1e-11, rel_tol: 0.0, max_panels: 200_000, max_panel_width: None };
    for x in xs {
        let z = 2.0 * x.abs().sqrt();
        // ∫𝔹(x, y)/(1 + y²) dy = −2i·sgn(x)·kei(2√|x|)
        let f = |y: f64| kernel_b(x, y) / (1.0 + y * y);
        let v = integrate_with(f, f64::NEG_INFINITY, 0.0, &opts).and_then(|a| Ok(a.value + integrate_with(f, 0.0, f64::INFINITY, &opts)?.value));
        match (v, kelvin_kei(z)) {
            (Ok(v), Ok(k)) => c.worst("max |Δ| for 1/(1+y²)", (v - I * (-2.0 * x.signum() * k)).norm(), 1e-6),
            (Err(e), _) | (_, Err(e)) => c.error(format!("1/(1+y²) at x = {x}"), e),
        }
        // ∫𝔹(x, y)·y/(1 + y²) dy = −2i·ker(2√|x|); the tail only decays like |y|^{−3/4}
        // times an oscillation, so it goes through the tapered limit in s = √|y|
        let g = |s: f64| {
            if s <= 0.0 {
                return C64::new(0.0, 0.0);
            }
            let y = -x.signum() * s * s;
            kernel_b(x, y) * (y / (1.0 + y * y) * 2.0 * s)
        };
        match (pv_limit(g, &PvSchedule::scaled(z, 1.0), 1e-8), kelvin_ker(z)) {
            (Ok(v), Ok(k)) => c.worst("max |Δ| for y/(1+y²)", (v - I * (-2.0 * k)).norm(), 1e-6),
            (Err(e), _) | (_, Err(e)) => c.error(format!("y/(1+y²) at x = {x}"), e),
        }
    }
}

pub(crate) fn unitarity(_seed: u64, c: &mut Checks) {
    // closed-form paths
    let g = Grid::log_symmetric(0.0, 1e-9, 1e9, 2000).expect("grid");
    for psi in canonical_states(&g) {
        c.worst("I", norm_gap(&involution_i(&psi), &psi), 1e-8);
        c.worst("L_θ", norm_gap(&phase_l(1.7, &psi), &psi), 1e-8);
    }
    let p = ThermalParams::new(0.9).expect("λ");
    let g = Grid::uniform(-20.0, 20.0, 1601).expect("grid");
    for psi in canonical_states(&g) {
        match translate_s(p, &psi) {
            Ok(s) => c.worst("S_λ", norm_gap(&s, &psi), 1e-8),
            Err(e) => c.error("S_λ", e),
        }
    }
    let g = Grid::uniform(-30.0, 30.0, 12001).expect("grid");
    let flow = FlowParams::new(0.8, 0.05).expect("flow");
    for psi in canonical_states(&g) {
        c.worst("V_θ(t)", norm_gap(&propagate_v(flow, &psi), &psi), 1e-8);
    }
    // kernel-quadrature paths
    let o = HtOptions::default();
    let g = Grid::square_root(p.critical_point(), o.t_max, o.nodes).expect("grid");
    for psi in canonical_states(&g) {
        match propagate_ht(p, 0.3, &psi, HtBackend::Conjugation, &o) {
            Ok(u) => c.worst("U_T(t)", norm_gap(&u, &psi), 1e-5),
            Err(e) => c.error("U_T(t)", e),
        }
    }
    let g = Grid::log_symmetric(0.0, 1e-4, 1e6, 1200).expect("grid");
    for psi in canonical_states(&g) {
        c.worst("N_θ", norm_gap(&intertwiner_n(2.1, &psi), &psi), 1e-5);
    }
}

pub(crate) fn flow_group_law(seed: u64, c: &mut Checks) {
    let fin = |e: ExtReal| match e {
        ExtReal::Finite(v) => v,
        ExtReal::Infinity => f64::INFINITY,
    };
    let mut r = rng(seed, 5);
    let mut n = 0;
    while n < 1000 {
        let (t1, t2, x): (f64, f64, f64) = (r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0), r.gen_range(-6.0..6.0));
        if (1.0 - t2 * x).abs() < 0.05 || (1.0 - (t1 + t2) * x).abs() < 0.05 {
            continue;
        }
        let a = fin(flow_f(t1, flow_f(t2, ExtReal::Finite(x))));
        let b = fin(flow_f(t1 + t2, ExtReal::Finite(x)));
        c.worst("max relative |f_t₁∘f_t₂ − f_(t₁+t₂)|", (a - b).abs() / (1.0 + b.abs()), 1e-12);
        n += 1;
    }
    let g = Grid::uniform(-30.0, 30.0, 12001).expect("grid");
    let theta = 1.1;
    for psi in canonical_states(&g) {
        let v1 = propagate_v(FlowParams::new(theta, 0.05).expect("flow"), &psi);
        let v12 = propagate_v(FlowParams::new(theta, 0.03).expect("flow"), &v1);
        let v = propagate_v(FlowParams::new(theta, 0.08).expect("flow"), &psi);
        match v12.distance(&v) {
            Ok(d) => c.worst("V group law on states", d, 1e-5),
            Err(e) => c.error("V group law", e),
        }
    }
}

pub(crate) fn propagator_consistency(seed: u64, c: &mut Checks) {
    let p = ThermalParams::new(1.0).expect("λ");
    let g = Grid::uniform(-12.0, 12.0, 961).expect("grid");
    let o = HtOptions::default();
    let states = [(1.0, 0.5, 1.0), (-0.4, -0.8, 0.7), (2.5, 0.0, 1.3)];
    for (x0, k, s) in states {
        let psi = Wavefunction::from_fn(&g, |x| {
            C64::from_polar((-(x - x0).powi(2) / (2.0 * s * s)).exp() / (PI * s * s).powf(0.25), k * x)
        });
        let a = propagate_ht(p, 0.4, &psi, HtBackend::Conjugation, &o);
        let b = propagate_ht(p, 0.4, &psi, HtBackend::Kernel, &o);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                let d = a.values.iter().zip(&b.values).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
                c.worst("max |conjugation − kernel|", d, 1e-4);
            }
            (Err(e), _) | (_, Err(e)) => c.error("U_T backends", e),
        }
    }
    let mut r = rng(seed, 6);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let tau: f64 = r.gen_range(-10.0..10.0);
        let (x, y): (f64, f64) = (r.gen_range(-50.0..50.0), r.gen_range(-50.0..50.0));
        match kernel_u(tau, x, y) {
            Ok(k) => worst = worst.max(tau.abs() * k.norm()),
            Err(e) => return c.error("𝕌_τ", e),
        }
    }
    c.le("max |τ|·|𝕌_τ| − 1 over 10⁴ samples", worst - 1.0, 1e-12);
}

pub(crate) fn resolvent_triangle(_seed: u64, c: &mut Checks) {
    let alphas = [C64::new(0.0, 1.0), C64::new(1.0, 1.0), C64::new(0.0, -2.0)];
    let report = match select_variant(&alphas, 1e-4) {
        Ok(r) => r,
        Err(e) => return c.error("variant selection", e),
    };
    let Some(variant) = report.selected else {
        return c.error("variant selection", format!("no variant within 1e-4 (printed {:.2e}, minmax {:.2e})", report.max_dev_printed, report.max_dev_minmax));
    };
    let opts = ExpansionOptions::default();
    for e in &report.entries {
        let alpha = C64::new(e.alpha[0], e.alpha[1]);
        let oracle = C64::new(e.oracle[0], e.oracle[1]);
        let z = kernel_z(alpha, e.x, e.y, variant);
        let h = resolvent_via_expansion(alpha, e.x, e.y, &opts);
        match (z, h) {
            (Ok(z), Ok(h)) => {
                c.worst("|kernel_z − Laplace|", (z - oracle).norm(), 1e-4);
                c.worst("|kernel_z − expansion|", (z - h.value).norm(), 1e-4);
                c.worst("|Laplace − expansion|", (oracle - h.value).norm(), 1e-4);
            }
            (Err(err), _) | (_, Err(err)) => c.error(format!("α = {alpha}, ({}, {})", e.x, e.y), err),
        }
    }
    let mut exact = true;
    for theta in [0.0, 0.9, 3.0] {
        for zeta in [C64::new(0.4, 1.0), C64::new(-1.3, -0.2), C64::new(0.0, 2.0)] {
            for x in [-2.5, -0.3, 0.7, 4.0] {
                let want = C64::new(0.0, zeta.im.signum() / (2.0 * x * x));
                exact &= kernel_resolvent_pi(theta, zeta, x, x).map_or(false, |v| v == want);
            }
        }
    }
    c.holds("Π_θ diagonal equals sgn(Im ζ)·i/(2x²) exactly", exact);
}

pub(crate) fn spectral_closed_forms(_seed: u64, c: &mut Checks) {
    let thetas = [0.0, PI / 3.0, PI, 5.0];
    let cases = [(1.1, 0.5, 2.0), (-0.7, -3.0, -0.5), (2.0 * PI, 1.0, 2.0), (0.3, 0.01, 40.0)];
    let mut exact = true;
    for (eps, a, b) in cases {
        let reference = idos_interval(0.0, eps, a, b).unwrap_or(f64::NAN);
        for th in thetas {
            exact &= idos_interval(th, eps, a, b).map_or(false, |v| v == eps / (2.0 * PI * a * b));
            c.worst("θ-spread of idos_interval", (idos_interval(th, eps, a, b).unwrap_or(f64::NAN) - reference).abs(), 1e-10);
        }
        // independent route through the involution
        let via = idos_interval_via_transform(eps, a, b).unwrap_or(f64::NAN);
        c.worst("|idos_interval − involution route| (relative)", ((via - reference) / reference).abs(), 1e-14);
    }
    c.holds("idos_interval = ε/(2πab) exactly", exact);

    let target = 1.0 / (2.0 * PI);
    for (eps, l) in [(0.37, 1.0), (0.37, 25.0), (PI / 2.0, 1.0), (1.9, 7.0)] {
        match idos_momentum_sum(eps, l, 100_000) {
            Ok(s) => c.worst("|momentum sum − 1/(2π)|", (s.value - target).abs(), 1e-4),
            Err(e) => c.error("momentum sum", e),
        }
    }

    for eps in [-1.3, 0.4, 2.0] {
        let want = eps / (2.0 * PI);
        for th in thetas {
            c.worst("|pv_idos − ε/(2π)|", (pv_idos(th, eps) - want).abs(), 1e-10);
            for l in [10.0, 1e3, 1e6] {
                match pv_idos_window(th, eps, l) {
                    Ok(v) => c.worst("|windowed pv-IDOS − ε/(2π)|", (v - want).abs(), 1e-10),
                    Err(e) => c.error("pv window", e),
                }
            }
        }
    }

    for e in [0.25f64, 1.0, 7.0] {
        // t = √ε′ removes the endpoint singularity
        let r = integrate_with(|t| C64::new(dos_laplacian(t * t).unwrap_or(f64::NAN) * 2.0 * t, 0.0), 0.0, e.sqrt(), &QuadOptions::with_tol(1e-13));
        match r {
            Ok(v) => c.worst("|∫DOS − √ε/π|", (v.value.re - e.sqrt() / PI).abs(), 1e-8),
            Err(err) => c.error("DOS integral", err),
        }
    }

    // spectral measure mass of a state under Π_θ
    let g = Grid::log_symmetric(0.0, 1e-9, 1e9, 1500).expect("grid");
    let phi = Wavefunction::from_fn(&g, |x| C64::new((-x * x / 2.0).exp() / PI.powf(0.25), 0.0));
    let psi = involution_i(&phi).map(|x, v| v * C64::from_polar(1.0, 0.3 / (x.abs() + 0.1)));
    let energies: Vec<f64> = (0..=800).map(|i| -16.0 + 0.04 * i as f64).collect();
    let masses: Vec<f64> = thetas.iter().filter_map(|&t| spectral_density_pi(t, &psi, &energies).ok().map(|d| d.total_mass)).collect();
    if masses.len() != thetas.len() {
        c.error("spectral density", "evaluation failed");
    } else {
        let spread = masses.iter().map(|m| (m - masses[0]).abs()).fold(0.0, f64::max);
        c.le("θ-spread of spectral mass", spread, 1e-10);
    }
}

pub(crate) fn scattering(_seed: u64, c: &mut Checks) {
    let g = Grid::uniform(-10.0, 10.0, 801).expect("grid");
    let packet = |x0: f64, k: f64, s: f64| {
        Wavefunction::from_fn(&g, |x| C64::from_polar((-(x - x0).powi(2) / (2.0 * s * s)).exp() / (PI * s * s).powf(0.25), k * x))
    };
    let probes = [packet(0.0, 0.0, 1.0), packet(1.5, 0.8, 0.6), packet(-2.0, -1.2, 1.3)];
    let sched = ScatterSchedule::default();
    for name in ["gaussian_s2", "gaussian_s4", "lorentzian"] {
        let sc = match Scatterer::preset(name, 1.2) {
            Ok(s) => s,
            Err(e) => return c.error(name, e),
        };
        let closed = match s_matrix_closed(&sc) {
            Ok(v) => v,
            Err(e) => return c.error(format!("{name} closed form"), e),
        };
        for p in &probes {
            match s_matrix_num(&sc, p, &sched) {
                Ok(s) => {
                    c.worst("|S_num − S_closed|", (s - closed).norm(), 1e-4);
                    c.worst("||S| − 1|", (s.norm() - 1.0).abs(), 1e-6);
                }
                Err(e) => c.error(format!("{name} numeric"), e),
            }
        }
    }
    let bad = Scatterer::preset("linear_violating", 1.0);
    let failed_num = bad.as_ref().map_or(false, |s| {
        matches!(wave_operator_num(s, Sign::Plus, &probes[0], &sched), Err(Error::Convergence(_)))
    });
    let failed_closed = bad.as_ref().map_or(false, |s| matches!(s_matrix_closed(s), Err(Error::Domain(_))));
    c.holds("violating ĝ: numeric wave operator not certified", failed_num);
    c.holds("violating ĝ: closed form rejected", failed_closed);
}

pub(crate) fn classical_dynamics(_seed: u64, c: &mut Checks) {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
    let cfgs = [
        ClassicalConfig::new(1.0, 1.0, vec![1.0, 0.0], vec![0.2, -0.1], vec![0.5, 0.8]),
        ClassicalConfig::new(0.7, 1.6, vec![0.48, -0.6, 0.64], vec![0.3, 0.2, -0.4], vec![-0.2, 0.9, 0.45]),
    ];
    for cfg in cfgs {
        let cfg = match cfg {
            Ok(v) => v,
            Err(e) => return c.error("config", e),
        };
        let (ct, pl) = match (critical_times(&cfg), planes(&cfg)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return c.error("critical data", e),
        };
        let per = ct.period.unwrap_or(f64::NAN);
        // one period between consecutive poles of p, trimmed by 1%
        let (a, b) = (ct.t_c + 0.01 * per, ct.t_c + 0.99 * per);
        let run = closed_form_trajectory(&cfg, a).and_then(|s0| Ok((integrate_rk4(&cfg, &s0, b, per / 1e4)?, s0)));
        let (tr, s0) = match run {
            Ok(v) => v,
            Err(e) => return c.error("RK4", e),
        };
        let e0 = energy(&cfg, &s0);
        let pp0 = transverse_momentum(&cfg, &s0);
        let nu = invariants(&cfg).nu.unwrap_or_default();
        for s in &tr.states {
            match closed_form_trajectory(&cfg, s.t) {
                Ok(cf) => c.worst("sup |x_RK4 − x_closed|", s.x.iter().zip(&cf.x).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max), 1e-6),
                Err(e) => return c.error("closed form", e),
            }
            c.worst("relative energy drift", ((energy(&cfg, s) - e0) / e0).abs(), 1e-8);
            c.worst("℘⊥ drift", (transverse_momentum(&cfg, s) - pp0).abs(), 1e-10);
            let d: Vec<f64> = s.x.iter().zip(&cfg.rho0).map(|(u, v)| u - v).collect();
            let (cg, cn) = (dot(&d, &cfg.gamma), dot(&d, &nu));
            let resid = d.iter().zip(cfg.gamma.iter().zip(&nu)).map(|(u, (g, n))| (u - cg * g - cn * n).abs()).fold(0.0, f64::max);
            c.worst("planarity residual", resid, 1e-12);
        }
        for n in -1..=1 {
            let shift = n as f64 * per;
            c.worst("critical plane at t_c", pl.critical.signed_distance(&closed_form_position(&cfg, ct.t_c + shift)).abs(), 1e-9);
            let te = ct.t_e.unwrap_or(f64::NAN) + shift;
            c.worst("extremal plane at t_e", pl.extremal.signed_distance(&closed_form_position(&cfg, te)).abs(), 1e-9);
        }
    }
    for (rho, wp) in [(0.5, 0.8), (-3.0, -1.2), (2.0, -0.4)] {
        let r = ClassicalConfig::new(1.5, 0.8, vec![1.0], vec![rho], vec![wp]).and_then(|cfg| Ok((critical_times(&cfg)?.t_c, cfg)));
        match r {
            Ok((tc, cfg)) => c.worst("|x(t_c) + ℓ| (1D)", (closed_form_position(&cfg, tc)[0] + cfg.ell()).abs(), 1e-9),
            Err(e) => c.error("1D", e),
        }
    }
    // Lagrangian chart: q ↦ x ↦ q and the q-route position
    let cfg = match ClassicalConfig::new(1.1, 0.6, vec![1.0], vec![0.3], vec![-0.5]) {
        Ok(v) => v,
        Err(e) => return c.error("1D config", e),
    };
    let tc = critical_times(&cfg).map(|t| t.t_c).unwrap_or(f64::NAN);
    for i in 0..40 {
        let t = -5.0 + (tc + 5.0) * i as f64 / 40.0;
        match (lagrangian_q_solution(&cfg, t), closed_form_trajectory(&cfg, t)) {
            (Ok((q, _)), Ok(s)) => {
                let x = q_to_x(cfg.lambda, q);
                c.worst("|x(q) − x_closed|", (x - s.x[0]).abs(), 1e-10);
                match x_to_q(cfg.lambda, x) {
                    Ok(q2) => c.worst("q round trip", (q2 - q).abs() / (1.0 + q.abs()), 1e-10),
                    Err(e) => c.error("x_to_q", e),
                }
            }
            (Err(e), _) | (_, Err(e)) => c.error("Lagrangian route", e),
        }
    }
}

pub(crate) fn domain_diagnostics(_seed: u64, c: &mut Checks) {
    for theta in [0.0, 0.8, 2.5, 5.9] {
        let d = deficiency_vectors(theta);
        for x in [1e3f64, -1e3] {
            let want = C64::from_polar(1.0, x.signum() * theta / 2.0);
            c.worst("|x·ζ_θ(x) − e^{±iθ/2}| at ±10³", (d.zeta(x) * x - want).norm(), 1e-3);
        }
    }
    let g = Grid::log_symmetric(0.0, 1e-3, 1e3, 800).expect("grid");
    let threshold = 1e-2;
    let members: [(&str, Box<dyn Fn(f64) -> C64>); 3] = [
        ("Gaussian", Box::new(|x| C64::new((-x * x / 2.0).exp(), 0.0))),
        ("1/(1+x²)", Box::new(|x| C64::new(1.0 / (1.0 + x * x), 0.0))),
        ("η_θ", Box::new(|x| deficiency_vectors(0.8).eta(x))),
    ];
    let non_members: [(&str, Box<dyn Fn(f64) -> C64>); 3] = [
        ("x/(1+x²)", Box::new(|x| C64::new(x / (1.0 + x * x), 0.0))),
        ("(1+x²)^(−1/2)", Box::new(|x| C64::new(1.0 / (1.0 + x * x).sqrt(), 0.0))),
        ("ζ_θ", Box::new(|x| deficiency_vectors(0.8).zeta(x))),
    ];
    let flagged = |f: &dyn Fn(f64) -> C64| decay_diagnostic(&Wavefunction::from_fn(&g, f)) < threshold;
    for (name, f) in &members {
        c.holds(format!("{name} classified as decaying"), flagged(f.as_ref()));
    }
    for (name, f) in &non_members {
        c.holds(format!("{name} classified as non-decaying"), !flagged(f.as_ref()));
    }
}
