//! One function per subcommand. Each reads typed parameters, computes, and
//! writes its artifacts into the output directory.

use crate::config::{schema, CliError, Effective, Experiment};
use crate::output::{base_meta, write_file, write_json, Csv};
use luttinger_core::classical::{self as cl, ClassicalConfig, Regime};
use luttinger_core::hankel::{resolvent_via_expansion, ExpansionOptions};
use luttinger_core::kernels::{self as kn, FVariant};
use luttinger_core::operators::{self as op, FlowParams, HtBackend, HtOptions, ThermalParams};
use luttinger_core::scattering::{s_matrix_closed, s_matrix_num, ScatterSchedule, Scatterer};
use luttinger_core::specfun;
use luttinger_core::spectral as sp;
use luttinger_core::wavefunction::{Grid, Wavefunction};
use luttinger_core::{Error, C64};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::f64::consts::PI;

fn cpx(v: C64) -> [f64; 2] {
    [v.re, v.im]
}

/// Evaluates `f` on every item with up to `threads` scoped workers; order is kept.
fn par_map<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    if threads <= 1 || items.len() < 2 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub n: usize,
}

impl Range {
    fn new(start: f64, stop: f64, n: usize) -> Self {
        Self { start, stop, n }
    }

    fn points(&self, what: &str) -> Result<Vec<f64>, CliError> {
        if !(self.start.is_finite() && self.stop.is_finite()) || self.n == 0 || (self.n > 1 && !(self.stop > self.start)) {
            return Err(schema(format!("{what}: range needs finite start < stop and n ≥ 1")));
        }
        if self.n == 1 {
            return Ok(vec![self.start]);
        }
        let h = (self.stop - self.start) / (self.n - 1) as f64;
        Ok((0..self.n).map(|i| self.start + h * i as f64).collect())
    }
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(schema(format!("{name} must be positive, got {v}")))
    }
}

fn non_real(name: &str, v: [f64; 2]) -> Result<C64, CliError> {
    if v[1] == 0.0 || !v[0].is_finite() || !v[1].is_finite() {
        return Err(schema(format!("{name} must be finite with nonzero imaginary part, got {v:?}")));
    }
    Ok(C64::new(v[0], v[1]))
}

/// Outcome of a command: JSON summary plus a flag for numerical failure
/// that should still leave the artifacts on disk.
pub struct Outcome {
    pub failure: Option<String>,
}

impl Outcome {
    fn ok() -> Self {
        Self { failure: None }
    }
}

fn summary<P: Serialize>(eff: &Effective<P>, body: Value) -> Value {
    let mut v = json!({ "config_hash": eff.hash(), "config": eff.to_value() });
    if let (Value::Object(m), Value::Object(b)) = (&mut v, body) {
        m.extend(b);
    }
    v
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecialFunction {
    J0,
    I0,
    K0,
    Ker,
    Kei,
    KelvinK,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpecfunParams {
    pub function: SpecialFunction,
    /// Explicit abscissae; overrides `range`.
    pub points: Option<Vec<f64>>,
    pub range: Range,
    /// For i0 and k0 the argument is x·e^{i·arg}.
    pub arg: f64,
}

impl Default for SpecfunParams {
    fn default() -> Self {
        Self { function: SpecialFunction::Kei, points: None, range: Range::new(0.0, 10.0, 101), arg: 0.0 }
    }
}

pub fn specfun(exp: &Experiment) -> Result<Outcome, CliError> {
    let p: SpecfunParams = exp.typed_params()?;
    let xs = match &p.points {
        Some(v) if !v.is_empty() => v.clone(),
        Some(_) => return Err(schema("points must not be empty")),
        None => p.range.points("range")?,
    };
    let eff = Effective { command: "specfun", params: &p, seed: exp.seed, tol: 1e-12 };
    let ph = C64::from_polar(1.0, p.arg);
    let mut csv = Csv::new(&["x", "re", "im"]);
    for &x in &xs {
        let v = match p.function {
            SpecialFunction::J0 => C64::new(specfun::bessel_j0(x)?, 0.0),
            SpecialFunction::I0 => specfun::bessel_i0(ph * x)?,
            SpecialFunction::K0 => specfun::bessel_k0(ph * x)?,
            SpecialFunction::Ker => C64::new(specfun::kelvin_ker(x)?, 0.0),
            SpecialFunction::Kei => C64::new(specfun::kelvin_kei(x)?, 0.0),
            SpecialFunction::KelvinK => C64::new(specfun::kelvin_ker(x)?, specfun::kelvin_kei(x)?),
        };
        csv.row(&[x, v.re, v.im]);
    }
    let meta = base_meta(&eff.hash(), &[("relative", 1e-12)]);
    write_file(&exp.output_path, "specfun.csv", &csv.finish(&meta))?;
    write_json(&exp.output_path, "specfun.json", &summary(&eff, json!({ "points": xs.len() })))?;
    Ok(Outcome::ok())
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    B,
    U,
    Z,
    ZLaplace,
    GreenP,
    ResolventPi,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Minmax,
    Printed,
}

impl From<Variant> for FVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Minmax => FVariant::MinMax,
            Variant::Printed => FVariant::Printed,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelParams {
    pub kernel: KernelKind,
    pub x: Range,
    pub y: Range,
    pub tau: f64,
    pub alpha: [f64; 2],
    pub zeta: [f64; 2],
    pub theta: f64,
    pub variant: Variant,
}

impl Default for KernelParams {
    fn default() -> Self {
        Self {
            kernel: KernelKind::B,
            x: Range::new(-3.0, 3.0, 31),
            y: Range::new(-3.0, 3.0, 31),
            tau: 1.0,
            alpha: [0.0, 1.0],
            zeta: [0.0, 1.0],
            theta: 0.0,
            variant: Variant::Minmax,
        }
    }
}

pub fn kernel(exp: &Experiment) -> Result<Outcome, CliError> {
    let p: KernelParams = exp.typed_params()?;
    let (xs, ys) = (p.x.points("x")?, p.y.points("y")?);
    match p.kernel {
        KernelKind::U if p.tau == 0.0 || !p.tau.is_finite() => return Err(schema("tau must be finite and nonzero")),
        KernelKind::Z | KernelKind::ZLaplace => {
            non_real("alpha", p.alpha)?;
        }
        KernelKind::GreenP | KernelKind::ResolventPi => {
            non_real("zeta", p.zeta)?;
        }
        _ => {}
    }
    let tol = exp.tol_or(1e-8);
    let eff = Effective { command: "kernel", params: &p, seed: exp.seed, tol };
    let (alpha, zeta) = (C64::new(p.alpha[0], p.alpha[1]), C64::new(p.zeta[0], p.zeta[1]));
    let pairs: Vec<(f64, f64)> = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect();
    let eval = |&(x, y): &(f64, f64)| -> luttinger_core::Result<C64> {
        match p.kernel {
            KernelKind::B => Ok(kn::kernel_b(x, y)),
            KernelKind::U => kn::kernel_u(p.tau, x, y),
            KernelKind::Z => kn::kernel_z(alpha, x, y, p.variant.into()),
            KernelKind::ZLaplace => kn::kernel_z_laplace(alpha, x, y, tol),
            KernelKind::GreenP => kn::kernel_green_p(zeta, x, y),
            KernelKind::ResolventPi => kn::kernel_resolvent_pi(p.theta, zeta, x, y),
        }
    };
    let values = par_map(&pairs, exp.threads, eval);
    let mut csv = Csv::new(&["x", "y", "re", "im"]);
    let mut singular = 0usize;
    for (&(x, y), v) in pairs.iter().zip(values) {
        let v = match v {
            Ok(v) => v,
            // kernel poles on x = 0 or y = 0 are part of the data, not a failure
            Err(Error::Pole(_)) => {
                singular += 1;
                C64::new(f64::NAN, f64::NAN)
            }
            Err(e) => return Err(e.into()),
        };
        csv.row(&[x, y, v.re, v.im]);
    }
    let meta = base_meta(&eff.hash(), &[("quadrature", tol)]);
    write_file(&exp.output_path, "kernel.csv", &csv.finish(&meta))?;
    write_json(&exp.output_path, "kernel.json", &summary(&eff, json!({ "points": pairs.len(), "singular_points": singular })))?;
    Ok(Outcome::ok())
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    /// U_T(t)
    Ht,
    /// V_θ(t)
    V,
    I,
    L,
    S,
    /// N_θ
    N,
    /// e^{−itp_g}
    Pg,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateInput {
    Gaussian { x0: f64, k: f64, sigma: f64 },
    /// A wavefunction CSV (x,re,im); the grid comes with it.
    File { path: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridChoice {
    Uniform { start: f64, stop: f64, n: usize },
    LogSymmetric { center: f64, min_offset: f64, max_offset: f64, n_side: usize },
    SquareRoot { center: f64, t_max: f64, n: usize },
}

impl GridChoice {
    fn build(&self) -> Result<Grid, CliError> {
        let g = match *self {
            GridChoice::Uniform { start, stop, n } => Grid::uniform(start, stop, n),
            GridChoice::LogSymmetric { center, min_offset, max_offset, n_side } => Grid::log_symmetric(center, min_offset, max_offset, n_side),
            GridChoice::SquareRoot { center, t_max, n } => Grid::square_root(center, t_max, n),
        };
        g.map_err(|e| schema(format!("grid: {e}")))
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Conjugation,
    Kernel,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PropagateParams {
    pub operator: Operator,
    pub state: StateInput,
    /// Default depends on the operator: square-root grid at x_c for `ht`,
    /// log-symmetric for `i` and `n`, uniform otherwise.
    pub grid: Option<GridChoice>,
    pub t: f64,
    pub lambda: f64,
    pub theta: f64,
    pub backend: Backend,
    pub t_max: f64,
    pub nodes: usize,
    /// ĝ preset for `pg`.
    pub g_hat: String,
}

impl Default for PropagateParams {
    fn default() -> Self {
        let o = HtOptions::default();
        Self {
            operator: Operator::Ht,
            state: StateInput::Gaussian { x0: 1.0, k: 0.5, sigma: 1.0 },
            grid: None,
            t: 0.3,
            lambda: 1.0,
            theta: 0.0,
            backend: Backend::Conjugation,
            t_max: o.t_max,
            nodes: o.nodes,
            g_hat: "gaussian_s2".into(),
        }
    }
}

pub fn propagate(exp: &Experiment) -> Result<Outcome, CliError> {
    let mut p: PropagateParams = exp.typed_params()?;
    positive("lambda", p.lambda)?;
    positive("t_max", p.t_max)?;
    if p.nodes == 0 || !p.t.is_finite() || !p.theta.is_finite() {
        return Err(schema("nodes must be ≥ 1; t and theta must be finite"));
    }
    let params = ThermalParams::new(p.lambda).map_err(|e| schema(e.to_string()))?;
    let opts = HtOptions { t_max: p.t_max, nodes: p.nodes };
    let psi = match &p.state {
        StateInput::Gaussian { x0, k, sigma } => {
            positive("sigma", *sigma)?;
            let grid = match &p.grid {
                Some(g) => g.build()?,
                None => {
                    let g = match p.operator {
                        Operator::Ht => GridChoice::SquareRoot { center: params.critical_point(), t_max: p.t_max, n: p.nodes },
                        Operator::I | Operator::N => GridChoice::LogSymmetric { center: 0.0, min_offset: 1e-4, max_offset: 1e4, n_side: 800 },
                        _ => GridChoice::Uniform { start: -20.0, stop: 20.0, n: 1601 },
                    };
                    p.grid = Some(g.clone());
                    g.build()?
                }
            };
            let (x0, k, s) = (*x0, *k, *sigma);
            Wavefunction::from_fn(&grid, |x| C64::from_polar((-(x - x0).powi(2) / (2.0 * s * s)).exp() / (PI * s * s).powf(0.25), k * x))
        }
        StateInput::File { path } => {
            if p.grid.is_some() {
                return Err(schema("grid cannot be combined with a state file"));
            }
            let f = std::fs::File::open(path).map_err(|e| schema(format!("state file {path}: {e}")))?;
            Wavefunction::read_csv(f).map_err(|e| schema(format!("state file {path}: {e}")))?
        }
    };
    let eff = Effective { command: "propagate", params: &p, seed: exp.seed, tol: 0.0 };
    let out = match p.operator {
        Operator::Ht => {
            let b = match p.backend {
                Backend::Conjugation => HtBackend::Conjugation,
                Backend::Kernel => HtBackend::Kernel,
            };
            op::propagate_ht(params, p.t, &psi, b, &opts)?
        }
        Operator::V => op::propagate_v(FlowParams::new(p.theta, p.t)?, &psi),
        Operator::I => op::involution_i(&psi),
        Operator::L => op::phase_l(p.theta, &psi),
        Operator::S => op::translate_s(params, &psi)?,
        Operator::N => op::intertwiner_n(p.theta, &psi),
        Operator::Pg => {
            let sc = Scatterer::preset(&p.g_hat, p.lambda).map_err(|e| schema(e.to_string()))?;
            luttinger_core::scattering::evolve_pg(&sc, p.t, &psi)?
        }
    };
    let meta = base_meta(&eff.hash(), &[]);
    let mut buf = Vec::new();
    out.write_csv(&mut buf, &meta)?;
    write_file(&exp.output_path, "state.csv", &String::from_utf8(buf).expect("utf-8 csv"))?;
    let body = json!({
        "norm_in": psi.norm(),
        "norm_out": out.norm(),
        "norm_gap": (out.norm() - psi.norm()).abs(),
        "points": out.grid.len(),
        "state_meta": out.meta,
    });
    write_json(&exp.output_path, "propagate.json", &summary(&eff, body))?;
    Ok(Outcome::ok())
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantChoice {
    Auto,
    Minmax,
    Printed,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResolventParams {
    pub alpha: Vec<[f64; 2]>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub variant: VariantChoice,
}

impl Default for ResolventParams {
    fn default() -> Self {
        Self {
            alpha: vec![[0.0, 1.0], [1.0, 1.0], [0.0, -2.0]],
            x: kn::CONFORMANCE_LATTICE.to_vec(),
            y: kn::CONFORMANCE_LATTICE.to_vec(),
            variant: VariantChoice::Auto,
        }
    }
}

pub fn resolvent(exp: &Experiment) -> Result<Outcome, CliError> {
    let p: ResolventParams = exp.typed_params()?;
    let alphas: Vec<C64> = p.alpha.iter().map(|a| non_real("alpha", *a)).collect::<Result<_, _>>()?;
    if alphas.is_empty() || p.x.is_empty() || p.y.is_empty() || p.x.iter().chain(&p.y).any(|v| !v.is_finite()) {
        return Err(schema("alpha, x and y must be non-empty lists of finite values"));
    }
    let tol = exp.tol_or(1e-4);
    let eff = Effective { command: "resolvent", params: &p, seed: exp.seed, tol };
    let (variant, conformance) = match p.variant {
        VariantChoice::Minmax => (FVariant::MinMax, Value::Null),
        VariantChoice::Printed => (FVariant::Printed, Value::Null),
        VariantChoice::Auto => {
            let r = kn::select_variant(&alphas, tol)?;
            let c = json!({ "max_dev_printed": r.max_dev_printed, "max_dev_minmax": r.max_dev_minmax, "selected": r.selected });
            match r.selected {
                Some(v) => (v, c),
                None => return Err(CliError::Numeric(format!("no F_α variant matches the oracle within {tol:e}: {c}"))),
            }
        }
    };
    let mut lattice = Vec::new();
    for &a in &alphas {
        for &x in &p.x {
            for &y in &p.y {
                lattice.push((a, x, y));
            }
        }
    }
    let expansion = ExpansionOptions { tol: (tol * 1e-2).max(1e-10), ..ExpansionOptions::default() };
    let rows = par_map(&lattice, exp.threads, |&(a, x, y)| -> luttinger_core::Result<[C64; 3]> {
        let z = kn::kernel_z(a, x, y, variant)?;
        let l = kn::kernel_z_laplace(a, x, y, tol * 1e-2)?;
        let h = if x == 0.0 && y == 0.0 { C64::new(f64::NAN, f64::NAN) } else { resolvent_via_expansion(a, x, y, &expansion)?.value };
        Ok([z, l, h])
    });
    let mut csv = Csv::new(&["alpha_re", "alpha_im", "x", "y", "z_re", "z_im", "laplace_re", "laplace_im", "expansion_re", "expansion_im"]);
    let mut worst = 0.0f64;
    for (&(a, x, y), r) in lattice.iter().zip(rows) {
        let [z, l, h] = r?;
        for d in [(z - l).norm(), (z - h).norm(), (l - h).norm()] {
            if d.is_finite() {
                worst = worst.max(d);
            }
        }
        csv.row(&[a.re, a.im, x, y, z.re, z.im, l.re, l.im, h.re, h.im]);
    }
    let meta = base_meta(&eff.hash(), &[("agreement", tol), ("laplace", tol * 1e-2), ("expansion", expansion.tol)]);
    write_file(&exp.output_path, "resolvent.csv", &csv.finish(&meta))?;
    let agree = worst <= tol;
    let body = json!({
        "variant": variant,
        "conformance": conformance,
        "max_pairwise_deviation": worst,
        "agree": agree,
    });
    write_json(&exp.output_path, "resolvent.json", &summary(&eff, body))?;
    Ok(Outcome { failure: (!agree).then(|| format!("resolvent routes differ by {worst:e} > {tol:e}")) })
}

// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumParams {
    pub theta: f64,
    pub eps: Vec<f64>,
    /// Interval [a, b] with ab > 0.
    pub interval: [f64; 2],
    /// Box size of the momentum sum.
    pub box_size: f64,
    pub n_max: usize,
    /// Window L > 1 of the pv-IDOS before the limit.
    pub pv_window: f64,
    /// Also tabulate the spectral density of the inverted Gaussian.
    pub density: bool,
    pub energies: Range,
}

impl Default for SpectrumParams {
    fn default() -> Self {
        Self {
            theta: 0.0,
            eps: vec![-1.0, 0.5, 2.0],
            interval: [0.5, 2.0],
            box_size: 5.0,
            n_max: 100_000,
            pv_window: 1e3,
            density: false,
            energies: Range::new(-8.0, 8.0, 801),
        }
    }
}

pub fn spectrum(exp: &Experiment) -> Result<Outcome, CliError> {
    let p: SpectrumParams = exp.typed_params()?;
    let [a, b] = p.interval;
    if !(a * b > 0.0 && b > a) {
        return Err(schema(format!("interval must satisfy a < b and ab > 0, got [{a}, {b}]")));
    }
    positive("box_size", p.box_size)?;
    if p.n_max == 0 || !(p.pv_window > 1.0) || p.eps.iter().any(|e| !e.is_finite()) {
        return Err(schema("n_max ≥ 1, pv_window > 1 and finite eps are required"));
    }
    let eff = Effective { command: "spectrum", params: &p, seed: exp.seed, tol: 1e-4 };
    let mut rows = Vec::new();
    for &e in &p.eps {
        let ms = sp::idos_momentum_sum(e, p.box_size, p.n_max)?;
        let lap = if e >= 0.0 { json!(sp::idos_laplacian(e)?) } else { Value::Null };
        rows.push(json!({
            "eps": e,
            "idos_interval": sp::idos_interval(p.theta, e, a, b)?,
            "idos_interval_via_involution": sp::idos_interval_via_transform(e, a, b)?,
            "pv_idos": sp::pv_idos(p.theta, e),
            "pv_idos_window": sp::pv_idos_window(p.theta, e, p.pv_window)?,
            "momentum_sum": ms.value,
            "momentum_sum_tail_bound": ms.tail_bound,
            "idos_laplacian": lap,
        }));
    }
    let mut body = json!({ "rows": rows, "momentum_sum_target": 1.0 / (2.0 * PI) });
    if p.density {
        let energies = p.energies.points("energies")?;
        let g = Grid::log_symmetric(0.0, 1e-9, 1e9, 2000)?;
        let phi = Wavefunction::from_fn(&g, |x| C64::new((-x * x / 2.0).exp() / PI.powf(0.25), 0.0));
        let d = sp::spectral_density_pi(p.theta, &op::involution_i(&phi), &energies)?;
        let mut csv = Csv::new(&["eps", "density"]);
        for (e, v) in d.energies.iter().zip(&d.density) {
            csv.row(&[*e, *v]);
        }
        let meta = base_meta(&eff.hash(), &[]);
        write_file(&exp.output_path, "spectrum_density.csv", &csv.finish(&meta))?;
        body["density"] = json!({ "total_mass": d.total_mass, "quadrature_mass": d.quadrature_mass, "warning": d.warning });
    }
    write_json(&exp.output_path, "spectrum.json", &summary(&eff, body))?;
    Ok(Outcome::ok())
}

// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScatterParams {
    pub preset: String,
    pub lambda: f64,
    pub probe: [f64; 3],
    pub grid: Range,
    pub times: Vec<f64>,
}

impl Default for ScatterParams {
    fn default() -> Self {
        Self {
            preset: "gaussian_s2".into(),
            lambda: 1.0,
            probe: [0.0, 0.0, 1.0],
            grid: Range::new(-10.0, 10.0, 801),
            times: ScatterSchedule::default().times,
        }
    }
}

pub fn scatter(exp: &Experiment) -> Result<Outcome, CliError> {
    let p: ScatterParams = exp.typed_params()?;
    positive("lambda", p.lambda)?;
    positive("probe width", p.probe[2])?;
    let sc = Scatterer::preset(&p.preset, p.lambda).map_err(|e| schema(e.to_string()))?;
    let sched = ScatterSchedule { times: p.times.clone(), tol: exp.tol_or(1e-5), ..ScatterSchedule::default() };
    let eff = Effective { command: "scatter", params: &p, seed: exp.seed, tol: sched.tol };
    let xs = p.grid.points("grid")?;
    let grid = Grid::from_points(xs).map_err(|e| schema(e.to_string()))?;
    let [x0, k, s] = p.probe;
    let psi = Wavefunction::from_fn(&grid, |x| C64::from_polar((-(x - x0).powi(2) / (2.0 * s * s)).exp(), k * x));
    let closed = s_matrix_closed(&sc);
    let num = s_matrix_num(&sc, &psi, &sched);
    let mut body = json!({ "preset": p.preset });
    let mut failures = Vec::new();
    match &closed {
        Ok(v) => body["s_closed"] = json!(cpx(*v)),
        Err(e) => {
            body["s_closed"] = Value::Null;
            body["closed_error"] = json!(e.to_string());
            failures.push(format!("closed form: {e}"));
        }
    }
    match &num {
        Ok(v) => {
            body["s_numeric"] = json!(cpx(*v));
            body["abs_s_numeric"] = json!(v.norm());
        }
        Err(e) => {
            body["s_numeric"] = Value::Null;
            body["numeric_error"] = json!(e.to_string());
            failures.push(format!("numeric S: {e}"));
        }
    }
    if let (Ok(a), Ok(b)) = (&closed, &num) {
        body["deviation"] = json!((a - b).norm());
    }
    body["certified"] = json!(num.is_ok());
    write_json(&exp.output_path, "scatter.json", &summary(&eff, body))?;
    Ok(Outcome { failure: (!failures.is_empty()).then(|| failures.join("; ")) })
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassicalPreset {
    Generic,
    #[serde(rename = "generic_3d")]
    Generic3d,
    OneDimensional,
    Exceptional,
}

impl ClassicalPreset {
    fn config(self) -> ClassicalConfig {
        let c = |m, l, g: &[f64], r: &[f64], w: &[f64]| ClassicalConfig { m, lambda: l, gamma: g.to_vec(), rho0: r.to_vec(), wp0: w.to_vec() };
        match self {
            ClassicalPreset::Generic => c(1.0, 1.0, &[1.0, 0.0], &[0.2, -0.1], &[0.5, 0.8]),
            ClassicalPreset::Generic3d => c(0.7, 1.6, &[0.48, -0.6, 0.64], &[0.3, 0.2, -0.4], &[-0.2, 0.9, 0.45]),
            ClassicalPreset::OneDimensional => c(1.0, 1.0, &[1.0], &[0.5], &[-0.6]),
            ClassicalPreset::Exceptional => c(1.0, 2.0, &[0.0, 1.0, 0.0], &[0.4, 0.1, -2.0], &[0.0; 3]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Closed,
    Rk4,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassicalParams {
    pub preset: ClassicalPreset,
    pub m: Option<f64>,
    pub lambda: Option<f64>,
    pub gamma: Option<Vec<f64>>,
    pub rho0: Option<Vec<f64>>,
    pub wp0: Option<Vec<f64>>,
    pub method: Method,
    pub t_start: f64,
    pub t_end: f64,
    /// Samples of the closed form (critical and extremal times are added).
    pub n: usize,
    /// RK4 step.
    pub dt: f64,
}

impl Default for ClassicalParams {
    fn default() -> Self {
        Self {
            preset: ClassicalPreset::Generic,
            m: None,
            lambda: None,
            gamma: None,
            rho0: None,
            wp0: None,
            method: Method::Closed,
            t_start: 0.0,
            t_end: 10.0,
            n: 1001,
            dt: 1e-3,
        }
    }
}

pub fn classical(exp: &Experiment) -> Result<Outcome, CliError> {
    let p: ClassicalParams = exp.typed_params()?;
    let mut cfg = p.preset.config();
    if let Some(v) = p.m {
        cfg.m = v;
    }
    if let Some(v) = p.lambda {
        cfg.lambda = v;
    }
    if let Some(v) = &p.gamma {
        cfg.gamma = v.clone();
    }
    if let Some(v) = &p.rho0 {
        cfg.rho0 = v.clone();
    }
    if let Some(v) = &p.wp0 {
        cfg.wp0 = v.clone();
    }
    cfg.validate().map_err(|e| schema(e.to_string()))?;
    if !(p.t_end > p.t_start && p.t_start.is_finite() && p.t_end.is_finite()) || p.n < 2 {
        return Err(schema("need finite t_start < t_end and n ≥ 2"));
    }
    positive("dt", p.dt)?;
    let eff = Effective { command: "classical", params: &p, seed: exp.seed, tol: 0.0 };
    let inv = cl::invariants(&cfg);
    let ct = cl::critical_times(&cfg).ok();
    let d = cfg.dim();
    let mut header: Vec<String> = vec!["t".into()];
    header.extend((0..d).map(|i| format!("x{i}")));
    header.extend((0..d).map(|i| format!("p{i}")));
    header.push("E".into());
    header.push("p_perp".into());
    let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    let mut failure = None;
    match p.method {
        Method::Closed => {
            let mut ts = Range::new(p.t_start, p.t_end, p.n).points("time")?;
            if let Some(ct) = ct {
                let per = ct.period.unwrap_or(f64::INFINITY);
                let mut marks = vec![ct.t_c];
                marks.extend(ct.t_e);
                for m in marks {
                    // every representative m + kT inside the window
                    let k0 = if per.is_finite() { ((p.t_start - m) / per).ceil() } else { 0.0 };
                    let mut t = m + k0 * if per.is_finite() { per } else { 0.0 };
                    while t <= p.t_end {
                        if t >= p.t_start {
                            ts.push(t);
                        }
                        if !per.is_finite() {
                            break;
                        }
                        t += per;
                    }
                }
            }
            ts.sort_by(f64::total_cmp);
            ts.dedup();
            for t in ts {
                let x = cl::closed_form_position(&cfg, t);
                let mut row = vec![t];
                row.extend(&x);
                match cl::closed_form_trajectory(&cfg, t) {
                    Ok(s) => {
                        row.extend(&s.p);
                        row.push(cl::energy(&cfg, &s));
                        row.push(cl::transverse_momentum(&cfg, &s));
                    }
                    Err(Error::CriticalTime(_)) => {
                        // |p| diverges along γ; E and ℘_⊥ keep their conserved values
                        let tr: Vec<f64> = match &inv.nu {
                            Some(nu) => nu.iter().map(|v| v * inv.wp_perp).collect(),
                            None => vec![0.0; d],
                        };
                        row.extend(tr.iter().zip(&cfg.gamma).map(|(t, g)| if *g == 0.0 { *t } else { g.signum() * f64::INFINITY }));
                        row.push(inv.e0);
                        row.push(inv.wp_perp);
                    }
                    Err(e) => return Err(e.into()),
                }
                csv.row(&row);
            }
        }
        Method::Rk4 => {
            let s0 = if p.t_start == 0.0 { cfg.initial_state() } else { cl::closed_form_trajectory(&cfg, p.t_start)? };
            match cl::integrate_rk4(&cfg, &s0, p.t_end, p.dt) {
                Ok(tr) => {
                    for s in &tr.states {
                        let mut row = vec![s.t];
                        row.extend(&s.x);
                        row.extend(&s.p);
                        row.push(cl::energy(&cfg, s));
                        row.push(cl::transverse_momentum(&cfg, s));
                        csv.row(&row);
                    }
                }
                Err(e @ Error::BlowUp { .. }) => failure = Some(e.to_string()),
                Err(e) => return Err(e.into()),
            }
        }
    }
    let meta = base_meta(&eff.hash(), &[]);
    write_file(&exp.output_path, "trajectory.csv", &csv.finish(&meta))?;
    let body = json!({
        "regime": match inv.regime { Regime::Generic => "generic", Regime::OneDimensional => "one_dimensional", Regime::Exceptional => "exceptional" },
        "resolved_config": cfg,
        "ell": cfg.ell(),
        "e0": inv.e0,
        "wp_par": inv.wp_par,
        "wp_perp": inv.wp_perp,
        "critical_times": ct,
        "planes": cl::planes(&cfg).ok(),
        "error": failure,
    });
    write_json(&exp.output_path, "classical.json", &summary(&eff, body))?;
    Ok(Outcome { failure })
}

// ---------------------------------------------------------------------------

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelftestParams {
    /// Subset of criterion ids; all when absent.
    pub criteria: Option<Vec<u8>>,
}

pub fn selftest(exp: &Experiment) -> Result<Outcome, CliError> {
    let p: SelftestParams = exp.typed_params()?;
    let ids: Vec<u8> = match &p.criteria {
        Some(v) => {
            if let Some(bad) = v.iter().find(|id| !luttinger_battery::CRITERIA.iter().any(|c| c.0 == **id)) {
                return Err(schema(format!("unknown criterion {bad}")));
            }
            v.clone()
        }
        None => luttinger_battery::CRITERIA.iter().map(|c| c.0).collect(),
    };
    let eff = Effective { command: "selftest", params: &p, seed: exp.seed, tol: 0.0 };
    let mut outcomes = Vec::new();
    for id in ids {
        let o = luttinger_battery::run_criterion(id, exp.seed).expect("known criterion");
        println!("{}", luttinger_battery::summary_line(&o));
        outcomes.push(o);
    }
    // wall-clock times vary between runs; the report keeps only their verdicts
    let criteria: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            let checks: Vec<Value> = o
                .checks
                .iter()
                .map(|c| {
                    let timing = c.label.starts_with("runtime");
                    json!({
                        "label": c.label,
                        "value": if timing || !c.value.is_finite() { Value::Null } else { json!(c.value) },
                        "tolerance": c.tolerance,
                        "passed": c.passed,
                        "note": c.note,
                    })
                })
                .collect();
            json!({ "id": o.id, "name": o.name, "passed": o.passed, "budget_s": o.budget_s, "checks": checks })
        })
        .collect();
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| format!("[{}] {}", o.id, o.name)).collect();
    let mut timings = BTreeMap::new();
    for o in &outcomes {
        timings.insert(o.id, o.elapsed_s);
    }
    eprintln!("timings [s]: {timings:?}");
    let body = json!({ "seed": exp.seed, "passed": failed.is_empty(), "criteria": criteria });
    write_json(&exp.output_path, "selftest.json", &summary(&eff, body))?;
    Ok(Outcome { failure: (!failed.is_empty()).then(|| format!("failing criteria: {}", failed.join(", "))) })
}
