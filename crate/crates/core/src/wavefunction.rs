//! Sampled wavefunctions on nonuniform grids.

use crate::error::{domain, Error, Result};
use crate::quadrature::gauss_legendre;
use crate::C64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::{Read, Write};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GridKind {
    Uniform,
    /// Nodes `c ± e^s` with s uniform: clusters geometrically at `c`.
    LogSymmetric { center: f64 },
    /// Nodes `c ± t²` with t on Gauss–Legendre nodes: the natural grid for
    /// Hankel-type transforms in the variable `t = √|x − c|`.
    SquareRoot { center: f64 },
    /// Arbitrary increasing points with trapezoid weights.
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    points: Vec<f64>,
    weights: Vec<f64>,
    kind: GridKind,
}

fn trapezoid_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut w = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let h = 0.5 * (x[i + 1] - x[i]);
        w[i] += h;
        w[i + 1] += h;
    }
    w
}

impl Grid {
    pub fn new(points: Vec<f64>, weights: Vec<f64>, kind: GridKind) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::Shape(format!("{} points vs {} weights", points.len(), weights.len())));
        }
        if !points.windows(2).all(|p| p[0] < p[1]) || !points.iter().all(|x| x.is_finite()) {
            return Err(domain("grid points must be finite and strictly increasing"));
        }
        if !weights.iter().all(|w| *w > 0.0 && w.is_finite()) {
            return Err(domain("grid weights must be positive"));
        }
        Ok(Self { points, weights, kind })
    }

    /// Arbitrary increasing points, trapezoid weights.
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(domain("a grid needs at least two points"));
        }
        let w = trapezoid_weights(&points);
        Self::new(points, w, GridKind::Custom)
    }

    /// n equispaced points on [a, b], endpoints included, trapezoid weights.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(b > a) || n < 2 {
            return Err(domain("uniform grid needs a < b and n ≥ 2"));
        }
        let h = (b - a) / (n - 1) as f64;
        let points: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
        let w = trapezoid_weights(&points);
        Self::new(points, w, GridKind::Uniform)
    }

    /// `n_side` nodes on each side of `center`, offsets from `min_offset` to `max_offset`
    /// spaced geometrically. The center itself is excluded; the gap
    /// (center − min_offset, center + min_offset) is carried by the innermost weights.
    pub fn log_symmetric(center: f64, min_offset: f64, max_offset: f64, n_side: usize) -> Result<Self> {
        if !(max_offset > min_offset && min_offset > 0.0) || n_side < 2 {
            return Err(domain("log grid needs 0 < min_offset < max_offset and n_side ≥ 2"));
        }
        let (l0, l1) = (min_offset.ln(), max_offset.ln());
        let ds = (l1 - l0) / (n_side - 1) as f64;
        let mut pts = Vec::with_capacity(2 * n_side);
        let mut wts = Vec::with_capacity(2 * n_side);
        let weight = |i: usize, d: f64| {
            let w = d * ds * if i == 0 || i == n_side - 1 { 0.5 } else { 1.0 };
            if i == 0 {
                w + min_offset
            } else {
                w
            }
        };
        for i in (0..n_side).rev() {
            let d = (l0 + ds * i as f64).exp();
            pts.push(center - d);
            wts.push(weight(i, d));
        }
        for i in 0..n_side {
            let d = (l0 + ds * i as f64).exp();
            pts.push(center + d);
            wts.push(weight(i, d));
        }
        Self::new(pts, wts, GridKind::LogSymmetric { center })
    }

    /// Nodes `center ± t_j²` for the n Gauss–Legendre nodes t_j of [0, t_max],
    /// with weights `2 t_j w_j`.
    pub fn square_root(center: f64, t_max: f64, n: usize) -> Result<Self> {
        if !(t_max > 0.0) || n == 0 {
            return Err(domain("square-root grid needs t_max > 0 and n ≥ 1"));
        }
        let (t, w) = gauss_legendre(n, 0.0, t_max);
        let mut pts = Vec::with_capacity(2 * n);
        let mut wts = Vec::with_capacity(2 * n);
        for j in (0..n).rev() {
            pts.push(center - t[j] * t[j]);
            wts.push(2.0 * t[j] * w[j]);
        }
        for j in 0..n {
            pts.push(center + t[j] * t[j]);
            wts.push(2.0 * t[j] * w[j]);
        }
        Self::new(pts, wts, GridKind::SquareRoot { center })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn span(&self) -> (f64, f64) {
        (self.points[0], self.points[self.points.len() - 1])
    }

    /// The same grid translated by `d`; weights are unchanged.
    pub fn shifted(&self, d: f64) -> Result<Self> {
        let kind = match self.kind {
            GridKind::LogSymmetric { center } => GridKind::LogSymmetric { center: center + d },
            GridKind::SquareRoot { center } => GridKind::SquareRoot { center: center + d },
            k => k,
        };
        Self::new(self.points.iter().map(|x| x + d).collect(), self.weights.clone(), kind)
    }

    /// Uniform spacing, if the grid is uniform.
    pub fn spacing(&self) -> Option<f64> {
        match self.kind {
            GridKind::Uniform => Some(self.points[1] - self.points[0]),
            _ => None,
        }
    }
}

/// Complex samples on a grid plus free-form metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    pub grid: Grid,
    pub values: Vec<C64>,
    pub meta: BTreeMap<String, String>,
}

impl Wavefunction {
    pub fn new(grid: Grid, values: Vec<C64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::Shape(format!("{} grid points vs {} values", grid.len(), values.len())));
        }
        Ok(Self { grid, values, meta: BTreeMap::new() })
    }

    pub fn from_fn<F: Fn(f64) -> C64>(grid: &Grid, f: F) -> Self {
        let values = grid.points.iter().map(|&x| f(x)).collect();
        Self { grid: grid.clone(), values, meta: BTreeMap::new() }
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self::from_fn(grid, |_| C64::new(0.0, 0.0))
    }

    fn check_same_grid(&self, o: &Self) -> Result<()> {
        if self.grid.points != o.grid.points {
            return Err(Error::Shape("wavefunctions live on different grids".into()));
        }
        Ok(())
    }

    /// ⟨self, other⟩, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .zip(&self.grid.weights)
            .fold(C64::new(0.0, 0.0), |s, ((a, b), w)| s + a.conj() * b * *w))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().zip(&self.grid.weights).map(|(v, w)| v.norm_sqr() * w).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(domain("cannot normalize the zero state"));
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, c: C64) -> Self {
        self.map(|_, v| v * c)
    }

    pub fn map<F: Fn(f64, C64) -> C64>(&self, f: F) -> Self {
        let values = self.grid.points.iter().zip(&self.values).map(|(&x, &v)| f(x, v)).collect();
        Self { grid: self.grid.clone(), values, meta: self.meta.clone() }
    }

    /// Pointwise multiplication by `m`.
    pub fn apply_diag<F: Fn(f64) -> C64>(&self, m: F) -> Result<Self> {
        let mut out = Vec::with_capacity(self.values.len());
        for (&x, &v) in self.grid.points.iter().zip(&self.values) {
            let mx = m(x);
            if !(mx.re.is_finite() && mx.im.is_finite()) {
                return Err(domain(format!("multiplier not finite at x = {x}")));
            }
            out.push(mx * v);
        }
        Ok(Self { grid: self.grid.clone(), values: out, meta: self.meta.clone() })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check_same_grid(o)?;
        let values = self.values.iter().zip(&o.values).map(|(a, b)| a - b).collect();
        Ok(Self { grid: self.grid.clone(), values, meta: BTreeMap::new() })
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_same_grid(o)?;
        let values = self.values.iter().zip(&o.values).map(|(a, b)| a + b).collect();
        Ok(Self { grid: self.grid.clone(), values, meta: BTreeMap::new() })
    }

    /// ‖self − other‖.
    pub fn distance(&self, o: &Self) -> Result<f64> {
        Ok(self.sub(o)?.norm())
    }

    /// Four-point Lagrange interpolation; zero outside the grid span.
    pub fn sample(&self, x: f64) -> C64 {
        let p = &self.grid.points;
        let n = p.len();
        if n == 0 || x < p[0] || x > p[n - 1] || !x.is_finite() {
            return C64::new(0.0, 0.0);
        }
        if n < 4 {
            let i = p.partition_point(|&q| q <= x).clamp(1, n - 1);
            let t = (x - p[i - 1]) / (p[i] - p[i - 1]);
            return self.values[i - 1] * (1.0 - t) + self.values[i] * t;
        }
        let i = p.partition_point(|&q| q <= x);
        let lo = i.saturating_sub(2).min(n - 4);
        let mut acc = C64::new(0.0, 0.0);
        for j in lo..lo + 4 {
            let mut l = 1.0;
            for k in lo..lo + 4 {
                if k != j {
                    l *= (x - p[k]) / (p[j] - p[k]);
                }
            }
            acc += self.values[j] * l;
        }
        acc
    }

    /// Squared norm carried by the outermost `frac` of points on either end.
    pub fn edge_mass(&self, frac: f64) -> f64 {
        let n = self.values.len();
        let m = ((n as f64 * frac).ceil() as usize).max(1).min(n);
        let w = &self.grid.weights;
        (0..m).chain(n - m..n).map(|i| self.values[i].norm_sqr() * w[i]).sum()
    }

    pub fn write_csv<W: Write>(&self, out: W, extra_meta: &BTreeMap<String, String>) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["x", "re", "im"]).map_err(csv_err)?;
        for (x, v) in self.grid.points.iter().zip(&self.values) {
            wtr.write_record(&[fmt_f(*x), fmt_f(v.re), fmt_f(v.im)]).map_err(csv_err)?;
        }
        let mut out = wtr.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        for (k, v) in self.meta.iter().chain(extra_meta.iter()) {
            writeln!(out, "# {k}: {v}")?;
        }
        Ok(())
    }

    /// Reads `x,re,im` rows; `#` lines are metadata. Weights are rebuilt by trapezoid.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(input);
        let headers = rdr.headers().map_err(csv_err)?.clone();
        let cols: Vec<&str> = headers.iter().collect();
        if cols != ["x", "re", "im"] {
            return Err(Error::Parse(format!("expected header x,re,im, found {}", cols.join(","))));
        }
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let num = |i: usize| -> Result<f64> {
                rec.get(i)
                    .ok_or_else(|| Error::Parse(format!("row {}: missing column {i}", line + 1)))?
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {}: {e}", line + 1)))
            };
            xs.push(num(0)?);
            vs.push(C64::new(num(1)?, num(2)?));
        }
        let grid = Grid::from_points(xs)?;
        Wavefunction::new(grid, vs)
    }
}

fn fmt_f(v: f64) -> String {
    format!("{v:.17e}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

// ---------------------------------------------------------------------------
// Fourier transforms, (Fψ)(k) = (2π)^{-1/2} ∫ e^{-ikx} ψ(x) dx

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FourierBackend {
    /// Weighted sum against e^{−ikx}; any grids.
    Direct,
    /// FFT on a uniform input grid; the output grid is the dual uniform grid.
    Fft,
}

/// Fraction of the squared norm at the grid edges above which a truncation warning is attached.
const EDGE_WARN: f64 = 1e-10;

fn transform_direct(psi: &Wavefunction, out: &Grid, sign: f64) -> Wavefunction {
    let c = 1.0 / (2.0 * PI).sqrt();
    let xs = &psi.grid.points;
    let ws = &psi.grid.weights;
    let values = out
        .points
        .iter()
        .map(|&k| {
            let s = xs
                .iter()
                .zip(ws)
                .zip(&psi.values)
                .fold(C64::new(0.0, 0.0), |s, ((&x, &w), &v)| s + C64::from_polar(w, sign * k * x) * v);
            s * c
        })
        .collect();
    let mut wf = Wavefunction { grid: out.clone(), values, meta: BTreeMap::new() };
    let n2 = psi.norm_sqr();
    if n2 > 0.0 && psi.edge_mass(0.01) > EDGE_WARN * n2 {
        wf.meta.insert("warning".into(), "input does not decay within its grid span; transform truncated".into());
    }
    wf
}

/// Fourier transform sampled on `out` by direct summation.
pub fn fourier(psi: &Wavefunction, out: &Grid) -> Wavefunction {
    transform_direct(psi, out, -1.0)
}

/// Inverse Fourier transform sampled on `out` by direct summation.
pub fn fourier_inverse(phi: &Wavefunction, out: &Grid) -> Wavefunction {
    transform_direct(phi, out, 1.0)
}

/// The k-grid dual to a uniform grid of n points and spacing h: `k_m = 2πm/(nh)`, m = −⌊n/2⌋..⌈n/2⌉−1.
pub fn dual_grid(grid: &Grid) -> Result<Grid> {
    let h = grid.spacing().ok_or_else(|| domain("dual grid requires a uniform grid"))?;
    let n = grid.len();
    let dk = 2.0 * PI / (n as f64 * h);
    let m0 = -((n / 2) as i64);
    let pts: Vec<f64> = (0..n as i64).map(|j| (m0 + j) as f64 * dk).collect();
    let w = vec![dk; n];
    Grid::new(pts, w, GridKind::Uniform)
}

/// Fourier transform by FFT onto [`dual_grid`]. Uses the same trapezoid weights as
/// [`fourier`], so the two backends agree up to rounding on the dual grid.
pub fn fourier_fft(psi: &Wavefunction) -> Result<Wavefunction> {
    let h = psi.grid.spacing().ok_or_else(|| domain("FFT backend requires a uniform grid"))?;
    let n = psi.grid.len();
    let a = psi.grid.points[0];
    let out = dual_grid(&psi.grid)?;
    let mut buf: Vec<C64> = psi.values.iter().zip(&psi.grid.weights).map(|(v, w)| v * (w / h)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let m0 = -((n / 2) as i64);
    let c = h / (2.0 * PI).sqrt();
    let values = out
        .points
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let m = (m0 + j as i64).rem_euclid(n as i64) as usize;
            buf[m] * C64::from_polar(c, -k * a)
        })
        .collect();
    let mut wf = Wavefunction { grid: out, values, meta: BTreeMap::new() };
    let n2 = psi.norm_sqr();
    if n2 > 0.0 && psi.edge_mass(0.01) > EDGE_WARN * n2 {
        wf.meta.insert("warning".into(), "input does not decay within its grid span; transform truncated".into());
    }
    Ok(wf)
}

pub fn fourier_with(psi: &Wavefunction, out: &Grid, backend: FourierBackend) -> Result<Wavefunction> {
    match backend {
        FourierBackend::Direct => Ok(fourier(psi, out)),
        FourierBackend::Fft => {
            let f = fourier_fft(psi)?;
            if f.grid.points == out.points {
                Ok(f)
            } else {
                let mut r = Wavefunction::from_fn(out, |k| f.sample(k));
                r.meta = f.meta;
                Ok(r)
            }
        }
    }
}
