//! Volterra solvers for the perturbed regular, Jost and zero-energy solutions.
//!
//! Every solver discretizes its integral equation on a graded cell mesh with
//! eight Gauss nodes per cell and runs successive approximation on the whole
//! mesh at once. Nested integrals are spectral per cell and cumulative across
//! cells, so one sweep costs O(N).

pub(crate) mod engine;
pub(crate) mod mesh;

use crate::error::{Error, Result};
use crate::freeops::{imag_pair, jost_free_unchecked, real_pair, Pair, Wavenumber};
use crate::potential::Potential;
use crate::specfun::{jy01, EULER_GAMMA};
use engine::{factorial_certificate, running_integral, solve, Direction, Kernel, Sweep};
use mesh::{rule, Mesh, MeshSpec, ORDER};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

/// Constant in the Green-function bound used for the factorial certificate.
pub const GREEN_BOUND: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Sup-norm tolerance on the Picard increment (relative to the local envelope).
    pub tol: f64,
    pub max_iterations: usize,
    /// Mesh cells per decade near the origin.
    pub per_decade: f64,
    /// Largest oscillation phase 2|k|h allowed in one cell.
    pub phase_per_cell: f64,
    /// Absolute cap on the cell width.
    pub max_width: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-9,
            max_iterations: 50,
            per_decade: 48.0,
            phase_per_cell: 0.8,
            max_width: 0.5,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolverOptions {
            tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Regular,
    RegularDk,
    Theta,
    Jost,
    ZeroEnergyY1,
    ZeroEnergyY2,
    Oracle,
}

/// A solution sampled on a grid.
#[derive(Debug, Clone)]
pub struct SolutionField<T> {
    pub grid: Vec<f64>,
    pub values: Vec<T>,
    /// x-derivatives at the grid points (absent for the k-derivative).
    pub derivatives: Option<Vec<T>>,
    pub k: Wavenumber,
    pub kind: FieldKind,
    pub iteration_count: usize,
    /// Bound on the sup-norm truncation error (Picard increment plus tail moment).
    pub tail_estimate: f64,
    /// Iteration count guaranteed by the factorial certificate.
    pub certificate: usize,
}

/// Spectral parameter: z = k² for real k, z = −κ² on the imaginary axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Spectral {
    Real(f64),
    Imag(f64),
}

impl Spectral {
    fn scale(self) -> f64 {
        match self {
            Spectral::Real(k) => k.abs(),
            Spectral::Imag(k) => k,
        }
    }

    pub fn pair(self, x: f64) -> Pair {
        match self {
            Spectral::Real(k) => {
                let k = k.abs();
                real_pair(k, x, &jy01(k * x))
            }
            Spectral::Imag(kappa) => imag_pair(kappa, x),
        }
    }
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Grid("empty grid".into()));
    }
    if grid.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::Grid("grid points must be positive and finite".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Grid("grid must be strictly increasing".into()));
    }
    Ok(())
}

fn require(flag: bool, what: &str) -> Result<()> {
    if flag {
        Ok(())
    } else {
        Err(Error::Hypothesis(format!("potential does not satisfy the {what} integrability condition")))
    }
}

/// Lower mesh end: where the neglected ∫₀^a y(1 + |log y|)|q| is below tol/100.
pub(crate) fn lower_cut(p: &Potential, tol: f64) -> f64 {
    let w = |y: f64| y * (1.0 + y.ln().abs());
    let mut a = 1e-8;
    while a > 1e-30 && p.weighted_integral(&w, 0.0, a) > tol * 1e-2 {
        a *= 1e-2;
    }
    a
}

fn max_width(p: &Potential, sp: Spectral, opts: &SolverOptions) -> f64 {
    let s = sp.scale();
    let mut w = opts.max_width.min(p.feature_scale());
    if s > 0.0 {
        w = w.min(opts.phase_per_cell / (2.0 * s));
    }
    w
}

pub(crate) fn build_mesh(p: &Potential, sp: Spectral, lo: f64, hi: f64, points: &[f64], opts: &SolverOptions) -> Result<Mesh> {
    let mut bps: Vec<f64> = p.breakpoints().to_vec();
    bps.extend_from_slice(points);
    Mesh::build(&MeshSpec {
        x_min: lo,
        x_max: hi,
        per_decade: opts.per_decade,
        max_width: max_width(p, sp, opts),
        breakpoints: bps,
        zones: p.zones().to_vec(),
    })
}

/// ∫ y/(1+|k|y) (1 + |log(X/y)|) |q(y)| dy on the mesh.
fn certificate_moment(mesh: &Mesh, q: &[f64], k: f64, x_ref: f64) -> f64 {
    let r = rule();
    let mut m = 0.0;
    for c in 0..mesh.cells() {
        let h = mesh.half_width(c);
        for j in 0..ORDER {
            let y = mesh.nodes[c * ORDER + j];
            m += h * r.weights[j] * y / (1.0 + k * y) * (1.0 + (x_ref / y).ln().abs()) * q[c * ORDER + j].abs();
        }
    }
    m
}

/// Converged forward sweep for φ (or θ) with its basis data.
pub(crate) struct RegularSweep {
    pub sp: Spectral,
    pub mesh: Mesh,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub q: Vec<f64>,
    pub sweep: Sweep<f64>,
    pub certificate: usize,
    pub tail: f64,
    seed_is_v: bool,
}

impl RegularSweep {
    /// ∫₀^X v q φ and ∫₀^X u q φ.
    pub fn totals(&self) -> (f64, f64) {
        (
            *self.sweep.iv_end.last().unwrap(),
            *self.sweep.iu_end.last().unwrap(),
        )
    }

    /// Running integrals (∫v q φ, ∫u q φ) up to x.
    pub fn integrals_at(&self, x: f64) -> Result<(f64, f64)> {
        let ends = &self.mesh.ends;
        if x <= ends[0] {
            return Ok((0.0, 0.0));
        }
        if x >= *ends.last().unwrap() {
            return Ok(self.totals());
        }
        match self.mesh.end_index(x) {
            Some(i) => Ok((self.sweep.iv_end[i], self.sweep.iu_end[i])),
            None => Err(Error::Grid(format!("x = {x} is not a mesh point"))),
        }
    }

    /// (value, derivative) at x.
    pub fn eval(&self, x: f64) -> Result<(f64, f64)> {
        let (pv, pu) = self.integrals_at(x)?;
        let b = self.sp.pair(x);
        let (s, ds) = if self.seed_is_v { (b.v, b.dv) } else { (b.u, b.du) };
        Ok((s + b.u * pv - b.v * pu, ds + b.du * pv - b.dv * pu))
    }
}

fn node_arrays(p: &Potential, sp: Spectral, mesh: &Mesh) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = mesh.nodes.len();
    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    let mut q = Vec::with_capacity(n);
    for &x in &mesh.nodes {
        let b = sp.pair(x);
        u.push(b.u);
        v.push(b.v);
        q.push(p.eval(x));
    }
    (u, v, q)
}

/// Forward sweep seeded by u (regular solution) or v (θ before normalization).
pub(crate) fn regular_sweep(
    p: &Potential,
    sp: Spectral,
    points: &[f64],
    opts: &SolverOptions,
    seed_is_v: bool,
) -> Result<RegularSweep> {
    require(p.flags().regular, "regular-solution")?;
    let lo = lower_cut(p, opts.tol);
    let hi = p.truncation_point(opts.tol)?.max(lo * 10.0);
    let mesh = build_mesh(p, sp, lo, hi, points, opts)?;
    let (u, v, q) = node_arrays(p, sp, &mesh);
    let seed = if seed_is_v { v.clone() } else { u.clone() };
    let env: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a.hypot(*b)).collect();
    let cm = GREEN_BOUND * certificate_moment(&mesh, &q, sp.scale(), hi);
    let certificate = factorial_certificate(cm, opts.tol);
    let tail = if p.support().1.is_some() {
        0.0
    } else {
        p.sigma_tilde(1, hi) * (1.0 + hi).ln().powi(2)
    };
    let sweep = solve(
        &Kernel { mesh: &mesh, u: &u, v: &v, q: &q },
        &seed,
        &env,
        Direction::Forward,
        0.5 * opts.tol,
        opts.max_iterations,
        certificate,
    )?;
    Ok(RegularSweep {
        sp,
        mesh,
        u,
        v,
        q,
        sweep,
        certificate,
        tail,
        seed_is_v,
    })
}

fn free_field(grid: &[f64], k: f64, kind: FieldKind, f: impl Fn(f64) -> (f64, f64)) -> SolutionField<f64> {
    let (values, derivatives) = grid.iter().map(|&x| f(x)).unzip();
    SolutionField {
        grid: grid.to_vec(),
        values,
        derivatives: Some(derivatives),
        k: Wavenumber::new(k),
        kind,
        iteration_count: 0,
        tail_estimate: 0.0,
        certificate: 0,
    }
}

/// Regular solution φ(k², x) on the grid.
pub fn regular_solution(p: &Potential, k: f64, grid: &[f64], tol: f64) -> Result<SolutionField<f64>> {
    regular_solution_with(p, k, grid, &SolverOptions::with_tol(tol))
}

pub fn regular_solution_with(p: &Potential, k: f64, grid: &[f64], opts: &SolverOptions) -> Result<SolutionField<f64>> {
    check_grid(grid)?;
    check_k(k)?;
    if p.is_zero() {
        return Ok(free_field(grid, k, FieldKind::Regular, |x| {
            let b = Spectral::Real(k).pair(x);
            (b.u, b.du)
        }));
    }
    let rs = regular_sweep(p, Spectral::Real(k), grid, opts, false)?;
    field_from_sweep(&rs, grid, k, FieldKind::Regular)
}

fn field_from_sweep(rs: &RegularSweep, grid: &[f64], k: f64, kind: FieldKind) -> Result<SolutionField<f64>> {
    let mut values = Vec::with_capacity(grid.len());
    let mut derivs = Vec::with_capacity(grid.len());
    for &x in grid {
        let (f, df) = rs.eval(x)?;
        values.push(f);
        derivs.push(df);
    }
    Ok(SolutionField {
        grid: grid.to_vec(),
        values,
        derivatives: Some(derivs),
        k: Wavenumber::new(k),
        kind,
        iteration_count: rs.sweep.iterations,
        tail_estimate: rs.sweep.increment + rs.tail,
        certificate: rs.certificate,
    })
}

fn check_k(k: f64) -> Result<()> {
    if k.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("k must be finite, got {k}")))
    }
}

/// Shift that enforces lim_{x→0} W(√x log x, θ) = 0 for θ seeded by θ₀.
pub const THETA_SHIFT: f64 = 2.0 / PI * (std::f64::consts::LN_2 - EULER_GAMMA);

/// θ(k², x): the second real solution with W(θ, φ) = 1 and lim_{x→0} W(√x log x, θ) = 0.
pub fn theta_solution(p: &Potential, k: f64, grid: &[f64], opts: &SolverOptions) -> Result<SolutionField<f64>> {
    check_grid(grid)?;
    check_k(k)?;
    let (phi, th) = if p.is_zero() {
        let sp = Spectral::Real(k);
        let a: Vec<Pair> = grid.iter().map(|&x| sp.pair(x)).collect();
        (
            a.iter().map(|b| (b.u, b.du)).collect::<Vec<_>>(),
            a.iter().map(|b| (b.v, b.dv)).collect::<Vec<_>>(),
        )
    } else {
        let rp = regular_sweep(p, Spectral::Real(k), grid, opts, false)?;
        let rt = regular_sweep(p, Spectral::Real(k), grid, opts, true)?;
        (
            grid.iter().map(|&x| rp.eval(x)).collect::<Result<Vec<_>>>()?,
            grid.iter().map(|&x| rt.eval(x)).collect::<Result<Vec<_>>>()?,
        )
    };
    let values = th.iter().zip(&phi).map(|(t, f)| t.0 - THETA_SHIFT * f.0).collect();
    let derivs = th.iter().zip(&phi).map(|(t, f)| t.1 - THETA_SHIFT * f.1).collect();
    Ok(SolutionField {
        grid: grid.to_vec(),
        values,
        derivatives: Some(derivs),
        k: Wavenumber::new(k),
        kind: FieldKind::Theta,
        iteration_count: 0,
        tail_estimate: 0.0,
        certificate: 0,
    })
}

/// ∂ₖφ(k², x).
pub fn regular_solution_dk(p: &Potential, k: f64, grid: &[f64], tol: f64) -> Result<SolutionField<f64>> {
    regular_solution_dk_with(p, k, grid, &SolverOptions::with_tol(tol))
}

pub fn regular_solution_dk_with(p: &Potential, k: f64, grid: &[f64], opts: &SolverOptions) -> Result<SolutionField<f64>> {
    check_grid(grid)?;
    check_k(k)?;
    if k == 0.0 {
        return Err(Error::SingularInput("regular_solution_dk at k = 0".into()));
    }
    let sign = k.signum();
    let ka = k.abs();
    let dphi0 = |x: f64| -x * (FRAC_PI_2 * x).sqrt() * crate::specfun::j01(ka * x).1;
    if p.is_zero() {
        let mut f = free_field(grid, k, FieldKind::RegularDk, |x| (sign * dphi0(x), 0.0));
        f.derivatives = None;
        return Ok(f);
    }
    let rs = regular_sweep(p, Spectral::Real(ka), grid, opts, false)?;
    let dtheta0 = |x: f64| {
        let r = jy01(ka * x);
        (FRAC_PI_2 * x).sqrt() * (2.0 / (PI * ka) * r.j0 - 2.0 * ka.ln() / PI * x * r.j1 + x * r.y1)
    };
    let mesh = &rs.mesh;
    let n = mesh.nodes.len();
    let uk: Vec<f64> = mesh.nodes.iter().map(|&x| dphi0(x)).collect();
    let vk: Vec<f64> = mesh.nodes.iter().map(|&x| dtheta0(x)).collect();
    let phi = &rs.sweep.f;
    let guk: Vec<f64> = (0..n).map(|i| uk[i] * rs.q[i] * phi[i]).collect();
    let gvk: Vec<f64> = (0..n).map(|i| vk[i] * rs.q[i] * phi[i]).collect();
    let (iuk, iuk_end) = running_integral(mesh, &guk, Direction::Forward);
    let (ivk, ivk_end) = running_integral(mesh, &gvk, Direction::Forward);
    let (iu, iv) = (&rs.sweep.iu, &rs.sweep.iv);
    let sigma: Vec<f64> = (0..n)
        .map(|i| uk[i] * (1.0 + iv[i]) + rs.u[i] * ivk[i] - rs.v[i] * iuk[i] - vk[i] * iu[i])
        .collect();
    let env: Vec<f64> = (0..n)
        .map(|i| rs.u[i].hypot(rs.v[i]) * (1.0 + mesh.nodes[i]))
        .collect();
    let beta = solve(
        &Kernel { mesh, u: &rs.u, v: &rs.v, q: &rs.q },
        &sigma,
        &env,
        Direction::Forward,
        0.5 * opts.tol,
        opts.max_iterations,
        rs.certificate,
    )?;
    let last = mesh.cells();
    let mut values = Vec::with_capacity(grid.len());
    for &x in grid {
        let idx = if x <= mesh.ends[0] {
            None
        } else if x >= mesh.ends[last] {
            Some(last)
        } else {
            Some(mesh.end_index(x).ok_or_else(|| Error::Grid(format!("x = {x} is not a mesh point")))?)
        };
        let b = rs.sp.pair(x);
        let (pu, pv, puk, pvk, bu, bv) = match idx {
            None => (0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
            Some(i) => (
                rs.sweep.iu_end[i],
                rs.sweep.iv_end[i],
                iuk_end[i],
                ivk_end[i],
                beta.iu_end[i],
                beta.iv_end[i],
            ),
        };
        let s = dphi0(x) * (1.0 + pv) + b.u * pvk - b.v * puk - dtheta0(x) * pu;
        values.push(sign * (s + b.u * bv - b.v * bu));
    }
    Ok(SolutionField {
        grid: grid.to_vec(),
        values,
        derivatives: None,
        k: Wavenumber::new(k),
        kind: FieldKind::RegularDk,
        iteration_count: beta.iterations,
        tail_estimate: beta.increment + rs.tail,
        certificate: rs.certificate,
    })
}

/// Converged backward sweep for the Jost solution at k > 0.
pub(crate) struct JostSweep {
    pub k: f64,
    pub mesh: Option<Mesh>,
    pub sweep: Option<Sweep<Complex64>>,
    pub iterations: usize,
    pub increment: f64,
    pub certificate: usize,
    pub tail: f64,
}

impl JostSweep {
    pub fn eval(&self, x: f64) -> Result<(Complex64, Complex64)> {
        let k = self.k;
        let r = jy01(k * x);
        let (f0, df0) = jost_free_unchecked(k, x, &r);
        let (mesh, sw) = match (&self.mesh, &self.sweep) {
            (Some(m), Some(s)) => (m, s),
            _ => return Ok((f0, df0)),
        };
        if x >= *mesh.ends.last().unwrap() {
            return Ok((f0, df0));
        }
        if x < mesh.ends[0] {
            return Err(Error::Grid(format!("x = {x} below the Jost mesh")));
        }
        let i = mesh
            .end_index(x)
            .ok_or_else(|| Error::Grid(format!("x = {x} is not a mesh point")))?;
        let b = real_pair(k, x, &r);
        let (su, sv) = (sw.iu_end[i], sw.iv_end[i]);
        Ok((f0 - sv * b.u + su * b.v, df0 - sv * b.du + su * b.dv))
    }
}

pub(crate) fn jost_sweep(p: &Potential, k: f64, points: &[f64], opts: &SolverOptions) -> Result<JostSweep> {
    require(p.flags().marchenko, "Marchenko")?;
    if k <= 0.0 {
        return Err(Error::SingularInput(format!("jost sweep needs k > 0, got {k}")));
    }
    let lo = points.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = if p.is_zero() { 0.0 } else { p.truncation_point(opts.tol)? };
    if p.is_zero() || hi <= lo {
        return Ok(JostSweep { k, mesh: None, sweep: None, iterations: 0, increment: 0.0, certificate: 0, tail: 0.0 });
    }
    let sp = Spectral::Real(k);
    let mesh = build_mesh(p, sp, lo, hi, points, opts)?;
    let (u, v, q) = node_arrays(p, sp, &mesh);
    let seed: Vec<Complex64> = mesh
        .nodes
        .iter()
        .map(|&x| jost_free_unchecked(k, x, &jy01(k * x)).0)
        .collect();
    let env: Vec<f64> = seed.iter().map(|s| s.norm()).collect();
    let cm = GREEN_BOUND * certificate_moment(&mesh, &q, k, lo);
    let certificate = factorial_certificate(cm, opts.tol);
    let tail = if p.support().1.is_some() { 0.0 } else { p.sigma_tilde(1, hi) * (1.0 + hi).ln().powi(2) };
    let sweep = solve(
        &Kernel { mesh: &mesh, u: &u, v: &v, q: &q },
        &seed,
        &env,
        Direction::Backward,
        0.5 * opts.tol,
        opts.max_iterations,
        certificate,
    )?;
    Ok(JostSweep {
        k,
        iterations: sweep.iterations,
        increment: sweep.increment,
        mesh: Some(mesh),
        sweep: Some(sweep),
        certificate,
        tail,
    })
}

/// Jost solution f(k, x) on the grid; f(−k, x) is the conjugate of f(k, x).
pub fn jost_solution(p: &Potential, k: f64, grid: &[f64], tol: f64) -> Result<SolutionField<Complex64>> {
    jost_solution_with(p, k, grid, &SolverOptions::with_tol(tol))
}

pub fn jost_solution_with(p: &Potential, k: f64, grid: &[f64], opts: &SolverOptions) -> Result<SolutionField<Complex64>> {
    check_grid(grid)?;
    check_k(k)?;
    if k == 0.0 {
        return Err(Error::SingularInput("jost_solution at k = 0".into()));
    }
    let js = jost_sweep(p, k.abs(), grid, opts)?;
    let mut values = Vec::with_capacity(grid.len());
    let mut derivs = Vec::with_capacity(grid.len());
    for &x in grid {
        let (f, df) = js.eval(x)?;
        if k < 0.0 {
            values.push(f.conj());
            derivs.push(df.conj());
        } else {
            values.push(f);
            derivs.push(df);
        }
    }
    Ok(SolutionField {
        grid: grid.to_vec(),
        values,
        derivatives: Some(derivs),
        k: Wavenumber::new(k),
        kind: FieldKind::Jost,
        iteration_count: js.iterations,
        tail_estimate: js.increment + js.tail,
        certificate: js.certificate,
    })
}

/// Backward k = 0 sweeps for y₁ ~ √x and y₂ ~ √x log x.
pub(crate) struct ZeroSweep {
    pub mesh: Option<Mesh>,
    pub y: [Option<Sweep<f64>>; 2],
    pub certificate: usize,
    pub tail: f64,
}

impl ZeroSweep {
    /// (y, y′) for which = 0 (y₁) or 1 (y₂).
    pub fn eval(&self, which: usize, x: f64) -> Result<(f64, f64)> {
        let sx = x.sqrt();
        let lx = x.ln();
        let (s, ds) = if which == 0 {
            (sx, 0.5 / sx)
        } else {
            (sx * lx, (0.5 * lx + 1.0) / sx)
        };
        let (mesh, sw) = match (&self.mesh, &self.y[which]) {
            (Some(m), Some(s)) => (m, s),
            _ => return Ok((s, ds)),
        };
        if x >= *mesh.ends.last().unwrap() {
            return Ok((s, ds));
        }
        let i = mesh
            .end_index(x)
            .ok_or_else(|| Error::Grid(format!("x = {x} is not a mesh point")))?;
        let b = Spectral::Real(0.0).pair(x);
        let (su, sv) = (sw.iu_end[i], sw.iv_end[i]);
        Ok((s - b.u * sv + b.v * su, ds - b.du * sv + b.dv * su))
    }
}

pub(crate) fn zero_sweep(p: &Potential, points: &[f64], opts: &SolverOptions) -> Result<ZeroSweep> {
    require(p.flags().marchenko2, "second Marchenko (x log²)")?;
    let lo = points.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = if p.is_zero() { 0.0 } else { p.truncation_point(opts.tol)? };
    if p.is_zero() || hi <= lo {
        return Ok(ZeroSweep { mesh: None, y: [None, None], certificate: 0, tail: 0.0 });
    }
    let sp = Spectral::Real(0.0);
    let mesh = build_mesh(p, sp, lo, hi, points, opts)?;
    let (u, v, q) = node_arrays(p, sp, &mesh);
    let cm = GREEN_BOUND * certificate_moment(&mesh, &q, 0.0, lo);
    let certificate = factorial_certificate(cm, opts.tol);
    let env: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a.hypot(*b)).collect();
    let kernel = Kernel { mesh: &mesh, u: &u, v: &v, q: &q };
    let mut y = [None, None];
    for (which, slot) in y.iter_mut().enumerate() {
        let seed: Vec<f64> = mesh
            .nodes
            .iter()
            .map(|&x| if which == 0 { x.sqrt() } else { x.sqrt() * x.ln() })
            .collect();
        *slot = Some(solve(&kernel, &seed, &env, Direction::Backward, 0.5 * opts.tol, opts.max_iterations, certificate)?);
    }
    let tail = if p.support().1.is_some() { 0.0 } else { p.sigma_tilde(1, hi) * (1.0 + hi).ln().powi(2) };
    Ok(ZeroSweep { mesh: Some(mesh), y, certificate, tail })
}

/// Zero-energy solutions y₁ = √x(1 + o(1)) and y₂ = √x log x (1 + o(1)) as x → ∞.
pub fn zero_energy_pair(p: &Potential, grid: &[f64]) -> Result<(SolutionField<f64>, SolutionField<f64>)> {
    zero_energy_pair_with(p, grid, &SolverOptions::default())
}

pub fn zero_energy_pair_with(
    p: &Potential,
    grid: &[f64],
    opts: &SolverOptions,
) -> Result<(SolutionField<f64>, SolutionField<f64>)> {
    check_grid(grid)?;
    let zs = zero_sweep(p, grid, opts)?;
    let make = |which: usize| -> Result<SolutionField<f64>> {
        let mut values = Vec::with_capacity(grid.len());
        let mut derivs = Vec::with_capacity(grid.len());
        for &x in grid {
            let (a, b) = zs.eval(which, x)?;
            values.push(a);
            derivs.push(b);
        }
        let sw = zs.y[which].as_ref();
        Ok(SolutionField {
            grid: grid.to_vec(),
            values,
            derivatives: Some(derivs),
            k: Wavenumber::new(0.0),
            kind: if which == 0 { FieldKind::ZeroEnergyY1 } else { FieldKind::ZeroEnergyY2 },
            iteration_count: sw.map_or(0, |s| s.iterations),
            tail_estimate: sw.map_or(0.0, |s| s.increment) + zs.tail,
            certificate: zs.certificate,
        })
    };
    Ok((make(0)?, make(1)?))
}

/// Largest κx kept on the imaginary axis, where I₀ is still far from overflow.
const IMAG_PHASE_CAP: f64 = 350.0;

/// F(iκ) = 1 + ∫ f̂(x) φ₀(−κ², x) q(x) dx, where f̂ = f(iκ, ·)/√κ is the decaying
/// solution, computed by a backward sweep seeded with √(2x/π) K₀(κx).
pub(crate) fn jost_imag_normalized(p: &Potential, kappa: f64, opts: &SolverOptions) -> Result<f64> {
    require(p.flags().marchenko, "Marchenko")?;
    let sp = Spectral::Imag(kappa);
    let lo = lower_cut(p, opts.tol);
    let hi = p.truncation_point(opts.tol)?.min(IMAG_PHASE_CAP / kappa).max(lo * 10.0);
    let mesh = build_mesh(p, sp, lo, hi, &[], opts)?;
    let (u, v, q) = node_arrays(p, sp, &mesh);
    let env: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    let cm = GREEN_BOUND * certificate_moment(&mesh, &q, kappa, lo);
    let certificate = factorial_certificate(cm, opts.tol);
    let sweep = solve(
        &Kernel { mesh: &mesh, u: &u, v: &v, q: &q },
        &v,
        &env,
        Direction::Backward,
        0.5 * opts.tol,
        opts.max_iterations,
        certificate,
    )?;
    Ok(1.0 + sweep.iu_end[0])
}
