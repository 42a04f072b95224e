//! Reference ODE integrator, independent of the Volterra machinery.
//!
//! Works in s = log x with u = √x w, which turns the equation into
//! w_ss = e^{2s}(q(e^s) − z) w and removes the critical singularity.
//! Dormand–Prince 5(4) with step control, restarted at every breakpoint of q.

use crate::error::{Error, Result};
use crate::potential::Potential;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-12,
            atol: 1e-14,
            max_steps: 2_000_000,
        }
    }
}

type State = [f64; 4];

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Right-hand side in s: (w, w_s)′ = (w_s, e^{2s}(q − z)w) for both components.
fn rhs(q: &Potential, z: f64, s: f64, y: &State) -> State {
    let x = s.exp();
    let c = x * x * (q.eval(x) - z);
    [y[1], c * y[0], y[3], c * y[2]]
}

/// Integrates y′ = f(t, y) from t0 to t1 > t0; calls `visit` after each accepted step.
fn dopri(
    f: &dyn Fn(f64, &State) -> State,
    t0: f64,
    t1: f64,
    h0: f64,
    mut y: State,
    opts: &OdeOptions,
    visit: &mut dyn FnMut(f64, &State),
) -> Result<State> {
    let mut t = t0;
    let span = t1 - t0;
    if span <= 0.0 {
        return Ok(y);
    }
    let mut h = h0.min(span);
    let mut steps = 0;
    while t < t1 {
        if steps >= opts.max_steps {
            return Err(Error::Stiffness { x: t.abs().exp() });
        }
        steps += 1;
        let last = h >= t1 - t;
        if last {
            h = t1 - t;
        }
        let mut k = [[0.0; 4]; 7];
        k[0] = f(t, &y);
        for i in 1..7 {
            let mut yt = y;
            for (j, kj) in k.iter().enumerate().take(i) {
                for (d, yd) in yt.iter_mut().enumerate() {
                    *yd += h * A[i][j] * kj[d];
                }
            }
            k[i] = f(t + C[i] * h, &yt);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for d in 0..4 {
            let mut a5 = 0.0;
            let mut a4 = 0.0;
            for i in 0..7 {
                a5 += B5[i] * k[i][d];
                a4 += B4[i] * k[i][d];
            }
            y5[d] += h * a5;
            let sc = opts.atol + opts.rtol * y[d].abs().max(y5[d].abs());
            err = err.max((h * (a5 - a4)).abs() / sc);
        }
        if !err.is_finite() {
            return Err(Error::Stiffness { x: t.abs().exp() });
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + h };
            y = y5;
            visit(t, &y);
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
        if t < t1 && h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Stiffness { x: t.abs().exp() });
        }
    }
    Ok(y)
}

/// One smooth piece from x to b in either direction. `visit` gets (x, state).
fn piece(
    q: &Potential,
    z: f64,
    x: f64,
    b: f64,
    y: State,
    opts: &OdeOptions,
    visit: &mut dyn FnMut(f64, &State),
) -> Result<State> {
    let freq = (z.abs().sqrt() * x.max(b)).max(1.0);
    let h0 = 0.01 / freq;
    if b >= x {
        dopri(&|s, y| rhs(q, z, s, y), x.ln(), b.ln(), h0, y, opts, &mut |s, y| visit(s.exp(), y))
    } else {
        // σ = −s: w_σ = −w_s and w_σσ = w_ss.
        let f = |sg: f64, y: &State| rhs(q, z, -sg, y);
        let flip = |y: &State| [y[0], -y[1], y[2], -y[3]];
        let r = dopri(&f, -x.ln(), -b.ln(), h0, flip(&y), opts, &mut |sg, y| {
            visit((-sg).exp(), &flip(y))
        })?;
        Ok(flip(&r))
    }
}

fn to_state(x: f64, u: Complex64, du: Complex64) -> State {
    let sx = x.sqrt();
    let w = u / sx;
    let ws = du * sx - u / (2.0 * sx);
    [w.re, ws.re, w.im, ws.im]
}

fn from_state(x: f64, y: &State) -> (Complex64, Complex64) {
    let sx = x.sqrt();
    let w = Complex64::new(y[0], y[2]);
    let ws = Complex64::new(y[1], y[3]);
    (w * sx, (ws + w * 0.5) / sx)
}

/// Propagates (u, u′) from x0 through `targets` in order, for
/// −u″ − u/(4x²) + q u = z u. Returns (u, u′) at each target.
pub fn propagate(
    q: &Potential,
    z: f64,
    x0: f64,
    u0: Complex64,
    du0: Complex64,
    targets: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<(Complex64, Complex64)>> {
    propagate_visit(q, z, x0, u0, du0, targets, opts, &mut |_, _| {})
}

#[allow(clippy::too_many_arguments)]
fn propagate_visit(
    q: &Potential,
    z: f64,
    x0: f64,
    u0: Complex64,
    du0: Complex64,
    targets: &[f64],
    opts: &OdeOptions,
    visit: &mut dyn FnMut(f64, &State),
) -> Result<Vec<(Complex64, Complex64)>> {
    if !(x0 > 0.0 && x0.is_finite()) || targets.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::Domain("ODE endpoints must be positive and finite".into()));
    }
    let mut out = Vec::with_capacity(targets.len());
    let mut y = to_state(x0, u0, du0);
    let mut x = x0;
    for &t in targets {
        let forward = t >= x;
        let mut stops: Vec<f64> = q
            .breakpoints()
            .iter()
            .copied()
            .filter(|&b| if forward { b > x && b < t } else { b < x && b > t })
            .collect();
        stops.sort_by(f64::total_cmp);
        if !forward {
            stops.reverse();
        }
        stops.push(t);
        for &b in &stops {
            y = piece(q, z, x, b, y, opts, visit)?;
            x = b;
        }
        out.push(from_state(x, &y));
    }
    Ok(out)
}

/// Starting point for the regular solution: the free solution is exact to
/// ∫₀^{x0} y(1 + |log y|)|q| there.
const REGULAR_START: f64 = 1e-9;

fn free_regular(z: f64, x: f64) -> (f64, f64) {
    let c = std::f64::consts::FRAC_PI_2.sqrt();
    let sx = x.sqrt();
    if z >= 0.0 {
        let k = z.sqrt();
        let (j0, j1) = crate::specfun::j01(k * x);
        (c * sx * j0, c * (0.5 * j0 / sx - k * sx * j1))
    } else {
        let kappa = (-z).sqrt();
        let r = crate::specfun::ik01(kappa * x);
        (c * sx * r.i0, c * (0.5 * r.i0 / sx + kappa * sx * r.i1))
    }
}

/// Regular solution φ(z, x) and φ′ at ascending grid points.
pub fn regular(q: &Potential, z: f64, grid: &[f64], opts: &OdeOptions) -> Result<Vec<(f64, f64)>> {
    let x0 = REGULAR_START.min(grid.first().copied().unwrap_or(1.0) * 0.5);
    let (u, du) = free_regular(z, x0);
    let r = propagate(q, z, x0, u.into(), du.into(), grid, opts)?;
    Ok(r.into_iter().map(|(a, b)| (a.re, b.re)).collect())
}

/// Number of zeros of φ(z, ·) on (0, x_end] plus, when q vanishes beyond
/// x_end and z ≤ 0, the zero of the exterior continuation if there is one.
/// By Sturm oscillation this counts eigenvalues below z.
pub fn count_nodes(q: &Potential, z: f64, x_end: f64, opts: &OdeOptions) -> Result<usize> {
    let x0 = REGULAR_START;
    let (u, du) = free_regular(z, x0);
    let mut count = 0usize;
    let mut last = u;
    let end = propagate_visit(q, z, x0, u.into(), du.into(), &[x_end], opts, &mut |_, y| {
        if y[0] != 0.0 && (y[0] > 0.0) != (last > 0.0) {
            count += 1;
        }
        if y[0] != 0.0 {
            last = y[0];
        }
    })?;
    if z < 0.0 {
        // Exterior: φ = a·u + b·v with u ∝ √x I₀(κx), v ∝ √x K₀(κx), W(u, v) = −1.
        // u/v increases from 0 to ∞, so a zero beyond x_end exists iff −b/a > u/v there.
        let p = crate::freeops::imag_pair((-z).sqrt(), x_end);
        let (phi, dphi) = (end[0].0.re, end[0].1.re);
        let a = -(phi * p.dv - dphi * p.v);
        let b = -(p.u * dphi - p.du * phi);
        if a != 0.0 && -b / a > p.u / p.v {
            count += 1;
        }
    } else if z == 0.0 {
        // Exterior: φ = a√x + b√x log x, which vanishes at log x = −a/b.
        let (phi, dphi) = (end[0].0.re, end[0].1.re);
        let s = x_end.sqrt();
        let (y2, dy2) = (s * x_end.ln(), (0.5 * x_end.ln() + 1.0) / s);
        let b = s * dphi - 0.5 / s * phi;
        let a = phi * dy2 - dphi * y2;
        if b != 0.0 && -a / b > x_end.ln() {
            count += 1;
        }
    }
    Ok(count)
}
