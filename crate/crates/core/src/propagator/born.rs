//! Truncated Born series for the high-energy part of the kernel.
//!
//! With R₀(s, s′) = a(s_<) b(s_>), a = √(πs/2) J₀(ks), b = i√(πs/2) H₀(ks),
//! the resolvent expands as R = Σ R₀(−qR₀)ⁿ and Im R(k² + i0)(x, y) is the
//! spectral amplitude. Term n is w_n(x) with w₀ = R₀(·, y) and
//! w_{j+1} = −R₀ q w_j, computed by running integrals on the Volterra mesh.

use super::filon::{panel_ends, Plan};
use super::{check_potential, kernel, mass_scale, CutoffKind, CutoffSpec, KernelResult, QuadParams};
use crate::error::{Error, Result};
use crate::exec;
use crate::potential::Potential;
use crate::volterra::engine::{running_integral, Direction};
use crate::volterra::{build_mesh, lower_cut, Spectral};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Largest tolerated term ratio from order 2 on.
pub const RATIO_GUARD: f64 = 0.75;

#[derive(Debug, Clone, PartialEq)]
pub struct BornResult {
    /// Partial sum of orders 0..=N.
    pub kernel: KernelResult,
    /// Contribution of each order to the kernel.
    pub terms: Vec<Complex64>,
    /// sup over the energy nodes of |χ T_n|, T_n the order-n resolvent term.
    pub term_norms: Vec<f64>,
    /// term_norms[n+1] / term_norms[n].
    pub ratios: Vec<f64>,
}

/// Resolvent Born terms T_0..T_N at wavenumber k > 0.
fn resolvent_terms(p: &Potential, k: f64, x: f64, y: f64, order: usize, quad: &QuadParams) -> Result<Vec<Complex64>> {
    let sp = Spectral::Real(k);
    let opts = &quad.solver;
    let lo = lower_cut(p, opts.tol).min(0.5 * x.min(y));
    let hi = p.truncation_point(opts.tol)?.max(2.0 * x.max(y));
    let mesh = build_mesh(p, sp, lo, hi, &[x, y], opts)?;
    let l = (k * k).ln() / PI;
    let ab = |s: f64| -> (f64, Complex64) {
        let b = sp.pair(s);
        (b.u, Complex64::new(b.v - l * b.u, b.u))
    };
    let n = mesh.nodes.len();
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    let mut q = Vec::with_capacity(n);
    for &s in &mesh.nodes {
        let (ai, bi) = ab(s);
        a.push(ai);
        b.push(bi);
        q.push(p.eval(s));
    }
    let (ax, bx) = ab(x);
    let (ay, by) = ab(y);
    let ix = mesh
        .end_index(x)
        .ok_or_else(|| Error::Grid(format!("{x} is not a mesh point")))?;
    let mut w: Vec<Complex64> = mesh
        .nodes
        .iter()
        .zip(a.iter().zip(&b))
        .map(|(&s, (&ai, &bi))| if s < y { by * ai } else { bi * ay })
        .collect();
    let mut out = vec![if x < y { by * ax } else { bx * ay }];
    for _ in 0..order {
        let g1: Vec<Complex64> = (0..n).map(|i| w[i] * (a[i] * q[i])).collect();
        let g2: Vec<Complex64> = (0..n).map(|i| w[i] * b[i] * q[i]).collect();
        let (pn, pe) = running_integral(&mesh, &g1, Direction::Forward);
        let (sn, se) = running_integral(&mesh, &g2, Direction::Backward);
        out.push(-(bx * pe[ix] + se[ix] * ax));
        w = (0..n).map(|i| -(b[i] * pn[i] + sn[i] * a[i])).collect();
    }
    Ok(out)
}

/// Born partial sum with the default depth N = 6.
pub fn born_kernel(p: &Potential, t: f64, x: f64, y: f64, chi: &CutoffSpec) -> Result<BornResult> {
    born_kernel_with(p, t, x, y, chi, 6, &QuadParams::default())
}

/// Σ_{n ≤ N} of the Born terms of the high-pass kernel χ(H)e^{−itH}.
/// Order 0 is the free high-pass kernel.
pub fn born_kernel_with(
    p: &Potential,
    t: f64,
    x: f64,
    y: f64,
    chi: &CutoffSpec,
    order: usize,
    quad: &QuadParams,
) -> Result<BornResult> {
    if chi.kind != CutoffKind::HighPass {
        return Err(Error::Parameter("the Born series needs a high-pass cutoff".into()));
    }
    check_potential(p, Some(chi))?;
    let zero = kernel(&Potential::zero(), t, x, y, Some(chi), quad)?;
    let mut terms = vec![zero.value];
    let (band_lo, _) = chi.band();
    let c = x + y + 2.0 * mass_scale(p);
    let mut k_max = (quad.stationary_margin * c / (2.0 * t.abs())).max(quad.k_floor).max(4.5 * chi.k0);
    k_max = k_max.max(zero.k_max);
    let upper = k_max * k_max;
    let mut plan = Plan::new(
        panel_ends(band_lo, quad.u_geometric.max(band_lo), upper, c, quad.max_phase, &[chi.band().1]),
        true,
    );
    for _ in 0..quad.refine {
        plan = plan.halved();
    }
    let rows: Vec<Result<Vec<Complex64>>> = if order == 0 || p.is_zero() {
        vec![]
    } else {
        exec::map(&plan.nodes, |&u| resolvent_terms(p, u.sqrt(), x, y, order, quad))
    };
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let chi_v: Vec<f64> = plan.nodes.iter().map(|&u| chi.eval(u)).collect();

    // Order-0 amplitude norm from the closed-form free resolvent.
    let mut term_norms = vec![plan
        .nodes
        .iter()
        .zip(&chi_v)
        .map(|(&u, &c)| {
            let k = u.sqrt();
            let l = u.ln() / PI;
            let pa = Spectral::Real(k).pair(x.min(y));
            let pb = Spectral::Real(k).pair(x.max(y));
            (Complex64::new(pb.v - l * pb.u, pb.u) * pa.u).norm() * c
        })
        .fold(0.0, f64::max)];
    let w = plan.weights(t);
    let mut err = zero.quadrature_error_est;
    for n in 1..=order {
        if rows.is_empty() {
            terms.push(Complex64::new(0.0, 0.0));
            term_norms.push(0.0);
            continue;
        }
        let g: Vec<f64> = rows.iter().zip(&chi_v).map(|(r, c)| c * r[n].im).collect();
        let s: Complex64 = w.iter().zip(&g).map(|(c, v)| c * v).sum();
        terms.push(s * (2.0 / PI));
        err += 2.0 / PI * plan.error_estimate(&g, t);
        term_norms.push(
            rows.iter()
                .zip(&chi_v)
                .map(|(r, c)| r[n].norm() * c)
                .fold(0.0, f64::max),
        );
    }
    let ratios: Vec<f64> = term_norms
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
        .collect();
    for (n, &r) in ratios.iter().enumerate().skip(2) {
        if r > RATIO_GUARD {
            return Err(Error::K0TooSmall { order: n, ratio: r });
        }
    }
    let value = terms.iter().sum();
    Ok(BornResult {
        kernel: KernelResult {
            t,
            x,
            y,
            value,
            quadrature_error_est: err,
            k_max,
            n_points: zero.n_points + plan.nodes.len(),
        },
        terms,
        term_norms,
        ratios,
    })
}
