//! Kernel of e^{−itH}P_c(H) from the spectral representation
//!
//!   K(t, x, y) = (2/π) ∫_ℝ e^{−itk²} φ̃(k, x) φ̃(k, y) / |F(k)|² dk,
//!
//! evaluated in the energy variable u = k², where the amplitude becomes
//! B(u) = φ(u, x) φ(u, y) / |F(√u)|² and the oscillator is linear.

mod born;
mod cutoff;
pub(crate) mod filon;
mod vdc;

pub use born::{born_kernel, born_kernel_with, BornResult, RATIO_GUARD};
pub use cutoff::{make_cutoff, CutoffKind, CutoffSpec};
pub use vdc::{van_der_corput_check, VdcReport, VDC_CONSTANT};

use crate::error::{Error, Result};
use crate::exec;
use crate::potential::Potential;
use crate::scattering::{resonance_check, Verdict};
use crate::specfun::j01;
use crate::volterra::{regular_sweep, SolverOptions, Spectral};
use filon::{panel_ends, Plan};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;

/// How the free part of the amplitude is handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    /// Integrate B − B₀ numerically and add the free part in closed form.
    Auto,
    /// Integrate the full amplitude.
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadParams {
    /// Largest amplitude phase per panel, radians.
    pub max_phase: f64,
    /// Lower end of the energy integration (the head below it is negligible).
    pub u_min: f64,
    /// Panels are geometric (ratio 2) below this energy.
    pub u_geometric: f64,
    /// The integration stops at √U = margin × (x + y)/(2 t_min), beyond the stationary point.
    /// Without reference subtraction the margin is multiplied by `full_margin_factor`.
    pub stationary_margin: f64,
    pub full_margin_factor: f64,
    /// Extra upper limit for √U (never below this).
    pub k_floor: f64,
    pub reference: Reference,
    pub solver: SolverOptions,
    /// Number of panel halvings applied to the plan.
    pub refine: u32,
}

impl Default for QuadParams {
    fn default() -> Self {
        QuadParams {
            max_phase: 3.0,
            u_min: 1e-14,
            u_geometric: 1.0,
            stationary_margin: 5.0,
            full_margin_factor: 4.0,
            k_floor: 4.0,
            reference: Reference::Auto,
            solver: SolverOptions::default(),
            refine: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelResult {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub value: Complex64,
    pub quadrature_error_est: f64,
    /// Upper wavenumber of the numerical integral (0 when closed form only).
    pub k_max: f64,
    pub n_points: usize,
}

/// Free kernel (√(xy)/(it)) e^{i(x²+y²)/(4t)} J₀(xy/(2t)).
pub fn free_kernel(t: f64, x: f64, y: f64) -> Complex64 {
    let (j0, _) = j01(x * y / (2.0 * t));
    let ph = Complex64::from_polar(1.0, (x * x + y * y) / (4.0 * t));
    ph * ((x * y).sqrt() * j0) / Complex64::new(0.0, t)
}

/// Point where 99.9% of ∫|q| has accumulated; sets the width of |F|² features.
fn mass_scale(p: &Potential) -> f64 {
    if p.is_zero() {
        return 0.0;
    }
    let total = p.moments().l1.value;
    let mut x = 0.5;
    while x < 1e4 && p.weighted_integral(&|_| 1.0, 0.0, x) < 0.999 * total {
        x *= 1.5;
    }
    x
}

/// Sampled amplitudes Φ(u_n, x_i) = φ(u_n, x_i)/|F(√u_n)| and the free Φ₀ on a plan.
pub(crate) struct Amplitudes {
    pub plan: Plan,
    pub grid: Vec<f64>,
    pub phi: Vec<Vec<f64>>,
    pub phi0: Vec<Vec<f64>>,
    pub chi: Vec<f64>,
    pub mode: Mode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Mode {
    /// g = χΦΦ − Φ₀Φ₀, closed-form free kernel added.
    Subtracted,
    /// g = χΦΦ.
    Full,
}

fn check_potential(p: &Potential, chi: Option<&CutoffSpec>) -> Result<()> {
    if !p.flags().decay {
        return Err(Error::Hypothesis(
            "kernel needs ∫₀¹|q| < ∞ and ∫₁^∞ x log²(1+x)|q| < ∞".into(),
        ));
    }
    let covers_zero = !matches!(chi, Some(c) if c.kind == CutoffKind::HighPass);
    if covers_zero && !p.is_zero() {
        let r = resonance_check(p, 1e-4)?;
        if r.verdict == Verdict::Resonant {
            return Err(Error::ResonanceAtZero(format!(
                "F₂(0) = {:.3e}; the decay estimate needs a non-resonant potential or a high-pass cutoff",
                r.f2_at_0
            )));
        }
    }
    Ok(())
}

impl Amplitudes {
    pub fn build(
        p: &Potential,
        grid: &[f64],
        t_min: f64,
        chi: Option<&CutoffSpec>,
        quad: &QuadParams,
    ) -> Result<Amplitudes> {
        crate::volterra::check_grid(grid)?;
        if !(t_min > 0.0 && t_min.is_finite()) {
            return Err(Error::Parameter(format!("|t| must be positive, got {t_min}")));
        }
        let x_max = *grid.last().unwrap();
        let c = 2.0 * x_max + 2.0 * mass_scale(p);
        let low = matches!(chi, Some(s) if s.kind == CutoffKind::LowPass);
        let mut breaks = vec![];
        if let Some(s) = chi {
            let (a, b) = s.band();
            breaks.extend([a, b]);
        }
        let mode = if quad.reference == Reference::Auto && !low {
            Mode::Subtracted
        } else {
            Mode::Full
        };
        let upper = if low {
            chi.unwrap().band().1
        } else {
            let margin = match mode {
                Mode::Subtracted => quad.stationary_margin,
                Mode::Full => quad.stationary_margin * quad.full_margin_factor,
            };
            let mut k = (margin * c / (2.0 * t_min)).max(quad.k_floor);
            if let Some(s) = chi {
                k = k.max(4.5 * s.k0);
            }
            k * k
        };
        let mut plan = Plan::new(
            panel_ends(quad.u_min, quad.u_geometric, upper, c, quad.max_phase, &breaks),
            !low,
        );
        for _ in 0..quad.refine {
            plan = plan.halved();
        }
        let free = |u: f64| -> Vec<f64> {
            let k = u.sqrt();
            grid.iter().map(|&x| (FRAC_PI_2 * x).sqrt() * j01(k * x).0).collect()
        };
        let phi0: Vec<Vec<f64>> = exec::map(&plan.nodes, |&u| free(u));
        let phi = if p.is_zero() {
            phi0.clone()
        } else {
            let rows = exec::map(&plan.nodes, |&u| -> Result<Vec<f64>> {
                let k = u.sqrt();
                let rs = regular_sweep(p, Spectral::Real(k), grid, &quad.solver, false)?;
                let (pv, pu) = rs.totals();
                let big_f = Complex64::new(1.0 + pv - (u.ln() / PI) * pu, pu).norm();
                grid.iter()
                    .map(|&x| rs.eval(x).map(|v| v.0 / big_f))
                    .collect()
            });
            rows.into_iter().collect::<Result<Vec<_>>>()?
        };
        let chi_v = plan
            .nodes
            .iter()
            .map(|&u| chi.map_or(1.0, |s| s.eval(u)))
            .collect();
        Ok(Amplitudes {
            plan,
            grid: grid.to_vec(),
            phi,
            phi0,
            chi: chi_v,
            mode,
        })
    }

    fn samples(&self, i: usize, j: usize) -> Vec<f64> {
        (0..self.plan.nodes.len())
            .map(|n| {
                let full = self.chi[n] * self.phi[n][i] * self.phi[n][j];
                match self.mode {
                    Mode::Full => full,
                    Mode::Subtracted => full - self.phi0[n][i] * self.phi0[n][j],
                }
            })
            .collect()
    }

    /// K(t, x_i, x_j) with weights `w` precomputed for this t.
    pub fn eval(&self, t: f64, w: &[Complex64], i: usize, j: usize) -> (Complex64, f64) {
        let g = self.samples(i, j);
        let s: Complex64 = w.iter().zip(&g).map(|(c, v)| c * v).sum();
        let mut val = s * (2.0 / PI);
        if self.mode == Mode::Subtracted {
            val += free_kernel(t, self.grid[i], self.grid[j]);
        }
        (val, 2.0 / PI * self.plan.error_estimate(&g, t))
    }

    pub fn k_max(&self) -> f64 {
        self.plan.upper().sqrt()
    }
}

/// Kernel of e^{−itH}P_c(H) (optionally χ(H)) at one (t, x, y).
pub fn kernel(p: &Potential, t: f64, x: f64, y: f64, chi: Option<&CutoffSpec>, quad: &QuadParams) -> Result<KernelResult> {
    if !(t != 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("t must be finite and nonzero, got {t}")));
    }
    if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
        return Err(Error::Domain("x and y must be positive".into()));
    }
    check_potential(p, chi)?;
    let mut grid = vec![x, y];
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let amp = Amplitudes::build(p, &grid, t.abs(), chi, quad)?;
    let w = amp.plan.weights(t);
    let ix = grid.iter().position(|g| *g == x).unwrap();
    let iy = grid.iter().position(|g| *g == y).unwrap();
    let (value, err) = amp.eval(t, &w, ix, iy);
    Ok(KernelResult {
        t,
        x,
        y,
        value,
        quadrature_error_est: err,
        k_max: amp.k_max(),
        n_points: amp.plan.nodes.len(),
    })
}

/// Kernel values K(t, x, y) for all y in `ys`, sharing one amplitude cache.
pub fn kernel_slice(
    p: &Potential,
    t: f64,
    x: f64,
    ys: &[f64],
    chi: Option<&CutoffSpec>,
    quad: &QuadParams,
) -> Result<Vec<KernelResult>> {
    if !(t != 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("t must be finite and nonzero, got {t}")));
    }
    check_potential(p, chi)?;
    let mut grid: Vec<f64> = ys.to_vec();
    grid.push(x);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let amp = Amplitudes::build(p, &grid, t.abs(), chi, quad)?;
    let w = amp.plan.weights(t);
    let ix = grid.iter().position(|g| *g == x).unwrap();
    Ok(ys
        .iter()
        .map(|&y| {
            let iy = grid.iter().position(|g| *g == y).unwrap();
            let (value, err) = amp.eval(t, &w, ix, iy);
            KernelResult {
                t,
                x,
                y,
                value,
                quadrature_error_est: err,
                k_max: amp.k_max(),
                n_points: amp.plan.nodes.len(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub t_list: Vec<f64>,
    pub sup_values: Vec<f64>,
    /// sup · √t.
    pub scaled: Vec<f64>,
    /// Where each sup was attained.
    pub argmax: Vec<(f64, f64)>,
    pub fitted_slope: f64,
    pub grid: Vec<f64>,
    /// Grid points with a non-finite kernel value.
    pub failures: usize,
    pub max_error_est: f64,
}

impl DecayReport {
    /// max/min of the scaled trace.
    pub fn scaled_ratio(&self) -> f64 {
        let mx = self.scaled.iter().copied().fold(f64::MIN, f64::max);
        let mn = self.scaled.iter().copied().fold(f64::MAX, f64::min);
        mx / mn
    }
}

/// The default spatial grid: 40 log-spaced points on [0.05, 40].
pub fn default_xy_grid() -> Vec<f64> {
    log_grid(0.05, 40.0, 40)
}

pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64))
        .collect()
}

/// Least-squares slope of log y against log x.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// sup over the (x, y) grid of |K(t, x, y)| for each t, with the log-log slope.
pub fn decay_sweep(
    p: &Potential,
    t_list: &[f64],
    grid: &[f64],
    chi: Option<&CutoffSpec>,
    quad: &QuadParams,
) -> Result<DecayReport> {
    if t_list.is_empty() || t_list.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::Parameter("t_list must hold positive times".into()));
    }
    if t_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parameter("t_list must be increasing".into()));
    }
    check_potential(p, chi)?;
    let amp = Amplitudes::build(p, grid, t_list[0], chi, quad)?;
    let n = grid.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let mut sup_values = Vec::new();
    let mut argmax = Vec::new();
    let mut failures = 0;
    let mut max_err: f64 = 0.0;
    for &t in t_list {
        let w = amp.plan.weights(t);
        let vals = exec::map(&pairs, |&(i, j)| amp.eval(t, &w, i, j));
        let mut best = (0.0f64, (grid[0], grid[0]));
        for (&(i, j), (v, e)) in pairs.iter().zip(&vals) {
            let a = v.norm();
            if !a.is_finite() {
                failures += 1;
                continue;
            }
            max_err = max_err.max(*e);
            if a > best.0 {
                best = (a, (grid[i], grid[j]));
            }
        }
        sup_values.push(best.0);
        argmax.push(best.1);
    }
    let scaled = sup_values.iter().zip(t_list).map(|(s, t)| s * t.sqrt()).collect();
    let fitted_slope = if t_list.len() > 1 {
        loglog_slope(t_list, &sup_values)
    } else {
        f64::NAN
    };
    Ok(DecayReport {
        t_list: t_list.to_vec(),
        sup_values,
        scaled,
        argmax,
        fitted_slope,
        grid: grid.to_vec(),
        failures,
        max_error_est: max_err,
    })
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// CSV columns: t, sup, sup_sqrt_t, x_at_sup, y_at_sup.
pub fn write_decay_csv<W: Write>(out: W, r: &DecayReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "sup", "sup_sqrt_t", "x_at_sup", "y_at_sup"]).map_err(csv_err)?;
    for i in 0..r.t_list.len() {
        let row = [r.t_list[i], r.sup_values[i], r.scaled[i], r.argmax[i].0, r.argmax[i].1];
        w.write_record(row.iter().map(|v| format!("{v:.12e}"))).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

/// CSV columns: y, re_K, im_K, err.
pub fn write_slice_csv<W: Write>(out: W, rows: &[KernelResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["y", "re_K", "im_K", "err"]).map_err(csv_err)?;
    for r in rows {
        let row = [r.y, r.value.re, r.value.im, r.quadrature_error_est];
        w.write_record(row.iter().map(|v| format!("{v:.12e}"))).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

/// gnuplot commands plotting column `ycol` against column 1 of a CSV file.
pub fn gnuplot_script(csv_file: &str, title: &str, ycols: &[(usize, &str)], logscale: bool) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set datafile commentschars '#'\n");
    s.push_str("set key autotitle columnhead\n");
    if logscale {
        s.push_str("set logscale xy\n");
    }
    s.push_str(&format!("set title '{title}'\n"));
    let plots: Vec<String> = ycols
        .iter()
        .map(|(c, name)| format!("'{csv_file}' using 1:{c} with linespoints title '{name}'"))
        .collect();
    s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    s
}
