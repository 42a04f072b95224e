//! Jost function, F₁/F₂ split, resonance classification, Weyl m-function
//! and bound states.

use crate::error::{Error, Result};
use crate::exec;
use crate::freeops::{jost_function_free, Wavenumber};
use crate::potential::Potential;
use crate::volterra::{
    jost_imag_normalized, jost_sweep, regular_sweep, zero_sweep, SolverOptions, Spectral, THETA_SHIFT,
};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::io::Write;

/// Which route produced the reported F(k).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JostMethod {
    Wronskian,
    IntegralRep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JostEvaluation {
    pub k: Wavenumber,
    /// f(k) = W(f(k,·), φ(k²,·)).
    pub jost: Complex64,
    /// F(k) = f(k) e^{iπ/4} k^{−1/2}.
    pub normalized: Complex64,
    pub f1: f64,
    pub f2: f64,
    /// m(k²) = −g(k)/f(k), g(k) = W(f(k,·), θ(k²,·)).
    pub m: Complex64,
    pub method: JostMethod,
    /// |F_wronskian − F_integral|.
    pub consistency_gap: f64,
    /// Relative spread of W(f, φ) across the matching points.
    pub wronskian_spread: f64,
    pub matching_points: Vec<f64>,
}

impl JostEvaluation {
    pub fn abs_jost(&self) -> f64 {
        self.jost.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Resonant,
    NonResonant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceReport {
    pub f2_at_0: f64,
    pub f1_at_0: f64,
    /// lim W(√x, φ(0, x)).
    pub wronskian_limit: f64,
    /// lim W(√x log x, φ(0, x)).
    pub wronskian_log_limit: f64,
    /// Spread of the tail Wronskians used for the limits.
    pub spread: f64,
    pub verdict: Verdict,
    pub tolerance: f64,
}

/// Default consistency tolerance between the Wronskian and integral routes.
pub const CONSISTENCY_TOL: f64 = 1e-6;

fn matching_points(p: &Potential, opts: &SolverOptions) -> Result<Vec<f64>> {
    let x_cut = if p.is_zero() { 2.0 } else { p.truncation_point(opts.tol)? };
    let (a, b) = (0.25f64, x_cut.clamp(1.0, 20.0));
    Ok((0..5).map(|i| a * (b / a).powf(i as f64 / 4.0)).collect())
}

fn mean(xs: &[Complex64]) -> Complex64 {
    xs.iter().sum::<Complex64>() / xs.len() as f64
}

fn spread(xs: &[Complex64], centre: Complex64) -> f64 {
    xs.iter().map(|w| (w - centre).norm()).fold(0.0, f64::max) / centre.norm().max(f64::MIN_POSITIVE)
}

/// F₁ + (i − log(k²)/π) F₂ for k > 0.
fn recombine(f1: f64, f2: f64, k: f64) -> Complex64 {
    f1 + Complex64::new(-(k * k).ln() / PI, 1.0) * f2
}

/// f(k), F(k), F₁, F₂ and m(k²) at one real k ≠ 0.
pub fn jost_function(p: &Potential, k: f64) -> Result<JostEvaluation> {
    jost_function_with(p, k, &SolverOptions::default())
}

pub fn jost_function_with(p: &Potential, k: f64, opts: &SolverOptions) -> Result<JostEvaluation> {
    if !k.is_finite() {
        return Err(Error::Domain(format!("k must be finite, got {k}")));
    }
    if k == 0.0 {
        return Err(Error::SingularInput("jost_function at k = 0".into()));
    }
    if !p.flags().marchenko {
        return Err(Error::Hypothesis("jost_function needs ∫ x log(1+x)|q| < ∞".into()));
    }
    let ka = k.abs();
    let pts = matching_points(p, opts)?;
    let ev = if p.is_zero() {
        let f = jost_function_free(ka);
        let r = (ka * ka).ln() / PI;
        // g₀ = W(f₀, θ₀ − cφ₀) with W(f₀, θ₀) = −e^{iπ/4}√k(1 + i log(k²)/π).
        let g = -Complex64::from_polar(ka.sqrt(), FRAC_PI_4) * Complex64::new(1.0, r) - THETA_SHIFT * f;
        JostEvaluation {
            k: Wavenumber::new(ka),
            jost: f,
            normalized: Complex64::new(1.0, 0.0),
            f1: 1.0,
            f2: 0.0,
            m: -g / f,
            method: JostMethod::Wronskian,
            consistency_gap: 0.0,
            wronskian_spread: 0.0,
            matching_points: pts,
        }
    } else {
        evaluate(p, ka, pts, opts)?
    };
    Ok(if k < 0.0 { conjugate(ev, k) } else { ev })
}

fn conjugate(mut ev: JostEvaluation, k: f64) -> JostEvaluation {
    ev.k = Wavenumber::new(k);
    ev.jost = ev.jost.conj();
    ev.normalized = ev.normalized.conj();
    ev.m = ev.m.conj();
    ev
}

fn evaluate(p: &Potential, k: f64, pts: Vec<f64>, opts: &SolverOptions) -> Result<JostEvaluation> {
    let sp = Spectral::Real(k);
    let rs = regular_sweep(p, sp, &pts, opts, false)?;
    let ts = regular_sweep(p, sp, &pts, opts, true)?;
    let js = jost_sweep(p, k, &pts, opts)?;
    let mut wf = Vec::with_capacity(pts.len());
    let mut wg = Vec::with_capacity(pts.len());
    for &x in &pts {
        let (phi, dphi) = rs.eval(x)?;
        let (tv, dtv) = ts.eval(x)?;
        let (th, dth) = (tv - THETA_SHIFT * phi, dtv - THETA_SHIFT * dphi);
        let (f, df) = js.eval(x)?;
        wf.push(f * dphi - df * phi);
        wg.push(f * dth - df * th);
    }
    let jost = mean(&wf);
    let g = mean(&wg);
    let wronskian_spread = spread(&wf, jost);
    let (pv, pu) = rs.totals();
    let (f1, f2) = (1.0 + pv, pu);
    let normalized = jost / jost_function_free(k);
    let integral = recombine(f1, f2, k);
    let consistency_gap = (normalized - integral).norm();
    let allowed = CONSISTENCY_TOL.max(10.0 * opts.tol) * normalized.norm().max(1.0);
    if !(consistency_gap <= allowed) {
        return Err(Error::Inconsistency {
            gap: consistency_gap,
            allowed,
        });
    }
    if jost.norm() < 1e-300 {
        return Err(Error::NearZeroDivision(format!("|f(k)| vanishes at k = {k}")));
    }
    Ok(JostEvaluation {
        k: Wavenumber::new(k),
        jost,
        normalized,
        f1,
        f2,
        m: -g / jost,
        method: JostMethod::Wronskian,
        consistency_gap,
        wronskian_spread,
        matching_points: pts,
    })
}

/// (F₁(k), F₂(k)) from the integral representation, k > 0.
pub fn f_split(p: &Potential, k: f64) -> Result<(f64, f64)> {
    f_split_with(p, k, &SolverOptions::default())
}

pub fn f_split_with(p: &Potential, k: f64, opts: &SolverOptions) -> Result<(f64, f64)> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Domain(format!("f_split needs k > 0, got {k}")));
    }
    if !p.flags().marchenko2 {
        return Err(Error::Hypothesis("f_split needs ∫ x log²(1+x)|q| < ∞".into()));
    }
    if p.is_zero() {
        return Ok((1.0, 0.0));
    }
    let rs = regular_sweep(p, Spectral::Real(k), &[], opts, false)?;
    let (pv, pu) = rs.totals();
    Ok((1.0 + pv, pu))
}

/// m(k²) = −g(k)/f(k).
pub fn m_function(p: &Potential, k: f64) -> Result<Complex64> {
    Ok(jost_function(p, k)?.m)
}

/// Classifies the zero-energy behaviour: resonant iff |F₂(0)| ≤ tol.
pub fn resonance_check(p: &Potential, tol: f64) -> Result<ResonanceReport> {
    resonance_check_with(p, tol, &SolverOptions::default())
}

pub fn resonance_check_with(p: &Potential, tol: f64, opts: &SolverOptions) -> Result<ResonanceReport> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance must be positive, got {tol}")));
    }
    if !p.flags().marchenko2 {
        return Err(Error::Hypothesis("resonance_check needs ∫ x log²(1+x)|q| < ∞".into()));
    }
    if p.is_zero() {
        return Ok(ResonanceReport {
            f2_at_0: 0.0,
            f1_at_0: 1.0,
            wronskian_limit: 0.0,
            wronskian_log_limit: -FRAC_PI_2.sqrt(),
            spread: 0.0,
            verdict: Verdict::Resonant,
            tolerance: tol,
        });
    }
    let x_cut = p.truncation_point(opts.tol)?;
    let (a, b) = (1.0f64.min(0.5 * x_cut), x_cut);
    let pts: Vec<f64> = (0..5).map(|i| a * (b / a).powf(i as f64 / 4.0)).collect();
    let rs = regular_sweep(p, Spectral::Real(0.0), &pts, opts, false)?;
    let zs = zero_sweep(p, &pts, opts)?;
    // φ = a·y₁ + b·y₂ with W(y₁, y₂) = 1: b = W(y₁, φ), a = W(φ, y₂).
    let mut bs = Vec::new();
    let mut as_ = Vec::new();
    for &x in &pts {
        let (phi, dphi) = rs.eval(x)?;
        let (y1, dy1) = zs.eval(0, x)?;
        let (y2, dy2) = zs.eval(1, x)?;
        let w12 = y1 * dy2 - dy1 * y2;
        bs.push((y1 * dphi - dy1 * phi) / w12);
        as_.push((phi * dy2 - dphi * y2) / w12);
    }
    let avg = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (bw, aw) = (avg(&bs), avg(&as_));
    let dev = |v: &[f64], c: f64| v.iter().map(|x| (x - c).abs()).fold(0.0, f64::max);
    let spread = dev(&bs, bw).max(dev(&as_, aw));
    if spread > 10.0 * tol.min(CONSISTENCY_TOL) * (1.0 + aw.abs() + bw.abs()) {
        return Err(Error::Extrapolation(format!(
            "tail Wronskians not settled (spread {spread:.3e})"
        )));
    }
    let (pv, pu) = rs.totals();
    let f2 = pu;
    let f1 = 1.0 + pv;
    let gap = (f2 - (FRAC_PI_2).sqrt() * bw).abs();
    if gap > 10.0 * tol {
        return Err(Error::Inconsistency { gap, allowed: 10.0 * tol });
    }
    Ok(ResonanceReport {
        f2_at_0: f2,
        f1_at_0: f1,
        wronskian_limit: bw,
        wronskian_log_limit: -aw,
        spread,
        verdict: if f2.abs() <= tol { Verdict::Resonant } else { Verdict::NonResonant },
        tolerance: tol,
    })
}

/// F(iκ) = f(iκ)/f₀(iκ), real.
pub fn jost_imag(p: &Potential, kappa: f64, opts: &SolverOptions) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
    }
    if p.is_zero() {
        return Ok(1.0);
    }
    jost_imag_normalized(p, kappa, opts)
}

/// Lower end of the bound-state scan.
pub const KAPPA_SCAN_MIN: f64 = 1e-6;
const SCAN_PER_DECADE: f64 = 40.0;

/// All κ ∈ (KAPPA_SCAN_MIN, kappa_max] with F(iκ) = 0, bisected to 1e-8, ascending.
pub fn bound_states(p: &Potential, kappa_max: f64) -> Result<Vec<f64>> {
    bound_states_with(p, kappa_max, &SolverOptions::default())
}

pub fn bound_states_with(p: &Potential, kappa_max: f64, opts: &SolverOptions) -> Result<Vec<f64>> {
    if !(kappa_max > KAPPA_SCAN_MIN && kappa_max.is_finite()) {
        return Err(Error::Parameter(format!("kappa_max must exceed {KAPPA_SCAN_MIN}")));
    }
    if !p.flags().marchenko {
        return Err(Error::Hypothesis("bound_states needs ∫ x log(1+x)|q| < ∞".into()));
    }
    if p.is_zero() {
        return Ok(vec![]);
    }
    let decades = (kappa_max / KAPPA_SCAN_MIN).log10();
    let n = (decades * SCAN_PER_DECADE).ceil() as usize + 1;
    let ks: Vec<f64> = (0..n)
        .map(|i| KAPPA_SCAN_MIN * (kappa_max / KAPPA_SCAN_MIN).powf(i as f64 / (n - 1) as f64))
        .collect();
    let vals = exec::map(&ks, |&k| jost_imag(p, k, opts));
    let vals: Vec<f64> = vals.into_iter().collect::<Result<_>>()?;
    let brackets: Vec<(f64, f64, f64)> = (1..n)
        .filter(|&i| vals[i - 1] == 0.0 || (vals[i - 1] > 0.0) != (vals[i] > 0.0))
        .map(|i| (ks[i - 1], ks[i], vals[i - 1]))
        .collect();
    let roots = exec::map(&brackets, |&(mut lo, mut hi, flo)| -> Result<f64> {
        if flo == 0.0 {
            return Ok(lo);
        }
        while hi - lo > 1e-8 * hi.max(1.0) * 0.5 {
            let mid = 0.5 * (lo + hi);
            let fm = jost_imag(p, mid, opts)?;
            if fm == 0.0 {
                return Ok(mid);
            }
            if (fm > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    });
    roots.into_iter().collect()
}

/// sup |k F′(k)| over a grid, by central differences.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeBound {
    pub constant: f64,
    pub samples: Vec<(f64, f64)>,
}

pub fn f_derivative_bound_check(p: &Potential, k_grid: &[f64]) -> Result<DerivativeBound> {
    f_derivative_bound_check_with(p, k_grid, &SolverOptions::default())
}

pub fn f_derivative_bound_check_with(p: &Potential, k_grid: &[f64], opts: &SolverOptions) -> Result<DerivativeBound> {
    if k_grid.iter().any(|k| *k == 0.0 || !k.is_finite()) {
        return Err(Error::Grid("k grid must avoid 0".into()));
    }
    let samples = exec::map(k_grid, |&k| -> Result<(f64, f64)> {
        let h = 1e-3 * k.abs();
        let fp = jost_function_with(p, k + h, opts)?.normalized;
        let fm = jost_function_with(p, k - h, opts)?.normalized;
        Ok((k, (k * (fp - fm) / (2.0 * h)).norm()))
    });
    let samples: Vec<(f64, f64)> = samples.into_iter().collect::<Result<_>>()?;
    let constant = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    Ok(DerivativeBound { constant, samples })
}

/// Evaluates jost_function on every k (in parallel with the default feature).
pub fn jost_sweep_k(p: &Potential, ks: &[f64], opts: &SolverOptions) -> Vec<Result<JostEvaluation>> {
    exec::map(ks, |&k| jost_function_with(p, k, opts))
}

/// CSV columns: k, Re F, Im F, F1, F2, |f|, Im m.
pub fn write_sweep_csv<W: Write>(out: W, evals: &[JostEvaluation]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["k", "re_F", "im_F", "F1", "F2", "abs_f", "im_m"]).map_err(io)?;
    for e in evals {
        let row = [
            e.k.k,
            e.normalized.re,
            e.normalized.im,
            e.f1,
            e.f2,
            e.abs_jost(),
            e.m.im,
        ];
        w.write_record(row.iter().map(|v| format!("{v:.12e}"))).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}
