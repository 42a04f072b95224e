//! Numerical check of |∫ e^{itk²} A(k) dk| ≤ C |t|^{−1/2} ‖A‖_W.
//!
//! ‖A‖_W, the mass of the Fourier measure of A, is replaced by the ℓ¹ norm of
//! the DFT coefficients of the samples. The same trigonometric interpolant
//! feeds the oscillatory quadrature.

use super::filon::{panel_ends, Plan};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// 2^{8/3}.
pub const VDC_CONSTANT: f64 = 6.349_604_207_872_798;

#[derive(Debug, Clone, PartialEq)]
pub struct VdcReport {
    pub t_list: Vec<f64>,
    pub integrals: Vec<Complex64>,
    /// |I(t)| √|t|.
    pub scaled: Vec<f64>,
    pub wiener_norm: f64,
    /// VDC_CONSTANT · wiener_norm.
    pub bound: f64,
    /// bound / scaled, per t.
    pub margins: Vec<f64>,
    pub holds: bool,
}

struct Trig {
    k0: f64,
    period: f64,
    modes: Vec<(f64, Complex64)>,
}

impl Trig {
    fn eval(&self, k: f64) -> f64 {
        if k < self.k0 || k > self.k0 + self.period {
            return 0.0;
        }
        let s = k - self.k0;
        self.modes
            .iter()
            .map(|(w, c)| (c * Complex64::from_polar(1.0, w * s)).re)
            .sum()
    }
}

/// I(t) = ∫ e^{itk²} A(k) dk and the bound check, from samples of A on a uniform grid.
pub fn van_der_corput_check(k: &[f64], a: &[f64], t_list: &[f64]) -> Result<VdcReport> {
    let n = k.len();
    if n < 8 || a.len() != n {
        return Err(Error::Parameter("need at least 8 samples with matching lengths".into()));
    }
    let h = k[1] - k[0];
    if !(h > 0.0) || k.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0)) {
        return Err(Error::Grid("amplitude samples must lie on a uniform increasing grid".into()));
    }
    if t_list.iter().any(|t| !(t.is_finite() && *t != 0.0)) {
        return Err(Error::Parameter("times must be finite and nonzero".into()));
    }
    let peak = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 && a[0].abs().max(a[n - 1].abs()) > 1e-6 * peak {
        return Err(Error::Domain("amplitude is not compactly supported on the sample grid".into()));
    }

    let mut buf: Vec<Complex64> = a.iter().map(|&v| Complex64::new(v / n as f64, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let total: f64 = buf.iter().map(|c| c.norm()).sum();
    let tail: f64 = buf
        .iter()
        .enumerate()
        .filter(|(m, _)| (*m).min(n - *m) > n / 4)
        .map(|(_, c)| c.norm())
        .sum();
    if total > 0.0 && tail > 0.01 * total {
        return Err(Error::Resolution(format!(
            "{:.1}% of the Fourier mass lies above a quarter of the band",
            100.0 * tail / total
        )));
    }
    let period = n as f64 * h;
    let modes: Vec<(f64, Complex64)> = buf
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 1e-17 * total)
        .map(|(m, c)| {
            let mm = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
            (2.0 * PI * mm / period, *c)
        })
        .collect();
    let trig = Trig { k0: k[0], period, modes };

    // Even part in the energy variable: ∫₀^∞ e^{itu} (A(√u) + A(−√u)) / (2√u) du.
    let kmax = k[0].abs().max((k[0] + period).abs());
    let u_lo = 1e-14;
    let band = trig.modes.iter().fold(1.0f64, |m, (w, _)| m.max(w.abs()));
    let plan = Plan::new(panel_ends(u_lo, 1.0, kmax * kmax, band, 3.0, &[]), false);
    let g: Vec<f64> = plan
        .nodes
        .iter()
        .map(|&u| {
            let r = u.sqrt();
            (trig.eval(r) + trig.eval(-r)) / (2.0 * r)
        })
        .collect();
    let head = 2.0 * u_lo.sqrt() * trig.eval(0.0);

    let mut integrals = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let w = plan.weights(-t);
        let s: Complex64 = w.iter().zip(&g).map(|(c, v)| c * v).sum();
        integrals.push(s + head);
    }
    let scaled: Vec<f64> = integrals.iter().zip(t_list).map(|(i, t)| i.norm() * t.abs().sqrt()).collect();
    let bound = VDC_CONSTANT * total;
    let margins: Vec<f64> = scaled.iter().map(|s| if *s > 0.0 { bound / s } else { f64::INFINITY }).collect();
    let holds = scaled.iter().all(|s| *s <= bound);
    Ok(VdcReport {
        t_list: t_list.to_vec(),
        integrals,
        scaled,
        wiener_norm: total,
        bound,
        margins,
        holds,
    })
}
