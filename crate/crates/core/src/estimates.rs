//! Fitted constants for the free-solution, Green-kernel and perturbation bounds.
//!
//! Each inequality |lhs| ≤ C · shape is sampled on a log grid and C is fitted
//! as max |lhs|/shape. The bound "holds" on the grid when that maximum is finite.

use crate::error::Result;
use crate::freeops::{dgreen_dk, dphi_free_dk, green_free, jost_free, phi_free, theta_free};
use crate::potential::Potential;
use crate::volterra::{jost_solution, regular_solution, regular_solution_dk};

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub name: &'static str,
    pub constant: f64,
    /// (k, x, y) where the constant is attained; y = NaN for two-variable bounds.
    pub worst_at: (f64, f64, f64),
    pub samples: usize,
}

impl EstimateReport {
    pub fn holds(&self) -> bool {
        self.constant.is_finite() && self.samples > 0
    }
}

/// k and x values of the standard test grid (10 log-spaced points each).
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateGrid {
    pub k: Vec<f64>,
    pub x: Vec<f64>,
}

impl Default for EstimateGrid {
    fn default() -> Self {
        EstimateGrid {
            k: crate::propagator::log_grid(0.05, 20.0, 10),
            x: crate::propagator::log_grid(0.01, 20.0, 10),
        }
    }
}

struct Fit {
    name: &'static str,
    best: f64,
    at: (f64, f64, f64),
    n: usize,
    /// |lhs| below this counts as zero (solver accuracy).
    noise: f64,
}

impl Fit {
    fn new(name: &'static str) -> Self {
        Fit { name, best: 0.0, at: (f64::NAN, f64::NAN, f64::NAN), n: 0, noise: 0.0 }
    }

    fn with_noise(name: &'static str, noise: f64) -> Self {
        Fit { noise, ..Fit::new(name) }
    }

    fn add(&mut self, lhs: f64, shape: f64, at: (f64, f64, f64)) {
        self.n += 1;
        let r = if shape > 0.0 {
            lhs.abs() / shape
        } else if lhs.abs() <= self.noise {
            0.0
        } else {
            f64::INFINITY
        };
        if !(r <= self.best) {
            self.best = r;
            self.at = at;
        }
    }

    fn done(self) -> EstimateReport {
        EstimateReport { name: self.name, constant: self.best, worst_at: self.at, samples: self.n }
    }
}

/// (x, near moment, tail moment, φ error, f error, ∂ₖφ error) at one grid point.
type Sample = (f64, f64, f64, f64, f64, f64);

fn rho(k: f64, x: f64) -> f64 {
    x / (1.0 + k * x)
}

/// Free bounds: |φ₀|, |θ₀|, |G₀| and |∂ₖG₀| (the last two for y ≤ x).
pub fn free_estimates(g: &EstimateGrid) -> Result<Vec<EstimateReport>> {
    let mut phi = Fit::new("phi_free");
    let mut th = Fit::new("theta_free");
    let mut gr = Fit::new("green_free");
    let mut dg = Fit::new("dgreen_dk");
    for &k in &g.k {
        for &x in &g.x {
            phi.add(phi_free(k, x)?.value, rho(k, x).sqrt(), (k, x, f64::NAN));
            let log = 1.0 + ((1.0 + k * x) / x).ln().abs();
            th.add(theta_free(k, x)?.value, rho(k, x).sqrt() * log, (k, x, f64::NAN));
            for &y in g.x.iter().filter(|&&y| y <= x) {
                let l = 1.0 + (x / y).ln();
                let s = (rho(k, x) * rho(k, y)).sqrt() * l;
                gr.add(green_free(k, x, y)?, s, (k, x, y));
                let s = k * x * rho(k, x).powf(1.5) * rho(k, y).sqrt() * l;
                dg.add(dgreen_dk(k, x, y)?, s, (k, x, y));
            }
        }
    }
    Ok(vec![phi.done(), th.done(), gr.done(), dg.done()])
}

/// Perturbation bounds for φ − φ₀, f − f₀ and ∂ₖφ − ∂ₖφ₀ on one potential.
pub fn perturbed_estimates(p: &Potential, g: &EstimateGrid, tol: f64) -> Result<Vec<EstimateReport>> {
    let mut phi = Fit::with_noise("phi_minus_free", tol);
    let mut psi = Fit::with_noise("jost_minus_free", tol);
    let mut dphi = Fit::with_noise("dphi_minus_free", tol);
    let far = match p.support().1 {
        Some(b) => b,
        None => p.truncation_point(1e-14)?,
    };
    let rows = crate::exec::map(&g.k, |&k| -> Result<Vec<Sample>> {
        let r = regular_solution(p, k, &g.x, tol)?;
        let d = regular_solution_dk(p, k, &g.x, tol)?;
        let f = jost_solution(p, k, &g.x, tol)?;
        let mut out = Vec::with_capacity(g.x.len());
        for (i, &x) in g.x.iter().enumerate() {
            let near = p.weighted_integral(&|y| y / (1.0 + k * y) * (1.0 + (x / y).ln()), 0.0, x);
            let tail = p.weighted_integral(&|y| rho(k, y).sqrt() * (1.0 + (y / x).ln()), x, far.max(x));
            let e_phi = r.values[i] - phi_free(k, x)?.value;
            let e_psi = (f.values[i] - jost_free(k, x)?.value).norm();
            let e_d = d.values[i] - dphi_free_dk(k, x)?;
            out.push((x, near, tail, e_phi, e_psi, e_d));
        }
        Ok(out)
    });
    for (&k, row) in g.k.iter().zip(rows) {
        for (x, near, tail, e_phi, e_psi, e_d) in row? {
            phi.add(e_phi, rho(k, x).sqrt() * near, (k, x, f64::NAN));
            psi.add(e_psi, rho(k, x).sqrt() * tail, (k, x, f64::NAN));
            dphi.add(e_d, k * x * rho(k, x).powf(1.5) * near, (k, x, f64::NAN));
        }
    }
    Ok(vec![phi.done(), psi.done(), dphi.done()])
}
