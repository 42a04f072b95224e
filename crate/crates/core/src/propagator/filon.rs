//! Filon quadrature for ∫ e^{−itu} g(u) du on panels.
//!
//! On each panel g is replaced by its degree-11 interpolant at 12 Gauss
//! nodes, written in Legendre form; the oscillator is integrated exactly via
//! ∫_{−1}^{1} e^{−iωs} P_m(s) ds = 2(−i)^m j_m(ω). Every weight is linear in
//! the samples, so a plan produces per-node complex weights for each t.

use crate::quad::{gauss_legendre, legendre_all};
use num_complex::Complex64;

/// Nodes per panel.
pub(crate) const NP: usize = 12;

/// Spherical Bessel functions j₀..j₁₁ at ω (any sign).
pub(crate) fn sph_bessel(omega: f64, out: &mut [f64; NP]) {
    let w = omega.abs();
    if w == 0.0 {
        *out = [0.0; NP];
        out[0] = 1.0;
        return;
    }
    if w < 1e-3 {
        // j_m(w) = w^m/(2m+1)!! (1 − w²/(2(2m+3)) + O(w⁴)).
        let mut lead = 1.0;
        for m in 0..NP {
            out[m] = lead * (1.0 - w * w / (2.0 * (2 * m + 3) as f64));
            lead *= w / (2 * m + 3) as f64;
        }
    } else if w >= NP as f64 {
        out[0] = w.sin() / w;
        out[1] = w.sin() / (w * w) - w.cos() / w;
        for m in 1..NP - 1 {
            out[m + 1] = (2 * m + 1) as f64 / w * out[m] - out[m - 1];
        }
    } else {
        // Miller's downward recurrence, normalized by Σ(2m+1) j_m² = 1.
        let start = NP + 30;
        let mut f = vec![0.0f64; start + 2];
        f[start] = 1.0;
        for m in (1..=start).rev() {
            f[m - 1] = (2 * m + 1) as f64 / w * f[m] - f[m + 1];
            if f[m - 1].abs() > 1e100 {
                for v in f.iter_mut().skip(m - 1) {
                    *v *= 1e-100;
                }
            }
        }
        let norm: f64 = f
            .iter()
            .enumerate()
            .map(|(m, v)| (2 * m + 1) as f64 * v * v)
            .sum::<f64>()
            .sqrt();
        let j0 = w.sin() / w;
        let j1 = w.sin() / (w * w) - w.cos() / w;
        let sign = if j0.abs() > j1.abs() {
            (j0 * f[0]).signum()
        } else {
            (j1 * f[1]).signum()
        };
        for m in 0..NP {
            out[m] = sign * f[m] / norm;
        }
    }
    if omega < 0.0 {
        for (m, v) in out.iter_mut().enumerate() {
            if m % 2 == 1 {
                *v = -*v;
            }
        }
    }
}

/// Panel layout with Gauss nodes; optional integration-by-parts tail after the last panel.
#[derive(Debug, Clone)]
pub(crate) struct Plan {
    pub ends: Vec<f64>,
    pub nodes: Vec<f64>,
    pub tail: bool,
    /// coef[m][j] = (2m+1)/2 · w_j P_m(s_j): Legendre coefficient m of the interpolant.
    coef: [[f64; NP]; NP],
}

impl Plan {
    pub fn new(ends: Vec<f64>, tail: bool) -> Self {
        let (s, w) = gauss_legendre(NP);
        let mut coef = [[0.0; NP]; NP];
        let mut p = [0.0; NP + 1];
        for j in 0..NP {
            legendre_all(NP, s[j], &mut p);
            for m in 0..NP {
                coef[m][j] = (2 * m + 1) as f64 / 2.0 * w[j] * p[m];
            }
        }
        let mut nodes = Vec::with_capacity((ends.len() - 1) * NP);
        for e in ends.windows(2) {
            let (mid, h) = (0.5 * (e[0] + e[1]), 0.5 * (e[1] - e[0]));
            nodes.extend(s.iter().map(|s| mid + h * s));
        }
        Plan {
            ends,
            nodes,
            tail,
            coef,
        }
    }

    pub fn panels(&self) -> usize {
        self.ends.len() - 1
    }

    pub fn upper(&self) -> f64 {
        *self.ends.last().unwrap()
    }

    /// Weights c_n with ∫_{u₀}^{U} e^{−itu} g du (+ tail) ≈ Σ c_n g(u_n).
    pub fn weights(&self, t: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.nodes.len()];
        let mut jm = [0.0; NP];
        let mi = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
        ];
        for p in 0..self.panels() {
            let (a, b) = (self.ends[p], self.ends[p + 1]);
            let (mid, h) = (0.5 * (a + b), 0.5 * (b - a));
            sph_bessel(t * h, &mut jm);
            let phase = Complex64::from_polar(h, -t * mid);
            let mut mom = [Complex64::new(0.0, 0.0); NP];
            for m in 0..NP {
                mom[m] = mi[m % 4] * (2.0 * jm[m]);
            }
            for j in 0..NP {
                let mut acc = Complex64::new(0.0, 0.0);
                for m in 0..NP {
                    acc += mom[m] * self.coef[m][j];
                }
                out[p * NP + j] = phase * acc;
            }
        }
        if self.tail && t != 0.0 {
            let d = self.tail_derivatives();
            let u = self.upper();
            let base = (self.panels() - 1) * NP;
            let it = Complex64::new(0.0, t);
            let e = Complex64::from_polar(1.0, -t * u);
            // ∫_U^∞ e^{−itu} g du = e^{−itU} Σ_r g^{(r)}(U)/(it)^{r+1}.
            let mut pw = e / it;
            for dr in &d {
                for j in 0..NP {
                    out[base + j] += pw * dr[j];
                }
                pw /= it;
            }
        }
        out
    }

    /// Functionals giving g, g′, g″ at the upper end from the last panel samples.
    fn tail_derivatives(&self) -> [[f64; NP]; 3] {
        let p = self.panels() - 1;
        let h = 0.5 * (self.ends[p + 1] - self.ends[p]);
        let mut d = [[0.0; NP]; 3];
        for m in 0..NP {
            let mf = m as f64;
            let p0 = 1.0;
            let p1 = mf * (mf + 1.0) / 2.0;
            let p2 = (mf - 1.0) * mf * (mf + 1.0) * (mf + 2.0) / 8.0;
            for j in 0..NP {
                d[0][j] += p0 * self.coef[m][j];
                d[1][j] += p1 * self.coef[m][j] / h;
                d[2][j] += p2 * self.coef[m][j] / (h * h);
            }
        }
        d
    }

    /// Error estimate for real samples g: Σ_panels h(|a₁₀| + |a₁₁|)·2 plus
    /// the size of the last tail term.
    pub fn error_estimate(&self, g: &[f64], t: f64) -> f64 {
        let mut err = 0.0;
        for p in 0..self.panels() {
            let h = 0.5 * (self.ends[p + 1] - self.ends[p]);
            let s = &g[p * NP..(p + 1) * NP];
            let a = |m: usize| -> f64 { (0..NP).map(|j| self.coef[m][j] * s[j]).sum::<f64>() };
            err += 2.0 * h * (a(NP - 2).abs() + a(NP - 1).abs());
        }
        if self.tail && t != 0.0 {
            let d = self.tail_derivatives();
            let base = (self.panels() - 1) * NP;
            let g2: f64 = (0..NP).map(|j| d[2][j] * g[base + j]).sum();
            err += g2.abs() / t.abs().powi(3);
        }
        err
    }

    /// Same plan with every panel split in two.
    pub fn halved(&self) -> Plan {
        let mut ends = Vec::with_capacity(2 * self.ends.len());
        for e in self.ends.windows(2) {
            ends.push(e[0]);
            ends.push(0.5 * (e[0] + e[1]));
        }
        ends.push(self.upper());
        Plan::new(ends, self.tail)
    }
}

/// Panel ends on [u_lo, U]: widths of at most `max_phase` radians of amplitude
/// phase c√u (Δu ≤ 2 max_phase √u / c), further capped at u below `u_geo`,
/// with every `breaks` point as a panel end.
pub(crate) fn panel_ends(u_lo: f64, u_geo: f64, upper: f64, c: f64, max_phase: f64, breaks: &[f64]) -> Vec<f64> {
    let mut bps: Vec<f64> = breaks.iter().copied().filter(|&b| b > u_lo && b < upper).collect();
    bps.push(upper);
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    let width = |u: f64| -> f64 {
        let phase = 2.0 * max_phase * u.sqrt() / c.max(1e-12);
        if u < u_geo {
            u.min(phase)
        } else {
            phase
        }
    };
    let mut ends = vec![u_lo];
    let mut u = u_lo;
    for &target in &bps {
        while u < target {
            let w = width(u);
            let next = if u + 1.25 * w >= target { target } else { u + w };
            ends.push(next);
            u = next;
        }
    }
    ends
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spherical_bessel_matches_closed_forms() {
        let mut j = [0.0; NP];
        for &w in &[1e-6f64, 0.3, 3.1, 7.0, 11.9, 12.5, 40.0, -2.0] {
            sph_bessel(w, &mut j);
            let j0 = w.sin() / w;
            let j2 = (3.0 / (w * w) - 1.0) * w.sin() / w - 3.0 * w.cos() / (w * w);
            assert!((j[0] - j0).abs() < 1e-13, "{w}");
            assert!((j[2] - j2).abs() < 1e-9 * (1.0 + 1.0 / (w * w)), "{w} {} {}", j[2], j2);
        }
    }

    #[test]
    fn integrates_polynomial_times_oscillator() {
        // ∫_0^2 e^{−itu} u² du in closed form.
        let plan = Plan::new(vec![0.0, 0.5, 2.0], false);
        for &t in &[0.0, 0.7, 30.0, -5.0] {
            let w = plan.weights(t);
            let v: Complex64 = plan.nodes.iter().zip(&w).map(|(u, c)| c * (u * u)).sum();
            let exact = if t == 0.0 {
                Complex64::new(8.0 / 3.0, 0.0)
            } else {
                let it = Complex64::new(0.0, t);
                let e = (-it * 2.0).exp();
                // antiderivative of u² e^{−itu}: −e^{−itu}(u²/(it) + 2u/(it)² + 2/(it)³)
                let f = |u: f64, e: Complex64| -e * (u * u / it + 2.0 * u / (it * it) + 2.0 / (it * it * it));
                f(2.0, e) - f(0.0, Complex64::new(1.0, 0.0))
            };
            assert!((v - exact).norm() < 1e-12, "t={t} {v} {exact}");
        }
    }
}
